use std::fs;
use std::path::Path;

use magspace_core::dichotomy::{constant_field_growth, flux_bound_table, l1_field_energy, ExperimentTable};
use magspace_core::energy::energy;
use magspace_core::fields::{sample_field, FieldSpec};
use magspace_core::gauge::{coulomb_gauge_with_radii, default_radii, symmetric_gauge, GrowthRow};
use magspace_core::io::{write_csv, write_scalar, write_table, write_toml, write_vector, write_wave};
use magspace_core::minimize::{minimize, HistoryRow, ProfileRow, Termination};
use magspace_core::spectral::{dirichlet_suite, landau_witness, lemma25_suite, DirichletMargin, SuiteRow};
use magspace_core::{Error, GridSpec, Region, VectorField};
use serde::Serialize;

use crate::config::{PotentialKind, Preset, RunConfig};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_NOT_CONVERGED: u8 = 4;

/// Exit code for a library error: input and hypothesis problems are the
/// caller's to fix, everything else is a numerical failure.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NonFinite(_) | Error::Numerical(_) | Error::Io(_) => EXIT_NUMERICAL,
        _ => EXIT_CONFIG,
    }
}

pub struct Context<'a> {
    pub config: &'a RunConfig,
    /// Directory that relative paths in the config are resolved against.
    pub base: &'a Path,
    pub out: &'a Path,
}

impl Context<'_> {
    fn field(&self) -> Result<FieldSpec, Error> {
        self.config.field.to_spec(self.base)
    }

    fn radii(&self, grid: &GridSpec) -> Vec<f64> {
        self.config.radii.clone().unwrap_or_else(|| default_radii(grid))
    }
}

#[derive(Serialize)]
struct GaugeReportFile<'a> {
    halfwidth: f64,
    points: usize,
    curl_residual: f64,
    div_residual: f64,
    warnings: &'a [String],
    growth: &'a [GrowthRow],
}

pub fn cmd_gauge(ctx: &Context) -> Result<u8, Error> {
    let grid = ctx.config.grid()?;
    let b = sample_field(&ctx.field()?, &grid)?;
    let report = coulomb_gauge_with_radii(&b, &ctx.radii(&grid))?;
    write_toml(
        &ctx.out.join("report.toml"),
        &GaugeReportFile {
            halfwidth: grid.halfwidth(),
            points: grid.points(),
            curl_residual: report.curl_residual,
            div_residual: report.div_residual,
            warnings: &report.warnings,
            growth: &report.growth,
        },
    )?;
    write_csv(&ctx.out.join("growth.csv"), &report.growth)?;
    write_scalar(&ctx.out.join("field"), &b)?;
    write_scalar(&ctx.out.join("stream"), &report.w)?;
    write_vector(&ctx.out.join("potential"), &report.potential)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct BallEnergy {
    radius: f64,
    energy: f64,
}

#[derive(Serialize)]
struct MinimizeReportFile<'a> {
    initializer: String,
    converged: bool,
    termination: Termination,
    iterations: usize,
    energy: f64,
    kinetic: f64,
    potential: f64,
    gradient_norm: f64,
    el_residual: f64,
    max_modulus: f64,
    balls: Vec<BallEnergy>,
    profile: &'a [ProfileRow],
}

fn potential_for(ctx: &Context, spec: &FieldSpec, grid: &GridSpec) -> Result<VectorField, Error> {
    let kind = ctx.config.potential.unwrap_or(match spec {
        FieldSpec::Constant { .. } => PotentialKind::Symmetric,
        _ => PotentialKind::Coulomb,
    });
    match (kind, spec) {
        (PotentialKind::Zero, _) => Ok(VectorField::zeros(*grid)),
        (PotentialKind::Symmetric, FieldSpec::Constant { strength }) => Ok(symmetric_gauge(*strength, grid)),
        (PotentialKind::Symmetric, _) => Err(Error::InvalidParameter(
            "the symmetric gauge needs a constant field".into(),
        )),
        (PotentialKind::Coulomb, FieldSpec::Constant { strength }) if *strength != 0.0 => Err(
            Error::UnboundedFlux("a constant field has no Coulomb potential; use the symmetric gauge".into()),
        ),
        (PotentialKind::Coulomb, _) => Ok(coulomb_gauge_with_radii(&sample_field(spec, grid)?, &[])?.potential),
    }
}

pub fn cmd_minimize(ctx: &Context) -> Result<u8, Error> {
    let grid = ctx.config.grid()?;
    let spec = ctx.field()?;
    let a = potential_for(ctx, &spec, &grid)?;
    let init = ctx.config.initial;
    let run = minimize(&init.build(&grid)?, &a, &ctx.config.minimize)?;
    let balls = ctx
        .config
        .radii
        .iter()
        .flatten()
        .map(|&radius| {
            Ok(BallEnergy {
                radius,
                energy: energy(&run.state, &a, &Region::ball(radius))?.total,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    write_toml(
        &ctx.out.join("report.toml"),
        &MinimizeReportFile {
            initializer: init.describe(),
            converged: run.converged,
            termination: run.termination,
            iterations: run.iterations,
            energy: run.energy.total,
            kinetic: run.energy.kinetic,
            potential: run.energy.potential,
            gradient_norm: run.gradient_norm,
            el_residual: run.el_residual,
            max_modulus: run.max_modulus,
            balls,
            profile: &run.profile,
        },
    )?;
    write_csv::<HistoryRow>(&ctx.out.join("history.csv"), &run.history)?;
    write_csv(&ctx.out.join("profile.csv"), &run.profile)?;
    write_wave(&ctx.out.join("state"), &run.state)?;
    Ok(if run.converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

#[derive(Serialize)]
struct AuditRow {
    trial: usize,
    lhs: f64,
    rhs1: f64,
    rhs2: f64,
    margin: f64,
}

fn write_suite(path: &Path, rows: &[SuiteRow]) -> Result<(), Error> {
    let audit: Vec<AuditRow> = rows
        .iter()
        .map(|r| AuditRow {
            trial: r.trial,
            lhs: r.lhs,
            rhs1: r.rhs1,
            rhs2: r.rhs2,
            margin: r.margin,
        })
        .collect();
    write_csv(path, &audit)
}

#[derive(Serialize)]
struct VerifyReportFile {
    trials: usize,
    constant: f64,
    lemma_violations: usize,
    lemma_min_relative_margin: f64,
    dirichlet_violations: usize,
    dirichlet_min_relative_margin: f64,
    witness: Option<DirichletMargin>,
    witness_relative_margin: Option<f64>,
}

fn min_relative(rows: &[SuiteRow]) -> f64 {
    rows.iter()
        .map(|r| r.margin / r.lhs.max(f64::MIN_POSITIVE))
        .fold(f64::INFINITY, f64::min)
}

pub fn cmd_verify(ctx: &Context) -> Result<u8, Error> {
    let cfg = &ctx.config.suite;
    let lemma = lemma25_suite(cfg)?;
    write_suite(&ctx.out.join("lemma25.csv"), &lemma)?;
    let dirichlet = dirichlet_suite(cfg)?;
    write_suite(&ctx.out.join("dirichlet.csv"), &dirichlet)?;
    let witness = if cfg.field_strength > 0.0 {
        let grid = GridSpec::new(cfg.halfwidth, cfg.points)?;
        Some(landau_witness(&grid, cfg.field_strength, cfg.radius)?)
    } else {
        None
    };
    let lemma_violations = lemma.iter().filter(|r| r.violation).count();
    let dirichlet_violations = dirichlet.iter().filter(|r| r.violation).count();
    write_toml(
        &ctx.out.join("report.toml"),
        &VerifyReportFile {
            trials: cfg.trials,
            constant: magspace_core::CutoffSpec::CONSTANT,
            lemma_violations,
            lemma_min_relative_margin: min_relative(&lemma),
            dirichlet_violations,
            dirichlet_min_relative_margin: min_relative(&dirichlet),
            witness,
            witness_relative_margin: witness.map(|w| w.relative()),
        },
    )?;
    Ok(if lemma_violations + dirichlet_violations == 0 {
        EXIT_OK
    } else {
        EXIT_NUMERICAL
    })
}

pub fn run_experiment(config: &RunConfig, base: &Path) -> Result<ExperimentTable, Error> {
    let radii = config.radii.clone().unwrap_or_default();
    let opts = &config.experiment.options;
    match config.experiment.preset {
        Preset::ConstantGrowth => {
            let strength = match config.field.to_spec(base)? {
                FieldSpec::Constant { strength } => strength,
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "constant-growth needs a constant field, got {}",
                        other.describe()
                    )))
                }
            };
            constant_field_growth(strength, &radii, opts)
        }
        Preset::L1Energy => l1_field_energy(&config.field.to_spec(base)?, &radii, opts),
        Preset::FluxBound => flux_bound_table(&config.field.to_spec(base)?, &radii, opts),
    }
}

pub fn cmd_experiment(ctx: &Context) -> Result<u8, Error> {
    let table = run_experiment(ctx.config, ctx.base)?;
    let name = match ctx.config.experiment.preset {
        Preset::ConstantGrowth => "constant-growth",
        Preset::L1Energy => "l1-energy",
        Preset::FluxBound => "flux-bound",
    };
    write_table(ctx.out, name, &table)?;
    let all_converged = table.rows.iter().all(|r| r.converged != Some(false));
    Ok(if all_converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

pub fn write_echo(out: &Path, config: &RunConfig) -> std::io::Result<()> {
    fs::write(out.join("config.toml"), config.echo())
}

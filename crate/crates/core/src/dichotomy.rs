//! Energy-growth experiments: a constant field forces energy growing with the
//! area of the domain, while fields of finite flux admit bounded-energy states.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::energy;
use crate::error::{ensure_same_grid, Error, Result};
use crate::fields::{sample_field, total_flux, FieldSpec, Flux};
use crate::gauge::{coulomb_gauge_with_radii, extended_growth_profile, log_slope, symmetric_gauge, GrowthRow, TailOracle};
use crate::grid::{integrate, GridSpec, Region, ScalarField, VectorField, WaveField};
use crate::minimize::{el_residual, minimize, modulus_on_circle, Initializer, MinimizeOptions, MinimizeReport};
use crate::spectral::CutoffSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentOptions {
    /// Target grid spacing; the point count is rounded to the nearest odd value.
    pub spacing: f64,
    pub minimize: MinimizeOptions,
    pub seed: u64,
    /// Amplitude of the random perturbation of `ψ ≡ 1`.
    pub perturbation: f64,
    /// Core radius of the winding ansatz.
    pub core_radius: f64,
    /// Grid half-width for finite-flux fields; defaults to `min(1.25 max R, 20)`.
    pub field_halfwidth: Option<f64>,
    /// Only evaluate constant-modulus trial energies.
    pub skip_minimization: bool,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        ExperimentOptions {
            spacing: 0.25,
            minimize: MinimizeOptions::default(),
            seed: 0,
            perturbation: 0.1,
            core_radius: 1.0,
            field_halfwidth: None,
            skip_minimization: false,
        }
    }
}

/// `¼∫_{B(0,R/2)} B ≤ C′(E + 1)` and the intermediate cut-off estimate behind it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub radius: f64,
    /// `¼∫_{B(0,R/2)} B`.
    pub lhs: f64,
    /// Full-square energy of the state.
    pub energy: f64,
    pub constant: f64,
    /// `max(1, 3πC/4, ½(‖B‖∞ + 1))`.
    pub constant_prime: f64,
    /// `C′(E + 1)`.
    pub rhs: f64,
    pub pass: bool,
    /// `∫|(∇ − iA)ψ|²` over the square.
    pub kinetic: f64,
    /// `½∫_{B(0,R/2)} B|ψ|² − 3πC/4`.
    pub intermediate_rhs: f64,
    pub intermediate_pass: bool,
    pub el_residual: f64,
}

pub fn flux_energy_bound_check(psi: &WaveField, a: &VectorField, b: &ScalarField, radius: f64) -> Result<BoundCheck> {
    ensure_same_grid(psi.grid(), a.grid(), "flux bound (psi, A)")?;
    ensure_same_grid(psi.grid(), b.grid(), "flux bound (psi, B)")?;
    if radius.is_nan() || radius < 1.0 {
        return Err(Error::InvalidParameter(format!("the flux bound needs R >= 1, got {radius}")));
    }
    let half = Region::ball(0.5 * radius);
    half.check(psi.grid())?;
    if let Some((k, v)) = b.values().iter().enumerate().find(|(_, v)| **v < 0.0) {
        let [x, y] = b.grid().position(k);
        return Err(Error::Hypothesis(format!("B = {v:.3e} < 0 at ({x:.3}, {y:.3})")));
    }
    let c = CutoffSpec::CONSTANT;
    let linf = b.max_abs();
    let constant_prime = 1.0f64.max(0.75 * PI * c).max(0.5 * (linf + 1.0));
    let lhs = 0.25 * integrate(b, &half)?;
    let e = energy(psi, a, &Region::FullSquare)?;
    let rhs = constant_prime * (e.total + 1.0);
    let weighted = ScalarField::new(
        *b.grid(),
        psi.values()
            .iter()
            .zip(b.values())
            .map(|(z, v)| z.norm_sqr() * v)
            .collect(),
    )?;
    let intermediate_rhs = 0.5 * integrate(&weighted, &half)? - 0.75 * PI * c;
    let kinetic = 2.0 * e.kinetic;
    Ok(BoundCheck {
        radius,
        lhs,
        energy: e.total,
        constant: c,
        constant_prime,
        rhs,
        pass: lhs <= rhs * (1.0 + 1e-12),
        kinetic,
        intermediate_rhs,
        intermediate_pass: kinetic >= intermediate_rhs - 1e-12 * kinetic.abs().max(1.0),
        el_residual: el_residual(psi, a)?,
    })
}

/// One row of an experiment table. Quantities that do not apply to a preset are empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub radius: f64,
    /// Energy on `B(0,R)` of the lower of the minimized states.
    pub e_min: Option<f64>,
    pub e_min_over_r2: Option<f64>,
    /// Energy on `B(0,R)` of the run started near `ψ ≡ 1`.
    pub e_unit_start: Option<f64>,
    /// Energy on `B(0,R)` of the run started from the winding ansatz.
    pub e_winding_start: Option<f64>,
    pub winding: Option<i64>,
    pub initializer: Option<String>,
    /// `∫_{B(0,R/2)} B`.
    pub flux_half_ball: Option<f64>,
    pub bound_lhs: Option<f64>,
    pub bound_rhs: Option<f64>,
    pub bound_constant: Option<f64>,
    pub bound_pass: Option<bool>,
    pub intermediate_pass: Option<bool>,
    /// `∫_{B(0,R)} |A|²`.
    pub potential_l2_sq: f64,
    /// `½∫_{B(0,R)} |A|²`, the energy of `ψ ≡ 1`.
    pub trial_energy: Option<f64>,
    pub max_modulus: Option<f64>,
    /// Minimum of `|ψ|` on the circle `r = 0.8 L`.
    pub far_field_min_modulus: Option<f64>,
    pub el_residual: Option<f64>,
    pub converged: Option<bool>,
    pub iterations: Option<usize>,
}

impl ExperimentRow {
    fn empty(radius: f64, potential_l2_sq: f64) -> Self {
        ExperimentRow {
            radius,
            e_min: None,
            e_min_over_r2: None,
            e_unit_start: None,
            e_winding_start: None,
            winding: None,
            initializer: None,
            flux_half_ball: None,
            bound_lhs: None,
            bound_rhs: None,
            bound_constant: None,
            bound_pass: None,
            intermediate_pass: None,
            potential_l2_sq,
            trial_energy: None,
            max_modulus: None,
            far_field_min_modulus: None,
            el_residual: None,
            converged: None,
            iterations: None,
        }
    }

    fn record_state(&mut self, run: &MinimizeReport, label: String) {
        let grid = run.state.grid();
        self.initializer = Some(label);
        self.max_modulus = Some(run.max_modulus);
        self.far_field_min_modulus = Some(modulus_on_circle(&run.state, 0.8 * grid.halfwidth()).0);
        self.el_residual = Some(run.el_residual);
        self.converged = Some(run.converged);
        self.iterations = Some(run.iterations);
    }

    fn record_bound(&mut self, check: &BoundCheck) {
        self.bound_lhs = Some(check.lhs);
        self.bound_rhs = Some(check.rhs);
        self.bound_constant = Some(check.constant_prime);
        self.bound_pass = Some(check.pass);
        self.intermediate_pass = Some(check.intermediate_pass);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentMetadata {
    pub preset: String,
    pub field: String,
    pub halfwidth: f64,
    pub points: usize,
    pub radii: Vec<f64>,
    pub options: ExperimentOptions,
    pub initializers: Vec<String>,
    /// Fitted rates and other table-level numbers.
    pub summary: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentTable {
    pub rows: Vec<ExperimentRow>,
    pub metadata: ExperimentMetadata,
}

impl ExperimentTable {
    /// Two-column curves for plotting, named after their columns.
    pub fn curves(&self) -> Vec<(&'static str, Vec<(f64, f64)>)> {
        let pick = |f: fn(&ExperimentRow) -> Option<f64>| -> Vec<(f64, f64)> {
            self.rows
                .iter()
                .filter_map(|r| f(r).map(|v| (r.radius, v)))
                .collect()
        };
        let curves = vec![
            ("e_min", pick(|r| r.e_min)),
            ("e_min_over_r2", pick(|r| r.e_min_over_r2)),
            ("potential_l2_sq", pick(|r| Some(r.potential_l2_sq))),
            ("trial_energy", pick(|r| r.trial_energy)),
            ("far_field_min_modulus", pick(|r| r.far_field_min_modulus)),
        ];
        curves.into_iter().filter(|(_, c)| !c.is_empty()).collect()
    }

    pub fn row(&self, radius: f64) -> Option<&ExperimentRow> {
        self.rows.iter().find(|r| r.radius == radius)
    }
}

fn check_radii(radii: &[f64]) -> Result<f64> {
    if radii.is_empty() {
        return Err(Error::InvalidParameter("empty radius list".into()));
    }
    if radii.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(Error::InvalidParameter("radii must be finite and non-negative".into()));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("radii must be strictly increasing".into()));
    }
    Ok(*radii.last().expect("non-empty"))
}

fn validate(opts: &ExperimentOptions) -> Result<()> {
    opts.minimize.validate()?;
    if !(opts.spacing.is_finite() && opts.spacing > 0.0) {
        return Err(Error::InvalidParameter(format!("spacing {}", opts.spacing)));
    }
    if !(opts.core_radius.is_finite() && opts.core_radius > 0.0) {
        return Err(Error::InvalidParameter(format!("core radius {}", opts.core_radius)));
    }
    if !opts.perturbation.is_finite() {
        return Err(Error::InvalidParameter("perturbation amplitude".into()));
    }
    Ok(())
}

/// Winding number closest to `flux / 2π`.
pub fn quantized_winding(flux: f64) -> i64 {
    (flux / (2.0 * PI)).round() as i64
}

fn ball_energy(run: &MinimizeReport, a: &VectorField, radius: f64) -> Result<f64> {
    Ok(energy(&run.state, a, &Region::ball(radius))?.total)
}

/// Minimal ball energies in a constant field `B₀` on one grid of half-width
/// `1.25 max R`, from a random perturbation of `ψ ≡ 1` shared by all rows and a
/// winding ansatz with `n = round(B₀R²/2)` per row; the lower full-square energy wins.
pub fn constant_field_growth(strength: f64, radii: &[f64], opts: &ExperimentOptions) -> Result<ExperimentTable> {
    validate(opts)?;
    if !strength.is_finite() {
        return Err(Error::InvalidParameter("field strength".into()));
    }
    let max_r = check_radii(radii)?;
    if max_r == 0.0 {
        return Err(Error::InvalidParameter("at least one radius must be positive".into()));
    }
    let grid = GridSpec::with_spacing(1.25 * max_r, opts.spacing)?;
    let a = symmetric_gauge(strength, &grid);
    let b = ScalarField::constant(grid, strength);
    let random_init = Initializer::RandomPerturbation {
        amplitude: opts.perturbation,
        seed: opts.seed,
    };
    let windings: Vec<Initializer> = radii
        .iter()
        .map(|&r| Initializer::Winding {
            winding: quantized_winding(strength * PI * r * r),
            core_radius: opts.core_radius,
        })
        .collect();

    let (random_run, winding_runs) = rayon::join(
        || minimize(&random_init.build(&grid)?, &a, &opts.minimize),
        || {
            radii
                .par_iter()
                .zip(&windings)
                .map(|(&r, init)| {
                    if r == 0.0 {
                        return Ok(None);
                    }
                    minimize(&init.build(&grid)?, &a, &opts.minimize).map(Some)
                })
                .collect::<Result<Vec<_>>>()
        },
    );
    let random_run = random_run?;
    let winding_runs = winding_runs?;

    let mut rows = Vec::with_capacity(radii.len());
    for ((&r, init), wrun) in radii.iter().zip(&windings).zip(&winding_runs) {
        let potential = if r > 0.0 {
            integrate(&a.magnitude_sq(), &Region::ball(r))?
        } else {
            0.0
        };
        let mut row = ExperimentRow::empty(r, potential);
        let Some(wrun) = wrun else {
            row.e_min = Some(0.0);
            row.converged = Some(true);
            rows.push(row);
            continue;
        };
        let e_unit = ball_energy(&random_run, &a, r)?;
        let e_wind = ball_energy(wrun, &a, r)?;
        let (best, label, e) = if wrun.energy.total < random_run.energy.total {
            (wrun, init.describe(), e_wind)
        } else {
            (&random_run, random_init.describe(), e_unit)
        };
        row.e_min = Some(e);
        row.e_min_over_r2 = Some(e / (r * r));
        row.e_unit_start = Some(e_unit);
        row.e_winding_start = Some(e_wind);
        if let Initializer::Winding { winding, .. } = init {
            row.winding = Some(*winding);
        }
        row.flux_half_ball = Some(integrate(&b, &Region::ball(0.5 * r))?);
        row.trial_energy = Some(0.5 * potential);
        row.record_state(best, label);
        if r >= 1.0 && strength >= 0.0 {
            row.record_bound(&flux_energy_bound_check(&best.state, &a, &b, r)?);
        }
        rows.push(row);
    }

    let mut initializers = vec![random_init.describe()];
    initializers.extend(windings.iter().map(Initializer::describe));
    Ok(ExperimentTable {
        rows,
        metadata: ExperimentMetadata {
            preset: "constant-growth".into(),
            field: FieldSpec::Constant { strength }.describe(),
            halfwidth: grid.halfwidth(),
            points: grid.points(),
            radii: radii.to_vec(),
            options: *opts,
            initializers,
            summary: BTreeMap::new(),
        },
    })
}

/// Radius range of the logarithmic growth fit.
pub const SLOPE_RANGE: (f64, f64) = (20.0, 80.0);

/// Constant-modulus trial energies and minimized energies for a field of finite flux.
///
/// The Coulomb potential is computed on one grid; beyond its inscribed ball the
/// growth profile continues with the closed-form potential of the field. Rows
/// whose radius exceeds the grid carry the trial quantities only.
pub fn l1_field_energy(spec: &FieldSpec, radii: &[f64], opts: &ExperimentOptions) -> Result<ExperimentTable> {
    validate(opts)?;
    spec.validate()?;
    let flux = match total_flux(spec) {
        Flux::Finite(f) => f,
        Flux::Unbounded => return Err(Error::UnboundedFlux(spec.describe())),
    };
    let max_r = check_radii(radii)?;
    if radii[0] == 0.0 {
        return Err(Error::InvalidParameter("domain sizes must be positive".into()));
    }
    let halfwidth = match (opts.field_halfwidth, spec) {
        (Some(l), _) => l,
        (None, FieldSpec::Custom(f)) => f.grid().halfwidth(),
        (None, _) => (1.25 * max_r).min(20.0),
    };
    let grid = match spec {
        FieldSpec::Custom(f) => *f.grid(),
        _ => GridSpec::with_spacing(halfwidth, opts.spacing)?,
    };
    let b = sample_field(spec, &grid)?;
    let gauge = coulomb_gauge_with_radii(&b, &[])?;
    let a = &gauge.potential;
    let grid_radius = grid.halfwidth();

    let planar = |x: [f64; 2]| spec.analytic_potential(x).expect("checked below");
    let growth: Vec<Option<GrowthRow>> = if spec.radial_pieces().is_some() {
        let oracle = TailOracle::Planar(&planar);
        extended_growth_profile(a, grid_radius, &oracle, radii)?
            .into_iter()
            .map(Some)
            .collect()
    } else {
        radii
            .iter()
            .map(|&r| {
                (r <= grid_radius)
                    .then(|| extended_growth_profile(a, grid_radius, &TailOracle::Radial(&|_| 0.0), &[r]))
                    .transpose()
                    .map(|v| v.map(|v| v[0]))
            })
            .collect::<Result<_>>()?
    };

    let n = quantized_winding(flux);
    let inits = [
        Initializer::Constant,
        Initializer::Winding {
            winding: n,
            core_radius: opts.core_radius,
        },
    ];
    let runs: Vec<MinimizeReport> = if opts.skip_minimization {
        Vec::new()
    } else {
        inits
            .par_iter()
            .map(|init| minimize(&init.build(&grid)?, a, &opts.minimize))
            .collect::<Result<_>>()?
    };

    let mut rows = Vec::with_capacity(radii.len());
    for (&r, g) in radii.iter().zip(&growth) {
        let Some(g) = g else {
            return Err(Error::RegionOutOfRange(format!(
                "radius {r} exceeds the grid and the field has no closed-form potential"
            )));
        };
        let mut row = ExperimentRow::empty(r, g.integral);
        row.trial_energy = Some(0.5 * g.integral);
        row.winding = Some(n);
        if r <= grid_radius && r > 0.0 {
            row.flux_half_ball = Some(integrate(&b, &Region::ball(0.5 * r))?);
            if let [unit, wind] = runs.as_slice() {
                let e_unit = ball_energy(unit, a, r)?;
                let e_wind = ball_energy(wind, a, r)?;
                let (best, label, e) = if wind.energy.total < unit.energy.total {
                    (wind, inits[1].describe(), e_wind)
                } else {
                    (unit, inits[0].describe(), e_unit)
                };
                row.e_min = Some(e);
                row.e_min_over_r2 = Some(e / (r * r));
                row.e_unit_start = Some(e_unit);
                row.e_winding_start = Some(e_wind);
                row.record_state(best, label);
                if r >= 1.0 && b.values().iter().all(|&v| v >= 0.0) {
                    row.record_bound(&flux_energy_bound_check(&best.state, a, &b, r)?);
                }
            }
        }
        rows.push(row);
    }

    let mut summary = BTreeMap::new();
    summary.insert("flux".to_string(), flux);
    summary.insert("curl_residual".to_string(), gauge.curl_residual);
    summary.insert("div_residual".to_string(), gauge.div_residual);
    let fit: Vec<GrowthRow> = rows
        .iter()
        .filter(|r| r.radius >= SLOPE_RANGE.0 && r.radius <= SLOPE_RANGE.1)
        .map(|r| GrowthRow {
            radius: r.radius,
            integral: r.potential_l2_sq,
        })
        .collect();
    if fit.len() >= 2 {
        let slope = log_slope(&fit);
        summary.insert("potential_l2_sq_log_slope".to_string(), slope);
        summary.insert("trial_energy_log_slope".to_string(), 0.5 * slope);
    }
    if let (Some(first), Some(last)) = (rows.first(), rows.last()) {
        if let (Some(e0), Some(e1)) = (first.trial_energy, last.trial_energy) {
            if e0 != 0.0 {
                summary.insert("trial_energy_relative_change".to_string(), (e1 - e0) / e0);
            }
        }
    }
    for (init, run) in inits.iter().zip(&runs) {
        let key = match init {
            Initializer::Constant => "unit_start",
            _ => "winding_start",
        };
        summary.insert(format!("{key}_energy"), run.energy.total);
        summary.insert(format!("{key}_far_field_min_modulus"), modulus_on_circle(&run.state, 0.8 * grid_radius).0);
        summary.insert(format!("{key}_max_modulus"), run.max_modulus);
        summary.insert(format!("{key}_converged"), if run.converged { 1.0 } else { 0.0 });
    }

    Ok(ExperimentTable {
        rows,
        metadata: ExperimentMetadata {
            preset: "l1-energy".into(),
            field: spec.describe(),
            halfwidth: grid.halfwidth(),
            points: grid.points(),
            radii: radii.to_vec(),
            options: *opts,
            initializers: inits.iter().map(Initializer::describe).collect(),
            summary,
        },
    })
}

/// Flux bound on minimizers of a non-negative field over several radii.
pub fn flux_bound_table(spec: &FieldSpec, radii: &[f64], opts: &ExperimentOptions) -> Result<ExperimentTable> {
    validate(opts)?;
    spec.validate()?;
    let max_r = check_radii(radii)?;
    let grid = match spec {
        FieldSpec::Custom(f) => *f.grid(),
        _ => GridSpec::with_spacing(opts.field_halfwidth.unwrap_or(max_r.max(2.0)), opts.spacing)?,
    };
    let b = sample_field(spec, &grid)?;
    let a = match spec {
        FieldSpec::Constant { strength } => symmetric_gauge(*strength, &grid),
        _ => coulomb_gauge_with_radii(&b, &[])?.potential,
    };
    let init = Initializer::RandomPerturbation {
        amplitude: opts.perturbation,
        seed: opts.seed,
    };
    let run = minimize(&init.build(&grid)?, &a, &opts.minimize)?;
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        let potential = if r > 0.0 {
            integrate(&a.magnitude_sq(), &Region::ball(r))?
        } else {
            0.0
        };
        let mut row = ExperimentRow::empty(r, potential);
        if r > 0.0 {
            let e = ball_energy(&run, &a, r)?;
            row.e_min = Some(e);
            row.e_min_over_r2 = Some(e / (r * r));
            row.flux_half_ball = Some(integrate(&b, &Region::ball(0.5 * r))?);
        }
        row.record_state(&run, init.describe());
        if r >= 1.0 {
            row.record_bound(&flux_energy_bound_check(&run.state, &a, &b, r)?);
        }
        rows.push(row);
    }
    Ok(ExperimentTable {
        rows,
        metadata: ExperimentMetadata {
            preset: "flux-bound".into(),
            field: spec.describe(),
            halfwidth: grid.halfwidth(),
            points: grid.points(),
            radii: radii.to_vec(),
            options: *opts,
            initializers: vec![init.describe()],
            summary: BTreeMap::new(),
        },
    })
}

/// `ψ ≡ 1` on `grid`.
pub fn unit_state(grid: &GridSpec) -> WaveField {
    WaveField::constant(*grid, Complex64::new(1.0, 0.0))
}

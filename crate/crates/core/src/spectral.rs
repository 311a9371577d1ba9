//! The cut-off lower bound for the magnetic Dirichlet energy on balls and its
//! ingredient inequality, with the explicit constant of a cosine taper.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::EnergyFunctional;
use crate::error::{ensure_same_grid, Error, Result};
use crate::gauge::symmetric_gauge;
use crate::grid::{integrate, GridSpec, Region, ScalarField, VectorField, WaveField};

/// `χ(t) = 1` on `[0, ½]`, `cos²(π(t − ½))` on `(½, 1)`, `0` beyond.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec {
    pub radius: f64,
}

impl CutoffSpec {
    /// `‖χ′‖∞`.
    pub const DERIVATIVE_BOUND: f64 = PI;
    /// `C = ‖χ′‖²∞`.
    pub const CONSTANT: f64 = PI * PI;

    pub fn profile(t: f64) -> f64 {
        if t <= 0.5 {
            1.0
        } else if t >= 1.0 {
            0.0
        } else {
            let c = (PI * (t - 0.5)).cos();
            c * c
        }
    }

    pub fn value(&self, x: [f64; 2]) -> f64 {
        Self::profile(x[0].hypot(x[1]) / self.radius)
    }
}

/// Nodal samples of `χ(|x| / R)`.
pub fn make_cutoff(radius: f64, grid: &GridSpec) -> Result<ScalarField> {
    if !(radius > 0.0 && radius <= grid.halfwidth()) {
        return Err(Error::InvalidParameter(format!(
            "cut-off radius {radius} outside (0, {}]",
            grid.halfwidth()
        )));
    }
    let c = CutoffSpec { radius };
    Ok(ScalarField::from_fn(*grid, |x| c.value(x)))
}

/// Both sides of the cut-off bound
/// `∫_{B_R} |(∇ − iA)ψ|² ≥ ½ ∫_{B_{R/2}} B|ψ|² − (C/R²) ∫_{R/2<|x|<R} |ψ|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub radius: f64,
    pub constant: f64,
    pub lhs: f64,
    pub rhs1: f64,
    pub rhs2: f64,
    /// `lhs − rhs1 + rhs2`.
    pub margin: f64,
}

fn check_nonnegative_on_ball(b: &ScalarField, radius: f64) -> Result<()> {
    let grid = b.grid();
    for (k, &v) in b.values().iter().enumerate() {
        let [x, y] = grid.position(k);
        if x.hypot(y) <= radius && v < 0.0 {
            return Err(Error::Hypothesis(format!(
                "B = {v:.3e} < 0 at ({x:.3}, {y:.3}) inside the ball of radius {radius}"
            )));
        }
    }
    Ok(())
}

fn weighted_modulus_sq(psi: &WaveField, weight: Option<&ScalarField>, region: &Region) -> Result<f64> {
    let grid = *psi.grid();
    let values = psi
        .values()
        .iter()
        .enumerate()
        .map(|(k, z)| z.norm_sqr() * weight.map_or(1.0, |w| w.values()[k]))
        .collect();
    integrate(&ScalarField::new(grid, values)?, region)
}

pub fn lemma25_margin(psi: &WaveField, a: &VectorField, b: &ScalarField, radius: f64) -> Result<SpectralReport> {
    ensure_same_grid(psi.grid(), a.grid(), "spectral bound (psi, A)")?;
    ensure_same_grid(psi.grid(), b.grid(), "spectral bound (psi, B)")?;
    let ball = Region::ball(radius);
    ball.check(psi.grid())?;
    check_nonnegative_on_ball(b, radius)?;
    let lhs = 2.0 * EnergyFunctional::new(a, &ball)?.evaluate(psi.values(), None).kinetic;
    let rhs1 = 0.5 * weighted_modulus_sq(psi, Some(b), &Region::ball(0.5 * radius))?;
    let c = CutoffSpec::CONSTANT;
    let rhs2 = c / (radius * radius) * weighted_modulus_sq(psi, None, &Region::annulus(0.5 * radius, radius))?;
    Ok(SpectralReport {
        radius,
        constant: c,
        lhs,
        rhs1,
        rhs2,
        margin: lhs - rhs1 + rhs2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// `∫|(∇ − iA)φ|² ≥ ∫ B|φ|²`, for `B ≥ 0`.
    Plus,
    /// `∫|(∇ − iA)φ|² ≥ −∫ B|φ|²`, for `B ≤ 0`.
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirichletMargin {
    /// `∫_{B_R} |(∇ − iA)φ|²`.
    pub kinetic: f64,
    /// `∫_{B_R} B|φ|²`.
    pub field_term: f64,
    /// `kinetic ∓ field_term`.
    pub margin: f64,
}

impl DirichletMargin {
    /// Margin relative to `|∫ B|φ|²|`; infinite when that vanishes and the margin does not.
    pub fn relative(&self) -> f64 {
        if self.field_term == 0.0 {
            if self.margin == 0.0 {
                0.0
            } else {
                f64::INFINITY.copysign(self.margin)
            }
        } else {
            self.margin / self.field_term.abs()
        }
    }
}

pub const SUPPORT_TOLERANCE: f64 = 1e-8;

/// `∫_{B_R}|(∇ − iA)φ|² ∓ ∫_{B_R} B|φ|²` for `φ` vanishing outside `B(0, R − 2a)`.
pub fn dirichlet_bound_margin(
    phi: &WaveField,
    a: &VectorField,
    b: &ScalarField,
    radius: f64,
    branch: Branch,
) -> Result<DirichletMargin> {
    ensure_same_grid(phi.grid(), a.grid(), "Dirichlet bound (phi, A)")?;
    ensure_same_grid(phi.grid(), b.grid(), "Dirichlet bound (phi, B)")?;
    let grid = *phi.grid();
    let ball = Region::ball(radius);
    ball.check(&grid)?;
    let support = radius - 2.0 * grid.spacing();
    let bound = SUPPORT_TOLERANCE * phi.max_modulus();
    for (k, z) in phi.values().iter().enumerate() {
        let [x, y] = grid.position(k);
        if x.hypot(y) > support && z.norm() > bound {
            return Err(Error::InvalidParameter(format!(
                "|phi| = {:.3e} at ({x:.3}, {y:.3}), outside the support radius {support:.4}",
                z.norm()
            )));
        }
    }
    let kinetic = 2.0 * EnergyFunctional::new(a, &ball)?.evaluate(phi.values(), None).kinetic;
    let field_term = weighted_modulus_sq(phi, Some(b), &ball)?;
    let margin = match branch {
        Branch::Plus => kinetic - field_term,
        Branch::Minus => kinetic + field_term,
    };
    Ok(DirichletMargin {
        kinetic,
        field_term,
        margin,
    })
}

/// Sum of `modes` random Fourier modes `c e^{iπ k·x / L}` with integer `|k| ≤ n/8`
/// and standard complex normal `c`, scaled by `1/√modes`.
pub fn band_limited_state(grid: &GridSpec, rng: &mut impl Rng, modes: usize) -> WaveField {
    let kmax = (grid.points() / 8).max(1) as i64;
    let mut terms = Vec::with_capacity(modes);
    while terms.len() < modes {
        let kx = rng.random_range(-kmax..=kmax);
        let ky = rng.random_range(-kmax..=kmax);
        if kx * kx + ky * ky > kmax * kmax {
            continue;
        }
        let c = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        terms.push((kx as f64, ky as f64, c));
    }
    let scale = 1.0 / (modes as f64).sqrt();
    let w = PI / grid.halfwidth();
    WaveField::from_fn(*grid, |[x, y]| {
        terms
            .iter()
            .map(|&(kx, ky, c)| c * Complex64::from_polar(1.0, w * (kx * x + ky * y)))
            .sum::<Complex64>()
            * scale
    })
}

pub const DEFAULT_MODES: usize = 32;

/// Deterministic per-trial generator, independent of scheduling.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (trial as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub halfwidth: f64,
    pub points: usize,
    /// Constant field strength `B₀`; the potential is the symmetric gauge.
    pub field_strength: f64,
    pub radius: f64,
    pub trials: usize,
    pub seed: u64,
    pub modes: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            halfwidth: 12.0,
            points: 129,
            field_strength: 1.0,
            radius: 8.0,
            trials: 100,
            seed: 0,
            modes: DEFAULT_MODES,
        }
    }
}

impl SuiteConfig {
    fn setup(&self) -> Result<(GridSpec, VectorField, ScalarField)> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("the suite has no trials".into()));
        }
        if self.modes == 0 {
            return Err(Error::InvalidParameter("band-limited states need at least one mode".into()));
        }
        if !self.field_strength.is_finite() {
            return Err(Error::InvalidParameter("field strength".into()));
        }
        let grid = GridSpec::new(self.halfwidth, self.points)?;
        Region::ball(self.radius).check(&grid)?;
        Ok((
            grid,
            symmetric_gauge(self.field_strength, &grid),
            ScalarField::constant(grid, self.field_strength),
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteRow {
    pub trial: usize,
    pub lhs: f64,
    pub rhs1: f64,
    pub rhs2: f64,
    pub margin: f64,
    pub violation: bool,
}

/// Relative slack allowed before a negative cut-off margin counts as a violation.
pub const LEMMA_TOLERANCE: f64 = 1e-10;
/// Relative slack for the Dirichlet bound.
pub const DIRICHLET_TOLERANCE: f64 = 1e-8;

/// The cut-off bound on random band-limited states.
pub fn lemma25_suite(cfg: &SuiteConfig) -> Result<Vec<SuiteRow>> {
    let (grid, a, b) = cfg.setup()?;
    (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let psi = band_limited_state(&grid, &mut trial_rng(cfg.seed, trial), cfg.modes);
            let r = lemma25_margin(&psi, &a, &b, cfg.radius)?;
            Ok(SuiteRow {
                trial,
                lhs: r.lhs,
                rhs1: r.rhs1,
                rhs2: r.rhs2,
                margin: r.margin,
                violation: r.margin < -LEMMA_TOLERANCE * (r.lhs + 1.0),
            })
        })
        .collect()
}

/// The Dirichlet bound on random band-limited states tapered to vanish three
/// spacings inside the ball. The branch follows the sign of `B₀`.
///
/// Rows reuse the suite layout: `lhs` is the kinetic term, `rhs1` the field
/// term, `rhs2` is zero.
pub fn dirichlet_suite(cfg: &SuiteConfig) -> Result<Vec<SuiteRow>> {
    let (grid, a, b) = cfg.setup()?;
    let taper = make_cutoff(cfg.radius - 3.0 * grid.spacing(), &grid)?;
    let branch = if cfg.field_strength >= 0.0 {
        Branch::Plus
    } else {
        Branch::Minus
    };
    (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let raw = band_limited_state(&grid, &mut trial_rng(cfg.seed, trial), cfg.modes);
            let phi = WaveField::new(
                grid,
                raw.values()
                    .iter()
                    .zip(taper.values())
                    .map(|(z, &t)| z * t)
                    .collect(),
            )?;
            let m = dirichlet_bound_margin(&phi, &a, &b, cfg.radius, branch)?;
            Ok(SuiteRow {
                trial,
                lhs: m.kinetic,
                rhs1: m.field_term,
                rhs2: 0.0,
                margin: m.margin,
                violation: m.margin < -DIRICHLET_TOLERANCE * m.kinetic.max(m.field_term.abs()),
            })
        })
        .collect()
}

/// Truncated lowest Landau level `e^{−B₀|x|²/4} χ(|x| / ρ)` in the symmetric gauge,
/// `ρ = min(0.9R, R − 2a)` so the support condition holds on coarse grids.
pub fn landau_witness(grid: &GridSpec, field_strength: f64, radius: f64) -> Result<DirichletMargin> {
    if field_strength.is_nan() || field_strength <= 0.0 {
        return Err(Error::InvalidParameter("the witness needs a positive field".into()));
    }
    let taper = CutoffSpec {
        radius: (0.9 * radius).min(radius - 2.0 * grid.spacing()),
    };
    let phi = WaveField::from_fn(*grid, |x| {
        let r2 = x[0] * x[0] + x[1] * x[1];
        Complex64::new((-0.25 * field_strength * r2).exp() * taper.value(x), 0.0)
    });
    let a = symmetric_gauge(field_strength, grid);
    let b = ScalarField::constant(*grid, field_strength);
    dirichlet_bound_margin(&phi, &a, &b, radius, Branch::Plus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn profile_values() {
        assert_eq!(CutoffSpec::profile(0.0), 1.0);
        assert_eq!(CutoffSpec::profile(0.5), 1.0);
        assert_relative_eq!(CutoffSpec::profile(0.75), 0.5, epsilon = 1e-15);
        assert_eq!(CutoffSpec::profile(1.0), 0.0);
        assert_eq!(CutoffSpec::profile(3.0), 0.0);
        // derivative −π sin(2π(t − ½)) peaks at t = ¾ with magnitude π
        let h = 1e-6;
        let d = (CutoffSpec::profile(0.75 + h) - CutoffSpec::profile(0.75 - h)) / (2.0 * h);
        assert_relative_eq!(d.abs(), CutoffSpec::DERIVATIVE_BOUND, max_relative = 1e-8);
        for k in 0..=1000 {
            let t = k as f64 / 800.0;
            let v = CutoffSpec::profile(t);
            assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn cutoff_samples() {
        let g = GridSpec::new(4.0, 33).unwrap(); // spacing 0.25
        let c = make_cutoff(4.0, &g).unwrap();
        assert_eq!(c.at(20, 16), 1.0); // |x| = 1
        assert_eq!(c.at(32, 16), 0.0); // |x| = 4
        assert_relative_eq!(c.at(28, 16), 0.5, epsilon = 1e-15); // |x| = 3
        assert!(make_cutoff(5.0, &g).is_err());
    }

    fn constant_setup(b0: f64) -> (GridSpec, VectorField, ScalarField) {
        let g = GridSpec::new(6.0, 65).unwrap();
        (g, symmetric_gauge(b0, &g), ScalarField::constant(g, b0))
    }

    #[test]
    fn trivial_margins() {
        let g = GridSpec::new(4.0, 33).unwrap();
        let zero_a = VectorField::zeros(g);
        let zero_b = ScalarField::zeros(g);
        let psi = WaveField::from_fn(g, |[x, y]| Complex64::new(x.sin(), y));
        let r = lemma25_margin(&psi, &zero_a, &zero_b, 3.0).unwrap();
        assert_eq!(r.rhs1, 0.0);
        assert!(r.margin >= r.lhs && r.lhs > 0.0);
        let zero = WaveField::constant(g, Complex64::new(0.0, 0.0));
        let r = lemma25_margin(&zero, &zero_a, &zero_b, 3.0).unwrap();
        assert_eq!(r.margin, 0.0);
        let d = dirichlet_bound_margin(&zero, &zero_a, &zero_b, 3.0, Branch::Plus).unwrap();
        assert_eq!(d.margin, 0.0);
        assert_eq!(d.relative(), 0.0);
    }

    #[test]
    fn negative_field_is_a_hypothesis_violation() {
        let (g, a, _) = constant_setup(1.0);
        let b = ScalarField::from_fn(g, |[x, _]| if x > 1.0 { -0.1 } else { 1.0 });
        let psi = WaveField::constant(g, Complex64::new(1.0, 0.0));
        assert!(matches!(lemma25_margin(&psi, &a, &b, 4.0), Err(Error::Hypothesis(_))));
        // negative only outside the ball is fine
        assert!(lemma25_margin(&psi, &a, &b, 0.9).is_ok());
    }

    #[test]
    fn unit_state_in_constant_field() {
        // ψ ≡ 1, A = symmetric gauge: lhs ≈ ∫_{B_R} |A|² = π B₀² R⁴ / 8.
        let (g, a, b) = constant_setup(1.0);
        let psi = WaveField::constant(g, Complex64::new(1.0, 0.0));
        let r = lemma25_margin(&psi, &a, &b, 4.0).unwrap();
        assert_relative_eq!(r.lhs, PI * 256.0 / 8.0, max_relative = 2e-2);
        assert_relative_eq!(r.rhs1, 0.5 * PI * 4.0, max_relative = 1e-3);
        assert_relative_eq!(r.rhs2, PI * PI / 16.0 * PI * 12.0, max_relative = 1e-3);
        assert!(r.margin > 0.0);
    }

    #[test]
    fn support_violation_rejected() {
        let (g, a, b) = constant_setup(1.0);
        let psi = WaveField::constant(g, Complex64::new(1.0, 0.0));
        assert!(dirichlet_bound_margin(&psi, &a, &b, 4.0, Branch::Plus).is_err());
    }

    #[test]
    fn branches_differ_by_twice_the_field_term() {
        let (g, a, b) = constant_setup(-0.7);
        let taper = CutoffSpec { radius: 3.0 };
        let phi = WaveField::from_fn(g, |x| Complex64::new(1.0, 0.2 * x[0]) * taper.value(x));
        let plus = dirichlet_bound_margin(&phi, &a, &b, 4.0, Branch::Plus).unwrap();
        let minus = dirichlet_bound_margin(&phi, &a, &b, 4.0, Branch::Minus).unwrap();
        assert!(plus.field_term < 0.0);
        assert_relative_eq!(plus.margin - minus.margin, -2.0 * plus.field_term, max_relative = 1e-12);
        assert!(minus.margin >= 0.0);
    }

    #[test]
    fn band_limited_states_are_reproducible() {
        let g = GridSpec::new(4.0, 33).unwrap();
        let s1 = band_limited_state(&g, &mut trial_rng(5, 3), 8);
        let s2 = band_limited_state(&g, &mut trial_rng(5, 3), 8);
        let s3 = band_limited_state(&g, &mut trial_rng(5, 4), 8);
        assert_eq!(s1, s2);
        assert_ne!(s1, s3);
    }

    #[test]
    fn small_suites_have_no_violations() {
        let cfg = SuiteConfig {
            halfwidth: 6.0,
            points: 65,
            radius: 4.0,
            trials: 8,
            ..Default::default()
        };
        let rows = lemma25_suite(&cfg).unwrap();
        assert_eq!(rows.len(), 8);
        assert!(rows.iter().enumerate().all(|(k, r)| r.trial == k && !r.violation));
        let rows = dirichlet_suite(&cfg).unwrap();
        assert!(rows.iter().all(|r| !r.violation));
        let neg = SuiteConfig {
            field_strength: -1.0,
            ..cfg
        };
        assert!(dirichlet_suite(&neg).unwrap().iter().all(|r| !r.violation));
        assert!(lemma25_suite(&neg).is_err());
        let empty = SuiteConfig { trials: 0, ..cfg };
        assert!(lemma25_suite(&empty).is_err());
    }

    #[test]
    fn suites_do_not_depend_on_thread_count() {
        let cfg = SuiteConfig {
            halfwidth: 6.0,
            points: 65,
            radius: 4.0,
            trials: 6,
            seed: 17,
            ..Default::default()
        };
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let serial = pool.install(|| lemma25_suite(&cfg)).unwrap();
        let parallel = lemma25_suite(&cfg).unwrap();
        assert_eq!(serial, parallel);
    }
}

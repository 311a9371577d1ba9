//! Monotone descent on the discrete energy and the diagnostics expected of its
//! minimizers: modulus bound, Euler–Lagrange residual, far-field modulus,
//! winding numbers and phase extraction.

use std::collections::VecDeque;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::energy::{energy_gradient, EnergyFunctional, EnergyReport};
use crate::error::{ensure_same_grid, Error, Result};
use crate::grid::{GridSpec, Region, ScalarField, VectorField, WaveField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MinimizeOptions {
    pub max_iterations: usize,
    /// Stop when the energy dropped by less than this fraction over the last
    /// [`ENERGY_WINDOW`] accepted steps.
    pub energy_tolerance: f64,
    /// Stop when `max |∂E/∂ψ|` falls below this.
    pub gradient_tolerance: f64,
    /// Clamp `|ψ| ≤ 1` after every step.
    pub project_modulus: bool,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            max_iterations: 200_000,
            energy_tolerance: 1e-10,
            gradient_tolerance: 1e-6,
            project_modulus: false,
        }
    }
}

impl MinimizeOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations < 1 {
            return Err(Error::InvalidParameter("max_iterations must be >= 1".into()));
        }
        for (v, what) in [
            (self.energy_tolerance, "energy_tolerance"),
            (self.gradient_tolerance, "gradient_tolerance"),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{what} must be positive")));
            }
        }
        Ok(())
    }
}

pub const ENERGY_WINDOW: usize = 10;
const ARMIJO: f64 = 1e-4;
const INITIAL_STEP: f64 = 0.1;
const MIN_STEP: f64 = 1e-14;
const MAX_STEP: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    GradientTolerance,
    EnergyTolerance,
    IterationCap,
    /// No step length down to the minimum produced a decrease.
    Stalled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoryRow {
    pub iteration: usize,
    pub energy: f64,
    pub gradient_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub radius: f64,
    pub min: f64,
    pub mean: f64,
}

#[derive(Debug, Clone)]
pub struct MinimizeReport {
    pub state: WaveField,
    pub history: Vec<HistoryRow>,
    /// Full-square energy of the final state.
    pub energy: EnergyReport,
    pub gradient_norm: f64,
    pub el_residual: f64,
    pub max_modulus: f64,
    pub profile: Vec<ProfileRow>,
    pub converged: bool,
    pub termination: Termination,
    pub iterations: usize,
}

impl MinimizeReport {
    /// Minimum of `|ψ|` on the profile circle closest to `radius`.
    pub fn profile_min_at(&self, radius: f64) -> Option<f64> {
        self.profile
            .iter()
            .min_by(|a, b| {
                (a.radius - radius)
                    .abs()
                    .total_cmp(&(b.radius - radius).abs())
            })
            .map(|r| r.min)
    }
}

/// Barzilai–Borwein gradient descent with Armijo backtracking.
///
/// Every accepted step strictly lowers the energy. BB1 and BB2 step lengths
/// alternate; a non-positive curvature estimate doubles the previous step.
pub fn minimize(psi0: &WaveField, a: &VectorField, opts: &MinimizeOptions) -> Result<MinimizeReport> {
    ensure_same_grid(psi0.grid(), a.grid(), "minimize")?;
    opts.validate()?;
    let grid = *psi0.grid();
    let functional = EnergyFunctional::new(a, &Region::FullSquare)?;
    let len = grid.len();

    let mut x: Vec<Complex64> = psi0.values().to_vec();
    let mut g = vec![Complex64::new(0.0, 0.0); len];
    let mut e = functional.evaluate(&x, Some(&mut g)).total;
    if !e.is_finite() {
        return Err(Error::Numerical("initial energy is not finite".into()));
    }
    let mut gnorm = sup_norm(&g);
    let mut history = vec![HistoryRow {
        iteration: 0,
        energy: e,
        gradient_norm: gnorm,
    }];
    let mut window: VecDeque<f64> = VecDeque::with_capacity(ENERGY_WINDOW + 1);
    window.push_back(e);

    let mut trial = vec![Complex64::new(0.0, 0.0); len];
    let mut g_trial = vec![Complex64::new(0.0, 0.0); len];
    let mut step = INITIAL_STEP;
    let mut termination = Termination::IterationCap;
    let mut iterations = 0;

    if gnorm < opts.gradient_tolerance {
        termination = Termination::GradientTolerance;
    } else {
        for k in 1..=opts.max_iterations {
            let g2: f64 = g.iter().map(|z| z.norm_sqr()).sum();
            let mut t = step;
            let accepted = loop {
                for ((y, xi), gi) in trial.iter_mut().zip(&x).zip(&g) {
                    *y = xi - gi * t;
                }
                if opts.project_modulus {
                    project(&mut trial);
                }
                let et = functional.evaluate(&trial, Some(&mut g_trial)).total;
                let predicted = if opts.project_modulus {
                    directional_decrease(&g, &x, &trial)
                } else {
                    t * g2
                };
                if et.is_finite() && et < e && e - et >= ARMIJO * predicted {
                    break Some(et);
                }
                t *= 0.5;
                if t < MIN_STEP {
                    break None;
                }
            };
            let Some(e_new) = accepted else {
                termination = Termination::Stalled;
                break;
            };

            let mut ss = 0.0;
            let mut sy = 0.0;
            let mut yy = 0.0;
            for i in 0..len {
                let s = trial[i] - x[i];
                let y = g_trial[i] - g[i];
                ss += s.norm_sqr();
                sy += s.re * y.re + s.im * y.im;
                yy += y.norm_sqr();
            }
            step = if sy > 0.0 {
                if k % 2 == 1 {
                    ss / sy
                } else {
                    sy / yy
                }
            } else {
                2.0 * t
            }
            .clamp(MIN_STEP, MAX_STEP);

            std::mem::swap(&mut x, &mut trial);
            std::mem::swap(&mut g, &mut g_trial);
            e = e_new;
            gnorm = sup_norm(&g);
            iterations = k;
            history.push(HistoryRow {
                iteration: k,
                energy: e,
                gradient_norm: gnorm,
            });
            if !x.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::Numerical(format!("non-finite state at iteration {k}")));
            }
            if gnorm < opts.gradient_tolerance {
                termination = Termination::GradientTolerance;
                break;
            }
            window.push_back(e);
            if window.len() > ENERGY_WINDOW {
                let oldest = window.pop_front().expect("window is non-empty");
                if oldest - e <= opts.energy_tolerance * e.abs() {
                    termination = Termination::EnergyTolerance;
                    break;
                }
            }
        }
    }

    let state = WaveField::new(grid, x)?;
    let report = functional.evaluate(state.values(), None);
    let el = el_residual(&state, a)?;
    let profile = modulus_profile(&state, &default_profile_radii(&grid));
    Ok(MinimizeReport {
        max_modulus: state.max_modulus(),
        state,
        history,
        energy: report,
        gradient_norm: gnorm,
        el_residual: el,
        profile,
        converged: matches!(
            termination,
            Termination::GradientTolerance | Termination::EnergyTolerance
        ),
        termination,
        iterations,
    })
}

fn sup_norm(v: &[Complex64]) -> f64 {
    v.iter().fold(0.0, |m, z| m.max(z.norm()))
}

fn project(v: &mut [Complex64]) {
    for z in v {
        let r = z.norm();
        if r > 1.0 {
            *z /= r;
        }
    }
}

/// `⟨g, x − y⟩`, the first-order decrease predicted for a projected step.
fn directional_decrease(g: &[Complex64], x: &[Complex64], y: &[Complex64]) -> f64 {
    g.iter()
        .zip(x.iter().zip(y))
        .map(|(g, (x, y))| {
            let d = x - y;
            g.re * d.re + g.im * d.im
        })
        .sum()
}

/// Sup over interior nodes of the energy gradient divided by the node weight,
/// the discrete form of `−(∇ − iA)²ψ − (1 − |ψ|²)ψ`.
pub fn el_residual(psi: &WaveField, a: &VectorField) -> Result<f64> {
    let g = energy_gradient(psi, a)?;
    let grid = psi.grid();
    let w = grid.node_weights(&Region::FullSquare)?;
    let n = grid.points();
    let mut sup: f64 = 0.0;
    for j in 1..n - 1 {
        for i in 1..n - 1 {
            let k = grid.index(i, j);
            sup = sup.max(g.values()[k].norm() / w[k]);
        }
    }
    Ok(sup)
}

/// Profile radii `k L / 20` for `k = 1, …, 19`.
pub fn default_profile_radii(grid: &GridSpec) -> Vec<f64> {
    (1..20).map(|k| grid.halfwidth() * k as f64 / 20.0).collect()
}

fn circle_samples(grid: &GridSpec, radius: f64) -> usize {
    let per_spacing = 8.0 * 2.0 * PI * radius / grid.spacing();
    (per_spacing.ceil() as usize).max(64)
}

/// `(min, mean)` of the interpolated modulus on the circle of radius `r`.
pub fn modulus_on_circle(psi: &WaveField, radius: f64) -> (f64, f64) {
    let m = circle_samples(psi.grid(), radius);
    let mut min = f64::INFINITY;
    let mut sum = 0.0;
    for k in 0..m {
        let t = 2.0 * PI * k as f64 / m as f64;
        let v = psi.interpolate([radius * t.cos(), radius * t.sin()]).norm();
        min = min.min(v);
        sum += v;
    }
    (min, sum / m as f64)
}

pub fn modulus_profile(psi: &WaveField, radii: &[f64]) -> Vec<ProfileRow> {
    radii
        .iter()
        .map(|&radius| {
            let (min, mean) = modulus_on_circle(psi, radius);
            ProfileRow { radius, min, mean }
        })
        .collect()
}

/// `tanh(r / r_c) e^{i n θ}`.
pub fn winding_ansatz(grid: &GridSpec, winding: i64, core_radius: f64) -> Result<WaveField> {
    if !(core_radius.is_finite() && core_radius > 0.0) {
        return Err(Error::InvalidParameter(format!("core radius {core_radius}")));
    }
    Ok(WaveField::from_fn(*grid, |[x, y]| {
        let r = x.hypot(y);
        let theta = y.atan2(x);
        Complex64::from_polar((r / core_radius).tanh(), winding as f64 * theta)
    }))
}

pub const WINDING_MIN_MODULUS: f64 = 0.1;

/// Phase circulation of `ψ` around the circle of radius `radius`, in units of 2π.
pub fn winding_number(psi: &WaveField, radius: f64) -> Result<i64> {
    let grid = psi.grid();
    if !(radius > 0.0 && radius <= grid.halfwidth()) {
        return Err(Error::InvalidParameter(format!(
            "circle radius {radius} outside (0, {}]",
            grid.halfwidth()
        )));
    }
    let m = circle_samples(grid, radius);
    let samples: Vec<Complex64> = (0..m)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / m as f64;
            psi.interpolate([radius * t.cos(), radius * t.sin()])
        })
        .collect();
    if let Some(small) = samples.iter().map(|z| z.norm()).find(|&v| v <= WINDING_MIN_MODULUS) {
        return Err(Error::ModulusTooSmall {
            modulus: small,
            threshold: WINDING_MIN_MODULUS,
            radius,
        });
    }
    let total: f64 = (0..m)
        .map(|k| (samples[(k + 1) % m] * samples[k].conj()).arg())
        .sum();
    Ok((total / (2.0 * PI)).round() as i64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindingRow {
    pub radius: f64,
    /// `None` when the circle meets a near-zero of `ψ`.
    pub winding: Option<i64>,
}

#[derive(Debug, Clone)]
pub struct PhaseDecomposition {
    /// `|ψ|`.
    pub modulus: ScalarField,
    /// Unwrapped phase on the above-threshold set, zero elsewhere.
    pub phase: ScalarField,
    /// Nodes where `|ψ| > τ`.
    pub mask: Vec<bool>,
    pub windings: Vec<WindingRow>,
    /// `‖A − ∇χ‖` over edges joining above-threshold nodes, with the link-consistent
    /// edge mean of `A` and the edge difference of `χ`.
    pub residual: f64,
}

pub const DEFAULT_PHASE_THRESHOLD: f64 = 0.2;

/// Writes `ψ = ρ e^{iχ}` on the set `|ψ| > τ`.
///
/// The set must be 4-connected, have no holes, and contain no plaquette with
/// non-zero phase winding; otherwise no single-valued smooth phase exists there.
pub fn phase_extract(
    psi: &WaveField,
    a: &VectorField,
    threshold: f64,
    radii: &[f64],
) -> Result<PhaseDecomposition> {
    ensure_same_grid(psi.grid(), a.grid(), "phase extraction")?;
    let grid = *psi.grid();
    let n = grid.points();
    let v = psi.values();
    let mask: Vec<bool> = v.iter().map(|z| z.norm() > threshold).collect();
    let count = mask.iter().filter(|&&m| m).count();
    if count == 0 {
        return Err(Error::PhaseObstruction(format!("no node has |psi| > {threshold}")));
    }

    // Root: the above-threshold node closest to the origin.
    let root = (0..grid.len())
        .filter(|&k| mask[k])
        .min_by(|&p, &q| {
            let [x1, y1] = grid.position(p);
            let [x2, y2] = grid.position(q);
            (x1.hypot(y1)).total_cmp(&x2.hypot(y2)).then(p.cmp(&q))
        })
        .expect("mask is non-empty");

    let mut phase = vec![0.0; grid.len()];
    let mut seen = vec![false; grid.len()];
    let mut queue = VecDeque::new();
    phase[root] = v[root].arg();
    seen[root] = true;
    queue.push_back(root);
    let mut reached = 1;
    while let Some(p) = queue.pop_front() {
        let (i, j) = (p % n, p / n);
        let mut visit = |q: usize| {
            if mask[q] && !seen[q] {
                seen[q] = true;
                phase[q] = phase[p] + (v[q] * v[p].conj()).arg();
                queue.push_back(q);
                reached += 1;
            }
        };
        if i + 1 < n {
            visit(p + 1);
        }
        if i > 0 {
            visit(p - 1);
        }
        if j + 1 < n {
            visit(p + n);
        }
        if j > 0 {
            visit(p - n);
        }
    }
    if reached < count {
        return Err(Error::PhaseObstruction(format!(
            "above-threshold set is disconnected ({reached} of {count} nodes reachable)"
        )));
    }
    if let Some(hole) = enclosed_hole(&grid, &mask) {
        let [x, y] = grid.position(hole);
        return Err(Error::PhaseObstruction(format!(
            "above-threshold set has a hole near ({x:.3}, {y:.3})"
        )));
    }
    for j in 0..n - 1 {
        for i in 0..n - 1 {
            let c = [
                grid.index(i, j),
                grid.index(i + 1, j),
                grid.index(i + 1, j + 1),
                grid.index(i, j + 1),
            ];
            if c.iter().all(|&k| mask[k]) {
                let w: f64 = (0..4).map(|s| (v[c[(s + 1) % 4]] * v[c[s]].conj()).arg()).sum();
                if w.abs() > PI {
                    let [x, y] = grid.position(c[0]);
                    return Err(Error::PhaseObstruction(format!(
                        "vortex in the plaquette at ({x:.3}, {y:.3})"
                    )));
                }
            }
        }
    }

    let residual = phase_residual(&grid, a, &phase, &mask)?;
    let windings = radii
        .iter()
        .map(|&radius| WindingRow {
            radius,
            winding: winding_number(psi, radius).ok(),
        })
        .collect();

    Ok(PhaseDecomposition {
        modulus: psi.modulus(),
        phase: ScalarField::new(grid, phase)?,
        mask,
        windings,
        residual,
    })
}

/// A below-threshold node whose 8-connected component does not reach the grid boundary.
fn enclosed_hole(grid: &GridSpec, mask: &[bool]) -> Option<usize> {
    let n = grid.points();
    let mut outside = vec![false; grid.len()];
    let mut queue = VecDeque::new();
    for k in 0..grid.len() {
        let (i, j) = (k % n, k / n);
        if !mask[k] && grid.is_boundary(i, j) {
            outside[k] = true;
            queue.push_back(k);
        }
    }
    while let Some(p) = queue.pop_front() {
        let (i, j) = ((p % n) as i64, (p / n) as i64);
        for dj in -1..=1 {
            for di in -1..=1 {
                let (u, w) = (i + di, j + dj);
                if u < 0 || w < 0 || u >= n as i64 || w >= n as i64 {
                    continue;
                }
                let q = w as usize * n + u as usize;
                if !mask[q] && !outside[q] {
                    outside[q] = true;
                    queue.push_back(q);
                }
            }
        }
    }
    (0..grid.len()).find(|&k| !mask[k] && !outside[k])
}

fn phase_residual(grid: &GridSpec, a: &VectorField, phase: &[f64], mask: &[bool]) -> Result<f64> {
    let n = grid.points();
    let h = grid.spacing();
    let w = grid.edge_weights(&Region::FullSquare)?;
    let mut s = 0.0;
    for j in 0..n {
        for i in 0..n - 1 {
            let p = j * n + i;
            if mask[p] && mask[p + 1] {
                let mean = 0.5 * (a.x()[p] + a.x()[p + 1]);
                let d = mean - (phase[p + 1] - phase[p]) / h;
                s += w.horizontal[j * (n - 1) + i] * d * d;
            }
        }
    }
    for j in 0..n - 1 {
        for i in 0..n {
            let p = j * n + i;
            if mask[p] && mask[p + n] {
                let mean = 0.5 * (a.y()[p] + a.y()[p + n]);
                let d = mean - (phase[p + n] - phase[p]) / h;
                s += w.vertical[p] * d * d;
            }
        }
    }
    Ok(s.sqrt())
}

/// Starting states for the descent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Initializer {
    /// `ψ ≡ 1`.
    Constant,
    /// `ψ = 1 + ε (u + i v)` with `u, v` uniform in `[−1, 1]`.
    RandomPerturbation { amplitude: f64, seed: u64 },
    /// `tanh(r / r_c) e^{i n θ}`.
    Winding { winding: i64, core_radius: f64 },
}

impl Initializer {
    pub fn build(&self, grid: &GridSpec) -> Result<WaveField> {
        match *self {
            Initializer::Constant => Ok(WaveField::constant(*grid, Complex64::new(1.0, 0.0))),
            Initializer::RandomPerturbation { amplitude, seed } => {
                if !amplitude.is_finite() {
                    return Err(Error::InvalidParameter("perturbation amplitude".into()));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Ok(WaveField::from_fn(*grid, |_| {
                    Complex64::new(
                        1.0 + amplitude * rng.random_range(-1.0..=1.0),
                        amplitude * rng.random_range(-1.0..=1.0),
                    )
                }))
            }
            Initializer::Winding {
                winding,
                core_radius,
            } => winding_ansatz(grid, winding, core_radius),
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            Initializer::Constant => "constant".to_string(),
            Initializer::RandomPerturbation { amplitude, seed } => {
                format!("random-perturbation(amplitude={amplitude},seed={seed})")
            }
            Initializer::Winding {
                winding,
                core_radius,
            } => format!("winding(n={winding},core={core_radius})"),
        }
    }
}

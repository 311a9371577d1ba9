//! Vector potentials from magnetic fields.
//!
//! The Coulomb potential `w = Γ₂ ∗ B` with `Γ₂(x) = ln|x| / 2π` is computed as a
//! free-space discrete convolution: the kernel is sampled on a zero-padded grid
//! at least twice as wide as the field grid, so the cyclic FFT product contains
//! no wrap-around. The vector potential is `A′ = ∇⊥w = (−∂₂w, ∂₁w)`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_same_grid, Error, Result};
use crate::fields::RadialProfile;
use crate::grid::{
    curl2d, div2d, grad, grad_perp, integrate, GridSpec, Region, ScalarField, VectorField,
    WaveField,
};
use crate::quadrature::{adaptive_simpson, gauss_legendre, gauss_legendre_composite};

/// Sampled fundamental solution on the padded grid, stored as its spectrum.
pub struct KernelSpec {
    grid: GridSpec,
    padded: usize,
    origin: f64,
    spectrum: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for KernelSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KernelSpec")
            .field("grid", &self.grid)
            .field("padded", &self.padded)
            .field("origin", &self.origin)
            .finish()
    }
}

impl KernelSpec {
    pub fn new(grid: GridSpec) -> Self {
        let n = grid.points();
        let m = fft_size(2 * n - 1);
        let origin = cell_average_log_kernel(grid.spacing());
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(m);
        let inverse = planner.plan_fft_inverse(m);
        let mut spectrum = vec![Complex64::new(0.0, 0.0); m * m];
        let a = grid.spacing();
        for row in 0..m {
            let dj = wrap_offset(row, n, m);
            for col in 0..m {
                let di = wrap_offset(col, n, m);
                if let (Some(di), Some(dj)) = (di, dj) {
                    spectrum[row * m + col] = Complex64::new(sampled_kernel(di, dj, a, origin), 0.0);
                }
            }
        }
        fft2(&mut spectrum, m, forward.as_ref());
        KernelSpec {
            grid,
            padded: m,
            origin,
            spectrum,
            forward,
            inverse,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Side of the padded transform grid.
    pub fn padded_size(&self) -> usize {
        self.padded
    }

    /// `K(0)`: the average of `Γ₂` over the central cell.
    pub fn origin_value(&self) -> f64 {
        self.origin
    }

    /// Kernel value at the lattice offset `(di, dj)`.
    pub fn value(&self, di: i64, dj: i64) -> f64 {
        sampled_kernel(di, dj, self.grid.spacing(), self.origin)
    }

    /// `a² Σ_q K(p − q) f(q)` at every node `p`.
    pub fn convolve(&self, f: &ScalarField) -> Result<ScalarField> {
        ensure_same_grid(&self.grid, f.grid(), "kernel convolution")?;
        let n = self.grid.points();
        let m = self.padded;
        let mut buf = vec![Complex64::new(0.0, 0.0); m * m];
        for j in 0..n {
            for i in 0..n {
                buf[j * m + i] = Complex64::new(f.at(i, j), 0.0);
            }
        }
        fft2(&mut buf, m, self.forward.as_ref());
        for (b, k) in buf.iter_mut().zip(&self.spectrum) {
            *b *= k;
        }
        fft2(&mut buf, m, self.inverse.as_ref());
        let a = self.grid.spacing();
        let scale = a * a / (m * m) as f64;
        let mut values = Vec::with_capacity(self.grid.len());
        for j in 0..n {
            for i in 0..n {
                values.push(buf[j * m + i].re * scale);
            }
        }
        ScalarField::new(self.grid, values)
    }
}

fn sampled_kernel(di: i64, dj: i64, a: f64, origin: f64) -> f64 {
    if di == 0 && dj == 0 {
        origin
    } else {
        let r = a * ((di * di + dj * dj) as f64).sqrt();
        r.ln() / (2.0 * PI)
    }
}

fn wrap_offset(k: usize, n: usize, m: usize) -> Option<i64> {
    if k < n {
        Some(k as i64)
    } else if k + n > m {
        Some(k as i64 - m as i64)
    } else {
        None
    }
}

/// Smallest `2^p 3^q 5^r` not below `min`.
fn fft_size(min: usize) -> usize {
    let mut best = usize::MAX;
    let mut p2 = 1usize;
    while p2 < 2 * min {
        let mut p3 = p2;
        while p3 < 2 * min {
            let mut p5 = p3;
            while p5 < 2 * min {
                if p5 >= min {
                    best = best.min(p5);
                }
                p5 *= 5;
            }
            p3 *= 3;
        }
        p2 *= 2;
    }
    best
}

fn fft2(buf: &mut [Complex64], m: usize, fft: &dyn Fft<f64>) {
    fft.process(buf);
    transpose(buf, m);
    fft.process(buf);
    transpose(buf, m);
}

fn transpose(buf: &mut [Complex64], m: usize) {
    for r in 0..m {
        for c in r + 1..m {
            buf.swap(r * m + c, c * m + r);
        }
    }
}

/// Average of `ln|x| / 2π` over the square `[−a/2, a/2]²`, by Gauss–Legendre
/// quadrature of the radial antiderivative over one eighth of the cell.
pub fn cell_average_log_kernel(a: f64) -> f64 {
    let h = 0.5 * a;
    let (x, w) = gauss_legendre(24);
    let quarter = 0.25 * PI;
    let mut s = 0.0;
    for (xi, wi) in x.iter().zip(&w) {
        let theta = 0.5 * quarter * (xi + 1.0);
        let rho = h / theta.cos();
        s += wi * (0.5 * rho * rho * rho.ln() - 0.25 * rho * rho);
    }
    let octant = 0.5 * quarter * s;
    8.0 * octant / (a * a) / (2.0 * PI)
}

type KernelCache = Mutex<HashMap<(u64, usize), Arc<KernelSpec>>>;

/// Kernel for `grid`, built on first use and shared afterwards.
pub fn kernel_for(grid: &GridSpec) -> Arc<KernelSpec> {
    static CACHE: OnceLock<KernelCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (grid.halfwidth().to_bits(), grid.points());
    if let Some(k) = cache.lock().expect("kernel cache poisoned").get(&key) {
        return Arc::clone(k);
    }
    let kernel = Arc::new(KernelSpec::new(*grid));
    let mut guard = cache.lock().expect("kernel cache poisoned");
    Arc::clone(guard.entry(key).or_insert(kernel))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub radius: f64,
    /// `∫_{B(0,R)} |A|²`.
    pub integral: f64,
}

#[derive(Debug, Clone)]
pub struct GaugeReport {
    /// Coulomb potential `w = Γ₂ ∗ B`.
    pub w: ScalarField,
    /// `A′ = ∇⊥w`.
    pub potential: VectorField,
    /// `‖curl A′ − B‖_{L²} / ‖B‖_{L²}` (zero when `B ≡ 0`).
    pub curl_residual: f64,
    /// `‖div A′‖_{L²}` over interior nodes.
    pub div_residual: f64,
    pub growth: Vec<GrowthRow>,
    pub warnings: Vec<String>,
}

/// Default growth-profile radii: `L/8, 2L/8, …, L`.
pub fn default_radii(grid: &GridSpec) -> Vec<f64> {
    (1..=8).map(|k| grid.halfwidth() * k as f64 / 8.0).collect()
}

pub fn coulomb_gauge(b: &ScalarField) -> Result<GaugeReport> {
    coulomb_gauge_with_radii(b, &default_radii(b.grid()))
}

/// Coulomb-gauge potential of `b` with its residuals and the growth profile of
/// `∫_{B(0,R)} |A′|²` at `radii`.
pub fn coulomb_gauge_with_radii(b: &ScalarField, radii: &[f64]) -> Result<GaugeReport> {
    let grid = *b.grid();
    if !b.values().iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("magnetic field".into()));
    }
    let mut warnings = Vec::new();
    let peak = b.max_abs();
    let edge = boundary_layer_max(b, 0.9);
    if peak > 0.0 && edge >= 1e-8 * peak {
        warnings.push(format!(
            "field not negligible near the boundary (max {edge:.3e} in r >= 0.9L vs peak {peak:.3e}); \
             free-space truncation error dominates"
        ));
    }

    let w = kernel_for(&grid).convolve(b)?;
    let potential = grad_perp(&w);

    let curl = curl2d(&potential);
    let diff = curl.combine(1.0, b, -1.0)?;
    let b_norm = integrate(&b.map(|v| v * v), &Region::FullSquare)?.sqrt();
    let curl_residual = if b_norm > 0.0 {
        integrate(&diff.map(|v| v * v), &Region::FullSquare)?.sqrt() / b_norm
    } else {
        integrate(&diff.map(|v| v * v), &Region::FullSquare)?.sqrt()
    };
    let div_residual = interior_l2(&div2d(&potential));
    let growth = l2_growth_profile(&potential, radii)?;

    Ok(GaugeReport {
        w,
        potential,
        curl_residual,
        div_residual,
        growth,
        warnings,
    })
}

fn boundary_layer_max(b: &ScalarField, inner_fraction: f64) -> f64 {
    let l = b.grid().halfwidth();
    (0..b.grid().len())
        .filter(|&k| {
            let [x, y] = b.grid().position(k);
            let r = x.hypot(y);
            r >= inner_fraction * l && r <= l
        })
        .fold(0.0, |m, k| m.max(b.values()[k].abs()))
}

/// Plain `a²`-weighted L² norm over interior nodes.
pub fn interior_l2(f: &ScalarField) -> f64 {
    let g = f.grid();
    let n = g.points();
    let a = g.spacing();
    let mut s = 0.0;
    for j in 1..n - 1 {
        for i in 1..n - 1 {
            let v = f.at(i, j);
            s += v * v;
        }
    }
    (s * a * a).sqrt()
}

/// Tangential potential `A_θ(r) = (1/r) ∫₀^r s B(s) ds` of a radial field by
/// adaptive quadrature. Positive values circulate counterclockwise.
pub fn radial_oracle(profile: impl Fn(f64) -> f64, radii: &[f64]) -> Vec<f64> {
    let integrand = |s: f64| s * profile(s);
    radii
        .iter()
        .map(|&r| {
            if r <= 0.0 {
                0.0
            } else {
                adaptive_simpson(&integrand, 0.0, r, 1e-14 * (1.0 + r), 0.25) / r
            }
        })
        .collect()
}

/// `A = (B₀/2)(−x₂, x₁)`.
pub fn symmetric_gauge(strength: f64, grid: &GridSpec) -> VectorField {
    let h = 0.5 * strength;
    VectorField::from_fn(*grid, |[x, y]| [-h * y, h * x])
}

/// `(ψ e^{iχ}, A + ∇χ)`.
///
/// The added gradient is the nodal field `g` whose endpoint average on every
/// edge equals the edge difference of `χ`, `(g(p) + g(q))/2 = (χ(q) − χ(p))/a`,
/// so the link phases shift by exactly `χ(q) − χ(p)` and every discrete
/// covariant difference keeps its modulus. `g` is fixed by that recursion along
/// each grid line, started from the second-order one-sided derivative.
pub fn gauge_transform(
    psi: &WaveField,
    a: &VectorField,
    chi: &ScalarField,
) -> Result<(WaveField, VectorField)> {
    ensure_same_grid(psi.grid(), a.grid(), "gauge transform (psi, A)")?;
    ensure_same_grid(psi.grid(), chi.grid(), "gauge transform (psi, chi)")?;
    let grid = *psi.grid();
    let rotated = psi
        .values()
        .iter()
        .zip(chi.values())
        .map(|(z, &c)| z * Complex64::from_polar(1.0, c))
        .collect();
    let g = lattice_gradient(chi);
    let shifted = VectorField::new(
        grid,
        a.x().iter().zip(g.x()).map(|(p, q)| p + q).collect(),
        a.y().iter().zip(g.y()).map(|(p, q)| p + q).collect(),
    )?;
    Ok((WaveField::new(grid, rotated)?, shifted))
}

/// Nodal gradient whose edge averages reproduce the edge differences of `chi`.
pub fn lattice_gradient(chi: &ScalarField) -> VectorField {
    let grid = *chi.grid();
    let n = grid.points();
    let a = grid.spacing();
    let start = grad(chi);
    let mut gx = vec![0.0; grid.len()];
    let mut gy = vec![0.0; grid.len()];
    for j in 0..n {
        let mut prev = start.x()[grid.index(0, j)];
        gx[grid.index(0, j)] = prev;
        for i in 0..n - 1 {
            let next = 2.0 * (chi.at(i + 1, j) - chi.at(i, j)) / a - prev;
            gx[grid.index(i + 1, j)] = next;
            prev = next;
        }
    }
    for i in 0..n {
        let mut prev = start.y()[grid.index(i, 0)];
        gy[grid.index(i, 0)] = prev;
        for j in 0..n - 1 {
            let next = 2.0 * (chi.at(i, j + 1) - chi.at(i, j)) / a - prev;
            gy[grid.index(i, j + 1)] = next;
            prev = next;
        }
    }
    VectorField::new(grid, gx, gy).expect("finite gradient of a finite field")
}

/// `∫_{B(0,R)} |A|²` for each radius.
pub fn l2_growth_profile(a: &VectorField, radii: &[f64]) -> Result<Vec<GrowthRow>> {
    let mag2 = a.magnitude_sq();
    radii
        .iter()
        .map(|&radius| {
            Ok(GrowthRow {
                radius,
                integral: integrate(&mag2, &Region::ball(radius))?,
            })
        })
        .collect()
}

/// Analytic continuation of a potential beyond the grid.
pub enum TailOracle<'a> {
    /// Rotationally symmetric about the origin; tangential magnitude `A_θ(r)`.
    Radial(&'a dyn Fn(f64) -> f64),
    /// General planar potential.
    Planar(&'a dyn Fn([f64; 2]) -> [f64; 2]),
}

impl TailOracle<'_> {
    /// `∫_{r0 < |x| < r1} |A|²`.
    pub fn shell_integral(&self, r0: f64, r1: f64) -> f64 {
        if r1 <= r0 {
            return 0.0;
        }
        let panels = ((r1 - r0) / 0.5).ceil().max(1.0) as usize;
        match self {
            TailOracle::Radial(at) => gauss_legendre_composite(
                |r| {
                    let v = at(r);
                    2.0 * PI * r * v * v
                },
                r0,
                r1,
                panels,
                8,
            ),
            TailOracle::Planar(pot) => {
                let angles = 256;
                gauss_legendre_composite(
                    |r| {
                        let mut s = 0.0;
                        for k in 0..angles {
                            let t = 2.0 * PI * k as f64 / angles as f64;
                            let v = pot([r * t.cos(), r * t.sin()]);
                            s += v[0] * v[0] + v[1] * v[1];
                        }
                        r * s * 2.0 * PI / angles as f64
                    },
                    r0,
                    r1,
                    panels,
                    8,
                )
            }
        }
    }
}

/// Growth profile measured on the grid up to `grid_radius` and continued with
/// `oracle` beyond it.
pub fn extended_growth_profile(
    a: &VectorField,
    grid_radius: f64,
    oracle: &TailOracle<'_>,
    radii: &[f64],
) -> Result<Vec<GrowthRow>> {
    let base = l2_growth_profile(a, &[grid_radius])?[0].integral;
    radii
        .iter()
        .map(|&radius| {
            let integral = if radius <= grid_radius {
                l2_growth_profile(a, &[radius])?[0].integral
            } else {
                base + oracle.shell_integral(grid_radius, radius)
            };
            Ok(GrowthRow { radius, integral })
        })
        .collect()
}

/// Radial oracle closure for a profile, evaluating the closed-form circulation.
pub fn closed_form_circulation(profile: RadialProfile) -> impl Fn(f64) -> f64 {
    move |r| profile.circulation(r)
}

/// Least-squares slope of `integral` against `ln R`.
pub fn log_slope(rows: &[GrowthRow]) -> f64 {
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.radius.ln(), r.integral)).collect();
    least_squares_slope(&pts)
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{sample_field, FieldSpec};
    use approx::assert_relative_eq;

    #[test]
    fn origin_value_matches_closed_form_cell_average() {
        // Mean of ln|x| over [-h, h]² is ln h + ln2/2 − 3/2 + π/4.
        for a in [1.0_f64, 0.09375, 0.3] {
            let h = 0.5 * a;
            let exact = (h.ln() + 0.5 * 2f64.ln() - 1.5 + 0.25 * PI) / (2.0 * PI);
            assert_relative_eq!(cell_average_log_kernel(a), exact, max_relative = 1e-13);
        }
    }

    #[test]
    fn kernel_is_lattice_symmetric() {
        let g = GridSpec::new(3.0, 17).unwrap();
        let k = kernel_for(&g);
        for (i, j) in [(1, 2), (3, 0), (5, 7)] {
            let v = k.value(i, j);
            assert_eq!(v, k.value(j, i));
            assert_eq!(v, k.value(-i, j));
            assert_eq!(v, k.value(i, -j));
        }
        assert!(k.padded_size() >= 2 * 17 - 1);
    }

    #[test]
    fn fft_sizes_are_smooth() {
        assert_eq!(fft_size(513), 540);
        assert_eq!(fft_size(257), 270);
        assert_eq!(fft_size(31), 32);
    }

    #[test]
    fn convolution_matches_direct_sum() {
        let g = GridSpec::new(2.0, 17).unwrap();
        let f = ScalarField::from_fn(g, |[x, y]| (x - 0.3 * y).cos() + 0.1 * x);
        let k = kernel_for(&g);
        let fast = k.convolve(&f).unwrap();
        let a = g.spacing();
        for (p, q) in [(0usize, 0usize), (8, 8), (3, 11), (16, 1)] {
            let mut s = 0.0;
            for j in 0..17 {
                for i in 0..17 {
                    s += k.value(p as i64 - i as i64, q as i64 - j as i64) * f.at(i, j);
                }
            }
            assert_relative_eq!(fast.at(p, q), s * a * a, max_relative = 1e-11, epsilon = 1e-13);
        }
    }

    #[test]
    fn zero_field_gives_zero_potential() {
        let g = GridSpec::new(4.0, 33).unwrap();
        let r = coulomb_gauge(&ScalarField::zeros(g)).unwrap();
        assert!(r.potential.x().iter().chain(r.potential.y()).all(|&v| v == 0.0));
        assert_eq!(r.curl_residual, 0.0);
        assert_eq!(r.div_residual, 0.0);
        assert!(r.growth.iter().all(|row| row.integral == 0.0));
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn constant_field_triggers_truncation_warning() {
        let g = GridSpec::new(4.0, 33).unwrap();
        let r = coulomb_gauge(&ScalarField::constant(g, 1.0)).unwrap();
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn non_finite_field_rejected() {
        let g = GridSpec::new(4.0, 17).unwrap();
        assert!(ScalarField::new(g, vec![f64::NAN; g.len()]).is_err());
    }

    #[test]
    fn radial_oracle_values() {
        assert_eq!(radial_oracle(|_| 0.0, &[0.5, 2.0]), vec![0.0, 0.0]);
        let v = radial_oracle(|s| (-s * s).exp(), &[2.0, 0.0]);
        assert_relative_eq!(v[0], (1.0 - (-4.0f64).exp()) / 4.0, epsilon = 1e-13);
        assert_eq!(v[1], 0.0);
        let c = radial_oracle(|_| 1.7, &[3.0]);
        assert_relative_eq!(c[0], 1.7 * 3.0 / 2.0, epsilon = 1e-13);
    }

    #[test]
    fn radial_oracle_agrees_with_closed_forms() {
        let profiles = [
            RadialProfile::Gaussian {
                amplitude: 1.3,
                sigma: 0.8,
            },
            RadialProfile::Bump {
                amplitude: 2.0,
                radius: 1.5,
            },
        ];
        let radii = [0.1, 0.7, 1.5, 3.0, 40.0];
        for p in profiles {
            let q = radial_oracle(|s| p.value(s), &radii);
            for (r, v) in radii.iter().zip(q) {
                assert_relative_eq!(v, p.circulation(*r), max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn symmetric_gauge_curl() {
        let g = GridSpec::new(3.0, 25).unwrap();
        let a = symmetric_gauge(2.0, &g);
        assert_eq!(a.at(20, 7), [-g.coord(7), g.coord(20)]);
        assert!(symmetric_gauge(0.0, &g).x().iter().all(|&v| v == 0.0));
        let c = curl2d(&symmetric_gauge(1.0, &g));
        assert!(c.values().iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn lattice_gradient_matches_edge_differences() {
        let g = GridSpec::new(2.0, 21).unwrap();
        let chi = ScalarField::from_fn(g, |[x, y]| (2.0 * x).sin() + x * y * y);
        let d = lattice_gradient(&chi);
        let a = g.spacing();
        for j in 0..20 {
            for i in 0..20 {
                let hx = 0.5 * (d.at(i, j)[0] + d.at(i + 1, j)[0]);
                assert_relative_eq!(hx, (chi.at(i + 1, j) - chi.at(i, j)) / a, epsilon = 1e-11);
                let hy = 0.5 * (d.at(i, j)[1] + d.at(i, j + 1)[1]);
                assert_relative_eq!(hy, (chi.at(i, j + 1) - chi.at(i, j)) / a, epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn gauge_transform_identity_and_global_phase() {
        let g = GridSpec::new(2.0, 17).unwrap();
        let psi = WaveField::from_fn(g, |[x, y]| Complex64::new(x, y * y));
        let a = symmetric_gauge(1.0, &g);
        let (p0, a0) = gauge_transform(&psi, &a, &ScalarField::zeros(g)).unwrap();
        assert_eq!(p0, psi);
        assert_eq!(a0, a);
        let (p1, a1) = gauge_transform(&psi, &a, &ScalarField::constant(g, 0.4)).unwrap();
        for k in 0..g.len() {
            assert!((a1.x()[k] - a.x()[k]).abs() < 1e-14);
            assert!((a1.y()[k] - a.y()[k]).abs() < 1e-14);
        }
        for (z, w) in psi.values().iter().zip(p1.values()) {
            assert!((z * Complex64::from_polar(1.0, 0.4) - w).norm() < 1e-15);
        }
    }

    #[test]
    fn gauge_transform_rejects_mismatch() {
        let g = GridSpec::new(2.0, 17).unwrap();
        let h = GridSpec::new(2.0, 19).unwrap();
        let r = gauge_transform(
            &WaveField::constant(g, Complex64::new(1.0, 0.0)),
            &VectorField::zeros(h),
            &ScalarField::zeros(g),
        );
        assert!(matches!(r, Err(Error::GridMismatch(_))));
    }

    #[test]
    fn growth_profile_of_symmetric_gauge() {
        let g = GridSpec::new(4.0, 257).unwrap();
        let a = symmetric_gauge(1.0, &g);
        let rows = l2_growth_profile(&a, &[1.0, 2.0, 3.5]).unwrap();
        for row in rows {
            let exact = PI * row.radius.powi(4) / 8.0;
            assert_relative_eq!(row.integral, exact, max_relative = 1e-3);
        }
        assert!(l2_growth_profile(&a, &[4.5]).is_err());
        let zero = l2_growth_profile(&VectorField::zeros(g), &[1.0, 3.0]).unwrap();
        assert!(zero.iter().all(|r| r.integral == 0.0));
    }

    #[test]
    fn gaussian_potential_near_unit_radius() {
        let g = GridSpec::new(12.0, 257).unwrap();
        let b = sample_field(&FieldSpec::unit_gaussian(), &g).unwrap();
        let rep = coulomb_gauge(&b).unwrap();
        assert!(rep.warnings.is_empty());
        let p = WaveField::new(
            g,
            rep.potential
                .x()
                .iter()
                .zip(rep.potential.y())
                .map(|(&x, &y)| Complex64::new(x, y))
                .collect(),
        )
        .unwrap()
        .interpolate([1.0, 0.0]);
        // (1 − e^{−1}) / 2 from the circulation; the stencils are second order.
        let exact = 0.5 * (1.0 - (-1.0f64).exp());
        assert!(p.re.abs() < 1e-3, "{}", p.re);
        assert!((p.im - exact).abs() < 2e-3, "{}", p.im);
        assert!(rep.div_residual < 1e-10);
        // Growth profile is monotone.
        for w in rep.growth.windows(2) {
            assert!(w[1].integral >= w[0].integral);
        }
    }

    #[test]
    fn slope_of_exact_log() {
        let rows: Vec<GrowthRow> = [2.0f64, 5.0, 9.0]
            .iter()
            .map(|&r| GrowthRow {
                radius: r,
                integral: 3.0 + 0.7 * r.ln(),
            })
            .collect();
        assert_relative_eq!(log_slope(&rows), 0.7, epsilon = 1e-12);
    }
}

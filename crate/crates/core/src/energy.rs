//! Lattice discretization of the magnetic Ginzburg–Landau energy
//!
//! ```text
//! E(ψ) = ½ ∫ |(∇ − iA)ψ|² + ¼ ∫ (1 − |ψ|²)²
//! ```
//!
//! The covariant derivative lives on edges. For the edge `p → q = p + a e_μ`
//!
//! ```text
//! D_μψ = (U ψ(q) − ψ(p)) / a,    U = exp(−i a Ā_μ),
//! ```
//!
//! where `Ā_μ` is the mean of `A_μ` at the two endpoints. The link phase makes
//! the discrete energy exactly invariant under `ψ → ψe^{iχ}` with the matching
//! shift of the link phases, and `|Uψ(q)| = |ψ(q)|` makes the diamagnetic
//! inequality hold edge by edge. Edges leaving the square are simply absent
//! (free boundary).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_same_grid, Result};
use crate::grid::{EdgeWeights, GridSpec, Region, ScalarField, VectorField, WaveField};

/// Link phases `e^{−i a Ā}` on every edge, indexed like [`EdgeWeights`].
#[derive(Debug, Clone, PartialEq)]
pub struct LinkField {
    grid: GridSpec,
    pub horizontal: Vec<Complex64>,
    pub vertical: Vec<Complex64>,
}

impl LinkField {
    pub fn from_potential(a: &VectorField) -> Self {
        let grid = *a.grid();
        let n = grid.points();
        let h = grid.spacing();
        let mut horizontal = Vec::with_capacity(grid.edges_per_direction());
        for j in 0..n {
            for i in 0..n - 1 {
                let mean = 0.5 * (a.at(i, j)[0] + a.at(i + 1, j)[0]);
                horizontal.push(Complex64::from_polar(1.0, -h * mean));
            }
        }
        let mut vertical = Vec::with_capacity(grid.edges_per_direction());
        for j in 0..n - 1 {
            for i in 0..n {
                let mean = 0.5 * (a.at(i, j)[1] + a.at(i, j + 1)[1]);
                vertical.push(Complex64::from_polar(1.0, -h * mean));
            }
        }
        LinkField {
            grid,
            horizontal,
            vertical,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }
}

/// `(∇ − iA)ψ` on edges, indexed like [`EdgeWeights`].
#[derive(Debug, Clone, PartialEq)]
pub struct CovariantDerivField {
    grid: GridSpec,
    pub horizontal: Vec<Complex64>,
    pub vertical: Vec<Complex64>,
}

impl CovariantDerivField {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn max_abs(&self) -> f64 {
        self.horizontal
            .iter()
            .chain(&self.vertical)
            .fold(0.0, |m, z| m.max(z.norm()))
    }
}

pub fn covariant_derivative(psi: &WaveField, a: &VectorField) -> Result<CovariantDerivField> {
    ensure_same_grid(psi.grid(), a.grid(), "covariant derivative")?;
    let links = LinkField::from_potential(a);
    let grid = *psi.grid();
    let n = grid.points();
    let inv = 1.0 / grid.spacing();
    let v = psi.values();
    let mut horizontal = Vec::with_capacity(grid.edges_per_direction());
    for j in 0..n {
        for i in 0..n - 1 {
            let p = j * n + i;
            let e = j * (n - 1) + i;
            horizontal.push((links.horizontal[e] * v[p + 1] - v[p]) * inv);
        }
    }
    let mut vertical = Vec::with_capacity(grid.edges_per_direction());
    for j in 0..n - 1 {
        for i in 0..n {
            let p = j * n + i;
            vertical.push((links.vertical[p] * v[p + n] - v[p]) * inv);
        }
    }
    Ok(CovariantDerivField {
        grid,
        horizontal,
        vertical,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    /// `½ ∫ |(∇ − iA)ψ|²`.
    pub kinetic: f64,
    /// `¼ ∫ (1 − |ψ|²)²`.
    pub potential: f64,
    pub total: f64,
    pub region: Region,
}

/// Discrete energy with precomputed link phases and quadrature weights.
///
/// Evaluating the energy and its gradient together is the inner loop of the
/// minimizer, so this keeps everything that does not depend on `ψ`.
#[derive(Debug, Clone)]
pub struct EnergyFunctional {
    grid: GridSpec,
    links: LinkField,
    nodes: Vec<f64>,
    edges: EdgeWeights,
    region: Region,
}

impl EnergyFunctional {
    pub fn new(a: &VectorField, region: &Region) -> Result<Self> {
        let grid = *a.grid();
        Ok(EnergyFunctional {
            grid,
            links: LinkField::from_potential(a),
            nodes: grid.node_weights(region)?,
            edges: grid.edge_weights(region)?,
            region: *region,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn node_weights(&self) -> &[f64] {
        &self.nodes
    }

    pub fn links(&self) -> &LinkField {
        &self.links
    }

    /// Energy of the raw nodal values, accumulating the exact gradient with
    /// respect to `(Re ψ, Im ψ)` into `grad` (packed as a complex number) when given.
    pub fn evaluate(&self, psi: &[Complex64], mut grad: Option<&mut [Complex64]>) -> EnergyReport {
        let n = self.grid.points();
        let a = self.grid.spacing();
        let inv_a2 = 1.0 / (a * a);
        if let Some(g) = grad.as_deref_mut() {
            g.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        }

        let mut kinetic = 0.0;
        let mut potential = 0.0;
        for j in 0..n {
            for i in 0..n {
                let p = j * n + i;
                let z = psi[p];
                if i + 1 < n {
                    let e = j * (n - 1) + i;
                    let w = self.edges.horizontal[e];
                    let u = self.links.horizontal[e];
                    let d = u * psi[p + 1] - z;
                    kinetic += w * d.norm_sqr();
                    if let Some(g) = grad.as_deref_mut() {
                        let c = w * inv_a2;
                        g[p] -= d * c;
                        g[p + 1] += u.conj() * d * c;
                    }
                }
                if j + 1 < n {
                    let w = self.edges.vertical[p];
                    let u = self.links.vertical[p];
                    let d = u * psi[p + n] - z;
                    kinetic += w * d.norm_sqr();
                    if let Some(g) = grad.as_deref_mut() {
                        let c = w * inv_a2;
                        g[p] -= d * c;
                        g[p + n] += u.conj() * d * c;
                    }
                }
                let wn = self.nodes[p];
                let s = 1.0 - z.norm_sqr();
                potential += wn * s * s;
                if let Some(g) = grad.as_deref_mut() {
                    g[p] -= z * (wn * s);
                }
            }
        }
        let kinetic = 0.5 * kinetic * inv_a2;
        let potential = 0.25 * potential;
        EnergyReport {
            kinetic,
            potential,
            total: kinetic + potential,
            region: self.region,
        }
    }
}

pub fn energy(psi: &WaveField, a: &VectorField, region: &Region) -> Result<EnergyReport> {
    ensure_same_grid(psi.grid(), a.grid(), "energy")?;
    Ok(EnergyFunctional::new(a, region)?.evaluate(psi.values(), None))
}

/// Gradient of the full-square discrete energy with respect to the real and
/// imaginary parts of every nodal value, packed as `∂E/∂Re ψ + i ∂E/∂Im ψ`.
pub fn energy_gradient(psi: &WaveField, a: &VectorField) -> Result<WaveField> {
    ensure_same_grid(psi.grid(), a.grid(), "energy gradient")?;
    let f = EnergyFunctional::new(a, &Region::FullSquare)?;
    let mut g = vec![Complex64::new(0.0, 0.0); psi.grid().len()];
    f.evaluate(psi.values(), Some(&mut g));
    WaveField::new(*psi.grid(), g)
}

/// `|D_μψ| − |D_μ|ψ||` per edge, reduced per node to the minimum over incident edges.
pub fn diamagnetic_margin(psi: &WaveField, a: &VectorField) -> Result<ScalarField> {
    let d = covariant_derivative(psi, a)?;
    let grid = *psi.grid();
    let n = grid.points();
    let inv = 1.0 / grid.spacing();
    let m: Vec<f64> = psi.values().iter().map(|z| z.norm()).collect();
    let mut out = vec![f64::INFINITY; grid.len()];
    for j in 0..n {
        for i in 0..n - 1 {
            let p = j * n + i;
            let e = j * (n - 1) + i;
            let margin = d.horizontal[e].norm() - ((m[p + 1] - m[p]) * inv).abs();
            out[p] = out[p].min(margin);
            out[p + 1] = out[p + 1].min(margin);
        }
    }
    for j in 0..n - 1 {
        for i in 0..n {
            let p = j * n + i;
            let margin = d.vertical[p].norm() - ((m[p + n] - m[p]) * inv).abs();
            out[p] = out[p].min(margin);
            out[p + n] = out[p + n].min(margin);
        }
    }
    ScalarField::new(grid, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::symmetric_gauge;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn one(g: GridSpec) -> WaveField {
        WaveField::constant(g, Complex64::new(1.0, 0.0))
    }

    #[test]
    fn covariantly_constant_states() {
        let g = GridSpec::new(2.0, 21).unwrap();
        let d = covariant_derivative(&one(g), &VectorField::zeros(g)).unwrap();
        assert_eq!(d.max_abs(), 0.0);

        let c = 0.8;
        let psi = WaveField::from_fn(g, |[x, _]| Complex64::from_polar(1.0, c * x));
        let a = VectorField::from_fn(g, |_| [c, 0.0]);
        let d = covariant_derivative(&psi, &a).unwrap();
        assert!(d.max_abs() < 1e-12);
    }

    #[test]
    fn kinetic_density_of_unit_state_approaches_potential_squared() {
        let g = GridSpec::new(4.0, 257).unwrap();
        let a = symmetric_gauge(1.0, &g);
        let e = energy(&one(g), &a, &Region::FullSquare).unwrap();
        // ∫_{[-4,4]²} |x|²/4 = 2·(2·4³/3·8)/4
        let exact = 2.0 * (2.0 * 64.0 / 3.0) * 8.0 / 4.0;
        assert_relative_eq!(2.0 * e.kinetic, exact, max_relative = 1e-2);
    }

    #[test]
    fn energy_examples() {
        let g = GridSpec::new(1.0, 129).unwrap();
        let e = energy(&one(g), &VectorField::zeros(g), &Region::FullSquare).unwrap();
        assert_eq!(e.total, 0.0);

        let zero = WaveField::constant(g, Complex64::new(0.0, 0.0));
        let e = energy(&zero, &symmetric_gauge(3.0, &g), &Region::FullSquare).unwrap();
        assert_relative_eq!(e.total, 1.0, epsilon = 1e-12);

        let e = energy(&one(g), &symmetric_gauge(1.0, &g), &Region::FullSquare).unwrap();
        assert_relative_eq!(e.total, 1.0 / 3.0, max_relative = 1e-2);
        assert_relative_eq!(e.total, e.kinetic + e.potential, max_relative = 1e-13);
    }

    #[test]
    fn gradient_vanishes_at_trivial_critical_points() {
        let g = GridSpec::new(2.0, 17).unwrap();
        let a = VectorField::zeros(g);
        let grad = energy_gradient(&one(g), &a).unwrap();
        assert!(grad.max_modulus() < 1e-10);
        let zero = WaveField::constant(g, Complex64::new(0.0, 0.0));
        assert_eq!(energy_gradient(&zero, &a).unwrap().max_modulus(), 0.0);
    }

    #[test]
    fn diamagnetic_equality_for_nonnegative_real_states() {
        let g = GridSpec::new(2.0, 17).unwrap();
        let psi = WaveField::from_fn(g, |[x, y]| Complex64::new(1.0 + 0.5 * (x * y).sin(), 0.0));
        let m = diamagnetic_margin(&psi, &VectorField::zeros(g)).unwrap();
        assert!(m.max_abs() < 1e-12);
    }

    #[test]
    fn diamagnetic_margin_never_negative() {
        let g = GridSpec::new(2.0, 17).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let psi = WaveField::from_fn(g, |_| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let a = VectorField::from_fn(g, |[x, y]| [x * y, (x - y).cos()]);
        let m = diamagnetic_margin(&psi, &a).unwrap();
        assert!(m.values().iter().all(|&v| v >= -1e-12));
    }

    #[test]
    fn pure_phase_has_positive_margin_where_phase_varies() {
        let g = GridSpec::new(2.0, 33).unwrap();
        let psi = WaveField::from_fn(g, |[x, y]| Complex64::from_polar(1.0, (x + 0.5 * y).sin()));
        let m = diamagnetic_margin(&psi, &VectorField::zeros(g)).unwrap();
        assert!(m.values().iter().all(|&v| v > 0.0));
    }

    #[test]
    fn region_restricted_energy() {
        let g = GridSpec::new(2.0, 65).unwrap();
        let zero = WaveField::constant(g, Complex64::new(0.0, 0.0));
        let e = energy(&zero, &VectorField::zeros(g), &Region::ball(1.0)).unwrap();
        assert_relative_eq!(e.total, 0.25 * std::f64::consts::PI, max_relative = 1e-3);
        assert!(energy(&zero, &VectorField::zeros(g), &Region::ball(3.0)).is_err());
    }
}

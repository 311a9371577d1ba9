//! Uniform node-centered grids on `[-L, L]²`, the fields living on them,
//! second-order difference operators and region quadrature.
//!
//! Node `(i, j)` sits at `(-L + i a, -L + j a)` with `a = 2L / (n - 1)`.
//! Values are stored row-major with `j` (the `x₂` index) as the row, so the
//! flat index of node `(i, j)` is `j * n + i`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_same_grid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    halfwidth: f64,
    points: usize,
}

impl GridSpec {
    pub const MIN_POINTS: usize = 16;
    /// Smallest grid for which the one-sided boundary stencils are defined.
    pub const MIN_RELAXED_POINTS: usize = 3;

    /// Grid on `[-halfwidth, halfwidth]²` with `points` nodes per axis.
    pub fn new(halfwidth: f64, points: usize) -> Result<Self> {
        Self::with_min_points(halfwidth, points, Self::MIN_POINTS)
    }

    /// Same as [`GridSpec::new`] with the lower bound on `points` dropped to 3.
    /// Meant for small exhaustive checks such as finite-difference gradient tests.
    pub fn relaxed(halfwidth: f64, points: usize) -> Result<Self> {
        Self::with_min_points(halfwidth, points, Self::MIN_RELAXED_POINTS)
    }

    fn with_min_points(halfwidth: f64, points: usize, min: usize) -> Result<Self> {
        if !halfwidth.is_finite() || halfwidth <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "halfwidth must be finite and positive, got {halfwidth}"
            )));
        }
        if points < min {
            return Err(Error::InvalidGrid(format!(
                "need at least {min} points per axis, got {points}"
            )));
        }
        Ok(GridSpec { halfwidth, points })
    }

    /// Smallest odd point count whose spacing does not exceed `spacing`.
    pub fn with_spacing(halfwidth: f64, spacing: f64) -> Result<Self> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidGrid(format!("bad target spacing {spacing}")));
        }
        let mut cells = (2.0 * halfwidth / spacing).ceil() as usize;
        if cells % 2 == 1 {
            cells += 1;
        }
        Self::new(halfwidth, (cells + 1).max(Self::MIN_POINTS + 1))
    }

    pub fn halfwidth(&self) -> f64 {
        self.halfwidth
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.halfwidth / (self.points - 1) as f64
    }

    /// Number of nodes, `n²`.
    pub fn len(&self) -> usize {
        self.points * self.points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coord(&self, i: usize) -> f64 {
        // Symmetric evaluation keeps mirrored nodes exactly opposite.
        let n1 = (self.points - 1) as f64;
        self.halfwidth * (2.0 * i as f64 - n1) / n1
    }

    pub fn node(&self, i: usize, j: usize) -> [f64; 2] {
        [self.coord(i), self.coord(j)]
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.points + i
    }

    /// Position of the node with flat index `k`.
    pub fn position(&self, k: usize) -> [f64; 2] {
        self.node(k % self.points, k / self.points)
    }

    /// Whether `(i, j)` lies on the outermost ring of nodes.
    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i + 1 == self.points || j + 1 == self.points
    }

    /// Number of horizontal edges `(i, j) -> (i + 1, j)`; vertical edges are as many.
    pub fn edges_per_direction(&self) -> usize {
        (self.points - 1) * self.points
    }

    /// Quadrature weight of every node for `region`: the area of the node's dual
    /// cell clipped to the square and intersected with the region.
    pub fn node_weights(&self, region: &Region) -> Result<Vec<f64>> {
        region.check(self)?;
        let n = self.points;
        let mut w = Vec::with_capacity(self.len());
        for j in 0..n {
            let (y0, y1) = self.dual_interval(j);
            for i in 0..n {
                let (x0, x1) = self.dual_interval(i);
                w.push(region.covered_area(x0, x1, y0, y1));
            }
        }
        Ok(w)
    }

    /// Quadrature weights of the horizontal and vertical edges for `region`.
    /// Each edge owns the cell centered at its midpoint, clipped to the square.
    pub fn edge_weights(&self, region: &Region) -> Result<EdgeWeights> {
        region.check(self)?;
        let n = self.points;
        let mut horizontal = Vec::with_capacity(self.edges_per_direction());
        let mut vertical = Vec::with_capacity(self.edges_per_direction());
        for j in 0..n {
            let (y0, y1) = self.dual_interval(j);
            for i in 0..n - 1 {
                let x0 = self.coord(i);
                let x1 = self.coord(i + 1);
                horizontal.push(region.covered_area(x0, x1, y0, y1));
            }
        }
        for j in 0..n - 1 {
            let y0 = self.coord(j);
            let y1 = self.coord(j + 1);
            for i in 0..n {
                let (x0, x1) = self.dual_interval(i);
                vertical.push(region.covered_area(x0, x1, y0, y1));
            }
        }
        Ok(EdgeWeights {
            horizontal,
            vertical,
        })
    }

    fn dual_interval(&self, i: usize) -> (f64, f64) {
        let h = 0.5 * self.spacing();
        let c = self.coord(i);
        let lo = if i == 0 { c } else { c - h };
        let hi = if i + 1 == self.points { c } else { c + h };
        (lo, hi)
    }
}

/// Edge quadrature weights. Horizontal edge `(i, j) -> (i + 1, j)` has index
/// `j * (n - 1) + i`; vertical edge `(i, j) -> (i, j + 1)` has index `j * n + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeWeights {
    pub horizontal: Vec<f64>,
    pub vertical: Vec<f64>,
}

/// Integration region inside the square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Region {
    FullSquare,
    Ball { radius: f64 },
    Annulus { inner: f64, outer: f64 },
}

impl Region {
    pub fn ball(radius: f64) -> Self {
        Region::Ball { radius }
    }

    pub fn annulus(inner: f64, outer: f64) -> Self {
        Region::Annulus { inner, outer }
    }

    /// Checks the radii and that the region fits inside the grid's square.
    pub fn check(&self, grid: &GridSpec) -> Result<()> {
        let l = grid.halfwidth();
        let tol = 1e-12 * l;
        match *self {
            Region::FullSquare => Ok(()),
            Region::Ball { radius } => {
                if !(radius.is_finite() && radius > 0.0) {
                    return Err(Error::InvalidParameter(format!("ball radius {radius}")));
                }
                if radius > l + tol {
                    return Err(Error::RegionOutOfRange(format!(
                        "ball radius {radius} exceeds halfwidth {l}"
                    )));
                }
                Ok(())
            }
            Region::Annulus { inner, outer } => {
                if !(inner.is_finite() && outer.is_finite() && inner > 0.0 && outer > inner) {
                    return Err(Error::InvalidParameter(format!(
                        "annulus radii ({inner}, {outer})"
                    )));
                }
                if outer > l + tol {
                    return Err(Error::RegionOutOfRange(format!(
                        "annulus radius {outer} exceeds halfwidth {l}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Whether the point lies in the (closed) region.
    pub fn contains(&self, x: [f64; 2]) -> bool {
        let r = x[0].hypot(x[1]);
        match *self {
            Region::FullSquare => true,
            Region::Ball { radius } => r <= radius,
            Region::Annulus { inner, outer } => r >= inner && r <= outer,
        }
    }

    fn covered_area(&self, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
        let area = (x1 - x0) * (y1 - y0);
        if area <= 0.0 {
            return 0.0;
        }
        match *self {
            Region::FullSquare => area,
            Region::Ball { radius } => area * disk_fraction(x0, x1, y0, y1, radius),
            Region::Annulus { inner, outer } => {
                area * (disk_fraction(x0, x1, y0, y1, outer) - disk_fraction(x0, x1, y0, y1, inner))
            }
        }
    }
}

const SUBCELLS: usize = 4;

/// Fraction of the rectangle covered by the disk of radius `r` about the origin.
///
/// Cells cut by the circle are split into 4×4 subcells; within each subcell the
/// circle is replaced by its tangent line at the subcell center, whose covered
/// area is exact. The resulting error is O(h²/R) per subcell.
fn disk_fraction(x0: f64, x1: f64, y0: f64, y1: f64, r: f64) -> f64 {
    let far_x = x0.abs().max(x1.abs());
    let far_y = y0.abs().max(y1.abs());
    if far_x * far_x + far_y * far_y <= r * r {
        return 1.0;
    }
    let near_x = if x0 <= 0.0 && 0.0 <= x1 { 0.0 } else { x0.abs().min(x1.abs()) };
    let near_y = if y0 <= 0.0 && 0.0 <= y1 { 0.0 } else { y0.abs().min(y1.abs()) };
    if near_x * near_x + near_y * near_y >= r * r {
        return 0.0;
    }
    let hx = (x1 - x0) / SUBCELLS as f64;
    let hy = (y1 - y0) / SUBCELLS as f64;
    let mut total = 0.0;
    for q in 0..SUBCELLS {
        let cy = y0 + (q as f64 + 0.5) * hy;
        for p in 0..SUBCELLS {
            let cx = x0 + (p as f64 + 0.5) * hx;
            let rc = cx.hypot(cy);
            if rc == 0.0 {
                total += 1.0;
                continue;
            }
            // Half-plane n·(x - c) <= r - |c| in subcell-scaled coordinates.
            let n1 = cx / rc * hx;
            let n2 = cy / rc * hy;
            let norm = n1.hypot(n2);
            total += halfplane_fraction(n1 / norm, n2 / norm, (r - rc) / norm);
        }
    }
    total / (SUBCELLS * SUBCELLS) as f64
}

/// Area of `{(u, v) ∈ [-½, ½]² : n₁u + n₂v <= t}` for a unit normal.
fn halfplane_fraction(n1: f64, n2: f64, t: f64) -> f64 {
    let (a, b) = {
        let (p, q) = (n1.abs(), n2.abs());
        if p <= q {
            (p, q)
        } else {
            (q, p)
        }
    };
    let half = 0.5 * (a + b);
    if t <= -half {
        0.0
    } else if t >= half {
        1.0
    } else if t.abs() <= 0.5 * (b - a) {
        0.5 + t / b
    } else if t > 0.0 {
        1.0 - (half - t).powi(2) / (2.0 * a * b)
    } else {
        (half + t).powi(2) / (2.0 * a * b)
    }
}

fn check_finite(values: &[f64], what: &str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

fn check_len(grid: &GridSpec, len: usize, what: &str) -> Result<()> {
    if len == grid.len() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{what}: expected {} values, got {len}",
            grid.len()
        )))
    }
}

/// Real field sampled at the nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        check_len(&grid, values.len(), "scalar field")?;
        check_finite(&values, "scalar field")?;
        Ok(ScalarField { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        ScalarField {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: GridSpec, value: f64) -> Self {
        ScalarField {
            grid,
            values: vec![value; grid.len()],
        }
    }

    /// Samples `f` at every node.
    pub fn from_fn(grid: GridSpec, mut f: impl FnMut([f64; 2]) -> f64) -> Self {
        let values = (0..grid.len()).map(|k| f(grid.position(k))).collect();
        ScalarField { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: f64, other: &ScalarField, beta: f64) -> Result<ScalarField> {
        ensure_same_grid(&self.grid, &other.grid, "combine")?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        Ok(ScalarField {
            grid: self.grid,
            values,
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Two-component real field sampled at the nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: GridSpec,
    x: Vec<f64>,
    y: Vec<f64>,
}

impl VectorField {
    pub fn new(grid: GridSpec, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        check_len(&grid, x.len(), "vector field (x)")?;
        check_len(&grid, y.len(), "vector field (y)")?;
        check_finite(&x, "vector field (x)")?;
        check_finite(&y, "vector field (y)")?;
        Ok(VectorField { grid, x, y })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        VectorField {
            grid,
            x: vec![0.0; grid.len()],
            y: vec![0.0; grid.len()],
        }
    }

    pub fn from_fn(grid: GridSpec, mut f: impl FnMut([f64; 2]) -> [f64; 2]) -> Self {
        let (x, y) = (0..grid.len()).map(|k| f(grid.position(k))).map(|v| (v[0], v[1])).unzip();
        VectorField { grid, x, y }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn at(&self, i: usize, j: usize) -> [f64; 2] {
        let k = self.grid.index(i, j);
        [self.x[k], self.y[k]]
    }

    /// Pointwise magnitude `|A|`.
    pub fn magnitude(&self) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.x.iter().zip(&self.y).map(|(a, b)| a.hypot(*b)).collect(),
        }
    }

    /// Pointwise `|A|²`.
    pub fn magnitude_sq(&self) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.x.iter().zip(&self.y).map(|(a, b)| a * a + b * b).collect(),
        }
    }

    pub fn combine(&self, alpha: f64, other: &VectorField, beta: f64) -> Result<VectorField> {
        ensure_same_grid(&self.grid, &other.grid, "combine")?;
        let mix = |p: &[f64], q: &[f64]| -> Vec<f64> {
            p.iter().zip(q).map(|(a, b)| alpha * a + beta * b).collect()
        };
        Ok(VectorField {
            grid: self.grid,
            x: mix(&self.x, &other.x),
            y: mix(&self.y, &other.y),
        })
    }
}

/// Complex wave function sampled at the nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl WaveField {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        check_len(&grid, values.len(), "wave field")?;
        if !values.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite("wave field".into()));
        }
        Ok(WaveField { grid, values })
    }

    pub fn constant(grid: GridSpec, value: Complex64) -> Self {
        WaveField {
            grid,
            values: vec![value; grid.len()],
        }
    }

    pub fn from_fn(grid: GridSpec, mut f: impl FnMut([f64; 2]) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|k| f(grid.position(k))).collect();
        WaveField { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn modulus(&self) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().map(|z| z.norm()).collect(),
        }
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Bilinear interpolation at an arbitrary point of the square.
    pub fn interpolate(&self, p: [f64; 2]) -> Complex64 {
        let (i, s) = cell_of(&self.grid, p[0]);
        let (j, t) = cell_of(&self.grid, p[1]);
        let v00 = self.at(i, j);
        let v10 = self.at(i + 1, j);
        let v01 = self.at(i, j + 1);
        let v11 = self.at(i + 1, j + 1);
        v00 * ((1.0 - s) * (1.0 - t)) + v10 * (s * (1.0 - t)) + v01 * ((1.0 - s) * t) + v11 * (s * t)
    }
}

fn cell_of(grid: &GridSpec, x: f64) -> (usize, f64) {
    let u = (x + grid.halfwidth()) / grid.spacing();
    let i = (u.floor().max(0.0) as usize).min(grid.points() - 2);
    (i, (u - i as f64).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Axis {
    X,
    Y,
}

/// Second-order derivative along one axis: central in the interior,
/// one-sided three-point at both ends.
fn derivative(grid: &GridSpec, f: &[f64], axis: Axis) -> Vec<f64> {
    let n = grid.points();
    let inv2a = 1.0 / (2.0 * grid.spacing());
    let (stride, step) = match axis {
        Axis::X => (n, 1),
        Axis::Y => (1, n),
    };
    let mut out = vec![0.0; f.len()];
    for line in 0..n {
        let base = line * stride;
        let at = |m: usize| f[base + m * step];
        out[base] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) * inv2a;
        for m in 1..n - 1 {
            out[base + m * step] = (at(m + 1) - at(m - 1)) * inv2a;
        }
        out[base + (n - 1) * step] = (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) * inv2a;
    }
    out
}

/// `∂₁A₂ − ∂₂A₁`.
pub fn curl2d(a: &VectorField) -> ScalarField {
    let d1a2 = derivative(&a.grid, &a.y, Axis::X);
    let d2a1 = derivative(&a.grid, &a.x, Axis::Y);
    ScalarField {
        grid: a.grid,
        values: d1a2.iter().zip(&d2a1).map(|(p, q)| p - q).collect(),
    }
}

/// `∂₁A₁ + ∂₂A₂`.
pub fn div2d(a: &VectorField) -> ScalarField {
    let d1a1 = derivative(&a.grid, &a.x, Axis::X);
    let d2a2 = derivative(&a.grid, &a.y, Axis::Y);
    ScalarField {
        grid: a.grid,
        values: d1a1.iter().zip(&d2a2).map(|(p, q)| p + q).collect(),
    }
}

/// `∇⊥w = (−∂₂w, ∂₁w)`.
pub fn grad_perp(w: &ScalarField) -> VectorField {
    let d2 = derivative(&w.grid, &w.values, Axis::Y);
    VectorField {
        grid: w.grid,
        x: d2.into_iter().map(|v| -v).collect(),
        y: derivative(&w.grid, &w.values, Axis::X),
    }
}

/// `∇w = (∂₁w, ∂₂w)`.
pub fn grad(w: &ScalarField) -> VectorField {
    VectorField {
        grid: w.grid,
        x: derivative(&w.grid, &w.values, Axis::X),
        y: derivative(&w.grid, &w.values, Axis::Y),
    }
}

/// Quadrature of `f` over `region` with the weights of [`GridSpec::node_weights`].
pub fn integrate(f: &ScalarField, region: &Region) -> Result<f64> {
    let w = f.grid.node_weights(region)?;
    Ok(weighted_sum(&w, &f.values))
}

/// Fixed-order dot product; every reduction in the crate goes through here or
/// an equally ordered loop so results do not depend on scheduling.
pub(crate) fn weighted_sum(w: &[f64], f: &[f64]) -> f64 {
    w.iter().zip(f).map(|(a, b)| a * b).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

/// L¹ and L² by quadrature of `|f|` and `f²`; L^∞ as the maximum over nodes in the region.
pub fn norms(f: &ScalarField, region: &Region) -> Result<Norms> {
    let w = f.grid.node_weights(region)?;
    let mut l1 = 0.0;
    let mut l2 = 0.0;
    let mut linf: f64 = 0.0;
    for (k, (&wk, &v)) in w.iter().zip(&f.values).enumerate() {
        l1 += wk * v.abs();
        l2 += wk * v * v;
        if region.contains(f.grid.position(k)) {
            linf = linf.max(v.abs());
        }
    }
    Ok(Norms {
        l1,
        l2: l2.sqrt(),
        linf,
    })
}

/// Norms of the pointwise magnitude `|A|`.
pub fn vector_norms(a: &VectorField, region: &Region) -> Result<Norms> {
    norms(&a.magnitude(), region)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn max_interior_abs(f: &ScalarField) -> f64 {
        let g = f.grid();
        let n = g.points();
        let mut m: f64 = 0.0;
        for j in 1..n - 1 {
            for i in 1..n - 1 {
                m = m.max(f.at(i, j).abs());
            }
        }
        m
    }

    #[test]
    fn spacing_follows_point_count() {
        assert_eq!(GridSpec::relaxed(1.0, 3).unwrap().spacing(), 1.0);
        assert_eq!(GridSpec::new(12.0, 257).unwrap().spacing(), 0.09375);
        assert!(GridSpec::new(12.0, 15).is_err());
        assert!(GridSpec::new(f64::NAN, 65).is_err());
        assert!(GridSpec::new(-1.0, 65).is_err());
        assert!(GridSpec::relaxed(1.0, 2).is_err());
    }

    #[test]
    fn odd_grids_put_origin_on_a_node() {
        let g = GridSpec::new(3.0, 33).unwrap();
        assert_eq!(g.node(16, 16), [0.0, 0.0]);
        assert_eq!(g.coord(0), -3.0);
        assert_eq!(g.coord(32), 3.0);
        assert_eq!(g.coord(4), -g.coord(28));
    }

    #[test]
    fn with_spacing_picks_odd_count() {
        let g = GridSpec::with_spacing(30.0, 0.25).unwrap();
        assert_eq!(g.points() % 2, 1);
        assert!(g.spacing() <= 0.25);
    }

    #[test]
    fn curl_and_div_of_rotation() {
        let g = GridSpec::new(2.0, 21).unwrap();
        let a = VectorField::from_fn(g, |[x, y]| [-y, x]);
        let c = curl2d(&a);
        let d = div2d(&a);
        for k in 0..g.len() {
            assert_relative_eq!(c.values()[k], 2.0, epsilon = 1e-12);
            assert!(d.values()[k].abs() < 1e-12);
        }
        let r = VectorField::from_fn(g, |[x, y]| [x, y]);
        assert!(div2d(&r).values().iter().all(|v| (v - 2.0).abs() < 1e-12));
    }

    #[test]
    fn curl_of_gradient_vanishes() {
        let g = GridSpec::new(2.0, 25).unwrap();
        let chi = ScalarField::from_fn(g, |[x, y]| x * x + y * y);
        let c = curl2d(&grad(&chi));
        assert!(max_interior_abs(&c) < 1e-12);
    }

    #[test]
    fn grad_perp_of_linear_and_quadratic() {
        let g = GridSpec::new(1.5, 17).unwrap();
        let a = grad_perp(&ScalarField::from_fn(g, |[x, _]| x));
        assert!(a.x().iter().all(|v| v.abs() < 1e-12));
        assert!(a.y().iter().all(|v| (v - 1.0).abs() < 1e-12));
        let q = grad_perp(&ScalarField::from_fn(g, |[x, y]| 0.5 * (x * x + y * y)));
        for k in 0..g.len() {
            let [x, y] = g.position(k);
            assert!((q.x()[k] + y).abs() < 1e-12);
            assert!((q.y()[k] - x).abs() < 1e-12);
        }
    }

    #[test]
    fn div_of_grad_perp_is_discretely_zero() {
        let g = GridSpec::new(3.0, 31).unwrap();
        let w = ScalarField::from_fn(g, |[x, y]| (1.3 * x).sin() * (0.7 * y).cos() + x * x * y);
        let d = div2d(&grad_perp(&w));
        assert!(d.max_abs() < 1e-12 * (1.0 + w.max_abs()) / g.spacing().powi(2));
    }

    #[test]
    fn square_area_and_odd_moment() {
        let g = GridSpec::new(2.0, 41).unwrap();
        let one = ScalarField::constant(g, 1.0);
        assert!((integrate(&one, &Region::FullSquare).unwrap() - 16.0).abs() < 1e-12);
        let x1 = ScalarField::from_fn(g, |[x, _]| x);
        assert!(integrate(&x1, &Region::FullSquare).unwrap().abs() < 1e-12);
    }

    #[test]
    fn disk_area() {
        let g = GridSpec::new(4.0, 513).unwrap();
        let one = ScalarField::constant(g, 1.0);
        let area = integrate(&one, &Region::ball(1.0)).unwrap();
        assert!((area - std::f64::consts::PI).abs() < 1e-3, "{area}");
    }

    #[test]
    fn annulus_is_difference_of_balls() {
        let g = GridSpec::new(4.0, 65).unwrap();
        let f = ScalarField::from_fn(g, |[x, y]| 1.0 + x * y + y);
        let outer = integrate(&f, &Region::ball(3.0)).unwrap();
        let inner = integrate(&f, &Region::ball(1.5)).unwrap();
        let ring = integrate(&f, &Region::annulus(1.5, 3.0)).unwrap();
        assert_relative_eq!(ring, outer - inner, max_relative = 1e-13);
    }

    #[test]
    fn region_validation() {
        let g = GridSpec::new(4.0, 33).unwrap();
        assert!(matches!(
            Region::ball(4.5).check(&g),
            Err(Error::RegionOutOfRange(_))
        ));
        assert!(Region::ball(4.0).check(&g).is_ok());
        assert!(Region::annulus(2.0, 1.0).check(&g).is_err());
        assert!(Region::ball(0.0).check(&g).is_err());
    }

    #[test]
    fn norms_of_constants() {
        let g = GridSpec::new(1.0, 17).unwrap();
        let n = norms(&ScalarField::constant(g, 1.0), &Region::FullSquare).unwrap();
        assert_relative_eq!(n.l1, 4.0, epsilon = 1e-12);
        assert_relative_eq!(n.l2, 2.0, epsilon = 1e-12);
        assert_eq!(n.linf, 1.0);
        let z = norms(&ScalarField::zeros(g), &Region::FullSquare).unwrap();
        assert_eq!((z.l1, z.l2, z.linf), (0.0, 0.0, 0.0));
    }

    #[test]
    fn gaussian_l1_norm() {
        let g = GridSpec::new(12.0, 257).unwrap();
        let f = ScalarField::from_fn(g, |[x, y]| (-(x * x + y * y)).exp());
        let n = norms(&f, &Region::FullSquare).unwrap();
        assert!((n.l1 - std::f64::consts::PI).abs() < 1e-6, "{}", n.l1);
        assert_eq!(n.linf, 1.0);
    }

    #[test]
    fn halfplane_fraction_limits() {
        assert_eq!(halfplane_fraction(1.0, 0.0, 0.0), 0.5);
        assert_eq!(halfplane_fraction(0.6, 0.8, 10.0), 1.0);
        assert_eq!(halfplane_fraction(0.6, 0.8, -10.0), 0.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // Diagonal cut through a corner triangle of legs 1/2.
        assert_relative_eq!(halfplane_fraction(s, s, 0.0), 0.5, epsilon = 1e-15);
        assert_relative_eq!(halfplane_fraction(s, s, -0.5 * s), 0.125, epsilon = 1e-15);
    }

    #[test]
    fn interpolation_reproduces_bilinear_functions() {
        let g = GridSpec::new(2.0, 17).unwrap();
        let psi = WaveField::from_fn(g, |[x, y]| Complex64::new(1.0 + x - 2.0 * y, x * y));
        let z = psi.interpolate([0.37, -1.11]);
        assert_relative_eq!(z.re, 1.0 + 0.37 + 2.22, epsilon = 1e-12);
        assert_relative_eq!(z.im, 0.37 * -1.11, epsilon = 1e-12);
    }
}

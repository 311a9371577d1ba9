//! Catalog of magnetic fields with closed-form flux and, for radial pieces,
//! closed-form circulation potentials.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{integrate, norms, GridSpec, Region, ScalarField};

/// A magnetic field `B` on the plane.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldSpec {
    Constant {
        strength: f64,
    },
    /// `amplitude · exp(−|x − c|² / 2σ²)`; `σ = 1/√2` gives `e^{−|x|²}`.
    Gaussian {
        amplitude: f64,
        sigma: f64,
        center: [f64; 2],
    },
    /// `amplitude · (1 − |x − c|²/r₀²)²` inside `|x − c| < r₀`, zero outside.
    Bump {
        amplitude: f64,
        radius: f64,
        center: [f64; 2],
    },
    /// Gaussian of `+amplitude` at `(+c, 0)` and of `−amplitude` at `(−c, 0)`.
    Dipole {
        amplitude: f64,
        sigma: f64,
        half_separation: f64,
    },
    Custom(ScalarField),
}

/// Total flux `∫_{ℝ²} B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum Flux {
    Finite(f64),
    Unbounded,
}

impl Flux {
    pub fn finite(self) -> Option<f64> {
        match self {
            Flux::Finite(v) => Some(v),
            Flux::Unbounded => None,
        }
    }
}

/// Which hypotheses of the finite-energy characterization the sampled field meets
/// on the truncated domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub l1: f64,
    pub linf: f64,
    pub sign_constant: bool,
    pub nonnegative: bool,
    pub flux: Flux,
}

/// Radial profile `B(r)` of a single rotationally symmetric piece.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialProfile {
    Constant(f64),
    Gaussian { amplitude: f64, sigma: f64 },
    Bump { amplitude: f64, radius: f64 },
}

impl RadialProfile {
    pub fn value(&self, r: f64) -> f64 {
        match *self {
            RadialProfile::Constant(b) => b,
            RadialProfile::Gaussian { amplitude, sigma } => {
                amplitude * (-r * r / (2.0 * sigma * sigma)).exp()
            }
            RadialProfile::Bump { amplitude, radius } => {
                if r < radius {
                    let s = 1.0 - r * r / (radius * radius);
                    amplitude * s * s
                } else {
                    0.0
                }
            }
        }
    }

    /// Closed form of `(1/r) ∫₀^r s B(s) ds`, the tangential potential.
    pub fn circulation(&self, r: f64) -> f64 {
        if r == 0.0 {
            return 0.0;
        }
        let moment = match *self {
            RadialProfile::Constant(b) => 0.5 * b * r * r,
            RadialProfile::Gaussian { amplitude, sigma } => {
                let s2 = sigma * sigma;
                // -expm1 keeps precision for r ≪ σ.
                -amplitude * s2 * (-r * r / (2.0 * s2)).exp_m1()
            }
            RadialProfile::Bump { amplitude, radius } => {
                let rr = r.min(radius);
                let r2 = rr * rr;
                let q2 = radius * radius;
                amplitude * (0.5 * r2 - r2 * r2 / (2.0 * q2) + r2 * r2 * r2 / (6.0 * q2 * q2))
            }
        };
        moment / r
    }
}

impl FieldSpec {
    /// The unit Gaussian `e^{−|x|²}` of total flux π.
    pub fn unit_gaussian() -> Self {
        FieldSpec::Gaussian {
            amplitude: 1.0,
            sigma: std::f64::consts::FRAC_1_SQRT_2,
            center: [0.0, 0.0],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, what: &str| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{what} must be positive, got {v}")))
            }
        };
        let finite = |v: f64, what: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{what} must be finite")))
            }
        };
        match self {
            FieldSpec::Constant { strength } => finite(*strength, "strength"),
            FieldSpec::Gaussian {
                amplitude,
                sigma,
                center,
            } => {
                finite(*amplitude, "amplitude")?;
                finite(center[0], "center")?;
                finite(center[1], "center")?;
                positive(*sigma, "sigma")
            }
            FieldSpec::Bump {
                amplitude,
                radius,
                center,
            } => {
                finite(*amplitude, "amplitude")?;
                finite(center[0], "center")?;
                finite(center[1], "center")?;
                positive(*radius, "radius")
            }
            FieldSpec::Dipole {
                amplitude,
                sigma,
                half_separation,
            } => {
                finite(*amplitude, "amplitude")?;
                positive(*sigma, "sigma")?;
                positive(*half_separation, "half_separation")
            }
            FieldSpec::Custom(_) => Ok(()),
        }
    }

    /// One-line description for metadata; custom fields report their grid only.
    pub fn describe(&self) -> String {
        match self {
            FieldSpec::Custom(f) => format!(
                "custom(halfwidth={}, points={})",
                f.grid().halfwidth(),
                f.grid().points()
            ),
            other => format!("{other:?}"),
        }
    }

    /// Rotationally symmetric pieces `(center, profile)` whose sum is the field.
    /// `None` for custom fields.
    pub fn radial_pieces(&self) -> Option<Vec<([f64; 2], RadialProfile)>> {
        Some(match *self {
            FieldSpec::Constant { strength } => vec![([0.0, 0.0], RadialProfile::Constant(strength))],
            FieldSpec::Gaussian {
                amplitude,
                sigma,
                center,
            } => vec![(center, RadialProfile::Gaussian { amplitude, sigma })],
            FieldSpec::Bump {
                amplitude,
                radius,
                center,
            } => vec![(center, RadialProfile::Bump { amplitude, radius })],
            FieldSpec::Dipole {
                amplitude,
                sigma,
                half_separation,
            } => vec![
                (
                    [half_separation, 0.0],
                    RadialProfile::Gaussian { amplitude, sigma },
                ),
                (
                    [-half_separation, 0.0],
                    RadialProfile::Gaussian {
                        amplitude: -amplitude,
                        sigma,
                    },
                ),
            ],
            FieldSpec::Custom(_) => return None,
        })
    }

    /// Pointwise value; custom fields have no pointwise formula.
    pub fn value(&self, x: [f64; 2]) -> Option<f64> {
        let pieces = self.radial_pieces()?;
        Some(
            pieces
                .iter()
                .map(|(c, p)| p.value((x[0] - c[0]).hypot(x[1] - c[1])))
                .sum(),
        )
    }

    /// Coulomb-gauge potential from the closed-form circulation of each radial
    /// piece, `A(x) = Σ A_θ(|x − c|) e_θ`. Counterclockwise for positive flux.
    pub fn analytic_potential(&self, x: [f64; 2]) -> Option<[f64; 2]> {
        let pieces = self.radial_pieces()?;
        let mut a = [0.0, 0.0];
        for (c, p) in &pieces {
            let dx = x[0] - c[0];
            let dy = x[1] - c[1];
            let r = dx.hypot(dy);
            if r == 0.0 {
                continue;
            }
            let at = p.circulation(r);
            a[0] -= at * dy / r;
            a[1] += at * dx / r;
        }
        Some(a)
    }
}

/// Samples the field at the nodes of `grid`.
pub fn sample_field(spec: &FieldSpec, grid: &GridSpec) -> Result<ScalarField> {
    spec.validate()?;
    match spec {
        FieldSpec::Custom(f) => {
            if f.grid() != grid {
                return Err(Error::GridMismatch(format!(
                    "custom field lives on ({}, {}), requested ({}, {})",
                    f.grid().halfwidth(),
                    f.grid().points(),
                    grid.halfwidth(),
                    grid.points()
                )));
            }
            Ok(f.clone())
        }
        _ => Ok(ScalarField::from_fn(*grid, |x| {
            spec.value(x).expect("non-custom field has a formula")
        })),
    }
}

/// Flux over the whole plane; custom fields are integrated over their grid.
pub fn total_flux(spec: &FieldSpec) -> Flux {
    match *spec {
        FieldSpec::Constant { strength: 0.0 } => Flux::Finite(0.0),
        FieldSpec::Constant { .. } => Flux::Unbounded,
        FieldSpec::Gaussian {
            amplitude, sigma, ..
        } => Flux::Finite(amplitude * 2.0 * PI * sigma * sigma),
        FieldSpec::Bump {
            amplitude, radius, ..
        } => Flux::Finite(amplitude * PI * radius * radius / 3.0),
        FieldSpec::Dipole { .. } => Flux::Finite(0.0),
        FieldSpec::Custom(ref f) => Flux::Finite(
            integrate(f, &Region::FullSquare).expect("full square always fits"),
        ),
    }
}

pub fn hypothesis_report(spec: &FieldSpec, grid: &GridSpec) -> Result<HypothesisReport> {
    let b = sample_field(spec, grid)?;
    let n = norms(&b, &Region::FullSquare)?;
    let nonnegative = b.values().iter().all(|&v| v >= 0.0);
    let nonpositive = b.values().iter().all(|&v| v <= 0.0);
    Ok(HypothesisReport {
        l1: n.l1,
        linf: n.linf,
        sign_constant: nonnegative || nonpositive,
        nonnegative,
        flux: total_flux(spec),
    })
}

//! Two-mode Gaussian states built from two squeezed vacua and a beam splitter.
//!
//! A zero-mean real Gaussian state is described by the matrix `σ` of its
//! wavefunction exponent, `G(x₁, x₂) = |σ|^{1/4} π^{-1/2} exp(-xᵀσx/2)`.
//! Vacuum is `σ = I`, and `σ⁻¹` is twice the x-quadrature covariance.
//!
//! The squeezers feed `diag(e^{2r₁}, e^{2r₂})` and the beam splitter conjugates
//! it by a rotation, so
//!
//! ```text
//! σ11 = R e^{2r₁} + T e^{2r₂}
//! σ12 = √(RT) (e^{2r₁} - e^{2r₂})
//! σ22 = T e^{2r₁} + R e^{2r₂}
//! ```
//!
//! Mode 1 is the one sent to the photon counter.

use std::f64::consts::LN_10;

use crate::{Error, Result};

/// Largest accepted `|r|` (about 43 dB).
pub const MAX_SQUEEZING: f64 = 5.0;

/// Squeezing parameters of the two input squeezed vacua `S(r₁)|0⟩ ⊗ S(r₂)|0⟩`.
///
/// Positive `r` squeezes the x quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezerPair {
    r1: f64,
    r2: f64,
}

impl SqueezerPair {
    pub fn new(r1: f64, r2: f64) -> Result<SqueezerPair> {
        for (name, r) in [("r1", r1), ("r2", r2)] {
            if !r.is_finite() || r.abs() > MAX_SQUEEZING {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {r} outside [-{MAX_SQUEEZING}, {MAX_SQUEEZING}]"
                )));
            }
        }
        Ok(SqueezerPair { r1, r2 })
    }

    /// Orthogonally squeezed pair `(r, -r)`.
    pub fn opposed(r: f64) -> Result<SqueezerPair> {
        SqueezerPair::new(r, -r)
    }

    /// Orthogonally squeezed pair at the given squeezing level in dB.
    pub fn opposed_db(level_db: f64) -> Result<SqueezerPair> {
        SqueezerPair::opposed(db_to_r(level_db))
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    pub fn r2(&self) -> f64 {
        self.r2
    }

    /// Scale factors `(e^{r₁}, e^{r₂})`.
    pub fn scale_factors(&self) -> (f64, f64) {
        (self.r1.exp(), self.r2.exp())
    }
}

/// Lossless beam splitter with power reflectance `R` and transmittance `1 - R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitter {
    reflectance: f64,
}

impl BeamSplitter {
    pub fn new(reflectance: f64) -> Result<BeamSplitter> {
        if !(0.0..=1.0).contains(&reflectance) {
            return Err(Error::InvalidParameter(format!(
                "reflectance {reflectance} outside [0, 1]"
            )));
        }
        Ok(BeamSplitter { reflectance })
    }

    pub fn reflectance(&self) -> f64 {
        self.reflectance
    }

    pub fn transmittance(&self) -> f64 {
        1.0 - self.reflectance
    }
}

/// Real symmetric positive-definite 2×2 matrix `[[s11, s12], [s12, s22]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaMatrix {
    s11: f64,
    s12: f64,
    s22: f64,
}

impl SigmaMatrix {
    pub fn new(s11: f64, s12: f64, s22: f64) -> Result<SigmaMatrix> {
        let m = SigmaMatrix { s11, s12, s22 };
        if !(s11.is_finite() && s12.is_finite() && s22.is_finite()) {
            return Err(Error::InvalidParameter("non-finite sigma entry".into()));
        }
        if s11 <= 0.0 || m.det() <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "sigma = [[{s11}, {s12}], [{s12}, {s22}]] is not positive definite"
            )));
        }
        Ok(m)
    }

    pub fn identity() -> SigmaMatrix {
        SigmaMatrix {
            s11: 1.0,
            s12: 0.0,
            s22: 1.0,
        }
    }

    pub fn s11(&self) -> f64 {
        self.s11
    }

    pub fn s12(&self) -> f64 {
        self.s12
    }

    pub fn s22(&self) -> f64 {
        self.s22
    }

    /// Determinant, with the `s12²` rounding error compensated.
    pub fn det(&self) -> f64 {
        let p = self.s12 * self.s12;
        let p_err = self.s12.mul_add(self.s12, -p);
        self.s11.mul_add(self.s22, -p) - p_err
    }

    pub fn trace(&self) -> f64 {
        self.s11 + self.s22
    }

    pub fn inverse(&self) -> SigmaMatrix {
        let d = self.det();
        SigmaMatrix {
            s11: self.s22 / d,
            s12: -self.s12 / d,
            s22: self.s11 / d,
        }
    }

    pub fn to_array(&self) -> [[f64; 2]; 2] {
        [[self.s11, self.s12], [self.s12, self.s22]]
    }

    /// Plain matrix product.
    pub fn matmul(&self, other: &SigmaMatrix) -> [[f64; 2]; 2] {
        let a = self.to_array();
        let b = other.to_array();
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        out
    }

    /// `σ11 - 1`, the residual of the photon-subtraction condition.
    pub fn gps_residual(&self) -> f64 {
        self.s11 - 1.0
    }
}

/// Zero-mean two-mode Gaussian state.
///
/// Displacements are kept at zero: the heralded states of interest are
/// real cat states, which only need centred Gaussians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianStateSpec {
    pub sigma: SigmaMatrix,
}

impl GaussianStateSpec {
    pub fn new(sigma: SigmaMatrix) -> GaussianStateSpec {
        GaussianStateSpec { sigma }
    }

    pub fn from_inputs(sq: SqueezerPair, bs: BeamSplitter) -> GaussianStateSpec {
        GaussianStateSpec::new(build_sigma(sq, bs))
    }

    /// Displacement in x.
    pub fn mu(&self) -> [f64; 2] {
        [0.0; 2]
    }

    /// Displacement in p.
    pub fn nu(&self) -> [f64; 2] {
        [0.0; 2]
    }

    /// Two-mode wavefunction `G(x₁, x₂)`.
    pub fn wavefunction(&self, x1: f64, x2: f64) -> f64 {
        let s = &self.sigma;
        let q = s.s11 * x1 * x1 + 2.0 * s.s12 * x1 * x2 + s.s22 * x2 * x2;
        s.det().powf(0.25) / std::f64::consts::PI.sqrt() * (-0.5 * q).exp()
    }
}

fn rotate_diagonal(d1: f64, d2: f64, bs: BeamSplitter) -> SigmaMatrix {
    let r = bs.reflectance();
    let t = bs.transmittance();
    SigmaMatrix {
        s11: r * d1 + t * d2,
        s12: (r * t).sqrt() * (d1 - d2),
        s22: t * d1 + r * d2,
    }
}

/// `σ` of the state leaving the beam splitter.
pub fn build_sigma(sq: SqueezerPair, bs: BeamSplitter) -> SigmaMatrix {
    rotate_diagonal((2.0 * sq.r1).exp(), (2.0 * sq.r2).exp(), bs)
}

/// `σ⁻¹`, twice the x-quadrature covariance of the same state.
///
/// Uses the rotation orientation of [`build_sigma`], so the off-diagonal is
/// `√(RT) (e^{-2r₁} - e^{-2r₂})`.
pub fn build_sigma_inverse(sq: SqueezerPair, bs: BeamSplitter) -> SigmaMatrix {
    rotate_diagonal((-2.0 * sq.r1).exp(), (-2.0 * sq.r2).exp(), bs)
}

/// Reflectance that puts the detected mode at `σ11 = 1`:
/// `R = (1 - e^{2r₂}) / (e^{2r₁} - e^{2r₂})`.
///
/// A solution in `(0, 1)` exists exactly when `r₁ r₂ < 0`.
pub fn solve_reflectance(sq: SqueezerPair) -> Result<BeamSplitter> {
    if !(sq.r1 * sq.r2 < 0.0) {
        return Err(Error::NoSolution {
            r1: sq.r1,
            r2: sq.r2,
        });
    }
    let e1 = (2.0 * sq.r1).exp_m1();
    let e2 = (2.0 * sq.r2).exp_m1();
    BeamSplitter::new(-e2 / (e1 - e2))
}

/// Reflectance that puts the detected mode at a chosen `σ11`:
/// `R = (σ11 - e^{2r₂}) / (e^{2r₁} - e^{2r₂})`.
pub fn reflectance_for_sigma11(sq: SqueezerPair, s11: f64) -> Result<BeamSplitter> {
    let e1 = (2.0 * sq.r1).exp();
    let e2 = (2.0 * sq.r2).exp();
    let refl = (s11 - e2) / (e1 - e2);
    if sq.r1 == sq.r2 || !(0.0..=1.0).contains(&refl) {
        return Err(Error::NoSolution {
            r1: sq.r1,
            r2: sq.r2,
        });
    }
    BeamSplitter::new(refl)
}

/// Output squeezing `r_c` with `e^{2r_c} = |σ| + σ22`.
pub fn output_squeezing(sigma: &SigmaMatrix) -> f64 {
    0.5 * (sigma.det() + sigma.s22).ln()
}

/// Output squeezing at `σ11 = 1` in terms of the inputs:
/// `e^{2r_c} = e^{2(r₁+r₂)} + e^{2r₁} + e^{2r₂} - 1`.
pub fn output_squeezing_from_inputs(sq: SqueezerPair) -> f64 {
    let e = (2.0 * (sq.r1 + sq.r2)).exp() + (2.0 * sq.r1).exp() + (2.0 * sq.r2).exp_m1();
    0.5 * e.ln()
}

/// Matrix `σ̃` of the p-representation wavefunction `exp(-pᵀσ̃p/2)`.
///
/// The two-dimensional Fourier transform of `exp(-xᵀσx/2)` is
/// `exp(-pᵀσ⁻¹p/2)`, so `σ̃ = σ⁻¹`. For `σ` from [`build_sigma`] this is the
/// same matrix with the squeezing signs inverted.
pub fn p_domain_sigma(sigma: &SigmaMatrix) -> SigmaMatrix {
    sigma.inverse()
}

/// Squeezing parameter for a level in dB, `10 log₁₀ e^{2r}`.
pub fn db_to_r(level_db: f64) -> f64 {
    level_db * LN_10 / 20.0
}

pub fn r_to_db(r: f64) -> f64 {
    20.0 * r / LN_10
}

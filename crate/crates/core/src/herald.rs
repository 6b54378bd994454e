//! Heralded states: detect `n` photons in mode 1 of a two-mode Gaussian
//! state and keep mode 2.
//!
//! The unnormalized heralded wavefunction is `Ψ_n(x₂) = ∫ G(x₁, x₂) φ_n(x₁) dx₁`
//! and `P(n) = ∫ Ψ_n² dx₂`. Completing the square in `x₁` gives
//!
//! ```text
//! Ψ_n(x₂) = |σ|^{1/4} φ_0(√(|σ|/σ11) x₂) I_n(-σ12 x₂ / σ11)
//! I_n(x)  = ∫ φ_0(√σ11 (x - y)) φ_n(y) dy
//! ```
//!
//! At `σ11 = 1`, `I_n = φ_0 * φ_n` is known in closed form and the heralded
//! state is exactly `xⁿ exp(-(|σ| + σ22) x²/4)`. Away from it `I_n` is
//! evaluated by quadrature.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::gauss_core::{output_squeezing, SigmaMatrix};
use crate::special_fn::{
    eval_phi, integrate, log_factorial, log_gamma_half_integer, vacuum_convolution, QuadratureGrid,
};
use crate::wavefunction::{density_grid, Envelope, Wavefunction};
use crate::{Error, Result};

/// Tolerance on `|σ11 - 1|` for the closed forms.
pub const GPS_TOLERANCE: f64 = 1e-9;

/// Below this `|σ11 - 1|` the general path logs a warning: the caller is
/// probably aiming for the closed-form regime.
pub const NEAR_GPS_WARNING: f64 = 1e-6;

/// Probabilities below this are reported as [`Error::ZeroProbability`].
pub const PROBABILITY_FLOOR: f64 = 1e-300;

/// Threshold on [`WaveformShape::oscillation`] above which a waveform counts
/// as oscillating between its outer peaks.
pub const OSCILLATION_THRESHOLD: f64 = 0.05;

fn check_gps(sigma: &SigmaMatrix) -> Result<()> {
    if (sigma.s11() - 1.0).abs() < GPS_TOLERANCE {
        Ok(())
    } else {
        Err(Error::ConditionViolated { s11: sigma.s11() })
    }
}

/// `a` such that `Ψ_n(x)² ∝ e^{-a x²} · poly(x)`:
/// `a = |σ|/σ11 + σ12² / (σ11 (1 + σ11))`, which is `(|σ| + σ22)/2` at
/// `σ11 = 1`.
pub fn density_exponent(sigma: &SigmaMatrix) -> f64 {
    let s11 = sigma.s11();
    sigma.det() / s11 + sigma.s12() * sigma.s12() / (s11 * (1.0 + s11))
}

fn sign_pow(negative: bool, n: usize) -> f64 {
    if negative && n % 2 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// Closed-form `Ψ_n(x₂)` at `σ11 = 1`:
/// `(|σ|/π)^{1/4} (-σ12)ⁿ / √(2ⁿ n!) · x₂ⁿ · exp(-(|σ| + σ22) x₂²/4)`.
pub fn herald_wavefunction_closed(sigma: &SigmaMatrix, n: usize, x2: f64) -> Result<f64> {
    check_gps(sigma)?;
    let det = sigma.det();
    let gauss = -(det + sigma.s22()) * x2 * x2 / 4.0;
    let base = 0.25 * (det / PI).ln();
    if n == 0 {
        return Ok((base + gauss).exp());
    }
    if x2 == 0.0 || sigma.s12() == 0.0 {
        return Ok(0.0);
    }
    let sign = sign_pow(sigma.s12() > 0.0, n) * sign_pow(x2 < 0.0, n);
    let nf = n as f64;
    let log_mag = base + nf * sigma.s12().abs().ln() - 0.5 * (nf * LN_2 + log_factorial(n))
        + nf * x2.abs().ln()
        + gauss;
    Ok(sign * log_mag.exp())
}

/// `ln P(n)` at `σ11 = 1`.
pub fn ln_prob_closed(sigma: &SigmaMatrix, n: usize) -> Result<f64> {
    check_gps(sigma)?;
    let det = sigma.det();
    let nf = n as f64;
    let s12_term = if n == 0 {
        0.0
    } else {
        2.0 * nf * sigma.s12().abs().ln()
    };
    Ok(
        0.5 * det.ln() + log_factorial(2 * n) - 2.0 * log_factorial(n) + s12_term
            - nf * 8f64.ln()
            - (nf + 0.5) * ((det + sigma.s22()) / 2.0).ln(),
    )
}

/// Success probability at `σ11 = 1`:
/// `P(n) = √|σ| (2n)! σ12^{2n} / (8ⁿ (n!)²) · ((|σ| + σ22)/2)^{-n-1/2}`,
/// evaluated in log space.
pub fn prob_closed(sigma: &SigmaMatrix, n: usize) -> Result<f64> {
    Ok(ln_prob_closed(sigma, n)?.exp())
}

/// `I_n(x) = ∫ φ_0(√s (x - y)) φ_n(y) dy` for `s = σ11`.
pub fn overlap_kernel(s11: f64, n: usize, x: f64) -> Result<f64> {
    if !(s11 > 0.0) {
        return Err(Error::DomainError(format!(
            "sigma11 = {s11} must be positive"
        )));
    }
    // integrand is e^{-(1+s)(y - y0)²/2} times a degree-n polynomial
    let center = s11 * x / (1.0 + s11);
    let grid = QuadratureGrid::for_gaussian(center, 0.5 * (1.0 + s11), n);
    integrate(
        |y| eval_phi(0, s11.sqrt() * (x - y)) * eval_phi(n, y),
        &grid,
    )
}

/// `Ψ_n(x₂)` for any positive-definite `σ`, by quadrature over `x₁`.
pub fn herald_wavefunction_general(sigma: &SigmaMatrix, n: usize, x2: f64) -> Result<f64> {
    let s11 = sigma.s11();
    let det = sigma.det();
    let envelope = det.powf(0.25) * eval_phi(0, (det / s11).sqrt() * x2);
    Ok(envelope * overlap_kernel(s11, n, -sigma.s12() / s11 * x2)?)
}

/// `P(n) = ∫ Ψ_n² dx₂` with `Ψ_n` from [`herald_wavefunction_general`].
pub fn prob_general(sigma: &SigmaMatrix, n: usize) -> Result<f64> {
    let grid =
        QuadratureGrid::for_gaussian(0.0, density_exponent(sigma), 2 * n).with_tolerance(1e-10);
    let mut failure = None;
    let p = integrate(
        |x| match herald_wavefunction_general(sigma, n, x) {
            Ok(v) => v * v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        &grid,
    );
    match failure {
        Some(e) => Err(e),
        None => p,
    }
}

/// Largest absolute gap, over a grid covering `I_n`, between the direct
/// quadrature of `I_n` at `σ11 < 1` and the Gaussian smoothing `g * I_n^{(1)}`
/// with `g(x) = exp(-σ11 x² / (2(1 - σ11))) / √(2π(1 - σ11))`.
pub fn extra_convolution_check(sigma: &SigmaMatrix, n: usize) -> Result<f64> {
    let s = sigma.s11();
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::DomainError(format!(
            "extra convolution needs 0 < sigma11 < 1, got {s}"
        )));
    }
    let c = s / (2.0 * (1.0 - s));
    let norm = 1.0 / (2.0 * PI * (1.0 - s)).sqrt();
    let kernel_exponent = s / (2.0 * (1.0 + s));
    let half_width = Envelope::GaussPoly {
        exponent: kernel_exponent,
        degree: n,
    }
    .half_width();
    let points = 81;
    let mut worst: f64 = 0.0;
    for i in 0..points {
        let x = -half_width + 2.0 * half_width * i as f64 / (points - 1) as f64;
        let direct = overlap_kernel(s, n, x)?;
        // e^{-c(x-y)²} e^{-y²/4} has precision 2(c + 1/4) about c x / (c + 1/4)
        let grid =
            QuadratureGrid::for_gaussian(c * x / (c + 0.25), c + 0.25, n).with_tolerance(1e-10);
        let smoothed = integrate(
            |y| norm * (-c * (x - y) * (x - y)).exp() * vacuum_convolution(n, y),
            &grid,
        )?;
        worst = worst.max((direct - smoothed).abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Path {
    Closed,
    General,
}

/// Result of heralding `n` photons: probability, normalized wavefunction and,
/// at `σ11 = 1`, the output squeezing `r_c`.
#[derive(Debug, Clone)]
pub struct HeraldOutcome {
    sigma: SigmaMatrix,
    n: usize,
    prob: f64,
    r_c: Option<f64>,
    exponent: f64,
    path: Path,
}

/// Herald `n` photons from the state with matrix `sigma`.
pub fn herald(sigma: &SigmaMatrix, n: usize) -> Result<HeraldOutcome> {
    let closed = check_gps(sigma).is_ok();
    let prob = if closed {
        prob_closed(sigma, n)?
    } else {
        if (sigma.s11() - 1.0).abs() < NEAR_GPS_WARNING {
            log::warn!(
                "sigma11 = {} is within {NEAR_GPS_WARNING:e} of 1 but outside the closed-form \
                 tolerance; using quadrature",
                sigma.s11()
            );
        }
        prob_general(sigma, n)?
    };
    if !(prob >= PROBABILITY_FLOOR) {
        return Err(Error::ZeroProbability { prob });
    }
    Ok(HeraldOutcome {
        sigma: *sigma,
        n,
        prob,
        r_c: closed.then(|| output_squeezing(sigma)),
        exponent: density_exponent(sigma),
        path: if closed { Path::Closed } else { Path::General },
    })
}

impl HeraldOutcome {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn prob(&self) -> f64 {
        self.prob
    }

    /// Output squeezing; `None` away from `σ11 = 1`.
    pub fn r_c(&self) -> Option<f64> {
        self.r_c
    }

    pub fn sigma(&self) -> &SigmaMatrix {
        &self.sigma
    }

    /// Whether the closed forms were used.
    pub fn is_closed_form(&self) -> bool {
        self.path == Path::Closed
    }

    /// `a` in `ψ² ∝ e^{-a x²} poly(x)`.
    pub fn density_exponent(&self) -> f64 {
        self.exponent
    }

    /// Normalized `ψ_n(x) = Ψ_n(x) / √P(n)`.
    pub fn psi(&self, x: f64) -> Result<f64> {
        match self.path {
            Path::Closed => Ok(self.psi_closed(x)),
            Path::General => {
                Ok(herald_wavefunction_general(&self.sigma, self.n, x)? / self.prob.sqrt())
            }
        }
    }

    // xⁿ e^{-a x²/2} normalized by ∫ x^{2n} e^{-a x²} = Γ(n + 1/2) a^{-n-1/2}
    fn psi_closed(&self, x: f64) -> f64 {
        let n = self.n;
        let nf = n as f64;
        let a = self.exponent;
        let log_norm = 0.5 * (nf + 0.5) * a.ln() - 0.5 * log_gamma_half_integer(n);
        if n == 0 {
            return (log_norm - 0.5 * a * x * x).exp();
        }
        if x == 0.0 {
            return 0.0;
        }
        let sign = sign_pow(self.sigma.s12() > 0.0, n) * sign_pow(x < 0.0, n);
        sign * (log_norm + nf * x.abs().ln() - 0.5 * a * x * x).exp()
    }

    /// `ψ̃_n(p) = (2π)^{-1/2} ∫ ψ_n(x) e^{-ipx} dx`.
    pub fn psi_tilde(&self, p: f64) -> Result<Complex64> {
        let kappa = 0.5 * self.exponent;
        let omega = p / kappa.sqrt();
        let order = self.n / 2 + 16 + (0.7 * omega * omega).ceil() as usize;
        let grid =
            QuadratureGrid::gauss_hermite(order, 0.0, 1.0 / kappa.sqrt()).with_tolerance(1e-10);
        let xs = grid.abscissae();
        let samples = xs
            .iter()
            .map(|&x| self.psi(x))
            .collect::<Result<Vec<f64>>>()?;
        let refined = grid.refined();
        let fine_samples = refined
            .abscissae()
            .iter()
            .map(|&x| self.psi(x))
            .collect::<Result<Vec<f64>>>()?;
        let transform = |g: &QuadratureGrid, s: &[f64], f: fn(f64) -> f64| -> (f64, f64) {
            g.points()
                .zip(s)
                .fold((0.0, 0.0), |(acc, mass), ((x, w), v)| {
                    let t = w * v * f(p * x);
                    (acc + t, mass + t.abs())
                })
        };
        let mut parts = [0.0; 2];
        for (k, f) in [f64::cos as fn(f64) -> f64, f64::sin]
            .into_iter()
            .enumerate()
        {
            let (coarse, _) = transform(&grid, &samples, f);
            let (fine, mass) = transform(&refined, &fine_samples, f);
            if (coarse - fine).abs() > grid.tolerance() * mass.max(f64::MIN_POSITIVE) {
                return Err(Error::NonConverged {
                    coarse,
                    fine,
                    tolerance: grid.tolerance(),
                });
            }
            parts[k] = fine;
        }
        let scale = 1.0 / (2.0 * PI).sqrt();
        Ok(Complex64::new(scale * parts[0], -scale * parts[1]))
    }

    /// Samples `ψ_n` on `points` evenly spaced abscissae over `±half_width`
    /// and measures its peak structure.
    pub fn waveform_shape(&self, half_width: f64, points: usize) -> Result<WaveformShape> {
        let xs: Vec<f64> = (0..points)
            .map(|i| -half_width + 2.0 * half_width * i as f64 / (points - 1) as f64)
            .collect();
        let values = xs
            .iter()
            .map(|&x| self.psi(x))
            .collect::<Result<Vec<f64>>>()?;
        Ok(WaveformShape::analyze(&xs, &values))
    }
}

impl Wavefunction for HeraldOutcome {
    /// NaN when the quadrature behind the general path fails, which the
    /// integrators downstream report as non-convergence.
    fn amplitude(&self, x: f64) -> f64 {
        self.psi(x).unwrap_or(f64::NAN)
    }

    fn envelope(&self) -> Envelope {
        Envelope::GaussPoly {
            exponent: 0.5 * self.exponent,
            degree: self.n,
        }
    }
}

/// `ψ̃_n(p₂)` of the state heralded from `sigma`.
pub fn p_domain_wavefunction(sigma: &SigmaMatrix, n: usize, p2: f64) -> Result<Complex64> {
    herald(sigma, n)?.psi_tilde(p2)
}

/// `∫ ψ² dx` of a heralded state, by quadrature.
pub fn norm_squared(outcome: &HeraldOutcome) -> Result<f64> {
    let grid = density_grid(&outcome.envelope());
    integrate(|x| outcome.amplitude(x).powi(2), &grid)
}

/// Local maxima of `|ψ|` on a sampled waveform.
///
/// `oscillation` is the largest `|ψ|` among the local maxima strictly
/// between the two outermost ones, divided by the global maximum; zero when
/// there is nothing in between.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveformShape {
    pub peak_positions: Vec<f64>,
    pub oscillation: f64,
}

impl WaveformShape {
    /// Maxima below `1e-9` of the global peak are rounding noise around
    /// exact zeros and are skipped.
    pub fn analyze(xs: &[f64], values: &[f64]) -> WaveformShape {
        let mag: Vec<f64> = values.iter().map(|v| v.abs()).collect();
        let peak = mag.iter().cloned().fold(0.0, f64::max);
        let floor = 1e-9 * peak;
        let maxima: Vec<usize> = (1..mag.len().saturating_sub(1))
            .filter(|&i| mag[i] > mag[i - 1] && mag[i] >= mag[i + 1] && mag[i] > floor)
            .collect();
        let oscillation = if maxima.len() > 2 && peak > 0.0 {
            maxima[1..maxima.len() - 1]
                .iter()
                .map(|&i| mag[i])
                .fold(0.0, f64::max)
                / peak
        } else {
            0.0
        };
        WaveformShape {
            peak_positions: maxima.iter().map(|&i| xs[i]).collect(),
            oscillation,
        }
    }

    pub fn oscillates(&self) -> bool {
        self.oscillation > OSCILLATION_THRESHOLD
    }
}

//! Squeezed cat states and the `xⁿ e^{-s²x²/4}` states that approximate them.
//!
//! `S(r)(|α⟩ + (-1)^k |-α⟩) / N_{α,k}` with real `α > 0`, `s = e^r` and
//! `N_{α,k} = √(2(1 + (-1)^k e^{-2α²}))` has position wavefunction
//!
//! ```text
//! √s π^{-1/4} / N · (e^{-s²(x - √2α/s)²/2} + (-1)^k e^{-s²(x + √2α/s)²/2})
//! ```

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::special_fn::{integrate, log_gamma_half_integer, QuadratureGrid, PI_POW_M14};
use crate::wavefunction::{product_grid, Envelope, Wavefunction};
use crate::{Error, Result};

/// Below this amplitude odd cats are evaluated through their `α → 0` limit,
/// the squeezed single-photon state.
pub const SMALL_ALPHA: f64 = 1e-4;

const DEGENERATE_NORM: f64 = 1e-12;

/// A squeezed cat state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatTarget {
    alpha: f64,
    k: i64,
    r: f64,
}

impl CatTarget {
    pub fn new(alpha: f64, k: i64, r: f64) -> Result<CatTarget> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "cat amplitude must be positive and finite, got {alpha}"
            )));
        }
        if !r.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "squeezing must be finite, got {r}"
            )));
        }
        Ok(CatTarget { alpha, k, r })
    }

    /// The cat that `n` heralded photons approximate: `α = √n`, `k = n`.
    pub fn for_photons(n: usize, r: f64) -> Result<CatTarget> {
        CatTarget::new((n as f64).sqrt(), n as i64, r)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn s(&self) -> f64 {
        self.r.exp()
    }

    pub fn is_odd(&self) -> bool {
        self.k.rem_euclid(2) == 1
    }

    /// `N_{α,k}`.
    pub fn norm_constant(&self) -> f64 {
        let overlap = -2.0 * self.alpha * self.alpha;
        if self.is_odd() {
            (-2.0 * overlap.exp_m1()).sqrt()
        } else {
            (2.0 * (1.0 + overlap.exp())).sqrt()
        }
    }

    // Displacement of each lobe from the origin.
    fn offset(&self) -> f64 {
        SQRT_2 * self.alpha / self.s()
    }

    fn uses_limit(&self) -> bool {
        self.is_odd() && self.alpha < SMALL_ALPHA
    }

    fn check_norm(&self) -> Result<f64> {
        let norm = self.norm_constant();
        if self.is_odd() && norm < DEGENERATE_NORM {
            return Err(Error::DegenerateState(format!(
                "odd cat with alpha = {} has norm {norm:e}",
                self.alpha
            )));
        }
        Ok(norm)
    }
}

/// Position wavefunction of the squeezed cat.
pub fn cat_wavefunction_x(t: &CatTarget, x: f64) -> Result<f64> {
    let s = t.s();
    if t.uses_limit() {
        // √s φ_1(s x)
        return Ok(SQRT_2 * s.powf(1.5) * PI_POW_M14 * x * (-0.5 * s * s * x * x).exp());
    }
    let norm = t.check_norm()?;
    let c = t.offset();
    let prefactor = s.sqrt() * PI_POW_M14 / norm;
    let cross = s * s * c * x;
    if t.is_odd() && cross.abs() < 1.0 {
        // e^{-s²(x-c)²/2} - e^{-s²(x+c)²/2} without cancellation
        let envelope = (-0.5 * s * s * (x * x + c * c)).exp();
        return Ok(prefactor * 2.0 * cross.sinh() * envelope);
    }
    let sign = if t.is_odd() { -1.0 } else { 1.0 };
    let left = (-0.5 * s * s * (x - c) * (x - c)).exp();
    let right = (-0.5 * s * s * (x + c) * (x + c)).exp();
    Ok(prefactor * (left + sign * right))
}

/// Momentum wavefunction `(2π)^{-1/2} ∫ ψ(x) e^{-ipx} dx` of the squeezed
/// cat: `π^{-1/4} / (√s N) · (e^{-i√2αp/s} + (-1)^k e^{i√2αp/s}) e^{-p²/(2s²)}`.
pub fn cat_wavefunction_p(t: &CatTarget, p: f64) -> Result<Complex64> {
    let s = t.s();
    let gauss = (-p * p / (2.0 * s * s)).exp();
    if t.uses_limit() {
        return Ok(Complex64::new(
            0.0,
            -SQRT_2 * PI_POW_M14 * s.powf(-1.5) * p * gauss,
        ));
    }
    let norm = t.check_norm()?;
    let scale = PI_POW_M14 / (s.sqrt() * norm) * gauss;
    let phase = t.offset() * p;
    Ok(if t.is_odd() {
        Complex64::new(0.0, -2.0 * scale * phase.sin())
    } else {
        Complex64::new(2.0 * scale * phase.cos(), 0.0)
    })
}

impl Wavefunction for CatTarget {
    fn amplitude(&self, x: f64) -> f64 {
        cat_wavefunction_x(self, x).unwrap_or(f64::NAN)
    }

    fn envelope(&self) -> Envelope {
        let s = self.s();
        Envelope::Generic {
            half_width: self.offset() + 9.0 / s,
            resolution: 0.5 / s,
        }
    }
}

/// `xⁿ e^{-s²x²/4}`, normalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxTarget {
    n: usize,
    s: f64,
}

impl ApproxTarget {
    pub fn new(n: usize, s: f64) -> Result<ApproxTarget> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "target squeezing factor must be positive, got {s}"
            )));
        }
        Ok(ApproxTarget { n, s })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> f64 {
        self.s
    }
}

impl Wavefunction for ApproxTarget {
    fn amplitude(&self, x: f64) -> f64 {
        approx_target_wavefunction(self.n, self.s, x)
    }

    fn envelope(&self) -> Envelope {
        Envelope::GaussPoly {
            exponent: self.s * self.s / 4.0,
            degree: self.n,
        }
    }
}

/// Normalized `xⁿ e^{-s²x²/4}`. NaN unless `s > 0`.
pub fn approx_target_wavefunction(n: usize, s: f64, x: f64) -> f64 {
    if !(s > 0.0) {
        return f64::NAN;
    }
    // ∫ x^{2n} e^{-a x²} = Γ(n + 1/2) a^{-n-1/2} with a = s²/2
    let a = 0.5 * s * s;
    let nf = n as f64;
    let log_norm = 0.5 * (nf + 0.5) * a.ln() - 0.5 * log_gamma_half_integer(n);
    if n == 0 {
        return (log_norm - 0.5 * a * x * x).exp();
    }
    if x == 0.0 {
        return 0.0;
    }
    let sign = if n % 2 == 1 && x < 0.0 { -1.0 } else { 1.0 };
    sign * (log_norm + nf * x.abs().ln() - 0.5 * a * x * x).exp()
}

/// `|∫ ψ_a ψ_b dx|²` for normalized real wavefunctions, clamped to `[0, 1]`.
pub fn fidelity<A: Wavefunction, B: Wavefunction>(a: &A, b: &B) -> Result<f64> {
    let grid = product_grid(&a.envelope(), &b.envelope());
    let overlap = integrate(|x| a.amplitude(x) * b.amplitude(x), &grid)?;
    Ok((overlap * overlap).min(1.0))
}

/// Best squeezed-cat approximation of a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatFit {
    pub alpha: f64,
    pub r: f64,
    pub fidelity: f64,
}

const FIT_POINTS: usize = 61;

/// Maximizes the fidelity with `S(r)(|α⟩ ± |-α⟩)` (parity of `n_hint`) over
/// `α ∈ [√n/2, 3√n/2]` and `r` within ±0.5 of an estimate from `⟨x²⟩`.
///
/// For `xⁿ e^{-s²x²/4}`, `⟨x²⟩ = (2n + 1)/s²`, which pins `r = ln s`.
pub fn best_cat_fit<W: Wavefunction>(psi: &W, n_hint: usize) -> Result<CatFit> {
    let grid = density_grid_of(psi);
    let second = integrate(|x| x * x * psi.amplitude(x).powi(2), &grid)?;
    if !(second > 0.0) {
        return Err(Error::DegenerateState(format!(
            "second moment {second:e} cannot fix a squeezing estimate"
        )));
    }
    let r_center = 0.5 * ((2 * n_hint + 1) as f64 / second).ln();
    best_cat_fit_near(psi, n_hint, r_center)
}

/// As [`best_cat_fit`], searching `r ∈ [r_center - 0.5, r_center + 0.5]`.
///
/// The box is sampled on a 61×61 grid and the best cell is refined by
/// alternating golden-section searches, so the returned fidelity is never
/// below that at `(√n, r_center)`.
pub fn best_cat_fit_near<W: Wavefunction>(psi: &W, n_hint: usize, r_center: f64) -> Result<CatFit> {
    let root_n = (n_hint.max(1) as f64).sqrt();
    let (a_lo, a_hi) = (0.5 * root_n, 1.5 * root_n);
    let (r_lo, r_hi) = (r_center - 0.5, r_center + 0.5);
    let k = n_hint as i64;

    // one grid wide and fine enough for every candidate in the box
    let widest = CatTarget::new(a_hi, k, r_lo)?.envelope();
    let finest = CatTarget::new(a_hi, k, r_hi)?.envelope();
    let env = psi.envelope();
    let grid = QuadratureGrid::spanning(
        env.half_width().max(widest.half_width()),
        env.resolution().min(finest.resolution()),
    );
    let points: Vec<(f64, f64, f64)> = grid
        .points()
        .map(|(x, w)| (x, w, psi.amplitude(x)))
        .collect();
    if points.iter().any(|p| !p.2.is_finite()) {
        return Err(Error::DomainError(
            "wavefunction is not finite on the fit grid".into(),
        ));
    }
    let score = |alpha: f64, r: f64| -> f64 {
        let Ok(cat) = CatTarget::new(alpha, k, r) else {
            return 0.0;
        };
        let overlap: f64 = points
            .iter()
            .map(|&(x, w, v)| w * v * cat.amplitude(x))
            .sum();
        overlap * overlap
    };

    let step = |lo: f64, hi: f64| (hi - lo) / (FIT_POINTS - 1) as f64;
    let (da, dr) = (step(a_lo, a_hi), step(r_lo, r_hi));
    let cells: Vec<(usize, usize)> = (0..FIT_POINTS)
        .flat_map(|i| (0..FIT_POINTS).map(move |j| (i, j)))
        .collect();
    let scores: Vec<f64> = cells
        .par_iter()
        .map(|&(i, j)| score(a_lo + i as f64 * da, r_lo + j as f64 * dr))
        .collect();
    let (best_cell, _) =
        scores
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (idx, &f)| {
                if f > acc.1 {
                    (idx, f)
                } else {
                    acc
                }
            });
    let (i, j) = cells[best_cell];
    let mut alpha = a_lo + i as f64 * da;
    let mut r = r_lo + j as f64 * dr;
    let mut best = scores[best_cell];

    // alternating line searches walk along the correlated (α, r) ridge
    for _ in 0..200 {
        let before = best;
        let a = golden_max(
            |a| score(a, r),
            (alpha - da).max(a_lo),
            (alpha + da).min(a_hi),
        );
        let f = score(a, r);
        if f > best {
            alpha = a;
            best = f;
        }
        let rr = golden_max(|x| score(alpha, x), (r - dr).max(r_lo), (r + dr).min(r_hi));
        let f = score(alpha, rr);
        if f > best {
            r = rr;
            best = f;
        }
        if best - before <= 1e-15 {
            break;
        }
    }
    let fidelity = fidelity(psi, &CatTarget::new(alpha, k, r)?)?;
    Ok(CatFit { alpha, r, fidelity })
}

fn density_grid_of<W: Wavefunction>(psi: &W) -> QuadratureGrid {
    crate::wavefunction::density_grid(&psi.envelope())
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - ratio * (hi - lo);
    let mut b = lo + ratio * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..60 {
        if hi - lo < 1e-10 {
            break;
        }
        if fa > fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = f(b);
        }
    }
    0.5 * (lo + hi)
}

/// `|FT(ψ)(p)|` of a real wavefunction by direct quadrature against
/// `e^{-ipx}/√(2π)`.
pub fn fourier_modulus<W: Wavefunction>(psi: &W, p: f64) -> Result<f64> {
    let env = psi.envelope();
    let half_width = env.half_width();
    let grid = QuadratureGrid::spanning(half_width, env.resolution().min(0.5 / p.abs().max(1.0)))
        .with_tolerance(1e-10);
    let re = integrate(|x| psi.amplitude(x) * (p * x).cos(), &grid)?;
    let im = integrate(|x| psi.amplitude(x) * (p * x).sin(), &grid)?;
    Ok(re.hypot(im) / (2.0 * PI).sqrt())
}

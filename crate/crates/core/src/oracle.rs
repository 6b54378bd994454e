//! Brute-force heralding in a truncated two-mode Fock space.
//!
//! Squeezed vacua are expanded in number states, mixed by a beam splitter
//! built block by block over total photon number, and projected onto `|n⟩`
//! in mode 1. Nothing here uses the Gaussian closed forms, so agreement with
//! [`crate::herald`] is a real check.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::gauss_core::{db_to_r, SqueezerPair};
use crate::special_fn::{log_double_factorial_ratio, phi_table};
use crate::wavefunction::{Envelope, Wavefunction};
use crate::{Error, Result};

/// Largest tolerated truncation tail.
pub const TAIL_LIMIT: f64 = 1e-6;

/// Per-mode photon cutoff up to 10 dB of input squeezing.
pub const DEFAULT_CUTOFF: usize = 60;

/// Per-mode photon cutoff above 10 dB.
pub const HIGH_SQUEEZING_CUTOFF: usize = 100;

/// Heralding probabilities below this are [`Error::ZeroProbability`].
pub const PROBABILITY_FLOOR: f64 = 1e-300;

/// Cutoff used when none is given: [`DEFAULT_CUTOFF`] up to 10 dB,
/// [`HIGH_SQUEEZING_CUTOFF`] beyond.
pub fn default_cutoff(r: f64) -> usize {
    if r.abs() <= db_to_r(10.0) + 1e-12 {
        DEFAULT_CUTOFF
    } else {
        HIGH_SQUEEZING_CUTOFF
    }
}

/// Number-state amplitudes of one or two modes, each truncated at `cutoff`
/// photons. Two-mode amplitudes are stored row-major, `(j, k)` at
/// `j (cutoff + 1) + k` with `j` photons in mode 1.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    modes: usize,
    cutoff: usize,
    amps: Vec<Complex64>,
    tail: f64,
}

impl FockState {
    /// Single-mode state from amplitudes `c_0 ..= c_cutoff` and the
    /// probability mass known to lie beyond the cutoff.
    pub fn single(amps: Vec<Complex64>, tail: f64) -> Result<FockState> {
        if amps.is_empty() {
            return Err(Error::InvalidParameter("empty amplitude table".into()));
        }
        FockState::checked(1, amps.len() - 1, amps, tail)
    }

    /// Two-mode state; `amps` has `(cutoff + 1)²` entries.
    pub fn two_mode(cutoff: usize, amps: Vec<Complex64>, tail: f64) -> Result<FockState> {
        if amps.len() != (cutoff + 1) * (cutoff + 1) {
            return Err(Error::InvalidParameter(format!(
                "two-mode table of {} entries does not match cutoff {cutoff}",
                amps.len()
            )));
        }
        FockState::checked(2, cutoff, amps, tail)
    }

    fn checked(modes: usize, cutoff: usize, amps: Vec<Complex64>, tail: f64) -> Result<FockState> {
        let state = FockState {
            modes,
            cutoff,
            amps,
            tail,
        };
        if !(tail >= 0.0) || state.norm_sqr() > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "amplitudes of norm {} with tail {tail} are not a truncated state",
                state.norm_sqr()
            )));
        }
        Ok(state)
    }

    pub fn vacuum(cutoff: usize) -> FockState {
        let mut amps = vec![Complex64::new(0.0, 0.0); cutoff + 1];
        amps[0] = Complex64::new(1.0, 0.0);
        FockState {
            modes: 1,
            cutoff,
            amps,
            tail: 0.0,
        }
    }

    /// `a ⊗ b` at the larger of the two cutoffs.
    pub fn product(a: &FockState, b: &FockState) -> Result<FockState> {
        if a.modes != 1 || b.modes != 1 {
            return Err(Error::InvalidParameter(
                "product needs two single-mode states".into(),
            ));
        }
        let cutoff = a.cutoff.max(b.cutoff);
        let dim = cutoff + 1;
        let mut amps = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (j, ca) in a.amps.iter().enumerate() {
            for (k, cb) in b.amps.iter().enumerate() {
                amps[j * dim + k] = ca * cb;
            }
        }
        Ok(FockState {
            modes: 2,
            cutoff,
            amps,
            tail: a.tail + b.tail - a.tail * b.tail,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Probability mass outside the truncated space. For heralded states it
    /// bounds the relative mass lost from the conditional state.
    pub fn tail_mass(&self) -> f64 {
        self.tail
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `c_n` of a single-mode state.
    pub fn amplitude(&self, n: usize) -> Complex64 {
        assert_eq!(self.modes, 1, "amplitude(n) needs a single-mode state");
        self.amps
            .get(n)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// `c_{j,k}` of a two-mode state.
    pub fn amplitude2(&self, j: usize, k: usize) -> Complex64 {
        assert_eq!(self.modes, 2, "amplitude2 needs a two-mode state");
        if j > self.cutoff || k > self.cutoff {
            return Complex64::new(0.0, 0.0);
        }
        self.amps[j * (self.cutoff + 1) + k]
    }

    /// Photon-number distribution of mode 1.
    pub fn mode1_distribution(&self) -> Vec<f64> {
        match self.modes {
            1 => self.amps.iter().map(|c| c.norm_sqr()).collect(),
            _ => self
                .amps
                .chunks(self.cutoff + 1)
                .map(|row| row.iter().map(|c| c.norm_sqr()).sum())
                .collect(),
        }
    }

    /// Mean photon number of a single-mode state.
    pub fn mean_photon_number(&self) -> f64 {
        self.mode1_distribution()
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }
}

/// `S(r)|0⟩` truncated at `cutoff` photons:
/// `c_{2m} = (-tanh r)^m √((2m)!) / (2^m m!) / √(cosh r)`, so that positive
/// `r` narrows the position wavefunction to `e^{r/2} φ_0(e^r x)`.
pub fn squeezed_vacuum_fock(r: f64, cutoff: usize) -> Result<FockState> {
    let state = squeezed_vacuum_unchecked(r, cutoff)?;
    if state.tail > TAIL_LIMIT {
        return Err(Error::TruncationError {
            cutoff,
            tail: state.tail,
            limit: TAIL_LIMIT,
        });
    }
    Ok(state)
}

fn squeezed_vacuum_unchecked(r: f64, cutoff: usize) -> Result<FockState> {
    if !r.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "squeezing must be finite, got {r}"
        )));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); cutoff + 1];
    if r == 0.0 {
        amps[0] = Complex64::new(1.0, 0.0);
        return FockState::single(amps, 0.0);
    }
    let log_t = r.abs().tanh().ln();
    let log_c = -0.5 * r.cosh().ln();
    let sign_step = if r > 0.0 { -1.0 } else { 1.0 };
    let log_p = |m: usize| log_double_factorial_ratio(m) + 2.0 * m as f64 * log_t + 2.0 * log_c;
    for m in 0..=cutoff / 2 {
        let sign = if m % 2 == 1 { sign_step } else { 1.0 };
        amps[2 * m] = Complex64::new(sign * (0.5 * log_p(m)).exp(), 0.0);
    }
    // the terms decrease monotonically, so sum them until they stop mattering
    let mut tail = 0.0;
    let mut m = cutoff / 2 + 1;
    loop {
        let p = log_p(m).exp();
        tail += p;
        if p <= 1e-17 * tail || p == 0.0 || m > 50_000_000 {
            break;
        }
        m += 1;
    }
    FockState::single(amps, tail)
}

/// The two squeezed inputs as one product state.
pub fn squeezed_pair_fock(sq: SqueezerPair, cutoff: usize) -> Result<FockState> {
    FockState::product(
        &squeezed_vacuum_fock(sq.r1(), cutoff)?,
        &squeezed_vacuum_fock(sq.r2(), cutoff)?,
    )
}

/// Beam splitter `exp(θ(a₁a₂† - a₁†a₂))`, `cos θ = √R`, as one orthogonal
/// block per total photon number `N ≤ max_total` in the basis
/// `|j, N - j⟩`, `j = 0..=N`.
///
/// With this sign the quadratures map as `x₁ → √R x₁ - √T x₂`,
/// `x₂ → √T x₁ + √R x₂`, matching [`crate::gauss_core::build_sigma`].
#[derive(Debug, Clone)]
pub struct BeamSplitterUnitary {
    reflectance: f64,
    theta: f64,
    blocks: Vec<DMatrix<f64>>,
}

/// Builds the beam splitter on every total photon number up to `max_total`.
pub fn beam_splitter_unitary(reflectance: f64, max_total: usize) -> Result<BeamSplitterUnitary> {
    if !(0.0..=1.0).contains(&reflectance) {
        return Err(Error::InvalidParameter(format!(
            "reflectance must lie in [0, 1], got {reflectance}"
        )));
    }
    let theta = reflectance.sqrt().acos();
    let blocks = (0..=max_total)
        .into_par_iter()
        .map(|n| {
            let mut generator = DMatrix::<f64>::zeros(n + 1, n + 1);
            for j in 0..n {
                let g = theta * (((j + 1) * (n - j)) as f64).sqrt();
                // a₁a₂† lowers j, a₁†a₂ raises it
                generator[(j, j + 1)] = g;
                generator[(j + 1, j)] = -g;
            }
            generator.exp()
        })
        .collect();
    Ok(BeamSplitterUnitary {
        reflectance,
        theta,
        blocks,
    })
}

impl BeamSplitterUnitary {
    /// Shared instance for repeated use at one reflectance.
    pub fn cached(reflectance: f64, max_total: usize) -> Result<Arc<BeamSplitterUnitary>> {
        type Cache = Mutex<HashMap<(u64, usize), Arc<BeamSplitterUnitary>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let key = (reflectance.to_bits(), max_total);
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(u) = cache.lock().unwrap().get(&key) {
            return Ok(Arc::clone(u));
        }
        let u = Arc::new(beam_splitter_unitary(reflectance, max_total)?);
        Ok(cache
            .lock()
            .unwrap()
            .entry(key)
            .or_insert_with(|| Arc::clone(&u))
            .clone())
    }

    pub fn reflectance(&self) -> f64 {
        self.reflectance
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn max_total(&self) -> usize {
        self.blocks.len() - 1
    }

    /// Block acting on total photon number `n`.
    pub fn block(&self, n: usize) -> &DMatrix<f64> {
        &self.blocks[n]
    }

    /// `max |UᵀU - I|` over one block.
    pub fn block_unitarity_residual(&self, n: usize) -> f64 {
        let u = &self.blocks[n];
        let p = u.transpose() * u;
        (p - DMatrix::<f64>::identity(n + 1, n + 1)).amax()
    }

    /// Largest block unitarity residual.
    pub fn unitarity_residual(&self) -> f64 {
        (0..self.blocks.len())
            .map(|n| self.block_unitarity_residual(n))
            .fold(0.0, f64::max)
    }

    /// Applies the beam splitter to a two-mode state whose support lies
    /// within total photon number `max_total`. The result has per-mode
    /// cutoff `max_total`.
    pub fn apply(&self, state: &FockState) -> Result<FockState> {
        if state.modes != 2 {
            return Err(Error::InvalidParameter(
                "beam splitter needs a two-mode state".into(),
            ));
        }
        let max_total = self.max_total();
        let dim_in = state.cutoff + 1;
        let dim_out = max_total + 1;
        let zero = Complex64::new(0.0, 0.0);
        for j in 0..dim_in {
            for k in 0..dim_in {
                if j + k > max_total && state.amps[j * dim_in + k] != zero {
                    return Err(Error::InvalidParameter(format!(
                        "state reaches {} photons, beyond the {max_total} the beam splitter covers",
                        j + k
                    )));
                }
            }
        }
        let mut out = vec![zero; dim_out * dim_out];
        for n in 0..=max_total.min(2 * state.cutoff) {
            let lo = n.saturating_sub(state.cutoff);
            let hi = n.min(state.cutoff);
            let input: Vec<Complex64> = (0..=n)
                .map(|j| {
                    if j >= lo && j <= hi {
                        state.amps[j * dim_in + (n - j)]
                    } else {
                        zero
                    }
                })
                .collect();
            if input.iter().all(|c| *c == zero) {
                continue;
            }
            let u = &self.blocks[n];
            for i in 0..=n {
                let mut acc = zero;
                for (j, c) in input.iter().enumerate() {
                    acc += c * u[(i, j)];
                }
                out[i * dim_out + (n - i)] = acc;
            }
        }
        Ok(FockState {
            modes: 2,
            cutoff: max_total,
            amps: out,
            tail: state.tail,
        })
    }
}

/// Output of the beam splitter fed by two squeezed vacua.
///
/// The input is kept on total photon number `j + k ≤ 2 cutoff`, the largest
/// space the beam splitter maps into itself with both output modes still
/// resolved up to `cutoff` photons and beyond. The reported tail is the
/// input mass outside that space.
pub fn gaussian_output_fock(
    sq: SqueezerPair,
    reflectance: f64,
    cutoff: usize,
) -> Result<FockState> {
    let total = 2 * cutoff;
    let a = squeezed_vacuum_unchecked(sq.r1(), total)?;
    let b = squeezed_vacuum_unchecked(sq.r2(), total)?;
    let dim = total + 1;
    let zero = Complex64::new(0.0, 0.0);
    let mut amps = vec![zero; dim * dim];
    for j in 0..dim {
        for k in 0..dim - j {
            amps[j * dim + k] = a.amps[j] * b.amps[k];
        }
    }
    // mass of mode 2 strictly above m photons, for every m ≤ total
    let pb: Vec<f64> = b.amps.iter().map(|c| c.norm_sqr()).collect();
    let mut above = vec![b.tail; dim];
    for m in (0..total).rev() {
        above[m] = above[m + 1] + pb[m + 1];
    }
    let tail = a.tail
        + a.amps
            .iter()
            .enumerate()
            .map(|(j, c)| c.norm_sqr() * above[total - j])
            .sum::<f64>();
    if tail > TAIL_LIMIT {
        return Err(Error::TruncationError {
            cutoff,
            tail,
            limit: TAIL_LIMIT,
        });
    }
    let input = FockState {
        modes: 2,
        cutoff: total,
        amps,
        tail,
    };
    BeamSplitterUnitary::cached(reflectance, total)?.apply(&input)
}

/// Projects mode 1 onto `|n⟩`: returns `P(n)` and the normalized state of
/// mode 2.
pub fn herald_fock(state2: &FockState, n: usize) -> Result<(f64, FockState)> {
    if state2.modes != 2 {
        return Err(Error::InvalidParameter(
            "heralding needs a two-mode state".into(),
        ));
    }
    if n > state2.cutoff {
        return Err(Error::InvalidParameter(format!(
            "cannot herald {n} photons at cutoff {}",
            state2.cutoff
        )));
    }
    let dim = state2.cutoff + 1;
    let row = &state2.amps[n * dim..(n + 1) * dim];
    let prob: f64 = row.iter().map(|c| c.norm_sqr()).sum();
    if !(prob >= PROBABILITY_FLOOR) {
        return Err(Error::ZeroProbability { prob });
    }
    let scale = 1.0 / prob.sqrt();
    let amps = row.iter().map(|c| c * scale).collect();
    Ok((
        prob,
        FockState {
            modes: 1,
            cutoff: state2.cutoff,
            amps,
            tail: (state2.tail / prob).min(1.0),
        },
    ))
}

/// `Σ c_n φ_n(x)` of a single-mode state with real amplitudes (imaginary
/// parts are dropped).
pub fn fock_to_wavefunction(state: &FockState, x: f64) -> f64 {
    assert_eq!(state.modes, 1, "wavefunction needs a single-mode state");
    let top = highest_occupied(state);
    phi_table(top, x)
        .iter()
        .zip(&state.amps)
        .map(|(phi, c)| phi * c.re)
        .sum()
}

/// `Σ c_{jk} φ_j(x₁) φ_k(x₂)` of a two-mode state with real amplitudes.
pub fn fock_to_wavefunction2(state: &FockState, x1: f64, x2: f64) -> f64 {
    assert_eq!(
        state.modes, 2,
        "two-mode wavefunction needs a two-mode state"
    );
    let dim = state.cutoff + 1;
    let p1 = phi_table(state.cutoff, x1);
    let p2 = phi_table(state.cutoff, x2);
    state
        .amps
        .chunks(dim)
        .zip(&p1)
        .map(|(row, a)| a * row.iter().zip(&p2).map(|(c, b)| c.re * b).sum::<f64>())
        .sum()
}

fn highest_occupied(state: &FockState) -> usize {
    state
        .amps
        .iter()
        .rposition(|c| c.norm_sqr() > 0.0)
        .unwrap_or(0)
}

/// A single-mode Fock state viewed as a position wavefunction. A state with
/// no photons beyond `N` is a degree-`N` polynomial times `e^{-x²/2}`.
#[derive(Debug, Clone)]
pub struct FockWavefunction {
    state: FockState,
    top: usize,
}

impl FockWavefunction {
    pub fn new(state: FockState) -> Result<FockWavefunction> {
        if state.modes != 1 {
            return Err(Error::InvalidParameter(
                "wavefunction needs a single-mode state".into(),
            ));
        }
        let top = highest_occupied(&state);
        Ok(FockWavefunction { state, top })
    }

    pub fn state(&self) -> &FockState {
        &self.state
    }
}

impl Wavefunction for FockWavefunction {
    fn amplitude(&self, x: f64) -> f64 {
        fock_to_wavefunction(&self.state, x)
    }

    fn envelope(&self) -> Envelope {
        Envelope::GaussPoly {
            exponent: 0.5,
            degree: self.top,
        }
    }
}

/// Second moments `⟨x_i x_j⟩` of a two-mode state, `x = (a + a†)/√2`.
pub fn quadrature_moments(state: &FockState) -> [[f64; 2]; 2] {
    assert_eq!(state.modes, 2, "moments need a two-mode state");
    let c = |j: usize, k: usize| state.amplitude2(j, k);
    let dim = state.cutoff + 1;
    let (mut a1a1, mut a2a2, mut n1, mut n2) = (0.0, 0.0, 0.0, 0.0);
    let (mut a1a2, mut a1a2dag) = (0.0, 0.0);
    for j in 0..dim {
        for k in 0..dim {
            let here = c(j, k);
            let (jf, kf) = (j as f64, k as f64);
            n1 += jf * here.norm_sqr();
            n2 += kf * here.norm_sqr();
            a1a1 += (here.conj() * c(j + 2, k)).re * ((jf + 1.0) * (jf + 2.0)).sqrt();
            a2a2 += (here.conj() * c(j, k + 2)).re * ((kf + 1.0) * (kf + 2.0)).sqrt();
            a1a2 += (here.conj() * c(j + 1, k + 1)).re * ((jf + 1.0) * (kf + 1.0)).sqrt();
            a1a2dag += (c(j, k + 1).conj() * c(j + 1, k)).re * ((jf + 1.0) * (kf + 1.0)).sqrt();
        }
    }
    let x1x1 = a1a1 + n1 + 0.5 * state.norm_sqr();
    let x2x2 = a2a2 + n2 + 0.5 * state.norm_sqr();
    let x1x2 = a1a2 + a1a2dag;
    [[x1x1, x1x2], [x1x2, x2x2]]
}

/// `P(n)` for a weak tap of reflectance `R` on one squeezed vacuum: the
/// two-mode setting with `r2 = 0`.
pub fn conventional_ps_probability(
    r1: f64,
    reflectance: f64,
    n: usize,
    cutoff: usize,
) -> Result<f64> {
    conventional_ps_with_tail(r1, reflectance, n, cutoff).map(|(p, _)| p)
}

/// [`conventional_ps_probability`] together with the truncation tail of the
/// input state.
pub fn conventional_ps_with_tail(
    r1: f64,
    reflectance: f64,
    n: usize,
    cutoff: usize,
) -> Result<(f64, f64)> {
    let sq = SqueezerPair::new(r1, 0.0)?;
    let out = gaussian_output_fock(sq, reflectance, cutoff)?;
    let p = match herald_fock(&out, n) {
        Ok((p, _)) => p,
        Err(Error::ZeroProbability { prob }) => prob,
        Err(e) => return Err(e),
    };
    Ok((p, out.tail_mass()))
}

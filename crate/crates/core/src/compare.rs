//! Success probabilities of three ways to herald `n`-photon cat
//! approximants, and sweeps of them over input squeezing.
//!
//! - `Gps`: two opposed squeezers mixed at the reflectance that makes
//!   `σ11 = 1`, closed-form `P(n)`.
//! - `Homodyne`: `n`-photon detection on a squeezed vacuum followed by
//!   homodyne conditioning, `(1 - tanh²r) tanh^{2n}r / (10n)`.
//! - `Conventional`: a 5% tap on one squeezed vacuum, computed by the Fock
//!   oracle.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::gauss_core::{build_sigma, db_to_r, r_to_db, solve_reflectance, SqueezerPair};
use crate::herald::herald;
use crate::oracle::{conventional_ps_with_tail, default_cutoff};
use crate::targets::{fidelity, CatTarget};
use crate::{Error, Result};

/// Tap reflectance of conventional photon subtraction.
pub const CONVENTIONAL_REFLECTANCE: f64 = 0.05;

/// Default clock rate, 100 MHz.
pub const DEFAULT_REP_RATE: f64 = 1e8;

/// Quoted fidelity of the homodyne-conditioned states.
pub const HOMODYNE_FIDELITY: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Gps,
    Homodyne,
    Conventional,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Gps, Method::Homodyne, Method::Conventional];

    pub fn name(self) -> &'static str {
        match self {
            Method::Gps => "gps",
            Method::Homodyne => "homodyne",
            Method::Conventional => "conventional",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gps" => Ok(Method::Gps),
            "homodyne" | "hom" => Ok(Method::Homodyne),
            "conventional" | "conv" => Ok(Method::Conventional),
            other => Err(Error::InvalidParameter(format!("unknown method {other:?}"))),
        }
    }
}

/// One method's success probability at one squeezing level.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodResult {
    pub method: Method,
    pub n: usize,
    pub r: f64,
    pub db: f64,
    pub probability: f64,
    /// Heralding events per second at `rep_rate`.
    pub rate: f64,
    pub rep_rate: f64,
    pub reflectance: Option<f64>,
    pub r_c: Option<f64>,
    pub fidelity: Option<f64>,
    pub tail_mass: Option<f64>,
    pub note: Option<&'static str>,
}

impl MethodResult {
    fn new(method: Method, r: f64, n: usize, probability: f64) -> MethodResult {
        MethodResult {
            method,
            n,
            r,
            db: r_to_db(r),
            probability,
            rate: probability * DEFAULT_REP_RATE,
            rep_rate: DEFAULT_REP_RATE,
            reflectance: None,
            r_c: None,
            fidelity: None,
            tail_mass: None,
            note: None,
        }
    }

    /// The same result at another clock rate.
    pub fn at_rep_rate(mut self, rep_rate: f64) -> MethodResult {
        self.rep_rate = rep_rate;
        self.rate = self.probability * rep_rate;
        self
    }
}

fn check_squeezing(r: f64) -> Result<()> {
    if r >= 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "input squeezing must be non-negative, got {r}"
        )))
    }
}

/// GPS with `r1 = -r2 = r` at the solved reflectance. Carries `R`, `r_c`
/// and the fidelity with the cat `(√n, n mod 2, r_c)` for `n ≥ 1`.
pub fn gps_success(r: f64, n: usize) -> Result<MethodResult> {
    check_squeezing(r)?;
    if r == 0.0 {
        let p = if n == 0 { 1.0 } else { 0.0 };
        return Ok(MethodResult::new(Method::Gps, r, n, p));
    }
    let sq = SqueezerPair::opposed(r)?;
    let bs = solve_reflectance(sq)?;
    let sigma = build_sigma(sq, bs);
    let mut result = match herald(&sigma, n) {
        Ok(outcome) => {
            let mut res = MethodResult::new(Method::Gps, r, n, outcome.prob());
            res.r_c = outcome.r_c();
            if n > 0 {
                let cat = CatTarget::for_photons(n, outcome.r_c().unwrap_or(0.0))?;
                res.fidelity = Some(fidelity(&outcome, &cat)?);
            }
            res
        }
        Err(Error::ZeroProbability { prob }) => MethodResult::new(Method::Gps, r, n, prob),
        Err(e) => return Err(e),
    };
    result.reflectance = Some(bs.reflectance());
    Ok(result)
}

/// `(1 - tanh²r) tanh^{2n}r / (10n)`.
pub fn homodyne_method_success(r: f64, n: usize) -> Result<MethodResult> {
    check_squeezing(r)?;
    if n == 0 {
        return Err(Error::InvalidParameter(
            "homodyne conditioning needs n >= 1".into(),
        ));
    }
    let t = r.tanh();
    let detect = (1.0 - t * t) * t.powi(2 * n as i32);
    let mut result = MethodResult::new(Method::Homodyne, r, n, detect / (10.0 * n as f64));
    result.fidelity = Some(HOMODYNE_FIDELITY);
    result.note = Some("quoted fidelity, not computed");
    Ok(result)
}

/// Conventional subtraction at [`CONVENTIONAL_REFLECTANCE`], from the Fock
/// oracle at the default cutoff for `r`.
pub fn conventional_ps_success(r: f64, n: usize) -> Result<MethodResult> {
    conventional_ps_success_with_cutoff(r, n, default_cutoff(r))
}

pub fn conventional_ps_success_with_cutoff(
    r: f64,
    n: usize,
    cutoff: usize,
) -> Result<MethodResult> {
    check_squeezing(r)?;
    let (p, tail) = conventional_ps_with_tail(r, CONVENTIONAL_REFLECTANCE, n, cutoff)?;
    let mut result = MethodResult::new(Method::Conventional, r, n, p);
    result.reflectance = Some(CONVENTIONAL_REFLECTANCE);
    result.tail_mass = Some(tail);
    Ok(result)
}

pub fn success(method: Method, r: f64, n: usize) -> Result<MethodResult> {
    match method {
        Method::Gps => gps_success(r, n),
        Method::Homodyne => homodyne_method_success(r, n),
        Method::Conventional => conventional_ps_success(r, n),
    }
}

/// What the sweep axis counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Decibel,
    Squeezing,
}

/// A sweep over input squeezing.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    methods: Vec<Method>,
    axis: Axis,
    lo: f64,
    hi: f64,
    step: f64,
    photon_numbers: Vec<usize>,
    rep_rate: f64,
    cutoff: Option<usize>,
}

impl SweepSpec {
    pub fn new(
        methods: Vec<Method>,
        axis: Axis,
        (lo, hi, step): (f64, f64, f64),
        photon_numbers: Vec<usize>,
        rep_rate: f64,
    ) -> Result<SweepSpec> {
        if !(lo.is_finite() && hi.is_finite() && step > 0.0 && hi >= lo && lo >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "grid {lo}:{hi}:{step} is not an increasing non-negative range"
            )));
        }
        if !(rep_rate > 0.0 && rep_rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "repetition rate must be positive, got {rep_rate}"
            )));
        }
        if methods.is_empty() || photon_numbers.is_empty() {
            return Err(Error::InvalidParameter(
                "a sweep needs at least one method and one photon number".into(),
            ));
        }
        Ok(SweepSpec {
            methods,
            axis,
            lo,
            hi,
            step,
            photon_numbers,
            rep_rate,
            cutoff: None,
        })
    }

    /// 0.5 to 22 dB in 0.1 dB steps.
    pub fn default_grid(methods: Vec<Method>, photon_numbers: Vec<usize>) -> Result<SweepSpec> {
        SweepSpec::new(
            methods,
            Axis::Decibel,
            (0.5, 22.0, 0.1),
            photon_numbers,
            DEFAULT_REP_RATE,
        )
    }

    /// Fixed Fock cutoff for the conventional method instead of the default.
    pub fn with_cutoff(mut self, cutoff: usize) -> SweepSpec {
        self.cutoff = Some(cutoff);
        self
    }

    pub fn methods(&self) -> &[Method] {
        &self.methods
    }

    pub fn photon_numbers(&self) -> &[usize] {
        &self.photon_numbers
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn rep_rate(&self) -> f64 {
        self.rep_rate
    }

    /// Axis values `lo + i·step` up to `hi` (within a thousandth of a step).
    pub fn grid(&self) -> Vec<f64> {
        let count = ((self.hi - self.lo) / self.step + 1e-3).floor() as usize;
        (0..=count)
            .map(|i| self.lo + i as f64 * self.step)
            .collect()
    }

    fn squeezing(&self, value: f64) -> f64 {
        match self.axis {
            Axis::Decibel => db_to_r(value),
            Axis::Squeezing => value,
        }
    }
}

/// One cell of a sweep. Failures are kept, not propagated.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub axis_value: f64,
    pub method: Method,
    pub n: usize,
    pub outcome: std::result::Result<MethodResult, Error>,
}

/// Evaluates every grid value, method and photon number; rows come back
/// grid-major, then in the spec's method and photon-number order.
pub fn sweep(spec: &SweepSpec) -> Vec<SweepPoint> {
    let grid = spec.grid();
    grid.par_iter()
        .flat_map_iter(|&value| {
            let r = spec.squeezing(value);
            spec.methods.iter().flat_map(move |&method| {
                spec.photon_numbers.iter().map(move |&n| {
                    let outcome = match (method, spec.cutoff) {
                        (Method::Conventional, Some(cutoff)) => {
                            conventional_ps_success_with_cutoff(r, n, cutoff)
                        }
                        _ => success(method, r, n),
                    }
                    .map(|res| res.at_rep_rate(spec.rep_rate));
                    SweepPoint {
                        axis_value: value,
                        method,
                        n,
                        outcome,
                    }
                })
            })
        })
        .collect()
}

/// Probabilities of one (method, n) curve of a sweep, NaN where the point
/// failed.
pub fn curve(points: &[SweepPoint], method: Method, n: usize) -> Vec<(f64, f64)> {
    points
        .iter()
        .filter(|p| p.method == method && p.n == n)
        .map(|p| {
            (
                p.axis_value,
                p.outcome.as_ref().map_or(f64::NAN, |r| r.probability),
            )
        })
        .collect()
}

/// Indices of local maxima strictly inside a sampled curve. A plateau
/// counts once, at its first sample.
pub fn interior_maxima(values: &[f64]) -> Vec<usize> {
    let mut maxima = Vec::new();
    let mut i = 1;
    while i + 1 < values.len() {
        if values[i] > values[i - 1] {
            let mut j = i;
            while j + 1 < values.len() && values[j + 1] == values[i] {
                j += 1;
            }
            if j + 1 < values.len() && values[j + 1] < values[i] {
                maxima.push(i);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    maxima
}

/// Exactly one interior maximum, rising before it and falling after it.
pub fn is_unimodal(values: &[f64]) -> bool {
    if values.iter().any(|v| !v.is_finite()) {
        return false;
    }
    match interior_maxima(values).as_slice() {
        [peak] => {
            values[..=*peak].windows(2).all(|w| w[0] <= w[1])
                && values[*peak..].windows(2).all(|w| w[0] >= w[1])
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gps_anchor_at_fifteen_db() {
        let res = gps_success(1.727, 10).unwrap();
        assert_abs_diff_eq!(res.probability, 0.023, epsilon = 0.001);
        assert!(res.reflectance.unwrap() > 0.0);
        let rate = res.at_rep_rate(1e8).rate;
        assert_abs_diff_eq!(rate, 2.3e6, epsilon = 0.1e6);
    }

    #[test]
    fn gps_distribution_decreases_past_its_mode() {
        let p: Vec<f64> = (0..40)
            .map(|n| gps_success(0.576, n).unwrap().probability)
            .collect();
        let mode = p
            .iter()
            .enumerate()
            .fold(0, |best, (i, v)| if *v > p[best] { i } else { best });
        assert!(p[mode..].windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn everything_vanishes_without_squeezing() {
        for n in 1..6 {
            for m in Method::ALL {
                assert_eq!(success(m, 0.0, n).unwrap().probability, 0.0, "{m} {n}");
            }
            assert!(gps_success(1e-6, n).unwrap().probability < 1e-10);
        }
    }

    #[test]
    fn homodyne_limits() {
        let p: Vec<f64> = (1..30)
            .map(|n| homodyne_method_success(1.151, n).unwrap().probability)
            .collect();
        assert!(p.windows(2).all(|w| w[1] < w[0]));
        let big = homodyne_method_success(12.0, 3).unwrap().probability;
        assert!(big < 1.0 / 30.0 && big > 0.0);
        let r: f64 = 1.151;
        let expected = (1.0 - r.tanh().powi(2)) * r.tanh().powi(20) / 100.0;
        approx::assert_relative_eq!(
            homodyne_method_success(r, 10).unwrap().probability,
            expected,
            max_relative = 1e-14
        );
        assert!(expected < gps_success(r, 10).unwrap().probability);
        assert!(homodyne_method_success(r, 0).is_err());
    }

    #[test]
    fn gps_advantage_over_homodyne_grows() {
        for &r in &[0.576, 1.151] {
            let ratio: Vec<f64> = (2..=10)
                .map(|n| {
                    gps_success(r, n).unwrap().probability
                        / homodyne_method_success(r, n).unwrap().probability
                })
                .collect();
            assert!(ratio.windows(2).all(|w| w[1] >= w[0]), "r={r}: {ratio:?}");
        }
    }

    #[test]
    fn ordering_at_five_db() {
        let r = db_to_r(5.0);
        for n in 2..=10 {
            let g = gps_success(r, n).unwrap().probability;
            let h = homodyne_method_success(r, n).unwrap().probability;
            let c = conventional_ps_success(r, n).unwrap().probability;
            assert!(g > h && h > c, "n={n}: {g} {h} {c}");
        }
    }

    #[test]
    fn gps_over_conventional_grows_with_n() {
        let r = db_to_r(5.0);
        let ratio: Vec<f64> = (2..=10)
            .map(|n| {
                gps_success(r, n).unwrap().probability
                    / conventional_ps_success(r, n).unwrap().probability
            })
            .collect();
        assert!(ratio.windows(2).all(|w| w[1] > w[0]), "{ratio:?}");
    }

    #[test]
    fn probabilities_are_probabilities() {
        for &db in &[0.5, 5.0, 10.0] {
            let r = db_to_r(db);
            for n in 1..=8 {
                for m in Method::ALL {
                    let p = success(m, r, n).unwrap().probability;
                    assert!((0.0..=1.0).contains(&p), "{m} {db} {n}: {p}");
                }
            }
        }
    }

    #[test]
    fn unimodality_helpers() {
        assert_eq!(interior_maxima(&[0.0, 1.0, 2.0, 1.0, 0.5]), vec![2]);
        assert_eq!(interior_maxima(&[0.0, 1.0, 1.0, 0.5]), vec![1]);
        assert_eq!(interior_maxima(&[0.0, 1.0, 2.0]), Vec::<usize>::new());
        assert_eq!(interior_maxima(&[0.0, 2.0, 1.0, 3.0, 0.0]), vec![1, 3]);
        assert!(is_unimodal(&[0.0, 1.0, 2.0, 1.0, 0.5]));
        assert!(!is_unimodal(&[0.0, 2.0, 1.0, 3.0, 0.0]));
        assert!(!is_unimodal(&[0.0, 1.0, f64::NAN, 0.0]));
    }

    #[test]
    fn sweep_is_ordered_and_deterministic() {
        let spec = SweepSpec::new(
            vec![Method::Gps, Method::Homodyne],
            Axis::Decibel,
            (0.0, 3.0, 0.5),
            vec![2, 5],
            1e8,
        )
        .unwrap();
        let a = sweep(&spec);
        let b = sweep(&spec);
        assert_eq!(a, b);
        assert_eq!(a.len(), 7 * 2 * 2);
        assert_eq!(a[0].axis_value, 0.0);
        assert_eq!((a[1].method, a[1].n), (Method::Gps, 5));
        assert_eq!((a[2].method, a[2].n), (Method::Homodyne, 2));
        assert_eq!(a[4].axis_value, 0.5);
        for p in a.iter().filter(|p| p.axis_value == 0.0) {
            assert_eq!(p.outcome.as_ref().unwrap().probability, 0.0);
        }
    }

    #[test]
    fn sweep_flags_failed_points() {
        let spec = SweepSpec::new(
            vec![Method::Conventional],
            Axis::Decibel,
            (5.0, 15.0, 10.0),
            vec![2],
            1e8,
        )
        .unwrap()
        .with_cutoff(20);
        let points = sweep(&spec);
        assert_eq!(points.len(), 2);
        assert!(matches!(
            points[1].outcome,
            Err(Error::TruncationError { .. })
        ));
    }

    #[test]
    fn gps_curves_peak_in_order() {
        let spec = SweepSpec::default_grid(vec![Method::Gps], vec![5, 10, 20]).unwrap();
        let points = sweep(&spec);
        let mut peaks = Vec::new();
        for n in [5, 10, 20] {
            let c = curve(&points, Method::Gps, n);
            let values: Vec<f64> = c.iter().map(|p| p.1).collect();
            assert!(is_unimodal(&values), "n={n}");
            peaks.push(c[interior_maxima(&values)[0]].0);
        }
        assert!(peaks[0] < peaks[1] && peaks[1] < peaks[2], "{peaks:?}");
    }

    #[test]
    fn rejects_bad_specs() {
        let bad = |lo, hi, step, rate| {
            SweepSpec::new(
                vec![Method::Gps],
                Axis::Decibel,
                (lo, hi, step),
                vec![1],
                rate,
            )
        };
        assert!(bad(1.0, 0.0, 0.1, 1e8).is_err());
        assert!(bad(0.0, 1.0, 0.0, 1e8).is_err());
        assert!(bad(0.0, 1.0, 0.1, 0.0).is_err());
        assert!("gps".parse::<Method>().is_ok());
        assert!("nope".parse::<Method>().is_err());
    }
}

//! Hermite functions, Fock-state wavefunctions and log-space factorials.

mod quadrature;

pub use quadrature::{integrate, GaussHermiteRule, QuadratureGrid, Scheme, DEFAULT_TOLERANCE};

use std::f64::consts::{LN_2, PI};
use std::sync::OnceLock;

/// `π^{-1/4}`, the peak of the vacuum wavefunction.
pub const PI_POW_M14: f64 = 0.751_125_544_464_942_5;

/// Physicists' Hermite polynomial `H_n(x)` by the three-term recurrence
/// `H_{k+1} = 2x H_k - 2k H_{k-1}`.
///
/// Overflows for large `n`; use [`eval_phi`] for wavefunctions.
pub fn hermite_phys(n: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Fock-state wavefunction `φ_n(x) = H_n(x) e^{-x²/2} / (π^{1/4} √(2ⁿ n!))`.
///
/// Evaluated with the normalized recurrence
/// `φ_{k+1} = x √(2/(k+1)) φ_k - √(k/(k+1)) φ_{k-1}`, which never forms
/// `2ⁿ n!`. Every step is odd in `x`, so `φ_n(-x) = (-1)ⁿ φ_n(x)` holds bit
/// for bit.
pub fn eval_phi(n: usize, x: f64) -> f64 {
    let mut prev = PI_POW_M14 * (-0.5 * x * x).exp();
    if n == 0 {
        return prev;
    }
    let mut cur = x * std::f64::consts::SQRT_2 * prev;
    for k in 1..n {
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `φ_0(x), …, φ_{n_max}(x)` in one recurrence pass.
pub fn phi_table(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(PI_POW_M14 * (-0.5 * x * x).exp());
    if n_max == 0 {
        return out;
    }
    out.push(x * std::f64::consts::SQRT_2 * out[0]);
    for k in 1..n_max {
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// `(φ_0 * φ_n)(x) = xⁿ e^{-x²/4} / √(2ⁿ n!)`.
pub fn vacuum_convolution(n: usize, x: f64) -> f64 {
    if n == 0 {
        return (-0.25 * x * x).exp();
    }
    if x == 0.0 {
        return 0.0;
    }
    if n <= 20 {
        let norm = (2f64.powi(n as i32) * factorial_small(n)).sqrt();
        return x.powi(n as i32) * (-0.25 * x * x).exp() / norm;
    }
    let sign = if n % 2 == 1 && x < 0.0 { -1.0 } else { 1.0 };
    let log_mag =
        n as f64 * x.abs().ln() - 0.25 * x * x - 0.5 * (n as f64 * LN_2 + log_factorial(n));
    sign * log_mag.exp()
}

/// Closed form of `∫ H_n(y) e^{-(y-x)²} dy = √π (2x)ⁿ`.
pub fn hermite_gauss_integral(n: usize, x: f64) -> f64 {
    PI.sqrt() * (2.0 * x).powi(n as i32)
}

fn factorial_small(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

const LOG_FACTORIAL_TABLE: usize = 10_000;

fn log_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LOG_FACTORIAL_TABLE + 1);
        let mut acc = 0.0;
        t.push(acc);
        for k in 1..=LOG_FACTORIAL_TABLE {
            acc += (k as f64).ln();
            t.push(acc);
        }
        t
    })
}

/// `ln n!` by exact accumulation of `ln k` (tabulated up to 10⁴).
pub fn log_factorial(n: usize) -> f64 {
    let table = log_factorial_table();
    if n <= LOG_FACTORIAL_TABLE {
        return table[n];
    }
    table[LOG_FACTORIAL_TABLE]
        + ((LOG_FACTORIAL_TABLE + 1)..=n)
            .map(|k| (k as f64).ln())
            .sum::<f64>()
}

/// `ln((2m-1)!! / (2m)!!) = ln((2m)! / (4^m (m!)²))`.
///
/// The squared magnitude of the `|2m⟩` amplitude of a squeezed vacuum, up to
/// the `tanh^{2m} r / cosh r` factor.
pub fn log_double_factorial_ratio(m: usize) -> f64 {
    log_factorial(2 * m) - 2.0 * m as f64 * LN_2 - 2.0 * log_factorial(m)
}

/// `ln Γ(n + 1/2) = ln((2n)! √π / (4ⁿ n!))`.
pub fn log_gamma_half_integer(n: usize) -> f64 {
    log_factorial(2 * n) + 0.5 * PI.ln() - 2.0 * n as f64 * LN_2 - log_factorial(n)
}

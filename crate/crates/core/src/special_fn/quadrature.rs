//! Gauss-Hermite quadrature over the real line with weight-folded integrands.
//!
//! A rule of order `m` integrates `e^{-u²} p(u)` exactly for polynomials of
//! degree `2m - 1`. Grids store the folded weights `w_i e^{u_i²}` so that
//! plain integrands `f(x)` can be summed directly after the affine map
//! `x = center + scale · u`. An integrand `e^{-κ(x-c)²} p(x)` is integrated
//! exactly by the grid with that center and `scale = 1/√κ` once the order
//! exceeds half the polynomial degree.

use std::collections::HashMap;
use std::f64::consts::{LN_10, LN_2};
use std::sync::{Arc, Mutex, OnceLock};

use super::PI_POW_M14;
use crate::{Error, Result};

/// Relative tolerance of the node-doubling self-check.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// Orders above this lose the outermost folded weights to underflow-free
/// but meaningless territory; refinement stops here.
const MAX_ORDER: usize = 2048;
const MIN_ORDER: usize = 16;

/// Nodes and folded weights of the Gauss-Hermite rule of one order.
#[derive(Debug)]
pub struct GaussHermiteRule {
    order: usize,
    nodes: Vec<f64>,
    folded: Vec<f64>,
}

impl GaussHermiteRule {
    /// Cached rule of the given order.
    pub fn get(order: usize) -> Arc<GaussHermiteRule> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussHermiteRule>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(rule) = cache.lock().unwrap().get(&order) {
            return Arc::clone(rule);
        }
        let rule = Arc::new(GaussHermiteRule::compute(order));
        cache
            .lock()
            .unwrap()
            .entry(order)
            .or_insert_with(|| Arc::clone(&rule))
            .clone()
    }

    // Positive roots are bracketed by a downward sign-change scan whose step
    // is a fraction of the smallest zero spacing, then polished by Newton
    // steps that fall back to bisection when they leave the bracket. The
    // recurrence is rescaled on the fly so high orders neither overflow nor
    // lose the folded weights.
    fn compute(order: usize) -> GaussHermiteRule {
        assert!(order >= 1, "Gauss-Hermite order must be positive");
        let n = order;
        let nf = n as f64;
        let value = |z: f64| hermite_pair(n, z).0;
        let step = 0.2 * std::f64::consts::PI / (2.0 * nf + 1.0).sqrt();
        let floor = if n % 2 == 1 { 0.5 * step } else { 0.0 };
        let mut positive = Vec::with_capacity(n / 2);
        let mut hi = (2.0 * nf + 1.0).sqrt() + 1.0;
        let mut f_hi = value(hi);
        while positive.len() < n / 2 {
            let lo = (hi - step).max(floor);
            assert!(lo < hi, "Gauss-Hermite root scan lost roots at order {n}");
            let f_lo = value(lo);
            if f_lo == 0.0 || f_lo.signum() != f_hi.signum() {
                positive.push(polish(n, lo, hi, f_lo));
            }
            hi = lo;
            f_hi = f_lo;
        }
        let mut nodes: Vec<f64> = positive.iter().map(|z| -z).collect();
        if n % 2 == 1 {
            nodes.push(0.0);
        }
        nodes.extend(positive.iter().rev());
        let folded = nodes
            .iter()
            .map(|&z| {
                let (_, p2, ln_scale) = hermite_pair(n, z);
                let ln_pp = ((2.0 * nf).sqrt() * p2).abs().ln() + ln_scale;
                (LN_2 - 2.0 * ln_pp + z * z).exp()
            })
            .collect();
        GaussHermiteRule {
            order,
            nodes,
            folded,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Nodes `u_i` in ascending order.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Folded weights `w_i e^{u_i²}`.
    pub fn folded_weights(&self) -> &[f64] {
        &self.folded
    }

    /// Raw weights `w_i` for the `e^{-u²}` measure (tiny ones underflow).
    pub fn weights(&self) -> Vec<f64> {
        self.nodes
            .iter()
            .zip(&self.folded)
            .map(|(u, w)| w * (-u * u).exp())
            .collect()
    }

    /// Largest node.
    pub fn max_node(&self) -> f64 {
        *self.nodes.last().unwrap()
    }
}

// Root of the order-n polynomial inside [lo, hi], given its value at lo.
fn polish(n: usize, mut lo: f64, mut hi: f64, f_lo: f64) -> f64 {
    if f_lo == 0.0 {
        return lo;
    }
    let lo_sign = f_lo.signum();
    let mut z = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (p1, p2, _) = hermite_pair(n, z);
        if p1 == 0.0 {
            return z;
        }
        if p1.signum() == lo_sign {
            lo = z;
        } else {
            hi = z;
        }
        let newton = z - p1 / ((2.0 * n as f64).sqrt() * p2);
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let done = (next - z).abs() <= 1e-15 * z.abs().max(1.0);
        z = next;
        if done || hi - lo <= 4.0 * f64::EPSILON * z.abs().max(1.0) {
            break;
        }
    }
    z
}

/// Normalized Hermite polynomials of orders `n` and `n - 1` at `z`, sharing a
/// scale factor `e^{ln_scale}`.
fn hermite_pair(n: usize, z: f64) -> (f64, f64, f64) {
    const RESCALE: f64 = 1e150;
    let mut p1 = PI_POW_M14;
    let mut p2 = 0.0;
    let mut ln_scale = 0.0;
    for j in 0..n {
        let jf = j as f64;
        let p3 = p2;
        p2 = p1;
        p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
        if p1.abs() > RESCALE {
            p1 /= RESCALE;
            p2 /= RESCALE;
            ln_scale += 150.0 * LN_10;
        }
    }
    (p1, p2, ln_scale)
}

/// Quadrature scheme of a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    GaussHermite,
}

/// A quadrature grid over the real line: a Gauss-Hermite rule mapped by
/// `x = center + scale · u`, with the tolerance its self-check enforces.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    rule: Arc<GaussHermiteRule>,
    center: f64,
    scale: f64,
    tolerance: f64,
}

impl QuadratureGrid {
    pub fn gauss_hermite(order: usize, center: f64, scale: f64) -> QuadratureGrid {
        assert!(
            scale > 0.0 && scale.is_finite(),
            "grid scale must be positive"
        );
        QuadratureGrid {
            rule: GaussHermiteRule::get(order.clamp(1, MAX_ORDER)),
            center,
            scale,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    /// Grid that integrates `e^{-exponent (x - center)²} · p(x)` exactly for
    /// `deg p ≤ degree`, with a few spare nodes.
    pub fn for_gaussian(center: f64, exponent: f64, degree: usize) -> QuadratureGrid {
        let order = (degree / 2 + 9).max(MIN_ORDER);
        QuadratureGrid::gauss_hermite(order, center, 1.0 / exponent.sqrt())
    }

    /// Grid whose outermost nodes sit at `±half_width` and whose central
    /// node spacing is about `resolution / 2`.
    pub fn spanning(half_width: f64, resolution: f64) -> QuadratureGrid {
        // rounded up so nearby requests share cached rules
        let order = ((std::f64::consts::PI * half_width / resolution).ceil() as usize)
            .next_multiple_of(32)
            .clamp(2 * MIN_ORDER, MAX_ORDER / 2);
        let rule = GaussHermiteRule::get(order);
        let scale = half_width / rule.max_node();
        QuadratureGrid {
            rule,
            center: 0.0,
            scale,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> QuadratureGrid {
        self.tolerance = tolerance;
        self
    }

    /// Same map with twice the nodes.
    pub fn refined(&self) -> QuadratureGrid {
        QuadratureGrid {
            rule: GaussHermiteRule::get((2 * self.rule.order).min(MAX_ORDER)),
            ..self.clone()
        }
    }

    pub fn scheme(&self) -> Scheme {
        Scheme::GaussHermite
    }

    pub fn order(&self) -> usize {
        self.rule.order
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Points `x_i` and weights `W_i` with `∫ f ≈ Σ W_i f(x_i)`.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.rule
            .nodes
            .iter()
            .zip(&self.rule.folded)
            .map(move |(u, w)| (self.center + self.scale * u, self.scale * w))
    }

    /// Abscissae only.
    pub fn abscissae(&self) -> Vec<f64> {
        self.points().map(|(x, _)| x).collect()
    }

    /// Plain weighted sum, no self-check.
    pub fn sum<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.points().map(|(x, w)| w * f(x)).sum()
    }

    /// Weighted sum over pre-sampled values at [`abscissae`](Self::abscissae).
    pub fn sum_samples(&self, samples: &[f64]) -> f64 {
        debug_assert_eq!(samples.len(), self.order());
        self.points().zip(samples).map(|((_, w), s)| w * s).sum()
    }

    fn sum_with_mass<F: FnMut(f64) -> f64>(&self, mut f: F) -> (f64, f64) {
        self.points().fold((0.0, 0.0), |(acc, mass), (x, w)| {
            let term = w * f(x);
            (acc + term, mass + term.abs())
        })
    }
}

/// `∫ f(x) dx` on `grid`, checked against the grid with doubled node count.
///
/// Fails with [`Error::NonConverged`] when the two sums differ by more than
/// `grid.tolerance()` relative to `Σ |W_i f(x_i)|`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, grid: &QuadratureGrid) -> Result<f64> {
    let (coarse, _) = grid.sum_with_mass(&mut f);
    let fine_grid = grid.refined();
    if fine_grid.order() == grid.order() {
        return Ok(coarse);
    }
    let (fine, mass) = fine_grid.sum_with_mass(&mut f);
    let allowed = grid.tolerance * mass.max(f64::MIN_POSITIVE);
    if mass == 0.0 || (coarse - fine).abs() <= allowed {
        Ok(fine)
    } else {
        Err(Error::NonConverged {
            coarse,
            fine,
            tolerance: grid.tolerance,
        })
    }
}

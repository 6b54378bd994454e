//! Real single-mode wavefunctions in the x representation.

use crate::special_fn::QuadratureGrid;

/// Shape information used to pick quadrature grids.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Envelope {
    /// `ψ(x) = e^{-exponent·x²} p(x)` with `deg p ≤ degree`.
    GaussPoly { exponent: f64, degree: usize },
    /// Negligible beyond `±half_width`, no features finer than `resolution`.
    Generic { half_width: f64, resolution: f64 },
}

impl Envelope {
    pub fn half_width(&self) -> f64 {
        match *self {
            Envelope::GaussPoly { exponent, degree } => {
                ((2 * degree + 1) as f64).sqrt() / (2.0 * exponent).sqrt()
                    + 6.5 / (2.0 * exponent).sqrt()
            }
            Envelope::Generic { half_width, .. } => half_width,
        }
    }

    pub fn resolution(&self) -> f64 {
        match *self {
            Envelope::GaussPoly { exponent, degree } => {
                1.0 / ((2.0 * exponent).sqrt() * ((2 * degree + 1) as f64).sqrt())
            }
            Envelope::Generic { resolution, .. } => resolution,
        }
    }
}

/// A real wavefunction `ψ(x)`.
pub trait Wavefunction: Sync {
    fn amplitude(&self, x: f64) -> f64;
    fn envelope(&self) -> Envelope;
}

impl<W: Wavefunction + ?Sized> Wavefunction for &W {
    fn amplitude(&self, x: f64) -> f64 {
        (**self).amplitude(x)
    }
    fn envelope(&self) -> Envelope {
        (**self).envelope()
    }
}

/// Closure plus envelope.
pub struct FnWavefunction<F> {
    f: F,
    envelope: Envelope,
}

impl<F: Fn(f64) -> f64 + Sync> FnWavefunction<F> {
    pub fn new(f: F, envelope: Envelope) -> Self {
        FnWavefunction { f, envelope }
    }
}

impl<F: Fn(f64) -> f64 + Sync> Wavefunction for FnWavefunction<F> {
    fn amplitude(&self, x: f64) -> f64 {
        (self.f)(x)
    }
    fn envelope(&self) -> Envelope {
        self.envelope
    }
}

/// Grid for `∫ ψ_a ψ_b dx`. Exact when both envelopes are Gaussian times
/// polynomial.
pub fn product_grid(a: &Envelope, b: &Envelope) -> QuadratureGrid {
    match (*a, *b) {
        (
            Envelope::GaussPoly {
                exponent: ea,
                degree: da,
            },
            Envelope::GaussPoly {
                exponent: eb,
                degree: db,
            },
        ) => QuadratureGrid::for_gaussian(0.0, ea + eb, da + db),
        _ => QuadratureGrid::spanning(
            a.half_width().max(b.half_width()),
            a.resolution().min(b.resolution()),
        ),
    }
}

/// Grid for `∫ ψ² dx`.
pub fn density_grid(e: &Envelope) -> QuadratureGrid {
    product_grid(e, e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_fn::{eval_phi, integrate};

    #[test]
    fn gauss_poly_grids_are_exact_for_fock_overlaps() {
        let e = Envelope::GaussPoly {
            exponent: 0.5,
            degree: 30,
        };
        let grid = product_grid(&e, &e);
        let v = integrate(|x| eval_phi(30, x) * eval_phi(28, x), &grid).unwrap();
        assert!(v.abs() < 1e-13, "{v}");
        let v = integrate(|x| eval_phi(30, x).powi(2), &grid).unwrap();
        assert!((v - 1.0).abs() < 1e-13);
    }

    #[test]
    fn generic_envelopes_cover_both_inputs() {
        let a = Envelope::Generic {
            half_width: 5.0,
            resolution: 0.5,
        };
        let b = Envelope::GaussPoly {
            exponent: 0.5,
            degree: 4,
        };
        let g = product_grid(&a, &b);
        let xs = g.abscissae();
        assert!(xs.last().unwrap() >= &5.0);
        assert!(*xs.last().unwrap() >= b.half_width() - 1e-9);
    }
}

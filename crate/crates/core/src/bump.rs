//! The smooth weight `phi` and its Fourier transform.
//!
//! `phi` is supported in `[1, 2]`, equals 1 on `[5/4, 7/4]` and rises/falls
//! through the smooth step
//!
//! ```text
//! psi(u) = g(u) / (g(u) + g(1 - u)),    g(u) = exp(-1/u) for u > 0, else 0,
//! ```
//!
//! as `phi(t) = psi(4(t - 1))` on `[1, 5/4]` and `phi(t) = psi(4(2 - t))` on
//! `[7/4, 2]`. Because `psi(u) + psi(1 - u) = 1`, each transition integrates to
//! exactly `1/8` and `phi_hat(0) = 3/4`.
//!
//! Fourier convention: `phi_hat(xi) = int phi(u) exp(-i xi u) du`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{adaptive_gl_real, QuadratureSettings};

/// Width of each transition of `phi`.
pub const TRANSITION_WIDTH: f64 = 0.25;

/// `phi_hat(0)`.
pub const PHI_HAT_ZERO: f64 = 0.75;

fn g(u: f64) -> f64 {
    if u > 0.0 {
        (-1.0 / u).exp()
    } else {
        0.0
    }
}

/// Smooth step from 0 (at `u <= 0`) to 1 (at `u >= 1`).
pub fn psi(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let a = g(u);
        a / (a + g(1.0 - u))
    }
}

pub fn bump_phi(t: f64) -> f64 {
    if t <= 1.0 || t >= 2.0 {
        0.0
    } else if t < 1.25 {
        psi(4.0 * (t - 1.0))
    } else if t <= 1.75 {
        1.0
    } else {
        psi(4.0 * (2.0 - t))
    }
}

/// `phi` with quadrature settings for its Fourier transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpWeight {
    pub transition_width: f64,
    pub settings: QuadratureSettings,
}

impl Default for BumpWeight {
    fn default() -> Self {
        BumpWeight {
            transition_width: TRANSITION_WIDTH,
            settings: QuadratureSettings {
                rel_tol: 1e-10,
                abs_floor: 1.0,
                max_refinements: 12,
            },
        }
    }
}

impl BumpWeight {
    pub fn phi(&self, t: f64) -> f64 {
        bump_phi(t)
    }

    /// `phi_hat(xi)`.
    ///
    /// Symmetry about `3/2` gives `phi_hat(xi) = exp(-3i xi/2) A(xi)` with
    /// `A(xi) = 2 int_0^{1/2} phi(3/2 + v) cos(xi v) dv`. The plateau part of
    /// `A` is `2 sin(xi/4)/xi`; the transition part is integrated adaptively.
    pub fn phi_hat(&self, xi: f64) -> Result<Complex64> {
        if !xi.is_finite() {
            return Err(Error::Domain(format!("phi_hat at non-finite {xi}")));
        }
        let plateau = if xi == 0.0 { 0.5 } else { 2.0 * (0.25 * xi).sin() / xi };
        // v = 1/2 - w on the transition, phi = psi(4w)
        let f = |w: f64| 2.0 * psi(4.0 * w) * (xi * (0.5 - w)).cos();
        let panels = 4usize.max((xi.abs() * 0.25 / 2.0).ceil() as usize);
        let transition = adaptive_gl_real(&f, 0.0, 0.25, panels, &self.settings)?;
        let amplitude = plateau + transition.value;
        Ok(Complex64::from_polar(1.0, -1.5 * xi) * amplitude)
    }

    /// `int phi(u) du` by direct quadrature over the support.
    pub fn integral(&self) -> Result<f64> {
        let f = |t: f64| bump_phi(t);
        Ok(adaptive_gl_real(&f, 1.0, 2.0, 8, &self.settings)?.value)
    }

    /// `max |phi_hat(xi)| xi^alpha` over `samples` log-spaced `xi` in `[lo, hi]`.
    pub fn decay_constant(&self, alpha: u32, lo: f64, hi: f64, samples: usize) -> Result<DecaySweep> {
        if !(lo > 0.0 && hi > lo) || samples < 2 {
            return Err(Error::Domain("decay sweep needs 0 < lo < hi and >= 2 samples".into()));
        }
        let ratio = (hi / lo).ln() / (samples - 1) as f64;
        let mut best = DecaySweep {
            alpha,
            constant: 0.0,
            argmax: lo,
        };
        for i in 0..samples {
            let xi = lo * (ratio * i as f64).exp();
            let v = self.phi_hat(xi)?.norm() * xi.powi(alpha as i32);
            if v > best.constant {
                best.constant = v;
                best.argmax = xi;
            }
        }
        Ok(best)
    }
}

/// Empirical constant `C` in `|phi_hat(xi)| <= C xi^-alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecaySweep {
    pub alpha: u32,
    pub constant: f64,
    pub argmax: f64,
}

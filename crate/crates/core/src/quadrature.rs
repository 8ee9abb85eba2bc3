//! Composite Gauss-Legendre rules with panel doubling, and compensated sums.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Knobs shared by the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSettings {
    /// Two-level agreement required, relative to `max(|I|, abs_floor)`.
    pub rel_tol: f64,
    pub abs_floor: f64,
    /// Maximum number of refinements after the initial level.
    pub max_refinements: u32,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            rel_tol: 1e-8,
            abs_floor: 1.0,
            max_refinements: 6,
        }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Integral<T> {
    pub value: T,
    /// Difference between the last two refinement levels.
    pub level_difference: f64,
    pub levels: u32,
}

const GL_POINTS: usize = 16;

fn gl16() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        GaussLegendre::new(NonZeroUsize::new(GL_POINTS).unwrap())
            .as_node_weight_pairs()
            .to_vec()
    })
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated accumulator for complex values.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedComplex {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl CompensatedComplex {
    pub fn add(&mut self, v: Complex64) {
        self.re.add(v.re);
        self.im.add(v.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// 16-point Gauss-Legendre on each of `panels` equal panels of `[a, b]`.
///
/// Panels are evaluated in parallel and summed in panel order.
pub fn composite_gl<F>(f: &F, a: f64, b: f64, panels: usize) -> Complex64
where
    F: Fn(f64) -> Complex64 + Sync,
{
    let h = (b - a) / panels as f64;
    let rule = gl16();
    let partial: Vec<Complex64> = (0..panels)
        .into_par_iter()
        .map(|i| {
            let lo = a + i as f64 * h;
            let mid = lo + 0.5 * h;
            rule.iter().map(|&(x, w)| w * f(mid + 0.5 * h * x)).sum::<Complex64>() * (0.5 * h)
        })
        .collect();
    let mut acc = CompensatedComplex::default();
    for v in partial {
        acc.add(v);
    }
    acc.value()
}

/// Doubles the panel count from `initial_panels` until two consecutive
/// levels agree to `settings.rel_tol`.
pub fn adaptive_gl<F>(
    f: &F,
    a: f64,
    b: f64,
    initial_panels: usize,
    settings: &QuadratureSettings,
) -> Result<Integral<Complex64>>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    let mut panels = initial_panels.max(1);
    let mut prev = composite_gl(f, a, b, panels);
    for level in 1..=settings.max_refinements {
        panels *= 2;
        let next = composite_gl(f, a, b, panels);
        let diff = (next - prev).norm();
        if diff <= settings.rel_tol * next.norm().max(settings.abs_floor) {
            return Ok(Integral {
                value: next,
                level_difference: diff,
                levels: level + 1,
            });
        }
        prev = next;
    }
    Err(Error::Accuracy(format!(
        "Gauss-Legendre quadrature on [{a}, {b}] did not converge with {panels} panels"
    )))
}

pub fn adaptive_gl_real<F>(
    f: &F,
    a: f64,
    b: f64,
    initial_panels: usize,
    settings: &QuadratureSettings,
) -> Result<Integral<f64>>
where
    F: Fn(f64) -> f64 + Sync,
{
    let g = |t: f64| Complex64::new(f(t), 0.0);
    let r = adaptive_gl(&g, a, b, initial_panels, settings)?;
    Ok(Integral {
        value: r.value.re,
        level_difference: r.level_difference,
        levels: r.levels,
    })
}

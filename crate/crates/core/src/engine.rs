//! Resonance moments, the lower-bound certificate and the grid scan of
//! `|sum_{n<=T} (log n)^l n^(-1-it)|` over `[T, 2T]`.
//!
//! With `R(t) = sum_{m in M} m^(it)` and the weight `phi(t/T)`,
//!
//! ```text
//! M1 = int |R(t)|^2 phi(t/T) dt
//! M2 = int (-1)^l zeta^(l)(1+it) |R(t)|^2 phi(t/T) dt
//! ```
//!
//! and `max_{[T,2T]} |zeta^(l)(1+it)| >= |M2| / M1`.
//!
//! Both integrands are trigonometric polynomials times a smooth bump, so the
//! trapezoid rule on `[T, 2T]` converges spectrally once the step resolves
//! the largest frequency. Grids are evaluated with [`crate::nufft`].

use std::f64::consts::PI;

use log::warn;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bump::bump_phi;
use crate::error::{Error, Result};
use crate::nufft::{exp_sum_at, exp_sum_grid, UniformGrid};
use crate::primes::{iterated_log, iterated_log_of_log, sieve_primes, EXP_GAMMA_LITERAL};
use crate::quadrature::{CompensatedComplex, Integral, QuadratureSettings};
use crate::resonator::{FactoredElement, Resonator, ResonatorSpec, DEFAULT_ENUMERATION_CAP};
use crate::zeta::em_tail_derivative;

fn exp_gamma() -> f64 {
    EXP_GAMMA_LITERAL.parse().expect("literal parses")
}

/// Parameters prescribed for height `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremParameters {
    #[serde(rename = "T")]
    pub t: f64,
    pub log_t: f64,
    pub x: f64,
    pub b: u32,
    #[serde(rename = "J")]
    pub j: u32,
    /// `log P` for `P = prod_{p<=x} p^(b-1)`.
    pub log_modulus: f64,
    /// Whether `P <= sqrt(T)`.
    pub modulus_ok: bool,
}

/// `x = log T / (3 log_2 T)`, `b = floor(log_2 T)`, `J = floor(log_3 T / 2)`,
/// with `b, J >= 1`.
pub fn theorem_parameters(t: f64) -> Result<TheoremParameters> {
    if !(t >= 100.0) || !t.is_finite() {
        return Err(Error::Domain(format!("theorem parameters need T >= 100, got {t}")));
    }
    theorem_parameters_from_log(t.ln())
}

/// [`theorem_parameters`] from `log T`, for heights beyond the double range.
pub fn theorem_parameters_from_log(log_t: f64) -> Result<TheoremParameters> {
    if !(log_t >= 100f64.ln()) || !log_t.is_finite() {
        return Err(Error::Domain(format!(
            "theorem parameters need log T >= log 100, got {log_t}"
        )));
    }
    let log2 = iterated_log_of_log(log_t, 1)?;
    let log3 = iterated_log_of_log(log_t, 2)?;
    let x = log_t / (3.0 * log2);
    let b = (log2.floor() as u32).max(1);
    let j = ((0.5 * log3).floor().max(0.0) as u32).max(1);
    if x < 2.0 {
        warn!("x = {x} < 2: no primes, the resonator is trivial");
    }
    let log_modulus = if x >= 2.0 {
        let table = sieve_primes(x.floor() as u64)?;
        (b - 1) as f64 * table.primes().iter().map(|&p| (p as f64).ln()).sum::<f64>()
    } else {
        0.0
    };
    let modulus_ok = log_modulus <= 0.5 * log_t;
    if !modulus_ok {
        warn!("P = exp({log_modulus}) exceeds sqrt(T)");
    }
    Ok(TheoremParameters {
        t: log_t.exp(),
        log_t,
        x,
        b,
        j,
        log_modulus,
        modulus_ok,
    })
}

/// `R(t) = sum_m m^(it)` over the given elements.
pub fn resonator_eval(elements: &[FactoredElement], primes: &[u64], t: f64) -> Result<Complex64> {
    if elements.is_empty() {
        return Err(Error::Domain("resonator needs at least one element".into()));
    }
    let mut acc = CompensatedComplex::default();
    for m in elements {
        acc.add(Complex64::from_polar(1.0, t * m.log_value(primes)));
    }
    Ok(acc.value())
}

/// Which function multiplies `|R|^2 phi` in `M2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntegrandMode {
    /// `sum_{n<=T} (log n)^l n^(-1-it)`.
    Dirichlet,
    /// `(-1)^l zeta^(l)(1+it)` from Euler-Maclaurin and Cauchy circles.
    Oracle,
}

/// Default settings for the moment integrals.
pub fn moment_settings() -> QuadratureSettings {
    QuadratureSettings {
        rel_tol: 1e-8,
        abs_floor: 0.0,
        max_refinements: 4,
    }
}

/// The resonator prepared for evaluation at height `T`.
struct Setup {
    log_elements: Vec<f64>,
    log_modulus: f64,
}

impl Setup {
    fn new(spec: &ResonatorSpec, big_t: f64) -> Result<Self> {
        if !(big_t >= 2.0) || !big_t.is_finite() {
            return Err(Error::Domain(format!("height T must be >= 2, got {big_t}")));
        }
        let res = Resonator::new(*spec)?;
        let elements = res.enumerate(DEFAULT_ENUMERATION_CAP)?;
        let log_elements: Vec<f64> = elements.iter().map(|m| m.log_value(res.primes())).collect();
        let log_modulus = res.log_modulus();
        if log_modulus > 0.5 * big_t.ln() {
            warn!(
                "P = exp({log_modulus}) exceeds sqrt(T) = exp({}); off-diagonal terms are not controlled",
                0.5 * big_t.ln()
            );
        }
        Ok(Setup {
            log_elements,
            log_modulus,
        })
    }

    fn resonator_grid(&self, grid: UniformGrid) -> Result<Vec<Complex64>> {
        // R(t) = sum exp(-i t (-log m))
        let freqs: Vec<f64> = self.log_elements.iter().map(|v| -v).collect();
        let coeffs = vec![Complex64::new(1.0, 0.0); freqs.len()];
        exp_sum_grid(&freqs, &coeffs, grid)
    }
}

/// Coefficients of `sum_{n<=cutoff} (log n)^l n^(-1) n^(-it)` as
/// frequencies `log n`.
fn dirichlet_terms(cutoff: f64, ell: u32) -> (Vec<f64>, Vec<Complex64>) {
    let n_max = cutoff.floor() as u64;
    let mut freqs = Vec::with_capacity(n_max as usize);
    let mut coeffs = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let log_n = (n as f64).ln();
        let amp = if ell == 0 { 1.0 } else { log_n.powi(ell as i32) };
        freqs.push(log_n);
        coeffs.push(Complex64::new(amp / n as f64, 0.0));
    }
    (freqs, coeffs)
}

/// Trapezoid rule for `int_T^{2T} f(t) dt` where `f` vanishes at both ends and
/// contains frequencies up to `bandwidth`. The step halves until two levels
/// agree to `settings.rel_tol`.
fn trapezoid<F>(big_t: f64, bandwidth: f64, settings: &QuadratureSettings, eval: F) -> Result<Integral<Complex64>>
where
    F: Fn(UniformGrid) -> Result<Vec<Complex64>>,
{
    let target_step = 2.0 * PI / (1.25 * bandwidth + 2.0);
    let mut count = (big_t / target_step).ceil().max(16.0) as usize;
    let mut step = big_t / count as f64;
    let sum_of = |grid: UniformGrid| -> Result<Complex64> {
        let mut acc = CompensatedComplex::default();
        for v in eval(grid)? {
            acc.add(v);
        }
        Ok(acc.value())
    };
    let mut value = sum_of(UniformGrid {
        start: big_t,
        step,
        count: count + 1,
    })? * step;
    for level in 1..=settings.max_refinements {
        let mid = sum_of(UniformGrid {
            start: big_t + 0.5 * step,
            step,
            count,
        })?;
        let next = 0.5 * value + 0.5 * step * mid;
        let diff = (next - value).norm();
        count *= 2;
        step *= 0.5;
        value = next;
        if diff <= settings.rel_tol * next.norm().max(settings.abs_floor) {
            return Ok(Integral {
                value,
                level_difference: diff,
                levels: level + 1,
            });
        }
    }
    Err(Error::Accuracy(format!(
        "moment quadrature on [{big_t}, {}] did not settle with {count} intervals",
        2.0 * big_t
    )))
}

fn weighted(values: &mut [Complex64], grid: UniformGrid, big_t: f64) {
    values
        .par_iter_mut()
        .enumerate()
        .for_each(|(j, v)| *v *= bump_phi(grid.point(j) / big_t));
}

/// `M1 = int |R(t)|^2 phi(t/T) dt`.
pub fn moment_m1(spec: &ResonatorSpec, big_t: f64, settings: &QuadratureSettings) -> Result<Integral<f64>> {
    let setup = Setup::new(spec, big_t)?;
    let r = trapezoid(big_t, 2.0 * setup.log_modulus, settings, |grid| {
        let mut values: Vec<Complex64> = setup
            .resonator_grid(grid)?
            .into_iter()
            .map(|r| Complex64::new(r.norm_sqr(), 0.0))
            .collect();
        weighted(&mut values, grid, big_t);
        Ok(values)
    })?;
    Ok(Integral {
        value: r.value.re,
        level_difference: r.level_difference,
        levels: r.levels,
    })
}

/// Euler-Maclaurin order used for the tail in oracle mode.
const ORACLE_EM_ORDER: u32 = 40;

/// `M2 = int F(t) |R(t)|^2 phi(t/T) dt` with `F` chosen by `mode`.
///
/// In oracle mode `F` is split as `sum_{n<N} (log n)^l n^(-1-it)` plus the
/// Cauchy-circle derivative of the Euler-Maclaurin tail, with `N = T/2`.
pub fn moment_m2(
    spec: &ResonatorSpec,
    big_t: f64,
    ell: u32,
    settings: &QuadratureSettings,
    mode: IntegrandMode,
) -> Result<Integral<Complex64>> {
    let setup = Setup::new(spec, big_t)?;
    let (cutoff, head_cut) = match mode {
        IntegrandMode::Dirichlet => (big_t.floor(), None),
        IntegrandMode::Oracle => {
            if big_t < 100.0 {
                return Err(Error::Domain(format!("oracle mode needs T >= 100, got {big_t}")));
            }
            let cut = (big_t / 2.0).ceil() as u64;
            ((cut - 1) as f64, Some(cut))
        }
    };
    let (freqs, coeffs) = dirichlet_terms(cutoff, ell);
    let bandwidth = cutoff.max(1.0).ln() + 2.0 * setup.log_modulus;
    trapezoid(big_t, bandwidth, settings, |grid| {
        let mut values = exp_sum_grid(&freqs, &coeffs, grid)?;
        if let Some(cut) = head_cut {
            let tails = (0..grid.count)
                .into_par_iter()
                .map(|j| em_tail_derivative(Complex64::new(1.0, grid.point(j)), ell, ORACLE_EM_ORDER, cut))
                .collect::<Result<Vec<_>>>()?;
            for (v, tail) in values.iter_mut().zip(tails) {
                *v += tail;
            }
        }
        let r = setup.resonator_grid(grid)?;
        for (v, r) in values.iter_mut().zip(r) {
            *v *= r.norm_sqr();
        }
        weighted(&mut values, grid, big_t);
        Ok(values)
    })
}

/// `|M2| / M1` with the value it is expected to approach.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// `|M2| / M1`, a lower bound for the maximum of `|zeta^(l)(1+it)|`.
    pub ratio: f64,
    /// `S(x; l) / |M|`.
    pub rhs_prediction: f64,
    pub m1: f64,
    pub m2_re: f64,
    pub m2_im: f64,
    pub cardinality: usize,
    pub log_modulus: f64,
}

pub fn certificate(spec: &ResonatorSpec, big_t: f64, ell: u32) -> Result<Certificate> {
    certificate_with(spec, big_t, ell, &moment_settings(), IntegrandMode::Dirichlet)
}

pub fn certificate_with(
    spec: &ResonatorSpec,
    big_t: f64,
    ell: u32,
    settings: &QuadratureSettings,
    mode: IntegrandMode,
) -> Result<Certificate> {
    if !(big_t >= 2.0) {
        return Err(Error::Domain(format!("height T must be >= 2, got {big_t}")));
    }
    let res = Resonator::new(*spec)?;
    let log_modulus = res.log_modulus();
    if log_modulus > 0.5 * big_t.ln() {
        return Err(Error::Constraint(format!(
            "P = exp({log_modulus:.6}) exceeds sqrt(T) = exp({:.6})",
            0.5 * big_t.ln()
        )));
    }
    let m1 = moment_m1(spec, big_t, settings)?.value;
    let m2 = moment_m2(spec, big_t, ell, settings, mode)?.value;
    let rhs_prediction = res.s_over_m_jet::<f64>((), ell)?;
    let cardinality = res.enumerate(DEFAULT_ENUMERATION_CAP)?.len();
    Ok(Certificate {
        ratio: m2.norm() / m1,
        rhs_prediction,
        m1,
        m2_re: m2.re,
        m2_im: m2.im,
        cardinality,
        log_modulus,
    })
}

/// `e^gamma/(l+1) (log_2 T)^(l+1)` and
/// `e^gamma l^l/(l+1)^(l+1) (log_2 T - log_3 T)^(l+1)`, lower-order terms
/// dropped. `T` is given through `log T`.
pub fn main_terms_from_log(log_t: f64, ell: u32) -> Result<(f64, f64)> {
    let log2 = iterated_log_of_log(log_t, 1)?;
    let log3 = iterated_log_of_log(log_t, 2)?;
    if !(log3 > 0.0) {
        return Err(Error::Domain(format!("main terms need T > e^e, got log T = {log_t}")));
    }
    let lf = ell as f64;
    let eg = exp_gamma();
    let new_bound = eg / (lf + 1.0) * log2.powi(ell as i32 + 1);
    let yang_bound = eg * lf.powi(ell as i32) / (lf + 1.0).powi(ell as i32 + 1) * (log2 - log3).powi(ell as i32 + 1);
    Ok((new_bound, yang_bound))
}

pub fn main_terms(big_t: f64, ell: u32) -> Result<(f64, f64)> {
    if !(big_t > 0.0) || !big_t.is_finite() {
        return Err(Error::Domain(format!("height T = {big_t} is not usable")));
    }
    main_terms_from_log(big_t.ln(), ell)
}

/// Result of [`scan_max`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    #[serde(rename = "T")]
    pub big_t: f64,
    pub ell: u32,
    pub grid_step: f64,
    pub argmax_t: f64,
    pub max_value: f64,
    pub certificate_ratio: Option<f64>,
    pub theoretical_constant: f64,
    pub yang_constant: f64,
    pub refined: bool,
    /// `(t, value)` at every grid point.
    #[serde(skip)]
    pub samples: Vec<(f64, f64)>,
}

/// Number of local maxima refined by golden-section search.
pub const REFINE_BRACKETS: usize = 10;
const GOLDEN_ITERATIONS: usize = 40;

/// Largest step [`scan_max`] accepts at height `T`.
pub fn max_scan_step(big_t: f64) -> f64 {
    PI / (4.0 * big_t.ln())
}

/// Maximum of `|sum_{n<=T} (log n)^l n^(-1-it)|` over a grid on `[T, 2T]`.
///
/// The grid contains both endpoints with spacing at most `step`. Ties go to
/// the smallest `t`. With `refine`, golden-section search runs around the
/// [`REFINE_BRACKETS`] largest local maxima. A resonator spec adds the
/// certificate ratio for comparison.
pub fn scan_max(big_t: f64, ell: u32, step: f64, refine: bool, spec: Option<&ResonatorSpec>) -> Result<ScanReport> {
    if !(big_t >= 16.0) || !big_t.is_finite() {
        return Err(Error::Domain(format!("scan needs T >= 16, got {big_t}")));
    }
    let limit = max_scan_step(big_t);
    if !(step > 0.0) || step > limit {
        return Err(Error::Domain(format!(
            "grid step {step} exceeds pi/(4 log T) = {limit}"
        )));
    }
    let certificate_ratio = match spec {
        Some(s) => Some(certificate(s, big_t, ell)?.ratio),
        None => None,
    };
    let intervals = (big_t / step).ceil() as usize;
    let grid = UniformGrid {
        start: big_t,
        step: big_t / intervals as f64,
        count: intervals + 1,
    };
    let (freqs, coeffs) = dirichlet_terms(big_t, ell);
    let values: Vec<f64> = exp_sum_grid(&freqs, &coeffs, grid)?
        .into_iter()
        .map(|v| v.norm())
        .collect();

    let (best_idx, mut best) = values
        .par_iter()
        .enumerate()
        .map(|(i, &v)| (i, v))
        .reduce(|| (usize::MAX, f64::NEG_INFINITY), pick_max);
    let mut argmax_t = grid.point(best_idx);
    if refine {
        let f = |t: f64| exp_sum_at(&freqs, &coeffs, t).norm();
        let mut peaks: Vec<usize> = (0..values.len())
            .filter(|&i| {
                (i == 0 || values[i] >= values[i - 1]) && (i + 1 == values.len() || values[i] >= values[i + 1])
            })
            .collect();
        peaks.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
        peaks.truncate(REFINE_BRACKETS);
        let refined: Vec<(f64, f64)> = peaks
            .par_iter()
            .map(|&i| {
                let lo = grid.point(i.saturating_sub(1));
                let hi = grid.point((i + 1).min(values.len() - 1));
                golden_section_max(&f, lo, hi)
            })
            .collect();
        for (t, v) in refined {
            if v > best || (v == best && t < argmax_t) {
                best = v;
                argmax_t = t;
            }
        }
    }
    let (theoretical_constant, yang_constant) = main_terms(big_t, ell)?;
    let samples = values.iter().enumerate().map(|(i, &v)| (grid.point(i), v)).collect();
    Ok(ScanReport {
        big_t,
        ell,
        grid_step: grid.step,
        argmax_t,
        max_value: best,
        certificate_ratio,
        theoretical_constant,
        yang_constant,
        refined: refine,
        samples,
    })
}

fn pick_max(a: (usize, f64), b: (usize, f64)) -> (usize, f64) {
    if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
        b
    } else {
        a
    }
}

/// Golden-section search for a maximum of `f` on `[lo, hi]`; returns the best
/// point seen, endpoints included.
fn golden_section_max<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut best = [(lo, f(lo)), (hi, f(hi))]
        .into_iter()
        .fold((lo, f64::NEG_INFINITY), |x, y| if y.1 > x.1 { y } else { x });
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..GOLDEN_ITERATIONS {
        for (t, v) in [(c, fc), (d, fd)] {
            if v > best.1 || (v == best.1 && t < best.0) {
                best = (t, v);
            }
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    best
}

/// `log_j T` helper re-exported for callers that only hold `T`.
pub fn log_log(big_t: f64) -> Result<f64> {
    iterated_log(big_t, 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bump::{BumpWeight, PHI_HAT_ZERO};
    use crate::zeta::{dirichlet_poly, EvalPoint};

    fn spec(x: f64, b: u32) -> ResonatorSpec {
        ResonatorSpec::new(x, b, 1).unwrap()
    }

    /// `T sum phi_hat(T log(n m' / m)) a_n` over pairs `m, m'` and the `n`
    /// close enough to `m/m'` for `phi_hat` to matter.
    fn moment_by_transform(spec: &ResonatorSpec, big_t: f64, terms: &[(u64, f64)]) -> Complex64 {
        let res = Resonator::new(*spec).unwrap();
        let logs: Vec<f64> = res
            .enumerate(1000)
            .unwrap()
            .iter()
            .map(|m| m.log_value(res.primes()))
            .collect();
        let w = BumpWeight::default();
        let mut acc = Complex64::new(0.0, 0.0);
        for &lm in &logs {
            for &lm2 in &logs {
                for &(n, a) in terms {
                    let xi = big_t * ((n as f64).ln() + lm2 - lm);
                    if xi.abs() <= 3000.0 {
                        acc += w.phi_hat(xi).unwrap() * a;
                    }
                }
            }
        }
        acc * big_t
    }

    #[test]
    fn parameters_follow_the_recipe() {
        let p = theorem_parameters(1e6).unwrap();
        let log_t = 1e6f64.ln();
        assert!((p.x - log_t / (3.0 * log_t.ln())).abs() < 1e-14);
        assert!((p.x - 1.7537).abs() < 2e-4, "{}", p.x);
        assert_eq!((p.b, p.j), (2, 1));
        assert!(p.modulus_ok);
        // log_2 T = e^e
        let p = theorem_parameters_from_log(std::f64::consts::E.exp().exp()).unwrap();
        assert_eq!(p.b, 15);
        // T = e^(e^e) itself has log_2 T = e
        assert_eq!(theorem_parameters(std::f64::consts::E.exp().exp()).unwrap().b, 2);
        let p = theorem_parameters(100.0).unwrap();
        let log_t = 100f64.ln();
        assert!((p.x - log_t / (3.0 * log_t.ln())).abs() < 1e-14 && p.x < 2.0);
        assert!(theorem_parameters(50.0).is_err());
        let p = theorem_parameters_from_log(1e6).unwrap();
        assert!(p.x > 2.0 && p.b == 13 && p.modulus_ok);
    }

    #[test]
    fn resonator_values() {
        let res = Resonator::new(spec(3.0, 2)).unwrap();
        let elements = res.enumerate(100).unwrap();
        assert_eq!(
            resonator_eval(&elements, res.primes(), 0.0).unwrap(),
            Complex64::new(4.0, 0.0)
        );
        let t = PI / 6f64.ln();
        let v = resonator_eval(&elements, res.primes(), t).unwrap();
        let direct: Complex64 = [1.0f64, 2.0, 3.0, 6.0]
            .iter()
            .map(|m| Complex64::from_polar(1.0, t * m.ln()))
            .sum();
        assert!((v - direct).norm() < 1e-14 && v.norm() <= 4.0);
        let trivial = Resonator::new(spec(5.0, 1)).unwrap();
        let one = trivial.enumerate(10).unwrap();
        assert!((resonator_eval(&one, trivial.primes(), 123.4).unwrap() - 1.0).norm() < 1e-15);
        assert!(resonator_eval(&[], &[], 0.0).is_err());
    }

    #[test]
    fn m1_trivial_resonator() {
        let m1 = moment_m1(&spec(2.0, 1), 1e4, &moment_settings()).unwrap().value;
        assert!((m1 / (PHI_HAT_ZERO * 1e4) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn m1_diagonal() {
        for (x, b, big_t) in [(3.0, 2, 1e4), (3.0, 3, 1e3), (5.0, 2, 1e4), (3.0, 3, 1e5)] {
            let s = spec(x, b);
            let m1 = moment_m1(&s, big_t, &moment_settings()).unwrap().value;
            assert!(m1 > 0.0);
            let size = (b as f64).powi(Resonator::new(s).unwrap().prime_count() as i32);
            let diag = big_t * PHI_HAT_ZERO * size;
            assert!(
                (m1 - diag).abs() <= 1e3 * size * size / big_t,
                "{x} {b} {big_t}: {m1} vs {diag}"
            );
            assert!((m1 / diag - 1.0).abs() <= 1e-3);
        }
    }

    #[test]
    fn m1_matches_transform_sum() {
        let s = spec(3.0, 3);
        let big_t = 300.0;
        let m1 = moment_m1(&s, big_t, &moment_settings()).unwrap().value;
        let oracle = moment_by_transform(&s, big_t, &[(1, 1.0)]);
        assert!(
            (m1 - oracle.re).abs() < 1e-7 * m1 && oracle.im.abs() < 1e-7 * m1,
            "{m1} vs {oracle}"
        );
    }

    #[test]
    fn m2_matches_transform_sum() {
        let s = spec(3.0, 2);
        let big_t = 300.0;
        for ell in 0..=2u32 {
            let m2 = moment_m2(&s, big_t, ell, &moment_settings(), IntegrandMode::Dirichlet)
                .unwrap()
                .value;
            let terms: Vec<(u64, f64)> = (1..=300u64)
                .map(|n| (n, (n as f64).ln().powi(ell as i32) / n as f64))
                .collect();
            let oracle = moment_by_transform(&s, big_t, &terms);
            assert!(
                (m2 - oracle).norm() < 1e-7 * oracle.norm(),
                "ell={ell}: {m2} vs {oracle}"
            );
        }
    }

    #[test]
    fn m2_trivial_resonator() {
        let settings = moment_settings();
        let s = spec(2.0, 1);
        let m1 = moment_m1(&s, 1e4, &settings).unwrap().value;
        let m2 = moment_m2(&s, 1e4, 0, &settings, IntegrandMode::Dirichlet)
            .unwrap()
            .value;
        assert!((m2 / m1 - 1.0).norm() <= 0.02);
    }

    #[test]
    fn modes_agree_within_the_approximation_error() {
        let s = spec(3.0, 2);
        let big_t = 1e3;
        let settings = moment_settings();
        let m1 = moment_m1(&s, big_t, &settings).unwrap().value;
        for ell in 0..=1u32 {
            let d = moment_m2(&s, big_t, ell, &settings, IntegrandMode::Dirichlet)
                .unwrap()
                .value;
            let o = moment_m2(&s, big_t, ell, &settings, IntegrandMode::Oracle)
                .unwrap()
                .value;
            let scale = log_log(big_t).unwrap().powi(ell as i32);
            assert!((d - o).norm() / m1 <= 10.0 * scale, "ell={ell}: {d} vs {o}");
        }
    }

    #[test]
    fn certificate_trivial_and_constraint() {
        let c = certificate(&spec(2.0, 1), 1e4, 0).unwrap();
        assert_eq!(c.rhs_prediction, 1.0);
        assert!((c.ratio - 1.0).abs() < 0.02);
        // P = 2^3 3^3 5^3 = 27000 > sqrt(1e4)
        assert!(matches!(certificate(&spec(5.0, 4), 1e4, 0), Err(Error::Constraint(_))));
    }

    #[test]
    fn certificate_small_resonator() {
        let c = certificate(&spec(3.0, 2), 1e5, 0).unwrap();
        assert!((c.rhs_prediction - 35.0 / 24.0).abs() < 1e-14);
        assert!((c.ratio / c.rhs_prediction - 1.0).abs() < 0.05, "{c:?}");
    }

    #[test]
    fn scan_basics() {
        let big_t = 2000.0;
        let step = max_scan_step(big_t);
        let r = scan_max(big_t, 0, step, false, None).unwrap();
        let at_t = dirichlet_poly(&EvalPoint::new(big_t, 0, big_t).unwrap()).norm();
        assert!(r.max_value >= at_t - 1e-12);
        assert!(r.samples.iter().all(|&(_, v)| v <= r.max_value));
        assert!((big_t..=2.0 * big_t).contains(&r.argmax_t));
        assert_eq!(r.samples.first().unwrap().0, big_t);
        assert!((r.samples.last().unwrap().0 - 2.0 * big_t).abs() < 1e-9);
        let again = scan_max(big_t, 0, step, false, None).unwrap();
        assert_eq!(r, again);
        let refined = scan_max(big_t, 0, step, true, None).unwrap();
        assert!(refined.max_value >= r.max_value);
        assert!(scan_max(big_t, 0, 2.0 * step, false, None).is_err());
    }

    #[test]
    fn scan_grid_values_are_the_polynomial() {
        let big_t = 500.0;
        let r = scan_max(big_t, 1, 0.05, false, None).unwrap();
        for &(t, v) in r.samples.iter().step_by(997) {
            let direct = dirichlet_poly(&EvalPoint::new(t, 1, big_t).unwrap()).norm();
            assert!((v - direct).abs() < 1e-10 * direct.max(1.0));
        }
    }

    #[test]
    fn main_term_constants() {
        let (new, yang) = main_terms(1e30, 1).unwrap();
        let log2 = 1e30f64.ln().ln();
        let log3 = log2.ln();
        let eg = exp_gamma();
        assert!((new - eg / 2.0 * log2 * log2).abs() < 1e-12 * new);
        assert!((yang - eg / 4.0 * (log2 - log3).powi(2)).abs() < 1e-12 * yang);
        let (n0, y0) = main_terms(1e30, 0).unwrap();
        assert!((n0 - eg * log2).abs() < 1e-12 && (y0 - eg * (log2 - log3)).abs() < 1e-12);
        assert!(main_terms(10.0, 1).is_err());
    }

    #[test]
    fn golden_section_finds_peak() {
        let f = |t: f64| -(t - 0.3).powi(2);
        let (t, v) = golden_section_max(&f, 0.0, 1.0);
        assert!((t - 0.3).abs() < 1e-7 && v <= 0.0);
    }
}

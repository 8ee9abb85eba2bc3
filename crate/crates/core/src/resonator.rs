//! The divisor-closed resonator set and the weighted reciprocal sum.
//!
//! For a smoothness bound `x`, an exponent cap `b` and a layer count `J`:
//!
//! * `P = prod_{p<=x} p^(b-1)` and `M` is the set of divisors of `P`;
//! * `M_j` is the set of divisors of `prod_{p <= x^(j/J)} p^(b-1)`;
//! * `w(k) = #{m in M : k | m} = prod_{p<=x} (b - nu_p(k))`;
//! * `S(x; l) = sum_{m in M} sum_{k | m} (log k)^l / k = sum_{k in M} w(k) (log k)^l / k`.
//!
//! `S` is available by brute-force enumeration of `M` and, for any size of
//! `M`, through the Euler product `F(s) = sum_{k in M} w(k) k^(-s)`, since
//! `S(x; l) = (-1)^l F^(l)(1)`.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{jet_product, local_factor_jet};
use crate::precision::{Precision, Real};
use crate::primes::{self, sieve_primes, PrimeTable};
use crate::with_precision;

/// Default refusal threshold for enumerating `M`.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonatorSpec {
    /// Smoothness bound.
    pub x: f64,
    /// One more than the largest allowed exponent.
    pub b: u32,
    /// Number of layers in the partition of `M`.
    #[serde(rename = "J")]
    pub j: u32,
}

impl ResonatorSpec {
    pub fn new(x: f64, b: u32, j: u32) -> Result<Self> {
        if !(x >= 2.0) || !x.is_finite() {
            return Err(Error::Domain(format!("smoothness bound x must be >= 2, got {x}")));
        }
        if x > primes::MAX_SIEVE_LIMIT as f64 {
            return Err(Error::Domain(format!("smoothness bound {x} is too large")));
        }
        if b == 0 {
            return Err(Error::Domain("b must be >= 1".into()));
        }
        if j == 0 {
            return Err(Error::Domain("J must be >= 1".into()));
        }
        Ok(ResonatorSpec { x, b, j })
    }
}

/// An element `k = prod p^(nu_p)` of `M`, stored by its exponent vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactoredElement {
    exponents: Vec<u32>,
}

impl FactoredElement {
    pub fn new(exponents: Vec<u32>) -> Self {
        FactoredElement { exponents }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// `log k` from the exponent vector.
    pub fn log_value(&self, primes: &[u64]) -> f64 {
        self.exponents
            .iter()
            .zip(primes)
            .filter(|(&e, _)| e > 0)
            .map(|(&e, &p)| e as f64 * (p as f64).ln())
            .sum()
    }

    pub fn log_value_in<R: Real>(&self, ctx: R::Ctx, primes: &[u64]) -> R {
        self.exponents
            .iter()
            .zip(primes)
            .filter(|(&e, _)| e > 0)
            .fold(R::zero(ctx), |acc, (&e, &p)| {
                acc + R::from_i64(ctx, e as i64) * R::from_i64(ctx, p as i64).ln()
            })
    }

    /// `1/k` without forming `k`.
    pub fn reciprocal_in<R: Real>(&self, ctx: R::Ctx, primes: &[u64]) -> R {
        self.exponents
            .iter()
            .zip(primes)
            .filter(|(&e, _)| e > 0)
            .fold(R::one(ctx), |acc, (&e, &p)| acc / R::from_i64(ctx, p as i64).powi(e))
    }

    pub fn value(&self, primes: &[u64]) -> BigUint {
        self.exponents
            .iter()
            .zip(primes)
            .fold(BigUint::from(1u32), |acc, (&e, &p)| acc * BigUint::from(p).pow(e))
    }
}

/// A [`ResonatorSpec`] together with the primes up to `x`.
#[derive(Debug, Clone)]
pub struct Resonator {
    spec: ResonatorSpec,
    table: PrimeTable,
}

impl Resonator {
    pub fn new(spec: ResonatorSpec) -> Result<Self> {
        let table = sieve_primes(spec.x.floor() as u64)?;
        Ok(Resonator { spec, table })
    }

    pub fn spec(&self) -> &ResonatorSpec {
        &self.spec
    }

    /// The primes `p <= x`.
    pub fn primes(&self) -> &[u64] {
        self.table.primes()
    }

    pub fn prime_count(&self) -> usize {
        self.table.len()
    }

    /// The primes `p <= x^(i/J)`.
    pub fn layer_primes(&self, i: u32) -> Result<&[u64]> {
        if i > self.spec.j {
            return Err(Error::Domain(format!("layer {i} outside 0..={}", self.spec.j)));
        }
        self.table.primes_below_power(self.spec.x, i, self.spec.j)
    }

    /// `|M| = b^pi(x)`.
    pub fn cardinality(&self) -> BigUint {
        BigUint::from(self.spec.b).pow(self.prime_count() as u32)
    }

    /// `P = prod_{p<=x} p^(b-1)`.
    pub fn modulus(&self) -> BigUint {
        self.primes().iter().fold(BigUint::from(1u32), |acc, &p| {
            acc * BigUint::from(p).pow(self.spec.b - 1)
        })
    }

    /// `log P`.
    pub fn log_modulus(&self) -> f64 {
        (self.spec.b - 1) as f64 * self.primes().iter().map(|&p| (p as f64).ln()).sum::<f64>()
    }

    fn check_cap(&self, cap: u64) -> Result<u64> {
        let size = self.cardinality();
        match u64::try_from(&size) {
            Ok(n) if n <= cap => Ok(n),
            _ => Err(Error::CapExceeded {
                size: size.to_string(),
                cap,
            }),
        }
    }

    /// Every element of `M` exactly once, in mixed-radix order (exponent of
    /// the smallest prime varying fastest).
    pub fn enumerate(&self, cap: u64) -> Result<Vec<FactoredElement>> {
        let n = self.check_cap(cap)? as usize;
        let b = self.spec.b;
        let width = self.prime_count();
        let mut out = Vec::with_capacity(n);
        let mut digits = vec![0u32; width];
        loop {
            out.push(FactoredElement::new(digits.clone()));
            let mut pos = 0;
            loop {
                if pos == width {
                    return Ok(out);
                }
                digits[pos] += 1;
                if digits[pos] < b {
                    break;
                }
                digits[pos] = 0;
                pos += 1;
            }
        }
    }

    /// `w(k) = prod_{p<=x} (b - nu_p(k))`.
    pub fn weight(&self, k: &FactoredElement) -> Result<BigUint> {
        self.check_element(k)?;
        Ok(k.exponents()
            .iter()
            .fold(BigUint::from(1u32), |acc, &e| acc * BigUint::from(self.spec.b - e)))
    }

    fn check_element(&self, k: &FactoredElement) -> Result<()> {
        if k.exponents().len() != self.prime_count() {
            return Err(Error::Shape(format!(
                "exponent vector of length {} for {} primes",
                k.exponents().len(),
                self.prime_count()
            )));
        }
        for (&e, &p) in k.exponents().iter().zip(self.primes()) {
            if e >= self.spec.b {
                return Err(Error::NotInSet {
                    prime: p,
                    exponent: e,
                    b: self.spec.b,
                });
            }
        }
        Ok(())
    }

    fn weight_small(&self, k: &FactoredElement) -> i64 {
        k.exponents().iter().map(|&e| (self.spec.b - e) as i64).product()
    }

    /// `S(x; l)` by enumerating `M`. Terms are accumulated in descending `k`.
    pub fn s_brute<R: Real>(&self, ctx: R::Ctx, l: u32, cap: u64) -> Result<R> {
        let elements = self.enumerate(cap)?;
        let primes = self.primes();
        let mut terms: Vec<(f64, R)> = elements
            .iter()
            .map(|k| {
                let log_k = k.log_value_in::<R>(ctx, primes);
                let term = R::from_i64(ctx, self.weight_small(k)) * log_k.powi(l) * k.reciprocal_in::<R>(ctx, primes);
                (k.log_value(primes), term)
            })
            .collect();
        terms.sort_by(|a, b| b.0.total_cmp(&a.0));
        Ok(terms.into_iter().fold(R::zero(ctx), |acc, (_, t)| acc + t))
    }

    /// `S(x; l) / |M|` through the Euler product, with local factors
    /// normalized by `b` so the value stays representable for huge `M`.
    pub fn s_over_m_jet<R: Real>(&self, ctx: R::Ctx, l: u32) -> Result<R> {
        let order = l as usize;
        let factors = self
            .primes()
            .iter()
            .map(|&p| local_factor_jet::<R>(ctx, p, self.spec.b, order, true))
            .collect::<Result<Vec<_>>>()?;
        let product = jet_product(ctx, 1.0, order, factors)?;
        let d = product.derivative(order)?;
        Ok(if l % 2 == 1 { -d } else { d })
    }

    /// `S(x; l)` through the Euler product. Overflows to infinity in double
    /// precision once `|M|` exceeds the double range; use
    /// [`s_over_m_jet`](Self::s_over_m_jet) there.
    pub fn s_jet<R: Real>(&self, ctx: R::Ctx, l: u32) -> Result<R> {
        let order = l as usize;
        let factors = self
            .primes()
            .iter()
            .map(|&p| local_factor_jet::<R>(ctx, p, self.spec.b, order, false))
            .collect::<Result<Vec<_>>>()?;
        let product = jet_product(ctx, 1.0, order, factors)?;
        let d = product.derivative(order)?;
        Ok(if l % 2 == 1 { -d } else { d })
    }

    /// `prod_{p <= x^(i/J)} sum_{nu<b} (1 - nu/b) p^(-nu)`, i.e. the layer sum
    /// divided by `|M|`.
    pub fn layer_sum_over_m<R: Real>(&self, ctx: R::Ctx, i: u32) -> Result<R> {
        let b = R::from_i64(ctx, self.spec.b as i64);
        let mut product = R::one(ctx);
        for &p in self.layer_primes(i)? {
            let inv_p = R::one(ctx) / R::from_i64(ctx, p as i64);
            let mut local = R::zero(ctx);
            let mut pow = R::one(ctx);
            let floor = R::epsilon(ctx) * R::from_ratio(ctx, 1, 1000);
            for nu in 0..self.spec.b {
                let w = R::one(ctx) - R::from_i64(ctx, nu as i64) / b.clone();
                local = local + w * pow.clone();
                pow = pow * inv_p.clone();
                if pow < floor {
                    break;
                }
            }
            product = product * local;
        }
        Ok(product)
    }

    /// `sum_{k in M_i} w(k)/k` by the product form.
    pub fn layer_sum<R: Real>(&self, ctx: R::Ctx, i: u32) -> Result<R> {
        let m = R::from_i64(ctx, self.spec.b as i64).powi(self.prime_count() as u32);
        Ok(m * self.layer_sum_over_m::<R>(ctx, i)?)
    }

    /// `sum_{k in M_i} w(k)/k` by enumerating `M`.
    pub fn layer_sum_brute<R: Real>(&self, ctx: R::Ctx, i: u32, cap: u64) -> Result<R> {
        let inside = self.layer_primes(i)?.len();
        let primes = self.primes();
        let mut terms: Vec<(f64, R)> = self
            .enumerate(cap)?
            .into_iter()
            .filter(|k| k.exponents()[inside..].iter().all(|&e| e == 0))
            .map(|k| {
                let t = R::from_i64(ctx, self.weight_small(&k)) * k.reciprocal_in::<R>(ctx, primes);
                (k.log_value(primes), t)
            })
            .collect();
        terms.sort_by(|a, b| b.0.total_cmp(&a.0));
        Ok(terms.into_iter().fold(R::zero(ctx), |acc, (_, t)| acc + t))
    }

    /// `(log x)^l sum_{j=1}^{J} ((j-1)/J)^l [L(j) - L(j-1)] / |M|` with `L`
    /// the layer sums.
    pub fn partition_bound_over_m<R: Real>(&self, ctx: R::Ctx, l: u32) -> Result<R> {
        let jj = self.spec.j;
        let log_x = R::from_f64(ctx, self.spec.x).ln();
        let layers = (0..=jj)
            .map(|i| self.layer_sum_over_m::<R>(ctx, i))
            .collect::<Result<Vec<_>>>()?;
        let mut total = R::zero(ctx);
        for j in 1..=jj {
            let frac = R::from_ratio(ctx, (j - 1) as i64, jj as i64).powi(l);
            total = total + frac * (layers[j as usize].clone() - layers[j as usize - 1].clone());
        }
        Ok(log_x.powi(l) * total)
    }

    /// The partition lower bound for `S(x; l)`.
    pub fn partition_lower_bound<R: Real>(&self, ctx: R::Ctx, l: u32) -> Result<R> {
        let m = R::from_i64(ctx, self.spec.b as i64).powi(self.prime_count() as u32);
        Ok(m * self.partition_bound_over_m::<R>(ctx, l)?)
    }

    /// Lower bound of `S(x; l)/|M|` against its asymptotic target.
    pub fn proposition_report(&self, l: u32, precision: Precision) -> Result<PropositionReport> {
        let spec = self.spec;
        let (s_over_m, target, bound) = with_precision!(precision, |R, ctx| {
            let s = self.s_over_m_jet::<R>(ctx, l)?;
            let log_x = R::from_f64(ctx, spec.x).ln();
            let target = primes::exp_gamma::<R>(ctx) / R::from_i64(ctx, l as i64 + 1) * Real::powi(&log_x, l + 1);
            let bound = self.partition_bound_over_m::<R>(ctx, l)?;
            (s.to_f64(), target.to_f64(), bound.to_f64())
        });
        let jf = spec.j as f64;
        let log_x = spec.x.ln();
        let error_budget = 1.0 / jf + jf * log_x.ln() / spec.b as f64 + jf * jf / log_x;
        Ok(PropositionReport {
            s_over_m,
            target,
            ratio: s_over_m / target,
            error_budget,
            partition_bound_over_m: bound,
        })
    }
}

/// Comparison of `S(x; l)/|M|` with `(e^gamma/(l+1)) (log x)^(l+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropositionReport {
    #[serde(rename = "S_over_M")]
    pub s_over_m: f64,
    pub target: f64,
    pub ratio: f64,
    pub error_budget: f64,
    #[serde(rename = "partition_bound_over_M")]
    pub partition_bound_over_m: f64,
}

/// Partition bounds over several `J` for fixed `x`, `b`, `l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    /// `(J, partition bound / |M|)` in the order requested.
    pub bounds: Vec<(u32, f64)>,
    /// Whether the bounds never decrease along the list.
    pub nondecreasing: bool,
}

/// Evaluates the partition bound for each `J` in `js`. Decreases are
/// reported, not treated as errors.
pub fn partition_monotonicity(x: f64, b: u32, l: u32, js: &[u32], precision: Precision) -> Result<MonotonicityReport> {
    let bounds = js
        .iter()
        .map(|&j| {
            let res = Resonator::new(ResonatorSpec::new(x, b, j)?)?;
            let v = with_precision!(precision, |R, ctx| res.partition_bound_over_m::<R>(ctx, l)?.to_f64());
            Ok((j, v))
        })
        .collect::<Result<Vec<_>>>()?;
    let nondecreasing = bounds.windows(2).all(|w| w[1].1 >= w[0].1);
    Ok(MonotonicityReport { bounds, nondecreasing })
}

/// Left Riemann sum of `u^l` on `J` cells, the exact integral, and the
/// left sum plus `1/J`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiemannBracket {
    pub lower: f64,
    pub integral: f64,
    pub upper: f64,
}

pub fn riemann_sum_bracket(l: u32, j: u32) -> Result<RiemannBracket> {
    if j == 0 {
        return Err(Error::Domain("J must be >= 1".into()));
    }
    let jf = j as f64;
    let lower = (1..=j).map(|i| Real::powi(&((i - 1) as f64 / jf), l)).sum::<f64>() / jf;
    Ok(RiemannBracket {
        lower,
        integral: 1.0 / (l as f64 + 1.0),
        upper: lower + 1.0 / jf,
    })
}

/// `(1 + 1/l)^l`, the ratio between the `e^gamma/(l+1)` constant and the
/// older `e^gamma l^l/(l+1)^(l+1)` constant.
pub fn yang_factor(l: u32) -> Result<f64> {
    if l == 0 {
        return Err(Error::Domain("the factor is undefined for l = 0".into()));
    }
    let lf = l as f64;
    Ok((lf * (1.0 / lf).ln_1p()).exp())
}

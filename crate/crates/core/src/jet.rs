//! Truncated Taylor ("jet") arithmetic at a real center.
//!
//! A [`Jet`] of order `L` stores the Taylor-normalized coefficients
//! `c_k = f^(k)(center) / k!` for `k = 0..=L`. Multiplication is the Cauchy
//! product truncated at `L`, which is exact for the first `L + 1`
//! coefficients. This is all that is needed to differentiate the finite
//! Euler product `F(s) = prod_{p<=x} sum_{nu<b} (b - nu) p^(-nu s)` at `s = 1`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::precision::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct Jet<R: Real> {
    center: f64,
    coeffs: Vec<R>,
}

impl<R: Real> Jet<R> {
    pub fn new(center: f64, coeffs: Vec<R>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Shape("a jet needs at least one coefficient".into()));
        }
        if coeffs.iter().any(|c| !c.to_f64().is_finite()) {
            return Err(Error::Shape("non-finite jet coefficient".into()));
        }
        Ok(Jet { center, coeffs })
    }

    /// The multiplicative identity `1 + 0u + ... + 0u^L`.
    pub fn identity(ctx: R::Ctx, center: f64, order: usize) -> Self {
        let mut coeffs = vec![R::zero(ctx); order + 1];
        coeffs[0] = R::one(ctx);
        Jet { center, coeffs }
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() || self.center != other.center {
            return Err(Error::Shape(format!(
                "order {} at {} vs order {} at {}",
                self.order(),
                self.center,
                other.order(),
                other.center
            )));
        }
        Ok(())
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let order = self.order();
        let ctx = self.coeffs[0].ctx();
        let coeffs = (0..=order)
            .map(|k| {
                (0..=k).fold(R::zero(ctx), |acc, i| {
                    acc + self.coeffs[i].clone() * other.coeffs[k - i].clone()
                })
            })
            .collect();
        Ok(Jet {
            center: self.center,
            coeffs,
        })
    }

    pub fn scale(&self, factor: &R) -> Self {
        Jet {
            center: self.center,
            coeffs: self.coeffs.iter().map(|c| c.clone() * factor.clone()).collect(),
        }
    }

    /// `f^(l)(center) = l! * c_l`.
    pub fn derivative(&self, l: usize) -> Result<R> {
        if l > self.order() {
            return Err(Error::Order {
                requested: l,
                order: self.order(),
            });
        }
        let ctx = self.coeffs[0].ctx();
        Ok(factorial::<R>(ctx, l) * self.coeffs[l].clone())
    }
}

pub fn factorial<R: Real>(ctx: R::Ctx, n: usize) -> R {
    (1..=n as i64).fold(R::one(ctx), |acc, k| acc * R::from_i64(ctx, k))
}

/// Sequential left fold of `factors` in the given order.
///
/// An empty sequence yields the identity jet of the given center and order.
pub fn jet_product<R, I>(ctx: R::Ctx, center: f64, order: usize, factors: I) -> Result<Jet<R>>
where
    R: Real,
    I: IntoIterator<Item = Jet<R>>,
{
    factors
        .into_iter()
        .try_fold(Jet::identity(ctx, center, order), |acc, f| acc.mul(&f))
}

/// Balanced pairwise fold, evaluated in parallel.
///
/// The pairing tree depends only on the number of factors, so the result is
/// independent of thread scheduling.
pub fn jet_product_tree<R: Real>(ctx: R::Ctx, center: f64, order: usize, mut factors: Vec<Jet<R>>) -> Result<Jet<R>> {
    if factors.is_empty() {
        return Ok(Jet::identity(ctx, center, order));
    }
    for f in &factors {
        if f.order() != order || f.center != center {
            return Err(Error::Shape(format!(
                "factor of order {} at {} in a product of order {order} at {center}",
                f.order(),
                f.center
            )));
        }
    }
    while factors.len() > 1 {
        factors = factors
            .par_chunks(2)
            .map(|pair| match pair {
                [a, b] => a.mul(b),
                [a] => Ok(a.clone()),
                _ => unreachable!(),
            })
            .collect::<Result<Vec<_>>>()?;
    }
    Ok(factors.pop().expect("nonempty"))
}

/// Jet at `s = 1` of the local Euler factor `sum_{nu=0}^{b-1} w_nu p^(-nu s)`
/// with `w_nu = b - nu` (or `1 - nu/b` when `normalized`).
///
/// Each `p^(-nu s)` contributes `(-nu log p)^k p^(-nu) / k!` to `c_k`.
/// Terms beyond the context resolution are dropped once they are past their
/// peak, which keeps `b` in the thousands cheap.
pub fn local_factor_jet<R: Real>(ctx: R::Ctx, p: u64, b: u32, order: usize, normalized: bool) -> Result<Jet<R>> {
    if p < 2 {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    if b == 0 {
        return Err(Error::Domain("b must be positive".into()));
    }
    let log_p = R::from_i64(ctx, p as i64).ln();
    let inv_p = R::one(ctx) / R::from_i64(ctx, p as i64);
    let b_r = R::from_i64(ctx, b as i64);
    let cutoff = R::epsilon(ctx) * R::from_ratio(ctx, 1, 1000);
    let mut sums = vec![R::zero(ctx); order + 1];
    let mut p_pow = R::one(ctx);
    for nu in 0..b {
        let mult = R::from_i64(ctx, (b - nu) as i64);
        let weight = if normalized { mult / b_r.clone() } else { mult };
        let base = weight * p_pow.clone();
        let neg_nu_log_p = -(R::from_i64(ctx, nu as i64) * log_p.clone());
        let mut power = R::one(ctx);
        let mut largest = R::zero(ctx);
        for (k, sum) in sums.iter_mut().enumerate() {
            if k > 0 {
                power = power * neg_nu_log_p.clone();
            }
            let term = base.clone() * power.clone();
            let mag = term.abs();
            if mag > largest {
                largest = mag;
            }
            *sum = sum.clone() + term;
        }
        // nu * log p > order means every term is decreasing in nu from here
        if nu as f64 * (p as f64).ln() > order as f64 + 1.0 && largest < cutoff.clone() * sums[0].clone() {
            break;
        }
        p_pow = p_pow * inv_p.clone();
    }
    let coeffs = sums
        .into_iter()
        .enumerate()
        .map(|(k, s)| s / factorial::<R>(ctx, k))
        .collect();
    Jet::new(1.0, coeffs)
}

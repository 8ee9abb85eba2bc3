//! Primes, Mertens products, constants and iterated logarithms.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::precision::{Precision, Real};
use crate::with_precision;

/// Euler-Mascheroni constant, 64 significant digits.
pub const EULER_GAMMA_LITERAL: &str = "0.5772156649015328606065120900824024310421593359399235988057672349";

/// `exp(EULER_GAMMA)`, 64 significant digits.
pub const EXP_GAMMA_LITERAL: &str = "1.781072417990197985236504103107179549169645214303430205357665877";

/// Largest supported sieve limit.
pub const MAX_SIEVE_LIMIT: u64 = 100_000_000;

/// The primes up to `limit`, ascending. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

/// Sieve of Eratosthenes over odd numbers.
pub fn sieve_primes(limit: u64) -> Result<PrimeTable> {
    if limit < 2 {
        return Err(Error::EmptyTable(limit));
    }
    if limit > MAX_SIEVE_LIMIT {
        return Err(Error::Domain(format!("sieve limit {limit} exceeds {MAX_SIEVE_LIMIT}")));
    }
    // index i stands for 2i + 1
    let half = ((limit - 1) / 2) as usize;
    let mut composite = vec![false; half + 1];
    let mut i = 1usize;
    while (2 * i + 1) * (2 * i + 1) <= limit as usize {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = (p * p - 1) / 2;
            while j <= half {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut primes = Vec::with_capacity(estimate_count(limit));
    primes.push(2);
    primes.extend(
        composite
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &c)| !c)
            .map(|(i, _)| 2 * i as u64 + 1),
    );
    Ok(PrimeTable { limit, primes })
}

fn estimate_count(limit: u64) -> usize {
    let x = limit as f64;
    (1.3 * x / x.ln().max(1.0)) as usize + 8
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// `pi(y)`, the number of primes `<= y`.
    pub fn prime_count(&self, y: f64) -> Result<usize> {
        if y.is_nan() || y > self.limit as f64 {
            return Err(Error::OutOfRange {
                value: y,
                limit: self.limit,
            });
        }
        Ok(self.primes.partition_point(|&p| (p as f64) <= y))
    }

    /// The primes `<= y` as a slice.
    pub fn primes_up_to(&self, y: f64) -> Result<&[u64]> {
        let n = self.prime_count(y)?;
        Ok(&self.primes[..n])
    }

    /// The primes `p` with `p <= x^(num/den)`.
    ///
    /// For integral `x` the comparison `p^den <= x^num` is done in exact
    /// integer arithmetic, so primes sitting on the boundary are included.
    pub fn primes_below_power(&self, x: f64, num: u32, den: u32) -> Result<&[u64]> {
        if den == 0 {
            return Err(Error::Domain("zero denominator in exponent".into()));
        }
        if num == 0 {
            return Ok(&self.primes[..0]);
        }
        let bound = x.powf(num as f64 / den as f64);
        if bound >= (self.limit + 1) as f64 {
            return Err(Error::OutOfRange {
                value: bound,
                limit: self.limit,
            });
        }
        let n = if x.fract() == 0.0 && x >= 1.0 && x < 2f64.powi(53) {
            let rhs = BigUint::from(x as u64).pow(num);
            self.primes.partition_point(|&p| BigUint::from(p).pow(den) <= rhs)
        } else {
            self.primes.partition_point(|&p| (p as f64) <= bound)
        };
        Ok(&self.primes[..n])
    }
}

/// Euler's constant and `e^gamma` at a given precision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub euler_gamma: f64,
    pub exp_gamma: f64,
    pub precision_digits: u32,
}

impl Constants {
    /// Loads the stored literals and checks `exp(gamma) == e^gamma` to the
    /// requested number of significant digits.
    pub fn load(precision: Precision) -> Result<Self> {
        with_precision!(precision, |R, ctx| {
            check_constants::<R>(ctx)?;
            Ok(Constants {
                euler_gamma: euler_gamma::<R>(ctx).to_f64(),
                exp_gamma: exp_gamma::<R>(ctx).to_f64(),
                precision_digits: precision.digits(),
            })
        })
    }

    pub fn double() -> Self {
        Constants::load(Precision::Double).expect("stored constants are consistent")
    }
}

pub fn euler_gamma<R: Real>(ctx: R::Ctx) -> R {
    R::parse_decimal(ctx, EULER_GAMMA_LITERAL)
}

pub fn exp_gamma<R: Real>(ctx: R::Ctx) -> R {
    R::parse_decimal(ctx, EXP_GAMMA_LITERAL)
}

/// Consistency check of the two stored literals at the context precision.
pub fn check_constants<R: Real>(ctx: R::Ctx) -> Result<()> {
    let digits = R::digits(ctx);
    if digits > 60 {
        return Err(Error::Domain(format!(
            "stored constants carry 64 digits; {digits} requested"
        )));
    }
    let computed = euler_gamma::<R>(ctx).exp();
    let stored = exp_gamma::<R>(ctx);
    let rel = ((computed - stored.clone()) / stored).abs();
    // a few units in the last place
    let tol = R::epsilon(ctx) * R::from_i64(ctx, 16);
    if rel > tol {
        return Err(Error::Accuracy(format!(
            "exp(gamma) disagrees with stored e^gamma: rel {:e}",
            rel.to_f64()
        )));
    }
    Ok(())
}

/// `prod_{p<=x} (1 - 1/p)^-1` and its ratio to `e^gamma log x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MertensProduct {
    pub value: f64,
    pub ratio_to_asymptotic: f64,
}

pub fn mertens_product(table: &PrimeTable, x: f64, precision: Precision) -> Result<MertensProduct> {
    with_precision!(precision, |R, ctx| {
        let (value, ratio) = mertens_product_in::<R>(table, x, ctx)?;
        Ok(MertensProduct {
            value: value.to_f64(),
            ratio_to_asymptotic: ratio.to_f64(),
        })
    })
}

/// Generic form of [`mertens_product`], returning `(value, ratio)`.
pub fn mertens_product_in<R: Real>(table: &PrimeTable, x: f64, ctx: R::Ctx) -> Result<(R, R)> {
    if !(x >= 2.0) {
        return Err(Error::Domain(format!("Mertens product needs x >= 2, got {x}")));
    }
    let primes = table.primes_up_to(x)?;
    let mut value = R::one(ctx);
    for &p in primes {
        let p = R::from_i64(ctx, p as i64);
        value = value * p.clone() / (p - R::one(ctx));
    }
    let asymptotic = exp_gamma::<R>(ctx) * R::from_f64(ctx, x).ln();
    let ratio = value.clone() / asymptotic;
    Ok((value, ratio))
}

/// The `j`-fold logarithm `log(log(...log(t)))`.
pub fn iterated_log(t: f64, j: u32) -> Result<f64> {
    if j == 0 {
        return Err(Error::Domain("iterated logarithm needs j >= 1".into()));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!("log of non-positive {t}")));
    }
    iterated_log_of_log(t.ln(), j - 1)
}

/// Applies `j` further logarithms to `log_t`; handles heights whose `T`
/// overflows a double.
pub fn iterated_log_of_log(log_t: f64, j: u32) -> Result<f64> {
    let mut v = log_t;
    for stage in 0..j {
        if !(v > 0.0) {
            return Err(Error::Domain(format!(
                "iterated logarithm undefined: stage {} has argument {v}",
                stage + 2
            )));
        }
        v = v.ln();
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::BigReal;

    fn trial_division(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    /// Independent segmented sieve used as a counting oracle.
    fn segmented_count(limit: u64) -> usize {
        let root = (limit as f64).sqrt() as u64 + 1;
        let small: Vec<u64> = (2..=root).filter(|&n| trial_division(n)).collect();
        let mut count = 0;
        let seg = 1000u64;
        let mut lo = 2u64;
        while lo <= limit {
            let hi = (lo + seg - 1).min(limit);
            let mut mark = vec![true; (hi - lo + 1) as usize];
            for &p in &small {
                if p * p > hi {
                    break;
                }
                let start = (lo.div_ceil(p) * p).max(p * p);
                let mut m = start;
                while m <= hi {
                    mark[(m - lo) as usize] = false;
                    m += p;
                }
            }
            count += mark.iter().filter(|&&b| b).count();
            lo = hi + 1;
        }
        count
    }

    #[test]
    fn small_tables() {
        assert_eq!(sieve_primes(3).unwrap().primes(), &[2, 3]);
        let t = sieve_primes(10).unwrap();
        assert_eq!(t.primes(), &[2, 3, 5, 7]);
        assert_eq!(t.prime_count(10.0).unwrap(), 4);
        assert_eq!(sieve_primes(2).unwrap().primes(), &[2]);
    }

    #[test]
    fn empty_table_error() {
        assert_eq!(sieve_primes(1), Err(Error::EmptyTable(1)));
        assert_eq!(sieve_primes(0), Err(Error::EmptyTable(0)));
    }

    #[test]
    fn pi_of_ten_thousand_matches_segmented_sieve() {
        let t = sieve_primes(10_000).unwrap();
        assert_eq!(t.len(), 1229);
        assert_eq!(t.len(), segmented_count(10_000));
    }

    #[test]
    fn table_invariants_up_to_a_million() {
        let t = sieve_primes(1_000_000).unwrap();
        assert_eq!(t.len(), segmented_count(1_000_000));
        assert!(t.primes().windows(2).all(|w| w[0] < w[1]));
        // trial division on a sample spread over the table
        assert!(t.primes().iter().step_by(97).all(|&p| trial_division(p)));
        assert_eq!(t.prime_count(t.limit() as f64).unwrap(), t.len());
    }

    #[test]
    fn prime_count_queries() {
        let t10 = sieve_primes(10).unwrap();
        assert_eq!(t10.prime_count(1.9).unwrap(), 0);
        let t100 = sieve_primes(100).unwrap();
        assert_eq!(t100.prime_count(100f64.sqrt()).unwrap(), 4);
        assert!(matches!(t10.prime_count(11.0), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn boundary_primes_are_included() {
        let t = sieve_primes(100).unwrap();
        // 9^(1/2) = 3 exactly
        assert_eq!(t.primes_below_power(9.0, 1, 2).unwrap(), &[2, 3]);
        // 8^(1/3) = 2
        assert_eq!(t.primes_below_power(8.0, 1, 3).unwrap(), &[2]);
        assert_eq!(t.primes_below_power(30.0, 0, 5).unwrap(), &[] as &[u64]);
        assert_eq!(t.primes_below_power(30.0, 5, 5).unwrap().len(), 10);
        // 3^(1/2) < 2
        assert!(t.primes_below_power(3.0, 1, 2).unwrap().is_empty());
    }

    #[test]
    fn mertens_small_values() {
        let t = sieve_primes(10_000).unwrap();
        let m3 = mertens_product(&t, 3.0, Precision::Double).unwrap();
        assert!((m3.value - 3.0).abs() < 1e-15);
        let m10 = mertens_product(&t, 10.0, Precision::Double).unwrap();
        assert!((m10.value - 4.375).abs() < 1e-14);
        // 4.375 / (e^gamma log 10), reference computed with mpmath
        assert!((m10.ratio_to_asymptotic - 1.066794555423396).abs() < 1e-13);
        let m = mertens_product(&t, 1e4, Precision::Double).unwrap();
        assert!((m.ratio_to_asymptotic - 1.0).abs() <= 0.05);
        assert!(mertens_product(&t, 1.5, Precision::Double).is_err());
    }

    #[test]
    fn mertens_ratio_improves_with_x() {
        let t = sieve_primes(10_000).unwrap();
        let devs: Vec<f64> = [1e2, 1e3, 1e4]
            .iter()
            .map(|&x| (mertens_product(&t, x, Precision::Double).unwrap().ratio_to_asymptotic - 1.0).abs())
            .collect();
        assert!(devs[0] > devs[1] && devs[1] > devs[2], "{devs:?}");
    }

    #[test]
    fn mertens_increases_at_every_prime() {
        let t = sieve_primes(2000).unwrap();
        let values: Vec<f64> = t
            .primes()
            .iter()
            .map(|&p| mertens_product(&t, p as f64, Precision::Double).unwrap().value)
            .collect();
        assert!(values.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn mertens_high_precision_agrees() {
        let t = sieve_primes(1000).unwrap();
        let d = mertens_product(&t, 1000.0, Precision::Double).unwrap();
        let (v, _) = mertens_product_in::<BigReal>(&t, 1000.0, 50).unwrap();
        assert!((v.to_f64() / d.value - 1.0).abs() < 1e-13);
    }

    #[test]
    fn constants_consistent() {
        let c = Constants::double();
        assert!((c.euler_gamma - 0.5772156649015329).abs() < 1e-16);
        assert!((c.euler_gamma.exp() - c.exp_gamma).abs() < 1e-15);
        let hp = Constants::load(Precision::Decimal(55)).unwrap();
        assert_eq!(hp.precision_digits, 55);
        // the literal against an independently published 40-digit value
        let published = "0.5772156649015328606065120900824024310422";
        let ours = euler_gamma::<BigReal>(40);
        let diff = (ours - BigReal::parse_decimal(40, published)).abs().to_f64();
        assert!(diff < 1e-39);
        assert!(Constants::load(Precision::Decimal(80)).is_err());
    }

    #[test]
    fn iterated_logs() {
        assert!((iterated_log(std::f64::consts::E, 1).unwrap() - 1.0).abs() < 1e-15);
        let ee = std::f64::consts::E.exp();
        assert!((iterated_log(ee, 2).unwrap() - 1.0).abs() < 1e-15);
        assert!((iterated_log(1e6, 2).unwrap() - 2.625_791_914_476_011).abs() < 1e-12);
        assert!(iterated_log(0.5, 2).is_err());
        assert!(iterated_log(2.0, 3).is_err());
        assert!(iterated_log(-1.0, 1).is_err());
    }
}

//! Arbitrary-precision scalars and period constants.
//!
//! `BigFloat` is MPFR-backed: every value carries its own mantissa precision
//! and all operations round to nearest at the precision of the assignment
//! target, so there is no hidden global state to configure.
//!
//! `zeta` goes through MPFR; `zeta_alternating_series` is an independent
//! implementation (accelerated alternating series) kept as a cross-check
//! oracle next to frozen 50-digit reference values in the tests.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use rug::float::Round;
use rug::ops::Pow;
use rug::{Assign, Float, Integer, Rational};

pub type BigFloat = Float;

/// Mantissa bits needed for `digits` significant decimal digits, with a
/// small safety margin.
pub fn bits_for_digits(digits: usize) -> u32 {
    ((digits as f64 + 2.0) * std::f64::consts::LOG2_10).ceil() as u32
}

/// Working precision rule for evaluation at `digits` target digits in
/// dimension `ell`: target + 10 + 5 ell guard digits.
pub fn working_digits(digits: usize, ell: usize) -> usize {
    digits + 10 + 5 * ell
}

pub fn float(prec: u32, v: f64) -> BigFloat {
    Float::with_val(prec, v)
}

/// Converts an exact `BigInt` into a `rug::Integer`.
pub fn bigint_to_rug(v: &BigInt) -> Integer {
    let (sign, bytes) = v.to_bytes_le();
    let mut out = Integer::from_digits(&bytes, rug::integer::Order::Lsf);
    if sign == Sign::Minus {
        out = -out;
    }
    out
}

pub fn rug_to_bigint(v: &Integer) -> BigInt {
    let bytes = v.to_digits::<u8>(rug::integer::Order::Lsf);
    let mut out = BigInt::from_bytes_le(Sign::Plus, &bytes);
    if *v < 0 {
        out = -out;
    }
    out
}

/// Exact rational to float at the stated precision.
pub fn rational_to_float(q: &BigRational, prec: u32) -> BigFloat {
    let r = Rational::from((bigint_to_rug(q.numer()), bigint_to_rug(q.denom())));
    Float::with_val(prec, &r)
}

/// pi at the stated precision.
pub fn pi(prec: u32) -> BigFloat {
    Float::with_val(prec, rug::float::Constant::Pi)
}

/// The Riemann zeta value at an integer argument `s >= 2`.
///
/// Correct to the stated precision (MPFR's zeta is correctly rounded); the
/// tests validate against embedded 50-digit reference values and the
/// independent series below. Capped at 10000 digits of working precision.
pub fn zeta(s: u32, prec: u32) -> BigFloat {
    assert!(s >= 2, "zeta needs s >= 2");
    assert!(prec <= bits_for_digits(10_000), "precision cap exceeded");
    Float::with_val(prec, Float::zeta_u(s))
}

/// Independent evaluation of zeta(s) by the accelerated alternating series
///
///   zeta(s) = -1 / (d_n (1 - 2^{1-s})) sum_{k=0}^{n-1} (-1)^k (d_k - d_n) / (k+1)^s
///
/// with Chebyshev weights `d_k`; the truncation error is below
/// `3 (3 + sqrt 8)^{-n}`, so `n` is sized from the target precision.
pub fn zeta_alternating_series(s: u32, prec: u32) -> BigFloat {
    assert!(s >= 2);
    let work = prec + 16;
    let n = (((prec as f64) + 8.0) * std::f64::consts::LN_2 / (3.0 + 8f64.sqrt()).ln()).ceil()
        as u32
        + 2;

    // c_i = (n+i-1)! 4^i / ((n-i)! (2i)!) for i = 0..n, partial sums
    // accumulated exactly; d_k = n sum_{i<=k} c_i.
    let mut c = Rational::from((1u32, n));
    let mut partials = Vec::with_capacity(n as usize + 1);
    let mut acc = c.clone();
    partials.push(acc.clone());
    for i in 0..n {
        let num = Integer::from(4u32) * Integer::from(n + i) * Integer::from(n - i);
        let den = Integer::from(2 * i + 1) * Integer::from(2 * i + 2);
        c *= Rational::from((num, den));
        acc += &c;
        partials.push(acc.clone());
    }
    let dn = Rational::from(&partials[n as usize]) * Integer::from(n);

    let mut sum = Float::new(work);
    let mut term = Float::new(work);
    for k in 0..n {
        let dk = Rational::from(&partials[k as usize]) * Integer::from(n);
        let diff = dk - &dn;
        term.assign(&diff);
        let denom = Float::with_val(work, k + 1).pow(s);
        term /= &denom;
        if k % 2 == 0 {
            sum += &term;
        } else {
            sum -= &term;
        }
    }
    let two_pow = Float::with_val(work, 2).pow(1i32 - s as i32);
    let scale = (Float::with_val(work, 1) - two_pow) * Float::with_val(work, &dn);
    let v = -(sum / scale);
    Float::with_val(prec, &v)
}

/// `(sqrt 2 - 1)^4`, the decay rate of the Apery linear forms for zeta(3).
pub fn apery_epsilon(prec: u32) -> BigFloat {
    let r = Float::with_val(prec + 8, 2).sqrt() - 1u32;
    Float::with_val(prec, r.pow(4))
}

/// `e^3 (sqrt 2 - 1)^4 = 0.591...`, the quantity whose being below 1 drives
/// the irrationality of zeta(3).
pub fn e_cubed_epsilon(prec: u32) -> BigFloat {
    let e3 = Float::with_val(prec + 8, 3).exp();
    Float::with_val(prec, e3 * apery_epsilon(prec + 8))
}

/// Decimal rendering with the given number of significant digits.
pub fn to_decimal(x: &BigFloat, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let (sign, mantissa, exp) = x.to_sign_string_exp_round(10, Some(digits), Round::Nearest);
    let exp = exp.unwrap_or(1);
    let point = if mantissa.len() > 1 {
        format!("{}.{}", &mantissa[..1], &mantissa[1..])
    } else {
        mantissa.clone()
    };
    format!("{}{}e{}", if sign { "-" } else { "" }, point, exp - 1)
}

/// Parses a decimal string at the stated precision.
pub fn parse_decimal(s: &str, prec: u32) -> Option<BigFloat> {
    Float::parse(s).ok().map(|v| Float::with_val(prec, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Published 50-digit reference values.
    const ZETA2_REF: &str = "1.6449340668482264364724151666460251892189499012068";
    const ZETA3_REF: &str = "1.2020569031595942853997381615114499907649862923405";
    const ZETA5_REF: &str = "1.0369277551433699263313654864570341680570809195019";
    const PI_REF: &str = "3.1415926535897932384626433832795028841971693993751";

    fn close(a: &BigFloat, b: &BigFloat, digits: usize) -> bool {
        let tol = Float::with_val(64, 10).pow(-(digits as i32));
        Float::with_val(a.prec(), a - b).abs() < tol
    }

    #[test]
    fn zeta_matches_references() {
        let prec = bits_for_digits(55);
        for (s, r) in [(2, ZETA2_REF), (3, ZETA3_REF), (5, ZETA5_REF)] {
            let v = zeta(s, prec);
            let refv = parse_decimal(r, prec).unwrap();
            assert!(close(&v, &refv, 49), "zeta({s})");
        }
        let p = pi(prec);
        let refp = parse_decimal(PI_REF, prec).unwrap();
        assert!(close(&p, &refp, 49));
    }

    #[test]
    fn independent_series_agrees_with_mpfr() {
        let prec = bits_for_digits(60);
        for s in [2u32, 3, 4, 5, 7] {
            let a = zeta(s, prec);
            let b = zeta_alternating_series(s, prec);
            assert!(close(&a, &b, 58), "zeta({s}) mismatch");
        }
    }

    #[test]
    fn zeta2_is_pi_squared_over_six() {
        let prec = bits_for_digits(80);
        let z2 = zeta(2, prec);
        let p = pi(prec + 8);
        let alt = Float::with_val(prec, p.square() / 6u32);
        assert!(close(&z2, &alt, 78));
    }

    #[test]
    fn zeta4_identity() {
        // zeta(4) = (2/5) zeta(2)^2.
        let prec = bits_for_digits(60);
        let z4 = zeta(4, prec);
        let z2 = zeta(2, prec + 8);
        let alt = Float::with_val(prec, z2.square() * 2u32 / 5u32);
        assert!(close(&z4, &alt, 58));
    }

    #[test]
    fn epsilon_constants() {
        let prec = bits_for_digits(30);
        let eps = apery_epsilon(prec);
        // (sqrt 2 - 1)^4 = 17 - 12 sqrt 2.
        let direct = Float::with_val(prec, 17) - Float::with_val(prec + 8, 2).sqrt() * 12u32;
        assert!(close(&eps, &Float::with_val(prec, direct), 28));
        let e3e = e_cubed_epsilon(prec);
        assert!(e3e < 1u32);
        // e^3 eps = 0.591...
        assert!(e3e > 0.59 && e3e < 0.5913);
    }

    #[test]
    fn rational_conversion_roundtrip() {
        let q = BigRational::new(BigInt::from(-355), BigInt::from(113));
        let f = rational_to_float(&q, 128);
        let back = Float::with_val(128, &f * 113u32);
        assert_eq!(back.to_integer().unwrap(), -355);
        assert_eq!(rug_to_bigint(&bigint_to_rug(&BigInt::from(-987654321))), BigInt::from(-987654321));
    }

    #[test]
    fn decimal_rendering() {
        let prec = bits_for_digits(40);
        let z = zeta(2, prec);
        let s = to_decimal(&z, 12);
        assert!(s.starts_with("1.6449340668") && s.ends_with("e0"), "{s}");
        let q = Float::with_val(64, 1) / 4u32;
        assert_eq!(to_decimal(&q, 3), "2.50e-1");
    }

    #[test]
    fn precision_is_per_value() {
        let a = Float::with_val(64, 1u32) / 3u32;
        let b = Float::with_val(256, 1u32) / 3u32;
        assert_eq!(a.prec(), 64);
        assert_eq!(b.prec(), 256);
        let sum = Float::with_val(256, &a + &b);
        assert_eq!(sum.prec(), 256);
    }
}

//! Integer-relation detection over a basis of period constants.
//!
//! A candidate relation for `(v, c_1, ..., c_k)` is found by LLL-reducing the
//! lattice spanned by rows `[e_i | round(M x_i)]` with `M = 10^digits`; the
//! shortest reduced vector whose residual and height pass the acceptance
//! thresholds is returned. The thresholds are deliberately conservative: a
//! fit refuses rather than reporting a spurious relation.

mod lll;

pub use lll::lattice_reduce;

use crate::num::{bigint_to_rug, rug_to_bigint, to_decimal, BigFloat};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rug::ops::Pow;
use rug::{Float, Integer};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FitError {
    #[error("precision too low: need at least {need} digits for a basis of size {basis}")]
    PrecisionTooLow { need: usize, basis: usize },
    #[error("value precision ({got} bits) is below the requested {want} digits")]
    ValueTooCoarse { got: u32, want: usize },
    #[error("no relation within the acceptance thresholds")]
    NoRelation,
}

/// Named period constants at working precision. The constructor checks that
/// the basis itself carries no small relation (pairwise Q-linear
/// independence as far as the detector can see).
#[derive(Clone, Debug)]
pub struct ConstantBasis {
    pub names: Vec<String>,
    pub values: Vec<BigFloat>,
}

impl ConstantBasis {
    pub fn new(entries: Vec<(String, BigFloat)>) -> Self {
        let (names, values) = entries.into_iter().unzip();
        ConstantBasis { names, values }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Builds `1, zeta(2)`-style bases from names: `1`, `pi`, `zetaK`,
    /// `zeta2^2`, `zeta2*zeta3` are understood.
    pub fn from_names(names: &[&str], prec: u32) -> Option<Self> {
        let mut entries = Vec::new();
        for &n in names {
            let v = parse_constant(n, prec)?;
            entries.push((n.to_string(), v));
        }
        Some(ConstantBasis::new(entries))
    }
}

pub fn parse_constant(name: &str, prec: u32) -> Option<BigFloat> {
    let name = name.trim();
    if name == "1" {
        return Some(Float::with_val(prec, 1));
    }
    if name == "pi" {
        return Some(crate::num::pi(prec));
    }
    if let Some(rest) = name.strip_prefix("zeta") {
        // zetaK, zetaK^2, zetaK*zetaM
        if let Some((a, b)) = rest.split_once('*') {
            let a: u32 = a.parse().ok()?;
            let b: u32 = b.trim_start_matches("zeta").parse().ok()?;
            let prod = Float::with_val(
                prec,
                &crate::num::zeta(a, prec + 8) * &crate::num::zeta(b, prec + 8),
            );
            return Some(prod);
        }
        if let Some((a, p)) = rest.split_once('^') {
            let a: u32 = a.parse().ok()?;
            let p: u32 = p.parse().ok()?;
            return Some(Float::with_val(prec, crate::num::zeta(a, prec + 8).pow(p)));
        }
        let s: u32 = rest.parse().ok()?;
        return Some(crate::num::zeta(s, prec));
    }
    None
}

/// An accepted integer relation `sum q_i x_i ~ 0`.
#[derive(Clone, Debug, Serialize)]
pub struct Relation {
    pub coefficients: Vec<BigInt>,
    #[serde(skip)]
    pub residual: BigFloat,
    pub height: BigInt,
}

/// Acceptance threshold `10^(-0.6 digits)` on the residual.
fn residual_threshold(digits: usize) -> BigFloat {
    Float::with_val(64, 10).pow(-((digits as f64 * 0.6) as i32))
}

/// Height bound `10^(digits / (3 basis_size))`.
fn height_bound(digits: usize, basis_size: usize) -> BigInt {
    BigInt::from(10).pow((digits / (3 * basis_size)).max(2) as u32)
}

/// Integer relation search on the raw vector `xs` (first entry typically the
/// value to expand).
pub fn find_relation(xs: &[BigFloat], digits: usize) -> Result<Relation, FitError> {
    let k = xs.len();
    assert!(k >= 2, "need at least two values");
    let prec = xs.iter().map(|x| x.prec()).min().unwrap();
    if (prec as f64) < (digits as f64) * std::f64::consts::LOG2_10 {
        return Err(FitError::ValueTooCoarse { got: prec, want: digits });
    }
    let scale = Float::with_val(prec, 10).pow(digits as u32);
    // Rows [ I | round(M x_i) ].
    let mut basis: Vec<Vec<Integer>> = Vec::with_capacity(k);
    for (i, x) in xs.iter().enumerate() {
        let mut row = vec![Integer::new(); k + 1];
        row[i] = Integer::from(1);
        let scaled = Float::with_val(prec, x * &scale);
        row[k] = scaled.to_integer().unwrap_or_default();
        basis.push(row);
    }
    let reduced = lattice_reduce(&basis).map_err(|_| FitError::NoRelation)?;

    let thresh = residual_threshold(digits);
    let bound = height_bound(digits, k);
    let mut best: Option<Relation> = None;
    for row in &reduced {
        let coeffs: Vec<BigInt> = row[..k].iter().map(rug_to_bigint).collect();
        if coeffs.iter().all(|c| c.is_zero()) {
            continue;
        }
        // Residual of the candidate at full precision.
        let mut acc = Float::new(prec);
        for (c, x) in coeffs.iter().zip(xs) {
            acc += Float::with_val(prec, x * &Float::with_val(prec, bigint_to_rug(c)));
        }
        acc.abs_mut();
        let height = coeffs.iter().map(|c| c.abs()).max().unwrap();
        if acc < thresh && height <= bound {
            let candidate = Relation { coefficients: canonical_sign(coeffs), residual: acc, height };
            let better = match &best {
                None => true,
                Some(b) => candidate.height < b.height,
            };
            if better {
                best = Some(candidate);
            }
        }
    }
    let mut rel = best.ok_or(FitError::NoRelation)?;
    // Divide by the gcd (coprime coefficients).
    let g = rel
        .coefficients
        .iter()
        .fold(BigInt::zero(), |acc, c| num_integer::gcd(acc, c.clone()));
    if !g.is_zero() && g != BigInt::from(1) {
        for c in rel.coefficients.iter_mut() {
            *c /= &g;
        }
        rel.height = rel.coefficients.iter().map(|c| c.abs()).max().unwrap();
    }
    Ok(rel)
}

fn canonical_sign(mut v: Vec<BigInt>) -> Vec<BigInt> {
    if let Some(first) = v.iter().find(|c| !c.is_zero()) {
        if first.is_negative() {
            for c in v.iter_mut() {
                *c = -c.clone();
            }
        }
    }
    v
}

/// Expands `v` over the basis: rationals `q_i` with
/// `|v - sum q_i c_i| < 10^(-0.6 digits)`, or an explicit refusal.
///
/// Precondition `digits >= 20 + 10 |basis|`; raising `digits` can only turn
/// refusals into answers, never change an accepted one.
pub fn fit_linear_form(
    v: &BigFloat,
    basis: &ConstantBasis,
    digits: usize,
) -> Result<(Vec<BigRational>, Relation), FitError> {
    let need = 20 + 10 * basis.len();
    if digits < need {
        return Err(FitError::PrecisionTooLow { need, basis: basis.len() });
    }
    let mut xs = Vec::with_capacity(basis.len() + 1);
    xs.push(v.clone());
    xs.extend(basis.values.iter().cloned());
    let rel = find_relation(&xs, digits)?;
    let q0 = &rel.coefficients[0];
    if q0.is_zero() {
        // A relation among the basis constants alone: the value cannot be
        // expanded.
        return Err(FitError::NoRelation);
    }
    let coeffs: Vec<BigRational> = rel.coefficients[1..]
        .iter()
        .map(|c| -BigRational::new(c.clone(), q0.clone()))
        .collect();
    Ok((coeffs, rel))
}

/// One row of a vanishing table: fitted coefficients with zero flags.
#[derive(Clone, Debug, Serialize)]
pub struct VanishingRow {
    pub n: i64,
    pub coeffs: Vec<String>,
    pub zero: Vec<bool>,
    pub residual: String,
    pub accepted: bool,
}

/// Fits each value of a family over the basis and reports per-constant
/// zero/nonzero flags, mirroring the bullet tables of the golden data.
pub fn vanishing_report(
    values: &[(i64, BigFloat)],
    basis: &ConstantBasis,
    digits: usize,
) -> Vec<VanishingRow> {
    values
        .iter()
        .map(|(n, v)| {
            if v.is_zero() {
                return VanishingRow {
                    n: *n,
                    coeffs: vec!["0".to_string(); basis.len()],
                    zero: vec![true; basis.len()],
                    residual: "0".to_string(),
                    accepted: true,
                };
            }
            match fit_linear_form(v, basis, digits) {
                Ok((coeffs, rel)) => VanishingRow {
                    n: *n,
                    coeffs: coeffs.iter().map(|c| c.to_string()).collect(),
                    zero: coeffs.iter().map(|c| c.is_zero()).collect(),
                    residual: to_decimal(&rel.residual, 3),
                    accepted: true,
                },
                Err(_) => VanishingRow {
                    n: *n,
                    coeffs: vec![String::new(); basis.len()],
                    zero: vec![false; basis.len()],
                    residual: String::new(),
                    accepted: false,
                },
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{bits_for_digits, zeta};

    fn basis_1_zeta2(digits: usize) -> ConstantBasis {
        let prec = bits_for_digits(digits + 10);
        ConstantBasis::from_names(&["1", "zeta2"], prec).unwrap()
    }

    #[test]
    fn fit_zeta2_itself() {
        let digits = 40;
        let basis = basis_1_zeta2(digits);
        let v = basis.values[1].clone();
        let (coeffs, _) = fit_linear_form(&v, &basis, digits).unwrap();
        assert!(coeffs[0].is_zero());
        assert_eq!(coeffs[1], BigRational::from(BigInt::from(1)));
    }

    #[test]
    fn fit_small_rational_combinations() {
        // Round-trip: random small-height rational combinations at 60 digits.
        let digits = 60;
        let prec = bits_for_digits(digits + 10);
        let basis = ConstantBasis::from_names(&["1", "zeta2", "zeta3"], prec).unwrap();
        let mut state = 0xbeef_u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for trial in 0..100 {
            let nums: Vec<i64> = (0..3).map(|_| (next() % 39) as i64 - 19).collect();
            let dens: Vec<i64> = (0..3).map(|_| (next() % 9) as i64 + 1).collect();
            let mut v = Float::new(prec);
            for i in 0..3 {
                let q = Float::with_val(prec, nums[i]) / Float::with_val(prec, dens[i]);
                v += q * &basis.values[i];
            }
            if v.is_zero() {
                continue;
            }
            let (coeffs, _) = fit_linear_form(&v, &basis, digits).unwrap();
            for i in 0..3 {
                let expect = BigRational::new(BigInt::from(nums[i]), BigInt::from(dens[i]));
                assert_eq!(coeffs[i], expect, "trial {trial}");
            }
        }
    }

    #[test]
    fn scale_consistency() {
        let digits = 50;
        let basis = basis_1_zeta2(digits);
        let prec = bits_for_digits(digits + 10);
        let z2 = zeta(2, prec);
        let v = Float::with_val(prec, &z2 * 19u32) - Float::with_val(prec, 31u32);
        let (c1, _) = fit_linear_form(&v, &basis, digits).unwrap();
        // q * v fits to q * coefficients.
        let q = BigRational::new(BigInt::from(3), BigInt::from(7));
        let scaled = Float::with_val(prec, &v * 3u32) / 7u32;
        let (c2, _) = fit_linear_form(&scaled, &basis, digits).unwrap();
        for i in 0..2 {
            assert_eq!(c2[i], &c1[i] * &q);
        }
    }

    #[test]
    fn refuses_on_low_precision() {
        let basis = basis_1_zeta2(40);
        let v = basis.values[1].clone();
        assert!(matches!(
            fit_linear_form(&v, &basis, 10),
            Err(FitError::PrecisionTooLow { .. })
        ));
    }

    #[test]
    fn no_relation_for_unrelated_value() {
        // sqrt 2 is not in span{1, zeta2} with small height.
        let digits = 45;
        let basis = basis_1_zeta2(digits);
        let prec = bits_for_digits(digits + 10);
        let v = Float::with_val(prec, 2).sqrt();
        assert!(matches!(fit_linear_form(&v, &basis, digits), Err(FitError::NoRelation)));
    }

    #[test]
    fn vanishing_report_zero_row() {
        let digits = 45;
        let basis = basis_1_zeta2(digits);
        let prec = bits_for_digits(digits + 10);
        let rows = vanishing_report(&[(0, Float::new(prec))], &basis, digits);
        assert!(rows[0].accepted);
        assert!(rows[0].zero.iter().all(|&z| z));
    }

    #[test]
    fn basis_alone_has_no_relation() {
        let digits = 50;
        let prec = bits_for_digits(digits + 10);
        let basis =
            ConstantBasis::from_names(&["1", "zeta2", "zeta3", "zeta2*zeta3", "zeta5"], prec)
                .unwrap();
        let rel = find_relation(&basis.values, digits);
        assert!(rel.is_err(), "spurious relation on the basis: {rel:?}");
    }
}

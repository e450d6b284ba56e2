//! Linear recurrences with polynomial coefficients and the exact sequences
//! they generate.
//!
//! Convention: `sum_i p_i(n) u_{n+i} = 0` for `n >= n0`, with `p_k` not
//! identically zero. The two Apery recurrences are stored in the indexing
//! that reproduces the evaluated integrals from the initial conditions
//! `(1, 3)` / `(1, 5)`; this was settled once against the quadrature oracle
//! and is frozen in golden tests.

mod diagnostics;
mod discover;

pub use diagnostics::{
    apery_zeta2_forms, apery_zeta3_forms, diagnostics, lcm_upto, DiagnosticsReport,
    DiagnosticsRow, LinearFormSpec,
};
pub use discover::discover;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RecurrenceError {
    #[error("need {expected} initial values, got {got}")]
    WrongInitLength { expected: usize, got: usize },
    #[error("leading coefficient vanishes at n = {0}; cannot extend past it")]
    LeadingZero(i64),
}

/// Dense univariate polynomial over the rationals (ascending coefficients).
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct QPoly {
    coeffs: Vec<BigRational>,
}

impl QPoly {
    pub fn new(coeffs: Vec<BigRational>) -> Self {
        let mut p = QPoly { coeffs };
        p.trim();
        p
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        QPoly::new(coeffs.iter().map(|&c| BigRational::from(BigInt::from(c))).collect())
    }

    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_i64(&self, n: i64) -> BigRational {
        self.eval(&BigRational::from(BigInt::from(n)))
    }

    pub fn scale(&self, s: &BigRational) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Composition with the reflection `t -> c - t`.
    pub fn compose_reflect(&self, c: &BigRational) -> QPoly {
        // Horner: p(c - t) built by repeated multiply-by-(c - t).
        let mut acc = QPoly::zero();
        for a in self.coeffs.iter().rev() {
            // acc = acc * (c - t) + a
            let mut next = vec![BigRational::zero(); acc.coeffs.len() + 1];
            for (i, v) in acc.coeffs.iter().enumerate() {
                next[i] += v * c;
                next[i + 1] -= v;
            }
            if !next.is_empty() {
                next[0] += a;
            } else {
                next.push(a.clone());
            }
            acc = QPoly::new(next);
        }
        acc
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("{c}*n"),
                _ => format!("{c}*n^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// An order-`k` linear recurrence with polynomial coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PolyRecurrence {
    coeffs: Vec<QPoly>,
    n0: i64,
}

impl PolyRecurrence {
    pub fn new(coeffs: Vec<QPoly>, n0: i64) -> Self {
        assert!(coeffs.len() >= 2, "order must be at least 1");
        assert!(!coeffs.last().unwrap().is_zero(), "leading coefficient is zero");
        PolyRecurrence { coeffs, n0 }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn n0(&self) -> i64 {
        self.n0
    }

    pub fn coeff(&self, i: usize) -> &QPoly {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[QPoly] {
        &self.coeffs
    }

    /// The Apery recurrence for zeta(2), stored as
    /// `(n+2)^2 u_{n+2} - (11 n^2 + 33 n + 25) u_{n+1} - (n+1)^2 u_n = 0`,
    /// i.e. `n^2 u_n = (11 n^2 - 11 n + 3) u_{n-1} + (n-1)^2 u_{n-2}`.
    /// Initial conditions (1, 3) give 1, 3, 19, 147, ... and (0, 5) the
    /// companion numerators.
    pub fn apery_zeta2() -> Self {
        PolyRecurrence::new(
            vec![
                QPoly::from_i64(&[-1, -2, -1]),
                QPoly::from_i64(&[-25, -33, -11]),
                QPoly::from_i64(&[4, 4, 1]),
            ],
            0,
        )
    }

    /// The Apery recurrence for zeta(3), stored as
    /// `(n+2)^3 u_{n+2} - (2n+3)(17 n^2 + 51 n + 39) u_{n+1} + (n+1)^3 u_n = 0`,
    /// i.e. `n^3 u_n = (2n-1)(17 n^2 - 17 n + 5) u_{n-1} - (n-1)^3 u_{n-2}`.
    /// Initial conditions (1, 5) give 1, 5, 73, 1445, ... and (0, 6) the
    /// companion numerators.
    pub fn apery_zeta3() -> Self {
        // (2t+3)(17t^2+51t+39) = 34t^3 + 153t^2 + 231t + 117
        PolyRecurrence::new(
            vec![
                QPoly::from_i64(&[1, 3, 3, 1]),
                QPoly::from_i64(&[-117, -231, -153, -34]),
                QPoly::from_i64(&[8, 12, 6, 1]),
            ],
            0,
        )
    }

    /// Extends initial values to an exact sequence of length `m + 1`
    /// (indices `n0 ..= n0 + m`).
    pub fn extend(&self, init: &[BigRational], m: usize) -> Result<RationalSequence, RecurrenceError> {
        let k = self.order();
        if init.len() != k {
            return Err(RecurrenceError::WrongInitLength { expected: k, got: init.len() });
        }
        let mut values: Vec<BigRational> = init.to_vec();
        while values.len() <= m {
            let n = self.n0 + (values.len() - k) as i64;
            let lead = self.coeffs[k].eval_i64(n);
            if lead.is_zero() {
                return Err(RecurrenceError::LeadingZero(n));
            }
            let mut acc = BigRational::zero();
            for i in 0..k {
                acc += self.coeffs[i].eval_i64(n) * &values[values.len() - k + i];
            }
            values.push(-acc / lead);
        }
        values.truncate(m + 1);
        Ok(RationalSequence { n0: self.n0, values })
    }

    pub fn extend_i64(&self, init: &[i64], m: usize) -> Result<RationalSequence, RecurrenceError> {
        let init: Vec<BigRational> =
            init.iter().map(|&v| BigRational::from(BigInt::from(v))).collect();
        self.extend(&init, m)
    }

    /// Whether the recurrence annihilates the given sequence values wherever
    /// all `k + 1` terms are available.
    pub fn annihilates(&self, s: &RationalSequence) -> bool {
        let k = self.order();
        if s.len() <= k {
            return false;
        }
        for idx in 0..s.len() - k {
            let n = s.n0 + idx as i64;
            let mut acc = BigRational::zero();
            for i in 0..=k {
                acc += self.coeffs[i].eval_i64(n) * &s.values[idx + i];
            }
            if !acc.is_zero() {
                return false;
            }
        }
        true
    }

    /// The dual recurrence `p_i^v(t) = p_{k-i}(-k-1-t)`, negated afterwards
    /// if needed so the leading polynomial keeps a positive leading
    /// coefficient. An exact involution on recurrences so normalised.
    pub fn dual(&self) -> PolyRecurrence {
        let k = self.order();
        let c = BigRational::from(BigInt::from(-(k as i64) - 1));
        let mut coeffs: Vec<QPoly> =
            (0..=k).map(|i| self.coeffs[k - i].compose_reflect(&c)).collect();
        let lead_sign = coeffs[k].leading().expect("leading nonzero").is_negative();
        if lead_sign {
            let minus = -BigRational::one();
            coeffs = coeffs.iter().map(|p| p.scale(&minus)).collect();
        }
        PolyRecurrence::new(coeffs, self.n0)
    }

    /// Self-duality: a scalar `lambda` with `p_i(t) = lambda p_{k-i}(-k-1-t)`
    /// for all `i`, either plainly or with the alternating sign twist
    /// `(-1)^i` allowed by the sign ambiguity of the transform.
    pub fn self_dual_lambda(&self) -> Option<BigRational> {
        let k = self.order();
        let c = BigRational::from(BigInt::from(-(k as i64) - 1));
        let reflected: Vec<QPoly> =
            (0..=k).map(|i| self.coeffs[k - i].compose_reflect(&c)).collect();
        'variant: for twist in [false, true] {
            let mut lambda: Option<BigRational> = None;
            for i in 0..=k {
                let mut rhs = reflected[i].clone();
                if twist && i % 2 == 1 {
                    rhs = rhs.scale(&-BigRational::one());
                }
                match (self.coeffs[i].is_zero(), rhs.is_zero()) {
                    (true, true) => continue,
                    (true, false) | (false, true) => continue 'variant,
                    _ => {}
                }
                let ratio = self.coeffs[i].leading().unwrap() / rhs.leading().unwrap();
                if rhs.scale(&ratio) != self.coeffs[i] {
                    continue 'variant;
                }
                match &lambda {
                    None => lambda = Some(ratio),
                    Some(l) if *l != ratio => continue 'variant,
                    _ => {}
                }
            }
            if lambda.is_some() {
                return lambda;
            }
        }
        None
    }

    /// Content-normalised copy: integer primitive coefficients, positive
    /// leading coefficient of `p_k`. Two recurrences are scalar multiples of
    /// each other iff their normalisations are equal.
    pub fn normalized(&self) -> PolyRecurrence {
        let mut den = BigInt::one();
        for p in &self.coeffs {
            for c in p.coeffs() {
                den = num_integer::lcm(den, c.denom().clone());
            }
        }
        let mut gcd = BigInt::zero();
        let denq = BigRational::from(den);
        for p in &self.coeffs {
            for c in p.coeffs() {
                let v = (c * &denq).to_integer();
                gcd = num_integer::gcd(gcd, v);
            }
        }
        if gcd.is_zero() {
            gcd = BigInt::one();
        }
        let mut scale = denq / BigRational::from(gcd);
        if self.coeffs.last().unwrap().leading().unwrap().is_negative() {
            scale = -scale;
        }
        PolyRecurrence {
            coeffs: self.coeffs.iter().map(|p| p.scale(&scale)).collect(),
            n0: self.n0,
        }
    }

    /// JSON per the external interface: `{order, n0, coeffs: [["p/q", ...]]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let coeffs: Vec<Vec<String>> = self
            .coeffs
            .iter()
            .map(|p| p.coeffs().iter().map(|c| c.to_string()).collect())
            .collect();
        serde_json::json!({ "order": self.order(), "n0": self.n0, "coeffs": coeffs })
    }
}

/// An exactly-computed segment of a rational sequence.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct RationalSequence {
    n0: i64,
    values: Vec<BigRational>,
}

impl RationalSequence {
    pub fn new(n0: i64, values: Vec<BigRational>) -> Self {
        RationalSequence { n0, values }
    }

    pub fn from_i64(n0: i64, values: &[i64]) -> Self {
        RationalSequence {
            n0,
            values: values.iter().map(|&v| BigRational::from(BigInt::from(v))).collect(),
        }
    }

    pub fn n0(&self) -> i64 {
        self.n0
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    /// Value at absolute index `n`.
    pub fn at(&self, n: i64) -> &BigRational {
        &self.values[(n - self.n0) as usize]
    }

    /// Termwise (Hadamard) product on the common range.
    pub fn hadamard(&self, other: &RationalSequence) -> RationalSequence {
        assert_eq!(self.n0, other.n0, "sequences must align");
        let len = self.len().min(other.len());
        RationalSequence {
            n0: self.n0,
            values: (0..len).map(|i| &self.values[i] * &other.values[i]).collect(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self.values.iter().map(|v| v.to_string()).collect::<Vec<_>>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from(BigInt::from(n))
    }

    #[test]
    fn apery_zeta2_terms() {
        let r = PolyRecurrence::apery_zeta2();
        let a = r.extend_i64(&[1, 3], 5).unwrap();
        assert_eq!(a.at(2), &q(19));
        assert_eq!(a.at(3), &q(147));
        assert_eq!(a.at(4), &q(1251));
        // Companion numerators b_N with (0, 5): b_2 = 125/4.
        let b = r.extend_i64(&[0, 5], 3).unwrap();
        assert_eq!(b.at(2), &BigRational::new(BigInt::from(125), BigInt::from(4)));
    }

    #[test]
    fn apery_zeta3_terms() {
        let r = PolyRecurrence::apery_zeta3();
        let a = r.extend_i64(&[1, 5], 4).unwrap();
        assert_eq!(a.at(2), &q(73));
        assert_eq!(a.at(3), &q(1445));
        assert_eq!(a.at(4), &q(33001));
        let b = r.extend_i64(&[0, 6], 2).unwrap();
        assert_eq!(b.at(2), &BigRational::new(BigInt::from(351), BigInt::from(4)));
    }

    #[test]
    fn constant_recurrence() {
        // u_{n+1} - u_n = 0.
        let r = PolyRecurrence::new(vec![QPoly::from_i64(&[-1]), QPoly::from_i64(&[1])], 0);
        let s = r.extend_i64(&[7], 10).unwrap();
        assert!(s.values().iter().all(|v| v == &q(7)));
    }

    #[test]
    fn extend_checks_init_length_and_leading_zero() {
        let r = PolyRecurrence::apery_zeta2();
        assert_eq!(
            r.extend_i64(&[1], 5).unwrap_err(),
            RecurrenceError::WrongInitLength { expected: 2, got: 1 }
        );
        // Leading coefficient (n+1)^2 vanishes at n = -1.
        let bad = PolyRecurrence::new(
            vec![QPoly::from_i64(&[1]), QPoly::from_i64(&[1, 2, 1])],
            -3,
        );
        let err = bad.extend_i64(&[1], 5).unwrap_err();
        assert_eq!(err, RecurrenceError::LeadingZero(-1));
    }

    #[test]
    fn extend_is_linear_in_initial_conditions() {
        let r = PolyRecurrence::apery_zeta3();
        let u = r.extend_i64(&[1, 5], 12).unwrap();
        let v = r.extend_i64(&[0, 6], 12).unwrap();
        let alpha = BigRational::new(BigInt::from(3), BigInt::from(2));
        let beta = BigRational::new(BigInt::from(-5), BigInt::from(7));
        let mixed_init: Vec<BigRational> = (0..2)
            .map(|i| &alpha * u.at(i as i64) + &beta * v.at(i as i64))
            .collect();
        let mixed = r.extend(&mixed_init, 12).unwrap();
        for n in 0..=12 {
            assert_eq!(mixed.at(n), &(&alpha * u.at(n) + &beta * v.at(n)));
        }
    }

    #[test]
    fn dual_is_involutive() {
        for r in [PolyRecurrence::apery_zeta2(), PolyRecurrence::apery_zeta3()] {
            assert_eq!(r.dual().dual(), r);
        }
        // Also on a generic recurrence with positive leading coefficient.
        let r = PolyRecurrence::new(
            vec![QPoly::from_i64(&[3, 1]), QPoly::from_i64(&[-2, 0, 5]), QPoly::from_i64(&[1, 1])],
            0,
        );
        assert_eq!(r.dual().dual(), r);
    }

    #[test]
    fn apery_recurrences_are_self_dual() {
        let l2 = PolyRecurrence::apery_zeta2().self_dual_lambda().unwrap();
        assert_eq!(l2, -BigRational::one());
        let l3 = PolyRecurrence::apery_zeta3().self_dual_lambda().unwrap();
        assert_eq!(l3, -BigRational::one());
    }

    #[test]
    fn generic_recurrence_is_not_self_dual() {
        let r = PolyRecurrence::new(
            vec![QPoly::from_i64(&[1, 7]), QPoly::from_i64(&[2, 0, 3]), QPoly::from_i64(&[5, 1])],
            0,
        );
        assert!(r.self_dual_lambda().is_none());
    }

    #[test]
    fn zeta3_middle_coefficient_shape() {
        // Self-duality forces the middle coefficient into the form
        // (2n+3)(a n^2 + 3 a n + b) in our shift: check divisibility by the
        // reflected-linear factor and the palindromic quadratic.
        let r = PolyRecurrence::apery_zeta3();
        let p1 = r.coeff(1);
        // p1(t) = -(2t+3) q(t) with q(t) = 17t^2+51t+39; q(-3-t) = q(t).
        let c = BigRational::from(BigInt::from(-3));
        let q_reflected = p1.compose_reflect(&c);
        // -(2(-3-t)+3) q(t) = (2t+3) q(t) = -p1(t).
        assert_eq!(q_reflected, p1.scale(&-BigRational::one()));
    }

    #[test]
    fn normalized_is_scalar_invariant() {
        let r = PolyRecurrence::apery_zeta2();
        let s = BigRational::new(BigInt::from(-7), BigInt::from(3));
        let scaled = PolyRecurrence::new(
            r.coeffs().iter().map(|p| p.scale(&s)).collect(),
            r.n0(),
        );
        assert_eq!(r.normalized(), scaled.normalized());
    }

    #[test]
    fn compose_reflect_correct() {
        // p(t) = t^2 + 1; p(-3-t) = t^2 + 6t + 10.
        let p = QPoly::from_i64(&[1, 0, 1]);
        let r = p.compose_reflect(&BigRational::from(BigInt::from(-3)));
        assert_eq!(r, QPoly::from_i64(&[10, 6, 1]));
    }
}

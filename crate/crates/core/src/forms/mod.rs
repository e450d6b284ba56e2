//! Exact cellular integrands as factored rational functions.
//!
//! Everything is kept as a signed product of alphabet factors with integer
//! exponents; nothing is ever expanded. The three frames:
//!
//! * `Z` — differences `z_i - z_j` of marked points on the projective line;
//! * `Simplicial` — coordinates `t_1..t_ell` after pinning `z_1 = 0`,
//!   `z_{n-1} = 1`, `z_n = infinity`;
//! * `Cubical` — coordinates `x_1..x_ell` with `t_i = x_i x_{i+1} ... x_ell`,
//!   where the integration domain is the unit hypercube.

mod build;
mod params;
mod pullback;

pub use build::{
    basic_family_cubical, basic_integrand_cubical, build_basic, build_basic_class, build_general,
    f_z, f_z_edges, general_integrand_cubical, omega, omega_z, to_cubical, to_cubical_form,
    to_simplicial, DifferentialForm,
};
pub use params::{
    divisor_form_symbolic, in_region_c, is_convergent_params, ord_along, solve_homogeneity,
    DivisorForm, HomogeneityError, ParamSet,
};
pub use pullback::{
    edge_key, extend_params, pullback_check, pullback_check_basic, rv3_beukers_exponents,
    rv3_change_of_variables_check, EdgeMap, PullbackError, Rv3Params,
};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Frame {
    Z,
    Simplicial,
    Cubical,
}

/// One letter of the factor alphabet. Indices are 1-based.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Factor {
    /// `z_i - z_j` with `i < j`.
    ZDiff(u8, u8),
    /// `t_i`.
    T(u8),
    /// `1 - t_i`.
    OneMinusT(u8),
    /// `t_i - t_j` with `i < j` (negative on the open cell).
    TDiff(u8, u8),
    /// `x_i`.
    X(u8),
    /// `1 - x_i x_{i+1} ... x_j` with `i <= j`; `i == j` is `1 - x_i`.
    OneMinusXRange(u8, u8),
}

impl Factor {
    pub fn frame(&self) -> Frame {
        match self {
            Factor::ZDiff(..) => Frame::Z,
            Factor::T(_) | Factor::OneMinusT(_) | Factor::TDiff(..) => Frame::Simplicial,
            Factor::X(_) | Factor::OneMinusXRange(..) => Frame::Cubical,
        }
    }

    /// Evaluates the factor at a point, given coordinate values `vars[k]` for
    /// the 1-based variable `k+1` of the frame.
    pub fn eval(&self, vars: &[BigRational]) -> BigRational {
        let v = |i: u8| &vars[i as usize - 1];
        match *self {
            Factor::ZDiff(i, j) => v(i) - v(j),
            Factor::T(i) => v(i).clone(),
            Factor::OneMinusT(i) => BigRational::one() - v(i),
            Factor::TDiff(i, j) => v(i) - v(j),
            Factor::X(i) => v(i).clone(),
            Factor::OneMinusXRange(i, j) => {
                let mut prod = BigRational::one();
                for k in i..=j {
                    prod *= v(k);
                }
                BigRational::one() - prod
            }
        }
    }

    /// Partial derivative with respect to the 1-based variable `var`,
    /// evaluated at a point. Only cubical factors need this (Jacobians of
    /// factor dictionaries).
    pub fn deriv(&self, var: u8, vars: &[BigRational]) -> BigRational {
        let v = |i: u8| &vars[i as usize - 1];
        match *self {
            Factor::X(i) => {
                if i == var {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }
            Factor::OneMinusXRange(i, j) => {
                if var < i || var > j {
                    return BigRational::zero();
                }
                let mut prod = -BigRational::one();
                for k in i..=j {
                    if k != var {
                        prod *= v(k);
                    }
                }
                prod
            }
            _ => unimplemented!("derivative only implemented for cubical factors"),
        }
    }
}

impl fmt::Debug for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Factor::ZDiff(i, j) => write!(f, "(z{i}-z{j})"),
            Factor::T(i) => write!(f, "t{i}"),
            Factor::OneMinusT(i) => write!(f, "(1-t{i})"),
            Factor::TDiff(i, j) => write!(f, "(t{i}-t{j})"),
            Factor::X(i) => write!(f, "x{i}"),
            Factor::OneMinusXRange(i, j) => {
                if i == j {
                    write!(f, "(1-x{i})")
                } else {
                    write!(f, "(1-x{i}..x{j})")
                }
            }
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A nonzero rational function stored as `sign * prod factor^exp`.
///
/// Zero exponents are never stored, so structural equality is functional
/// equality within a frame. The factor ordering in the map is the canonical
/// serialization order.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FactoredRational {
    frame: Frame,
    sign: i8,
    exps: BTreeMap<Factor, i64>,
}

impl FactoredRational {
    pub fn one(frame: Frame) -> Self {
        FactoredRational { frame, sign: 1, exps: BTreeMap::new() }
    }

    pub fn from_factors<I: IntoIterator<Item = (Factor, i64)>>(
        frame: Frame,
        sign: i8,
        factors: I,
    ) -> Self {
        assert!(sign == 1 || sign == -1);
        let mut fr = FactoredRational { frame, sign, exps: BTreeMap::new() };
        for (f, e) in factors {
            fr.push(f, e);
        }
        fr
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn factors(&self) -> impl Iterator<Item = (&Factor, &i64)> {
        self.exps.iter()
    }

    pub fn exponent(&self, f: &Factor) -> i64 {
        self.exps.get(f).copied().unwrap_or(0)
    }

    pub fn num_factors(&self) -> usize {
        self.exps.len()
    }

    pub fn is_one_up_to_sign(&self) -> bool {
        self.exps.is_empty()
    }

    /// Total degree bound: sum of absolute exponents (times factor degree 1
    /// in each variable), used to certify probabilistic identity tests.
    pub fn degree_bound(&self) -> u64 {
        self.exps
            .iter()
            .map(|(f, e)| {
                let width = match *f {
                    Factor::OneMinusXRange(i, j) => (j - i + 1) as u64,
                    _ => 1,
                };
                width * e.unsigned_abs()
            })
            .sum()
    }

    pub fn push(&mut self, f: Factor, e: i64) {
        debug_assert_eq!(f.frame(), self.frame, "factor frame mismatch");
        if e == 0 {
            return;
        }
        let entry = self.exps.entry(f).or_insert(0);
        *entry += e;
        if *entry == 0 {
            self.exps.remove(&f);
        }
    }

    pub fn negate(&mut self) {
        self.sign = -self.sign;
    }

    pub fn inv(&self) -> FactoredRational {
        FactoredRational {
            frame: self.frame,
            sign: self.sign,
            exps: self.exps.iter().map(|(f, e)| (*f, -e)).collect(),
        }
    }

    pub fn pow(&self, k: i64) -> FactoredRational {
        if k == 0 {
            return FactoredRational::one(self.frame);
        }
        let sign = if k % 2 == 0 { 1 } else { self.sign };
        FactoredRational {
            frame: self.frame,
            sign,
            exps: self.exps.iter().map(|(f, e)| (*f, e * k)).collect(),
        }
    }

    /// Evaluates at a point of the frame's coordinate space. `None` when the
    /// point lies on a pole.
    pub fn eval(&self, vars: &[BigRational]) -> Option<BigRational> {
        let mut acc = BigRational::from(BigInt::from(self.sign));
        let mut zero_order = 0i64;
        for (f, &e) in &self.exps {
            let v = f.eval(vars);
            if v.is_zero() {
                zero_order += e;
                if e < 0 {
                    return None;
                }
                continue;
            }
            acc *= pow_rational(&v, e);
        }
        if zero_order > 0 {
            return Some(BigRational::zero());
        }
        Some(acc)
    }

    /// Canonical text form: `sign * prod factor^exp` in map order.
    pub fn canonical_text(&self) -> String {
        let mut s = String::from(if self.sign > 0 { "+" } else { "-" });
        if self.exps.is_empty() {
            s.push('1');
            return s;
        }
        for (i, (f, e)) in self.exps.iter().enumerate() {
            if i > 0 {
                s.push_str(" * ");
            } else {
                s.push(' ');
            }
            if *e == 1 {
                s.push_str(&format!("{f:?}"));
            } else {
                s.push_str(&format!("{f:?}^{e}"));
            }
        }
        s
    }
}

impl std::ops::Mul for &FactoredRational {
    type Output = FactoredRational;
    fn mul(self, rhs: &FactoredRational) -> FactoredRational {
        assert_eq!(self.frame, rhs.frame, "cannot multiply across frames");
        let mut out = self.clone();
        out.sign *= rhs.sign;
        for (f, &e) in &rhs.exps {
            out.push(*f, e);
        }
        out
    }
}

impl std::ops::Div for &FactoredRational {
    type Output = FactoredRational;
    fn div(self, rhs: &FactoredRational) -> FactoredRational {
        self * &rhs.inv()
    }
}

impl fmt::Debug for FactoredRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_text())
    }
}

impl fmt::Display for FactoredRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

pub(crate) fn pow_rational(v: &BigRational, e: i64) -> BigRational {
    if e == 0 {
        return BigRational::one();
    }
    let mut base = if e < 0 { v.recip() } else { v.clone() };
    let mut k = e.unsigned_abs();
    let mut acc = BigRational::one();
    while k > 0 {
        if k & 1 == 1 {
            acc *= &base;
        }
        k >>= 1;
        if k > 0 {
            let b2 = &base * &base;
            base = b2;
        }
    }
    acc
}

/// JSON form of an integrand, per the external interface.
#[derive(Serialize, Deserialize)]
pub struct IntegrandJson {
    pub frame: String,
    pub sign: i8,
    pub factors: Vec<FactorJson>,
}

#[derive(Serialize, Deserialize)]
pub struct FactorJson {
    pub kind: String,
    pub idx: Vec<u8>,
    pub exp: i64,
}

impl FactoredRational {
    pub fn to_json(&self) -> IntegrandJson {
        let frame = match self.frame {
            Frame::Z => "z",
            Frame::Simplicial => "simplicial",
            Frame::Cubical => "cubical",
        };
        let factors = self
            .exps
            .iter()
            .map(|(f, &e)| {
                let (kind, idx) = match *f {
                    Factor::ZDiff(i, j) => ("z_diff", vec![i, j]),
                    Factor::T(i) => ("t", vec![i]),
                    Factor::OneMinusT(i) => ("one_minus_t", vec![i]),
                    Factor::TDiff(i, j) => ("t_diff", vec![i, j]),
                    Factor::X(i) => ("x", vec![i]),
                    Factor::OneMinusXRange(i, j) => ("one_minus_x_range", vec![i, j]),
                };
                FactorJson { kind: kind.to_string(), idx, exp: e }
            })
            .collect();
        IntegrandJson { frame: frame.to_string(), sign: self.sign, factors }
    }
}

/// Signum of a rational (-1, 0, +1).
pub(crate) fn rational_sign(v: &BigRational) -> i8 {
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn factored_mul_cancels() {
        let a = FactoredRational::from_factors(
            Frame::Simplicial,
            1,
            [(Factor::T(1), 2), (Factor::OneMinusT(2), -1)],
        );
        let b = FactoredRational::from_factors(
            Frame::Simplicial,
            -1,
            [(Factor::T(1), -2), (Factor::OneMinusT(2), 1)],
        );
        let prod = &a * &b;
        assert!(prod.is_one_up_to_sign());
        assert_eq!(prod.sign(), -1);
    }

    #[test]
    fn eval_matches_structure() {
        // t1^2 (1-t2)^-1 at t = (1/2, 1/3): (1/4) / (2/3) = 3/8.
        let a = FactoredRational::from_factors(
            Frame::Simplicial,
            1,
            [(Factor::T(1), 2), (Factor::OneMinusT(2), -1)],
        );
        let v = a.eval(&[q(1, 2), q(1, 3)]).unwrap();
        assert_eq!(v, q(3, 8));
    }

    #[test]
    fn eval_pole_and_zero() {
        let a = FactoredRational::from_factors(Frame::Simplicial, 1, [(Factor::T(1), -1)]);
        assert!(a.eval(&[q(0, 1)]).is_none());
        let b = FactoredRational::from_factors(Frame::Simplicial, 1, [(Factor::T(1), 3)]);
        assert_eq!(b.eval(&[q(0, 1)]).unwrap(), BigRational::zero());
    }

    #[test]
    fn one_minus_range_eval() {
        let f = Factor::OneMinusXRange(1, 3);
        let v = f.eval(&[q(1, 2), q(1, 3), q(1, 5)]);
        assert_eq!(v, q(29, 30));
        let d = f.deriv(2, &[q(1, 2), q(1, 3), q(1, 5)]);
        assert_eq!(d, -q(1, 10));
    }

    #[test]
    fn canonical_text_stable() {
        let a = FactoredRational::from_factors(
            Frame::Cubical,
            -1,
            [(Factor::X(2), 1), (Factor::OneMinusXRange(1, 2), -3)],
        );
        assert_eq!(a.canonical_text(), "- x2 * (1-x1..x2)^-3");
    }

    #[test]
    fn pow_rational_negative_exponents() {
        assert_eq!(pow_rational(&q(2, 3), -2), q(9, 4));
        assert_eq!(pow_rational(&q(5, 1), 0), q(1, 1));
    }
}

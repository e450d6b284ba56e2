//! Construction of cellular integrands and the frame changes between them.
//!
//! The infinity-omission rule is applied literally when passing from the
//! `z`-frame to simplicial coordinates: factors containing `z_n` are deleted,
//! `z_1 -> 0`, `z_{n-1} -> 1`, `z_{i+1} -> t_i`. This is exact for the
//! degree-zero products built here.

use super::params::ParamSet;
use super::{rational_sign, Factor, FactoredRational, Frame};
use crate::dihedral::{ConfigClass, DihedralStructure, Perm};
use num_bigint::BigInt;
use num_rational::BigRational;

/// A top-degree form, stored as its coefficient function times
/// `dt_1 ... dt_ell` (or `dx_1 ... dx_ell` in the cubical frame).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DifferentialForm {
    pub coeff: FactoredRational,
    pub degree: usize,
}

fn zdiff(a: u8, b: u8) -> (Factor, i8) {
    if a < b {
        (Factor::ZDiff(a, b), 1)
    } else {
        (Factor::ZDiff(b, a), -1)
    }
}

/// `prod (z_{w_i} - z_{w_{i+1}})^{e_i}` over the cyclic edges of `d`.
fn edge_product(d: &DihedralStructure, exps: &[i64]) -> FactoredRational {
    let n = d.n();
    debug_assert_eq!(exps.len(), n);
    let mut fr = FactoredRational::one(Frame::Z);
    let mut sign = 1i8;
    for (i, (a, b)) in d.edges().enumerate() {
        let (f, s) = zdiff(a, b);
        fr.push(f, exps[i]);
        if s < 0 && exps[i] % 2 != 0 {
            sign = -sign;
        }
    }
    if sign < 0 {
        fr.negate();
    }
    fr
}

/// The function `f_{delta/delta'}` in the `z`-frame.
pub fn f_z(delta: &DihedralStructure, deltap: &DihedralStructure) -> FactoredRational {
    let ones = vec![1i64; delta.n()];
    let num = edge_product(delta, &ones);
    let den = edge_product(deltap, &ones);
    &num / &den
}

/// The generalised function `f(a, b)` in the `z`-frame, exponents taken from
/// edge maps over the two structures.
pub fn f_z_edges(
    delta: &DihedralStructure,
    a: impl Fn(u8, u8) -> i64,
    deltap: &DihedralStructure,
    b: impl Fn(u8, u8) -> i64,
) -> FactoredRational {
    let aexps: Vec<i64> = delta.edges().map(|(x, y)| a(x, y)).collect();
    let bexps: Vec<i64> = deltap.edges().map(|(x, y)| b(x, y)).collect();
    let num = edge_product(delta, &aexps);
    let den = edge_product(deltap, &bexps);
    &num / &den
}

/// The coefficient of the cellular form `omega_sigma` in the `z`-frame:
/// `1 / prod (z_{sigma(i)} - z_{sigma(i+1)})`.
pub fn omega_z(sigma: &DihedralStructure) -> FactoredRational {
    let exps = vec![-1i64; sigma.n()];
    edge_product(sigma, &exps)
}

/// Applies the infinity-omission substitution, turning a degree-zero
/// `z`-frame product on `{1..n}` into a simplicial one.
pub fn to_simplicial(fr: &FactoredRational, n: usize) -> FactoredRational {
    assert_eq!(fr.frame(), Frame::Z);
    let n = n as u8;
    let mut out = FactoredRational::one(Frame::Simplicial);
    let mut sign = fr.sign();
    for (f, &e) in fr.factors() {
        let &Factor::ZDiff(i, j) = f else { unreachable!("z frame") };
        debug_assert!(i < j && j <= n);
        if j == n {
            continue; // factor equal to infinity is omitted
        }
        if i == 1 && j == n - 1 {
            // z_1 - z_{n-1} = -1
            if e % 2 != 0 {
                sign = -sign;
            }
        } else if i == 1 {
            // 0 - t_{j-1}
            out.push(Factor::T(j - 1), e);
            if e % 2 != 0 {
                sign = -sign;
            }
        } else if j == n - 1 {
            // t_{i-1} - 1
            out.push(Factor::OneMinusT(i - 1), e);
            if e % 2 != 0 {
                sign = -sign;
            }
        } else {
            out.push(Factor::TDiff(i - 1, j - 1), e);
        }
    }
    if sign != out.sign() {
        out.negate();
    }
    out
}

/// Exact substitution `t_i = x_i x_{i+1} ... x_ell` for functions.
pub fn to_cubical(fr: &FactoredRational, ell: usize) -> FactoredRational {
    assert_eq!(fr.frame(), Frame::Simplicial);
    let ell = ell as u8;
    let mut out = FactoredRational::one(Frame::Cubical);
    let mut sign = fr.sign();
    for (f, &e) in fr.factors() {
        match *f {
            Factor::T(i) => {
                for k in i..=ell {
                    out.push(Factor::X(k), e);
                }
            }
            Factor::OneMinusT(i) => out.push(Factor::OneMinusXRange(i, ell), e),
            Factor::TDiff(i, j) => {
                // t_i - t_j = -(x_j..x_ell)(1 - x_i..x_{j-1}) for i < j
                out.push(Factor::OneMinusXRange(i, j - 1), e);
                for k in j..=ell {
                    out.push(Factor::X(k), e);
                }
                if e % 2 != 0 {
                    sign = -sign;
                }
            }
            _ => unreachable!("simplicial frame"),
        }
    }
    if sign != out.sign() {
        out.negate();
    }
    out
}

/// Frame change for forms: the function substitution times the Jacobian
/// `prod x_i^{i-1}`.
pub fn to_cubical_form(form: &DifferentialForm) -> DifferentialForm {
    let ell = form.degree;
    let mut coeff = to_cubical(&form.coeff, ell);
    for k in 2..=ell as u8 {
        coeff.push(Factor::X(k), (k - 1) as i64);
    }
    DifferentialForm { coeff, degree: ell }
}

/// An interior rational point of the open simplex, for sign normalisation.
fn interior_point(ell: usize) -> Vec<BigRational> {
    (1..=ell)
        .map(|i| BigRational::new(BigInt::from(i as i64), BigInt::from(ell as i64 + 1)))
        .collect()
}

/// Flips the sign if needed so the function is positive on the open cell.
/// The factors are nonvanishing there, so one interior sample decides.
fn normalize_positive(fr: &mut FactoredRational, ell: usize) {
    let v = fr
        .eval(&interior_point(ell))
        .expect("no poles on the open cell");
    match rational_sign(&v) {
        1 => {}
        -1 => fr.negate(),
        _ => panic!("cell integrand vanished at an interior point"),
    }
}

/// The basic cellular integrand data `(f, omega)` for the pair
/// `(delta0, sigma delta0)`, in the simplicial frame, signs fixed so that
/// both `f` and the `omega` coefficient are positive on the open cell.
pub fn build_basic(sigma: &Perm) -> (FactoredRational, DifferentialForm) {
    let n = sigma.n();
    let ell = n - 3;
    let delta0 = DihedralStructure::standard(n);
    let deltap = DihedralStructure::from_perm(sigma);
    let mut f = to_simplicial(&f_z(&delta0, &deltap), n);
    normalize_positive(&mut f, ell);
    let mut w = to_simplicial(&omega_z(&deltap), n);
    normalize_positive(&mut w, ell);
    (f, DifferentialForm { coeff: w, degree: ell })
}

/// Same for a configuration class, using its canonical representative.
pub fn build_basic_class(c: &ConfigClass) -> (FactoredRational, DifferentialForm) {
    build_basic(c.rep())
}

/// The cellular form `omega_sigma` in simplicial coordinates, positivised.
pub fn omega(sigma: &Perm) -> DifferentialForm {
    let n = sigma.n();
    let deltap = DihedralStructure::from_perm(sigma);
    let mut w = to_simplicial(&omega_z(&deltap), n);
    normalize_positive(&mut w, n - 3);
    DifferentialForm { coeff: w, degree: n - 3 }
}

/// The generalised integrand `(f(a,b), omega)` in the simplicial frame.
pub fn build_general(params: &ParamSet) -> (FactoredRational, DifferentialForm) {
    let sigma = params.sigma();
    let n = sigma.n();
    let ell = n - 3;
    let delta0 = DihedralStructure::standard(n);
    let deltap = DihedralStructure::from_perm(sigma);
    let fz = f_z_edges(
        &delta0,
        |x, y| params.a_edge(x, y),
        &deltap,
        |x, y| params.b_edge(x, y),
    );
    let mut f = to_simplicial(&fz, n);
    normalize_positive(&mut f, ell);
    let mut w = to_simplicial(&omega_z(&deltap), n);
    normalize_positive(&mut w, ell);
    (f, DifferentialForm { coeff: w, degree: ell })
}

/// The full basic integrand `f^N omega` in the cubical frame, including the
/// Jacobian; positive on the open hypercube.
pub fn basic_integrand_cubical(sigma: &Perm, n_power: i64) -> FactoredRational {
    let (fc, wc) = basic_family_cubical(sigma);
    let out = &fc.pow(n_power) * &wc;
    debug_assert_eq!(out.sign(), 1, "cubical integrand must be positive");
    out
}

/// The pieces `(f, omega)` of the basic integrand in the cubical frame, with
/// the Jacobian folded into the omega part. Both are positive on the open
/// hypercube.
pub fn basic_family_cubical(sigma: &Perm) -> (FactoredRational, FactoredRational) {
    let (f, w) = build_basic(sigma);
    let ell = w.degree;
    let fc = to_cubical(&f, ell);
    let wc = to_cubical_form(&w);
    debug_assert_eq!(fc.sign(), 1);
    debug_assert_eq!(wc.coeff.sign(), 1);
    (fc, wc.coeff)
}

/// The generalised integrand `f(a,b) omega` in the cubical frame.
pub fn general_integrand_cubical(params: &ParamSet) -> FactoredRational {
    let (f, w) = build_general(params);
    let ell = w.degree;
    let fc = to_cubical(&f, ell);
    let wc = to_cubical_form(&w);
    let out = &fc * &wc.coeff;
    debug_assert_eq!(out.sign(), 1, "cubical integrand must be positive");
    out
}

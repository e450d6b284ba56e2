//! Exponent parameters `(a, b)` of generalised cellular integrands.
//!
//! `a` is indexed by the edges `{i, i+1}` of the standard order, `b` by the
//! edges `{sigma_j, sigma_{j+1}}` of the second structure (position-indexed
//! along the word of `sigma`). The homogeneity equations say that at every
//! letter `v = sigma_j`,
//!
//!   a_{v-1,v} + a_{v,v+1} = b_{sigma_{j-1},sigma_j} + b_{sigma_j,sigma_{j+1}}.
//!
//! For odd `n` the `b` are determined by `a`; for even `n` the `a` must lie in
//! the lattice cut out by the alternating-sum condition and one `b` is free.

use crate::dihedral::{
    finite_distance_divisors, indicator, ord_omega, DihedralStructure, HalfInt, Perm,
    StablePartition,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HomogeneityError {
    #[error("expected {expected} a-parameters, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("alternating sum of the homogeneity equations is {0}, not 0: a is not in the lattice H_sigma")]
    InconsistentA(i64),
    #[error("homogeneity system has no integral solution (parity obstruction)")]
    NonIntegral,
    #[error("even n needs a designated b-edge and value")]
    MissingB,
    #[error("edge {0:?} is not an edge of sigma")]
    NoSuchEdge((u8, u8)),
}

/// A full homogeneous parameter set for the pair `(delta0, sigma delta0)`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ParamSet {
    sigma: Perm,
    /// `a[i] = a_{i+1, i+2}` cyclically (`a[n-1] = a_{n,1}`).
    a: Vec<i64>,
    /// `b[j]` for the edge `{w_j, w_{j+1}}` of the word of `sigma`.
    b: Vec<i64>,
}

impl ParamSet {
    pub fn sigma(&self) -> &Perm {
        &self.sigma
    }

    pub fn a(&self) -> &[i64] {
        &self.a
    }

    pub fn b(&self) -> &[i64] {
        &self.b
    }

    /// All parameters equal to `N`: the basic cellular integrand.
    pub fn all_equal(sigma: &Perm, n_power: i64) -> ParamSet {
        let n = sigma.n();
        ParamSet {
            sigma: sigma.clone(),
            a: vec![n_power; n],
            b: vec![n_power; n],
        }
    }

    /// Exponent of the standard-order edge `{x, y}` (must be consecutive
    /// values mod n).
    pub fn a_edge(&self, x: u8, y: u8) -> i64 {
        let n = self.sigma.n() as u8;
        let (x, y) = if (x % n) + 1 == y { (x, y) } else { (y, x) };
        assert!((x % n) + 1 == y, "({x},{y}) is not a delta0 edge");
        self.a[x as usize - 1]
    }

    /// Exponent of the sigma-order edge `{x, y}`.
    pub fn b_edge(&self, x: u8, y: u8) -> i64 {
        let w = self.sigma.word();
        let n = w.len();
        for j in 0..n {
            let (p, q) = (w[j], w[(j + 1) % n]);
            if (p, q) == (x, y) || (q, p) == (x, y) {
                return self.b[j];
            }
        }
        panic!("({x},{y}) is not a sigma edge");
    }

    /// Verifies the homogeneity equations (used on deserialised data).
    pub fn verify(&self) -> bool {
        let (s, _) = letter_sums(&self.sigma, &self.a);
        let n = self.sigma.n();
        (0..n).all(|j| self.b[(j + n - 1) % n] + self.b[j] == s[j])
    }
}

/// `s[j] = a_{v-1,v} + a_{v,v+1}` for the letter `v = w[j]`.
fn letter_sums(sigma: &Perm, a: &[i64]) -> (Vec<i64>, Vec<u8>) {
    let n = sigma.n();
    let w = sigma.word();
    let s = (0..n)
        .map(|j| {
            let v = w[j] as usize;
            let prev = (v + n - 2) % n; // edge {v-1, v}
            let next = v - 1; // edge {v, v+1}
            a[prev] + a[next]
        })
        .collect();
    (s, w.to_vec())
}

/// Solves the homogeneity equations for `b` given `a`.
///
/// Odd `n`: the solution is unique (`b_edge` must be `None`). Even `n`: `a`
/// must satisfy the alternating-sum condition and the value of one designated
/// `b`-edge must be supplied.
pub fn solve_homogeneity(
    sigma: &Perm,
    a: &[i64],
    b_edge: Option<((u8, u8), i64)>,
) -> Result<ParamSet, HomogeneityError> {
    let n = sigma.n();
    if a.len() != n {
        return Err(HomogeneityError::WrongLength { expected: n, got: a.len() });
    }
    let (s, w) = letter_sums(sigma, a);
    // partial[j]: solution with b[0] = 0; the general solution adds
    // (-1)^j tau.
    let mut partial = vec![0i64; n];
    for j in 1..n {
        partial[j] = s[j] - partial[j - 1];
    }
    let tau = if n % 2 == 1 {
        let twice = s[0] - partial[n - 1];
        if twice % 2 != 0 {
            return Err(HomogeneityError::NonIntegral);
        }
        twice / 2
    } else {
        let alt: i64 = (0..n).map(|j| if j % 2 == 0 { s[j] } else { -s[j] }).sum();
        if alt != 0 {
            return Err(HomogeneityError::InconsistentA(alt));
        }
        let Some(((x, y), val)) = b_edge else {
            return Err(HomogeneityError::MissingB);
        };
        let j0 = (0..n)
            .find(|&j| {
                let (p, q) = (w[j], w[(j + 1) % n]);
                (p, q) == (x, y) || (q, p) == (x, y)
            })
            .ok_or(HomogeneityError::NoSuchEdge((x, y)))?;
        let sign = if j0 % 2 == 0 { 1 } else { -1 };
        sign * (val - partial[j0])
    };
    let b: Vec<i64> = (0..n)
        .map(|j| partial[j] + if j % 2 == 0 { tau } else { -tau })
        .collect();
    let params = ParamSet { sigma: sigma.clone(), a: a.to_vec(), b };
    debug_assert!(params.verify());
    Ok(params)
}

/// Exact valuation of `f(a,b) omega` along the divisor `D`, by the indicator
/// formula. The result is always integral for homogeneous parameters.
pub fn ord_along(params: &ParamSet, d: &StablePartition) -> HalfInt {
    let n = params.sigma.n();
    let w = params.sigma.word();
    let mut doubled = 0i64;
    for i in 0..n {
        let x = i as u8 + 1;
        let y = if x == n as u8 { 1 } else { x + 1 };
        doubled += params.a[i] * indicator(d, x, y).doubled();
    }
    for j in 0..n {
        doubled -= params.b[j] * indicator(d, w[j], w[(j + 1) % n]).doubled();
    }
    let sigma_structure = DihedralStructure::from_perm(&params.sigma);
    let v = HalfInt(doubled) + ord_omega(&sigma_structure, d);
    debug_assert!(v.is_integer(), "valuation of a rational form must be integral");
    v
}

/// Convergence of the generalised integrand: non-negative valuation along
/// every divisor at finite distance from the standard cell. On failure the
/// witness divisor is returned; two-element blocks `{i, i+1}` (where the
/// valuation is just `a_{i,i+1}`) are checked first, in index order.
pub fn is_convergent_params(params: &ParamSet) -> Result<(), StablePartition> {
    let n = params.sigma.n();
    let delta0 = DihedralStructure::standard(n);
    for i in 0..n {
        let x = i as u8 + 1;
        let y = if x == n as u8 { 1 } else { x + 1 };
        let d = StablePartition::from_block(n, &[x, y]).expect("adjacent pair is stable");
        if ord_along(params, &d).is_negative() {
            return Err(d);
        }
    }
    for d in finite_distance_divisors(&delta0).expect("n >= 4") {
        if ord_along(params, &d).is_negative() {
            return Err(d);
        }
    }
    Ok(())
}

/// The region `C^N = { x in N^N : |x_i - m| < m / N^2 for some m }`,
/// which contains the diagonal and consists of convergent parameters when
/// intersected with the homogeneity lattice.
pub fn in_region_c(x: &[i64]) -> bool {
    let n = x.len() as i64;
    if x.iter().any(|&v| v < 0) {
        return false;
    }
    let hi = x.iter().copied().max().unwrap_or(0);
    // |x_i - m| n^2 < m for all i; scanning m up to slightly beyond max x_i
    // suffices since m must exceed x_i n^2/(n^2+1).
    for m in 1..=hi + hi / (n * n) + 2 {
        if x.iter().all(|&v| (v - m).abs() * n * n < m) {
            return true;
        }
    }
    false
}

/// A valuation linear form over the free parameters, for symbolic sign
/// counting: `constant + sum coeffs[k] * free_k` where the free parameters
/// are `a_1..a_n` (odd n) or `a_1..a_n, b` (even n, designated edge).
#[derive(Clone, Debug, PartialEq)]
pub struct DivisorForm {
    pub divisor: StablePartition,
    pub coeffs: Vec<BigRational>,
    pub constant: BigRational,
}

impl DivisorForm {
    pub fn positive_terms(&self) -> usize {
        self.coeffs.iter().filter(|c| c.is_positive()).count()
    }

    pub fn negative_terms(&self) -> usize {
        self.coeffs.iter().filter(|c| c.is_negative()).count()
    }

    /// Evaluates at concrete free parameters.
    pub fn eval(&self, free: &[i64]) -> BigRational {
        assert_eq!(free.len(), self.coeffs.len());
        let mut acc = self.constant.clone();
        for (c, &v) in self.coeffs.iter().zip(free) {
            acc += c * BigRational::from(BigInt::from(v));
        }
        acc
    }
}

/// Valuation of `f(a,b) omega` along `D` as a symbolic linear form, with the
/// `b`-parameters eliminated through the homogeneity equations.
///
/// For even `n` the designated free edge `b_edge` must be given.
pub fn divisor_form_symbolic(
    sigma: &Perm,
    d: &StablePartition,
    b_edge: Option<(u8, u8)>,
) -> Result<DivisorForm, HomogeneityError> {
    let n = sigma.n();
    let w = sigma.word();
    let even = n % 2 == 0;
    let nfree = if even { n + 1 } else { n };
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));

    // Symbolic s[j] over the a-parameters.
    let mut s_sym = vec![vec![BigRational::zero(); n]; n];
    for j in 0..n {
        let v = w[j] as usize;
        s_sym[j][(v + n - 2) % n] += BigRational::one();
        s_sym[j][v - 1] += BigRational::one();
    }
    // partial[j] with tau = 0, as linear forms over a.
    let mut partial = vec![vec![BigRational::zero(); n]; n];
    for j in 1..n {
        for k in 0..n {
            let v = &s_sym[j][k] - &partial[j - 1][k];
            partial[j][k] = v;
        }
    }
    // tau as a linear form over the free parameters.
    let mut tau = vec![BigRational::zero(); nfree];
    if even {
        let Some((x, y)) = b_edge else { return Err(HomogeneityError::MissingB) };
        let j0 = (0..n)
            .find(|&j| {
                let (p, q) = (w[j], w[(j + 1) % n]);
                (p, q) == (x, y) || (q, p) == (x, y)
            })
            .ok_or(HomogeneityError::NoSuchEdge((x, y)))?;
        let sign = if j0 % 2 == 0 { BigRational::one() } else { -BigRational::one() };
        tau[n] = sign.clone(); // the free b contributes +-b
        for k in 0..n {
            tau[k] = -&sign * &partial[j0][k];
        }
    } else {
        for k in 0..n {
            tau[k] = (&s_sym[0][k] - &partial[n - 1][k]) * &half;
        }
    }

    // b[j] = partial[j] + (-1)^j tau, over the free parameters.
    let b_sym: Vec<Vec<BigRational>> = (0..n)
        .map(|j| {
            let sgn = if j % 2 == 0 { BigRational::one() } else { -BigRational::one() };
            (0..nfree)
                .map(|k| {
                    let base = if k < n { partial[j][k].clone() } else { BigRational::zero() };
                    base + &sgn * &tau[k]
                })
                .collect()
        })
        .collect();

    let mut coeffs = vec![BigRational::zero(); nfree];
    // a-side: + a_i I_D(edge_i).
    for i in 0..n {
        let x = i as u8 + 1;
        let y = if x == n as u8 { 1 } else { x + 1 };
        let ind = BigRational::from(BigInt::from(indicator(d, x, y).doubled())) * &half;
        coeffs[i] += ind;
    }
    // b-side: - b_j I_D(sigma edge_j), expanded over the free parameters.
    for j in 0..n {
        let ind =
            BigRational::from(BigInt::from(indicator(d, w[j], w[(j + 1) % n]).doubled())) * &half;
        if ind.is_zero() {
            continue;
        }
        for k in 0..nfree {
            let delta = &ind * &b_sym[j][k];
            coeffs[k] -= delta;
        }
    }
    let sigma_structure = DihedralStructure::from_perm(sigma);
    let constant =
        BigRational::from(BigInt::from(ord_omega(&sigma_structure, d).doubled())) * &half;
    Ok(DivisorForm { divisor: *d, coeffs, constant })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(w: &[u8]) -> Perm {
        Perm::new(w.to_vec()).unwrap()
    }

    #[test]
    fn dixon_b_parameters() {
        // sigma = (5,2,4,1,3): b_{1,3} = a1+a2-a4, b_{2,4} = a2+a3-a5.
        let sigma = perm(&[5, 2, 4, 1, 3]);
        let a = [3, 1, 4, 1, 5];
        let p = solve_homogeneity(&sigma, &a, None).unwrap();
        assert_eq!(p.b_edge(1, 3), a[0] + a[1] - a[3]);
        assert_eq!(p.b_edge(2, 4), a[1] + a[2] - a[4]);
        assert!(p.verify());
    }

    #[test]
    fn rhin_viola_constraint_and_b14() {
        // sigma = (1,4,2,6,3,5): needs a4+a5 = a1+a2; b_{1,4} = a6+a3-b.
        let sigma = perm(&[1, 4, 2, 6, 3, 5]);
        let bad = [1, 2, 3, 4, 5, 6];
        let err = solve_homogeneity(&sigma, &bad, Some(((3, 6), 0))).unwrap_err();
        assert!(matches!(err, HomogeneityError::InconsistentA(_)));

        let a = [2, 3, 1, 4, 1, 7]; // a4+a5 = 5 = a1+a2
        let b = 2;
        let p = solve_homogeneity(&sigma, &a, Some(((3, 6), b))).unwrap();
        assert_eq!(p.b_edge(3, 6), b);
        assert_eq!(p.b_edge(1, 4), a[5] + a[2] - b);
        assert_eq!(p.b_edge(2, 4), a[3] - a[5] + b);
        assert_eq!(p.b_edge(3, 5), a[1] + a[2] - b);
        assert!(p.verify());
    }

    #[test]
    fn all_equal_always_solves() {
        for w in [vec![5u8, 2, 4, 1, 3], vec![6, 2, 4, 1, 5, 3], vec![8, 2, 7, 3, 6, 4, 1, 5]] {
            let sigma = perm(&w);
            let n = sigma.n();
            let p = ParamSet::all_equal(&sigma, 7);
            assert!(p.verify());
            // And the solver reproduces it.
            let a = vec![7i64; n];
            let solved = if n % 2 == 0 {
                let (x, y) = (sigma.word()[0], sigma.word()[1]);
                solve_homogeneity(&sigma, &a, Some(((x, y), 7))).unwrap()
            } else {
                solve_homogeneity(&sigma, &a, None).unwrap()
            };
            assert_eq!(solved, p);
        }
    }

    #[test]
    fn n8_family_b_parameters() {
        // sigma = (8,2,7,3,6,4,1,5), free b = b_{5,8}; published reductions.
        let sigma = perm(&[8, 2, 7, 3, 6, 4, 1, 5]);
        // H_sigma: a6+a7+a8 = a2+a3+a4.
        let a = [3, 1, 4, 1, 5, 2, 1, 3]; // 2+1+3 = 6 = 1+4+1
        let b = 2;
        let p = solve_homogeneity(&sigma, &a, Some(((5, 8), b))).unwrap();
        let (a1, a2, a3, a4, a5, a6, a7, _a8) =
            (a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7]);
        assert_eq!(p.b_edge(2, 7), a1 + a6 - a3 - a4 + b);
        assert_eq!(p.b_edge(4, 6), a4 + a5 + a6 + a7 - a1 - a2 - b);
        assert_eq!(p.b_edge(3, 7), a3 + a4 + a7 - a1 - b);
        assert_eq!(p.b_edge(1, 4), a1 + a2 + a3 - a5 - a6 - a7 + b);
        assert_eq!(p.b_edge(3, 6), a1 + a2 - a4 - a7 + b);
        assert_eq!(p.b_edge(1, 5), a4 + a5 - b);
    }

    #[test]
    fn valuation_on_two_element_blocks_is_a() {
        let sigma = perm(&[5, 2, 4, 1, 3]);
        let a = [3, 1, 4, 1, 5];
        let p = solve_homogeneity(&sigma, &a, None).unwrap();
        for i in 0..5u8 {
            let x = i + 1;
            let y = if x == 5 { 1 } else { x + 1 };
            let d = StablePartition::from_block(5, &[x, y]).unwrap();
            assert_eq!(ord_along(&p, &d), HalfInt::from_int(a[i as usize]));
            // omega is regular there.
            let s = DihedralStructure::from_perm(&sigma);
            assert_eq!(ord_omega(&s, &d), HalfInt(0));
        }
    }

    #[test]
    fn rv_divisor_126_345() {
        let sigma = perm(&[1, 4, 2, 6, 3, 5]);
        let a = [2, 3, 1, 4, 1, 7];
        let b = 2;
        let p = solve_homogeneity(&sigma, &a, Some(((3, 6), b))).unwrap();
        let d = StablePartition::from_block(6, &[1, 2, 6]).unwrap();
        assert_eq!(ord_along(&p, &d), HalfInt::from_int(a[3] + b - a[1]));
        // And 156|234: a6 + a2 + a3 - a4 - b.
        let d2 = StablePartition::from_block(6, &[1, 5, 6]).unwrap();
        assert_eq!(ord_along(&p, &d2), HalfInt::from_int(a[5] + a[1] + a[2] - a[3] - b));
        // And 123|456: a1 + a2 + 1.
        let d3 = StablePartition::from_block(6, &[1, 2, 3]).unwrap();
        assert_eq!(ord_along(&p, &d3), HalfInt::from_int(a[0] + a[1] + 1));
    }

    #[test]
    fn n8_divisor_1278_3456() {
        let sigma = perm(&[8, 2, 7, 3, 6, 4, 1, 5]);
        let a = [3, 1, 4, 1, 5, 2, 1, 3];
        let p = solve_homogeneity(&sigma, &a, Some(((5, 8), 2))).unwrap();
        let d = StablePartition::from_block(8, &[1, 2, 7, 8]).unwrap();
        assert_eq!(ord_along(&p, &d), HalfInt::from_int(a[2] + a[3] - a[5]));
        let d128 = StablePartition::from_block(8, &[1, 2, 8]).unwrap();
        assert_eq!(ord_along(&p, &d128), HalfInt::from_int(a[0] + 2 - a[6]));
        let d1234 = StablePartition::from_block(8, &[1, 2, 3, 4]).unwrap();
        assert_eq!(ord_along(&p, &d1234), HalfInt::from_int(a[4] + a[5] + a[6] - 2 + 1));
        let d456 = StablePartition::from_block(8, &[4, 5, 6]).unwrap();
        assert_eq!(ord_along(&p, &d456), HalfInt::from_int(a[0] + a[1] + 2 - a[5] - a[6]));
    }

    #[test]
    fn basic_parameters_always_convergent() {
        for w in [vec![5u8, 2, 4, 1, 3], vec![6, 2, 4, 1, 5, 3], vec![8, 2, 5, 1, 6, 4, 7, 3]] {
            let sigma = perm(&w);
            for n_pow in [0, 1, 5] {
                let p = ParamSet::all_equal(&sigma, n_pow);
                assert!(is_convergent_params(&p).is_ok(), "N={n_pow} w={w:?}");
            }
        }
    }

    #[test]
    fn dixon_negative_a_fails_with_adjacent_witness() {
        let sigma = perm(&[5, 2, 4, 1, 3]);
        let a = [2, -1, 3, 1, 2];
        let p = solve_homogeneity(&sigma, &a, None).unwrap();
        let witness = is_convergent_params(&p).unwrap_err();
        assert_eq!(witness, StablePartition::from_block(5, &[2, 3]).unwrap());
    }

    #[test]
    fn n8_published_convergent_point() {
        // a = (1,0,0,1,0,0,0), a8 from the lattice, b = 0: the 2 zeta(5) - 2
        // point of the n=8 family.
        let sigma = perm(&[8, 2, 7, 3, 6, 4, 1, 5]);
        let a = [1, 0, 0, 1, 0, 0, 0, 1]; // a8 = a2+a3+a4-a6-a7 = 1
        let p = solve_homogeneity(&sigma, &a, Some(((5, 8), 0))).unwrap();
        assert!(is_convergent_params(&p).is_ok());
    }

    #[test]
    fn region_c_diagonal_and_boundary() {
        assert!(in_region_c(&[7, 7, 7, 7, 7]));
        assert!(in_region_c(&[100, 101, 100, 99, 100]));
        // Stepping one past m/n^2 leaves the region for small m.
        let n = 5i64;
        let m = 10i64;
        let step = m / (n * n) + 1;
        assert!(!in_region_c(&[m, m + step, m, m, m]));
        assert!(!in_region_c(&[1, -1, 1, 1, 1]));
    }

    #[test]
    fn symbolic_divisor_form_matches_concrete_valuation() {
        let sigma = perm(&[1, 4, 2, 6, 3, 5]);
        let a = [2, 3, 1, 4, 1, 7];
        let b = 2;
        let p = solve_homogeneity(&sigma, &a, Some(((3, 6), b))).unwrap();
        let delta0 = DihedralStructure::standard(6);
        let mut free: Vec<i64> = a.to_vec();
        free.push(b);
        for d in finite_distance_divisors(&delta0).unwrap() {
            let form = divisor_form_symbolic(&sigma, &d, Some((3, 6))).unwrap();
            let direct = ord_along(&p, &d);
            let via_form = form.eval(&free);
            assert_eq!(
                via_form,
                BigRational::new(BigInt::from(direct.doubled()), BigInt::from(2)),
                "divisor {d:?}"
            );
        }
    }
}

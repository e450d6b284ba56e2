//! The product pullback identity and substitution checks.
//!
//! Both checks compare factored rational functions by exact evaluation at
//! random rational points. The sample space per coordinate has about 2^62
//! elements, so by Schwartz-Zippel a nonzero difference of total degree `D`
//! survives a single evaluation with probability at most `D/2^62`; twenty
//! independent points push the failure probability below `2^-60` for every
//! integrand in range.

use super::build::f_z_edges;
use super::{pow_rational, Factor, FactoredRational, Frame};
use crate::dihedral::{product, DihedralPair, ProductError, Triple};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

/// Exponents keyed by unordered edges `{min, max}`.
pub type EdgeMap = BTreeMap<(u8, u8), i64>;

pub fn edge_key(a: u8, b: u8) -> (u8, u8) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PullbackError {
    #[error(transparent)]
    Product(#[from] ProductError),
    #[error("parameters violate homogeneity at letter {0}")]
    NotHomogeneous(u8),
    #[error("missing parameter for edge {0:?}")]
    MissingEdge((u8, u8)),
    #[error("parameter extension has no integral solution")]
    NonIntegralExtension,
    #[error("the two sides differ (or no non-degenerate sample points found)")]
    IdentityFailed,
}

fn neighbours(d: &crate::dihedral::DihedralStructure, v: u8) -> (u8, u8) {
    let w = d.word();
    let n = w.len();
    let i = w.iter().position(|&l| l == v).expect("label present");
    (w[(i + n - 1) % n], w[(i + 1) % n])
}

/// Checks the homogeneity equations of a pair with edge-map parameters.
fn check_homogeneous(pair: &DihedralPair, a: &EdgeMap, b: &EdgeMap) -> Result<(), PullbackError> {
    let get = |m: &EdgeMap, x: u8, y: u8| -> Result<i64, PullbackError> {
        m.get(&edge_key(x, y)).copied().ok_or(PullbackError::MissingEdge(edge_key(x, y)))
    };
    for &v in pair.delta.word() {
        let (d1, d2) = neighbours(&pair.delta, v);
        let (p1, p2) = neighbours(&pair.deltap, v);
        let lhs = get(a, d1, v)? + get(a, v, d2)?;
        let rhs = get(b, p1, v)? + get(b, v, p2)?;
        if lhs != rhs {
            return Err(PullbackError::NotHomogeneous(v));
        }
    }
    Ok(())
}

/// Extends partial parameters on a multipliable pair to a full homogeneous
/// set: the exponents on the edges inside the triple are determined uniquely
/// by the homogeneity equations, and stay equal to `N` if everything given
/// equals `N`.
pub fn extend_params(
    pair: &DihedralPair,
    a_partial: &EdgeMap,
    b_partial: &EdgeMap,
    t: &Triple,
) -> Result<(EdgeMap, EdgeMap), PullbackError> {
    let inside = |x: u8, y: u8| t.contains(&x) && t.contains(&y);

    // Unknown slots: edges of delta / delta' with both ends in the triple.
    let mut unknowns: Vec<(bool, (u8, u8))> = Vec::new();
    for (x, y) in pair.delta.edges() {
        if inside(x, y) && !a_partial.contains_key(&edge_key(x, y)) {
            unknowns.push((true, edge_key(x, y)));
        }
    }
    for (x, y) in pair.deltap.edges() {
        if inside(x, y) && !b_partial.contains_key(&edge_key(x, y)) {
            unknowns.push((false, edge_key(x, y)));
        }
    }
    unknowns.sort();
    unknowns.dedup();

    // One homogeneity equation per letter: unknown coefficients on the left,
    // known contributions moved to the right.
    let m = unknowns.len();
    let mut rows: Vec<(Vec<i64>, i64)> = Vec::new();
    for &v in pair.delta.word() {
        let mut coeff = vec![0i64; m];
        let mut rhs = 0i64;
        {
            let mut term = |is_a: bool, x: u8, y: u8, sgn: i64| -> Result<(), PullbackError> {
                let key = edge_key(x, y);
                if let Some(idx) = unknowns.iter().position(|&(s, e)| s == is_a && e == key) {
                    coeff[idx] += sgn;
                    return Ok(());
                }
                let map = if is_a { a_partial } else { b_partial };
                let val = map.get(&key).copied().ok_or(PullbackError::MissingEdge(key))?;
                rhs -= sgn * val;
                Ok(())
            };
            let (d1, d2) = neighbours(&pair.delta, v);
            let (p1, p2) = neighbours(&pair.deltap, v);
            term(true, d1, v, 1)?;
            term(true, v, d2, 1)?;
            term(false, p1, v, -1)?;
            term(false, v, p2, -1)?;
        }
        rows.push((coeff, rhs));
    }

    let solution = solve_integer_system(&rows, m).ok_or(PullbackError::NonIntegralExtension)?;

    let mut a = a_partial.clone();
    let mut b = b_partial.clone();
    for (idx, &(is_a, edge)) in unknowns.iter().enumerate() {
        let map = if is_a { &mut a } else { &mut b };
        map.insert(edge, solution[idx]);
    }
    check_homogeneous(pair, &a, &b)?;
    Ok((a, b))
}

/// Gaussian elimination over the rationals for a small (over)determined
/// system; `None` if inconsistent, underdetermined, or non-integral.
fn solve_integer_system(rows: &[(Vec<i64>, i64)], m: usize) -> Option<Vec<i64>> {
    let mut mat: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|(c, r)| {
            let mut row: Vec<BigRational> =
                c.iter().map(|&v| BigRational::from(BigInt::from(v))).collect();
            row.push(BigRational::from(BigInt::from(*r)));
            row
        })
        .collect();
    let nrows = mat.len();

    if m == 0 {
        return mat
            .iter()
            .all(|row| row[0].is_zero())
            .then(Vec::new);
    }

    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut r = 0;
    for c in 0..m {
        let Some(p) = (r..nrows).find(|&i| !mat[i][c].is_zero()) else { continue };
        mat.swap(r, p);
        let inv = mat[r][c].recip();
        for v in mat[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..nrows {
            if i != r && !mat[i][c].is_zero() {
                let f = mat[i][c].clone();
                for k in 0..=m {
                    let delta = &f * &mat[r][k];
                    mat[i][k] -= delta;
                }
            }
        }
        pivots.push((r, c));
        r += 1;
        if r == nrows {
            break;
        }
    }
    for row in &mat {
        if row[..m].iter().all(|v| v.is_zero()) && !row[m].is_zero() {
            return None;
        }
    }
    if pivots.len() < m {
        return None;
    }
    let mut sol = vec![0i64; m];
    for &(i, c) in &pivots {
        let v = &mat[i][m];
        if !v.is_integer() {
            return None;
        }
        sol[c] = i64::try_from(v.to_integer()).ok()?;
    }
    Some(sol)
}

/// Evaluates a `z`-frame factored rational at labelled points, omitting every
/// factor that touches the label `omit` (the marked point sent to infinity).
fn eval_omit(
    fr: &FactoredRational,
    values: &BTreeMap<u8, BigRational>,
    omit: u8,
) -> Option<BigRational> {
    let mut acc = BigRational::from(BigInt::from(fr.sign()));
    for (f, &e) in fr.factors() {
        let &Factor::ZDiff(i, j) = f else { unreachable!("z frame") };
        if i == omit || j == omit {
            continue;
        }
        let d = values.get(&i)? - values.get(&j)?;
        if d.is_zero() {
            return None;
        }
        acc *= pow_rational(&d, e);
    }
    Some(acc)
}

pub(crate) fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// A rational in (0, 1) with ~2^62 possible numerators.
pub(crate) fn random_rational(state: &mut u64) -> BigRational {
    let num = (splitmix(state) >> 2) | 1;
    BigRational::new(BigInt::from(num), BigInt::from(1u64 << 62))
}

/// Verifies the pullback identity `m^*(f_1 (x) f_2) = +- f_alpha` for the
/// product of two pairs along triples, by exact evaluation at `points` random
/// rational points with the triple sent to `(0, 1, infinity)`. Returns the
/// matched sign.
///
/// `a`/`b` are homogeneous parameters on the product pair `(alpha, alpha')`;
/// the factor parameters are their restrictions, completed by
/// [`extend_params`].
pub fn pullback_check(
    pair1: &DihedralPair,
    pair2: &DihedralPair,
    t1: &Triple,
    t2: &Triple,
    a: &EdgeMap,
    b: &EdgeMap,
    points: usize,
) -> Result<i8, PullbackError> {
    let prod = product(pair1, pair2, t1, t2)?;
    check_homogeneous(&prod, a, b)?;

    // Rename pair2 labels through the triple identification.
    let mut rename = [0u8; 256];
    for (l, slot) in rename.iter_mut().enumerate() {
        *slot = l as u8;
    }
    for k in 0..3 {
        rename[t2[k] as usize] = t1[k];
    }
    let relabel = |d: &crate::dihedral::DihedralStructure| {
        let cycle: Vec<u8> = d.word().iter().map(|&l| rename[l as usize]).collect();
        crate::dihedral::DihedralStructure::from_cycle(&cycle)
    };
    let pair2r = DihedralPair::new(relabel(&pair2.delta), relabel(&pair2.deltap));

    // Restrict product parameters to each factor's own edges.
    let restrict = |pair: &DihedralPair| -> (EdgeMap, EdgeMap) {
        let mut ra = EdgeMap::new();
        let mut rb = EdgeMap::new();
        for (x, y) in pair.delta.edges() {
            if let Some(&v) = a.get(&edge_key(x, y)) {
                ra.insert(edge_key(x, y), v);
            }
        }
        for (x, y) in pair.deltap.edges() {
            if let Some(&v) = b.get(&edge_key(x, y)) {
                rb.insert(edge_key(x, y), v);
            }
        }
        (ra, rb)
    };
    let (ra1, rb1) = restrict(pair1);
    let (a1, b1) = extend_params(pair1, &ra1, &rb1, t1)?;
    let (ra2, rb2) = restrict(&pair2r);
    let (a2, b2) = extend_params(&pair2r, &ra2, &rb2, t1)?;

    let build = |pair: &DihedralPair, am: &EdgeMap, bm: &EdgeMap| {
        f_z_edges(
            &pair.delta,
            |x, y| am[&edge_key(x, y)],
            &pair.deltap,
            |x, y| bm[&edge_key(x, y)],
        )
    };
    let f1 = build(pair1, &a1, &b1);
    let f2 = build(&pair2r, &a2, &b2);
    let falpha = build(&prod, a, b);

    // Triple normalisation: t1(1) -> 0, t1(2) -> 1, t1(3) -> infinity.
    let labels: Vec<u8> = prod.delta.labels().into_iter().collect();
    let mut state = 0x5eed_c0de_u64;
    let mut sign: Option<i8> = None;
    let mut tested = 0;
    let mut attempts = 0;
    while tested < points {
        attempts += 1;
        if attempts > 20 * points {
            return Err(PullbackError::IdentityFailed);
        }
        let mut values = BTreeMap::new();
        for &l in &labels {
            values.insert(l, random_rational(&mut state));
        }
        values.insert(t1[0], BigRational::zero());
        values.insert(t1[1], BigRational::one());
        let omit = t1[2];
        let (Some(v1), Some(v2), Some(va)) = (
            eval_omit(&f1, &values, omit),
            eval_omit(&f2, &values, omit),
            eval_omit(&falpha, &values, omit),
        ) else {
            continue;
        };
        let lhs = v1 * v2;
        if lhs.is_zero() || va.is_zero() {
            continue;
        }
        let ratio = lhs / va;
        let s = if ratio.is_one() {
            1
        } else if (-&ratio).is_one() {
            -1
        } else {
            return Err(PullbackError::IdentityFailed);
        };
        match sign {
            None => sign = Some(s),
            Some(prev) if prev != s => return Err(PullbackError::IdentityFailed),
            _ => {}
        }
        tested += 1;
    }
    Ok(sign.expect("at least one point tested"))
}

/// The identity with all parameters equal to `N`.
pub fn pullback_check_basic(
    pair1: &DihedralPair,
    pair2: &DihedralPair,
    t1: &Triple,
    t2: &Triple,
    n_power: i64,
    points: usize,
) -> Result<i8, PullbackError> {
    let prod = product(pair1, pair2, t1, t2)?;
    let mut a = EdgeMap::new();
    let mut b = EdgeMap::new();
    for (x, y) in prod.delta.edges() {
        a.insert(edge_key(x, y), n_power);
    }
    for (x, y) in prod.deltap.edges() {
        b.insert(edge_key(x, y), n_power);
    }
    pullback_check(pair1, pair2, t1, t2, &a, &b, points)
}

// ---------------------------------------------------------------------------
// Rhin-Viola change of variables for the n = 6 family.
// ---------------------------------------------------------------------------

/// Rhin-Viola exponents `(h, k, l, q, r, s)`; the seventh exponent is
/// `j = l + s - q`.
#[derive(Clone, Copy, Debug)]
pub struct Rv3Params {
    pub h: i64,
    pub k: i64,
    pub l: i64,
    pub q: i64,
    pub r: i64,
    pub s: i64,
}

impl Rv3Params {
    pub fn all_equal(n_power: i64) -> Self {
        Rv3Params { h: n_power, k: n_power, l: n_power, q: n_power, r: n_power, s: n_power }
    }

    fn j(&self) -> i64 {
        self.l + self.s - self.q
    }
}

fn cubical(factors: &[(Factor, i64)]) -> FactoredRational {
    FactoredRational::from_factors(Frame::Cubical, 1, factors.iter().copied())
}

/// The factor dictionary of the substitution
/// `(x', y', z') = (1-xy, (1-y)/(1-xy), z)`: each Rhin-Viola factor written
/// as a cubical factored rational in `(x, y, z)`, with its exponent as a
/// function of the parameters.
fn rv3_dictionary() -> Vec<(&'static str, FactoredRational, fn(&Rv3Params) -> i64)> {
    use Factor::{OneMinusXRange as OM, X};
    vec![
        ("x'", cubical(&[(OM(1, 2), 1)]), |p| p.h),
        ("1-x'", cubical(&[(X(1), 1), (X(2), 1)]), |p| p.l),
        ("y'", cubical(&[(OM(2, 2), 1), (OM(1, 2), -1)]), |p| p.k),
        ("1-y'", cubical(&[(X(2), 1), (OM(1, 1), 1), (OM(1, 2), -1)]), |p| p.s),
        ("z'", cubical(&[(X(3), 1)]), |p| p.j()),
        ("1-z'", cubical(&[(OM(3, 3), 1)]), |p| p.q),
        // 1 - (1-x'y') z' maps to 1 - yz; its exponent carries the extra -1
        // from the measure dx'dy'dz' / (1 - (1-x'y')z').
        ("Q", cubical(&[(OM(2, 3), 1)]), |p| -(p.q + p.h - p.r) - 1),
    ]
}

/// Verifies that the n = 6 generalised cellular integrand maps onto the
/// Rhin-Viola integrand under `(x,y,z) -> (1-xy, (1-y)/(1-xy), z)` with the
/// parameter renaming `(a1,a2,a3,a4,a6,b) = (l,s,k,q,r, r-q-h+s+k)`,
/// including the exact Jacobian (computed from the per-factor derivatives of
/// the dictionary images).
pub fn rv3_change_of_variables_check(params: &Rv3Params, points: usize) -> bool {
    use crate::forms::{general_integrand_cubical, solve_homogeneity};
    let sigma = crate::dihedral::Perm::new(vec![1, 4, 2, 6, 3, 5]).expect("rv3 sigma");
    let Rv3Params { h, k, l, q, r, s } = *params;
    let a = [l, s, k, q, l + s - q, r];
    let b = r - q - h + s + k;
    let Ok(pset) = solve_homogeneity(&sigma, &a, Some(((3, 6), b))) else {
        return false;
    };
    let lhs = general_integrand_cubical(&pset);

    let dict = rv3_dictionary();
    let mut state = 0xace5_u64;
    let mut checked = 0;
    let mut attempts = 0;
    while checked < points {
        attempts += 1;
        if attempts > 50 * points {
            return false;
        }
        let x: Vec<BigRational> = (0..3).map(|_| random_rational(&mut state)).collect();
        let Some(lhs_v) = lhs.eval(&x) else { continue };

        let mut rhs_v = BigRational::one();
        let mut bad = false;
        for (_, image, exp) in &dict {
            let e = exp(params);
            let iv = image.eval(&x).filter(|v| !v.is_zero());
            match iv {
                Some(v) => rhs_v *= pow_rational(&v, e),
                None => {
                    bad = true;
                    break;
                }
            }
        }
        if bad {
            continue;
        }

        // Jacobian of (x', y', z') with respect to (x, y, z) at the point,
        // via logarithmic derivatives of the image factors.
        let coords = ["x'", "y'", "z'"];
        let mut jac = vec![vec![BigRational::zero(); 3]; 3];
        for (row, name) in coords.iter().enumerate() {
            let (_, image, _) = dict.iter().find(|(n, _, _)| n == name).expect("coordinate");
            let img_v = image.eval(&x).expect("nonzero above");
            for (col, slot) in jac[row].iter_mut().enumerate() {
                let mut logd = BigRational::zero();
                for (f, &e) in image.factors() {
                    let fv = f.eval(&x);
                    let fd = f.deriv(col as u8 + 1, &x);
                    logd += BigRational::from(BigInt::from(e)) * fd / fv;
                }
                *slot = &img_v * &logd;
            }
        }
        let det = det3(&jac);
        if det.is_zero() {
            continue;
        }
        if lhs_v != rhs_v * det.abs() {
            return false;
        }
        checked += 1;
    }
    true
}

fn det3(m: &[Vec<BigRational>]) -> BigRational {
    let a = &m[0];
    let b = &m[1];
    let c = &m[2];
    &a[0] * (&b[1] * &c[2] - &b[2] * &c[1]) - &a[1] * (&b[0] * &c[2] - &b[2] * &c[0])
        + &a[2] * (&b[0] * &c[1] - &b[1] * &c[0])
}

/// Dictionary exponents at all parameters equal to `N`: literally the
/// Beukers integrand `(x(1-x)y(1-y)z(1-z))^N / (1-(1-xy)z)^{N+1}`.
pub fn rv3_beukers_exponents(n_power: i64) -> Vec<(String, i64)> {
    let p = Rv3Params::all_equal(n_power);
    rv3_dictionary()
        .iter()
        .map(|(name, _, exp)| (name.to_string(), exp(&p)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dihedral::DihedralStructure;

    fn pair(delta: &[u8], deltap: &[u8]) -> DihedralPair {
        DihedralPair::new(
            DihedralStructure::from_cycle(delta),
            DihedralStructure::from_cycle(deltap),
        )
    }

    fn worked_example() -> (DihedralPair, DihedralPair, Triple, Triple) {
        let p1 = pair(&[1, 2, 3, 4, 5], &[2, 4, 1, 3, 5]);
        let p2 = pair(&[11, 12, 13, 14, 15, 16], &[16, 12, 14, 11, 15, 13]);
        (p1, p2, [3, 4, 5], [14, 11, 15])
    }

    #[test]
    fn extension_of_all_equal_parameters_is_all_equal() {
        let (p1, _, t1, _) = worked_example();
        let mut a = EdgeMap::new();
        let mut b = EdgeMap::new();
        for (x, y) in p1.delta.edges() {
            if !(t1.contains(&x) && t1.contains(&y)) {
                a.insert(edge_key(x, y), 4);
            }
        }
        for (x, y) in p1.deltap.edges() {
            if !(t1.contains(&x) && t1.contains(&y)) {
                b.insert(edge_key(x, y), 4);
            }
        }
        let (fa, fb) = extend_params(&p1, &a, &b, &t1).unwrap();
        assert!(fa.values().all(|&v| v == 4));
        assert!(fb.values().all(|&v| v == 4));
        assert_eq!(fa.len(), 5);
        assert_eq!(fb.len(), 5);
    }

    #[test]
    fn pullback_identity_basic_parameters() {
        let (p1, p2, t1, t2) = worked_example();
        for n_pow in [0i64, 1, 4] {
            let sign = pullback_check_basic(&p1, &p2, &t1, &t2, n_pow, 20).unwrap();
            assert!(sign == 1 || sign == -1, "N={n_pow}");
        }
    }

    #[test]
    fn pullback_identity_random_homogeneous_parameters() {
        let (p1, p2, t1, t2) = worked_example();
        let prod = product(&p1, &p2, &t1, &t2).unwrap();
        // Random homogeneous parameters directly on the product pair: free a
        // on the alpha edges, b solved along the alpha' cycle.
        let mut state = 977u64;
        let mut done = 0;
        let mut tries = 0;
        while done < 3 {
            tries += 1;
            assert!(tries < 500, "no homogeneous sample found");
            let am: EdgeMap = prod
                .delta
                .edges()
                .map(|(x, y)| (edge_key(x, y), (splitmix(&mut state) % 7) as i64))
                .collect();
            let Some(bm) = solve_b_on_pair(&prod, &am, (splitmix(&mut state) % 5) as i64) else {
                continue;
            };
            let sign = pullback_check(&p1, &p2, &t1, &t2, &am, &bm, 20).unwrap();
            assert!(sign == 1 || sign == -1);
            done += 1;
        }
    }

    /// Solves the cyclic b-system on an arbitrary pair, seeding the first
    /// alpha'-edge; `None` when the closure condition fails.
    fn solve_b_on_pair(pair: &DihedralPair, am: &EdgeMap, seed: i64) -> Option<EdgeMap> {
        let w = pair.deltap.word();
        let n = w.len();
        let s: Vec<i64> = (0..n)
            .map(|j| {
                let v = w[j];
                let (d1, d2) = neighbours(&pair.delta, v);
                am[&edge_key(d1, v)] + am[&edge_key(v, d2)]
            })
            .collect();
        let mut b = vec![0i64; n];
        b[0] = seed;
        for j in 1..n {
            b[j] = s[j] - b[j - 1];
        }
        // Closure at j = 0.
        if b[n - 1] + b[0] != s[0] {
            return None;
        }
        Some((0..n).map(|j| (edge_key(w[j], w[(j + 1) % n]), b[j])).collect())
    }

    #[test]
    fn rv3_all_equal_is_beukers() {
        let exps = rv3_beukers_exponents(3);
        let lookup = |n: &str| exps.iter().find(|(m, _)| m == n).unwrap().1;
        for name in ["x'", "1-x'", "y'", "1-y'", "z'", "1-z'"] {
            assert_eq!(lookup(name), 3, "{name}");
        }
        assert_eq!(lookup("Q"), -4);
    }

    #[test]
    fn rv3_change_of_variables_basic_and_generic() {
        assert!(rv3_change_of_variables_check(&Rv3Params::all_equal(2), 8));
        assert!(rv3_change_of_variables_check(
            &Rv3Params { h: 1, k: 3, l: 2, q: 1, r: 2, s: 2 },
            8
        ));
    }
}

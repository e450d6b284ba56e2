//! Recurrence guessing: exact nullspace search for an annihilating operator
//! `sum_{i<=k} sum_{j<=d} c_ij n^j u_{n+i} = 0` over the rationals.
//!
//! Candidate orders and degrees are screened with a cheap nullity test over
//! two 62-bit prime fields before any exact elimination is attempted; the
//! exact step then runs on a trimmed system and every candidate is validated
//! against the full input, so the screening cannot produce a wrong answer,
//! only save time.

use super::{PolyRecurrence, QPoly, RationalSequence};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

const PRIMES: [u64; 2] = [(1 << 61) - 1, 2_305_843_009_213_693_907];

/// Finds a minimal recurrence of order at most `k_max` and coefficient degree
/// at most `d_max` annihilating all supplied terms; `None` if there is none.
///
/// Orders are tried in increasing `(k, d)` lexicographic order, so the result
/// is minimal in the order first, then in the degree. Ties inside one
/// nullspace are broken by smallest coefficient height.
pub fn discover(s: &RationalSequence, k_max: usize, d_max: usize) -> Option<PolyRecurrence> {
    // Residues of the terms for the prefilter; `None` when a denominator is
    // divisible by the prime (then the filter abstains).
    let residues: Vec<Option<Vec<u64>>> = PRIMES
        .iter()
        .map(|&p| {
            s.values()
                .iter()
                .map(|q| rational_mod(q, p))
                .collect::<Option<Vec<u64>>>()
        })
        .collect();

    for k in 1..=k_max {
        for d in 0..=d_max {
            let unknowns = (k + 1) * (d + 1);
            let rows = s.len().saturating_sub(k);
            if rows < unknowns + 2 {
                continue;
            }
            let maybe = residues.iter().zip(PRIMES).all(|(r, p)| match r {
                Some(vals) => modular_nullity(vals, s.n0(), k, d, p) > 0,
                None => true,
            });
            if !maybe {
                continue;
            }
            if let Some(rec) = try_order_degree(s, k, d) {
                return Some(rec);
            }
        }
    }
    None
}

fn rational_mod(q: &BigRational, p: u64) -> Option<u64> {
    let pn = BigInt::from(p);
    let num = ((q.numer() % &pn) + &pn) % &pn;
    let den = ((q.denom() % &pn) + &pn) % &pn;
    let den = den.to_u64()?;
    if den == 0 {
        return None;
    }
    let num = num.to_u64()?;
    Some(mulmod(num, modinv(den, p)?, p))
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn modinv(a: u64, p: u64) -> Option<u64> {
    // p is prime: a^(p-2) mod p.
    if a == 0 {
        return None;
    }
    let mut base = a % p;
    let mut exp = p - 2;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, p);
        }
        base = mulmod(base, base, p);
        exp >>= 1;
    }
    Some(acc)
}

/// Nullity of the guessing matrix over F_p.
fn modular_nullity(vals: &[u64], n0: i64, k: usize, d: usize, p: u64) -> usize {
    let unknowns = (k + 1) * (d + 1);
    let rows = vals.len() - k;
    let mut mat: Vec<Vec<u64>> = Vec::with_capacity(rows);
    for idx in 0..rows {
        let n = n0 + idx as i64;
        let nmod = (n.rem_euclid(p as i64)) as u64;
        let mut row = Vec::with_capacity(unknowns);
        for i in 0..=k {
            let mut npow = 1u64;
            for _ in 0..=d {
                row.push(mulmod(npow, vals[idx + i], p));
                npow = mulmod(npow, nmod, p);
            }
        }
        mat.push(row);
    }
    let mut rank = 0usize;
    let mut r = 0usize;
    for c in 0..unknowns {
        let Some(pivot) = (r..rows).find(|&i| mat[i][c] != 0) else { continue };
        mat.swap(r, pivot);
        let inv = modinv(mat[r][c], p).expect("pivot nonzero");
        for v in mat[r][c..].iter_mut() {
            *v = mulmod(*v, inv, p);
        }
        for i in 0..rows {
            if i != r && mat[i][c] != 0 {
                let f = mat[i][c];
                for j in c..unknowns {
                    let sub = mulmod(f, mat[r][j], p);
                    mat[i][j] = (mat[i][j] + p - sub) % p;
                }
            }
        }
        rank += 1;
        r += 1;
        if r == rows {
            break;
        }
    }
    unknowns - rank
}

fn try_order_degree(s: &RationalSequence, k: usize, d: usize) -> Option<PolyRecurrence> {
    let unknowns = (k + 1) * (d + 1);
    // A trimmed window keeps the exact elimination small; bogus solutions of
    // the subsystem die in the validation below.
    let rows = (s.len() - k).min(unknowns + 6);
    let mut mat: Vec<Vec<BigRational>> = Vec::with_capacity(rows);
    for idx in 0..rows {
        let n = s.n0() + idx as i64;
        let mut row = Vec::with_capacity(unknowns);
        let nq = BigRational::from(BigInt::from(n));
        for i in 0..=k {
            let mut npow = BigRational::one();
            for _ in 0..=d {
                row.push(&npow * s.at(n + i as i64));
                npow *= &nq;
            }
        }
        mat.push(row);
    }

    let basis = nullspace(&mut mat, unknowns);
    let mut best: Option<(usize, BigInt, PolyRecurrence)> = None;
    for v in basis {
        let Some(rec) = vector_to_recurrence(&v, k, d, s.n0()) else { continue };
        if !rec.annihilates(s) {
            continue;
        }
        let norm = rec.normalized();
        let max_deg = norm.coeffs().iter().filter_map(|p| p.degree()).max().unwrap_or(0);
        let height = norm
            .coeffs()
            .iter()
            .flat_map(|p| p.coeffs())
            .map(|c| c.numer().abs())
            .max()
            .unwrap_or_else(BigInt::one);
        let better = match &best {
            None => true,
            Some((bd, bh, _)) => (max_deg, &height) < (*bd, bh),
        };
        if better {
            best = Some((max_deg, height, norm));
        }
    }
    best.map(|(_, _, rec)| rec)
}

fn vector_to_recurrence(v: &[BigRational], k: usize, d: usize, n0: i64) -> Option<PolyRecurrence> {
    let coeffs: Vec<QPoly> = (0..=k)
        .map(|i| QPoly::new(v[i * (d + 1)..(i + 1) * (d + 1)].to_vec()))
        .collect();
    if coeffs.last().unwrap().is_zero() {
        return None;
    }
    Some(PolyRecurrence::new(coeffs, n0))
}

/// Reduced row echelon form nullspace basis.
fn nullspace(mat: &mut [Vec<BigRational>], cols: usize) -> Vec<Vec<BigRational>> {
    let rows = mat.len();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !mat[i][c].is_zero()) else { continue };
        mat.swap(r, p);
        let inv = mat[r][c].recip();
        for v in mat[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows {
            if i != r && !mat[i][c].is_zero() {
                let f = mat[i][c].clone();
                for j in 0..cols {
                    let delta = &f * &mat[r][j];
                    mat[i][j] -= delta;
                }
            }
        }
        pivot_of_col[c] = Some(r);
        r += 1;
        if r == rows {
            break;
        }
    }
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut v = vec![BigRational::zero(); cols];
        v[free] = BigRational::one();
        for c in 0..cols {
            if let Some(pr) = pivot_of_col[c] {
                v[c] = -mat[pr][free].clone();
            }
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn roundtrip_apery_zeta2() {
        let r = PolyRecurrence::apery_zeta2();
        let s = r.extend_i64(&[1, 3], 20).unwrap();
        let found = discover(&s, 2, 2).unwrap();
        assert_eq!(found.normalized(), r.normalized());
    }

    #[test]
    fn roundtrip_apery_zeta3() {
        let r = PolyRecurrence::apery_zeta3();
        let s = r.extend_i64(&[1, 5], 24).unwrap();
        let found = discover(&s, 2, 3).unwrap();
        assert_eq!(found.normalized(), r.normalized());
    }

    #[test]
    fn hadamard_product_of_apery_sequences() {
        // The termwise product of the two Apery a-sequences satisfies a
        // higher-order recurrence; its extension must match direct
        // multiplication for 50 further terms.
        let a2 = PolyRecurrence::apery_zeta2().extend_i64(&[1, 3], 140).unwrap();
        let a3 = PolyRecurrence::apery_zeta3().extend_i64(&[1, 5], 140).unwrap();
        let prod = a2.hadamard(&a3);
        let window = RationalSequence::new(0, prod.values()[..80].to_vec());
        let rec = discover(&window, 4, 12).expect("product is holonomic");
        let k = rec.order();
        let init: Vec<_> = prod.values()[..k].to_vec();
        let extended = rec.extend(&init, 130).expect("leading coefficient stays nonzero");
        for n in 0..=130i64 {
            assert_eq!(extended.at(n), prod.at(n), "term {n}");
        }
    }

    #[test]
    fn factorial_needs_degree_one() {
        let fact: Vec<BigInt> = {
            let mut v = vec![BigInt::from(1)];
            for n in 1..=12 {
                let last = v.last().unwrap().clone();
                v.push(last * BigInt::from(n));
            }
            v
        };
        let s = RationalSequence::new(
            0,
            fact.iter().map(|v| BigRational::from(v.clone())).collect(),
        );
        assert!(discover(&s, 1, 0).is_none());
        let rec = discover(&s, 1, 1).unwrap();
        assert!(rec.annihilates(&s));
    }

    #[test]
    fn no_false_positive_on_random_data() {
        let mut state = 0xfeedu64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state % 1000) as i64
        };
        let vals: Vec<BigRational> =
            (0..40).map(|_| BigRational::from(BigInt::from(next()))).collect();
        let s = RationalSequence::new(0, vals);
        assert!(discover(&s, 3, 3).is_none());
    }

    #[test]
    fn modular_filter_consistency() {
        // The filter must keep every (k, d) admitting a true solution.
        let r = PolyRecurrence::apery_zeta2();
        let s = r.extend_i64(&[1, 3], 25).unwrap();
        let vals: Vec<u64> = s
            .values()
            .iter()
            .map(|q| rational_mod(q, PRIMES[0]).unwrap())
            .collect();
        assert!(modular_nullity(&vals, 0, 2, 2, PRIMES[0]) > 0);
        assert_eq!(modular_nullity(&vals, 0, 1, 0, PRIMES[0]), 0);
    }
}

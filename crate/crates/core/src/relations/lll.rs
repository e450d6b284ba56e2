//! Lattice basis reduction (LLL) with exact rational Gram-Schmidt, for the
//! small dense lattices that integer-relation detection produces.

use rug::{Integer, Rational};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LllError {
    #[error("input basis is rank-deficient")]
    RankDeficient,
    #[error("empty basis")]
    Empty,
}

/// LLL reduction with delta = 3/4. Deterministic; returns the reduced basis
/// rows in order. The input rows must be linearly independent.
pub fn lattice_reduce(basis: &[Vec<Integer>]) -> Result<Vec<Vec<Integer>>, LllError> {
    if basis.is_empty() {
        return Err(LllError::Empty);
    }
    let n = basis.len();
    let m = basis[0].len();
    assert!(basis.iter().all(|r| r.len() == m), "ragged basis");
    let mut b: Vec<Vec<Integer>> = basis.to_vec();

    let delta = Rational::from((3u32, 4u32));
    let half = Rational::from((1u32, 2u32));

    // Exact Gram-Schmidt data: mu[i][j] for j < i, and the squared norms of
    // the orthogonalised vectors.
    let mut mu = vec![vec![Rational::new(); n]; n];
    let mut bstar_sq = vec![Rational::new(); n];

    let recompute = |b: &Vec<Vec<Integer>>,
                     mu: &mut Vec<Vec<Rational>>,
                     bstar_sq: &mut Vec<Rational>|
     -> Result<(), LllError> {
        // b*_i = b_i - sum_{j<i} mu_ij b*_j; all inner products kept exact
        // through the Gram matrix.
        let mut bstar: Vec<Vec<Rational>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut cur: Vec<Rational> = b[i].iter().map(Rational::from).collect();
            for j in 0..i {
                // mu_ij = <b_i, b*_j> / <b*_j, b*_j>
                let mut dot = Rational::new();
                for (x, y) in b[i].iter().zip(&bstar[j]) {
                    dot += Rational::from(y * x);
                }
                let m_ij = Rational::from(&dot / &bstar_sq[j]);
                for (c, y) in cur.iter_mut().zip(&bstar[j]) {
                    *c -= Rational::from(&m_ij * y);
                }
                mu[i][j] = m_ij;
            }
            let mut norm = Rational::new();
            for c in &cur {
                norm += Rational::from(c * c);
            }
            if norm == 0 {
                return Err(LllError::RankDeficient);
            }
            bstar_sq[i] = norm;
            bstar.push(cur);
        }
        Ok(())
    };

    recompute(&b, &mut mu, &mut bstar_sq)?;

    let mut k = 1usize;
    let mut guard = 0usize;
    let guard_max = 10_000 + 100 * n * n * m;
    while k < n {
        guard += 1;
        assert!(guard < guard_max, "LLL failed to terminate");
        // Size reduction.
        for j in (0..k).rev() {
            let mut q = mu[k][j].clone();
            q.abs_mut();
            if q > half {
                let r = nearest_integer(&mu[k][j]);
                for idx in 0..m {
                    let d = Integer::from(&r * &b[j][idx]);
                    b[k][idx] -= d;
                }
                recompute(&b, &mut mu, &mut bstar_sq)?;
            }
        }
        // Lovasz condition.
        let lhs = bstar_sq[k].clone();
        let mu2 = Rational::from(&mu[k][k - 1] * &mu[k][k - 1]);
        let rhs = (Rational::from(&delta - &mu2)) * &bstar_sq[k - 1];
        if lhs >= rhs {
            k += 1;
        } else {
            b.swap(k, k - 1);
            recompute(&b, &mut mu, &mut bstar_sq)?;
            k = k.max(2) - 1;
        }
    }
    Ok(b)
}

fn nearest_integer(q: &Rational) -> Integer {
    let (num, den) = (q.numer(), q.denom());
    let twice = Integer::from(num * 2u32);
    let (quot, _) = twice.div_rem_round(Integer::from(den * 2u32));
    quot
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> Vec<Vec<Integer>> {
        rows.iter().map(|r| r.iter().map(|&v| Integer::from(v)).collect()).collect()
    }

    fn norm_sq(v: &[Integer]) -> Integer {
        let mut acc = Integer::new();
        for x in v {
            acc += Integer::from(x * x);
        }
        acc
    }

    #[test]
    fn identity_is_fixed() {
        let id = mat(&[&[1, 0], &[0, 1]]);
        let r = lattice_reduce(&id).unwrap();
        assert_eq!(r, id);
    }

    #[test]
    fn recovers_scaled_relation() {
        // Rows (1, 0, M) and (0, 1, M') with a hidden small relation:
        // 2 * 500000.5... classic: [[1,0,1000001],[0,1,2000001]] has
        // short vector (2,-1, 1) = 2 r1 - r2.
        let b = mat(&[&[1, 0, 1000001], &[0, 1, 2000001]]);
        let r = lattice_reduce(&b).unwrap();
        let shortest = r.iter().min_by_key(|v| norm_sq(v)).unwrap();
        assert_eq!(norm_sq(shortest), Integer::from(6));
        let third = Integer::from(shortest[2].abs_ref());
        assert_eq!(third, Integer::from(1));
    }

    #[test]
    fn unimodular_scramble_preserves_shortest_length() {
        let b = mat(&[&[4, 1, 0], &[1, 5, 1], &[0, 1, 6]]);
        // Scramble by a unimodular transform.
        let u = mat(&[&[1, 2, 0], &[0, 1, 3], &[0, 0, 1]]);
        let scrambled: Vec<Vec<Integer>> = (0..3)
            .map(|i| {
                (0..3)
                    .map(|c| {
                        let mut acc = Integer::new();
                        for k in 0..3 {
                            acc += Integer::from(&u[i][k] * &b[k][c]);
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        let r1 = lattice_reduce(&b).unwrap();
        let r2 = lattice_reduce(&scrambled).unwrap();
        let s1 = r1.iter().map(norm_sq_slice).min().unwrap();
        let s2 = r2.iter().map(norm_sq_slice).min().unwrap();
        // Brute-force shortest vector over small coefficients for reference.
        let mut brute = None::<Integer>;
        for a in -6i64..=6 {
            for c in -6i64..=6 {
                for d in -6i64..=6 {
                    if (a, c, d) == (0, 0, 0) {
                        continue;
                    }
                    let v: Vec<Integer> = (0..3)
                        .map(|idx| {
                            Integer::from(a) * &b[0][idx]
                                + Integer::from(c) * &b[1][idx]
                                + Integer::from(d) * &b[2][idx]
                        })
                        .collect();
                    let ns = norm_sq(&v);
                    if brute.as_ref().is_none_or(|bv| ns < *bv) {
                        brute = Some(ns);
                    }
                }
            }
        }
        let brute = brute.unwrap();
        assert_eq!(s1, brute);
        assert_eq!(s2, brute);
    }

    fn norm_sq_slice(v: &Vec<Integer>) -> Integer {
        norm_sq(v)
    }

    #[test]
    fn rank_deficient_detected() {
        let b = mat(&[&[1, 2], &[2, 4]]);
        assert_eq!(lattice_reduce(&b).unwrap_err(), LllError::RankDeficient);
    }
}

//! Multiplication of pairs of dihedral structures along a shared triple.

use super::{canonical_config, ConfigClass, DihedralStructure, Perm};
use std::collections::BTreeSet;
use thiserror::Error;

/// An injective map `{1,2,3} -> S`, written as the image tuple.
pub type Triple = [u8; 3];

/// An ordered pair of dihedral structures on a common label set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DihedralPair {
    pub delta: DihedralStructure,
    pub deltap: DihedralStructure,
}

impl DihedralPair {
    pub fn new(delta: DihedralStructure, deltap: DihedralStructure) -> Self {
        assert_eq!(delta.labels(), deltap.labels(), "structures must share labels");
        DihedralPair { delta, deltap }
    }

    /// The pair `(delta0, sigma delta0)` on `{1..n}`.
    pub fn from_perm(sigma: &Perm) -> Self {
        DihedralPair {
            delta: DihedralStructure::standard(sigma.n()),
            deltap: DihedralStructure::from_perm(sigma),
        }
    }

    pub fn dual(&self) -> DihedralPair {
        DihedralPair {
            delta: self.deltap.clone(),
            deltap: self.delta.clone(),
        }
    }

    /// The configuration class: relabel so that `delta` becomes the standard
    /// order and read `deltap` as a permutation word.
    pub fn config_class(&self) -> ConfigClass {
        let word = self.delta.word();
        let mut rank = [0u8; 256];
        for (i, &l) in word.iter().enumerate() {
            rank[l as usize] = (i + 1) as u8;
        }
        let relabelled: Vec<u8> = self.deltap.word().iter().map(|&l| rank[l as usize]).collect();
        let p = Perm::new(relabelled).expect("relabelling is a bijection");
        canonical_config(&p).expect("n >= 3")
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProductError {
    #[error("triple {0:?} is not injective or uses labels outside the structure")]
    BadTriple(Triple),
    #[error("left pair is not multipliable along {0:?}")]
    LeftNotMultipliable(Triple),
    #[error("dual of right pair is not multipliable along {0:?}")]
    RightDualNotMultipliable(Triple),
    #[error("non-triple labels of the factors overlap: {0:?}")]
    LabelClash(Vec<u8>),
}

fn check_triple(pair: &DihedralPair, t: &Triple) -> Result<(), ProductError> {
    let set: BTreeSet<u8> = t.iter().copied().collect();
    if set.len() != 3 || !t.iter().all(|&l| pair.delta.contains(l)) {
        return Err(ProductError::BadTriple(*t));
    }
    Ok(())
}

/// Positions such that `word[i], word[i+dir], word[i+2 dir]` equals the triple
/// for one of the two orientations, if any.
fn find_in_order(d: &DihedralStructure, t: &Triple) -> Option<(usize, isize)> {
    let n = d.n();
    let w = d.word();
    for i in 0..n {
        for dir in [1isize, -1] {
            let at = |k: isize| w[(i as isize + dir * k).rem_euclid(n as isize) as usize];
            if at(0) == t[0] && at(1) == t[1] && at(2) == t[2] {
                return Some((i, dir));
            }
        }
    }
    None
}

fn adjacent(d: &DihedralStructure, a: u8, b: u8) -> bool {
    d.edges().any(|(x, y)| (x, y) == (a, b) || (x, y) == (b, a))
}

/// Multipliability of `(delta, delta')` along the triple `t`: `t(1), t(2),
/// t(3)` consecutive in that order for `delta`, and `t(1), t(3)` consecutive
/// for `delta'`. Invariant under reversing the triple.
pub fn is_multipliable(pair: &DihedralPair, t: &Triple) -> bool {
    check_triple(pair, t).is_ok()
        && find_in_order(&pair.delta, t).is_some()
        && adjacent(&pair.deltap, t[0], t[2])
}

/// Walks `guest` from `t[0]` to `t[2]` the long way round (not crossing the
/// `t[0]-t[2]` edge) and splits the interior at `t[1]`; returns the two
/// segments between `t[0]..t[1]` and `t[1]..t[2]`.
fn guest_segments(guest: &DihedralStructure, t: &Triple) -> (Vec<u8>, Vec<u8>) {
    let n = guest.n();
    let w = guest.word();
    let pos0 = w.iter().position(|&l| l == t[0]).expect("t0 present");
    // Choose the direction whose first step is not t[2].
    let step = |dir: isize, k: usize| w[(pos0 as isize + dir * k as isize).rem_euclid(n as isize) as usize];
    let dir = if step(1, 1) != t[2] { 1 } else { -1 };
    let mut seg_a = Vec::new();
    let mut seg_b = Vec::new();
    let mut past_mid = false;
    for k in 1..n {
        let l = step(dir, k);
        if l == t[1] {
            past_mid = true;
            continue;
        }
        if l == t[2] {
            break;
        }
        if past_mid {
            seg_b.push(l);
        } else {
            seg_a.push(l);
        }
    }
    (seg_a, seg_b)
}

/// Splices guest segments into the host at the triple: the host is oriented so
/// the triple reads in order, and the segments land on the two triple edges.
fn shuffle(host: &DihedralStructure, guest: &DihedralStructure, t: &Triple) -> DihedralStructure {
    let (start, dir) = find_in_order(host, t).expect("host carries the triple in order");
    let n = host.n();
    let w = host.word();
    let (seg_a, seg_b) = guest_segments(guest, t);
    let mut cycle = Vec::with_capacity(n + seg_a.len() + seg_b.len());
    for k in 0..n {
        let l = w[(start as isize + dir * k as isize).rem_euclid(n as isize) as usize];
        cycle.push(l);
        if k == 0 {
            cycle.extend_from_slice(&seg_a);
        } else if k == 1 {
            cycle.extend_from_slice(&seg_b);
        }
    }
    DihedralStructure::from_cycle(&cycle)
}

/// The product of two pairs of dihedral structures along triples `t1`, `t2`.
///
/// `pair1` must be multipliable along `t1` and the dual of `pair2` along
/// `t2`. Labels of `pair2` at the triple are renamed to those of `pair1`; the
/// remaining labels of the two factors must be disjoint. The result is the
/// unique pair `(alpha, alpha')` on `S1 ∪ S2` restricting to the factors.
pub fn product(
    pair1: &DihedralPair,
    pair2: &DihedralPair,
    t1: &Triple,
    t2: &Triple,
) -> Result<DihedralPair, ProductError> {
    check_triple(pair1, t1)?;
    check_triple(pair2, t2)?;
    if !is_multipliable(pair1, t1) {
        return Err(ProductError::LeftNotMultipliable(*t1));
    }
    if !is_multipliable(&pair2.dual(), t2) {
        return Err(ProductError::RightDualNotMultipliable(*t2));
    }

    let mut rename = [0u8; 256];
    for l in 0..256 {
        rename[l] = l as u8;
    }
    for k in 0..3 {
        rename[t2[k] as usize] = t1[k];
    }
    let relabel = |d: &DihedralStructure| {
        let cycle: Vec<u8> = d.word().iter().map(|&l| rename[l as usize]).collect();
        DihedralStructure::from_cycle(&cycle)
    };
    let delta2 = relabel(&pair2.delta);
    let delta2p = relabel(&pair2.deltap);

    let t1set: BTreeSet<u8> = t1.iter().copied().collect();
    let s1: BTreeSet<u8> = pair1.delta.labels().difference(&t1set).copied().collect();
    let s2: BTreeSet<u8> = delta2.labels().difference(&t1set).copied().collect();
    let clash: Vec<u8> = s1.intersection(&s2).copied().collect();
    if !clash.is_empty() {
        return Err(ProductError::LabelClash(clash));
    }

    // alpha restricts to delta1 and delta2; alpha' to delta1' and delta2'.
    // The triple is in order in delta1 (host) and in delta2' (host).
    let alpha = shuffle(&pair1.delta, &delta2, t1);
    let alphap = shuffle(&delta2p, &pair1.deltap, t1);
    Ok(DihedralPair::new(alpha, alphap))
}

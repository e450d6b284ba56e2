//! Dihedral structures, configurations and the boundary-divisor calculus.
//!
//! Conventions: marked points are labelled `1..=n`, `delta0` is the standard
//! cyclic order, and a configuration is the double-dihedral class of a pair
//! `(delta0, sigma delta0)` encoded by the permutation word
//! `(sigma(1), ..., sigma(n))`.

mod enumerate;
mod product;

pub use enumerate::enumerate_convergent;
pub use product::{is_multipliable, product, DihedralPair, ProductError, Triple};

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

/// Largest `n` the packed word representation supports.
pub const MAX_N: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DihedralError {
    #[error("need at least {min} marked points, got {got}")]
    TooSmall { min: usize, got: usize },
    #[error("word of length {0} exceeds the supported maximum of 16")]
    TooLarge(usize),
    #[error("word is not a permutation of 1..={0}")]
    NotAPermutation(usize),
    #[error("block size {size} invalid for a stable partition of {n} points")]
    UnstableBlock { n: usize, size: usize },
}

/// A permutation of `{1..n}`, stored as the word `(sigma(1), ..., sigma(n))`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Perm {
    word: Vec<u8>,
}

impl Perm {
    pub fn new(word: Vec<u8>) -> Result<Self, DihedralError> {
        let n = word.len();
        if n < 3 {
            return Err(DihedralError::TooSmall { min: 3, got: n });
        }
        if n > MAX_N {
            return Err(DihedralError::TooLarge(n));
        }
        let mut seen = 0u32;
        for &v in &word {
            if v == 0 || v as usize > n || seen & (1 << (v - 1)) != 0 {
                return Err(DihedralError::NotAPermutation(n));
            }
            seen |= 1 << (v - 1);
        }
        Ok(Perm { word })
    }

    /// The identity permutation `(1, ..., n)`.
    pub fn identity(n: usize) -> Self {
        Perm::new((1..=n as u8).collect()).expect("identity word")
    }

    pub fn n(&self) -> usize {
        self.word.len()
    }

    /// `ell = n - 3`, the dimension of the moduli space.
    pub fn ell(&self) -> usize {
        self.n() - 3
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    /// `sigma(i)` with `i` taken cyclically in `1..=n`.
    pub fn image(&self, i: usize) -> u8 {
        let n = self.n();
        self.word[(i - 1).rem_euclid(n) % n]
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u8; self.n()];
        for (i, &v) in self.word.iter().enumerate() {
            inv[v as usize - 1] = (i + 1) as u8;
        }
        Perm { word: inv }
    }

    /// Packs the word into a `u64`, four bits per letter, word order preserved
    /// so that `u64` comparison agrees with lexicographic comparison.
    pub fn packed(&self) -> u64 {
        pack_word(&self.word)
    }

    pub fn parse(s: &str) -> Result<Self, DihedralError> {
        let word: Vec<u8> = s
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<u8>().map_err(|_| DihedralError::NotAPermutation(0)))
            .collect::<Result<_, _>>()?;
        let n = word.len();
        Perm::new(word).map_err(|e| match e {
            DihedralError::NotAPermutation(_) => DihedralError::NotAPermutation(n),
            other => other,
        })
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.word)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.word.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

pub(crate) fn pack_word(word: &[u8]) -> u64 {
    debug_assert!(word.len() <= MAX_N);
    let mut acc = 0u64;
    for &v in word {
        acc = (acc << 4) | (v as u64 - 1);
    }
    acc
}

pub(crate) fn unpack_word(mut packed: u64, n: usize) -> Vec<u8> {
    let mut word = vec![0u8; n];
    for i in (0..n).rev() {
        word[i] = (packed & 0xf) as u8 + 1;
        packed >>= 4;
    }
    word
}

/// A cyclic order on a label set considered up to rotation and reflection.
///
/// The stored word is the lexicographically least of the `2n` dihedral images,
/// so equality of structures is equality of words. Labels are arbitrary
/// distinct `u8`s; for structures on `{1..n}` the standard order canonicalises
/// to `(1, 2, ..., n)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DihedralStructure {
    word: Vec<u8>,
}

impl DihedralStructure {
    pub fn from_cycle(cycle: &[u8]) -> Self {
        let mut best: Option<Vec<u8>> = None;
        let n = cycle.len();
        assert!(n >= 1, "empty cycle");
        let mut candidate = vec![0u8; n];
        for rev in [false, true] {
            for start in 0..n {
                for (k, slot) in candidate.iter_mut().enumerate() {
                    let idx = if rev {
                        (start + n - k % n) % n
                    } else {
                        (start + k) % n
                    };
                    *slot = cycle[idx];
                }
                if best.as_ref().is_none_or(|b| candidate < *b) {
                    best = Some(candidate.clone());
                }
            }
        }
        DihedralStructure { word: best.unwrap() }
    }

    /// The standard dihedral order `1 < 2 < ... < n < 1`.
    pub fn standard(n: usize) -> Self {
        DihedralStructure {
            word: (1..=n as u8).collect(),
        }
    }

    /// `sigma delta0` for a permutation `sigma`: the cyclic order given by the
    /// word of `sigma`.
    pub fn from_perm(p: &Perm) -> Self {
        DihedralStructure::from_cycle(p.word())
    }

    pub fn n(&self) -> usize {
        self.word.len()
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    pub fn labels(&self) -> BTreeSet<u8> {
        self.word.iter().copied().collect()
    }

    pub fn contains(&self, label: u8) -> bool {
        self.word.contains(&label)
    }

    /// Cyclic edges `{w_i, w_{i+1}}` of the structure.
    pub fn edges(&self) -> impl Iterator<Item = (u8, u8)> + '_ {
        let n = self.n();
        (0..n).map(move |i| (self.word[i], self.word[(i + 1) % n]))
    }

    /// Restriction to a subset of the labels (cyclic order preserved).
    pub fn restrict(&self, keep: &BTreeSet<u8>) -> DihedralStructure {
        let sub: Vec<u8> = self.word.iter().copied().filter(|l| keep.contains(l)).collect();
        DihedralStructure::from_cycle(&sub)
    }

    /// Whether the labels of `block` sit consecutively in this cyclic order.
    pub fn is_consecutive(&self, block: &BTreeSet<u8>) -> bool {
        let k = block.len();
        if k == 0 || k == self.n() {
            return true;
        }
        let n = self.n();
        let mut transitions = 0;
        for i in 0..n {
            let a = block.contains(&self.word[i]);
            let b = block.contains(&self.word[(i + 1) % n]);
            if a != b {
                transitions += 1;
            }
        }
        transitions == 2
    }
}

impl fmt::Debug for DihedralStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dihedral{:?}", self.word)
    }
}

/// A half-integer stored exactly as twice its value.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct HalfInt(pub i64);

impl HalfInt {
    pub fn from_int(v: i64) -> Self {
        HalfInt(2 * v)
    }

    pub fn doubled(self) -> i64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// The integer value; panics if the half-integer is not integral.
    pub fn as_integer(self) -> i64 {
        assert!(self.is_integer(), "half-integer {self:?} is not integral");
        self.0 / 2
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }
}

impl std::ops::Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl std::ops::Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl std::iter::Sum for HalfInt {
    fn sum<I: Iterator<Item = HalfInt>>(iter: I) -> HalfInt {
        HalfInt(iter.map(|h| h.0).sum())
    }
}

impl fmt::Debug for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A 2-block partition of `{1..n}` with both blocks of size at least two,
/// naming the boundary divisor `D_{S1|S2}`.
///
/// The stored block is the one containing the label `1` (the lexicographically
/// smaller of the two blocks), so the representation is complement-invariant.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StablePartition {
    n: u8,
    mask: u32,
}

impl StablePartition {
    /// Builds the partition from either block, given as a bitmask with bit
    /// `i - 1` for label `i`.
    pub fn new(n: usize, mask: u32) -> Result<Self, DihedralError> {
        if n < 4 {
            return Err(DihedralError::TooSmall { min: 4, got: n });
        }
        if n > MAX_N {
            return Err(DihedralError::TooLarge(n));
        }
        let full = (1u32 << n) - 1;
        let mask = mask & full;
        let size = mask.count_ones() as usize;
        if size < 2 || size > n - 2 {
            return Err(DihedralError::UnstableBlock { n, size });
        }
        let canonical = if mask & 1 != 0 { mask } else { full ^ mask };
        Ok(StablePartition { n: n as u8, mask: canonical })
    }

    pub fn from_block(n: usize, block: &[u8]) -> Result<Self, DihedralError> {
        let mut mask = 0u32;
        for &v in block {
            assert!(v >= 1 && v as usize <= n, "label {v} out of range");
            mask |= 1 << (v - 1);
        }
        StablePartition::new(n, mask)
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    /// The block containing label `1`, as a bitmask.
    pub fn block_mask(&self) -> u32 {
        self.mask
    }

    pub fn complement_mask(&self) -> u32 {
        ((1u32 << self.n) - 1) ^ self.mask
    }

    pub fn block(&self) -> Vec<u8> {
        mask_to_labels(self.mask)
    }

    pub fn complement(&self) -> Vec<u8> {
        mask_to_labels(self.complement_mask())
    }

    pub fn contains(&self, label: u8) -> bool {
        self.mask & (1 << (label - 1)) != 0
    }

    /// All stable partitions of `{1..n}`; there are `2^(n-1) - n - 1` of them.
    pub fn all(n: usize) -> Vec<StablePartition> {
        assert!((4..=MAX_N).contains(&n), "n out of range");
        let mut out = Vec::new();
        // Only masks containing label 1, so each partition appears once.
        for mask in (1u32..1 << n).step_by(2) {
            let size = mask.count_ones() as usize;
            if (2..=n - 2).contains(&size) {
                out.push(StablePartition { n: n as u8, mask });
            }
        }
        out
    }

    /// Whether both blocks are consecutive with respect to `d`.
    pub fn at_finite_distance(&self, d: &DihedralStructure) -> bool {
        debug_assert_eq!(self.n(), d.n());
        let mut transitions = 0;
        let n = self.n();
        for i in 0..n {
            let a = self.contains(d.word()[i]);
            let b = self.contains(d.word()[(i + 1) % n]);
            if a != b {
                transitions += 1;
            }
        }
        transitions == 2
    }
}

impl fmt::Debug for StablePartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fmt_side = |side: Vec<u8>| {
            side.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("")
        };
        write!(f, "D[{}|{}]", fmt_side(self.block()), fmt_side(self.complement()))
    }
}

impl fmt::Display for StablePartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

fn mask_to_labels(mask: u32) -> Vec<u8> {
    (0..32).filter(|i| mask & (1 << i) != 0).map(|i| i as u8 + 1).collect()
}

/// The divisors at finite distance with respect to `d`: blocks consecutive in
/// the cyclic order. There are exactly `n(n-3)/2` of them.
pub fn finite_distance_divisors(d: &DihedralStructure) -> Result<Vec<StablePartition>, DihedralError> {
    let n = d.n();
    if n < 4 {
        return Err(DihedralError::TooSmall { min: 4, got: n });
    }
    let mut set = BTreeSet::new();
    for start in 0..n {
        let mut mask = 0u32;
        for k in 0..n - 2 {
            mask |= 1 << (d.word()[(start + k) % n] - 1);
            if k >= 1 {
                set.insert(StablePartition::new(n, mask)?);
            }
        }
    }
    Ok(set.into_iter().collect())
}

/// Number of stable partitions not consecutive for the standard order,
/// i.e. divisors at infinite distance from `delta0`. Computed by enumeration;
/// equals `2^(n-1) - n(n-1)/2 - 1`.
pub fn infinite_divisor_count(n: usize) -> usize {
    let delta0 = DihedralStructure::standard(n);
    StablePartition::all(n)
        .iter()
        .filter(|d| !d.at_finite_distance(&delta0))
        .count()
}

/// The indicator `I_D(i, j) = (1/2) (I({i,j} in S1) + I({i,j} in S2))`.
pub fn indicator(d: &StablePartition, i: u8, j: u8) -> HalfInt {
    assert_ne!(i, j, "indicator needs distinct labels");
    let both_in = d.contains(i) && d.contains(j);
    let both_out = !d.contains(i) && !d.contains(j);
    HalfInt(both_in as i64 + both_out as i64)
}

/// The edge sum `I_D(sigma) = sum_i I_D({sigma(i), sigma(i+1)})`, a
/// half-integer bounded by `n/2 - 1` with equality iff `D` is at finite
/// distance from `sigma`.
pub fn indicator_sum(d: &StablePartition, sigma: &DihedralStructure) -> HalfInt {
    sigma.edges().map(|(a, b)| indicator(d, a, b)).sum()
}

/// Order of vanishing of `f_{delta/delta'}` along `D`.
pub fn ord_f(delta: &DihedralStructure, deltap: &DihedralStructure, d: &StablePartition) -> HalfInt {
    let v = indicator_sum(d, delta) - indicator_sum(d, deltap);
    debug_assert!(v.is_integer(), "ord of a rational function must be integral");
    v
}

/// Order of vanishing of the cellular form `omega_sigma` along `D`:
/// `(ell - 1)/2 - I_D(sigma)`. Equals `-1` exactly on the divisors at finite
/// distance from `sigma` (simple poles).
pub fn ord_omega(sigma: &DihedralStructure, d: &StablePartition) -> HalfInt {
    let ell = sigma.n() as i64 - 3;
    HalfInt(ell - 1) - indicator_sum(d, sigma)
}

/// Convergence of the pair `(delta0, sigma delta0)`: no block of
/// `2 <= k <= n-2` labels is simultaneously consecutive for both orders.
///
/// Runs over all cyclic position windows of the word, maintaining the value
/// bitmask and testing cyclic-interval-ness in O(1) per window.
pub fn is_convergent(p: &Perm) -> bool {
    let n = p.n();
    assert!(n >= 4, "convergence needs n >= 4");
    let full = (1u32 << n) - 1;
    let w = p.word();
    for start in 0..n {
        let mut mask = 1u32 << (w[start] - 1);
        for k in 1..n - 2 {
            mask |= 1 << (w[(start + k) % n] - 1);
            let rot = ((mask << 1) | (mask >> (n - 1))) & full;
            if (mask ^ rot).count_ones() == 2 {
                return false;
            }
        }
    }
    true
}

/// A configuration: the class of the pair `(delta0, sigma delta0)` under the
/// double dihedral action, stored as the lexicographically least image of the
/// word under all `(2n)^2` combinations of position rotation/reversal and
/// value shift/reflection.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ConfigClass {
    rep: Perm,
}

impl ConfigClass {
    pub fn n(&self) -> usize {
        self.rep.n()
    }

    pub fn ell(&self) -> usize {
        self.rep.ell()
    }

    pub fn rep(&self) -> &Perm {
        &self.rep
    }

    pub fn is_convergent(&self) -> bool {
        is_convergent(&self.rep)
    }

    /// The dual class `[sigma]^v = [sigma^{-1}]`.
    pub fn dual(&self) -> ConfigClass {
        canonical_config(&self.rep.inverse()).expect("inverse word is valid")
    }

    pub fn is_self_dual(&self) -> bool {
        self.dual() == *self
    }
}

impl fmt::Debug for ConfigClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Config[{}]", self.rep)
    }
}

impl fmt::Display for ConfigClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rep)
    }
}

/// Canonical representative of the configuration class of `p`.
pub fn canonical_config(p: &Perm) -> Result<ConfigClass, DihedralError> {
    let n = p.n();
    if n < 3 {
        return Err(DihedralError::TooSmall { min: 3, got: n });
    }
    let packed = canonical_packed(p.word());
    Ok(ConfigClass {
        rep: Perm { word: unpack_word(packed, n) },
    })
}

/// Minimum packed word over the `(2n)^2` double-dihedral images.
pub(crate) fn canonical_packed(word: &[u8]) -> u64 {
    let n = word.len();
    let mut best = u64::MAX;
    let mut mapped = vec![0u8; n];
    let mut buf = vec![0u8; n];
    for shift in 0..n {
        for vreflect in [false, true] {
            for (i, &v) in word.iter().enumerate() {
                let s = (v as usize - 1 + shift) % n;
                mapped[i] = if vreflect { (n - 1 - s) as u8 + 1 } else { s as u8 + 1 };
            }
            for rot in 0..n {
                for preflect in [false, true] {
                    for (k, slot) in buf.iter_mut().enumerate() {
                        let idx = if preflect { (rot + n - k % n) % n } else { (rot + k) % n };
                        *slot = mapped[idx];
                    }
                    let packed = pack_word(&buf);
                    if packed < best {
                        best = packed;
                    }
                }
            }
        }
    }
    best
}

/// The family `pi_odd^m = (2m, 2, 2m-1, 3, ..., m, 1, m+1)` on `n = 2m`
/// points, whose basic cellular integrals are linear forms in odd zeta values.
pub fn pi_odd(m: usize) -> ConfigClass {
    assert!(m >= 3, "pi_odd needs m >= 3");
    assert!(2 * m <= MAX_N, "n = 2m too large");
    let mut word = Vec::with_capacity(2 * m);
    for k in 0..m - 1 {
        word.push((2 * m - k) as u8);
        word.push((k + 2) as u8);
    }
    word.push(1);
    word.push((m + 1) as u8);
    canonical_config(&Perm::new(word).expect("pi_odd word")).expect("valid class")
}

/// The companion family `pi_even^m = (2m+1, 2, 2m, 3, ..., m+2, 1, m+1)` on
/// `n = 2m + 1` points.
pub fn pi_even(m: usize) -> ConfigClass {
    assert!(m >= 2, "pi_even needs m >= 2");
    assert!(2 * m + 1 <= MAX_N, "n = 2m+1 too large");
    let mut word = Vec::with_capacity(2 * m + 1);
    for k in 0..m - 1 {
        word.push((2 * m + 1 - k) as u8);
        word.push((k + 2) as u8);
    }
    word.push((m + 2) as u8);
    word.push(1);
    word.push((m + 1) as u8);
    canonical_config(&Perm::new(word).expect("pi_even word")).expect("valid class")
}

/// Convergence witness: the smallest block simultaneously consecutive for
/// both orders, if any.
pub fn convergence_witness(p: &Perm) -> Option<Vec<u8>> {
    let n = p.n();
    let full = (1u32 << n) - 1;
    let w = p.word();
    let mut best: Option<u32> = None;
    for start in 0..n {
        let mut mask = 1u32 << (w[start] - 1);
        for k in 1..n - 2 {
            mask |= 1 << (w[(start + k) % n] - 1);
            let rot = ((mask << 1) | (mask >> (n - 1))) & full;
            if (mask ^ rot).count_ones() == 2
                && best.is_none_or(|b| mask.count_ones() < b.count_ones())
            {
                best = Some(mask);
            }
        }
    }
    best.map(mask_to_labels)
}

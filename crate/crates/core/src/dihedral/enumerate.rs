//! Exhaustive enumeration of convergent configuration classes.
//!
//! Every class contains a word starting with the letter 1 (rotate positions),
//! so only `(n-1)!` words are scanned. Words are filtered by the O(n^2)
//! bitmask convergence test first; only survivors are canonicalised.

use super::{canonical_packed, is_convergent, unpack_word, ConfigClass, DihedralError, Perm};
use rayon::prelude::*;
use std::collections::HashSet;

/// All convergent configuration classes on `n` points, sorted by
/// representative. Counts for n = 4..11: 0, 1, 1, 5, 17, 105, 771, 7028.
///
/// n <= 11 runs in minutes; larger n is allowed but the scan is O((n-1)!).
pub fn enumerate_convergent(n: usize) -> Result<Vec<ConfigClass>, DihedralError> {
    if n < 4 {
        return Err(DihedralError::TooSmall { min: 4, got: n });
    }
    if n > super::MAX_N {
        return Err(DihedralError::TooLarge(n));
    }

    // Shard on the letter in second position; each shard permutes the rest.
    let seconds: Vec<u8> = (2..=n as u8).collect();
    let sets: Vec<HashSet<u64>> = seconds
        .par_iter()
        .map(|&second| {
            let mut word = Vec::with_capacity(n);
            word.push(1u8);
            word.push(second);
            let mut tail: Vec<u8> = (2..=n as u8).filter(|&v| v != second).collect();
            let mut found = HashSet::new();
            scan(&mut word, &mut tail, &mut found);
            found
        })
        .collect();

    let mut all: HashSet<u64> = HashSet::new();
    for s in sets {
        all.extend(s);
    }
    let mut packed: Vec<u64> = all.into_iter().collect();
    packed.sort_unstable();
    Ok(packed
        .into_iter()
        .map(|p| ConfigClass {
            rep: Perm::new(unpack_word(p, n)).expect("canonical word is a permutation"),
        })
        .collect())
}

fn scan(word: &mut Vec<u8>, remaining: &mut Vec<u8>, found: &mut HashSet<u64>) {
    if remaining.is_empty() {
        let p = Perm::new(word.clone()).expect("scan builds permutations");
        if is_convergent(&p) {
            found.insert(canonical_packed(word));
        }
        return;
    }
    for i in 0..remaining.len() {
        let v = remaining.swap_remove(i);
        word.push(v);
        scan(word, remaining, found);
        word.pop();
        let last = remaining.len();
        remaining.push(v);
        remaining.swap(i, last);
    }
}

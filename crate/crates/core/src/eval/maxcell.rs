//! Numeric supremum of `|f|` over the closed cell.
//!
//! For a convergent configuration `f` vanishes on the whole boundary of the
//! cube, so the supremum is an interior maximum; a coarse grid scan followed
//! by shrinking local grid refinement pins it down far beyond the 1e-6
//! certification margin.

use super::CubicalIntegrand;
use crate::dihedral::ConfigClass;
use crate::forms::{build_basic_class, to_cubical};
use crate::num::BigFloat;
use rug::Float;

/// Maximum of the basic cellular function `f` on the closed cell, in cubical
/// coordinates. Returns the value and the location.
pub fn max_on_cell(c: &ConfigClass) -> (BigFloat, Vec<f64>) {
    assert!(c.is_convergent(), "max_on_cell expects a convergent configuration");
    let (f, w) = build_basic_class(c);
    let ell = w.degree;
    let g = CubicalIntegrand::compile(&to_cubical(&f, ell));

    // Coarse scan.
    let steps = match ell {
        1 => 4096,
        2 => 256,
        3 => 48,
        4 => 20,
        _ => 11,
    };
    let mut best = f64::MIN;
    let mut at = vec![0.5; ell];
    let mut idx = vec![0usize; ell];
    let mut x = vec![0f64; ell];
    'grid: loop {
        for d in 0..ell {
            x[d] = (idx[d] as f64 + 1.0) / (steps as f64 + 1.0);
        }
        let v = g.eval_f64(&x);
        if v > best {
            best = v;
            at.copy_from_slice(&x);
        }
        // Odometer.
        for d in 0..ell {
            idx[d] += 1;
            if idx[d] < steps {
                continue 'grid;
            }
            idx[d] = 0;
        }
        break;
    }

    // Local refinement: repeatedly rescan a shrinking box around the best
    // point with a small grid.
    let mut radius = 1.0 / (steps as f64 + 1.0);
    let local = 9usize;
    for _ in 0..60 {
        let mut improved_at = at.clone();
        let mut improved = best;
        let mut idx = vec![0usize; ell];
        'local: loop {
            for d in 0..ell {
                let offset = (idx[d] as f64 / (local as f64 - 1.0)) * 2.0 - 1.0;
                x[d] = (at[d] + offset * radius).clamp(1e-12, 1.0 - 1e-12);
            }
            let v = g.eval_f64(&x);
            if v > improved {
                improved = v;
                improved_at.copy_from_slice(&x);
            }
            for d in 0..ell {
                idx[d] += 1;
                if idx[d] < local {
                    continue 'local;
                }
                idx[d] = 0;
            }
            break;
        }
        best = improved;
        at = improved_at;
        radius *= 0.5;
        if radius < 1e-14 {
            break;
        }
    }
    (Float::with_val(64, best), at)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dihedral::{canonical_config, Perm};

    fn class(w: &[u8]) -> ConfigClass {
        canonical_config(&Perm::new(w.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn n5_maximum_is_golden_ratio_power() {
        // max f = ((sqrt 5 - 1)/2)^5 at x = y = (sqrt 5 - 1)/2.
        let (m, at) = max_on_cell(&class(&[5, 2, 4, 1, 3]));
        let phi_inv = (5f64.sqrt() - 1.0) / 2.0;
        let expect = phi_inv.powi(5);
        assert!((m.to_f64() - expect).abs() < 1e-9, "m = {m}");
        assert!((at[0] - phi_inv).abs() < 1e-5);
        assert!((at[1] - phi_inv).abs() < 1e-5);
    }

    #[test]
    fn n6_maximum_below_one() {
        let (m, _) = max_on_cell(&class(&[6, 2, 4, 1, 5, 3]));
        let v = m.to_f64();
        assert!(v > 0.0 && v < 1.0 - 1e-6, "m = {v}");
    }

    #[test]
    fn boundary_values_vanish() {
        let c = class(&[6, 2, 4, 1, 5, 3]);
        let (f, w) = build_basic_class(&c);
        let g = CubicalIntegrand::compile(&to_cubical(&f, w.degree));
        for x in [[1e-14, 0.5, 0.5], [0.5, 1.0 - 1e-14, 0.5], [0.5, 0.5, 1e-14]] {
            assert!(g.eval_f64(&x) < 1e-10);
        }
    }
}

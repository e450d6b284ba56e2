//! Tensorised tanh-sinh (double-exponential) quadrature over the unit
//! hypercube, specialised to cubical cellular integrands.
//!
//! Each node stores both `x` and `1 - x` at full precision; products
//! `1 - x_i ... x_j` are maintained through the complement recursion
//! `1 - P x = (1 - P) + P (1 - x)`, which only ever adds positive terms, so
//! the integrable singularities on the far faces of the cube cost no
//! cancellation.
//!
//! A whole family `f^N omega` for several `N` is integrated in one pass over
//! the grid: the `omega` and `f` values share the prefix products, the
//! needed reciprocals are computed once per node, and the powers are built
//! up incrementally.

use super::CubicalIntegrand;
use crate::num::{bits_for_digits, BigFloat};
use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Assign, Float};

/// One abscissa of the 1-D rule on (0, 1).
#[derive(Clone)]
pub struct Node {
    pub x: BigFloat,
    pub one_minus_x: BigFloat,
    pub weight: BigFloat,
}

/// The 1-D rule at level `m` (`h = 2^-m`), truncated where the weights drop
/// below the target precision.
pub fn rule(level: u32, digits: usize, prec: u32) -> Vec<Node> {
    let half_pi = Float::with_val(prec, rug::float::Constant::Pi) / 2u32;
    // Truncate once exp(-pi/2 sinh t) is below 10^-(digits + 8).
    let t_max =
        ((digits as f64 + 8.0) * std::f64::consts::LN_10 * 2.0 / std::f64::consts::PI).asinh();
    let h = 0.5f64.powi(level as i32);
    let k_max = (t_max / h).ceil() as i64;
    let hf = Float::with_val(prec, h);

    (-k_max..=k_max)
        .map(|k| {
            let t = Float::with_val(prec, k) * &hf;
            let u = Float::with_val(prec, t.sinh_ref()) * &half_pi;
            let cosh_t = Float::with_val(prec, t.cosh_ref());
            // x = e^{2u} / (1 + e^{2u}) and 1 - x = 1 / (1 + e^{2u}): both
            // endpoint distances carry full precision.
            let mut e2u = Float::with_val(prec, &u * 2u32);
            e2u.exp_mut();
            let denom = Float::with_val(prec, &e2u + 1u32);
            let x = Float::with_val(prec, &e2u / &denom);
            let one_minus_x = Float::with_val(prec, denom.recip_ref());
            // dx/dt = (pi/2) cosh t / (2 cosh^2 u)
            let cosh_u = Float::with_val(prec, u.cosh_ref());
            let cosh_u2 = Float::with_val(prec, cosh_u.square_ref());
            let weight = Float::with_val(prec, &hf * &half_pi) * cosh_t / (cosh_u2 * 2u32);
            Node { x, one_minus_x, weight }
        })
        .collect()
}

/// Weight times the single-variable factors `x^e (1-x)^c`, per node.
fn axis_table(nodes: &[Node], xexp: i64, cexp: i64, with_weight: bool, prec: u32) -> Vec<BigFloat> {
    nodes
        .iter()
        .map(|n| {
            let mut v =
                if with_weight { n.weight.clone() } else { Float::with_val(prec, 1) };
            if xexp != 0 {
                v *= Float::with_val(prec, (&n.x).pow(xexp as i32));
            }
            if cexp != 0 {
                v *= Float::with_val(prec, (&n.one_minus_x).pow(cexp as i32));
            }
            v
        })
        .collect()
}

/// A family `f^N omega` over a shared grid. With `factor = None` only the
/// base integrand is summed (`powers` must then be `[0]`).
pub struct Family {
    pub base: CubicalIntegrand,
    pub factor: Option<CubicalIntegrand>,
    pub powers: Vec<i64>,
}

impl Family {
    pub fn single(g: CubicalIntegrand) -> Self {
        Family { base: g, factor: None, powers: vec![0] }
    }

    fn ell(&self) -> usize {
        self.base.ell
    }
}

struct Tensor<'a> {
    ell: usize,
    npowers: usize,
    nodes: &'a [Node],
    axis_base: Vec<Vec<BigFloat>>,
    axis_f: Option<Vec<Vec<BigFloat>>>,
    /// (prefix index, base exponent, factor exponent) grouped by the ending
    /// dimension. Negative exponents are applied through one shared
    /// reciprocal per prefix.
    ranges_ending_at: Vec<Vec<(usize, i64, i64)>>,
    /// Prefix indices carried through dimension d.
    carry: Vec<Vec<usize>>,
    /// Power increments between consecutive requested powers.
    steps: Vec<i64>,
    first_power: i64,
}

struct Scratch {
    pref: Vec<Vec<BigFloat>>,
    compl: Vec<Vec<BigFloat>>,
    term_b: Vec<BigFloat>,
    term_f: Vec<BigFloat>,
    tmp: BigFloat,
    inv: BigFloat,
    cur: BigFloat,
    step: BigFloat,
    acc: Vec<BigFloat>,
}

impl Scratch {
    fn new(ell: usize, npowers: usize, prec: u32) -> Self {
        Scratch {
            pref: vec![vec![Float::new(prec); ell]; ell],
            compl: vec![vec![Float::new(prec); ell]; ell],
            term_b: vec![Float::new(prec); ell],
            term_f: vec![Float::new(prec); ell],
            tmp: Float::new(prec),
            inv: Float::new(prec),
            cur: Float::new(prec),
            step: Float::new(prec),
            acc: vec![Float::new(prec); npowers],
        }
    }
}

impl Tensor<'_> {
    fn set_dim(&self, d: usize, k: usize, s: &mut Scratch) {
        let node = &self.nodes[k];
        if d > 0 {
            let (plo, phi) = s.pref.split_at_mut(d);
            let (clo, chi) = s.compl.split_at_mut(d);
            let prev_p = &plo[d - 1];
            let prev_c = &clo[d - 1];
            let cur_p = &mut phi[0];
            let cur_c = &mut chi[0];
            for &i in &self.carry[d] {
                s.tmp.assign(&prev_p[i] * &node.one_minus_x);
                cur_c[i].assign(&prev_c[i] + &s.tmp);
                cur_p[i].assign(&prev_p[i] * &node.x);
            }
            {
                let (tlo, thi) = s.term_b.split_at_mut(d);
                thi[0].assign(&tlo[d - 1] * &self.axis_base[d][k]);
            }
            if let Some(axis_f) = &self.axis_f {
                let (tlo, thi) = s.term_f.split_at_mut(d);
                thi[0].assign(&tlo[d - 1] * &axis_f[d][k]);
            }
        } else {
            s.term_b[0].assign(&self.axis_base[0][k]);
            if let Some(axis_f) = &self.axis_f {
                s.term_f[0].assign(&axis_f[0][k]);
            }
        }
        s.pref[d][d].assign(&node.x);
        s.compl[d][d].assign(&node.one_minus_x);

        for &(i, eb, ef) in &self.ranges_ending_at[d] {
            // One reciprocal serves both integrands when exponents are
            // negative.
            let needs_inv = eb < 0 || ef < 0;
            if needs_inv {
                s.inv.assign(s.compl[d][i].recip_ref());
            }
            if eb != 0 {
                let base = if eb < 0 { &s.inv } else { &s.compl[d][i] };
                s.tmp.assign(base.pow(eb.unsigned_abs() as u32));
                s.term_b[d] *= &s.tmp;
            }
            if ef != 0 {
                let base = if ef < 0 { &s.inv } else { &s.compl[d][i] };
                s.tmp.assign(base.pow(ef.unsigned_abs() as u32));
                s.term_f[d] *= &s.tmp;
            }
        }
    }

    fn leaf(&self, s: &mut Scratch) {
        let d = self.ell - 1;
        if self.axis_f.is_none() {
            s.acc[0] += &s.term_b[d];
            return;
        }
        // cur = base * f^first, then multiply by f^step per entry.
        s.cur.assign(&s.term_b[d]);
        if self.first_power != 0 {
            s.tmp.assign((&s.term_f[d]).pow(self.first_power as i32));
            s.cur *= &s.tmp;
        }
        s.acc[0] += &s.cur;
        for (slot, &dp) in self.steps.iter().enumerate() {
            if dp == 1 {
                s.cur *= &s.term_f[d];
            } else {
                s.step.assign((&s.term_f[d]).pow(dp as u32));
                s.cur *= &s.step;
            }
            s.acc[slot + 1] += &s.cur;
        }
    }

    fn descend(&self, d: usize, s: &mut Scratch) {
        for k in 0..self.nodes.len() {
            self.set_dim(d, k, s);
            if d + 1 == self.ell {
                self.leaf(s);
            } else {
                self.descend(d + 1, s);
            }
        }
    }

    fn sum_under(&self, k0: usize, s: &mut Scratch) -> Vec<BigFloat> {
        for a in s.acc.iter_mut() {
            a.assign(0);
        }
        self.set_dim(0, k0, s);
        if self.ell == 1 {
            self.leaf(s);
        } else {
            self.descend(1, s);
        }
        s.acc.clone()
    }
}

/// Tensor sums of the family over the grid, one per requested power. The
/// outermost axis is parallelised; partial sums are reduced in index order,
/// so the result is deterministic.
pub fn tensor_sum_family(fam: &Family, nodes: &[Node], prec: u32) -> Vec<BigFloat> {
    let ell = fam.ell();
    assert!(ell >= 1);
    let mut powers = fam.powers.clone();
    assert!(!powers.is_empty());
    if fam.factor.is_some() {
        assert!(powers.windows(2).all(|w| w[0] < w[1]), "powers must be ascending");
    } else {
        assert_eq!(powers, vec![0]);
        powers = vec![0];
    }

    let axis_base: Vec<Vec<BigFloat>> = (0..ell)
        .map(|d| axis_table(nodes, fam.base.xpow[d], fam.base.single_compl[d], true, prec))
        .collect();
    let axis_f = fam.factor.as_ref().map(|f| {
        (0..ell)
            .map(|d| axis_table(nodes, f.xpow[d], f.single_compl[d], false, prec))
            .collect::<Vec<_>>()
    });

    // Merge base and factor ranges on shared prefixes.
    let mut merged: std::collections::BTreeMap<(usize, usize), (i64, i64)> =
        std::collections::BTreeMap::new();
    for &(i, j, e) in &fam.base.ranges {
        merged.entry((j, i)).or_insert((0, 0)).0 += e;
    }
    if let Some(f) = &fam.factor {
        for &(i, j, e) in &f.ranges {
            merged.entry((j, i)).or_insert((0, 0)).1 += e;
        }
    }
    let mut ranges_ending_at = vec![Vec::new(); ell];
    for (&(j, i), &(eb, ef)) in &merged {
        ranges_ending_at[j].push((i, eb, ef));
    }
    let mut carry = vec![Vec::new(); ell];
    for (d, slot) in carry.iter_mut().enumerate() {
        for &(j, i) in merged.keys() {
            if i < d && d <= j && !slot.contains(&i) {
                slot.push(i);
            }
        }
    }
    let steps: Vec<i64> = powers.windows(2).map(|w| w[1] - w[0]).collect();
    let tensor = Tensor {
        ell,
        npowers: powers.len(),
        nodes,
        axis_base,
        axis_f,
        ranges_ending_at,
        carry,
        steps,
        first_power: powers[0],
    };

    let partials: Vec<Vec<BigFloat>> = (0..nodes.len())
        .into_par_iter()
        .map_init(
            || Scratch::new(ell, tensor.npowers, prec),
            |s, k0| tensor.sum_under(k0, s),
        )
        .collect();
    let mut acc = vec![Float::new(prec); tensor.npowers];
    for p in partials {
        for (a, v) in acc.iter_mut().zip(p) {
            *a += &v;
        }
    }
    acc
}

/// Single-integrand tensor sum.
pub fn tensor_sum(g: &CubicalIntegrand, nodes: &[Node], prec: u32) -> BigFloat {
    let fam = Family::single(g.clone());
    tensor_sum_family(&fam, nodes, prec).pop().unwrap()
}

/// Level-doubling driver: evaluate at increasing levels until two successive
/// results agree to the target; the last difference is the error estimate.
pub struct TanhSinh {
    pub digits: usize,
    pub prec: u32,
    pub start_level: u32,
    pub max_level: u32,
}

impl TanhSinh {
    pub fn new(digits: usize, ell: usize) -> Self {
        let work = crate::num::working_digits(digits, ell);
        TanhSinh {
            digits,
            prec: bits_for_digits(work),
            // ~64 points per dimension to start the doubling schedule.
            start_level: 3,
            max_level: if ell <= 2 { 9 } else { 7 },
        }
    }

    /// Integrates the whole family at once; returns per power
    /// (value, error estimate) plus the last level used.
    ///
    /// The estimate for the current level is the double-exponential model
    /// `d_m^2 / d_{m-1}` once two successive differences are available (the
    /// error roughly squares per level); before that, the last difference.
    pub fn integrate_family(&self, fam: &Family) -> (Vec<(BigFloat, BigFloat)>, u32) {
        let tol = Float::with_val(64, 10).pow(-(self.digits as i32));
        let m = fam.powers.len().max(1);
        let mut prev: Option<Vec<BigFloat>> = None;
        let mut prev_diffs: Option<Vec<BigFloat>> = None;
        let mut errs = vec![Float::with_val(64, 1); m];
        let mut level = self.start_level;
        loop {
            let nodes = rule(level, self.digits, self.prec);
            let vals = tensor_sum_family(fam, &nodes, self.prec);
            if let Some(p) = &prev {
                let diffs: Vec<BigFloat> = vals
                    .iter()
                    .zip(p)
                    .map(|(v, q)| {
                        let mut e = Float::with_val(64, v - q);
                        e.abs_mut();
                        e
                    })
                    .collect();
                for slot in 0..m {
                    let d = &diffs[slot];
                    let ulp_floor = {
                        let mut u = Float::with_val(64, &vals[slot])
                            * Float::with_val(64, 2f64).pow(-(self.prec as i32) + 4);
                        u.abs_mut();
                        u
                    };
                    let model = match &prev_diffs {
                        Some(pd) if !pd[slot].is_zero() && *d < pd[slot] => {
                            Float::with_val(64, d * d) / &pd[slot]
                        }
                        _ => d.clone(),
                    };
                    errs[slot] = model.max(&ulp_floor);
                }
                prev_diffs = Some(diffs);
            }
            let done = prev.is_some() && errs.iter().all(|e| *e < tol);
            if done || level >= self.max_level {
                let out = vals.into_iter().zip(errs).collect();
                return (out, level);
            }
            prev = Some(vals);
            level += 1;
        }
    }

    /// Returns (value, error estimate, last level used) for one integrand.
    pub fn integrate(&self, g: &CubicalIntegrand) -> (BigFloat, BigFloat, u32) {
        let (mut out, level) = self.integrate_family(&Family::single(g.clone()));
        let (v, e) = out.pop().unwrap();
        (v, e, level)
    }
}

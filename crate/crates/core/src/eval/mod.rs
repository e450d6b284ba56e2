//! Numerical evaluation of cellular integrals: tensorised tanh-sinh
//! quadrature for `ell <= 3` (optionally 4 at reduced precision) and
//! quasi-Monte Carlo for `ell <= 6`.

mod maxcell;
mod montecarlo;
mod tanhsinh;

pub use maxcell::max_on_cell;
pub use montecarlo::{mc_integrate, mc_value_f64, SobolSampler};
pub use tanhsinh::{rule, tensor_sum, tensor_sum_family, Family, TanhSinh};

use crate::dihedral::ConfigClass;
use crate::forms::{
    basic_integrand_cubical, general_integrand_cubical, is_convergent_params, Factor,
    FactoredRational, Frame, ParamSet,
};
use crate::num::{to_decimal, BigFloat};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("configuration is not convergent; the integral diverges")]
    NotConvergent,
    #[error("parameters are not convergent; witness divisor {0}")]
    ParamsNotConvergent(String),
    #[error("dimension ell = {0} too large for quadrature (max 3, or 4 with <= 15 digits)")]
    DimensionTooLarge(usize),
    #[error("dimension ell = {0} too large for Monte Carlo (max 6)")]
    DimensionTooLargeMc(usize),
}

/// A cubical integrand compiled for fast repeated evaluation: per-dimension
/// exponents of `x_d` and `1 - x_d`, plus the coupled range factors
/// `(1 - x_i ... x_j)^e` with `i < j` (0-based dimensions).
#[derive(Clone, Debug)]
pub struct CubicalIntegrand {
    pub ell: usize,
    pub xpow: Vec<i64>,
    pub single_compl: Vec<i64>,
    pub ranges: Vec<(usize, usize, i64)>,
}

impl CubicalIntegrand {
    pub fn compile(fr: &FactoredRational) -> Self {
        assert_eq!(fr.frame(), Frame::Cubical, "compile needs a cubical integrand");
        assert_eq!(fr.sign(), 1, "cell integrands are positive after normalisation");
        let mut ell = 0usize;
        for (f, _) in fr.factors() {
            match *f {
                Factor::X(i) => ell = ell.max(i as usize),
                Factor::OneMinusXRange(_, j) => ell = ell.max(j as usize),
                _ => unreachable!("cubical frame"),
            }
        }
        let mut g = CubicalIntegrand {
            ell,
            xpow: vec![0; ell],
            single_compl: vec![0; ell],
            ranges: Vec::new(),
        };
        for (f, &e) in fr.factors() {
            match *f {
                Factor::X(i) => g.xpow[i as usize - 1] += e,
                Factor::OneMinusXRange(i, j) if i == j => g.single_compl[i as usize - 1] += e,
                Factor::OneMinusXRange(i, j) => {
                    g.ranges.push((i as usize - 1, j as usize - 1, e))
                }
                _ => unreachable!(),
            }
        }
        g
    }

    /// Plain f64 evaluation (used by the cell-maximum scan). Complements of
    /// running products are tracked separately so values near the far corner
    /// stay accurate; the factors are combined in log space to survive high
    /// powers.
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        let omx: Vec<f64> = x.iter().map(|v| 1.0 - v).collect();
        self.eval_log_weighted(x, &omx, 0.0)
    }

    /// Log-space evaluation with explicitly supplied complements `1 - x_d`
    /// and an additive log-weight (the Monte Carlo substitution Jacobian).
    pub fn eval_log_weighted(&self, x: &[f64], omx: &[f64], ln_w: f64) -> f64 {
        debug_assert_eq!(x.len(), self.ell);
        let mut log_sum = ln_w;
        for d in 0..self.ell {
            if self.xpow[d] != 0 {
                log_sum += self.xpow[d] as f64 * x[d].ln();
            }
            if self.single_compl[d] != 0 {
                log_sum += self.single_compl[d] as f64 * omx[d].ln();
            }
        }
        for &(i, j, e) in &self.ranges {
            // 1 - prod over [i..j] via the complement recursion.
            let mut p = x[i];
            let mut c = omx[i];
            for k in i + 1..=j {
                c += p * omx[k];
                p *= x[k];
            }
            log_sum += e as f64 * c.ln();
        }
        log_sum.exp()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Method {
    TanhSinh { levels: u32 },
    MonteCarlo { samples: u64, seed: u64 },
}

/// Result of a numerical integration, with a positive error estimate:
/// successive-level differences for tanh-sinh, combined batch standard error
/// for Monte Carlo.
#[derive(Clone, Debug)]
pub struct EvalResult {
    pub value: BigFloat,
    pub error_estimate: BigFloat,
    pub method: Method,
}

impl EvalResult {
    pub fn to_json(&self, config: &str, label: &str) -> serde_json::Value {
        serde_json::json!({
            "value": to_decimal(&self.value, 40),
            "err": to_decimal(&self.error_estimate, 3),
            "method": match &self.method {
                Method::TanhSinh { levels } => format!("tanh-sinh(levels={levels})"),
                Method::MonteCarlo { samples, seed } =>
                    format!("monte-carlo(samples={samples},seed={seed})"),
            },
            "config": config,
            "params": label,
        })
    }
}

fn quadrature(g: &FactoredRational, ell: usize, digits: usize) -> EvalResult {
    let compiled = CubicalIntegrand::compile(g);
    let ts = TanhSinh::new(digits, ell);
    let (value, error_estimate, levels) = ts.integrate(&compiled);
    EvalResult { value, error_estimate, method: Method::TanhSinh { levels } }
}

/// The basic cellular integral `I(N) = | int f^N omega |` evaluated by
/// tanh-sinh quadrature in cubical coordinates.
///
/// `ell <= 3` at full precision; `ell = 4` is accepted only up to 15 digits.
pub fn eval_basic(c: &ConfigClass, n_power: i64, digits: usize) -> Result<EvalResult, EvalError> {
    Ok(eval_basic_family(c, &[n_power], digits)?.pop().expect("one power"))
}

/// The whole family `I(N)` for several ascending `N` in one pass over the
/// quadrature grid (the grid work is shared, so this costs barely more than
/// a single integral).
pub fn eval_basic_family(
    c: &ConfigClass,
    powers: &[i64],
    digits: usize,
) -> Result<Vec<EvalResult>, EvalError> {
    if !c.is_convergent() {
        return Err(EvalError::NotConvergent);
    }
    let ell = c.ell();
    if ell > 4 || (ell == 4 && digits > 15) {
        return Err(EvalError::DimensionTooLarge(ell));
    }
    let (fc, wc) = crate::forms::basic_family_cubical(c.rep());
    let base = CubicalIntegrand::compile(&wc);
    let factor = CubicalIntegrand::compile(&fc);
    assert_eq!(base.ell, ell);
    assert_eq!(factor.ell, ell);
    let fam = Family { base, factor: Some(factor), powers: powers.to_vec() };
    let ts = TanhSinh::new(digits, ell);
    let (vals, levels) = ts.integrate_family(&fam);
    Ok(vals
        .into_iter()
        .map(|(value, error_estimate)| EvalResult {
            value,
            error_estimate,
            method: Method::TanhSinh { levels },
        })
        .collect())
}

/// The generalised cellular integral `| int f(a,b) omega |`.
pub fn eval_general(params: &ParamSet, digits: usize) -> Result<EvalResult, EvalError> {
    if let Err(witness) = is_convergent_params(params) {
        return Err(EvalError::ParamsNotConvergent(witness.to_string()));
    }
    let ell = params.sigma().ell();
    if ell > 4 || (ell == 4 && digits > 15) {
        return Err(EvalError::DimensionTooLarge(ell));
    }
    let g = general_integrand_cubical(params);
    Ok(quadrature(&g, ell, digits))
}

/// Quasi-Monte Carlo estimate of the basic cellular integral, for
/// `ell <= 6`. Deterministic for a fixed seed.
pub fn eval_montecarlo_basic(
    c: &ConfigClass,
    n_power: i64,
    samples: u64,
    seed: u64,
) -> Result<EvalResult, EvalError> {
    if !c.is_convergent() {
        return Err(EvalError::NotConvergent);
    }
    let ell = c.ell();
    if ell > 6 {
        return Err(EvalError::DimensionTooLargeMc(ell));
    }
    let g = CubicalIntegrand::compile(&basic_integrand_cubical(c.rep(), n_power));
    Ok(mc_integrate(&g, samples, seed))
}

/// Quasi-Monte Carlo estimate of a generalised cellular integral.
pub fn eval_montecarlo_general(
    params: &ParamSet,
    samples: u64,
    seed: u64,
) -> Result<EvalResult, EvalError> {
    if let Err(witness) = is_convergent_params(params) {
        return Err(EvalError::ParamsNotConvergent(witness.to_string()));
    }
    let ell = params.sigma().ell();
    if ell > 6 {
        return Err(EvalError::DimensionTooLargeMc(ell));
    }
    let g = CubicalIntegrand::compile(&general_integrand_cubical(params));
    Ok(mc_integrate(&g, samples, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dihedral::{canonical_config, Perm};
    use crate::num::zeta;
    use rug::ops::Pow;
    use rug::Float;

    fn class(w: &[u8]) -> ConfigClass {
        canonical_config(&Perm::new(w.to_vec()).unwrap()).unwrap()
    }

    fn assert_close(v: &BigFloat, expect: &BigFloat, tol_exp: i32) {
        let diff = Float::with_val(64, v - expect).abs();
        let tol = Float::with_val(64, 10).pow(tol_exp);
        assert!(diff < tol, "diff = {diff:e}");
    }

    #[test]
    fn n5_basic_values() {
        let c = class(&[5, 2, 4, 1, 3]);
        // I(0) = zeta(2).
        let r = eval_basic(&c, 0, 30).unwrap();
        let z2 = zeta(2, r.value.prec());
        assert_close(&r.value, &z2, -28);
        // I(1) = |3 zeta(2) - 5| = 0.0651978... (the linear form itself is
        // negative at N = 1; the integral carries the absolute value).
        let r1 = eval_basic(&c, 1, 30).unwrap();
        let mut expect = Float::with_val(r1.value.prec(), &z2 * 3u32) - 5u32;
        expect.abs_mut();
        assert_close(&r1.value, &expect, -28);
        assert!(r1.value > 0.065 && r1.value < 0.066);
    }

    #[test]
    fn n5_rejects_nonconvergent() {
        let c = class(&[1, 2, 3, 4, 5]);
        assert!(matches!(eval_basic(&c, 0, 20), Err(EvalError::NotConvergent)));
    }

    #[test]
    fn monotone_decrease_in_n() {
        let c = class(&[5, 2, 4, 1, 3]);
        let mut prev: Option<BigFloat> = None;
        for n in 0..=5 {
            let r = eval_basic(&c, n, 20).unwrap();
            assert!(r.value > 0u32);
            if let Some(p) = prev {
                assert!(r.value < p, "I({n}) did not decrease");
            }
            prev = Some(r.value);
        }
    }

    #[test]
    fn dixon_all_equal_matches_basic() {
        // Generalised integrand with all parameters = 1 equals basic N = 1.
        let sigma = Perm::new(vec![5, 2, 4, 1, 3]).unwrap();
        let params = crate::forms::solve_homogeneity(&sigma, &[1, 1, 1, 1, 1], None).unwrap();
        let a = eval_general(&params, 25).unwrap();
        let b = eval_basic(&class(&[5, 2, 4, 1, 3]), 1, 25).unwrap();
        assert_close(&a.value, &b.value, -23);
    }

    #[test]
    fn n6_basic_value_is_two_zeta3() {
        let c = class(&[6, 2, 4, 1, 5, 3]);
        let r = eval_basic(&c, 0, 15).unwrap();
        let z3 = zeta(3, r.value.prec());
        let expect = Float::with_val(r.value.prec(), &z3 * 2u32);
        assert_close(&r.value, &expect, -13);
    }
}

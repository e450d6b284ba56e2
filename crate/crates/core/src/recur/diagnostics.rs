//! Irrationality bookkeeping for a family of linear forms
//! `I_N = sum_i c_i[N] * const_i`: integrality of the coefficients, decay of
//! the forms, and the `e^3 (sqrt 2 - 1)^4 < 1` composite check.

use super::RationalSequence;
use crate::num::{
    apery_epsilon, bigint_to_rug, bits_for_digits, e_cubed_epsilon, rational_to_float, BigFloat,
};
use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::One;
use rug::ops::Pow;
use rug::Float;

/// `d_n = lcm(1, ..., n)`.
pub fn lcm_upto(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc = acc.lcm(&BigInt::from(k));
    }
    acc
}

/// A family of linear forms over named period constants.
pub struct LinearFormSpec {
    /// Constant names with values at working precision.
    pub constants: Vec<(String, BigFloat)>,
    /// One coefficient sequence per constant, aligned at the same offset.
    pub coeffs: Vec<RationalSequence>,
    /// Overall rational scale of the form (e.g. 2 for the zeta(3) family).
    pub scale: BigInt,
}

#[derive(Clone, Debug)]
pub struct DiagnosticsRow {
    pub n: i64,
    /// Integrality flag per coefficient sequence, after multiplying the i-th
    /// coefficient by `d_n^(denominator power)`.
    pub integral: Vec<bool>,
    pub abs_i: BigFloat,
    /// `|I_{n+1}| / |I_n|` when the next value exists.
    pub ratio: Option<BigFloat>,
}

#[derive(Debug)]
pub struct DiagnosticsReport {
    pub rows: Vec<DiagnosticsRow>,
    /// `d_N^{1/N}` at the last index (tends to e).
    pub dn_root: BigFloat,
    /// `(sqrt 2 - 1)^4`.
    pub epsilon: BigFloat,
    /// `e^3 (sqrt 2 - 1)^4`; must be below 1.
    pub e3_epsilon: BigFloat,
    pub e3_epsilon_below_one: bool,
}

/// Evaluates the diagnostics for the linear forms at indices
/// `n0 ..= n0 + len - 1`, with `denom_powers[i]` the power of `d_n` that must
/// clear the denominator of the i-th coefficient sequence.
pub fn diagnostics(
    spec: &LinearFormSpec,
    denom_powers: &[u32],
    digits: usize,
) -> DiagnosticsReport {
    assert_eq!(spec.constants.len(), spec.coeffs.len());
    assert_eq!(denom_powers.len(), spec.coeffs.len());
    let len = spec.coeffs.iter().map(|s| s.len()).min().unwrap_or(0);
    assert!(len > 0, "empty coefficient sequences");
    let n0 = spec.coeffs[0].n0();
    // The linear forms cancel catastrophically (that is the point), so the
    // working precision is taken from the supplied constants; the caller
    // sizes those against the coefficient growth.
    let prec = spec.constants.iter().map(|(_, c)| c.prec()).min().unwrap_or(64);

    // |I_n| at working precision.
    let scale = Float::with_val(prec, bigint_to_rug(&spec.scale));
    let values: Vec<BigFloat> = (0..len)
        .map(|idx| {
            let n = n0 + idx as i64;
            let mut acc = Float::new(prec);
            for (i, (_, c)) in spec.constants.iter().enumerate() {
                let q = rational_to_float(spec.coeffs[i].at(n), prec);
                acc += Float::with_val(prec, c * &q);
            }
            let mut v = Float::with_val(prec, &acc * &scale);
            v.abs_mut();
            v
        })
        .collect();

    let mut dn = BigInt::one();
    let mut rows = Vec::with_capacity(len);
    for idx in 0..len {
        let n = n0 + idx as i64;
        if n >= 2 && idx > 0 {
            dn = dn.lcm(&BigInt::from(n));
        } else if idx == 0 {
            dn = lcm_upto(n.max(1) as u64);
        }
        let integral = (0..spec.coeffs.len())
            .map(|i| {
                let c = spec.coeffs[i].at(n);
                let cleared = c * num_rational::BigRational::from(dn_pow(&dn, denom_powers[i]));
                cleared.is_integer()
            })
            .collect();
        let ratio = (idx + 1 < len).then(|| {
            let r = Float::with_val(prec, &values[idx + 1] / &values[idx]);
            r
        });
        rows.push(DiagnosticsRow { n, integral, abs_i: values[idx].clone(), ratio });
    }

    let scalar_prec = bits_for_digits(digits);
    let last_n = n0 + len as i64 - 1;
    let dn_root = {
        let d = Float::with_val(scalar_prec, bigint_to_rug(&dn));
        d.pow(Float::with_val(scalar_prec, 1) / Float::with_val(scalar_prec, last_n.max(1)))
    };
    let e3 = e_cubed_epsilon(scalar_prec);
    DiagnosticsReport {
        rows,
        dn_root,
        epsilon: apery_epsilon(scalar_prec),
        e3_epsilon_below_one: e3 < 1u32,
        e3_epsilon: e3,
    }
}

/// Precision (bits) that resolves linear forms whose coefficients reach the
/// sizes in `coeffs`, with `digits` decimal digits to spare.
fn forms_precision(digits: usize, coeffs: &[&RationalSequence]) -> u32 {
    let coeff_bits = coeffs
        .iter()
        .flat_map(|s| s.values())
        .map(|q| q.numer().bits().max(q.denom().bits()))
        .max()
        .unwrap_or(0);
    // The form can be as small as coeff^-2 in the worst case; double it.
    bits_for_digits(digits) + 2 * coeff_bits as u32 + 32
}

fn dn_pow(base: &BigInt, exp: u32) -> BigInt {
    let mut acc = BigInt::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// The zeta(3) Apery family `I_N = 2 (a_N zeta(3) - b_N)` up to index `m`.
pub fn apery_zeta3_forms(m: usize, digits: usize) -> LinearFormSpec {
    use super::PolyRecurrence;
    let r = PolyRecurrence::apery_zeta3();
    let a = r.extend_i64(&[1, 5], m).expect("leading coefficient positive");
    let b = r.extend_i64(&[0, 6], m).expect("leading coefficient positive");
    let prec = forms_precision(digits, &[&a, &b]);
    LinearFormSpec {
        constants: vec![
            ("zeta3".to_string(), crate::num::zeta(3, prec)),
            ("1".to_string(), Float::with_val(prec, -1)),
        ],
        coeffs: vec![a, b],
        scale: BigInt::from(2),
    }
}

/// The zeta(2) Apery family `I_N = a_N zeta(2) - b_N` up to index `m`.
pub fn apery_zeta2_forms(m: usize, digits: usize) -> LinearFormSpec {
    use super::PolyRecurrence;
    let r = PolyRecurrence::apery_zeta2();
    let a = r.extend_i64(&[1, 3], m).expect("leading coefficient positive");
    let b = r.extend_i64(&[0, 5], m).expect("leading coefficient positive");
    let prec = forms_precision(digits, &[&a, &b]);
    LinearFormSpec {
        constants: vec![
            ("zeta2".to_string(), crate::num::zeta(2, prec)),
            ("1".to_string(), Float::with_val(prec, -1)),
        ],
        coeffs: vec![a, b],
        scale: BigInt::one(),
    }
}

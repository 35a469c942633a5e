//! Matrix exponential by scaling and squaring with the [13/13] Padé approximant.

use num_complex::Complex64;

use crate::matrix::{induced_norm, ComplexMatrix, Lu, NormKind};

/// Coefficients of the degree-13 diagonal Padé approximant to `exp`.
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

fn lincomb(terms: &[(f64, &ComplexMatrix)]) -> ComplexMatrix {
    let n = terms[0].1.n();
    let mut out = ComplexMatrix::zeros(n);
    for &(c, m) in terms {
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += m[(i, j)] * c;
            }
        }
    }
    out
}

/// `e^A`. The matrix is scaled by `2^-s` with `s = max(0, ⌈log2 ‖A‖_∞⌉ + 1)`,
/// so the Padé argument has norm at most 1/2, then squared `s` times.
pub fn matrix_exp(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.n();
    if n == 1 {
        return ComplexMatrix::from_diagonal(&[a[(0, 0)].exp()]);
    }
    let norm = induced_norm(a, NormKind::Infinity).unwrap_or(0.0);
    let s = if norm > 0.0 {
        (norm.log2().ceil() as i64 + 1).max(0) as u32
    } else {
        0
    };
    let scaled = a.scale_real(0.5f64.powi(s as i32));

    let ident = ComplexMatrix::identity(n);
    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &PADE13;

    let u_inner = lincomb(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)]);
    let u_outer = lincomb(&[(b[7], &a6), (b[5], &a4), (b[3], &a2), (b[1], &ident)]);
    let u = &scaled * &(&(&a6 * &u_inner) + &u_outer);

    let v_inner = lincomb(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)]);
    let v_outer = lincomb(&[(b[6], &a6), (b[4], &a4), (b[2], &a2), (b[0], &ident)]);
    let v = &(&a6 * &v_inner) + &v_outer;

    let denom = &v - &u;
    let numer = &v + &u;
    // ‖A/2^s‖ ≤ 1/2 keeps V − U well conditioned; singularity is not reachable.
    let mut result = Lu::factor(&denom)
        .expect("Padé denominator is nonsingular for scaled arguments")
        .solve_mat(&numer);
    for _ in 0..s {
        result = &result * &result;
    }
    result
}

/// `e^{A t}` for scalar `t`.
pub fn matrix_exp_t(a: &ComplexMatrix, t: f64) -> ComplexMatrix {
    matrix_exp(&a.scale(Complex64::new(t, 0.0)))
}

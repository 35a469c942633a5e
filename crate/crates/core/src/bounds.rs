//! Computable upper bounds on `‖𝒢(B,t)‖` for triangular `B = D + N`.
//!
//! The main estimate is `‖𝒢(B,t)‖ ≤ Σ_{k<n} ‖N‖^k h^{*(k+1)}(t)`, where `h` is
//! the two-sided exponential envelope `e^{−γ⁻t}` (`t ≥ 0`), `e^{γ⁺t}` (`t ≤ 0`)
//! and `h^{*k}` its `k`-fold self-convolution. In closed form
//!
//! ```text
//! h^{*k}(t) = h(t) · |t|^{k−1} √(γ|t|) e^{γ|t|/2} K_{k−1/2}(γ|t|/2) / (√π (k−1)!)
//!           = h(t) · Σ_{j<k} (k−1+j)! |t|^{k−1−j} / ((k−1)! j! (k−1−j)! γ^j)
//! ```
//!
//! with `γ = γ⁻ + γ⁺`. Written with the summation index `k` starting at 0 the
//! Bessel order reads `K_{−k−1/2}`; since `K_{−ν} = K_ν` this is the same
//! `K_{k+1/2}` that appears in `h^{*(k+1)}`. The polynomial form is the one
//! evaluated; the Bessel form is kept as an independent cross-check.

use std::f64::consts::PI;

use crate::error::{GreenError, Result};
use crate::green::SpectralGaps;
use crate::matrix::{
    ensure_strictly_upper, entrywise_abs, induced_norm, split_triangular, ComplexMatrix, NormKind,
};

/// Inputs of the triangular bound.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundParams {
    pub n: usize,
    /// `‖N‖` in `norm_kind`.
    pub norm_n: f64,
    pub gamma_minus: f64,
    pub gamma_plus: f64,
    pub norm_kind: NormKind,
}

impl BoundParams {
    pub fn new(
        n: usize,
        norm_n: f64,
        gamma_minus: f64,
        gamma_plus: f64,
        norm_kind: NormKind,
    ) -> Result<Self> {
        if n == 0 {
            return Err(GreenError::DomainError("dimension must be positive".into()));
        }
        if !(norm_n >= 0.0) || !norm_n.is_finite() {
            return Err(GreenError::DomainError(format!(
                "‖N‖ = {norm_n} must be finite and nonnegative"
            )));
        }
        for g in [gamma_minus, gamma_plus] {
            if !(g > 0.0) {
                return Err(GreenError::DomainError(format!("gap {g} must be positive")));
            }
        }
        Ok(Self {
            n,
            norm_n,
            gamma_minus,
            gamma_plus,
            norm_kind,
        })
    }

    /// Parameters for an upper triangular `b` with the given (possibly shrunk) gaps.
    pub fn from_triangular(
        b: &ComplexMatrix,
        gaps: &SpectralGaps,
        norm_kind: NormKind,
    ) -> Result<Self> {
        let (_, nil) = split_triangular(b)?;
        let norm_n = induced_norm(&nil, norm_kind)?;
        Self::new(b.n(), norm_n, gaps.gamma_minus, gaps.gamma_plus, norm_kind)
    }

    /// `γ⁻ + γ⁺` (infinite for a one-sided spectrum).
    pub fn gamma(&self) -> f64 {
        self.gamma_minus + self.gamma_plus
    }
}

/// Inputs of the comparison bound in terms of `‖A‖` and the eigenvalue counts.
#[derive(Debug, Clone, PartialEq)]
pub struct QtdsParams {
    pub norm_a: f64,
    pub m: usize,
    pub l: usize,
    pub gamma_minus: f64,
    pub gamma_plus: f64,
}

impl QtdsParams {
    pub fn gamma(&self) -> f64 {
        self.gamma_minus + self.gamma_plus
    }
}

/// The envelope `h(t)`; `h(0) = 1`. An infinite gap makes that side vanish.
pub fn h_eval(t: f64, gamma_minus: f64, gamma_plus: f64) -> f64 {
    debug_assert!(gamma_minus > 0.0 && gamma_plus > 0.0);
    if t > 0.0 {
        (-gamma_minus * t).exp()
    } else if t < 0.0 {
        (gamma_plus * t).exp()
    } else {
        1.0
    }
}

/// `K_{m+1/2}(x)` from the terminating series
/// `√(π/2x) e^{−x} Σ_{j≤m} (m+j)! / (j! (m−j)! (2x)^j)`.
pub fn bessel_k_half(m: u32, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(GreenError::DomainError(format!(
            "K_(m+1/2)(x) needs x > 0, got {x}"
        )));
    }
    Ok((PI / (2.0 * x)).sqrt() * (-x).exp() * bessel_half_series(m, x))
}

fn bessel_half_series(m: u32, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 0..m {
        let (jf, mf) = (j as f64, m as f64);
        term *= (mf + jf + 1.0) * (mf - jf) / ((jf + 1.0) * 2.0 * x);
        sum += term;
    }
    sum
}

/// Coefficients `a_i` of `P_{k−1}(τ) = Σ_i a_i τ^i` (ascending powers), where
/// `a_{k−1−j} = (k−1+j)! / ((k−1)! j! (k−1−j)! γ^j)`. An infinite `γ` leaves
/// only the leading term `τ^{k−1}/(k−1)!`.
fn conv_poly_coefficients(k: usize, gamma: f64) -> Vec<f64> {
    let d = k - 1;
    let mut coeffs = vec![0.0; k];
    // j = 0 term: 1/(k−1)!.
    let mut c = 1.0 / (1..=d).map(|v| v as f64).product::<f64>();
    let inv_gamma = 1.0 / gamma;
    let mut gpow = 1.0;
    for j in 0..=d {
        coeffs[d - j] = c * gpow;
        if j < d {
            let jf = j as f64;
            c *= (d as f64 + jf + 1.0) * (d as f64 - jf) / (jf + 1.0);
            gpow *= inv_gamma;
        }
    }
    coeffs
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// The polynomial factor `P_{k−1}(|t|)` with `h^{*k}(t) = h(t)·P_{k−1}(|t|)`.
pub fn conv_polynomial(k: usize, t: f64, gamma: f64) -> f64 {
    horner(&conv_poly_coefficients(k, gamma), t.abs())
}

/// `h^{*k}(t)` allowing an infinite gap on one side (one-sided limit).
fn envelope_power(k: usize, t: f64, gamma_minus: f64, gamma_plus: f64) -> f64 {
    let h = h_eval(t, gamma_minus, gamma_plus);
    if h == 0.0 {
        return 0.0;
    }
    h * conv_polynomial(k, t, gamma_minus + gamma_plus)
}

fn check_conv_args(k: usize, gamma_minus: f64, gamma_plus: f64) -> Result<()> {
    if k < 1 {
        return Err(GreenError::DomainError(
            "convolution power k must be at least 1".into(),
        ));
    }
    for g in [gamma_minus, gamma_plus] {
        if !(g > 0.0 && g.is_finite()) {
            return Err(GreenError::DomainError(format!(
                "gap {g} must be finite and positive"
            )));
        }
    }
    Ok(())
}

/// Closed form of the `k`-fold self-convolution `h^{*k}(t)` (polynomial path).
pub fn conv_power_closed(k: usize, t: f64, gamma_minus: f64, gamma_plus: f64) -> Result<f64> {
    check_conv_args(k, gamma_minus, gamma_plus)?;
    Ok(envelope_power(k, t, gamma_minus, gamma_plus))
}

/// `h^{*k}(t)` through the Bessel product
/// `h(t)·|t|^{k−1} √(γ|t|) e^{γ|t|/2} K_{k−1/2}(γ|t|/2) / (√π (k−1)!)`.
/// Undefined at `t = 0`.
pub fn conv_power_bessel(k: usize, t: f64, gamma_minus: f64, gamma_plus: f64) -> Result<f64> {
    check_conv_args(k, gamma_minus, gamma_plus)?;
    let gamma = gamma_minus + gamma_plus;
    let at = t.abs();
    let x = 0.5 * gamma * at;
    let kval = bessel_k_half((k - 1) as u32, x)?;
    let fact: f64 = (1..k).map(|v| v as f64).product();
    let factor = at.powi(k as i32 - 1) * (gamma * at).sqrt() * x.exp() * kval / (PI.sqrt() * fact);
    Ok(h_eval(t, gamma_minus, gamma_plus) * factor)
}

fn check_nonzero(t: f64) -> Result<()> {
    if t == 0.0 {
        Err(GreenError::UndefinedAtZero)
    } else if !t.is_finite() {
        Err(GreenError::DomainError(format!("time {t} is not finite")))
    } else {
        Ok(())
    }
}

/// `Σ_{k<n} ‖N‖^k h^{*(k+1)}(t)`.
///
/// With `γ⁺ = +∞` (no right spectrum) this is the one-sided limit
/// `e^{−γ⁻t} Σ_{k<n} ‖N‖^k t^k/k!` for `t > 0` and `0` for `t < 0`; mirrored
/// for `γ⁻ = +∞`.
pub fn triangular_bound(params: &BoundParams, t: f64) -> Result<f64> {
    check_nonzero(t)?;
    let (gm, gp) = (params.gamma_minus, params.gamma_plus);
    if (t > 0.0 && !gm.is_finite()) || (t < 0.0 && !gp.is_finite()) {
        return Ok(0.0);
    }
    let mut total = 0.0;
    let mut npow = 1.0;
    for k in 0..params.n {
        total += npow * envelope_power(k + 1, t, gm, gp);
        npow *= params.norm_n;
    }
    Ok(total)
}

/// Matrix bound `Σ_{k<n} |N|^k h^{*(k+1)}(t)` dominating `|𝒢(B,t)|` entrywise.
///
/// `d` is only used to check that the strip `−γ⁻ < Re z < γ⁺` is free of
/// its diagonal.
pub fn entrywise_bound(
    d: &ComplexMatrix,
    nil: &ComplexMatrix,
    gamma_minus: f64,
    gamma_plus: f64,
    t: f64,
) -> Result<ComplexMatrix> {
    check_nonzero(t)?;
    ensure_strictly_upper(nil)?;
    if d.n() != nil.n() {
        return Err(GreenError::DimensionMismatch {
            expected: d.n(),
            found: nil.n(),
        });
    }
    if !(gamma_minus > 0.0 && gamma_plus > 0.0) {
        return Err(GreenError::DomainError("gaps must be positive".into()));
    }
    if let Some(z) = d
        .diagonal()
        .into_iter()
        .find(|z| -gamma_minus < z.re && z.re < gamma_plus)
    {
        return Err(GreenError::DomainError(format!(
            "eigenvalue {z} lies inside the strip"
        )));
    }
    let n = nil.n();
    let nabs = entrywise_abs(nil);
    let mut out = ComplexMatrix::zeros(n);
    if (t > 0.0 && !gamma_minus.is_finite()) || (t < 0.0 && !gamma_plus.is_finite()) {
        return Ok(out);
    }
    let mut power = ComplexMatrix::identity(n);
    for k in 0..n {
        let w = envelope_power(k + 1, t, gamma_minus, gamma_plus);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += power[(i, j)] * w;
            }
        }
        power = &power * &nabs;
    }
    Ok(out)
}

/// Convenience wrapper: entrywise bound for an upper triangular `b`.
pub fn entrywise_bound_for(
    b: &ComplexMatrix,
    gaps: &SpectralGaps,
    t: f64,
) -> Result<ComplexMatrix> {
    let (d, nil) = split_triangular(b)?;
    entrywise_bound(&d, &nil, gaps.gamma_minus, gaps.gamma_plus, t)
}

/// Van Loan's bound `‖e^{Bt}‖ ≤ e^{αt} Σ_{k<n} (‖N‖t)^k/k!` for `t ≥ 0`.
pub fn van_loan_bound(alpha: f64, norm_n: f64, n: usize, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(GreenError::DomainError(format!(
            "Van Loan bound needs t ≥ 0, got {t}"
        )));
    }
    let x = norm_n * t;
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 0..n {
        sum += term;
        term *= x / (k + 1) as f64;
    }
    Ok((alpha * t).exp() * sum)
}

/// Exact binomial coefficient as `f64`, through `u128` while it fits.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc·(n−i)/(i+1) stays integral at every step.
        match acc.checked_mul((n - i) as u128) {
            Some(v) => acc = v / (i + 1) as u128,
            None => {
                return (0..k).fold(1.0, |a, j| a * (n - j) as f64 / (j + 1) as f64);
            }
        }
    }
    acc as f64
}

/// Comparison bound in terms of `‖A‖` and the eigenvalue counts `m`, `l`:
///
/// ```text
/// t > 0:  e^{−γ⁻t} Σ_{j<m} Σ_{i≤j} C(l+i−1, l−1) |t|^{j−i}/(j−i)! (2‖A‖)^{l+j} / γ^{l+i}
/// t < 0:  e^{γ⁺t}  Σ_{j<l} Σ_{i≤j} C(m+i−1, m−1) |t|^{j−i}/(j−i)! (2‖A‖)^{m+j} / γ^{m+i}
/// ```
///
/// Requires both half-planes to carry spectrum.
pub fn qtds18_bound(params: &QtdsParams, t: f64) -> Result<f64> {
    check_nonzero(t)?;
    if params.m == 0 || params.l == 0 {
        return Err(GreenError::Inapplicable(format!(
            "needs eigenvalues in both half-planes (m = {}, l = {})",
            params.m, params.l
        )));
    }
    let (gm, gp) = (params.gamma_minus, params.gamma_plus);
    if !(gm > 0.0 && gm.is_finite() && gp > 0.0 && gp.is_finite()) {
        return Err(GreenError::DomainError(
            "gaps must be finite and positive".into(),
        ));
    }
    let gamma = params.gamma();
    let two_a = 2.0 * params.norm_a;
    let (outer, inner, decay) = if t > 0.0 {
        (params.m, params.l, (-gm * t).exp())
    } else {
        (params.l, params.m, (gp * t).exp())
    };
    let at = t.abs();
    let mut sum = 0.0;
    for j in 0..outer {
        for i in 0..=j {
            let p = j - i;
            let tp = at.powi(p as i32) / (1..=p).map(|v| v as f64).product::<f64>();
            let binom = binomial((inner + i - 1) as u64, (inner - 1) as u64);
            sum += binom * tp * two_a.powi((inner + j) as i32) / gamma.powi((inner + i) as i32);
        }
    }
    Ok(decay * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::abs_power;
    use num_complex::Complex64;
    use std::f64::consts::E;

    #[test]
    fn h_examples() {
        assert_eq!(h_eval(0.0, 2.0, 3.0), 1.0);
        assert!((h_eval(1.0, 2.0, 1.0) - 0.135_335_3).abs() < 1e-7);
        assert!((h_eval(-3.0, 2.0, 1.0) - 0.049_787_1).abs() < 1e-7);
    }

    #[test]
    fn bessel_closed_form_values() {
        let k0 = bessel_k_half(0, 1.0).unwrap();
        assert!((k0 - (PI / 2.0).sqrt() / E).abs() < 1e-15);
        assert!((k0 - 0.461_068_5).abs() < 1e-7);
        let k1 = bessel_k_half(1, 1.0).unwrap();
        assert!((k1 - 2.0 * (PI / 2.0).sqrt() / E).abs() < 1e-15);
        assert!((k1 - 0.922_137_0).abs() < 1e-7);
        for x in [10.0, 100.0, 700.0] {
            let scaled = bessel_k_half(0, x).unwrap() * (2.0 * x / PI).sqrt() * x.exp();
            assert!((scaled - 1.0).abs() < 1e-12);
        }
        assert!(bessel_k_half(2, 0.0).is_err());
        assert!(bessel_k_half(2, -1.0).is_err());
    }

    #[test]
    fn bessel_matches_integral_representation() {
        // K_ν(x) = ∫₀^∞ e^{−x cosh u} cosh(νu) du.
        let rule = crate::quadrature::GaussRule::new(20);
        for m in 0..5u32 {
            for x in [0.3, 1.0, 4.0] {
                let nu = m as f64 + 0.5;
                let integral =
                    rule.integrate(0.0, 12.0, 120, |u| (-x * u.cosh()).exp() * (nu * u).cosh());
                let closed = bessel_k_half(m, x).unwrap();
                assert!(((integral - closed) / closed).abs() < 1e-10, "m={m} x={x}");
            }
        }
    }

    #[test]
    fn conv_power_examples() {
        for t in [-2.0, -0.3, 0.0, 0.7, 4.0] {
            assert_eq!(
                conv_power_closed(1, t, 0.5, 1.5).unwrap(),
                h_eval(t, 0.5, 1.5)
            );
        }
        assert!((conv_power_closed(2, 1.0, 1.0, 1.0).unwrap() - 2.0 / E).abs() < 1e-15);
        assert!((conv_power_closed(2, 1.0, 1.0, 1.0).unwrap() - 0.735_758_9).abs() < 1e-7);
        assert!((conv_power_closed(3, 1.0, 1.0, 1.0).unwrap() - 3.5 / E).abs() < 1e-15);
        assert!((conv_power_closed(3, 1.0, 1.0, 1.0).unwrap() - 1.287_578_1).abs() < 1e-7);
        assert!(conv_power_closed(0, 1.0, 1.0, 1.0).is_err());
        assert!(conv_power_closed(2, 1.0, f64::INFINITY, 1.0).is_err());
    }

    #[test]
    fn conv_power_asymmetric_second_power() {
        // Direct integration of h*h for t > 0 gives (t + 2/γ) e^{−γ⁻t}.
        let (gm, gp, t): (f64, f64, f64) = (1.0, 2.0, 1.0);
        let expected = (t + 2.0 / 3.0) * (-gm * t).exp();
        assert!((conv_power_closed(2, t, gm, gp).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn bessel_and_polynomial_paths_agree() {
        for k in 1..=8 {
            for &(gm, gp) in &[(0.25, 0.25), (1.0, 2.0), (3.0, 0.5)] {
                for t in [1e-6, 1e-3, 0.4, -2.0, 7.5, -13.0] {
                    let a = conv_power_closed(k, t, gm, gp).unwrap();
                    let b = conv_power_bessel(k, t, gm, gp).unwrap();
                    assert!(((a - b) / a).abs() < 1e-10, "k={k} t={t} {a} {b}");
                }
            }
        }
        assert!(conv_power_bessel(2, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn polynomial_leading_term() {
        for k in 1..=8 {
            let t: f64 = 1e6;
            let fact: f64 = (1..k).map(|v| v as f64).product();
            let lead = conv_polynomial(k, t, 2.0) * fact / t.powi(k as i32 - 1);
            assert!((lead - 1.0).abs() < 1e-4, "k={k} {lead}");
        }
    }

    #[test]
    fn triangular_bound_examples() {
        let normal = BoundParams::new(4, 0.0, 0.7, 1.3, NormKind::Two).unwrap();
        for t in [-3.0, -0.1, 0.2, 5.0] {
            assert!((triangular_bound(&normal, t).unwrap() - h_eval(t, 0.7, 1.3)).abs() < 1e-15);
        }
        let p = BoundParams::new(2, 1.0, 1.0, 1.0, NormKind::Infinity).unwrap();
        let b = triangular_bound(&p, 1.0).unwrap();
        assert!((b - 3.0 / E).abs() < 1e-15);
        assert!(matches!(
            triangular_bound(&p, 0.0),
            Err(GreenError::UndefinedAtZero)
        ));
    }

    #[test]
    fn triangular_bound_one_sided_limit() {
        let p = BoundParams::new(2, 1.0, 1.0, f64::INFINITY, NormKind::Two).unwrap();
        let b = triangular_bound(&p, 2.0).unwrap();
        assert!((b - 3.0 * (-2.0f64).exp()).abs() < 1e-15);
        assert!((b - 0.406_005_8).abs() < 1e-7);
        assert_eq!(triangular_bound(&p, -2.0).unwrap(), 0.0);
        let near = BoundParams::new(2, 1.0, 1.0, 1e6, NormKind::Two).unwrap();
        let approx = triangular_bound(&near, 2.0).unwrap();
        assert!(((approx - b) / b).abs() < 1e-4);

        let mirrored = BoundParams::new(3, 0.5, f64::INFINITY, 2.0, NormKind::One).unwrap();
        assert_eq!(triangular_bound(&mirrored, 1.0).unwrap(), 0.0);
        let t: f64 = -1.5;
        let expected = (2.0 * t).exp() * (1.0 + 0.5 * 1.5 + 0.25 * 1.5 * 1.5 / 2.0);
        assert!((triangular_bound(&mirrored, t).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn entrywise_bound_examples() {
        let d = ComplexMatrix::from_real_rows(&[&[-1.0, 0.0], &[0.0, 1.0]]).unwrap();
        let zero = ComplexMatrix::zeros(2);
        let b = entrywise_bound(&d, &zero, 1.0, 1.0, 0.5).unwrap();
        let h = h_eval(0.5, 1.0, 1.0);
        assert!((&b - &ComplexMatrix::identity(2).scale_real(h)).max_abs() < 1e-15);

        let nil = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let b = entrywise_bound(&d, &nil, 1.0, 1.0, 1.0).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]])
            .unwrap()
            .scale_real(1.0 / E);
        assert!((&b - &expected).max_abs() < 1e-15);

        // Nilpotency: the series for n = 3 never needs a |N|^3 term.
        let nil3 = ComplexMatrix::from_rows(vec![
            vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 1.0),
                Complex64::new(-2.0, 0.0),
            ],
            vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 3.0),
            ],
            vec![Complex64::new(0.0, 0.0); 3],
        ])
        .unwrap();
        assert_eq!(abs_power(&entrywise_abs(&nil3), 3), ComplexMatrix::zeros(3));
        let d3 = ComplexMatrix::from_real_rows(&[
            &[-1.0, 0.0, 0.0],
            &[0.0, 2.0, 0.0],
            &[0.0, 0.0, -3.0],
        ])
        .unwrap();
        let b3 = entrywise_bound(&d3, &nil3, 1.0, 2.0, 0.8).unwrap();
        let mut manual = ComplexMatrix::zeros(3);
        for k in 0..3 {
            let w = conv_power_closed(k + 1, 0.8, 1.0, 2.0).unwrap();
            manual = &manual + &abs_power(&entrywise_abs(&nil3), k).scale_real(w);
        }
        assert!((&b3 - &manual).max_abs() < 1e-14);

        assert!(matches!(
            entrywise_bound(&d, &d, 1.0, 1.0, 1.0),
            Err(GreenError::NotStrictlyTriangular { .. })
        ));
        assert!(matches!(
            entrywise_bound(&d, &nil, 1.0, 1.0, 0.0),
            Err(GreenError::UndefinedAtZero)
        ));
        assert!(entrywise_bound(&d, &nil, 1.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn van_loan_examples() {
        assert!((van_loan_bound(-0.4, 0.0, 5, 2.0).unwrap() - (-0.8f64).exp()).abs() < 1e-15);
        let b = van_loan_bound(-1.0, 2.0, 2, 1.0).unwrap();
        assert!((b - 3.0 / E).abs() < 1e-15);
        assert!((b - 1.103_638_3).abs() < 1e-7);
        assert_eq!(van_loan_bound(3.0, 5.0, 4, 0.0).unwrap(), 1.0);
        assert!(van_loan_bound(0.0, 1.0, 2, -1.0).is_err());
    }

    #[test]
    fn qtds18_examples() {
        let p = QtdsParams {
            norm_a: 2.0,
            m: 1,
            l: 1,
            gamma_minus: 1.0,
            gamma_plus: 1.0,
        };
        let v = qtds18_bound(&p, 1.0).unwrap();
        assert_eq!(v, 2.0 * (-1.0f64).exp());
        assert!((v - 0.735_758_9).abs() < 1e-7);
        assert_eq!(qtds18_bound(&p, -1.0).unwrap(), v);

        let p = QtdsParams {
            norm_a: 1.0,
            m: 2,
            l: 1,
            gamma_minus: 1.0,
            gamma_plus: 1.0,
        };
        // j=0: 2/2; j=1,i=0: t·4/2; j=1,i=1: C(1,0)·4/4.
        assert!((qtds18_bound(&p, 1.0).unwrap() - 4.0 / E).abs() < 1e-15);

        let one_sided = QtdsParams { l: 0, ..p };
        assert!(matches!(
            qtds18_bound(&one_sided, 1.0),
            Err(GreenError::Inapplicable(_))
        ));
    }

    #[test]
    fn binomial_exact() {
        assert_eq!(binomial(0, 0), 1.0);
        assert_eq!(binomial(10, 3), 120.0);
        assert_eq!(binomial(40, 20), 137_846_528_820.0);
        assert_eq!(binomial(3, 5), 0.0);
    }
}

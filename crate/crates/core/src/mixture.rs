//! Proportion-dependent mixture law.
//!
//! A mixture over `k` languages with proportions `p` predicts loss as
//!
//! ```text
//! L(n, d_all; p) = a · n^(-alpha_n(p)) + b · D_x^(-alpha_d(p)) + l_inf(p)
//! ```
//!
//! where the exponents and floor are `p`-weighted averages of per-language
//! values and the raw token count is replaced by the transfer-adjusted
//!
//! ```text
//! D_x = d_all · (1 + gamma · S),    S = Σ_{i≠j} p_i p_j tau[i][j].
//! ```
//!
//! `a` and `b` are shared across languages and supplied by the caller
//! (fitted upstream or configured); the per-language `a`/`b` fields inside a
//! [`MixtureSpec`] are carried for reference but do not enter the mixture.
//!
//! For a one-hot `p` the weighted averages reproduce language `k`'s values
//! and `D_x = d_all` bit-for-bit (zero proportions contribute exact `+0.0`
//! terms, and the final evaluation runs through the same code path as the
//! single-language law), so the reduction is tested with `==`, no epsilon.

use crate::error::{Error, Result};
use crate::model::{MixtureSpec, PowerLawParams};

fn check_positive_arg(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::Validation(format!(
            "{name} must be a positive finite number (got {v})"
        )));
    }
    Ok(())
}

fn check_coeff(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(Error::Validation(format!(
            "{name} must be finite and >= 0 (got {v})"
        )));
    }
    Ok(())
}

fn blend(proportions: &[f64], values: impl Iterator<Item = f64>) -> f64 {
    proportions
        .iter()
        .zip(values)
        .fold(0.0, |acc, (&p, v)| acc + p * v)
}

/// Proportion-weighted `(alpha_n(p), alpha_d(p), l_inf(p))`.
///
/// Assumes `spec` is valid (as constructed by
/// [`crate::model::MixtureTemplate::with_proportions`]); each output lies in
/// the convex hull of the per-language values.
pub fn mixture_exponents(spec: &MixtureSpec) -> (f64, f64, f64) {
    let p = &spec.proportions;
    (
        blend(p, spec.per_language_params.iter().map(|q| q.alpha_n)),
        blend(p, spec.per_language_params.iter().map(|q| q.alpha_d)),
        blend(p, spec.per_language_params.iter().map(|q| q.l_inf)),
    )
}

/// `S = Σ_{i≠j} p_i p_j tau[i][j]`, accumulated row-major so the value is
/// reproducible bit-for-bit.
pub fn interaction_sum(spec: &MixtureSpec) -> f64 {
    let k = spec.proportions.len();
    let mut s = 0.0;
    for i in 0..k {
        for j in 0..k {
            if i != j {
                s += spec.proportions[i] * spec.proportions[j] * spec.tau[i][j];
            }
        }
    }
    s
}

pub(crate) fn effective_multiplier(spec: &MixtureSpec) -> Result<f64> {
    let m = 1.0 + spec.gamma * interaction_sum(spec);
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::Domain(format!(
            "interaction term drives the effective-token multiplier to {m}; \
             the mixture law is undefined at this proportion vector"
        )));
    }
    Ok(m)
}

/// Transfer-adjusted token count `D_x = d_all · (1 + gamma · S)`.
///
/// At least `d_all` when `gamma ≥ 0` and every `tau[i][j] ≥ 0`; fails with
/// [`Error::Domain`] when strongly negative coefficients push the
/// multiplier to zero or below.
pub fn effective_tokens(d_all: f64, spec: &MixtureSpec) -> Result<f64> {
    spec.validate()?;
    check_positive_arg("d_all", d_all)?;
    Ok(d_all * effective_multiplier(spec)?)
}

/// Predicted mixture loss at model size `n` and total token count `d_all`,
/// with shared coefficients `a`, `b`.
pub fn evaluate_mixture_loss(
    n: f64,
    d_all: f64,
    spec: &MixtureSpec,
    a: f64,
    b: f64,
) -> Result<f64> {
    spec.validate()?;
    evaluate_unvalidated(n, d_all, spec, a, b)
}

/// Evaluation without the simplex check, shared by the public entry point,
/// the allocation optimizer (whose iterates are feasible by construction),
/// and finite-difference probes that step off the simplex.
pub(crate) fn evaluate_unvalidated(
    n: f64,
    d_all: f64,
    spec: &MixtureSpec,
    a: f64,
    b: f64,
) -> Result<f64> {
    check_positive_arg("d_all", d_all)?;
    check_coeff("a", a)?;
    check_coeff("b", b)?;
    let d_x = d_all * effective_multiplier(spec)?;
    let (alpha_n, alpha_d, l_inf) = mixture_exponents(spec);
    let mixed = PowerLawParams::new(a, b, alpha_n, alpha_d, l_inf)?;
    mixed.evaluate(n, d_x)
}

/// Raw partial derivatives `∂L/∂p_k` of [`evaluate_mixture_loss`], treating
/// each proportion as a free coordinate (no simplex constraint). Directional
/// derivatives along simplex-preserving directions `e_i - e_j` are the
/// differences `g_i - g_j`.
pub fn mixture_loss_gradient(
    n: f64,
    d_all: f64,
    spec: &MixtureSpec,
    a: f64,
    b: f64,
) -> Result<Vec<f64>> {
    spec.validate()?;
    gradient_unvalidated(n, d_all, spec, a, b)
}

pub(crate) fn gradient_unvalidated(
    n: f64,
    d_all: f64,
    spec: &MixtureSpec,
    a: f64,
    b: f64,
) -> Result<Vec<f64>> {
    check_positive_arg("n", n)?;
    check_positive_arg("d_all", d_all)?;
    check_coeff("a", a)?;
    check_coeff("b", b)?;
    let k = spec.proportions.len();
    let p = &spec.proportions;
    let m = effective_multiplier(spec)?;
    let d_x = d_all * m;
    let (alpha_n, alpha_d, _) = mixture_exponents(spec);

    let ln_n = n.ln();
    let ln_dx = d_x.ln();
    let term_n = a * (-alpha_n * ln_n).exp();
    let term_d = b * (-alpha_d * ln_dx).exp();
    if !term_n.is_finite() || !term_d.is_finite() {
        return Err(Error::Domain(
            "power term overflowed while evaluating the mixture gradient".into(),
        ));
    }

    let mut grad = Vec::with_capacity(k);
    for idx in 0..k {
        let q = &spec.per_language_params[idx];
        // s_k = ∂S/∂p_k, picking up both orientations of tau
        let mut s_k = 0.0;
        for j in 0..k {
            if j != idx {
                s_k += p[j] * (spec.tau[idx][j] + spec.tau[j][idx]);
            }
        }
        let dln_dx = spec.gamma * s_k / m;
        let g = term_n * (-q.alpha_n * ln_n)
            + term_d * (-(q.alpha_d * ln_dx) - alpha_d * dln_dx)
            + q.l_inf;
        if !g.is_finite() {
            return Err(Error::Domain(format!(
                "mixture gradient component {idx} is not finite"
            )));
        }
        grad.push(g);
    }
    Ok(grad)
}

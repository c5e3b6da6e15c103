//! Optimal token allocation across languages and along compute frontiers.
//!
//! Two solvers live here. `optimize_proportions` minimizes the mixture law
//! over the proportion simplex (optionally boxed by per-language floors and
//! ceilings) with projected gradient descent from many starts; the uniform
//! mix is always start zero and descent never accepts an increase, so the
//! returned plan is never worse than uniform. `compute_optimal_split`
//! solves the single-law fixed-compute problem in closed form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mixture::{
    effective_tokens, evaluate_unvalidated, gradient_unvalidated, mixture_exponents,
};
use crate::model::{
    check_simplex, AllocationPlan, Budget, MixtureSpec, MixtureTemplate, OptimalSplit,
    PowerLawParams,
};
use crate::rng::Rng;

/// Sufficient-decrease constant for the proximal line search.
const ARMIJO_C: f64 = 1e-4;
/// Smallest step the line search will try before declaring the point stuck.
const MIN_STEP: f64 = 1e-18;

/// Per-language lower and upper bounds on proportions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraints {
    pub floor: Vec<f64>,
    pub ceil: Vec<f64>,
}

impl Constraints {
    /// The unconstrained simplex.
    pub fn none(k: usize) -> Self {
        Constraints {
            floor: vec![0.0; k],
            ceil: vec![1.0; k],
        }
    }

    /// A shared floor for every language, ceiling left at one.
    pub fn with_floor(k: usize, floor: f64) -> Self {
        Constraints {
            floor: vec![floor; k],
            ceil: vec![1.0; k],
        }
    }

    pub fn validate_for(&self, k: usize) -> Result<()> {
        if self.floor.len() != k || self.ceil.len() != k {
            return Err(Error::Argument(format!(
                "constraints carry {} floors and {} ceilings for {k} languages",
                self.floor.len(),
                self.ceil.len()
            )));
        }
        for i in 0..k {
            let (lo, hi) = (self.floor[i], self.ceil[i]);
            if !lo.is_finite() || !hi.is_finite() || lo < 0.0 || hi > 1.0 || lo > hi {
                return Err(Error::Validation(format!(
                    "constraint {i} must satisfy 0 <= floor <= ceil <= 1 (got [{lo}, {hi}])"
                )));
            }
        }
        let floor_sum: f64 = self.floor.iter().sum();
        if floor_sum > 1.0 {
            return Err(Error::Infeasible(format!(
                "floors sum to {floor_sum} > 1"
            )));
        }
        let ceil_sum: f64 = self.ceil.iter().sum();
        if ceil_sum < 1.0 {
            return Err(Error::Infeasible(format!(
                "ceilings sum to {ceil_sum} < 1"
            )));
        }
        Ok(())
    }
}

/// Multi-start and termination knobs for [`optimize_proportions`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizeOptions {
    /// Total start points: the uniform mix, then the simplex vertices, then
    /// seeded Dirichlet draws.
    pub starts: usize,
    pub seed: u64,
    pub max_iters: usize,
    /// Step-size threshold (relative to the iterate) that counts as
    /// converged.
    pub tol: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            starts: 64,
            seed: 42,
            max_iters: 500,
            tol: 1e-12,
        }
    }
}

impl OptimizeOptions {
    pub fn validate(&self) -> Result<()> {
        if self.starts == 0 || self.max_iters == 0 {
            return Err(Error::Validation(
                "optimizer needs at least one start and one iteration".into(),
            ));
        }
        if !self.tol.is_finite() || self.tol <= 0.0 {
            return Err(Error::Validation(format!(
                "tolerance must be a positive finite number (got {})",
                self.tol
            )));
        }
        Ok(())
    }
}

/// Exact Euclidean projection onto `{p : Σp = 1, lo ≤ p ≤ hi}`.
///
/// The projection is `p_i = clamp(y_i - λ, lo_i, hi_i)` for the multiplier
/// λ that makes the sum one; the sum is piecewise linear in λ with kinks at
/// `y_i - lo_i` and `y_i - hi_i`, so λ comes from locating the crossing
/// segment and interpolating. Requires a feasible box
/// (`Σlo ≤ 1 ≤ Σhi`), which [`Constraints::validate_for`] guarantees.
fn project_onto_box_simplex(y: &[f64], lo: &[f64], hi: &[f64]) -> Vec<f64> {
    let k = y.len();
    let g = |lambda: f64| -> f64 {
        (0..k).map(|i| (y[i] - lambda).clamp(lo[i], hi[i])).sum()
    };

    let mut breaks: Vec<f64> = Vec::with_capacity(2 * k);
    for i in 0..k {
        breaks.push(y[i] - hi[i]);
        breaks.push(y[i] - lo[i]);
    }
    breaks.sort_by(|x, z| x.partial_cmp(z).unwrap());
    breaks.dedup();

    let mut lambda = *breaks.last().expect("k > 0");
    if g(breaks[0]) <= 1.0 {
        // every coordinate at its ceiling already sums to one
        lambda = breaks[0];
    } else {
        for w in breaks.windows(2) {
            let (g0, g1) = (g(w[0]), g(w[1]));
            if g0 >= 1.0 && 1.0 >= g1 {
                let mid = 0.5 * (w[0] + w[1]);
                let free = (0..k)
                    .filter(|&i| {
                        let v = y[i] - mid;
                        v > lo[i] && v < hi[i]
                    })
                    .count();
                lambda = if free == 0 {
                    w[0]
                } else {
                    w[0] + (g0 - 1.0) / free as f64
                };
                break;
            }
        }
    }

    let mut p: Vec<f64> = (0..k)
        .map(|i| (y[i] - lambda).clamp(lo[i], hi[i]))
        .collect();
    // spread the floating-point residue over unpinned coordinates
    let resid = 1.0 - p.iter().sum::<f64>();
    if resid != 0.0 {
        let free: Vec<usize> = (0..k).filter(|&i| p[i] > lo[i] && p[i] < hi[i]).collect();
        if !free.is_empty() {
            let share = resid / free.len() as f64;
            for &i in &free {
                p[i] = (p[i] + share).clamp(lo[i], hi[i]);
            }
        } else if resid > 0.0 {
            if let Some(i) = (0..k).find(|&i| p[i] < hi[i]) {
                p[i] = (p[i] + resid).min(hi[i]);
            }
        } else if let Some(i) = (0..k).find(|&i| p[i] > lo[i]) {
            p[i] = (p[i] + resid).max(lo[i]);
        }
    }
    p
}

struct Descent<'a> {
    n: f64,
    d_all: f64,
    a: f64,
    b: f64,
    lo: &'a [f64],
    hi: &'a [f64],
    max_iters: usize,
    tol: f64,
}

impl Descent<'_> {
    /// Projected gradient descent from `start`, returning the final point
    /// and loss, or `None` when the loss is undefined at the start. Every
    /// accepted step strictly decreases the loss (proximal sufficient
    /// decrease), so the result is never worse than the start.
    fn run(&self, spec: &mut MixtureSpec, start: Vec<f64>) -> Option<(Vec<f64>, f64)> {
        spec.proportions = start;
        let mut f_cur = evaluate_unvalidated(self.n, self.d_all, spec, self.a, self.b).ok()?;
        let mut t = 1.0f64;
        for _ in 0..self.max_iters {
            let p = spec.proportions.clone();
            let grad = match gradient_unvalidated(self.n, self.d_all, spec, self.a, self.b) {
                Ok(g) => g,
                Err(_) => break,
            };
            t = (t * 2.0).min(1.0);
            let mut moved = false;
            while t >= MIN_STEP {
                let shifted: Vec<f64> =
                    p.iter().zip(&grad).map(|(pi, gi)| pi - t * gi).collect();
                let cand = project_onto_box_simplex(&shifted, self.lo, self.hi);
                let d2: f64 = cand
                    .iter()
                    .zip(&p)
                    .map(|(c, q)| (c - q) * (c - q))
                    .sum();
                if d2 == 0.0 {
                    break; // stationary: shrinking the step cannot move it
                }
                spec.proportions = cand;
                match evaluate_unvalidated(self.n, self.d_all, spec, self.a, self.b) {
                    Ok(f_new) if f_new <= f_cur - ARMIJO_C / t * d2 => {
                        f_cur = f_new;
                        moved = true;
                        break;
                    }
                    _ => t *= 0.5,
                }
            }
            if !moved {
                spec.proportions = p;
                break;
            }
            let step_inf = spec
                .proportions
                .iter()
                .zip(&p)
                .map(|(x, z)| (x - z).abs())
                .fold(0.0, f64::max);
            let scale = p.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
            if step_inf <= self.tol * (1.0 + scale) {
                break;
            }
        }
        Some((spec.proportions.clone(), f_cur))
    }
}

/// Minimizes the mixture law over token proportions at fixed `(n, d_all)`.
///
/// `a` and `b` are the shared power-law coefficients. The uniform mix
/// (projected into the constraint box) is always the first start, so
/// `predicted_loss ≤ uniform_loss` holds exactly; among equally good starts
/// the earliest wins, making the result deterministic for a fixed seed.
pub fn optimize_proportions(
    n: f64,
    d_all: f64,
    template: &MixtureTemplate,
    a: f64,
    b: f64,
    constraints: &Constraints,
    options: &OptimizeOptions,
) -> Result<AllocationPlan> {
    template.validate()?;
    options.validate()?;
    let k = template.k();
    constraints.validate_for(k)?;
    let budget = Budget::new(n, d_all)?;
    let (lo, hi) = (&constraints.floor[..], &constraints.ceil[..]);

    let uniform = project_onto_box_simplex(&vec![1.0 / k as f64; k], lo, hi);
    let mut spec = template.with_proportions(uniform.clone())?;
    // fail loudly if the law is undefined at the reference point
    let uniform_loss = evaluate_unvalidated(n, d_all, &spec, a, b)?;

    let mut starts: Vec<Vec<f64>> = Vec::with_capacity(options.starts);
    starts.push(uniform);
    for i in 0..k {
        if starts.len() == options.starts {
            break;
        }
        let mut vertex = vec![0.0; k];
        vertex[i] = 1.0;
        starts.push(project_onto_box_simplex(&vertex, lo, hi));
    }
    let mut rng = Rng::seed_from_u64(options.seed);
    while starts.len() < options.starts {
        starts.push(project_onto_box_simplex(&rng.dirichlet_flat(k), lo, hi));
    }

    let descent = Descent {
        n,
        d_all,
        a,
        b,
        lo,
        hi,
        max_iters: options.max_iters,
        tol: options.tol,
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    for start in starts {
        if let Some((p, loss)) = descent.run(&mut spec, start) {
            let better = match &best {
                Some((incumbent, _)) => loss < *incumbent,
                None => true,
            };
            if better {
                best = Some((loss, p));
            }
        }
    }
    let (predicted_loss, proportions) =
        best.expect("the uniform start evaluated successfully above");

    let token_counts = tokens_from_proportions(&proportions, d_all)?;
    let plan = AllocationPlan {
        languages: template.languages.clone(),
        proportions,
        token_counts,
        predicted_loss,
        uniform_loss,
        improvement: uniform_loss - predicted_loss,
        budget,
    };
    plan.validate()?;
    Ok(plan)
}

/// Splits a total token budget according to `proportions`.
pub fn tokens_from_proportions(proportions: &[f64], d_total: f64) -> Result<Vec<f64>> {
    check_simplex(proportions)?;
    if !d_total.is_finite() || d_total <= 0.0 {
        return Err(Error::Validation(format!(
            "d_total must be a positive finite number (got {d_total})"
        )));
    }
    Ok(proportions.iter().map(|&p| p * d_total).collect())
}

/// Closed-form loss-minimizing `(n, d)` under `n · d = budget / flops`.
///
/// Setting the frontier derivative to zero gives
/// `ln n* = [ln(αN·a) − ln(αD·b) + αD·ln M] / (αN + αD)` with
/// `M = compute_budget / flops_per_param_token`. When either power term is
/// absent (zero coefficient or exponent) the loss is monotone along the
/// frontier and there is no interior optimum to return.
pub fn compute_optimal_split(
    params: &PowerLawParams,
    compute_budget: f64,
    flops_per_param_token: f64,
) -> Result<OptimalSplit> {
    for (name, v) in [
        ("compute_budget", compute_budget),
        ("flops_per_param_token", flops_per_param_token),
    ] {
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::Validation(format!(
                "{name} must be a positive finite number (got {v})"
            )));
        }
    }
    if params.a == 0.0 || params.b == 0.0 || params.alpha_n == 0.0 || params.alpha_d == 0.0 {
        return Err(Error::Degenerate(
            "no interior frontier optimum: a power term is absent \
             (zero coefficient or zero exponent)"
                .into(),
        ));
    }
    let m = compute_budget / flops_per_param_token;
    if !m.is_finite() || m <= 0.0 {
        return Err(Error::Domain(format!(
            "token-parameter product budget {m} is not representable"
        )));
    }
    let ln_n = ((params.alpha_n * params.a).ln() - (params.alpha_d * params.b).ln()
        + params.alpha_d * m.ln())
        / (params.alpha_n + params.alpha_d);
    let n = ln_n.exp();
    let d = m / n;
    if !n.is_finite() || n <= 0.0 || !d.is_finite() || d <= 0.0 {
        return Err(Error::Domain(format!(
            "frontier optimum (n = {n}, d = {d}) left the representable range"
        )));
    }
    let predicted_loss = params.evaluate(n, d)?;
    Ok(OptimalSplit {
        n_params: n,
        d_tokens: d,
        predicted_loss,
    })
}

/// Mixture-loss breakdown for one candidate proportion vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhatIfReport {
    pub proportions: Vec<f64>,
    pub predicted_loss: f64,
    /// `a · n^(-alpha_n(p))`.
    pub term_model_size: f64,
    /// `b · D_x^(-alpha_d(p))`.
    pub term_data: f64,
    /// `l_inf(p)`.
    pub term_irreducible: f64,
    pub effective_tokens: f64,
    pub uniform_loss: f64,
    /// `uniform_loss - predicted_loss`: positive when `proportions` beats
    /// the uniform mix.
    pub delta_vs_uniform: f64,
}

/// Evaluates one proportion vector and decomposes the predicted loss. The
/// three terms sum to `predicted_loss` exactly (same additions as the
/// evaluator), and passing the uniform vector gives `delta_vs_uniform`
/// exactly zero.
pub fn whatif(
    proportions: &[f64],
    n: f64,
    d_all: f64,
    template: &MixtureTemplate,
    a: f64,
    b: f64,
) -> Result<WhatIfReport> {
    let spec = template.with_proportions(proportions.to_vec())?;
    let d_x = effective_tokens(d_all, &spec)?;
    let (alpha_n, alpha_d, l_inf) = mixture_exponents(&spec);
    let mixed = PowerLawParams::new(a, b, alpha_n, alpha_d, l_inf)?;
    let (term_n, term_d) = mixed.terms(n, d_x)?;
    let predicted_loss = term_n + term_d + mixed.l_inf;

    let k = template.k();
    let uniform_spec = template.with_proportions(vec![1.0 / k as f64; k])?;
    let uniform_loss = evaluate_unvalidated(n, d_all, &uniform_spec, a, b)?;

    Ok(WhatIfReport {
        proportions: proportions.to_vec(),
        predicted_loss,
        term_model_size: term_n,
        term_data: term_d,
        term_irreducible: mixed.l_inf,
        effective_tokens: d_x,
        uniform_loss,
        delta_vs_uniform: uniform_loss - predicted_loss,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::LanguageTag;
    use crate::oracle::{grid_search_frontier, grid_search_simplex};
    use proptest::prelude::*;

    const A: f64 = 0.45;
    const B: f64 = 1.8;

    fn langs(k: usize) -> Vec<LanguageTag> {
        (0..k)
            .map(|i| LanguageTag::new(&format!("lang{i}")).unwrap())
            .collect()
    }

    fn symmetric_template(k: usize, gamma: f64, tau_off: f64) -> MixtureTemplate {
        let params = vec![PowerLawParams::new(0.5, 1.2, 0.3, 0.35, 0.5).unwrap(); k];
        let tau: Vec<Vec<f64>> = (0..k)
            .map(|i| (0..k).map(|j| if i == j { 0.0 } else { tau_off }).collect())
            .collect();
        MixtureTemplate::new(langs(k), gamma, params, tau).unwrap()
    }

    /// Slow bisection solve of the same projection, for cross-checking.
    fn project_reference(y: &[f64], lo: &[f64], hi: &[f64]) -> Vec<f64> {
        let g = |lambda: f64| -> f64 {
            y.iter()
                .zip(lo)
                .zip(hi)
                .map(|((&yi, &l), &h)| (yi - lambda).clamp(l, h))
                .sum()
        };
        let mut left = y
            .iter()
            .zip(hi)
            .map(|(&yi, &h)| yi - h)
            .fold(f64::INFINITY, f64::min)
            - 1.0;
        let mut right = y
            .iter()
            .zip(lo)
            .map(|(&yi, &l)| yi - l)
            .fold(f64::NEG_INFINITY, f64::max)
            + 1.0;
        for _ in 0..200 {
            let mid = 0.5 * (left + right);
            if g(mid) >= 1.0 {
                left = mid;
            } else {
                right = mid;
            }
        }
        let lambda = 0.5 * (left + right);
        y.iter()
            .zip(lo)
            .zip(hi)
            .map(|((&yi, &l), &h)| (yi - lambda).clamp(l, h))
            .collect()
    }

    #[test]
    fn two_identical_languages_split_evenly() {
        let template = symmetric_template(2, 1.0, 0.2);
        let plan = optimize_proportions(
            1.5,
            300.0,
            &template,
            A,
            B,
            &Constraints::none(2),
            &OptimizeOptions::default(),
        )
        .unwrap();
        assert!((plan.proportions[0] - 0.5).abs() < 1e-6);
        assert!((plan.proportions[1] - 0.5).abs() < 1e-6);
        assert!(plan.improvement >= 0.0);
        assert!((plan.token_counts[0] - 150.0).abs() < 1e-3);
    }

    #[test]
    fn dominant_language_takes_the_vertex_without_transfer() {
        // language 0 is better on every component and gamma = 0, so the
        // optimum sits at its vertex
        let params = vec![
            PowerLawParams::new(0.5, 1.2, 0.45, 0.5, 0.4).unwrap(),
            PowerLawParams::new(0.5, 1.2, 0.2, 0.3, 0.6).unwrap(),
        ];
        let template =
            MixtureTemplate::new(langs(2), 0.0, params, vec![vec![0.0; 2]; 2]).unwrap();
        let plan = optimize_proportions(
            2.0,
            300.0,
            &template,
            A,
            B,
            &Constraints::none(2),
            &OptimizeOptions::default(),
        )
        .unwrap();
        assert!(plan.proportions[0] > 1.0 - 1e-6, "{:?}", plan.proportions);
        assert!(plan.predicted_loss < plan.uniform_loss);
    }

    #[test]
    fn optimizer_matches_the_lattice_oracle() {
        let params = vec![
            PowerLawParams::new(0.5, 1.2, 0.30, 0.42, 0.55).unwrap(),
            PowerLawParams::new(0.5, 1.2, 0.24, 0.30, 0.50).unwrap(),
            PowerLawParams::new(0.5, 1.2, 0.18, 0.36, 0.60).unwrap(),
        ];
        let tau = vec![
            vec![0.0, 0.03, 0.01],
            vec![0.02, 0.0, 0.04],
            vec![0.01, 0.02, 0.0],
        ];
        let template = MixtureTemplate::new(langs(3), 1.0, params, tau).unwrap();
        let (n, d_all) = (1.5, 350.0);
        let plan = optimize_proportions(
            n,
            d_all,
            &template,
            A,
            B,
            &Constraints::none(3),
            &OptimizeOptions::default(),
        )
        .unwrap();
        let (_, lattice_loss) = grid_search_simplex(
            |p| {
                let spec = template.with_proportions(p.to_vec()).unwrap();
                evaluate_unvalidated(n, d_all, &spec, A, B).unwrap_or(f64::INFINITY)
            },
            3,
            200,
        )
        .unwrap();
        assert!(
            plan.predicted_loss <= lattice_loss + 1e-12,
            "optimizer {} vs lattice {}",
            plan.predicted_loss,
            lattice_loss
        );
        assert!(lattice_loss - plan.predicted_loss < 1e-6);
    }

    #[test]
    fn floors_bind_when_the_optimum_lies_outside() {
        let params = vec![
            PowerLawParams::new(0.5, 1.2, 0.45, 0.5, 0.4).unwrap(),
            PowerLawParams::new(0.5, 1.2, 0.2, 0.3, 0.6).unwrap(),
        ];
        let template =
            MixtureTemplate::new(langs(2), 0.0, params, vec![vec![0.0; 2]; 2]).unwrap();
        let constraints = Constraints {
            floor: vec![0.0, 0.15],
            ceil: vec![1.0, 1.0],
        };
        let plan = optimize_proportions(
            2.0,
            300.0,
            &template,
            A,
            B,
            &constraints,
            &OptimizeOptions::default(),
        )
        .unwrap();
        assert_eq!(plan.proportions[1], 0.15);
        assert!((plan.proportions[0] - 0.85).abs() < 1e-12);
    }

    #[test]
    fn infeasible_bounds_are_rejected_by_name() {
        let template = symmetric_template(2, 0.0, 0.0);
        let floors = Constraints {
            floor: vec![0.7, 0.7],
            ceil: vec![1.0, 1.0],
        };
        let err = optimize_proportions(
            1.0,
            100.0,
            &template,
            A,
            B,
            &floors,
            &OptimizeOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)));
        assert!(err.to_string().contains("floors"), "{err}");

        let ceils = Constraints {
            floor: vec![0.0, 0.0],
            ceil: vec![0.3, 0.3],
        };
        let err = optimize_proportions(
            1.0,
            100.0,
            &template,
            A,
            B,
            &ceils,
            &OptimizeOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)));
        assert!(err.to_string().contains("ceilings"), "{err}");

        let inverted = Constraints {
            floor: vec![0.4, 0.0],
            ceil: vec![0.2, 1.0],
        };
        assert!(matches!(
            optimize_proportions(
                1.0,
                100.0,
                &template,
                A,
                B,
                &inverted,
                &OptimizeOptions::default()
            ),
            Err(Error::Validation(_))
        ));
        let short = Constraints {
            floor: vec![0.0],
            ceil: vec![1.0],
        };
        assert!(matches!(
            optimize_proportions(
                1.0,
                100.0,
                &template,
                A,
                B,
                &short,
                &OptimizeOptions::default()
            ),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn closed_form_matches_the_frontier_search() {
        let params = PowerLawParams::new(0.71, 0.87, 0.11, 0.25, 0.0).unwrap();
        let split = compute_optimal_split(&params, 3.84e20, 6.0).unwrap();
        let oracle = grid_search_frontier(&params, 3.84e20, 6.0, 2001).unwrap();
        let rel_n = (split.n_params - oracle.n_params).abs() / oracle.n_params;
        let rel_d = (split.d_tokens - oracle.d_tokens).abs() / oracle.d_tokens;
        assert!(rel_n < 1e-6, "n relative error {rel_n:e}");
        assert!(rel_d < 1e-6, "d relative error {rel_d:e}");
        // the stationary point can only beat lattice samples, up to rounding
        assert!(split.predicted_loss <= oracle.predicted_loss * (1.0 + 1e-12));
    }

    #[test]
    fn symmetric_law_splits_compute_evenly_and_scales_like_sqrt() {
        let params = PowerLawParams::new(0.8, 0.8, 0.4, 0.4, 0.2).unwrap();
        let split = compute_optimal_split(&params, 6e14, 6.0).unwrap();
        let root = (1e14f64).sqrt();
        assert!((split.n_params - root).abs() / root < 1e-12);
        assert!((split.d_tokens - root).abs() / root < 1e-12);

        let doubled = compute_optimal_split(&params, 1.2e15, 6.0).unwrap();
        let factor = doubled.n_params / split.n_params;
        assert!((factor - 2f64.sqrt()).abs() < 1e-9);
        assert!(doubled.predicted_loss < split.predicted_loss);
    }

    #[test]
    fn degenerate_frontiers_are_reported() {
        let no_alpha = PowerLawParams::new(0.5, 1.0, 0.0, 0.3, 0.1).unwrap();
        assert!(matches!(
            compute_optimal_split(&no_alpha, 1e20, 6.0),
            Err(Error::Degenerate(_))
        ));
        let no_coeff = PowerLawParams::new(0.0, 1.0, 0.3, 0.3, 0.1).unwrap();
        assert!(matches!(
            compute_optimal_split(&no_coeff, 1e20, 6.0),
            Err(Error::Degenerate(_))
        ));
        assert!(compute_optimal_split(&no_alpha, -1.0, 6.0).is_err());
    }

    #[test]
    fn whatif_breakdown_sums_exactly_and_uniform_is_neutral() {
        let template = symmetric_template(3, 1.0, 0.1);
        let report = whatif(&[0.5, 0.3, 0.2], 1.5, 350.0, &template, A, B).unwrap();
        assert_eq!(
            report.term_model_size + report.term_data + report.term_irreducible,
            report.predicted_loss
        );
        assert!(report.effective_tokens > 350.0);

        let third = 1.0 / 3.0;
        let neutral = whatif(&[third, third, third], 1.5, 350.0, &template, A, B).unwrap();
        assert_eq!(neutral.delta_vs_uniform, 0.0);
        assert_eq!(neutral.predicted_loss, neutral.uniform_loss);
    }

    #[test]
    fn whatif_agrees_with_the_optimizer() {
        let params = vec![
            PowerLawParams::new(0.5, 1.2, 0.30, 0.42, 0.55).unwrap(),
            PowerLawParams::new(0.5, 1.2, 0.24, 0.30, 0.50).unwrap(),
        ];
        let tau = vec![vec![0.0, 0.05], vec![0.02, 0.0]];
        let template = MixtureTemplate::new(langs(2), 1.0, params, tau).unwrap();
        let plan = optimize_proportions(
            1.5,
            300.0,
            &template,
            A,
            B,
            &Constraints::none(2),
            &OptimizeOptions::default(),
        )
        .unwrap();
        let report = whatif(&plan.proportions, 1.5, 300.0, &template, A, B).unwrap();
        assert_eq!(report.predicted_loss, plan.predicted_loss);
        assert!(report.delta_vs_uniform >= 0.0);
    }

    #[test]
    fn token_splits_validate_their_inputs() {
        let tokens = tokens_from_proportions(&[0.25, 0.75], 400.0).unwrap();
        assert_eq!(tokens, vec![100.0, 300.0]);
        assert!(tokens_from_proportions(&[0.3, 0.3], 400.0).is_err());
        assert!(tokens_from_proportions(&[0.5, 0.5], 0.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn projection_matches_bisection(
            y in proptest::collection::vec(-2.0f64..2.0, 2..=5),
        ) {
            let k = y.len();
            let lo = vec![0.0; k];
            let hi = vec![1.0; k];
            let fast = project_onto_box_simplex(&y, &lo, &hi);
            let slow = project_reference(&y, &lo, &hi);
            for i in 0..k {
                prop_assert!((fast[i] - slow[i]).abs() < 1e-9, "{fast:?} vs {slow:?}");
            }
            let sum: f64 = fast.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
            prop_assert!(fast.iter().all(|&v| (0.0..=1.0).contains(&v)));
        }

        #[test]
        fn boxed_projection_respects_bounds(
            y in proptest::collection::vec(-2.0f64..2.0, 3),
            lo in proptest::collection::vec(0.0f64..0.2, 3),
            spans in proptest::collection::vec(0.4f64..0.8, 3),
        ) {
            let hi: Vec<f64> = lo.iter().zip(&spans).map(|(&l, &s)| (l + s).min(1.0)).collect();
            // sums: lo ≤ 0.6 ≤ 1 and hi ≥ 1.2 ≥ 1, so the box is feasible
            let p = project_onto_box_simplex(&y, &lo, &hi);
            let sum: f64 = p.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
            for i in 0..3 {
                prop_assert!(p[i] >= lo[i] - 1e-15 && p[i] <= hi[i] + 1e-15);
            }
            let slow = project_reference(&y, &lo, &hi);
            for i in 0..3 {
                prop_assert!((p[i] - slow[i]).abs() < 1e-9);
            }
        }

        #[test]
        fn plans_never_beat_uniform_the_wrong_way(
            alpha_n in proptest::collection::vec(0.15f64..0.5, 3),
            alpha_d in proptest::collection::vec(0.2f64..0.5, 3),
            l_inf in proptest::collection::vec(0.3f64..0.7, 3),
            tau_off in 0.0f64..0.1,
            gamma in 0.0f64..2.0,
        ) {
            let params: Vec<PowerLawParams> = (0..3)
                .map(|i| {
                    PowerLawParams::new(0.5, 1.2, alpha_n[i], alpha_d[i], l_inf[i]).unwrap()
                })
                .collect();
            let tau = (0..3)
                .map(|i| (0..3).map(|j| if i == j { 0.0 } else { tau_off }).collect())
                .collect();
            let template = MixtureTemplate::new(langs(3), gamma, params, tau).unwrap();
            let plan = optimize_proportions(
                1.5,
                300.0,
                &template,
                A,
                B,
                &Constraints::none(3),
                &OptimizeOptions { starts: 12, ..OptimizeOptions::default() },
            )
            .unwrap();
            prop_assert!(plan.predicted_loss <= plan.uniform_loss);
            prop_assert!(plan.improvement >= 0.0);
            prop_assert!(plan.validate().is_ok());
        }
    }
}

//! Robust multi-start estimation of power-law parameters.
//!
//! The estimator minimizes a weighted Huber objective on (by default) log
//! residuals, over the reparameterization
//!
//! ```text
//! theta = (ln a, ln b, alpha_n, alpha_d, ln l_inf)
//! ```
//!
//! so positivity of the coefficients is structural rather than constrained.
//! The inner optimizer is a derivative-free simplex descent with restarts —
//! the Huber knee makes the objective non-smooth, so gradient methods buy
//! nothing — run from a grid of seeds and polished around the winner.
//! Everything is sequential and seed-ordered, so identical inputs produce
//! identical results.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::model::{ExperimentRecord, FitResult, PowerLawParams, ALPHA_MAX};

/// log-space floor standing in for "coefficient is zero"; exp of this is
/// ~1e-304, far below any loss scale the crate touches
const LN_TINY: f64 = -700.0;

/// weight of the quadratic penalty that holds simplex vertices inside the
/// parameter bounds
const BOUND_PENALTY: f64 = 1e3;

/// iterations between convergence checks on the best objective value
const CONVERGENCE_WINDOW: usize = 50;

/// simplex collapse threshold, relative to the incumbent's magnitude
const DIAMETER_TOL: f64 = 1e-13;

const MAX_RESTARTS: usize = 6;

/// L∞ differences below this are reported as one equivalence group by
/// [`rank_by_irreducible_loss`].
pub const RANK_TIE_TOL: f64 = 1e-4;

/// Inclusive `[lo, hi]` box for each law parameter. Coefficients may start
/// at zero; exponents must stay inside the globally admissible range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamBounds {
    pub a: (f64, f64),
    pub b: (f64, f64),
    pub alpha_n: (f64, f64),
    pub alpha_d: (f64, f64),
    pub l_inf: (f64, f64),
}

impl Default for ParamBounds {
    fn default() -> Self {
        ParamBounds {
            a: (0.0, 1e18),
            b: (0.0, 1e18),
            alpha_n: (0.0, ALPHA_MAX),
            alpha_d: (0.0, ALPHA_MAX),
            l_inf: (0.0, 1e18),
        }
    }
}

impl ParamBounds {
    fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in [
            ("a", self.a),
            ("b", self.b),
            ("alpha_n", self.alpha_n),
            ("alpha_d", self.alpha_d),
            ("l_inf", self.l_inf),
        ] {
            if !lo.is_finite() || !hi.is_finite() || lo < 0.0 || !(lo < hi) {
                return Err(Error::Validation(format!(
                    "bounds for {name} must satisfy 0 <= lo < hi and be finite (got [{lo}, {hi}])"
                )));
            }
        }
        for (name, (_, hi)) in [("alpha_n", self.alpha_n), ("alpha_d", self.alpha_d)] {
            if hi > ALPHA_MAX {
                return Err(Error::Validation(format!(
                    "upper bound for {name} exceeds the admissible maximum {ALPHA_MAX}"
                )));
            }
        }
        Ok(())
    }
}

/// Where multi-start seeds come from.
#[derive(Debug, Clone, PartialEq)]
pub enum InitGrid {
    /// Cartesian grid: exponents from {0.1, 0.3, 0.5, 1.0, 3.0}², floor from
    /// {~0, half of min loss, 0.9 · min loss}, coefficients solved by linear
    /// regression on the two power bases at each exponent pair. 75 seeds.
    Auto,
    /// Caller-supplied seeds, tried in order. Must be non-empty.
    Explicit(Vec<PowerLawParams>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub huber_delta: f64,
    /// Objective-evaluation budget per seed (the polish phase around the
    /// winner gets four times this).
    pub max_iters: usize,
    /// Relative objective decrease below which the inner optimizer is
    /// considered converged.
    pub tol: f64,
    pub init_grid: InitGrid,
    pub bounds: ParamBounds,
    /// Fit to the log of the loss (default); residuals and goodness
    /// statistics then live on the log scale too.
    pub log_target: bool,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            huber_delta: 1e-3,
            max_iters: 2000,
            tol: 1e-10,
            init_grid: InitGrid::Auto,
            bounds: ParamBounds::default(),
            log_target: true,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.huber_delta.is_finite() || self.huber_delta <= 0.0 {
            return Err(Error::Validation(format!(
                "huber_delta must be positive (got {})",
                self.huber_delta
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::Validation("max_iters must be >= 1".into()));
        }
        if !self.tol.is_finite() || self.tol <= 0.0 {
            return Err(Error::Validation(format!(
                "tol must be positive (got {})",
                self.tol
            )));
        }
        if let InitGrid::Explicit(seeds) = &self.init_grid {
            if seeds.is_empty() {
                return Err(Error::Validation("init_grid must be non-empty".into()));
            }
        }
        self.bounds.validate()
    }
}

// ---------------------------------------------------------------------------
// problem setup
// ---------------------------------------------------------------------------

struct Problem {
    ln_n: Vec<f64>,
    ln_d: Vec<f64>,
    y: Vec<f64>,
    ln_y: Vec<f64>,
    w: Vec<f64>,
    w_sum: f64,
    min_y: f64,
    mean_y: f64,
    huber_delta: f64,
    log_target: bool,
    /// bounds translated into theta space
    lo: [f64; 5],
    hi: [f64; 5],
}

fn ln_or_tiny(v: f64) -> f64 {
    if v > 0.0 {
        v.ln().max(LN_TINY)
    } else {
        LN_TINY
    }
}

impl Problem {
    fn new(records: &[ExperimentRecord], cfg: &FitConfig) -> Result<Self> {
        cfg.validate()?;
        if records.len() < 6 {
            return Err(Error::IllPosed(format!(
                "need at least 6 records to identify 5 parameters (got {})",
                records.len()
            )));
        }
        let tag = &records[0].tag;
        for r in records {
            r.validate()?;
            if &r.tag != tag {
                return Err(Error::Conflict(format!(
                    "records mix tags {} and {}; fit one dataset at a time",
                    tag.key(),
                    r.tag.key()
                )));
            }
        }
        let distinct = |get: fn(&ExperimentRecord) -> f64| {
            records
                .iter()
                .map(|r| get(r).to_bits())
                .collect::<BTreeSet<u64>>()
                .len()
        };
        if distinct(|r| r.n_params) < 2 {
            return Err(Error::IllPosed(
                "all records share one n_params value; the model-size exponent is unidentifiable"
                    .into(),
            ));
        }
        if distinct(|r| r.d_tokens) < 2 {
            return Err(Error::IllPosed(
                "all records share one d_tokens value; the data exponent is unidentifiable".into(),
            ));
        }
        let w_sum: f64 = records.iter().map(|r| r.weight).sum();
        if w_sum <= 0.0 {
            return Err(Error::IllPosed("all record weights are zero".into()));
        }

        let y: Vec<f64> = records.iter().map(|r| r.val_loss).collect();
        let min_y = y.iter().cloned().fold(f64::INFINITY, f64::min);
        let mean_y =
            records.iter().map(|r| r.weight * r.val_loss).sum::<f64>() / w_sum;

        let bounds = &cfg.bounds;
        let lo = [
            ln_or_tiny(bounds.a.0),
            ln_or_tiny(bounds.b.0),
            bounds.alpha_n.0,
            bounds.alpha_d.0,
            ln_or_tiny(bounds.l_inf.0),
        ];
        let hi = [
            bounds.a.1.ln(),
            bounds.b.1.ln(),
            bounds.alpha_n.1,
            bounds.alpha_d.1,
            bounds.l_inf.1.ln(),
        ];

        Ok(Problem {
            ln_n: records.iter().map(|r| r.n_params.ln()).collect(),
            ln_d: records.iter().map(|r| r.d_tokens.ln()).collect(),
            ln_y: y.iter().map(|v| v.ln()).collect(),
            y,
            w: records.iter().map(|r| r.weight).collect(),
            w_sum,
            min_y,
            mean_y,
            huber_delta: cfg.huber_delta,
            log_target: cfg.log_target,
            lo,
            hi,
        })
    }

    fn clamp(&self, theta: &[f64; 5]) -> ([f64; 5], f64) {
        let mut clamped = *theta;
        let mut penalty = 0.0;
        for i in 0..5 {
            let c = theta[i].clamp(self.lo[i], self.hi[i]);
            let excess = theta[i] - c;
            penalty += BOUND_PENALTY * excess * excess;
            clamped[i] = c;
        }
        (clamped, penalty)
    }

    fn huber(&self, r: f64) -> f64 {
        let a = r.abs();
        if a <= self.huber_delta {
            0.5 * r * r
        } else {
            self.huber_delta * (a - 0.5 * self.huber_delta)
        }
    }

    /// Weighted mean Huber loss plus the out-of-bounds penalty. Non-finite
    /// intermediate values surface as +inf so the simplex retreats.
    fn objective(&self, theta: &[f64; 5]) -> f64 {
        let (t, penalty) = self.clamp(theta);
        let l_inf = t[4].exp();
        let mut acc = 0.0;
        for i in 0..self.y.len() {
            let pred = (t[0] - t[2] * self.ln_n[i]).exp()
                + (t[1] - t[3] * self.ln_d[i]).exp()
                + l_inf;
            let r = if self.log_target {
                self.ln_y[i] - pred.ln()
            } else {
                self.y[i] - pred
            };
            acc += self.w[i] * self.huber(r);
        }
        let obj = acc / self.w_sum + penalty;
        if obj.is_finite() {
            obj
        } else {
            f64::INFINITY
        }
    }

    fn residuals(&self, theta: &[f64; 5]) -> Vec<f64> {
        let (t, _) = self.clamp(theta);
        let l_inf = t[4].exp();
        (0..self.y.len())
            .map(|i| {
                let pred = (t[0] - t[2] * self.ln_n[i]).exp()
                    + (t[1] - t[3] * self.ln_d[i]).exp()
                    + l_inf;
                if self.log_target {
                    self.ln_y[i] - pred.ln()
                } else {
                    self.y[i] - pred
                }
            })
            .collect()
    }

    fn theta_from_params(&self, p: &PowerLawParams) -> [f64; 5] {
        let raw = [
            ln_or_tiny(p.a),
            ln_or_tiny(p.b),
            p.alpha_n,
            p.alpha_d,
            ln_or_tiny(p.l_inf),
        ];
        self.clamp(&raw).0
    }

    fn params_from_theta(&self, theta: &[f64; 5]) -> Result<PowerLawParams> {
        let (t, _) = self.clamp(theta);
        PowerLawParams::new(t[0].exp(), t[1].exp(), t[2], t[3], t[4].exp())
    }

    /// Seeds for [`InitGrid::Auto`]: exponent pairs crossed with floor
    /// levels, coefficients from a 2×2 weighted least-squares solve on the
    /// corresponding power bases.
    fn auto_seeds(&self) -> Vec<PowerLawParams> {
        const ALPHAS: [f64; 5] = [0.1, 0.3, 0.5, 1.0, 3.0];
        let floors = [1e-9 * self.min_y, 0.5 * self.min_y, 0.9 * self.min_y];
        let coeff_floor = 1e-6 * self.mean_y;
        let mut seeds = Vec::with_capacity(ALPHAS.len() * ALPHAS.len() * floors.len());
        for &alpha_n in &ALPHAS {
            for &alpha_d in &ALPHAS {
                for &l_inf in &floors {
                    let (mut suu, mut suv, mut svv, mut suz, mut svz) =
                        (0.0, 0.0, 0.0, 0.0, 0.0);
                    for i in 0..self.y.len() {
                        let u = (-alpha_n * self.ln_n[i]).exp();
                        let v = (-alpha_d * self.ln_d[i]).exp();
                        let z = self.y[i] - l_inf;
                        let w = self.w[i];
                        suu += w * u * u;
                        suv += w * u * v;
                        svv += w * v * v;
                        suz += w * u * z;
                        svz += w * v * z;
                    }
                    let det = suu * svv - suv * suv;
                    let (mut a, mut b) = if det.abs() > 1e-12 * suu * svv {
                        (
                            (svv * suz - suv * svz) / det,
                            (suu * svz - suv * suz) / det,
                        )
                    } else {
                        // collinear bases; fall back to independent solves
                        (suz / suu.max(1e-300), svz / svv.max(1e-300))
                    };
                    if !a.is_finite() || a <= 0.0 {
                        a = coeff_floor;
                    }
                    if !b.is_finite() || b <= 0.0 {
                        b = coeff_floor;
                    }
                    seeds.push(PowerLawParams {
                        a,
                        b,
                        alpha_n,
                        alpha_d,
                        l_inf,
                    });
                }
            }
        }
        seeds
    }
}

// ---------------------------------------------------------------------------
// simplex descent
// ---------------------------------------------------------------------------

struct SimplexRun {
    theta: [f64; 5],
    objective: f64,
    converged: bool,
}

/// One Nelder-Mead descent from `theta0`, spending at most `budget`
/// objective evaluations (shared counter across restarts).
fn simplex_descent(
    problem: &Problem,
    theta0: [f64; 5],
    scale: f64,
    tol: f64,
    budget: &mut usize,
) -> SimplexRun {
    const REFLECT: f64 = 1.0;
    const EXPAND: f64 = 2.0;
    const CONTRACT: f64 = 0.5;
    const SHRINK: f64 = 0.5;
    let dim = 5;

    let eval = |theta: &[f64; 5], budget: &mut usize| -> Option<f64> {
        if *budget == 0 {
            return None;
        }
        *budget -= 1;
        Some(problem.objective(theta))
    };

    // initial simplex: theta0 plus one step along each axis
    let mut vertices: Vec<[f64; 5]> = Vec::with_capacity(dim + 1);
    let mut values: Vec<f64> = Vec::with_capacity(dim + 1);
    vertices.push(theta0);
    for i in 0..dim {
        let mut v = theta0;
        v[i] += scale * f64::max(0.05 * theta0[i].abs(), 0.1);
        vertices.push(v);
    }
    for v in &vertices {
        match eval(v, budget) {
            Some(f) => values.push(f),
            None => {
                // budget exhausted before the simplex exists
                let f = problem.objective(&theta0);
                return SimplexRun {
                    theta: theta0,
                    objective: f,
                    converged: false,
                };
            }
        }
    }

    let mut converged = false;
    let mut anchor = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut since_check = 0usize;

    'outer: loop {
        // sort vertices by objective, best first
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).expect("objective is never NaN"));
        let sorted_v: Vec<[f64; 5]> = order.iter().map(|&i| vertices[i]).collect();
        let sorted_f: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        vertices = sorted_v;
        values = sorted_f;

        let best = values[0];
        let worst = values[dim];

        // convergence: relative decrease of the incumbent over a window
        since_check += 1;
        if since_check >= CONVERGENCE_WINDOW {
            since_check = 0;
            let decrease = anchor - best;
            if decrease < tol * best.abs().max(1e-18) {
                converged = true;
                break;
            }
            anchor = best;
        }
        // convergence: simplex collapsed
        let diameter = vertices[1..]
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&vertices[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        let scale_ref = 1.0 + vertices[0].iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        if diameter < DIAMETER_TOL * scale_ref {
            converged = true;
            break;
        }

        // centroid of all but the worst vertex
        let mut centroid = [0.0; 5];
        for v in &vertices[..dim] {
            for k in 0..5 {
                centroid[k] += v[k];
            }
        }
        for c in &mut centroid {
            *c /= dim as f64;
        }
        let worst_v = vertices[dim];
        let blend = |t: f64| {
            let mut x = [0.0; 5];
            for k in 0..5 {
                x[k] = centroid[k] + t * (centroid[k] - worst_v[k]);
            }
            x
        };

        let reflected = blend(REFLECT);
        let f_reflected = match eval(&reflected, budget) {
            Some(f) => f,
            None => break,
        };

        if f_reflected < best {
            let expanded = blend(EXPAND);
            match eval(&expanded, budget) {
                Some(f_expanded) if f_expanded < f_reflected => {
                    vertices[dim] = expanded;
                    values[dim] = f_expanded;
                }
                Some(_) => {
                    vertices[dim] = reflected;
                    values[dim] = f_reflected;
                }
                None => {
                    vertices[dim] = reflected;
                    values[dim] = f_reflected;
                    break;
                }
            }
        } else if f_reflected < values[dim - 1] {
            vertices[dim] = reflected;
            values[dim] = f_reflected;
        } else {
            // contraction, outside or inside of the reflection
            let (candidate, reference) = if f_reflected < worst {
                (blend(CONTRACT), f_reflected)
            } else {
                (blend(-CONTRACT), worst)
            };
            match eval(&candidate, budget) {
                Some(f_candidate) if f_candidate <= reference => {
                    vertices[dim] = candidate;
                    values[dim] = f_candidate;
                }
                Some(_) => {
                    // shrink toward the best vertex
                    for i in 1..=dim {
                        for k in 0..5 {
                            vertices[i][k] =
                                vertices[0][k] + SHRINK * (vertices[i][k] - vertices[0][k]);
                        }
                        match eval(&vertices[i].clone(), budget) {
                            Some(f) => values[i] = f,
                            None => break 'outer,
                        }
                    }
                }
                None => break,
            }
        }
    }

    let mut best_idx = 0;
    for i in 1..=dim {
        if values[i] < values[best_idx] {
            best_idx = i;
        }
    }
    SimplexRun {
        theta: vertices[best_idx],
        objective: values[best_idx],
        converged,
    }
}

/// Descent plus shrinking restarts around the incumbent, within one budget.
fn descend_with_restarts(
    problem: &Problem,
    theta0: [f64; 5],
    tol: f64,
    mut budget: usize,
) -> SimplexRun {
    let mut run = simplex_descent(problem, theta0, 1.0, tol, &mut budget);
    let mut scale = 0.25;
    for _ in 0..MAX_RESTARTS {
        if budget == 0 {
            break;
        }
        let previous = run.objective;
        let next = simplex_descent(problem, run.theta, scale, tol, &mut budget);
        let improved = previous - next.objective > tol * previous.abs().max(1e-18);
        if next.objective < run.objective {
            run = next;
        } else {
            run.converged = run.converged || next.converged;
        }
        if !improved {
            break;
        }
        scale *= 0.25;
    }
    run
}

// ---------------------------------------------------------------------------
// public entry points
// ---------------------------------------------------------------------------

fn fit_records(records: &[ExperimentRecord], cfg: &FitConfig) -> Result<FitResult> {
    let problem = Problem::new(records, cfg)?;
    let seeds = match &cfg.init_grid {
        InitGrid::Auto => problem.auto_seeds(),
        InitGrid::Explicit(seeds) => seeds.clone(),
    };

    let mut winner: Option<(usize, SimplexRun)> = None;
    let mut any_converged = false;
    for (index, seed) in seeds.iter().enumerate() {
        let theta0 = problem.theta_from_params(seed);
        let run = descend_with_restarts(&problem, theta0, cfg.tol, cfg.max_iters);
        any_converged |= run.converged;
        let better = match &winner {
            Some((_, incumbent)) => run.objective < incumbent.objective,
            None => true,
        };
        if better {
            winner = Some((index, run));
        }
    }
    let (init_index, mut run) = winner.expect("init grid is validated non-empty");

    // polish: spend extra budget re-descending around the winner
    let polish = descend_with_restarts(&problem, run.theta, cfg.tol, 4 * cfg.max_iters);
    if polish.objective <= run.objective {
        run = SimplexRun {
            converged: run.converged || polish.converged,
            ..polish
        };
    }
    any_converged |= run.converged;

    let params = problem.params_from_theta(&run.theta)?;
    let result = FitResult {
        params,
        objective_value: run.objective,
        n_points: records.len(),
        residuals: problem.residuals(&run.theta),
        init_index,
        converged: run.converged,
        log_scale: cfg.log_target,
    };
    if !any_converged {
        return Err(Error::Convergence {
            message: format!(
                "no seed reached relative objective decrease < {:e} within {} evaluations",
                cfg.tol, cfg.max_iters
            ),
            best: Box::new(result),
        });
    }
    Ok(result)
}

/// Fits the two-term law to single-language training observations.
pub fn fit_chinchilla(records: &[ExperimentRecord], cfg: &FitConfig) -> Result<FitResult> {
    fit_records(records, cfg)
}

/// Fits the same two-term law to translation-direction observations.
///
/// The functional form is identical to [`fit_chinchilla`]; this entry point
/// exists so direction datasets read as such at call sites and can grow
/// their own presets without touching single-language fits.
pub fn fit_two_term(records: &[ExperimentRecord], cfg: &FitConfig) -> Result<FitResult> {
    fit_records(records, cfg)
}

/// Objective value of `params` on `records` under `cfg`, exactly as the
/// fitter would score it (clamped into bounds, including any penalty).
/// Useful for verifying multi-start dominance and for diagnostics.
pub fn evaluate_objective(
    records: &[ExperimentRecord],
    cfg: &FitConfig,
    params: &PowerLawParams,
) -> Result<f64> {
    let problem = Problem::new(records, cfg)?;
    let theta = problem.theta_from_params(params);
    Ok(problem.objective(&theta))
}

/// Sorts languages by fitted irreducible loss, ascending, grouping values
/// whose difference from the group's first member stays below
/// [`RANK_TIE_TOL`] into equivalence classes.
pub fn rank_by_irreducible_loss(
    fits: &BTreeMap<crate::model::LanguageTag, FitResult>,
) -> Result<Vec<Vec<(crate::model::LanguageTag, f64)>>> {
    for (language, fit) in fits {
        if !fit.converged {
            return Err(Error::Argument(format!(
                "fit for {language} did not converge; rank only converged fits"
            )));
        }
    }
    let mut entries: Vec<(crate::model::LanguageTag, f64)> = fits
        .iter()
        .map(|(language, fit)| (language.clone(), fit.params.l_inf))
        .collect();
    entries.sort_by(|a, b| {
        a.1.partial_cmp(&b.1)
            .expect("l_inf is finite")
            .then_with(|| a.0.cmp(&b.0))
    });

    let mut groups: Vec<Vec<(crate::model::LanguageTag, f64)>> = Vec::new();
    for entry in entries {
        match groups.last_mut() {
            Some(group) if entry.1 - group[0].1 < RANK_TIE_TOL => group.push(entry),
            _ => groups.push(vec![entry]),
        }
    }
    Ok(groups)
}

/// RMSE, R², and max |residual| of a fit on its own records, computed on
/// the fit's scale (log when `result.log_scale`) with record weights.
pub fn goodness_of_fit(
    result: &FitResult,
    records: &[ExperimentRecord],
) -> Result<(f64, f64, f64)> {
    if records.len() != result.n_points {
        return Err(Error::Argument(format!(
            "fit covered {} points but {} records were supplied",
            result.n_points,
            records.len()
        )));
    }
    if records.len() < 2 {
        return Err(Error::Argument(
            "goodness statistics need at least 2 records".into(),
        ));
    }
    let mut w_sum = 0.0;
    let mut targets = Vec::with_capacity(records.len());
    for r in records {
        r.validate()?;
        w_sum += r.weight;
        targets.push(if result.log_scale {
            r.val_loss.ln()
        } else {
            r.val_loss
        });
    }
    if w_sum <= 0.0 {
        return Err(Error::Argument("all record weights are zero".into()));
    }
    let mean = records
        .iter()
        .zip(&targets)
        .map(|(r, t)| r.weight * t)
        .sum::<f64>()
        / w_sum;

    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    let mut max_abs = 0.0f64;
    for (r, &t) in records.iter().zip(&targets) {
        let pred = result.params.evaluate(r.n_params, r.d_tokens)?;
        let resid = t - if result.log_scale { pred.ln() } else { pred };
        ss_res += r.weight * resid * resid;
        ss_tot += r.weight * (t - mean) * (t - mean);
        max_abs = max_abs.max(resid.abs());
    }
    if ss_tot == 0.0 {
        return Err(Error::IllPosed(
            "target variance is zero; R² is undefined".into(),
        ));
    }
    Ok((
        (ss_res / w_sum).sqrt(),
        1.0 - ss_res / ss_tot,
        max_abs,
    ))
}

// ---------------------------------------------------------------------------

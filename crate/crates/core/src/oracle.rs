//! Synthetic data generation and brute-force reference searches.
//!
//! The generators here are the ground truth that fits and optimizers are
//! judged against in tests: a fixed evaluation grid, a seeded noisy-surface
//! sampler, and two exhaustive searches (simplex lattice, compute frontier)
//! that trade speed for being obviously correct.

use crate::error::{Error, Result};
use crate::model::{ExperimentRecord, OptimalSplit, PowerLawParams, Tag};
use crate::rng::Rng;

/// Built-in evaluation grid: ten model sizes crossed with six token budgets,
/// in units of 1e9 (so `0.1` is a hundred-million-parameter model). Sixty
/// points, size-major.
pub fn reference_grid() -> Vec<(f64, f64)> {
    const SIZES: [f64; 10] = [0.1, 0.2, 0.4, 0.6, 1.1, 1.3, 1.6, 2.0, 2.4, 3.1];
    const BUDGETS: [f64; 6] = [2.0, 4.0, 8.0, 16.0, 32.0, 64.0];
    let mut grid = Vec::with_capacity(SIZES.len() * BUDGETS.len());
    for &n in &SIZES {
        for &d in &BUDGETS {
            grid.push((n, d));
        }
    }
    grid
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    /// Records lie exactly on the law.
    None,
    /// `loss = law · exp(sigma · z)`, `z` standard normal. Multiplicative so
    /// noisy losses stay positive; additive noise could cross zero.
    Lognormal,
}

/// Observation-noise policy for [`generate_surface`]. Draws come from the
/// seeded stream identified by [`crate::rng::GENERATOR_ID`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Noise {
    pub kind: NoiseKind,
    pub sigma: f64,
    pub seed: u64,
}

impl Noise {
    pub fn none() -> Self {
        Noise {
            kind: NoiseKind::None,
            sigma: 0.0,
            seed: 0,
        }
    }

    pub fn lognormal(sigma: f64, seed: u64) -> Result<Self> {
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::Validation(format!(
                "noise sigma must be finite and >= 0 (got {sigma})"
            )));
        }
        Ok(Noise {
            kind: NoiseKind::Lognormal,
            sigma,
            seed,
        })
    }
}

/// Samples one observation per grid point from the law under `noise`,
/// labeled `tag`. Records carry `weight = 1` and run ids `<tag>-synth-NNN`
/// in grid order.
pub fn generate_surface(
    params: &PowerLawParams,
    grid: &[(f64, f64)],
    noise: &Noise,
    tag: &Tag,
) -> Result<Vec<ExperimentRecord>> {
    if grid.is_empty() {
        return Err(Error::Argument("surface grid must be non-empty".into()));
    }
    if !noise.sigma.is_finite() || noise.sigma < 0.0 {
        return Err(Error::Validation(format!(
            "noise sigma must be finite and >= 0 (got {})",
            noise.sigma
        )));
    }
    let mut rng = Rng::seed_from_u64(noise.seed);
    let mut records = Vec::with_capacity(grid.len());
    for (i, &(n, d)) in grid.iter().enumerate() {
        let law = params.evaluate(n, d)?;
        let val_loss = match noise.kind {
            NoiseKind::None => law,
            NoiseKind::Lognormal => law * (noise.sigma * rng.normal()).exp(),
        };
        records.push(ExperimentRecord::new(
            format!("{}-synth-{:03}", tag.key(), i),
            tag.clone(),
            n,
            d,
            val_loss,
            1.0,
        )?);
    }
    Ok(records)
}

/// Exhaustive minimization of `objective` over the lattice
/// `{c/resolution : c ∈ ℕ^k, Σc = resolution}`.
///
/// Supports `2 ≤ k ≤ 4` — the lattice grows as `resolution^(k-1)` and larger
/// `k` is outside what this oracle is for. Lattice points where the
/// objective is non-finite are skipped; ties resolve to the
/// lexicographically smallest proportion vector.
pub fn grid_search_simplex(
    mut objective: impl FnMut(&[f64]) -> f64,
    k: usize,
    resolution: usize,
) -> Result<(Vec<f64>, f64)> {
    if k < 2 {
        return Err(Error::Argument(format!(
            "simplex search needs at least 2 coordinates (got {k})"
        )));
    }
    if k > 4 {
        return Err(Error::Guard(format!(
            "simplex grid search supports at most 4 coordinates (got {k}); \
             the lattice size grows too fast beyond that"
        )));
    }
    if resolution == 0 {
        return Err(Error::Argument("grid resolution must be >= 1".into()));
    }

    let mut p = vec![0.0; k];
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut composition = vec![0usize; k];
    visit_compositions(&mut composition, 0, resolution, &mut |c| {
        for (slot, &count) in p.iter_mut().zip(c) {
            *slot = count as f64 / resolution as f64;
        }
        let value = objective(&p);
        if value.is_finite() {
            let better = match &best {
                Some((_, incumbent)) => value < *incumbent,
                None => true,
            };
            if better {
                best = Some((p.clone(), value));
            }
        }
    });

    best.ok_or_else(|| {
        Error::IllPosed("objective is non-finite at every lattice point".into())
    })
}

/// Visits all compositions of `total` into `c.len()` parts in ascending
/// lexicographic order.
fn visit_compositions(
    c: &mut Vec<usize>,
    idx: usize,
    remaining: usize,
    f: &mut impl FnMut(&[usize]),
) {
    if idx == c.len() - 1 {
        c[idx] = remaining;
        f(c);
        return;
    }
    for v in 0..=remaining {
        c[idx] = v;
        visit_compositions(c, idx + 1, remaining - v, f);
    }
}

/// Numerically locates the loss minimum on the fixed-compute frontier
/// `n · d = budget / flops_factor` by progressive grid refinement.
///
/// Three passes, each placing `points` log-spaced samples of `t` (where
/// `n = M^t`) and re-centering the next pass one step either side of the
/// incumbent, so the final resolution in `t` is `~4/points³` of the initial
/// `[0.02, 0.98]` span — a single coarse pass cannot certify the tight
/// relative tolerances the closed-form solver is checked against. Points
/// where the law overflows count as infinitely bad.
pub fn grid_search_frontier(
    params: &PowerLawParams,
    budget: f64,
    flops_factor: f64,
    points: usize,
) -> Result<OptimalSplit> {
    for (name, v) in [("budget", budget), ("flops_factor", flops_factor)] {
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::Validation(format!(
                "{name} must be a positive finite number (got {v})"
            )));
        }
    }
    if points < 3 {
        return Err(Error::Argument(format!(
            "frontier search needs at least 3 points per pass (got {points})"
        )));
    }
    let m = budget / flops_factor;
    if !m.is_finite() || m <= 0.0 {
        return Err(Error::Validation(format!(
            "token-parameter product budget must be positive and finite (got {m})"
        )));
    }
    let ln_m = m.ln();

    let (mut t_lo, mut t_hi) = (0.02, 0.98);
    let mut best: Option<(f64, f64)> = None; // (t, loss)
    for _pass in 0..3 {
        let step = (t_hi - t_lo) / (points - 1) as f64;
        for i in 0..points {
            let t = t_lo + i as f64 * step;
            let n = (t * ln_m).exp();
            let d = m / n;
            if !n.is_finite() || !d.is_finite() || n <= 0.0 || d <= 0.0 {
                continue;
            }
            if let Ok(loss) = params.evaluate(n, d) {
                let better = match best {
                    Some((_, incumbent)) => loss < incumbent,
                    None => true,
                };
                if better {
                    best = Some((t, loss));
                }
            }
        }
        let (t_best, _) = best.ok_or_else(|| {
            Error::IllPosed("law overflowed at every point of the frontier grid".into())
        })?;
        t_lo = (t_best - step).max(1e-3);
        t_hi = (t_best + step).min(1.0 - 1e-3);
    }

    let (t, loss) = best.expect("loop above errors when empty");
    let n = (t * ln_m).exp();
    Ok(OptimalSplit {
        n_params: n,
        d_tokens: m / n,
        predicted_loss: loss,
    })
}

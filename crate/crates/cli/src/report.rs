//! Rendering for the `report` subcommand: a markdown summary plus, per fit,
//! three CSV series (loss vs model size, loss vs tokens, iso-loss frontier
//! samples) each with a small static SVG line chart. Plots are emitted as
//! data so nothing here depends on a plotting stack.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use slk_core::fitting::rank_by_irreducible_loss;
use slk_core::model::{FitResult, LanguageTag, PowerLawParams, Tag};

use crate::artifact::{FitEntry, FitsArtifact};

const SAMPLES: usize = 64;
/// Window half-width per axis, in decades of the sampled coordinate.
const MAX_HALF_DECADES: f64 = 6.0;

/// One rendered sample track.
struct Series {
    /// File-name suffix, e.g. `loss_vs_n`.
    slug: &'static str,
    /// Human description used in the markdown index.
    caption: String,
    x_label: &'static str,
    points: Vec<(f64, f64)>,
}

/// Where the two power terms balance: solves `a·x^(-alpha) = level`.
/// Clamped to ±12 decades so downstream arithmetic stays representable.
fn balance_point(coeff: f64, alpha: f64, level: f64) -> Option<f64> {
    if coeff <= 0.0 || alpha <= 0.0 || level <= 0.0 {
        return None;
    }
    let ln_mid = ((coeff.ln() - level.ln()) / alpha).clamp(-27.631, 27.631);
    Some(ln_mid.exp())
}

/// Loss level the series are anchored at: the floor when the law has one,
/// otherwise a half-nat per term so pure power laws plot near loss ≈ 1.
fn anchor_level(params: &PowerLawParams) -> f64 {
    if params.l_inf > 0.0 {
        params.l_inf
    } else {
        0.5
    }
}

fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (ln_lo + (ln_hi - ln_lo) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Sweep one coordinate of the law, holding the other fixed.
fn sweep(
    params: &PowerLawParams,
    vary_n: bool,
    fixed: f64,
) -> Result<Vec<(f64, f64)>> {
    let (coeff, alpha) = if vary_n {
        (params.a, params.alpha_n)
    } else {
        (params.b, params.alpha_d)
    };
    let level = anchor_level(params);
    let xs = match balance_point(coeff, alpha, level) {
        Some(mid) => {
            let half = (2.0 / alpha).min(MAX_HALF_DECADES);
            let factor = 10f64.powf(half);
            log_spaced(mid / factor, mid * factor, SAMPLES)
        }
        // the axis is flat; any window shows the same constant
        None => log_spaced(1.0, 1e3, SAMPLES),
    };
    let mut points = Vec::with_capacity(xs.len());
    for &x in &xs {
        let loss = if vary_n {
            params.evaluate(x, fixed)?
        } else {
            params.evaluate(fixed, x)?
        };
        points.push((x, loss));
    }
    Ok(points)
}

/// Constant-loss `(n, d)` samples at the anchor loss `2·level + l_inf`,
/// parameterized by the share `u` of the non-floor budget spent on the
/// model-size term. Returns `None` when either power term is absent, since
/// a one-term law has no trade-off curve.
fn iso_loss_samples(params: &PowerLawParams) -> Option<(f64, Vec<(f64, f64)>)> {
    if params.a <= 0.0 || params.b <= 0.0 || params.alpha_n <= 0.0 || params.alpha_d <= 0.0 {
        return None;
    }
    let level = anchor_level(params);
    let budget = 2.0 * level;
    let target_loss = budget + params.l_inf;
    let mut points = Vec::with_capacity(SAMPLES);
    for u in log_spaced(0.99, 0.01, SAMPLES) {
        let n = balance_point(params.a, params.alpha_n, budget * u)?;
        let d = balance_point(params.b, params.alpha_d, budget * (1.0 - u))?;
        points.push((n, d));
    }
    Some((target_loss, points))
}

// ---------------------------------------------------------------------------
// svg
// ---------------------------------------------------------------------------

/// Y tick label: up to four decimals, trailing zeros trimmed.
fn tick_label(value: f64) -> String {
    let mut s = format!("{value:.4}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

/// Minimal static line chart: log-10 x axis, linear y axis, one polyline.
fn line_chart(title: &str, x_label: &str, y_label: &str, points: &[(f64, f64)]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const LEFT: f64 = 72.0;
    const RIGHT: f64 = 620.0;
    const TOP: f64 = 40.0;
    const BOTTOM: f64 = 350.0;

    let mut x_lo = f64::INFINITY;
    let mut x_hi = f64::NEG_INFINITY;
    let mut y_lo = f64::INFINITY;
    let mut y_hi = f64::NEG_INFINITY;
    for &(x, y) in points {
        let lx = x.log10();
        x_lo = x_lo.min(lx);
        x_hi = x_hi.max(lx);
        y_lo = y_lo.min(y);
        y_hi = y_hi.max(y);
    }
    if x_hi - x_lo < 1e-9 {
        x_lo -= 0.5;
        x_hi += 0.5;
    }
    if y_hi - y_lo < 1e-12 {
        let pad = y_hi.abs().max(1.0) * 0.05;
        y_lo -= pad;
        y_hi += pad;
    }
    let sx = |lx: f64| LEFT + (lx - x_lo) / (x_hi - x_lo) * (RIGHT - LEFT);
    let sy = |y: f64| BOTTOM - (y - y_lo) / (y_hi - y_lo) * (BOTTOM - TOP);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {W} {H}\" \
         font-family=\"monospace\" font-size=\"12\">"
    );
    let _ = writeln!(svg, "  <rect width=\"{W}\" height=\"{H}\" fill=\"#ffffff\"/>");
    let _ = writeln!(
        svg,
        "  <text x=\"{:.2}\" y=\"20\" text-anchor=\"middle\" fill=\"#333333\">{title}</text>",
        (LEFT + RIGHT) / 2.0
    );
    // axes
    let _ = writeln!(
        svg,
        "  <path d=\"M {LEFT} {TOP} L {LEFT} {BOTTOM} L {RIGHT} {BOTTOM}\" \
         fill=\"none\" stroke=\"#666666\"/>"
    );

    // x ticks at integer decades, thinned to at most eight labels
    let first = x_lo.ceil() as i64;
    let last = x_hi.floor() as i64;
    if first <= last {
        let step = (((last - first) as usize / 8) + 1) as i64;
        let mut k = first;
        while k <= last {
            let x = sx(k as f64);
            let _ = writeln!(
                svg,
                "  <line x1=\"{x:.2}\" y1=\"{BOTTOM}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#666666\"/>",
                BOTTOM + 5.0
            );
            let _ = writeln!(
                svg,
                "  <text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\" fill=\"#333333\">1e{k}</text>",
                BOTTOM + 20.0
            );
            k += step;
        }
    }
    // y ticks: five linear divisions
    for i in 0..=4 {
        let y = y_lo + (y_hi - y_lo) * i as f64 / 4.0;
        let py = sy(y);
        let _ = writeln!(
            svg,
            "  <line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{LEFT}\" y2=\"{py:.2}\" stroke=\"#666666\"/>",
            LEFT - 5.0
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" fill=\"#333333\">{}</text>",
            LEFT - 9.0,
            py + 4.0,
            tick_label(y)
        );
    }
    // axis labels
    let _ = writeln!(
        svg,
        "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" fill=\"#333333\">{x_label}</text>",
        (LEFT + RIGHT) / 2.0,
        BOTTOM + 40.0
    );
    let _ = writeln!(
        svg,
        "  <text x=\"{LEFT}\" y=\"{:.2}\" text-anchor=\"start\" fill=\"#333333\">{y_label}</text>",
        TOP - 8.0
    );

    let mut path = String::new();
    for &(x, y) in points {
        let _ = write!(path, "{:.2},{:.2} ", sx(x.log10()), sy(y));
    }
    let _ = writeln!(
        svg,
        "  <polyline points=\"{}\" fill=\"none\" stroke=\"#1f6feb\" stroke-width=\"1.5\"/>",
        path.trim_end()
    );
    let _ = writeln!(svg, "</svg>");
    svg
}

// ---------------------------------------------------------------------------
// assembly
// ---------------------------------------------------------------------------

fn series_for_entry(params: &PowerLawParams) -> Result<Vec<Series>> {
    let level = anchor_level(params);
    // fixed coordinates: the balanced point of the *other* axis, so each
    // sweep shows its own term bending into a comparable remainder
    let d_fixed = balance_point(params.b, params.alpha_d, level).unwrap_or(1.0);
    let n_fixed = balance_point(params.a, params.alpha_n, level).unwrap_or(1.0);

    let mut series = vec![
        Series {
            slug: "loss_vs_n",
            caption: format!("loss vs model size at d = {d_fixed} tokens"),
            x_label: "n_params",
            points: sweep(params, true, d_fixed)?,
        },
        Series {
            slug: "loss_vs_d",
            caption: format!("loss vs training tokens at n = {n_fixed} parameters"),
            x_label: "d_tokens",
            points: sweep(params, false, n_fixed)?,
        },
    ];
    if let Some((target_loss, points)) = iso_loss_samples(params) {
        series.push(Series {
            slug: "iso_loss",
            caption: format!("iso-loss frontier samples at loss = {target_loss}"),
            x_label: "n_params",
            points,
        });
    }
    Ok(series)
}

fn write_series_csv(path: &Path, series: &Series, params: &PowerLawParams, fixed: f64) -> Result<()> {
    let mut csv = String::from("n_params,d_tokens,loss\n");
    for &(x, y) in &series.points {
        match series.slug {
            "loss_vs_n" => {
                let _ = writeln!(csv, "{x},{fixed},{y}");
            }
            "loss_vs_d" => {
                let _ = writeln!(csv, "{fixed},{x},{y}");
            }
            // iso series: x is n, y is d, loss is the constant target
            _ => {
                let loss = params.evaluate(x, y)?;
                let _ = writeln!(csv, "{x},{y},{loss}");
            }
        }
    }
    std::fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn stats_cell(entry: &FitEntry, pick: impl Fn(&crate::artifact::FitStats) -> String) -> String {
    entry.stats.as_ref().map(&pick).unwrap_or_else(|| "-".into())
}

pub fn render(artifact: &FitsArtifact, rank_linf: bool, out: &Path) -> Result<Vec<PathBuf>> {
    let dir = out.parent().unwrap_or_else(|| Path::new(""));
    let stem = out
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("report")
        .to_string();
    let mut written = Vec::new();

    let mut md = String::new();
    let _ = writeln!(md, "# Two-term power-law fit report\n");
    let _ = writeln!(
        md,
        "Preset `{}`, grouped by `{}`, {} fit(s).",
        artifact.preset,
        artifact.group_by,
        artifact.fits.len()
    );
    if let Some(p) = &artifact.provenance {
        let _ = writeln!(
            md,
            "Input: `{}` ({} rows, sha256 `{}`).",
            p.path, p.rows, p.sha256
        );
    }
    let _ = writeln!(md);
    let _ = writeln!(
        md,
        "| tag | a | b | alpha_n | alpha_d | l_inf | rmse | r2 | points |"
    );
    let _ = writeln!(md, "|---|---|---|---|---|---|---|---|---|");
    for (key, entry) in &artifact.fits {
        let p = &entry.params;
        let _ = writeln!(
            md,
            "| {key} | {} | {} | {} | {} | {} | {} | {} | {} |",
            p.a,
            p.b,
            p.alpha_n,
            p.alpha_d,
            p.l_inf,
            stats_cell(entry, |s| format!("{:.3e}", s.rmse)),
            stats_cell(entry, |s| format!("{:.6}", s.r2)),
            stats_cell(entry, |s| s.n_points.to_string()),
        );
    }

    if rank_linf {
        let _ = writeln!(md, "\n## Irreducible-loss ranking\n");
        let mut language_fits: BTreeMap<LanguageTag, FitResult> = BTreeMap::new();
        for entry in artifact.fits.values() {
            if let Tag::Language(language) = &entry.tag {
                language_fits.insert(
                    language.clone(),
                    FitResult {
                        params: entry.params,
                        objective_value: entry
                            .stats
                            .as_ref()
                            .map(|s| s.objective_value)
                            .unwrap_or(0.0),
                        n_points: entry.stats.as_ref().map(|s| s.n_points).unwrap_or(0),
                        residuals: Vec::new(),
                        init_index: 0,
                        // entries without stats are published constants, not
                        // optimizer output; treat them as settled
                        converged: entry.stats.as_ref().map(|s| s.converged).unwrap_or(true),
                        log_scale: true,
                    },
                );
            }
        }
        if language_fits.is_empty() {
            let _ = writeln!(md, "No language-tagged fits to rank.");
        } else {
            let groups = rank_by_irreducible_loss(&language_fits)?;
            for (rank, group) in groups.iter().enumerate() {
                let members = group
                    .iter()
                    .map(|(language, l_inf)| format!("`{language}` (l_inf {l_inf})"))
                    .collect::<Vec<_>>()
                    .join(", ");
                let tie = if group.len() > 1 {
                    " — tied within 1e-4"
                } else {
                    ""
                };
                let _ = writeln!(md, "{}. {members}{tie}", rank + 1);
            }
        }
    }

    let _ = writeln!(md, "\n## Series\n");
    for (key, entry) in &artifact.fits {
        let params = &entry.params;
        let level = anchor_level(params);
        let d_fixed = balance_point(params.b, params.alpha_d, level).unwrap_or(1.0);
        let n_fixed = balance_point(params.a, params.alpha_n, level).unwrap_or(1.0);
        let series = series_for_entry(params)?;
        let _ = writeln!(md, "### {key}\n");
        if series.len() < 3 {
            let _ = writeln!(
                md,
                "iso-loss frontier omitted: a power term is absent, so the \
                 loss level fixes one coordinate outright.\n"
            );
        }
        for s in &series {
            let base = format!("{stem}_{key}_{}", s.slug);
            let csv_path = dir.join(format!("{base}.csv"));
            let fixed = if s.slug == "loss_vs_n" { d_fixed } else { n_fixed };
            write_series_csv(&csv_path, s, params, fixed)?;
            written.push(csv_path);

            let y_label = if s.slug == "iso_loss" { "d_tokens" } else { "loss" };
            let svg = line_chart(&format!("{key}: {}", s.slug), s.x_label, y_label, &s.points);
            let svg_path = dir.join(format!("{base}.svg"));
            std::fs::write(&svg_path, svg)
                .with_context(|| format!("writing {}", svg_path.display()))?;
            written.push(svg_path);

            let _ = writeln!(md, "- `{base}.csv` / `{base}.svg` — {}", s.caption);
        }
        let _ = writeln!(md);
    }

    std::fs::write(out, md).with_context(|| format!("writing {}", out.display()))?;
    written.insert(0, out.to_path_buf());
    Ok(written)
}

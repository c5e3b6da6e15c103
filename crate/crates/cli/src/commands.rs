//! Subcommand implementations.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use serde::Serialize;
use slk_core::allocate::{
    compute_optimal_split, optimize_proportions, whatif as evaluate_whatif, Constraints,
    OptimizeOptions,
};
use slk_core::fitting::{fit_chinchilla, fit_two_term, goodness_of_fit, FitConfig};
use slk_core::fixtures::{all_fixtures, load_fixture, Payload, Trust};
use slk_core::ingest::{
    group_by_tag, load_dataset, load_paired_runs, write_dataset, Format, Provenance,
};
use slk_core::model::{DirectionTag, LanguageTag, MixtureTemplate, PowerLawParams, Tag};
use slk_core::oracle::{generate_surface, reference_grid, Noise};
use slk_core::synergy::{compute_synergy, derive_transfer_coefficients, TauMode};
use slk_core::Error;

use crate::artifact::{
    artifact_ref, read_versioned, write_json, FitEntry, FitStats, FitsArtifact, PlanArtifact,
    SynergyArtifact, SCHEMA_VERSION,
};
use crate::{
    AllocateArgs, FitArgs, FixturesCommand, FormatArg, FrontierArgs, GridArg, GroupByArg,
    PredictArgs, PresetArg, ReportArgs, SynergyArgs, SynthArgs, TauArg, WhatifArgs,
};

fn resolve_format(flag: Option<FormatArg>, path: &Path) -> Result<Format> {
    match flag {
        Some(FormatArg::Csv) => Ok(Format::Csv),
        Some(FormatArg::Jsonl) => Ok(Format::Jsonl),
        None => Format::from_path(path).ok_or_else(|| {
            anyhow!(
                "cannot infer a format from {}; pass --format csv|jsonl",
                path.display()
            )
        }),
    }
}

/// Explicit flag, then `SLK_SEED`, then 42.
fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("SLK_SEED") {
        Ok(raw) => raw
            .trim()
            .parse()
            .with_context(|| format!("SLK_SEED must be an unsigned integer (got {raw:?})")),
        Err(std::env::VarError::NotPresent) => Ok(42),
        Err(err) => Err(err).context("reading SLK_SEED"),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

/// Picks the entry named by `tag`, or the only entry when `tag` is omitted.
fn resolve_tag<'a>(
    artifact: &'a FitsArtifact,
    tag: Option<&str>,
) -> Result<(String, &'a FitEntry)> {
    match tag {
        Some(t) => artifact
            .fits
            .get_key_value(t)
            .map(|(k, v)| (k.clone(), v))
            .ok_or_else(|| {
                Error::Lookup {
                    name: t.to_string(),
                    available: artifact.fits.keys().cloned().collect(),
                }
                .into()
            }),
        None => {
            if artifact.fits.len() == 1 {
                let (k, v) = artifact.fits.iter().next().expect("len checked");
                Ok((k.clone(), v))
            } else {
                Err(Error::Validation(format!(
                    "artifact holds {} fits; pass --tag (available: {})",
                    artifact.fits.len(),
                    artifact.fits.keys().cloned().collect::<Vec<_>>().join(", ")
                ))
                .into())
            }
        }
    }
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

pub fn fit(args: FitArgs) -> Result<()> {
    let format = resolve_format(args.format, &args.input)?;
    let dataset = load_dataset(&args.input, format)?;
    for warning in &dataset.warnings {
        eprintln!("warning: {warning}");
    }
    let groups = group_by_tag(&dataset.records);
    for tag in groups.keys() {
        let matches_request = match args.group_by {
            GroupByArg::Language => matches!(tag, Tag::Language(_)),
            GroupByArg::Direction => matches!(tag, Tag::Direction(_)),
        };
        if !matches_request {
            return Err(Error::Validation(format!(
                "--group-by {} was requested but the dataset contains rows tagged {}",
                match args.group_by {
                    GroupByArg::Language => "language",
                    GroupByArg::Direction => "direction",
                },
                tag.key()
            ))
            .into());
        }
    }

    let cfg = FitConfig::default();
    let mut fits = BTreeMap::new();
    for (tag, records) in &groups {
        let result = match args.preset {
            PresetArg::Chinchilla => fit_chinchilla(records, &cfg),
            PresetArg::Translation => fit_two_term(records, &cfg),
        }
        .with_context(|| format!("fitting {}", tag.key()))?;
        let (rmse, r2, max_abs_residual) = goodness_of_fit(&result, records)?;
        println!(
            "{}: a={} b={} alpha_n={} alpha_d={} l_inf={} ({} points, rmse {rmse:e})",
            tag.key(),
            result.params.a,
            result.params.b,
            result.params.alpha_n,
            result.params.alpha_d,
            result.params.l_inf,
            result.n_points,
        );
        fits.insert(
            tag.key(),
            FitEntry {
                tag: tag.clone(),
                params: result.params,
                stats: Some(FitStats {
                    objective_value: result.objective_value,
                    n_points: result.n_points,
                    init_index: result.init_index,
                    converged: result.converged,
                    log_scale: result.log_scale,
                    rmse,
                    r2,
                    max_abs_residual,
                }),
                source: None,
            },
        );
    }

    let artifact = FitsArtifact {
        schema_version: SCHEMA_VERSION,
        preset: match args.preset {
            PresetArg::Chinchilla => "chinchilla".into(),
            PresetArg::Translation => "translation".into(),
        },
        group_by: match args.group_by {
            GroupByArg::Language => "language".into(),
            GroupByArg::Direction => "direction".into(),
        },
        provenance: Some(dataset.provenance),
        fits,
    };
    write_json(&args.out, &artifact)?;
    eprintln!("wrote {}", args.out.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// predict
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct PredictOutput {
    schema_version: u32,
    tag: String,
    n_params: f64,
    d_tokens: f64,
    predicted_loss: f64,
    term_model_size: f64,
    term_data: f64,
    term_irreducible: f64,
}

pub fn predict(args: PredictArgs) -> Result<()> {
    let artifact: FitsArtifact = read_versioned(&args.fits)?;
    let (tag, entry) = resolve_tag(&artifact, args.tag.as_deref())?;
    let (term_model_size, term_data) = entry.params.terms(args.n, args.d)?;
    let predicted_loss = entry.params.evaluate(args.n, args.d)?;
    print_json(&PredictOutput {
        schema_version: SCHEMA_VERSION,
        tag,
        n_params: args.n,
        d_tokens: args.d,
        predicted_loss,
        term_model_size,
        term_data,
        term_irreducible: entry.params.l_inf,
    })
}

// ---------------------------------------------------------------------------
// synergy
// ---------------------------------------------------------------------------

pub fn synergy(args: SynergyArgs) -> Result<()> {
    let format = resolve_format(args.format, &args.pairs)?;
    let observations = load_paired_runs(&args.pairs, format)?;
    let mut matrix = compute_synergy(&observations)?;
    let mode = match args.tau {
        TauArg::Relative => TauMode::Relative,
        TauArg::Absolute => TauMode::Absolute,
    };
    let (tau, filled_cells) = derive_transfer_coefficients(&matrix, mode)?;
    matrix.tau = tau;

    let input_ref = artifact_ref(&args.pairs)?;
    let artifact = SynergyArtifact {
        schema_version: SCHEMA_VERSION,
        tau_mode: match args.tau {
            TauArg::Relative => "relative".into(),
            TauArg::Absolute => "absolute".into(),
        },
        matrix,
        filled_cells,
        provenance: Some(Provenance {
            path: input_ref.path,
            format,
            rows: observations.len(),
            sha256: input_ref.sha256,
        }),
    };
    write_json(&args.out, &artifact)?;
    eprintln!(
        "synergy matrix over {} languages -> {}",
        artifact.matrix.k(),
        args.out.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// allocate
// ---------------------------------------------------------------------------

/// Geometric mean per coefficient; zero if any language's value is zero.
fn shared_coefficients(params: &[PowerLawParams]) -> (f64, f64) {
    let geometric = |values: &mut dyn Iterator<Item = f64>| -> f64 {
        let mut sum = 0.0;
        let mut count = 0usize;
        for v in values {
            if v == 0.0 {
                return 0.0;
            }
            sum += v.ln();
            count += 1;
        }
        (sum / count as f64).exp()
    };
    (
        geometric(&mut params.iter().map(|p| p.a)),
        geometric(&mut params.iter().map(|p| p.b)),
    )
}

pub fn allocate(args: AllocateArgs) -> Result<()> {
    let fits_art: FitsArtifact = read_versioned(&args.fits)?;
    let tau_art: SynergyArtifact = read_versioned(&args.tau)?;

    let mut languages = Vec::new();
    let mut per_language = Vec::new();
    for (key, entry) in &fits_art.fits {
        match &entry.tag {
            Tag::Language(l) => {
                languages.push(l.clone());
                per_language.push(entry.params);
            }
            Tag::Direction(_) => eprintln!("warning: skipping direction-tagged fit {key}"),
        }
    }
    if languages.len() < 2 {
        return Err(Error::Validation(format!(
            "allocation needs at least two language fits (found {})",
            languages.len()
        ))
        .into());
    }

    let missing: Vec<String> = languages
        .iter()
        .filter(|l| tau_art.matrix.index_of(l).is_none())
        .map(|l| l.as_str().to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::Validation(format!(
            "synergy matrix lacks language(s): {}",
            missing.join(", ")
        ))
        .into());
    }

    let k = languages.len();
    let mut tau = vec![vec![0.0; k]; k];
    for (i, li) in languages.iter().enumerate() {
        let mi = tau_art.matrix.index_of(li).expect("checked above");
        for (j, lj) in languages.iter().enumerate() {
            if i != j {
                let mj = tau_art.matrix.index_of(lj).expect("checked above");
                tau[i][j] = tau_art.matrix.tau[mi][mj];
            }
        }
    }

    let (coeff_a, coeff_b) = shared_coefficients(&per_language);
    let template = MixtureTemplate::new(languages, args.gamma, per_language, tau)?;
    let constraints = match args.floor {
        Some(floor) => Constraints::with_floor(k, floor),
        None => Constraints::none(k),
    };
    let seed = resolve_seed(args.seed)?;
    let options = OptimizeOptions {
        seed,
        ..OptimizeOptions::default()
    };
    let plan = optimize_proportions(
        args.n,
        args.tokens,
        &template,
        coeff_a,
        coeff_b,
        &constraints,
        &options,
    )?;

    for (language, (proportion, tokens)) in plan
        .languages
        .iter()
        .zip(plan.proportions.iter().zip(&plan.token_counts))
    {
        println!("{language}: {proportion} ({tokens} tokens)");
    }
    println!(
        "predicted loss {} vs uniform {} (improvement {})",
        plan.predicted_loss, plan.uniform_loss, plan.improvement
    );

    let artifact = PlanArtifact {
        schema_version: SCHEMA_VERSION,
        plan,
        template,
        coeff_a,
        coeff_b,
        floor: args.floor,
        seed,
        starts: options.starts,
        fits_ref: Some(artifact_ref(&args.fits)?),
        tau_ref: Some(artifact_ref(&args.tau)?),
    };
    write_json(&args.out, &artifact)?;
    eprintln!("wrote {}", args.out.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// frontier
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct FrontierOutput {
    schema_version: u32,
    tag: String,
    compute_budget: f64,
    flops_factor: f64,
    n_params: f64,
    d_tokens: f64,
    predicted_loss: f64,
}

pub fn frontier(args: FrontierArgs) -> Result<()> {
    let artifact: FitsArtifact = read_versioned(&args.fits)?;
    let (tag, entry) = resolve_tag(&artifact, args.tag.as_deref())?;
    let split = compute_optimal_split(&entry.params, args.compute, args.flops_factor)?;
    print_json(&FrontierOutput {
        schema_version: SCHEMA_VERSION,
        tag,
        compute_budget: args.compute,
        flops_factor: args.flops_factor,
        n_params: split.n_params,
        d_tokens: split.d_tokens,
        predicted_loss: split.predicted_loss,
    })
}

// ---------------------------------------------------------------------------
// whatif
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct WhatIfOutput {
    schema_version: u32,
    languages: Vec<String>,
    proportions: Vec<f64>,
    predicted_loss: f64,
    term_model_size: f64,
    term_data: f64,
    term_irreducible: f64,
    effective_tokens: f64,
    uniform_loss: f64,
    delta_vs_uniform: f64,
    plan_predicted_loss: f64,
    delta_vs_plan: f64,
}

/// Applies `lang=prop` overrides, rescaling the untouched languages so the
/// proportions still sum to one.
fn apply_overrides(
    proportions: &mut [f64],
    template: &MixtureTemplate,
    set: &str,
) -> Result<()> {
    let mut assigned: BTreeMap<usize, f64> = BTreeMap::new();
    for piece in set.split(',') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        let (name, raw_value) = piece.split_once('=').ok_or_else(|| {
            Error::Validation(format!("--set entries look like lang=prop (got {piece:?})"))
        })?;
        let tag = LanguageTag::new(name)?;
        let index = template
            .languages
            .iter()
            .position(|l| l == &tag)
            .ok_or_else(|| Error::Lookup {
                name: tag.as_str().to_string(),
                available: template
                    .languages
                    .iter()
                    .map(|l| l.as_str().to_string())
                    .collect(),
            })?;
        let value: f64 = raw_value
            .trim()
            .parse()
            .with_context(|| format!("parsing proportion for {}", tag.as_str()))?;
        if !value.is_finite() || !(0.0..=1.0).contains(&value) {
            return Err(Error::Validation(format!(
                "proportion for {} must lie in [0, 1] (got {value})",
                tag.as_str()
            ))
            .into());
        }
        if assigned.insert(index, value).is_some() {
            return Err(
                Error::Conflict(format!("--set names {} twice", tag.as_str())).into(),
            );
        }
    }
    if assigned.is_empty() {
        return Ok(());
    }

    let set_sum: f64 = assigned.values().sum();
    if set_sum > 1.0 + 1e-12 {
        return Err(Error::Validation(format!(
            "set proportions sum to {set_sum} > 1"
        ))
        .into());
    }
    let rest: Vec<usize> = (0..proportions.len())
        .filter(|i| !assigned.contains_key(i))
        .collect();
    let rest_old: f64 = rest.iter().map(|&i| proportions[i]).sum();
    for (&i, &v) in &assigned {
        proportions[i] = v;
    }
    let remaining = 1.0 - set_sum;
    if rest.is_empty() {
        // full assignment: the simplex check downstream owns the verdict
        return Ok(());
    }
    if rest_old > 0.0 {
        let scale = remaining / rest_old;
        for &i in &rest {
            proportions[i] *= scale;
        }
    } else {
        let share = remaining / rest.len() as f64;
        for &i in &rest {
            proportions[i] = share;
        }
    }
    Ok(())
}

pub fn whatif(args: WhatifArgs) -> Result<()> {
    let artifact: PlanArtifact = read_versioned(&args.plan)?;
    let mut proportions = artifact.plan.proportions.clone();
    if let Some(set) = &args.set {
        apply_overrides(&mut proportions, &artifact.template, set)?;
    }
    let report = evaluate_whatif(
        &proportions,
        artifact.plan.budget.n_params,
        artifact.plan.budget.d_total_tokens,
        &artifact.template,
        artifact.coeff_a,
        artifact.coeff_b,
    )?;
    print_json(&WhatIfOutput {
        schema_version: SCHEMA_VERSION,
        languages: artifact
            .template
            .languages
            .iter()
            .map(|l| l.as_str().to_string())
            .collect(),
        proportions: report.proportions.clone(),
        predicted_loss: report.predicted_loss,
        term_model_size: report.term_model_size,
        term_data: report.term_data,
        term_irreducible: report.term_irreducible,
        effective_tokens: report.effective_tokens,
        uniform_loss: report.uniform_loss,
        delta_vs_uniform: report.delta_vs_uniform,
        plan_predicted_loss: artifact.plan.predicted_loss,
        delta_vs_plan: artifact.plan.predicted_loss - report.predicted_loss,
    })
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

fn parse_params(raw: &str) -> Result<PowerLawParams> {
    let trimmed = raw.trim();
    let text = if trimmed.starts_with('{') {
        trimmed.to_string()
    } else {
        std::fs::read_to_string(trimmed)
            .with_context(|| format!("reading parameter file {trimmed}"))?
    };
    serde_json::from_str(&text).context("parsing law parameters")
}

fn parse_list(raw: &str, flag: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for piece in raw.split(',') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        let value: f64 = piece
            .parse()
            .with_context(|| format!("parsing {flag} entry {piece:?}"))?;
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::Validation(format!(
                "{flag} entries must be positive finite numbers (got {value})"
            ))
            .into());
        }
        values.push(value);
    }
    if values.is_empty() {
        return Err(Error::Validation(format!("{flag} lists no values")).into());
    }
    Ok(values)
}

pub fn synth(args: SynthArgs) -> Result<()> {
    let params = parse_params(&args.params)?;
    let grid = match args.grid {
        GridArg::Paper => {
            if args.sizes.is_some() || args.budgets.is_some() {
                return Err(Error::Validation(
                    "--sizes/--budgets apply only with --grid custom".into(),
                )
                .into());
            }
            reference_grid()
        }
        GridArg::Custom => {
            let sizes = parse_list(
                args.sizes
                    .as_deref()
                    .ok_or_else(|| anyhow!("--grid custom needs --sizes"))?,
                "--sizes",
            )?;
            let budgets = parse_list(
                args.budgets
                    .as_deref()
                    .ok_or_else(|| anyhow!("--grid custom needs --budgets"))?,
                "--budgets",
            )?;
            let mut grid = Vec::with_capacity(sizes.len() * budgets.len());
            for &n in &sizes {
                for &d in &budgets {
                    grid.push((n, d));
                }
            }
            grid
        }
    };
    let seed = resolve_seed(args.seed)?;
    let noise = if args.noise == 0.0 {
        Noise::none()
    } else {
        Noise::lognormal(args.noise, seed)?
    };
    let tag = Tag::Language(LanguageTag::new(&args.tag)?);
    let records = generate_surface(&params, &grid, &noise, &tag)?;
    let format = Format::from_path(&args.out).unwrap_or(Format::Csv);
    write_dataset(&args.out, format, &records)?;
    eprintln!("wrote {} rows -> {}", records.len(), args.out.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

pub fn report(args: ReportArgs) -> Result<()> {
    let artifact: FitsArtifact = read_versioned(&args.fits)?;
    let written = crate::report::render(&artifact, args.rank_linf, &args.out)?;
    for path in &written {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// fixtures
// ---------------------------------------------------------------------------

fn payload_kind(payload: &Payload) -> &'static str {
    match payload {
        Payload::Law { .. } => "law",
        Payload::Exponents { .. } => "exponents",
        Payload::MixedGrid { .. } => "mixed-grid",
        Payload::PairLoss { .. } => "pair-loss",
    }
}

fn fixture_tag(name: &str) -> Result<Tag> {
    if let Some(rest) = name.strip_prefix("table2/") {
        let (src, dst) = rest.split_once('_').ok_or_else(|| {
            Error::Validation(format!("cannot derive a direction from fixture name {name:?}"))
        })?;
        Ok(Tag::Direction(DirectionTag::new(
            LanguageTag::new(src)?,
            LanguageTag::new(dst)?,
        )?))
    } else {
        Ok(Tag::Language(LanguageTag::new(name)?))
    }
}

fn export_fixture(name: &str, out: &Path) -> Result<()> {
    let fixture = load_fixture(name)?;
    match &fixture.payload {
        Payload::Law { params, .. } => {
            let tag = fixture_tag(name)?;
            let mut fits = BTreeMap::new();
            fits.insert(
                tag.key(),
                FitEntry {
                    tag,
                    params: *params,
                    stats: None,
                    source: Some(name.to_string()),
                },
            );
            write_json(
                out,
                &FitsArtifact {
                    schema_version: SCHEMA_VERSION,
                    preset: "fixture".into(),
                    group_by: "fixture".into(),
                    provenance: None,
                    fits,
                },
            )?;
        }
        Payload::PairLoss {
            target,
            auxiliary,
            mixed_loss,
            baseline_loss,
        } => {
            let mut csv = String::from("target,auxiliary,mixed_loss,baseline_loss\n");
            writeln!(csv, "{target},{auxiliary},{mixed_loss},{baseline_loss}")?;
            std::fs::write(out, csv)?;
        }
        Payload::MixedGrid {
            languages,
            baselines,
            percent_gain,
            ..
        } => {
            // the absolute cells contradict the published pair losses, so
            // pairs are reconstructed from the signed percentages instead
            let mut csv = String::from("target,auxiliary,mixed_loss,baseline_loss\n");
            for (i, target) in languages.iter().enumerate() {
                for (j, auxiliary) in languages.iter().enumerate() {
                    if i == j {
                        continue;
                    }
                    let mixed = baselines[i] * (1.0 - percent_gain[i][j] / 100.0);
                    writeln!(csv, "{target},{auxiliary},{mixed},{}", baselines[i])?;
                }
            }
            std::fs::write(out, csv)?;
        }
        Payload::Exponents { .. } => {
            return Err(Error::Validation(format!(
                "fixture {name} holds exponents without coefficients; nothing evaluable to export"
            ))
            .into());
        }
    }
    eprintln!("wrote {}", out.display());
    Ok(())
}

pub fn fixtures(command: FixturesCommand) -> Result<()> {
    match command {
        FixturesCommand::List => {
            for fixture in all_fixtures() {
                let trust = match fixture.trust {
                    Trust::Trusted => "trusted",
                    Trust::UntrustedSeeNotes => "untrusted-see-notes",
                };
                println!(
                    "{:<32} {:<20} {}",
                    fixture.name,
                    trust,
                    payload_kind(&fixture.payload)
                );
            }
            Ok(())
        }
        FixturesCommand::Show { name } => {
            let fixture = load_fixture(&name)?;
            print_json(&fixture)
        }
        FixturesCommand::Export { name, out } => export_fixture(&name, &out),
    }
}

//! Domain types shared by every other module, plus pure evaluation of the
//! two-term power law
//!
//! ```text
//! L(n, d) = a · n^(-alpha_n) + b · d^(-alpha_d) + l_inf
//! ```
//!
//! All types validate on construction; an instance that exists is usable.
//! Everything here is immutable and `Send + Sync`, so values can be shared
//! across worker threads freely.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound admitted for either scaling exponent. Published fits run up
/// to 6.404, so 10 leaves headroom while keeping `x^(-alpha)` representable
/// over any plausible range of `x`.
pub const ALPHA_MAX: f64 = 10.0;

/// Language identifiers the registry starts with.
pub const CANONICAL_LANGUAGES: [&str; 7] = [
    "python",
    "java",
    "javascript",
    "typescript",
    "csharp",
    "go",
    "rust",
];

// ---------------------------------------------------------------------------
// tags
// ---------------------------------------------------------------------------

/// Normalized language identifier.
///
/// Identifiers are lowercased and trimmed; `c#` is folded to `csharp` so CSV
/// exports using the display spelling resolve to the same tag.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct LanguageTag(String);

impl LanguageTag {
    pub fn new(raw: &str) -> Result<Self> {
        let mut id = raw.trim().to_lowercase();
        if id == "c#" {
            id = "csharp".to_string();
        }
        if id.is_empty() {
            return Err(Error::Validation("language tag must be non-empty".into()));
        }
        if !id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '+' | '.'))
        {
            return Err(Error::Validation(format!(
                "language tag {raw:?} contains characters outside [a-z0-9_+.-]"
            )));
        }
        Ok(LanguageTag(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl std::fmt::Display for LanguageTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for LanguageTag {
    type Error = Error;
    fn try_from(value: String) -> Result<Self> {
        LanguageTag::new(&value)
    }
}

impl From<LanguageTag> for String {
    fn from(tag: LanguageTag) -> String {
        tag.0
    }
}

/// Ordered translation direction between two distinct languages.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "DirectionTagRepr", into = "DirectionTagRepr")]
pub struct DirectionTag {
    source: LanguageTag,
    target: LanguageTag,
}

#[derive(Serialize, Deserialize)]
struct DirectionTagRepr {
    source: LanguageTag,
    target: LanguageTag,
}

impl DirectionTag {
    pub fn new(source: LanguageTag, target: LanguageTag) -> Result<Self> {
        if source == target {
            return Err(Error::Validation(format!(
                "direction source and target must differ (got {source} -> {source})"
            )));
        }
        Ok(DirectionTag { source, target })
    }

    pub fn source(&self) -> &LanguageTag {
        &self.source
    }

    pub fn target(&self) -> &LanguageTag {
        &self.target
    }
}

impl TryFrom<DirectionTagRepr> for DirectionTag {
    type Error = Error;
    fn try_from(repr: DirectionTagRepr) -> Result<Self> {
        DirectionTag::new(repr.source, repr.target)
    }
}

impl From<DirectionTag> for DirectionTagRepr {
    fn from(tag: DirectionTag) -> DirectionTagRepr {
        DirectionTagRepr {
            source: tag.source,
            target: tag.target,
        }
    }
}

impl std::fmt::Display for DirectionTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}->{}", self.source, self.target)
    }
}

/// Either a single language or a translation direction.
///
/// Serialized untagged: a language is a bare string, a direction an object
/// with `source`/`target` fields.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Tag {
    Language(LanguageTag),
    Direction(DirectionTag),
}

impl Tag {
    /// Stable string key used in artifact maps and `--tag` lookups:
    /// the language id, or `source_target` for directions.
    pub fn key(&self) -> String {
        match self {
            Tag::Language(l) => l.as_str().to_string(),
            Tag::Direction(d) => format!("{}_{}", d.source(), d.target()),
        }
    }

    /// Languages this tag touches, for registry validation.
    pub fn languages(&self) -> Vec<&LanguageTag> {
        match self {
            Tag::Language(l) => vec![l],
            Tag::Direction(d) => vec![d.source(), d.target()],
        }
    }
}

impl std::fmt::Display for Tag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tag::Language(l) => l.fmt(f),
            Tag::Direction(d) => d.fmt(f),
        }
    }
}

/// Set of language identifiers a dataset may reference.
///
/// Starts from the seven canonical languages and can grow; extension is
/// explicit so loaders can surface a warning when they widen it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Registry {
    tags: Vec<LanguageTag>,
}

impl Registry {
    pub fn canonical() -> Self {
        Registry {
            tags: CANONICAL_LANGUAGES
                .iter()
                .map(|s| LanguageTag::new(s).expect("canonical ids are valid"))
                .collect(),
        }
    }

    pub fn empty() -> Self {
        Registry { tags: Vec::new() }
    }

    pub fn contains(&self, tag: &LanguageTag) -> bool {
        self.tags.contains(tag)
    }

    /// Index in registration order, used for stable orderings.
    pub fn position(&self, tag: &LanguageTag) -> Option<usize> {
        self.tags.iter().position(|t| t == tag)
    }

    /// Registers `tag` if unknown; returns true when the registry grew.
    pub fn extend_with(&mut self, tag: LanguageTag) -> bool {
        if self.contains(&tag) {
            false
        } else {
            self.tags.push(tag);
            true
        }
    }

    pub fn tags(&self) -> &[LanguageTag] {
        &self.tags
    }
}

// ---------------------------------------------------------------------------
// experiment records
// ---------------------------------------------------------------------------

/// One training-run observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub run_id: String,
    pub tag: Tag,
    pub n_params: f64,
    pub d_tokens: f64,
    pub val_loss: f64,
    #[serde(default = "default_weight")]
    pub weight: f64,
}

fn default_weight() -> f64 {
    1.0
}

impl ExperimentRecord {
    pub fn new(
        run_id: impl Into<String>,
        tag: Tag,
        n_params: f64,
        d_tokens: f64,
        val_loss: f64,
        weight: f64,
    ) -> Result<Self> {
        let record = ExperimentRecord {
            run_id: run_id.into(),
            tag,
            n_params,
            d_tokens,
            val_loss,
            weight,
        };
        record.validate()?;
        Ok(record)
    }

    pub fn validate(&self) -> Result<()> {
        if self.run_id.trim().is_empty() {
            return Err(Error::Validation("run_id must be non-empty".into()));
        }
        for (name, v) in [
            ("n_params", self.n_params),
            ("d_tokens", self.d_tokens),
            ("val_loss", self.val_loss),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Validation(format!(
                    "run {:?}: {name} must be a positive finite number (got {v})",
                    self.run_id
                )));
            }
        }
        if !self.weight.is_finite() || self.weight < 0.0 {
            return Err(Error::Validation(format!(
                "run {:?}: weight must be finite and >= 0 (got {})",
                self.run_id, self.weight
            )));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// power-law parameters
// ---------------------------------------------------------------------------

/// The five-tuple of a fitted two-term power law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PowerLawParamsRepr", into = "PowerLawParamsRepr")]
pub struct PowerLawParams {
    pub a: f64,
    pub b: f64,
    pub alpha_n: f64,
    pub alpha_d: f64,
    pub l_inf: f64,
}

#[derive(Serialize, Deserialize, Clone, Copy)]
struct PowerLawParamsRepr {
    a: f64,
    b: f64,
    alpha_n: f64,
    alpha_d: f64,
    #[serde(default)]
    l_inf: f64,
}

impl TryFrom<PowerLawParamsRepr> for PowerLawParams {
    type Error = Error;
    fn try_from(r: PowerLawParamsRepr) -> Result<Self> {
        PowerLawParams::new(r.a, r.b, r.alpha_n, r.alpha_d, r.l_inf)
    }
}

impl From<PowerLawParams> for PowerLawParamsRepr {
    fn from(p: PowerLawParams) -> Self {
        PowerLawParamsRepr {
            a: p.a,
            b: p.b,
            alpha_n: p.alpha_n,
            alpha_d: p.alpha_d,
            l_inf: p.l_inf,
        }
    }
}

/// One power term, computed in log space so extreme arguments degrade to
/// underflow or a detectable overflow instead of silently rounding.
#[inline]
pub(crate) fn power_term(coeff: f64, alpha: f64, ln_x: f64) -> f64 {
    if coeff == 0.0 {
        0.0
    } else {
        (coeff.ln() - alpha * ln_x).exp()
    }
}

fn check_positive(name: &str, v: f64) -> Result<f64> {
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::Validation(format!(
            "{name} must be a positive finite number (got {v})"
        )));
    }
    Ok(v.ln())
}

impl PowerLawParams {
    pub fn new(a: f64, b: f64, alpha_n: f64, alpha_d: f64, l_inf: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b), ("l_inf", l_inf)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Validation(format!(
                    "{name} must be finite and >= 0 (got {v})"
                )));
            }
        }
        for (name, v) in [("alpha_n", alpha_n), ("alpha_d", alpha_d)] {
            if !v.is_finite() || !(0.0..=ALPHA_MAX).contains(&v) {
                return Err(Error::Validation(format!(
                    "{name} must lie in [0, {ALPHA_MAX}] (got {v})"
                )));
            }
        }
        Ok(PowerLawParams {
            a,
            b,
            alpha_n,
            alpha_d,
            l_inf,
        })
    }

    /// The two power terms at `(n, d)`, before the irreducible floor.
    pub fn terms(&self, n: f64, d: f64) -> Result<(f64, f64)> {
        let ln_n = check_positive("n", n)?;
        let ln_d = check_positive("d", d)?;
        let term_n = power_term(self.a, self.alpha_n, ln_n);
        if !term_n.is_finite() {
            return Err(Error::Domain(format!(
                "model-size term a·n^(-alpha_n) overflowed at n = {n}"
            )));
        }
        let term_d = power_term(self.b, self.alpha_d, ln_d);
        if !term_d.is_finite() {
            return Err(Error::Domain(format!(
                "data term b·d^(-alpha_d) overflowed at d = {d}"
            )));
        }
        Ok((term_n, term_d))
    }

    /// Predicted loss at `(n, d)`.
    ///
    /// Strictly greater than `l_inf` whenever `a > 0` or `b > 0`, up to
    /// floating-point underflow of the power terms at extreme arguments.
    pub fn evaluate(&self, n: f64, d: f64) -> Result<f64> {
        let (term_n, term_d) = self.terms(n, d)?;
        Ok(term_n + term_d + self.l_inf)
    }

    /// Analytic partial derivatives of [`Self::evaluate`] w.r.t. `n` and `d`.
    pub fn gradient(&self, n: f64, d: f64) -> Result<(f64, f64)> {
        let (term_n, term_d) = self.terms(n, d)?;
        Ok((
            -self.alpha_n * term_n / n,
            -self.alpha_d * term_d / d,
        ))
    }

    /// Rewrites `(a, b)` as critical scales: `n_c = a^(1/alpha_n)`,
    /// `d_c = b^(1/alpha_d)`, so the law reads
    /// `(n_c/n)^alpha_n + (d_c/d)^alpha_d + l_inf`.
    pub fn critical_form(&self) -> Result<CriticalForm> {
        if self.alpha_n == 0.0 || self.alpha_d == 0.0 {
            return Err(Error::Unrepresentable(
                "critical form requires both exponents to be non-zero".into(),
            ));
        }
        let root = |coeff: f64, alpha: f64| {
            if coeff == 0.0 {
                0.0
            } else {
                (coeff.ln() / alpha).exp()
            }
        };
        Ok(CriticalForm {
            n_c: root(self.a, self.alpha_n),
            d_c: root(self.b, self.alpha_d),
            alpha_n: self.alpha_n,
            alpha_d: self.alpha_d,
            l_inf: self.l_inf,
        })
    }
}

/// `(n_c, d_c)` form of the law; see [`PowerLawParams::critical_form`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalForm {
    pub n_c: f64,
    pub d_c: f64,
    pub alpha_n: f64,
    pub alpha_d: f64,
    pub l_inf: f64,
}

impl CriticalForm {
    /// Inverse of [`PowerLawParams::critical_form`]; round-trips within
    /// relative 1e-12.
    pub fn to_params(&self) -> Result<PowerLawParams> {
        let coeff = |scale: f64, alpha: f64| {
            if scale == 0.0 {
                0.0
            } else {
                (alpha * scale.ln()).exp()
            }
        };
        PowerLawParams::new(
            coeff(self.n_c, self.alpha_n),
            coeff(self.d_c, self.alpha_d),
            self.alpha_n,
            self.alpha_d,
            self.l_inf,
        )
    }
}

// ---------------------------------------------------------------------------
// fit results
// ---------------------------------------------------------------------------

/// Outcome of a multi-start fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: PowerLawParams,
    /// Final robust objective value; the minimum over all multi-start seeds.
    pub objective_value: f64,
    pub n_points: usize,
    /// Signed residuals, observed minus predicted, on the fit scale.
    pub residuals: Vec<f64>,
    /// Which multi-start seed produced the winning fit.
    pub init_index: usize,
    pub converged: bool,
    /// True when the fit minimized log-scale residuals.
    pub log_scale: bool,
}

impl FitResult {
    pub fn validate(&self) -> Result<()> {
        if self.residuals.len() != self.n_points {
            return Err(Error::Validation(format!(
                "fit result carries {} residuals for {} points",
                self.residuals.len(),
                self.n_points
            )));
        }
        if !self.objective_value.is_finite() || self.objective_value < 0.0 {
            return Err(Error::Validation(format!(
                "objective value must be finite and >= 0 (got {})",
                self.objective_value
            )));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// synergy matrix
// ---------------------------------------------------------------------------

/// K×K table of pairwise-mixture gains.
///
/// `delta[i][j]` is the improvement in target language `i`'s loss when its
/// repeated self-data is partially replaced by language `j`'s data
/// (positive = mixing helps). Cells with no observation are `None`, never
/// imputed. `tau` is the derived transfer-coefficient matrix with absent
/// cells zero-filled; see [`crate::synergy::derive_transfer_coefficients`]
/// for a variant that reports the fills.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynergyMatrix {
    pub languages: Vec<LanguageTag>,
    /// Self-repetition baseline loss per target language, where observed.
    pub baselines: Vec<Option<f64>>,
    pub delta: Vec<Vec<Option<f64>>>,
    /// `delta` normalized by the target's baseline loss.
    pub relative: Vec<Vec<Option<f64>>>,
    pub tau: Vec<Vec<f64>>,
}

impl SynergyMatrix {
    pub fn index_of(&self, tag: &LanguageTag) -> Option<usize> {
        self.languages.iter().position(|l| l == tag)
    }

    pub fn k(&self) -> usize {
        self.languages.len()
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.k();
        let square = |name: &str, m: usize| {
            if m != k {
                Err(Error::Validation(format!(
                    "synergy matrix field {name} has dimension {m}, expected {k}"
                )))
            } else {
                Ok(())
            }
        };
        square("baselines", self.baselines.len())?;
        square("delta", self.delta.len())?;
        square("relative", self.relative.len())?;
        square("tau", self.tau.len())?;
        for i in 0..k {
            square("delta row", self.delta[i].len())?;
            square("relative row", self.relative[i].len())?;
            square("tau row", self.tau[i].len())?;
            if self.delta[i][i] != Some(0.0) {
                return Err(Error::Validation(format!(
                    "delta diagonal must be exactly zero (row {i})"
                )));
            }
            if self.tau[i][i] != 0.0 {
                return Err(Error::Validation(format!(
                    "tau diagonal must be exactly zero (row {i})"
                )));
            }
            if let Some(baseline) = self.baselines[i] {
                if baseline > 0.0 {
                    for j in 0..k {
                        if let (Some(delta), Some(relative)) = (self.delta[i][j], self.relative[i][j]) {
                            let err = (relative * baseline - delta).abs();
                            if err > 1e-12 * delta.abs().max(1.0) {
                                return Err(Error::Validation(format!(
                                    "relative[{i}][{j}]·baseline disagrees with delta by {err:e}"
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// mixture specifications
// ---------------------------------------------------------------------------

/// Everything a proportion-dependent law needs except the proportions:
/// per-language exponents, the transfer matrix, and its strength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureTemplate {
    pub languages: Vec<LanguageTag>,
    pub gamma: f64,
    pub per_language_params: Vec<PowerLawParams>,
    pub tau: Vec<Vec<f64>>,
}

impl MixtureTemplate {
    pub fn new(
        languages: Vec<LanguageTag>,
        gamma: f64,
        per_language_params: Vec<PowerLawParams>,
        tau: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let template = MixtureTemplate {
            languages,
            gamma,
            per_language_params,
            tau,
        };
        template.validate()?;
        Ok(template)
    }

    pub fn k(&self) -> usize {
        self.languages.len()
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.languages.len();
        if k == 0 {
            return Err(Error::Validation("mixture needs at least one language".into()));
        }
        if !self.gamma.is_finite() || self.gamma < 0.0 {
            return Err(Error::Validation(format!(
                "gamma must be finite and >= 0 (got {})",
                self.gamma
            )));
        }
        if self.per_language_params.len() != k {
            return Err(Error::Validation(format!(
                "{} per-language parameter sets for {k} languages",
                self.per_language_params.len()
            )));
        }
        if self.tau.len() != k {
            return Err(Error::Validation(format!(
                "tau has {} rows for {k} languages",
                self.tau.len()
            )));
        }
        for (i, row) in self.tau.iter().enumerate() {
            if row.len() != k {
                return Err(Error::Validation(format!(
                    "tau row {i} has {} columns for {k} languages",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::Validation(format!("tau[{i}][{j}] is not finite")));
                }
            }
            if row[i] != 0.0 {
                return Err(Error::Validation(format!(
                    "tau diagonal must be exactly zero (row {i})"
                )));
            }
        }
        Ok(())
    }

    /// Binds a proportion vector, producing a full [`MixtureSpec`].
    pub fn with_proportions(&self, proportions: Vec<f64>) -> Result<MixtureSpec> {
        let spec = MixtureSpec {
            languages: self.languages.clone(),
            proportions,
            gamma: self.gamma,
            per_language_params: self.per_language_params.clone(),
            tau: self.tau.clone(),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Absolute tolerance on a proportion vector summing to one.
pub const SIMPLEX_SUM_TOL: f64 = 1e-9;

/// Checks `p` is a simplex vector: entries finite, non-negative, summing to
/// one within [`SIMPLEX_SUM_TOL`].
pub fn check_simplex(p: &[f64]) -> Result<()> {
    for (i, &v) in p.iter().enumerate() {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::Validation(format!(
                "proportion {i} must be finite and >= 0 (got {v})"
            )));
        }
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > SIMPLEX_SUM_TOL {
        return Err(Error::Validation(format!(
            "proportions must sum to 1 within {SIMPLEX_SUM_TOL:e} (got {sum})"
        )));
    }
    Ok(())
}

/// A proportion vector bound to its mixture context.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub languages: Vec<LanguageTag>,
    pub proportions: Vec<f64>,
    pub gamma: f64,
    pub per_language_params: Vec<PowerLawParams>,
    pub tau: Vec<Vec<f64>>,
}

impl MixtureSpec {
    pub fn k(&self) -> usize {
        self.languages.len()
    }

    pub fn template(&self) -> MixtureTemplate {
        MixtureTemplate {
            languages: self.languages.clone(),
            gamma: self.gamma,
            per_language_params: self.per_language_params.clone(),
            tau: self.tau.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.template().validate()?;
        if self.proportions.len() != self.languages.len() {
            return Err(Error::Validation(format!(
                "{} proportions for {} languages",
                self.proportions.len(),
                self.languages.len()
            )));
        }
        check_simplex(&self.proportions)
    }
}

// ---------------------------------------------------------------------------
// allocation plans
// ---------------------------------------------------------------------------

/// The fixed resources an allocation is optimized for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub n_params: f64,
    pub d_total_tokens: f64,
}

impl Budget {
    pub fn new(n_params: f64, d_total_tokens: f64) -> Result<Self> {
        for (name, v) in [("n_params", n_params), ("d_total_tokens", d_total_tokens)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Validation(format!(
                    "{name} must be a positive finite number (got {v})"
                )));
            }
        }
        Ok(Budget {
            n_params,
            d_total_tokens,
        })
    }
}

/// Optimized token allocation and its comparison against uniform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationPlan {
    pub languages: Vec<LanguageTag>,
    pub proportions: Vec<f64>,
    pub token_counts: Vec<f64>,
    pub predicted_loss: f64,
    /// Loss at the uniform allocation (projected into the constraint box
    /// when the exact uniform point is infeasible).
    pub uniform_loss: f64,
    /// `uniform_loss - predicted_loss`; non-negative because uniform is
    /// always seeded as a start point.
    pub improvement: f64,
    pub budget: Budget,
}

impl AllocationPlan {
    pub fn validate(&self) -> Result<()> {
        let k = self.languages.len();
        if self.proportions.len() != k || self.token_counts.len() != k {
            return Err(Error::Validation(
                "allocation plan fields disagree on language count".into(),
            ));
        }
        check_simplex(&self.proportions)?;
        let total: f64 = self.token_counts.iter().sum();
        let rel = (total - self.budget.d_total_tokens).abs() / self.budget.d_total_tokens;
        if rel > 1e-9 {
            return Err(Error::Validation(format!(
                "token counts sum to {total}, off budget by relative {rel:e}"
            )));
        }
        if self.predicted_loss > self.uniform_loss {
            return Err(Error::Validation(format!(
                "predicted loss {} exceeds uniform loss {}",
                self.predicted_loss, self.uniform_loss
            )));
        }
        Ok(())
    }
}

/// Compute-optimal operating point on a fixed-compute frontier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalSplit {
    pub n_params: f64,
    pub d_tokens: f64,
    pub predicted_loss: f64,
}

// ---------------------------------------------------------------------------

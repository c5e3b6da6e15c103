//! Cross-lingual synergy matrices from paired training runs.
//!
//! A paired run trains on one language's data mixed with an auxiliary
//! language and evaluates on the first. Comparing its loss against the
//! target's self-repetition baseline (training on the target alone at the
//! same budget) gives a signed transfer measurement: positive when the
//! auxiliary helped, negative when it crowded the target out.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{LanguageTag, SynergyMatrix, CANONICAL_LANGUAGES};

/// Agreement required between repeated baseline claims for one target.
const BASELINE_REL_TOL: f64 = 1e-9;

/// One paired run: trained on `target` mixed with `auxiliary`, evaluated on
/// `target`. `baseline_loss` is the target's self-repetition loss; it can be
/// attached to any observation of that target, and a run with
/// `target == auxiliary` *is* the baseline run, so its `mixed_loss` counts
/// as a baseline claim too.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairObservation {
    pub target: LanguageTag,
    pub auxiliary: LanguageTag,
    pub mixed_loss: f64,
    #[serde(default)]
    pub baseline_loss: Option<f64>,
}

impl PairObservation {
    pub fn new(
        target: LanguageTag,
        auxiliary: LanguageTag,
        mixed_loss: f64,
        baseline_loss: Option<f64>,
    ) -> Result<Self> {
        let obs = PairObservation {
            target,
            auxiliary,
            mixed_loss,
            baseline_loss,
        };
        obs.validate()?;
        Ok(obs)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mixed_loss.is_finite() || self.mixed_loss <= 0.0 {
            return Err(Error::Validation(format!(
                "mixed loss for {}+{} must be a positive finite number (got {})",
                self.target, self.auxiliary, self.mixed_loss
            )));
        }
        if let Some(baseline) = self.baseline_loss {
            if !baseline.is_finite() || baseline <= 0.0 {
                return Err(Error::Validation(format!(
                    "baseline loss for {} must be a positive finite number (got {baseline})",
                    self.target
                )));
            }
        }
        Ok(())
    }
}

/// How to read transfer coefficients off a synergy matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TauMode {
    /// Loss reduction as a fraction of the target baseline.
    Relative,
    /// Raw loss reduction.
    Absolute,
}

fn language_rank(tag: &LanguageTag) -> (usize, LanguageTag) {
    let pos = CANONICAL_LANGUAGES
        .iter()
        .position(|&c| c == tag.as_str())
        .unwrap_or(CANONICAL_LANGUAGES.len());
    (pos, tag.clone())
}

/// Builds the full synergy matrix from paired observations.
///
/// Row order is the canonical seven languages first, then anything else
/// alphabetically, so the output is independent of input order. Each
/// `(target, auxiliary)` pair may appear at most once; repeated baseline
/// claims for one target must agree to a relative 1e-9. Cells with no
/// observation stay absent rather than being silently zeroed; `tau` is the
/// relative matrix with those absences filled by zero.
pub fn compute_synergy(observations: &[PairObservation]) -> Result<SynergyMatrix> {
    if observations.is_empty() {
        return Err(Error::Argument(
            "synergy needs at least one paired observation".into(),
        ));
    }
    for obs in observations {
        obs.validate()?;
    }

    // stable language ordering
    let mut seen = BTreeSet::new();
    for obs in observations {
        seen.insert(obs.target.clone());
        seen.insert(obs.auxiliary.clone());
    }
    let mut languages: Vec<LanguageTag> = seen.into_iter().collect();
    languages.sort_by_key(language_rank);
    let index: BTreeMap<&LanguageTag, usize> =
        languages.iter().enumerate().map(|(i, l)| (l, i)).collect();
    let k = languages.len();

    // reconcile baseline claims; a diagonal run's mixed loss is one
    let mut baselines: Vec<Option<f64>> = vec![None; k];
    let mut claim = |i: usize, value: f64, languages: &[LanguageTag]| -> Result<()> {
        match baselines[i] {
            None => {
                baselines[i] = Some(value);
                Ok(())
            }
            Some(existing) => {
                if (value - existing).abs() > BASELINE_REL_TOL * existing.abs() {
                    Err(Error::Conflict(format!(
                        "inconsistent baselines for {}: {existing} vs {value}",
                        languages[i]
                    )))
                } else {
                    Ok(())
                }
            }
        }
    };
    for obs in observations {
        let i = index[&obs.target];
        if obs.target == obs.auxiliary {
            claim(i, obs.mixed_loss, &languages)?;
        }
        if let Some(baseline) = obs.baseline_loss {
            claim(i, baseline, &languages)?;
        }
    }

    // every observed target needs a baseline to difference against
    let mut missing: Vec<String> = Vec::new();
    for obs in observations {
        let i = index[&obs.target];
        if baselines[i].is_none() {
            let name = languages[i].to_string();
            if !missing.contains(&name) {
                missing.push(name);
            }
        }
    }
    if !missing.is_empty() {
        missing.sort();
        return Err(Error::IncompleteData { targets: missing });
    }

    let mut delta: Vec<Vec<Option<f64>>> = vec![vec![None; k]; k];
    let mut relative: Vec<Vec<Option<f64>>> = vec![vec![None; k]; k];
    for i in 0..k {
        delta[i][i] = Some(0.0);
        relative[i][i] = Some(0.0);
    }
    for obs in observations {
        let i = index[&obs.target];
        let j = index[&obs.auxiliary];
        if i == j {
            continue; // baseline run, already reconciled
        }
        if delta[i][j].is_some() {
            return Err(Error::Conflict(format!(
                "duplicate observation for target {} with auxiliary {}",
                obs.target, obs.auxiliary
            )));
        }
        let baseline = baselines[i].expect("checked above");
        let d = baseline - obs.mixed_loss;
        delta[i][j] = Some(d);
        relative[i][j] = Some(d / baseline);
    }

    let tau = relative
        .iter()
        .map(|row| row.iter().map(|cell| cell.unwrap_or(0.0)).collect())
        .collect();

    let matrix = SynergyMatrix {
        languages,
        baselines,
        delta,
        relative,
        tau,
    };
    matrix.validate()?;
    Ok(matrix)
}

/// Reads a dense transfer-coefficient matrix off `matrix`, zero-filling
/// absent cells. Returns the matrix together with the row-major positions
/// that were filled, so callers can tell measured zeros from absences.
pub fn derive_transfer_coefficients(
    matrix: &SynergyMatrix,
    mode: TauMode,
) -> Result<(Vec<Vec<f64>>, Vec<(usize, usize)>)> {
    matrix.validate()?;
    let source = match mode {
        TauMode::Relative => &matrix.relative,
        TauMode::Absolute => &matrix.delta,
    };
    let k = matrix.k();
    let mut tau = vec![vec![0.0; k]; k];
    let mut fills = Vec::new();
    for i in 0..k {
        for j in 0..k {
            match source[i][j] {
                Some(value) if i != j => tau[i][j] = value,
                Some(_) => {} // diagonal stays zero
                None => fills.push((i, j)),
            }
        }
    }
    Ok((tau, fills))
}

/// Pairs whose transfer changes sign depending on direction: `i` gains from
/// `j` while `j` loses from `i` (or one direction is exactly neutral).
/// Entries are `(i, j, delta[i][j], delta[j][i])` with `i < j`, sorted by
/// how far apart the two directions are.
pub fn asymmetry_report(matrix: &SynergyMatrix) -> Vec<(usize, usize, f64, f64)> {
    let k = matrix.k();
    let sign3 = |x: f64| -> i8 {
        if x > 0.0 {
            1
        } else if x < 0.0 {
            -1
        } else {
            0
        }
    };
    let mut report = Vec::new();
    for i in 0..k {
        for j in (i + 1)..k {
            if let (Some(fwd), Some(back)) = (matrix.delta[i][j], matrix.delta[j][i]) {
                if sign3(fwd) != sign3(back) {
                    report.push((i, j, fwd, back));
                }
            }
        }
    }
    report.sort_by(|a, b| {
        let gap_a = (a.2 - a.3).abs();
        let gap_b = (b.2 - b.3).abs();
        gap_b
            .partial_cmp(&gap_a)
            .unwrap()
            .then(a.0.cmp(&b.0))
            .then(a.1.cmp(&b.1))
    });
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lang(s: &str) -> LanguageTag {
        LanguageTag::new(s).unwrap()
    }

    fn obs(target: &str, auxiliary: &str, mixed: f64, baseline: Option<f64>) -> PairObservation {
        PairObservation::new(lang(target), lang(auxiliary), mixed, baseline).unwrap()
    }

    #[test]
    fn java_csharp_pairing_reproduces_published_gain() {
        let m = compute_synergy(&[obs("java", "csharp", 0.718, Some(0.903))]).unwrap();
        let i = m.index_of(&lang("java")).unwrap();
        let j = m.index_of(&lang("csharp")).unwrap();
        let delta = m.delta[i][j].unwrap();
        assert!((delta - 0.185).abs() < 1e-12);
        let relative = m.relative[i][j].unwrap();
        assert!((relative - 0.20487264673311184).abs() < 1e-15);
        assert_eq!(m.delta[i][i], Some(0.0));
        assert_eq!(m.baselines[i], Some(0.903));
        assert_eq!(m.baselines[j], None);
    }

    #[test]
    fn negative_transfer_is_preserved_signed() {
        // python degrades when diluted with rust
        let m = compute_synergy(&[obs("python", "rust", 0.7738, Some(0.7528))]).unwrap();
        let i = m.index_of(&lang("python")).unwrap();
        let j = m.index_of(&lang("rust")).unwrap();
        let delta = m.delta[i][j].unwrap();
        assert!((delta + 0.021).abs() < 1e-12);
        assert!(m.relative[i][j].unwrap() < 0.0);
        // absent cells stay absent, never zero
        assert_eq!(m.delta[j][i], None);
        assert_eq!(m.relative[j][i], None);
        assert_eq!(m.tau[j][i], 0.0);
    }

    #[test]
    fn languages_order_is_canonical_then_alphabetical() {
        let m = compute_synergy(&[
            obs("zig", "go", 0.5, Some(0.6)),
            obs("rust", "ada", 0.4, Some(0.5)),
            obs("python", "java", 0.7, Some(0.75)),
        ])
        .unwrap();
        let names: Vec<&str> = m.languages.iter().map(|l| l.as_str()).collect();
        assert_eq!(names, vec!["python", "java", "go", "rust", "ada", "zig"]);
    }

    #[test]
    fn input_order_does_not_change_the_matrix() {
        let a = vec![
            obs("java", "csharp", 0.718, Some(0.903)),
            obs("csharp", "java", 0.3331, Some(0.3395)),
            obs("java", "python", 0.8490, Some(0.903)),
        ];
        let mut b = a.clone();
        b.reverse();
        let ma = compute_synergy(&a).unwrap();
        let mb = compute_synergy(&b).unwrap();
        assert_eq!(ma, mb);
    }

    #[test]
    fn diagonal_observation_supplies_the_baseline() {
        let m = compute_synergy(&[
            obs("go", "go", 0.4211, None),
            obs("go", "python", 0.4121, None),
        ])
        .unwrap();
        let i = m.index_of(&lang("go")).unwrap();
        let j = m.index_of(&lang("python")).unwrap();
        assert_eq!(m.baselines[i], Some(0.4211));
        let delta = m.delta[i][j].unwrap();
        assert!((delta - 0.009).abs() < 1e-12);
    }

    #[test]
    fn diagonal_mixed_must_match_claimed_baseline() {
        let err = compute_synergy(&[obs("go", "go", 0.5, Some(0.42))]).unwrap_err();
        assert!(matches!(err, Error::Conflict(_)));
    }

    #[test]
    fn inconsistent_baselines_conflict() {
        let err = compute_synergy(&[
            obs("java", "csharp", 0.718, Some(0.903)),
            obs("java", "python", 0.8490, Some(0.904)),
        ])
        .unwrap_err();
        assert!(matches!(err, Error::Conflict(_)));
        let msg = err.to_string();
        assert!(msg.contains("java"), "{msg}");
    }

    #[test]
    fn nearly_equal_baselines_are_reconciled() {
        let m = compute_synergy(&[
            obs("java", "csharp", 0.718, Some(0.903)),
            obs("java", "python", 0.8490, Some(0.903 * (1.0 + 1e-12))),
        ])
        .unwrap();
        let i = m.index_of(&lang("java")).unwrap();
        assert_eq!(m.baselines[i], Some(0.903));
    }

    #[test]
    fn duplicate_pairs_conflict() {
        let err = compute_synergy(&[
            obs("java", "csharp", 0.718, Some(0.903)),
            obs("java", "csharp", 0.719, None),
        ])
        .unwrap_err();
        assert!(matches!(err, Error::Conflict(_)));
    }

    #[test]
    fn missing_baselines_are_reported_together() {
        let err = compute_synergy(&[
            obs("java", "csharp", 0.718, None),
            obs("rust", "go", 0.3788, None),
            obs("python", "java", 0.76, Some(0.7528)),
        ])
        .unwrap_err();
        match err {
            Error::IncompleteData { targets } => {
                assert_eq!(targets, vec!["java".to_string(), "rust".to_string()]);
            }
            other => panic!("expected IncompleteData, got {other:?}"),
        }
    }

    #[test]
    fn transfer_coefficients_track_fills() {
        let m = compute_synergy(&[
            obs("java", "csharp", 0.718, Some(0.903)),
            obs("csharp", "java", 0.3331, Some(0.3395)),
        ])
        .unwrap();
        let (tau, fills) = derive_transfer_coefficients(&m, TauMode::Relative).unwrap();
        assert_eq!(tau, m.tau);
        assert!(fills.is_empty());

        let (abs, _) = derive_transfer_coefficients(&m, TauMode::Absolute).unwrap();
        let i = m.index_of(&lang("java")).unwrap();
        let j = m.index_of(&lang("csharp")).unwrap();
        assert_eq!(abs[i][j], m.delta[i][j].unwrap());
        assert_eq!(abs[i][i], 0.0);

        let sparse = compute_synergy(&[obs("java", "csharp", 0.718, Some(0.903))]).unwrap();
        let (tau, fills) = derive_transfer_coefficients(&sparse, TauMode::Relative).unwrap();
        assert_eq!(fills, vec![(1, 0)]);
        assert_eq!(tau[1][0], 0.0);
    }

    #[test]
    fn asymmetry_report_finds_sign_flips_sorted_by_gap() {
        // java gains a lot from python; python slightly loses from java — no,
        // python slightly GAINS from java, so that pair is symmetric in sign.
        // python loses from go and rust while both gain from python.
        let m = compute_synergy(&[
            obs("python", "go", 0.7613 + 0.016, Some(0.7613)),
            obs("go", "python", 0.4211 - 0.0201, Some(0.4211)),
            obs("python", "rust", 0.7613 + 0.021, Some(0.7613)),
            obs("rust", "python", 0.3843 - 0.0147, Some(0.3843)),
            obs("python", "java", 0.7613 - 0.010, Some(0.7613)),
            obs("java", "python", 0.7942 - 0.054, Some(0.7942)),
        ])
        .unwrap();
        let report = asymmetry_report(&m);
        assert_eq!(report.len(), 2);
        let p = m.index_of(&lang("python")).unwrap();
        let g = m.index_of(&lang("go")).unwrap();
        let r = m.index_of(&lang("rust")).unwrap();
        // python-rust gap 0.0357 beats python-go gap 0.0361? compute:
        // |(-0.016) - 0.0201| = 0.0361, |(-0.021) - 0.0147| = 0.0357
        assert_eq!((report[0].0, report[0].1), (p, g));
        assert_eq!((report[1].0, report[1].1), (p, r));
        assert!(report[0].2 < 0.0 && report[0].3 > 0.0);
    }

    #[test]
    fn rejects_empty_and_nonpositive_inputs() {
        assert!(matches!(compute_synergy(&[]), Err(Error::Argument(_))));
        assert!(PairObservation::new(lang("a"), lang("b"), 0.0, None).is_err());
        assert!(PairObservation::new(lang("a"), lang("b"), 0.5, Some(-1.0)).is_err());
        assert!(PairObservation::new(lang("a"), lang("b"), f64::NAN, None).is_err());
    }

    proptest! {
        #[test]
        fn synergy_matrix_always_validates(
            mixed in proptest::collection::vec(0.05f64..2.0, 6),
            baselines in proptest::collection::vec(0.05f64..2.0, 3),
        ) {
            let names = ["python", "java", "rust"];
            let mut observations = Vec::new();
            let mut idx = 0;
            for (i, target) in names.iter().enumerate() {
                for auxiliary in names.iter() {
                    if target == auxiliary {
                        continue;
                    }
                    observations.push(obs(
                        target,
                        auxiliary,
                        mixed[idx],
                        Some(baselines[i]),
                    ));
                    idx += 1;
                }
            }
            let m = compute_synergy(&observations).unwrap();
            prop_assert!(m.validate().is_ok());
            // delta and relative agree in sign everywhere
            for i in 0..3 {
                for j in 0..3 {
                    let d = m.delta[i][j].unwrap();
                    let r = m.relative[i][j].unwrap();
                    prop_assert!(d.signum() == r.signum() || d == 0.0);
                }
            }
        }

        #[test]
        fn shuffling_observations_is_invariant(seed in 0u64..1000) {
            use crate::rng::Rng;
            let mut observations = vec![
                obs("java", "csharp", 0.718, Some(0.903)),
                obs("csharp", "java", 0.3331, Some(0.3395)),
                obs("java", "python", 0.8490, Some(0.903)),
                obs("python", "java", 0.76, Some(0.7528)),
                obs("go", "go", 0.4211, None),
                obs("go", "rust", 0.42, None),
            ];
            let reference = compute_synergy(&observations).unwrap();
            // Fisher-Yates with the crate generator
            let mut rng = Rng::seed_from_u64(seed);
            for i in (1..observations.len()).rev() {
                let j = (rng.next_u64() % (i as u64 + 1)) as usize;
                observations.swap(i, j);
            }
            let shuffled = compute_synergy(&observations).unwrap();
            prop_assert_eq!(reference, shuffled);
        }
    }
}

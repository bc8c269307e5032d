//! Report-producing stages that run on extracted matrices.

use super::report::{opt, pct, Report, Table};
use super::{labels_for, load_matrix, load_records, output_error, MatrixKey, PipelineConfig, PipelineError};
use crate::corpus::{ClinicalRecord, ClinicalScore, FeatureMatrix};
use crate::model::ClassMetrics;
use crate::screening::{feature_group, partial_spearman, screen_matrix, PartialCorrRow, ScreeningRow};
use crate::selection::{evaluate_with_selection, select_features, Placement, SelectionResult};
use indexmap::IndexMap;
use rayon::prelude::*;

fn stage_report(cfg: &PipelineConfig, name: &str, title: &str) -> Report {
    Report::new(name, title, &cfg.hash()).meta("seed", cfg.seed)
}

/// Feature name without its `<vowel> (<style>): ` prefix.
fn short_name(name: &str) -> &str {
    name.split_once(": ").map_or(name, |(_, rest)| rest)
}

fn with_labels(cfg: &PipelineConfig, key: MatrixKey) -> Result<(FeatureMatrix, Vec<bool>), PipelineError> {
    let records = load_records(cfg)?;
    let m = load_matrix(cfg, key)?;
    let labels = labels_for(&m, &records)?;
    if m.n_features() == 0 {
        return Err(PipelineError::Data(format!("matrix {} has no features", key.label())));
    }
    Ok((m, labels))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScreenOutcome {
    pub rows: Vec<ScreeningRow>,
    pub report: Report,
}

/// Univariate statistics of every feature in the overall matrix, with one
/// winner per vowel-style group.
///
/// The text report lists the winners; the TSV lists every feature.
pub fn screen(cfg: &PipelineConfig) -> Result<ScreenOutcome, PipelineError> {
    cfg.validate()?;
    let (m, labels) = with_labels(cfg, MatrixKey::All)?;
    let rows = screen_matrix(&m, &labels, &cfg.screening)?;

    let metric_cells = |r: &ScreeningRow| -> Vec<String> {
        let m = r.metrics.as_ref();
        vec![
            opt(m.map(|m| m.acc), pct),
            opt(m.map(|m| m.sen), pct),
            opt(m.map(|m| m.spe), pct),
            opt(m.map(|m| m.tss), |t| format!("{t:.2}")),
        ]
    };
    let mut winners = Table::new(["Vowel", "Feature", "rho", "MI", "p", "ACC [%]", "SEN [%]", "SPE [%]", "TSS"]);
    for r in rows.iter().filter(|r| r.winner) {
        let mut row = vec![
            feature_group(&r.feature_name).to_string(),
            short_name(&r.feature_name).to_string(),
            opt(r.rho, |v| format!("{v:.4}")),
            opt(r.mi, |v| format!("{v:.4}")),
            opt(r.p_value, |v| format!("{v:.4}")),
        ];
        row.extend(metric_cells(r));
        winners.push(row);
    }
    let mut all = Table::new(["Vowel", "Feature", "rho", "MI", "p", "ACC [%]", "SEN [%]", "SPE [%]", "TSS", "Winner"]);
    for r in &rows {
        let m = r.metrics.as_ref();
        all.push(vec![
            feature_group(&r.feature_name).to_string(),
            short_name(&r.feature_name).to_string(),
            opt(r.rho, |v| format!("{v:.6}")),
            opt(r.mi, |v| format!("{v:.6}")),
            opt(r.p_value, |v| format!("{v:.6e}")),
            opt(m.map(|m| m.acc), |v| format!("{:.4}", 100.0 * v)),
            opt(m.map(|m| m.sen), |v| format!("{:.4}", 100.0 * v)),
            opt(m.map(|m| m.spe), |v| format!("{:.4}", 100.0 * v)),
            opt(m.map(|m| m.tss), |v| format!("{v:.6}")),
            if r.winner { "yes" } else { "" }.to_string(),
        ]);
    }
    let candidates = match cfg.screening.winner_candidates {
        0 => "every feature".to_string(),
        k => format!("the {k} smallest-p features"),
    };
    let mut report = stage_report(cfg, "screen", "Individual feature screening")
        .meta("subjects", m.n_rows())
        .meta("features", m.n_features())
        .meta(
            "winner_rule",
            format!("highest single-feature leave-one-out TSS among {candidates} of each group"),
        )
        .meta("p", "two-sided Mann-Whitney U")
        .meta("mi", "equal-frequency bins, Miller-Madow correction, bits");
    report.table = winners;
    report.tsv = Some(all);
    report.write(&cfg.reports_dir())?;
    Ok(ScreenOutcome { rows, report })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionRow {
    pub label: String,
    pub result: SelectionResult,
}

fn trace_text(trace: &[f64]) -> String {
    trace.iter().map(|t| format!("{t:.4}")).collect::<Vec<_>>().join(", ")
}

/// mRMR and SFFS on every matrix of the configured scenario, using all
/// subjects.
pub fn select(cfg: &PipelineConfig) -> Result<(Vec<SelectionRow>, Report), PipelineError> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for key in cfg.scenario.matrices() {
        let (m, labels) = with_labels(cfg, key)?;
        log::info!("selecting features for {}", key.label());
        let result = select_features(&m, &labels, &cfg.selection)?;
        rows.push(SelectionRow {
            label: key.label(),
            result,
        });
    }
    let mut table = Table::new(["Vowels", "mRMR", "No.", "Criterion"]);
    let mut tsv = Table::new(["Vowels", "mRMR", "No.", "Criterion", "Trace", "Selected"]);
    let mut lines = Vec::new();
    for r in &rows {
        let (filtered, size) = r.result.stage_sizes;
        table.push(vec![r.label.clone(), filtered.to_string(), size.to_string(), format!("{:.4}", r.result.score)]);
        tsv.push(vec![
            r.label.clone(),
            filtered.to_string(),
            size.to_string(),
            format!("{:.6}", r.result.score),
            trace_text(&r.result.criterion_trace),
            r.result.chosen.join("; "),
        ]);
        lines.push(format!("{}: {}", r.label, r.result.chosen.join("; ")));
        lines.push(format!("{} trace: {}", r.label, trace_text(&r.result.criterion_trace)));
    }
    let mut report = stage_report(cfg, "select", "Feature selection")
        .meta("scenario", cfg.scenario)
        .meta("criterion", format!("{:?}", cfg.selection.criterion).to_uppercase())
        .meta("mrmr_k", cfg.selection.k)
        .meta("max_size", cfg.selection.max_size)
        .meta("wrapper_trees", cfg.selection.wrapper_forest.n_trees);
    report.table = table;
    report.tsv = Some(tsv);
    report.sections.push(("Selected features".into(), lines));
    report.write(&cfg.reports_dir())?;
    Ok((rows, report))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationRow {
    pub label: String,
    pub placement: Placement,
    pub metrics: ClassMetrics,
    /// The selected subset (paper placement) or the features chosen in more
    /// than half of the folds (nested placement), in decreasing fold count.
    pub selected: Vec<String>,
    /// Subset sizes of every selection run: one run, or one per fold.
    pub fold_sizes: Vec<usize>,
}

/// Features chosen in more than half of `selections`, most frequent first,
/// then by first appearance.
pub fn majority_features(selections: &[SelectionResult]) -> Vec<String> {
    let mut counts: IndexMap<&str, usize> = IndexMap::new();
    for s in selections {
        for name in &s.chosen {
            *counts.entry(name.as_str()).or_default() += 1;
        }
    }
    let mut kept: Vec<(usize, usize, &str)> = counts
        .iter()
        .enumerate()
        .filter(|(_, (_, &c))| 2 * c > selections.len())
        .map(|(order, (&name, &c))| (c, order, name))
        .collect();
    kept.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    kept.into_iter().map(|(_, _, n)| n.to_string()).collect()
}

/// Leave-one-out random-forest metrics for every matrix of the scenario,
/// with selection placed as configured.
pub fn classify(cfg: &PipelineConfig) -> Result<(Vec<ClassificationRow>, Report), PipelineError> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for key in cfg.scenario.matrices() {
        let (m, labels) = with_labels(cfg, key)?;
        log::info!("classifying {} ({} placement)", key.label(), cfg.placement);
        let outcome = evaluate_with_selection(&m, &labels, &cfg.selection, &cfg.forest, cfg.placement)?;
        let selected = match cfg.placement {
            Placement::Paper => outcome.selections[0].chosen.clone(),
            Placement::Nested => majority_features(&outcome.selections),
        };
        rows.push(ClassificationRow {
            label: key.label(),
            placement: cfg.placement,
            metrics: outcome.metrics,
            selected,
            fold_sizes: outcome.selections.iter().map(|s| s.chosen.len()).collect(),
        });
    }
    let mut table = Table::new(["Vowels", "ACC [%]", "SEN [%]", "SPE [%]", "TSS", "No."]);
    let mut tsv = Table::new(["Vowels", "ACC [%]", "SEN [%]", "SPE [%]", "TSS", "No.", "TP", "FN", "TN", "FP", "Selected"]);
    let mut lines = Vec::new();
    for r in &rows {
        let mt = &r.metrics;
        table.push(vec![
            r.label.clone(),
            pct(mt.acc),
            pct(mt.sen),
            pct(mt.spe),
            format!("{:.2}", mt.tss),
            r.selected.len().to_string(),
        ]);
        let c = &mt.confusion;
        tsv.push(vec![
            r.label.clone(),
            format!("{:.4}", 100.0 * mt.acc),
            format!("{:.4}", 100.0 * mt.sen),
            format!("{:.4}", 100.0 * mt.spe),
            format!("{:.6}", mt.tss),
            r.selected.len().to_string(),
            c.tp.to_string(),
            c.fn_.to_string(),
            c.tn.to_string(),
            c.fp.to_string(),
            r.selected.join("; "),
        ]);
        lines.push(format!("{}: {}", r.label, r.selected.join("; ")));
    }
    let mut report = stage_report(cfg, "classify", "Classification results")
        .meta("scenario", cfg.scenario)
        .meta("placement", cfg.placement)
        .meta("validation", "leave-one-out, pooled predictions, positive class PD")
        .meta("forest_trees", cfg.forest.n_trees)
        .meta("mrmr_k", cfg.selection.k)
        .meta("max_size", cfg.selection.max_size);
    if cfg.placement == Placement::Nested {
        report = report.meta("no_column", "features selected in more than half of the folds");
        for r in &rows {
            let sizes: Vec<String> = r.fold_sizes.iter().map(usize::to_string).collect();
            lines.push(format!("{} fold subset sizes: {}", r.label, sizes.join(" ")));
        }
    }
    report.table = table;
    report.tsv = Some(tsv);
    report.sections.push(("Selected features".into(), lines));
    report.write(&cfg.reports_dir())?;
    Ok((rows, report))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationOutcome {
    pub rows: Vec<PartialCorrRow>,
    pub report: Report,
}

/// Covariates partialled out of every clinical correlation.
const COVARIATES: &str = "age, LED";

/// For each clinical score, the feature of the overall matrix with the
/// largest |partial Spearman ρ| over PD subjects, with age and LED removed.
///
/// `targets = None` reports every score in [`ClinicalScore::ALL`] order and
/// skips scores that no PD subject has. An explicitly requested score that
/// no PD subject has is an error.
pub fn correlate(cfg: &PipelineConfig, targets: Option<&[ClinicalScore]>) -> Result<CorrelationOutcome, PipelineError> {
    cfg.validate()?;
    let records = load_records(cfg)?;
    let m = load_matrix(cfg, MatrixKey::All)?;
    let by_id: IndexMap<&str, &ClinicalRecord> = records.iter().map(|r| (r.speaker_id.as_str(), r)).collect();
    let pd_rows: Vec<(usize, &ClinicalRecord)> = m
        .speaker_ids
        .iter()
        .enumerate()
        .filter_map(|(i, id)| by_id.get(id.as_str()).filter(|r| r.is_pd()).map(|&r| (i, r)))
        .collect();
    if pd_rows.is_empty() {
        return Err(PipelineError::Data("no PD subjects in the overall matrix".into()));
    }
    let columns = m.columns();
    let explicit = targets.is_some();
    let targets = targets.unwrap_or(&ClinicalScore::ALL);
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for &score in targets {
        let subjects: Vec<(usize, f64, f64, f64)> = pd_rows
            .iter()
            .filter_map(|&(i, r)| Some((i, score.value(r)?, r.age, r.led?)))
            .collect();
        if pd_rows.iter().all(|(_, r)| score.value(r).is_none()) {
            if explicit {
                return Err(PipelineError::Data(format!("{} is absent for every PD subject", score.label())));
            }
            log::warn!("{} is absent for every PD subject; row skipped", score.label());
            skipped.push(score.label().to_string());
            continue;
        }
        let n = subjects.len();
        if n < 2 + 5 {
            return Err(PipelineError::Data(format!(
                "{}: {n} PD subjects have the score, age and LED; at least 7 are needed",
                score.label()
            )));
        }
        let y: Vec<f64> = subjects.iter().map(|s| s.1).collect();
        let covariates = vec![
            subjects.iter().map(|s| s.2).collect::<Vec<f64>>(),
            subjects.iter().map(|s| s.3).collect::<Vec<f64>>(),
        ];
        let best = columns
            .par_iter()
            .enumerate()
            .map(|(j, col)| {
                let x: Vec<f64> = subjects.iter().map(|s| col[s.0]).collect();
                let c = partial_spearman(&x, &y, &covariates).ok().flatten();
                c.map(|c| (j, c))
            })
            .flatten()
            .reduce_with(|a, b| {
                // Larger |rho| wins; ties go to the earlier column.
                match a.1.rho.abs().total_cmp(&b.1.rho.abs()) {
                    std::cmp::Ordering::Less => b,
                    std::cmp::Ordering::Greater => a,
                    std::cmp::Ordering::Equal => {
                        if a.0 < b.0 {
                            a
                        } else {
                            b
                        }
                    }
                }
            });
        let Some((j, c)) = best else {
            return Err(PipelineError::Data(format!("{}: no feature has a defined partial correlation", score.label())));
        };
        rows.push(PartialCorrRow {
            clinical_score_name: score.label().to_string(),
            feature_name: m.feature_names[j].clone(),
            partial_rho: c.rho,
            p_value: c.p_value,
            n,
        });
    }
    if rows.is_empty() {
        return Err(PipelineError::Data("no clinical score is present for PD subjects".into()));
    }
    let mut table = Table::new(["Clinical info", "Feature", "rho", "p", "n"]);
    let mut tsv = table.clone();
    for r in &rows {
        table.push(vec![
            r.clinical_score_name.clone(),
            r.feature_name.clone(),
            format!("{:.4}", r.partial_rho),
            format!("{:.2e}", r.p_value),
            r.n.to_string(),
        ]);
        tsv.push(vec![
            r.clinical_score_name.clone(),
            r.feature_name.clone(),
            format!("{:.6}", r.partial_rho),
            format!("{:.6e}", r.p_value),
            r.n.to_string(),
        ]);
    }
    let mut report = stage_report(cfg, "correlate", "Partial correlations with clinical scores")
        .meta("subjects", "PD only")
        .meta("covariates", COVARIATES)
        .meta("statistic", "partial Spearman rho, t approximation for p");
    report.table = table;
    report.tsv = Some(tsv);
    if !skipped.is_empty() {
        report.sections.push(("Scores absent for every PD subject".into(), skipped));
    }
    report.write(&cfg.reports_dir())?;
    Ok(CorrelationOutcome { rows, report })
}

/// Stage reports in pipeline order.
pub const REPORT_ORDER: [&str; 5] = ["extract", "screen", "select", "classify", "correlate"];

/// Concatenate the text reports already written into `reports/summary.txt`.
pub fn summarize(cfg: &PipelineConfig) -> Result<String, PipelineError> {
    cfg.validate()?;
    let dir = cfg.reports_dir();
    let mut out = format!("Pipeline summary\nconfig_hash: {}\nseed: {}\n", cfg.hash(), cfg.seed);
    let mut found = 0;
    for name in REPORT_ORDER {
        let path = dir.join(format!("{name}.txt"));
        if let Ok(text) = std::fs::read_to_string(&path) {
            out.push_str("\n\n");
            out.push_str(&text);
            found += 1;
        }
    }
    if found == 0 {
        return Err(PipelineError::Data(format!("no reports in {}; run a stage first", dir.display())));
    }
    let path = dir.join("summary.txt");
    std::fs::write(&path, &out).map_err(output_error(&path))?;
    Ok(out)
}

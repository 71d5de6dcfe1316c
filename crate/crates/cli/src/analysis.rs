//! The analysis pipeline behind the subcommands. Every number in a report
//! comes straight from a library call.

use bethesep::scattering::compare_printed_exchange_form;
use bethesep::{
    boundary_residual, build_state, check_f_structure, check_inverse_consistency,
    check_yang_baxter, classify, exchange_operator, generic_positions, separability_verdict,
    BoundaryParams, Classification, FStructure, NormalizationMode, PositionConfig,
    RelativeMomentum, SeparabilityReport, Statistics, Transposition, Verdict,
};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{AnalysisConfig, Samples};

/// Positions are drawn from `[-SAMPLE_SPREAD, SAMPLE_SPREAD]^N`.
pub const SAMPLE_SPREAD: f64 = 3.0;
pub const SAMPLE_MIN_GAP: f64 = 0.05;

#[derive(Debug, Clone, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

pub const TOOL: Tool = Tool {
    name: "bethesep",
    version: env!("CARGO_PKG_VERSION"),
};

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PairResidual {
    pub pair: [usize; 2],
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AnalysisReport {
    pub tool: Tool,
    pub config_hash: String,
    pub seed: u64,
    pub tol: f64,
    pub normalization: NormalizationMode,
    pub n: usize,
    #[serde(rename = "N")]
    pub parties: usize,
    pub statistics: Statistics,
    pub family: &'static str,
    pub classification: Option<Classification>,
    pub f_structure: Option<FStructure>,
    pub yang_baxter_residual: Option<f64>,
    pub inverse_consistency_residual: f64,
    pub state_consistency_residual: f64,
    pub boundary_residuals: Vec<PairResidual>,
    pub separability: SeparabilityReport,
    pub verdict: Verdict,
    pub diagnostics: Vec<String>,
}

pub fn config_hash(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn structure(bc: &BoundaryParams, tol: f64) -> bethesep::Result<Option<FStructure>> {
    match bc {
        BoundaryParams::SpinCoupled(f) => check_f_structure(f, tol).map(Some),
        _ => Ok(None),
    }
}

pub fn classification(bc: &BoundaryParams, tol: f64) -> bethesep::Result<Option<Classification>> {
    match bc {
        BoundaryParams::NonSeparated(_) | BoundaryParams::Separated { .. } => {
            classify(bc, tol).map(Some)
        }
        BoundaryParams::SpinCoupled(_) => Ok(None),
        // Surfaces the unsupported-family error.
        BoundaryParams::GeneralSpinCoupled { .. } => classify(bc, tol).map(Some),
    }
}

pub fn inverse_residual(cfg: &AnalysisConfig) -> bethesep::Result<f64> {
    check_inverse_consistency(
        |k| {
            exchange_operator(
                &cfg.boundary,
                k,
                cfg.statistics,
                Transposition::adjacent(0),
                cfg.dim,
                cfg.parties,
            )
        },
        RelativeMomentum(cfg.relative_momentum),
    )
}

pub fn yang_baxter_residual(cfg: &AnalysisConfig) -> bethesep::Result<Option<f64>> {
    cfg.yang_baxter_momenta
        .map(|ks| check_yang_baxter(&cfg.boundary, ks, cfg.statistics, cfg.dim))
        .transpose()
}

pub fn sample_positions(cfg: &AnalysisConfig) -> Vec<PositionConfig> {
    match &cfg.samples {
        Samples::Positions(p) => p.clone(),
        Samples::Count(count) => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            generic_positions(&mut rng, cfg.parties, *count, SAMPLE_SPREAD, SAMPLE_MIN_GAP)
        }
    }
}

/// Runs classify, the operator checks, the state build, the boundary
/// residuals and the separability verdict, in that order. The verdict is
/// downgraded to inconclusive when any residual exceeds the tolerance.
pub fn analyze(cfg: &AnalysisConfig, text: &str) -> bethesep::Result<AnalysisReport> {
    let tol = cfg.tol;
    let classification = classification(&cfg.boundary, tol)?;
    let f_structure = structure(&cfg.boundary, tol)?;
    let mut diagnostics = Vec::new();

    if let Some((f, g)) = f_structure.as_ref().and_then(|s| s.exchange_form()) {
        let cmp = compare_printed_exchange_form(
            cfg.dim,
            f,
            g,
            RelativeMomentum(cfg.relative_momentum),
            tol,
        )?;
        diagnostics.push(match (cmp.matches, cmp.ratio) {
            (true, _) => "closed-form exchange expression with the -g prefactor matches the dense inverse".to_string(),
            (false, Some(r)) => format!(
                "closed-form exchange expression with the -g prefactor equals the dense inverse times {:.12}{:+.12}i",
                r.re, r.im
            ),
            (false, None) => {
                "closed-form exchange expression with the -g prefactor is not proportional to the dense inverse".to_string()
            }
        });
    }

    let inverse_consistency_residual = inverse_residual(cfg)?;
    let yang_baxter_residual = yang_baxter_residual(cfg)?;

    let state = build_state(
        &cfg.momenta,
        &cfg.base_amplitude,
        &cfg.boundary,
        cfg.statistics,
    )?;
    let mut boundary_residuals = Vec::new();
    for slot in 0..cfg.parties - 1 {
        let residual =
            boundary_residual(&state, Transposition::adjacent(slot), &cfg.boundary, None)?;
        boundary_residuals.push(PairResidual {
            pair: [slot, slot + 1],
            residual,
        });
    }

    let samples = sample_positions(cfg);
    let separability = separability_verdict(&state, &samples, cfg.normalization, tol)?;

    let mut verdict = separability.verdict;
    let mut over = Vec::new();
    if inverse_consistency_residual > tol {
        over.push(format!(
            "inverse consistency residual {inverse_consistency_residual:.3e}"
        ));
    }
    if let Some(r) = yang_baxter_residual.filter(|&r| r > tol) {
        over.push(format!("Yang-Baxter residual {r:.3e}"));
    }
    if state.consistency_residual() > tol {
        over.push(format!(
            "state consistency residual {:.3e}",
            state.consistency_residual()
        ));
    }
    for p in boundary_residuals.iter().filter(|p| p.residual > tol) {
        over.push(format!(
            "boundary residual {:.3e} on pair {:?}",
            p.residual, p.pair
        ));
    }
    if !over.is_empty() {
        verdict = Verdict::Inconclusive;
        diagnostics.push(format!(
            "verdict withheld, above tolerance: {}",
            over.join("; ")
        ));
    }

    Ok(AnalysisReport {
        tool: TOOL,
        config_hash: config_hash(text),
        seed: cfg.seed,
        tol,
        normalization: cfg.normalization,
        n: cfg.dim,
        parties: cfg.parties,
        statistics: cfg.statistics,
        family: cfg.boundary.family(),
        classification,
        f_structure,
        yang_baxter_residual,
        inverse_consistency_residual,
        state_consistency_residual: state.consistency_residual(),
        boundary_residuals,
        separability,
        verdict,
        diagnostics,
    })
}

pub fn boundary_residuals(cfg: &AnalysisConfig) -> bethesep::Result<Vec<PairResidual>> {
    let state = build_state(
        &cfg.momenta,
        &cfg.base_amplitude,
        &cfg.boundary,
        cfg.statistics,
    )?;
    (0..cfg.parties - 1)
        .map(|slot| {
            Ok(PairResidual {
                pair: [slot, slot + 1],
                residual: boundary_residual(
                    &state,
                    Transposition::adjacent(slot),
                    &cfg.boundary,
                    None,
                )?,
            })
        })
        .collect()
}

pub fn fmt_complex(z: Complex64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

/// Pretty JSON with a trailing newline.
pub fn render(report: &AnalysisReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

//! JSON analysis configuration and its validation.

use std::fmt;

use bethesep::{
    build_spin_coupling_f, BoundaryParams, CMatrix, FMatrix, NormalizationMode, PositionConfig,
    PrefactorReading, Robin, SpinTensor, Statistics, TransferMatrix, TwoLevelCoupling,
};
use num_complex::Complex64;
use serde::Deserialize;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_SAMPLES: usize = 20;
pub const DEFAULT_SEED: u64 = 0;

/// A configuration problem, anchored to a line of the source text when one
/// can be found.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: {}", self.message),
            (Some(l), None) => write!(f, "line {l}: {}", self.message),
            _ => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// `[re, im]`
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct Cx(pub f64, pub f64);

impl From<Cx> for Complex64 {
    fn from(c: Cx) -> Self {
        Complex64::new(c.0, c.1)
    }
}

/// A Robin parameter: `[re, im]` or the string `"inf"`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum RobinSpec {
    Finite(Cx),
    Sentinel(String),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoLevelSpec {
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub b: f64,
    #[serde(default)]
    pub c: f64,
    #[serde(default)]
    pub d: f64,
    #[serde(default)]
    pub f: f64,
    #[serde(default)]
    pub g: f64,
    #[serde(default)]
    pub e1: f64,
    #[serde(default)]
    pub e2: f64,
    #[serde(default)]
    pub e3: f64,
    #[serde(default)]
    pub e4: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BoundarySpec {
    NonSeparated {
        a: Cx,
        b: Cx,
        c: Cx,
        d: Cx,
    },
    #[serde(rename_all = "camelCase")]
    Separated {
        h_plus: RobinSpec,
        h_minus: RobinSpec,
    },
    /// Exactly one of `matrix`, `exchange` or `twoLevel`.
    #[serde(rename_all = "camelCase")]
    SpinCoupled {
        #[serde(default)]
        matrix: Option<Vec<Vec<Cx>>>,
        #[serde(default)]
        exchange: Option<ExchangeSpec>,
        #[serde(default)]
        two_level: Option<TwoLevelSpec>,
    },
    GeneralSpinCoupled {
        #[serde(rename = "A")]
        a: Vec<Vec<Cx>>,
        #[serde(rename = "B")]
        b: Vec<Vec<Cx>>,
        #[serde(rename = "C")]
        c: Vec<Vec<Cx>>,
        #[serde(rename = "D")]
        d: Vec<Vec<Cx>>,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExchangeSpec {
    pub f: Cx,
    pub g: Cx,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum AmplitudeSpec {
    Product(Vec<Vec<Cx>>),
    Dense(Vec<Cx>),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum SamplesSpec {
    Count(usize),
    Positions(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PaperLiteralSpec {
    #[serde(rename = "M")]
    pub m: u32,
    #[serde(default)]
    pub reading: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum NormalizationSpec {
    Name(String),
    Literal {
        #[serde(rename = "paper-literal")]
        paper_literal: PaperLiteralSpec,
    },
}

/// The document as written.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RawConfig {
    pub schema_version: u32,
    pub n: usize,
    #[serde(rename = "N")]
    pub parties: usize,
    pub statistics: String,
    pub boundary: BoundarySpec,
    pub momenta: Vec<Cx>,
    pub base_amplitude: AmplitudeSpec,
    #[serde(default)]
    pub samples: Option<SamplesSpec>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub normalization: Option<NormalizationSpec>,
    /// Momentum triple for the Yang–Baxter check; defaults to the first
    /// three momenta when `N ≥ 3`.
    #[serde(default)]
    pub yang_baxter_momenta: Option<[Cx; 3]>,
    /// Relative momentum for the inverse check; defaults to
    /// `(k₀ − k₁)/2`.
    #[serde(default)]
    pub relative_momentum: Option<Cx>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Samples {
    Count(usize),
    Positions(Vec<PositionConfig>),
}

/// A validated configuration.
#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    pub dim: usize,
    pub parties: usize,
    pub statistics: Statistics,
    pub boundary: BoundaryParams,
    pub momenta: Vec<Complex64>,
    pub base_amplitude: SpinTensor,
    pub samples: Samples,
    pub seed: u64,
    pub tol: f64,
    pub normalization: NormalizationMode,
    pub yang_baxter_momenta: Option<[Complex64; 3]>,
    pub relative_momentum: Complex64,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub normalization: Option<NormalizationMode>,
}

/// First line (1-based) on which `"key"` appears.
fn line_of_key(text: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    text.lines()
        .position(|l| l.contains(&needle))
        .map(|i| i + 1)
}

fn at(text: &str, key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line: line_of_key(text, key),
        column: None,
        message: message.into(),
    }
}

fn matrix(rows: &[Vec<Cx>], size: usize, text: &str, key: &str) -> Result<CMatrix, ConfigError> {
    if rows.len() != size || rows.iter().any(|r| r.len() != size) {
        return Err(at(
            text,
            key,
            format!("'{key}' must be a {size}x{size} matrix"),
        ));
    }
    Ok(CMatrix::from_fn(size, size, |r, c| rows[r][c].into()))
}

pub fn parse_normalization(s: &str) -> Result<NormalizationMode, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["zero-set"] => Ok(NormalizationMode::ZeroSetOnly),
        ["paper-literal", m] | ["paper-literal", m, _] => {
            let m: u32 = m.parse().map_err(|_| format!("bad M in '{s}'"))?;
            let leading = match parts.get(2) {
                None => PrefactorReading::LocalDimension,
                Some(r) => parse_reading(r)?,
            };
            literal(m, leading)
        }
        _ => Err(format!(
            "unknown normalization '{s}' (expected zero-set or paper-literal:<M>[:<reading>])"
        )),
    }
}

fn parse_reading(r: &str) -> Result<PrefactorReading, String> {
    match r {
        "local-dimension" => Ok(PrefactorReading::LocalDimension),
        "party-count" => Ok(PrefactorReading::PartyCount),
        _ => Err(format!(
            "unknown prefactor reading '{r}' (expected local-dimension or party-count)"
        )),
    }
}

fn literal(m: u32, leading: PrefactorReading) -> Result<NormalizationMode, String> {
    if m < 2 {
        return Err(format!("M must be at least 2, got {m}"));
    }
    Ok(NormalizationMode::PaperLiteral { m, leading })
}

fn boundary(spec: &BoundarySpec, dim: usize, text: &str) -> Result<BoundaryParams, ConfigError> {
    let robin = |r: &RobinSpec, key: &str| match r {
        RobinSpec::Finite(c) => Ok(Robin::Finite((*c).into())),
        RobinSpec::Sentinel(s) if s == "inf" => Ok(Robin::Infinite),
        RobinSpec::Sentinel(s) => Err(at(
            text,
            key,
            format!("'{key}' must be [re, im] or \"inf\", got \"{s}\""),
        )),
    };
    Ok(match spec {
        BoundarySpec::NonSeparated { a, b, c, d } => BoundaryParams::NonSeparated(
            TransferMatrix::new((*a).into(), (*b).into(), (*c).into(), (*d).into()),
        ),
        BoundarySpec::Separated { h_plus, h_minus } => BoundaryParams::Separated {
            plus: robin(h_plus, "hPlus")?,
            minus: robin(h_minus, "hMinus")?,
        },
        BoundarySpec::SpinCoupled {
            matrix: m,
            exchange,
            two_level,
        } => {
            let given = [m.is_some(), exchange.is_some(), two_level.is_some()];
            if given.iter().filter(|&&b| b).count() != 1 {
                return Err(at(
                    text,
                    "boundary",
                    "spin-coupled boundary needs exactly one of 'matrix', 'exchange', 'twoLevel'",
                ));
            }
            let f = if let Some(rows) = m {
                FMatrix::new(dim, matrix(rows, dim * dim, text, "matrix")?)
            } else if let Some(e) = exchange {
                FMatrix::exchange_form(dim, e.f.into(), e.g.into())
            } else {
                let t = two_level.as_ref().unwrap();
                if dim != 2 {
                    return Err(at(text, "twoLevel", "'twoLevel' coupling needs n = 2"));
                }
                Ok(build_spin_coupling_f(&TwoLevelCoupling {
                    a: t.a,
                    b: t.b,
                    c: t.c,
                    d: t.d,
                    f: t.f,
                    g: t.g,
                    e1: t.e1,
                    e2: t.e2,
                    e3: t.e3,
                    e4: t.e4,
                }))
            }
            .map_err(|e| at(text, "boundary", e.to_string()))?;
            BoundaryParams::SpinCoupled(f)
        }
        BoundarySpec::GeneralSpinCoupled { a, b, c, d } => {
            let size = dim * dim;
            BoundaryParams::GeneralSpinCoupled {
                a: matrix(a, size, text, "A")?,
                b: matrix(b, size, text, "B")?,
                c: matrix(c, size, text, "C")?,
                d: matrix(d, size, text, "D")?,
            }
        }
    })
}

/// Parses and validates a configuration. Nothing is computed here beyond
/// assembling the inputs.
pub fn parse(text: &str, overrides: &Overrides) -> Result<AnalysisConfig, ConfigError> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| ConfigError {
        line: Some(e.line()),
        column: Some(e.column()),
        message: e.to_string(),
    })?;
    validate(raw, text, overrides)
}

fn validate(raw: RawConfig, text: &str, ov: &Overrides) -> Result<AnalysisConfig, ConfigError> {
    if raw.schema_version != SCHEMA_VERSION {
        return Err(at(
            text,
            "schemaVersion",
            format!(
                "unsupported schemaVersion {} (expected {SCHEMA_VERSION})",
                raw.schema_version
            ),
        ));
    }
    if raw.n < 2 {
        return Err(at(
            text,
            "n",
            format!("n must be at least 2, got {}", raw.n),
        ));
    }
    if raw.parties < 2 {
        return Err(at(
            text,
            "N",
            format!("N must be at least 2, got {}", raw.parties),
        ));
    }
    if raw
        .n
        .checked_pow(raw.parties as u32)
        .is_none_or(|len| len > 1 << 16)
    {
        return Err(at(
            text,
            "N",
            format!("n^N = {}^{} is too large", raw.n, raw.parties),
        ));
    }
    let statistics = match raw.statistics.as_str() {
        "boson" => Statistics::Boson,
        "fermion" => Statistics::Fermion,
        s => {
            return Err(at(
                text,
                "statistics",
                format!("statistics must be \"boson\" or \"fermion\", got \"{s}\""),
            ))
        }
    };
    let boundary = boundary(&raw.boundary, raw.n, text)?;

    if raw.momenta.len() != raw.parties {
        return Err(at(
            text,
            "momenta",
            format!(
                "expected {} momenta, got {}",
                raw.parties,
                raw.momenta.len()
            ),
        ));
    }
    let momenta: Vec<Complex64> = raw.momenta.iter().map(|&c| c.into()).collect();

    let base_amplitude = match &raw.base_amplitude {
        AmplitudeSpec::Dense(v) => {
            let want = raw.n.pow(raw.parties as u32);
            if v.len() != want {
                return Err(at(
                    text,
                    "dense",
                    format!(
                        "dense amplitude has {} entries, expected n^N = {want}",
                        v.len()
                    ),
                ));
            }
            SpinTensor::from_amplitudes(raw.n, raw.parties, v.iter().map(|&c| c.into()).collect())
        }
        AmplitudeSpec::Product(fs) => {
            if fs.len() != raw.parties {
                return Err(at(
                    text,
                    "product",
                    format!(
                        "product amplitude has {} factors, expected N = {}",
                        fs.len(),
                        raw.parties
                    ),
                ));
            }
            let fs: Vec<Vec<Complex64>> = fs
                .iter()
                .map(|f| f.iter().map(|&c| c.into()).collect())
                .collect();
            bethesep::make_product_tensor(raw.n, &fs)
        }
    }
    .map_err(|e| at(text, "baseAmplitude", e.to_string()))?;

    let samples = match (ov.samples, raw.samples) {
        (Some(c), _) => Samples::Count(c),
        (None, None) => Samples::Count(DEFAULT_SAMPLES),
        (None, Some(SamplesSpec::Count(c))) => Samples::Count(c),
        (None, Some(SamplesSpec::Positions(ps))) => {
            for p in &ps {
                if p.len() != raw.parties {
                    return Err(at(
                        text,
                        "samples",
                        format!(
                            "sample {p:?} has {} positions, expected {}",
                            p.len(),
                            raw.parties
                        ),
                    ));
                }
            }
            Samples::Positions(ps.into_iter().map(PositionConfig::new).collect())
        }
    };
    if matches!(samples, Samples::Count(0))
        || matches!(&samples, Samples::Positions(p) if p.is_empty())
    {
        return Err(at(text, "samples", "need at least one sample"));
    }

    let tol = ov.tol.or(raw.tol).unwrap_or(DEFAULT_TOL);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(at(text, "tol", format!("tol must be positive, got {tol}")));
    }

    let normalization = match (ov.normalization, &raw.normalization) {
        (Some(m), _) => m,
        (None, None) => NormalizationMode::ZeroSetOnly,
        (None, Some(NormalizationSpec::Name(s))) if s == "zero-set" => {
            NormalizationMode::ZeroSetOnly
        }
        (None, Some(NormalizationSpec::Name(s))) => {
            return Err(at(
                text,
                "normalization",
                format!("unknown normalization \"{s}\""),
            ))
        }
        (None, Some(NormalizationSpec::Literal { paper_literal })) => {
            let leading = match &paper_literal.reading {
                None => PrefactorReading::LocalDimension,
                Some(r) => parse_reading(r).map_err(|e| at(text, "reading", e))?,
            };
            literal(paper_literal.m, leading).map_err(|e| at(text, "M", e))?
        }
    };

    let yang_baxter_momenta = match raw.yang_baxter_momenta {
        Some([a, b, c]) => Some([a.into(), b.into(), c.into()]),
        None if raw.parties >= 3 => Some([momenta[0], momenta[1], momenta[2]]),
        None => None,
    };
    let relative_momentum = match raw.relative_momentum {
        Some(k) => k.into(),
        None => (momenta[0] - momenta[1]) / 2.0,
    };

    Ok(AnalysisConfig {
        dim: raw.n,
        parties: raw.parties,
        statistics,
        boundary,
        momenta,
        base_amplitude,
        samples,
        seed: ov.seed.or(raw.seed).unwrap_or(DEFAULT_SEED),
        tol,
        normalization,
        yang_baxter_momenta,
        relative_momentum,
    })
}

//! Concurrence of the spin part and the algebraic separability conditions.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::bethe::{evaluate, BetheState, PositionConfig};
use crate::boundary::{check_f_structure, BoundaryParams, Statistics};
use crate::error::{Error, Result};
use crate::scattering::{exchange_operator, RelativeMomentum, YOperator};
use crate::tensor::{
    apply_transposition, is_rank_one, minor_sum, Bipartition, SpinTensor, Transposition,
};

/// Which quantity the leading factor of the multipartite prefactor stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrefactorReading {
    /// `n/(2(n−1)(2^{M−1}−1))`, the reading that reduces to the two-particle
    /// concurrence at `M = 2`.
    LocalDimension,
    /// `N/(2(N−1)(2^{M−1}−1))` with `N` the particle count.
    PartyCount,
}

/// Normalization of the generalized concurrence. Both modes share the same
/// zero set.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizationMode {
    PaperLiteral {
        #[serde(rename = "M")]
        m: u32,
        #[serde(rename = "reading")]
        leading: PrefactorReading,
    },
    #[default]
    #[serde(rename = "zero-set")]
    ZeroSetOnly,
}

/// `√( n/(2(n−1)) · Σ_{αβγδ} |φ_{αγ}φ_{βδ} − φ_{αδ}φ_{βγ}|² )`
pub fn concurrence_two(phi: &SpinTensor) -> Result<f64> {
    if phi.parties() != 2 {
        return Err(Error::Usage(format!(
            "two-particle concurrence needs N = 2, got {}",
            phi.parties()
        )));
    }
    let n = phi.dim() as f64;
    let s = minor_sum(phi, &Bipartition::new(2, &[0])?)?;
    Ok((n / (2.0 * (n - 1.0)) * s).sqrt())
}

/// Square root of the bipartition minor sums, each unordered split counted
/// once, times the prefactor selected by `mode`.
pub fn generalized_concurrence(phi: &SpinTensor, mode: NormalizationMode) -> Result<f64> {
    let parties = phi.parties();
    if parties < 2 {
        return Err(Error::Usage("generalized concurrence needs N >= 2".into()));
    }
    let total: f64 = Bipartition::all(parties)
        .iter()
        .map(|b| minor_sum(phi, b))
        .sum::<Result<f64>>()?;
    let prefactor = match mode {
        NormalizationMode::ZeroSetOnly => 1.0,
        NormalizationMode::PaperLiteral { m, leading } => {
            if m < 2 {
                return Err(Error::Usage(format!("M must be at least 2, got {m}")));
            }
            let lead = match leading {
                PrefactorReading::LocalDimension => phi.dim() as f64,
                PrefactorReading::PartyCount => parties as f64,
            };
            lead / (2.0 * (lead - 1.0) * (2f64.powi(m as i32 - 1) - 1.0))
        }
    };
    Ok((prefactor * total).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TwoParticleConditions {
    /// `u` has vanishing 2×2 minors.
    pub c1: bool,
    /// `Y·u` has vanishing 2×2 minors.
    pub c2: bool,
    /// The symmetrized mixed minors of `u` and `Y·u` vanish.
    pub c3: bool,
}

impl TwoParticleConditions {
    pub fn all(&self) -> bool {
        self.c1 && self.c2 && self.c3
    }
}

/// `max |x_{αγ}y_{βδ} − x_{αδ}y_{βγ} + y_{αγ}x_{βδ} − y_{αδ}x_{βγ}| / 2` over
/// all index tuples; with `x = y` this is the largest plain minor.
fn max_mixed_minor(x: &SpinTensor, y: &SpinTensor) -> f64 {
    let n = x.dim();
    let (xa, ya) = (x.amplitudes(), y.amplitudes());
    let at = |m: &[Complex64], r: usize, c: usize| m[r * n + c];
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for g in 0..n {
                for d in 0..n {
                    let v = at(xa, a, g) * at(ya, b, d) - at(xa, a, d) * at(ya, b, g)
                        + at(ya, a, g) * at(xa, b, d)
                        - at(ya, a, d) * at(xa, b, g);
                    worst = worst.max(v.norm() / 2.0);
                }
            }
        }
    }
    worst
}

/// Two-particle conditions for `φ = u·e₁ + (Y u)·e₂` to be a product for
/// generic plane-wave factors `e₁, e₂`.
pub fn check_conditions_two(
    u: &SpinTensor,
    y: &YOperator,
    tol: f64,
) -> Result<TwoParticleConditions> {
    if u.parties() != 2 {
        return Err(Error::Usage(format!(
            "two-particle conditions need N = 2, got {}",
            u.parties()
        )));
    }
    let w = y.apply(u)?;
    Ok(TwoParticleConditions {
        c1: max_mixed_minor(u, u) <= tol,
        c2: max_mixed_minor(&w, &w) <= tol,
        c3: max_mixed_minor(u, &w) <= tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NBodyConditions {
    /// `u` is a full product.
    pub condition_i: bool,
    /// `p^{ij} u = +u` (bosons) or `−u` (fermions) for every pair.
    pub condition_ii_iii: bool,
}

pub fn check_conditions_n(u: &SpinTensor, stats: Statistics, tol: f64) -> Result<NBodyConditions> {
    let parties = u.parties();
    if parties < 2 {
        return Err(Error::Usage("N-body conditions need N >= 2".into()));
    }
    let target = u.scaled(Complex64::new(stats.sign(), 0.0));
    let mut symmetric = true;
    'pairs: for i in 0..parties {
        for j in i + 1..parties {
            let pu = apply_transposition(Transposition::new(i, j)?, u)?;
            if pu.max_abs_diff(&target)? > tol {
                symmetric = false;
                break 'pairs;
            }
        }
    }
    Ok(NBodyConditions {
        condition_i: is_rank_one(u, tol),
        condition_ii_iii: symmetric,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Separable,
    Entangled,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcurrenceSample {
    pub positions: Vec<f64>,
    pub concurrence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SeparabilityReport {
    pub samples: Vec<ConcurrenceSample>,
    pub conditions: NBodyConditions,
    /// Present for two particles only.
    pub two_particle: Option<TwoParticleConditions>,
    /// The conditions that decide the algebraic side for this family and N.
    pub algebraic_rule: &'static str,
    pub algebraic_separable: bool,
    pub verdict: Verdict,
    pub tol: f64,
    /// Entangled needs some sample above `entangled_margin · tol`.
    pub entangled_margin: f64,
    pub bipartitions: usize,
    pub zero_amplitude: bool,
    pub notes: Vec<String>,
}

pub const ENTANGLED_MARGIN: f64 = 10.0;

/// True when every exchange operator of this family is a multiple of the
/// identity, so the product structure of `u` alone decides separability.
fn exchange_is_scalar(bc: &BoundaryParams) -> Result<bool> {
    Ok(match bc {
        BoundaryParams::Separated { .. } => true,
        BoundaryParams::SpinCoupled(f) => {
            let scale = 1.0 + crate::operator::max_abs(f.entries());
            check_f_structure(f, 1e-13 * scale)?
                .exchange_form()
                .is_some_and(|(_, g)| g.norm() <= 1e-13 * scale)
        }
        _ => false,
    })
}

/// Combines sampled concurrences with the algebraic conditions on the base
/// amplitude.
///
/// The algebraic side uses the two-particle conditions `c1 ∧ c2 ∧ c3` for
/// `N = 2`; for `N ≥ 3` it is condition i) alone when every exchange operator
/// is scalar, and i) together with the exchange-symmetry condition otherwise.
/// A state whose amplitudes depend on the exchange path is never classified.
pub fn separability_verdict(
    state: &BetheState,
    samples: &[PositionConfig],
    mode: NormalizationMode,
    tol: f64,
) -> Result<SeparabilityReport> {
    if samples.is_empty() {
        return Err(Error::Usage(
            "need at least one sample configuration".into(),
        ));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Usage(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let mut out = Vec::with_capacity(samples.len());
    for pos in samples {
        let phi = evaluate(state, pos)?;
        out.push(ConcurrenceSample {
            positions: pos.positions.clone(),
            concurrence: generalized_concurrence(&phi, mode)?,
        });
    }

    let u = state.base_amplitude();
    let conditions = check_conditions_n(u, state.statistics(), tol)?;
    let scalar = exchange_is_scalar(state.boundary())?;
    let mut notes = Vec::new();

    let (two_particle, algebraic_rule, algebraic_separable) = if state.parties() == 2 {
        let k = RelativeMomentum::between(state.momenta()[0], state.momenta()[1]);
        let y = exchange_operator(
            state.boundary(),
            k,
            state.statistics(),
            Transposition::adjacent(0),
            state.dim(),
            2,
        )?;
        let c = check_conditions_two(u, &y, tol)?;
        (Some(c), "c1 & c2 & c3", c.all())
    } else if scalar {
        (None, "i", conditions.condition_i)
    } else {
        (
            None,
            "i & ii/iii",
            conditions.condition_i && conditions.condition_ii_iii,
        )
    };

    let zero_amplitude = u.is_zero(0.0);
    if zero_amplitude {
        notes.push("base amplitude is zero; counted as separable by convention".into());
    }

    let max_c = out.iter().map(|s| s.concurrence).fold(0.0, f64::max);
    let numerically_separable = max_c <= tol;
    let numerically_entangled = max_c > ENTANGLED_MARGIN * tol;

    let verdict = if state.consistency_residual() > tol {
        notes.push(format!(
            "amplitudes depend on the exchange path (residual {:.3e}); no verdict",
            state.consistency_residual()
        ));
        Verdict::Inconclusive
    } else if numerically_separable && algebraic_separable {
        Verdict::Separable
    } else if numerically_entangled && !algebraic_separable {
        Verdict::Entangled
    } else {
        notes.push(format!(
            "sampled concurrence (max {max_c:.3e}) and algebraic rule '{algebraic_rule}' ({}) disagree",
            if algebraic_separable { "separable" } else { "not separable" }
        ));
        Verdict::Inconclusive
    };

    Ok(SeparabilityReport {
        samples: out,
        conditions,
        two_particle,
        algebraic_rule,
        algebraic_separable,
        verdict,
        tol,
        entangled_margin: ENTANGLED_MARGIN,
        bipartitions: Bipartition::count(state.parties()),
        zero_amplitude,
        notes,
    })
}

/// Draws `count` position sets uniformly from `[-spread, spread]^N`,
/// rejecting any with two particles closer than `min_gap`.
pub fn generic_positions<R: Rng + ?Sized>(
    rng: &mut R,
    parties: usize,
    count: usize,
    spread: f64,
    min_gap: f64,
) -> Vec<PositionConfig> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x: Vec<f64> = (0..parties)
            .map(|_| rng.gen_range(-spread..spread))
            .collect();
        let ok = (0..parties).all(|i| (i + 1..parties).all(|j| (x[i] - x[j]).abs() >= min_gap));
        if ok {
            out.push(PositionConfig::new(x));
        }
    }
    out
}

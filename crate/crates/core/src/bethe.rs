//! N-particle Bethe-ansatz states.
//!
//! In the fundamental region `x₁ < x₂ < … < x_N` the wavefunction is
//! `Σ_σ u_σ · exp(i Σ_j k_{σ(j)} x_j)`, where `σ` (one-line notation) says
//! which momentum particle `j` carries. Other regions follow from the
//! exchange symmetry of identical particles.

use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;
use num_complex::Complex64;

use crate::boundary::{BoundaryParams, Robin, Statistics};
use crate::error::{Error, Result};
use crate::operator::{self, embed_pair_operator};
use crate::scattering::{exchange_operator, RelativeMomentum, YOperator};
use crate::tensor::{apply_transposition, SpinTensor, Transposition};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Particle positions, one per slot.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionConfig {
    pub positions: Vec<f64>,
}

impl PositionConfig {
    pub fn new(positions: Vec<f64>) -> Self {
        Self { positions }
    }

    /// Permutation `π` with `x_{π(0)} ≤ x_{π(1)} ≤ …`.
    pub fn ordering(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.positions.len()).collect();
        idx.sort_by(|&a, &b| self.positions[a].total_cmp(&self.positions[b]));
        idx
    }
}

fn inversions(perm: &[usize]) -> usize {
    perm.iter()
        .enumerate()
        .map(|(i, a)| perm[i + 1..].iter().filter(|b| *b < a).count())
        .sum()
}

fn permutation_sign(perm: &[usize]) -> f64 {
    if inversions(perm).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone)]
pub struct BetheState {
    dim: usize,
    parties: usize,
    stats: Statistics,
    momenta: Vec<Complex64>,
    total_momentum: Complex64,
    boundary: BoundaryParams,
    base: SpinTensor,
    amplitudes: BTreeMap<Vec<usize>, SpinTensor>,
    consistency_residual: f64,
}

impl BetheState {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn statistics(&self) -> Statistics {
        self.stats
    }

    pub fn momenta(&self) -> &[Complex64] {
        &self.momenta
    }

    pub fn total_momentum(&self) -> Complex64 {
        self.total_momentum
    }

    pub fn boundary(&self) -> &BoundaryParams {
        &self.boundary
    }

    pub fn base_amplitude(&self) -> &SpinTensor {
        &self.base
    }

    pub fn amplitude(&self, sigma: &[usize]) -> Option<&SpinTensor> {
        self.amplitudes.get(sigma)
    }

    pub fn amplitudes(&self) -> &BTreeMap<Vec<usize>, SpinTensor> {
        &self.amplitudes
    }

    /// Overwrites one amplitude, leaving the rest untouched. Only useful for
    /// probing the residual checks with deliberately broken states.
    pub fn replace_amplitude(&mut self, sigma: &[usize], u: SpinTensor) -> Result<()> {
        if u.dim() != self.dim || u.parties() != self.parties {
            return Err(Error::Dimension(
                "replacement amplitude has the wrong shape".into(),
            ));
        }
        match self.amplitudes.get_mut(sigma) {
            Some(slot) => {
                *slot = u;
                Ok(())
            }
            None => Err(Error::Usage(format!(
                "{sigma:?} is not a permutation of the momenta"
            ))),
        }
    }

    /// Largest disagreement between alternative shortest exchange paths met
    /// while building the amplitudes.
    pub fn consistency_residual(&self) -> f64 {
        self.consistency_residual
    }

    /// The plane-wave sum valid in the fundamental region, and optionally its
    /// derivative with respect to `(x_{slot+1} − x_slot)` at fixed centre of mass.
    fn fundamental_sum(
        &self,
        y: &[f64],
        rel_slot: Option<usize>,
    ) -> Result<(SpinTensor, SpinTensor)> {
        let mut value = SpinTensor::zeros(self.dim, self.parties)?;
        let mut deriv = SpinTensor::zeros(self.dim, self.parties)?;
        for (sigma, u) in &self.amplitudes {
            let phase: Complex64 = sigma
                .iter()
                .zip(y)
                .map(|(&m, &x)| self.momenta[m] * x)
                .sum();
            let e = (I * phase).exp();
            value.add_scaled(e, u)?;
            if let Some(p) = rel_slot {
                let q = I * (self.momenta[sigma[p + 1]] - self.momenta[sigma[p]]) / 2.0;
                deriv.add_scaled(e * q, u)?;
            }
        }
        Ok((value, deriv))
    }
}

/// Populates all `N!` amplitudes from `u_base = u_{12…N}` by walking adjacent
/// swaps outward from the identity.
///
/// A permutation `σ` with a descent at `i` is reached from `τ = σ∘(i i+1)` via
/// `u_σ = Y^{i,i+1}((k_{τ(i)} − k_{τ(i+1)})/2)·u_τ`. The first descent defines
/// `u_σ`; every other descent is recomputed and compared, giving the
/// consistency residual.
pub fn build_state(
    momenta: &[Complex64],
    base: &SpinTensor,
    bc: &BoundaryParams,
    stats: Statistics,
) -> Result<BetheState> {
    let parties = momenta.len();
    let dim = base.dim();
    if base.parties() != parties {
        return Err(Error::Dimension(format!(
            "{} momenta for a {}-particle amplitude",
            parties,
            base.parties()
        )));
    }
    if parties > 8 {
        return Err(Error::Usage(format!(
            "{parties}! amplitudes is more than this builder handles"
        )));
    }
    if let BoundaryParams::GeneralSpinCoupled { .. } = bc {
        return Err(Error::UnsupportedFamily(
            "general spin-coupled transfer matrix",
        ));
    }

    let mut perms: Vec<Vec<usize>> = (0..parties).permutations(parties).collect();
    perms.sort_by_key(|p| inversions(p));

    let mut cache: HashMap<(usize, usize, usize), YOperator> = HashMap::new();
    let mut amplitudes: BTreeMap<Vec<usize>, SpinTensor> = BTreeMap::new();
    let mut residual: f64 = 0.0;

    for sigma in perms {
        if inversions(&sigma) == 0 {
            amplitudes.insert(sigma, base.clone());
            continue;
        }
        let mut defined: Option<SpinTensor> = None;
        for i in 0..parties - 1 {
            if sigma[i] < sigma[i + 1] {
                continue;
            }
            let mut tau = sigma.clone();
            tau.swap(i, i + 1);
            let key = (i, tau[i], tau[i + 1]);
            if let std::collections::hash_map::Entry::Vacant(slot) = cache.entry(key) {
                let k = RelativeMomentum::between(momenta[tau[i]], momenta[tau[i + 1]]);
                let y = exchange_operator(bc, k, stats, Transposition::adjacent(i), dim, parties)
                    .map_err(|e| match e {
                    Error::SingularKinematics { k, detail } => Error::SingularKinematics {
                        k,
                        detail: format!(
                            "{detail} (swap of slots {i},{} between momenta {} and {})",
                            i + 1,
                            momenta[tau[i]],
                            momenta[tau[i + 1]]
                        ),
                    },
                    other => other,
                })?;
                slot.insert(y);
            }
            let u = cache[&key].apply(&amplitudes[&tau])?;
            match &defined {
                None => defined = Some(u),
                Some(first) => residual = residual.max(first.max_abs_diff(&u)?),
            }
        }
        amplitudes.insert(
            sigma,
            defined.expect("non-identity permutation has a descent"),
        );
    }

    Ok(BetheState {
        dim,
        parties,
        stats,
        momenta: momenta.to_vec(),
        total_momentum: momenta.iter().sum(),
        boundary: bc.clone(),
        base: base.clone(),
        amplitudes,
        consistency_residual: residual,
    })
}

/// Spin tensor `ψ(x₁,…,x_N)` at arbitrary non-coincident positions.
///
/// With `π` sorting the positions, `ψ(x)_{s} = ε(π)·Ψ(x_π)_{s_π}` where `Ψ` is
/// the fundamental-region sum and `ε` is `1` for bosons and `sgn π` for
/// fermions.
pub fn evaluate(state: &BetheState, pos: &PositionConfig) -> Result<SpinTensor> {
    if pos.positions.len() != state.parties {
        return Err(Error::Dimension(format!(
            "{} positions for {} particles",
            pos.positions.len(),
            state.parties
        )));
    }
    let order = pos.ordering();
    for w in order.windows(2) {
        if pos.positions[w[0]] == pos.positions[w[1]] {
            return Err(Error::DegeneratePositions(w[0].min(w[1]), w[0].max(w[1])));
        }
    }
    let sorted: Vec<f64> = order.iter().map(|&j| pos.positions[j]).collect();
    let (fund, _) = state.fundamental_sum(&sorted, None)?;
    let out = fund.permute_slots(&order)?;
    Ok(match state.stats {
        Statistics::Boson => out,
        Statistics::Fermion => out.scaled(Complex64::new(permutation_sign(&order), 0.0)),
    })
}

/// One-sided value and relative-coordinate derivative on both sides of a
/// coincidence plane.
struct Sides {
    plus: SpinTensor,
    plus_d: SpinTensor,
    minus: SpinTensor,
    minus_d: SpinTensor,
}

fn coincidence_points(parties: usize, slot: usize) -> Vec<Vec<f64>> {
    [0.0, 0.37, -1.21]
        .iter()
        .map(|off| {
            let mut y: Vec<f64> = (0..parties).map(|j| 0.9 * j as f64 + off).collect();
            y[slot + 1] = y[slot];
            y
        })
        .collect()
}

fn analytic_sides(state: &BetheState, slot: usize, y: &[f64]) -> Result<Sides> {
    let (value, deriv) = state.fundamental_sum(y, Some(slot))?;
    let t = Transposition::adjacent(slot);
    let s = Complex64::new(state.stats.sign(), 0.0);
    let minus = apply_transposition(t, &value)?.scaled(s);
    let minus_d = apply_transposition(t, &deriv)?.scaled(-s);
    Ok(Sides {
        plus: value,
        plus_d: deriv,
        minus,
        minus_d,
    })
}

/// Extrapolates from `evaluate` at relative offsets `±ε, ±2ε, ±3ε`.
fn numerical_sides(state: &BetheState, slot: usize, y: &[f64], eps: f64) -> Result<Sides> {
    let centre = y[slot];
    let at = |r: f64| -> Result<SpinTensor> {
        let mut x = y.to_vec();
        x[slot] = centre - r / 2.0;
        x[slot + 1] = centre + r / 2.0;
        evaluate(state, &PositionConfig::new(x))
    };
    let side = |sign: f64| -> Result<(SpinTensor, SpinTensor)> {
        let f1 = at(sign * eps)?;
        let f2 = at(sign * 2.0 * eps)?;
        let f3 = at(sign * 3.0 * eps)?;
        let c = |x: f64| Complex64::new(x, 0.0);
        let mut value = f1.scaled(c(3.0));
        value.add_scaled(c(-3.0), &f2)?;
        value.add_scaled(c(1.0), &f3)?;
        let mut deriv = f1.scaled(c(-5.0));
        deriv.add_scaled(c(8.0), &f2)?;
        deriv.add_scaled(c(-3.0), &f3)?;
        Ok((value, deriv.scaled(c(sign / (2.0 * eps)))))
    };
    let (plus, plus_d) = side(1.0)?;
    let (minus, minus_d) = side(-1.0)?;
    Ok(Sides {
        plus,
        plus_d,
        minus,
        minus_d,
    })
}

fn combo(terms: &[(Complex64, &SpinTensor)]) -> Result<SpinTensor> {
    let mut out = SpinTensor::zeros(terms[0].1.dim(), terms[0].1.parties())?;
    for (z, t) in terms {
        out.add_scaled(*z, t)?;
    }
    Ok(out)
}

/// Max-norm violation of the contact condition between the particles in
/// slots `pair = (i, i+1)` of the fundamental region.
///
/// With `epsilon = None` both one-sided limits come from differentiating the
/// plane-wave sum in closed form. `Some(ε)` instead extrapolates from
/// [`evaluate`] at small separations, which is accurate to `O(ε²)` and serves
/// as an independent cross-check.
pub fn boundary_residual(
    state: &BetheState,
    pair: Transposition,
    bc: &BoundaryParams,
    epsilon: Option<f64>,
) -> Result<f64> {
    pair.check_range(state.parties)?;
    if !pair.is_adjacent() {
        return Err(Error::Usage(format!(
            "boundary residual needs neighbouring slots, got {pair}"
        )));
    }
    if !bc.same_family(&state.boundary) {
        return Err(Error::Usage(format!(
            "state was built with a {} condition, asked to check {}",
            state.boundary.family(),
            bc.family()
        )));
    }
    if let Some(eps) = epsilon {
        if eps.is_nan() || eps <= 0.0 {
            return Err(Error::Usage(format!("epsilon must be positive, got {eps}")));
        }
    }
    let (slot, _) = pair.slots();
    let one = Complex64::new(1.0, 0.0);

    let lifted_f = match bc {
        BoundaryParams::SpinCoupled(f) => Some(embed_pair_operator(
            f.entries(),
            pair,
            state.dim,
            state.parties,
        )?),
        _ => None,
    };
    let robin = match bc {
        BoundaryParams::Separated { plus, minus } => {
            BoundaryParams::symmetric_robin(*plus, *minus)?;
            Some((*plus, *minus))
        }
        _ => None,
    };

    let mut worst: f64 = 0.0;
    for y in coincidence_points(state.parties, slot) {
        let s = match epsilon {
            None => analytic_sides(state, slot, &y)?,
            Some(eps) => numerical_sides(state, slot, &y, eps)?,
        };
        let (r1, r2) = match bc {
            BoundaryParams::NonSeparated(m) => (
                combo(&[(one, &s.plus), (-m.a, &s.minus), (-m.b, &s.minus_d)])?,
                combo(&[(one, &s.plus_d), (-m.c, &s.minus), (-m.d, &s.minus_d)])?,
            ),
            BoundaryParams::Separated { .. } => {
                let (hp, hm) = robin.expect("checked above");
                let side = |h: Robin, v: &SpinTensor, d: &SpinTensor| match h {
                    Robin::Infinite => Ok(v.clone()),
                    Robin::Finite(h) => combo(&[(one, d), (-h, v)]),
                };
                (
                    side(hp, &s.plus, &s.plus_d)?,
                    side(hm, &s.minus, &s.minus_d)?,
                )
            }
            BoundaryParams::SpinCoupled(_) => {
                let f = lifted_f.as_ref().expect("built above");
                let fp = operator::apply(f, &s.plus)?;
                let fm = operator::apply(f, &s.minus)?;
                (
                    combo(&[(one, &s.plus_d), (-one, &fp)])?,
                    combo(&[(one, &s.minus_d), (one, &fm)])?,
                )
            }
            BoundaryParams::GeneralSpinCoupled { .. } => {
                return Err(Error::UnsupportedFamily(
                    "general spin-coupled transfer matrix",
                ))
            }
        };
        worst = worst.max(r1.max_abs()).max(r2.max_abs());
    }
    Ok(worst)
}

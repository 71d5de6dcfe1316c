//! Exchange (Y) operators relating Bethe amplitudes whose momenta differ by
//! one adjacent swap, plus the algebraic consistency checks they must pass.
//!
//! Convention: if `u` is the amplitude with momenta `k_a, k_b` on particles
//! `i, i+1`, the amplitude with those momenta swapped is `Y^{i,i+1}(k)·u` with
//! relative momentum `k = (k_a − k_b)/2`.

use num_complex::Complex64;

use crate::boundary::{
    check_f_structure, BoundaryParams, FMatrix, Robin, Statistics, TransferMatrix,
};
use crate::error::{Error, Result};
use crate::operator::{
    self, embed_pair_operator, identity, max_abs, transposition_matrix, CMatrix,
};
use crate::tensor::{apply_transposition, SpinTensor, Transposition};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Condition-number ceiling for `(ik − F)` before it counts as singular.
pub const MAX_CONDITION: f64 = 1e12;

/// Misfit below which a coupling matrix is treated as exactly `f·I + g·p`.
const EXCHANGE_FORM_TOL: f64 = 1e-13;

/// Half the momentum difference of a colliding pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeMomentum(pub Complex64);

impl RelativeMomentum {
    pub fn between(ka: Complex64, kb: Complex64) -> Self {
        Self((ka - kb) / 2.0)
    }

    pub fn real(k: f64) -> Self {
        Self(Complex64::new(k, 0.0))
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }
}

impl std::ops::Neg for RelativeMomentum {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum YForm {
    /// `identity·1 + exchange·p^{slot}`, the statistics sign already folded
    /// into `exchange`.
    Structured {
        identity: Complex64,
        exchange: Complex64,
        slot: Transposition,
    },
    Dense(CMatrix),
}

/// A linear map on `(Cⁿ)^{⊗N}` relating two Bethe amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct YOperator {
    dim: usize,
    parties: usize,
    form: YForm,
}

impl YOperator {
    pub fn structured(
        identity: Complex64,
        exchange: Complex64,
        slot: Transposition,
        dim: usize,
        parties: usize,
    ) -> Result<Self> {
        slot.check_range(parties)?;
        Ok(Self {
            dim,
            parties,
            form: YForm::Structured {
                identity,
                exchange,
                slot,
            },
        })
    }

    pub fn scalar(y: Complex64, slot: Transposition, dim: usize, parties: usize) -> Result<Self> {
        Self::structured(y, Complex64::new(0.0, 0.0), slot, dim, parties)
    }

    pub fn dense(m: CMatrix, dim: usize, parties: usize) -> Result<Self> {
        let len = operator::full_len(dim, parties);
        if m.nrows() != len || m.ncols() != len {
            return Err(Error::Dimension(format!(
                "dense Y is {}x{}, expected {len}x{len}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Self {
            dim,
            parties,
            form: YForm::Dense(m),
        })
    }

    pub fn form(&self) -> &YForm {
        &self.form
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    /// `(identity, exchange)` for the structured form.
    pub fn coefficients(&self) -> Option<(Complex64, Complex64)> {
        match self.form {
            YForm::Structured {
                identity, exchange, ..
            } => Some((identity, exchange)),
            YForm::Dense(_) => None,
        }
    }

    pub fn materialize(&self) -> Result<CMatrix> {
        match &self.form {
            YForm::Structured {
                identity: ci,
                exchange: cp,
                slot,
            } => {
                let p = transposition_matrix(*slot, self.dim, self.parties)?;
                Ok(identity(self.dim, self.parties) * *ci + p * *cp)
            }
            YForm::Dense(m) => Ok(m.clone()),
        }
    }

    pub fn apply(&self, x: &SpinTensor) -> Result<SpinTensor> {
        if x.dim() != self.dim || x.parties() != self.parties {
            return Err(Error::Dimension(format!(
                "Y on ({}, {}) applied to a ({}, {}) tensor",
                self.dim,
                self.parties,
                x.dim(),
                x.parties()
            )));
        }
        match &self.form {
            YForm::Structured {
                identity: ci,
                exchange: cp,
                slot,
            } => {
                let mut out = x.scaled(*ci);
                if *cp != Complex64::new(0.0, 0.0) {
                    out.add_scaled(*cp, &apply_transposition(*slot, x)?)?;
                }
                Ok(out)
            }
            YForm::Dense(m) => operator::apply(m, x),
        }
    }
}

fn singular_threshold(k: Complex64, params: &[Complex64]) -> f64 {
    1e-12 * (1.0 + k.norm_sqr() + params.iter().map(|z| z.norm()).sum::<f64>())
}

/// Exchange operator for a non-separated transfer matrix:
///
/// `Y = [2ik(ad − bc)·P + ik(a − d) + k²b + c] / [ik(a + d) + k²b − c]`
///
/// with `P = ±p^{slot}` for bosons/fermions.
pub fn y_non_separated(
    m: &TransferMatrix,
    k: RelativeMomentum,
    stats: Statistics,
    slot: Transposition,
    dim: usize,
    parties: usize,
) -> Result<YOperator> {
    let k = k.value();
    let denom = I * k * (m.a + m.d) + k * k * m.b - m.c;
    if denom.norm() <= singular_threshold(k, &m.entries()) {
        return Err(Error::SingularKinematics {
            k,
            detail: "ik(a + d) + k²b − c vanishes".into(),
        });
    }
    let identity = (I * k * (m.a - m.d) + k * k * m.b + m.c) / denom;
    let exchange = stats.sign() * 2.0 * I * k * m.determinant() / denom;
    YOperator::structured(identity, exchange, slot, dim, parties)
}

/// Scalar exchange factor `(ik + h)/(ik − h)` for a symmetric separated
/// condition; `−1` for the Dirichlet limit.
pub fn y_separated(h: Robin, k: RelativeMomentum) -> Result<Complex64> {
    let k = k.value();
    match h {
        Robin::Infinite => Ok(Complex64::new(-1.0, 0.0)),
        Robin::Finite(h) => {
            let denom = I * k - h;
            if denom.norm() <= singular_threshold(k, &[h]) {
                return Err(Error::SingularKinematics {
                    k,
                    detail: format!("ik equals the Robin parameter {h}"),
                });
            }
            Ok((I * k + h) / denom)
        }
    }
}

/// `(ik − F_slot)^{-1}(ik + F_slot)` by dense solve on the full space.
pub fn y_spin_coupled_dense(
    f: &FMatrix,
    k: RelativeMomentum,
    slot: Transposition,
    parties: usize,
) -> Result<YOperator> {
    let dim = f.dim();
    let kv = k.value();
    let lifted = embed_pair_operator(f.entries(), slot, dim, parties)?;
    let id = identity(dim, parties);
    let lhs = &id * (I * kv) - &lifted;
    let rhs = &id * (I * kv) + &lifted;
    let y = operator::solve_conditioned(&lhs, &rhs, MAX_CONDITION, kv)?;
    YOperator::dense(y, dim, parties)
}

/// Structured `Y` for `F = f·I + g·p`, obtained from `p² = 1`:
///
/// `Y = (g² − f² − k² + 2igk·p) / ((ik − f)² − g²)`.
pub fn y_exchange_coupled(
    f: Complex64,
    g: Complex64,
    k: RelativeMomentum,
    slot: Transposition,
    dim: usize,
    parties: usize,
) -> Result<YOperator> {
    let kv = k.value();
    let denom = (I * kv - f).powi(2) - g * g;
    if denom.norm() <= singular_threshold(kv, &[f * f, g * g]) {
        return Err(Error::SingularKinematics {
            k: kv,
            detail: "(ik − f)² − g² vanishes".into(),
        });
    }
    let identity = (g * g - f * f - kv * kv) / denom;
    let exchange = 2.0 * I * g * kv / denom;
    YOperator::structured(identity, exchange, slot, dim, parties)
}

/// Exchange operator for a spin-coupled separated condition. Couplings of
/// the form `f·I + g·p` take the structured path; anything else is solved
/// densely.
pub fn y_spin_coupled(
    f: &FMatrix,
    k: RelativeMomentum,
    slot: Transposition,
    parties: usize,
) -> Result<YOperator> {
    let s = check_f_structure(
        f,
        EXCHANGE_FORM_TOL * (1.0 + operator::max_abs(f.entries())),
    )?;
    match s.exchange_form() {
        Some((fc, gc)) => y_exchange_coupled(fc, gc, k, slot, f.dim(), parties),
        None => y_spin_coupled_dense(f, k, slot, parties),
    }
}

/// The Y operator of any supported family.
pub fn exchange_operator(
    bc: &BoundaryParams,
    k: RelativeMomentum,
    stats: Statistics,
    slot: Transposition,
    dim: usize,
    parties: usize,
) -> Result<YOperator> {
    match bc {
        BoundaryParams::NonSeparated(m) => y_non_separated(m, k, stats, slot, dim, parties),
        BoundaryParams::Separated { plus, minus } => {
            let h = BoundaryParams::symmetric_robin(*plus, *minus)?;
            YOperator::scalar(y_separated(h, k)?, slot, dim, parties)
        }
        BoundaryParams::SpinCoupled(f) => {
            if f.dim() != dim {
                return Err(Error::Dimension(format!(
                    "F acts on local dimension {}, state has {dim}",
                    f.dim()
                )));
            }
            y_spin_coupled(f, k, slot, parties)
        }
        BoundaryParams::GeneralSpinCoupled { .. } => Err(Error::UnsupportedFamily(
            "general spin-coupled transfer matrix",
        )),
    }
}

/// `‖Y(k)·Y(−k) − 1‖_max`. Going forward along a swap and straight back
/// must return the starting amplitude.
pub fn check_inverse_consistency<F>(maker: F, k: RelativeMomentum) -> Result<f64>
where
    F: Fn(RelativeMomentum) -> Result<YOperator>,
{
    let fwd = maker(k)?;
    let back = maker(-k)?;
    let prod = back.materialize()? * fwd.materialize()?;
    let id = identity(fwd.dim, fwd.parties);
    Ok(max_abs(&(prod - id)))
}

/// Max-norm gap between the two ways of reversing three momenta.
///
/// With `k_ij = (k_i − k_j)/2` the two reduced words from `u₁₂₃` to `u₃₂₁` are
/// `Y¹²(k₂₃)·Y²³(k₁₃)·Y¹²(k₁₂)` and `Y²³(k₁₂)·Y¹²(k₁₃)·Y²³(k₂₃)`.
pub fn check_yang_baxter(
    bc: &BoundaryParams,
    momenta: [Complex64; 3],
    stats: Statistics,
    dim: usize,
) -> Result<f64> {
    let [k1, k2, k3] = momenta;
    let k12 = RelativeMomentum::between(k1, k2);
    let k13 = RelativeMomentum::between(k1, k3);
    let k23 = RelativeMomentum::between(k2, k3);
    let y = |k, slot| -> Result<CMatrix> {
        exchange_operator(bc, k, stats, Transposition::adjacent(slot), dim, 3)?.materialize()
    };
    let path_a = y(k23, 0)? * y(k13, 1)? * y(k12, 0)?;
    let path_b = y(k12, 1)? * y(k13, 0)? * y(k23, 1)?;
    Ok(max_abs(&(path_a - path_b)))
}

/// Outcome of comparing a closed-form exchange operator against the dense
/// solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormComparison {
    /// `printed / dense` when the two are proportional.
    pub ratio: Option<Complex64>,
    pub matches: bool,
}

/// Compares the printed closed form
/// `−g(g² − f² − k² + 2igk·p) / ((ik − f)² − g²)`
/// for `F = f·I + g·p` against the dense inversion on two particles.
pub fn compare_printed_exchange_form(
    dim: usize,
    f: Complex64,
    g: Complex64,
    k: RelativeMomentum,
    tol: f64,
) -> Result<ClosedFormComparison> {
    let slot = Transposition::adjacent(0);
    let fm = FMatrix::exchange_form(dim, f, g)?;
    let dense = y_spin_coupled_dense(&fm, k, slot, 2)?.materialize()?;
    let kv = k.value();
    let denom = (I * kv - f).powi(2) - g * g;
    let p = transposition_matrix(slot, dim, 2)?;
    let printed =
        (identity(dim, 2) * (g * g - f * f - kv * kv) + p * (2.0 * I * g * kv)) * (-g / denom);

    let matches = max_abs(&(&printed - &dense)) <= tol;
    let pivot = dense
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .map(|(i, _)| i);
    let ratio = pivot.and_then(|i| {
        let d = dense.as_slice()[i];
        if d.norm() == 0.0 {
            return None;
        }
        let r = printed.as_slice()[i] / d;
        (max_abs(&(&printed - &dense * r)) <= tol).then_some(r)
    });
    Ok(ClosedFormComparison { ratio, matches })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::Robin;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn slot() -> Transposition {
        Transposition::adjacent(0)
    }

    #[test]
    fn identity_transfer_gives_pure_exchange() {
        let m = TransferMatrix::real(1.0, 0.0, 0.0, 1.0);
        for k in [0.3, 1.0, -2.5] {
            let y = y_non_separated(
                &m,
                RelativeMomentum::real(k),
                Statistics::Boson,
                slot(),
                2,
                2,
            )
            .unwrap();
            let (ci, cp) = y.coefficients().unwrap();
            assert!(ci.norm() < 1e-15 && (cp - 1.0).norm() < 1e-15);
            let y = y_non_separated(
                &m,
                RelativeMomentum::real(k),
                Statistics::Fermion,
                slot(),
                2,
                2,
            )
            .unwrap();
            let (ci, cp) = y.coefficients().unwrap();
            assert!(ci.norm() < 1e-15 && (cp + 1.0).norm() < 1e-15);
        }
    }

    #[test]
    fn delta_like_coefficients() {
        // (1, 0, 2, 1), k = 1: Δ = 2i − 2
        let m = TransferMatrix::real(1.0, 0.0, 2.0, 1.0);
        let y = y_non_separated(
            &m,
            RelativeMomentum::real(1.0),
            Statistics::Boson,
            slot(),
            2,
            2,
        )
        .unwrap();
        let (ci, cp) = y.coefficients().unwrap();
        assert!((ci - c(-0.5, -0.5)).norm() < 1e-15);
        assert!((cp - c(0.5, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn singular_non_separated() {
        // Δ = ik·2 − c vanishes at k = c/(2i)
        let m = TransferMatrix::real(1.0, 0.0, 0.0, 1.0);
        let err = y_non_separated(
            &m,
            RelativeMomentum::real(0.0),
            Statistics::Boson,
            slot(),
            2,
            2,
        );
        assert!(matches!(err, Err(Error::SingularKinematics { .. })));
    }

    #[test]
    fn separated_values() {
        assert_eq!(
            y_separated(Robin::real(0.0), RelativeMomentum::real(0.7)).unwrap(),
            c(1.0, 0.0)
        );
        assert_eq!(
            y_separated(Robin::Infinite, RelativeMomentum::real(0.7)).unwrap(),
            c(-1.0, 0.0)
        );
        let y = y_separated(Robin::real(1.0), RelativeMomentum::real(1.0)).unwrap();
        assert!((y - c(0.0, -1.0)).norm() < 1e-15);
        let err = y_separated(Robin::Finite(c(0.0, 1.0)), RelativeMomentum::real(1.0));
        assert!(matches!(err, Err(Error::SingularKinematics { .. })));
    }

    #[test]
    fn zero_coupling_is_identity() {
        let f = FMatrix::new(2, CMatrix::zeros(4, 4)).unwrap();
        let y = y_spin_coupled_dense(&f, RelativeMomentum::real(0.8), slot(), 2).unwrap();
        assert!(max_abs(&(y.materialize().unwrap() - identity(2, 2))) < 1e-15);
    }

    #[test]
    fn scalar_coupling_reduces_to_separated() {
        let h = c(0.4, 0.0);
        let k = RelativeMomentum::real(1.3);
        let f = FMatrix::exchange_form(3, h, c(0.0, 0.0)).unwrap();
        let dense = y_spin_coupled_dense(&f, k, slot(), 2)
            .unwrap()
            .materialize()
            .unwrap();
        let expected = identity(3, 2) * y_separated(Robin::Finite(h), k).unwrap();
        assert!(max_abs(&(dense - expected)) < 1e-14);
    }

    #[test]
    fn exchange_fast_path_matches_dense() {
        let f = FMatrix::exchange_form(2, c(1.0, 0.0), c(2.0, 0.0)).unwrap();
        let k = RelativeMomentum::real(1.0);
        let fast = y_spin_coupled(&f, k, slot(), 2).unwrap();
        assert!(fast.coefficients().is_some());
        let dense = y_spin_coupled_dense(&f, k, slot(), 2).unwrap();
        assert!(max_abs(&(fast.materialize().unwrap() - dense.materialize().unwrap())) < 1e-12);
    }

    #[test]
    fn printed_form_differs_by_minus_g() {
        let g = c(2.0, 0.0);
        let cmp =
            compare_printed_exchange_form(2, c(1.0, 0.0), g, RelativeMomentum::real(1.0), 1e-12)
                .unwrap();
        assert!(!cmp.matches);
        assert!((cmp.ratio.unwrap() + g).norm() < 1e-12);
    }

    #[test]
    fn singular_coupling() {
        // ik − F singular when ik = f ± g; F = i·I at k = 1
        let f = FMatrix::exchange_form(2, c(0.0, 1.0), c(0.0, 0.0)).unwrap();
        let err = y_spin_coupled_dense(&f, RelativeMomentum::real(1.0), slot(), 2);
        assert!(matches!(err, Err(Error::SingularKinematics { .. })));
    }

    #[test]
    fn inverse_consistency_examples() {
        let r = check_inverse_consistency(
            |k| YOperator::scalar(y_separated(Robin::real(1.0), k)?, slot(), 2, 2),
            RelativeMomentum::real(1.0),
        )
        .unwrap();
        assert!(r < 1e-15);

        let m = TransferMatrix::real(1.0, 0.0, 0.0, 1.0);
        let r = check_inverse_consistency(
            |k| y_non_separated(&m, k, Statistics::Boson, slot(), 2, 2),
            RelativeMomentum::real(0.4),
        )
        .unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn yang_baxter_scalar_family() {
        let bc = BoundaryParams::Separated {
            plus: Robin::real(1.0),
            minus: Robin::real(-1.0),
        };
        let r = check_yang_baxter(
            &bc,
            [c(0.3, 0.0), c(1.1, 0.0), c(2.7, 0.0)],
            Statistics::Boson,
            2,
        )
        .unwrap();
        assert!(r <= 1e-14);
    }

    #[test]
    fn general_family_unsupported() {
        let z = CMatrix::zeros(4, 4);
        let bc = BoundaryParams::GeneralSpinCoupled {
            a: z.clone(),
            b: z.clone(),
            c: z.clone(),
            d: z,
        };
        let err = exchange_operator(
            &bc,
            RelativeMomentum::real(1.0),
            Statistics::Boson,
            slot(),
            2,
            2,
        );
        assert!(matches!(err, Err(Error::UnsupportedFamily(_))));
    }

    #[test]
    fn separated_pair_must_be_antisymmetric() {
        let bc = BoundaryParams::Separated {
            plus: Robin::real(1.0),
            minus: Robin::real(1.0),
        };
        let err = exchange_operator(
            &bc,
            RelativeMomentum::real(1.0),
            Statistics::Boson,
            slot(),
            2,
            2,
        );
        assert!(matches!(err, Err(Error::InvalidBoundary(_))));
    }
}

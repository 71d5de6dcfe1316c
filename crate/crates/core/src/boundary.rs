//! Boundary conditions for a contact interaction between two particles and
//! their classification into self-adjoint and PT-symmetric families.
//!
//! All conditions are written for the relative coordinate `x = x₂ − x₁` of
//! the colliding pair, with `0⁺` the side where the pair is in its natural
//! order.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::{max_abs, transposition_matrix, CMatrix};
use crate::tensor::Transposition;

/// Exchange symmetry of the particles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Boson,
    Fermion,
}

impl Statistics {
    /// Sign picked up by the wavefunction under one particle exchange.
    pub fn sign(self) -> f64 {
        match self {
            Statistics::Boson => 1.0,
            Statistics::Fermion => -1.0,
        }
    }
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistics::Boson => f.write_str("boson"),
            Statistics::Fermion => f.write_str("fermion"),
        }
    }
}

/// A Robin parameter `h ∈ C ∪ {∞}`; `∞` encodes a Dirichlet side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Robin {
    Finite(Complex64),
    Infinite,
}

impl Robin {
    pub fn real(h: f64) -> Self {
        Robin::Finite(Complex64::new(h, 0.0))
    }

    pub fn finite(&self) -> Option<Complex64> {
        match self {
            Robin::Finite(h) => Some(*h),
            Robin::Infinite => None,
        }
    }
}

impl Serialize for Robin {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Robin::Finite(h) => [h.re, h.im].serialize(s),
            Robin::Infinite => s.serialize_str("inf"),
        }
    }
}

/// `(ψ, ψ')(0⁺) = [[a, b], [c, d]] · (ψ, ψ')(0⁻)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl TransferMatrix {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self { a, b, c, d }
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        let r = |x| Complex64::new(x, 0.0);
        Self::new(r(a), r(b), r(c), r(d))
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn scaled(&self, z: Complex64) -> Self {
        Self::new(self.a * z, self.b * z, self.c * z, self.d * z)
    }
}

/// Spin-dependent Robin matrix `F` on the two-particle spin space `Cⁿ ⊗ Cⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FMatrix {
    dim: usize,
    entries: CMatrix,
}

impl FMatrix {
    pub fn new(dim: usize, entries: CMatrix) -> Result<Self> {
        if dim < 2 || entries.nrows() != dim * dim || entries.ncols() != dim * dim {
            return Err(Error::Dimension(format!(
                "F must be {0}x{0} for local dimension {dim}, got {1}x{2}",
                dim * dim,
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(Self { dim, entries })
    }

    /// `f·I + g·p` on `Cⁿ ⊗ Cⁿ`.
    pub fn exchange_form(dim: usize, f: Complex64, g: Complex64) -> Result<Self> {
        let p = pair_exchange(dim)?;
        let id = CMatrix::identity(dim * dim, dim * dim);
        Self::new(dim, id * f + p * g)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }
}

pub(crate) fn pair_exchange(dim: usize) -> Result<CMatrix> {
    transposition_matrix(Transposition::adjacent(0), dim, 2)
}

/// The supported boundary-condition families.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryParams {
    /// Value and derivative linked across the contact point.
    NonSeparated(TransferMatrix),
    /// `ψ'(0⁺) = h⁺ ψ(0⁺)`, `ψ'(0⁻) = h⁻ ψ(0⁻)`.
    Separated { plus: Robin, minus: Robin },
    /// `ψ'(0⁺) = F ψ(0⁺)`, `ψ'(0⁻) = −F ψ(0⁻)` with `F` acting on the pair's spins.
    SpinCoupled(FMatrix),
    /// Spin-dependent transfer matrix `[[A, B], [C, D]]`. Stored only; every
    /// analysis rejects it.
    GeneralSpinCoupled {
        a: CMatrix,
        b: CMatrix,
        c: CMatrix,
        d: CMatrix,
    },
}

impl BoundaryParams {
    pub fn family(&self) -> &'static str {
        match self {
            BoundaryParams::NonSeparated(_) => "non-separated",
            BoundaryParams::Separated { .. } => "separated",
            BoundaryParams::SpinCoupled(_) => "spin-coupled",
            BoundaryParams::GeneralSpinCoupled { .. } => "general-spin-coupled",
        }
    }

    pub fn same_family(&self, other: &BoundaryParams) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(other)
    }

    /// The single Robin parameter `h = h⁺ = −h⁻` needed once two identical
    /// particles share the condition.
    pub fn symmetric_robin(plus: Robin, minus: Robin) -> Result<Robin> {
        match (plus, minus) {
            (Robin::Infinite, Robin::Infinite) => Ok(Robin::Infinite),
            (Robin::Finite(p), Robin::Finite(m)) => {
                let scale = 1.0 + p.norm() + m.norm();
                if (p + m).norm() <= 1e-12 * scale {
                    Ok(Robin::Finite(p))
                } else {
                    Err(Error::InvalidBoundary(format!(
                        "identical particles need h+ = -h-, got h+ = {p}, h- = {m}"
                    )))
                }
            }
            _ => Err(Error::InvalidBoundary(
                "identical particles need h+ = -h-, got one finite and one infinite side".into(),
            )),
        }
    }
}

/// Which named separated condition a self-adjoint fit landed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SeparatedKind {
    Dirichlet,
    Neumann,
    Robin,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum SelfAdjointWitness {
    /// `(a, b, c, d)` real with `ad − bc = 1`, overall phase `e^{iθ}`.
    #[serde(rename_all = "camelCase")]
    NonSeparated {
        theta: f64,
        a: f64,
        b: f64,
        c: f64,
        d: f64,
    },
    #[serde(rename_all = "camelCase")]
    Separated {
        h_plus: Robin,
        h_minus: Robin,
        kind: SeparatedKind,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum PtWitness {
    /// `(b, c) e^{iθ}` off the diagonal, `√(1+bc) e^{i(θ±φ)}` on it.
    #[serde(rename_all = "camelCase")]
    NonSeparated {
        theta: f64,
        phi: f64,
        b: f64,
        c: f64,
    },
    /// `h⁺ = h₁ e^{iθ}`, `h⁻ = −h₁ e^{−iθ}`.
    #[serde(rename_all = "camelCase")]
    Separated { h1: f64, theta: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Classification {
    pub self_adjoint: bool,
    pub pt_symmetric: bool,
    pub self_adjoint_witness: Option<SelfAdjointWitness>,
    pub pt_witness: Option<PtWitness>,
}

fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

fn phase(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

fn fit_self_adjoint(m: &TransferMatrix, tol: f64) -> Option<SelfAdjointWitness> {
    let entries = m.entries();
    let mut lead = 0;
    for (i, z) in entries.iter().enumerate() {
        if z.norm() > entries[lead].norm() {
            lead = i;
        }
    }
    if entries[lead].norm() == 0.0 {
        return None;
    }
    let theta = wrap_angle(entries[lead].arg());
    let rot = phase(-theta);
    let [a, b, c, d] = entries.map(|z| (z * rot).re);
    let back = phase(theta);
    let residual = entries
        .iter()
        .zip([a, b, c, d])
        .map(|(z, r)| (z - back * r).norm())
        .fold(0.0, f64::max);
    if residual > tol || (a * d - b * c - 1.0).abs() > tol {
        return None;
    }
    Some(SelfAdjointWitness::NonSeparated { theta, a, b, c, d })
}

fn fit_pt_candidate(m: &TransferMatrix, theta: f64, tol: f64) -> Option<PtWitness> {
    let rot = phase(-theta);
    let b = (m.b * rot).re;
    let c = (m.c * rot).re;
    if b < -tol {
        return None;
    }
    let b = b.max(0.0);
    if b > tol && c < -1.0 / b - tol {
        return None;
    }
    let s = 1.0 + b * c;
    if s < -tol {
        return None;
    }
    let r = s.max(0.0).sqrt();
    let phi = if r > tol {
        wrap_angle((m.a * rot).arg())
    } else {
        0.0
    };
    let e = phase(theta);
    let rebuilt = [e * r * phase(phi), e * b, e * c, e * r * phase(-phi)];
    let residual = m
        .entries()
        .iter()
        .zip(rebuilt)
        .map(|(z, w)| (z - w).norm())
        .fold(0.0, f64::max);
    (residual <= tol).then_some(PtWitness::NonSeparated {
        theta: wrap_angle(theta),
        phi,
        b,
        c,
    })
}

fn fit_pt(m: &TransferMatrix, tol: f64) -> Option<PtWitness> {
    let candidates = if m.b.norm() > tol {
        // b > 0 pins the phase completely
        vec![m.b.arg()]
    } else if m.c.norm() > tol {
        vec![m.c.arg(), m.c.arg() + PI]
    } else {
        let det = m.determinant();
        if det.norm() <= tol {
            return None;
        }
        vec![det.arg() / 2.0, det.arg() / 2.0 + PI]
    };
    candidates
        .into_iter()
        .find_map(|theta| fit_pt_candidate(m, theta, tol))
}

fn is_real_robin(h: Robin, tol: f64) -> bool {
    match h {
        Robin::Infinite => true,
        Robin::Finite(z) => z.im.abs() <= tol,
    }
}

fn realize(h: Robin) -> Robin {
    match h {
        Robin::Finite(z) => Robin::real(z.re),
        Robin::Infinite => Robin::Infinite,
    }
}

/// Decides membership in the self-adjoint and PT-symmetric parametrizations.
///
/// Non-separated conditions are fitted by removing the phase of the
/// largest-magnitude entry (first of `a, b, c, d` on ties) and checking the
/// real remainder; the PT fit takes its phase from `b`, then `c`, then
/// `√(ad − bc)`. Every fit is accepted only when the reconstructed parameters
/// reproduce the input within `tol`.
pub fn classify(bc: &BoundaryParams, tol: f64) -> Result<Classification> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Usage(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let (sa, pt) = match bc {
        BoundaryParams::NonSeparated(m) => (fit_self_adjoint(m, tol), fit_pt(m, tol)),
        BoundaryParams::Separated { plus, minus } => {
            let sa = (is_real_robin(*plus, tol) && is_real_robin(*minus, tol)).then(|| {
                let kind = match (plus, minus) {
                    (Robin::Infinite, Robin::Infinite) => SeparatedKind::Dirichlet,
                    (Robin::Finite(p), Robin::Finite(m)) if p.norm() <= tol && m.norm() <= tol => {
                        SeparatedKind::Neumann
                    }
                    _ => SeparatedKind::Robin,
                };
                SelfAdjointWitness::Separated {
                    h_plus: realize(*plus),
                    h_minus: realize(*minus),
                    kind,
                }
            });
            let pt = match (plus, minus) {
                (Robin::Finite(p), Robin::Finite(m)) => {
                    let h1 = p.norm();
                    let theta = if h1 > tol { wrap_angle(p.arg()) } else { 0.0 };
                    let expected = -h1 * phase(-theta);
                    ((m - expected).norm() <= tol).then_some(PtWitness::Separated { h1, theta })
                }
                _ => None,
            };
            (sa, pt)
        }
        BoundaryParams::SpinCoupled(_) => {
            return Err(Error::UnsupportedFamily(
                "spin-coupled conditions are analysed with check_f_structure",
            ))
        }
        BoundaryParams::GeneralSpinCoupled { .. } => {
            return Err(Error::UnsupportedFamily(
                "general spin-coupled transfer matrix",
            ))
        }
    };
    Ok(Classification {
        self_adjoint: sa.is_some(),
        pt_symmetric: pt.is_some(),
        self_adjoint_witness: sa,
        pt_witness: pt,
    })
}

/// The ten real parameters of a spin-½ coupling matrix. The letters are local
/// to this layout and unrelated to [`TransferMatrix`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TwoLevelCoupling {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub f: f64,
    pub g: f64,
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub e4: f64,
}

/// Lays out
/// ```text
/// a   e1  e1  c
/// e3  f   g   e2
/// e3  g   f   e2
/// d   e4  e4  b
/// ```
/// in the basis `|11⟩, |12⟩, |21⟩, |22⟩`.
pub fn build_spin_coupling_f(p: &TwoLevelCoupling) -> FMatrix {
    #[rustfmt::skip]
    let rows = [
        p.a,  p.e1, p.e1, p.c,
        p.e3, p.f,  p.g,  p.e2,
        p.e3, p.g,  p.f,  p.e2,
        p.d,  p.e4, p.e4, p.b,
    ];
    let m = CMatrix::from_row_iterator(4, 4, rows.iter().map(|&x| Complex64::new(x, 0.0)));
    FMatrix { dim: 2, entries: m }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FStructure {
    pub commutator_norm: f64,
    pub commutes_with_exchange: bool,
    pub is_real: bool,
    /// Two-level case only: `e₁..e₄ = 0` and `a = b = f + g`.
    pub separable_friendly: Option<bool>,
    /// Least-squares coefficients of `F ≈ f·I + g·p` and the max-norm misfit.
    pub exchange_fit: (Complex64, Complex64),
    pub exchange_residual: f64,
    pub is_exchange_form: bool,
}

impl FStructure {
    pub fn exchange_form(&self) -> Option<(Complex64, Complex64)> {
        self.is_exchange_form.then_some(self.exchange_fit)
    }
}

pub fn check_f_structure(f: &FMatrix, tol: f64) -> Result<FStructure> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Usage(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let n = f.dim;
    let m = &f.entries;
    let p = pair_exchange(n)?;
    let commutator_norm = max_abs(&(m * &p - &p * m));
    let is_real = m.iter().all(|z| z.im.abs() <= tol);

    let separable_friendly = (n == 2).then(|| {
        let e = [
            m[(0, 1)],
            m[(0, 2)],
            m[(1, 0)],
            m[(2, 0)],
            m[(1, 3)],
            m[(2, 3)],
            m[(3, 1)],
            m[(3, 2)],
        ];
        let fg = m[(1, 1)] + m[(1, 2)];
        e.iter().all(|z| z.norm() <= tol)
            && (m[(0, 0)] - fg).norm() <= tol
            && (m[(3, 3)] - fg).norm() <= tol
    });

    // Normal equations for min ‖F − fI − gp‖_F: ⟨I,I⟩ = ⟨p,p⟩ = n², ⟨I,p⟩ = n.
    let tr = m.trace();
    let tr_p = (&p * m).trace();
    let n2 = (n * n) as f64;
    let nn = n as f64;
    let det = n2 * n2 - nn * nn;
    let fc = (tr * n2 - tr_p * nn) / det;
    let gc = (tr_p * n2 - tr * nn) / det;
    let id = CMatrix::identity(n * n, n * n);
    let exchange_residual = max_abs(&(m - id * fc - &p * gc));

    Ok(FStructure {
        commutator_norm,
        commutes_with_exchange: commutator_norm <= tol,
        is_real,
        separable_friendly,
        exchange_fit: (fc, gc),
        exchange_residual,
        is_exchange_form: exchange_residual <= tol,
    })
}

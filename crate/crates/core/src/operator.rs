//! Dense matrices on the spin space and the small amount of linear algebra
//! the exchange operators need.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::{SpinTensor, Transposition};

pub type CMatrix = DMatrix<Complex64>;

pub(crate) fn full_len(dim: usize, parties: usize) -> usize {
    dim.pow(parties as u32)
}

pub fn identity(dim: usize, parties: usize) -> CMatrix {
    CMatrix::identity(full_len(dim, parties), full_len(dim, parties))
}

/// Permutation matrix of the bare exchange `p^{ij}` on `(Cⁿ)^{⊗N}`.
pub fn transposition_matrix(t: Transposition, dim: usize, parties: usize) -> Result<CMatrix> {
    t.check_range(parties)?;
    let len = full_len(dim, parties);
    let mut m = CMatrix::zeros(len, len);
    for col in 0..len {
        m[(t.map_flat(col, dim, parties), col)] = Complex64::new(1.0, 0.0);
    }
    Ok(m)
}

/// Lifts an operator on slots `(i, j)` (an `n² × n²` matrix in the row-major
/// basis `|α_i α_j⟩`) to the full space, acting as identity elsewhere.
pub fn embed_pair_operator(
    op: &CMatrix,
    t: Transposition,
    dim: usize,
    parties: usize,
) -> Result<CMatrix> {
    t.check_range(parties)?;
    if op.nrows() != dim * dim || op.ncols() != dim * dim {
        return Err(Error::Dimension(format!(
            "pair operator is {}x{}, expected {}x{}",
            op.nrows(),
            op.ncols(),
            dim * dim,
            dim * dim
        )));
    }
    let (si, sj) = t.slots();
    let len = full_len(dim, parties);
    let wi = dim.pow((parties - 1 - si) as u32);
    let wj = dim.pow((parties - 1 - sj) as u32);
    let mut out = CMatrix::zeros(len, len);
    for col in 0..len {
        let ai = (col / wi) % dim;
        let aj = (col / wj) % dim;
        let rest = col - ai * wi - aj * wj;
        let local_col = ai * dim + aj;
        for bi in 0..dim {
            for bj in 0..dim {
                let z = op[(bi * dim + bj, local_col)];
                if z != Complex64::new(0.0, 0.0) {
                    out[(rest + bi * wi + bj * wj, col)] = z;
                }
            }
        }
    }
    Ok(out)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn apply(m: &CMatrix, x: &SpinTensor) -> Result<SpinTensor> {
    if m.ncols() != x.len() || m.nrows() != x.len() {
        return Err(Error::Dimension(format!(
            "{}x{} operator on a tensor of length {}",
            m.nrows(),
            m.ncols(),
            x.len()
        )));
    }
    let v = nalgebra::DVector::from_column_slice(x.amplitudes());
    let out = m * v;
    SpinTensor::from_amplitudes(x.dim(), x.parties(), out.as_slice().to_vec())
}

fn norm_one(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Solves `lhs · X = rhs`, refusing systems whose 1-norm condition number
/// exceeds `max_condition`. The `k` is carried into the error message.
pub(crate) fn solve_conditioned(
    lhs: &CMatrix,
    rhs: &CMatrix,
    max_condition: f64,
    k: Complex64,
) -> Result<CMatrix> {
    let lu = lhs.clone().lu();
    let inv = lu.try_inverse().ok_or_else(|| Error::SingularKinematics {
        k,
        detail: "matrix (ik - F) is singular".into(),
    })?;
    let cond = norm_one(lhs) * norm_one(&inv);
    if !cond.is_finite() || cond > max_condition {
        return Err(Error::SingularKinematics {
            k,
            detail: format!("(ik - F) has condition number {cond:.3e}"),
        });
    }
    Ok(inv * rhs)
}

//! Dense complex tensors over the N-fold spin space.
//!
//! A [`SpinTensor`] holds the amplitudes `φ[α₁,…,α_N]` with every label
//! `α_i ∈ 0..n`. Storage is row-major over `(α₁,…,α_N)`: the flat index is
//! `Σ_i α_i · n^(N-1-i)`, so the last slot varies fastest. Slots and labels
//! are zero-based throughout the crate.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Amplitude tensor on `(Cⁿ)^{⊗N}`.
#[derive(Clone, PartialEq)]
pub struct SpinTensor {
    dim: usize,
    parties: usize,
    amp: Vec<Complex64>,
}

impl fmt::Debug for SpinTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpinTensor")
            .field("dim", &self.dim)
            .field("parties", &self.parties)
            .field("amp", &self.amp)
            .finish()
    }
}

fn checked_len(dim: usize, parties: usize) -> Result<usize> {
    if dim < 2 {
        return Err(Error::Dimension(format!(
            "local dimension must be at least 2, got {dim}"
        )));
    }
    if parties == 0 {
        return Err(Error::Dimension("need at least one particle".into()));
    }
    u32::try_from(parties)
        .ok()
        .and_then(|p| dim.checked_pow(p))
        .ok_or_else(|| Error::Dimension(format!("{dim}^{parties} overflows")))
}

impl SpinTensor {
    pub fn zeros(dim: usize, parties: usize) -> Result<Self> {
        let len = checked_len(dim, parties)?;
        Ok(Self {
            dim,
            parties,
            amp: vec![Complex64::new(0.0, 0.0); len],
        })
    }

    pub fn from_amplitudes(dim: usize, parties: usize, amp: Vec<Complex64>) -> Result<Self> {
        let len = checked_len(dim, parties)?;
        if amp.len() != len {
            return Err(Error::Dimension(format!(
                "expected {len} = {dim}^{parties} amplitudes, got {}",
                amp.len()
            )));
        }
        Ok(Self { dim, parties, amp })
    }

    /// The basis tensor `e_{α₁} ⊗ … ⊗ e_{α_N}`.
    pub fn basis(dim: usize, labels: &[usize]) -> Result<Self> {
        let mut out = Self::zeros(dim, labels.len())?;
        let idx = out.flat_index(labels)?;
        out.amp[idx] = Complex64::new(1.0, 0.0);
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn len(&self) -> usize {
        self.amp.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amp.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amp
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amp
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amp
    }

    pub fn flat_index(&self, labels: &[usize]) -> Result<usize> {
        if labels.len() != self.parties {
            return Err(Error::Dimension(format!(
                "expected {} labels, got {}",
                self.parties,
                labels.len()
            )));
        }
        let mut idx = 0;
        for &a in labels {
            if a >= self.dim {
                return Err(Error::Dimension(format!(
                    "label {a} outside 0..{}",
                    self.dim
                )));
            }
            idx = idx * self.dim + a;
        }
        Ok(idx)
    }

    /// Inverse of [`flat_index`](Self::flat_index).
    pub fn labels(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.parties];
        for slot in (0..self.parties).rev() {
            out[slot] = flat % self.dim;
            flat /= self.dim;
        }
        out
    }

    pub fn get(&self, labels: &[usize]) -> Result<Complex64> {
        Ok(self.amp[self.flat_index(labels)?])
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim || self.parties != other.parties {
            return Err(Error::Dimension(format!(
                "shape ({}, {}) vs ({}, {})",
                self.dim, self.parties, other.dim, other.parties
            )));
        }
        Ok(())
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            parties: self.parties,
            amp: self.amp.iter().map(|z| z * factor).collect(),
        }
    }

    /// `self += factor · other`
    pub fn add_scaled(&mut self, factor: Complex64, other: &Self) -> Result<()> {
        self.check_same_shape(other)?;
        for (a, b) in self.amp.iter_mut().zip(&other.amp) {
            *a += factor * b;
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .amp
            .iter()
            .zip(&other.amp)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.amp.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn norm(&self) -> f64 {
        self.amp.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }

    /// Relabels particles: `out[s₀,…,s_{N-1}] = self[s_{perm[0]},…,s_{perm[N-1]}]`.
    ///
    /// `perm` must be a permutation of `0..N`.
    pub fn permute_slots(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.parties {
            return Err(Error::Dimension(format!(
                "permutation of length {} for {} slots",
                perm.len(),
                self.parties
            )));
        }
        let mut seen = vec![false; self.parties];
        for &p in perm {
            if p >= self.parties || seen[p] {
                return Err(Error::Usage(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        let mut out = Self::zeros(self.dim, self.parties)?;
        let mut src = vec![0; self.parties];
        for flat in 0..self.amp.len() {
            let s = self.labels(flat);
            for (j, &p) in perm.iter().enumerate() {
                src[j] = s[p];
            }
            out.amp[flat] = self.amp[self.flat_index(&src)?];
        }
        Ok(out)
    }
}

/// Exchange of the spin labels carried by two particle slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transposition {
    first: usize,
    second: usize,
}

impl Transposition {
    /// Slots are stored in increasing order.
    pub fn new(i: usize, j: usize) -> Result<Self> {
        if i == j {
            return Err(Error::DegenerateTransposition(i));
        }
        Ok(Self {
            first: i.min(j),
            second: i.max(j),
        })
    }

    /// The nearest-neighbour exchange `(slot, slot + 1)`.
    pub fn adjacent(slot: usize) -> Self {
        Self {
            first: slot,
            second: slot + 1,
        }
    }

    pub fn slots(&self) -> (usize, usize) {
        (self.first, self.second)
    }

    pub fn is_adjacent(&self) -> bool {
        self.second == self.first + 1
    }

    pub fn check_range(&self, parties: usize) -> Result<()> {
        if self.second >= parties {
            return Err(Error::SlotOutOfRange {
                slot: self.second,
                parties,
            });
        }
        Ok(())
    }

    /// Image of a flat index under the label swap.
    pub(crate) fn map_flat(&self, flat: usize, dim: usize, parties: usize) -> usize {
        let wi = dim.pow((parties - 1 - self.first) as u32);
        let wj = dim.pow((parties - 1 - self.second) as u32);
        let ai = (flat / wi) % dim;
        let aj = (flat / wj) % dim;
        flat + aj * wi + ai * wj - ai * wi - aj * wj
    }
}

impl fmt::Display for Transposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {})", self.first, self.second)
    }
}

/// Applies the bare spin exchange `p^{ij}` (no statistics sign).
pub fn apply_transposition(t: Transposition, x: &SpinTensor) -> Result<SpinTensor> {
    t.check_range(x.parties)?;
    let mut out = SpinTensor::zeros(x.dim, x.parties)?;
    for (flat, z) in x.amp.iter().enumerate() {
        out.amp[t.map_flat(flat, x.dim, x.parties)] = *z;
    }
    Ok(out)
}

/// A split of the particle slots into a side `S` and its complement.
///
/// Canonical bipartitions keep the side containing slot 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bipartition {
    side: u64,
    parties: usize,
}

impl Bipartition {
    pub fn new(parties: usize, side: &[usize]) -> Result<Self> {
        if !(2..=63).contains(&parties) {
            return Err(Error::Usage(format!(
                "bipartitions need 2..=63 particles, got {parties}"
            )));
        }
        let mut mask = 0u64;
        for &s in side {
            if s >= parties {
                return Err(Error::SlotOutOfRange { slot: s, parties });
            }
            mask |= 1 << s;
        }
        let full = (1u64 << parties) - 1;
        if mask == 0 || mask == full {
            return Err(Error::Usage(
                "a bipartition side must be a nonempty proper subset".into(),
            ));
        }
        Ok(Self {
            side: mask,
            parties,
        })
    }

    /// Every unordered split exactly once, in canonical form.
    pub fn all(parties: usize) -> Vec<Self> {
        if parties < 2 {
            return Vec::new();
        }
        let full = (1u64 << parties) - 1;
        (1..full)
            .filter(|m| m & 1 == 1)
            .map(|side| Self { side, parties })
            .collect()
    }

    pub fn count(parties: usize) -> usize {
        if parties < 2 {
            0
        } else {
            (1usize << (parties - 1)) - 1
        }
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn side(&self) -> Vec<usize> {
        (0..self.parties)
            .filter(|s| self.side >> s & 1 == 1)
            .collect()
    }

    pub fn complement(&self) -> Self {
        Self {
            side: !self.side & ((1u64 << self.parties) - 1),
            parties: self.parties,
        }
    }

    pub fn canonical(&self) -> Self {
        if self.side & 1 == 1 {
            *self
        } else {
            self.complement()
        }
    }

    pub fn contains(&self, slot: usize) -> bool {
        slot < self.parties && self.side >> slot & 1 == 1
    }
}

/// Row-major matrix of `x` with row labels from `b`'s side and column labels
/// from the complement, each ordered by increasing slot.
pub fn reshape(x: &SpinTensor, b: &Bipartition) -> Result<(usize, usize, Vec<Complex64>)> {
    if b.parties != x.parties {
        return Err(Error::Dimension(format!(
            "bipartition over {} slots applied to {} particles",
            b.parties, x.parties
        )));
    }
    let row_slots = b.side();
    let col_slots = b.complement().side();
    let rows = x.dim.pow(row_slots.len() as u32);
    let cols = x.dim.pow(col_slots.len() as u32);
    let mut m = vec![Complex64::new(0.0, 0.0); rows * cols];
    for (flat, z) in x.amp.iter().enumerate() {
        let labels = x.labels(flat);
        let r = row_slots.iter().fold(0, |acc, &s| acc * x.dim + labels[s]);
        let c = col_slots.iter().fold(0, |acc, &s| acc * x.dim + labels[s]);
        m[r * cols + c] = *z;
    }
    Ok((rows, cols, m))
}

/// Sum of `|φ_{αβ}φ_{α'β'} − φ_{αβ'}φ_{α'β}|²` over all ordered row pairs
/// `(α, α')` and column pairs `(β, β')` of the reshaped matrix.
///
/// Each unordered minor therefore contributes four times, which matches the
/// unrestricted four-index sum in the two-particle concurrence.
pub fn minor_sum(x: &SpinTensor, b: &Bipartition) -> Result<f64> {
    let (rows, cols, m) = reshape(x, b)?;
    let mut total = 0.0;
    for r1 in 0..rows {
        let row1 = &m[r1 * cols..(r1 + 1) * cols];
        for r2 in r1 + 1..rows {
            let row2 = &m[r2 * cols..(r2 + 1) * cols];
            for c1 in 0..cols {
                for c2 in c1 + 1..cols {
                    total += (row1[c1] * row2[c2] - row1[c2] * row2[c1]).norm_sqr();
                }
            }
        }
    }
    Ok(4.0 * total)
}

/// True when every bipartition has `minor_sum ≤ tol`, i.e. `x` is a full
/// product over all slots. The zero tensor counts as rank one.
pub fn is_rank_one(x: &SpinTensor, tol: f64) -> bool {
    if x.parties < 2 {
        return true;
    }
    Bipartition::all(x.parties)
        .iter()
        .all(|b| minor_sum(x, b).is_ok_and(|s| s <= tol))
}

/// `amp[α₁,…,α_N] = Π_i factors[i][α_i]`.
pub fn make_product_tensor(dim: usize, factors: &[Vec<Complex64>]) -> Result<SpinTensor> {
    for (i, f) in factors.iter().enumerate() {
        if f.len() != dim {
            return Err(Error::Dimension(format!(
                "factor {i} has length {}, expected {dim}",
                f.len()
            )));
        }
    }
    let mut amp = vec![Complex64::new(1.0, 0.0)];
    for f in factors {
        amp = amp
            .iter()
            .flat_map(|a| f.iter().map(move |b| a * b))
            .collect();
    }
    SpinTensor::from_amplitudes(dim, factors.len(), amp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&x| c(x, 0.0)).collect()
    }

    #[test]
    fn product_of_basis_vectors() {
        let t = make_product_tensor(2, &[real(&[1.0, 0.0]), real(&[1.0, 0.0])]).unwrap();
        assert_eq!(t.amplitudes(), real(&[1.0, 0.0, 0.0, 0.0]).as_slice());
    }

    #[test]
    fn product_direct_multiplication() {
        let t = make_product_tensor(2, &[real(&[1.0, 1.0]), real(&[1.0, -1.0])]).unwrap();
        assert_eq!(t.amplitudes(), real(&[1.0, -1.0, 1.0, -1.0]).as_slice());
    }

    #[test]
    fn product_rejects_wrong_factor_length() {
        let err = make_product_tensor(2, &[real(&[1.0, 0.0]), real(&[1.0, 0.0, 0.0])]);
        assert!(matches!(err, Err(Error::Dimension(_))));
    }

    #[test]
    fn flat_index_is_row_major() {
        let t = SpinTensor::zeros(3, 3).unwrap();
        assert_eq!(t.flat_index(&[1, 2, 0]).unwrap(), 9 + 6);
        for flat in 0..t.len() {
            assert_eq!(t.flat_index(&t.labels(flat)).unwrap(), flat);
        }
    }

    #[test]
    fn transposition_swaps_basis_labels() {
        let x = SpinTensor::basis(2, &[0, 1]).unwrap();
        let y = apply_transposition(Transposition::new(0, 1).unwrap(), &x).unwrap();
        assert_eq!(y, SpinTensor::basis(2, &[1, 0]).unwrap());
    }

    #[test]
    fn transposition_fixes_equal_labels() {
        let x = SpinTensor::basis(2, &[0, 1, 1]).unwrap();
        let y = apply_transposition(Transposition::new(1, 2).unwrap(), &x).unwrap();
        assert_eq!(y, x);
    }

    #[test]
    fn transposition_errors() {
        assert!(matches!(
            Transposition::new(1, 1),
            Err(Error::DegenerateTransposition(1))
        ));
        let x = SpinTensor::zeros(2, 2).unwrap();
        let t = Transposition::new(0, 2).unwrap();
        assert!(matches!(
            apply_transposition(t, &x),
            Err(Error::SlotOutOfRange {
                slot: 2,
                parties: 2
            })
        ));
    }

    #[test]
    fn permute_slots_matches_transposition() {
        let amp: Vec<_> = (0..27).map(|i| c(i as f64, -(i as f64) / 3.0)).collect();
        let x = SpinTensor::from_amplitudes(3, 3, amp).unwrap();
        let a = x.permute_slots(&[0, 2, 1]).unwrap();
        let b = apply_transposition(Transposition::new(1, 2).unwrap(), &x).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bell_minor_sum_is_one() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let x = SpinTensor::from_amplitudes(2, 2, real(&[s, 0.0, 0.0, s])).unwrap();
        let b = Bipartition::new(2, &[0]).unwrap();
        assert!((minor_sum(&x, &b).unwrap() - 1.0).abs() < 1e-15);
        assert!(!is_rank_one(&x, 1e-10));
    }

    #[test]
    fn ghz_is_not_rank_one() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut amp = vec![c(0.0, 0.0); 8];
        amp[0] = c(s, 0.0);
        amp[7] = c(s, 0.0);
        let x = SpinTensor::from_amplitudes(2, 3, amp).unwrap();
        let b = Bipartition::new(3, &[0]).unwrap();
        assert!(minor_sum(&x, &b).unwrap() > 0.5);
        assert!(!is_rank_one(&x, 1e-10));
    }

    #[test]
    fn zero_tensor_is_rank_one() {
        let x = SpinTensor::zeros(3, 3).unwrap();
        for b in Bipartition::all(3) {
            assert_eq!(minor_sum(&x, &b).unwrap(), 0.0);
        }
        assert!(is_rank_one(&x, 1e-12));
    }

    #[test]
    fn bipartition_enumeration() {
        assert_eq!(Bipartition::all(4).len(), 7);
        assert_eq!(Bipartition::count(4), 7);
        for b in Bipartition::all(4) {
            assert!(b.contains(0));
            assert_eq!(b.canonical(), b);
            assert_eq!(b.complement().canonical(), b);
        }
        assert!(Bipartition::new(3, &[0, 1, 2]).is_err());
        assert!(Bipartition::new(3, &[]).is_err());
    }

    #[test]
    fn shape_checks() {
        assert!(SpinTensor::from_amplitudes(2, 2, vec![c(0.0, 0.0); 3]).is_err());
        assert!(SpinTensor::zeros(1, 2).is_err());
        assert!(SpinTensor::zeros(2, 0).is_err());
    }
}

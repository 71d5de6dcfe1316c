//! Bethe-ansatz spin amplitudes for point-interacting particles on a line,
//! and tests of whether the spin part stays a product state.
//!
//! Slots and spin labels are zero-based throughout.

pub mod bethe;
pub mod boundary;
pub mod entanglement;
pub mod error;
pub mod operator;
pub mod scattering;
pub mod tensor;

pub use bethe::{boundary_residual, build_state, evaluate, BetheState, PositionConfig};
pub use boundary::{
    build_spin_coupling_f, check_f_structure, classify, BoundaryParams, Classification, FMatrix,
    FStructure, PtWitness, Robin, SelfAdjointWitness, SeparatedKind, Statistics, TransferMatrix,
    TwoLevelCoupling,
};
pub use entanglement::{
    check_conditions_n, check_conditions_two, concurrence_two, generalized_concurrence,
    generic_positions, separability_verdict, NBodyConditions, NormalizationMode, PrefactorReading,
    SeparabilityReport, TwoParticleConditions, Verdict,
};
pub use error::{Error, Result};
pub use operator::CMatrix;
pub use scattering::{
    check_inverse_consistency, check_yang_baxter, exchange_operator, y_exchange_coupled,
    y_non_separated, y_separated, y_spin_coupled, y_spin_coupled_dense, RelativeMomentum, YForm,
    YOperator,
};
pub use tensor::{
    apply_transposition, is_rank_one, make_product_tensor, minor_sum, reshape, Bipartition,
    SpinTensor, Transposition,
};

//! Exact arithmetic for the modular group, rational quaternion algebras and
//! their principal congruence subgroups, with systole and kissing-number
//! bound evaluators.

pub mod arith;
pub mod cache;
pub mod congruence;
pub mod error;
pub mod exact;
pub mod forms;
pub mod geometry;
pub mod hilbert;
pub mod modular;
pub mod quaternion;
pub mod report;
pub mod verify;

pub use cache::{ClassCount, Mu0Cache, CACHE_HEADER};
pub use congruence::{
    enumerate_gamma_n, in_gamma_n, psl2_index, quat_enumerate, quat_in_congruence,
    sl2_order_mod, systole_witness, trace_witness, CongruenceLevel, EnumerationWindow, Setting,
};
pub use error::{Error, Result};
pub use exact::{ExtMat2, IntMat2, QuadExtScalar, Rational};
pub use forms::{reduce_cycle, BinaryQuadraticForm};
pub use geometry::{
    area_s_n, ball_area, gauss_bonnet_area, hyp_distance, mobius_apply, rhs_bound,
    translation_length, RhsBound, UpperHalfPoint, V0,
};
pub use hilbert::{hilbert_symbol, Place};
pub use modular::{
    classify, is_primitive, matrix_to_form, mu0, ConjugacyClass, ElementKind, TraceClasses,
};
pub use quaternion::{is_division, Quaternion, QuaternionAlgebra, SplittingCertificate};
pub use report::{pgt_statistics, level_bound_report, BoundReport, PgtRow};
pub use verify::{Suite, VerifyOutcome};

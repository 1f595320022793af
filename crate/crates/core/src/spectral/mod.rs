//! Spectral sequences: a generic engine for filtered cochain complexes and its
//! instantiation on the coderivation complex.

mod engine;
mod operadic;

pub use engine::{ClassHandle, FilteredComplex, PageCell, Role, SSPage, SpectralSequence};
pub use operadic::{
    build_pages, degenerates_at_e2, euler_class, euler_derivation, push_euler, CoderComplex, EulerPush, OperadicClass,
    OperadicSS,
};

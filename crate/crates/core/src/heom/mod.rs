//! Hierarchical equations of motion: ADO bookkeeping and generator assembly.

mod ados;
mod generator;

pub use ados::{ado_count, enumerate_ados, enumerate_ados_capped, AdoSpace, DEFAULT_ADO_CAP};
pub use generator::{
    build_heom_generator, build_rwa_heom_generator, build_unitary_generator, reduced_system_state, Generator,
    HeomOptions, Normalization, Provenance,
};

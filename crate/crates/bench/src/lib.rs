//! Shared benchmark fixtures.

use dsp_core::witness::RealizationConfig;
use dsp_core::{catalog, Instance};

/// Instances with relations at several sizes, from cheap to expensive.
pub fn relation_fixtures() -> Vec<(&'static str, Instance)> {
    vec![
        ("hypergeometric-n3", catalog::hypergeometric_n3()),
        ("rigid-reducible-n4", catalog::rigid_reducible_n4(dsp_core::Mode::Multiplicative)),
        ("single-relation-n4", catalog::single_relation_n4()),
    ]
}

/// A short search budget so one iteration of the benchmark stays small.
pub fn quick_witness_config() -> RealizationConfig {
    RealizationConfig {
        restarts: 4,
        require_irreducible: true,
        ..RealizationConfig::default()
    }
}

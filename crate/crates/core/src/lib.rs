//! Decision and realization toolkit for the Deligne–Simpson problem: given
//! conjugacy classes of matrices, decide whether an irreducible tuple with
//! those classes and trivial sum (or product) exists, and search for one.

pub mod blockext;
pub mod catalog;
pub mod classes;
pub mod decider;
pub mod error;
pub mod genericity;
pub mod partitions;
pub mod witness;

pub use classes::{
    convention2_holds, kappa_of, validate_instance, ClassSpec, DerivedQuantities, Eigenvalue, GaussianRational,
    Instance, Mode, Rational,
};
pub use error::{Error, Result};
pub use genericity::{is_generic, is_k_generic, min_relation_n, RelationWitness};
pub use partitions::{Jnf, MultiplicityVector, Partition};
pub use witness::{
    build_semidirect, find_tuple, jnf_seed_matrix, membership_check, verify, NumericMatrixTuple, RealizationConfig,
    RealizationReport, ResidualObjective,
};

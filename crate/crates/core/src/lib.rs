//! Torus-orbifold bordism toolkit.
//!
//! Combinatorial simple polytopes carry integer facet labels. From them this
//! crate builds explicit cobordism relations between quasitoric orbifolds and
//! checks them by computing Chern numbers through fixed-point localization.
//!
//! All arithmetic is exact. Lattice vectors are [`IntVector`]s of `BigInt`,
//! and localization sums use `BigRational`.

pub mod charmodel;
pub mod chern;
pub mod cobordism;
pub mod io;
pub mod lattice;
pub mod orientation;
pub mod polytope;

pub use charmodel::{
    delta_equivalent, CharacteristicModel, CharacteristicReport, DeltaSearch, IsotropyModel, IsotropyReport, ModelError,
};
pub use chern::{
    chern_number, chern_numbers, partitions, tangent_weights, verify_relation, ChernError, ChernValue, Partition,
    RelationVerification, VerificationStatus,
};
pub use cobordism::{
    check_hirzebruch_schema, check_lambda0, comcob_relation, qbd_decompose, vertex_cut_relation, CobordismError,
    CobordismRelation, Component, Construction, Decomposition, FakeWeightedProjective, SchemaCheck, SchemaViolation,
    VertexCut,
};
pub use io::{DocError, LoadedModel, ModelDoc, PolytopeDoc, RelationDoc};
pub use lattice::{IntVector, LatticeError, Sublattice};
pub use orientation::{OmniorientedModel, OrientationDatum, OrientationError};
pub use polytope::{ExceptionalMarking, Face, Polytope, PolytopeError};

pub use num_bigint::BigInt;

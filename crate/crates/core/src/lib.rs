//! Tree-structured function spaces: rooted labeled trees, GF(2) polynomial
//! spaces realised by binary trees, distances between trees, exact
//! polynomial constraints and decompositions, and neural-network bounds.

pub mod analytic;
pub mod discrete;
pub mod error;
pub mod gf2;
pub mod metric;
pub mod poly;
pub mod sample;
pub mod scalar;
pub mod tenn;
pub mod tree;

pub use analytic::{
    compose_on_tree, constraint_check, decompose_polynomial, recompose, reduced_constraints,
    repeated_label_det_check, solve_composition, variety_dims, ConstraintReport, PolyDecomposition,
    ReducedIdentity,
};
pub use discrete::{
    brute_force_space, decompose, enumerate_space, evaluate, is_member, is_representable,
    space_size, FunctionSpace, NodeAssignment,
};
pub use error::{Error, Result};
pub use gf2::{
    anf_from_truth_table, discrete_constraint, discrete_constraint_pointwise, gf2_add,
    gf2_derivative, gf2_mul, truth_table_from_anf, Gf2Poly, TruthTable,
};
pub use metric::{distance, distance_matrix, reconstruct_tree, TreeDistance};
pub use poly::{poly_add, poly_compose, poly_derivative, poly_mul, MPoly};
pub use scalar::Scalar;
pub use tenn::{
    burnside_classes, expand_tenn, gamma, nn_capacity_bound, space_size_bound, universal_threshold,
    CapacityBound, LayeredNetwork, NetNode, TennResult,
};
pub use tree::{enumerate_tree_shapes, parse_tree, standard_vars, Tree, TreeNode, Triple};

/// Polynomials with exact rational coefficients.
pub type RatPoly = MPoly<num_rational::BigRational>;

/// Polynomials with double-precision coefficients.
pub type F64Poly = MPoly<f64>;

//! Double point trees of immersed spheres in R^3 without triple points.

pub mod canonical;
pub mod cli;
pub mod dot;
pub mod explore;
pub mod invariant;
pub mod moves;
pub mod realize;
pub mod revolution;
pub mod tree;

pub use canonical::{canonical_code, isomorphic, CanonicalCode};
pub use explore::{enumerate_trees, reachable, ExploreError, ReachLimits, ReachResult};
pub use invariant::{invariant_of, InvariantVector, VectorError};
pub use moves::{
    apply_move, enumerate_moves, invert_move, successors, Move, MoveError, MoveLimits, SplitKind, SplitSpec,
};
pub use realize::{building_block_f, building_block_g, decompose, realize, RealizeError};
pub use revolution::{
    doubled_winding, self_intersections, tree_of_revolution, tree_of_revolution_with, GeneratingCurve, PlanarCrossing,
    RevolutionError, RevolutionOptions,
};
pub use tree::{ConnectedSum, DoublePointTree, Edge, Rule, TreeError, ValidationReport, Vertex, Violation};

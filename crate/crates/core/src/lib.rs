//! Explicit embeddings of finite metric spaces into block-decomposed
//! sequence spaces, with exhaustive pairwise certification of their bounds.
//!
//! * [`metric`], [`net`], [`verify`]: finite metric spaces, greedy nets,
//!   compression/expansion moduli, distortion and envelope checks.
//! * [`ambient`]: sparse block vectors with sup-sum and `lp`-sum norms.
//! * [`proper`]: the dyadic-annulus Fréchet embedding of a pointed space,
//!   bounded below by `gamma(d)` and above by `9 C d`.
//! * [`lp`]: the bi-Lipschitz embedding of finite `lp` point clouds.
//! * [`coarse`]: net rounding, coarse bi-Lipschitz composition, and the
//!   grid-net rescaling fixtures.
//! * [`fixtures`], [`io`], [`harness`]: generators, file formats and the
//!   report pipeline behind the `metric-embed` binary.

// NaN inputs must fail range checks, so `!(x >= 0.0)` is intentional.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod ambient;
pub mod coarse;
pub mod error;
pub mod fixtures;
pub mod harness;
pub mod io;
pub mod lp;
pub mod metric;
pub mod net;
pub mod proper;
pub mod verify;

pub use ambient::{
    axpy, distance, outer_norm, pair_index, project_block, unpair, BlockIsoModel, BlockVector,
    Exponent, NormSpec,
};
pub use coarse::{coarse_embed, grid_net, net_round, rescaled_restriction, CoarseConstants};
pub use error::{Error, Result};
pub use lp::{embed_point_lp, normalize_pointed, verify_lp, LpEmbedding, LpParams, LpPointSet, ThetaMode};
pub use metric::{min_positive_distance, validate_metric, FiniteMetricSpace, PointedSpace};
pub use net::{greedy_maximal_net, Ball, Net};
pub use proper::{
    annulus_index, build_hierarchy, frechet_coords, gamma_bound, series_constant, verify_proper,
    Annulus, ProperEmbedding, ProperParams,
};
pub use verify::{distortion, moduli_profile, verify_bounds, BoundsReport, Distortion, Extent, ModuliProfile, Tolerance};

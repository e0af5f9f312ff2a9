//! Rank-based input normalization with an executable admissibility audit.
//!
//! The library centers on three axioms an input-normalization operator must
//! satisfy to be a true function of rank structure: invariance under
//! strictly increasing feature-wise transforms, independence from batch
//! composition, and monotone-Lipschitz stability of the scalarization. The
//! admissible operator QNorm satisfies all three; the differentiable-sorting
//! baselines SoftSort and SinkhornSort are included because they measurably
//! do not.
//!
//! Module map:
//!
//! - [`matrix`], [`rank`], [`transform`]: the data container, rank
//!   representations and normalization statistics, and the catalog of
//!   strictly increasing transforms.
//! - [`operators`]: QNorm, SoftSort, SinkhornSort, and the counterexample
//!   operators, behind one fitted-operator interface.
//! - [`metrics`]: Spearman, NDCG, finite-difference sensitivity probes,
//!   operator shift, output variance.
//! - [`compliance`]: the three axioms as experiments, the contraction
//!   check, and the negative controls.
//! - [`learner`]: synthetic task, MLP with hand-derived gradients and Adam,
//!   operator front-ends, robustness and tabular protocols.
//! - [`rng`], [`csvio`], [`report`]: seeded sub-streams, numeric CSV I/O,
//!   and byte-stable report emission.
//!
//! The `ranknorm` binary (crate `ranknorm-cli`) drives everything from the
//! command line; the book under `book/` walks through the concepts with
//! runnable examples (compiled as doc-tests of this crate).

pub mod compliance;
pub mod csvio;
pub mod learner;
pub mod matrix;
pub mod metrics;
pub mod operators;
pub mod rank;
pub mod report;
pub mod rng;
pub mod transform;

pub use matrix::FeatureMatrix;
pub use operators::{FittedOperator, OperatorConfig, OperatorKind};
pub use rank::{empirical_rank, fit_stats, relaxed_rank, NormalizationStats, RankRepresentation};
pub use transform::MonotoneTransform;

// Book chapters double as doc-tests so the guide cannot drift from the API.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            pub struct $name;
        };
    }

    chapter!(Introduction, "../../../book/src/introduction.md");
    chapter!(Ranks, "../../../book/src/ranks.md");
    chapter!(Operators, "../../../book/src/operators.md");
    chapter!(Axioms, "../../../book/src/axioms.md");
    chapter!(Metrics, "../../../book/src/metrics.md");
    chapter!(Learning, "../../../book/src/learning.md");
    chapter!(Cli, "../../../book/src/cli.md");
}

//! Boolean characteristic-set decomposition of full-rank constraint
//! systems over GF(2), with front ends for linear network codes and
//! locally repairable codes.
//!
//! The pipeline: compile an instance into an x̃-linear [`PolySystem`],
//! decompose its feasible set with [`bcsfr`] or [`inc_bcsfr`], then count,
//! enumerate, verify or optimize over the resulting characteristic sets.

pub mod bcsfr;
pub mod boolpoly;
pub mod charset;
pub mod cli;
pub mod coding;
pub mod optimize;
pub mod oracle;

pub use bcsfr::{bcsfr, inc_bcsfr, BcsfrConfig, BcsfrStats, ChoosePolicy, FeasibleSetResult};
pub use boolpoly::{BoolPoly, Monomial, VarId};
pub use charset::{bcs, CharSet};
pub use coding::{PolySystem, RankBlock};

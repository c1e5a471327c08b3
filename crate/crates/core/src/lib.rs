//! Necessary conditions for Wang tile sets and nearest-neighbor SFTs over
//! finitely generated groups.
//!
//! * [`star`]: the free-group emptiness criterion, a necessary condition on
//!   every group with `d` generators.
//! * [`conditions`]: the simple-cycle balance condition on graph families and
//!   the color balance condition on tile sets, with constructive translations
//!   between their solutions.
//! * [`oracle`]: brute-force tilings of free-group balls and `Z²` regions,
//!   plus Følner-box frequency audits.
//! * [`counterexample`]: tile sets that pass every condition yet cannot tile
//!   a group with a given nontrivial relator.

pub mod ball;
pub mod cli;
pub mod conditions;
pub mod counterexample;
pub mod cycles;
pub mod error;
pub mod feasible;
pub mod model;
pub mod oracle;
pub mod star;

pub use error::{Error, Result};
pub use model::{GraphFamily, Presentation, Side, WangTileSet};

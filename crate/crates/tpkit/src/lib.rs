//! Executable combinatorics of tree properties: tree indices, tree
//! operations, set-system patterns, witness search, pattern transforms and
//! parametrized Fraïssé amalgamation.

pub mod gen;
pub mod patterns;
pub mod pfc;
pub mod search;
pub mod suites;
pub mod treeidx;
pub mod transforms;
pub mod treeops;

//! File formats and the command-line front end for `maltsev-kan-core`.

pub mod cli;
pub mod format;

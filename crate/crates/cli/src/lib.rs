//! Front end for `helicoid-core`: solution records, mesh files and the
//! `solve`, `mesh` and `verify` subcommands.

pub mod commands;
pub mod meshio;
pub mod record;

//! Command line front end for the semio-core engine. The library half
//! holds the .sem reader and printer, the workspace model behind a parsed
//! file, and the command implementations; main.rs is a thin argv shim.

pub mod cmd;
pub mod emit;
pub mod parse;
pub mod rl;
pub mod span;
pub mod workspace;

//! Library surface of the `uncbench` CLI: document schemas and the command
//! implementations, kept importable so integration tests can parse the
//! emitted records with the same types that wrote them.

pub mod records;
pub mod run;

//! Scope-aware, parallel JavaScript obfuscation.

pub mod corpus;
pub mod equivharness;
pub mod jsparse;
pub mod metrics;
pub mod pasa;
pub mod pipeline;
pub mod renamer;
pub mod transforms;

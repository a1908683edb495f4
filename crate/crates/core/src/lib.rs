//! Toolkit for staged safety assurance of autonomous systems: an artifact
//! registry, GSN argument patterns and their instantiation, a structured
//! requirements grammar, hazard enumeration, operating-domain checks and
//! traceability lint.

pub mod artifact;
pub mod assemble;
pub mod cli;
pub mod gsn;
pub mod hazard;
pub mod instantiate;
pub mod lint;
pub mod odm;
pub mod patterns;
pub mod project;
pub mod registry;
pub mod req;

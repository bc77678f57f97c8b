//! tmc-forge: a toolchain for DataLang, a small first-order language with
//! mutable two-field blocks. Implements the tail-modulo-cons transformation
//! (plus inlining and accumulator-passing variants) and validates it with
//! bounded behavioral-refinement checking, stack-depth instrumentation, and
//! differential fuzzing.

pub mod cli;
pub mod lang;
pub mod refine;
pub mod semantics;
pub mod tmc;
pub mod variants;

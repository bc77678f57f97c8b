//! Value similarity, bounded behavioral-refinement checking, and the
//! differential fuzzer (program generation, shrinking, replay files).

pub mod check;
pub mod gen;
pub mod replay;
pub mod shrink;
pub mod similar;

pub use check::{
    bool_list, check_program_refinement, check_refinement, default_suite, wrap_list_arg,
    RefineError, RefinementReport, SuiteReport, Verdict,
};
pub use gen::{gen_program, GenConfig};
pub use replay::{read_replay, write_replay, Replay};
pub use shrink::{shrink, shrink_with, Counterexample, ShrinkBudget};
pub use similar::{similar, Bijection, Observation};

//! Single-pass instruction sequences over Boolean registers.
//!
//! * [`seq`] and [`text`]: the instruction set and its text format.
//! * [`exec`]: execution, I/O equivalence and bounded halting.
//! * [`gadgets`]: generators for word operations.
//! * [`lmul`] and [`indexed`]: long multiplication in four variants.
//! * [`harness`]: oracle checks shared by the command line and the tests.

pub mod cli;
pub mod error;
pub mod exec;
pub mod gadgets;
pub mod harness;
pub mod indexed;
pub mod lmul;
pub mod seq;
pub mod text;

pub use error::{
    AnalysisError, ComputeError, ExecError, GadgetError, LmulError, ParseError, SeqError,
    VerifyError,
};
pub use exec::{ExecutionOutcome, Executor, RegisterFile};
pub use lmul::LmulVariant;
pub use seq::{BitWord, Instruction, InstructionSequence, RegisterKind, RegisterRef};

use thiserror::Error;

use crate::exec::ExecutionOutcome;
use crate::gadgets::WordRef;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeqError {
    #[error("instruction sequences are nonempty")]
    Empty,
    #[error("power is defined for positive exponents only")]
    ZeroPower,
    #[error("register numbers are positive")]
    ZeroRegister,
    #[error("index blocks have positive width")]
    ZeroIndexWidth,
    #[error("index block width {0} exceeds 63 registers")]
    IndexTooWide(u32),
    #[error("invalid bit character {0:?}, expected '0' or '1'")]
    BadBit(char),
    #[error(
        "instruction {position} ({instruction}) is not a basic instruction on Boolean registers"
    )]
    IllFormed {
        position: usize,
        instruction: String,
    },
}

/// Syntax error in the text format, located by 1-based instruction position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("instruction {position} (line {line}, column {column}): {message}")]
pub struct ParseError {
    pub position: usize,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GadgetError {
    #[error("word width must be positive")]
    ZeroWidth,
    #[error(
        "{dst} and {src} lead to partially coinciding {width}-bit words (bases differ by {delta})"
    )]
    PartialOverlap {
        dst: WordRef,
        src: WordRef,
        width: u64,
        delta: u64,
    },
    #[error("{role} operand {word} has kind {kind}, expected one of {allowed}")]
    BadKind {
        role: &'static str,
        word: WordRef,
        kind: &'static str,
        allowed: &'static str,
    },
    #[error("shift amount {m} out of range for width {n}")]
    ShiftOutOfRange { n: u64, m: u64 },
    #[error("padding width {m} out of range for width {n}")]
    PadOutOfRange { n: u64, m: u64 },
    #[error("constant word has {found} bits, expected {expected}")]
    WidthMismatch { expected: u64, found: u64 },
    #[error("operand {0} contains the carry register aux:1")]
    CarryOverlap(WordRef),
    #[error("operand references must be direct")]
    IndexedOperand,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExecError {
    #[error("budget must be at least 1")]
    ZeroBudget,
    #[error("indexed reference at instruction {pc} but indexed addressing is disabled")]
    IndexedDisabled { pc: usize },
    #[error("program counter {pc} outside 1..={len}")]
    PcOutOfRange { pc: usize, len: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComputeError {
    #[error(transparent)]
    Exec(#[from] ExecError),
    #[error("execution did not terminate: {0}")]
    NotTerminated(Box<ExecutionOutcome>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Exec(#[from] ExecError),
    #[error("state bound {bound} exceeds the supported maximum of 2^64-1")]
    BoundOverflow { bound: String },
    #[error("exhaustive comparison over {0} input bits exceeds the limit of 24")]
    TooManyInputs(usize),
    #[error("sample count must be positive")]
    NoSamples,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LmulError {
    #[error("operand width must be positive")]
    ZeroWidth,
    #[error("operands have {a} and {b} bits, expected {n} each")]
    OperandWidth { n: usize, a: usize, b: usize },
    #[error(transparent)]
    Gadget(#[from] GadgetError),
    #[error(transparent)]
    Compute(#[from] ComputeError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
    #[error(transparent)]
    Lmul(#[from] LmulError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Exec(#[from] ExecError),
}

//! Bounded halting decision for a fixed input.
//!
//! Inputs are read-only, so a run is a walk through states made of the
//! program counter and the writable (`out` and `aux`) registers. There are at
//! most `(len + 1) * 2^(writable registers)` of them, and a run that has not
//! terminated after that many steps has repeated a state. Runs are checked for
//! repetition with Brent's cycle finder, which usually settles long before the
//! bound.

use std::fmt;

use super::{Control, Executor, MachineState, RegisterFile};
use crate::error::AnalysisError;
use crate::seq::{BitWord, InstructionSequence};

/// Why a run was classified as never halting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Divergence {
    /// Inaction at the given position.
    Inaction { pc: usize },
    /// The state after `steps` executed instructions was seen before.
    StateRepeated { steps: u64 },
    /// The state bound was exceeded without terminating.
    BoundExceeded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HaltVerdict {
    Halts { steps: u64 },
    NeverHalts(Divergence),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HaltReport {
    pub verdict: HaltVerdict,
    pub bound: u64,
}

impl HaltReport {
    pub fn halts(&self) -> bool {
        matches!(self.verdict, HaltVerdict::Halts { .. })
    }
}

impl fmt::Display for HaltReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.verdict {
            HaltVerdict::Halts { steps } => write!(f, "Halts({steps}) bound={}", self.bound),
            HaltVerdict::NeverHalts(d) => {
                let why = match d {
                    Divergence::Inaction { pc } => format!("inaction at {pc}"),
                    Divergence::StateRepeated { steps } => {
                        format!("state repeated after {steps} steps")
                    }
                    Divergence::BoundExceeded => "bound exceeded".to_string(),
                };
                write!(f, "NeverHalts bound={} reason={why}", self.bound)
            }
        }
    }
}

/// `(len + 1) * 2^(max_out + max_aux)`, or the symbolic form if it does not
/// fit in 64 bits.
pub fn state_bound(seq: &InstructionSequence) -> Result<u64, AnalysisError> {
    let regs = seq.required_registers();
    let exponent = regs.max_out.saturating_add(regs.max_aux);
    let positions = seq.len() as u128 + 1;
    let symbolic = || AnalysisError::BoundOverflow {
        bound: format!("{positions}*2^{exponent}"),
    };
    if exponent >= 64 {
        return Err(symbolic());
    }
    let bound = positions
        .checked_mul(1u128 << exponent)
        .ok_or_else(symbolic)?;
    u64::try_from(bound).map_err(|_| symbolic())
}

#[derive(PartialEq, Eq)]
struct Snapshot {
    pc: usize,
    registers: RegisterFile,
}

/// Decides whether `seq` terminates on `inputs`. Inaction counts as not
/// halting.
pub fn decide_halts(
    seq: &InstructionSequence,
    inputs: &BitWord,
) -> Result<HaltReport, AnalysisError> {
    decide_halts_with(&Executor::default(), seq, inputs)
}

pub fn decide_halts_with(
    executor: &Executor,
    seq: &InstructionSequence,
    inputs: &BitWord,
) -> Result<HaltReport, AnalysisError> {
    let bound = state_bound(seq)?;
    let report = |verdict| Ok(HaltReport { verdict, bound });
    let mut state = MachineState::new(RegisterFile::with_inputs(inputs));
    let mut saved = Snapshot {
        pc: state.pc,
        registers: state.registers.clone(),
    };
    let mut power: u64 = 1;
    let mut lambda: u64 = 0;
    loop {
        if state.steps >= bound {
            return report(HaltVerdict::NeverHalts(Divergence::BoundExceeded));
        }
        match executor.step(seq, &mut state)? {
            Control::Terminated => return report(HaltVerdict::Halts { steps: state.steps }),
            Control::Inaction => {
                return report(HaltVerdict::NeverHalts(Divergence::Inaction {
                    pc: state.pc,
                }))
            }
            Control::Continue => {}
        }
        lambda += 1;
        if state.pc == saved.pc && state.registers == saved.registers {
            return report(HaltVerdict::NeverHalts(Divergence::StateRepeated {
                steps: state.steps,
            }));
        }
        if lambda == power {
            saved = Snapshot {
                pc: state.pc,
                registers: state.registers.clone(),
            };
            power *= 2;
            lambda = 0;
        }
    }
}

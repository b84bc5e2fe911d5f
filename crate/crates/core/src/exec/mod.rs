//! Deterministic execution against a Boolean register file.
//!
//! Every register starts at 0 except the inputs loaded by [`Executor::run`].
//! Termination happens only through `!`. A jump of distance 0, a transfer to
//! a position outside the sequence, or falling off the end is inaction, which
//! is reported as a terminal outcome rather than an actual hang.

mod equiv;
mod halting;

use std::collections::BTreeMap;
use std::fmt;

pub use equiv::{io_equivalent, Equivalence, InputMode, Observation};
pub use halting::{
    decide_halts, decide_halts_with, state_bound, Divergence, HaltReport, HaltVerdict,
};

use crate::error::{ComputeError, ExecError};
use crate::indexed::resolve_address;
use crate::seq::{BitWord, Command, Instruction, InstructionSequence, RegisterKind, RegisterRef};

/// Registers below this number live in a dense vector; the rest in a map.
const DENSE_LIMIT: u64 = 1 << 20;

#[derive(Clone, Debug, Default)]
struct Bank {
    dense: Vec<bool>,
    sparse: BTreeMap<u64, bool>,
}

impl Bank {
    fn read(&self, number: u64) -> bool {
        if number <= DENSE_LIMIT {
            self.dense
                .get(number as usize - 1)
                .copied()
                .unwrap_or(false)
        } else {
            self.sparse.get(&number).copied().unwrap_or(false)
        }
    }

    fn write(&mut self, number: u64, bit: bool) {
        if number <= DENSE_LIMIT {
            let i = number as usize - 1;
            if i >= self.dense.len() {
                if !bit {
                    return;
                }
                self.dense.resize(i + 1, false);
            }
            self.dense[i] = bit;
        } else if bit {
            self.sparse.insert(number, true);
        } else {
            self.sparse.remove(&number);
        }
    }

    fn ones(&self) -> impl Iterator<Item = u64> + '_ {
        self.dense
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i as u64 + 1)
            .chain(self.sparse.keys().copied())
    }
}

impl PartialEq for Bank {
    fn eq(&self, other: &Self) -> bool {
        let (short, long) = if self.dense.len() <= other.dense.len() {
            (&self.dense, &other.dense)
        } else {
            (&other.dense, &self.dense)
        };
        short[..] == long[..short.len()]
            && long[short.len()..].iter().all(|&b| !b)
            && self.sparse == other.sparse
    }
}

impl Eq for Bank {}

/// Contents of all Boolean registers. Absent registers read as 0.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RegisterFile {
    banks: [Bank; 3],
}

fn bank_index(kind: RegisterKind) -> usize {
    match kind {
        RegisterKind::Input => 0,
        RegisterKind::Output => 1,
        RegisterKind::Auxiliary => 2,
    }
}

impl RegisterFile {
    pub fn new() -> Self {
        Self::default()
    }

    /// A register file holding `inputs` in `in:1..`.
    pub fn with_inputs(inputs: &BitWord) -> Self {
        let mut regs = Self::new();
        for (i, &b) in inputs.bits().iter().enumerate() {
            regs.write(RegisterKind::Input, i as u64 + 1, b);
        }
        regs
    }

    pub fn read(&self, kind: RegisterKind, number: u64) -> bool {
        debug_assert!(number >= 1);
        self.banks[bank_index(kind)].read(number)
    }

    pub fn write(&mut self, kind: RegisterKind, number: u64, bit: bool) {
        debug_assert!(number >= 1);
        self.banks[bank_index(kind)].write(number, bit)
    }

    /// The `width`-bit word stored from `kind:base` upwards.
    pub fn word(&self, kind: RegisterKind, base: u64, width: usize) -> BitWord {
        BitWord::new(
            (0..width as u64)
                .map(|i| self.read(kind, base + i))
                .collect(),
        )
    }

    /// Contents of `out:1..out:m`.
    pub fn outputs(&self, m: usize) -> BitWord {
        self.word(RegisterKind::Output, 1, m)
    }

    /// Numbers of the registers of `kind` that hold 1, ascending.
    pub fn ones(&self, kind: RegisterKind) -> Vec<u64> {
        self.banks[bank_index(kind)].ones().collect()
    }

    /// Registers whose contents differ between `self` and `other`.
    pub fn diff(&self, other: &RegisterFile) -> Vec<(RegisterKind, u64)> {
        let mut out = Vec::new();
        for kind in RegisterKind::ALL {
            let mut numbers = self.ones(kind);
            numbers.extend(other.ones(kind));
            numbers.sort_unstable();
            numbers.dedup();
            out.extend(
                numbers
                    .into_iter()
                    .filter(|&n| self.read(kind, n) != other.read(kind, n))
                    .map(|n| (kind, n)),
            );
        }
        out
    }
}

/// Program counter, register file and executed-instruction count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MachineState {
    pub pc: usize,
    pub registers: RegisterFile,
    pub steps: u64,
}

impl MachineState {
    pub fn new(registers: RegisterFile) -> Self {
        Self {
            pc: 1,
            registers,
            steps: 0,
        }
    }
}

/// What a single step leads to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Control {
    Continue,
    Terminated,
    /// Inaction triggered by the instruction at `pc`.
    Inaction,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExecutionOutcome {
    Terminated {
        steps: u64,
        registers: RegisterFile,
    },
    Inaction {
        pc: usize,
        steps: u64,
        registers: RegisterFile,
    },
    BudgetExceeded {
        budget: u64,
        registers: RegisterFile,
    },
}

impl ExecutionOutcome {
    pub fn registers(&self) -> &RegisterFile {
        match self {
            Self::Terminated { registers, .. }
            | Self::Inaction { registers, .. }
            | Self::BudgetExceeded { registers, .. } => registers,
        }
    }

    pub fn steps(&self) -> u64 {
        match self {
            Self::Terminated { steps, .. } | Self::Inaction { steps, .. } => *steps,
            Self::BudgetExceeded { budget, .. } => *budget,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Terminated { .. } => "terminated",
            Self::Inaction { .. } => "inaction",
            Self::BudgetExceeded { .. } => "budget-exceeded",
        }
    }

    pub fn is_terminated(&self) -> bool {
        matches!(self, Self::Terminated { .. })
    }
}

impl fmt::Display for ExecutionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Terminated { steps, .. } => write!(f, "outcome=terminated steps={steps}"),
            Self::Inaction { pc, steps, .. } => {
                write!(f, "outcome=inaction steps={steps} pc={pc}")
            }
            Self::BudgetExceeded { budget, .. } => {
                write!(f, "outcome=budget-exceeded steps={budget}")
            }
        }
    }
}

/// Executor configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Executor {
    /// Whether indexed register references are resolved. When false, meeting
    /// one is a configuration error.
    pub indexed: bool,
}

impl Default for Executor {
    fn default() -> Self {
        Self { indexed: true }
    }
}

impl Executor {
    pub fn strict() -> Self {
        Self { indexed: false }
    }

    fn locate(&self, r: &RegisterRef, regs: &RegisterFile, pc: usize) -> Result<u64, ExecError> {
        if r.is_direct() {
            Ok(r.base())
        } else if self.indexed {
            Ok(resolve_address(r, regs).number)
        } else {
            Err(ExecError::IndexedDisabled { pc })
        }
    }

    /// Executes the instruction at `state.pc`. On `Continue`, `state.pc` is the
    /// next position; on `Inaction` it stays at the offending instruction.
    pub fn step(
        &self,
        seq: &InstructionSequence,
        state: &mut MachineState,
    ) -> Result<Control, ExecError> {
        let pc = state.pc;
        let ins = seq
            .at(pc)
            .ok_or(ExecError::PcOutOfRange { pc, len: seq.len() })?;
        state.steps += 1;
        let next = match *ins {
            Instruction::Halt => return Ok(Control::Terminated),
            Instruction::FwdJump(0) | Instruction::BwdJump(0) => return Ok(Control::Inaction),
            Instruction::FwdJump(l) => usize::try_from(l).ok().and_then(|l| pc.checked_add(l)),
            Instruction::BwdJump(l) => usize::try_from(l)
                .ok()
                .and_then(|l| pc.checked_sub(l))
                .filter(|&p| p >= 1),
            Instruction::Plain(a) | Instruction::PosTest(a) | Instruction::NegTest(a) => {
                let number = self.locate(&a.target, &state.registers, pc)?;
                let kind = a.target.kind();
                let reply = match a.command {
                    Command::Get => state.registers.read(kind, number),
                    Command::Set(b) => {
                        state.registers.write(kind, number, b);
                        b
                    }
                };
                let proceed = match ins {
                    Instruction::Plain(_) => true,
                    Instruction::PosTest(_) => reply,
                    _ => !reply,
                };
                Some(if proceed { pc + 1 } else { pc + 2 })
            }
        };
        match next {
            Some(p) if p <= seq.len() => {
                state.pc = p;
                Ok(Control::Continue)
            }
            _ => Ok(Control::Inaction),
        }
    }

    fn drive(
        &self,
        seq: &InstructionSequence,
        inputs: &BitWord,
        budget: u64,
        mut on_step: impl FnMut(usize),
    ) -> Result<ExecutionOutcome, ExecError> {
        if budget == 0 {
            return Err(ExecError::ZeroBudget);
        }
        let mut state = MachineState::new(RegisterFile::with_inputs(inputs));
        loop {
            if state.steps == budget {
                return Ok(ExecutionOutcome::BudgetExceeded {
                    budget,
                    registers: state.registers,
                });
            }
            on_step(state.pc);
            match self.step(seq, &mut state)? {
                Control::Continue => {}
                Control::Terminated => {
                    return Ok(ExecutionOutcome::Terminated {
                        steps: state.steps,
                        registers: state.registers,
                    })
                }
                Control::Inaction => {
                    return Ok(ExecutionOutcome::Inaction {
                        pc: state.pc,
                        steps: state.steps,
                        registers: state.registers,
                    })
                }
            }
        }
    }

    /// Runs from position 1 with `inputs` in `in:1..` until a terminal
    /// outcome or `budget` executed instructions.
    pub fn run(
        &self,
        seq: &InstructionSequence,
        inputs: &BitWord,
        budget: u64,
    ) -> Result<ExecutionOutcome, ExecError> {
        self.drive(seq, inputs, budget, |_| {})
    }

    /// Like [`Executor::run`], also counting how often each position executed.
    /// `hits[p]` is the count for position `p`; index 0 is unused.
    pub fn run_profiled(
        &self,
        seq: &InstructionSequence,
        inputs: &BitWord,
        budget: u64,
    ) -> Result<(ExecutionOutcome, Vec<u64>), ExecError> {
        let mut hits = vec![0u64; seq.len() + 1];
        let outcome = self.drive(seq, inputs, budget, |pc| hits[pc] += 1)?;
        Ok((outcome, hits))
    }

    /// Contents of `out:1..out:m` after a terminating run.
    pub fn compute(
        &self,
        seq: &InstructionSequence,
        inputs: &BitWord,
        m: usize,
        budget: u64,
    ) -> Result<BitWord, ComputeError> {
        match self.run(seq, inputs, budget)? {
            ExecutionOutcome::Terminated { registers, .. } => Ok(registers.outputs(m)),
            other => Err(ComputeError::NotTerminated(Box::new(other))),
        }
    }
}

/// [`Executor::run`] with indexed addressing enabled.
pub fn run(
    seq: &InstructionSequence,
    inputs: &BitWord,
    budget: u64,
) -> Result<ExecutionOutcome, ExecError> {
    Executor::default().run(seq, inputs, budget)
}

/// [`Executor::compute`] with indexed addressing enabled.
pub fn compute(
    seq: &InstructionSequence,
    inputs: &BitWord,
    m: usize,
    budget: u64,
) -> Result<BitWord, ComputeError> {
    Executor::default().compute(seq, inputs, m, budget)
}

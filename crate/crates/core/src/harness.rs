//! Oracle verification of gadgets and multiplication sequences.
//!
//! A gadget is checked inside a probe: its source words are loaded from the
//! inputs into auxiliary registers, the gadget runs, and the destination word
//! is copied to the outputs. Control-effect gadgets (TSTNZ, TSTNE) are followed
//! by `out:1.set:1 ; out:2.set:1 ; !`, so `11` means the next instruction ran
//! and `01` means it was skipped.
//!
//! Expected outputs come from integer arithmetic on the input values.

use std::fmt;

use rayon::prelude::*;

use crate::error::{GadgetError, VerifyError};
use crate::exec::{ExecutionOutcome, Executor, InputMode, Observation};
use crate::gadgets::{self, seq, set, GadgetKind};
use crate::indexed;
use crate::lmul::LmulVariant;
use crate::seq::{BitWord, Instruction, InstructionSequence, RegisterRef};

/// Widest word the arithmetic oracles handle.
pub const MAX_ORACLE_WIDTH: u64 = 64;

/// A gadget instantiation to probe.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GadgetProbe {
    pub kind: GadgetKind,
    pub n: u64,
    /// Shift or padding amount.
    pub amount: Option<u64>,
    /// Destination coincides with the (second, for ADD) source.
    pub in_place: bool,
}

impl GadgetProbe {
    pub fn new(kind: GadgetKind, n: u64) -> Self {
        Self {
            kind,
            n,
            amount: None,
            in_place: false,
        }
    }

    pub fn amount(mut self, m: u64) -> Self {
        self.amount = Some(m);
        self
    }

    pub fn in_place(mut self, yes: bool) -> Self {
        self.in_place = yes;
        self
    }

    /// Legal amounts for kinds that take one.
    pub fn legal_amounts(kind: GadgetKind, n: u64) -> Vec<u64> {
        match kind {
            GadgetKind::Shl | GadgetKind::Shr => (1..=n).collect(),
            GadgetKind::Zpad => (1..n).collect(),
            _ => Vec::new(),
        }
    }

    /// Whether the gadget has a separate in-place form to probe.
    pub fn has_in_place(kind: GadgetKind) -> bool {
        matches!(
            kind,
            GadgetKind::Dec
                | GadgetKind::Inc
                | GadgetKind::Shl
                | GadgetKind::Shr
                | GadgetKind::Add
                | GadgetKind::Mov
        )
    }

    /// Input width of the probe: both operands for ADD and TSTNE (source,
    /// then constant), one word otherwise.
    pub fn input_bits(&self) -> usize {
        let n = self.n as usize;
        match self.kind {
            GadgetKind::Add | GadgetKind::Tstne => 2 * n,
            _ => n,
        }
    }

    pub fn output_bits(&self) -> usize {
        if self.kind.is_control() {
            2
        } else {
            self.n as usize
        }
    }

    fn check(&self) -> Result<(), VerifyError> {
        if self.n == 0 {
            return Err(GadgetError::ZeroWidth.into());
        }
        if self.n > MAX_ORACLE_WIDTH {
            return Err(VerifyError::Unsupported(format!(
                "oracle supports widths up to {MAX_ORACLE_WIDTH}, got {}",
                self.n
            )));
        }
        if self.kind.takes_amount() != self.amount.is_some() {
            return Err(VerifyError::Unsupported(format!(
                "{} {} an amount",
                self.kind,
                if self.kind.takes_amount() {
                    "requires"
                } else {
                    "does not take"
                }
            )));
        }
        Ok(())
    }

    /// Arithmetic result for `input`.
    pub fn oracle(&self, input: &BitWord) -> BitWord {
        let n = self.n as usize;
        let mask = (1u128 << n) - 1;
        let v = input.slice(0, n).value().expect("width checked");
        let second = || input.slice(n, n).value().expect("width checked");
        let m = self.amount.unwrap_or(0);
        let control = |next_runs: bool| BitWord::new(vec![next_runs, true]);
        match self.kind {
            GadgetKind::Tstnz => control(v != 0),
            GadgetKind::Tstne => control(v != second()),
            GadgetKind::Dec => BitWord::from_value(v.wrapping_add(mask) & mask, n),
            GadgetKind::Inc => BitWord::from_value((v + 1) & mask, n),
            GadgetKind::Shl => BitWord::from_value((v << m) & mask, n),
            GadgetKind::Shr => BitWord::from_value(v >> m, n),
            GadgetKind::Add => BitWord::from_value((v + second()) & mask, n),
            GadgetKind::Set | GadgetKind::Mov => BitWord::from_value(v, n),
            GadgetKind::Zpad => BitWord::from_value(v & ((1 << m) - 1), n),
        }
    }

    /// The gadget on its own, with sources at `aux:2` and `aux:n+2`.
    pub fn gadget(&self, input: &BitWord) -> Result<InstructionSequence, VerifyError> {
        self.check()?;
        let n = self.n;
        let a = RegisterRef::aux(2);
        let b = RegisterRef::aux(n + 2);
        let d = if self.in_place {
            a
        } else {
            RegisterRef::aux(2 * n + 2)
        };
        let m = self.amount.unwrap_or(0);
        Ok(match self.kind {
            GadgetKind::Tstnz => gadgets::tstnz(n, a)?,
            GadgetKind::Tstne => indexed::tstne(n, a, &input.slice(n as usize, n as usize))?,
            GadgetKind::Dec => gadgets::dec(n, a, d)?,
            GadgetKind::Inc => indexed::inc(n, a, d)?,
            GadgetKind::Shl => gadgets::shl(n, m, a, d)?,
            GadgetKind::Shr => gadgets::shr(n, m, a, d)?,
            GadgetKind::Add => gadgets::add(n, a, b, if self.in_place { b } else { d })?,
            GadgetKind::Set => gadgets::set_word(input, d)?,
            GadgetKind::Mov => gadgets::mov(n, a, d)?,
            GadgetKind::Zpad => gadgets::zpad(n, m, a)?,
        })
    }

    /// Whether the probe program depends on the input (the constant of SET
    /// and TSTNE is part of the generated code).
    pub fn per_case(&self) -> bool {
        matches!(self.kind, GadgetKind::Set | GadgetKind::Tstne)
    }

    /// The complete probe program for `input`.
    pub fn program(&self, input: &BitWord) -> Result<InstructionSequence, VerifyError> {
        let n = self.n;
        let a = RegisterRef::aux(2);
        let b = RegisterRef::aux(n + 2);
        let mut items = Vec::new();
        if self.kind != GadgetKind::Set {
            items.extend(gadgets::mov(n, RegisterRef::input(1), a)?.into_items());
        }
        if self.kind == GadgetKind::Add {
            items.extend(gadgets::mov(n, RegisterRef::input(n + 1), b)?.into_items());
        }
        items.extend(self.gadget(input)?.into_items());
        if self.kind.is_control() {
            items.push(Instruction::Plain(set(RegisterRef::output(1), true)));
            items.push(Instruction::Plain(set(RegisterRef::output(2), true)));
        } else {
            let result = match self.kind {
                GadgetKind::Zpad => a,
                GadgetKind::Add if self.in_place => b,
                _ if self.in_place => a,
                _ => RegisterRef::aux(2 * n + 2),
            };
            items.extend(gadgets::mov(n, result, RegisterRef::output(1))?.into_items());
        }
        items.push(Instruction::Halt);
        Ok(seq(items))
    }
}

impl fmt::Display for GadgetProbe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} n={}", self.kind, self.n)?;
        if let Some(m) = self.amount {
            write!(f, " m={m}")?;
        }
        if self.in_place {
            f.write_str(" in-place")?;
        }
        Ok(())
    }
}

/// First input on which a program disagreed with its oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub input: BitWord,
    pub expected: BitWord,
    pub observed: Observation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub cases: u64,
    pub counterexample: Option<Counterexample>,
    /// Largest step count of any run.
    pub max_steps: u64,
    /// Every run took at most as many steps as its program has instructions.
    pub single_pass: bool,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.counterexample {
            None => write!(f, "pass cases={}", self.cases),
            Some(c) => write!(
                f,
                "fail cases={} in={} expected={} observed={}",
                self.cases, c.input, c.expected, c.observed
            ),
        }
    }
}

struct CaseResult {
    counterexample: Option<Counterexample>,
    steps: u64,
    single_pass: bool,
}

/// Checks `program(input)` against `oracle(input)` on every input of `mode`.
/// The reported counterexample is the first failing input in checking order.
/// `jobs = 0` uses the default thread count.
pub fn verify_with<P, O>(
    width: usize,
    outputs: usize,
    mode: InputMode,
    jobs: usize,
    program: P,
    oracle: O,
) -> Result<VerifyReport, VerifyError>
where
    P: Fn(&BitWord) -> Result<(InstructionSequence, u64), VerifyError> + Sync,
    O: Fn(&BitWord) -> BitWord + Sync,
{
    let inputs = mode.inputs(width)?;
    let executor = Executor::default();
    let check = |input: &BitWord| -> Result<CaseResult, VerifyError> {
        let (prog, budget) = program(input)?;
        let outcome = executor.run(&prog, input, budget)?;
        let steps = outcome.steps();
        let observed = Observation::from_outcome(&outcome, outputs);
        let expected = oracle(input);
        let ok = matches!(&outcome, ExecutionOutcome::Terminated { .. })
            && observed == Observation::Output(expected.clone());
        Ok(CaseResult {
            counterexample: (!ok).then(|| Counterexample {
                input: input.clone(),
                expected,
                observed,
            }),
            steps,
            single_pass: steps <= prog.len() as u64,
        })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| VerifyError::Unsupported(e.to_string()))?;
    let results: Vec<CaseResult> =
        pool.install(|| inputs.par_iter().map(check).collect::<Result<Vec<_>, _>>())?;
    Ok(VerifyReport {
        cases: inputs.len() as u64,
        max_steps: results.iter().map(|r| r.steps).max().unwrap_or(0),
        single_pass: results.iter().all(|r| r.single_pass),
        counterexample: results.into_iter().find_map(|r| r.counterexample),
    })
}

pub fn verify_gadget(
    probe: &GadgetProbe,
    mode: InputMode,
    jobs: usize,
) -> Result<VerifyReport, VerifyError> {
    probe.check()?;
    let shared = if probe.per_case() {
        None
    } else {
        Some(probe.program(&BitWord::repeat(false, probe.input_bits()))?)
    };
    verify_with(
        probe.input_bits(),
        probe.output_bits(),
        mode,
        jobs,
        |input| {
            let prog = match &shared {
                Some(p) => p.clone(),
                None => probe.program(input)?,
            };
            let budget = 4 * prog.len() as u64;
            Ok((prog, budget))
        },
        |input| probe.oracle(input),
    )
}

/// Native multiplication of the two halves of `input`.
pub fn product_oracle(input: &BitWord) -> BitWord {
    let n = input.len() / 2;
    let a = input.slice(0, n).value().expect("operands fit the oracle");
    let b = input.slice(n, n).value().expect("operands fit the oracle");
    BitWord::from_value(a * b, 2 * n)
}

pub fn verify_lmul(
    variant: LmulVariant,
    n: u64,
    mode: InputMode,
    jobs: usize,
) -> Result<VerifyReport, VerifyError> {
    if n > MAX_ORACLE_WIDTH {
        return Err(VerifyError::Unsupported(format!(
            "oracle supports widths up to {MAX_ORACLE_WIDTH}, got {n}"
        )));
    }
    let prog = variant.generate(n)?;
    let budget = variant.budget(n, prog.len());
    verify_with(
        2 * n as usize,
        2 * n as usize,
        mode,
        jobs,
        |_| Ok((prog.clone(), budget)),
        product_oracle,
    )
}

//! Input/output equivalence of two sequences.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{ExecutionOutcome, Executor};
use crate::error::AnalysisError;
use crate::seq::{BitWord, InstructionSequence};

/// Largest input width accepted for exhaustive enumeration.
pub const EXHAUSTIVE_LIMIT: usize = 24;

/// Which inputs to try.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputMode {
    /// Every input of the given width, in increasing numeric order.
    Exhaustive,
    /// `cases` inputs drawn from a ChaCha8 stream seeded with `seed`.
    Sampled { cases: u64, seed: u64 },
}

impl InputMode {
    /// The inputs of width `n`, in the order they are checked.
    pub fn inputs(&self, n: usize) -> Result<Vec<BitWord>, AnalysisError> {
        match *self {
            Self::Exhaustive => {
                if n > EXHAUSTIVE_LIMIT {
                    return Err(AnalysisError::TooManyInputs(n));
                }
                Ok((0..1u128 << n).map(|v| BitWord::from_value(v, n)).collect())
            }
            Self::Sampled { cases, seed } => {
                if cases == 0 {
                    return Err(AnalysisError::NoSamples);
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Ok((0..cases)
                    .map(|_| BitWord::new((0..n).map(|_| rng.random::<bool>()).collect()))
                    .collect())
            }
        }
    }
}

/// What a run produced, with all non-terminating outcomes of one kind
/// treated as equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Observation {
    Output(BitWord),
    Inaction,
    BudgetExceeded,
}

impl Observation {
    pub fn from_outcome(outcome: &ExecutionOutcome, m: usize) -> Self {
        match outcome {
            ExecutionOutcome::Terminated { registers, .. } => Self::Output(registers.outputs(m)),
            ExecutionOutcome::Inaction { .. } => Self::Inaction,
            ExecutionOutcome::BudgetExceeded { .. } => Self::BudgetExceeded,
        }
    }
}

impl fmt::Display for Observation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Output(w) => write!(f, "out={w}"),
            Self::Inaction => f.write_str("inaction"),
            Self::BudgetExceeded => f.write_str("budget-exceeded"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equivalence {
    Equivalent {
        cases: u64,
    },
    Witness {
        input: BitWord,
        left: Observation,
        right: Observation,
    },
}

impl Equivalence {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Self::Equivalent { .. })
    }
}

impl fmt::Display for Equivalence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Equivalent { cases } => write!(f, "Equivalent cases={cases}"),
            Self::Witness { input, left, right } => {
                write!(f, "Witness in={input} left:{left} right:{right}")
            }
        }
    }
}

/// Compares the first `m` outputs of `x` and `y` on `n`-bit inputs. The
/// reported witness is the first differing input in checking order regardless
/// of how work is split across threads.
pub fn io_equivalent(
    x: &InstructionSequence,
    y: &InstructionSequence,
    n: usize,
    m: usize,
    budget: u64,
    mode: InputMode,
) -> Result<Equivalence, AnalysisError> {
    let executor = Executor::default();
    let inputs = mode.inputs(n)?;
    let observe = |seq: &InstructionSequence, input: &BitWord| {
        executor
            .run(seq, input, budget)
            .map(|o| Observation::from_outcome(&o, m))
    };
    let first = inputs
        .par_iter()
        .map(|input| -> Result<Option<Equivalence>, AnalysisError> {
            let left = observe(x, input)?;
            let right = observe(y, input)?;
            Ok((left != right).then(|| Equivalence::Witness {
                input: input.clone(),
                left,
                right,
            }))
        })
        .find_first(|r| !matches!(r, Ok(None)));
    match first {
        None => Ok(Equivalence::Equivalent {
            cases: inputs.len() as u64,
        }),
        Some(r) => Ok(r?.expect("only witnesses and errors are selected")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse;

    #[test]
    fn zero_default_outputs_match_explicit_clear() {
        let x = parse("!").unwrap();
        let y = parse("out:1.set:0;!").unwrap();
        let r = io_equivalent(&x, &y, 0, 1, 10, InputMode::Exhaustive).unwrap();
        assert_eq!(r, Equivalence::Equivalent { cases: 1 });
    }

    #[test]
    fn differing_constant_gives_witness() {
        let x = parse("out:1.set:1;!").unwrap();
        let y = parse("!").unwrap();
        let r = io_equivalent(&x, &y, 0, 1, 10, InputMode::Exhaustive).unwrap();
        assert_eq!(
            r,
            Equivalence::Witness {
                input: BitWord::empty(),
                left: Observation::Output("1".parse().unwrap()),
                right: Observation::Output("0".parse().unwrap()),
            }
        );
    }

    #[test]
    fn witness_is_lowest_input() {
        // Copies in:1 unless in:2 and in:3 are both set; differs from a plain
        // copy only at input value 6 (LSB-first "011").
        let x = parse("+in:1.get;out:1.set:1;!").unwrap();
        let y = parse("-in:2.get;#5;-in:3.get;#3;out:1.set:1;!;+in:1.get;out:1.set:1;!").unwrap();
        let r = io_equivalent(&x, &y, 3, 1, 50, InputMode::Exhaustive).unwrap();
        match r {
            Equivalence::Witness { input, .. } => assert_eq!(input.to_string(), "011"),
            other => panic!("expected witness, got {other}"),
        }
    }

    #[test]
    fn budget_exhaustion_is_reported_not_raised() {
        let x = parse("#1;\\1").unwrap();
        let y = parse("!").unwrap();
        let r = io_equivalent(&x, &y, 1, 1, 20, InputMode::Exhaustive).unwrap();
        assert!(matches!(
            r,
            Equivalence::Witness {
                left: Observation::BudgetExceeded,
                ..
            }
        ));
    }

    #[test]
    fn sampled_inputs_are_reproducible() {
        let mode = InputMode::Sampled { cases: 50, seed: 7 };
        assert_eq!(mode.inputs(12).unwrap(), mode.inputs(12).unwrap());
        assert_ne!(
            mode.inputs(12).unwrap(),
            InputMode::Sampled { cases: 50, seed: 8 }
                .inputs(12)
                .unwrap()
        );
        assert!(InputMode::Exhaustive.inputs(25).is_err());
    }
}

//! Long multiplication of two `n`-bit words.
//!
//! The operands are read from `in:1..in:n` and `in:n+1..in:2n`; the `2n`-bit
//! product is written to `out:1..out:2n`. Intermediate words live in four
//! `2n`-register blocks of auxiliary registers above the carry register
//! `aux:1`.
//!
//! * [`LmulVariant::Lmul1`] adds the shifted multiplicand for each multiplier
//!   bit with its own copy of the step, at growing widths. Forward jumps only.
//! * [`LmulVariant::Lmul2`] shifts the multiplier right after each step so the
//!   tested bit is always bit 0, repeating one identical step `n` times.
//! * [`LmulVariant::Lmul3`] runs that step as a loop counted down from `n`
//!   with a backward jump.
//! * [`LmulVariant::Lmul4`] uses indexed addressing, see [`crate::indexed`].

use std::collections::HashMap;
use std::fmt;

use crate::error::LmulError;
use crate::exec::Executor;
use crate::gadgets::{self, get, seq, CARRY};
use crate::indexed;
use crate::seq::{BitWord, Instruction, InstructionSequence, RegisterRef};

/// `floor(log2(n))` for `n >= 1`.
pub fn floor_log2(n: u64) -> u64 {
    debug_assert!(n >= 1);
    u64::from(63 - n.leading_zeros())
}

/// Register assignments for operand width `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegisterLayout {
    pub n: u64,
}

impl RegisterLayout {
    pub fn new(n: u64) -> Result<Self, LmulError> {
        if n == 0 {
            return Err(LmulError::ZeroWidth);
        }
        Ok(Self { n })
    }

    /// First operand, `in:1`.
    pub fn i1(&self) -> RegisterRef {
        RegisterRef::input(1)
    }

    /// Second operand, `in:n+1`.
    pub fn i2(&self) -> RegisterRef {
        RegisterRef::input(self.n + 1)
    }

    /// Bit `j` of operand `which` (1 or 2).
    pub fn i_bit(&self, which: u64, j: u64) -> RegisterRef {
        debug_assert!((1..=2).contains(&which) && j < self.n);
        RegisterRef::input((which - 1) * self.n + j + 1)
    }

    /// The product, `out:1`.
    pub fn o(&self) -> RegisterRef {
        RegisterRef::output(1)
    }

    /// Temporary block `which` (>= 1), `aux:2n(which-1)+2`.
    pub fn t(&self, which: u64) -> RegisterRef {
        self.t_bit(which, 0)
    }

    /// Bit `j < 2n` of temporary block `which`.
    pub fn t_bit(&self, which: u64, j: u64) -> RegisterRef {
        debug_assert!(which >= 1 && j < 2 * self.n);
        RegisterRef::aux(2 * (which - 1) * self.n + j + 2)
    }

    pub fn carry(&self) -> RegisterRef {
        RegisterRef::aux(CARRY)
    }
}

pub fn layout(n: u64) -> Result<RegisterLayout, LmulError> {
    RegisterLayout::new(n)
}

/// The four multiplication sequence families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LmulVariant {
    Lmul1,
    Lmul2,
    Lmul3,
    Lmul4,
}

impl LmulVariant {
    pub const ALL: [LmulVariant; 4] = [Self::Lmul1, Self::Lmul2, Self::Lmul3, Self::Lmul4];

    pub fn number(self) -> u8 {
        match self {
            Self::Lmul1 => 1,
            Self::Lmul2 => 2,
            Self::Lmul3 => 3,
            Self::Lmul4 => 4,
        }
    }

    pub fn from_number(v: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|x| x.number() == v)
    }

    pub fn generate(self, n: u64) -> Result<InstructionSequence, LmulError> {
        match self {
            Self::Lmul1 => lmul1(n),
            Self::Lmul2 => lmul2(n),
            Self::Lmul3 => lmul3(n),
            Self::Lmul4 => indexed::lmul4(n),
        }
    }

    /// Closed-form length, where one is known independently of generation.
    pub fn closed_form_len(self, n: u64) -> Option<u64> {
        match self {
            Self::Lmul1 => Some(45 * n * n + 30 * n + 1),
            Self::Lmul2 => Some(64 * n * n + 16 * n + 1),
            Self::Lmul3 => Some(83 * n + 9 * floor_log2(n) + 12),
            Self::Lmul4 => None,
        }
    }

    /// Step budget that a correct sequence of length `len` never reaches.
    pub fn budget(self, n: u64, len: usize) -> u64 {
        let len = len as u64;
        match self {
            Self::Lmul1 | Self::Lmul2 => 4 * len,
            Self::Lmul3 => 4 * n * len,
            // Outer loop runs n times, each with loops of at most 2n rounds.
            Self::Lmul4 => 4 * (n + 1) * (2 * n + 1) * len,
        }
    }
}

impl fmt::Display for LmulVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LMUL{}", self.number())
    }
}

fn push(items: &mut Vec<Instruction>, part: InstructionSequence) {
    items.extend(part.into_items());
}

/// `MOV n(I1, T1) ; ZPAD 2n,n (T1)`.
fn load_multiplicand(l: &RegisterLayout, items: &mut Vec<Instruction>) -> Result<(), LmulError> {
    let n = l.n;
    push(items, gadgets::mov(n, l.i1(), l.t(1))?);
    push(items, gadgets::zpad(2 * n, n, l.t(1))?);
    Ok(())
}

/// The LMUL1 sequence together with its per-bit skip distances.
pub fn lmul1_with_offsets(n: u64) -> Result<(InstructionSequence, Vec<u64>), LmulError> {
    let l = layout(n)?;
    let mut items = Vec::new();
    load_multiplicand(&l, &mut items)?;
    push(
        &mut items,
        gadgets::set_word(&BitWord::repeat(false, 2 * n as usize), l.t(2))?,
    );
    let mut offsets = Vec::with_capacity(n as usize);
    for i in 0..n {
        let width = n + i + 1;
        let add = gadgets::add(width, l.t(1), l.t(2), l.t(2))?;
        let skip = add.len() as u64 + 1;
        offsets.push(skip);
        items.push(Instruction::NegTest(get(l.i_bit(2, i))));
        items.push(Instruction::FwdJump(skip));
        push(&mut items, add);
        push(&mut items, gadgets::shl(width, 1, l.t(1), l.t(1))?);
    }
    push(&mut items, gadgets::mov(2 * n, l.t(2), l.o())?);
    items.push(Instruction::Halt);
    Ok((seq(items), offsets))
}

pub fn lmul1(n: u64) -> Result<InstructionSequence, LmulError> {
    lmul1_with_offsets(n).map(|(s, _)| s)
}

/// `MOV n(I1,T1) ; ZPAD 2n,n(T1) ; MOV n(I2,T2) ; SET 2n(0,T3)`.
fn shifting_prologue(l: &RegisterLayout) -> Result<Vec<Instruction>, LmulError> {
    let n = l.n;
    let mut items = Vec::new();
    load_multiplicand(l, &mut items)?;
    push(&mut items, gadgets::mov(n, l.i2(), l.t(2))?);
    push(
        &mut items,
        gadgets::set_word(&BitWord::repeat(false, 2 * n as usize), l.t(3))?,
    );
    Ok(items)
}

/// One step of the shifting variant: conditionally add T1 into T3, then
/// shift T1 left and T2 right. Returns the step and its skip distance.
fn shifting_step(l: &RegisterLayout) -> Result<(Vec<Instruction>, u64), LmulError> {
    let n = l.n;
    let add = gadgets::add(2 * n, l.t(1), l.t(3), l.t(3))?;
    let skip = add.len() as u64 + 1;
    let mut items = vec![
        Instruction::NegTest(get(l.t_bit(2, 0))),
        Instruction::FwdJump(skip),
    ];
    push(&mut items, add);
    push(&mut items, gadgets::shl(2 * n, 1, l.t(1), l.t(1))?);
    push(&mut items, gadgets::shr(n, 1, l.t(2), l.t(2))?);
    Ok((items, skip))
}

fn product_epilogue(l: &RegisterLayout, items: &mut Vec<Instruction>) -> Result<(), LmulError> {
    push(items, gadgets::mov(2 * l.n, l.t(3), l.o())?);
    items.push(Instruction::Halt);
    Ok(())
}

pub fn lmul2(n: u64) -> Result<InstructionSequence, LmulError> {
    let l = layout(n)?;
    let mut items = shifting_prologue(&l)?;
    let (step, _) = shifting_step(&l)?;
    for _ in 0..n {
        items.extend_from_slice(&step);
    }
    product_epilogue(&l, &mut items)?;
    Ok(seq(items))
}

/// LMUL3 with the positions that define its loop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lmul3Parts {
    pub sequence: InstructionSequence,
    /// Skip distance of the conditional addition.
    pub l1: u64,
    /// Distance of the backward jump.
    pub l2: u64,
    /// 1-based position of the first instruction of the loop body.
    pub body_start: usize,
    /// 1-based position of the backward jump.
    pub back_jump: usize,
}

pub fn lmul3_parts(n: u64) -> Result<Lmul3Parts, LmulError> {
    let l = layout(n)?;
    let w = floor_log2(n) + 1;
    let mut items = shifting_prologue(&l)?;
    push(
        &mut items,
        gadgets::set_word(&BitWord::binary(u128::from(n)), l.t(4))?,
    );
    let body_start = items.len() + 1;
    let (step, l1) = shifting_step(&l)?;
    items.extend(step);
    push(&mut items, gadgets::dec(w, l.t(4), l.t(4))?);
    push(&mut items, gadgets::tstnz(w, l.t(4))?);
    let back_jump = items.len() + 1;
    let l2 = (back_jump - body_start) as u64;
    items.push(Instruction::BwdJump(l2));
    product_epilogue(&l, &mut items)?;
    Ok(Lmul3Parts {
        sequence: seq(items),
        l1,
        l2,
        body_start,
        back_jump,
    })
}

pub fn lmul3(n: u64) -> Result<InstructionSequence, LmulError> {
    lmul3_parts(n).map(|p| p.sequence)
}

/// Sequence lengths without materializing the quadratic variants.
///
/// LMUL3 and LMUL4 are generated in full. LMUL1 and LMUL2 are summed over
/// their generated parts; the width-dependent ADD and SHL parts of LMUL1 are
/// generated once per width, since gadget lengths do not depend on register
/// numbers.
#[derive(Debug, Default)]
pub struct LengthTable {
    add: HashMap<u64, u64>,
    shl: HashMap<u64, u64>,
}

impl LengthTable {
    pub fn new() -> Self {
        Self::default()
    }

    fn add_len(&mut self, width: u64) -> Result<u64, LmulError> {
        if let Some(&l) = self.add.get(&width) {
            return Ok(l);
        }
        let a = RegisterRef::aux(2);
        let l = gadgets::add(width, a, a.offset(width), a.offset(width))?.len() as u64;
        self.add.insert(width, l);
        Ok(l)
    }

    fn shl_len(&mut self, width: u64) -> Result<u64, LmulError> {
        if let Some(&l) = self.shl.get(&width) {
            return Ok(l);
        }
        let a = RegisterRef::aux(2);
        let l = gadgets::shl(width, 1, a, a)?.len() as u64;
        self.shl.insert(width, l);
        Ok(l)
    }

    pub fn len(&mut self, variant: LmulVariant, n: u64) -> Result<u64, LmulError> {
        let l = layout(n)?;
        match variant {
            LmulVariant::Lmul1 => {
                let mut fixed = Vec::new();
                load_multiplicand(&l, &mut fixed)?;
                push(
                    &mut fixed,
                    gadgets::set_word(&BitWord::repeat(false, 2 * n as usize), l.t(2))?,
                );
                product_epilogue(&l, &mut fixed)?;
                let mut total = fixed.len() as u64;
                for i in 0..n {
                    let width = n + i + 1;
                    total += 2 + self.add_len(width)? + self.shl_len(width)?;
                }
                Ok(total)
            }
            LmulVariant::Lmul2 => {
                let prologue = shifting_prologue(&l)?.len() as u64;
                let (step, _) = shifting_step(&l)?;
                let mut tail = Vec::new();
                product_epilogue(&l, &mut tail)?;
                Ok(prologue + n * step.len() as u64 + tail.len() as u64)
            }
            v => Ok(v.generate(n)?.len() as u64),
        }
    }
}

/// Multiplies `a` by `b` by running the `variant` sequence for their width.
pub fn multiply(variant: LmulVariant, a: &BitWord, b: &BitWord) -> Result<BitWord, LmulError> {
    let n = a.len();
    if n == 0 || b.len() != n {
        return Err(LmulError::OperandWidth {
            n,
            a: a.len(),
            b: b.len(),
        });
    }
    let program = variant.generate(n as u64)?;
    let budget = variant.budget(n as u64, program.len());
    Ok(Executor::default().compute(&program, &a.concat(b), 2 * n, budget)?)
}

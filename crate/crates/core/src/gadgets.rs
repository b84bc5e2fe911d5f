//! Generators for operations on `n`-bit words.
//!
//! A word of width `n` at `kind:base` occupies `kind:base .. kind:base+n-1`,
//! least significant bit first. Sources must be `in` or `aux` words and
//! destinations `aux` or `out` words. A destination may coincide fully with a
//! source but never partially.
//!
//! | gadget        | length                       |
//! |---------------|------------------------------|
//! | `tstnz(n)`    | `3n + 1`                     |
//! | `dec(n)`      | `5n + 3` in place, `11n + 1` otherwise |
//! | `shl(n, m)`   | `4n - 3m`                    |
//! | `shr(n, m)`   | `4n - 3m`                    |
//! | `add(n)`      | `26n + 1`                    |
//! | `set(n)`      | `n`                          |
//! | `mov(n)`      | `4n`                         |
//! | `zpad(n, m)`  | `n - m`                      |
//!
//! Jump distances inside every gadget follow from the layout of its blocks;
//! where a block is reused at a different width only the repetition count
//! changes.

use std::fmt;

use crate::error::GadgetError;
use crate::seq::{
    BasicInstruction, BitWord, Instruction, InstructionSequence, RegisterKind, RegisterRef,
};

/// The register holding the carry bit of [`add`].
pub const CARRY: u64 = 1;

/// An `n`-bit word stored from `kind:base` upwards.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WordRef {
    pub kind: RegisterKind,
    pub base: u64,
    pub width: u64,
}

impl WordRef {
    pub fn new(reg: RegisterRef, width: u64) -> Result<Self, GadgetError> {
        if !reg.is_direct() {
            return Err(GadgetError::IndexedOperand);
        }
        if width == 0 {
            return Err(GadgetError::ZeroWidth);
        }
        Ok(Self {
            kind: reg.kind(),
            base: reg.base(),
            width,
        })
    }

    pub fn bit(&self, i: u64) -> RegisterRef {
        debug_assert!(i < self.width);
        RegisterRef::direct(self.kind, self.base + i)
    }

    pub fn contains(&self, kind: RegisterKind, number: u64) -> bool {
        self.kind == kind && (self.base..self.base + self.width).contains(&number)
    }
}

impl fmt::Display for WordRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}[{}]", self.kind, self.base, self.width)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OverlapRelation {
    Disjoint,
    FullyCoinciding,
    PartiallyCoinciding,
}

/// Classifies two words by the width of `a`.
pub fn overlap(a: &WordRef, b: &WordRef) -> OverlapRelation {
    if a.kind != b.kind {
        return OverlapRelation::Disjoint;
    }
    match a.base.abs_diff(b.base) {
        0 => OverlapRelation::FullyCoinciding,
        d if d < a.width => OverlapRelation::PartiallyCoinciding,
        _ => OverlapRelation::Disjoint,
    }
}

fn check_source(word: &WordRef) -> Result<(), GadgetError> {
    match word.kind {
        RegisterKind::Input | RegisterKind::Auxiliary => Ok(()),
        k => Err(GadgetError::BadKind {
            role: "source",
            word: *word,
            kind: k.token(),
            allowed: "in, aux",
        }),
    }
}

fn check_destination(word: &WordRef) -> Result<(), GadgetError> {
    match word.kind {
        RegisterKind::Output | RegisterKind::Auxiliary => Ok(()),
        k => Err(GadgetError::BadKind {
            role: "destination",
            word: *word,
            kind: k.token(),
            allowed: "aux, out",
        }),
    }
}

/// Accepts `dst` against `srcs` iff every pair is disjoint or fully
/// coinciding and all kinds are permitted for their role.
pub fn validate_operands(dst: &WordRef, srcs: &[WordRef]) -> Result<(), GadgetError> {
    check_destination(dst)?;
    for src in srcs {
        check_source(src)?;
        if overlap(dst, src) == OverlapRelation::PartiallyCoinciding {
            return Err(GadgetError::PartialOverlap {
                dst: *dst,
                src: *src,
                width: dst.width,
                delta: dst.base.abs_diff(src.base),
            });
        }
    }
    Ok(())
}

pub(crate) fn get(r: RegisterRef) -> BasicInstruction {
    BasicInstruction::get(r)
}

pub(crate) fn set(r: RegisterRef, bit: bool) -> BasicInstruction {
    BasicInstruction::set(r, bit)
}

pub(crate) fn seq(items: Vec<Instruction>) -> InstructionSequence {
    InstructionSequence::new(items).expect("gadgets emit at least one instruction")
}

use Instruction::{FwdJump as Fwd, NegTest as Neg, Plain, PosTest as Pos};

/// `d := s` for one bit.
pub(crate) fn mov_bit(s: RegisterRef, d: RegisterRef) -> [Instruction; 4] {
    [Pos(get(s)), Fwd(2), Pos(set(d, false)), Plain(set(d, true))]
}

/// Length of one [`add_bit`] block.
pub(crate) const ADD_BLOCK: usize = 26;

/// One position of a ripple-carry adder: `d := s1 + s2 + c` with the carry
/// out left in `c`. `s2` may name the same register as `d`.
///
/// The block dispatches on `s1`, `s2` and `c` to one of four write tails:
/// `d:=0,c:=1` (offset 18), `d:=1,c:=0` (21), `d:=0` (24, via a failing set
/// reply) and `d:=1` (25). Every path leaves at offset 26.
pub(crate) fn add_bit(
    s1: RegisterRef,
    s2: RegisterRef,
    d: RegisterRef,
    c: RegisterRef,
) -> [Instruction; ADD_BLOCK] {
    [
        Pos(get(s1)),
        Fwd(4),
        Pos(get(s2)), // s1 = 0
        Fwd(7),
        Fwd(9),
        Pos(get(s2)), // s1 = 1
        Fwd(10),
        Pos(get(c)), // 1 0 c
        Fwd(10),
        Fwd(16),
        Pos(get(c)), // 0 1 c
        Fwd(7),
        Fwd(13),
        Pos(get(c)), // 0 0 c
        Fwd(7),
        Fwd(9),
        Pos(get(c)), // 1 1 c
        Fwd(8),
        Plain(set(d, false)),
        Plain(set(c, true)),
        Fwd(6),
        Plain(set(d, true)),
        Plain(set(c, false)),
        Fwd(3),
        Pos(set(d, false)),
        Plain(set(d, true)),
    ]
}

/// Test chain shared by TSTNZ and TSTNE: control reaches the first
/// instruction after the chain iff some bit differs from its expected value,
/// and the second one iff all bits match.
pub(crate) fn mismatch_chain(bits: &[(RegisterRef, bool)]) -> Vec<Instruction> {
    let mut out = Vec::with_capacity(3 * bits.len() + 1);
    for &(r, expected) in bits {
        // Proceeds to the #3 chain on mismatch, skips to #1 on match.
        out.push(if expected { Neg(get(r)) } else { Pos(get(r)) });
        out.push(Fwd(3));
        out.push(Fwd(1));
    }
    out.push(Fwd(2));
    out
}

/// In-place decrement (or increment, with `increment`) of the word whose
/// bits are `bits`, LSB first. `5w + 3` instructions.
pub(crate) fn step_in_place(bits: &[RegisterRef], increment: bool) -> Vec<Instruction> {
    let mut out = Vec::with_capacity(5 * bits.len() + 3);
    for &r in bits {
        // Decrement: a 1 is cleared and the borrow stops (the #5 chain runs
        // to the end); a 0 is set and the borrow moves on. Increment swaps
        // the roles of 0 and 1.
        out.push(if increment { Pos(get(r)) } else { Neg(get(r)) });
        out.push(Fwd(3));
        out.push(Plain(set(r, increment)));
        out.push(Fwd(5));
        out.push(Plain(set(r, !increment)));
    }
    out.extend([Fwd(1), Fwd(1), Fwd(1)]);
    out
}

/// Out-of-place decrement (or increment), reading only `src` and writing
/// only `dst`. Each bit has a copy part (entered once the ripple has stopped)
/// followed by a ripple part. `11w + 1` instructions.
fn step_copy(src: &WordRef, dst: &WordRef, increment: bool) -> Vec<Instruction> {
    let w = src.width;
    let mut out = Vec::with_capacity(11 * w as usize + 1);
    out.push(Fwd(6));
    for i in 0..w {
        let (s, d) = (src.bit(i), dst.bit(i));
        out.extend(mov_bit(s, d));
        out.push(Fwd(7));
        out.push(if increment { Pos(get(s)) } else { Neg(get(s)) });
        out.push(Fwd(3));
        out.push(Plain(set(d, increment)));
        out.push(Fwd(3));
        out.push(Plain(set(d, !increment)));
        out.push(Fwd(if i + 1 == w { 1 } else { 6 }));
    }
    out
}

fn word(reg: RegisterRef, n: u64) -> Result<WordRef, GadgetError> {
    WordRef::new(reg, n)
}

/// Test on nonzero: the instruction following the gadget is skipped iff the
/// word at `src` is zero.
pub fn tstnz(n: u64, src: RegisterRef) -> Result<InstructionSequence, GadgetError> {
    let src = word(src, n)?;
    check_source(&src)?;
    let bits: Vec<_> = (0..n).map(|i| (src.bit(i), false)).collect();
    Ok(seq(mismatch_chain(&bits)))
}

/// `dst := (src - 1) mod 2^n`.
pub fn dec(n: u64, src: RegisterRef, dst: RegisterRef) -> Result<InstructionSequence, GadgetError> {
    step_gadget(n, src, dst, false)
}

pub(crate) fn step_gadget(
    n: u64,
    src: RegisterRef,
    dst: RegisterRef,
    increment: bool,
) -> Result<InstructionSequence, GadgetError> {
    let (s, d) = (word(src, n)?, word(dst, n)?);
    validate_operands(&d, &[s])?;
    if overlap(&d, &s) == OverlapRelation::FullyCoinciding {
        let bits: Vec<_> = (0..n).map(|i| d.bit(i)).collect();
        Ok(seq(step_in_place(&bits, increment)))
    } else {
        Ok(seq(step_copy(&s, &d, increment)))
    }
}

fn check_shift(n: u64, m: u64) -> Result<(), GadgetError> {
    // m = n is accepted as pure zero fill, priced by the same formula.
    if m == 0 || m > n {
        return Err(GadgetError::ShiftOutOfRange { n, m });
    }
    Ok(())
}

/// `dst := (src * 2^m) mod 2^n`, for `0 < m <= n`. Writes descend from the
/// top bit, so `src = dst` is safe.
pub fn shl(
    n: u64,
    m: u64,
    src: RegisterRef,
    dst: RegisterRef,
) -> Result<InstructionSequence, GadgetError> {
    check_shift(n, m)?;
    let (s, d) = (word(src, n)?, word(dst, n)?);
    validate_operands(&d, &[s])?;
    let mut out = Vec::with_capacity((4 * n - 3 * m) as usize);
    for i in 0..n - m {
        out.extend(mov_bit(s.bit(n - 1 - m - i), d.bit(n - 1 - i)));
    }
    for i in 0..m {
        out.push(Plain(set(d.bit(m - 1 - i), false)));
    }
    Ok(seq(out))
}

/// `dst := src div 2^m`, for `0 < m <= n`. Writes ascend from the bottom
/// bit, so `src = dst` is safe.
pub fn shr(
    n: u64,
    m: u64,
    src: RegisterRef,
    dst: RegisterRef,
) -> Result<InstructionSequence, GadgetError> {
    check_shift(n, m)?;
    let (s, d) = (word(src, n)?, word(dst, n)?);
    validate_operands(&d, &[s])?;
    let mut out = Vec::with_capacity((4 * n - 3 * m) as usize);
    for i in 0..n - m {
        out.extend(mov_bit(s.bit(m + i), d.bit(i)));
    }
    for i in 0..m {
        out.push(Plain(set(d.bit(n - m + i), false)));
    }
    Ok(seq(out))
}

/// `dst := (src1 + src2) mod 2^n`, using `aux:1` for the carry.
pub fn add(
    n: u64,
    src1: RegisterRef,
    src2: RegisterRef,
    dst: RegisterRef,
) -> Result<InstructionSequence, GadgetError> {
    let (s1, s2, d) = (word(src1, n)?, word(src2, n)?, word(dst, n)?);
    validate_operands(&d, &[s1, s2])?;
    for w in [s1, s2, d] {
        if w.contains(RegisterKind::Auxiliary, CARRY) {
            return Err(GadgetError::CarryOverlap(w));
        }
    }
    let c = RegisterRef::aux(CARRY);
    let mut out = Vec::with_capacity(ADD_BLOCK * n as usize + 1);
    out.push(Plain(set(c, false)));
    for i in 0..n {
        out.extend(add_bit(s1.bit(i), s2.bit(i), d.bit(i), c));
    }
    Ok(seq(out))
}

/// Stores the constant `value` at `dst`.
pub fn set_word(value: &BitWord, dst: RegisterRef) -> Result<InstructionSequence, GadgetError> {
    let d = word(dst, value.len() as u64)?;
    check_destination(&d)?;
    Ok(seq(value
        .bits()
        .iter()
        .enumerate()
        .map(|(i, &b)| Plain(set(d.bit(i as u64), b)))
        .collect()))
}

/// `dst := src`.
pub fn mov(n: u64, src: RegisterRef, dst: RegisterRef) -> Result<InstructionSequence, GadgetError> {
    let (s, d) = (word(src, n)?, word(dst, n)?);
    validate_operands(&d, &[s])?;
    Ok(seq((0..n)
        .flat_map(|i| mov_bit(s.bit(i), d.bit(i)))
        .collect()))
}

/// Zero-extends the `m`-bit word at `dst` to `n` bits, `0 < m < n`.
pub fn zpad(n: u64, m: u64, dst: RegisterRef) -> Result<InstructionSequence, GadgetError> {
    if m == 0 || m >= n {
        return Err(GadgetError::PadOutOfRange { n, m });
    }
    check_destination(&word(dst, n)?)?;
    set_word(&BitWord::repeat(false, (n - m) as usize), dst.offset(m))
}

/// The parameterized operations, for harnesses and the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GadgetKind {
    Tstnz,
    Dec,
    Shl,
    Shr,
    Add,
    Set,
    Mov,
    Zpad,
    Inc,
    Tstne,
}

impl GadgetKind {
    pub const ALL: [GadgetKind; 10] = [
        Self::Tstnz,
        Self::Dec,
        Self::Shl,
        Self::Shr,
        Self::Add,
        Self::Set,
        Self::Mov,
        Self::Zpad,
        Self::Inc,
        Self::Tstne,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Tstnz => "tstnz",
            Self::Dec => "dec",
            Self::Shl => "shl",
            Self::Shr => "shr",
            Self::Add => "add",
            Self::Set => "set",
            Self::Mov => "mov",
            Self::Zpad => "zpad",
            Self::Inc => "inc",
            Self::Tstne => "tstne",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Whether the gadget reports through control flow instead of a word.
    pub fn is_control(self) -> bool {
        matches!(self, Self::Tstnz | Self::Tstne)
    }

    /// Whether the gadget takes a shift or padding amount.
    pub fn takes_amount(self) -> bool {
        matches!(self, Self::Shl | Self::Shr | Self::Zpad)
    }
}

impl fmt::Display for GadgetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::{run, ExecutionOutcome, RegisterFile};

    fn aux(n: u64) -> RegisterRef {
        RegisterRef::aux(n)
    }

    fn w(kind: RegisterKind, base: u64, width: u64) -> WordRef {
        WordRef { kind, base, width }
    }

    /// Runs `body ; !` from a register file with `aux` preloaded.
    fn run_with_aux(body: &InstructionSequence, preload: &[(u64, bool)]) -> RegisterFile {
        let mut items: Vec<Instruction> = preload
            .iter()
            .map(|&(n, b)| Plain(set(aux(n), b)))
            .collect();
        items.extend_from_slice(body.items());
        items.push(Instruction::Halt);
        match run(&seq(items), &BitWord::empty(), 100_000).unwrap() {
            ExecutionOutcome::Terminated { registers, .. } => registers,
            other => panic!("gadget did not terminate: {other}"),
        }
    }

    fn preload(base: u64, bits: &str) -> Vec<(u64, bool)> {
        bits.chars()
            .enumerate()
            .map(|(i, c)| (base + i as u64, c == '1'))
            .collect()
    }

    fn aux_word(regs: &RegisterFile, base: u64, n: usize) -> String {
        regs.word(RegisterKind::Auxiliary, base, n).to_string()
    }

    #[test]
    fn overlap_classification() {
        let a = w(RegisterKind::Auxiliary, 2, 4);
        assert_eq!(overlap(&a, &a), OverlapRelation::FullyCoinciding);
        assert_eq!(
            overlap(&a, &w(RegisterKind::Auxiliary, 4, 4)),
            OverlapRelation::PartiallyCoinciding
        );
        assert_eq!(
            overlap(&a, &w(RegisterKind::Auxiliary, 6, 4)),
            OverlapRelation::Disjoint
        );
        assert_eq!(
            overlap(
                &w(RegisterKind::Output, 1, 4),
                &w(RegisterKind::Input, 1, 4)
            ),
            OverlapRelation::Disjoint
        );
    }

    #[test]
    fn validator_examples() {
        let a2 = w(RegisterKind::Auxiliary, 2, 4);
        assert!(validate_operands(&a2, &[a2]).is_ok());
        let e = validate_operands(&a2, &[w(RegisterKind::Auxiliary, 4, 4)]).unwrap_err();
        assert!(
            matches!(e, GadgetError::PartialOverlap { delta: 2, .. }),
            "{e}"
        );
        assert!(validate_operands(
            &w(RegisterKind::Output, 1, 4),
            &[w(RegisterKind::Input, 1, 4)]
        )
        .is_ok());
        assert!(matches!(
            validate_operands(&w(RegisterKind::Input, 1, 4), &[]),
            Err(GadgetError::BadKind { .. })
        ));
        assert!(matches!(
            validate_operands(&a2, &[w(RegisterKind::Output, 9, 4)]),
            Err(GadgetError::BadKind { .. })
        ));
    }

    #[test]
    fn lengths_at_small_widths() {
        assert_eq!(tstnz(2, aux(5)).unwrap().len(), 7);
        assert_eq!(dec(2, aux(2), aux(2)).unwrap().len(), 13);
        assert_eq!(shl(4, 1, aux(2), aux(2)).unwrap().len(), 13);
        assert_eq!(shr(8, 3, aux(2), aux(2)).unwrap().len(), 23);
        assert_eq!(add(2, aux(2), aux(4), aux(4)).unwrap().len(), 53);
        assert_eq!(
            set_word(&BitWord::repeat(false, 6), aux(2)).unwrap().len(),
            6
        );
        assert_eq!(mov(8, RegisterRef::input(1), aux(2)).unwrap().len(), 32);
        assert_eq!(zpad(8, 3, aux(2)).unwrap().len(), 5);
    }

    #[test]
    fn dec_examples() {
        let g = dec(2, aux(2), aux(2)).unwrap();
        assert_eq!(aux_word(&run_with_aux(&g, &preload(2, "00")), 2, 2), "11");
        assert_eq!(aux_word(&run_with_aux(&g, &preload(2, "10")), 2, 2), "00");
        let g = dec(2, aux(2), aux(10)).unwrap();
        let mut pre = preload(2, "11");
        pre.extend(preload(10, "01"));
        assert_eq!(aux_word(&run_with_aux(&g, &pre), 10, 2), "01");
    }

    #[test]
    fn shift_examples() {
        let g = shl(4, 1, aux(2), aux(10)).unwrap();
        assert_eq!(
            aux_word(&run_with_aux(&g, &preload(2, "1010")), 10, 4),
            "0101"
        );
        let g = shl(4, 1, aux(2), aux(2)).unwrap();
        assert_eq!(
            aux_word(&run_with_aux(&g, &preload(2, "1000")), 2, 4),
            "0100"
        );
        let g = shr(4, 2, aux(2), aux(10)).unwrap();
        assert_eq!(
            aux_word(&run_with_aux(&g, &preload(2, "0011")), 10, 4),
            "1100"
        );
        let g = shr(2, 1, aux(2), aux(2)).unwrap();
        assert_eq!(aux_word(&run_with_aux(&g, &preload(2, "11")), 2, 2), "10");
        assert!(shl(4, 0, aux(2), aux(2)).is_err());
        assert!(shr(4, 5, aux(2), aux(2)).is_err());
        // m = n clears the word.
        let g = shr(1, 1, aux(2), aux(2)).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(aux_word(&run_with_aux(&g, &preload(2, "1")), 2, 1), "0");
    }

    #[test]
    fn add_examples() {
        let g = add(3, aux(2), aux(5), aux(8)).unwrap();
        let mut pre = preload(2, "110");
        pre.extend(preload(5, "010"));
        assert_eq!(aux_word(&run_with_aux(&g, &pre), 8, 3), "101");
        let g = add(2, aux(2), aux(4), aux(4)).unwrap();
        let mut pre = preload(2, "01");
        pre.extend(preload(4, "01"));
        assert_eq!(aux_word(&run_with_aux(&g, &pre), 4, 2), "00");
    }

    #[test]
    fn add_rejects_carry_operand() {
        assert!(matches!(
            add(2, aux(1), aux(4), aux(8)),
            Err(GadgetError::CarryOverlap(_))
        ));
        assert!(add(2, RegisterRef::input(1), RegisterRef::input(3), aux(2)).is_ok());
    }

    #[test]
    fn set_mov_zpad_examples() {
        let g = set_word(&"101".parse().unwrap(), aux(4)).unwrap();
        assert_eq!(aux_word(&run_with_aux(&g, &[]), 4, 3), "101");
        let g = mov(4, aux(2), aux(2)).unwrap();
        assert_eq!(
            aux_word(&run_with_aux(&g, &preload(2, "1011")), 2, 4),
            "1011"
        );
        let g = zpad(4, 2, aux(2)).unwrap();
        assert_eq!(
            aux_word(&run_with_aux(&g, &preload(2, "1111")), 2, 4),
            "1100"
        );
        let g = zpad(2, 1, aux(2)).unwrap();
        assert_eq!(aux_word(&run_with_aux(&g, &preload(2, "11")), 2, 2), "10");
        assert!(zpad(4, 4, aux(2)).is_err());
        assert!(set_word(&"1".parse().unwrap(), RegisterRef::input(1)).is_err());
    }

    #[test]
    fn tstnz_landing() {
        // out:1 is set only when the instruction after the gadget runs.
        for (bits, nonzero) in [("00", false), ("10", true), ("01", true), ("11", true)] {
            let g = tstnz(2, aux(5)).unwrap();
            let probe = g.concat(&seq(vec![
                Plain(set(RegisterRef::output(1), true)),
                Plain(set(RegisterRef::output(2), true)),
            ]));
            let regs = run_with_aux(&probe, &preload(5, bits));
            assert_eq!(regs.read(RegisterKind::Output, 1), nonzero, "{bits}");
            assert!(regs.read(RegisterKind::Output, 2));
        }
    }

    #[test]
    fn gadget_kind_names_round_trip() {
        for k in GadgetKind::ALL {
            assert_eq!(GadgetKind::from_name(k.name()), Some(k));
        }
    }
}

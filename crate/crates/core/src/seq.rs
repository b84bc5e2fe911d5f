//! Instruction sequences over Boolean registers.
//!
//! A sequence is a nonempty, finite list of primitive instructions. Basic
//! instructions name a Boolean register (`in`, `out` or `aux` plus a positive
//! number, optionally indexed by a word held in auxiliary registers) and issue
//! either `get` or `set:b` on it.

use std::fmt;

use crate::error::SeqError;

/// The three register kinds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegisterKind {
    Input,
    Output,
    Auxiliary,
}

impl RegisterKind {
    pub const ALL: [RegisterKind; 3] = [Self::Input, Self::Output, Self::Auxiliary];

    pub fn token(self) -> &'static str {
        match self {
            Self::Input => "in",
            Self::Output => "out",
            Self::Auxiliary => "aux",
        }
    }

    pub fn from_token(token: &str) -> Option<Self> {
        match token {
            "in" => Some(Self::Input),
            "out" => Some(Self::Output),
            "aux" => Some(Self::Auxiliary),
            _ => None,
        }
    }
}

impl fmt::Display for RegisterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// A block of `width` successive auxiliary registers starting at `aux:start`
/// whose contents, read LSB-first, form an index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct IndexBlock {
    start: u64,
    width: u32,
}

impl IndexBlock {
    pub fn new(start: u64, width: u32) -> Result<Self, SeqError> {
        if start == 0 {
            return Err(SeqError::ZeroRegister);
        }
        if width == 0 {
            return Err(SeqError::ZeroIndexWidth);
        }
        if width > 63 {
            return Err(SeqError::IndexTooWide(width));
        }
        Ok(Self { start, width })
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    /// Largest index value the block can hold.
    pub fn max_value(&self) -> u64 {
        (1u64 << self.width) - 1
    }

    /// Number of the last auxiliary register in the block.
    pub fn end(&self) -> u64 {
        self.start + u64::from(self.width) - 1
    }
}

/// Name of a Boolean register, either direct (`kind:base`) or indexed
/// (`kind:base(aux:start:width)`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RegisterRef {
    kind: RegisterKind,
    base: u64,
    index: Option<IndexBlock>,
}

impl RegisterRef {
    pub fn new(kind: RegisterKind, base: u64) -> Result<Self, SeqError> {
        if base == 0 {
            return Err(SeqError::ZeroRegister);
        }
        Ok(Self {
            kind,
            base,
            index: None,
        })
    }

    pub fn indexed(kind: RegisterKind, base: u64, index: IndexBlock) -> Result<Self, SeqError> {
        let mut r = Self::new(kind, base)?;
        r.index = Some(index);
        Ok(r)
    }

    /// Direct reference. Panics if `base` is zero.
    pub fn direct(kind: RegisterKind, base: u64) -> Self {
        Self::new(kind, base).expect("register numbers are positive")
    }

    pub fn input(base: u64) -> Self {
        Self::direct(RegisterKind::Input, base)
    }

    pub fn output(base: u64) -> Self {
        Self::direct(RegisterKind::Output, base)
    }

    pub fn aux(base: u64) -> Self {
        Self::direct(RegisterKind::Auxiliary, base)
    }

    pub fn kind(&self) -> RegisterKind {
        self.kind
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn index(&self) -> Option<IndexBlock> {
        self.index
    }

    pub fn is_direct(&self) -> bool {
        self.index.is_none()
    }

    /// The same reference moved `by` registers up, keeping any index block.
    pub fn offset(&self, by: u64) -> Self {
        Self {
            base: self.base + by,
            ..*self
        }
    }

    /// Replaces the index block.
    pub fn with_index(&self, index: IndexBlock) -> Self {
        Self {
            index: Some(index),
            ..*self
        }
    }
}

impl fmt::Display for RegisterRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind, self.base)?;
        if let Some(ix) = self.index {
            write!(f, "(aux:{}:{})", ix.start, ix.width)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Command {
    Get,
    Set(bool),
}

/// A register name paired with a command.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasicInstruction {
    pub target: RegisterRef,
    pub command: Command,
}

impl BasicInstruction {
    pub fn get(target: RegisterRef) -> Self {
        Self {
            target,
            command: Command::Get,
        }
    }

    pub fn set(target: RegisterRef, bit: bool) -> Self {
        Self {
            target,
            command: Command::Set(bit),
        }
    }

    /// `in` registers only support `get` and `out` registers only support `set`.
    pub fn is_well_formed(&self) -> bool {
        !matches!(
            (self.target.kind, self.command),
            (RegisterKind::Input, Command::Set(_)) | (RegisterKind::Output, Command::Get)
        )
    }
}

impl fmt::Display for BasicInstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.command {
            Command::Get => write!(f, "{}.get", self.target),
            Command::Set(b) => write!(f, "{}.set:{}", self.target, u8::from(b)),
        }
    }
}

/// A primitive instruction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Instruction {
    Plain(BasicInstruction),
    PosTest(BasicInstruction),
    NegTest(BasicInstruction),
    FwdJump(u64),
    BwdJump(u64),
    Halt,
}

impl Instruction {
    pub fn basic(&self) -> Option<&BasicInstruction> {
        match self {
            Self::Plain(a) | Self::PosTest(a) | Self::NegTest(a) => Some(a),
            _ => None,
        }
    }

    pub fn feature_level(&self) -> FeatureLevel {
        match self {
            Self::BwdJump(_) => FeatureLevel::BackwardJumps,
            _ => match self.basic() {
                Some(a) if !a.target.is_direct() => FeatureLevel::IndexedAddressing,
                _ => FeatureLevel::ForwardOnly,
            },
        }
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Plain(a) => write!(f, "{a}"),
            Self::PosTest(a) => write!(f, "+{a}"),
            Self::NegTest(a) => write!(f, "-{a}"),
            Self::FwdJump(l) => write!(f, "#{l}"),
            Self::BwdJump(l) => write!(f, "\\{l}"),
            Self::Halt => f.write_str("!"),
        }
    }
}

/// The least dialect a sequence needs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureLevel {
    ForwardOnly,
    BackwardJumps,
    IndexedAddressing,
}

impl FeatureLevel {
    pub fn name(self) -> &'static str {
        match self {
            Self::ForwardOnly => "forward-only",
            Self::BackwardJumps => "with-backward-jumps",
            Self::IndexedAddressing => "with-indexed-addressing",
        }
    }
}

impl fmt::Display for FeatureLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-kind upper bounds on the register numbers a sequence can touch.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RegisterBounds {
    pub max_in: u64,
    pub max_out: u64,
    pub max_aux: u64,
}

impl RegisterBounds {
    pub fn get(&self, kind: RegisterKind) -> u64 {
        match kind {
            RegisterKind::Input => self.max_in,
            RegisterKind::Output => self.max_out,
            RegisterKind::Auxiliary => self.max_aux,
        }
    }

    fn raise(&mut self, kind: RegisterKind, to: u64) {
        let slot = match kind {
            RegisterKind::Input => &mut self.max_in,
            RegisterKind::Output => &mut self.max_out,
            RegisterKind::Auxiliary => &mut self.max_aux,
        };
        *slot = (*slot).max(to);
    }
}

/// A nonempty finite instruction sequence. Positions are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InstructionSequence {
    items: Vec<Instruction>,
}

impl InstructionSequence {
    pub fn new(items: Vec<Instruction>) -> Result<Self, SeqError> {
        if items.is_empty() {
            return Err(SeqError::Empty);
        }
        Ok(Self { items })
    }

    pub fn single(instruction: Instruction) -> Self {
        Self {
            items: vec![instruction],
        }
    }

    pub fn items(&self) -> &[Instruction] {
        &self.items
    }

    pub fn into_items(self) -> Vec<Instruction> {
        self.items
    }

    /// Number of primitive instructions.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.items.len()
    }

    /// Instruction at 1-based `pos`.
    pub fn at(&self, pos: usize) -> Option<&Instruction> {
        pos.checked_sub(1).and_then(|i| self.items.get(i))
    }

    pub fn concat(&self, other: &InstructionSequence) -> InstructionSequence {
        let mut items = Vec::with_capacity(self.len() + other.len());
        items.extend_from_slice(&self.items);
        items.extend_from_slice(&other.items);
        Self { items }
    }

    /// `self` concatenated with itself `n` times; `n` must be positive.
    pub fn power(&self, n: usize) -> Result<InstructionSequence, SeqError> {
        if n == 0 {
            return Err(SeqError::ZeroPower);
        }
        let mut items = Vec::with_capacity(self.len() * n);
        for _ in 0..n {
            items.extend_from_slice(&self.items);
        }
        Ok(Self { items })
    }

    pub fn feature_level(&self) -> FeatureLevel {
        self.items
            .iter()
            .map(Instruction::feature_level)
            .max()
            .unwrap_or(FeatureLevel::ForwardOnly)
    }

    pub fn has_backward_jumps(&self) -> bool {
        self.items
            .iter()
            .any(|i| matches!(i, Instruction::BwdJump(_)))
    }

    pub fn has_indexed_refs(&self) -> bool {
        self.items
            .iter()
            .filter_map(Instruction::basic)
            .any(|a| !a.target.is_direct())
    }

    /// Upper bounds on register numbers reachable by the sequence. Indexed
    /// references count their largest effective address and their index block.
    pub fn required_registers(&self) -> RegisterBounds {
        let mut bounds = RegisterBounds::default();
        for a in self.items.iter().filter_map(Instruction::basic) {
            let r = a.target;
            match r.index {
                None => bounds.raise(r.kind, r.base),
                Some(ix) => {
                    bounds.raise(r.kind, r.base + ix.max_value());
                    bounds.raise(RegisterKind::Auxiliary, ix.end());
                }
            }
        }
        bounds
    }

    /// Position (1-based) of the first `in.set` or `out.get`, if any.
    pub fn first_ill_formed(&self) -> Option<usize> {
        self.items
            .iter()
            .position(|i| i.basic().is_some_and(|a| !a.is_well_formed()))
            .map(|p| p + 1)
    }

    pub fn check_well_formed(&self) -> Result<(), SeqError> {
        match self.first_ill_formed() {
            None => Ok(()),
            Some(pos) => Err(SeqError::IllFormed {
                position: pos,
                instruction: self.items[pos - 1].to_string(),
            }),
        }
    }
}

impl fmt::Display for InstructionSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, ins) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{ins}")?;
        }
        Ok(())
    }
}

/// A finite bit string, position 0 least significant.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitWord {
    bits: Vec<bool>,
}

impl BitWord {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// `b` repeated `n` times.
    pub fn repeat(bit: bool, n: usize) -> Self {
        Self { bits: vec![bit; n] }
    }

    /// The low `width` bits of `value`, LSB-first.
    pub fn from_value(value: u128, width: usize) -> Self {
        Self {
            bits: (0..width)
                .map(|i| i < 128 && (value >> i) & 1 == 1)
                .collect(),
        }
    }

    /// Shortest binary representation of `value` (at least one bit).
    pub fn binary(value: u128) -> Self {
        let width = (128 - value.leading_zeros()).max(1) as usize;
        Self::from_value(value, width)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits.get(i).copied().unwrap_or(false)
    }

    /// Numeric value, or `None` if it does not fit in 128 bits.
    pub fn value(&self) -> Option<u128> {
        let mut v: u128 = 0;
        for (i, &b) in self.bits.iter().enumerate() {
            if b {
                if i >= 128 {
                    return None;
                }
                v |= 1 << i;
            }
        }
        Some(v)
    }

    pub fn concat(&self, other: &BitWord) -> BitWord {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        Self { bits }
    }

    pub fn slice(&self, start: usize, len: usize) -> BitWord {
        Self {
            bits: (start..start + len).map(|i| self.bit(i)).collect(),
        }
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for BitWord {
    type Err = SeqError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(SeqError::BadBit(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BitWord::new)
    }
}

impl From<Vec<bool>> for BitWord {
    fn from(bits: Vec<bool>) -> Self {
        Self::new(bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(items: Vec<Instruction>) -> InstructionSequence {
        InstructionSequence::new(items).unwrap()
    }

    #[test]
    fn concat_places_left_first() {
        let s = seq(vec![Instruction::Halt]).concat(&seq(vec![Instruction::FwdJump(1)]));
        assert_eq!(s.items(), &[Instruction::Halt, Instruction::FwdJump(1)]);
    }

    #[test]
    fn concat_is_additive_and_associative() {
        let a = seq(vec![Instruction::Halt; 3]);
        let b = seq(vec![Instruction::FwdJump(2); 5]);
        let c = seq(vec![Instruction::BwdJump(1)]);
        assert_eq!(a.concat(&b).len(), 8);
        assert_eq!(a.concat(&b).concat(&c), a.concat(&b.concat(&c)));
    }

    #[test]
    fn power_matches_recursive_definition() {
        let x = seq(vec![Instruction::Halt, Instruction::FwdJump(3)]);
        assert_eq!(x.power(1).unwrap(), x);
        assert_eq!(x.power(3).unwrap().len(), 6);
        assert_eq!(x.power(4).unwrap(), x.concat(&x.power(3).unwrap()));
        assert_eq!(x.power(0), Err(SeqError::ZeroPower));
        let seven = seq(vec![Instruction::Halt; 7]);
        assert_eq!(seven.power(5).unwrap().len(), 35);
    }

    #[test]
    fn empty_sequence_rejected() {
        assert_eq!(InstructionSequence::new(vec![]), Err(SeqError::Empty));
    }

    #[test]
    fn required_registers_direct_and_indexed() {
        let s = seq(vec![
            Instruction::PosTest(BasicInstruction::get(RegisterRef::input(4))),
            Instruction::Halt,
        ]);
        let b = s.required_registers();
        assert_eq!((b.max_in, b.max_out, b.max_aux), (4, 0, 0));

        let ix = IndexBlock::new(2, 3).unwrap();
        let r = RegisterRef::indexed(RegisterKind::Output, 1, ix).unwrap();
        let s = seq(vec![Instruction::Plain(BasicInstruction::set(r, true))]);
        let b = s.required_registers();
        assert_eq!((b.max_in, b.max_out, b.max_aux), (0, 8, 4));
    }

    #[test]
    fn well_formedness_rejects_in_set_and_out_get() {
        let bad = seq(vec![
            Instruction::Halt,
            Instruction::Plain(BasicInstruction::set(RegisterRef::input(1), true)),
        ]);
        assert_eq!(bad.first_ill_formed(), Some(2));
        let bad = seq(vec![Instruction::PosTest(BasicInstruction::get(
            RegisterRef::output(1),
        ))]);
        assert!(bad.check_well_formed().is_err());
        let good = seq(vec![
            Instruction::Plain(BasicInstruction::get(RegisterRef::aux(1))),
            Instruction::Plain(BasicInstruction::set(RegisterRef::aux(1), false)),
        ]);
        assert!(good.check_well_formed().is_ok());
    }

    #[test]
    fn feature_levels() {
        let fwd = seq(vec![Instruction::FwdJump(1), Instruction::Halt]);
        assert_eq!(fwd.feature_level(), FeatureLevel::ForwardOnly);
        let bwd = seq(vec![Instruction::BwdJump(1), Instruction::Halt]);
        assert_eq!(bwd.feature_level(), FeatureLevel::BackwardJumps);
        let r = RegisterRef::aux(7).with_index(IndexBlock::new(1, 1).unwrap());
        let ind = seq(vec![
            Instruction::BwdJump(1),
            Instruction::Plain(BasicInstruction::get(r)),
        ]);
        assert_eq!(ind.feature_level(), FeatureLevel::IndexedAddressing);
    }

    #[test]
    fn bitword_value_and_repeat() {
        let w: BitWord = "1011".parse().unwrap();
        assert_eq!(w.value(), Some(13));
        assert_eq!(BitWord::from_value(13, 4), w);
        let r = BitWord::repeat(true, 5);
        assert_eq!(r.len(), 5);
        assert!(r.bits().iter().all(|&b| b));
        assert_eq!(BitWord::binary(4).to_string(), "001");
        assert_eq!(BitWord::binary(0).to_string(), "0");
        assert!("10x".parse::<BitWord>().is_err());
    }

    #[test]
    fn register_kind_tokens_are_a_bijection() {
        for k in RegisterKind::ALL {
            assert_eq!(RegisterKind::from_token(k.token()), Some(k));
        }
        assert_eq!(RegisterKind::from_token("tmp"), None);
    }
}

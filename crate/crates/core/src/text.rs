//! Text format for instruction sequences.
//!
//! ```text
//! sequence := instr (';' instr)*
//! instr    := '+' basic | '-' basic | basic | '#' nat | '\' nat | '!'
//! basic    := ref '.' cmd          cmd := 'get' | 'set:0' | 'set:1'
//! ref      := kind ':' posnat [ '(' 'aux' ':' posnat ':' posnat ')' ]
//! kind     := 'in' | 'out' | 'aux'
//! ```
//!
//! Whitespace and newlines may surround every token. A `#` starts a forward
//! jump only where an instruction is expected and a digit follows immediately;
//! otherwise it starts a comment running to the end of the line, and must then
//! be preceded by whitespace (or the start of input).
//!
//! The canonical form produced by [`serialize`] joins instructions with `;`
//! and no whitespace.

use crate::error::ParseError;
use crate::seq::{
    BasicInstruction, Command, IndexBlock, Instruction, InstructionSequence, RegisterKind,
    RegisterRef,
};

pub fn serialize(seq: &InstructionSequence) -> String {
    seq.to_string()
}

pub fn parse(text: &str) -> Result<InstructionSequence, ParseError> {
    Parser::new(text).sequence()
}

impl std::str::FromStr for InstructionSequence {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    /// 1-based index of the instruction being parsed.
    instr: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            src: text.as_bytes(),
            pos: 0,
            instr: 1,
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn peek_at(&self, ahead: usize) -> Option<u8> {
        self.src.get(self.pos + ahead).copied()
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let consumed = &self.src[..self.pos.min(self.src.len())];
        let line = consumed.iter().filter(|&&b| b == b'\n').count() + 1;
        let column = self.pos
            - consumed
                .iter()
                .rposition(|&b| b == b'\n')
                .map_or(0, |p| p + 1)
            + 1;
        ParseError {
            position: self.instr,
            line,
            column,
            message: message.into(),
        }
    }

    fn describe_current(&self) -> String {
        match self.peek() {
            None => "end of input".to_string(),
            Some(b) => format!("{:?}", b as char),
        }
    }

    /// Skips whitespace and comments. `instruction_next` is true where an
    /// instruction is expected, so `#` plus digit is left for the jump parser.
    fn skip_trivia(&mut self, instruction_next: bool) -> Result<(), ParseError> {
        loop {
            while self.peek().is_some_and(|b| b.is_ascii_whitespace()) {
                self.pos += 1;
            }
            if self.peek() != Some(b'#') {
                return Ok(());
            }
            if instruction_next && self.peek_at(1).is_some_and(|b| b.is_ascii_digit()) {
                return Ok(());
            }
            let after_space = self.pos == 0 || self.src[self.pos - 1].is_ascii_whitespace();
            if !after_space {
                return Err(self.error("a comment must be preceded by whitespace"));
            }
            while self.peek().is_some_and(|b| b != b'\n') {
                self.pos += 1;
            }
        }
    }

    fn sequence(mut self) -> Result<InstructionSequence, ParseError> {
        let mut items = Vec::new();
        self.skip_trivia(true)?;
        if self.peek().is_none() {
            return Err(self.error("empty instruction sequence"));
        }
        loop {
            items.push(self.instruction()?);
            self.skip_trivia(false)?;
            match self.peek() {
                None => break,
                Some(b';') => {
                    self.pos += 1;
                    self.instr += 1;
                    self.skip_trivia(true)?;
                    if self.peek().is_none() {
                        return Err(self.error("expected an instruction after ';'"));
                    }
                }
                Some(_) => {
                    return Err(self.error(format!(
                        "expected ';' or end of input, found {}",
                        self.describe_current()
                    )))
                }
            }
        }
        Ok(InstructionSequence::new(items).expect("at least one instruction parsed"))
    }

    fn instruction(&mut self) -> Result<Instruction, ParseError> {
        let ins = match self.peek() {
            Some(b'!') => {
                self.pos += 1;
                Instruction::Halt
            }
            Some(b'#') => {
                self.pos += 1;
                Instruction::FwdJump(self.nat()?)
            }
            Some(b'\\') => {
                self.pos += 1;
                Instruction::BwdJump(self.nat()?)
            }
            Some(b'+') => {
                self.pos += 1;
                Instruction::PosTest(self.basic()?)
            }
            Some(b'-') => {
                self.pos += 1;
                Instruction::NegTest(self.basic()?)
            }
            Some(b) if b.is_ascii_alphabetic() => Instruction::Plain(self.basic()?),
            _ => {
                return Err(self.error(format!(
                    "expected an instruction, found {}",
                    self.describe_current()
                )))
            }
        };
        match self.peek() {
            None | Some(b';') => Ok(ins),
            Some(b) if b.is_ascii_whitespace() => Ok(ins),
            Some(b'#') => Err(self.error("a comment must be preceded by whitespace")),
            Some(_) => Err(self.error(format!(
                "unexpected {} after instruction",
                self.describe_current()
            ))),
        }
    }

    fn nat(&mut self) -> Result<u64, ParseError> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error(format!(
                "expected a number, found {}",
                self.describe_current()
            )));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        digits
            .parse()
            .map_err(|_| self.error(format!("number {digits} is too large")))
    }

    fn posnat(&mut self) -> Result<u64, ParseError> {
        let n = self.nat()?;
        if n == 0 {
            return Err(self.error("register numbers are positive"));
        }
        Ok(n)
    }

    fn expect(&mut self, literal: &str) -> Result<(), ParseError> {
        if self.src[self.pos..].starts_with(literal.as_bytes()) {
            self.pos += literal.len();
            Ok(())
        } else {
            Err(self.error(format!(
                "expected {literal:?}, found {}",
                self.describe_current()
            )))
        }
    }

    fn kind(&mut self) -> Result<RegisterKind, ParseError> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_alphabetic()) {
            self.pos += 1;
        }
        let word = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii letters");
        RegisterKind::from_token(word).ok_or_else(|| {
            self.pos = start;
            self.error(format!("unknown register kind {word:?}"))
        })
    }

    fn basic(&mut self) -> Result<BasicInstruction, ParseError> {
        let kind = self.kind()?;
        self.expect(":")?;
        let base = self.posnat()?;
        let target = if self.peek() == Some(b'(') {
            self.pos += 1;
            self.expect("aux:")?;
            let start = self.posnat()?;
            self.expect(":")?;
            let width = self.posnat()?;
            self.expect(")")?;
            let width = u32::try_from(width).map_err(|_| self.error("index width too large"))?;
            let block = IndexBlock::new(start, width).map_err(|e| self.error(e.to_string()))?;
            RegisterRef::indexed(kind, base, block).map_err(|e| self.error(e.to_string()))?
        } else {
            RegisterRef::new(kind, base).map_err(|e| self.error(e.to_string()))?
        };
        self.expect(".")?;
        let command = if self.src[self.pos..].starts_with(b"get") {
            self.pos += 3;
            Command::Get
        } else if self.src[self.pos..].starts_with(b"set:0") {
            self.pos += 5;
            Command::Set(false)
        } else if self.src[self.pos..].starts_with(b"set:1") {
            self.pos += 5;
            Command::Set(true)
        } else {
            return Err(self.error(format!(
                "expected 'get', 'set:0' or 'set:1', found {}",
                self.describe_current()
            )));
        };
        Ok(BasicInstruction { target, command })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn get(r: RegisterRef) -> BasicInstruction {
        BasicInstruction::get(r)
    }

    #[test]
    fn serializes_token_by_token() {
        let s = InstructionSequence::new(vec![
            Instruction::PosTest(get(RegisterRef::input(1))),
            Instruction::FwdJump(2),
            Instruction::Halt,
        ])
        .unwrap();
        assert_eq!(serialize(&s), "+in:1.get;#2;!");

        let s = InstructionSequence::new(vec![
            Instruction::NegTest(get(RegisterRef::aux(3))),
            Instruction::BwdJump(12),
        ])
        .unwrap();
        assert_eq!(serialize(&s), "-aux:3.get;\\12");

        let r = RegisterRef::output(1).with_index(IndexBlock::new(9, 3).unwrap());
        let s = InstructionSequence::single(Instruction::Plain(BasicInstruction::set(r, true)));
        assert_eq!(serialize(&s), "out:1(aux:9:3).set:1");
    }

    #[test]
    fn zero_jump_is_legal_syntax() {
        let s = parse("#0").unwrap();
        assert_eq!(s.items(), &[Instruction::FwdJump(0)]);
    }

    #[test]
    fn zero_register_rejected_with_position() {
        let e = parse("!;in:0.get").unwrap_err();
        assert_eq!(e.position, 2);
        assert!(e.message.contains("positive"), "{e}");
        assert!(parse("aux:1(aux:0:2).get").is_err());
        assert!(parse("aux:1(aux:2:0).get").is_err());
    }

    #[test]
    fn canonical_round_trip() {
        for s in [
            "+in:1.get;#2;!",
            "-aux:3.get;\\12",
            "out:1(aux:9:3).set:1",
            "aux:4.set:0;+out:2.set:1;-in:7(aux:1:2).get;#0;\\0;!",
        ] {
            assert_eq!(serialize(&parse(s).unwrap()), s);
        }
    }

    #[test]
    fn whitespace_newlines_and_comments() {
        let text = "# leading comment\n+in:1.get ;  # skip when zero\n  #2 ;\n\t! # done\n";
        assert_eq!(serialize(&parse(text).unwrap()), "+in:1.get;#2;!");
        // A '#' followed by a non-digit in instruction position is a comment.
        assert_eq!(serialize(&parse("!; # note\n#3").unwrap()), "!;#3");
    }

    #[test]
    fn comment_requires_preceding_whitespace() {
        let e = parse("!# trailing").unwrap_err();
        assert!(e.message.contains("whitespace"), "{e}");
        assert!(parse(";# x\n!").is_err());
    }

    #[test]
    fn syntax_errors() {
        for bad in [
            "",
            "   ",
            "# only a comment",
            "!;",
            "!;;!",
            "#",
            "#12abc",
            "reg:1.get",
            "in:1.put",
            "in:1.set:2",
            "in:1",
            "+!",
            "in:1(out:2:1).get",
            "in:1(aux:2:1.get",
            "! !",
        ] {
            assert!(parse(bad).is_err(), "{bad:?} should not parse");
        }
        let e = parse("!;!;\n  #x").unwrap_err();
        assert_eq!((e.position, e.line), (3, 2));
    }
}

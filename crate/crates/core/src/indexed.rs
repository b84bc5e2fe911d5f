//! Indexed addressing: address resolution, the counter gadgets INC and
//! TSTNE, and the logarithmic-length multiplication LMUL4.
//!
//! An indexed reference `kind:base(aux:start:width)` names register
//! `kind:(base + v)` where `v` is the LSB-first value of `aux:start ..
//! aux:start+width-1` at the moment the instruction executes.
//!
//! LMUL4 keeps the layout of the other variants (multiplicand in `T1`, product
//! accumulated in `T2`, both `2n` bits) and replaces every per-bit repetition
//! by a loop over a counter held in an index zone starting at `aux:8n+2`:
//!
//! ```text
//! K  aux:8n+2            w2 = floor(log2(2n-1)) + 1 bits, ranges over 0..2n
//! J  aux:8n+2+w2         w1 = floor(log2 n) + 1 bits, ranges over 0..n
//! I  aux:8n+2+w2+w1      w1 bits, ranges over 0..n
//! t  aux:4n+2            one scratch bit
//! ```
//!
//! Every loop counts up from 0 and runs its body at least once:
//! `SET(0, X) ; body ; INC(X) ; TSTNE(X, bound) ; \back`.

use crate::error::{GadgetError, LmulError};
use crate::exec::RegisterFile;
use crate::gadgets::{
    self, add_bit, get, mismatch_chain, mov_bit, seq, set, step_gadget, WordRef, CARRY,
};
use crate::lmul::{floor_log2, layout};
use crate::seq::{
    BitWord, IndexBlock, Instruction, InstructionSequence, RegisterKind, RegisterRef,
};

/// A resolved register name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EffectiveAddress {
    pub kind: RegisterKind,
    pub number: u64,
}

/// Resolves `r` against the current register contents.
pub fn resolve_address(r: &RegisterRef, regs: &RegisterFile) -> EffectiveAddress {
    let number = match r.index() {
        None => r.base(),
        Some(ix) => {
            let offset = (0..u64::from(ix.width()))
                .filter(|&i| regs.read(RegisterKind::Auxiliary, ix.start() + i))
                .fold(0u64, |acc, i| acc | (1 << i));
            r.base() + offset
        }
    };
    EffectiveAddress {
        kind: r.kind(),
        number,
    }
}

/// `dst := (src + 1) mod 2^w`. `5w + 3` instructions in place, `11w + 1`
/// otherwise.
pub fn inc(w: u64, src: RegisterRef, dst: RegisterRef) -> Result<InstructionSequence, GadgetError> {
    step_gadget(w, src, dst, true)
}

/// Test on not equal: the instruction following the gadget is skipped iff
/// the word at `src` equals `constant`. `3w + 1` instructions.
pub fn tstne(
    w: u64,
    src: RegisterRef,
    constant: &BitWord,
) -> Result<InstructionSequence, GadgetError> {
    if constant.len() as u64 != w {
        return Err(GadgetError::WidthMismatch {
            expected: w,
            found: constant.len() as u64,
        });
    }
    let s = WordRef::new(src, w)?;
    if s.kind == RegisterKind::Output {
        return Err(GadgetError::BadKind {
            role: "source",
            word: s,
            kind: s.kind.token(),
            allowed: "in, aux",
        });
    }
    let bits: Vec<_> = (0..w)
        .map(|i| (s.bit(i), constant.bit(i as usize)))
        .collect();
    Ok(seq(mismatch_chain(&bits)))
}

/// Counter widths and register positions used by [`lmul4`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lmul4Layout {
    pub n: u64,
    /// Width of the bit-position counters `J` and `I`.
    pub w1: u32,
    /// Width of the `2n`-position counter `K`.
    pub w2: u32,
    pub k: IndexBlock,
    pub j: IndexBlock,
    pub i: IndexBlock,
    pub temp: RegisterRef,
}

impl Lmul4Layout {
    pub fn new(n: u64) -> Result<Self, LmulError> {
        layout(n)?;
        let w1 = floor_log2(n) as u32 + 1;
        let w2 = floor_log2(2 * n - 1) as u32 + 1;
        let zone = 8 * n + 2;
        let block = |start, width| IndexBlock::new(start, width).expect("index widths are small");
        Ok(Self {
            n,
            w1,
            w2,
            k: block(zone, w2),
            j: block(zone + u64::from(w2), w1),
            i: block(zone + u64::from(w2) + u64::from(w1), w1),
            temp: RegisterRef::aux(4 * n + 2),
        })
    }
}

fn indexed(kind: RegisterKind, base: u64, ix: IndexBlock) -> RegisterRef {
    RegisterRef::direct(kind, base).with_index(ix)
}

/// `counter := 0 ; do { body ; counter += 1 } while counter != bound`.
fn count_up(
    counter: IndexBlock,
    bound: u64,
    body: Vec<Instruction>,
) -> Result<Vec<Instruction>, GadgetError> {
    let w = u64::from(counter.width());
    let reg = RegisterRef::aux(counter.start());
    let bound = BitWord::from_value(u128::from(bound % (1 << w)), w as usize);
    let mut out = gadgets::set_word(&BitWord::repeat(false, w as usize), reg)?.into_items();
    let inc = inc(w, reg, reg)?.into_items();
    let test = tstne(w, reg, &bound)?.into_items();
    let back = (body.len() + inc.len() + test.len()) as u64;
    out.extend(body);
    out.extend(inc);
    out.extend(test);
    out.push(Instruction::BwdJump(back));
    Ok(out)
}

/// `x, t := t, x`, where `t` is the scratch bit. 13 instructions.
fn rotate(x: RegisterRef, t: RegisterRef) -> Vec<Instruction> {
    let mut out = vec![Instruction::PosTest(get(x)), Instruction::FwdJump(7)];
    out.extend(mov_bit(t, x));
    out.push(Instruction::Plain(set(t, false)));
    out.push(Instruction::FwdJump(6));
    out.extend(mov_bit(t, x));
    out.push(Instruction::Plain(set(t, true)));
    out
}

pub fn lmul4(n: u64) -> Result<InstructionSequence, LmulError> {
    use RegisterKind::{Auxiliary as Aux, Input, Output};
    let x = Lmul4Layout::new(n)?;
    let (t1, t2) = (2, 2 * n + 2);
    let mut items = Vec::new();

    // T1 := I1 zero-padded to 2n bits, T2 := 0.
    let mut body: Vec<Instruction> =
        mov_bit(indexed(Input, 1, x.j), indexed(Aux, t1, x.j)).to_vec();
    for base in [t1 + n, t2, t2 + n] {
        body.push(Instruction::Plain(set(indexed(Aux, base, x.j), false)));
    }
    items.extend(count_up(x.j, n, body)?);

    // T2 := T2 + T1 for each set bit of I2, shifting T1 left after each bit.
    let c = RegisterRef::aux(CARRY);
    let mut add = vec![Instruction::Plain(set(c, false))];
    add.extend(count_up(
        x.k,
        2 * n,
        add_bit(
            indexed(Aux, t1, x.k),
            indexed(Aux, t2, x.k),
            indexed(Aux, t2, x.k),
            c,
        )
        .to_vec(),
    )?);
    let mut outer = vec![
        Instruction::NegTest(get(indexed(Input, n + 1, x.i))),
        Instruction::FwdJump(add.len() as u64 + 1),
    ];
    outer.extend(add);
    outer.push(Instruction::Plain(set(x.temp, false)));
    for half in [t1, t1 + n] {
        outer.extend(count_up(x.j, n, rotate(indexed(Aux, half, x.j), x.temp))?);
    }
    items.extend(count_up(x.i, n, outer)?);

    // O := T2.
    let mut body = mov_bit(indexed(Aux, t2, x.j), indexed(Output, 1, x.j)).to_vec();
    body.extend(mov_bit(
        indexed(Aux, t2 + n, x.j),
        indexed(Output, n + 1, x.j),
    ));
    items.extend(count_up(x.j, n, body)?);
    items.push(Instruction::Halt);
    Ok(seq(items))
}

/// Constants of `len(LMUL4 n) = a*floor(log2 n) + b*floor(log2(2n-1)) + c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LengthConstants {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl LengthConstants {
    pub fn predict(&self, n: u64) -> i64 {
        self.a * floor_log2(n) as i64 + self.b * floor_log2(2 * n - 1) as i64 + self.c
    }
}

/// Solves for the constants from the lengths at `n = 2, 3, 4`, whose
/// regressor pairs `(1,1)`, `(1,2)`, `(2,2)` are independent.
pub fn lmul4_length_constants() -> Result<LengthConstants, LmulError> {
    let len = |n| lmul4(n).map(|s| s.len() as i64);
    let (l2, l3, l4) = (len(2)?, len(3)?, len(4)?);
    let a = l4 - l3;
    let b = l3 - l2;
    Ok(LengthConstants {
        a,
        b,
        c: l2 - a - b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::{run, ExecutionOutcome};
    use crate::lmul::{multiply, LmulVariant};
    use crate::seq::FeatureLevel;
    use crate::text::parse;

    fn regs_with_aux(bits: &[(u64, bool)]) -> RegisterFile {
        let mut r = RegisterFile::new();
        for &(n, b) in bits {
            r.write(RegisterKind::Auxiliary, n, b);
        }
        r
    }

    #[test]
    fn resolve_examples() {
        let r = parse("in:1(aux:9:3).get").unwrap().items()[0]
            .basic()
            .unwrap()
            .target;
        let regs = regs_with_aux(&[(9, true), (10, false), (11, true)]);
        assert_eq!(
            resolve_address(&r, &regs),
            EffectiveAddress {
                kind: RegisterKind::Input,
                number: 6
            }
        );
        let r = indexed(RegisterKind::Auxiliary, 7, IndexBlock::new(1, 1).unwrap());
        assert_eq!(resolve_address(&r, &RegisterFile::new()).number, 7);
        let r = indexed(RegisterKind::Output, 1, IndexBlock::new(2, 2).unwrap());
        assert_eq!(
            resolve_address(&r, &regs_with_aux(&[(2, true), (3, true)])).number,
            4
        );
        let d = RegisterRef::output(3);
        assert_eq!(resolve_address(&d, &regs).number, 3);
    }

    fn run_body(body: &InstructionSequence, pre: &[(u64, bool)]) -> RegisterFile {
        let mut items: Vec<Instruction> = pre
            .iter()
            .map(|&(n, b)| Instruction::Plain(set(RegisterRef::aux(n), b)))
            .collect();
        items.extend_from_slice(body.items());
        items.push(Instruction::Halt);
        match run(&seq(items), &BitWord::empty(), 10_000).unwrap() {
            ExecutionOutcome::Terminated { registers, .. } => registers,
            other => panic!("{other}"),
        }
    }

    #[test]
    fn inc_examples() {
        let a = RegisterRef::aux(2);
        let g = inc(2, a, a).unwrap();
        let word = |r: RegisterFile| r.word(RegisterKind::Auxiliary, 2, 2).to_string();
        assert_eq!(word(run_body(&g, &[(2, false), (3, false)])), "10");
        assert_eq!(word(run_body(&g, &[(2, true), (3, true)])), "00");
        assert_eq!(inc(3, a, a).unwrap().len(), 18);
    }

    #[test]
    fn tstne_examples() {
        let probe = |src: &str, constant: &str| {
            let c: BitWord = constant.parse().unwrap();
            let g = tstne(2, RegisterRef::aux(5), &c).unwrap();
            let g = g.concat(&parse("out:1.set:1;out:2.set:1").unwrap());
            let pre: Vec<_> = src
                .chars()
                .enumerate()
                .map(|(i, ch)| (5 + i as u64, ch == '1'))
                .collect();
            run_body(&g, &pre).read(RegisterKind::Output, 1)
        };
        assert!(!probe("10", "10"));
        assert!(probe("00", "10"));
        assert!(tstne(2, RegisterRef::aux(5), &"1".parse().unwrap()).is_err());
        assert!(
            tstne(3, RegisterRef::aux(5), &"000".parse().unwrap())
                .unwrap()
                .len()
                <= 14
        );
    }

    #[test]
    fn lmul4_small_products() {
        let p = multiply(
            LmulVariant::Lmul4,
            &"11".parse().unwrap(),
            &"11".parse().unwrap(),
        )
        .unwrap();
        assert_eq!(p.to_string(), "1001");
        let p = multiply(
            LmulVariant::Lmul4,
            &"1".parse().unwrap(),
            &"1".parse().unwrap(),
        )
        .unwrap();
        assert_eq!(p.to_string(), "10");
    }

    #[test]
    fn lmul4_is_logarithmic() {
        let k = lmul4_length_constants().unwrap();
        assert_eq!(
            k,
            LengthConstants {
                a: 45,
                b: 9,
                c: 156
            }
        );
        for n in [1u64, 5, 6, 17, 100, 1000] {
            assert_eq!(lmul4(n).unwrap().len() as i64, k.predict(n));
        }
    }

    #[test]
    fn lmul4_feature_level() {
        assert_eq!(
            lmul4(3).unwrap().feature_level(),
            FeatureLevel::IndexedAddressing
        );
    }

    #[test]
    fn index_zone_above_layout() {
        for n in 1..=20 {
            let x = Lmul4Layout::new(n).unwrap();
            assert!(x.k.start() > layout(n).unwrap().t_bit(4, 2 * n - 1).base());
            assert_eq!(x.k.end() + 1, x.j.start());
            assert_eq!(x.j.end() + 1, x.i.start());
            assert!(x.temp.base() < x.k.start());
        }
    }
}

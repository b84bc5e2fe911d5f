use proptest::prelude::*;

use boolseq::exec::{run, ExecutionOutcome, RegisterFile};
use boolseq::gadgets::{self, GadgetKind};
use boolseq::harness::GadgetProbe;
use boolseq::indexed::{inc, resolve_address, tstne};
use boolseq::seq::{
    BasicInstruction, BitWord, IndexBlock, Instruction, InstructionSequence, RegisterKind,
    RegisterRef,
};
use boolseq::text::{parse, serialize};

fn kind() -> impl Strategy<Value = RegisterKind> {
    prop_oneof![
        Just(RegisterKind::Input),
        Just(RegisterKind::Output),
        Just(RegisterKind::Auxiliary)
    ]
}

fn reference() -> impl Strategy<Value = RegisterRef> {
    (kind(), 1u64..12, proptest::option::of((1u64..8, 1u32..4))).prop_map(
        |(k, base, ix)| match ix {
            None => RegisterRef::direct(k, base),
            Some((start, width)) => {
                RegisterRef::direct(k, base).with_index(IndexBlock::new(start, width).unwrap())
            }
        },
    )
}

fn instruction(backward: bool) -> impl Strategy<Value = Instruction> {
    let basic = (reference(), proptest::option::of(any::<bool>()))
        .prop_map(|(r, c)| match c {
            None => BasicInstruction::get(r),
            Some(b) => BasicInstruction::set(r, b),
        })
        .boxed();
    let max_back = if backward { 6 } else { 0 };
    prop_oneof![
        basic.clone().prop_map(Instruction::Plain),
        basic.clone().prop_map(Instruction::PosTest),
        basic.prop_map(Instruction::NegTest),
        (0u64..6).prop_map(Instruction::FwdJump),
        (0u64..=max_back).prop_map(move |l| if backward {
            Instruction::BwdJump(l)
        } else {
            Instruction::FwdJump(l)
        }),
        Just(Instruction::Halt),
    ]
}

fn sequence(backward: bool) -> impl Strategy<Value = InstructionSequence> {
    proptest::collection::vec(instruction(backward), 1..30)
        .prop_map(|v| InstructionSequence::new(v).unwrap())
}

fn bits(n: usize) -> impl Strategy<Value = BitWord> {
    proptest::collection::vec(any::<bool>(), n).prop_map(BitWord::new)
}

fn run_with_aux(body: &InstructionSequence, base: u64, word: &BitWord) -> RegisterFile {
    let mut items: Vec<Instruction> = word
        .bits()
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            Instruction::Plain(BasicInstruction::set(RegisterRef::aux(base + i as u64), b))
        })
        .collect();
    items.extend_from_slice(body.items());
    items.push(Instruction::Halt);
    match run(
        &InstructionSequence::new(items).unwrap(),
        &BitWord::empty(),
        100_000,
    )
    .unwrap()
    {
        ExecutionOutcome::Terminated { registers, .. } => registers,
        other => panic!("{other}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 512, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn text_round_trip(seq in sequence(true)) {
        let text = serialize(&seq);
        prop_assert_eq!(parse(&text).unwrap(), seq);
    }

    #[test]
    fn runs_are_deterministic(seq in sequence(true), input in bits(8)) {
        prop_assert_eq!(run(&seq, &input, 200).unwrap(), run(&seq, &input, 200).unwrap());
    }

    #[test]
    fn forward_only_runs_finish_within_length(seq in sequence(false), input in bits(8)) {
        let o = run(&seq, &input, seq.len() as u64 + 1).unwrap();
        let exceeded = matches!(o, ExecutionOutcome::BudgetExceeded { .. });
        prop_assert!(!exceeded);
        prop_assert!(o.steps() <= seq.len() as u64);
    }

    #[test]
    fn raising_budget_keeps_terminal_outcomes(seq in sequence(true), input in bits(8), b in 1u64..60) {
        let low = run(&seq, &input, b).unwrap();
        let high = run(&seq, &input, b + 100).unwrap();
        if !matches!(low, ExecutionOutcome::BudgetExceeded { .. }) {
            prop_assert_eq!(low, high);
        }
    }

    #[test]
    fn direct_refs_resolve_to_themselves(k in kind(), base in 1u64..1000, aux in bits(16)) {
        let mut regs = RegisterFile::new();
        for (i, &b) in aux.bits().iter().enumerate() {
            regs.write(RegisterKind::Auxiliary, i as u64 + 1, b);
        }
        let a = resolve_address(&RegisterRef::direct(k, base), &regs);
        prop_assert_eq!((a.kind, a.number), (k, base));
    }

    #[test]
    fn inc_then_dec_is_identity(w in 1u64..=8, word in bits(8)) {
        let word = word.slice(0, w as usize);
        let a = RegisterRef::aux(2);
        let both = inc(w, a, a).unwrap().concat(&gadgets::dec(w, a, a).unwrap());
        let regs = run_with_aux(&both, 2, &word);
        prop_assert_eq!(regs.word(RegisterKind::Auxiliary, 2, w as usize), word);
    }

    #[test]
    fn tstne_zero_lands_like_tstnz(w in 1u64..=6, word in bits(6)) {
        let word = word.slice(0, w as usize);
        let a = RegisterRef::aux(5);
        let tail = parse("out:1.set:1;out:2.set:1").unwrap();
        let x = tstne(w, a, &BitWord::repeat(false, w as usize)).unwrap().concat(&tail);
        let y = gadgets::tstnz(w, a).unwrap().concat(&tail);
        prop_assert_eq!(run_with_aux(&x, 5, &word), run_with_aux(&y, 5, &word));
    }

    #[test]
    fn gadgets_write_only_their_destination(
        k in prop::sample::select(GadgetKind::ALL.to_vec()),
        n in 2u64..=6,
        in_place in any::<bool>(),
        input in bits(12),
    ) {
        let mut probe = GadgetProbe::new(k, n).in_place(in_place && GadgetProbe::has_in_place(k));
        if k.takes_amount() {
            probe = probe.amount(1);
        }
        let input = input.slice(0, probe.input_bits());
        let mut g = probe.gadget(&input).unwrap();
        if k.is_control() {
            g = g.concat(&parse("out:1.set:1;out:2.set:1").unwrap());
        }
        // Preload both source words, then diff against the preload alone.
        let pre = input.concat(&BitWord::repeat(false, (2 * n) as usize - input.len().min(2 * n as usize)));
        let before = run_with_aux(&parse("aux:1.set:0").unwrap(), 2, &pre);
        let after = run_with_aux(&g, 2, &pre);
        let dst_base = match k {
            GadgetKind::Zpad => 2,
            GadgetKind::Add if probe.in_place => n + 2,
            _ if probe.in_place => 2,
            _ => 2 * n + 2,
        };
        for (kind, number) in before.diff(&after) {
            let in_dst = kind == RegisterKind::Auxiliary && (dst_base..dst_base + n).contains(&number);
            let carry = k == GadgetKind::Add && kind == RegisterKind::Auxiliary && number == 1;
            let landing = k.is_control() && kind == RegisterKind::Output && number <= 2;
            prop_assert!(in_dst && !k.is_control() || carry || landing, "{} wrote {}:{}", probe, kind, number);
        }
    }
}

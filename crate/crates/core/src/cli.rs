//! The `boolseq` command line.
//!
//! Exit codes: 0 success, 1 usage, parse or validation error, 2 inaction,
//! 3 budget exceeded, 4 failed check (verification, equivalence, `len
//! --check`), 5 halting bound refused.

use std::fs;
use std::io::{Read, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::AnalysisError;
use crate::exec::{decide_halts_with, io_equivalent, ExecutionOutcome, Executor, InputMode};
use crate::gadgets::{self, GadgetKind};
use crate::harness::{verify_gadget, verify_lmul, GadgetProbe, VerifyReport};
use crate::indexed::{self, lmul4_length_constants};
use crate::lmul::{LengthTable, LmulVariant};
use crate::seq::{BitWord, InstructionSequence, RegisterKind, RegisterRef};
use crate::text::parse;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INACTION: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_CHECK_FAILED: i32 = 4;
pub const EXIT_BOUND_REFUSED: i32 = 5;

/// Default step budget of `run` and `equiv`.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Parser, Debug)]
#[command(
    name = "boolseq",
    version,
    about = "Generate, run and verify instruction sequences over Boolean registers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a gadget or multiplication sequence.
    #[command(subcommand)]
    Gen(GenTarget),
    /// Execute a sequence on an input.
    Run(RunArgs),
    /// Check a generator against its arithmetic oracle.
    #[command(subcommand)]
    Verify(VerifyTarget),
    /// Tabulate multiplication sequence lengths.
    Len(LenArgs),
    /// Compare two sequences on all or sampled inputs.
    Equiv(EquivArgs),
    /// Decide whether a sequence halts on an input.
    Halts(HaltsArgs),
}

#[derive(Subcommand, Debug)]
enum GenTarget {
    Gadget(Box<GenGadgetArgs>),
    Lmul(GenLmulArgs),
}

#[derive(Subcommand, Debug)]
enum VerifyTarget {
    Gadget(VerifyGadgetArgs),
    Lmul(VerifyLmulArgs),
}

#[derive(Args, Debug)]
struct GenGadgetArgs {
    #[arg(long, value_parser = parse_kind)]
    kind: GadgetKind,
    /// Word width. Defaults to the length of --value for set.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: Option<u64>,
    /// Shift amount (shl, shr) or original width (zpad).
    #[arg(long)]
    m: Option<u64>,
    #[arg(long, value_parser = parse_ref)]
    src: Option<RegisterRef>,
    #[arg(long, value_parser = parse_ref)]
    src1: Option<RegisterRef>,
    #[arg(long, value_parser = parse_ref)]
    src2: Option<RegisterRef>,
    #[arg(long, value_parser = parse_ref)]
    dst: Option<RegisterRef>,
    /// Constant word for set and tstne, LSB first.
    #[arg(long, value_parser = parse_bits)]
    value: Option<BitWord>,
    /// Write the sequence here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenLmulArgs {
    #[arg(long, value_parser = parse_variant)]
    variant: LmulVariant,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ModeArgs {
    /// `exhaustive`, or `sample K` for K pseudo-random inputs.
    #[arg(long, num_args = 1..=2, value_names = ["MODE", "K"], default_value = "exhaustive")]
    mode: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ModeArgs {
    fn input_mode(&self) -> Result<InputMode, String> {
        match self.mode.as_slice() {
            [m] if m == "exhaustive" => Ok(InputMode::Exhaustive),
            [m, k] if m == "sample" => {
                let cases = k
                    .parse::<u64>()
                    .map_err(|e| format!("invalid sample count {k:?}: {e}"))?;
                Ok(InputMode::Sampled {
                    cases,
                    seed: self.seed,
                })
            }
            [m] if m == "sample" => Err("--mode sample needs a case count".to_string()),
            other => Err(format!(
                "invalid --mode {:?}, expected exhaustive or sample K",
                other.join(" ")
            )),
        }
    }
}

#[derive(Args, Debug)]
struct VerifyLmulArgs {
    #[arg(long, value_parser = parse_variant)]
    variant: LmulVariant,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[command(flatten)]
    mode: ModeArgs,
    /// Worker threads; 0 picks one per core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args, Debug)]
struct VerifyGadgetArgs {
    #[arg(long, value_parser = parse_kind)]
    kind: GadgetKind,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    /// Amount for shl, shr and zpad; all legal amounts if omitted.
    #[arg(long)]
    m: Option<u64>,
    /// Let the destination coincide with the source.
    #[arg(long)]
    in_place: bool,
    #[command(flatten)]
    mode: ModeArgs,
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum LenTarget {
    Lmul,
}

#[derive(Args, Debug)]
struct LenArgs {
    #[arg(value_enum)]
    target: Option<LenTarget>,
    /// Inclusive range `A..B`.
    #[arg(long, value_parser = parse_range, default_value = "1..8")]
    n_range: RangeInclusive<u64>,
    /// Variants to tabulate (repeatable); 1, 2 and 3 by default.
    #[arg(long, value_parser = parse_variant)]
    variant: Vec<LmulVariant>,
    #[arg(long)]
    csv: bool,
    /// Exit with 4 if a closed form or ordering fails.
    #[arg(long)]
    check: bool,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Sequence file, or `-` for standard input.
    file: PathBuf,
    /// Input bits, LSB first.
    #[arg(long = "in", value_parser = parse_bits, default_value = "")]
    input: BitWord,
    /// Number of output bits to print; defaults to the highest output used.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Reject indexed register references.
    #[arg(long)]
    no_indexed: bool,
    /// Accept inputs whose length differs from what the sequence reads.
    #[arg(long)]
    any_input_length: bool,
}

#[derive(Args, Debug)]
struct EquivArgs {
    left: PathBuf,
    right: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[command(flatten)]
    mode: ModeArgs,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Args, Debug)]
struct HaltsArgs {
    file: PathBuf,
    #[arg(long = "in", value_parser = parse_bits, default_value = "")]
    input: BitWord,
    #[arg(long)]
    no_indexed: bool,
}

fn parse_kind(s: &str) -> Result<GadgetKind, String> {
    GadgetKind::from_name(s).ok_or_else(|| {
        let names: Vec<_> = GadgetKind::ALL.iter().map(|k| k.name()).collect();
        format!("unknown gadget {s:?}, expected one of {}", names.join(", "))
    })
}

fn parse_variant(s: &str) -> Result<LmulVariant, String> {
    let digits = s.trim_start_matches("lmul").trim_start_matches("LMUL");
    digits
        .parse::<u8>()
        .ok()
        .and_then(LmulVariant::from_number)
        .ok_or_else(|| format!("unknown variant {s:?}, expected 1, 2, 3 or 4"))
}

fn parse_ref(s: &str) -> Result<RegisterRef, String> {
    let (kind, number) = s
        .split_once(':')
        .ok_or_else(|| format!("expected kind:number, got {s:?}"))?;
    let kind =
        RegisterKind::from_token(kind).ok_or_else(|| format!("unknown register kind {kind:?}"))?;
    let number = number
        .parse::<u64>()
        .map_err(|e| format!("bad register number in {s:?}: {e}"))?;
    RegisterRef::new(kind, number).map_err(|e| e.to_string())
}

fn parse_bits(s: &str) -> Result<BitWord, String> {
    s.parse::<BitWord>().map_err(|e| e.to_string())
}

fn parse_range(s: &str) -> Result<RangeInclusive<u64>, String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected A..B, got {s:?}"))?;
    let a = a.parse::<u64>().map_err(|e| e.to_string())?;
    let b = b
        .trim_start_matches('=')
        .parse::<u64>()
        .map_err(|e| e.to_string())?;
    if a == 0 || a > b {
        return Err(format!("range {s:?} must satisfy 1 <= A <= B"));
    }
    Ok(a..=b)
}

fn read_sequence(path: &Path) -> Result<InstructionSequence, String> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| format!("stdin: {e}"))?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?
    };
    parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit(
    seq: &InstructionSequence,
    out_path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, String> {
    let summary = format!("length={} level={}", seq.len(), seq.feature_level());
    match out_path {
        Some(p) => {
            fs::write(p, format!("{seq}\n")).map_err(|e| format!("{}: {e}", p.display()))?;
            writeln!(out, "{summary}").map_err(io)?;
        }
        None => {
            writeln!(out, "{seq}").map_err(io)?;
            writeln!(err, "{summary}").map_err(io)?;
        }
    }
    Ok(EXIT_OK)
}

fn io(e: std::io::Error) -> String {
    e.to_string()
}

fn gen_gadget(a: &GenGadgetArgs) -> Result<InstructionSequence, String> {
    let need_n = || a.n.ok_or_else(|| format!("{} needs --n", a.kind));
    let need_m = || a.m.ok_or_else(|| format!("{} needs --m", a.kind));
    let need_value = || {
        a.value
            .clone()
            .ok_or_else(|| format!("{} needs --value", a.kind))
    };
    let src = a.src.unwrap_or(RegisterRef::input(1));
    let dst = a.dst.unwrap_or(RegisterRef::output(1));
    let e = |e: crate::error::GadgetError| e.to_string();
    Ok(match a.kind {
        GadgetKind::Tstnz => gadgets::tstnz(need_n()?, src).map_err(e)?,
        GadgetKind::Tstne => indexed::tstne(need_n()?, src, &need_value()?).map_err(e)?,
        GadgetKind::Dec => gadgets::dec(need_n()?, src, dst).map_err(e)?,
        GadgetKind::Inc => indexed::inc(need_n()?, src, dst).map_err(e)?,
        GadgetKind::Shl => gadgets::shl(need_n()?, need_m()?, src, dst).map_err(e)?,
        GadgetKind::Shr => gadgets::shr(need_n()?, need_m()?, src, dst).map_err(e)?,
        GadgetKind::Add => {
            let n = need_n()?;
            let s1 = a.src1.unwrap_or(RegisterRef::input(1));
            let s2 = a.src2.unwrap_or(RegisterRef::input(n + 1));
            gadgets::add(n, s1, s2, dst).map_err(e)?
        }
        GadgetKind::Set => {
            let value = need_value()?;
            if let Some(n) = a.n {
                if n != value.len() as u64 {
                    return Err(crate::error::GadgetError::WidthMismatch {
                        expected: n,
                        found: value.len() as u64,
                    }
                    .to_string());
                }
            }
            gadgets::set_word(&value, dst).map_err(e)?
        }
        GadgetKind::Mov => gadgets::mov(need_n()?, src, dst).map_err(e)?,
        GadgetKind::Zpad => gadgets::zpad(need_n()?, need_m()?, dst).map_err(e)?,
    })
}

fn cmd_run(a: &RunArgs, out: &mut dyn Write) -> Result<i32, String> {
    let seq = read_sequence(&a.file)?;
    seq.check_well_formed().map_err(|e| e.to_string())?;
    let regs = seq.required_registers();
    if !a.any_input_length {
        let have = a.input.len() as u64;
        let ok = if seq.has_indexed_refs() {
            have <= regs.max_in
        } else {
            have == regs.max_in
        };
        if !ok {
            return Err(format!(
                "sequence reads {} input register(s) but {} input bit(s) were given (use --any-input-length to override)",
                regs.max_in, have
            ));
        }
    }
    let executor = if a.no_indexed {
        Executor::strict()
    } else {
        Executor::default()
    };
    let outcome = executor
        .run(&seq, &a.input, a.budget)
        .map_err(|e| e.to_string())?;
    let m = a.m.unwrap_or(regs.max_out as usize);
    writeln!(out, "{outcome} out={}", outcome.registers().outputs(m)).map_err(io)?;
    Ok(match outcome {
        ExecutionOutcome::Terminated { .. } => EXIT_OK,
        ExecutionOutcome::Inaction { .. } => EXIT_INACTION,
        ExecutionOutcome::BudgetExceeded { .. } => EXIT_BUDGET,
    })
}

fn report_verify(
    label: Option<String>,
    r: &VerifyReport,
    out: &mut dyn Write,
) -> Result<(), String> {
    match label {
        Some(l) => writeln!(out, "{l}: {r}"),
        None => writeln!(out, "{r}"),
    }
    .map_err(io)
}

fn cmd_verify(t: &VerifyTarget, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, String> {
    let start = Instant::now();
    let mut passed = true;
    match t {
        VerifyTarget::Lmul(a) => {
            let r = verify_lmul(a.variant, a.n, a.mode.input_mode()?, a.jobs)
                .map_err(|e| e.to_string())?;
            passed &= r.passed();
            report_verify(None, &r, out)?;
        }
        VerifyTarget::Gadget(a) => {
            let amounts = match (a.kind.takes_amount(), a.m) {
                (true, Some(m)) => vec![Some(m)],
                (true, None) => GadgetProbe::legal_amounts(a.kind, a.n)
                    .into_iter()
                    .map(Some)
                    .collect(),
                (false, None) => vec![None],
                (false, Some(_)) => return Err(format!("{} does not take --m", a.kind)),
            };
            if amounts.is_empty() {
                return Err(format!("{} has no legal amount at n={}", a.kind, a.n));
            }
            let mode = a.mode.input_mode()?;
            let several = amounts.len() > 1;
            for m in amounts {
                let mut probe = GadgetProbe::new(a.kind, a.n).in_place(a.in_place);
                probe.amount = m;
                let r = verify_gadget(&probe, mode, a.jobs).map_err(|e| e.to_string())?;
                passed &= r.passed();
                report_verify(several.then(|| probe.to_string()), &r, out)?;
            }
        }
    }
    writeln!(err, "time={:.3}s", start.elapsed().as_secs_f64()).map_err(io)?;
    Ok(if passed { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn cmd_len(a: &LenArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, String> {
    let mut variants = if a.variant.is_empty() {
        vec![LmulVariant::Lmul1, LmulVariant::Lmul2, LmulVariant::Lmul3]
    } else {
        a.variant.clone()
    };
    variants.sort();
    variants.dedup();
    let has = |v| variants.contains(&v);
    use LmulVariant::*;
    let mut orderings: Vec<(&str, LmulVariant, LmulVariant)> = Vec::new();
    if has(Lmul1) && has(Lmul2) {
        orderings.push(("len2>len1", Lmul2, Lmul1));
    }
    if has(Lmul1) && has(Lmul3) {
        orderings.push(("len3<len1", Lmul1, Lmul3));
    }
    if has(Lmul3) && has(Lmul4) {
        orderings.push(("len4<len3", Lmul3, Lmul4));
    }
    let mut header: Vec<String> = vec!["n".into()];
    header.extend(variants.iter().map(|v| format!("len{}", v.number())));
    header.extend(orderings.iter().map(|o| o.0.to_string()));
    let sep = if a.csv { "," } else { " " };
    let mut rows = vec![header];
    let mut failures = Vec::new();
    let mut table = LengthTable::new();
    for n in a.n_range.clone() {
        let mut lens = std::collections::BTreeMap::new();
        let mut row = vec![n.to_string()];
        for &v in &variants {
            let l = table.len(v, n).map_err(|e| e.to_string())?;
            if let Some(f) = v.closed_form_len(n) {
                if f != l {
                    failures.push(format!(
                        "n={n}: len{}={l} but closed form gives {f}",
                        v.number()
                    ));
                }
            }
            lens.insert(v, l);
            row.push(l.to_string());
        }
        for &(name, big, small) in &orderings {
            let holds = lens[&big] > lens[&small];
            let expected = match name {
                "len3<len1" => Some(n > 1),
                "len4<len3" => (n > 5).then_some(true),
                _ => Some(true),
            };
            if expected.is_some_and(|e| e != holds) {
                failures.push(format!("n={n}: {name} is {holds}"));
            }
            row.push(holds.to_string());
        }
        rows.push(row);
    }
    if a.csv {
        for r in &rows {
            writeln!(out, "{}", r.join(sep)).map_err(io)?;
        }
    } else {
        let widths: Vec<usize> = (0..rows[0].len())
            .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
            .collect();
        for r in &rows {
            let cells: Vec<String> = r
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect();
            writeln!(out, "{}", cells.join(sep)).map_err(io)?;
        }
    }
    if has(Lmul4) {
        let k = lmul4_length_constants().map_err(|e| e.to_string())?;
        let met = k.a < 100 && k.b < 10 && k.c < 250;
        let line = format!(
            "len4 = {}*floor(log2 n) + {}*floor(log2(2n-1)) + {} (targets <100, <10, <250: {})",
            k.a,
            k.b,
            k.c,
            if met { "met" } else { "missed" }
        );
        if a.csv {
            writeln!(err, "{line}").map_err(io)?;
        } else {
            writeln!(out, "{line}").map_err(io)?;
        }
        if !met {
            failures.push("len4 constants miss their targets".to_string());
        }
    }
    if a.check && !failures.is_empty() {
        for f in &failures {
            writeln!(err, "check failed: {f}").map_err(io)?;
        }
        return Ok(EXIT_CHECK_FAILED);
    }
    Ok(EXIT_OK)
}

fn cmd_equiv(a: &EquivArgs, out: &mut dyn Write) -> Result<i32, String> {
    let x = read_sequence(&a.left)?;
    let y = read_sequence(&a.right)?;
    let r = io_equivalent(&x, &y, a.n, a.m, a.budget, a.mode.input_mode()?)
        .map_err(|e| e.to_string())?;
    writeln!(out, "{r}").map_err(io)?;
    Ok(if r.is_equivalent() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

fn cmd_halts(a: &HaltsArgs, out: &mut dyn Write) -> Result<i32, String> {
    let seq = read_sequence(&a.file)?;
    let executor = if a.no_indexed {
        Executor::strict()
    } else {
        Executor::default()
    };
    match decide_halts_with(&executor, &seq, &a.input) {
        Ok(r) => {
            writeln!(out, "{r}").map_err(io)?;
            Ok(EXIT_OK)
        }
        Err(AnalysisError::BoundOverflow { bound }) => {
            writeln!(out, "Refused bound={bound}").map_err(io)?;
            Ok(EXIT_BOUND_REFUSED)
        }
        Err(e) => Err(e.to_string()),
    }
}

/// Runs the command line with `args` (including the program name) and
/// returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_ERROR
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let result = match &cli.command {
        Command::Gen(GenTarget::Gadget(a)) => {
            gen_gadget(a).and_then(|s| emit(&s, a.out.as_deref(), out, err))
        }
        Command::Gen(GenTarget::Lmul(a)) => a
            .variant
            .generate(a.n)
            .map_err(|e| e.to_string())
            .and_then(|s| emit(&s, a.out.as_deref(), out, err)),
        Command::Run(a) => cmd_run(a, out),
        Command::Verify(t) => cmd_verify(t, out, err),
        Command::Len(a) => cmd_len(a, out, err),
        Command::Equiv(a) => cmd_equiv(a, out),
        Command::Halts(a) => cmd_halts(a, out),
    };
    match result {
        Ok(code) => code,
        Err(message) => {
            let _ = writeln!(err, "error: {message}");
            EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("boolseq").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn value_parsers() {
        assert_eq!(parse_ref("aux:5").unwrap(), RegisterRef::aux(5));
        assert!(parse_ref("aux:0").is_err());
        assert!(parse_ref("reg:1").is_err());
        assert_eq!(parse_range("2..5").unwrap(), 2..=5);
        assert!(parse_range("5..2").is_err());
        assert_eq!(parse_variant("3").unwrap(), LmulVariant::Lmul3);
        assert!(parse_variant("5").is_err());
    }

    #[test]
    fn mode_parsing() {
        let m = |v: &[&str]| ModeArgs {
            mode: v.iter().map(|s| s.to_string()).collect(),
            seed: 9,
        };
        assert_eq!(
            m(&["exhaustive"]).input_mode().unwrap(),
            InputMode::Exhaustive
        );
        assert_eq!(
            m(&["sample", "10"]).input_mode().unwrap(),
            InputMode::Sampled { cases: 10, seed: 9 }
        );
        assert!(m(&["sample"]).input_mode().is_err());
        assert!(m(&["all"]).input_mode().is_err());
    }

    #[test]
    fn gen_gadget_to_stdout() {
        let (code, out, err) = call(&["gen", "gadget", "--kind", "add", "--n", "2"]);
        assert_eq!(code, 0, "{err}");
        assert_eq!(parse(out.trim()).unwrap().len(), 53);
        assert!(err.contains("length=53"));
    }

    #[test]
    fn usage_errors() {
        assert_eq!(
            call(&["gen", "lmul", "--variant", "1", "--n", "0"]).0,
            EXIT_ERROR
        );
        assert_eq!(
            call(&["gen", "gadget", "--kind", "shl", "--n", "4"]).0,
            EXIT_ERROR
        );
        assert_eq!(call(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn len_check_small_range() {
        let (code, out, _) = call(&["len", "--n-range", "1..8", "--check", "--csv"]);
        assert_eq!(code, 0);
        let lines: Vec<_> = out.lines().collect();
        assert_eq!(lines[0], "n,len1,len2,len3,len2>len1,len3<len1");
        assert_eq!(lines[1], "1,76,81,95,true,false");
    }
}

//! Command-line front end over JSON files. Results go to stdout (or
//! `--output`), logs to stderr. Exit code 0 on success, 1 when a property
//! fails (the witness is printed), 2 on malformed input.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::backforth::{bnf_run_until_failure, EventuallyConstant, FiniteSample};
use crate::error::Error;
use crate::forcing::{extend_condition, find_antichain, incompatibility, is_condition, Condition};
use crate::lipschitz::{check_isometry, check_lipschitz, induced_hom_over, level_analysis, PartialMap, TreeHom, Verdict};
use crate::parity::{cell_words_up_to, certify_no_isometry, check_parity_invariant, gen_family, FamilySpec, Parity, ParityFamily};
use crate::prefix::{Alphabet, Point, Word, WordTree};
use crate::selftest::{run_selftest, SelftestConfig};
use crate::slalom::{
    hom_image_tree, merge_slaloms, slalom_from_hom, tree_width, width_check, BoundedDenseSample, Slalom,
    WidthProfile,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;

/// `k` for a finite alphabet of that size, `omega` for `ω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlphabetArg(pub Alphabet);

impl FromStr for AlphabetArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "omega" | "ω" => Ok(AlphabetArg(Alphabet::Countable)),
            _ => match s.parse::<u32>() {
                Ok(k) if k >= 1 => Ok(AlphabetArg(Alphabet::Finite(k))),
                _ => Err(format!("expected a positive integer or `omega`, got `{s}`")),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Odd,
    Even,
}

#[derive(Debug, Parser)]
#[command(name = "lipbaire", version, about = "Lipschitz maps and isometries on Baire and Cantor space")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long, global = true)]
    pub alphabet: Option<AlphabetArg>,
    /// Input JSON file; some commands take it twice.
    #[arg(long, global = true)]
    pub input: Vec<PathBuf>,
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a finite partial map (array of [a, b] pairs) is Lipschitz.
    CheckLipschitz,
    /// Check a finite partial map is an isometry.
    CheckIsometry,
    /// Tree homomorphism induced by a Lipschitz partial map up to --depth.
    InduceHom,
    /// Per-level injectivity and surjectivity of a homomorphism on k^{≤depth}.
    LevelAnalysis,
    /// Back-and-forth between eventually-0 and eventually-1 points, or two
    /// finite samples given as {"a": [...], "b": [...]}.
    Backforth {
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
    /// Odd or even family over all cells of length ≤ depth.
    GenParityFamily {
        #[arg(long, value_enum, default_value = "odd")]
        kind: KindArg,
        #[arg(long, default_value_t = 50)]
        per_cell: usize,
        /// Indices below which letters may vary; chosen to fit when absent.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Count isometric pairs between two families (two --input files).
    CertifyNoIsometry,
    /// Slalom of a homomorphism over a bounded sample (--input hom --input sample).
    SlalomFromHom,
    /// Merge slaloms given as [{"s": word, "slalom": levels}, ...].
    MergeSlaloms,
    /// Level sizes of a tree, checked against an optional width profile.
    TreeWidth {
        /// JSON width profile such as {"kind":"ceillog2"}.
        #[arg(long)]
        corset: Option<String>,
    },
    /// Image of a tree under a homomorphism (--input hom --input tree).
    HomImage,
    /// Is the partial map a condition; with two inputs, are they compatible.
    ForcingCheck,
    /// Extend {"condition": p, "a": point, "b": point} to cover a and b.
    ForcingExtend,
    /// Largest pairwise incompatible subfamily of an array of conditions.
    ForcingAntichain {
        #[arg(long, default_value_t = 2)]
        min_size: usize,
    },
    /// Run the invariant suites.
    Selftest {
        /// Reduced sample sizes.
        #[arg(long)]
        quick: bool,
    },
}

/// Outcome of a command before it is written out.
enum Outcome {
    Ok(Value),
    Violation(Value),
}

#[derive(Debug)]
struct Malformed(String);

impl From<Error> for Malformed {
    fn from(e: Error) -> Self {
        Malformed(e.to_string())
    }
}

type CmdResult = Result<Outcome, Malformed>;

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn read_input<T: DeserializeOwned>(cli: &Cli, index: usize) -> Result<T, Malformed> {
    let path = cli
        .input
        .get(index)
        .ok_or_else(|| Malformed(format!("missing --input #{}", index + 1)))?;
    let text = fs::read_to_string(path).map_err(|e| Malformed(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Malformed(format!("{}: {e}", path.display())))
}

fn verdict(v: Verdict) -> Outcome {
    match v {
        Verdict::Ok => Outcome::Ok(to_json(&v)),
        Verdict::Violation(_) => Outcome::Violation(to_json(&v)),
    }
}

fn check_alphabet(alphabet: Alphabet, points: &[&Point]) -> Result<(), Malformed> {
    points.iter().try_for_each(|p| alphabet.check_point(p)).map_err(Malformed::from)
}

fn check_map(cli: &Cli, isometry: bool) -> CmdResult {
    let m: PartialMap = read_input(cli, 0)?;
    if let Some(AlphabetArg(a)) = cli.alphabet {
        let all: Vec<&Point> = m.domain().chain(m.range()).collect();
        check_alphabet(a, &all)?;
    }
    Ok(verdict(if isometry { check_isometry(&m) } else { check_lipschitz(&m) }))
}

fn induce_hom(cli: &Cli) -> CmdResult {
    let m: PartialMap = read_input(cli, 0)?;
    let alphabet = cli.alphabet.map_or(Alphabet::Countable, |a| a.0);
    match induced_hom_over(&m, cli.depth.unwrap_or(3), alphabet, alphabet) {
        Ok(h) => Ok(Outcome::Ok(to_json(&h))),
        Err(Error::NotLipschitz(w)) => Ok(Outcome::Violation(to_json(&Verdict::Violation(w)))),
        Err(e) => Err(e.into()),
    }
}

fn level_report(cli: &Cli) -> CmdResult {
    let h: TreeHom = read_input(cli, 0)?;
    let depth = cli.depth.or(h.depth_bound()).unwrap_or(3);
    Ok(Outcome::Ok(to_json(&level_analysis(&h, depth)?)))
}

#[derive(Deserialize)]
struct Samples {
    a: Vec<Point>,
    b: Vec<Point>,
}

fn backforth(cli: &Cli, steps: usize) -> CmdResult {
    let alphabet = cli.alphabet.map_or(Alphabet::BINARY, |a| a.0);
    let (state, err) = if cli.input.is_empty() {
        eprintln!("lipbaire: seed {}", cli.seed);
        let mut a = EventuallyConstant::new(alphabet, 0, Some(cli.seed))?;
        let mut b = EventuallyConstant::new(alphabet, 1, Some(cli.seed))?;
        bnf_run_until_failure(&mut a, &mut b, steps)
    } else {
        let s: Samples = read_input(cli, 0)?;
        let mut a = FiniteSample::new(alphabet, s.a)?;
        let mut b = FiniteSample::new(alphabet, s.b)?;
        bnf_run_until_failure(&mut a, &mut b, steps)
    };
    let mut out = json!({ "seed": cli.seed, "steps": steps });
    if let Some(state) = &state {
        out["completed_steps"] = json!(state.step());
        out["map"] = to_json(state.current());
        out["transcript"] = to_json(&state.transcript());
        let check = check_isometry(state.current());
        out["isometry"] = to_json(&check);
        if !check.is_ok() {
            return Ok(Outcome::Violation(out));
        }
    }
    match err {
        None => Ok(Outcome::Ok(out)),
        Some(e @ (Error::Oracle(_) | Error::NoFreshLetter { .. })) => {
            out["error"] = json!(e.to_string());
            Ok(Outcome::Violation(out))
        }
        Some(e) => Err(e.into()),
    }
}

fn gen_parity(cli: &Cli, kind: KindArg, per_cell: usize, budget: Option<usize>) -> CmdResult {
    let alphabet = cli.alphabet.map_or(Alphabet::BINARY, |a| a.0);
    let depth = cli.depth.unwrap_or(3);
    let kind = match kind {
        KindArg::Odd => Parity::Odd,
        KindArg::Even => Parity::Even,
    };
    let letters = alphabet.size().unwrap_or(2);
    let cells = cell_words_up_to(letters, depth);
    let budget = budget.unwrap_or_else(|| {
        (depth..)
            .find(|&b| FamilySpec::new(alphabet, b).capacity(kind, depth) >= per_cell as u128)
            .expect("capacity grows with the budget")
    });
    eprintln!("lipbaire: seed {}", cli.seed);
    let family = gen_family(kind, &cells, per_cell, FamilySpec::new(alphabet, budget), cli.seed)?;
    if let Some((s, x)) = check_parity_invariant(&family) {
        return Ok(Outcome::Violation(json!({ "cell": s, "point": x })));
    }
    Ok(Outcome::Ok(json!({ "seed": cli.seed, "budget": budget, "family": family })))
}

fn certify(cli: &Cli) -> CmdResult {
    let src: ParityFamily = read_input(cli, 0)?;
    let dst: ParityFamily = read_input(cli, 1)?;
    let cert = certify_no_isometry(&src, &dst)?;
    Ok(if cert.holds() {
        Outcome::Ok(to_json(&cert))
    } else {
        Outcome::Violation(to_json(&cert))
    })
}

fn slalom_cmd(cli: &Cli) -> CmdResult {
    let h: TreeHom = read_input(cli, 0)?;
    let sample: BoundedDenseSample = read_input(cli, 1)?;
    let depth = cli.depth.unwrap_or(12);
    let phi = slalom_from_hom(&h, &sample, depth)?;
    Ok(Outcome::Ok(json!({ "slalom": phi, "widths": phi.widths() })))
}

#[derive(Deserialize)]
struct Piece {
    s: Word,
    slalom: Slalom,
}

fn merge_cmd(cli: &Cli) -> CmdResult {
    let pieces: Vec<Piece> = read_input(cli, 0)?;
    let pieces: Vec<(Word, Slalom)> = pieces.into_iter().map(|p| (p.s, p.slalom)).collect();
    let merged = merge_slaloms(&pieces);
    let ok = crate::slalom::slalom_width_ok(&merged, &WidthProfile::NTimesPowTwo);
    let out = json!({ "slalom": merged, "widths": merged.widths(), "within_n_pow2": ok });
    Ok(if ok { Outcome::Ok(out) } else { Outcome::Violation(out) })
}

fn tree_width_cmd(cli: &Cli, corset: Option<&str>) -> CmdResult {
    let tree: WordTree = read_input(cli, 0)?;
    let widths = tree_width(&tree);
    let Some(corset) = corset else {
        return Ok(Outcome::Ok(json!({ "widths": widths })));
    };
    let c: WidthProfile = serde_json::from_str(corset).map_err(|e| Malformed(format!("--corset: {e}")))?;
    let levels = width_check(&tree, &c);
    let out = json!({ "widths": widths, "within": levels });
    Ok(if levels.iter().all(|&b| b) {
        Outcome::Ok(out)
    } else {
        Outcome::Violation(out)
    })
}

fn hom_image_cmd(cli: &Cli) -> CmdResult {
    let h: TreeHom = read_input(cli, 0)?;
    let tree: WordTree = read_input(cli, 1)?;
    let image = hom_image_tree(&h, &tree)?;
    let (before, after) = (tree_width(&tree), tree_width(&image));
    let ok = after.iter().zip(&before).all(|(a, b)| a <= b);
    let out = json!({ "image": image, "source_widths": before, "image_widths": after });
    Ok(if ok { Outcome::Ok(out) } else { Outcome::Violation(out) })
}

fn forcing_check(cli: &Cli) -> CmdResult {
    let p: PartialMap = read_input(cli, 0)?;
    let v = is_condition(&p);
    if !v.is_ok() || cli.input.len() < 2 {
        return Ok(verdict(v));
    }
    let q: PartialMap = read_input(cli, 1)?;
    let vq = is_condition(&q);
    if !vq.is_ok() {
        return Ok(verdict(vq));
    }
    let (p, q) = (Condition::new(p)?, Condition::new(q)?);
    let clash = incompatibility(&p, &q);
    Ok(Outcome::Ok(json!({ "compatible": clash.is_none(), "incompatibility": clash })))
}

#[derive(Deserialize)]
struct ExtendInput {
    condition: Condition,
    a: Point,
    b: Point,
}

fn forcing_extend(cli: &Cli) -> CmdResult {
    let input: ExtendInput = read_input(cli, 0)?;
    let alphabet = cli.alphabet.map_or(Alphabet::Countable, |a| a.0);
    let p = &input.condition;
    let all: Vec<&Point> = p.map().domain().chain(p.map().range()).chain([&input.a, &input.b]).collect();
    check_alphabet(alphabet, &all)?;
    eprintln!("lipbaire: seed {}", cli.seed);
    let mut ao = EventuallyConstant::new(alphabet, input.a.tail(), Some(cli.seed))?;
    let mut bo = EventuallyConstant::new(alphabet, input.b.tail(), Some(cli.seed))?;
    match extend_condition(p, &input.a, &input.b, &mut ao, &mut bo) {
        Ok(q) => Ok(Outcome::Ok(json!({ "seed": cli.seed, "condition": q }))),
        Err(e @ (Error::NoFreshLetter { .. } | Error::Oracle(_))) => {
            Ok(Outcome::Violation(json!({ "seed": cli.seed, "error": e.to_string() })))
        }
        Err(e) => Err(e.into()),
    }
}

fn forcing_antichain(cli: &Cli, min_size: usize) -> CmdResult {
    let conds: Vec<Condition> = read_input(cli, 0)?;
    let report = find_antichain(&conds, min_size);
    Ok(if report.meets_min_size {
        Outcome::Ok(to_json(&report))
    } else {
        Outcome::Violation(to_json(&report))
    })
}

fn selftest(cli: &Cli, quick: bool) -> CmdResult {
    let mut cfg = if quick {
        SelftestConfig::quick(cli.seed)
    } else {
        SelftestConfig::new(cli.seed)
    };
    if let Some(t) = cli.trials {
        cfg.trials = t;
    }
    eprintln!("lipbaire: seed {}", cli.seed);
    let report = run_selftest(&cfg);
    for s in &report.suites {
        eprintln!("lipbaire: {} {}", if s.passed { "PASS" } else { "FAIL" }, s.name);
    }
    Ok(if report.passed {
        Outcome::Ok(to_json(&report))
    } else {
        Outcome::Violation(to_json(&report))
    })
}

fn dispatch(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::CheckLipschitz => check_map(cli, false),
        Command::CheckIsometry => check_map(cli, true),
        Command::InduceHom => induce_hom(cli),
        Command::LevelAnalysis => level_report(cli),
        Command::Backforth { steps } => backforth(cli, *steps),
        Command::GenParityFamily { kind, per_cell, budget } => gen_parity(cli, *kind, *per_cell, *budget),
        Command::CertifyNoIsometry => certify(cli),
        Command::SlalomFromHom => slalom_cmd(cli),
        Command::MergeSlaloms => merge_cmd(cli),
        Command::TreeWidth { corset } => tree_width_cmd(cli, corset.as_deref()),
        Command::HomImage => hom_image_cmd(cli),
        Command::ForcingCheck => forcing_check(cli),
        Command::ForcingExtend => forcing_extend(cli),
        Command::ForcingAntichain { min_size } => forcing_antichain(cli, *min_size),
        Command::Selftest { quick } => selftest(cli, *quick),
    }
}

fn emit(cli: &Cli, value: &Value) -> Result<(), Malformed> {
    let text = serde_json::to_string_pretty(value).expect("serializable") + "\n";
    match &cli.output {
        Some(path) => fs::write(path, text).map_err(|e| Malformed(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Parses `args` (program name first) and runs the command, returning the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_MALFORMED } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (value, code) = match dispatch(&cli) {
        Ok(Outcome::Ok(v)) => (v, EXIT_OK),
        Ok(Outcome::Violation(v)) => (v, EXIT_VIOLATION),
        Err(Malformed(msg)) => {
            eprintln!("lipbaire: malformed input: {msg}");
            return EXIT_MALFORMED;
        }
    };
    if let Err(Malformed(msg)) = emit(&cli, &value) {
        eprintln!("lipbaire: {msg}");
        return EXIT_MALFORMED;
    }
    code
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::json;

use moc::algorithms::normalize;
use moc::circuits::{compose_circuit, eval_circuit, parse_ckt, tensor_circuit, Circuit};
use moc::complexity::{savitch_reach, worst_case_table};
use moc::computability::{
    reduce_empty_to_equiv, reduce_halt_to_nonempty, reduce_halt_to_print42, rice_transform, Built,
};
use moc::encodings::{godel_decode, godel_number, nat_string_codec, tuple_codec, Codec};
use moc::kolmogorov::{estimate_k, SizeBudget};
use moc::logic::{attach_layout, decode_trace, emit_dimacs, emit_var_map, halt_formula, parse_dimacs, parse_dimacs_with_map, solve, SolveResult};
use moc::recfun::{eval, parse_rf, RecExpr};
use moc::regmachine::{compose_reg, parse_rm, reg_semantics, run_reg, tensor_reg, RegProgram};
use moc::turing::{compose, determinize, parse_tm, tensor, Configuration, TuringMachine};
use moc::{Alphabet, Fuel, RunOutcome, Word};

/// Environment variable holding the default step budget.
const FUEL_VAR: &str = "MOC_FUEL";
const DEFAULT_FUEL: u64 = 100_000;

#[derive(Parser)]
#[command(name = "moc", version, about = "Models of computation: run, combine, encode, reduce and measure machines")]
struct Cli {
    /// Step budget for every run [default: $MOC_FUEL, else 100000]
    #[arg(long, global = true)]
    fuel: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a .tm, .rm, .rf or .ckt file on the given inputs
    Run {
        file: PathBuf,
        /// One input per flag: a word for .tm, a natural for .rm and .rf, bits for .ckt
        #[arg(long = "input")]
        inputs: Vec<String>,
    },
    /// Sequential composition: the first file's outputs feed the second
    Compose { first: PathBuf, second: PathBuf },
    /// Parallel composition
    Tensor { first: PathBuf, second: PathBuf },
    /// Deterministic machine with the same breadth-first semantics
    Determinize { file: PathBuf },
    /// Encode (or with --decode, decode) naturals, word tuples or machines
    Encode {
        kind: CodecKind,
        values: Vec<String>,
        #[arg(long)]
        decode: bool,
    },
    /// Bounded acceptance formula of a machine on an input, as DIMACS
    ToSat {
        file: PathBuf,
        #[arg(long = "input")]
        inputs: Vec<String>,
        #[arg(long)]
        t_max: usize,
        /// Cell bound; defaults to max(t_max + 1, longest input)
        #[arg(long)]
        p_max: Option<usize>,
        /// Write DIMACS here and the variable map next to it as PATH.map
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Decide a DIMACS file; with --map and --machine also print the run it encodes
    Solve {
        file: PathBuf,
        #[arg(long)]
        map: Option<PathBuf>,
        #[arg(long)]
        machine: Option<PathBuf>,
    },
    /// Apply a reduction to a machine (and input word)
    Reduce {
        kind: ReductionKind,
        /// The machine y of the instance
        machine: PathBuf,
        /// The word x of a halting instance
        #[arg(long, default_value = "")]
        input: String,
        /// For rice: a machine with the property
        #[arg(long)]
        with: Option<PathBuf>,
        /// For rice: a machine without the property
        #[arg(long)]
        without: Option<PathBuf>,
    },
    /// Worst-case time and space per input length, as CSV
    Measure {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
    },
    /// Middle-first reachability within a space bound, as JSON
    Savitch {
        file: PathBuf,
        #[arg(long, default_value = "")]
        input: String,
        #[arg(long)]
        space: usize,
    },
    /// Upper bound on K(target | condition) by bounded enumeration, as JSON
    Kolmogorov {
        #[arg(long)]
        target: String,
        #[arg(long, default_value = "")]
        condition: String,
        #[arg(long, default_value_t = 4)]
        max_rules: usize,
    },
    /// Canonical form of a register program
    Normalize { file: PathBuf },
    /// Digest naming the algorithm of a register program
    AlgId { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum CodecKind {
    Nat,
    Tuple,
    Godel,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReductionKind {
    HaltToNonempty,
    HaltToPrint42,
    EmptyToEquiv,
    Rice,
}

enum Failure {
    Usage(String),
    Io(String),
    Domain(moc::Error),
}

impl From<moc::Error> for Failure {
    fn from(e: moc::Error) -> Self {
        Failure::Domain(e)
    }
}

type Out = std::result::Result<String, Failure>;

enum Model {
    Tm(TuringMachine),
    Rm(RegProgram),
    Rf(RecExpr),
    Ckt(Circuit),
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> std::result::Result<Model, Failure> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    if !matches!(ext, "tm" | "rm" | "rf" | "ckt") {
        return Err(Failure::Usage(format!("{}: expected a .tm, .rm, .rf or .ckt file", path.display())));
    }
    let text = read(path)?;
    Ok(match ext {
        "tm" => Model::Tm(parse_tm(&text)?),
        "rm" => Model::Rm(parse_rm(&text)?),
        "rf" => Model::Rf(parse_rf(&text)?),
        _ => Model::Ckt(parse_ckt(&text)?),
    })
}

fn load_tm(path: &Path) -> std::result::Result<TuringMachine, Failure> {
    match load(path)? {
        Model::Tm(m) => Ok(m),
        _ => Err(Failure::Usage(format!("{}: expected a .tm file", path.display()))),
    }
}

fn load_rm(path: &Path) -> std::result::Result<RegProgram, Failure> {
    match load(path)? {
        Model::Rm(p) => Ok(p),
        _ => Err(Failure::Usage(format!("{}: expected a .rm file", path.display()))),
    }
}

fn words(m: &TuringMachine, inputs: &[String]) -> std::result::Result<Vec<Word>, Failure> {
    Ok(inputs.iter().map(|s| Word::parse(m.alphabet(), s)).collect::<moc::Result<_>>()?)
}

fn naturals(inputs: &[String]) -> std::result::Result<Vec<BigUint>, Failure> {
    inputs
        .iter()
        .map(|s| s.parse::<BigUint>().map_err(|_| Failure::Usage(format!("{s:?} is not a natural number"))))
        .collect()
}

fn lines<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|i| i.to_string() + "\n").collect()
}

fn outcome<T>(r: RunOutcome<T>, show: impl Fn(T) -> String) -> String {
    match r {
        RunOutcome::Halted { outputs, .. } => show(outputs),
        RunOutcome::Rejected { .. } => "rejected\n".into(),
        RunOutcome::FuelExhausted => "fuel exhausted\n".into(),
    }
}

fn run(file: &Path, inputs: &[String], fuel: Fuel) -> Out {
    Ok(match load(file)? {
        Model::Tm(m) => outcome(m.run(&words(&m, inputs)?, fuel, None)?, |o| {
            if o.is_empty() {
                "accepted\n".into()
            } else {
                lines(o)
            }
        }),
        Model::Rm(p) => outcome(run_reg(&p, &naturals(inputs)?, fuel, None)?, lines),
        Model::Rf(e) => {
            let args: Vec<u64> = inputs
                .iter()
                .map(|s| s.parse().map_err(|_| Failure::Usage(format!("{s:?} is not a natural number"))))
                .collect::<std::result::Result<_, _>>()?;
            outcome(eval(&e, &args, fuel)?, |v| format!("{v}\n"))
        }
        Model::Ckt(c) => {
            let ws: Vec<Word> = inputs.iter().map(|s| Word::from(s.as_str())).collect();
            lines(eval_circuit(&c, &ws)?)
        }
    })
}

fn combine(first: &Path, second: &Path, parallel: bool) -> Out {
    Ok(match (load(first)?, load(second)?) {
        (Model::Tm(a), Model::Tm(b)) => if parallel { tensor(&a, &b)? } else { compose(&a, &b)? }.to_string(),
        (Model::Rm(a), Model::Rm(b)) => if parallel { tensor_reg(&a, &b) } else { compose_reg(&a, &b)? }.to_string(),
        (Model::Ckt(a), Model::Ckt(b)) => {
            if parallel { tensor_circuit(&a, &b) } else { compose_circuit(&a, &b)? }.to_string()
        }
        _ => return Err(Failure::Usage("both files must be .tm, both .rm, or both .ckt".into())),
    })
}

fn encode(kind: CodecKind, values: &[String], decode: bool) -> Out {
    let bin = Alphabet::binary();
    let word = |s: &String| Word::parse(&bin, s);
    Ok(match (kind, decode) {
        (CodecKind::Nat, false) => {
            let ns = naturals(values)?;
            lines(ns.iter().map(|n| nat_string_codec().encode(n)).collect::<moc::Result<Vec<_>>>()?)
        }
        (CodecKind::Nat, true) => {
            let ws = values.iter().map(word).collect::<moc::Result<Vec<_>>>()?;
            lines(ws.iter().map(|w| nat_string_codec().decode(w)).collect::<moc::Result<Vec<_>>>()?)
        }
        (CodecKind::Tuple, false) => {
            let ws = values.iter().map(word).collect::<moc::Result<Vec<_>>>()?;
            format!("{}\n", tuple_codec(&bin, ws.len())?.encode(&ws)?)
        }
        (CodecKind::Tuple, true) => {
            let [arity, w] = values else {
                return Err(Failure::Usage("tuple decoding takes an arity and a word".into()));
            };
            let arity = arity.parse().map_err(|_| Failure::Usage(format!("{arity:?} is not an arity")))?;
            lines(tuple_codec(&bin, arity)?.decode(&word(w)?)?)
        }
        (CodecKind::Godel, false) => {
            let ms = values.iter().map(|p| load_tm(Path::new(p))).collect::<std::result::Result<Vec<_>, _>>()?;
            lines(ms.iter().map(godel_number))
        }
        (CodecKind::Godel, true) => {
            let ns = naturals(values)?;
            ns.iter().map(|n| godel_decode(n).map(|m| m.to_string())).collect::<moc::Result<Vec<_>>>()?.concat()
        }
    })
}

fn to_sat(file: &Path, inputs: &[String], t_max: usize, p_max: Option<usize>, output: Option<&Path>) -> Out {
    let m = load_tm(file)?;
    let x = words(&m, inputs)?;
    let f = match p_max {
        None => halt_formula(&m, &x, t_max)?,
        Some(p) => moc::logic::with_input(&moc::logic::accept_formula(&m, t_max, p)?, &m, &x)?,
    };
    let cnf = emit_dimacs(&f);
    let Some(out) = output else {
        return Ok(cnf);
    };
    let map_path = PathBuf::from(format!("{}.map", out.display()));
    let write = |p: &Path, s: &str| std::fs::write(p, s).map_err(|e| Failure::Io(format!("{}: {e}", p.display())));
    write(out, &cnf)?;
    write(&map_path, &emit_var_map(&f))?;
    Ok(format!("{}\n{}\n", out.display(), map_path.display()))
}

fn render(m: &TuringMachine, c: &Configuration) -> String {
    let tapes: Vec<String> = c
        .tapes
        .iter()
        .map(|t| {
            let cells: String = t.cells.iter().map(|&s| m.glyph(s)).collect();
            format!("{cells}@{}", t.head)
        })
        .collect();
    format!("{} {}", m.states()[c.state], tapes.join(" "))
}

fn solve_file(file: &Path, map: Option<&Path>, machine: Option<&Path>) -> Out {
    let cnf = read(file)?;
    let f = match map {
        Some(p) => parse_dimacs_with_map(&cnf, &read(p)?)?,
        None => parse_dimacs(&cnf)?,
    };
    Ok(match solve(&f) {
        SolveResult::Unsat => "UNSAT\n".into(),
        SolveResult::Sat(a) => {
            let lits: Vec<String> =
                a.iter().enumerate().map(|(i, &b)| if b { format!("{}", i + 1) } else { format!("-{}", i + 1) }).collect();
            let mut out = format!("SAT\nv {} 0\n", lits.join(" "));
            if let (Some(_), Some(mp)) = (map, machine) {
                let m = load_tm(mp)?;
                for c in decode_trace(&attach_layout(&f, &m)?, &a, &m)? {
                    out += &render(&m, &c);
                    out.push('\n');
                }
            }
            out
        }
    })
}

fn built(name: &str, b: Built) -> String {
    let v = json!({ "reduction": name, "number": b.number.to_string(), "work": b.work, "machine": b.machine.to_string() });
    format!("{v:#}\n")
}

fn reduce(kind: ReductionKind, machine: &Path, input: &str, with: Option<&Path>, without: Option<&Path>) -> Out {
    let m = load_tm(machine)?;
    let y = godel_number(&m);
    let x = Word::from(input);
    Ok(match kind {
        ReductionKind::HaltToNonempty => built("halt-to-nonempty", reduce_halt_to_nonempty(&x, &y)?),
        ReductionKind::HaltToPrint42 => built("halt-to-print42", reduce_halt_to_print42(&x, &y)?),
        ReductionKind::EmptyToEquiv => {
            let (a, b) = reduce_empty_to_equiv(&y);
            format!("{:#}\n", json!({ "reduction": "empty-to-equiv", "pair": [a.to_string(), b.to_string()] }))
        }
        ReductionKind::Rice => {
            let with = with.ok_or_else(|| Failure::Usage("rice needs --with".into()))?;
            let with = godel_number(&load_tm(with)?);
            let without = match without {
                Some(p) => godel_number(&load_tm(p)?),
                None => moc::computability::empty_language_number(),
            };
            built("rice", rice_transform(&x, &y, &without, &with)?)
        }
    })
}

fn measure(file: &Path, max_len: usize, fuel: Fuel) -> Out {
    let (f, alphabet) = match load(file)? {
        Model::Tm(m) => (m.semantics(), m.alphabet().clone()),
        Model::Rm(p) => (reg_semantics(&p, None), Alphabet::unary()),
        _ => return Err(Failure::Usage("measure takes a .tm or .rm file".into())),
    };
    let rows = worst_case_table(&f, max_len, &alphabet, fuel)?;
    Ok(format!("n,time_max,space_max\n{}", lines(rows.iter().map(|(n, t, s)| format!("{n},{t},{s}")))))
}

fn savitch(file: &Path, input: &str, space: usize) -> Out {
    let m = load_tm(file)?;
    let x = Word::parse(m.alphabet(), input)?;
    let (_, rep) = savitch_reach(&m, &x, space)?;
    Ok(format!("{}\n", serde_json::to_string_pretty(&rep).expect("report serializes")))
}

fn kolmogorov(target: &str, condition: &str, max_rules: usize, fuel: Fuel) -> Out {
    let bin = Alphabet::binary();
    let budget = SizeBudget::new(max_rules, fuel, bin.clone())?;
    let est = estimate_k(&Word::parse(&bin, target)?, &Word::parse(&bin, condition)?, &budget)?;
    let v = json!({
        "target": target,
        "condition": condition,
        "max_rules": max_rules,
        "fuel": fuel.0,
        "k_hat": est.k_hat,
        "explored": est.explored,
        "witness": est.witness.map(|m| m.to_string()),
    });
    Ok(format!("{v:#}\n"))
}

fn default_fuel() -> std::result::Result<u64, Failure> {
    match std::env::var(FUEL_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| Failure::Usage(format!("{FUEL_VAR}={v:?} is not a step count"))),
        Err(_) => Ok(DEFAULT_FUEL),
    }
}

fn dispatch(cli: Cli) -> Out {
    let fuel = Fuel(match cli.fuel {
        Some(f) => f,
        None => default_fuel()?,
    });
    match cli.command {
        Command::Run { file, inputs } => run(&file, &inputs, fuel),
        Command::Compose { first, second } => combine(&first, &second, false),
        Command::Tensor { first, second } => combine(&first, &second, true),
        Command::Determinize { file } => Ok(determinize(&load_tm(&file)?)?.to_string()),
        Command::Encode { kind, values, decode } => encode(kind, &values, decode),
        Command::ToSat { file, inputs, t_max, p_max, output } => to_sat(&file, &inputs, t_max, p_max, output.as_deref()),
        Command::Solve { file, map, machine } => solve_file(&file, map.as_deref(), machine.as_deref()),
        Command::Reduce { kind, machine, input, with, without } => {
            reduce(kind, &machine, &input, with.as_deref(), without.as_deref())
        }
        Command::Measure { file, max_len } => measure(&file, max_len, fuel),
        Command::Savitch { file, input, space } => savitch(&file, &input, space),
        Command::Kolmogorov { target, condition, max_rules } => kolmogorov(&target, &condition, max_rules, fuel),
        Command::Normalize { file } => Ok(normalize(&load_rm(&file)?)?.program.to_string()),
        Command::AlgId { file } => Ok(format!("{}\n", normalize(&load_rm(&file)?)?.digest)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("{}", json!({ "error": "io", "message": format!("io error: {msg}") }));
            ExitCode::from(1)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("{}", json!({ "error": e.kind(), "message": e.to_string() }));
            ExitCode::from(1)
        }
    }
}

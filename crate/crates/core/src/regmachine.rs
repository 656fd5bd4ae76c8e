//! Register machines: the three-instruction language (`Z = 0`, `Z = Z + 1`,
//! `if Z = 0 goto L`) with two marked extensions, decrement (`Z = Z - 1`,
//! truncated at zero) and `call #k`, which runs program `k` of a
//! [`ProgramTable`] on argument registers.
//!
//! Registers hold arbitrary naturals. Names start with `X` (inputs), `Y`
//! (outputs) or `W` (work). Registers that were never written read as 0.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::base::{BlackBoxFunction, Fuel, RunOutcome, Word};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Instr {
    SetZero(String),
    Inc(String),
    /// Extension: truncated decrement.
    Dec(String),
    IfZeroGoto(String, String),
    /// Extension: run table entry `index` with the values of `args` as its
    /// inputs and store its outputs into `rets`.
    Call { index: usize, args: Vec<String>, rets: Vec<String> },
}

impl Instr {
    fn registers(&self) -> Vec<&str> {
        match self {
            Instr::SetZero(r) | Instr::Inc(r) | Instr::Dec(r) | Instr::IfZeroGoto(r, _) => vec![r],
            Instr::Call { args, rets, .. } => args.iter().chain(rets).map(String::as_str).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegProgram {
    instrs: Vec<Instr>,
    /// Label name to line; a label may point one past the last line.
    labels: BTreeMap<String, usize>,
    inputs: Vec<String>,
    outputs: Vec<String>,
}

fn role(name: &str) -> Option<char> {
    let mut cs = name.chars();
    let r = cs.next()?;
    let rest_ok = cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.');
    (matches!(r, 'X' | 'Y' | 'W') && rest_ok).then_some(r)
}

impl RegProgram {
    pub fn new(
        instrs: Vec<Instr>,
        labels: BTreeMap<String, usize>,
        inputs: Vec<String>,
        outputs: Vec<String>,
    ) -> Result<Self> {
        let p = RegProgram { instrs, labels, inputs, outputs };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidMachine(m));
        for (name, &line) in &self.labels {
            if line > self.instrs.len() {
                return bad(format!("label {name} points past the program"));
            }
        }
        for (i, x) in self.inputs.iter().enumerate() {
            if role(x) != Some('X') || self.inputs[..i].contains(x) {
                return bad(format!("bad input register {x}"));
            }
        }
        for (i, y) in self.outputs.iter().enumerate() {
            if role(y) != Some('Y') || self.outputs[..i].contains(y) {
                return bad(format!("bad output register {y}"));
            }
        }
        for (n, ins) in self.instrs.iter().enumerate() {
            for r in ins.registers() {
                if role(r).is_none() {
                    return bad(format!("line {n}: bad register name {r}"));
                }
            }
            if let Instr::IfZeroGoto(_, l) = ins {
                if !self.labels.contains_key(l) {
                    return bad(format!("line {n}: undefined label {l}"));
                }
            }
        }
        Ok(())
    }

    pub fn instrs(&self) -> &[Instr] {
        &self.instrs
    }

    pub fn labels(&self) -> &BTreeMap<String, usize> {
        &self.labels
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    /// Work registers mentioned anywhere in the program.
    pub fn work(&self) -> Vec<String> {
        let set: BTreeSet<&str> =
            self.instrs.iter().flat_map(Instr::registers).filter(|r| role(r) == Some('W')).collect();
        set.into_iter().map(str::to_string).collect()
    }

    /// Line count, the register analogue of machine size.
    pub fn size(&self) -> usize {
        self.instrs.len()
    }

    /// True when only the three original instructions occur.
    pub fn is_literal(&self) -> bool {
        self.instrs.iter().all(|i| matches!(i, Instr::SetZero(_) | Instr::Inc(_) | Instr::IfZeroGoto(..)))
    }

    pub fn uses_call(&self) -> bool {
        self.instrs.iter().any(|i| matches!(i, Instr::Call { .. }))
    }

    fn renamed(&self, reg: &dyn Fn(&str) -> String, label: &dyn Fn(&str) -> String) -> RegProgram {
        let instrs = self
            .instrs
            .iter()
            .map(|i| match i {
                Instr::SetZero(r) => Instr::SetZero(reg(r)),
                Instr::Inc(r) => Instr::Inc(reg(r)),
                Instr::Dec(r) => Instr::Dec(reg(r)),
                Instr::IfZeroGoto(r, l) => Instr::IfZeroGoto(reg(r), label(l)),
                Instr::Call { index, args, rets } => Instr::Call {
                    index: *index,
                    args: args.iter().map(|r| reg(r)).collect(),
                    rets: rets.iter().map(|r| reg(r)).collect(),
                },
            })
            .collect();
        RegProgram {
            instrs,
            labels: self.labels.iter().map(|(l, &n)| (label(l), n)).collect(),
            inputs: self.inputs.iter().map(|r| reg(r)).collect(),
            outputs: self.outputs.iter().map(|r| reg(r)).collect(),
        }
    }

    /// Appends `other` after `self`, shifting its labels.
    fn append(&mut self, other: RegProgram) {
        let off = self.instrs.len();
        self.instrs.extend(other.instrs);
        self.labels.extend(other.labels.into_iter().map(|(l, n)| (l, n + off)));
    }
}

/// Indexed registry of programs for `call`. Append-only.
#[derive(Debug, Clone, Default)]
pub struct ProgramTable {
    programs: Vec<RegProgram>,
}

impl ProgramTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, p: RegProgram) -> usize {
        self.programs.push(p);
        self.programs.len() - 1
    }

    pub fn get(&self, index: usize) -> Option<&RegProgram> {
        self.programs.get(index)
    }

    pub fn len(&self) -> usize {
        self.programs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.programs.is_empty()
    }

    /// Next index `register` will hand out.
    pub fn next_index(&self) -> usize {
        self.programs.len()
    }
}

struct Frame<'a> {
    prog: &'a RegProgram,
    targets: HashMap<&'a str, usize>,
    pc: usize,
    regs: HashMap<String, BigUint>,
    /// Registers of the caller receiving this frame's outputs.
    rets: Vec<String>,
}

impl<'a> Frame<'a> {
    fn new(prog: &'a RegProgram, args: Vec<BigUint>, rets: Vec<String>) -> Self {
        let targets = prog.labels.iter().map(|(l, &n)| (l.as_str(), n)).collect();
        let regs = prog.inputs.iter().cloned().zip(args).collect();
        Frame { prog, targets, pc: 0, regs, rets }
    }

    fn get(&self, r: &str) -> BigUint {
        self.regs.get(r).cloned().unwrap_or_default()
    }
}

/// Runs `p` on `inputs`, charging one unit of fuel per executed instruction,
/// including those of called programs. `cells_used` counts the distinct
/// registers of `p` itself named by an executed instruction or a call's
/// return list. Inputs that are never read do not count.
pub fn run_reg(
    p: &RegProgram,
    inputs: &[BigUint],
    fuel: Fuel,
    table: Option<&ProgramTable>,
) -> Result<RunOutcome<Vec<BigUint>>> {
    if inputs.len() != p.inputs.len() {
        return Err(Error::Shape(format!("program takes {} inputs, got {}", p.inputs.len(), inputs.len())));
    }
    let mut stack = vec![Frame::new(p, inputs.to_vec(), Vec::new())];
    let mut touched: BTreeSet<String> = BTreeSet::new();
    let mut steps = 0u64;
    loop {
        let depth = stack.len();
        let frame = stack.last_mut().expect("frame");
        if frame.pc >= frame.prog.instrs.len() {
            let outs: Vec<BigUint> = frame.prog.outputs.iter().map(|y| frame.get(y)).collect();
            let done = stack.pop().expect("frame");
            match stack.last_mut() {
                None => {
                    return Ok(RunOutcome::Halted { outputs: outs, steps_used: steps, cells_used: touched.len() as u64 })
                }
                Some(caller) => {
                    for (r, v) in done.rets.iter().zip(outs) {
                        caller.regs.insert(r.clone(), v);
                    }
                    caller.pc += 1;
                    if depth == 2 {
                        touched.extend(done.rets.iter().cloned());
                    }
                    continue;
                }
            }
        }
        if steps >= fuel.0 {
            return Ok(RunOutcome::FuelExhausted);
        }
        steps += 1;
        let ins = &frame.prog.instrs[frame.pc];
        if depth == 1 {
            touched.extend(ins.registers().into_iter().map(str::to_string));
        }
        match ins {
            Instr::SetZero(r) => {
                frame.regs.insert(r.clone(), BigUint::zero());
                frame.pc += 1;
            }
            Instr::Inc(r) => {
                *frame.regs.entry(r.clone()).or_default() += BigUint::one();
                frame.pc += 1;
            }
            Instr::Dec(r) => {
                let v = frame.regs.entry(r.clone()).or_default();
                if !v.is_zero() {
                    *v -= BigUint::one();
                }
                frame.pc += 1;
            }
            Instr::IfZeroGoto(r, l) => {
                frame.pc = if frame.get(r).is_zero() { frame.targets[l.as_str()] } else { frame.pc + 1 };
            }
            Instr::Call { index, args, rets } => {
                let callee = table
                    .and_then(|t| t.get(*index))
                    .ok_or_else(|| Error::InvalidMachine(format!("call #{index}: no such table entry")))?;
                if callee.inputs.len() != args.len() || callee.outputs.len() != rets.len() {
                    return Err(Error::Shape(format!("call #{index}: arity mismatch")));
                }
                let vals = args.iter().map(|a| frame.get(a)).collect();
                let rets = rets.clone();
                stack.push(Frame::new(callee, vals, rets));
            }
        }
    }
}

fn copy_loop(from: &str, to: &str, tag: &str, zero: &str) -> (Vec<Instr>, Vec<(String, usize)>) {
    let top = format!("c.{tag}.loop");
    let end = format!("c.{tag}.end");
    let code = vec![
        Instr::SetZero(to.to_string()),
        Instr::IfZeroGoto(from.to_string(), end.clone()),
        Instr::Dec(from.to_string()),
        Instr::Inc(to.to_string()),
        Instr::IfZeroGoto(zero.to_string(), top.clone()),
    ];
    (code, vec![(top, 1), (end, 5)])
}

/// `p2 ∘ p1`: p1 runs first, its outputs are copied into p2's inputs, then
/// p2 runs. Registers and labels of both parts are renamed apart.
pub fn compose_reg(p1: &RegProgram, p2: &RegProgram) -> Result<RegProgram> {
    if p1.outputs.len() != p2.inputs.len() {
        return Err(Error::Shape(format!(
            "cannot feed {} outputs into {} inputs",
            p1.outputs.len(),
            p2.inputs.len()
        )));
    }
    let a = p1.renamed(
        &|r| if role(r) == Some('X') { r.to_string() } else { format!("Wa.{r}") },
        &|l| format!("a.{l}"),
    );
    let b = p2.renamed(
        &|r| if role(r) == Some('Y') { r.to_string() } else { format!("Wb.{r}") },
        &|l| format!("b.{l}"),
    );
    let mut out = RegProgram { instrs: Vec::new(), labels: BTreeMap::new(), inputs: a.inputs.clone(), outputs: b.outputs.clone() };
    let wires: Vec<(String, String)> = a.outputs.iter().cloned().zip(b.inputs.iter().cloned()).collect();
    out.append(RegProgram { inputs: Vec::new(), outputs: Vec::new(), ..a });
    for (i, (from, to)) in wires.iter().enumerate() {
        let (instrs, labels) = copy_loop(from, to, &i.to_string(), "Wc.zero");
        out.append(RegProgram { instrs, labels: labels.into_iter().collect(), inputs: Vec::new(), outputs: Vec::new() });
    }
    out.append(RegProgram { inputs: Vec::new(), outputs: Vec::new(), ..b });
    out.validate()?;
    Ok(out)
}

/// Parallel product: p1 then p2 on disjoint registers. Inputs and outputs
/// are concatenated and renumbered `X1…`, `Y1…`.
pub fn tensor_reg(p1: &RegProgram, p2: &RegProgram) -> RegProgram {
    let io = |p: &RegProgram, side: char, x_off: usize, y_off: usize| {
        let xs: HashMap<String, String> =
            p.inputs.iter().enumerate().map(|(i, r)| (r.clone(), format!("X{}", x_off + i + 1))).collect();
        let ys: HashMap<String, String> =
            p.outputs.iter().enumerate().map(|(i, r)| (r.clone(), format!("Y{}", y_off + i + 1))).collect();
        p.renamed(
            &move |r| {
                xs.get(r).or_else(|| ys.get(r)).cloned().unwrap_or_else(|| format!("W{side}.{r}"))
            },
            &move |l| format!("{side}.{l}"),
        )
    };
    let a = io(p1, 'a', 0, 0);
    let b = io(p2, 'b', p1.inputs.len(), p1.outputs.len());
    let mut out = RegProgram {
        instrs: Vec::new(),
        labels: BTreeMap::new(),
        inputs: a.inputs.iter().chain(&b.inputs).cloned().collect(),
        outputs: a.outputs.iter().chain(&b.outputs).cloned().collect(),
    };
    out.append(a);
    out.append(b);
    out
}

pub fn nat_to_unary(n: &BigUint) -> Word {
    let k: usize = n.try_into().expect("unary word fits in memory");
    Word::unary(k)
}

pub fn unary_to_nat(w: &Word) -> Option<BigUint> {
    w.glyphs().iter().all(|&c| c == '1').then(|| BigUint::from(w.len()))
}

/// The program as a function on unary words over `{1}`. Inputs with other
/// glyphs are rejected.
pub fn reg_semantics(p: &RegProgram, table: Option<ProgramTable>) -> BlackBoxFunction {
    let p = p.clone();
    BlackBoxFunction::new("reg", p.inputs.len(), p.outputs.len(), move |ws, fuel| {
        let Some(args) = ws.iter().map(unary_to_nat).collect::<Option<Vec<_>>>() else {
            return RunOutcome::Rejected { steps_used: 0, cells_used: 0 };
        };
        match run_reg(&p, &args, fuel, table.as_ref()) {
            Ok(r) => r.map(|vs| vs.iter().map(nat_to_unary).collect()),
            Err(_) => RunOutcome::Rejected { steps_used: 0, cells_used: 0 },
        }
    })
}

fn fmt_list(rs: &[String]) -> String {
    rs.join(",")
}

impl fmt::Display for RegProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "inputs {}", self.inputs.join(" "))?;
        writeln!(f, "outputs {}", self.outputs.join(" "))?;
        let mut at: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
        for (l, &n) in &self.labels {
            at.entry(n).or_default().push(l);
        }
        for n in 0..=self.instrs.len() {
            let prefix: String = at.get(&n).map(|ls| ls.iter().map(|l| format!("{l}: ")).collect()).unwrap_or_default();
            let Some(ins) = self.instrs.get(n) else {
                if !prefix.is_empty() {
                    writeln!(f, "{}", prefix.trim_end())?;
                }
                break;
            };
            let body = match ins {
                Instr::SetZero(r) => format!("{r} = 0"),
                Instr::Inc(r) => format!("{r} = {r} + 1"),
                Instr::Dec(r) => format!("{r} = {r} - 1"),
                Instr::IfZeroGoto(r, l) => format!("if {r} = 0 goto {l}"),
                Instr::Call { index, args, rets } => format!("call #{index} ({})->({})", fmt_list(args), fmt_list(rets)),
            };
            writeln!(f, "{prefix}{body}")?;
        }
        Ok(())
    }
}

fn parse_instr(body: &str, line: usize) -> Result<Instr> {
    let err = |m: &str| Error::format(line, m.to_string());
    let toks: Vec<&str> = body.split_whitespace().collect();
    match toks.as_slice() {
        [r, "=", "0"] => Ok(Instr::SetZero(r.to_string())),
        [r, "=", r2, "+", "1"] if r == r2 => Ok(Instr::Inc(r.to_string())),
        [r, "=", r2, "-", "1"] if r == r2 => Ok(Instr::Dec(r.to_string())),
        ["if", r, "=", "0", "goto", l] => Ok(Instr::IfZeroGoto(r.to_string(), l.to_string())),
        ["call", ..] => {
            let rest = body.trim_start_matches("call").trim();
            let rest = rest.strip_prefix('#').ok_or_else(|| err("call needs `#k`"))?;
            let (idx, rest) = rest.split_once('(').ok_or_else(|| err("call needs `(args)`"))?;
            let index = idx.trim().parse().map_err(|_| err("bad call index"))?;
            let (args, rest) = rest.split_once(')').ok_or_else(|| err("unclosed call arguments"))?;
            let rest = rest.trim().strip_prefix("->").ok_or_else(|| err("call needs `->`"))?.trim();
            let rets = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or_else(|| err("call needs `(rets)`"))?;
            let list = |s: &str| -> Vec<String> {
                s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(str::to_string).collect()
            };
            Ok(Instr::Call { index, args: list(args), rets: list(rets) })
        }
        _ => Err(err(&format!("unrecognized instruction {body:?}"))),
    }
}

/// Parses the `.rm` text format.
pub fn parse_rm(text: &str) -> Result<RegProgram> {
    let mut instrs = Vec::new();
    let mut labels = BTreeMap::new();
    let mut inputs = Vec::new();
    let mut outputs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let mut line = raw.trim();
        if line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("inputs") {
            inputs.extend(rest.split_whitespace().map(str::to_string));
            continue;
        }
        if let Some(rest) = line.strip_prefix("outputs") {
            outputs.extend(rest.split_whitespace().map(str::to_string));
            continue;
        }
        while let Some((l, rest)) = line.split_once(':') {
            let l = l.trim();
            if l.is_empty() || l.contains(char::is_whitespace) {
                return Err(Error::format(n, format!("bad label {l:?}")));
            }
            if labels.insert(l.to_string(), instrs.len()).is_some() {
                return Err(Error::format(n, format!("duplicate label {l}")));
            }
            line = rest.trim();
        }
        if !line.is_empty() {
            instrs.push(parse_instr(line, n)?);
        }
    }
    RegProgram::new(instrs, labels, inputs, outputs).map_err(|e| match e {
        Error::InvalidMachine(m) => Error::format(0, m),
        other => other,
    })
}

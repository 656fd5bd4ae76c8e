//! Machines as propositional formulas.
//!
//! A bounded run of a machine is described by variables `C` (cell content),
//! `P` (head position) and `Q` (control state), indexed by time. The
//! tableau's clauses admit exactly the legal runs of the machine up to the
//! time and position bounds, so satisfying assignments are execution traces.

mod solver;

use std::collections::HashMap;
use std::fmt;

use crate::base::Word;
use crate::error::{Error, Result};
use crate::turing::{Configuration, Move, Pattern, Sym, Tape, TuringMachine, Write};

pub use solver::{solve, solve_with_stats, SolveResult, SolverStats};

/// A literal: `v` or `-v` for a variable `v ≥ 1`.
pub type Lit = i32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Zone {
    Input,
    Work,
    Output,
}

impl Zone {
    fn name(self) -> &'static str {
        match self {
            Zone::Input => "input",
            Zone::Work => "work",
            Zone::Output => "output",
        }
    }

    fn parse(s: &str) -> Option<Zone> {
        match s {
            "input" => Some(Zone::Input),
            "work" => Some(Zone::Work),
            "output" => Some(Zone::Output),
            _ => None,
        }
    }
}

/// The tableau's primary variables. Tape index `i`, position `j` and state
/// `q` count from 1; time `t` and symbol `k` from 0 (symbol 0 is the blank).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TableauVar {
    /// Cell `j` of tape `i` holds symbol `k` at time `t`.
    C { z: Zone, t: usize, i: usize, j: usize, k: usize },
    /// The head of tape `i` is on cell `j` at time `t`.
    P { z: Zone, t: usize, i: usize, j: usize },
    /// The machine is in state `q` at time `t`.
    Q { t: usize, q: usize },
}

/// Auxiliary variables, defined from the primary ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AuxVar {
    /// The head of tape `i` reads `k` at time `t`.
    R { z: Zone, t: usize, i: usize, k: usize },
    /// Rule `r` (from 1) is applicable at time `t`.
    M { t: usize, r: usize },
    /// Rule `r` is the one taken from time `t` to `t + 1`.
    A { t: usize, r: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum VarTag {
    Tableau(TableauVar),
    Aux(AuxVar),
    /// A variable of the `n`-th operand of a composition.
    Part(usize, Box<VarTag>),
    Free,
}

impl VarTag {
    pub fn is_aux(&self) -> bool {
        match self {
            VarTag::Aux(_) => true,
            VarTag::Part(_, t) => t.is_aux(),
            _ => false,
        }
    }
}

impl fmt::Display for VarTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarTag::Tableau(TableauVar::C { z, t, i, j, k }) => write!(f, "C,{},{t},{i},{j},{k}", z.name()),
            VarTag::Tableau(TableauVar::P { z, t, i, j }) => write!(f, "P,{},{t},{i},{j}", z.name()),
            VarTag::Tableau(TableauVar::Q { t, q }) => write!(f, "Q,{t},{q}"),
            VarTag::Aux(AuxVar::R { z, t, i, k }) => write!(f, "R,{},{t},{i},{k}", z.name()),
            VarTag::Aux(AuxVar::M { t, r }) => write!(f, "M,{t},{r}"),
            VarTag::Aux(AuxVar::A { t, r }) => write!(f, "A,{t},{r}"),
            VarTag::Part(n, inner) => write!(f, "{n}/{inner}"),
            VarTag::Free => f.write_str("free"),
        }
    }
}

impl std::str::FromStr for VarTag {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<VarTag, String> {
        if let Some((n, rest)) = s.split_once('/') {
            let n = n.parse().map_err(|_| format!("bad part number {n:?}"))?;
            return Ok(VarTag::Part(n, Box::new(rest.parse()?)));
        }
        if s == "free" {
            return Ok(VarTag::Free);
        }
        let f: Vec<&str> = s.split(',').collect();
        let num = |x: &str| x.parse::<usize>().map_err(|_| format!("bad index {x:?}"));
        let zone = |x: &str| Zone::parse(x).ok_or_else(|| format!("bad zone {x:?}"));
        let tag = match (f[0], f.len()) {
            ("C", 6) => VarTag::Tableau(TableauVar::C {
                z: zone(f[1])?,
                t: num(f[2])?,
                i: num(f[3])?,
                j: num(f[4])?,
                k: num(f[5])?,
            }),
            ("P", 5) => VarTag::Tableau(TableauVar::P { z: zone(f[1])?, t: num(f[2])?, i: num(f[3])?, j: num(f[4])? }),
            ("Q", 3) => VarTag::Tableau(TableauVar::Q { t: num(f[1])?, q: num(f[2])? }),
            ("R", 5) => VarTag::Aux(AuxVar::R { z: zone(f[1])?, t: num(f[2])?, i: num(f[3])?, k: num(f[4])? }),
            ("M", 3) => VarTag::Aux(AuxVar::M { t: num(f[1])?, r: num(f[2])? }),
            ("A", 3) => VarTag::Aux(AuxVar::A { t: num(f[1])?, r: num(f[2])? }),
            _ => return Err(format!("unknown variable {s:?}")),
        };
        Ok(tag)
    }
}

/// Where a tableau's variables live. Variables are numbered time-major, so
/// lowest-index-first branching follows the run forward.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub t_max: usize,
    pub p_max: usize,
    pub inputs: usize,
    pub work: usize,
    pub outputs: usize,
    /// Tape symbols: blank, alphabet, extra glyphs.
    pub syms: usize,
    pub sigma: usize,
    pub states: usize,
    pub rules: usize,
}

impl Layout {
    fn of(m: &TuringMachine, t_max: usize, p_max: usize) -> Layout {
        Layout {
            t_max,
            p_max,
            inputs: m.inputs(),
            work: m.work_tapes(),
            outputs: m.outputs(),
            syms: m.tape_symbol_count(),
            sigma: m.alphabet().len(),
            states: m.states().len(),
            rules: m.rules().len(),
        }
    }

    fn matches(&self, m: &TuringMachine) -> bool {
        let o = Layout::of(m, self.t_max, self.p_max);
        *self == o
    }

    fn tapes(&self) -> usize {
        self.inputs + self.work + self.outputs
    }

    fn block(&self) -> usize {
        let k = self.tapes();
        k * self.p_max * self.syms + k * self.p_max + self.states + k * self.syms + 2 * self.rules
    }

    /// Total variables: the last time step has no rule-choice variables.
    pub fn var_count(&self) -> usize {
        (self.t_max + 1) * self.block() - self.rules
    }

    fn base(&self, t: usize) -> usize {
        t * self.block() + 1
    }

    /// Zero-based global tape, zero-based cell.
    pub fn c(&self, t: usize, tape: usize, j: usize, k: usize) -> Lit {
        (self.base(t) + (tape * self.p_max + j) * self.syms + k) as Lit
    }

    pub fn p(&self, t: usize, tape: usize, j: usize) -> Lit {
        let off = self.tapes() * self.p_max * self.syms;
        (self.base(t) + off + tape * self.p_max + j) as Lit
    }

    pub fn q(&self, t: usize, q: usize) -> Lit {
        let off = self.tapes() * self.p_max * (self.syms + 1);
        (self.base(t) + off + q) as Lit
    }

    fn r(&self, t: usize, tape: usize, k: usize) -> Lit {
        let off = self.tapes() * self.p_max * (self.syms + 1) + self.states;
        (self.base(t) + off + tape * self.syms + k) as Lit
    }

    fn m(&self, t: usize, r: usize) -> Lit {
        let off = self.tapes() * self.p_max * (self.syms + 1) + self.states + self.tapes() * self.syms;
        (self.base(t) + off + r) as Lit
    }

    fn a(&self, t: usize, r: usize) -> Lit {
        self.m(t, r) + self.rules as Lit
    }

    fn zone_of(&self, tape: usize) -> (Zone, usize) {
        if tape < self.inputs {
            (Zone::Input, tape + 1)
        } else if tape < self.inputs + self.work {
            (Zone::Work, tape - self.inputs + 1)
        } else {
            (Zone::Output, tape - self.inputs - self.work + 1)
        }
    }

    fn tags(&self) -> Vec<VarTag> {
        let mut tags = vec![VarTag::Free; self.var_count()];
        let mut set = |v: Lit, tag: VarTag| tags[v as usize - 1] = tag;
        for t in 0..=self.t_max {
            for tape in 0..self.tapes() {
                let (z, i) = self.zone_of(tape);
                for j in 0..self.p_max {
                    for k in 0..self.syms {
                        set(self.c(t, tape, j, k), VarTag::Tableau(TableauVar::C { z, t, i, j: j + 1, k }));
                    }
                    set(self.p(t, tape, j), VarTag::Tableau(TableauVar::P { z, t, i, j: j + 1 }));
                }
                for k in 0..self.syms {
                    set(self.r(t, tape, k), VarTag::Aux(AuxVar::R { z, t, i, k }));
                }
            }
            for q in 0..self.states {
                set(self.q(t, q), VarTag::Tableau(TableauVar::Q { t, q: q + 1 }));
            }
            for r in 0..self.rules {
                set(self.m(t, r), VarTag::Aux(AuxVar::M { t, r: r + 1 }));
                if t < self.t_max {
                    set(self.a(t, r), VarTag::Aux(AuxVar::A { t, r: r + 1 }));
                }
            }
        }
        tags
    }
}

/// Interface variables for composition: `[tape][cell][symbol]` over blank
/// and the alphabet symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interface {
    pub sigma: usize,
    pub inputs: Vec<Vec<Vec<u32>>>,
    pub outputs: Vec<Vec<Vec<u32>>>,
}

impl Interface {
    fn shifted(grid: &[Vec<Vec<u32>>], by: u32) -> Vec<Vec<Vec<u32>>> {
        grid.iter().map(|t| t.iter().map(|c| c.iter().map(|v| v + by).collect()).collect()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    var_count: u32,
    clauses: Vec<Vec<Lit>>,
    tags: Vec<VarTag>,
    layout: Option<Layout>,
    interface: Option<Interface>,
}

impl CnfFormula {
    pub fn new(var_count: u32) -> CnfFormula {
        CnfFormula {
            var_count,
            clauses: Vec::new(),
            tags: vec![VarTag::Free; var_count as usize],
            layout: None,
            interface: None,
        }
    }

    /// The interface-only formula on `tapes` tapes of `cells` cells: inputs
    /// and outputs are the same variables and there are no clauses.
    pub fn identity(tapes: usize, cells: usize, sigma: usize) -> CnfFormula {
        let n = (tapes * cells * (sigma + 1)) as u32;
        let mut f = CnfFormula::new(n);
        let mut next = 0;
        let grid: Vec<Vec<Vec<u32>>> = (0..tapes)
            .map(|_| {
                (0..cells)
                    .map(|_| {
                        (0..=sigma)
                            .map(|_| {
                                next += 1;
                                next
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        f.interface = Some(Interface { sigma, inputs: grid.clone(), outputs: grid });
        f
    }

    pub fn var_count(&self) -> u32 {
        self.var_count
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    pub fn layout(&self) -> Option<&Layout> {
        self.layout.as_ref()
    }

    pub fn interface(&self) -> Option<&Interface> {
        self.interface.as_ref()
    }

    pub fn tag(&self, v: u32) -> Option<&VarTag> {
        self.tags.get((v as usize).checked_sub(1)?)
    }

    pub fn tags(&self) -> &[VarTag] {
        &self.tags
    }

    pub fn index_of(&self, tag: &VarTag) -> Option<u32> {
        self.tags.iter().position(|t| t == tag).map(|p| p as u32 + 1)
    }

    pub fn add_clause(&mut self, clause: Vec<Lit>) -> Result<()> {
        if clause.is_empty() {
            return Err(Error::Shape("empty clause".into()));
        }
        if let Some(&l) = clause.iter().find(|l| l.unsigned_abs() > self.var_count || **l == 0) {
            return Err(Error::Shape(format!("literal {l} out of range")));
        }
        self.clauses.push(clause);
        Ok(())
    }

    fn push(&mut self, clause: Vec<Lit>) {
        debug_assert!(!clause.is_empty());
        self.clauses.push(clause);
    }

    fn exactly_one(&mut self, vars: &[Lit]) {
        self.push(vars.to_vec());
        self.at_most_one(vars);
    }

    fn at_most_one(&mut self, vars: &[Lit]) {
        for (n, &a) in vars.iter().enumerate() {
            for &b in &vars[n + 1..] {
                self.push(vec![-a, -b]);
            }
        }
    }

    /// A contradiction made of non-empty clauses.
    fn falsify(&mut self) {
        self.push(vec![1]);
        self.push(vec![-1]);
    }

    /// Whether `assignment` (indexed from variable 1) satisfies every clause.
    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        assignment.len() == self.var_count as usize
            && self.clauses.iter().all(|c| c.iter().any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0)))
    }

    /// Checks that every time step has exactly one state, one head position
    /// per tape and one symbol per cell. Auxiliary variables are ignored.
    pub fn audit(&self, assignment: &[bool]) -> Result<()> {
        let lay = self.layout.as_ref().ok_or_else(|| Error::Unsupported("audit of a formula without a tableau layout".into()))?;
        if assignment.len() != self.var_count as usize {
            return Err(Error::Audit(format!("assignment has {} values for {} variables", assignment.len(), self.var_count)));
        }
        let val = |v: Lit| assignment[v as usize - 1];
        let count = |it: &mut dyn Iterator<Item = Lit>| it.filter(|&v| val(v)).count();
        for t in 0..=lay.t_max {
            let n = count(&mut (0..lay.states).map(|q| lay.q(t, q)));
            if n != 1 {
                return Err(Error::Audit(format!("{n} states at time {t}")));
            }
            for tape in 0..lay.tapes() {
                let n = count(&mut (0..lay.p_max).map(|j| lay.p(t, tape, j)));
                if n != 1 {
                    return Err(Error::Audit(format!("{n} head positions on tape {} at time {t}", tape + 1)));
                }
                for j in 0..lay.p_max {
                    let n = count(&mut (0..lay.syms).map(|k| lay.c(t, tape, j, k)));
                    if n != 1 {
                        return Err(Error::Audit(format!(
                            "{n} symbols in cell {} of tape {} at time {t}",
                            j + 1,
                            tape + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

fn no_oracle(m: &TuringMachine) -> Result<()> {
    if m.oracle_port().is_some() {
        return Err(Error::Unsupported("tableau of an oracle machine".into()));
    }
    Ok(())
}

/// The bounded tableau of `m`: legal runs of `t_max` steps whose heads stay
/// within `p_max` cells. A run that halts early repeats its final
/// configuration, and an input tape starts with a word followed by blanks.
pub fn tableau(m: &TuringMachine, t_max: usize, p_max: usize) -> Result<CnfFormula> {
    no_oracle(m)?;
    if p_max == 0 {
        return Err(Error::Shape("the position bound must be positive".into()));
    }
    let lay = Layout::of(m, t_max, p_max);
    let tapes = lay.tapes();
    let (p, g) = (p_max, lay.syms);
    let mut f = CnfFormula::new(lay.var_count() as u32);
    f.tags = lay.tags();

    for t in 0..=t_max {
        let qs: Vec<Lit> = (0..lay.states).map(|q| lay.q(t, q)).collect();
        f.exactly_one(&qs);
        for tape in 0..tapes {
            let ps: Vec<Lit> = (0..p).map(|j| lay.p(t, tape, j)).collect();
            f.exactly_one(&ps);
            for j in 0..p {
                let cs: Vec<Lit> = (0..g).map(|k| lay.c(t, tape, j, k)).collect();
                f.exactly_one(&cs);
                for k in 0..g {
                    f.push(vec![-lay.p(t, tape, j), -lay.c(t, tape, j, k), lay.r(t, tape, k)]);
                }
            }
            let rs: Vec<Lit> = (0..g).map(|k| lay.r(t, tape, k)).collect();
            f.at_most_one(&rs);
        }
        for (ri, rule) in m.rules().iter().enumerate() {
            let mv = lay.m(t, ri);
            f.push(vec![-mv, lay.q(t, rule.from)]);
            let mut converse = vec![-lay.q(t, rule.from), mv];
            for (tape, pat) in rule.read.iter().enumerate() {
                if let Pattern::Set(_) = pat {
                    let (yes, no): (Vec<usize>, Vec<usize>) = (0..g).partition(|&k| pat.matches(k as Sym));
                    let mut need = vec![-mv];
                    need.extend(yes.iter().map(|&k| lay.r(t, tape, k)));
                    f.push(need);
                    converse.extend(no.iter().map(|&k| lay.r(t, tape, k)));
                }
            }
            f.push(converse);
        }
    }

    f.push(vec![lay.q(0, m.start())]);
    for tape in 0..tapes {
        f.push(vec![lay.p(0, tape, 0)]);
        for j in 0..p {
            if tape >= lay.inputs {
                f.push(vec![lay.c(0, tape, j, 0)]);
            } else {
                for k in lay.sigma + 1..g {
                    f.push(vec![-lay.c(0, tape, j, k)]);
                }
                if j + 1 < p {
                    f.push(vec![-lay.c(0, tape, j, 0), lay.c(0, tape, j + 1, 0)]);
                }
            }
        }
    }

    for t in 0..t_max {
        let all_a: Vec<Lit> = (0..lay.rules).map(|r| lay.a(t, r)).collect();
        f.at_most_one(&all_a);
        for (ri, rule) in m.rules().iter().enumerate() {
            let a = lay.a(t, ri);
            f.push(vec![-a, lay.m(t, ri)]);
            let mut some = vec![-lay.m(t, ri)];
            some.extend(&all_a);
            f.push(some);
            f.push(vec![-a, lay.q(t + 1, rule.to)]);
            for tape in 0..tapes {
                for j in 0..p {
                    let here = lay.p(t, tape, j);
                    let dest = match rule.moves[tape] {
                        Move::L => Some(j.saturating_sub(1)),
                        Move::S => Some(j),
                        Move::R => (j + 1 < p).then_some(j + 1),
                    };
                    match dest {
                        Some(d) => f.push(vec![-a, -here, lay.p(t + 1, tape, d)]),
                        None => f.push(vec![-a, -here]),
                    }
                    if let Write::Sym(s) = rule.write[tape] {
                        f.push(vec![-a, -here, lay.c(t + 1, tape, j, s as usize)]);
                    }
                }
            }
        }
        // No rule taken: the configuration stays as it is.
        for q in 0..lay.states {
            let mut c = vec![-lay.q(t, q), lay.q(t + 1, q)];
            c.extend(&all_a);
            f.push(c);
        }
        for tape in 0..tapes {
            let writers: Vec<Lit> =
                m.rules().iter().enumerate().filter(|(_, r)| r.writes_on(tape)).map(|(ri, _)| lay.a(t, ri)).collect();
            for j in 0..p {
                let here = lay.p(t, tape, j);
                let mut c = vec![-here, lay.p(t + 1, tape, j)];
                c.extend(&all_a);
                f.push(c);
                for k in 0..g {
                    let (now, next) = (lay.c(t, tape, j, k), lay.c(t + 1, tape, j, k));
                    f.push(vec![-now, next, here]);
                    let mut c = vec![-now, next, -here];
                    c.extend(&writers);
                    f.push(c);
                }
            }
        }
    }

    let grid = |t: usize, first: usize, n: usize| -> Vec<Vec<Vec<u32>>> {
        (first..first + n)
            .map(|tape| (0..p).map(|j| (0..=lay.sigma).map(|k| lay.c(t, tape, j, k) as u32).collect()).collect())
            .collect()
    };
    f.interface = Some(Interface {
        sigma: lay.sigma,
        inputs: grid(0, 0, lay.inputs),
        outputs: grid(t_max, lay.inputs + lay.work, lay.outputs),
    });
    f.layout = Some(lay);
    Ok(f)
}

/// Fixes the input tapes at time 0 to `x`, blank beyond each word.
pub fn with_input(f: &CnfFormula, m: &TuringMachine, x: &[Word]) -> Result<CnfFormula> {
    let lay = f.layout.as_ref().ok_or_else(|| Error::Unsupported("input units need a tableau layout".into()))?;
    if !lay.matches(m) {
        return Err(Error::Shape("formula was not built from this machine".into()));
    }
    // Reuses the machine's own input validation.
    let init = m.initial_configuration(x)?;
    if let Some(w) = x.iter().find(|w| w.len() > lay.p_max) {
        return Err(Error::Shape(format!("input of length {} exceeds the position bound {}", w.len(), lay.p_max)));
    }
    let mut g = f.clone();
    for tape in 0..lay.inputs {
        for j in 0..lay.p_max {
            g.push(vec![lay.c(0, tape, j, init.tapes[tape].cell(j) as usize)]);
        }
    }
    Ok(g)
}

/// Bounded tableau plus acceptance: at the final time the machine is halted
/// in an accepting state. Halted runs repeat their last configuration, so
/// this holds iff some run accepts within `t_max` steps.
pub fn accept_formula(m: &TuringMachine, t_max: usize, p_max: usize) -> Result<CnfFormula> {
    let mut f = tableau(m, t_max, p_max)?;
    let lay = f.layout.clone().expect("tableau layout");
    for r in 0..lay.rules {
        f.push(vec![-lay.m(t_max, r)]);
    }
    let acc: Vec<Lit> = (0..lay.states).filter(|&q| m.is_accepting(q)).map(|q| lay.q(t_max, q)).collect();
    if acc.is_empty() {
        f.falsify();
    } else {
        f.push(acc);
    }
    Ok(f)
}

/// Default position bound: room for every input and for `t` moves right.
pub fn position_bound(x: &[Word], t: usize) -> usize {
    x.iter().map(Word::len).max().unwrap_or(0).max(t + 1)
}

/// Satisfiable iff `m` accepts `x` within `t` steps.
pub fn halt_formula(m: &TuringMachine, x: &[Word], t: usize) -> Result<CnfFormula> {
    with_input(&accept_formula(m, t, position_bound(x, t))?, m, x)
}

/// [`halt_formula`] for a single-input machine that declares its accept or
/// reject states.
pub fn cook_levin_encode(m: &TuringMachine, x: &Word, t: usize) -> Result<CnfFormula> {
    if m.accept_states().is_empty() && m.reject_states().is_empty() {
        return Err(Error::InvalidMachine("decision machine must declare accept or reject states".into()));
    }
    if m.inputs() != 1 {
        return Err(Error::Shape(format!("decision machine takes one input, this one takes {}", m.inputs())));
    }
    halt_formula(m, std::slice::from_ref(x), t)
}

/// Conjunction of `f1` and `f2` with `f1`'s final outputs equal to `f2`'s
/// initial inputs, cell by cell. Cells one side has and the other lacks
/// are fixed to blank.
pub fn compose_logic(f1: &CnfFormula, f2: &CnfFormula) -> Result<CnfFormula> {
    let (i1, i2) = match (&f1.interface, &f2.interface) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::Unsupported("composition needs interface variables".into())),
    };
    if i1.outputs.len() != i2.inputs.len() {
        return Err(Error::Shape(format!("{} outputs feed {} inputs", i1.outputs.len(), i2.inputs.len())));
    }
    if i1.sigma != i2.sigma {
        return Err(Error::Alphabet("interface alphabets differ in size".into()));
    }
    let shift = f1.var_count;
    let mut g = CnfFormula::new(f1.var_count + f2.var_count);
    g.tags = f1
        .tags
        .iter()
        .map(|t| VarTag::Part(1, Box::new(t.clone())))
        .chain(f2.tags.iter().map(|t| VarTag::Part(2, Box::new(t.clone()))))
        .collect();
    g.clauses = f1.clauses.clone();
    let off = shift as Lit;
    g.clauses.extend(f2.clauses.iter().map(|c| c.iter().map(|&l| if l > 0 { l + off } else { l - off }).collect()));
    for (out, inp) in i1.outputs.iter().zip(&i2.inputs) {
        let inp = Interface::shifted(std::slice::from_ref(inp), shift).remove(0);
        let common = out.len().min(inp.len());
        for j in 0..common {
            for (&a, &b) in out[j].iter().zip(&inp[j]) {
                let (a, b) = (a as Lit, b as Lit);
                g.push(vec![-a, b]);
                g.push(vec![a, -b]);
            }
        }
        for cell in out.iter().skip(common).chain(inp.iter().skip(common)) {
            g.push(vec![cell[0] as Lit]);
        }
    }
    g.interface = Some(Interface {
        sigma: i1.sigma,
        inputs: i1.inputs.clone(),
        outputs: Interface::shifted(&i2.outputs, shift),
    });
    Ok(g)
}

/// Reads the run out of a satisfying assignment and checks every step
/// against the machine's rules. The trace ends at the first halting
/// configuration, or at the time bound.
pub fn decode_trace(f: &CnfFormula, assignment: &[bool], m: &TuringMachine) -> Result<Vec<Configuration>> {
    let lay = f.layout.as_ref().ok_or_else(|| Error::Unsupported("trace of a formula without a tableau layout".into()))?;
    if !lay.matches(m) {
        return Err(Error::Shape("formula was not built from this machine".into()));
    }
    if !f.is_satisfied_by(assignment) {
        return Err(Error::Audit("assignment does not satisfy the formula".into()));
    }
    f.audit(assignment)?;
    let val = |v: Lit| assignment[v as usize - 1];
    let config = |t: usize| -> Configuration {
        let state = (0..lay.states).find(|&q| val(lay.q(t, q))).expect("audited");
        let tapes = (0..lay.tapes())
            .map(|tape| {
                let mut cells: Vec<Sym> =
                    (0..lay.p_max).map(|j| (0..lay.syms).find(|&k| val(lay.c(t, tape, j, k))).expect("audited") as Sym).collect();
                while cells.last() == Some(&0) {
                    cells.pop();
                }
                let head = (0..lay.p_max).find(|&j| val(lay.p(t, tape, j))).expect("audited");
                Tape { cells, head }
            })
            .collect();
        Configuration { state, tapes, steps: t as u64, queried: false }
    };
    let mut trace = vec![config(0)];
    for t in 0..lay.t_max {
        let cur = trace.last().expect("non-empty");
        let succ = m.step(cur);
        if succ.is_empty() {
            break;
        }
        let next = config(t + 1);
        if !succ.iter().any(|s| s.same_instant(&next)) {
            return Err(Error::Audit(format!("time {t} to {} is not a step of the machine", t + 1)));
        }
        trace.push(next);
    }
    let last = trace.last().expect("non-empty");
    let frozen = (trace.len() - 1..=lay.t_max).all(|t| config(t).same_instant(last));
    if !frozen {
        return Err(Error::Audit("configuration changes after the machine halted".into()));
    }
    Ok(trace)
}

/// DIMACS CNF text.
pub fn emit_dimacs(f: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", f.var_count, f.clauses.len());
    for c in &f.clauses {
        for l in c {
            out.push_str(&l.to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}

/// The sidecar naming every tagged variable: `var <n> = <tag>`.
pub fn emit_var_map(f: &CnfFormula) -> String {
    let mut out = String::new();
    for (n, tag) in f.tags.iter().enumerate() {
        if *tag != VarTag::Free {
            out.push_str(&format!("var {} = {tag}\n", n + 1));
        }
    }
    out
}

fn ferr(line: usize, msg: impl Into<String>) -> Error {
    Error::format(line, msg)
}

/// Parses DIMACS CNF. Comment lines start with `c`; clauses may span lines.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let mut header: Option<(u32, usize)> = None;
    let mut clauses = Vec::new();
    let mut cur = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let ln = n + 1;
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() != 3 || parts[0] != "cnf" || header.is_some() {
                return Err(ferr(ln, "bad problem line"));
            }
            let vars = parts[1].parse().map_err(|_| ferr(ln, "bad variable count"))?;
            let cls = parts[2].parse().map_err(|_| ferr(ln, "bad clause count"))?;
            header = Some((vars, cls));
            continue;
        }
        let (vars, _) = header.ok_or_else(|| ferr(ln, "clause before the problem line"))?;
        for tok in line.split_whitespace() {
            let l: Lit = tok.parse().map_err(|_| ferr(ln, format!("bad literal {tok:?}")))?;
            if l == 0 {
                if cur.is_empty() {
                    return Err(ferr(ln, "empty clause"));
                }
                clauses.push(std::mem::take(&mut cur));
            } else if l.unsigned_abs() > vars {
                return Err(ferr(ln, format!("literal {l} exceeds {vars} variables")));
            } else {
                cur.push(l);
            }
        }
    }
    let (vars, count) = header.ok_or_else(|| ferr(1, "missing problem line"))?;
    if !cur.is_empty() {
        return Err(ferr(text.lines().count(), "unterminated clause"));
    }
    if clauses.len() != count {
        return Err(ferr(1, format!("header announces {count} clauses, found {}", clauses.len())));
    }
    let mut f = CnfFormula::new(vars);
    f.clauses = clauses;
    Ok(f)
}

/// Parses DIMACS plus its variable sidecar.
pub fn parse_dimacs_with_map(cnf: &str, map: &str) -> Result<CnfFormula> {
    let mut f = parse_dimacs(cnf)?;
    let mut seen = HashMap::new();
    for (n, raw) in map.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let body = line.strip_prefix("var ").ok_or_else(|| ferr(n + 1, "expected `var <n> = <name>`"))?;
        let (num, name) = body.split_once('=').ok_or_else(|| ferr(n + 1, "missing `=`"))?;
        let v: u32 = num.trim().parse().map_err(|_| ferr(n + 1, "bad variable number"))?;
        if v == 0 || v > f.var_count {
            return Err(ferr(n + 1, format!("variable {v} out of range")));
        }
        let tag: VarTag = name.trim().parse().map_err(|e: String| ferr(n + 1, e))?;
        if seen.insert(tag.clone(), v).is_some() {
            return Err(ferr(n + 1, format!("{tag} named twice")));
        }
        f.tags[v as usize - 1] = tag;
    }
    Ok(f)
}

/// Restores the tableau layout of a formula read back from DIMACS and its
/// variable map, so that [`decode_trace`] can use it. Every tag must sit
/// where the tableau of `m` would put it.
pub fn attach_layout(f: &CnfFormula, m: &TuringMachine) -> Result<CnfFormula> {
    let (mut t_max, mut p_max) = (0, 0);
    for tag in &f.tags {
        match tag {
            VarTag::Tableau(TableauVar::Q { t, .. }) => t_max = t_max.max(*t),
            VarTag::Tableau(TableauVar::P { j, .. }) => p_max = p_max.max(*j),
            _ => {}
        }
    }
    let lay = Layout::of(m, t_max, p_max);
    if p_max == 0 || lay.var_count() != f.var_count as usize || lay.tags() != f.tags {
        return Err(Error::Shape("variable map does not match a tableau of this machine".into()));
    }
    let mut g = f.clone();
    g.layout = Some(lay);
    Ok(g)
}

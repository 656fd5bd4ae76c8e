//! Semi-decision, dovetailing, reductions between machine problems, and
//! the diagonal argument against halting deciders.
//!
//! Problems about machines take Gödel numbers. A number that does not name
//! a one-input machine without an oracle stands for the always-rejecting
//! machine, so every transform is total.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::Serialize;

use crate::base::{Alphabet, BlackBoxFunction, Fuel, RunOutcome, Word};
use crate::encodings::{godel_decode, godel_number};
use crate::error::{Error, Result};
use crate::regmachine::{parse_rm, run_reg, ProgramTable};
use crate::turing::samples::always_reject;
use crate::turing::{to_canonical_text, Move, Pattern, Rule, StateId, Sym, TuringMachine, Write};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DecisionVerdict {
    True,
    False,
    /// Not decided; carries the fuel spent looking.
    Unknown(u64),
}

impl DecisionVerdict {
    pub fn is_decided(self) -> bool {
        !matches!(self, DecisionVerdict::Unknown(_))
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            DecisionVerdict::True
        } else {
            DecisionVerdict::False
        }
    }

    pub fn not(self) -> Self {
        match self {
            DecisionVerdict::True => DecisionVerdict::False,
            DecisionVerdict::False => DecisionVerdict::True,
            u => u,
        }
    }
}

impl fmt::Display for DecisionVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecisionVerdict::True => f.write_str("true"),
            DecisionVerdict::False => f.write_str("false"),
            DecisionVerdict::Unknown(n) => write!(f, "unknown({n})"),
        }
    }
}

/// The machine a number denotes.
pub fn machine_of(y: &BigUint) -> TuringMachine {
    match godel_decode(y) {
        Ok(m) if m.inputs() == 1 && m.oracle_port().is_none() => m,
        _ => always_reject(&Alphabet::binary()),
    }
}

/// Number of the always-rejecting machine, the reference machine with the
/// empty language.
pub fn empty_language_number() -> BigUint {
    godel_number(&always_reject(&Alphabet::binary()))
}

/// Outcome of a run where inputs outside the machine's alphabet count as
/// rejected.
fn outcome(m: &TuringMachine, w: &Word, fuel: Fuel) -> RunOutcome {
    m.run(std::slice::from_ref(w), fuel, None).unwrap_or(RunOutcome::Rejected { steps_used: 0, cells_used: 0 })
}

/// Runs machine `y` on `x`: acceptance is True, a witnessed rejection is
/// False, running out of fuel is Unknown.
pub fn semi_decide_halt(y: &BigUint, x: &Word, fuel: Fuel) -> DecisionVerdict {
    match outcome(&machine_of(y), x, fuel) {
        RunOutcome::Halted { .. } => DecisionVerdict::True,
        RunOutcome::Rejected { .. } => DecisionVerdict::False,
        RunOutcome::FuelExhausted => DecisionVerdict::Unknown(fuel.0),
    }
}

/// Decides membership from recognizers of a set and of its complement.
///
/// Both run with a shared, doubling budget, which by fuel monotonicity
/// observes the same first acceptance as strict alternation of steps up to
/// a factor of two. A round in which both accept, or both reject, breaks
/// the complementarity promise.
pub fn dovetail_decider(
    f_rec: &BlackBoxFunction,
    fc_rec: &BlackBoxFunction,
    x: &[Word],
    fuel: Fuel,
) -> Result<DecisionVerdict> {
    let mut budget = 1u64.min(fuel.0);
    let mut spent = 0u64;
    loop {
        let a = f_rec.evaluate(x, Fuel(budget));
        let b = fc_rec.evaluate(x, Fuel(budget));
        spent += a.steps_used().unwrap_or(budget) + b.steps_used().unwrap_or(budget);
        match (a.is_halted(), b.is_halted()) {
            (true, true) => {
                return Err(Error::PromiseViolation(format!("both recognizers accept {x:?}")));
            }
            (true, false) => return Ok(DecisionVerdict::True),
            (false, true) => return Ok(DecisionVerdict::False),
            _ => {}
        }
        if matches!(a, RunOutcome::Rejected { .. }) && matches!(b, RunOutcome::Rejected { .. }) {
            return Err(Error::PromiseViolation(format!("both recognizers reject {x:?}")));
        }
        if budget >= fuel.0 {
            return Ok(DecisionVerdict::Unknown(spent));
        }
        budget = (budget * 2).min(fuel.0);
    }
}

/// Builds machines out of pieces of other machines, each piece on its own
/// tapes. Symbols are shared by glyph.
struct Splice {
    alphabet: Alphabet,
    extra: Vec<char>,
    shape: (usize, usize, usize),
    states: Vec<String>,
    rules: Vec<Rule>,
}

impl Splice {
    fn new(blank: char, machines: &[&TuringMachine], glyphs: &[char], shape: (usize, usize, usize)) -> Result<Self> {
        let mut syms: Vec<char> = Vec::new();
        for c in machines.iter().flat_map(|m| m.alphabet().symbols().iter().copied()).chain(glyphs.iter().copied()) {
            if !syms.contains(&c) {
                syms.push(c);
            }
        }
        let alphabet = Alphabet::new(syms.iter().copied(), blank)?;
        let used: BTreeSet<char> = syms.iter().copied().chain([blank]).collect();
        let mut extra: Vec<char> = Vec::new();
        for &c in machines.iter().flat_map(|m| m.extra_glyphs()) {
            if !used.contains(&c) && !extra.contains(&c) {
                extra.push(c);
            }
        }
        Ok(Splice { alphabet, extra, shape, states: Vec::new(), rules: Vec::new() })
    }

    fn tapes(&self) -> usize {
        self.shape.0 + self.shape.1 + self.shape.2
    }

    fn state(&mut self, name: &str) -> StateId {
        match self.states.iter().position(|s| s == name) {
            Some(q) => q,
            None => {
                self.states.push(name.to_string());
                self.states.len() - 1
            }
        }
    }

    fn sym(&self, c: char) -> Sym {
        if c == self.alphabet.blank() {
            return 0;
        }
        if let Some(i) = self.alphabet.index_of(c) {
            return i as Sym + 1;
        }
        let e = self.extra.iter().position(|&x| x == c).expect("glyph registered");
        (1 + self.alphabet.len() + e) as Sym
    }

    fn map_sym(&self, m: &TuringMachine, s: Sym) -> Sym {
        if s == 0 {
            0
        } else {
            self.sym(m.glyph(s))
        }
    }

    fn map_pattern(&self, m: &TuringMachine, p: &Pattern) -> Pattern {
        match p {
            Pattern::Any => Pattern::Any,
            Pattern::Set(v) => Pattern::set(v.iter().map(|&s| self.map_sym(m, s))),
        }
    }

    /// A rule touching only the listed tapes; the others are read as
    /// anything, kept and left in place.
    fn rule(&mut self, from: StateId, read: &[(usize, Pattern)], to: StateId, write: &[(usize, Sym)], moves: &[(usize, Move)]) {
        let k = self.tapes();
        let mut r = Rule {
            from,
            read: vec![Pattern::Any; k],
            to,
            write: vec![Write::Keep; k],
            moves: vec![Move::S; k],
        };
        for (t, p) in read {
            r.read[*t] = p.clone();
        }
        for &(t, s) in write {
            r.write[t] = Write::Sym(s);
        }
        for &(t, mv) in moves {
            r.moves[t] = mv;
        }
        self.rules.push(r);
    }

    /// Copies `m`'s rules with its tape `i` placed on tape `tape_map[i]` and
    /// its states prefixed. Returns the new id of each of `m`'s states.
    fn inline(&mut self, m: &TuringMachine, prefix: &str, tape_map: &[usize]) -> Vec<StateId> {
        let ids: Vec<StateId> = m.states().iter().map(|s| self.state(&format!("{prefix}{s}"))).collect();
        for r in m.rules() {
            let read: Vec<(usize, Pattern)> =
                r.read.iter().enumerate().map(|(i, p)| (tape_map[i], self.map_pattern(m, p))).collect();
            let write: Vec<(usize, Sym)> = r
                .write
                .iter()
                .enumerate()
                .filter_map(|(i, w)| match w {
                    Write::Sym(s) => Some((tape_map[i], self.map_sym(m, *s))),
                    Write::Keep => None,
                })
                .collect();
            let moves: Vec<(usize, Move)> = r.moves.iter().enumerate().map(|(i, &mv)| (tape_map[i], mv)).collect();
            self.rule(ids[r.from], &read, ids[r.to], &write, &moves);
        }
        ids
    }

    /// Where `m` would halt in an accepting state, continue at `next`.
    fn on_accept(&mut self, m: &TuringMachine, ids: &[StateId], tape_map: &[usize], next: StateId) {
        let universe = m.tape_syms();
        for q in 0..m.states().len() {
            if !m.is_accepting(q) {
                continue;
            }
            let own: Vec<&[Pattern]> = m.rules().iter().filter(|r| r.from == q).map(|r| r.read.as_slice()).collect();
            for cover in crate::turing::construct_complement(&own, m.tape_count(), &universe) {
                let read: Vec<(usize, Pattern)> =
                    cover.iter().enumerate().map(|(i, p)| (tape_map[i], self.map_pattern(m, p))).collect();
                self.rule(ids[q], &read, next, &[], &[]);
            }
        }
    }

    /// Accepts exactly in the states listed; every other state rejects.
    fn build(self, start: StateId, accept: Vec<StateId>) -> Result<TuringMachine> {
        let reject = (0..self.states.len()).filter(|q| !accept.contains(q)).collect();
        TuringMachine::new(self.alphabet, self.extra, self.shape, self.states, start, accept, reject, self.rules, None)
    }
}

/// Tape map for an inlined simulation of `y` whose input tape is tape 1
/// and whose other tapes follow from tape 2.
fn sim_tapes(y: &TuringMachine) -> Vec<usize> {
    (0..y.tape_count()).map(|i| 1 + i).collect()
}

/// States that write `x` on tape 1 and rewind, ending at `then`.
fn load_word(s: &mut Splice, x: &Word, from: StateId, then: StateId) {
    let n = x.len();
    let mut cur = from;
    for (i, &c) in x.glyphs().iter().enumerate() {
        let next = if i + 1 == n { s.state("load:back0") } else { s.state(&format!("load:{}", i + 1)) };
        let sym = s.sym(c);
        s.rule(cur, &[], next, &[(1, sym)], &[(1, Move::R)]);
        cur = next;
    }
    for i in 0..n {
        let next = if i + 1 == n { then } else { s.state(&format!("load:back{}", i + 1)) };
        s.rule(cur, &[], next, &[], &[(1, Move::L)]);
        cur = next;
    }
    if n == 0 {
        s.rule(cur, &[], then, &[], &[]);
    }
}

/// States that check the input tape holds exactly `x`, rejecting otherwise.
fn check_word(s: &mut Splice, x: &Word, from: StateId, then: StateId) {
    let no = s.state("cmp:no");
    let universe: Vec<Sym> = (0..(1 + s.alphabet.len() + s.extra.len()) as Sym).collect();
    let mut cur = from;
    let expect: Vec<Sym> = x.glyphs().iter().map(|&c| s.sym(c)).chain([0]).collect();
    for (i, &want) in expect.iter().enumerate() {
        let next = if i + 1 == expect.len() { then } else { s.state(&format!("cmp:{}", i + 1)) };
        s.rule(cur, &[(0, Pattern::sym(want))], next, &[], &[(0, Move::R)]);
        let others: Vec<Sym> = universe.iter().copied().filter(|&u| u != want).collect();
        s.rule(cur, &[(0, Pattern::Set(others))], no, &[], &[]);
        cur = next;
    }
}

/// Whether machine `y` can run on `x` at all.
fn runs_on(y: &TuringMachine, x: &Word) -> bool {
    x.glyphs().iter().all(|&c| y.alphabet().contains(c))
}

/// A built machine plus the work the construction took, counted as bytes
/// read and written in canonical text.
#[derive(Debug, Clone)]
pub struct Built {
    pub number: BigUint,
    pub machine: TuringMachine,
    pub work: u64,
}

fn finish(input_text: usize, x: &Word, m: TuringMachine) -> Built {
    let text = to_canonical_text(&m);
    let work = (input_text + x.len() + text.len()) as u64;
    let number = godel_number(&m);
    Built { number, machine: m, work }
}

/// Machine that rejects every `w ≠ x` and on `x` runs `y` on `x`. Its
/// language is non-empty iff `y` accepts `x`.
pub fn reduce_halt_to_nonempty(x: &Word, y: &BigUint) -> Result<Built> {
    let ym = machine_of(y);
    let read = to_canonical_text(&ym).len();
    let shape = (1, ym.tape_count(), 0);
    let mut s = Splice::new(ym.alphabet().blank(), &[&ym], x.glyphs(), shape)?;
    let start = s.state("cmp:0");
    if !runs_on(&ym, x) {
        return Ok(finish(read, x, s.build(start, vec![])?));
    }
    let map = sim_tapes(&ym);
    let ids = s.inline(&ym, "y:", &map);
    let load = s.state("load:0");
    check_word(&mut s, x, start, load);
    load_word(&mut s, x, load, ids[ym.start()]);
    let accept = (0..ym.states().len()).filter(|&q| ym.is_accepting(q)).map(|q| ids[q]).collect();
    Ok(finish(read, x, s.build(start, accept)?))
}

pub const PRINTED: &str = "42";

/// Machine that rejects every `w ≠ x`, and on `x` runs `y` on `x` and then
/// prints `42`. Some input makes it print `42` iff `y` accepts `x`.
pub fn reduce_halt_to_print42(x: &Word, y: &BigUint) -> Result<Built> {
    let ym = machine_of(y);
    let read = to_canonical_text(&ym).len();
    let glyphs: Vec<char> = x.glyphs().iter().copied().chain(PRINTED.chars()).collect();
    let shape = (1, ym.tape_count(), 1);
    let mut s = Splice::new(ym.alphabet().blank(), &[&ym], &glyphs, shape)?;
    let start = s.state("cmp:0");
    if !runs_on(&ym, x) {
        return Ok(finish(read, x, s.build(start, vec![])?));
    }
    let out = s.tapes() - 1;
    let map = sim_tapes(&ym);
    let ids = s.inline(&ym, "y:", &map);
    let load = s.state("load:0");
    check_word(&mut s, x, start, load);
    load_word(&mut s, x, load, ids[ym.start()]);
    let mut cur = s.state("print:0");
    ym_accepts_then(&mut s, &ym, &ids, &map, cur);
    for (i, c) in PRINTED.chars().enumerate() {
        let next = s.state(&format!("print:{}", i + 1));
        let sym = s.sym(c);
        s.rule(cur, &[], next, &[(out, sym)], &[(out, Move::R)]);
        cur = next;
    }
    Ok(finish(read, x, s.build(start, vec![cur])?))
}

fn ym_accepts_then(s: &mut Splice, ym: &TuringMachine, ids: &[StateId], map: &[usize], next: StateId) {
    s.on_accept(ym, ids, map, next);
}

/// Machine that first runs `y` on `x` and, if that accepts, behaves as
/// `with` on its own input. It behaves as `with` iff `y` accepts `x`, and
/// accepts nothing otherwise. That is the behavior of `_without`, the
/// always-rejecting witness, which the construction itself never consults.
pub fn rice_transform(x: &Word, y: &BigUint, _without: &BigUint, with: &BigUint) -> Result<Built> {
    let ym = machine_of(y);
    let m1 = machine_of(with);
    let read = to_canonical_text(&ym).len() + to_canonical_text(&m1).len();
    let shape = (1, ym.tape_count() + m1.work_tapes(), m1.outputs());
    let mut s = Splice::new(m1.alphabet().blank(), &[&m1, &ym], x.glyphs(), shape)?;
    let start = s.state("load:0");
    if !runs_on(&ym, x) {
        return Ok(finish(read, x, s.build(start, vec![])?));
    }
    let map = sim_tapes(&ym);
    let ids = s.inline(&ym, "y:", &map);
    load_word(&mut s, x, start, ids[ym.start()]);
    let first_work = 1 + ym.tape_count();
    let first_out = 1 + ym.tape_count() + m1.work_tapes();
    let map1: Vec<usize> = (0..m1.tape_count())
        .map(|i| {
            if i == 0 {
                0
            } else if i <= m1.work_tapes() {
                first_work + i - 1
            } else {
                first_out + i - 1 - m1.work_tapes()
            }
        })
        .collect();
    let ids1 = s.inline(&m1, "w:", &map1);
    s.on_accept(&ym, &ids, &map, ids1[m1.start()]);
    let accept = (0..m1.states().len()).filter(|&q| m1.is_accepting(q)).map(|q| ids1[q]).collect();
    Ok(finish(read, x, s.build(start, accept)?))
}

/// Empty(y) iff Equiv(y, y₀) with y₀ the always-rejecting machine.
pub fn reduce_empty_to_equiv(y: &BigUint) -> (BigUint, BigUint) {
    (y.clone(), empty_language_number())
}

/// An instance of one of the machine problems.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    /// Does machine `y` accept `x`?
    Halt { x: Word, y: BigUint },
    Machine(BigUint),
    Pair(BigUint, BigUint),
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instance::Halt { x, y } => write!(f, "({x:?}, {y})"),
            Instance::Machine(y) => write!(f, "{y}"),
            Instance::Pair(a, b) => write!(f, "({a}, {b})"),
        }
    }
}

type TransformFn = dyn Fn(&Instance) -> Result<(Instance, u64)> + Send + Sync;

/// A total transform from instances of one problem to instances of another.
#[derive(Clone)]
pub struct Reduction {
    pub name: String,
    pub source: String,
    pub target: String,
    transform: Arc<TransformFn>,
}

impl fmt::Debug for Reduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Reduction({}: {} -> {})", self.name, self.source, self.target)
    }
}

fn shape_err(name: &str, i: &Instance) -> Error {
    Error::Shape(format!("{name} does not apply to instance {i}"))
}

impl Reduction {
    pub fn new(
        name: &str,
        source: &str,
        target: &str,
        f: impl Fn(&Instance) -> Result<(Instance, u64)> + Send + Sync + 'static,
    ) -> Self {
        Reduction { name: name.into(), source: source.into(), target: target.into(), transform: Arc::new(f) }
    }

    pub fn apply(&self, i: &Instance) -> Result<Instance> {
        Ok((self.transform)(i)?.0)
    }

    /// The transformed instance and the construction work it took.
    pub fn apply_metered(&self, i: &Instance) -> Result<(Instance, u64)> {
        (self.transform)(i)
    }

    pub fn halt_to_nonempty() -> Self {
        Reduction::new("halt-to-nonempty", "halt", "nonempty", |i| match i {
            Instance::Halt { x, y } => reduce_halt_to_nonempty(x, y).map(|b| (Instance::Machine(b.number), b.work)),
            other => Err(shape_err("halt-to-nonempty", other)),
        })
    }

    pub fn halt_to_print42() -> Self {
        Reduction::new("halt-to-print42", "halt", "print42", |i| match i {
            Instance::Halt { x, y } => reduce_halt_to_print42(x, y).map(|b| (Instance::Machine(b.number), b.work)),
            other => Err(shape_err("halt-to-print42", other)),
        })
    }

    pub fn empty_to_equiv() -> Self {
        Reduction::new("empty-to-equiv", "empty", "equiv", |i| match i {
            Instance::Machine(y) => {
                let (a, b) = reduce_empty_to_equiv(y);
                let work = (a.bits() + b.bits()) / 8 + 1;
                Ok((Instance::Pair(a, b), work))
            }
            other => Err(shape_err("empty-to-equiv", other)),
        })
    }

    pub fn rice(without: BigUint, with: BigUint) -> Self {
        Reduction::new("rice", "halt", "behaves-like-witness", move |i| match i {
            Instance::Halt { x, y } => {
                rice_transform(x, y, &without, &with).map(|b| (Instance::Machine(b.number), b.work))
            }
            other => Err(shape_err("rice", other)),
        })
    }

    /// The do-nothing transform, a reduction of any problem to itself.
    pub fn identity(problem: &str) -> Self {
        Reduction::new("identity", problem, problem, |i| Ok((i.clone(), 1)))
    }
}

type DecideFn = dyn Fn(&Instance) -> DecisionVerdict + Send + Sync;

/// A bounded decision procedure for one problem.
#[derive(Clone)]
pub struct Decider {
    pub name: String,
    f: Arc<DecideFn>,
}

impl fmt::Debug for Decider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Decider({})", self.name)
    }
}

/// Observable behavior on one word: outputs, or `None` for rejection;
/// `Err` when the fuel ran out.
fn observe(m: &TuringMachine, w: &Word, fuel: Fuel) -> std::result::Result<Option<Vec<Word>>, ()> {
    match outcome(m, w, fuel) {
        RunOutcome::Halted { outputs, .. } => Ok(Some(outputs)),
        RunOutcome::Rejected { .. } => Ok(None),
        RunOutcome::FuelExhausted => Err(()),
    }
}

/// True as soon as some word satisfies `hit`; False if every word was
/// observed and none did.
fn exists_word(
    m: &TuringMachine,
    max_len: usize,
    fuel: Fuel,
    hit: impl Fn(&Option<Vec<Word>>) -> bool,
) -> DecisionVerdict {
    let mut open = false;
    for w in m.alphabet().words_up_to(max_len) {
        match observe(m, &w, fuel) {
            Ok(o) if hit(&o) => return DecisionVerdict::True,
            Ok(_) => {}
            Err(()) => open = true,
        }
    }
    if open {
        DecisionVerdict::Unknown(fuel.0)
    } else {
        DecisionVerdict::False
    }
}

/// Agreement of two machines on every word up to `max_len` over both
/// alphabets.
fn same_behavior(a: &TuringMachine, b: &TuringMachine, max_len: usize, fuel: Fuel) -> DecisionVerdict {
    let mut words = a.alphabet().words_up_to(max_len);
    words.extend(b.alphabet().words_up_to(max_len).into_iter().filter(|w| !runs_on(a, w)));
    let mut open = false;
    for w in &words {
        match (observe(a, w, fuel), observe(b, w, fuel)) {
            (Ok(x), Ok(y)) if x != y => return DecisionVerdict::False,
            (Ok(_), Ok(_)) => {}
            _ => open = true,
        }
    }
    if open {
        DecisionVerdict::Unknown(fuel.0)
    } else {
        DecisionVerdict::True
    }
}

impl Decider {
    pub fn new(name: &str, f: impl Fn(&Instance) -> DecisionVerdict + Send + Sync + 'static) -> Self {
        Decider { name: name.into(), f: Arc::new(f) }
    }

    pub fn decide(&self, i: &Instance) -> DecisionVerdict {
        (self.f)(i)
    }

    pub fn halt(fuel: Fuel) -> Self {
        Decider::new("halt", move |i| match i {
            Instance::Halt { x, y } => semi_decide_halt(y, x, fuel),
            _ => DecisionVerdict::Unknown(0),
        })
    }

    /// Some word up to `max_len` is accepted.
    pub fn nonempty(max_len: usize, fuel: Fuel) -> Self {
        Decider::new("nonempty", move |i| match i {
            Instance::Machine(y) => exists_word(&machine_of(y), max_len, fuel, Option::is_some),
            _ => DecisionVerdict::Unknown(0),
        })
    }

    pub fn empty(max_len: usize, fuel: Fuel) -> Self {
        let mut d = complement_problem(&Decider::nonempty(max_len, fuel));
        d.name = "empty".into();
        d
    }

    /// On some word up to `max_len` the first output is `42`.
    pub fn print42(max_len: usize, fuel: Fuel) -> Self {
        Decider::new("print42", move |i| match i {
            Instance::Machine(y) => exists_word(&machine_of(y), max_len, fuel, |o| {
                o.as_ref().and_then(|v| v.first()).is_some_and(|w| w.to_string() == PRINTED)
            }),
            _ => DecisionVerdict::Unknown(0),
        })
    }

    pub fn equiv(max_len: usize, fuel: Fuel) -> Self {
        Decider::new("equiv", move |i| match i {
            Instance::Pair(a, b) => same_behavior(&machine_of(a), &machine_of(b), max_len, fuel),
            _ => DecisionVerdict::Unknown(0),
        })
    }

    /// Behaves like machine `reference` on words up to `max_len`.
    pub fn behaves_like(reference: BigUint, max_len: usize, fuel: Fuel) -> Self {
        let r = machine_of(&reference);
        Decider::new("behaves-like", move |i| match i {
            Instance::Machine(y) => same_behavior(&r, &machine_of(y), max_len, fuel),
            _ => DecisionVerdict::Unknown(0),
        })
    }
}

/// NOT after `d`; Unknown stays Unknown.
pub fn complement_problem(d: &Decider) -> Decider {
    let inner = d.clone();
    Decider::new(&format!("not-{}", d.name), move |i| inner.decide(i).not())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub input: String,
    pub source: DecisionVerdict,
    pub target: DecisionVerdict,
}

/// How a reduction fared on a corpus: `f(x) = g(h(x))` on every input
/// where both verdicts were decided.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommutationReport {
    pub reduction: String,
    pub total: usize,
    pub decided: usize,
    pub agreed: usize,
    pub unknown: usize,
    pub violations: Vec<Violation>,
    /// Construction work per input, in corpus order.
    pub work: Vec<u64>,
}

impl CommutationReport {
    pub fn commutes(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_reduction(
    r: &Reduction,
    source: &Decider,
    target: &Decider,
    inputs: &[Instance],
) -> Result<CommutationReport> {
    let mut rep = CommutationReport {
        reduction: r.name.clone(),
        total: inputs.len(),
        decided: 0,
        agreed: 0,
        unknown: 0,
        violations: Vec::new(),
        work: Vec::new(),
    };
    for i in inputs {
        let (hi, work) = r.apply_metered(i)?;
        rep.work.push(work);
        let (f, g) = (source.decide(i), target.decide(&hi));
        if !f.is_decided() || !g.is_decided() {
            rep.unknown += 1;
            continue;
        }
        rep.decided += 1;
        if f == g {
            rep.agreed += 1;
        } else {
            rep.violations.push(Violation { input: i.to_string(), source: f, target: g });
        }
    }
    Ok(rep)
}

/// The diagonal program `n ↦ (n, n)`.
pub fn delta_program() -> crate::regmachine::RegProgram {
    parse_rm(
        "inputs X1\noutputs Y1 Y2\n\
         t: if X1 = 0 goto e\n X1 = X1 - 1\n Y1 = Y1 + 1\n Y2 = Y2 + 1\n if W0 = 0 goto t\n\
         e:\n",
    )
    .expect("diagonal program")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContradictionReport {
    /// Table index of the diagonal program.
    pub program: usize,
    /// The candidate's answer for the diagonal program on itself.
    pub claimed_halts: bool,
    /// Whether the diagonal program was seen to halt within the fuel.
    pub observed_halt: bool,
    pub fuel: u64,
    pub message: String,
}

/// Registers `Halt′ = ParNOT ∘ candidate ∘ Δ` and runs it on its own index.
///
/// The candidate (table entry, two inputs, output 0 or 1) must be total on
/// the probe grid and on the diagonal pair; otherwise it is rejected.
pub fn diagonal_construct(
    table: &mut ProgramTable,
    candidate: usize,
    fuel: Fuel,
) -> Result<(usize, ContradictionReport)> {
    let c = table.get(candidate).ok_or_else(|| Error::InvalidMachine(format!("no table entry #{candidate}")))?;
    if c.inputs().len() != 2 || c.outputs().len() != 1 {
        return Err(Error::Shape("a halting decider takes two inputs and has one output".into()));
    }
    let claim = |table: &ProgramTable, a: u64, b: u64| -> Result<bool> {
        let prog = table.get(candidate).expect("registered");
        let r = run_reg(prog, &[BigUint::from(a), BigUint::from(b)], fuel, Some(table))?;
        match r.outputs().map(|v| v[0].clone()) {
            Some(v) if v == BigUint::from(0u8) => Ok(false),
            Some(v) if v == BigUint::from(1u8) => Ok(true),
            Some(v) => Err(Error::PromiseViolation(format!("candidate answered {v} on ({a}, {b})"))),
            None => Err(Error::PromiseViolation(format!("candidate is not total: no answer on ({a}, {b})"))),
        }
    };
    for a in 0..4 {
        for b in 0..4 {
            claim(table, a, b)?;
        }
    }
    let delta = table.next_index();
    let p0 = delta + 1;
    let claimed_halts = claim(table, p0 as u64, p0 as u64)?;
    table.register(delta_program());
    let text = format!(
        "inputs X1\noutputs\n\
         call #{delta} (X1)->(W1, W2)\n\
         call #{candidate} (W1, W2)->(W3)\n\
         if W3 = 0 goto done\n\
         spin: if W0 = 0 goto spin\n\
         done:\n"
    );
    let idx = table.register(parse_rm(&text)?);
    debug_assert_eq!(idx, p0);
    let run = run_reg(table.get(p0).expect("registered"), &[BigUint::from(p0)], fuel, Some(table))?;
    let observed_halt = run.is_halted();
    let message = match (claimed_halts, observed_halt) {
        (true, false) => "claimed halts, observed non-halt within fuel".to_string(),
        (false, true) => "claimed loops, observed halt".to_string(),
        (true, true) => "claimed halts and it halted: fuel or construction fault".to_string(),
        (false, false) => "claimed loops and it ran out of fuel: fuel or construction fault".to_string(),
    };
    Ok((p0, ContradictionReport { program: p0, claimed_halts, observed_halt, fuel: fuel.0, message }))
}

impl ContradictionReport {
    /// The candidate was wrong about the diagonal program.
    pub fn is_contradiction(&self) -> bool {
        self.claimed_halts != self.observed_halt
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::Alphabet;
    use crate::regmachine::reg_semantics;
    use crate::turing::identity_machine;
    use crate::turing::samples::{append_glyph, contains_one_ntm, erase, even_ones, self_loop};

    fn bin() -> Alphabet {
        Alphabet::binary()
    }

    fn num(m: &TuringMachine) -> BigUint {
        godel_number(m)
    }

    fn corpus() -> Vec<TuringMachine> {
        vec![
            identity_machine(1, &bin()),
            append_glyph(&bin(), '0'),
            erase(&bin()),
            self_loop(&bin()),
            always_reject(&bin()),
            even_ones(),
            contains_one_ntm(),
        ]
    }

    fn halt_instances() -> Vec<Instance> {
        let mut v = Vec::new();
        for m in corpus() {
            for x in ["", "1", "01", "a"] {
                v.push(Instance::Halt { x: Word::from(x), y: num(&m) });
            }
        }
        v
    }

    #[test]
    fn semi_decision() {
        let id = num(&identity_machine(1, &bin()));
        assert_eq!(semi_decide_halt(&id, &Word::from("0"), Fuel(100)), DecisionVerdict::True);
        let lp = num(&self_loop(&bin()));
        for f in [1, 10, 1000] {
            assert_eq!(semi_decide_halt(&lp, &Word::from("0"), Fuel(f)), DecisionVerdict::Unknown(f));
        }
        assert_eq!(semi_decide_halt(&BigUint::from(7u8), &Word::empty(), Fuel(10)), DecisionVerdict::False);
        for x in bin().words_up_to(3) {
            let mut seen = None;
            for f in 0..12 {
                let v = semi_decide_halt(&id, &x, Fuel(f));
                if let Some(s) = seen {
                    assert_eq!(v, s);
                } else if v.is_decided() {
                    seen = Some(v);
                }
            }
            assert_eq!(seen, Some(DecisionVerdict::True));
        }
    }

    fn length_parity(even: bool) -> BlackBoxFunction {
        BlackBoxFunction::new("parity", 1, 0, move |ws, fuel| {
            let n = ws[0].len() as u64;
            if fuel.0 <= n {
                return RunOutcome::FuelExhausted;
            }
            if (n % 2 == 0) == even {
                RunOutcome::Halted { outputs: vec![], steps_used: n + 1, cells_used: 0 }
            } else {
                RunOutcome::FuelExhausted
            }
        })
    }

    #[test]
    fn dovetailing() {
        let (f, fc) = (length_parity(true), length_parity(false));
        for w in bin().words_up_to(6) {
            let v = dovetail_decider(&f, &fc, std::slice::from_ref(&w), Fuel(100)).unwrap();
            assert_eq!(v, DecisionVerdict::from_bool(w.len() % 2 == 0));
        }
        let eps = BlackBoxFunction::new("eps", 1, 0, |ws, _| {
            if ws[0].is_empty() {
                RunOutcome::Halted { outputs: vec![], steps_used: 1, cells_used: 0 }
            } else {
                RunOutcome::FuelExhausted
            }
        });
        let never = BlackBoxFunction::new("never", 1, 0, |_, _| RunOutcome::FuelExhausted);
        assert_eq!(dovetail_decider(&eps, &never, &[Word::empty()], Fuel(10)).unwrap(), DecisionVerdict::True);
        assert!(!dovetail_decider(&eps, &never, &[Word::from("1")], Fuel(10)).unwrap().is_decided());
        let e = dovetail_decider(&eps, &eps, &[Word::empty()], Fuel(10));
        assert!(matches!(e, Err(Error::PromiseViolation(_))));
    }

    #[test]
    fn nonempty_construction() {
        let x = Word::from("1");
        let b = reduce_halt_to_nonempty(&x, &num(&identity_machine(1, &bin()))).unwrap();
        for w in bin().words_up_to(3) {
            let r = b.machine.run(std::slice::from_ref(&w), Fuel(200), None).unwrap();
            assert_eq!(r.is_halted(), w == x, "{w}");
        }
        let lp = reduce_halt_to_nonempty(&x, &num(&self_loop(&bin()))).unwrap();
        for w in bin().words_up_to(3) {
            assert!(!lp.machine.run(&[w], Fuel(200), None).unwrap().is_halted());
        }
    }

    #[test]
    fn print42_construction() {
        let x = Word::from("01");
        let b = reduce_halt_to_print42(&x, &num(&append_glyph(&bin(), '1'))).unwrap();
        let r = b.machine.run(std::slice::from_ref(&x), Fuel(200), None).unwrap();
        assert_eq!(r.outputs().unwrap(), &[Word::from("42")]);
        assert!(!b.machine.run(&[Word::from("0")], Fuel(200), None).unwrap().is_halted());
        let lp = reduce_halt_to_print42(&x, &num(&self_loop(&bin()))).unwrap();
        assert!(lp.machine.run(&[x], Fuel(500), None).unwrap().is_exhausted());
    }

    #[test]
    fn rice_construction() {
        let y0 = empty_language_number();
        let y1 = num(&identity_machine(1, &bin()));
        let x = Word::from("0");
        let b = rice_transform(&x, &num(&append_glyph(&bin(), '1')), &y0, &y1).unwrap();
        let rep = crate::base::behaviorally_equivalent(
            &b.machine.semantics(),
            &identity_machine(1, &bin()).semantics(),
            &bin(),
            3,
            Fuel(500),
        )
        .unwrap();
        assert!(rep.is_fully_equal());
        let lp = rice_transform(&x, &num(&self_loop(&bin())), &y0, &y1).unwrap();
        for w in bin().words_up_to(3) {
            assert!(!lp.machine.run(&[w], Fuel(300), None).unwrap().is_halted());
        }
    }

    #[test]
    fn empty_and_equiv() {
        let d = Decider::equiv(3, Fuel(200));
        let y0 = empty_language_number();
        let (a, b) = reduce_empty_to_equiv(&num(&self_loop(&bin())));
        assert!(d.decide(&Instance::Pair(a, b)) != DecisionVerdict::False);
        let (a, b) = reduce_empty_to_equiv(&num(&identity_machine(1, &bin())));
        assert_eq!(d.decide(&Instance::Pair(a, b)), DecisionVerdict::False);
        assert_eq!(d.decide(&Instance::Pair(y0.clone(), y0)), DecisionVerdict::True);
    }

    #[test]
    fn complements() {
        let ne = Decider::nonempty(3, Fuel(200));
        let e = Decider::empty(3, Fuel(200));
        let nn = complement_problem(&complement_problem(&ne));
        for m in corpus() {
            let i = Instance::Machine(num(&m));
            assert_eq!(e.decide(&i), ne.decide(&i).not());
            assert_eq!(nn.decide(&i), ne.decide(&i));
        }
        assert_eq!(DecisionVerdict::Unknown(3).not(), DecisionVerdict::Unknown(3));
    }

    #[test]
    fn reductions_commute() {
        let fuel = Fuel(400);
        let halt = Decider::halt(fuel);
        let cases = [
            (Reduction::halt_to_nonempty(), Decider::nonempty(3, Fuel(2000))),
            (Reduction::halt_to_print42(), Decider::print42(3, Fuel(2000))),
            (
                Reduction::rice(empty_language_number(), num(&identity_machine(1, &bin()))),
                Decider::behaves_like(num(&identity_machine(1, &bin())), 3, Fuel(2000)),
            ),
        ];
        for (r, target) in &cases {
            let rep = check_reduction(r, &halt, target, &halt_instances()).unwrap();
            assert!(rep.commutes(), "{rep:?}");
            assert!(rep.decided >= rep.total / 2, "{rep:?}");
        }
        let machines: Vec<Instance> = corpus().iter().map(|m| Instance::Machine(num(m))).collect();
        let rep = check_reduction(
            &Reduction::empty_to_equiv(),
            &Decider::empty(3, fuel),
            &Decider::equiv(3, fuel),
            &machines,
        )
        .unwrap();
        assert!(rep.commutes() && rep.decided > 0, "{rep:?}");
        let id = check_reduction(&Reduction::identity("halt"), &halt, &halt, &halt_instances()).unwrap();
        assert!(id.commutes());
    }

    #[test]
    fn broken_reduction_is_caught() {
        let bad = Reduction::new("bad", "halt", "nonempty", |i| match i {
            Instance::Halt { .. } => Ok((Instance::Machine(num(&erase(&bin()))), 1)),
            _ => unreachable!(),
        });
        let rep = check_reduction(&bad, &Decider::halt(Fuel(200)), &Decider::nonempty(2, Fuel(200)), &halt_instances())
            .unwrap();
        assert!(!rep.violations.is_empty());
    }

    fn constant(v: u8) -> crate::regmachine::RegProgram {
        let body = if v == 1 { "Y1 = Y1 + 1\n" } else { "" };
        parse_rm(&format!("inputs X1 X2\noutputs Y1\n{body}")).unwrap()
    }

    #[test]
    fn diagonal_defeats_candidates() {
        let parity =
            parse_rm("inputs X1 X2\noutputs Y1\nt: if X1 = 0 goto e\nX1 = X1 - 1\nif X1 = 0 goto o\nX1 = X1 - 1\nif W0 = 0 goto t\no: Y1 = Y1 + 1\ne:\n")
                .unwrap();
        for (prog, claims) in [(constant(1), Some(true)), (constant(0), Some(false)), (parity, None)] {
            let mut table = ProgramTable::new();
            let c = table.register(prog);
            let (p0, rep) = diagonal_construct(&mut table, c, Fuel(500)).unwrap();
            assert!(rep.is_contradiction(), "{rep:?}");
            assert_eq!(rep.program, p0);
            if let Some(b) = claims {
                assert_eq!(rep.claimed_halts, b);
            }
        }
        let mut table = ProgramTable::new();
        let c = table.register(parse_rm("inputs X1 X2\noutputs Y1\ns: if W0 = 0 goto s\n").unwrap());
        assert!(diagonal_construct(&mut table, c, Fuel(100)).is_err());
    }

    #[test]
    fn delta_duplicates() {
        let d = reg_semantics(&delta_program(), None);
        for n in 0..6u64 {
            let r = run_reg(&delta_program(), &[BigUint::from(n)], Fuel(100), None).unwrap();
            assert_eq!(r.outputs().unwrap(), &vec![BigUint::from(n), BigUint::from(n)]);
        }
        assert_eq!(d.arity_out(), 2);
    }
}

//! Multi-tape Turing machines: deterministic, nondeterministic and oracle
//! machines, their fueled semantics, and the categorical constructions
//! (composition, tensor, identity, twist, determinization).
//!
//! Tapes are one-way infinite with heads starting at cell 0; a left move at
//! cell 0 leaves the head in place. A machine halts when no rule applies.
//! Tape order inside a machine is: input tapes, then work tapes, then
//! output tapes.

mod construct;
mod determinize;
mod format;
pub mod samples;

pub use construct::{compose, identity_machine, tensor, twist_machine};
pub use determinize::determinize;
pub(crate) use construct::complement as construct_complement;
pub use format::{parse_tm, to_canonical_text, to_text};

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::base::{Alphabet, BlackBoxFunction, Fuel, RunOutcome, Word};
use crate::error::{Error, Result};

/// Index into a machine's tape alphabet: 0 is the blank, `1..=|Σ|` are the
/// alphabet symbols in order, higher indices are extra tape glyphs.
pub type Sym = u16;
pub type StateId = usize;

pub const BLANK: Sym = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Move {
    L,
    R,
    S,
}

impl Move {
    pub fn glyph(self) -> char {
        match self {
            Move::L => 'L',
            Move::R => 'R',
            Move::S => 'S',
        }
    }
}

/// What a rule matches on one tape.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pattern {
    Any,
    /// Sorted, non-empty.
    Set(Vec<Sym>),
}

impl Pattern {
    pub fn sym(s: Sym) -> Self {
        Pattern::Set(vec![s])
    }

    pub fn set(syms: impl IntoIterator<Item = Sym>) -> Self {
        let s: BTreeSet<Sym> = syms.into_iter().collect();
        Pattern::Set(s.into_iter().collect())
    }

    pub fn matches(&self, s: Sym) -> bool {
        match self {
            Pattern::Any => true,
            Pattern::Set(v) => v.binary_search(&s).is_ok(),
        }
    }

    pub fn overlaps(&self, other: &Pattern) -> bool {
        match (self, other) {
            (Pattern::Any, _) | (_, Pattern::Any) => true,
            (Pattern::Set(a), Pattern::Set(b)) => a.iter().any(|s| b.binary_search(s).is_ok()),
        }
    }

    /// Concrete symbols matched, within `universe`.
    pub fn resolve(&self, universe: &[Sym]) -> Vec<Sym> {
        match self {
            Pattern::Any => universe.to_vec(),
            Pattern::Set(v) => v.clone(),
        }
    }
}

/// What a rule does to the scanned cell of one tape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Write {
    Keep,
    Sym(Sym),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rule {
    pub from: StateId,
    pub read: Vec<Pattern>,
    pub to: StateId,
    pub write: Vec<Write>,
    pub moves: Vec<Move>,
}

impl Rule {
    pub fn matches(&self, state: StateId, scanned: &[Sym]) -> bool {
        self.from == state && self.read.iter().zip(scanned).all(|(p, &s)| p.matches(s))
    }

    /// Whether the rule writes a (possibly identical) symbol on `tape`.
    pub fn writes_on(&self, tape: usize) -> bool {
        matches!(self.write[tape], Write::Sym(_))
    }
}

/// Query tape plus the state in which the oracle is consulted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OraclePort {
    pub tape: usize,
    pub state: StateId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TuringMachine {
    alphabet: Alphabet,
    extra: Vec<char>,
    inputs: usize,
    work: usize,
    outputs: usize,
    states: Vec<String>,
    start: StateId,
    accept: Vec<StateId>,
    reject: Vec<StateId>,
    rules: Vec<Rule>,
    oracle: Option<OraclePort>,
}

impl TuringMachine {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        alphabet: Alphabet,
        extra: Vec<char>,
        (inputs, work, outputs): (usize, usize, usize),
        states: Vec<String>,
        start: StateId,
        accept: Vec<StateId>,
        reject: Vec<StateId>,
        rules: Vec<Rule>,
        oracle: Option<OraclePort>,
    ) -> Result<Self> {
        let m = TuringMachine {
            alphabet,
            extra,
            inputs,
            work,
            outputs,
            states,
            start,
            accept,
            reject,
            rules,
            oracle,
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidMachine(m));
        if self.states.is_empty() {
            return bad("machine has no states".into());
        }
        for (i, s) in self.states.iter().enumerate() {
            if s.is_empty() || s.chars().any(char::is_whitespace) || s == "->" {
                return bad(format!("illegal state name {s:?}"));
            }
            if self.states[..i].contains(s) {
                return bad(format!("duplicate state {s}"));
            }
        }
        for (i, &c) in self.extra.iter().enumerate() {
            if self.alphabet.contains(c) || c == self.alphabet.blank() || self.extra[..i].contains(&c) {
                return bad(format!("extra glyph {c:?} collides"));
            }
            if c.is_whitespace() || crate::base::RESERVED_GLYPHS.contains(&c) {
                return bad(format!("extra glyph {c:?} is reserved"));
            }
        }
        let nq = self.states.len();
        if self.start >= nq || self.accept.iter().chain(&self.reject).any(|&q| q >= nq) {
            return bad("state index out of range".into());
        }
        let k = self.tape_count();
        let ns = self.tape_symbol_count() as Sym;
        for (i, r) in self.rules.iter().enumerate() {
            if r.read.len() != k || r.write.len() != k || r.moves.len() != k {
                return bad(format!("rule {i} does not cover {k} tapes"));
            }
            if r.from >= nq || r.to >= nq {
                return bad(format!("rule {i} references an undeclared state"));
            }
            for p in &r.read {
                if let Pattern::Set(v) = p {
                    if v.is_empty() || v.iter().any(|&s| s >= ns) || v.windows(2).any(|w| w[0] >= w[1]) {
                        return bad(format!("rule {i} has a malformed read pattern"));
                    }
                }
            }
            if r.write.iter().any(|w| matches!(w, Write::Sym(s) if *s >= ns)) {
                return bad(format!("rule {i} writes an undeclared symbol"));
            }
        }
        if let Some(p) = self.oracle {
            if p.tape >= k || p.state >= nq {
                return bad("oracle port out of range".into());
            }
        }
        Ok(())
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn extra_glyphs(&self) -> &[char] {
        &self.extra
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn work_tapes(&self) -> usize {
        self.work
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn tape_count(&self) -> usize {
        self.inputs + self.work + self.outputs
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name)
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn accept_states(&self) -> &[StateId] {
        &self.accept
    }

    pub fn reject_states(&self) -> &[StateId] {
        &self.reject
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn oracle_port(&self) -> Option<OraclePort> {
        self.oracle
    }

    /// Sz: the number of transition rules.
    pub fn size(&self) -> usize {
        self.rules.len()
    }

    /// Blank, alphabet symbols and extra glyphs.
    pub fn tape_symbol_count(&self) -> usize {
        1 + self.alphabet.len() + self.extra.len()
    }

    pub fn tape_syms(&self) -> Vec<Sym> {
        (0..self.tape_symbol_count() as Sym).collect()
    }

    pub fn glyph(&self, s: Sym) -> char {
        let s = s as usize;
        if s == 0 {
            self.alphabet.blank()
        } else if s <= self.alphabet.len() {
            self.alphabet.symbols()[s - 1]
        } else {
            self.extra[s - 1 - self.alphabet.len()]
        }
    }

    pub fn sym_of(&self, c: char) -> Option<Sym> {
        if c == self.alphabet.blank() {
            Some(BLANK)
        } else if let Some(i) = self.alphabet.index_of(c) {
            Some(i as Sym + 1)
        } else {
            self.extra.iter().position(|&e| e == c).map(|i| (i + 1 + self.alphabet.len()) as Sym)
        }
    }

    /// Whether `s` is one of the alphabet symbols (not blank, not extra).
    pub fn is_alphabet_sym(&self, s: Sym) -> bool {
        s >= 1 && (s as usize) <= self.alphabet.len()
    }

    /// Halting in `q` counts as acceptance: `q` is not a reject state and,
    /// when accept states are declared, it is one of them.
    pub fn is_accepting(&self, q: StateId) -> bool {
        !self.reject.contains(&q) && (self.accept.is_empty() || self.accept.contains(&q))
    }

    /// Structural determinism: no two rules of one state overlap on every tape.
    pub fn is_deterministic(&self) -> bool {
        for (i, a) in self.rules.iter().enumerate() {
            for b in &self.rules[i + 1..] {
                if a.from == b.from && a.read.iter().zip(&b.read).all(|(x, y)| x.overlaps(y)) {
                    return false;
                }
            }
        }
        true
    }

    /// Rules applicable in `state` on the scanned symbols, declaration order.
    pub fn applicable(&self, state: StateId, scanned: &[Sym]) -> Vec<&Rule> {
        self.rules.iter().filter(|r| r.matches(state, scanned)).collect()
    }

    /// Largest number of rules simultaneously applicable anywhere.
    pub fn max_branching(&self) -> usize {
        let universe = self.tape_syms();
        let mut best = 1;
        for q in 0..self.states.len() {
            let own: Vec<&Rule> = self.rules.iter().filter(|r| r.from == q).collect();
            if own.len() <= best {
                continue;
            }
            for key in relevant_keys(&own, self.tape_count(), &universe) {
                // Unsplit tapes carry only `Any` patterns, so one probe symbol suffices.
                let n = own.iter().filter(|r| r.read.iter().zip(&key).all(|(p, k)| p.matches(k[0]))).count();
                best = best.max(n);
            }
        }
        best
    }

    pub fn initial_configuration(&self, inputs: &[Word]) -> Result<Configuration> {
        if inputs.len() != self.inputs {
            return Err(Error::Shape(format!(
                "machine takes {} inputs, got {}",
                self.inputs,
                inputs.len()
            )));
        }
        let mut tapes = vec![Tape::default(); self.tape_count()];
        for (t, w) in tapes.iter_mut().zip(inputs) {
            let mut cells = Vec::with_capacity(w.len());
            for &c in w.glyphs() {
                match self.sym_of(c) {
                    Some(s) if self.is_alphabet_sym(s) => cells.push(s),
                    _ => return Err(Error::Alphabet(format!("glyph {c:?} not in machine alphabet"))),
                }
            }
            t.cells = cells;
        }
        Ok(Configuration { state: self.start, tapes, steps: 0, queried: false })
    }

    /// Words on the output tapes: the alphabet glyphs from cell 0 up to the
    /// first blank or extra glyph.
    pub fn read_outputs(&self, c: &Configuration) -> Vec<Word> {
        let first = self.inputs + self.work;
        (first..self.tape_count()).map(|t| self.tape_word(&c.tapes[t])).collect()
    }

    pub fn tape_word(&self, t: &Tape) -> Word {
        Word(
            t.cells
                .iter()
                .take_while(|&&s| self.is_alphabet_sym(s))
                .map(|&s| self.glyph(s))
                .collect(),
        )
    }

    /// All successor configurations under the transition rules. Empty means
    /// the machine halts in `c`. Oracle queries are not performed here.
    pub fn step(&self, c: &Configuration) -> Vec<Configuration> {
        let scanned = c.scanned();
        self.applicable(c.state, &scanned).into_iter().map(|r| c.apply(r)).collect()
    }

    fn needs_query(&self, c: &Configuration) -> bool {
        matches!(self.oracle, Some(p) if p.state == c.state && !c.queried)
    }

    /// Replaces the query tape content `w` with the oracle's answer. The
    /// answer is the first output word of a halted oracle run, or the empty
    /// word for a rejection.
    fn answer_query(
        &self,
        c: &Configuration,
        oracle: &BlackBoxFunction,
        fuel: Fuel,
    ) -> Result<Option<Configuration>> {
        let port = self.oracle.expect("oracle port");
        let query = self.tape_word(&c.tapes[port.tape]);
        let answer = match oracle.evaluate(&[query], fuel) {
            RunOutcome::Halted { outputs, .. } => outputs.into_iter().next().unwrap_or_default(),
            RunOutcome::Rejected { .. } => Word::empty(),
            RunOutcome::FuelExhausted => return Ok(None),
        };
        let mut cells = Vec::with_capacity(answer.len());
        for &g in answer.glyphs() {
            match self.sym_of(g) {
                Some(s) if self.is_alphabet_sym(s) => cells.push(s),
                _ => return Err(Error::Oracle(format!("oracle answered with foreign glyph {g:?}"))),
            }
        }
        let mut next = c.clone();
        next.tapes[port.tape] = Tape { cells, head: 0 };
        next.queried = true;
        next.steps += 1;
        Ok(Some(next))
    }

    /// Fueled run. Deterministic machines iterate `step`; nondeterministic
    /// machines search the configuration tree breadth-first and halt on the
    /// first accepting leaf (children in rule declaration order).
    pub fn run(&self, inputs: &[Word], fuel: Fuel, oracle: Option<&BlackBoxFunction>) -> Result<RunOutcome> {
        match (self.oracle, oracle) {
            (Some(_), None) => return Err(Error::Oracle("machine declares an oracle port but none was supplied".into())),
            (None, Some(_)) => return Err(Error::Oracle("oracle supplied to a machine without an oracle port".into())),
            _ => {}
        }
        let init = self.initial_configuration(inputs)?;
        if self.is_deterministic() {
            self.run_deterministic(init, fuel, oracle)
        } else {
            self.run_breadth_first(init, fuel, oracle)
        }
    }

    fn run_deterministic(
        &self,
        mut c: Configuration,
        fuel: Fuel,
        oracle: Option<&BlackBoxFunction>,
    ) -> Result<RunOutcome> {
        let mut usage = WorkUsage::new(self.work);
        loop {
            if self.needs_query(&c) {
                if c.steps >= fuel.0 {
                    return Ok(RunOutcome::FuelExhausted);
                }
                let remaining = Fuel(fuel.0 - c.steps - 1);
                match self.answer_query(&c, oracle.expect("checked"), remaining)? {
                    Some(n) => c = n,
                    None => return Ok(RunOutcome::FuelExhausted),
                }
                continue;
            }
            let scanned = c.scanned();
            let rule = self.rules.iter().find(|r| r.matches(c.state, &scanned));
            match rule {
                None => return Ok(self.finish(&c, usage.total())),
                Some(r) => {
                    if c.steps >= fuel.0 {
                        return Ok(RunOutcome::FuelExhausted);
                    }
                    usage.record(&c, self.inputs);
                    c = c.apply(r);
                }
            }
        }
    }

    fn run_breadth_first(
        &self,
        init: Configuration,
        fuel: Fuel,
        oracle: Option<&BlackBoxFunction>,
    ) -> Result<RunOutcome> {
        let mut frontier = VecDeque::new();
        frontier.push_back((init, WorkUsage::new(self.work)));
        let mut expansions = 0u64;
        let mut deepest = 0u64;
        let mut widest = 0u64;
        while let Some((c, usage)) = frontier.pop_front() {
            if expansions >= fuel.0 {
                return Ok(RunOutcome::FuelExhausted);
            }
            expansions += 1;
            if self.needs_query(&c) {
                match self.answer_query(&c, oracle.expect("checked"), Fuel(fuel.0 - expansions))? {
                    Some(n) => frontier.push_back((n, usage)),
                    None => return Ok(RunOutcome::FuelExhausted),
                }
                continue;
            }
            let next = self.step(&c);
            if next.is_empty() {
                deepest = deepest.max(c.steps);
                widest = widest.max(usage.total());
                if self.is_accepting(c.state) {
                    return Ok(RunOutcome::Halted {
                        outputs: self.read_outputs(&c),
                        steps_used: c.steps,
                        cells_used: usage.total(),
                    });
                }
                continue;
            }
            let mut u = usage;
            u.record(&c, self.inputs);
            for n in next {
                frontier.push_back((n, u.clone()));
            }
        }
        Ok(RunOutcome::Rejected { steps_used: deepest, cells_used: widest })
    }

    fn finish(&self, c: &Configuration, cells: u64) -> RunOutcome {
        if self.is_accepting(c.state) {
            RunOutcome::Halted { outputs: self.read_outputs(c), steps_used: c.steps, cells_used: cells }
        } else {
            RunOutcome::Rejected { steps_used: c.steps, cells_used: cells }
        }
    }

    /// Whether some computation path accepts within `t` steps. Exhaustive
    /// over the configuration tree; no fuel is involved.
    pub fn accepts_within(&self, inputs: &[Word], t: u64) -> Result<bool> {
        if self.oracle.is_some() {
            return Err(Error::Unsupported("bounded acceptance of oracle machines".into()));
        }
        let mut level = vec![self.initial_configuration(inputs)?];
        for depth in 0..=t {
            let mut next = Vec::new();
            for c in &level {
                let succ = self.step(c);
                if succ.is_empty() {
                    if self.is_accepting(c.state) {
                        return Ok(true);
                    }
                } else if depth < t {
                    next.extend(succ);
                }
            }
            level = next;
        }
        Ok(false)
    }

    /// `run` wrapped as a black box. Oracle machines get `oracle` bound in.
    pub fn semantics(&self) -> BlackBoxFunction {
        self.semantics_with_oracle(None)
    }

    pub fn semantics_with_oracle(&self, oracle: Option<BlackBoxFunction>) -> BlackBoxFunction {
        let m = self.clone();
        BlackBoxFunction::new(
            format!("tm[{} states]", self.states.len()),
            self.inputs,
            self.outputs,
            move |ws, fuel| m.run(ws, fuel, oracle.as_ref()).unwrap_or(RunOutcome::Rejected { steps_used: 0, cells_used: 0 }),
        )
    }
}

/// Symbol-sets per tape over which the applicable-rule set of a state is
/// constant: tapes where some rule tests a concrete set are split into
/// single symbols, the rest stay whole.
pub(crate) fn relevant_keys(rules: &[&Rule], tapes: usize, universe: &[Sym]) -> Vec<Vec<Vec<Sym>>> {
    let mut keys: Vec<Vec<Vec<Sym>>> = vec![Vec::new()];
    for t in 0..tapes {
        let split = rules.iter().any(|r| matches!(r.read[t], Pattern::Set(_)));
        let options: Vec<Vec<Sym>> =
            if split { universe.iter().map(|&s| vec![s]).collect() } else { vec![universe.to_vec()] };
        let mut next = Vec::with_capacity(keys.len() * options.len());
        for k in &keys {
            for o in &options {
                let mut k2 = k.clone();
                k2.push(o.clone());
                next.push(k2);
            }
        }
        keys = next;
    }
    keys
}

/// One tape: cells from 0 with trailing blanks trimmed, plus the head.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tape {
    pub cells: Vec<Sym>,
    pub head: usize,
}

impl Tape {
    pub fn read(&self) -> Sym {
        self.cells.get(self.head).copied().unwrap_or(BLANK)
    }

    pub fn cell(&self, j: usize) -> Sym {
        self.cells.get(j).copied().unwrap_or(BLANK)
    }

    fn write(&mut self, s: Sym) {
        if self.head >= self.cells.len() {
            if s == BLANK {
                return;
            }
            self.cells.resize(self.head + 1, BLANK);
        }
        self.cells[self.head] = s;
        while self.cells.last() == Some(&BLANK) {
            self.cells.pop();
        }
    }

    fn shift(&mut self, m: Move) {
        match m {
            Move::L => self.head = self.head.saturating_sub(1),
            Move::R => self.head += 1,
            Move::S => {}
        }
    }
}

/// Complete instantaneous description of a run.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pub state: StateId,
    pub tapes: Vec<Tape>,
    pub steps: u64,
    /// Set once the oracle has answered in the current visit of the query state.
    pub queried: bool,
}

impl Configuration {
    pub fn scanned(&self) -> Vec<Sym> {
        self.tapes.iter().map(Tape::read).collect()
    }

    pub fn apply(&self, r: &Rule) -> Configuration {
        let mut next = self.clone();
        for (t, tape) in next.tapes.iter_mut().enumerate() {
            if let Write::Sym(s) = r.write[t] {
                tape.write(s);
            }
            tape.shift(r.moves[t]);
        }
        next.state = r.to;
        next.steps += 1;
        next.queried = false;
        next
    }

    /// Same control state, tape contents and heads; step counters ignored.
    pub fn same_instant(&self, other: &Configuration) -> bool {
        self.state == other.state && self.tapes == other.tapes
    }
}

/// Distinct work-tape cells on which a step was executed. Heads move one cell
/// at a time from 0, so the used cells of a tape form a prefix.
#[derive(Debug, Clone)]
struct WorkUsage(Vec<u64>);

impl WorkUsage {
    fn new(work: usize) -> Self {
        WorkUsage(vec![0; work])
    }

    fn record(&mut self, c: &Configuration, first_work: usize) {
        for (i, used) in self.0.iter_mut().enumerate() {
            let head = c.tapes[first_work + i].head as u64;
            *used = (*used).max(head + 1);
        }
    }

    fn total(&self) -> u64 {
        self.0.iter().sum()
    }
}

impl fmt::Display for TuringMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&to_text(self))
    }
}

/// Incremental construction with state names interned on first use.
#[derive(Debug, Clone)]
pub struct MachineBuilder {
    alphabet: Alphabet,
    extra: Vec<char>,
    shape: (usize, usize, usize),
    states: Vec<String>,
    start: Option<StateId>,
    accept: Vec<StateId>,
    reject: Vec<StateId>,
    rules: Vec<Rule>,
    oracle: Option<OraclePort>,
}

impl MachineBuilder {
    pub fn new(alphabet: Alphabet, inputs: usize, work: usize, outputs: usize) -> Self {
        MachineBuilder {
            alphabet,
            extra: Vec::new(),
            shape: (inputs, work, outputs),
            states: Vec::new(),
            start: None,
            accept: Vec::new(),
            reject: Vec::new(),
            rules: Vec::new(),
            oracle: None,
        }
    }

    pub fn extra(mut self, glyphs: &[char]) -> Self {
        self.extra.extend_from_slice(glyphs);
        self
    }

    pub fn tapes(&self) -> usize {
        self.shape.0 + self.shape.1 + self.shape.2
    }

    pub fn state(&mut self, name: &str) -> StateId {
        if let Some(i) = self.states.iter().position(|s| s == name) {
            return i;
        }
        self.states.push(name.to_string());
        self.states.len() - 1
    }

    pub fn start(mut self, name: &str) -> Self {
        let q = self.state(name);
        self.start = Some(q);
        self
    }

    pub fn accept(mut self, name: &str) -> Self {
        let q = self.state(name);
        self.accept.push(q);
        self
    }

    pub fn reject(mut self, name: &str) -> Self {
        let q = self.state(name);
        self.reject.push(q);
        self
    }

    pub fn oracle(mut self, tape: usize, state: &str) -> Self {
        let q = self.state(state);
        self.oracle = Some(OraclePort { tape, state: q });
        self
    }

    /// Symbol index of a glyph in the builder's tape alphabet.
    pub fn sym(&self, c: char) -> Sym {
        if c == self.alphabet.blank() {
            return BLANK;
        }
        if let Some(i) = self.alphabet.index_of(c) {
            return i as Sym + 1;
        }
        let i = self.extra.iter().position(|&e| e == c).unwrap_or_else(|| panic!("unknown glyph {c:?}"));
        (i + 1 + self.alphabet.len()) as Sym
    }

    pub fn push_rule(&mut self, rule: Rule) {
        self.rules.push(rule);
    }

    /// Adds a rule written in the `.tm` text notation, e.g.
    /// `rule("q", "0 *", "p", "1 *", "R S")`.
    pub fn rule(mut self, from: &str, read: &str, to: &str, write: &str, moves: &str) -> Self {
        let from = self.state(from);
        let to = self.state(to);
        let read: Vec<Pattern> = read
            .split_whitespace()
            .map(|tok| format::parse_pattern_with(tok, |c| Some(self.sym(c))).expect("pattern"))
            .collect();
        let write: Vec<Write> = write
            .split_whitespace()
            .map(|tok| if tok == "*" { Write::Keep } else { Write::Sym(self.sym(tok.chars().next().unwrap())) })
            .collect();
        let moves: Vec<Move> = moves
            .split_whitespace()
            .map(|tok| match tok {
                "L" => Move::L,
                "R" => Move::R,
                "S" => Move::S,
                other => panic!("bad move {other}"),
            })
            .collect();
        self.rules.push(Rule { from, read, to, write, moves });
        self
    }

    pub fn build(mut self) -> Result<TuringMachine> {
        let start = match self.start {
            Some(s) => s,
            None => self.state("start"),
        };
        TuringMachine::new(
            self.alphabet,
            self.extra,
            self.shape,
            self.states,
            start,
            self.accept,
            self.reject,
            self.rules,
            self.oracle,
        )
    }
}

//! Alphabets, words, fueled run outcomes and the bounded behavioral
//! equivalence harness that every machine model plugs into.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Glyphs that the text formats reserve for their own syntax.
pub const RESERVED_GLYPHS: &[char] = &['*', '{', '}', ',', '#', ':'];

/// An ordered finite set of glyphs plus a distinguished blank.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    symbols: Vec<char>,
    blank: char,
}

impl Alphabet {
    pub fn new(symbols: impl IntoIterator<Item = char>, blank: char) -> Result<Self> {
        let symbols: Vec<char> = symbols.into_iter().collect();
        if symbols.is_empty() {
            return Err(Error::Alphabet("alphabet must contain at least one symbol".into()));
        }
        for (i, &c) in symbols.iter().enumerate() {
            if symbols[..i].contains(&c) {
                return Err(Error::Alphabet(format!("duplicate symbol {c:?}")));
            }
            check_glyph(c)?;
        }
        check_glyph(blank)?;
        if symbols.contains(&blank) {
            return Err(Error::Alphabet(format!("blank {blank:?} must not be a symbol")));
        }
        Ok(Alphabet { symbols, blank })
    }

    /// `{0,1}` with blank `_`.
    pub fn binary() -> Self {
        Alphabet { symbols: vec!['0', '1'], blank: '_' }
    }

    /// `{1}` with blank `_`, the carrier for unary naturals.
    pub fn unary() -> Self {
        Alphabet { symbols: vec!['1'], blank: '_' }
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn blank(&self) -> char {
        self.blank
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn contains(&self, c: char) -> bool {
        self.symbols.contains(&c)
    }

    pub fn index_of(&self, c: char) -> Option<usize> {
        self.symbols.iter().position(|&s| s == c)
    }

    /// Parses the one-line declaration `alphabet: <glyphs> blank:<glyph>`.
    pub fn parse_decl(line: &str) -> Result<Self> {
        let rest = line
            .trim()
            .strip_prefix("alphabet:")
            .ok_or_else(|| Error::format(0, "expected `alphabet:` declaration"))?;
        let (glyphs, blank) = rest
            .rsplit_once("blank:")
            .ok_or_else(|| Error::format(0, "alphabet declaration lacks `blank:`"))?;
        let blank: Vec<char> = blank.trim().chars().collect();
        if blank.len() != 1 {
            return Err(Error::format(0, "blank must be exactly one glyph"));
        }
        Alphabet::new(glyphs.chars().filter(|c| !c.is_whitespace()), blank[0])
    }

    pub fn decl(&self) -> String {
        let glyphs: String = self.symbols.iter().collect();
        format!("alphabet: {glyphs} blank:{}", self.blank)
    }

    /// All words of exactly `len` glyphs, lexicographic by alphabet order.
    pub fn words_of_len(&self, len: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        for _ in 0..len {
            let mut next = Vec::with_capacity(out.len() * self.symbols.len());
            for w in &out {
                for &c in &self.symbols {
                    let mut g = w.0.clone();
                    g.push(c);
                    next.push(Word(g));
                }
            }
            out = next;
        }
        out
    }

    /// All words of length ≤ `max_len`, by length then lexicographically.
    pub fn words_up_to(&self, max_len: usize) -> Vec<Word> {
        (0..=max_len).flat_map(|n| self.words_of_len(n)).collect()
    }

    /// All `arity`-tuples of words with total length ≤ `max_len`, ordered by
    /// total length, then by the vector of component lengths, then
    /// lexicographically on the concatenated glyphs.
    pub fn tuples_up_to(&self, arity: usize, max_len: usize) -> Vec<Vec<Word>> {
        let mut out = Vec::new();
        for total in 0..=max_len {
            for lens in compositions(total, arity) {
                for flat in self.words_of_len(total) {
                    let mut parts = Vec::with_capacity(arity);
                    let mut at = 0;
                    for &l in &lens {
                        parts.push(Word(flat.0[at..at + l].to_vec()));
                        at += l;
                    }
                    out.push(parts);
                }
            }
        }
        out
    }
}

fn check_glyph(c: char) -> Result<()> {
    if c.is_whitespace() || c.is_control() || RESERVED_GLYPHS.contains(&c) {
        return Err(Error::Alphabet(format!("glyph {c:?} is reserved")));
    }
    Ok(())
}

/// Ordered splits of `total` into `parts` non-negative summands, lexicographic.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// A finite string of glyphs. Membership in an alphabet is checked at the
/// boundaries where words are built from text.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Word(pub Vec<char>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_str_unchecked(s: &str) -> Self {
        Word(s.chars().collect())
    }

    pub fn parse(alphabet: &Alphabet, s: &str) -> Result<Self> {
        let glyphs: Vec<char> = s.chars().collect();
        if let Some(&bad) = glyphs.iter().find(|c| !alphabet.contains(**c)) {
            return Err(Error::Alphabet(format!("glyph {bad:?} not in alphabet")));
        }
        Ok(Word(glyphs))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn glyphs(&self) -> &[char] {
        &self.0
    }

    pub fn unary(n: usize) -> Self {
        Word(vec!['1'; n])
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.0 {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl From<&str> for Word {
    fn from(s: &str) -> Self {
        Word::from_str_unchecked(s)
    }
}

/// Step budget for a run. No run in the workbench executes unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Fuel(pub u64);

impl Fuel {
    pub fn steps(self) -> u64 {
        self.0
    }
}

/// Outcome of a fueled run. `FuelExhausted` is the finite observation of
/// divergence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RunOutcome<T = Vec<Word>> {
    Halted { outputs: T, steps_used: u64, cells_used: u64 },
    Rejected { steps_used: u64, cells_used: u64 },
    FuelExhausted,
}

impl<T> RunOutcome<T> {
    pub fn is_halted(&self) -> bool {
        matches!(self, RunOutcome::Halted { .. })
    }

    pub fn is_exhausted(&self) -> bool {
        matches!(self, RunOutcome::FuelExhausted)
    }

    pub fn outputs(&self) -> Option<&T> {
        match self {
            RunOutcome::Halted { outputs, .. } => Some(outputs),
            _ => None,
        }
    }

    pub fn steps_used(&self) -> Option<u64> {
        match self {
            RunOutcome::Halted { steps_used, .. } | RunOutcome::Rejected { steps_used, .. } => {
                Some(*steps_used)
            }
            RunOutcome::FuelExhausted => None,
        }
    }

    pub fn cells_used(&self) -> Option<u64> {
        match self {
            RunOutcome::Halted { cells_used, .. } | RunOutcome::Rejected { cells_used, .. } => {
                Some(*cells_used)
            }
            RunOutcome::FuelExhausted => None,
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> RunOutcome<U> {
        match self {
            RunOutcome::Halted { outputs, steps_used, cells_used } => {
                RunOutcome::Halted { outputs: f(outputs), steps_used, cells_used }
            }
            RunOutcome::Rejected { steps_used, cells_used } => {
                RunOutcome::Rejected { steps_used, cells_used }
            }
            RunOutcome::FuelExhausted => RunOutcome::FuelExhausted,
        }
    }
}

type EvalFn = dyn Fn(&[Word], Fuel) -> RunOutcome + Send + Sync;

/// A function from word tuples to a fueled outcome, observed only through
/// `evaluate`. Implementations must be deterministic.
#[derive(Clone)]
pub struct BlackBoxFunction {
    name: String,
    arity_in: usize,
    arity_out: usize,
    eval: Arc<EvalFn>,
}

impl fmt::Debug for BlackBoxFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BlackBoxFunction({}: {} -> {})", self.name, self.arity_in, self.arity_out)
    }
}

impl BlackBoxFunction {
    pub fn new<F>(name: impl Into<String>, arity_in: usize, arity_out: usize, eval: F) -> Self
    where
        F: Fn(&[Word], Fuel) -> RunOutcome + Send + Sync + 'static,
    {
        BlackBoxFunction { name: name.into(), arity_in, arity_out, eval: Arc::new(eval) }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity_in(&self) -> usize {
        self.arity_in
    }

    pub fn arity_out(&self) -> usize {
        self.arity_out
    }

    pub fn evaluate(&self, inputs: &[Word], fuel: Fuel) -> RunOutcome {
        (self.eval)(inputs, fuel)
    }

    /// Identity on `n` words, zero cost.
    pub fn identity(n: usize) -> Self {
        BlackBoxFunction::new(format!("id{n}"), n, n, |ws, _| RunOutcome::Halted {
            outputs: ws.to_vec(),
            steps_used: 0,
            cells_used: 0,
        })
    }

    /// `then ∘ self`: runs `self`, feeds its outputs to `then` with the
    /// remaining fuel. Rejection short-circuits.
    pub fn then(&self, then: &BlackBoxFunction) -> Result<Self> {
        if self.arity_out != then.arity_in {
            return Err(Error::Shape(format!(
                "cannot compose {} -> {} with {} -> {}",
                self.arity_in, self.arity_out, then.arity_in, then.arity_out
            )));
        }
        let (f, g) = (self.clone(), then.clone());
        Ok(BlackBoxFunction::new(
            format!("{}∘{}", g.name, f.name),
            f.arity_in,
            g.arity_out,
            move |ws, fuel| match f.evaluate(ws, fuel) {
                RunOutcome::Halted { outputs, steps_used, cells_used } => {
                    match g.evaluate(&outputs, Fuel(fuel.0 - steps_used.min(fuel.0))) {
                        RunOutcome::Halted { outputs, steps_used: s2, cells_used: c2 } => {
                            RunOutcome::Halted {
                                outputs,
                                steps_used: steps_used + s2,
                                cells_used: cells_used.max(c2),
                            }
                        }
                        RunOutcome::Rejected { steps_used: s2, cells_used: c2 } => {
                            RunOutcome::Rejected {
                                steps_used: steps_used + s2,
                                cells_used: cells_used.max(c2),
                            }
                        }
                        RunOutcome::FuelExhausted => RunOutcome::FuelExhausted,
                    }
                }
                other => other,
            },
        ))
    }

    /// Parallel pair: the first `self.arity_in` words go to `self`, the rest
    /// to `other`; outputs are concatenated. Both sides get the full fuel.
    pub fn pair(&self, other: &BlackBoxFunction) -> Self {
        let (f, g) = (self.clone(), other.clone());
        let split = f.arity_in;
        BlackBoxFunction::new(
            format!("{}⊗{}", f.name, g.name),
            f.arity_in + g.arity_in,
            f.arity_out + g.arity_out,
            move |ws, fuel| {
                let a = f.evaluate(&ws[..split], fuel);
                let b = g.evaluate(&ws[split..], fuel);
                match (a, b) {
                    (RunOutcome::FuelExhausted, _) | (_, RunOutcome::FuelExhausted) => {
                        RunOutcome::FuelExhausted
                    }
                    (
                        RunOutcome::Halted { outputs: mut o1, steps_used: s1, cells_used: c1 },
                        RunOutcome::Halted { outputs: o2, steps_used: s2, cells_used: c2 },
                    ) => {
                        o1.extend(o2);
                        RunOutcome::Halted { outputs: o1, steps_used: s1.max(s2), cells_used: c1 + c2 }
                    }
                    (a, b) => RunOutcome::Rejected {
                        steps_used: a.steps_used().unwrap_or(0).max(b.steps_used().unwrap_or(0)),
                        cells_used: a.cells_used().unwrap_or(0) + b.cells_used().unwrap_or(0),
                    },
                }
            },
        )
    }

    /// Block swap on `n1 + n2` words.
    pub fn twist(n1: usize, n2: usize) -> Self {
        BlackBoxFunction::new(format!("twist{n1},{n2}"), n1 + n2, n1 + n2, move |ws, _| {
            let mut out = ws[n1..].to_vec();
            out.extend_from_slice(&ws[..n1]);
            RunOutcome::Halted { outputs: out, steps_used: 0, cells_used: 0 }
        })
    }
}

/// Result of a bounded comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Equal,
    Counterexample(Vec<Word>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub verdict: Verdict,
    /// Inputs on which at least one side exhausted its fuel.
    pub inconclusive: Vec<Vec<Word>>,
    pub checked: usize,
    pub max_len: usize,
    pub fuel: u64,
}

impl EquivalenceReport {
    pub fn is_equal(&self) -> bool {
        self.verdict == Verdict::Equal
    }

    /// Equal, and every input was decided on both sides.
    pub fn is_fully_equal(&self) -> bool {
        self.is_equal() && self.inconclusive.is_empty()
    }
}

/// Observable behavior of a terminated run: outputs for a halt, `None` for
/// a rejection. Step counts are deliberately not compared.
fn observation(o: &RunOutcome) -> Option<Option<&Vec<Word>>> {
    match o {
        RunOutcome::Halted { outputs, .. } => Some(Some(outputs)),
        RunOutcome::Rejected { .. } => Some(None),
        RunOutcome::FuelExhausted => None,
    }
}

/// Compares `f` and `g` on every input tuple of total length ≤ `max_len`,
/// in enumeration order. The first input where both terminate with
/// different observations is the counterexample; inputs where either side
/// runs out of fuel are only collected as inconclusive.
pub fn behaviorally_equivalent(
    f: &BlackBoxFunction,
    g: &BlackBoxFunction,
    alphabet: &Alphabet,
    max_len: usize,
    fuel: Fuel,
) -> Result<EquivalenceReport> {
    if f.arity_in != g.arity_in || f.arity_out != g.arity_out {
        return Err(Error::Shape(format!(
            "arity mismatch: {} -> {} vs {} -> {}",
            f.arity_in, f.arity_out, g.arity_in, g.arity_out
        )));
    }
    let mut inconclusive = Vec::new();
    let mut checked = 0;
    for input in alphabet.tuples_up_to(f.arity_in, max_len) {
        checked += 1;
        let a = f.evaluate(&input, fuel);
        let b = g.evaluate(&input, fuel);
        match (observation(&a), observation(&b)) {
            (Some(x), Some(y)) if x != y => {
                return Ok(EquivalenceReport {
                    verdict: Verdict::Counterexample(input),
                    inconclusive,
                    checked,
                    max_len,
                    fuel: fuel.0,
                });
            }
            (Some(_), Some(_)) => {}
            _ => inconclusive.push(input),
        }
    }
    Ok(EquivalenceReport { verdict: Verdict::Equal, inconclusive, checked, max_len, fuel: fuel.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_empty() -> BlackBoxFunction {
        BlackBoxFunction::new("const-eps", 1, 1, |_, _| RunOutcome::Halted {
            outputs: vec![Word::empty()],
            steps_used: 0,
            cells_used: 0,
        })
    }

    #[test]
    fn alphabet_rejects_blank_in_symbols() {
        assert!(Alphabet::new(['a', 'b'], 'a').is_err());
        assert!(Alphabet::new([], '_').is_err());
        assert!(Alphabet::new(['a', 'a'], '_').is_err());
        assert!(Alphabet::new(['*'], '_').is_err());
    }

    #[test]
    fn alphabet_decl_round_trip() {
        let a = Alphabet::new(['a', 'b', 'c'], '_').unwrap();
        assert_eq!(Alphabet::parse_decl(&a.decl()).unwrap(), a);
    }

    #[test]
    fn tuple_enumeration_counts() {
        let a = Alphabet::binary();
        // total length ≤ 2 over 2 components: 1 + 2*2 + 3*4 = 17
        assert_eq!(a.tuples_up_to(2, 2).len(), 17);
        assert_eq!(a.tuples_up_to(0, 3), vec![Vec::<Word>::new()]);
        assert_eq!(a.words_up_to(3).len(), 15);
    }

    #[test]
    fn identity_equals_itself() {
        let id = BlackBoxFunction::identity(1);
        let r = behaviorally_equivalent(&id, &id, &Alphabet::binary(), 3, Fuel(10)).unwrap();
        assert!(r.is_fully_equal());
    }

    #[test]
    fn identity_differs_from_constant_empty() {
        let r = behaviorally_equivalent(
            &BlackBoxFunction::identity(1),
            &constant_empty(),
            &Alphabet::binary(),
            1,
            Fuel(10),
        )
        .unwrap();
        match r.verdict {
            Verdict::Counterexample(w) => assert!(!w[0].is_empty()),
            Verdict::Equal => panic!("expected a counterexample"),
        }
    }

    #[test]
    fn fuel_exhaustion_is_never_a_counterexample() {
        let looping = BlackBoxFunction::new("loop", 1, 1, |_, _| RunOutcome::FuelExhausted);
        let r = behaviorally_equivalent(
            &BlackBoxFunction::identity(1),
            &looping,
            &Alphabet::binary(),
            2,
            Fuel(10),
        )
        .unwrap();
        assert!(r.is_equal());
        assert_eq!(r.inconclusive.len(), 7);
    }

    #[test]
    fn arity_mismatch_is_shape_error() {
        let r = behaviorally_equivalent(
            &BlackBoxFunction::identity(1),
            &BlackBoxFunction::identity(2),
            &Alphabet::binary(),
            1,
            Fuel(1),
        );
        assert!(matches!(r, Err(Error::Shape(_))));
    }

    #[test]
    fn twist_twice_is_identity() {
        let t = BlackBoxFunction::twist(1, 2);
        let back = BlackBoxFunction::twist(2, 1);
        let tt = t.then(&back).unwrap();
        let r = behaviorally_equivalent(&tt, &BlackBoxFunction::identity(3), &Alphabet::binary(), 3, Fuel(1))
            .unwrap();
        assert!(r.is_fully_equal());
    }
}

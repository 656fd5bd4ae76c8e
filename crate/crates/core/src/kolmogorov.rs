//! Upper bounds on Kolmogorov complexity by bounded machine enumeration.
//!
//! The size of a machine is its number of rules. The enumeration class is
//! 1-input, 1-output machines with no work tapes, a read-only input, no
//! extra glyphs, and rules that read one concrete symbol per tape. Every
//! state accepts, so a run produces its output exactly when it halts.
//!
//! Exact K is not computable. What comes back is the size of the smallest
//! machine in this class that is seen to print the target within the fuel
//! limit, which bounds K in this encoding from above.
//!
//! Machines are explored in tree normal form: a run proceeds until it meets
//! a (state, scanned symbols) pair with no rule, and the search then
//! branches on leaving it undefined (the machine halts there) or on every
//! rule that could be added for it. A smallest witness uses every rule, and
//! new states are numbered in order of first use, so no class member that
//! matters is skipped and renamings are not revisited.

use serde::Serialize;

use crate::base::{Alphabet, Fuel, RunOutcome, Word};
use crate::error::{Error, Result};
use crate::turing::{Move, Pattern, Rule, Sym, TuringMachine, Write, BLANK};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeBudget {
    pub max_rules: usize,
    pub fuel: Fuel,
    pub alphabet: Alphabet,
}

impl SizeBudget {
    pub fn new(max_rules: usize, fuel: Fuel, alphabet: Alphabet) -> Result<Self> {
        if max_rules == 0 {
            return Err(Error::Shape("a size budget needs max_rules ≥ 1".into()));
        }
        Ok(SizeBudget { max_rules, fuel, alphabet })
    }
}

impl Default for SizeBudget {
    fn default() -> Self {
        SizeBudget { max_rules: 8, fuel: Fuel(10_000), alphabet: Alphabet::binary() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KEstimate {
    pub target: Word,
    pub condition: Word,
    /// `None`: no machine within the budget was seen to print the target.
    pub k_hat: Option<usize>,
    pub witness: Option<TuringMachine>,
    /// Leaves of the search tree: halting machines checked, plus runs cut
    /// off by fuel or a repeated configuration.
    pub explored: u64,
}

impl KEstimate {
    pub fn k_display(&self) -> String {
        self.k_hat.map_or_else(|| "not found".to_string(), |k| k.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Act {
    to: u8,
    write: Sym,
    m_in: Move,
    m_out: Move,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Run {
    state: u8,
    in_head: usize,
    out: Vec<Sym>,
    out_head: usize,
    steps: u64,
}

struct Enumerator<'a> {
    input: &'a [Sym],
    target: &'a [Sym],
    syms: usize,
    max_rules: usize,
    fuel: u64,
    /// Rule table indexed by `(state · syms + input sym) · syms + output sym`.
    table: Vec<Option<Act>>,
    /// Order in which the current rules were added.
    order: Vec<usize>,
    states: u8,
    explored: u64,
    best: Option<(usize, Vec<(usize, Act)>)>,
}

fn shift(h: usize, m: Move) -> usize {
    match m {
        Move::L => h.saturating_sub(1),
        Move::R => h + 1,
        Move::S => h,
    }
}

impl Enumerator<'_> {
    fn slot(&self, state: u8, a: Sym, b: Sym) -> usize {
        (state as usize * self.syms + a as usize) * self.syms + b as usize
    }

    fn scanned(&self, r: &Run) -> (Sym, Sym) {
        (
            self.input.get(r.in_head).copied().unwrap_or(BLANK),
            r.out.get(r.out_head).copied().unwrap_or(BLANK),
        )
    }

    fn apply(r: &mut Run, act: Act) {
        if r.out_head >= r.out.len() {
            if act.write != BLANK {
                r.out.resize(r.out_head + 1, BLANK);
                r.out[r.out_head] = act.write;
            }
        } else {
            r.out[r.out_head] = act.write;
        }
        while r.out.last() == Some(&BLANK) {
            r.out.pop();
        }
        r.state = act.to;
        r.in_head = shift(r.in_head, act.m_in);
        r.out_head = shift(r.out_head, act.m_out);
        r.steps += 1;
    }

    fn same_instant(a: &Run, b: &Run) -> bool {
        a.state == b.state && a.in_head == b.in_head && a.out_head == b.out_head && a.out == b.out
    }

    /// Continues `r` under the current table to the next undefined
    /// situation. `None` if the run exhausts its fuel or provably never
    /// reaches one.
    fn advance(&self, mut r: Run) -> Option<Run> {
        // Plain cycles: compare with a configuration saved at doubling steps.
        let mut saved = r.clone();
        let mut span = 1u64;
        let mut since = 0u64;
        // Translated cycles, for an all-blank input only: per state, the
        // last time the output head reached a new rightmost cell, and the
        // lowest head position since then.
        let shifts = self.input.is_empty();
        let mut record = r.out_head;
        let mut marks: Vec<Option<(usize, Vec<Sym>, usize)>> = vec![None; self.table.len() / (self.syms * self.syms)];
        loop {
            let (a, b) = self.scanned(&r);
            let Some(act) = self.table[self.slot(r.state, a, b)] else {
                return Some(r);
            };
            if r.steps >= self.fuel {
                return None;
            }
            Self::apply(&mut r, act);
            since += 1;
            if Self::same_instant(&r, &saved) {
                return None;
            }
            if since == span {
                saved = r.clone();
                span *= 2;
                since = 0;
            }
            if !shifts {
                continue;
            }
            for m in marks.iter_mut().flatten() {
                m.2 = m.2.min(r.out_head);
            }
            if r.out_head > record {
                record = r.out_head;
                let q = r.state as usize;
                if let Some((pos, tape, low)) = &marks[q] {
                    let d = r.out_head - pos;
                    let cell = |t: &[Sym], j: usize| t.get(j).copied().unwrap_or(BLANK);
                    if (*low..=*pos).all(|j| cell(tape, j) == cell(&r.out, j + d)) {
                        return None;
                    }
                }
                marks[q] = Some((r.out_head, r.out.clone(), r.out_head));
            }
        }
    }

    fn output_matches(&self, r: &Run) -> bool {
        let word: Vec<Sym> = r.out.iter().copied().take_while(|&s| s != BLANK).collect();
        word == self.target
    }

    fn record(&mut self) {
        let rules = self.order.len();
        let mut current: Vec<(usize, Act)> =
            self.order.iter().map(|&i| (i, self.table[i].expect("defined rule"))).collect();
        current.sort_by_key(|&(i, _)| i);
        let better = match &self.best {
            None => true,
            Some((k, prev)) => rules < *k || (rules == *k && serial(&current) < serial(prev)),
        };
        if better {
            self.best = Some((rules, current));
        }
    }

    fn search(&mut self, r: Run) {
        let Some(r) = self.advance(r) else {
            self.explored += 1;
            return;
        };
        // Halting here.
        self.explored += 1;
        if self.output_matches(&r) {
            self.record();
        }
        let limit = match &self.best {
            Some((k, _)) => self.max_rules.min(*k),
            None => self.max_rules,
        };
        // A rule added now gives a machine of `order.len() + 1` rules; equal
        // size still competes on serialization order.
        if self.order.len() >= limit {
            return;
        }
        let (a, b) = self.scanned(&r);
        let slot = self.slot(r.state, a, b);
        let in_moves: &[Move] = if r.in_head >= self.input.len() && self.input.is_empty() {
            // Every input cell is blank, so input moves cannot be observed.
            &[Move::S]
        } else {
            &[Move::L, Move::R, Move::S]
        };
        let fresh = (self.states as usize) < self.max_rules + 1;
        let tos = self.states + u8::from(fresh);
        for to in 0..tos {
            for write in 0..self.syms as Sym {
                for &m_in in in_moves {
                    for m_out in [Move::L, Move::R, Move::S] {
                        let act = Act { to, write, m_in, m_out };
                        let grew = to == self.states;
                        if grew {
                            self.states += 1;
                        }
                        self.table[slot] = Some(act);
                        self.order.push(slot);
                        self.search(r.clone());
                        self.order.pop();
                        self.table[slot] = None;
                        if grew {
                            self.states -= 1;
                        }
                    }
                }
            }
        }
    }
}

fn serial(rules: &[(usize, Act)]) -> Vec<(usize, u8, Sym, u8, u8)> {
    let mv = |m: Move| match m {
        Move::L => 0u8,
        Move::R => 1,
        Move::S => 2,
    };
    rules.iter().map(|&(i, a)| (i, a.to, a.write, mv(a.m_in), mv(a.m_out))).collect()
}

fn to_syms(w: &Word, alphabet: &Alphabet) -> Option<Vec<Sym>> {
    w.glyphs().iter().map(|&c| alphabet.index_of(c).map(|i| i as Sym + 1)).collect()
}

fn build_witness(alphabet: &Alphabet, syms: usize, rules: &[(usize, Act)]) -> TuringMachine {
    let states = rules.iter().map(|&(i, a)| (i / (syms * syms)).max(a.to as usize)).max().map_or(1, |m| m + 1);
    let names: Vec<String> = (0..states).map(|q| format!("q{q}")).collect();
    let rules: Vec<Rule> = rules
        .iter()
        .map(|&(i, a)| {
            let from = i / (syms * syms);
            let (ia, ob) = ((i / syms) % syms, i % syms);
            let write = if a.write as usize == ob { Write::Keep } else { Write::Sym(a.write) };
            Rule {
                from,
                read: vec![Pattern::sym(ia as Sym), Pattern::sym(ob as Sym)],
                to: a.to as usize,
                write: vec![Write::Keep, write],
                moves: vec![a.m_in, a.m_out],
            }
        })
        .collect();
    TuringMachine::new(alphabet.clone(), Vec::new(), (1, 0, 1), names, 0, Vec::new(), Vec::new(), rules, None)
        .expect("enumerated machine is well formed")
}

/// Upper bound on `K(x | y)`; pass the empty word as `y` for plain `K(x)`.
pub fn estimate_k(x: &Word, y: &Word, budget: &SizeBudget) -> Result<KEstimate> {
    if budget.max_rules == 0 {
        return Err(Error::Shape("a size budget needs max_rules ≥ 1".into()));
    }
    let alphabet = &budget.alphabet;
    let mut est = KEstimate { target: x.clone(), condition: y.clone(), k_hat: None, witness: None, explored: 0 };
    let input = to_syms(y, alphabet).ok_or_else(|| Error::Alphabet(format!("condition {y:?} outside alphabet")))?;
    // A target outside the alphabet is never printed; that is a value, not an error.
    let Some(target) = to_syms(x, alphabet) else {
        return Ok(est);
    };
    let syms = alphabet.len() + 1;
    if budget.max_rules + 1 > u8::MAX as usize {
        return Err(Error::Shape("max_rules is too large for the enumerator".into()));
    }
    let mut e = Enumerator {
        input: &input,
        target: &target,
        syms,
        max_rules: budget.max_rules,
        fuel: budget.fuel.0,
        table: vec![None; (budget.max_rules + 1) * syms * syms],
        order: Vec::new(),
        states: 1,
        explored: 0,
        best: None,
    };
    e.search(Run { state: 0, in_head: 0, out: Vec::new(), out_head: 0, steps: 0 });
    est.explored = e.explored;
    if let Some((k, rules)) = e.best {
        est.k_hat = Some(k);
        est.witness = Some(build_witness(alphabet, syms, &rules));
    }
    Ok(est)
}

/// Prints `x` one glyph per rule, writing and moving right on the output
/// while the input head stays put. Size `|x|`; for `x = ε` it has no rules
/// and halts at once.
pub fn literal_machine(x: &Word, alphabet: &Alphabet) -> Result<TuringMachine> {
    let syms = to_syms(x, alphabet).ok_or_else(|| Error::Alphabet(format!("{x:?} outside alphabet")))?;
    let names: Vec<String> = (0..=syms.len()).map(|q| format!("p{q}")).collect();
    let rules = syms
        .iter()
        .enumerate()
        .map(|(i, &s)| Rule {
            from: i,
            read: vec![Pattern::Any, Pattern::sym(BLANK)],
            to: i + 1,
            write: vec![Write::Keep, Write::Sym(s)],
            moves: vec![Move::S, Move::R],
        })
        .collect();
    TuringMachine::new(alphabet.clone(), Vec::new(), (1, 0, 1), names, 0, Vec::new(), Vec::new(), rules, None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Compressibility {
    Compressible { k_hat: usize, literal_cost: usize },
    /// Nothing small enough was found. This is not a claim of randomness.
    NotWitnessed { literal_cost: usize },
}

/// `x` is compressible when some machine of size at most
/// `literal_cost(x) + c` is seen to print it. `c` may be negative.
pub fn compressibility_report(x: &Word, c: i64, budget: &SizeBudget) -> Result<Compressibility> {
    let literal_cost = literal_machine(x, &budget.alphabet)?.rules().len();
    let est = estimate_k(x, &Word::empty(), budget)?;
    Ok(match est.k_hat {
        Some(k) if k as i64 <= literal_cost as i64 + c => Compressibility::Compressible { k_hat: k, literal_cost },
        _ => Compressibility::NotWitnessed { literal_cost },
    })
}

/// Reruns a witness through the general simulator.
pub fn verify_witness(est: &KEstimate, fuel: Fuel) -> bool {
    match &est.witness {
        None => est.k_hat.is_none(),
        Some(m) => {
            let out = m.run(std::slice::from_ref(&est.condition), fuel, None);
            matches!(out, Ok(RunOutcome::Halted { outputs, .. }) if outputs == vec![est.target.clone()])
                && Some(m.rules().len()) == est.k_hat
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budget(r: usize, fuel: u64) -> SizeBudget {
        SizeBudget::new(r, Fuel(fuel), Alphabet::binary()).unwrap()
    }

    #[test]
    fn empty_target() {
        let e = estimate_k(&Word::empty(), &Word::empty(), &budget(2, 100)).unwrap();
        assert_eq!(e.k_hat, Some(0));
        assert!(verify_witness(&e, Fuel(100)));
    }

    #[test]
    fn copy_bound() {
        let copy = crate::turing::identity_machine(1, &Alphabet::binary());
        let x = Word::from("0110");
        let e = estimate_k(&x, &x, &budget(3, 1000)).unwrap();
        assert!(e.k_hat.unwrap() <= copy.rules().len());
        assert!(verify_witness(&e, Fuel(1000)));
    }

    #[test]
    fn literal_machines() {
        let a = Alphabet::binary();
        for n in 0..=10 {
            let x = Word((0..n).map(|i| if i % 3 == 0 { '1' } else { '0' }).collect());
            let m = literal_machine(&x, &a).unwrap();
            assert_eq!(m.rules().len(), n);
            let out = m.run(&[Word::empty()], Fuel(100), None).unwrap();
            assert_eq!(out.outputs(), Some(&vec![x]));
        }
        let ab = Alphabet::new("ab".chars(), '_').unwrap();
        let m = literal_machine(&Word::from("ab"), &ab).unwrap();
        assert_eq!(m.run(&[Word::from("b")], Fuel(10), None).unwrap().outputs(), Some(&vec![Word::from("ab")]));
    }

    /// Independent oracle: every machine of the class with up to two rules,
    /// built directly and run through the general simulator.
    fn brute_force_k(x: &Word, max_rules: usize) -> Option<usize> {
        let a = Alphabet::binary();
        let moves = [Move::L, Move::R, Move::S];
        let mut acts = Vec::new();
        for to in 0..3usize {
            for w in 0..3 as Sym {
                for &mi in &moves {
                    for &mo in &moves {
                        acts.push((to, w, mi, mo));
                    }
                }
            }
        }
        let situations: Vec<(usize, Sym, Sym)> =
            (0..3).flat_map(|q| (0..3).flat_map(move |i| (0..3).map(move |o| (q, i as Sym, o as Sym)))).collect();
        let make = |chosen: &[((usize, Sym, Sym), (usize, Sym, Move, Move))]| {
            let rules = chosen
                .iter()
                .map(|&((q, i, o), (to, w, mi, mo))| Rule {
                    from: q,
                    read: vec![Pattern::sym(i), Pattern::sym(o)],
                    to,
                    write: vec![Write::Keep, Write::Sym(w)],
                    moves: vec![mi, mo],
                })
                .collect();
            let names = (0..3).map(|q| format!("q{q}")).collect();
            TuringMachine::new(a.clone(), vec![], (1, 0, 1), names, 0, vec![], vec![], rules, None).unwrap()
        };
        let prints = |m: &TuringMachine| {
            matches!(m.run(&[Word::empty()], Fuel(200), None), Ok(RunOutcome::Halted { outputs, .. }) if outputs == vec![x.clone()])
        };
        if prints(&make(&[])) {
            return Some(0);
        }
        for &s1 in &situations {
            for &a1 in &acts {
                if prints(&make(&[(s1, a1)])) {
                    return Some(1);
                }
            }
        }
        if max_rules < 2 {
            return None;
        }
        for (n, &s1) in situations.iter().enumerate() {
            for &s2 in &situations[n + 1..] {
                for &a1 in &acts {
                    for &a2 in &acts {
                        if prints(&make(&[(s1, a1), (s2, a2)])) {
                            return Some(2);
                        }
                    }
                }
            }
        }
        None
    }

    #[test]
    fn agrees_with_brute_force() {
        for x in ["", "0", "1", "00", "01", "000", "0000", "010"] {
            let w = Word::from(x);
            let e = estimate_k(&w, &Word::empty(), &budget(2, 200)).unwrap();
            assert_eq!(e.k_hat, brute_force_k(&w, 2), "{x}");
            assert!(verify_witness(&e, Fuel(200)));
        }
    }

    #[test]
    fn compressibility() {
        assert_eq!(
            compressibility_report(&Word::empty(), 0, &budget(1, 10)).unwrap(),
            Compressibility::Compressible { k_hat: 0, literal_cost: 0 }
        );
        // In this class no machine with fewer than four rules prints 0000.
        let zeros = Word::from("0000");
        assert_eq!(
            compressibility_report(&zeros, 0, &budget(4, 1000)).unwrap(),
            Compressibility::Compressible { k_hat: 4, literal_cost: 4 }
        );
        assert_eq!(
            compressibility_report(&zeros, -1, &budget(4, 1000)).unwrap(),
            Compressibility::NotWitnessed { literal_cost: 4 }
        );
        assert!(matches!(
            compressibility_report(&Word::from("0110100110"), 0, &budget(1, 100)).unwrap(),
            Compressibility::NotWitnessed { literal_cost: 10 }
        ));
    }

    #[test]
    fn budget_monotone() {
        for x in ["0000", "0101", "0110"] {
            let w = Word::from(x);
            let mut last = None::<usize>;
            for r in 1..=4 {
                let k = estimate_k(&w, &Word::empty(), &budget(r, 500)).unwrap().k_hat;
                if let Some(prev) = last {
                    assert!(k.is_some_and(|k| k <= prev));
                }
                last = k.or(last);
            }
        }
    }
}

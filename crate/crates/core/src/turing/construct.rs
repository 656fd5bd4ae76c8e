//! Composition, tensor, identity and twist machines.

use std::collections::BTreeSet;

use super::{Move, Pattern, Rule, StateId, Sym, TuringMachine, Write, BLANK};
use crate::base::Alphabet;
use crate::error::{Error, Result};

pub(crate) fn intersect(a: &Pattern, b: &Pattern) -> Option<Pattern> {
    match (a, b) {
        (Pattern::Any, p) | (p, Pattern::Any) => Some(p.clone()),
        (Pattern::Set(x), Pattern::Set(y)) => {
            let v: Vec<Sym> = x.iter().copied().filter(|s| y.binary_search(s).is_ok()).collect();
            (!v.is_empty()).then_some(Pattern::Set(v))
        }
    }
}

pub(crate) fn subtract(a: &Pattern, b: &Pattern, universe: &[Sym]) -> Option<Pattern> {
    let v: Vec<Sym> = a.resolve(universe).into_iter().filter(|&s| !b.matches(s)).collect();
    if v.is_empty() {
        None
    } else if v.len() == universe.len() {
        Some(Pattern::Any)
    } else {
        Some(Pattern::Set(v))
    }
}

/// Disjoint pattern tuples covering exactly the scanned tuples that match
/// none of `patterns`.
pub(crate) fn complement(patterns: &[&[Pattern]], tapes: usize, universe: &[Sym]) -> Vec<Vec<Pattern>> {
    let mut cover = vec![vec![Pattern::Any; tapes]];
    for p in patterns {
        let mut next = Vec::new();
        for c in cover {
            if c.iter().zip(p.iter()).any(|(x, y)| !x.overlaps(y)) {
                next.push(c);
                continue;
            }
            let mut prefix = c.clone();
            for i in 0..tapes {
                if let Some(rest) = subtract(&c[i], &p[i], universe) {
                    let mut piece = prefix.clone();
                    piece[i] = rest;
                    next.push(piece);
                }
                prefix[i] = intersect(&c[i], &p[i]).expect("overlap checked");
            }
        }
        cover = next;
    }
    cover
}

/// Private-use glyphs not in `used`.
pub(crate) fn fresh_glyphs(used: &BTreeSet<char>, count: usize) -> Vec<char> {
    (0xE000u32..)
        .filter_map(char::from_u32)
        .filter(|c| !used.contains(c))
        .take(count)
        .collect()
}

/// Symbol translation from a component machine into a combined machine
/// with the same alphabet and the given extra glyphs.
struct SymMap(Vec<Sym>);

impl SymMap {
    fn new(m: &TuringMachine, extra: &[char]) -> Self {
        let base = m.alphabet().len();
        SymMap(
            (0..m.tape_symbol_count())
                .map(|s| {
                    if s <= base {
                        s as Sym
                    } else {
                        let g = m.extra_glyphs()[s - 1 - base];
                        (1 + base + extra.iter().position(|&e| e == g).expect("merged extras")) as Sym
                    }
                })
                .collect(),
        )
    }

    fn sym(&self, s: Sym) -> Sym {
        self.0[s as usize]
    }

    fn pattern(&self, p: &Pattern) -> Pattern {
        match p {
            Pattern::Any => Pattern::Any,
            Pattern::Set(v) => Pattern::set(v.iter().map(|&s| self.sym(s))),
        }
    }

    fn write(&self, w: Write) -> Write {
        match w {
            Write::Keep => Write::Keep,
            Write::Sym(s) => Write::Sym(self.sym(s)),
        }
    }
}

fn merged_extras(a: &TuringMachine, b: &TuringMachine) -> Vec<char> {
    let mut extra = a.extra_glyphs().to_vec();
    for &g in b.extra_glyphs() {
        if !extra.contains(&g) {
            extra.push(g);
        }
    }
    extra
}

fn check_composable(t1: &TuringMachine, t2: &TuringMachine) -> Result<()> {
    if t1.alphabet() != t2.alphabet() {
        return Err(Error::Alphabet(format!(
            "alphabets differ: {} vs {}",
            t1.alphabet().decl(),
            t2.alphabet().decl()
        )));
    }
    if t1.oracle_port().is_some() || t2.oracle_port().is_some() {
        return Err(Error::Unsupported("composition of oracle machines".into()));
    }
    Ok(())
}

/// Rule skeleton over `tapes` tapes that reads anything and changes nothing.
fn idle_rule(from: StateId, to: StateId, tapes: usize) -> Rule {
    Rule { from, read: vec![Pattern::Any; tapes], to, write: vec![Write::Keep; tapes], moves: vec![Move::S; tapes] }
}

/// Copies input `i` onto output `target(i)` for every input tape, one tape
/// after another, then halts accepting.
fn copy_machine(n: usize, alphabet: &Alphabet, target: impl Fn(usize) -> usize) -> TuringMachine {
    let states: Vec<String> = (0..=n).map(|i| format!("c{i}")).collect();
    let mut rules = Vec::new();
    for i in 0..n {
        let o = n + target(i);
        for s in 1..=alphabet.len() as Sym {
            let mut r = idle_rule(i, i, 2 * n);
            r.read[i] = Pattern::sym(s);
            r.write[o] = Write::Sym(s);
            r.moves[i] = Move::R;
            r.moves[o] = Move::R;
            rules.push(r);
        }
        let mut done = idle_rule(i, i + 1, 2 * n);
        done.read[i] = Pattern::sym(BLANK);
        rules.push(done);
    }
    TuringMachine::new(alphabet.clone(), Vec::new(), (n, 0, n), states, 0, vec![n], Vec::new(), rules, None)
        .expect("copy machine is well formed")
}

/// id_n: copies every input tape to the matching output tape and accepts.
pub fn identity_machine(n: usize, alphabet: &Alphabet) -> TuringMachine {
    copy_machine(n, alphabet, |i| i)
}

/// Swaps the first `n1` inputs with the last `n2` on the way to the outputs.
pub fn twist_machine(n1: usize, n2: usize, alphabet: &Alphabet) -> TuringMachine {
    copy_machine(n1 + n2, alphabet, |i| if i < n1 { n2 + i } else { i - n1 })
}

/// Sequential composition `t2 ∘ t1`.
///
/// The output tapes of `t1` become intermediate work tapes that `t2` then
/// reads as its inputs. Cell 0 of every intermediate tape carries a marked
/// copy of its symbol while `t1` runs, so the heads can be rewound before
/// `t2` starts. A rejection by `t1` rejects the composite.
pub fn compose(t1: &TuringMachine, t2: &TuringMachine) -> Result<TuringMachine> {
    check_composable(t1, t2)?;
    if t1.outputs() != t2.inputs() {
        return Err(Error::Shape(format!(
            "cannot feed {} outputs into {} inputs",
            t1.outputs(),
            t2.inputs()
        )));
    }
    let (m, w1, n) = (t1.inputs(), t1.work_tapes(), t1.outputs());
    let (w2, p) = (t2.work_tapes(), t2.outputs());
    let k = m + w1 + n + w2 + p;
    let inter = m + w1;

    let mut extra = merged_extras(t1, t2);
    let mut used: BTreeSet<char> = extra.iter().copied().collect();
    used.extend(t1.alphabet().symbols());
    used.insert(t1.alphabet().blank());
    let marks_glyphs = fresh_glyphs(&used, t1.tape_symbol_count());
    let first_mark = 1 + t1.alphabet().len() + extra.len();
    extra.extend(&marks_glyphs);
    let map1 = SymMap::new(t1, &extra);
    let map2 = SymMap::new(t2, &extra);
    let mark = |s: Sym| (first_mark + s as usize) as Sym;
    let universe: Vec<Sym> = (0..(first_mark + marks_glyphs.len()) as Sym).collect();
    let unmarked: Vec<Sym> = (0..first_mark as Sym).collect();
    let all1 = t1.tape_syms();

    let mut states: Vec<String> = Vec::new();
    let a = |q: StateId| q;
    states.extend(t1.states().iter().map(|s| format!("a:{s}")));
    let b0 = states.len();
    let b = |q: StateId| b0 + q;
    states.extend(t2.states().iter().map(|s| format!("b:{s}")));
    let rw0 = states.len();
    states.extend((0..n).map(|i| format!("c:rw{i}")));
    let mark_state = states.len();
    states.push("c:mark".into());
    let reject_state = states.len();
    states.push("c:reject".into());

    let mut rules = Vec::new();
    let mut start = a(t1.start());
    if n > 0 {
        let mut r = idle_rule(mark_state, a(t1.start()), k);
        for i in 0..n {
            r.write[inter + i] = Write::Sym(mark(BLANK));
        }
        rules.push(r);
        start = mark_state;
    }

    for q in 0..t1.states().len() {
        let mut own = Vec::new();
        for r in t1.rules().iter().filter(|r| r.from == q) {
            let mut base = idle_rule(a(r.from), a(r.to), k);
            for t in 0..m + w1 + n {
                base.read[t] = map1.pattern(&r.read[t]);
                base.write[t] = map1.write(r.write[t]);
                base.moves[t] = r.moves[t];
            }
            // One variant per choice of marked/unmarked cell on each intermediate tape.
            for bits in 0..1usize << n {
                let mut v = base.clone();
                let mut ok = true;
                for i in 0..n {
                    let t = inter + i;
                    let concrete = r.read[t].resolve(&all1);
                    if bits >> i & 1 == 1 {
                        v.read[t] = Pattern::set(concrete.iter().map(|&s| mark(s)));
                        if let Write::Sym(s) = r.write[t] {
                            v.write[t] = Write::Sym(mark(s));
                        }
                    } else {
                        v.read[t] = Pattern::set(concrete.iter().map(|&s| map1.sym(s)));
                    }
                    if concrete.is_empty() {
                        ok = false;
                    }
                }
                if ok {
                    own.push(v);
                }
            }
        }
        let pats: Vec<&[Pattern]> = own.iter().map(|r| r.read.as_slice()).collect();
        let target = if !t1.is_accepting(q) {
            reject_state
        } else if n == 0 {
            b(t2.start())
        } else {
            rw0
        };
        let halts = complement(&pats, k, &universe);
        rules.extend(own);
        for pat in halts {
            let mut r = idle_rule(a(q), target, k);
            r.read = pat;
            rules.push(r);
        }
    }

    for i in 0..n {
        let t = inter + i;
        let q = rw0 + i;
        let mut back = idle_rule(q, q, k);
        back.read[t] = Pattern::set(unmarked.iter().copied());
        back.moves[t] = Move::L;
        rules.push(back);
        let next = if i + 1 == n { b(t2.start()) } else { q + 1 };
        for s in 0..t1.tape_symbol_count() as Sym {
            let mut r = idle_rule(q, next, k);
            r.read[t] = Pattern::sym(mark(s));
            r.write[t] = Write::Sym(map1.sym(s));
            rules.push(r);
        }
    }

    let place2 = |t: usize| if t < n { inter + t } else { inter + n + (t - n) };
    for r in t2.rules() {
        let mut v = idle_rule(b(r.from), b(r.to), k);
        for t in 0..t2.tape_count() {
            let c = place2(t);
            v.read[c] = map2.pattern(&r.read[t]);
            v.write[c] = map2.write(r.write[t]);
            v.moves[c] = r.moves[t];
        }
        rules.push(v);
    }

    let accept: Vec<StateId> = t2.accept_states().iter().map(|&q| b(q)).collect();
    let mut reject: Vec<StateId> = t2.reject_states().iter().map(|&q| b(q)).collect();
    reject.push(reject_state);
    TuringMachine::new(
        t1.alphabet().clone(),
        extra,
        (m, w1 + n + w2, p),
        states,
        start,
        accept,
        reject,
        rules,
        None,
    )
}

/// Parallel product: states are pairs, both components advance in lock
/// step, and a halted component idles until its partner halts. The product
/// accepts when both components halt accepting.
pub fn tensor(t1: &TuringMachine, t2: &TuringMachine) -> Result<TuringMachine> {
    check_composable(t1, t2)?;
    let (m1, w1, n1) = (t1.inputs(), t1.work_tapes(), t1.outputs());
    let (m2, w2, n2) = (t2.inputs(), t2.work_tapes(), t2.outputs());
    let k = m1 + m2 + w1 + w2 + n1 + n2;
    let extra = merged_extras(t1, t2);
    let universe: Vec<Sym> = (0..(1 + t1.alphabet().len() + extra.len()) as Sym).collect();
    let place1 = |t: usize| {
        if t < m1 {
            t
        } else if t < m1 + w1 {
            m1 + m2 + (t - m1)
        } else {
            m1 + m2 + w1 + w2 + (t - m1 - w1)
        }
    };
    let place2 = |t: usize| {
        if t < m2 {
            m1 + t
        } else if t < m2 + w2 {
            m1 + m2 + w1 + (t - m2)
        } else {
            m1 + m2 + w1 + w2 + n1 + (t - m2 - w2)
        }
    };

    // Per component state: (read, write, moves, successor); `None` successor marks idling.
    type Option_ = (Vec<Pattern>, Vec<Write>, Vec<Move>, Option<StateId>);
    let options = |t: &TuringMachine, place: &dyn Fn(usize) -> usize| -> Vec<Vec<Option_>> {
        let map = SymMap::new(t, &extra);
        (0..t.states().len())
            .map(|q| {
                let mut opts: Vec<Option_> = Vec::new();
                let mut placed: Vec<Vec<Pattern>> = Vec::new();
                for r in t.rules().iter().filter(|r| r.from == q) {
                    let mut read = vec![Pattern::Any; k];
                    let mut write = vec![Write::Keep; k];
                    let mut moves = vec![Move::S; k];
                    for i in 0..t.tape_count() {
                        read[place(i)] = map.pattern(&r.read[i]);
                        write[place(i)] = map.write(r.write[i]);
                        moves[place(i)] = r.moves[i];
                    }
                    placed.push(read.clone());
                    opts.push((read, write, moves, Some(r.to)));
                }
                let pats: Vec<&[Pattern]> = placed.iter().map(Vec::as_slice).collect();
                for pat in complement(&pats, k, &universe) {
                    opts.push((pat, vec![Write::Keep; k], vec![Move::S; k], None));
                }
                opts
            })
            .collect()
    };
    let opts1 = options(t1, &place1);
    let opts2 = options(t2, &place2);

    let q2n = t2.states().len();
    let pair = |a: StateId, b: StateId| a * q2n + b;
    let mut states = Vec::new();
    let mut accept = Vec::new();
    let mut reject = Vec::new();
    for (a, sa) in t1.states().iter().enumerate() {
        for (b, sb) in t2.states().iter().enumerate() {
            states.push(format!("({sa},{sb})"));
            if t1.is_accepting(a) && t2.is_accepting(b) {
                accept.push(pair(a, b));
            } else {
                reject.push(pair(a, b));
            }
        }
    }
    let mut rules = Vec::new();
    for a in 0..t1.states().len() {
        for b in 0..q2n {
            for o1 in &opts1[a] {
                for o2 in &opts2[b] {
                    if o1.3.is_none() && o2.3.is_none() {
                        continue;
                    }
                    let read: Option<Vec<Pattern>> =
                        o1.0.iter().zip(&o2.0).map(|(x, y)| intersect(x, y)).collect();
                    let Some(read) = read else { continue };
                    let write = o1.1.iter().zip(&o2.1).map(|(&x, &y)| if x == Write::Keep { y } else { x }).collect();
                    let moves = o1.2.iter().zip(&o2.2).map(|(&x, &y)| if x == Move::S { y } else { x }).collect();
                    let to = pair(o1.3.unwrap_or(a), o2.3.unwrap_or(b));
                    rules.push(Rule { from: pair(a, b), read, to, write, moves });
                }
            }
        }
    }
    TuringMachine::new(
        t1.alphabet().clone(),
        extra,
        (m1 + m2, w1 + w2, n1 + n2),
        states,
        pair(t1.start(), t2.start()),
        accept,
        reject,
        rules,
        None,
    )
}

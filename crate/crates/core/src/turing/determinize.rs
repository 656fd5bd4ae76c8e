//! Deterministic simulation of a nondeterministic machine by iterated
//! deepening over choice addresses.
//!
//! Tapes of the produced machine: pristine copies of the inputs, then the
//! simulated input and work tapes, an address tape and a flag tape, then the
//! simulated output tapes. Each round replays the simulated machine from
//! its initial configuration, choosing the rule with index `d` among the
//! applicable ones for every address digit `d`. Addresses are enumerated in
//! length-lexicographic order, which is exactly breadth-first order over
//! the configuration tree. The flag records whether some path outlived the
//! current address length; a round of full length with the flag clear means
//! the tree is finite and has no accepting leaf.

use std::collections::BTreeSet;

use super::construct::fresh_glyphs;
use super::{relevant_keys, Move, Pattern, Rule, StateId, Sym, TuringMachine, Write, BLANK};
use crate::error::{Error, Result};

struct Layout {
    inputs: usize,
    sims: usize,
    flag: usize,
    outs: usize,
    total: usize,
}

impl Layout {
    /// Position of the simulated machine's tape `t`.
    fn sim(&self, t: usize) -> usize {
        if t < self.sims {
            self.inputs + t
        } else {
            self.flag + 1 + (t - self.sims)
        }
    }
}

struct Rules {
    k: usize,
    list: Vec<Rule>,
}

impl Rules {
    fn idle(&self, from: StateId, to: StateId) -> Rule {
        Rule {
            from,
            read: vec![Pattern::Any; self.k],
            to,
            write: vec![Write::Keep; self.k],
            moves: vec![Move::S; self.k],
        }
    }
}

pub fn determinize(m: &TuringMachine) -> Result<TuringMachine> {
    if m.oracle_port().is_some() {
        return Err(Error::Unsupported("determinization of oracle machines".into()));
    }
    let mi = m.inputs();
    let sims = mi + m.work_tapes();
    let addr = mi + sims;
    let lay = Layout { inputs: mi, sims, flag: addr + 1, outs: m.outputs(), total: addr + 2 + m.outputs() };
    let k = lay.total;

    let b = m.max_branching();
    let mut used: BTreeSet<char> = m.extra_glyphs().iter().copied().collect();
    used.extend(m.alphabet().symbols());
    used.insert(m.alphabet().blank());
    let fresh = fresh_glyphs(&used, b + 2);
    let base = m.tape_symbol_count() as Sym;
    let turnstile = base;
    let flag = base + 1;
    let digit = |d: usize| base + 2 + d as Sym;
    let digits: Vec<Sym> = (0..b).map(digit).collect();
    let mut extra = m.extra_glyphs().to_vec();
    extra.extend(fresh);

    let mut states: Vec<String> = m.states().iter().map(|s| format!("sim:{s}")).collect();
    let mut named = |s: &str| {
        states.push(s.to_string());
        states.len() - 1
    };
    let init = named("init");
    let restore = named("restore");
    let rback = named("rback");
    let trunc = named("trunc");
    let next = named("next");
    let inc = named("inc");
    let ext = named("extend");
    let rwend = named("rwend");
    let rwleft = named("rwleft");
    let accept = named("accept");
    let reject = named("reject");
    let sim = |q: StateId| q;

    let mut rs = Rules { k, list: Vec::new() };
    let a_not = |s: Sym| Pattern::set((0..base + 2 + b as Sym).filter(|&x| x != s));

    let mut r = rs.idle(init, restore);
    r.write[addr] = Write::Sym(turnstile);
    rs.list.push(r);

    // Restore: copy pristine inputs onto the simulated input tapes and blank
    // everything else, over the whole stretch the last round could touch.
    let nsig = m.alphabet().len() as Sym;
    let tuples = (0..mi).fold(vec![Vec::<Sym>::new()], |acc, _| {
        acc.into_iter().flat_map(|t| (0..=nsig).map(move |s| [t.clone(), vec![s]].concat())).collect()
    });
    for tup in tuples {
        let mut r = rs.idle(restore, restore);
        for (i, &s) in tup.iter().enumerate() {
            r.read[i] = Pattern::sym(s);
            r.write[lay.inputs + i] = Write::Sym(s);
        }
        for t in lay.inputs + mi..lay.inputs + sims {
            r.write[t] = Write::Sym(BLANK);
        }
        for j in 0..lay.outs {
            r.write[lay.flag + 1 + j] = Write::Sym(BLANK);
        }
        for t in (0..k).filter(|&t| t != lay.flag) {
            r.moves[t] = Move::R;
        }
        if tup.iter().all(|&s| s == BLANK) {
            let mut stop = rs.idle(restore, rback);
            stop.read = r.read.clone();
            stop.read[addr] = Pattern::sym(BLANK);
            rs.list.push(stop);
            r.read[addr] = a_not(BLANK);
        }
        rs.list.push(r);
    }

    let all_back = |r: &mut Rule| {
        for t in (0..k).filter(|&t| t != lay.flag) {
            r.moves[t] = Move::L;
        }
    };
    let mut r = rs.idle(rback, rback);
    r.read[addr] = a_not(turnstile);
    all_back(&mut r);
    rs.list.push(r);
    let mut r = rs.idle(rback, sim(m.start()));
    r.read[addr] = Pattern::sym(turnstile);
    r.moves[addr] = Move::R;
    rs.list.push(r);

    // One simulation step per address digit.
    let universe = m.tape_syms();
    for q in 0..m.states().len() {
        let own: Vec<&Rule> = m.rules().iter().filter(|r| r.from == q).collect();
        for key in relevant_keys(&own, m.tape_count(), &universe) {
            let live: Vec<&Rule> =
                own.iter().copied().filter(|r| r.read.iter().zip(&key).all(|(p, k)| p.matches(k[0]))).collect();
            let mut base_rule = rs.idle(sim(q), next);
            for (t, ks) in key.iter().enumerate() {
                if ks.len() == 1 {
                    base_rule.read[lay.sim(t)] = Pattern::sym(ks[0]);
                }
            }
            for (d, rule) in live.iter().enumerate() {
                let mut r = base_rule.clone();
                r.to = sim(rule.to);
                r.read[addr] = Pattern::sym(digit(d));
                for t in 0..m.tape_count() {
                    r.write[lay.sim(t)] = rule.write[t];
                    r.moves[lay.sim(t)] = rule.moves[t];
                }
                r.moves[addr] = Move::R;
                rs.list.push(r);
            }
            if live.len() < b {
                let mut r = base_rule.clone();
                r.read[addr] = Pattern::set(digits[live.len()..].iter().copied());
                rs.list.push(r);
            }
            let mut r = base_rule.clone();
            r.read[addr] = Pattern::sym(BLANK);
            r.to = match (live.is_empty(), m.is_accepting(q)) {
                (false, _) => trunc,
                (true, true) => accept,
                (true, false) => next,
            };
            rs.list.push(r);
        }
    }

    let mut r = rs.idle(trunc, next);
    r.write[lay.flag] = Write::Sym(flag);
    rs.list.push(r);

    let mut r = rs.idle(next, next);
    r.read[addr] = a_not(BLANK);
    r.moves[addr] = Move::R;
    rs.list.push(r);
    let mut r = rs.idle(next, inc);
    r.read[addr] = Pattern::sym(BLANK);
    r.moves[addr] = Move::L;
    rs.list.push(r);

    for d in 0..b {
        let mut r = rs.idle(inc, rwend);
        r.read[addr] = Pattern::sym(digit(d));
        if d + 1 < b {
            r.write[addr] = Write::Sym(digit(d + 1));
        } else {
            r.to = inc;
            r.write[addr] = Write::Sym(digit(0));
            r.moves[addr] = Move::L;
        }
        rs.list.push(r);
    }
    let mut r = rs.idle(inc, ext);
    r.read[addr] = Pattern::sym(turnstile);
    r.read[lay.flag] = Pattern::sym(flag);
    r.write[lay.flag] = Write::Sym(BLANK);
    r.moves[addr] = Move::R;
    rs.list.push(r);
    let mut r = rs.idle(inc, reject);
    r.read[addr] = Pattern::sym(turnstile);
    r.read[lay.flag] = Pattern::sym(BLANK);
    rs.list.push(r);

    let mut r = rs.idle(ext, ext);
    r.read[addr] = Pattern::sym(digit(0));
    r.moves[addr] = Move::R;
    rs.list.push(r);
    let mut r = rs.idle(ext, rwend);
    r.read[addr] = Pattern::sym(BLANK);
    r.write[addr] = Write::Sym(digit(0));
    rs.list.push(r);

    let mut r = rs.idle(rwend, rwend);
    r.read[addr] = a_not(BLANK);
    r.moves[addr] = Move::R;
    rs.list.push(r);
    let mut r = rs.idle(rwend, rwleft);
    r.read[addr] = Pattern::sym(BLANK);
    rs.list.push(r);

    let mut r = rs.idle(rwleft, rwleft);
    r.read[addr] = a_not(turnstile);
    all_back(&mut r);
    rs.list.push(r);
    let mut r = rs.idle(rwleft, restore);
    r.read[addr] = Pattern::sym(turnstile);
    rs.list.push(r);

    TuringMachine::new(
        m.alphabet().clone(),
        extra,
        (mi, sims + 2, m.outputs()),
        states,
        init,
        vec![accept],
        vec![reject],
        rs.list,
        None,
    )
}

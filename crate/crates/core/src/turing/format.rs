//! The `.tm` text format.
//!
//! ```text
//! alphabet: 01 blank:_
//! extra: $
//! tapes: 1 0 1
//! start: copy
//! accept: done
//! copy 0 _ -> copy * 0 R R
//! copy {1} _ -> copy * 1 R R
//! copy _ _ -> done * * S S
//! ```
//!
//! Read tokens are a glyph, `*` (any symbol) or a set `{a,b}`; write tokens
//! are a glyph or `*` (keep). Lines starting with `#` are comments.

use std::fmt::Write as _;

use super::{MachineBuilder, Move, OraclePort, Pattern, Rule, StateId, Sym, TuringMachine, Write};
use crate::base::Alphabet;
use crate::error::{Error, Result};

fn ferr(line: usize, msg: impl Into<String>) -> Error {
    Error::format(line, msg)
}

pub(crate) fn parse_pattern_with(tok: &str, sym: impl Fn(char) -> Option<Sym>) -> std::result::Result<Pattern, String> {
    if tok == "*" {
        return Ok(Pattern::Any);
    }
    let body = match tok.strip_prefix('{') {
        Some(rest) => rest.strip_suffix('}').ok_or_else(|| format!("unterminated set {tok:?}"))?,
        None => {
            let mut cs = tok.chars();
            let c = cs.next().ok_or("empty token")?;
            if cs.next().is_some() {
                return Err(format!("read token {tok:?} is not a single glyph"));
            }
            return sym(c).map(Pattern::sym).ok_or_else(|| format!("undeclared glyph {c:?}"));
        }
    };
    let mut syms = Vec::new();
    for part in body.split(',') {
        let mut cs = part.chars();
        let c = cs.next().ok_or_else(|| format!("empty set element in {tok:?}"))?;
        if cs.next().is_some() {
            return Err(format!("set element {part:?} is not a single glyph"));
        }
        syms.push(sym(c).ok_or_else(|| format!("undeclared glyph {c:?}"))?);
    }
    Ok(Pattern::set(syms))
}

fn parse_count(v: &str, line: usize) -> Result<usize> {
    v.parse().map_err(|_| ferr(line, format!("expected a count, got {v:?}")))
}

pub fn parse_tm(text: &str) -> Result<TuringMachine> {
    let mut alphabet: Option<Alphabet> = None;
    let mut extra: Vec<char> = Vec::new();
    let mut shape: Option<(usize, usize, usize)> = None;
    let mut start: Option<String> = None;
    let mut accept: Vec<String> = Vec::new();
    let mut reject: Vec<String> = Vec::new();
    let mut declared: Vec<String> = Vec::new();
    let mut oracle: Option<(usize, String)> = None;
    let mut rule_lines: Vec<(usize, &str)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.contains("->") {
            rule_lines.push((n, line));
            continue;
        }
        let (key, value) = line.split_once(':').ok_or_else(|| ferr(n, "expected `key: value` or a rule"))?;
        let value = value.trim();
        match key.trim() {
            "alphabet" => {
                alphabet = Some(Alphabet::parse_decl(line).map_err(|e| ferr(n, e.to_string()))?);
            }
            "extra" => extra = value.chars().filter(|c| !c.is_whitespace()).collect(),
            "tapes" => {
                let parts: Vec<&str> = value.split_whitespace().collect();
                let (m, w, o) = match parts.as_slice() {
                    [m, o] => (parse_count(m, n)?, 1, parse_count(o, n)?),
                    [m, w, o] => (parse_count(m, n)?, parse_count(w, n)?, parse_count(o, n)?),
                    _ => return Err(ferr(n, "tapes: expects `m w n` or `m n`")),
                };
                shape = Some((m, w, o));
            }
            "start" => start = Some(value.to_string()),
            "accept" => accept.extend(value.split_whitespace().map(str::to_string)),
            "reject" => reject.extend(value.split_whitespace().map(str::to_string)),
            "states" => declared.extend(value.split_whitespace().map(str::to_string)),
            "oracle" => {
                let p: Vec<&str> = value.split_whitespace().collect();
                match p.as_slice() {
                    ["tape", t, "state", q] => oracle = Some((parse_count(t, n)?, q.to_string())),
                    _ => return Err(ferr(n, "oracle: expects `tape <i> state <q>`")),
                }
            }
            other => return Err(ferr(n, format!("unknown header {other:?}"))),
        }
    }

    let alphabet = alphabet.ok_or_else(|| ferr(0, "missing alphabet declaration"))?;
    let (m, w, o) = shape.ok_or_else(|| ferr(0, "missing tapes declaration"))?;
    let start = start.ok_or_else(|| ferr(0, "missing start state"))?;
    let k = m + w + o;

    let mut b = MachineBuilder::new(alphabet, m, w, o).extra(&extra);
    for q in &declared {
        b.state(q);
    }
    b.state(&start);
    let lookup = |b: &MachineBuilder, c: char| -> Option<Sym> {
        if c == b.alphabet.blank() {
            return Some(0);
        }
        if let Some(i) = b.alphabet.index_of(c) {
            return Some(i as Sym + 1);
        }
        b.extra.iter().position(|&e| e == c).map(|i| (i + 1 + b.alphabet.len()) as Sym)
    };

    for (n, line) in rule_lines {
        let (lhs, rhs) = line.split_once("->").expect("rule line");
        let lt: Vec<&str> = lhs.split_whitespace().collect();
        let rt: Vec<&str> = rhs.split_whitespace().collect();
        if lt.len() != k + 1 || rt.len() != 2 * k + 1 {
            return Err(ferr(n, format!("rule must mention {k} read, {k} write and {k} move tokens")));
        }
        let from = b.state(lt[0]);
        let to = b.state(rt[0]);
        let mut read = Vec::with_capacity(k);
        for tok in &lt[1..] {
            read.push(parse_pattern_with(tok, |c| lookup(&b, c)).map_err(|e| ferr(n, e))?);
        }
        let mut write = Vec::with_capacity(k);
        for tok in &rt[1..=k] {
            if *tok == "*" {
                write.push(Write::Keep);
                continue;
            }
            let mut cs = tok.chars();
            let c = cs.next().expect("token");
            if cs.next().is_some() {
                return Err(ferr(n, format!("write token {tok:?} is not a single glyph")));
            }
            let s = lookup(&b, c).ok_or_else(|| ferr(n, format!("undeclared glyph {c:?}")))?;
            write.push(Write::Sym(s));
        }
        let mut moves = Vec::with_capacity(k);
        for tok in &rt[k + 1..] {
            moves.push(match *tok {
                "L" => Move::L,
                "R" => Move::R,
                "S" => Move::S,
                other => return Err(ferr(n, format!("bad move {other:?}"))),
            });
        }
        b.push_rule(Rule { from, read, to, write, moves });
    }
    let mut b = b.start(&start);
    for q in &accept {
        b = b.accept(q);
    }
    for q in &reject {
        b = b.reject(q);
    }
    if let Some((t, q)) = oracle {
        b = b.oracle(t, &q);
    }
    b.build().map_err(|e| match e {
        Error::InvalidMachine(msg) => ferr(0, msg),
        other => other,
    })
}

fn pattern_text(m: &TuringMachine, p: &Pattern) -> String {
    match p {
        Pattern::Any => "*".into(),
        Pattern::Set(v) if v.len() == 1 => m.glyph(v[0]).to_string(),
        Pattern::Set(v) => {
            let inner: Vec<String> = v.iter().map(|&s| m.glyph(s).to_string()).collect();
            format!("{{{}}}", inner.join(","))
        }
    }
}

fn rule_text(m: &TuringMachine, r: &Rule) -> String {
    let mut s = m.states()[r.from].clone();
    for p in &r.read {
        s.push(' ');
        s.push_str(&pattern_text(m, p));
    }
    s.push_str(" -> ");
    s.push_str(&m.states()[r.to]);
    for w in &r.write {
        s.push(' ');
        match w {
            Write::Keep => s.push('*'),
            Write::Sym(x) => s.push(m.glyph(*x)),
        }
    }
    for mv in &r.moves {
        s.push(' ');
        s.push(mv.glyph());
    }
    s
}

fn render(m: &TuringMachine, states: &[StateId], rules: &[&Rule], accept: &[StateId], reject: &[StateId]) -> String {
    let mut out = String::new();
    let names = |ids: &[StateId]| ids.iter().map(|&q| m.states()[q].as_str()).collect::<Vec<_>>().join(" ");
    writeln!(out, "{}", m.alphabet().decl()).unwrap();
    if !m.extra_glyphs().is_empty() {
        writeln!(out, "extra: {}", m.extra_glyphs().iter().collect::<String>()).unwrap();
    }
    writeln!(out, "tapes: {} {} {}", m.inputs(), m.work_tapes(), m.outputs()).unwrap();
    writeln!(out, "states: {}", names(states)).unwrap();
    writeln!(out, "start: {}", m.states()[m.start()]).unwrap();
    if !accept.is_empty() {
        writeln!(out, "accept: {}", names(accept)).unwrap();
    }
    if !reject.is_empty() {
        writeln!(out, "reject: {}", names(reject)).unwrap();
    }
    if let Some(OraclePort { tape, state }) = m.oracle_port() {
        writeln!(out, "oracle: tape {tape} state {}", m.states()[state]).unwrap();
    }
    for r in rules {
        writeln!(out, "{}", rule_text(m, r)).unwrap();
    }
    out
}

/// Text in declaration order; `parse_tm(&to_text(m)) == m`.
pub fn to_text(m: &TuringMachine) -> String {
    let states: Vec<StateId> = (0..m.states().len()).collect();
    let rules: Vec<&Rule> = m.rules().iter().collect();
    render(m, &states, &rules, m.accept_states(), m.reject_states())
}

/// Canonical text: states, accept and reject lists sorted by name, rules
/// grouped by source state. Rules of one state are sorted only when the
/// machine is deterministic, since nondeterministic runs depend on
/// declaration order.
pub fn to_canonical_text(m: &TuringMachine) -> String {
    let by_name = |ids: &mut Vec<StateId>| ids.sort_by(|&a, &b| m.states()[a].cmp(&m.states()[b]));
    let mut states: Vec<StateId> = (0..m.states().len()).collect();
    by_name(&mut states);
    let mut accept = m.accept_states().to_vec();
    by_name(&mut accept);
    accept.dedup();
    let mut reject = m.reject_states().to_vec();
    by_name(&mut reject);
    reject.dedup();
    let det = m.is_deterministic();
    let mut rules: Vec<&Rule> = m.rules().iter().collect();
    rules.sort_by(|a, b| {
        let by_state = m.states()[a.from].cmp(&m.states()[b.from]);
        if !det {
            return by_state;
        }
        by_state
            .then_with(|| rule_text(m, a).cmp(&rule_text(m, b)))
    });
    render(m, &states, &rules, &accept, &reject)
}

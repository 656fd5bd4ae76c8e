//! Recursive functions built from `z`, `s` and projections by composition,
//! primitive recursion and μ-minimization, plus a native Ackermann
//! evaluator.

use std::fmt;

use crate::base::{Fuel, RunOutcome};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    /// `z` of the given arity (1 unless written `(z n)`).
    Zero(usize),
    Succ,
    /// `π^n_i`, 1-based.
    Proj(usize, usize),
    Comp(Box<RecExpr>, Vec<RecExpr>),
    PrimRec(Box<RecExpr>, Box<RecExpr>),
    Mu(Box<RecExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RecExpr {
    node: Node,
    arity: usize,
}

fn malformed(msg: String) -> Error {
    Error::InvalidMachine(msg)
}

impl RecExpr {
    pub fn zero() -> Self {
        RecExpr { node: Node::Zero(1), arity: 1 }
    }

    pub fn zero_n(n: usize) -> Self {
        RecExpr { node: Node::Zero(n), arity: n }
    }

    pub fn succ() -> Self {
        RecExpr { node: Node::Succ, arity: 1 }
    }

    pub fn proj(n: usize, i: usize) -> Result<Self> {
        if i == 0 || i > n {
            return Err(malformed(format!("projection π^{n}_{i} out of range")));
        }
        Ok(RecExpr { node: Node::Proj(n, i), arity: n })
    }

    pub fn comp(g: RecExpr, fs: Vec<RecExpr>) -> Result<Self> {
        if g.arity != fs.len() {
            return Err(malformed(format!("composition: outer arity {} with {} inner functions", g.arity, fs.len())));
        }
        let m = match fs.first() {
            Some(f) => f.arity,
            None => return Err(malformed("composition needs at least one inner function".into())),
        };
        if fs.iter().any(|f| f.arity != m) {
            return Err(malformed("composition: inner functions disagree on arity".into()));
        }
        Ok(RecExpr { node: Node::Comp(Box::new(g), fs), arity: m })
    }

    pub fn primrec(f: RecExpr, g: RecExpr) -> Result<Self> {
        if g.arity != f.arity + 2 {
            return Err(malformed(format!("recursion: base arity {} needs step arity {}", f.arity, f.arity + 2)));
        }
        let arity = f.arity + 1;
        Ok(RecExpr { node: Node::PrimRec(Box::new(f), Box::new(g)), arity })
    }

    pub fn mu(f: RecExpr) -> Result<Self> {
        if f.arity == 0 {
            return Err(malformed("minimization needs a function of arity at least 1".into()));
        }
        let arity = f.arity - 1;
        Ok(RecExpr { node: Node::Mu(Box::new(f)), arity })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn node(&self) -> &Node {
        &self.node
    }

    /// No μ node anywhere.
    pub fn is_primitive_recursive(&self) -> bool {
        match &self.node {
            Node::Zero(_) | Node::Succ | Node::Proj(..) => true,
            Node::Comp(g, fs) => g.is_primitive_recursive() && fs.iter().all(RecExpr::is_primitive_recursive),
            Node::PrimRec(f, g) => f.is_primitive_recursive() && g.is_primitive_recursive(),
            Node::Mu(_) => false,
        }
    }

    /// Node count.
    pub fn size(&self) -> usize {
        1 + match &self.node {
            Node::Zero(_) | Node::Succ | Node::Proj(..) => 0,
            Node::Comp(g, fs) => g.size() + fs.iter().map(RecExpr::size).sum::<usize>(),
            Node::PrimRec(f, g) => f.size() + g.size(),
            Node::Mu(f) => f.size(),
        }
    }
}

struct Budget {
    left: u64,
    used: u64,
}

impl Budget {
    /// False once the budget is gone.
    fn charge(&mut self) -> bool {
        if self.left == 0 {
            return false;
        }
        self.left -= 1;
        self.used += 1;
        true
    }
}

/// `Ok(None)` means the budget ran out.
fn eval_in(e: &RecExpr, args: &[u64], b: &mut Budget) -> Result<Option<u64>> {
    if !b.charge() {
        return Ok(None);
    }
    match &e.node {
        Node::Zero(_) => Ok(Some(0)),
        Node::Succ => args[0].checked_add(1).map(Some).ok_or_else(|| Error::Overflow("successor".into())),
        Node::Proj(_, i) => Ok(Some(args[i - 1])),
        Node::Comp(g, fs) => {
            let mut inner = Vec::with_capacity(fs.len());
            for f in fs {
                match eval_in(f, args, b)? {
                    Some(v) => inner.push(v),
                    None => return Ok(None),
                }
            }
            eval_in(g, &inner, b)
        }
        Node::PrimRec(f, g) => {
            let (xs, n) = args.split_at(args.len() - 1);
            let Some(mut acc) = eval_in(f, xs, b)? else { return Ok(None) };
            let mut step: Vec<u64> = xs.to_vec();
            step.extend([0, 0]);
            for i in 0..n[0] {
                let len = step.len();
                step[len - 2] = i;
                step[len - 1] = acc;
                match eval_in(g, &step, b)? {
                    Some(v) => acc = v,
                    None => return Ok(None),
                }
            }
            Ok(Some(acc))
        }
        Node::Mu(f) => {
            let mut probe: Vec<u64> = args.to_vec();
            probe.push(0);
            for y in 0u64.. {
                if !b.charge() {
                    return Ok(None);
                }
                *probe.last_mut().expect("probe") = y;
                match eval_in(f, &probe, b)? {
                    Some(0) => return Ok(Some(y)),
                    Some(_) => {}
                    None => return Ok(None),
                }
            }
            unreachable!()
        }
    }
}

/// Evaluates `e`, charging one unit of fuel per node visit and one per
/// μ candidate.
pub fn eval(e: &RecExpr, args: &[u64], fuel: Fuel) -> Result<RunOutcome<u64>> {
    if args.len() != e.arity {
        return Err(Error::Shape(format!("function of arity {} applied to {} arguments", e.arity, args.len())));
    }
    let mut b = Budget { left: fuel.0, used: 0 };
    Ok(match eval_in(e, args, &mut b)? {
        Some(v) => RunOutcome::Halted { outputs: v, steps_used: b.used, cells_used: 0 },
        None => RunOutcome::FuelExhausted,
    })
}

/// Ackermann's function with an explicit stack of pending first arguments.
/// One unit of fuel per expansion.
pub fn ackermann(m: u64, n: u64, fuel: Fuel) -> Result<RunOutcome<u64>> {
    let mut stack = vec![m];
    let mut n = n;
    let mut steps = 0u64;
    let mut peak = 1u64;
    while let Some(m) = stack.pop() {
        if steps >= fuel.0 {
            return Ok(RunOutcome::FuelExhausted);
        }
        steps += 1;
        if m == 0 {
            n = n.checked_add(1).ok_or_else(|| Error::Overflow("ackermann".into()))?;
        } else if n == 0 {
            stack.push(m - 1);
            n = 1;
        } else {
            stack.push(m - 1);
            stack.push(m);
            n -= 1;
        }
        peak = peak.max(stack.len() as u64);
    }
    Ok(RunOutcome::Halted { outputs: n, steps_used: steps, cells_used: peak })
}

impl fmt::Display for RecExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.node {
            Node::Zero(1) => write!(f, "z"),
            Node::Zero(n) => write!(f, "(z {n})"),
            Node::Succ => write!(f, "s"),
            Node::Proj(n, i) => write!(f, "(proj {n} {i})"),
            Node::Comp(g, fs) => {
                write!(f, "(comp {g}")?;
                for x in fs {
                    write!(f, " {x}")?;
                }
                write!(f, ")")
            }
            Node::PrimRec(a, b) => write!(f, "(primrec {a} {b})"),
            Node::Mu(a) => write!(f, "(mu {a})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

fn tokenize(text: &str) -> Vec<String> {
    let mut toks = Vec::new();
    let mut cur = String::new();
    for line in text.lines() {
        let line = line.split(';').next().unwrap_or("");
        for c in line.chars() {
            if c == '(' || c == ')' || c.is_whitespace() {
                if !cur.is_empty() {
                    toks.push(std::mem::take(&mut cur));
                }
                if !c.is_whitespace() {
                    toks.push(c.to_string());
                }
            } else {
                cur.push(c);
            }
        }
        if !cur.is_empty() {
            toks.push(std::mem::take(&mut cur));
        }
    }
    toks
}

fn read_sexp(toks: &[String], pos: &mut usize) -> Result<Sexp> {
    let err = |m: &str| Error::format(0, m.to_string());
    let t = toks.get(*pos).ok_or_else(|| err("unexpected end of expression"))?;
    *pos += 1;
    match t.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match toks.get(*pos).map(String::as_str) {
                    None => return Err(err("unclosed parenthesis")),
                    Some(")") => {
                        *pos += 1;
                        return Ok(Sexp::List(items));
                    }
                    Some(_) => items.push(read_sexp(toks, pos)?),
                }
            }
        }
        ")" => Err(err("unexpected `)`")),
        a => Ok(Sexp::Atom(a.to_string())),
    }
}

fn num(s: &Sexp) -> Result<usize> {
    match s {
        Sexp::Atom(a) => a.parse().map_err(|_| Error::format(0, format!("expected a number, got {a}"))),
        _ => Err(Error::format(0, "expected a number")),
    }
}

fn build(s: &Sexp) -> Result<RecExpr> {
    match s {
        Sexp::Atom(a) if a == "z" => Ok(RecExpr::zero()),
        Sexp::Atom(a) if a == "s" => Ok(RecExpr::succ()),
        Sexp::Atom(a) => Err(Error::format(0, format!("unknown atom {a}"))),
        Sexp::List(items) => {
            let head = match items.first() {
                Some(Sexp::Atom(h)) => h.as_str(),
                _ => return Err(Error::format(0, "expected an operator")),
            };
            let rest = &items[1..];
            match (head, rest.len()) {
                ("z", 1) => Ok(RecExpr::zero_n(num(&rest[0])?)),
                ("proj", 2) => RecExpr::proj(num(&rest[0])?, num(&rest[1])?),
                ("comp", n) if n >= 2 => {
                    let g = build(&rest[0])?;
                    let fs = rest[1..].iter().map(build).collect::<Result<Vec<_>>>()?;
                    RecExpr::comp(g, fs)
                }
                ("primrec", 2) => RecExpr::primrec(build(&rest[0])?, build(&rest[1])?),
                ("mu", 1) => RecExpr::mu(build(&rest[0])?),
                _ => Err(Error::format(0, format!("bad form ({head} …) with {} arguments", rest.len()))),
            }
        }
    }
}

/// Parses the `.rf` s-expression format. `;` starts a comment.
pub fn parse_rf(text: &str) -> Result<RecExpr> {
    let toks = tokenize(text);
    let mut pos = 0;
    let s = read_sexp(&toks, &mut pos)?;
    if pos != toks.len() {
        return Err(Error::format(0, "trailing input after expression"));
    }
    build(&s)
}

/// Standard arithmetic in the calculus.
pub mod library {
    use super::RecExpr;

    fn p(n: usize, i: usize) -> RecExpr {
        RecExpr::proj(n, i).expect("projection")
    }

    /// add(x, y): recursion on y.
    pub fn add() -> RecExpr {
        let step = RecExpr::comp(RecExpr::succ(), vec![p(3, 3)]).unwrap();
        RecExpr::primrec(p(1, 1), step).unwrap()
    }

    /// mul(x, y) = y-fold addition of x.
    pub fn mul() -> RecExpr {
        let step = RecExpr::comp(add(), vec![p(3, 3), p(3, 1)]).unwrap();
        RecExpr::primrec(RecExpr::zero(), step).unwrap()
    }

    /// pred(0) = 0, pred(n+1) = n.
    pub fn pred() -> RecExpr {
        RecExpr::primrec(RecExpr::zero_n(0), p(2, 1)).unwrap()
    }

    /// Truncated subtraction x ∸ y.
    pub fn monus() -> RecExpr {
        let step = RecExpr::comp(pred(), vec![p(3, 3)]).unwrap();
        RecExpr::primrec(p(1, 1), step).unwrap()
    }

    /// The constant `k` as a function of one argument.
    pub fn constant(k: usize) -> RecExpr {
        (0..k).fold(RecExpr::zero(), |e, _| RecExpr::comp(RecExpr::succ(), vec![e]).unwrap())
    }

    /// |x − k|.
    pub fn distance_to(k: usize) -> RecExpr {
        let x = p(1, 1);
        let a = RecExpr::comp(monus(), vec![x.clone(), constant(k)]).unwrap();
        let b = RecExpr::comp(monus(), vec![constant(k), x]).unwrap();
        RecExpr::comp(add(), vec![a, b]).unwrap()
    }
}

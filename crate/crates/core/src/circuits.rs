//! Feedforward Boolean circuits over bundles of wires.
//!
//! Every wire is driven once and consumed at most once. Wires are copied only
//! through explicit `FANOUT` gates, and gates may only read wires defined
//! before them, so circuits are acyclic by construction.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::base::Word;
use crate::error::{Error, Result};

pub type Wire = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    And,
    Or,
    Not,
    Nand,
    Nor,
    Fanout,
}

impl GateKind {
    pub fn arity(self) -> (usize, usize) {
        match self {
            GateKind::Not => (1, 1),
            GateKind::Fanout => (1, 2),
            _ => (2, 1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::And => "AND",
            GateKind::Or => "OR",
            GateKind::Not => "NOT",
            GateKind::Nand => "NAND",
            GateKind::Nor => "NOR",
            GateKind::Fanout => "FANOUT",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "AND" => GateKind::And,
            "OR" => GateKind::Or,
            "NOT" => GateKind::Not,
            "NAND" => GateKind::Nand,
            "NOR" => GateKind::Nor,
            "FANOUT" => GateKind::Fanout,
            _ => return None,
        })
    }

    fn apply(self, a: &[bool]) -> Vec<bool> {
        match self {
            GateKind::And => vec![a[0] && a[1]],
            GateKind::Or => vec![a[0] || a[1]],
            GateKind::Not => vec![!a[0]],
            GateKind::Nand => vec![!(a[0] && a[1])],
            GateKind::Nor => vec![!(a[0] || a[1])],
            GateKind::Fanout => vec![a[0], a[0]],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gate {
    pub kind: GateKind,
    pub ins: Vec<Wire>,
    pub outs: Vec<Wire>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    in_bundles: Vec<usize>,
    out_bundles: Vec<usize>,
    gates: Vec<Gate>,
    /// Wires feeding the outputs, bundle after bundle.
    result: Vec<Wire>,
}

impl Circuit {
    /// Input wires are `0..Σ in_bundles`.
    pub fn new(in_bundles: Vec<usize>, out_bundles: Vec<usize>, gates: Vec<Gate>, result: Vec<Wire>) -> Result<Self> {
        let c = Circuit { in_bundles, out_bundles, gates, result };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidMachine(m));
        let mut defined: HashSet<Wire> = (0..self.input_width()).collect();
        let mut consumed: HashSet<Wire> = HashSet::new();
        for (i, g) in self.gates.iter().enumerate() {
            let (ni, no) = g.kind.arity();
            if g.ins.len() != ni || g.outs.len() != no {
                return bad(format!("gate {i}: {} takes {ni} inputs and {no} outputs", g.kind.name()));
            }
            for w in &g.ins {
                if !defined.contains(w) {
                    return bad(format!("gate {i} reads undefined wire {w}"));
                }
                if !consumed.insert(*w) {
                    return bad(format!("wire {w} consumed twice; use FANOUT"));
                }
            }
            for w in &g.outs {
                if !defined.insert(*w) {
                    return bad(format!("wire {w} driven twice"));
                }
            }
        }
        if self.result.len() != self.output_width() {
            return bad(format!("{} result wires for output width {}", self.result.len(), self.output_width()));
        }
        for w in &self.result {
            if !defined.contains(w) {
                return bad(format!("result wire {w} undefined"));
            }
            if !consumed.insert(*w) {
                return bad(format!("wire {w} consumed twice; use FANOUT"));
            }
        }
        Ok(())
    }

    /// Plain wires.
    pub fn identity(bundles: &[usize]) -> Self {
        let n: usize = bundles.iter().sum();
        Circuit { in_bundles: bundles.to_vec(), out_bundles: bundles.to_vec(), gates: Vec::new(), result: (0..n).collect() }
    }

    /// Single gate on fresh inputs, one bundle per gate port.
    pub fn single(kind: GateKind) -> Self {
        let (ni, no) = kind.arity();
        let gate = Gate { kind, ins: (0..ni).collect(), outs: (ni..ni + no).collect() };
        Circuit { in_bundles: vec![1; ni], out_bundles: vec![1; no], gates: vec![gate], result: (ni..ni + no).collect() }
    }

    pub fn in_bundles(&self) -> &[usize] {
        &self.in_bundles
    }

    pub fn out_bundles(&self) -> &[usize] {
        &self.out_bundles
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn result(&self) -> &[Wire] {
        &self.result
    }

    pub fn input_width(&self) -> usize {
        self.in_bundles.iter().sum()
    }

    pub fn output_width(&self) -> usize {
        self.out_bundles.iter().sum()
    }

    /// Logic gates, not counting fanouts.
    pub fn gate_count(&self) -> usize {
        self.gates.iter().filter(|g| g.kind != GateKind::Fanout).count()
    }

    pub fn gate_multiset(&self) -> BTreeMap<GateKind, usize> {
        let mut m = BTreeMap::new();
        for g in &self.gates {
            *m.entry(g.kind).or_insert(0) += 1;
        }
        m
    }

    /// Longest input-to-output path counted in logic gates.
    pub fn depth(&self) -> usize {
        let mut d: HashMap<Wire, usize> = (0..self.input_width()).map(|w| (w, 0)).collect();
        for g in &self.gates {
            let base = g.ins.iter().map(|w| d[w]).max().unwrap_or(0);
            let here = base + usize::from(g.kind != GateKind::Fanout);
            for &o in &g.outs {
                d.insert(o, here);
            }
        }
        self.result.iter().map(|w| d[w]).max().unwrap_or(0)
    }

    /// Evaluates on flat input bits.
    pub fn eval_bits(&self, bits: &[bool]) -> Result<Vec<bool>> {
        if bits.len() != self.input_width() {
            return Err(Error::Shape(format!("circuit takes {} bits, got {}", self.input_width(), bits.len())));
        }
        let mut val: HashMap<Wire, bool> = bits.iter().copied().enumerate().collect();
        for g in &self.gates {
            let a: Vec<bool> = g.ins.iter().map(|w| val[w]).collect();
            for (w, v) in g.outs.iter().zip(g.kind.apply(&a)) {
                val.insert(*w, v);
            }
        }
        Ok(self.result.iter().map(|w| val[w]).collect())
    }

    /// Inputs in `0..2^width`, bit `i` of the index is input wire `i`.
    pub fn truth_table(&self) -> Result<Vec<Vec<bool>>> {
        let n = self.input_width();
        if n > 20 {
            return Err(Error::Resource(format!("truth table of width {n}")));
        }
        (0..1usize << n).map(|x| self.eval_bits(&(0..n).map(|i| x >> i & 1 == 1).collect::<Vec<_>>())).collect()
    }

    /// Renumbers wires as inputs first, then gate outputs in order.
    fn renumbered(&self, input_map: &dyn Fn(Wire) -> Wire, next: &mut Wire) -> (Vec<Gate>, Vec<Wire>) {
        let mut map: HashMap<Wire, Wire> = (0..self.input_width()).map(|w| (w, input_map(w))).collect();
        let gates = self
            .gates
            .iter()
            .map(|g| {
                let ins = g.ins.iter().map(|w| map[w]).collect();
                let outs = g
                    .outs
                    .iter()
                    .map(|&w| {
                        let fresh = *next;
                        *next += 1;
                        map.insert(w, fresh);
                        fresh
                    })
                    .collect();
                Gate { kind: g.kind, ins, outs }
            })
            .collect();
        (gates, self.result.iter().map(|w| map[w]).collect())
    }
}

fn bits_of(words: &[Word], widths: &[usize]) -> Result<Vec<bool>> {
    if words.len() != widths.len() {
        return Err(Error::Shape(format!("{} bundles expected, got {}", widths.len(), words.len())));
    }
    let mut bits = Vec::new();
    for (w, &n) in words.iter().zip(widths) {
        if w.len() != n {
            return Err(Error::Shape(format!("bundle of width {n} given {} bits", w.len())));
        }
        for &c in w.glyphs() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                other => return Err(Error::Alphabet(format!("{other:?} is not a bit"))),
            }
        }
    }
    Ok(bits)
}

/// Evaluates on one bit word per input bundle.
pub fn eval_circuit(c: &Circuit, inputs: &[Word]) -> Result<Vec<Word>> {
    let out = c.eval_bits(&bits_of(inputs, &c.in_bundles)?)?;
    let mut words = Vec::new();
    let mut it = out.into_iter();
    for &n in &c.out_bundles {
        words.push(Word(it.by_ref().take(n).map(|b| if b { '1' } else { '0' }).collect()));
    }
    Ok(words)
}

/// Feeds the outputs of `c1` into `c2`.
pub fn compose_circuit(c1: &Circuit, c2: &Circuit) -> Result<Circuit> {
    if c1.out_bundles != c2.in_bundles {
        return Err(Error::Shape(format!("bundles {:?} do not match {:?}", c1.out_bundles, c2.in_bundles)));
    }
    let mut next = c1.input_width();
    let (mut gates, mid) = c1.renumbered(&|w| w, &mut next);
    let (g2, result) = c2.renumbered(&|w| mid[w], &mut next);
    gates.extend(g2);
    Circuit::new(c1.in_bundles.clone(), c2.out_bundles.clone(), gates, result)
}

/// Side by side.
pub fn tensor_circuit(c1: &Circuit, c2: &Circuit) -> Circuit {
    let n1 = c1.input_width();
    let mut next = n1 + c2.input_width();
    let (mut gates, mut result) = c1.renumbered(&|w| w, &mut next);
    let (g2, r2) = c2.renumbered(&|w| n1 + w, &mut next);
    gates.extend(g2);
    result.extend(r2);
    let cat = |a: &[usize], b: &[usize]| [a, b].concat();
    Circuit {
        in_bundles: cat(&c1.in_bundles, &c2.in_bundles),
        out_bundles: cat(&c1.out_bundles, &c2.out_bundles),
        gates,
        result,
    }
}

/// Crosses the wires of two bundle groups.
pub fn twist_circuit(b1: &[usize], b2: &[usize]) -> Circuit {
    let n1: usize = b1.iter().sum();
    let n2: usize = b2.iter().sum();
    Circuit {
        in_bundles: [b1, b2].concat(),
        out_bundles: [b2, b1].concat(),
        gates: Vec::new(),
        result: (n1..n1 + n2).chain(0..n1).collect(),
    }
}

/// Rewrites every gate into NAND and FANOUT gates.
pub fn nand_synthesize(c: &Circuit) -> Circuit {
    let mut next = c.gates.iter().flat_map(|g| g.outs.iter().copied()).chain(0..c.input_width()).max().map_or(0, |m| m + 1);
    let mut fresh = || {
        next += 1;
        next - 1
    };
    let mut gates = Vec::new();
    let nand = |a: Wire, b: Wire, o: Wire| Gate { kind: GateKind::Nand, ins: vec![a, b], outs: vec![o] };
    let fan = |a: Wire, o1: Wire, o2: Wire| Gate { kind: GateKind::Fanout, ins: vec![a], outs: vec![o1, o2] };
    for g in &c.gates {
        match g.kind {
            GateKind::Nand | GateKind::Fanout => gates.push(g.clone()),
            GateKind::Not => {
                let (x1, x2) = (fresh(), fresh());
                gates.push(fan(g.ins[0], x1, x2));
                gates.push(nand(x1, x2, g.outs[0]));
            }
            GateKind::And => {
                let (t, t1, t2) = (fresh(), fresh(), fresh());
                gates.push(nand(g.ins[0], g.ins[1], t));
                gates.push(fan(t, t1, t2));
                gates.push(nand(t1, t2, g.outs[0]));
            }
            GateKind::Or | GateKind::Nor => {
                let (a1, a2, na) = (fresh(), fresh(), fresh());
                let (b1, b2, nb) = (fresh(), fresh(), fresh());
                gates.push(fan(g.ins[0], a1, a2));
                gates.push(nand(a1, a2, na));
                gates.push(fan(g.ins[1], b1, b2));
                gates.push(nand(b1, b2, nb));
                if g.kind == GateKind::Or {
                    gates.push(nand(na, nb, g.outs[0]));
                } else {
                    let (o, o1, o2) = (fresh(), fresh(), fresh());
                    gates.push(nand(na, nb, o));
                    gates.push(fan(o, o1, o2));
                    gates.push(nand(o1, o2, g.outs[0]));
                }
            }
        }
    }
    Circuit { in_bundles: c.in_bundles.clone(), out_bundles: c.out_bundles.clone(), gates, result: c.result.clone() }
}

/// A uniform family: a procedure producing the circuit for input size `n`.
#[derive(Clone)]
pub struct CircuitFamily {
    pub name: String,
    build: Arc<dyn Fn(usize) -> Circuit + Send + Sync>,
}

impl fmt::Debug for CircuitFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CircuitFamily({})", self.name)
    }
}

impl CircuitFamily {
    pub fn new(name: impl Into<String>, build: impl Fn(usize) -> Circuit + Send + Sync + 'static) -> Self {
        CircuitFamily { name: name.into(), build: Arc::new(build) }
    }

    pub fn at(&self, n: usize) -> Circuit {
        (self.build)(n)
    }
}

/// Two-input XOR from four NANDs.
pub fn xor_nand() -> Circuit {
    let g = |kind, ins: Vec<Wire>, outs: Vec<Wire>| Gate { kind, ins, outs };
    use GateKind::{Fanout, Nand};
    Circuit::new(
        vec![1, 1],
        vec![1],
        vec![
            g(Fanout, vec![0], vec![2, 3]),
            g(Fanout, vec![1], vec![4, 5]),
            g(Nand, vec![2, 4], vec![6]),
            g(Fanout, vec![6], vec![7, 8]),
            g(Nand, vec![3, 7], vec![9]),
            g(Nand, vec![5, 8], vec![10]),
            g(Nand, vec![9, 10], vec![11]),
        ],
        vec![11],
    )
    .expect("xor circuit")
}

/// Parity of `n ≥ 1` bits as a chain of NAND-built XORs.
pub fn parity_family() -> CircuitFamily {
    CircuitFamily::new("parity", |n| {
        if n == 0 {
            // No constants in the gate basis: the empty word is mapped to no output.
            return Circuit::identity(&[0]);
        }
        let mut acc = Circuit::identity(&[1]);
        for _ in 1..n {
            let step = compose_circuit(&tensor_circuit(&acc, &Circuit::identity(&[1])), &xor_nand()).expect("chain");
            acc = step;
        }
        // Flatten the n single-bit bundles into one bundle.
        Circuit { in_bundles: vec![n], ..acc }
    })
}

/// Parses the `.ckt` netlist format.
///
/// ```text
/// inputs 1 1
/// outputs 1
/// gate NAND 0 1 -> 2
/// result 2
/// ```
pub fn parse_ckt(text: &str) -> Result<Circuit> {
    let mut ins = None;
    let mut outs = None;
    let mut gates = Vec::new();
    let mut result = None;
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let nums = |s: &str| -> Result<Vec<usize>> {
            s.split_whitespace().map(|t| t.parse().map_err(|_| Error::format(n, format!("bad number {t:?}")))).collect()
        };
        let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match head {
            "inputs" => ins = Some(nums(rest)?),
            "outputs" => outs = Some(nums(rest)?),
            "result" => result = Some(nums(rest)?),
            "gate" => {
                let (lhs, rhs) = rest.split_once("->").ok_or_else(|| Error::format(n, "gate needs `->`"))?;
                let mut lt = lhs.split_whitespace();
                let kind = lt
                    .next()
                    .and_then(GateKind::parse)
                    .ok_or_else(|| Error::format(n, "unknown gate type"))?;
                let rest_in: String = lt.collect::<Vec<_>>().join(" ");
                gates.push(Gate { kind, ins: nums(&rest_in)?, outs: nums(rhs)? });
            }
            other => return Err(Error::format(n, format!("unknown directive {other:?}"))),
        }
    }
    let missing = |what: &str| Error::format(0, format!("missing `{what}` line"));
    let c = Circuit::new(
        ins.ok_or_else(|| missing("inputs"))?,
        outs.ok_or_else(|| missing("outputs"))?,
        gates,
        result.ok_or_else(|| missing("result"))?,
    );
    c.map_err(|e| match e {
        Error::InvalidMachine(m) => Error::format(0, m),
        other => other,
    })
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
        writeln!(f, "inputs {}", list(&self.in_bundles))?;
        writeln!(f, "outputs {}", list(&self.out_bundles))?;
        for g in &self.gates {
            writeln!(f, "gate {} {} -> {}", g.kind.name(), list(&g.ins), list(&g.outs))?;
        }
        writeln!(f, "result {}", list(&self.result))
    }
}

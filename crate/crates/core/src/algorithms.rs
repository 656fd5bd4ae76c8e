//! Programs up to "essentially the same": a normalizer for register
//! programs whose normal-form digest names the algorithm a program
//! implements.
//!
//! Four rewrites are applied:
//!
//! 1. renaming: inputs and outputs are renamed by position, every other
//!    register by first use;
//! 2. loop boundary: a guarded copy of a loop body placed in front of the
//!    loop is rolled back into it;
//! 3. fission: a loop whose body splits into independent groups gets one
//!    loop per group, all driven by tally counters filled in the first loop;
//! 4. ordering: independent neighbouring statements are put in a canonical
//!    order.
//!
//! Loops are recognized in the form
//! `L: if R = 0 goto E` … `if Z = 0 goto L` `E:`, with `Z` a register that
//! is never incremented, and conditionals as forward jumps over a block.
//! Programs with any other control flow are only renamed.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use sha2::{Digest, Sha256};

use crate::base::BlackBoxFunction;
use crate::error::{Error, Result};
use crate::regmachine::{reg_semantics, Instr, RegProgram};

/// Which rewrites [`normalize_with`] applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RewriteSet {
    pub rename: bool,
    pub loop_boundary: bool,
    pub fission: bool,
    pub reorder: bool,
}

impl Default for RewriteSet {
    fn default() -> Self {
        RewriteSet { rename: true, loop_boundary: true, fission: true, reorder: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    pub program: RegProgram,
    /// SHA-256 of the canonical text, in hex.
    pub digest: String,
    /// False when the control flow was not recognized and only renaming ran.
    pub structured: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Stmt {
    Op(Instr),
    /// Runs the body while the register is non-zero.
    While(String, Vec<Stmt>),
    /// Runs the body once if the register is non-zero.
    If(String, Vec<Stmt>),
}

impl Stmt {
    fn collect(&self, reads: &mut BTreeSet<String>, writes: &mut BTreeSet<String>) {
        match self {
            Stmt::Op(Instr::SetZero(r)) => {
                writes.insert(r.clone());
            }
            Stmt::Op(Instr::Inc(r) | Instr::Dec(r)) => {
                reads.insert(r.clone());
                writes.insert(r.clone());
            }
            Stmt::Op(_) => unreachable!("jumps and calls are not statements"),
            Stmt::While(r, body) | Stmt::If(r, body) => {
                reads.insert(r.clone());
                for s in body {
                    s.collect(reads, writes);
                }
            }
        }
    }

    fn effects(&self) -> (BTreeSet<String>, BTreeSet<String>) {
        let (mut r, mut w) = (BTreeSet::new(), BTreeSet::new());
        self.collect(&mut r, &mut w);
        (r, w)
    }

    fn mentions(&self, reg: &str) -> bool {
        let (r, w) = self.effects();
        r.contains(reg) || w.contains(reg)
    }

    fn rename(&self, f: &dyn Fn(&str) -> String) -> Stmt {
        match self {
            Stmt::Op(Instr::SetZero(r)) => Stmt::Op(Instr::SetZero(f(r))),
            Stmt::Op(Instr::Inc(r)) => Stmt::Op(Instr::Inc(f(r))),
            Stmt::Op(Instr::Dec(r)) => Stmt::Op(Instr::Dec(f(r))),
            Stmt::Op(other) => Stmt::Op(other.clone()),
            Stmt::While(r, b) => Stmt::While(f(r), b.iter().map(|s| s.rename(f)).collect()),
            Stmt::If(r, b) => Stmt::If(f(r), b.iter().map(|s| s.rename(f)).collect()),
        }
    }

    /// Registers in order of first mention.
    fn registers_in_order(&self, out: &mut Vec<String>) {
        let mut push = |r: &String| {
            if !out.contains(r) {
                out.push(r.clone());
            }
        };
        match self {
            Stmt::Op(Instr::SetZero(r) | Instr::Inc(r) | Instr::Dec(r)) => push(r),
            Stmt::Op(_) => {}
            Stmt::While(r, b) | Stmt::If(r, b) => {
                push(r);
                for s in b {
                    s.registers_in_order(out);
                }
            }
        }
    }

    fn text(&self, show: &dyn Fn(&str) -> String) -> String {
        match self {
            Stmt::Op(Instr::SetZero(r)) => format!("{} = 0", show(r)),
            Stmt::Op(Instr::Inc(r)) => format!("{0} = {0} + 1", show(r)),
            Stmt::Op(Instr::Dec(r)) => format!("{0} = {0} - 1", show(r)),
            Stmt::Op(_) => String::new(),
            Stmt::While(r, b) => format!("while {} {{{}}}", show(r), block_text(b, show)),
            Stmt::If(r, b) => format!("if {} {{{}}}", show(r), block_text(b, show)),
        }
    }

    fn visit<'a>(&'a self, f: &mut dyn FnMut(&'a Stmt)) {
        f(self);
        if let Stmt::While(_, b) | Stmt::If(_, b) = self {
            for s in b {
                s.visit(f);
            }
        }
    }
}

fn block_text(b: &[Stmt], show: &dyn Fn(&str) -> String) -> String {
    b.iter().map(|s| s.text(show)).collect::<Vec<_>>().join("; ")
}

fn conflict(a: &Stmt, b: &Stmt) -> bool {
    let (ra, wa) = a.effects();
    let (rb, wb) = b.effects();
    wa.iter().any(|r| rb.contains(r) || wb.contains(r)) || wb.iter().any(|r| ra.contains(r))
}

/// Read/write sets and conflict edges of a statement sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependenceGraph {
    pub statements: Vec<String>,
    pub reads: Vec<BTreeSet<String>>,
    pub writes: Vec<BTreeSet<String>>,
    /// `(i, j)` with `i < j`: statement `j` must stay after statement `i`.
    pub edges: Vec<(usize, usize)>,
}

fn graph_of(block: &[Stmt]) -> DependenceGraph {
    let show = |r: &str| r.to_string();
    let mut g = DependenceGraph {
        statements: block.iter().map(|s| s.text(&show)).collect(),
        reads: Vec::new(),
        writes: Vec::new(),
        edges: Vec::new(),
    };
    for s in block {
        let (r, w) = s.effects();
        g.reads.push(r);
        g.writes.push(w);
    }
    for j in 0..block.len() {
        for i in 0..j {
            if conflict(&block[i], &block[j]) {
                g.edges.push((i, j));
            }
        }
    }
    g.edges.sort_unstable();
    g
}

/// The dependence graph of the top-level statements of `p`'s structured
/// form.
pub fn dependence_graph(p: &RegProgram) -> Result<DependenceGraph> {
    check_supported(p)?;
    let block = structure(p).ok_or_else(|| Error::Unsupported("control flow is not structured".into()))?;
    Ok(graph_of(&block))
}

fn check_supported(p: &RegProgram) -> Result<()> {
    if p.uses_call() {
        return Err(Error::Unsupported("normalization of programs with `call`".into()));
    }
    Ok(())
}

/// Registers that stay 0 throughout: never incremented and not inputs.
fn zero_registers(p: &RegProgram) -> BTreeSet<String> {
    let mut all = BTreeSet::new();
    let mut bumped = BTreeSet::new();
    for i in p.instrs() {
        match i {
            Instr::Inc(r) => {
                bumped.insert(r.clone());
            }
            Instr::SetZero(r) | Instr::Dec(r) | Instr::IfZeroGoto(r, _) => {
                all.insert(r.clone());
            }
            Instr::Call { .. } => {}
        }
    }
    all.into_iter().filter(|r| !bumped.contains(r) && !p.inputs().contains(r)).collect()
}

fn structure(p: &RegProgram) -> Option<Vec<Stmt>> {
    let zero = zero_registers(p);
    let code = p.instrs();
    let at = |l: &str| p.labels().get(l).copied();
    fn parse(
        code: &[Instr],
        zero: &BTreeSet<String>,
        at: &dyn Fn(&str) -> Option<usize>,
        lo: usize,
        hi: usize,
    ) -> Option<Vec<Stmt>> {
        let mut out = Vec::new();
        let mut i = lo;
        while i < hi {
            match &code[i] {
                Instr::IfZeroGoto(r, l) => {
                    let t = at(l)?;
                    if zero.contains(r) || t <= i || t > hi {
                        return None;
                    }
                    let back = t - 1;
                    let closes = back > i
                        && matches!(&code[back], Instr::IfZeroGoto(z, h) if zero.contains(z) && at(h) == Some(i));
                    if closes {
                        out.push(Stmt::While(r.clone(), parse(code, zero, at, i + 1, back)?));
                    } else {
                        out.push(Stmt::If(r.clone(), parse(code, zero, at, i + 1, t)?));
                    }
                    i = t;
                }
                Instr::Call { .. } => return None,
                op => {
                    out.push(Stmt::Op(op.clone()));
                    i += 1;
                }
            }
        }
        Some(out)
    }
    parse(code, &zero, &at, 0, code.len())
}

struct Normalizer {
    /// Inputs and outputs, already renamed by position.
    fixed: BTreeSet<String>,
    fresh: usize,
    taken: BTreeSet<String>,
}

impl Normalizer {
    fn anon(&self, r: &str) -> String {
        if self.fixed.contains(r) {
            r.to_string()
        } else {
            format!("{}_", &r[..1])
        }
    }

    fn fresh_counter(&mut self) -> String {
        loop {
            self.fresh += 1;
            let name = format!("Wt{}", self.fresh);
            if self.taken.insert(name.clone()) {
                return name;
            }
        }
    }

    fn is_tally(&self, group: &[Stmt]) -> bool {
        matches!(group, [Stmt::Op(Instr::Inc(r))] if !self.fixed.contains(r))
    }

    /// Rule 2 on one block: `if R {B}; while R {B}` and `if R {B; while R {B}}`
    /// both become `while R {B}`.
    fn roll(&self, block: Vec<Stmt>) -> (Vec<Stmt>, bool) {
        let mut out: Vec<Stmt> = Vec::with_capacity(block.len());
        let mut changed = false;
        for s in block {
            if let (Some(Stmt::If(r1, b1)), Stmt::While(r2, b2)) = (out.last(), &s) {
                if r1 == r2 && b1 == b2 {
                    out.pop();
                    changed = true;
                }
            }
            let s = match s {
                Stmt::If(r, mut b) => match b.last() {
                    Some(Stmt::While(r2, inner)) if *r2 == r && inner[..] == b[..b.len() - 1] => {
                        changed = true;
                        b.pop().expect("loop")
                    }
                    _ => Stmt::If(r, b),
                },
                other => other,
            };
            out.push(s);
        }
        (out, changed)
    }

    /// Rule 3 on one loop. Returns the replacement statements.
    fn fission(&mut self, reg: &str, body: Vec<Stmt>) -> Vec<Stmt> {
        // Connected components of the conflict graph; the one touching the
        // loop register stays in control.
        let n = body.len();
        let mut comp: Vec<usize> = (0..n).collect();
        fn find(c: &mut [usize], i: usize) -> usize {
            if c[i] != i {
                let root = find(c, c[i]);
                c[i] = root;
            }
            c[i]
        }
        for j in 0..n {
            for i in 0..j {
                if conflict(&body[i], &body[j]) {
                    let (a, b) = (find(&mut comp, i), find(&mut comp, j));
                    comp[a] = b;
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..n {
            let root = find(&mut comp, i);
            groups.entry(root).or_default().push(i);
        }
        let mut control = Vec::new();
        let mut others: Vec<Vec<Stmt>> = Vec::new();
        for idx in groups.values() {
            let g: Vec<Stmt> = idx.iter().map(|&i| body[i].clone()).collect();
            if g.iter().any(|s| s.mentions(reg)) {
                control.extend(idx.iter().copied());
            } else {
                others.push(g);
            }
        }
        let movable = others.iter().filter(|g| !self.is_tally(g)).count();
        if others.len() < 2 || movable == 0 {
            return vec![Stmt::While(reg.to_string(), body)];
        }
        control.sort_unstable();
        let mut head: Vec<Stmt> = control.iter().map(|&i| body[i].clone()).collect();
        let mut tails = Vec::new();
        for g in others {
            if self.is_tally(&g) {
                head.extend(g);
                continue;
            }
            let c = self.fresh_counter();
            head.push(Stmt::Op(Instr::Inc(c.clone())));
            let mut tb = vec![Stmt::Op(Instr::Dec(c.clone()))];
            tb.extend(g);
            tails.push(Stmt::While(c, tb));
        }
        let mut out = vec![Stmt::While(reg.to_string(), head)];
        out.extend(tails);
        out
    }

    fn pass_roll(&self, block: Vec<Stmt>) -> (Vec<Stmt>, bool) {
        let mut changed = false;
        let inner: Vec<Stmt> = block
            .into_iter()
            .map(|s| match s {
                Stmt::While(r, b) => {
                    let (b, c) = self.pass_roll(b);
                    changed |= c;
                    Stmt::While(r, b)
                }
                Stmt::If(r, b) => {
                    let (b, c) = self.pass_roll(b);
                    changed |= c;
                    Stmt::If(r, b)
                }
                op => op,
            })
            .collect();
        let (out, c) = self.roll(inner);
        (out, changed | c)
    }

    fn pass_fission(&mut self, block: Vec<Stmt>) -> (Vec<Stmt>, bool) {
        let mut changed = false;
        let mut out = Vec::new();
        for s in block {
            match s {
                Stmt::While(r, b) => {
                    let (b, c) = self.pass_fission(b);
                    changed |= c;
                    let before = b.len();
                    let repl = self.fission(&r, b);
                    changed |= repl.len() > 1 || matches!(&repl[..], [Stmt::While(_, nb)] if nb.len() != before);
                    out.extend(repl);
                }
                Stmt::If(r, b) => {
                    let (b, c) = self.pass_fission(b);
                    changed |= c;
                    out.push(Stmt::If(r, b));
                }
                op => out.push(op),
            }
        }
        (out, changed)
    }

    /// Rule 4: a canonical topological order of each block, children first.
    /// Keys hide the names of non-fixed registers; ties are split by where
    /// else those registers occur, so the order does not depend on names.
    fn pass_order(&self, block: Vec<Stmt>, whole: &[Stmt]) -> Vec<Stmt> {
        let block: Vec<Stmt> = block
            .into_iter()
            .map(|s| match s {
                Stmt::While(r, b) => Stmt::While(r, self.pass_order(b, whole)),
                Stmt::If(r, b) => Stmt::If(r, self.pass_order(b, whole)),
                op => op,
            })
            .collect();
        let anon = |r: &str| self.anon(r);
        let mut nodes: Vec<&Stmt> = Vec::new();
        for s in whole {
            s.visit(&mut |n| nodes.push(n));
        }
        let own = |n: &Stmt, r: &str| match n {
            Stmt::Op(Instr::SetZero(x) | Instr::Inc(x) | Instr::Dec(x)) => x == r,
            Stmt::While(x, _) | Stmt::If(x, _) => x == r,
            Stmt::Op(_) => false,
        };
        let profile = |r: &str| {
            let mut p: Vec<String> = nodes.iter().filter(|n| own(n, r)).map(|n| n.text(&anon)).collect();
            p.sort();
            p
        };
        let key = |s: &Stmt| {
            let mut regs = Vec::new();
            s.registers_in_order(&mut regs);
            let profiles: Vec<Vec<String>> =
                regs.iter().filter(|r| !self.fixed.contains(*r)).map(|r| profile(r)).collect();
            (s.text(&anon), profiles)
        };
        let keys: Vec<_> = block.iter().map(key).collect();
        let n = block.len();
        let mut placed = vec![false; n];
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let ready = (0..n).filter(|&j| !placed[j] && (0..j).all(|i| placed[i] || !conflict(&block[i], &block[j])));
            let pick = ready.min_by(|&a, &b| keys[a].cmp(&keys[b]).then(a.cmp(&b))).expect("acyclic order");
            placed[pick] = true;
            out.push(block[pick].clone());
        }
        out
    }
}

fn rename_map(order: &[String], p: &RegProgram) -> HashMap<String, String> {
    let mut map = HashMap::new();
    for (i, x) in p.inputs().iter().enumerate() {
        map.insert(x.clone(), format!("X{}", i + 1));
    }
    for (i, y) in p.outputs().iter().enumerate() {
        map.insert(y.clone(), format!("Y{}", i + 1));
    }
    let mut next: HashMap<char, usize> =
        [('X', p.inputs().len() + 1), ('Y', p.outputs().len() + 1), ('W', 1)].into_iter().collect();
    for r in order {
        if map.contains_key(r) {
            continue;
        }
        let role = r.chars().next().expect("register name");
        let k = next.get_mut(&role).expect("register role");
        map.insert(r.clone(), format!("{role}{k}"));
        *k += 1;
    }
    map
}

struct Emitter {
    instrs: Vec<Instr>,
    labels: BTreeMap<String, usize>,
    next: usize,
}

impl Emitter {
    fn label(&mut self) -> String {
        self.next += 1;
        format!("L{}", self.next)
    }

    fn block(&mut self, b: &[Stmt]) {
        for s in b {
            match s {
                Stmt::Op(i) => self.instrs.push(i.clone()),
                Stmt::If(r, body) => {
                    let end = self.label();
                    self.instrs.push(Instr::IfZeroGoto(r.clone(), end.clone()));
                    self.block(body);
                    self.labels.insert(end, self.instrs.len());
                }
                Stmt::While(r, body) => {
                    let (top, end) = (self.label(), self.label());
                    self.labels.insert(top.clone(), self.instrs.len());
                    self.instrs.push(Instr::IfZeroGoto(r.clone(), end.clone()));
                    self.block(body);
                    self.instrs.push(Instr::IfZeroGoto("W0".into(), top));
                    self.labels.insert(end, self.instrs.len());
                }
            }
        }
    }
}

fn finish(program: RegProgram, structured: bool) -> NormalForm {
    let digest = hex::encode(Sha256::digest(program.to_string().as_bytes()));
    NormalForm { program, digest, structured }
}

/// Renames registers by position or first use and labels by position, on
/// the flat instruction list.
fn rename_flat(p: &RegProgram) -> Result<RegProgram> {
    let mut order = Vec::new();
    for i in p.instrs() {
        let regs: Vec<&String> = match i {
            Instr::SetZero(r) | Instr::Inc(r) | Instr::Dec(r) | Instr::IfZeroGoto(r, _) => vec![r],
            Instr::Call { args, rets, .. } => args.iter().chain(rets).collect(),
        };
        for r in regs {
            if !order.contains(r) {
                order.push(r.clone());
            }
        }
    }
    let map = rename_map(&order, p);
    let mut positions: Vec<(usize, &String)> = p.labels().iter().map(|(l, &n)| (n, l)).collect();
    positions.sort();
    let lmap: HashMap<&String, String> = positions.iter().enumerate().map(|(k, (_, l))| (*l, format!("L{}", k + 1))).collect();
    let instrs = p
        .instrs()
        .iter()
        .map(|i| match i {
            Instr::SetZero(r) => Instr::SetZero(map[r].clone()),
            Instr::Inc(r) => Instr::Inc(map[r].clone()),
            Instr::Dec(r) => Instr::Dec(map[r].clone()),
            Instr::IfZeroGoto(r, l) => Instr::IfZeroGoto(map[r].clone(), lmap[l].clone()),
            Instr::Call { .. } => unreachable!("checked before"),
        })
        .collect();
    let labels = p.labels().iter().map(|(l, &n)| (lmap[l].clone(), n)).collect();
    let ins = p.inputs().iter().map(|r| map[r].clone()).collect();
    let outs = p.outputs().iter().map(|r| map[r].clone()).collect();
    RegProgram::new(instrs, labels, ins, outs)
}

pub fn normalize(p: &RegProgram) -> Result<NormalForm> {
    normalize_with(p, RewriteSet::default())
}

pub fn normalize_with(p: &RegProgram, rules: RewriteSet) -> Result<NormalForm> {
    check_supported(p)?;
    let Some(block) = structure(p) else {
        let q = if rules.rename { rename_flat(p)? } else { p.clone() };
        return Ok(finish(q, false));
    };
    // Position renaming of the interface first, so keys can show it.
    let sig = rename_map(&[], p);
    let show_sig = |r: &str| sig.get(r).cloned().unwrap_or_else(|| r.to_string());
    let mut block: Vec<Stmt> = if rules.rename { block.iter().map(|s| s.rename(&show_sig)).collect() } else { block };
    let fixed: BTreeSet<String> = if rules.rename {
        sig.values().cloned().collect()
    } else {
        p.inputs().iter().chain(p.outputs()).cloned().collect()
    };
    let mut taken = BTreeSet::new();
    for s in &block {
        s.visit(&mut |n| {
            let mut regs = Vec::new();
            n.registers_in_order(&mut regs);
            taken.extend(regs);
        });
    }
    let mut nz = Normalizer { fixed, fresh: 0, taken };
    // Rolling compares bodies literally, so it runs to a fixpoint with
    // ordering before fission introduces fresh counters.
    loop {
        if rules.reorder {
            let snapshot = block.clone();
            block = nz.pass_order(block, &snapshot);
        }
        let changed = if rules.loop_boundary {
            let (b, c) = nz.pass_roll(block);
            block = b;
            c
        } else {
            false
        };
        if !changed {
            break;
        }
    }
    if rules.fission {
        loop {
            let (b, c) = nz.pass_fission(block);
            block = b;
            if !c {
                break;
            }
        }
    }
    if rules.reorder {
        let snapshot = block.clone();
        block = nz.pass_order(block, &snapshot);
    }
    let (inputs, outputs): (Vec<String>, Vec<String>) = if rules.rename {
        (
            (1..=p.inputs().len()).map(|i| format!("X{i}")).collect(),
            (1..=p.outputs().len()).map(|i| format!("Y{i}")).collect(),
        )
    } else {
        (p.inputs().to_vec(), p.outputs().to_vec())
    };
    if rules.rename {
        let mut order = inputs.iter().chain(&outputs).cloned().collect::<Vec<_>>();
        for s in &block {
            s.registers_in_order(&mut order);
        }
        let fake = RegProgram::new(Vec::new(), BTreeMap::new(), inputs.clone(), outputs.clone())?;
        let map = rename_map(&order, &fake);
        block = block.iter().map(|s| s.rename(&|r: &str| map[r].clone())).collect();
    }
    let mut e = Emitter { instrs: Vec::new(), labels: BTreeMap::new(), next: 0 };
    e.block(&block);
    let program = RegProgram::new(e.instrs, e.labels, inputs, outputs)?;
    Ok(finish(program, true))
}

pub fn same_algorithm(p1: &RegProgram, p2: &RegProgram) -> Result<bool> {
    Ok(normalize(p1)?.digest == normalize(p2)?.digest)
}

pub fn algorithm_to_function(nf: &NormalForm) -> BlackBoxFunction {
    reg_semantics(&nf.program, None).with_name(format!("alg:{}", &nf.digest[..12]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::Fuel;
    use crate::regmachine::{parse_rm, run_reg};
    use num_bigint::BigUint;

    const ADD: &str = "inputs X1 X2\noutputs Y1\n\
        Y1 = 0\n\
        c: if X1 = 0 goto m\n X1 = X1 - 1\n Y1 = Y1 + 1\n if W1 = 0 goto c\n\
        m: if X2 = 0 goto e\n X2 = X2 - 1\n Y1 = Y1 + 1\n if W1 = 0 goto m\n\
        e:\n";
    const ADD_RENAMED: &str = "inputs Xa Xb\noutputs Yout\n\
        Yout = 0\n\
        top: if Xa = 0 goto mid\n Xa = Xa - 1\n Yout = Yout + 1\n if Wz = 0 goto top\n\
        mid: if Xb = 0 goto done\n Xb = Xb - 1\n Yout = Yout + 1\n if Wz = 0 goto mid\n\
        done:\n";
    // Same function as ADD, moving X2 into X1 first.
    const ADD_VIA_X1: &str = "inputs X1 X2\noutputs Y1\n\
        Y1 = 0\n\
        a: if X2 = 0 goto b\n X2 = X2 - 1\n X1 = X1 + 1\n if W1 = 0 goto a\n\
        b: if X1 = 0 goto e\n X1 = X1 - 1\n Y1 = Y1 + 1\n if W1 = 0 goto b\n\
        e:\n";
    const MOVE: &str = "inputs X1\noutputs Y1\n\
        c: if X1 = 0 goto e\n X1 = X1 - 1\n Y1 = Y1 + 1\n if W1 = 0 goto c\ne:\n";
    const MOVE_PEELED_EXIT: &str = "inputs X1\noutputs Y1\n\
        if X1 = 0 goto e\n X1 = X1 - 1\n Y1 = Y1 + 1\n\
        c: if X1 = 0 goto e\n X1 = X1 - 1\n Y1 = Y1 + 1\n if W1 = 0 goto c\ne:\n";
    const MOVE_PEELED_HEAD: &str = "inputs X1\noutputs Y1\n\
        if X1 = 0 goto c\n Y1 = Y1 + 1\n X1 = X1 - 1\n\
        c: if X1 = 0 goto e\n X1 = X1 - 1\n Y1 = Y1 + 1\n if W1 = 0 goto c\ne:\n";
    const DUP_FUSED: &str = "inputs X1\noutputs Y1 Y2\n\
        Y1 = 0\nY2 = 0\n\
        c: if X1 = 0 goto e\n X1 = X1 - 1\n Y1 = Y1 + 1\n Y2 = Y2 + 1\n if W9 = 0 goto c\ne:\n";
    const DUP_SPLIT: &str = "inputs X1\noutputs Y1 Y2\n\
        Y2 = 0\nY1 = 0\n\
        c: if X1 = 0 goto d\n X1 = X1 - 1\n W2 = W2 + 1\n W1 = W1 + 1\n if W9 = 0 goto c\n\
        d: if W1 = 0 goto f\n W1 = W1 - 1\n Y2 = Y2 + 1\n if W9 = 0 goto d\n\
        f: if W2 = 0 goto e\n W2 = W2 - 1\n Y1 = Y1 + 1\n if W9 = 0 goto f\ne:\n";
    const DUP_HALF: &str = "inputs X1\noutputs Y1 Y2\n\
        Y1 = 0\nY2 = 0\n\
        c: if X1 = 0 goto d\n X1 = X1 - 1\n Y1 = Y1 + 1\n Wc = Wc + 1\n if W0 = 0 goto c\n\
        d: if Wc = 0 goto e\n Wc = Wc - 1\n Y2 = Y2 + 1\n if W0 = 0 goto d\ne:\n";
    const MULT: &str = "inputs X1 X2\noutputs Y1\n\
        Y1 = 0\n\
        o: if X1 = 0 goto e\n X1 = X1 - 1\n\
        i: if X2 = 0 goto r\n X2 = X2 - 1\n Y1 = Y1 + 1\n W1 = W1 + 1\n if W0 = 0 goto i\n\
        r: if W1 = 0 goto n\n W1 = W1 - 1\n X2 = X2 + 1\n if W0 = 0 goto r\n\
        n: if W0 = 0 goto o\ne:\n";
    // Leaves early through an unconditional jump, which is not structured.
    const EARLY: &str = "inputs X1\noutputs Y1\n\
        if X1 = 0 goto z\n Y1 = Y1 + 1\n if W1 = 0 goto e\nz: Y1 = Y1 + 1\n Y1 = Y1 + 1\ne:\n";
    const EARLY_RENAMED: &str = "inputs Xq\noutputs Yq\n\
        if Xq = 0 goto zero\n Yq = Yq + 1\n if Wj = 0 goto out\nzero: Yq = Yq + 1\n Yq = Yq + 1\nout:\n";

    const CORPUS: &[&str] = &[
        ADD, ADD_RENAMED, ADD_VIA_X1, MOVE, MOVE_PEELED_EXIT, MOVE_PEELED_HEAD, DUP_FUSED, DUP_SPLIT, DUP_HALF, MULT,
        EARLY, EARLY_RENAMED,
    ];

    fn nf(text: &str) -> NormalForm {
        normalize(&parse_rm(text).unwrap()).unwrap()
    }

    fn run(p: &RegProgram, xs: &[u64]) -> Vec<BigUint> {
        let xs: Vec<BigUint> = xs.iter().map(|&x| BigUint::from(x)).collect();
        run_reg(p, &xs, Fuel(1_000_000), None).unwrap().outputs().cloned().expect("halts")
    }

    fn inputs_up_to(arity: usize, max: u64) -> Vec<Vec<u64>> {
        let mut all = vec![vec![]];
        for _ in 0..arity {
            all = all.into_iter().flat_map(|v| (0..=max).map(move |x| [v.clone(), vec![x]].concat())).collect();
        }
        all
    }

    #[test]
    fn renaming_only_differences_vanish() {
        assert_eq!(nf(ADD).digest, nf(ADD_RENAMED).digest);
        assert_eq!(nf(EARLY).digest, nf(EARLY_RENAMED).digest);
        assert!(!nf(EARLY).structured);
    }

    #[test]
    fn peeled_iteration_rolls_back() {
        let d = nf(MOVE).digest;
        assert_eq!(nf(MOVE_PEELED_EXIT).digest, d);
        assert_eq!(nf(MOVE_PEELED_HEAD).digest, d);
        let off = RewriteSet { loop_boundary: false, ..RewriteSet::default() };
        let raw = normalize_with(&parse_rm(MOVE_PEELED_EXIT).unwrap(), off).unwrap();
        assert_ne!(raw.digest, d);
    }

    #[test]
    fn fused_and_split_loops_agree() {
        let d = nf(DUP_FUSED).digest;
        assert_eq!(nf(DUP_SPLIT).digest, d);
        assert_eq!(nf(DUP_HALF).digest, d);
        let off = RewriteSet { fission: false, ..RewriteSet::default() };
        let fused = normalize_with(&parse_rm(DUP_FUSED).unwrap(), off).unwrap();
        let split = normalize_with(&parse_rm(DUP_SPLIT).unwrap(), off).unwrap();
        assert_ne!(fused.digest, split.digest);
    }

    #[test]
    fn independent_statements_commute() {
        let a = "inputs X1\noutputs Y1 Y2\nY1 = Y1 + 1\nY2 = 0\nY2 = Y2 + 1\nY1 = Y1 + 1\n";
        let b = "inputs X1\noutputs Y1 Y2\nY2 = 0\nY1 = Y1 + 1\nY1 = Y1 + 1\nY2 = Y2 + 1\n";
        let c = "inputs X1\noutputs Y1 Y2\nY2 = Y2 + 1\nY2 = 0\nY1 = Y1 + 1\nY1 = Y1 + 1\n";
        assert_eq!(nf(a).digest, nf(b).digest);
        // Y2 = Y2 + 1 before Y2 = 0 is a different program.
        assert_ne!(nf(a).digest, nf(c).digest);
        let g = dependence_graph(&parse_rm(a).unwrap()).unwrap();
        assert_eq!(g.edges, vec![(0, 3), (1, 2)]);
    }

    #[test]
    fn normal_forms_compute_the_same_function() {
        for text in CORPUS {
            let p = parse_rm(text).unwrap();
            let n = nf(text);
            for xs in inputs_up_to(p.inputs().len(), 6) {
                assert_eq!(run(&p, &xs), run(&n.program, &xs), "{text} on {xs:?}\n{}", n.program);
            }
        }
    }

    #[test]
    fn normalization_is_idempotent() {
        for text in CORPUS {
            let n = nf(text);
            let again = normalize(&n.program).unwrap();
            assert_eq!(again.program, n.program, "{text}");
            assert_eq!(again.digest, n.digest);
        }
    }

    #[test]
    fn same_algorithm_is_an_equivalence() {
        let ps: Vec<RegProgram> = CORPUS.iter().map(|t| parse_rm(t).unwrap()).collect();
        let rel = |i: usize, j: usize| same_algorithm(&ps[i], &ps[j]).unwrap();
        for i in 0..ps.len() {
            assert!(rel(i, i));
            for j in 0..ps.len() {
                assert_eq!(rel(i, j), rel(j, i));
                for k in 0..ps.len() {
                    if rel(i, j) && rel(j, k) {
                        assert!(rel(i, k));
                    }
                }
            }
        }
        let classes: BTreeSet<String> = CORPUS.iter().map(|t| nf(t).digest).collect();
        assert_eq!(classes.len(), 6);
    }

    #[test]
    fn same_function_different_algorithm() {
        let (a, b) = (parse_rm(ADD).unwrap(), parse_rm(ADD_VIA_X1).unwrap());
        assert!(!same_algorithm(&a, &b).unwrap());
        let (fa, fb) = (algorithm_to_function(&nf(ADD)), algorithm_to_function(&nf(ADD_VIA_X1)));
        for xs in inputs_up_to(2, 6) {
            let w: Vec<_> = xs.iter().map(|&x| crate::base::Word::unary(x as usize)).collect();
            let out = fa.evaluate(&w, Fuel(100_000)).outputs().cloned();
            assert!(out.is_some());
            assert_eq!(out, fb.evaluate(&w, Fuel(100_000)).outputs().cloned());
        }
    }

    #[test]
    fn calls_are_rejected() {
        let p = parse_rm("inputs X1\noutputs Y1\ncall #0 (X1)->(Y1)\n").unwrap();
        assert!(matches!(normalize(&p), Err(Error::Unsupported(_))));
    }
}

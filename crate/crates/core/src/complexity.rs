//! Resource metering, worst-case curves, symbolic growth classes and a
//! Savitch-style space-bounded reachability search.
//!
//! Everything here is measured on finitely many inputs. A curve that fits a
//! growth class "fits within the measured range"; it is never a proof of
//! membership.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::base::{behaviorally_equivalent, Alphabet, BlackBoxFunction, Fuel, RunOutcome, Verdict, Word};
use crate::computability::{Instance, Reduction};
use crate::error::{Error, Result};
use crate::turing::{Configuration, MachineBuilder, Move, Sym, Tape, TuringMachine, Write, BLANK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Resource {
    Time,
    Space,
}

impl FromStr for Resource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "time" => Ok(Resource::Time),
            "space" => Ok(Resource::Space),
            other => Err(Error::Shape(format!("unknown resource {other:?}"))),
        }
    }
}

/// One metered run. `time` is the step count and `space` the cells (or
/// registers, or stack entries) the model reports as used. An incomplete
/// sample ran out of fuel: its time is the fuel spent and its space is 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResourceSample {
    pub machine: String,
    pub input: Vec<String>,
    pub time: u64,
    pub space: u64,
    pub complete: bool,
}

impl ResourceSample {
    pub fn get(&self, r: Resource) -> u64 {
        match r {
            Resource::Time => self.time,
            Resource::Space => self.space,
        }
    }
}

pub fn meter(f: &BlackBoxFunction, inputs: &[Word], fuel: Fuel) -> ResourceSample {
    let input = inputs.iter().map(Word::to_string).collect();
    let (time, space, complete) = match f.evaluate(inputs, fuel) {
        RunOutcome::Halted { steps_used, cells_used, .. } | RunOutcome::Rejected { steps_used, cells_used } => {
            (steps_used, cells_used, true)
        }
        RunOutcome::FuelExhausted => (fuel.0, 0, false),
    };
    ResourceSample { machine: f.name().to_string(), input, time, space, complete }
}

/// Worst case per total input length, for `n = 0..=n_max`. Machines without
/// inputs have the single point `n = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WorstCaseCurve {
    pub machine: String,
    pub resource: Resource,
    pub points: Vec<(usize, u64)>,
}

impl WorstCaseCurve {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total(&self) -> u128 {
        self.points.iter().map(|&(_, v)| u128::from(v)).sum()
    }

    pub fn at(&self, n: usize) -> Option<u64> {
        self.points.iter().find(|&&(m, _)| m == n).map(|&(_, v)| v)
    }
}

/// Both resources at once, per length: `(n, time_max, space_max)`.
pub fn worst_case_table(
    f: &BlackBoxFunction,
    n_max: usize,
    alphabet: &Alphabet,
    fuel: Fuel,
) -> Result<Vec<(usize, u64, u64)>> {
    let top = if f.arity_in() == 0 { 0 } else { n_max };
    let inputs = alphabet.tuples_up_to(f.arity_in(), top);
    let samples = meter_all(f, &inputs, fuel);
    let mut rows: Vec<(usize, u64, u64)> = (0..=top).map(|n| (n, 0, 0)).collect();
    for (x, s) in inputs.iter().zip(&samples) {
        if !s.complete {
            let shown: Vec<String> = x.iter().map(|w| format!("{w:?}")).collect();
            return Err(Error::Resource(format!(
                "{} ran out of {} steps on ({}); not total at this scale",
                f.name(),
                fuel.0,
                shown.join(", ")
            )));
        }
        let n: usize = x.iter().map(Word::len).sum();
        let row = &mut rows[n];
        row.1 = row.1.max(s.time);
        row.2 = row.2.max(s.space);
    }
    Ok(rows)
}

pub fn worst_case(
    f: &BlackBoxFunction,
    resource: Resource,
    n_max: usize,
    alphabet: &Alphabet,
    fuel: Fuel,
) -> Result<WorstCaseCurve> {
    let rows = worst_case_table(f, n_max, alphabet, fuel)?;
    let points = rows
        .into_iter()
        .map(|(n, t, s)| (n, if resource == Resource::Time { t } else { s }))
        .collect();
    Ok(WorstCaseCurve { machine: f.name().to_string(), resource, points })
}

/// Meters every input, spread over the available threads. Results come back
/// in input order, so the merge does not depend on scheduling.
fn meter_all(f: &BlackBoxFunction, inputs: &[Vec<Word>], fuel: Fuel) -> Vec<ResourceSample> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(inputs.len().max(1));
    if workers <= 1 {
        return inputs.iter().map(|x| meter(f, x, fuel)).collect();
    }
    let chunk = inputs.len().div_ceil(workers);
    std::thread::scope(|scope| {
        let handles: Vec<_> = inputs
            .chunks(chunk)
            .map(|part| scope.spawn(move || part.iter().map(|x| meter(f, x, fuel)).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("metering worker")).collect()
    })
}

/// Symbolic growth forms. `Exp(b)` needs `b ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum GrowthClass {
    Const(u64),
    Log,
    Poly(u32),
    Exp(u32),
}

impl GrowthClass {
    /// Position in the order Const < Log < Poly(1) < Poly(2) < … < Exp(2) < Exp(3) < ….
    fn rank(self) -> (u8, u32) {
        match self {
            GrowthClass::Const(_) | GrowthClass::Poly(0) => (0, 0),
            GrowthClass::Log => (1, 0),
            GrowthClass::Poly(d) => (2, d),
            GrowthClass::Exp(b) => (3, b),
        }
    }

    pub fn validate(self) -> Result<()> {
        match self {
            GrowthClass::Exp(b) if b < 2 => Err(Error::Shape(format!("exponential base {b} must be at least 2"))),
            _ => Ok(()),
        }
    }

    /// The reference function: `c`, `log2 n`, `n^d`, `b^n`, with `n` read as
    /// at least 1 (at least 2 for the logarithm) so small lengths are not
    /// compared against 0.
    pub fn eval(self, n: usize) -> f64 {
        let x = n as f64;
        match self {
            GrowthClass::Const(c) => c as f64,
            GrowthClass::Log => x.max(2.0).log2(),
            GrowthClass::Poly(d) => x.max(1.0).powi(d as i32),
            GrowthClass::Exp(b) => f64::from(b).powf(x),
        }
    }
}

impl fmt::Display for GrowthClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthClass::Const(c) => write!(f, "const:{c}"),
            GrowthClass::Log => f.write_str("log"),
            GrowthClass::Poly(d) => write!(f, "poly:{d}"),
            GrowthClass::Exp(b) => write!(f, "exp:{b}"),
        }
    }
}

impl FromStr for GrowthClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Shape(format!("growth class {s:?}: expected const:C, log, poly:D or exp:B"));
        let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
        let g = match (kind, arg) {
            ("log", "") => GrowthClass::Log,
            ("const", a) => GrowthClass::Const(a.parse().map_err(|_| bad())?),
            ("poly", a) => GrowthClass::Poly(a.parse().map_err(|_| bad())?),
            ("exp", a) => GrowthClass::Exp(a.parse().map_err(|_| bad())?),
            _ => return Err(bad()),
        };
        g.validate()?;
        Ok(g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GrowthComparison {
    pub big_o: bool,
    pub theta: bool,
}

pub fn compare_growth(g1: GrowthClass, g2: GrowthClass) -> GrowthComparison {
    let (a, b) = (g1.rank(), g2.rank());
    GrowthComparison { big_o: a <= b, theta: a == b }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Fit {
    /// Every measured point is within `slack · g(n)`.
    Fits,
    /// The first measured point above the bound.
    Violated { n: usize, value: u64 },
}

impl Fit {
    pub fn fits(&self) -> bool {
        matches!(self, Fit::Fits)
    }
}

/// Empirical falsification check: `curve(n) ≤ slack · g(n)` on every
/// measured `n`.
pub fn classify(curve: &WorstCaseCurve, g: GrowthClass, slack: f64) -> Result<Fit> {
    if curve.is_empty() {
        return Err(Error::Shape("cannot classify an empty curve".into()));
    }
    g.validate()?;
    for &(n, v) in &curve.points {
        if v as f64 > slack * g.eval(n) {
            return Ok(Fit::Violated { n, value: v });
        }
    }
    Ok(Fit::Fits)
}

/// Least-squares polynomial through `points`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolyFit {
    /// Lowest degree first.
    pub coefficients: Vec<f64>,
    pub max_residual: f64,
    /// Largest `|residual| / |y|` over points with `y ≠ 0`.
    pub max_relative_residual: f64,
}

impl PolyFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

pub fn fit_polynomial(points: &[(f64, f64)], degree: usize) -> Result<PolyFit> {
    let k = degree + 1;
    if points.len() < k {
        return Err(Error::Shape(format!("{} points cannot determine a degree-{degree} fit", points.len())));
    }
    // Normal equations, solved by Gaussian elimination with partial pivoting.
    let mut a = vec![vec![0.0f64; k + 1]; k];
    for &(x, y) in points {
        let pows: Vec<f64> = (0..2 * k).map(|e| x.powi(e as i32)).collect();
        for (i, row) in a.iter_mut().enumerate() {
            for j in 0..k {
                row[j] += pows[i + j];
            }
            row[k] += pows[i] * y;
        }
    }
    for col in 0..k {
        let piv = (col..k)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty range");
        if a[piv][col].abs() < 1e-12 {
            return Err(Error::Shape("points do not determine a unique fit".into()));
        }
        a.swap(col, piv);
        for r in 0..k {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=k {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    let coefficients: Vec<f64> = (0..k).map(|i| a[i][k] / a[i][i]).collect();
    let mut fit = PolyFit { coefficients, max_residual: 0.0, max_relative_residual: 0.0 };
    for &(x, y) in points {
        let r = (fit.eval(x) - y).abs();
        fit.max_residual = fit.max_residual.max(r);
        if y != 0.0 {
            fit.max_relative_residual = fit.max_relative_residual.max(r / y.abs());
        }
    }
    Ok(fit)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegistryMinimum {
    pub function: String,
    pub machine: String,
    pub curve: WorstCaseCurve,
}

/// The cheapest implementation of `function` among `registry`, a stand-in
/// for the minimum over all machines computing it, which is not computable.
/// Curves are compared by their sum over the measured lengths, ties broken
/// by machine name.
pub fn min_over_registry(
    function: &str,
    registry: &[BlackBoxFunction],
    resource: Resource,
    n_max: usize,
    alphabet: &Alphabet,
    fuel: Fuel,
) -> Result<RegistryMinimum> {
    let first = registry.first().ok_or_else(|| Error::Shape("empty registry".into()))?;
    for other in &registry[1..] {
        let rep = behaviorally_equivalent(first, other, alphabet, n_max, fuel)?;
        if let Verdict::Counterexample(x) = &rep.verdict {
            let shown: Vec<String> = x.iter().map(|w| format!("{w:?}")).collect();
            return Err(Error::Equivalence(format!(
                "{} and {} disagree on ({}), so they do not both implement {function}",
                first.name(),
                other.name(),
                shown.join(", ")
            )));
        }
        if !rep.inconclusive.is_empty() {
            return Err(Error::Resource(format!(
                "{} vs {}: {} inputs ran out of fuel",
                first.name(),
                other.name(),
                rep.inconclusive.len()
            )));
        }
    }
    let mut best: Option<WorstCaseCurve> = None;
    for f in registry {
        let c = worst_case(f, resource, n_max, alphabet, fuel)?;
        let better = match &best {
            None => true,
            Some(b) => (c.total(), &c.machine) < (b.total(), &b.machine),
        };
        if better {
            best = Some(c);
        }
    }
    let curve = best.expect("non-empty registry");
    Ok(RegistryMinimum { function: function.to_string(), machine: curve.machine.clone(), curve })
}

/// Size of a reduction instance: glyphs of the word plus bytes of each
/// machine number.
pub fn instance_size(i: &Instance) -> usize {
    let bytes = |y: &num_bigint::BigUint| y.bits().div_ceil(8) as usize;
    match i {
        Instance::Halt { x, y } => x.len() + bytes(y),
        Instance::Machine(y) => bytes(y),
        Instance::Pair(a, b) => bytes(a) + bytes(b),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolyReductionReport {
    pub reduction: String,
    pub degree: u32,
    pub slack: f64,
    /// `(instance size, metered work)` per corpus instance.
    pub points: Vec<(usize, u64)>,
    pub violation: Option<(usize, u64)>,
}

impl PolyReductionReport {
    /// Empirical: no corpus instance exceeded the claimed bound.
    pub fn certified(&self) -> bool {
        self.violation.is_none()
    }
}

/// Meters `r`'s transform on `corpus` and checks `work ≤ slack · max(n,1)^degree`.
pub fn poly_reduction(r: &Reduction, corpus: &[Instance], degree: u32, slack: f64) -> Result<PolyReductionReport> {
    let bound = GrowthClass::Poly(degree);
    let mut points = Vec::with_capacity(corpus.len());
    let mut violation = None;
    for i in corpus {
        let (_, work) = r.apply_metered(i)?;
        let n = instance_size(i);
        points.push((n, work));
        if violation.is_none() && work as f64 > slack * bound.eval(n) {
            violation = Some((n, work));
        }
    }
    Ok(PolyReductionReport { reduction: r.name.clone(), degree, slack, points, violation })
}

/// Default cap on the number of configurations [`savitch_reach`] will
/// consider.
pub const SAVITCH_BUDGET: u64 = 200_000;

/// Storage accounting for one [`savitch_reach`] call.
///
/// A frame holds the two endpoints, the current middle and the level. A
/// configuration is stored at fixed width: one cell for the state, one per
/// head, and `space_bound` cells per work or output tape (the input is read
/// in place). `peak_cells` is the largest number of such cells held by the
/// recursion stack at any moment.
///
/// The search also keeps a table of answered subqueries and the successor
/// lists of visited configurations. Those trade space for time and are
/// reported separately in `memo_entries`; they are not part of the
/// recursion's storage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpaceReport {
    pub accepts: bool,
    pub space_bound: usize,
    /// Size of the enumerated configuration domain.
    pub configurations: u64,
    /// Paths of length up to `2^levels` are searched.
    pub levels: u32,
    pub max_depth: u32,
    pub frame_cells: u64,
    pub peak_cells: u64,
    pub calls: u64,
    pub memo_entries: u64,
    pub accepting_targets: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Shape {
    state: usize,
    heads: Vec<usize>,
    /// Trimmed content lengths of the tapes after the input.
    lens: Vec<usize>,
}

struct Domain<'a> {
    m: &'a TuringMachine,
    input: Vec<Sym>,
    s: usize,
    /// Per bounded tape: symbols an inner cell may hold.
    inner: Vec<Vec<Sym>>,
    nonblank: Vec<Sym>,
    shapes: Vec<Shape>,
    index: HashMap<Shape, usize>,
    offsets: Vec<u64>,
    total: u64,
}

impl<'a> Domain<'a> {
    fn build(m: &'a TuringMachine, input: Vec<Sym>, s: usize, budget: u64) -> Result<Self> {
        let k = m.tape_count();
        let syms = m.tape_syms();
        let nonblank: Vec<Sym> = syms.iter().copied().filter(|&x| x != BLANK).collect();
        let inner: Vec<Vec<Sym>> = (1..k)
            .map(|t| {
                let blanks_written = m.rules().iter().any(|r| matches!(r.write[t], Write::Sym(BLANK)));
                if blanks_written {
                    syms.clone()
                } else {
                    nonblank.clone()
                }
            })
            .collect();
        let mut d = Domain {
            m,
            input,
            s,
            inner,
            nonblank,
            shapes: Vec::new(),
            index: HashMap::new(),
            offsets: Vec::new(),
            total: 0,
        };
        let init = Shape { state: m.start(), heads: vec![0; k], lens: vec![0; k - 1] };
        let mut queue = VecDeque::from([init.clone()]);
        d.add_shape(init, budget)?;
        while let Some(sh) = queue.pop_front() {
            for next in d.abstract_successors(&sh) {
                if !d.index.contains_key(&next) {
                    d.add_shape(next.clone(), budget)?;
                    queue.push_back(next);
                }
            }
        }
        Ok(d)
    }

    fn add_shape(&mut self, sh: Shape, budget: u64) -> Result<()> {
        let count = sh.lens.iter().enumerate().fold(1u64, |acc, (t, &len)| {
            let c = if len == 0 {
                1
            } else {
                (self.inner[t].len() as u64).saturating_pow(len as u32 - 1).saturating_mul(self.nonblank.len() as u64)
            };
            acc.saturating_mul(c)
        });
        self.offsets.push(self.total);
        self.total = self.total.saturating_add(count);
        if self.total > budget {
            return Err(Error::Resource(format!(
                "more than {budget} configurations within space {}; raise the budget or lower the bound",
                self.s
            )));
        }
        self.index.insert(sh.clone(), self.shapes.len());
        self.shapes.push(sh);
        Ok(())
    }

    fn in_bounds(&self, heads: &[usize], lens: &[usize]) -> bool {
        heads[0] <= self.input.len() + 1 && heads[1..].iter().all(|&h| h <= self.s) && lens.iter().all(|&l| l <= self.s)
    }

    /// Shapes reachable in one step from some configuration of shape `sh`.
    fn abstract_successors(&self, sh: &Shape) -> Vec<Shape> {
        let mut out = Vec::new();
        let scanned_input = self.input.get(sh.heads[0]).copied().unwrap_or(BLANK);
        'rules: for r in self.m.rules().iter().filter(|r| r.from == sh.state) {
            if !r.read[0].matches(scanned_input) {
                continue;
            }
            // Per bounded tape, the possible new lengths.
            let mut len_choices: Vec<Vec<usize>> = Vec::with_capacity(sh.lens.len());
            for (b, &len) in sh.lens.iter().enumerate() {
                let t = b + 1;
                let head = sh.heads[t];
                let pat = &r.read[t];
                let readable = if head >= len {
                    pat.matches(BLANK)
                } else if head + 1 == len {
                    self.nonblank.iter().any(|&x| pat.matches(x))
                } else {
                    self.inner[b].iter().any(|&x| pat.matches(x))
                };
                if !readable {
                    continue 'rules;
                }
                let choices = match r.write[t] {
                    Write::Keep => vec![len],
                    Write::Sym(BLANK) if head + 1 == len => (0..len).collect(),
                    Write::Sym(BLANK) => vec![len],
                    Write::Sym(_) => vec![len.max(head + 1)],
                };
                len_choices.push(choices);
            }
            let heads: Vec<usize> = sh
                .heads
                .iter()
                .zip(&r.moves)
                .map(|(&h, &mv)| match mv {
                    Move::L => h.saturating_sub(1),
                    Move::R => h + 1,
                    Move::S => h,
                })
                .collect();
            let mut combos: Vec<Vec<usize>> = vec![Vec::new()];
            for choices in &len_choices {
                combos = combos
                    .into_iter()
                    .flat_map(|pre| {
                        choices.iter().map(move |&c| {
                            let mut v = pre.clone();
                            v.push(c);
                            v
                        })
                    })
                    .collect();
            }
            for lens in combos {
                if self.in_bounds(&heads, &lens) {
                    out.push(Shape { state: r.to, heads: heads.clone(), lens });
                }
            }
        }
        out
    }

    fn unrank(&self, i: u64) -> Configuration {
        let si = self.offsets.partition_point(|&o| o <= i) - 1;
        let sh = &self.shapes[si];
        let mut rest = i - self.offsets[si];
        let mut tapes = vec![Tape { cells: self.input.clone(), head: sh.heads[0] }];
        for (b, &len) in sh.lens.iter().enumerate() {
            let mut cells = Vec::with_capacity(len);
            for j in 0..len {
                let alphabet = if j + 1 == len { &self.nonblank } else { &self.inner[b] };
                let base = alphabet.len() as u64;
                cells.push(alphabet[(rest % base) as usize]);
                rest /= base;
            }
            tapes.push(Tape { cells, head: sh.heads[b + 1] });
        }
        Configuration { state: sh.state, tapes, steps: 0, queried: false }
    }

    fn rank(&self, c: &Configuration) -> Option<u64> {
        let sh = Shape {
            state: c.state,
            heads: c.tapes.iter().map(|t| t.head).collect(),
            lens: c.tapes[1..].iter().map(|t| t.cells.len()).collect(),
        };
        if !self.in_bounds(&sh.heads, &sh.lens) {
            return None;
        }
        let si = *self.index.get(&sh)?;
        // Mixed radix, first cell of the first bounded tape least significant.
        let mut digits: Vec<(u64, u64)> = Vec::new();
        for (b, t) in c.tapes[1..].iter().enumerate() {
            let len = t.cells.len();
            for (j, &x) in t.cells.iter().enumerate() {
                let alphabet = if j + 1 == len { &self.nonblank } else { &self.inner[b] };
                let d = alphabet.iter().position(|&a| a == x)? as u64;
                digits.push((d, alphabet.len() as u64));
            }
        }
        let mut r = 0u64;
        for &(d, base) in digits.iter().rev() {
            r = r * base + d;
        }
        Some(self.offsets[si] + r)
    }
}

struct Search<'a> {
    d: Domain<'a>,
    succ: HashMap<u64, Vec<u64>>,
    memo: Vec<HashMap<(u64, u64), bool>>,
    depth: u32,
    max_depth: u32,
    calls: u64,
}

impl Search<'_> {
    fn successors(&mut self, a: u64) -> &[u64] {
        if !self.succ.contains_key(&a) {
            let c = self.d.unrank(a);
            let mut next: Vec<u64> = self.d.m.step(&c).iter().filter_map(|n| self.d.rank(n)).collect();
            next.sort_unstable();
            next.dedup();
            self.succ.insert(a, next);
        }
        &self.succ[&a]
    }

    /// Is there a path from `a` to `b` of length at most `2^level`?
    fn reach(&mut self, a: u64, b: u64, level: u32) -> bool {
        self.calls += 1;
        if level == 0 {
            return a == b || self.successors(a).binary_search(&b).is_ok();
        }
        if let Some(&v) = self.memo[level as usize].get(&(a, b)) {
            return v;
        }
        self.depth += 1;
        self.max_depth = self.max_depth.max(self.depth);
        let mut found = false;
        for mid in 0..self.d.total {
            if self.reach(a, mid, level - 1) && self.reach(mid, b, level - 1) {
                found = true;
                break;
            }
        }
        self.depth -= 1;
        self.memo[level as usize].insert((a, b), found);
        found
    }
}

fn savitch_preconditions(m: &TuringMachine) -> Result<()> {
    if m.inputs() != 1 {
        return Err(Error::Shape(format!("space-bounded search takes 1-input machines, not {}", m.inputs())));
    }
    if m.oracle_port().is_some() {
        return Err(Error::Unsupported("oracle machines are outside space-bounded search".into()));
    }
    let rewrites_input = m.rules().iter().any(|r| match (&r.write[0], &r.read[0]) {
        (Write::Keep, _) => false,
        (Write::Sym(w), crate::turing::Pattern::Set(v)) => v.as_slice() != [*w],
        (Write::Sym(_), crate::turing::Pattern::Any) => true,
    });
    if rewrites_input {
        return Err(Error::Unsupported("the input tape must be read-only".into()));
    }
    Ok(())
}

/// Decides whether `m` accepts `x` using at most `s` cells on each tape
/// after the input (and keeping the input head within one cell past `x`),
/// by middle-first recursion: a path of length `≤ 2^ℓ` exists iff some
/// configuration splits it into two of length `≤ 2^(ℓ-1)`.
///
/// Middles range over every configuration whose control state, head
/// positions and content lengths are consistent with an abstract
/// reachability pass over the rules; contents range over all strings.
pub fn savitch_reach(m: &TuringMachine, x: &Word, s: usize) -> Result<(bool, SpaceReport)> {
    savitch_reach_with_budget(m, x, s, SAVITCH_BUDGET)
}

pub fn savitch_reach_with_budget(m: &TuringMachine, x: &Word, s: usize, budget: u64) -> Result<(bool, SpaceReport)> {
    savitch_preconditions(m)?;
    let init = m.initial_configuration(std::slice::from_ref(x))?;
    let input = init.tapes[0].cells.clone();
    let d = Domain::build(m, input, s, budget)?;
    let total = d.total;
    // A shortest path repeats no configuration, so `total - 1` steps suffice.
    let longest = total.saturating_sub(1);
    let levels = if longest <= 1 { 0 } else { 64 - (longest - 1).leading_zeros() };
    let k = m.tape_count() as u64;
    let frame_cells = 3 * (1 + k + (k - 1) * s as u64) + 1;
    let mut search = Search {
        d,
        succ: HashMap::new(),
        memo: vec![HashMap::new(); levels as usize + 1],
        depth: 0,
        max_depth: 0,
        calls: 0,
    };
    let start = search.d.rank(&init).expect("initial configuration is in the domain");
    let mut targets = 0u64;
    let mut accepts = false;
    for i in 0..total {
        let c = search.d.unrank(i);
        if m.is_accepting(c.state) && m.step(&c).is_empty() {
            targets += 1;
            if search.reach(start, i, levels) {
                accepts = true;
                break;
            }
        }
    }
    let memo_entries = search.memo.iter().map(|h| h.len() as u64).sum::<u64>() + search.succ.len() as u64;
    let report = SpaceReport {
        accepts,
        space_bound: s,
        configurations: total,
        levels,
        max_depth: search.max_depth,
        frame_cells,
        peak_cells: u64::from(search.max_depth) * frame_cells,
        calls: search.calls,
        memo_entries,
        accepting_targets: targets,
    };
    Ok((accepts, report))
}

/// Breadth-first exploration of the configuration graph with a visited set,
/// stopping at the first accepting halt. For rejected inputs this meters
/// the whole exploration, which is the cost this baseline assigns to them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BfsReport {
    pub accepts: bool,
    pub visited: u64,
}

pub fn bfs_explore(m: &TuringMachine, x: &Word, limit: u64) -> Result<BfsReport> {
    let init = m.initial_configuration(std::slice::from_ref(x))?;
    let key = |c: &Configuration| (c.state, c.tapes.clone());
    let mut seen = HashSet::from([key(&init)]);
    let mut queue = VecDeque::from([init]);
    while let Some(c) = queue.pop_front() {
        let next = m.step(&c);
        if next.is_empty() && m.is_accepting(c.state) {
            return Ok(BfsReport { accepts: true, visited: seen.len() as u64 });
        }
        for n in next {
            if seen.insert(key(&n)) {
                if seen.len() as u64 > limit {
                    return Err(Error::Resource(format!("breadth-first search passed {limit} configurations")));
                }
                queue.push_back(n);
            }
        }
    }
    Ok(BfsReport { accepts: false, visited: seen.len() as u64 })
}

/// 1 → 0 over `{0,1}`: guesses a word of length `s` on its work tape, one
/// cell per step under the input head, and remembers whether each guess
/// matched the input. Accepts exactly the words of length `s`, along a
/// single branch; every other branch carries a different guess.
pub fn guess_and_compare(s: usize) -> TuringMachine {
    let mut mb = MachineBuilder::new(Alphabet::binary(), 1, 1, 0).start("g0").accept("yes");
    for i in 0..s {
        for c in ['0', '1'] {
            for guess in ['0', '1'] {
                let ok = if c == guess { format!("g{}", i + 1) } else { format!("b{}", i + 1) };
                mb = mb.rule(&format!("g{i}"), &format!("{c} _"), &ok, &format!("* {guess}"), "R R");
                mb = mb.rule(&format!("b{i}"), &format!("{c} _"), &format!("b{}", i + 1), &format!("* {guess}"), "R R");
            }
        }
    }
    mb.rule(&format!("g{s}"), "_ _", "yes", "* *", "S S").build().expect("guessing machine")
}

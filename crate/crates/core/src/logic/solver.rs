//! Backtracking search with unit propagation over two watched literals.
//! Branching is fixed: lowest unassigned variable, true first.

use super::{CnfFormula, Lit};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    /// Values of variables `1..=var_count`, in order.
    Sat(Vec<bool>),
    Unsat,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub decisions: u64,
    pub propagations: u64,
    pub conflicts: u64,
}

pub fn solve(f: &CnfFormula) -> SolveResult {
    solve_with_stats(f).0
}

fn code(l: Lit) -> usize {
    2 * (l.unsigned_abs() as usize) + usize::from(l < 0)
}

struct Search {
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    value: Vec<i8>,
    trail: Vec<Lit>,
    head: usize,
    stats: SolverStats,
}

impl Search {
    fn lit_value(&self, l: Lit) -> i8 {
        let v = self.value[l.unsigned_abs() as usize];
        if l < 0 {
            -v
        } else {
            v
        }
    }

    fn assign(&mut self, l: Lit) {
        self.value[l.unsigned_abs() as usize] = if l > 0 { 1 } else { -1 };
        self.trail.push(l);
    }

    fn undo_to(&mut self, len: usize) {
        while self.trail.len() > len {
            let l = self.trail.pop().expect("non-empty trail");
            self.value[l.unsigned_abs() as usize] = 0;
        }
        self.head = self.head.min(len);
    }

    /// False on conflict.
    fn propagate(&mut self) -> bool {
        while self.head < self.trail.len() {
            let falsified = -self.trail[self.head];
            self.head += 1;
            let fc = code(falsified);
            let mut ws = std::mem::take(&mut self.watches[fc]);
            let mut n = 0;
            let mut ok = true;
            while n < ws.len() {
                let ci = ws[n];
                if self.clauses[ci][0] == falsified {
                    self.clauses[ci].swap(0, 1);
                }
                let other = self.clauses[ci][0];
                if self.lit_value(other) == 1 {
                    n += 1;
                    continue;
                }
                let c = &self.clauses[ci];
                let repl = (2..c.len()).find(|&k| self.lit_value(c[k]) != -1);
                if let Some(k) = repl {
                    let c = &mut self.clauses[ci];
                    c.swap(1, k);
                    let w = code(c[1]);
                    self.watches[w].push(ci);
                    ws.swap_remove(n);
                    continue;
                }
                n += 1;
                if self.lit_value(other) == 0 {
                    self.stats.propagations += 1;
                    self.assign(other);
                } else {
                    ok = false;
                    break;
                }
            }
            self.watches[fc] = ws;
            if !ok {
                return false;
            }
        }
        true
    }
}

pub fn solve_with_stats(f: &CnfFormula) -> (SolveResult, SolverStats) {
    let vars = f.var_count() as usize;
    let mut s = Search {
        clauses: Vec::new(),
        watches: vec![Vec::new(); 2 * vars + 2],
        value: vec![0; vars + 1],
        trail: Vec::new(),
        head: 0,
        stats: SolverStats::default(),
    };
    let mut units = Vec::new();
    for c in f.clauses() {
        let mut c = c.clone();
        c.sort_unstable();
        c.dedup();
        if c.iter().any(|l| c.contains(&-l)) {
            continue;
        }
        match c.len() {
            0 => return (SolveResult::Unsat, s.stats),
            1 => units.push(c[0]),
            _ => {
                let ci = s.clauses.len();
                s.watches[code(c[0])].push(ci);
                s.watches[code(c[1])].push(ci);
                s.clauses.push(c);
            }
        }
    }
    for u in units {
        match s.lit_value(u) {
            1 => {}
            -1 => return (SolveResult::Unsat, s.stats),
            _ => s.assign(u),
        }
    }
    if !s.propagate() {
        return (SolveResult::Unsat, s.stats);
    }
    // Per decision level: trail length before it, the decision, and whether
    // it is already the flipped second branch.
    let mut levels: Vec<(usize, Lit, bool)> = Vec::new();
    let mut next_free = 1;
    loop {
        while next_free <= vars && s.value[next_free] != 0 {
            next_free += 1;
        }
        if next_free > vars {
            let a = s.value[1..].iter().map(|&v| v == 1).collect();
            return (SolveResult::Sat(a), s.stats);
        }
        let d = next_free as Lit;
        s.stats.decisions += 1;
        levels.push((s.trail.len(), d, false));
        s.assign(d);
        while !s.propagate() {
            s.stats.conflicts += 1;
            loop {
                let Some((len, lit, flipped)) = levels.pop() else {
                    return (SolveResult::Unsat, s.stats);
                };
                s.undo_to(len);
                if !flipped {
                    levels.push((len, -lit, true));
                    s.assign(-lit);
                    break;
                }
            }
            next_free = 1;
        }
    }
}

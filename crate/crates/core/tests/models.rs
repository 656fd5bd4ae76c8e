//! Recursive functions and register programs for the same arithmetic
//! agree with each other and with native arithmetic.

use moc::recfun::{eval, library, parse_rf, RecExpr};
use moc::regmachine::{nat_to_unary, parse_rm, reg_semantics, run_reg, RegProgram};
use moc::{Fuel, RunOutcome};
use num_bigint::BigUint;

const MUL: &str = "\
inputs X1 X2
outputs Y1
a: if X1 = 0 goto e
X1 = X1 - 1
b: if X2 = 0 goto r
X2 = X2 - 1
Y1 = Y1 + 1
W1 = W1 + 1
if W0 = 0 goto b
r: if W1 = 0 goto a
W1 = W1 - 1
X2 = X2 + 1
if W0 = 0 goto r
e:
";

const MONUS: &str = "\
inputs X1 X2
outputs Y1
a: if X2 = 0 goto c
X2 = X2 - 1
X1 = X1 - 1
if W0 = 0 goto a
c: if X1 = 0 goto e
X1 = X1 - 1
Y1 = Y1 + 1
if W0 = 0 goto c
e:
";

fn rf(e: &RecExpr, args: &[u64]) -> u64 {
    match eval(e, args, Fuel(1_000_000)).unwrap() {
        RunOutcome::Halted { outputs, .. } => outputs,
        other => panic!("{args:?}: {other:?}"),
    }
}

fn rm(p: &RegProgram, args: &[u64]) -> u64 {
    let xs: Vec<BigUint> = args.iter().map(|&a| BigUint::from(a)).collect();
    let out = run_reg(p, &xs, Fuel(1_000_000), None).unwrap();
    out.outputs().unwrap()[0].to_string().parse().unwrap()
}

fn agree(e: &RecExpr, p: &RegProgram, oracle: impl Fn(u64, u64) -> u64) {
    for a in 0..=6 {
        for b in 0..=6 {
            let want = oracle(a, b);
            assert_eq!(rf(e, &[a, b]), want, "recfun at ({a}, {b})");
            assert_eq!(rm(p, &[a, b]), want, "register at ({a}, {b})");
        }
    }
}

#[test]
fn addition() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/add.rf")).unwrap();
    let parsed = parse_rf(&text).unwrap();
    let p = parse_rm(&std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/add.rm")).unwrap())
        .unwrap();
    agree(&parsed, &p, |a, b| a + b);
    agree(&library::add(), &p, |a, b| a + b);
}

#[test]
fn multiplication() {
    agree(&library::mul(), &parse_rm(MUL).unwrap(), |a, b| a * b);
}

#[test]
fn truncated_subtraction() {
    agree(&library::monus(), &parse_rm(MONUS).unwrap(), |a, b| a.saturating_sub(b));
}

#[test]
fn unary_semantics_matches_direct_run() {
    let p = parse_rm(MUL).unwrap();
    let f = reg_semantics(&p, None);
    for a in 0..=4u32 {
        for b in 0..=4u32 {
            let words = [nat_to_unary(&a.into()), nat_to_unary(&b.into())];
            let out = f.evaluate(&words, Fuel(100_000));
            assert_eq!(out.outputs().unwrap(), &vec![nat_to_unary(&(a * b).into())]);
        }
    }
}

#[test]
fn minimization_halves() {
    // least y with x - 2y = 0
    let p = |i| RecExpr::proj(2, i).unwrap();
    let twice = RecExpr::comp(library::add(), vec![p(2), p(2)]).unwrap();
    let f = RecExpr::comp(library::monus(), vec![p(1), twice]).unwrap();
    let half = RecExpr::mu(f).unwrap();
    assert_eq!(half.arity(), 1);
    for x in 0..=12 {
        assert_eq!(rf(&half, &[x]), x.div_ceil(2), "{x}");
    }
    let text = parse_rf(&half.to_string()).unwrap();
    assert_eq!(text, half);
}

//! Small machines used by tests, examples and the CLI.

use super::{MachineBuilder, TuringMachine};
use crate::base::Alphabet;

/// 1 → 1: copies the input and appends `glyph`.
pub fn append_glyph(alphabet: &Alphabet, glyph: char) -> TuringMachine {
    let b = alphabet.blank();
    let mut mb = MachineBuilder::new(alphabet.clone(), 1, 0, 1).start("copy").accept("done");
    for &c in alphabet.symbols() {
        mb = mb.rule("copy", &format!("{c} {b}"), "copy", &format!("* {c}"), "R R");
    }
    mb.rule("copy", &format!("{b} {b}"), "done", &format!("* {glyph}"), "S R").build().expect("append machine")
}

/// 1 → 1: accepts at once with an empty output.
pub fn erase(alphabet: &Alphabet) -> TuringMachine {
    MachineBuilder::new(alphabet.clone(), 1, 0, 1).start("done").accept("done").build().expect("erase machine")
}

/// 1 → 1: loops forever on every input.
pub fn self_loop(alphabet: &Alphabet) -> TuringMachine {
    MachineBuilder::new(alphabet.clone(), 1, 0, 1)
        .start("loop")
        .rule("loop", "* *", "loop", "* *", "S S")
        .build()
        .expect("loop machine")
}

/// 1 → 0: always halts rejecting.
pub fn always_reject(alphabet: &Alphabet) -> TuringMachine {
    MachineBuilder::new(alphabet.clone(), 1, 0, 0).start("no").reject("no").build().expect("reject machine")
}

/// 1 → 0 over `{0,1}`: nondeterministically walks right and jumps to
/// acceptance on some `1`. Accepts exactly the words containing `1`.
pub fn contains_one_ntm() -> TuringMachine {
    MachineBuilder::new(Alphabet::binary(), 1, 0, 0)
        .start("scan")
        .accept("yes")
        .rule("scan", "{0,1}", "scan", "*", "R")
        .rule("scan", "1", "yes", "*", "S")
        .build()
        .expect("contains-one machine")
}

/// 1 → 0 over `{0,1}`: branches `width` ways at every step for `depth`
/// steps, accepting on the last branch of the last level only.
pub fn late_acceptor(depth: usize, width: usize) -> TuringMachine {
    let mut mb = MachineBuilder::new(Alphabet::binary(), 1, 0, 0).start("l0").accept("yes");
    for d in 0..depth {
        let cur = format!("l{d}");
        for w in 0..width {
            let to = if d + 1 == depth && w + 1 == width {
                "yes".to_string()
            } else if w + 1 == width {
                format!("l{}", d + 1)
            } else {
                format!("dead{d}_{w}")
            };
            mb = mb.rule(&cur, "*", &to, "*", "S");
        }
    }
    mb.build().expect("late acceptor")
}

/// 1 → 0 over `{0,1}`: scans its input and accepts iff the number of `1`s
/// is even.
pub fn even_ones() -> TuringMachine {
    MachineBuilder::new(Alphabet::binary(), 1, 0, 0)
        .start("even")
        .accept("even")
        .reject("odd")
        .rule("even", "0", "even", "*", "R")
        .rule("even", "1", "odd", "*", "R")
        .rule("odd", "0", "odd", "*", "R")
        .rule("odd", "1", "even", "*", "R")
        .build()
        .expect("parity machine")
}

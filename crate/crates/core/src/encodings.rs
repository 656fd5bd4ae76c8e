//! Encode/decode pairs between data types, and Gödel numbering of machines.
//!
//! None of these encodings is canonical; any injective, effectively
//! invertible scheme would serve equally well.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::base::{Alphabet, Word};
use crate::error::{Error, Result};
use crate::turing::{parse_tm, to_canonical_text, TuringMachine};

/// An invertible encoding of values as words.
pub trait Codec {
    type Value;

    fn domain(&self) -> &'static str;
    fn encode(&self, v: &Self::Value) -> Result<Word>;
    fn decode(&self, w: &Word) -> Result<Self::Value>;
}

/// Bijective base 2 over `{0,1}`: 0 ↔ ε, 1 ↔ "0", 2 ↔ "1", 3 ↔ "00", …
#[derive(Debug, Clone, Copy, Default)]
pub struct NatStringCodec;

pub fn nat_string_codec() -> NatStringCodec {
    NatStringCodec
}

impl Codec for NatStringCodec {
    type Value = BigUint;

    fn domain(&self) -> &'static str {
        "naturals as binary words"
    }

    fn encode(&self, v: &BigUint) -> Result<Word> {
        let mut n = v.clone();
        let mut rev = Vec::new();
        let two = BigUint::from(2u8);
        while !n.is_zero() {
            n -= BigUint::one();
            rev.push(if (&n % &two).is_zero() { '0' } else { '1' });
            n /= &two;
        }
        rev.reverse();
        Ok(Word(rev))
    }

    fn decode(&self, w: &Word) -> Result<BigUint> {
        let mut n = BigUint::zero();
        for &c in w.glyphs() {
            let d = match c {
                '0' => 1u8,
                '1' => 2u8,
                other => return Err(Error::Decode(format!("{other:?} is not a binary digit"))),
            };
            n = n * 2u8 + d;
        }
        Ok(n)
    }
}

/// k-tuples of words as one word: each component `w` becomes
/// `σ0^|w| σ1 w`, with `σ0`, `σ1` the first two alphabet symbols.
#[derive(Debug, Clone)]
pub struct TupleCodec {
    alphabet: Alphabet,
    arity: usize,
}

pub fn tuple_codec(alphabet: &Alphabet, arity: usize) -> Result<TupleCodec> {
    if alphabet.len() < 2 {
        return Err(Error::Alphabet("tuple encoding needs at least two symbols".into()));
    }
    Ok(TupleCodec { alphabet: alphabet.clone(), arity })
}

impl Codec for TupleCodec {
    type Value = Vec<Word>;

    fn domain(&self) -> &'static str {
        "word tuples as words"
    }

    fn encode(&self, v: &Vec<Word>) -> Result<Word> {
        if v.len() != self.arity {
            return Err(Error::Shape(format!("expected a {}-tuple, got {}", self.arity, v.len())));
        }
        let (one, stop) = (self.alphabet.symbols()[0], self.alphabet.symbols()[1]);
        let mut out = Vec::new();
        for w in v {
            if let Some(&c) = w.glyphs().iter().find(|&&c| !self.alphabet.contains(c)) {
                return Err(Error::Alphabet(format!("{c:?} not in alphabet")));
            }
            out.extend(std::iter::repeat_n(one, w.len()));
            out.push(stop);
            out.extend(w.glyphs());
        }
        Ok(Word(out))
    }

    fn decode(&self, w: &Word) -> Result<Vec<Word>> {
        let (one, stop) = (self.alphabet.symbols()[0], self.alphabet.symbols()[1]);
        let g = w.glyphs();
        let mut pos = 0;
        let mut parts = Vec::with_capacity(self.arity);
        for i in 0..self.arity {
            let len = g[pos..].iter().take_while(|&&c| c == one).count();
            pos += len;
            if g.get(pos) != Some(&stop) {
                return Err(Error::Decode(format!("component {i}: missing length terminator")));
            }
            pos += 1;
            let body = g.get(pos..pos + len).ok_or_else(|| Error::Decode(format!("component {i} truncated")))?;
            parts.push(Word(body.to_vec()));
            pos += len;
        }
        if pos != g.len() {
            return Err(Error::Decode("trailing glyphs after the last component".into()));
        }
        Ok(parts)
    }
}

fn bits_of_bytes(bytes: &[u8]) -> Word {
    Word(bytes.iter().flat_map(|b| (0..8).rev().map(move |i| if b >> i & 1 == 1 { '1' } else { '0' })).collect())
}

/// Canonical text, as UTF-8 bits, read as a bijective base-2 numeral.
pub fn godel_number(m: &TuringMachine) -> BigUint {
    let text = to_canonical_text(m);
    NatStringCodec.decode(&bits_of_bytes(text.as_bytes())).expect("binary word")
}

/// The canonical form of `m`: what its Gödel number decodes to.
pub fn canonical_form(m: &TuringMachine) -> TuringMachine {
    parse_tm(&to_canonical_text(m)).expect("canonical text parses")
}

/// Inverse of [`godel_number`]. Numbers that do not spell a well-formed
/// machine are decode errors.
pub fn godel_decode(y: &BigUint) -> Result<TuringMachine> {
    let bits = NatStringCodec.encode(y)?;
    if bits.len() % 8 != 0 {
        return Err(Error::Decode("bit length is not a whole number of bytes".into()));
    }
    let bytes: Vec<u8> = bits
        .glyphs()
        .chunks(8)
        .map(|c| c.iter().fold(0u8, |acc, &b| acc << 1 | u8::from(b == '1')))
        .collect();
    let text = String::from_utf8(bytes).map_err(|_| Error::Decode("not UTF-8 text".into()))?;
    parse_tm(&text).map_err(|e| Error::Decode(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::turing::samples::{append_glyph, contains_one_ntm, self_loop};
    use crate::turing::{determinize, identity_machine};
    use proptest::prelude::*;
    use std::collections::HashSet;

    #[test]
    fn bijective_base_two() {
        let c = nat_string_codec();
        assert_eq!(c.encode(&BigUint::zero()).unwrap(), Word::empty());
        assert_eq!(c.encode(&BigUint::from(5u8)).unwrap().to_string(), "10");
        // Oracle: words in length-lex order are exactly the codes 0, 1, 2, …
        let words = Alphabet::new("01".chars(), '_').unwrap().words_up_to(3);
        for (n, w) in words.iter().take(16).enumerate() {
            assert_eq!(c.encode(&BigUint::from(n)).unwrap(), *w);
            assert_eq!(c.decode(w).unwrap(), BigUint::from(n));
        }
        for n in 0..=1000u32 {
            let v = BigUint::from(n);
            assert_eq!(c.decode(&c.encode(&v).unwrap()).unwrap(), v);
        }
    }

    #[test]
    fn tuples() {
        let a = Alphabet::new("abc".chars(), '_').unwrap();
        let c = tuple_codec(&a, 2).unwrap();
        let t = vec![Word::from("a"), Word::from("bc")];
        assert_eq!(c.decode(&c.encode(&t).unwrap()).unwrap(), t);
        let z = tuple_codec(&a, 0).unwrap();
        assert_eq!(z.encode(&vec![]).unwrap(), Word::empty());
        assert_eq!(z.decode(&Word::empty()).unwrap(), Vec::<Word>::new());
        assert!(matches!(c.decode(&Word::from("aab")), Err(Error::Decode(_))));
        assert!(tuple_codec(&Alphabet::unary(), 1).is_err());
    }

    #[test]
    fn tuple_encoding_is_injective() {
        let a = Alphabet::binary();
        for k in 1..=3 {
            let c = tuple_codec(&a, k).unwrap();
            let all = a.tuples_up_to(k, 4);
            let codes: HashSet<Word> = all.iter().map(|t| c.encode(t).unwrap()).collect();
            assert_eq!(codes.len(), all.len());
        }
    }

    #[test]
    fn machine_numbers() {
        let id = identity_machine(1, &Alphabet::binary());
        let y = godel_number(&id);
        assert_eq!(godel_decode(&y).unwrap(), canonical_form(&id));
        assert!(matches!(godel_decode(&BigUint::zero()), Err(Error::Decode(_))));
        assert!(godel_decode(&BigUint::from(12345u32)).is_err());
        let corpus = [
            id.clone(),
            append_glyph(&Alphabet::binary(), '0'),
            append_glyph(&Alphabet::binary(), '1'),
            self_loop(&Alphabet::binary()),
            contains_one_ntm(),
            determinize(&contains_one_ntm()).unwrap(),
        ];
        let nums: HashSet<BigUint> = corpus.iter().map(godel_number).collect();
        assert_eq!(nums.len(), corpus.len());
        for m in &corpus {
            assert_eq!(godel_decode(&godel_number(m)).unwrap(), canonical_form(m));
        }
    }

    proptest! {
        #[test]
        fn nat_round_trip(n in any::<u128>()) {
            let v = BigUint::from(n);
            prop_assert_eq!(NatStringCodec.decode(&NatStringCodec.encode(&v).unwrap()).unwrap(), v);
        }

        #[test]
        fn tuple_round_trip(parts in proptest::collection::vec("[abc]{0,5}", 0..4)) {
            let a = Alphabet::new("abc".chars(), '_').unwrap();
            let t: Vec<Word> = parts.iter().map(|s| Word::from(s.as_str())).collect();
            let c = tuple_codec(&a, t.len()).unwrap();
            prop_assert_eq!(c.decode(&c.encode(&t).unwrap()).unwrap(), t);
        }
    }
}

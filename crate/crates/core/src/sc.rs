//! Stochastic bitstreams and the elementary gate-level arithmetic on them:
//! AND multiplication, MUX (scaled) addition, MUX trees, and bit-flip noise.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::converters::lfsr::{Lfsr, LfsrSpec};
use crate::error::{Error, Result};
use crate::rng;

/// Fixed-length sequence of bits whose fraction of ones is its value.
///
/// Textual form is one `'0'`/`'1'` character per bit, first bit first
/// (`"01011100"` has value 4/8).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Bitstream {
    bits: Vec<bool>,
}

impl Bitstream {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::Empty("bitstream"));
        }
        Ok(Self { bits })
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::new(vec![false; len])
    }

    pub fn ones(len: usize) -> Result<Self> {
        Self::new(vec![true; len])
    }

    /// Stream of `len` bits whose first `count` bits are one.
    pub fn thermometer(count: usize, len: usize) -> Result<Self> {
        if count > len {
            return Err(Error::InvalidParameter(format!(
                "thermometer count {count} exceeds length {len}"
            )));
        }
        Self::new((0..len).map(|i| i < count).collect())
    }

    pub fn from_fn(len: usize, f: impl FnMut(usize) -> bool) -> Result<Self> {
        Self::new((0..len).map(f).collect())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    /// Always false; streams have at least one bit.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn bit(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Exact value `ones / len`.
    pub fn value(&self) -> Ratio<u64> {
        Ratio::new(self.count_ones() as u64, self.len() as u64)
    }

    pub fn value_f64(&self) -> f64 {
        self.count_ones() as f64 / self.len() as f64
    }

    /// Copy with bit `index` inverted.
    pub fn with_flipped(&self, index: usize) -> Result<Self> {
        if index >= self.len() {
            return Err(Error::InvalidParameter(format!(
                "bit index {index} out of range for length {}",
                self.len()
            )));
        }
        let mut bits = self.bits.clone();
        bits[index] = !bits[index];
        Ok(Self { bits })
    }

    pub fn complement(&self) -> Self {
        Self {
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }
}

impl fmt::Display for Bitstream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bitstream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bitstream({self})")
    }
}

impl FromStr for Bitstream {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::BadBitChar(other)),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(bits)
    }
}

impl Serialize for Bitstream {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bitstream {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn check_len(a: &Bitstream, b: &Bitstream) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

/// Source of MUX select bits.
///
/// Deep MUX trees need one select stream per level. `Lfsr` takes bit `k`
/// of the register state for level `k` (so its width must cover the tree
/// depth), `Alternating` uses bit `k` of the cycle counter, and `Explicit`
/// drives every level with the same stream.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SelectSource {
    Lfsr(LfsrSpec),
    Explicit { stream: Bitstream },
    Alternating,
}

impl SelectSource {
    /// Select streams for `levels` tree levels, each `len` bits long.
    pub fn level_streams(&self, levels: usize, len: usize) -> Result<Vec<Bitstream>> {
        match self {
            SelectSource::Explicit { stream } => {
                if stream.len() != len {
                    return Err(Error::LengthMismatch {
                        left: stream.len(),
                        right: len,
                    });
                }
                Ok(vec![stream.clone(); levels])
            }
            SelectSource::Alternating => (0..levels)
                .map(|k| Bitstream::from_fn(len, |t| (t >> k) & 1 == 1))
                .collect(),
            SelectSource::Lfsr(spec) => {
                if levels > spec.width as usize {
                    return Err(Error::InvalidParameter(format!(
                        "select LFSR width {} cannot drive {levels} tree levels",
                        spec.width
                    )));
                }
                let mut lfsr = Lfsr::from_spec(spec)?;
                let states: Vec<u64> = (0..len).map(|_| lfsr.step()).collect();
                (0..levels)
                    .map(|k| Bitstream::from_fn(len, |t| (states[t] >> k) & 1 == 1))
                    .collect()
            }
        }
    }
}

/// AND-gate multiplication.
pub fn sc_mul(a: &Bitstream, b: &Bitstream) -> Result<Bitstream> {
    check_len(a, b)?;
    Ok(Bitstream {
        bits: a.bits.iter().zip(&b.bits).map(|(&x, &y)| x && y).collect(),
    })
}

fn mux(a: &Bitstream, b: &Bitstream, sel: &Bitstream) -> Bitstream {
    Bitstream {
        bits: (0..a.len())
            .map(|i| if sel.bits[i] { b.bits[i] } else { a.bits[i] })
            .collect(),
    }
}

/// MUX-gate scaled addition: bit `i` comes from `a` where the select bit is 0
/// and from `b` where it is 1.
pub fn mux_add(a: &Bitstream, b: &Bitstream, sel: &SelectSource) -> Result<Bitstream> {
    check_len(a, b)?;
    let sel = sel.level_streams(1, a.len())?.remove(0);
    Ok(mux(a, b, &sel))
}

/// Output of a MUX accumulation tree.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeSum {
    pub stream: Bitstream,
    /// Zero streams appended to reach a power-of-two leaf count.
    pub padded: usize,
    /// Tree depth; the output value estimates `sum / 2^depth`.
    pub depth: u32,
}

impl TreeSum {
    pub fn scale(&self) -> u64 {
        1u64 << self.depth
    }
}

/// Binary MUX tree over `streams`, padded with zero streams to a power of two.
pub fn mux_tree_accumulate(streams: &[Bitstream], sel: &SelectSource) -> Result<TreeSum> {
    let first = streams.first().ok_or(Error::Empty("mux tree inputs"))?;
    let len = first.len();
    for s in streams {
        check_len(first, s)?;
    }
    let leaves = streams.len().next_power_of_two();
    let depth = leaves.trailing_zeros();
    let padded = leaves - streams.len();

    let selects = sel.level_streams(depth as usize, len)?;
    let mut level: Vec<Bitstream> = streams.to_vec();
    level.resize(leaves, Bitstream::zeros(len)?);
    for sel_stream in &selects {
        level = level
            .chunks_exact(2)
            .map(|pair| mux(&pair[0], &pair[1], sel_stream))
            .collect();
    }
    Ok(TreeSum {
        stream: level.pop().expect("tree reduces to one stream"),
        padded,
        depth,
    })
}

/// Flips each bit independently with probability `p`.
///
/// The decision for bit `i` depends only on `(seed, i)`.
pub fn inject_bitflips(b: &Bitstream, p: f64, seed: u64) -> Result<Bitstream> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            value: p,
            min: 0.0,
            max: 1.0,
        });
    }
    if p == 0.0 {
        return Ok(b.clone());
    }
    Ok(Bitstream {
        bits: b
            .bits
            .iter()
            .enumerate()
            .map(|(i, &x)| x ^ (rng::unit(seed, i as u64) < p))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> Bitstream {
        s.parse().unwrap()
    }

    #[test]
    fn value_examples() {
        assert_eq!(bs("01011100").value(), Ratio::new(4, 8));
        assert_eq!(bs("00000000").value(), Ratio::from_integer(0));
        assert_eq!(bs("11111111").value(), Ratio::from_integer(1));
    }

    #[test]
    fn parse_rejects_garbage_and_empty() {
        assert_eq!("01x".parse::<Bitstream>(), Err(Error::BadBitChar('x')));
        assert!("".parse::<Bitstream>().is_err());
        assert_eq!(bs("0110").to_string(), "0110");
    }

    #[test]
    fn and_multiplication() {
        let out = sc_mul(&bs("01011100"), &bs("11101000")).unwrap();
        assert_eq!(out, bs("01001000"));
        assert_eq!(out.value(), Ratio::new(2, 8));

        let x = bs("10110010");
        assert_eq!(sc_mul(&x, &Bitstream::ones(8).unwrap()).unwrap(), x);
        assert_eq!(
            sc_mul(&x, &Bitstream::zeros(8).unwrap()).unwrap(),
            Bitstream::zeros(8).unwrap()
        );
        assert_eq!(sc_mul(&x, &bs("101")), Err(Error::LengthMismatch { left: 8, right: 3 }));
    }

    #[test]
    fn mux_identical_operands_preserved() {
        let a = bs("10101010");
        for sel in [
            SelectSource::Alternating,
            SelectSource::Explicit { stream: bs("11001010") },
            SelectSource::Lfsr(LfsrSpec::default_for(4).unwrap()),
        ] {
            assert_eq!(mux_add(&a, &a, &sel).unwrap(), a);
        }
    }

    #[test]
    fn mux_explicit_and_alternating() {
        let sel = SelectSource::Explicit { stream: bs("01010101") };
        let out = mux_add(&bs("11111111"), &bs("00000000"), &sel).unwrap();
        assert_eq!(out.value(), Ratio::new(4, 8));

        let out = mux_add(&bs("11110000"), &bs("00001111"), &SelectSource::Alternating).unwrap();
        assert_eq!(out, bs("10100101"));
        assert_eq!(out.value(), Ratio::new(4, 8));
    }

    #[test]
    fn mux_explicit_select_length_checked() {
        let sel = SelectSource::Explicit { stream: bs("01") };
        assert!(mux_add(&bs("1111"), &bs("0000"), &sel).is_err());
    }

    #[test]
    fn tree_examples() {
        let a = bs("1011");
        let t = mux_tree_accumulate(std::slice::from_ref(&a), &SelectSource::Alternating).unwrap();
        assert_eq!((t.stream, t.padded, t.depth), (a, 0, 0));

        let ones = vec![bs("1111"); 4];
        for sel in [
            SelectSource::Alternating,
            SelectSource::Lfsr(LfsrSpec::default_for(4).unwrap()),
        ] {
            let t = mux_tree_accumulate(&ones, &sel).unwrap();
            assert_eq!(t.stream.value(), Ratio::from_integer(1));
        }

        let sel = SelectSource::Explicit { stream: bs("0101") };
        let t = mux_tree_accumulate(&[bs("1111"), bs("0000")], &sel).unwrap();
        assert_eq!(t.stream.value(), Ratio::new(2, 4));

        assert_eq!(
            mux_tree_accumulate(&[], &SelectSource::Alternating),
            Err(Error::Empty("mux tree inputs"))
        );
    }

    #[test]
    fn tree_pads_to_power_of_two() {
        let streams = vec![bs("11111111"); 3];
        let t = mux_tree_accumulate(&streams, &SelectSource::Alternating).unwrap();
        assert_eq!(t.padded, 1);
        assert_eq!(t.depth, 2);
        // counter select visits each leaf twice in 8 cycles; one leaf is padding
        assert_eq!(t.stream.count_ones(), 6);
    }

    #[test]
    fn bitflip_edges() {
        let a = bs("01101010");
        assert_eq!(inject_bitflips(&a, 0.0, 1).unwrap(), a);
        assert_eq!(inject_bitflips(&a, 1.0, 1).unwrap(), a.complement());
        assert!(inject_bitflips(&a, 1.5, 1).is_err());
        assert_eq!(
            inject_bitflips(&a, 0.3, 9).unwrap(),
            inject_bitflips(&a, 0.3, 9).unwrap()
        );
    }

    #[test]
    fn single_flip_moves_value_by_one_step() {
        let a = bs("01101010");
        for i in 0..a.len() {
            let v = a.with_flipped(i).unwrap().value();
            assert!(v == Ratio::new(3, 8) || v == Ratio::new(5, 8));
        }
    }
}

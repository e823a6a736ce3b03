//! Fibonacci linear-feedback shift registers.
//!
//! Taps are 1-indexed polynomial exponents (`{4, 3}` is x^4 + x^3 + 1).
//! Each step shifts the register left by one and inserts the XOR of the
//! tapped bits at bit 0; the new state is the step's output value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximal-length tap sets, indexed by width. Every entry is checked by an
/// exhaustive period test.
const MAXIMAL_TAPS: &[&[u32]] = &[
    &[],
    &[],
    &[2, 1],
    &[3, 2],
    &[4, 3],
    &[5, 3],
    &[6, 5],
    &[7, 6],
    &[8, 6, 5, 4],
    &[9, 5],
    &[10, 7],
    &[11, 9],
    &[12, 6, 4, 1],
    &[13, 4, 3, 1],
    &[14, 5, 3, 1],
    &[15, 14],
    &[16, 15, 13, 4],
    &[17, 14],
    &[18, 11],
    &[19, 6, 2, 1],
    &[20, 17],
    &[21, 19],
    &[22, 21],
    &[23, 18],
    &[24, 23, 22, 17],
];

pub const MAX_SHIPPED_WIDTH: u32 = (MAXIMAL_TAPS.len() - 1) as u32;

/// Shipped maximal-length taps for `width`, if any.
pub fn maximal_taps(width: u32) -> Option<&'static [u32]> {
    MAXIMAL_TAPS.get(width as usize).copied().filter(|t| !t.is_empty())
}

/// Construction parameters of an LFSR; this is what config files carry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LfsrSpec {
    pub width: u32,
    pub taps: Vec<u32>,
    pub seed: u64,
}

impl LfsrSpec {
    /// Shipped taps with seed `1 << (width - 1)` (0b1000 for width 4).
    pub fn default_for(width: u32) -> Result<Self> {
        let taps = maximal_taps(width)
            .ok_or_else(|| Error::InvalidParameter(format!("no shipped tap set for width {width}")))?;
        Ok(Self {
            width,
            taps: taps.to_vec(),
            seed: 1 << (width - 1),
        })
    }

    /// The reciprocal polynomial. It is primitive whenever the original is,
    /// and its sequence runs the original m-sequence backwards, which keeps
    /// two converters from sharing a sequence.
    pub fn reciprocal(&self) -> Self {
        let mut taps: Vec<u32> = std::iter::once(self.width)
            .chain(self.taps.iter().filter(|&&t| t != self.width).map(|&t| self.width - t))
            .collect();
        taps.sort_unstable_by(|a, b| b.cmp(a));
        Self {
            width: self.width,
            taps,
            seed: self.seed,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lfsr {
    width: u32,
    tap_mask: u64,
    state: u64,
}

impl Lfsr {
    pub fn new(width: u32, taps: &[u32], seed: u64) -> Result<Self> {
        if !(2..=63).contains(&width) {
            return Err(Error::InvalidParameter(format!("LFSR width {width} outside 2..=63")));
        }
        if taps.is_empty() || !taps.contains(&width) {
            return Err(Error::InvalidParameter(format!(
                "LFSR taps {taps:?} must include the width {width}"
            )));
        }
        let mut tap_mask = 0u64;
        for &t in taps {
            if t == 0 || t > width {
                return Err(Error::InvalidParameter(format!("tap {t} outside 1..={width}")));
            }
            tap_mask |= 1 << (t - 1);
        }
        if seed > mask(width) {
            return Err(Error::InvalidParameter(format!(
                "LFSR seed {seed:#x} wider than {width} bits"
            )));
        }
        let state = seed;
        if state == 0 {
            return Err(Error::ZeroLfsrState);
        }
        Ok(Self { width, tap_mask, state })
    }

    pub fn from_spec(spec: &LfsrSpec) -> Result<Self> {
        Self::new(spec.width, &spec.taps, spec.seed)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    /// Maximal period `2^w - 1`.
    pub fn max_period(&self) -> u64 {
        mask(self.width)
    }

    /// Advances one step and returns the new state.
    #[inline]
    pub fn step(&mut self) -> u64 {
        let feedback = (self.state & self.tap_mask).count_ones() as u64 & 1;
        self.state = ((self.state << 1) | feedback) & mask(self.width);
        self.state
    }

    /// Steps a copy, leaving `self` untouched.
    pub fn advanced(&self) -> (Lfsr, u64) {
        let mut l = self.clone();
        let v = l.step();
        (l, v)
    }

    /// Steps until the current state recurs. Returns `None` if it does not
    /// recur within `2^w - 1` steps (the state is on a tail, which cannot
    /// happen for a nonsingular feedback but is checked anyway).
    pub fn period(&self) -> Option<u64> {
        let start = self.state;
        let mut l = self.clone();
        (1..=self.max_period()).find(|_| l.step() == start)
    }
}

#[inline]
fn mask(width: u32) -> u64 {
    (1u64 << width) - 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_bit_sequence_visits_every_nonzero_state() {
        let mut l = Lfsr::new(4, &[4, 3], 0b1000).unwrap();
        let seq: Vec<u64> = (0..15).map(|_| l.step()).collect();
        assert_eq!(
            seq,
            [1, 2, 4, 9, 3, 6, 13, 10, 5, 11, 7, 15, 14, 12, 8],
            "hand-enumerated x^4+x^3+1 sequence from 0b1000"
        );
        let mut sorted = seq.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (1..=15).collect::<Vec<_>>());
    }

    #[test]
    fn three_bit_period() {
        assert_eq!(Lfsr::new(3, &[3, 2], 1).unwrap().period(), Some(7));
    }

    #[test]
    fn shipped_taps_are_maximal() {
        for w in 2..=20 {
            let spec = LfsrSpec::default_for(w).unwrap();
            let l = Lfsr::from_spec(&spec).unwrap();
            assert_eq!(l.period(), Some((1 << w) - 1), "width {w}");
            let r = Lfsr::from_spec(&spec.reciprocal()).unwrap();
            assert_eq!(r.period(), Some((1 << w) - 1), "reciprocal width {w}");
        }
    }

    #[test]
    #[ignore = "slow in debug builds; run with --ignored"]
    fn wide_shipped_taps_are_maximal() {
        for w in 21..=MAX_SHIPPED_WIDTH {
            let l = Lfsr::from_spec(&LfsrSpec::default_for(w).unwrap()).unwrap();
            assert_eq!(l.period(), Some((1 << w) - 1), "width {w}");
        }
    }

    #[test]
    fn non_maximal_taps_have_short_period() {
        // x^4 + x^2 + 1 = (x^2 + x + 1)^2 is not primitive
        let l = Lfsr::new(4, &[4, 2], 1).unwrap();
        assert!(l.period().unwrap() < 15);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(Lfsr::new(4, &[4, 3], 0), Err(Error::ZeroLfsrState));
        assert!(Lfsr::new(4, &[4, 3], 0b1_0000).is_err());
        assert!(Lfsr::new(1, &[1], 1).is_err());
        assert!(Lfsr::new(4, &[3], 1).is_err());
        assert!(Lfsr::new(4, &[5, 4], 1).is_err());
        assert!(LfsrSpec::default_for(40).is_err());
    }

    #[test]
    fn reciprocal_taps() {
        let s = LfsrSpec::default_for(4).unwrap().reciprocal();
        assert_eq!(s.taps, vec![4, 1]);
        let s = LfsrSpec::default_for(8).unwrap().reciprocal();
        assert_eq!(s.taps, vec![8, 4, 3, 2]);
    }

    #[test]
    fn pure_next_matches_step() {
        let l = Lfsr::new(4, &[4, 3], 0b1000).unwrap();
        let (l2, v) = l.advanced();
        assert_eq!(v, 1);
        assert_eq!(l2.state(), 1);
        assert_eq!(l.state(), 0b1000);
    }
}

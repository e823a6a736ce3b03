//! Thermometer-coded analog-to-stochastic converter.
//!
//! A bank of `m` sense amplifiers compares the input against a capacitor
//! divider ladder. With gating on, SA `i` (for `i >= 1`) only evaluates when
//! `Y[i-1]` is high; otherwise its output is forced low, which the
//! thermometer pattern guarantees is the right answer anyway.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sc::Bitstream;

/// Reference voltages `VREF[i] = (i + 1) / (m + 1) * vdd` from `m + 1`
/// equal series capacitors.
#[derive(Clone, Debug, PartialEq)]
pub struct RefLadder {
    vdd: f64,
    refs: Vec<f64>,
}

impl RefLadder {
    pub fn new(m: usize, vdd: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("ladder needs m >= 1".into()));
        }
        if !(vdd > 0.0 && vdd.is_finite()) {
            return Err(Error::InvalidParameter(format!("vdd {vdd} must be positive")));
        }
        let refs = (0..m).map(|i| (i + 1) as f64 / (m + 1) as f64 * vdd).collect();
        Ok(Self { vdd, refs })
    }

    pub fn m(&self) -> usize {
        self.refs.len()
    }

    pub fn vdd(&self) -> f64 {
        self.vdd
    }

    pub fn refs(&self) -> &[f64] {
        &self.refs
    }

    /// Input voltage in the middle of level `k`'s bin, i.e. a voltage that
    /// encodes to exactly `k` ones without sitting on a reference.
    pub fn level_midpoint(&self, k: usize) -> f64 {
        (k as f64 + 0.5) / (self.m() + 1) as f64 * self.vdd
    }
}

/// Monotone code: once a bit is 0 every later bit is 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Bitstream", into = "Bitstream")]
pub struct ThermometerCode {
    bits: Vec<bool>,
}

impl ThermometerCode {
    pub fn from_count(count: usize, m: usize) -> Result<Self> {
        if m == 0 || count > m {
            return Err(Error::InvalidParameter(format!(
                "thermometer count {count} invalid for m = {m}"
            )));
        }
        Ok(Self {
            bits: (0..m).map(|i| i < count).collect(),
        })
    }

    pub fn from_bits(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::Empty("thermometer code"));
        }
        if bits.windows(2).any(|w| !w[0] && w[1]) {
            return Err(Error::InvalidParameter(format!(
                "{} is not a thermometer code",
                Bitstream::new(bits).expect("nonempty")
            )));
        }
        Ok(Self { bits })
    }

    pub fn m(&self) -> usize {
        self.bits.len()
    }

    pub fn count(&self) -> usize {
        self.bits.iter().take_while(|&&b| b).count()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn to_bitstream(&self) -> Bitstream {
        Bitstream::new(self.bits.clone()).expect("m >= 1")
    }
}

impl TryFrom<Bitstream> for ThermometerCode {
    type Error = Error;
    fn try_from(b: Bitstream) -> Result<Self> {
        Self::from_bits(b.bits().to_vec())
    }
}

impl From<ThermometerCode> for Bitstream {
    fn from(t: ThermometerCode) -> Self {
        t.to_bitstream()
    }
}

/// Which sense amplifiers were powered for one conversion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AscActivity {
    pub enabled: Vec<bool>,
}

impl AscActivity {
    pub fn enabled_count(&self) -> usize {
        self.enabled.iter().filter(|&&e| e).count()
    }

    pub fn disabled_count(&self) -> usize {
        self.enabled.len() - self.enabled_count()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AscOutput {
    pub code: ThermometerCode,
    pub activity: AscActivity,
    /// Input was outside [0, vdd].
    pub clamped: bool,
}

/// SA enable policy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gating {
    /// SA `i` evaluates only when `Y[i-1] = 1`.
    #[default]
    Chain,
    /// Every SA evaluates on every conversion.
    Off,
}

/// Converts `x` volts to a thermometer code; `Y[i] = 1` iff `x >= VREF[i]`.
pub fn asc_encode(x: f64, ladder: &RefLadder, gating: Gating) -> AscOutput {
    let clamped = !(0.0..=ladder.vdd).contains(&x);
    let x = if x.is_nan() { 0.0 } else { x.clamp(0.0, ladder.vdd) };
    let m = ladder.m();
    let mut bits = vec![false; m];
    let mut enabled = vec![false; m];
    for i in 0..m {
        let on = match gating {
            Gating::Off => true,
            Gating::Chain => i == 0 || bits[i - 1],
        };
        enabled[i] = on;
        if on {
            bits[i] = x >= ladder.refs[i];
        }
    }
    AscOutput {
        code: ThermometerCode { bits },
        activity: AscActivity { enabled },
        clamped,
    }
}

/// Expected enabled-SA count for inputs uniform on [0, vdd] under chain
/// gating: SA `i` runs iff `x >= i / (m + 1) * vdd`, so the sum is
/// `sum_i (1 - i/(m+1)) = m - m(m-1) / (2(m+1))`.
pub fn expected_enabled_uniform(m: usize) -> f64 {
    let m = m as f64;
    m - m * (m - 1.0) / (2.0 * (m + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_values() {
        let l = RefLadder::new(3, 1.0).unwrap();
        assert_eq!(l.refs(), &[0.25, 0.5, 0.75]);
        assert_eq!(RefLadder::new(1, 1.0).unwrap().refs(), &[0.5]);
        let l7 = RefLadder::new(7, 1.0).unwrap();
        for (i, r) in l7.refs().iter().enumerate() {
            assert!((r - (i + 1) as f64 / 8.0).abs() < 1e-15);
        }
        assert!(RefLadder::new(0, 1.0).is_err());
    }

    #[test]
    fn encode_examples() {
        let l = RefLadder::new(3, 1.0).unwrap();
        let o = asc_encode(0.1, &l, Gating::Chain);
        assert_eq!(o.code.to_bitstream().to_string(), "000");
        assert_eq!(o.activity.enabled_count(), 1);

        let o = asc_encode(0.9, &l, Gating::Chain);
        assert_eq!(o.code.to_bitstream().to_string(), "111");
        assert_eq!(o.activity.enabled_count(), 3);

        let o = asc_encode(0.6, &l, Gating::Chain);
        assert_eq!(o.code.to_bitstream().to_string(), "110");
        assert_eq!(o.activity.enabled_count(), 3);
    }

    #[test]
    fn tie_goes_high() {
        let l = RefLadder::new(3, 1.0).unwrap();
        assert_eq!(asc_encode(0.5, &l, Gating::Chain).code.count(), 2);
    }

    #[test]
    fn out_of_range_clamps() {
        let l = RefLadder::new(3, 1.0).unwrap();
        let o = asc_encode(1.3, &l, Gating::Chain);
        assert!(o.clamped);
        assert_eq!(o.code.count(), 3);
        let o = asc_encode(-0.2, &l, Gating::Chain);
        assert!(o.clamped);
        assert_eq!(o.code.count(), 0);
    }

    #[test]
    fn ungated_powers_every_sa() {
        let l = RefLadder::new(5, 1.0).unwrap();
        let o = asc_encode(0.0, &l, Gating::Off);
        assert_eq!(o.activity.enabled_count(), 5);
    }

    #[test]
    fn thermometer_validation() {
        assert!(ThermometerCode::from_bits(vec![true, false, true]).is_err());
        let t = ThermometerCode::from_bits(vec![true, true, false]).unwrap();
        assert_eq!(t.count(), 2);
        assert_eq!(ThermometerCode::from_count(2, 3).unwrap(), t);
        assert!(ThermometerCode::from_count(4, 3).is_err());
    }

    #[test]
    fn midpoints_encode_to_their_level() {
        for m in 1..=16 {
            let l = RefLadder::new(m, 0.9).unwrap();
            for k in 0..=m {
                let o = asc_encode(l.level_midpoint(k), &l, Gating::Chain);
                assert_eq!(o.code.count(), k);
            }
        }
    }

    #[test]
    fn uniform_closed_form_small() {
        // m = 3: SA0 always, SA1 when x >= 1/4, SA2 when x >= 2/4
        assert!((expected_enabled_uniform(3) - (1.0 + 0.75 + 0.5)).abs() < 1e-12);
    }
}

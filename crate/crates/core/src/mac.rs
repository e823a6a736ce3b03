//! Mixed-signal stochastic MAC: AND-gate products feeding a two-sided unit
//! capacitor array.
//!
//! Each side holds `m * N` product capacitors plus one tail capacitor. In the
//! accumulate phase (S1 on, S2 off) the positive side's top plate settles to
//! `VP = n_p / (mN + 1) * VDD` and the negative side's to
//! `VN = (mN - n_n) / (mN + 1) * VDD`. In the share phase (S2 on, S1 off)
//! the two nodes are connected and both settle to `(VP + VN) / 2`, which is
//! affine in the signed MAC result `n_p - n_n`.
//!
//! [`charge_oracle`] recomputes the same voltages from per-capacitor charge
//! bookkeeping and is the reference the closed forms are tested against.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sc::Bitstream;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MacConfig {
    /// Bits per stochastic number.
    pub m: usize,
    /// Number of IN/W pairs.
    pub n_inputs: usize,
    /// Supply voltage (V).
    pub vdd: f64,
}

impl MacConfig {
    pub fn new(m: usize, n_inputs: usize, vdd: f64) -> Result<Self> {
        let cfg = Self { m, n_inputs, vdd };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n_inputs == 0 {
            return Err(Error::InvalidParameter(format!(
                "MAC needs m >= 1 and N >= 1 (got m = {}, N = {})",
                self.m, self.n_inputs
            )));
        }
        if !(self.vdd > 0.0 && self.vdd.is_finite()) {
            return Err(Error::InvalidParameter(format!("vdd {} must be positive", self.vdd)));
        }
        Ok(())
    }

    /// `m * N`, the number of product capacitors per side.
    pub fn product_slots(&self) -> u64 {
        (self.m * self.n_inputs) as u64
    }

    /// Capacitors per side, including the tail.
    pub fn caps_per_side(&self) -> u64 {
        self.product_slots() + 1
    }

    /// Output voltage for `n_p == n_n`.
    pub fn baseline_voltage(&self) -> f64 {
        let mn = self.product_slots() as f64;
        0.5 * mn / (mn + 1.0) * self.vdd
    }

    /// Voltage step per unit of `n_p - n_n`.
    pub fn lsb_voltage(&self) -> f64 {
        0.5 * self.vdd / self.caps_per_side() as f64
    }
}

/// Magnitude bitstream plus sign; `positive == true` is `SIGN = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedStream {
    pub magnitude: Bitstream,
    pub positive: bool,
}

impl SignedStream {
    pub fn new(magnitude: Bitstream, positive: bool) -> Self {
        Self { magnitude, positive }
    }

    pub fn sign(&self) -> i64 {
        if self.positive {
            1
        } else {
            -1
        }
    }
}

impl fmt::Display for SignedStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.positive { '+' } else { '-' }, self.magnitude)
    }
}

/// `+101` / `-101`; a bare magnitude is positive.
impl FromStr for SignedStream {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (positive, rest) = match s.as_bytes().first() {
            Some(b'+') => (true, &s[1..]),
            Some(b'-') => (false, &s[1..]),
            _ => (true, s),
        };
        Ok(Self {
            magnitude: rest.parse()?,
            positive,
        })
    }
}

/// Validated operands: `N` inputs and `N` signed weights, all `m` bits.
#[derive(Clone, Debug, PartialEq)]
pub struct MacInputs {
    inputs: Vec<Bitstream>,
    weights: Vec<SignedStream>,
}

impl MacInputs {
    pub fn new(inputs: Vec<Bitstream>, weights: Vec<SignedStream>) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::Empty("MAC inputs"));
        }
        if inputs.len() != weights.len() {
            return Err(Error::SizeMismatch(format!(
                "{} inputs but {} weights",
                inputs.len(),
                weights.len()
            )));
        }
        let m = inputs[0].len();
        for s in inputs.iter().chain(weights.iter().map(|w| &w.magnitude)) {
            if s.len() != m {
                return Err(Error::SizeMismatch(format!(
                    "operand {s} has {} bits, expected {m}",
                    s.len()
                )));
            }
        }
        Ok(Self { inputs, weights })
    }

    pub fn m(&self) -> usize {
        self.inputs[0].len()
    }

    pub fn n_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn inputs(&self) -> &[Bitstream] {
        &self.inputs
    }

    pub fn weights(&self) -> &[SignedStream] {
        &self.weights
    }

    fn check(&self, cfg: &MacConfig) -> Result<()> {
        cfg.validate()?;
        if self.m() != cfg.m || self.n_inputs() != cfg.n_inputs {
            return Err(Error::SizeMismatch(format!(
                "operands are m = {}, N = {} but config is m = {}, N = {}",
                self.m(),
                self.n_inputs(),
                cfg.m,
                cfg.n_inputs
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductCounts {
    /// Ones among AND products of positive-sign pairs.
    pub positive: u64,
    /// Ones among AND products of negative-sign pairs.
    pub negative: u64,
}

impl ProductCounts {
    pub fn net(&self) -> i64 {
        self.positive as i64 - self.negative as i64
    }
}

/// Switch state of the array. S1 and S2 are never on together.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MacPhase {
    Idle,
    Accumulate,
    Share,
}

impl MacPhase {
    /// `(EN, S1, S2)`.
    pub fn switches(self) -> (bool, bool, bool) {
        match self {
            MacPhase::Idle => (false, false, false),
            MacPhase::Accumulate => (true, true, false),
            MacPhase::Share => (true, false, true),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MacOutcome {
    pub voltage: f64,
    pub counts: ProductCounts,
    pub phases: Vec<MacPhase>,
}

/// Per-pair AND product streams.
pub fn product_streams(inputs: &MacInputs) -> Vec<Bitstream> {
    inputs
        .inputs
        .iter()
        .zip(&inputs.weights)
        .map(|(a, w)| crate::sc::sc_mul(a, &w.magnitude).expect("lengths validated"))
        .collect()
}

/// Splits product ones by sign.
pub fn counts_from_products(products: &[Bitstream], weights: &[SignedStream]) -> ProductCounts {
    let mut c = ProductCounts::default();
    for (p, w) in products.iter().zip(weights) {
        let ones = p.count_ones() as u64;
        if w.positive {
            c.positive += ones;
        } else {
            c.negative += ones;
        }
    }
    c
}

pub fn count_products(inputs: &MacInputs) -> ProductCounts {
    let mut c = ProductCounts::default();
    for (a, w) in inputs.inputs.iter().zip(&inputs.weights) {
        let ones = a
            .bits()
            .iter()
            .zip(w.magnitude.bits())
            .filter(|(&x, &y)| x && y)
            .count() as u64;
        if w.positive {
            c.positive += ones;
        } else {
            c.negative += ones;
        }
    }
    c
}

/// Accumulate-phase voltages `(VP, VN)`.
pub fn phase1_voltages(counts: ProductCounts, cfg: &MacConfig) -> Result<(f64, f64)> {
    cfg.validate()?;
    let mn = cfg.product_slots();
    if counts.positive > mn || counts.negative > mn || counts.positive + counts.negative > mn {
        return Err(Error::InvalidParameter(format!(
            "counts n_p = {}, n_n = {} exceed m*N = {mn}",
            counts.positive, counts.negative
        )));
    }
    let denom = (mn + 1) as f64;
    let vp = counts.positive as f64 / denom * cfg.vdd;
    let vn = (mn - counts.negative) as f64 / denom * cfg.vdd;
    Ok((vp, vn))
}

/// Share-phase voltage: two equal-capacitance nodes average.
pub fn charge_share(vp: f64, vn: f64) -> f64 {
    0.5 * (vp + vn)
}

pub fn mac_evaluate(inputs: &MacInputs, cfg: &MacConfig) -> Result<MacOutcome> {
    inputs.check(cfg)?;
    let counts = count_products(inputs);
    mac_from_counts(counts, cfg)
}

/// The analog half of [`mac_evaluate`], for callers that form products
/// themselves (e.g. to inject faults into the product streams).
pub fn mac_from_counts(counts: ProductCounts, cfg: &MacConfig) -> Result<MacOutcome> {
    let (vp, vn) = phase1_voltages(counts, cfg)?;
    Ok(MacOutcome {
        voltage: charge_share(vp, vn),
        counts,
        phases: vec![MacPhase::Idle, MacPhase::Accumulate, MacPhase::Share],
    })
}

/// Inverts the share-phase voltage to `n_p - n_n`.
pub fn decode_voltage(v: f64, cfg: &MacConfig) -> Result<i64> {
    cfg.validate()?;
    let mn = cfg.product_slots() as f64;
    let max = mn / (mn + 1.0) * cfg.vdd;
    let tol = 1e-9 * cfg.vdd;
    if !(v >= -tol && v <= max + tol) {
        return Err(Error::OutOfRange {
            value: v,
            min: 0.0,
            max,
        });
    }
    Ok((2.0 * v / cfg.vdd * (mn + 1.0) - mn).round() as i64)
}

/// Per-capacitor scale factors for mismatch studies. Each side lists
/// `m * N` product capacitors followed by the tail.
#[derive(Clone, Debug, PartialEq)]
pub struct CapMismatch {
    pub positive: Vec<f64>,
    pub negative: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleTrace {
    pub vp: f64,
    pub vn: f64,
    pub shared: f64,
    /// Total top-plate charge at the end of the accumulate phase.
    pub charge_before_share: f64,
    pub charge_after_share: f64,
}

/// Explicit charge bookkeeping over `2 (mN + 1)` capacitors.
///
/// Positive side: a product capacitor's bottom plate is driven to VDD when
/// its AND output is 1 on a positive pair, else ground. Negative side: driven
/// to ground when its AND output is 1 on a negative pair, else VDD. Both tail
/// capacitors sit at ground. Node voltage is charge over capacitance.
pub fn charge_oracle(inputs: &MacInputs, cfg: &MacConfig, mismatch: Option<&CapMismatch>) -> Result<OracleTrace> {
    inputs.check(cfg)?;
    let slots = cfg.caps_per_side() as usize;
    if let Some(mm) = mismatch {
        if mm.positive.len() != slots || mm.negative.len() != slots {
            return Err(Error::SizeMismatch(format!(
                "mismatch vectors must have {slots} entries per side"
            )));
        }
    }
    let cap = |side: &dyn Fn(&CapMismatch) -> &Vec<f64>, k: usize| -> f64 { mismatch.map_or(1.0, |mm| side(mm)[k]) };

    let mut q_pos = 0.0;
    let mut c_pos = 0.0;
    let mut q_neg = 0.0;
    let mut c_neg = 0.0;
    let mut k = 0;
    for (a, w) in inputs.inputs.iter().zip(&inputs.weights) {
        for j in 0..cfg.m {
            let product = a.bit(j) && w.magnitude.bit(j);
            let cp = cap(&|mm| &mm.positive, k);
            let cn = cap(&|mm| &mm.negative, k);
            let drive_pos = if product && w.positive { cfg.vdd } else { 0.0 };
            let drive_neg = if product && !w.positive { 0.0 } else { cfg.vdd };
            q_pos += cp * drive_pos;
            c_pos += cp;
            q_neg += cn * drive_neg;
            c_neg += cn;
            k += 1;
        }
    }
    // tails, grounded
    c_pos += cap(&|mm| &mm.positive, k);
    c_neg += cap(&|mm| &mm.negative, k);

    let vp = q_pos / c_pos;
    let vn = q_neg / c_neg;
    let charge_before_share = c_pos * vp + c_neg * vn;
    let shared = charge_before_share / (c_pos + c_neg);
    let charge_after_share = (c_pos + c_neg) * shared;
    Ok(OracleTrace {
        vp,
        vn,
        shared,
        charge_before_share,
        charge_after_share,
    })
}

//! Exact dipole line strengths for `J → J+1` transitions.
//!
//! Everything in this module is rational arithmetic: the squared
//! Clebsch-Gordan coefficients of a `J_g → J_e = J_g + 1` transition are
//! ratios of small integers, and the trap mechanism lives in their
//! differences, so no floating-point drift is tolerated here. The table is
//! normalized so the strongest (cycling) line `m = -J, q = -1` equals 1,
//! which is also the normalization in which the single-wave force formula is
//! quoted.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Result, TroopError};

/// Largest supported ground angular momentum (25/2) unless a custom cap is given.
pub const DEFAULT_JG_CAP: HalfInt = HalfInt { twice: 25 };

/// Angular momentum stored as twice its value, so half-integers are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt {
    twice: i32,
}

impl HalfInt {
    pub fn from_twice(twice: i32) -> Self {
        HalfInt { twice }
    }

    pub fn from_integer(n: i32) -> Self {
        HalfInt { twice: 2 * n }
    }

    pub fn twice(self) -> i32 {
        self.twice
    }

    pub fn as_f64(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    /// A valid ground momentum for the trap: J_g ≥ 1/2.
    pub fn is_valid_ground(self) -> bool {
        self.twice >= 1
    }

    pub fn plus_one(self) -> Self {
        HalfInt { twice: self.twice + 2 }
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl FromStr for HalfInt {
    type Err = String;

    /// Accepts `"4"`, `"9/2"` and exact decimals like `"4.5"`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let n: i32 = num.trim().parse().map_err(|_| format!("bad numerator in '{s}'"))?;
            let d: i32 = den.trim().parse().map_err(|_| format!("bad denominator in '{s}'"))?;
            return match d {
                1 => Ok(HalfInt::from_integer(n)),
                2 => Ok(HalfInt::from_twice(n)),
                _ => Err(format!("'{s}' is not a half-integer")),
            };
        }
        if let Ok(n) = s.parse::<i32>() {
            return Ok(HalfInt::from_integer(n));
        }
        if let Ok(x) = s.parse::<f64>() {
            let twice = (2.0 * x).round();
            if (2.0 * x - twice).abs() < 1e-9 {
                return Ok(HalfInt::from_twice(twice as i32));
            }
        }
        Err(format!("'{s}' is not a half-integer"))
    }
}

impl Serialize for HalfInt {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = HalfInt;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer, half-integer string like \"9/2\", or x.5 float")
            }
            fn visit_i64<E: serde::de::Error>(self, v: i64) -> std::result::Result<HalfInt, E> {
                Ok(HalfInt::from_integer(v as i32))
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> std::result::Result<HalfInt, E> {
                Ok(HalfInt::from_integer(v as i32))
            }
            fn visit_f64<E: serde::de::Error>(self, v: f64) -> std::result::Result<HalfInt, E> {
                v.to_string().parse().map_err(serde::de::Error::custom)
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> std::result::Result<HalfInt, E> {
                v.parse().map_err(serde::de::Error::custom)
            }
        }
        de.deserialize_any(V)
    }
}

/// One atomic transition `J_g → J_e = J_g + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionSpec {
    pub jg: HalfInt,
    pub je: HalfInt,
    /// Natural linewidth, rad/s.
    pub gamma: f64,
    /// Wavevector magnitude, 1/m.
    pub k: f64,
}

impl TransitionSpec {
    /// Builds the transition with `J_e = J_g + 1` implied.
    pub fn new(jg: HalfInt, gamma: f64, k: f64) -> Result<Self> {
        if !jg.is_valid_ground() {
            return Err(TroopError::InvalidTransition(format!(
                "trap requires J_g ≥ 1/2, got J_g = {jg}"
            )));
        }
        if gamma <= 0.0 || !gamma.is_finite() {
            return Err(TroopError::InvalidTransition(format!(
                "linewidth must be positive, got {gamma}"
            )));
        }
        if k <= 0.0 || !k.is_finite() {
            return Err(TroopError::InvalidTransition(format!(
                "wavevector must be positive, got {k}"
            )));
        }
        Ok(TransitionSpec { jg, je: jg.plus_one(), gamma, k })
    }

    /// As [`TransitionSpec::new`] but with an explicit `J_e`, rejected unless `J_e = J_g + 1`.
    pub fn with_je(jg: HalfInt, je: HalfInt, gamma: f64, k: f64) -> Result<Self> {
        if je != jg.plus_one() {
            return Err(TroopError::InvalidTransition(format!(
                "only J_e = J_g + 1 is supported, got J_g = {jg}, J_e = {je}"
            )));
        }
        TransitionSpec::new(jg, gamma, k)
    }

    /// The cesium D2 cycling transition `4 → 5` with default constants.
    pub fn cesium_d2() -> Self {
        TransitionSpec::new(
            HalfInt::from_integer(4),
            crate::constants::CESIUM_D2_GAMMA,
            crate::constants::CESIUM_D2_WAVEVECTOR,
        )
        .expect("cesium defaults are valid")
    }

    /// Recoil momentum ħk of one photon, kg·m/s.
    pub fn recoil_momentum(&self) -> f64 {
        crate::constants::HBAR * self.k
    }
}

/// Dipole polarization component relative to the quantization axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    /// Δm = −1
    SigmaMinus,
    /// Δm = 0
    Pi,
    /// Δm = +1
    SigmaPlus,
}

impl Polarization {
    pub const ALL: [Polarization; 3] = [Polarization::SigmaMinus, Polarization::Pi, Polarization::SigmaPlus];

    /// Change of magnetic quantum number driven by this component.
    pub fn delta_m(self) -> i32 {
        match self {
            Polarization::SigmaMinus => -1,
            Polarization::Pi => 0,
            Polarization::SigmaPlus => 1,
        }
    }

    /// Index 0,1,2 for σ−, π, σ+; matches the layout of fraction arrays.
    pub fn index(self) -> usize {
        match self {
            Polarization::SigmaMinus => 0,
            Polarization::Pi => 1,
            Polarization::SigmaPlus => 2,
        }
    }

    pub fn mirrored(self) -> Self {
        match self {
            Polarization::SigmaMinus => Polarization::SigmaPlus,
            Polarization::Pi => Polarization::Pi,
            Polarization::SigmaPlus => Polarization::SigmaMinus,
        }
    }
}

/// Exact squared-coefficient table for one transition.
///
/// `s_abs` is indexed by ground sublevel and polarization and normalized so
/// the cycling line equals 1. `b_decay` holds the branching ratios out of
/// each excited sublevel; they sum to exactly 1 where the sublevel is
/// radiatively connected.
#[derive(Debug, Clone, PartialEq)]
pub struct LineStrengthTable {
    jg: HalfInt,
    s_abs: Vec<[Rational64; 3]>,
    b_decay: Vec<[Rational64; 3]>,
    s_abs_f: Vec<[f64; 3]>,
    b_decay_f: Vec<[f64; 3]>,
}

/// Builds the line-strength table with the default momentum cap.
pub fn line_strengths(spec: &TransitionSpec) -> Result<LineStrengthTable> {
    line_strengths_capped(spec, DEFAULT_JG_CAP)
}

/// As [`line_strengths`] with an explicit cap on `J_g`.
pub fn line_strengths_capped(spec: &TransitionSpec, cap: HalfInt) -> Result<LineStrengthTable> {
    if spec.je != spec.jg.plus_one() {
        return Err(TroopError::InvalidTransition(format!(
            "line strengths require J_e = J_g + 1, got J_g = {}, J_e = {}",
            spec.jg, spec.je
        )));
    }
    if !spec.jg.is_valid_ground() {
        return Err(TroopError::InvalidTransition(format!(
            "trap requires J_g ≥ 1/2, got J_g = {}",
            spec.jg
        )));
    }
    if spec.jg > cap {
        return Err(TroopError::InvalidTransition(format!(
            "J_g = {} exceeds the supported cap {cap}; raise the cap explicitly if intended",
            spec.jg
        )));
    }

    let tj = spec.jg.twice() as i64;
    let n_ground = (tj + 1) as usize;
    let n_excited = (tj + 3) as usize;
    // Common denominator (2J+1)(2J+2); numerators are products of integers
    // because J ± m is always integral.
    let denom = (tj + 1) * (tj + 2);

    let mut s_abs = vec![[Rational64::zero(); 3]; n_ground];
    for (i, row) in s_abs.iter_mut().enumerate() {
        // twice_m = -tj + 2i; J±m in integer form: (tj ± twice_m)/2
        let twice_m = -tj + 2 * i as i64;
        let jpm = (tj + twice_m) / 2; // J + m
        let jmm = (tj - twice_m) / 2; // J - m
        row[Polarization::SigmaPlus.index()] = Rational64::new((jpm + 1) * (jpm + 2), denom);
        row[Polarization::SigmaMinus.index()] = Rational64::new((jmm + 1) * (jmm + 2), denom);
        row[Polarization::Pi.index()] = Rational64::new(2 * (jmm + 1) * (jpm + 1), denom);
    }
    debug_assert!(s_abs[0][Polarization::SigmaMinus.index()].is_one());

    // Decay branching from each excited sublevel: same squared coefficients,
    // renormalized to sum 1 over the open channels.
    let mut b_decay = vec![[Rational64::zero(); 3]; n_excited];
    for (e, row) in b_decay.iter_mut().enumerate() {
        let twice_me = -(tj + 2) + 2 * e as i64;
        let mut total = Rational64::zero();
        for q in Polarization::ALL {
            let twice_mg = twice_me - 2 * q.delta_m() as i64;
            if twice_mg.abs() <= tj {
                let gi = ((twice_mg + tj) / 2) as usize;
                row[q.index()] = s_abs[gi][q.index()];
                total += row[q.index()];
            }
        }
        if !total.is_zero() {
            for v in row.iter_mut() {
                *v /= total;
            }
        }
    }

    let to_f = |rows: &[[Rational64; 3]]| {
        rows.iter()
            .map(|r| {
                [
                    *r[0].numer() as f64 / *r[0].denom() as f64,
                    *r[1].numer() as f64 / *r[1].denom() as f64,
                    *r[2].numer() as f64 / *r[2].denom() as f64,
                ]
            })
            .collect::<Vec<_>>()
    };
    let s_abs_f = to_f(&s_abs);
    let b_decay_f = to_f(&b_decay);

    Ok(LineStrengthTable { jg: spec.jg, s_abs, b_decay, s_abs_f, b_decay_f })
}

impl LineStrengthTable {
    pub fn jg(&self) -> HalfInt {
        self.jg
    }

    /// Number of ground sublevels, 2J+1.
    pub fn n_ground(&self) -> usize {
        self.s_abs.len()
    }

    /// Number of excited sublevels, 2J+3.
    pub fn n_excited(&self) -> usize {
        self.b_decay.len()
    }

    /// Ground sublevel m for table index `i` (i = 0 is m = −J).
    pub fn ground_m(&self, i: usize) -> HalfInt {
        HalfInt::from_twice(-self.jg.twice() + 2 * i as i32)
    }

    /// Table index for ground sublevel m, if in range.
    pub fn ground_index(&self, m: HalfInt) -> Option<usize> {
        let t = m.twice() + self.jg.twice();
        if t < 0 || t % 2 != 0 {
            return None;
        }
        let i = (t / 2) as usize;
        (i < self.n_ground()).then_some(i)
    }

    /// Excited-sublevel table index for m_e, if in range.
    pub fn excited_index(&self, me: HalfInt) -> Option<usize> {
        let t = me.twice() + self.jg.twice() + 2;
        if t < 0 || t % 2 != 0 {
            return None;
        }
        let i = (t / 2) as usize;
        (i < self.n_excited()).then_some(i)
    }

    /// Absorption strength out of ground sublevel `m` via polarization `q`;
    /// zero outside the manifold.
    pub fn s_abs(&self, m: HalfInt, q: Polarization) -> Rational64 {
        self.ground_index(m).map_or_else(Rational64::zero, |i| self.s_abs[i][q.index()])
    }

    /// Branching ratio for decay out of excited sublevel `me` via `q`.
    pub fn branching(&self, me: HalfInt, q: Polarization) -> Rational64 {
        self.excited_index(me).map_or_else(Rational64::zero, |i| self.b_decay[i][q.index()])
    }

    /// Row of absorption strengths (σ−, π, σ+) as f64 for ground index `i`.
    pub fn s_abs_row_f64(&self, i: usize) -> &[f64; 3] {
        &self.s_abs_f[i]
    }

    /// Row of branching ratios (σ−, π, σ+) as f64 for excited index `e`.
    pub fn branching_row_f64(&self, e: usize) -> &[f64; 3] {
        &self.b_decay_f[e]
    }

    /// Checks the polarization sum rule Σ_q s_abs(m, q) and returns the
    /// common value. The sum is the same rational for every m; the first
    /// violating sublevel is reported otherwise.
    pub fn sum_rule(&self) -> Result<Rational64> {
        let sum_of = |row: &[Rational64; 3]| row[0] + row[1] + row[2];
        let expected = sum_of(&self.s_abs[0]);
        for (i, row) in self.s_abs.iter().enumerate().skip(1) {
            if sum_of(row) != expected {
                return Err(TroopError::InvalidTransition(format!(
                    "sum rule violated at m = {}: {} ≠ {}",
                    self.ground_m(i),
                    sum_of(row),
                    expected
                )));
            }
        }
        Ok(expected)
    }

    /// Iterator over `(m, [σ−, π, σ+])` rows in exact form.
    pub fn rows(&self) -> impl Iterator<Item = (HalfInt, &[Rational64; 3])> {
        self.s_abs.iter().enumerate().map(|(i, row)| (self.ground_m(i), row))
    }
}

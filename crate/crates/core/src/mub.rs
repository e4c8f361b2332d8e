//! Single-qubit states from the two mutually unbiased bases {|+⟩,|−⟩} and
//! {|+i⟩,|−i⟩}, each written as (|0⟩ + e^{iφ}|1⟩)/√2.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{Amplitude, PureState};

/// Which of the four MUB qubit states a participant holds.
///
/// The numeric label (used for state numbering) is *not* monotone in φ:
/// `|+⟩ = 0, |−⟩ = 1, |+i⟩ = 2, |−i⟩ = 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PhaseLabel {
    Plus,
    Minus,
    PlusI,
    MinusI,
}

impl PhaseLabel {
    pub const ALL: [PhaseLabel; 4] = [
        PhaseLabel::Plus,
        PhaseLabel::Minus,
        PhaseLabel::PlusI,
        PhaseLabel::MinusI,
    ];

    pub fn from_digit(d: u8) -> Result<Self> {
        Self::ALL
            .get(d as usize)
            .copied()
            .ok_or(Error::InvalidLabel(d))
    }

    /// Numbering digit: `|+⟩→0, |−⟩→1, |+i⟩→2, |−i⟩→3`.
    pub fn digit(self) -> u8 {
        match self {
            PhaseLabel::Plus => 0,
            PhaseLabel::Minus => 1,
            PhaseLabel::PlusI => 2,
            PhaseLabel::MinusI => 3,
        }
    }

    /// φ in units of π/2.
    pub fn quarter_turns(self) -> u8 {
        match self {
            PhaseLabel::Plus => 0,
            PhaseLabel::PlusI => 1,
            PhaseLabel::Minus => 2,
            PhaseLabel::MinusI => 3,
        }
    }

    pub fn from_quarter_turns(q: u8) -> Self {
        match q % 4 {
            0 => PhaseLabel::Plus,
            1 => PhaseLabel::PlusI,
            2 => PhaseLabel::Minus,
            _ => PhaseLabel::MinusI,
        }
    }

    /// φ in radians.
    pub fn phase(self) -> f64 {
        f64::from(self.quarter_turns()) * PI / 2.0
    }

    /// `e^{iφ}`, exact for the four MUB angles.
    pub fn phasor(self) -> Amplitude {
        quarter_phasor(self.quarter_turns())
    }

    /// Label whose phase is shifted by `q` quarter turns.
    pub fn shifted(self, q: u8) -> Self {
        Self::from_quarter_turns(self.quarter_turns() + q)
    }

    pub fn ket(self) -> &'static str {
        match self {
            PhaseLabel::Plus => "|+⟩",
            PhaseLabel::Minus => "|−⟩",
            PhaseLabel::PlusI => "|+i⟩",
            PhaseLabel::MinusI => "|−i⟩",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            PhaseLabel::Plus => "+",
            PhaseLabel::Minus => "-",
            PhaseLabel::PlusI => "+i",
            PhaseLabel::MinusI => "-i",
        }
    }
}

impl fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.ket())
    }
}

/// `i^q` without trigonometric rounding.
pub(crate) fn quarter_phasor(q: u8) -> Amplitude {
    match q % 4 {
        0 => Amplitude::new(1.0, 0.0),
        1 => Amplitude::new(0.0, 1.0),
        2 => Amplitude::new(-1.0, 0.0),
        _ => Amplitude::new(0.0, -1.0),
    }
}

/// `(|0⟩ + e^{iφ}|1⟩)/√2` for the given label.
pub fn mub_qubit(label: PhaseLabel) -> PureState {
    let h = Amplitude::new(FRAC_1_SQRT_2, 0.0);
    PureState::from_raw(vec![h, h * label.phasor()])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Amplitude, re: f64, im: f64) -> bool {
        (a - Amplitude::new(re, im)).norm() < 1e-15
    }

    #[test]
    fn qubit_amplitudes() {
        let s = FRAC_1_SQRT_2;
        let plus = mub_qubit(PhaseLabel::Plus);
        assert!(close(plus.amplitudes()[0], s, 0.0) && close(plus.amplitudes()[1], s, 0.0));
        let minus = mub_qubit(PhaseLabel::Minus);
        assert!(close(minus.amplitudes()[1], -s, 0.0));
        let plus_i = mub_qubit(PhaseLabel::PlusI);
        assert!(close(plus_i.amplitudes()[1], 0.0, s));
        let minus_i = mub_qubit(PhaseLabel::MinusI);
        assert!(close(minus_i.amplitudes()[0], s, 0.0) && close(minus_i.amplitudes()[1], 0.0, -s));
    }

    #[test]
    fn label_angle_map() {
        assert_eq!(PhaseLabel::from_digit(0).unwrap().phase(), 0.0);
        assert_eq!(PhaseLabel::from_digit(1).unwrap().phase(), PI);
        assert_eq!(PhaseLabel::from_digit(2).unwrap().phase(), PI / 2.0);
        assert_eq!(PhaseLabel::from_digit(3).unwrap().phase(), 3.0 * PI / 2.0);
        assert!(matches!(
            PhaseLabel::from_digit(4),
            Err(Error::InvalidLabel(4))
        ));
        for l in PhaseLabel::ALL {
            assert_eq!(PhaseLabel::from_digit(l.digit()).unwrap(), l);
            assert_eq!(PhaseLabel::from_quarter_turns(l.quarter_turns()), l);
        }
    }

    #[test]
    fn bases_are_mutually_unbiased() {
        for a in PhaseLabel::ALL {
            for b in PhaseLabel::ALL {
                let o = mub_qubit(a).inner(&mub_qubit(b)).unwrap().norm_sqr();
                let dq = (4 + a.quarter_turns() - b.quarter_turns()) % 4;
                let want = [1.0, 0.5, 0.0, 0.5][dq as usize];
                assert!((o - want).abs() < 1e-15, "{a} {b}");
            }
        }
    }
}

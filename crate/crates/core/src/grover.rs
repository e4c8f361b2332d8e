//! Grover iterations with generalized reflections, and the iteration/phase
//! schedule that reaches the marked state with certainty.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Error, Result};
use crate::reflection::{
    reflect_basis_in_place, reflect_in_place, reflection_coefficient, ReflectionSpec,
};
use crate::state::{Amplitude, PureState};

/// Grid step of the coarse Ω scan.
pub const SCAN_STEP: f64 = 1e-3;
/// Bracket width at which golden-section refinement stops.
pub const REFINE_TOLERANCE: f64 = 1e-10;

/// One iteration: oracle reflection first, then the reflection about the
/// initial state.
pub fn grover_iteration(
    state: &PureState,
    oracle_axis: &PureState,
    init_axis: &PureState,
    omega: f64,
) -> Result<PureState> {
    check_dims(state.dim(), oracle_axis.dim())?;
    check_dims(state.dim(), init_axis.dim())?;
    let oracle = ReflectionSpec::new(oracle_axis.clone(), omega)?;
    let init = ReflectionSpec::new(init_axis.clone(), omega)?;
    init.apply(&oracle.apply(state)?)
}

/// Iteration counts and reflection phase for a register of `2^Q` states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub dim: usize,
    /// Total Grover iterations.
    pub k: usize,
    /// Iterations started by the dealer.
    pub k1: usize,
    /// Iterations left to the padlock after its leading `U_S`.
    pub k2: usize,
    pub omega_star: f64,
}

impl Schedule {
    pub fn participants(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    /// Secure split `k1 = max(1, ⌊k/2⌋)`.
    pub fn secure_k1(k: usize) -> usize {
        (k / 2).max(1)
    }

    pub fn is_secure_split(&self) -> bool {
        self.k1 == Self::secure_k1(self.k)
    }

    /// Same schedule with a different dealer/padlock split. `k1 = 0` leaves
    /// all `2k` reflections to the padlock.
    pub fn with_k1(self, k1: usize) -> Result<Self> {
        if k1 > self.k {
            return Err(Error::InvalidSchedule(format!(
                "k1 = {k1} exceeds k = {}",
                self.k
            )));
        }
        Ok(Self {
            k1,
            k2: self.k - k1,
            ..self
        })
    }

    /// Reflections applied by the dealer: `U_M G^{k1−1}` is `2k1 − 1` of them.
    pub fn encode_reflections(&self) -> usize {
        (2 * self.k1).saturating_sub(1)
    }

    /// Reflections applied by the padlock; the two counts always sum to `2k`.
    pub fn decode_reflections(&self) -> usize {
        2 * self.k - self.encode_reflections()
    }
}

/// `θ = arcsin(1/√d)` and the fractional iteration count `k′ = (π/2 − θ)/(2θ)`.
pub fn fractional_iterations(dim: usize) -> f64 {
    let theta = (1.0 / (dim as f64).sqrt()).asin();
    (PI / 2.0 - theta) / (2.0 * theta)
}

/// Long's phase-matching estimate `2·arcsin(√d·sin(π/(4J+6)))`, `J = ⌊k′⌋`.
/// Only a starting point; [`optimal_phase`] is authoritative.
pub fn phase_matching_estimate(dim: usize) -> f64 {
    let j = fractional_iterations(dim).floor();
    let s = (dim as f64).sqrt() * (PI / (4.0 * j + 6.0)).sin();
    2.0 * s.min(1.0).asin()
}

pub fn iteration_schedule(participants: usize) -> Result<Schedule> {
    if participants < 2 {
        return Err(Error::InvalidParticipants(
            participants,
            "at least two participants are required",
        ));
    }
    if participants > 20 {
        return Err(Error::InvalidParticipants(
            participants,
            "register too large to simulate",
        ));
    }
    let dim = 1usize << participants;
    let kp = fractional_iterations(dim);
    let (k, omega_star) = if (kp - kp.round()).abs() < 1e-9 {
        (kp.round() as usize, PI)
    } else {
        let k = kp.floor() as usize + 1;
        (k, optimal_phase(dim, k))
    };
    let k1 = Schedule::secure_k1(k);
    Ok(Schedule {
        dim,
        k,
        k1,
        k2: k - k1,
        omega_star,
    })
}

/// Probability of reading the marked state after `k` iterations from the
/// all-|+⟩ product state, marked index 0. Any MUB product start and any
/// marked index give the same value.
pub fn success_probability(dim: usize, omega: f64, k: usize) -> f64 {
    let init = PureState::uniform(dim).expect("dim > 0");
    let mut psi = init.amplitudes().to_vec();
    run_iterations(&mut psi, init.amplitudes(), 0, omega, k);
    psi[0].norm_sqr()
}

pub(crate) fn run_iterations(
    psi: &mut [Amplitude],
    init: &[Amplitude],
    marked: usize,
    omega: f64,
    k: usize,
) {
    let phasor = Amplitude::from_polar(1.0, omega);
    let coef = reflection_coefficient(omega);
    for _ in 0..k {
        reflect_basis_in_place(psi, marked, phasor);
        reflect_in_place(psi, init, coef);
    }
}

/// Phase in `(0, π]` maximizing [`success_probability`] for `k` iterations:
/// coarse scan at [`SCAN_STEP`] followed by golden-section refinement.
pub fn optimal_phase(dim: usize, k: usize) -> f64 {
    let f = |w: f64| success_probability(dim, w, k);
    let steps = (PI / SCAN_STEP).floor() as usize;
    let mut best = (PI, f(PI));
    for i in 1..=steps {
        let w = i as f64 * SCAN_STEP;
        let p = f(w);
        if p > best.1 {
            best = (w, p);
        }
    }
    let lo = (best.0 - SCAN_STEP).max(0.0);
    let hi = (best.0 + SCAN_STEP).min(PI);
    let refined = golden_section_max(f, lo, hi, REFINE_TOLERANCE);
    if f(refined) >= best.1 {
        refined
    } else {
        best.0
    }
}

fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

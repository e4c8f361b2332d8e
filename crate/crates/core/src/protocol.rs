//! The secret-sharing protocol: message chunking, dealer initial states,
//! encoding, and padlock decoding.
//!
//! The honest operator string for one chunk is `k` Grover iterations,
//! oracle first: `U_M, U_S, U_M, U_S, …` (`2k` reflections). The dealer
//! applies the first `2k1 − 1` of them, ending on `U_M`, and ships the
//! qubits. The padlock applies the remaining `2k2 + 1`, starting with `U_S`.

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Error, Result};
use crate::grover::{iteration_schedule, Schedule};
use crate::mub::{mub_qubit, PhaseLabel};
use crate::reflection::{reflect_basis_in_place, reflect_in_place, reflection_coefficient};
use crate::state::{tensor, Amplitude, PureState};

/// Splits `value` into `Q`-bit groups, most significant group first. The
/// binary string is left-padded with zeros to a multiple of `Q`; zero is a
/// single empty group.
pub fn chunk_message(value: u64, participants: usize) -> Result<Vec<usize>> {
    check_participants(participants)?;
    let bits = (64 - value.leading_zeros() as usize).max(1);
    let groups = bits.div_ceil(participants);
    let mask = (1u64 << participants) - 1;
    Ok((0..groups)
        .rev()
        .map(|g| {
            let shift = g * participants;
            if shift >= 64 {
                0
            } else {
                ((value >> shift) & mask) as usize
            }
        })
        .collect())
}

/// Inverse of [`chunk_message`].
pub fn reassemble_message(chunks: &[usize], participants: usize) -> Result<u64> {
    check_participants(participants)?;
    let mut v: u128 = 0;
    for &c in chunks {
        if c >= 1 << participants {
            return Err(Error::IndexOutOfRange {
                index: c,
                dim: 1 << participants,
            });
        }
        v = (v << participants) | c as u128;
        if v > u64::MAX as u128 {
            return Err(Error::Usage("reassembled message exceeds 64 bits".into()));
        }
    }
    Ok(v as u64)
}

fn check_participants(q: usize) -> Result<()> {
    if q < 2 {
        return Err(Error::InvalidParticipants(
            q,
            "at least two participants are required",
        ));
    }
    if q > 20 {
        return Err(Error::InvalidParticipants(
            q,
            "register too large to simulate",
        ));
    }
    Ok(())
}

/// The dealer's per-chunk choice of one MUB qubit per participant, dealer
/// order (first participant is the most significant qubit).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InitialState {
    labels: Vec<PhaseLabel>,
}

impl InitialState {
    pub fn new(labels: Vec<PhaseLabel>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Empty);
        }
        Ok(Self { labels })
    }

    /// All qubits in `label`.
    pub fn uniform(participants: usize, label: PhaseLabel) -> Self {
        Self {
            labels: vec![label; participants],
        }
    }

    pub fn labels(&self) -> &[PhaseLabel] {
        &self.labels
    }

    pub fn participants(&self) -> usize {
        self.labels.len()
    }

    /// Base-4 number of the label digits plus one, in `1..=4^Q`.
    pub fn index(&self) -> usize {
        self.labels
            .iter()
            .fold(0, |acc, l| acc * 4 + l.digit() as usize)
            + 1
    }

    pub fn from_index(participants: usize, index: usize) -> Result<Self> {
        let max = 1usize << (2 * participants);
        if participants == 0 || index == 0 || index > max {
            return Err(Error::InvalidStateIndex { index, max });
        }
        let mut rest = index - 1;
        let mut labels = vec![PhaseLabel::Plus; participants];
        for slot in labels.iter_mut().rev() {
            *slot = PhaseLabel::from_digit((rest % 4) as u8)?;
            rest /= 4;
        }
        Ok(Self { labels })
    }

    /// Every initial state for `Q` participants in index order.
    pub fn all(participants: usize) -> impl Iterator<Item = InitialState> {
        let n = 1usize << (2 * participants);
        (1..=n).map(move |i| InitialState::from_index(participants, i).expect("index in range"))
    }

    pub fn random<R: Rng + ?Sized>(participants: usize, rng: &mut R) -> Self {
        Self {
            labels: (0..participants)
                .map(|_| PhaseLabel::ALL[rng.gen_range(0..4)])
                .collect(),
        }
    }

    /// Tensor product of the participants' MUB qubits.
    pub fn as_state(&self) -> PureState {
        let qubits: Vec<PureState> = self.labels.iter().map(|&l| mub_qubit(l)).collect();
        tensor(&qubits).expect("non-empty label list")
    }

    /// Every label's phase advanced by the matching entry of `quarter_turns`.
    pub fn shifted(&self, quarter_turns: &[u8]) -> Result<Self> {
        check_dims(self.participants(), quarter_turns.len())?;
        Ok(Self {
            labels: self
                .labels
                .iter()
                .zip(quarter_turns)
                .map(|(l, &q)| l.shifted(q))
                .collect(),
        })
    }

    /// Per-qubit `φ′ − φ` in quarter turns, `other` being the guess.
    pub fn phase_difference(&self, other: &InitialState) -> Result<Vec<u8>> {
        check_dims(self.participants(), other.participants())?;
        Ok(self
            .labels
            .iter()
            .zip(&other.labels)
            .map(|(s, g)| (4 + g.quarter_turns() - s.quarter_turns()) % 4)
            .collect())
    }
}

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.labels {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Where the register is split between dealer and participants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProtocolVariant {
    /// Dealer runs `U_M G^{k1−1}`; a padlock finishes with `G^{k2} U_S`.
    V1Padlock,
    /// Three participants only: dealer runs `U_M U_S U_M`, participants
    /// finish with `U_S` and no padlock.
    V2ThreeParty,
}

impl ProtocolVariant {
    pub fn validate(self, participants: usize) -> Result<()> {
        match self {
            ProtocolVariant::V2ThreeParty if participants != 3 => Err(Error::Unsupported(format!(
                "the three-party variant needs exactly 3 participants, got {participants}"
            ))),
            _ => Ok(()),
        }
    }
}

/// One reflection of the operator string.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    /// `U_M`, about the marked basis state.
    Oracle,
    /// `U_S`, about the (claimed) initial state.
    Initial,
}

/// `2k` reflections of `k` oracle-first Grover iterations.
pub fn honest_steps(k: usize) -> Vec<Step> {
    (0..2 * k)
        .map(|i| {
            if i % 2 == 0 {
                Step::Oracle
            } else {
                Step::Initial
            }
        })
        .collect()
}

/// Dealer-side part of the operator string.
pub fn encode_steps(sched: &Schedule) -> Vec<Step> {
    let mut s = honest_steps(sched.k);
    s.truncate(sched.encode_reflections());
    s
}

/// Padlock-side part of the operator string.
pub fn decode_steps(sched: &Schedule) -> Vec<Step> {
    honest_steps(sched.k).split_off(sched.encode_reflections())
}

/// Applies `steps` in order with the given oracle index and initial-state
/// axis.
pub(crate) fn apply_steps(
    psi: &mut [Amplitude],
    steps: &[Step],
    oracle: usize,
    init: &[Amplitude],
    omega: f64,
) {
    let phasor = Amplitude::from_polar(1.0, omega);
    let coef = reflection_coefficient(omega);
    for step in steps {
        match step {
            Step::Oracle => reflect_basis_in_place(psi, oracle, phasor),
            Step::Initial => reflect_in_place(psi, init, coef),
        }
    }
}

fn check_chunk(chunk: usize, dim: usize) -> Result<()> {
    if chunk >= dim {
        return Err(Error::IndexOutOfRange { index: chunk, dim });
    }
    Ok(())
}

fn finish(amps: Vec<Amplitude>) -> PureState {
    let mut s = PureState::from_raw(amps);
    s.renormalize_if_drifted();
    s
}

/// Dealer encoding `U_M G^{k1−1} |S⟩`.
pub fn encode(chunk: usize, s: &InitialState, omega: f64, sched: &Schedule) -> Result<PureState> {
    let init = s.as_state();
    check_dims(sched.dim, init.dim())?;
    check_chunk(chunk, sched.dim)?;
    let mut psi = init.amplitudes().to_vec();
    apply_steps(
        &mut psi,
        &encode_steps(sched),
        chunk,
        init.amplitudes(),
        omega,
    );
    Ok(finish(psi))
}

/// Trusted decoding device. It holds the marked chunk and completes the
/// search for whatever initial state it is told.
#[derive(Debug, Clone)]
pub struct Padlock {
    chunk: usize,
    omega: f64,
    sched: Schedule,
}

impl Padlock {
    pub fn new(chunk: usize, omega: f64, sched: Schedule) -> Result<Self> {
        check_chunk(chunk, sched.dim)?;
        Ok(Self {
            chunk,
            omega,
            sched,
        })
    }

    /// `G^{k2} U_S |x⟩` built from the claimed initial state.
    pub fn unlock(&self, x: &PureState, claimed: &InitialState) -> Result<PureState> {
        check_dims(self.sched.dim, x.dim())?;
        let init = claimed.as_state();
        check_dims(self.sched.dim, init.dim())?;
        let mut psi = x.amplitudes().to_vec();
        apply_steps(
            &mut psi,
            &decode_steps(&self.sched),
            self.chunk,
            init.amplitudes(),
            self.omega,
        );
        Ok(finish(psi))
    }
}

pub fn padlock_decode(
    x: &PureState,
    s: &InitialState,
    chunk: usize,
    omega: f64,
    sched: &Schedule,
) -> Result<PureState> {
    Padlock::new(chunk, omega, *sched)?.unlock(x, s)
}

fn require_three(s: &InitialState) -> Result<()> {
    ProtocolVariant::V2ThreeParty.validate(s.participants())
}

/// Three-party variant encoding `U_M U_S U_M |S⟩`.
pub fn variant2_encode(chunk: usize, s: &InitialState, omega: f64) -> Result<PureState> {
    require_three(s)?;
    check_chunk(chunk, 8)?;
    let init = s.as_state();
    let mut psi = init.amplitudes().to_vec();
    apply_steps(
        &mut psi,
        &[Step::Oracle, Step::Initial, Step::Oracle],
        chunk,
        init.amplitudes(),
        omega,
    );
    Ok(finish(psi))
}

/// Three-party variant decoding `U_S |y⟩`.
pub fn variant2_decode(y: &PureState, s: &InitialState, omega: f64) -> Result<PureState> {
    require_three(s)?;
    check_dims(8, y.dim())?;
    let init = s.as_state();
    let mut psi = y.amplitudes().to_vec();
    reflect_in_place(&mut psi, init.amplitudes(), reflection_coefficient(omega));
    Ok(finish(psi))
}

/// How the reflection phase is chosen for a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum OmegaChoice {
    /// The schedule's exact-success phase.
    Optimal,
    /// Standard Householder reflections.
    Pi,
    Explicit(f64),
}

impl OmegaChoice {
    pub fn resolve(self, sched: &Schedule) -> f64 {
        match self {
            OmegaChoice::Optimal => sched.omega_star,
            OmegaChoice::Pi => PI,
            OmegaChoice::Explicit(w) => w,
        }
    }

    pub fn validate(self) -> Result<Self> {
        if let OmegaChoice::Explicit(w) = self {
            if !(w.is_finite() && w > 0.0 && w < 2.0 * PI) {
                return Err(Error::InvalidOmega(w, "explicit phase must lie in (0, 2π)"));
            }
        }
        Ok(self)
    }
}

impl fmt::Display for OmegaChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OmegaChoice::Optimal => f.write_str("opt"),
            OmegaChoice::Pi => f.write_str("pi"),
            OmegaChoice::Explicit(w) => write!(f, "{w}"),
        }
    }
}

/// Result of one chunk of an honest run.
#[derive(Debug, Clone, Serialize)]
pub struct ChunkOutcome {
    pub chunk: usize,
    pub initial_state: InitialState,
    pub encoded: Vec<[f64; 2]>,
    /// Probability that the padlock output measures to `chunk`.
    pub probability: f64,
    pub measured: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct HonestRun {
    pub value: u64,
    pub participants: usize,
    pub omega: f64,
    pub schedule: Schedule,
    pub chunks: Vec<ChunkOutcome>,
    pub decoded: u64,
}

/// Per-chunk generator; chunk `i` is seeded with `seed + i`.
pub fn chunk_rng(seed: u64, chunk_index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(chunk_index as u64))
}

fn sample_outcome<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // u landed in the rounding gap above Σp; take the last non-zero outcome.
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// Chunks, encodes and padlock-decodes `value` end to end with freshly
/// sampled initial states, then samples a measurement per chunk.
pub fn honest_run(
    value: u64,
    participants: usize,
    omega: OmegaChoice,
    seed: u64,
) -> Result<HonestRun> {
    let sched = iteration_schedule(participants)?;
    let omega = omega.validate()?.resolve(&sched);
    let chunks = chunk_message(value, participants)?;
    let outcomes = chunks
        .iter()
        .enumerate()
        .map(|(i, &chunk)| {
            let mut rng = chunk_rng(seed, i);
            let s = InitialState::random(participants, &mut rng);
            let x = encode(chunk, &s, omega, &sched)?;
            let out = padlock_decode(&x, &s, chunk, omega, &sched)?;
            let probs = out.probabilities();
            let measured = sample_outcome(&probs, &mut rng);
            Ok(ChunkOutcome {
                chunk,
                initial_state: s,
                encoded: x.amplitudes().iter().map(|a| [a.re, a.im]).collect(),
                probability: probs[chunk],
                measured,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let measured: Vec<usize> = outcomes.iter().map(|o| o.measured).collect();
    Ok(HonestRun {
        value,
        participants,
        omega,
        schedule: sched,
        decoded: reassemble_message(&measured, participants)?,
        chunks: outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mub::PhaseLabel::*;

    #[test]
    fn chunk_examples() {
        assert_eq!(chunk_message(23, 2).unwrap(), vec![1, 1, 3]);
        assert_eq!(chunk_message(125, 3).unwrap(), vec![1, 7, 5]);
        assert_eq!(chunk_message(0, 3).unwrap(), vec![0]);
        assert_eq!(chunk_message(u64::MAX, 7).unwrap().len(), 10);
        assert!(chunk_message(5, 1).is_err());
    }

    #[test]
    fn reassemble_rejects_oversized_chunks() {
        assert!(reassemble_message(&[4], 2).is_err());
        assert_eq!(reassemble_message(&[1, 1, 3], 2).unwrap(), 23);
    }

    #[test]
    fn state_numbering() {
        assert_eq!(InitialState::new(vec![PlusI, Minus]).unwrap().index(), 10);
        assert_eq!(InitialState::new(vec![Plus, Plus]).unwrap().index(), 1);
        assert_eq!(
            InitialState::new(vec![MinusI, MinusI, MinusI])
                .unwrap()
                .index(),
            64
        );
        for s in InitialState::all(3) {
            assert_eq!(InitialState::from_index(3, s.index()).unwrap(), s);
        }
        assert!(InitialState::from_index(2, 17).is_err());
        assert!(InitialState::from_index(2, 0).is_err());
    }

    #[test]
    fn step_strings() {
        let s3 = iteration_schedule(3).unwrap();
        assert_eq!(encode_steps(&s3), vec![Step::Oracle]);
        assert_eq!(
            decode_steps(&s3),
            vec![Step::Initial, Step::Oracle, Step::Initial]
        );
        let s2 = iteration_schedule(2).unwrap();
        assert_eq!(decode_steps(&s2), vec![Step::Initial]);
        for q in 2..=7 {
            let s = iteration_schedule(q).unwrap();
            assert_eq!(encode_steps(&s).len(), 2 * s.k1 - 1);
            assert_eq!(decode_steps(&s).len(), 2 * s.k2 + 1);
            assert_eq!(encode_steps(&s).len() + decode_steps(&s).len(), 2 * s.k);
            assert_eq!(encode_steps(&s).last(), Some(&Step::Oracle));
            assert_eq!(decode_steps(&s).first(), Some(&Step::Initial));
        }
    }

    #[test]
    fn zero_phase_encoding_is_identity() {
        let s = InitialState::new(vec![PlusI, Minus]).unwrap();
        let sched = iteration_schedule(2).unwrap();
        let x = encode(2, &s, 0.0, &sched).unwrap();
        assert_eq!(x, s.as_state());
        let s3 = InitialState::new(vec![PlusI, Minus, Plus]).unwrap();
        assert_eq!(variant2_encode(3, &s3, 0.0).unwrap(), s3.as_state());
        let y = s3.as_state();
        assert_eq!(variant2_decode(&y, &s3, 0.0).unwrap(), y);
    }

    #[test]
    fn variant2_needs_three_participants() {
        let s = InitialState::new(vec![Plus, Plus]).unwrap();
        assert!(matches!(
            variant2_encode(0, &s, PI),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            variant2_decode(&s.as_state(), &s, PI),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn encode_rejects_bad_inputs() {
        let sched = iteration_schedule(3).unwrap();
        let s2 = InitialState::new(vec![Plus, Plus]).unwrap();
        assert!(matches!(
            encode(0, &s2, PI, &sched),
            Err(Error::DimensionMismatch { .. })
        ));
        let s3 = InitialState::uniform(3, Plus);
        assert!(matches!(
            encode(8, &s3, PI, &sched),
            Err(Error::IndexOutOfRange { .. })
        ));
        let x = PureState::uniform(4).unwrap();
        assert!(matches!(
            padlock_decode(&x, &s3, 0, PI, &sched),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn honest_runs() {
        let run = honest_run(23, 2, OmegaChoice::Pi, 7).unwrap();
        assert_eq!(run.decoded, 23);
        assert!(run
            .chunks
            .iter()
            .all(|c| (c.probability - 1.0).abs() < 1e-12));

        let run = honest_run(125, 3, OmegaChoice::Optimal, 11).unwrap();
        assert!(run
            .chunks
            .iter()
            .all(|c| (c.probability - 1.0).abs() < 1e-9));
        assert_eq!(run.decoded, 125);

        let run = honest_run(125, 3, OmegaChoice::Pi, 11).unwrap();
        assert!(run
            .chunks
            .iter()
            .all(|c| (c.probability - 0.945313).abs() < 1e-6));

        assert_eq!(honest_run(0, 2, OmegaChoice::Pi, 0).unwrap().decoded, 0);
    }

    #[test]
    fn honest_run_is_seed_deterministic() {
        let a = honest_run(987654321, 4, OmegaChoice::Pi, 42).unwrap();
        let b = honest_run(987654321, 4, OmegaChoice::Pi, 42).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn explicit_omega_range() {
        assert!(OmegaChoice::Explicit(0.0).validate().is_err());
        assert!(OmegaChoice::Explicit(2.0 * PI).validate().is_err());
        assert!(OmegaChoice::Explicit(1.33).validate().is_ok());
    }
}

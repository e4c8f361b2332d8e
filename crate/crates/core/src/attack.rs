//! Interception attacks: Eve captures every qubit of a chunk and tries to
//! finish the search herself with a guessed initial state `S′`.
//!
//! Because a common per-qubit phase shift is a diagonal unitary that
//! commutes with the oracle, `P_M(S, S′)` depends only on the per-qubit
//! differences `φ′ − φ`. The [`Reduction::DiffClass`] sweep evaluates one
//! representative per class (true `S` = all-|+⟩) and never expands the grid.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Error, Result};
use crate::grover::{iteration_schedule, Schedule};
use crate::mub::PhaseLabel;
use crate::protocol::{
    apply_steps, decode_steps, encode_steps, InitialState, ProtocolVariant, Step,
};
use crate::reflection::{reflect_in_place, reflection_coefficient};
use crate::state::{Amplitude, PureState};

/// Largest register the sweep accepts.
pub const MAX_SWEEP_PARTICIPANTS: usize = 7;

/// Flat grid entries evaluated per parallel task.
const BLOCK_LEN: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Run the whole padlock sequence with `S′` in place of `S`.
    Complete,
    /// Apply only `U′_S`, finishing the current iteration, then measure.
    Half,
    /// Three-party variant 2: apply `U′_S` to the intercepted `U_M U_S U_M|S⟩`.
    Variant2,
    /// No padlock: run the padlock sequence with a guessed oracle too.
    WrongOracle,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::Complete,
        Strategy::Half,
        Strategy::Variant2,
        Strategy::WrongOracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Complete => "complete",
            Strategy::Half => "half",
            Strategy::Variant2 => "variant2",
            Strategy::WrongOracle => "wrong-oracle",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown strategy `{s}`")))
    }
}

/// Which secret chunk(s) a sweep cell is evaluated for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MessageMode {
    Fixed(usize),
    /// Mean over all `2^Q` chunks.
    Average,
}

/// Oracle index Eve uses under [`Strategy::WrongOracle`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleGuess {
    Fixed(usize),
    /// Mean over all `2^Q` guesses.
    Average,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reduction {
    /// Every `(S, S′)` pair.
    Full,
    /// One representative per difference class.
    DiffClass,
}

/// Number of qubits whose guessed phase is off by ±π/2 and by π.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ErrorProfile {
    pub n_half: usize,
    pub n_pi: usize,
}

pub fn error_profile(true_s: &InitialState, guessed_s: &InitialState) -> Result<ErrorProfile> {
    let diff = true_s.phase_difference(guessed_s)?;
    Ok(profile_of_difference(&diff))
}

pub(crate) fn profile_of_difference(quarter_turns: &[u8]) -> ErrorProfile {
    let mut p = ErrorProfile { n_half: 0, n_pi: 0 };
    for &q in quarter_turns {
        match q % 4 {
            1 | 3 => p.n_half += 1,
            2 => p.n_pi += 1,
            _ => {}
        }
    }
    p
}

/// Blind-guess success probability `2^{−Q}`.
pub fn guess_baseline(participants: usize) -> f64 {
    (0.5f64).powi(participants as i32)
}

/// Everything needed to evaluate one attack cell, with the reflection
/// strings resolved once.
#[derive(Debug, Clone)]
struct Evaluator {
    omega: f64,
    encode: Vec<Step>,
    decode: Vec<Step>,
}

impl Evaluator {
    fn new(strategy: Strategy, sched: &Schedule, omega: f64) -> Result<Self> {
        let (encode, decode) = match strategy {
            Strategy::Complete | Strategy::WrongOracle => {
                (encode_steps(sched), decode_steps(sched))
            }
            Strategy::Half => (encode_steps(sched), vec![Step::Initial]),
            Strategy::Variant2 => {
                ProtocolVariant::V2ThreeParty.validate(sched.participants())?;
                (
                    vec![Step::Oracle, Step::Initial, Step::Oracle],
                    vec![Step::Initial],
                )
            }
        };
        Ok(Self {
            omega,
            encode,
            decode,
        })
    }

    fn encode_into(&self, out: &mut Vec<Amplitude>, init: &[Amplitude], chunk: usize) {
        out.clear();
        out.extend_from_slice(init);
        apply_steps(out, &self.encode, chunk, init, self.omega);
    }

    /// Probability of reading `chunk` after Eve's completion of `x`.
    fn finish(
        &self,
        x: &[Amplitude],
        guess: &[Amplitude],
        oracle: usize,
        chunk: usize,
        scratch: &mut Vec<Amplitude>,
    ) -> f64 {
        scratch.clear();
        scratch.extend_from_slice(x);
        apply_steps(scratch, &self.decode, oracle, guess, self.omega);
        scratch[chunk].norm_sqr().clamp(0.0, 1.0)
    }
}

fn check_chunk(chunk: usize, dim: usize) -> Result<()> {
    if chunk >= dim {
        return Err(Error::IndexOutOfRange { index: chunk, dim });
    }
    Ok(())
}

/// Padlock run with the guessed initial state; the oracle uses the true chunk.
pub fn complete_protocol_attack(
    x: &PureState,
    guessed: &InitialState,
    chunk: usize,
    omega: f64,
    sched: &Schedule,
) -> Result<f64> {
    wrong_oracle_attack(x, guessed, chunk, chunk, omega, sched)
}

/// Variant 2 completion: `U′_S|y⟩`, probability of `chunk`.
pub fn variant2_attack(
    y: &PureState,
    guessed: &InitialState,
    chunk: usize,
    omega: f64,
) -> Result<f64> {
    ProtocolVariant::V2ThreeParty.validate(guessed.participants())?;
    check_dims(8, y.dim())?;
    half_protocol_attack(y, guessed, chunk, omega)
}

/// `U′_S|x⟩` without any further iterations, probability of `chunk`.
pub fn half_protocol_attack(
    x: &PureState,
    guessed: &InitialState,
    chunk: usize,
    omega: f64,
) -> Result<f64> {
    let g = guessed.as_state();
    check_dims(x.dim(), g.dim())?;
    check_chunk(chunk, x.dim())?;
    let mut psi = x.amplitudes().to_vec();
    reflect_in_place(&mut psi, g.amplitudes(), reflection_coefficient(omega));
    Ok(psi[chunk].norm_sqr().clamp(0.0, 1.0))
}

/// Padlock-shaped decode `G′^{k2} U′_S` with `guessed_chunk` in the oracle;
/// probability of `true_chunk`.
pub fn wrong_oracle_attack(
    x: &PureState,
    guessed: &InitialState,
    guessed_chunk: usize,
    true_chunk: usize,
    omega: f64,
    sched: &Schedule,
) -> Result<f64> {
    let g = guessed.as_state();
    check_dims(sched.dim, x.dim())?;
    check_dims(sched.dim, g.dim())?;
    check_chunk(guessed_chunk, sched.dim)?;
    check_chunk(true_chunk, sched.dim)?;
    let mut psi = x.amplitudes().to_vec();
    apply_steps(
        &mut psi,
        &decode_steps(sched),
        guessed_chunk,
        g.amplitudes(),
        omega,
    );
    Ok(psi[true_chunk].norm_sqr().clamp(0.0, 1.0))
}

/// Parameters of an exhaustive attack sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub participants: usize,
    pub strategy: Strategy,
    pub omega: f64,
    pub message: MessageMode,
    /// Only read by [`Strategy::WrongOracle`].
    pub oracle_guess: OracleGuess,
    pub reduction: Reduction,
    /// Dealer iteration count replacing the secure split.
    pub k1: Option<usize>,
    /// Zero selects the rayon default.
    pub workers: usize,
    /// Permits a full sweep of the largest register.
    pub allow_large_full: bool,
}

impl SweepConfig {
    pub fn new(participants: usize, strategy: Strategy, omega: f64) -> Self {
        Self {
            participants,
            strategy,
            omega,
            message: MessageMode::Average,
            oracle_guess: OracleGuess::Average,
            reduction: Reduction::Full,
            k1: None,
            workers: 0,
            allow_large_full: false,
        }
    }

    pub fn schedule(&self) -> Result<Schedule> {
        let sched = iteration_schedule(self.participants)?;
        match self.k1 {
            Some(k1) => sched.with_k1(k1),
            None => Ok(sched),
        }
    }

    fn validate(&self) -> Result<Schedule> {
        let q = self.participants;
        if !(2..=MAX_SWEEP_PARTICIPANTS).contains(&q) {
            return Err(Error::InvalidParticipants(
                q,
                "sweeps support 2 to 7 participants",
            ));
        }
        if !self.omega.is_finite() {
            return Err(Error::InvalidOmega(self.omega, "must be finite"));
        }
        if self.strategy == Strategy::Variant2 {
            ProtocolVariant::V2ThreeParty.validate(q)?;
        }
        let dim = 1usize << q;
        if let MessageMode::Fixed(m) = self.message {
            check_chunk(m, dim)?;
        }
        if let OracleGuess::Fixed(m) = self.oracle_guess {
            check_chunk(m, dim)?;
        }
        if q == MAX_SWEEP_PARTICIPANTS
            && self.reduction == Reduction::Full
            && !self.allow_large_full
        {
            return Err(Error::ResourceGuard(format!(
                "a full sweep at Q = {q} evaluates {} state pairs; use the difference-class reduction or pass the override",
                1u64 << (4 * q)
            )));
        }
        self.schedule()
    }

    fn messages(&self, dim: usize) -> Vec<usize> {
        match self.message {
            MessageMode::Fixed(m) => vec![m],
            MessageMode::Average => (0..dim).collect(),
        }
    }

    /// Oracle indices per message: the true chunk unless Eve guesses it.
    fn oracles(&self, dim: usize, chunk: usize) -> Vec<usize> {
        match (self.strategy, self.oracle_guess) {
            (Strategy::WrongOracle, OracleGuess::Fixed(m)) => vec![m],
            (Strategy::WrongOracle, OracleGuess::Average) => (0..dim).collect(),
            _ => vec![chunk],
        }
    }
}

/// Attack success probabilities over `(true S, guessed S′)`. Rows and
/// columns are `state_index − 1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepGrid {
    pub config: SweepConfig,
    pub schedule: Schedule,
    /// `4^Q` for both axes of the logical grid.
    pub states: usize,
    /// Full: `states²` row-major. DiffClass: `states` entries indexed by the
    /// state index of the difference labels.
    values: Vec<f64>,
}

impl SweepGrid {
    pub fn participants(&self) -> usize {
        self.config.participants
    }

    pub fn reduction(&self) -> Reduction {
        self.config.reduction
    }

    /// Stored values, full grid or class vector.
    pub fn stored(&self) -> &[f64] {
        &self.values
    }

    /// Difference class (0-based) of a `(row, col)` pair.
    pub fn class_of(&self, row: usize, col: usize) -> usize {
        difference_class(self.participants(), row, col)
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        match self.config.reduction {
            Reduction::Full => self.values[row * self.states + col],
            Reduction::DiffClass => self.values[self.class_of(row, col)],
        }
    }

    /// Value of a difference class: row |+…+⟩, column `class`.
    pub fn class_value(&self, class: usize) -> f64 {
        self.get(0, class)
    }

    /// One row of the logical grid.
    pub fn row(&self, row: usize) -> Vec<f64> {
        (0..self.states).map(|c| self.get(row, c)).collect()
    }

    /// Number of logical `(S, S′)` pairs each stored value stands for.
    pub fn multiplicity(&self) -> u64 {
        match self.config.reduction {
            Reduction::Full => 1,
            Reduction::DiffClass => self.states as u64,
        }
    }
}

/// Class index of `(true, guessed)` given 0-based state indices.
pub fn difference_class(participants: usize, true_index: usize, guess_index: usize) -> usize {
    let mut class = 0;
    for j in (0..participants).rev() {
        let shift = 2 * j;
        let t = PhaseLabel::ALL[(true_index >> shift) & 3].quarter_turns();
        let g = PhaseLabel::ALL[(guess_index >> shift) & 3].quarter_turns();
        class = class * 4 + PhaseLabel::from_quarter_turns(4 + g - t).digit() as usize;
    }
    class
}

/// All `4^Q` initial states, flattened `state_index − 1` major.
fn state_table(participants: usize) -> (usize, Vec<Amplitude>) {
    let dim = 1usize << participants;
    let mut table = Vec::with_capacity(dim << (2 * participants));
    for s in InitialState::all(participants) {
        table.extend_from_slice(s.as_state().amplitudes());
    }
    (dim, table)
}

/// Row-level cache of encoded chunks for the current true state.
struct RowCache {
    row: usize,
    encoded: Vec<Vec<Amplitude>>,
}

/// Runs the sweep described by `config`. Output is independent of the
/// worker count.
pub fn sweep(config: &SweepConfig) -> Result<SweepGrid> {
    let sched = config.validate()?;
    let eval = Evaluator::new(config.strategy, &sched, config.omega)?;
    let q = config.participants;
    let states = 1usize << (2 * q);
    let (dim, table) = state_table(q);
    let messages = config.messages(dim);
    let oracle_sets: Vec<Vec<usize>> = messages.iter().map(|&m| config.oracles(dim, m)).collect();
    let (rows, total) = match config.reduction {
        Reduction::Full => (states, states * states),
        Reduction::DiffClass => (1, states),
    };
    debug_assert!(rows * states == total);
    let mut values = vec![0.0; total];
    let axis = |i: usize| &table[i * dim..(i + 1) * dim];

    let fill = |(block, out): (usize, &mut [f64])| {
        let mut cache = RowCache {
            row: usize::MAX,
            encoded: vec![Vec::with_capacity(dim); messages.len()],
        };
        let mut scratch = Vec::with_capacity(dim);
        for (offset, slot) in out.iter_mut().enumerate() {
            let flat = block * BLOCK_LEN + offset;
            let (row, col) = (flat / states, flat % states);
            if cache.row != row {
                for (buf, &m) in cache.encoded.iter_mut().zip(&messages) {
                    eval.encode_into(buf, axis(row), m);
                }
                cache.row = row;
            }
            let guess = axis(col);
            let mut acc = 0.0;
            for ((x, &m), oracles) in cache.encoded.iter().zip(&messages).zip(&oracle_sets) {
                let mut inner = 0.0;
                for &o in oracles {
                    inner += eval.finish(x, guess, o, m, &mut scratch);
                }
                acc += inner / oracles.len() as f64;
            }
            *slot = acc / messages.len() as f64;
        }
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Usage(format!("cannot start worker pool: {e}")))?;
    pool.install(|| values.par_chunks_mut(BLOCK_LEN).enumerate().for_each(fill));

    Ok(SweepGrid {
        config: config.clone(),
        schedule: sched,
        states,
        values,
    })
}

/// Attack probability for one `(S, S′)` pair and one chunk/oracle choice,
/// evaluated through the public per-pair functions.
pub fn pair_probability(
    strategy: Strategy,
    sched: &Schedule,
    omega: f64,
    true_s: &InitialState,
    guessed: &InitialState,
    chunk: usize,
    oracle: usize,
) -> Result<f64> {
    match strategy {
        Strategy::Complete => {
            let x = crate::protocol::encode(chunk, true_s, omega, sched)?;
            complete_protocol_attack(&x, guessed, chunk, omega, sched)
        }
        Strategy::Half => {
            let x = crate::protocol::encode(chunk, true_s, omega, sched)?;
            half_protocol_attack(&x, guessed, chunk, omega)
        }
        Strategy::Variant2 => {
            let y = crate::protocol::variant2_encode(chunk, true_s, omega)?;
            variant2_attack(&y, guessed, chunk, omega)
        }
        Strategy::WrongOracle => {
            let x = crate::protocol::encode(chunk, true_s, omega, sched)?;
            wrong_oracle_attack(&x, guessed, oracle, chunk, omega, sched)
        }
    }
}

/// Result of comparing random full evaluations against their class
/// representatives.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpotCheck {
    pub samples: usize,
    pub max_abs_diff: f64,
}

/// Samples `(S, S′, M)` triples and compares `P(S, S′, M)` with the class
/// representative `P(|+…+⟩, S′ − S, M)`. For wrong-oracle sweeps the oracle
/// guess is sampled too.
pub fn spot_check(config: &SweepConfig, samples: usize, seed: u64) -> Result<SpotCheck> {
    let sched = config.schedule()?;
    let q = config.participants;
    let dim = sched.dim;
    let plus = InitialState::uniform(q, PhaseLabel::Plus);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_abs_diff: f64 = 0.0;
    for _ in 0..samples {
        let s = InitialState::random(q, &mut rng);
        let g = InitialState::random(q, &mut rng);
        let m = match config.message {
            MessageMode::Fixed(m) => m,
            MessageMode::Average => rng.gen_range(0..dim),
        };
        let o = match (config.strategy, config.oracle_guess) {
            (Strategy::WrongOracle, OracleGuess::Fixed(o)) => o,
            (Strategy::WrongOracle, OracleGuess::Average) => rng.gen_range(0..dim),
            _ => m,
        };
        let rep = plus.shifted(&s.phase_difference(&g)?)?;
        let full = pair_probability(config.strategy, &sched, config.omega, &s, &g, m, o)?;
        let class = pair_probability(config.strategy, &sched, config.omega, &plus, &rep, m, o)?;
        max_abs_diff = max_abs_diff.max((full - class).abs());
    }
    Ok(SpotCheck {
        samples,
        max_abs_diff,
    })
}

/// Histogram bin: probability rounded to six decimals and its pair count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub probability: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackSummary {
    pub p_s: f64,
    pub p_g: f64,
    /// Descending by probability.
    pub histogram: Vec<HistogramBin>,
}

impl AttackSummary {
    pub fn count_of(&self, probability: f64) -> u64 {
        let key = bin_key(probability);
        self.histogram
            .iter()
            .find(|b| bin_key(b.probability) == key)
            .map_or(0, |b| b.count)
    }

    pub fn total_pairs(&self) -> u64 {
        self.histogram.iter().map(|b| b.count).sum()
    }
}

fn bin_key(p: f64) -> i64 {
    (p * 1e6).round() as i64
}

pub fn aggregate(grid: &SweepGrid) -> AttackSummary {
    let weight = grid.multiplicity();
    let mut bins: BTreeMap<i64, u64> = BTreeMap::new();
    let mut sum = 0.0;
    for &v in grid.stored() {
        sum += v;
        *bins.entry(bin_key(v)).or_default() += weight;
    }
    AttackSummary {
        p_s: sum / grid.stored().len() as f64,
        p_g: guess_baseline(grid.participants()),
        histogram: bins
            .into_iter()
            .rev()
            .map(|(k, count)| HistogramBin {
                probability: k as f64 / 1e6,
                count,
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mub::PhaseLabel::*;
    use crate::protocol::encode;
    use std::f64::consts::PI;

    #[test]
    fn baseline() {
        assert_eq!(guess_baseline(2), 0.25);
        assert_eq!(guess_baseline(3), 0.125);
        assert_eq!(guess_baseline(4), 0.0625);
    }

    #[test]
    fn profiles() {
        let s = |l: Vec<PhaseLabel>| InitialState::new(l).unwrap();
        assert_eq!(
            error_profile(&s(vec![Plus, Minus]), &s(vec![Plus, Minus])).unwrap(),
            ErrorProfile { n_half: 0, n_pi: 0 }
        );
        assert_eq!(
            error_profile(&s(vec![Plus, Plus]), &s(vec![PlusI, Minus])).unwrap(),
            ErrorProfile { n_half: 1, n_pi: 1 }
        );
        assert_eq!(
            error_profile(&s(vec![PlusI, MinusI]), &s(vec![MinusI, PlusI])).unwrap(),
            ErrorProfile { n_half: 0, n_pi: 2 }
        );
        assert!(error_profile(&s(vec![Plus]), &s(vec![Plus, Plus])).is_err());
    }

    #[test]
    fn eq38_case() {
        let sched = iteration_schedule(3).unwrap();
        let s = InitialState::new(vec![PlusI, Plus, Minus]).unwrap();
        let g = InitialState::new(vec![PlusI, Plus, PlusI]).unwrap();
        let x = encode(1, &s, PI, &sched).unwrap();
        let p = complete_protocol_attack(&x, &g, 1, PI, &sched).unwrap();
        assert!((p - 61.0 / 128.0).abs() < 1e-12, "{p}");
    }

    #[test]
    fn correct_guess_is_honest_decode() {
        let sched = iteration_schedule(3).unwrap();
        let s = InitialState::new(vec![Minus, PlusI, MinusI]).unwrap();
        let x = encode(6, &s, sched.omega_star, &sched).unwrap();
        let p = complete_protocol_attack(&x, &s, 6, sched.omega_star, &sched).unwrap();
        assert!((p - 1.0).abs() < 1e-9);
        let w = wrong_oracle_attack(&x, &s, 6, 6, sched.omega_star, &sched).unwrap();
        assert_eq!(p, w);
    }

    #[test]
    fn half_attack_with_correct_state() {
        let sched = iteration_schedule(3).unwrap();
        let s = InitialState::uniform(3, Plus);
        let x = encode(2, &s, PI, &sched).unwrap();
        assert!((half_protocol_attack(&x, &s, 2, PI).unwrap() - 0.78125).abs() < 1e-12);
    }

    #[test]
    fn two_party_table() {
        let grid = sweep(&SweepConfig::new(2, Strategy::Complete, PI)).unwrap();
        let sum = aggregate(&grid);
        assert!((sum.p_s - 0.25).abs() < 1e-12);
        assert_eq!(sum.count_of(1.0), 16);
        assert_eq!(sum.count_of(0.5), 64);
        assert_eq!(sum.count_of(0.25), 64);
        assert_eq!(sum.count_of(0.0), 112);
        assert_eq!(sum.total_pairs(), 256);
    }

    #[test]
    fn diff_class_matches_full() {
        for strategy in [Strategy::Complete, Strategy::Half, Strategy::WrongOracle] {
            let mut cfg = SweepConfig::new(2, strategy, 1.9);
            let full = sweep(&cfg).unwrap();
            cfg.reduction = Reduction::DiffClass;
            let diff = sweep(&cfg).unwrap();
            for r in 0..16 {
                for c in 0..16 {
                    assert!(
                        (full.get(r, c) - diff.get(r, c)).abs() < 1e-12,
                        "{strategy} {r} {c}"
                    );
                }
            }
            assert_eq!(aggregate(&full).histogram, aggregate(&diff).histogram);
        }
    }

    #[test]
    fn sweep_matches_pair_functions() {
        let sched = iteration_schedule(3).unwrap();
        let mut cfg = SweepConfig::new(3, Strategy::Variant2, sched.omega_star);
        cfg.message = MessageMode::Fixed(5);
        let grid = sweep(&cfg).unwrap();
        for (r, c) in [(0, 0), (10, 33), (63, 1)] {
            let s = InitialState::from_index(3, r + 1).unwrap();
            let g = InitialState::from_index(3, c + 1).unwrap();
            let p = pair_probability(Strategy::Variant2, &sched, cfg.omega, &s, &g, 5, 5).unwrap();
            assert!((grid.get(r, c) - p).abs() < 1e-14);
        }
    }

    #[test]
    fn class_indexing() {
        assert_eq!(difference_class(2, 5, 5), 0);
        let s = InitialState::new(vec![PlusI, Minus]).unwrap();
        let g = InitialState::new(vec![MinusI, Plus]).unwrap();
        let want = InitialState::uniform(2, Plus)
            .shifted(&s.phase_difference(&g).unwrap())
            .unwrap();
        assert_eq!(
            difference_class(2, s.index() - 1, g.index() - 1),
            want.index() - 1
        );
    }

    #[test]
    fn guards() {
        let mut cfg = SweepConfig::new(7, Strategy::Complete, PI);
        assert!(matches!(sweep(&cfg), Err(Error::ResourceGuard(_))));
        cfg.participants = 4;
        cfg.strategy = Strategy::Variant2;
        assert!(matches!(sweep(&cfg), Err(Error::Unsupported(_))));
        cfg.strategy = Strategy::Complete;
        cfg.message = MessageMode::Fixed(16);
        assert!(sweep(&cfg).is_err());
        assert!(sweep(&SweepConfig::new(1, Strategy::Complete, PI)).is_err());
    }

    #[test]
    fn spot_check_finds_no_deviation() {
        let cfg = SweepConfig::new(4, Strategy::Complete, 2.0);
        let sc = spot_check(&cfg, 200, 3).unwrap();
        assert!(sc.max_abs_diff < 1e-12);
    }

    #[test]
    fn strategy_names_roundtrip() {
        for s in Strategy::ALL {
            assert_eq!(s.name().parse::<Strategy>().unwrap(), s);
        }
        assert!("bogus".parse::<Strategy>().is_err());
    }
}

//! Closed-form attack probabilities for two and three participants, the
//! error-count step function for general `Q`, and exact pair-count
//! combinatorics. These are independent cross-checks of the simulation.

use std::f64::consts::{FRAC_PI_2, SQRT_2, TAU};

use num_rational::Ratio;
use serde::Serialize;

use crate::attack::ErrorProfile;
use crate::error::{check_dims, Error, Result};
use crate::protocol::InitialState;
use crate::state::Amplitude;

/// True phases `φ` and guessed phases `φ′`, one per qubit, participant 1 first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseTuple {
    phi: Vec<f64>,
    phi_prime: Vec<f64>,
}

impl PhaseTuple {
    /// Angles must be MUB phases, i.e. multiples of π/2.
    pub fn new(phi: Vec<f64>, phi_prime: Vec<f64>) -> Result<Self> {
        check_dims(phi.len(), phi_prime.len())?;
        if phi.is_empty() {
            return Err(Error::Empty);
        }
        for &a in phi.iter().chain(&phi_prime) {
            let q = a / FRAC_PI_2;
            if !a.is_finite() || (q - q.round()).abs() > 1e-9 {
                return Err(Error::InvalidOmega(a, "phase must be a multiple of π/2"));
            }
        }
        Ok(Self { phi, phi_prime })
    }

    pub fn from_states(true_s: &InitialState, guessed: &InitialState) -> Result<Self> {
        check_dims(true_s.participants(), guessed.participants())?;
        Ok(Self {
            phi: true_s.labels().iter().map(|l| l.phase()).collect(),
            phi_prime: guessed.labels().iter().map(|l| l.phase()).collect(),
        })
    }

    pub fn participants(&self) -> usize {
        self.phi.len()
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn phi_prime(&self) -> &[f64] {
        &self.phi_prime
    }

    fn require(&self, q: usize, chunk: usize) -> Result<()> {
        if self.participants() != q {
            return Err(Error::InvalidParticipants(
                self.participants(),
                "formula is for a fixed register size",
            ));
        }
        if chunk >= 1 << q {
            return Err(Error::IndexOutOfRange {
                index: chunk,
                dim: 1 << q,
            });
        }
        Ok(())
    }

    /// Phase of basis amplitude `j`: sum of the phases of the qubits whose
    /// bit is set, participant 1 being the most significant bit.
    fn amplitude_phase(phases: &[f64], j: usize) -> f64 {
        let q = phases.len();
        (0..q)
            .filter(|&l| (j >> (q - 1 - l)) & 1 == 1)
            .map(|l| phases[l])
            .sum()
    }

    /// `⟨S′|S⟩ = Π (1 + e^{i(φ − φ′)})/2`.
    fn overlap(&self) -> Amplitude {
        self.phi
            .iter()
            .zip(&self.phi_prime)
            .map(|(p, q)| (Amplitude::new(1.0, 0.0) + cis(p - q)) / 2.0)
            .product()
    }
}

fn cis(a: f64) -> Amplitude {
    Amplitude::from_polar(1.0, a)
}

/// Two participants, complete attack, inner-product form.
pub fn pm2_closed(omega: f64, phases: &PhaseTuple, chunk: usize) -> Result<f64> {
    phases.require(2, chunk)?;
    let w = cis(omega);
    let one = Amplitude::new(1.0, 0.0);
    let a_m = PhaseTuple::amplitude_phase(&phases.phi, chunk);
    let a_m_prime = PhaseTuple::amplitude_phase(&phases.phi_prime, chunk);
    let amp = -(one - w) / 2.0 * cis(a_m_prime) * phases.overlap()
        + cis(a_m) / 8.0 * (one + w) * (one + w);
    Ok(amp.norm_sqr())
}

/// Two participants at Ω = π: product of single-qubit overlaps.
pub fn pm2_pi_factorized(phases: &PhaseTuple) -> Result<f64> {
    phases.require(2, 0)?;
    Ok(phases.overlap().norm_sqr())
}

fn pm3_coefficients(omega: f64) -> (Amplitude, Amplitude) {
    let w = cis(omega);
    let one = Amplitude::new(1.0, 0.0);
    let a = -(one - w) * (one + 14.0 * w + w * w) / (16.0 * SQRT_2);
    let b = (one + 20.0 * w + 22.0 * w.powu(2) + 20.0 * w.powu(3) + w.powu(4)) / (128.0 * SQRT_2);
    (a, b)
}

/// Three participants, complete attack, inner-product form.
pub fn pm3_closed(omega: f64, phases: &PhaseTuple, chunk: usize) -> Result<f64> {
    phases.require(3, chunk)?;
    let (a, b) = pm3_coefficients(omega);
    let a_m = PhaseTuple::amplitude_phase(&phases.phi, chunk);
    let a_m_prime = PhaseTuple::amplitude_phase(&phases.phi_prime, chunk);
    Ok((a * cis(a_m_prime - a_m) * phases.overlap() + b).norm_sqr())
}

/// `U[M]`: true phases on the set bits of `M`, guessed phases elsewhere.
pub fn u_of_message(phases: &PhaseTuple, chunk: usize) -> f64 {
    let q = phases.participants();
    (0..q)
        .map(|l| {
            if (chunk >> (q - 1 - l)) & 1 == 1 {
                phases.phi[l]
            } else {
                phases.phi_prime[l]
            }
        })
        .sum()
}

fn pm3_factored_with(
    v: Amplitude,
    w: Amplitude,
    scale: f64,
    phases: &PhaseTuple,
    chunk: usize,
) -> f64 {
    let prod: Amplitude = phases
        .phi
        .iter()
        .zip(&phases.phi_prime)
        .map(|(p, q)| cis(*p) + cis(*q))
        .product();
    scale * (v * cis(u_of_message(phases, chunk)) + w * prod).norm_sqr()
}

/// Factored phase-sum form `|V e^{iU[M]} + W Π(e^{iφ} + e^{iφ′})|² / 65536`
/// with `V`, `W` rebuilt from the inner-product coefficients.
pub fn pm3_factored(omega: f64, phases: &PhaseTuple, chunk: usize) -> Result<f64> {
    phases.require(3, chunk)?;
    let x = cis(omega);
    let one = Amplitude::new(1.0, 0.0);
    let v = SQRT_2 * (one + 20.0 * x + 22.0 * x.powu(2) + 20.0 * x.powu(3) + x.powu(4));
    let w = SQRT_2 * (x - one) * (one + 14.0 * x + x * x);
    Ok(pm3_factored_with(v, w, 1.0 / 65536.0, phases, chunk))
}

/// Decimal constants of the printed factored form and the multiple of √2
/// each one truncates.
#[allow(clippy::approx_constant)]
pub const PRINTED_SQRT2_CONSTANTS: [(f64, f64); 5] = [
    (1.41421, 1.0),
    (31.1126, 22.0),
    (67.8822, 48.0),
    (8.48528, 6.0),
    (18.3847, 13.0),
];

/// Printed overall prefactor and its exact value `2^{−16}`.
pub const PRINTED_PREFACTOR: (f64, f64) = (1.52587890e-5, 1.0 / 65536.0);

/// Whether each printed decimal is its exact constant cut to the printed
/// digits.
pub fn printed_constants_reproduced() -> bool {
    let sqrt_ok = PRINTED_SQRT2_CONSTANTS.iter().all(|&(printed, k)| {
        let exact = k * SQRT_2;
        exact >= printed - 1e-12 && exact - printed < 1e-4
    });
    let (p, e) = PRINTED_PREFACTOR;
    sqrt_ok && (e - p).abs() < 1e-13
}

/// The printed factored form verbatim, exact constants substituted. Kept for
/// reporting: its `V` does not match the inner-product form.
pub fn pm3_printed(omega: f64, phases: &PhaseTuple, chunk: usize) -> Result<f64> {
    phases.require(3, chunk)?;
    let x = cis(omega);
    let c = |k: f64| k * SQRT_2;
    let v = x.powu(6)
        * (c(1.0) + c(22.0) * x + c(48.0) * x.powu(2) - c(6.0) * x.powu(3) - c(1.0) * x.powu(4));
    let w = x.powu(7) * (c(1.0) + c(13.0) * x - c(13.0) * x.powu(2) - c(1.0) * x.powu(3));
    Ok(pm3_factored_with(v, w, PRINTED_PREFACTOR.1, phases, chunk))
}

/// Error-count step function: `2^{−n_half}` without π errors, else zero.
pub fn pm_general_closed(profile: ErrorProfile) -> f64 {
    if profile.n_pi == 0 {
        (0.5f64).powi(profile.n_half as i32)
    } else {
        0.0
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn check_table_q(q: usize) -> Result<()> {
    if !(1..=31).contains(&q) {
        return Err(Error::InvalidParticipants(q, "pair counts need 1 ≤ Q ≤ 31"));
    }
    Ok(())
}

/// Fraction of ordered `(S, S′)` pairs with exactly `r` half errors and no π
/// error: `C(Q, r)·2^r / 4^Q`.
pub fn half_error_fraction(q: usize, r: usize) -> Result<Ratio<u64>> {
    check_table_q(q)?;
    if r > q {
        return Err(Error::Usage(format!(
            "half-error count {r} exceeds Q = {q}"
        )));
    }
    Ok(Ratio::new(
        binomial(q as u64, r as u64) << r,
        1u64 << (2 * q),
    ))
}

/// Fraction of pairs with at least one π error: `1 − (3/4)^Q`.
pub fn pi_error_fraction(q: usize) -> Result<Ratio<u64>> {
    check_table_q(q)?;
    let three = 3u64.pow(q as u32);
    Ok(Ratio::new((1u64 << (2 * q)) - three, 1u64 << (2 * q)))
}

/// Pair fraction for a table row: `r` half errors, or any π error.
pub fn pair_fraction(q: usize, r: usize, any_pi: bool) -> Result<Ratio<u64>> {
    if any_pi {
        pi_error_fraction(q)
    } else {
        half_error_fraction(q, r)
    }
}

/// `Σ_r fraction(r)·2^{−r}`, which is `2^{−Q}` exactly.
pub fn expected_ps(q: usize) -> Result<Ratio<u64>> {
    (0..=q).try_fold(Ratio::from_integer(0), |acc, r| {
        Ok(acc + half_error_fraction(q, r)? * Ratio::new(1, 1u64 << r))
    })
}

/// Pair fraction printed in the general table for `r` half errors,
/// `Q!/((Q−r)!·2^{Q+r})`.
pub fn printed_half_error_fraction(q: usize, r: usize) -> Result<Ratio<u64>> {
    check_table_q(q)?;
    if r > q {
        return Err(Error::Usage(format!(
            "half-error count {r} exceeds Q = {q}"
        )));
    }
    let falling: u64 = (0..r as u64).map(|i| q as u64 - i).product();
    Ok(Ratio::new(falling, 1u64 << (q + r)))
}

/// Half-completion attack, three participants, in the printed phase-sum
/// layout. `p` are true and `q` guessed phases.
fn half_printed(omega: f64, p: &[f64], q: &[f64], chunk: usize) -> Amplitude {
    let w = cis(omega);
    let wm = cis(-omega);
    let one = Amplitude::new(1.0, 0.0);
    let e = |a: f64| cis(a);
    let (p1, p2, p3) = (p[0], p[1], p[2]);
    let (q1, q2, q3) = (q[0], q[1], q[2]);
    let single_target = |a: usize, b: usize, c: usize| {
        let t = e(-(q[a] + q[b]))
            * (e(p[a] + p[b]) + e(p[b] + q[a]) + e(p[a] + q[b]))
            * (e(p[c]) + e(q[c]));
        t - e(p[c] - 2.0 * omega) - 7.0 * e(p[c] - omega) - t * wm - e(-(omega - q[c])) + e(q[c])
    };
    match chunk {
        0 => {
            let d = [p1 - q1, p2 - q2, p3 - q3];
            let subsets: Amplitude = (1..8usize)
                .map(|mask| e((0..3).filter(|&l| mask >> l & 1 == 1).map(|l| d[l]).sum()))
                .sum();
            7.0 * wm + e(-2.0 * omega) + (wm - one) * subsets
        }
        1 => single_target(0, 1, 2),
        2 => single_target(0, 2, 1),
        4 => single_target(1, 2, 0),
        3 => {
            let s = e(p1 + p2 + p3 - q1)
                + e(p3 + q2)
                + e(p1 + p3 - q1 + q2)
                + e(p2 + q3)
                + e(p1 + p2 - q1 + q3)
                + e(q2 + q3)
                + e(p1 - q1 + q2 + q3);
            s * (wm - one) + 7.0 * e(p2 + p3 - 2.0 * omega) * (one / 7.0 + w)
        }
        5 => {
            let s = e(p1 + p2 + p3)
                + e(p2 + p3 + q1)
                + e(p3 + q1 + q2)
                + e(p1 + p2 + q3)
                + e(p2 + q1 + q3)
                + e(p1 + q2 + q3)
                + e(q1 + q2 + q3);
            s * e(-(omega + q2)) * (w - one) - 7.0 * e(p1 + p3 - 2.0 * omega) * (one / 7.0 + w)
        }
        6 => {
            let s = e(p1 + p2 + p3)
                + e(p2 + p3 + q1)
                + e(p1 + p3 + q2)
                + e(p3 + q1 + q2)
                + e(p2 + q1 + q3)
                + e(p1 + q2 + q3)
                + e(q1 + q2 + q3);
            s * e(-(omega + q3)) * (w - one) - 7.0 * e(p1 + p2 - 2.0 * omega) * (one / 7.0 + w)
        }
        _ => {
            let s = e(p2 + p3 + q1)
                + e(p1 + p3 + q2)
                + e(p3 + q1 + q2)
                + e(p1 + p2 + q3)
                + e(p2 + q1 + q3)
                + e(p1 + q2 + q3)
                + e(q1 + q2 + q3);
            s * (wm - one) + 7.0 * e(p1 + p2 + p3 - 2.0 * omega) * (one / 7.0 + w)
        }
    }
}

/// Half-completion attack probability for three participants. The printed
/// phase-sum expressions hold with `Ω` replaced by `2π − Ω`. For chunk 7
/// the prefactor `1/512` and constant `1/7` of the other chunks are used.
pub fn pm_half_closed(omega: f64, phases: &PhaseTuple, chunk: usize) -> Result<f64> {
    phases.require(3, chunk)?;
    let v = half_printed(TAU - omega, &phases.phi, &phases.phi_prime, chunk);
    Ok(v.norm_sqr() / 512.0)
}

/// The printed half-completion expressions at `Ω` itself.
pub fn pm_half_printed(omega: f64, phases: &PhaseTuple, chunk: usize) -> Result<f64> {
    phases.require(3, chunk)?;
    Ok(half_printed(omega, &phases.phi, &phases.phi_prime, chunk).norm_sqr() / 512.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mub::PhaseLabel::*;
    use std::f64::consts::PI;

    fn tuple(s: &[crate::mub::PhaseLabel], g: &[crate::mub::PhaseLabel]) -> PhaseTuple {
        PhaseTuple::from_states(
            &InitialState::new(s.to_vec()).unwrap(),
            &InitialState::new(g.to_vec()).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn two_party_at_pi() {
        let eq = tuple(&[PlusI, Minus], &[PlusI, Minus]);
        for m in 0..4 {
            assert!((pm2_closed(PI, &eq, m).unwrap() - 1.0).abs() < 1e-12);
        }
        let half = tuple(&[Plus, Plus], &[PlusI, Plus]);
        assert!((pm2_closed(PI, &half, 3).unwrap() - 0.5).abs() < 1e-12);
        assert!((pm2_pi_factorized(&half).unwrap() - 0.5).abs() < 1e-12);
        let both = tuple(&[Plus, Plus], &[PlusI, MinusI]);
        assert!((pm2_pi_factorized(&both).unwrap() - 0.25).abs() < 1e-12);
        let pi = tuple(&[Plus, Minus], &[Plus, Plus]);
        assert!(pm2_closed(PI, &pi, 1).unwrap().abs() < 1e-12);
    }

    #[test]
    fn three_party_examples() {
        let t = tuple(&[PlusI, Plus, Minus], &[PlusI, Plus, PlusI]);
        assert!((pm3_closed(PI, &t, 1).unwrap() - 61.0 / 128.0).abs() < 1e-12);
        let eq = tuple(&[Minus, PlusI, Plus], &[Minus, PlusI, Plus]);
        assert!((pm3_closed(2.12688, &eq, 4).unwrap() - 1.0).abs() < 1e-6);
        assert!((pm3_closed(PI, &eq, 4).unwrap() - 0.9453).abs() < 1e-4);
        assert!(
            (pm3_factored(1.1, &t, 6).unwrap() - pm3_closed(1.1, &t, 6).unwrap()).abs() < 1e-12
        );
    }

    #[test]
    fn printed_constants() {
        assert!(printed_constants_reproduced());
    }

    #[test]
    fn general_step_function() {
        assert_eq!(pm_general_closed(ErrorProfile { n_half: 0, n_pi: 0 }), 1.0);
        assert_eq!(pm_general_closed(ErrorProfile { n_half: 2, n_pi: 0 }), 0.25);
        assert_eq!(pm_general_closed(ErrorProfile { n_half: 0, n_pi: 1 }), 0.0);
    }

    #[test]
    fn pair_fractions() {
        assert_eq!(
            half_error_fraction(2, 1).unwrap() * 256,
            Ratio::from_integer(64)
        );
        assert_eq!(
            half_error_fraction(3, 1).unwrap() * 4096,
            Ratio::from_integer(384)
        );
        assert_eq!(pi_error_fraction(3).unwrap(), Ratio::new(37, 64));
        assert!(half_error_fraction(3, 4).is_err());
        for q in 1..=12 {
            assert_eq!(expected_ps(q).unwrap(), Ratio::new(1, 1u64 << q));
            let total = (0..=q).fold(pi_error_fraction(q).unwrap(), |a, r| {
                a + half_error_fraction(q, r).unwrap()
            });
            assert_eq!(total, Ratio::from_integer(1));
        }
        assert_ne!(
            printed_half_error_fraction(3, 1).unwrap(),
            half_error_fraction(3, 1).unwrap()
        );
        assert_eq!(
            printed_half_error_fraction(3, 1).unwrap(),
            Ratio::new(3, 8) / 2
        );
    }

    #[test]
    fn half_attack_correct_guess() {
        let eq = tuple(&[Plus, MinusI, PlusI], &[Plus, MinusI, PlusI]);
        for m in 0..8 {
            assert!(
                (pm_half_closed(PI, &eq, m).unwrap() - 0.78125).abs() < 1e-12,
                "{m}"
            );
            assert!(
                (pm_half_closed(2.12688, &eq, m).unwrap() - 0.66578).abs() < 1e-4,
                "{m}"
            );
        }
    }

    #[test]
    fn rejects_bad_phases() {
        assert!(PhaseTuple::new(vec![0.3], vec![0.0]).is_err());
        assert!(PhaseTuple::new(vec![0.0, PI], vec![0.0]).is_err());
        let t = PhaseTuple::new(vec![0.0, PI], vec![FRAC_PI_2, 0.0]).unwrap();
        assert!(pm3_closed(PI, &t, 0).is_err());
        assert!(pm2_closed(PI, &t, 4).is_err());
    }
}

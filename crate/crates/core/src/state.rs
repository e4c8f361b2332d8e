//! Pure states of a d-dimensional register.
//!
//! Basis index `j` of a multi-qubit register reads the first qubit as the most
//! significant bit, so `|q₁ q₂ … q_Q⟩ = |q₁·2^{Q-1} + … + q_Q⟩`.

use num_complex::Complex64;

use crate::error::{check_dims, Error, Result};

/// A single complex coefficient of a state in the computational basis.
pub type Amplitude = Complex64;

/// Tolerance on Σ|a_j|² accepted by [`PureState::new`].
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Deviation of the norm from one beyond which amplitudes are rescaled.
pub const DRIFT_TOLERANCE: f64 = 1e-12;

/// Normalized amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: Vec<Amplitude>,
}

impl PureState {
    /// Wraps `amps` after checking that they are finite and normalized.
    pub fn new(amps: Vec<Amplitude>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::Empty);
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm_sqr = norm_sqr(&amps);
        if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { amps })
    }

    /// Normalizes `amps` instead of rejecting them. Fails only on a zero or
    /// non-finite vector.
    pub fn normalized(mut amps: Vec<Amplitude>) -> Result<Self> {
        let n = norm_sqr(&amps).sqrt();
        if !n.is_finite() {
            return Err(Error::NonFinite);
        }
        if n == 0.0 {
            return Err(Error::NotNormalized { norm_sqr: 0.0 });
        }
        for a in &mut amps {
            *a /= n;
        }
        Self::new(amps)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        let mut amps = vec![Amplitude::new(0.0, 0.0); dim];
        amps[index] = Amplitude::new(1.0, 0.0);
        Ok(Self { amps })
    }

    /// Equal superposition of all `dim` basis states.
    pub fn uniform(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Empty);
        }
        let a = Amplitude::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(Self { amps: vec![a; dim] })
    }

    pub(crate) fn from_raw(amps: Vec<Amplitude>) -> Self {
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Amplitude] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Amplitude> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    /// `⟨self|other⟩ = Σ conj(self_j)·other_j`.
    pub fn inner(&self, other: &PureState) -> Result<Amplitude> {
        inner(self, other)
    }

    /// Born-rule probability of measuring basis state `index`.
    pub fn outcome_probability(&self, index: usize) -> Result<f64> {
        outcome_probability(self, index)
    }

    /// Full measurement distribution in the computational basis.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Multiplies every amplitude by `e^{iγ}`.
    pub fn with_global_phase(mut self, gamma: f64) -> Self {
        let p = Amplitude::from_polar(1.0, gamma);
        for a in &mut self.amps {
            *a *= p;
        }
        self
    }

    /// Rescales to unit norm if floating-point drift exceeds
    /// [`DRIFT_TOLERANCE`]. Returns whether a rescale happened.
    pub fn renormalize_if_drifted(&mut self) -> bool {
        let n = self.norm_sqr();
        if (n.sqrt() - 1.0).abs() > DRIFT_TOLERANCE {
            let s = 1.0 / n.sqrt();
            for a in &mut self.amps {
                *a *= s;
            }
            true
        } else {
            false
        }
    }
}

fn norm_sqr(amps: &[Amplitude]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

/// Kronecker product, first state most significant.
pub fn tensor(states: &[PureState]) -> Result<PureState> {
    let (first, rest) = states.split_first().ok_or(Error::Empty)?;
    let mut acc = first.amps.clone();
    for s in rest {
        acc = kron(&acc, &s.amps);
    }
    Ok(PureState { amps: acc })
}

pub(crate) fn kron(a: &[Amplitude], b: &[Amplitude]) -> Vec<Amplitude> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

pub fn inner(a: &PureState, b: &PureState) -> Result<Amplitude> {
    check_dims(a.dim(), b.dim())?;
    Ok(inner_slices(&a.amps, &b.amps))
}

#[inline]
pub(crate) fn inner_slices(a: &[Amplitude], b: &[Amplitude]) -> Amplitude {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn outcome_probability(state: &PureState, index: usize) -> Result<f64> {
    state
        .amps
        .get(index)
        .map(|a| a.norm_sqr())
        .ok_or(Error::IndexOutOfRange {
            index,
            dim: state.dim(),
        })
}

//! Generalized Householder reflections `U = I − (1 − e^{iΩ})|a⟩⟨a|`.
//!
//! Applied as a rank-1 update in O(d); the d×d matrix is never formed. For a
//! basis-state axis the update touches a single amplitude.

use std::f64::consts::TAU;

use crate::error::{check_dims, Error, Result};
use crate::state::{inner_slices, Amplitude, PureState};

/// `1 − e^{iΩ}`, the rank-1 coefficient of a reflection with phase Ω.
#[inline]
pub fn reflection_coefficient(omega: f64) -> Amplitude {
    Amplitude::new(1.0, 0.0) - Amplitude::from_polar(1.0, omega)
}

/// Axis state and phase of a generalized Householder reflection.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionSpec {
    axis: PureState,
    omega: f64,
}

impl ReflectionSpec {
    /// `omega` is reduced into `[0, 2π)`.
    pub fn new(axis: PureState, omega: f64) -> Result<Self> {
        if !omega.is_finite() {
            return Err(Error::InvalidOmega(omega, "must be finite"));
        }
        Ok(Self {
            axis,
            omega: omega.rem_euclid(TAU),
        })
    }

    pub fn axis(&self) -> &PureState {
        &self.axis
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn apply(&self, state: &PureState) -> Result<PureState> {
        apply_reflection(state, self)
    }

    /// Dense d×d matrix, row-major. Only for cross-checks and small d.
    pub fn dense_matrix(&self) -> Vec<Amplitude> {
        let a = self.axis.amplitudes();
        let d = a.len();
        let c = reflection_coefficient(self.omega);
        let mut m = vec![Amplitude::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                let id = if i == j { 1.0 } else { 0.0 };
                m[i * d + j] = Amplitude::new(id, 0.0) - c * a[i] * a[j].conj();
            }
        }
        m
    }
}

/// `ψ − (1 − e^{iΩ})·⟨a|ψ⟩·|a⟩`.
pub fn apply_reflection(state: &PureState, spec: &ReflectionSpec) -> Result<PureState> {
    check_dims(spec.axis.dim(), state.dim())?;
    let mut out = state.clone();
    reflect_in_place(
        out.amplitudes_mut(),
        spec.axis.amplitudes(),
        reflection_coefficient(spec.omega),
    );
    out.renormalize_if_drifted();
    Ok(out)
}

/// In-place rank-1 update about an arbitrary axis; `coef = 1 − e^{iΩ}`.
#[inline]
pub(crate) fn reflect_in_place(psi: &mut [Amplitude], axis: &[Amplitude], coef: Amplitude) {
    let overlap = coef * inner_slices(axis, psi);
    for (p, a) in psi.iter_mut().zip(axis) {
        *p -= overlap * a;
    }
}

/// In-place reflection about basis state `|index⟩`: multiplies that
/// amplitude by `e^{iΩ}`.
#[inline]
pub(crate) fn reflect_basis_in_place(psi: &mut [Amplitude], index: usize, phasor: Amplitude) {
    psi[index] *= phasor;
}

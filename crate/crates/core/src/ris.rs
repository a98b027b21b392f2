//! RIS and UE front-end behavior: unit-cell reflection coefficients, phase
//! conjugation, per-element saturable amplification and the UE power split.
//!
//! The amplifier is a phase-preserving soft limiter: output power
//! G0*P_in / (1 + G0*P_in/P_sat) per element, which has small-signal gain G0
//! and asymptote P_sat. The split at the UE is the multiplicative scheme
//! P_i = gamma*(1-delta)*P_r, P_e = (1-gamma)*(1-delta)*P_r, with delta*P_r
//! returned toward the RIS.

use num_complex::Complex64;

use crate::channel::FieldVector;
use crate::error::{Result, SimError};

/// Passive unit-cell reflection coefficient Gamma = A * exp(j*phi).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionCoefficient {
    amplitude: f64,
    phase: f64,
}

impl ReflectionCoefficient {
    /// Amplitude must lie in [0, 1]; the phase is wrapped into [-pi, pi).
    pub fn new(amplitude: f64, phase: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&amplitude) || !amplitude.is_finite() {
            return Err(SimError::InvalidParameter(format!(
                "reflection amplitude must be in [0, 1] (got {amplitude}); \
                 active gain belongs to the amplifier model"
            )));
        }
        if !phase.is_finite() {
            return Err(SimError::InvalidParameter("reflection phase must be finite".into()));
        }
        let tau = 2.0 * std::f64::consts::PI;
        let wrapped = (phase + std::f64::consts::PI).rem_euclid(tau) - std::f64::consts::PI;
        Ok(Self { amplitude, phase: wrapped })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::from_polar(self.amplitude, self.phase)
    }
}

/// Maps a unit-cell load impedance to its reflection coefficient
/// Gamma = (Z - Z0) / (Z + Z0).
pub fn reflection_from_impedance(z: Complex64, z0: f64) -> Result<ReflectionCoefficient> {
    let denom = z + z0;
    if denom.norm() == 0.0 {
        return Err(SimError::SingularImpedance);
    }
    let gamma = (z - z0) / denom;
    ReflectionCoefficient::new(gamma.norm(), gamma.im.atan2(gamma.re))
}

/// Applies a reflection coefficient to an incident wave.
pub fn apply_reflection(gamma: &ReflectionCoefficient, incident: Complex64) -> Complex64 {
    gamma.as_complex() * incident
}

/// Elementwise complex conjugation; amplitudes are preserved exactly.
pub fn phase_conjugate(a: &FieldVector) -> FieldVector {
    a.conjugated()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmplifierMode {
    Linear,
    Saturable,
}

/// Per-element power amplifier at the RIS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplifierModel {
    mode: AmplifierMode,
    small_signal_gain: f64,
    saturation_power: f64,
}

impl AmplifierModel {
    /// `small_signal_gain` is linear (>= 1); `saturation_power` is the
    /// per-element output asymptote in watts (> 0).
    pub fn new(mode: AmplifierMode, small_signal_gain: f64, saturation_power: f64) -> Result<Self> {
        if !(small_signal_gain >= 1.0) || !small_signal_gain.is_finite() {
            return Err(SimError::InvalidParameter(format!(
                "amplifier gain must be >= 1 (got {small_signal_gain})"
            )));
        }
        if !(saturation_power > 0.0) {
            return Err(SimError::InvalidParameter(format!(
                "saturation power must be positive (got {saturation_power})"
            )));
        }
        Ok(Self { mode, small_signal_gain, saturation_power })
    }

    pub fn linear(small_signal_gain: f64) -> Result<Self> {
        // The asymptote is unused in linear mode; any positive value works.
        Self::new(AmplifierMode::Linear, small_signal_gain, 1.0)
    }

    pub fn saturable(small_signal_gain: f64, saturation_power: f64) -> Result<Self> {
        Self::new(AmplifierMode::Saturable, small_signal_gain, saturation_power)
    }

    pub fn mode(&self) -> AmplifierMode {
        self.mode
    }

    pub fn small_signal_gain(&self) -> f64 {
        self.small_signal_gain
    }

    pub fn saturation_power(&self) -> f64 {
        self.saturation_power
    }

    /// Amplitude scale factor for an element with input power `p_in`; the
    /// phase is never touched.
    #[inline]
    fn amplitude_scale(&self, p_in: f64) -> f64 {
        match self.mode {
            AmplifierMode::Linear => self.small_signal_gain.sqrt(),
            AmplifierMode::Saturable => (self.small_signal_gain
                / (1.0 + self.small_signal_gain * p_in / self.saturation_power))
                .sqrt(),
        }
    }
}

/// Amplifies a single element; output power follows the model, phase is
/// preserved exactly.
pub fn amplify_element(model: &AmplifierModel, a: Complex64) -> Complex64 {
    a * model.amplitude_scale(a.norm_sqr())
}

/// Full RIS retro-reflection of an incoming field: conjugate the phase,
/// apply the passive reflection amplitude, then amplify per element. The
/// result is the next transmit excitation.
pub fn ris_retroreflect(
    model: &AmplifierModel,
    reflect_amplitude: f64,
    incoming: &FieldVector,
) -> FieldVector {
    FieldVector::new(
        incoming
            .amps()
            .iter()
            .map(|a| {
                let passive = a.conj() * reflect_amplitude;
                amplify_element(model, passive)
            })
            .collect(),
    )
}

/// Power-splitting ratios at the UE: `feedback` (delta) is returned to the
/// RIS, `information` (gamma) steers the split of the remainder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitRatios {
    feedback: f64,
    information: f64,
}

impl SplitRatios {
    pub fn new(feedback: f64, information: f64) -> Result<Self> {
        if !(0.0 < feedback && feedback < 1.0) {
            return Err(SimError::InvalidParameter(format!(
                "feedback ratio delta must be in (0, 1) (got {feedback})"
            )));
        }
        if !(0.0 < information && information < 1.0) {
            return Err(SimError::InvalidParameter(format!(
                "information ratio gamma must be in (0, 1) (got {information})"
            )));
        }
        if feedback + information >= 1.0 {
            return Err(SimError::InvalidParameter(format!(
                "delta + gamma must be < 1 (got {})",
                feedback + information
            )));
        }
        Ok(Self { feedback, information })
    }

    pub fn feedback(&self) -> f64 {
        self.feedback
    }

    pub fn information(&self) -> f64 {
        self.information
    }
}

/// Outcome of the UE splitting one received field.
#[derive(Debug, Clone)]
pub struct UeSplit {
    /// Conjugated field sent back toward the RIS, power delta*P_r.
    pub returned: FieldVector,
    /// Power routed to the energy harvester, (1-gamma)*(1-delta)*P_r.
    pub energy_power: f64,
    /// Power routed to the information decoder, gamma*(1-delta)*P_r.
    pub info_power: f64,
    /// Total received power P_r.
    pub received_power: f64,
}

/// UE retro-reflection: the received spatial profile is conjugated and
/// scaled by sqrt(delta) so the uplink retraces the downlink, while the
/// remaining power is split between harvesting and decoding.
pub fn ue_retroreflect(ratios: &SplitRatios, incoming: &FieldVector) -> UeSplit {
    let p_r = incoming.total_power();
    let delta = ratios.feedback();
    let gamma = ratios.information();
    let returned = incoming.conjugated().scaled(delta.sqrt());
    UeSplit {
        returned,
        energy_power: (1.0 - gamma) * (1.0 - delta) * p_r,
        info_power: gamma * (1.0 - delta) * p_r,
        received_power: p_r,
    }
}

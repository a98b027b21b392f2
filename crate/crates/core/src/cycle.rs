//! The iterative retro-reflective power cycle between the RIS and the UE.
//!
//! One round trip: the RIS excitation propagates down to the UE, the UE
//! conjugates and returns a delta fraction, the return propagates up through
//! the transposed channel, and the RIS conjugates, applies its passive
//! reflection amplitude and amplifies to form the next excitation. With a
//! linear amplifier the composition of the two conjugations and the
//! transpose collapses to a positive multiple of (H^H H), so the loop is
//! power iteration on the channel Gram matrix: the excitation aligns with
//! the dominant right singular vector and the downlink efficiency climbs to
//! sigma1^2.

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::channel::{ChannelMatrix, FieldVector};
use crate::error::{Result, SimError};
use crate::geometry::PlanarArray;
use crate::ris::{ris_retroreflect, ue_retroreflect, AmplifierModel, SplitRatios};

/// Any power beyond this is treated as divergence of the cycle.
pub const DIVERGENCE_POWER_CAP: f64 = 1e6;

/// Completed record of one round trip.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleState {
    /// 1-based iteration number.
    pub iteration: usize,
    /// Excitation transmitted by the RIS this round trip.
    pub ris_excitation: FieldVector,
    /// Transmit power |a_i|^2 in watts.
    pub p_t: f64,
    /// Power received at the UE this round trip.
    pub p_r: f64,
    /// Downlink efficiency P_r / P_t (0 when P_t = 0).
    pub eta_d: f64,
    /// Uplink efficiency: power arriving back at the RIS over the power the
    /// UE returned (0 when nothing was returned).
    pub eta_up: f64,
    /// Round-trip power loss (1 - delta*eta_up*eta_d) * P_t.
    pub loss: f64,
    /// Amplifier contribution P_t(next) - delta*eta_up*eta_d * P_t.
    pub gain: f64,
}

/// Stopping rule for the power cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceCriteria {
    /// Absolute stability margin in watts (the paper-scale noise floor).
    pub absolute_tolerance: f64,
    pub relative_tolerance: f64,
    pub max_iterations: usize,
    /// Number of consecutive stable iterations required.
    pub consecutive_hits: usize,
}

impl Default for ConvergenceCriteria {
    fn default() -> Self {
        Self {
            absolute_tolerance: 1e-6,
            relative_tolerance: 1e-6,
            max_iterations: 500,
            consecutive_hits: 3,
        }
    }
}

impl ConvergenceCriteria {
    pub fn validate(&self) -> Result<()> {
        if !(self.absolute_tolerance > 0.0) || !(self.relative_tolerance > 0.0) {
            return Err(SimError::InvalidParameter(
                "convergence tolerances must be positive".into(),
            ));
        }
        if self.max_iterations < 1 || self.consecutive_hits < 1 {
            return Err(SimError::InvalidParameter(
                "max iterations and consecutive hits must be at least 1".into(),
            ));
        }
        Ok(())
    }

    fn stable(&self, delta: f64, reference: f64) -> bool {
        delta.abs() < self.absolute_tolerance.max(self.relative_tolerance * reference)
    }
}

/// Trace of a full run.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleTrace {
    pub states: Vec<CycleState>,
    pub converged: bool,
    pub divergence_flag: bool,
}

impl CycleTrace {
    pub fn final_state(&self) -> &CycleState {
        self.states.last().expect("trace is never empty")
    }

    pub fn iterations(&self) -> usize {
        self.states.len()
    }
}

/// Uniform plane-wave illumination of the RIS: per-element power is
/// S*dx*dy. Without a seed every element starts at zero phase; with a seed
/// the phases are drawn uniformly from [-pi, pi) to demonstrate convergence
/// from arbitrary states.
pub fn initial_excitation(
    ris: &PlanarArray,
    power_density: f64,
    seed: Option<u64>,
) -> Result<FieldVector> {
    if !(power_density > 0.0) || !power_density.is_finite() {
        return Err(SimError::InvalidPower(format!(
            "power density must be positive (got {power_density})"
        )));
    }
    let amp = (power_density * ris.cell_area()).sqrt();
    let n = ris.element_count();
    let amps = match seed {
        None => vec![Complex64::new(amp, 0.0); n],
        Some(s) => {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            (0..n)
                .map(|_| {
                    let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
                    Complex64::from_polar(amp, -std::f64::consts::PI + 2.0 * std::f64::consts::PI * u)
                })
                .collect()
        }
    };
    Ok(FieldVector::new(amps))
}

/// Fixed description of one link: channel, amplifier and split ratios.
#[derive(Debug, Clone)]
pub struct CycleEngine<'a> {
    h_down: &'a ChannelMatrix,
    amplifier: AmplifierModel,
    reflect_amplitude: f64,
    ratios: SplitRatios,
}

impl<'a> CycleEngine<'a> {
    pub fn new(
        h_down: &'a ChannelMatrix,
        amplifier: AmplifierModel,
        reflect_amplitude: f64,
        ratios: SplitRatios,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&reflect_amplitude) {
            return Err(SimError::InvalidParameter(format!(
                "passive reflection amplitude must be in [0, 1] (got {reflect_amplitude})"
            )));
        }
        Ok(Self { h_down, amplifier, reflect_amplitude, ratios })
    }

    pub fn channel(&self) -> &ChannelMatrix {
        self.h_down
    }

    /// Runs one round trip for the excitation of iteration `iteration`.
    ///
    /// Returns the completed state (Eq.-level ledger: P_r = eta_d*P_t,
    /// P_t(next) = G(eta_up*delta*P_r), loss and gain as recorded fields)
    /// together with the next excitation. Non-finite field values are
    /// reported as an overflow error.
    pub fn cycle_step(
        &self,
        excitation: FieldVector,
        iteration: usize,
    ) -> Result<(CycleState, FieldVector)> {
        let p_t = excitation.total_power();
        let received = self.h_down.mul_vec(&excitation)?;
        let p_r = received.total_power();
        let eta_d = if p_t > 0.0 { p_r / p_t } else { 0.0 };

        let split = ue_retroreflect(&self.ratios, &received);
        let returned_power = split.returned.total_power();

        let uplink = self.h_down.mul_transpose_vec(&split.returned)?;
        let p_up = uplink.total_power();
        let eta_up = if returned_power > 0.0 { p_up / returned_power } else { 0.0 };

        let next = ris_retroreflect(&self.amplifier, self.reflect_amplitude, &uplink);
        let p_t_next = next.total_power();

        if !p_t_next.is_finite() || !p_r.is_finite() || !next.is_finite() {
            return Err(SimError::Divergence { iteration, power: p_t.max(p_r) });
        }

        let feedthrough = self.ratios.feedback() * eta_up * eta_d * p_t;
        let state = CycleState {
            iteration,
            ris_excitation: excitation,
            p_t,
            p_r,
            eta_d,
            eta_up,
            loss: p_t - feedthrough,
            gain: p_t_next - feedthrough,
        };
        Ok((state, next))
    }

    /// Runs the cycle until the received and transmit powers are stable for
    /// the required number of consecutive iterations (gain = loss within
    /// tolerance is implied: gain - loss is exactly the step in P_t), until
    /// `max_iterations`, or until divergence.
    ///
    /// Convergence is never declared before `min_iterations` round trips,
    /// which lets field-map checkpoints observe the transient.
    pub fn run_with_min_iterations(
        &self,
        initial: FieldVector,
        criteria: &ConvergenceCriteria,
        min_iterations: usize,
    ) -> Result<CycleTrace> {
        criteria.validate()?;
        if initial.len() != self.h_down.tx_count() {
            return Err(SimError::ShapeMismatch(format!(
                "initial excitation has {} amplitudes, RIS has {} elements",
                initial.len(),
                self.h_down.tx_count()
            )));
        }
        let mut states: Vec<CycleState> = Vec::new();
        let mut excitation = initial;
        let mut hits = 0usize;
        let mut converged = false;
        for i in 1..=criteria.max_iterations {
            let (state, next) = match self.cycle_step(excitation, i) {
                Ok(pair) => pair,
                Err(SimError::Divergence { .. }) => {
                    return Ok(CycleTrace { states, converged: false, divergence_flag: true });
                }
                Err(e) => return Err(e),
            };
            let p_t_next = state.gain - state.loss + state.p_t;
            let diverged = state.p_t > DIVERGENCE_POWER_CAP
                || state.p_r > DIVERGENCE_POWER_CAP
                || p_t_next > DIVERGENCE_POWER_CAP;
            let stable = match states.last() {
                Some(prev) => {
                    criteria.stable(state.p_r - prev.p_r, prev.p_r)
                        && criteria.stable(state.p_t - prev.p_t, prev.p_t)
                        && criteria.stable(state.gain - state.loss, state.p_t)
                }
                None => false,
            };
            states.push(state);
            if diverged {
                return Ok(CycleTrace { states, converged: false, divergence_flag: true });
            }
            hits = if stable { hits + 1 } else { 0 };
            if hits >= criteria.consecutive_hits && i >= min_iterations {
                converged = true;
                break;
            }
            excitation = next;
        }
        Ok(CycleTrace { states, converged, divergence_flag: false })
    }

    pub fn run(&self, initial: FieldVector, criteria: &ConvergenceCriteria) -> Result<CycleTrace> {
        self.run_with_min_iterations(initial, criteria, 0)
    }
}

/// Like [`CycleEngine::run`], but divergence is promoted to an error.
pub fn run_to_convergence(
    engine: &CycleEngine,
    initial: FieldVector,
    criteria: &ConvergenceCriteria,
) -> Result<CycleTrace> {
    let trace = engine.run(initial, criteria)?;
    if trace.divergence_flag {
        let last = trace.final_state();
        return Err(SimError::Divergence { iteration: last.iteration, power: last.p_t });
    }
    Ok(trace)
}

/// Steady-state downlink efficiency of a converged trace.
pub fn transmission_efficiency(trace: &CycleTrace) -> Result<f64> {
    if !trace.converged {
        return Err(SimError::NotConverged(trace.iterations()));
    }
    Ok(trace.final_state().eta_d)
}

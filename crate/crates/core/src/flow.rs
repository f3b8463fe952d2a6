//! Fixed-step RK4 integration of time-dependent vector fields.
//!
//! Deterministic by construction: no adaptive step control, so two runs
//! with the same inputs produce bit-identical trajectories. Global error
//! is O(step^4), verified by a convergence study in the test suite.

use crate::contact::{contact_vector_field, ContactPoint, ScalarField};
use crate::error::{Result, WclError};

/// Axis-aligned bounding box; trajectories leaving it are truncated.
#[derive(Debug, Clone)]
pub struct BoundingBox {
    pub half_width: f64,
}

impl Default for BoundingBox {
    fn default() -> Self {
        // Generous desk-scale box; push-to-infinity flows with large g_cap
        // are expected to leave it and get reported as truncated.
        Self { half_width: 1e4 }
    }
}

impl BoundingBox {
    pub fn contains(&self, state: &[f64]) -> bool {
        state
            .iter()
            .all(|v| v.is_finite() && v.abs() <= self.half_width)
    }
}

/// Where and when a trajectory left the bounding box.
#[derive(Debug, Clone, PartialEq)]
pub struct Truncation {
    pub time: f64,
}

/// Result of an integration: final state, plus truncation info when the
/// trajectory escaped the box (expected for push-to-infinity flows;
/// reported, not fatal).
#[derive(Debug, Clone)]
pub struct FlowOutcome {
    pub state: Vec<f64>,
    pub truncated: Option<Truncation>,
}

impl FlowOutcome {
    pub fn completed(&self) -> bool {
        self.truncated.is_none()
    }
}

/// Integrate d(state)/dt = field(t, state) from t0 to t1 with fixed-step
/// RK4. `step` is a magnitude; the sign of the time direction is inferred.
/// The step count is chosen so the final step lands exactly on t1.
pub fn rk4_flow<F>(
    field: &mut F,
    state0: &[f64],
    t0: f64,
    t1: f64,
    step: f64,
    bbox: &BoundingBox,
) -> FlowOutcome
where
    F: FnMut(f64, &[f64]) -> Vec<f64>,
{
    let span = t1 - t0;
    if span == 0.0 {
        return FlowOutcome {
            state: state0.to_vec(),
            truncated: None,
        };
    }
    let n_steps = (span.abs() / step).ceil().max(1.0) as usize;
    let h = span / n_steps as f64;
    let dim = state0.len();

    let mut state = state0.to_vec();
    let mut stage = vec![0.0; dim];
    let mut t = t0;
    for k in 0..n_steps {
        if !bbox.contains(&state) {
            return FlowOutcome {
                state,
                truncated: Some(Truncation { time: t }),
            };
        }
        let k1 = field(t, &state);
        for i in 0..dim {
            stage[i] = state[i] + 0.5 * h * k1[i];
        }
        let k2 = field(t + 0.5 * h, &stage);
        for i in 0..dim {
            stage[i] = state[i] + 0.5 * h * k2[i];
        }
        let k3 = field(t + 0.5 * h, &stage);
        for i in 0..dim {
            stage[i] = state[i] + h * k3[i];
        }
        let k4 = field(t + h, &stage);
        for i in 0..dim {
            state[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t = t0 + span * (k + 1) as f64 / n_steps as f64;
    }
    let truncated = if bbox.contains(&state) {
        None
    } else {
        Some(Truncation { time: t1 })
    };
    FlowOutcome { state, truncated }
}

/// Flow a contact point along the contact Hamiltonian field of a
/// time-dependent family `H(t)` (frozen families just ignore t).
pub fn contact_flow<'a, H>(
    family: &H,
    p0: &ContactPoint,
    t0: f64,
    t1: f64,
    step: f64,
    bbox: &BoundingBox,
) -> Result<(ContactPoint, Option<Truncation>)>
where
    H: Fn(f64) -> Box<dyn ScalarField + 'a>,
{
    let mut err: Option<WclError> = None;
    let mut field = |t: f64, state: &[f64]| -> Vec<f64> {
        let p = ContactPoint::from_state(state);
        let h = family(t);
        match contact_vector_field(h.as_ref(), &p) {
            Ok(v) => v.to_state(),
            Err(e) => {
                err.get_or_insert(e);
                vec![0.0; state.len()]
            }
        }
    };
    let out = rk4_flow(&mut field, &p0.to_state(), t0, t1, step, bbox);
    if let Some(e) = err {
        return Err(e);
    }
    Ok((ContactPoint::from_state(&out.state), out.truncated))
}

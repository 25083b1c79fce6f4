//! Per-cycle loss-of-active-material capacity fade.
//!
//! One full charge cycle at C-rate `I_c` costs `DS = a * I_c^b + c` percent
//! of capacity, with coefficients tabulated against cumulative fade and
//! interpolated linearly between table rows (clamped at the ends).
//! Accumulated fade maps proportionally onto the true cathode
//! active-material fraction and the current capacity.

use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::params::CellParams;

/// Aging-dependent fade coefficients. Each row is
/// `[q_loss_percent, a, b, c]`, rows strictly increasing in `q_loss`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LamCoeffs {
    pub rows: Vec<[f64; 4]>,
}

impl LamCoeffs {
    pub(crate) fn validate(&self) -> Result<(), String> {
        if self.rows.is_empty() {
            return Err("needs at least one row".into());
        }
        for w in self.rows.windows(2) {
            if !(w[1][0] > w[0][0]) {
                return Err("rows must strictly increase in q_loss".into());
            }
        }
        for r in &self.rows {
            if !(r[1] > 0.0 && r[2] > 0.0 && r[3] > 0.0) {
                return Err(format!("a, b, c must be positive in row at q_loss {}", r[0]));
            }
            if r.iter().any(|v| !v.is_finite()) {
                return Err("non-finite coefficient".into());
            }
        }
        Ok(())
    }

    /// Piecewise-linear interpolation of (a, b, c) in cumulative fade,
    /// clamped to the end rows outside the tabulated range.
    pub fn interp(&self, q_loss: f64) -> (f64, f64, f64) {
        let rows = &self.rows;
        if q_loss <= rows[0][0] {
            let r = rows[0];
            return (r[1], r[2], r[3]);
        }
        if q_loss >= rows[rows.len() - 1][0] {
            let r = rows[rows.len() - 1];
            return (r[1], r[2], r[3]);
        }
        let i = rows.partition_point(|r| r[0] <= q_loss) - 1;
        let (lo, hi) = (rows[i], rows[i + 1]);
        let t = (q_loss - lo[0]) / (hi[0] - lo[0]);
        (
            lo[1] + t * (hi[1] - lo[1]),
            lo[2] + t * (hi[2] - lo[2]),
            lo[3] + t * (hi[3] - lo[3]),
        )
    }

    /// Fade percent caused by one full cycle at C-rate `c_rate`.
    pub fn fade_per_cycle(&self, q_loss: f64, c_rate: f64) -> Result<f64, SimError> {
        if !(c_rate > 0.0) {
            return Err(SimError::Domain(format!(
                "c_rate must be positive, got {c_rate}"
            )));
        }
        let (a, b, c) = self.interp(q_loss);
        Ok(a * c_rate.powf(b) + c)
    }
}

/// Cumulative aging bookkeeping for one cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgingState {
    /// Cumulative capacity fade, percent.
    pub q_loss: f64,
    /// Completed cycles.
    pub cycle_index: u32,
    /// True cathode active-material fraction.
    pub eps_pos_true: f64,
    /// Current capacity, Ah.
    pub q_now: f64,
}

impl AgingState {
    pub fn fresh(params: &CellParams) -> AgingState {
        AgingState {
            q_loss: 0.0,
            cycle_index: 0,
            eps_pos_true: params.solid.eps_active_pos_init,
            q_now: params.cell.q_nominal,
        }
    }
}

/// Apply one cycle's fade at the given CC-phase C-rate.
pub fn advance_aging(
    state: &AgingState,
    coeffs: &LamCoeffs,
    params: &CellParams,
    c_rate: f64,
) -> Result<AgingState, SimError> {
    let ds = coeffs.fade_per_cycle(state.q_loss, c_rate)?;
    let q_loss = state.q_loss + ds;
    if q_loss >= 100.0 {
        return Err(SimError::CellDead);
    }
    let remaining = 1.0 - q_loss / 100.0;
    Ok(AgingState {
        q_loss,
        cycle_index: state.cycle_index + 1,
        eps_pos_true: params.solid.eps_active_pos_init * remaining,
        q_now: params.cell.q_nominal * remaining,
    })
}

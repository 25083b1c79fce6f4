//! Single Particle Model: one representative spherical particle per
//! electrode, radial Fick diffusion on conservative finite-volume shells,
//! and an algebraic terminal-voltage equation with symmetric Butler-Volmer
//! kinetics.
//!
//! Sign convention (used project-wide): `i_app > 0` charges the cell, so
//! lithium flows into the negative particle and out of the positive one.

use serde::{Deserialize, Serialize};

use crate::error::{Electrode, SimError};
use crate::linalg::solve_tridiagonal;
use crate::params::{CellParams, FARADAY};

/// Radial state of both particles plus the adjustable cathode
/// active-material fraction this model instance assumes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpmState {
    /// Shell-centered lithium concentration, negative particle (mol/m^3).
    pub conc_neg: Vec<f64>,
    /// Shell-centered lithium concentration, positive particle (mol/m^3).
    pub conc_pos: Vec<f64>,
    /// Cathode active-material volume fraction assumed by this instance.
    pub eps_pos: f64,
    /// Seconds since cycle start.
    pub time: f64,
}

impl SpmState {
    pub fn n_r(&self) -> usize {
        self.conc_neg.len()
    }
}

fn electrode_props(params: &CellParams, state_eps_pos: f64, electrode: Electrode) -> (f64, f64, f64, f64, f64) {
    // (radius, diffusivity, c_max, eps, thickness)
    match electrode {
        Electrode::Negative => (
            params.solid.radius_neg,
            params.solid.diffusivity_neg,
            params.solid.c_max_neg,
            params.solid.eps_active_neg,
            params.geometry.thickness_neg,
        ),
        Electrode::Positive => (
            params.solid.radius_pos,
            params.solid.diffusivity_pos,
            params.solid.c_max_pos,
            state_eps_pos,
            params.geometry.thickness_pos,
        ),
    }
}

/// Outward molar flux at the particle surface for an applied current
/// (mol m^-2 s^-1). Positive flux removes lithium from the particle.
fn surface_flux(params: &CellParams, eps_pos: f64, electrode: Electrode, i_app: f64) -> f64 {
    let (radius, _, _, eps, thickness) = electrode_props(params, eps_pos, electrode);
    let a_s = 3.0 * eps / radius;
    let denom = a_s * FARADAY * params.geometry.collector_area * thickness;
    match electrode {
        // charging inserts lithium into the negative particle
        Electrode::Negative => -i_app / denom,
        Electrode::Positive => i_app / denom,
    }
}

/// Uniform-concentration state matching the given state of charge through
/// the shipped stoichiometry windows.
pub fn spm_init(
    params: &CellParams,
    soc: f64,
    eps_pos: f64,
    n_r: usize,
) -> Result<SpmState, SimError> {
    if !(0.0..=1.0).contains(&soc) {
        return Err(SimError::Domain(format!("soc {soc} outside [0, 1]")));
    }
    if !(eps_pos > 0.0 && eps_pos <= 1.0) {
        return Err(SimError::Domain(format!("eps_pos {eps_pos} outside (0, 1]")));
    }
    if n_r < 4 {
        return Err(SimError::Domain(format!("n_r {n_r} below minimum of 4")));
    }
    let x = params.stoich_window.stoich(Electrode::Negative, soc);
    let y = params.stoich_window.stoich(Electrode::Positive, soc);
    Ok(spm_from_concentrations(
        params.solid.c_max_neg * x,
        params.solid.c_max_pos * y,
        eps_pos,
        n_r,
    ))
}

/// Uniform state at explicit average concentrations.
pub fn spm_from_concentrations(conc_neg: f64, conc_pos: f64, eps_pos: f64, n_r: usize) -> SpmState {
    SpmState {
        conc_neg: vec![conc_neg; n_r],
        conc_pos: vec![conc_pos; n_r],
        eps_pos,
        time: 0.0,
    }
}

fn step_electrode(
    conc: &[f64],
    radius: f64,
    diffusivity: f64,
    q_surf: f64,
    dt: f64,
) -> Vec<f64> {
    let n = conc.len();
    let dr = radius / n as f64;
    // reduced face areas r_k^2 and shell volumes (r^3 difference)/3; the
    // common 4*pi factor cancels between them
    let area = |k: usize| (k as f64 * dr).powi(2);
    let volume = |k: usize| (((k + 1) as f64 * dr).powi(3) - (k as f64 * dr).powi(3)) / 3.0;

    let mut lower = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut rhs = conc.to_vec();
    for k in 0..n {
        let v = volume(k);
        let a_in = area(k);
        let a_out = area(k + 1);
        let c_in = dt * diffusivity * a_in / (v * dr);
        let c_out = dt * diffusivity * a_out / (v * dr);
        diag[k] = 1.0;
        if k > 0 {
            diag[k] += c_in;
            lower[k] = -c_in;
        }
        if k + 1 < n {
            diag[k] += c_out;
            upper[k] = -c_out;
        } else {
            // known outward surface flux
            rhs[k] -= dt * a_out * q_surf / v;
        }
    }
    let mut scratch = Vec::new();
    solve_tridiagonal(&lower, &diag, &upper, &mut rhs, &mut scratch);
    rhs
}

/// Advance both particles by one backward-Euler step under applied current.
pub fn spm_step(
    state: &SpmState,
    params: &CellParams,
    i_app: f64,
    dt: f64,
) -> Result<SpmState, SimError> {
    if !(dt > 0.0) {
        return Err(SimError::Domain(format!("dt must be positive, got {dt}")));
    }
    let mut next = state.clone();
    for electrode in [Electrode::Negative, Electrode::Positive] {
        let (radius, diff, c_max, _, _) = electrode_props(params, state.eps_pos, electrode);
        let q_surf = surface_flux(params, state.eps_pos, electrode, i_app);
        let conc = match electrode {
            Electrode::Negative => &state.conc_neg,
            Electrode::Positive => &state.conc_pos,
        };
        let updated = step_electrode(conc, radius, diff, q_surf, dt);
        let surf = updated[updated.len() - 1] - 0.5 * (radius / updated.len() as f64) * q_surf / diff;
        if updated.iter().any(|&c| c < 0.0 || c > c_max) || surf < 0.0 || surf > c_max {
            return Err(SimError::Saturation { electrode });
        }
        match electrode {
            Electrode::Negative => next.conc_neg = updated,
            Electrode::Positive => next.conc_pos = updated,
        }
    }
    next.time = state.time + dt;
    Ok(next)
}

/// Surface concentration extrapolated from the outermost shell to the
/// particle surface using the imposed flux.
pub fn surface_concentration(
    state: &SpmState,
    params: &CellParams,
    electrode: Electrode,
    i_app: f64,
) -> f64 {
    let (radius, diff, _, _, _) = electrode_props(params, state.eps_pos, electrode);
    let q_surf = surface_flux(params, state.eps_pos, electrode, i_app);
    let conc = match electrode {
        Electrode::Negative => &state.conc_neg,
        Electrode::Positive => &state.conc_pos,
    };
    let dr = radius / conc.len() as f64;
    conc[conc.len() - 1] - 0.5 * dr * q_surf / diff
}

/// Total lithium content of an electrode (mol), shell-volume weighted.
pub fn electrode_total_moles(state: &SpmState, params: &CellParams, electrode: Electrode) -> f64 {
    let (radius, _, _, eps, thickness) = electrode_props(params, state.eps_pos, electrode);
    let conc = match electrode {
        Electrode::Negative => &state.conc_neg,
        Electrode::Positive => &state.conc_pos,
    };
    let n = conc.len();
    let dr = radius / n as f64;
    let mut reduced = 0.0; // integral of c over the particle divided by 4*pi
    for (k, &c) in conc.iter().enumerate() {
        let v = (((k + 1) as f64 * dr).powi(3) - (k as f64 * dr).powi(3)) / 3.0;
        reduced += c * v;
    }
    // particles per electrode volume times electrode volume, times 4*pi*reduced
    let electrode_volume = params.geometry.collector_area * thickness;
    3.0 * eps * electrode_volume * reduced / radius.powi(3)
}

/// Terminal voltage of the reduced model evaluated at explicitly given
/// surface concentrations.
pub fn spm_voltage_at_surfaces(
    params: &CellParams,
    eps_pos: f64,
    surf_neg: f64,
    surf_pos: f64,
    i_app: f64,
) -> Result<f64, SimError> {
    let rt_f = params.thermal_voltage();
    let mut v = i_app * params.resistance.film_resistance;
    for (electrode, surf) in [
        (Electrode::Negative, surf_neg),
        (Electrode::Positive, surf_pos),
    ] {
        let (radius, _, c_max, eps, thickness) = electrode_props(params, eps_pos, electrode);
        if surf <= 0.0 || surf >= c_max {
            return Err(SimError::Kinetics { electrode });
        }
        let stoich = surf / c_max;
        let u = params.table(electrode).eval_extrapolated(stoich);
        let k_rate = match electrode {
            Electrode::Negative => params.kinetics.rate_const_neg,
            Electrode::Positive => params.kinetics.rate_const_pos,
        };
        let i0 = k_rate * (params.electrolyte.c_init * surf * (c_max - surf)).sqrt();
        let a_s = 3.0 * eps / radius;
        let active_area = a_s * params.geometry.collector_area * thickness;
        // overpotential contribution to terminal voltage; both electrode
        // terms raise the voltage for charging current and lower it for
        // discharge
        let eta_term = 2.0 * rt_f * (i_app / (2.0 * active_area * i0)).asinh();
        match electrode {
            Electrode::Negative => v += eta_term - u,
            Electrode::Positive => v += eta_term + u,
        }
    }
    Ok(v)
}

/// Terminal voltage predicted by the reduced model at the given current.
pub fn spm_voltage(state: &SpmState, params: &CellParams, i_app: f64) -> Result<f64, SimError> {
    let surf_neg = surface_concentration(state, params, Electrode::Negative, i_app);
    let surf_pos = surface_concentration(state, params, Electrode::Positive, i_app);
    spm_voltage_at_surfaces(params, state.eps_pos, surf_neg, surf_pos, i_app)
}

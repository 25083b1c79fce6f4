//! Cell parameter set: geometry, transport, kinetics, open-circuit-potential
//! tables, stoichiometry windows, and the degradation coefficient table.
//!
//! Parameters load from a TOML file (see `docs/parameters.md`); a default
//! graphite/NMC-type 5 Ah set ships embedded in the binary. A loaded
//! `CellParams` is immutable and safe to share across threads.

use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

use crate::degradation::LamCoeffs;
use crate::error::{Electrode, SimError};

/// Faraday constant, C/mol.
pub const FARADAY: f64 = 96485.33212;
/// Universal gas constant, J/(mol K).
pub const GAS_CONSTANT: f64 = 8.314462618;

/// The TOML text of the shipped default parameter file.
pub const DEFAULT_CELL_TOML: &str = include_str!("../assets/default_cell.toml");

/// Cell sandwich regions in x order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Negative,
    Separator,
    Positive,
}

#[derive(Debug, Error)]
pub enum ParamsError {
    #[error("cannot read parameter file {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    /// Structural problem: missing field, bad type, syntax error. The message
    /// names the offending field.
    #[error("parameter schema error: {0}")]
    Schema(String),
    /// A field parsed but violates an invariant.
    #[error("invalid parameter `{field}`: {reason}")]
    Invalid { field: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub thickness_neg: f64,
    pub thickness_sep: f64,
    pub thickness_pos: f64,
    pub plate_area: f64,
    pub collector_area: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solid {
    pub radius_neg: f64,
    pub radius_pos: f64,
    pub diffusivity_neg: f64,
    pub diffusivity_pos: f64,
    pub c_max_neg: f64,
    pub c_max_pos: f64,
    pub eps_active_neg: f64,
    pub eps_active_pos_init: f64,
    pub conductivity_neg: f64,
    pub conductivity_pos: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Electrolyte {
    pub porosity_neg: f64,
    pub porosity_sep: f64,
    pub porosity_pos: f64,
    pub diffusivity: f64,
    pub conductivity: f64,
    pub bruggeman: f64,
    pub transference: f64,
    pub c_init: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Kinetics {
    pub rate_const_neg: f64,
    pub rate_const_pos: f64,
    pub alpha_a: f64,
    pub alpha_c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Resistance {
    /// Contact resistance in the terminal-voltage equation, ohm m^2.
    pub contact_area_resistance: f64,
    /// Lumped film/contact resistance of the reduced-order model, ohm.
    pub film_resistance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellGlobal {
    pub temperature: f64,
    pub q_nominal: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoichWindow {
    pub neg_at_0: f64,
    pub neg_at_100: f64,
    pub pos_at_0: f64,
    pub pos_at_100: f64,
}

impl StoichWindow {
    /// Electrode stoichiometry at a given state of charge in [0, 1].
    /// Exact at both endpoints.
    pub fn stoich(&self, electrode: Electrode, soc: f64) -> f64 {
        match electrode {
            Electrode::Negative => (1.0 - soc) * self.neg_at_0 + soc * self.neg_at_100,
            Electrode::Positive => (1.0 - soc) * self.pos_at_0 + soc * self.pos_at_100,
        }
    }
}

/// Monotone open-circuit-potential table with linear interpolation between
/// knots. Knots are `[stoichiometry, volts]` pairs covering [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OcpTable {
    pub knots: Vec<[f64; 2]>,
}

impl OcpTable {
    fn validate(&self, name: &str) -> Result<(), ParamsError> {
        let invalid = |reason: String| ParamsError::Invalid {
            field: name.to_string(),
            reason,
        };
        if self.knots.len() < 2 {
            return Err(invalid("needs at least two knots".into()));
        }
        if self.knots[0][0] != 0.0 || self.knots.last().unwrap()[0] != 1.0 {
            return Err(invalid("knots must cover stoichiometry [0, 1]".into()));
        }
        for w in self.knots.windows(2) {
            if !(w[1][0] > w[0][0]) {
                return Err(invalid(format!(
                    "stoichiometry knots must strictly increase (at {})",
                    w[1][0]
                )));
            }
            if !(w[1][1] < w[0][1]) {
                return Err(invalid(format!(
                    "potential must strictly decrease in stoichiometry (at {})",
                    w[1][0]
                )));
            }
        }
        if self.knots.iter().flatten().any(|v| !v.is_finite()) {
            return Err(invalid("non-finite knot".into()));
        }
        Ok(())
    }

    /// Interpolated potential; exact at knots. `stoich` must lie in [0, 1].
    pub fn eval(&self, stoich: f64) -> Result<f64, SimError> {
        if !(0.0..=1.0).contains(&stoich) {
            return Err(SimError::Domain(format!(
                "stoichiometry {stoich} outside [0, 1]"
            )));
        }
        Ok(self.eval_extrapolated(stoich))
    }

    /// Interpolation that extends the end segments linearly. Used by Newton
    /// iterations whose intermediate iterates may leave [0, 1] transiently;
    /// converged states are bounds-checked separately.
    pub fn eval_extrapolated(&self, stoich: f64) -> f64 {
        let seg = self.segment(stoich);
        let [s0, v0] = self.knots[seg];
        let [s1, v1] = self.knots[seg + 1];
        v0 + (stoich - s0) * (v1 - v0) / (s1 - s0)
    }

    /// Slope of the active segment (piecewise-constant derivative).
    pub fn slope(&self, stoich: f64) -> f64 {
        let seg = self.segment(stoich);
        let [s0, v0] = self.knots[seg];
        let [s1, v1] = self.knots[seg + 1];
        (v1 - v0) / (s1 - s0)
    }

    fn segment(&self, stoich: f64) -> usize {
        // Last segment whose left knot is <= stoich, clamped to valid range.
        match self
            .knots
            .binary_search_by(|k| k[0].partial_cmp(&stoich).unwrap())
        {
            Ok(i) => i.min(self.knots.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.knots.len() - 2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OcpTables {
    pub negative: OcpTable,
    pub positive: OcpTable,
}

/// The full electrochemical parameter set shared by both models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellParams {
    pub geometry: Geometry,
    pub solid: Solid,
    pub electrolyte: Electrolyte,
    pub kinetics: Kinetics,
    pub resistance: Resistance,
    pub cell: CellGlobal,
    pub stoich_window: StoichWindow,
    pub degradation: LamCoeffs,
    pub ocp: OcpTables,
}

impl CellParams {
    /// Parse and validate the shipped default parameter set.
    pub fn default_cell() -> CellParams {
        parse_params(DEFAULT_CELL_TOML).expect("embedded default parameter file is valid")
    }

    pub fn porosity(&self, region: Region) -> f64 {
        match region {
            Region::Negative => self.electrolyte.porosity_neg,
            Region::Separator => self.electrolyte.porosity_sep,
            Region::Positive => self.electrolyte.porosity_pos,
        }
    }

    /// Effective electrolyte diffusivity per region (Bruggeman scaling).
    pub fn d_e_eff(&self, region: Region) -> f64 {
        self.electrolyte.diffusivity * self.porosity(region).powf(self.electrolyte.bruggeman)
    }

    /// Effective electrolyte conductivity per region (Bruggeman scaling).
    pub fn k_eff(&self, region: Region) -> f64 {
        self.electrolyte.conductivity * self.porosity(region).powf(self.electrolyte.bruggeman)
    }

    /// Effective diffusional conductivity; negative for transference < 1 so
    /// the concentration term opposes the migration term.
    pub fn k_d_eff(&self, region: Region) -> f64 {
        2.0 * self.k_eff(region) * GAS_CONSTANT * self.cell.temperature
            * (self.electrolyte.transference - 1.0)
            / FARADAY
    }

    pub fn region_thickness(&self, region: Region) -> f64 {
        match region {
            Region::Negative => self.geometry.thickness_neg,
            Region::Separator => self.geometry.thickness_sep,
            Region::Positive => self.geometry.thickness_pos,
        }
    }

    /// Total cell thickness.
    pub fn total_thickness(&self) -> f64 {
        self.geometry.thickness_neg + self.geometry.thickness_sep + self.geometry.thickness_pos
    }

    /// Open-circuit potential of an electrode at the given stoichiometry.
    pub fn ocp(&self, electrode: Electrode, stoich: f64) -> Result<f64, SimError> {
        self.table(electrode).eval(stoich)
    }

    pub(crate) fn table(&self, electrode: Electrode) -> &OcpTable {
        match electrode {
            Electrode::Negative => &self.ocp.negative,
            Electrode::Positive => &self.ocp.positive,
        }
    }

    /// Thermal voltage RT/F.
    pub fn thermal_voltage(&self) -> f64 {
        GAS_CONSTANT * self.cell.temperature / FARADAY
    }

    fn validate(&self) -> Result<(), ParamsError> {
        let positive = |field: &str, v: f64| -> Result<(), ParamsError> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ParamsError::Invalid {
                    field: field.to_string(),
                    reason: format!("must be strictly positive, got {v}"),
                })
            }
        };
        let unit_open = |field: &str, v: f64| -> Result<(), ParamsError> {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(ParamsError::Invalid {
                    field: field.to_string(),
                    reason: format!("must lie strictly inside (0, 1), got {v}"),
                })
            }
        };

        let g = &self.geometry;
        positive("geometry.thickness_neg", g.thickness_neg)?;
        positive("geometry.thickness_sep", g.thickness_sep)?;
        positive("geometry.thickness_pos", g.thickness_pos)?;
        positive("geometry.plate_area", g.plate_area)?;
        positive("geometry.collector_area", g.collector_area)?;

        let s = &self.solid;
        positive("solid.radius_neg", s.radius_neg)?;
        positive("solid.radius_pos", s.radius_pos)?;
        positive("solid.diffusivity_neg", s.diffusivity_neg)?;
        positive("solid.diffusivity_pos", s.diffusivity_pos)?;
        positive("solid.c_max_neg", s.c_max_neg)?;
        positive("solid.c_max_pos", s.c_max_pos)?;
        positive("solid.conductivity_neg", s.conductivity_neg)?;
        positive("solid.conductivity_pos", s.conductivity_pos)?;
        unit_open("solid.eps_active_neg", s.eps_active_neg)?;
        unit_open("solid.eps_active_pos_init", s.eps_active_pos_init)?;

        let e = &self.electrolyte;
        unit_open("electrolyte.porosity_neg", e.porosity_neg)?;
        unit_open("electrolyte.porosity_sep", e.porosity_sep)?;
        unit_open("electrolyte.porosity_pos", e.porosity_pos)?;
        positive("electrolyte.diffusivity", e.diffusivity)?;
        positive("electrolyte.conductivity", e.conductivity)?;
        positive("electrolyte.bruggeman", e.bruggeman)?;
        unit_open("electrolyte.transference", e.transference)?;
        positive("electrolyte.c_init", e.c_init)?;

        let k = &self.kinetics;
        positive("kinetics.rate_const_neg", k.rate_const_neg)?;
        positive("kinetics.rate_const_pos", k.rate_const_pos)?;
        positive("kinetics.alpha_a", k.alpha_a)?;
        positive("kinetics.alpha_c", k.alpha_c)?;

        if self.resistance.contact_area_resistance < 0.0 || self.resistance.film_resistance < 0.0 {
            return Err(ParamsError::Invalid {
                field: "resistance".into(),
                reason: "resistances must be nonnegative".into(),
            });
        }

        positive("cell.temperature", self.cell.temperature)?;
        positive("cell.q_nominal", self.cell.q_nominal)?;

        let w = &self.stoich_window;
        for (f, v) in [
            ("stoich_window.neg_at_0", w.neg_at_0),
            ("stoich_window.neg_at_100", w.neg_at_100),
            ("stoich_window.pos_at_0", w.pos_at_0),
            ("stoich_window.pos_at_100", w.pos_at_100),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(ParamsError::Invalid {
                    field: f.into(),
                    reason: format!("stoichiometry must lie in [0, 1], got {v}"),
                });
            }
        }
        if w.neg_at_100 <= w.neg_at_0 {
            return Err(ParamsError::Invalid {
                field: "stoich_window.neg_at_100".into(),
                reason: "negative-electrode window must increase with SOC".into(),
            });
        }
        if w.pos_at_100 >= w.pos_at_0 {
            return Err(ParamsError::Invalid {
                field: "stoich_window.pos_at_100".into(),
                reason: "positive-electrode window must decrease with SOC".into(),
            });
        }

        self.degradation.validate().map_err(|reason| ParamsError::Invalid {
            field: "degradation.rows".into(),
            reason,
        })?;

        self.ocp.negative.validate("ocp.negative")?;
        self.ocp.positive.validate("ocp.positive")?;
        Ok(())
    }
}

/// Parse + validate a parameter TOML document.
pub fn parse_params(text: &str) -> Result<CellParams, ParamsError> {
    let params: CellParams =
        toml::from_str(text).map_err(|e| ParamsError::Schema(e.to_string()))?;
    params.validate()?;
    Ok(params)
}

/// Load a parameter file from disk.
pub fn load_params(path: impl AsRef<Path>) -> Result<CellParams, ParamsError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ParamsError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_params(&text)
}

/// Serialize a parameter set back to TOML.
pub fn serialize_params(params: &CellParams) -> String {
    toml::to_string(params).expect("CellParams serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_cell_loads_with_expected_headline_values() {
        let p = CellParams::default_cell();
        assert_eq!(p.solid.eps_active_pos_init, 0.665);
        assert_eq!(p.cell.q_nominal, 5.0);
    }

    #[test]
    fn eps_out_of_range_rejected_by_name() {
        let text = DEFAULT_CELL_TOML.replace(
            "eps_active_pos_init = 0.665",
            "eps_active_pos_init = 1.2",
        );
        let err = parse_params(&text).unwrap_err();
        match err {
            ParamsError::Invalid { field, .. } => {
                assert_eq!(field, "solid.eps_active_pos_init")
            }
            other => panic!("expected Invalid, got {other:?}"),
        }
    }

    #[test]
    fn missing_field_named_in_schema_error() {
        let text = DEFAULT_CELL_TOML.replace("diffusivity_pos = 6.0e-15\n", "");
        let err = parse_params(&text).unwrap_err();
        match err {
            ParamsError::Schema(msg) => assert!(
                msg.contains("diffusivity_pos"),
                "message should name the field: {msg}"
            ),
            other => panic!("expected Schema, got {other:?}"),
        }
    }

    #[test]
    fn ocp_monotone_and_exact_at_knots() {
        let p = CellParams::default_cell();
        // strictly decreasing when sampled
        for electrode in [Electrode::Negative, Electrode::Positive] {
            let mut s = 0.0;
            while s < 0.99 {
                let a = p.ocp(electrode, s).unwrap();
                let b = p.ocp(electrode, s + 0.01).unwrap();
                assert!(a > b, "{electrode} OCP not decreasing at {s}");
                s += 0.01;
            }
        }
        // exact at knots
        for k in &p.ocp.positive.knots {
            assert_eq!(p.ocp(Electrode::Positive, k[0]).unwrap(), k[1]);
        }
    }

    #[test]
    fn ocp_negative_midpoint_matches_shipped_table() {
        let p = CellParams::default_cell();
        // read the expected value straight out of the table (independent of
        // the interpolation code path): 0.5 is a knot in the shipped file.
        let expected = p
            .ocp
            .negative
            .knots
            .iter()
            .find(|k| k[0] == 0.5)
            .expect("shipped table has a knot at 0.5")[1];
        assert_eq!(p.ocp(Electrode::Negative, 0.5).unwrap(), expected);
    }

    #[test]
    fn ocp_domain_error_outside_unit_interval() {
        let p = CellParams::default_cell();
        assert!(p.ocp(Electrode::Positive, -0.01).is_err());
        assert!(p.ocp(Electrode::Positive, 1.01).is_err());
    }

    #[test]
    fn ocp_bounded_by_neighboring_knots() {
        let p = CellParams::default_cell();
        let t = &p.ocp.positive;
        for w in t.knots.windows(2) {
            let mid = 0.5 * (w[0][0] + w[1][0]);
            let v = t.eval(mid).unwrap();
            assert!(v <= w[0][1] && v >= w[1][1]);
        }
    }

    #[test]
    fn serialize_round_trips_field_for_field() {
        let p = CellParams::default_cell();
        let text = serialize_params(&p);
        let q = parse_params(&text).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn window_capacity_consistent_with_nominal() {
        // The shipped geometry is constructed so the cathode window holds
        // q_nominal of charge.
        let p = CellParams::default_cell();
        let dy = p.stoich_window.pos_at_0 - p.stoich_window.pos_at_100;
        let q = FARADAY
            * p.solid.eps_active_pos_init
            * p.geometry.thickness_pos
            * p.solid.c_max_pos
            * p.geometry.plate_area
            * dy
            / 3600.0;
        assert!((q - p.cell.q_nominal).abs() < 0.01 * p.cell.q_nominal);
    }
}

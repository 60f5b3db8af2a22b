//! Timestamped record of an evolution run: states, measurement axes,
//! outcomes and collapses. The bridge from analysis to sonification.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::phon::{Axis, DensityMatrix, PhonState, ProjectorPair};

/// Outcome probabilities along all three axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilitySet {
    pub p_u: f64,
    pub p_d: f64,
    pub p_r: f64,
    pub p_l: f64,
    pub p_f: f64,
    pub p_s: f64,
}

impl ProbabilitySet {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        let z = ProjectorPair::for_axis(Axis::Z);
        let x = ProjectorPair::for_axis(Axis::X);
        let y = ProjectorPair::for_axis(Axis::Y);
        ProbabilitySet {
            p_u: rho.outcome_probability(z.plus()),
            p_d: rho.outcome_probability(z.minus()),
            p_r: rho.outcome_probability(x.plus()),
            p_l: rho.outcome_probability(x.minus()),
            p_f: rho.outcome_probability(y.plus()),
            p_s: rho.outcome_probability(y.minus()),
        }
    }

    pub fn from_pure(psi: &PhonState) -> Self {
        Self::from_density(&DensityMatrix::from_pure(psi))
    }
}

/// Pure or mixed snapshot of the phon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StateSnapshot {
    Pure(PhonState),
    Mixed(DensityMatrix),
}

impl StateSnapshot {
    pub fn probabilities(&self) -> ProbabilitySet {
        match self {
            StateSnapshot::Pure(psi) => ProbabilitySet::from_pure(psi),
            StateSnapshot::Mixed(rho) => ProbabilitySet::from_density(rho),
        }
    }

    pub fn as_density(&self) -> DensityMatrix {
        match self {
            StateSnapshot::Pure(psi) => DensityMatrix::from_pure(psi),
            StateSnapshot::Mixed(rho) => *rho,
        }
    }
}

/// One follower step: the state after the segment's evolution (and collapse,
/// when one happened), what was measured and what came out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub time_s: f64,
    pub state: StateSnapshot,
    pub axis: Option<Axis>,
    pub outcome: Option<i8>,
    pub collapsed: bool,
    pub pitchiness: f64,
    pub probabilities: ProbabilitySet,
    /// Pitch the outcome maps to, for phonation measurements with a tracked
    /// pitch available.
    pub pitch_hz: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionTrace {
    pub steps: Vec<TraceStep>,
}

impl EvolutionTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Steps that measured along a given axis.
    pub fn axis_fraction(&self, axis: Axis) -> f64 {
        if self.steps.is_empty() {
            return 0.0;
        }
        let n = self
            .steps
            .iter()
            .filter(|s| s.axis == Some(axis))
            .count();
        n as f64 / self.steps.len() as f64
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "time_s,axis,outcome,collapsed,pitchiness,p_u,p_d,p_r,p_l,p_f,p_s,pitch_hz_if_any\n",
        );
        for s in &self.steps {
            let axis = s
                .axis
                .map(|a| a.to_string())
                .unwrap_or_else(|| "none".into());
            let outcome = s.outcome.map(|o| o.to_string()).unwrap_or_default();
            let pitch = s.pitch_hz.map(|p| format!("{p:.4}")).unwrap_or_default();
            let p = &s.probabilities;
            out.push_str(&format!(
                "{:.6},{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{}\n",
                s.time_s,
                axis,
                outcome,
                s.collapsed,
                s.pitchiness,
                p.p_u,
                p.p_d,
                p.p_r,
                p.p_l,
                p.p_f,
                p.p_s,
                pitch
            ));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }
}

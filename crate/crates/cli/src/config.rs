//! Scenario configuration files.
//!
//! Configs are TOML. All numbers are dimensionless in natural units: ħ = m = 1
//! for the clock-carrying particle and the clock energy spread ΔH_c = 1, so the
//! speed of light follows from the regime parameter as c = λ^{-1/2}.

use serde::{Deserialize, Serialize};
use stqrf_core::{Error, Family, HamiltonianOrder};

/// What a scenario computes and writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputKind {
    /// Exact position variance against the closed-form variance law.
    Moments,
    /// Oracle variance against the standard-limit and internal-energy bounds.
    SpreadBounds,
    /// λ² coefficients of the family minima with a fit summary row.
    PrefactorFit,
    Qsl,
    Tradeoff,
    Relational,
    PovmAudit,
}

impl OutputKind {
    pub fn tag(&self) -> &'static str {
        match self {
            OutputKind::Moments => "moments",
            OutputKind::SpreadBounds => "spread-bounds",
            OutputKind::PrefactorFit => "prefactor-fit",
            OutputKind::Qsl => "qsl",
            OutputKind::Tradeoff => "tradeoff",
            OutputKind::Relational => "relational",
            OutputKind::PovmAudit => "povm-audit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Units {
    /// ħ = m = 1, ΔH_c = 1.
    Natural,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateFamily {
    Gaussian,
    Mus,
    /// Phase-space-correlated Gaussian with Cov(x,p) = −ħγ.
    Contractive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    Sandwiched,
    Unweighted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateConfig {
    pub family: StateFamily,
    pub lambda: f64,
    /// Qubit mixing angle; the levels sit at ±1/sin 2θ.
    #[serde(default = "default_theta")]
    pub theta: f64,
    /// Δp in units of m c.
    pub momentum_spread: f64,
    /// p0 in units of Δp.
    #[serde(default)]
    pub drift: f64,
    /// Correlation strength of the contractive family.
    #[serde(default)]
    pub gamma: f64,
}

fn default_theta() -> f64 {
    std::f64::consts::FRAC_PI_4
}

/// `points` times evenly spaced on [start, stop].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl TimeGrid {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| self.start + step * i as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lambda: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub delta: Vec<f64>,
    /// Readout times in units of ħ/(m c²).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tau0: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub energy_points: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub orders: Vec<String>,
}

/// Ideal-clock frame and system for relational scenarios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationalConfig {
    pub system_mass: f64,
    /// System momentum spread in units of m c.
    pub system_spread: f64,
    #[serde(default)]
    pub readout_x: f64,
    #[serde(default = "default_momentum_points")]
    pub momentum_points: usize,
    #[serde(default = "default_energy_points")]
    pub energy_points: usize,
}

fn default_momentum_points() -> usize {
    512
}

fn default_energy_points() -> usize {
    128
}

/// Discretization of the POVM normalization audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PovmConfig {
    pub momentum_points: usize,
    pub momentum_max: f64,
    pub energy_max: f64,
    pub weighting: Weighting,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub output: OutputKind,
    pub units: Units,
    #[serde(default)]
    pub seed: u64,
    pub state: StateConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<TimeGrid>,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relational: Option<RelationalConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub povm: Option<PovmConfig>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::ConfigInvalid(msg.into())
}

fn positive(name: &str, x: f64) -> Result<(), Error> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!(
            "{name} must be a positive number, got {x}"
        )))
    }
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, Error> {
        let cfg: Self = toml::from_str(text).map_err(|e| invalid(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Canonical serialization, used for hashing and for the provenance block.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn orders(&self) -> Result<Vec<HamiltonianOrder>, Error> {
        if self.sweep.orders.is_empty() {
            return Ok(vec![HamiltonianOrder::Exact]);
        }
        self.sweep
            .orders
            .iter()
            .map(|t| {
                HamiltonianOrder::from_tag(t).ok_or_else(|| invalid(format!("unknown order `{t}`")))
            })
            .collect()
    }

    pub fn lambdas(&self) -> Vec<f64> {
        if self.sweep.lambda.is_empty() {
            vec![self.state.lambda]
        } else {
            self.sweep.lambda.clone()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        self.time.as_ref().map(TimeGrid::values).unwrap_or_default()
    }

    pub fn family(&self) -> Option<Family> {
        match self.state.family {
            StateFamily::Gaussian => Some(Family::Gaussian),
            StateFamily::Mus => Some(Family::Mus),
            StateFamily::Contractive => None,
        }
    }

    fn validate(&self) -> Result<(), Error> {
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        {
            return Err(invalid("name must be non-empty and use only [A-Za-z0-9_-]"));
        }
        let s = &self.state;
        for l in self.lambdas() {
            positive("lambda", l)?;
            if l > stqrf_core::params::LAMBDA_MAX {
                return Err(invalid(format!(
                    "lambda {l} exceeds {}",
                    stqrf_core::params::LAMBDA_MAX
                )));
            }
        }
        if !(s.theta > 0.0 && s.theta < std::f64::consts::FRAC_PI_2) {
            return Err(invalid("theta must lie in (0, pi/2)"));
        }
        positive("momentum_spread", s.momentum_spread)?;
        if s.momentum_spread > 0.2 {
            return Err(invalid("momentum_spread must not exceed 0.2 m c"));
        }
        if !s.drift.is_finite() || s.drift.abs() > 10.0 {
            return Err(invalid("drift must be finite with |drift| <= 10"));
        }
        if !(s.gamma.is_finite() && s.gamma >= 0.0) {
            return Err(invalid("gamma must be non-negative"));
        }
        if let Some(t) = &self.time {
            if t.points == 0 || !(t.start >= 0.0) || !(t.stop >= t.start) || !t.stop.is_finite() {
                return Err(invalid(
                    "time grid needs points >= 1 and 0 <= start <= stop",
                ));
            }
        }
        for d in &self.sweep.delta {
            if !(*d > 0.0 && *d < 2.0) {
                return Err(invalid(format!("delta {d} must lie in (0, 2)")));
            }
        }
        for t in &self.sweep.tau0 {
            if !t.is_finite() {
                return Err(invalid("tau0 values must be finite"));
            }
        }
        self.orders()?;

        let need = |what: &str, ok: bool| {
            if ok {
                Ok(())
            } else {
                Err(invalid(format!(
                    "output `{}` requires {what}",
                    self.output.tag()
                )))
            }
        };
        let symmetric = s.drift == 0.0 && s.family != StateFamily::Contractive;
        match self.output {
            OutputKind::Moments => need("a [time] grid", self.time.is_some())?,
            OutputKind::SpreadBounds | OutputKind::Tradeoff => {
                need("a [time] grid", self.time.is_some())?;
                need("a symmetric state (drift = 0, not contractive)", symmetric)?;
                need("times > 0", self.times().iter().all(|t| *t > 0.0))?;
            }
            OutputKind::PrefactorFit => {
                need(
                    "a single time (points = 1)",
                    self.time
                        .as_ref()
                        .is_some_and(|t| t.points == 1 && t.start > 0.0),
                )?;
                need("at least two lambda values", self.sweep.lambda.len() >= 2)?;
            }
            OutputKind::Qsl => {
                need("delta values", !self.sweep.delta.is_empty())?;
                need("a qubit family", self.family().is_some())?;
            }
            OutputKind::Relational => {
                need("tau0 values", !self.sweep.tau0.is_empty())?;
                need("a gaussian state", s.family == StateFamily::Gaussian)?;
                let r = self
                    .relational
                    .as_ref()
                    .ok_or_else(|| invalid("output `relational` requires [relational]"))?;
                positive("system_mass", r.system_mass)?;
                positive("system_spread", r.system_spread)?;
                need("momentum_points >= 64", r.momentum_points >= 64)?;
                need(
                    "an even energy_points >= 8",
                    r.energy_points >= 8 && r.energy_points % 2 == 0,
                )?;
            }
            OutputKind::PovmAudit => {
                need("energy_points values", !self.sweep.energy_points.is_empty())?;
                let p = self
                    .povm
                    .as_ref()
                    .ok_or_else(|| invalid("output `povm-audit` requires [povm]"))?;
                positive("momentum_max", p.momentum_max)?;
                positive("energy_max", p.energy_max)?;
                need("momentum_points >= 8", p.momentum_points >= 8)?;
            }
        }
        if self.family().is_none() && self.output != OutputKind::Moments {
            return Err(invalid(
                "the contractive family is only available for `moments`",
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "probe"
output = "moments"
units = "natural"

[state]
family = "gaussian"
lambda = 0.05
momentum_spread = 0.01

[time]
start = 0.0
stop = 2.0
points = 3
"#;

    #[test]
    fn parses_and_round_trips() {
        let c = ScenarioConfig::parse(MINIMAL).unwrap();
        assert_eq!(c.times(), vec![0.0, 1.0, 2.0]);
        let again = ScenarioConfig::parse(&c.canonical()).unwrap();
        assert_eq!(c, again);
        assert_eq!(c.canonical(), again.canonical());
    }

    #[test]
    fn rejects_unknown_fields_and_bad_values() {
        let extra = MINIMAL.replace("units = \"natural\"", "units = \"natural\"\ncolour = 1");
        assert!(matches!(
            ScenarioConfig::parse(&extra),
            Err(Error::ConfigInvalid(_))
        ));
        let big = MINIMAL.replace("lambda = 0.05", "lambda = 0.5");
        assert!(matches!(
            ScenarioConfig::parse(&big),
            Err(Error::ConfigInvalid(_))
        ));
        let no_time = MINIMAL.split("[time]").next().unwrap().to_string();
        assert!(matches!(
            ScenarioConfig::parse(&no_time),
            Err(Error::ConfigInvalid(_))
        ));
    }
}

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::chain::Start;
use crate::error::{Error, Result};
use crate::oracle::MAX_N;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Zeta,
    KernelDump,
    Stationary,
    TvProfile,
    Tmix,
    Gap,
    Conductance,
    Simulate,
    Hitting,
    Coalesce,
    TwoCoord,
    OracleCheck,
    Sweep,
}

impl Kind {
    pub fn name(&self) -> &'static str {
        match self {
            Kind::Zeta => "zeta",
            Kind::KernelDump => "kernel-dump",
            Kind::Stationary => "stationary",
            Kind::TvProfile => "tv-profile",
            Kind::Tmix => "tmix",
            Kind::Gap => "gap",
            Kind::Conductance => "conductance",
            Kind::Simulate => "simulate",
            Kind::Hitting => "hitting",
            Kind::Coalesce => "coalesce",
            Kind::TwoCoord => "two-coord",
            Kind::OracleCheck => "oracle-check",
            Kind::Sweep => "sweep",
        }
    }

    /// Kinds that draw random numbers and therefore need a seed.
    pub fn is_stochastic(&self) -> bool {
        matches!(self, Kind::Simulate | Kind::Hitting | Kind::Coalesce | Kind::TwoCoord)
    }
}

/// Declarative description of one experiment or sweep. Every `(n, beta)`
/// pair of the two lists is a sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ExperimentSpec {
    pub kind: Kind,
    /// Inner kind of a `sweep`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub of: Option<Kind>,
    #[serde(default)]
    pub n: Vec<usize>,
    #[serde(default)]
    pub beta: Vec<f64>,
    #[serde(default = "default_starts")]
    pub start: Vec<Start>,
    /// Second chain's start for `coalesce` and `two-coord`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_other: Option<Start>,
    #[serde(default = "default_true")]
    pub censored: bool,
    /// Step budget or horizon; defaults depend on the kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<u64>,
    /// Grid or recording interval in steps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub every: Option<u64>,
    #[serde(default)]
    pub replicas: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_seed: Option<u64>,
    #[serde(default)]
    pub epsilon: Vec<f64>,
    /// Magnetization target of `hitting`; defaults to zeta.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn default_starts() -> Vec<Start> {
    vec![Start::Bottom]
}

fn default_true() -> bool {
    true
}

impl ExperimentSpec {
    pub fn new(kind: Kind) -> Self {
        Self {
            kind,
            of: None,
            n: Vec::new(),
            beta: Vec::new(),
            start: default_starts(),
            start_other: None,
            censored: true,
            steps: None,
            every: None,
            replicas: 0,
            base_seed: None,
            epsilon: Vec::new(),
            threshold: None,
            output: None,
        }
    }

    /// The kind actually computed at each point.
    pub fn effective_kind(&self) -> Kind {
        match self.kind {
            Kind::Sweep => self.of.unwrap_or(Kind::Sweep),
            k => k,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("spec: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    /// Replicas used for stochastic kinds (at least one).
    pub fn replica_count(&self) -> u64 {
        self.replicas.max(1)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        let kind = self.effective_kind();
        if self.kind == Kind::Sweep {
            match self.of {
                None => return bad("sweep needs an inner kind ('of')".into()),
                Some(Kind::Sweep) => return bad("sweep of sweep".into()),
                Some(_) => {}
            }
        } else if self.of.is_some() {
            return bad("'of' is only meaningful for sweep".into());
        }
        if self.beta.is_empty() {
            return bad("beta list is empty".into());
        }
        if let Some(b) = self.beta.iter().find(|b| !(b.is_finite() && **b >= 0.0)) {
            return bad(format!("beta {b} is not a finite non-negative number"));
        }
        if kind != Kind::Zeta && self.n.is_empty() {
            return bad("n list is empty".into());
        }
        if let Some(n) = self.n.iter().find(|&&n| n < 2) {
            return bad(format!("n = {n} < 2"));
        }
        if kind == Kind::OracleCheck {
            if let Some(&n) = self.n.iter().find(|&&n| n > MAX_N) {
                return Err(Error::TooLarge { n, limit: MAX_N });
            }
        }
        if self.start.is_empty() {
            return bad("start list is empty".into());
        }
        if let Some(e) = self.epsilon.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
            return bad(format!("epsilon {e} outside (0, 1)"));
        }
        if (self.replicas > 0 || kind.is_stochastic()) && self.base_seed.is_none() {
            return bad("a base seed is required for replicated or random experiments".into());
        }
        if self.every == Some(0) {
            return bad("every must be positive".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn start_strategy() -> impl Strategy<Value = Start> {
        prop_oneof![
            Just(Start::Bottom),
            Just(Start::Top),
            Just(Start::AllPlus),
            Just(Start::AllMinus),
            (-1.0f64..=1.0).prop_map(Start::Value),
        ]
    }

    fn kind_strategy() -> impl Strategy<Value = Kind> {
        prop_oneof![
            Just(Kind::Zeta),
            Just(Kind::Tmix),
            Just(Kind::Gap),
            Just(Kind::Hitting),
            Just(Kind::TwoCoord),
            Just(Kind::Sweep),
        ]
    }

    proptest! {
        #[test]
        fn json_round_trip(
            kind in kind_strategy(),
            of in proptest::option::of(kind_strategy()),
            n in proptest::collection::vec(2usize..100_000, 0..4),
            beta in proptest::collection::vec(0.0f64..3.0, 0..4),
            start in proptest::collection::vec(start_strategy(), 1..3),
            start_other in proptest::option::of(start_strategy()),
            censored in any::<bool>(),
            steps in proptest::option::of(any::<u64>()),
            replicas in 0u64..1000,
            base_seed in proptest::option::of(any::<u64>()),
            epsilon in proptest::collection::vec(1e-6f64..0.999, 0..3),
            threshold in proptest::option::of(0.0f64..1.0),
        ) {
            let spec = ExperimentSpec {
                kind, of, n, beta, start, start_other, censored, steps,
                every: None, replicas, base_seed, epsilon, threshold,
                output: Some("out/x.csv".into()),
            };
            prop_assert_eq!(ExperimentSpec::from_json(&spec.to_json()).unwrap(), spec);
        }
    }

    #[test]
    fn minimal_json_takes_defaults() {
        let spec = ExperimentSpec::from_json(r#"{"kind": "gap", "n": [256], "beta": [1.2]}"#).unwrap();
        assert!(spec.censored);
        assert_eq!(spec.start, vec![Start::Bottom]);
        spec.validate().unwrap();
    }

    #[test]
    fn starts_parse_from_labels_and_numbers() {
        let spec = ExperimentSpec::from_json(r#"{"kind": "tmix", "n": [8], "beta": [1.2], "start": ["top", "0.25"]}"#).unwrap();
        assert_eq!(spec.start, vec![Start::Top, Start::Value(0.25)]);
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(ExperimentSpec::from_json(r#"{"kind": "gap", "nn": [1]}"#).is_err());
    }

    #[test]
    fn validation() {
        let mut spec = ExperimentSpec::new(Kind::Hitting);
        spec.n = vec![64];
        spec.beta = vec![1.2];
        assert!(spec.validate().is_err());
        spec.base_seed = Some(1);
        spec.validate().unwrap();
        spec.epsilon = vec![1.5];
        assert!(spec.validate().is_err());

        let mut sweep = ExperimentSpec::new(Kind::Sweep);
        sweep.n = vec![64];
        sweep.beta = vec![1.2];
        assert!(sweep.validate().is_err());
        sweep.of = Some(Kind::Gap);
        sweep.validate().unwrap();

        let mut oracle = ExperimentSpec::new(Kind::OracleCheck);
        oracle.n = vec![13];
        oracle.beta = vec![1.1];
        assert!(matches!(oracle.validate(), Err(Error::TooLarge { .. })));

        let mut zeta = ExperimentSpec::new(Kind::Zeta);
        zeta.beta = vec![1.2];
        zeta.validate().unwrap();
    }
}

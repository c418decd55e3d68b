use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::UsageError;

/// Which splits `m` of the Clifford products to visit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MPolicy {
    /// The string `"all"`: every `1 <= m <= n - 2`.
    All(AllMarker),
    List(Vec<usize>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AllMarker {
    All,
}

impl Default for MPolicy {
    fn default() -> Self {
        MPolicy::All(AllMarker::All)
    }
}

impl MPolicy {
    pub fn splits(&self, n: usize) -> Vec<usize> {
        match self {
            MPolicy::All(_) => (1..=n.saturating_sub(2)).collect(),
            MPolicy::List(ms) => {
                let mut ms: Vec<usize> = ms.iter().copied().filter(|&m| m >= 1 && m + 2 <= n).collect();
                ms.sort_unstable();
                ms.dedup();
                ms
            }
        }
    }
}

pub const TOLERANCE_KEYS: [(&str, f64); 8] = [
    ("identities", 1e-9),
    ("bounds", 1e-9),
    ("lemmas", 1e-6),
    ("hessian", 1e-5),
    ("discrete", 5e-3),
    ("order", 0.3),
    ("center", 1e-8),
    ("iterations", 25.0),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub n_min: usize,
    pub n_max: usize,
    pub m_policy: MPolicy,
    pub r_list: Vec<f64>,
    pub resolution: usize,
    pub grid_sizes: Vec<usize>,
    /// Overrides for the defaults in [`TOLERANCE_KEYS`].
    pub tolerances: BTreeMap<String, f64>,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            n_min: 5,
            n_max: 8,
            m_policy: MPolicy::default(),
            r_list: vec![1.5, 2.0, 3.0],
            resolution: 64,
            grid_sizes: vec![200, 400, 800],
            tolerances: BTreeMap::new(),
            seed: 0,
        }
    }
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self, UsageError> {
        let config: Self =
            serde_json::from_str(text).map_err(|e| UsageError(format!("invalid config: {e}")))?;
        Ok(config)
    }

    pub fn tolerance(&self, key: &str) -> f64 {
        self.tolerances.get(key).copied().unwrap_or_else(|| {
            TOLERANCE_KEYS
                .iter()
                .find(|(k, _)| *k == key)
                .map(|(_, v)| *v)
                .unwrap_or_else(|| panic!("unknown tolerance key {key}"))
        })
    }

    pub fn validate(&self) -> Result<(), UsageError> {
        let fail = |msg: String| Err(UsageError(msg));
        if self.n_min < 3 {
            return fail(format!("n_min must be at least 3, got {}", self.n_min));
        }
        if self.n_max < self.n_min {
            return fail(format!("n_max {} is below n_min {}", self.n_max, self.n_min));
        }
        if self.n_max > 64 {
            return fail(format!("n_max must be at most 64, got {}", self.n_max));
        }
        if let Some(r) = self.r_list.iter().find(|r| !(**r > 1.0 && r.is_finite())) {
            return fail(format!("r_list entries must be finite and > 1, got {r}"));
        }
        if self.resolution < 4 || !self.resolution.is_multiple_of(2) {
            return fail(format!("resolution must be even and at least 4, got {}", self.resolution));
        }
        if self.grid_sizes.is_empty() {
            return fail("grid_sizes must not be empty".into());
        }
        if let Some(g) = self.grid_sizes.iter().find(|g| **g < scalarspec::discrete::MIN_CLIFFORD_CELLS) {
            return fail(format!(
                "grid sizes must be at least {}, got {g}",
                scalarspec::discrete::MIN_CLIFFORD_CELLS
            ));
        }
        for (key, value) in &self.tolerances {
            if !TOLERANCE_KEYS.iter().any(|(k, _)| k == key) {
                return fail(format!("unknown tolerance key {key:?}"));
            }
            if !(*value > 0.0 && value.is_finite()) {
                return fail(format!("tolerance {key:?} must be positive, got {value}"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = SweepConfig::default();
        c.validate().unwrap();
        assert_eq!(c.tolerance("identities"), 1e-9);
        assert_eq!(c.m_policy.splits(5), vec![1, 2, 3]);
    }

    #[test]
    fn json_fields_and_policies() {
        let c = SweepConfig::from_json(r#"{"n_min": 6, "m_policy": [3, 1, 9, 1], "tolerances": {"center": 1e-9}}"#)
            .unwrap();
        assert_eq!(c.n_min, 6);
        assert_eq!(c.n_max, 8);
        assert_eq!(c.m_policy.splits(6), vec![1, 3]);
        assert_eq!(c.tolerance("center"), 1e-9);
        let all = SweepConfig::from_json(r#"{"m_policy": "all"}"#).unwrap();
        assert_eq!(all.m_policy, MPolicy::default());
        assert!(SweepConfig::from_json(r#"{"bogus": 1}"#).is_err());
        assert!(SweepConfig::from_json(r#"{"m_policy": "some"}"#).is_err());
    }

    #[test]
    fn validation_errors() {
        let bad = [
            SweepConfig { n_min: 2, ..Default::default() },
            SweepConfig { n_min: 9, n_max: 8, ..Default::default() },
            SweepConfig { r_list: vec![1.0], ..Default::default() },
            SweepConfig { resolution: 33, ..Default::default() },
            SweepConfig { grid_sizes: vec![10], ..Default::default() },
            SweepConfig {
                tolerances: [("nope".to_string(), 1.0)].into(),
                ..Default::default()
            },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }
}

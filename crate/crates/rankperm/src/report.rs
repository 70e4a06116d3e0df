//! Versioned JSON report of the independence test.

use serde::{Serialize, Serializer};

use rankperm_core::TestReport;

use crate::io::fmt_f64;

pub const SCHEMA_VERSION: u32 = 1;

fn sig17<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    let n: serde_json::Number = fmt_f64(*x).parse().map_err(serde::ser::Error::custom)?;
    n.serialize(s)
}

#[derive(Debug, Clone, Serialize)]
pub struct JsonReport {
    pub schema: u32,
    #[serde(serialize_with = "sig17")]
    pub statistic: f64,
    #[serde(serialize_with = "sig17")]
    pub variance: f64,
    #[serde(serialize_with = "sig17")]
    pub p_perm: f64,
    #[serde(serialize_with = "sig17")]
    pub p_asym: f64,
    pub n: usize,
    #[serde(rename = "B")]
    pub mc_samples: usize,
    pub perms: usize,
    pub seed: u64,
    pub estimator: &'static str,
    pub burn_in: usize,
    pub thin: usize,
    pub data_type: &'static str,
    pub elapsed_ms: u64,
}

impl JsonReport {
    pub fn new(report: &TestReport, data_type: &'static str, elapsed_ms: u64) -> Self {
        let c = &report.config;
        JsonReport {
            schema: SCHEMA_VERSION,
            statistic: report.statistic,
            variance: report.variance,
            p_perm: report.p_perm,
            p_asym: report.p_asym,
            n: report.n,
            mc_samples: c.mc_samples,
            perms: c.perms,
            seed: c.seed,
            estimator: c.estimator.name(),
            burn_in: c.burn_in,
            thin: c.thin,
            data_type,
            elapsed_ms,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields are all finite")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rankperm_core::TestConfig;

    #[test]
    fn numbers_keep_seventeen_digits() {
        let report = TestReport {
            statistic: 0.1,
            variance: 1.0 / 3.0,
            null_draws: vec![],
            p_perm: 0.5,
            p_asym: 0.25,
            n: 4,
            config: TestConfig::default(),
        };
        let json = JsonReport::new(&report, "right", 7).to_json();
        assert!(json.contains("\"statistic\": 1.0000000000000001e-1"), "{json}");
        assert!(json.contains("\"schema\": 1"));
        assert!(json.contains("\"B\": 1000"));
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["variance"].as_f64().unwrap(), 1.0 / 3.0);
        assert_eq!(v["estimator"], "paired");
    }
}

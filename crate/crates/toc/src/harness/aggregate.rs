use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Record, SweepResult};
use crate::{Error, Result};

/// Record fields that aggregation can group by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupField {
    Pipeline,
    SnrS,
    SnrC,
    Seed,
    Attack,
    Param,
    Metric,
}

impl GroupField {
    pub fn from_str(s: &str) -> Option<Self> {
        Some(match s {
            "pipeline" => GroupField::Pipeline,
            "snr_s" | "snr_s_db" => GroupField::SnrS,
            "snr_c" | "snr_c_db" => GroupField::SnrC,
            "seed" => GroupField::Seed,
            "attack" => GroupField::Attack,
            "param" => GroupField::Param,
            "metric" => GroupField::Metric,
            _ => return None,
        })
    }

    fn extract(self, r: &Record) -> String {
        match self {
            GroupField::Pipeline => r.pipeline.clone(),
            GroupField::SnrS => format!("{}", r.snr_s_db),
            GroupField::SnrC => format!("{}", r.snr_c_db),
            GroupField::Seed => format!("{}", r.seed),
            GroupField::Attack => r.attack.clone().unwrap_or_default(),
            GroupField::Param => r.param.clone().unwrap_or_default(),
            GroupField::Metric => r.metric.clone(),
        }
    }
}

/// One aggregated row: group key values, mean, sample standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggRow {
    pub key: Vec<String>,
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

/// Groups records by the given fields and reports mean and sample standard
/// deviation per group, in deterministic (lexicographic key) row order.
pub fn aggregate(res: &SweepResult, group_by: &[GroupField]) -> Result<Vec<AggRow>> {
    if res.records.is_empty() {
        return Err(Error::Config("aggregate over empty result set".into()));
    }
    let mut groups: BTreeMap<Vec<String>, Vec<f64>> = BTreeMap::new();
    for r in &res.records {
        let key: Vec<String> = group_by.iter().map(|f| f.extract(r)).collect();
        groups.entry(key).or_default().push(r.value);
    }
    Ok(groups
        .into_iter()
        .map(|(key, values)| {
            let n = values.len();
            let mean = values.iter().sum::<f64>() / n as f64;
            let std = if n > 1 {
                (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                    / (n - 1) as f64)
                    .sqrt()
            } else {
                0.0
            };
            AggRow { key, mean, std, n }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(pipeline: &str, seed: u64, value: f64) -> Record {
        Record {
            pipeline: pipeline.into(),
            snr_s_db: 10.0,
            snr_c_db: 5.0,
            seed,
            attack: None,
            param: None,
            metric: "accuracy".into(),
            value,
        }
    }

    #[test]
    fn single_record_group_has_zero_std() {
        let res = SweepResult { records: vec![rec("toc", 1, 0.9)] };
        let rows = aggregate(&res, &[GroupField::Pipeline]).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].mean, 0.9);
        assert_eq!(rows[0].std, 0.0);
        assert_eq!(rows[0].n, 1);
    }

    #[test]
    fn grand_mean_equals_mean_of_balanced_cell_means() {
        let records = vec![
            rec("a", 1, 0.2),
            rec("a", 2, 0.4),
            rec("b", 1, 0.6),
            rec("b", 2, 0.8),
        ];
        let res = SweepResult { records };
        let per_cell = aggregate(&res, &[GroupField::Pipeline]).unwrap();
        let cell_mean: f64 =
            per_cell.iter().map(|r| r.mean).sum::<f64>() / per_cell.len() as f64;
        let grand = aggregate(&res, &[]).unwrap();
        assert!((grand[0].mean - cell_mean).abs() < 1e-15);
    }

    #[test]
    fn aggregation_is_linear_over_disjoint_unions() {
        let part1 = vec![rec("a", 1, 0.1), rec("a", 2, 0.3)];
        let part2 = vec![rec("a", 3, 0.5)];
        let mut all = part1.clone();
        all.extend(part2.clone());
        let m1 = aggregate(&SweepResult { records: part1 }, &[]).unwrap()[0].clone();
        let m2 = aggregate(&SweepResult { records: part2 }, &[]).unwrap()[0].clone();
        let m = aggregate(&SweepResult { records: all }, &[]).unwrap()[0].clone();
        let weighted =
            (m1.mean * m1.n as f64 + m2.mean * m2.n as f64) / (m1.n + m2.n) as f64;
        assert!((m.mean - weighted).abs() < 1e-15);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(aggregate(&SweepResult::default(), &[GroupField::Seed]).is_err());
    }
}

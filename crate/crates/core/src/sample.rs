//! Metric-based data sampling: predicate filters and stratified
//! quantile-bin selection over per-record metric values.

use std::str::FromStr;

use crate::corpus::{Dataset, StandardRecord};
use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// The per-record metrics a sample can key on; `quantify` populates them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricName {
    Cmi,
    IIndex,
    EntropyBits,
    SwitchPoints,
}

impl MetricName {
    pub fn as_str(&self) -> &'static str {
        match self {
            MetricName::Cmi => "cmi",
            MetricName::IIndex => "i_index",
            MetricName::EntropyBits => "entropy_bits",
            MetricName::SwitchPoints => "switch_points",
        }
    }
}

impl FromStr for MetricName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cmi" => Ok(MetricName::Cmi),
            "i_index" => Ok(MetricName::IIndex),
            "entropy_bits" => Ok(MetricName::EntropyBits),
            "switch_points" => Ok(MetricName::SwitchPoints),
            other => Err(Error::usage(format!(
                "unknown metric `{other}` (expected cmi, i_index, entropy_bits or switch_points)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SampleMode {
    /// Keep records whose metric value lies in [min, max]; a missing
    /// bound is unbounded.
    Predicate { min: Option<f64>, max: Option<f64> },
    /// Rank records by metric, partition the ranking into `bins`
    /// near-equal bins, and draw `per_bin` records from each.
    Quantile { bins: usize, per_bin: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSpec {
    pub metric: MetricName,
    pub mode: SampleMode,
    pub seed: u64,
}

impl SampleSpec {
    pub fn validate(&self) -> Result<()> {
        match &self.mode {
            SampleMode::Predicate { min, max } => {
                if let (Some(lo), Some(hi)) = (min, max) {
                    if lo > hi {
                        return Err(Error::usage(format!("predicate min {lo} exceeds max {hi}")));
                    }
                }
                Ok(())
            }
            SampleMode::Quantile { bins, per_bin } => {
                if *bins < 2 {
                    return Err(Error::usage("quantile sampling needs at least 2 bins"));
                }
                if *per_bin < 1 {
                    return Err(Error::usage("per_bin must be at least 1"));
                }
                Ok(())
            }
        }
    }
}

fn metric_value(rec: &StandardRecord, metric: MetricName) -> Result<f64> {
    rec.metrics
        .as_ref()
        .and_then(|m| m.get(metric.as_str()))
        .copied()
        .ok_or_else(|| {
            Error::usage(format!(
                "record `{}` carries no `{}` metric (run quantify first)",
                rec.uid,
                metric.as_str()
            ))
        })
}

/// Keep exactly the records whose metric satisfies the bounds, preserving
/// input order.
pub fn sample_by_predicate(dataset: &Dataset, spec: &SampleSpec) -> Result<Dataset> {
    spec.validate()?;
    let SampleMode::Predicate { min, max } = spec.mode else {
        return Err(Error::usage("spec is not in predicate mode"));
    };
    let mut out = Dataset::new(dataset.task_kind);
    out.tagset = dataset.tagset;
    for rec in &dataset.records {
        let value = metric_value(rec, spec.metric)?;
        let lo_ok = min.is_none_or(|lo| value >= lo);
        let hi_ok = max.is_none_or(|hi| value <= hi);
        if lo_ok && hi_ok {
            out.records.push(rec.clone());
        }
    }
    Ok(out)
}

/// Stratified quantile sampling. Records are ranked by (metric, uid); bin
/// `b` covers ranks `[b*N/bins, (b+1)*N/bins)`. From each bin `per_bin`
/// records are drawn by seeded shuffle (all of them if the bin is
/// smaller), emitted in bin order and original order within a bin. Each
/// selected record's meta gains its bin number.
pub fn sample_quantiles(dataset: &Dataset, spec: &SampleSpec) -> Result<Dataset> {
    spec.validate()?;
    let SampleMode::Quantile { bins, per_bin } = spec.mode else {
        return Err(Error::usage("spec is not in quantile mode"));
    };
    let n = dataset.records.len();
    if bins > n {
        return Err(Error::usage(format!(
            "cannot split {n} records into {bins} bins"
        )));
    }

    let mut ranked: Vec<(usize, f64)> = Vec::with_capacity(n);
    for (position, rec) in dataset.records.iter().enumerate() {
        ranked.push((position, metric_value(rec, spec.metric)?));
    }
    ranked.sort_by(|(pa, va), (pb, vb)| {
        va.total_cmp(vb)
            .then_with(|| dataset.records[*pa].uid.cmp(&dataset.records[*pb].uid))
    });

    let mut out = Dataset::new(dataset.task_kind);
    out.tagset = dataset.tagset;
    for bin in 0..bins {
        let lo = bin * n / bins;
        let hi = (bin + 1) * n / bins;
        let mut members: Vec<usize> = ranked[lo..hi].iter().map(|(p, _)| *p).collect();
        if per_bin < members.len() {
            SeededRng::keyed(spec.seed, bin as u64).shuffle(&mut members);
            members.truncate(per_bin);
        }
        members.sort_unstable();
        for position in members {
            let mut rec = dataset.records[position].clone();
            rec.meta
                .get_or_insert_with(Default::default)
                .insert("bin".to_string(), bin.to_string());
            out.records.push(rec);
        }
    }
    Ok(out)
}

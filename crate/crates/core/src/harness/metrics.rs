use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepMetrics {
    pub step: u64,
    pub action: usize,
    pub reward: f64,
    pub regret: f64,
    pub cumulative_regret: f64,
}

/// Diagnostics of one offline phase. Fields that do not apply stay `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodMetrics {
    pub period: usize,
    pub step: u64,
    pub cumulative_regret: f64,
    pub distilled: bool,
    pub table_rows: usize,
    pub kl_before: Option<f64>,
    pub kl_after: Option<f64>,
    pub tv_after: Option<f64>,
    pub w1_before: Option<f64>,
    pub w1_after: Option<f64>,
    pub final_loss: Option<f64>,
    /// Table rows where TV exceeded √(KL/2), before plus after distillation.
    pub pinsker_violations: usize,
    /// Wall time of the offline phase; kept out of the deterministic logs.
    pub update_seconds: f64,
}

impl PeriodMetrics {
    pub fn new(period: usize) -> Self {
        PeriodMetrics {
            period,
            step: 0,
            cumulative_regret: 0.0,
            distilled: false,
            table_rows: 0,
            kl_before: None,
            kl_after: None,
            tv_after: None,
            w1_before: None,
            w1_after: None,
            final_loss: None,
            pinsker_violations: 0,
            update_seconds: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsLog {
    pub trial: usize,
    pub seed: u64,
    pub policy: String,
    pub environment: String,
    pub steps: Vec<StepMetrics>,
    pub periods: Vec<PeriodMetrics>,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl MetricsLog {
    pub fn final_regret(&self) -> f64 {
        self.steps.last().map(|s| s.cumulative_regret).unwrap_or(0.0)
    }

    /// `step,action,reward,regret,cumulative_regret`.
    pub fn write_steps_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["step", "action", "reward", "regret", "cumulative_regret"])?;
        for s in &self.steps {
            w.write_record([
                s.step.to_string(),
                s.action.to_string(),
                s.reward.to_string(),
                s.regret.to_string(),
                s.cumulative_regret.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Per-period diagnostics without wall times, so reruns compare equal.
    /// Periods that skipped distillation leave the divergence cells empty.
    pub fn write_periods_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "period",
            "step",
            "cumulative_regret",
            "distilled",
            "table_rows",
            "kl_before",
            "kl_after",
            "tv_after",
            "w1_before",
            "w1_after",
            "final_loss",
            "pinsker_violations",
        ])?;
        for p in &self.periods {
            w.write_record([
                p.period.to_string(),
                p.step.to_string(),
                p.cumulative_regret.to_string(),
                p.distilled.to_string(),
                p.table_rows.to_string(),
                opt(p.kl_before),
                opt(p.kl_after),
                opt(p.tv_after),
                opt(p.w1_before),
                opt(p.w1_after),
                opt(p.final_loss),
                p.pinsker_violations.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// `period,update_seconds`.
    pub fn write_timing_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["period", "update_seconds"])?;
        for p in &self.periods {
            w.write_record([p.period.to_string(), p.update_seconds.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Sample mean and standard error of the mean (`n − 1` denominator).
pub fn mean_sem(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub step: u64,
    pub mean: f64,
    pub sem: f64,
}

impl SummaryRow {
    /// `mean ± 2 SEM`.
    pub fn band(&self) -> (f64, f64) {
        (self.mean - 2.0 * self.sem, self.mean + 2.0 * self.sem)
    }
}

/// Mean cumulative-regret curve across trials with its standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n_trials: usize,
    pub rows: Vec<SummaryRow>,
}

impl Summary {
    pub fn last(&self) -> Option<&SummaryRow> {
        self.rows.last()
    }

    /// `step,mean_cumulative_regret,sem,band_lo,band_hi`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["step", "mean_cumulative_regret", "sem", "band_lo", "band_hi"])?;
        for r in &self.rows {
            let (lo, hi) = r.band();
            w.write_record([
                r.step.to_string(),
                r.mean.to_string(),
                r.sem.to_string(),
                lo.to_string(),
                hi.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn aggregate_trials(logs: &[MetricsLog]) -> Result<Summary> {
    if logs.len() < 2 {
        return Err(Error::Invalid(format!("aggregation needs at least 2 trials, got {}", logs.len())));
    }
    let t = logs[0].steps.len();
    if logs.iter().any(|l| l.steps.len() != t) {
        return Err(Error::Invalid("trials have different horizons".into()));
    }
    let mut buf = vec![0.0; logs.len()];
    let rows = (0..t)
        .map(|i| {
            for (b, l) in buf.iter_mut().zip(logs) {
                *b = l.steps[i].cumulative_regret;
            }
            let (mean, sem) = mean_sem(&buf);
            SummaryRow {
                step: logs[0].steps[i].step,
                mean,
                sem,
            }
        })
        .collect();
    Ok(Summary {
        n_trials: logs.len(),
        rows,
    })
}

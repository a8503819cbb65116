//! Marginal rate of substitution and token efficiency from loss curves.
//!
//! `x` counts pre-pretraining steps and `y` pretraining steps. Two runs on one
//! indifference level (equal loss) substitute at rate `|y1 - y2| / |x1 - x2|`,
//! and the pre-pretrained run saves `1 - (x2 + y2) / y1` of the baseline budget.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_SMOOTHING_WINDOW: usize = 5;
/// Absolute loss tolerance when checking that two run points are indifferent.
pub const LOSS_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossCurve {
    pub label: String,
    pub tokens_per_step: f64,
    /// Pre-pretraining steps taken before this curve's step 0.
    pub ppt_steps: f64,
    points: Vec<(u64, f64)>,
}

impl LossCurve {
    pub fn new(label: impl Into<String>, points: Vec<(u64, f64)>, tokens_per_step: f64) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidCurve(format!(
                "need at least 2 points, got {}",
                points.len()
            )));
        }
        if let Some(w) = points.windows(2).find(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidCurve(format!(
                "steps must be strictly increasing ({} then {})",
                w[0].0, w[1].0
            )));
        }
        if let Some(&(step, loss)) = points.iter().find(|(_, l)| !(l.is_finite() && *l > 0.0)) {
            return Err(Error::InvalidCurve(format!(
                "loss {loss} at step {step} is not a positive number"
            )));
        }
        if !(tokens_per_step.is_finite() && tokens_per_step > 0.0) {
            return Err(Error::InvalidCurve(format!(
                "tokens_per_step must be positive, got {tokens_per_step}"
            )));
        }
        Ok(LossCurve {
            label: label.into(),
            tokens_per_step,
            ppt_steps: 0.0,
            points,
        })
    }

    pub fn with_ppt_steps(mut self, ppt_steps: f64) -> Self {
        self.ppt_steps = ppt_steps;
        self
    }

    pub fn points(&self) -> &[(u64, f64)] {
        &self.points
    }

    pub fn first_step(&self) -> u64 {
        self.points[0].0
    }

    pub fn last_step(&self) -> u64 {
        self.points[self.points.len() - 1].0
    }

    pub fn min_loss(&self) -> f64 {
        self.points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min)
    }

    /// Piecewise-linear loss at `step`, which must lie within the curve.
    pub fn loss_at(&self, step: f64) -> Result<f64> {
        let (first, last) = (self.first_step() as f64, self.last_step() as f64);
        if !(first..=last).contains(&step) {
            return Err(Error::InvalidCurve(format!(
                "step {step} outside curve range [{first}, {last}]"
            )));
        }
        let i = self.points.partition_point(|&(s, _)| (s as f64) < step);
        if i == 0 {
            return Ok(self.points[0].1);
        }
        let (s0, l0) = self.points[i - 1];
        let (s1, l1) = self.points[i];
        let t = (step - s0 as f64) / (s1 - s0) as f64;
        Ok(l0 + t * (l1 - l0))
    }

    /// Trailing-window median: each loss becomes the median of itself and up
    /// to `window - 1` preceding losses.
    pub fn smoothed(&self, window: usize) -> LossCurve {
        let window = window.max(1);
        let points = self
            .points
            .iter()
            .enumerate()
            .map(|(i, &(step, _))| {
                let lo = (i + 1).saturating_sub(window);
                let mut vals: Vec<f64> = self.points[lo..=i].iter().map(|p| p.1).collect();
                vals.sort_by(f64::total_cmp);
                let m = vals.len();
                let median = if m % 2 == 1 {
                    vals[m / 2]
                } else {
                    (vals[m / 2 - 1] + vals[m / 2]) / 2.0
                };
                (step, median)
            })
            .collect();
        LossCurve {
            label: format!("{} (median {window})", self.label),
            points,
            ..self.clone()
        }
    }

    /// Parses delimited text: optional `# key=value` comment lines
    /// (`tokens_per_step`, `ppt_steps`, `label`), a `step,loss` header, rows.
    pub fn parse(text: &str, default_label: &str) -> Result<Self> {
        let mut tokens_per_step = 1.0;
        let mut ppt_steps = 0.0;
        let mut label = default_label.to_string();
        for line in text.lines().map(str::trim).filter(|l| l.starts_with('#')) {
            let Some((key, value)) = line.trim_start_matches('#').split_once('=') else {
                continue;
            };
            let value = value.trim();
            let number = || {
                value
                    .replace('_', "")
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidCurve(format!("bad value for {}: {value}", key.trim())))
            };
            match key.trim() {
                "tokens_per_step" => tokens_per_step = number()?,
                "ppt_steps" => ppt_steps = number()?,
                "label" => label = value.to_string(),
                _ => {}
            }
        }

        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = reader
            .headers()
            .map_err(|e| Error::InvalidCurve(e.to_string()))?
            .clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::InvalidCurve(format!("missing `{name}` column")))
        };
        let (step_col, loss_col) = (col("step")?, col("loss")?);
        let mut points = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::InvalidCurve(e.to_string()))?;
            let field = |c: usize| record.get(c).unwrap_or("");
            let step = field(step_col)
                .parse::<u64>()
                .map_err(|_| Error::InvalidCurve(format!("row {}: bad step `{}`", i + 1, field(step_col))))?;
            let loss = field(loss_col)
                .parse::<f64>()
                .map_err(|_| Error::InvalidCurve(format!("row {}: bad loss `{}`", i + 1, field(loss_col))))?;
            points.push((step, loss));
        }
        Ok(LossCurve::new(label, points, tokens_per_step)?.with_ppt_steps(ppt_steps))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("curve");
        Self::parse(&text, stem)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# label={}", self.label);
        let _ = writeln!(out, "# tokens_per_step={}", self.tokens_per_step);
        if self.ppt_steps != 0.0 {
            let _ = writeln!(out, "# ppt_steps={}", self.ppt_steps);
        }
        let _ = writeln!(out, "step,loss");
        for (s, l) in &self.points {
            let _ = writeln!(out, "{s},{l}");
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub step: f64,
    /// The curve rises somewhere before the crossing or returns above the
    /// target after it; the first downward crossing was used.
    pub non_monotone: bool,
}

/// Smallest (interpolated) step at which `curve` reaches `target_loss`.
pub fn indifference_point(curve: &LossCurve, target_loss: f64) -> Result<Crossing> {
    let pts = curve.points();
    let minimum = curve.min_loss();
    if target_loss < minimum || !target_loss.is_finite() {
        return Err(Error::NotReached {
            target: target_loss,
            minimum,
        });
    }
    let i = pts
        .iter()
        .position(|&(_, l)| l <= target_loss)
        .expect("minimum is reached");
    let step = if i == 0 {
        pts[0].0 as f64
    } else {
        let (s0, l0) = pts[i - 1];
        let (s1, l1) = pts[i];
        s0 as f64 + (l0 - target_loss) / (l0 - l1) * (s1 - s0) as f64
    };
    let rises_before = pts[..=i].windows(2).any(|w| w[1].1 > w[0].1);
    let returns_above = pts[i..].iter().any(|&(_, l)| l > target_loss);
    let non_monotone = rises_before || returns_above;
    if non_monotone {
        log::warn!(
            "curve `{}` is not monotone around loss {target_loss}; using first downward crossing at step {step}",
            curve.label
        );
    }
    Ok(Crossing { step, non_monotone })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunPoint {
    /// Pre-pretraining steps `x`.
    pub ppt_steps: f64,
    /// Pretraining steps `y`.
    pub pt_steps: f64,
    pub loss: Option<f64>,
}

impl RunPoint {
    pub fn new(ppt_steps: f64, pt_steps: f64) -> Self {
        RunPoint {
            ppt_steps,
            pt_steps,
            loss: None,
        }
    }

    pub fn with_loss(mut self, loss: f64) -> Self {
        self.loss = Some(loss);
        self
    }

    pub fn total(&self) -> f64 {
        self.ppt_steps + self.pt_steps
    }

    /// Same point measured in tokens.
    pub fn in_tokens(&self, tokens_per_step: f64) -> Self {
        RunPoint {
            ppt_steps: self.ppt_steps * tokens_per_step,
            pt_steps: self.pt_steps * tokens_per_step,
            loss: self.loss,
        }
    }
}

/// `|y1 - y2| / |x1 - x2|`.
pub fn mrs(a: RunPoint, b: RunPoint) -> Result<f64> {
    mrs_within(a, b, LOSS_TOLERANCE)
}

pub fn mrs_within(a: RunPoint, b: RunPoint, loss_tolerance: f64) -> Result<f64> {
    if let (Some(la), Some(lb)) = (a.loss, b.loss) {
        if (la - lb).abs() > loss_tolerance {
            return Err(Error::NotIndifferent(la, lb));
        }
    }
    let dx = (a.ppt_steps - b.ppt_steps).abs();
    if dx == 0.0 {
        return Err(Error::EqualPretrainingSteps(a.ppt_steps));
    }
    Ok((a.pt_steps - b.pt_steps).abs() / dx)
}

/// `1 - ppt_total / baseline_total`, where `ppt_total = x + y` of the
/// pre-pretrained run in the same units as the baseline.
pub fn token_efficiency(baseline_total: f64, ppt_total: f64) -> Result<f64> {
    for v in [baseline_total, ppt_total] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::NonPositive(v));
        }
    }
    Ok(1.0 - ppt_total / baseline_total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndifferenceRow {
    pub loss: f64,
    pub baseline_steps: f64,
    pub run_pt_steps: Option<f64>,
    pub run_total_steps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MrsReport {
    pub eval_step: f64,
    pub target_loss: f64,
    pub baseline: RunPoint,
    pub run: RunPoint,
    pub mrs: f64,
    /// MRS in tokens per token, using each curve's tokens_per_step.
    pub mrs_tokens: f64,
    pub efficiency: f64,
    pub non_monotone: bool,
    pub table: Vec<IndifferenceRow>,
}

/// Compares a pre-pretrained run against the baseline at `eval_step`
/// baseline pretraining steps.
pub fn evaluate(baseline: &LossCurve, run: &LossCurve, eval_step: f64) -> Result<MrsReport> {
    let target_loss = baseline.loss_at(eval_step)?;
    let crossing = indifference_point(run, target_loss)?;
    let base_point = RunPoint::new(0.0, eval_step).with_loss(target_loss);
    let run_point = RunPoint::new(run.ppt_steps, crossing.step).with_loss(target_loss);
    let mrs = mrs(base_point, run_point)?;
    let mrs_tokens = mrs_within(
        RunPoint::new(0.0, eval_step * baseline.tokens_per_step),
        run_point.in_tokens(run.tokens_per_step),
        f64::INFINITY,
    )?;
    let efficiency = token_efficiency(
        eval_step * baseline.tokens_per_step,
        run_point.total() * run.tokens_per_step,
    )?;
    let table = baseline
        .points()
        .iter()
        .map(|&(step, loss)| {
            let hit = indifference_point(run, loss).ok();
            IndifferenceRow {
                loss,
                baseline_steps: step as f64,
                run_pt_steps: hit.map(|c| c.step),
                run_total_steps: hit.map(|c| c.step + run.ppt_steps),
            }
        })
        .collect();
    Ok(MrsReport {
        eval_step,
        target_loss,
        baseline: base_point,
        run: run_point,
        mrs,
        mrs_tokens,
        efficiency,
        non_monotone: crossing.non_monotone,
        table,
    })
}

/// `label,step,loss` rows for every curve, for external plotting.
pub fn plot_data(curves: &[&LossCurve]) -> String {
    let mut out = String::from("label,step,loss\n");
    for c in curves {
        for (s, l) in c.points() {
            let _ = writeln!(out, "{},{s},{l}", c.label.replace(',', ";"));
        }
    }
    out
}

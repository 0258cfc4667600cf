//! Correlation metrics, ordinal decoding and score reports.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::AffectTarget;
use crate::error::{Error, Result};

pub use crate::experiment::run_experiment;

fn check_pair(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::InvalidInput(format!(
            "length mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::InvalidInput("need at least two values".into()));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite value".into()));
    }
    Ok(())
}

/// Sample Pearson correlation coefficient.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    check_pair(a, b)?;
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

/// Pearson correlation, with a constant side scored as 0.
pub fn pearson_or_zero(a: &[f64], b: &[f64]) -> Result<f64> {
    match pearson(a, b) {
        Err(Error::ZeroVariance) => Ok(0.0),
        other => other,
    }
}

/// Fractional ranks starting at 1; tied values share their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Spearman rank correlation: Pearson of average ranks.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64> {
    check_pair(a, b)?;
    pearson(&average_ranks(a), &average_ranks(b))
}

/// Position of class `k` of `n` ordered classes on the [0,1] scale.
pub fn class_to_unit(k: usize, n: usize) -> f64 {
    if n <= 1 {
        0.0
    } else {
        k as f64 / (n - 1) as f64
    }
}

/// Nearest class index on the grid `k/(n-1)`. Values are clipped to [0,1]
/// first; exact midpoints go to the higher class.
pub fn to_ordinal(pred: f64, n_classes: usize) -> usize {
    if n_classes <= 1 {
        return 0;
    }
    let steps = (n_classes - 1) as f64;
    let scaled = if pred.is_nan() { 0.0 } else { pred.clamp(0.0, 1.0) } * steps;
    let k = (scaled + 0.5).floor();
    // (k - 0.5) may land a hair above scaled through rounding; compare in grid units
    let k = if k > 0.0 && scaled - (k - 1.0) < k - scaled { k - 1.0 } else { k };
    (k as usize).min(n_classes - 1)
}

/// Predictions snapped to the class grid of an ordinal task; regression
/// predictions pass through.
pub fn decode_for_task(target: AffectTarget, pred: &[f64]) -> Vec<f64> {
    match target.n_classes() {
        Some(n) => pred.iter().map(|&p| class_to_unit(to_ordinal(p, n), n)).collect(),
        None => pred.to_vec(),
    }
}

/// Pearson of the task's decoded predictions against gold, 0 when either
/// side is constant.
pub fn task_score(target: AffectTarget, pred: &[f64], gold: &[f64]) -> Result<f64> {
    pearson_or_zero(&decode_for_task(target, pred), gold)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub task: String,
    pub model: String,
    pub dev: f64,
    pub test: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub metric: String,
    pub rows: Vec<ScoreRow>,
}

impl ScoreReport {
    pub fn new(metric: impl Into<String>) -> Self {
        ScoreReport {
            metric: metric.into(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: ScoreRow) -> Result<()> {
        for s in std::iter::once(row.dev).chain(row.test) {
            if !(-1.0..=1.0).contains(&s) {
                return Err(Error::InvalidInput(format!("score {s} outside [-1,1]")));
            }
        }
        if self
            .rows
            .iter()
            .any(|r| r.task == row.task && r.model == row.model)
        {
            return Err(Error::InvalidInput(format!(
                "duplicate report row {}/{}",
                row.task, row.model
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn get(&self, task: &str, model: &str) -> Option<&ScoreRow> {
        self.rows.iter().find(|r| r.task == task && r.model == model)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("task\tmodel\tmetric\tdev\ttest\n");
        for r in &self.rows {
            let test = r.test.map(|t| t.to_string()).unwrap_or_else(|| "-".into());
            let _ = writeln!(out, "{}\t{}\t{}\t{}\t{}", r.task, r.model, self.metric, r.dev, test);
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self> {
        let path = Path::new("<report>");
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, "task\tmodel\tmetric\tdev\ttest")) => {}
            _ => return Err(Error::parse(path, 1, "missing report header")),
        }
        let mut report: Option<ScoreReport> = None;
        for (i, line) in lines {
            if line.is_empty() {
                continue;
            }
            let c: Vec<&str> = line.split('\t').collect();
            if c.len() != 5 {
                return Err(Error::parse(path, i + 1, "expected 5 columns"));
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::parse(path, i + 1, format!("bad score {s:?}")))
            };
            let rep = report.get_or_insert_with(|| ScoreReport::new(c[2]));
            let test = if c[4] == "-" { None } else { Some(num(c[4])?) };
            rep.push(ScoreRow {
                task: c[0].into(),
                model: c[1].into(),
                dev: num(c[3])?,
                test,
            })?;
        }
        Ok(report.unwrap_or_else(|| ScoreReport::new("pearson")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("report json: {e}")))
    }

    /// Aligned plain-text table with three decimals.
    pub fn to_table(&self) -> String {
        let headers = ["task", "model", "dev", "test"];
        let cells: Vec<[String; 4]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.task.clone(),
                    r.model.clone(),
                    format!("{:.3}", r.dev),
                    r.test.map(|t| format!("{t:.3}")).unwrap_or_else(|| "-".into()),
                ]
            })
            .collect();
        let mut widths = headers.map(str::len);
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.chars().count());
            }
        }
        let mut out = String::new();
        let line = |cols: [&str; 4], out: &mut String| {
            let _ = writeln!(
                out,
                "{:<w0$}  {:<w1$}  {:>w2$}  {:>w3$}",
                cols[0],
                cols[1],
                cols[2],
                cols[3],
                w0 = widths[0],
                w1 = widths[1],
                w2 = widths[2],
                w3 = widths[3]
            );
        };
        line(headers, &mut out);
        for row in &cells {
            line([&row[0], &row[1], &row[2], &row[3]], &mut out);
        }
        let _ = writeln!(out, "({})", self.metric);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pearson_examples() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert!((pearson(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        let neg: Vec<f64> = a.iter().map(|v| -v).collect();
        assert!((pearson(&a, &neg).unwrap() + 1.0).abs() < 1e-12);
        // centered: (-1.5,-.5,.5,1.5) and (-3,-1,0,4); r = 11 / sqrt(5 * 26)
        let r = pearson(&a, &[2.0, 4.0, 5.0, 9.0]).unwrap();
        assert!((r - 0.9648).abs() < 1e-3, "{r}");
        assert!((r - 11.0 / 130f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn pearson_errors() {
        assert!(matches!(
            pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(Error::ZeroVariance)
        ));
        assert!(pearson(&[1.0], &[1.0]).is_err());
        assert!(pearson(&[1.0, 2.0], &[1.0]).is_err());
        assert_eq!(pearson_or_zero(&[1.0, 1.0], &[1.0, 2.0]).unwrap(), 0.0);
    }

    #[test]
    fn spearman_examples() {
        let r = spearman(&[1.0, 2.0, 3.0], &[3.0, 1.0, 2.0]).unwrap();
        assert!((r + 0.5).abs() < 1e-12, "{r}");
        // ranks (1.5,1.5,3) vs (1,2,3): r = 1.5 / sqrt(1.5 * 2)
        let r = spearman(&[1.0, 1.0, 2.0], &[1.0, 2.0, 3.0]).unwrap();
        assert!((r - 0.866).abs() < 1e-3, "{r}");
        let a = [0.3, -2.0, 5.0, 1.0];
        let cubed: Vec<f64> = a.iter().map(|v| v * v * v).collect();
        assert!((spearman(&a, &cubed).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ordinal_decoding() {
        assert_eq!(to_ordinal(0.0, 4), 0);
        assert_eq!(to_ordinal(0.5, 4), 2);
        assert_eq!(to_ordinal(0.34, 4), 1);
        assert_eq!(to_ordinal(-0.2, 4), 0);
        assert_eq!(to_ordinal(1.7, 4), 3);
        assert_eq!(to_ordinal(0.5, 2), 1);
        assert_eq!(to_ordinal(0.49, 2), 0);
        for n in 2..=10 {
            for k in 0..n {
                assert_eq!(to_ordinal(class_to_unit(k, n), n), k);
            }
        }
    }

    #[test]
    fn ordinal_tasks_score_decoded_classes() {
        let oc: AffectTarget = "EI-Oc-joy".parse().unwrap();
        let gold = [0.0, 1.0 / 3.0, 1.0];
        // 0.1 decodes to class 0, 0.2 to class 1
        assert_eq!(decode_for_task(oc, &[0.1, 0.2, 0.9]), [0.0, 1.0 / 3.0, 1.0]);
        assert!((task_score(oc, &[0.1, 0.2, 0.9], &gold).unwrap() - 1.0).abs() < 1e-12);
        let reg: AffectTarget = "V-Reg".parse().unwrap();
        assert_eq!(decode_for_task(reg, &[0.1, 0.2]), [0.1, 0.2]);
    }

    #[test]
    fn degenerate_class_grid() {
        assert_eq!(class_to_unit(0, 1), 0.0);
        assert_eq!(to_ordinal(0.7, 1), 0);
    }

    #[test]
    fn report_formats_round_trip() {
        let mut r = ScoreReport::new("pearson");
        r.push(ScoreRow {
            task: "EI-Reg-anger".into(),
            model: "FF-t".into(),
            dev: 0.1 + 0.2,
            test: Some(-0.123456789),
        })
        .unwrap();
        r.push(ScoreRow {
            task: "EI-Reg-anger".into(),
            model: "ensemble".into(),
            dev: 0.7,
            test: None,
        })
        .unwrap();
        assert_eq!(ScoreReport::from_tsv(&r.to_tsv()).unwrap(), r);
        assert_eq!(ScoreReport::from_json(&r.to_json()).unwrap(), r);
        assert!(r.to_table().contains("FF-t"));
        assert!(r
            .push(ScoreRow {
                task: "EI-Reg-anger".into(),
                model: "FF-t".into(),
                dev: 0.0,
                test: None
            })
            .is_err());
    }
}

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum VerdictStatus {
    Pass,
    Fail,
    NotApplicable,
}

/// A checked claim: the predicted value, the measured one and the outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub predicted: f64,
    pub measured: f64,
    pub status: VerdictStatus,
    pub detail: String,
}

impl Verdict {
    pub fn new(name: &str, predicted: f64, measured: f64, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            predicted,
            measured,
            status: if pass { VerdictStatus::Pass } else { VerdictStatus::Fail },
            detail: detail.into(),
        }
    }

    pub fn not_applicable(name: &str, predicted: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            predicted,
            measured: f64::NAN,
            status: VerdictStatus::NotApplicable,
            detail: detail.into(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == VerdictStatus::Pass
    }
}

/// Least-squares line `y = slope·x + intercept` with the standard error of
/// the slope (zero for two points).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub name: String,
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub points: usize,
}

pub fn fit_line(name: &str, xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| (x, y))
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let n = pts.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_stderr = if n > 2 {
        let sse: f64 = pts
            .iter()
            .map(|p| (p.1 - intercept - slope * p.0).powi(2))
            .sum();
        (sse / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Some(LinearFit {
        name: name.to_string(),
        slope,
        intercept,
        slope_stderr,
        points: n,
    })
}

/// Fit in log-log coordinates.
pub fn fit_loglog(name: &str, xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    fit_line(name, &lx, &ly)
}

/// Table, fits and verdicts of one experiment run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub fits: Vec<LinearFit>,
    pub verdicts: Vec<Verdict>,
    /// Runs excluded from the fits, with the reason.
    pub flagged: Vec<String>,
    pub config: serde_json::Value,
    pub wall_time_secs: f64,
}

impl ExperimentReport {
    pub fn new(experiment: &str, columns: &[&str], config: serde_json::Value) -> Self {
        Self {
            experiment: experiment.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            fits: Vec::new(),
            verdicts: Vec::new(),
            flagged: Vec::new(),
            config,
            wall_time_secs: 0.0,
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    pub fn fit(&self, name: &str) -> Option<&LinearFit> {
        self.fits.iter().find(|f| f.name == name)
    }

    /// Every applicable verdict passed (and there was at least one).
    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().any(|v| v.passed())
            && self
                .verdicts
                .iter()
                .all(|v| v.status != VerdictStatus::Fail)
    }

    pub fn any_failed(&self) -> bool {
        self.verdicts.iter().any(|v| v.status == VerdictStatus::Fail)
    }
}

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::rng::SimRng;

/// Number of bootstrap resamples behind every confidence interval.
pub const BOOTSTRAP_RESAMPLES: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub median: f64,
    pub q05: f64,
    pub q95: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    /// `None` for an empty sample.
    pub fn of(values: &[f64]) -> Option<Summary> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Some(Summary {
            mean: v.iter().sum::<f64>() / v.len() as f64,
            median: quantile_sorted(&v, 0.5),
            q05: quantile_sorted(&v, 0.05),
            q95: quantile_sorted(&v, 0.95),
            min: v[0],
            max: v[v.len() - 1],
        })
    }
}

/// Linear interpolation between order statistics (`h = (len - 1) * q`).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn median(values: &[f64]) -> Option<f64> {
    Summary::of(values).map(|s| s.median)
}

/// Central 95% interval of `stat` over paired bootstrap resamples: each
/// resample draws trial indices with replacement and passes the same index
/// set to `stat`. Resamples where `stat` is `None` are skipped.
pub fn paired_bootstrap(
    trials: usize,
    rng: &mut SimRng,
    mut stat: impl FnMut(&[usize]) -> Option<f64>,
) -> Option<(f64, f64)> {
    if trials == 0 {
        return None;
    }
    let mut idx = vec![0; trials];
    let mut values = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    for _ in 0..BOOTSTRAP_RESAMPLES {
        for i in idx.iter_mut() {
            *i = rng.random_range(0..trials);
        }
        if let Some(x) = stat(&idx) {
            values.push(x);
        }
    }
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    Some((quantile_sorted(&values, 0.025), quantile_sorted(&values, 0.975)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthModel {
    LogN,
    N,
    NLogN,
    NTwoThirds,
}

impl GrowthModel {
    pub const ALL: [GrowthModel; 4] = [GrowthModel::LogN, GrowthModel::N, GrowthModel::NLogN, GrowthModel::NTwoThirds];

    pub fn name(&self) -> &'static str {
        match self {
            GrowthModel::LogN => "log n",
            GrowthModel::N => "n",
            GrowthModel::NLogN => "n log n",
            GrowthModel::NTwoThirds => "n^(2/3)",
        }
    }

    pub fn eval(&self, n: f64) -> f64 {
        match self {
            GrowthModel::LogN => n.log2(),
            GrowthModel::N => n,
            GrowthModel::NLogN => n * n.log2(),
            GrowthModel::NTwoThirds => n.powf(2.0 / 3.0),
        }
    }
}

/// Least-squares fit `y = slope * f(n) + intercept`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFit {
    pub model: GrowthModel,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub residuals: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    /// One fit per model, in [`GrowthModel::ALL`] order.
    pub fits: Vec<ModelFit>,
    pub best: GrowthModel,
}

impl GrowthFit {
    pub fn fit(&self, model: GrowthModel) -> &ModelFit {
        self.fits.iter().find(|f| f.model == model).expect("every model is fitted")
    }
}

/// Fits every growth model to `(n, y)` points and picks the one with the
/// highest `R^2`. Needs at least three distinct `n` and non-constant `y`.
pub fn fit_growth(points: &[(f64, f64)]) -> Result<GrowthFit, ExperimentError> {
    let mut ns: Vec<f64> = points.iter().map(|p| p.0).collect();
    ns.sort_by(f64::total_cmp);
    ns.dedup();
    if ns.len() < 3 {
        return Err(ExperimentError::Fit(format!("need at least 3 distinct sizes, got {}", ns.len())));
    }
    if points.iter().any(|&(n, y)| !(n >= 1.0 && n.is_finite() && y.is_finite())) {
        return Err(ExperimentError::Fit("sizes must be >= 1 and values finite".into()));
    }
    let k = points.len() as f64;
    let ybar = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sst: f64 = points.iter().map(|p| (p.1 - ybar).powi(2)).sum();
    if sst <= 0.0 {
        return Err(ExperimentError::Fit("values are constant".into()));
    }
    let fits: Vec<ModelFit> = GrowthModel::ALL
        .iter()
        .map(|&model| {
            let xs: Vec<f64> = points.iter().map(|p| model.eval(p.0)).collect();
            let xbar = xs.iter().sum::<f64>() / k;
            let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
            let sxy: f64 = xs.iter().zip(points).map(|(x, p)| (x - xbar) * (p.1 - ybar)).sum();
            let slope = sxy / sxx;
            let intercept = ybar - slope * xbar;
            let residuals: Vec<f64> = xs.iter().zip(points).map(|(x, p)| p.1 - (slope * x + intercept)).collect();
            let sse: f64 = residuals.iter().map(|r| r * r).sum();
            ModelFit { model, slope, intercept, r_squared: 1.0 - sse / sst, residuals }
        })
        .collect();
    let best = fits.iter().max_by(|a, b| a.r_squared.total_cmp(&b.r_squared)).unwrap().model;
    Ok(GrowthFit { fits, best })
}

use serde::{Deserialize, Serialize};

use super::ReadoutError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// `a * n`
    Linear,
    /// `a * n * ln n`
    NLogN,
    /// `a * n^b`, fitted on log-log axes
    Power,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub model: FitModel,
    pub a: f64,
    pub b: Option<f64>,
    /// Euclidean norm of `y - model(x)` on the original axes.
    pub residual_norm: f64,
}

impl Fit {
    pub fn predict(&self, x: f64) -> f64 {
        match self.model {
            FitModel::Linear => self.a * x,
            FitModel::NLogN => self.a * x * x.ln(),
            FitModel::Power => self.a * x.powf(self.b.unwrap_or(1.0)),
        }
    }
}

/// Closed-form least squares of `(n_tilde, N)` data.
pub fn fit_scaling(data: &[(f64, f64)], model: FitModel) -> Result<Fit, ReadoutError> {
    if data.len() < 2 {
        return Err(ReadoutError::DegenerateData("need at least two points"));
    }
    if data.iter().any(|&(x, y)| !(x >= 2.0) || !y.is_finite()) {
        return Err(ReadoutError::DegenerateData("n_tilde must be >= 2 and N finite"));
    }
    let (a, b) = match model {
        FitModel::Linear | FitModel::NLogN => {
            let basis = |x: f64| if model == FitModel::Linear { x } else { x * x.ln() };
            let sxy: f64 = data.iter().map(|&(x, y)| basis(x) * y).sum();
            let sxx: f64 = data.iter().map(|&(x, _)| basis(x) * basis(x)).sum();
            (sxy / sxx, None)
        }
        FitModel::Power => {
            if data.iter().any(|&(_, y)| y <= 0.0) {
                return Err(ReadoutError::DegenerateData("power fit needs positive N"));
            }
            let pts: Vec<(f64, f64)> = data.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
            let m = pts.len() as f64;
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
            let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
            if sxx == 0.0 {
                return Err(ReadoutError::DegenerateData("all n_tilde equal"));
            }
            let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            let b = sxy / sxx;
            ((my - b * mx).exp(), Some(b))
        }
    };
    let mut fit = Fit { model, a, b, residual_norm: 0.0 };
    fit.residual_norm = data.iter().map(|&(x, y)| (y - fit.predict(x)).powi(2)).sum::<f64>().sqrt();
    Ok(fit)
}

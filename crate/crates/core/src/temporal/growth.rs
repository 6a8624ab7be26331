//! Exponential growth fit: ordinary least squares of ln(count) on year.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::series::YearlySeries;
use super::TemporalError;

pub const DEFAULT_HORIZON: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthModel {
    pub collection: String,
    /// Fitted ln(count) at `year_mean`.
    pub intercept: f64,
    pub slope: f64,
    pub year_mean: f64,
    /// Σ (year - year_mean)².
    pub sxx: f64,
    pub n: usize,
    pub residual_variance: f64,
    /// Two-sided 97.5% Student t quantile with n - 2 degrees of freedom.
    pub t_quantile: f64,
    pub first_year: i32,
    pub last_year: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Forecast {
    pub year: i32,
    pub point: f64,
    pub low: f64,
    pub high: f64,
    /// Half-width of the 95% prediction interval on the log scale.
    pub log_half_width: f64,
}

impl GrowthModel {
    pub fn predict_ln(&self, year: i32) -> f64 {
        self.intercept + self.slope * (f64::from(year) - self.year_mean)
    }

    pub fn forecast(&self, year: i32) -> Forecast {
        let centre = self.predict_ln(year);
        let dx = f64::from(year) - self.year_mean;
        let se = (self.residual_variance * (1.0 + 1.0 / self.n as f64 + dx * dx / self.sxx)).sqrt();
        let hw = self.t_quantile * se;
        Forecast {
            year,
            point: centre.exp(),
            low: (centre - hw).exp(),
            high: (centre + hw).exp(),
            log_half_width: hw,
        }
    }
}

/// Fits `ln(count) = a + b (year - mean)` over the given (year, count) pairs.
pub fn fit_growth_points(collection: &str, points: &[(i32, f64)]) -> Result<GrowthModel, TemporalError> {
    if points.len() < 3 {
        return Err(TemporalError::TooFewPoints(points.len()));
    }
    if let Some(&(year, _)) = points.iter().find(|(_, c)| c.is_nan() || *c <= 0.0) {
        return Err(TemporalError::LogOfZero(year));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|&(y, _)| f64::from(y)).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, c)| c.ln()).collect();
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - x_mean) * (y - y_mean)).sum();
    let slope = sxy / sxx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - y_mean - slope * (x - x_mean)).powi(2))
        .sum();
    let dof = n - 2.0;
    let t = StudentsT::new(0.0, 1.0, dof)
        .map_err(|e| TemporalError::Numeric(e.to_string()))?
        .inverse_cdf(0.975);
    Ok(GrowthModel {
        collection: collection.to_string(),
        intercept: y_mean,
        slope,
        year_mean: x_mean,
        sxx,
        n: points.len(),
        residual_variance: sse / dof,
        t_quantile: t,
        first_year: points[0].0,
        last_year: points[points.len() - 1].0,
    })
}

/// Fits the publication-count series over its whole window.
pub fn fit_growth(series: &YearlySeries) -> Result<GrowthModel, TemporalError> {
    let points: Vec<(i32, f64)> = series.points.iter().map(|p| (p.year, p.value.unwrap_or(0.0))).collect();
    fit_growth_points(&series.collection, &points)
}

/// Forecasts for the `horizon` years following the fit window.
pub fn extrapolate(model: &GrowthModel, horizon: usize) -> Vec<Forecast> {
    (1..=horizon as i32)
        .map(|h| model.forecast(model.last_year + h))
        .collect()
}

//! Levenberg-Marquardt Lorentzian fit and the weighted straight-line fit used
//! for linewidth extrapolation.

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use super::SpectroscopyError;

/// `offset + amplitude / (1 + ((x - center) / (fwhm / 2))^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzianFit {
    pub center: f64,
    /// Full width at half maximum, same unit as `x`.
    pub fwhm: f64,
    pub amplitude: f64,
    pub offset: f64,
    /// Euclidean norm of the residual vector at the solution.
    pub residual_norm: f64,
    pub iterations: usize,
}

impl LorentzianFit {
    pub fn eval(&self, x: f64) -> f64 {
        lorentzian(x, self.center, self.fwhm, self.amplitude, self.offset)
    }

    /// Half width at half maximum.
    pub fn hwhm(&self) -> f64 {
        0.5 * self.fwhm
    }
}

pub fn lorentzian(x: f64, center: f64, fwhm: f64, amplitude: f64, offset: f64) -> f64 {
    let u = 2.0 * (x - center) / fwhm;
    offset + amplitude / (1.0 + u * u)
}

#[derive(Debug, Clone, Copy)]
pub struct FitSettings {
    pub max_iterations: usize,
    /// Stop once the parameter step is below `step_tolerance * |p|`.
    pub step_tolerance: f64,
}

impl Default for FitSettings {
    fn default() -> Self {
        Self { max_iterations: 200, step_tolerance: 1e-10 }
    }
}

pub fn fit_lorentzian(x: &[f64], y: &[f64]) -> Result<LorentzianFit, SpectroscopyError> {
    fit_lorentzian_with(x, y, FitSettings::default())
}

pub fn fit_lorentzian_with(
    x: &[f64],
    y: &[f64],
    settings: FitSettings,
) -> Result<LorentzianFit, SpectroscopyError> {
    if x.len() != y.len() {
        return Err(SpectroscopyError::ShapeMismatch { expected: x.len(), got: y.len() });
    }
    if x.len() < 5 {
        return Err(SpectroscopyError::TooFewSamples { needed: 5, got: x.len() });
    }
    super::check_monotone("x", x)?;
    if y.iter().any(|v| !v.is_finite()) {
        return Err(SpectroscopyError::Invalid("non-finite sample".into()));
    }
    let (y_min, y_max) = y.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    if y_max - y_min <= 1e-14 * y_max.abs().max(y_min.abs()).max(f64::MIN_POSITIVE) {
        return Err(SpectroscopyError::DegenerateData);
    }

    // Work in a normalized abscissa so the normal equations stay well scaled.
    let x0 = 0.5 * (x[0] + x[x.len() - 1]);
    let xs = 0.5 * (x[x.len() - 1] - x[0]).abs();
    let xn: Vec<f64> = x.iter().map(|&v| (v - x0) / xs).collect();
    let ys = y_max - y_min;
    let yn: Vec<f64> = y.iter().map(|&v| (v - y_min) / ys).collect();

    let mut p = initial_guess(&xn, &yn);
    let mut cost = cost_of(&xn, &yn, &p);
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < settings.max_iterations {
        iterations += 1;
        let (jtj, jtr) = normal_equations(&xn, &yn, &p);
        let mut accepted = false;
        let mut step_small = false;
        for _ in 0..40 {
            let mut a = jtj;
            for k in 0..4 {
                a[(k, k)] += lambda * jtj[(k, k)].max(1e-12);
            }
            let Some(delta) = a.lu().solve(&jtr) else {
                lambda *= 10.0;
                continue;
            };
            let trial = p + delta;
            step_small = delta.norm() <= settings.step_tolerance * (p.norm() + settings.step_tolerance);
            let c = if trial[1] > 0.0 { cost_of(&xn, &yn, &trial) } else { f64::INFINITY };
            if c.is_finite() && c <= cost {
                p = trial;
                cost = c;
                lambda = (lambda / 10.0).max(1e-15);
                accepted = true;
                break;
            }
            lambda *= 10.0;
            if step_small {
                break;
            }
        }
        if step_small || (!accepted && lambda > 1e30) || cost == 0.0 {
            converged = true;
            break;
        }
    }
    if !converged || !p.iter().all(|v| v.is_finite()) {
        return Err(SpectroscopyError::FitDiverged { iterations });
    }

    Ok(LorentzianFit {
        center: x0 + xs * p[0],
        fwhm: xs * p[1],
        amplitude: ys * p[2],
        offset: y_min + ys * p[3],
        residual_norm: ys * (2.0 * cost).sqrt(),
        iterations,
    })
}

/// Peak or dip location from the extreme sample, baseline from the median,
/// width from a half-maximum scan.
fn initial_guess(x: &[f64], y: &[f64]) -> Vector4<f64> {
    let mut sorted = y.to_vec();
    sorted.sort_by(f64::total_cmp);
    let base = sorted[sorted.len() / 2];
    let (i_max, &v_max) = y.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    let (i_min, &v_min) = y.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    let (k, amp) = if v_max - base >= base - v_min { (i_max, v_max - base) } else { (i_min, v_min - base) };
    let half = base + 0.5 * amp;
    let beyond = |v: f64| if amp > 0.0 { v < half } else { v > half };
    let left = (0..k).rev().find(|&i| beyond(y[i])).unwrap_or(0);
    let right = (k + 1..y.len()).find(|&i| beyond(y[i])).unwrap_or(y.len() - 1);
    let min_step = (x[1] - x[0]).abs();
    let width = (x[right] - x[left]).abs().max(min_step);
    Vector4::new(x[k], width, amp, base)
}

fn cost_of(x: &[f64], y: &[f64], p: &Vector4<f64>) -> f64 {
    0.5 * x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let r = yi - lorentzian(xi, p[0], p[1], p[2], p[3]);
            r * r
        })
        .sum::<f64>()
}

fn normal_equations(x: &[f64], y: &[f64], p: &Vector4<f64>) -> (Matrix4<f64>, Vector4<f64>) {
    let (c, w, a, b) = (p[0], p[1], p[2], p[3]);
    let mut jtj = Matrix4::zeros();
    let mut jtr = Vector4::zeros();
    for (&xi, &yi) in x.iter().zip(y) {
        let u = 2.0 * (xi - c) / w;
        let den = 1.0 + u * u;
        let l = 1.0 / den;
        let r = yi - (b + a * l);
        let j = Vector4::new(
            4.0 * a * u / (w * den * den),
            2.0 * a * u * u / (w * den * den),
            l,
            1.0,
        );
        jtj += j * j.transpose();
        jtr += j * r;
    }
    (jtj, jtr)
}

/// Intercept and slope of a weighted least-squares line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
}

pub fn weighted_line_fit(x: &[f64], y: &[f64], w: &[f64]) -> Result<LineFit, SpectroscopyError> {
    if x.len() != y.len() || x.len() != w.len() {
        return Err(SpectroscopyError::ShapeMismatch { expected: x.len(), got: y.len().min(w.len()) });
    }
    if w.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(SpectroscopyError::Invalid("weights must be positive".into()));
    }
    let sw: f64 = w.iter().sum();
    let xm = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let ym = y.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for ((&xi, &yi), &wi) in x.iter().zip(y).zip(w) {
        sxx += wi * (xi - xm) * (xi - xm);
        sxy += wi * (xi - xm) * (yi - ym);
    }
    if !(sxx > 0.0) {
        return Err(SpectroscopyError::DegenerateData);
    }
    let slope = sxy / sxx;
    Ok(LineFit { intercept: ym - slope * xm, slope })
}

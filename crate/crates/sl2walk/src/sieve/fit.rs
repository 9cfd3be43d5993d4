//! Least-squares decay fits on log-transformed bound columns, and a
//! shape classifier distinguishing plain exponential decay exp(-c*l)
//! from the stretched form exp(-c*sqrt(l/log l)).

use serde::{Deserialize, Serialize};

/// Ordinary least squares for log(y) = intercept + slope * x.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitResult {
    pub intercept: f64,
    pub slope: f64,
    /// Coefficient of determination on the log scale.
    pub r2: f64,
    pub points: usize,
}

/// Fit log(y) against the given abscissas; rows with y <= 0 are
/// dropped (log undefined; they carry no decay information).
pub fn log_linear_fit(xs: &[f64], ys: &[f64]) -> Option<FitResult> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(_, y)| **y > 0.0)
        .map(|(x, y)| (*x, y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|(x, _)| x).sum();
    let sy: f64 = pts.iter().map(|(_, y)| y).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-30 {
        return None;
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let mean_y = sy / n;
    let ss_tot: f64 = pts.iter().map(|(_, y)| (y - mean_y).powi(2)).sum();
    let ss_res: f64 = pts
        .iter()
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r2 = if ss_tot < 1e-30 {
        // constant data: a flat line explains it perfectly
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Some(FitResult {
        intercept,
        slope,
        r2,
        points: pts.len(),
    })
}

/// Abscissa of the stretched decay form.
pub fn stretched_abscissa(l: f64) -> f64 {
    if l <= 1.0 {
        0.0
    } else {
        (l / l.ln()).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayShape {
    Exponential,
    Stretched,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShapeFit {
    pub exponential: Option<FitResult>,
    pub stretched: Option<FitResult>,
    pub shape: DecayShape,
}

/// Fit both candidate decay shapes over the schedule and pick the one
/// with the higher coefficient of determination.
pub fn classify_shape(ls: &[f64], values: &[f64]) -> ShapeFit {
    let exponential = log_linear_fit(ls, values);
    let sx: Vec<f64> = ls.iter().map(|l| stretched_abscissa(*l)).collect();
    let stretched = log_linear_fit(&sx, values);
    let shape = match (&exponential, &stretched) {
        (Some(e), Some(s)) => {
            if e.r2 >= s.r2 {
                DecayShape::Exponential
            } else {
                DecayShape::Stretched
            }
        }
        (Some(_), None) => DecayShape::Exponential,
        (None, Some(_)) => DecayShape::Stretched,
        (None, None) => DecayShape::Inconclusive,
    };
    ShapeFit {
        exponential,
        stretched,
        shape,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_recovered() {
        let xs: Vec<f64> = (1..=20).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (2.0 - 0.3 * x).exp()).collect();
        let fit = log_linear_fit(&xs, &ys).unwrap();
        assert!((fit.slope + 0.3).abs() < 1e-12);
        assert!((fit.intercept - 2.0).abs() < 1e-12);
        assert!((fit.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nonpositive_rows_dropped() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [1.0, 0.0, 0.5, 0.25];
        let fit = log_linear_fit(&xs, &ys).unwrap();
        assert_eq!(fit.points, 3);
        assert!(fit.slope < 0.0);
    }

    #[test]
    fn classifier_separates_shapes_noise_free() {
        let ls: Vec<f64> = (4..=64).step_by(4).map(|i| i as f64).collect();
        let exp_data: Vec<f64> = ls.iter().map(|l| (-0.2 * l).exp()).collect();
        let str_data: Vec<f64> = ls
            .iter()
            .map(|l| (-1.5 * stretched_abscissa(*l)).exp())
            .collect();
        assert_eq!(classify_shape(&ls, &exp_data).shape, DecayShape::Exponential);
        assert_eq!(classify_shape(&ls, &str_data).shape, DecayShape::Stretched);
    }

    #[test]
    fn too_few_points_is_inconclusive() {
        let out = classify_shape(&[5.0], &[0.5]);
        assert_eq!(out.shape, DecayShape::Inconclusive);
    }
}

//! Time series of domain trust and the mean absolute error between them.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("times must strictly increase: {prev} then {next}")]
    NotIncreasing { prev: f64, next: f64 },
    #[error("series are not aligned at index {index}: {left} vs {right}")]
    Misaligned { index: usize, left: f64, right: f64 },
    #[error("series lengths differ: {0} vs {1}")]
    Length(usize, usize),
    #[error("mean absolute error of empty series is undefined")]
    Empty,
}

/// `(time, value)` pairs with strictly increasing times.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricSeries {
    points: Vec<(f64, f64)>,
}

impl MetricSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_points<I: IntoIterator<Item = (f64, f64)>>(points: I) -> Result<Self, MetricsError> {
        let mut s = Self::new();
        for (t, v) in points {
            s.push(t, v)?;
        }
        Ok(s)
    }

    pub fn push(&mut self, time: f64, value: f64) -> Result<(), MetricsError> {
        if let Some(&(prev, _)) = self.points.last() {
            if time.is_nan() || time <= prev {
                return Err(MetricsError::NotIncreasing { prev, next: time });
            }
        }
        self.points.push((time, value));
        Ok(())
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }
}

/// Mean of `|a - b|` over pairs sharing a timestamp.
pub fn mae(series: &MetricSeries, truth: &MetricSeries) -> Result<f64, MetricsError> {
    if series.len() != truth.len() {
        return Err(MetricsError::Length(series.len(), truth.len()));
    }
    if series.is_empty() {
        return Err(MetricsError::Empty);
    }
    let mut total = 0.0;
    for (index, (a, b)) in series.points.iter().zip(&truth.points).enumerate() {
        if a.0 != b.0 {
            return Err(MetricsError::Misaligned {
                index,
                left: a.0,
                right: b.0,
            });
        }
        total += (a.1 - b.1).abs();
    }
    Ok(total / series.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(values: &[f64]) -> MetricSeries {
        MetricSeries::from_points(values.iter().enumerate().map(|(i, &v)| (i as f64 * 100.0, v))).unwrap()
    }

    #[test]
    fn mae_examples() {
        assert_eq!(mae(&s(&[0.3, 0.9]), &s(&[0.3, 0.9])), Ok(0.0));
        assert!((mae(&s(&[0.9, 0.8]), &s(&[1.0, 1.0])).unwrap() - 0.15).abs() < 1e-12);
        assert!((mae(&s(&[0.3]), &s(&[0.7])).unwrap() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn mae_rejects_bad_input() {
        let shifted = MetricSeries::from_points([(1.0, 0.1), (2.0, 0.2)]).unwrap();
        assert!(matches!(
            mae(&s(&[0.1, 0.2]), &shifted),
            Err(MetricsError::Misaligned { index: 0, .. })
        ));
        assert_eq!(mae(&s(&[0.1]), &s(&[0.1, 0.2])), Err(MetricsError::Length(1, 2)));
        assert_eq!(mae(&s(&[]), &s(&[])), Err(MetricsError::Empty));
    }

    #[test]
    fn times_must_increase() {
        assert!(MetricSeries::from_points([(1.0, 0.0), (1.0, 0.0)]).is_err());
        assert!(MetricSeries::from_points([(2.0, 0.0), (1.0, 0.0)]).is_err());
    }
}

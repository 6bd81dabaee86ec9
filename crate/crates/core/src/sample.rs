use crate::error::{Error, Result};

/// The first `r` order statistics of a sample of size `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CensoredSample {
    values: Vec<f64>,
    n: usize,
}

impl CensoredSample {
    /// Builds a sample from ascending values; `values.len()` is `r`.
    pub fn new(values: Vec<f64>, n: usize) -> Result<Self> {
        let r = values.len();
        if r < 2 || r > n {
            return Err(Error::Shape(format!("need 2 ≤ r ≤ n, got r={r}, n={n}")));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite observation {v}")));
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Shape("observations are not in ascending order".into()));
        }
        let s = CensoredSample { values, n };
        let ties = s.ties();
        if ties > 0 {
            log::warn!("censored sample contains {ties} tied order statistic(s)");
        }
        Ok(s)
    }

    /// Sorts `values` first; convenient for raw user input.
    pub fn from_unsorted(mut values: Vec<f64>, n: usize) -> Result<Self> {
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Domain("NaN observation".into()));
        }
        values.sort_by(f64::total_cmp);
        Self::new(values, n)
    }

    /// Keeps the `r` smallest values of a complete sample.
    pub fn censor(mut full: Vec<f64>, r: usize) -> Result<Self> {
        let n = full.len();
        if r < 2 || r > n {
            return Err(Error::Shape(format!("need 2 ≤ r ≤ n, got r={r}, n={n}")));
        }
        if full.iter().any(|v| v.is_nan()) {
            return Err(Error::Domain("NaN observation".into()));
        }
        full.sort_by(f64::total_cmp);
        full.truncate(r);
        Self::new(full, n)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.values.len()
    }

    /// Largest observed value X_{r:n}.
    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Number of adjacent equal pairs.
    pub fn ties(&self) -> usize {
        self.values.windows(2).filter(|w| w[0] == w[1]).count()
    }

    /// Applies `x ↦ a·x + b` to every observation (a > 0 keeps the order).
    pub fn affine(&self, a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::Domain(format!("affine scale must be positive, got {a}")));
        }
        Self::new(self.values.iter().map(|x| a * x + b).collect(), self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_checks() {
        assert!(CensoredSample::new(vec![1.0], 5).is_err());
        assert!(CensoredSample::new(vec![1.0, 2.0, 3.0], 2).is_err());
        assert!(CensoredSample::new(vec![2.0, 1.0], 2).is_err());
        assert!(CensoredSample::new(vec![1.0, f64::INFINITY], 2).is_err());
        let s = CensoredSample::from_unsorted(vec![3.0, 1.0, 2.0], 10).unwrap();
        assert_eq!(s.values(), &[1.0, 2.0, 3.0]);
        assert_eq!((s.n(), s.r()), (10, 3));
    }

    #[test]
    fn censor_keeps_smallest() {
        let s = CensoredSample::censor(vec![5.0, 1.0, 4.0, 2.0, 3.0], 3).unwrap();
        assert_eq!(s.values(), &[1.0, 2.0, 3.0]);
        assert_eq!(s.n(), 5);
    }

    #[test]
    fn ties_are_kept_and_counted() {
        let s = CensoredSample::new(vec![1.0, 1.0, 2.0], 10).unwrap();
        assert_eq!(s.ties(), 1);
        assert_eq!(s.r(), 3);
    }
}

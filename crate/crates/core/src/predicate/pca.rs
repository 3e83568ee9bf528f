use super::PredicateError;
use nalgebra::DMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcaStat {
    /// Largest eigenvalue of the sample covariance over its trace.
    pub ratio: f64,
    /// Set when the data has zero total variance; `ratio` is then 1.
    pub degenerate: bool,
}

/// Share of total variance captured by the first principal component of a
/// row-major `samples × features` matrix. Features are mean-centred first.
pub fn pca_max_ratio(data: &[f64], samples: usize, features: usize) -> Result<PcaStat, PredicateError> {
    if samples < 2 || features < 2 {
        return Err(PredicateError::TooFewSamples {
            needed: 2,
            got: samples.min(features),
        });
    }
    assert_eq!(data.len(), samples * features, "data is not samples × features");
    if data.iter().any(|x| !x.is_finite()) {
        return Err(PredicateError::NonFinite);
    }
    let mut x = DMatrix::from_row_slice(samples, features, data);
    for mut col in x.column_iter_mut() {
        // Shifting by the first entry first keeps constant columns exactly zero.
        let first = col[0];
        col.add_scalar_mut(-first);
        let m = col.mean();
        col.add_scalar_mut(-m);
    }
    let cov = (x.transpose() * &x) / (samples - 1) as f64;
    let trace = cov.trace();
    if !(trace > f64::MIN_POSITIVE) {
        return Ok(PcaStat {
            ratio: 1.0,
            degenerate: true,
        });
    }
    let eig = cov.symmetric_eigen();
    let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    Ok(PcaStat {
        ratio: (top / trace).min(1.0),
        degenerate: false,
    })
}

use crate::error::{Error, Result};

/// Discrete backflow measure `Σ max(0, d(t_{k+1}) − d(t_k))`.
///
/// This is the positive variation of the sampled series, i.e. the sum of
/// every rise from a local minimum to the following maximum. No
/// interpolation between nodes is attempted.
pub fn nonmarkovianity(series: &[f64]) -> Result<f64> {
    if series.len() < 2 {
        return Err(Error::InvalidArgument("backflow needs at least two samples".into()));
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("distance series"));
    }
    Ok(series.windows(2).map(|w| (w[1] - w[0]).max(0.0)).sum())
}

/// [`nonmarkovianity`] over the present entries of a series with gaps;
/// rises are only counted between neighbouring present samples.
pub fn nonmarkovianity_partial(series: &[Option<f64>]) -> Result<f64> {
    let present: Vec<f64> = series.iter().flatten().copied().collect();
    if present.len() < 2 {
        return Err(Error::InvalidArgument("backflow needs at least two samples".into()));
    }
    if present.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("distance series"));
    }
    Ok(series
        .windows(2)
        .filter_map(|w| Some((w[1]? - w[0]?).max(0.0)))
        .sum())
}

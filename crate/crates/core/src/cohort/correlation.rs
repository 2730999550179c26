#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CorrelationError {
    #[error("need at least 2 pairs, got {0}")]
    InsufficientData(usize),
    #[error("zero variance in the {0} coordinate")]
    ZeroVariance(&'static str),
}

/// Sample Pearson correlation coefficient of `pairs`.
pub fn pearson(pairs: &[(f64, f64)]) -> Result<f64, CorrelationError> {
    let n = pairs.len();
    if n < 2 {
        return Err(CorrelationError::InsufficientData(n));
    }
    let nf = n as f64;
    let mean_x = pairs.iter().map(|p| p.0).sum::<f64>() / nf;
    let mean_y = pairs.iter().map(|p| p.1).sum::<f64>() / nf;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for &(x, y) in pairs {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 {
        return Err(CorrelationError::ZeroVariance("first"));
    }
    if syy == 0.0 {
        return Err(CorrelationError::ZeroVariance("second"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

use crate::error::{AtdsError, Result};

/// Relative word error rate reduction against a baseline, in percent.
pub fn werr(baseline_wer: f64, wer: f64) -> Result<f64> {
    if !(baseline_wer.is_finite() && baseline_wer > 0.0) {
        return Err(AtdsError::InvalidArgument(format!("baseline WER must be > 0, got {baseline_wer}")));
    }
    if !wer.is_finite() {
        return Err(AtdsError::InvalidArgument(format!("WER must be finite, got {wer}")));
    }
    Ok((baseline_wer - wer) / baseline_wer * 100.0)
}

/// One decimal place with a percent sign, e.g. `-23.2%`.
pub fn format_werr(werr_pct: f64) -> String {
    let s = format!("{werr_pct:.1}");
    // Avoid printing "-0.0%" for tiny negative values.
    if s == "-0.0" {
        "0.0%".to_string()
    } else {
        format!("{s}%")
    }
}

/// Sample Pearson correlation coefficient.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(AtdsError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(AtdsError::InvalidArgument("pearson needs at least 2 points".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(AtdsError::ZeroVariance);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

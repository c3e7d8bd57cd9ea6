use crate::error::{Error, Result};

/// `(Σ|v_i|^p)^{1/p}`, or `max|v_i|` when `p` is infinite.
pub fn lp_norm(v: &[f64], p: f64) -> Result<f64> {
    check_p(p)?;
    if p.is_infinite() {
        return Ok(v.iter().fold(0.0_f64, |m, x| m.max(x.abs())));
    }
    // Scale by the largest magnitude so large entries do not overflow.
    let scale = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return Ok(0.0);
    }
    let s: f64 = v.iter().map(|x| (x.abs() / scale).powf(p)).sum();
    Ok(scale * s.powf(1.0 / p))
}

/// `Σ|v_i|^p` for finite `p ≥ 1`.
pub fn lp_norm_pow(v: &[f64], p: f64) -> f64 {
    if p == 1.0 {
        v.iter().map(|x| x.abs()).sum()
    } else if p == 2.0 {
        v.iter().map(|x| x * x).sum()
    } else {
        v.iter().map(|x| x.abs().powf(p)).sum()
    }
}

pub(crate) fn check_p(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidNorm(p));
    }
    Ok(())
}

pub(crate) fn check_finite_p(p: f64) -> Result<()> {
    check_p(p)?;
    if p.is_infinite() {
        return Err(Error::InvalidNorm(p));
    }
    Ok(())
}

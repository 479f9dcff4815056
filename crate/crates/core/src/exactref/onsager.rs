use crate::error::{Error, Result};

/// Critical inverse temperature `ln(1 + sqrt 2) / 2` of the square-lattice model.
pub const BETA_C: f64 = 0.440_686_793_509_771_5;

/// Spontaneous magnetization `(1 - sinh(2 beta)^-4)^(1/8)` above `BETA_C`,
/// zero at and below it.
pub fn onsager_magnetization(beta: f64) -> Result<f64> {
    if !(beta > 0.0) || beta.is_nan() {
        return Err(Error::InvalidBeta(beta));
    }
    if beta <= BETA_C || beta.is_infinite() {
        return Ok(if beta.is_infinite() { 1.0 } else { 0.0 });
    }
    let s = (2.0 * beta).sinh();
    let inner = 1.0 - 1.0 / (s * s * s * s);
    Ok(inner.max(0.0).powf(0.125))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_point() {
        let exact = (1.0 + 2f64.sqrt()).ln() / 2.0;
        assert!((BETA_C - exact).abs() < 1e-16);
        assert_eq!(onsager_magnetization(BETA_C).unwrap(), 0.0);
        assert_eq!(onsager_magnetization(0.3).unwrap(), 0.0);
        assert!(onsager_magnetization(BETA_C + 1e-6).unwrap() > 0.0);
    }

    #[test]
    fn pinned_values() {
        // 40-digit evaluations of the closed form
        assert!((onsager_magnetization(0.6).unwrap() - 0.973_608_667_440_300_5).abs() < 1e-9);
        assert!((onsager_magnetization(0.5).unwrap() - 0.911_319_377_877_496_0).abs() < 1e-9);
        assert!((onsager_magnetization(5.0).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn errors() {
        assert!(onsager_magnetization(0.0).is_err());
        assert!(onsager_magnetization(-0.2).is_err());
        assert!(onsager_magnetization(f64::NAN).is_err());
    }

    #[test]
    fn monotone_on_grid() {
        let mut prev = 0.0;
        for k in 1..=1000 {
            let m = onsager_magnetization(2.0 * k as f64 / 1000.0).unwrap();
            assert!(m >= prev && m < 1.0 + 1e-15);
            prev = m;
        }
        assert!(prev > 0.9999);
    }
}

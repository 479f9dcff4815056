use crate::error::{Error, Result};

/// Zero-field heat-bath update at inverse temperature `beta`.
///
/// Probabilities are tabulated once per rule. Only the aligned side
/// `p(|h|)` is evaluated in closed form; the anti-aligned side is stored as
/// `1 - p(|h|)`, which is exact in binary floating point for values in
/// `[1/2, 1)`. Hence `p(h) + p(-h) == 1.0` bitwise and the update decision
/// for a flipped configuration with reflected mark is the exact mirror of
/// the original one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UpdateRule {
    beta: f64,
    table: [f64; 5],
}

impl UpdateRule {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidBeta(beta));
        }
        let aligned = |h: f64| 1.0 / (1.0 + (-2.0 * beta * h).exp());
        let p2 = aligned(2.0);
        let p4 = aligned(4.0);
        Ok(UpdateRule {
            beta,
            table: [1.0 - p4, 1.0 - p2, 0.5, p2, p4],
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Probability that the refreshed spin is `+1` given neighbor sum `h`.
    /// Rounds to exactly `0` or `1` once `8 beta` exceeds about 36.7.
    #[inline]
    pub fn prob(&self, h: i32) -> f64 {
        debug_assert!(matches!(h, -4 | -2 | 0 | 2 | 4));
        self.table[((h + 4) / 2) as usize]
    }

    pub fn try_prob(&self, h: i32) -> Result<f64> {
        match h {
            -4 | -2 | 0 | 2 | 4 => Ok(self.prob(h)),
            _ => Err(Error::InvalidField(h)),
        }
    }
}

/// `1 / (1 + exp(-2 beta h))`.
pub fn heat_bath_prob(beta: f64, h: i32) -> Result<f64> {
    UpdateRule::new(beta)?.try_prob(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        for beta in [0.1, 0.6, 3.0] {
            assert_eq!(heat_bath_prob(beta, 0).unwrap(), 0.5);
        }
        let p = heat_bath_prob(0.6, 4).unwrap();
        // 1/(1+e^{-4.8}) from a 40-digit evaluation
        assert!((p - 0.991_837_428_846_840_1).abs() < 1e-15);
        let q = heat_bath_prob(0.6, -4).unwrap();
        assert!((q - 0.008_162_571_153_159_897).abs() < 1e-15);
        assert!((heat_bath_prob(0.6, -2).unwrap() - 1.0 / (1.0 + 2.4f64.exp())).abs() < 1e-16);
    }

    #[test]
    fn errors() {
        assert!(matches!(heat_bath_prob(0.0, 2), Err(Error::InvalidBeta(_))));
        assert!(matches!(heat_bath_prob(-1.0, 2), Err(Error::InvalidBeta(_))));
        assert!(heat_bath_prob(f64::NAN, 2).is_err());
        assert!(matches!(heat_bath_prob(0.5, 3), Err(Error::InvalidField(3))));
        assert!(heat_bath_prob(0.5, 6).is_err());
    }

    #[test]
    fn complement_is_bitwise() {
        for i in 1..=320 {
            let beta = i as f64 * 0.0125;
            let rule = UpdateRule::new(beta).unwrap();
            for h in [-4, -2, 0, 2, 4] {
                assert_eq!(rule.prob(h) + rule.prob(-h), 1.0, "beta={beta} h={h}");
                assert_eq!(1.0 - rule.prob(h), rule.prob(-h));
                let p = rule.prob(h);
                assert!(p > 0.0 && p < 1.0);
            }
        }
    }
}

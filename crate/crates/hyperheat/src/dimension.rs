use crate::error::{HyperheatError, Result};
use serde::{Deserialize, Serialize};

/// Boundary dimension n of the hyperbolic space H^{n+1}.
///
/// The spectral gap of the Laplacian on H^{n+1} is n^2/4. The parity of n
/// selects the evaluation engine: n even has an exact symbolic closed form,
/// n odd goes through numerical quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Dimension {
    n: u32,
}

/// Largest even n supported by the exact symbolic path. Term counts grow
/// roughly 3x per descent step; higher dimensions add no verification value.
pub const MAX_EXACT_N: u32 = 16;

impl Dimension {
    pub fn new(n: i64) -> Result<Dimension> {
        if n < 1 {
            return Err(HyperheatError::InvalidDimension(n));
        }
        let n = n as u32;
        if n % 2 == 0 && n > MAX_EXACT_N {
            return Err(HyperheatError::InvalidDimension(n as i64));
        }
        Ok(Dimension { n })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn is_even(&self) -> bool {
        self.n % 2 == 0
    }

    /// Spectral gap n^2/4.
    pub fn spectral_gap(&self) -> f64 {
        (self.n as f64).powi(2) / 4.0
    }

    /// Number of interdimensional descent steps from the base space
    /// (H^1-like Gaussian for n even, H^2 for n odd).
    pub fn descent_steps(&self) -> u32 {
        self.n / 2
    }

    /// Volume of the unit n-sphere S^n: omega_n = 2 pi^{(n+1)/2} / Gamma((n+1)/2).
    pub fn sphere_volume(&self) -> f64 {
        let np1 = (self.n + 1) as f64;
        2.0 * std::f64::consts::PI.powf(np1 / 2.0) / gamma_of_half(self.n + 1)
    }
}

impl std::fmt::Display for Dimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "H^{}", self.n + 1)
    }
}

/// Gamma(k/2) for integer k >= 1: Gamma(m) = (m-1)! and
/// Gamma(m + 1/2) = (1/2)(3/2)...(m - 1/2) sqrt(pi).
fn gamma_of_half(k: u32) -> f64 {
    if k % 2 == 0 {
        let m = k / 2;
        (1..m).map(|j| j as f64).product::<f64>()
    } else {
        let m = (k - 1) / 2;
        let mut v = std::f64::consts::PI.sqrt();
        for j in 0..m {
            v *= j as f64 + 0.5;
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate() {
        assert!(Dimension::new(0).is_err());
        assert!(Dimension::new(-3).is_err());
        assert!(Dimension::new(18).is_err());
        assert!(Dimension::new(1).is_ok());
        assert!(Dimension::new(17).is_ok());
    }

    #[test]
    fn sphere_volumes() {
        // omega_1 = 2 pi (circle), omega_2 = 4 pi (sphere), omega_3 = 2 pi^2.
        let pi = std::f64::consts::PI;
        assert!((Dimension::new(1).unwrap().sphere_volume() - 2.0 * pi).abs() < 1e-12);
        assert!((Dimension::new(2).unwrap().sphere_volume() - 4.0 * pi).abs() < 1e-12);
        assert!((Dimension::new(3).unwrap().sphere_volume() - 2.0 * pi * pi).abs() < 1e-12);
        assert!((Dimension::new(4).unwrap().sphere_volume() - 8.0 * pi * pi / 3.0).abs() < 1e-12);
    }

    #[test]
    fn spectral_gap() {
        assert_eq!(Dimension::new(2).unwrap().spectral_gap(), 1.0);
        assert_eq!(Dimension::new(4).unwrap().spectral_gap(), 4.0);
    }
}

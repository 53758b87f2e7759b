use rand::Rng;

use crate::species::ELECTRON_MASS_KEV;

/// Outcome of one Compton scatter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComptonScatter {
    /// Scattered photon energy over incident energy.
    pub epsilon: f64,
    pub cos_theta: f64,
}

/// Sample the Klein-Nishina distribution for a free electron at rest.
///
/// Composition-rejection in ε = E'/E (Butcher and Messel): pick between the
/// 1/ε and ε branches by their integrals, accept with the remaining
/// bounded factor.
pub fn sample_klein_nishina<R: Rng + ?Sized>(energy_kev: f64, rng: &mut R) -> ComptonScatter {
    let k = energy_kev / ELECTRON_MASS_KEV;
    let eps0 = 1.0 / (1.0 + 2.0 * k);
    let eps0_sq = eps0 * eps0;
    let alpha1 = -eps0.ln();
    let alpha2 = 0.5 * (1.0 - eps0_sq);
    loop {
        let (eps, eps_sq) = if alpha1 / (alpha1 + alpha2) > rng.random::<f64>() {
            let e = (-alpha1 * rng.random::<f64>()).exp();
            (e, e * e)
        } else {
            let e2 = eps0_sq + (1.0 - eps0_sq) * rng.random::<f64>();
            (e2.sqrt(), e2)
        };
        let one_minus_cos = (1.0 - eps) / (eps * k);
        let sin_sq = one_minus_cos * (2.0 - one_minus_cos);
        let g = 1.0 - eps * sin_sq / (1.0 + eps_sq);
        if g >= rng.random::<f64>() {
            return ComptonScatter { epsilon: eps, cos_theta: (1.0 - one_minus_cos).clamp(-1.0, 1.0) };
        }
    }
}

/// Klein-Nishina dσ/dε up to a constant factor.
pub fn klein_nishina_density(energy_kev: f64, epsilon: f64) -> f64 {
    let k = energy_kev / ELECTRON_MASS_KEV;
    let one_minus_cos = (1.0 - epsilon) / (epsilon * k);
    let sin_sq = one_minus_cos * (2.0 - one_minus_cos);
    (1.0 / epsilon + epsilon) * (1.0 - epsilon * sin_sq / (1.0 + epsilon * epsilon))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn kinematics_are_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for &e in &[20.0, 661.7, 2614.5, 1.0e5] {
            let eps0 = 1.0 / (1.0 + 2.0 * e / ELECTRON_MASS_KEV);
            for _ in 0..1000 {
                let s = sample_klein_nishina(e, &mut rng);
                assert!(s.epsilon >= eps0 * (1.0 - 1e-12) && s.epsilon <= 1.0);
                // Compton formula: 1/E' - 1/E = (1 - cosθ)/mc²
                let lhs = 1.0 / (s.epsilon * e) - 1.0 / e;
                let rhs = (1.0 - s.cos_theta) / ELECTRON_MASS_KEV;
                assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(rhs.abs()).max(1e-12));
            }
        }
    }

    #[test]
    fn low_energy_limit_is_thomson_like() {
        // at 1 keV almost no energy is transferred
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = sample_klein_nishina(1.0, &mut rng);
        assert!(s.epsilon > 0.99);
    }
}

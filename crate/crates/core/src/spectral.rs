//! Fourier mode energies of the deformation fields.
//!
//! At a fixed time each deformation component is a trigonometric polynomial
//! in `s`, `γ(s) = Σ_k a_k sin 2πks + b_k cos 2πks`. Energies use the
//! mean-square convention, `E_0 = b_0²` and `E_k = (a_k² + b_k²)/2` for
//! `k ≥ 1`, so that `Σ_k E_k` equals the angular mean of `γ²`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::ring_model::{CoefficientTensor, RingConfig};

pub const DEFAULT_DOMINANCE_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    /// γ₁
    Radial,
    /// γ₂
    Vertical,
    #[default]
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSpectrum {
    /// `E_k` for `k = 0..=K`.
    pub energies: Vec<f64>,
    pub threshold: f64,
    /// Modes with `E_k ≥ threshold · max E`, ascending.
    pub dominant: Vec<usize>,
}

impl ModeSpectrum {
    pub fn new(energies: Vec<f64>, threshold: f64) -> Self {
        let max = energies.iter().copied().fold(0.0, f64::max);
        let dominant = if max > 0.0 {
            energies
                .iter()
                .enumerate()
                .filter(|(_, &e)| e >= threshold * max)
                .map(|(k, _)| k)
                .collect()
        } else {
            Vec::new()
        };
        Self {
            energies,
            threshold,
            dominant,
        }
    }

    pub fn total_energy(&self) -> f64 {
        self.energies.iter().sum()
    }

    /// CSV with header `k,E_k,dominant`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,E_k,dominant\n");
        for (k, e) in self.energies.iter().enumerate() {
            let flag = u8::from(self.dominant.contains(&k));
            writeln!(out, "{k},{e:e},{flag}").unwrap();
        }
        out
    }
}

/// Sine and cosine amplitudes `(a_k, b_k)` of one component at time `t`,
/// including the `(K+1)⁻¹` normalization.
pub fn mode_amplitudes(c: &CoefficientTensor, t: f64, cfg: &RingConfig, l: usize) -> Vec<(f64, f64)> {
    let tau = t - cfg.t0;
    let norm = 1.0 / (c.fourier_modes() + 1) as f64;
    (0..=c.fourier_modes())
        .map(|k| {
            let (mut a, mut b) = (0.0, 0.0);
            let mut p = tau;
            for j in 0..=c.poly_terms() {
                a += c.get(l, 0, j, k) * p;
                b += c.get(l, 1, j, k) * p;
                p *= tau;
            }
            (a * norm, b * norm)
        })
        .collect()
}

pub fn mode_energies(c: &CoefficientTensor, t: f64, cfg: &RingConfig, component: Component) -> ModeSpectrum {
    mode_energies_with_threshold(c, t, cfg, component, DEFAULT_DOMINANCE_THRESHOLD)
}

pub fn mode_energies_with_threshold(
    c: &CoefficientTensor,
    t: f64,
    cfg: &RingConfig,
    component: Component,
    threshold: f64,
) -> ModeSpectrum {
    let components: &[usize] = match component {
        Component::Radial => &[0],
        Component::Vertical => &[1],
        Component::Both => &[0, 1],
    };
    let mut energies = vec![0.0; c.fourier_modes() + 1];
    for &l in components {
        for (k, (a, b)) in mode_amplitudes(c, t, cfg, l).into_iter().enumerate() {
            // sin(0) ≡ 0, so the k = 0 sine amplitude carries no signal
            energies[k] += if k == 0 { b * b } else { 0.5 * (a * a + b * b) };
        }
    }
    ModeSpectrum::new(energies, threshold)
}

pub fn dominant_mode_count(spectrum: &ModeSpectrum) -> usize {
    spectrum.dominant.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring_model::deformation_eval;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_tensor(cfg: &RingConfig, rng: &mut impl Rng) -> CoefficientTensor {
        let n = CoefficientTensor::len_for(cfg.poly_terms, cfg.fourier_modes);
        CoefficientTensor::from_flat(
            cfg.poly_terms,
            cfg.fourier_modes,
            (0..n).map(|_| rng.random_range(-30.0..30.0)).collect(),
        )
        .unwrap()
    }

    /// Angular mean of γ² by direct quadrature on `n` points.
    fn quadrature_energy(c: &CoefficientTensor, t: f64, cfg: &RingConfig, n: usize) -> f64 {
        (0..n)
            .map(|i| {
                let d = deformation_eval(t, i as f64 / n as f64, c, cfg);
                d.radial.value.powi(2) + d.vertical.value.powi(2)
            })
            .sum::<f64>()
            / n as f64
    }

    #[test]
    fn single_mode() {
        let cfg = RingConfig::default();
        let mut c = CoefficientTensor::zeros_for(&cfg);
        c.set(0, 1, 0, 1, 11.0);
        let spec = mode_energies(&c, cfg.t1, &cfg, Component::Both);
        assert!(spec.energies[1] > 0.0);
        for (k, e) in spec.energies.iter().enumerate() {
            if k != 1 {
                assert_eq!(*e, 0.0);
            }
        }
        assert_eq!(dominant_mode_count(&spec), 1);
        assert_eq!(spec.dominant, vec![1]);
    }

    #[test]
    fn zero_spectrum() {
        let cfg = RingConfig::default();
        let spec = mode_energies(&CoefficientTensor::zeros_for(&cfg), cfg.t1, &cfg, Component::Both);
        assert!(spec.energies.iter().all(|&e| e == 0.0));
        assert_eq!(dominant_mode_count(&spec), 0);
    }

    #[test]
    fn flat_spectrum_is_all_dominant() {
        let spec = ModeSpectrum::new(vec![2.0; 11], 0.1);
        assert_eq!(dominant_mode_count(&spec), 11);
    }

    #[test]
    fn parseval_against_quadrature() {
        let cfg = RingConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let c = random_tensor(&cfg, &mut rng);
            let t = rng.random_range(cfg.t0..cfg.t1);
            let spec = mode_energies(&c, t, &cfg, Component::Both);
            let direct = quadrature_energy(&c, t, &cfg, 4096);
            assert_abs_diff_eq!(spec.total_energy(), direct, epsilon = 1e-8);
        }
    }

    #[test]
    fn csv_layout() {
        let csv = ModeSpectrum::new(vec![1.0, 0.05, 0.5], 0.1).to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "k,E_k,dominant");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].ends_with(",1"));
        assert!(lines[2].ends_with(",0"));
    }

    proptest! {
        #[test]
        fn energy_is_invariant_under_rotation(
            data in proptest::collection::vec(-30.0..30.0f64, CoefficientTensor::len_for(2, 5)),
            shift in 0.0..1.0f64,
        ) {
            // γ(s + φ): per mode, (a, b) rotates by the angle 2πkφ
            let cfg = RingConfig { poly_terms: 2, fourier_modes: 5, ..RingConfig::default() };
            let c = CoefficientTensor::from_flat(2, 5, data).unwrap();
            let mut rotated = c.clone();
            for l in 0..2 {
                for j in 0..=2 {
                    for k in 0..=5 {
                        let (sin, cos) = (std::f64::consts::TAU * k as f64 * shift).sin_cos();
                        let (a, b) = (c.get(l, 0, j, k), c.get(l, 1, j, k));
                        // sin(x+φ) = sin x cos φ + cos x sin φ; cos(x+φ) = cos x cos φ − sin x sin φ
                        rotated.set(l, 0, j, k, a * cos - b * sin);
                        rotated.set(l, 1, j, k, a * sin + b * cos);
                    }
                }
            }
            let e1 = mode_energies(&c, cfg.t1, &cfg, Component::Both);
            let e2 = mode_energies(&rotated, cfg.t1, &cfg, Component::Both);
            for k in 0..=5 {
                prop_assert!((e1.energies[k] - e2.energies[k]).abs() <= 1e-12 * e1.energies[k].max(1.0));
            }
            // the translated signal really is γ(s + φ)
            let s = 0.3;
            let g = deformation_eval(cfg.t1, s + shift, &c, &cfg).radial.value;
            let h = deformation_eval(cfg.t1, s, &rotated, &cfg).radial.value;
            prop_assert!((g - h).abs() < 1e-9);
        }
    }
}

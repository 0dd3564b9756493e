//! QPSK over complex AWGN and the resulting symbol LLRs.
//!
//! Symbol `α ∈ Z_4` maps to `exp(i(π/4 + απ/2))`, in natural order around
//! the circle. `λ^{(α)} = log p(y|0) - log p(y|α)`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("QPSK needs q = 4, got {0}")]
    Alphabet(usize),
    #[error("symbol {symbol} is not below {q}")]
    Symbol { symbol: usize, q: usize },
    #[error("noise sigma must be positive and finite, got {0}")]
    Sigma(f64),
    #[error("rate must lie in (0, 1], got {0}")]
    Rate(f64),
    #[error("bits per channel symbol must be positive, got {0}")]
    Bits(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfig {
    /// Noise standard deviation per real dimension.
    pub noise_sigma: f64,
    pub constellation: Vec<Complex64>,
    pub rng_seed: u64,
}

pub fn qpsk_point(alpha: usize) -> Complex64 {
    let phase = std::f64::consts::FRAC_PI_4 + alpha as f64 * std::f64::consts::FRAC_PI_2;
    Complex64::from_polar(1.0, phase)
}

impl ChannelConfig {
    pub fn qpsk(noise_sigma: f64, rng_seed: u64) -> Result<Self, ChannelError> {
        if !(noise_sigma > 0.0 && noise_sigma.is_finite()) {
            return Err(ChannelError::Sigma(noise_sigma));
        }
        Ok(ChannelConfig {
            noise_sigma,
            constellation: (0..4).map(qpsk_point).collect(),
            rng_seed,
        })
    }
}

/// Map a word over `Z_q` (q must be 4) to unit-energy QPSK points.
pub fn modulate(word: &[usize], q: usize) -> Result<Vec<Complex64>, ChannelError> {
    if q != 4 {
        return Err(ChannelError::Alphabet(q));
    }
    word.iter()
        .map(|&a| {
            if a < q {
                Ok(qpsk_point(a))
            } else {
                Err(ChannelError::Symbol { symbol: a, q })
            }
        })
        .collect()
}

/// Add independent `N(0, σ²)` noise to both real dimensions of every sample.
pub fn add_noise<R: Rng + ?Sized>(
    samples: &[Complex64],
    config: &ChannelConfig,
    rng: &mut R,
) -> Result<Vec<Complex64>, ChannelError> {
    let normal = Normal::new(0.0, config.noise_sigma).map_err(|_| ChannelError::Sigma(config.noise_sigma))?;
    Ok(samples
        .iter()
        .map(|s| s + Complex64::new(normal.sample(rng), normal.sample(rng)))
        .collect())
}

/// `λ^{(α)} = (|y - s_α|² - |y - s_0|²) / (2σ²)` for `α = 1, ..., q-1`.
pub fn llr(y: Complex64, config: &ChannelConfig) -> Vec<f64> {
    let s0 = config.constellation[0];
    let d0 = (y - s0).norm_sqr();
    let scale = 2.0 * config.noise_sigma * config.noise_sigma;
    config.constellation[1..]
        .iter()
        .map(|&s| ((y - s).norm_sqr() - d0) / scale)
        .collect()
}

/// LLRs of a whole received word, `q - 1` entries per sample.
pub fn llrs(received: &[Complex64], config: &ChannelConfig) -> Vec<f64> {
    received.iter().flat_map(|&y| llr(y, config)).collect()
}

/// Per-dimension noise sigma for unit-energy symbols at the given Eb/N0.
pub fn ebn0_to_sigma(ebn0_db: f64, rate: f64, bits_per_symbol: f64) -> Result<f64, ChannelError> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(ChannelError::Rate(rate));
    }
    if !(bits_per_symbol > 0.0 && bits_per_symbol.is_finite()) {
        return Err(ChannelError::Bits(bits_per_symbol));
    }
    let ebn0 = 10f64.powf(ebn0_db / 10.0);
    Ok((1.0 / (2.0 * rate * bits_per_symbol * ebn0)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn constellation() {
        let s = modulate(&[0, 1, 2, 3], 4).unwrap();
        assert!((s[0] - Complex64::new(H, H)).norm() < 1e-15);
        assert!((s[2] - Complex64::new(-H, -H)).norm() < 1e-15);
        assert!(s.iter().all(|p| (p.norm() - 1.0).abs() < 1e-15));
        assert_eq!(modulate(&[0], 8), Err(ChannelError::Alphabet(8)));
        assert!(matches!(modulate(&[4], 4), Err(ChannelError::Symbol { .. })));
    }

    #[test]
    fn noise_limits_and_determinism() {
        let s = modulate(&[0, 1, 2, 3, 1], 4).unwrap();
        let tiny = ChannelConfig::qpsk(1e-12, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let y = add_noise(&s, &tiny, &mut rng).unwrap();
        assert!(y.iter().zip(&s).all(|(a, b)| (a - b).norm() < 1e-10));
        let c = ChannelConfig::qpsk(0.8, 0).unwrap();
        let a = add_noise(&s, &c, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let b = add_noise(&s, &c, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(a, b);
        assert!(ChannelConfig::qpsk(0.0, 0).is_err());
    }

    #[test]
    fn empirical_variance() {
        let sigma = 0.6;
        let c = ChannelConfig::qpsk(sigma, 0).unwrap();
        let zeros = vec![Complex64::new(0.0, 0.0); 500_000];
        let y = add_noise(&zeros, &c, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let n = 2.0 * y.len() as f64;
        let var = y.iter().map(|z| z.re * z.re + z.im * z.im).sum::<f64>() / n;
        assert!((var - sigma * sigma).abs() < 0.01 * sigma * sigma, "{var}");
    }

    #[test]
    fn llr_examples() {
        let sigma = 0.5;
        let c = ChannelConfig::qpsk(sigma, 0).unwrap();
        let s2 = 1.0 / (sigma * sigma);
        let l = llr(qpsk_point(0), &c);
        for (got, want) in l.iter().zip([s2, 2.0 * s2, s2]) {
            assert!((got - want).abs() < 1e-12);
        }
        let l = llr(qpsk_point(2), &c);
        assert!((l[1] + 2.0 * s2).abs() < 1e-12);
        // the origin is equidistant from every point
        assert!(llr(Complex64::new(0.0, 0.0), &c).iter().all(|x| x.abs() < 1e-12));
        let mid = (qpsk_point(0) + qpsk_point(1)) / 2.0;
        assert!(llr(mid, &c)[0].abs() < 1e-12);
    }

    #[test]
    fn llr_matches_density_ratio() {
        let c = ChannelConfig::qpsk(0.7, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let density = |y: Complex64, s: Complex64| {
            let v = c.noise_sigma * c.noise_sigma;
            (-(y - s).norm_sqr() / (2.0 * v)).exp() / (2.0 * std::f64::consts::PI * v)
        };
        for _ in 0..1000 {
            let y = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let l = llr(y, &c);
            for a in 1..4 {
                let direct = (density(y, qpsk_point(0)) / density(y, qpsk_point(a))).ln();
                assert!((l[a - 1] - direct).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn decisions_are_nearest_point() {
        let c = ChannelConfig::qpsk(0.4, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let y = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let l = llr(y, &c);
            let mut best = (0, 0.0);
            for (k, &x) in l.iter().enumerate() {
                if x < best.1 {
                    best = (k + 1, x);
                }
            }
            let nearest = (0..4)
                .min_by(|&a, &b| (y - qpsk_point(a)).norm().total_cmp(&(y - qpsk_point(b)).norm()))
                .unwrap();
            assert_eq!(best.0, nearest);
        }
    }

    #[test]
    fn sigma_from_ebn0() {
        assert!((ebn0_to_sigma(0.0, 0.5, 2.0).unwrap() - H).abs() < 1e-15);
        let mut prev = f64::INFINITY;
        for k in -10..40 {
            let s = ebn0_to_sigma(k as f64, 0.5, 2.0).unwrap();
            assert!(s < prev);
            prev = s;
        }
        assert!(ebn0_to_sigma(300.0, 0.5, 2.0).unwrap() < 1e-14);
        assert!(ebn0_to_sigma(1.0, 0.0, 2.0).is_err());
        assert!(ebn0_to_sigma(1.0, 0.5, 0.0).is_err());
    }
}

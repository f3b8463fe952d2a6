//! Small numeric helpers: smoothsteps, deterministic RNG, slope fits.

/// Quintic smoothstep: 0 at x<=0, 1 at x>=1, C^2 monotone in between.
pub fn smoothstep5(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        x * x * x * (10.0 + x * (-15.0 + 6.0 * x))
    }
}

/// Derivative of `smoothstep5`. Max value 15/8 at x=1/2.
pub fn smoothstep5_deriv(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        30.0 * x * x * (1.0 - x) * (1.0 - x)
    }
}

/// Clamp to [0, 1].
pub fn clamp01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// `count` evenly spaced samples covering [a, b] inclusive.
pub fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2, "linspace needs at least two samples");
    let step = (b - a) / (count - 1) as f64;
    (0..count).map(|i| a + step * i as f64).collect()
}

/// SplitMix64: tiny deterministic RNG for probe directions and noise.
///
/// Chosen over an external RNG so report bytes stay identical across
/// dependency upgrades.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in [lo, hi).
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

/// Least-squares slope of log(res) vs log(h).
///
/// Pairs with zero or non-finite residuals are dropped; returns `None`
/// when fewer than two usable points remain (exact-zero sequences report
/// their order as not applicable).
pub fn loglog_slope(hs: &[f64], residuals: &[f64]) -> Option<f64> {
    assert_eq!(hs.len(), residuals.len());
    let pts: Vec<(f64, f64)> = hs
        .iter()
        .zip(residuals)
        .filter(|(h, r)| **h > 0.0 && **r > 0.0 && r.is_finite())
        .map(|(h, r)| (h.ln(), r.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return None;
    }
    Some((n * sxy - sx * sy) / denom)
}

/// Deterministic float formatting for reports (17 significant digits
/// round-trips f64 exactly).
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{:e}", x)
    }
}

use serde::{Deserialize, Serialize};

/// `6t⁵ - 15t⁴ + 10t³` clamped to `[0, 1]`; C² at both ends.
fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (t * (6.0 * t - 15.0) + 10.0)
}

/// Cutoff profiles for the high- and low-frequency parts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffProfile {
    /// 1 on `|x| < 1`, 0 on `|x| ≥ 2`.
    #[default]
    Bump,
    /// 1 on `|x| < 2`, 0 on `|x| ≥ 3`.
    WideBump,
    /// `exp(-x²)`.
    Gaussian,
    Zero,
}

impl CutoffProfile {
    pub fn eval(self, x: f64) -> f64 {
        let ax = x.abs();
        match self {
            CutoffProfile::Bump => 1.0 - smoothstep(ax - 1.0),
            CutoffProfile::WideBump => 1.0 - smoothstep(ax - 2.0),
            CutoffProfile::Gaussian => (-x * x).exp(),
            CutoffProfile::Zero => 0.0,
        }
    }

    /// Half-width outside which the profile vanishes (or drops below 1e-16).
    pub fn reach(self) -> f64 {
        match self {
            CutoffProfile::Bump => 2.0,
            CutoffProfile::WideBump => 3.0,
            CutoffProfile::Gaussian => 6.1,
            CutoffProfile::Zero => 0.0,
        }
    }

    /// `‖profile‖_{L²}` by composite Simpson quadrature over its support.
    pub fn l2_norm(self) -> f64 {
        if self == CutoffProfile::Gaussian {
            return (std::f64::consts::PI / 2.0).powf(0.25);
        }
        let r = self.reach();
        if r == 0.0 {
            return 0.0;
        }
        let n = 20_000;
        let h = 2.0 * r / n as f64;
        let sq = |i: usize| self.eval(-r + h * i as f64).powi(2);
        let mut s = sq(0) + sq(n);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * sq(i);
        }
        (s * h / 3.0).sqrt()
    }
}

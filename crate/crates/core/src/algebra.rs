//! Exact min-plus algebra on the closed family of curves used by the
//! analysis: token buckets, rate-latency curves and delay elements.
//!
//! Every operation maps family members to family members or returns a typed
//! instability error ([`Error::Unbounded`] / [`Error::Unstable`]).

use alloc::vec;

use crate::error::{check_nonneg, check_positive, Error, Result};
use crate::pwl::{PwlCurve, Segment};

/// Affine arrival curve `γ_{r,b}`: 0 at `t = 0`, `r t + b` for `t > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TokenBucket {
    pub rate: f64,
    pub burst: f64,
}

impl TokenBucket {
    pub const ZERO: TokenBucket = TokenBucket {
        rate: 0.0,
        burst: 0.0,
    };

    pub fn new(rate: f64, burst: f64) -> Result<Self> {
        Ok(Self {
            rate: check_nonneg("rate", rate)?,
            burst: check_nonneg("burst", burst)?,
        })
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            self.rate * t + self.burst
        }
    }

    pub fn to_pwl(&self) -> PwlCurve {
        PwlCurve::new(vec![Segment::new(0.0, 0.0, self.burst, self.rate)])
            .expect("token bucket is a valid curve")
    }
}

/// Rate-latency service curve `β_{R,T}(t) = R [t - T]+`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateLatency {
    pub rate: f64,
    pub latency: f64,
}

impl RateLatency {
    pub fn new(rate: f64, latency: f64) -> Result<Self> {
        Ok(Self {
            rate: check_positive("rate", rate)?,
            latency: check_nonneg("latency", latency)?,
        })
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        self.rate * (t - self.latency).max(0.0)
    }

    pub fn to_pwl(&self) -> PwlCurve {
        let segments = if self.latency > 0.0 {
            vec![
                Segment::continuous(0.0, 0.0, 0.0),
                Segment::continuous(self.latency, 0.0, self.rate),
            ]
        } else {
            vec![Segment::continuous(0.0, 0.0, self.rate)]
        };
        PwlCurve::new(segments).expect("rate-latency is a valid curve")
    }
}

/// Delay element `δ_W`: 0 on `[0, W]`, `+inf` afterwards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayElement {
    pub wait: f64,
}

impl DelayElement {
    pub fn new(wait: f64) -> Result<Self> {
        Ok(Self {
            wait: check_nonneg("wait", wait)?,
        })
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        if t <= self.wait {
            0.0
        } else {
            f64::INFINITY
        }
    }

    pub fn to_pwl(&self) -> PwlCurve {
        let inf = f64::INFINITY;
        let segments = if self.wait > 0.0 {
            vec![
                Segment::continuous(0.0, 0.0, 0.0),
                Segment::new(self.wait, 0.0, inf, inf),
            ]
        } else {
            vec![Segment::new(0.0, 0.0, inf, inf)]
        };
        PwlCurve::new(segments).expect("delay element is a valid curve")
    }
}

/// Stochastic scaling curve `S^ε(b) = p b + 1 - ε` of a Bernoulli(p) loss
/// process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingCurve {
    pub loss: f64,
    pub epsilon: f64,
}

impl ScalingCurve {
    pub fn new(loss: f64, epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&loss) {
            return Err(Error::InvalidParameter {
                name: "loss",
                value: loss,
                reason: "must lie in [0, 1]",
            });
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                value: epsilon,
                reason: "must lie in (0, 1)",
            });
        }
        Ok(Self { loss, epsilon })
    }

    pub fn evaluate(&self, bits: f64) -> f64 {
        self.loss * bits + 1.0 - self.epsilon
    }
}

/// `β_a ⊗ β_b = β_{min(R_a, R_b), T_a + T_b}`.
pub fn convolve(a: RateLatency, b: RateLatency) -> RateLatency {
    RateLatency {
        rate: a.rate.min(b.rate),
        latency: a.latency + b.latency,
    }
}

/// `γ_{r,b} ⊘ β_{R,T} = γ_{r, b + r T}` when `r <= R`.
pub fn deconvolve_tb_rl(a: TokenBucket, s: RateLatency) -> Result<TokenBucket> {
    if a.rate > s.rate {
        return Err(Error::Unbounded {
            arrival_rate: a.rate,
            service_rate: s.rate,
        });
    }
    Ok(TokenBucket {
        rate: a.rate,
        burst: a.burst + a.rate * s.latency,
    })
}

/// `γ_{r,b} ⊘ δ_W = γ_{r, b + r W}`.
pub fn deconvolve_delay(a: TokenBucket, d: DelayElement) -> TokenBucket {
    TokenBucket {
        rate: a.rate,
        burst: a.burst + a.rate * d.wait,
    }
}

/// Largest rate-latency curve below `[β_{R,T} - γ_{r,b}]+`:
/// `β_{R - r, (R T + b) / (R - r)}`. Requires `r < R`.
pub fn residual(s: RateLatency, a: TokenBucket) -> Result<RateLatency> {
    if a.rate >= s.rate {
        return Err(Error::Unstable {
            load: a.rate,
            rate: s.rate,
        });
    }
    let rate = s.rate - a.rate;
    Ok(RateLatency {
        rate,
        latency: s.latency + (a.rate * s.latency + a.burst) / rate,
    })
}

/// `S^ε ∘ γ_{r,b}` for `t > 0`: `γ_{p r, p b + 1 - ε}`.
pub fn apply_scaling(sc: ScalingCurve, a: TokenBucket) -> TokenBucket {
    TokenBucket {
        rate: sc.loss * a.rate,
        burst: sc.loss * a.burst + 1.0 - sc.epsilon,
    }
}

/// Horizontal deviation `h(γ_{r,b}, β_{R,T}) = T + b / R` for `r <= R`,
/// `+inf` otherwise.
pub fn hdev(a: TokenBucket, s: RateLatency) -> f64 {
    if a.rate > s.rate {
        f64::INFINITY
    } else {
        s.latency + a.burst / s.rate
    }
}

/// Componentwise sum. The empty sum is `γ_{0,0}`.
pub fn sum_tb(items: &[TokenBucket]) -> TokenBucket {
    items.iter().fold(TokenBucket::ZERO, |acc, x| TokenBucket {
        rate: acc.rate + x.rate,
        burst: acc.burst + x.burst,
    })
}

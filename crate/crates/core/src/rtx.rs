//! Retransmissions over a Bernoulli loss channel.
//!
//! Level `i = 0` is the original flow; level `i >= 1` carries the packets
//! being retransmitted for the `i`-th time. Higher levels are served first,
//! so level `i` sees the service left over by levels `i+1..=N`:
//!
//! ```text
//! β(i) = [β - Σ_{k=i+1..N} α(k)]+
//! α(i) = S^ε(α(i-1) ⊘ β(i-1)) ⊘ δ_W
//! ```
//!
//! The system is circular, so the bursts are found by fixed-point iteration
//! starting from zero. Rates are fixed (`α(i).r = p^i r`) and the burst map
//! is affine and monotone, so the iteration increases towards the fixed point.

use alloc::vec::Vec;

use crate::algebra::{
    apply_scaling, deconvolve_delay, deconvolve_tb_rl, hdev, residual, sum_tb, DelayElement,
    RateLatency, ScalingCurve, TokenBucket,
};
use crate::error::{check_nonneg, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    /// Per-bit loss probability `p`.
    pub loss: f64,
    /// Violation probability `ε` of the scaling curve.
    pub epsilon: f64,
    /// Maximum number of retransmissions `N`.
    pub max_retx: usize,
    /// Time `W` until a loss is detected.
    pub detect_wait: f64,
}

impl ChannelConfig {
    pub fn new(loss: f64, epsilon: f64, max_retx: usize, detect_wait: f64) -> Result<Self> {
        ScalingCurve::new(loss, epsilon)?;
        check_nonneg("detect_wait", detect_wait)?;
        Ok(Self {
            loss,
            epsilon,
            max_retx,
            detect_wait,
        })
    }

    pub fn with_loss(self, loss: f64) -> Result<Self> {
        Self::new(loss, self.epsilon, self.max_retx, self.detect_wait)
    }

    pub fn scaling(&self) -> ScalingCurve {
        ScalingCurve {
            loss: self.loss,
            epsilon: self.epsilon,
        }
    }

    /// Probability that the delay bound holds: `(1 - ε)^N`.
    pub fn reliability(&self) -> f64 {
        libm::pow(1.0 - self.epsilon, self.max_retx as f64)
    }

    /// Long-run rates of levels `0..=N`: `r, p r, p^2 r, ...`.
    pub fn level_rates(&self, base: f64) -> Vec<f64> {
        let mut rates = Vec::with_capacity(self.max_retx + 1);
        let mut r = base;
        for _ in 0..=self.max_retx {
            rates.push(r);
            r *= self.loss;
        }
        rates
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RtxSolution {
    /// `α(0..=N)`.
    pub arrivals: Vec<TokenBucket>,
    /// `β(0..=N)`; `β(N)` is the queue's own service curve.
    pub services: Vec<RateLatency>,
    /// `α(Tot) = Σ α(i)`.
    pub aggregate: TokenBucket,
    pub stable: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stability {
    pub stable: bool,
    /// `Σ_{i=0..N} p^i r`.
    pub load: f64,
    /// `R - load`.
    pub margin: f64,
}

/// Necessary condition for a finite bound: `Σ_{i=0..N} p^i r < R`.
pub fn stability_check(beta: RateLatency, a0: TokenBucket, ch: &ChannelConfig) -> Stability {
    let load: f64 = ch.level_rates(a0.rate).iter().sum();
    Stability {
        stable: load < beta.rate,
        load,
        margin: beta.rate - load,
    }
}

/// One Gauss-Seidel pass over levels `1..=N`; returns the largest burst
/// change.
fn sweep_levels(
    arrivals: &mut [TokenBucket],
    beta: RateLatency,
    scaling: ScalingCurve,
    wait: DelayElement,
) -> Result<f64> {
    let n = arrivals.len() - 1;
    let mut max_change: f64 = 0.0;
    for i in 1..=n {
        let prev_service = residual(beta, sum_tb(&arrivals[i..]))?;
        let passed = deconvolve_tb_rl(arrivals[i - 1], prev_service)?;
        let next = deconvolve_delay(apply_scaling(scaling, passed), wait);
        max_change = max_change.max((next.burst - arrivals[i].burst).abs());
        arrivals[i] = next;
    }
    Ok(max_change)
}

fn level_services(arrivals: &[TokenBucket], beta: RateLatency) -> Result<Vec<RateLatency>> {
    let n = arrivals.len() - 1;
    let mut services = Vec::with_capacity(n + 1);
    for i in 0..n {
        services.push(residual(beta, sum_tb(&arrivals[i + 1..]))?);
    }
    services.push(beta);
    Ok(services)
}

pub fn solve_rtx(
    beta: RateLatency,
    a0: TokenBucket,
    ch: &ChannelConfig,
    opts: SolverOptions,
) -> Result<RtxSolution> {
    if !(opts.tol > 0.0) || opts.max_iter == 0 {
        return Err(Error::InvalidParameter {
            name: "solver options",
            value: opts.tol,
            reason: "tol must be > 0 and max_iter >= 1",
        });
    }
    let check = stability_check(beta, a0, ch);
    if !check.stable {
        return Err(Error::Unstable {
            load: check.load,
            rate: beta.rate,
        });
    }

    let scaling = ch.scaling();
    let wait = DelayElement {
        wait: ch.detect_wait,
    };
    let mut arrivals: Vec<TokenBucket> = ch
        .level_rates(a0.rate)
        .into_iter()
        .map(|rate| TokenBucket { rate, burst: 0.0 })
        .collect();
    arrivals[0] = a0;

    let mut last_change = f64::INFINITY;
    for iteration in 1..=opts.max_iter {
        last_change = sweep_levels(&mut arrivals, beta, scaling, wait)?;
        if last_change < opts.tol {
            let services = level_services(&arrivals, beta)?;
            let aggregate = sum_tb(&arrivals);
            return Ok(RtxSolution {
                arrivals,
                services,
                aggregate,
                stable: true,
                iterations: iteration,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iter,
        last_change,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DelayBoundResult {
    /// `h(α(Tot), β)`, `+inf` when unstable.
    pub bound: f64,
    /// `(1 - ε)^N`.
    pub reliability: f64,
    pub stable: bool,
    pub solution: Option<RtxSolution>,
}

impl DelayBoundResult {
    pub fn unstable(ch: &ChannelConfig) -> Self {
        Self {
            bound: f64::INFINITY,
            reliability: ch.reliability(),
            stable: false,
            solution: None,
        }
    }
}

pub fn delay_bound(sol: RtxSolution, beta: RateLatency, ch: &ChannelConfig) -> DelayBoundResult {
    let bound = if sol.stable {
        hdev(sol.aggregate, beta)
    } else {
        f64::INFINITY
    };
    DelayBoundResult {
        bound,
        reliability: ch.reliability(),
        stable: sol.stable && bound.is_finite(),
        solution: Some(sol),
    }
}

/// Solve and bound in one step; instability becomes an unstable result
/// rather than an error.
pub fn analyze(
    beta: RateLatency,
    a0: TokenBucket,
    ch: &ChannelConfig,
    opts: SolverOptions,
) -> Result<DelayBoundResult> {
    match solve_rtx(beta, a0, ch, opts) {
        Ok(sol) => Ok(delay_bound(sol, beta, ch)),
        Err(e) if e.is_instability() => Ok(DelayBoundResult::unstable(ch)),
        Err(e) => Err(e),
    }
}

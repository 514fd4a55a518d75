//! 802.1Qbv gate service curves.
//!
//! A gate is open for `open` time units, closed for `closed`, and first opens
//! at `offset`; the full cycle is `open + closed`. While open the queue is
//! served at the link rate.

use alloc::vec::Vec;

use crate::algebra::{RateLatency, TokenBucket};
use crate::error::{check_nonneg, check_positive, Error, Result};
use crate::pwl::{PwlCurve, Segment};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateConfig {
    pub open: f64,
    pub closed: f64,
    pub offset: f64,
    pub link_rate: f64,
}

impl GateConfig {
    pub fn new(open: f64, closed: f64, offset: f64, link_rate: f64) -> Result<Self> {
        Ok(Self {
            open: check_positive("open", open)?,
            closed: check_nonneg("closed", closed)?,
            offset: check_nonneg("offset", offset)?,
            link_rate: check_positive("link_rate", link_rate)?,
        })
    }

    pub fn cycle(&self) -> f64 {
        self.open + self.closed
    }

    /// Long-run service rate `C L / (T + L)`.
    pub fn envelope_rate(&self) -> f64 {
        self.link_rate * self.open / self.cycle()
    }
}

/// TDMA service curve with `period` as the full cycle and the open window at
/// the end of each cycle:
/// `C max{ floor(t/P) L, t - ceil(t/P) (P - L) }`.
pub fn tdma_service(link_rate: f64, open: f64, period: f64, t: f64) -> f64 {
    let cycles = t / period;
    let whole = libm::floor(cycles) * open;
    let partial = t - libm::ceil(cycles) * (period - open);
    link_rate * whole.max(partial)
}

/// Closed-form staircase of a gate: the TDMA curve evaluated at
/// `[t - δ + (P - L)]+`, so the first window is `[δ, δ + L)`.
pub fn staircase_value(g: &GateConfig, t: f64) -> f64 {
    let period = g.cycle();
    let shifted = (t - g.offset + g.closed).max(0.0);
    tdma_service(g.link_rate, g.open, period, shifted)
}

/// Staircase as a [`PwlCurve`]: exact for the first `cycles` cycles, then
/// continued with the envelope rate (it meets the envelope at every cycle
/// boundary, so the continuation stays a lower bound).
pub fn tdma_staircase(g: &GateConfig, cycles: usize) -> PwlCurve {
    let period = g.cycle();
    let per_window = g.link_rate * g.open;
    let mut segments = Vec::with_capacity(2 * cycles + 2);
    if g.offset > 0.0 {
        segments.push(Segment::continuous(0.0, 0.0, 0.0));
    }
    for k in 0..cycles {
        let start = g.offset + k as f64 * period;
        let level = k as f64 * per_window;
        segments.push(Segment::continuous(start, level, g.link_rate));
        if g.closed > 0.0 {
            segments.push(Segment::continuous(start + g.open, level + per_window, 0.0));
        }
    }
    let end = g.offset + cycles as f64 * period;
    let level = cycles as f64 * per_window;
    if cycles == 0 && g.offset == 0.0 {
        segments.push(Segment::continuous(0.0, 0.0, g.envelope_rate()));
    } else {
        segments.push(Segment::continuous(end, level, g.envelope_rate()));
    }
    PwlCurve::new(segments).expect("staircase is a valid curve")
}

/// Affine lower envelope `β_{C L / (T + L), δ}`.
pub fn affine_envelope(g: &GateConfig) -> RateLatency {
    RateLatency {
        rate: g.envelope_rate(),
        latency: g.offset,
    }
}

/// High-priority service when a lower-priority queue with maximum packet
/// `l_max` shares the open window: `β_{R, δ + l_max / R}`.
pub fn hp_service(g: &GateConfig, l_max: f64) -> Result<RateLatency> {
    check_nonneg("l_max", l_max)?;
    let rate = g.envelope_rate();
    Ok(RateLatency {
        rate,
        latency: g.offset + l_max / rate,
    })
}

/// Low-priority service behind a high-priority flow bounded by
/// `γ_{C_q, b_q}`: `β_{R - C_q, (R δ + b_q) / (R - C_q)}`.
pub fn lp_service(g: &GateConfig, hp_arrival: TokenBucket) -> Result<RateLatency> {
    let rate = g.envelope_rate();
    if hp_arrival.rate >= rate {
        return Err(Error::Unstable {
            load: hp_arrival.rate,
            rate,
        });
    }
    let residual = rate - hp_arrival.rate;
    Ok(RateLatency {
        rate: residual,
        latency: (rate * g.offset + hp_arrival.burst) / residual,
    })
}

/// Role of a queue relative to a concurrently opened gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QueueRole {
    /// No concurrent gate.
    Solo,
    /// Served first; `lp_max_packet` is the largest packet of the
    /// concurrent low-priority queue.
    High { lp_max_packet: f64 },
    /// Served after the high-priority queue, whose arrivals are bounded by
    /// `hp_arrival`.
    Low { hp_arrival: TokenBucket },
}

pub fn service_curve(g: &GateConfig, role: QueueRole) -> Result<RateLatency> {
    match role {
        QueueRole::Solo => Ok(affine_envelope(g)),
        QueueRole::High { lp_max_packet } => hp_service(g, lp_max_packet),
        QueueRole::Low { hp_arrival } => lp_service(g, hp_arrival),
    }
}

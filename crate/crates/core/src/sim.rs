//! Slotted Monte Carlo simulator of a station with 802.1Qbv gates and a
//! Bernoulli loss channel.
//!
//! Model:
//! - time advances in slots of `slot` time units; gate boundaries must fall
//!   on slot boundaries;
//! - a packet is released into its queue at the first slot boundary at or
//!   after its arrival;
//! - a transmission starts only if it finishes before its gate closes, and
//!   is never preempted;
//! - a high and a low priority queue share one server and the high one is
//!   picked first; every solo queue has a server of its own;
//! - each transmission fails with probability `p`; a failed packet becomes
//!   ready again `W` later one retransmission level up, and is dropped after
//!   `N` retransmissions;
//! - within a queue, higher retransmission levels go first, then older
//!   packets.
//!
//! Delay is measured from the original arrival to the end of the successful
//! transmission.

use alloc::collections::BinaryHeap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gates::GateConfig;
use crate::scenario::{Priority, QueueSpec, Scenario};

const SLOT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArrivalPattern {
    /// Whole burst at `t = 0`, then one packet whenever enough tokens
    /// accumulate: the extremal token-bucket-compliant source.
    #[default]
    Greedy,
    /// One packet every `packet_size / rate`, starting at 0.
    Periodic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub scenario: Scenario,
    pub packet_size: f64,
    pub slot: f64,
    pub duration: f64,
    pub seed: u64,
    pub pattern: ArrivalPattern,
}

impl SimConfig {
    /// Smallest gate-open time over 100, or a packet transmission time if
    /// that is shorter.
    pub fn default_slot(scenario: &Scenario, packet_size: f64) -> f64 {
        let open = scenario
            .queues
            .iter()
            .map(|q| q.gate.open)
            .fold(f64::INFINITY, f64::min);
        (open / 100.0).min(packet_size / scenario.capacity)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct QueueStats {
    pub name: String,
    pub injected: usize,
    pub delivered: usize,
    pub dropped: usize,
    /// Delays of delivered packets, ascending.
    pub delays: Vec<f64>,
}

impl QueueStats {
    pub fn max_delay(&self) -> f64 {
        self.delays.last().copied().unwrap_or(0.0)
    }

    pub fn mean_delay(&self) -> f64 {
        if self.delays.is_empty() {
            0.0
        } else {
            self.delays.iter().sum::<f64>() / self.delays.len() as f64
        }
    }

    /// Nearest-rank quantile.
    pub fn quantile(&self, q: f64) -> f64 {
        if self.delays.is_empty() {
            return 0.0;
        }
        let n = self.delays.len();
        let rank = libm::ceil(q * n as f64) as usize;
        self.delays[rank.clamp(1, n) - 1]
    }

    /// Fraction of delivered packets whose delay exceeds `bound`.
    pub fn violation_frequency(&self, bound: f64) -> f64 {
        if self.delays.is_empty() {
            return 0.0;
        }
        let within = self.delays.partition_point(|&d| d <= bound);
        (self.delays.len() - within) as f64 / self.delays.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimStats {
    pub queues: Vec<QueueStats>,
}

impl SimStats {
    pub fn queue(&self, name: &str) -> Option<&QueueStats> {
        self.queues.iter().find(|q| q.name == name)
    }
}

/// One transmission attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TxRecord {
    pub queue: usize,
    pub packet: u64,
    pub level: usize,
    /// Slot at which this attempt became eligible.
    pub ready_slot: u64,
    pub start_slot: u64,
    pub end_slot: u64,
    pub success: bool,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct SlotGate {
    pub offset: u64,
    pub open: u64,
    pub period: u64,
}

impl SlotGate {
    fn new(g: &GateConfig, slot: f64) -> Result<Self> {
        let open = to_slots(g.open, slot, "open")?;
        let closed = to_slots(g.closed, slot, "closed")?;
        Ok(Self {
            offset: to_slots(g.offset, slot, "offset")?,
            open,
            period: open + closed,
        })
    }

    /// Open slots left in the current window, 0 if closed.
    pub fn remaining_open(&self, s: u64) -> u64 {
        if s < self.offset {
            return 0;
        }
        let phase = (s - self.offset) % self.period;
        self.open.saturating_sub(phase)
    }

    /// Earliest slot `>= s` at which a `tx`-slot transmission may start.
    pub fn next_opportunity(&self, s: u64, tx: u64) -> u64 {
        if self.remaining_open(s) >= tx {
            s
        } else if s < self.offset {
            self.offset
        } else {
            self.offset + ((s - self.offset) / self.period + 1) * self.period
        }
    }
}

fn to_slots(x: f64, slot: f64, name: &str) -> Result<u64> {
    let ratio = x / slot;
    let rounded = libm::round(ratio);
    if (ratio - rounded).abs() > SLOT_SLACK * ratio.max(1.0) {
        return Err(Error::InvalidSimulation(format!(
            "slot {slot} does not divide gate {name} = {x}"
        )));
    }
    Ok(rounded as u64)
}

fn ceil_slots(x: f64, slot: f64) -> u64 {
    libm::ceil(x / slot - SLOT_SLACK).max(0.0) as u64
}

pub fn arrival_times(
    q: &QueueSpec,
    packet: f64,
    duration: f64,
    pattern: ArrivalPattern,
) -> Vec<f64> {
    let (r, b) = (q.flow.rate, q.flow.burst);
    let mut out = Vec::new();
    match pattern {
        ArrivalPattern::Greedy => {
            if r <= 0.0 {
                let n = libm::floor(b / packet + SLOT_SLACK) as usize;
                out.resize(n, 0.0);
                return out;
            }
            for k in 0u64.. {
                let t = (((k + 1) as f64) * packet - b).max(0.0) / r;
                if t >= duration {
                    break;
                }
                out.push(t);
            }
        }
        ArrivalPattern::Periodic => {
            if r <= 0.0 {
                return out;
            }
            let gap = packet / r;
            for k in 0u64.. {
                let t = k as f64 * gap;
                if t >= duration {
                    break;
                }
                out.push(t);
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy)]
struct Packet {
    id: u64,
    arrival: f64,
    level: usize,
    ready: u64,
}

/// Ready-queue ordering: higher level first, then earlier arrival.
struct ByUrgency(Packet);

impl PartialEq for ByUrgency {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for ByUrgency {}
impl PartialOrd for ByUrgency {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ByUrgency {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .level
            .cmp(&other.0.level)
            .then_with(|| other.0.arrival.total_cmp(&self.0.arrival))
            .then_with(|| other.0.id.cmp(&self.0.id))
    }
}

struct PendingRetx(Packet);

impl PartialEq for PendingRetx {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for PendingRetx {}
impl PartialOrd for PendingRetx {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for PendingRetx {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.0.ready, self.0.id).cmp(&(other.0.ready, other.0.id))
    }
}

struct QueueState {
    index: usize,
    gate: SlotGate,
    tx: u64,
    arrivals: Vec<f64>,
    next_arrival: usize,
    ready: BinaryHeap<ByUrgency>,
    retx: BinaryHeap<Reverse<PendingRetx>>,
    stats: QueueStats,
}

impl QueueState {
    fn release_slot(&self, k: usize, slot: f64) -> u64 {
        ceil_slots(self.arrivals[k], slot)
    }

    fn release(&mut self, s: u64, slot: f64) {
        while self.next_arrival < self.arrivals.len()
            && self.release_slot(self.next_arrival, slot) <= s
        {
            let k = self.next_arrival;
            self.ready.push(ByUrgency(Packet {
                id: k as u64,
                arrival: self.arrivals[k],
                level: 0,
                ready: self.release_slot(k, slot),
            }));
            self.next_arrival += 1;
        }
        while self.retx.peek().is_some_and(|Reverse(p)| p.0.ready <= s) {
            let Reverse(PendingRetx(p)) = self.retx.pop().expect("peeked");
            self.ready.push(ByUrgency(p));
        }
    }

    fn next_release(&self, slot: f64) -> Option<u64> {
        let a = (self.next_arrival < self.arrivals.len())
            .then(|| self.release_slot(self.next_arrival, slot));
        let r = self.retx.peek().map(|Reverse(p)| p.0.ready);
        match (a, r) {
            (Some(a), Some(r)) => Some(a.min(r)),
            (a, r) => a.or(r),
        }
    }
}

struct InFlight {
    pos: usize,
    packet: Packet,
    start: u64,
    end: u64,
}

struct Server<'a> {
    cfg: &'a SimConfig,
    queues: Vec<QueueState>,
    rng: ChaCha8Rng,
    wait_slots: u64,
    total_slots: u64,
    trace: Option<Vec<TxRecord>>,
}

impl Server<'_> {
    fn complete(&mut self, f: InFlight) {
        let ch = &self.cfg.scenario.channel;
        let lost = self.rng.gen_bool(ch.loss);
        if let Some(trace) = self.trace.as_mut() {
            trace.push(TxRecord {
                queue: self.queues[f.pos].index,
                packet: f.packet.id,
                level: f.packet.level,
                ready_slot: f.packet.ready,
                start_slot: f.start,
                end_slot: f.end,
                success: !lost,
            });
        }
        let q = &mut self.queues[f.pos];
        if !lost {
            q.stats.delivered += 1;
            q.stats
                .delays
                .push(f.end as f64 * self.cfg.slot - f.packet.arrival);
        } else if f.packet.level < ch.max_retx {
            let ready = f.end + self.wait_slots;
            q.retx.push(Reverse(PendingRetx(Packet {
                level: f.packet.level + 1,
                ready,
                ..f.packet
            })));
        } else {
            q.stats.dropped += 1;
        }
    }

    fn run(&mut self) {
        let slot = self.cfg.slot;
        let mut s: u64 = 0;
        let mut in_flight: Option<InFlight> = None;
        loop {
            if in_flight.as_ref().is_some_and(|f| f.end <= s) {
                let f = in_flight.take().expect("checked");
                self.complete(f);
            }
            if s >= self.total_slots {
                break;
            }
            for q in &mut self.queues {
                q.release(s, slot);
            }
            if in_flight.is_none() {
                for (pos, q) in self.queues.iter_mut().enumerate() {
                    if !q.ready.is_empty() && q.gate.remaining_open(s) >= q.tx {
                        let ByUrgency(packet) = q.ready.pop().expect("non-empty");
                        in_flight = Some(InFlight {
                            pos,
                            packet,
                            start: s,
                            end: s + q.tx,
                        });
                        break;
                    }
                }
            }

            let mut next = u64::MAX;
            match &in_flight {
                Some(f) => next = f.end,
                None => {
                    for q in &self.queues {
                        if !q.ready.is_empty() {
                            next = next.min(q.gate.next_opportunity(s + 1, q.tx));
                        }
                        if let Some(r) = q.next_release(slot) {
                            next = next.min(r);
                        }
                    }
                }
            }
            if next == u64::MAX {
                break;
            }
            s = next.max(s + 1);
        }
    }
}

fn validate(cfg: &SimConfig) -> Result<()> {
    let bad = |msg: String| Err(Error::InvalidSimulation(msg));
    cfg.scenario.validate()?;
    for (name, v) in [
        ("packet_size", cfg.packet_size),
        ("slot", cfg.slot),
        ("duration", cfg.duration),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return bad(format!("{name} must be finite and > 0, got {v}"));
        }
    }
    for q in &cfg.scenario.queues {
        if cfg.packet_size > q.l_max * (1.0 + 1e-12) {
            return bad(format!(
                "packet size {} exceeds l_max {} of `{}`",
                cfg.packet_size, q.l_max, q.name
            ));
        }
        if cfg.packet_size > q.flow.burst * (1.0 + 1e-12) {
            return bad(format!(
                "packet size {} exceeds burst {} of `{}`",
                cfg.packet_size, q.flow.burst, q.name
            ));
        }
        let gate = SlotGate::new(&q.gate, cfg.slot)?;
        let tx = ceil_slots(cfg.packet_size / q.gate.link_rate, cfg.slot).max(1);
        if tx > gate.open {
            return bad(format!(
                "a packet needs {tx} slots but the gate of `{}` opens for {}",
                q.name, gate.open
            ));
        }
    }
    Ok(())
}

fn servers(scenario: &Scenario) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = scenario
        .queues
        .iter()
        .enumerate()
        .filter(|(_, q)| q.priority == Priority::Solo)
        .map(|(i, _)| vec![i])
        .collect();
    let find = |p| scenario.queues.iter().position(|q| q.priority == p);
    if let (Some(h), Some(l)) = (find(Priority::High), find(Priority::Low)) {
        groups.push(vec![h, l]);
    }
    groups
}

fn simulate(cfg: &SimConfig, traced: bool) -> Result<(SimStats, Vec<TxRecord>)> {
    validate(cfg)?;
    let sc = &cfg.scenario;
    let total_slots = libm::round(cfg.duration / cfg.slot) as u64;
    let wait_slots = ceil_slots(sc.channel.detect_wait, cfg.slot);

    let mut stats: Vec<Option<QueueStats>> = vec![None; sc.queues.len()];
    let mut trace = Vec::new();
    for (stream, members) in servers(sc).into_iter().enumerate() {
        let queues = members
            .iter()
            .map(|&i| {
                let q = &sc.queues[i];
                let arrivals = arrival_times(q, cfg.packet_size, cfg.duration, cfg.pattern);
                Ok(QueueState {
                    index: i,
                    gate: SlotGate::new(&q.gate, cfg.slot)?,
                    tx: ceil_slots(cfg.packet_size / q.gate.link_rate, cfg.slot).max(1),
                    stats: QueueStats {
                        name: q.name.clone(),
                        injected: arrivals.len(),
                        ..QueueStats::default()
                    },
                    arrivals,
                    next_arrival: 0,
                    ready: BinaryHeap::new(),
                    retx: BinaryHeap::new(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(stream as u64);
        let mut server = Server {
            cfg,
            queues,
            rng,
            wait_slots,
            total_slots,
            trace: traced.then(Vec::new),
        };
        server.run();
        trace.extend(server.trace.take().unwrap_or_default());
        for mut q in server.queues {
            q.stats.delays.sort_by(f64::total_cmp);
            stats[q.index] = Some(q.stats);
        }
    }
    let queues = stats
        .into_iter()
        .map(|s| s.expect("every queue has a server"))
        .collect();
    trace.sort_by_key(|r| (r.start_slot, r.queue));
    Ok((SimStats { queues }, trace))
}

pub fn run(cfg: &SimConfig) -> Result<SimStats> {
    simulate(cfg, false).map(|(s, _)| s)
}

/// Like [`run`], also returning every transmission attempt ordered by start
/// slot.
pub fn run_traced(cfg: &SimConfig) -> Result<(SimStats, Vec<TxRecord>)> {
    simulate(cfg, true)
}

/// Fraction of delivered packets of `queue` whose delay exceeds `bound`.
pub fn validate_bound(cfg: &SimConfig, queue: &str, bound: f64) -> Result<f64> {
    let stats = run(cfg)?;
    let q = stats
        .queue(queue)
        .ok_or_else(|| Error::InvalidSimulation(format!("no queue named `{queue}`")))?;
    Ok(q.violation_frequency(bound))
}

/// Empirical probability that the Bernoulli(p) scaling process exceeds the
/// scaling curve over some suffix window of a length-`window` sequence:
/// the fraction of trials with `sup_{0<=a<=b} S(b) - S(a) - (p (b - a) + 1 - ε) > 0`.
pub fn validate_scaling(p: f64, epsilon: f64, window: u64, trials: u64, seed: u64) -> Result<f64> {
    crate::algebra::ScalingCurve::new(p, epsilon)?;
    if window == 0 || trials == 0 {
        return Err(Error::InvalidParameter {
            name: "window/trials",
            value: 0.0,
            reason: "must be >= 1",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = vec![false; window as usize];
    let mut violations = 0u64;
    for _ in 0..trials {
        for x in draws.iter_mut() {
            *x = rng.gen_bool(p);
        }
        // Walk a from b down to 0 accumulating the suffix sum S(b) - S(a).
        let mut suffix = 0.0;
        let mut sup = -(1.0 - epsilon);
        for (len, &lost) in draws.iter().rev().enumerate() {
            if lost {
                suffix += 1.0;
            }
            let len = (len + 1) as f64;
            sup = sup.max(suffix - (p * len + 1.0 - epsilon));
        }
        if sup > 0.0 {
            violations += 1;
        }
    }
    Ok(violations as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::TokenBucket;
    use crate::rtx::ChannelConfig;
    use crate::scenario::{presets, ScenarioOptions};
    use alloc::string::ToString;

    fn solo_cfg(offset: f64, loss: f64, retx: usize) -> SimConfig {
        let mut sc = presets::solo(3.0, 1.0);
        sc.queues[0].gate.offset = offset;
        sc.channel.loss = loss;
        sc.channel.max_retx = retx;
        SimConfig {
            packet_size: 0.001,
            slot: SimConfig::default_slot(&sc, 0.001),
            scenario: sc,
            duration: 200.0,
            seed: 7,
            pattern: ArrivalPattern::Greedy,
        }
    }

    #[test]
    fn slot_gate_arithmetic() {
        let g = SlotGate {
            offset: 5,
            open: 3,
            period: 10,
        };
        assert_eq!(g.remaining_open(4), 0);
        assert_eq!(g.remaining_open(5), 3);
        assert_eq!(g.remaining_open(7), 1);
        assert_eq!(g.remaining_open(8), 0);
        assert_eq!(g.next_opportunity(0, 2), 5);
        assert_eq!(g.next_opportunity(6, 2), 6);
        assert_eq!(g.next_opportunity(7, 2), 15);
        assert_eq!(g.next_opportunity(9, 1), 15);
    }

    #[test]
    fn greedy_arrivals_respect_token_bucket() {
        let q = QueueSpec {
            name: "q".to_string(),
            gate: GateConfig::new(1.0, 1.0, 0.0, 1.0).unwrap(),
            priority: Priority::Solo,
            flow: TokenBucket::new(0.5, 2.0).unwrap(),
            l_max: 1.0,
        };
        let a = arrival_times(&q, 1.0, 10.0, ArrivalPattern::Greedy);
        assert_eq!(&a[..3], &[0.0, 0.0, 2.0]);
        for i in 0..a.len() {
            for j in i..a.len() {
                let bits = (j - i + 1) as f64;
                assert!(bits <= 0.5 * (a[j] - a[i]) + 2.0 + 1e-12);
            }
        }
        let p = arrival_times(&q, 1.0, 10.0, ArrivalPattern::Periodic);
        assert_eq!(p, [0.0, 2.0, 4.0, 6.0, 8.0]);
    }

    #[test]
    fn dominance_with_offset_covering_closed_time() {
        // Gate first opens after a full closed period: the envelope latency
        // covers the worst wait for the gate.
        let cfg = solo_cfg(3.0, 0.0, 0);
        let stats = run(&cfg).unwrap();
        let q = &stats.queues[0];
        assert!(q.delivered > 1000);
        let bound = 3.0 + 0.001 / 2.5;
        assert!(q.max_delay() <= bound + cfg.slot, "{}", q.max_delay());
    }

    #[test]
    fn zero_offset_envelope_is_not_a_bound() {
        // With the gate opening at 0 the envelope promises 4e-4, but a packet
        // arriving right after the gate closes waits for the whole closed
        // period.
        let cfg = solo_cfg(0.0, 0.0, 0);
        let stats = run(&cfg).unwrap();
        let max = stats.queues[0].max_delay();
        assert!(max > 2.9 && max <= 3.0 + 2.0 * cfg.slot, "{max}");
    }

    #[test]
    fn certain_loss_drops_everything() {
        let cfg = solo_cfg(0.0, 1.0, 3);
        let (stats, trace) = run_traced(&cfg).unwrap();
        let q = &stats.queues[0];
        assert_eq!(q.delivered, 0);
        assert!(q.dropped > 0);
        // Every dropped packet was attempted exactly four times.
        let attempts = trace.iter().filter(|r| r.packet == 0).count();
        assert_eq!(attempts, 4);
        assert!(trace.iter().all(|r| !r.success));
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let cfg = solo_cfg(0.0, 0.2, 3);
        assert_eq!(run(&cfg).unwrap(), run(&cfg).unwrap());
        let mut other = cfg.clone();
        other.seed = 8;
        assert_ne!(run(&cfg).unwrap(), run(&other).unwrap());
    }

    #[test]
    fn rejects_bad_configs() {
        let mut cfg = solo_cfg(0.0, 0.0, 0);
        cfg.packet_size = 0.01;
        assert!(run(&cfg).is_err());

        let mut cfg = solo_cfg(0.0, 0.0, 0);
        cfg.slot = 0.003;
        assert!(matches!(run(&cfg), Err(Error::InvalidSimulation(_))));

        // Packet longer than the window.
        let sc = Scenario::new(
            1.0,
            ChannelConfig::new(0.0, 0.1, 0, 1.0).unwrap(),
            vec![QueueSpec {
                name: "q".to_string(),
                gate: GateConfig::new(1.0, 1.0, 0.0, 1.0).unwrap(),
                priority: Priority::Solo,
                flow: TokenBucket::new(0.1, 2.0).unwrap(),
                l_max: 2.0,
            }],
            ScenarioOptions::default(),
        )
        .unwrap();
        let cfg = SimConfig {
            scenario: sc,
            packet_size: 2.0,
            slot: 0.5,
            duration: 10.0,
            seed: 1,
            pattern: ArrivalPattern::Greedy,
        };
        assert!(run(&cfg).is_err());
    }

    #[test]
    fn stats_helpers() {
        let q = QueueStats {
            delays: vec![1.0, 2.0, 3.0, 4.0],
            ..QueueStats::default()
        };
        assert_eq!(q.max_delay(), 4.0);
        assert_eq!(q.mean_delay(), 2.5);
        assert_eq!(q.quantile(0.5), 2.0);
        assert_eq!(q.quantile(0.999), 4.0);
        assert_eq!(q.violation_frequency(2.5), 0.5);
        assert_eq!(q.violation_frequency(1e300), 0.0);
        assert_eq!(q.violation_frequency(0.0), 1.0);
    }

    #[test]
    fn validate_bound_extremes() {
        let cfg = solo_cfg(3.0, 0.0, 0);
        assert_eq!(validate_bound(&cfg, "solo", 1e300).unwrap(), 0.0);
        assert_eq!(validate_bound(&cfg, "solo", 0.0).unwrap(), 1.0);
        assert!(validate_bound(&cfg, "nope", 1.0).is_err());
    }

    #[test]
    fn scaling_validation_cases() {
        assert_eq!(validate_scaling(0.0, 3.3344e-4, 10, 1000, 1).unwrap(), 0.0);
        // p = 1: every window of length k has k losses against k + 1 - ε.
        assert_eq!(validate_scaling(1.0, 3.3344e-4, 2, 100, 1).unwrap(), 0.0);
        let f = validate_scaling(0.1, 3.3344e-4, 20, 10_000, 1).unwrap();
        assert!(f > 3.3344e-4 && f < 1.0, "{f}");
        assert!(validate_scaling(0.1, 0.1, 0, 10, 1).is_err());
    }
}

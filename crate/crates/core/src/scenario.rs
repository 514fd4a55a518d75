//! Whole experiments: a set of gated queues sharing one link and one lossy
//! channel, evaluated at a loss probability or swept over a range of them.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::algebra::{RateLatency, TokenBucket};
use crate::error::{check_nonneg, check_positive, Error, Result};
use crate::gates::{service_curve, GateConfig, QueueRole};
use crate::pwl::GridSpec;
use crate::rtx::{analyze, ChannelConfig, DelayBoundResult, SolverOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Priority {
    Solo,
    High,
    Low,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueueSpec {
    pub name: String,
    pub gate: GateConfig,
    pub priority: Priority,
    pub flow: TokenBucket,
    /// Largest packet this queue sends.
    pub l_max: f64,
}

/// Which arrival curve of the high-priority queue feeds the low-priority
/// service curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InterferenceMode {
    /// The configured high-priority flow `α(0)`.
    Original,
    /// The high-priority aggregate `α(Tot)` including its retransmissions.
    #[default]
    Aggregate,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ScenarioOptions {
    pub hp_interference_mode: InterferenceMode,
    pub solver: SolverOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub capacity: f64,
    pub channel: ChannelConfig,
    pub queues: Vec<QueueSpec>,
    pub options: ScenarioOptions,
}

impl Scenario {
    pub fn new(
        capacity: f64,
        channel: ChannelConfig,
        queues: Vec<QueueSpec>,
        options: ScenarioOptions,
    ) -> Result<Self> {
        let s = Self {
            capacity,
            channel,
            queues,
            options,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("capacity", self.capacity)?;
        if self.queues.is_empty() {
            return Err(Error::InvalidScenario("no queues".to_string()));
        }
        for (i, q) in self.queues.iter().enumerate() {
            if q.name.is_empty() {
                return Err(Error::InvalidScenario("queue with empty name".to_string()));
            }
            if self.queues[..i].iter().any(|o| o.name == q.name) {
                return Err(Error::InvalidScenario(format!(
                    "duplicate queue name `{}`",
                    q.name
                )));
            }
            if q.gate.link_rate != self.capacity {
                return Err(Error::InvalidScenario(format!(
                    "queue `{}` gate rate {} differs from capacity {}",
                    q.name, q.gate.link_rate, self.capacity
                )));
            }
            check_nonneg("l_max", q.l_max)?;
        }
        let highs = self.count(Priority::High);
        let lows = self.count(Priority::Low);
        if highs > 1 || lows > 1 {
            return Err(Error::InvalidScenario(
                "at most one high and one low priority queue".to_string(),
            ));
        }
        if highs != lows {
            return Err(Error::InvalidScenario(
                "high and low priority queues must come as a pair".to_string(),
            ));
        }
        if self.options.solver.max_iter == 0 || !(self.options.solver.tol > 0.0) {
            return Err(Error::InvalidScenario(
                "solver tol must be > 0 and max_iter >= 1".to_string(),
            ));
        }
        Ok(())
    }

    fn count(&self, p: Priority) -> usize {
        self.queues.iter().filter(|q| q.priority == p).count()
    }

    pub fn queue_with(&self, p: Priority) -> Option<&QueueSpec> {
        self.queues.iter().find(|q| q.priority == p)
    }

    /// Default oracle grid: horizon `10 (largest cycle + W)`, step the
    /// smallest positive of `{L, T, W, 1}` over 100.
    pub fn default_grid(&self) -> GridSpec {
        let w = self.channel.detect_wait;
        let longest = self
            .queues
            .iter()
            .map(|q| q.gate.cycle())
            .fold(0.0, f64::max);
        let smallest = self
            .queues
            .iter()
            .flat_map(|q| [q.gate.open, q.gate.closed])
            .chain([w, 1.0])
            .filter(|&x| x > 0.0)
            .fold(f64::INFINITY, f64::min);
        GridSpec {
            horizon: 10.0 * (longest + w),
            step: smallest / 100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueueResult {
    pub name: String,
    pub priority: Priority,
    /// `None` when the service curve itself is infeasible.
    pub service: Option<RateLatency>,
    pub result: DelayBoundResult,
}

fn channel_at(s: &Scenario, loss: f64) -> Result<ChannelConfig> {
    s.channel.with_loss(loss)
}

fn role_for(s: &Scenario, q: &QueueSpec, hp_arrival: Option<TokenBucket>) -> QueueRole {
    match q.priority {
        Priority::Solo => QueueRole::Solo,
        Priority::High => QueueRole::High {
            lp_max_packet: s.queue_with(Priority::Low).map_or(0.0, |lp| lp.l_max),
        },
        Priority::Low => QueueRole::Low {
            hp_arrival: hp_arrival.unwrap_or(TokenBucket::ZERO),
        },
    }
}

/// Like [`analyze`], with a burst iteration that never settles recorded as an
/// infinite bound.
fn analyze_queue(
    beta: RateLatency,
    flow: TokenBucket,
    ch: &ChannelConfig,
    opts: SolverOptions,
) -> Result<DelayBoundResult> {
    match analyze(beta, flow, ch, opts) {
        Err(Error::NonConvergence { .. }) => Ok(DelayBoundResult::unstable(ch)),
        other => other,
    }
}

/// Arrival curve of the high-priority queue that the low-priority service
/// must absorb. `None` means the high-priority side is itself unstable.
fn hp_interference(s: &Scenario, ch: &ChannelConfig) -> Result<Option<TokenBucket>> {
    let Some(hp) = s.queue_with(Priority::High) else {
        return Ok(Some(TokenBucket::ZERO));
    };
    match s.options.hp_interference_mode {
        InterferenceMode::Original => Ok(Some(hp.flow)),
        InterferenceMode::Aggregate => {
            let beta = match service_curve(&hp.gate, role_for(s, hp, None)) {
                Ok(b) => b,
                Err(e) if e.is_instability() => return Ok(None),
                Err(e) => return Err(e),
            };
            let res = analyze_queue(beta, hp.flow, ch, s.options.solver)?;
            Ok(res.solution.map(|sol| sol.aggregate))
        }
    }
}

/// Service curve of every queue, in scenario order. Per-queue instability is
/// reported in place.
pub fn build_service_curves(s: &Scenario, loss: f64) -> Result<Vec<(String, Result<RateLatency>)>> {
    let ch = channel_at(s, loss)?;
    let hp_arrival = hp_interference(s, &ch)?;
    Ok(s.queues
        .iter()
        .map(|q| {
            let curve = if q.priority == Priority::Low && hp_arrival.is_none() {
                Err(Error::Unstable {
                    load: f64::INFINITY,
                    rate: q.gate.envelope_rate(),
                })
            } else {
                service_curve(&q.gate, role_for(s, q, hp_arrival))
            };
            (q.name.clone(), curve)
        })
        .collect())
}

/// Delay bound of every queue at loss probability `loss`, in scenario order.
pub fn evaluate(s: &Scenario, loss: f64) -> Result<Vec<QueueResult>> {
    let ch = channel_at(s, loss)?;
    let curves = build_service_curves(s, loss)?;
    s.queues
        .iter()
        .zip(curves)
        .map(|(q, (name, curve))| {
            let (service, result) = match curve {
                Ok(beta) => (
                    Some(beta),
                    analyze_queue(beta, q.flow, &ch, s.options.solver)?,
                ),
                Err(e) if e.is_instability() => (None, DelayBoundResult::unstable(&ch)),
                Err(e) => return Err(e),
            };
            Ok(QueueResult {
                name,
                priority: q.priority,
                service,
                result,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub p: f64,
    pub queue: String,
    pub bound: f64,
    pub reliability: f64,
    pub stable: bool,
    pub agg_rate: f64,
    /// `+inf` when unstable.
    pub agg_burst: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn queue_rows<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a SweepRow> + 'a {
        self.rows.iter().filter(move |r| r.queue == name)
    }

    /// Sorts by `p`, then queue name.
    pub fn sort(&mut self) {
        self.rows
            .sort_by(|a, b| a.p.total_cmp(&b.p).then_with(|| a.queue.cmp(&b.queue)));
    }
}

/// Loss probabilities `from, from + step, ..., <= to`, rounded to 12
/// decimals so the values print cleanly.
pub fn p_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&from) || !(0.0..=1.0).contains(&to) || from > to {
        return Err(Error::InvalidParameter {
            name: "p range",
            value: from,
            reason: "need 0 <= p_from <= p_to <= 1",
        });
    }
    check_positive("p_step", step)?;
    let n = libm::floor((to - from) / step + 1e-9) as usize;
    Ok((0..=n)
        .map(|k| libm::round((from + k as f64 * step) * 1e12) / 1e12)
        .map(|p| p.min(to))
        .collect())
}

/// Rows for one loss probability, sorted by queue name.
pub fn sweep_point(s: &Scenario, p: f64) -> Result<Vec<SweepRow>> {
    let ch = channel_at(s, p)?;
    let mut rows: Vec<SweepRow> = evaluate(s, p)?
        .into_iter()
        .map(|qr| {
            let flow = s.queues.iter().find(|q| q.name == qr.name).map(|q| q.flow);
            let agg = qr.result.solution.as_ref().map(|sol| sol.aggregate);
            let load = flow.map_or(0.0, |f| ch.level_rates(f.rate).iter().sum());
            SweepRow {
                p,
                queue: qr.name,
                bound: qr.result.bound,
                reliability: qr.result.reliability,
                stable: qr.result.stable,
                agg_rate: agg.map_or(load, |a| a.rate),
                agg_burst: agg.map_or(f64::INFINITY, |a| a.burst),
            }
        })
        .collect();
    rows.sort_by(|a, b| a.queue.cmp(&b.queue));
    Ok(rows)
}

pub fn sweep(s: &Scenario, p_from: f64, p_to: f64, p_step: f64) -> Result<SweepResult> {
    let mut rows = Vec::new();
    for p in p_grid(p_from, p_to, p_step)? {
        rows.extend(sweep_point(s, p)?);
    }
    Ok(SweepResult { rows })
}

/// Reference setups: link rate 10, every flow `γ_{0.1, 0.001}`, three
/// retransmissions, `ε = 3.3344e-4`, loss detected one gate cycle later,
/// gates opening at 0 and 0.001-bit packets.
pub mod presets {
    use super::*;
    use alloc::vec;

    pub const CAPACITY: f64 = 10.0;
    pub const FLOW_RATE: f64 = 0.1;
    pub const FLOW_BURST: f64 = 0.001;
    pub const MAX_RETX: usize = 3;
    pub const EPSILON: f64 = 3.3344e-4;
    pub const L_MAX: f64 = 0.001;

    fn queue(name: &str, closed: f64, open: f64, priority: Priority) -> QueueSpec {
        QueueSpec {
            name: name.to_string(),
            gate: GateConfig {
                open,
                closed,
                offset: 0.0,
                link_rate: CAPACITY,
            },
            priority,
            flow: TokenBucket {
                rate: FLOW_RATE,
                burst: FLOW_BURST,
            },
            l_max: L_MAX,
        }
    }

    fn channel(closed: f64, open: f64) -> ChannelConfig {
        ChannelConfig {
            loss: 0.0,
            epsilon: EPSILON,
            max_retx: MAX_RETX,
            detect_wait: closed + open,
        }
    }

    /// A single queue with its own gate.
    pub fn solo(closed: f64, open: f64) -> Scenario {
        Scenario::new(
            CAPACITY,
            channel(closed, open),
            vec![queue("solo", closed, open, Priority::Solo)],
            ScenarioOptions::default(),
        )
        .expect("preset is valid")
    }

    /// A high and a low priority queue whose gates open together.
    pub fn overlapping(closed: f64, open: f64) -> Scenario {
        Scenario::new(
            CAPACITY,
            channel(closed, open),
            vec![
                queue("hp", closed, open, Priority::High),
                queue("lp", closed, open, Priority::Low),
            ],
            ScenarioOptions::default(),
        )
        .expect("preset is valid")
    }
}

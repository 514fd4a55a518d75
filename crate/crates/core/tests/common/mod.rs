#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use ncqbv_core::scenario::ScenarioOptions;
use ncqbv_core::{
    ArrivalPattern, ChannelConfig, GateConfig, Priority, QueueSpec, RateLatency, Scenario,
    SimConfig, TokenBucket,
};
use rand::Rng;

/// Bursts `b_1..b_N` of the retransmission levels, from solving the affine
/// burst equations directly:
///
/// `b_i = p b_{i-1} + p r_{i-1} (R T + Σ_{k>=i} b_k) / (R - Σ_{k>=i} r_k) + 1 - ε + p r_{i-1} W`.
pub fn burst_linear_solve(beta: RateLatency, a0: TokenBucket, ch: &ChannelConfig) -> Vec<f64> {
    let n = ch.max_retx;
    if n == 0 {
        return Vec::new();
    }
    let p = ch.loss;
    let rates: Vec<f64> = (0..=n).map(|i| a0.rate * p.powi(i as i32)).collect();
    let mut m = DMatrix::<f64>::identity(n, n);
    let mut c = DVector::<f64>::zeros(n);
    for i in 1..=n {
        let row = i - 1;
        let tail_rate: f64 = rates[i..].iter().sum();
        let gain = p * rates[i - 1] / (beta.rate - tail_rate);
        for k in i..=n {
            m[(row, k - 1)] -= gain;
        }
        if i >= 2 {
            m[(row, i - 2)] -= p;
        } else {
            c[row] += p * a0.burst;
        }
        c[row] +=
            gain * beta.rate * beta.latency + 1.0 - ch.epsilon + p * rates[i - 1] * ch.detect_wait;
    }
    m.lu()
        .solve(&c)
        .expect("burst system is nonsingular")
        .iter()
        .copied()
        .collect()
}

/// Random small scenario with a solo queue and a high/low pair, built so
/// that every packet boundary and arrival falls on the slot grid.
///
/// Both gates open at an offset in `[T, T + L]`. Every packet is the same
/// size and a whole number of them fills one window.
pub fn random_dominance_config<R: Rng>(rng: &mut R, seed: u64) -> SimConfig {
    let capacity = rng.gen_range(1.0..=20.0);
    let open: f64 = rng.gen_range(0.5..=5.0);
    let slot = open / 100.0;
    let closed = (rng.gen_range(0.5..=5.0) / slot).round() * slot;
    let offset = ((closed + rng.gen_range(0.0..=open)) / slot).round() * slot;
    let per_window = [1u32, 2, 4, 5, 10][rng.gen_range(0..5)];
    let packet = capacity * open / per_window as f64;
    let gate = GateConfig::new(open, closed, offset, capacity).unwrap();
    let envelope = gate.envelope_rate();

    let flow = |rng: &mut R| {
        // r = packet / (j slots), kept within [0.05 R, 0.45 R].
        let unit = packet / slot;
        let j_lo = (unit / (0.45 * envelope)).ceil().max(1.0) as u64;
        let j_hi = ((unit / (0.05 * envelope)).floor() as u64).max(j_lo);
        let j = rng.gen_range(j_lo..=j_hi);
        let burst = packet * rng.gen_range(1..=3) as f64;
        TokenBucket::new(unit / j as f64, burst).unwrap()
    };
    let queue = |name: &str, priority, flow| QueueSpec {
        name: name.to_string(),
        gate,
        priority,
        flow,
        l_max: packet,
    };
    let queues = vec![
        queue("solo", Priority::Solo, flow(rng)),
        queue("hp", Priority::High, flow(rng)),
        queue("lp", Priority::Low, flow(rng)),
    ];
    let channel = ChannelConfig::new(0.0, 3.3344e-4, 0, closed + open).unwrap();
    let scenario = Scenario::new(capacity, channel, queues, ScenarioOptions::default()).unwrap();
    SimConfig {
        scenario,
        packet_size: packet,
        slot,
        duration: 200.0 * (open + closed),
        seed,
        pattern: ArrivalPattern::Greedy,
    }
}

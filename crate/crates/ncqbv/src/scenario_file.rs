//! JSON scenario files.
//!
//! Units are abstract: sizes in bits, durations in time units, rates in bits
//! per time unit. Every field is required except `channel.p` and the members
//! of `options`, whose defaults are listed by [`ScenarioFile::defaults_used`].

use ncqbv_core::scenario::ScenarioOptions;
use ncqbv_core::{
    ChannelConfig, GateConfig, InterferenceMode, Priority, QueueSpec, Scenario, SolverOptions,
    TokenBucket,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_LOSS: f64 = 0.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub capacity: f64,
    pub channel: ChannelSection,
    pub queues: Vec<QueueSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<OptionsSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    pub epsilon: f64,
    pub max_retx: usize,
    pub detect_wait: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueueSection {
    pub name: String,
    pub gate: GateSection,
    pub priority: PriorityName,
    pub flow: FlowSection,
    pub l_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateSection {
    pub open: f64,
    pub closed: f64,
    pub offset: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSection {
    pub rate: f64,
    pub burst: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PriorityName {
    Solo,
    High,
    Low,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Original,
    Aggregate,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hp_interference_mode: Option<ModeName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
}

impl From<PriorityName> for Priority {
    fn from(p: PriorityName) -> Self {
        match p {
            PriorityName::Solo => Priority::Solo,
            PriorityName::High => Priority::High,
            PriorityName::Low => Priority::Low,
        }
    }
}

impl From<Priority> for PriorityName {
    fn from(p: Priority) -> Self {
        match p {
            Priority::Solo => PriorityName::Solo,
            Priority::High => PriorityName::High,
            Priority::Low => PriorityName::Low,
        }
    }
}

impl From<ModeName> for InterferenceMode {
    fn from(m: ModeName) -> Self {
        match m {
            ModeName::Original => InterferenceMode::Original,
            ModeName::Aggregate => InterferenceMode::Aggregate,
        }
    }
}

impl From<InterferenceMode> for ModeName {
    fn from(m: InterferenceMode) -> Self {
        match m {
            InterferenceMode::Original => ModeName::Original,
            InterferenceMode::Aggregate => ModeName::Aggregate,
        }
    }
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn read(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Option defaults that were filled in because the file left them out,
    /// as `key=value` pairs.
    pub fn defaults_used(&self) -> Vec<String> {
        let o = self.options.unwrap_or_default();
        let solver = SolverOptions::default();
        let mut out = Vec::new();
        if self.channel.p.is_none() {
            out.push(format!("channel.p={DEFAULT_LOSS}"));
        }
        if o.hp_interference_mode.is_none() {
            out.push("options.hp_interference_mode=aggregate".to_string());
        }
        if o.tol.is_none() {
            out.push(format!("options.tol={:e}", solver.tol));
        }
        if o.max_iter.is_none() {
            out.push(format!("options.max_iter={}", solver.max_iter));
        }
        out
    }

    pub fn to_scenario(&self) -> Result<Scenario, CliError> {
        let o = self.options.unwrap_or_default();
        let solver = SolverOptions::default();
        let options = ScenarioOptions {
            hp_interference_mode: o.hp_interference_mode.map(Into::into).unwrap_or_default(),
            solver: SolverOptions {
                tol: o.tol.unwrap_or(solver.tol),
                max_iter: o.max_iter.unwrap_or(solver.max_iter),
            },
        };
        let c = &self.channel;
        let channel = ChannelConfig::new(
            c.p.unwrap_or(DEFAULT_LOSS),
            c.epsilon,
            c.max_retx,
            c.detect_wait,
        )?;
        let queues = self
            .queues
            .iter()
            .map(|q| {
                Ok(QueueSpec {
                    name: q.name.clone(),
                    gate: GateConfig::new(
                        q.gate.open,
                        q.gate.closed,
                        q.gate.offset,
                        self.capacity,
                    )?,
                    priority: q.priority.into(),
                    flow: TokenBucket::new(q.flow.rate, q.flow.burst)?,
                    l_max: q.l_max,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(Scenario::new(self.capacity, channel, queues, options)?)
    }

    /// File with every optional field written out.
    pub fn normalized(s: &Scenario) -> Self {
        Self {
            capacity: s.capacity,
            channel: ChannelSection {
                p: Some(s.channel.loss),
                epsilon: s.channel.epsilon,
                max_retx: s.channel.max_retx,
                detect_wait: s.channel.detect_wait,
            },
            queues: s
                .queues
                .iter()
                .map(|q| QueueSection {
                    name: q.name.clone(),
                    gate: GateSection {
                        open: q.gate.open,
                        closed: q.gate.closed,
                        offset: q.gate.offset,
                    },
                    priority: q.priority.into(),
                    flow: FlowSection {
                        rate: q.flow.rate,
                        burst: q.flow.burst,
                    },
                    l_max: q.l_max,
                })
                .collect(),
            options: Some(OptionsSection {
                hp_interference_mode: Some(s.options.hp_interference_mode.into()),
                tol: Some(s.options.solver.tol),
                max_iter: Some(s.options.solver.max_iter),
            }),
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("scenario files serialize");
        text.push('\n');
        text
    }
}

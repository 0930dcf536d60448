use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use super::{InputModels, NetsimError, NetworkConfig, Result, LENGTH_SOURCE, NODES, PAIRS};
use crate::resampling::{SeedSpec, StreamDomain, StreamRng};

/// Per-run switches.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SimOptions {
    /// Keep a record of every tracked message.
    pub record_trace: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MessageRecord {
    /// 0-based arrival order.
    pub index: usize,
    pub from: usize,
    pub to: usize,
    pub len: f64,
    pub arrival: f64,
    pub delay: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimDiagnostics {
    pub events: u64,
    pub final_time: f64,
    /// Largest reserved bits seen on each channel.
    pub max_channel_occupancy: [f64; NODES],
    pub fifo_violations: u64,
    pub conservation_violations: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    pub mean_delay: f64,
    /// Tracked messages delivered (equals the horizon on success).
    pub delivered_count: usize,
    /// All messages that entered the network, tracked or not.
    pub generated_count: usize,
    pub trace: Option<Vec<MessageRecord>>,
    pub diagnostics: SimDiagnostics,
}

/// Node sequence (0-based) from `from` to `to`.
pub(crate) fn route(from: usize, to: usize) -> Vec<usize> {
    let fwd = (to + NODES - from) % NODES;
    match fwd {
        1 | 3 => vec![from, to],
        2 => {
            let a = (from + 1) % NODES;
            let b = (from + 3) % NODES;
            vec![from, a.min(b), to]
        }
        _ => unreachable!("no self routes"),
    }
}

/// Ring channel joining adjacent nodes `a` and `b` (0-based).
pub(crate) fn channel_between(a: usize, b: usize) -> usize {
    if (a + 1) % NODES == b {
        a
    } else {
        debug_assert_eq!((b + 1) % NODES, a);
        b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    PropagationDone { channel: usize, msg: usize },
    TransmitDone { channel: usize },
    NodeDone { node: usize },
    Arrival { source: usize },
}

impl Kind {
    /// Departures (completions) before arrivals.
    fn priority(&self) -> u8 {
        match self {
            Kind::Arrival { .. } => 1,
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    priority: u8,
    seq: u64,
    kind: Kind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    // Reversed so the max-heap pops the earliest event.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then(other.priority.cmp(&self.priority))
            .then(other.seq.cmp(&self.seq))
    }
}

struct Message {
    from: usize,
    to: usize,
    len: f64,
    arrival: f64,
    route: &'static [usize],
    hop: usize,
}

#[derive(Default)]
struct Node {
    queue: VecDeque<usize>,
    busy: Option<usize>,
}

#[derive(Default)]
struct Channel {
    queue: VecDeque<usize>,
    transmitting: Option<usize>,
    reserved: f64,
    in_flight: usize,
    started: VecDeque<usize>,
}

struct Engine<'a> {
    config: &'a NetworkConfig,
    models: &'a InputModels,
    rngs: Vec<StreamRng>,
    routes: Vec<Vec<&'static [usize]>>,
    heap: BinaryHeap<Event>,
    seq: u64,
    now: f64,
    nodes: Vec<Node>,
    channels: Vec<Channel>,
    messages: Vec<Message>,
    delays: Vec<Option<f64>>,
    delivered_tracked: usize,
    delivered_total: usize,
    diag: SimDiagnostics,
}

fn route_table() -> Vec<Vec<&'static [usize]>> {
    use std::sync::OnceLock;
    static ROUTES: OnceLock<Vec<Vec<Vec<usize>>>> = OnceLock::new();
    let table = ROUTES.get_or_init(|| {
        (0..NODES)
            .map(|i| {
                (0..NODES)
                    .map(|j| if i == j { vec![] } else { route(i, j) })
                    .collect()
            })
            .collect()
    });
    table
        .iter()
        .map(|row| row.iter().map(|r| r.as_slice()).collect())
        .collect()
}

impl<'a> Engine<'a> {
    fn schedule(&mut self, time: f64, kind: Kind) {
        self.seq += 1;
        self.heap.push(Event {
            time,
            priority: kind.priority(),
            seq: self.seq,
            kind,
        });
    }

    fn schedule_arrival(&mut self, source: usize) {
        if let Some(gap) = self.models.models()[source].draw(&mut self.rngs[source]) {
            self.schedule(self.now + gap, Kind::Arrival { source });
        }
    }

    fn node_enter(&mut self, node: usize, msg: usize) {
        if self.nodes[node].busy.is_none() {
            self.nodes[node].busy = Some(msg);
            self.schedule(
                self.now + self.config.node_proc_time,
                Kind::NodeDone { node },
            );
        } else {
            self.nodes[node].queue.push_back(msg);
        }
    }

    fn try_transmit(&mut self, channel: usize) {
        let ch = &mut self.channels[channel];
        if ch.transmitting.is_some() {
            return;
        }
        let Some(&head) = ch.queue.front() else {
            return;
        };
        let len = self.messages[head].len;
        if ch.reserved + len > self.config.channel_capacity_bits {
            return;
        }
        ch.queue.pop_front();
        ch.reserved += len;
        ch.transmitting = Some(head);
        ch.started.push_back(head);
        let occ = &mut self.diag.max_channel_occupancy[channel];
        *occ = occ.max(ch.reserved);
        let done = self.now + len / self.config.channel_bandwidth_bits_per_s;
        self.schedule(done, Kind::TransmitDone { channel });
    }

    fn in_system(&self) -> usize {
        let nodes: usize = self
            .nodes
            .iter()
            .map(|n| n.queue.len() + n.busy.is_some() as usize)
            .sum();
        let channels: usize = self
            .channels
            .iter()
            .map(|c| c.queue.len() + c.transmitting.is_some() as usize + c.in_flight)
            .sum();
        nodes + channels
    }

    fn handle(&mut self, kind: Kind) -> Result<()> {
        match kind {
            Kind::Arrival { source } => {
                let (from, to) = PAIRS[source];
                let len = self.models.models()[LENGTH_SOURCE]
                    .draw(&mut self.rngs[LENGTH_SOURCE])
                    .expect("length source is never disabled");
                if len > self.config.channel_capacity_bits {
                    return Err(NetsimError::MessageTooLong {
                        len,
                        capacity: self.config.channel_capacity_bits,
                    });
                }
                let id = self.messages.len();
                self.messages.push(Message {
                    from,
                    to,
                    len,
                    arrival: self.now,
                    route: self.routes[from][to],
                    hop: 0,
                });
                self.node_enter(from, id);
                self.schedule_arrival(source);
            }
            Kind::NodeDone { node } => {
                let msg = self.nodes[node].busy.take().expect("node was busy");
                let m = &self.messages[msg];
                if m.hop + 1 == m.route.len() {
                    self.delivered_total += 1;
                    if msg < self.config.horizon_messages {
                        self.delays[msg] = Some(self.now - m.arrival);
                        self.delivered_tracked += 1;
                    }
                } else {
                    let channel = channel_between(m.route[m.hop], m.route[m.hop + 1]);
                    self.channels[channel].queue.push_back(msg);
                    self.try_transmit(channel);
                }
                if let Some(next) = self.nodes[node].queue.pop_front() {
                    self.nodes[node].busy = Some(next);
                    self.schedule(
                        self.now + self.config.node_proc_time,
                        Kind::NodeDone { node },
                    );
                }
            }
            Kind::TransmitDone { channel } => {
                let ch = &mut self.channels[channel];
                let msg = ch.transmitting.take().expect("channel was transmitting");
                if ch.started.pop_front() != Some(msg) {
                    self.diag.fifo_violations += 1;
                }
                ch.in_flight += 1;
                let prop =
                    self.config.channel_length_miles[channel] / self.config.propagation_miles_per_s;
                self.schedule(self.now + prop, Kind::PropagationDone { channel, msg });
                self.try_transmit(channel);
            }
            Kind::PropagationDone { channel, msg } => {
                let ch = &mut self.channels[channel];
                ch.in_flight -= 1;
                ch.reserved -= self.messages[msg].len;
                if ch.in_flight == 0 && ch.transmitting.is_none() {
                    // Clear accumulated rounding once the channel is empty.
                    ch.reserved = 0.0;
                }
                self.messages[msg].hop += 1;
                let m = &self.messages[msg];
                let node = m.route[m.hop];
                self.node_enter(node, msg);
                self.try_transmit(channel);
            }
        }
        Ok(())
    }
}

/// Runs one replication; source `k` draws from
/// `seed.with_source(seed.source_index + k)` in the simulation domain.
pub fn simulate(models: &InputModels, config: &NetworkConfig, seed: SeedSpec) -> Result<SimOutput> {
    simulate_with(models, config, seed, &SimOptions::default())
}

pub fn simulate_with(
    models: &InputModels,
    config: &NetworkConfig,
    seed: SeedSpec,
    options: &SimOptions,
) -> Result<SimOutput> {
    config.validate()?;
    let rngs = (0..models.models().len())
        .map(|k| {
            seed.with_source(seed.source_index + k as u64)
                .stream(StreamDomain::Simulation)
        })
        .collect();
    let mut e = Engine {
        config,
        models,
        rngs,
        routes: route_table(),
        heap: BinaryHeap::new(),
        seq: 0,
        now: 0.0,
        nodes: (0..NODES).map(|_| Node::default()).collect(),
        channels: (0..NODES).map(|_| Channel::default()).collect(),
        messages: Vec::with_capacity(config.horizon_messages + config.horizon_messages / 4),
        delays: vec![None; config.horizon_messages],
        delivered_tracked: 0,
        delivered_total: 0,
        diag: SimDiagnostics::default(),
    };
    for source in 0..PAIRS.len() {
        e.schedule_arrival(source);
    }
    while e.delivered_tracked < config.horizon_messages {
        let Some(ev) = e.heap.pop() else {
            return Err(NetsimError::Config(
                "every arrival source is disabled before the horizon is reached".into(),
            ));
        };
        if ev.time > config.time_cap_s {
            return Err(NetsimError::Divergence {
                cap: config.time_cap_s,
                delivered: e.delivered_tracked,
                horizon: config.horizon_messages,
            });
        }
        e.now = ev.time;
        e.handle(ev.kind)?;
        e.diag.events += 1;
        if e.messages.len() != e.delivered_total + e.in_system() {
            e.diag.conservation_violations += 1;
        }
    }
    e.diag.final_time = e.now;
    let window = &e.delays[config.warmup_messages..config.horizon_messages];
    let sum: f64 = window
        .iter()
        .map(|d| d.expect("all tracked messages delivered"))
        .sum();
    let trace = options.record_trace.then(|| {
        e.delays
            .iter()
            .enumerate()
            .map(|(index, d)| {
                let m = &e.messages[index];
                MessageRecord {
                    index,
                    from: m.from,
                    to: m.to,
                    len: m.len,
                    arrival: m.arrival,
                    delay: d.expect("all tracked messages delivered"),
                }
            })
            .collect()
    });
    Ok(SimOutput {
        mean_delay: sum / window.len() as f64,
        delivered_count: e.delivered_tracked,
        generated_count: e.messages.len(),
        trace,
        diagnostics: e.diag,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{Distribution, InputModel, SOURCES};
    use super::*;

    fn isolated(
        active: &[(usize, f64)],
        len: f64,
        warmup: usize,
        horizon: usize,
    ) -> (InputModels, NetworkConfig) {
        let mut models = vec![InputModel::Disabled; SOURCES];
        for &(k, gap) in active {
            models[k] = InputModel::Empirical(vec![gap].into());
        }
        models[LENGTH_SOURCE] = InputModel::Empirical(vec![len].into());
        let mut config = NetworkConfig::exponential_preset();
        config.warmup_messages = warmup;
        config.horizon_messages = horizon;
        (InputModels::new(models).unwrap(), config)
    }

    #[test]
    fn routes_follow_ring_convention() {
        assert_eq!(route(0, 1), vec![0, 1]);
        assert_eq!(route(0, 3), vec![0, 3]);
        assert_eq!(route(0, 2), vec![0, 1, 2]);
        assert_eq!(route(2, 0), vec![2, 1, 0]);
        assert_eq!(route(1, 3), vec![1, 0, 3]);
        assert_eq!(route(3, 1), vec![3, 0, 1]);
        assert_eq!(channel_between(0, 1), 0);
        assert_eq!(channel_between(3, 0), 3);
        assert_eq!(channel_between(2, 1), 1);
    }

    #[test]
    fn single_message_delay() {
        let (models, config) = isolated(&[(0, 1.0)], 300.0, 0, 1);
        let out = simulate(&models, &config, SeedSpec::new(1, 0, 0, 0)).unwrap();
        assert!(
            (out.mean_delay - 0.0037576).abs() < 1e-7,
            "{}",
            out.mean_delay
        );
        let exact = 0.001 + 300.0 / 275_000.0 + 100.0 / 150_000.0 + 0.001;
        assert!((out.mean_delay - exact).abs() < 1e-15);
    }

    #[test]
    fn disjoint_routes_do_not_interact() {
        // 1→2 on channel 1 and 3→4 on channel 3, arriving together.
        let (models, config) = isolated(&[(0, 1.0), (8, 1.0)], 300.0, 0, 2);
        let out = simulate_with(
            &models,
            &config,
            SeedSpec::new(1, 0, 0, 0),
            &SimOptions { record_trace: true },
        )
        .unwrap();
        let trace = out.trace.unwrap();
        let base = 0.002 + 300.0 / 275_000.0;
        for r in &trace {
            let expected = match (r.from, r.to) {
                (0, 1) => base + 100.0 / 150_000.0,
                (2, 3) => base + 300.0 / 150_000.0,
                _ => unreachable!(),
            };
            assert!((r.delay - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn two_hop_antipodal_delay() {
        // 2→4 goes through node 1: channels 1 and 4.
        let (models, config) = isolated(&[(5, 1.0)], 300.0, 0, 1);
        let out = simulate(&models, &config, SeedSpec::new(1, 0, 0, 0)).unwrap();
        let expected = 0.003 + 600.0 / 275_000.0 + (100.0 + 400.0) / 150_000.0;
        assert!((out.mean_delay - expected).abs() < 1e-15);
    }

    #[test]
    fn invariants_on_preset() {
        let config = NetworkConfig::exponential_preset();
        let models = InputModels::parametric(&config).unwrap();
        let out = simulate_with(
            &models,
            &config,
            SeedSpec::new(5, 0, 0, 0),
            &SimOptions { record_trace: true },
        )
        .unwrap();
        assert_eq!(out.delivered_count, config.horizon_messages);
        assert_eq!(out.diagnostics.fifo_violations, 0);
        assert_eq!(out.diagnostics.conservation_violations, 0);
        for occ in out.diagnostics.max_channel_occupancy {
            assert!(occ <= config.channel_capacity_bits);
        }
        for r in out.trace.unwrap() {
            let path = route(r.from, r.to);
            let mut lower = path.len() as f64 * config.node_proc_time;
            for w in path.windows(2) {
                let c = channel_between(w[0], w[1]);
                lower += r.len / config.channel_bandwidth_bits_per_s
                    + config.channel_length_miles[c] / config.propagation_miles_per_s;
            }
            assert!(r.delay >= lower * (1.0 - 1e-12), "{} < {lower}", r.delay);
        }
        assert!(out.mean_delay > 0.0);
    }

    #[test]
    fn deterministic_replay() {
        let config = NetworkConfig::gamma_preset();
        let models = InputModels::parametric(&config).unwrap();
        let a = simulate(&models, &config, SeedSpec::new(9, 1, 2, 0)).unwrap();
        let b = simulate(&models, &config, SeedSpec::new(9, 1, 2, 0)).unwrap();
        assert_eq!(a, b);
        let c = simulate(&models, &config, SeedSpec::new(9, 1, 3, 0)).unwrap();
        assert_ne!(a.mean_delay, c.mean_delay);
    }

    #[test]
    fn tight_capacity_blocks_but_respects_limit() {
        let mut config = NetworkConfig::exponential_preset();
        config.channel_capacity_bits = 2_000.0;
        config.horizon_messages = 2_000;
        config.warmup_messages = 100;
        let mut models: Vec<InputModel> = config
            .ground_truth()
            .unwrap()
            .into_iter()
            .map(InputModel::Parametric)
            .collect();
        models[LENGTH_SOURCE] = InputModel::Empirical(vec![600.0, 900.0, 1_200.0].into());
        let models = InputModels::new(models).unwrap();
        let out = simulate(&models, &config, SeedSpec::new(3, 0, 0, 0)).unwrap();
        for occ in out.diagnostics.max_channel_occupancy {
            assert!(occ <= 2_000.0);
        }
        assert_eq!(out.diagnostics.conservation_violations, 0);
    }

    #[test]
    fn oversized_message_and_time_cap() {
        let (models, mut config) = isolated(&[(0, 1.0)], 300_000.0, 0, 1);
        assert!(matches!(
            simulate(&models, &config, SeedSpec::new(1, 0, 0, 0)),
            Err(NetsimError::MessageTooLong { .. })
        ));
        let (models, _) = isolated(&[(0, 10.0)], 300.0, 0, 5);
        config.time_cap_s = 20.0;
        config.horizon_messages = 5;
        assert!(matches!(
            simulate(&models, &config, SeedSpec::new(1, 0, 0, 0)),
            Err(NetsimError::Divergence { .. })
        ));
    }

    #[test]
    fn parametric_length_distribution_is_used() {
        let mut config = NetworkConfig::exponential_preset();
        config.horizon_messages = 3_000;
        config.msg_len = Distribution::Exponential { rate: 1.0 / 300.0 };
        let models = InputModels::parametric(&config).unwrap();
        let out = simulate_with(
            &models,
            &config,
            SeedSpec::new(8, 0, 0, 0),
            &SimOptions { record_trace: true },
        )
        .unwrap();
        let trace = out.trace.unwrap();
        let mean_len = trace.iter().map(|r| r.len).sum::<f64>() / trace.len() as f64;
        assert!((mean_len - 300.0).abs() < 5.0 * 300.0 / (trace.len() as f64).sqrt());
    }
}

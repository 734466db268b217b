//! Event and sample logs of a run, and their CSV form.
//!
//! `events.csv` has columns `step,t,kind,agent,payload`; the payload is a
//! `key=value` list joined by `;`. `samples.csv` has `step,t`, positions
//! `x_<id>,y_<id>`, pairwise distances `d_<id>_<id>`, `V`, `vdot`, `vtol`
//! and input norms `u_<id>`. Agents appear under their scenario ids.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::SimError;
use crate::scalar::Vec2;

#[derive(Clone, Debug, PartialEq)]
pub enum EventKind {
    GoalReached {
        region: String,
        services: Vec<String>,
        /// 0-based plan index that was served.
        kappa: usize,
        /// Whether the connectivity graph was complete at that step.
        complete: bool,
    },
    ModeSwitch {
        active: bool,
        reason: String,
    },
    /// The agent inferred that `target` reached a goal; `witness` is the
    /// step of the small-input sample.
    Detection {
        target: usize,
        witness: u64,
    },
    EdgeAdded {
        other: usize,
        dist: f64,
    },
    /// The agent closed its `round`-th round.
    RoundComplete {
        round: u32,
    },
    /// A failed online invariant; the run stops here.
    Violation {
        message: String,
    },
    /// A diagnostic that does not stop the run.
    Warning {
        message: String,
    },
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::GoalReached { .. } => "goal_reached",
            EventKind::ModeSwitch { .. } => "mode_switch",
            EventKind::Detection { .. } => "detection",
            EventKind::EdgeAdded { .. } => "edge_added",
            EventKind::RoundComplete { .. } => "round_complete",
            EventKind::Violation { .. } => "violation",
            EventKind::Warning { .. } => "warning",
        }
    }

    /// Whether the event changes the potential (goal, mode or edge set).
    pub fn is_discrete_change(&self) -> bool {
        matches!(
            self,
            EventKind::GoalReached { .. }
                | EventKind::ModeSwitch { .. }
                | EventKind::EdgeAdded { .. }
                | EventKind::RoundComplete { .. }
        )
    }

    fn payload(&self) -> String {
        match self {
            EventKind::GoalReached {
                region,
                services,
                kappa,
                complete,
            } => format!(
                "region={region};services={};kappa={kappa};complete={complete}",
                services.join("|")
            ),
            EventKind::ModeSwitch { active, reason } => format!(
                "mode={};reason={reason}",
                if *active { "active" } else { "passive" }
            ),
            EventKind::Detection { target, witness } => format!("j={target};witness={witness}"),
            EventKind::EdgeAdded { other, dist } => format!("j={other};dist={dist}"),
            EventKind::RoundComplete { round } => format!("m={round}"),
            EventKind::Violation { message } | EventKind::Warning { message } => {
                format!("message={message}")
            }
        }
    }

    fn parse(kind: &str, payload: &str) -> Result<Self, String> {
        if kind == "violation" || kind == "warning" {
            let message = payload.strip_prefix("message=").ok_or("missing message")?;
            let message = message.to_string();
            return Ok(if kind == "violation" {
                EventKind::Violation { message }
            } else {
                EventKind::Warning { message }
            });
        }
        let fields: Vec<(&str, &str)> = payload
            .split(';')
            .filter(|f| !f.is_empty())
            .map(|f| f.split_once('=').ok_or_else(|| format!("bad field `{f}`")))
            .collect::<Result<_, _>>()?;
        let get = |k: &str| {
            fields
                .iter()
                .find(|(key, _)| *key == k)
                .map(|(_, v)| *v)
                .ok_or_else(|| format!("missing `{k}`"))
        };
        fn num<T: std::str::FromStr>(v: &str) -> Result<T, String> {
            v.parse().map_err(|_| format!("bad number `{v}`"))
        }
        Ok(match kind {
            "goal_reached" => EventKind::GoalReached {
                region: get("region")?.to_string(),
                services: get("services")?
                    .split('|')
                    .filter(|s| !s.is_empty())
                    .map(str::to_string)
                    .collect(),
                kappa: num(get("kappa")?)?,
                complete: num(get("complete")?)?,
            },
            "mode_switch" => EventKind::ModeSwitch {
                active: match get("mode")? {
                    "active" => true,
                    "passive" => false,
                    other => return Err(format!("bad mode `{other}`")),
                },
                reason: get("reason")?.to_string(),
            },
            "detection" => EventKind::Detection {
                target: num(get("j")?)?,
                witness: num(get("witness")?)?,
            },
            "edge_added" => EventKind::EdgeAdded {
                other: num(get("j")?)?,
                dist: num(get("dist")?)?,
            },
            "round_complete" => EventKind::RoundComplete {
                round: num(get("m")?)?,
            },
            other => return Err(format!("unknown event kind `{other}`")),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Event {
    pub step: u64,
    /// Scenario id of the agent the event belongs to.
    pub agent: usize,
    pub kind: EventKind,
}

/// Periodic snapshot of the closed loop.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub step: u64,
    pub x: Vec<Vec2<f64>>,
    /// Distances of all pairs `i < j` in lexicographic order.
    pub dists: Vec<f64>,
    pub v: f64,
    /// `−Σ‖u_i‖²` at the sampled state.
    pub vdot: f64,
    /// Allowed increase of V accumulated since the previous sample.
    pub vtol: f64,
    pub u_norms: Vec<f64>,
}

/// Everything a run records.
#[derive(Clone, Debug, PartialEq)]
pub struct EventTrace {
    pub ids: Vec<usize>,
    pub dt: f64,
    pub events: Vec<Event>,
    pub samples: Vec<Sample>,
}

/// Index of pair `(i, j)`, `i < j`, in [`Sample::dists`].
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SimError + '_ {
    move |source| SimError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn csv_err(path: &Path, e: csv::Error) -> SimError {
    let line = e.position().map_or(0, |p| p.line() as usize);
    SimError::MalformedTrace {
        file: path.display().to_string(),
        line,
        message: e.to_string(),
    }
}

impl EventTrace {
    pub fn new(ids: Vec<usize>, dt: f64) -> Self {
        EventTrace {
            ids,
            dt,
            events: Vec::new(),
            samples: Vec::new(),
        }
    }

    pub fn time(&self, step: u64) -> f64 {
        step as f64 * self.dt
    }

    pub fn events_of<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Event> + 'a {
        self.events.iter().filter(move |e| e.kind.name() == name)
    }

    pub fn samples_header(&self) -> Vec<String> {
        let mut h = vec!["step".to_string(), "t".to_string()];
        for id in &self.ids {
            h.push(format!("x_{id}"));
            h.push(format!("y_{id}"));
        }
        for (a, i) in self.ids.iter().enumerate() {
            for j in &self.ids[a + 1..] {
                h.push(format!("d_{i}_{j}"));
            }
        }
        h.extend(["V", "vdot", "vtol"].map(String::from));
        h.extend(self.ids.iter().map(|id| format!("u_{id}")));
        h
    }

    pub fn write_events<W: Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["step", "t", "kind", "agent", "payload"])?;
        for e in &self.events {
            out.write_record([
                e.step.to_string(),
                format!("{:.6}", self.time(e.step)),
                e.kind.name().to_string(),
                e.agent.to_string(),
                e.kind.payload(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_samples<W: Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(self.samples_header())?;
        for s in &self.samples {
            let mut rec = vec![s.step.to_string(), format!("{:.6}", self.time(s.step))];
            for p in &s.x {
                rec.push(p.x.to_string());
                rec.push(p.y.to_string());
            }
            rec.extend(s.dists.iter().map(f64::to_string));
            rec.push(s.v.to_string());
            rec.push(s.vdot.to_string());
            rec.push(s.vtol.to_string());
            rec.extend(s.u_norms.iter().map(f64::to_string));
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Writes `events.csv` and `samples.csv` into `dir`, creating it.
    pub fn write_dir(&self, dir: &Path) -> Result<(), SimError> {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        let ev = dir.join("events.csv");
        let f = File::create(&ev).map_err(io_err(&ev))?;
        self.write_events(BufWriter::new(f)).map_err(|e| csv_err(&ev, e))?;
        let sp = dir.join("samples.csv");
        let f = File::create(&sp).map_err(io_err(&sp))?;
        self.write_samples(BufWriter::new(f)).map_err(|e| csv_err(&sp, e))?;
        Ok(())
    }

    /// Reads a trace written by [`EventTrace::write_dir`]. `ids` are the
    /// scenario's agent ids and must match the sample columns.
    pub fn read_dir(dir: &Path, ids: &[usize], dt: f64) -> Result<Self, SimError> {
        let mut trace = EventTrace::new(ids.to_vec(), dt);
        let ev = dir.join("events.csv");
        let malformed = |path: &Path, line: usize, message: String| SimError::MalformedTrace {
            file: path.display().to_string(),
            line,
            message,
        };

        let f = File::open(&ev).map_err(io_err(&ev))?;
        let mut rd = csv::Reader::from_reader(f);
        let header = rd.headers().map_err(|e| csv_err(&ev, e))?.clone();
        if header.iter().collect::<Vec<_>>() != ["step", "t", "kind", "agent", "payload"] {
            return Err(malformed(&ev, 1, "unexpected header".into()));
        }
        for (k, rec) in rd.records().enumerate() {
            let line = k + 2;
            let rec = rec.map_err(|e| csv_err(&ev, e))?;
            let step = rec[0]
                .parse()
                .map_err(|_| malformed(&ev, line, format!("bad step `{}`", &rec[0])))?;
            let agent: usize = rec[3]
                .parse()
                .map_err(|_| malformed(&ev, line, format!("bad agent `{}`", &rec[3])))?;
            if !ids.contains(&agent) {
                return Err(malformed(&ev, line, format!("unknown agent {agent}")));
            }
            let kind = EventKind::parse(&rec[2], &rec[4]).map_err(|m| malformed(&ev, line, m))?;
            trace.events.push(Event { step, agent, kind });
        }

        let sp = dir.join("samples.csv");
        let f = File::open(&sp).map_err(io_err(&sp))?;
        let mut rd = csv::Reader::from_reader(f);
        let header = rd.headers().map_err(|e| csv_err(&sp, e))?.clone();
        if header.iter().collect::<Vec<_>>() != trace.samples_header() {
            return Err(malformed(&sp, 1, "columns do not match the scenario".into()));
        }
        let n = ids.len();
        let pairs = n * n.saturating_sub(1) / 2;
        for (k, rec) in rd.records().enumerate() {
            let line = k + 2;
            let rec = rec.map_err(|e| csv_err(&sp, e))?;
            let vals: Vec<f64> = rec
                .iter()
                .map(|v| v.parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| malformed(&sp, line, "non-numeric field".into()))?;
            let step = rec[0]
                .parse()
                .map_err(|_| malformed(&sp, line, format!("bad step `{}`", &rec[0])))?;
            let mut at = 2;
            let mut take = |m: usize| {
                let s = vals[at..at + m].to_vec();
                at += m;
                s
            };
            let xs = take(2 * n);
            let dists = take(pairs);
            let vv = take(3);
            let u_norms = take(n);
            trace.samples.push(Sample {
                step,
                x: xs.chunks(2).map(|c| Vec2::new(c[0], c[1])).collect(),
                dists,
                v: vv[0],
                vdot: vv[1],
                vtol: vv[2],
                u_norms,
            });
        }
        Ok(trace)
    }
}

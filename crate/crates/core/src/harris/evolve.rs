use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::noise::NoiseStream;
use super::rule::UpdateRule;
use crate::error::{Error, Result};
use crate::lattice::{Spin, SpinConfig};

/// A processed ring. Recorded even when the spin does not change.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UpdateEvent {
    pub time: f64,
    pub site: usize,
    pub old: Spin,
    pub new: Spin,
    /// Neighbor sum seen by the update.
    pub field: i8,
    pub mark: f64,
}

impl UpdateEvent {
    pub fn changed(&self) -> bool {
        self.old != self.new
    }
}

/// Initial configuration plus the time-ordered update events on `[0, horizon]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    initial: SpinConfig,
    events: Vec<UpdateEvent>,
    horizon: f64,
}

/// Runs every ring of `noise` in global time order. At a ring with mark `U`
/// the site becomes `+1` iff `U < p(h)`.
pub fn evolve(initial: &SpinConfig, noise: &NoiseStream, rule: &UpdateRule) -> Result<Trajectory> {
    if noise.side() != initial.side() {
        return Err(Error::NoiseMismatch {
            noise: noise.side(),
            config: initial.side(),
        });
    }
    let rings = noise.merged();
    for w in rings.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::TieDetected {
                time: w[0].0,
                first: w[0].1,
                second: w[1].1,
            });
        }
    }
    let mut state = initial.clone();
    let mut events = Vec::with_capacity(rings.len());
    for (time, site, mark) in rings {
        let h = state.neighbor_sum(site);
        let p = rule.prob(h);
        if mark == p {
            return Err(Error::MarkBoundary { time, site });
        }
        let old = state.get_index(site);
        let new = if mark < p { 1 } else { -1 };
        state.set_index(site, new);
        events.push(UpdateEvent {
            time,
            site,
            old,
            new,
            field: h as i8,
            mark,
        });
    }
    Ok(Trajectory {
        initial: initial.clone(),
        events,
        horizon: noise.horizon(),
    })
}

#[derive(Serialize, Deserialize)]
struct EventRow {
    time: f64,
    site_x: usize,
    site_y: usize,
    old: Spin,
    new: Spin,
    h: i8,
    mark: f64,
}

impl Trajectory {
    /// Assembles a trajectory from recorded parts, checking time order and
    /// that every event's `old` spin matches the replayed state.
    pub fn from_parts(initial: SpinConfig, events: Vec<UpdateEvent>, horizon: f64) -> Result<Self> {
        let traj = Trajectory {
            initial,
            events,
            horizon,
        };
        traj.validate()?;
        Ok(traj)
    }

    pub fn validate(&self) -> Result<()> {
        let n2 = self.initial.len();
        let mut state = self.initial.clone();
        let mut last = 0.0f64;
        for (k, e) in self.events.iter().enumerate() {
            if e.site >= n2 {
                return Err(Error::InvalidNoise(format!("event {k}: site {} out of range", e.site)));
            }
            if !(e.time > last) || e.time > self.horizon {
                return Err(Error::InvalidNoise(format!("event {k}: time {} out of order", e.time)));
            }
            if state.get_index(e.site) != e.old || (e.new != 1 && e.new != -1) {
                return Err(Error::InvalidNoise(format!("event {k}: replay mismatch")));
            }
            state.set_index(e.site, e.new);
            last = e.time;
        }
        Ok(())
    }

    pub fn initial(&self) -> &SpinConfig {
        &self.initial
    }

    pub fn events(&self) -> &[UpdateEvent] {
        &self.events
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn side(&self) -> usize {
        self.initial.side()
    }

    pub fn replay(&self) -> Replay<'_> {
        Replay {
            events: &self.events,
            state: self.initial.clone(),
            next: 0,
        }
    }

    /// Right-continuous state at time `t`.
    pub fn state_at(&self, t: f64) -> SpinConfig {
        let mut r = self.replay();
        r.advance_to(t);
        r.into_state()
    }

    pub fn final_state(&self) -> SpinConfig {
        self.state_at(f64::INFINITY)
    }

    pub fn write_event_log<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for e in &self.events {
            let (x, y) = self.initial.coords(e.site);
            w.serialize(EventRow {
                time: e.time,
                site_x: x,
                site_y: y,
                old: e.old,
                new: e.new,
                h: e.field,
                mark: e.mark,
            })?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_event_log<R: Read>(initial: SpinConfig, horizon: f64, reader: R) -> Result<Self> {
        let side = initial.side();
        let mut events = Vec::new();
        for row in csv::Reader::from_reader(reader).deserialize() {
            let row: EventRow = row?;
            if row.site_x >= side || row.site_y >= side {
                return Err(Error::Parse(format!("site ({}, {}) off the torus", row.site_x, row.site_y)));
            }
            events.push(UpdateEvent {
                time: row.time,
                site: row.site_y * side + row.site_x,
                old: row.old,
                new: row.new,
                field: row.h,
                mark: row.mark,
            });
        }
        Trajectory::from_parts(initial, events, horizon)
    }
}

/// Forward cursor over a trajectory's states.
pub struct Replay<'a> {
    events: &'a [UpdateEvent],
    state: SpinConfig,
    next: usize,
}

impl<'a> Replay<'a> {
    pub fn state(&self) -> &SpinConfig {
        &self.state
    }

    pub fn into_state(self) -> SpinConfig {
        self.state
    }

    /// Applies every pending event with time `<= t`.
    pub fn advance_to(&mut self, t: f64) -> &SpinConfig {
        while let Some(e) = self.events.get(self.next) {
            if e.time > t {
                break;
            }
            self.state.set_index(e.site, e.new);
            self.next += 1;
        }
        &self.state
    }

    /// Applies the next event and returns it with the resulting state.
    pub fn step(&mut self) -> Option<(&'a UpdateEvent, &SpinConfig)> {
        let e = self.events.get(self.next)?;
        self.state.set_index(e.site, e.new);
        self.next += 1;
        Some((e, &self.state))
    }
}

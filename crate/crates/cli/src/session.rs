//! Interactive play sessions and their append-only log.
//!
//! A session owns a seeded generator, so its sequence of deals is fixed by
//! the seed. Each decided play is logged as one JSON line carrying the
//! session configuration; replaying the lines re-deals every play, checks it
//! against the record and re-applies the decision.

use std::collections::BTreeMap;
use std::io::BufRead;

use envlab_core::benefit::{expected_benefit, strategy, Bounds, Decision};
use envlab_core::density::{Density, DensitySpec};
use envlab_core::host::{run_play, Play, Process};
use envlab_core::rng::{host_rng, HostRng};
use envlab_core::Error;
use serde::{Deserialize, Serialize};

use crate::api::DensityArg;
use crate::error::{AppError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Switch,
    Stay,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub density: DensitySpec,
    pub process: Process,
    pub seed: u64,
    #[serde(default)]
    pub blind: bool,
    #[serde(default)]
    pub coach: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_l: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_u: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSessionRequest {
    pub density: DensityArg,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub process: Process,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub blind: bool,
    #[serde(default)]
    pub coach: bool,
    #[serde(default)]
    pub x_l: Option<f64>,
    #[serde(default)]
    pub x_u: Option<f64>,
}

impl CreateSessionRequest {
    pub fn into_config(self, default_seed: u64) -> Result<SessionConfig> {
        let density = self.density.resolve(&self.params)?;
        Ok(SessionConfig {
            density: density.to_spec(),
            process: self.process,
            seed: self.seed.unwrap_or(default_seed),
            blind: self.blind,
            coach: self.coach,
            x_l: self.x_l,
            x_u: self.x_u,
        })
    }
}

/// The analytic advice for an observed amount.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub decision: Decision,
    pub expected_benefit: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecidedPlay {
    pub play_index: usize,
    pub play: Play,
    pub action: Action,
    pub realized_gain: f64,
    pub recommendation: Recommendation,
}

/// Cumulative gains of the player and the three reference strategies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Totals {
    pub plays: usize,
    pub user: f64,
    pub always_switch: f64,
    pub never_switch: f64,
    pub analytic_optimal: f64,
}

impl Totals {
    pub fn from_plays(plays: &[DecidedPlay]) -> Self {
        plays.iter().fold(Totals::default(), |mut t, p| {
            t.plays += 1;
            t.user += p.realized_gain;
            t.always_switch += p.play.b;
            if p.recommendation.decision == Decision::Switch {
                t.analytic_optimal += p.play.b;
            }
            t
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DealView {
    pub play_index: usize,
    /// Hidden in blind sessions.
    pub y: Option<f64>,
    /// Present in coach sessions that are not blind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recommendation: Option<Recommendation>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecideRequest {
    pub play_index: usize,
    pub action: Action,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecideView {
    pub play_index: usize,
    pub action: Action,
    pub y: f64,
    pub z: f64,
    pub b: f64,
    pub realized_gain: f64,
    pub recommendation: Recommendation,
    pub totals: Totals,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoryView {
    pub id: String,
    pub config: SessionConfig,
    pub plays: Vec<DecidedPlay>,
    pub pending_play: Option<usize>,
    pub totals: Totals,
}

/// One line of the session log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogRecord {
    pub session: String,
    pub config: SessionConfig,
    pub play_index: usize,
    pub play: Play,
    pub action: Action,
    pub realized_gain: f64,
}

pub struct Session {
    id: String,
    config: SessionConfig,
    density: Density,
    bounds: Bounds,
    rng: HostRng,
    pending: Option<Play>,
    plays: Vec<DecidedPlay>,
}

impl Session {
    pub fn new(id: String, config: SessionConfig) -> Result<Self> {
        let density = config.density.build()?;
        if !density.is_proper() || !density.can_sample() {
            return Err(Error::ImproperDensityUnsampleable(density.name().to_string()).into());
        }
        let bounds = Bounds::new(config.x_l, config.x_u)?;
        Ok(Session {
            rng: host_rng(config.seed),
            id,
            config,
            density,
            bounds,
            pending: None,
            plays: Vec::new(),
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn totals(&self) -> Totals {
        Totals::from_plays(&self.plays)
    }

    /// The bounded strategy when `y` lies within the bounds, otherwise the
    /// plain expected benefit.
    pub fn recommend(&self, y: f64) -> Recommendation {
        match strategy(&self.density, self.config.process, &self.bounds, y) {
            Ok(s) => Recommendation {
                decision: s.decision,
                expected_benefit: s.value,
            },
            Err(_) => {
                let r = expected_benefit(&self.density, self.config.process, y);
                Recommendation {
                    decision: r.decision,
                    expected_benefit: r.expected_benefit,
                }
            }
        }
    }

    pub fn deal(&mut self) -> Result<DealView> {
        if self.pending.is_some() {
            return Err(AppError::Conflict(format!(
                "play {} is awaiting a decision",
                self.plays.len()
            )));
        }
        let play = run_play(&self.density, self.config.process, &mut self.rng)?;
        self.pending = Some(play);
        let shown = !self.config.blind;
        Ok(DealView {
            play_index: self.plays.len(),
            y: shown.then_some(play.y),
            recommendation: (shown && self.config.coach).then(|| self.recommend(play.y)),
        })
    }

    /// Record the decision on the pending play; returns the view and the log line.
    pub fn decide(&mut self, req: &DecideRequest) -> Result<(DecideView, LogRecord)> {
        let Some(play) = self.pending else {
            return Err(AppError::Conflict("no play is awaiting a decision".into()));
        };
        let play_index = self.plays.len();
        if req.play_index != play_index {
            return Err(AppError::Conflict(format!(
                "play {} is awaiting a decision, not {}",
                play_index, req.play_index
            )));
        }
        let realized_gain = match req.action {
            Action::Switch => play.b,
            Action::Stay => 0.0,
        };
        let recommendation = self.recommend(play.y);
        self.pending = None;
        self.plays.push(DecidedPlay {
            play_index,
            play,
            action: req.action,
            realized_gain,
            recommendation,
        });
        let view = DecideView {
            play_index,
            action: req.action,
            y: play.y,
            z: play.z,
            b: play.b,
            realized_gain,
            recommendation,
            totals: self.totals(),
        };
        let record = LogRecord {
            session: self.id.clone(),
            config: self.config.clone(),
            play_index,
            play,
            action: req.action,
            realized_gain,
        };
        Ok((view, record))
    }

    pub fn history(&self) -> HistoryView {
        HistoryView {
            id: self.id.clone(),
            config: self.config.clone(),
            plays: self.plays.clone(),
            pending_play: self.pending.map(|_| self.plays.len()),
            totals: self.totals(),
        }
    }

    fn apply(&mut self, record: &LogRecord) -> Result<()> {
        let mismatch = |what: &str| {
            AppError::Replay(format!(
                "session {} play {}: {what}",
                record.session, record.play_index
            ))
        };
        if record.config != self.config {
            return Err(mismatch("configuration changed"));
        }
        if record.play_index != self.plays.len() {
            return Err(mismatch("out of order"));
        }
        self.deal()?;
        if self.pending != Some(record.play) {
            return Err(mismatch("re-dealt play differs from the log"));
        }
        let (view, _) = self.decide(&DecideRequest {
            play_index: record.play_index,
            action: record.action,
        })?;
        if view.realized_gain != record.realized_gain {
            return Err(mismatch("realized gain differs from the log"));
        }
        Ok(())
    }
}

/// Rebuild sessions from log lines. Blank lines are skipped.
pub fn replay<R: BufRead>(reader: R) -> Result<BTreeMap<String, Session>> {
    let mut sessions: BTreeMap<String, Session> = BTreeMap::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: LogRecord = serde_json::from_str(&line)
            .map_err(|e| AppError::Replay(format!("line {}: {e}", n + 1)))?;
        if !sessions.contains_key(&record.session) {
            let session = Session::new(record.session.clone(), record.config.clone())?;
            sessions.insert(record.session.clone(), session);
        }
        sessions
            .get_mut(&record.session)
            .expect("inserted above")
            .apply(&record)?;
    }
    Ok(sessions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use envlab_core::density::DensityKind;

    fn config(seed: u64) -> SessionConfig {
        SessionConfig {
            density: DensitySpec::catalog("uniform01", DensityKind::Continuous),
            process: Process::HalveOrDouble,
            seed,
            blind: false,
            coach: true,
            x_l: None,
            x_u: None,
        }
    }

    #[test]
    fn deal_then_decide() {
        let mut s = Session::new("a".into(), config(1)).unwrap();
        let deal = s.deal().unwrap();
        assert_eq!(deal.play_index, 0);
        assert!(deal.y.is_some() && deal.recommendation.is_some());
        assert!(matches!(s.deal(), Err(AppError::Conflict(_))));
        let wrong = DecideRequest { play_index: 3, action: Action::Stay };
        assert!(matches!(s.decide(&wrong), Err(AppError::Conflict(_))));
        let (view, record) = s.decide(&DecideRequest { play_index: 0, action: Action::Switch }).unwrap();
        assert_eq!(view.realized_gain, view.b);
        assert_eq!(view.b, view.z - view.y);
        assert_eq!(record.play_index, 0);
        assert!(matches!(
            s.decide(&DecideRequest { play_index: 1, action: Action::Stay }),
            Err(AppError::Conflict(_))
        ));
    }

    #[test]
    fn blind_hides_amount() {
        let mut c = config(1);
        c.blind = true;
        let mut s = Session::new("b".into(), c).unwrap();
        let deal = s.deal().unwrap();
        assert_eq!(deal.y, None);
        assert_eq!(deal.recommendation, None);
    }

    #[test]
    fn improper_density_is_refused() {
        let mut c = config(1);
        c.density = DensitySpec::catalog("improper_exp", DensityKind::Continuous);
        assert!(Session::new("c".into(), c).is_err());
    }

    #[test]
    fn replay_reproduces_totals() {
        let mut s = Session::new("r".into(), config(42)).unwrap();
        let mut log = String::new();
        for i in 0..50 {
            s.deal().unwrap();
            let action = if i % 3 == 0 { Action::Stay } else { Action::Switch };
            let (_, record) = s.decide(&DecideRequest { play_index: i, action }).unwrap();
            log.push_str(&serde_json::to_string(&record).unwrap());
            log.push('\n');
        }
        let rebuilt = replay(log.as_bytes()).unwrap();
        assert_eq!(rebuilt["r"].history(), s.history());

        let tampered = log.replacen("\"action\":\"stay\"", "\"action\":\"switch\"", 1);
        assert!(replay(tampered.as_bytes()).is_err());
    }
}

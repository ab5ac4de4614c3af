//! Newline-delimited JSON protocol exposing the game to external trainers.
//!
//! One request per line, one response per line. Every response carries
//! `proto_version`. Requests:
//!
//! ```text
//! {"cmd":"spec"}                  action count, observation length, config
//! {"cmd":"reset"}                 observation and mask of a fresh episode
//! {"cmd":"step","action":12}      observation, reward, done, mask
//! {"cmd":"replay","script":[..]}  play a move script to the end and score it
//! {"cmd":"replay","actions":[..]} same, from action indices
//! ```
//!
//! Failures come back as `{"error":"<kind>",...}` and leave the session
//! state unchanged. The game is deterministic, so a session transcript
//! replays byte for byte.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::game::{Game, GameConfig, GameState, LedgerEntry, StructuredObservation, TerminalEval};
use crate::script::Move;

pub const PROTO_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(tag = "cmd", rename_all = "snake_case", deny_unknown_fields)]
enum Request {
    Spec,
    Reset,
    Step {
        action: usize,
    },
    Replay {
        #[serde(default)]
        script: Option<Vec<Move>>,
        #[serde(default)]
        actions: Option<Vec<usize>>,
    },
}

#[derive(Serialize)]
struct Observation {
    flat: Vec<u32>,
    structured: StructuredObservation,
}

#[derive(Serialize)]
struct SpecResponse<'a> {
    proto_version: u32,
    action_count: usize,
    observation_len: usize,
    leg_slots: usize,
    reference_p_norm: Option<f64>,
    config: &'a GameConfig,
}

#[derive(Serialize)]
struct ResetResponse {
    proto_version: u32,
    observation: Observation,
    mask: Vec<u8>,
}

#[derive(Serialize)]
struct StepResponse {
    proto_version: u32,
    observation: Observation,
    reward: f64,
    done: bool,
    cumulative_reward: f64,
    mask: Vec<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    final_reward: Option<f64>,
}

#[derive(Serialize)]
struct ReplayResponse {
    proto_version: u32,
    #[serde(rename = "return")]
    ret: f64,
    final_reward: Option<f64>,
    code: TerminalEval,
    ledger: Vec<LedgerEntry>,
}

/// One protocol session: a game and the current episode, if any.
pub struct Session {
    game: Game,
    state: Option<GameState>,
}

impl Session {
    pub fn new(config: GameConfig) -> Result<Self> {
        Ok(Session {
            game: Game::new(config)?,
            state: None,
        })
    }

    pub fn from_game(game: Game) -> Self {
        Session { game, state: None }
    }

    pub fn game(&self) -> &Game {
        &self.game
    }

    pub fn state(&self) -> Option<&GameState> {
        self.state.as_ref()
    }

    fn observation(&self, s: &GameState) -> Observation {
        Observation {
            flat: self.game.flat_observation(s),
            structured: self.game.structured_observation(s),
        }
    }

    fn mask(&self, s: &GameState) -> Vec<u8> {
        self.game.legal_mask(s).into_iter().map(u8::from).collect()
    }

    /// Handle one request line and return the response line (no newline).
    pub fn handle(&mut self, line: &str) -> String {
        let value = match self.dispatch(line) {
            Ok(v) => v,
            Err(v) => v,
        };
        serde_json::to_string(&value).expect("response serializes")
    }

    fn dispatch(&mut self, line: &str) -> std::result::Result<Value, Value> {
        let req: Request = serde_json::from_str(line).map_err(|e| {
            error_value("malformed_request", json!({ "detail": e.to_string() }))
        })?;
        let v = match req {
            Request::Spec => serde_json::to_value(SpecResponse {
                proto_version: PROTO_VERSION,
                action_count: self.game.action_count(),
                observation_len: self.game.observation_len(),
                leg_slots: self.game.leg_slots(),
                reference_p_norm: self.game.reference_p_norm(),
                config: self.game.config(),
            }),
            Request::Reset => {
                let s = self.game.reset();
                let resp = ResetResponse {
                    proto_version: PROTO_VERSION,
                    observation: self.observation(&s),
                    mask: self.mask(&s),
                };
                self.state = Some(s);
                serde_json::to_value(resp)
            }
            Request::Step { action } => {
                let s = self
                    .state
                    .as_ref()
                    .ok_or_else(|| error_value("no_episode", json!({})))?;
                let o = self.game.step(s, action).map_err(|e| match e {
                    Error::IllegalAction(a) => error_value("illegal_action", json!({ "action": a })),
                    Error::EpisodeDone => error_value("episode_done", json!({})),
                    other => error_value("internal", json!({ "detail": other.to_string() })),
                })?;
                let resp = StepResponse {
                    proto_version: PROTO_VERSION,
                    observation: self.observation(&o.state),
                    reward: o.reward,
                    done: o.done,
                    cumulative_reward: o.state.cumulative_reward,
                    mask: self.mask(&o.state),
                    final_reward: o.state.ledger.last().and_then(|e| e.final_reward),
                };
                self.state = Some(o.state);
                serde_json::to_value(resp)
            }
            Request::Replay { script, actions } => {
                let played = match (script, actions) {
                    (Some(moves), None) => self.game.replay_moves(&moves),
                    (None, Some(actions)) => self.game.replay(&actions).and_then(|s| {
                        if s.done {
                            Ok(s)
                        } else {
                            Ok(self.game.step(&s, self.game.terminate_index())?.state)
                        }
                    }),
                    _ => {
                        return Err(error_value(
                            "malformed_request",
                            json!({ "detail": "replay takes exactly one of script, actions" }),
                        ))
                    }
                };
                let s = played.map_err(|e| match e {
                    Error::IllegalAction(a) => error_value("illegal_action", json!({ "action": a })),
                    other => error_value("invalid_script", json!({ "detail": other.to_string() })),
                })?;
                serde_json::to_value(ReplayResponse {
                    proto_version: PROTO_VERSION,
                    ret: s.cumulative_reward,
                    final_reward: s.final_reward(),
                    code: self.game.evaluate(&s),
                    ledger: s.ledger,
                })
            }
        };
        Ok(v.expect("response serializes"))
    }
}

fn error_value(kind: &str, extra: Value) -> Value {
    let mut v = json!({ "proto_version": PROTO_VERSION, "error": kind });
    if let (Some(obj), Value::Object(more)) = (v.as_object_mut(), extra) {
        obj.extend(more);
    }
    v
}

/// Run the request loop until end of input. Blank lines are ignored.
pub fn serve<R: BufRead, W: Write>(session: &mut Session, input: R, mut output: W) -> Result<()> {
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let resp = session.handle(&line);
        output.write_all(resp.as_bytes())?;
        output.write_all(b"\n")?;
        output.flush()?;
    }
    Ok(())
}

/// Accept one TCP connection on `addr` and serve it.
pub fn serve_tcp(session: &mut Session, addr: &str) -> Result<()> {
    let listener = std::net::TcpListener::bind(addr)?;
    let (stream, _) = listener.accept()?;
    let reader = std::io::BufReader::new(stream.try_clone()?);
    serve(session, reader, stream)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn session() -> Session {
        Session::new(GameConfig::distance(2, 6)).unwrap()
    }

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn spec_of_defaults() {
        let mut s = Session::new(GameConfig::default()).unwrap();
        let v = parse(&s.handle(r#"{"cmd":"spec"}"#));
        assert_eq!(v["action_count"], 863);
        assert_eq!(v["proto_version"], 1);
        let v = parse(&s.handle(r#"{"cmd":"reset"}"#));
        let legal = v["mask"].as_array().unwrap().iter().filter(|m| m == &&json!(1)).count();
        assert_eq!(legal, 12);
    }

    #[test]
    fn errors_leave_state_alone() {
        let mut s = session();
        assert_eq!(parse(&s.handle(r#"{"cmd":"step","action":0}"#))["error"], "no_episode");
        s.handle(r#"{"cmd":"reset"}"#);
        let before = s.state().unwrap().key();
        assert_eq!(parse(&s.handle(r#"{"cmd":"step","action":1}"#))["error"], "illegal_action");
        assert_eq!(parse(&s.handle("not json"))["error"], "malformed_request");
        assert_eq!(parse(&s.handle(r#"{"cmd":"fly"}"#))["error"], "malformed_request");
        assert_eq!(s.state().unwrap().key(), before);
        let v = parse(&s.handle(r#"{"cmd":"step","action":0}"#));
        assert!((v["reward"].as_f64().unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn replay_steane() {
        let mut s = session();
        let v = parse(&s.handle(
            r#"{"cmd":"replay","script":[{"op":"add","lego":"T6"},{"op":"add","lego":"T6"},{"op":"contract","a":3,"b":7},{"op":"contract","a":6,"b":8},{"op":"logical","leg":1}]}"#,
        ));
        assert_eq!(v["code"]["n"], 7);
        assert_eq!(v["code"]["d"], 3);
        assert_eq!(v["final_reward"], 3.0);
    }
}

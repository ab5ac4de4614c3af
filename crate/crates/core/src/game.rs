//! The construction game as a deterministic MDP with action masking.
//!
//! An episode starts from a single lego whose first leg is the logical leg.
//! Each step adds a lego, contracts two free legs, or terminates. On
//! termination, or when the action cap is hit, the network is read as a
//! `k = 1` code with leg 1 as input and scored by the objective.
//!
//! Action indices for a config with `L` lego types and `R = max_legos ·
//! max_legs` leg slots:
//!
//! | range | action |
//! |---|---|
//! | `0..L` | add lego type `t` |
//! | `L..L + R(R-1)/2` | contract `(a, b)`, `1 <= a < b <= R`, lexicographic |
//! | `L + R(R-1)/2` | terminate |

use std::collections::HashMap;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::code::StabilizerCode;
use crate::codelib;
use crate::enumerator::{EnumConfig, Enumerators, NoiseModel, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::lego::{Lego, TensorNetwork};
use crate::parallel::Parallelism;
use crate::script::Move;

/// The logical leg; never contractible.
pub const LOGICAL_LEG: usize = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rewards {
    pub add: f64,
    pub contraction: f64,
    pub terminate: f64,
    pub self_contraction: f64,
}

impl Default for Rewards {
    fn default() -> Self {
        Rewards {
            add: 0.1,
            contraction: 0.05,
            terminate: 0.15,
            self_contraction: -0.1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Objective {
    /// Final reward is the code distance.
    DistanceMax,
    /// Final reward is `-ln(p_L_norm / reference)`. A missing reference is
    /// filled with the `[[19,1,5]]` color code's value at `noise`.
    BiasedNoise {
        noise: NoiseModel,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        reference_p_norm: Option<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GameConfig {
    pub lego_set: Vec<String>,
    pub max_legos: usize,
    pub max_actions: usize,
    pub rewards: Rewards,
    pub objective: Objective,
    pub invalid_code_penalty: f64,
    /// Cap on `n - k` for terminal code evaluation.
    pub enum_cap: usize,
}

impl Default for GameConfig {
    fn default() -> Self {
        GameConfig {
            lego_set: vec!["T6".into()],
            max_legos: 7,
            max_actions: 20,
            rewards: Rewards::default(),
            objective: Objective::BiasedNoise {
                noise: NoiseModel { p_x: 0.01, p_z: 0.05 },
                reference_p_norm: None,
            },
            invalid_code_penalty: -1.0,
            enum_cap: DEFAULT_CAP,
        }
    }
}

impl GameConfig {
    pub fn distance(max_legos: usize, max_actions: usize) -> Self {
        GameConfig {
            max_legos,
            max_actions,
            objective: Objective::DistanceMax,
            ..Default::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Action {
    AddLego { lego: usize },
    Contract { a: usize, b: usize },
    Terminate,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub action: usize,
    pub shaping: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_reward: Option<f64>,
    pub reward: f64,
}

/// Canonical state identity: lego types in insertion order and the edge set
/// with each edge as `(min, max)`, sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StateKey {
    pub legos: Vec<u8>,
    pub edges: Vec<(u16, u16)>,
}

#[derive(Clone, Debug)]
pub struct GameState {
    /// Lego type index per placed lego.
    pub legos: Vec<usize>,
    /// Edges in the order played.
    pub edges: Vec<(usize, usize)>,
    pub actions_taken: usize,
    pub done: bool,
    pub cumulative_reward: f64,
    pub ledger: Vec<LedgerEntry>,
    used: Vec<bool>,
}

impl GameState {
    pub fn num_legs(&self) -> usize {
        self.used.len()
    }

    pub fn is_free(&self, leg: usize) -> bool {
        leg >= 1 && leg <= self.used.len() && !self.used[leg - 1]
    }

    pub fn dangling(&self) -> Vec<usize> {
        (1..=self.used.len()).filter(|&l| !self.used[l - 1]).collect()
    }

    pub fn key(&self) -> StateKey {
        let mut edges: Vec<(u16, u16)> = self
            .edges
            .iter()
            .map(|&(a, b)| (a.min(b) as u16, a.max(b) as u16))
            .collect();
        edges.sort_unstable();
        StateKey {
            legos: self.legos.iter().map(|&t| t as u8).collect(),
            edges,
        }
    }

    /// Sum of the ledger; equals `cumulative_reward` up to rounding order.
    pub fn ledger_total(&self) -> f64 {
        self.ledger.iter().map(|e| e.reward).sum()
    }

    pub fn shaping_total(&self) -> f64 {
        self.ledger.iter().map(|e| e.shaping).sum()
    }

    pub fn final_reward(&self) -> Option<f64> {
        self.ledger.last().and_then(|e| e.final_reward)
    }
}

#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub state: GameState,
    pub reward: f64,
    pub done: bool,
}

/// Evaluation of a terminal network.
#[derive(Clone, Debug, Serialize)]
pub struct TerminalEval {
    pub reward: f64,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub d: Option<usize>,
    pub p_l: Option<f64>,
    pub p_l_norm: Option<f64>,
    /// Why the penalty was applied, if it was.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub penalty_reason: Option<String>,
}

/// A validated config with its action layout and lego prototypes.
pub struct Game {
    config: GameConfig,
    legos: Vec<Lego>,
    max_legs: usize,
    reference_p_norm: Option<f64>,
    enum_cfg: EnumConfig,
    cache: Mutex<HashMap<StateKey, TerminalEval>>,
}

impl std::fmt::Debug for Game {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Game").field("config", &self.config).finish()
    }
}

impl Clone for Game {
    fn clone(&self) -> Self {
        Game {
            config: self.config.clone(),
            legos: self.legos.clone(),
            max_legs: self.max_legs,
            reference_p_norm: self.reference_p_norm,
            enum_cfg: self.enum_cfg,
            cache: Mutex::new(self.cache.lock().unwrap().clone()),
        }
    }
}

impl Game {
    pub fn new(config: GameConfig) -> Result<Game> {
        if config.max_legos == 0 || config.max_actions == 0 {
            return Err(Error::InvalidConfig("max_legos and max_actions must be >= 1".into()));
        }
        if config.lego_set.is_empty() || config.lego_set.len() > u8::MAX as usize {
            return Err(Error::InvalidConfig("lego_set must list 1..=255 legos".into()));
        }
        let r = &config.rewards;
        let finite = [r.add, r.contraction, r.terminate, r.self_contraction, config.invalid_code_penalty];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("rewards must be finite".into()));
        }
        let legos = config
            .lego_set
            .iter()
            .map(|id| Lego::by_id(id))
            .collect::<Result<Vec<_>>>()?;
        let max_legs = legos.iter().map(Lego::num_legs).max().unwrap_or(0);
        if max_legos_legs(&config, max_legs) > u16::MAX as usize {
            return Err(Error::InvalidConfig("too many leg slots".into()));
        }
        let enum_cfg = EnumConfig {
            cap: config.enum_cap,
            parallelism: Parallelism::Sequential,
        };
        let reference_p_norm = match config.objective {
            Objective::DistanceMax => None,
            Objective::BiasedNoise {
                noise,
                reference_p_norm,
            } => {
                NoiseModel::new(noise.p_x, noise.p_z)?;
                let reference = match reference_p_norm {
                    Some(v) => v,
                    None => {
                        let color = codelib::builtin("color_19")?.code;
                        Enumerators::compute(&color, &EnumConfig::default())?
                            .error_rates(&noise)?
                            .p_l_norm
                    }
                };
                if !(reference.is_finite() && reference > 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "reference p_norm {reference} must be positive"
                    )));
                }
                Some(reference)
            }
        };
        Ok(Game {
            config,
            legos,
            max_legs,
            reference_p_norm,
            enum_cfg,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn config(&self) -> &GameConfig {
        &self.config
    }

    /// Most legs on any lego in the set.
    pub fn max_legs(&self) -> usize {
        self.max_legs
    }

    pub fn reference_p_norm(&self) -> Option<f64> {
        self.reference_p_norm
    }

    /// Number of global leg slots, `max_legos · max_legs`.
    pub fn leg_slots(&self) -> usize {
        max_legos_legs(&self.config, self.max_legs)
    }

    fn num_pairs(&self) -> usize {
        let r = self.leg_slots();
        r * (r.saturating_sub(1)) / 2
    }

    pub fn action_count(&self) -> usize {
        self.legos.len() + self.num_pairs() + 1
    }

    pub fn terminate_index(&self) -> usize {
        self.legos.len() + self.num_pairs()
    }

    pub fn index_of(&self, action: Action) -> Option<usize> {
        let r = self.leg_slots();
        match action {
            Action::AddLego { lego } => (lego < self.legos.len()).then_some(lego),
            Action::Contract { a, b } => {
                let (a, b) = (a.min(b), a.max(b));
                if a == 0 || a == b || b > r {
                    return None;
                }
                let before = (a - 1) * r - (a - 1) * a / 2;
                Some(self.legos.len() + before + (b - a - 1))
            }
            Action::Terminate => Some(self.terminate_index()),
        }
    }

    pub fn action(&self, index: usize) -> Option<Action> {
        let nl = self.legos.len();
        if index < nl {
            return Some(Action::AddLego { lego: index });
        }
        if index == self.terminate_index() {
            return Some(Action::Terminate);
        }
        if index > self.terminate_index() {
            return None;
        }
        let mut rest = index - nl;
        let r = self.leg_slots();
        for a in 1..r {
            let row = r - a;
            if rest < row {
                return Some(Action::Contract { a, b: a + 1 + rest });
            }
            rest -= row;
        }
        None
    }

    pub fn reset(&self) -> GameState {
        let first = &self.legos[0];
        GameState {
            legos: vec![0],
            edges: Vec::new(),
            actions_taken: 0,
            done: false,
            cumulative_reward: 0.0,
            ledger: Vec::new(),
            used: vec![false; first.num_legs()],
        }
    }

    pub fn is_legal(&self, state: &GameState, action: Action) -> bool {
        if state.done {
            return false;
        }
        match action {
            Action::AddLego { lego } => {
                lego < self.legos.len() && state.legos.len() < self.config.max_legos
            }
            Action::Contract { a, b } => {
                a != b
                    && a != LOGICAL_LEG
                    && b != LOGICAL_LEG
                    && state.is_free(a)
                    && state.is_free(b)
            }
            Action::Terminate => true,
        }
    }

    pub fn legal_mask(&self, state: &GameState) -> Vec<bool> {
        let mut mask = vec![false; self.action_count()];
        for i in self.legal_actions(state) {
            mask[i] = true;
        }
        mask
    }

    /// Legal action indices in increasing order.
    pub fn legal_actions(&self, state: &GameState) -> Vec<usize> {
        if state.done {
            return Vec::new();
        }
        let mut out = Vec::new();
        if state.legos.len() < self.config.max_legos {
            out.extend(0..self.legos.len());
        }
        let free: Vec<usize> = state
            .dangling()
            .into_iter()
            .filter(|&l| l != LOGICAL_LEG)
            .collect();
        for (i, &a) in free.iter().enumerate() {
            for &b in &free[i + 1..] {
                out.push(self.index_of(Action::Contract { a, b }).unwrap());
            }
        }
        out.push(self.terminate_index());
        out
    }

    fn connected(&self, state: &GameState, a: usize, b: usize) -> bool {
        let owner = |leg: usize| -> usize {
            let mut acc = 0;
            for (i, &t) in state.legos.iter().enumerate() {
                acc += self.legos[t].num_legs();
                if leg <= acc {
                    return i;
                }
            }
            unreachable!("leg {leg} has no owner")
        };
        let mut parent: Vec<usize> = (0..state.legos.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(u, v) in &state.edges {
            let (ru, rv) = (find(&mut parent, owner(u)), find(&mut parent, owner(v)));
            parent[ru] = rv;
        }
        let (ra, rb) = (owner(a), owner(b));
        find(&mut parent, ra) == find(&mut parent, rb)
    }

    /// Apply an action by index. Illegal actions are rejected, never scored.
    pub fn step(&self, state: &GameState, index: usize) -> Result<StepOutcome> {
        if state.done {
            return Err(Error::EpisodeDone);
        }
        let action = self.action(index).ok_or(Error::IllegalAction(index))?;
        if !self.is_legal(state, action) {
            return Err(Error::IllegalAction(index));
        }
        let mut next = state.clone();
        let rewards = &self.config.rewards;
        let shaping;
        let mut final_reward = None;
        match action {
            Action::AddLego { lego } => {
                let l = &self.legos[lego];
                next.legos.push(lego);
                next.used.extend(std::iter::repeat_n(false, l.num_legs()));
                shaping = rewards.add;
            }
            Action::Contract { a, b } => {
                shaping = if self.connected(state, a, b) {
                    rewards.self_contraction
                } else {
                    rewards.contraction
                };
                next.edges.push((a, b));
                next.used[a - 1] = true;
                next.used[b - 1] = true;
            }
            Action::Terminate => {
                shaping = rewards.terminate;
                next.done = true;
            }
        }
        next.actions_taken += 1;
        if next.actions_taken >= self.config.max_actions {
            next.done = true;
        }
        if next.done {
            final_reward = Some(self.evaluate(&next).reward);
        }
        let reward = shaping + final_reward.unwrap_or(0.0);
        next.cumulative_reward += reward;
        next.ledger.push(LedgerEntry {
            action: index,
            shaping,
            final_reward,
            reward,
        });
        let done = next.done;
        Ok(StepOutcome {
            state: next,
            reward,
            done,
        })
    }

    /// The glued network for `state`. Fails with `ContractionInconsistent`
    /// if a contraction projected onto the null state.
    pub fn network(&self, state: &GameState) -> Result<TensorNetwork> {
        let mut net = TensorNetwork::new();
        for &t in &state.legos {
            net.push_lego(self.legos[t].clone());
        }
        for &(a, b) in &state.edges {
            net.push_edge(a, b)?;
        }
        Ok(net)
    }

    /// Code read off the current network with leg 1 as the logical input.
    pub fn terminal_code(&self, state: &GameState) -> Result<StabilizerCode> {
        let net = self.network(state)?;
        let mut code = net.to_code(&[LOGICAL_LEG])?;
        code.name = "game".into();
        Ok(code)
    }

    /// Score of the network in `state` as if it were terminal. Memoized on
    /// the canonical key; the value depends only on the key.
    pub fn evaluate(&self, state: &GameState) -> TerminalEval {
        let key = state.key();
        if let Some(v) = self.cache.lock().unwrap().get(&key) {
            return v.clone();
        }
        let v = self.evaluate_uncached(state);
        self.cache.lock().unwrap().insert(key, v.clone());
        v
    }

    fn penalty(&self, reason: String, code: Option<&StabilizerCode>) -> TerminalEval {
        TerminalEval {
            reward: self.config.invalid_code_penalty,
            n: code.map(StabilizerCode::n),
            k: code.map(StabilizerCode::k),
            d: None,
            p_l: None,
            p_l_norm: None,
            penalty_reason: Some(reason),
        }
    }

    fn evaluate_uncached(&self, state: &GameState) -> TerminalEval {
        let code = match self.terminal_code(state) {
            Ok(c) => c,
            Err(e) => return self.penalty(e.to_string(), None),
        };
        if code.n() == 0 {
            return self.penalty("no physical legs".into(), Some(&code));
        }
        let enums = match Enumerators::compute(&code, &self.enum_cfg) {
            Ok(e) => e,
            Err(e) => return self.penalty(e.to_string(), Some(&code)),
        };
        let d = enums.distances().d;
        let mut eval = TerminalEval {
            reward: 0.0,
            n: Some(code.n()),
            k: Some(code.k()),
            d,
            p_l: None,
            p_l_norm: None,
            penalty_reason: None,
        };
        match self.config.objective {
            Objective::DistanceMax => match d {
                Some(d) => eval.reward = d as f64,
                None => return self.penalty("code has no logical operators".into(), Some(&code)),
            },
            Objective::BiasedNoise { noise, .. } => {
                let reference = self.reference_p_norm.expect("resolved at construction");
                match enums.error_rates(&noise) {
                    Ok(r) if r.p_l_norm > 0.0 && r.p_l_norm.is_finite() => {
                        eval.p_l = Some(r.p_l);
                        eval.p_l_norm = Some(r.p_l_norm);
                        eval.reward = -(r.p_l_norm / reference).ln();
                    }
                    Ok(_) => return self.penalty("p_L_norm is zero".into(), Some(&code)),
                    Err(e) => return self.penalty(e.to_string(), Some(&code)),
                }
            }
        }
        eval
    }

    /// Play a list of action indices from reset.
    pub fn replay(&self, actions: &[usize]) -> Result<GameState> {
        let mut s = self.reset();
        for &a in actions {
            s = self.step(&s, a)?.state;
        }
        Ok(s)
    }

    /// Move-script form of an episode (the initial lego included).
    pub fn to_moves(&self, state: &GameState) -> Vec<Move> {
        let mut moves = vec![Move::Add {
            lego: self.config.lego_set[state.legos[0]].clone(),
        }];
        for e in &state.ledger {
            match self.action(e.action) {
                Some(Action::AddLego { lego }) => moves.push(Move::Add {
                    lego: self.config.lego_set[lego].clone(),
                }),
                Some(Action::Contract { a, b }) => moves.push(Move::Contract { a, b }),
                _ => {}
            }
        }
        moves.push(Move::Logical { leg: LOGICAL_LEG });
        moves
    }

    /// Action indices for a move script. The leading add of the initial lego
    /// and the logical marker are skipped; a terminate is appended.
    pub fn actions_from_moves(&self, moves: &[Move]) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        let mut skipped_first = false;
        for m in moves {
            match m {
                Move::Add { lego } => {
                    let t = self
                        .config
                        .lego_set
                        .iter()
                        .position(|x| x == lego)
                        .ok_or_else(|| Error::InvalidConfig(format!("lego {lego} not in set")))?;
                    if !skipped_first {
                        skipped_first = true;
                        if t == 0 {
                            continue;
                        }
                        return Err(Error::InvalidState(
                            "script must start with the initial lego".into(),
                        ));
                    }
                    out.push(t);
                }
                Move::Contract { a, b } => out.push(
                    self.index_of(Action::Contract { a: *a, b: *b })
                        .ok_or(Error::LegOutOfRange((*a).max(*b)))?,
                ),
                Move::Logical { leg } if *leg == LOGICAL_LEG => {}
                Move::Logical { leg } => {
                    return Err(Error::InvalidState(format!(
                        "the game fixes leg {LOGICAL_LEG} as logical, script names {leg}"
                    )))
                }
            }
        }
        out.push(self.terminate_index());
        Ok(out)
    }

    /// Play a move script to completion (terminating if it does not end
    /// the episode by itself).
    pub fn replay_moves(&self, moves: &[Move]) -> Result<GameState> {
        let actions = self.actions_from_moves(moves)?;
        let mut s = self.reset();
        for a in actions {
            if s.done {
                break;
            }
            s = self.step(&s, a)?.state;
        }
        Ok(s)
    }

    /// Length of the flat observation vector.
    pub fn observation_len(&self) -> usize {
        let types = if self.legos.len() > 1 {
            self.config.max_legos * self.legos.len()
        } else {
            0
        };
        self.config.max_legos + types + self.num_pairs() + 1
    }

    /// One-hot lego count, per-slot lego type (multi-type sets only),
    /// upper-triangular adjacency over all leg slots, actions taken.
    pub fn flat_observation(&self, state: &GameState) -> Vec<u32> {
        let mut v = vec![0u32; self.observation_len()];
        v[state.legos.len() - 1] = 1;
        let mut off = self.config.max_legos;
        if self.legos.len() > 1 {
            for (slot, &t) in state.legos.iter().enumerate() {
                v[off + slot * self.legos.len() + t] = 1;
            }
            off += self.config.max_legos * self.legos.len();
        }
        for &(a, b) in &state.edges {
            let i = self.index_of(Action::Contract { a, b }).unwrap() - self.legos.len();
            v[off + i] = 1;
        }
        off += self.num_pairs();
        v[off] = state.actions_taken as u32;
        v
    }

    pub fn structured_observation(&self, state: &GameState) -> StructuredObservation {
        StructuredObservation {
            num_legos: state.legos.len(),
            legos: state
                .legos
                .iter()
                .map(|&t| self.config.lego_set[t].clone())
                .collect(),
            edges: state.edges.clone(),
            dangling: state.dangling(),
            actions_taken: state.actions_taken,
        }
    }
}

fn max_legos_legs(config: &GameConfig, max_legs: usize) -> usize {
    config.max_legos.saturating_mul(max_legs)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructuredObservation {
    pub num_legos: usize,
    pub legos: Vec<String>,
    pub edges: Vec<(usize, usize)>,
    pub dangling: Vec<usize>,
    pub actions_taken: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist_game(max_legos: usize, max_actions: usize) -> Game {
        Game::new(GameConfig::distance(max_legos, max_actions)).unwrap()
    }

    #[test]
    fn action_space_of_defaults() {
        let g = dist_game(7, 20);
        assert_eq!(g.action_count(), 863);
        assert_eq!(g.observation_len(), 7 + 861 + 1);
        for i in 0..g.action_count() {
            assert_eq!(g.index_of(g.action(i).unwrap()), Some(i));
        }
        assert_eq!(g.action(863), None);
        assert_eq!(g.action(1), Some(Action::Contract { a: 1, b: 2 }));
    }

    #[test]
    fn fresh_mask() {
        let g = dist_game(7, 20);
        let s = g.reset();
        assert_eq!(s.dangling().len(), 6);
        assert_eq!(s.cumulative_reward, 0.0);
        assert!(!s.done);
        let legal = g.legal_actions(&s);
        assert_eq!(legal.len(), 12);
        assert!(legal.contains(&0));
        assert!(legal.contains(&g.terminate_index()));
        let c12 = g.index_of(Action::Contract { a: 1, b: 2 }).unwrap();
        assert!(!g.legal_mask(&s)[c12]);
    }

    #[test]
    fn rewards_and_masks() {
        let g = dist_game(2, 10);
        let add = 0;
        let c39 = g.index_of(Action::Contract { a: 3, b: 9 }).unwrap();
        let c410 = g.index_of(Action::Contract { a: 4, b: 10 }).unwrap();
        let s = g.reset();
        let o = g.step(&s, add).unwrap();
        assert!((o.reward - 0.1).abs() < 1e-12);
        assert!(!g.legal_mask(&o.state)[add]);
        let o = g.step(&o.state, c39).unwrap();
        assert!((o.reward - 0.05).abs() < 1e-12);
        assert!(!g.legal_mask(&o.state)[c39]);
        assert_eq!(g.step(&o.state, c39).unwrap_err(), Error::IllegalAction(c39));
        let o = g.step(&o.state, c410).unwrap();
        assert!((o.reward + 0.1).abs() < 1e-12);
    }

    #[test]
    fn immediate_terminate() {
        let g = dist_game(1, 5);
        let o = g.step(&g.reset(), g.terminate_index()).unwrap();
        assert!(o.done);
        assert!((o.reward - 2.15).abs() < 1e-12);
        assert_eq!(o.state.final_reward(), Some(2.0));
        assert!(g.legal_actions(&o.state).is_empty());
        assert_eq!(g.step(&o.state, 0).unwrap_err(), Error::EpisodeDone);
    }

    #[test]
    fn action_cap_ends_episode() {
        let g = dist_game(3, 2);
        let s = g.step(&g.reset(), 0).unwrap().state;
        let o = g.step(&s, 0).unwrap();
        assert!(o.done);
        let last = o.state.ledger.last().unwrap();
        assert!((last.shaping - 0.1).abs() < 1e-12);
        assert!(last.final_reward.is_some());
    }

    #[test]
    fn biased_reference_is_color_code() {
        let g = Game::new(GameConfig::default()).unwrap();
        let r = g.reference_p_norm().unwrap();
        assert!((r / 1.4626e-5 - 1.0).abs() < 1e-3, "{r}");
    }

    #[test]
    fn moves_round_trip() {
        let g = dist_game(2, 6);
        let c37 = g.index_of(Action::Contract { a: 3, b: 7 }).unwrap();
        let c68 = g.index_of(Action::Contract { a: 6, b: 8 }).unwrap();
        let s = g.replay(&[0, c37, c68, g.terminate_index()]).unwrap();
        assert_eq!(s.final_reward(), Some(3.0));
        let again = g.replay_moves(&g.to_moves(&s)).unwrap();
        assert_eq!(again.ledger, s.ledger);
    }
}

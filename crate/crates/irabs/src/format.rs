//! Text formats for games, pursuit graphs and strategies.
//!
//! # Game JSON
//!
//! ```json
//! {
//!   "nodes": [
//!     { "kind": "decision", "infoset": 0, "children": [1, 2] },
//!     { "kind": "terminal", "utility": 1.0 },
//!     { "kind": "chance", "children": [3, 4], "probs": [0.5, 0.5] }
//!   ],
//!   "infosets": [ { "owner": 1, "actions": 2, "label": "I" } ]
//! }
//! ```
//!
//! Node 0 is the root. Utilities are the first player's. `owner` is 1 or 2 and `label`
//! may be omitted. Loading renumbers nodes into preorder, so a file written by
//! [`game_to_json`] loads back to an identical tree.
//!
//! # Graph file
//!
//! One edge per line as two node numbers. Lines `start S`, `goal G`, `defenders A B` and
//! `radius R` set the rest of the pursuit setup; missing ones take the default graph's
//! values. `#` starts a comment.

use std::collections::BTreeMap;

use irabs_core::domains::{Graph, PursuitConfig};
use irabs_core::game::{RawGame, RawInfoset, RawNode};
use irabs_core::strategy::BehavioralStrategy;
use irabs_core::{GameTree, Player};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("game: {0}")]
    Game(#[from] irabs_core::GameError),
    #[error("owner must be 1 or 2, got {0}")]
    Owner(u8),
    #[error("line {line}: {msg}")]
    Graph { line: usize, msg: String },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum NodeDto {
    Terminal { utility: f64 },
    Chance { children: Vec<u32>, probs: Vec<f64> },
    Decision { infoset: u32, children: Vec<u32> },
}

#[derive(Serialize, Deserialize)]
struct InfosetDto {
    owner: u8,
    actions: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct GameDto {
    nodes: Vec<NodeDto>,
    infosets: Vec<InfosetDto>,
}

fn owner_code(p: Player) -> u8 {
    p.index() as u8 + 1
}

fn owner_of(code: u8) -> Result<Player, FormatError> {
    match code {
        1 => Ok(Player::P1),
        2 => Ok(Player::P2),
        c => Err(FormatError::Owner(c)),
    }
}

pub fn game_to_json(game: &GameTree) -> String {
    let raw = game.to_raw();
    let dto = GameDto {
        nodes: raw
            .nodes
            .into_iter()
            .map(|n| match n {
                RawNode::Terminal { utility } => NodeDto::Terminal { utility },
                RawNode::Chance { children, probs } => NodeDto::Chance { children, probs },
                RawNode::Decision { infoset, children } => NodeDto::Decision { infoset, children },
            })
            .collect(),
        infosets: raw
            .infosets
            .into_iter()
            .map(|s| InfosetDto { owner: owner_code(s.owner), actions: s.num_actions, label: s.label })
            .collect(),
    };
    serde_json::to_string_pretty(&dto).expect("plain data serializes")
}

pub fn game_from_json(text: &str) -> Result<GameTree, FormatError> {
    let dto: GameDto = serde_json::from_str(text)?;
    let infosets = dto
        .infosets
        .into_iter()
        .map(|s| Ok(RawInfoset { owner: owner_of(s.owner)?, num_actions: s.actions, label: s.label }))
        .collect::<Result<Vec<_>, FormatError>>()?;
    let nodes = dto
        .nodes
        .into_iter()
        .map(|n| match n {
            NodeDto::Terminal { utility } => RawNode::Terminal { utility },
            NodeDto::Chance { children, probs } => RawNode::Chance { children, probs },
            NodeDto::Decision { infoset, children } => RawNode::Decision { infoset, children },
        })
        .collect();
    Ok(GameTree::from_raw(&RawGame { nodes, infosets })?)
}

/// Parses a graph file into a pursuit setup with `max_rounds` rounds.
pub fn parse_graph(text: &str, max_rounds: u32) -> Result<PursuitConfig, FormatError> {
    let mut cfg = PursuitConfig::default_graph(max_rounds);
    let mut edges = Vec::new();
    let mut nodes = 0u32;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: &str| FormatError::Graph { line: i + 1, msg: msg.to_string() };
        let words: Vec<&str> = line.split_whitespace().collect();
        let nums = |from: usize| -> Result<Vec<u32>, FormatError> {
            words[from..].iter().map(|w| w.parse::<u32>().map_err(|_| err("expected a node number"))).collect()
        };
        match words[0] {
            "start" | "goal" | "radius" => {
                let v = nums(1)?;
                if v.len() != 1 {
                    return Err(err("expected one number"));
                }
                match words[0] {
                    "start" => cfg.start = v[0],
                    "goal" => cfg.goal = v[0],
                    _ => cfg.radius = v[0],
                }
            }
            "defenders" => {
                let v = nums(1)?;
                if v.len() != 2 {
                    return Err(err("expected two numbers"));
                }
                cfg.defenders = [v[0], v[1]];
            }
            _ => {
                let v = nums(0)?;
                if v.len() != 2 || v[0] == v[1] {
                    return Err(err("expected an edge `a b` between distinct nodes"));
                }
                nodes = nodes.max(v[0] + 1).max(v[1] + 1);
                edges.push((v[0], v[1]));
            }
        }
    }
    if edges.is_empty() {
        return Err(FormatError::Graph { line: 0, msg: "no edges".into() });
    }
    for (name, v) in [("start", cfg.start), ("goal", cfg.goal), ("defender", cfg.defenders[0]), ("defender", cfg.defenders[1])] {
        if v >= nodes {
            return Err(FormatError::Graph { line: 0, msg: format!("{name} {v} is not on the graph") });
        }
    }
    cfg.graph = Graph::from_edges(nodes as usize, &edges);
    Ok(cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyEntry {
    pub infoset: u32,
    pub owner: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub probs: Vec<f64>,
}

/// Both players' behavioral strategies, one entry per information set.
pub fn strategy_to_json(game: &GameTree, b: &BehavioralStrategy) -> String {
    let rows: Vec<StrategyEntry> = game
        .infoset_ids()
        .map(|s| {
            let set = game.infoset(s);
            StrategyEntry {
                infoset: s.0,
                owner: owner_code(set.owner()),
                label: set.label().map(str::to_string),
                probs: b.row(game, s).to_vec(),
            }
        })
        .collect();
    serde_json::to_string_pretty(&rows).expect("plain data serializes")
}

/// Abstraction mapping as `abstract id -> member set ids`, live sets only.
pub fn mapping_to_json(abs: &irabs_core::Abstraction) -> String {
    let map: BTreeMap<u32, Vec<u32>> =
        abs.live_ids().map(|a| (a.0, abs.set(a).members().iter().map(|m| m.0).collect())).collect();
    serde_json::to_string_pretty(&map).expect("plain data serializes")
}

//! Graph pursuit between one attacker (first player) and a two-unit defender (second
//! player).
//!
//! Each round the attacker moves to an adjacent node. The defender then moves both units
//! to adjacent nodes as one joint action, without seeing the attacker's move. The attacker
//! is caught if it ends on a unit's node or swaps places with a unit along an edge, and
//! then pays 1. Reaching the goal uncaught earns 2. When the round limit runs out the
//! payoff is 0. After every round the attacker sees the units within distance two of
//! itself. The defender sees the attacker if it is within distance two of either unit.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::game::{GameBuilder, GameTree, NodeId, Player};

const UNSEEN: u32 = u32::MAX;
pub const CAUGHT: f64 = -1.0;
pub const GOAL: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<u32>>,
}

impl Graph {
    /// Undirected graph from an edge list. Neighbor lists are kept sorted.
    pub fn from_edges(nodes: usize, edges: &[(u32, u32)]) -> Self {
        let mut adj = vec![Vec::new(); nodes];
        for &(a, b) in edges {
            assert!(a != b && (a as usize) < nodes && (b as usize) < nodes, "bad edge {a}-{b}");
            if !adj[a as usize].contains(&b) {
                adj[a as usize].push(b);
                adj[b as usize].push(a);
            }
        }
        for l in adj.iter_mut() {
            l.sort_unstable();
        }
        Graph { adj }
    }
    pub fn len(&self) -> usize {
        self.adj.len()
    }
    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut e = Vec::new();
        for (a, l) in self.adj.iter().enumerate() {
            for &b in l {
                if (a as u32) < b {
                    e.push((a as u32, b));
                }
            }
        }
        e
    }
    /// All-pairs hop distances (`u32::MAX` when disconnected).
    pub fn distances(&self) -> Vec<Vec<u32>> {
        let n = self.adj.len();
        let mut out = vec![vec![u32::MAX; n]; n];
        for s in 0..n {
            let mut q = VecDeque::new();
            out[s][s] = 0;
            q.push_back(s);
            while let Some(v) = q.pop_front() {
                for &w in &self.adj[v] {
                    if out[s][w as usize] == u32::MAX {
                        out[s][w as usize] = out[s][v] + 1;
                        q.push_back(w as usize);
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PursuitConfig {
    pub graph: Graph,
    pub start: u32,
    pub goal: u32,
    pub defenders: [u32; 2],
    pub max_rounds: u32,
    pub radius: u32,
}

impl PursuitConfig {
    /// Three-by-five grid. The attacker starts in the middle of the left column and the
    /// goal is the middle of the right column. Both units start on the node in front of
    /// the goal.
    ///
    /// ```text
    ///  0 -  1 -  2 -  3 -  4
    ///  |    |    |    |    |
    ///  5 -  6 -  7 -  8 -  9
    ///  |    |    |    |    |
    /// 10 - 11 - 12 - 13 - 14
    /// ```
    pub fn default_graph(max_rounds: u32) -> Self {
        let mut edges = Vec::new();
        for r in 0..3u32 {
            for c in 0..5u32 {
                let v = r * 5 + c;
                if c < 4 {
                    edges.push((v, v + 1));
                }
                if r < 2 {
                    edges.push((v, v + 5));
                }
            }
        }
        PursuitConfig {
            graph: Graph::from_edges(15, &edges),
            start: 5,
            goal: 9,
            defenders: [8, 8],
            max_rounds,
            radius: 2,
        }
    }
}

struct Ctx<'a> {
    cfg: &'a PursuitConfig,
    dist: Vec<Vec<u32>>,
    b: GameBuilder,
}

pub fn pursuit(cfg: &PursuitConfig) -> GameTree {
    let n = cfg.graph.len() as u32;
    assert!(cfg.start < n && cfg.goal < n && cfg.defenders.iter().all(|&d| d < n), "node out of range");
    let mut ctx = Ctx { cfg, dist: cfg.graph.distances(), b: GameBuilder::new() };
    let root = round(&mut ctx, 0, cfg.start, cfg.defenders, [Vec::new(), Vec::new()]);
    ctx.b.finish(root).unwrap()
}

fn round(ctx: &mut Ctx, k: u32, at: u32, units: [u32; 2], seen: [Vec<u32>; 2]) -> NodeId {
    let g = &ctx.cfg.graph;
    let moves: Vec<u32> = g.neighbors(at).to_vec();
    let joint: Vec<(u32, u32)> = g
        .neighbors(units[0])
        .iter()
        .flat_map(|&x| g.neighbors(units[1]).iter().map(move |&y| (x, y)))
        .collect();
    let na = ctx.b.decision(Player::P1, &seen[0], moves.len()).unwrap();
    for (ai, &to) in moves.iter().enumerate() {
        let nd = ctx.b.decision(Player::P2, &seen[1], joint.len()).unwrap();
        ctx.b.attach(na, ai, nd).unwrap();
        for (di, &(u0, u1)) in joint.iter().enumerate() {
            let caught = to == u0 || to == u1 || (to == units[0] && u0 == at) || (to == units[1] && u1 == at);
            let child = if caught {
                ctx.b.terminal(CAUGHT)
            } else if to == ctx.cfg.goal {
                ctx.b.terminal(GOAL)
            } else if k + 1 == ctx.cfg.max_rounds {
                ctx.b.terminal(0.0)
            } else {
                let r = ctx.cfg.radius;
                let d = &ctx.dist[to as usize];
                let see = |u: u32| if d[u as usize] <= r { u } else { UNSEEN };
                let spotted = ctx.dist[u0 as usize][to as usize] <= r || ctx.dist[u1 as usize][to as usize] <= r;
                let mut nseen = seen.clone();
                nseen[0].extend_from_slice(&[to, see(u0), see(u1)]);
                nseen[1].extend_from_slice(&[u0, u1, if spotted { to } else { UNSEEN }]);
                round(ctx, k + 1, to, [u0, u1], nseen)
            };
            ctx.b.attach(nd, di, child).unwrap();
        }
    }
    na
}

//! Behavioral strategies, reach probabilities, realization plans and averaging.

mod response;

pub use response::{
    best_response, exploitability, solve_response, BestResponse, Bound, BrOptions, Exploitability, PureResponse,
};

use alloc::vec;
use alloc::vec::Vec;

use crate::game::{GameTree, InfosetId, NodeId, NodeKind, Player};

/// Anything that yields an action distribution for every original information set.
pub trait Policy {
    fn probs(&self, game: &GameTree, set: InfosetId) -> &[f64];
}

impl<P: Policy + ?Sized> Policy for &P {
    fn probs(&self, game: &GameTree, set: InfosetId) -> &[f64] {
        (**self).probs(game, set)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StrategyError {
    #[error("strategy has {found} action entries, game has {expected}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("row of information set {set} sums to {sum}")]
    NotNormalized { set: u32, sum: f64 },
    #[error("lambda weights must be non-negative")]
    BadWeights,
}

/// Rows of varying width addressed by dense index.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RowTable {
    offsets: Vec<usize>,
    data: Vec<f64>,
}

impl RowTable {
    pub fn new() -> Self {
        RowTable { offsets: vec![0], data: Vec::new() }
    }
    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    pub fn push_row(&mut self, row: &[f64]) -> usize {
        self.data.extend_from_slice(row);
        self.offsets.push(self.data.len());
        self.len() - 1
    }
    pub fn push_filled(&mut self, width: usize, value: f64) -> usize {
        self.data.resize(self.data.len() + width, value);
        self.offsets.push(self.data.len());
        self.len() - 1
    }
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[self.offsets[i]..self.offsets[i + 1]]
    }
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[self.offsets[i]..self.offsets[i + 1]]
    }
    pub fn data(&self) -> &[f64] {
        &self.data
    }
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }
    pub fn offset(&self, i: usize) -> usize {
        self.offsets[i]
    }
}

/// Behavioral strategy over every original information set, indexed by global action id.
/// Rows for both players are present; callers read the rows of the player they care about.
#[derive(Debug, Clone, PartialEq)]
pub struct BehavioralStrategy {
    probs: Vec<f64>,
}

impl BehavioralStrategy {
    pub fn uniform(game: &GameTree) -> Self {
        let mut probs = vec![0.0; game.total_actions()];
        for s in game.infoset_ids() {
            let r = game.action_range(s);
            let p = 1.0 / r.len() as f64;
            probs[r].iter_mut().for_each(|x| *x = p);
        }
        BehavioralStrategy { probs }
    }

    /// Pure strategy playing each set's first action.
    pub fn first_action(game: &GameTree) -> Self {
        let mut probs = vec![0.0; game.total_actions()];
        for s in game.infoset_ids() {
            probs[game.action_range(s).start] = 1.0;
        }
        BehavioralStrategy { probs }
    }

    pub fn from_policy<P: Policy + ?Sized>(game: &GameTree, policy: &P) -> Self {
        let mut probs = vec![0.0; game.total_actions()];
        for s in game.infoset_ids() {
            probs[game.action_range(s)].copy_from_slice(policy.probs(game, s));
        }
        BehavioralStrategy { probs }
    }

    pub fn from_vec(game: &GameTree, probs: Vec<f64>) -> Result<Self, StrategyError> {
        if probs.len() != game.total_actions() {
            return Err(StrategyError::ShapeMismatch { expected: game.total_actions(), found: probs.len() });
        }
        let s = BehavioralStrategy { probs };
        s.validate(game)?;
        Ok(s)
    }

    pub fn validate(&self, game: &GameTree) -> Result<(), StrategyError> {
        if self.probs.len() != game.total_actions() {
            return Err(StrategyError::ShapeMismatch { expected: game.total_actions(), found: self.probs.len() });
        }
        for s in game.infoset_ids() {
            let row = &self.probs[game.action_range(s)];
            let sum: f64 = row.iter().sum();
            if row.iter().any(|&p| !(p >= 0.0)) || libm::fabs(sum - 1.0) > 1e-9 {
                return Err(StrategyError::NotNormalized { set: s.0, sum });
            }
        }
        Ok(())
    }

    pub fn row(&self, game: &GameTree, s: InfosetId) -> &[f64] {
        &self.probs[game.action_range(s)]
    }
    pub fn row_mut(&mut self, game: &GameTree, s: InfosetId) -> &mut [f64] {
        &mut self.probs[game.action_range(s)]
    }
    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }
}

impl Policy for BehavioralStrategy {
    fn probs(&self, game: &GameTree, set: InfosetId) -> &[f64] {
        &self.probs[game.action_range(set)]
    }
}

/// Probability factor of the edge from `n` to its `k`-th child under the given policies.
#[inline]
fn edge_factor<A: Policy + ?Sized, B: Policy + ?Sized>(game: &GameTree, n: NodeId, k: usize, p1: &A, p2: &B) -> f64 {
    match game.kind(n) {
        NodeKind::Chance => game.edge_probs(n)[k],
        NodeKind::Decision(Player::P1) => p1.probs(game, game.infoset_of(n).unwrap())[k],
        NodeKind::Decision(Player::P2) => p2.probs(game, game.infoset_of(n).unwrap())[k],
        NodeKind::Terminal => unreachable!(),
    }
}

/// Per node: product of `player`'s own action probabilities on the path.
pub fn own_reach_nodes<P: Policy + ?Sized>(game: &GameTree, player: Player, policy: &P) -> Vec<f64> {
    let n = game.num_nodes();
    let mut reach = vec![1.0; n];
    for i in 0..n as u32 {
        let node = NodeId(i);
        let r = reach[i as usize];
        if game.kind(node) == NodeKind::Decision(player) {
            let row = policy.probs(game, game.infoset_of(node).unwrap());
            for (k, &c) in game.children(node).iter().enumerate() {
                reach[c.index()] = r * row[k];
            }
        } else {
            for &c in game.children(node) {
                reach[c.index()] = r;
            }
        }
    }
    reach
}

/// Per information set of `player`: own reach probability of the set (0 for the other
/// player's sets).
pub fn infoset_reach<P: Policy + ?Sized>(game: &GameTree, player: Player, policy: &P) -> Vec<f64> {
    let nodes = own_reach_nodes(game, player, policy);
    game.infosets()
        .iter()
        .map(|s| if s.owner() == player { nodes[s.members()[0].index()] } else { 0.0 })
        .collect()
}

/// Own reach of `player` at one node, walking the path to the root.
pub fn player_reach<P: Policy + ?Sized>(game: &GameTree, player: Player, policy: &P, node: NodeId) -> f64 {
    let mut r = 1.0;
    let mut cur = node;
    while let Some(par) = game.parent(cur) {
        if game.kind(par) == NodeKind::Decision(player) {
            r *= policy.probs(game, game.infoset_of(par).unwrap())[game.incoming_action(cur).unwrap()];
        }
        cur = par;
    }
    r
}

/// Realization plan of `player`: own reach of each leaf, aligned with [`GameTree::terminals`].
pub fn realization_plan<P: Policy + ?Sized>(game: &GameTree, player: Player, policy: &P) -> Vec<f64> {
    let nodes = own_reach_nodes(game, player, policy);
    game.terminals().iter().map(|t| nodes[t.index()]).collect()
}

/// Expected first-player utility when the first player follows `p1` and the second `p2`.
pub fn expected_utility<A: Policy + ?Sized, B: Policy + ?Sized>(game: &GameTree, p1: &A, p2: &B) -> f64 {
    let n = game.num_nodes();
    let mut reach = vec![0.0; n];
    reach[0] = 1.0;
    let mut total = 0.0;
    for i in 0..n as u32 {
        let node = NodeId(i);
        let r = reach[i as usize];
        if r == 0.0 {
            continue;
        }
        if game.kind(node) == NodeKind::Terminal {
            total += r * game.utility(node);
            continue;
        }
        for (k, &c) in game.children(node).iter().enumerate() {
            reach[c.index()] = r * edge_factor(game, node, k, p1, p2);
        }
    }
    total
}

/// Row of the behavioral average of two strategies at one set, where `reach` and
/// `reach2` are the set's own reach under each. With zero total weight the first row is kept.
pub fn combine_row(out: &mut [f64], row: &[f64], row2: &[f64], reach: f64, reach2: f64, lambda1: f64, lambda2: f64) {
    let denom = lambda1 * reach + lambda2 * reach2;
    if denom <= 0.0 {
        out.copy_from_slice(row);
        return;
    }
    let w = lambda2 * reach2 / denom;
    for k in 0..out.len() {
        out[k] = row[k] + w * (row2[k] - row[k]);
    }
}

/// Behavioral strategy of `player` realization-equivalent to the mixture
/// `lambda1 * b + lambda2 * b2` (weights need not sum to 1). Rows of the other player are
/// copied from `b`.
pub fn average_combine<A: Policy + ?Sized, B: Policy + ?Sized>(
    game: &GameTree,
    player: Player,
    b: &A,
    b2: &B,
    lambda1: f64,
    lambda2: f64,
) -> Result<BehavioralStrategy, StrategyError> {
    if !(lambda1 >= 0.0 && lambda2 >= 0.0) {
        return Err(StrategyError::BadWeights);
    }
    let reach = infoset_reach(game, player, b);
    let reach2 = infoset_reach(game, player, b2);
    let mut out = BehavioralStrategy::from_policy(game, b);
    for s in game.infosets_of(player) {
        let row = b.probs(game, s);
        let row2 = b2.probs(game, s);
        let range = game.action_range(s);
        combine_row(&mut out.probs[range], row, row2, reach[s.index()], reach2[s.index()], lambda1, lambda2);
    }
    Ok(out)
}

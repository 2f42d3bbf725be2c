//! Game trees in flat arrays.
//!
//! Nodes are numbered in depth-first preorder from the root, so every child has a larger
//! id than its parent. Top-down passes are forward loops and bottom-up passes are reverse
//! loops. Information sets are numbered by first appearance in the same order. Each set's
//! actions get a contiguous block of global action ids.
//!
//! Only the first player's utility is stored; the game is zero-sum.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

const NONE: u32 = u32::MAX;
const PROB_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Player {
    P1,
    P2,
}

impl Player {
    pub const BOTH: [Player; 2] = [Player::P1, Player::P2];

    pub fn opponent(self) -> Player {
        match self {
            Player::P1 => Player::P2,
            Player::P2 => Player::P1,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Player::P1 => 0,
            Player::P2 => 1,
        }
    }

    /// Multiplier turning a first-player utility into this player's utility.
    pub fn sign(self) -> f64 {
        match self {
            Player::P1 => 1.0,
            Player::P2 => -1.0,
        }
    }

    /// Player acting at iteration `t` (1-based) under alternating updates.
    pub fn alternating(t: u64) -> Player {
        if t % 2 == 1 {
            Player::P1
        } else {
            Player::P2
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InfosetId(pub u32);

impl InfosetId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Terminal,
    Chance,
    Decision(Player),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GameError {
    #[error("chance probabilities at node {node} sum to {sum}")]
    ChanceSum { node: u32, sum: f64 },
    #[error("negative chance probability at node {node}")]
    NegativeProbability { node: u32 },
    #[error("information set {set} mixes action counts {expected} and {found}")]
    ActionCountMismatch { set: u32, expected: u32, found: u32 },
    #[error("information set {set} mixes players")]
    OwnerMismatch { set: u32 },
    #[error("node {node} has no children")]
    NoChildren { node: u32 },
    #[error("child slot {slot} of node {node} was never attached")]
    MissingChild { node: u32, slot: u32 },
    #[error("node {node} is attached more than once")]
    AlreadyAttached { node: u32 },
    #[error("node {node} is not connected to the root")]
    Disconnected { node: u32 },
    #[error("node {node} does not exist")]
    UnknownNode { node: u32 },
    #[error("information set {set} does not exist")]
    UnknownInfoset { set: u32 },
    #[error("utility at node {node} is not finite")]
    BadUtility { node: u32 },
}

#[derive(Debug, Clone)]
pub struct InfoSet {
    owner: Player,
    members: Vec<NodeId>,
    num_actions: u32,
    first_action: u32,
    seq_len: u32,
    label: Option<String>,
}

impl InfoSet {
    pub fn owner(&self) -> Player {
        self.owner
    }
    pub fn members(&self) -> &[NodeId] {
        &self.members
    }
    pub fn num_actions(&self) -> usize {
        self.num_actions as usize
    }
    /// Global id of this set's first action.
    pub fn first_action(&self) -> usize {
        self.first_action as usize
    }
    /// Length of the owner's own action sequence leading to the set.
    pub fn seq_len(&self) -> usize {
        self.seq_len as usize
    }
    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }
}

/// Derived size and range figures.
#[derive(Debug, Clone)]
pub struct GameMetrics {
    /// Largest absolute utility.
    pub u_max: f64,
    /// Utility range bound used by the regret bounds, `2 * u_max`.
    pub delta: f64,
    /// Per information set: spread of the first player's utility over leaves below any member.
    pub delta_set: Vec<f64>,
    /// Largest action count per player.
    pub a_max: [usize; 2],
    /// Information set count per player.
    pub infosets: [usize; 2],
    pub nodes: usize,
    pub terminals: usize,
    pub depth: usize,
}

#[derive(Debug, Clone)]
pub struct GameTree {
    kind: Vec<NodeKind>,
    parent: Vec<u32>,
    incoming: Vec<u32>,
    infoset: Vec<u32>,
    utility: Vec<f64>,
    child_start: Vec<u32>,
    child_len: Vec<u32>,
    children: Vec<NodeId>,
    edge_prob: Vec<f64>,
    chance_reach: Vec<f64>,
    subtree_min: Vec<f64>,
    subtree_max: Vec<f64>,
    infosets: Vec<InfoSet>,
    terminals: Vec<NodeId>,
    total_actions: usize,
    metrics: GameMetrics,
}

impl GameTree {
    pub fn root(&self) -> NodeId {
        NodeId(0)
    }
    pub fn num_nodes(&self) -> usize {
        self.kind.len()
    }
    pub fn kind(&self, n: NodeId) -> NodeKind {
        self.kind[n.index()]
    }
    pub fn parent(&self, n: NodeId) -> Option<NodeId> {
        let p = self.parent[n.index()];
        (p != NONE).then_some(NodeId(p))
    }
    /// Position of `n` among its parent's children.
    pub fn incoming_action(&self, n: NodeId) -> Option<usize> {
        let a = self.incoming[n.index()];
        (a != NONE).then_some(a as usize)
    }
    pub fn children(&self, n: NodeId) -> &[NodeId] {
        let s = self.child_start[n.index()] as usize;
        &self.children[s..s + self.child_len[n.index()] as usize]
    }
    pub fn child(&self, n: NodeId, k: usize) -> NodeId {
        self.children(n)[k]
    }
    /// Edge probabilities below `n`. They are 1 for decision nodes and empty for leaves.
    pub fn edge_probs(&self, n: NodeId) -> &[f64] {
        let s = self.child_start[n.index()] as usize;
        &self.edge_prob[s..s + self.child_len[n.index()] as usize]
    }
    /// First player's utility at a leaf, 0 elsewhere.
    pub fn utility(&self, n: NodeId) -> f64 {
        self.utility[n.index()]
    }
    pub fn utility_for(&self, n: NodeId, p: Player) -> f64 {
        p.sign() * self.utility[n.index()]
    }
    pub fn infoset_of(&self, n: NodeId) -> Option<InfosetId> {
        let s = self.infoset[n.index()];
        (s != NONE).then_some(InfosetId(s))
    }
    pub fn num_infosets(&self) -> usize {
        self.infosets.len()
    }
    pub fn infoset(&self, s: InfosetId) -> &InfoSet {
        &self.infosets[s.index()]
    }
    pub fn infosets(&self) -> &[InfoSet] {
        &self.infosets
    }
    pub fn infoset_ids(&self) -> impl Iterator<Item = InfosetId> + '_ {
        (0..self.infosets.len() as u32).map(InfosetId)
    }
    pub fn infosets_of(&self, p: Player) -> impl Iterator<Item = InfosetId> + '_ {
        self.infoset_ids().filter(move |&s| self.infosets[s.index()].owner == p)
    }
    pub fn num_actions(&self, s: InfosetId) -> usize {
        self.infosets[s.index()].num_actions as usize
    }
    /// Global action ids of a set.
    pub fn action_range(&self, s: InfosetId) -> Range<usize> {
        let i = &self.infosets[s.index()];
        i.first_action as usize..(i.first_action + i.num_actions) as usize
    }
    pub fn total_actions(&self) -> usize {
        self.total_actions
    }
    /// Product of chance probabilities on the path to `n`.
    pub fn chance_reach(&self, n: NodeId) -> f64 {
        self.chance_reach[n.index()]
    }
    pub fn subtree_min_utility(&self, n: NodeId) -> f64 {
        self.subtree_min[n.index()]
    }
    pub fn subtree_max_utility(&self, n: NodeId) -> f64 {
        self.subtree_max[n.index()]
    }
    /// Best utility `p` can hope for below `n`.
    pub fn subtree_best_for(&self, n: NodeId, p: Player) -> f64 {
        match p {
            Player::P1 => self.subtree_max[n.index()],
            Player::P2 => -self.subtree_min[n.index()],
        }
    }
    pub fn terminals(&self) -> &[NodeId] {
        &self.terminals
    }
    pub fn metrics(&self) -> &GameMetrics {
        &self.metrics
    }
    pub fn find_infoset(&self, label: &str) -> Option<InfosetId> {
        self.infosets
            .iter()
            .position(|s| s.label.as_deref() == Some(label))
            .map(|i| InfosetId(i as u32))
    }

    /// Actions taken by `p` on the path to `n`, as (set, action position) pairs from the root.
    pub fn own_sequence(&self, n: NodeId, p: Player) -> Vec<(InfosetId, usize)> {
        let mut seq = Vec::new();
        let mut cur = n;
        while let Some(par) = self.parent(cur) {
            if self.kind(par) == NodeKind::Decision(p) {
                seq.push((self.infoset_of(par).unwrap(), self.incoming_action(cur).unwrap()));
            }
            cur = par;
        }
        seq.reverse();
        seq
    }

    /// Sets whose member nodes disagree on the owner's action sequence.
    pub fn perfect_recall_violations(&self) -> Vec<InfosetId> {
        let v = recall_violations(self, |s| s.0, |_, k| k as u32);
        v.into_iter().map(InfosetId).collect()
    }

    pub fn has_perfect_recall(&self) -> bool {
        self.perfect_recall_violations().is_empty()
    }

    /// Plain-data copy with the same node and set numbering.
    pub fn to_raw(&self) -> RawGame {
        let nodes = (0..self.num_nodes() as u32)
            .map(|i| {
                let n = NodeId(i);
                let children: Vec<u32> = self.children(n).iter().map(|c| c.0).collect();
                match self.kind(n) {
                    NodeKind::Terminal => RawNode::Terminal { utility: self.utility(n) },
                    NodeKind::Chance => RawNode::Chance { children, probs: self.edge_probs(n).to_vec() },
                    NodeKind::Decision(_) => RawNode::Decision { infoset: self.infoset[i as usize], children },
                }
            })
            .collect();
        let infosets = self
            .infosets
            .iter()
            .map(|s| RawInfoset { owner: s.owner, num_actions: s.num_actions, label: s.label.clone() })
            .collect();
        RawGame { nodes, infosets }
    }

    /// Builds a tree from plain data rooted at node 0. Ids are renumbered to preorder.
    pub fn from_raw(raw: &RawGame) -> Result<GameTree, GameError> {
        let mut b = GameBuilder::new();
        let mut ids = Vec::with_capacity(raw.nodes.len());
        for (i, node) in raw.nodes.iter().enumerate() {
            let id = match node {
                RawNode::Terminal { utility } => b.terminal(*utility),
                RawNode::Chance { probs, .. } => b.chance(probs),
                RawNode::Decision { infoset, children } => {
                    let s = raw.infosets.get(*infoset as usize).ok_or(GameError::UnknownInfoset { set: *infoset })?;
                    if s.num_actions as usize != children.len() {
                        return Err(GameError::ActionCountMismatch {
                            set: *infoset,
                            expected: s.num_actions,
                            found: children.len() as u32,
                        });
                    }
                    match &s.label {
                        Some(l) => b.decision_labeled(s.owner, &[*infoset], children.len(), l)?,
                        None => b.decision(s.owner, &[*infoset], children.len())?,
                    }
                }
            };
            debug_assert_eq!(id.index(), i);
            ids.push(id);
        }
        for (i, node) in raw.nodes.iter().enumerate() {
            let children = match node {
                RawNode::Terminal { .. } => continue,
                RawNode::Chance { children, .. } | RawNode::Decision { children, .. } => children,
            };
            for (k, &c) in children.iter().enumerate() {
                let child = *ids.get(c as usize).ok_or(GameError::UnknownNode { node: c })?;
                b.attach(ids[i], k, child)?;
            }
        }
        if raw.nodes.is_empty() {
            return Err(GameError::UnknownNode { node: 0 });
        }
        b.finish(NodeId(0))
    }
}

/// Sets (under a grouping of original sets) whose member nodes disagree on the owner's
/// sequence. `group` maps an original set to its group and `action` relabels an action.
pub fn recall_violations(
    game: &GameTree,
    group: impl Fn(InfosetId) -> u32,
    action: impl Fn(InfosetId, usize) -> u32,
) -> Vec<u32> {
    let mut first: BTreeMap<u32, Vec<(u32, u32)>> = BTreeMap::new();
    let mut bad: Vec<u32> = Vec::new();
    for i in 0..game.num_nodes() as u32 {
        let n = NodeId(i);
        let (NodeKind::Decision(p), Some(s)) = (game.kind(n), game.infoset_of(n)) else { continue };
        let g = group(s);
        let seq: Vec<(u32, u32)> =
            game.own_sequence(n, p).into_iter().map(|(t, k)| (group(t), action(t, k))).collect();
        match first.get(&g) {
            None => {
                first.insert(g, seq);
            }
            Some(f) => {
                if *f != seq && !bad.contains(&g) {
                    bad.push(g);
                }
            }
        }
    }
    bad.sort_unstable();
    bad
}

#[derive(Debug, Clone, PartialEq)]
pub enum RawNode {
    Terminal { utility: f64 },
    Chance { children: Vec<u32>, probs: Vec<f64> },
    Decision { infoset: u32, children: Vec<u32> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawInfoset {
    pub owner: Player,
    pub num_actions: u32,
    pub label: Option<String>,
}

/// Plain-data form of a game used by file formats. Node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct RawGame {
    pub nodes: Vec<RawNode>,
    pub infosets: Vec<RawInfoset>,
}

struct BNode {
    kind: NodeKind,
    set: u32,
    utility: f64,
    probs: Vec<f64>,
    kids: Vec<u32>,
    attached: bool,
}

struct BSet {
    owner: Player,
    num_actions: u32,
    label: Option<String>,
}

/// Incremental tree construction. Decision nodes name their information set through a
/// key; nodes with equal player and key share a set. Nodes may be created in any order.
/// [`GameBuilder::finish`] renumbers everything into preorder.
#[derive(Default)]
pub struct GameBuilder {
    nodes: Vec<BNode>,
    sets: Vec<BSet>,
    keys: BTreeMap<(Player, Vec<u32>), u32>,
}

impl GameBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn terminal(&mut self, utility_p1: f64) -> NodeId {
        self.push(NodeKind::Terminal, NONE, utility_p1, Vec::new(), 0)
    }

    pub fn chance(&mut self, probs: &[f64]) -> NodeId {
        self.push(NodeKind::Chance, NONE, 0.0, probs.to_vec(), probs.len())
    }

    pub fn decision(&mut self, player: Player, key: &[u32], num_actions: usize) -> Result<NodeId, GameError> {
        let set = self.set_for(player, key, num_actions)?;
        Ok(self.push(NodeKind::Decision(player), set, 0.0, Vec::new(), num_actions))
    }

    pub fn decision_labeled(
        &mut self,
        player: Player,
        key: &[u32],
        num_actions: usize,
        label: &str,
    ) -> Result<NodeId, GameError> {
        let set = self.set_for(player, key, num_actions)?;
        self.sets[set as usize].label = Some(String::from(label));
        Ok(self.push(NodeKind::Decision(player), set, 0.0, Vec::new(), num_actions))
    }

    pub fn attach(&mut self, parent: NodeId, slot: usize, child: NodeId) -> Result<(), GameError> {
        if child.index() >= self.nodes.len() {
            return Err(GameError::UnknownNode { node: child.0 });
        }
        if self.nodes[child.index()].attached || child == parent {
            return Err(GameError::AlreadyAttached { node: child.0 });
        }
        let p = self.nodes.get_mut(parent.index()).ok_or(GameError::UnknownNode { node: parent.0 })?;
        let s = p.kids.get_mut(slot).ok_or(GameError::MissingChild { node: parent.0, slot: slot as u32 })?;
        if *s != NONE {
            return Err(GameError::AlreadyAttached { node: child.0 });
        }
        *s = child.0;
        self.nodes[child.index()].attached = true;
        Ok(())
    }

    fn set_for(&mut self, player: Player, key: &[u32], num_actions: usize) -> Result<u32, GameError> {
        let n = num_actions as u32;
        if let Some(&s) = self.keys.get(&(player, key.to_vec())) {
            let found = &self.sets[s as usize];
            if found.num_actions != n {
                return Err(GameError::ActionCountMismatch { set: s, expected: found.num_actions, found: n });
            }
            return Ok(s);
        }
        let s = self.sets.len() as u32;
        self.sets.push(BSet { owner: player, num_actions: n, label: None });
        self.keys.insert((player, key.to_vec()), s);
        Ok(s)
    }

    fn push(&mut self, kind: NodeKind, set: u32, utility: f64, probs: Vec<f64>, kids: usize) -> NodeId {
        self.nodes.push(BNode { kind, set, utility, probs, kids: vec![NONE; kids], attached: false });
        NodeId(self.nodes.len() as u32 - 1)
    }

    pub fn finish(self, root: NodeId) -> Result<GameTree, GameError> {
        let nb = self.nodes.len();
        if root.index() >= nb {
            return Err(GameError::UnknownNode { node: root.0 });
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if n.kind != NodeKind::Terminal && n.kids.is_empty() {
                return Err(GameError::NoChildren { node: i as u32 });
            }
            if let Some(slot) = n.kids.iter().position(|&k| k == NONE) {
                return Err(GameError::MissingChild { node: i as u32, slot: slot as u32 });
            }
            if n.kind == NodeKind::Terminal && !n.utility.is_finite() {
                return Err(GameError::BadUtility { node: i as u32 });
            }
            if n.kind == NodeKind::Chance {
                if n.probs.iter().any(|&p| !(p >= 0.0)) {
                    return Err(GameError::NegativeProbability { node: i as u32 });
                }
                let sum: f64 = n.probs.iter().sum();
                if libm::fabs(sum - 1.0) > PROB_TOLERANCE {
                    return Err(GameError::ChanceSum { node: i as u32, sum });
                }
            }
        }
        if self.nodes[root.index()].attached {
            return Err(GameError::AlreadyAttached { node: root.0 });
        }

        // Preorder numbering.
        let mut order = Vec::with_capacity(nb);
        let mut new_id = vec![NONE; nb];
        let mut stack = vec![root.0];
        while let Some(b) = stack.pop() {
            new_id[b as usize] = order.len() as u32;
            order.push(b);
            for &k in self.nodes[b as usize].kids.iter().rev() {
                stack.push(k);
            }
        }
        if let Some(i) = new_id.iter().position(|&x| x == NONE) {
            return Err(GameError::Disconnected { node: i as u32 });
        }

        let n = order.len();
        let mut kind = Vec::with_capacity(n);
        let mut parent = vec![NONE; n];
        let mut incoming = vec![NONE; n];
        let mut infoset = vec![NONE; n];
        let mut utility = vec![0.0; n];
        let mut child_start = vec![0u32; n];
        let mut child_len = vec![0u32; n];
        let mut children = Vec::with_capacity(n.saturating_sub(1));
        let mut edge_prob = Vec::with_capacity(n.saturating_sub(1));
        let mut set_new = vec![NONE; self.sets.len()];
        let mut sets: Vec<InfoSet> = Vec::new();
        let mut terminals = Vec::new();
        let mut total_actions = 0usize;

        for (i, &b) in order.iter().enumerate() {
            let bn = &self.nodes[b as usize];
            kind.push(bn.kind);
            utility[i] = bn.utility;
            child_start[i] = children.len() as u32;
            child_len[i] = bn.kids.len() as u32;
            for (k, &c) in bn.kids.iter().enumerate() {
                let c2 = new_id[c as usize];
                children.push(NodeId(c2));
                edge_prob.push(if bn.kind == NodeKind::Chance { bn.probs[k] } else { 1.0 });
                parent[c2 as usize] = i as u32;
                incoming[c2 as usize] = k as u32;
            }
            match bn.kind {
                NodeKind::Terminal => terminals.push(NodeId(i as u32)),
                NodeKind::Chance => {}
                NodeKind::Decision(_) => {
                    let bs = bn.set as usize;
                    if set_new[bs] == NONE {
                        set_new[bs] = sets.len() as u32;
                        let src = &self.sets[bs];
                        sets.push(InfoSet {
                            owner: src.owner,
                            members: Vec::new(),
                            num_actions: src.num_actions,
                            first_action: total_actions as u32,
                            seq_len: 0,
                            label: src.label.clone(),
                        });
                        total_actions += src.num_actions as usize;
                    }
                    infoset[i] = set_new[bs];
                    sets[set_new[bs] as usize].members.push(NodeId(i as u32));
                }
            }
        }

        // Top-down: chance reach, own sequence lengths, depth.
        let mut chance_reach = vec![1.0; n];
        let mut own_len = vec![[0u32; 2]; n];
        let mut depth = vec![0usize; n];
        for i in 0..n {
            let s = child_start[i] as usize;
            for k in 0..child_len[i] as usize {
                let c = children[s + k].index();
                chance_reach[c] = chance_reach[i] * edge_prob[s + k];
                own_len[c] = own_len[i];
                if let NodeKind::Decision(p) = kind[i] {
                    own_len[c][p.index()] += 1;
                }
                depth[c] = depth[i] + 1;
            }
        }
        for s in sets.iter_mut() {
            s.seq_len = own_len[s.members[0].index()][s.owner.index()];
        }

        // Bottom-up: subtree utility extremes.
        let mut subtree_min = vec![f64::INFINITY; n];
        let mut subtree_max = vec![f64::NEG_INFINITY; n];
        for i in (0..n).rev() {
            if kind[i] == NodeKind::Terminal {
                subtree_min[i] = utility[i];
                subtree_max[i] = utility[i];
            }
            if parent[i] != NONE {
                let p = parent[i] as usize;
                subtree_min[p] = subtree_min[p].min(subtree_min[i]);
                subtree_max[p] = subtree_max[p].max(subtree_max[i]);
            }
        }

        let u_max = terminals.iter().map(|t| libm::fabs(utility[t.index()])).fold(0.0, f64::max);
        let delta_set = sets
            .iter()
            .map(|s| {
                let hi = s.members.iter().map(|m| subtree_max[m.index()]).fold(f64::NEG_INFINITY, f64::max);
                let lo = s.members.iter().map(|m| subtree_min[m.index()]).fold(f64::INFINITY, f64::min);
                hi - lo
            })
            .collect();
        let mut a_max = [0usize; 2];
        let mut counts = [0usize; 2];
        for s in &sets {
            let p = s.owner.index();
            a_max[p] = a_max[p].max(s.num_actions as usize);
            counts[p] += 1;
        }
        let metrics = GameMetrics {
            u_max,
            delta: 2.0 * u_max,
            delta_set,
            a_max,
            infosets: counts,
            nodes: n,
            terminals: terminals.len(),
            depth: depth.iter().copied().max().unwrap_or(0),
        };

        Ok(GameTree {
            kind,
            parent,
            incoming,
            infoset,
            utility,
            child_start,
            child_len,
            children,
            edge_prob,
            chance_reach,
            subtree_min,
            subtree_max,
            infosets: sets,
            terminals,
            total_actions,
            metrics,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pennies() -> GameTree {
        let mut b = GameBuilder::new();
        let r = b.decision(Player::P1, &[], 2).unwrap();
        for a in 0..2 {
            let d = b.decision(Player::P2, &[], 2).unwrap();
            b.attach(r, a, d).unwrap();
            for c in 0..2 {
                let t = b.terminal(if a == c { 1.0 } else { -1.0 });
                b.attach(d, c, t).unwrap();
            }
        }
        b.finish(r).unwrap()
    }

    #[test]
    fn preorder_numbering() {
        let g = pennies();
        assert_eq!(g.num_nodes(), 7);
        for i in 1..g.num_nodes() as u32 {
            assert!(g.parent(NodeId(i)).unwrap().0 < i);
        }
        assert_eq!(g.num_infosets(), 2);
        assert_eq!(g.infoset(InfosetId(1)).members().len(), 2);
        assert_eq!(g.action_range(InfosetId(1)), 2..4);
        assert_eq!(g.metrics().u_max, 1.0);
        assert_eq!(g.metrics().delta_set, vec![2.0, 2.0]);
        assert!(g.has_perfect_recall());
    }

    #[test]
    fn out_of_order_construction_is_renumbered() {
        let mut b = GameBuilder::new();
        let t1 = b.terminal(1.0);
        let t2 = b.terminal(2.0);
        let c = b.chance(&[0.25, 0.75]);
        b.attach(c, 0, t1).unwrap();
        b.attach(c, 1, t2).unwrap();
        let g = b.finish(c).unwrap();
        assert_eq!(g.kind(g.root()), NodeKind::Chance);
        assert_eq!(g.utility(NodeId(2)), 2.0);
        assert_eq!(g.chance_reach(NodeId(2)), 0.75);
    }

    #[test]
    fn rejects_bad_chance() {
        let mut b = GameBuilder::new();
        let c = b.chance(&[0.5, 0.4]);
        let t1 = b.terminal(0.0);
        let t2 = b.terminal(0.0);
        b.attach(c, 0, t1).unwrap();
        b.attach(c, 1, t2).unwrap();
        assert!(matches!(b.finish(c), Err(GameError::ChanceSum { .. })));
    }

    #[test]
    fn rejects_mixed_action_counts() {
        let mut b = GameBuilder::new();
        b.decision(Player::P1, &[7], 2).unwrap();
        assert!(matches!(b.decision(Player::P1, &[7], 3), Err(GameError::ActionCountMismatch { .. })));
    }

    #[test]
    fn rejects_missing_child() {
        let mut b = GameBuilder::new();
        let r = b.decision(Player::P1, &[], 2).unwrap();
        let t = b.terminal(0.0);
        b.attach(r, 0, t).unwrap();
        assert!(matches!(b.finish(r), Err(GameError::MissingChild { .. })));
    }

    #[test]
    fn raw_round_trip() {
        let g = pennies();
        let raw = g.to_raw();
        let g2 = GameTree::from_raw(&raw).unwrap();
        assert_eq!(g2.to_raw(), raw);
    }

    #[test]
    fn detects_recall_violation() {
        // P1 acts, then P1 again in one set regardless of the first action.
        let mut b = GameBuilder::new();
        let r = b.decision(Player::P1, &[0], 2).unwrap();
        for a in 0..2 {
            let d = b.decision(Player::P1, &[1], 2).unwrap();
            b.attach(r, a, d).unwrap();
            for c in 0..2 {
                let t = b.terminal((a + c) as f64);
                b.attach(d, c, t).unwrap();
            }
        }
        let g = b.finish(r).unwrap();
        assert_eq!(g.perfect_recall_violations(), vec![InfosetId(1)]);
    }
}

//! Pure best responses on the original game tree.
//!
//! The search is recursive with a per-node cache. When it first meets a node of the
//! responding player it decides the whole information set at once. Each action is scored
//! by summing the values of that action's children over all members. Subtrees with zero
//! weight are skipped. Optionally, actions whose upper bound cannot beat the best action
//! found so far are skipped too.

use alloc::vec;
use alloc::vec::Vec;

use super::Policy;
use crate::game::{GameTree, InfosetId, NodeId, NodeKind, Player};

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrOptions {
    pub pruning: bool,
    /// A later action replaces the incumbent only if it is better by more than this.
    pub tie_tolerance: f64,
}

impl Default for BrOptions {
    fn default() -> Self {
        BrOptions { pruning: true, tie_tolerance: 1e-10 }
    }
}

/// How to bound the value of a subtree given its weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    /// `weight * best utility for the responder below the node`.
    BestUtility,
    /// `weight * largest absolute utility below the node`.
    AbsUtility,
}

/// Deterministic pure strategy of one player. Only the sets it can reach itself carry an
/// action.
#[derive(Debug, Clone, PartialEq)]
pub struct PureResponse {
    player: Player,
    actions: Vec<u32>,
}

impl PureResponse {
    pub fn player(&self) -> Player {
        self.player
    }
    pub fn action(&self, s: InfosetId) -> Option<usize> {
        let a = self.actions[s.index()];
        (a != NONE).then_some(a as usize)
    }
    pub fn is_reachable(&self, s: InfosetId) -> bool {
        self.actions[s.index()] != NONE
    }
    /// Number of sets with an action.
    pub fn prescribed_count(&self) -> usize {
        self.actions.iter().filter(|&&a| a != NONE).count()
    }
    pub fn prescribed(&self) -> impl Iterator<Item = (InfosetId, usize)> + '_ {
        self.actions
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != NONE)
            .map(|(s, &a)| (InfosetId(s as u32), a as usize))
    }

    /// Builds a response from explicit choices, completed over own-reachable sets. Sets
    /// with no choice play their first action.
    pub fn from_choices(game: &GameTree, player: Player, choice: &[u32]) -> Self {
        let n = game.num_nodes();
        let mut reach = vec![false; n];
        reach[0] = true;
        let mut actions = vec![NONE; game.num_infosets()];
        for i in 0..n as u32 {
            if !reach[i as usize] {
                continue;
            }
            let node = NodeId(i);
            if game.kind(node) == NodeKind::Decision(player) {
                let s = game.infoset_of(node).unwrap();
                let k = if choice[s.index()] == NONE { 0 } else { choice[s.index()] };
                actions[s.index()] = k;
                reach[game.child(node, k as usize).index()] = true;
            } else {
                for &c in game.children(node) {
                    reach[c.index()] = true;
                }
            }
        }
        PureResponse { player, actions }
    }

    /// The response as a behavioral strategy. Rows the response does not cover come from `rest`.
    pub fn to_strategy<P: Policy + ?Sized>(&self, game: &GameTree, rest: &P) -> super::BehavioralStrategy {
        let mut b = super::BehavioralStrategy::from_policy(game, rest);
        for (s, k) in self.prescribed() {
            let row = b.row_mut(game, s);
            row.iter_mut().for_each(|x| *x = 0.0);
            row[k] = 1.0;
        }
        b
    }
}

#[derive(Debug, Clone)]
pub struct BestResponse {
    /// Responder's expected utility (or the weighted leaf objective for custom problems).
    pub value: f64,
    pub response: PureResponse,
    /// Largest number of cached node values held during the search.
    pub cache_peak: usize,
}

struct Search<'a> {
    game: &'a GameTree,
    responder: Player,
    weight: &'a [f64],
    leaf: &'a [f64],
    bound: Option<Bound>,
    tol: f64,
    cache: Vec<f64>,
    cached: usize,
    peak: usize,
    choice: Vec<u32>,
}

impl<'a> Search<'a> {
    fn value(&mut self, n: NodeId) -> f64 {
        let i = n.index();
        if self.weight[i] == 0.0 {
            return 0.0;
        }
        match self.game.kind(n) {
            NodeKind::Terminal => self.leaf[i],
            NodeKind::Decision(p) if p == self.responder => {
                if self.cache[i].is_nan() {
                    self.decide(self.game.infoset_of(n).unwrap());
                }
                self.cache[i]
            }
            _ => {
                let g = self.game;
                g.children(n).iter().map(|&c| self.value(c)).sum()
            }
        }
    }

    fn upper(&self, n: NodeId) -> f64 {
        let w = self.weight[n.index()];
        match self.bound {
            Some(Bound::BestUtility) => w * self.game.subtree_best_for(n, self.responder),
            Some(Bound::AbsUtility) => {
                let g = self.game;
                w * g.subtree_max_utility(n).abs().max(g.subtree_min_utility(n).abs())
            }
            None => f64::INFINITY,
        }
    }

    fn decide(&mut self, s: InfosetId) {
        let g = self.game;
        let members = g.infoset(s).members();
        let na = g.num_actions(s);
        let mut vals = vec![0.0; members.len() * na];
        let mut best: Option<(usize, f64)> = None;
        for k in 0..na {
            if let Some((_, bv)) = best {
                if self.bound.is_some() {
                    let ub: f64 = members
                        .iter()
                        .filter(|m| self.weight[m.index()] != 0.0)
                        .map(|&m| self.upper(g.child(m, k)))
                        .sum();
                    if ub <= bv + self.tol {
                        continue;
                    }
                }
            }
            let mut sum = 0.0;
            for (j, &m) in members.iter().enumerate() {
                if self.weight[m.index()] == 0.0 {
                    continue;
                }
                let v = self.value(g.child(m, k));
                vals[j * na + k] = v;
                sum += v;
            }
            match best {
                Some((_, bv)) if sum <= bv + self.tol => {}
                _ => best = Some((k, sum)),
            }
        }
        let (k, _) = best.unwrap();
        self.choice[s.index()] = k as u32;
        for (j, &m) in members.iter().enumerate() {
            if self.weight[m.index()] != 0.0 {
                self.cache[m.index()] = vals[j * na + k];
                self.cached += 1;
            }
        }
        self.peak = self.peak.max(self.cached);
    }
}

/// Maximizes the sum of `leaf` values over pure strategies of `responder`.
///
/// `weight` marks live nodes (non-zero) and scales the optional pruning bound. `leaf[z]`
/// must already include all reach factors of the leaf.
pub fn solve_response(
    game: &GameTree,
    responder: Player,
    weight: &[f64],
    leaf: &[f64],
    bound: Option<Bound>,
    tie_tolerance: f64,
) -> BestResponse {
    let n = game.num_nodes();
    let mut search = Search {
        game,
        responder,
        weight,
        leaf,
        bound,
        tol: tie_tolerance,
        cache: vec![f64::NAN; n],
        cached: 0,
        peak: 0,
        choice: vec![NONE; game.num_infosets()],
    };
    let value = search.value(game.root());
    let response = PureResponse::from_choices(game, responder, &search.choice);
    BestResponse { value, response, cache_peak: search.peak }
}

/// Best response of `responder` to `opponent` (only the opponent's rows are read).
pub fn best_response<P: Policy + ?Sized>(
    game: &GameTree,
    responder: Player,
    opponent: &P,
    opts: BrOptions,
) -> BestResponse {
    let n = game.num_nodes();
    let mut weight = vec![0.0; n];
    weight[0] = 1.0;
    let mut leaf = vec![0.0; n];
    let opp = responder.opponent();
    for i in 0..n as u32 {
        let node = NodeId(i);
        let w = weight[i as usize];
        match game.kind(node) {
            NodeKind::Terminal => leaf[i as usize] = w * game.utility_for(node, responder),
            NodeKind::Chance => {
                for (&c, &p) in game.children(node).iter().zip(game.edge_probs(node)) {
                    weight[c.index()] = w * p;
                }
            }
            NodeKind::Decision(p) if p == opp => {
                let row = opponent.probs(game, game.infoset_of(node).unwrap());
                for (&c, &q) in game.children(node).iter().zip(row) {
                    weight[c.index()] = w * q;
                }
            }
            NodeKind::Decision(_) => {
                for &c in game.children(node) {
                    weight[c.index()] = w;
                }
            }
        }
    }
    let bound = opts.pruning.then_some(Bound::BestUtility);
    solve_response(game, responder, &weight, &leaf, bound, opts.tie_tolerance)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exploitability {
    /// First player's best-response utility against the second player's strategy.
    pub p1_response_value: f64,
    /// Second player's best-response utility against the first player's strategy.
    pub p2_response_value: f64,
    /// Sum of both; zero exactly at an equilibrium.
    pub sum: f64,
    pub cache_peak: usize,
    pub response_peak: usize,
}

pub fn exploitability<A: Policy + ?Sized, B: Policy + ?Sized>(
    game: &GameTree,
    p1: &A,
    p2: &B,
    opts: BrOptions,
) -> Exploitability {
    let r1 = best_response(game, Player::P1, p2, opts);
    let r2 = best_response(game, Player::P2, p1, opts);
    Exploitability {
        p1_response_value: r1.value,
        p2_response_value: r2.value,
        sum: r1.value + r2.value,
        cache_peak: r1.cache_peak.max(r2.cache_peak),
        response_peak: r1.response.prescribed_count().max(r2.response.prescribed_count()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::test_games;
    use crate::strategy::BehavioralStrategy;

    #[test]
    fn pennies_uniform_is_unexploitable() {
        let g = test_games::matching_pennies();
        let u = BehavioralStrategy::uniform(&g);
        let e = exploitability(&g, &u, &u, BrOptions::default());
        assert!(e.sum.abs() < 1e-15);
    }

    #[test]
    fn pennies_pure_is_exploited() {
        let g = test_games::matching_pennies();
        let b = BehavioralStrategy::first_action(&g);
        let r = best_response(&g, Player::P2, &b, BrOptions::default());
        assert_eq!(r.value, 1.0);
        assert_eq!(r.response.action(InfosetId(1)), Some(1));
        assert_eq!(r.response.prescribed_count(), 1);
    }

    #[test]
    fn ties_pick_lowest_action() {
        let g = test_games::matching_pennies();
        let u = BehavioralStrategy::uniform(&g);
        let r = best_response(&g, Player::P1, &u, BrOptions::default());
        assert_eq!(r.response.action(InfosetId(0)), Some(0));
    }

    #[test]
    fn oscillator_value_against_uniform() {
        let g = test_games::oscillator();
        let u = BehavioralStrategy::uniform(&g);
        let r = best_response(&g, Player::P1, &u, BrOptions::default());
        // I': c gives 5, d gives 0.5; I'': c gives 0.5, d gives 5.
        assert!((r.value - 5.0).abs() < 1e-12);
    }
}

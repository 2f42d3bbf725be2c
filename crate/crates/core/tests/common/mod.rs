//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use irabs_core::domains::Domain;
use irabs_core::game::{GameBuilder, GameTree, InfosetId, NodeId, NodeKind, Player};
use irabs_core::strategy::{expected_utility, BehavioralStrategy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Number of pure strategies of `player` (one action per set), saturating.
pub fn pure_count(game: &GameTree, player: Player) -> usize {
    game.infosets_of(player).fold(1usize, |acc, s| acc.saturating_mul(game.num_actions(s)))
}

/// Every pure strategy of `player` as a behavioral strategy; the other player's rows are
/// uniform.
pub fn pure_strategies(game: &GameTree, player: Player) -> Vec<BehavioralStrategy> {
    let sets: Vec<InfosetId> = game.infosets_of(player).collect();
    let mut digits = vec![0usize; sets.len()];
    let mut out = Vec::new();
    loop {
        let mut b = BehavioralStrategy::uniform(game);
        for (j, &s) in sets.iter().enumerate() {
            let row = b.row_mut(game, s);
            row.iter_mut().for_each(|x| *x = 0.0);
            row[digits[j]] = 1.0;
        }
        out.push(b);
        let mut j = 0;
        loop {
            if j == sets.len() {
                return out;
            }
            digits[j] += 1;
            if digits[j] < game.num_actions(sets[j]) {
                break;
            }
            digits[j] = 0;
            j += 1;
        }
    }
}

/// Utility of `player` when it plays `own` against `other`.
pub fn utility(game: &GameTree, player: Player, own: &BehavioralStrategy, other: &BehavioralStrategy) -> f64 {
    match player {
        Player::P1 => expected_utility(game, own, other),
        Player::P2 => -expected_utility(game, other, own),
    }
}

/// Best-response value by enumeration.
pub fn brute_response(game: &GameTree, responder: Player, opponent: &BehavioralStrategy) -> f64 {
    pure_strategies(game, responder)
        .iter()
        .map(|p| utility(game, responder, p, opponent))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Largest change in the opponent's utility between `player` using `a` and using `b`.
pub fn brute_delta(game: &GameTree, player: Player, a: &BehavioralStrategy, b: &BehavioralStrategy) -> f64 {
    let opp = player.opponent();
    pure_strategies(game, opp)
        .iter()
        .map(|y| (utility(game, opp, y, a) - utility(game, opp, y, b)).abs())
        .fold(0.0, f64::max)
}

/// Random behavioral strategy with occasional zero entries.
pub fn random_strategy(game: &GameTree, rng: &mut ChaCha8Rng) -> BehavioralStrategy {
    let mut b = BehavioralStrategy::uniform(game);
    for s in game.infoset_ids() {
        let row = b.row_mut(game, s);
        for x in row.iter_mut() {
            *x = if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.01..1.0) };
        }
        let sum: f64 = row.iter().sum();
        if sum == 0.0 {
            row[0] = 1.0;
        } else {
            row.iter_mut().for_each(|x| *x /= sum);
        }
    }
    b
}

/// Random pure strategy for both players.
pub fn random_pure(game: &GameTree, rng: &mut ChaCha8Rng) -> BehavioralStrategy {
    let mut b = BehavioralStrategy::uniform(game);
    for s in game.infoset_ids() {
        let k = rng.gen_range(0..game.num_actions(s));
        let row = b.row_mut(game, s);
        row.iter_mut().for_each(|x| *x = 0.0);
        row[k] = 1.0;
    }
    b
}

struct Grow<'a> {
    b: GameBuilder,
    rng: &'a mut ChaCha8Rng,
    max_depth: u32,
}

fn key_actions(key: &[u32]) -> usize {
    let h = key.iter().fold(17u64, |h, &x| h.wrapping_mul(31).wrapping_add(x as u64));
    2 + (h % 2) as usize
}

/// A player's view is everything it has observed, own actions included, so every
/// generated game has perfect recall. Observations of the other player's moves and of
/// chance are random, which merges histories into multi-node sets.
fn grow(g: &mut Grow, depth: u32, view: [Vec<u32>; 2]) -> NodeId {
    if depth >= g.max_depth || (depth >= 2 && g.rng.gen_bool(0.2)) {
        let u = g.rng.gen_range(-6..=6) as f64;
        return g.b.terminal(u);
    }
    if g.rng.gen_bool(0.2) {
        let k = g.rng.gen_range(2..=3);
        let raw: Vec<f64> = (0..k).map(|_| g.rng.gen_range(1..=4) as f64).collect();
        let total: f64 = raw.iter().sum();
        let probs: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let n = g.b.chance(&probs);
        let seen = [g.rng.gen_bool(0.5), g.rng.gen_bool(0.5)];
        for j in 0..k {
            let mut v = view.clone();
            for p in 0..2 {
                if seen[p] {
                    v[p].push(100 + j as u32);
                }
            }
            let c = grow(g, depth + 1, v);
            g.b.attach(n, j, c).unwrap();
        }
        return n;
    }
    let p = if g.rng.gen_bool(0.5) { Player::P1 } else { Player::P2 };
    let me = p.index();
    let key = view[me].clone();
    let k = key_actions(&key);
    let n = g.b.decision(p, &key, k).unwrap();
    let seen = g.rng.gen_bool(0.4);
    for a in 0..k {
        let mut v = view.clone();
        v[me].push(a as u32);
        if seen {
            v[1 - me].push(200 + a as u32);
        }
        let c = grow(g, depth + 1, v);
        g.b.attach(n, a, c).unwrap();
    }
    n
}

/// Random perfect-recall game of depth at most `max_depth`.
pub fn random_game(seed: u64, max_depth: u32) -> GameTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Grow { b: GameBuilder::new(), rng: &mut rng, max_depth };
    let root = grow(&mut g, 0, [Vec::new(), Vec::new()]);
    g.b.finish(root).unwrap()
}

pub fn domain(name: &str) -> GameTree {
    name.parse::<Domain>().unwrap().build()
}

/// Named games whose pure strategy counts are at most 500 for both players.
pub fn small_games() -> Vec<(&'static str, GameTree)> {
    let names = ["matching_pennies", "fig2_game", "oscillator", "refinement_example", "GS2", "GP1"];
    names
        .iter()
        .map(|&n| (n, domain(n)))
        .filter(|(_, g)| pure_count(g, Player::P1) <= 500 && pure_count(g, Player::P2) <= 500)
        .collect()
}

/// Sum over leaves of chance reach times both players' reach.
pub fn leaf_mass(game: &GameTree, b: &BehavioralStrategy) -> f64 {
    let n = game.num_nodes();
    let mut reach = vec![0.0; n];
    reach[0] = 1.0;
    let mut total = 0.0;
    for i in 0..n {
        let node = NodeId(i as u32);
        match game.kind(node) {
            NodeKind::Terminal => total += reach[i],
            NodeKind::Chance => {
                for (c, p) in game.children(node).iter().zip(game.edge_probs(node)) {
                    reach[c.index()] = reach[i] * p;
                }
            }
            NodeKind::Decision(_) => {
                let row = b.row(game, game.infoset_of(node).unwrap());
                for (c, p) in game.children(node).iter().zip(row) {
                    reach[c.index()] = reach[i] * p;
                }
            }
        }
    }
    total
}

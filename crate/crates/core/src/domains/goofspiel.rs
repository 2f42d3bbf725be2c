//! Goofspiel with a known prize order, played sequentially with hidden bids.
//!
//! Both players hold cards `1..=n`. In round `k`, the prize card `order[k]` is contested.
//! The first player bids first and the second player bids without seeing that bid. The
//! higher bid wins the prize and equal bids discard it. Players observe only who won each
//! round. The first player's payoff is own points minus opponent points. The last round
//! is kept even though each player then has a single card left.

use alloc::vec::Vec;

use crate::game::{GameBuilder, GameTree, NodeId, Player};

const P1_WON: u32 = 0;
const P2_WON: u32 = 1;
const TIE: u32 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoofspielConfig {
    pub n: u32,
    /// Prize card contested in each round.
    pub order: Vec<u32>,
}

impl GoofspielConfig {
    pub fn new(n: u32) -> Self {
        GoofspielConfig { n, order: (1..=n).collect() }
    }
}

struct Ctx<'a> {
    cfg: &'a GoofspielConfig,
    b: GameBuilder,
}

pub fn goofspiel(cfg: &GoofspielConfig) -> GameTree {
    assert_eq!(cfg.order.len(), cfg.n as usize, "prize order must list every round");
    let mut ctx = Ctx { cfg, b: GameBuilder::new() };
    let full = ((1u32 << cfg.n) - 1) << 1;
    let root = round(&mut ctx, 0, [full, full], 0, [Vec::new(), Vec::new()]);
    ctx.b.finish(root).unwrap()
}

fn cards(mask: u32) -> Vec<u32> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

/// `seen[p]` interleaves `p`'s own bids with the public round outcomes.
fn round(ctx: &mut Ctx, k: usize, hands: [u32; 2], score: i32, seen: [Vec<u32>; 2]) -> NodeId {
    if k == ctx.cfg.n as usize {
        return ctx.b.terminal(score as f64);
    }
    let mine = cards(hands[0]);
    let theirs = cards(hands[1]);
    let n1 = ctx.b.decision(Player::P1, &seen[0], mine.len()).unwrap();
    for (a, &c1) in mine.iter().enumerate() {
        let n2 = ctx.b.decision(Player::P2, &seen[1], theirs.len()).unwrap();
        ctx.b.attach(n1, a, n2).unwrap();
        for (bid, &c2) in theirs.iter().enumerate() {
            let prize = ctx.cfg.order[k] as i32;
            let (outcome, delta) = match c1.cmp(&c2) {
                core::cmp::Ordering::Greater => (P1_WON, prize),
                core::cmp::Ordering::Less => (P2_WON, -prize),
                core::cmp::Ordering::Equal => (TIE, 0),
            };
            let mut nseen = seen.clone();
            nseen[0].extend_from_slice(&[c1, outcome]);
            nseen[1].extend_from_slice(&[c2, outcome]);
            let next_hands = [hands[0] & !(1 << c1), hands[1] & !(1 << c2)];
            let child = round(ctx, k + 1, next_hands, score + delta, nseen);
            ctx.b.attach(n2, bid, child).unwrap();
        }
    }
    n1
}

//! Two-round poker with a 12-card deck: four ranks with three copies each.
//!
//! Each player antes 1 and gets one private card. In the first round the first player
//! acts first. A player who faces no bet may check or bet one of the allowed sizes. A
//! player facing a bet or raise may fold, call, or raise by one of the allowed sizes, as
//! long as the number of consecutive raises stays within the cap. The round ends on a
//! call or after two checks. One shared card is then revealed, and the second round
//! follows the same rules. At showdown a private card that pairs the shared card wins.
//! Otherwise the higher rank wins. Equal ranks split the pot.

use alloc::vec;
use alloc::vec::Vec;

use crate::game::{GameBuilder, GameTree, NodeId, Player};

pub const RANKS: usize = 4;
pub const COPIES: usize = 3;

const CHECK: u32 = 0;
const CALL: u32 = 1;
const FOLD: u32 = 2;
const BET: u32 = 10;
const RAISE: u32 = 20;
const ROUND_END: u32 = 99;
const HIDDEN: u32 = 98;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PokerConfig {
    /// Sizes available for an opening bet.
    pub bets: Vec<u32>,
    /// Sizes available for a raise, added on top of the call amount.
    pub raises: Vec<u32>,
    /// Maximum number of consecutive raises within a round.
    pub max_raises: u32,
}

impl PokerConfig {
    /// `b` bet sizes valued 1..=b, `r` raise sizes valued 1..=r, at most `c` raises in a row.
    pub fn new(b: u32, r: u32, c: u32) -> Self {
        PokerConfig { bets: (1..=b).collect(), raises: (1..=r).collect(), max_raises: c }
    }
}

#[derive(Clone)]
struct State {
    cards: [u32; 2],
    shared: Option<u32>,
    round: u32,
    pot: [u32; 2],
    to_act: Player,
    facing: bool,
    raises: u32,
    history: Vec<u32>,
}

pub fn poker(cfg: &PokerConfig) -> GameTree {
    let mut b = GameBuilder::new();
    let first = b.chance(&[COPIES as f64 / (RANKS * COPIES) as f64; RANKS]);
    for r1 in 0..RANKS as u32 {
        let probs: Vec<f64> = (0..RANKS as u32)
            .map(|r| {
                let left = if r == r1 { COPIES - 1 } else { COPIES };
                left as f64 / (RANKS * COPIES - 1) as f64
            })
            .collect();
        let second = b.chance(&probs);
        b.attach(first, r1 as usize, second).unwrap();
        for r2 in 0..RANKS as u32 {
            let st = State {
                cards: [r1, r2],
                shared: None,
                round: 1,
                pot: [1, 1],
                to_act: Player::P1,
                facing: false,
                raises: 0,
                history: Vec::new(),
            };
            let n = betting(&mut b, cfg, st);
            b.attach(second, r2 as usize, n).unwrap();
        }
    }
    b.finish(first).unwrap()
}

fn actions(cfg: &PokerConfig, st: &State) -> Vec<u32> {
    let mut acts = Vec::new();
    if st.facing {
        acts.push(FOLD);
        acts.push(CALL);
        if st.raises < cfg.max_raises {
            acts.extend((0..cfg.raises.len() as u32).map(|k| RAISE + k));
        }
    } else {
        acts.push(CHECK);
        acts.extend((0..cfg.bets.len() as u32).map(|k| BET + k));
    }
    acts
}

fn betting(b: &mut GameBuilder, cfg: &PokerConfig, st: State) -> NodeId {
    let p = st.to_act;
    let mut key = vec![st.cards[p.index()], st.shared.unwrap_or(HIDDEN)];
    key.extend_from_slice(&st.history);
    let acts = actions(cfg, &st);
    let node = b.decision(p, &key, acts.len()).unwrap();
    let me = p.index();
    let other = p.opponent().index();
    for (k, &a) in acts.iter().enumerate() {
        let mut nx = st.clone();
        nx.history.push(a);
        let child = match a {
            FOLD => {
                let u = if p == Player::P1 { -(st.pot[me] as f64) } else { st.pot[other] as f64 };
                b.terminal(u)
            }
            CALL => {
                nx.pot[me] = nx.pot[other];
                end_round(b, cfg, nx)
            }
            CHECK => {
                if p == Player::P2 {
                    end_round(b, cfg, nx)
                } else {
                    nx.to_act = Player::P2;
                    betting(b, cfg, nx)
                }
            }
            _ if a >= RAISE => {
                nx.pot[me] = nx.pot[other] + cfg.raises[(a - RAISE) as usize];
                nx.raises += 1;
                nx.to_act = p.opponent();
                betting(b, cfg, nx)
            }
            _ => {
                nx.pot[me] += cfg.bets[(a - BET) as usize];
                nx.facing = true;
                nx.raises = 0;
                nx.to_act = p.opponent();
                betting(b, cfg, nx)
            }
        };
        b.attach(node, k, child).unwrap();
    }
    node
}

fn end_round(b: &mut GameBuilder, cfg: &PokerConfig, mut st: State) -> NodeId {
    if st.round == 2 {
        return b.terminal(showdown(&st));
    }
    st.history.push(ROUND_END);
    let left: Vec<f64> = (0..RANKS as u32)
        .map(|r| (COPIES - st.cards.iter().filter(|&&c| c == r).count()) as f64)
        .collect();
    let total: f64 = left.iter().sum();
    let probs: Vec<f64> = left.iter().map(|l| l / total).collect();
    let node = b.chance(&probs);
    for r in 0..RANKS as u32 {
        let mut nx = st.clone();
        nx.shared = Some(r);
        nx.round = 2;
        nx.to_act = Player::P1;
        nx.facing = false;
        nx.raises = 0;
        let child = betting(b, cfg, nx);
        b.attach(node, r as usize, child).unwrap();
    }
    node
}

/// First player's payoff at showdown.
fn showdown(st: &State) -> f64 {
    let shared = st.shared.unwrap();
    let pair = [st.cards[0] == shared, st.cards[1] == shared];
    let win = match (pair[0], pair[1]) {
        (true, false) => 1,
        (false, true) => -1,
        _ => (st.cards[0] as i32 - st.cards[1] as i32).signum(),
    };
    win as f64 * st.pot[0] as f64
}

//! Game generators and a compact naming scheme for them.
//!
//! Names: `P<b><r><c>` for poker with `b` bet sizes, `r` raise sizes and at most `c`
//! consecutive raises. `GS<n>` for Goofspiel with `n` cards. `GP<x>` for graph pursuit on
//! the default graph with `x` rounds. Plus `matching_pennies`, `fig2_game`, `oscillator`
//! and `refinement_example`.

pub mod goofspiel;
pub mod poker;
pub mod pursuit;
pub mod test_games;

use alloc::string::{String, ToString};
use core::fmt;
use core::str::FromStr;

pub use goofspiel::{goofspiel, GoofspielConfig};
pub use poker::{poker, PokerConfig};
pub use pursuit::{pursuit, Graph, PursuitConfig, CAUGHT, GOAL};

use crate::game::GameTree;

/// Round limit of the graph pursuit instance used when none is given.
pub const DEFAULT_PURSUIT_ROUNDS: u32 = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Domain {
    Poker(PokerConfig),
    Goofspiel(GoofspielConfig),
    Pursuit(PursuitConfig),
    MatchingPennies,
    Fig2,
    Oscillator,
    RefinementExample,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown domain `{0}`")]
pub struct UnknownDomain(pub String);

impl Domain {
    pub fn build(&self) -> GameTree {
        match self {
            Domain::Poker(c) => poker(c),
            Domain::Goofspiel(c) => goofspiel(c),
            Domain::Pursuit(c) => pursuit(c),
            Domain::MatchingPennies => test_games::matching_pennies(),
            Domain::Fig2 => test_games::fig2_game(),
            Domain::Oscillator => test_games::oscillator(),
            Domain::RefinementExample => test_games::refinement_example(),
        }
    }
}

fn digits(s: &str) -> Option<u32> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

impl FromStr for Domain {
    type Err = UnknownDomain;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || UnknownDomain(s.to_string());
        match s {
            "matching_pennies" => return Ok(Domain::MatchingPennies),
            "fig2_game" => return Ok(Domain::Fig2),
            "oscillator" => return Ok(Domain::Oscillator),
            "refinement_example" => return Ok(Domain::RefinementExample),
            "GP" => return Ok(Domain::Pursuit(PursuitConfig::default_graph(DEFAULT_PURSUIT_ROUNDS))),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("GS") {
            let n = digits(rest).filter(|n| (1..=12).contains(n)).ok_or_else(err)?;
            return Ok(Domain::Goofspiel(GoofspielConfig::new(n)));
        }
        if let Some(rest) = s.strip_prefix("GP") {
            let x = digits(rest).filter(|&x| x >= 1).ok_or_else(err)?;
            return Ok(Domain::Pursuit(PursuitConfig::default_graph(x)));
        }
        if let Some(rest) = s.strip_prefix('P') {
            let b = rest.as_bytes();
            if b.len() == 3 && b.iter().all(|c| c.is_ascii_digit()) {
                let d = |i: usize| (b[i] - b'0') as u32;
                if d(0) >= 1 && d(1) >= 1 {
                    return Ok(Domain::Poker(PokerConfig::new(d(0), d(1), d(2))));
                }
            }
        }
        Err(err())
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Poker(c) => write!(f, "P{}{}{}", c.bets.len(), c.raises.len(), c.max_raises),
            Domain::Goofspiel(c) => write!(f, "GS{}", c.n),
            Domain::Pursuit(c) => write!(f, "GP{}", c.max_rounds),
            Domain::MatchingPennies => f.write_str("matching_pennies"),
            Domain::Fig2 => f.write_str("fig2_game"),
            Domain::Oscillator => f.write_str("oscillator"),
            Domain::RefinementExample => f.write_str("refinement_example"),
        }
    }
}

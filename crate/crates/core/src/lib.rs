//! Solvers for two-player zero-sum extensive-form games that work on imperfect-recall
//! abstractions refined on the fly.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, timing and the command line
//! live in the companion `irabs` crate.
//!
//! Layout:
//! - [`game`] holds the game tree and its derived metrics.
//! - [`domains`] generates poker, Goofspiel, graph pursuit and small test games.
//! - [`strategy`] has behavioral strategies, reach computations and best responses.
//! - [`abstraction`] holds the original-to-abstract mapping and its storage accounting.
//! - [`fpira`] is fictitious play, plain and abstracted.
//! - [`cfr`] is CFR+, plain and abstracted.
//! - [`run`] is the iteration loop and per-checkpoint trace rows.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod abstraction;
pub mod cfr;
pub mod domains;
pub mod fpira;
pub mod game;
pub mod run;
pub mod strategy;

pub use abstraction::{AbsId, Abstraction};
pub use game::{GameBuilder, GameError, GameTree, InfosetId, NodeId, NodeKind, Player};

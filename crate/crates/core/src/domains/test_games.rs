//! Small hand-built games used by tests and examples.

use crate::game::{GameBuilder, GameTree, Player};

/// Simultaneous matching pennies: the first player wins 1 on a match.
pub fn matching_pennies() -> GameTree {
    let mut b = GameBuilder::new();
    let r = b.decision_labeled(Player::P1, &[], 2, "I").unwrap();
    for a in 0..2 {
        let d = b.decision_labeled(Player::P2, &[], 2, "J").unwrap();
        b.attach(r, a, d).unwrap();
        for c in 0..2 {
            let t = b.terminal(if a == c { 1.0 } else { -1.0 });
            b.attach(d, c, t).unwrap();
        }
    }
    b.finish(r).unwrap()
}

/// The first player picks a or b, the second player picks x or y unseen, then the first
/// player continues in I1 (after a) or I2 (after b). I1 offers c, leading to I3, or d,
/// which ends the game. I2 offers e, leading to I4, or f, which ends the game. I1 and I2
/// have equal sequence length and action count, and so do I3 and I4. The initial
/// abstraction therefore merges each pair, and the merged pairs lose perfect recall.
pub fn fig2_game() -> GameTree {
    let mut b = GameBuilder::new();
    let root = b.decision_labeled(Player::P1, &[0], 2, "I0").unwrap();
    let mut u = 0.0;
    let mut next = || {
        u += 1.0;
        // Spread utilities so that no two leaves tie.
        (u * 7.0) % 11.0 - 5.0
    };
    for first in 0..2u32 {
        let j = b.decision_labeled(Player::P2, &[0], 2, "J1").unwrap();
        b.attach(root, first as usize, j).unwrap();
        for second in 0..2 {
            let (mid, low) = if first == 0 { ("I1", "I3") } else { ("I2", "I4") };
            let m = b.decision_labeled(Player::P1, &[1, first], 2, mid).unwrap();
            b.attach(j, second, m).unwrap();
            let l = b.decision_labeled(Player::P1, &[2, first], 2, low).unwrap();
            b.attach(m, 0, l).unwrap();
            let stop = b.terminal(next());
            b.attach(m, 1, stop).unwrap();
            for k in 0..2 {
                let t = b.terminal(next());
                b.attach(l, k, t).unwrap();
            }
        }
    }
    b.finish(root).unwrap()
}

/// Chance picks X' or X'' evenly. The second player then picks L or R without seeing
/// chance. The first player sees only the chance outcome and picks c or d in I1 (after X')
/// or I2 (after X'').
///
/// | first player payoff | X' L | X' R | X'' L | X'' R |
/// |---------------------|------|------|-------|-------|
/// | c                   | 0    | 10   | 0     | 1     |
/// | d                   | 1    | 0    | 10    | 0     |
///
/// The game value is 5. If I1 and I2 share one strategy, the value drops to 2.75.
pub fn oscillator() -> GameTree {
    let pay = [[[0.0, 1.0], [10.0, 0.0]], [[0.0, 10.0], [1.0, 0.0]]];
    let mut b = GameBuilder::new();
    let root = b.chance(&[0.5, 0.5]);
    for x in 0..2 {
        let j = b.decision_labeled(Player::P2, &[0], 2, "J").unwrap();
        b.attach(root, x, j).unwrap();
        for lr in 0..2 {
            let label = if x == 0 { "I1" } else { "I2" };
            let i = b.decision_labeled(Player::P1, &[x as u32], 2, label).unwrap();
            b.attach(j, lr, i).unwrap();
            for k in 0..2 {
                let t = b.terminal(pay[x][lr][k]);
                b.attach(i, k, t).unwrap();
            }
        }
    }
    b.finish(root).unwrap()
}

/// Single-player prefix followed by an uninformed second player. The first player picks a
/// or b at I0, then t or u at I1 (after a) or v or w at I2 (after b). The second player
/// then picks e or f without seeing anything. The second player gains 3 only at (a, u, f).
pub fn refinement_example() -> GameTree {
    let mut b = GameBuilder::new();
    let root = b.decision_labeled(Player::P1, &[0], 2, "I0").unwrap();
    for first in 0..2u32 {
        let label = if first == 0 { "I1" } else { "I2" };
        let m = b.decision_labeled(Player::P1, &[1, first], 2, label).unwrap();
        b.attach(root, first as usize, m).unwrap();
        for second in 0..2 {
            let j = b.decision_labeled(Player::P2, &[0], 2, "J").unwrap();
            b.attach(m, second, j).unwrap();
            let e = b.terminal(0.0);
            b.attach(j, 0, e).unwrap();
            let f = b.terminal(if first == 0 && second == 1 { -3.0 } else { 0.0 });
            b.attach(j, 1, f).unwrap();
        }
    }
    b.finish(root).unwrap()
}

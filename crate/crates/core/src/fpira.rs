//! Fictitious play, plainly and over an imperfect-recall abstraction that is refined
//! whenever the abstract average would stop matching the plain average.
//!
//! Players update in turn: the first player on odd iterations, the second on even ones.
//! Each update averages the current average strategy with a pure best response. The
//! weights are `(n - 1) / n` and `1 / n`, where `n` counts the player's updates so far
//! plus one for the initial strategy. Both variants start from the first-action strategy.
//!
//! The abstracted variant keeps its average on the abstraction. In each iteration it:
//! 1. computes a best response in the original game against the abstract average;
//! 2. splits any abstract set whose reachable members are prescribed different actions;
//! 3. forms the averaged update once on the abstraction and once on the original sets
//!    reached by the best response;
//! 4. measures the largest utility gap either update can cause against any opponent pure
//!    strategy.
//!
//! If that gap is positive, every abstract set touched by the best response is broken into
//! singletons for the reached members plus one remainder set. The original-game update is
//! then kept. Otherwise the abstract update is kept. Either way the sequence of averages
//! matches plain fictitious play.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::abstraction::{AbsId, AbstractView, Abstraction};
use crate::game::{GameTree, InfosetId, NodeKind, Player};
use crate::run::{Solver, WordCounts};
use crate::strategy::{
    average_combine, best_response, combine_row, exploitability, infoset_reach, own_reach_nodes, solve_response,
    BehavioralStrategy, Bound, BrOptions, Exploitability, Policy, PureResponse, RowTable,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FpOptions {
    pub br: BrOptions,
    /// Gaps at or below this count as zero.
    pub delta_tolerance: f64,
}

impl Default for FpOptions {
    fn default() -> Self {
        FpOptions { br: BrOptions::default(), delta_tolerance: 1e-10 }
    }
}

/// Averaging weights for a player's next update: (old average, new response).
pub fn update_weights(updates_so_far: u64) -> (f64, f64) {
    let n = (updates_so_far + 1) as f64;
    (n / (n + 1.0), 1.0 / (n + 1.0))
}

/// Plain fictitious play on the original game.
pub struct FpSolver<'g> {
    game: &'g GameTree,
    avg: BehavioralStrategy,
    t: u64,
    updates: [u64; 2],
    opts: FpOptions,
    cache_peak: usize,
    br_peak: usize,
}

impl<'g> FpSolver<'g> {
    pub fn new(game: &'g GameTree, opts: FpOptions) -> Self {
        FpSolver {
            game,
            avg: BehavioralStrategy::first_action(game),
            t: 0,
            updates: [0; 2],
            opts,
            cache_peak: 0,
            br_peak: 0,
        }
    }

    pub fn average(&self) -> &BehavioralStrategy {
        &self.avg
    }
}

impl Solver for FpSolver<'_> {
    fn iteration(&self) -> u64 {
        self.t
    }

    fn step(&mut self) {
        self.t += 1;
        let i = Player::alternating(self.t);
        let br = best_response(self.game, i, &self.avg, self.opts.br);
        self.cache_peak = self.cache_peak.max(br.cache_peak);
        self.br_peak = self.br_peak.max(br.response.prescribed_count());
        let pure = br.response.to_strategy(self.game, &self.avg);
        let (l1, l2) = update_weights(self.updates[i.index()]);
        self.avg = average_combine(self.game, i, &self.avg, &pure, l1, l2).expect("weights are valid");
        self.updates[i.index()] += 1;
    }

    fn exploitability(&self) -> Exploitability {
        exploitability(self.game, &self.avg, &self.avg, self.opts.br)
    }

    fn abstract_infoset_count(&self) -> usize {
        self.game.num_infosets()
    }

    fn average_strategy(&self) -> BehavioralStrategy {
        self.avg.clone()
    }

    fn words(&self) -> WordCounts {
        WordCounts {
            strategy: self.game.total_actions(),
            cache_peak: self.cache_peak,
            br_strategy_peak: self.br_peak,
            ..WordCounts::default()
        }
    }
}

/// Splits abstract sets of the responder whose reachable members are prescribed different
/// actions. Each prescribed action gets a block, plus one block for unreached members. New
/// sets inherit the parent's row of `table`. Returns the number of sets split.
pub fn refine_for_br(abs: &mut Abstraction, br: &PureResponse, table: &mut RowTable) -> usize {
    let targets: Vec<AbsId> = abs.abstracted_ids(Some(br.player())).collect();
    let mut splits = 0;
    for a in targets {
        let mut by_action: BTreeMap<usize, Vec<InfosetId>> = BTreeMap::new();
        let mut rest = Vec::new();
        for &m in abs.set(a).members() {
            match br.action(m) {
                Some(k) => by_action.entry(k).or_default().push(m),
                None => rest.push(m),
            }
        }
        if by_action.len() > 1 {
            let mut blocks: Vec<Vec<InfosetId>> = by_action.into_values().collect();
            if !rest.is_empty() {
                blocks.push(rest);
            }
            abs.split(a, &blocks).expect("blocks partition the set");
            splits += 1;
        }
    }
    abs.extend_inherit(table);
    splits
}

/// Breaks every abstract set of the responder with a reachable member into one singleton
/// per reachable member plus a remainder. New sets inherit the parent's row of `table`.
/// Returns the number of sets split.
pub fn refine_reachable(abs: &mut Abstraction, br: &PureResponse, table: &mut RowTable) -> usize {
    let targets: Vec<AbsId> = abs.abstracted_ids(Some(br.player())).collect();
    let mut splits = 0;
    for a in targets {
        let (hit, rest): (Vec<InfosetId>, Vec<InfosetId>) =
            abs.set(a).members().iter().partition(|&&m| br.is_reachable(m));
        if hit.is_empty() {
            continue;
        }
        let mut blocks: Vec<Vec<InfosetId>> = hit.into_iter().map(|m| vec![m]).collect();
        if !rest.is_empty() {
            blocks.push(rest);
        }
        if blocks.len() > 1 {
            abs.split(a, &blocks).expect("blocks partition the set");
            splits += 1;
        }
    }
    abs.extend_inherit(table);
    splits
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Delta {
    pub value: f64,
    pub cache_peak: usize,
}

/// Largest absolute change in the opponent's utility, over the opponent's pure strategies,
/// between `player` following `hat` and following `tilde`.
pub fn compute_delta<A: Policy + ?Sized, B: Policy + ?Sized>(
    game: &GameTree,
    player: Player,
    hat: &A,
    tilde: &B,
    br: BrOptions,
) -> Delta {
    let rh = own_reach_nodes(game, player, hat);
    let rt = own_reach_nodes(game, player, tilde);
    let n = game.num_nodes();
    let opp = player.opponent();
    let mut weight = vec![0.0; n];
    let mut plus = vec![0.0; n];
    for i in 0..n {
        let node = crate::game::NodeId(i as u32);
        let c = game.chance_reach(node);
        weight[i] = c * (rh[i] + rt[i]);
        if game.kind(node) == NodeKind::Terminal {
            plus[i] = c * (rt[i] - rh[i]) * game.utility_for(node, opp);
        }
    }
    let bound = br.pruning.then_some(Bound::AbsUtility);
    let up = solve_response(game, opp, &weight, &plus, bound, br.tie_tolerance);
    let minus: Vec<f64> = plus.iter().map(|x| -x).collect();
    let down = solve_response(game, opp, &weight, &minus, bound, br.tie_tolerance);
    Delta { value: up.value.max(down.value), cache_peak: up.cache_peak.max(down.cache_peak) }
}

/// Reads overlay rows for some original sets and falls back to an abstract view.
struct Overlay<'a> {
    base: AbstractView<'a>,
    rows: &'a BTreeMap<InfosetId, Vec<f64>>,
}

impl Policy for Overlay<'_> {
    fn probs(&self, game: &GameTree, set: InfosetId) -> &[f64] {
        match self.rows.get(&set) {
            Some(r) => r,
            None => self.base.probs(game, set),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FpiraStats {
    pub response_splits: usize,
    pub reach_splits: usize,
    pub refinements: u64,
    pub last_delta: f64,
}

/// Fictitious play over an abstraction refined on demand.
pub struct FpiraSolver<'g> {
    game: &'g GameTree,
    abs: Abstraction,
    avg: RowTable,
    t: u64,
    updates: [u64; 2],
    opts: FpOptions,
    stats: FpiraStats,
    cache_peak: usize,
    br_peak: usize,
    overlay_peak: usize,
}

impl<'g> FpiraSolver<'g> {
    pub fn new(game: &'g GameTree, opts: FpOptions) -> Self {
        Self::with_abstraction(game, Abstraction::initial(game), opts)
    }

    pub fn with_abstraction(game: &'g GameTree, abs: Abstraction, opts: FpOptions) -> Self {
        let avg = abs.first_action_table();
        FpiraSolver {
            game,
            abs,
            avg,
            t: 0,
            updates: [0; 2],
            opts,
            stats: FpiraStats::default(),
            cache_peak: 0,
            br_peak: 0,
            overlay_peak: 0,
        }
    }

    pub fn abstraction(&self) -> &Abstraction {
        &self.abs
    }
    pub fn average_table(&self) -> &RowTable {
        &self.avg
    }
    pub fn average(&self) -> AbstractView<'_> {
        AbstractView::new(&self.abs, &self.avg)
    }
    pub fn stats(&self) -> FpiraStats {
        self.stats
    }
}

impl Solver for FpiraSolver<'_> {
    fn iteration(&self) -> u64 {
        self.t
    }

    fn step(&mut self) {
        let game = self.game;
        self.t += 1;
        let i = Player::alternating(self.t);
        let br = best_response(game, i, &AbstractView::new(&self.abs, &self.avg), self.opts.br);
        self.cache_peak = self.cache_peak.max(br.cache_peak);
        self.br_peak = self.br_peak.max(br.response.prescribed_count());
        let resp = &br.response;

        let split = refine_for_br(&mut self.abs, resp, &mut self.avg);
        self.stats.response_splits += split;

        let (l1, l2) = update_weights(self.updates[i.index()]);
        let reach = infoset_reach(game, i, &AbstractView::new(&self.abs, &self.avg));

        // Update on the abstraction: reach of an abstract set sums over its members.
        let mut hat = self.avg.clone();
        let ids: Vec<AbsId> = self.abs.live_ids().filter(|&a| self.abs.set(a).owner() == i).collect();
        for &a in &ids {
            let set = self.abs.set(a);
            let mut own = 0.0;
            let mut hits = 0.0;
            let mut action = None;
            for &m in set.members() {
                own += reach[m.index()];
                if let Some(k) = resp.action(m) {
                    hits += 1.0;
                    action = Some(k);
                }
            }
            if let Some(k) = action {
                let mut pure = vec![0.0; set.num_actions()];
                pure[k] = 1.0;
                let old = self.avg.row(a.index());
                let out = hat.row_mut(a.index());
                combine_row(out, old, &pure, own, hits, l1, l2);
            }
        }

        // Update on the original sets the response reaches.
        let mut tilde: BTreeMap<InfosetId, Vec<f64>> = BTreeMap::new();
        for (s, k) in resp.prescribed() {
            let old = self.avg.row(self.abs.phi(s).index());
            let mut pure = vec![0.0; old.len()];
            pure[k] = 1.0;
            let mut out = vec![0.0; old.len()];
            combine_row(&mut out, old, &pure, reach[s.index()], 1.0, l1, l2);
            tilde.insert(s, out);
        }
        self.overlay_peak = self.overlay_peak.max(tilde.values().map(Vec::len).sum());

        let delta = {
            let hat_view = AbstractView::new(&self.abs, &hat);
            let tilde_view = Overlay { base: AbstractView::new(&self.abs, &self.avg), rows: &tilde };
            compute_delta(game, i, &hat_view, &tilde_view, self.opts.br)
        };
        self.cache_peak = self.cache_peak.max(delta.cache_peak);
        self.stats.last_delta = delta.value;

        if delta.value > self.opts.delta_tolerance {
            let n = refine_reachable(&mut self.abs, resp, &mut self.avg);
            self.stats.reach_splits += n;
            self.stats.refinements += 1;
            for (s, row) in &tilde {
                self.avg.row_mut(self.abs.phi(*s).index()).copy_from_slice(row);
            }
        } else {
            self.avg = hat;
        }
        if split > 0 || delta.value > self.opts.delta_tolerance {
            self.abs.bump_version();
        }
        self.updates[i.index()] += 1;
    }

    fn exploitability(&self) -> Exploitability {
        let v = AbstractView::new(&self.abs, &self.avg);
        exploitability(self.game, &v, &v, self.opts.br)
    }

    fn abstract_infoset_count(&self) -> usize {
        self.abs.live_count()
    }

    fn average_strategy(&self) -> BehavioralStrategy {
        self.abs.to_original(self.game, &self.avg)
    }

    fn abstraction(&self) -> Option<&Abstraction> {
        Some(&self.abs)
    }

    fn words(&self) -> WordCounts {
        WordCounts {
            mapping: self.abs.mapping_words(),
            strategy: self.abs.action_count(),
            aux: self.overlay_peak,
            cache_peak: self.cache_peak,
            br_strategy_peak: self.br_peak,
            ..WordCounts::default()
        }
    }
}

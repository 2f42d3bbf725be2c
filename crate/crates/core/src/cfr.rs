//! CFR+ with alternating updates, plainly and over an imperfect-recall abstraction that
//! is split while it runs.
//!
//! Regrets live on abstract sets. The current strategy is regret matching on the clamped
//! cumulative regrets, and it is fixed for the duration of a sweep. Averaging starts after
//! a delay and weighs iteration `t` by `t`.
//!
//! The abstraction is refined by two mechanisms.
//!
//! **Heuristic.** Each iteration, some members of the acting player's abstracted sets are
//! sampled and their own regrets are tracked for that iteration. Members whose
//! near-maximal actions differ are separated. The largest agreeing group keeps the
//! unsampled members.
//!
//! **Bound.** At iterations 1, 2, 4, 8, and so on, a fresh sample of members is taken
//! across both players. Their own regrets accumulate until the next resample. A member
//! whose average regret over that window exceeds a shrinking threshold is split off into
//! its own set.
//!
//! Every set created by a split restarts with zero regrets and an empty average.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::abstraction::{AbsId, AbstractView, Abstraction};
use crate::game::{GameTree, InfosetId, NodeId, NodeKind, Player};
use crate::run::{Solver, WordCounts};
use crate::strategy::{exploitability, BehavioralStrategy, BrOptions, Exploitability, RowTable};

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfrOptions {
    /// Members sampled for the bound mechanism at each resample.
    pub k_bound: usize,
    /// Members sampled for the heuristic each iteration.
    pub k_heuristic: usize,
    /// Averaging starts after this many iterations.
    pub delay: u64,
    /// Bound threshold is `range * sqrt(actions) / (bound_divisor * sqrt(t))`.
    pub bound_divisor: f64,
    /// Near-maximal means within `1 / (heuristic_divisor * sqrt(t))` of the best regret.
    pub heuristic_divisor: f64,
    pub seed: u64,
    pub br: BrOptions,
}

impl Default for CfrOptions {
    fn default() -> Self {
        CfrOptions {
            k_bound: 0,
            k_heuristic: 0,
            delay: 100,
            bound_divisor: 100.0,
            heuristic_divisor: 5.0,
            seed: 0,
            br: BrOptions::default(),
        }
    }
}

/// Regret matching on non-negative regrets; uniform when all are zero.
pub fn regret_matching_plus(q: &[f64], out: &mut [f64]) {
    let sum: f64 = q.iter().map(|&x| x.max(0.0)).sum();
    if sum > 0.0 {
        for (o, &x) in out.iter_mut().zip(q) {
            *o = x.max(0.0) / sum;
        }
    } else {
        let u = 1.0 / q.len() as f64;
        out.iter_mut().for_each(|o| *o = u);
    }
}

/// Bound threshold for a set with utility range `range` and `actions` actions at
/// iteration `t`.
pub fn bound_threshold(range: f64, actions: usize, t: u64, divisor: f64) -> f64 {
    range * libm::sqrt(actions as f64) / (divisor * libm::sqrt(t as f64))
}

/// Upper bound on a CFR+ player's average external regret after `t` iterations.
pub fn average_regret_bound(delta: f64, infosets: usize, a_max: usize, t: u64) -> f64 {
    delta * infosets as f64 * libm::sqrt(a_max as f64) / libm::sqrt(t as f64)
}

/// Positions of actions whose regret is within `tolerance` of the largest.
pub fn near_best(regrets: &[f64], tolerance: f64) -> Vec<u32> {
    let m = regrets.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (0..regrets.len() as u32).filter(|&k| regrets[k as usize] >= m - tolerance).collect()
}

/// Samples `k` members of abstracted sets (of `owner`, or of both players). Every
/// eligible member is drawn with probability `min(k, N) / N`.
///
/// The eligible sets are shuffled, their members are shuffled, and the concatenation is
/// read circularly for `k` positions from a uniform offset. Samples therefore tend to
/// cover whole sets. Returned ids are sorted.
pub fn sample_abstracted<R: RngCore>(abs: &Abstraction, owner: Option<Player>, k: usize, rng: &mut R) -> Vec<InfosetId> {
    if k == 0 {
        return Vec::new();
    }
    let mut sets: Vec<AbsId> = abs.abstracted_ids(owner).collect();
    sets.shuffle(rng);
    let mut line: Vec<InfosetId> = Vec::new();
    for a in sets {
        let start = line.len();
        line.extend_from_slice(abs.set(a).members());
        line[start..].shuffle(rng);
    }
    let n = line.len();
    let mut out = if k >= n {
        line
    } else {
        let off = rng.gen_range(0..n);
        (0..k).map(|j| line[(off + j) % n]).collect()
    };
    out.sort_unstable();
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CfrStats {
    pub heuristic_splits: usize,
    pub bound_splits: usize,
    pub resamples: usize,
}

/// Resampling schedule of the bound mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Schedule {
    pub next: u64,
    pub last: u64,
    pub exponent: u32,
}

impl Schedule {
    pub fn new() -> Self {
        Schedule { next: 1, last: 0, exponent: 0 }
    }
    /// Advances at a resample iteration; returns whether `t` is one.
    pub fn tick(&mut self, t: u64) -> bool {
        if t != self.next {
            return false;
        }
        self.last = t;
        self.next = t + (1u64 << self.exponent);
        self.exponent += 1;
        true
    }
}

impl Default for Schedule {
    fn default() -> Self {
        Self::new()
    }
}

pub struct CfrIraSolver<'g> {
    game: &'g GameTree,
    abs: Abstraction,
    q: RowTable,
    avg: RowTable,
    t: u64,
    opts: CfrOptions,
    rng: ChaCha8Rng,
    schedule: Schedule,
    bound_sample: Vec<InfosetId>,
    bound_slot: Vec<u32>,
    rb: RowTable,
    heur_slot: Vec<u32>,
    rh: RowTable,
    stamp: Vec<u64>,
    cur: Vec<f64>,
    own: Vec<f64>,
    opp: Vec<f64>,
    value: Vec<f64>,
    aux_peak: usize,
    stats: CfrStats,
}

impl<'g> CfrIraSolver<'g> {
    /// Starts from the initial abstraction.
    pub fn new(game: &'g GameTree, opts: CfrOptions) -> Self {
        Self::with_abstraction(game, Abstraction::initial(game), opts)
    }

    /// Plain CFR+ on the original game.
    pub fn plain(game: &'g GameTree, opts: CfrOptions) -> Self {
        Self::with_abstraction(game, Abstraction::identity(game), opts)
    }

    pub fn with_abstraction(game: &'g GameTree, abs: Abstraction, opts: CfrOptions) -> Self {
        let mut q = RowTable::new();
        abs.extend_filled(&mut q, 0.0);
        let avg = q.clone();
        let n = game.num_nodes();
        let sets = game.num_infosets();
        CfrIraSolver {
            game,
            abs,
            q,
            avg,
            t: 0,
            opts,
            rng: ChaCha8Rng::seed_from_u64(opts.seed),
            schedule: Schedule::new(),
            bound_sample: Vec::new(),
            bound_slot: vec![NONE; sets],
            rb: RowTable::new(),
            heur_slot: vec![NONE; sets],
            rh: RowTable::new(),
            stamp: vec![0; sets],
            cur: Vec::new(),
            own: vec![0.0; n],
            opp: vec![0.0; n],
            value: vec![0.0; n],
            aux_peak: 0,
            stats: CfrStats::default(),
        }
    }

    pub fn abstraction(&self) -> &Abstraction {
        &self.abs
    }
    pub fn stats(&self) -> CfrStats {
        self.stats
    }
    pub fn regrets(&self) -> &RowTable {
        &self.q
    }

    /// Regret-matching strategy the next sweep will use, per abstract id.
    pub fn current_table(&self) -> RowTable {
        let mut t = self.q.clone();
        for a in 0..self.q.len() {
            regret_matching_plus(self.q.row(a), t.row_mut(a));
        }
        t
    }

    /// Normalized average strategy per abstract id; uniform where nothing has accumulated.
    pub fn average_table(&self) -> RowTable {
        let mut t = self.avg.clone();
        for a in 0..self.avg.len() {
            let row = t.row_mut(a);
            let s: f64 = row.iter().sum();
            if s > 0.0 {
                row.iter_mut().for_each(|x| *x /= s);
            } else {
                let u = 1.0 / row.len() as f64;
                row.iter_mut().for_each(|x| *x = u);
            }
        }
        t
    }

    fn sweep(&mut self, i: Player, t: u64) {
        let g = self.game;
        self.cur.clear();
        self.cur.extend_from_slice(self.q.data());
        for a in self.abs.live_ids() {
            let off = self.q.offset(a.index());
            let w = self.abs.set(a).num_actions();
            regret_matching_plus(self.q.row(a.index()), &mut self.cur[off..off + w]);
        }
        let averaging = t > self.opts.delay;
        let weight = t as f64;
        let n = g.num_nodes();
        self.own[0] = 1.0;
        self.opp[0] = 1.0;
        for idx in 0..n {
            let node = NodeId(idx as u32);
            let (own, opp) = (self.own[idx], self.opp[idx]);
            match g.kind(node) {
                NodeKind::Terminal => {}
                NodeKind::Chance => {
                    for (&c, &p) in g.children(node).iter().zip(g.edge_probs(node)) {
                        self.own[c.index()] = own;
                        self.opp[c.index()] = opp * p;
                    }
                }
                NodeKind::Decision(p) => {
                    let s = g.infoset_of(node).unwrap();
                    let a = self.abs.phi(s);
                    let off = self.q.offset(a.index());
                    let kids = g.children(node);
                    if p == i {
                        for (k, &c) in kids.iter().enumerate() {
                            self.own[c.index()] = own * self.cur[off + k];
                            self.opp[c.index()] = opp;
                        }
                        if averaging && self.stamp[s.index()] != t && own > 0.0 {
                            let avg = self.avg.row_mut(a.index());
                            for (k, x) in avg.iter_mut().enumerate() {
                                *x += weight * own * self.cur[off + k];
                            }
                        }
                        self.stamp[s.index()] = t;
                    } else {
                        for (k, &c) in kids.iter().enumerate() {
                            self.own[c.index()] = own;
                            self.opp[c.index()] = opp * self.cur[off + k];
                        }
                    }
                }
            }
        }
        for idx in (0..n).rev() {
            let node = NodeId(idx as u32);
            let opp = self.opp[idx];
            if opp == 0.0 {
                self.value[idx] = 0.0;
                continue;
            }
            let v = match g.kind(node) {
                NodeKind::Terminal => g.utility_for(node, i),
                NodeKind::Chance => {
                    g.children(node).iter().zip(g.edge_probs(node)).map(|(c, p)| p * self.value[c.index()]).sum()
                }
                NodeKind::Decision(p) => {
                    let s = g.infoset_of(node).unwrap();
                    let a = self.abs.phi(s);
                    let off = self.q.offset(a.index());
                    let kids = g.children(node);
                    let v: f64 = kids.iter().enumerate().map(|(k, c)| self.cur[off + k] * self.value[c.index()]).sum();
                    if p == i {
                        let hs = self.heur_slot[s.index()];
                        let bs = self.bound_slot[s.index()];
                        for (k, c) in kids.iter().enumerate() {
                            let r = opp * (self.value[c.index()] - v);
                            self.q.data_mut()[off + k] += r;
                            if hs != NONE {
                                self.rh.row_mut(hs as usize)[k] += r;
                            }
                            if bs != NONE {
                                self.rb.row_mut(bs as usize)[k] += r;
                            }
                        }
                    }
                    v
                }
            };
            self.value[idx] = v;
        }
        for x in self.q.data_mut() {
            if *x < 0.0 {
                *x = 0.0;
            }
        }
    }

    fn drop_bound_tracking(&mut self, members: &[InfosetId]) {
        for &m in members {
            self.bound_slot[m.index()] = NONE;
        }
    }

    fn heuristic_update(&mut self, sample: &[InfosetId], t: u64) {
        let tol = 1.0 / (self.opts.heuristic_divisor * libm::sqrt(t as f64));
        let mut by_set: BTreeMap<AbsId, Vec<InfosetId>> = BTreeMap::new();
        for &s in sample {
            by_set.entry(self.abs.phi(s)).or_default().push(s);
        }
        for (a, sampled) in by_set {
            let mut groups: BTreeMap<Vec<u32>, Vec<InfosetId>> = BTreeMap::new();
            for &s in &sampled {
                let slot = self.heur_slot[s.index()] as usize;
                groups.entry(near_best(self.rh.row(slot), tol)).or_default().push(s);
            }
            if groups.len() < 2 {
                continue;
            }
            let mut blocks: Vec<Vec<InfosetId>> = groups.into_values().collect();
            blocks.sort_by_key(|b| b[0]);
            let largest = (0..blocks.len()).fold(0, |best, j| if blocks[j].len() > blocks[best].len() { j } else { best });
            let members = self.abs.set(a).members().to_vec();
            for m in &members {
                if self.heur_slot[m.index()] == NONE {
                    blocks[largest].push(*m);
                }
            }
            self.abs.split(a, &blocks).expect("blocks partition the set");
            self.drop_bound_tracking(&members);
            self.stats.heuristic_splits += 1;
        }
    }

    fn bound_update(&mut self, t: u64) {
        let window = (t - self.schedule.last) as f64;
        let sample = core::mem::take(&mut self.bound_sample);
        for &s in &sample {
            let slot = self.bound_slot[s.index()];
            if slot == NONE {
                continue;
            }
            let a = self.abs.phi(s);
            if !self.abs.set(a).is_abstracted() {
                continue;
            }
            let best = self.rb.row(slot as usize).iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let range = self.game.metrics().delta_set[s.index()];
            let limit = bound_threshold(range, self.game.num_actions(s), t, self.opts.bound_divisor);
            if best / window > limit {
                let rest: Vec<InfosetId> = self.abs.set(a).members().iter().copied().filter(|&m| m != s).collect();
                self.abs.split(a, &[vec![s], rest]).expect("blocks partition the set");
                self.bound_slot[s.index()] = NONE;
                self.stats.bound_splits += 1;
            }
        }
        self.bound_sample = sample.into_iter().filter(|s| self.bound_slot[s.index()] != NONE).collect();
    }

    fn resample_bound(&mut self) {
        for &s in &self.bound_sample {
            self.bound_slot[s.index()] = NONE;
        }
        self.bound_sample = sample_abstracted(&self.abs, None, self.opts.k_bound, &mut self.rng);
        self.rb = RowTable::new();
        for (j, &s) in self.bound_sample.iter().enumerate() {
            self.bound_slot[s.index()] = j as u32;
            self.rb.push_filled(self.game.num_actions(s), 0.0);
        }
        self.stats.resamples += 1;
    }
}

impl Solver for CfrIraSolver<'_> {
    fn iteration(&self) -> u64 {
        self.t
    }

    fn step(&mut self) {
        let t = self.t + 1;
        let i = Player::alternating(t);

        let heur = sample_abstracted(&self.abs, Some(i), self.opts.k_heuristic, &mut self.rng);
        self.rh = RowTable::new();
        for (j, &s) in heur.iter().enumerate() {
            self.heur_slot[s.index()] = j as u32;
            self.rh.push_filled(self.game.num_actions(s), 0.0);
        }
        if self.schedule.tick(t) {
            self.resample_bound();
        }
        let tracked = self.rh.data().len() + self.rb.data().len();
        self.aux_peak = self.aux_peak.max(tracked);

        self.sweep(i, t);

        let before = self.abs.id_count();
        self.heuristic_update(&heur, t);
        for &s in &heur {
            self.heur_slot[s.index()] = NONE;
        }
        if t != self.schedule.last {
            self.bound_update(t);
        }
        if self.abs.id_count() != before {
            self.abs.extend_filled(&mut self.q, 0.0);
            self.abs.extend_filled(&mut self.avg, 0.0);
            self.abs.bump_version();
        }
        self.t = t;
    }

    fn exploitability(&self) -> Exploitability {
        let table = self.average_table();
        let v = AbstractView::new(&self.abs, &table);
        exploitability(self.game, &v, &v, self.opts.br)
    }

    fn abstract_infoset_count(&self) -> usize {
        self.abs.live_count()
    }

    fn average_strategy(&self) -> BehavioralStrategy {
        self.abs.to_original(self.game, &self.average_table())
    }

    fn abstraction(&self) -> Option<&Abstraction> {
        Some(&self.abs)
    }

    fn words(&self) -> WordCounts {
        WordCounts {
            mapping: self.abs.mapping_words(),
            regret: 2 * self.abs.action_count(),
            aux: self.aux_peak,
            ..WordCounts::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::test_games;

    #[test]
    fn regret_matching_cases() {
        let mut out = [0.0; 3];
        regret_matching_plus(&[0.0, 0.0, 0.0], &mut out);
        assert_eq!(out, [1.0 / 3.0; 3]);
        regret_matching_plus(&[1.0, 3.0, 0.0], &mut out);
        assert_eq!(out, [0.25, 0.75, 0.0]);
    }

    #[test]
    fn schedule_doubles() {
        let mut s = Schedule::new();
        let hits: Vec<u64> = (1..=40).filter(|&t| s.tick(t)).collect();
        assert_eq!(hits, vec![1, 2, 4, 8, 16, 32]);
        assert_eq!(s.next - s.last, 1 << (s.exponent - 1));
    }

    #[test]
    fn near_best_tolerance() {
        assert_eq!(near_best(&[1.0, 0.95, 0.5], 0.1), vec![0, 1]);
        assert_eq!(near_best(&[0.0, 0.0], 0.0), vec![0, 1]);
    }

    #[test]
    fn plain_cfr_solves_pennies() {
        let g = test_games::matching_pennies();
        let mut s = CfrIraSolver::plain(&g, CfrOptions { delay: 0, ..CfrOptions::default() });
        for _ in 0..2000 {
            s.step();
        }
        assert!(s.exploitability().sum < 1e-2);
    }

    #[test]
    fn sampling_marginals_are_exact_in_expectation() {
        let g = test_games::fig2_game();
        let abs = Abstraction::initial(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut hits = [0usize; 6];
        let trials = 20000;
        for _ in 0..trials {
            let s = sample_abstracted(&abs, None, 1, &mut rng);
            assert_eq!(s.len(), 1);
            hits[s[0].index()] += 1;
        }
        // Four members of abstracted sets: I1, I2, I3, I4.
        for l in ["I1", "I2", "I3", "I4"] {
            let f = hits[g.find_infoset(l).unwrap().index()] as f64 / trials as f64;
            assert!((f - 0.25).abs() < 0.02, "{l}: {f}");
        }
        assert_eq!(hits[g.find_infoset("I0").unwrap().index()], 0);
    }

    fn gs4_wide_set() -> (crate::GameTree, Abstraction, AbsId) {
        let g = "GS4".parse::<crate::domains::Domain>().unwrap().build();
        let a = Abstraction::initial(&g);
        let x = a
            .abstracted_ids(Some(Player::P1))
            .find(|&x| a.set(x).members().len() >= 4 && a.set(x).num_actions() >= 2)
            .unwrap();
        (g, a, x)
    }

    fn one_hot(w: usize, k: usize) -> Vec<f64> {
        let mut r = vec![0.0; w];
        r[k] = 1.0;
        r
    }

    #[test]
    fn heuristic_split_groups_by_near_best_actions() {
        let (g, a, x) = gs4_wide_set();
        let m = a.set(x).members().to_vec();
        let w = a.set(x).num_actions();
        let mut s = CfrIraSolver::with_abstraction(&g, a, CfrOptions::default());
        let sample = vec![m[0], m[1], m[2]];
        for (j, (&i, k)) in sample.iter().zip([0, 1, 0]).enumerate() {
            s.heur_slot[i.index()] = j as u32;
            s.rh.push_row(&one_hot(w, k));
        }
        s.heuristic_update(&sample, 1);
        let abs = s.abstraction();
        assert_eq!(abs.phi(m[0]), abs.phi(m[2]));
        assert_ne!(abs.phi(m[0]), abs.phi(m[1]));
        // Unsampled members join the largest block.
        assert!(m[3..].iter().all(|&i| abs.phi(i) == abs.phi(m[0])));
        assert_eq!(abs.set(abs.phi(m[1])).members(), &[m[1]]);
        assert_eq!(s.stats().heuristic_splits, 1);
    }

    #[test]
    fn heuristic_keeps_sets_whose_samples_agree() {
        let (g, a, x) = gs4_wide_set();
        let m = a.set(x).members().to_vec();
        let w = a.set(x).num_actions();
        let mut s = CfrIraSolver::with_abstraction(&g, a, CfrOptions::default());
        let mut second = one_hot(w, 0);
        second[1] = 0.9;
        for (j, r) in [one_hot(w, 0), second].iter().enumerate() {
            s.heur_slot[m[j].index()] = j as u32;
            s.rh.push_row(r);
        }
        // At t = 1 the tolerance is 0.2, so only the second row keeps action 1.
        s.heuristic_update(&m[..2], 1);
        assert_ne!(s.abstraction().phi(m[0]), s.abstraction().phi(m[1]));
        // At t = 100 the tolerance is 0.02 and 0.9 is no longer near 1.
        let (g, a, _) = gs4_wide_set();
        let mut s = CfrIraSolver::with_abstraction(&g, a, CfrOptions::default());
        let mut near = one_hot(w, 0);
        near[1] = 0.99;
        for (j, r) in [near.clone(), near].iter().enumerate() {
            s.heur_slot[m[j].index()] = j as u32;
            s.rh.push_row(r);
        }
        s.heuristic_update(&m[..2], 100);
        assert_eq!(s.abstraction().phi(m[0]), x);
        assert_eq!(s.stats().heuristic_splits, 0);
    }

    #[test]
    fn bound_split_isolates_the_offending_member() {
        let (g, a, x) = gs4_wide_set();
        let m = a.set(x).members().to_vec();
        let w = a.set(x).num_actions();
        let range = g.metrics().delta_set[m[0].index()];
        let t = 4;
        let limit = bound_threshold(range, w, t, 100.0);
        let mut s = CfrIraSolver::with_abstraction(&g, a, CfrOptions::default());
        s.schedule = Schedule { next: 8, last: 2, exponent: 2 };
        // Average over the two-iteration window: above the limit for m0, below for m1.
        let rows = [one_hot(w, 0).iter().map(|v| v * 2.0 * limit * 1.5).collect::<Vec<_>>(), one_hot(w, 1).iter().map(|v| v * 2.0 * limit * 0.5).collect()];
        s.bound_sample = vec![m[0], m[1]];
        for (j, r) in rows.iter().enumerate() {
            s.bound_slot[m[j].index()] = j as u32;
            s.rb.push_row(r);
        }
        s.bound_update(t);
        let abs = s.abstraction();
        assert_eq!(abs.set(abs.phi(m[0])).members(), &[m[0]]);
        assert_eq!(abs.phi(m[1]), abs.phi(m[2]));
        assert_eq!(abs.set(abs.phi(m[1])).members().len(), m.len() - 1);
        assert_eq!(s.bound_sample, vec![m[1]]);
        assert_eq!(s.stats().bound_splits, 1);
    }

    #[test]
    fn regrets_stay_nonnegative_and_splits_only_refine() {
        let g = "GS3".parse::<crate::domains::Domain>().unwrap().build();
        let opts = CfrOptions { k_bound: 10, k_heuristic: 90, seed: 4, ..CfrOptions::default() };
        let mut s = CfrIraSolver::new(&g, opts);
        let mut prev = s.abstraction().abstracted_original_count();
        for _ in 0..300 {
            s.step();
            assert!(s.regrets().data().iter().all(|&q| q >= 0.0));
            let now = s.abstraction().abstracted_original_count();
            assert!(now <= prev);
            prev = now;
            assert_eq!(s.regrets().len(), s.abstraction().id_count());
        }
    }
}

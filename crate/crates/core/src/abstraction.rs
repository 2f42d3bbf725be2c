//! Mapping from original information sets to abstract sets, evolved only by splits.
//!
//! Each abstract set has one owner and one action count. Actions line up by position:
//! action `k` of an abstract set stands for action `k` of every member. Abstract ids are
//! never reused. A split retires the old id and creates fresh ids, so per-id tables such
//! as strategies or regrets only ever grow.

use alloc::collections::BTreeMap;
use alloc::fmt::Write;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::game::{recall_violations, GameTree, InfosetId, Player};
use crate::strategy::{BehavioralStrategy, Policy, RowTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AbsId(pub u32);

impl AbsId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AbstractionError {
    #[error("abstract set {0} was already split")]
    Retired(u32),
    #[error("split of abstract set {0} has an empty block")]
    EmptyBlock(u32),
    #[error("blocks do not partition abstract set {0}")]
    NotPartition(u32),
    #[error("members disagree on the strategy of abstract sets {0:?}")]
    Inconsistent(Vec<u32>),
}

#[derive(Debug, Clone)]
pub struct AbstractSet {
    owner: Player,
    num_actions: u32,
    seq_len: u32,
    members: Vec<InfosetId>,
    live: bool,
    parent: Option<AbsId>,
}

impl AbstractSet {
    pub fn owner(&self) -> Player {
        self.owner
    }
    pub fn num_actions(&self) -> usize {
        self.num_actions as usize
    }
    pub fn members(&self) -> &[InfosetId] {
        &self.members
    }
    pub fn is_live(&self) -> bool {
        self.live
    }
    /// More than one original member.
    pub fn is_abstracted(&self) -> bool {
        self.members.len() > 1
    }
    /// Set this one was split from.
    pub fn parent(&self) -> Option<AbsId> {
        self.parent
    }
    /// Storage class: owner, sequence length, action count.
    pub fn class(&self) -> (Player, u32, u32) {
        (self.owner, self.seq_len, self.num_actions)
    }
}

#[derive(Debug, Clone)]
pub struct Abstraction {
    version: u64,
    phi: Vec<AbsId>,
    sets: Vec<AbstractSet>,
    live: usize,
}

/// Explicit part of the mapping. Abstracted sets that are the largest in their class are
/// implicit. Members of every other abstracted set carry an integer tag (the abstract id).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MappingStore {
    pub implicit: BTreeMap<(Player, u32, u32), AbsId>,
    pub tags: BTreeMap<InfosetId, u32>,
}

impl MappingStore {
    pub fn words(&self) -> usize {
        self.tags.len()
    }
}

impl Abstraction {
    fn from_groups(game: &GameTree, key: impl Fn(InfosetId) -> (Player, u32, u32, u32)) -> Self {
        let mut index: BTreeMap<(Player, u32, u32, u32), AbsId> = BTreeMap::new();
        let mut sets: Vec<AbstractSet> = Vec::new();
        let mut phi = Vec::with_capacity(game.num_infosets());
        for s in game.infoset_ids() {
            let info = game.infoset(s);
            let id = *index.entry(key(s)).or_insert_with(|| {
                sets.push(AbstractSet {
                    owner: info.owner(),
                    num_actions: info.num_actions() as u32,
                    seq_len: info.seq_len() as u32,
                    members: Vec::new(),
                    live: true,
                    parent: None,
                });
                AbsId(sets.len() as u32 - 1)
            });
            sets[id.index()].members.push(s);
            phi.push(id);
        }
        let live = sets.len();
        Abstraction { version: 0, phi, sets, live }
    }

    /// Every original set on its own.
    pub fn identity(game: &GameTree) -> Self {
        Self::from_groups(game, |s| {
            let i = game.infoset(s);
            (i.owner(), i.seq_len() as u32, i.num_actions() as u32, s.0)
        })
    }

    /// Groups each player's sets by own sequence length and action count.
    pub fn initial(game: &GameTree) -> Self {
        Self::from_groups(game, |s| {
            let i = game.infoset(s);
            (i.owner(), i.seq_len() as u32, i.num_actions() as u32, 0)
        })
    }

    pub fn version(&self) -> u64 {
        self.version
    }
    pub fn bump_version(&mut self) {
        self.version += 1;
    }
    pub fn phi(&self, s: InfosetId) -> AbsId {
        self.phi[s.index()]
    }
    pub fn set(&self, a: AbsId) -> &AbstractSet {
        &self.sets[a.index()]
    }
    /// Number of ids ever issued, retired ones included.
    pub fn id_count(&self) -> usize {
        self.sets.len()
    }
    pub fn live_count(&self) -> usize {
        self.live
    }
    pub fn live_ids(&self) -> impl Iterator<Item = AbsId> + '_ {
        (0..self.sets.len() as u32).map(AbsId).filter(move |a| self.sets[a.index()].live)
    }
    /// Live sets with more than one member, optionally of one owner.
    pub fn abstracted_ids(&self, owner: Option<Player>) -> impl Iterator<Item = AbsId> + '_ {
        self.live_ids().filter(move |a| {
            let s = &self.sets[a.index()];
            s.is_abstracted() && owner.is_none_or(|p| s.owner == p)
        })
    }
    /// Original sets that share their abstract set with another.
    pub fn abstracted_original_count(&self) -> usize {
        self.abstracted_ids(None).map(|a| self.sets[a.index()].members.len()).sum()
    }
    /// Floats needed for one value per abstract action.
    pub fn action_count(&self) -> usize {
        self.live_ids().map(|a| self.sets[a.index()].num_actions as usize).sum()
    }

    /// Replaces `a` by one fresh set per block. A single block is a no-op. Returns the ids
    /// now covering the members, in block order.
    pub fn split(&mut self, a: AbsId, blocks: &[Vec<InfosetId>]) -> Result<Vec<AbsId>, AbstractionError> {
        let set = &self.sets[a.index()];
        if !set.live {
            return Err(AbstractionError::Retired(a.0));
        }
        if blocks.iter().any(|b| b.is_empty()) {
            return Err(AbstractionError::EmptyBlock(a.0));
        }
        let mut all: Vec<InfosetId> = blocks.iter().flatten().copied().collect();
        all.sort_unstable();
        let mut members = set.members.clone();
        members.sort_unstable();
        if all != members {
            return Err(AbstractionError::NotPartition(a.0));
        }
        if blocks.len() == 1 {
            return Ok(vec![a]);
        }
        let (owner, num_actions, seq_len) = (set.owner, set.num_actions, set.seq_len);
        self.sets[a.index()].live = false;
        self.sets[a.index()].members = Vec::new();
        self.live -= 1;
        let mut ids = Vec::with_capacity(blocks.len());
        for b in blocks {
            let id = AbsId(self.sets.len() as u32);
            let mut m = b.clone();
            m.sort_unstable();
            for &s in &m {
                self.phi[s.index()] = id;
            }
            self.sets.push(AbstractSet { owner, num_actions, seq_len, members: m, live: true, parent: Some(a) });
            self.live += 1;
            ids.push(id);
        }
        Ok(ids)
    }

    /// Explicit storage under the implicit-largest-per-class rule.
    pub fn mapping_store(&self) -> MappingStore {
        let mut best: BTreeMap<(Player, u32, u32), (usize, AbsId)> = BTreeMap::new();
        for a in self.abstracted_ids(None) {
            let s = &self.sets[a.index()];
            let e = best.entry(s.class()).or_insert((0, a));
            if s.members.len() > e.0 {
                *e = (s.members.len(), a);
            }
        }
        let implicit: BTreeMap<_, _> = best.iter().map(|(&c, &(_, a))| (c, a)).collect();
        let mut tags = BTreeMap::new();
        for a in self.abstracted_ids(None) {
            let s = &self.sets[a.index()];
            if implicit[&s.class()] != a {
                for &m in &s.members {
                    tags.insert(m, a.0);
                }
            }
        }
        MappingStore { implicit, tags }
    }

    /// Words of the explicit mapping: members of abstracted sets that are not the largest
    /// abstracted set of their class.
    pub fn mapping_words(&self) -> usize {
        let mut per_class: BTreeMap<(Player, u32, u32), (usize, usize)> = BTreeMap::new();
        for a in self.abstracted_ids(None) {
            let s = &self.sets[a.index()];
            let e = per_class.entry(s.class()).or_insert((0, 0));
            e.0 += s.members.len();
            e.1 = e.1.max(s.members.len());
        }
        per_class.values().map(|&(sum, max)| sum - max).sum()
    }

    /// Abstract sets whose members disagree on the owner's abstract action sequence.
    pub fn recall_violations(&self, game: &GameTree) -> Vec<AbsId> {
        recall_violations(game, |s| self.phi(s).0, |_, k| k as u32).into_iter().map(AbsId).collect()
    }

    /// Appends rows for ids issued since the table was last extended, copying each new
    /// set's parent row.
    pub fn extend_inherit(&self, table: &mut RowTable) {
        while table.len() < self.sets.len() {
            let s = &self.sets[table.len()];
            match s.parent {
                Some(p) => {
                    let row: Vec<f64> = table.row(p.index()).to_vec();
                    table.push_row(&row);
                }
                None => {
                    table.push_filled(s.num_actions as usize, 1.0 / s.num_actions as f64);
                }
            }
        }
    }

    /// Appends a row filled with `value` for each newly issued id.
    pub fn extend_filled(&self, table: &mut RowTable, value: f64) {
        while table.len() < self.sets.len() {
            let w = self.sets[table.len()].num_actions as usize;
            table.push_filled(w, value);
        }
    }

    /// Uniform strategy table over every issued id.
    pub fn uniform_table(&self) -> RowTable {
        let mut t = RowTable::new();
        for s in &self.sets {
            t.push_filled(s.num_actions as usize, 1.0 / s.num_actions as f64);
        }
        t
    }

    /// Strategy table that plays the first action everywhere.
    pub fn first_action_table(&self) -> RowTable {
        let mut t = RowTable::new();
        for s in &self.sets {
            let r = t.push_filled(s.num_actions as usize, 0.0);
            t.row_mut(r)[0] = 1.0;
        }
        t
    }

    /// Abstract strategy agreeing with `b` on every member. Fails if members of a live set
    /// disagree by more than `1e-12`.
    pub fn to_abstract<P: Policy + ?Sized>(&self, game: &GameTree, b: &P) -> Result<RowTable, AbstractionError> {
        let mut t = RowTable::new();
        let mut bad = Vec::new();
        for (i, s) in self.sets.iter().enumerate() {
            if !s.live {
                t.push_filled(s.num_actions as usize, 1.0 / s.num_actions as f64);
                continue;
            }
            let first = b.probs(game, s.members[0]);
            let agree = s.members[1..]
                .iter()
                .all(|&m| b.probs(game, m).iter().zip(first).all(|(x, y)| (x - y).abs() <= 1e-12));
            if !agree {
                bad.push(i as u32);
            }
            t.push_row(first);
        }
        if bad.is_empty() {
            Ok(t)
        } else {
            Err(AbstractionError::Inconsistent(bad))
        }
    }

    /// Original-game strategy in which every member plays its abstract set's row.
    pub fn to_original(&self, game: &GameTree, table: &RowTable) -> BehavioralStrategy {
        BehavioralStrategy::from_policy(game, &AbstractView::new(self, table))
    }

    /// Text listing of the mapping, one original set per line.
    pub fn dump(&self, game: &GameTree) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# version {} live {} words {}", self.version, self.live, self.mapping_words());
        for s in game.infoset_ids() {
            let a = self.phi(s);
            let label = game.infoset(s).label().unwrap_or("-");
            let _ = writeln!(out, "{} {} {} {}", s.0, label, a.0, self.sets[a.index()].members.len());
        }
        out
    }
}

/// Reads an abstract strategy table through the mapping.
#[derive(Clone, Copy)]
pub struct AbstractView<'a> {
    abs: &'a Abstraction,
    table: &'a RowTable,
}

impl<'a> AbstractView<'a> {
    pub fn new(abs: &'a Abstraction, table: &'a RowTable) -> Self {
        AbstractView { abs, table }
    }
}

impl Policy for AbstractView<'_> {
    fn probs(&self, _game: &GameTree, set: InfosetId) -> &[f64] {
        self.table.row(self.abs.phi(set).index())
    }
}

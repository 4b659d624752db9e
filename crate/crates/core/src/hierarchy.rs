//! Hierarchical seat allocation.
//!
//! Level 0 (all roots together) is one seat allocation instance over every
//! seat. Each team's children are then allocated within the seats that team
//! received, depth first. In delayed-office mode every sub-problem is
//! desk-only and offices are matched to leaf teams afterwards in one exact
//! pass ([`delayed_office_allocate`]).

use crate::floorplan::SeatKind;
use crate::model::{SaProblem, SolverParams, Team};
use crate::rng::derive_seed;
use crate::solvers::{solve, Method, SolveError};
use crate::transport::min_cost_assignment;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, HashSet};

/// One record of the hierarchy file. Branch requirements may be omitted and
/// are then derived from the children; leaf requirements default to 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TeamEntry {
    pub id: String,
    #[serde(default)]
    pub parent: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub desks: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offices: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, thiserror::Error)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum HierarchyViolation {
    #[error("hierarchy has no teams")]
    NoTeams,
    #[error("team id is empty")]
    EmptyId,
    #[error("team {team:?} appears more than once")]
    DuplicateTeam { team: String },
    #[error("team {team:?} has unknown parent {parent:?}")]
    UnknownParent { team: String, parent: String },
    #[error("team {team:?} is on a parent cycle")]
    Cycle { team: String },
    #[error("team {team:?} requires no seats")]
    EmptyTeam { team: String },
    #[error("team {team:?} gives {given} {kind}s but its children sum to {derived} (difference {delta})")]
    SumMismatch {
        team: String,
        kind: SeatKind,
        given: usize,
        derived: usize,
        delta: i64,
    },
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum HierarchyError {
    #[error("invalid hierarchy document: {0}")]
    Parse(String),
    #[error("invalid hierarchy: {}", join_violations(.0))]
    Invalid(Vec<HierarchyViolation>),
}

fn join_violations(v: &[HierarchyViolation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// A validated team forest. Teams are stored sorted by id.
#[derive(Clone, Debug, PartialEq)]
pub struct Hierarchy {
    teams: Vec<Team>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    level: Vec<usize>,
    levels: Vec<Vec<usize>>,
}

/// Structure and summation checks; empty iff [`Hierarchy::new`] succeeds.
pub fn validate_hierarchy(entries: &[TeamEntry]) -> Vec<HierarchyViolation> {
    match analyze(entries) {
        Ok(_) => Vec::new(),
        Err(v) => v,
    }
}

fn analyze(entries: &[TeamEntry]) -> Result<Hierarchy, Vec<HierarchyViolation>> {
    let mut violations = Vec::new();
    if entries.is_empty() {
        return Err(vec![HierarchyViolation::NoTeams]);
    }
    let mut sorted: Vec<&TeamEntry> = entries.iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));
    for w in sorted.windows(2) {
        if w[0].id == w[1].id {
            violations.push(HierarchyViolation::DuplicateTeam { team: w[0].id.clone() });
        }
    }
    if sorted.iter().any(|e| e.id.is_empty()) {
        violations.push(HierarchyViolation::EmptyId);
    }
    if !violations.is_empty() {
        violations.dedup();
        return Err(violations);
    }
    let index: HashMap<&str, usize> = sorted.iter().enumerate().map(|(i, e)| (e.id.as_str(), i)).collect();
    let n = sorted.len();
    let mut parent = vec![None; n];
    for (i, e) in sorted.iter().enumerate() {
        if let Some(p) = &e.parent {
            match index.get(p.as_str()) {
                Some(&j) => parent[i] = Some(j),
                None => violations.push(HierarchyViolation::UnknownParent {
                    team: e.id.clone(),
                    parent: p.clone(),
                }),
            }
        }
    }
    // Depth by walking up; a walk longer than n steps is on or reaches a cycle.
    let mut level = vec![0usize; n];
    for i in 0..n {
        let mut steps = 0;
        let mut cur = i;
        let mut seen = HashSet::new();
        while let Some(p) = parent[cur] {
            if !seen.insert(cur) {
                break;
            }
            cur = p;
            steps += 1;
        }
        if parent[cur].is_some() {
            if cycle_members(&parent, i).contains(&i) {
                violations.push(HierarchyViolation::Cycle { team: sorted[i].id.clone() });
            }
            continue;
        }
        level[i] = steps;
    }
    if !violations.is_empty() {
        return Err(violations);
    }

    let mut children = vec![Vec::new(); n];
    for i in 0..n {
        if let Some(p) = parent[i] {
            children[p].push(i);
        }
    }
    // Resolve requirements bottom-up (deepest first).
    let mut by_depth: Vec<usize> = (0..n).collect();
    by_depth.sort_by(|&a, &b| level[b].cmp(&level[a]).then(a.cmp(&b)));
    let mut req = vec![(0usize, 0usize); n];
    for &i in &by_depth {
        let e = sorted[i];
        if children[i].is_empty() {
            req[i] = (e.desks.unwrap_or(0), e.offices.unwrap_or(0));
        } else {
            let d: usize = children[i].iter().map(|&c| req[c].0).sum();
            let o: usize = children[i].iter().map(|&c| req[c].1).sum();
            for (kind, given, derived) in [(SeatKind::Desk, e.desks, d), (SeatKind::Office, e.offices, o)] {
                if let Some(g) = given {
                    if g != derived {
                        violations.push(HierarchyViolation::SumMismatch {
                            team: e.id.clone(),
                            kind,
                            given: g,
                            derived,
                            delta: g as i64 - derived as i64,
                        });
                    }
                }
            }
            req[i] = (e.desks.unwrap_or(d), e.offices.unwrap_or(o));
        }
        if req[i] == (0, 0) {
            violations.push(HierarchyViolation::EmptyTeam { team: e.id.clone() });
        }
    }
    if !violations.is_empty() {
        violations.sort_by_key(|v| v.to_string());
        return Err(violations);
    }
    let depth = level.iter().copied().max().unwrap_or(0) + 1;
    let mut levels = vec![Vec::new(); depth];
    for i in 0..n {
        levels[level[i]].push(i);
    }
    Ok(Hierarchy {
        teams: sorted
            .iter()
            .zip(&req)
            .map(|(e, &(d, o))| Team::new(e.id.clone(), d, o))
            .collect(),
        parent,
        children,
        level,
        levels,
    })
}

fn cycle_members(parent: &[Option<usize>], start: usize) -> HashSet<usize> {
    let mut order = Vec::new();
    let mut pos = HashMap::new();
    let mut cur = Some(start);
    while let Some(c) = cur {
        if let Some(&k) = pos.get(&c) {
            return order[k..].iter().copied().collect();
        }
        pos.insert(c, order.len());
        order.push(c);
        cur = parent[c];
    }
    HashSet::new()
}

impl Hierarchy {
    pub fn new(entries: &[TeamEntry]) -> Result<Self, HierarchyError> {
        analyze(entries).map_err(HierarchyError::Invalid)
    }

    pub fn from_slice(bytes: &[u8]) -> Result<Self, HierarchyError> {
        let entries: Vec<TeamEntry> = serde_json::from_slice(bytes).map_err(|e| HierarchyError::Parse(e.to_string()))?;
        Self::new(&entries)
    }

    /// Entries with every requirement explicit, sorted by id.
    pub fn entries(&self) -> Vec<TeamEntry> {
        self.teams
            .iter()
            .enumerate()
            .map(|(i, t)| TeamEntry {
                id: t.id.clone(),
                parent: self.parent[i].map(|p| self.teams[p].id.clone()),
                desks: Some(t.desks),
                offices: Some(t.offices),
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.entries()).expect("entries serialize")
    }

    pub fn len(&self) -> usize {
        self.teams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.teams.is_empty()
    }

    pub fn teams(&self) -> &[Team] {
        &self.teams
    }

    pub fn team(&self, t: usize) -> &Team {
        &self.teams[t]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.teams.binary_search_by(|t| t.id.as_str().cmp(id)).ok()
    }

    pub fn parent(&self, t: usize) -> Option<usize> {
        self.parent[t]
    }

    /// Sorted by id.
    pub fn children(&self, t: usize) -> &[usize] {
        &self.children[t]
    }

    pub fn is_leaf(&self, t: usize) -> bool {
        self.children[t].is_empty()
    }

    pub fn level_of(&self, t: usize) -> usize {
        self.level[t]
    }

    /// Number of levels H.
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Teams at level `l`, sorted by id.
    pub fn level(&self, l: usize) -> &[usize] {
        &self.levels[l]
    }

    pub fn roots(&self) -> &[usize] {
        &self.levels[0]
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.teams.len()).filter(|&t| self.is_leaf(t)).collect()
    }

    /// `t` followed by its ancestors up to the root.
    pub fn lineage(&self, t: usize) -> Vec<usize> {
        let mut out = vec![t];
        let mut cur = t;
        while let Some(p) = self.parent[cur] {
            out.push(p);
            cur = p;
        }
        out
    }

    /// "/Root/Child/…" for team `t`.
    pub fn path(&self, t: usize) -> String {
        let mut ids: Vec<&str> = self.lineage(t).iter().map(|&i| self.teams[i].id.as_str()).collect();
        ids.reverse();
        format!("/{}", ids.join("/"))
    }
}

impl Serialize for Hierarchy {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.entries().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Hierarchy {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let entries = Vec::<TeamEntry>::deserialize(d)?;
        Hierarchy::new(&entries).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SeatAssignment {
    pub seat_id: String,
    pub team_id: String,
}

/// Seat → team per level, plus every team's central seat.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HierarchicalAllocation {
    /// Level `l` lists the assignments of level-`l` teams, sorted by seat id.
    pub levels: Vec<Vec<SeatAssignment>>,
    pub centrals: BTreeMap<String, String>,
}

impl HierarchicalAllocation {
    pub fn owners(&self, level: usize) -> HashMap<&str, &str> {
        self.levels[level]
            .iter()
            .map(|a| (a.seat_id.as_str(), a.team_id.as_str()))
            .collect()
    }

    pub fn seats_of(&self, level: usize, team: &str) -> Vec<&str> {
        self.levels[level]
            .iter()
            .filter(|a| a.team_id == team)
            .map(|a| a.seat_id.as_str())
            .collect()
    }

    fn normalize(&mut self) {
        for level in &mut self.levels {
            level.sort();
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum HsaError {
    #[error("sub-problem {path} failed: {source}")]
    Subproblem { path: String, source: SolveError },
    #[error("team {path} has no desks and no ancestor with desks, so its central seat is undefined")]
    NoCentral { path: String },
    #[error("office demand {demand} exceeds supply {supply}")]
    OfficeShortage { demand: usize, supply: usize },
    #[error("team {team:?} has no recorded central seat")]
    MissingCentral { team: String },
    #[error("distance matrix does not cover seat {seat:?}")]
    UnknownSeat { seat: String },
}

/// One SA instance solved during [`df_hsa`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubproblemRecord {
    /// Path of the team whose children were allocated; "/" for level 0.
    pub path: String,
    pub level: usize,
    pub seats: usize,
    pub teams: usize,
    pub objective: f64,
    pub optimal: bool,
    pub iterations: usize,
    pub elapsed: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HsaRun {
    pub allocation: HierarchicalAllocation,
    /// In depth-first order, children by id.
    pub subproblems: Vec<SubproblemRecord>,
}

struct Ctx<'a> {
    base: &'a SaProblem,
    h: &'a Hierarchy,
    method: Method,
    params: &'a SolverParams,
    delayed: bool,
}

#[derive(Default)]
struct Partial {
    /// (level, base seat index, hierarchy team index)
    assigned: Vec<(usize, usize, usize)>,
    centrals: Vec<(usize, usize)>,
    records: Vec<SubproblemRecord>,
}

impl Partial {
    fn absorb(&mut self, other: Partial) {
        self.assigned.extend(other.assigned);
        self.centrals.extend(other.centrals);
        self.records.extend(other.records);
    }
}

impl Ctx<'_> {
    /// Allocates `group` (siblings, or all roots) over `seats` and recurses.
    fn solve_group(
        &self,
        path: &str,
        level: usize,
        seats: Vec<usize>,
        group: &[usize],
        inherited: Option<usize>,
    ) -> Result<Partial, HsaError> {
        let mut out = Partial::default();
        let active: Vec<usize> = group
            .iter()
            .copied()
            .filter(|&t| !self.delayed || self.h.team(t).desks > 0)
            .collect();
        for &t in group {
            if !active.contains(&t) {
                let c = inherited.ok_or_else(|| HsaError::NoCentral { path: self.h.path(t) })?;
                out.centrals.push((t, c));
            }
        }
        let mut seats = seats;
        if self.delayed {
            seats.retain(|&s| self.base.kind(s) == SeatKind::Desk);
        }
        seats.sort_unstable();
        let mut members: HashMap<usize, Vec<usize>> = HashMap::new();
        if !active.is_empty() {
            let sub_teams: Vec<Team> = active
                .iter()
                .map(|&t| {
                    let team = self.h.team(t);
                    Team::new(team.id.clone(), team.desks, if self.delayed { 0 } else { team.offices })
                })
                .collect();
            let fail = |source| HsaError::Subproblem {
                path: path.to_string(),
                source,
            };
            let sub = self
                .base
                .restrict(&seats, sub_teams)
                .map_err(|e| fail(SolveError::Model(e)))?;
            let params = SolverParams {
                seed: derive_seed(self.params.seed, &format!("hsa:{path}")),
                ..self.params.clone()
            };
            let result = solve(&sub, self.method, &params).map_err(fail)?;
            let to_h = |j: usize| self.h.index_of(&sub.teams()[j].id).expect("sub-problem team is in hierarchy");
            for (i, owner) in result.allocation.owners().iter().enumerate() {
                if let Some(j) = *owner {
                    let t = to_h(j);
                    out.assigned.push((level, seats[i], t));
                    members.entry(t).or_default().push(seats[i]);
                }
            }
            for (j, &c) in result.centrals.as_slice().iter().enumerate() {
                out.centrals.push((to_h(j), seats[c]));
            }
            out.records.push(SubproblemRecord {
                path: path.to_string(),
                level,
                seats: sub.n_seats(),
                teams: sub.n_teams(),
                objective: result.objective,
                optimal: result.optimal,
                iterations: result.iterations,
                elapsed: result.elapsed,
            });
        }
        let central_of: HashMap<usize, usize> = out.centrals.iter().copied().collect();
        let parents: Vec<usize> = group.iter().copied().filter(|&t| !self.h.is_leaf(t)).collect();
        let subtrees: Vec<Result<Partial, HsaError>> = parents
            .par_iter()
            .map(|&t| {
                self.solve_group(
                    &self.h.path(t),
                    level + 1,
                    members.get(&t).cloned().unwrap_or_default(),
                    self.h.children(t),
                    central_of.get(&t).copied(),
                )
            })
            .collect();
        for sub in subtrees {
            out.absorb(sub?);
        }
        Ok(out)
    }
}

/// Depth-first hierarchical allocation. `base` holds every seat of the plan
/// (its teams are ignored). With `delayed`, the result has no offices yet;
/// pass it to [`delayed_office_allocate`].
///
/// Each sub-problem gets its own seed derived from `params.seed` and the
/// parent team's path, and its own `params.time_limit`.
pub fn df_hsa(
    base: &SaProblem,
    h: &Hierarchy,
    method: Method,
    params: &SolverParams,
    delayed: bool,
) -> Result<HsaRun, HsaError> {
    let ctx = Ctx {
        base,
        h,
        method,
        params,
        delayed,
    };
    let all: Vec<usize> = (0..base.n_seats()).collect();
    let partial = ctx.solve_group("/", 0, all, h.roots(), None)?;
    let mut allocation = HierarchicalAllocation {
        levels: vec![Vec::new(); h.depth()],
        centrals: BTreeMap::new(),
    };
    for (level, s, t) in partial.assigned {
        allocation.levels[level].push(SeatAssignment {
            seat_id: base.seats()[s].id.clone(),
            team_id: h.team(t).id.clone(),
        });
    }
    for (t, c) in partial.centrals {
        allocation.centrals.insert(h.team(t).id.clone(), base.seats()[c].id.clone());
    }
    allocation.normalize();
    Ok(HsaRun {
        allocation,
        subproblems: partial.records,
    })
}

/// Leaf teams with offices, their centrals (base indices) and demands.
fn leaf_office_demand(
    base: &SaProblem,
    h: &Hierarchy,
    alloc: &HierarchicalAllocation,
) -> Result<(Vec<usize>, Vec<usize>, Vec<usize>), HsaError> {
    let leaves: Vec<usize> = h.leaves().into_iter().filter(|&t| h.team(t).offices > 0).collect();
    let mut centrals = Vec::with_capacity(leaves.len());
    for &t in &leaves {
        let id = &h.team(t).id;
        let seat = alloc
            .centrals
            .get(id)
            .ok_or_else(|| HsaError::MissingCentral { team: id.clone() })?;
        centrals.push(
            base.seat_index(seat)
                .ok_or_else(|| HsaError::UnknownSeat { seat: seat.clone() })?,
        );
    }
    let demands = leaves.iter().map(|&t| h.team(t).offices).collect();
    Ok((leaves, centrals, demands))
}

/// Exact office assignment to leaf teams, minimizing the total distance from
/// each office to its leaf team's central seat. Each office is then also
/// recorded for every ancestor of its leaf at the ancestor's level. Offices
/// already present in `desk_result` are discarded first.
pub fn delayed_office_allocate(
    base: &SaProblem,
    h: &Hierarchy,
    desk_result: &HierarchicalAllocation,
) -> Result<HierarchicalAllocation, HsaError> {
    let (leaves, centrals, demands) = leaf_office_demand(base, h, desk_result)?;
    let offices = base.seats_of_kind(SeatKind::Office);
    let demand: usize = demands.iter().sum();
    let owner = min_cost_assignment(leaves.len(), &demands, &offices, |k, s| base.d(s, centrals[k])).ok_or(
        HsaError::OfficeShortage {
            demand,
            supply: offices.len(),
        },
    )?;
    let mut out = desk_result.clone();
    let is_office = |id: &str| base.seat_index(id).is_some_and(|i| base.kind(i) == SeatKind::Office);
    for level in &mut out.levels {
        level.retain(|a| !is_office(&a.seat_id));
    }
    for (k, o) in owner.iter().enumerate() {
        if let Some(leaf) = *o {
            for t in h.lineage(leaves[leaf]) {
                out.levels[h.level_of(t)].push(SeatAssignment {
                    seat_id: base.seats()[offices[k]].id.clone(),
                    team_id: h.team(t).id.clone(),
                });
            }
        }
    }
    out.normalize();
    Ok(out)
}

/// Σ over leaf-owned offices of D(office, leaf central): the objective of the
/// delayed office assignment.
pub fn leaf_office_cost(base: &SaProblem, h: &Hierarchy, alloc: &HierarchicalAllocation) -> Result<f64, HsaError> {
    let mut total = 0.0;
    for t in h.leaves() {
        let id = &h.team(t).id;
        let Some(level) = alloc.levels.get(h.level_of(t)) else {
            continue;
        };
        for a in level.iter().filter(|a| &a.team_id == id) {
            let s = base
                .seat_index(&a.seat_id)
                .ok_or_else(|| HsaError::UnknownSeat { seat: a.seat_id.clone() })?;
            if base.kind(s) != SeatKind::Office {
                continue;
            }
            let c = alloc
                .centrals
                .get(id)
                .and_then(|c| base.seat_index(c))
                .ok_or_else(|| HsaError::MissingCentral { team: id.clone() })?;
            total += base.d(s, c);
        }
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, thiserror::Error)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum AllocationViolation {
    #[error("allocation has {got} levels, hierarchy has {expected}")]
    LevelCount { expected: usize, got: usize },
    #[error("level {level}: unknown seat {seat:?}")]
    UnknownSeat { level: usize, seat: String },
    #[error("level {level}: team {team:?} is not at this level")]
    WrongLevel { level: usize, team: String },
    #[error("level {level}: seat {seat:?} is assigned more than once")]
    DoubleAssigned { level: usize, seat: String },
    #[error("level {level}: seat {seat:?} of team {team:?} is not held by its parent")]
    NotNested { level: usize, team: String, seat: String },
    #[error("level {level}: team {team:?} has {actual} {kind}s, requires {required}")]
    CountMismatch {
        level: usize,
        team: String,
        kind: SeatKind,
        actual: usize,
        required: usize,
    },
    #[error("team {team:?} has no central seat")]
    MissingCentral { team: String },
}

/// Nesting, sibling disjointness and exact per-team counts. Office counts are
/// checked only when `check_offices` (i.e. not for a desk-only delayed run).
pub fn check_allocation(
    base: &SaProblem,
    h: &Hierarchy,
    alloc: &HierarchicalAllocation,
    check_offices: bool,
) -> Vec<AllocationViolation> {
    let mut out = Vec::new();
    if alloc.levels.len() != h.depth() {
        out.push(AllocationViolation::LevelCount {
            expected: h.depth(),
            got: alloc.levels.len(),
        });
        return out;
    }
    for (level, assigned) in alloc.levels.iter().enumerate() {
        let mut owner: HashMap<&str, &str> = HashMap::new();
        let mut counts: HashMap<&str, [usize; 2]> = HashMap::new();
        for a in assigned {
            let Some(s) = base.seat_index(&a.seat_id) else {
                out.push(AllocationViolation::UnknownSeat {
                    level,
                    seat: a.seat_id.clone(),
                });
                continue;
            };
            match h.index_of(&a.team_id) {
                Some(t) if h.level_of(t) == level => {}
                _ => {
                    out.push(AllocationViolation::WrongLevel {
                        level,
                        team: a.team_id.clone(),
                    });
                    continue;
                }
            }
            if owner.insert(&a.seat_id, &a.team_id).is_some() {
                out.push(AllocationViolation::DoubleAssigned {
                    level,
                    seat: a.seat_id.clone(),
                });
            }
            counts.entry(&a.team_id).or_default()[(base.kind(s) == SeatKind::Office) as usize] += 1;
        }
        if level > 0 {
            let above = alloc.owners(level - 1);
            for a in assigned {
                let Some(t) = h.index_of(&a.team_id) else { continue };
                let parent = h.parent(t).map(|p| h.team(p).id.as_str());
                if above.get(a.seat_id.as_str()).copied() != parent {
                    out.push(AllocationViolation::NotNested {
                        level,
                        team: a.team_id.clone(),
                        seat: a.seat_id.clone(),
                    });
                }
            }
        }
        for &t in h.level(level) {
            let team = h.team(t);
            let got = counts.get(team.id.as_str()).copied().unwrap_or_default();
            let kinds: &[(SeatKind, usize)] = if check_offices {
                &[(SeatKind::Desk, 0), (SeatKind::Office, 1)]
            } else {
                &[(SeatKind::Desk, 0)]
            };
            for &(kind, k) in kinds {
                if got[k] != team.demand(kind) {
                    out.push(AllocationViolation::CountMismatch {
                        level,
                        team: team.id.clone(),
                        kind,
                        actual: got[k],
                        required: team.demand(kind),
                    });
                }
            }
        }
    }
    for team in h.teams() {
        if !alloc.centrals.contains_key(&team.id) {
            out.push(AllocationViolation::MissingCentral { team: team.id.clone() });
        }
    }
    out
}

//! Exact maximum-welfare calendaring by depth-first branch-and-bound.
//!
//! Units within a slot are interchangeable, so per-unit exclusivity and
//! demand constraints collapse to per-slot counting: a set of starts is
//! feasible iff every slot's summed demand fits the capacity (and, in
//! [`SolveMode::Dedicated`], every tenant's summed demand fits its
//! reservation). The search works on those counts and materializes unit
//! indices only for the final schedule.

mod enumerate;

pub use enumerate::{enumerate_all, EnumerateError, ENUMERATION_LIMIT};

use crate::model::{Instance, RequestId, Schedule, Slot};
use serde::{Deserialize, Serialize};
use std::cmp::Reverse;
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

/// Which reservation regime the solver enforces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMode {
    /// Only the global per-slot capacity binds.
    Shared,
    /// Each tenant's per-slot usage is additionally capped at its reservation.
    Dedicated,
}

impl SolveMode {
    pub fn tenant_caps_enforced(self) -> bool {
        matches!(self, SolveMode::Dedicated)
    }
}

impl fmt::Display for SolveMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveMode::Shared => write!(f, "shared"),
            SolveMode::Dedicated => write!(f, "dedicated"),
        }
    }
}

impl FromStr for SolveMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "shared" => Ok(SolveMode::Shared),
            "dedicated" => Ok(SolveMode::Dedicated),
            other => Err(format!(
                "unknown mode `{other}` (expected one of: shared, dedicated)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactResult {
    pub schedule: Schedule,
    pub optimum: u64,
    pub nodes_explored: u64,
    /// `false` when the node budget ran out; `schedule` is then the best
    /// incumbent found.
    pub proven_optimal: bool,
}

struct Item {
    id: RequestId,
    tenant: usize,
    demand: u32,
    duration: u32,
    window: RangeInclusive<Slot>,
}

struct Search {
    items: Vec<Item>,
    free: Vec<u32>,
    tenant_free: Vec<Vec<u32>>,
    mode: SolveMode,
    chosen: Vec<Option<Slot>>,
    accepted: u64,
    best: u64,
    best_chosen: Vec<Option<Slot>>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl Search {
    fn fits(&self, item: &Item, start: Slot) -> bool {
        (start..start + item.duration).all(|slot| {
            let n = slot as usize;
            self.free[n] >= item.demand
                && (self.mode == SolveMode::Shared || self.tenant_free[item.tenant][n] >= item.demand)
        })
    }

    fn charge(&mut self, depth: usize, start: Slot, sign: bool) {
        let item = &self.items[depth];
        for slot in start..start + item.duration {
            let n = slot as usize;
            if sign {
                self.free[n] -= item.demand;
                self.tenant_free[item.tenant][n] -= item.demand;
            } else {
                self.free[n] += item.demand;
                self.tenant_free[item.tenant][n] += item.demand;
            }
        }
    }

    fn dfs(&mut self, depth: usize) {
        if self.nodes >= self.budget {
            self.exhausted = true;
            return;
        }
        self.nodes += 1;

        if depth == self.items.len() {
            if self.accepted > self.best {
                self.best = self.accepted;
                self.best_chosen.clone_from(&self.chosen);
            }
            return;
        }
        let undecided = (self.items.len() - depth) as u64;
        if self.accepted + undecided <= self.best {
            return;
        }

        for start in self.items[depth].window.clone() {
            if !self.fits(&self.items[depth], start) {
                continue;
            }
            self.charge(depth, start, true);
            self.chosen[depth] = Some(start);
            self.accepted += 1;
            self.dfs(depth + 1);
            self.accepted -= 1;
            self.chosen[depth] = None;
            self.charge(depth, start, false);
            if self.exhausted {
                return;
            }
        }
        self.dfs(depth + 1);
    }
}

/// Finds a maximum-welfare schedule under `mode`.
///
/// Requests are branched in (latest start, larger demand, id) order; each
/// branch tries every admissible start in ascending order before rejecting.
/// The first optimum found in that order is kept. A node budget of `None`
/// uses [`DEFAULT_NODE_BUDGET`].
pub fn solve_exact(instance: &Instance, mode: SolveMode, node_budget: Option<u64>) -> ExactResult {
    let horizon = instance.horizon;
    let mut items: Vec<Item> = instance
        .requests
        .iter()
        .filter_map(|r| {
            let tenant = instance.tenant_index(r.tenant)?;
            let window = r.start_window(horizon);
            let limit = match mode {
                SolveMode::Shared => instance.capacity,
                SolveMode::Dedicated => instance.tenants[tenant].reserved,
            };
            // Requests that cannot fit even an empty calendar never branch.
            if window.is_empty() || r.demand > limit {
                return None;
            }
            Some(Item {
                id: r.id,
                tenant,
                demand: r.demand,
                duration: r.duration,
                window,
            })
        })
        .collect();
    items.sort_by_key(|item| (*item.window.end(), Reverse(item.demand), item.id));

    let slots = horizon as usize + 1;
    let tenant_free = instance
        .tenants
        .iter()
        .map(|t| match mode {
            SolveMode::Shared => vec![instance.capacity; slots],
            SolveMode::Dedicated => vec![t.reserved; slots],
        })
        .collect();
    let count = items.len();
    let mut search = Search {
        items,
        free: vec![instance.capacity; slots],
        tenant_free,
        mode,
        chosen: vec![None; count],
        accepted: 0,
        best: 0,
        best_chosen: vec![None; count],
        nodes: 0,
        budget: node_budget.unwrap_or(DEFAULT_NODE_BUDGET),
        exhausted: false,
    };
    search.dfs(0);

    let accepted: Vec<(RequestId, Slot)> = search
        .items
        .iter()
        .zip(&search.best_chosen)
        .filter_map(|(item, start)| start.map(|s| (item.id, s)))
        .collect();
    ExactResult {
        schedule: Schedule::materialize(instance, &accepted),
        optimum: search.best,
        nodes_explored: search.nodes,
        proven_optimal: !search.exhausted,
    }
}

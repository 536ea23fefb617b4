//! Greedy slot-sweep schedulers.
//!
//! Both schedulers walk the horizon slot by slot and, at every slot, try the
//! pending requests in priority order: nearest latest start first, then
//! larger demand, then lower id. A request is accepted at the first slot
//! where its whole active window fits; it is dropped once the sweep passes
//! its latest start.
//!
//! * [`dra`] confines every tenant to its own reservation.
//! * [`sra`] lets a tenant that has run out of reservation borrow the
//!   unused reservation of one other tenant.

mod dra;
mod ledger;
mod sra;

pub use dra::{dra, dra_with_ledger};
pub use ledger::LedgerView;
pub use sra::{sra, sra_with_ledger};

use crate::model::{Instance, RequestId, Slot};
use std::cmp::Ordering;
use std::collections::BTreeSet;

/// Scheduling priority of a pending request. Smaller keys go first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PriorityKey {
    /// Latest admissible start slot.
    pub deadline: Slot,
    pub demand: u32,
    pub id: RequestId,
}

impl Ord for PriorityKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.deadline
            .cmp(&other.deadline)
            .then_with(|| other.demand.cmp(&self.demand))
            .then_with(|| self.id.cmp(&other.id))
    }
}

impl PartialOrd for PriorityKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Pending requests that may start at `slot`, in priority order.
pub fn priority_list(instance: &Instance, slot: Slot, pending: &BTreeSet<RequestId>) -> Vec<RequestId> {
    let mut keys: Vec<PriorityKey> = instance
        .requests
        .iter()
        .filter(|r| pending.contains(&r.id))
        .filter(|r| r.start_window(instance.horizon).contains(&slot))
        .map(|r| PriorityKey {
            deadline: r.latest_start(instance.horizon),
            demand: r.demand,
            id: r.id,
        })
        .collect();
    keys.sort_unstable();
    keys.into_iter().map(|k| k.id).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Request, SliceType, Tenant};

    fn instance(requests: Vec<Request>) -> Instance {
        Instance::new(
            10,
            10,
            vec![Tenant {
                id: 0,
                reserved: 10,
                share: 1.0,
            }],
            requests,
        )
        .unwrap()
    }

    fn req(id: u32, slice: SliceType, arrival: u32, demand: u32, duration: u32) -> Request {
        Request {
            id,
            tenant: 0,
            slice,
            arrival,
            demand,
            duration,
        }
    }

    #[test]
    fn rllc_ahead_of_embb() {
        let inst = instance(vec![
            req(0, SliceType::Embb, 1, 1, 2),
            req(1, SliceType::EmbbRllc, 2, 1, 1),
        ]);
        let pending = BTreeSet::from([0, 1]);
        assert_eq!(priority_list(&inst, 2, &pending), vec![1, 0]);
        // The EMBBRLLC request is only eligible on arrival.
        assert_eq!(priority_list(&inst, 3, &pending), vec![0]);
        assert_eq!(priority_list(&inst, 1, &pending), vec![0]);
    }

    #[test]
    fn larger_demand_first() {
        let inst = instance(vec![
            req(0, SliceType::Embb, 1, 1, 2),
            req(1, SliceType::Embb, 1, 3, 2),
        ]);
        assert_eq!(priority_list(&inst, 1, &BTreeSet::from([0, 1])), vec![1, 0]);
    }

    #[test]
    fn id_breaks_ties_and_empty_pending() {
        let inst = instance(vec![
            req(5, SliceType::Embb, 1, 2, 2),
            req(3, SliceType::Embb, 1, 2, 2),
        ]);
        assert_eq!(priority_list(&inst, 1, &BTreeSet::from([3, 5])), vec![3, 5]);
        assert!(priority_list(&inst, 1, &BTreeSet::new()).is_empty());
    }

    #[test]
    fn key_order() {
        let a = PriorityKey {
            deadline: 2,
            demand: 1,
            id: 9,
        };
        let b = PriorityKey {
            deadline: 3,
            demand: 5,
            id: 0,
        };
        let c = PriorityKey {
            deadline: 3,
            demand: 4,
            id: 0,
        };
        assert!(a < b && b < c);
    }
}

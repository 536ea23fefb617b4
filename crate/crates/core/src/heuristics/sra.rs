use super::{priority_list, LedgerView};
use crate::model::{Instance, RequestId, Schedule, Slot};
use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap};

/// Sharing-based resource allocation: one global sweep in which a tenant
/// short of reservation may borrow unused units from a single donor tenant.
pub fn sra(instance: &Instance) -> Schedule {
    sra_with_ledger(instance).0
}

/// [`sra`] together with the final usage ledger.
pub fn sra_with_ledger(instance: &Instance) -> (Schedule, LedgerView) {
    let mut ledger = LedgerView::new(instance);
    let mut accepted: Vec<(RequestId, Slot)> = Vec::new();
    let tenant_index: HashMap<u32, usize> = instance
        .tenants
        .iter()
        .enumerate()
        .map(|(i, t)| (t.id, i))
        .collect();

    let mut pending: BTreeSet<RequestId> = instance
        .requests
        .iter()
        .filter(|r| r.is_admissible(instance.horizon))
        .map(|r| r.id)
        .collect();

    for slot in 1..=instance.horizon {
        for id in priority_list(instance, slot, &pending) {
            let request = instance.request(id).expect("pending ids come from the instance");
            let tenant = tenant_index[&request.tenant];
            let window = request.active_slots(slot);
            if !ledger.globally_free(window.clone(), request.demand) {
                continue;
            }

            if ledger.own_pool_covers(tenant, window.clone(), request.demand) {
                ledger.charge(tenant, None, window, request.demand);
                accepted.push((id, slot));
                pending.remove(&id);
                continue;
            }

            let Some(donor) = pick_donor(instance, &ledger, tenant, window.clone()) else {
                continue;
            };
            let covered = window.clone().all(|s| {
                ledger.pool_remaining(tenant, s) + ledger.pool_remaining(donor, s) >= request.demand
            });
            if covered {
                ledger.charge(tenant, Some(donor), window, request.demand);
                accepted.push((id, slot));
                pending.remove(&id);
            }
        }
        pending.retain(|id| {
            instance
                .request(*id)
                .is_some_and(|r| r.latest_start(instance.horizon) > slot)
        });
    }

    (Schedule::materialize(instance, &accepted), ledger)
}

/// The other tenant with the largest unused reservation over the whole
/// window, lowest id on ties. `None` if nobody has slack in every slot.
fn pick_donor(
    instance: &Instance,
    ledger: &LedgerView,
    borrower: usize,
    window: std::ops::RangeInclusive<Slot>,
) -> Option<usize> {
    (0..ledger.tenants())
        .filter(|&t| t != borrower)
        .map(|t| (t, ledger.min_pool_remaining(t, window.clone())))
        .filter(|&(_, slack)| slack > 0)
        .max_by_key(|&(t, slack)| (slack, Reverse(instance.tenants[t].id)))
        .map(|(t, _)| t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heuristics::dra;
    use crate::model::{validate, Request, SliceType, Tenant};

    fn tenant(id: u32, reserved: u32) -> Tenant {
        Tenant {
            id,
            reserved,
            share: 0.0,
        }
    }

    fn req(id: u32, tenant: u32, slice: SliceType, arrival: u32, demand: u32, duration: u32) -> Request {
        Request {
            id,
            tenant,
            slice,
            arrival,
            demand,
            duration,
        }
    }

    #[test]
    fn borrows_from_idle_tenant() {
        let inst = Instance::new(
            4,
            4,
            vec![tenant(0, 2), tenant(1, 2)],
            vec![req(0, 1, SliceType::Embb, 1, 3, 2)],
        )
        .unwrap();
        let (schedule, ledger) = sra_with_ledger(&inst);
        assert_eq!(schedule.start_of(0), Some(1));
        for slot in 1..=2 {
            assert_eq!(ledger.borrowed_out(0, slot), 1);
            assert_eq!(ledger.borrowed_in(1, slot), 1);
            assert_eq!(ledger.pool_remaining(1, slot), 0);
            assert_eq!(ledger.pool_remaining(0, slot), 1);
        }
        assert_eq!(ledger.borrowed_out(0, 3), 0);
        assert!(validate(&inst, &schedule, false).feasible);
        assert!(!validate(&inst, &schedule, true).feasible);
        assert_eq!(dra(&inst).start_of(0), None);
    }

    #[test]
    fn single_donor_only() {
        // Needs 3 extra units; two donors hold 2 each, neither suffices alone.
        let inst = Instance::new(
            2,
            6,
            vec![tenant(0, 2), tenant(1, 2), tenant(2, 2)],
            vec![req(0, 0, SliceType::EmbbRllc, 1, 5, 1)],
        )
        .unwrap();
        assert_eq!(sra(&inst).start_of(0), None);
    }

    #[test]
    fn donor_with_most_slack() {
        let inst = Instance::new(
            3,
            9,
            vec![tenant(0, 1), tenant(1, 3), tenant(2, 5)],
            vec![
                req(0, 2, SliceType::EmbbRllc, 1, 3, 1),
                req(1, 0, SliceType::EmbbRllc, 1, 3, 1),
            ],
        )
        .unwrap();
        // Tenant 2 keeps 2 units after its own request; tenant 1 has 3.
        let (schedule, ledger) = sra_with_ledger(&inst);
        assert_eq!(schedule.start_of(1), Some(1));
        assert_eq!(ledger.borrowed_out(1, 1), 2);
        assert_eq!(ledger.borrowed_out(2, 1), 0);
    }

    #[test]
    fn no_slack_matches_dra() {
        let inst = Instance::new(
            3,
            4,
            vec![tenant(0, 2), tenant(1, 2)],
            vec![
                req(0, 0, SliceType::Embb, 1, 2, 3),
                req(1, 1, SliceType::Embb, 1, 2, 3),
                req(2, 0, SliceType::EmbbRllc, 2, 1, 1),
            ],
        )
        .unwrap();
        assert_eq!(sra(&inst).starts, dra(&inst).starts);
    }

    #[test]
    fn pending_request_retried_later() {
        let inst = Instance::new(
            4,
            2,
            vec![tenant(0, 1), tenant(1, 1)],
            vec![
                req(0, 0, SliceType::EmbbRllc, 1, 2, 2),
                req(1, 1, SliceType::Embb, 1, 2, 1),
            ],
        )
        .unwrap();
        let schedule = sra(&inst);
        assert_eq!(schedule.start_of(0), Some(1));
        assert_eq!(schedule.start_of(1), Some(3));
        assert!(validate(&inst, &schedule, false).feasible);
    }
}

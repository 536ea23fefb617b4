use super::{priority_list, LedgerView};
use crate::model::{Instance, RequestId, Schedule, Slot};
use std::collections::BTreeSet;

/// Dedicated resource allocation: each tenant schedules its own requests
/// inside its own reservation, tenant by tenant in id order.
pub fn dra(instance: &Instance) -> Schedule {
    dra_with_ledger(instance).0
}

/// [`dra`] together with the final usage ledger.
pub fn dra_with_ledger(instance: &Instance) -> (Schedule, LedgerView) {
    let mut ledger = LedgerView::new(instance);
    let mut accepted: Vec<(RequestId, Slot)> = Vec::new();

    let mut order: Vec<usize> = (0..instance.tenants.len()).collect();
    order.sort_by_key(|&t| instance.tenants[t].id);

    for tenant in order {
        let tenant_id = instance.tenants[tenant].id;
        let reserved = instance.tenants[tenant].reserved;
        let mut pending: BTreeSet<RequestId> = instance
            .requests
            .iter()
            .filter(|r| r.tenant == tenant_id && r.is_admissible(instance.horizon))
            .map(|r| r.id)
            .collect();

        for slot in 1..=instance.horizon {
            for id in priority_list(instance, slot, &pending) {
                let request = instance.request(id).expect("pending ids come from the instance");
                if request.demand > reserved {
                    // The reservation can never hold this request.
                    pending.remove(&id);
                    continue;
                }
                let window = request.active_slots(slot);
                if ledger.own_pool_covers(tenant, window.clone(), request.demand)
                    && ledger.globally_free(window.clone(), request.demand)
                {
                    ledger.charge(tenant, None, window, request.demand);
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
    }

    (Schedule::materialize(instance, &accepted), ledger)
}

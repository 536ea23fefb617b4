use crate::model::{Instance, Slot};
use std::ops::RangeInclusive;

/// Per-slot usage accounting shared by the greedy schedulers.
///
/// Tenants are addressed by their position in [`Instance::tenants`]. Units a
/// tenant consumes are charged to its own reservation first; any excess is
/// borrowed from one donor and shows up in the donor's `borrowed_out` and the
/// borrower's `borrowed_in`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LedgerView {
    capacity: u32,
    reserved: Vec<u32>,
    free_units: Vec<u32>,
    tenant_used: Vec<Vec<u32>>,
    borrowed_in: Vec<Vec<u32>>,
    borrowed_out: Vec<Vec<u32>>,
}

impl LedgerView {
    pub fn new(instance: &Instance) -> Self {
        let slots = instance.horizon as usize + 1;
        let tenants = instance.tenants.len();
        LedgerView {
            capacity: instance.capacity,
            reserved: instance.tenants.iter().map(|t| t.reserved).collect(),
            free_units: vec![instance.capacity; slots],
            tenant_used: vec![vec![0; slots]; tenants],
            borrowed_in: vec![vec![0; slots]; tenants],
            borrowed_out: vec![vec![0; slots]; tenants],
        }
    }

    pub fn horizon(&self) -> Slot {
        (self.free_units.len() - 1) as Slot
    }

    pub fn capacity(&self) -> u32 {
        self.capacity
    }

    pub fn tenants(&self) -> usize {
        self.reserved.len()
    }

    pub fn reserved(&self, tenant: usize) -> u32 {
        self.reserved[tenant]
    }

    pub fn free_units(&self, slot: Slot) -> u32 {
        self.free_units[slot as usize]
    }

    /// Units consumed by the tenant's accepted requests, borrowed or not.
    pub fn tenant_used(&self, tenant: usize, slot: Slot) -> u32 {
        self.tenant_used[tenant][slot as usize]
    }

    pub fn borrowed_in(&self, tenant: usize, slot: Slot) -> u32 {
        self.borrowed_in[tenant][slot as usize]
    }

    pub fn borrowed_out(&self, tenant: usize, slot: Slot) -> u32 {
        self.borrowed_out[tenant][slot as usize]
    }

    /// Unused part of the tenant's reservation.
    pub fn pool_remaining(&self, tenant: usize, slot: Slot) -> u32 {
        let n = slot as usize;
        let own = self.tenant_used[tenant][n] - self.borrowed_in[tenant][n];
        self.reserved[tenant] - own - self.borrowed_out[tenant][n]
    }

    /// Smallest pool remainder over `slots`.
    pub fn min_pool_remaining(&self, tenant: usize, slots: RangeInclusive<Slot>) -> u32 {
        slots
            .map(|slot| self.pool_remaining(tenant, slot))
            .min()
            .unwrap_or(0)
    }

    pub(crate) fn globally_free(&self, slots: RangeInclusive<Slot>, demand: u32) -> bool {
        slots.into_iter().all(|slot| self.free_units(slot) >= demand)
    }

    pub(crate) fn own_pool_covers(&self, tenant: usize, slots: RangeInclusive<Slot>, demand: u32) -> bool {
        slots
            .into_iter()
            .all(|slot| self.pool_remaining(tenant, slot) >= demand)
    }

    /// Charges `demand` units per slot to `tenant`, taking as much as possible
    /// from its own pool and the rest from `donor`.
    ///
    /// The caller has checked that own pool plus donor slack covers the demand
    /// in every slot.
    pub(crate) fn charge(&mut self, tenant: usize, donor: Option<usize>, slots: RangeInclusive<Slot>, demand: u32) {
        for slot in slots {
            let own = self.pool_remaining(tenant, slot).min(demand);
            let borrowed = demand - own;
            let n = slot as usize;
            if borrowed > 0 {
                let donor = donor.expect("borrowing requires a donor");
                debug_assert!(self.pool_remaining(donor, slot) >= borrowed);
                self.borrowed_out[donor][n] += borrowed;
                self.borrowed_in[tenant][n] += borrowed;
            }
            self.tenant_used[tenant][n] += demand;
            self.free_units[n] -= demand;
        }
    }
}

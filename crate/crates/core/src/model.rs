//! Domain model for slot-based radio-resource calendaring.
//!
//! Time is split into slots `1..=horizon`. Every slot offers `capacity`
//! identical resource units, numbered `1..=capacity`. A request that starts in
//! slot `n` holds `demand` units in every slot `n..=n + duration - 1` and may
//! not be interrupted or reshaped once started.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

/// One-based time slot index. `0` is used as the "never" sentinel by
/// [`Request::latest_start`].
pub type Slot = u32;
pub type TenantId = u32;
pub type RequestId = u32;

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },
}

impl ModelError {
    fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ModelError::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SliceType {
    /// Delay-tolerant broadband; may be shifted to a later slot.
    #[serde(rename = "EMBB")]
    Embb,
    /// Broadband with a latency bound; must start on arrival.
    #[serde(rename = "EMBBRLLC")]
    EmbbRllc,
}

impl fmt::Display for SliceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SliceType::Embb => write!(f, "EMBB"),
            SliceType::EmbbRllc => write!(f, "EMBBRLLC"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tenant {
    pub id: TenantId,
    /// Units per slot held under contract.
    pub reserved: u32,
    /// Fraction of capacity the generator derived `reserved` from.
    #[serde(default)]
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Request {
    pub id: RequestId,
    pub tenant: TenantId,
    pub slice: SliceType,
    pub arrival: Slot,
    /// Units held in every active slot.
    pub demand: u32,
    /// Number of consecutive active slots.
    pub duration: u32,
}

impl Request {
    /// Last slot from which the request may start, or `0` when no admissible
    /// start exists.
    ///
    /// EMBB requests may start any time they still complete inside the
    /// horizon. EMBBRLLC requests may only start on arrival, and only when
    /// they complete inside the horizon from there.
    pub fn latest_start(&self, horizon: Slot) -> Slot {
        if self.duration == 0 || self.duration > horizon {
            return 0;
        }
        let last_fitting = horizon - self.duration + 1;
        match self.slice {
            SliceType::Embb => last_fitting,
            SliceType::EmbbRllc if self.arrival <= last_fitting => self.arrival,
            SliceType::EmbbRllc => 0,
        }
    }

    /// Inclusive range of admissible start slots. Empty when the request can
    /// never be admitted.
    pub fn start_window(&self, horizon: Slot) -> std::ops::RangeInclusive<Slot> {
        self.arrival.max(1)..=self.latest_start(horizon)
    }

    pub fn is_admissible(&self, horizon: Slot) -> bool {
        !self.start_window(horizon).is_empty()
    }

    /// Utility of starting the request in `slot`: `1` inside the admissible
    /// start window, `0` elsewhere. Non-increasing in `slot` from arrival on.
    pub fn utility(&self, slot: Slot, horizon: Slot) -> u32 {
        u32::from(self.start_window(horizon).contains(&slot))
    }

    /// Slots occupied when started at `start`.
    pub fn active_slots(&self, start: Slot) -> std::ops::RangeInclusive<Slot> {
        start..=start + self.duration - 1
    }
}

/// A complete offline calendaring problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub horizon: Slot,
    pub capacity: u32,
    pub tenants: Vec<Tenant>,
    pub requests: Vec<Request>,
}

impl Instance {
    /// Builds an instance and checks its invariants.
    pub fn new(
        horizon: Slot,
        capacity: u32,
        tenants: Vec<Tenant>,
        requests: Vec<Request>,
    ) -> Result<Self, ModelError> {
        let instance = Instance {
            horizon,
            capacity,
            tenants,
            requests,
        };
        instance.check()?;
        Ok(instance)
    }

    /// Verifies the structural invariants, naming the first offending field.
    pub fn check(&self) -> Result<(), ModelError> {
        if self.horizon < 1 {
            return Err(ModelError::invalid("horizon", "must be at least 1"));
        }
        let mut tenant_ids = BTreeSet::new();
        let mut reserved_total: u64 = 0;
        for (i, tenant) in self.tenants.iter().enumerate() {
            if !tenant_ids.insert(tenant.id) {
                return Err(ModelError::invalid(
                    format!("tenants[{i}].id"),
                    format!("duplicate tenant id {}", tenant.id),
                ));
            }
            if tenant.reserved > self.capacity {
                return Err(ModelError::invalid(
                    format!("tenants[{i}].reserved"),
                    format!("{} exceeds capacity {}", tenant.reserved, self.capacity),
                ));
            }
            if !(0.0..=1.0).contains(&tenant.share) {
                return Err(ModelError::invalid(
                    format!("tenants[{i}].share"),
                    format!("{} is outside [0, 1]", tenant.share),
                ));
            }
            reserved_total += u64::from(tenant.reserved);
        }
        if reserved_total > u64::from(self.capacity) {
            return Err(ModelError::invalid(
                "tenants",
                format!(
                    "total reservation {reserved_total} exceeds capacity {}",
                    self.capacity
                ),
            ));
        }

        let mut request_ids = BTreeSet::new();
        for (i, request) in self.requests.iter().enumerate() {
            if !request_ids.insert(request.id) {
                return Err(ModelError::invalid(
                    format!("requests[{i}].id"),
                    format!("duplicate request id {}", request.id),
                ));
            }
            if !tenant_ids.contains(&request.tenant) {
                return Err(ModelError::invalid(
                    format!("requests[{i}].tenant"),
                    format!("unknown tenant id {}", request.tenant),
                ));
            }
            if request.arrival < 1 || request.arrival > self.horizon {
                return Err(ModelError::invalid(
                    format!("requests[{i}].arrival"),
                    format!("{} is outside 1..={}", request.arrival, self.horizon),
                ));
            }
            if request.demand < 1 {
                return Err(ModelError::invalid(
                    format!("requests[{i}].demand"),
                    "must be at least 1",
                ));
            }
            if request.duration < 1 {
                return Err(ModelError::invalid(
                    format!("requests[{i}].duration"),
                    "must be at least 1",
                ));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let instance: Instance = serde_json::from_str(text)?;
        instance.check()?;
        Ok(instance)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    pub fn request(&self, id: RequestId) -> Option<&Request> {
        self.requests.iter().find(|r| r.id == id)
    }

    pub fn tenant(&self, id: TenantId) -> Option<&Tenant> {
        self.tenants.iter().find(|t| t.id == id)
    }

    /// Position of a tenant in `tenants`.
    pub fn tenant_index(&self, id: TenantId) -> Option<usize> {
        self.tenants.iter().position(|t| t.id == id)
    }

    /// Size of the start-or-reject assignment space, saturating at `u64::MAX`.
    pub fn search_space(&self) -> u64 {
        self.requests.iter().fold(1u64, |acc, r| {
            let choices = r.start_window(self.horizon).count() as u64;
            acc.saturating_mul(choices + 1)
        })
    }

    pub fn utility(&self, request: &Request, slot: Slot) -> u32 {
        request.utility(slot, self.horizon)
    }
}

/// Unit `unit` of slot `slot` is held by `request`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct UnitAssignment {
    pub slot: Slot,
    pub unit: u32,
    pub request: RequestId,
}

/// A calendaring decision: start slots for accepted requests and the
/// resource units each one holds per slot.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    /// `None` (or a missing key) means rejected.
    pub starts: BTreeMap<RequestId, Option<Slot>>,
    pub assignment: Vec<UnitAssignment>,
}

impl Schedule {
    /// All requests rejected.
    pub fn reject_all(instance: &Instance) -> Self {
        Schedule {
            starts: instance.requests.iter().map(|r| (r.id, None)).collect(),
            assignment: Vec::new(),
        }
    }

    /// Builds a schedule from accepted `(request, start)` pairs, handing
    /// each request the lowest-numbered free units of every active slot in
    /// the given order.
    ///
    /// Units are interchangeable, so this only fails to be valid when the
    /// starts themselves violate a constraint.
    pub fn materialize(instance: &Instance, accepted: &[(RequestId, Slot)]) -> Self {
        let mut schedule = Schedule::reject_all(instance);
        let mut next_unit = vec![1u32; instance.horizon as usize + 2];
        for &(id, start) in accepted {
            schedule.starts.insert(id, Some(start));
            let Some(request) = instance.request(id) else {
                continue;
            };
            for slot in request.active_slots(start) {
                let Some(next) = next_unit.get_mut(slot as usize) else {
                    continue;
                };
                for unit in *next..*next + request.demand {
                    schedule.assignment.push(UnitAssignment {
                        slot,
                        unit,
                        request: id,
                    });
                }
                *next += request.demand;
            }
        }
        schedule.assignment.sort_unstable();
        schedule
    }

    pub fn start_of(&self, id: RequestId) -> Option<Slot> {
        self.starts.get(&id).copied().flatten()
    }

    /// Accepted `(request, start)` pairs in request-id order.
    pub fn accepted(&self) -> impl Iterator<Item = (RequestId, Slot)> + '_ {
        self.starts
            .iter()
            .filter_map(|(&id, start)| start.map(|s| (id, s)))
    }

    pub fn accepted_count(&self) -> usize {
        self.accepted().count()
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConstraintTag {
    Admission,
    Exclusivity,
    Demand,
    Capacity,
    TenantCap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub tag: ConstraintTag,
    pub slot: Option<Slot>,
    pub request: Option<RequestId>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub feasible: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn count(&self, tag: ConstraintTag) -> usize {
        self.violations.iter().filter(|v| v.tag == tag).count()
    }
}

struct Checker {
    violations: Vec<Violation>,
}

impl Checker {
    fn report(
        &mut self,
        tag: ConstraintTag,
        slot: Option<Slot>,
        request: Option<RequestId>,
        detail: String,
    ) {
        self.violations.push(Violation {
            tag,
            slot,
            request,
            detail,
        });
    }
}

/// Checks a schedule against every constraint of the calendaring problem.
///
/// Constraints are checked in the order admission, exclusivity, demand,
/// capacity and (when `tenant_caps_enforced`) per-tenant reservation caps.
/// All problems are collected; nothing is thrown.
pub fn validate(
    instance: &Instance,
    schedule: &Schedule,
    tenant_caps_enforced: bool,
) -> ValidationReport {
    use ConstraintTag::*;

    let requests: HashMap<RequestId, &Request> =
        instance.requests.iter().map(|r| (r.id, r)).collect();
    let mut checker = Checker {
        violations: Vec::new(),
    };

    for (id, start) in schedule.accepted() {
        let Some(request) = requests.get(&id) else {
            checker.report(
                Admission,
                Some(start),
                Some(id),
                format!("request {id} is not part of the instance"),
            );
            continue;
        };
        let window = request.start_window(instance.horizon);
        if window.is_empty() {
            checker.report(
                Admission,
                Some(start),
                Some(id),
                format!("request {id} has no admissible start slot"),
            );
        } else if !window.contains(&start) {
            checker.report(
                Admission,
                Some(start),
                Some(id),
                format!(
                    "start {start} is outside the admissible window {}..={}",
                    window.start(),
                    window.end()
                ),
            );
        }
    }

    let mut cells: BTreeMap<(Slot, u32), Vec<RequestId>> = BTreeMap::new();
    for cell in &schedule.assignment {
        cells
            .entry((cell.slot, cell.unit))
            .or_default()
            .push(cell.request);
    }
    for (&(slot, unit), holders) in &cells {
        if holders.len() > 1 {
            checker.report(
                Exclusivity,
                Some(slot),
                None,
                format!("unit {unit} is assigned {} times: {holders:?}", holders.len()),
            );
        }
    }

    // Distinct units held per request per slot.
    let mut held: BTreeMap<RequestId, BTreeMap<Slot, BTreeSet<u32>>> = BTreeMap::new();
    for cell in &schedule.assignment {
        held.entry(cell.request)
            .or_default()
            .entry(cell.slot)
            .or_default()
            .insert(cell.unit);
    }
    for (&id, per_slot) in &held {
        let start = schedule.start_of(id);
        let request = requests.get(&id);
        for (&slot, units) in per_slot {
            let active = match (request, start) {
                (Some(r), Some(s)) => r.active_slots(s).contains(&slot),
                _ => false,
            };
            if active && (1..=instance.horizon).contains(&slot) {
                continue;
            }
            let detail = match (request, start) {
                (None, _) => format!("units held by unknown request {id}"),
                (Some(_), None) => format!("rejected request {id} holds {} units", units.len()),
                (Some(_), Some(_)) => format!(
                    "request {id} holds {} units outside its active slots",
                    units.len()
                ),
            };
            checker.report(Demand, Some(slot), Some(id), detail);
        }
    }
    for (id, start) in schedule.accepted() {
        let Some(request) = requests.get(&id) else {
            continue;
        };
        for slot in request.active_slots(start) {
            if slot > instance.horizon {
                break;
            }
            let got = held
                .get(&id)
                .and_then(|m| m.get(&slot))
                .map_or(0, |units| units.len());
            if got != request.demand as usize {
                checker.report(
                    Demand,
                    Some(slot),
                    Some(id),
                    format!("holds {got} units, demand is {}", request.demand),
                );
            }
        }
    }

    // Per-slot usage counts distinct (unit, request) pairs.
    let mut slot_usage: BTreeMap<Slot, u64> = BTreeMap::new();
    let mut tenant_usage: BTreeMap<(Slot, TenantId), u64> = BTreeMap::new();
    for (&id, per_slot) in &held {
        for (&slot, units) in per_slot {
            *slot_usage.entry(slot).or_default() += units.len() as u64;
            if let Some(request) = requests.get(&id) {
                *tenant_usage.entry((slot, request.tenant)).or_default() += units.len() as u64;
            }
        }
    }
    for cell in &schedule.assignment {
        if cell.unit < 1 || cell.unit > instance.capacity {
            checker.report(
                Capacity,
                Some(cell.slot),
                Some(cell.request),
                format!("unit {} does not exist (capacity {})", cell.unit, instance.capacity),
            );
        }
    }
    for (&slot, &used) in &slot_usage {
        if used > u64::from(instance.capacity) {
            checker.report(
                Capacity,
                Some(slot),
                None,
                format!("{used} units assigned, capacity is {}", instance.capacity),
            );
        }
    }

    if tenant_caps_enforced {
        for (&(slot, tenant_id), &used) in &tenant_usage {
            let reserved = instance.tenant(tenant_id).map_or(0, |t| t.reserved);
            if used > u64::from(reserved) {
                checker.report(
                    TenantCap,
                    Some(slot),
                    None,
                    format!("tenant {tenant_id} uses {used} units, reservation is {reserved}"),
                );
            }
        }
    }

    ValidationReport {
        feasible: checker.violations.is_empty(),
        violations: checker.violations,
    }
}

/// Sum of utilities over accepted requests.
pub fn welfare(instance: &Instance, schedule: &Schedule) -> u64 {
    schedule
        .accepted()
        .filter_map(|(id, start)| instance.request(id).map(|r| r.utility(start, instance.horizon)))
        .map(u64::from)
        .sum()
}

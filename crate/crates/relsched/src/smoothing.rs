//! Machine smoothing: replace an arbitrary related-machine set by groups of
//! identical machines whose power grows at least geometrically.
//!
//! A smoothed machine set is partitioned into groups `G_0, G_1, ...` (fastest
//! first) with
//!
//! * Property 1: all machines in a group have equal speed,
//! * Property 2: `S(G_l) >= S(G_0) + ... + S(G_{l-1})` where
//!   `S(G) = sum_{i in G} s_i^gamma`,
//! * Property 3: group speeds strictly decrease, and distinct speeds differ
//!   by at least a factor of 2.
//!
//! The construction scales the fastest machine to speed 1, rounds every speed
//! down to a power of `Gamma = 2^(1/gamma)` (so `s^gamma` becomes an exact
//! power of two and the bookkeeping below is exact integer arithmetic),
//! gathers machines fastest-first into groups of power exactly `2^l`,
//! flattens each group to its slowest speed, and finally merges groups whose
//! speeds share the same power-of-two bucket. Machines that cannot complete
//! the last group are recorded as leftover and never scheduled on.

use crate::core::{Instance, IntegralAssignment, Machine, MachineGroup, Mode};
use crate::{Error, Result};

/// Widest admissible rounded-speed exponent range. `s^gamma` spans at most
/// this many powers of two so the scaled weights stay exact in u128/f64.
const MAX_EXPONENT_SPAN: u32 = 96;

/// Result of smoothing: machine groups (normalized so the fastest group has
/// speed 1), the scale factor that undoes the normalization, the leftover
/// machines, and the slot-to-original-machine back mapping.
#[derive(Debug, Clone)]
pub struct SmoothedInstance {
    pub gamma: f64,
    /// Original speed of the fastest machine; multiplies normalized speeds.
    pub scale: f64,
    pub groups: Vec<MachineGroup>,
    /// Original ids of machines in the incomplete last group; unusable.
    pub leftover: Vec<usize>,
    /// Per group: original machine ids sorted by descending original speed.
    /// Slot `s` of the group maps to `members[s % members.len()]`.
    members: Vec<Vec<usize>>,
    /// Global slot id of the first slot of each group.
    offsets: Vec<usize>,
}

impl SmoothedInstance {
    /// Smooths a homogeneous machine set for the given `gamma >= 1`
    /// (`gamma = q/(q-1)` for the q-norm objective, 1 for makespan).
    pub fn smooth(machines: &[Machine], gamma: f64) -> Result<SmoothedInstance> {
        if machines.is_empty() {
            return Err(Error::EmptyMachines);
        }
        if !(1.0..=64.0).contains(&gamma) {
            return Err(Error::InvalidArgument(format!("gamma must be in [1, 64], got {gamma}")));
        }
        let mut speeds = Vec::with_capacity(machines.len());
        for m in machines {
            let s = m.uniform_speed()?;
            if s <= 0.0 || !s.is_finite() {
                return Err(Error::InvalidInstance(format!(
                    "machine {} must have positive speed",
                    m.id
                )));
            }
            speeds.push((m.id, s));
        }
        let scale = speeds.iter().map(|&(_, s)| s).fold(0.0, f64::max);

        // Round each normalized speed down to a power of Gamma = 2^(1/gamma):
        // t = smallest integer >= 0 with 2^(-t/gamma) <= s (near-exact powers
        // are kept, so smoothing an already-smoothed set does not re-round).
        let mut rounded: Vec<(usize, f64, u32)> = Vec::with_capacity(speeds.len());
        for &(id, s) in &speeds {
            let sn = s / scale;
            let mut t = (-gamma * sn.log2() - 1e-9).ceil().max(0.0) as u32;
            while pow2(-(t as f64) / gamma) > sn * (1.0 + 1e-12) {
                t += 1;
            }
            while t > 0 && pow2(-((t - 1) as f64) / gamma) <= sn * (1.0 + 1e-12) {
                t -= 1;
            }
            rounded.push((id, sn, t));
        }
        let t_max = rounded.iter().map(|&(_, _, t)| t).max().unwrap();
        if t_max > MAX_EXPONENT_SPAN {
            return Err(Error::InvalidArgument(format!(
                "speed range too wide for exact smoothing: spans {t_max} rounding steps (max {MAX_EXPONENT_SPAN})"
            )));
        }

        // Fastest first; ties broken by id.
        rounded.sort_by(|a, b| a.2.cmp(&b.2).then(a.0.cmp(&b.0)));

        // Phase 1: groups with exact power 2^l (scaled by 2^t_max so every
        // weight 2^(t_max - t) is an integer and partial sums are exact).
        struct RawGroup {
            t: u32,              // exponent of the slowest speed in the group
            power: u128,         // scaled by 2^t_max
            members: Vec<usize>, // original ids in speed-descending order
        }
        let mut raw: Vec<RawGroup> = Vec::new();
        let mut leftover: Vec<usize> = Vec::new();
        {
            let mut it = rounded.iter().peekable();
            let mut level: u32 = 0;
            'outer: while it.peek().is_some() {
                let target: u128 = 1u128 << (level + t_max);
                let mut sum: u128 = 0;
                let mut members = Vec::new();
                let mut t_slowest = 0;
                while sum < target {
                    match it.next() {
                        Some(&(id, _, t)) => {
                            sum += 1u128 << (t_max - t);
                            members.push(id);
                            t_slowest = t;
                        }
                        None => {
                            leftover = members;
                            break 'outer;
                        }
                    }
                }
                debug_assert_eq!(sum, target, "partial sums of dyadic weights hit 2^l exactly");
                raw.push(RawGroup { t: t_slowest, power: target, members });
                level += 1;
            }
        }

        // Merge groups of equal speed, then groups whose speeds fall in the
        // same bucket [2^b, 2^(b+1)). Group speeds decrease, so both merges
        // combine consecutive runs.
        let bucket_of = |t: u32| -> i64 { (-(t as f64) / gamma + 1e-9).floor() as i64 };
        let mut buckets: Vec<(i64, u128, Vec<usize>)> = Vec::new();
        for rg in raw {
            let b = bucket_of(rg.t);
            match buckets.last_mut() {
                Some((last_b, power, members)) if *last_b == b => {
                    *power += rg.power;
                    members.extend(rg.members);
                }
                _ => buckets.push((b, rg.power, rg.members)),
            }
        }

        // Flatten each bucket to speed 2^b, taking ceil(power / 2^(b*gamma))
        // machines. The ceiling slack per bucket is below 2^b, and the slacks
        // over all buckets sum to less than the power gap Property 2 leaves,
        // so the property survives.
        let mut groups = Vec::with_capacity(buckets.len());
        let mut members = Vec::with_capacity(buckets.len());
        let mut offsets = Vec::with_capacity(buckets.len());
        let mut next_slot = 0usize;
        let norm_speed = |id: usize| speeds.iter().find(|&&(i, _)| i == id).unwrap().1;
        for (index, (b, power_scaled, mut ids)) in buckets.into_iter().enumerate() {
            let speed = pow2(b as f64);
            let power = power_scaled as f64 * pow2(-(t_max as f64));
            let unit = speed.powf(gamma);
            let count = ((power / unit - 1e-9).ceil().max(1.0)) as usize;
            ids.sort_by(|&x, &y| {
                norm_speed(y)
                    .partial_cmp(&norm_speed(x))
                    .unwrap()
                    .then(x.cmp(&y))
            });
            groups.push(MachineGroup::new(index, speed, count, gamma));
            members.push(ids);
            offsets.push(next_slot);
            next_slot += count;
        }

        let smoothed = SmoothedInstance { gamma, scale, groups, leftover, members, offsets };
        debug_assert!(smoothed.check_properties().is_ok());
        Ok(smoothed)
    }

    /// Total number of smoothed machine slots across all groups.
    pub fn total_slots(&self) -> usize {
        self.groups.iter().map(|g| g.count).sum()
    }

    /// (group index, slot-within-group) of a global slot id.
    pub fn locate_slot(&self, slot: usize) -> Result<(usize, usize)> {
        for (g, group) in self.groups.iter().enumerate() {
            let start = self.offsets[g];
            if slot < start + group.count {
                return Ok((g, slot - start));
            }
        }
        Err(Error::LeftoverMachine(slot))
    }

    /// Global slot id for a slot of a group.
    pub fn slot_id(&self, group: usize, within: usize) -> usize {
        self.offsets[group] + within
    }

    /// Original machine ids contributing to a group.
    pub fn group_members(&self, group: usize) -> &[usize] {
        &self.members[group]
    }

    /// The smoothed machine set in original speed units: one machine per
    /// slot, ids equal to slot ids.
    pub fn smoothed_machines(&self) -> Vec<Machine> {
        let mut out = Vec::with_capacity(self.total_slots());
        for group in &self.groups {
            for within in 0..group.count {
                out.push(Machine::uniform(
                    self.slot_id(group.index, within),
                    group.speed * self.scale,
                ));
            }
        }
        out
    }

    /// An instance over the smoothed machines carrying the given jobs.
    pub fn smoothed_instance(&self, jobs: Vec<crate::core::Job>, d: usize) -> Instance {
        Instance { d, mode: Mode::Homogeneous, machines: self.smoothed_machines(), jobs }
    }

    /// Maps an assignment on smoothed slots back to the original machines.
    /// Slots of a group are distributed round-robin over the group's original
    /// machines in descending speed order.
    pub fn map_back(&self, a: &IntegralAssignment) -> Result<IntegralAssignment> {
        let mut out = IntegralAssignment::new();
        for (&job, &slot) in &a.assign {
            let (g, within) = self.locate_slot(slot)?;
            let members = &self.members[g];
            out.set(job, members[within % members.len()]);
        }
        Ok(out)
    }

    /// Largest number of slots any single original machine backs.
    pub fn max_slots_per_original(&self) -> usize {
        self.groups
            .iter()
            .map(|g| {
                let n = self.members[g.index].len();
                g.count.div_ceil(n)
            })
            .max()
            .unwrap_or(0)
    }

    /// Verifies Properties 1-3 and the power cache.
    pub fn check_properties(&self) -> Result<()> {
        let mut prefix = 0.0f64;
        for (i, g) in self.groups.iter().enumerate() {
            if !g.power_consistent(self.gamma) {
                return Err(Error::InvalidInstance(format!(
                    "group {i} power cache inconsistent"
                )));
            }
            if i > 0 {
                let prev = &self.groups[i - 1];
                if g.speed >= prev.speed {
                    return Err(Error::InvalidInstance(format!(
                        "group speeds must strictly decrease (group {i})"
                    )));
                }
                if prev.speed / g.speed < 2.0 - 1e-12 {
                    return Err(Error::InvalidInstance(format!(
                        "adjacent distinct speeds must differ by a factor >= 2 (group {i})"
                    )));
                }
                if g.power < prefix * (1.0 - 1e-12) {
                    return Err(Error::InvalidInstance(format!(
                        "group {i} power {} below the prefix sum {prefix}",
                        g.power
                    )));
                }
            }
            prefix += g.power;
        }
        Ok(())
    }
}

fn pow2(e: f64) -> f64 {
    2f64.powf(e)
}

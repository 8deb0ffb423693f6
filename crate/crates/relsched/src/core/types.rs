use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A job with a `d`-dimensional size vector (abstract work units).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Job {
    pub id: usize,
    pub sizes: Vec<f64>,
}

impl Job {
    pub fn new(id: usize, sizes: Vec<f64>) -> Job {
        Job { id, sizes }
    }

    pub fn scalar(id: usize, size: f64) -> Job {
        Job { id, sizes: vec![size] }
    }

    pub fn dim(&self) -> usize {
        self.sizes.len()
    }

    /// `p_{j,max}`, the largest entry of the size vector.
    pub fn max_size(&self) -> f64 {
        self.sizes.iter().cloned().fold(0.0, f64::max)
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        if self.sizes.len() != d {
            return Err(Error::InvalidInstance(format!(
                "job {} has dimension {} but the instance has dimension {d}",
                self.id,
                self.sizes.len()
            )));
        }
        if self.sizes.iter().any(|&p| !p.is_finite() || p < 0.0) {
            return Err(Error::InvalidInstance(format!(
                "job {} has a negative or non-finite size",
                self.id
            )));
        }
        Ok(())
    }
}

/// Machine speed: one positive number, or one non-negative number per
/// dimension (0 encodes "arbitrarily slow": the machine cannot take any
/// positive load on that dimension).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Speed {
    Uniform(f64),
    PerDim(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Machine {
    pub id: usize,
    pub speed: Speed,
}

impl Machine {
    pub fn uniform(id: usize, speed: f64) -> Machine {
        Machine { id, speed: Speed::Uniform(speed) }
    }

    pub fn per_dim(id: usize, speeds: Vec<f64>) -> Machine {
        Machine { id, speed: Speed::PerDim(speeds) }
    }

    pub fn speed_on(&self, dim: usize) -> f64 {
        match &self.speed {
            Speed::Uniform(s) => *s,
            Speed::PerDim(v) => v[dim],
        }
    }

    /// Uniform speed; errors for heterogeneous machines.
    pub fn uniform_speed(&self) -> Result<f64> {
        match &self.speed {
            Speed::Uniform(s) => Ok(*s),
            Speed::PerDim(_) => Err(Error::InvalidArgument(format!(
                "machine {} has heterogeneous speeds",
                self.id
            ))),
        }
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        match &self.speed {
            Speed::Uniform(s) => {
                if !s.is_finite() || *s <= 0.0 {
                    return Err(Error::InvalidInstance(format!(
                        "machine {} must have positive uniform speed",
                        self.id
                    )));
                }
            }
            Speed::PerDim(v) => {
                if v.len() != d {
                    return Err(Error::InvalidInstance(format!(
                        "machine {} has {} speed entries but the instance has dimension {d}",
                        self.id,
                        v.len()
                    )));
                }
                if v.iter().any(|&s| !s.is_finite() || s < 0.0) {
                    return Err(Error::InvalidInstance(format!(
                        "machine {} has a negative or non-finite speed",
                        self.id
                    )));
                }
                if !v.iter().any(|&s| s > 0.0) {
                    return Err(Error::InvalidInstance(format!(
                        "machine {} has zero speed on every dimension",
                        self.id
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Homogeneous,
    Heterogeneous,
}

/// A scheduling instance: `d` dimensions, jobs in arrival order, machines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub d: usize,
    pub mode: Mode,
    pub machines: Vec<Machine>,
    pub jobs: Vec<Job>,
}

impl Instance {
    pub fn homogeneous(d: usize, machines: Vec<Machine>, jobs: Vec<Job>) -> Instance {
        Instance { d, mode: Mode::Homogeneous, machines, jobs }
    }

    pub fn heterogeneous(d: usize, machines: Vec<Machine>, jobs: Vec<Job>) -> Instance {
        Instance { d, mode: Mode::Heterogeneous, machines, jobs }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::InvalidInstance("dimension must be >= 1".into()));
        }
        if self.machines.is_empty() {
            return Err(Error::EmptyMachines);
        }
        for m in &self.machines {
            m.validate(self.d)?;
            if self.mode == Mode::Homogeneous && matches!(m.speed, Speed::PerDim(_)) {
                return Err(Error::InvalidInstance(format!(
                    "machine {} has per-dimension speeds in a homogeneous instance",
                    m.id
                )));
            }
        }
        for j in &self.jobs {
            j.validate(self.d)?;
        }
        let mut ids: Vec<usize> = self.machines.iter().map(|m| m.id).collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != self.machines.len() {
            return Err(Error::InvalidInstance("duplicate machine ids".into()));
        }
        let mut jids: Vec<usize> = self.jobs.iter().map(|j| j.id).collect();
        jids.sort_unstable();
        jids.dedup();
        if jids.len() != self.jobs.len() {
            return Err(Error::InvalidInstance("duplicate job ids".into()));
        }
        Ok(())
    }

    pub fn machine_index(&self, id: usize) -> Option<usize> {
        self.machines.iter().position(|m| m.id == id)
    }
}

/// A group of identical machines in a smoothed instance: `count` machines of
/// equal `speed`, with cached power `S(G) = count * speed^gamma`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MachineGroup {
    pub index: usize,
    pub speed: f64,
    pub count: usize,
    pub power: f64,
}

impl MachineGroup {
    pub fn new(index: usize, speed: f64, count: usize, gamma: f64) -> MachineGroup {
        assert!(speed > 0.0 && count >= 1);
        let power = count as f64 * speed.powf(gamma);
        MachineGroup { index, speed, count, power }
    }

    /// Checks the cached power against `count * speed^gamma` (1e-12 relative).
    pub fn power_consistent(&self, gamma: f64) -> bool {
        let expected = self.count as f64 * self.speed.powf(gamma);
        (self.power - expected).abs() <= 1e-12 * expected.max(1e-300)
    }
}

/// Job id -> machine id.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct IntegralAssignment {
    pub assign: BTreeMap<usize, usize>,
}

impl IntegralAssignment {
    pub fn new() -> IntegralAssignment {
        IntegralAssignment::default()
    }

    pub fn set(&mut self, job: usize, machine: usize) {
        self.assign.insert(job, machine);
    }

    pub fn machine_of(&self, job: usize) -> Option<usize> {
        self.assign.get(&job).copied()
    }

    pub fn len(&self) -> usize {
        self.assign.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assign.is_empty()
    }
}

/// Per-machine, per-dimension loads.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadProfile {
    pub loads: Vec<Vec<f64>>,
}

impl LoadProfile {
    pub fn zeros(machines: usize, d: usize) -> LoadProfile {
        LoadProfile { loads: vec![vec![0.0; d]; machines] }
    }

    /// Loads of one dimension across machines.
    pub fn dimension(&self, k: usize) -> Vec<f64> {
        self.loads.iter().map(|row| row[k]).collect()
    }

    pub fn max_load(&self) -> f64 {
        self.loads
            .iter()
            .flat_map(|row| row.iter().cloned())
            .fold(0.0, f64::max)
    }
}

/// Fractional assignment of jobs to machine groups, built from chunks of
/// fraction `chunk`. For a fully processed job the fractions sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalAssignment {
    pub x: BTreeMap<(usize, usize), f64>,
    pub chunk: f64,
}

impl FractionalAssignment {
    pub fn new(chunk: f64) -> FractionalAssignment {
        FractionalAssignment { x: BTreeMap::new(), chunk }
    }

    pub fn add(&mut self, job: usize, group: usize, fraction: f64) {
        debug_assert!(fraction >= 0.0);
        *self.x.entry((job, group)).or_insert(0.0) += fraction;
    }

    pub fn fraction(&self, job: usize, group: usize) -> f64 {
        self.x.get(&(job, group)).copied().unwrap_or(0.0)
    }

    /// Per-group fractions of one job, fastest group first.
    pub fn distribution(&self, job: usize, n_groups: usize) -> Vec<f64> {
        (0..n_groups).map(|g| self.fraction(job, g)).collect()
    }

    pub fn total(&self, job: usize) -> f64 {
        self.x
            .range((job, 0)..=(job, usize::MAX))
            .map(|(_, f)| f)
            .sum()
    }

    pub fn job_ids(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self.x.keys().map(|&(j, _)| j).collect();
        ids.dedup();
        ids
    }
}

use super::{pow_q, q_norm, FractionalAssignment, Instance, IntegralAssignment, Job, LoadProfile, MachineGroup, Norm};
use crate::{Error, Result};

/// Builds the per-machine, per-dimension load profile of an integral
/// assignment: `loads[i][k] = sum_{j: assign(j)=i} p_j(k) / s_i(k)`,
/// accumulated in arrival order.
pub fn load_profile(instance: &Instance, a: &IntegralAssignment) -> Result<LoadProfile> {
    let mut profile = LoadProfile::zeros(instance.machines.len(), instance.d);
    for job in &instance.jobs {
        let machine_id = a
            .machine_of(job.id)
            .ok_or(Error::UnassignedJob(job.id))?;
        let mi = instance
            .machine_index(machine_id)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown machine id {machine_id}")))?;
        let machine = &instance.machines[mi];
        for k in 0..instance.d {
            let p = job.sizes[k];
            if p == 0.0 {
                continue;
            }
            let s = machine.speed_on(k);
            if s == 0.0 {
                return Err(Error::InfiniteLoad { job: job.id, machine: machine_id, dim: k });
            }
            profile.loads[mi][k] += p / s;
        }
    }
    Ok(profile)
}

/// Makespan, per-dimension q-norms and the machine-level objective split
/// (`f` load-dependent, `g` job-dependent, `h = f + g`; only for finite q).
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveReport {
    pub makespan: f64,
    pub qnorms: Vec<f64>,
    pub max_qnorm: f64,
    pub f: Option<f64>,
    pub g: Option<f64>,
    pub h: Option<f64>,
}

/// Evaluates an integral assignment: load profile, makespan, per-dimension
/// q-norms and (for finite q) the machine-level h objective.
pub fn evaluate(instance: &Instance, a: &IntegralAssignment, q: Norm) -> Result<ObjectiveReport> {
    let profile = load_profile(instance, a)?;
    let makespan = profile.max_load();
    let qnorms: Vec<f64> = (0..instance.d)
        .map(|k| q_norm(&profile.dimension(k), q))
        .collect();
    let max_qnorm = qnorms.iter().cloned().fold(0.0, f64::max);

    let (f, g, h) = match q {
        Norm::Infinity => (None, None, None),
        Norm::Finite(qv) => {
            let f: f64 = profile
                .loads
                .iter()
                .flat_map(|row| row.iter())
                .map(|&l| pow_q(l, qv))
                .sum();
            let mut g = 0.0;
            for job in &instance.jobs {
                let machine_id = a.machine_of(job.id).ok_or(Error::UnassignedJob(job.id))?;
                let mi = instance.machine_index(machine_id).unwrap();
                for k in 0..instance.d {
                    let p = job.sizes[k];
                    if p > 0.0 {
                        g += pow_q(p / instance.machines[mi].speed_on(k), qv);
                    }
                }
            }
            (Some(f), Some(g), Some(f + g))
        }
    };

    Ok(ObjectiveReport { makespan, qnorms, max_qnorm, f, g, h })
}

/// The scalar group-view objective of a fractional assignment:
/// `f = sum_G |G| * Lambda_G^q`, `g = sum_G sum_j (p_j/s_G)^q * x_{Gj}`,
/// `h = f + g`, where `Lambda_G = sum_j x_{Gj} (p_j/s_G) / |G|`.
pub fn objective_h_scalar(
    groups: &[MachineGroup],
    x: &FractionalAssignment,
    jobs: &[Job],
    q: f64,
) -> (f64, f64, f64) {
    let mut lambda = vec![0.0; groups.len()];
    let mut g_term = 0.0;
    for job in jobs {
        let p = job.sizes[0];
        for group in groups {
            let frac = x.fraction(job.id, group.index);
            if frac == 0.0 {
                continue;
            }
            let p_gj = p / group.speed;
            lambda[group.index] += frac * p_gj / group.count as f64;
            g_term += pow_q(p_gj, q) * frac;
        }
    }
    let f_term: f64 = groups
        .iter()
        .map(|group| group.count as f64 * pow_q(lambda[group.index], q))
        .sum();
    (f_term, g_term, f_term + g_term)
}

/// Which vector objective to evaluate: the sum over dimensions or the
/// maximum over dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VectorObjective {
    SumOverDims,
    MaxOverDims,
}

/// The vector group-view objective of a fractional assignment.
///
/// Sum variant: `sum_k sum_G |G| Lambda_G(k)^q + sum_G sum_j (sum_k (p_j(k)/s_G)^q) x_{Gj}`.
/// Max variant: `max_k [ sum_G |G| Lambda_G(k)^q + sum_G sum_j (p_j(k)/s_G)^q x_{Gj} ]`.
pub fn objective_h_vector(
    groups: &[MachineGroup],
    x: &FractionalAssignment,
    jobs: &[Job],
    q: f64,
    variant: VectorObjective,
) -> f64 {
    let d = jobs.first().map_or(0, |j| j.dim());
    if d == 0 {
        return 0.0;
    }
    let mut lambda = vec![vec![0.0; d]; groups.len()];
    let mut g_per_dim = vec![0.0; d];
    for job in jobs {
        for group in groups {
            let frac = x.fraction(job.id, group.index);
            if frac == 0.0 {
                continue;
            }
            for k in 0..d {
                let p_gj = job.sizes[k] / group.speed;
                lambda[group.index][k] += frac * p_gj / group.count as f64;
                g_per_dim[k] += pow_q(p_gj, q) * frac;
            }
        }
    }
    let f_of_dim = |k: usize| -> f64 {
        groups
            .iter()
            .map(|group| group.count as f64 * pow_q(lambda[group.index][k], q))
            .sum()
    };
    match variant {
        VectorObjective::SumOverDims => (0..d).map(|k| f_of_dim(k) + g_per_dim[k]).sum(),
        VectorObjective::MaxOverDims => (0..d)
            .map(|k| f_of_dim(k) + g_per_dim[k])
            .fold(0.0, f64::max),
    }
}

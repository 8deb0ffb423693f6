//! Scalar q-norm scheduling on related machines: an online fractional
//! assignment by gradient descent on the group-view objective
//! `h(x) = sum_G |G| Lambda_G^q + sum_{G,j} (p_j/s_G)^q x_{Gj}`,
//! followed by an online middle-point rounding.
//!
//! Each infinitesimal fraction of the current job goes to the group with the
//! smallest `eta = max(alpha, beta)`, where `alpha` is the load-dependent and
//! `beta` the job-dependent derivative. Ties with `alpha >= beta` split in
//! proportion to the group powers `|G| s_G^gamma`, which keeps the alphas
//! tied. The flow is simulated exactly: within each bookkeeping chunk the
//! assignment follows the argmin continuously, solving for the mass at which
//! the minimizer changes in closed form. Chunks (`delta` of a job) only set
//! the resolution of the assignment log and of the fraction bookkeeping.

use crate::core::{
    pow_q, FractionalAssignment, Instance, IntegralAssignment, Job, MachineGroup, Mode, Norm,
};
use crate::smoothing::SmoothedInstance;
use crate::{Error, Result};

/// One logged assignment segment: `mass` of `job` placed on `group`, with the
/// derivative values at the moment of placement. Used by the analysis probes
/// (red/blue classification), not by the algorithm itself.
#[derive(Debug, Clone, Copy)]
pub struct ChunkRecord {
    pub job: usize,
    pub group: usize,
    pub mass: f64,
    pub alpha: f64,
    pub beta: f64,
}

/// Online state of the fractional gradient-descent assignment.
#[derive(Debug, Clone)]
pub struct FracState {
    pub groups: Vec<MachineGroup>,
    pub q: f64,
    pub gamma: f64,
    /// Bookkeeping chunk as a fraction of a job (normalized to 1/n).
    pub delta: f64,
    n_chunks: usize,
    lambda: Vec<f64>,
    pub x: FractionalAssignment,
    pub log: Vec<ChunkRecord>,
    /// Count of post-chunk violations of the alpha monotonicity invariant
    /// (faster group must have the larger alpha), at 1e-9 relative.
    pub monotonicity_violations: usize,
    pub worst_monotonicity_gap: f64,
    /// Near-ties where more than one group had `alpha < beta` (the smoothing
    /// properties make this impossible up to floating point).
    pub special_tie_anomalies: usize,
}

const TIE_REL_TOL: f64 = 1e-9;

impl FracState {
    pub fn new(groups: Vec<MachineGroup>, q: f64, delta: f64) -> Result<FracState> {
        if q <= 1.0 || !q.is_finite() {
            return Err(Error::InvalidArgument(format!("fractional algorithm needs q > 1, got {q}")));
        }
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::InvalidArgument(format!("delta must be in (0, 1], got {delta}")));
        }
        if groups.is_empty() {
            return Err(Error::EmptyMachines);
        }
        let n_chunks = (1.0 / delta).round().max(1.0) as usize;
        let lambda = vec![0.0; groups.len()];
        Ok(FracState {
            gamma: q / (q - 1.0),
            q,
            delta: 1.0 / n_chunks as f64,
            n_chunks,
            lambda,
            x: FractionalAssignment::new(1.0 / n_chunks as f64),
            log: Vec::new(),
            monotonicity_violations: 0,
            worst_monotonicity_gap: 0.0,
            special_tie_anomalies: 0,
            groups,
        })
    }

    pub fn from_smoothed(smoothed: &SmoothedInstance, q: f64, delta: f64) -> Result<FracState> {
        FracState::new(smoothed.groups.clone(), q, delta)
    }

    /// Fractional group loads `Lambda_G`.
    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// `(alpha, beta, eta)` of a group for a job of size `p > 0`:
    /// `alpha = q Lambda_G^(q-1) p / s_G`, `beta = (p / s_G)^q`,
    /// `eta = max(alpha, beta)`.
    pub fn alpha_beta(&self, group: usize, p: f64) -> (f64, f64, f64) {
        let g = &self.groups[group];
        let alpha = self.q * pow_q(self.lambda[group], self.q - 1.0) * p / g.speed;
        let beta = pow_q(p / g.speed, self.q);
        (alpha, beta, alpha.max(beta))
    }

    /// Per-group fractions of a job, fastest group first.
    pub fn distribution(&self, job: usize) -> Vec<f64> {
        self.x.distribution(job, self.groups.len())
    }

    /// Assigns a full job online, chunk by chunk.
    pub fn assign_job(&mut self, job_id: usize, p: f64) {
        let mass = 1.0 / self.n_chunks as f64;
        for _ in 0..self.n_chunks {
            self.assign_chunk(job_id, p, mass);
        }
    }

    /// Mass of job fraction needed to raise `alpha` of `group` to `target`.
    fn mass_to_alpha(&self, group: usize, target: f64, p: f64) -> f64 {
        let g = &self.groups[group];
        let lambda_target = (target * g.speed / (self.q * p)).powf(1.0 / (self.q - 1.0));
        (lambda_target - self.lambda[group]) * g.speed * g.count as f64 / p
    }

    fn deposit(&mut self, job: usize, group: usize, mass: f64, alpha: f64, beta: f64, p: f64) {
        if mass <= 0.0 {
            return;
        }
        let g = &self.groups[group];
        self.x.add(job, group, mass);
        self.lambda[group] += mass * p / (g.speed * g.count as f64);
        self.log.push(ChunkRecord { job, group, mass, alpha, beta });
    }

    /// Assigns `mass` of job `job_id` (size `p`) by following the minimum-eta
    /// flow exactly.
    pub fn assign_chunk(&mut self, job_id: usize, p: f64, mass: f64) {
        if p <= 0.0 {
            // Zero jobs carry no load; park them on the fastest group.
            self.x.add(job_id, 0, mass);
            self.log.push(ChunkRecord { job: job_id, group: 0, mass, alpha: 0.0, beta: 0.0 });
            return;
        }
        let n = self.groups.len();
        let betas: Vec<f64> = (0..n).map(|g| pow_q(p / self.groups[g].speed, self.q)).collect();
        let mut remaining = mass;
        let mut guard = 0usize;
        while remaining > mass * 1e-12 {
            guard += 1;
            let alphas: Vec<f64> = (0..n)
                .map(|g| self.q * pow_q(self.lambda[g], self.q - 1.0) * p / self.groups[g].speed)
                .collect();
            let etas: Vec<f64> = (0..n).map(|g| alphas[g].max(betas[g])).collect();
            let eta_min = etas.iter().cloned().fold(f64::INFINITY, f64::min);
            // Widen the tie tolerance if floating point stalls the flow.
            let tol = TIE_REL_TOL * 10f64.powi((guard / (4 * n + 4)) as i32);
            let tied: Vec<usize> =
                (0..n).filter(|&g| etas[g] <= eta_min * (1.0 + tol)).collect();

            let special: Vec<usize> = tied
                .iter()
                .copied()
                .filter(|&g| alphas[g] < betas[g] * (1.0 - 1e-12))
                .collect();
            if let Some(&g) = special.first() {
                if special.len() > 1 {
                    debug_assert!(
                        false,
                        "more than one tied group with alpha < beta (Property 3 excludes this)"
                    );
                    self.special_tie_anomalies += 1;
                }
                // The whole flow goes to this group until alpha meets beta.
                let mu = self.mass_to_alpha(g, betas[g], p);
                let take = remaining.min(mu.max(0.0));
                if take > 0.0 {
                    self.deposit(job_id, g, take, alphas[g], betas[g], p);
                    remaining -= take;
                }
                if take < remaining * 1e-12 && mu <= 0.0 {
                    // alpha is numerically at beta already; next pass treats
                    // the group as alpha-dominated.
                    continue;
                }
                continue;
            }

            // Proportional flow over the tied groups (all alpha-dominated).
            let s_total: f64 = tied.iter().map(|&g| self.groups[g].power).sum();
            let next_eta = (0..n)
                .filter(|g| !tied.contains(g))
                .map(|g| etas[g])
                .fold(f64::INFINITY, f64::min);
            let take = if next_eta.is_finite() {
                let slowest = *tied.last().unwrap();
                let sigma = self.groups[slowest].power / s_total;
                let mu = self.mass_to_alpha(slowest, next_eta, p) / sigma;
                if mu <= remaining * 1e-9 {
                    // The next group is effectively tied; merge and retry.
                    remaining.min(mu.max(remaining * 1e-9))
                } else {
                    remaining.min(mu)
                }
            } else {
                remaining
            };
            for &g in &tied {
                let share = take * self.groups[g].power / s_total;
                self.deposit(job_id, g, share, alphas[g], betas[g], p);
            }
            remaining -= take;
            if guard > 64 * (n + 1) {
                // Floating-point stall: flush the rest proportionally.
                let s: f64 = tied.iter().map(|&g| self.groups[g].power).sum();
                for &g in &tied {
                    self.deposit(job_id, g, remaining * self.groups[g].power / s, alphas[g], betas[g], p);
                }
                remaining = 0.0;
            }
        }
        self.check_monotonicity();
    }

    /// Checks that `alpha` is monotone in group speed (job-independent form
    /// `q Lambda^(q-1) / s`), at 1e-9 relative.
    fn check_monotonicity(&mut self) {
        let m: Vec<f64> = (0..self.groups.len())
            .map(|g| self.q * pow_q(self.lambda[g], self.q - 1.0) / self.groups[g].speed)
            .collect();
        let scale = m.iter().cloned().fold(0.0, f64::max).max(1e-300);
        for w in m.windows(2) {
            let gap = w[1] - w[0];
            if gap > 1e-9 * scale {
                self.monotonicity_violations += 1;
                self.worst_monotonicity_gap = self.worst_monotonicity_gap.max(gap / scale);
            }
        }
    }
}

/// Middle point of a per-group distribution (fastest group first): the
/// smallest index whose prefix sum reaches half the total mass.
pub fn middle_point(dist: &[f64]) -> Result<usize> {
    if dist.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let total: f64 = dist.iter().sum();
    if total <= 0.0 {
        return Err(Error::EmptyDistribution);
    }
    let mut prefix = 0.0;
    for (i, &f) in dist.iter().enumerate() {
        prefix += f;
        if prefix >= 0.5 * total - 1e-12 * total {
            return Ok(i);
        }
    }
    Ok(dist.len() - 1)
}

/// Result of rounding: job -> global slot, plus the committed group per job.
#[derive(Debug, Clone)]
pub struct ScalarRounding {
    pub slots: IntegralAssignment,
    pub commits: Vec<(usize, usize)>,
    /// Final scalar load per group and slot-within-group.
    pub group_loads: Vec<Vec<f64>>,
}

/// Rounds a complete fractional assignment online: each job commits to its
/// middle-point group and goes to the group machine with the smallest load
/// (lowest id on ties). Jobs are processed in the given arrival order.
pub fn round_scalar(
    frac: &FractionalAssignment,
    jobs: &[Job],
    smoothed: &SmoothedInstance,
) -> Result<ScalarRounding> {
    let mut group_loads: Vec<Vec<f64>> =
        smoothed.groups.iter().map(|g| vec![0.0; g.count]).collect();
    let mut slots = IntegralAssignment::new();
    let mut commits = Vec::with_capacity(jobs.len());
    for job in jobs {
        let dist = frac.distribution(job.id, smoothed.groups.len());
        let group = middle_point(&dist)?;
        let loads = &mut group_loads[group];
        let mut best = 0usize;
        for i in 1..loads.len() {
            if loads[i] < loads[best] {
                best = i;
            }
        }
        loads[best] += job.sizes[0] / smoothed.groups[group].speed;
        slots.set(job.id, smoothed.slot_id(group, best));
        commits.push((job.id, group));
    }
    Ok(ScalarRounding { slots, commits, group_loads })
}

/// All jobs on one fastest machine: optimal for q = 1.
pub fn fastest_machine_assignment(instance: &Instance) -> Result<IntegralAssignment> {
    let fastest = instance
        .machines
        .iter()
        .max_by(|a, b| {
            let sa = a.uniform_speed().unwrap_or(0.0);
            let sb = b.uniform_speed().unwrap_or(0.0);
            sa.partial_cmp(&sb).unwrap().then(b.id.cmp(&a.id))
        })
        .ok_or(Error::EmptyMachines)?;
    let mut a = IntegralAssignment::new();
    for job in &instance.jobs {
        a.set(job.id, fastest.id);
    }
    Ok(a)
}

/// Everything produced by a scalar q-norm run, for tests and reporting.
#[derive(Debug)]
pub struct ScalarRun {
    pub smoothed: SmoothedInstance,
    pub frac: FracState,
    pub rounding: ScalarRounding,
    pub assignment: IntegralAssignment,
}

/// Full scalar pipeline: smooth with gamma = q/(q-1), run the fractional
/// algorithm job by job (the rounding consumes each job's final distribution
/// as it completes), commit to middle points, balance greedily within groups,
/// and map slots back to the original machines. `q = 1` routes every job to
/// the fastest machine.
pub fn schedule_scalar_qnorm(instance: &Instance, q: Norm, delta: f64) -> Result<ScalarRun> {
    instance.validate()?;
    if instance.mode != Mode::Homogeneous {
        return Err(Error::InvalidArgument("scalar-qnorm requires homogeneous speeds".into()));
    }
    if instance.d != 1 {
        return Err(Error::InvalidArgument("scalar-qnorm requires scalar jobs (d = 1)".into()));
    }
    let q = match q {
        Norm::Finite(v) if v > 1.0 => v,
        Norm::Finite(_) => {
            // q = 1: all jobs on the fastest machines is optimal.
            let assignment = fastest_machine_assignment(instance)?;
            let smoothed = SmoothedInstance::smooth(&instance.machines, 1.0)?;
            let frac = FracState::from_smoothed(&smoothed, 2.0, delta)?;
            let rounding = ScalarRounding {
                slots: IntegralAssignment::new(),
                commits: Vec::new(),
                group_loads: Vec::new(),
            };
            return Ok(ScalarRun { smoothed, frac, rounding, assignment });
        }
        Norm::Infinity => {
            return Err(Error::InvalidArgument(
                "scalar-qnorm needs finite q; use makespan-related for the max norm".into(),
            ))
        }
    };
    let smoothed = SmoothedInstance::smooth(&instance.machines, q / (q - 1.0))?;
    let mut frac = FracState::from_smoothed(&smoothed, q, delta)?;
    let mut group_loads: Vec<Vec<f64>> =
        smoothed.groups.iter().map(|g| vec![0.0; g.count]).collect();
    let mut slots = IntegralAssignment::new();
    let mut commits = Vec::with_capacity(instance.jobs.len());
    for job in &instance.jobs {
        frac.assign_job(job.id, job.sizes[0]);
        let dist = frac.distribution(job.id);
        let group = middle_point(&dist)?;
        let loads = &mut group_loads[group];
        let mut best = 0usize;
        for i in 1..loads.len() {
            if loads[i] < loads[best] {
                best = i;
            }
        }
        loads[best] += job.sizes[0] / smoothed.groups[group].speed;
        slots.set(job.id, smoothed.slot_id(group, best));
        commits.push((job.id, group));
    }
    let assignment = smoothed.map_back(&slots)?;
    let rounding = ScalarRounding { slots, commits, group_loads };
    Ok(ScalarRun { smoothed, frac, rounding, assignment })
}

/// Machine-level scalar objective of an integral placement on smoothed slots:
/// `sum_i load_i^q + sum_j (p_j / s_of(j))^q`.
pub fn machine_level_h(rounding: &ScalarRounding, jobs: &[Job], smoothed: &SmoothedInstance, q: f64) -> f64 {
    let f: f64 = rounding
        .group_loads
        .iter()
        .flat_map(|loads| loads.iter())
        .map(|&l| pow_q(l, q))
        .sum();
    let mut g_term = 0.0;
    for &(job, group) in &rounding.commits {
        let p = jobs.iter().find(|j| j.id == job).unwrap().sizes[0];
        g_term += pow_q(p / smoothed.groups[group].speed, q);
    }
    f + g_term
}

/// Machine-level scalar objective of the uniform-within-committed-group
/// fractional assignment x'' (every job spread evenly over its group).
pub fn uniform_commit_h(commits: &[(usize, usize)], jobs: &[Job], smoothed: &SmoothedInstance, q: f64) -> f64 {
    let mut lambda: Vec<f64> = vec![0.0; smoothed.groups.len()];
    let mut g_term = 0.0;
    for &(job, group) in commits {
        let p = jobs.iter().find(|j| j.id == job).unwrap().sizes[0];
        let g = &smoothed.groups[group];
        lambda[group] += p / g.speed / g.count as f64;
        g_term += pow_q(p / g.speed, q);
    }
    let f: f64 = smoothed
        .groups
        .iter()
        .map(|g| g.count as f64 * pow_q(lambda[g.index], q))
        .sum();
    f + g_term
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{approx_eq, objective_h_scalar, Machine};

    fn groups_of(speeds_counts: &[(f64, usize)], gamma: f64) -> Vec<MachineGroup> {
        speeds_counts
            .iter()
            .enumerate()
            .map(|(i, &(s, c))| MachineGroup::new(i, s, c, gamma))
            .collect()
    }

    #[test]
    fn alpha_beta_direct_substitution() {
        let mut st = FracState::new(groups_of(&[(1.0, 2)], 2.0), 2.0, 1.0).unwrap();
        st.lambda[0] = 1.0;
        let (a, b, e) = st.alpha_beta(0, 1.0);
        assert!(approx_eq(a, 2.0) && approx_eq(b, 1.0) && approx_eq(e, 2.0));
    }

    #[test]
    fn alpha_beta_zero_load() {
        let st = FracState::new(groups_of(&[(1.0, 1)], 2.0), 2.0, 1.0).unwrap();
        let (a, b, e) = st.alpha_beta(0, 1.0);
        assert_eq!(a, 0.0);
        assert_eq!(e, b);
    }

    #[test]
    fn alpha_beta_slow_group() {
        let st = FracState::new(groups_of(&[(0.5, 1)], 2.0), 2.0, 1.0).unwrap();
        let (_, b, _) = st.alpha_beta(0, 1.0);
        assert!(approx_eq(b, 4.0));
    }

    #[test]
    fn first_chunk_goes_to_fastest_group() {
        // All loads zero: eta = beta, minimized by the largest speed.
        let mut st =
            FracState::new(groups_of(&[(1.0, 1), (0.5, 8), (0.25, 40)], 2.0), 2.0, 0.25).unwrap();
        st.assign_chunk(0, 1.0, 0.25);
        assert!(st.x.fraction(0, 0) > 0.0);
        assert_eq!(st.x.fraction(0, 1), 0.0);
        assert_eq!(st.x.fraction(0, 2), 0.0);
    }

    #[test]
    fn single_group_takes_everything() {
        let mut st = FracState::new(groups_of(&[(1.0, 2)], 2.0), 2.0, 1.0 / 4.0).unwrap();
        st.assign_job(0, 1.0);
        assert!(approx_eq(st.x.total(0), 1.0));
        let jobs = vec![Job::scalar(0, 1.0)];
        let (_, _, h) = objective_h_scalar(&st.groups, &st.x, &jobs, 2.0);
        assert!(approx_eq(h, 1.5));
    }

    #[test]
    fn proportional_split_keeps_alphas_tied() {
        // Construct an exact alpha tie (alpha >= beta on both groups) and
        // split one chunk. The proportional rule preserves the tie; the
        // specified bound is |delta alpha| <= 10 * delta.
        let q = 3.0;
        let gamma = q / (q - 1.0);
        let groups = groups_of(&[(1.0, 1), (0.5, 12)], gamma);
        let mut st = FracState::new(groups, q, 1.0 / 16.0).unwrap();
        // alpha_G = q Lambda^(q-1) p / s equal at A: Lambda = (A s / (q p))^(1/(q-1)).
        let p = 0.05; // small p keeps beta below alpha
        let a_target = 1.0;
        for g in 0..2 {
            let s = st.groups[g].speed;
            st.lambda[g] = (a_target * s / (q * p)).powf(1.0 / (q - 1.0));
            let (alpha, beta, _) = st.alpha_beta(g, p);
            assert!(approx_eq(alpha, a_target));
            assert!(beta < alpha);
        }
        let delta = 1.0 / 16.0;
        st.assign_chunk(7, p, delta);
        // Both groups received proportional shares.
        assert!(st.x.fraction(7, 0) > 0.0 && st.x.fraction(7, 1) > 0.0);
        let (a0, _, _) = st.alpha_beta(0, p);
        let (a1, _, _) = st.alpha_beta(1, p);
        assert!(
            (a0 - a1).abs() <= 10.0 * delta,
            "alpha gap {} exceeds 10 delta",
            (a0 - a1).abs()
        );
        assert_eq!(st.monotonicity_violations, 0);
    }

    #[test]
    fn mass_conservation_and_monotonicity() {
        let mut state = 1234u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for round in 0..60 {
            let q = [2.0, 3.0, 2.5][round % 3];
            let m = 1 + (next() * 11.0) as usize;
            let speeds: Vec<Machine> = (0..m)
                .map(|i| Machine::uniform(i, 2f64.powf(-6.0 * next())))
                .collect();
            let smoothed = SmoothedInstance::smooth(&speeds, q / (q - 1.0)).unwrap();
            let mut st = FracState::from_smoothed(&smoothed, q, 1.0 / 64.0).unwrap();
            let n = 1 + (next() * 30.0) as usize;
            for j in 0..n {
                st.assign_job(j, 0.05 + next());
                assert!((st.x.total(j) - 1.0).abs() <= 1e-9);
            }
            assert_eq!(st.monotonicity_violations, 0, "round {round}");
            assert_eq!(st.special_tie_anomalies, 0);
        }
    }

    #[test]
    fn middle_point_examples() {
        assert_eq!(middle_point(&[0.3, 0.3, 0.4]).unwrap(), 1);
        assert_eq!(middle_point(&[1.0]).unwrap(), 0);
        assert_eq!(middle_point(&[0.5, 0.5]).unwrap(), 0);
        assert!(middle_point(&[]).is_err());
    }

    #[test]
    fn greedy_rounding_trace() {
        // One group, 2 machines, committed sizes [2,1,1] -> loads [2,2].
        let machines: Vec<Machine> = (0..2).map(|i| Machine::uniform(i, 1.0)).collect();
        let smoothed = SmoothedInstance::smooth(&machines, 2.0).unwrap();
        assert_eq!(smoothed.groups.len(), 1);
        let jobs = vec![Job::scalar(0, 2.0), Job::scalar(1, 1.0), Job::scalar(2, 1.0)];
        let mut frac = FractionalAssignment::new(1.0);
        for j in &jobs {
            frac.add(j.id, 0, 1.0);
        }
        let rounding = round_scalar(&frac, &jobs, &smoothed).unwrap();
        let mut loads = rounding.group_loads[0].clone();
        loads.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(loads, vec![2.0, 2.0]);
    }

    #[test]
    fn rounding_lemma_smoke() {
        // h(rounded) <= (2^q + 1) h(uniform-commit) on random instances.
        let mut state = 31u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for round in 0..40 {
            let q = if round % 2 == 0 { 2.0 } else { 3.0 };
            let m = 2 + (next() * 8.0) as usize;
            let machines: Vec<Machine> = (0..m)
                .map(|i| Machine::uniform(i, 2f64.powf(-5.0 * next())))
                .collect();
            let smoothed = SmoothedInstance::smooth(&machines, q / (q - 1.0)).unwrap();
            let n = 1 + (next() * 15.0) as usize;
            let jobs: Vec<Job> = (0..n).map(|j| Job::scalar(j, 0.05 + next())).collect();
            let mut frac = FractionalAssignment::new(1.0);
            for job in &jobs {
                let mut fr: Vec<f64> = (0..smoothed.groups.len()).map(|_| next()).collect();
                let t: f64 = fr.iter().sum();
                for (g, f) in fr.iter_mut().enumerate() {
                    frac.add(job.id, g, *f / t);
                }
            }
            let rounding = round_scalar(&frac, &jobs, &smoothed).unwrap();
            let h_bar = machine_level_h(&rounding, &jobs, &smoothed, q);
            let h_uniform = uniform_commit_h(&rounding.commits, &jobs, &smoothed, q);
            assert!(
                h_bar <= (pow_q(2.0, q) + 1.0) * h_uniform * (1.0 + 1e-9),
                "h(rounded) {h_bar} vs bound {}",
                (pow_q(2.0, q) + 1.0) * h_uniform
            );
        }
    }

    #[test]
    fn schedule_single_machine() {
        let instance = Instance::homogeneous(
            1,
            vec![Machine::uniform(0, 2.0)],
            (0..3).map(|j| Job::scalar(j, 1.0)).collect(),
        );
        let run = schedule_scalar_qnorm(&instance, Norm::Finite(2.0), 1.0 / 16.0).unwrap();
        assert!(run.assignment.assign.values().all(|&m| m == 0));
    }

    #[test]
    fn q_one_routes_to_fastest_machine() {
        let instance = Instance::homogeneous(
            1,
            vec![Machine::uniform(0, 1.0), Machine::uniform(1, 0.5)],
            (0..4).map(|j| Job::scalar(j, 1.0)).collect(),
        );
        let run = schedule_scalar_qnorm(&instance, Norm::Finite(1.0), 1.0 / 16.0).unwrap();
        assert!(run.assignment.assign.values().all(|&m| m == 0));
    }
}

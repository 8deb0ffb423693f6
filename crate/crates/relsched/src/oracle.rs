//! Ground-truth references at desk scale: the exact integral optimum by
//! exhaustive enumeration, and a high-precision fractional optimum of the
//! scalar group objective by projected gradient descent.

use crate::core::{
    evaluate, pow_q, FractionalAssignment, Instance, IntegralAssignment, Job, MachineGroup, Norm,
};
use crate::{Error, Result};

/// Guard on the number of enumerated assignments.
pub const BRUTE_FORCE_GUARD: f64 = 1e7;

/// Objective minimized by the exhaustive search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Objective {
    Makespan,
    /// Max-over-dimensions q-norm.
    QNorm(f64),
    /// Machine-level `h = sum_i load_i^q + sum_j (p_j / s_(a(j)))^q`, scalar
    /// instances only.
    HScalar(f64),
}

fn objective_value(instance: &Instance, a: &IntegralAssignment, objective: Objective) -> Result<f64> {
    match objective {
        Objective::Makespan => Ok(evaluate(instance, a, Norm::Infinity)?.makespan),
        Objective::QNorm(q) => Ok(evaluate(instance, a, Norm::Finite(q))?.max_qnorm),
        Objective::HScalar(q) => {
            let report = evaluate(instance, a, Norm::Finite(q))?;
            report.h.ok_or_else(|| Error::InvalidArgument("h undefined".into()))
        }
    }
}

/// Exact minimum over all machine^jobs assignments; deterministic
/// lexicographically-smallest tie-break (enumeration order is lexicographic
/// and only strict improvements replace the incumbent).
pub fn brute_force_opt(
    instance: &Instance,
    objective: Objective,
) -> Result<(f64, IntegralAssignment)> {
    instance.validate()?;
    let m = instance.machines.len();
    let n = instance.jobs.len();
    let combinations = (m as f64).powi(n as i32);
    if combinations > BRUTE_FORCE_GUARD {
        return Err(Error::TooLarge { combinations, guard: BRUTE_FORCE_GUARD });
    }
    if n == 0 {
        return Ok((0.0, IntegralAssignment::new()));
    }
    let mut counter = vec![0usize; n];
    let mut best: Option<(f64, IntegralAssignment)> = None;
    loop {
        let mut a = IntegralAssignment::new();
        for (j, job) in instance.jobs.iter().enumerate() {
            a.set(job.id, instance.machines[counter[j]].id);
        }
        if let Ok(value) = objective_value(instance, &a, objective) {
            match &best {
                Some((incumbent, _)) if value >= *incumbent => {}
                _ => best = Some((value, a)),
            }
        }
        // Lexicographic counter: the last job varies fastest.
        let mut pos = n;
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            counter[pos] += 1;
            if counter[pos] < m {
                break;
            }
            counter[pos] = 0;
        }
        if pos == 0 && counter[0] == 0 {
            break;
        }
    }
    best.ok_or_else(|| {
        Error::InvalidArgument("no feasible assignment (every placement has infinite load)".into())
    })
}

/// Classic makespan lower bound: the best single-machine load of the largest
/// job, and the per-dimension volume bound.
pub fn makespan_lower_bound(instance: &Instance) -> f64 {
    let mut bound = 0.0f64;
    for k in 0..instance.d {
        let volume: f64 = instance.jobs.iter().map(|j| j.sizes[k]).sum();
        let speed: f64 = instance.machines.iter().map(|m| m.speed_on(k)).sum();
        if speed > 0.0 {
            bound = bound.max(volume / speed);
        }
    }
    for job in &instance.jobs {
        let best_load = (0..instance.d)
            .map(|k| {
                instance
                    .machines
                    .iter()
                    .filter(|m| m.speed_on(k) > 0.0)
                    .map(|m| job.sizes[k] / m.speed_on(k))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0f64, f64::max);
        if best_load.is_finite() {
            bound = bound.max(best_load);
        }
    }
    bound
}

/// Result of the convex reference minimization.
#[derive(Debug, Clone)]
pub struct FractionalOpt {
    pub h: f64,
    pub x: FractionalAssignment,
    pub iterations: usize,
    /// Norm of the projected gradient step at the solution.
    pub residual: f64,
}

const MAX_ITERATIONS: usize = 1_000_000;

/// Minimizes the scalar group objective
/// `h(x) = sum_G |G| Lambda_G^q + sum_{G,j} (p_j/s_G)^q x_{Gj}` over the
/// product of per-job simplices by projected gradient descent with
/// backtracking, initialized at the power-proportional split. Converged when
/// the projected-gradient step norm falls below `tol` (scaled).
pub fn fractional_opt_scalar(
    groups: &[MachineGroup],
    jobs: &[Job],
    q: f64,
    tol: f64,
) -> Result<FractionalOpt> {
    if q <= 1.0 {
        return Err(Error::InvalidArgument("fractional oracle needs q > 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    if groups.is_empty() {
        return Err(Error::EmptyMachines);
    }
    let n = jobs.len();
    let g_count = groups.len();
    let total_power: f64 = groups.iter().map(|g| g.power).sum();
    // x[j][g]
    let mut x: Vec<Vec<f64>> = (0..n)
        .map(|_| groups.iter().map(|g| g.power / total_power).collect())
        .collect();
    let sizes: Vec<f64> = jobs.iter().map(|j| j.sizes[0]).collect();
    let betas: Vec<Vec<f64>> = sizes
        .iter()
        .map(|&p| groups.iter().map(|g| pow_q(p / g.speed, q)).collect())
        .collect();

    let lambda_of = |x: &[Vec<f64>]| -> Vec<f64> {
        let mut lambda = vec![0.0; g_count];
        for (j, row) in x.iter().enumerate() {
            for (g, &f) in row.iter().enumerate() {
                lambda[g] += f * sizes[j] / (groups[g].speed * groups[g].count as f64);
            }
        }
        lambda
    };
    let h_of = |x: &[Vec<f64>]| -> f64 {
        let lambda = lambda_of(x);
        let f: f64 = groups
            .iter()
            .map(|g| g.count as f64 * pow_q(lambda[g.index], q))
            .sum();
        let mut g_term = 0.0;
        for (j, row) in x.iter().enumerate() {
            for (g, &frac) in row.iter().enumerate() {
                g_term += betas[j][g] * frac;
            }
        }
        f + g_term
    };
    let grad_of = |x: &[Vec<f64>]| -> Vec<Vec<f64>> {
        let lambda = lambda_of(x);
        (0..n)
            .map(|j| {
                (0..g_count)
                    .map(|g| {
                        q * pow_q(lambda[g], q - 1.0) * sizes[j] / groups[g].speed + betas[j][g]
                    })
                    .collect()
            })
            .collect()
    };

    let mut h = h_of(&x);
    let mut step = 1.0;
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    let scale = (h.abs() + 1.0).sqrt();
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let grad = grad_of(&x);
        // Backtracking on the projected step.
        let mut accepted = false;
        for _ in 0..60 {
            let mut candidate = x.clone();
            for j in 0..n {
                for g in 0..g_count {
                    candidate[j][g] = x[j][g] - step * grad[j][g];
                }
                project_simplex(&mut candidate[j]);
            }
            let h_new = h_of(&candidate);
            let move_norm: f64 = candidate
                .iter()
                .zip(x.iter())
                .flat_map(|(cr, xr)| cr.iter().zip(xr.iter()).map(|(c, v)| (c - v) * (c - v)))
                .sum::<f64>()
                .sqrt();
            if h_new <= h - 1e-4 * move_norm * move_norm / step.max(1e-12) {
                residual = move_norm / step.max(1e-12);
                x = candidate;
                h = h_new;
                accepted = true;
                step *= 1.3;
                break;
            }
            step *= 0.5;
            if step < 1e-18 {
                break;
            }
        }
        if !accepted {
            // No descent step available: at a stationary point up to fp.
            residual = 0.0;
            break;
        }
        if residual <= tol * scale {
            break;
        }
    }
    if iterations >= MAX_ITERATIONS && residual > tol * scale {
        return Err(Error::NoConvergence { iterations, residual, tolerance: tol * scale });
    }
    let mut frac = FractionalAssignment::new(1.0);
    for (j, job) in jobs.iter().enumerate() {
        for g in 0..g_count {
            if x[j][g] > 0.0 {
                frac.add(job.id, g, x[j][g]);
            }
        }
    }
    Ok(FractionalOpt { h, x: frac, iterations, residual })
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &mut [f64]) {
    let n = v.len();
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    let mut k = 0;
    for (i, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - 1.0) / (i + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
            k = i + 1;
        }
    }
    debug_assert!(k > 0);
    for value in v.iter_mut().take(n) {
        *value = (*value - theta).max(0.0);
    }
}

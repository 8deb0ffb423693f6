//! Instance model, load profiles and objective functions.

mod objective;
mod types;

pub use objective::{
    evaluate, load_profile, objective_h_scalar, objective_h_vector, ObjectiveReport, VectorObjective,
};
pub use types::{
    FractionalAssignment, Instance, IntegralAssignment, Job, LoadProfile, Machine, MachineGroup,
    Mode, Speed,
};

use crate::{Error, Result};

/// The norm parameter `q`: a finite real `>= 1`, or infinity (makespan).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Norm {
    Finite(f64),
    Infinity,
}

impl Norm {
    pub fn finite(q: f64) -> Result<Norm> {
        if !q.is_finite() || q < 1.0 {
            return Err(Error::InvalidArgument(format!("q must be >= 1, got {q}")));
        }
        Ok(Norm::Finite(q))
    }

    /// Parses `"inf"`/`"infinity"` or a decimal number.
    pub fn parse(text: &str) -> Result<Norm> {
        match text.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "max" => Ok(Norm::Infinity),
            other => {
                let q: f64 = other
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("cannot parse q from {text:?}")))?;
                Norm::finite(q)
            }
        }
    }

    /// The group-power exponent `gamma = q / (q - 1)`; 1 for the makespan norm.
    pub fn gamma(self) -> f64 {
        match self {
            Norm::Finite(q) => q / (q - 1.0),
            Norm::Infinity => 1.0,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Norm::Finite(_))
    }
}

impl std::fmt::Display for Norm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Norm::Finite(q) => write!(f, "{q}"),
            Norm::Infinity => write!(f, "inf"),
        }
    }
}

/// `x^q` with a fast path for small integer `q`.
pub(crate) fn pow_q(x: f64, q: f64) -> f64 {
    if q == q.trunc() && q.abs() <= 64.0 {
        x.powi(q as i32)
    } else {
        x.powf(q)
    }
}

/// The l_q norm of a load vector; `Norm::Infinity` returns the maximum entry.
pub fn q_norm(loads: &[f64], q: Norm) -> f64 {
    match q {
        Norm::Infinity => loads.iter().cloned().fold(0.0, f64::max),
        Norm::Finite(q) => {
            let sum: f64 = loads.iter().map(|&l| pow_q(l, q)).sum();
            sum.powf(1.0 / q)
        }
    }
}

/// Relative comparison at the crate-wide default tolerance of `1e-9`.
pub fn approx_eq(a: f64, b: f64) -> bool {
    approx_eq_tol(a, b, 1e-9)
}

pub fn approx_eq_tol(a: f64, b: f64, rel: f64) -> bool {
    let scale = a.abs().max(b.abs()).max(1e-300);
    (a - b).abs() <= rel * scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_norm_pythagorean() {
        assert!(approx_eq(q_norm(&[3.0, 4.0], Norm::Finite(2.0)), 5.0));
    }

    #[test]
    fn q_norm_infinity_is_max() {
        assert_eq!(q_norm(&[3.0, 4.0], Norm::Infinity), 4.0);
    }

    #[test]
    fn q_norm_symmetric_quartic() {
        let v = q_norm(&[1.0, 1.0, 1.0, 1.0], Norm::Finite(4.0));
        assert!(approx_eq(v, 4f64.powf(0.25)));
        assert!((v - 1.41421).abs() < 1e-5);
    }

    #[test]
    fn q_below_one_is_rejected() {
        assert!(Norm::finite(0.5).is_err());
        assert!(Norm::parse("0.99").is_err());
        assert!(Norm::parse("inf").is_ok());
    }

    #[test]
    fn norm_bracketing_by_max() {
        // max <= l_q <= m^{1/q} * max, and l_q <= 2 * max once q >= log2 m.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..200 {
            let m = 1 + (next() * 24.0) as usize;
            let loads: Vec<f64> = (0..m).map(|_| next() * 10.0).collect();
            let max = loads.iter().cloned().fold(0.0, f64::max);
            for q in [1.0, 2.0, 3.5, 7.0] {
                let norm = q_norm(&loads, Norm::Finite(q));
                assert!(norm >= max - 1e-12 * max.max(1.0));
                assert!(norm <= (m as f64).powf(1.0 / q) * max + 1e-12);
                if q >= (m as f64).log2() {
                    assert!(norm <= 2.0 * max + 1e-12);
                }
            }
        }
    }
}

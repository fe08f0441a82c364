use clap::ValueEnum;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use fraclap::asymptotics::lambda_tilde;
use fraclap::grid::DomainShape;
use fraclap::lower_bounds::{lower_bound_sequence_with, BoundsConfig};
use fraclap::upper_bounds::{lambda1_upper_with, UpperBoundConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ShapeArg {
    Interval,
    Square,
    Disk,
}

impl ShapeArg {
    pub fn domain(self) -> DomainShape {
        match self {
            ShapeArg::Interval => DomainShape::Interval,
            ShapeArg::Square => DomainShape::Square,
            ShapeArg::Disk => DomainShape::Ball { d: 2 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticRow {
    pub alpha: f64,
    pub n: usize,
    pub mu_n: f64,
    pub lambda_tilde: f64,
    pub band: f64,
    pub band_valid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub alpha: f64,
    pub n: usize,
    pub lower: f64,
    pub asymptotic: f64,
    /// `(nπ/2)^α`.
    pub literature_upper: f64,
    /// `λ*_{1,ε}`, on the `n = 1` row only.
    pub upper: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Failure {
    pub alpha: f64,
    pub n: usize,
    pub reason: String,
}

fn failures_for(alpha: f64, n_max: usize, reason: &str) -> Vec<Failure> {
    (1..=n_max)
        .map(|n| Failure {
            alpha,
            n,
            reason: reason.to_string(),
        })
        .collect()
}

pub fn asymptotic(alphas: &[f64], n_max: usize) -> (Vec<AsymptoticRow>, Vec<Failure>) {
    let mut table = Vec::new();
    let mut failures = Vec::new();
    for &alpha in alphas {
        for n in 1..=n_max {
            match lambda_tilde(alpha, n) {
                Ok(e) => table.push(AsymptoticRow {
                    alpha,
                    n,
                    mu_n: e.mu_n,
                    lambda_tilde: e.lambda_tilde,
                    band: e.error_band,
                    band_valid: e.band_valid,
                }),
                Err(err) => failures.push(Failure {
                    alpha,
                    n,
                    reason: err.to_string(),
                }),
            }
        }
    }
    (table, failures)
}

/// One entry per `α`, computed concurrently and reported in input order.
pub fn bounds(
    alphas: &[f64],
    n_max: usize,
    shape: ShapeArg,
    eps: f64,
    upper: bool,
    tol: f64,
) -> (Vec<BoundsRow>, Vec<Failure>) {
    let config = BoundsConfig {
        eig_tol: tol,
        ..BoundsConfig::default()
    };
    let per_alpha: Vec<Result<Vec<BoundsRow>, String>> = alphas
        .par_iter()
        .map(|&alpha| {
            let low = lower_bound_sequence_with(alpha, shape.domain(), eps, n_max, &config)
                .map_err(|e| e.to_string())?;
            let up = if upper {
                Some(
                    lambda1_upper_with(shape.domain(), alpha, eps, &UpperBoundConfig::default())
                        .map_err(|e| e.to_string())?
                        .lambda1_upper,
                )
            } else {
                None
            };
            low.values
                .iter()
                .enumerate()
                .map(|(i, &lower)| {
                    let n = i + 1;
                    let asymptotic = lambda_tilde(alpha, n).map_err(|e| e.to_string())?.lambda_tilde;
                    Ok(BoundsRow {
                        alpha,
                        n,
                        lower,
                        asymptotic,
                        literature_upper: (n as f64 * std::f64::consts::FRAC_PI_2).powf(alpha),
                        upper: if n == 1 { up } else { None },
                    })
                })
                .collect()
        })
        .collect();
    let mut table = Vec::new();
    let mut failures = Vec::new();
    for (&alpha, entry) in alphas.iter().zip(per_alpha) {
        match entry {
            Ok(rows) => table.extend(rows),
            Err(reason) => failures.extend(failures_for(alpha, n_max, &reason)),
        }
    }
    (table, failures)
}

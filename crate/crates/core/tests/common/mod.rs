//! Independent reference implementations for the integration tests.

#![allow(dead_code)]

/// All eigenvalues of the dense symmetric `n × n` matrix `a` (row-major),
/// ascending, by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(n: usize, a: &[f64]) -> Vec<f64> {
    assert_eq!(a.len(), n * n);
    let mut a = a.to_vec();
    let frob: f64 = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].powi(2))
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * frob {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = 0.5 * (aqq - app) / apq;
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// The interval matrix `V` for `N` cells, dense, from its defining entries:
/// diagonal `2c(ζ(1+α) - 1)/ε^α`, off-diagonal `-c ε^{-α} (|p-q|+1)^{-1-α}`.
pub fn interval_v_dense(alpha: f64, n: usize, c_alpha: f64, zeta: f64) -> Vec<f64> {
    interval_v_dense_eps(alpha, n, 2.0 / n as f64, c_alpha, zeta)
}

/// [`interval_v_dense`] for `n` consecutive cells of side `eps`.
pub fn interval_v_dense_eps(alpha: f64, n: usize, eps: f64, c_alpha: f64, zeta: f64) -> Vec<f64> {
    let scale = c_alpha * eps.powf(-alpha);
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = if i == j {
                2.0 * scale * (zeta - 1.0)
            } else {
                -scale * ((i.abs_diff(j) + 1) as f64).powf(-1.0 - alpha)
            };
        }
    }
    a
}

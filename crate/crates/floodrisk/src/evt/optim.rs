//! Small dense Nelder-Mead minimizer and finite-difference Hessian used by
//! the likelihood fits. Objective functions signal infeasible points by
//! returning +infinity.

/// Result of a simplex minimization.
#[derive(Debug, Clone)]
pub struct NmResult {
    pub x: Vec<f64>,
    pub fmin: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Nelder-Mead with standard coefficients (reflect 1, expand 2, contract
/// 0.5, shrink 0.5). Stops when the simplex function-value spread falls
/// below `tol` or after `max_iter` iterations.
pub fn nelder_mead<F>(f: F, x0: &[f64], step: &[f64], max_iter: usize, tol: f64) -> NmResult
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += step[i];
        simplex.push(v);
    }
    let mut fx: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        // order best..worst
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| fx[a].total_cmp(&fx[b]));
        let (best, second_worst, worst) = (order[0], order[n - 1], order[n]);

        if (fx[worst] - fx[best]).abs() <= tol * (1.0 + fx[best].abs()) {
            converged = true;
            break;
        }

        // centroid of all but worst
        let mut centroid = vec![0.0; n];
        for (k, v) in simplex.iter().enumerate() {
            if k == worst {
                continue;
            }
            for i in 0..n {
                centroid[i] += v[i] / n as f64;
            }
        }

        let point = |coef: f64| -> Vec<f64> {
            (0..n)
                .map(|i| centroid[i] + coef * (centroid[i] - simplex[worst][i]))
                .collect()
        };

        let reflected = point(1.0);
        let fr = f(&reflected);
        if fr < fx[best] {
            let expanded = point(2.0);
            let fe = f(&expanded);
            if fe < fr {
                simplex[worst] = expanded;
                fx[worst] = fe;
            } else {
                simplex[worst] = reflected;
                fx[worst] = fr;
            }
        } else if fr < fx[second_worst] {
            simplex[worst] = reflected;
            fx[worst] = fr;
        } else {
            let contracted = if fr < fx[worst] {
                point(0.5)
            } else {
                point(-0.5)
            };
            let fc = f(&contracted);
            if fc < fx[worst].min(fr) {
                simplex[worst] = contracted;
                fx[worst] = fc;
            } else {
                // shrink toward best
                let best_point = simplex[best].clone();
                for (k, v) in simplex.iter_mut().enumerate() {
                    if k == best {
                        continue;
                    }
                    for i in 0..n {
                        v[i] = best_point[i] + 0.5 * (v[i] - best_point[i]);
                    }
                    fx[k] = f(v);
                }
            }
        }
    }

    let mut best = 0;
    for k in 1..=n {
        if fx[k] < fx[best] {
            best = k;
        }
    }
    NmResult {
        x: simplex[best].clone(),
        fmin: fx[best],
        iterations,
        converged,
    }
}

/// Central finite-difference Hessian with per-coordinate relative step.
pub fn fd_hessian<F>(f: F, x: &[f64], rel_step: f64) -> Vec<Vec<f64>>
where
    F: Fn(&[f64]) -> f64,
{
    let n = x.len();
    let h: Vec<f64> = x.iter().map(|&xi| rel_step * xi.abs().max(1.0)).collect();
    let f0 = f(x);
    let mut hess = vec![vec![0.0; n]; n];
    let eval = |dx: &[f64]| {
        let xp: Vec<f64> = x.iter().zip(dx).map(|(a, b)| a + b).collect();
        f(&xp)
    };
    for i in 0..n {
        let mut d = vec![0.0; n];
        d[i] = h[i];
        let fp = eval(&d);
        d[i] = -h[i];
        let fm = eval(&d);
        hess[i][i] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        for j in (i + 1)..n {
            let mut d = vec![0.0; n];
            d[i] = h[i];
            d[j] = h[j];
            let fpp = eval(&d);
            d[j] = -h[j];
            let fpm = eval(&d);
            d[i] = -h[i];
            let fmm = eval(&d);
            d[j] = h[j];
            let fmp = eval(&d);
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
            hess[i][j] = v;
            hess[j][i] = v;
        }
    }
    hess
}

/// Gauss-Jordan inverse for the small (<= 3x3) information matrices.
/// Returns None when the matrix is numerically singular.
pub fn invert(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut inv = vec![vec![0.0; n]; n];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for col in 0..n {
        let pivot = (col..n).max_by(|&a1, &a2| a[a1][col].abs().total_cmp(&a[a2][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col];
        for j in 0..n {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = a[row][col];
            for j in 0..n {
                a[row][j] -= factor * a[col][j];
                inv[row][j] -= factor * inv[col][j];
            }
        }
    }
    Some(inv)
}

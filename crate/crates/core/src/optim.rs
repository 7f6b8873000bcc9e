//! Nelder-Mead direct search, used by the q-Gaussian CCDF fitter.

/// Outcome of a simplex minimization.
#[derive(Debug, Clone)]
pub struct MinResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evaluations: usize,
    /// True when the simplex collapsed below `f_tol` before the eval cap.
    pub converged: bool,
}

/// Minimize `f` starting from `x0` with per-coordinate initial steps.
///
/// Standard coefficients (reflection 1, expansion 2, contraction 1/2,
/// shrink 1/2); terminates when the spread of objective values across the
/// simplex falls below `f_tol` or after `max_evals` evaluations.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    steps: &[f64],
    f_tol: f64,
    max_evals: usize,
) -> MinResult {
    let dim = x0.len();
    assert!(dim >= 1, "nelder_mead: empty parameter vector");
    assert_eq!(dim, steps.len(), "nelder_mead: steps length mismatch");

    let mut evaluations = 0usize;
    let mut eval = |x: &[f64], n: &mut usize| -> f64 {
        *n += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    // Initial simplex: x0 plus one displaced vertex per coordinate.
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let fx0 = eval(x0, &mut evaluations);
    simplex.push((x0.to_vec(), fx0));
    for i in 0..dim {
        let mut v = x0.to_vec();
        v[i] += steps[i];
        let fv = eval(&v, &mut evaluations);
        simplex.push((v, fv));
    }

    let mut converged = false;
    while evaluations < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[dim].1 - simplex[0].1;
        if spread.abs() <= f_tol {
            converged = true;
            break;
        }

        // Centroid of all vertices except the worst.
        let mut centroid = vec![0.0; dim];
        for (v, _) in simplex.iter().take(dim) {
            for (c, vi) in centroid.iter_mut().zip(v) {
                *c += vi / dim as f64;
            }
        }
        let worst = simplex[dim].clone();
        let at = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };

        let xr = at(1.0);
        let fr = eval(&xr, &mut evaluations);
        if fr < simplex[0].1 {
            let xe = at(2.0);
            let fe = eval(&xe, &mut evaluations);
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[dim - 1].1 {
            simplex[dim] = (xr, fr);
            continue;
        }
        // Contraction: outside if the reflected point improved on the worst.
        let (xc, fc) = if fr < worst.1 {
            let xc = at(0.5);
            let fc = eval(&xc, &mut evaluations);
            (xc, fc)
        } else {
            let xc = at(-0.5);
            let fc = eval(&xc, &mut evaluations);
            (xc, fc)
        };
        if fc < fr.min(worst.1) {
            simplex[dim] = (xc, fc);
            continue;
        }
        // Shrink toward the best vertex.
        let best = simplex[0].0.clone();
        for (v, fv) in simplex.iter_mut().skip(1) {
            for (vi, bi) in v.iter_mut().zip(&best) {
                *vi = bi + 0.5 * (*vi - bi);
            }
            *fv = eval(v, &mut evaluations);
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    MinResult {
        x: simplex[0].0.clone(),
        f: simplex[0].1,
        evaluations,
        converged,
    }
}

//! Derivative-free maximization used by the capacity layer.
//!
//! The workhorse is a gradient ascent on unconstrained parameters with the
//! gradient taken by central finite differences, a halving line search, and a
//! Nelder-Mead fallback once line searches stall. Objectives may override
//! [`Objective::grad`] to exploit structure (the ensemble objective does),
//! as long as the result is the same central-difference estimate.

/// Central-difference step on the unconstrained parameters.
pub(crate) const FD_STEP: f64 = 1e-6;

/// Consecutive failed line searches before the Nelder-Mead fallback fires.
pub(crate) const STALL_LIMIT: usize = 5;

/// Halvings attempted within one line search.
const LINE_SEARCH_DEPTH: usize = 40;

/// Edge length of the initial Nelder-Mead simplex.
const NM_SIMPLEX_SCALE: f64 = 1e-3;

pub(crate) trait Objective {
    fn eval(&mut self, x: &[f64]) -> f64;

    /// Central-difference gradient with step `h`.
    fn grad(&mut self, x: &[f64], h: f64) -> Vec<f64> {
        let mut xs = x.to_vec();
        let mut g = vec![0.0; x.len()];
        for (i, gi) in g.iter_mut().enumerate() {
            let xi = xs[i];
            xs[i] = xi + h;
            let fp = self.eval(&xs);
            xs[i] = xi - h;
            let fm = self.eval(&xs);
            xs[i] = xi;
            *gi = (fp - fm) / (2.0 * h);
        }
        g
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct AscentOptions {
    pub max_iters: usize,
    pub step_init: f64,
    pub conv_tol: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct AscentOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Maximizes the objective from `x0`.
///
/// Convergence is declared when successive accepted steps stop improving by
/// more than `conv_tol`, or when the Nelder-Mead fallback cannot improve a
/// stalled point either. Hitting `max_iters` leaves `converged` false.
pub(crate) fn ascend(
    obj: &mut dyn Objective,
    x0: Vec<f64>,
    opts: &AscentOptions,
) -> AscentOutcome {
    let mut x = x0;
    let mut f = obj.eval(&x);
    let mut step = opts.step_init;
    let mut stalls = 0usize;
    let mut tiny_streak = 0usize;
    let mut iterations = 0usize;
    let mut converged = false;

    while iterations < opts.max_iters {
        iterations += 1;
        let g = obj.grad(&x, FD_STEP);
        let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();

        let mut improved = false;
        if gnorm > 1e-13 {
            // Failed searches restart on a finer ladder; the ladders differ,
            // so repeated attempts are not identical replays.
            let mut alpha = step / 10f64.powi(stalls as i32);
            for _ in 0..LINE_SEARCH_DEPTH {
                let cand: Vec<f64> =
                    x.iter().zip(&g).map(|(xi, gi)| xi + alpha * gi / gnorm).collect();
                let fc = obj.eval(&cand);
                if fc > f {
                    let gain = fc - f;
                    x = cand;
                    f = fc;
                    step = (alpha * 2.0).min(opts.step_init * 10.0);
                    improved = true;
                    if gain < opts.conv_tol {
                        tiny_streak += 1;
                    } else {
                        tiny_streak = 0;
                    }
                    break;
                }
                alpha *= 0.5;
            }
        }

        if improved {
            stalls = 0;
            if tiny_streak >= 2 {
                converged = true;
                break;
            }
            continue;
        }

        stalls += 1;
        if gnorm <= 1e-13 || stalls >= STALL_LIMIT {
            let budget = 5 * x.len() + 100;
            let (nx, nf) = nelder_mead(obj, &x, f, NM_SIMPLEX_SCALE, budget, opts.conv_tol);
            if nf > f + opts.conv_tol {
                x = nx;
                f = nf;
                stalls = 0;
                tiny_streak = 0;
                step = opts.step_init * 0.1;
            } else {
                if nf > f {
                    x = nx;
                    f = nf;
                }
                converged = true;
                break;
            }
        }
    }

    AscentOutcome { x, value: f, iterations, converged }
}

/// Nelder-Mead polish (maximization). Returns the best point found within
/// the evaluation budget.
fn nelder_mead(
    obj: &mut dyn Objective,
    x0: &[f64],
    f0: f64,
    scale: f64,
    eval_budget: usize,
    conv_tol: f64,
) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut evals = 0usize;
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), f0));
    for i in 0..n {
        if evals >= eval_budget {
            break;
        }
        let mut p = x0.to_vec();
        p[i] += scale * (1.0 + p[i].abs());
        let fp = obj.eval(&p);
        evals += 1;
        simplex.push((p, fp));
    }
    if simplex.len() < 2 {
        return (x0.to_vec(), f0);
    }

    let centroid = |simplex: &[(Vec<f64>, f64)]| -> Vec<f64> {
        // All points except the worst (last after sorting).
        let m = simplex.len() - 1;
        let mut c = vec![0.0; n];
        for (p, _) in &simplex[..m] {
            for (ci, pi) in c.iter_mut().zip(p) {
                *ci += pi / m as f64;
            }
        }
        c
    };

    while evals < eval_budget {
        // Descending by value: best first, worst last.
        simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        let spread = simplex[0].1 - simplex[simplex.len() - 1].1;
        if spread < conv_tol * 0.1 {
            break;
        }
        let c = centroid(&simplex);
        let worst = simplex.len() - 1;
        let xw = simplex[worst].0.clone();
        let fw = simplex[worst].1;
        let second_worst = simplex[worst - 1].1;
        let best = simplex[0].1;

        let blend = |t: f64| -> Vec<f64> {
            c.iter().zip(&xw).map(|(ci, wi)| ci + t * (ci - wi)).collect()
        };

        let xr = blend(1.0);
        let fr = obj.eval(&xr);
        evals += 1;
        if fr > best {
            let xe = blend(2.0);
            let fe = obj.eval(&xe);
            evals += 1;
            simplex[worst] = if fe > fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr > second_worst {
            simplex[worst] = (xr, fr);
            continue;
        }
        let xc = blend(if fr > fw { 0.5 } else { -0.5 });
        let fc = obj.eval(&xc);
        evals += 1;
        if fc > fw.max(fr) {
            simplex[worst] = (xc, fc);
            continue;
        }
        // Shrink toward the best vertex.
        let xb = simplex[0].0.clone();
        for entry in simplex.iter_mut().skip(1) {
            let p: Vec<f64> =
                entry.0.iter().zip(&xb).map(|(pi, bi)| bi + 0.5 * (pi - bi)).collect();
            let fp = obj.eval(&p);
            evals += 1;
            *entry = (p, fp);
            if evals >= eval_budget {
                break;
            }
        }
    }

    simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    let (bx, bf) = simplex.swap_remove(0);
    if bf > f0 { (bx, bf) } else { (x0.to_vec(), f0) }
}

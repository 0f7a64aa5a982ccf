//! Small derivative-free minimizer used for the graph-function infima.
//! One or two variables, convex objectives; a plain Nelder–Mead simplex is
//! accurate and dependency-free at this size.

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimizes `f` starting from `start`, with an initial simplex edge of
/// `step`. Terminates when both the simplex diameter and the value spread
/// fall under `tol` (scaled), or after `max_iter` reshapes.
pub(crate) fn minimize<F: Fn(&[f64]) -> f64>(
    f: &F,
    start: &[f64],
    step: f64,
    tol: f64,
    max_iter: usize,
) -> (Vec<f64>, f64) {
    let n = start.len();
    assert!(n >= 1, "need at least one variable");
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), f(start)));
    for j in 0..n {
        let mut p = start.to_vec();
        p[j] += step;
        let fp = f(&p);
        simplex.push((p, fp));
    }

    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        let diameter = simplex[1..]
            .iter()
            .map(|(p, _)| {
                p.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0_f64, f64::max)
            })
            .fold(0.0_f64, f64::max);
        let scale = 1.0 + simplex[0].0.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        if diameter <= tol * scale && (worst - best).abs() <= tol * (1.0 + best.abs()) {
            break;
        }

        let mut centroid = vec![0.0; n];
        for (p, _) in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / n as f64;
            }
        }
        let shifted = |alpha: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + alpha * (c - w))
                .collect()
        };

        let reflected = shifted(REFLECT);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = shifted(EXPAND);
            let fe = f(&expanded);
            simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
        } else {
            let contracted = if fr < simplex[n].1 {
                shifted(CONTRACT)
            } else {
                shifted(-CONTRACT)
            };
            let fc = f(&contracted);
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (contracted, fc);
            } else {
                let anchor = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    for (c, a) in entry.0.iter_mut().zip(&anchor) {
                        *c = a + SHRINK * (*c - a);
                    }
                    entry.1 = f(&entry.0);
                }
            }
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (p, v) = simplex.swap_remove(0);
    (p, v)
}

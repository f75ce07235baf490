//! Derivative-free local descent and deterministic start sets.

/// Largest lattice dimension `d` for which all of `{1, -1, 0}^d` is enumerated.
pub(crate) const MAX_LATTICE_DIM: usize = 8;

/// Compass search minimizing `f`.
///
/// Each iteration polls `x ± step e_k` for every coordinate and moves to the best
/// improving point (then normalized through `project`); otherwise the step is halved.
/// Stops after `max_iters` polls, when the step underflows, or once `f <= target`.
pub(crate) fn pattern_search(
    f: &mut impl FnMut(&[f64]) -> f64,
    project: &impl Fn(&mut [f64]),
    x0: Vec<f64>,
    step0: f64,
    max_iters: usize,
    target: f64,
) -> (Vec<f64>, f64) {
    let mut x = x0;
    project(&mut x);
    let mut fx = f(&x);
    let mut step = step0;
    let mut trial = x.clone();
    for _ in 0..max_iters {
        if fx <= target || step < 1e-13 {
            break;
        }
        let mut best: Option<(Vec<f64>, f64)> = None;
        for k in 0..x.len() {
            for s in [1.0, -1.0] {
                trial.copy_from_slice(&x);
                trial[k] += s * step;
                let ft = f(&trial);
                if ft < best.as_ref().map_or(fx, |b| b.1) {
                    best = Some((trial.clone(), ft));
                }
            }
        }
        match best {
            Some((mut xb, _)) => {
                project(&mut xb);
                let fb = f(&xb);
                if fb < fx {
                    x = xb;
                    fx = fb;
                } else {
                    step *= 0.5;
                }
            }
            None => step *= 0.5,
        }
    }
    (x, fx)
}

/// All nonzero points of `digits^d`, first coordinate most significant, or nothing when
/// `d` exceeds [`MAX_LATTICE_DIM`].
pub(crate) fn lattice(d: usize, digits: &[f64]) -> Vec<Vec<f64>> {
    if d == 0 || d > MAX_LATTICE_DIM {
        return Vec::new();
    }
    let base = digits.len();
    let total = base.pow(d as u32);
    (0..total)
        .map(|mut c| {
            let mut p = vec![0.0; d];
            for slot in (0..d).rev() {
                p[slot] = digits[c % base];
                c /= base;
            }
            p
        })
        .filter(|p| p.iter().any(|&v| v != 0.0))
        .collect()
}

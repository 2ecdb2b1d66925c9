//! Derivative-free simplex maximization with the standard
//! reflection/expansion/contraction/shrink moves.

/// Simplex coefficients and stopping rules.
#[derive(Debug, Clone)]
pub struct NelderMeadSettings {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Stop when the simplex objective spread drops below this.
    pub spread_tol: f64,
    /// ... and the simplex diameter below this (guards against objective
    /// ties freezing a still-wide simplex).
    pub diameter_tol: f64,
    /// Iteration cap as a multiple of the problem dimension.
    pub max_iters_per_dim: usize,
    /// Offset added per coordinate to build the initial simplex.
    pub initial_step: f64,
    /// Value substituted for non-finite objective results.
    pub dummy_objective: f64,
}

impl Default for NelderMeadSettings {
    fn default() -> Self {
        Self {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            spread_tol: 1e-10,
            diameter_tol: 1e-8,
            max_iters_per_dim: 500,
            initial_step: 0.1,
            dummy_objective: -1.0,
        }
    }
}

/// Maximize `objective` starting from `x0`; returns the best vertex and its
/// value. Maximization is implemented by negating the objective around the
/// standard minimizing iteration. Non-finite objective values are replaced by
/// the dummy objective (logged once per run).
pub fn nelder_mead_max(
    objective: impl Fn(&[f64]) -> f64,
    x0: &[f64],
    settings: &NelderMeadSettings,
) -> (Vec<f64>, f64) {
    let dim = x0.len();
    let mut warned = false;
    let mut eval = |x: &[f64]| -> f64 {
        let v = objective(x);
        if v.is_finite() {
            -v
        } else {
            if !warned {
                log::warn!("objective returned a non-finite value; using the dummy objective");
                warned = true;
            }
            -settings.dummy_objective
        }
    };

    if dim == 0 {
        let v = eval(x0);
        return (x0.to_vec(), -v);
    }

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let v0 = eval(x0);
    simplex.push((x0.to_vec(), v0));
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] += settings.initial_step;
        let v = eval(&x);
        simplex.push((x, v));
    }

    let max_iters = settings.max_iters_per_dim * dim;
    for _ in 0..max_iters {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        if simplex[dim].1 - simplex[0].1 < settings.spread_tol {
            break;
        }
        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            for (c, xi) in centroid.iter_mut().zip(x.iter()) {
                *c += xi / dim as f64;
            }
        }
        let worst = simplex[dim].clone();
        let point_at = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(worst.0.iter())
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };

        let reflected = point_at(-settings.reflection);
        let f_reflected = eval(&reflected);
        if f_reflected < simplex[0].1 {
            let expanded = point_at(-settings.reflection * settings.expansion);
            let f_expanded = eval(&expanded);
            simplex[dim] = if f_expanded < f_reflected {
                (expanded, f_expanded)
            } else {
                (reflected, f_reflected)
            };
        } else if f_reflected < simplex[dim - 1].1 {
            simplex[dim] = (reflected, f_reflected);
        } else {
            let (candidate, f_candidate) = if f_reflected < worst.1 {
                // Outside contraction.
                let x = point_at(-settings.reflection * settings.contraction);
                let v = eval(&x);
                (x, v)
            } else {
                // Inside contraction.
                let x = point_at(settings.contraction);
                let v = eval(&x);
                (x, v)
            };
            if f_candidate < worst.1.min(f_reflected) {
                simplex[dim] = (candidate, f_candidate);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = best
                        .iter()
                        .zip(entry.0.iter())
                        .map(|(b, e)| b + settings.shrink * (e - b))
                        .collect();
                    let v = eval(&x);
                    *entry = (x, v);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    let (x, v) = simplex.swap_remove(0);
    (x, -v)
}

//! Derivative-free minimization: Nelder-Mead with a fixed simplex protocol.
//!
//! The measured-divergence and variational-objective optimizers both run on
//! raw `Vec<f64>` parameter vectors, so one simplex implementation serves
//! both.

/// Stopping rule and coefficients for one Nelder-Mead run.
#[derive(Debug, Clone)]
pub struct NelderMeadConfig {
    pub max_iterations: usize,
    /// Convergence when the simplex diameter falls below this value.
    pub diameter_tol: f64,
    /// Initial simplex step added to each coordinate.
    pub initial_step: f64,
}

impl Default for NelderMeadConfig {
    fn default() -> Self {
        Self {
            max_iterations: 2000,
            diameter_tol: 1e-8,
            initial_step: 0.25,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub final_diameter: f64,
}

fn diameter(simplex: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..simplex.len() {
        for j in i + 1..simplex.len() {
            let d: f64 = simplex[i]
                .iter()
                .zip(&simplex[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            worst = worst.max(d);
        }
    }
    worst
}

/// Minimize `f` starting from `x0`. Standard reflection/expansion/
/// contraction/shrink coefficients (1, 2, 0.5, 0.5).
pub fn nelder_mead(
    f: impl Fn(&[f64]) -> f64,
    x0: &[f64],
    cfg: &NelderMeadConfig,
) -> NelderMeadResult {
    let n = x0.len();
    if n == 0 {
        return NelderMeadResult {
            x: vec![],
            value: f(&[]),
            iterations: 0,
            converged: true,
            final_diameter: 0.0,
        };
    }

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += cfg.initial_step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

    let mut iterations = 0;
    let mut converged = false;

    while iterations < cfg.max_iterations {
        iterations += 1;

        // Order ascending by value; ties resolved by index for determinism.
        let mut order: Vec<usize> = (0..simplex.len()).collect();
        order.sort_by(|&a, &b| {
            values[a]
                .partial_cmp(&values[b])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let reordered: Vec<Vec<f64>> = order.iter().map(|&i| simplex[i].clone()).collect();
        let revalues: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        simplex = reordered;
        values = revalues;

        if diameter(&simplex) < cfg.diameter_tol {
            converged = true;
            break;
        }

        let worst = n;
        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|v| v[k]).sum::<f64>() / n as f64)
            .collect();
        let reflect: Vec<f64> = centroid
            .iter()
            .zip(&simplex[worst])
            .map(|(c, w)| 2.0 * c - w)
            .collect();
        let f_reflect = f(&reflect);

        if f_reflect < values[0] {
            let expand: Vec<f64> = centroid
                .iter()
                .zip(&reflect)
                .map(|(c, r)| c + 2.0 * (r - c))
                .collect();
            let f_expand = f(&expand);
            if f_expand < f_reflect {
                simplex[worst] = expand;
                values[worst] = f_expand;
            } else {
                simplex[worst] = reflect;
                values[worst] = f_reflect;
            }
        } else if f_reflect < values[n - 1] {
            simplex[worst] = reflect;
            values[worst] = f_reflect;
        } else {
            // Contract towards the better of worst/reflected.
            let (base, f_base) = if f_reflect < values[worst] {
                (reflect.clone(), f_reflect)
            } else {
                (simplex[worst].clone(), values[worst])
            };
            let contract: Vec<f64> = centroid
                .iter()
                .zip(&base)
                .map(|(c, b)| c + 0.5 * (b - c))
                .collect();
            let f_contract = f(&contract);
            if f_contract < f_base {
                simplex[worst] = contract;
                values[worst] = f_contract;
            } else {
                // Shrink towards the best vertex.
                let best = simplex[0].clone();
                for v in simplex.iter_mut().skip(1) {
                    for (x, b) in v.iter_mut().zip(&best) {
                        *x = b + 0.5 * (*x - b);
                    }
                }
                for (i, v) in simplex.iter().enumerate().skip(1) {
                    values[i] = f(v);
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..values.len() {
        if values[i] < values[best] {
            best = i;
        }
    }
    NelderMeadResult {
        x: simplex[best].clone(),
        value: values[best],
        iterations,
        converged,
        final_diameter: diameter(&simplex),
    }
}

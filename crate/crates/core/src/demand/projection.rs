//! Euclidean projection onto a budget face `{ x >= 0 : <p, x> = r }` by the
//! standard sort-and-threshold weighted-simplex scheme.

use crate::market::PriceSystem;

/// Projects `y` onto `{ x >= 0 : <p, x> = r }`.
///
/// Finds the threshold `theta` with `sum p_i * max(0, y_i - theta p_i) = r`
/// by sorting the breakpoints `y_i / p_i`, then rescales so the budget
/// equality holds to machine precision even when `y` is many orders larger
/// than the face (the subtraction cancels catastrophically otherwise).
pub fn project_to_budget_face(prices: &PriceSystem, income: f64, y: &[f64]) -> Vec<f64> {
    let p = prices.prices();
    debug_assert_eq!(p.len(), y.len());
    if income == 0.0 {
        return vec![0.0; y.len()];
    }

    let mut order: Vec<usize> = (0..y.len()).collect();
    order.sort_by(|&i, &j| {
        let ri = y[i] / p[i];
        let rj = y[j] / p[j];
        rj.partial_cmp(&ri).unwrap_or(std::cmp::Ordering::Equal)
    });

    let mut py_sum = 0.0;
    let mut pp_sum = 0.0;
    let mut theta = f64::NEG_INFINITY;
    for (k, &i) in order.iter().enumerate() {
        py_sum += p[i] * y[i];
        pp_sum += p[i] * p[i];
        let candidate = (py_sum - income) / pp_sum;
        // The prefix is valid while its threshold keeps the k-th coordinate
        // active; the last valid prefix wins.
        if candidate < y[i] / p[i] || k == 0 {
            theta = candidate;
        } else {
            break;
        }
    }

    let mut x: Vec<f64> = y
        .iter()
        .zip(p)
        .map(|(&yi, &pi)| (yi - theta * pi).max(0.0))
        .collect();

    // Exact feasibility: rescale onto the face.
    let spend: f64 = x.iter().zip(p).map(|(xi, pi)| xi * pi).sum();
    if spend > 0.0 {
        let scale = income / spend;
        for xi in &mut x {
            *xi *= scale;
        }
    }
    x
}

//! Closed-form water-filling solvers for the two symmetric relaxations:
//! the feasibility-boundary auxiliary rates of the outer bound and the
//! quantizer levels of the achievable inner bound.

use crate::scalar::Real;

/// Maximize `sum ln x_i` subject to `sum w_i x_i <= budget`, `0 < x_i <= 1`.
///
/// Returns the maximizer, or `None` when `budget <= 0`. When the budget
/// covers `sum w_i` every `x_i` saturates at 1.
pub fn max_log_under_budget<T: Real>(weights: &[T], budget: T) -> Option<Vec<T>> {
    if !(budget > T::zero()) {
        return None;
    }
    let total: T = weights.iter().fold(T::zero(), |a, &b| a + b);
    if total <= budget {
        return Some(vec![T::one(); weights.len()]);
    }
    // KKT: x_i = min(1, mu / w_i); find the level mu with
    // sum min(w_i, mu) = budget by scanning the sorted weights.
    let mut sorted: Vec<T> = weights.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    let mut prefix = T::zero();
    for k in 0..=n {
        // x saturates for the k smallest weights (w_i <= mu).
        let rest = T::of((n - k) as f64);
        if rest == T::zero() {
            break;
        }
        let mu = (budget - prefix) / rest;
        let lo_ok = k == 0 || sorted[k - 1] <= mu;
        let hi_ok = mu <= sorted[k];
        if lo_ok && hi_ok {
            return Some(
                weights
                    .iter()
                    .map(|&w| if w <= mu { T::one() } else { mu / w })
                    .collect(),
            );
        }
        if k < n {
            prefix += sorted[k];
        }
    }
    // Fallback: numerical ties; saturate everything proportionally.
    let mu = budget / T::of(n as f64);
    Some(weights.iter().map(|&w| (mu / w).min(T::one())).collect())
}

/// Inner-bound quantizer allocation: given `a_i = 1/var(Z_i)` and the
/// precision demand `t = 1/D - 1/var(X)`, find the water level `nu` with
/// `sum max(0, a_i - nu) = t`.
///
/// Returns `(nu, u)` with `u_i = max(0, a_i - nu)`, or `None` when
/// `t >= sum a_i` (the distortion is below the noisy-observation floor).
pub fn inner_precision_split<T: Real>(a: &[T], t: T) -> Option<(T, Vec<T>)> {
    let total: T = a.iter().fold(T::zero(), |acc, &x| acc + x);
    if t >= total {
        return None;
    }
    if t <= T::zero() {
        return Some((T::infinity(), vec![T::zero(); a.len()]));
    }
    let mut sorted: Vec<T> = a.to_vec();
    sorted.sort_by(|x, y| y.partial_cmp(x).unwrap()); // descending
    let n = sorted.len();
    let mut prefix = T::zero();
    for k in 1..=n {
        prefix += sorted[k - 1];
        let nu = (prefix - t) / T::of(k as f64);
        let hi_ok = nu <= sorted[k - 1];
        let lo_ok = k == n || nu >= sorted[k];
        if hi_ok && lo_ok {
            let u = a
                .iter()
                .map(|&ai| (ai - nu).max(T::zero()))
                .collect();
            return Some((nu, u));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn budget_covers_everything() {
        let x = max_log_under_budget(&[1.0, 2.0, 3.0], 10.0).unwrap();
        assert_eq!(x, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn equal_weights_split_evenly() {
        let x = max_log_under_budget(&[2.0, 2.0], 2.0).unwrap();
        assert_relative_eq!(x[0], 0.5, max_relative = 1e-12);
        assert_relative_eq!(x[1], 0.5, max_relative = 1e-12);
    }

    #[test]
    fn mixed_saturation() {
        // w = (1, 4), budget 3: mu = 2 saturates the small weight.
        let x = max_log_under_budget(&[1.0, 4.0], 3.0).unwrap();
        assert_relative_eq!(x[0], 1.0, max_relative = 1e-12);
        assert_relative_eq!(x[1], 0.5, max_relative = 1e-12);
        let spend: f64 = x[0] * 1.0 + x[1] * 4.0;
        assert_relative_eq!(spend, 3.0, max_relative = 1e-12);
    }

    #[test]
    fn no_budget_is_infeasible() {
        assert!(max_log_under_budget(&[1.0], 0.0).is_none());
        assert!(max_log_under_budget(&[1.0], -1.0).is_none());
    }

    #[test]
    fn precision_split_all_active() {
        // a = (1, 0.5), t = 1: nu = 0.25, u = (0.75, 0.25).
        let (nu, u) = inner_precision_split(&[1.0, 0.5], 1.0).unwrap();
        assert_relative_eq!(nu, 0.25, max_relative = 1e-12);
        assert_relative_eq!(u[0], 0.75, max_relative = 1e-12);
        assert_relative_eq!(u[1], 0.25, max_relative = 1e-12);
    }

    #[test]
    fn precision_split_partial() {
        // t small: only the cleanest observation participates.
        let (nu, u) = inner_precision_split(&[1.0, 0.1], 0.2).unwrap();
        assert_relative_eq!(nu, 0.8, max_relative = 1e-12);
        assert_relative_eq!(u[0], 0.2, max_relative = 1e-12);
        assert_eq!(u[1], 0.0);
    }

    #[test]
    fn precision_split_floor() {
        assert!(inner_precision_split(&[1.0, 1.0], 2.0).is_none());
        assert!(inner_precision_split(&[1.0, 1.0], 2.5).is_none());
        let (_, u) = inner_precision_split(&[1.0, 1.0], -0.5).unwrap();
        assert_eq!(u, vec![0.0, 0.0]);
    }
}

//! Minimum-sum-rate linear program over subset-sum constraints.
//!
//! The primal is `min sum R_i` subject to `sum_{i in A} R_i >= f(A)` for
//! every nonempty subset `A` and `R >= 0`. With up to 2^m - 1 constraints
//! but only m variables, the packing dual
//! `max sum f(A) y_A  s.t.  sum_{A : i in A} y_A <= 1, y >= 0`
//! has m rows, so a dense revised simplex with Bland's rule solves it in a
//! handful of pivots. The optimal rates are the simplex multipliers, and
//! strong duality gives a built-in optimality certificate.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Solution of the subset-sum covering LP.
#[derive(Debug, Clone)]
pub struct LpSolution<T> {
    /// Minimum sum rate.
    pub value: T,
    /// A rate vector attaining it.
    pub rates: Vec<T>,
    /// Optimal dual weights `(mask, y_A)`, nonzero entries only.
    pub packing: Vec<(u32, T)>,
}

fn tol<T: Real>() -> T {
    T::of(1e-9).max(T::epsilon() * T::of(100.0))
}

/// Solve the covering LP. `f[mask]` for `mask in 1..2^m` is the required
/// lower bound on the rate sum over the subset encoded by `mask`
/// (`f[0]` is ignored).
pub fn min_sum_rate_lp<T: Real>(f: &[T], m: usize) -> Result<LpSolution<T>> {
    let n_cols = (1usize << m) - 1;
    assert_eq!(f.len(), 1 << m, "f must have 2^m entries");
    let eps = tol::<T>();

    // Dual standard form: max c y, [D I][y; s] = 1, all vars >= 0.
    // Column j < n_cols is subset mask j+1; column n_cols + i is slack i.
    let total_cols = n_cols + m;
    let col_cost = |j: usize| -> T {
        if j < n_cols {
            f[j + 1]
        } else {
            T::zero()
        }
    };
    let col_entry = |j: usize, row: usize| -> T {
        if j < n_cols {
            if (j + 1) & (1usize << row) != 0 {
                T::one()
            } else {
                T::zero()
            }
        } else if j - n_cols == row {
            T::one()
        } else {
            T::zero()
        }
    };

    let mut basis: Vec<usize> = (n_cols..total_cols).collect();

    let mut iterations = 0usize;
    loop {
        iterations += 1;
        if iterations > 50_000 {
            return Err(Error::NonIntegrableDensity(
                "simplex iteration cap exceeded".into(),
            ));
        }

        // Basis matrix and current basic solution x_B = B^{-1} 1.
        let b_mat = basis_matrix(&basis, m, &col_entry);
        let ones = vec![T::one(); m];
        let x_b = solve_dense(&b_mat, &ones)?;
        // Simplex multipliers: B^T pi = c_B.
        let c_b: Vec<T> = basis.iter().map(|&j| col_cost(j)).collect();
        let pi = solve_dense(&transpose(&b_mat), &c_b)?;

        // Bland: entering column = lowest index with positive reduced cost.
        let mut entering = None;
        for j in 0..total_cols {
            if basis.contains(&j) {
                continue;
            }
            let mut dot = T::zero();
            for (row, &p) in pi.iter().enumerate() {
                dot += p * col_entry(j, row);
            }
            if col_cost(j) - dot > eps {
                entering = Some(j);
                break;
            }
        }
        let Some(entering) = entering else {
            // Optimal. The multipliers are a feasible covering solution and
            // the dual objective certifies its value (strong duality).
            let rates: Vec<T> = pi.iter().map(|&p| p.max(T::zero())).collect();
            let value = basis
                .iter()
                .zip(x_b.iter())
                .map(|(&j, &x)| col_cost(j) * x)
                .fold(T::zero(), |a, b| a + b)
                .max(T::zero());
            let packing = basis
                .iter()
                .zip(x_b.iter())
                .filter(|(&j, &x)| j < n_cols && x > eps)
                .map(|(&j, &x)| ((j + 1) as u32, x))
                .collect();
            return Ok(LpSolution {
                value,
                rates,
                packing,
            });
        };

        // Direction: B d = column(entering).
        let col: Vec<T> = (0..m).map(|row| col_entry(entering, row)).collect();
        let d = solve_dense(&b_mat, &col)?;

        // Ratio test with Bland tie-break on the basis column index.
        let mut leaving: Option<(usize, T)> = None;
        for i in 0..m {
            if d[i] > eps {
                let ratio = x_b[i] / d[i];
                let better = match leaving {
                    None => true,
                    Some((li, lr)) => {
                        ratio < lr - eps || (ratio < lr + eps && basis[i] < basis[li])
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
        }
        let Some((leave_idx, _)) = leaving else {
            // Unbounded dual cannot occur: every y_A is capped by its rows.
            return Err(Error::NonIntegrableDensity("unbounded packing dual".into()));
        };
        basis[leave_idx] = entering;
    }
}

fn basis_matrix<T: Real>(
    basis: &[usize],
    m: usize,
    col_entry: &impl Fn(usize, usize) -> T,
) -> Vec<Vec<T>> {
    (0..m)
        .map(|row| basis.iter().map(|&j| col_entry(j, row)).collect())
        .collect()
}

fn transpose<T: Real>(a: &[Vec<T>]) -> Vec<Vec<T>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| a[j][i]).collect())
        .collect()
}

/// Dense solve by Gaussian elimination with partial pivoting.
fn solve_dense<T: Real>(a: &[Vec<T>], b: &[T]) -> Result<Vec<T>> {
    let n = a.len();
    let mut aug: Vec<Vec<T>> = a
        .iter()
        .zip(b.iter())
        .map(|(row, &rhs)| {
            let mut r = row.clone();
            r.push(rhs);
            r
        })
        .collect();
    for col in 0..n {
        let mut piv = col;
        for row in col + 1..n {
            if aug[row][col].abs() > aug[piv][col].abs() {
                piv = row;
            }
        }
        if aug[piv][col].abs() < T::epsilon() {
            return Err(Error::NonIntegrableDensity("singular simplex basis".into()));
        }
        aug.swap(col, piv);
        for row in col + 1..n {
            let factor = aug[row][col] / aug[col][col];
            for k in col..=n {
                let sub = factor * aug[col][k];
                aug[row][k] -= sub;
            }
        }
    }
    let mut x = vec![T::zero(); n];
    for row in (0..n).rev() {
        let mut acc = aug[row][n];
        for k in row + 1..n {
            acc -= aug[row][k] * x[k];
        }
        x[row] = acc / aug[row][row];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;

    fn feasible(rates: &[f64], f: &[f64]) -> bool {
        for (mask, &need) in f.iter().enumerate().skip(1) {
            let sum: f64 = rates
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, r)| r)
                .sum();
            if sum < need - 1e-7 {
                return false;
            }
        }
        rates.iter().all(|&r| r >= -1e-12)
    }

    #[test]
    fn single_variable() {
        let sol = min_sum_rate_lp(&[0.0, 2.5], 1).unwrap();
        assert_relative_eq!(sol.value, 2.5, max_relative = 1e-12);
        let sol = min_sum_rate_lp(&[0.0, -1.0], 1).unwrap();
        assert_relative_eq!(sol.value, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn two_variables_closed_form() {
        // min R1+R2 with R1 >= f1, R2 >= f2, R1+R2 >= f12:
        // optimum is max(f12, f1+ + f2+).
        let cases = [
            ([0.0, 1.0, 2.0, 2.5], 3.0),
            ([0.0, 1.0, 2.0, 4.0], 4.0),
            ([0.0, -1.0, 2.0, 2.5], 2.5),
            ([0.0, -1.0, -2.0, 2.5], 2.5),
            ([0.0, -1.0, -2.0, -0.5], 0.0),
        ];
        for (f, expect) in cases {
            let sol = min_sum_rate_lp(&f, 2).unwrap();
            assert_relative_eq!(sol.value, expect, epsilon = 1e-10);
            assert!(feasible(&sol.rates, &f));
        }
    }

    #[test]
    fn modular_f_gives_sum_of_singletons() {
        // f(A) = sum of per-element needs: singleton constraints dominate.
        let needs = [0.7, 0.2, 1.1];
        let mut f = vec![0.0; 8];
        for mask in 1..8usize {
            f[mask] = (0..3).filter(|i| mask & (1 << i) != 0).map(|i| needs[i]).sum();
        }
        let sol = min_sum_rate_lp(&f, 3).unwrap();
        assert_relative_eq!(sol.value, 2.0, max_relative = 1e-10);
        for i in 0..3 {
            assert_relative_eq!(sol.rates[i], needs[i], epsilon = 1e-9);
        }
    }

    #[test]
    fn partition_can_beat_full_set() {
        // Disjoint singletons force more than the full-set constraint.
        let mut f = vec![0.0; 8];
        f[0b001] = 2.0;
        f[0b010] = 2.0;
        f[0b100] = 2.0;
        f[0b111] = 1.0;
        let sol = min_sum_rate_lp(&f, 3).unwrap();
        assert_relative_eq!(sol.value, 6.0, max_relative = 1e-10);
    }

    #[test]
    fn random_instances_certified_optimal() {
        // Strong duality: recovered rates feasible for the covering LP,
        // packing weights feasible for the dual, objectives equal.
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        for m in 1..=5usize {
            for _ in 0..40 {
                let mut f = vec![0.0; 1 << m];
                for mask in 1..(1 << m) {
                    f[mask] = rng.random_range(-1.0..3.0);
                }
                let sol = min_sum_rate_lp(&f, m).unwrap();
                assert!(feasible(&sol.rates, &f), "infeasible rates for m={m}");
                // Dual feasibility: per-agent load <= 1.
                for i in 0..m {
                    let load: f64 = sol
                        .packing
                        .iter()
                        .filter(|(mask, _)| mask & (1 << i) != 0)
                        .map(|(_, y)| y)
                        .sum();
                    assert!(load <= 1.0 + 1e-8, "overloaded agent {i}");
                }
                let dual_obj: f64 = sol.packing.iter().map(|(mask, y)| f[*mask as usize] * y).sum();
                let primal_obj: f64 = sol.rates.iter().sum();
                assert_relative_eq!(dual_obj, sol.value, epsilon = 1e-7);
                assert_relative_eq!(primal_obj, sol.value, epsilon = 1e-7);
            }
        }
    }
}

//! Search over the auxiliary rates of the outer bound, the achievable
//! inner sum rate, and rate-vector membership verdicts.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::bound::{BoundKind, BoundResult, FormulaId};
use crate::error::{Error, Result};
use crate::scalar::{log_plus, Real};


use super::{formula, inner_precision_split, max_log_under_budget, PreparedCeo, Subset};

/// Multi-start settings for the auxiliary-rate searches. Randomized starts
/// draw from the explicit seed, so results are reproducible.
#[derive(Debug, Clone, Copy)]
pub struct OptimizerConfig<T> {
    /// Equal-rate grid starts spanning `[0, 4 R_X(D) / M]`.
    pub grid_starts: usize,
    pub random_starts: usize,
    pub seed: u64,
    /// Stop when one descent step improves the objective by less.
    pub improve_tol: T,
    pub max_iters: usize,
}

impl<T: Real> Default for OptimizerConfig<T> {
    fn default() -> Self {
        OptimizerConfig {
            grid_starts: 16,
            random_starts: 8,
            seed: 0,
            improve_tol: T::of(1e-7),
            max_iters: 150,
        }
    }
}

/// Minimum sum rate consistent with the outer bound, with the auxiliary
/// rates that attain it.
#[derive(Debug, Clone)]
pub struct OuterSolution<T> {
    pub value: T,
    pub witness_r: Vec<T>,
}

impl<T: Real> OuterSolution<T> {
    pub fn bound(&self) -> BoundResult<T> {
        BoundResult::ok(
            FormulaId::CeoOuterMinSumRate,
            BoundKind::Lower,
            self.value,
            "minimum over feasible auxiliary rates of the subset-sum LP",
        )
    }
}

fn feas_tol<T: Real>() -> T {
    T::of(1e-9)
}

/// Sum-rate LP value at auxiliary rates `r`, or `None` when `r` is
/// infeasible for the empty-set constraint (or numerically out of domain).
fn lp_objective<T: Real>(prep: &PreparedCeo<'_, T>, r: &[T]) -> Option<T> {
    if r.iter().any(|&x| x < T::zero()) {
        return None;
    }
    let f = prep.constraint_vector(r).ok()?;
    if f[0] > feas_tol::<T>() {
        return None;
    }
    super::min_sum_rate_lp(&f, prep.m()).ok().map(|s| s.value)
}

/// Projected quasi-Newton descent (BFGS with clipping at `r >= 0`) on a
/// possibly-infeasible objective. Returns the best point found.
fn projected_descent<T: Real>(
    obj: &impl Fn(&[T]) -> Option<T>,
    start: &[T],
    cfg: &OptimizerConfig<T>,
) -> Option<(T, Vec<T>)> {
    let m = start.len();
    let mut x: Vec<T> = start.iter().map(|&v| v.max(T::zero())).collect();
    let mut value = obj(&x)?;

    let fd_step = T::of(1e-6);
    let grad = |x: &[T], v: T| -> Vec<T> {
        let mut g = vec![T::zero(); x.len()];
        for i in 0..x.len() {
            let h = fd_step * (T::one() + x[i]);
            let mut xp = x.to_vec();
            xp[i] += h;
            let mut xm = x.to_vec();
            xm[i] = (xm[i] - h).max(T::zero());
            let vp = obj(&xp);
            let vm = obj(&xm);
            g[i] = match (vp, vm) {
                (Some(a), Some(b)) => (a - b) / (xp[i] - xm[i]),
                (Some(a), None) => (a - v) / h,
                (None, Some(b)) => (v - b) / (x[i] - xm[i]).max(h * T::of(1e-3)),
                (None, None) => T::zero(),
            };
        }
        g
    };

    let mut h_inv: Vec<Vec<T>> = identity(m);
    let mut g = grad(&x, value);
    for _ in 0..cfg.max_iters {
        let mut dir: Vec<T> = (0..m)
            .map(|i| -(0..m).map(|j| h_inv[i][j] * g[j]).fold(T::zero(), |a, b| a + b))
            .collect();
        let mut slope = dot(&dir, &g);
        if !(slope < T::zero()) {
            h_inv = identity(m);
            dir = g.iter().map(|&v| -v).collect();
            slope = dot(&dir, &g);
            if !(slope < T::zero()) {
                break;
            }
        }
        // Backtracking line search with simple Armijo acceptance.
        let mut accepted: Option<(Vec<T>, T)> = None;
        let mut t = T::one();
        for _ in 0..40 {
            let xn: Vec<T> = x
                .iter()
                .zip(dir.iter())
                .map(|(&xi, &di)| (xi + t * di).max(T::zero()))
                .collect();
            if let Some(vn) = obj(&xn) {
                if vn < value + T::of(1e-4) * t * slope || vn < value - cfg.improve_tol {
                    accepted = Some((xn, vn));
                    break;
                }
            }
            t *= T::of(0.5);
        }
        let Some((xn, vn)) = accepted else { break };
        let improvement = value - vn;
        let gn = grad(&xn, vn);
        // BFGS update of the inverse Hessian.
        let s: Vec<T> = xn.iter().zip(x.iter()).map(|(&a, &b)| a - b).collect();
        let y: Vec<T> = gn.iter().zip(g.iter()).map(|(&a, &b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > T::of(1e-12) {
            let rho = T::one() / sy;
            let hy: Vec<T> = (0..m)
                .map(|i| (0..m).map(|j| h_inv[i][j] * y[j]).fold(T::zero(), |a, b| a + b))
                .collect();
            let yhy = dot(&y, &hy);
            for i in 0..m {
                for j in 0..m {
                    h_inv[i][j] += (T::one() + rho * yhy) * rho * s[i] * s[j]
                        - rho * (hy[i] * s[j] + s[i] * hy[j]);
                }
            }
        } else {
            h_inv = identity(m);
        }
        x = xn;
        value = vn;
        g = gn;
        if improvement < cfg.improve_tol {
            break;
        }
    }
    Some((value, x))
}

fn identity<T: Real>(m: usize) -> Vec<Vec<T>> {
    (0..m)
        .map(|i| (0..m).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect()
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b.iter()).map(|(&x, &y)| x * y).fold(T::zero(), |acc, v| acc + v)
}

/// Starts for the auxiliary-rate searches: the feasibility-boundary
/// water-fill point, an equal-rate grid, and seeded random vectors.
fn starting_points<T: Real>(
    prep: &PreparedCeo<'_, T>,
    cfg: &OptimizerConfig<T>,
) -> Result<Vec<Vec<T>>> {
    let m = prep.m();
    let mf = T::of(m as f64);
    let mut starts = Vec::new();
    if let Some(wf) = boundary_waterfill(prep) {
        starts.push(wf);
    }
    let hi = T::of(4.0) * prep.r_x_d / mf;
    for k in 0..cfg.grid_starts {
        let t = T::of(k as f64) / T::of((cfg.grid_starts.max(2) - 1) as f64);
        starts.push(vec![hi * t; m]);
    }
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.random_starts {
        starts.push(
            (0..m)
                .map(|_| T::of(rng.random_range(0.0..1.0)) * (hi + T::of(0.5)))
                .collect(),
        );
    }
    Ok(starts)
}

/// Auxiliary rates minimizing `sum r_i` on the feasibility boundary of the
/// empty-set constraint; the provable optimum under equal noise variances.
fn boundary_waterfill<T: Real>(prep: &PreparedCeo<'_, T>) -> Option<Vec<T>> {
    let full = (1usize << prep.m()) - 1;
    let c_full = prep.c_mask[full];
    let budget = c_full - (T::of(2.0) * prep.r_x_d).exp();
    let weights: Vec<T> = prep
        .inv_noise
        .iter()
        .map(|&w| prep.source.entropy_power * w)
        .collect();
    let x = max_log_under_budget(&weights, budget)?;
    Some(
        x.iter()
            .map(|&xi| (-xi.max(T::of(1e-300)).ln() * T::of(0.5)).max(T::zero()))
            .collect(),
    )
}

/// Minimum sum rate over all auxiliary rates consistent with the outer
/// bound: for each feasible `r` the subset-sum LP gives the least total
/// rate, and a multi-start projected quasi-Newton search minimizes over
/// `r`. The reported value is the best local minimum found.
pub fn outer_min_sum_rate<T: Real>(
    prep: &PreparedCeo<'_, T>,
    cfg: &OptimizerConfig<T>,
) -> Result<OuterSolution<T>> {
    let full = (1usize << prep.m()) - 1;
    let sup = prep.c_mask[full];
    if (T::of(2.0) * prep.r_x_d).exp() >= sup {
        return Err(Error::Infeasible {
            d: prep.problem.distortion.as_f64(),
        });
    }
    let obj = |r: &[T]| lp_objective(prep, r);
    let mut best: Option<(T, Vec<T>)> = None;
    for start in starting_points(prep, cfg)? {
        if let Some((v, x)) = projected_descent(&obj, &start, cfg) {
            if best.as_ref().map_or(true, |(bv, _)| v < *bv) {
                best = Some((v, x));
            }
        }
    }
    let (value, witness_r) = best.ok_or(Error::Infeasible {
        d: prep.problem.distortion.as_f64(),
    })?;
    Ok(OuterSolution { value, witness_r })
}

/// Achievable sum rate with Gaussian auxiliaries. Equal noise variances
/// use the closed form; unequal variances allocate quantizer precision by
/// water-filling, which reduces to the closed form when variances match.
pub fn inner_sum_rate<T: Real>(prep: &PreparedCeo<'_, T>) -> Result<BoundResult<T>> {
    let var_x = prep.source.variance;
    let d = prep.problem.distortion;
    let m = prep.m();
    let total_precision: T = prep.inv_noise.iter().fold(T::zero(), |a, &b| a + b);
    let floor = T::one() / (T::one() / var_x + total_precision);
    if d <= floor {
        return Err(Error::DistortionUnreachable {
            d: d.as_f64(),
            floor: floor.as_f64(),
        });
    }
    let note = format!("d = {} above observation floor {}", d.as_f64(), floor.as_f64());
    if let Some(var_z) = prep.problem.equal_variance() {
        let var_ym = var_x + var_z / T::of(m as f64);
        let value = formula::ceo_upper_mse(var_x, var_ym, var_z, m, d);
        return Ok(BoundResult::ok(
            FormulaId::CeoInnerSumRate,
            BoundKind::Upper,
            value,
            note,
        ));
    }
    let t = T::one() / d - T::one() / var_x;
    let Some((nu, u)) = inner_precision_split(&prep.inv_noise, t) else {
        return Err(Error::DistortionUnreachable {
            d: d.as_f64(),
            floor: floor.as_f64(),
        });
    };
    let mut value = log_plus(var_x / d) * T::of(0.5);
    for (ui, ai) in u.iter().zip(prep.inv_noise.iter()) {
        if *ui > T::zero() {
            value += (*ai / nu).ln() * T::of(0.5);
        }
    }
    Ok(BoundResult::ok(
        FormulaId::CeoInnerSumRate,
        BoundKind::Upper,
        value,
        note,
    ))
}

/// Verdict of a rate-vector membership query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionVerdict {
    /// No auxiliary rates satisfy the outer-bound constraints at this rate
    /// vector: it is certainly not achievable.
    OutsideOuterBound,
    /// Auxiliary rates exist under which every outer constraint holds.
    ConsistentWithOuterBound,
    /// The vector satisfies the Gaussian-auxiliary achievable region for a
    /// witnessed choice of auxiliary rates.
    InsideInnerBound,
}

impl std::fmt::Display for RegionVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RegionVerdict::OutsideOuterBound => "outside-outer-bound",
            RegionVerdict::ConsistentWithOuterBound => "consistent-with-outer-bound",
            RegionVerdict::InsideInnerBound => "inside-inner-bound",
        })
    }
}

/// A membership query and its verdict.
#[derive(Debug, Clone)]
pub struct RegionQuery<T> {
    pub rates: Vec<T>,
    pub witness_r: Option<Vec<T>>,
    pub verdict: RegionVerdict,
}

/// Classify a rate vector against the outer and inner bounds.
///
/// Queries within `1e-9` nats of a constraint boundary count as
/// consistent; the verdict machinery never extends a bound past what a
/// numerical witness supports.
pub fn region_check<T: Real>(
    prep: &PreparedCeo<'_, T>,
    rates: &[T],
    cfg: &OptimizerConfig<T>,
) -> Result<RegionQuery<T>> {
    let m = prep.m();
    if rates.len() != m {
        return Err(Error::InvalidParameter(format!(
            "{} rates for m = {m}",
            rates.len()
        )));
    }
    if rates.iter().any(|&x| !(x >= T::zero())) {
        return Err(Error::InvalidParameter("rates must be >= 0".into()));
    }
    let tol = feas_tol::<T>();

    // Inner membership: try quantizer allocations that spend the query's
    // rate budget.
    if let Some(witness) = inner_witness(prep, rates) {
        return Ok(RegionQuery {
            rates: rates.to_vec(),
            witness_r: Some(witness),
            verdict: RegionVerdict::InsideInnerBound,
        });
    }

    let rate_sum: T = rates.iter().fold(T::zero(), |a, &b| a + b);
    // Certificate: every feasible r forces sum R >= R_X(D) + sum r_i, and
    // the water-fill minimizes the right side.
    if let Some(wf) = boundary_waterfill(prep) {
        let s_min = prep.r_x_d + wf.iter().fold(T::zero(), |a, &b| a + b);
        if rate_sum < s_min - tol {
            return Ok(RegionQuery {
                rates: rates.to_vec(),
                witness_r: None,
                verdict: RegionVerdict::OutsideOuterBound,
            });
        }
    } else {
        // No r is feasible at all: the bound set is empty at this D.
        return Ok(RegionQuery {
            rates: rates.to_vec(),
            witness_r: None,
            verdict: RegionVerdict::OutsideOuterBound,
        });
    }

    // Search for auxiliary rates under which every constraint holds.
    let full = (1usize << m) - 1;
    let mut subset_sums = vec![T::zero(); full + 1];
    for mask in 1..=full {
        let lsb = mask & mask.wrapping_neg();
        let i = lsb.trailing_zeros() as usize;
        subset_sums[mask] = subset_sums[mask ^ lsb] + rates[i];
    }
    let violation = |r: &[T]| -> Option<T> {
        if r.iter().any(|&x| x < T::zero()) {
            return None;
        }
        let f = prep.constraint_vector(r).ok()?;
        let mut worst = f[0];
        for mask in 1..=full {
            worst = worst.max(f[mask] - subset_sums[mask]);
        }
        Some(worst)
    };
    let mut best: Option<(T, Vec<T>)> = None;
    for start in starting_points(prep, cfg)? {
        if let Some((v, x)) = projected_descent(&violation, &start, cfg) {
            if best.as_ref().map_or(true, |(bv, _)| v < *bv) {
                best = Some((v, x));
            }
        }
    }
    match best {
        Some((v, witness)) if v <= tol => Ok(RegionQuery {
            rates: rates.to_vec(),
            witness_r: Some(witness),
            verdict: RegionVerdict::ConsistentWithOuterBound,
        }),
        _ => Ok(RegionQuery {
            rates: rates.to_vec(),
            witness_r: None,
            verdict: RegionVerdict::OutsideOuterBound,
        }),
    }
}

/// Quantizer-rate witness placing `rates` inside the achievable region.
///
/// For fixed auxiliary rates `r` the Gaussian-auxiliary region is the
/// up-closed set `sum_{i in A} R_i >= b_var(A, r)` for every nonempty
/// subset, with `b_var(empty) <= 0` expressing that the quantizers reach
/// the target distortion. The distortion-tight water-fill allocation
/// minimizes every right side's rate share, so it is the natural witness
/// candidate.
fn inner_witness<T: Real>(prep: &PreparedCeo<'_, T>, rates: &[T]) -> Option<Vec<T>> {
    let m = prep.m();
    let var_x = prep.source.variance;
    let d = prep.problem.distortion;
    let t = T::one() / d - T::one() / var_x;
    let (nu, u) = inner_precision_split(&prep.inv_noise, t)?;
    let base: Vec<T> = u
        .iter()
        .zip(prep.inv_noise.iter())
        .map(|(&ui, &ai)| {
            if ui > T::zero() {
                (ai / nu).ln() * T::of(0.5)
            } else {
                T::zero()
            }
        })
        .collect();
    let tol = feas_tol::<T>();
    let full = (1usize << m) - 1;
    // Distortion feasibility of the witness itself.
    let empty = prep.inner_constraint(Subset(0), &base).ok()?;
    if empty > tol {
        return None;
    }
    for mask in 1..=full {
        let sum: T = (0..m)
            .filter(|&i| mask & (1 << i) != 0)
            .map(|i| rates[i])
            .fold(T::zero(), |a, b| a + b);
        let bound = prep.inner_constraint(Subset(mask as u32), &base).ok()?;
        if sum < bound - tol {
            return None;
        }
    }
    Some(base)
}

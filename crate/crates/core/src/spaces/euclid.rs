//! Weighted Euclidean 1-center: minimize `max_i |x - p_i| / w_i`.
//!
//! The optimum is pinned by a support set of at most `dim + 1` affinely
//! independent centers whose scaled distances coincide, with the optimum in
//! their convex hull. For a fixed support the candidate lies in the support's
//! affine hull and solves a linear system in `x` plus one quadratic in
//! `t^2`, so each candidate is closed-form. The full problem is solved by
//! basis exchange: optimize over a small working set, add the most violated
//! center, repeat. The objective strictly increases, so the loop terminates.
//! Candidates are then polished by Newton steps, and in the plane the value
//! is finished by bisection over an exact disk-intersection test.

use nalgebra::{DMatrix, DVector};

/// Optimal point, optimal value and the support indices that pinned it.
#[derive(Clone, Debug)]
pub struct WeightedCenter {
    pub point: Vec<f64>,
    pub value: f64,
    pub support: Vec<usize>,
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn objective(x: &[f64], points: &[&[f64]], weights: &[f64], set: &[usize]) -> f64 {
    set.iter().map(|&i| dist(x, points[i]) / weights[i]).fold(0.0, f64::max)
}

/// Exact weighted minimax over the whole family. `weights` must be positive.
pub fn weighted_minimax(points: &[&[f64]], weights: &[f64]) -> WeightedCenter {
    assert_eq!(points.len(), weights.len());
    assert!(!points.is_empty());
    let dim = points[0].len();
    let all: Vec<usize> = (0..points.len()).collect();
    let mut working = vec![0];
    let mut best = solve_working_set(points, weights, &working, dim);
    // each exchange strictly raises the value; the bound only guards
    // against floating point cycling
    for _ in 0..(4 * points.len() + 64) {
        let (worst, ratio) = all
            .iter()
            .map(|&i| (i, dist(&best.point, points[i]) / weights[i]))
            .fold((0, f64::NEG_INFINITY), |acc, c| if c.1 > acc.1 { c } else { acc });
        if ratio <= best.value * (1.0 + 1e-13) || working.contains(&worst) {
            break;
        }
        working = best.support.clone();
        working.push(worst);
        let next = solve_working_set(points, weights, &working, dim);
        if next.value <= best.value {
            break;
        }
        best = next;
    }
    best.value = objective(&best.point, points, weights, &all);
    if dim == 2 && points.len() > 1 {
        refine_planar(points, weights, &mut best);
    }
    best
}

/// Bisection on the scale with an exact disk-intersection test, starting
/// from the basis-exchange value. Circle crossings are computed in product
/// form, which keeps full accuracy when one disk is tiny next to the
/// distances between centers.
fn refine_planar(points: &[&[f64]], weights: &[f64], best: &mut WeightedCenter) {
    let all: Vec<usize> = (0..points.len()).collect();
    let mut hi = best.value;
    let mut lo = hi * (1.0 - 1e-6);
    while lo > 0.0 && planar_witness(points, weights, lo).is_some() {
        lo *= 0.5;
    }
    for _ in 0..200 {
        if hi - lo <= 1e-15 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        match planar_witness(points, weights, mid) {
            Some(x) => {
                let v = objective(&x, points, weights, &all);
                if v < best.value {
                    best.value = v;
                    best.point = x;
                }
                hi = mid;
            }
            None => lo = mid,
        }
    }
}

/// A point in every disk `B(p_i, t w_i)`, if one exists.
fn planar_witness(points: &[&[f64]], weights: &[f64], t: f64) -> Option<Vec<f64>> {
    let n = points.len();
    let inside = |x: &[f64]| (0..n).all(|i| dist(x, points[i]) <= t * weights[i] * (1.0 + 1e-15));
    if let Some(i) = (0..n).find(|&i| inside(points[i])) {
        return Some(points[i].to_vec());
    }
    for i in 0..n {
        for j in i + 1..n {
            for x in circle_crossings(points[i], t * weights[i], points[j], t * weights[j]) {
                if inside(&x) {
                    return Some(x);
                }
            }
        }
    }
    None
}

fn circle_crossings(c1: &[f64], r1: f64, c2: &[f64], r2: f64) -> Vec<Vec<f64>> {
    let d = dist(c1, c2);
    if d == 0.0 {
        return Vec::new();
    }
    let h2 = (r1 + r2 + d) * (r2 - r1 + d) * (r1 - r2 + d) * (r1 + r2 - d);
    // tangent circles may round to a slightly negative product
    let h = 0.5 * h2.max(0.0).sqrt() / d;
    let a = 0.5 * (d + (r1 - r2) * (r1 + r2) / d);
    let u = [(c2[0] - c1[0]) / d, (c2[1] - c1[1]) / d];
    let p = [c1[0] + a * u[0], c1[1] + a * u[1]];
    vec![
        vec![p[0] - h * u[1], p[1] + h * u[0]],
        vec![p[0] + h * u[1], p[1] - h * u[0]],
    ]
}

fn solve_working_set(points: &[&[f64]], weights: &[f64], set: &[usize], dim: usize) -> WeightedCenter {
    let max_support = set.len().min(dim + 1);
    let mut best: Option<WeightedCenter> = None;
    let n = set.len();
    assert!(n < 30, "working set grew beyond the combinatorial dimension");
    for mask in 1u32..(1u32 << n) {
        let size = mask.count_ones() as usize;
        if size > max_support {
            continue;
        }
        let support: Vec<usize> = (0..n).filter(|b| mask & (1 << b) != 0).map(|b| set[b]).collect();
        for point in support_candidates(points, weights, &support) {
            let value = objective(&point, points, weights, set);
            if best.as_ref().is_none_or(|b| value < b.value) {
                best = Some(WeightedCenter {
                    point,
                    value,
                    support: support.clone(),
                });
            }
        }
    }
    best.expect("singleton supports always yield a candidate")
}

/// Points in the affine hull of `support` whose scaled distances to every
/// support center agree.
fn support_candidates(points: &[&[f64]], weights: &[f64], support: &[usize]) -> Vec<Vec<f64>> {
    // measuring from the smallest ball keeps the unknown offset short
    let mut support = support.to_vec();
    let lightest = (0..support.len())
        .min_by(|&a, &b| weights[support[a]].total_cmp(&weights[support[b]]))
        .unwrap_or(0);
    support.swap(0, lightest);
    let support = support.as_slice();
    let base = points[support[0]];
    if support.len() == 1 {
        return vec![base.to_vec()];
    }
    let m = support.len() - 1;
    let w0 = weights[support[0]];
    let dirs: Vec<Vec<f64>> = support[1..]
        .iter()
        .map(|&j| points[j].iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    let gram = DMatrix::from_fn(m, m, |r, c| dot(&dirs[r], &dirs[c]));
    let a = DVector::from_fn(m, |r, _| 0.5 * dot(&dirs[r], &dirs[r]));
    let b = DVector::from_fn(m, |r, _| {
        let wj = weights[support[r + 1]];
        0.5 * (wj * wj - w0 * w0)
    });
    let scale = gram.diagonal().max();
    let Some(chol) = gram.clone().cholesky() else {
        return Vec::new();
    };
    let l = chol.l();
    if (0..m).any(|i| l[(i, i)] * l[(i, i)] <= 1e-13 * scale) {
        return Vec::new();
    }
    let p = chol.solve(&a);
    let q = chol.solve(&b);
    // (p - s q)^T G (p - s q) = s w0^2
    let qa = q.dot(&b);
    let qb = -2.0 * p.dot(&b) - w0 * w0;
    let qc = p.dot(&a);
    let mut out = Vec::with_capacity(2);
    for s in quadratic_roots(qa, qb, qc) {
        if !(s.is_finite() && s >= 0.0) {
            continue;
        }
        let c = &p - &q * s;
        out.push(polish(points, weights, support, &dirs, c, s.sqrt()));
    }
    out
}

fn along(base: &[f64], dirs: &[Vec<f64>], c: &DVector<f64>) -> Vec<f64> {
    let mut x = base.to_vec();
    for (l, dir) in dirs.iter().enumerate() {
        for (xk, dk) in x.iter_mut().zip(dir) {
            *xk += c[l] * dk;
        }
    }
    x
}

/// Newton steps on `|x - p_j| - t w_j = 0` over the support's affine hull.
/// The closed form loses absolute accuracy when one scaled ball is much
/// smaller than the distances between centers; these residuals do not.
fn polish(
    points: &[&[f64]],
    weights: &[f64],
    support: &[usize],
    dirs: &[Vec<f64>],
    mut c: DVector<f64>,
    mut t: f64,
) -> Vec<f64> {
    let base = points[support[0]];
    let m = dirs.len();
    let residual = |x: &[f64], t: f64| {
        support
            .iter()
            .map(|&j| (dist(x, points[j]) - t * weights[j]).powi(2))
            .sum::<f64>()
    };
    let mut x = along(base, dirs, &c);
    let mut err = residual(&x, t);
    for _ in 0..50 {
        if err == 0.0 {
            break;
        }
        let mut jac = DMatrix::zeros(m + 1, m + 1);
        let mut f = DVector::zeros(m + 1);
        for (row, &j) in support.iter().enumerate() {
            let d = dist(&x, points[j]);
            if d == 0.0 {
                return x;
            }
            for (l, dir) in dirs.iter().enumerate() {
                jac[(row, l)] = x
                    .iter()
                    .zip(points[j])
                    .zip(dir)
                    .map(|((a, b), v)| (a - b) * v)
                    .sum::<f64>()
                    / d;
            }
            jac[(row, m)] = -weights[j];
            f[row] = -(d - t * weights[j]);
        }
        let Some(step) = jac.lu().solve(&f) else { break };
        // backtrack until the residual drops
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let c2 = &c + step.rows(0, m) * scale;
            let t2 = t + step[m] * scale;
            let x2 = along(base, dirs, &c2);
            let err2 = residual(&x2, t2);
            if err2 < err {
                (c, t, x, err) = (c2, t2, x2, err2);
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    x
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let size = b.abs().max(c.abs());
    if a.abs() <= 1e-14 * size {
        return if b != 0.0 { vec![-c / b] } else { Vec::new() };
    }
    let mut disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        if disc > -1e-12 * b * b {
            disc = 0.0;
        } else {
            return Vec::new();
        }
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(points: &[Vec<f64>], weights: &[f64]) -> WeightedCenter {
        let refs: Vec<&[f64]> = points.iter().map(|p| p.as_slice()).collect();
        weighted_minimax(&refs, weights)
    }

    #[test]
    fn equilateral_uniform_is_circumradius() {
        let h = 3f64.sqrt() / 2.0;
        let c = solve(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, h]], &[1.0, 1.0, 1.0]);
        assert!((c.value - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((c.point[0] - 0.5).abs() < 1e-15);
        assert!((c.point[1] - 3f64.sqrt() / 6.0).abs() < 1e-15);
    }

    #[test]
    fn obtuse_triangle_uses_longest_edge_midpoint() {
        let c = solve(&[vec![0.0, 0.0], vec![4.0, 0.0], vec![2.0, 0.5]], &[1.0; 3]);
        assert!((c.value - 2.0).abs() < 1e-14);
        assert_eq!(c.support.len(), 2);
    }

    #[test]
    fn weighted_pair_splits_segment_by_weights() {
        let c = solve(&[vec![0.0, 0.0, 0.0], vec![3.0, 0.0, 0.0]], &[1.0, 2.0]);
        assert!((c.value - 1.0).abs() < 1e-15);
        assert!((c.point[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn matches_dense_grid_on_random_weighted_families() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let n = rng.gen_range(2..7);
            let pts: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect();
            let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
            let c = solve(&pts, &w);
            let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
            let all: Vec<usize> = (0..n).collect();
            // grid oracle: never below the exact optimum, and close to it
            let mut grid = f64::INFINITY;
            let steps = 400;
            for i in 0..=steps {
                for j in 0..=steps {
                    let x = [i as f64 / steps as f64, j as f64 / steps as f64];
                    grid = grid.min(objective(&x, &refs, &w, &all));
                }
            }
            assert!(c.value <= grid + 1e-12);
            assert!(grid - c.value < 5e-3);
        }
    }

    #[test]
    fn collinear_points_do_not_break_the_solver() {
        let c = solve(&[vec![0.0], vec![1.0], vec![2.0], vec![5.0]], &[1.0, 1.0, 3.0, 1.0]);
        // brute force along the line
        let mut best = f64::INFINITY;
        for k in 0..=500_000 {
            let x = k as f64 * 1e-5;
            let v = [x.abs(), (x - 1.0).abs(), (x - 2.0).abs() / 3.0, (x - 5.0).abs()]
                .into_iter()
                .fold(0.0, f64::max);
            best = best.min(v);
        }
        assert!((c.value - best).abs() < 1e-5);
        assert!(c.value <= best + 1e-12);
    }
}

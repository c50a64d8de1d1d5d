//! Closed arcs on a circle of circumference `L`, positions in `[0, L)`.

pub(crate) fn arc_distance(a: f64, b: f64, circumference: f64) -> f64 {
    let d = (a - b).abs();
    d.min(circumference - d)
}

fn wrap(x: f64, circumference: f64) -> f64 {
    let w = x.rem_euclid(circumference);
    if w >= circumference {
        0.0
    } else {
        w
    }
}

fn covers(x: f64, centers: &[f64], radii: &[f64], circumference: f64, slack: f64) -> bool {
    centers
        .iter()
        .zip(radii)
        .all(|(&c, &r)| arc_distance(x, c, circumference) <= r * (1.0 + slack) + slack * circumference)
}

/// A common point of the closed arcs `[c_i - r_i, c_i + r_i]`, if any.
///
/// A nonempty intersection of closed arcs either is the whole circle or has
/// a component starting at some arc's endpoint, so centers and endpoints are
/// the only candidates needed.
pub(crate) fn intersect(centers: &[f64], radii: &[f64], circumference: f64, slack: f64) -> Option<f64> {
    let endpoints = centers
        .iter()
        .zip(radii)
        .flat_map(|(&c, &r)| [wrap(c - r, circumference), wrap(c + r, circumference)]);
    centers
        .iter()
        .copied()
        .chain(endpoints)
        .find(|&x| covers(x, centers, radii, circumference, slack))
}

/// Exact weighted minimax `min_x max_i d(x, c_i) / w_i` on the circle.
///
/// As the scale `t` shrinks to the optimum the last surviving point of the
/// intersection is where the right end of arc `i` meets the left end of arc
/// `j` (possibly `i == j` when an arc closes up), so
/// `t (w_i + w_j) = (c_j - c_i) mod L + k L` for some `k >= 0`.
pub(crate) fn minimax(centers: &[f64], weights: &[f64], circumference: f64, slack: f64) -> (f64, f64) {
    let n = centers.len();
    let mut upper = (f64::INFINITY, centers[0]);
    for &x in centers {
        let v = centers
            .iter()
            .zip(weights)
            .map(|(&c, &w)| arc_distance(x, c, circumference) / w)
            .fold(0.0, f64::max);
        if v < upper.0 {
            upper = (v, x);
        }
    }
    let mut events = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let gap = wrap(centers[j] - centers[i], circumference);
            let pace = weights[i] + weights[j];
            let mut k = 0.0;
            loop {
                let t = (gap + k * circumference) / pace;
                if t > upper.0 * (1.0 + 1e-12) {
                    break;
                }
                events.push((t, i));
                k += 1.0;
            }
        }
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (t, i) in events {
        let x = wrap(centers[i] + t * weights[i], circumference);
        let radii: Vec<f64> = weights.iter().map(|w| t * w).collect();
        if covers(x, centers, &radii, circumference, slack) {
            return (t, x);
        }
    }
    upper
}

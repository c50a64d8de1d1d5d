//! Ball families on the round sphere and in the Poincare disk.
//!
//! Both use an exact candidate test: a nonempty intersection of closed disks
//! on a surface either contains a disk center, or has a boundary vertex
//! where two boundary circles cross, or contains an entire boundary circle.
//! Checking centers, pairwise crossings and one point per circle therefore
//! decides intersection. Minimax values are found by bisection on the scale
//! over that test.

pub(crate) trait Surface {
    fn distance(&self, a: &[f64], b: &[f64]) -> f64;
    /// Candidate witnesses for the family of closed balls.
    fn candidates(&self, centers: &[&[f64]], radii: &[f64]) -> Vec<Vec<f64>>;
}

pub(crate) fn find_witness<S: Surface>(surface: &S, centers: &[&[f64]], radii: &[f64], slack: f64) -> Option<Vec<f64>> {
    surface.candidates(centers, radii).into_iter().find(|x| {
        x.iter().all(|v| v.is_finite())
            && centers
                .iter()
                .zip(radii)
                .all(|(c, &r)| surface.distance(x, c) <= r * (1.0 + slack) + slack)
    })
}

/// `min_x max_i d(x, c_i) / w_i` by bisection; returns the value attained at
/// the returned witness.
pub(crate) fn minimax<S: Surface>(
    surface: &S,
    centers: &[&[f64]],
    weights: &[f64],
    rel_tol: f64,
    slack: f64,
) -> (f64, Vec<f64>) {
    let eval = |x: &[f64]| {
        centers
            .iter()
            .zip(weights)
            .map(|(c, &w)| surface.distance(x, c) / w)
            .fold(0.0, f64::max)
    };
    let mut lo: f64 = 0.0;
    for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            lo = lo.max(surface.distance(centers[i], centers[j]) / (weights[i] + weights[j]));
        }
    }
    let mut witness = centers[0].to_vec();
    let mut hi = f64::INFINITY;
    for c in centers {
        let v = eval(c);
        if v < hi {
            hi = v;
            witness = c.to_vec();
        }
    }
    for _ in 0..200 {
        if hi - lo <= rel_tol * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let radii: Vec<f64> = weights.iter().map(|w| mid * w).collect();
        match find_witness(surface, centers, &radii, slack) {
            Some(x) => {
                hi = mid;
                witness = x;
            }
            None => lo = mid,
        }
    }
    (eval(&witness), witness)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Sphere of radius `s`; points are unit vectors.
pub(crate) struct Sphere {
    pub radius: f64,
}

impl Sphere {
    /// Great-circle angle, accurate for nearly equal and nearly antipodal
    /// vectors alike.
    pub(crate) fn angle(a: &[f64], b: &[f64]) -> f64 {
        norm(&cross(a, b)).atan2(dot(a, b))
    }
}

impl Surface for Sphere {
    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        self.radius * Sphere::angle(a, b)
    }

    fn candidates(&self, centers: &[&[f64]], radii: &[f64]) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = centers.iter().map(|c| c.to_vec()).collect();
        // caps reaching the antipode cover the sphere and add no boundary
        let caps: Vec<(&[f64], f64)> = centers
            .iter()
            .zip(radii)
            .map(|(c, &r)| (*c, r / self.radius))
            .filter(|&(_, theta)| theta < std::f64::consts::PI)
            .collect();
        for &(c, theta) in &caps {
            let axis = if c[0].abs() <= c[1].abs() && c[0].abs() <= c[2].abs() {
                [1.0, 0.0, 0.0]
            } else if c[1].abs() <= c[2].abs() {
                [0.0, 1.0, 0.0]
            } else {
                [0.0, 0.0, 1.0]
            };
            let e = cross(c, &axis);
            let en = norm(&e);
            let (ct, st) = (theta.cos(), theta.sin());
            out.push((0..3).map(|k| ct * c[k] + st * e[k] / en).collect());
        }
        for i in 0..caps.len() {
            for j in i + 1..caps.len() {
                let (ci, ti) = caps[i];
                let (cj, tj) = caps[j];
                let n = cross(ci, cj);
                let nn = norm(&n);
                let sep = nn.atan2(dot(ci, cj));
                if nn <= 1e-15 || sep.sin() <= 1e-15 {
                    continue;
                }
                let hav = haversine_angle(ti, tj, sep, ti.sin() * sep.sin(), f64::sin);
                let a = 2.0 * hav.sqrt().asin();
                let toward = cross(&n, ci);
                for sign in [1.0, -1.0] {
                    let (ca, sa) = (a.cos(), sign * a.sin());
                    let mut x: Vec<f64> = (0..3)
                        .map(|k| ti.cos() * ci[k] + ti.sin() * (ca * toward[k] + sa * n[k]) / nn)
                        .collect();
                    let len = norm(&x);
                    x.iter_mut().for_each(|v| *v /= len);
                    out.push(x);
                }
            }
        }
        out
    }
}

/// Poincare disk model of the hyperbolic plane (curvature -1).
pub(crate) struct PoincareDisk;

impl PoincareDisk {
    /// `sinh^2(d/2) = |u-v|^2 / ((1-|u|^2)(1-|v|^2))`, the same quantity as
    /// `cosh d = 1 + 2|u-v|^2 / ((1-|u|^2)(1-|v|^2))` but stable for short
    /// distances.
    pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
        let diff2 = (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
        let da = 1.0 - (a[0] * a[0] + a[1] * a[1]);
        let db = 1.0 - (b[0] * b[0] + b[1] * b[1]);
        if da <= 0.0 || db <= 0.0 {
            return f64::INFINITY;
        }
        2.0 * (diff2 / (da * db)).sqrt().asinh()
    }
}

impl Surface for PoincareDisk {
    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        PoincareDisk::dist(a, b)
    }

    fn candidates(&self, centers: &[&[f64]], radii: &[f64]) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = centers.iter().map(|c| c.to_vec()).collect();
        for (c, &r) in centers.iter().zip(radii) {
            let c = [c[0], c[1]];
            out.push(from_origin(c, [(0.5 * r).tanh(), 0.0]).to_vec());
        }
        for i in 0..centers.len() {
            for j in i + 1..centers.len() {
                let ci = [centers[i][0], centers[i][1]];
                let (ti, tj) = (radii[i], radii[j]);
                let w = to_origin(ci, [centers[j][0], centers[j][1]]);
                let sep = PoincareDisk::dist(&[0.0, 0.0], &w);
                if !(sep > 0.0 && sep.is_finite()) {
                    continue;
                }
                let hav = haversine_angle(ti, tj, sep, ti.sinh() * sep.sinh(), f64::sinh);
                let a = 2.0 * hav.sqrt().asin();
                let theta = w[1].atan2(w[0]);
                let rho = (0.5 * ti).tanh();
                for phi in [theta + a, theta - a] {
                    out.push(from_origin(ci, [rho * phi.cos(), rho * phi.sin()]).to_vec());
                }
            }
        }
        out
    }
}

/// `hav(A)` for the angle at a vertex between sides `ti` and `sep` of a
/// triangle whose third side is `tj`, clamped to `[0, 1]`. `f` is `sin` on the
/// sphere and `sinh` in the hyperbolic plane; the product form avoids the
/// cancellation of the cosine law for small triangles.
fn haversine_angle(ti: f64, tj: f64, sep: f64, denom: f64, f: fn(f64) -> f64) -> f64 {
    let h = f(0.5 * (tj + sep - ti)) * f(0.5 * (tj - sep + ti)) / denom;
    if h.is_nan() {
        0.0
    } else {
        h.clamp(0.0, 1.0)
    }
}

fn cmul(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0]]
}

fn cdiv(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    let d = b[0] * b[0] + b[1] * b[1];
    [(a[0] * b[0] + a[1] * b[1]) / d, (a[1] * b[0] - a[0] * b[1]) / d]
}

/// Disk isometry sending `c` to the origin.
fn to_origin(c: [f64; 2], z: [f64; 2]) -> [f64; 2] {
    let cz = cmul([c[0], -c[1]], z);
    cdiv([z[0] - c[0], z[1] - c[1]], [1.0 - cz[0], -cz[1]])
}

/// Inverse of `to_origin`.
fn from_origin(c: [f64; 2], z: [f64; 2]) -> [f64; 2] {
    let cz = cmul([c[0], -c[1]], z);
    cdiv([z[0] + c[0], z[1] + c[1]], [1.0 + cz[0], cz[1]])
}

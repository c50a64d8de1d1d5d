//! Radius functions on finite point lists.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::spaces::metric::FiniteMetric;
use crate::spaces::Space;

/// Slack on `r(x) + r(y) >= d(x, y)`.
pub const ADMISSIBLE_SLACK: f64 = 1e-12;

/// Nonnegative radii on a list of points of a space.
///
/// Serializes as the bare array of values; deserializing assumes the values
/// are aligned with the space's own point order.
#[derive(Clone, Debug, PartialEq)]
pub struct RadiusFunction {
    points: Vec<usize>,
    values: Vec<f64>,
}

impl RadiusFunction {
    pub fn new(points: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::DomainMismatch(format!(
                "{} points but {} radii",
                points.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::DomainMismatch(format!(
                "radius {} at position {i} is negative",
                values[i]
            )));
        }
        Ok(RadiusFunction { points, values })
    }

    /// Radii on points `0..values.len()`.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        Self::new((0..values.len()).collect(), values)
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Radius at the `pos`-th point of the domain.
    pub fn get(&self, pos: usize) -> f64 {
        self.values[pos]
    }

    fn metric(&self, space: &Space) -> Result<FiniteMetric> {
        for (pos, &p) in self.points.iter().enumerate() {
            if p >= space.len() {
                return Err(Error::DomainMismatch(format!(
                    "point {p} at position {pos} is outside a space of {} points",
                    space.len()
                )));
            }
            if self.points[..pos].contains(&p) {
                return Err(Error::DomainMismatch(format!("point {p} listed twice")));
            }
        }
        space.submetric(&self.points)
    }
}

impl Serialize for RadiusFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.values.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RadiusFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let values = Vec::<f64>::deserialize(d)?;
        RadiusFunction::from_values(values).map_err(serde::de::Error::custom)
    }
}

/// First pair `(x, y)` of point indices with `r(x) + r(y) < d(x, y)`.
pub fn is_admissible(space: &Space, r: &RadiusFunction) -> Result<Option<(usize, usize)>> {
    let m = r.metric(space)?;
    Ok(first_violation(&m, &r.values).map(|(a, b)| (r.points[a], r.points[b])))
}

fn first_violation(m: &FiniteMetric, r: &[f64]) -> Option<(usize, usize)> {
    let n = r.len();
    (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .find(|&(a, b)| r[a] + r[b] < m.get(a, b) - ADMISSIBLE_SLACK)
}

/// The smallest value position `a` can take with the others fixed.
fn tight_value(m: &FiniteMetric, r: &[f64], a: usize) -> f64 {
    (0..r.len())
        .filter(|&b| b != a)
        .map(|b| m.get(a, b) - r[b])
        .fold(0.0, f64::max)
}

/// No coordinate of an admissible `r` can be lowered by more than `tol`.
pub fn is_extremal(space: &Space, r: &RadiusFunction, tol: f64) -> Result<bool> {
    let m = r.metric(space)?;
    if let Some((a, b)) = first_violation(&m, &r.values) {
        return Err(Error::NotAdmissible(r.points[a], r.points[b]));
    }
    Ok((0..r.len()).all(|a| (r.values[a] - tight_value(&m, &r.values, a)).abs() <= tol))
}

/// Cyclic coordinate descent `r(x) <- max(0, max_y d(x, y) - r(y))` over the
/// positions in `order` until a sweep moves nothing by more than `tol`.
pub fn extremal_minorant(space: &Space, r0: &RadiusFunction, order: &[usize], tol: f64) -> Result<RadiusFunction> {
    let m = r0.metric(space)?;
    let n = r0.len();
    let mut seen = vec![false; n];
    if order.len() != n || order.iter().any(|&a| a >= n || std::mem::replace(&mut seen[a], true)) {
        return Err(Error::DomainMismatch(format!(
            "sweep order {order:?} is not a permutation of 0..{n}"
        )));
    }
    if let Some((a, b)) = first_violation(&m, &r0.values) {
        return Err(Error::NotAdmissible(r0.points[a], r0.points[b]));
    }
    let mut r = r0.values.clone();
    let budget = 10 * n.max(1);
    for _ in 0..budget {
        let mut moved: f64 = 0.0;
        for &a in order {
            let v = tight_value(&m, &r, a).min(r[a]);
            moved = moved.max(r[a] - v);
            r[a] = v;
        }
        if moved <= tol {
            return Ok(RadiusFunction {
                points: r0.points.clone(),
                values: r,
            });
        }
    }
    Err(Error::NoConvergence {
        sweeps: budget,
        best: r,
    })
}

/// Index order for `None`, otherwise a ChaCha8 shuffle of `0..n` seeded by `seed`.
pub fn sweep_order(n: usize, seed: Option<u64>) -> Vec<usize> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut order: Vec<usize> = (0..n).collect();
    if let Some(seed) = seed {
        order.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
    }
    order
}

/// `r(y) = d(x, y)` on every point of the space.
pub fn distance_radius_function(space: &Space, x: usize) -> Result<RadiusFunction> {
    let values = (0..space.len())
        .map(|y| space.distance(x, y))
        .collect::<Result<Vec<_>>>()?;
    if space.is_empty() {
        return Err(Error::IndexOutOfRange { index: x, len: 0 });
    }
    RadiusFunction::from_values(values)
}

/// `r0(x_i) = max_j d(x_i, x_j) / 2`, an admissible start on `points`.
pub fn half_max_start(space: &Space, points: &[usize]) -> Result<RadiusFunction> {
    let m = space.submetric(points)?;
    let values = (0..points.len())
        .map(|a| 0.5 * m.row(a).iter().copied().fold(0.0, f64::max))
        .collect();
    RadiusFunction::new(points.to_vec(), values)
}

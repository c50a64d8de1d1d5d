//! Metric spaces, their distance functions, and the two primitives the rest
//! of the crate is built on: deciding whether a finite family of closed
//! balls has a common point, and the weighted minimax
//! `inf_x max_i d(x, x_i) / w_i`.
//!
//! Every space carries a list of sample points addressed by index. Witnesses
//! are searched either among those samples ([`WitnessMode::IntrinsicSample`])
//! or over the continuous model space ([`WitnessMode::Ambient`]).

pub mod descriptor;
pub mod euclid;
pub mod metric;
pub mod tree;

mod circle;
mod surface;

use serde::{Deserialize, Serialize};
use serde_json::json;

use self::descriptor::{SpaceDescriptor, TreeMark};
use self::metric::FiniteMetric;
use self::surface::{PoincareDisk, Sphere};
use self::tree::{TreePoint, TreeSpace};
use crate::error::{Error, Result};

/// Where witnesses for ball intersections may lie.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessMode {
    /// Only the listed sample points.
    IntrinsicSample,
    /// Anywhere in the continuous model space.
    Ambient,
}

impl WitnessMode {
    pub fn as_str(self) -> &'static str {
        match self {
            WitnessMode::IntrinsicSample => "intrinsic-sample",
            WitnessMode::Ambient => "ambient",
        }
    }
}

/// Numerical tolerances shared by every backend.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Relative slack on radii when certifying that a witness lies in a ball.
    pub intersect: f64,
    /// Relative width at which scale bisection stops.
    pub search: f64,
    /// Gromov radii below `degenerate * perimeter` mark a collinear triple.
    pub degenerate: f64,
    /// Absolute tolerance for extremality and descent convergence.
    pub extremal: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            intersect: 1e-12,
            search: 1e-13,
            degenerate: 1e-12,
            extremal: 1e-10,
        }
    }
}

/// A point of a space: a listed sample or a location in the model space.
#[derive(Clone, Debug, PartialEq)]
pub enum Location {
    Sample(usize),
    Point(Vec<f64>),
    Arc(f64),
    Tree(TreePoint),
}

/// Result of [`Space::balls_intersect`].
#[derive(Clone, Debug, PartialEq)]
pub struct Intersection {
    pub nonempty: bool,
    pub witness: Option<Location>,
}

/// Result of [`Space::minimax_scaled_distance`].
#[derive(Clone, Debug, PartialEq)]
pub struct Minimax {
    pub value: f64,
    pub witness: Location,
    /// True when an exact backend certified that the witness attains the
    /// infimum.
    pub attained: bool,
}

#[derive(Clone, Debug)]
enum Kind {
    Finite(FiniteMetric),
    Euclidean(Vec<Vec<f64>>),
    Linf(Vec<Vec<f64>>),
    Circle { circumference: f64, points: Vec<f64> },
    Sphere { radius: f64, points: Vec<Vec<f64>> },
    HyperbolicDisk(Vec<Vec<f64>>),
    Tree(TreeSpace),
}

/// An immutable metric space with indexed sample points.
#[derive(Clone, Debug)]
pub struct Space {
    kind: Kind,
    tol: Tolerances,
}

fn check_cloud(dim: usize, points: &[Vec<f64>]) -> Result<()> {
    for (i, p) in points.iter().enumerate() {
        if p.len() != dim {
            return Err(Error::InvalidDescriptor(format!(
                "point {i} has {} coordinates, expected {dim}",
                p.len()
            )));
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDescriptor(format!("point {i} is not finite")));
        }
    }
    Ok(())
}

fn check_distinct(len: usize, dist: impl Fn(usize, usize) -> f64) -> Result<()> {
    for i in 0..len {
        for j in i + 1..len {
            if dist(i, j) <= 1e-12 {
                return Err(Error::InvalidDescriptor(format!("points {i} and {j} coincide")));
            }
        }
    }
    Ok(())
}

fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

impl Space {
    fn with_kind(kind: Kind) -> Self {
        Space {
            kind,
            tol: Tolerances::default(),
        }
    }

    /// Explicit distance matrix; must pass metric validation.
    pub fn finite(matrix: &[Vec<f64>]) -> Result<Self> {
        Ok(Self::with_kind(Kind::Finite(FiniteMetric::new(matrix)?)))
    }

    pub fn from_metric(metric: FiniteMetric) -> Self {
        Self::with_kind(Kind::Finite(metric))
    }

    pub fn euclidean(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        check_cloud(dim, &points)?;
        check_distinct(points.len(), |i, j| euclid::dist(&points[i], &points[j]))?;
        Ok(Self::with_kind(Kind::Euclidean(points)))
    }

    pub fn linf(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        check_cloud(dim, &points)?;
        check_distinct(points.len(), |i, j| linf(&points[i], &points[j]))?;
        Ok(Self::with_kind(Kind::Linf(points)))
    }

    pub fn circle(circumference: f64, points: Vec<f64>) -> Result<Self> {
        if !(circumference.is_finite() && circumference > 0.0) {
            return Err(Error::InvalidDescriptor(format!(
                "circumference {circumference} must be positive"
            )));
        }
        if let Some(p) = points.iter().find(|p| !(0.0..circumference).contains(*p)) {
            return Err(Error::InvalidDescriptor(format!(
                "arc position {p} outside [0, {circumference})"
            )));
        }
        Ok(Self::with_kind(Kind::Circle { circumference, points }))
    }

    /// Sphere of radius `radius`; points are direction vectors, normalized
    /// if their length is within 1e-6 of one.
    pub fn sphere(radius: f64, points: Vec<Vec<f64>>) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidDescriptor(format!(
                "sphere radius {radius} must be positive"
            )));
        }
        check_cloud(3, &points)?;
        let mut unit = Vec::with_capacity(points.len());
        for (i, p) in points.into_iter().enumerate() {
            let len = p.iter().map(|v| v * v).sum::<f64>().sqrt();
            if (len - 1.0).abs() > 1e-6 {
                return Err(Error::InvalidDescriptor(format!(
                    "sphere point {i} has length {len}, expected a unit vector"
                )));
            }
            unit.push(p.into_iter().map(|v| v / len).collect::<Vec<_>>());
        }
        Ok(Self::with_kind(Kind::Sphere { radius, points: unit }))
    }

    pub fn hyperbolic_disk(points: Vec<Vec<f64>>) -> Result<Self> {
        check_cloud(2, &points)?;
        if let Some(i) = points.iter().position(|p| p[0] * p[0] + p[1] * p[1] >= 1.0) {
            return Err(Error::InvalidDescriptor(format!(
                "point {i} is not inside the open unit disk"
            )));
        }
        check_distinct(points.len(), |i, j| PoincareDisk::dist(&points[i], &points[j]))?;
        Ok(Self::with_kind(Kind::HyperbolicDisk(points)))
    }

    pub fn tree(tree: TreeSpace) -> Self {
        Self::with_kind(Kind::Tree(tree))
    }

    pub fn from_descriptor(desc: &SpaceDescriptor) -> Result<Self> {
        match desc {
            SpaceDescriptor::Finite { matrix } => Space::finite(matrix),
            SpaceDescriptor::Euclidean { dim, points } => {
                check_cloud(*dim, points)?;
                Space::euclidean(points.clone())
            }
            SpaceDescriptor::Linf { dim, points } => {
                check_cloud(*dim, points)?;
                Space::linf(points.clone())
            }
            SpaceDescriptor::Circle { circumference, points } => Space::circle(*circumference, points.clone()),
            SpaceDescriptor::Sphere { radius, points } => Space::sphere(*radius, points.clone()),
            SpaceDescriptor::HyperbolicDisk { points } => Space::hyperbolic_disk(points.clone()),
            SpaceDescriptor::Tree { nodes, edges, points } => Ok(Space::tree(TreeSpace::new(nodes, edges, points)?)),
        }
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            Kind::Finite(_) => "finite",
            Kind::Euclidean(_) => "euclidean",
            Kind::Linf(_) => "linf",
            Kind::Circle { .. } => "circle",
            Kind::Sphere { .. } => "sphere",
            Kind::HyperbolicDisk(_) => "hyperbolic-disk",
            Kind::Tree(_) => "tree",
        }
    }

    /// Ambient for model spaces, intrinsic for explicit matrices.
    pub fn default_mode(&self) -> WitnessMode {
        match self.kind {
            Kind::Finite(_) => WitnessMode::IntrinsicSample,
            _ => WitnessMode::Ambient,
        }
    }

    pub fn len(&self) -> usize {
        match &self.kind {
            Kind::Finite(m) => m.len(),
            Kind::Euclidean(p) | Kind::Linf(p) | Kind::HyperbolicDisk(p) => p.len(),
            Kind::Circle { points, .. } => points.len(),
            Kind::Sphere { points, .. } => points.len(),
            Kind::Tree(t) => t.marks().len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coordinates of a sample in a coordinate model (euclidean, linf,
    /// sphere, hyperbolic disk).
    pub fn coordinates(&self, i: usize) -> Option<&[f64]> {
        match &self.kind {
            Kind::Euclidean(p) | Kind::Linf(p) | Kind::HyperbolicDisk(p) => p.get(i).map(Vec::as_slice),
            Kind::Sphere { points, .. } => points.get(i).map(Vec::as_slice),
            _ => None,
        }
    }

    pub fn circumference(&self) -> Option<f64> {
        match self.kind {
            Kind::Circle { circumference, .. } => Some(circumference),
            _ => None,
        }
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: i,
                len: self.len(),
            })
        }
    }

    /// Distance between two sample points.
    pub fn distance(&self, p: usize, q: usize) -> Result<f64> {
        self.check_index(p)?;
        self.check_index(q)?;
        Ok(self.d(p, q))
    }

    #[inline]
    pub(crate) fn d(&self, p: usize, q: usize) -> f64 {
        if p == q {
            return 0.0;
        }
        match &self.kind {
            Kind::Finite(m) => m.get(p, q),
            Kind::Euclidean(pts) => euclid::dist(&pts[p], &pts[q]),
            Kind::Linf(pts) => linf(&pts[p], &pts[q]),
            Kind::Circle { circumference, points } => circle::arc_distance(points[p], points[q], *circumference),
            Kind::Sphere { radius, points } => radius * Sphere::angle(&points[p], &points[q]),
            Kind::HyperbolicDisk(pts) => PoincareDisk::dist(&pts[p], &pts[q]),
            Kind::Tree(t) => t.distance(t.marks()[p], t.marks()[q]),
        }
    }

    /// The location of sample `i`.
    pub fn location(&self, i: usize) -> Location {
        match &self.kind {
            Kind::Finite(_) => Location::Sample(i),
            Kind::Euclidean(p) | Kind::Linf(p) | Kind::HyperbolicDisk(p) => Location::Point(p[i].clone()),
            Kind::Sphere { points, .. } => Location::Point(points[i].clone()),
            Kind::Circle { points, .. } => Location::Arc(points[i]),
            Kind::Tree(t) => Location::Tree(t.marks()[i]),
        }
    }

    /// Distance from an arbitrary location to sample `i`.
    pub fn distance_to(&self, at: &Location, i: usize) -> f64 {
        match (at, &self.kind) {
            (Location::Sample(j), _) => self.d(*j, i),
            (Location::Point(x), Kind::Euclidean(p)) => euclid::dist(x, &p[i]),
            (Location::Point(x), Kind::Linf(p)) => linf(x, &p[i]),
            (Location::Point(x), Kind::HyperbolicDisk(p)) => PoincareDisk::dist(x, &p[i]),
            (Location::Point(x), Kind::Sphere { radius, points }) => radius * Sphere::angle(x, &points[i]),
            (Location::Arc(x), Kind::Circle { circumference, points }) => {
                circle::arc_distance(*x, points[i], *circumference)
            }
            (Location::Tree(x), Kind::Tree(t)) => t.distance(*x, t.marks()[i]),
            _ => f64::NAN,
        }
    }

    /// Pairwise distances restricted to `points`, in the given order.
    pub fn submetric(&self, points: &[usize]) -> Result<FiniteMetric> {
        for &p in points {
            self.check_index(p)?;
        }
        Ok(FiniteMetric::from_fn(points.len(), |i, j| self.d(points[i], points[j])))
    }

    pub fn diameter(&self, points: &[usize]) -> f64 {
        let mut best: f64 = 0.0;
        for (a, &p) in points.iter().enumerate() {
            for &q in &points[a + 1..] {
                best = best.max(self.d(p, q));
            }
        }
        best
    }

    /// JSON form of a location, using the descriptor's own vocabulary.
    pub fn location_json(&self, at: &Location) -> serde_json::Value {
        match at {
            Location::Sample(i) => json!({ "index": i }),
            Location::Point(x) => json!(x),
            Location::Arc(t) => json!(t),
            Location::Tree(p) => {
                let Kind::Tree(t) = &self.kind else {
                    return serde_json::Value::Null;
                };
                match *p {
                    TreePoint::Node(n) => serde_json::to_value(TreeMark::Node {
                        node: t.label(n).clone(),
                    })
                    .expect("tree mark serializes"),
                    TreePoint::Edge { edge, offset } => {
                        let e = t.edge(edge);
                        serde_json::to_value(TreeMark::Edge {
                            edge: (t.label(e.a).clone(), t.label(e.b).clone()),
                            offset,
                        })
                        .expect("tree mark serializes")
                    }
                }
            }
        }
    }

    fn validate_family(&self, centers: &[usize], values: &[f64]) -> Result<()> {
        if centers.is_empty() {
            return Err(Error::EmptyFamily);
        }
        if centers.len() != values.len() {
            return Err(Error::DomainMismatch(format!(
                "{} centers but {} radii",
                centers.len(),
                values.len()
            )));
        }
        for &c in centers {
            self.check_index(c)?;
        }
        Ok(())
    }

    // Coinciding centers collapse to one ball with the smallest radius.
    fn merge(&self, centers: &[usize], values: &[f64]) -> (Vec<usize>, Vec<f64>) {
        let mut kept: Vec<usize> = Vec::with_capacity(centers.len());
        let mut vals: Vec<f64> = Vec::with_capacity(centers.len());
        for (&c, &v) in centers.iter().zip(values) {
            match kept.iter().position(|&k| k == c || self.d(k, c) == 0.0) {
                Some(slot) => vals[slot] = vals[slot].min(v),
                None => {
                    kept.push(c);
                    vals.push(v);
                }
            }
        }
        (kept, vals)
    }

    fn unsupported(&self, mode: WitnessMode) -> Error {
        Error::UnsupportedMode {
            mode: mode.as_str(),
            kind: self.kind_name(),
        }
    }

    fn contains(&self, at: &Location, centers: &[usize], radii: &[f64]) -> bool {
        let eps = self.tol.intersect;
        centers
            .iter()
            .zip(radii)
            .all(|(&c, &r)| self.distance_to(at, c) <= r * (1.0 + eps))
    }

    /// Decides whether `⋂ B(centers[i], radii[i])` is nonempty and returns a
    /// witness when it is.
    pub fn balls_intersect(&self, centers: &[usize], radii: &[f64], mode: WitnessMode) -> Result<Intersection> {
        self.validate_family(centers, radii)?;
        if let Some(pos) = radii.iter().position(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(Error::DomainMismatch(format!(
                "radius {} at position {pos} is not a nonnegative number",
                radii[pos]
            )));
        }
        let (centers, radii) = self.merge(centers, radii);
        let hit = |w: Location| Intersection {
            nonempty: true,
            witness: Some(w),
        };
        let miss = Intersection {
            nonempty: false,
            witness: None,
        };
        if mode == WitnessMode::IntrinsicSample {
            return Ok((0..self.len())
                .map(Location::Sample)
                .find(|x| self.contains(x, &centers, &radii))
                .map_or(miss, hit));
        }
        if matches!(self.kind, Kind::Finite(_)) {
            return Err(self.unsupported(mode));
        }
        // a zero-radius ball is its center
        if let Some(z) = radii.iter().position(|&r| r == 0.0) {
            let at = self.location(centers[z]);
            return Ok(if self.contains(&at, &centers, &radii) {
                hit(at)
            } else {
                miss
            });
        }
        let eps = self.tol.intersect;
        Ok(match &self.kind {
            Kind::Finite(_) => unreachable!(),
            Kind::Linf(pts) => {
                // per-coordinate interval intersection, decided pairwise so
                // that it agrees bit-for-bit with edge tests on distances
                let n = centers.len();
                let ok =
                    (0..n).all(|i| (i + 1..n).all(|j| linf(&pts[centers[i]], &pts[centers[j]]) <= radii[i] + radii[j]));
                if ok {
                    hit(Location::Point(linf_witness(pts, &centers, &radii)))
                } else {
                    miss
                }
            }
            Kind::Tree(_) => {
                let n = centers.len();
                let ok = (0..n).all(|i| (i + 1..n).all(|j| self.d(centers[i], centers[j]) <= radii[i] + radii[j]));
                if ok {
                    hit(self.ambient_minimax(&centers, &radii).witness)
                } else {
                    miss
                }
            }
            Kind::Euclidean(_) => {
                let m = self.ambient_minimax(&centers, &radii);
                if m.value <= 1.0 + eps {
                    hit(m.witness)
                } else {
                    miss
                }
            }
            Kind::Circle { circumference, points } => {
                let c: Vec<f64> = centers.iter().map(|&i| points[i]).collect();
                circle::intersect(&c, &radii, *circumference, eps).map_or(miss, |x| hit(Location::Arc(x)))
            }
            Kind::Sphere { radius, points } => {
                let c: Vec<&[f64]> = centers.iter().map(|&i| points[i].as_slice()).collect();
                surface::find_witness(&Sphere { radius: *radius }, &c, &radii, eps)
                    .map_or(miss, |x| hit(Location::Point(x)))
            }
            Kind::HyperbolicDisk(pts) => {
                let c: Vec<&[f64]> = centers.iter().map(|&i| pts[i].as_slice()).collect();
                surface::find_witness(&PoincareDisk, &c, &radii, eps).map_or(miss, |x| hit(Location::Point(x)))
            }
        })
    }

    /// `inf_x max_i d(x, centers[i]) / weights[i]` with a minimizer.
    pub fn minimax_scaled_distance(&self, centers: &[usize], weights: &[f64], mode: WitnessMode) -> Result<Minimax> {
        self.validate_family(centers, weights)?;
        if let Some(position) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::NonPositiveWeight {
                position,
                value: weights[position],
            });
        }
        let (centers, weights) = self.merge(centers, weights);
        if mode == WitnessMode::IntrinsicSample {
            let (value, best) = (0..self.len())
                .map(|p| {
                    let v = centers
                        .iter()
                        .zip(&weights)
                        .map(|(&c, &w)| self.d(p, c) / w)
                        .fold(0.0, f64::max);
                    (v, p)
                })
                .fold((f64::INFINITY, 0), |acc, c| if c.0 < acc.0 { c } else { acc });
            return Ok(Minimax {
                value,
                witness: Location::Sample(best),
                attained: true,
            });
        }
        if matches!(self.kind, Kind::Finite(_)) {
            return Err(self.unsupported(mode));
        }
        if centers.len() == 1 {
            return Ok(Minimax {
                value: 0.0,
                witness: self.location(centers[0]),
                attained: true,
            });
        }
        Ok(self.ambient_minimax(&centers, &weights))
    }

    // merged family, positive weights, ambient model space
    fn ambient_minimax(&self, centers: &[usize], weights: &[f64]) -> Minimax {
        let tol = &self.tol;
        match &self.kind {
            Kind::Finite(_) => unreachable!("finite spaces have no ambient model"),
            Kind::Linf(pts) => {
                let mut t: f64 = 0.0;
                for i in 0..centers.len() {
                    for j in i + 1..centers.len() {
                        t = t.max(linf(&pts[centers[i]], &pts[centers[j]]) / (weights[i] + weights[j]));
                    }
                }
                let radii: Vec<f64> = weights.iter().map(|w| t * w).collect();
                Minimax {
                    value: t,
                    witness: Location::Point(linf_witness(pts, centers, &radii)),
                    attained: true,
                }
            }
            Kind::Tree(tree) => {
                let (mut t, mut pair) = (0.0, (0, 0));
                for i in 0..centers.len() {
                    for j in i + 1..centers.len() {
                        let r = self.d(centers[i], centers[j]) / (weights[i] + weights[j]);
                        if r > t {
                            t = r;
                            pair = (i, j);
                        }
                    }
                }
                let (i, j) = pair;
                let marks = tree.marks();
                let at = tree.point_along(marks[centers[i]], marks[centers[j]], t * weights[i]);
                Minimax {
                    value: t,
                    witness: Location::Tree(at),
                    attained: true,
                }
            }
            Kind::Euclidean(pts) => {
                let c: Vec<&[f64]> = centers.iter().map(|&i| pts[i].as_slice()).collect();
                let sol = euclid::weighted_minimax(&c, weights);
                Minimax {
                    value: sol.value,
                    witness: Location::Point(sol.point),
                    attained: true,
                }
            }
            Kind::Circle { circumference, points } => {
                let c: Vec<f64> = centers.iter().map(|&i| points[i]).collect();
                let (value, x) = circle::minimax(&c, weights, *circumference, tol.intersect);
                Minimax {
                    value,
                    witness: Location::Arc(x),
                    attained: true,
                }
            }
            Kind::Sphere { radius, points } => {
                let c: Vec<&[f64]> = centers.iter().map(|&i| points[i].as_slice()).collect();
                let (value, x) = surface::minimax(&Sphere { radius: *radius }, &c, weights, tol.search, tol.intersect);
                Minimax {
                    value,
                    witness: Location::Point(x),
                    attained: false,
                }
            }
            Kind::HyperbolicDisk(pts) => {
                let c: Vec<&[f64]> = centers.iter().map(|&i| pts[i].as_slice()).collect();
                let (value, x) = surface::minimax(&PoincareDisk, &c, weights, tol.search, tol.intersect);
                Minimax {
                    value,
                    witness: Location::Point(x),
                    attained: false,
                }
            }
        }
    }
}

fn linf_witness(pts: &[Vec<f64>], centers: &[usize], radii: &[f64]) -> Vec<f64> {
    let dim = pts[centers[0]].len();
    (0..dim)
        .map(|k| {
            let lo = centers
                .iter()
                .zip(radii)
                .map(|(&c, &r)| pts[c][k] - r)
                .fold(f64::NEG_INFINITY, f64::max);
            let hi = centers
                .iter()
                .zip(radii)
                .map(|(&c, &r)| pts[c][k] + r)
                .fold(f64::INFINITY, f64::min);
            lo.min(hi)
        })
        .collect()
}

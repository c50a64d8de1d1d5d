//! Per-triangle invariants: Gromov products, the λ-measure and λ classes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::metric::METRIC_TOLERANCE;
use crate::spaces::Space;

/// Side lengths of a triangle `x1 x2 x3`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangleSides {
    pub d12: f64,
    pub d13: f64,
    pub d23: f64,
}

impl TriangleSides {
    pub fn new(d12: f64, d13: f64, d23: f64) -> Self {
        TriangleSides { d12, d13, d23 }
    }

    /// Sides of the triangle on points `i, j, k` of `space`.
    pub fn from_space(space: &Space, i: usize, j: usize, k: usize) -> Result<Self> {
        Ok(TriangleSides {
            d12: space.distance(i, j)?,
            d13: space.distance(i, k)?,
            d23: space.distance(j, k)?,
        })
    }

    /// `[d12, d13, d23]`, the same order as [`Edge::ALL`].
    pub fn as_array(&self) -> [f64; 3] {
        [self.d12, self.d13, self.d23]
    }

    pub fn perimeter(&self) -> f64 {
        self.d12 + self.d13 + self.d23
    }

    pub fn largest(&self) -> f64 {
        self.d12.max(self.d13).max(self.d23)
    }
}

/// An edge of a triangle, by the positions of its endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Edge {
    E12,
    E13,
    E23,
}

impl Edge {
    pub const ALL: [Edge; 3] = [Edge::E12, Edge::E13, Edge::E23];

    /// Zero-based endpoint positions.
    pub fn endpoints(self) -> (usize, usize) {
        match self {
            Edge::E12 => (0, 1),
            Edge::E13 => (0, 2),
            Edge::E23 => (1, 2),
        }
    }

    /// Position in [`TriangleSides::as_array`].
    pub fn index(self) -> usize {
        self as usize
    }

    /// Position of the vertex not on this edge.
    pub fn opposite(self) -> usize {
        match self {
            Edge::E12 => 2,
            Edge::E13 => 1,
            Edge::E23 => 0,
        }
    }
}

/// Gromov products of a triangle: `r_i + r_j = d_ij` for every pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GromovRadii {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub sides: TriangleSides,
}

impl GromovRadii {
    pub fn as_array(&self) -> [f64; 3] {
        [self.r1, self.r2, self.r3]
    }

    pub fn min(&self) -> f64 {
        self.r1.min(self.r2).min(self.r3)
    }

    /// Collinear up to `rel_tol`: some product is below `rel_tol` times the
    /// perimeter.
    pub fn is_degenerate(&self, rel_tol: f64) -> bool {
        !(self.min() > rel_tol * self.sides.perimeter())
    }
}

/// `r1 = (d12 + d13 - d23) / 2` and cyclically.
pub fn gromov_products(sides: TriangleSides) -> Result<GromovRadii> {
    let TriangleSides { d12, d13, d23 } = sides;
    if sides.as_array().iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
        return Err(Error::TriangleInequalityViolated(d12, d13, d23));
    }
    let raw = [
        0.5 * (d12 + d13 - d23),
        0.5 * (d12 + d23 - d13),
        0.5 * (d13 + d23 - d12),
    ];
    if raw.iter().any(|&r| r < -0.5 * METRIC_TOLERANCE) {
        return Err(Error::TriangleInequalityViolated(d12, d13, d23));
    }
    let [r1, r2, r3] = raw.map(|r| r.max(0.0));
    Ok(GromovRadii { r1, r2, r3, sides })
}

/// λ with the edge realizing `λ·d_ij = d_ik + d_jk`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaMeasure {
    pub lambda: f64,
    pub argmax_edge: Edge,
}

/// `(sum of the two smallest sides) / (largest side)`, in `[1, 2]`.
pub fn lambda_measure(sides: TriangleSides) -> Result<LambdaMeasure> {
    let d = sides.as_array();
    let mut argmax = 0;
    for e in 1..3 {
        if d[e] > d[argmax] {
            argmax = e;
        }
    }
    let largest = d[argmax];
    if !(largest > 0.0) {
        return Err(Error::DegenerateAllZero);
    }
    let rest: f64 = (0..3).filter(|&e| e != argmax).map(|e| d[e]).sum();
    Ok(LambdaMeasure {
        lambda: (rest / largest).clamp(1.0, 2.0),
        argmax_edge: Edge::ALL[argmax],
    })
}

/// Closed interval `center ± half_width` of λ values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaBin {
    pub center: f64,
    pub half_width: f64,
}

impl LambdaBin {
    pub fn new(center: f64, half_width: f64) -> Self {
        LambdaBin { center, half_width }
    }

    pub fn contains(&self, lambda: f64) -> bool {
        (lambda - self.center).abs() <= self.half_width
    }
}

/// λ = 5/4, 6/4, 7/4 and 2, each ± 0.02.
pub fn default_bins() -> Vec<LambdaBin> {
    [1.25, 1.5, 1.75, 2.0]
        .into_iter()
        .map(|c| LambdaBin::new(c, 0.02))
        .collect()
}

/// Index of the first bin containing the triangle's λ.
pub fn classify_triple(sides: TriangleSides, bins: &[LambdaBin]) -> Option<usize> {
    let lambda = lambda_measure(sides).ok()?.lambda;
    bins.iter().position(|b| b.contains(lambda))
}

/// `(λ - 1)/2 · d_ij` for the longest edge `ij`: the Gromov product at the
/// opposite vertex.
pub fn smallest_product_from_lambda(sides: TriangleSides) -> Result<f64> {
    let m = lambda_measure(sides)?;
    Ok(0.5 * (m.lambda - 1.0) * sides.as_array()[m.argmax_edge.index()])
}

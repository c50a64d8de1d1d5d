//! The ρ functional on triples and tuples, its closed forms, and sampled
//! expansion constants.

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::extremal::{extremal_minorant, half_max_start, RadiusFunction};
use crate::par;
use crate::spaces::{Location, Space, WitnessMode};
use crate::triples::{gromov_products, GromovRadii, TriangleSides};

/// Radii a ρ value was computed against.
#[derive(Clone, Debug, PartialEq)]
pub enum RhoRadii {
    Gromov(GromovRadii),
    Function(RadiusFunction),
}

impl RhoRadii {
    pub fn values(&self) -> Vec<f64> {
        match self {
            RhoRadii::Gromov(g) => g.as_array().to_vec(),
            RhoRadii::Function(r) => r.values().to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RhoResult {
    pub rho: f64,
    pub witness: Location,
    pub radii: RhoRadii,
    /// The witness is certified to attain the infimum.
    pub attained: bool,
}

impl RhoResult {
    /// `{rho, witness, radii, attained}` with the witness in the space's
    /// own coordinates.
    pub fn to_json(&self, space: &Space) -> Value {
        json!({
            "rho": self.rho,
            "witness": space.location_json(&self.witness),
            "radii": self.radii.values(),
            "attained": self.attained,
        })
    }
}

/// `inf_x max_i d(x, x_i) / r_i` with the Gromov products as radii.
pub fn rho_triple(space: &Space, triple: [usize; 3], mode: WitnessMode) -> Result<RhoResult> {
    let [i, j, k] = triple;
    let g = gromov_products(TriangleSides::from_space(space, i, j, k)?)?;
    if g.is_degenerate(space.tolerances().degenerate) {
        return Err(Error::DegenerateTriple(i, j, k));
    }
    let m = space.minimax_scaled_distance(&triple, &g.as_array(), mode)?;
    Ok(RhoResult {
        rho: m.value,
        witness: m.witness,
        radii: RhoRadii::Gromov(g),
        attained: m.attained,
    })
}

/// ρ of a circle triple from its central angles `[∠12, ∠13, ∠23]` in
/// radians: `2π / (θ1 + θ2) - 1` for the two largest solutions of
/// `θ_i + θ_j = ∠ij`.
pub fn rho_circle_closed_form(angles: [f64; 3]) -> Result<f64> {
    let [a12, a13, a23] = angles;
    let unrealizable = |why: &str| Err(Error::UnrealizableAngles(format!("{angles:?}: {why}")));
    if angles.iter().any(|a| !(a.is_finite() && (0.0..=PI + 1e-9).contains(a))) {
        return unrealizable("central angles lie in [0, π]");
    }
    let mut theta = [
        0.5 * (a12 + a13 - a23),
        0.5 * (a12 + a23 - a13),
        0.5 * (a13 + a23 - a12),
    ];
    if theta.iter().any(|&t| t < -1e-9) {
        return unrealizable("negative θ");
    }
    theta.sort_by(|a, b| b.total_cmp(a));
    let sum = a12 + a13 + a23;
    if theta[2] <= 1e-12 * sum {
        return Err(Error::DegenerateTriple(0, 1, 2));
    }
    if (sum - 2.0 * PI).abs() > 1e-9 {
        return unrealizable("three points spanning the circle have angles summing to 2π");
    }
    Ok(2.0 * PI / (theta[0] + theta[1]) - 1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CircumcenterResult {
    pub center: [f64; 2],
    pub rho: f64,
    /// Angles at the center opposite `[x1, x2]` and `[x2, x3]`.
    pub alpha: f64,
    pub beta: f64,
    /// `d²(x_i, x_j) - ρ²(r_i² + r_j² - 2 r_i r_j cos φ_ij)` for the pairs
    /// 12, 23, 13, where `φ_12 = α`, `φ_23 = β` and `cos φ_13 = cos(α + β)`.
    pub residuals: [f64; 3],
}

/// The weighted circumcenter of a plane triple: the point at distance
/// `ρ·r_i` from every `x_i`.
pub fn weighted_circumcenter_euclidean(x: [[f64; 2]; 3]) -> Result<CircumcenterResult> {
    let space =
        Space::euclidean(x.iter().map(|p| p.to_vec()).collect()).map_err(|_| Error::DegenerateTriple(0, 1, 2))?;
    let res = rho_triple(&space, [0, 1, 2], WitnessMode::Ambient)?;
    let Location::Point(c) = &res.witness else {
        unreachable!("euclidean witnesses are points")
    };
    let center = [c[0], c[1]];
    let r = res.radii.values();
    let angle = |a: usize, b: usize| {
        let u = [x[a][0] - center[0], x[a][1] - center[1]];
        let v = [x[b][0] - center[0], x[b][1] - center[1]];
        (u[0] * v[1] - u[1] * v[0]).abs().atan2(u[0] * v[0] + u[1] * v[1])
    };
    let (alpha, beta) = (angle(0, 1), angle(1, 2));
    let rho2 = res.rho * res.rho;
    let eq = |a: usize, b: usize, cos: f64| {
        let d2 = (x[a][0] - x[b][0]).powi(2) + (x[a][1] - x[b][1]).powi(2);
        d2 - rho2 * (r[a] * r[a] + r[b] * r[b] - 2.0 * r[a] * r[b] * cos)
    };
    Ok(CircumcenterResult {
        center,
        rho: res.rho,
        alpha,
        beta,
        residuals: [
            eq(0, 1, alpha.cos()),
            eq(1, 2, beta.cos()),
            eq(0, 2, (alpha + beta).cos()),
        ],
    })
}

/// Extra sweep orders tried by automatic tuple radii.
const AUTO_ORDERS: usize = 4;
const AUTO_SEED: u64 = 0x5eed;

/// ρ of a tuple against `radii`, or against automatic extremal radii: the
/// Gromov products for triples, otherwise the largest ρ over extremal
/// minorants of the half-max start in index order and a few seeded orders.
pub fn rho_tuple(space: &Space, pts: &[usize], radii: Option<&RadiusFunction>, mode: WitnessMode) -> Result<RhoResult> {
    rho_tuple_seeded(space, pts, radii, mode, AUTO_SEED)
}

pub(crate) fn rho_tuple_seeded(
    space: &Space,
    pts: &[usize],
    radii: Option<&RadiusFunction>,
    mode: WitnessMode,
    seed: u64,
) -> Result<RhoResult> {
    if pts.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let floor = space.tolerances().degenerate * space.diameter(pts);
    let degenerate = |r: &RadiusFunction| {
        r.values()
            .iter()
            .position(|&v| !(v > floor))
            .map(|pos| Error::DegenerateTuple {
                point: r.points()[pos],
                radius: r.values()[pos],
            })
    };
    let evaluate = |r: RadiusFunction| -> Result<RhoResult> {
        let m = space.minimax_scaled_distance(r.points(), r.values(), mode)?;
        Ok(RhoResult {
            rho: m.value,
            witness: m.witness,
            radii: RhoRadii::Function(r),
            attained: m.attained,
        })
    };
    if let Some(r) = radii {
        let values = pts
            .iter()
            .map(|p| match r.points().iter().position(|q| q == p) {
                Some(pos) => Ok(r.get(pos)),
                None => Err(Error::DomainMismatch(format!("no radius for point {p}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let r = RadiusFunction::new(pts.to_vec(), values)?;
        if let Some(e) = degenerate(&r) {
            return Err(e);
        }
        return evaluate(r);
    }
    if let [i, j, k] = *pts {
        return rho_triple(space, [i, j, k], mode).map_err(|e| match e {
            Error::DegenerateTriple(..) => {
                let g = gromov_products(TriangleSides::from_space(space, i, j, k).expect("indices checked"))
                    .expect("a metric triangle");
                let pos = (0..3)
                    .min_by(|&a, &b| g.as_array()[a].total_cmp(&g.as_array()[b]))
                    .unwrap_or(0);
                Error::DegenerateTuple {
                    point: pts[pos],
                    radius: g.as_array()[pos],
                }
            }
            e => e,
        });
    }
    let start = half_max_start(space, pts)?;
    let tol = space.tolerances().extremal;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut orders = vec![(0..pts.len()).collect::<Vec<_>>()];
    for _ in 0..AUTO_ORDERS {
        let mut o = orders[0].clone();
        o.shuffle(&mut rng);
        orders.push(o);
    }
    let mut best: Option<RhoResult> = None;
    let mut first_error = None;
    for order in &orders {
        let r = extremal_minorant(space, &start, order, tol)?;
        if let Some(e) = degenerate(&r) {
            first_error.get_or_insert(e);
            continue;
        }
        let res = evaluate(r)?;
        if best.as_ref().is_none_or(|b| res.rho > b.rho) {
            best = Some(res);
        }
    }
    best.ok_or_else(|| first_error.expect("at least one order"))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpansionEstimate {
    /// Largest sampled ρ, or 1 when no tuple could be evaluated.
    pub mu_hat: f64,
    pub arity_max: usize,
    pub argmax_tuple: Vec<usize>,
    pub evaluated: usize,
    /// Tuples skipped because every extremal radius choice had a zero radius.
    pub skipped: usize,
}

/// Sampled lower bound for the expansion constant: the largest `rho_tuple`
/// over `n_tuples` seeded random tuples of arity `3..=arity_max`.
pub fn expansion_constant_estimate(
    space: &Space,
    sample: &[usize],
    arity_max: usize,
    n_tuples: usize,
    seed: u64,
    mode: WitnessMode,
) -> Result<ExpansionEstimate> {
    if sample.len() < 3 {
        return Err(Error::SampleTooSmall {
            found: sample.len(),
            needed: 3,
        });
    }
    if arity_max < 3 {
        return Err(Error::DomainMismatch(format!("arity_max {arity_max} is below 3")));
    }
    for &p in sample {
        space.distance(p, p)?;
    }
    let top = arity_max.min(sample.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tuples: Vec<(Vec<usize>, u64)> = (0..n_tuples)
        .map(|_| {
            let k = rng.gen_range(3..=top);
            let mut t: Vec<usize> = sample.choose_multiple(&mut rng, k).copied().collect();
            t.sort_unstable();
            (t, rng.gen())
        })
        .collect();
    let results = par::map(&tuples, |(t, s)| {
        rho_tuple_seeded(space, t, None, mode, *s).map(|r| r.rho)
    });
    let mut est = ExpansionEstimate {
        mu_hat: 1.0,
        arity_max: top,
        argmax_tuple: Vec::new(),
        evaluated: 0,
        skipped: 0,
    };
    let mut best = f64::NEG_INFINITY;
    for ((t, _), res) in tuples.iter().zip(results) {
        match res {
            Ok(rho) => {
                est.evaluated += 1;
                if rho > best {
                    best = rho;
                    est.argmax_tuple = t.clone();
                }
            }
            Err(Error::DegenerateTuple { .. }) => est.skipped += 1,
            Err(e) => return Err(e),
        }
    }
    if est.evaluated > 0 {
        est.mu_hat = best;
    }
    Ok(est)
}

/// `(3/r) · min_x max_i d(x, x_i)` for an equilateral triple with half
/// perimeter `r`.
pub fn rho_profile_value_x2(space: &Space, triple: [usize; 3], mode: WitnessMode) -> Result<f64> {
    let [i, j, k] = triple;
    let s = TriangleSides::from_space(space, i, j, k)?;
    let (lo, hi) = (s.d12.min(s.d13).min(s.d23), s.largest());
    if !(hi > 0.0) || hi - lo > 1e-9 * hi {
        return Err(Error::NotEquilateral(s.d12, s.d13, s.d23));
    }
    let r = 0.5 * s.perimeter();
    let m = space.minimax_scaled_distance(&triple, &[1.0; 3], mode)?;
    Ok(3.0 / r * m.value)
}

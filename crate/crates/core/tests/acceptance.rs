//! Acceptance suite: one PASS/FAIL line per criterion. The exit status is
//! nonzero when a criterion fails that is not listed in `KNOWN_RED`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hypercech::complexes::{
    cech_filtration, check_inclusions, vr_filtration, Filtered, FilteredComplex, Schedule, Simplex,
};
use hypercech::extremal::{extremal_minorant, half_max_start, is_extremal, RadiusFunction};
use hypercech::persistence::{betti_bruteforce, compute_persistence};
use hypercech::rho::{rho_circle_closed_form, rho_triple};
use hypercech::spaces::descriptor::{NodeId, TreeMark};
use hypercech::spaces::tree::TreeSpace;
use hypercech::triples::{gromov_products, lambda_measure, smallest_product_from_lambda, TriangleSides};
use hypercech::{Space, WitnessMode};

type Outcome = Result<String, String>;

const AMBIENT: WitnessMode = WitnessMode::Ambient;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Debug>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| format!("{e:?}"))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn equilateral(a: f64) -> Space {
    Space::euclidean(vec![vec![0.0, 0.0], vec![a, 0.0], vec![0.5 * a, a * 3f64.sqrt() / 2.0]]).unwrap()
}

fn two_over_root3() -> f64 {
    2.0 / 3f64.sqrt()
}

fn births(f: &FilteredComplex, dim: usize) -> Vec<f64> {
    f.entries()
        .iter()
        .filter(|e| e.simplex.dim() == dim)
        .map(|e| e.birth)
        .collect()
}

fn c1_equilateral_thresholds() -> Outcome {
    let f = ok(cech_filtration(
        &equilateral(1.0),
        &[0, 1, 2],
        &Schedule::Uniform,
        AMBIENT,
        2,
        None,
    ))?;
    let edges = births(&f, 1);
    let tri = births(&f, 2);
    ensure!(
        edges.len() == 3 && edges.iter().all(|&b| close(b, 0.5, 1e-9)),
        "edge births {edges:?}"
    );
    ensure!(
        tri.len() == 1 && close(tri[0], 1.0 / 3f64.sqrt(), 1e-9),
        "triangle birth {tri:?}"
    );
    Ok(format!("edges {:.12}, triangle {:.12}", edges[0], tri[0]))
}

fn c2_rho_closed_forms() -> Outcome {
    let e = ok(rho_triple(&equilateral(1.0), [0, 1, 2], AMBIENT))?.rho;
    ensure!(close(e, two_over_root3(), 1e-9), "euclidean {e}");

    // dyadic edge lengths keep every tree distance exact
    let id = NodeId::Int;
    let tree = ok(TreeSpace::new(
        &[id(0), id(1), id(2), id(3), id(4), id(5)],
        &[
            (id(0), id(1), 0.75),
            (id(0), id(2), 1.5),
            (id(0), id(4), 0.25),
            (id(4), id(3), 2.125),
            (id(4), id(5), 0.625),
        ],
        &[1, 2, 3, 5].map(|n| TreeMark::Node { node: id(n) }),
    ))?;
    let tree = Space::tree(tree);
    for t in [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]] {
        let r = ok(rho_triple(&tree, t, AMBIENT))?.rho;
        ensure!(r == 1.0, "tree {t:?}: {r}");
    }

    let circle = ok(Space::circle(1.0, vec![0.0, 1.0 / 3.0, 2.0 / 3.0]))?;
    let c = ok(rho_triple(&circle, [0, 1, 2], AMBIENT))?.rho;
    ensure!(close(c, 2.0, 1e-9), "circle {c}");

    let sphere_pts = (0..3)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / 3.0;
            vec![t.cos(), t.sin(), 0.0]
        })
        .collect();
    let sphere = ok(Space::sphere(1.0, sphere_pts))?;
    let s = ok(rho_triple(&sphere, [0, 1, 2], AMBIENT))?.rho;
    ensure!(close(s, 1.5, 1e-6), "sphere {s}");
    Ok(format!("euclid {e:.12}, tree 1, circle {c:.12}, sphere {s:.9}"))
}

fn c3_circle_barcode() -> Outcome {
    let circle = ok(Space::circle(1.0, vec![0.0, 1.0 / 3.0, 2.0 / 3.0]))?;
    let f = ok(cech_filtration(
        &circle,
        &[0, 1, 2],
        &Schedule::Uniform,
        AMBIENT,
        2,
        None,
    ))?;
    let b = ok(compute_persistence(&f, 1))?;
    let h1: Vec<_> = b.bars(1).collect();
    ensure!(h1.len() == 1, "{} H1 bars", h1.len());
    ensure!(
        close(h1[0].birth, 1.0 / 6.0, 1e-12) && close(h1[0].death, 1.0 / 3.0, 1e-12),
        "bar [{}, {})",
        h1[0].birth,
        h1[0].death
    );
    let v = ok(vr_filtration(&circle, &[0, 1, 2], &Schedule::Uniform, 2, None))?;
    let vb = ok(compute_persistence(&v, 1))?;
    ensure!(vb.positive(1).count() == 0, "Rips has a positive H1 bar");
    Ok(format!("H1 [{:.15}, {:.15}), Rips H1 empty", h1[0].birth, h1[0].death))
}

fn c4_circle_angle_formula() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < 200 {
        // three gaps summing to 2π, each below π
        let mut cuts = [rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI)];
        cuts.sort_by(f64::total_cmp);
        let gaps = [cuts[0], cuts[1] - cuts[0], 2.0 * PI - cuts[1]];
        if gaps.iter().any(|&g| g >= PI - 1e-3 || g <= 1e-3) {
            continue;
        }
        let space = ok(Space::circle(2.0 * PI, vec![0.0, cuts[0], cuts[1]]))?;
        let angles = [
            ok(space.distance(0, 1))?,
            ok(space.distance(0, 2))?,
            ok(space.distance(1, 2))?,
        ];
        let closed = ok(rho_circle_closed_form(angles))?;
        let minimax = ok(rho_triple(&space, [0, 1, 2], AMBIENT))?.rho;
        ensure!(close(closed, minimax, 1e-6), "angles {angles:?}: {closed} vs {minimax}");
        worst = worst.max((closed - minimax).abs());
        done += 1;
    }
    Ok(format!("200 triples, max gap {worst:.2e}"))
}

fn c5_hyperconvex_triviality() -> Outcome {
    let mut positive = [0usize; 3];
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(500 + seed);
        let pts: Vec<Vec<f64>> = (0..12)
            .map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
            .collect();
        let space = ok(Space::linf(pts))?;
        let base: Vec<usize> = (0..12).collect();
        let c = ok(cech_filtration(&space, &base, &Schedule::Uniform, AMBIENT, 3, None))?;
        let v = ok(vr_filtration(&space, &base, &Schedule::Uniform, 3, None))?;
        let cb = c.birth_map();
        let vb = v.birth_map();
        ensure!(
            cb.len() == vb.len(),
            "seed {seed}: {} Čech vs {} Rips simplices",
            cb.len(),
            vb.len()
        );
        for (s, b) in &cb {
            ensure!(vb.get(s) == Some(b), "seed {seed}: {s} born {b} vs {:?}", vb.get(s));
        }
        let bars = ok(compute_persistence(&c, 2))?;
        for p in bars.pairs.iter().filter(|p| !p.is_zero_length()) {
            positive[p.dim] += 1;
        }
    }
    ensure!(
        positive[1] + positive[2] == 0,
        "births identical on all 20 clouds, but {} H1 and {} H2 bars have positive length",
        positive[1],
        positive[2]
    );
    Ok("20 clouds, births identical, no positive bars above dimension 0".into())
}

fn c6_lambda_machinery() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..1000 {
        // integer Gromov products give integer sides
        let (a, b, c): (i64, i64, i64) = (rng.gen_range(0..1000), rng.gen_range(0..1000), rng.gen_range(1..1000));
        let mut sides = [a + b, a + c, b + c];
        sides.shuffle(&mut rng);
        let t = TriangleSides::new(sides[0] as f64, sides[1] as f64, sides[2] as f64);
        let mut sorted = sides;
        sorted.sort();
        let exact = Ratio::new(sorted[0] + sorted[1], sorted[2]);
        let lambda = ok(lambda_measure(t))?.lambda;
        let want = *exact.numer() as f64 / *exact.denom() as f64;
        ensure!(lambda == want, "sides {sides:?}: λ {lambda} vs {want}");

        // (λ - 1)/2 · longest is the smallest Gromov product, in exact arithmetic
        let products = [
            Ratio::new(sides[0] + sides[1] - sides[2], 2),
            Ratio::new(sides[0] + sides[2] - sides[1], 2),
            Ratio::new(sides[1] + sides[2] - sides[0], 2),
        ];
        let smallest = *products.iter().min().unwrap();
        let identity = (exact - 1) / 2 * Ratio::from_integer(sorted[2]);
        ensure!(identity == smallest, "sides {sides:?}: {identity} vs {smallest}");
        let g = ok(gromov_products(t))?;
        ensure!(
            g.min() == *smallest.numer() as f64 / *smallest.denom() as f64,
            "sides {sides:?}: min product {}",
            g.min()
        );
        let rk = ok(smallest_product_from_lambda(t))?;
        ensure!(
            close(rk, g.min(), 4.0 * f64::EPSILON * sorted[2] as f64),
            "sides {sides:?}: {rk} vs {}",
            g.min()
        );
    }
    Ok("1000 integer triangles".into())
}

fn c7_inclusion_lemma() -> Outcome {
    let mut worst_e: f64 = 0.0;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(700 + seed);
        let n = rng.gen_range(3..=10);
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
            .collect();
        let space = ok(Space::euclidean(pts))?;
        worst_e = worst_e.max(inclusion_ratio(
            &space,
            n,
            two_over_root3(),
            &format!("euclidean seed {seed}"),
        )?);
    }
    let mut worst_c: f64 = 0.0;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(750 + seed);
        let n = rng.gen_range(3..=10);
        let mut pos: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        pos.sort_by(f64::total_cmp);
        pos.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
        let n = pos.len();
        let space = ok(Space::circle(1.0, pos))?;
        worst_c = worst_c.max(inclusion_ratio(&space, n, 2.0, &format!("circle seed {seed}"))?);
    }
    Ok(format!(
        "max Čech/Rips ratio {worst_e:.9} (plane), {worst_c:.9} (circle)"
    ))
}

/// Checks `vr ≤ cech ≤ mu · vr + 1e-9` on every triangle; returns the
/// largest ratio seen.
fn inclusion_ratio(space: &Space, n: usize, mu: f64, label: &str) -> Result<f64, String> {
    let base: Vec<usize> = (0..n).collect();
    let c = ok(cech_filtration(
        space,
        &base,
        &Schedule::Uniform,
        AMBIENT,
        2,
        Some(f64::MAX),
    ))?;
    let v = ok(vr_filtration(space, &base, &Schedule::Uniform, 2, Some(f64::MAX)))?;
    let cb = c.birth_map();
    let mut worst: f64 = 0.0;
    let mut triangles = 0;
    for e in v.entries().iter().filter(|e| e.simplex.dim() == 2) {
        let bc = *cb
            .get(&e.simplex)
            .ok_or(format!("{label}: {} missing from Čech", e.simplex))?;
        ensure!(
            e.birth <= bc && bc <= mu * e.birth + 1e-9,
            "{label}: {} Rips {} Čech {bc}",
            e.simplex,
            e.birth
        );
        worst = worst.max(bc / e.birth);
        triangles += 1;
    }
    ensure!(triangles == n * (n - 1) * (n - 2) / 6, "{label}: {triangles} triangles");
    let report = ok(check_inclusions(&c, &v, mu, 1e-9, Some(2)))?;
    ensure!(report.ok(), "{label}: {:?}", report.violations);
    Ok(worst)
}

/// Downward-closed filtration on at most 8 vertices with births on a
/// coarse grid, so ties are frequent.
fn random_filtration(seed: u64) -> FilteredComplex {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=8);
    let dim_cap = rng.gen_range(1..=3);
    let keep = rng.gen_range(0.3..1.0);
    let mut born: std::collections::HashMap<Simplex, f64> = std::collections::HashMap::new();
    for mask in 1u32..(1 << n) {
        let v: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        if v.len() > dim_cap + 1 {
            continue;
        }
        let s = Simplex::new(v.clone()).unwrap();
        let facets: Option<Vec<f64>> = s.facets().map(|f| born.get(&f).copied()).collect();
        let Some(facets) = facets else { continue };
        if v.len() == 1 || rng.gen_bool(keep) {
            let floor = facets.into_iter().fold(0.0, f64::max);
            born.insert(s, floor + f64::from(rng.gen_range(0u8..3)) * 0.25);
        }
    }
    let entries = born
        .into_iter()
        .map(|(simplex, birth)| Filtered { simplex, birth })
        .collect();
    FilteredComplex::new(entries, dim_cap).unwrap()
}

fn c8_persistence_oracle() -> Outcome {
    let mut probes = 0;
    for seed in 0..50u64 {
        let f = random_filtration(800 + seed);
        let b = ok(compute_persistence(&f, f.dim_cap))?;
        let mut grid: Vec<f64> = f.entries().iter().map(|e| e.birth).collect();
        grid.dedup();
        let last = *grid.last().unwrap();
        grid.extend(grid.clone().windows(2).map(|w| 0.5 * (w[0] + w[1])));
        grid.push(last + 1.0);
        for t in grid {
            let slice = f.slice_at(t);
            for d in 0..f.dim_cap {
                let want = ok(betti_bruteforce(&slice, d))?;
                let got = b.rank_at(d, t);
                ensure!(got == want, "seed {seed}, dim {d}, t {t}: bars {got}, oracle {want}");
                probes += 1;
            }
        }
    }
    Ok(format!("50 filtrations, {probes} rank checks"))
}

fn c9_extremal_functions() -> Outcome {
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(900 + seed);
        let n = rng.gen_range(2..=12);
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let matrix: Vec<Vec<f64>> = pts
            .iter()
            .map(|p| {
                pts.iter()
                    .map(|q| p.iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
                    .collect()
            })
            .collect();
        let space = ok(Space::finite(&matrix))?;
        let points: Vec<usize> = (0..n).collect();
        let start = if rng.gen_bool(0.5) {
            ok(half_max_start(&space, &points))?
        } else {
            ok(RadiusFunction::new(
                points.clone(),
                (0..n).map(|_| rng.gen_range(2.0..4.0)).collect(),
            ))?
        };
        let mut order = points.clone();
        order.shuffle(&mut rng);
        let r = ok(extremal_minorant(&space, &start, &order, 1e-12))?;
        ensure!(ok(is_extremal(&space, &r, 1e-10))?, "seed {seed}: not extremal");
        let v = r.values();
        for x in 0..n {
            ensure!(v[x] <= start.values()[x], "seed {seed}: r({x}) grew");
            let mut tight = false;
            for y in 0..n {
                let d = matrix[x][y];
                ensure!(
                    (v[x] - v[y]).abs() <= d + 1e-10,
                    "seed {seed}: not 1-Lipschitz at ({x},{y})"
                );
                ensure!(v[x] + v[y] >= d - 1e-10, "seed {seed}: not admissible at ({x},{y})");
                tight |= (v[x] + v[y] - d).abs() <= 1e-10;
            }
            ensure!(tight, "seed {seed}: {x} has no tight partner");
        }
    }
    Ok("100 metrics".into())
}

fn c10_hyperbolic_profile() -> Outcome {
    let sides = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0f64];
    let mut rhos = Vec::new();
    for a in sides {
        let rc = ((0.5 * a).sinh() / (PI / 3.0).sin()).asinh();
        let e = (0.5 * rc).tanh();
        let pts = (0..3)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / 3.0;
                vec![e * t.cos(), e * t.sin()]
            })
            .collect();
        let space = ok(Space::hyperbolic_disk(pts))?;
        rhos.push(ok(rho_triple(&space, [0, 1, 2], AMBIENT))?.rho);
    }
    ensure!(rhos.windows(2).all(|w| w[1] < w[0]), "not decreasing: {rhos:?}");
    ensure!(close(rhos[0], two_over_root3(), 2e-3), "starts at {}", rhos[0]);
    ensure!(*rhos.last().unwrap() < 1.05, "ends at {}", rhos.last().unwrap());
    let shown: Vec<String> = rhos.iter().map(|r| format!("{r:.6}")).collect();
    Ok(format!("ρ = [{}]", shown.join(", ")))
}

/// Criteria that cannot hold as stated, with the reason. They still print
/// FAIL; the run only fails if one of them starts passing or any other
/// criterion fails.
const KNOWN_RED: [(u8, &str); 1] = [(
    5,
    "finite ℓ∞ samples can have holes: the 8-point square ring at radius 1 leaves (2,2) uncovered, giving an H1 bar [1, 2)",
)];

struct Criterion {
    id: u8,
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria = [
        Criterion {
            id: 1,
            name: "Euclidean equilateral thresholds",
            budget: secs(1),
            run: c1_equilateral_thresholds,
        },
        Criterion {
            id: 2,
            name: "rho closed forms",
            budget: secs(5),
            run: c2_rho_closed_forms,
        },
        Criterion {
            id: 3,
            name: "circle barcode",
            budget: secs(1),
            run: c3_circle_barcode,
        },
        Criterion {
            id: 4,
            name: "circle angle formula",
            budget: None,
            run: c4_circle_angle_formula,
        },
        Criterion {
            id: 5,
            name: "hyperconvex triviality",
            budget: secs(30),
            run: c5_hyperconvex_triviality,
        },
        Criterion {
            id: 6,
            name: "lambda machinery",
            budget: None,
            run: c6_lambda_machinery,
        },
        Criterion {
            id: 7,
            name: "inclusion lemma",
            budget: None,
            run: c7_inclusion_lemma,
        },
        Criterion {
            id: 8,
            name: "persistence oracle equivalence",
            budget: None,
            run: c8_persistence_oracle,
        },
        Criterion {
            id: 9,
            name: "extremal functions",
            budget: None,
            run: c9_extremal_functions,
        },
        Criterion {
            id: 10,
            name: "hyperbolic profile shape",
            budget: secs(60),
            run: c10_hyperbolic_profile,
        },
    ];
    let mut failed = 0;
    let mut unexpected = 0;
    for c in &criteria {
        let known = KNOWN_RED.iter().find(|(id, _)| *id == c.id).map(|(_, why)| *why);
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let took = start.elapsed();
        let result = match (result, c.budget) {
            (Ok(_), Some(b)) if took > b => Err(format!("took {took:.2?}, budget {b:?}")),
            (r, _) => r,
        };
        match result {
            Ok(detail) => {
                println!("PASS [{:>2}] {} ({took:.2?}): {detail}", c.id, c.name);
                if known.is_some() {
                    unexpected += 1;
                    println!("       listed as known red; update KNOWN_RED");
                }
            }
            Err(why) => {
                failed += 1;
                println!("FAIL [{:>2}] {} ({took:.2?}): {why}", c.id, c.name);
                match known {
                    Some(reason) => println!("       known red: {reason}"),
                    None => unexpected += 1,
                }
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if unexpected > 0 {
        std::process::exit(1);
    }
}

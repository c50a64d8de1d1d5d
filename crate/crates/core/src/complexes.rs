//! Čech and Vietoris-Rips slices and filtrations over finite point lists.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extremal::RadiusFunction;
use crate::par;
use crate::spaces::{Space, WitnessMode};

/// Largest supported simplex dimension.
pub const MAX_DIM_CAP: usize = 5;

/// A simplex on strictly increasing point indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(Vec<usize>);

impl Simplex {
    /// Sorts `vertices`; repeated or missing vertices are an error.
    pub fn new(mut vertices: Vec<usize>) -> Result<Self> {
        vertices.sort_unstable();
        if vertices.is_empty() || vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidFiltration(format!("{vertices:?} is not a simplex")));
        }
        Ok(Simplex(vertices))
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// Codimension-one faces, in the order obtained by dropping each vertex.
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        let n = if self.0.len() > 1 { self.0.len() } else { 0 };
        (0..n).map(move |skip| {
            Simplex(
                self.0
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v)
                    .collect(),
            )
        })
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Cech,
    Vr,
}

/// One slice: a fixed radius per base point.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceComplex {
    pub base_points: Vec<usize>,
    /// Absent when the slice was cut from a filtration read back from CSV.
    pub radius_fn: Option<RadiusFunction>,
    pub flavor: Flavor,
    pub dim_cap: usize,
    simplices: BTreeSet<Simplex>,
}

impl SliceComplex {
    /// A slice from an explicit simplex list, checked for downward closure.
    pub fn from_simplices(
        base_points: Vec<usize>,
        radius_fn: Option<RadiusFunction>,
        flavor: Flavor,
        dim_cap: usize,
        simplices: impl IntoIterator<Item = Simplex>,
    ) -> Result<Self> {
        let s = SliceComplex {
            base_points,
            radius_fn,
            flavor,
            dim_cap,
            simplices: simplices.into_iter().collect(),
        };
        if let Some(bad) = s
            .simplices
            .iter()
            .find(|x| x.facets().any(|f| !s.simplices.contains(&f)))
        {
            return Err(Error::InvalidFiltration(format!("facet of {bad} is missing")));
        }
        Ok(s)
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.simplices.contains(s)
    }

    /// Simplices in (dimension, lexicographic) order.
    pub fn simplices(&self) -> Vec<&Simplex> {
        let mut v: Vec<&Simplex> = self.simplices.iter().collect();
        v.sort_by(|a, b| a.dim().cmp(&b.dim()).then_with(|| a.cmp(b)));
        v
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn count(&self, dim: usize) -> usize {
        self.simplices.iter().filter(|s| s.dim() == dim).count()
    }

    pub fn top_dim(&self) -> Option<usize> {
        self.simplices.iter().map(Simplex::dim).max()
    }
}

/// How radii grow with the filtration parameter `t`.
#[derive(Clone, Debug, PartialEq)]
pub enum Schedule {
    /// Every ball has radius `t`.
    Uniform,
    /// Ball `i` has radius `t · w(i)`.
    Weighted(RadiusFunction),
}

impl Schedule {
    pub fn name(&self) -> &'static str {
        match self {
            Schedule::Uniform => "uniform",
            Schedule::Weighted(_) => "weighted",
        }
    }

    /// Per-point weights in the order of `points`.
    fn weights(&self, points: &[usize]) -> Result<Vec<f64>> {
        match self {
            Schedule::Uniform => Ok(vec![1.0; points.len()]),
            Schedule::Weighted(w) => points
                .iter()
                .enumerate()
                .map(|(position, p)| match w.points().iter().position(|q| q == p) {
                    Some(k) if w.get(k) > 0.0 => Ok(w.get(k)),
                    Some(k) => Err(Error::NonPositiveWeight {
                        position,
                        value: w.get(k),
                    }),
                    None => Err(Error::DomainMismatch(format!("no weight for point {p}"))),
                })
                .collect(),
        }
    }
}

/// A simplex with its birth scale.
#[derive(Clone, Debug, PartialEq)]
pub struct Filtered {
    pub simplex: Simplex,
    pub birth: f64,
}

/// Simplices sorted by (birth, dimension, vertices).
#[derive(Clone, Debug, PartialEq)]
pub struct FilteredComplex {
    pub base_points: Vec<usize>,
    /// Absent for filtrations read back from CSV.
    pub schedule: Option<Schedule>,
    pub flavor: Option<Flavor>,
    pub dim_cap: usize,
    /// Births above this cutoff were left out, when known.
    pub t_max: Option<f64>,
    entries: Vec<Filtered>,
}

impl FilteredComplex {
    /// Sorts `entries` into filtration order; births must be finite and
    /// nonnegative, and every facet must be present and born no later.
    pub fn new(entries: Vec<Filtered>, dim_cap: usize) -> Result<Self> {
        let mut base: BTreeSet<usize> = BTreeSet::new();
        let mut births: HashMap<&Simplex, f64> = HashMap::with_capacity(entries.len());
        for e in &entries {
            if !(e.birth.is_finite() && e.birth >= 0.0) {
                return Err(Error::InvalidFiltration(format!("{} has birth {}", e.simplex, e.birth)));
            }
            if births.insert(&e.simplex, e.birth).is_some() {
                return Err(Error::InvalidFiltration(format!("{} listed twice", e.simplex)));
            }
            base.extend(e.simplex.vertices());
        }
        for e in &entries {
            for f in e.simplex.facets() {
                match births.get(&f) {
                    None => {
                        return Err(Error::InvalidFiltration(format!(
                            "facet {f} of {} is missing",
                            e.simplex
                        )))
                    }
                    Some(&b) if b > e.birth => {
                        return Err(Error::InvalidFiltration(format!(
                            "facet {f} born at {b} after {} at {}",
                            e.simplex, e.birth
                        )))
                    }
                    _ => {}
                }
            }
        }
        let mut f = FilteredComplex {
            base_points: base.into_iter().collect(),
            schedule: None,
            flavor: None,
            dim_cap,
            t_max: None,
            entries,
        };
        f.sort();
        Ok(f)
    }

    fn sort(&mut self) {
        self.entries.sort_by(|a, b| {
            a.birth
                .total_cmp(&b.birth)
                .then_with(|| a.simplex.dim().cmp(&b.simplex.dim()))
                .then_with(|| a.simplex.cmp(&b.simplex))
        });
    }

    pub fn entries(&self) -> &[Filtered] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn birth(&self, s: &Simplex) -> Option<f64> {
        self.entries.iter().find(|e| &e.simplex == s).map(|e| e.birth)
    }

    /// `simplex -> birth` for lookups.
    pub fn birth_map(&self) -> HashMap<&Simplex, f64> {
        self.entries.iter().map(|e| (&e.simplex, e.birth)).collect()
    }

    /// The slice of simplices born at or before `t`.
    pub fn slice_at(&self, t: f64) -> SliceComplex {
        let radius_fn = self.schedule.as_ref().map(|s| {
            let w = s
                .weights(&self.base_points)
                .expect("weights were checked at construction");
            RadiusFunction::new(self.base_points.clone(), w.iter().map(|w| w * t.max(0.0)).collect())
                .expect("nonnegative radii")
        });
        SliceComplex {
            base_points: self.base_points.clone(),
            radius_fn,
            flavor: self.flavor.unwrap_or(Flavor::Cech),
            dim_cap: self.dim_cap,
            simplices: self
                .entries
                .iter()
                .filter(|e| e.birth <= t)
                .map(|e| e.simplex.clone())
                .collect(),
        }
    }

    /// Lines `dim,birth,v0,v1,...` in filtration order, no header.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .flexible(true)
            .has_headers(false)
            .from_writer(out);
        for e in &self.entries {
            let mut row = vec![e.simplex.dim().to_string(), e.birth.to_string()];
            row.extend(e.simplex.vertices().iter().map(|v| v.to_string()));
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }

    pub fn write_csv_path(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    /// Reads the format of [`FilteredComplex::write_csv`].
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .flexible(true)
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(input);
        let mut entries = Vec::new();
        let mut dim_cap = 0;
        for (line, rec) in r.records().enumerate() {
            let rec = rec?;
            let bad = |what: &str| Error::MalformedCsv(format!("line {}: {what}", line + 1));
            if rec.len() < 3 {
                return Err(bad("expected dim,birth,v0,..."));
            }
            let dim: usize = rec[0].parse().map_err(|_| bad("dimension is not an integer"))?;
            let birth: f64 = rec[1].parse().map_err(|_| bad("birth is not a number"))?;
            let vertices = rec
                .iter()
                .skip(2)
                .map(|v| v.parse::<usize>().map_err(|_| bad("vertex is not an index")))
                .collect::<Result<Vec<_>>>()?;
            if vertices.len() != dim + 1 {
                return Err(bad("vertex count does not match the dimension"));
            }
            dim_cap = dim_cap.max(dim);
            entries.push(Filtered {
                simplex: Simplex::new(vertices)?,
                birth,
            });
        }
        FilteredComplex::new(entries, dim_cap.max(1))
    }

    pub fn read_csv_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(std::io::BufReader::new(file))
    }
}

fn check_dim_cap(dim_cap: usize) -> Result<()> {
    if (1..=MAX_DIM_CAP).contains(&dim_cap) {
        Ok(())
    } else {
        Err(Error::DomainMismatch(format!(
            "dim_cap {dim_cap} outside 1..={MAX_DIM_CAP}"
        )))
    }
}

/// Sorted, distinct, in-range base points.
fn normalize_base(space: &Space, base_points: &[usize]) -> Result<Vec<usize>> {
    let mut b = base_points.to_vec();
    b.sort_unstable();
    if let Some(w) = b.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DomainMismatch(format!("point {} listed twice", w[0])));
    }
    for &p in &b {
        space.distance(p, p)?;
    }
    Ok(b)
}

/// Candidate cofaces of `level`: extend each simplex by a later base point
/// and keep the extensions whose facets are all in `known`.
fn extend<F: Fn(&Simplex) -> bool>(level: &[Simplex], base: &[usize], known: F) -> Vec<Simplex> {
    let mut out = Vec::new();
    for s in level {
        let last = *s.vertices().last().expect("nonempty");
        for &v in base.iter().filter(|&&v| v > last) {
            let mut verts = s.vertices().to_vec();
            verts.push(v);
            let c = Simplex(verts);
            // the facet dropping `v` is `s` itself
            if c.facets().take(c.dim()).all(|f| known(&f)) {
                out.push(c);
            }
        }
    }
    out
}

fn radii_for(r: &RadiusFunction, points: &[usize]) -> Result<Vec<f64>> {
    points
        .iter()
        .map(|p| match r.points().iter().position(|q| q == p) {
            Some(k) => Ok(r.get(k)),
            None => Err(Error::DomainMismatch(format!("no radius for point {p}"))),
        })
        .collect()
}

/// Nerve of the balls `B(x, r(x))` up to dimension `dim_cap`.
pub fn cech_slice(
    space: &Space,
    base_points: &[usize],
    r: &RadiusFunction,
    mode: WitnessMode,
    dim_cap: usize,
) -> Result<SliceComplex> {
    check_dim_cap(dim_cap)?;
    let base = normalize_base(space, base_points)?;
    let radii = radii_for(r, &base)?;
    let radius: HashMap<usize, f64> = base.iter().copied().zip(radii).collect();
    let mut all: BTreeSet<Simplex> = base.iter().map(|&v| Simplex(vec![v])).collect();
    let mut level: Vec<Simplex> = all.iter().cloned().collect();
    for _ in 0..dim_cap {
        let cands = extend(&level, &base, |f| all.contains(f));
        let hits = par::map(&cands, |c| {
            let rs: Vec<f64> = c.vertices().iter().map(|v| radius[v]).collect();
            space.balls_intersect(c.vertices(), &rs, mode).map(|i| i.nonempty)
        });
        level = Vec::new();
        for (c, hit) in cands.into_iter().zip(hits) {
            if hit? {
                level.push(c);
            }
        }
        all.extend(level.iter().cloned());
        if level.is_empty() {
            break;
        }
    }
    SliceComplex::from_simplices(base, Some(r.clone()), Flavor::Cech, dim_cap, all)
}

/// Flag complex of the edges with `r_i + r_j >= d_ij`.
pub fn vr_slice(space: &Space, base_points: &[usize], r: &RadiusFunction, dim_cap: usize) -> Result<SliceComplex> {
    check_dim_cap(dim_cap)?;
    let base = normalize_base(space, base_points)?;
    let radii = radii_for(r, &base)?;
    let radius: HashMap<usize, f64> = base.iter().copied().zip(radii).collect();
    let mut edges = BTreeSet::new();
    for (a, &u) in base.iter().enumerate() {
        for &v in &base[a + 1..] {
            if radius[&u] + radius[&v] >= space.distance(u, v)? {
                edges.insert((u, v));
            }
        }
    }
    let simplices = flag_completion(&base, &edges, dim_cap);
    SliceComplex::from_simplices(base, Some(r.clone()), Flavor::Vr, dim_cap, simplices)
}

fn flag_completion(base: &[usize], edges: &BTreeSet<(usize, usize)>, dim_cap: usize) -> Vec<Simplex> {
    let mut out: Vec<Simplex> = base.iter().map(|&v| Simplex(vec![v])).collect();
    let mut level = out.clone();
    for _ in 0..dim_cap {
        let mut next = Vec::new();
        for s in &level {
            let last = *s.vertices().last().expect("nonempty");
            for &v in base.iter().filter(|&&v| v > last) {
                if s.vertices().iter().all(|&u| edges.contains(&(u, v))) {
                    let mut verts = s.vertices().to_vec();
                    verts.push(v);
                    next.push(Simplex(verts));
                }
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

/// Default cutoff: the diameter of the base points, divided by the smallest
/// weight for weighted schedules.
fn default_t_max(space: &Space, base: &[usize], weights: &[f64]) -> f64 {
    let wmin = weights.iter().copied().fold(f64::INFINITY, f64::min);
    space.diameter(base) / wmin
}

fn finish(
    base: Vec<usize>,
    schedule: Schedule,
    flavor: Flavor,
    dim_cap: usize,
    t_max: f64,
    births: Vec<(Simplex, f64)>,
) -> Result<FilteredComplex> {
    let mut f = FilteredComplex::new(
        births
            .into_iter()
            .map(|(simplex, birth)| Filtered { simplex, birth })
            .collect(),
        dim_cap,
    )?;
    f.base_points = base;
    f.schedule = Some(schedule);
    f.flavor = Some(flavor);
    f.t_max = Some(t_max);
    Ok(f)
}

/// Čech births `min_x max_i d(x, x_i) / w_i`, lifted to their facets' births
/// where rounding would break monotonicity. Simplices born after `t_max` are
/// left out.
pub fn cech_filtration(
    space: &Space,
    base_points: &[usize],
    schedule: &Schedule,
    mode: WitnessMode,
    dim_cap: usize,
    t_max: Option<f64>,
) -> Result<FilteredComplex> {
    check_dim_cap(dim_cap)?;
    let base = normalize_base(space, base_points)?;
    let w = schedule.weights(&base)?;
    let weight: HashMap<usize, f64> = base.iter().copied().zip(w.iter().copied()).collect();
    let t_max = t_max.unwrap_or_else(|| default_t_max(space, &base, &w));
    let mut births: HashMap<Simplex, f64> = base.iter().map(|&v| (Simplex(vec![v]), 0.0)).collect();
    let mut level: Vec<Simplex> = base.iter().map(|&v| Simplex(vec![v])).collect();
    for _ in 0..dim_cap {
        let cands = extend(&level, &base, |f| births.contains_key(f));
        let values = par::map(&cands, |c| {
            let ws: Vec<f64> = c.vertices().iter().map(|v| weight[v]).collect();
            space.minimax_scaled_distance(c.vertices(), &ws, mode).map(|m| m.value)
        });
        level = Vec::new();
        for (c, v) in cands.into_iter().zip(values) {
            let floor = c.facets().map(|f| births[&f]).fold(0.0, f64::max);
            let b = v?.max(floor);
            if b <= t_max {
                births.insert(c.clone(), b);
                level.push(c);
            }
        }
        if level.is_empty() {
            break;
        }
    }
    finish(
        base,
        schedule.clone(),
        Flavor::Cech,
        dim_cap,
        t_max,
        births.into_iter().collect(),
    )
}

/// Rips births: `d_ij / (w_i + w_j)` on edges, the largest edge birth on
/// higher simplices.
pub fn vr_filtration(
    space: &Space,
    base_points: &[usize],
    schedule: &Schedule,
    dim_cap: usize,
    t_max: Option<f64>,
) -> Result<FilteredComplex> {
    check_dim_cap(dim_cap)?;
    let base = normalize_base(space, base_points)?;
    let w = schedule.weights(&base)?;
    let weight: HashMap<usize, f64> = base.iter().copied().zip(w.iter().copied()).collect();
    let t_max = t_max.unwrap_or_else(|| default_t_max(space, &base, &w));
    let mut edge_birth: HashMap<(usize, usize), f64> = HashMap::new();
    for (a, &u) in base.iter().enumerate() {
        for &v in &base[a + 1..] {
            let b = space.distance(u, v)? / (weight[&u] + weight[&v]);
            if b <= t_max {
                edge_birth.insert((u, v), b);
            }
        }
    }
    let edges: BTreeSet<(usize, usize)> = edge_birth.keys().copied().collect();
    let births = flag_completion(&base, &edges, dim_cap)
        .into_iter()
        .map(|s| {
            let v = s.vertices();
            let mut b: f64 = 0.0;
            for (a, &x) in v.iter().enumerate() {
                for &y in &v[a + 1..] {
                    b = b.max(edge_birth[&(x, y)]);
                }
            }
            (s, b)
        })
        .collect();
    finish(base, schedule.clone(), Flavor::Vr, dim_cap, t_max, births)
}

/// A simplex breaking `birth_vr <= birth_cech <= mu · birth_vr + tol`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InclusionViolation {
    pub simplex: Vec<usize>,
    pub birth_vr: Option<f64>,
    pub birth_cech: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InclusionReport {
    pub mu: f64,
    pub checked: usize,
    /// Largest `birth_cech / birth_vr` seen.
    pub max_ratio: f64,
    pub violations: Vec<InclusionViolation>,
}

impl InclusionReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Compares births simplex by simplex, optionally only in dimension `dim`.
/// A Rips simplex missing from the Čech filtration is a violation when the
/// Čech cutoff is at least `mu · birth_vr + tol`.
pub fn check_inclusions(
    cech: &FilteredComplex,
    vr: &FilteredComplex,
    mu: f64,
    tol: f64,
    dim: Option<usize>,
) -> Result<InclusionReport> {
    if cech.base_points != vr.base_points {
        return Err(Error::MismatchedBases);
    }
    if let (Some(a), Some(b)) = (&cech.schedule, &vr.schedule) {
        if a != b {
            return Err(Error::MismatchedBases);
        }
    }
    let cb = cech.birth_map();
    let vb = vr.birth_map();
    let mut keys: Vec<&Simplex> = cb.keys().chain(vb.keys()).copied().collect();
    keys.sort();
    keys.dedup();
    let mut report = InclusionReport {
        mu,
        checked: 0,
        max_ratio: 0.0,
        violations: Vec::new(),
    };
    for s in keys {
        if dim.is_some_and(|d| s.dim() != d) {
            continue;
        }
        let (c, v) = (cb.get(s).copied(), vb.get(s).copied());
        let bad = match (c, v) {
            (Some(c), Some(v)) => {
                report.checked += 1;
                if v > 0.0 {
                    report.max_ratio = report.max_ratio.max(c / v);
                }
                v > c + tol || c > mu * v + tol
            }
            // Čech simplices always have Rips counterparts born no later
            (Some(_), None) => true,
            (None, Some(v)) => cech.t_max.is_some_and(|t| mu * v + tol <= t),
            (None, None) => false,
        };
        if bad {
            report.violations.push(InclusionViolation {
                simplex: s.vertices().to_vec(),
                birth_vr: v,
                birth_cech: c,
            });
        }
    }
    Ok(report)
}

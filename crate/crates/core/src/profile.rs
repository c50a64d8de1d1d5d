//! (r, ρ) curvature profiles: for each sampled triple the half perimeter
//! `r`, the λ-measure and ρ, binned by λ and written as CSV or SVG.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;
use crate::rho::rho_triple;
use crate::spaces::{Location, Space, WitnessMode};
use crate::triples::{gromov_products, lambda_measure, LambdaBin, TriangleSides};

pub const CSV_HEADER: [&str; 10] = ["i", "j", "k", "d12", "d13", "d23", "r", "lambda", "rho", "attained"];

#[derive(Clone, Debug, PartialEq)]
pub struct ProfileRecord {
    pub indices: [usize; 3],
    pub sides: TriangleSides,
    /// Half perimeter.
    pub r: f64,
    pub lambda: f64,
    pub rho: f64,
    /// Absent on records read back from CSV.
    pub witness: Option<Location>,
    pub attained: bool,
    /// First λ bin containing `lambda`.
    pub bin: Option<usize>,
}

/// A triple skipped because its Gromov products collapse.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegenerateRecord {
    pub indices: [usize; 3],
    pub sides: TriangleSides,
    pub r: f64,
    /// `None` when all three points coincide.
    pub lambda: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    /// Sorted by `r`, then indices.
    pub records: Vec<ProfileRecord>,
    pub degenerate: Vec<DegenerateRecord>,
    pub bins: Vec<LambdaBin>,
    /// Triples examined, degenerate ones included.
    pub examined: usize,
    pub exhaustive: bool,
}

impl Profile {
    pub fn degenerate_count(&self) -> usize {
        self.degenerate.len()
    }

    /// Records per bin, in bin order.
    pub fn bin_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.bins.len()];
        for r in &self.records {
            if let Some(b) = r.bin {
                counts[b] += 1;
            }
        }
        counts
    }
}

fn binomial3(n: usize) -> u128 {
    let n = n as u128;
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2) / 6
    }
}

/// Triple of colexicographic rank `rank` among the 3-subsets of `0..n`.
fn unrank(mut rank: u128, n: usize) -> [usize; 3] {
    let mut out = [0; 3];
    for (slot, k) in (1..=3u128).rev().enumerate() {
        // largest c with C(c, k) <= rank
        let mut c = k as usize - 1;
        while c < n && choose(c as u128 + 1, k) <= rank {
            c += 1;
        }
        out[2 - slot] = c;
        rank -= choose(c as u128, k);
    }
    out
}

fn choose(n: u128, k: u128) -> u128 {
    match k {
        1 => n,
        2 => n * n.saturating_sub(1) / 2,
        _ => binomial3(n as usize),
    }
}

/// Sorted positions into `sample` of the triples to evaluate.
fn select_triples(n: usize, n_triples: usize, seed: u64) -> (Vec<[usize; 3]>, bool) {
    let total = binomial3(n);
    if total <= n_triples as u128 {
        let mut all = Vec::with_capacity(total as usize);
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    all.push([i, j, k]);
                }
            }
        }
        return (all, true);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ranks: Vec<u128> = if let Ok(total) = usize::try_from(total) {
        rand::seq::index::sample(&mut rng, total, n_triples)
            .into_iter()
            .map(|r| r as u128)
            .collect()
    } else {
        // rejection sampling when the rank space outgrows usize
        use rand::Rng;
        let mut seen = std::collections::BTreeSet::new();
        while seen.len() < n_triples {
            seen.insert(rng.gen_range(0..total));
        }
        seen.into_iter().collect()
    };
    ranks.sort_unstable();
    let mut triples: Vec<[usize; 3]> = ranks.into_iter().map(|r| unrank(r, n)).collect();
    triples.sort_unstable();
    (triples, false)
}

enum Outcome {
    Record(ProfileRecord),
    Degenerate(DegenerateRecord),
}

/// Evaluates ρ on every triple of `sample` when there are at most
/// `n_triples` of them, otherwise on `n_triples` distinct triples drawn
/// uniformly with `seed`. Degenerate triples are set aside in
/// [`Profile::degenerate`].
pub fn curvature_profile(
    space: &Space,
    sample: &[usize],
    bins: &[LambdaBin],
    n_triples: usize,
    mode: WitnessMode,
    seed: u64,
) -> Result<Profile> {
    if sample.len() < 3 {
        return Err(Error::SampleTooSmall {
            found: sample.len(),
            needed: 3,
        });
    }
    for &p in sample {
        if p >= space.len() {
            return Err(Error::IndexOutOfRange {
                index: p,
                len: space.len(),
            });
        }
    }
    let (positions, exhaustive) = select_triples(sample.len(), n_triples, seed);
    let triples: Vec<[usize; 3]> = positions.iter().map(|t| t.map(|p| sample[p])).collect();
    let outcomes = par::map(&triples, |&t| evaluate(space, t, bins, mode));
    let mut records = Vec::new();
    let mut degenerate = Vec::new();
    for o in outcomes {
        match o? {
            Outcome::Record(r) => records.push(r),
            Outcome::Degenerate(d) => degenerate.push(d),
        }
    }
    sort_records(&mut records);
    Ok(Profile {
        records,
        degenerate,
        bins: bins.to_vec(),
        examined: triples.len(),
        exhaustive,
    })
}

fn evaluate(space: &Space, t: [usize; 3], bins: &[LambdaBin], mode: WitnessMode) -> Result<Outcome> {
    let [i, j, k] = t;
    let sides = TriangleSides::from_space(space, i, j, k)?;
    let r = 0.5 * sides.perimeter();
    let lambda = lambda_measure(sides).ok().map(|m| m.lambda);
    if gromov_products(sides)?.is_degenerate(space.tolerances().degenerate) {
        return Ok(Outcome::Degenerate(DegenerateRecord {
            indices: t,
            sides,
            r,
            lambda,
        }));
    }
    let lambda = lambda.expect("nondegenerate triangles have a longest side");
    let res = rho_triple(space, t, mode)?;
    Ok(Outcome::Record(ProfileRecord {
        indices: t,
        sides,
        r,
        lambda,
        rho: res.rho,
        witness: Some(res.witness),
        attained: res.attained,
        bin: bins.iter().position(|b| b.contains(lambda)),
    }))
}

fn sort_records(records: &mut [ProfileRecord]) {
    records.sort_by(|a, b| a.r.total_cmp(&b.r).then_with(|| a.indices.cmp(&b.indices)));
}

fn check_finite(records: &[ProfileRecord]) -> Result<()> {
    for r in records {
        let fields = [r.sides.d12, r.sides.d13, r.sides.d23, r.r, r.lambda, r.rho];
        if fields.iter().any(|x| !x.is_finite()) {
            let [i, j, k] = r.indices;
            return Err(Error::DegenerateLeak(i, j, k));
        }
    }
    Ok(())
}

/// CSV with 17 significant digits per float, rows sorted by `r` then
/// indices.
pub fn write_profile_csv<W: Write>(records: &[ProfileRecord], out: W) -> Result<()> {
    check_finite(records)?;
    let mut sorted = records.to_vec();
    sort_records(&mut sorted);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in &sorted {
        let [i, j, k] = r.indices;
        let mut row: Vec<String> = vec![i.to_string(), j.to_string(), k.to_string()];
        for x in [r.sides.d12, r.sides.d13, r.sides.d23, r.r, r.lambda, r.rho] {
            row.push(format!("{x:.16e}"));
        }
        row.push(r.attained.to_string());
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

pub fn write_profile_csv_path(records: &[ProfileRecord], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_profile_csv(records, std::io::BufWriter::new(file))
}

/// Reads what [`write_profile_csv`] wrote. Witnesses are not stored, so
/// they come back as `None`; bins are recomputed from λ.
pub fn read_profile_csv<R: Read>(input: R, bins: &[LambdaBin]) -> Result<Vec<ProfileRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    if rd.headers()?.iter().ne(CSV_HEADER) {
        return Err(Error::MalformedCsv("unexpected profile header".into()));
    }
    let mut out = Vec::new();
    for (line, rec) in rd.records().enumerate() {
        let rec = rec?;
        let bad = || Error::MalformedCsv(format!("profile row {}", line + 2));
        if rec.len() != CSV_HEADER.len() {
            return Err(bad());
        }
        let idx = |c: usize| rec[c].parse::<usize>().map_err(|_| bad());
        let num = |c: usize| rec[c].parse::<f64>().map_err(|_| bad());
        let lambda = num(7)?;
        out.push(ProfileRecord {
            indices: [idx(0)?, idx(1)?, idx(2)?],
            sides: TriangleSides::new(num(3)?, num(4)?, num(5)?),
            r: num(6)?,
            lambda,
            rho: num(8)?,
            witness: None,
            attained: rec[9].parse().map_err(|_| bad())?,
            bin: bins.iter().position(|b| b.contains(lambda)),
        });
    }
    Ok(out)
}

pub fn read_profile_csv_path(path: &Path, bins: &[LambdaBin]) -> Result<Vec<ProfileRecord>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_profile_csv(file, bins)
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN: [f64; 4] = [40.0, 150.0, 50.0, 60.0]; // top, right, bottom, left
const PALETTE: [&str; 6] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"];
const OTHER: &str = "#999999";

/// Standalone 800×500 scatter of (r, ρ) with reference lines at ρ = 1,
/// 2/√3 and 2. Points are colored by λ bin; bins with no points get no
/// legend entry.
pub fn write_profile_svg<W: Write>(records: &[ProfileRecord], bins: &[LambdaBin], mut out: W) -> Result<()> {
    check_finite(records)?;
    let refs = [(1.0, "ρ = 1"), (2.0 / 3f64.sqrt(), "ρ = 2/√3"), (2.0, "ρ = 2")];
    let r_max = records.iter().map(|p| p.r).fold(0.0, f64::max);
    let r_max = if r_max > 0.0 { r_max * 1.05 } else { 1.0 };
    let lo = records.iter().map(|p| p.rho).fold(1.0, f64::min);
    let hi = records.iter().map(|p| p.rho).fold(2.0, f64::max);
    let pad = 0.05 * (hi - lo);
    let (y_lo, y_hi) = (lo - pad, hi + pad);
    let [top, right, bottom, left] = MARGIN;
    let plot_w = WIDTH - left - right;
    let plot_h = HEIGHT - top - bottom;
    let sx = |r: f64| left + r / r_max * plot_w;
    let sy = |rho: f64| top + (y_hi - rho) / (y_hi - y_lo) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let (x0, x1, y0, y1) = (left, left + plot_w, top + plot_h, top);
    let _ = writeln!(s, r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#);
    let _ = writeln!(s, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#);
    for t in 0..=5 {
        let r = r_max * f64::from(t) / 5.0;
        let x = sx(r);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            y0 + 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{r:.3}</text>"#,
            y0 + 18.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">r</text>"#,
        x0 + plot_w / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle">ρ</text>"#,
        y1 + plot_h / 2.0
    );
    for (v, label) in refs {
        let y = sy(v);
        let _ = writeln!(
            s,
            r#"<line x1="{x0}" y1="{y:.2}" x2="{x1}" y2="{y:.2}" stroke="gray" stroke-dasharray="6,4"/>"#
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#,
            x0 - 6.0,
            y + 4.0
        );
    }
    let color = |b: Option<usize>| b.map_or(OTHER, |b| PALETTE[b % PALETTE.len()]);
    for p in records {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{}"/>"#,
            sx(p.r),
            sy(p.rho),
            color(p.bin)
        );
    }
    let mut legend: Vec<(String, &str)> = Vec::new();
    for (b, bin) in bins.iter().enumerate() {
        if records.iter().any(|p| p.bin == Some(b)) {
            legend.push((format!("λ = {} ± {}", bin.center, bin.half_width), color(Some(b))));
        }
    }
    if records.iter().any(|p| p.bin.is_none()) {
        legend.push(("other λ".to_string(), OTHER));
    }
    for (n, (label, c)) in legend.iter().enumerate() {
        let y = top + 10.0 + 20.0 * n as f64;
        let x = x1 + 15.0;
        let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="{c}"/>"#);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{label}</text>"#, x + 10.0, y + 4.0);
    }
    s.push_str("</svg>\n");
    out.write_all(s.as_bytes()).map_err(|e| Error::io("<svg>", e))?;
    Ok(())
}

pub fn write_profile_svg_path(records: &[ProfileRecord], bins: &[LambdaBin], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_profile_svg(records, bins, std::io::BufWriter::new(file))
}

//! Persistent homology over the two-element field.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::complexes::{FilteredComplex, Simplex, SliceComplex};
use crate::error::{Error, Result};

/// Largest slice `betti_bruteforce` accepts.
pub const BRUTEFORCE_LIMIT: usize = 5000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PersistencePair {
    pub dim: usize,
    pub birth: f64,
    /// `f64::INFINITY` for classes that never die.
    pub death: f64,
    pub creator: Vec<usize>,
    pub destroyer: Option<Vec<usize>>,
}

impl PersistencePair {
    pub fn is_zero_length(&self) -> bool {
        self.death == self.birth
    }

    pub fn is_infinite(&self) -> bool {
        self.death == f64::INFINITY
    }

    /// Alive on `[birth, death)`.
    pub fn alive_at(&self, t: f64) -> bool {
        self.birth <= t && t < self.death
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Barcode {
    /// Sorted by (dim, birth, death).
    pub pairs: Vec<PersistencePair>,
    /// Highest homological dimension reported.
    pub max_dim: usize,
}

impl Barcode {
    pub fn bars(&self, dim: usize) -> impl Iterator<Item = &PersistencePair> {
        self.pairs.iter().filter(move |p| p.dim == dim)
    }

    /// Bars of positive length in dimension `dim`.
    pub fn positive(&self, dim: usize) -> impl Iterator<Item = &PersistencePair> {
        self.bars(dim).filter(|p| !p.is_zero_length())
    }

    /// Rank of `H_dim` of the slice at `t`, read off the bars.
    pub fn rank_at(&self, dim: usize, t: f64) -> usize {
        self.bars(dim).filter(|p| p.alive_at(t)).count()
    }

    /// Header `dim,birth,death`, `inf` for infinite deaths.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["dim", "birth", "death"])?;
        for p in &self.pairs {
            let death = if p.is_infinite() {
                "inf".to_string()
            } else {
                p.death.to_string()
            };
            w.write_record([p.dim.to_string(), p.birth.to_string(), death])?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }

    pub fn write_csv_path(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

/// XOR of two sorted index lists.
fn add_columns(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Column reduction in filtration order, highest dimension first so that
/// columns known to reduce to zero can be cleared without work. Dimensions
/// above `max_dim` and at or above the filtration's `dim_cap` are not
/// reported: their classes would need missing cofaces to die.
pub fn compute_persistence(f: &FilteredComplex, max_dim: usize) -> Result<Barcode> {
    let entries = f.entries();
    let index: HashMap<&Simplex, usize> = entries.iter().enumerate().map(|(i, e)| (&e.simplex, i)).collect();
    let top = max_dim.min(f.dim_cap.saturating_sub(1));
    let mut boundary: Vec<Vec<usize>> = Vec::with_capacity(entries.len());
    for e in entries {
        let mut col = Vec::with_capacity(e.simplex.dim() + 1);
        for facet in e.simplex.facets() {
            match index.get(&facet) {
                Some(&i) if entries[i].birth <= e.birth => col.push(i),
                _ => {
                    return Err(Error::InvalidFiltration(format!(
                        "facet {facet} of {} is missing or born later",
                        e.simplex
                    )))
                }
            }
        }
        col.sort_unstable();
        boundary.push(col);
    }
    let dim_of = |i: usize| entries[i].simplex.dim();
    let mut reduced: Vec<Option<Vec<usize>>> = vec![None; entries.len()];
    let mut pivot_owner: HashMap<usize, usize> = HashMap::new();
    let mut cleared = vec![false; entries.len()];
    for d in (1..=top + 1).rev() {
        for j in (0..entries.len()).filter(|&j| dim_of(j) == d) {
            if cleared[j] {
                continue;
            }
            let mut col = std::mem::take(&mut boundary[j]);
            while let Some(&low) = col.last() {
                match pivot_owner.get(&low) {
                    Some(&k) => col = add_columns(&col, reduced[k].as_deref().expect("pivot columns are kept")),
                    None => break,
                }
            }
            if let Some(&low) = col.last() {
                pivot_owner.insert(low, j);
                cleared[low] = true;
            }
            reduced[j] = Some(col);
        }
    }
    let mut pairs = Vec::new();
    for (i, e) in entries.iter().enumerate() {
        let d = e.simplex.dim();
        if d > top {
            continue;
        }
        // a simplex either kills a class (nonzero reduced column) or creates one
        let kills = reduced[i].as_ref().is_some_and(|c| !c.is_empty());
        if kills {
            continue;
        }
        let (death, destroyer) = match pivot_owner.get(&i) {
            Some(&j) => (entries[j].birth, Some(entries[j].simplex.vertices().to_vec())),
            None => (f64::INFINITY, None),
        };
        pairs.push(PersistencePair {
            dim: d,
            birth: e.birth,
            death,
            creator: e.simplex.vertices().to_vec(),
            destroyer,
        });
    }
    pairs.sort_by(|a, b| {
        a.dim
            .cmp(&b.dim)
            .then_with(|| a.birth.total_cmp(&b.birth))
            .then_with(|| a.death.total_cmp(&b.death))
    });
    Ok(Barcode { pairs, max_dim: top })
}

/// Rank of a GF(2) matrix given as bitset columns.
fn rank(cols: Vec<Vec<u64>>) -> usize {
    let mut rank = 0;
    let words = cols.first().map_or(0, Vec::len);
    let mut row_pivots: Vec<Vec<u64>> = Vec::new();
    let mut pivot_rows: Vec<usize> = Vec::new();
    for mut col in cols {
        for (p, &r) in row_pivots.iter().zip(&pivot_rows) {
            if col[r / 64] >> (r % 64) & 1 == 1 {
                for w in 0..words {
                    col[w] ^= p[w];
                }
            }
        }
        if let Some(w) = (0..words).find(|&w| col[w] != 0) {
            let r = w * 64 + col[w].trailing_zeros() as usize;
            // keep pivots reduced against each other
            for q in row_pivots.iter_mut() {
                if q[r / 64] >> (r % 64) & 1 == 1 {
                    for w in 0..words {
                        q[w] ^= col[w];
                    }
                }
            }
            row_pivots.push(col);
            pivot_rows.push(r);
            rank += 1;
        }
    }
    rank
}

fn boundary_rank(s: &SliceComplex, dim: usize) -> usize {
    if dim == 0 {
        return 0;
    }
    let rows: HashMap<&Simplex, usize> = s
        .simplices()
        .into_iter()
        .filter(|x| x.dim() == dim - 1)
        .enumerate()
        .map(|(i, x)| (x, i))
        .collect();
    let words = rows.len().div_ceil(64).max(1);
    let cols: Vec<Vec<u64>> = s
        .simplices()
        .into_iter()
        .filter(|x| x.dim() == dim)
        .map(|x| {
            let mut c = vec![0u64; words];
            for f in x.facets() {
                let r = rows[&f];
                c[r / 64] |= 1 << (r % 64);
            }
            c
        })
        .collect();
    rank(cols)
}

/// `dim H_dim` of a slice by dense elimination on its boundary matrices.
pub fn betti_bruteforce(s: &SliceComplex, dim: usize) -> Result<usize> {
    if s.len() > BRUTEFORCE_LIMIT {
        return Err(Error::TooLarge {
            found: s.len(),
            limit: BRUTEFORCE_LIMIT,
        });
    }
    Ok(s.count(dim) - boundary_rank(s, dim) - boundary_rank(s, dim + 1))
}

/// Every Betti number in dimensions `1..dim_cap` vanishes.
pub fn homology_trivial_above_dim0(s: &SliceComplex) -> Result<bool> {
    for d in 1..s.dim_cap {
        if betti_bruteforce(s, d)? != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

//! Block-MDS encoding matrix construction.
//!
//! The base matrix splits the `m` message columns into `k` labeled
//! segments of width `ell` plus a zero block. Segment `j` carries a
//! `T/k x ell` MDS generator on its own row block; everything else is
//! zero. The transmission space is the set of column permutations of
//! this matrix, represented here by [`SegmentPattern`] equivalence
//! classes: decodability only depends on which segment each message
//! index lands in, so permutations that differ within a segment
//! collapse to one pattern.

use crate::counting::pattern_count;
use crate::error::{Error, Result};
use crate::field::{FieldConfig, FieldMatrix};
use itertools::Itertools;
use num::bigint::BigInt;

use std::fmt::Write as _;

/// Default cap on the number of patterns an enumeration may yield.
pub const DEFAULT_PATTERN_CAP: u64 = 10_000_000;

/// Parameters of the block-MDS construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SchemeParams {
    m: usize,
    t: usize,
    k: usize,
    ell: usize,
    s_min: usize,
    field: FieldConfig,
}

impl SchemeParams {
    /// Validates the construction constraints: `k` divides `T`,
    /// `1 <= ell <= min(s_min + T/k, floor(m/k))`, and `k*ell <= m`.
    pub fn new(
        m: usize,
        t: usize,
        k: usize,
        ell: usize,
        s_min: usize,
        field: FieldConfig,
    ) -> Result<Self> {
        if m == 0 || t == 0 || k == 0 {
            return Err(Error::InvalidParameter(
                "m, T and k must all be positive".into(),
            ));
        }
        if !t.is_multiple_of(k) {
            return Err(Error::InvalidParameter(format!(
                "k = {k} must divide T = {t}"
            )));
        }
        let bound = (s_min + t / k).min(m / k);
        if ell == 0 || ell > bound {
            return Err(Error::InvalidParameter(format!(
                "ell = {ell} must lie in 1..={bound} for m={m}, T={t}, k={k}, s_min={s_min}"
            )));
        }
        if k * ell > m {
            return Err(Error::InvalidParameter(format!(
                "k*ell = {} exceeds m = {m}",
                k * ell
            )));
        }
        Ok(SchemeParams {
            m,
            t,
            k,
            ell,
            s_min,
            field,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn s_min(&self) -> usize {
        self.s_min
    }

    pub fn field(&self) -> FieldConfig {
        self.field
    }

    /// Rows of each segment's MDS block, `T/k`.
    pub fn rows_per_segment(&self) -> usize {
        self.t / self.k
    }
}

/// Assignment of message indices to the `k` labeled segments.
///
/// Segments are ordered (segment 1 with contents swapped against
/// segment 2 is a different pattern) but unordered inside, so each
/// pattern stands for the `(ell!)^k` column permutations that share it.
/// Indices not covered by any segment form the zero block.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SegmentPattern {
    m: usize,
    segments: Vec<Vec<usize>>,
}

impl SegmentPattern {
    /// Validates disjointness, equal widths, and index range; sorts
    /// each segment.
    pub fn new(m: usize, segments: Vec<Vec<usize>>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidParameter(
                "pattern needs at least one segment".into(),
            ));
        }
        let ell = segments[0].len();
        if ell == 0 {
            return Err(Error::InvalidParameter("segments must be non-empty".into()));
        }
        let mut seen = vec![false; m];
        let mut sorted = Vec::with_capacity(segments.len());
        for seg in &segments {
            if seg.len() != ell {
                return Err(Error::InvalidParameter(format!(
                    "segment width {} differs from {ell}",
                    seg.len()
                )));
            }
            let mut s = seg.clone();
            s.sort_unstable();
            for &i in &s {
                if i >= m {
                    return Err(Error::IndexOutOfRange(format!(
                        "segment index {i} outside 0..{m}"
                    )));
                }
                if seen[i] {
                    return Err(Error::InvalidParameter(format!(
                        "index {i} appears in two segments"
                    )));
                }
                seen[i] = true;
            }
            sorted.push(s);
        }
        Ok(SegmentPattern {
            m,
            segments: sorted,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.segments.len()
    }

    pub fn ell(&self) -> usize {
        self.segments[0].len()
    }

    pub fn segments(&self) -> &[Vec<usize>] {
        &self.segments
    }

    /// Indices covered by no segment, ascending.
    pub fn zero_block(&self) -> Vec<usize> {
        let mut covered = vec![false; self.m];
        for seg in &self.segments {
            for &i in seg {
                covered[i] = true;
            }
        }
        (0..self.m).filter(|&i| !covered[i]).collect()
    }

    /// Which segment holds `index`, if any.
    pub fn segment_of(&self, index: usize) -> Option<usize> {
        self.segments
            .iter()
            .position(|seg| seg.binary_search(&index).is_ok())
    }

    /// Serializes to the pattern text format: first line `k ell m`,
    /// then `k` lines of `ell` one-based indices.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} {}", self.k(), self.ell(), self.m);
        for seg in &self.segments {
            let line: Vec<String> = seg.iter().map(|i| (i + 1).to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    /// Parses the pattern text format produced by [`Self::to_text`].
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty pattern file".into()))?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 3 {
            return Err(Error::Parse(format!(
                "pattern header must be `k ell m`, got `{header}`"
            )));
        }
        let parse = |s: &str| -> Result<usize> {
            s.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad integer `{s}`")))
        };
        let k = parse(head[0])?;
        let ell = parse(head[1])?;
        let m = parse(head[2])?;
        let mut segments = Vec::with_capacity(k);
        for _ in 0..k {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse("missing segment line".into()))?;
            let seg: Result<Vec<usize>> = line
                .split_whitespace()
                .map(|s| {
                    let v = parse(s)?;
                    if v == 0 {
                        return Err(Error::Parse("pattern indices are one-based".into()));
                    }
                    Ok(v - 1)
                })
                .collect();
            let seg = seg?;
            if seg.len() != ell {
                return Err(Error::Parse(format!(
                    "segment has {} indices, expected {ell}",
                    seg.len()
                )));
            }
            segments.push(seg);
        }
        Self::new(m, segments)
    }
}

/// Generator matrix of an `[ell, r]` MDS code over GF(L): entry
/// `(i, j) = x_j^(i+1)` for the distinct nonzero points `x_j = j + 1`.
/// Every `r x r` column submatrix is a scaled Vandermonde determinant,
/// hence invertible. Starting the exponents at 1 keeps the `r = 1` row
/// entries pairwise distinct.
pub fn vandermonde_generator(ell: usize, r: usize, field: FieldConfig) -> Result<FieldMatrix> {
    if ell as u64 > field.modulus() - 1 {
        return Err(Error::InvalidParameter(format!(
            "ell = {ell} needs {ell} distinct nonzero points, GF({}) has {}",
            field.modulus(),
            field.modulus() - 1
        )));
    }
    if r > ell || r == 0 {
        return Err(Error::InvalidParameter(format!(
            "code dimension r = {r} must lie in 1..={ell}"
        )));
    }
    let mut m = FieldMatrix::zeros(r, ell, field);
    for j in 0..ell {
        let x = (j as u64 + 1) % field.modulus();
        for i in 0..r {
            m.set(i, j, field.pow(x, i as u64 + 1));
        }
    }
    Ok(m)
}

/// True iff every `rows x rows` column submatrix has full rank
/// (exhaustive over all column choices). Returns false when
/// `rows > cols`, where no such submatrix exists.
pub fn is_mds(m: &FieldMatrix) -> bool {
    if m.rows() > m.cols() {
        return false;
    }
    (0..m.cols())
        .combinations(m.rows())
        .all(|cols| m.column_submatrix(&cols).rank() == m.rows())
}

/// Pattern with segment `j` holding indices `j*ell..(j+1)*ell`.
pub fn canonical_pattern(p: &SchemeParams) -> SegmentPattern {
    let segments = (0..p.k())
        .map(|j| (j * p.ell()..(j + 1) * p.ell()).collect())
        .collect();
    SegmentPattern::new(p.m(), segments).expect("canonical pattern is valid")
}

/// Builds the `T x m` block matrix for a pattern: segment `j`'s columns
/// carry the `[ell, T/k]` MDS generator on row block `j`, everything
/// else is zero. Within a segment, the generator columns are assigned
/// to message indices in ascending order.
pub fn build_base_matrix(p: &SchemeParams, pattern: &SegmentPattern) -> Result<FieldMatrix> {
    if pattern.m() != p.m() || pattern.k() != p.k() || pattern.ell() != p.ell() {
        return Err(Error::InvalidParameter(format!(
            "pattern shape ({}, {}, {}) does not match params ({}, {}, {})",
            pattern.k(),
            pattern.ell(),
            pattern.m(),
            p.k(),
            p.ell(),
            p.m()
        )));
    }
    let r = p.rows_per_segment();
    let block = vandermonde_generator(p.ell(), r, p.field())?;
    let mut a = FieldMatrix::zeros(p.t(), p.m(), p.field());
    for (j, seg) in pattern.segments().iter().enumerate() {
        for (c, &idx) in seg.iter().enumerate() {
            for i in 0..r {
                a.set(j * r + i, idx, block.get(i, c));
            }
        }
    }
    Ok(a)
}

/// Streams every distinct segment pattern exactly once, in
/// lexicographic order of the segment contents. Errors up front when
/// the total count `m!/((ell!)^k (m-k*ell)!)` exceeds the cap.
pub fn enumerate_patterns(p: &SchemeParams) -> Result<PatternIter> {
    enumerate_patterns_with_cap(p, DEFAULT_PATTERN_CAP)
}

/// [`enumerate_patterns`] with an explicit cap.
pub fn enumerate_patterns_with_cap(p: &SchemeParams, cap: u64) -> Result<PatternIter> {
    let count = pattern_count(p.m() as u64, p.k() as u64, p.ell() as u64);
    if count > BigInt::from(cap) {
        return Err(Error::CapExceeded {
            required: count.to_string(),
            cap,
        });
    }
    Ok(PatternIter::new(p.m(), p.k(), p.ell()))
}

/// Lazy iterator over segment patterns: an odometer of nested
/// combinations, where level `j` chooses segment `j` from the indices
/// left over by levels `0..j`.
pub struct PatternIter {
    m: usize,
    k: usize,
    ell: usize,
    /// Remaining index pool at each level.
    pools: Vec<Vec<usize>>,
    /// Current combination at each level, as positions into the pool.
    combs: Vec<Vec<usize>>,
    done: bool,
}

impl PatternIter {
    fn new(m: usize, k: usize, ell: usize) -> Self {
        let mut it = PatternIter {
            m,
            k,
            ell,
            pools: Vec::with_capacity(k),
            combs: Vec::with_capacity(k),
            done: false,
        };
        it.rebuild_from(0, (0..m).collect());
        it
    }

    /// Resets levels `level..k` to their first combination, with the
    /// given pool feeding level `level`.
    fn rebuild_from(&mut self, level: usize, mut pool: Vec<usize>) {
        self.pools.truncate(level);
        self.combs.truncate(level);
        for _ in level..self.k {
            let comb: Vec<usize> = (0..self.ell).collect();
            let next_pool: Vec<usize> = pool
                .iter()
                .enumerate()
                .filter(|(i, _)| !comb.contains(i))
                .map(|(_, &v)| v)
                .collect();
            self.pools.push(pool);
            self.combs.push(comb);
            pool = next_pool;
        }
    }

    fn current(&self) -> SegmentPattern {
        let segments = (0..self.k)
            .map(|level| {
                self.combs[level]
                    .iter()
                    .map(|&pos| self.pools[level][pos])
                    .collect()
            })
            .collect();
        SegmentPattern::new(self.m, segments).expect("iterator yields valid patterns")
    }

    /// Lexicographic successor of a combination of positions in
    /// `0..n`; false when already at the last one.
    fn advance(comb: &mut [usize], n: usize) -> bool {
        let k = comb.len();
        for i in (0..k).rev() {
            if comb[i] < n - k + i {
                comb[i] += 1;
                for j in i + 1..k {
                    comb[j] = comb[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for PatternIter {
    type Item = SegmentPattern;

    fn next(&mut self) -> Option<SegmentPattern> {
        if self.done {
            return None;
        }
        let pattern = self.current();
        // Advance the deepest level that still has a successor, then
        // reset everything below it.
        let mut level = self.k;
        loop {
            if level == 0 {
                self.done = true;
                break;
            }
            level -= 1;
            let n = self.pools[level].len();
            if Self::advance(&mut self.combs[level], n) {
                let pool: Vec<usize> = self.pools[level]
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !self.combs[level].contains(i))
                    .map(|(_, &v)| v)
                    .collect();
                self.rebuild_below(level, pool);
                break;
            }
        }
        Some(pattern)
    }
}

impl PatternIter {
    fn rebuild_below(&mut self, level: usize, pool: Vec<usize>) {
        if level + 1 < self.k {
            self.rebuild_from(level + 1, pool);
        }
    }
}

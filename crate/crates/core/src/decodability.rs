//! Decodability: which (request, side-information) pairs a given
//! encoding matrix serves.
//!
//! A pair `(q, S)` is decodable iff column `A_q` lies outside the span
//! of the columns indexed by `[m] \ ({q} u S)`: the receiver can then
//! cancel every unknown message and isolate `b_q`. Enumeration walks
//! side-information sets in lexicographic order and requests in index
//! order, so all outputs are deterministic.

use crate::counting::binomial;
use crate::error::{Error, Result};
use crate::field::{in_span, solve_left, FieldMatrix};
use itertools::Itertools;
use num::bigint::BigInt;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Default cap on the number of `(q, S)` checks one enumeration may
/// perform.
pub const DEFAULT_ENUM_CAP: u64 = 10_000_000;

/// A request index together with a side-information set that does not
/// contain it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClientPair {
    request: usize,
    side_info: Vec<usize>,
}

impl ClientPair {
    /// Sorts and deduplicates the side information; rejects a request
    /// contained in it.
    pub fn new(request: usize, side_info: impl Into<Vec<usize>>) -> Result<Self> {
        let mut side_info = side_info.into();
        side_info.sort_unstable();
        side_info.dedup();
        if side_info.binary_search(&request).is_ok() {
            return Err(Error::InvalidParameter(format!(
                "request {request} is inside its own side information"
            )));
        }
        Ok(ClientPair { request, side_info })
    }

    pub fn request(&self) -> usize {
        self.request
    }

    pub fn side_info(&self) -> &[usize] {
        &self.side_info
    }

    pub fn s(&self) -> usize {
        self.side_info.len()
    }
}

impl fmt::Display for ClientPair {
    /// One-based rendering, `q:a,b,c`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side: Vec<String> = self.side_info.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{}:{}", self.request + 1, side.join(","))
    }
}

/// The decodable pairs of a matrix at one side-information size,
/// together with the request and side-information projections and the
/// per-set request multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodableSets {
    pairs: BTreeSet<ClientPair>,
    requests: BTreeSet<usize>,
    side_infos: BTreeSet<Vec<usize>>,
    counts: BTreeMap<Vec<usize>, usize>,
}

impl DecodableSets {
    fn from_pairs(pairs: BTreeSet<ClientPair>) -> Self {
        let mut requests = BTreeSet::new();
        let mut side_infos = BTreeSet::new();
        let mut counts: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for p in &pairs {
            requests.insert(p.request());
            side_infos.insert(p.side_info().to_vec());
            *counts.entry(p.side_info().to_vec()).or_insert(0) += 1;
        }
        DecodableSets {
            pairs,
            requests,
            side_infos,
            counts,
        }
    }

    pub fn pairs(&self) -> &BTreeSet<ClientPair> {
        &self.pairs
    }

    pub fn requests(&self) -> &BTreeSet<usize> {
        &self.requests
    }

    pub fn side_infos(&self) -> &BTreeSet<Vec<usize>> {
        &self.side_infos
    }

    /// Request multiplicity per decodable side-information set; sets
    /// with no decodable request are absent.
    pub fn counts(&self) -> &BTreeMap<Vec<usize>, usize> {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// How many side-information sets each request appears with.
    pub fn request_counts(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for p in &self.pairs {
            *out.entry(p.request()).or_insert(0) += 1;
        }
        out
    }
}

/// Span-membership decodability test: `A_q` outside the span of the
/// columns not touched by the pair.
pub fn is_decodable(a: &FieldMatrix, pair: &ClientPair) -> Result<bool> {
    let m = a.cols();
    if pair.request() >= m {
        return Err(Error::IndexOutOfRange(format!(
            "request {} outside 0..{m}",
            pair.request()
        )));
    }
    if let Some(&bad) = pair.side_info().iter().find(|&&i| i >= m) {
        return Err(Error::IndexOutOfRange(format!(
            "side-information index {bad} outside 0..{m}"
        )));
    }
    let rest: Vec<usize> = (0..m)
        .filter(|&j| j != pair.request() && pair.side_info().binary_search(&j).is_err())
        .collect();
    let sub = a.column_submatrix(&rest);
    Ok(!in_span(&a.column(pair.request()), &sub)?)
}

/// Exhaustively tests every pair with `|S| = s` against the matrix,
/// using the default work cap.
pub fn enumerate_decodable(a: &FieldMatrix, s: usize) -> Result<DecodableSets> {
    enumerate_decodable_with_cap(a, s, DEFAULT_ENUM_CAP)
}

/// [`enumerate_decodable`] with an explicit cap on `C(m,s) * m` checks.
pub fn enumerate_decodable_with_cap(a: &FieldMatrix, s: usize, cap: u64) -> Result<DecodableSets> {
    let m = a.cols();
    if s == 0 || s >= m {
        return Err(Error::InvalidParameter(format!(
            "side-information size s = {s} must lie in 1..{m}"
        )));
    }
    let checks = binomial(m as i64, s as i64) * BigInt::from(m as u64);
    if checks > BigInt::from(cap) {
        return Err(Error::CapExceeded {
            required: checks.to_string(),
            cap,
        });
    }
    let mut pairs = BTreeSet::new();
    for side in (0..m).combinations(s) {
        for q in 0..m {
            if side.binary_search(&q).is_ok() {
                continue;
            }
            let pair = ClientPair::new(q, side.clone())?;
            if is_decodable(a, &pair)? {
                pairs.insert(pair);
            }
        }
    }
    Ok(DecodableSets::from_pairs(pairs))
}

/// Constructively recovers `b_q` from the transmissions `y = A*b` and
/// the known side-information messages.
///
/// Finds a row combination `lambda` with `lambda * A` supported on
/// `{q} u S` and coefficient 1 at `q` (one exists exactly when the
/// pair is decodable), then subtracts the known contributions.
pub fn recover_message(
    a: &FieldMatrix,
    y: &[u64],
    pair: &ClientPair,
    known: &BTreeMap<usize, u64>,
) -> Result<u64> {
    let field = a.field();
    if y.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "y has length {}, matrix has {} rows",
            y.len(),
            a.rows()
        )));
    }
    if known.len() != pair.side_info().len()
        || pair.side_info().iter().any(|i| !known.contains_key(i))
    {
        return Err(Error::InconsistentInput(
            "known messages must cover exactly the side-information set".into(),
        ));
    }
    if let Some(&v) = known.values().find(|&&v| v >= field.modulus()) {
        return Err(Error::InvalidParameter(format!(
            "known message value {v} outside GF({})",
            field.modulus()
        )));
    }
    if !is_decodable(a, pair)? {
        return Err(Error::NotDecodable {
            request: pair.request(),
            side_info: pair.side_info().to_vec(),
        });
    }
    // Solve lambda * A' = e_q over the columns outside S; the columns
    // inside S are unconstrained and get cancelled below.
    let m = a.cols();
    let free_cols: Vec<usize> = (0..m)
        .filter(|j| pair.side_info().binary_search(j).is_err())
        .collect();
    let target: Vec<u64> = free_cols
        .iter()
        .map(|&j| u64::from(j == pair.request()))
        .collect();
    let sub = a.column_submatrix(&free_cols);
    let lambda = solve_left(&sub, &target)?
        .ok_or_else(|| Error::InconsistentInput("no cancelling row combination exists".into()))?;
    let coeffs = a.left_mul(&lambda)?;
    let mixed = lambda.iter().zip(y).fold(0u64, |acc, (&l, &yi)| {
        field.add(acc, field.mul(l, yi % field.modulus()))
    });
    let known_part = pair.side_info().iter().fold(0u64, |acc, j| {
        field.add(acc, field.mul(coeffs[*j], known[j]))
    });
    Ok(field.sub(mixed, known_part))
}

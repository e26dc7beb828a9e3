//! Privacy bounds and the exact posterior engine.
//!
//! The eavesdropper sees the encoding matrix and knows the
//! transmission strategy; her posterior over the target client's
//! (request, side-information) pair follows from Bayes' rule with a
//! uniform pair prior, which makes the posterior proportional to the
//! strategy's selection probability. All posterior probabilities stay
//! exact rationals; only the final entropies become floating point.
//!
//! Entropy is measured in bits and compared against two families of
//! limits: universal upper bounds that hold for every matrix, and the
//! closed-form decodable-set counts of the block construction.

use crate::construction::{build_base_matrix, SchemeParams, SegmentPattern};
use crate::counting::{binomial, log2_big};
use crate::decodability::{enumerate_decodable, is_decodable, ClientPair, DecodableSets};
use crate::error::{Error, Result};
use crate::field::FieldMatrix;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// Tolerance, in bits, for entropy comparisons throughout the crate.
pub const BITS_TOL: f64 = 1e-9;

/// Universal limits on the decodable-set sizes of any `T x m` matrix:
/// `|D| <= T*C(m,s)`, `|D^Q| <= m`, `|D^S| <= C(m,s)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodableBounds {
    pub joint: BigInt,
    pub request: BigInt,
    pub side_info: BigInt,
}

impl DecodableBounds {
    /// The three bounds in bits.
    pub fn bits(&self) -> (f64, f64, f64) {
        (
            log2_big(&self.joint),
            log2_big(&self.request),
            log2_big(&self.side_info),
        )
    }
}

/// The universal bounds for an `m`-message, `T`-transmission system at
/// side-information size `s`.
pub fn universal_bounds(m: usize, t: usize, s: usize) -> Result<DecodableBounds> {
    if m == 0 || t == 0 {
        return Err(Error::InvalidParameter("m and T must be positive".into()));
    }
    if s == 0 || s >= m {
        return Err(Error::InvalidParameter(format!(
            "side-information size s = {s} must lie in 1..{m}"
        )));
    }
    let sets = binomial(m as i64, s as i64);
    Ok(DecodableBounds {
        joint: BigInt::from(t as u64) * &sets,
        request: BigInt::from(m as u64),
        side_info: sets,
    })
}

/// Closed-form count of decodable pairs for the block base matrix:
/// `k*ell * sum_j C(ell-1, j) * C(m-ell, s-j)` over
/// `j = ell - T/k ..= ell - 1`, with out-of-range binomials zero.
/// Equals the exhaustive enumeration on every buildable parameter
/// point.
pub fn base_matrix_pair_count(p: &SchemeParams, s: usize) -> Result<BigInt> {
    if s >= p.m() {
        return Err(Error::InvalidParameter(format!(
            "side-information size s = {s} must be below m = {}",
            p.m()
        )));
    }
    let ell = p.ell() as i64;
    let r = p.rows_per_segment() as i64;
    let m = p.m() as i64;
    let s = s as i64;
    let mut sum = BigInt::zero();
    for j in (ell - r)..=(ell - 1) {
        sum += binomial(ell - 1, j) * binomial(m - ell, s - j);
    }
    Ok(BigInt::from((p.k() * p.ell()) as u64) * sum)
}

/// Closed-form count of decodable requests for the block base matrix:
/// every nonzero column is decodable with some set, so `k*ell`.
pub fn base_matrix_request_count(p: &SchemeParams) -> BigInt {
    BigInt::from((p.k() * p.ell()) as u64)
}

/// Exact privacy levels in bits, next to their universal bounds, the
/// gaps, and the gap ratios `r = 2^-g` in `(0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrivacyReport {
    pub h_joint: f64,
    pub h_q: f64,
    pub h_s: f64,
    pub ub_joint: f64,
    pub ub_q: f64,
    pub ub_s: f64,
    pub g_joint: f64,
    pub g_q: f64,
    pub g_s: f64,
    pub r_joint: f64,
    pub r_q: f64,
    pub r_s: f64,
}

impl PrivacyReport {
    pub fn new(h_joint: f64, h_q: f64, h_s: f64, bounds: &DecodableBounds) -> Self {
        let (ub_joint, ub_q, ub_s) = bounds.bits();
        debug_assert!(h_joint <= ub_joint + 1e-6 && h_q <= ub_q + 1e-6 && h_s <= ub_s + 1e-6);
        let (g_joint, g_q, g_s) = (ub_joint - h_joint, ub_q - h_q, ub_s - h_s);
        PrivacyReport {
            h_joint,
            h_q,
            h_s,
            ub_joint,
            ub_q,
            ub_s,
            g_joint,
            g_q,
            g_s,
            r_joint: (-g_joint).exp2(),
            r_q: (-g_q).exp2(),
            r_s: (-g_s).exp2(),
        }
    }

    /// Request entropy meets its universal bound.
    pub fn full_request_privacy(&self) -> bool {
        self.g_q.abs() <= BITS_TOL
    }

    /// Side-information entropy meets its universal bound.
    pub fn full_side_info_privacy(&self) -> bool {
        self.g_s.abs() <= BITS_TOL
    }
}

/// Report for the posterior that is uniform over the decodable pairs
/// of a single observed matrix: joint entropy `log2 |D|`, marginals
/// from the request and side-information multiplicities.
pub fn uniform_posterior_report(
    sets: &DecodableSets,
    bounds: &DecodableBounds,
) -> Result<PrivacyReport> {
    if sets.is_empty() {
        return Err(Error::InvalidParameter(
            "no decodable pairs: posterior is undefined".into(),
        ));
    }
    let d = BigInt::from(sets.len() as u64);
    let log_d = log2_big(&d);
    fn n_log_n<'a>(counts: impl Iterator<Item = &'a usize>) -> f64 {
        counts
            .filter(|&&n| n > 1)
            .map(|&n| n as f64 * log2_big(&BigInt::from(n as u64)))
            .sum()
    }
    let h_q = log_d - n_log_n(sets.request_counts().values()) / sets.len() as f64;
    let h_s = log_d - n_log_n(sets.counts().values()) / sets.len() as f64;
    Ok(PrivacyReport::new(log_d, h_q, h_s, bounds))
}

/// The conditioning the eavesdropper applies besides the observed
/// matrix. The two-client model with a request-free eavesdropper only
/// conditions on the target's side-information size; richer contexts
/// would extend this type.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Conditioning {
    pub s: usize,
}

impl Conditioning {
    pub fn new(s: usize) -> Self {
        Conditioning { s }
    }
}

/// The transmission strategy: for each client pair, a probability
/// distribution over the segment patterns used to serve it.
///
/// Probabilities are exact rationals. Each pair's distribution must
/// sum to one and may only put mass on patterns in which the pair is
/// decodable; both are enforced when a posterior is computed.
#[derive(Clone, Debug, Default)]
pub struct StrategyTable {
    entries: BTreeMap<ClientPair, BTreeMap<SegmentPattern, BigRational>>,
}

impl StrategyTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, pair: ClientPair, pattern: SegmentPattern, prob: BigRational) {
        self.entries.entry(pair).or_default().insert(pattern, prob);
    }

    /// Selection probability of `pattern` for `pair`; zero when absent.
    pub fn prob(&self, pair: &ClientPair, pattern: &SegmentPattern) -> BigRational {
        self.entries
            .get(pair)
            .and_then(|inner| inner.get(pattern))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn entries(&self) -> &BTreeMap<ClientPair, BTreeMap<SegmentPattern, BigRational>> {
        &self.entries
    }
}

/// Whether the posterior is uniform over each decodable set; uniform
/// marginals are exactly the condition for the entropy bounds to hold
/// with equality.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UniformityFlags {
    pub joint: bool,
    pub request: bool,
    pub side_info: bool,
}

/// Exact posterior over client pairs given one observed pattern.
///
/// Validates the strategy (normalization, support inside the space and
/// inside the decodable patterns) and then applies Bayes' rule; the
/// uniform pair prior cancels, leaving the posterior proportional to
/// the selection probabilities. A pair with no distribution is treated
/// as unserveable within the space and gets zero posterior mass, so a
/// one-matrix space conditions the prior down to that matrix's
/// decodable pairs.
fn posterior(
    params: &SchemeParams,
    space: &[SegmentPattern],
    strategy: &StrategyTable,
    observed: &SegmentPattern,
    cond: &Conditioning,
) -> Result<BTreeMap<ClientPair, BigRational>> {
    let m = params.m();
    if cond.s == 0 || cond.s >= m {
        return Err(Error::InvalidParameter(format!(
            "side-information size s = {} must lie in 1..{m}",
            cond.s
        )));
    }
    let space_set: BTreeSet<&SegmentPattern> = space.iter().collect();
    if !space_set.contains(observed) {
        return Err(Error::ObservedNotInSpace);
    }

    let mut matrices: BTreeMap<&SegmentPattern, FieldMatrix> = BTreeMap::new();
    for (pair, inner) in strategy.entries() {
        if pair.s() != cond.s {
            return Err(Error::StrategyViolation(format!(
                "pair {pair} has side-information size {}, context expects {}",
                pair.s(),
                cond.s
            )));
        }
        let mut total = BigRational::zero();
        for (pattern, prob) in inner {
            if prob.is_negative() {
                return Err(Error::StrategyViolation(format!(
                    "negative probability for pair {pair}"
                )));
            }
            if prob.is_zero() {
                continue;
            }
            if !space_set.contains(pattern) {
                return Err(Error::StrategyViolation(format!(
                    "pair {pair} uses a pattern outside the transmission space"
                )));
            }
            if !matrices.contains_key(pattern) {
                let built = build_base_matrix(params, pattern)?;
                matrices.insert(pattern, built);
            }
            let matrix = matrices.get(pattern).expect("just inserted");
            if !is_decodable(matrix, pair)? {
                return Err(Error::StrategyViolation(format!(
                    "pair {pair} gets positive probability on a pattern that cannot serve it"
                )));
            }
            total += prob;
        }
        let drift = (total - BigRational::one())
            .to_f64()
            .map(f64::abs)
            .unwrap_or(f64::INFINITY);
        if drift > 1e-12 {
            return Err(Error::StrategyViolation(format!(
                "distribution for pair {pair} does not sum to one"
            )));
        }
    }

    let mut weights: BTreeMap<ClientPair, BigRational> = BTreeMap::new();
    let mut norm = BigRational::zero();
    for pair in strategy.entries().keys() {
        let w = strategy.prob(pair, observed);
        if w.is_zero() {
            continue;
        }
        norm += &w;
        weights.insert(pair.clone(), w);
    }
    if norm.is_zero() {
        return Err(Error::UnreachableObservation);
    }
    Ok(weights
        .into_iter()
        .map(|(pair, w)| (pair, w / &norm))
        .collect())
}

/// Entropy in bits of a set of exact probabilities. Equal
/// probabilities are grouped so that a uniform distribution over `n`
/// points yields exactly `log2(n)`.
fn entropy_bits<'a>(probs: impl Iterator<Item = &'a BigRational>) -> f64 {
    let mut groups: BTreeMap<&BigRational, usize> = BTreeMap::new();
    for p in probs {
        if !p.is_zero() {
            *groups.entry(p).or_insert(0) += 1;
        }
    }
    let mut h = 0.0;
    for (p, count) in groups {
        let mass = (p * BigRational::from(BigInt::from(count as u64)))
            .to_f64()
            .expect("finite mass");
        let log_p = log2_big(p.numer()) - log2_big(p.denom());
        h -= mass * log_p;
    }
    h
}

fn request_marginal(post: &BTreeMap<ClientPair, BigRational>) -> BTreeMap<usize, BigRational> {
    let mut out: BTreeMap<usize, BigRational> = BTreeMap::new();
    for (pair, p) in post {
        *out.entry(pair.request()).or_insert_with(BigRational::zero) += p;
    }
    out
}

fn side_info_marginal(
    post: &BTreeMap<ClientPair, BigRational>,
) -> BTreeMap<Vec<usize>, BigRational> {
    let mut out: BTreeMap<Vec<usize>, BigRational> = BTreeMap::new();
    for (pair, p) in post {
        *out.entry(pair.side_info().to_vec())
            .or_insert_with(BigRational::zero) += p;
    }
    out
}

/// Exact joint and marginal posterior entropies for one observed
/// pattern, with the universal bounds filled in.
pub fn posterior_entropies(
    params: &SchemeParams,
    space: &[SegmentPattern],
    strategy: &StrategyTable,
    observed: &SegmentPattern,
    cond: &Conditioning,
) -> Result<PrivacyReport> {
    let post = posterior(params, space, strategy, observed, cond)?;
    let h_joint = entropy_bits(post.values());
    let h_q = entropy_bits(request_marginal(&post).values());
    let h_s = entropy_bits(side_info_marginal(&post).values());
    let bounds = universal_bounds(params.m(), params.t(), cond.s)?;
    Ok(PrivacyReport::new(h_joint, h_q, h_s, &bounds))
}

/// Tests, by exact rational comparison, whether the posterior is
/// uniform over the decodable pairs, requests, and side-information
/// sets of the observed matrix.
pub fn check_uniformity(
    params: &SchemeParams,
    space: &[SegmentPattern],
    strategy: &StrategyTable,
    observed: &SegmentPattern,
    cond: &Conditioning,
) -> Result<UniformityFlags> {
    let post = posterior(params, space, strategy, observed, cond)?;
    let matrix = build_base_matrix(params, observed)?;
    let sets = enumerate_decodable(&matrix, cond.s)?;

    let inv = |n: usize| BigRational::new(BigInt::one(), BigInt::from(n as u64));

    let joint_target = inv(sets.len());
    let joint = sets
        .pairs()
        .iter()
        .all(|pair| post.get(pair) == Some(&joint_target));

    let q_marg = request_marginal(&post);
    let q_target = inv(sets.requests().len());
    let request = sets
        .requests()
        .iter()
        .all(|q| q_marg.get(q) == Some(&q_target));

    let s_marg = side_info_marginal(&post);
    let s_target = inv(sets.side_infos().len());
    let side_info = sets
        .side_infos()
        .iter()
        .all(|side| s_marg.get(side) == Some(&s_target));

    Ok(UniformityFlags {
        joint,
        request,
        side_info,
    })
}

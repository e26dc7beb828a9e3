//! The single-request transmission scheme and its closed-form privacy
//! levels.
//!
//! With one client to satisfy, the block construction runs with one
//! matrix row per segment (`k = T`) and the server draws a column
//! permutation of the base matrix uniformly among those that serve the
//! client: the request's segment must hold the request plus `ell - 1`
//! of its side-information indices. The number of such patterns is the
//! same for every pair, which makes the posterior uniform over the
//! decodable pairs and gives exact closed forms for all three
//! entropies.
//!
//! The side-information entropy needs the multiplicity sum
//! `sum_S N_S log2 N_S`, where `N_S` counts the requests decodable
//! with `S`. A set's multiplicity equals the number of segments that
//! are one element short of being covered by it, which reduces the sum
//! to counting set completions with and without one-short segments:
//! the `completion`/`strict completion` counts below, linked by an
//! inclusion-exclusion recurrence with a closed-form solution.

use crate::bounds::{uniform_posterior_report, universal_bounds, PrivacyReport, StrategyTable};
use crate::construction::{build_base_matrix, enumerate_patterns, SchemeParams, SegmentPattern};
use crate::counting::{binomial, factorial, log2_big, ratio_to_f64};
use crate::decodability::{enumerate_decodable, ClientPair};
use crate::error::{Error, Result};
use crate::field::{FieldConfig, FieldMatrix};
use itertools::Itertools;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Evaluation route for the strict completion count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountRoute {
    /// Unfold the inclusion-exclusion recurrence.
    Recurrence,
    /// Alternating-sign closed form.
    ClosedForm,
    /// Explicit sum over segment occupancies.
    RawSum,
}

/// Evaluation route for the multiplicity log sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumRoute {
    /// Closed form from the completion counts.
    ClosedForm,
    /// Exhaustive enumeration of the decodable sets.
    Direct,
}

/// Parameters of the single-request scheme: `k = T` (one row per
/// segment) and `ell <= min(s + 1, floor(m/T))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SingleRequestParams {
    m: usize,
    t: usize,
    ell: usize,
    s: usize,
    field: FieldConfig,
}

impl SingleRequestParams {
    pub fn new(m: usize, t: usize, ell: usize, s: usize, field: FieldConfig) -> Result<Self> {
        if s == 0 || s >= m {
            return Err(Error::InvalidParameter(format!(
                "side-information size s = {s} must lie in 1..{m}"
            )));
        }
        if t == 0 {
            return Err(Error::InvalidParameter("T must be positive".into()));
        }
        let bound = (s + 1).min(m / t);
        if ell == 0 || ell > bound {
            return Err(Error::InvalidParameter(format!(
                "ell = {ell} must lie in 1..={bound} for m={m}, T={t}, s={s}"
            )));
        }
        Ok(SingleRequestParams {
            m,
            t,
            ell,
            s,
            field,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn field(&self) -> FieldConfig {
        self.field
    }

    /// The underlying block-construction parameters with `k = T`.
    pub fn scheme_params(&self) -> SchemeParams {
        SchemeParams::new(self.m, self.t, self.t, self.ell, self.s, self.field)
            .expect("single-request invariants imply construction invariants")
    }

    /// Encoding matrix of one pattern under these parameters.
    pub fn base_matrix(&self, pattern: &SegmentPattern) -> Result<FieldMatrix> {
        build_base_matrix(&self.scheme_params(), pattern)
    }

    /// Structural decodability test for one-row-per-segment matrices:
    /// the pair is served iff the request sits in a segment whose other
    /// `ell - 1` indices all belong to the side information. Matches
    /// the rank-based test on every pattern.
    pub fn pattern_satisfies(&self, pattern: &SegmentPattern, pair: &ClientPair) -> bool {
        match pattern.segment_of(pair.request()) {
            None => false,
            Some(j) => pattern.segments()[j]
                .iter()
                .filter(|&&i| i != pair.request())
                .all(|i| pair.side_info().binary_search(i).is_ok()),
        }
    }

    /// Number of patterns that serve a given pair:
    /// `T * C(s, ell-1) * (m-ell)! / ((ell!)^(T-1) * (m-T*ell)!)`.
    /// The factor `T` places the request's segment label, the binomial
    /// picks its segment mates from the side information, and the
    /// multinomial distributes the remaining indices over the other
    /// labeled segments and the zero block. The value is the same for
    /// every pair.
    pub fn satisfying_pattern_count(&self) -> BigInt {
        let (m, t, ell, s) = (self.m as u64, self.t as u64, self.ell as u64, self.s as u64);
        let spread = factorial(m - ell)
            / (num::pow::pow(factorial(ell), (t - 1) as usize) * factorial(m - t * ell));
        BigInt::from(t) * binomial(s as i64, ell as i64 - 1) * spread
    }

    /// Uniformly random satisfying pattern for `pair`, deterministic in
    /// `seed`.
    pub fn sample_satisfying_pattern(
        &self,
        pair: &ClientPair,
        seed: u64,
    ) -> Result<SegmentPattern> {
        if pair.s() != self.s {
            return Err(Error::InvalidParameter(format!(
                "pair has side-information size {}, scheme expects {}",
                pair.s(),
                self.s
            )));
        }
        if pair.request() >= self.m || pair.side_info().iter().any(|&i| i >= self.m) {
            return Err(Error::IndexOutOfRange(
                "pair indices must lie inside the message range".into(),
            ));
        }
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let label = rng.gen_range(0..self.t);
        let mates: Vec<usize> = pair
            .side_info()
            .choose_multiple(&mut rng, self.ell - 1)
            .copied()
            .collect();
        let mut own: Vec<usize> = mates;
        own.push(pair.request());
        own.sort_unstable();

        let mut rest: Vec<usize> = (0..self.m)
            .filter(|i| *i != pair.request() && own.binary_search(i).is_err())
            .collect();
        rest.shuffle(&mut rng);

        let mut segments = vec![Vec::new(); self.t];
        segments[label] = own;
        let mut cursor = 0;
        for (j, seg) in segments.iter_mut().enumerate() {
            if j != label {
                *seg = rest[cursor..cursor + self.ell].to_vec();
                cursor += self.ell;
            }
        }
        SegmentPattern::new(self.m, segments)
    }

    /// Achieved request entropy, `log2(T * ell)` bits.
    pub fn request_entropy(&self) -> f64 {
        log2_big(&BigInt::from((self.t * self.ell) as u64))
    }

    /// Achieved joint entropy, `log2(T * ell * C(m-ell, s-ell+1))`
    /// bits; equals `log2 |D|`.
    pub fn joint_entropy(&self) -> f64 {
        log2_big(&self.decodable_pair_count())
    }

    /// `|D| = T * ell * C(m-ell, s-ell+1)` under `k = T`.
    pub fn decodable_pair_count(&self) -> BigInt {
        BigInt::from((self.t * self.ell) as u64)
            * binomial(
                self.m as i64 - self.ell as i64,
                self.s as i64 - self.ell as i64 + 1,
            )
    }

    /// How far the side-information entropy falls below the joint
    /// entropy, in bits: the multiplicity log sum normalized by `|D|`,
    /// in closed form.
    pub fn side_info_entropy_deficit(&self) -> f64 {
        let denom = binomial(
            self.m as i64 - self.ell as i64,
            self.s as i64 - self.ell as i64 + 1,
        );
        let ell = BigInt::from(self.ell as u64);
        let mut total = 0.0;
        for i in 1..=self.t {
            let num = binomial(
                self.m as i64 - (i * self.ell) as i64,
                self.s as i64 - (i * (self.ell - 1)) as i64,
            );
            if num.is_zero() {
                continue;
            }
            let weight =
                binomial(self.t as i64 - 1, i as i64 - 1) * num::pow::pow(ell.clone(), i - 1) * num;
            total += ratio_to_f64(&weight, &denom) * alternating_log_sum(i);
        }
        total
    }

    /// Achieved side-information entropy: joint entropy minus the
    /// deficit.
    pub fn side_info_entropy(&self) -> f64 {
        self.joint_entropy() - self.side_info_entropy_deficit()
    }

    /// Brute-force route to the same three entropies: build the matrix
    /// for `observed`, enumerate its decodable sets, and read the
    /// entropies off the uniform posterior. Every pattern gives the
    /// same report.
    pub fn entropy_oracle(&self, observed: &SegmentPattern) -> Result<PrivacyReport> {
        let matrix = self.base_matrix(observed)?;
        let sets = enumerate_decodable(&matrix, self.s)?;
        let bounds = universal_bounds(self.m, self.t, self.s)?;
        uniform_posterior_report(&sets, &bounds)
    }

    /// Completions of the side information over `T - x` unconstrained
    /// segments and the zero block, after `x` segments are pinned one
    /// element short: `C(m - x*ell, s - x*(ell-1))`.
    pub fn completion_count(&self, x: usize) -> BigInt {
        debug_assert!(x <= self.t);
        binomial(
            self.m as i64 - (x * self.ell) as i64,
            self.s as i64 - (x * (self.ell - 1)) as i64,
        )
    }

    /// Same count by the explicit occupancy sum (the closed form above
    /// collapses it through Vandermonde's identity).
    pub fn completion_count_raw(&self, x: usize) -> BigInt {
        debug_assert!(x <= self.t);
        self.occupancy_sum(self.t - x, x, false)
    }

    /// Completions in which none of the `T - x` unpinned segments ends
    /// up one element short, so exactly the `x` pinned segments carry a
    /// decodable request.
    pub fn strict_completion_count(&self, x: usize, route: CountRoute) -> BigInt {
        debug_assert!((1..=self.t).contains(&x));
        match route {
            CountRoute::RawSum => self.occupancy_sum(self.t - x, x, true),
            CountRoute::ClosedForm => {
                let n = self.t - x;
                let ell = BigInt::from(self.ell as u64);
                let mut total = BigInt::zero();
                for v in 0..=n {
                    let term = num::pow::pow(ell.clone(), v)
                        * binomial(n as i64, v as i64)
                        * self.completion_count(x + v);
                    if v % 2 == 0 {
                        total += term;
                    } else {
                        total -= term;
                    }
                }
                total
            }
            CountRoute::Recurrence => {
                // c[n] for n unpinned segments; c[0] pins everything.
                let ell = BigInt::from(self.ell as u64);
                let mut c = vec![self.completion_count(self.t)];
                for n in 1..=(self.t - x) {
                    let mut val = self.completion_count(self.t - n);
                    for y in 1..=n {
                        val -= binomial(n as i64, y as i64)
                            * num::pow::pow(ell.clone(), y)
                            * &c[n - y];
                    }
                    c.push(val);
                }
                c[self.t - x].clone()
            }
        }
    }

    /// Sum over occupancies `(l_1..l_n)` of `prod C(ell, l_i)` times
    /// the zero-block binomial, with the budget already reduced by `x`
    /// pinned segments; `exclude_short` skips occupancies equal to
    /// `ell - 1`.
    fn occupancy_sum(&self, n: usize, x: usize, exclude_short: bool) -> BigInt {
        let budget = self.s as i64 - (x * (self.ell - 1)) as i64;
        let zero_cols = self.m as i64 - (self.t * self.ell) as i64;
        let mut total = BigInt::zero();
        let mut stack = vec![(0usize, 0i64, BigInt::one())];
        while let Some((depth, used, weight)) = stack.pop() {
            if depth == n {
                total += weight * binomial(zero_cols, budget - used);
                continue;
            }
            for li in 0..=self.ell {
                if exclude_short && li == self.ell - 1 {
                    continue;
                }
                let w = binomial(self.ell as i64, li as i64);
                if !w.is_zero() {
                    stack.push((depth + 1, used + li as i64, &weight * w));
                }
            }
        }
        total
    }

    /// The multiplicity log sum `sum_S N_S log2 N_S` over the decodable
    /// side-information sets.
    pub fn multiplicity_log_sum(&self, route: SumRoute) -> Result<f64> {
        match route {
            SumRoute::Direct => {
                let pattern = crate::construction::canonical_pattern(&self.scheme_params());
                let matrix = self.base_matrix(&pattern)?;
                let sets = enumerate_decodable(&matrix, self.s)?;
                Ok(sets
                    .counts()
                    .values()
                    .filter(|&&n| n > 1)
                    .map(|&n| n as f64 * log2_big(&BigInt::from(n as u64)))
                    .sum())
            }
            SumRoute::ClosedForm => {
                let ell = BigInt::from(self.ell as u64);
                let mut total = 0.0;
                for i in 1..=self.t {
                    let weight = binomial(self.t as i64 - 1, i as i64 - 1)
                        * num::pow::pow(ell.clone(), i)
                        * self.completion_count(i);
                    let w = weight.to_f64().unwrap_or(f64::INFINITY);
                    total += w * alternating_log_sum(i);
                }
                Ok(self.t as f64 * total)
            }
        }
    }

    /// The transmission space (all patterns) together with the uniform
    /// strategy: each pair draws uniformly among its satisfying
    /// patterns.
    pub fn uniform_strategy(&self) -> Result<(Vec<SegmentPattern>, StrategyTable)> {
        let space: Vec<SegmentPattern> = enumerate_patterns(&self.scheme_params())?.collect();
        let k = self.satisfying_pattern_count();
        let prob = BigRational::new(BigInt::one(), k);
        let mut table = StrategyTable::new();
        for side in (0..self.m).combinations(self.s) {
            for q in 0..self.m {
                if side.binary_search(&q).is_ok() {
                    continue;
                }
                let pair = ClientPair::new(q, side.clone())?;
                for pattern in &space {
                    if self.pattern_satisfies(pattern, &pair) {
                        table.set(pair.clone(), pattern.clone(), prob.clone());
                    }
                }
            }
        }
        Ok((space, table))
    }
}

/// `sum_{x=1}^{i} (-1)^(i-x) C(i-1, x-1) log2(x)`, the alternating
/// inner sum shared by the deficit and the multiplicity log sum.
fn alternating_log_sum(i: usize) -> f64 {
    (1..=i)
        .map(|x| {
            let sign = if (i - x).is_multiple_of(2) { 1.0 } else { -1.0 };
            let coeff = binomial(i as i64 - 1, x as i64 - 1)
                .to_f64()
                .expect("small binomial");
            sign * coeff * (x as f64).log2()
        })
        .sum()
}

//! Trade-off sweeps, asymptotic gap tables, and the self-verification
//! harness behind `verify-all`.

use crate::bounds::{
    base_matrix_pair_count, base_matrix_request_count, uniform_posterior_report, universal_bounds,
    PrivacyReport, BITS_TOL,
};
use crate::construction::{
    build_base_matrix, canonical_pattern, enumerate_patterns, vandermonde_generator, SchemeParams,
};
use crate::counting::{binomial, log2_big, pair_count, pattern_count, ratio_to_f64};
use crate::decodability::{enumerate_decodable, ClientPair};
use crate::error::{Error, Result};
use crate::field::{FieldConfig, FieldMatrix};
use crate::scheme::{CountRoute, SingleRequestParams, SumRoute};
use itertools::Itertools;
use num::bigint::BigInt;
use num::traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use std::fmt::Write as _;

/// Grid for the privacy trade-off sweep: for each transmission count,
/// the segment width ranges over `1..=min(s+1, floor(m/T))`.
#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub m: usize,
    pub s: usize,
    pub t_values: Vec<usize>,
    pub field: FieldConfig,
}

impl SweepSpec {
    /// The classic operating point: `m = 30`, `s = 3`,
    /// `T in {1, 2, 3, 5}`.
    pub fn default_grid() -> Self {
        SweepSpec {
            m: 30,
            s: 3,
            t_values: vec![1, 2, 3, 5],
            field: FieldConfig::default(),
        }
    }
}

/// One sweep point: the three gap ratios in `(0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    pub t: usize,
    pub ell: usize,
    pub r_q: f64,
    pub r_s: f64,
    pub r_joint: f64,
}

/// Sweep results plus any skipped (invalid) grid points.
#[derive(Clone, Debug, Default)]
pub struct SweepTable {
    pub points: Vec<SweepPoint>,
    pub skipped: Vec<String>,
}

/// Evaluates the closed-form gap ratios over the grid, ordered by
/// `(T, ell)`. `r_q` and `r_joint` are exact rationals converted at
/// the end; `r_s` carries the factor `2^-deficit`.
pub fn tradeoff_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    let mut table = SweepTable::default();
    let m = spec.m;
    let s = spec.s;
    for &t in &spec.t_values {
        if t == 0 || m / t == 0 {
            table.skipped.push(format!("T={t}: no admissible ell"));
            continue;
        }
        for ell in 1..=(s + 1).min(m / t) {
            let params = match SingleRequestParams::new(m, t, ell, s, spec.field) {
                Ok(p) => p,
                Err(e) => {
                    table.skipped.push(format!("T={t} ell={ell}: {e}"));
                    continue;
                }
            };
            let d = params.decodable_pair_count();
            let sets = binomial(m as i64, s as i64);
            let r_q = ratio_to_f64(&BigInt::from((t * ell) as u64), &BigInt::from(m as u64));
            let r_joint = ratio_to_f64(&d, &(BigInt::from(t as u64) * &sets));
            let r_s = ratio_to_f64(&d, &sets) * (-params.side_info_entropy_deficit()).exp2();
            table.points.push(SweepPoint {
                t,
                ell,
                r_q,
                r_s,
                r_joint,
            });
        }
    }
    Ok(table)
}

/// Scaling regime: side information `s = floor(c*m)` and segment
/// width `ell = floor(b*m) + 1` for a fixed transmission count.
#[derive(Clone, Debug)]
pub struct AsymptoticSpec {
    pub c: f64,
    pub b: f64,
    pub t: usize,
    pub m_values: Vec<usize>,
    /// Constant complement `s = m - k_c` for the full-privacy MDS
    /// check, when that regime is being studied.
    pub k_c: Option<usize>,
    pub field: FieldConfig,
}

impl AsymptoticSpec {
    pub fn new(c: f64, b: f64, t: usize, m_values: Vec<usize>) -> Result<Self> {
        if !(0.0..1.0).contains(&c) || !(0.0..1.0).contains(&b) || b > c {
            return Err(Error::InvalidParameter(format!(
                "fractions must satisfy 0 <= b <= c < 1, got b={b}, c={c}"
            )));
        }
        if t == 0 {
            return Err(Error::InvalidParameter("T must be positive".into()));
        }
        Ok(AsymptoticSpec {
            c,
            b,
            t,
            m_values,
            k_c: None,
            field: FieldConfig::default(),
        })
    }
}

/// One asymptotic point. The request gap is measured against `log2 m`;
/// the joint gap against `log2 C(m,s)`; `g_s_upper` is the
/// conditioning bound `log2 C(m,s) - (lb_joint - lb_q)`, an upper
/// bound on the side-information gap.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapPoint {
    pub m: usize,
    pub s: usize,
    pub ell: usize,
    pub g_q: f64,
    pub g_joint: f64,
    pub g_s_upper: f64,
}

/// Gap table plus skipped points (those failing the width constraint
/// after discretization).
#[derive(Clone, Debug, Default)]
pub struct GapTable {
    pub points: Vec<GapPoint>,
    pub skipped: Vec<String>,
}

/// Evaluates the exact gaps along the scaling regime, flooring the
/// fractional parameters and revalidating each point.
pub fn asymptotic_gaps(spec: &AsymptoticSpec) -> Result<GapTable> {
    let mut table = GapTable::default();
    for &m in &spec.m_values {
        let s = (spec.c * m as f64).floor() as usize;
        let ell = (spec.b * m as f64).floor() as usize + 1;
        let params = match SingleRequestParams::new(m, spec.t, ell, s, spec.field) {
            Ok(p) => p,
            Err(e) => {
                table.skipped.push(format!("m={m}: {e}"));
                continue;
            }
        };
        let lb_q = params.request_entropy();
        let lb_joint = params.joint_entropy();
        let log_sets = log2_big(&binomial(m as i64, s as i64));
        table.points.push(GapPoint {
            m,
            s,
            ell,
            g_q: log2_big(&BigInt::from(m as u64)) - lb_q,
            g_joint: log_sets - lb_joint,
            g_s_upper: log_sets - (lb_joint - lb_q),
        });
    }
    Ok(table)
}

/// Full-privacy regime: with `s = m - k_c`, a single `[m, k_c]` MDS
/// generator makes every request and every side-information set
/// decodable, so both marginal entropies meet their universal bounds.
pub fn mds_full_privacy_check(m: usize, k_c: usize, field: FieldConfig) -> Result<PrivacyReport> {
    if k_c == 0 || k_c >= m {
        return Err(Error::InvalidParameter(format!(
            "k_c = {k_c} must lie in 1..{m} so that s = m - k_c is a valid size"
        )));
    }
    let s = m - k_c;
    let matrix = vandermonde_generator(m, k_c, field)?;
    let sets = enumerate_decodable(&matrix, s)?;
    let bounds = universal_bounds(m, k_c, s)?;
    uniform_posterior_report(&sets, &bounds)
}

/// One verification outcome, serializable as a JSON line.
#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub params: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

impl CheckRecord {
    /// Equality check between an expected and an actual rendering.
    pub fn compare(
        check: &str,
        params: impl ToString,
        expected: impl ToString,
        actual: impl ToString,
    ) -> Self {
        let expected = expected.to_string();
        let actual = actual.to_string();
        CheckRecord {
            check: check.to_string(),
            params: params.to_string(),
            pass: expected == actual,
            expected,
            actual,
        }
    }

    /// Tolerance check between two bit values.
    pub fn compare_bits(check: &str, params: impl ToString, expected: f64, actual: f64) -> Self {
        CheckRecord {
            check: check.to_string(),
            params: params.to_string(),
            expected: format!("{expected}"),
            actual: format!("{actual}"),
            pass: (expected - actual).abs() <= BITS_TOL,
        }
    }
}

/// All verification outcomes of one `verify-all` run.
#[derive(Clone, Debug, Default)]
pub struct VerificationReport {
    pub records: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> Vec<&CheckRecord> {
        self.records.iter().filter(|r| !r.pass).collect()
    }

    /// Human-readable per-check pass counts.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        let mut names: Vec<&str> = self.records.iter().map(|r| r.check.as_str()).collect();
        names.dedup();
        let mut seen = Vec::new();
        for name in names {
            if seen.contains(&name) {
                continue;
            }
            seen.push(name);
            let total = self.records.iter().filter(|r| r.check == name).count();
            let passed = self
                .records
                .iter()
                .filter(|r| r.check == name && r.pass)
                .count();
            let mark = if passed == total { "ok" } else { "FAIL" };
            let _ = writeln!(out, "{mark:>4}  {name}: {passed}/{total}");
        }
        let failures = self.failures();
        if failures.is_empty() {
            let _ = writeln!(out, "all {} checks passed", self.records.len());
        } else {
            let _ = writeln!(
                out,
                "{} of {} checks FAILED",
                failures.len(),
                self.records.len()
            );
            for f in failures.iter().take(20) {
                let _ = writeln!(
                    out,
                    "      {} [{}]: expected {}, got {}",
                    f.check, f.params, f.expected, f.actual
                );
            }
        }
        out
    }

    /// One JSON object per line, in record order.
    pub fn to_json_lines(&self) -> String {
        self.records
            .iter()
            .map(|r| serde_json::to_string(r).expect("record serializes"))
            .join("\n")
    }
}

/// Runs every grid-based equivalence suite up to the given message
/// count: closed-form counts against enumeration, the entropy closed
/// forms against the brute-force oracle, the completion-count routes
/// against each other, the satisfying-count identities against full
/// pattern enumeration, the universal bounds on random matrices, and
/// the full-privacy MDS regime.
pub fn run_verification(max_m: usize) -> Result<VerificationReport> {
    let field = FieldConfig::default();
    let mut report = VerificationReport::default();

    // Closed-form decodable counts vs. exhaustive enumeration.
    for m in 2..=max_m {
        for t in [1usize, 2, 3, 4] {
            for k in 1..=t {
                if t % k != 0 {
                    continue;
                }
                let r = t / k;
                for s in 1..m {
                    for ell in r.max(1)..=(s + r).min(m / k) {
                        let Ok(p) = SchemeParams::new(m, t, k, ell, s, field) else {
                            continue;
                        };
                        let matrix = build_base_matrix(&p, &canonical_pattern(&p))?;
                        let sets = enumerate_decodable(&matrix, s)?;
                        let tag = format!("m={m} T={t} k={k} ell={ell} s={s}");
                        report.records.push(CheckRecord::compare(
                            "pair_count",
                            &tag,
                            base_matrix_pair_count(&p, s)?,
                            sets.len(),
                        ));
                        report.records.push(CheckRecord::compare(
                            "request_count",
                            &tag,
                            base_matrix_request_count(&p),
                            sets.requests().len(),
                        ));
                    }
                }
            }
        }
    }

    // Entropy closed forms vs. the enumeration oracle, plus the
    // completion-count chain.
    for m in 2..=max_m {
        for t in 1..=3usize.min(m) {
            for s in 1..m {
                for ell in 1..=(s + 1).min(m / t) {
                    let Ok(p) = SingleRequestParams::new(m, t, ell, s, field) else {
                        continue;
                    };
                    let tag = format!("m={m} T={t} ell={ell} s={s}");
                    let oracle = p.entropy_oracle(&canonical_pattern(&p.scheme_params()))?;
                    report.records.push(CheckRecord::compare_bits(
                        "joint_entropy",
                        &tag,
                        p.joint_entropy(),
                        oracle.h_joint,
                    ));
                    report.records.push(CheckRecord::compare_bits(
                        "request_entropy",
                        &tag,
                        p.request_entropy(),
                        oracle.h_q,
                    ));
                    report.records.push(CheckRecord::compare_bits(
                        "side_info_entropy",
                        &tag,
                        p.side_info_entropy(),
                        oracle.h_s,
                    ));

                    let completions_agree =
                        (0..=t).all(|x| p.completion_count(x) == p.completion_count_raw(x));
                    report.records.push(CheckRecord::compare(
                        "completion_count",
                        &tag,
                        "raw = closed",
                        if completions_agree {
                            "raw = closed"
                        } else {
                            "mismatch"
                        },
                    ));
                    let strict_agree = (1..=t).all(|x| {
                        let a = p.strict_completion_count(x, CountRoute::Recurrence);
                        let b = p.strict_completion_count(x, CountRoute::ClosedForm);
                        let c = p.strict_completion_count(x, CountRoute::RawSum);
                        a == b && b == c
                    });
                    report.records.push(CheckRecord::compare(
                        "strict_completion_count",
                        &tag,
                        "all routes equal",
                        if strict_agree {
                            "all routes equal"
                        } else {
                            "mismatch"
                        },
                    ));
                    report.records.push(CheckRecord::compare_bits(
                        "multiplicity_log_sum",
                        &tag,
                        p.multiplicity_log_sum(SumRoute::ClosedForm)?,
                        p.multiplicity_log_sum(SumRoute::Direct)?,
                    ));
                    let d = p.decodable_pair_count().to_f64().expect("desk-scale count");
                    let nbar = p.multiplicity_log_sum(SumRoute::Direct)?;
                    report.records.push(CheckRecord::compare_bits(
                        "entropy_decomposition",
                        &tag,
                        oracle.h_joint - nbar / d,
                        oracle.h_s,
                    ));
                }
            }
        }
    }

    // Satisfying-pattern counts against full pattern enumeration.
    for m in 2..=max_m.min(8) {
        let t = 2;
        for ell in 1..=2usize {
            for s in 1..m {
                let Ok(p) = SingleRequestParams::new(m, t, ell, s, field) else {
                    continue;
                };
                let tag = format!("m={m} T={t} ell={ell} s={s}");
                let patterns: Vec<_> = enumerate_patterns(&p.scheme_params())?.collect();
                let expect = p.satisfying_pattern_count();
                let mut per_pair_ok = true;
                let mut total_decodable = BigInt::zero();
                for side in (0..m).combinations(s) {
                    for q in 0..m {
                        if side.binary_search(&q).is_ok() {
                            continue;
                        }
                        let pair = ClientPair::new(q, side.clone())?;
                        let n = patterns
                            .iter()
                            .filter(|pat| p.pattern_satisfies(pat, &pair))
                            .count();
                        total_decodable += BigInt::from(n as u64);
                        if BigInt::from(n as u64) != expect {
                            per_pair_ok = false;
                        }
                    }
                }
                report.records.push(CheckRecord::compare(
                    "satisfying_count",
                    &tag,
                    "uniform over pairs",
                    if per_pair_ok {
                        "uniform over pairs"
                    } else {
                        "mismatch"
                    },
                ));
                // K * #pairs = #patterns * |D|; the right side comes
                // from the enumeration above, the left from the
                // closed forms.
                let lhs = expect * pair_count(m as u64, s as u64);
                report.records.push(CheckRecord::compare(
                    "double_counting",
                    &tag,
                    lhs,
                    &total_decodable,
                ));
                let per_pattern =
                    pattern_count(m as u64, t as u64, ell as u64) * p.decodable_pair_count();
                report.records.push(CheckRecord::compare(
                    "pattern_pair_product",
                    &tag,
                    per_pattern,
                    &total_decodable,
                ));
            }
        }
    }

    // Universal bounds on random matrices.
    let mut rng = ChaCha20Rng::seed_from_u64(0xC0FFEE);
    for i in 0..200 {
        let m = rng.gen_range(2..=max_m.clamp(2, 10));
        let t = rng.gen_range(1..=4usize);
        let entries: Vec<u64> = (0..t * m).map(|_| rng.gen_range(0..257)).collect();
        let matrix = FieldMatrix::new(t, m, entries, field)?;
        let mut ok = true;
        for s in 1..m {
            let sets = enumerate_decodable(&matrix, s)?;
            let b = universal_bounds(m, t, s)?;
            if BigInt::from(sets.len() as u64) > b.joint
                || BigInt::from(sets.requests().len() as u64) > b.request
                || BigInt::from(sets.side_infos().len() as u64) > b.side_info
            {
                ok = false;
            }
        }
        report.records.push(CheckRecord::compare(
            "universal_bounds",
            format!("random matrix #{i} m={m} T={t}"),
            "within bounds",
            if ok { "within bounds" } else { "violation" },
        ));
    }

    // Full-privacy MDS regime.
    for k_c in 1..=3usize {
        for m in (k_c + 1)..=max_m {
            let s = m - k_c;
            let matrix = vandermonde_generator(m, k_c, field)?;
            let sets = enumerate_decodable(&matrix, s)?;
            let tag = format!("m={m} k_c={k_c}");
            report.records.push(CheckRecord::compare(
                "mds_requests",
                &tag,
                m,
                sets.requests().len(),
            ));
            report.records.push(CheckRecord::compare(
                "mds_side_infos",
                &tag,
                binomial(m as i64, s as i64),
                sets.side_infos().len(),
            ));
            report.records.push(CheckRecord::compare(
                "mds_pairs",
                &tag,
                BigInt::from(m as u64) * binomial(m as i64 - 1, s as i64),
                sets.len(),
            ));
        }
    }

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_spot_values() {
        let table = tradeoff_sweep(&SweepSpec::default_grid()).unwrap();
        assert!(table.skipped.is_empty());
        let point = |t, ell| {
            *table
                .points
                .iter()
                .find(|p| p.t == t && p.ell == ell)
                .unwrap()
        };
        assert_eq!(point(3, 4).r_q, 0.4);
        assert_eq!(point(3, 1).r_joint, 0.9);
        // ell = s + 1 makes r_s = T*ell / C(m,s) exactly.
        let p = point(2, 4);
        let expect = ratio_to_f64(&BigInt::from(8), &binomial(30, 3));
        assert!((p.r_s - expect).abs() < 1e-15);
    }

    #[test]
    fn sweep_is_ordered_and_in_unit_interval() {
        let table = tradeoff_sweep(&SweepSpec::default_grid()).unwrap();
        let keys: Vec<(usize, usize)> = table.points.iter().map(|p| (p.t, p.ell)).collect();
        let mut sorted = keys.clone();
        sorted.sort_unstable();
        assert_eq!(keys, sorted);
        for p in &table.points {
            for r in [p.r_q, p.r_s, p.r_joint] {
                assert!(r > 0.0 && r <= 1.0, "ratio {r} at T={} ell={}", p.t, p.ell);
            }
        }
    }

    #[test]
    fn ratios_nondecreasing_in_transmission_count() {
        let table = tradeoff_sweep(&SweepSpec::default_grid()).unwrap();
        for ell in 1..=4usize {
            let column: Vec<&SweepPoint> = table.points.iter().filter(|p| p.ell == ell).collect();
            for w in column.windows(2) {
                assert!(w[1].r_q >= w[0].r_q, "r_q drops at ell={ell} T={}", w[1].t);
                assert!(
                    w[1].r_s >= w[0].r_s - 1e-15,
                    "r_s drops at ell={ell} T={}",
                    w[1].t
                );
            }
        }
    }

    #[test]
    fn asymptotic_case_two_flat_joint_gap() {
        let spec = AsymptoticSpec::new(0.5, 0.0, 2, (10..=40).step_by(2).collect()).unwrap();
        let table = asymptotic_gaps(&spec).unwrap();
        assert!(table.skipped.is_empty());
        for p in &table.points {
            assert_eq!(p.g_joint, 0.0, "m={}", p.m);
            let log_m_over_t = log2_big(&BigInt::from(p.m as u64)) - 1.0;
            assert!((p.g_q - log_m_over_t).abs() < 1e-12);
        }
    }

    #[test]
    fn asymptotic_joint_gap_is_constant_whenever_cm_is_integral() {
        // With ell = 1 the joint gap reduces to log2(m / (T (m - s))),
        // a constant in m when s = c m.
        for (c, t, ms) in [
            (0.25, 2usize, vec![8usize, 16, 24, 32]),
            (0.5, 3, vec![12, 18, 24, 30]),
        ] {
            let spec = AsymptoticSpec::new(c, 0.0, t, ms).unwrap();
            let table = asymptotic_gaps(&spec).unwrap();
            assert!(table.skipped.is_empty());
            for p in &table.points {
                let expect = (p.m as f64 / (t as f64 * (p.m - p.s) as f64)).log2();
                assert!(
                    (p.g_joint - expect).abs() < 1e-12,
                    "m={} c={c} T={t}: {} vs {expect}",
                    p.m,
                    p.g_joint
                );
            }
        }
    }

    #[test]
    fn asymptotic_b_equals_c_kills_deficit() {
        let spec = AsymptoticSpec::new(0.25, 0.25, 2, vec![8, 12, 16, 20]).unwrap();
        let table = asymptotic_gaps(&spec).unwrap();
        for p in &table.points {
            assert_eq!(p.ell, p.s + 1);
            let params =
                SingleRequestParams::new(p.m, 2, p.ell, p.s, FieldConfig::default()).unwrap();
            assert_eq!(params.side_info_entropy_deficit(), 0.0);
            // g_q <= log2(1/(T c)) holds exactly after flooring.
            assert!(p.g_q <= (1.0f64 / (2.0 * 0.25)).log2() + 1e-12);
        }
    }

    #[test]
    fn asymptotic_spec_validation() {
        assert!(AsymptoticSpec::new(0.5, 0.6, 2, vec![10]).is_err());
        assert!(AsymptoticSpec::new(1.2, 0.0, 2, vec![10]).is_err());
        assert!(AsymptoticSpec::new(0.5, 0.0, 0, vec![10]).is_err());
    }

    #[test]
    fn mds_check_small_cases() {
        let field = FieldConfig::default();
        let rep = mds_full_privacy_check(6, 2, field).unwrap();
        assert!(rep.full_request_privacy());
        assert!(rep.full_side_info_privacy());
        assert!(mds_full_privacy_check(6, 0, field).is_err());
        assert!(mds_full_privacy_check(6, 6, field).is_err());
    }

    #[test]
    fn corrupted_value_is_reported_as_failure() {
        // An off-by-one in a closed form must surface as pass = false.
        let good = CheckRecord::compare("demo", "p", 16, 16);
        assert!(good.pass);
        let bad = CheckRecord::compare("demo", "p", 16, 17);
        assert!(!bad.pass);
        let bits = CheckRecord::compare_bits("demo", "p", 3.5, 3.5 + 2e-9);
        assert!(!bits.pass);
        let close = CheckRecord::compare_bits("demo", "p", 3.5, 3.5 + 2e-10);
        assert!(close.pass);
    }

    #[test]
    fn verification_passes_on_small_grid() {
        let report = run_verification(5).unwrap();
        assert!(report.all_pass(), "{}", report.summary());
        assert!(report.records.len() > 100);
        let json = report.to_json_lines();
        assert!(json.lines().count() == report.records.len());
        assert!(json.contains("\"check\":\"pair_count\""));
    }
}

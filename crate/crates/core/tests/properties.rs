//! Randomized invariants: structural properties of the linear algebra,
//! decodability, and the posterior engine on small instances.

use icpriv::bounds::{check_uniformity, posterior_entropies, universal_bounds, Conditioning};
use icpriv::construction::{build_base_matrix, canonical_pattern, SchemeParams};
use icpriv::counting::log2_big;
use icpriv::decodability::{enumerate_decodable, is_decodable, recover_message, ClientPair};
use icpriv::field::{in_span, solve_left, FieldConfig, FieldMatrix};
use icpriv::scheme::SingleRequestParams;
use icpriv::StrategyTable;
use itertools::Itertools;
use num::bigint::BigInt;
use num::rational::BigRational;
use proptest::prelude::*;
use std::collections::BTreeMap;

fn arb_field() -> impl Strategy<Value = FieldConfig> {
    prop_oneof![
        Just(FieldConfig::new(2).unwrap()),
        Just(FieldConfig::new(7).unwrap()),
        Just(FieldConfig::new(257).unwrap()),
    ]
}

prop_compose! {
    fn arb_matrix(max_rows: usize, max_cols: usize)
        (field in arb_field(), rows in 1..=max_rows, cols in 1..=max_cols)
        (entries in proptest::collection::vec(0u64..1_000_000, rows * cols),
         rows in Just(rows), cols in Just(cols), field in Just(field))
        -> FieldMatrix
    {
        let l = field.modulus();
        let entries = entries.into_iter().map(|e| e % l).collect();
        FieldMatrix::new(rows, cols, entries, field).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rank_bounded_and_permutation_invariant(
        m in arb_matrix(4, 8),
        row_seed in 0usize..1000,
        col_seed in 0usize..1000,
    ) {
        let rank = m.rank();
        prop_assert!(rank <= m.rows().min(m.cols()));

        // Rotate rows and columns by the seeds.
        let rows: Vec<Vec<u64>> = (0..m.rows())
            .map(|r| {
                let r = (r + row_seed) % m.rows();
                (0..m.cols()).map(|c| m.get(r, (c + col_seed) % m.cols())).collect()
            })
            .collect();
        let shuffled = FieldMatrix::from_rows(&rows, m.field()).unwrap();
        prop_assert_eq!(shuffled.rank(), rank);
    }

    #[test]
    fn span_membership_has_witness(
        m in arb_matrix(4, 8),
        coeffs in proptest::collection::vec(0u64..1_000_000, 8),
    ) {
        // v = M c is always in the span, and a solve recovers some
        // witness c' with M c' = v.
        let l = m.field().modulus();
        let c: Vec<u64> = coeffs.iter().take(m.cols()).map(|&x| x % l).collect();
        let v = m.mul_vector(&c).unwrap();
        prop_assert!(in_span(&v, &m).unwrap());
        let witness = solve_left(&m.transpose(), &v).unwrap().expect("v is in the span");
        prop_assert_eq!(m.mul_vector(&witness).unwrap(), v);
    }

    #[test]
    fn span_is_monotone_in_columns(
        m in arb_matrix(4, 8),
        keep in proptest::collection::vec(any::<bool>(), 8),
        coeffs in proptest::collection::vec(0u64..1_000_000, 8),
    ) {
        let l = m.field().modulus();
        let cols: Vec<usize> = (0..m.cols()).filter(|&c| keep[c]).collect();
        let sub = m.column_submatrix(&cols);
        let c: Vec<u64> = coeffs.iter().take(cols.len()).map(|&x| x % l).collect();
        let v = sub.mul_vector(&c).unwrap();
        prop_assert!(in_span(&v, &sub).unwrap());
        prop_assert!(in_span(&v, &m).unwrap());
    }

    #[test]
    fn decodability_is_monotone_in_side_information(
        m in arb_matrix(3, 8),
        q in 0usize..8,
        picks in proptest::collection::vec(any::<bool>(), 8),
        extras in proptest::collection::vec(any::<bool>(), 8),
    ) {
        let cols = m.cols();
        let q = q % cols;
        let small: Vec<usize> = (0..cols).filter(|&i| i != q && picks[i]).collect();
        let large: Vec<usize> = (0..cols)
            .filter(|&i| i != q && (picks[i] || extras[i]))
            .collect();
        let p_small = ClientPair::new(q, small).unwrap();
        let p_large = ClientPair::new(q, large).unwrap();
        if is_decodable(&m, &p_small).unwrap() {
            prop_assert!(is_decodable(&m, &p_large).unwrap());
        }
    }

    #[test]
    fn per_set_requests_are_independent_columns(
        m in arb_matrix(4, 7),
        s in 1usize..7,
    ) {
        prop_assume!(s < m.cols());
        let sets = enumerate_decodable(&m, s).unwrap();
        for (side, &count) in sets.counts() {
            prop_assert!(count <= m.rows());
            let requests: Vec<usize> = sets
                .pairs()
                .iter()
                .filter(|p| p.side_info() == side.as_slice())
                .map(|p| p.request())
                .collect();
            let sub = m.column_submatrix(&requests);
            prop_assert_eq!(sub.rank(), requests.len());
        }
    }

    #[test]
    fn recovery_round_trips(
        m in arb_matrix(3, 6),
        s in 1usize..6,
        message in proptest::collection::vec(0u64..1_000_000, 6),
    ) {
        prop_assume!(s < m.cols());
        let l = m.field().modulus();
        let b: Vec<u64> = message.iter().take(m.cols()).map(|&x| x % l).collect();
        let y = m.mul_vector(&b).unwrap();
        let sets = enumerate_decodable(&m, s).unwrap();
        for pair in sets.pairs().iter().take(10) {
            let known: BTreeMap<usize, u64> =
                pair.side_info().iter().map(|&j| (j, b[j])).collect();
            let got = recover_message(&m, &y, pair, &known).unwrap();
            prop_assert_eq!(got, b[pair.request()], "pair {}", pair);
        }
    }

    #[test]
    fn universal_bounds_hold_for_random_matrices(
        m in arb_matrix(4, 10),
        s in 1usize..10,
    ) {
        prop_assume!(s < m.cols());
        let sets = enumerate_decodable(&m, s).unwrap();
        let b = universal_bounds(m.cols(), m.rows(), s).unwrap();
        prop_assert!(BigInt::from(sets.len() as u64) <= b.joint);
        prop_assert!(BigInt::from(sets.requests().len() as u64) <= b.request);
        prop_assert!(BigInt::from(sets.side_infos().len() as u64) <= b.side_info);
    }
}

// Weighted random strategies still respect the entropy bounds of the
// observed matrix's decodable sets.
proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn posterior_entropy_never_exceeds_set_bounds(
        weight_seed in 0u64..10_000,
        observed_index in 0usize..1000,
    ) {
        let p = SingleRequestParams::new(5, 2, 2, 2, FieldConfig::default()).unwrap();
        let (space, _) = p.uniform_strategy().unwrap();
        // Deterministic pseudo-random positive weights per (pair, pattern).
        let mut table = StrategyTable::new();
        let mut state = weight_seed.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
        for side in (0..5usize).combinations(2) {
            for q in 0..5 {
                if side.binary_search(&q).is_ok() {
                    continue;
                }
                let pair = ClientPair::new(q, side.clone()).unwrap();
                let satisfying: Vec<_> = space
                    .iter()
                    .filter(|pat| p.pattern_satisfies(pat, &pair))
                    .collect();
                let mut weights = Vec::new();
                for _ in &satisfying {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    weights.push((state >> 33) % 97 + 1);
                }
                let total: u64 = weights.iter().sum();
                for (pat, w) in satisfying.iter().zip(weights) {
                    table.set(
                        pair.clone(),
                        (*pat).clone(),
                        BigRational::new(BigInt::from(w), BigInt::from(total)),
                    );
                }
            }
        }
        let observed = &space[observed_index % space.len()];
        let params = p.scheme_params();
        let cond = Conditioning::new(2);
        let report = posterior_entropies(&params, &space, &table, observed, &cond).unwrap();

        let matrix = build_base_matrix(&params, observed).unwrap();
        let sets = enumerate_decodable(&matrix, 2).unwrap();
        let tol = 1e-9;
        prop_assert!(report.h_joint <= log2_big(&BigInt::from(sets.len() as u64)) + tol);
        prop_assert!(report.h_q <= log2_big(&BigInt::from(sets.requests().len() as u64)) + tol);
        prop_assert!(report.h_s <= log2_big(&BigInt::from(sets.side_infos().len() as u64)) + tol);
    }
}

/// Decodable sets do not change when columns are permuted inside a
/// segment (equivalently, when different MDS evaluation points are
/// assigned within the segment).
#[test]
fn decodable_sets_ignore_within_segment_order() {
    let field = FieldConfig::default();
    for (m, t, k, ell, s) in [
        (6usize, 2usize, 2usize, 2usize, 2usize),
        (8, 4, 2, 3, 2),
        (6, 3, 3, 2, 1),
    ] {
        let p = SchemeParams::new(m, t, k, ell, s, field).unwrap();
        let pattern = canonical_pattern(&p);
        let a = build_base_matrix(&p, &pattern).unwrap();
        // Swap the first two columns of each segment in the raw matrix.
        let mut rows: Vec<Vec<u64>> = (0..a.rows())
            .map(|r| (0..a.cols()).map(|c| a.get(r, c)).collect())
            .collect();
        for seg in pattern.segments() {
            if seg.len() >= 2 {
                for row in rows.iter_mut() {
                    row.swap(seg[0], seg[1]);
                }
            }
        }
        let b = FieldMatrix::from_rows(&rows, field).unwrap();
        for size in 1..m {
            let da = enumerate_decodable(&a, size).unwrap();
            let db = enumerate_decodable(&b, size).unwrap();
            assert_eq!(
                da.pairs(),
                db.pairs(),
                "m={m} t={t} k={k} ell={ell} size={size}"
            );
        }
    }
}

/// Decodable sets are also independent of the field the MDS generator
/// is evaluated over, so no result depends on the choice of
/// evaluation points.
#[test]
fn decodable_sets_ignore_field_choice() {
    for (m, t, k, ell, s) in [(6usize, 2usize, 2usize, 2usize, 2usize), (8, 4, 2, 3, 2)] {
        let mut reference = None;
        for l in [101u64, 257, 65537] {
            let field = FieldConfig::new(l).unwrap();
            let p = SchemeParams::new(m, t, k, ell, s, field).unwrap();
            let a = build_base_matrix(&p, &canonical_pattern(&p)).unwrap();
            let sets = enumerate_decodable(&a, s).unwrap();
            match &reference {
                None => reference = Some(sets),
                Some(r) => assert_eq!(r.pairs(), sets.pairs(), "m={m} t={t} L={l}"),
            }
        }
    }
}

/// The conditioning inequality: the side-information deficit never
/// exceeds the request entropy, so h_s >= h_joint - h_q.
#[test]
fn deficit_bounded_by_request_entropy() {
    let field = FieldConfig::default();
    for m in 2..=10usize {
        for t in 1..=3usize.min(m) {
            for s in 1..m {
                for ell in 1..=(s + 1).min(m / t) {
                    let Ok(p) = SingleRequestParams::new(m, t, ell, s, field) else {
                        continue;
                    };
                    let deficit = p.side_info_entropy_deficit();
                    assert!(
                        deficit <= p.request_entropy() + 1e-9,
                        "m={m} t={t} ell={ell} s={s}: deficit {deficit}"
                    );
                    assert!(deficit >= -1e-12);
                }
            }
        }
    }
}

/// Uniformity flags under the uniform scheme strategy: joint and
/// request posteriors are always uniform; the side-information
/// posterior is uniform exactly when every multiplicity is one
/// (ell = s + 1).
#[test]
fn scheme_strategy_uniformity_flags() {
    let field = FieldConfig::default();
    for (m, t, ell, s, expect_side) in [
        (6usize, 2usize, 2usize, 2usize, false),
        (5, 2, 1, 1, false),
        (5, 2, 2, 1, true), // ell = s + 1
        (6, 2, 3, 2, true), // ell = s + 1
    ] {
        let p = SingleRequestParams::new(m, t, ell, s, field).unwrap();
        let (space, table) = p.uniform_strategy().unwrap();
        let params = p.scheme_params();
        let cond = Conditioning::new(s);
        let flags = check_uniformity(&params, &space, &table, &space[0], &cond).unwrap();
        assert!(flags.joint, "joint flag at m={m} ell={ell} s={s}");
        assert!(flags.request, "request flag at m={m} ell={ell} s={s}");
        assert_eq!(
            flags.side_info, expect_side,
            "side flag at m={m} ell={ell} s={s}"
        );
    }
}

/// An MDS generator reaches the universal request bound whenever the
/// side information is large enough: for s >= m - T every outside
/// request decodes, so |D^Q| = m and |D| = m * C(m-1, s).
#[test]
fn mds_generator_reaches_request_bound() {
    use icpriv::construction::vandermonde_generator;
    use icpriv::counting::binomial;
    let field = FieldConfig::default();
    for m in 2..=8usize {
        for t in 1..m.min(5) {
            let g = vandermonde_generator(m, t, field).unwrap();
            for s in (m - t).max(1)..m {
                let sets = enumerate_decodable(&g, s).unwrap();
                assert_eq!(sets.requests().len(), m, "m={m} t={t} s={s}");
                assert_eq!(
                    BigInt::from(sets.len() as u64),
                    BigInt::from(m as u64) * binomial(m as i64 - 1, s as i64),
                    "m={m} t={t} s={s}"
                );
            }
        }
    }
}

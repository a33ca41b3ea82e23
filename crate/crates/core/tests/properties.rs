use ipslq_core::arith::{parse_decimal, PrecisionContext, Real};
use ipslq_core::ipslq::StageOutcome;
use ipslq_core::minpoly::{minpoly, powers_vector, MinPolyOptions, MinPolyRequest};
use ipslq_core::oracle::{brute_force_relation, exact_minpoly_radical_sum, plant_relation};
use ipslq_core::pslq::{canonical_sign, default_gamma, int_norm, pslq, Outcome};
use ipslq_core::ipslq;
use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use proptest::prelude::*;

fn ctx(digits: u32) -> PrecisionContext {
    PrecisionContext::new(digits, 0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn power_of_two_scaling_keeps_the_trajectory(
        entries in prop::collection::vec(1.0f64..2.0, 2..6),
        e in -40i64..40,
        bound in 1i64..20,
    ) {
        let c = ctx(30);
        let g = default_gamma(&c);
        let x: Vec<Real> = entries.iter().map(|&v| c.f64(v)).collect();
        let y: Vec<Real> = x.iter().map(|v| v.mul_pow2(e)).collect();
        let a = ipslq(&x, &c.int(bound), &g, &c).unwrap();
        let b = ipslq(&y, &c.int(bound), &g, &c).unwrap();
        prop_assert_eq!(a.iterations, b.iterations);
        prop_assert_eq!(a.swaps, b.swaps);
        prop_assert_eq!(a.outcome.relation(), b.outcome.relation());
        prop_assert_eq!(a.stages, b.stages);
    }

    #[test]
    fn decimal_round_trip(v in prop::num::f64::NORMAL, digits in 1u32..60) {
        let c = ctx(digits);
        let r = c.f64(v).with_precision(c.precision_bits());
        let text = r.to_decimal_string(r.round_trip_digits());
        prop_assert_eq!(parse_decimal(&text, &c).unwrap(), r);
    }

    #[test]
    fn bounds_on_small_rationals_are_sound(
        fracs in prop::collection::vec((1i64..7, 1u32..7), 2..5),
        bound in 1i64..6,
    ) {
        let c = ctx(40);
        let x: Vec<Real> = fracs
            .iter()
            .map(|&(p, q)| Real::from_ratio(&BigInt::from(p), &BigUint::from(q), c.precision_bits()))
            .collect();
        let out = ipslq(&x, &c.int(bound), &default_gamma(&c), &c).unwrap();
        match out.outcome {
            Outcome::Bound(_) => {
                let found = brute_force_relation(&x, &c.int(bound), &c.eps_residual(), &c).unwrap();
                prop_assert!(found.is_none(), "bound {} but {:?} exists", bound, found);
            }
            Outcome::Relation { relation, .. } => {
                // exact check: sum m_i p_i / q_i = 0
                let lcm: i64 = fracs.iter().fold(1, |l, &(_, q)| num_integer::lcm(l, i64::from(q)));
                let total: BigInt = relation
                    .iter()
                    .zip(&fracs)
                    .map(|(m, &(p, q))| m * BigInt::from(p * (lcm / i64::from(q))))
                    .sum();
                prop_assert!(total.is_zero(), "{:?} is not a relation", relation);
            }
        }
    }

    #[test]
    fn planted_relations_agree(seed in 0u64..10_000, n in 2usize..6, coeff in 1u32..9) {
        let c = ctx(40);
        let g = default_gamma(&c);
        let inst = plant_relation(seed, n, coeff, &c).unwrap();
        let m = int_norm(&inst.m, &c);
        let inc = ipslq(&inst.x, &m, &g, &c).unwrap();
        let classic = pslq(&inst.x, &m, &g, &c).unwrap();
        prop_assert!(inc.outcome.is_relation() && classic.outcome.is_relation());
        let limit = &g.powi(n as u32 - 2) * &m;
        prop_assert!(int_norm(inc.outcome.relation().unwrap(), &c) <= limit);
    }
}

fn radical_sum(s: u32, t: u32, c: &PrecisionContext) -> Real {
    &c.int(3).nth_root(s) + &c.int(2).nth_root(t)
}

// (s, t, d, M) for the first table rows
const ROWS: [(u32, u32, usize, u64); 4] = [(2, 2, 5, 10), (2, 3, 7, 36), (3, 3, 10, 125), (3, 4, 13, 540)];

#[test]
fn incremental_swaps_never_exceed_fresh_suffix_runs() {
    let c = ctx(300);
    let g = default_gamma(&c);
    for (s, t, d, m) in ROWS {
        let alpha = radical_sum(s, t, &c);
        let x = powers_vector(&alpha, d + 1, &c).unwrap();
        let bound = c.int(m as i64 + 1);
        let inc = ipslq(&x, &bound, &g, &c).unwrap();
        let last = inc.stages.last().unwrap().window_start;
        let fresh: u64 = (last..x.len() - 1)
            .map(|k| pslq(&x[k..], &bound, &g, &c).unwrap().swaps)
            .sum();
        assert!(inc.swaps <= fresh, "row ({s},{t}): {} swaps vs {fresh}", inc.swaps);
    }
}

#[test]
fn stages_walk_left_one_coordinate_at_a_time() {
    let c = ctx(300);
    for (s, t, d, m) in ROWS {
        let req = MinPolyRequest::new(radical_sum(s, t, &c), d, m + 1, c.clone()).unwrap();
        let out = minpoly(&req, &MinPolyOptions::new(&c)).unwrap();
        let p = out.polynomial().unwrap();
        assert_eq!(p, &exact_minpoly_radical_sum(s, t).unwrap());
        let records = out.trace().records();
        for (i, r) in records.iter().enumerate() {
            assert_eq!(r.window_start, d - 1 - i);
            assert_eq!(r.suffix_len, d + 1 - r.window_start);
            let want = if i + 1 == records.len() { StageOutcome::Relation } else { StageOutcome::Extended };
            assert_eq!(r.outcome, want);
        }
        // lower degrees were certified first; when |p| exceeds the bound
        // the hit can come one window later as y * p
        assert!(records.last().unwrap().suffix_len - 1 >= p.degree());
    }
}

#[test]
fn relation_vector_is_supported_on_the_window() {
    let c = ctx(60);
    // the suffix (4/3, 1) holds 3*(4/3) - 4*1 = 0; the head is irrelevant
    let x = vec![
        c.int(7).sqrt(),
        c.int(5).sqrt(),
        Real::from_ratio(&BigInt::from(4), &BigUint::from(3u32), c.precision_bits()),
        c.one(),
    ];
    let out = ipslq(&x, &c.int(6), &default_gamma(&c), &c).unwrap();
    let rel = canonical_sign(out.outcome.relation().unwrap().to_vec());
    assert_eq!(rel, [0, 0, 3, -4].map(BigInt::from).to_vec());
    assert_eq!(out.stages.records().len(), 1);
}

#[test]
fn long_vector_relation_is_not_lost_to_rounding_noise() {
    // entries of A reach ~2^500 here before the relation shows up, lifting
    // the noise in H far above a fixed 2^(-0.9 * bits) zero threshold
    let c = ctx(500);
    let x = powers_vector(&radical_sum(2, 7, &c), 15, &c).unwrap();
    let run = pslq(&x, &c.int(1_000_000_000), &default_gamma(&c), &c).unwrap();
    let p = exact_minpoly_radical_sum(2, 7).unwrap();
    let rel = canonical_sign(run.outcome.relation().expect("relation, not a bound").to_vec());
    assert_eq!(rel, p.coefficients());
}

mod common;

use std::sync::OnceLock;

use charsum::character::{all_char_sums, char_eval, char_sums_direct, CharIndex, RingCtx, RingElem};
use charsum::cubic::{self, CubicForm};
use charsum::energy::energy_brute;
use charsum::field::DEFAULT_DLOG_BUDGET;
use charsum::poly::{self, PrimeField};
use charsum::rng::Lcg64;
use charsum::sets::IntervalSpec;
use charsum::sums;
use charsum::weil;
use charsum::FieldCtx;
use common::{close, cubic_disc, Oracle};
use proptest::prelude::*;

const BUDGET: u64 = 10_000_000;

struct Fixture {
    ctx: FieldCtx,
    ring: RingCtx,
    oracle: Oracle,
}

fn fixture(p: u64, d: usize) -> Fixture {
    let ctx = FieldCtx::new(p, d, 0).unwrap().with_dlog(DEFAULT_DLOG_BUDGET).unwrap();
    Fixture {
        ring: RingCtx::single(ctx.clone()).unwrap(),
        oracle: Oracle::of(&ctx),
        ctx,
    }
}

fn f5_3() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| fixture(5, 3))
}

fn f7_3() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| fixture(7, 3))
}

fn f13() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| fixture(13, 1))
}

fn wrap(v: &[u64]) -> Vec<RingElem> {
    v.iter().map(|&x| RingElem(vec![x])).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_matches_oracle(a in 0u64..125, b in 0u64..125, c in 0u64..125) {
        let f = f5_3();
        prop_assert_eq!(f.ctx.mul_enc(a, b), f.oracle.mul(a, b));
        prop_assert_eq!(f.ctx.add_enc(a, b), f.oracle.add(a, b));
        // distributivity
        let lhs = f.ctx.mul_enc(a, f.ctx.add_enc(b, c));
        let rhs = f.ctx.add_enc(f.ctx.mul_enc(a, b), f.ctx.mul_enc(a, c));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn frobenius_is_multiplicative_and_norm_lands_in_base(a in 1u64..343, b in 1u64..343) {
        let f = f7_3();
        let fr = |x| f.ctx.frobenius_enc(x);
        prop_assert_eq!(fr(f.ctx.mul_enc(a, b)), f.ctx.mul_enc(fr(a), fr(b)));
        prop_assert_eq!(fr(f.ctx.add_enc(a, b)), f.ctx.add_enc(fr(a), fr(b)));
        let na = f.ctx.norm_enc(a);
        prop_assert!(na > 0 && na < 7);
        prop_assert_eq!(na, f.oracle.pow(a, 1 + 7 + 49));
        prop_assert_eq!(f.ctx.norm_enc(f.ctx.mul_enc(a, b)), na * f.ctx.norm_enc(b) % 7);
    }

    #[test]
    fn inverse_and_dlog_roundtrip(a in 1u64..343) {
        let f = f7_3();
        let inv = f.ctx.inv_enc(a).unwrap();
        prop_assert_eq!(f.ctx.mul_enc(a, inv), 1);
        let table = f.ctx.require_dlog().unwrap();
        let l = table.log(a).unwrap();
        prop_assert_eq!(table.exp(l), a);
        prop_assert_eq!(Some(l), f.oracle.log(a));
    }

    #[test]
    fn characters_are_homomorphisms(k in 0u64..342, a in 1u64..343, b in 1u64..343) {
        let f = f7_3();
        let chi = CharIndex::single(k);
        let ab = f.ctx.mul_enc(a, b);
        let ev = |x| char_eval(&chi, &RingElem(vec![x]), &f.ring).unwrap();
        prop_assert!(close(ev(ab), ev(a) * ev(b), 1e-9));
        prop_assert!(close(ev(a), f.oracle.chi(k, a), 1e-9));
    }

    #[test]
    fn transform_matches_direct_sums(set in prop::collection::vec(0u64..125, 1..20)) {
        let f = f5_3();
        let fast = all_char_sums(&wrap(&set), &f.ring, BUDGET).unwrap();
        let slow = char_sums_direct(&wrap(&set), &f.ring, BUDGET).unwrap();
        for (x, y) in fast.values().iter().zip(slow.values()) {
            prop_assert!(close(*x, *y, 1e-9));
        }
    }

    #[test]
    fn energy_is_dilation_invariant(
        a in prop::collection::vec(1u64..13, 1..8),
        b in prop::collection::vec(1u64..13, 1..8),
        lambda in 1u64..13,
    ) {
        let f = f13();
        let scaled: Vec<u64> = a.iter().map(|&x| x * lambda % 13).collect();
        let e = energy_brute(&[wrap(&a), wrap(&b)], &f.ring, BUDGET).unwrap().value;
        let es = energy_brute(&[wrap(&scaled), wrap(&b)], &f.ring, BUDGET).unwrap().value;
        prop_assert_eq!(e, es);
    }

    #[test]
    fn energy_cauchy_schwarz(
        a in prop::collection::vec(1u64..13, 1..8),
        b in prop::collection::vec(1u64..13, 1..8),
    ) {
        let f = f13();
        let e = |x: &[u64], y: &[u64]| energy_brute(&[wrap(x), wrap(y)], &f.ring, BUDGET).unwrap().value as f64;
        let (eab, eaa, ebb) = (e(&a, &b), e(&a, &a), e(&b, &b));
        prop_assert!(eab * eab <= eaa * ebb + 1e-9);
        // E(A, B) >= |A|^2 |B|^2 / |R^*|
        let (la, lb) = (a.len() as f64, b.len() as f64);
        prop_assert!(eab >= la * la * lb * lb / 12.0 - 1e-9);
    }

    #[test]
    fn grid_sums_split_over_adjacent_intervals(
        omega in 7u64..343,
        start in -5i64..10,
        len1 in 1u64..5,
        len2 in 1u64..5,
        jlen in 1u64..5,
        k in 0u64..342,
    ) {
        let f = f7_3();
        let chi = CharIndex::single(k);
        let j = IntervalSpec::new(0, jlen);
        let whole = sums::grid_sum(&f.ctx, omega, IntervalSpec::new(start, len1 + len2), j, &chi, BUDGET).unwrap();
        let left = sums::grid_sum(&f.ctx, omega, IntervalSpec::new(start, len1), j, &chi, BUDGET).unwrap();
        let right = sums::grid_sum(&f.ctx, omega, IntervalSpec::new(start + len1 as i64, len2), j, &chi, BUDGET).unwrap();
        prop_assert!(close(whole.value(), left.value() + right.value(), 1e-9));
        prop_assert!(whole.magnitude <= whole.trivial_bound + 1e-9);
    }

    #[test]
    fn scaling_omega_box_rotates_sum(omega in 7u64..343, lambda in 1u64..7, k in 0u64..342) {
        // chi(lambda z) = chi(lambda) chi(z): scaling by a base unit preserves |sum|
        let f = f7_3();
        let chi = CharIndex::single(k);
        let i = IntervalSpec::new(1, 3);
        let base = sums::grid_sum(&f.ctx, omega, i, i, &chi, BUDGET).unwrap();
        let pts = f.oracle.box_points(omega, &[(1, 3), (1, 3)]);
        let scaled: num_complex::Complex64 = pts.iter().map(|&z| f.oracle.chi(k, f.oracle.mul(lambda, z))).sum();
        prop_assert!((scaled.norm() - base.magnitude).abs() < 1e-9);
    }

    #[test]
    fn classification_roundtrips(a in 0u64..97, b in 0u64..97, c in 0u64..97, pi in 0usize..6) {
        let p = [5u64, 7, 11, 13, 31, 97][pi];
        let (a, b, c) = (a % p, b % p, c % p);
        let form = CubicForm::new(a as i64, b as i64, c as i64, p);
        match cubic::classify(&form, p) {
            Ok(class) => {
                prop_assert!(cubic_disc(a, b, c, p) != 0);
                prop_assert_eq!(class.reconstruct(p), Some(form));
            }
            Err(_) => prop_assert_eq!(cubic_disc(a, b, c, p), 0),
        }
    }

    #[test]
    fn squarefree_parts_multiply_back(coeffs in prop::collection::vec(0u64..7, 1..6)) {
        let k = PrimeField::new(7).unwrap();
        let mut f = coeffs;
        f.push(1);
        let parts = poly::squarefree_decomposition(&k, &f).unwrap();
        let mut prod = vec![1u64];
        for (g, e) in &parts {
            for _ in 0..*e {
                prod = poly::mul(&k, &prod, g);
            }
        }
        prop_assert_eq!(prod, f);
    }

    #[test]
    fn moment_is_translation_invariant(start in -3i64..6, len in 1u64..4, k in 1u64..6) {
        let chi = CharIndex::single(k);
        let a = weil::wlm_moment(7, &chi, IntervalSpec::new(start, len), 1, BUDGET).unwrap();
        let b = weil::wlm_moment(7, &chi, IntervalSpec::new(start + 1, len), 1, BUDGET).unwrap();
        prop_assert!((a.moment - b.moment).abs() <= 1e-9 * a.moment.max(1.0));
        prop_assert_eq!(a.bad_tuples, b.bad_tuples);
        prop_assert!(a.bad_tuples >= a.bad_limit);
    }

    #[test]
    fn lcg_is_deterministic_and_bounded(seed in any::<u64>(), n in 1u64..1000) {
        let mut x = Lcg64::new(seed);
        let mut y = Lcg64::new(seed);
        for _ in 0..16 {
            let v = x.below(n);
            prop_assert_eq!(v, y.below(n));
            prop_assert!(v < n);
            let u = x.unit();
            prop_assert_eq!(u, y.unit());
            prop_assert!((0.0..1.0).contains(&u));
        }
    }
}

#[test]
fn injective_embedding_of_sublattice_box() {
    // distinct coordinate tuples with sides below p give distinct elements
    let f = f7_3();
    let omega = 7;
    let pts = f.oracle.box_points(omega, &[(0, 6), (0, 6)]);
    let mut sorted = pts.clone();
    sorted.sort_unstable();
    sorted.dedup();
    assert_eq!(sorted.len(), pts.len());
}

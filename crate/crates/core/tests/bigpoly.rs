use cprime_core::bigpoly::{resultant, TriPoly, UniPoly, Var};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Integer;

mod common;
use common::{numeric_resultant, random_poly, specialize};

#[test]
fn resultant_matches_evaluation_interpolation_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    while checked < 50 {
        let f = random_poly(&mut rng, 2, 5);
        let g = random_poly(&mut rng, 2, 5);
        let (m, n) = (f.degree_in(Var::X3), g.degree_in(Var::X3));
        if m == 0 || n == 0 {
            continue;
        }
        let res = resultant(&f, &g, Var::X3).unwrap();
        assert_eq!(res.degree_in(Var::X3), 0);
        // Degree of the resultant in x1 (and x2) is at most
        // m * deg(g) + n * deg(f) <= 8; agreement on a 9 x 9 grid of points
        // therefore determines it (interpolation would reproduce it).
        let d = (m * 2 + n * 2) as i64;
        for a in -d / 2..=d - d / 2 {
            for b in -d / 2..=d - d / 2 {
                let want = numeric_resultant(&specialize(&f, a, b, m), &specialize(&g, a, b, n));
                let got = res.eval(&[Integer::from(a), Integer::from(b), Integer::new()]);
                assert_eq!(got, want, "f = {f}, g = {g}, at ({a}, {b})");
            }
        }
        checked += 1;
    }
}

#[test]
fn resultant_vanishes_at_planted_common_roots() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..30 {
        let root = [
            Integer::from(rng.gen_range(-20..=20)),
            Integer::from(rng.gen_range(-20..=20)),
            Integer::from(rng.gen_range(-20..=20)),
        ];
        // Shift the constant term so each polynomial vanishes at the root.
        let plant = |p: TriPoly| {
            let v = p.eval(&root);
            &p - &TriPoly::constant(v)
        };
        let f = plant(&random_poly(&mut rng, 2, 4) + &TriPoly::var(Var::X3));
        let g = plant(&random_poly(&mut rng, 2, 4) + &TriPoly::var(Var::X3));
        if f.degree_in(Var::X3) == 0 || g.degree_in(Var::X3) == 0 {
            continue;
        }
        let res = resultant(&f, &g, Var::X3).unwrap();
        assert_eq!(res.eval(&root), 0);
    }
}

#[test]
fn identical_inputs_have_zero_resultant() {
    let f: TriPoly = &TriPoly::var(Var::X1) - &TriPoly::constant(Integer::from(2));
    assert!(resultant(&f, &f, Var::X1).unwrap().is_zero());
}

fn small_poly() -> impl Strategy<Value = TriPoly> {
    prop::collection::vec(((0u32..3, 0u32..3, 0u32..3), -50i64..50), 0..6)
        .prop_map(|t| TriPoly::from_terms(t.into_iter().map(|((a, b, c), k)| ([a, b, c], Integer::from(k)))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws_at_random_points(
        f in small_poly(),
        g in small_poly(),
        h in small_poly(),
        pts in prop::collection::vec((-30i64..30, -30i64..30, -30i64..30), 20),
    ) {
        let lhs = &(&f + &g) * &h;
        let rhs = &(&f * &h) + &(&g * &h);
        prop_assert_eq!(&lhs, &rhs);
        for (a, b, c) in pts {
            let p = [Integer::from(a), Integer::from(b), Integer::from(c)];
            prop_assert_eq!(lhs.eval(&p), rhs.eval(&p));
            prop_assert_eq!((&f * &g).eval(&p), f.eval(&p) * g.eval(&p));
        }
    }

    #[test]
    fn norm_dominates_max_coefficient(f in small_poly()) {
        let m = f.max_abs_coeff();
        let n2 = f.norm2_sq();
        let m2 = Integer::from(m.square_ref());
        prop_assert!(n2 >= m2);
        prop_assert_eq!(n2 == m2, f.len() <= 1);
    }

    #[test]
    fn text_round_trip(f in small_poly()) {
        let text = f.to_string();
        let back: TriPoly = text.parse().unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn integer_roots_match_exhaustive_scan(
        roots in prop::collection::vec(-300i64..300, 0..4),
        extra in prop::collection::vec(-5i64..5, 0..3),
        bound in 1i64..400,
    ) {
        // prod (x - r) times factors x^2 + x + c, which have few or no integer roots.
        let mut coeffs = vec![Integer::from(1)];
        let mul_linear = |c: &Vec<Integer>, r: i64| {
            let mut out = vec![Integer::new(); c.len() + 1];
            for (i, a) in c.iter().enumerate() {
                out[i + 1] += a;
                out[i] -= Integer::from(a * r);
            }
            out
        };
        for &r in &roots {
            coeffs = mul_linear(&coeffs, r);
        }
        for &c in &extra {
            // times (x^2 + x + c)
            let mut out = vec![Integer::new(); coeffs.len() + 2];
            for (i, a) in coeffs.iter().enumerate() {
                out[i] += Integer::from(a * c);
                out[i + 1] += a;
                out[i + 2] += a;
            }
            coeffs = out;
        }
        let p = UniPoly::new(coeffs);
        let got = p.integer_roots(&Integer::from(bound));
        let want: Vec<Integer> = (-bound..=bound)
            .map(Integer::from)
            .filter(|x| p.eval(x) == 0)
            .collect();
        prop_assert_eq!(got, want);
    }
}

#[test]
fn integer_roots_exhaustive_to_ten_thousand() {
    // (x - 11)(x + 9973)(x - 10000)(x^2 + 1)
    let p = UniPoly::from_i64(&[1, 0, 1]);
    let mut coeffs = p.coeffs().to_vec();
    for r in [11i64, -9973, 10000] {
        let mut out = vec![Integer::new(); coeffs.len() + 1];
        for (i, a) in coeffs.iter().enumerate() {
            out[i + 1] += a;
            out[i] -= Integer::from(a * r);
        }
        coeffs = out;
    }
    let p = UniPoly::new(coeffs);
    let bound = Integer::from(10_000);
    let want: Vec<Integer> = (-10_000i64..=10_000).map(Integer::from).filter(|x| p.eval(x) == 0).collect();
    assert_eq!(want, vec![Integer::from(-9973), Integer::from(11), Integer::from(10_000)]);
    assert_eq!(p.integer_roots(&bound), want);
}

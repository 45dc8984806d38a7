use parakahler::liealg::*;
use parakahler::{Signature, C64};
use proptest::prelude::*;

// Rounding level for sums of six unit-size terms.
const ROUNDING: f64 = 32.0 * f64::EPSILON;

const SIGS: [Signature; 2] = [Signature::ELLIPTIC, Signature::HYPERBOLIC];

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn dist(a: &Mat3C, b: &Mat3C) -> f64 {
    (*a - *b).max_abs()
}

fn trace_free() -> impl Strategy<Value = Mat3C> {
    prop::array::uniform9((-1.0..1.0f64, -1.0..1.0f64)).prop_map(|e| {
        let mut m = Mat3C::ZERO;
        for (k, (re, im)) in e.into_iter().enumerate() {
            m[(k / 3, k % 3)] = c(re, im);
        }
        m.trace_free()
    })
}

fn sig() -> impl Strategy<Value = Signature> {
    prop::sample::select(SIGS.to_vec())
}

// Plain triple-loop product, independent of the library's Mul.
fn matmul(a: &Mat3C, b: &Mat3C) -> Mat3C {
    let mut out = Mat3C::ZERO;
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                out[(i, j)] += a[(i, k)] * b[(k, j)];
            }
        }
    }
    out
}

#[test]
fn diagonal_g0_is_fixed() {
    for s in SIGS {
        let x = Mat3C::diag(c(0.7, -0.2), c(-0.7, 0.2), c(0.0, 0.0));
        assert!(dist(&sigma(&x, s), &x) < ROUNDING);
        assert!(dist(&sigma2(&x), &x) < ROUNDING);
    }
}

#[test]
fn twisted_permutation_squares_to_identity() {
    for s in SIGS {
        let p = s.p_eps();
        assert!(dist(&matmul(&p, &p), &Mat3C::IDENTITY) < ROUNDING);
    }
}

#[test]
fn rh_factorizes_ph() {
    for s in SIGS {
        let r = s.r_h();
        assert!(dist(&matmul(&r.transpose(), &r), &s.p_h()) < ROUNDING);
        assert!(dist(&matmul(&r, &s.r_h_inv()), &Mat3C::IDENTITY) < ROUNDING);
    }
    assert_eq!(Signature::ELLIPTIC.sqrt_minus_h(), c(0.0, 1.0));
    assert_eq!(Signature::HYPERBOLIC.sqrt_minus_h(), c(1.0, 0.0));
    assert!(Signature::new(0).is_err());
}

#[test]
fn calibrated_convention_matches_table() {
    let c_ = convention();
    assert!(c_ == 1 || c_ == -1);
    for s in SIGS {
        for (j, x) in table_basis(s) {
            let want = x * eps_pow(i64::from(c_) * j as i64);
            assert!(dist(&sigma(&x, s), &want) < ROUNDING, "slot {j}");
        }
    }
}

#[test]
fn table_fidelity() {
    for s in SIGS {
        for (j, x) in table_basis(s) {
            let d = decompose(&x, s);
            assert!(
                dist(&d.parts[j], &x) < ROUNDING,
                "{j} {:e}",
                dist(&d.parts[j], &x)
            );
            for k in (0..6).filter(|&k| k != j) {
                assert!(d.parts[k].max_abs() < ROUNDING, "g{j} leaks into g{k}");
            }
        }
    }
}

#[test]
fn tau_reverses_grading_on_table() {
    for s in SIGS {
        for (j, x) in table_basis(s) {
            let t = tau(&x, s);
            let back = project_eigenspace(&t, (6 - j) % 6, s);
            assert!(
                dist(&back, &t) < ROUNDING,
                "tau(g{j}) {:e}",
                dist(&back, &t)
            );
        }
    }
}

#[test]
fn g2_pattern_projects_to_itself() {
    for s in SIGS {
        let a = c(0.4, 1.3);
        let mut x = Mat3C::ZERO;
        x[(0, 2)] = a;
        x[(2, 1)] = a * s.h();
        for j in 0..6 {
            let p = project_eigenspace(&x, j, s);
            if j == 2 {
                assert!(dist(&p, &x) < ROUNDING);
            } else {
                assert!(p.max_abs() < ROUNDING);
            }
        }
    }
}

#[test]
fn grade_zero_and_three_are_subalgebras() {
    for s in SIGS {
        for grades in [&[0usize][..], &[0, 3][..]] {
            let basis: Vec<Mat3C> = table_basis(s)
                .into_iter()
                .filter(|(j, _)| grades.contains(j))
                .map(|p| p.1)
                .collect();
            for a in &basis {
                for b in &basis {
                    let d = decompose(&a.bracket(b), s);
                    let outside = (0..6)
                        .filter(|j| !grades.contains(j))
                        .map(|j| d.parts[j].max_abs())
                        .fold(0.0, f64::max);
                    assert!(outside < ROUNDING);
                }
            }
        }
    }
}

#[test]
fn real_form_membership() {
    for s in SIGS {
        let r = s.sqrt_minus_h();
        let (a, b, cc, d, e) = (
            c(0.3, -1.1),
            c(0.5, 0.25),
            c(-0.7, 0.9),
            c(1.2, 0.4),
            -2.0 * 0.3,
        );
        let x = Mat3C::from_rows([
            [a, b, r * cc],
            [b.conj(), a.conj(), r * cc.conj()],
            [r * d, r * d.conj(), c(e, 0.0)],
        ]);
        assert!(x.trace().norm() < ROUNDING);
        assert!(in_slr(&x, s, 1e-14));
        assert!(rh_conjugate(&x, s).max_imag() < 1e-14);
    }
    let x = Mat3C::diag(c(0.0, 1.0), c(0.0, 1.0), c(0.0, -2.0));
    assert!(!in_slr(&x, Signature::HYPERBOLIC, 1e-12));
}

#[test]
fn group_sigma_matches_exponential() {
    for s in SIGS {
        let mut x = Mat3C::ZERO;
        for (k, v) in [0.3, -0.2, 0.5, 0.1, 0.4, -0.6, 0.2, 0.7, -0.3]
            .iter()
            .enumerate()
        {
            x[(k / 3, k % 3)] = c(*v, 0.5 * v * v);
        }
        let x = x.trace_free();
        let g = expm(&x).unwrap();
        let lhs = sigma_group(&g, s).unwrap();
        let rhs = expm(&sigma(&x, s)).unwrap();
        assert!(dist(&lhs, &rhs) < 1e-13);
        assert!((g.det() - c(1.0, 0.0)).norm() < 1e-13);
        let mut h = g;
        for _ in 0..6 {
            h = sigma_group(&h, s).unwrap();
        }
        assert!(dist(&h, &g) < 1e-12);
    }
    assert!(sigma_group(&Mat3C::ZERO, Signature::ELLIPTIC).is_err());
}

proptest! {
    #[test]
    fn orders_of_automorphisms(x in trace_free(), s in sig()) {
        prop_assert!(dist(&sigma_pow(&x, 6, s), &x) < 1e-12);
        let s2 = sigma2(&sigma2(&sigma2(&x)));
        prop_assert!(dist(&s2, &x) < 1e-12);
        prop_assert!(dist(&sigma3(&sigma3(&x, s), s), &x) < 1e-12);
    }

    #[test]
    fn closed_forms_match_powers(x in trace_free(), s in sig()) {
        prop_assert!(dist(&sigma2(&x), &sigma(&sigma(&x, s), s)) < 1e-12);
        prop_assert!(dist(&sigma3(&x, s), &sigma_pow(&x, 3, s)) < 1e-12);
    }

    #[test]
    fn tau_is_a_commuting_involution(x in trace_free(), s in sig()) {
        prop_assert!(dist(&tau(&tau(&x, s), s), &x) < 1e-14);
        prop_assert!(dist(&tau(&sigma(&x, s), s), &sigma(&tau(&x, s), s)) < 1e-12);
    }

    #[test]
    fn eigen_decomposition(x in trace_free(), s in sig()) {
        let d = decompose(&x, s);
        prop_assert!(dist(&d.sum(), &x) < 1e-12);
        let cv = i64::from(convention());
        for j in 0..6 {
            let p = d.parts[j];
            prop_assert!(dist(&sigma(&p, s), &(p * eps_pow(cv * j as i64))) < 1e-12);
            // tau maps g_j to g_{-j}
            let t = tau(&p, s);
            prop_assert!(dist(&project_eigenspace(&t, (6 - j) % 6, s), &t) < 1e-12);
        }
        // sigma^2 eigenvalue eps^2 on g_1 + g_4
        let y = d.parts[1] + d.parts[4];
        prop_assert!(dist(&sigma2(&y), &(y * eps_pow(2 * cv))) < 1e-12);
        prop_assert!(dist(&y, &d.graded(3, 1)) < ROUNDING);
        // sigma^3 eigenvalue 1 on g_0 + g_2 + g_4
        let even = d.graded(2, 0);
        prop_assert!(dist(&sigma3(&even, s), &even) < 1e-12);
        let odd = d.graded(2, 1);
        prop_assert!(dist(&sigma3(&odd, s), &(-odd)) < 1e-12);
    }

    #[test]
    fn real_form_is_real_after_conjugation(y in trace_free(), s in sig()) {
        let x = y + tau(&y, s);
        prop_assert!(in_slr(&x, s, 1e-14));
        prop_assert!(rh_conjugate(&x, s).max_imag() < 1e-12);
        prop_assert!(dist(&rh_unconjugate(&rh_conjugate(&x, s), s), &x) < 1e-12);
    }

    #[test]
    fn exponential_determinant(x in trace_free()) {
        let g = expm(&x).unwrap();
        prop_assert!((g.det() - c(1.0, 0.0)).norm() < 1e-12);
        let half = expm_scaled(&x, c(0.5, 0.0)).unwrap();
        prop_assert!(dist(&(half * half), &g) < 1e-12);
    }
}

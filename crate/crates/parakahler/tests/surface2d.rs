use parakahler::grid::{dz_dzb, Grid2, Order};
use parakahler::integrator::reconstruct;
use parakahler::liealg::Mat3C;
use parakahler::surface2d::*;
use parakahler::{Error, Signature, C64};
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI};

const HYP: Signature = Signature::HYPERBOLIC;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn constant_data(
    sig: Signature,
    n: usize,
    u: f64,
    theta: f64,
    phi: C64,
    q: C64,
    rho: C64,
) -> SurfaceData {
    let g = Grid2::square(0.0, 1.0, n).unwrap();
    let m = g.len();
    SurfaceData::new(
        sig,
        g,
        vec![u; m],
        vec![theta; m],
        vec![phi; m],
        vec![q; m],
        vec![rho; m],
    )
    .unwrap()
}

fn flat(n: usize) -> SurfaceData {
    constant_data(
        HYP,
        n,
        0.0,
        FRAC_PI_2,
        c(0.0, 0.0),
        c(1.0, 0.0),
        c(0.0, 0.0),
    )
}

fn liouville(z: C64) -> f64 {
    2f64.ln() - 2.0 * (1.0 - z.norm_sqr()).ln()
}

fn liouville_data(n: usize) -> SurfaceData {
    let g = Grid2::square(-0.48, 0.48, n).unwrap();
    SurfaceData::minlag(HYP, g, g.sample(liouville), vec![c(0.0, 0.0); g.len()]).unwrap()
}

fn max_diff(a: &[Mat3C], b: &[Mat3C]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (*x - *y).max_abs())
        .fold(0.0, f64::max)
}

#[test]
fn angle_function_examples() {
    assert_eq!(c_from_theta(FRAC_PI_2, THETA_MIN).unwrap(), c(1.0, 0.0));
    assert!((c_from_theta(3.0 * PI / 4.0, THETA_MIN).unwrap() - c(1.0, 1.0)).norm() < 1e-15);
    for t in [0.5, 1.5, 2.5] {
        let z = c_from_theta(t, THETA_MIN).unwrap();
        assert!((z.arg() - (t - FRAC_PI_2)).abs() < 1e-14);
        assert_eq!(z.re, 1.0);
    }
    assert!(matches!(
        c_from_theta(0.01, THETA_MIN),
        Err(Error::GuardBand { .. })
    ));
    assert!(c_from_theta(PI - 0.04, THETA_MIN).is_err());
}

#[test]
fn guard_band_is_configurable() {
    let d = constant_data(HYP, 5, 0.0, 0.1, c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
    assert!(d.clone().with_theta_min(0.2).is_err());
    assert!(d.with_theta_min(0.01).is_ok());
}

#[test]
fn flat_minlag_matrices() {
    let mc = build_mc(&flat(7), Kind::MinLag).unwrap();
    let want = Mat3C::from_real([[0.0, 0.0, -1.0], [-1.0, 0.0, 0.0], [0.0, -1.0, 0.0]]);
    for (uz, uzb) in mc.uz.iter().zip(&mc.uzb) {
        assert!((*uz - want).max_abs() < 1e-15);
        assert!((*uzb - want.transpose()).max_abs() < 1e-15);
    }
}

#[test]
fn lagrangian_matrices_at_zero_data() {
    let d = constant_data(
        Signature::ELLIPTIC,
        7,
        0.0,
        FRAC_PI_2,
        c(0.0, 0.0),
        c(0.0, 0.0),
        c(0.0, 0.0),
    );
    let mc = build_mc(&d, Kind::Lagrangian).unwrap();
    let mut want = Mat3C::ZERO;
    want[(0, 2)] = c(0.0, 1.0);
    want[(2, 1)] = c(0.0, 1.0);
    assert!((mc.uz[10] - want).max_abs() < 1e-15);
}

#[test]
fn general_matrix_carries_rho() {
    let rho = c(0.3, -0.8);
    let d = constant_data(HYP, 7, 0.2, 1.3, c(0.1, 0.2), c(1.0, 0.5), rho);
    let mc = build_mc(&d, Kind::General).unwrap();
    for uz in &mc.uz {
        assert!((uz[(2, 2)] - rho).norm() < 1e-15);
    }
}

#[test]
fn specializations_are_coherent() {
    let g = Grid2::square(0.0, 1.0, 9).unwrap();
    let n = g.len();
    let u = g.sample(|z| 0.3 * z.re - 0.2 * z.im * z.im);
    let q = g.sample(|z| c(1.0, 0.0) + z * 0.5);
    for sig in [Signature::ELLIPTIC, HYP] {
        let ml = SurfaceData::minlag(sig, g, u.clone(), q.clone()).unwrap();
        let general = build_mc(&ml, Kind::General).unwrap();
        let special = build_mc(&ml, Kind::MinLag).unwrap();
        assert!(max_diff(&general.uz, &special.uz) < 1e-14);
        assert!(max_diff(&general.uzb, &special.uzb) < 1e-14);
        let lag = SurfaceData::new(
            sig,
            g,
            u.clone(),
            vec![FRAC_PI_2; n],
            g.sample(|z| z * 0.2),
            q.clone(),
            vec![c(0.0, 0.0); n],
        )
        .unwrap();
        let general = build_mc(&lag, Kind::General).unwrap();
        let special = build_mc(&lag, Kind::Lagrangian).unwrap();
        assert!(max_diff(&general.uz, &special.uz) < 1e-14);
        assert!(max_diff(&general.uzb, &special.uzb) < 1e-14);
    }
}

#[test]
fn flat_example_residuals_vanish() {
    let d = flat(9);
    for kind in [Kind::General, Kind::Lagrangian, Kind::Minimal, Kind::MinLag] {
        // cot(pi/2) rounds to 6e-17 in the minimal theta equation
        let r = compat_residuals(&d, kind).unwrap();
        assert!(r.max() < 1e-15, "{kind}");
    }
    let r = compat_residuals(&d, Kind::MinLag).unwrap();
    assert_eq!(r.max(), 0.0);
    assert_eq!(r.get("tzitzeica"), Some(0.0));
    assert_eq!(r.get("holomorphic_Q"), Some(0.0));
}

#[test]
fn residual_names_by_kind() {
    let d = flat(9);
    let names = |k| {
        compat_residuals(&d, k)
            .unwrap()
            .entries
            .iter()
            .map(|e| e.0)
            .collect::<Vec<_>>()
    };
    assert_eq!(
        names(Kind::General),
        ["comp_rho", "complex_comp1", "complex_comp2"]
    );
    assert_eq!(
        names(Kind::Lagrangian),
        ["lagrangian_imag", "lagrangian_real", "lagrangian_cubic"]
    );
    assert_eq!(
        names(Kind::Minimal),
        ["holomorphic_Q", "theta_equation", "comp1_real"]
    );
    assert_eq!(names(Kind::MinLag), ["tzitzeica", "holomorphic_Q"]);
}

// Max over the core |y1|, |y2| <= 0.24, away from the corners where the
// location of the interior maximum shifts with h.
fn core_max(g: &Grid2, f: &[C64]) -> f64 {
    (0..g.len())
        .filter(|&k| {
            let (x, y) = g.coords(g.ij(k).0, g.ij(k).1);
            x.abs() <= 0.24 + 1e-12 && y.abs() <= 0.24 + 1e-12
        })
        .map(|k| f[k].norm())
        .fold(0.0, f64::max)
}

#[test]
fn liouville_residual_is_second_order() {
    let r = |n| {
        let d = liouville_data(n);
        let f = compat_residual_fields(&d, Kind::MinLag).unwrap();
        core_max(&d.grid, &f.fields[0].1)
    };
    let (a, b) = (r(49), r(97));
    assert!(b < 1e-3 && (3.5..4.5).contains(&(a / b)), "{a:e} {b:e}");
}

#[test]
fn antiholomorphic_perturbation_is_detected() {
    let mut d = flat(21);
    let g = d.grid;
    d.q = g.sample(|z| c(1.0, 0.0) + z.conj() * 0.1);
    let r = compat_residuals(&d, Kind::MinLag)
        .unwrap()
        .get("holomorphic_Q")
        .unwrap();
    assert!((r - 0.1).abs() < 1e-12, "{r}");
}

#[test]
fn tzitzeica_solver_examples() {
    let g = Grid2::square(0.0, 1.0, 21).unwrap();
    let one = vec![c(1.0, 0.0); g.len()];
    let rep = solve_tzitzeica(
        HYP,
        &g,
        &one,
        &vec![0.0; g.len()],
        None,
        &NewtonOptions::default(),
    )
    .unwrap();
    assert!(rep.u.iter().all(|v| v.abs() < 1e-14));

    let err = |n: usize| {
        let exact = liouville_data(n);
        let zero = vec![c(0.0, 0.0); exact.grid.len()];
        let rep = solve_tzitzeica(
            HYP,
            &exact.grid,
            &zero,
            &exact.u,
            None,
            &NewtonOptions::default(),
        )
        .unwrap();
        assert!(rep.residual < 1e-10);
        let solved = SurfaceData::minlag(HYP, exact.grid, rep.u.clone(), zero).unwrap();
        let res = compat_residuals(&solved, Kind::MinLag)
            .unwrap()
            .get("tzitzeica")
            .unwrap();
        assert!(res < 1e-9, "solver output residual {res:e}");
        rep.u
            .iter()
            .zip(&exact.u)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    };
    let (a, b) = (err(25), err(49));
    assert!((3.5..4.5).contains(&(a / b)), "{a:e} {b:e}");
}

#[test]
fn tzitzeica_rejects_non_holomorphic_q() {
    let g = Grid2::square(0.0, 1.0, 11).unwrap();
    let q = g.sample(|z| z.conj());
    let r = solve_tzitzeica(
        HYP,
        &g,
        &q,
        &vec![0.0; g.len()],
        None,
        &NewtonOptions::default(),
    );
    assert!(r.is_err());
}

#[test]
fn cauchy_transform_examples() {
    let g = Grid2::square(0.0, 1.0, 16).unwrap();
    let zero = cauchy_transform(&vec![c(0.0, 0.0); g.len()], &g).unwrap();
    assert!(zero.iter().all(|z| *z == c(0.0, 0.0)));

    let err = |n: usize| {
        let g = Grid2::square(0.0, 1.0, n).unwrap();
        let rho = cauchy_transform(&vec![c(1.0, 0.0); g.len()], &g).unwrap();
        let (_, db) = dz_dzb(&rho, &g, Order::Second).unwrap();
        g.interior_indices(n / 4)
            .into_iter()
            .map(|k| (db[k] - 1.0).norm())
            .fold(0.0, f64::max)
    };
    let (a, b) = (err(17), err(33));
    assert!(b < 0.2 && a / b > 1.6, "{a:e} {b:e}");
}

#[test]
fn solved_rho_satisfies_first_compatibility() {
    let g = Grid2::square(0.0, 1.0, 64).unwrap();
    let n = g.len();
    let mut d = SurfaceData::new(
        HYP,
        g,
        g.sample(|z| 0.2 * z.re),
        g.sample(|z| 1.4 + 0.2 * z.im),
        vec![c(0.0, 0.0); n],
        vec![c(1.0, 0.0); n],
        vec![c(0.0, 0.0); n],
    )
    .unwrap();
    d.rho = solve_rho(&d).unwrap().rho;
    let r = compat_residuals(&d, Kind::General)
        .unwrap()
        .get("comp_rho")
        .unwrap();
    assert!(r < 5e-3, "comp_rho {r:e}");
    // the edge rows carry the log-singular derivative of the transform
    let f = compat_residual_fields(&d, Kind::General).unwrap();
    let core = g
        .interior_indices(8)
        .into_iter()
        .map(|k| f.fields[0].1[k].norm())
        .fold(0.0, f64::max);
    assert!(core < 5e-4, "core comp_rho {core:e}");
    let big = Grid2::square(0.0, 1.0, 65).unwrap();
    let m = big.len();
    let d = SurfaceData::minlag(HYP, big, vec![0.0; m], vec![c(1.0, 0.0); m]).unwrap();
    assert!(matches!(solve_rho(&d), Err(Error::GridTooLarge { .. })));
}

#[test]
fn determinant_normalization() {
    let g = Mat3C::from_real([[2.0, 1.0, 0.0], [0.0, 0.5, 0.0], [1.0, 0.0, 1.0]]);
    let (out, fac) = normalize_det(&[g]).unwrap();
    assert!((out[0] - g).max_abs() < 1e-15 && (fac[0] - 1.0).norm() < 1e-15);
    let (out, _) = normalize_det(&[g * 2.0]).unwrap();
    assert!((out[0].det() - 1.0).norm() < 1e-14);
    assert!((out[0] - g).max_abs() < 1e-15);
    assert!(normalize_det(&[Mat3C::ZERO]).is_err());

    let rec = reconstruct(&flat(101), Kind::MinLag).unwrap();
    assert!(rec.frame.reality_residual() < 1e-8);
    assert!(rec.frame.unimodularity() < 1e-10);
}

#[test]
fn primitive_certificates() {
    let ml = build_mc(&flat(9), Kind::MinLag).unwrap();
    let cert = primitive_check(&ml, 6, 1e-12).unwrap();
    assert!(cert.pass && cert.residual < 1e-12);

    let minimal = constant_data(HYP, 9, 0.1, 1.2, c(0.0, 0.0), c(0.7, 0.2), c(0.0, 0.0));
    let mc = build_mc(&minimal, Kind::Minimal).unwrap();
    assert!(primitive_check(&mc, 3, 1e-10).unwrap().pass);
    assert!(primitive_check(&mc, 6, 1e-3).unwrap().residual > 1e-3);

    let lag = constant_data(
        HYP,
        9,
        0.0,
        FRAC_PI_2,
        c(3f64.sqrt(), 0.0),
        c(2.0, 0.0),
        c(0.0, 0.0),
    );
    let mc = build_mc(&lag, Kind::Lagrangian).unwrap();
    assert!(primitive_check(&mc, 6, 1e-3).unwrap().residual > 1e-3);
    assert!(primitive_check(&mc, 5, 1e-3).is_err());
}

#[test]
fn lambda_family() {
    let ml = build_mc(&flat(9), Kind::MinLag).unwrap();
    let same = lambda_deform(&ml, c(1.0, 0.0), 6, 1e-12).unwrap();
    assert!(max_diff(&same.uz, &ml.uz) < 1e-15 && max_diff(&same.uzb, &ml.uzb) < 1e-15);
    assert!(lambda_flatness(&ml, &[c(0.0, 1.0)], 6).unwrap() < 1e-12);
    assert!(lambda_flatness(&ml, &LAMBDA_SAMPLES, 6).unwrap() < 1e-12);

    let lag = constant_data(
        HYP,
        9,
        0.0,
        FRAC_PI_2,
        c(3f64.sqrt(), 0.0),
        c(2.0, 0.0),
        c(0.0, 0.0),
    );
    let mc = build_mc(&lag, Kind::Lagrangian).unwrap();
    assert!(lambda_flatness(&mc, &[c(1.0, 0.0)], 6).unwrap() < 1e-12);
    assert!(lambda_flatness(&mc, &[c(0.0, 1.0)], 6).unwrap() > 1e-3);
    assert!(matches!(
        lambda_deform(&mc, c(0.0, 1.0), 6, 1e-9),
        Err(Error::NotPrimitive { .. })
    ));
    assert!(lambda_deform(&ml, c(0.0, 0.0), 6, 1e-9).is_err());
}

proptest! {
    #[test]
    fn angle_round_trip(t in (THETA_MIN + 1e-9)..(PI - THETA_MIN - 1e-9)) {
        let z = c_from_theta(t, THETA_MIN).unwrap();
        prop_assert!((theta_from_c(z) - t).abs() < 1e-14);
        prop_assert!((b_from_theta(t, 0.0, HYP) + 2.0 * z.im).abs() < 1e-12 * (1.0 + z.im.abs()));
    }

    #[test]
    fn constant_minlag_mc_is_flat_and_primitive(u in -0.5..0.5f64, arg in -PI..PI) {
        // |Q| = e^{3u/2} solves the Tzitzeica equation with H = -1
        let q = C64::from_polar((1.5 * u).exp(), arg);
        let d = constant_data(HYP, 7, u, FRAC_PI_2, c(0.0, 0.0), q, c(0.0, 0.0));
        prop_assert!(compat_residuals(&d, Kind::MinLag).unwrap().max() < 1e-12);
        let mc = build_mc(&d, Kind::MinLag).unwrap();
        let curv = curvature(&mc, Order::Second).unwrap();
        prop_assert!(curv.iter().all(|m| m.max_abs() < 1e-12));
        prop_assert!(primitive_check(&mc, 6, 1e-12).unwrap().pass);
        prop_assert!(lambda_flatness(&mc, &LAMBDA_SAMPLES, 6).unwrap() < 1e-12);
    }
}

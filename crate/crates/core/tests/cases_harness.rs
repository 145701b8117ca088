mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use sem_fourier::cases::{AnalyticCase, BurgersParams, ColeHopf, RotatedSeriesParams};
use sem_fourier::harness::{
    case_error, case_spectrum, convergence_surface, exact_spectrum, loglog_slope, refine_to_budget, spectrum_decay_profile, Profile,
};
use sem_fourier::{rms_relative_error, Mesh, WaveSet};

#[test]
fn exact_spectra_are_conjugate_symmetric() {
    let cases = [
        AnalyticCase::legendre(5).unwrap(),
        AnalyticCase::sin(),
        AnalyticCase::rotated_series(RotatedSeriesParams::default()).unwrap(),
        AnalyticCase::burgers_initial(BurgersParams::default()),
    ];
    for case in &cases {
        let s = exact_spectrum(case, &WaveSet::centered_box(case.dim, 10).unwrap()).unwrap();
        assert!(s.conjugate_symmetry_defect() <= 1e-12, "{}", case.name);
    }
    assert!(exact_spectrum(&AnalyticCase::burgers_evolved(BurgersParams::default()).unwrap(), &WaveSet::centered_box(2, 1).unwrap()).is_err());
}

#[test]
fn legendre_cases_on_a_single_element() {
    let waves = WaveSet::centered_box(1, 20).unwrap();
    for p in 0..=12 {
        let case = AnalyticCase::legendre(p).unwrap();
        for degree in p.max(1)..=14 {
            assert!(case_error(&case, 1, degree, &waves).unwrap() <= 1e-12, "p={p} P={degree}");
        }
    }
}

#[test]
fn sine_surface_shape() {
    let surface = convergence_surface(&AnalyticCase::sin(), &[1, 2, 4, 8, 16, 32, 64], &(1..=10).collect::<Vec<_>>(), 16).unwrap();
    assert_eq!(surface.cells.len(), 70);
    for k in [2usize, 4, 8, 16, 32, 64] {
        for p in 3..=8 {
            let (a, b) = (surface.error(k, p).unwrap(), surface.error(k, p + 2).unwrap());
            assert!(b <= a || b <= 1e-13, "K={k} P={p}");
        }
    }
    for p in [2usize, 3] {
        let pts: Vec<(f64, f64)> = [2usize, 4, 8, 16, 32, 64].iter().map(|&k| (k as f64, surface.error(k, p).unwrap())).collect();
        assert!(loglog_slope(&pts).unwrap() <= -2.0);
    }
}

#[test]
fn every_exact_case_converges_in_degree_on_refined_meshes() {
    let mut rng = common::rng(17);
    let cases = [
        AnalyticCase::legendre(9).unwrap(),
        AnalyticCase::sin(),
        AnalyticCase::rotated_series(RotatedSeriesParams::default()).unwrap(),
        AnalyticCase::burgers_initial(BurgersParams::default()),
    ];
    for case in &cases {
        let waves = WaveSet::centered_box(case.dim, 4).unwrap();
        let exact = exact_spectrum(case, &waves).unwrap();
        // the rotated series only leaves its pre-asymptotic plateau on finer meshes
        let per_axis = if case.name == "rotser" { 16 } else { 4 };
        let base = common::random_mesh(&mut rng, case.dim, per_axis / 2, 1, 2, 10 * per_axis);
        for mesh in [Mesh::uniform(case.dim, per_axis, 1).unwrap(), base] {
            let err = |p: usize| {
                let s = case_spectrum(case, Arc::new(mesh.with_degree(p).unwrap()), &waves).unwrap();
                rms_relative_error(&s, &exact).unwrap()
            };
            for p in 3..=7 {
                let (a, b) = (err(p), err(p + 2));
                assert!(b <= a || b <= 1e-13, "{} P={p}: {a} -> {b}", case.name);
            }
        }
    }
}

#[test]
fn piecewise_linear_interpolant_decays_like_q_squared() {
    let mesh = Arc::new(Mesh::uniform(1, 4, 1).unwrap());
    let s = case_spectrum(&AnalyticCase::sin(), mesh, &WaveSet::centered_box(1, 64).unwrap()).unwrap();
    let profile = spectrum_decay_profile(&s, 0, &Profile::ShellMax, 1e-14).unwrap();
    let slope = profile.slope.unwrap();
    assert!((-2.5..=-1.5).contains(&slope), "{slope}");
}

#[test]
fn rotated_series_decays_exponentially_along_the_image_direction() {
    let params = RotatedSeriesParams::default();
    let case = AnalyticCase::rotated_series(params).unwrap();
    let dir = params.image([1, 0]);
    let s = exact_spectrum(&case, &WaveSet::centered_box(2, 20).unwrap()).unwrap();
    let profile = spectrum_decay_profile(&s, 0, &Profile::Direction(dir.to_vec()), 0.0).unwrap();
    assert_eq!(profile.points.len(), 11);
    for w in profile.points.windows(2) {
        assert!((w[1].1 / w[0].1 - (-0.4f64).exp()).abs() <= 1e-14);
    }
    // (1, 0) meets the image lattice only at multiples of 5
    let off = spectrum_decay_profile(&s, 0, &Profile::Direction(vec![1, 0]), 0.0).unwrap();
    for (n, &(_, a)) in off.points.iter().enumerate() {
        assert_eq!(a > 0.0, n % 5 == 0, "n={n}");
    }
}

#[test]
fn burgers_direction_profile_has_one_peak() {
    let case = AnalyticCase::burgers_initial(BurgersParams::default());
    let s = exact_spectrum(&case, &WaveSet::centered_box(2, 16).unwrap()).unwrap();
    let profile = spectrum_decay_profile(&s, 0, &Profile::Direction(vec![1, 2]), 0.0).unwrap();
    assert_eq!(profile.points.iter().filter(|&&(_, a)| a > 0.0).count(), 1);
}

#[test]
fn cole_hopf_reaches_the_known_peak_gradient() {
    // with nu = 0.01 / pi the steepest gradient, at z = 0 and t = 1.6037 / pi,
    // is about 152.00516
    let solver = ColeHopf::new(0.01 / PI, 1.6037 / PI).unwrap();
    let h = 1e-5;
    let slope = (solver.eval(h) - solver.eval(-h)) / (2.0 * h);
    assert!((slope.abs() - 152.00516).abs() <= 0.05, "{slope}");
    // front steepening
    let early = ColeHopf::new(0.01 / PI, 0.1).unwrap();
    assert!(((early.eval(h) - early.eval(-h)) / (2.0 * h)).abs() < slope.abs());
}

#[test]
fn evolved_burgers_is_a_one_dimensional_profile() {
    let params = BurgersParams::default();
    let case = AnalyticCase::burgers_evolved(params).unwrap();
    let mut a = [0.0; 2];
    let mut b = [0.0; 2];
    // shifting along l-perp leaves the field unchanged
    case.eval(&[0.3, -0.2], &mut a);
    case.eval(&[0.3 - 2.0 * 0.7, -0.2 + 0.7], &mut b);
    assert!((a[0] - b[0]).abs() <= 1e-12 && (a[1] - b[1]).abs() <= 1e-12);
    assert!((a[1] - 2.0 * a[0]).abs() <= 1e-12);
}

#[test]
fn budget_refinement_stays_within_budget() {
    let case = AnalyticCase::rotated_series(RotatedSeriesParams::default()).unwrap();
    for budget in [10usize, 30, 64] {
        let m = refine_to_budget(&case, Mesh::uniform(2, 2, 4).unwrap(), 0.1, budget).unwrap();
        assert!(m.len() <= budget);
        m.validate().unwrap();
    }
}

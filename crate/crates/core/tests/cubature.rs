use std::sync::Arc;

use num_complex::Complex64;
use sem_fourier::cases::{AnalyticCase, RotatedSeriesParams};
use sem_fourier::cubature::{aliasing_error, aliasing_waves, cubature_transform, TrigGrid};
use sem_fourier::harness::loglog_slope;
use sem_fourier::{transform, Mesh, NodalField, TransformPlan, WaveSet};

fn sine_setup() -> (Arc<Mesh>, NodalField) {
    let mesh = Arc::new(Mesh::uniform(1, 4, 4).unwrap());
    let f = NodalField::sample_scalar(Arc::clone(&mesh), |x| x[0].sin()).unwrap();
    (mesh, f)
}

#[test]
fn sem_interpolant_converges_at_second_order() {
    let (mesh, f) = sine_setup();
    let q1 = WaveSet::new(1, vec![vec![1]]).unwrap();
    let exact = transform(&f, &TransformPlan::new(mesh, q1.clone()).unwrap()).unwrap().get(0, 0);
    let pts: Vec<(f64, f64)> = [16usize, 32, 64, 128]
        .iter()
        .map(|&m| (m as f64, (cubature_transform(&f, &TrigGrid::new(1, m).unwrap(), &q1).unwrap().get(0, 0) - exact).norm()))
        .collect();
    let slope = loglog_slope(&pts).unwrap();
    assert!((-2.5..=-1.5).contains(&slope), "{slope}");
}

#[test]
fn identity_residual_is_the_truncated_tail() {
    // the dropped part of the aliasing sum shrinks like 1/R for O(q^-2) spectra
    let (mesh, f) = sine_setup();
    let q1 = WaveSet::new(1, vec![vec![1]]).unwrap();
    let m = 16;
    let exact = transform(&f, &TransformPlan::new(Arc::clone(&mesh), q1.clone()).unwrap()).unwrap().get(0, 0);
    let cub = cubature_transform(&f, &TrigGrid::new(1, m).unwrap(), &q1).unwrap().get(0, 0);
    let residual = |r: usize| {
        let full = transform(&f, &TransformPlan::new(Arc::clone(&mesh), aliasing_waves(&q1, m, r).unwrap()).unwrap()).unwrap();
        (cub - exact - aliasing_error(|q| full.lookup(q, 0).unwrap(), &[1], m, r).unwrap().value).norm()
    };
    let (a, b) = (residual(10), residual(40));
    assert!(b < a && (3.0..5.0).contains(&(a / b)), "{a} {b}");
}

#[test]
fn smooth_periodic_samples_converge_spectrally() {
    let f = |x: &[f64], o: &mut [f64]| {
        o[0] = x[0].cos().exp();
        Ok(())
    };
    let waves = WaveSet::new(1, vec![vec![1]]).unwrap();
    let value = |m: usize| {
        let g = TrigGrid::new(1, m).unwrap();
        g.cubature(&g.sample(1, f).unwrap(), 1, &waves).unwrap().get(0, 0)
    };
    let reference = value(256);
    let errs: Vec<f64> = [4usize, 8, 16].iter().map(|&m| (value(m) - reference).norm()).collect();
    // faster than any fixed power: each doubling gains more than the last
    assert!(errs[1] < errs[0] * 1e-3, "{errs:?}");
    assert!(errs[2] <= 1e-15, "{errs:?}");
}

#[test]
fn rotated_series_cubature_recovers_coefficients() {
    let params = RotatedSeriesParams::default();
    let case = AnalyticCase::rotated_series(params).unwrap();
    let m = (2 * params.truncation * 2 + 1) as usize;
    let grid = TrigGrid::new(2, m).unwrap();
    let samples = grid
        .sample(1, |x, o| {
            case.eval(x, o);
            Ok(())
        })
        .unwrap();
    let qs: Vec<Vec<i64>> = [[0, 0], [1, 0], [0, -1], [2, 3], [1, 1]].iter().map(|&q| params.image(q).to_vec()).chain([vec![1, 0], vec![0, 3]]).collect();
    let waves = WaveSet::new(2, qs).unwrap();
    let spec = grid.cubature(&samples, 1, &waves).unwrap();
    for (i, q) in waves.iter().enumerate() {
        let exact = case.exact(q, 0).unwrap();
        assert!((spec.get(i, 0) - exact).norm() <= 1e-10, "q={q:?}: {} vs {exact}", spec.get(i, 0));
    }
}

#[test]
fn cubature_of_interpolant_has_exact_mean_for_constants() {
    let mesh = Arc::new(Mesh::uniform(2, 2, 3).unwrap());
    let f = NodalField::sample_scalar(mesh, |_| 2.0).unwrap();
    let s = cubature_transform(&f, &TrigGrid::new(2, 5).unwrap(), &WaveSet::centered_box(2, 1).unwrap()).unwrap();
    assert!((s.lookup(&[0, 0], 0).unwrap() - Complex64::new(2.0, 0.0)).norm() <= 1e-14);
}

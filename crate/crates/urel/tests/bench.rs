use std::f64::consts::SQRT_2;

use approx::assert_relative_eq;
use urel::bench::*;
use urel::io::{read_profile, write_radial_profiles, write_reference};
use urel_core::dgsem::{lgl_operator, CartesianMesh, DgField};
use urel_core::radial::RadialProfile;
use urel_core::state::{four_velocity_from_speed, PrimState};
use urel_core::Error;

#[test]
fn initial_condition_examples() {
    let s = initial_condition::<2>(Example::Ex1, &[1.0, 0.0]).unwrap();
    assert_relative_eq!(s.pressure(), 1.0);
    assert_relative_eq!(s.velocity()[0], -1.0, max_relative = 1e-14);
    assert_eq!(s.velocity()[1], 0.0);

    let inner = initial_condition::<2>(Example::Ex3, &[0.3, 0.4]).unwrap();
    let outer = initial_condition::<2>(Example::Ex3, &[2.0, 0.0]).unwrap();
    assert_eq!((inner.pressure(), inner.velocity_sq()), (1.0, 0.0));
    assert_eq!((outer.pressure(), outer.velocity_sq()), (0.1, 0.0));
    let ex4 = initial_condition::<3>(Example::Ex4, &[0.0, 0.0, 0.5]).unwrap();
    assert_eq!(ex4.pressure(), 0.1);

    let s = initial_condition::<2>(Example::Ex5, &[0.0, 0.25]).unwrap();
    assert_relative_eq!(s.velocity()[1], 1.0, max_relative = 1e-14);
    assert!(s.velocity()[0].abs() < 1e-15);
    let s = initial_condition::<2>(Example::Ex5, &[1.5, 0.0]).unwrap();
    assert_eq!(s.velocity_sq(), 0.0);

    // Example 2 moves outward at v0 = 1/sqrt(5), i.e. u = 1/2.
    let s = initial_condition::<3>(Example::Ex2, &[0.0, 0.0, -2.0]).unwrap();
    assert_relative_eq!(s.velocity()[2], -0.5, max_relative = 1e-14);
    let s = initial_condition::<2>(Example::EntropyTest, &[0.6, 0.8]).unwrap();
    assert_relative_eq!(s.velocity_sq().sqrt(), 0.2, max_relative = 1e-14);
}

#[test]
fn origin_is_undefined_for_converging_data() {
    for ex in [Example::Ex1, Example::Ex2, Example::EntropyTest] {
        assert_eq!(initial_condition::<2>(ex, &[0.0, 0.0]).unwrap_err(), Error::OriginUndefined);
        let s = initial_condition_or_rest::<2>(ex, &[0.0, 0.0]).unwrap();
        assert_eq!(s.velocity_sq(), 0.0);
    }
    for ex in [Example::Ex3, Example::Ex4, Example::Ex5] {
        assert!(initial_condition::<3>(ex, &[0.0; 3]).is_ok());
    }
}

#[test]
fn mollifier_is_exact_outside_and_smooth_inside() {
    let far = mollified_entropy_test::<2>(&[0.3, -0.4]).unwrap();
    let exact = initial_condition::<2>(Example::EntropyTest, &[0.3, -0.4]).unwrap();
    assert_eq!(far, exact);
    assert_eq!(mollified_entropy_test::<2>(&[0.0, 0.0]).unwrap().velocity_sq(), 0.0);
    // Radial profile of |u| is C^2 at the ramp edge: one-sided second
    // differences agree.
    let u = |r: f64| mollified_entropy_test::<2>(&[r, 0.0]).unwrap().velocity()[0];
    let (r0, h) = (MOLLIFIER_RADIUS, 1e-6);
    let left = (u(r0) - 2.0 * u(r0 - h) + u(r0 - 2.0 * h)) / (h * h);
    let right = (u(r0 + 2.0 * h) - 2.0 * u(r0 + h) + u(r0)) / (h * h);
    assert!((left - right).abs() < 0.1, "{left} vs {right}");
    assert!((u(r0) - four_velocity_from_speed(-1.0 / 26f64.sqrt())).abs() < 1e-15);
}

#[test]
fn spec_defaults_follow_examples() {
    let cases = [
        (Example::Ex1, 2.0, 1.0),
        (Example::Ex2, 2.0, 1.0),
        (Example::Ex3, 6.0, 6.0),
        (Example::Ex4, 6.0, 6.0),
        (Example::Ex5, 5.0, 6.0),
    ];
    for (ex, l, t) in cases {
        let spec = BenchmarkSpec::new(ex, 2, Solver::Dgsem);
        assert_eq!((spec.half_width, spec.t_end), (l, t), "{ex}");
        spec.validate().unwrap();
    }
    assert_eq!(BenchmarkSpec::new(Example::Ex1, 3, Solver::Dgsem).elements, 16);
    assert!(BenchmarkSpec::new(Example::Ex3, 2, Solver::Selfsim).validate().is_err());
    assert!(BenchmarkSpec::new(Example::Ex1, 4, Solver::Radial).validate().is_err());
    assert_eq!(Example::Ex1.v0(), Some(-1.0 / SQRT_2));
    assert_eq!("entropy_test".parse::<Example>().unwrap(), Example::EntropyTest);
    assert!("7".parse::<Example>().is_err());
}

#[test]
fn ray_directions_are_unit() {
    let d2 = ray_directions::<2>(16);
    assert_eq!(d2[0], [1.0, 0.0]);
    let d3 = ray_directions::<3>(16);
    for d in d2.iter().map(|d| d.to_vec()).chain(d3.iter().map(|d| d.to_vec())) {
        assert_relative_eq!(d.iter().map(|c| c * c).sum::<f64>(), 1.0, epsilon = 1e-14);
    }
    // Directions balance out.
    for k in 0..2 {
        assert!(d2.iter().map(|d| d[k]).sum::<f64>().abs() < 1e-12);
    }
}

#[test]
fn sampling_reproduces_polynomials() {
    let mesh = CartesianMesh::<f64, 2>::cube(-1.0, 1.0, 3, false).unwrap();
    let op = lgl_operator::<f64>(3).unwrap();
    // Cubic pressure, linear velocity: exact under degree-3 interpolation.
    let pfun = |x: &[f64; 2]| 2.0 + x[0].powi(3) - 0.5 * x[0] * x[1] * x[1];
    let field = DgField::from_prim_fn(&mesh, &op, |x: &[f64; 2]| {
        PrimState::new(pfun(x), [0.1 * x[0], 0.0])
    })
    .unwrap();
    let prims = field.prims().unwrap();
    for x in [[0.123, -0.77], [0.9, 0.05], [-1.0, 1.0]] {
        let (p, _) = sample_point(&mesh, &op, &prims, &x).unwrap();
        assert_relative_eq!(p, pfun(&x), max_relative = 1e-12);
    }
    assert!(sample_point(&mesh, &op, &prims, &[1.5, 0.0]).is_none());

    // Constant state: the ray profile is constant, with zero radial speed.
    let rest = DgField::from_prim_fn(&mesh, &op, |_: &[f64; 2]| PrimState::at_rest(0.7)).unwrap();
    let (p, v) = ray_profile(&mesh, &op, &rest.prims().unwrap(), &[0.1, 0.5, 0.9], 16);
    assert!(p.iter().all(|&x| (x - 0.7).abs() < 1e-14));
    assert!(v.iter().all(|&x| x.abs() < 1e-14));
    assert_relative_eq!(inner_mean_pressure(&mesh, &op, &rest.prims().unwrap(), 0.5).unwrap(), 0.7, epsilon = 1e-14);
}

#[test]
fn comparison_metrics() {
    let x: Vec<f64> = (0..=100).map(|i| i as f64 / 50.0).collect();
    let profile = RadialProfile {
        t: 1.0,
        x: x.clone(),
        p: x.iter().map(|&x| if x < 1.0 { 3.0 } else { 1.0 }).collect(),
        v: vec![0.0; x.len()],
    };
    let reference = Reference::Radial(profile.clone());
    let same = compare_profiles(&x, &profile.p, &profile.v, &reference, (0.0, 2.0));
    assert_eq!((same.l1_p, same.linf_p, same.l1_v), (0.0, 0.0, 0.0));
    assert_eq!(same.shock_discrepancy(), Some(0.0));
    // Constant offset 0.1 in v over [0.5, 1.5] gives L1 = 0.1.
    let v: Vec<f64> = vec![0.1; x.len()];
    let r = compare_profiles(&x, &profile.p, &v, &reference, (0.5, 1.5));
    assert_relative_eq!(r.l1_v, 0.1, max_relative = 1e-12);
    assert_relative_eq!(r.linf_v, 0.1);
    assert_eq!(steepest_gradient(&x, &profile.p), Some(0.99));
    assert_eq!(interp(&[0.0, 1.0], &[2.0, 4.0], 0.25), 2.5);
    assert_eq!(interp(&[0.0, 1.0], &[2.0, 4.0], 7.0), 4.0);
}

#[test]
fn selfsim_reference_matches_table() {
    let rows = table2(1e-5).unwrap();
    for r in rows {
        assert!(r.max_abs_diff() < 1e-4, "{r:?}");
    }
    let sol = selfsim_reference(Example::Ex2, 2, 1e-5).unwrap();
    assert!(sol.shock.is_none());
    assert!(selfsim_reference(Example::Ex3, 2, 1e-5).is_err());
}

#[test]
fn csv_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sub/ref.csv");
    let x = [0.0, 0.1, 1.0 / 3.0];
    let p = [1.0, 2.0, std::f64::consts::PI];
    let v = [0.0, -0.5, 1e-300];
    write_reference(&path, &x, &p, &v).unwrap();
    let back = read_profile(&path).unwrap();
    assert_eq!((back.x.as_slice(), back.p.as_slice(), back.v.as_slice()), (&x[..], &p[..], &v[..]));

    let profiles = [0.5, 1.0].map(|t| RadialProfile {
        t,
        x: vec![0.1, 0.2],
        p: vec![t, 2.0 * t],
        v: vec![0.0, 0.0],
    });
    let path = dir.path().join("radial.csv");
    write_radial_profiles(&path, &profiles).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("t,x,p,v\n5.0000000000000000e-1,"));
    assert_eq!(read_profile(&path).unwrap().p, vec![1.0, 2.0]);
}

#[test]
fn benchmark_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = BenchmarkSpec::new(Example::Ex3, 2, Solver::Dgsem);
    spec.elements = 8;
    spec.t_end = 0.2;
    spec.output_times = vec![0.1];
    spec.reference_cells = 400;
    spec.out_dir = Some(dir.path().to_path_buf());
    let out = run_benchmark(&spec).unwrap();
    let names: Vec<String> = out
        .files
        .iter()
        .map(|f| f.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    for n in ["dgsem_000.csv", "dgsem_001.csv", "entropy.csv", "profile.csv", "report.txt"] {
        assert!(names.iter().any(|x| x == n), "{names:?}");
    }
    let snap = std::fs::read_to_string(dir.path().join("dgsem_001.csv")).unwrap();
    assert!(snap.starts_with("t,x1,x2,p,v1,v2,alpha\n"));
    assert_eq!(snap.lines().count(), 1 + 64 * 16);
    let report = out.report.unwrap();
    assert!(report.l1_p >= 0.0 && report.linf_v >= 0.0);
}

#[test]
fn radial_benchmark_reports_focusing_time() {
    let mut spec = BenchmarkSpec::new(Example::Ex3, 3, Solver::Radial);
    spec.cells = 300;
    let out = run_benchmark(&spec).unwrap();
    let tf = out.summary.iter().find(|(k, _)| k == "focusing_time").unwrap().1;
    assert!((tf - 4.165).abs() < 0.3, "{tf}");
    assert!(out.report.is_none());
}

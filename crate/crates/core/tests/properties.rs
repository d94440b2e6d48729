mod common;

use std::f64::consts::PI;

use beamforge::constellations::{make_disk, make_hexagon, make_square_grid, make_ula, ArrayGeometry};
use beamforge::design::{build_user_gram, design, design_eig, design_ideal, DesignMethod, DesignResult, DesignSpec};
use beamforge::io::to_json_string;
use beamforge::linalg::{
    dominant_eigenpair_default, is_psd, random_feasible_covariance, random_unit_vector, HermitianMatrix,
    DEFAULT_PSD_TOL,
};
use beamforge::radiation::{evaluate_grid, pattern_value, steering_vector, Covariance, Direction, UserSet};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn position() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-5.0f64..5.0)
}

fn geometry(max: usize) -> impl Strategy<Value = ArrayGeometry<f64>> {
    prop::collection::vec(position(), 1..=max)
        .prop_filter_map("coincident elements", |e| ArrayGeometry::new("g", e).ok())
}

fn direction() -> impl Strategy<Value = Direction<f64>> {
    (-PI / 2.0..=PI / 2.0, 0.0..2.0 * PI).prop_map(|(t, p)| Direction::new(t, p).unwrap())
}

fn users(max: usize) -> impl Strategy<Value = UserSet<f64>> {
    prop::collection::vec(direction(), 1..=max).prop_map(|u| UserSet::new("u", u).unwrap())
}

fn rel_close(a: f64, b: f64, tol: f64, scale: f64) -> bool {
    (a - b).abs() <= tol * scale.max(a.abs()).max(b.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn steering_entries_have_unit_modulus(geom in geometry(16), dir in direction()) {
        for z in steering_vector(&geom, dir).values {
            prop_assert!((z.norm() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn psd_patterns_are_non_negative(geom in geometry(12), dir in direction(), seed in any::<u64>()) {
        let r = random_feasible_covariance(geom.len(), geom.len() as f64, seed).unwrap();
        prop_assert!(is_psd(&r, DEFAULT_PSD_TOL));
        let p = pattern_value(&Covariance::dense(r), &steering_vector(&geom, dir)).unwrap();
        prop_assert!(p >= -1e-12);
    }

    #[test]
    fn quadratic_form_is_real(geom in geometry(12), dir in direction(), seed in any::<u64>()) {
        let r = random_feasible_covariance(geom.len(), 1.0, seed).unwrap();
        let s = steering_vector(&geom, dir).values;
        let q = r.quadratic_form(&s).unwrap();
        prop_assert!(q.im.abs() <= 1e-9 * q.norm().max(f64::MIN_POSITIVE));
    }

    #[test]
    fn common_translation_preserves_pattern(
        geom in geometry(10),
        shift in position(),
        dir in direction(),
        seed in any::<u64>(),
    ) {
        let moved: Vec<[f64; 3]> = geom.elements().iter().map(|p| [p[0] + shift[0], p[1] + shift[1], p[2] + shift[2]]).collect();
        let moved = ArrayGeometry::new("moved", moved).unwrap();
        let r = random_feasible_covariance(geom.len(), geom.len() as f64, seed).unwrap();
        let cov = Covariance::dense(r);
        let a = pattern_value(&cov, &steering_vector(&geom, dir)).unwrap();
        let b = pattern_value(&cov, &steering_vector(&moved, dir)).unwrap();
        prop_assert!(rel_close(a, b, 1e-9, 0.0), "{a} vs {b}");
    }

    #[test]
    fn z_axis_rows_are_constant_in_azimuth(n in 1usize..40, theta in -PI / 2.0..=PI / 2.0, seed in any::<u64>()) {
        let geom = make_ula(n, 0.5).unwrap();
        let r = random_feasible_covariance(n, n as f64, seed).unwrap();
        let phi: Vec<f64> = (0..37).map(|j| j as f64 * PI / 18.0).collect();
        let grid = evaluate_grid(&geom, &Covariance::dense(r), &[theta], &phi).unwrap();
        let row = grid.row(0);
        for p in row {
            prop_assert!((p - row[0]).abs() <= 1e-12 * row[0].max(1.0));
        }
    }

    #[test]
    fn ula_offsets_are_integer_multiples_of_spacing(n in 1usize..80, spacing in 0.1f64..2.0) {
        let geom = make_ula(n, spacing).unwrap();
        for p in geom.elements() {
            prop_assert!(p[0] == 0.0 && p[1] == 0.0);
            let steps = (p[2] - geom.elements()[0][2]) / spacing;
            prop_assert!((steps - steps.round()).abs() <= 1e-9);
        }
        prop_assert!(geom.centroid()[2].abs() <= 1e-12 * n as f64);
    }

    #[test]
    fn generators_are_deterministic(count in 1usize..200, spacing in 0.2f64..1.0) {
        prop_assert_eq!(make_disk::<f64>(count, spacing).unwrap(), make_disk(count, spacing).unwrap());
        prop_assert_eq!(make_hexagon::<f64>(count, spacing).unwrap(), make_hexagon(count, spacing).unwrap());
    }

    #[test]
    fn lattice_selection_is_radius_monotone(count in 1usize..300) {
        for (shape, geom) in [
            (common::Shape::Disk, make_disk(count, 0.5).unwrap()),
            (common::Shape::Hexagon, make_hexagon(count, 0.5).unwrap()),
        ] {
            let worst = geom.elements().iter().map(|e| common::shape_norm(shape, e[1], e[2])).fold(0.0, f64::max);
            let oracle = common::brute_lattice(shape, usize::MAX, 0.5);
            let chosen: Vec<(f64, f64)> = geom.elements().iter().map(|e| (e[1], e[2])).collect();
            for (y, z, norm) in oracle {
                if !chosen.contains(&(y, z)) {
                    prop_assert!(norm >= worst - 1e-9);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigenpair_residual_and_rayleigh_bound(n in 2usize..16, seed in any::<u64>()) {
        let m = random_feasible_covariance(n, 1.0, seed).unwrap();
        let pair = dominant_eigenpair_default(&m).unwrap();
        let mv = m.mul_vec(&pair.vector).unwrap();
        let residual = mv.iter().zip(&pair.vector).map(|(a, b)| (a - b * pair.value).norm_sqr()).sum::<f64>().sqrt();
        prop_assert!(residual <= 1e-10 * pair.value);
        let norm = pair.vector.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        prop_assert!((norm - 1.0).abs() <= 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let mut best = 0.0f64;
        for _ in 0..1000 {
            let u: Vec<Complex64> = random_unit_vector(n, &mut rng);
            best = best.max(m.quadratic_form(&u).unwrap().re);
        }
        prop_assert!(best <= pair.value * (1.0 + 1e-9));
    }

    #[test]
    fn random_covariances_are_feasible(n in 1usize..20, power in 0.1f64..100.0, seed in any::<u64>()) {
        let m = random_feasible_covariance(n, power, seed).unwrap();
        prop_assert!(is_psd(&m, DEFAULT_PSD_TOL));
        prop_assert!((m.trace() - power).abs() <= 1e-12 * power);
        prop_assert_eq!(m, random_feasible_covariance(n, power, seed).unwrap());
    }

    #[test]
    fn hermitian_constructor_rejects_asymmetry(n in 2usize..6, k in 0usize..6, l in 0usize..6, eps in 1e-11f64..1.0) {
        let (k, l) = (k % n, l % n);
        prop_assume!(k != l);
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        data[k * n + l] = Complex64::new(1.0, 0.5);
        data[l * n + k] = Complex64::new(1.0 + eps, -0.5);
        prop_assert!(HermitianMatrix::from_complex(n, data).is_err());
    }

    #[test]
    fn designs_are_feasible(geom in geometry(20), users in users(6), power in 0.5f64..50.0) {
        let z = build_user_gram(&geom, &users);
        prop_assert!((z.trace() - (users.len() * geom.len()) as f64).abs() == 0.0);
        for method in [DesignMethod::Eig, DesignMethod::Ideal, DesignMethod::Identity, DesignMethod::FullOnes, DesignMethod::Toeplitz(0.8)] {
            let result = design(&geom, Some(&users), &DesignSpec::new(method, power).unwrap()).unwrap();
            prop_assert!(is_psd(&result.r, DEFAULT_PSD_TOL), "{method}");
            prop_assert!((result.r.trace() - power).abs() <= 1e-9 * power, "{method}");
            if let Some(v) = &result.rank1_factor {
                let rebuilt = HermitianMatrix::outer(v).scaled(power);
                prop_assert!(rebuilt.max_abs_diff(&result.r).unwrap() <= 1e-10 * power);
            }
        }
    }

    #[test]
    fn eig_objective_dominates_feasible_rivals(geom in geometry(12), users in users(6), seed in any::<u64>()) {
        let z = build_user_gram(&geom, &users);
        let n = geom.len();
        let result = design_eig(&z, &DesignSpec::per_element(DesignMethod::Eig, n).unwrap()).unwrap();
        let objective = result.objective.unwrap();
        let (values, _) = common::jacobi_eigen(&z);
        prop_assert!(rel_close(objective, n as f64 * values[0], 1e-9, 0.0));
        for i in 0..50 {
            let rival = random_feasible_covariance(n, n as f64, seed.wrapping_add(i)).unwrap();
            prop_assert!(objective >= rival.trace_product(&z).unwrap() - 1e-9 * objective);
        }
    }

    #[test]
    fn ideal_design_ignores_user_order(geom in geometry(16), users in users(6), rotate in 0usize..6) {
        let mut order = users.users().to_vec();
        let len = order.len();
        order.rotate_left(rotate % len);
        order.reverse();
        let permuted = UserSet::new("p", order).unwrap();
        let spec = DesignSpec::per_element(DesignMethod::Ideal, geom.len()).unwrap();
        let a = design_ideal(&build_user_gram(&geom, &users), &spec).unwrap();
        let b = design_ideal(&build_user_gram(&geom, &permuted), &spec).unwrap();
        prop_assert!(a.r.max_abs_diff(&b.r).unwrap() <= 1e-12);
    }

    #[test]
    fn geometry_json_roundtrip_is_byte_identical(geom in geometry(12)) {
        let text = to_json_string(&geom).unwrap();
        let back: ArrayGeometry<f64> = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &geom);
        prop_assert_eq!(to_json_string(&back).unwrap(), text);
    }

    #[test]
    fn user_json_roundtrip_is_byte_identical(users in users(6)) {
        let text = to_json_string(&users).unwrap();
        let back: UserSet<f64> = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(to_json_string(&back).unwrap(), text);
    }

    #[test]
    fn design_json_roundtrip_is_byte_identical(geom in geometry(10), users in users(4), which in 0usize..5) {
        let method = [DesignMethod::Eig, DesignMethod::Ideal, DesignMethod::Identity, DesignMethod::FullOnes, DesignMethod::Toeplitz(0.8)][which];
        let result = design(&geom, Some(&users), &DesignSpec::per_element(method, geom.len()).unwrap()).unwrap();
        let text = to_json_string(&result).unwrap();
        let back: DesignResult<f64> = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back.r, &result.r);
        prop_assert_eq!(back.method, method);
        prop_assert_eq!(to_json_string(&back).unwrap(), text);
    }

    #[test]
    fn grid_matches_pointwise_evaluation(geom in geometry(8), seed in any::<u64>()) {
        let r = random_feasible_covariance(geom.len(), 2.0, seed).unwrap();
        let cov = Covariance::dense(r.clone());
        let theta: Vec<f64> = (0..7).map(|i| -PI / 2.0 + i as f64 * PI / 6.0).collect();
        let phi: Vec<f64> = (0..9).map(|j| j as f64 * PI / 4.0).collect();
        let grid = evaluate_grid(&geom, &cov, &theta, &phi).unwrap();
        for (i, t) in theta.iter().enumerate() {
            for (j, p) in phi.iter().enumerate() {
                let want = common::direct_pattern(&r, &common::direct_steering(geom.elements(), *t, *p));
                prop_assert!((grid.at(i, j) - want).abs() <= 1e-10 * r.trace());
            }
        }
    }
}

#[test]
fn grid_is_identical_across_thread_counts() {
    let geom = make_square_grid(8, 0.5).unwrap();
    let users = UserSet::from_degrees("u", &[(10.0, 20.0), (-5.0, 300.0), (30.0, 90.0)]).unwrap();
    let result = design(&geom, Some(&users), &DesignSpec::per_element(DesignMethod::Ideal, 64).unwrap()).unwrap();
    let theta: Vec<f64> = (0..91).map(|i| (-90.0 + 2.0 * i as f64).to_radians()).collect();
    let phi: Vec<f64> = (0..180).map(|j| (2.0 * j as f64).to_radians()).collect();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| evaluate_grid(&geom, &Covariance::dense(result.r.clone()), &theta, &phi).unwrap())
    };
    let one = run(1);
    for threads in [2, 3, 8] {
        assert_eq!(run(threads).power(), one.power());
    }
}

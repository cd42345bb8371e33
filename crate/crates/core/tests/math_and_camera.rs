use rand::{rngs::StdRng, Rng, SeedableRng};
use stereoar_core::fixtures::{reference_right_camera, synthetic_fisheye, SYNTHETIC_FISHEYE_POLY};
use stereoar_core::mathcore::{mvp_transform, Mat4, Vec4};
use stereoar_core::omnicam::{fit_poly, Correspondence, OmniIntrinsics};
use stereoar_core::{Mat4d, Mat4f, Vec3d, Vec4d};

type Naive = [[f64; 4]; 4];

fn naive_mul(a: &Naive, b: &Naive) -> Naive {
    let mut o = [[0.0; 4]; 4];
    for (i, row) in o.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            for k in 0..4 {
                *cell += a[i][k] * b[k][j];
            }
        }
    }
    o
}

fn naive_apply(v: [f64; 4], m: &Naive) -> [f64; 4] {
    let mut o = [0.0; 4];
    for (j, cell) in o.iter_mut().enumerate() {
        for (i, vi) in v.iter().enumerate() {
            *cell += vi * m[i][j];
        }
    }
    o
}

#[test]
fn mvp_matches_naive_chain() {
    let mut rng = StdRng::seed_from_u64(1);
    let mat = |rng: &mut StdRng| -> Naive { std::array::from_fn(|_| std::array::from_fn(|_| rng.random_range(-2.0..2.0))) };
    for _ in 0..1000 {
        let (m, v, p) = (mat(&mut rng), mat(&mut rng), mat(&mut rng));
        let x = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0), 1.0];
        let want = naive_apply(x, &naive_mul(&naive_mul(&m, &v), &p));
        let got = mvp_transform(Vec4::from_array(x), &Mat4::from_rows(m), &Mat4::from_rows(v), &Mat4::from_rows(p)).to_array();
        for k in 0..4 {
            assert!((got[k] - want[k]).abs() < 1e-9 * want[k].abs().max(1.0), "{got:?} vs {want:?}");
        }
    }
}

#[test]
fn single_precision_aliases_agree_with_double() {
    let d = Mat4d::rotation_y(0.7) * Mat4d::translation(Vec3d::new(1.0, 2.0, 3.0));
    let f = Mat4f::rotation_y(0.7) * Mat4f::translation(stereoar_core::Vec3f::new(1.0, 2.0, 3.0));
    let p = d.transform(Vec4d::new(0.5, -1.0, 2.0, 1.0));
    let q = f.transform(stereoar_core::Vec4f::new(0.5, -1.0, 2.0, 1.0));
    assert!((p.x - q.x as f64).abs() < 1e-5 && (p.z - q.z as f64).abs() < 1e-5);
}

fn round_trip_max_error(intr: &OmniIntrinsics<f64>, n: usize, seed: u64) -> f64 {
    let mut rng = StdRng::seed_from_u64(seed);
    let (w, h) = intr.size();
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < n {
        let p = (rng.random_range(0.0..w as f64), rng.random_range(0.0..h as f64));
        let ray = intr.cam_to_world(p);
        assert!((ray.norm() - 1.0).abs() < 1e-12);
        let Ok(back) = intr.world_to_cam(ray) else { continue };
        worst = worst.max((back.0 - p.0).hypot(back.1 - p.1));
        done += 1;
    }
    worst
}

#[test]
fn reference_camera_round_trip() {
    let intr = reference_right_camera();
    assert_eq!(intr.eval_poly(0.0), 712.8701);
    assert!(round_trip_max_error(&intr, 1000, 9) < 1e-4);
    let axis = intr.world_to_cam(Vec3d::new(0.0, 0.0, 1.0)).unwrap();
    assert!((axis.0 - 236.646089).abs() < 1e-9 && (axis.1 - 394.135741).abs() < 1e-9);
}

#[test]
fn fisheye_round_trip() {
    assert!(round_trip_max_error(&synthetic_fisheye(), 1000, 10) < 1e-6);
}

#[test]
fn fit_recovers_generator_through_public_api() {
    let intr = synthetic_fisheye();
    let mut rng = StdRng::seed_from_u64(4);
    let samples: Vec<_> = (0..300)
        .map(|_| {
            let p = (rng.random_range(0.0..752.0), rng.random_range(0.0..480.0));
            Correspondence { ray: intr.cam_to_world(p), pixel: p }
        })
        .collect();
    let fit = fit_poly(&samples, intr.center(), 4).unwrap();
    for (got, want) in fit.coefficients.iter().zip(SYNTHETIC_FISHEYE_POLY) {
        assert!(((got - want) / want).abs() < 1e-6, "{got} vs {want}");
    }
}

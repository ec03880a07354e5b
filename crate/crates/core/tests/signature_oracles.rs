use proptest::prelude::*;
use sigasym::curves::Curve;
use sigasym::orderstats::{norm_estimator, EstimatorForm};
use sigasym::rng::McConfig;
use sigasym::tensor::{
    chen_product, hs_inner, hs_norm, segment_exponential, signature, signature_of_vertices, TruncatedTensorSeries,
};

fn random_series(dim: usize, depth: usize, coords: &[f64]) -> TruncatedTensorSeries {
    let mut it = coords.iter().cycle();
    let levels = (0..=depth)
        .map(|k| {
            (0..dim.pow(k as u32))
                .map(|_| if k == 0 { 1.0 } else { *it.next().unwrap() })
                .collect()
        })
        .collect();
    TruncatedTensorSeries::from_levels(dim, levels).unwrap()
}

fn close(a: &TruncatedTensorSeries, b: &TruncatedTensorSeries, tol: f64) -> bool {
    a.levels()
        .iter()
        .zip(b.levels())
        .all(|(x, y)| x.iter().zip(y).all(|(p, q)| (p - q).abs() <= tol))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chen_product_is_associative(
        coords in prop::collection::vec(-1.0f64..1.0, 3 * 40),
        dim in 1usize..=3,
    ) {
        let a = random_series(dim, 3, &coords[..40]);
        let b = random_series(dim, 3, &coords[40..80]);
        let c = random_series(dim, 3, &coords[80..]);
        let left = chen_product(&chen_product(&a, &b).unwrap(), &c).unwrap();
        let right = chen_product(&a, &chen_product(&b, &c).unwrap()).unwrap();
        prop_assert!(close(&left, &right, 1e-12));
    }

    #[test]
    fn reversed_path_inverts_signature(pts in prop::collection::vec(-1.0f64..1.0, 2 * 6)) {
        let vertices: Vec<Vec<f64>> = pts.chunks(2).map(|c| c.to_vec()).collect();
        let mut back = vertices.clone();
        back.reverse();
        let s = signature_of_vertices(&vertices, 4).unwrap();
        let r = signature_of_vertices(&back, 4).unwrap();
        let prod = chen_product(&s, &r).unwrap();
        prop_assert!(close(&prod, &TruncatedTensorSeries::identity(2, 4), 1e-11));
    }

    #[test]
    fn level_one_is_increment(pts in prop::collection::vec(-2.0f64..2.0, 3 * 5)) {
        let vertices: Vec<Vec<f64>> = pts.chunks(3).map(|c| c.to_vec()).collect();
        let s = signature_of_vertices(&vertices, 2).unwrap();
        for (i, &level1) in s.level(1).iter().enumerate() {
            let x = vertices[4][i] - vertices[0][i];
            prop_assert!((level1 - x).abs() < 1e-12);
            // symmetric part of level 2 is ½ x⊗x
            prop_assert!((s.level(2)[i * 3 + i] - 0.5 * x * x).abs() < 1e-12);
        }
    }
}

#[test]
fn straight_segment_level_norm() {
    let s = segment_exponential(&[0.6, 0.8], 6);
    for n in 1..=6 {
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        assert!((fact * hs_norm(&s, n).unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn product_form_matches_tensor_on_a_zigzag() {
    // (n!)²‖Xⁿ‖²/l^{2n} is exactly the mean of the product form.
    let zigzag = Curve::polyline_through(vec![vec![0.0, 0.0], vec![0.3, 0.1], vec![0.4, 0.5], vec![0.9, 0.4]]).unwrap();
    let l = zigzag.length();
    let sig = signature(&zigzag, 4).unwrap();
    for n in 1..=4 {
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        let exact = (fact * fact) * hs_inner(&sig, &sig, n).unwrap() / l.powi(2 * n as i32);
        let mc = norm_estimator(&zigzag, n, EstimatorForm::Product, &McConfig::new(100_000, 31)).unwrap();
        assert!(mc.z_score(exact) < 3.0, "n={n}: {mc:?} vs {exact}");
    }
}

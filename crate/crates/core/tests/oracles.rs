//! Checks against values computed independently (closed forms, or 30-digit
//! root finding done offline) and frozen here.

use approx::assert_relative_eq;
use nalgebra::DMatrix;
use num_rational::Ratio;
use qrsemigroup::constructions::{
    cantor_shell_dimension, cantor_shell_system, linking_number, ParamCurve,
};
use qrsemigroup::geometry::{chordal_distance, chordal_to_euclidean_radius, SpherePoint};
use qrsemigroup::ifs::{similarity_dimension, ContractiveSystem};
use qrsemigroup::perfectness::matrix_dilatation;
use qrsemigroup::powermaps::{julia_radius, PowerMap, StretchParams};
use qrsemigroup::semigroup::{word_params, SemigroupSpec};
use qrsemigroup::zorich::ZorichMap;
use qrsemigroup::RoundAnnulus;

const LOG2_GOLDEN: f64 = 0.694_241_913_630_617_3;
const LOG3_2: f64 = 0.630_929_753_571_457_4;

#[test]
fn moran_roots() {
    assert_relative_eq!(similarity_dimension(&[0.5, 0.25]).unwrap(), LOG2_GOLDEN, max_relative = 1e-13);
    assert_relative_eq!(
        similarity_dimension(&ContractiveSystem::middle_thirds().ratios()).unwrap(),
        LOG3_2,
        max_relative = 1e-13
    );
    assert_relative_eq!(
        similarity_dimension(&[1.0 / 3.0, 1.0 / 3.0, 0.5]).unwrap(),
        1.167_288_953_286_467_3,
        max_relative = 1e-13
    );
    assert_eq!(similarity_dimension(&[0.3]).unwrap(), 0.0);
}

#[test]
fn cantor_shell_radial_dimensions() {
    let frozen = [
        (2, LOG2_GOLDEN),
        (3, 0.879_146_421_606_638_2),
        (5, 0.975_225_336_064_051_1),
        (10, 0.999_291_919_402_791_4),
        (20, 0.999_999_312_062_671_8),
    ];
    for (n, s) in frozen {
        let sys = cantor_shell_system(n).unwrap();
        assert_relative_eq!(similarity_dimension(&sys.ratios()).unwrap(), s, max_relative = 1e-12);
    }
    assert_relative_eq!(cantor_shell_dimension(2, 3).unwrap(), 2.0 + LOG2_GOLDEN, max_relative = 1e-13);
}

#[test]
fn cantor_shell_fixed_points_are_exact() {
    let sys = cantor_shell_system(6).unwrap();
    // t = t/2^k + 1 − 2^{1−k} solves to (2^k − 2)/(2^k − 1).
    for k in 1..6u32 {
        let q = 1i64 << k;
        assert_eq!(sys.fixed_point(k).unwrap(), Ratio::new(q - 2, q - 1));
    }
    assert_eq!(sys.fixed_point(6).unwrap(), Ratio::from_integer(1));
}

#[test]
fn julia_sphere_radii() {
    let cases = [(2, 0.25, 4.0), (3, 2.0, std::f64::consts::FRAC_1_SQRT_2), (2, 1.0 / 9.0, 9.0), (5, 1.0, 1.0)];
    for (d, lambda, r) in cases {
        let p = StretchParams::from_lambda(d, lambda).unwrap();
        assert_relative_eq!(julia_radius(&p).unwrap(), r, max_relative = 1e-14);
    }
}

#[test]
fn ring_word_radii() {
    let h = ZorichMap::spatial();
    let spec = SemigroupSpec::power(vec![
        PowerMap::with_lambda(2, 1.0, h).unwrap(),
        PowerMap::with_lambda(2, 0.25, h).unwrap(),
    ])
    .unwrap();
    // Indices are listed outermost first: [1, 0] is g ∘ f.
    let cases = [
        (vec![0], 1.0),
        (vec![1], 4.0),
        (vec![1, 0], 1.587_401_051_968_199_5),
        (vec![0, 1], 2.519_842_099_789_746_3),
        (vec![1, 0, 0], 1.219_013_654_204_475_4),
    ];
    for (w, r) in cases {
        let p = word_params(&spec, &spec.word(w).unwrap()).unwrap();
        assert_relative_eq!(julia_radius(&p).unwrap(), r, max_relative = 1e-13);
    }
}

#[test]
fn planar_map_is_the_exponential() {
    let y = ZorichMap::planar().eval(&[1.0, std::f64::consts::FRAC_PI_3]);
    assert_relative_eq!(y[0], 1.359_140_914_229_522_6, max_relative = 1e-14);
    assert_relative_eq!(y[1], 2.354_101_118_091_146_8, max_relative = 1e-14);
}

#[test]
fn spatial_map_values() {
    let h = ZorichMap::spatial();
    let y = h.eval(&[0.25, 0.5, 0.0]);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for (a, b) in y.iter().zip([-s, 0.0, s]) {
        assert!((a - b).abs() < 1e-15);
    }
    let y = h.eval(&[0.1, 0.3, 3f64.ln()]);
    for (a, b) in y.iter().zip([-2.551_952_425_056_12, -1.275_976_212_528_06, 0.927_050_983_124_842]) {
        assert!((a - b).abs() < 1e-14, "{a} vs {b}");
    }
    // Reflection across x₁ = 1 flips the hemisphere.
    let y = h.eval(&[1.25, 0.5, 2f64.ln()]);
    for (a, b) in y.iter().zip([2.0 * s, 0.0, -2.0 * s]) {
        assert!((a - b).abs() < 1e-14);
    }
}

#[test]
fn chordal_values() {
    let o = SpherePoint::origin(3);
    assert_relative_eq!(chordal_distance(&o, &SpherePoint::Infinity), 1.0);
    assert_relative_eq!(
        chordal_distance(&o, &SpherePoint::Finite(vec![1.0, 1.0, 1.0])),
        0.866_025_403_784_438_6,
        max_relative = 1e-15
    );
    let a = SpherePoint::Finite(vec![1.0, 0.0]);
    let b = SpherePoint::Finite(vec![0.0, 2.0]);
    assert_relative_eq!(chordal_distance(&a, &b), std::f64::consts::FRAC_1_SQRT_2, max_relative = 1e-15);
    // Antipodes on the sphere: x and −x/|x|².
    let c = SpherePoint::Finite(vec![-1.0, 0.0]);
    assert_relative_eq!(chordal_distance(&a, &c), 1.0, max_relative = 1e-15);
    assert_relative_eq!(chordal_to_euclidean_radius(0.6), 0.75, max_relative = 1e-15);
}

#[test]
fn annulus_modulus_is_log_ratio() {
    let a = RoundAnnulus::new(SpherePoint::origin(2), 1.0, std::f64::consts::E).unwrap();
    assert_relative_eq!(a.modulus(), 1.0, max_relative = 1e-15);
}

#[test]
fn linear_dilatations() {
    let k = matrix_dilatation(&DMatrix::from_diagonal_element(3, 3, 1.0)).unwrap().k;
    assert_relative_eq!(k, 1.0, max_relative = 1e-14);
    let m = DMatrix::from_row_slice(3, 3, &[3.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 1.0]);
    let d = matrix_dilatation(&m).unwrap();
    assert_relative_eq!(d.k_outer, 4.5, max_relative = 1e-14);
    assert_relative_eq!(d.k_inner, 6.0, max_relative = 1e-14);
    assert_relative_eq!(d.k, 6.0, max_relative = 1e-14);
    let shear = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
    // σ = φ, 1/φ for the unit shear, so K = φ².
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    assert_relative_eq!(matrix_dilatation(&shear).unwrap().k, phi * phi, max_relative = 1e-13);
}

#[test]
fn hopf_link_has_linking_number_one() {
    let c1 = ParamCurve {
        point: |t: f64| [t.cos(), t.sin(), 0.0],
        tangent: |t: f64| [-t.sin(), t.cos(), 0.0],
    };
    let c2 = ParamCurve {
        point: |t: f64| [1.0 + t.cos(), 0.0, t.sin()],
        tangent: |t: f64| [-t.sin(), 0.0, t.cos()],
    };
    let lk = linking_number(&c1, &c2, 256).unwrap();
    assert!((lk.abs() - 1.0).abs() < 1e-9, "{lk}");
    let far = ParamCurve {
        point: |t: f64| [5.0 + t.cos(), t.sin(), 0.0],
        tangent: |t: f64| [-t.sin(), t.cos(), 0.0],
    };
    assert!(linking_number(&c1, &far, 256).unwrap().abs() < 1e-12);
}

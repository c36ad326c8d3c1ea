//! Zorich-type strongly automorphic map `h: R^n → R^n ∖ {0}`.
//!
//! For `n = 3` the base square `[0,1]²` is sent onto the upper unit
//! hemisphere by an explicit bi-Lipschitz map `ψ`, and the map is extended
//! to the plane by reflecting in the integer lines `{x_i = k}`; each
//! reflection is matched by the equatorial flip `y₃ ↦ −y₃`. The vertical
//! coordinate becomes the logarithm of the modulus, so the hyperplane
//! `{x₃ = r}` is mapped onto the sphere `{|y| = e^r}`.
//!
//! The automorphism group `G` consists of the motions `x ↦ T(R^p x)` where
//! `T` translates the first two coordinates by an even integer vector and
//! `R` is the half-turn `(x₁,x₂,x₃) ↦ (−x₁,−x₂,x₃)`. A fundamental domain is
//! the beam `[0,2]×[0,1]×R`.
//!
//! For `n = 2`, `h` is the complex exponential and `G` is generated by
//! `x₂ ↦ x₂ + 2π`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::geometry::SpherePoint;

/// The automorphic map in dimension 2 (`exp`) or 3 (Zorich).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZorichMap {
    dim: usize,
}

/// Selects one point of a fibre `h⁻¹(y)`: the principal preimage is
/// half-turned when `parity = 1` and then translated by the fold offsets.
///
/// In dimension 3 the translation is `(2·m1, 2·m2, 0)`. In dimension 2 only
/// `m1` is used and shifts the angle by `2π·m1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct BranchIndex {
    pub m1: i64,
    pub m2: i64,
    pub parity: u8,
}

impl BranchIndex {
    pub const PRINCIPAL: BranchIndex = BranchIndex {
        m1: 0,
        m2: 0,
        parity: 0,
    };

    pub fn new(m1: i64, m2: i64, parity: u8) -> Self {
        BranchIndex { m1, m2, parity }
    }
}

/// A motion of the domain acting on the horizontal coordinates: optional
/// half-turn about the vertical axis followed by a horizontal shift.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeMotion {
    pub shift: Vec<f64>,
    pub half_turn: bool,
}

impl LatticeMotion {
    pub fn translation(shift: Vec<f64>) -> Self {
        LatticeMotion {
            shift,
            half_turn: false,
        }
    }
}

impl ZorichMap {
    pub fn new(dim: usize) -> Result<Self> {
        match dim {
            2 | 3 => Ok(ZorichMap { dim }),
            _ => Err(Error::invalid(format!("dimension must be 2 or 3, got {dim}"))),
        }
    }

    /// Complex exponential, `n = 2`.
    pub fn planar() -> Self {
        ZorichMap { dim: 2 }
    }

    /// Zorich map, `n = 3`.
    pub fn spatial() -> Self {
        ZorichMap { dim: 3 }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coordinate of the domain that `h` turns into `ln|h(x)|`: the first one
    /// in the planar (complex logarithm) convention, the last one otherwise.
    pub fn radial_axis(&self) -> usize {
        match self.dim {
            2 => 0,
            _ => self.dim - 1,
        }
    }

    /// Whether `g` belongs to the automorphism group of this map.
    pub fn is_automorphism(&self, g: &LatticeMotion) -> bool {
        if g.shift.len() != self.dim - 1 {
            return false;
        }
        match self.dim {
            2 => {
                let k = g.shift[0] / (2.0 * PI);
                !g.half_turn && (k - k.round()).abs() < 1e-12
            }
            _ => g
                .shift
                .iter()
                .all(|&s| s == s.round() && (s as i64).rem_euclid(2) == 0),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.dim);
        match self.dim {
            2 => {
                let r = x[0].exp();
                vec![r * x[1].cos(), r * x[1].sin()]
            }
            _ => {
                let (u, k1) = fold_unit(x[0]);
                let (v, k2) = fold_unit(x[1]);
                let mut w = square_to_hemisphere(u, v);
                if (k1 + k2).rem_euclid(2) == 1 {
                    w[2] = -w[2];
                }
                let r = x[2].exp();
                vec![r * w[0], r * w[1], r * w[2]]
            }
        }
    }

    /// Preimage of `y` in the branch `branch`. The coordinate at
    /// [`radial_axis`](Self::radial_axis) is always `ln|y|`.
    pub fn inverse(&self, y: &SpherePoint, branch: BranchIndex) -> Result<Vec<f64>> {
        let c = match y {
            SpherePoint::Infinity => {
                return Err(Error::Domain("h has no preimage of infinity".into()))
            }
            SpherePoint::Finite(c) => c,
        };
        self.inverse_coords(c, branch)
    }

    pub fn inverse_coords(&self, y: &[f64], branch: BranchIndex) -> Result<Vec<f64>> {
        if y.len() != self.dim {
            return Err(Error::invalid("point has the wrong dimension"));
        }
        let r = crate::geometry::norm(y);
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Domain("h omits 0 and infinity".into()));
        }
        let principal = match self.dim {
            2 => {
                if branch.m2 != 0 || branch.parity != 0 {
                    return Err(Error::invalid(
                        "planar branches are indexed by m1 only",
                    ));
                }
                vec![r.ln(), y[1].atan2(y[0])]
            }
            _ => {
                let w = [y[0] / r, y[1] / r, y[2] / r];
                if w[2] >= 0.0 {
                    let (u, v) = hemisphere_to_square(w);
                    vec![u, v, r.ln()]
                } else {
                    let (u, v) = hemisphere_to_square([w[0], w[1], -w[2]]);
                    vec![2.0 - u, v, r.ln()]
                }
            }
        };
        Ok(self.apply_motion(&self.branch_motion(branch), &principal))
    }

    /// The group element carrying the principal preimage to `branch`.
    pub fn branch_motion(&self, branch: BranchIndex) -> LatticeMotion {
        match self.dim {
            2 => LatticeMotion::translation(vec![2.0 * PI * branch.m1 as f64]),
            _ => LatticeMotion {
                shift: vec![2.0 * branch.m1 as f64, 2.0 * branch.m2 as f64],
                half_turn: branch.parity % 2 == 1,
            },
        }
    }

    /// Applies `g` to the horizontal coordinates (all but the radial axis).
    pub fn apply_motion(&self, g: &LatticeMotion, x: &[f64]) -> Vec<f64> {
        let radial = self.radial_axis();
        let mut y = x.to_vec();
        let horizontal = (0..x.len()).filter(|&i| i != radial);
        for (i, s) in horizontal.zip(&g.shift) {
            if g.half_turn {
                y[i] = -y[i];
            }
            y[i] += s;
        }
        y
    }

    /// `|h(g(x)) − h(x)|`; vanishes for automorphisms.
    pub fn automorphy_defect(&self, x: &[f64], g: &LatticeMotion) -> f64 {
        crate::geometry::dist(&self.eval(&self.apply_motion(g, x)), &self.eval(x))
    }

    /// A small set of distinct branches: offsets in `{0,1}²` with both
    /// parities for `n = 3`, angle shifts `{0, ±2π}` for `n = 2`.
    pub fn fundamental_branches(&self) -> Vec<BranchIndex> {
        match self.dim {
            2 => vec![BranchIndex::new(0, 0, 0), BranchIndex::new(1, 0, 0), BranchIndex::new(-1, 0, 0)],
            _ => {
                let mut out = Vec::with_capacity(8);
                for parity in 0..2 {
                    for m1 in 0..2 {
                        for m2 in 0..2 {
                            out.push(BranchIndex::new(m1, m2, parity));
                        }
                    }
                }
                out
            }
        }
    }
}

/// Folds `t` into `[0,1]` by reflections in integer points, returning the
/// folded value and the integer cell index (its parity counts the folds).
fn fold_unit(t: f64) -> (f64, i64) {
    let k = t.floor();
    let f = t - k;
    let k = k as i64;
    if k.rem_euclid(2) == 0 {
        (f, k)
    } else {
        (1.0 - f, k)
    }
}

/// `ψ: [0,1]² → upper unit hemisphere`; center ↦ north pole, boundary ↦ equator.
pub fn square_to_hemisphere(u: f64, v: f64) -> [f64; 3] {
    let a = 2.0 * u - 1.0;
    let b = 2.0 * v - 1.0;
    let s = a.abs().max(b.abs());
    let rho = a.hypot(b);
    if rho == 0.0 {
        return [0.0, 0.0, 1.0];
    }
    let (sin, cos) = (FRAC_PI_2 * s).sin_cos();
    [sin * a / rho, sin * b / rho, cos]
}

/// Inverse of [`square_to_hemisphere`] on the closed upper hemisphere.
pub fn hemisphere_to_square(w: [f64; 3]) -> (f64, f64) {
    let rho = w[0].hypot(w[1]);
    if rho == 0.0 {
        return (0.5, 0.5);
    }
    // atan2 keeps full relative precision near the pole, unlike acos.
    let s = rho.atan2(w[2].max(0.0)) / FRAC_PI_2;
    let m = w[0].abs().max(w[1].abs());
    let a = s * w[0] / m;
    let b = s * w[1] / m;
    (0.5 * (a + 1.0), 0.5 * (b + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{dist, norm};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn center_of_base_square_is_north_pole() {
        let h = ZorichMap::spatial();
        let y = h.eval(&[0.5, 0.5, 0.0]);
        assert!(dist(&y, &[0.0, 0.0, 1.0]) < 1e-15);
        let back = h
            .inverse(&SpherePoint::Finite(vec![0.0, 0.0, 1.0]), BranchIndex::PRINCIPAL)
            .unwrap();
        assert!(dist(&back, &[0.5, 0.5, 0.0]) < 1e-15);
    }

    #[test]
    fn level_one_lands_on_sphere_of_radius_e() {
        let h = ZorichMap::spatial();
        let y = h.eval(&[0.3, 0.7, 1.0]);
        assert!((norm(&y) - std::f64::consts::E).abs() < 1e-12);
    }

    #[test]
    fn planar_mode_is_exp() {
        let h = ZorichMap::planar();
        let y = h.eval(&[0.4, 2.0]);
        let r = 0.4f64.exp();
        assert!(dist(&y, &[r * 2.0f64.cos(), r * 2.0f64.sin()]) < 1e-15);
        let e = std::f64::consts::E;
        let x = h
            .inverse(&SpherePoint::Finite(vec![e * 1f64.cos(), e * 1f64.sin()]), BranchIndex::PRINCIPAL)
            .unwrap();
        assert!(dist(&x, &[1.0, 1.0]) < 1e-15);
    }

    #[test]
    fn inverse_rejects_zero_and_infinity() {
        let h = ZorichMap::spatial();
        assert!(matches!(
            h.inverse(&SpherePoint::origin(3), BranchIndex::PRINCIPAL),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            h.inverse(&SpherePoint::Infinity, BranchIndex::PRINCIPAL),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn psi_round_trip_and_boundary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let (u, v) = (rng.random::<f64>(), rng.random::<f64>());
            let w = square_to_hemisphere(u, v);
            assert!((norm(&w) - 1.0).abs() < 1e-15);
            let (uu, vv) = hemisphere_to_square(w);
            assert!((uu - u).abs() < 1e-12 && (vv - v).abs() < 1e-12, "{u} {v} -> {uu} {vv}");
        }
        for t in [0.0, 0.25, 0.9] {
            assert!(square_to_hemisphere(t, 0.0)[2].abs() < 1e-15);
            assert!(square_to_hemisphere(1.0, t)[2].abs() < 1e-15);
        }
    }

    #[test]
    fn documented_group_elements() {
        let h = ZorichMap::spatial();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let x = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-1.0..1.0)];
            let t20 = LatticeMotion::translation(vec![2.0, 0.0]);
            let t22 = LatticeMotion::translation(vec![2.0, -2.0]);
            let rot = LatticeMotion {
                shift: vec![2.0, 2.0],
                half_turn: true,
            };
            for g in [&t20, &t22, &rot] {
                assert!(h.is_automorphism(g));
                assert!(h.automorphy_defect(&x, g) < 1e-10);
            }
        }
    }

    #[test]
    fn odd_translations_are_not_automorphisms() {
        let h = ZorichMap::spatial();
        // Away from the equator (x near the square center) a single fold
        // flips the hemisphere.
        let x = [0.45, 0.6, 0.0];
        let t10 = LatticeMotion::translation(vec![1.0, 0.0]);
        assert!(!h.is_automorphism(&t10));
        assert!(h.automorphy_defect(&x, &t10) > 0.1);
        // (1,1,0) keeps the hemisphere but rotates it by a half-turn.
        let t11 = LatticeMotion::translation(vec![1.0, 1.0]);
        assert!(!h.is_automorphism(&t11));
        let a = h.eval(&x);
        let b = h.eval(&h.apply_motion(&t11, &x));
        assert!(dist(&b, &[-a[0], -a[1], a[2]]) < 1e-12);
    }

    #[test]
    fn branches_are_distinct_and_in_fibre() {
        let h = ZorichMap::spatial();
        let y = SpherePoint::Finite(vec![0.3, -1.2, -0.4]);
        let pts: Vec<Vec<f64>> = h
            .fundamental_branches()
            .into_iter()
            .map(|b| h.inverse(&y, b).unwrap())
            .collect();
        for (i, p) in pts.iter().enumerate() {
            assert!(dist(&h.eval(p), y.coords().unwrap()) < 1e-12);
            assert!((p[2] - norm(y.coords().unwrap()).ln()).abs() < 1e-15);
            for q in &pts[i + 1..] {
                assert!(dist(p, q) > 1e-3);
            }
        }
    }

    #[test]
    fn planar_branches_shift_the_angle() {
        let h = ZorichMap::planar();
        let y = SpherePoint::Finite(vec![0.0, 2.0]);
        let x = h.inverse(&y, BranchIndex::new(3, 0, 0)).unwrap();
        assert!((x[0] - 2f64.ln()).abs() < 1e-15);
        assert!((x[1] - (FRAC_PI_2 + 6.0 * PI)).abs() < 1e-13);
        let g = LatticeMotion::translation(vec![-4.0 * PI]);
        assert!(h.is_automorphism(&g));
        assert!(h.automorphy_defect(&x, &g) < 1e-14);
    }

    #[test]
    fn planar_branch_rejects_spatial_indices() {
        let h = ZorichMap::planar();
        let y = SpherePoint::Finite(vec![1.0, 1.0]);
        assert!(h.inverse(&y, BranchIndex::new(0, 1, 0)).is_err());
        assert!(h.inverse(&y, BranchIndex::new(0, 0, 1)).is_err());
    }

    #[test]
    fn rejects_unsupported_dimension() {
        assert!(ZorichMap::new(4).is_err());
        assert!(ZorichMap::new(1).is_err());
    }
}

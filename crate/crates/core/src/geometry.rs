//! Chordal geometry of `S^n = R^n ∪ {∞}`, Möbius maps stored as stacks of
//! primitive inversions/reflections/similarities, and round annuli.

use crate::error::{Error, Result};

/// A point of the one-point compactification `R^n ∪ {∞}`.
#[derive(Debug, Clone, PartialEq)]
pub enum SpherePoint {
    Finite(Vec<f64>),
    Infinity,
}

impl SpherePoint {
    /// Builds a finite point. Non-finite coordinates are rejected.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("point coordinates must be finite"));
        }
        Ok(SpherePoint::Finite(coords))
    }

    pub fn origin(dim: usize) -> Self {
        SpherePoint::Finite(vec![0.0; dim])
    }

    /// The `axis`-th standard basis vector scaled by `t`.
    pub fn on_axis(dim: usize, axis: usize, t: f64) -> Self {
        let mut c = vec![0.0; dim];
        c[axis] = t;
        SpherePoint::Finite(c)
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    pub fn coords(&self) -> Option<&[f64]> {
        match self {
            SpherePoint::Finite(c) => Some(c),
            SpherePoint::Infinity => None,
        }
    }

    /// Euclidean norm; `+∞` for the point at infinity.
    pub fn norm(&self) -> f64 {
        match self {
            SpherePoint::Finite(c) => norm(c),
            SpherePoint::Infinity => f64::INFINITY,
        }
    }

    pub fn is_origin(&self) -> bool {
        matches!(self, SpherePoint::Finite(c) if c.iter().all(|&v| v == 0.0))
    }

    /// Wraps raw coordinates, sending overflowed vectors to `Infinity`.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        if coords.iter().all(|c| c.is_finite()) {
            SpherePoint::Finite(coords)
        } else {
            SpherePoint::Infinity
        }
    }
}

impl From<Vec<f64>> for SpherePoint {
    fn from(coords: Vec<f64>) -> Self {
        SpherePoint::from_raw(coords)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Chordal distance `χ(x,y) = |x−y| / sqrt((1+|x|²)(1+|y|²))`, with
/// `χ(x,∞) = 1 / sqrt(1+|x|²)`. Bounded by 1, attained at antipodes.
pub fn chordal_distance(x: &SpherePoint, y: &SpherePoint) -> f64 {
    match (x, y) {
        (SpherePoint::Infinity, SpherePoint::Infinity) => 0.0,
        (SpherePoint::Finite(a), SpherePoint::Infinity)
        | (SpherePoint::Infinity, SpherePoint::Finite(a)) => 1.0 / (1.0 + dot(a, a)).sqrt(),
        (SpherePoint::Finite(a), SpherePoint::Finite(b)) => {
            let d = dist(a, b);
            (d / ((1.0 + dot(a, a)).sqrt() * (1.0 + dot(b, b)).sqrt())).min(1.0)
        }
    }
}

/// Chordal distance from the origin expressed as the Euclidean radius of the
/// same sphere: a chordal sphere of radius `ρ` about `0` is `S(ρ/√(1−ρ²))`.
pub fn chordal_to_euclidean_radius(rho: f64) -> f64 {
    if rho >= 1.0 {
        f64::INFINITY
    } else {
        rho / (1.0 - rho * rho).sqrt()
    }
}

/// One building block of a Möbius map.
#[derive(Debug, Clone, PartialEq)]
pub enum Primitive {
    /// Reflection in the hyperplane `{x : x·normal = offset}`; `normal` is unit.
    Reflection { normal: Vec<f64>, offset: f64 },
    /// Inversion in the sphere `∂B(center, radius)`.
    Inversion { center: Vec<f64>, radius: f64 },
    /// `x ↦ scale · Q x + translation` with `Q` orthogonal (row-major).
    Similarity {
        scale: f64,
        orth: Vec<f64>,
        translation: Vec<f64>,
    },
}

impl Primitive {
    pub fn reflection(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let n = norm(&normal);
        if !(n > 0.0) || !offset.is_finite() {
            return Err(Error::invalid("reflection needs a nonzero normal"));
        }
        Ok(Primitive::Reflection {
            normal: normal.iter().map(|v| v / n).collect(),
            offset: offset / n,
        })
    }

    pub fn inversion(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::invalid(format!("inversion radius must be > 0, got {radius}")));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("inversion center must be finite"));
        }
        Ok(Primitive::Inversion { center, radius })
    }

    /// Similarity with an orthogonal part supplied row-major. Orthogonality
    /// is checked to 1e-9.
    pub fn similarity(scale: f64, orth: Vec<f64>, translation: Vec<f64>) -> Result<Self> {
        let n = translation.len();
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::invalid(format!("similarity scale must be > 0, got {scale}")));
        }
        if orth.len() != n * n {
            return Err(Error::invalid("orthogonal part has the wrong shape"));
        }
        for i in 0..n {
            for j in 0..n {
                let g: f64 = (0..n).map(|k| orth[k * n + i] * orth[k * n + j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                if (g - want).abs() > 1e-9 {
                    return Err(Error::invalid("similarity matrix is not orthogonal"));
                }
            }
        }
        Ok(Primitive::Similarity {
            scale,
            orth,
            translation,
        })
    }

    pub fn translation(t: Vec<f64>) -> Self {
        let n = t.len();
        Primitive::Similarity {
            scale: 1.0,
            orth: identity_matrix(n),
            translation: t,
        }
    }

    pub fn scaling(dim: usize, scale: f64) -> Result<Self> {
        Primitive::similarity(scale, identity_matrix(dim), vec![0.0; dim])
    }

    pub fn inverse(&self) -> Primitive {
        match self {
            Primitive::Reflection { .. } | Primitive::Inversion { .. } => self.clone(),
            Primitive::Similarity {
                scale,
                orth,
                translation,
            } => {
                let n = translation.len();
                let mut qt = vec![0.0; n * n];
                for i in 0..n {
                    for j in 0..n {
                        qt[i * n + j] = orth[j * n + i];
                    }
                }
                let inv_scale = 1.0 / scale;
                let t: Vec<f64> = (0..n)
                    .map(|i| -inv_scale * (0..n).map(|j| qt[i * n + j] * translation[j]).sum::<f64>())
                    .collect();
                Primitive::Similarity {
                    scale: inv_scale,
                    orth: qt,
                    translation: t,
                }
            }
        }
    }

    pub fn apply(&self, x: &SpherePoint) -> SpherePoint {
        match (self, x) {
            (Primitive::Reflection { .. }, SpherePoint::Infinity) => SpherePoint::Infinity,
            (Primitive::Similarity { .. }, SpherePoint::Infinity) => SpherePoint::Infinity,
            (Primitive::Inversion { center, .. }, SpherePoint::Infinity) => {
                SpherePoint::Finite(center.clone())
            }
            (Primitive::Reflection { normal, offset }, SpherePoint::Finite(p)) => {
                let k = 2.0 * (dot(p, normal) - offset);
                SpherePoint::from_raw(p.iter().zip(normal).map(|(a, n)| a - k * n).collect())
            }
            (Primitive::Inversion { center, radius }, SpherePoint::Finite(p)) => {
                let v = sub(p, center);
                let q = dot(&v, &v);
                if q == 0.0 {
                    return SpherePoint::Infinity;
                }
                let k = radius * radius / q;
                SpherePoint::from_raw(center.iter().zip(&v).map(|(c, vi)| c + k * vi).collect())
            }
            (
                Primitive::Similarity {
                    scale,
                    orth,
                    translation,
                },
                SpherePoint::Finite(p),
            ) => {
                let n = translation.len();
                SpherePoint::from_raw(
                    (0..n)
                        .map(|i| {
                            scale * (0..n).map(|j| orth[i * n + j] * p[j]).sum::<f64>()
                                + translation[i]
                        })
                        .collect(),
                )
            }
        }
    }

    /// Upper bound for the local Euclidean scaling factor of the primitive on a
    /// ball that stays away from any inversion center.
    fn lipschitz_on_ball(&self, center: &[f64], radius: f64) -> f64 {
        match self {
            Primitive::Reflection { .. } => 1.0,
            Primitive::Similarity { scale, .. } => *scale,
            Primitive::Inversion {
                center: c,
                radius: r,
            } => {
                let gap = dist(center, c) - radius;
                if gap <= 0.0 {
                    f64::INFINITY
                } else {
                    r * r / (gap * gap)
                }
            }
        }
    }
}

pub(crate) fn identity_matrix(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

/// A Möbius transformation of `R^n ∪ {∞}` as an ordered stack of primitives,
/// applied first-to-last.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MobiusMap {
    primitives: Vec<Primitive>,
}

impl MobiusMap {
    pub fn identity() -> Self {
        MobiusMap::default()
    }

    pub fn from_primitives(primitives: Vec<Primitive>) -> Self {
        MobiusMap { primitives }
    }

    pub fn primitives(&self) -> &[Primitive] {
        &self.primitives
    }

    pub fn depth(&self) -> usize {
        self.primitives.len()
    }

    /// The map "first `self`, then `next`".
    pub fn then(&self, next: &MobiusMap) -> MobiusMap {
        let mut primitives = self.primitives.clone();
        primitives.extend(next.primitives.iter().cloned());
        MobiusMap { primitives }
    }

    pub fn then_primitive(mut self, p: Primitive) -> MobiusMap {
        self.primitives.push(p);
        self
    }

    /// Formal inverse: reversed stack of inverted primitives.
    pub fn inverse(&self) -> MobiusMap {
        MobiusMap {
            primitives: self.primitives.iter().rev().map(Primitive::inverse).collect(),
        }
    }

    pub fn apply(&self, x: &SpherePoint) -> SpherePoint {
        self.primitives
            .iter()
            .fold(x.clone(), |acc, p| p.apply(&acc))
    }

    /// Crude Lipschitz bound on `B(center, radius)`: tracks the image ball
    /// through the stack and multiplies per-primitive bounds. Returns `∞` when
    /// some inversion center is not separated from the running ball.
    pub fn lipschitz_bound_on_ball(&self, center: &[f64], radius: f64) -> f64 {
        let mut c = SpherePoint::Finite(center.to_vec());
        let mut r = radius;
        let mut bound = 1.0;
        for p in &self.primitives {
            let cc = match c.coords() {
                Some(cc) => cc.to_vec(),
                None => return f64::INFINITY,
            };
            let l = p.lipschitz_on_ball(&cc, r);
            if !l.is_finite() {
                return f64::INFINITY;
            }
            bound *= l;
            match image_ball(p, &cc, r) {
                Some((nc, nr)) => {
                    c = SpherePoint::Finite(nc);
                    r = nr;
                }
                None => return f64::INFINITY,
            }
        }
        bound
    }

    /// Image of the closed ball `B̄(center, radius)` when it is again a ball
    /// (i.e. no inversion center lies in the running ball).
    pub fn image_of_ball(&self, center: &[f64], radius: f64) -> Option<(Vec<f64>, f64)> {
        let mut c = center.to_vec();
        let mut r = radius;
        for p in &self.primitives {
            let (nc, nr) = image_ball(p, &c, r)?;
            c = nc;
            r = nr;
        }
        Some((c, r))
    }
}

fn image_ball(p: &Primitive, c: &[f64], r: f64) -> Option<(Vec<f64>, f64)> {
    match p {
        Primitive::Inversion {
            center,
            radius: rho,
        } => {
            let v = sub(c, center);
            let dv = norm(&v);
            if dv <= r {
                return None;
            }
            // The diameter along the line through the inversion center maps
            // to a diameter of the image ball.
            let k = rho * rho;
            let near = k / (dv - r);
            let far = k / (dv + r);
            let mid = 0.5 * (near + far);
            let u: Vec<f64> = v.iter().map(|x| x / dv).collect();
            Some((
                center.iter().zip(&u).map(|(ci, ui)| ci + mid * ui).collect(),
                0.5 * (near - far),
            ))
        }
        _ => {
            let img = p.apply(&SpherePoint::Finite(c.to_vec()));
            let scale = match p {
                Primitive::Similarity { scale, .. } => *scale,
                _ => 1.0,
            };
            img.coords().map(|nc| (nc.to_vec(), r * scale))
        }
    }
}

/// Inversion in `∂B(center, radius)`: an involution exchanging the open ball
/// with the complement of its closure.
pub fn build_ball_exchange_involution(center: &SpherePoint, radius: f64) -> Result<MobiusMap> {
    let c = center
        .coords()
        .ok_or_else(|| Error::invalid("ball center must be finite"))?;
    Ok(MobiusMap::from_primitives(vec![Primitive::inversion(
        c.to_vec(),
        radius,
    )?]))
}

/// Euclidean round annulus `{y : inner < |y − center| < outer}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundAnnulus {
    pub center: SpherePoint,
    pub inner: f64,
    pub outer: f64,
}

impl RoundAnnulus {
    pub fn new(center: SpherePoint, inner: f64, outer: f64) -> Result<Self> {
        if !(inner > 0.0) || !outer.is_finite() || !(inner < outer) {
            return Err(Error::invalid(format!(
                "annulus radii must satisfy 0 < r < s < ∞, got r={inner}, s={outer}"
            )));
        }
        Ok(RoundAnnulus {
            center,
            inner,
            outer,
        })
    }

    pub fn modulus(&self) -> f64 {
        (self.outer / self.inner).ln()
    }
}

/// Conformal modulus `log(s/r)` of a round annulus.
pub fn annulus_modulus(a: &RoundAnnulus) -> Result<f64> {
    if !(a.inner > 0.0) || !(a.inner < a.outer) || !a.outer.is_finite() {
        return Err(Error::invalid("degenerate annulus"));
    }
    Ok(a.modulus())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[f64]) -> SpherePoint {
        SpherePoint::new(c.to_vec()).unwrap()
    }

    #[test]
    fn chordal_examples() {
        let o = SpherePoint::origin(3);
        assert_eq!(chordal_distance(&o, &SpherePoint::Infinity), 1.0);
        let x = pt(&[0.3, -1.0, 2.0]);
        assert_eq!(chordal_distance(&x, &x), 0.0);
        let e1 = SpherePoint::on_axis(3, 0, 1.0);
        assert!((chordal_distance(&o, &e1) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn antipodes_are_at_distance_one() {
        // x and -x/|x|² are antipodal under stereographic projection.
        let x = pt(&[0.5, 2.0]);
        let y = pt(&[-0.5 / 4.25, -2.0 / 4.25]);
        assert!((chordal_distance(&x, &y) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unit_inversion_examples() {
        let inv = build_ball_exchange_involution(&SpherePoint::origin(3), 1.0).unwrap();
        assert_eq!(inv.apply(&SpherePoint::on_axis(3, 0, 2.0)), SpherePoint::on_axis(3, 0, 0.5));
        assert_eq!(inv.apply(&SpherePoint::origin(3)), SpherePoint::Infinity);
        assert_eq!(inv.apply(&SpherePoint::Infinity), SpherePoint::origin(3));
        assert_eq!(inv.apply(&SpherePoint::on_axis(3, 0, 0.5)), SpherePoint::on_axis(3, 0, 2.0));
    }

    #[test]
    fn similarity_example() {
        let m = MobiusMap::from_primitives(vec![Primitive::scaling(3, 2.0).unwrap()]);
        assert_eq!(m.apply(&SpherePoint::on_axis(3, 0, 1.0)), SpherePoint::on_axis(3, 0, 2.0));
        assert_eq!(m.apply(&SpherePoint::Infinity), SpherePoint::Infinity);
    }

    #[test]
    fn involution_center_goes_to_infinity() {
        let x0 = pt(&[1.0, -2.0, 0.5]);
        let phi = build_ball_exchange_involution(&x0, 0.4).unwrap();
        assert_eq!(phi.apply(&x0), SpherePoint::Infinity);
        let y = pt(&[0.1, 0.2, 0.3]);
        let back = phi.apply(&phi.apply(&y));
        assert!(dist(back.coords().unwrap(), y.coords().unwrap()) < 1e-12);
        assert!(matches!(
            build_ball_exchange_involution(&x0, 0.0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(build_ball_exchange_involution(&SpherePoint::Infinity, 1.0).is_err());
    }

    #[test]
    fn involution_swaps_inside_and_outside() {
        let x0 = pt(&[0.0, 0.0]);
        let phi = build_ball_exchange_involution(&x0, 2.0).unwrap();
        for r in [0.1, 0.5, 1.0, 1.9] {
            let img = phi.apply(&SpherePoint::on_axis(2, 1, r));
            assert!(img.norm() > 2.0);
        }
    }

    #[test]
    fn annulus_moduli() {
        let e = std::f64::consts::E;
        let a = RoundAnnulus::new(SpherePoint::origin(3), 1.0, e).unwrap();
        assert!((annulus_modulus(&a).unwrap() - 1.0).abs() < 1e-15);
        let a = RoundAnnulus::new(SpherePoint::origin(3), 1.0, 2.0).unwrap();
        let b = RoundAnnulus::new(SpherePoint::origin(3), 0.5, 1.0).unwrap();
        assert_eq!(a.modulus(), b.modulus());
        assert!(RoundAnnulus::new(SpherePoint::origin(3), 1.0, 1.0).is_err());
        let degenerate = RoundAnnulus {
            center: SpherePoint::origin(2),
            inner: 1.0,
            outer: 1.0,
        };
        assert!(annulus_modulus(&degenerate).is_err());
    }

    #[test]
    fn image_of_ball_under_inversion() {
        let inv = MobiusMap::from_primitives(vec![Primitive::inversion(vec![0.0, 0.0], 1.0).unwrap()]);
        let (c, r) = inv.image_of_ball(&[3.0, 0.0], 1.0).unwrap();
        // [2,4] on the axis maps to [1/4, 1/2].
        assert!((c[0] - 0.375).abs() < 1e-15 && c[1] == 0.0);
        assert!((r - 0.125).abs() < 1e-15);
        assert!(inv.image_of_ball(&[0.5, 0.0], 1.0).is_none());
    }

    #[test]
    fn similarity_rejects_non_orthogonal() {
        assert!(Primitive::similarity(1.0, vec![1.0, 1.0, 0.0, 1.0], vec![0.0, 0.0]).is_err());
        assert!(Primitive::similarity(0.0, identity_matrix(2), vec![0.0, 0.0]).is_err());
    }
}

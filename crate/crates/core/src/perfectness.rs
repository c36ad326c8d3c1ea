//! Uniform-perfectness diagnostics for finite samples (separating round
//! annuli), empirical Hölder constants, and dilatation of linear maps.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{chordal_distance, chordal_to_euclidean_radius, RoundAnnulus, SpherePoint};

/// A round annulus about a sample point separating the sample.
#[derive(Debug, Clone, Serialize)]
pub struct AnnulusReport {
    pub center_index: usize,
    /// Radii after the chordal isometry sending the center to the origin.
    pub inner: f64,
    pub outer: f64,
    pub modulus: f64,
    /// Sample points in the inner complementary component, center included.
    pub inside: usize,
    pub outside: usize,
    /// Two-point sample: the family is unbounded and has been truncated.
    pub degenerate: bool,
}

impl AnnulusReport {
    /// The annulus in normalized coordinates (center at the origin).
    pub fn annulus(&self, dim: usize) -> Result<RoundAnnulus> {
        RoundAnnulus::new(SpherePoint::origin(dim), self.inner, self.outer)
    }
}

/// Truncation ratio for the unbounded two-point family.
pub const TWO_POINT_RATIO: f64 = 1e6;

/// Radii of the sample seen from point `i`, after normalizing it to `0`.
fn normalized_radii(points: &[SpherePoint], i: usize) -> Vec<f64> {
    let mut r: Vec<f64> = points
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, p)| chordal_to_euclidean_radius(chordal_distance(&points[i], p)))
        .collect();
    r.sort_by(f64::total_cmp);
    r
}

fn check_len(points: &[SpherePoint]) -> Result<()> {
    if points.len() < 2 {
        return Err(Error::invalid("annulus analysis needs at least 2 points"));
    }
    Ok(())
}

fn gaps_from(i: usize, radii: &[f64], total: usize) -> impl Iterator<Item = AnnulusReport> + '_ {
    radii.windows(2).enumerate().filter_map(move |(k, w)| {
        (w[1] > w[0] && w[0] > 0.0).then_some(AnnulusReport {
            center_index: i,
            inner: w[0],
            outer: w[1],
            modulus: (w[1] / w[0]).ln(),
            inside: k + 2,
            outside: total - k - 2,
            degenerate: false,
        })
    })
}

/// Every gap between consecutive distinct distances from each sample point,
/// sorted by modulus descending.
pub fn separating_annuli(points: &[SpherePoint]) -> Result<Vec<AnnulusReport>> {
    check_len(points)?;
    if points.len() == 2 {
        let r = chordal_to_euclidean_radius(chordal_distance(&points[0], &points[1]));
        return Ok(vec![AnnulusReport {
            center_index: 0,
            inner: r / TWO_POINT_RATIO,
            outer: r,
            modulus: TWO_POINT_RATIO.ln(),
            inside: 1,
            outside: 1,
            degenerate: true,
        }]);
    }
    let mut out: Vec<AnnulusReport> = (0..points.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let radii = normalized_radii(points, i);
            gaps_from(i, &radii, points.len()).collect::<Vec<_>>()
        })
        .collect();
    out.sort_by(|a, b| {
        b.modulus
            .total_cmp(&a.modulus)
            .then(a.center_index.cmp(&b.center_index))
            .then(a.inner.total_cmp(&b.inner))
    });
    Ok(out)
}

/// Largest separating modulus `α̂` together with the sample size.
#[derive(Debug, Clone, Serialize)]
pub struct PerfectnessEstimate {
    pub alpha_hat: f64,
    pub points: usize,
    pub witness: Option<AnnulusReport>,
}

/// `α̂`: the largest modulus over [`separating_annuli`], computed without
/// materializing the full list.
pub fn uniform_perfectness_estimate(points: &[SpherePoint]) -> Result<PerfectnessEstimate> {
    check_len(points)?;
    if points.len() == 2 {
        let w = separating_annuli(points)?.remove(0);
        return Ok(PerfectnessEstimate {
            alpha_hat: w.modulus,
            points: 2,
            witness: Some(w),
        });
    }
    let witness = (0..points.len())
        .into_par_iter()
        .filter_map(|i| {
            let radii = normalized_radii(points, i);
            gaps_from(i, &radii, points.len()).max_by(|a, b| a.modulus.total_cmp(&b.modulus))
        })
        .reduce_with(|a, b| {
            match a.modulus.total_cmp(&b.modulus) {
                std::cmp::Ordering::Less => b,
                std::cmp::Ordering::Greater => a,
                std::cmp::Ordering::Equal if b.center_index < a.center_index => b,
                std::cmp::Ordering::Equal => a,
            }
        });
    Ok(PerfectnessEstimate {
        alpha_hat: witness.as_ref().map_or(0.0, |w| w.modulus),
        points: points.len(),
        witness,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct HolderEstimate {
    pub alpha: f64,
    pub estimate: f64,
    pub samples: usize,
    pub seed: u64,
}

pub const HOLDER_MIN_DISTANCE: f64 = 1e-8;

/// Inverse stereographic image of a point of the unit sphere in `R^{n+1}`;
/// the chordal metric is half the Euclidean chord there.
fn from_sphere(x: &[f64]) -> SpherePoint {
    let n = x.len() - 1;
    let denom = 1.0 - x[n];
    if denom <= 0.0 {
        return SpherePoint::Infinity;
    }
    SpherePoint::from(x[..n].iter().map(|v| v / denom).collect::<Vec<f64>>())
}

fn unit_gaussian<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.into_iter().map(|a| a / n).collect();
        }
    }
}

/// Pair `(x, y)` with `x` uniform on `S^n` and `χ(x, y) = t`.
fn sample_pair<R: Rng>(rng: &mut R, dim: usize, t: f64) -> (SpherePoint, SpherePoint) {
    let x = unit_gaussian(rng, dim + 1);
    let mut v = unit_gaussian(rng, dim + 1);
    let proj: f64 = v.iter().zip(&x).map(|(a, b)| a * b).sum();
    v.iter_mut().zip(&x).for_each(|(a, b)| *a -= proj * b);
    let vn = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let theta = 2.0 * t.min(1.0).asin();
    let (s, c) = theta.sin_cos();
    let y: Vec<f64> = x.iter().zip(&v).map(|(a, b)| c * a + s * b / vn).collect();
    (from_sphere(&x), from_sphere(&y))
}

/// Empirical `sup χ(f(x), f(y)) / χ(x, y)^α` over seeded pairs whose chordal
/// distances are log-uniform in `[1e-8, 1]`.
pub fn holder_constant_estimate<F>(f: F, dim: usize, alpha: f64, samples: usize, seed: u64) -> Result<HolderEstimate>
where
    F: Fn(&SpherePoint) -> SpherePoint + Sync,
{
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid(format!("Hölder exponent {alpha} not in (0,1]")));
    }
    if dim == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    const CHUNK: usize = 4096;
    let chunks = samples.div_ceil(CHUNK);
    let lo = HOLDER_MIN_DISTANCE.ln();
    let estimate = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = CHUNK.min(samples - c * CHUNK);
            let mut best: f64 = 0.0;
            for _ in 0..len {
                let t = (lo * (1.0 - rng.random::<f64>())).exp();
                let (x, y) = sample_pair(&mut rng, dim, t);
                let dxy = chordal_distance(&x, &y);
                if dxy <= 0.0 {
                    continue;
                }
                let r = chordal_distance(&f(&x), &f(&y)) / dxy.powf(alpha);
                if r.is_finite() {
                    best = best.max(r);
                }
            }
            best
        })
        .reduce(|| 0.0, f64::max);
    Ok(HolderEstimate {
        alpha,
        estimate,
        samples,
        seed,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LinearDilatation {
    pub k_outer: f64,
    pub k_inner: f64,
    pub k: f64,
}

/// `K_O = ‖M‖ⁿ/|det M|`, `K_I = |det M|/σ_min(M)ⁿ`, `K = max(K_O, K_I)`.
pub fn matrix_dilatation(m: &DMatrix<f64>) -> Result<LinearDilatation> {
    let n = m.nrows();
    if n == 0 || m.ncols() != n {
        return Err(Error::invalid("dilatation needs a nonempty square matrix"));
    }
    let det = m.determinant().abs();
    if !(det > 0.0) || !det.is_finite() {
        return Err(Error::invalid("matrix is singular"));
    }
    let sv = m.singular_values();
    let smax = sv.max();
    let smin = sv.min();
    let k_outer = smax.powi(n as i32) / det;
    let k_inner = det / smin.powi(n as i32);
    Ok(LinearDilatation {
        k_outer,
        k_inner,
        k: k_outer.max(k_inner),
    })
}

/// `K(M^k)` for `k = 1..=kmax`.
pub fn dilatation_sequence(m: &DMatrix<f64>, kmax: usize) -> Result<Vec<f64>> {
    let mut power = m.clone();
    let mut out = Vec::with_capacity(kmax);
    for k in 1..=kmax {
        if k > 1 {
            power = &power * m;
        }
        out.push(matrix_dilatation(&power)?.k);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> Vec<SpherePoint> {
        xs.iter().map(|&x| SpherePoint::Finite(vec![x, 0.0])).collect()
    }

    #[test]
    fn doubly_exponential_gaps_blow_up() {
        let mut xs: Vec<f64> = (0..=5).map(|k| 2f64.powf(-(2f64.powi(k)))).collect();
        xs.push(0.0);
        let est = uniform_perfectness_estimate(&line(&xs)).unwrap();
        assert!(est.alpha_hat > 10.0, "{}", est.alpha_hat);
        let all = separating_annuli(&line(&xs)).unwrap();
        assert_eq!(all[0].modulus, est.alpha_hat);
        assert!(all.windows(2).all(|w| w[0].modulus >= w[1].modulus));
        for a in &all {
            assert!(a.inside >= 1 && a.outside >= 1);
            assert!((a.annulus(2).unwrap().modulus() - a.modulus).abs() < 1e-12);
        }
    }

    #[test]
    fn origin_centered_gaps_are_euclidean() {
        let xs = [0.0, 0.25, 1.0, 4.0];
        let all = separating_annuli(&line(&xs)).unwrap();
        let from_origin: Vec<f64> = all
            .iter()
            .filter(|a| a.center_index == 0)
            .map(|a| a.modulus)
            .collect();
        assert_eq!(from_origin.len(), 2);
        for m in from_origin {
            assert!((m - 4f64.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn two_points_are_degenerate() {
        let all = separating_annuli(&line(&[0.0, 1.0])).unwrap();
        assert_eq!(all.len(), 1);
        assert!(all[0].degenerate);
        assert!((all[0].modulus - TWO_POINT_RATIO.ln()).abs() < 1e-12);
        assert!(separating_annuli(&line(&[1.0])).is_err());
    }

    #[test]
    fn holder_trivial_maps() {
        let id = holder_constant_estimate(|x: &SpherePoint| x.clone(), 2, 1.0, 20_000, 1).unwrap();
        assert!(id.estimate <= 1.0 + 1e-9 && id.estimate > 0.99);
        let c = holder_constant_estimate(|_: &SpherePoint| SpherePoint::origin(2), 2, 1.0, 1000, 1).unwrap();
        assert_eq!(c.estimate, 0.0);
        assert!(holder_constant_estimate(|x: &SpherePoint| x.clone(), 2, 0.0, 10, 1).is_err());
    }

    #[test]
    fn holder_is_deterministic() {
        let sq = |x: &SpherePoint| match x {
            SpherePoint::Finite(c) => SpherePoint::from(vec![c[0] * c[0] - c[1] * c[1], 2.0 * c[0] * c[1]]),
            SpherePoint::Infinity => SpherePoint::Infinity,
        };
        let a = holder_constant_estimate(sq, 2, 1.0, 10_000, 5).unwrap();
        let b = holder_constant_estimate(sq, 2, 1.0, 10_000, 5).unwrap();
        assert_eq!(a.estimate, b.estimate);
        assert!(a.estimate < 2.0 + 1e-6);
    }

    #[test]
    fn dilatation_examples() {
        let d = matrix_dilatation(&DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 1.0, 1.0]))).unwrap();
        assert_eq!((d.k_outer, d.k_inner, d.k), (4.0, 2.0, 4.0));
        let s = matrix_dilatation(&(DMatrix::<f64>::identity(3, 3) * 3.0)).unwrap();
        assert!((s.k - 1.0).abs() < 1e-12);
        let (c, sn) = (0.3f64.cos(), 0.3f64.sin());
        let rot = DMatrix::from_row_slice(3, 3, &[c, -sn, 0.0, sn, c, 0.0, 0.0, 0.0, 1.0]);
        assert!((matrix_dilatation(&rot).unwrap().k - 1.0).abs() < 1e-12);
        assert!(matrix_dilatation(&DMatrix::<f64>::zeros(3, 3)).is_err());
    }

    #[test]
    fn dilatation_sequence_of_diag() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 1.0, 1.0]));
        let seq = dilatation_sequence(&m, 15).unwrap();
        for (k, v) in seq.iter().enumerate() {
            assert_eq!(*v, 4f64.powi(k as i32 + 1));
        }
        let s = dilatation_sequence(&(DMatrix::<f64>::identity(3, 3) * 2.0), 10).unwrap();
        assert!(s.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }
}

//! Contractive iterated function systems: chaos-game sampling, deterministic
//! stage refinement over balls and solid tori, and the Moran equation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{dist, dot, sub, MobiusMap, SpherePoint};

/// Closed Euclidean ball.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("ball needs a finite center and radius > 0"));
        }
        Ok(Ball { center, radius })
    }

    pub fn contains_point(&self, x: &[f64], tol: f64) -> bool {
        dist(x, &self.center) <= self.radius + tol
    }

    pub fn contains_ball(&self, other: &Ball) -> bool {
        dist(&self.center, &other.center) + other.radius <= self.radius * (1.0 + 1e-12)
    }
}

/// One member of a [`ContractiveSystem`].
#[derive(Debug, Clone)]
pub enum Contraction {
    /// `x ↦ scale·O·x + translation`, `O` orthogonal and stored row-major.
    Similarity {
        scale: f64,
        orth: Vec<f64>,
        translation: Vec<f64>,
    },
    /// Möbius map certified on a finite union of witness balls: every ball
    /// is mapped strictly inside one of them, with Lipschitz bound `ratio`.
    Mobius {
        map: MobiusMap,
        witness: Vec<Ball>,
        ratio: f64,
    },
}

fn mat_vec(m: &[f64], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n).map(|i| dot(&m[i * n..(i + 1) * n], x)).collect()
}

impl Contraction {
    pub fn similarity(scale: f64, orth: Vec<f64>, translation: Vec<f64>) -> Result<Self> {
        let n = translation.len();
        if !(scale > 0.0 && scale < 1.0) {
            return Err(Error::invalid(format!("contraction ratio {scale} not in (0,1)")));
        }
        if orth.len() != n * n {
            return Err(Error::invalid("orthogonal part has the wrong size"));
        }
        for i in 0..n {
            for j in 0..n {
                let g = dot(&orth[i * n..(i + 1) * n], &orth[j * n..(j + 1) * n]);
                let want = if i == j { 1.0 } else { 0.0 };
                if (g - want).abs() > 1e-9 {
                    return Err(Error::invalid("orthogonal part is not orthogonal"));
                }
            }
        }
        Ok(Contraction::Similarity {
            scale,
            orth,
            translation,
        })
    }

    /// `t ↦ scale·t + offset` on the line.
    pub fn affine_1d(scale: f64, offset: f64) -> Result<Self> {
        Self::similarity(scale, vec![1.0], vec![offset])
    }

    /// Certifies `map` on the witness balls; fails unless each ball is sent
    /// strictly inside some witness ball with Lipschitz bound below 1.
    pub fn mobius(map: MobiusMap, witness: Vec<Ball>) -> Result<Self> {
        if witness.is_empty() {
            return Err(Error::invalid("a Möbius contraction needs a witness ball"));
        }
        let mut ratio: f64 = 0.0;
        for b in &witness {
            let (c, r) = map
                .image_of_ball(&b.center, b.radius)
                .ok_or_else(|| Error::invalid("witness ball meets an inversion center"))?;
            let img = Ball { center: c, radius: r };
            let inside = witness
                .iter()
                .any(|w| dist(&w.center, &img.center) + img.radius < w.radius);
            if !inside {
                return Err(Error::invalid("witness ball is not mapped strictly into the witness"));
            }
            ratio = ratio.max(map.lipschitz_bound_on_ball(&b.center, b.radius));
        }
        if !(ratio < 1.0) {
            return Err(Error::invalid(format!(
                "Lipschitz bound {ratio} on the witness is not a contraction"
            )));
        }
        Ok(Contraction::Mobius {
            map,
            witness,
            ratio,
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            Contraction::Similarity { translation, .. } => translation.len(),
            Contraction::Mobius { witness, .. } => witness[0].center.len(),
        }
    }

    pub fn ratio(&self) -> f64 {
        match self {
            Contraction::Similarity { scale, .. } => *scale,
            Contraction::Mobius { ratio, .. } => *ratio,
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Contraction::Similarity {
                scale,
                orth,
                translation,
            } => mat_vec(orth, x)
                .into_iter()
                .zip(translation)
                .map(|(v, t)| scale * v + t)
                .collect(),
            Contraction::Mobius { map, .. } => match map.apply(&SpherePoint::Finite(x.to_vec())) {
                SpherePoint::Finite(c) => c,
                SpherePoint::Infinity => vec![f64::INFINITY; x.len()],
            },
        }
    }

    /// Image of a region, when it is again representable.
    pub fn apply_region(&self, region: &Region) -> Result<Region> {
        match (self, region) {
            (Contraction::Similarity { scale, .. }, Region::Ball(b)) => Ok(Region::Ball(Ball {
                center: self.apply(&b.center),
                radius: scale * b.radius,
            })),
            (Contraction::Mobius { map, .. }, Region::Ball(b)) => {
                let (center, radius) = map
                    .image_of_ball(&b.center, b.radius)
                    .ok_or_else(|| Error::invalid("ball meets an inversion center"))?;
                Ok(Region::Ball(Ball { center, radius }))
            }
            (Contraction::Similarity { scale, orth, .. }, Region::Torus(t)) => {
                Ok(Region::Torus(SolidTorus {
                    center: self.apply(&t.center),
                    e1: mat_vec(orth, &t.e1),
                    e2: mat_vec(orth, &t.e2),
                    core_radius: scale * t.core_radius,
                    tube_radius: scale * t.tube_radius,
                }))
            }
            (Contraction::Mobius { .. }, Region::Torus(_)) => Err(Error::Unsupported(
                "Möbius images of tori are not tracked".into(),
            )),
        }
    }
}

/// Solid torus: points within `tube_radius` of the core circle with center
/// `center`, radius `core_radius`, spanned by orthonormal `e1`, `e2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolidTorus {
    pub center: Vec<f64>,
    pub e1: Vec<f64>,
    pub e2: Vec<f64>,
    pub core_radius: f64,
    pub tube_radius: f64,
}

impl SolidTorus {
    pub fn core_point(&self, t: f64) -> Vec<f64> {
        let (s, c) = t.sin_cos();
        (0..3)
            .map(|i| self.center[i] + self.core_radius * (c * self.e1[i] + s * self.e2[i]))
            .collect()
    }

    pub fn core_tangent(&self, t: f64) -> Vec<f64> {
        let (s, c) = t.sin_cos();
        (0..3)
            .map(|i| self.core_radius * (-s * self.e1[i] + c * self.e2[i]))
            .collect()
    }

    /// `n` equally spaced points on the core circle.
    pub fn core_samples(&self, n: usize) -> Vec<Vec<f64>> {
        (0..n)
            .map(|k| self.core_point(std::f64::consts::TAU * k as f64 / n as f64))
            .collect()
    }

    /// Euclidean distance from `p` to the core circle.
    pub fn distance_to_core(&self, p: &[f64]) -> f64 {
        let q = sub(p, &self.center);
        let a = dot(&q, &self.e1);
        let b = dot(&q, &self.e2);
        let in_plane = (a * a + b * b).sqrt();
        let h2 = (dot(&q, &q) - a * a - b * b).max(0.0);
        ((in_plane - self.core_radius).powi(2) + h2).sqrt()
    }

    pub fn contains_point(&self, p: &[f64], tol: f64) -> bool {
        self.distance_to_core(p) <= self.tube_radius + tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Ball(Ball),
    Torus(SolidTorus),
}

const CORE_SAMPLES: usize = 512;

impl Region {
    pub fn diameter(&self) -> f64 {
        match self {
            Region::Ball(b) => 2.0 * b.radius,
            Region::Torus(t) => 2.0 * (t.core_radius + t.tube_radius),
        }
    }

    /// A point of the region used for nesting checks.
    pub fn representative(&self) -> Vec<f64> {
        match self {
            Region::Ball(b) => b.center.clone(),
            Region::Torus(t) => t.core_point(0.0),
        }
    }

    /// Containment; torus cases are checked on core samples.
    pub fn contains(&self, inner: &Region) -> bool {
        match (self, inner) {
            (Region::Ball(a), Region::Ball(b)) => a.contains_ball(b),
            (Region::Ball(a), Region::Torus(t)) => {
                dist(&a.center, &t.center) + t.core_radius + t.tube_radius
                    <= a.radius * (1.0 + 1e-12)
            }
            (Region::Torus(t), Region::Ball(b)) => {
                t.distance_to_core(&b.center) + b.radius <= t.tube_radius * (1.0 + 1e-12)
            }
            (Region::Torus(outer), Region::Torus(t)) => t
                .core_samples(CORE_SAMPLES)
                .iter()
                .all(|p| outer.distance_to_core(p) + t.tube_radius <= outer.tube_radius * (1.0 + 1e-12)),
        }
    }

    pub fn contains_point(&self, x: &[f64], tol: f64) -> bool {
        match self {
            Region::Ball(b) => b.contains_point(x, tol),
            Region::Torus(t) => t.contains_point(x, tol),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ContractiveSystem {
    dim: usize,
    maps: Vec<Contraction>,
}

impl ContractiveSystem {
    pub fn new(maps: Vec<Contraction>) -> Result<Self> {
        let dim = maps
            .first()
            .ok_or_else(|| Error::invalid("a system needs at least one map"))?
            .dim();
        if maps.iter().any(|m| m.dim() != dim) {
            return Err(Error::invalid("maps act in different dimensions"));
        }
        Ok(ContractiveSystem { dim, maps })
    }

    /// `{t ↦ s_i·t + b_i}` on the line.
    pub fn affine_1d(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(s, b)| Contraction::affine_1d(s, b))
                .collect::<Result<_>>()?,
        )
    }

    /// `{t/3, t/3 + 2/3}`.
    pub fn middle_thirds() -> Self {
        Self::affine_1d(&[(1.0 / 3.0, 0.0), (1.0 / 3.0, 2.0 / 3.0)]).expect("valid")
    }

    /// All maps of all systems, in order.
    pub fn union(systems: &[ContractiveSystem]) -> Result<Self> {
        Self::new(systems.iter().flat_map(|s| s.maps.iter().cloned()).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn maps(&self) -> &[Contraction] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.maps.iter().map(Contraction::ratio).collect()
    }

    pub fn max_ratio(&self) -> f64 {
        self.ratios().into_iter().fold(0.0, f64::max)
    }

    pub fn is_similarity_system(&self) -> bool {
        self.maps
            .iter()
            .all(|m| matches!(m, Contraction::Similarity { .. }))
    }

    /// Approximate fixed point of the first map.
    fn start_point(&self) -> Vec<f64> {
        let mut x = match &self.maps[0] {
            Contraction::Similarity { .. } => vec![0.0; self.dim],
            Contraction::Mobius { witness, .. } => witness[0].center.clone(),
        };
        for _ in 0..256 {
            x = self.maps[0].apply(&x);
        }
        x
    }
}

pub const DEFAULT_BURNIN: usize = 64;

#[derive(Debug, Clone)]
pub struct AttractorSample {
    pub points: Vec<SpherePoint>,
    pub burnin: usize,
    pub seed: u64,
    /// `(max ratio)^burnin`: emitted points are within this multiple of the
    /// seed-region diameter from the attractor.
    pub accuracy_factor: f64,
}

fn run_chaos(sys: &ContractiveSystem, n: usize, burnin: usize, rng: &mut ChaCha8Rng) -> Vec<SpherePoint> {
    let m = sys.len();
    let mut x = sys.start_point();
    for _ in 0..burnin {
        x = sys.maps[rng.random_range(0..m)].apply(&x);
    }
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        x = sys.maps[rng.random_range(0..m)].apply(&x);
        out.push(SpherePoint::Finite(x.clone()));
    }
    out
}

/// Random-composition orbit started at the fixed point of the first map.
pub fn chaos_game(sys: &ContractiveSystem, n: usize, burnin: usize, seed: u64) -> Result<AttractorSample> {
    if n == 0 {
        return Err(Error::invalid("chaos game needs n > 0"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(AttractorSample {
        points: run_chaos(sys, n, burnin, &mut rng),
        burnin,
        seed,
        accuracy_factor: sys.max_ratio().powi(burnin as i32),
    })
}

/// Chaos game split into `batches` independent streams run in parallel;
/// output order is batch order, independent of scheduling.
pub fn chaos_game_batched(
    sys: &ContractiveSystem,
    n: usize,
    burnin: usize,
    seed: u64,
    batches: usize,
) -> Result<AttractorSample> {
    if n == 0 || batches == 0 {
        return Err(Error::invalid("chaos game needs n > 0 and at least one batch"));
    }
    let per = n.div_ceil(batches);
    let chunks: Vec<Vec<SpherePoint>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let len = per.min(n.saturating_sub(b * per));
            run_chaos(sys, len, burnin, &mut rng)
        })
        .collect();
    Ok(AttractorSample {
        points: chunks.into_iter().flatten().collect(),
        burnin,
        seed,
        accuracy_factor: sys.max_ratio().powi(burnin as i32),
    })
}

/// Stage-`k` images `φ_{i₁}∘…∘φ_{i_k}(seedset)`, ordered lexicographically
/// by `(i₁, …, i_k)`.
pub fn deterministic_stage(sys: &ContractiveSystem, seedset: &Region, k: usize) -> Result<Vec<Region>> {
    refine_regions(sys, std::slice::from_ref(seedset), k)
}

/// Stage-`k` images of a seed collection whose union is mapped into itself:
/// every image of a seed must lie in some seed.
pub fn refine_regions(sys: &ContractiveSystem, seeds: &[Region], k: usize) -> Result<Vec<Region>> {
    for (i, m) in sys.maps.iter().enumerate() {
        for seed in seeds {
            let img = m.apply_region(seed)?;
            if !seeds.iter().any(|s| s.contains(&img)) {
                return Err(Error::invalid(format!(
                    "seed region is not mapped into the seed set by map {i}"
                )));
            }
        }
    }
    let mut stage = seeds.to_vec();
    for _ in 0..k {
        stage = sys
            .maps
            .par_iter()
            .map(|m| stage.iter().map(|r| m.apply_region(r)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
    }
    Ok(stage)
}

/// Root `s` of `Σ r_i^s = 1` by bisection. A single map gives `s = 0`.
pub fn similarity_dimension(ratios: &[f64]) -> Result<f64> {
    if ratios.is_empty() {
        return Err(Error::invalid("similarity dimension needs at least one ratio"));
    }
    if let Some(r) = ratios.iter().find(|&&r| !(r > 0.0 && r < 1.0)) {
        return Err(Error::invalid(format!("ratio {r} not in (0,1)")));
    }
    let m = ratios.len() as f64;
    let rmin = ratios.iter().cloned().fold(1.0, f64::min);
    let rmax = ratios.iter().cloned().fold(0.0, f64::max);
    let moran = |s: f64| ratios.iter().map(|r| r.powf(s)).sum::<f64>() - 1.0;
    let mut lo = m.ln() / (1.0 / rmin).ln();
    let mut hi = m.ln() / (1.0 / rmax).ln();
    if moran(lo) <= 0.0 {
        return Ok(lo);
    }
    if moran(hi) >= 0.0 {
        return Ok(hi);
    }
    while hi - lo > 1e-15 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if moran(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Largest distance from a point of `a` to the nearest point of `b`.
pub fn one_sided_hausdorff(a: &[SpherePoint], b: &[SpherePoint]) -> f64 {
    a.par_iter()
        .map(|p| {
            let pc = p.coords().unwrap_or(&[]);
            b.iter()
                .filter_map(|q| q.coords().map(|qc| dist(pc, qc)))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max)
}

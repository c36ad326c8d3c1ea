//! Example families: radial Cantor shells, torus necklaces, and conformal
//! traps. Each factory emits a [`ContractiveSystem`] with validation data.

use std::f64::consts::{PI, TAU};

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{build_ball_exchange_involution, dist, Primitive, SpherePoint};
use crate::ifs::{
    refine_regions, similarity_dimension, Ball, Contraction, ContractiveSystem, Region, SolidTorus,
};
use crate::powermaps::{PowerMap, StretchParams};
use crate::semigroup::SemigroupSpec;
use crate::zorich::ZorichMap;

// ---------------------------------------------------------------------------
// Cantor shells

/// Largest `N` for which `2^N` fits the rational arithmetic used here.
pub const MAX_CANTOR_N: u32 = 60;

/// Radial IFS in `t = log₂|x|`:
/// `φ_k(t) = t/2^k + 1 − 2^{1−k}` for `k < N` and `φ̂_N(t) = t/2^N + 1 − 2^{−N}`.
#[derive(Debug, Clone)]
pub struct CantorShellSystem {
    n: u32,
    system: ContractiveSystem,
}

impl CantorShellSystem {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn system(&self) -> &ContractiveSystem {
        &self.system
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.system.ratios()
    }

    /// `(scale, offset)` of map `k` (1-based), exactly.
    pub fn map_rational(&self, k: u32) -> Result<(Ratio<i64>, Ratio<i64>)> {
        if k == 0 || k > self.n {
            return Err(Error::invalid(format!("map index {k} not in 1..={}", self.n)));
        }
        let scale = Ratio::new(1, 1i64 << k);
        let offset = if k < self.n {
            Ratio::from_integer(1) - Ratio::new(2, 1i64 << k)
        } else {
            Ratio::from_integer(1) - scale
        };
        Ok((scale, offset))
    }

    /// Fixed point `offset / (1 − scale)` of map `k`, exactly.
    pub fn fixed_point(&self, k: u32) -> Result<Ratio<i64>> {
        let (s, b) = self.map_rational(k)?;
        Ok(b / (Ratio::from_integer(1) - s))
    }

    /// Stretch data of `p_k = f_{2^k, 2^{2−2^k}}` (`k < N`) and
    /// `q_N = f_{2^N, 2^{1−2^N}}`: the maps whose inverse branches act
    /// radially as the system's members.
    pub fn generator_params(&self) -> Vec<StretchParams> {
        let ln2 = 2f64.ln();
        (1..=self.n)
            .map(|k| {
                let d = 1i64 << k;
                let exp = if k < self.n { 2 - d } else { 1 - d };
                StretchParams::new(d, exp as f64 * ln2).expect("d ≥ 2")
            })
            .collect()
    }

    /// The semigroup `⟨p_1, …, p_{N−1}, q_N⟩` for the given automorphic map.
    pub fn semigroup(&self, h: ZorichMap) -> Result<SemigroupSpec> {
        let maps = self
            .generator_params()
            .into_iter()
            .map(|p| PowerMap::new(p, h))
            .collect::<Result<Vec<_>>>()?;
        let mut labels: Vec<String> = (1..self.n).map(|k| format!("p{k}")).collect();
        labels.push(format!("q{}", self.n));
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        SemigroupSpec::power(maps)?.with_labels(&refs)
    }
}

pub fn cantor_shell_system(n: u32) -> Result<CantorShellSystem> {
    if n < 2 {
        return Err(Error::invalid(format!("Cantor shells need N ≥ 2, got {n}")));
    }
    if n > MAX_CANTOR_N {
        return Err(Error::invalid(format!("N = {n} exceeds {MAX_CANTOR_N}")));
    }
    let pairs: Vec<(f64, f64)> = (1..=n)
        .map(|k| {
            let s = 0.5f64.powi(k as i32);
            let b = if k < n { 1.0 - 2.0 * s } else { 1.0 - s };
            (s, b)
        })
        .collect();
    Ok(CantorShellSystem {
        n,
        system: ContractiveSystem::affine_1d(&pairs)?,
    })
}

/// `(n − 1) + s(N)`: sphere factor plus the radial Cantor dimension.
pub fn cantor_shell_dimension(big_n: u32, n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid(format!("ambient dimension must be ≥ 2, got {n}")));
    }
    let sys = cantor_shell_system(big_n)?;
    Ok((n - 1) as f64 + similarity_dimension(&sys.ratios())?)
}

// ---------------------------------------------------------------------------
// Linking numbers

/// A closed curve parameterized on `[0, 2π)`.
pub trait ClosedCurve: Sync {
    fn point(&self, t: f64) -> [f64; 3];
    fn tangent(&self, t: f64) -> [f64; 3];
}

impl ClosedCurve for SolidTorus {
    fn point(&self, t: f64) -> [f64; 3] {
        let p = self.core_point(t);
        [p[0], p[1], p[2]]
    }

    fn tangent(&self, t: f64) -> [f64; 3] {
        let p = self.core_tangent(t);
        [p[0], p[1], p[2]]
    }
}

/// Closed curve from a parameterization and its derivative.
pub struct ParamCurve<F, G> {
    pub point: F,
    pub tangent: G,
}

impl<F, G> ClosedCurve for ParamCurve<F, G>
where
    F: Fn(f64) -> [f64; 3] + Sync,
    G: Fn(f64) -> [f64; 3] + Sync,
{
    fn point(&self, t: f64) -> [f64; 3] {
        (self.point)(t)
    }

    fn tangent(&self, t: f64) -> [f64; 3] {
        (self.tangent)(t)
    }
}

pub const DEFAULT_LINKING_RESOLUTION: usize = 512;

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Gauss linking integral `(1/4π)∮∮ (c₁′ × c₂′)·(c₁ − c₂)/|c₁ − c₂|³` by the
/// `n × n` periodic trapezoid rule.
pub fn linking_number(c1: &dyn ClosedCurve, c2: &dyn ClosedCurve, n: usize) -> Result<f64> {
    if n < 8 {
        return Err(Error::invalid("linking quadrature needs at least 8 nodes"));
    }
    let h = TAU / n as f64;
    let s: Vec<([f64; 3], [f64; 3])> = (0..n)
        .map(|i| (c2.point(i as f64 * h), c2.tangent(i as f64 * h)))
        .collect();
    let rows: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let t = i as f64 * h;
            let (p, dp) = (c1.point(t), c1.tangent(t));
            let mut acc = 0.0;
            let mut closest = f64::INFINITY;
            for (q, dq) in &s {
                let r = [p[0] - q[0], p[1] - q[1], p[2] - q[2]];
                let d2 = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
                let d = d2.sqrt();
                closest = closest.min(d);
                let c = cross(dp, *dq);
                acc += (c[0] * r[0] + c[1] * r[1] + c[2] * r[2]) / (d2 * d);
            }
            (acc, closest)
        })
        .collect();
    let closest = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    if closest < 1e-9 {
        return Err(Error::invalid("curves intersect"));
    }
    Ok(rows.iter().map(|r| r.0).sum::<f64>() * h * h / (4.0 * PI))
}

// ---------------------------------------------------------------------------
// Necklaces

/// Parent solid torus, `m` children, and the similarities onto them.
#[derive(Debug, Clone)]
pub struct TorusChain {
    pub m: usize,
    pub parent: SolidTorus,
    pub children: Vec<SolidTorus>,
    pub system: ContractiveSystem,
    pub report: NecklaceReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct NecklaceReport {
    /// Smallest sampled surface distance between two children.
    pub min_gap: f64,
    pub disjoint: bool,
    /// Smallest sampled slack of a child inside the parent.
    pub containment_slack: f64,
    pub contained: bool,
    /// Worst `||lk| − 1|` over consecutive pairs.
    pub consecutive_defect: f64,
    /// Worst `|lk|` over non-consecutive pairs.
    pub nonconsecutive_max: f64,
    pub linking_ok: bool,
}

impl NecklaceReport {
    pub fn passed(&self) -> bool {
        self.disjoint && self.contained && self.linking_ok
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.disjoint {
            out.push("disjointness");
        }
        if !self.contained {
            out.push("containment");
        }
        if !self.linking_ok {
            out.push("linking");
        }
        out
    }
}

const SURFACE_SAMPLES: usize = 1024;
const GAP_TOL: f64 = 1e-3;
const LINK_TOL: f64 = 1e-2;

/// Sampled minimum distance between two core circles.
fn core_distance(a: &SolidTorus, b: &SolidTorus, samples: usize) -> f64 {
    a.core_samples(samples)
        .iter()
        .map(|p| b.distance_to_core(p))
        .fold(f64::INFINITY, f64::min)
}

fn containment_slack(parent: &SolidTorus, child: &SolidTorus, samples: usize) -> f64 {
    child
        .core_samples(samples)
        .iter()
        .map(|p| parent.tube_radius - parent.distance_to_core(p) - child.tube_radius)
        .fold(f64::INFINITY, f64::min)
}

fn is_consecutive(i: usize, j: usize, m: usize) -> bool {
    let k = (i + m - j) % m;
    k == 1 || k == m - 1
}

fn balls_overlap(a: &SolidTorus, b: &SolidTorus) -> bool {
    dist(&a.center, &b.center) <= a.core_radius + a.tube_radius + b.core_radius + b.tube_radius
}

/// Disjointness, containment, and linking pattern of a chain's children.
pub fn validate_necklace(parent: &SolidTorus, children: &[SolidTorus]) -> NecklaceReport {
    let m = children.len();
    let pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
        .collect();
    let results: Vec<(f64, Option<f64>)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (a, b) = (&children[i], &children[j]);
            let gap = core_distance(a, b, SURFACE_SAMPLES) - a.tube_radius - b.tube_radius;
            // Curves in disjoint balls are unlinked.
            let lk = if !balls_overlap(a, b) {
                Some(0.0)
            } else {
                linking_number(a, b, DEFAULT_LINKING_RESOLUTION).ok()
            };
            (gap, lk)
        })
        .collect();
    let min_gap = results.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let mut consecutive_defect: f64 = 0.0;
    let mut nonconsecutive_max: f64 = 0.0;
    for (&(i, j), (_, lk)) in pairs.iter().zip(&results) {
        let lk = lk.unwrap_or(f64::NAN);
        if is_consecutive(i, j, m) {
            consecutive_defect = consecutive_defect.max((lk.abs() - 1.0).abs());
        } else {
            nonconsecutive_max = nonconsecutive_max.max(lk.abs());
        }
        if lk.is_nan() {
            consecutive_defect = f64::INFINITY;
        }
    }
    let slack = children
        .par_iter()
        .map(|c| containment_slack(parent, c, SURFACE_SAMPLES))
        .reduce(|| f64::INFINITY, f64::min);
    NecklaceReport {
        min_gap,
        disjoint: min_gap > GAP_TOL,
        containment_slack: slack,
        contained: slack > 0.0,
        consecutive_defect,
        nonconsecutive_max,
        linking_ok: consecutive_defect < LINK_TOL && nonconsecutive_max < LINK_TOL,
    }
}

fn even_square_root(m: usize) -> Option<usize> {
    let d = (m as f64).sqrt().round() as usize;
    (m >= 4 && d * d == m && d.is_multiple_of(2)).then_some(d)
}

fn unit(v: [f64; 3]) -> Vec<f64> {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    v.iter().map(|x| x / n).collect()
}

/// Child `j` of `m`: core circle centered at angle `2πj/m` on the circle of
/// radius `placement`, lying in the horizontal plane for even `j` and in the
/// tangent–vertical plane for odd `j`.
fn child_torus(j: usize, m: usize, placement: f64, ring: f64, aspect: f64) -> SolidTorus {
    let th = TAU * j as f64 / m as f64;
    let (s, c) = th.sin_cos();
    let radial = unit([c, s, 0.0]);
    let tangent = unit([-s, c, 0.0]);
    let (e1, e2) = if j.is_multiple_of(2) {
        (radial, tangent)
    } else {
        (tangent, vec![0.0, 0.0, 1.0])
    };
    SolidTorus {
        center: vec![placement * c, placement * s, 0.0],
        e1,
        e2,
        core_radius: ring,
        tube_radius: aspect * ring,
    }
}

/// Similarity sending `parent` onto `child`; needs equal aspect ratios.
fn similarity_onto(parent: &SolidTorus, child: &SolidTorus) -> Result<Contraction> {
    let pa = parent.tube_radius / parent.core_radius;
    let ca = child.tube_radius / child.core_radius;
    if (pa - ca).abs() > 1e-9 * pa {
        return Err(Error::invalid(format!(
            "child aspect {ca} differs from parent aspect {pa}; no similarity exists"
        )));
    }
    let scale = child.core_radius / parent.core_radius;
    let pn = cross3(&parent.e1, &parent.e2);
    let cn = cross3(&child.e1, &child.e2);
    // O = C·Pᵀ with frame columns (e1, e2, n).
    let pf = [&parent.e1, &parent.e2, &pn];
    let cf = [&child.e1, &child.e2, &cn];
    let mut orth = vec![0.0; 9];
    for r in 0..3 {
        for col in 0..3 {
            orth[r * 3 + col] = (0..3).map(|k| cf[k][r] * pf[k][col]).sum();
        }
    }
    let rotated: Vec<f64> = (0..3)
        .map(|r| (0..3).map(|k| orth[r * 3 + k] * parent.center[k]).sum::<f64>())
        .collect();
    let translation = (0..3)
        .map(|i| child.center[i] - scale * rotated[i])
        .collect();
    Contraction::similarity(scale, orth, translation)
}

fn cross3(a: &[f64], b: &[f64]) -> Vec<f64> {
    cross([a[0], a[1], a[2]], [b[0], b[1], b[2]]).to_vec()
}

impl TorusChain {
    /// Assembles a chain from explicit children and validates it.
    pub fn from_children(parent: SolidTorus, children: Vec<SolidTorus>) -> Result<Self> {
        if children.is_empty() {
            return Err(Error::invalid("a chain needs children"));
        }
        let maps = children
            .iter()
            .map(|c| similarity_onto(&parent, c))
            .collect::<Result<Vec<_>>>()?;
        let report = validate_necklace(&parent, &children);
        Ok(TorusChain {
            m: children.len(),
            parent,
            children,
            system: ContractiveSystem::new(maps)?,
            report,
        })
    }

    pub fn ratio(&self) -> f64 {
        self.system.max_ratio()
    }

    /// Stage-`k` tori `φ_{i₁}∘…∘φ_{i_k}(X₀)`.
    pub fn stage(&self, k: usize) -> Result<Vec<Region>> {
        refine_regions(&self.system, &[Region::Torus(self.parent.clone())], k)
    }
}

/// Clearance of a candidate placement, from the pairs that matter under the
/// rotational symmetry by `4π/m`; `None` when consecutive rings do not link.
fn placement_score(m: usize, parent: &SolidTorus, placement: f64, ring: f64, aspect: f64) -> Option<f64> {
    let kids: Vec<SolidTorus> = (0..4.min(m))
        .map(|j| child_torus(j, m, placement, ring, aspect))
        .collect();
    for (a, b) in [(0, 1), (1, 2)] {
        let lk = linking_number(&kids[a], &kids[b], 64).ok()?;
        if (lk.abs() - 1.0).abs() > 0.1 {
            return None;
        }
    }
    let tau = aspect * ring;
    let mut score = containment_slack(parent, &kids[0], 256).min(containment_slack(parent, &kids[1], 256));
    for (a, b) in [(0, 1), (1, 2), (0, 2), (1, 3)] {
        if b < kids.len() {
            score = score.min(core_distance(&kids[a], &kids[b], 256) - 2.0 * tau);
        }
    }
    Some(score)
}

/// Places `m` children by a deterministic grid search over placement radius
/// and ring radius, maximizing clearance. The chain is returned even when
/// it fails validation; see [`build_necklace`].
pub fn place_necklace(m: usize, parent_r: f64, parent_rho: f64) -> Result<TorusChain> {
    if even_square_root(m).is_none() {
        return Err(Error::invalid("m must be an even perfect square"));
    }
    if !(parent_r > 0.0 && parent_rho > 0.0 && parent_rho < parent_r) {
        return Err(Error::invalid("parent torus needs 0 < rho < R"));
    }
    let aspect = parent_rho / parent_r;
    let unit_parent = SolidTorus {
        center: vec![0.0; 3],
        e1: vec![1.0, 0.0, 0.0],
        e2: vec![0.0, 1.0, 0.0],
        core_radius: 1.0,
        tube_radius: aspect,
    };
    let half_spacing = (PI / m as f64).sin();
    let candidates: Vec<(f64, f64)> = (0..=40)
        .flat_map(|i| {
            let placement = 1.0 - aspect + aspect * i as f64 / 20.0;
            (0..=100).map(move |k| (placement, half_spacing * (1.0 + k as f64 / 50.0)))
        })
        .collect();
    let scores: Vec<Option<f64>> = candidates
        .par_iter()
        .map(|&(p, r)| placement_score(m, &unit_parent, p, r, aspect))
        .collect();
    let mut best: Option<(f64, f64, f64)> = None;
    for (&(p, r), s) in candidates.iter().zip(&scores) {
        if let Some(s) = *s {
            if best.is_none_or(|b| s > b.0) {
                best = Some((s, p, r));
            }
        }
    }
    // Without any linked candidate fall back to the nominal ring radius.
    let (_, placement, ring) = best.unwrap_or((f64::NEG_INFINITY, 1.0, 1.1 * half_spacing));
    let scale = |t: SolidTorus| SolidTorus {
        center: t.center.iter().map(|c| c * parent_r).collect(),
        core_radius: t.core_radius * parent_r,
        tube_radius: t.tube_radius * parent_r,
        ..t
    };
    let children = (0..m)
        .map(|j| scale(child_torus(j, m, placement, ring, aspect)))
        .collect();
    TorusChain::from_children(scale(unit_parent), children)
}

/// A validated necklace chain; fails with the violated predicates otherwise.
pub fn build_necklace(m: usize, parent_r: f64, parent_rho: f64) -> Result<TorusChain> {
    let chain = place_necklace(m, parent_r, parent_rho)?;
    if !chain.report.passed() {
        return Err(Error::ConstructionFailed(format!(
            "necklace m = {m}, R = {parent_r}, rho = {parent_rho} fails {}: min gap {:.3e}, containment slack {:.3e}, consecutive |lk| defect {:.3e}, non-consecutive max |lk| {:.3e}",
            chain.report.failures().join(", "),
            chain.report.min_gap,
            chain.report.containment_slack,
            chain.report.consecutive_defect,
            chain.report.nonconsecutive_max,
        )));
    }
    Ok(chain)
}

// ---------------------------------------------------------------------------
// Conformal traps

/// Trap ball `B(x₀, b)`, target balls `B(x_i, b)`, and the Möbius IFS
/// `{φ_i⁻¹ = τ_i⁻¹∘Φ}` with `Φ` the inversion in `∂B(x₀, b)`.
#[derive(Debug, Clone)]
pub struct TrapSystem {
    pub x0: Vec<f64>,
    pub centers: Vec<Vec<f64>>,
    pub a: f64,
    pub b: f64,
    pub system: ContractiveSystem,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrapReport {
    pub points: usize,
    pub outside_targets: usize,
    pub inside_trap: usize,
}

impl TrapReport {
    pub fn passed(&self) -> bool {
        self.outside_targets == 0 && self.inside_trap == 0
    }
}

pub fn build_trap(d: usize, x0: &SpherePoint, xi: &[SpherePoint], a: f64, b: f64) -> Result<TrapSystem> {
    if d < 2 || xi.len() != d {
        return Err(Error::invalid(format!(
            "trap needs d ≥ 2 and exactly d centers, got d = {d} with {} centers",
            xi.len()
        )));
    }
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::invalid("radii a and b must be positive"));
    }
    if 2.0 * b >= a {
        return Err(Error::invalid(format!("need 2b < a, got a = {a}, b = {b}")));
    }
    let finite = |p: &SpherePoint| {
        p.coords()
            .map(<[f64]>::to_vec)
            .ok_or_else(|| Error::invalid("trap centers must be finite"))
    };
    let x0v = finite(x0)?;
    let centers = xi.iter().map(finite).collect::<Result<Vec<_>>>()?;
    if centers.iter().any(|c| c.len() != x0v.len()) {
        return Err(Error::invalid("trap centers have mixed dimensions"));
    }
    let all: Vec<&Vec<f64>> = std::iter::once(&x0v).chain(centers.iter()).collect();
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            if dist(all[i], all[j]) <= 2.0 * a {
                return Err(Error::invalid(format!(
                    "balls B(x_{i}, a) and B(x_{j}, a) overlap"
                )));
            }
        }
    }
    let phi = build_ball_exchange_involution(x0, b)?;
    let witness = centers
        .iter()
        .map(|c| Ball::new(c.clone(), b))
        .collect::<Result<Vec<_>>>()?;
    let maps = centers
        .iter()
        .map(|c| {
            let shift = c.iter().zip(&x0v).map(|(ci, oi)| ci - oi).collect();
            let map = phi.clone().then_primitive(Primitive::translation(shift));
            Contraction::mobius(map, witness.clone())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrapSystem {
        x0: x0v,
        centers,
        a,
        b,
        system: ContractiveSystem::new(maps)?,
    })
}

impl TrapSystem {
    pub fn target_balls(&self) -> Vec<Region> {
        self.centers
            .iter()
            .map(|c| Region::Ball(Ball { center: c.clone(), radius: self.b }))
            .collect()
    }

    /// Stage-`k` components: images of the complement of the trap ball,
    /// i.e. `d^k` balls (stage 1 is the target balls themselves).
    pub fn stage(&self, k: usize) -> Result<Vec<Region>> {
        if k == 0 {
            return Err(Error::invalid("trap stages start at k = 1"));
        }
        refine_regions(&self.system, &self.target_balls(), k - 1)
    }

    /// Every point lies in some target ball and none in the trap ball.
    pub fn check_sample(&self, points: &[SpherePoint]) -> TrapReport {
        let tol = 1e-12 * self.b;
        let mut report = TrapReport {
            points: points.len(),
            outside_targets: 0,
            inside_trap: 0,
        };
        for p in points {
            let Some(x) = p.coords() else {
                report.outside_targets += 1;
                continue;
            };
            if !self.centers.iter().any(|c| dist(x, c) <= self.b + tol) {
                report.outside_targets += 1;
            }
            if dist(x, &self.x0) < self.b {
                report.inside_trap += 1;
            }
        }
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::chaos_game;
    use crate::powermaps::log_julia_radius;

    #[test]
    fn cantor_shell_examples() {
        let s2 = cantor_shell_system(2).unwrap();
        assert_eq!(s2.ratios(), vec![0.5, 0.25]);
        assert_eq!(s2.fixed_point(1).unwrap(), Ratio::from_integer(0));
        assert_eq!(s2.fixed_point(2).unwrap(), Ratio::from_integer(1));
        let s5 = cantor_shell_system(5).unwrap();
        assert_eq!(s5.fixed_point(5).unwrap(), Ratio::from_integer(1));
        assert_eq!(s5.fixed_point(3).unwrap(), Ratio::new(6, 7));
        assert!(cantor_shell_system(1).is_err());
        assert!(s5.fixed_point(6).is_err());
    }

    #[test]
    fn cantor_generators_match_fixed_points() {
        let sys = cantor_shell_system(8).unwrap();
        for (k, p) in (1..=8).zip(sys.generator_params()) {
            let c = sys.fixed_point(k).unwrap();
            let want = *c.numer() as f64 / *c.denom() as f64;
            let got = log_julia_radius(&p).unwrap() / 2f64.ln();
            assert!((got - want).abs() < 1e-12, "k = {k}: {got} vs {want}");
        }
    }

    #[test]
    fn cantor_maps_keep_unit_interval() {
        let sys = cantor_shell_system(6).unwrap();
        for m in sys.system().maps() {
            for t in [0.0, 1.0] {
                let y = m.apply(&[t])[0];
                assert!((0.0..=1.0).contains(&y));
            }
        }
    }

    #[test]
    fn cantor_dimension_examples() {
        let golden = ((1.0 + 5f64.sqrt()) / 2.0).log2();
        assert!((cantor_shell_dimension(2, 3).unwrap() - 2.0 - golden).abs() < 1e-12);
        assert!(cantor_shell_dimension(2, 1).is_err());
    }

    #[test]
    fn hopf_pair_and_unlink() {
        let a = SolidTorus {
            center: vec![0.0; 3],
            e1: vec![1.0, 0.0, 0.0],
            e2: vec![0.0, 1.0, 0.0],
            core_radius: 1.0,
            tube_radius: 0.1,
        };
        let b = SolidTorus {
            center: vec![1.0, 0.0, 0.0],
            e1: vec![1.0, 0.0, 0.0],
            e2: vec![0.0, 0.0, 1.0],
            ..a.clone()
        };
        let lk = linking_number(&a, &b, 512).unwrap();
        assert!((lk.abs() - 1.0).abs() < 1e-6, "{lk}");
        let far = SolidTorus {
            center: vec![10.0, 0.0, 0.0],
            ..a.clone()
        };
        assert!(linking_number(&a, &far, 512).unwrap().abs() < 1e-9);
        let touching = SolidTorus {
            center: vec![2.0, 0.0, 0.0],
            ..a.clone()
        };
        assert!(linking_number(&a, &touching, 512).is_err());
    }

    #[test]
    fn necklace_rejects_bad_m() {
        for m in [6, 9, 2, 0] {
            let err = place_necklace(m, 1.0, 0.2).unwrap_err();
            assert_eq!(err, Error::invalid("m must be an even perfect square"));
        }
    }

    #[test]
    fn necklace_36_validates() {
        let chain = build_necklace(36, 1.0, 0.2).unwrap();
        assert!(chain.report.passed());
        assert_eq!(chain.stage(1).unwrap().len(), 36);
    }

    #[test]
    fn necklace_engineered_failures() {
        let chain = place_necklace(36, 1.0, 0.2).unwrap();
        let shrunk: Vec<SolidTorus> = chain
            .children
            .iter()
            .map(|c| SolidTorus {
                core_radius: c.core_radius / 10.0,
                tube_radius: c.tube_radius / 10.0,
                ..c.clone()
            })
            .collect();
        let r = TorusChain::from_children(chain.parent.clone(), shrunk).unwrap().report;
        assert!(!r.linking_ok);
        let mut moved = chain.children.clone();
        moved[5].center = moved[4].center.clone();
        let r = validate_necklace(&chain.parent, &moved);
        assert!(!r.disjoint);
    }

    fn example_trap(b: f64) -> Result<TrapSystem> {
        build_trap(
            2,
            &SpherePoint::origin(3),
            &[
                SpherePoint::on_axis(3, 0, 4.0),
                SpherePoint::on_axis(3, 0, -4.0),
            ],
            1.0,
            b,
        )
    }

    #[test]
    fn trap_example() {
        let trap = example_trap(0.4).unwrap();
        for k in 1..=5 {
            assert_eq!(trap.stage(k).unwrap().len(), 1 << k);
        }
        let sample = chaos_game(&trap.system, 2000, 64, 3).unwrap();
        assert!(trap.check_sample(&sample.points).passed());
        assert!(matches!(example_trap(0.6), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn trap_rejects_overlap() {
        let r = build_trap(
            2,
            &SpherePoint::origin(2),
            &[SpherePoint::on_axis(2, 0, 1.5), SpherePoint::on_axis(2, 0, -4.0)],
            1.0,
            0.4,
        );
        assert!(matches!(r, Err(Error::InvalidParameter(_))));
    }
}

//! Self-contained acceptance checks shared by `qrsg verify` and the
//! `acceptance` test target. Every check is seeded and deterministic.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::constructions::{build_necklace, build_trap, cantor_shell_system, place_necklace};
use crate::error::{Error, Result};
use crate::geometry::{dist, SpherePoint};
use crate::ifs::{chaos_game, similarity_dimension, Region};
use crate::perfectness::{dilatation_sequence, holder_constant_estimate, matrix_dilatation, uniform_perfectness_estimate};
use crate::powermaps::{julia_radius, log_julia_radius, PowerMap};
use crate::semigroup::{backward_orbit, classify_points, word_log_julia_radii, SemigroupSpec, Verdict};
use crate::zorich::ZorichMap;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2}. {} ({:.2}s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.seconds,
            self.detail
        )
    }
}

pub struct Criterion {
    pub id: u32,
    pub title: &'static str,
    run: fn() -> Result<(bool, String)>,
}

impl Criterion {
    pub fn run(&self) -> CriterionOutcome {
        let start = Instant::now();
        let (passed, detail) = match (self.run)() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        CriterionOutcome {
            id: self.id,
            title: self.title,
            passed,
            detail,
            seconds: start.elapsed().as_secs_f64(),
        }
    }
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { id: 1, title: "radial law", run: radial_law },
        Criterion { id: 2, title: "planar oracle", run: planar_oracle },
        Criterion { id: 3, title: "branch independence", run: branch_independence },
        Criterion { id: 4, title: "Julia sphere by escape bisection", run: julia_sphere },
        Criterion { id: 5, title: "ring example a = 4", run: ring_example },
        Criterion { id: 6, title: "ring Julia set is the closure of word spheres", run: ring_closure },
        Criterion { id: 7, title: "Moran solver", run: moran },
        Criterion { id: 8, title: "Cantor-shell consistency", run: cantor_shells },
        Criterion { id: 9, title: "necklace m = 16", run: necklace },
        Criterion { id: 10, title: "conformal trap", run: trap },
        Criterion { id: 11, title: "perfectness detector contrast", run: perfectness_contrast },
        Criterion { id: 12, title: "dilatation divergence", run: dilatation },
        Criterion { id: 13, title: "preimage degree", run: preimage_degree },
        Criterion { id: 14, title: "Hölder estimator", run: holder },
    ]
}

pub fn run_all() -> Vec<CriterionOutcome> {
    criteria().iter().map(Criterion::run).collect()
}

const PAIRS: [(i64, f64); 6] = [(2, 0.25), (2, 1.0), (2, 4.0), (3, 0.25), (3, 1.0), (3, 4.0)];

fn random_point(rng: &mut ChaCha8Rng, dim: usize, rmin: f64, rmax: f64) -> Vec<f64> {
    let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
    let n = v.iter().map(|a: &f64| a * a).sum::<f64>().sqrt();
    let r = rng.random_range(rmin..=rmax);
    v.into_iter().map(|a| a * r / n).collect()
}

fn log_uniform_point(rng: &mut ChaCha8Rng, dim: usize, rmin: f64, rmax: f64) -> Vec<f64> {
    let p = random_point(rng, dim, 1.0, 1.0);
    let r = rng.random_range(rmin.ln()..=rmax.ln()).exp();
    p.into_iter().map(|a| a * r).collect()
}

fn radial_law() -> Result<(bool, String)> {
    let start = Instant::now();
    let h = ZorichMap::spatial();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    let n = 10_000;
    for i in 0..n {
        let (d, lambda) = PAIRS[i % PAIRS.len()];
        let f = PowerMap::with_lambda(d, lambda, h)?;
        let y = random_point(&mut rng, 3, 0.1, 10.0);
        let r = dist(&y, &[0.0; 3]);
        let got = f.eval(&SpherePoint::Finite(y)).norm();
        let want = lambda * r.powi(d as i32);
        worst = worst.max((got - want).abs() / want);
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((
        worst < 1e-9 && secs < 5.0,
        format!("{n} points, max relative error {worst:.2e} (time limit 5s)"),
    ))
}

fn planar_oracle() -> Result<(bool, String)> {
    let h = ZorichMap::planar();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for &(d, lambda) in &PAIRS {
        let f = PowerMap::with_lambda(d, lambda, h)?;
        for _ in 0..1000 {
            let z = random_point(&mut rng, 2, 0.1, 10.0);
            let (mut re, mut im) = (1.0, 0.0);
            for _ in 0..d {
                (re, im) = (re * z[0] - im * z[1], re * z[1] + im * z[0]);
            }
            let got = f.eval_coords(&z);
            worst = worst.max(dist(&got, &[lambda * re, lambda * im]));
        }
    }
    Ok((
        worst < 1e-9,
        format!("6×1000 points with |z| in [0.1, 10], sup |f(z) − λz^d| = {worst:.2e}"),
    ))
}

fn branch_independence() -> Result<(bool, String)> {
    let h = ZorichMap::spatial();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for &(d, lambda) in &PAIRS {
        let f = PowerMap::with_lambda(d, lambda, h)?;
        for _ in 0..1000 {
            let y = random_point(&mut rng, 3, 0.1, 10.0);
            worst = worst.max(f.branch_independence_defect(&SpherePoint::Finite(y))?);
        }
    }
    Ok((worst < 1e-9, format!("6×1000 points, max defect {worst:.2e}")))
}

/// Whether the orbit of a point at radius `r` escapes under iteration.
fn escapes(f: &PowerMap, r: f64, rj: f64) -> bool {
    let mut x = SpherePoint::Finite(vec![0.36 * r, -0.48 * r, 0.8 * r]);
    for _ in 0..400 {
        x = f.eval(&x);
        let n = x.norm();
        if n > 1e6 * rj {
            return true;
        }
        if n < 1e-6 * rj {
            return false;
        }
    }
    false
}

fn julia_sphere() -> Result<(bool, String)> {
    let h = ZorichMap::spatial();
    let mut worst: f64 = 0.0;
    let mut closed: f64 = 0.0;
    for d in [2, 3, 4] {
        for lambda in [0.25, 1.0, 4.0] {
            let f = PowerMap::with_lambda(d, lambda, h)?;
            let want = lambda.powf(1.0 / (1.0 - d as f64));
            let (mut lo, mut hi) = (want.ln() - 2.0, want.ln() + 2.0);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if escapes(&f, mid.exp(), want) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let found = (0.5 * (lo + hi)).exp();
            worst = worst.max((found - want).abs() / want);
            closed = closed.max((julia_radius(f.params())? - found).abs() / want);
        }
    }
    Ok((
        worst < 1e-6 && closed < 1e-6,
        format!("9 pairs, bisection vs λ^(1/(1−d)) {worst:.2e}, closed form vs bisection {closed:.2e}"),
    ))
}

fn ring(a: f64) -> Result<SemigroupSpec> {
    let h = ZorichMap::spatial();
    SemigroupSpec::power(vec![
        PowerMap::with_lambda(2, 1.0, h)?,
        PowerMap::with_lambda(2, 1.0 / a, h)?,
    ])?
    .with_labels(&["f", "g"])
}

fn ring_example() -> Result<(bool, String)> {
    let spec = ring(4.0)?;
    let log4 = 4f64.ln();
    let logs = word_log_julia_radii(&spec, 12)?;
    let in_range = logs.iter().all(|&l| l >= -1e-12 && l <= log4 * (1.0 + 1e-12));
    let max_gap = logs.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let gap_bound = 2.0 * log4 / 4095.0;

    let base = SpherePoint::Finite(vec![0.0, 2.4, 3.2]);
    let orbit = backward_orbit(&spec, &base, 6, 1 << 20)?;
    let grid = 64.0;
    let mut lattice_err: f64 = 0.0;
    let mut depth6 = std::collections::BTreeSet::new();
    for p in &orbit {
        let t = p.point.norm().ln() / log4 * grid;
        let j = t.round();
        lattice_err = lattice_err.max((p.point.norm().ln() - j / grid * log4).abs());
        if p.word.len() == 6 {
            depth6.insert(j as i64);
        }
    }
    let depth6_ok = depth6.iter().copied().eq(1..=64);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let inner: Vec<SpherePoint> = (0..1000)
        .map(|_| SpherePoint::Finite(log_uniform_point(&mut rng, 3, 1e-3, 0.99)))
        .collect();
    let outer: Vec<SpherePoint> = (0..1000)
        .map(|_| SpherePoint::Finite(log_uniform_point(&mut rng, 3, 4.01, 1e3)))
        .collect();
    let attracted = classify_points(&spec, &inner, 16, 5)?
        .iter()
        .filter(|r| r.verdict == Verdict::Attracted)
        .count();
    let escaping = classify_points(&spec, &outer, 16, 6)?
        .iter()
        .filter(|r| r.verdict == Verdict::Escaping)
        .count();

    let passed = in_range
        && max_gap <= gap_bound
        && lattice_err < 1e-12
        && depth6_ok
        && attracted == 1000
        && escaping == 1000;
    Ok((
        passed,
        format!(
            "{} word radii in [1,4]: {in_range}; max log-gap {max_gap:.3e} ≤ {gap_bound:.3e}; {} orbit points, max log distance to 4^(j/64) {lattice_err:.1e}, depth-6 j = 1..64: {depth6_ok}; attracted {attracted}/1000, escaping {escaping}/1000",
            logs.len(),
            orbit.len()
        ),
    ))
}

fn ring_closure() -> Result<(bool, String)> {
    let spec = ring(4.0)?;
    let log4 = 4f64.ln();
    let logs = word_log_julia_radii(&spec, 12)?;
    let outside = logs
        .iter()
        .map(|&l| (-l).max(l - log4).max(0.0))
        .fold(0.0, f64::max);
    let mut cover = (logs[0] - 0.0).max(log4 - logs[logs.len() - 1]);
    for w in logs.windows(2) {
        cover = cover.max(0.5 * (w[1] - w[0]));
    }
    let hd = cover.max(outside);
    let bound = log4 / 1024.0;
    Ok((hd < bound, format!("Hausdorff distance {hd:.3e} < {bound:.3e}")))
}

fn moran() -> Result<(bool, String)> {
    let golden = ((1.0 + 5f64.sqrt()) / 2.0).log2();
    let a = (similarity_dimension(&[0.5, 0.25])? - golden).abs();
    let b = (similarity_dimension(&[1.0 / 3.0, 1.0 / 3.0])? - 2f64.ln() / 3f64.ln()).abs();
    let c = (similarity_dimension(&[0.5, 0.5])? - 1.0).abs();
    Ok((
        a < 1e-9 && b < 1e-9 && c < 1e-12,
        format!("errors {a:.1e}, {b:.1e}, {c:.1e}"),
    ))
}

fn cantor_shells() -> Result<(bool, String)> {
    let sys = cantor_shell_system(11)?;
    let mut exact = true;
    let mut log_err: f64 = 0.0;
    for (k, p) in (1..=10u32).zip(sys.generator_params()) {
        let c = sys.fixed_point(k)?;
        let pk = 1i64 << k;
        exact &= c == Ratio::new(pk - 2, pk - 1);
        let cf = *c.numer() as f64 / *c.denom() as f64;
        log_err = log_err.max((log_julia_radius(&p)? / 2f64.ln() - cf).abs());
    }
    let s: Vec<f64> = (2..=20)
        .map(|n| similarity_dimension(&cantor_shell_system(n)?.ratios()))
        .collect::<Result<_>>()?;
    let increasing = s.windows(2).all(|w| w[1] > w[0]);
    let s20 = s[s.len() - 1];
    Ok((
        exact && log_err < 1e-12 && increasing && s20 > 0.999,
        format!("exact c_k for k ≤ 10: {exact}; |log₂ r_J − c_k| ≤ {log_err:.1e}; s(N) increasing: {increasing}; s(20) = {s20:.9}"),
    ))
}

fn necklace() -> Result<(bool, String)> {
    let chain = place_necklace(16, 1.0, 0.35)?;
    let r = &chain.report;
    let built = build_necklace(16, 1.0, 0.35);
    let stages: Vec<String> = (1..=3)
        .map(|k| match chain.stage(k) {
            Ok(s) => format!("{}", s.len()),
            Err(e) => format!("error ({})", e.kind()),
        })
        .collect();
    let counts_ok = (1..=3).all(|k| chain.stage(k).map(|s| s.len()) == Ok(16usize.pow(k as u32)));
    let rejects = [6, 9]
        .iter()
        .all(|&m| matches!(place_necklace(m, 1.0, 0.35), Err(Error::InvalidParameter(_))));
    let reference = match build_necklace(36, 1.0, 0.2) {
        Ok(c) => format!("passes (min gap {:.4})", c.report.min_gap),
        Err(e) => format!("fails ({e})"),
    };
    Ok((
        built.is_ok() && r.passed() && counts_ok && rejects,
        format!(
            "min gap {:.4}, containment slack {:.4}, consecutive |lk| defect {:.1e}, non-consecutive max |lk| {:.1e}; stage counts {}; m = 6, 9 rejected: {rejects}; reference chain m = 36, rho = 0.2 {reference}",
            r.min_gap,
            r.containment_slack,
            r.consecutive_defect,
            r.nonconsecutive_max,
            stages.join("/")
        ),
    ))
}

fn trap() -> Result<(bool, String)> {
    let x0 = SpherePoint::origin(3);
    let xi = [
        SpherePoint::on_axis(3, 0, 4.0),
        SpherePoint::on_axis(3, 0, -4.0),
    ];
    let t = build_trap(2, &x0, &xi, 1.0, 0.4)?;
    let mut counts_ok = true;
    let mut diams = Vec::new();
    for k in 1..=8 {
        let stage = t.stage(k)?;
        counts_ok &= stage.len() == 1 << k;
        diams.push(stage.iter().map(Region::diameter).fold(0.0, f64::max));
    }
    let ratio = t.system.max_ratio();
    let decay = diams.windows(2).all(|w| w[1] <= ratio * w[0] * (1.0 + 1e-9));
    let sample = chaos_game(&t.system, 10_000, 64, 10)?;
    let check = t.check_sample(&sample.points);
    let rejected = matches!(build_trap(2, &x0, &xi, 1.0, 0.6), Err(Error::InvalidParameter(_)));
    Ok((
        counts_ok && decay && check.passed() && rejected,
        format!(
            "stage counts 2^k for k ≤ 8: {counts_ok}; diameters decay by ≤ {ratio:.4} per stage: {decay} (stage 8: {:.2e}); {} chaos points, {} outside targets, {} inside trap; b = 0.6 rejected: {rejected}",
            diams[7], check.points, check.outside_targets, check.inside_trap
        ),
    ))
}

fn on_line(xs: &[f64]) -> Vec<SpherePoint> {
    xs.iter().map(|&x| SpherePoint::Finite(vec![x, 0.0, 0.0])).collect()
}

fn perfectness_contrast() -> Result<(bool, String)> {
    let mut geo: Vec<f64> = (0..=6).map(|k| 4f64.powi(-k)).collect();
    geo.push(0.0);
    let mut dbl: Vec<f64> = (0..=5).map(|k| 2f64.powf(-(2f64.powi(k)))).collect();
    dbl.push(0.0);
    let g = uniform_perfectness_estimate(&on_line(&geo))?;
    let d = uniform_perfectness_estimate(&on_line(&dbl))?;
    let bound = 4f64.ln() + 0.1;
    let witness = g
        .witness
        .as_ref()
        .map(|w| format!(" (center {}, radii {:.4e}..{:.4e})", geo[w.center_index], w.inner, w.outer))
        .unwrap_or_default();
    Ok((
        g.alpha_hat <= bound && d.alpha_hat > 10.0,
        format!(
            "geometric set max modulus {:.4}{witness} vs bound {bound:.4}; doubly exponential max modulus {:.4} > 10",
            g.alpha_hat, d.alpha_hat
        ),
    ))
}

fn dilatation() -> Result<(bool, String)> {
    let m = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0, 1.0]));
    let seq = dilatation_sequence(&m, 15)?;
    let exact = seq.iter().enumerate().all(|(k, &v)| v == 4f64.powi(k as i32 + 1));
    let (c, s) = (0.7f64.cos(), 0.7f64.sin());
    let rot = DMatrix::from_row_slice(3, 3, &[c, 0.0, -s, 0.0, 1.0, 0.0, s, 0.0, c]);
    let conformal = [rot.clone() * 2.5, DMatrix::identity(3, 3) * 3.0, rot * -0.5];
    let worst = conformal
        .iter()
        .map(|m| matrix_dilatation(m).map(|d| (d.k - 1.0).abs()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok((
        exact && worst < 1e-12,
        format!("K(diag(2,1,1)^k) = 4^k exactly for k ≤ 15: {exact}; scalar·orthogonal |K − 1| ≤ {worst:.1e}"),
    ))
}

fn preimage_degree() -> Result<(bool, String)> {
    let f = PowerMap::with_lambda(2, 1.0, ZorichMap::spatial())?;
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut counts_ok = true;
    let mut forward: f64 = 0.0;
    let mut radial: f64 = 0.0;
    for _ in 0..100 {
        let y = random_point(&mut rng, 3, 0.1, 10.0);
        let r = dist(&y, &[0.0; 3]);
        let pre = f.preimages(&SpherePoint::Finite(y.clone()))?;
        counts_ok &= pre.len() == 4;
        for p in &pre {
            forward = forward.max(dist(f.eval(p).coords().unwrap_or(&[f64::INFINITY; 3]), &y));
            radial = radial.max((p.norm() - r.sqrt()).abs() / r.sqrt());
        }
    }
    Ok((
        counts_ok && forward < 1e-8 && radial < 1e-12,
        format!("100 points, exactly 4 preimages each: {counts_ok}; forward error {forward:.1e}; relative distance to S(√r) {radial:.1e}"),
    ))
}

fn holder() -> Result<(bool, String)> {
    let square = |x: &SpherePoint| match x {
        SpherePoint::Finite(c) => SpherePoint::from(vec![c[0] * c[0] - c[1] * c[1], 2.0 * c[0] * c[1]]),
        SpherePoint::Infinity => SpherePoint::Infinity,
    };
    let est = holder_constant_estimate(square, 2, 1.0, 1_000_000, 14)?;
    Ok((
        (1.9..=2.0).contains(&est.estimate),
        format!("{} pairs, estimate {:.12}", est.samples, est.estimate),
    ))
}

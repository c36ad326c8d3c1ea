//! Semigroups generated by power-type maps (or by IFS-determined maps):
//! word algebra, backward orbits, point classification, and the invariance
//! harness for radially described Julia sets.
//!
//! For power-type generators every word `w = g_{i₁} ∘ … ∘ g_{i_L}` is again a
//! power map whose Julia set is the sphere of radius
//! `julia_radius(word_params(w))`, so the Julia set of the semigroup is
//! described exactly (up to closure) by the set of word radii.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{chordal_distance, SpherePoint};
use crate::ifs::ContractiveSystem;
use crate::powermaps::{log_julia_radius, PowerMap, StretchParams};

/// Default limit on the number of enumerated words.
pub const DEFAULT_WORD_BUDGET: u128 = 1 << 14;

/// Orbits whose modulus exceeds this value are declared escaping.
pub const ESCAPE_CLAMP: f64 = 1e12;

/// Maximum number of generator applications per sampled word.
pub const MAX_SAMPLED_WORD_LEN: usize = 64;

#[derive(Debug, Clone)]
pub enum Generator {
    Power(PowerMap),
    /// A map known only through the IFS that determines its Julia set.
    Attractor(ContractiveSystem),
}

#[derive(Debug, Clone)]
pub struct SemigroupSpec {
    generators: Vec<Generator>,
    labels: Vec<String>,
    word_budget: u128,
}

/// `g_{i₁} ∘ … ∘ g_{i_L}` stored as `[i₁, …, i_L]` (0-based); the last index
/// is applied first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    /// Labels joined by `∘`, e.g. `f∘g`.
    pub fn display(&self, spec: &SemigroupSpec) -> String {
        self.0
            .iter()
            .map(|&i| spec.labels[i].as_str())
            .collect::<Vec<_>>()
            .join("∘")
    }
}

impl SemigroupSpec {
    /// Semigroup generated by power maps sharing one automorphic map.
    pub fn power(generators: Vec<PowerMap>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::invalid("a semigroup needs at least one generator"));
        }
        let dim = generators[0].dim();
        if generators.iter().any(|g| g.dim() != dim) {
            return Err(Error::invalid("generators live in different dimensions"));
        }
        let labels = (1..=generators.len()).map(|i| format!("g{i}")).collect();
        Ok(SemigroupSpec {
            generators: generators.into_iter().map(Generator::Power).collect(),
            labels,
            word_budget: DEFAULT_WORD_BUDGET,
        })
    }

    /// Semigroup of maps whose Julia sets are attractors of the given systems.
    pub fn from_systems(systems: Vec<ContractiveSystem>) -> Result<Self> {
        if systems.is_empty() {
            return Err(Error::invalid("a semigroup needs at least one generator"));
        }
        let labels = (1..=systems.len()).map(|i| format!("g{i}")).collect();
        Ok(SemigroupSpec {
            generators: systems.into_iter().map(Generator::Attractor).collect(),
            labels,
            word_budget: DEFAULT_WORD_BUDGET,
        })
    }

    pub fn with_labels(mut self, labels: &[&str]) -> Result<Self> {
        if labels.len() != self.generators.len() {
            return Err(Error::invalid("one label per generator is required"));
        }
        self.labels = labels.iter().map(|s| s.to_string()).collect();
        Ok(self)
    }

    pub fn with_word_budget(mut self, budget: u128) -> Self {
        self.word_budget = budget;
        self
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn word(&self, indices: Vec<usize>) -> Result<Word> {
        if indices.is_empty() {
            return Err(Error::invalid("words must be nonempty"));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.len()) {
            return Err(Error::invalid(format!("generator index {bad} out of range")));
        }
        Ok(Word(indices))
    }

    /// The power-type generators, or `Unsupported` if any is IFS-determined.
    pub fn power_maps(&self) -> Result<Vec<PowerMap>> {
        self.generators
            .iter()
            .map(|g| match g {
                Generator::Power(p) => Ok(*p),
                Generator::Attractor(_) => Err(Error::Unsupported(
                    "operation needs power-type generators".into(),
                )),
            })
            .collect()
    }

    fn power_params(&self, need_expanding: bool) -> Result<Vec<StretchParams>> {
        let params: Vec<StretchParams> = self.power_maps()?.iter().map(|p| *p.params()).collect();
        if need_expanding {
            if let Some(p) = params.iter().find(|p| p.d() < 2) {
                return Err(Error::invalid(format!(
                    "radial Julia data needs d ≥ 2 for every generator, got {}",
                    p.d()
                )));
            }
        }
        Ok(params)
    }

    /// IFS whose attractor is the Julia set of a semigroup of IFS-determined
    /// maps: the union of the generators' systems.
    pub fn union_system(&self) -> Result<ContractiveSystem> {
        let mut systems = Vec::new();
        for g in &self.generators {
            match g {
                Generator::Attractor(s) => systems.push(s.clone()),
                Generator::Power(_) => {
                    return Err(Error::Unsupported(
                        "power-type generators have no attractor system".into(),
                    ))
                }
            }
        }
        ContractiveSystem::union(&systems)
    }
}

/// Stretch parameters of the word: `A_{i₁} ∘ … ∘ A_{i_L}`.
pub fn word_params(spec: &SemigroupSpec, w: &Word) -> Result<StretchParams> {
    let params = spec.power_params(false)?;
    let (first, rest) = w
        .0
        .split_first()
        .ok_or_else(|| Error::invalid("words must be nonempty"))?;
    rest.iter()
        .try_fold(params[*first], |acc, &i| acc.compose(&params[i]))
}

fn word_count(k: usize, maxlen: usize) -> u128 {
    let mut total: u128 = 0;
    let mut level: u128 = 1;
    for _ in 0..maxlen {
        level = level.saturating_mul(k as u128);
        total = total.saturating_add(level);
    }
    total
}

/// Log Julia radii `ln λ_w / (1 − d_w)` of all words of length `1..=maxlen`,
/// sorted and merged at relative spacing 1e-12.
pub fn word_log_julia_radii(spec: &SemigroupSpec, maxlen: usize) -> Result<Vec<f64>> {
    let params = spec.power_params(true)?;
    let needed = word_count(params.len(), maxlen);
    if needed > spec.word_budget {
        return Err(Error::BudgetExceeded {
            needed,
            budget: spec.word_budget,
        });
    }
    let mut out = Vec::with_capacity(needed as usize);
    let mut level: Vec<StretchParams> = params.clone();
    for len in 1..=maxlen {
        for p in &level {
            out.push(log_julia_radius(p)?);
        }
        if len == maxlen {
            break;
        }
        let mut next = Vec::with_capacity(level.len() * params.len());
        for w in &level {
            for g in &params {
                next.push(w.compose(g)?);
            }
        }
        level = next;
    }
    out.sort_by(|a, b| a.total_cmp(b));
    out.dedup_by(|b, a| (b.exp() - a.exp()).abs() <= 1e-12 * a.exp().max(b.exp()));
    Ok(out)
}

/// Julia radii of all words of length at most `maxlen`, sorted ascending
/// with duplicates merged at 1e-12.
pub fn word_julia_radii(spec: &SemigroupSpec, maxlen: usize) -> Result<Vec<f64>> {
    Ok(word_log_julia_radii(spec, maxlen)?
        .into_iter()
        .map(f64::exp)
        .collect())
}

/// `[min, max]` of the word radii: the radial hull of the Julia set.
pub fn julia_ring_estimate(spec: &SemigroupSpec, maxlen: usize) -> Result<(f64, f64)> {
    let radii = word_julia_radii(spec, maxlen.max(1))?;
    Ok((radii[0], *radii.last().expect("nonempty")))
}

/// A point of a backward orbit together with the word sending it to the base.
#[derive(Debug, Clone)]
pub struct OrbitPoint {
    pub point: SpherePoint,
    /// Empty for the base point itself.
    pub word: Vec<usize>,
}

/// Breadth-first preimage tree of `x` under all generators, at most `budget`
/// points (the base point included).
pub fn backward_orbit(
    spec: &SemigroupSpec,
    x: &SpherePoint,
    depth: usize,
    budget: usize,
) -> Result<Vec<OrbitPoint>> {
    let maps = spec.power_maps()?;
    if x.is_infinity() || x.is_origin() {
        return Err(Error::invalid(
            "0 and ∞ are exceptional for power-type semigroups",
        ));
    }
    let mut out = vec![OrbitPoint {
        point: x.clone(),
        word: Vec::new(),
    }];
    let mut frontier = 0..1;
    for _ in 0..depth {
        let start = out.len();
        for idx in frontier.clone() {
            for (i, g) in maps.iter().enumerate() {
                for z in g.preimages(&out[idx].point)? {
                    if out.len() >= budget {
                        return Ok(out);
                    }
                    let mut word = out[idx].word.clone();
                    word.push(i);
                    out.push(OrbitPoint { point: z, word });
                }
            }
        }
        frontier = start..out.len();
    }
    Ok(out)
}

/// Applies `g_{i₁} ∘ … ∘ g_{i_L}` to `x` (last index first).
pub fn apply_word(maps: &[PowerMap], word: &[usize], x: &SpherePoint) -> SpherePoint {
    word.iter()
        .rev()
        .fold(x.clone(), |acc, &i| maps[i].eval(&acc))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Attracted,
    Escaping,
    MixedExpansion,
    /// No sampled word reached a threshold and no separation was observed.
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WordOutcome {
    Attracted,
    Escaped,
    Bounded,
}

/// Result of following one word from `x` and from a partner point at
/// chordal distance `PAIR_SEPARATION`.
#[derive(Debug, Clone, Serialize)]
pub struct WordTrace {
    /// Generator indices in the order they were applied.
    pub applied: Vec<usize>,
    pub outcome: WordOutcome,
    /// Largest chordal distance between the two orbits along the word.
    pub max_separation: f64,
}

impl WordTrace {
    /// The traced composition as a [`Word`] (last applied generator first).
    pub fn word(&self) -> Word {
        Word(self.applied.iter().rev().copied().collect())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub verdict: Verdict,
    pub witnesses: Vec<WordTrace>,
    /// Largest observed separation ratio `χ(orbit, partner) / δ`.
    pub expansion: f64,
    pub words_sampled: usize,
    pub seed: u64,
    pub note: &'static str,
}

pub const PAIR_SEPARATION: f64 = 1e-6;
const SEPARATED: f64 = 0.1;

/// Partner point on the same ray at chordal distance ≈ `PAIR_SEPARATION`.
fn partner(x: &SpherePoint) -> SpherePoint {
    let c = x.coords().expect("finite");
    let r = x.norm();
    let dr = PAIR_SEPARATION * (1.0 + r * r);
    let k = (r + dr) / r;
    SpherePoint::Finite(c.iter().map(|v| v * k).collect())
}

struct Thresholds {
    low: f64,
    high: f64,
}

fn trace_word(
    maps: &[PowerMap],
    x: &SpherePoint,
    applied: &[usize],
    th: &Thresholds,
) -> WordTrace {
    let mut a = x.clone();
    let mut b = partner(x);
    let mut sep: f64 = chordal_distance(&a, &b);
    let mut outcome = WordOutcome::Bounded;
    let mut used = Vec::new();
    for &i in applied {
        a = maps[i].eval(&a);
        b = maps[i].eval(&b);
        used.push(i);
        sep = sep.max(chordal_distance(&a, &b));
        let r = a.norm();
        if r < th.low {
            outcome = WordOutcome::Attracted;
            break;
        }
        if r > th.high {
            outcome = WordOutcome::Escaped;
            break;
        }
    }
    WordTrace {
        applied: used,
        outcome,
        max_separation: sep,
    }
}

fn thresholds(params: &[StretchParams]) -> Result<Thresholds> {
    let radii = params
        .iter()
        .map(log_julia_radius)
        .collect::<Result<Vec<_>>>()?;
    let rmin = radii.iter().cloned().fold(f64::INFINITY, f64::min).exp();
    let rmax = radii.iter().cloned().fold(f64::NEG_INFINITY, f64::max).exp();
    Ok(Thresholds {
        low: 1e-6 * rmin,
        high: (1e6 * rmax).min(ESCAPE_CLAMP),
    })
}

/// Re-runs a single witness word (given in application order).
pub fn replay_word(spec: &SemigroupSpec, x: &SpherePoint, applied: &[usize]) -> Result<WordTrace> {
    let params = spec.power_params(true)?;
    let maps = spec.power_maps()?;
    let th = thresholds(&params)?;
    Ok(trace_word(&maps, x, applied, &th))
}

/// Samples `word_budget` random words and reports escape/attraction or
/// non-normality evidence. The verdict is evidence, not a proof.
pub fn classify_point(
    spec: &SemigroupSpec,
    x: &SpherePoint,
    word_budget: usize,
    seed: u64,
) -> Result<ClassificationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    classify_with_rng(spec, x, word_budget, seed, &mut rng)
}

/// Classifies many points in parallel; point `i` uses stream `i` of the
/// generator seeded with `seed`, so results do not depend on scheduling.
pub fn classify_points(
    spec: &SemigroupSpec,
    points: &[SpherePoint],
    word_budget: usize,
    seed: u64,
) -> Result<Vec<ClassificationReport>> {
    points
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64 + 1);
            classify_with_rng(spec, x, word_budget, seed, &mut rng)
        })
        .collect()
}

const NOTE: &str = "normality is not decidable numerically; verdicts are sampled evidence";

fn classify_with_rng(
    spec: &SemigroupSpec,
    x: &SpherePoint,
    word_budget: usize,
    seed: u64,
    rng: &mut ChaCha8Rng,
) -> Result<ClassificationReport> {
    let params = spec.power_params(true)?;
    let maps = spec.power_maps()?;
    let th = thresholds(&params)?;
    let trivial = |verdict| ClassificationReport {
        verdict,
        witnesses: Vec::new(),
        expansion: 0.0,
        words_sampled: 0,
        seed,
        note: NOTE,
    };
    if x.is_origin() {
        return Ok(trivial(Verdict::Attracted));
    }
    if x.is_infinity() {
        return Ok(trivial(Verdict::Escaping));
    }

    let k = maps.len();
    let mut traces = Vec::with_capacity(word_budget);
    for _ in 0..word_budget.max(1) {
        let applied: Vec<usize> = (0..MAX_SAMPLED_WORD_LEN)
            .map(|_| rng.random_range(0..k))
            .collect();
        traces.push(trace_word(&maps, x, &applied, &th));
    }
    let all = |o: WordOutcome| traces.iter().all(|t| t.outcome == o);
    let find = |o: WordOutcome| traces.iter().find(|t| t.outcome == o).cloned();
    let expansion = traces
        .iter()
        .map(|t| t.max_separation / PAIR_SEPARATION)
        .fold(0.0, f64::max);
    let separated = traces
        .iter()
        .filter(|t| t.max_separation > SEPARATED)
        .max_by(|a, b| a.max_separation.total_cmp(&b.max_separation))
        .cloned();

    let (verdict, witnesses) = if all(WordOutcome::Attracted) {
        (Verdict::Attracted, vec![traces[0].clone()])
    } else if all(WordOutcome::Escaped) {
        (Verdict::Escaping, vec![traces[0].clone()])
    } else if let Some(t) = separated {
        (Verdict::MixedExpansion, vec![t])
    } else if let (Some(a), Some(e)) = (find(WordOutcome::Attracted), find(WordOutcome::Escaped)) {
        (Verdict::MixedExpansion, vec![a, e])
    } else {
        (Verdict::Undetermined, Vec::new())
    };
    Ok(ClassificationReport {
        verdict,
        witnesses,
        expansion,
        words_sampled: traces.len(),
        seed,
        note: NOTE,
    })
}

/// Julia set described as the closed radial shell `{rmin ≤ |x| ≤ rmax}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialJulia {
    pub rmin: f64,
    pub rmax: f64,
}

impl RadialJulia {
    const TOL: f64 = 1e-9;

    pub fn contains_radius(&self, r: f64) -> bool {
        r >= self.rmin * (1.0 - Self::TOL) && r <= self.rmax * (1.0 + Self::TOL)
    }

    pub fn strictly_outside(&self, r: f64) -> bool {
        r < self.rmin * (1.0 - Self::TOL) || r > self.rmax * (1.0 + Self::TOL)
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct InvarianceReport {
    pub fatou_images_checked: usize,
    pub fatou_violations: usize,
    pub julia_preimages_checked: usize,
    pub julia_violations: usize,
    /// `J = ∪ g_i⁻¹(J)` on the radial description.
    pub decomposition_holds: bool,
}

impl InvarianceReport {
    pub fn passed(&self) -> bool {
        self.fatou_violations == 0 && self.julia_violations == 0 && self.decomposition_holds
    }
}

/// Forward invariance of the Fatou set and backward invariance of the Julia
/// set, checked on samples against a radial Julia description.
pub fn invariance_check(
    spec: &SemigroupSpec,
    julia_sample: &[SpherePoint],
    fatou_sample: &[SpherePoint],
    julia: RadialJulia,
) -> Result<InvarianceReport> {
    let params = spec.power_params(true)?;
    let maps = spec.power_maps()?;
    let mut report = InvarianceReport::default();
    for x in fatou_sample {
        for g in &maps {
            report.fatou_images_checked += 1;
            if !julia.strictly_outside(g.eval(x).norm()) {
                report.fatou_violations += 1;
            }
        }
    }
    for x in julia_sample {
        for g in &maps {
            for z in g.preimages(x)? {
                report.julia_preimages_checked += 1;
                if !julia.contains_radius(z.norm()) {
                    report.julia_violations += 1;
                }
            }
        }
    }
    report.decomposition_holds = radial_decomposition_holds(&params, julia);
    Ok(report)
}

/// Checks that the preimage shells `g_i⁻¹([rmin, rmax])` tile `[rmin, rmax]`
/// up to relative tolerance 1e-9.
fn radial_decomposition_holds(params: &[StretchParams], julia: RadialJulia) -> bool {
    let tol = 1e-9;
    let mut pieces: Vec<(f64, f64)> = params
        .iter()
        .map(|p| (p.radial_preimage(julia.rmin), p.radial_preimage(julia.rmax)))
        .collect();
    pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
    let close = |a: f64, b: f64| (a - b).abs() <= tol * a.abs().max(b.abs());
    if !close(pieces[0].0, julia.rmin) {
        return false;
    }
    let mut reach = pieces[0].1;
    for &(lo, hi) in &pieces[1..] {
        if lo > reach && !close(lo, reach) {
            return false;
        }
        reach = reach.max(hi);
    }
    close(reach, julia.rmax) && pieces.iter().all(|&(lo, hi)| julia.contains_radius(lo) && julia.contains_radius(hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zorich::ZorichMap;

    fn ring(a: f64) -> SemigroupSpec {
        let h = ZorichMap::spatial();
        SemigroupSpec::power(vec![
            PowerMap::with_lambda(2, 1.0, h).unwrap(),
            PowerMap::with_lambda(2, 1.0 / a, h).unwrap(),
        ])
        .unwrap()
        .with_labels(&["f", "g"])
        .unwrap()
    }

    fn at_radius(r: f64) -> SpherePoint {
        let v = [0.48, -0.6, 0.64];
        SpherePoint::Finite(v.iter().map(|c| c * r).collect())
    }

    #[test]
    fn word_params_examples() {
        let spec = ring(4.0);
        let fg = word_params(&spec, &spec.word(vec![0, 1]).unwrap()).unwrap();
        assert_eq!(fg.d(), 4);
        assert!((fg.log_lambda() + 2.0 * 4f64.ln()).abs() < 1e-15);
        let gf = word_params(&spec, &spec.word(vec![1, 0]).unwrap()).unwrap();
        assert_eq!(gf.d(), 4);
        assert!((gf.log_lambda() + 4f64.ln()).abs() < 1e-15);
        let g = word_params(&spec, &spec.word(vec![1]).unwrap()).unwrap();
        assert_eq!(&g, spec.power_maps().unwrap()[1].params());
        assert!(spec.word(vec![]).is_err());
        assert!(spec.word(vec![2]).is_err());
        assert_eq!(spec.word(vec![0, 1]).unwrap().display(&spec), "f∘g");
    }

    #[test]
    fn word_radii_of_ring_up_to_length_two() {
        let radii = word_julia_radii(&ring(4.0), 2).unwrap();
        let want = [1.0, 4f64.powf(1.0 / 3.0), 4f64.powf(2.0 / 3.0), 4.0];
        assert_eq!(radii.len(), 4);
        for (r, w) in radii.iter().zip(want) {
            assert!((r - w).abs() < 1e-12, "{r} vs {w}");
        }
    }

    #[test]
    fn single_generator_has_single_radius() {
        let h = ZorichMap::spatial();
        let spec = SemigroupSpec::power(vec![PowerMap::with_lambda(2, 1.0, h).unwrap()]).unwrap();
        for l in 1..6 {
            assert_eq!(word_julia_radii(&spec, l).unwrap(), vec![1.0]);
        }
        assert_eq!(julia_ring_estimate(&spec, 3).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn budget_is_enforced() {
        let spec = ring(4.0).with_word_budget(100);
        assert!(matches!(
            word_julia_radii(&spec, 7),
            Err(Error::BudgetExceeded { needed: 254, budget: 100 })
        ));
        assert!(word_julia_radii(&spec, 5).is_ok());
    }

    #[test]
    fn ring_estimate_hits_endpoints_at_length_one() {
        for a in [1.5, 4.0, 10.0] {
            let (lo, hi) = julia_ring_estimate(&ring(a), 1).unwrap();
            assert!((lo - 1.0).abs() < 1e-15 && (hi - a).abs() < 1e-12 * a);
        }
    }

    #[test]
    fn backward_orbit_radii_depth_two() {
        let spec = ring(4.0);
        let orbit = backward_orbit(&spec, &at_radius(4.0), 2, 10_000).unwrap();
        assert_eq!(orbit.len(), 1 + 8 + 64);
        let mut radii: Vec<f64> = orbit.iter().map(|p| p.point.norm()).collect();
        radii.sort_by(|a, b| a.total_cmp(b));
        radii.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        let want = [2f64.sqrt(), 2.0, 2.0 * 2f64.sqrt(), 4.0];
        assert_eq!(radii.len(), 4);
        for (r, w) in radii.iter().zip(want) {
            assert!((r - w).abs() < 1e-12);
        }
        let maps = spec.power_maps().unwrap();
        for p in &orbit {
            let y = apply_word(&maps, &p.word, &p.point);
            assert!(crate::geometry::dist(y.coords().unwrap(), at_radius(4.0).coords().unwrap()) < 1e-7);
        }
    }

    #[test]
    fn backward_orbit_edge_cases() {
        let spec = ring(4.0);
        let x = at_radius(2.0);
        let orbit = backward_orbit(&spec, &x, 0, 100).unwrap();
        assert_eq!(orbit.len(), 1);
        assert_eq!(orbit[0].point, x);
        assert_eq!(backward_orbit(&spec, &x, 3, 5).unwrap().len(), 5);
        assert!(matches!(
            backward_orbit(&spec, &SpherePoint::origin(3), 1, 10),
            Err(Error::InvalidParameter(_))
        ));
        assert!(backward_orbit(&spec, &SpherePoint::Infinity, 1, 10).is_err());
    }

    #[test]
    fn classification_examples() {
        let spec = ring(4.0);
        let inner = classify_point(&spec, &at_radius(0.5), 32, 7).unwrap();
        assert_eq!(inner.verdict, Verdict::Attracted);
        let outer = classify_point(&spec, &at_radius(5.0), 32, 7).unwrap();
        assert_eq!(outer.verdict, Verdict::Escaping);
        let mid = classify_point(&spec, &at_radius(2.0), 32, 7).unwrap();
        assert_eq!(mid.verdict, Verdict::MixedExpansion);
        assert!(!mid.witnesses.is_empty());
        for w in &mid.witnesses {
            let again = replay_word(&spec, &at_radius(2.0), &w.applied).unwrap();
            assert_eq!(again.outcome, w.outcome);
        }
    }

    #[test]
    fn classification_is_deterministic_and_stable() {
        let spec = ring(4.0);
        for r in [0.3, 0.9, 4.5, 20.0] {
            let x = at_radius(r);
            let verdicts: Vec<Verdict> = (0..5)
                .map(|s| classify_point(&spec, &x, 16, s).unwrap().verdict)
                .collect();
            assert!(verdicts.iter().all(|v| *v == verdicts[0]));
            let a = classify_point(&spec, &x, 16, 3).unwrap();
            let b = classify_point(&spec, &x, 16, 3).unwrap();
            assert_eq!(a.verdict, b.verdict);
            assert_eq!(a.expansion, b.expansion);
        }
    }

    #[test]
    fn invariance_examples() {
        let spec = ring(4.0);
        let j = RadialJulia { rmin: 1.0, rmax: 4.0 };
        let rep = invariance_check(&spec, &[at_radius(2.0)], &[at_radius(0.5)], j).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.fatou_images_checked, 2);
        assert_eq!(rep.julia_preimages_checked, 8);
        let empty = invariance_check(&spec, &[], &[], j).unwrap();
        assert!(empty.passed());
        // A wrong description breaks the decomposition.
        let wrong = RadialJulia { rmin: 1.0, rmax: 3.0 };
        assert!(!invariance_check(&spec, &[], &[], wrong).unwrap().decomposition_holds);
    }

    #[test]
    fn ifs_generators_are_unsupported_for_words() {
        let sys = ContractiveSystem::middle_thirds();
        let spec = SemigroupSpec::from_systems(vec![sys]).unwrap();
        assert!(matches!(
            word_params(&spec, &spec.word(vec![0]).unwrap()),
            Err(Error::Unsupported(_))
        ));
        assert!(spec.union_system().is_ok());
    }
}

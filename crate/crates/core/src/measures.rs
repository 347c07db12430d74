//! Incidence sampling and empirical scattering measures on the angle square.
//!
//! Sample `i` of a run with seed `s` is drawn from its own ChaCha8 stream
//! (seed `s`, stream `i`), and blocks are merged in index order, so results do
//! not depend on the number of worker threads.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{trace_hollow, IncidenceState, Pathology, TraceLimits};
use crate::error::{config, Error, Result};
use crate::hollows::HollowGeometry;

/// Largest tolerated fraction of pathological trajectories in a run.
pub const PATHOLOGY_LIMIT: f64 = 1e-3;
pub const DEFAULT_GRID: usize = 181;
pub const DEFAULT_RETAIN: usize = 1_000_000;
const BLOCK: usize = 1024;

/// Inverse CDF of the density `½ cos φ` on `(-π/2, π/2)`.
pub fn phi_from_u(u: f64) -> f64 {
    (2.0 * u - 1.0).asin()
}

/// The `index`-th incidence of the run `seed`.
pub fn incidence_at(seed: u64, index: u64) -> IncidenceState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    loop {
        let xi: f64 = rng.random();
        let phi = phi_from_u(rng.random());
        if phi.abs() < FRAC_PI_2 {
            return IncidenceState { xi, phi };
        }
    }
}

pub fn sample_incidence(seed: u64, n: usize) -> Vec<IncidenceState> {
    (0..n as u64).into_par_iter().map(|i| incidence_at(seed, i)).collect()
}

/// One Ok trajectory: incidence angle, exit angle and reflection count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScatterSample {
    pub phi: f64,
    pub phi_plus: f64,
    pub m: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasureOptions {
    pub grid: usize,
    pub retain: usize,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        Self { grid: DEFAULT_GRID, retain: DEFAULT_RETAIN }
    }
}

/// Expectations of functions of `(φ, φ⁺)`.
pub trait AngleMeasure {
    fn expect<G: Fn(f64, f64) -> f64>(&self, g: G) -> Result<f64>;
}

/// Empirical measure with uniform weights on its Ok samples.
#[derive(Clone, Debug, PartialEq)]
pub struct ScatterMeasure {
    samples: Vec<ScatterSample>,
    grid: usize,
    histogram: Vec<u64>,
    n_total: u64,
    n_ok: u64,
    pathologies: BTreeMap<Pathology, u64>,
    sum_reflections: u128,
}

impl ScatterMeasure {
    fn empty(grid: usize) -> Self {
        Self {
            samples: Vec::new(),
            grid,
            histogram: vec![0; grid * grid],
            n_total: 0,
            n_ok: 0,
            pathologies: BTreeMap::new(),
            sum_reflections: 0,
        }
    }

    /// Measure with one atom per pair (reflection counts set to 1).
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let mut m = Self::empty(DEFAULT_GRID);
        for &(phi, phi_plus) in pairs {
            if !(phi.abs() <= FRAC_PI_2 && phi_plus.abs() <= FRAC_PI_2) {
                return Err(crate::error::domain(format!("pair ({phi}, {phi_plus}) outside the angle square")));
            }
            m.push(ScatterSample { phi, phi_plus, m: 1 }, usize::MAX);
            m.n_total += 1;
        }
        Ok(m)
    }

    fn bin(&self, a: f64) -> usize {
        (((a + FRAC_PI_2) / PI * self.grid as f64) as usize).min(self.grid - 1)
    }

    fn push(&mut self, s: ScatterSample, retain: usize) {
        let (i, j) = (self.bin(s.phi), self.bin(s.phi_plus));
        self.histogram[i * self.grid + j] += 1;
        self.n_ok += 1;
        self.sum_reflections += s.m as u128;
        if self.samples.len() < retain {
            self.samples.push(s);
        }
    }

    pub fn samples(&self) -> &[ScatterSample] {
        &self.samples
    }

    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.samples.iter().map(|s| (s.phi, s.phi_plus))
    }

    /// Row-major counts; row index is the `φ` bin, column the `φ⁺` bin.
    pub fn histogram(&self) -> (&[u64], usize) {
        (&self.histogram, self.grid)
    }

    pub fn n_total(&self) -> u64 {
        self.n_total
    }

    pub fn n_ok(&self) -> u64 {
        self.n_ok
    }

    pub fn n_pathological(&self) -> u64 {
        self.n_total - self.n_ok
    }

    pub fn pathologies(&self) -> &BTreeMap<Pathology, u64> {
        &self.pathologies
    }

    pub fn pathological_fraction(&self) -> f64 {
        if self.n_total == 0 {
            0.0
        } else {
            self.n_pathological() as f64 / self.n_total as f64
        }
    }

    pub fn mean_reflections(&self) -> f64 {
        if self.n_ok == 0 {
            f64::NAN
        } else {
            self.sum_reflections as f64 / self.n_ok as f64
        }
    }

    /// Fails with [`Error::RunFlagged`] if too many trajectories were pathological.
    pub fn check_pathology(&self, limit: f64) -> Result<()> {
        let fraction = self.pathological_fraction();
        if fraction > limit {
            return Err(Error::RunFlagged { n_pathological: self.n_pathological(), n_total: self.n_total, fraction, limit });
        }
        Ok(())
    }

    fn fraction_where(&self, pred: impl Fn(&ScatterSample) -> bool) -> Result<f64> {
        if self.samples.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        Ok(self.samples.iter().filter(|s| pred(s)).count() as f64 / self.samples.len() as f64)
    }

    /// Weight of samples with `m == k`.
    pub fn reflection_fraction(&self, k: u64) -> Result<f64> {
        self.fraction_where(|s| s.m == k)
    }

    /// Empirical `q`-quantile of `|φ - φ⁺|` (nearest rank).
    pub fn quantile_abs_diff(&self, q: f64) -> Result<f64> {
        if self.samples.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        let mut d: Vec<f64> = self.samples.iter().map(|s| (s.phi - s.phi_plus).abs()).collect();
        d.sort_by(f64::total_cmp);
        let k = ((q * d.len() as f64).ceil() as usize).clamp(1, d.len());
        Ok(d[k - 1])
    }

    pub fn write_pairs_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "phi,phi_plus")?;
        for s in &self.samples {
            writeln!(w, "{},{}", s.phi, s.phi_plus)?;
        }
        Ok(())
    }
}

impl AngleMeasure for ScatterMeasure {
    fn expect<G: Fn(f64, f64) -> f64>(&self, g: G) -> Result<f64> {
        if self.samples.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        let sum: f64 = self.samples.iter().map(|s| g(s.phi, s.phi_plus)).sum();
        Ok(sum / self.samples.len() as f64)
    }
}

struct BlockResult {
    samples: Vec<ScatterSample>,
    pathologies: Vec<Pathology>,
}

fn run_block(h: &HollowGeometry, seed: u64, lim: &TraceLimits, lo: u64, hi: u64) -> BlockResult {
    let mut out = BlockResult { samples: Vec::with_capacity((hi - lo) as usize), pathologies: Vec::new() };
    for i in lo..hi {
        let r = trace_hollow(h, incidence_at(seed, i), lim);
        match r.status {
            crate::dynamics::TraceStatus::Ok => out.samples.push(ScatterSample { phi: r.phi, phi_plus: r.phi_plus, m: r.n_reflections }),
            crate::dynamics::TraceStatus::Pathological(p) => out.pathologies.push(p),
        }
    }
    out
}

/// Traces `n` sampled incidences without judging the pathological fraction.
pub fn estimate_measure_unchecked(
    h: &HollowGeometry,
    n: usize,
    seed: u64,
    lim: &TraceLimits,
    opts: MeasureOptions,
) -> Result<ScatterMeasure> {
    if n == 0 {
        return Err(config("sample count must be positive"));
    }
    if opts.grid == 0 {
        return Err(config("histogram grid must be positive"));
    }
    lim.validate()?;
    let lim = TraceLimits { record_path: false, ..*lim };
    let n = n as u64;
    let n_blocks = n.div_ceil(BLOCK as u64);
    let blocks: Vec<BlockResult> =
        (0..n_blocks).into_par_iter().map(|b| run_block(h, seed, &lim, b * BLOCK as u64, ((b + 1) * BLOCK as u64).min(n))).collect();
    let mut m = ScatterMeasure::empty(opts.grid);
    m.n_total = n;
    // reservoir beyond the retention cap, driven by a stream no sample uses
    let mut res_rng = ChaCha8Rng::seed_from_u64(seed);
    res_rng.set_stream(u64::MAX);
    for b in blocks {
        for p in b.pathologies {
            *m.pathologies.entry(p).or_default() += 1;
        }
        for s in b.samples {
            let seen = m.n_ok;
            m.push(s, opts.retain);
            if seen >= opts.retain as u64 {
                let j = res_rng.random_range(0..=seen);
                if (j as usize) < opts.retain {
                    m.samples[j as usize] = s;
                }
            }
        }
    }
    Ok(m)
}

/// Traces `n` sampled incidences and fails if the run is flagged.
pub fn estimate_measure(h: &HollowGeometry, n: usize, seed: u64, lim: &TraceLimits) -> Result<ScatterMeasure> {
    let m = estimate_measure_unchecked(h, n, seed, lim, MeasureOptions::default())?;
    m.check_pathology(PATHOLOGY_LIMIT)?;
    Ok(m)
}

/// The elastic (`φ⁺ = -φ`), retroreflector (`φ⁺ = φ`) and semi-retroreflector
/// (equal mixture) measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceMeasure {
    Elastic,
    Retro,
    SemiRetro,
}

impl AngleMeasure for ReferenceMeasure {
    fn expect<G: Fn(f64, f64) -> f64>(&self, g: G) -> Result<f64> {
        let retro = || simpson_cos(|p| g(p, p));
        let elastic = || simpson_cos(|p| g(p, -p));
        Ok(match self {
            ReferenceMeasure::Elastic => elastic(),
            ReferenceMeasure::Retro => retro(),
            ReferenceMeasure::SemiRetro => 0.5 * (elastic() + retro()),
        })
    }
}

/// `∫ ½ cos φ f(φ) dφ` over `(-π/2, π/2)` by composite Simpson.
fn simpson_cos(f: impl Fn(f64) -> f64) -> f64 {
    let n = 20_000;
    let h = PI / n as f64;
    let w = |x: f64| 0.5 * x.cos() * f(x);
    let mut acc = w(-FRAC_PI_2) + w(FRAC_PI_2);
    for i in 1..n {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * w(-FRAC_PI_2 + i as f64 * h);
    }
    acc * h / 3.0
}

/// Retroreflectivity `½ ∫ (1 + cos(φ - φ⁺)) dη`.
pub fn functional_f<M: AngleMeasure>(eta: &M) -> Result<f64> {
    eta.expect(|a, b| 0.5 * (1.0 + (a - b).cos()))
}

/// Weight of samples with `|φ⁺ - φ| ≤ tol`.
pub fn retro_fraction(eta: &ScatterMeasure, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    eta.fraction_where(|s| (s.phi_plus - s.phi).abs() <= tol)
}

/// Weight of samples with `|φ⁺ + φ| ≤ tol`.
pub fn elastic_fraction(eta: &ScatterMeasure, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    eta.fraction_where(|s| (s.phi_plus + s.phi).abs() <= tol)
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 {
        Ok(())
    } else {
        Err(crate::error::domain(format!("tolerance must be positive, got {tol}")))
    }
}

/// Fixed family of test functions used to compare measures weakly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFunction {
    One,
    CosDiff,
    SinDiff,
    CosSum,
    SinSum,
    Cos2Diff,
    Cos2Sum,
    Product,
}

impl TestFunction {
    pub const ALL: [TestFunction; 8] = [
        TestFunction::One,
        TestFunction::CosDiff,
        TestFunction::SinDiff,
        TestFunction::CosSum,
        TestFunction::SinSum,
        TestFunction::Cos2Diff,
        TestFunction::Cos2Sum,
        TestFunction::Product,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestFunction::One => "one",
            TestFunction::CosDiff => "cos_diff",
            TestFunction::SinDiff => "sin_diff",
            TestFunction::CosSum => "cos_sum",
            TestFunction::SinSum => "sin_sum",
            TestFunction::Cos2Diff => "cos2_diff",
            TestFunction::Cos2Sum => "cos2_sum",
            TestFunction::Product => "product",
        }
    }

    pub fn eval(self, a: f64, b: f64) -> f64 {
        match self {
            TestFunction::One => 1.0,
            TestFunction::CosDiff => (a - b).cos(),
            TestFunction::SinDiff => (a - b).sin(),
            TestFunction::CosSum => (a + b).cos(),
            TestFunction::SinSum => (a + b).sin(),
            TestFunction::Cos2Diff => (2.0 * (a - b)).cos(),
            TestFunction::Cos2Sum => (2.0 * (a + b)).cos(),
            TestFunction::Product => a * b,
        }
    }

    /// Exact expectation under a reference measure.
    pub fn reference_moment(self, r: ReferenceMeasure) -> f64 {
        let sq = PI * PI / 4.0 - 2.0;
        // (retro, elastic)
        let (retro, elastic) = match self {
            TestFunction::One => (1.0, 1.0),
            TestFunction::CosDiff => (1.0, 1.0 / 3.0),
            TestFunction::SinDiff => (0.0, 0.0),
            TestFunction::CosSum => (1.0 / 3.0, 1.0),
            TestFunction::SinSum => (0.0, 0.0),
            TestFunction::Cos2Diff => (1.0, -1.0 / 15.0),
            TestFunction::Cos2Sum => (-1.0 / 15.0, 1.0),
            TestFunction::Product => (sq, -sq),
        };
        match r {
            ReferenceMeasure::Retro => retro,
            ReferenceMeasure::Elastic => elastic,
            ReferenceMeasure::SemiRetro => 0.5 * (retro + elastic),
        }
    }
}

pub fn test_moments<M: AngleMeasure>(eta: &M) -> Result<BTreeMap<&'static str, f64>> {
    TestFunction::ALL.iter().map(|g| Ok((g.name(), eta.expect(|a, b| g.eval(a, b))?))).collect()
}

/// `max_g |E_η g - E g|` over the test family, against the semi-retroreflector
/// measure `½(η_0 + η_⋆)`.
pub fn semi_retro_distance<M: AngleMeasure>(eta: &M) -> Result<f64> {
    let mut worst = 0.0f64;
    for g in TestFunction::ALL {
        let e = eta.expect(|a, b| g.eval(a, b))?;
        worst = worst.max((e - g.reference_moment(ReferenceMeasure::SemiRetro)).abs());
    }
    Ok(worst)
}

/// Summary record of a measure estimation run.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub struct MeasureSummary {
    pub shape: String,
    pub params: BTreeMap<String, f64>,
    #[serde(rename = "N")]
    pub n: u64,
    pub seed: u64,
    #[serde(rename = "F")]
    pub f: f64,
    pub tol: f64,
    pub retro_fraction: f64,
    pub elastic_fraction: f64,
    pub n_pathological: u64,
    pub pathologies: BTreeMap<Pathology, u64>,
    pub mean_reflections: f64,
    pub semi_retro_distance: f64,
    pub test_moments: BTreeMap<&'static str, f64>,
}

impl MeasureSummary {
    pub fn new(h: &HollowGeometry, eta: &ScatterMeasure, seed: u64, tol: f64) -> Result<Self> {
        Ok(Self {
            shape: h.shape().name().to_string(),
            params: h.shape().params().into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            n: eta.n_total(),
            seed,
            f: functional_f(eta)?,
            tol,
            retro_fraction: retro_fraction(eta, tol)?,
            elastic_fraction: elastic_fraction(eta, tol)?,
            n_pathological: eta.n_pathological(),
            pathologies: eta.pathologies().clone(),
            mean_reflections: eta.mean_reflections(),
            semi_retro_distance: semi_retro_distance(eta)?,
            test_moments: test_moments(eta)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hollows::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn inverse_cdf_examples() {
        assert_eq!(phi_from_u(0.5), 0.0);
        assert_eq!(phi_from_u(1.0), FRAC_PI_2);
        assert_eq!(phi_from_u(0.0), -FRAC_PI_2);
    }

    #[test]
    fn incidence_sampler_moments() {
        let s = sample_incidence(1, 1_000_000);
        let n = s.len() as f64;
        let mean_sin = s.iter().map(|x| x.phi.sin()).sum::<f64>() / n;
        assert!(mean_sin.abs() < 3e-3, "{mean_sin}");
        // ½ cos φ integrates to one; E[cos φ] = π/4 under it
        let mean_cos = s.iter().map(|x| x.phi.cos()).sum::<f64>() / n;
        assert!((mean_cos - PI / 4.0).abs() < 3e-3, "{mean_cos}");
        let mean_xi = s.iter().map(|x| x.xi).sum::<f64>() / n;
        assert!((mean_xi - 0.5).abs() < 3e-3);
        assert!(s.iter().all(|x| x.phi.abs() < FRAC_PI_2 && (0.0..1.0).contains(&x.xi)));
    }

    #[test]
    fn total_mass_bookkeeping() {
        // pairs (point, direction) on a curve of length L carry mass
        // ∫∫ ⟨n, v⟩₋ = 2L; the probability density ½ cos φ is that mass over 2L
        let mass_per_length = simpson_cos(|_| 2.0);
        assert_abs_diff_eq!(mass_per_length, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ReferenceMeasure::Retro.expect(|_, _| 1.0).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn sampler_is_deterministic_and_stream_local() {
        assert_eq!(sample_incidence(7, 10), sample_incidence(7, 10));
        assert_eq!(sample_incidence(7, 20)[..10], sample_incidence(7, 10)[..]);
        assert_ne!(sample_incidence(7, 10), sample_incidence(8, 10));
    }

    #[test]
    fn reference_values_of_f() {
        assert_abs_diff_eq!(functional_f(&ReferenceMeasure::Retro).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(functional_f(&ReferenceMeasure::Elastic).unwrap(), 2.0 / 3.0, epsilon = 1e-12);
        let atom = ScatterMeasure::from_pairs(&[(0.0, FRAC_PI_2)]).unwrap();
        assert_abs_diff_eq!(functional_f(&atom).unwrap(), 0.5, epsilon = 1e-15);
        assert_eq!(functional_f(&ScatterMeasure::from_pairs(&[]).unwrap()), Err(Error::EmptyMeasure));
    }

    #[test]
    fn closed_form_moments_match_quadrature() {
        for g in TestFunction::ALL {
            for r in [ReferenceMeasure::Retro, ReferenceMeasure::Elastic, ReferenceMeasure::SemiRetro] {
                let q = r.expect(|a, b| g.eval(a, b)).unwrap();
                assert!((q - g.reference_moment(r)).abs() < 1e-12, "{g:?} {r:?}: {q}");
            }
        }
    }

    #[test]
    fn semi_retro_distance_examples() {
        assert!(semi_retro_distance(&ReferenceMeasure::SemiRetro).unwrap() < 1e-12);
        let d = semi_retro_distance(&ReferenceMeasure::Retro).unwrap();
        assert_abs_diff_eq!(d, 8.0 / 15.0, epsilon = 1e-12);
        // sampled mixture: half the atoms retro, half elastic
        let pairs: Vec<(f64, f64)> =
            sample_incidence(3, 200_000).iter().enumerate().map(|(i, s)| (s.phi, if i % 2 == 0 { s.phi } else { -s.phi })).collect();
        let m = ScatterMeasure::from_pairs(&pairs).unwrap();
        assert!(semi_retro_distance(&m).unwrap() < 1e-2);
    }

    #[test]
    fn fractions_of_exact_measures() {
        let s = sample_incidence(4, 100_000);
        let retro = ScatterMeasure::from_pairs(&s.iter().map(|x| (x.phi, x.phi)).collect::<Vec<_>>()).unwrap();
        assert_eq!(retro_fraction(&retro, 1e-12).unwrap(), 1.0);
        let elastic = ScatterMeasure::from_pairs(&s.iter().map(|x| (x.phi, -x.phi)).collect::<Vec<_>>()).unwrap();
        // only |φ| ≤ 5e-7 counts as retro; expected weight about 5e-7
        assert!(retro_fraction(&elastic, 1e-6).unwrap() < 1e-4);
        assert_eq!(elastic_fraction(&elastic, 1e-6).unwrap(), 1.0);
        assert!(retro_fraction(&elastic, 0.0).is_err());
    }

    #[test]
    fn rectangle_measure_is_deterministic_across_thread_counts() {
        let h = make_rectangle(0.1).unwrap();
        let lim = TraceLimits::default();
        let run = |threads| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| estimate_measure(&h, 5000, 9, &lim).unwrap())
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a, b);
        assert_eq!(a.n_total(), 5000);
    }

    #[test]
    fn dichotomous_f_decomposition() {
        let h = make_tube(0.1, 0.01, 40.0).unwrap();
        let eta = estimate_measure(&h, 20_000, 2, &TraceLimits::default()).unwrap();
        let tol = 1e-9;
        let r = retro_fraction(&eta, tol).unwrap();
        let e = elastic_fraction(&eta, tol).unwrap();
        // samples with |φ| ≤ tol/2 are in both classes
        let both = eta.fraction_where(|s| s.phi.abs() <= tol / 2.0).unwrap();
        assert!((r + e - both - 1.0).abs() < 1e-12);
        let n = eta.samples().len() as f64;
        let elastic_part: f64 =
            eta.samples().iter().filter(|s| (s.phi_plus - s.phi).abs() > tol).map(|s| 0.5 * (1.0 + (2.0 * s.phi).cos())).sum::<f64>() / n;
        assert!((functional_f(&eta).unwrap() - (r + elastic_part)).abs() < 1e-9);
    }

    #[test]
    fn reservoir_keeps_cap() {
        let h = make_rectangle(0.5).unwrap();
        let m = estimate_measure_unchecked(&h, 3000, 1, &TraceLimits::default(), MeasureOptions { grid: 10, retain: 1000 }).unwrap();
        assert_eq!(m.samples().len(), 1000);
        assert_eq!(m.histogram().0.iter().sum::<u64>(), m.n_ok());
    }

    #[test]
    fn block_standard_deviation_of_f_is_small() {
        let h = make_double_parabola();
        let lim = TraceLimits::default();
        let blocks: Vec<f64> = (0..10).map(|k| functional_f(&estimate_measure(&h, 2000, 50 + k, &lim).unwrap()).unwrap()).collect();
        let mean = blocks.iter().sum::<f64>() / 10.0;
        let sd = (blocks.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / 9.0).sqrt();
        assert!(sd <= 1.0 / (2000f64).sqrt(), "{sd}");
    }

    proptest! {
        #[test]
        fn f_lies_in_unit_interval(pairs in prop::collection::vec((-1.57f64..1.57, -1.57f64..1.57), 1..50)) {
            let m = ScatterMeasure::from_pairs(&pairs).unwrap();
            let f = functional_f(&m).unwrap();
            prop_assert!((0.0..=1.0).contains(&f));
            let retro: Vec<(f64, f64)> = pairs.iter().map(|&(a, _)| (a, a)).collect();
            prop_assert_eq!(functional_f(&ScatterMeasure::from_pairs(&retro).unwrap()).unwrap(), 1.0);
        }
    }
}

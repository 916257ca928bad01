//! Seeded invariant suites over every module, reported as deterministic JSON.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::backforth::{bnf_run, DenseOracle, EventuallyConstant};
use crate::forcing::{compatible, extend_condition, find_antichain, is_condition, Condition};
use crate::gen::{
    random_condition, random_hom_on_tree, random_point, random_point_with_tail, random_width_tree, random_word,
    stream_rng, Stream,
};
use crate::lipschitz::{all_table_homs, check_isometry, level_analysis, PartialMap, TreeHom};
use crate::parity::{cell_words_up_to, certify_no_isometry, check_parity_invariant, gen_family, FamilySpec, Parity};
use crate::prefix::{distance, word_meet, Alphabet, Letter, LogDistance, Point, Word, WordTree};
use crate::slalom::{
    captures_letters, hom_image_tree, merge_slaloms, sample_width_bound, slalom_from_hom, tree_width,
    width_check, BoundedDenseSample, CaptureMode, Slalom, WidthProfile,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelftestConfig {
    pub seed: u64,
    /// Random trials for the slalom, image-width and extension suites.
    pub trials: usize,
    /// Word depth for the exhaustive homomorphism enumeration.
    pub hom_depth: usize,
    pub bnf_steps: usize,
    pub bnf_seeds: usize,
    pub cell_depth: usize,
    pub per_cell: usize,
    pub slalom_depth: usize,
    pub tree_depth: usize,
    /// Random pairs or triples for the metric and compatibility suites.
    pub samples: usize,
    pub antichain_families: usize,
    pub antichain_max: usize,
}

impl SelftestConfig {
    pub fn new(seed: u64) -> Self {
        SelftestConfig {
            seed,
            trials: 1000,
            hom_depth: 3,
            bnf_steps: 500,
            bnf_seeds: 10,
            cell_depth: 3,
            per_cell: 50,
            slalom_depth: 12,
            tree_depth: 10,
            samples: 10_000,
            antichain_families: 100,
            antichain_max: 15,
        }
    }

    /// Same suites at a fraction of the work.
    pub fn quick(seed: u64) -> Self {
        SelftestConfig {
            trials: 100,
            hom_depth: 2,
            bnf_steps: 100,
            bnf_seeds: 2,
            cell_depth: 2,
            per_cell: 10,
            samples: 1000,
            antichain_families: 20,
            antichain_max: 10,
            ..SelftestConfig::new(seed)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub passed: bool,
    pub checked: u64,
    pub violations: u64,
    pub first_violation: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

struct Tally {
    name: &'static str,
    checked: u64,
    violations: u64,
    first: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally {
            name,
            checked: 0,
            violations: 0,
            first: None,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violations += 1;
            if self.first.is_none() {
                self.first = Some(what());
            }
        }
    }

    fn finish(self) -> SuiteReport {
        SuiteReport {
            name: self.name.to_string(),
            passed: self.violations == 0,
            checked: self.checked,
            violations: self.violations,
            first_violation: self.first,
        }
    }
}

pub fn run_selftest(cfg: &SelftestConfig) -> SelftestReport {
    let suites = vec![
        suite_levels(cfg),
        suite_back_and_forth(cfg),
        suite_parity(cfg),
        suite_slaloms(cfg),
        suite_image_width(cfg),
        suite_forcing(cfg),
        suite_metric(cfg),
    ];
    SelftestReport {
        seed: cfg.seed,
        passed: suites.iter().all(|s| s.passed),
        suites,
    }
}

/// Every table homomorphism of `2^{≤d}`: each level is injective exactly
/// when surjective, and all levels injective exactly when meets are kept.
pub fn suite_levels(cfg: &SelftestConfig) -> SuiteReport {
    let mut t = Tally::new("surjective_iff_isometry");
    let d = cfg.hom_depth;
    let words: Vec<Vec<Word>> = (0..=d)
        .map(|j| Alphabet::BINARY.words_of_length(j).expect("binary"))
        .collect();
    let homs = match all_table_homs(2, d) {
        Ok(h) => h,
        Err(e) => {
            t.check(false, || e.to_string());
            return t.finish();
        }
    };
    for (code, h) in homs.enumerate() {
        let Ok(la) = level_analysis(&h, d) else {
            t.check(false, || format!("hom {code}: level analysis failed"));
            continue;
        };
        for l in &la.levels {
            t.check(l.injective == l.surjective, || {
                format!("hom {code} level {}: injective {} surjective {}", l.level, l.injective, l.surjective)
            });
        }
        let keeps_meets = words.iter().all(|level| {
            let images: Vec<Word> = level.iter().map(|s| h.apply(s).expect("total")).collect();
            (0..level.len()).all(|i| {
                (i + 1..level.len()).all(|j| word_meet(&images[i], &images[j]).len() == word_meet(&level[i], &level[j]).len())
            })
        });
        t.check(keeps_meets == la.isometry_to_depth, || {
            format!("hom {code}: pairwise {keeps_meets} vs levels {}", la.isometry_to_depth)
        });
    }
    t.finish()
}

/// Eventually-0 against eventually-1 binary points: every run is a partial
/// isometry covering both enumerations.
pub fn suite_back_and_forth(cfg: &SelftestConfig) -> SuiteReport {
    let mut t = Tally::new("back_and_forth");
    for r in 0..cfg.bnf_seeds as u64 {
        let seed = cfg.seed.wrapping_add(r);
        let oracles = || -> crate::Result<(EventuallyConstant, EventuallyConstant)> {
            Ok((
                EventuallyConstant::new(Alphabet::BINARY, 0, Some(seed))?,
                EventuallyConstant::new(Alphabet::BINARY, 1, Some(seed))?,
            ))
        };
        let (mut a, mut b) = oracles().expect("binary oracles");
        let map = match bnf_run(&mut a, &mut b, cfg.bnf_steps) {
            Ok(m) => m,
            Err(e) => {
                t.check(false, || format!("seed {seed}: {e}"));
                continue;
            }
        };
        t.check(check_isometry(&map).is_ok(), || format!("seed {seed}: not an isometry"));
        let (mut a, mut b) = oracles().expect("binary oracles");
        for i in 0..=cfg.bnf_steps {
            let ai = a.enumerate(i).expect("infinite");
            let bi = b.enumerate(i).expect("infinite");
            t.check(map.in_domain(&ai), || format!("seed {seed}: a_{i} = {ai} missed"));
            t.check(map.in_range(&bi), || format!("seed {seed}: b_{i} = {bi} missed"));
        }
    }
    t.finish()
}

/// Odd and even families over binary cells: the parity invariant holds and
/// no isometric pair exists either way.
pub fn suite_parity(cfg: &SelftestConfig) -> SuiteReport {
    let mut t = Tally::new("parity_families");
    let cells = cell_words_up_to(2, cfg.cell_depth);
    // enough free indices of either parity for per_cell points in the deepest cell
    let mut budget = cfg.cell_depth;
    let spec = loop {
        let spec = FamilySpec::new(Alphabet::BINARY, budget);
        let room = spec
            .capacity(Parity::Odd, cfg.cell_depth)
            .min(spec.capacity(Parity::Even, cfg.cell_depth));
        if room >= cfg.per_cell as u128 {
            break spec;
        }
        budget += 1;
    };
    let odd = gen_family(Parity::Odd, &cells, cfg.per_cell, spec, cfg.seed);
    let even = gen_family(Parity::Even, &cells, cfg.per_cell, spec, cfg.seed);
    let (odd, even) = match (odd, even) {
        (Ok(o), Ok(e)) => (o, e),
        (Err(e), _) | (_, Err(e)) => {
            t.check(false, || e.to_string());
            return t.finish();
        }
    };
    for fam in [&odd, &even] {
        for cell in &fam.cells {
            t.check(cell.points.len() == cfg.per_cell, || format!("cell {} is short", cell.s));
        }
        let bad = check_parity_invariant(fam);
        t.check(bad.is_none(), || format!("{:?} family: {:?}", fam.kind, bad));
    }
    for (src, dst) in [(&odd, &even), (&even, &odd)] {
        match certify_no_isometry(src, dst) {
            Ok(c) => t.check(c.holds(), || format!("{} isometric pairs", c.isometric_pairs)),
            Err(e) => t.check(false, || e.to_string()),
        }
    }
    t.finish()
}

fn random_sample<R: Rng>(rng: &mut R, depth: usize) -> BoundedDenseSample {
    let s_len = rng.gen_range(0..=3);
    let s = random_word(rng, 4, s_len);
    let count = rng.gen_range(1..=24);
    let points = (0..count)
        .map(|_| {
            let extra = rng.gen_range(0..=depth + 1 - s_len);
            Point::new(s.concat(&random_word(rng, 2, extra)), rng.gen_range(0..2))
        })
        .collect();
    BoundedDenseSample::new(s, points).expect("bounded by construction")
}

/// Slaloms read off random homomorphisms: total capture, per-sample width
/// `2^{n+1−|s|}`, and the merged slalom's `n·2^{n+1}` width with eventual
/// capture past each sample's rank.
pub fn suite_slaloms(cfg: &SelftestConfig) -> SuiteReport {
    let mut t = Tally::new("slalom_bounds");
    let mut rng = stream_rng(cfg.seed, Stream::Slaloms);
    let depth = cfg.slalom_depth;
    let mut batch: BTreeMap<Word, (Slalom, Vec<Word>)> = BTreeMap::new();
    for trial in 0..cfg.trials {
        let sample = random_sample(&mut rng, depth);
        let tree: WordTree = sample.points().iter().map(|x| x.prefix(depth)).collect();
        let h = if rng.gen_ratio(1, 4) {
            TreeHom::parity(Alphabet::Countable)
        } else {
            random_hom_on_tree(&mut rng, &tree, Alphabet::Countable, Alphabet::Countable, 1 << 20)
        };
        let phi = match slalom_from_hom(&h, &sample, depth) {
            Ok(p) => p,
            Err(e) => {
                t.check(false, || format!("trial {trial}: {e}"));
                continue;
            }
        };
        let images: Vec<Word> = sample
            .points()
            .iter()
            .map(|x| h.apply(&x.prefix(depth)).expect("defined on the sample"))
            .collect();
        for img in &images {
            t.check(captures_letters(&phi, img.letters(), depth, CaptureMode::Total), || {
                format!("trial {trial}: {img} escapes")
            });
        }
        for n in 0..depth {
            let width = phi.level(n).len() as u128;
            t.check(width <= sample_width_bound(sample.s().len(), 2, n), || {
                format!("trial {trial}: level {n} has {width} letters over s = {}", sample.s())
            });
        }
        batch.entry(sample.s().clone()).or_insert((phi, images));
        if batch.len() == 16 || trial + 1 == cfg.trials {
            check_merge(&mut t, &batch, depth);
            batch.clear();
        }
    }
    t.finish()
}

fn check_merge(t: &mut Tally, batch: &BTreeMap<Word, (Slalom, Vec<Word>)>, depth: usize) {
    let pieces: Vec<(Word, Slalom)> = batch.iter().map(|(s, (phi, _))| (s.clone(), phi.clone())).collect();
    let merged = merge_slaloms(&pieces);
    for n in 0..depth {
        let width = merged.level(n).len() as u128;
        t.check(width <= WidthProfile::NTimesPowTwo.at(n), || {
            format!("merged level {n} has {width} letters")
        });
    }
    let mut ranked: Vec<&Word> = batch.keys().collect();
    ranked.sort_by(|a, b| a.shortlex_cmp(b));
    for (rank, s) in ranked.into_iter().enumerate() {
        for img in &batch[s].1 {
            let ok = (rank + 1..depth).all(|n| merged.level(n).contains(&img.letters()[n]));
            t.check(ok, || format!("merged slalom misses {img} past {rank}"));
        }
    }
}

/// Images of width-bounded trees under random homomorphisms never widen.
pub fn suite_image_width(cfg: &SelftestConfig) -> SuiteReport {
    let mut t = Tally::new("image_width");
    let mut rng = stream_rng(cfg.seed, Stream::Trees);
    let c = WidthProfile::CeilLog2;
    for trial in 0..cfg.trials {
        let tree = random_width_tree(&mut rng, &c, cfg.tree_depth);
        let h = random_hom_on_tree(&mut rng, &tree, Alphabet::BINARY, Alphabet::BINARY, 2);
        let image = match hom_image_tree(&h, &tree) {
            Ok(i) => i,
            Err(e) => {
                t.check(false, || format!("trial {trial}: {e}"));
                continue;
            }
        };
        let (before, after) = (tree_width(&tree), tree_width(&image));
        for (n, (&b, &a)) in before.iter().zip(&after).enumerate() {
            t.check(a <= b, || format!("trial {trial} level {n}: {a} > {b}"));
        }
        t.check(width_check(&image, &c).iter().all(|&ok| ok), || {
            format!("trial {trial}: image exceeds the corset")
        });
    }
    t.finish()
}

fn union_is_condition(p: &Condition, q: &Condition) -> bool {
    let mut pairs: BTreeMap<&Point, &Point> = BTreeMap::new();
    for (a, b) in p.map().pairs().iter().chain(q.map().pairs()) {
        if pairs.insert(a, b).is_some_and(|old| old != b) {
            return false;
        }
    }
    let m = PartialMap::from_pairs(pairs.into_iter().map(|(a, b)| (a.clone(), b.clone()))).expect("distinct");
    is_condition(&m).is_ok()
}

fn largest_antichain(conds: &[Condition]) -> usize {
    let n = conds.len();
    let clash: Vec<u32> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && !union_is_condition(&conds[i], &conds[j]))
                .fold(0, |m, j| m | 1 << j)
        })
        .collect();
    (0u32..1 << n)
        .filter(|&mask| (0..n).all(|i| mask & (1 << i) == 0 || mask & !(1 << i) & !clash[i] == 0))
        .map(|mask| mask.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

/// Extension, compatibility against a union test, and antichain search
/// against exhaustive subset search.
pub fn suite_forcing(cfg: &SelftestConfig) -> SuiteReport {
    let mut t = Tally::new("forcing");
    let mut rng = stream_rng(cfg.seed, Stream::Conditions);
    for trial in 0..cfg.trials {
        let size = rng.gen_range(0..=4);
        let p = Condition::new(random_condition(&mut rng, size, 3, 3, Some(0), 100)).expect("random condition");
        let a = random_point_with_tail(&mut rng, 3, 4, Some(0));
        let b = random_point_with_tail(&mut rng, 3, 4, Some(0));
        let seed = cfg.seed.wrapping_add(trial as u64);
        let mut ao = EventuallyConstant::new(Alphabet::Countable, 0, Some(seed)).expect("oracle");
        let mut bo = EventuallyConstant::new(Alphabet::Countable, 0, Some(seed)).expect("oracle");
        match extend_condition(&p, &a, &b, &mut ao, &mut bo) {
            Ok(q) => {
                let ok = is_condition(q.map()).is_ok()
                    && p.map().is_restriction_of(q.map())
                    && q.map().in_domain(&a)
                    && q.map().in_range(&b);
                t.check(ok, || format!("trial {trial}: bad extension of {} by {a}, {b}", p.len()));
            }
            Err(e) => t.check(false, || format!("trial {trial}: {e}")),
        }
    }

    let mut rng = stream_rng(cfg.seed, Stream::Antichains);
    let small = |rng: &mut rand_chacha::ChaCha8Rng| {
        let size = rng.gen_range(0..=3);
        Condition::new(random_condition(rng, size, 2, 2, None, 40)).expect("random condition")
    };
    for i in 0..cfg.samples {
        let (p, q) = (small(&mut rng), small(&mut rng));
        let fast = compatible(&p, &q);
        t.check(fast == union_is_condition(&p, &q), || format!("pair {i}: compatible says {fast}"));
        t.check(fast == compatible(&q, &p), || format!("pair {i}: asymmetric"));
    }
    for f in 0..cfg.antichain_families {
        let n = rng.gen_range(1..=cfg.antichain_max);
        let family: Vec<Condition> = (0..n).map(|_| small(&mut rng)).collect();
        let report = find_antichain(&family, 1);
        let best = largest_antichain(&family);
        t.check(report.exact && report.members.len() == best, || {
            format!("family {f}: found {} of {best}", report.members.len())
        });
    }
    t.finish()
}

fn expand(stem: &[Letter], tail: Letter, len: usize) -> Vec<Letter> {
    (0..len).map(|i| stem.get(i).copied().unwrap_or(tail)).collect()
}

/// The strong triangle inequality, and canonical forms matching equality of
/// the underlying sequences.
pub fn suite_metric(cfg: &SelftestConfig) -> SuiteReport {
    let mut t = Tally::new("metric_core");
    let mut rng = stream_rng(cfg.seed, Stream::Metric);
    for i in 0..cfg.samples {
        let [x, y, z] = [0; 3].map(|_| random_point(&mut rng, 3, 6));
        let (xy, yz, xz) = (distance(&x, &y), distance(&y, &z), distance(&x, &z));
        t.check(xz >= xy.min(yz), || format!("triple {i}: {x}, {y}, {z}"));
        t.check(xy == distance(&y, &x), || format!("triple {i}: asymmetric"));
        t.check((xy == LogDistance::Infinite) == (x == y), || format!("triple {i}: zero distance"));

        let raw = |rng: &mut rand_chacha::ChaCha8Rng| {
            let tail = rng.gen_range(0..2);
            let len = rng.gen_range(0..=4);
            let mut stem = random_word(rng, 2, len).letters().to_vec();
            stem.extend(std::iter::repeat_n(tail, rng.gen_range(0..=3)));
            (stem, tail)
        };
        let (u, v) = (raw(&mut rng), raw(&mut rng));
        let len = u.0.len().max(v.0.len()) + 1;
        let (eu, ev) = (expand(&u.0, u.1, len), expand(&v.0, v.1, len));
        let (pu, pv) = (Point::new(u.0.clone(), u.1), Point::new(v.0.clone(), v.1));
        t.check((eu == ev) == (pu == pv), || format!("pair {i}: {pu} vs {pv}"));
        let first_diff = eu.iter().zip(&ev).position(|(a, b)| a != b);
        let expected = first_diff.map_or(LogDistance::Infinite, LogDistance::Exponent);
        t.check(distance(&pu, &pv) == expected, || format!("pair {i}: distance of {pu}, {pv}"));
    }
    t.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_selftest_passes_and_repeats() {
        let a = run_selftest(&SelftestConfig::quick(3));
        for s in &a.suites {
            assert!(s.passed, "{s:?}");
        }
        assert_eq!(a, run_selftest(&SelftestConfig::quick(3)));
    }
}

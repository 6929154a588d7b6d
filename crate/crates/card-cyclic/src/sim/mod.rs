//! Seeded large-`n` Monte Carlo.
//!
//! Every estimator is embarrassingly parallel over samples, and sample `i`
//! always draws from stream `i` of the configured seed, so results are
//! identical whatever the worker count — and with the sequential fallback.
//! The exact tables of [`crate::exact`] are the oracles for every estimator
//! at small `n`.

mod fenwick;
pub mod sampler;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::Error;
use crate::exact::{exact_prob, uniform_event_prob, EventSpec, TvDistance};
use crate::exec;
use crate::paths::{all_permutations, factorial, rank_of_permutation};
use crate::rng::StreamRng;
use crate::Result;
use sampler::CyclicSampler;

/// Deck sizes for which the convolution walk is computed exactly.
pub const EXACT_WALK_LIMIT: usize = 5;

/// Most cards a joint sample can track at once.
pub const MAX_JOINT_CARDS: usize = 8;

/// What a histogram's outcomes mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HistKind {
    /// Final 1-based position of a fixed card.
    PositionOfCard(u32),
    /// Number of the card in the first position.
    FirstCard,
    /// Number of the card in the last position.
    LastCard,
}

impl HistKind {
    pub fn label(&self) -> String {
        match self {
            HistKind::PositionOfCard(c) => format!("position_of_card_{c}"),
            HistKind::FirstCard => "first_card".to_string(),
            HistKind::LastCard => "last_card".to_string(),
        }
    }
}

/// Empirical counts over the outcomes `1..=n` of `reps` seeded shuffles.
#[derive(Debug, Clone)]
pub struct Histogram {
    pub n: usize,
    pub kind: HistKind,
    pub bins: Vec<u64>,
    pub reps: u64,
    pub seed: u64,
    /// Window width (in outcomes) recommended for pointwise-limit reads;
    /// `√n` by construction.
    pub smoothing_window: usize,
}

impl Histogram {
    fn new(n: usize, kind: HistKind, bins: Vec<u64>, reps: u64, seed: u64) -> Self {
        debug_assert_eq!(bins.iter().sum::<u64>(), reps);
        Histogram {
            n,
            kind,
            bins,
            reps,
            seed,
            smoothing_window: (n as f64).sqrt().floor() as usize,
        }
    }

    pub fn fraction(&self, outcome: usize) -> f64 {
        self.bins[outcome - 1] as f64 / self.reps as f64
    }

    /// Binomial standard error of one bin fraction.
    pub fn stderr(&self, outcome: usize) -> f64 {
        let p = self.fraction(outcome);
        (p * (1.0 - p) / self.reps as f64).sqrt()
    }

    /// Empirical CDF at `outcome`.
    pub fn cdf(&self, outcome: usize) -> f64 {
        let c: u64 = self.bins[..outcome].iter().sum();
        c as f64 / self.reps as f64
    }

    /// Average bin fraction over the stored smoothing window centered at
    /// `outcome`, clipped to the support.
    pub fn smoothed_fraction(&self, outcome: usize) -> f64 {
        let half = self.smoothing_window / 2;
        let lo = outcome.saturating_sub(half).max(1);
        let hi = (outcome + half).min(self.n);
        let c: u64 = self.bins[lo - 1..hi].iter().sum();
        c as f64 / (self.reps as f64 * (hi - lo + 1) as f64)
    }

    /// `sup_k |CDF̂(k) - target(k)|` over all outcomes.
    pub fn sup_cdf_distance(&self, target: impl Fn(usize) -> f64) -> f64 {
        let mut acc = 0u64;
        let mut sup: f64 = 0.0;
        for k in 1..=self.n {
            acc += self.bins[k - 1];
            let diff = (acc as f64 / self.reps as f64 - target(k)).abs();
            sup = sup.max(diff);
        }
        sup
    }

    /// CSV export: `outcome,count,fraction,stderr`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("outcome,count,fraction,stderr\n");
        for k in 1..=self.n {
            out.push_str(&format!(
                "{k},{},{},{}\n",
                self.bins[k - 1],
                self.fraction(k),
                self.stderr(k)
            ));
        }
        out
    }

    /// JSON export with the full sampling config echoed back.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<_> = (1..=self.n)
            .map(|k| {
                serde_json::json!({
                    "outcome": k,
                    "count": self.bins[k - 1],
                    "fraction": self.fraction(k),
                    "stderr": self.stderr(k),
                })
            })
            .collect();
        serde_json::json!({
            "config": {
                "n": self.n,
                "kind": self.kind.label(),
                "reps": self.reps,
                "seed": self.seed,
                "smoothing_window": self.smoothing_window,
            },
            "rows": rows,
        })
    }
}

struct TallyAcc {
    bins: Vec<u64>,
    sampler: CyclicSampler,
    word: Vec<u32>,
}

fn hist_impl(
    n: usize,
    kind: HistKind,
    reps: u64,
    seed: u64,
    parallel: bool,
    outcome: impl Fn(&[u32]) -> usize + Sync + Send,
) -> Histogram {
    let new_acc = || TallyAcc {
        bins: vec![0u64; n],
        sampler: CyclicSampler::new(n),
        word: Vec::with_capacity(n),
    };
    let step = |acc: &mut TallyAcc, i: u64| {
        acc.sampler.sample(seed, i, &mut acc.word);
        acc.bins[outcome(&acc.word) - 1] += 1;
    };
    let merge = |mut a: TallyAcc, b: TallyAcc| {
        a.bins = exec::add_counts(a.bins, b.bins);
        a
    };
    let acc = if parallel {
        exec::map_reduce(reps, new_acc, step, merge)
    } else {
        exec::map_reduce_seq(reps, new_acc, step)
    };
    Histogram::new(n, kind, acc.bins, reps, seed)
}

fn check_card(n: usize, card: u32) -> Result<()> {
    if card == 0 || card as usize > n {
        return Err(Error::invalid(format!("card {card} outside 1..={n}")));
    }
    Ok(())
}

/// Empirical law of the final position of card `card` over `reps` shuffles
/// from the identity.
pub fn sample_position_hist(n: usize, card: u32, reps: u64, seed: u64) -> Result<Histogram> {
    check_card(n, card)?;
    Ok(hist_impl(
        n,
        HistKind::PositionOfCard(card),
        reps,
        seed,
        true,
        move |word| word.iter().position(|&c| c == card).unwrap() + 1,
    ))
}

/// Sequential twin of [`sample_position_hist`] for back-end comparison.
pub fn sample_position_hist_seq(n: usize, card: u32, reps: u64, seed: u64) -> Result<Histogram> {
    check_card(n, card)?;
    Ok(hist_impl(
        n,
        HistKind::PositionOfCard(card),
        reps,
        seed,
        false,
        move |word| word.iter().position(|&c| c == card).unwrap() + 1,
    ))
}

/// Empirical law of the first card's number.
pub fn sample_first_card_hist(n: usize, reps: u64, seed: u64) -> Result<Histogram> {
    if n == 0 {
        return Err(Error::invalid("deck size must be positive"));
    }
    Ok(hist_impl(
        n,
        HistKind::FirstCard,
        reps,
        seed,
        true,
        |word| word[0] as usize,
    ))
}

/// Empirical law of the last card's number.
pub fn sample_last_card_hist(n: usize, reps: u64, seed: u64) -> Result<Histogram> {
    if n == 0 {
        return Err(Error::invalid("deck size must be positive"));
    }
    Ok(hist_impl(n, HistKind::LastCard, reps, seed, true, |word| {
        word[word.len() - 1] as usize
    }))
}

/// Joint empirical law of the final positions of a fixed card set.
#[derive(Debug, Clone)]
pub struct JointPositions {
    pub n: usize,
    pub cards: Vec<u32>,
    pub reps: u64,
    pub seed: u64,
    /// Row-major `reps × cards.len()` positions.
    positions: Vec<u32>,
}

/// Sample the joint final positions of `cards` (all distinct).
pub fn joint_position_sample(
    n: usize,
    cards: &[u32],
    reps: u64,
    seed: u64,
) -> Result<JointPositions> {
    if cards.is_empty() || cards.len() > MAX_JOINT_CARDS {
        return Err(Error::invalid(format!(
            "joint sample tracks 1..={MAX_JOINT_CARDS} cards, got {}",
            cards.len()
        )));
    }
    for &c in cards {
        check_card(n, c)?;
    }
    let mut sorted = cards.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != cards.len() {
        return Err(Error::invalid("joint sample cards must be distinct"));
    }

    let m = cards.len();
    struct JointAcc {
        rows: Vec<(u64, [u32; MAX_JOINT_CARDS])>,
        sampler: CyclicSampler,
        word: Vec<u32>,
    }
    let new_acc = || JointAcc {
        rows: Vec::new(),
        sampler: CyclicSampler::new(n),
        word: Vec::with_capacity(n),
    };
    let step = |acc: &mut JointAcc, i: u64| {
        acc.sampler.sample(seed, i, &mut acc.word);
        let mut row = [0u32; MAX_JOINT_CARDS];
        for (pos, &c) in acc.word.iter().enumerate() {
            if let Some(slot) = cards.iter().position(|&want| want == c) {
                row[slot] = pos as u32 + 1;
            }
        }
        acc.rows.push((i, row));
    };
    let merge = |mut a: JointAcc, mut b: JointAcc| {
        a.rows.append(&mut b.rows);
        a
    };
    let mut acc = exec::map_reduce(reps, new_acc, step, merge);
    acc.rows.sort_unstable_by_key(|r| r.0);
    let mut positions = Vec::with_capacity(reps as usize * m);
    for (_, row) in &acc.rows {
        positions.extend_from_slice(&row[..m]);
    }
    Ok(JointPositions {
        n,
        cards: cards.to_vec(),
        reps,
        seed,
        positions,
    })
}

impl JointPositions {
    fn column(&self, idx: usize) -> impl Iterator<Item = u32> + '_ {
        let m = self.cards.len();
        self.positions[idx..].iter().step_by(m).copied()
    }

    /// Marginal histogram of one tracked card's position.
    pub fn marginal_hist(&self, idx: usize) -> Histogram {
        let mut bins = vec![0u64; self.n];
        for p in self.column(idx) {
            bins[p as usize - 1] += 1;
        }
        Histogram::new(
            self.n,
            HistKind::PositionOfCard(self.cards[idx]),
            bins,
            self.reps,
            self.seed,
        )
    }

    /// Fraction of samples in which card `i` ends left of card `j` (the
    /// complement of the pair forming an inversion).
    pub fn order_fraction(&self, i: usize, j: usize) -> f64 {
        let m = self.cards.len();
        let hits = self
            .positions
            .chunks_exact(m)
            .filter(|row| row[i] < row[j])
            .count();
        hits as f64 / self.reps as f64
    }

    /// `sup |F̂_{ij}(x, y) - F̂_i(x) F̂_j(y)|` over a full-resolution grid,
    /// maximized over all tracked pairs; the independence diagnostic.
    pub fn independence_sup_distance(&self) -> f64 {
        let m = self.cards.len();
        let mut worst: f64 = 0.0;
        for i in 0..m {
            for j in i + 1..m {
                worst = worst.max(self.pair_sup_distance(i, j));
            }
        }
        worst
    }

    fn pair_sup_distance(&self, i: usize, j: usize) -> f64 {
        let g = self.n.min(2048);
        let bucket = |pos: u32| ((pos as u64 - 1) * g as u64 / self.n as u64) as usize;
        let m = self.cards.len();
        let mut grid = vec![0u32; g * g];
        for row in self.positions.chunks_exact(m) {
            grid[bucket(row[i]) * g + bucket(row[j])] += 1;
        }
        // joint CDF by 2-d prefix sums, in place
        for r in 0..g {
            for c in 1..g {
                grid[r * g + c] += grid[r * g + c - 1];
            }
        }
        for c in 0..g {
            for r in 1..g {
                grid[r * g + c] += grid[(r - 1) * g + c];
            }
        }
        let total = self.reps as f64;
        let mut sup: f64 = 0.0;
        for r in 0..g {
            let fi = grid[r * g + g - 1] as f64 / total;
            for c in 0..g {
                let fj = grid[(g - 1) * g + c] as f64 / total;
                let joint = grid[r * g + c] as f64 / total;
                sup = sup.max((joint - fi * fj).abs());
            }
        }
        sup
    }
}

/// Monte Carlo estimate of the shuffle mass of an [`EventSpec`], paired with
/// its exact uniform mass.
#[derive(Debug, Clone)]
pub struct EventEstimate {
    pub n: usize,
    pub spec: EventSpec,
    pub reps: u64,
    pub seed: u64,
    pub hits: u64,
    /// Closed-form mass of the same event under the uniform measure.
    pub uniform: f64,
}

impl EventEstimate {
    pub fn fraction(&self) -> f64 {
        self.hits as f64 / self.reps as f64
    }

    pub fn stderr(&self) -> f64 {
        let p = self.fraction();
        (p * (1.0 - p) / self.reps as f64).sqrt()
    }

    /// The total-variation witness `p̂(A) - U(A)`.
    pub fn gap(&self) -> f64 {
        self.fraction() - self.uniform
    }
}

fn estimate_event_impl(
    n: usize,
    spec: EventSpec,
    reps: u64,
    seed: u64,
    parallel: bool,
) -> Result<EventEstimate> {
    spec.validate_for(n)?;
    let uniform = uniform_event_prob(n, &spec)?.as_f64();
    let cutoff = spec.card_cutoff(n) as u32;
    let l = spec.l;
    struct EventAcc {
        hits: u64,
        sampler: CyclicSampler,
        word: Vec<u32>,
    }
    let new_acc = || EventAcc {
        hits: 0,
        sampler: CyclicSampler::new(n),
        word: Vec::with_capacity(n),
    };
    let step = |acc: &mut EventAcc, i: u64| {
        acc.sampler.sample(seed, i, &mut acc.word);
        if acc.word[..l].iter().any(|&c| c <= cutoff) {
            acc.hits += 1;
        }
    };
    let merge = |mut a: EventAcc, b: EventAcc| {
        a.hits += b.hits;
        a
    };
    let acc = if parallel {
        exec::map_reduce(reps, new_acc, step, merge)
    } else {
        exec::map_reduce_seq(reps, new_acc, step)
    };
    Ok(EventEstimate {
        n,
        spec,
        reps,
        seed,
        hits: acc.hits,
        uniform,
    })
}

/// Estimate `p(A)` for the event "a card numbered at most `M√n` ends in the
/// first `L` positions".
pub fn estimate_event_a(n: usize, m: f64, l: usize, reps: u64, seed: u64) -> Result<EventEstimate> {
    estimate_event_impl(n, EventSpec::new(m, l)?, reps, seed, true)
}

/// Sequential twin of [`estimate_event_a`] for back-end comparison.
pub fn estimate_event_a_seq(
    n: usize,
    m: f64,
    l: usize,
    reps: u64,
    seed: u64,
) -> Result<EventEstimate> {
    estimate_event_impl(n, EventSpec::new(m, l)?, reps, seed, false)
}

/// Configuration of the repeated-shuffle random walk.
#[derive(Debug, Clone)]
pub struct WalkConfig {
    pub n: usize,
    /// Number of convolution steps reported.
    pub steps: usize,
    /// Samples per step for the Monte Carlo lower bound (ignored when the
    /// walk is exact).
    pub reps: u64,
    pub seed: u64,
    /// Fixed event statistics `(M, L)` feeding the TV lower bound.
    pub events: Vec<(f64, usize)>,
    /// Rescaled card pair whose inversion indicator joins the statistic
    /// family.
    pub pair: Option<(f64, f64)>,
}

impl WalkConfig {
    pub fn new(n: usize, steps: usize, reps: u64, seed: u64) -> Self {
        let events = [(1.0, 3usize), (2.0, 12)]
            .into_iter()
            .filter(|&(_, l)| l < n)
            .collect();
        let pair = if n >= 5 { Some((0.2, 0.8)) } else { None };
        WalkConfig {
            n,
            steps,
            reps,
            seed,
            events,
            pair,
        }
    }
}

/// One m-value of the Monte Carlo TV lower bound.
#[derive(Debug, Clone)]
pub struct BoundRow {
    pub m: usize,
    /// `max_S |p̂_m(S) - U(S)|` over the statistic family.
    pub lower_bound: f64,
    pub stderr: f64,
    /// Which statistic attained the bound.
    pub statistic: String,
}

/// Exact TV distances per convolution step, for small decks.
#[derive(Debug, Clone)]
pub struct ExactWalk {
    pub n: usize,
    /// `tv[m-1]` is the exact distance after `m` shuffles.
    pub tv: Vec<TvDistance>,
}

/// Monte Carlo TV lower bounds per convolution step. Exploratory: the bound
/// is only as good as the fixed statistic family.
#[derive(Debug, Clone)]
pub struct BoundWalk {
    pub n: usize,
    pub steps: usize,
    pub reps: u64,
    pub seed: u64,
    pub rows: Vec<BoundRow>,
}

/// Result of [`convolution_walk`].
#[derive(Debug, Clone)]
pub enum WalkReport {
    Exact(ExactWalk),
    Bound(BoundWalk),
}

/// Distance to uniform of the m-fold repeated shuffle: exact convolution
/// over `S_n` for `n <= 5`, otherwise a seeded lower-bound estimate.
pub fn convolution_walk(config: &WalkConfig) -> Result<WalkReport> {
    if config.n == 0 {
        return Err(Error::invalid("deck size must be positive"));
    }
    if config.steps == 0 {
        return Err(Error::invalid("walk needs at least one step"));
    }
    if config.n <= EXACT_WALK_LIMIT {
        Ok(WalkReport::Exact(exact_walk(config.n, config.steps)))
    } else {
        Ok(WalkReport::Bound(bound_walk(config)?))
    }
}

fn exact_walk(n: usize, steps: usize) -> ExactWalk {
    let perms = all_permutations(n);
    let count = perms.len();
    let base: Vec<BigRational> = perms.iter().map(|p| exact_prob(p).as_rational()).collect();
    // transition lookup: rank of σ^{-1} ∘ τ
    let comp: Vec<Vec<usize>> = perms
        .iter()
        .map(|s| {
            let s_inv = s.inverse();
            perms
                .iter()
                .map(|t| rank_of_permutation(&s_inv.compose(t)))
                .collect()
        })
        .collect();
    let uniform = BigRational::new(1.into(), factorial(n).into());
    let tv_of = |mu: &[BigRational]| -> TvDistance {
        let mut acc = BigRational::zero();
        for p in mu {
            let d = p - &uniform;
            acc += if d < BigRational::zero() { -d } else { d };
        }
        let exact = acc / BigRational::from_integer(2.into());
        let float = exact.to_f64().unwrap_or(f64::NAN);
        TvDistance { exact, float }
    };
    let mut mu = base.clone();
    let mut tv = vec![tv_of(&mu)];
    for _ in 2..=steps {
        let mut next = vec![BigRational::zero(); count];
        for s in 0..count {
            if mu[s].is_zero() {
                continue;
            }
            for t in 0..count {
                let inc = &mu[s] * &base[comp[s][t]];
                next[t] += inc;
            }
        }
        mu = next;
        debug_assert!(mu.iter().sum::<BigRational>().is_one());
        tv.push(tv_of(&mu));
    }
    ExactWalk { n, tv }
}

enum WalkStat {
    Event {
        cutoff: u32,
        l: usize,
        uniform: f64,
        label: String,
    },
    Pair {
        c1: u32,
        c2: u32,
        label: String,
    },
}

impl WalkStat {
    fn uniform(&self) -> f64 {
        match self {
            WalkStat::Event { uniform, .. } => *uniform,
            // distinct positions are exchangeable under the uniform measure
            WalkStat::Pair { .. } => 0.5,
        }
    }

    fn label(&self) -> &str {
        match self {
            WalkStat::Event { label, .. } | WalkStat::Pair { label, .. } => label,
        }
    }

    fn holds(&self, word: &[u32]) -> bool {
        match *self {
            WalkStat::Event { cutoff, l, .. } => word[..l].iter().any(|&c| c <= cutoff),
            WalkStat::Pair { c1, c2, .. } => {
                for &c in word {
                    if c == c1 {
                        return true;
                    }
                    if c == c2 {
                        return false;
                    }
                }
                unreachable!("both cards are in the deck")
            }
        }
    }
}

fn bound_walk(config: &WalkConfig) -> Result<BoundWalk> {
    let n = config.n;
    let mut stats = Vec::new();
    for &(m, l) in &config.events {
        let spec = EventSpec::new(m, l)?;
        spec.validate_for(n)?;
        stats.push(WalkStat::Event {
            cutoff: spec.card_cutoff(n) as u32,
            l,
            uniform: uniform_event_prob(n, &spec)?.as_f64(),
            label: format!("event(M={m},L={l})"),
        });
    }
    if let Some((b1, b2)) = config.pair {
        let c1 = ((b1 * n as f64).floor() as u32).clamp(1, n as u32);
        let c2 = ((b2 * n as f64).floor() as u32).clamp(1, n as u32);
        if c1 != c2 {
            stats.push(WalkStat::Pair {
                c1,
                c2,
                label: format!("pair({c1}<{c2})"),
            });
        }
    }
    if stats.is_empty() {
        return Err(Error::invalid("walk statistic family is empty"));
    }

    let steps = config.steps;
    let n_stats = stats.len();
    let seed = config.seed;
    struct WalkAcc {
        counts: Vec<u64>, // steps × n_stats
        sampler: CyclicSampler,
        cur: Vec<u32>,
        xi: Vec<u32>,
        next: Vec<u32>,
    }
    let new_acc = || WalkAcc {
        counts: vec![0u64; steps * n_stats],
        sampler: CyclicSampler::new(n),
        cur: Vec::with_capacity(n),
        xi: Vec::with_capacity(n),
        next: Vec::with_capacity(n),
    };
    let stats_ref = &stats;
    let step_fn = |acc: &mut WalkAcc, rep: u64| {
        let mut rng = StreamRng::new(seed, rep);
        acc.cur.clear();
        acc.cur.extend(1..=n as u32);
        for m in 0..steps {
            // one more shuffle: the walk composes the current word with an
            // identity-started sample
            acc.sampler.sample_with(&mut rng, &mut acc.xi);
            acc.next.clear();
            acc.next
                .extend(acc.xi.iter().map(|&c| acc.cur[c as usize - 1]));
            std::mem::swap(&mut acc.cur, &mut acc.next);
            for (s, stat) in stats_ref.iter().enumerate() {
                if stat.holds(&acc.cur) {
                    acc.counts[m * n_stats + s] += 1;
                }
            }
        }
    };
    let merge = |mut a: WalkAcc, b: WalkAcc| {
        a.counts = exec::add_counts(a.counts, b.counts);
        a
    };
    let acc = exec::map_reduce(config.reps, new_acc, step_fn, merge);

    let rows = (0..steps)
        .map(|m| {
            let mut best = 0usize;
            let mut best_gap = -1.0f64;
            for (s, stat) in stats.iter().enumerate() {
                let p = acc.counts[m * n_stats + s] as f64 / config.reps as f64;
                let gap = (p - stat.uniform()).abs();
                if gap > best_gap {
                    best_gap = gap;
                    best = s;
                }
            }
            let p = acc.counts[m * n_stats + best] as f64 / config.reps as f64;
            BoundRow {
                m: m + 1,
                lower_bound: best_gap,
                stderr: (p * (1.0 - p) / config.reps as f64).sqrt(),
                statistic: stats[best].label().to_string(),
            }
        })
        .collect();
    Ok(BoundWalk {
        n,
        steps,
        reps: config.reps,
        seed,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{brute_force_dist, event_prob, exact_dist};

    #[test]
    fn single_card_all_mass_at_one() {
        let h = sample_position_hist(1, 1, 500, 3).unwrap();
        assert_eq!(h.bins, vec![500]);
    }

    #[test]
    fn histograms_are_deterministic_and_backend_free() {
        let a = sample_position_hist(40, 7, 4000, 11).unwrap();
        let b = sample_position_hist(40, 7, 4000, 11).unwrap();
        assert_eq!(a.bins, b.bins);
        let c = sample_position_hist_seq(40, 7, 4000, 11).unwrap();
        assert_eq!(a.bins, c.bins);
        let d = sample_position_hist(40, 7, 4000, 12).unwrap();
        assert_ne!(a.bins, d.bins);
    }

    #[test]
    fn position_hist_matches_exact_oracle_n3() {
        let reps = 200_000u64;
        let table = exact_dist(3).unwrap();
        let h = sample_position_hist(3, 2, reps, 99).unwrap();
        for pos in 1..=3 {
            let exact = table.position_of_card_marginal(2, pos).as_f64();
            let diff = (h.fraction(pos) - exact).abs();
            assert!(diff <= 4.0 * h.stderr(pos).max(1e-4), "pos={pos}: {diff}");
        }
    }

    #[test]
    fn first_last_hists_match_exact_oracle_n3() {
        let reps = 200_000u64;
        let first = sample_first_card_hist(3, reps, 5).unwrap();
        let last = sample_last_card_hist(3, reps, 5).unwrap();
        for (j, expect) in [(1usize, 10.0 / 27.0), (2, 8.0 / 27.0), (3, 9.0 / 27.0)] {
            let diff = (first.fraction(j) - expect).abs();
            assert!(diff <= 4.0 * first.stderr(j), "first j={j}: {diff}");
        }
        for (j, expect) in [(1usize, 8.0 / 27.0), (2, 10.0 / 27.0), (3, 9.0 / 27.0)] {
            let diff = (last.fraction(j) - expect).abs();
            assert!(diff <= 4.0 * last.stderr(j), "last j={j}: {diff}");
        }
    }

    #[test]
    fn card_n_position_uniform_empirically() {
        let n = 25usize;
        let reps = 100_000u64;
        let h = sample_position_hist(n, n as u32, reps, 21).unwrap();
        for pos in 1..=n {
            let diff = (h.fraction(pos) - 1.0 / n as f64).abs();
            assert!(diff <= 4.0 * h.stderr(pos), "pos={pos}: {diff}");
        }
    }

    #[test]
    fn smoothed_first_card_tracks_macroscopic_limit() {
        let n = 400usize;
        let reps = 100_000u64;
        let h = sample_first_card_hist(n, reps, 17).unwrap();
        assert_eq!(h.smoothing_window, 20);
        let j = n / 2;
        let rescaled = n as f64 * h.smoothed_fraction(j);
        let target = (-0.5f64).exp();
        assert!(
            (rescaled - target).abs() / target < 0.08,
            "{rescaled} vs {target}"
        );
    }

    #[test]
    fn joint_sample_validation() {
        assert!(joint_position_sample(10, &[], 10, 0).is_err());
        assert!(joint_position_sample(10, &[3, 3], 10, 0).is_err());
        assert!(joint_position_sample(10, &[0], 10, 0).is_err());
        assert!(joint_position_sample(10, &[11], 10, 0).is_err());
    }

    #[test]
    fn joint_marginal_reduces_to_position_hist() {
        let joint = joint_position_sample(30, &[4], 5000, 8).unwrap();
        let direct = sample_position_hist(30, 4, 5000, 8).unwrap();
        assert_eq!(joint.marginal_hist(0).bins, direct.bins);
    }

    #[test]
    fn event_estimate_matches_exact_oracle_n3() {
        let reps = 100_000u64;
        let est = estimate_event_a(3, 1.0, 1, reps, 31).unwrap();
        let table = brute_force_dist(3).unwrap();
        let exact = event_prob(&est.spec, &table).unwrap().as_f64();
        let diff = (est.fraction() - exact).abs();
        assert!(diff <= 4.0 * est.stderr(), "{diff}");
        // and the uniform side is the closed form
        let direct = 1.0 - (1..=1).map(|_| 2.0 / 3.0).product::<f64>();
        assert!((est.uniform - direct).abs() < 1e-12);
    }

    #[test]
    fn event_estimate_full_event() {
        let est = estimate_event_a(5, 3.0, 4, 2000, 1).unwrap();
        assert_eq!(est.hits, 2000);
        assert!((est.fraction() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn event_estimate_backends_agree() {
        let a = estimate_event_a(50, 1.0, 5, 3000, 7).unwrap();
        let b = estimate_event_a_seq(50, 1.0, 5, 3000, 7).unwrap();
        assert_eq!(a.hits, b.hits);
    }

    #[test]
    fn exact_walk_n3_starts_at_known_tv_and_mixes() {
        let config = WalkConfig::new(3, 12, 0, 0);
        let WalkReport::Exact(walk) = convolution_walk(&config).unwrap() else {
            panic!("n=3 walks are exact");
        };
        assert_eq!(walk.tv[0].exact, BigRational::new(1.into(), 18.into()));
        for w in walk.tv.windows(2) {
            assert!(w[1].exact <= w[0].exact, "TV must not increase");
        }
        assert!(walk.tv[11].float < walk.tv[0].float / 100.0);
    }

    #[test]
    fn exact_walk_n2_is_immediately_uniform() {
        let config = WalkConfig::new(2, 3, 0, 0);
        let WalkReport::Exact(walk) = convolution_walk(&config).unwrap() else {
            panic!("n=2 walks are exact");
        };
        for tv in &walk.tv {
            assert!(tv.exact.is_zero());
        }
    }

    #[test]
    fn bound_walk_decays() {
        let config = WalkConfig::new(60, 10, 2000, 5);
        let WalkReport::Bound(walk) = convolution_walk(&config).unwrap() else {
            panic!("n=60 walks are estimated");
        };
        assert_eq!(walk.rows.len(), 10);
        for row in &walk.rows {
            assert!(row.lower_bound >= 0.0 && row.lower_bound <= 1.0);
        }
        let first = walk.rows[0].lower_bound;
        let last = walk.rows[9].lower_bound;
        assert!(
            last <= first + 0.05,
            "lower bound should not grow: {first} -> {last}"
        );
    }

    #[test]
    fn csv_and_json_exports() {
        let h = sample_position_hist(4, 2, 1000, 9).unwrap();
        let csv = h.to_csv();
        assert!(csv.starts_with("outcome,count,fraction,stderr\n"));
        assert_eq!(csv.lines().count(), 5);
        let json = h.to_json();
        assert_eq!(json["config"]["n"], 4);
        assert_eq!(json["config"]["kind"], "position_of_card_2");
        assert_eq!(json["rows"].as_array().unwrap().len(), 4);
    }
}

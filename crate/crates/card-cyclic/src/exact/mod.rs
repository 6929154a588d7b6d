//! Exact finite-`n` distribution theory.
//!
//! The probability of reaching deck `σ` from the identity in one shuffle is
//! `N(l(σ)) / n^n`, where `N` counts nondecreasing l-paths. This module pairs
//! that formula with a brute-force oracle over all `n^n` plans, closed-form
//! first/last-position marginals, the two classical distances to uniform,
//! the order-reversal identity, and the randomized-removal-order variant.

mod marginals;

pub use marginals::{first_pos_prob, last_pos_prob, power_sum, MarginalProb, EXACT_MARGINAL_LIMIT};

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;
use crate::exec;
use crate::paths::{all_permutations, binomial, count_paths, factorial, permutation_at_rank};
use crate::perm::{l_vector, Permutation};
use crate::Result;

/// Deck sizes accepted by the `n^n`-plan brute force.
pub const BRUTE_FORCE_LIMIT: usize = 8;

/// Deck sizes accepted by the order-reversal brute force.
pub const ORDER_REVERSAL_LIMIT: usize = 7;

/// Deck sizes accepted by the randomized-order variant (`n! * n^n` plans).
pub const RANDOMIZED_ORDER_LIMIT: usize = 5;

/// An exact probability `numerator / denominator` with a float projection.
#[derive(Debug, Clone)]
pub struct ExactProb {
    pub numerator: BigUint,
    pub denominator: BigUint,
}

impl ExactProb {
    pub fn new(numerator: BigUint, denominator: BigUint) -> Self {
        debug_assert!(!denominator.is_zero());
        ExactProb {
            numerator,
            denominator,
        }
    }

    pub fn as_rational(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.numerator.clone()),
            BigInt::from(self.denominator.clone()),
        )
    }

    pub fn as_f64(&self) -> f64 {
        self.as_rational().to_f64().unwrap_or(f64::NAN)
    }
}

impl PartialEq for ExactProb {
    /// Equality by cross-multiplication; fractions need not be reduced.
    fn eq(&self, other: &Self) -> bool {
        &self.numerator * &other.denominator == &other.numerator * &self.denominator
    }
}

impl Eq for ExactProb {}

impl std::fmt::Display for ExactProb {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

/// Full distribution over `S_n`, keyed in lexicographic order.
#[derive(Debug, Clone)]
pub struct DistributionTable {
    n: usize,
    denominator: BigUint,
    entries: BTreeMap<Permutation, BigUint>,
}

impl DistributionTable {
    pub fn n(&self) -> usize {
        self.n
    }

    /// The common denominator of all entries (`n^n`, or `n! * n^n` for the
    /// randomized-order variant).
    pub fn denominator(&self) -> &BigUint {
        &self.denominator
    }

    pub fn prob(&self, p: &Permutation) -> ExactProb {
        let num = self.entries.get(p).cloned().unwrap_or_else(BigUint::zero);
        ExactProb::new(num, self.denominator.clone())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Permutation, ExactProb)> {
        self.entries
            .iter()
            .map(|(p, num)| (p, ExactProb::new(num.clone(), self.denominator.clone())))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Exact total mass; `1` for every well-formed table.
    pub fn total_mass(&self) -> BigRational {
        let sum: BigUint = self.entries.values().sum();
        BigRational::new(BigInt::from(sum), BigInt::from(self.denominator.clone()))
    }

    /// Marginal `P(σ_pos = card)`, summed exactly.
    pub fn card_at_position_marginal(&self, pos: usize, card: u32) -> ExactProb {
        let num = self
            .entries
            .iter()
            .filter(|(p, _)| p.card_at(pos) == card)
            .map(|(_, c)| c)
            .sum();
        ExactProb::new(num, self.denominator.clone())
    }

    /// Marginal `P(position of card = pos)`, summed exactly.
    pub fn position_of_card_marginal(&self, card: u32, pos: usize) -> ExactProb {
        let num = self
            .entries
            .iter()
            .filter(|(p, _)| p.position_of(card) == pos)
            .map(|(_, c)| c)
            .sum();
        ExactProb::new(num, self.denominator.clone())
    }

    /// CSV export: `permutation,numerator,denominator,float`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("permutation,numerator,denominator,float\n");
        for (p, prob) in self.iter() {
            out.push_str(&format!(
                "{p},{},{},{}\n",
                prob.numerator,
                prob.denominator,
                prob.as_f64()
            ));
        }
        out
    }

    /// JSON export: one object with `config` and `rows` keys.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<_> = self
            .iter()
            .map(|(p, prob)| {
                serde_json::json!({
                    "permutation": p.to_string(),
                    "numerator": prob.numerator.to_string(),
                    "denominator": prob.denominator.to_string(),
                    "float": prob.as_f64(),
                })
            })
            .collect();
        serde_json::json!({
            "config": { "n": self.n, "denominator": self.denominator.to_string() },
            "rows": rows,
        })
    }
}

/// `P(id -> σ)` in one shuffle: the path count of `l(σ)` over `n^n`.
pub fn exact_prob(sigma: &Permutation) -> ExactProb {
    let n = sigma.n();
    let num = count_paths(&l_vector(sigma));
    ExactProb::new(num, BigUint::from(n).pow(n as u32))
}

/// The full one-shuffle distribution from the identity as a table over all
/// `n!` permutations, computed from the path-count formula.
pub fn exact_dist(n: usize) -> Result<DistributionTable> {
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::too_large("exact_dist", BRUTE_FORCE_LIMIT, n));
    }
    let denominator = BigUint::from(n).pow(n as u32);
    let entries = all_permutations(n)
        .into_iter()
        .map(|p| {
            let c = count_paths(&l_vector(&p));
            (p, c)
        })
        .collect();
    Ok(DistributionTable {
        n,
        denominator,
        entries,
    })
}

fn tally_to_table(n: usize, counts: Vec<u64>, denominator: BigUint) -> DistributionTable {
    let entries = counts
        .into_iter()
        .enumerate()
        .map(|(rank, c)| (permutation_at_rank(n, rank), BigUint::from(c)))
        .collect();
    DistributionTable {
        n,
        denominator,
        entries,
    }
}

/// Scratch accumulator for plan enumeration: a tally over lexicographic
/// permutation ranks plus a reusable row buffer.
struct PlanTally {
    counts: Vec<u64>,
    row: Vec<u32>,
}

fn run_cyclic_plan_from_id(n: usize, plan_index: u64, row: &mut Vec<u32>) {
    row.clear();
    row.extend(1..=n as u32);
    let mut rest = plan_index;
    for card in 1..=n as u32 {
        let w = (rest % n as u64) as usize; // 0-based target position
        rest /= n as u64;
        let from = row.iter().position(|&c| c == card).unwrap();
        row.remove(from);
        row.insert(w, card);
    }
}

fn lehmer_rank_of_row(row: &[u32]) -> usize {
    let n = row.len();
    let mut rank = 0usize;
    for (step, &c) in row.iter().enumerate() {
        let smaller_later = row[step + 1..].iter().filter(|&&x| x < c).count();
        rank += smaller_later * crate::paths::SMALL_FACTORIALS[n - step - 1];
    }
    rank
}

fn brute_force_dist_impl(n: usize, parallel: bool) -> DistributionTable {
    let plans = (n as u64).pow(n as u32);
    let n_fact: usize = (1..=n).product();
    let new_acc = || PlanTally {
        counts: vec![0u64; n_fact],
        row: Vec::with_capacity(n),
    };
    let step = |acc: &mut PlanTally, i: u64| {
        run_cyclic_plan_from_id(n, i, &mut acc.row);
        acc.counts[lehmer_rank_of_row(&acc.row)] += 1;
    };
    let merge = |mut a: PlanTally, b: PlanTally| {
        a.counts = exec::add_counts(a.counts, b.counts);
        a
    };
    let tally = if parallel {
        exec::map_reduce(plans, new_acc, step, merge)
    } else {
        exec::map_reduce_seq(plans, new_acc, step)
    };
    tally_to_table(n, tally.counts, BigUint::from(n).pow(n as u32))
}

/// Brute-force oracle: enumerate all `n^n` card-cyclic plans from the
/// identity and tally the outcomes.
pub fn brute_force_dist(n: usize) -> Result<DistributionTable> {
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::too_large("brute_force_dist", BRUTE_FORCE_LIMIT, n));
    }
    if n == 0 {
        return Err(Error::invalid("deck size must be positive"));
    }
    Ok(brute_force_dist_impl(n, true))
}

/// Sequential twin of [`brute_force_dist`] for back-end comparison.
pub fn brute_force_dist_seq(n: usize) -> Result<DistributionTable> {
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::too_large("brute_force_dist", BRUTE_FORCE_LIMIT, n));
    }
    if n == 0 {
        return Err(Error::invalid("deck size must be positive"));
    }
    Ok(brute_force_dist_impl(n, false))
}

/// Brute-force `P(σ -> id)` under the reversed removal order `n, n-1, .., 1`;
/// equals `exact_prob(σ)` by the plan-reversal bijection.
pub fn order_reversal_prob(sigma: &Permutation) -> Result<ExactProb> {
    let n = sigma.n();
    if n > ORDER_REVERSAL_LIMIT {
        return Err(Error::too_large(
            "order_reversal_prob",
            ORDER_REVERSAL_LIMIT,
            n,
        ));
    }
    let id = Permutation::identity(n)?;
    let order = Permutation::reversed(n)?;
    let plans = (n as u64).pow(n as u32);
    let hits = exec::map_reduce(
        plans,
        || 0u64,
        |acc, i| {
            let mut rest = i;
            let mut row = sigma.clone();
            for &card in order.entries() {
                let w = (rest % n as u64) as usize + 1;
                rest /= n as u64;
                row = row.remove_reinsert(card, w).expect("plan stays in range");
            }
            if row == id {
                *acc += 1;
            }
        },
        |a, b| a + b,
    );
    Ok(ExactProb::new(
        BigUint::from(hits),
        BigUint::from(n).pow(n as u32),
    ))
}

fn randomized_order_dist_impl(n: usize, parallel: bool) -> DistributionTable {
    let n_fact: usize = (1..=n).product();
    let plans_per_order = (n as u64).pow(n as u32);
    let id = Permutation::identity(n).expect("n >= 1");
    let new_acc = || PlanTally {
        counts: vec![0u64; n_fact],
        row: Vec::with_capacity(n),
    };
    let step = |acc: &mut PlanTally, i: u64| {
        let order_rank = (i / plans_per_order) as usize;
        let mut rest = i % plans_per_order;
        let order = permutation_at_rank(n, order_rank);
        acc.row.clear();
        acc.row.extend(id.entries());
        for &card in order.entries() {
            let w = (rest % n as u64) as usize;
            rest /= n as u64;
            let from = acc.row.iter().position(|&c| c == card).unwrap();
            acc.row.remove(from);
            acc.row.insert(w, card);
        }
        acc.counts[lehmer_rank_of_row(&acc.row)] += 1;
    };
    let merge = |mut a: PlanTally, b: PlanTally| {
        a.counts = exec::add_counts(a.counts, b.counts);
        a
    };
    let total = n_fact as u64 * plans_per_order;
    let tally = if parallel {
        exec::map_reduce(total, new_acc, step, merge)
    } else {
        exec::map_reduce_seq(total, new_acc, step)
    };
    let denominator = factorial(n) * BigUint::from(n).pow(n as u32);
    tally_to_table(n, tally.counts, denominator)
}

/// The variant shuffle whose removal order is itself uniform over `S_n`:
/// all `n! * n^n` (order, positions) plans enumerated exactly.
pub fn randomized_order_dist(n: usize) -> Result<DistributionTable> {
    if n > RANDOMIZED_ORDER_LIMIT {
        return Err(Error::too_large(
            "randomized_order_dist",
            RANDOMIZED_ORDER_LIMIT,
            n,
        ));
    }
    if n == 0 {
        return Err(Error::invalid("deck size must be positive"));
    }
    Ok(randomized_order_dist_impl(n, true))
}

/// Sequential twin of [`randomized_order_dist`] for back-end comparison.
pub fn randomized_order_dist_seq(n: usize) -> Result<DistributionTable> {
    if n > RANDOMIZED_ORDER_LIMIT {
        return Err(Error::too_large(
            "randomized_order_dist",
            RANDOMIZED_ORDER_LIMIT,
            n,
        ));
    }
    Ok(randomized_order_dist_impl(n, false))
}

/// Exact total variation distance to uniform.
#[derive(Debug, Clone)]
pub struct TvDistance {
    pub exact: BigRational,
    pub float: f64,
}

/// `(1/2) Σ_σ |p(σ) - 1/n!|`, computed exactly over the l-space (each
/// l-vector carries `n` permutations of equal probability).
pub fn tv_to_uniform(n: usize) -> Result<TvDistance> {
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::too_large("tv_to_uniform", BRUTE_FORCE_LIMIT, n));
    }
    if n == 0 {
        return Err(Error::invalid("deck size must be positive"));
    }
    let n_fact = BigInt::from(factorial(n));
    let n_pow = BigInt::from(BigUint::from(n).pow(n as u32));
    let mut acc = BigInt::zero();
    // Σ over l of n * |N(l) * n! - n^n|, later divided by 2 * n! * n^n
    visit_lvectors(n, &mut |l| {
        let count = BigInt::from(count_paths(l));
        let diff = (&count * &n_fact - &n_pow).abs();
        acc += BigInt::from(n) * diff;
    });
    let exact = BigRational::new(acc, BigInt::from(2u32) * n_fact * n_pow);
    let float = exact.to_f64().unwrap_or(f64::NAN);
    Ok(TvDistance { exact, float })
}

fn visit_lvectors(n: usize, f: &mut impl FnMut(&crate::perm::LVector)) {
    let mut l = vec![0u32; n.saturating_sub(1)];
    if n >= 2 {
        l[n - 2] = n as u32 - 1;
    }
    fn rec(n: usize, j: usize, l: &mut Vec<u32>, f: &mut impl FnMut(&crate::perm::LVector)) {
        if n == 1 || j >= n - 2 {
            let lv = crate::perm::LVector::new(n, l.clone()).expect("odometer stays valid");
            f(&lv);
            return;
        }
        for v in j as u32 + 1..=n as u32 - 1 {
            l[j] = v;
            rec(n, j + 1, l, f);
        }
    }
    rec(n, 0, &mut l, f);
}

/// `max_σ (1 - p(σ) n!)`, attained where the path count is minimal; exact
/// for `n <= 8`, log-space beyond.
pub fn separation_distance(n: usize) -> f64 {
    if n <= BRUTE_FORCE_LIMIT {
        separation_distance_exact(n)
            .expect("guarded")
            .to_f64()
            .unwrap_or(f64::NAN)
    } else {
        // 1 - n! 2^{n-1} / n^n
        let log_ratio = libm::lgamma(n as f64 + 1.0) + (n as f64 - 1.0) * std::f64::consts::LN_2
            - n as f64 * (n as f64).ln();
        1.0 - log_ratio.exp()
    }
}

/// Exact separation distance for small decks, via a scan of the l-space.
pub fn separation_distance_exact(n: usize) -> Result<BigRational> {
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::too_large(
            "separation_distance_exact",
            BRUTE_FORCE_LIMIT,
            n,
        ));
    }
    if n == 0 {
        return Err(Error::invalid("deck size must be positive"));
    }
    let mut min_count: Option<BigUint> = None;
    visit_lvectors(n, &mut |l| {
        let c = count_paths(l);
        if min_count.as_ref().is_none_or(|m| &c < m) {
            min_count = Some(c);
        }
    });
    let min_count = BigInt::from(min_count.expect("l-space is nonempty"));
    let n_fact = BigInt::from(factorial(n));
    let n_pow = BigInt::from(BigUint::from(n).pow(n as u32));
    Ok(BigRational::one() - BigRational::new(min_count * n_fact, n_pow))
}

/// The uniform measure on `S_n` as a table; the reference side of every
/// distance computation.
pub fn uniform_dist(n: usize) -> Result<DistributionTable> {
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::too_large("uniform_dist", BRUTE_FORCE_LIMIT, n));
    }
    if n == 0 {
        return Err(Error::invalid("deck size must be positive"));
    }
    let entries = all_permutations(n)
        .into_iter()
        .map(|p| (p, BigUint::one()))
        .collect();
    Ok(DistributionTable {
        n,
        denominator: factorial(n),
        entries,
    })
}

/// The event "some card numbered at most `M√n` sits in one of the first `L`
/// positions".
#[derive(Debug, Clone, Copy)]
pub struct EventSpec {
    /// Card-number scale `M` (in units of `√n`).
    pub m: f64,
    /// Number of leading positions inspected.
    pub l: usize,
}

impl EventSpec {
    pub fn new(m: f64, l: usize) -> Result<Self> {
        if !m.is_finite() || m <= 0.0 {
            return Err(Error::invalid(format!("M must be positive, got {m}")));
        }
        if l == 0 {
            return Err(Error::invalid("L must be a positive integer"));
        }
        Ok(EventSpec { m, l })
    }

    /// The card-number cutoff `⌊M √n⌋`, clamped to the deck.
    pub fn card_cutoff(&self, n: usize) -> usize {
        ((self.m * (n as f64).sqrt()).floor() as usize).min(n)
    }

    pub fn validate_for(&self, n: usize) -> Result<()> {
        if self.l >= n {
            return Err(Error::invalid(format!(
                "L = {} must be below the deck size {n}",
                self.l
            )));
        }
        Ok(())
    }

    /// Membership test for a deck.
    pub fn contains(&self, p: &Permutation) -> bool {
        let cutoff = self.card_cutoff(p.n()) as u32;
        p.entries()[..self.l.min(p.n())]
            .iter()
            .any(|&c| c <= cutoff)
    }
}

/// Mass the table assigns to the event.
pub fn event_prob(spec: &EventSpec, table: &DistributionTable) -> Result<ExactProb> {
    spec.validate_for(table.n())?;
    let num = table
        .entries
        .iter()
        .filter(|(p, _)| spec.contains(p))
        .map(|(_, c)| c)
        .sum();
    Ok(ExactProb::new(num, table.denominator.clone()))
}

/// Closed-form mass of the event under the uniform measure:
/// `1 - binom(n - ⌊M√n⌋, L) / binom(n, L)`.
pub fn uniform_event_prob(n: usize, spec: &EventSpec) -> Result<ExactProb> {
    spec.validate_for(n)?;
    let cutoff = spec.card_cutoff(n);
    let total = binomial(n, spec.l);
    let avoiding = if cutoff >= n {
        BigUint::zero()
    } else {
        binomial(n - cutoff, spec.l)
    };
    Ok(ExactProb::new(&total - &avoiding, total))
}

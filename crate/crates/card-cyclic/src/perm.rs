//! Permutations, inversion statistics, l-vectors, and the exact shuffle
//! mechanics.
//!
//! A deck of `n` cards is a row of the numbers `1..=n`; `entries[j]` is the
//! number of the card sitting in (1-based) position `j + 1`. One shuffle
//! removes and reinserts every card exactly once, in the deck's original
//! left-to-right card order, each reinsertion position uniform on `{1..n}`.
//! A fixed removal order therefore has exactly `n^n` equally probable plans.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::rng::StreamRng;
use crate::Result;

/// A row of `n` distinct card numbers; the state of the deck.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    entries: Vec<u32>,
}

impl Permutation {
    /// Validate and wrap a row of 1-based card numbers.
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        let n = entries.len();
        if n == 0 {
            return Err(Error::invalid("a permutation needs at least one card"));
        }
        let mut seen = vec![false; n];
        for &c in &entries {
            if c == 0 || c as usize > n {
                return Err(Error::invalid(format!("card number {c} outside 1..={n}")));
            }
            if seen[c as usize - 1] {
                return Err(Error::invalid(format!("card number {c} repeated")));
            }
            seen[c as usize - 1] = true;
        }
        Ok(Permutation { entries })
    }

    /// The identity deck `1 2 ... n`.
    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("deck size must be positive"));
        }
        Ok(Permutation {
            entries: (1..=n as u32).collect(),
        })
    }

    /// The reversed deck `n n-1 ... 1`.
    pub fn reversed(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("deck size must be positive"));
        }
        Ok(Permutation {
            entries: (1..=n as u32).rev().collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    /// Card number in 1-based position `pos`.
    pub fn card_at(&self, pos: usize) -> u32 {
        self.entries[pos - 1]
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    /// 1-based position of card `card`.
    pub fn position_of(&self, card: u32) -> usize {
        self.entries
            .iter()
            .position(|&c| c == card)
            .expect("card not in deck")
            + 1
    }

    /// Inverse permutation: `inverse.card_at(c)` is the position of card `c`.
    pub fn inverse(&self) -> Permutation {
        let n = self.n();
        let mut inv = vec![0u32; n];
        for (i, &c) in self.entries.iter().enumerate() {
            inv[c as usize - 1] = i as u32 + 1;
        }
        Permutation { entries: inv }
    }

    /// Composition as words: `(self ∘ other)_j = self_{other_j}`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.n(), other.n());
        let entries = other
            .entries
            .iter()
            .map(|&c| self.entries[c as usize - 1])
            .collect();
        Permutation { entries }
    }

    /// Remove `card` from the row and reinsert it so that it occupies
    /// position `pos` of the resulting `n`-card row. Cards in between close
    /// ranks, preserving their relative order.
    pub fn remove_reinsert(&self, card: u32, pos: usize) -> Result<Permutation> {
        let n = self.n();
        if card == 0 || card as usize > n {
            return Err(Error::invalid(format!("card {card} not in 1..={n}")));
        }
        if pos == 0 || pos > n {
            return Err(Error::invalid(format!("position {pos} not in 1..={n}")));
        }
        let mut entries = self.entries.clone();
        let from = entries.iter().position(|&c| c == card).unwrap();
        entries.remove(from);
        entries.insert(pos - 1, card);
        Ok(Permutation { entries })
    }
}

impl fmt::Display for Permutation {
    /// Wire format: 1-based card numbers, space-separated, e.g. `3 1 2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let entries = s
            .split_whitespace()
            .map(|tok| {
                tok.parse::<u32>()
                    .map_err(|_| Error::invalid(format!("bad card number {tok:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::new(entries)
    }
}

/// Inversion counts `I_j` for `j = 2..=n-1`.
///
/// `I_j` is the number of cards with a number below `j` that sit to the
/// right of card `j`. For `n < 3` the profile is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InversionProfile {
    n: usize,
    counts: Vec<u32>,
}

impl InversionProfile {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `I_j`, valid for `2 <= j <= n-1`.
    pub fn count(&self, j: usize) -> u32 {
        self.counts[j - 2]
    }

    /// Slice of `I_2..=I_{n-1}`.
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }
}

/// The sufficient statistic `l(σ)`: `l_j = j + I_{n-j}` for `j <= n-2` and
/// `l_{n-1} = n-1`. It determines the exact shuffle probability of `σ` and
/// does not depend on the position of card `n`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LVector {
    n: usize,
    l: Vec<u32>,
}

impl LVector {
    /// Validate `j <= l_j <= n-1` (and `l_{n-1} = n-1`).
    pub fn new(n: usize, l: Vec<u32>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("deck size must be positive"));
        }
        if l.len() != n - 1 {
            return Err(Error::invalid(format!(
                "l-vector for n = {n} must have {} entries, got {}",
                n - 1,
                l.len()
            )));
        }
        for (idx, &lj) in l.iter().enumerate() {
            let j = idx + 1;
            if (lj as usize) < j || lj as usize > n - 1 {
                return Err(Error::invalid(format!(
                    "l_{j} = {lj} outside {j}..={}",
                    n - 1
                )));
            }
        }
        if n >= 2 && l[n - 2] as usize != n - 1 {
            return Err(Error::invalid(format!("l_{} must equal {}", n - 1, n - 1)));
        }
        Ok(LVector { n, l })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `l_j` for `1 <= j <= n-1`.
    pub fn at(&self, j: usize) -> u32 {
        self.l[j - 1]
    }

    pub fn entries(&self) -> &[u32] {
        &self.l
    }

    /// The staircase `(1, 2, ..., n-1)`; l-vector of the identity, where the
    /// path count is maximal.
    pub fn staircase(n: usize) -> Result<Self> {
        LVector::new(n, (1..n as u32).collect())
    }

    /// The flat vector `(n-1, ..., n-1)`; l-vector of the reversed deck,
    /// where the path count is minimal.
    pub fn flat(n: usize) -> Result<Self> {
        LVector::new(n, vec![n as u32 - 1; n - 1])
    }
}

impl fmt::Display for LVector {
    /// Wire format: `l: 1 2 ... n-1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "l:")?;
        for v in &self.l {
            write!(f, " {v}")?;
        }
        Ok(())
    }
}

/// A fully specified shuffle implementation: the removal order `τ` and the
/// reinsertion position of each moved card.
#[derive(Debug, Clone)]
pub struct InsertionPlan {
    pub order: Permutation,
    pub positions: Vec<u32>,
}

impl InsertionPlan {
    pub fn new(order: Permutation, positions: Vec<u32>) -> Result<Self> {
        let n = order.n();
        if positions.len() != n {
            return Err(Error::invalid(format!(
                "plan needs {n} positions, got {}",
                positions.len()
            )));
        }
        if let Some(&w) = positions.iter().find(|&&w| w == 0 || w as usize > n) {
            return Err(Error::invalid(format!("position {w} not in 1..={n}")));
        }
        Ok(InsertionPlan { order, positions })
    }

    pub fn n(&self) -> usize {
        self.order.n()
    }
}

/// Inversion counts `I_j(σ)` for `j = 2..=n-1`; empty for `n < 3`.
pub fn inversion_profile(p: &Permutation) -> InversionProfile {
    let n = p.n();
    if n < 3 {
        return InversionProfile {
            n,
            counts: Vec::new(),
        };
    }
    let inv = p.inverse();
    let pos = |card: u32| inv.card_at(card as usize) as usize;
    let counts = (2..n as u32)
        .map(|j| (1..j).filter(|&k| pos(k) > pos(j)).count() as u32)
        .collect();
    InversionProfile { n, counts }
}

/// The statistic `l(σ)`; see [`LVector`].
pub fn l_vector(p: &Permutation) -> LVector {
    let n = p.n();
    let profile = inversion_profile(p);
    let mut l = Vec::with_capacity(n.saturating_sub(1));
    for j in 1..n {
        if j <= n - 2 {
            l.push(j as u32 + profile.count(n - j));
        } else {
            l.push(n as u32 - 1);
        }
    }
    LVector { n, l }
}

/// Apply every move of `plan` to `start`, in order.
pub fn apply_plan(start: &Permutation, plan: &InsertionPlan) -> Result<Permutation> {
    if plan.n() != start.n() {
        return Err(Error::invalid(format!(
            "plan size {} does not match deck size {}",
            plan.n(),
            start.n()
        )));
    }
    let mut row = start.clone();
    for (card, &w) in plan.order.entries().iter().zip(&plan.positions) {
        row = row.remove_reinsert(*card, w as usize)?;
    }
    Ok(row)
}

/// The card-cyclic removal order for a deck starting at `start`: cards are
/// moved in the deck's original left-to-right reading order, so the order is
/// `start` itself.
pub fn card_cyclic_plan_order(start: &Permutation) -> Permutation {
    start.clone()
}

/// One seeded shuffle: draw `w_1..w_n` from stream `(seed, stream)` and run
/// the card-cyclic plan from `start`. Identical `(start, seed, stream)`
/// yields an identical deck.
pub fn sample_shuffle(start: &Permutation, seed: u64, stream: u64) -> Permutation {
    let n = start.n();
    let mut rng = StreamRng::new(seed, stream);
    let mut positions = Vec::new();
    rng.draw_positions(n, &mut positions);
    let plan = InsertionPlan::new(card_cyclic_plan_order(start), positions)
        .expect("drawn positions are in range");
    apply_plan(start, &plan).expect("sizes match")
}

//! `O(n log n)` simulation of one card-cyclic shuffle from the identity.
//!
//! The quadratic row-buffer simulation in [`crate::perm`] is the reference;
//! this sampler produces bit-identical decks by tracking, for every card not
//! yet moved, how many already-moved cards sit to its left. Cards are moved
//! in card order, so the untouched cards are always `j+1..=n` and keep their
//! relative order; the deck is fully described by those counts plus the
//! final relative order of the moved cards, which assembles into the deck by
//! a reverse free-slot sweep.

use super::fenwick::Fenwick;
use crate::rng::StreamRng;

pub struct CyclicSampler {
    n: usize,
    /// Difference representation of `a_m` = number of moved cards left of
    /// untouched card `m`; suffix increments, point reads via prefix sums.
    settled_before: Fenwick,
    /// Free deck slots for the final reverse assembly.
    slots: Fenwick,
    /// `ranks[j-1]` = number of earlier-moved cards that end up left of
    /// card `j`.
    ranks: Vec<u32>,
    scratch: Vec<u32>,
}

impl CyclicSampler {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "deck size must be positive");
        CyclicSampler {
            n,
            settled_before: Fenwick::zeros(n),
            slots: Fenwick::ones(n),
            ranks: vec![0; n],
            scratch: Vec::with_capacity(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Run the card-cyclic plan `w_1..w_n` from the identity; `out` receives
    /// the resulting deck as a word of card numbers.
    pub fn run_plan(&mut self, positions: &[u32], out: &mut Vec<u32>) {
        let n = self.n;
        debug_assert_eq!(positions.len(), n);
        self.settled_before.clear();
        for j in 1..=n {
            let w = positions[j - 1] as usize;
            debug_assert!((1..=n).contains(&w));
            // untouched cards before the insertion point: the largest m with
            // a_m + m <= (w-1) + j, clamped to the untouched range
            let cap = (w - 1 + j) as u64;
            let m_star = self.settled_before.max_with_shifted_prefix_le(cap);
            let untouched_before = m_star.saturating_sub(j);
            let settled_before = w - 1 - untouched_before;
            debug_assert!(settled_before < j);
            self.ranks[j - 1] = settled_before as u32;
            // card j is now left of every untouched card past the insertion
            // point
            let from = j + untouched_before + 1;
            if from <= n {
                self.settled_before.add(from, 1);
            }
        }
        // place cards n..1 into free slots; card j takes the
        // (ranks[j-1]+1)-th free slot
        self.slots.reset_to_ones();
        out.clear();
        out.resize(n, 0);
        for j in (1..=n).rev() {
            let slot = self.slots.select_kth(self.ranks[j - 1] + 1);
            out[slot - 1] = j as u32;
            self.slots.add(slot, -1);
        }
    }

    /// One seeded shuffle from the identity on stream `(seed, stream)`;
    /// deck-for-deck identical to `perm::sample_shuffle` on the same stream.
    pub fn sample(&mut self, seed: u64, stream: u64, out: &mut Vec<u32>) {
        let mut rng = StreamRng::new(seed, stream);
        self.sample_with(&mut rng, out);
    }

    /// As [`CyclicSampler::sample`], drawing from an already-open stream.
    pub fn sample_with(&mut self, rng: &mut StreamRng, out: &mut Vec<u32>) {
        let mut positions = std::mem::take(&mut self.scratch);
        rng.draw_positions(self.n, &mut positions);
        self.run_plan(&positions, out);
        self.scratch = positions;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{apply_plan, sample_shuffle, InsertionPlan, Permutation};
    use proptest::prelude::*;

    fn reference(n: usize, positions: &[u32]) -> Vec<u32> {
        let id = Permutation::identity(n).unwrap();
        let plan = InsertionPlan::new(id.clone(), positions.to_vec()).unwrap();
        apply_plan(&id, &plan).unwrap().entries().to_vec()
    }

    #[test]
    fn matches_reference_on_examples() {
        let mut out = Vec::new();
        let mut s = CyclicSampler::new(3);
        s.run_plan(&[1, 2, 3], &mut out);
        assert_eq!(out, vec![1, 2, 3]);
        s.run_plan(&[3, 3, 3], &mut out);
        assert_eq!(out, vec![1, 2, 3]);
        s.run_plan(&[2, 1, 1], &mut out);
        assert_eq!(out, vec![3, 2, 1]);
        s.run_plan(&[2, 3, 1], &mut out);
        assert_eq!(out, reference(3, &[2, 3, 1]));
    }

    #[test]
    fn exhaustive_small_plans() {
        for n in 1..=4usize {
            let mut s = CyclicSampler::new(n);
            let mut out = Vec::new();
            let total = (n as u64).pow(n as u32);
            for plan_idx in 0..total {
                let mut rest = plan_idx;
                let positions: Vec<u32> = (0..n)
                    .map(|_| {
                        let w = (rest % n as u64) as u32 + 1;
                        rest /= n as u64;
                        w
                    })
                    .collect();
                s.run_plan(&positions, &mut out);
                assert_eq!(out, reference(n, &positions), "plan {positions:?}");
            }
        }
    }

    #[test]
    fn seeded_sampling_matches_reference_shuffle() {
        for n in [1usize, 2, 5, 17, 64] {
            let id = Permutation::identity(n).unwrap();
            let mut s = CyclicSampler::new(n);
            let mut out = Vec::new();
            for stream in 0..8 {
                s.sample(12345, stream, &mut out);
                let expect = sample_shuffle(&id, 12345, stream);
                assert_eq!(out, expect.entries(), "n={n}, stream={stream}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn matches_reference_on_random_plans(
            n in 1usize..40,
            raw in proptest::collection::vec(0u32..1000, 40),
            ) {
            let positions: Vec<u32> = raw[..n].iter().map(|r| r % n as u32 + 1).collect();
            let mut s = CyclicSampler::new(n);
            let mut out = Vec::new();
            s.run_plan(&positions, &mut out);
            prop_assert_eq!(out, reference(n, &positions));
        }
    }
}

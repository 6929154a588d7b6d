//! Binary indexed trees backing the `O(n log n)` shuffle sampler.

/// Fenwick tree over `1..=n` with nonnegative `u32` entries, supporting the
/// two descents the sampler needs.
pub struct Fenwick {
    n: usize,
    mask: usize,
    tree: Vec<u32>,
}

impl Fenwick {
    pub fn zeros(n: usize) -> Self {
        let mut mask = 1;
        while mask * 2 <= n {
            mask *= 2;
        }
        Fenwick {
            n,
            mask,
            tree: vec![0; n + 1],
        }
    }

    /// All point values set to one, built in place.
    pub fn ones(n: usize) -> Self {
        let mut f = Fenwick::zeros(n);
        f.reset_to_ones();
        f
    }

    pub fn clear(&mut self) {
        self.tree.fill(0);
    }

    /// Each tree node covers a dyadic block; with unit point values its sum
    /// is the block length.
    pub fn reset_to_ones(&mut self) {
        for i in 1..=self.n {
            self.tree[i] = (i & i.wrapping_neg()) as u32;
        }
    }

    pub fn add(&mut self, mut i: usize, delta: i32) {
        debug_assert!(i >= 1 && i <= self.n);
        while i <= self.n {
            self.tree[i] = self.tree[i].wrapping_add_signed(delta);
            i += i & i.wrapping_neg();
        }
    }

    #[cfg(test)]
    pub fn prefix_sum(&self, mut i: usize) -> u32 {
        let mut acc = 0;
        while i > 0 {
            acc += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        acc
    }

    /// Largest `m` in `0..=n` with `prefix_sum(m) + m <= cap`, assuming
    /// `prefix_sum(m) + m` is strictly increasing (point values are
    /// nonnegative).
    pub fn max_with_shifted_prefix_le(&self, cap: u64) -> usize {
        let mut pos = 0usize;
        let mut acc = 0u64;
        let mut step = self.mask;
        while step > 0 {
            let next = pos + step;
            if next <= self.n {
                let cand = acc + u64::from(self.tree[next]);
                if cand + next as u64 <= cap {
                    pos = next;
                    acc = cand;
                }
            }
            step >>= 1;
        }
        pos
    }

    /// Position of the `k`-th one (1-based) among unit point values; the
    /// caller keeps `k` within the live count.
    pub fn select_kth(&self, k: u32) -> usize {
        debug_assert!(k >= 1);
        let mut pos = 0usize;
        let mut remaining = k;
        let mut step = self.mask;
        while step > 0 {
            let next = pos + step;
            if next <= self.n && self.tree[next] < remaining {
                remaining -= self.tree[next];
                pos = next;
            }
            step >>= 1;
        }
        pos + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_sums_after_adds() {
        let mut f = Fenwick::zeros(10);
        f.add(3, 2);
        f.add(7, 5);
        assert_eq!(f.prefix_sum(2), 0);
        assert_eq!(f.prefix_sum(3), 2);
        assert_eq!(f.prefix_sum(10), 7);
    }

    #[test]
    fn ones_and_select() {
        let mut f = Fenwick::ones(8);
        assert_eq!(f.select_kth(1), 1);
        assert_eq!(f.select_kth(8), 8);
        f.add(1, -1);
        f.add(5, -1);
        assert_eq!(f.select_kth(1), 2);
        assert_eq!(f.select_kth(4), 6);
        assert_eq!(f.select_kth(6), 8);
    }

    #[test]
    fn shifted_prefix_search() {
        // point values a = [0,1,1,1,0,0]; prefix+index = 1,3,5,7,8,9
        let mut f = Fenwick::zeros(6);
        for i in [2, 3, 4] {
            f.add(i, 1);
        }
        assert_eq!(f.max_with_shifted_prefix_le(0), 0);
        assert_eq!(f.max_with_shifted_prefix_le(1), 1);
        assert_eq!(f.max_with_shifted_prefix_le(4), 2);
        assert_eq!(f.max_with_shifted_prefix_le(7), 4);
        assert_eq!(f.max_with_shifted_prefix_le(100), 6);
    }

    #[test]
    fn select_against_linear_scan() {
        let n = 37;
        let mut f = Fenwick::ones(n);
        let mut live: Vec<usize> = (1..=n).collect();
        // remove a few and spot-check selection
        for remove in [5usize, 1, 20, 37, 18] {
            let idx = live.iter().position(|&x| x == remove).unwrap();
            live.remove(idx);
            f.add(remove, -1);
            for k in 1..=live.len() {
                assert_eq!(f.select_kth(k as u32), live[k - 1]);
            }
        }
    }
}

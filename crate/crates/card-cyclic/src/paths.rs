//! Counting and enumeration of nondecreasing l-paths, with the extremal
//! theory and the Dyck-word bijection.
//!
//! For an l-vector `l` of size `n`, an l-path is an integer sequence
//! `1 <= Y_1 <= ... <= Y_n = n` forced to rise strictly whenever
//! `Y_i <= l_i`. Their count `N_n(l)` is the numerator, over `n^n`, of the
//! exact probability of every permutation with statistic `l`. The count is
//! strictly decreasing in each coordinate and squeezed between `2^{n-1}`
//! (flat `l`) and the Catalan number `C_n` (staircase `l`).

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::Error;
use crate::exec;
use crate::perm::{LVector, Permutation};
use crate::Result;

/// Arbitrary-precision path count.
pub type PathCount = BigUint;

/// Deck sizes accepted by [`enumerate_paths`]; the path space explodes
/// combinatorially beyond this.
pub const ENUMERATE_LIMIT: usize = 14;

/// Deck sizes accepted by [`extremal_scan`]; the l-space has `(n-1)!` points.
pub const SCAN_LIMIT: usize = 9;

/// Deck sizes accepted by [`perms_with_lvector`].
pub const PERMS_LIMIT: usize = 10;

/// One nondecreasing l-path.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LPath {
    y: Vec<u32>,
}

impl LPath {
    pub fn heights(&self) -> &[u32] {
        &self.y
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    /// Check the path against the constraints of `l`.
    pub fn is_valid_for(&self, l: &LVector) -> bool {
        let n = l.n();
        if self.y.len() != n || self.y[n - 1] != n as u32 {
            return false;
        }
        if self.y[0] < 1 {
            return false;
        }
        for i in 1..n {
            let prev = self.y[i - 1];
            let cur = self.y[i];
            if cur < prev {
                return false;
            }
            if prev <= l.at(i) && cur == prev {
                return false;
            }
        }
        true
    }
}

/// Exact `N_n(l)` by a forward dynamic program over (step, height) with
/// prefix-sum acceleration: `O(n^2)` big-integer additions.
pub fn count_paths(l: &LVector) -> PathCount {
    let n = l.n();
    // f[y-1] = number of admissible prefixes ending at height y
    let mut f = vec![BigUint::one(); n];
    let mut prefix = vec![BigUint::zero(); n + 1];
    for i in 1..n {
        let li = l.at(i) as usize;
        for y in 1..=n {
            prefix[y] = &prefix[y - 1] + &f[y - 1];
        }
        for y_next in (1..=n).rev() {
            // heights y <= l_i must rise strictly, heights y > l_i may stay
            let capped = y_next.saturating_sub(1).min(li);
            let mut v = prefix[capped].clone();
            if y_next > li {
                v += &prefix[y_next] - &prefix[li];
            }
            f[y_next - 1] = v;
        }
    }
    f[n - 1].clone()
}

/// All l-paths for `l`, in lexicographic order of heights.
pub fn enumerate_paths(l: &LVector) -> Result<Vec<LPath>> {
    let n = l.n();
    if n > ENUMERATE_LIMIT {
        return Err(Error::too_large("enumerate_paths", ENUMERATE_LIMIT, n));
    }
    let mut out = Vec::new();
    let mut stack = Vec::with_capacity(n);
    fn recurse(l: &LVector, stack: &mut Vec<u32>, out: &mut Vec<LPath>) {
        let n = l.n();
        let i = stack.len();
        if i == n {
            if stack[n - 1] == n as u32 {
                out.push(LPath { y: stack.clone() });
            }
            return;
        }
        let lo = if i == 0 {
            1
        } else {
            let prev = stack[i - 1];
            if prev <= l.at(i) {
                prev + 1
            } else {
                prev
            }
        };
        for y in lo..=n as u32 {
            stack.push(y);
            recurse(l, stack, out);
            stack.pop();
        }
    }
    recurse(l, &mut stack, &mut out);
    Ok(out)
}

/// Exact binomial coefficient.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= BigUint::from(n - i);
        acc /= BigUint::from(i + 1);
    }
    acc
}

/// The `n`-th Catalan number `binom(2n, n) / (n + 1)`.
pub fn catalan(n: usize) -> BigUint {
    binomial(2 * n, n) / BigUint::from(n + 1)
}

/// Exact factorial.
pub fn factorial(n: usize) -> BigUint {
    let mut acc = BigUint::one();
    for i in 2..=n {
        acc *= BigUint::from(i);
    }
    acc
}

/// `0! ..= 20!`; everything that fits in a machine word.
pub(crate) const SMALL_FACTORIALS: [usize; 21] = {
    let mut table = [1usize; 21];
    let mut i = 1;
    while i < 21 {
        table[i] = table[i - 1] * i;
        i += 1;
    }
    table
};

/// All permutations of size `n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    (0..SMALL_FACTORIALS[n])
        .map(|r| permutation_at_rank(n, r))
        .collect()
}

/// The permutation with lexicographic rank `rank` (0-based) in `S_n`.
pub fn permutation_at_rank(n: usize, mut rank: usize) -> Permutation {
    let mut pool: Vec<u32> = (1..=n as u32).collect();
    let mut entries = Vec::with_capacity(n);
    for rem in (1..=n).rev() {
        let fact = SMALL_FACTORIALS[rem - 1];
        let idx = rank / fact;
        rank %= fact;
        entries.push(pool.remove(idx));
    }
    Permutation::new(entries).expect("rank decodes to a bijection")
}

/// Lexicographic rank of `p` in `S_n` (0-based).
pub fn rank_of_permutation(p: &Permutation) -> usize {
    let n = p.n();
    let mut rank = 0usize;
    let mut pool: Vec<u32> = (1..=n as u32).collect();
    for (step, &c) in p.entries().iter().enumerate() {
        let idx = pool.iter().position(|&x| x == c).unwrap();
        rank += idx * SMALL_FACTORIALS[n - step - 1];
        pool.remove(idx);
    }
    rank
}

/// The exactly `n` permutations `σ` with `l(σ) = l`, one per position of
/// card `n`.
pub fn perms_with_lvector(l: &LVector) -> Result<Vec<Permutation>> {
    let n = l.n();
    if n > PERMS_LIMIT {
        return Err(Error::too_large("perms_with_lvector", PERMS_LIMIT, n));
    }
    // Recover the inversion counts I_m = l_{n-m} - (n-m) of cards 2..n-1 and
    // rebuild the relative order of cards 1..n-1: card m goes so that
    // exactly I_m lower-numbered cards sit to its right.
    let mut relative: Vec<u32> = Vec::with_capacity(n);
    if n >= 1 {
        relative.push(1);
    }
    for m in 2..n {
        let inv = l.at(n - m) as usize - (n - m);
        relative.insert(m - 1 - inv, m as u32);
    }
    let mut out = Vec::with_capacity(n);
    for pos in 0..n {
        let mut entries = relative.clone();
        entries.insert(pos, n as u32);
        out.push(Permutation::new(entries)?);
    }
    Ok(out)
}

/// Result of an exhaustive scan of the l-space of size `n`.
#[derive(Debug, Clone)]
pub struct ExtremalScan {
    pub n: usize,
    pub min: BigUint,
    pub argmin: LVector,
    pub min_attained: usize,
    pub max: BigUint,
    pub argmax: LVector,
    pub max_attained: usize,
}

/// Scan every valid l-vector and report the extreme path counts, their
/// arguments, and how often each extreme is attained.
pub fn extremal_scan(n: usize) -> Result<ExtremalScan> {
    if n > SCAN_LIMIT {
        return Err(Error::too_large("extremal_scan", SCAN_LIMIT, n));
    }
    if n == 0 {
        return Err(Error::invalid("deck size must be positive"));
    }
    if n == 1 {
        let l = LVector::new(1, vec![])?;
        let c = count_paths(&l);
        return Ok(ExtremalScan {
            n,
            min: c.clone(),
            argmin: l.clone(),
            min_attained: 1,
            max: c,
            argmax: l,
            max_attained: 1,
        });
    }

    // partition the scan by the first coordinate, merge deterministically
    let branches = exec::map_collect(n - 1, |first| {
        let mut local: Option<ExtremalScan> = None;
        let mut l = vec![0u32; n - 1];
        l[0] = first as u32 + 1;
        l[n - 2] = n as u32 - 1;
        scan_rec(n, &mut l, 1, &mut local);
        local.expect("every branch holds at least one l-vector")
    });
    let mut iter = branches.into_iter();
    let mut best = iter.next().expect("n >= 2 has branches");
    for b in iter {
        merge_scan(&mut best, b);
    }
    Ok(best)
}

fn scan_rec(n: usize, l: &mut Vec<u32>, j: usize, acc: &mut Option<ExtremalScan>) {
    if j + 1 >= n - 1 {
        // the last coordinate is pinned to n-1
        let lv = LVector::new(n, l.clone()).expect("odometer stays in range");
        let c = count_paths(&lv);
        match acc {
            None => {
                *acc = Some(ExtremalScan {
                    n,
                    min: c.clone(),
                    argmin: lv.clone(),
                    min_attained: 1,
                    max: c,
                    argmax: lv,
                    max_attained: 1,
                })
            }
            Some(s) => {
                if c < s.min {
                    s.min = c.clone();
                    s.argmin = lv.clone();
                    s.min_attained = 1;
                } else if c == s.min {
                    s.min_attained += 1;
                }
                if c > s.max {
                    s.max = c;
                    s.argmax = lv;
                    s.max_attained = 1;
                } else if c == s.max {
                    s.max_attained += 1;
                }
            }
        }
        return;
    }
    for v in j as u32 + 1..=n as u32 - 1 {
        l[j] = v;
        scan_rec(n, l, j + 1, acc);
    }
}

fn merge_scan(into: &mut ExtremalScan, other: ExtremalScan) {
    if other.min < into.min {
        into.min = other.min;
        into.argmin = other.argmin;
        into.min_attained = other.min_attained;
    } else if other.min == into.min {
        into.min_attained += other.min_attained;
    }
    if other.max > into.max {
        into.max = other.max;
        into.argmax = other.argmax;
        into.max_attained = other.max_attained;
    } else if other.max == into.max {
        into.max_attained += other.max_attained;
    }
}

/// One step of a Dyck word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DyckStep {
    H,
    T,
}

/// A balanced word of `n` H's and `n` T's whose every prefix has at least as
/// many H's as T's.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DyckWord {
    steps: Vec<DyckStep>,
}

impl DyckWord {
    pub fn steps(&self) -> &[DyckStep] {
        &self.steps
    }

    /// Prefix-dominance and balance check.
    pub fn is_valid(&self) -> bool {
        let mut height = 0i64;
        for s in &self.steps {
            height += match s {
                DyckStep::H => 1,
                DyckStep::T => -1,
            };
            if height < 0 {
                return false;
            }
        }
        height == 0
    }
}

impl std::fmt::Display for DyckWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for s in &self.steps {
            f.write_str(match s {
                DyckStep::H => "H",
                DyckStep::T => "T",
            })?;
        }
        Ok(())
    }
}

/// Map an l-path for the staircase l-vector to a Dyck word of length `2n`:
/// `Y_1` H's, one T, then `Y_{i+1}-Y_i` H's and one T for each later step.
pub fn dyck_bijection(path: &LPath) -> Result<DyckWord> {
    let n = path.n();
    let staircase = LVector::staircase(n)?;
    if !path.is_valid_for(&staircase) {
        return Err(Error::invalid(format!(
            "path {:?} is not a staircase l-path",
            path.heights()
        )));
    }
    let mut steps = Vec::with_capacity(2 * n);
    let mut prev = 0u32;
    for &y in path.heights() {
        for _ in prev..y {
            steps.push(DyckStep::H);
        }
        steps.push(DyckStep::T);
        prev = y;
    }
    Ok(DyckWord { steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::l_vector;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn lv(n: usize, l: &[u32]) -> LVector {
        LVector::new(n, l.to_vec()).unwrap()
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_paths(&lv(2, &[1])), BigUint::from(2u32));
        assert_eq!(count_paths(&lv(3, &[1, 2])), BigUint::from(5u32));
        assert_eq!(count_paths(&lv(3, &[2, 2])), BigUint::from(4u32));
        assert_eq!(count_paths(&lv(1, &[])), BigUint::one());
    }

    #[test]
    fn staircase_counts_are_catalan() {
        for n in 1..=10 {
            assert_eq!(count_paths(&LVector::staircase(n).unwrap()), catalan(n));
        }
    }

    #[test]
    fn flat_counts_are_powers_of_two() {
        for n in 1..=12usize {
            assert_eq!(
                count_paths(&LVector::flat(n.max(1)).unwrap()),
                BigUint::one() << (n - 1)
            );
        }
    }

    #[test]
    fn catalan_examples() {
        assert_eq!(catalan(1), BigUint::from(1u32));
        assert_eq!(catalan(3), BigUint::from(5u32));
        assert_eq!(catalan(10), BigUint::from(16796u32));
        // standard recurrence cross-check
        let mut c = vec![BigUint::one()];
        for n in 1..=16usize {
            let mut acc = BigUint::zero();
            for i in 0..n {
                acc += &c[i] * &c[n - 1 - i];
            }
            c.push(acc);
        }
        for (n, expect) in c.iter().enumerate().skip(1) {
            assert_eq!(&catalan(n), expect, "catalan({n})");
        }
    }

    #[test]
    fn enumerate_examples() {
        let paths = enumerate_paths(&lv(2, &[1])).unwrap();
        let heights: Vec<_> = paths.iter().map(|p| p.heights().to_vec()).collect();
        assert_eq!(heights, vec![vec![1, 2], vec![2, 2]]);

        let paths = enumerate_paths(&lv(3, &[2, 2])).unwrap();
        let heights: BTreeSet<_> = paths.iter().map(|p| p.heights().to_vec()).collect();
        let expect: BTreeSet<_> = [vec![1, 2, 3], vec![1, 3, 3], vec![2, 3, 3], vec![3, 3, 3]]
            .into_iter()
            .collect();
        assert_eq!(heights, expect);
    }

    #[test]
    fn enumerate_guard() {
        assert!(enumerate_paths(&LVector::staircase(15).unwrap()).is_err());
    }

    #[test]
    fn enumeration_matches_count_exhaustively() {
        for n in 1..=7usize {
            let mut l = vec![0u32; n.saturating_sub(1)];
            exhaust(n, 0, &mut l);
        }
        fn exhaust(n: usize, j: usize, l: &mut Vec<u32>) {
            if n == 1 || j == n - 1 {
                if n > 1 {
                    l[n - 2] = n as u32 - 1;
                }
                let lv = LVector::new(n, l.clone()).unwrap();
                let paths = enumerate_paths(&lv).unwrap();
                assert_eq!(BigUint::from(paths.len()), count_paths(&lv));
                assert!(paths.iter().all(|p| p.is_valid_for(&lv)));
                return;
            }
            if j == n - 2 {
                l[j] = n as u32 - 1;
                exhaust(n, j + 1, l);
                return;
            }
            for v in (j as u32 + 1)..=(n as u32 - 1) {
                l[j] = v;
                exhaust(n, j + 1, l);
            }
        }
    }

    #[test]
    fn flat_rise_counts_follow_binomials() {
        // paths for the flat l-vector are a strictly increasing run to n
        // followed by saturation; runs of length k number binom(n-1, k-1)
        for n in 2..=9usize {
            let paths = enumerate_paths(&LVector::flat(n).unwrap()).unwrap();
            let mut by_run_len = vec![0usize; n + 1];
            for p in &paths {
                let distinct: BTreeSet<_> = p.heights().iter().collect();
                by_run_len[distinct.len()] += 1;
            }
            let mut total = BigUint::zero();
            for (k, &count) in by_run_len.iter().enumerate().skip(1) {
                assert_eq!(
                    BigUint::from(count),
                    binomial(n - 1, k - 1),
                    "n = {n}, k = {k}"
                );
                total += count;
            }
            assert_eq!(total, BigUint::one() << (n - 1));
        }
    }

    #[test]
    fn perms_with_lvector_examples() {
        let got: BTreeSet<_> = perms_with_lvector(&lv(3, &[1, 2]))
            .unwrap()
            .iter()
            .map(|p| p.to_string())
            .collect();
        let expect: BTreeSet<_> = ["1 2 3", "1 3 2", "3 1 2"]
            .map(String::from)
            .into_iter()
            .collect();
        assert_eq!(got, expect);

        let got: BTreeSet<_> = perms_with_lvector(&lv(3, &[2, 2]))
            .unwrap()
            .iter()
            .map(|p| p.to_string())
            .collect();
        let expect: BTreeSet<_> = ["2 1 3", "2 3 1", "3 2 1"]
            .map(String::from)
            .into_iter()
            .collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn perms_with_lvector_inverts_l_vector() {
        for n in 2..=6usize {
            for p in all_permutations(n) {
                let l = l_vector(&p);
                let bucket = perms_with_lvector(&l).unwrap();
                assert_eq!(bucket.len(), n);
                assert!(bucket.iter().all(|q| l_vector(q) == l));
                assert!(bucket.contains(&p), "missing {p} in bucket of {l}");
            }
        }
    }

    #[test]
    fn extremal_scan_examples() {
        let s = extremal_scan(3).unwrap();
        assert_eq!(s.min, BigUint::from(4u32));
        assert_eq!(s.argmin, LVector::flat(3).unwrap());
        assert_eq!(s.max, BigUint::from(5u32));
        assert_eq!(s.argmax, LVector::staircase(3).unwrap());

        let s = extremal_scan(2).unwrap();
        assert_eq!(s.min, BigUint::from(2u32));
        assert_eq!(s.max, BigUint::from(2u32));

        let s = extremal_scan(6).unwrap();
        assert_eq!(s.min, BigUint::from(32u32));
        assert_eq!(s.max, BigUint::from(132u32));
        assert_eq!(s.min_attained, 1);
        assert_eq!(s.max_attained, 1);

        assert!(extremal_scan(10).is_err());
    }

    #[test]
    fn dyck_examples() {
        let p = LPath { y: vec![1, 2] };
        assert_eq!(dyck_bijection(&p).unwrap().to_string(), "HTHT");
        let p = LPath { y: vec![2, 2] };
        assert_eq!(dyck_bijection(&p).unwrap().to_string(), "HHTT");

        let words: BTreeSet<_> = enumerate_paths(&LVector::staircase(3).unwrap())
            .unwrap()
            .iter()
            .map(|p| dyck_bijection(p).unwrap())
            .collect();
        assert_eq!(BigUint::from(words.len()), catalan(3));
        assert!(words.iter().all(|w| w.is_valid()));

        // a path violating the staircase constraints is rejected
        let bad = LPath { y: vec![1, 1, 3] };
        assert!(dyck_bijection(&bad).is_err());
    }

    #[test]
    fn rank_round_trip() {
        for n in 1..=6usize {
            for (r, p) in all_permutations(n).iter().enumerate() {
                assert_eq!(rank_of_permutation(p), r);
                assert_eq!(&permutation_at_rank(n, r), p);
            }
        }
    }

    fn arb_lvector(max_n: usize) -> impl Strategy<Value = LVector> {
        (2usize..=max_n)
            .prop_flat_map(|n| {
                let coords: Vec<_> = (1..n)
                    .map(|j| {
                        if j == n - 1 {
                            Just(n as u32 - 1).boxed()
                        } else {
                            (j as u32..=n as u32 - 1).boxed()
                        }
                    })
                    .collect();
                (Just(n), coords)
            })
            .prop_map(|(n, l)| LVector::new(n, l).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn count_matches_enumeration(l in arb_lvector(12)) {
            let paths = enumerate_paths(&l).unwrap();
            prop_assert_eq!(BigUint::from(paths.len()), count_paths(&l));
        }

        #[test]
        fn count_strictly_decreases_in_each_coordinate(l in arb_lvector(9)) {
            let n = l.n();
            let base = count_paths(&l);
            for j in 1..n.saturating_sub(1) {
                if l.at(j) < n as u32 - 1 {
                    let mut bumped = l.entries().to_vec();
                    bumped[j - 1] += 1;
                    let bumped = LVector::new(n, bumped).unwrap();
                    prop_assert!(count_paths(&bumped) < base);
                }
            }
        }

        #[test]
        fn counts_stay_between_extremes(l in arb_lvector(10)) {
            let n = l.n();
            let c = count_paths(&l);
            prop_assert!(c >= BigUint::one() << (n - 1));
            prop_assert!(c <= catalan(n));
        }
    }
}

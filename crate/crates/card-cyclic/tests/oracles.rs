//! Cross-module oracle checks at sizes beyond the in-module unit tests:
//! Monte Carlo estimators against exact tables, the empirical pair-order
//! frequency against the quadrature route, and exhaustive count-vs-
//! enumeration agreement over the full l-space of size 8.

use card_cyclic::exact::{brute_force_dist, event_prob, exact_dist};
use card_cyclic::limits::pair_inversion_prob;
use card_cyclic::sim::{estimate_event_a, joint_position_sample, sample_position_hist};

#[test]
fn position_hist_matches_exact_oracle_n5() {
    let n = 5usize;
    let reps = 100_000u64;
    let table = exact_dist(n).unwrap();
    for card in [2u32, 5] {
        let h = sample_position_hist(n, card, reps, 50 + u64::from(card)).unwrap();
        for pos in 1..=n {
            let exact = table.position_of_card_marginal(card, pos).as_f64();
            let diff = (h.fraction(pos) - exact).abs();
            assert!(
                diff <= 4.0 * h.stderr(pos),
                "card={card}, pos={pos}: |{} - {exact}| = {diff}",
                h.fraction(pos)
            );
        }
    }
}

#[test]
fn event_estimate_matches_exact_oracle_n5() {
    let reps = 100_000u64;
    let table = brute_force_dist(5).unwrap();
    for (m, l) in [(1.0, 2usize), (0.9, 1), (1.5, 3)] {
        let est = estimate_event_a(5, m, l, reps, 77).unwrap();
        let exact = event_prob(&est.spec, &table).unwrap().as_f64();
        let diff = (est.fraction() - exact).abs();
        assert!(
            diff <= 4.0 * est.stderr().max(1e-4),
            "M={m}, L={l}: |{} - {exact}| = {diff}",
            est.fraction()
        );
    }
}

#[test]
fn pair_inversion_frequency_matches_quadrature() {
    // empirical order frequency of cards 0.3n and 0.7n vs the limit-law
    // integral
    let n = 2000usize;
    let reps = 30_000u64;
    let cards = [(3 * n / 10) as u32, (7 * n / 10) as u32];
    let joint = joint_position_sample(n, &cards, reps, 404).unwrap();
    let empirical = joint.order_fraction(0, 1);
    let limit = pair_inversion_prob(0.3, 0.7);
    let diff = (empirical - limit).abs();
    assert!(diff < 0.015, "|{empirical} - {limit}| = {diff}");
}

#[test]
fn counting_matches_enumeration_exhaustively_n8() {
    // every valid l-vector of size 8
    use card_cyclic::paths::{count_paths, enumerate_paths};
    use card_cyclic::perm::LVector;
    use num_bigint::BigUint;

    fn rec(l: &mut Vec<u32>, j: usize, checked: &mut usize) {
        let n = 8usize;
        if j + 1 >= n - 1 {
            let lv = LVector::new(n, l.clone()).unwrap();
            let paths = enumerate_paths(&lv).unwrap();
            assert_eq!(BigUint::from(paths.len()), count_paths(&lv), "{lv}");
            assert!(paths.iter().all(|p| p.is_valid_for(&lv)));
            *checked += 1;
            return;
        }
        for v in j as u32 + 1..=7 {
            l[j] = v;
            rec(l, j + 1, checked);
        }
    }
    let mut l = vec![0u32; 7];
    l[6] = 7;
    let mut checked = 0;
    for first in 1..=7u32 {
        l[0] = first;
        rec(&mut l, 1, &mut checked);
    }
    assert_eq!(checked, 5040);
}

#[test]
fn walk_composition_equals_definitional_process() {
    // a walk step from deck σ removes cards in σ's own reading order; the
    // samplers instead compose σ with an identity-started sample. Both
    // routes must agree plan-for-plan, not just in distribution.
    use card_cyclic::perm::{apply_plan, InsertionPlan, Permutation};
    use card_cyclic::rng::StreamRng;
    use card_cyclic::sim::sampler::CyclicSampler;

    for n in [2usize, 3, 7, 24] {
        let id = Permutation::identity(n).unwrap();
        for seed in 0..20u64 {
            let mut rng_def = StreamRng::new(seed, 0);
            let mut rng_cmp = StreamRng::new(seed, 0);
            let mut sampler = CyclicSampler::new(n);
            let mut definitional = id.clone();
            let mut composed = id.clone();
            let mut positions = Vec::new();
            let mut xi = Vec::new();
            for _ in 0..3 {
                // definition: remove in the current reading order
                rng_def.draw_positions(n, &mut positions);
                let order = definitional.clone();
                let plan = InsertionPlan::new(order, positions.clone()).unwrap();
                definitional = apply_plan(&definitional, &plan).unwrap();
                // composition: same stream, identity-started sample
                sampler.sample_with(&mut rng_cmp, &mut xi);
                let step = Permutation::new(xi.clone()).unwrap();
                composed = composed.compose(&step);
            }
            assert_eq!(definitional, composed, "n={n}, seed={seed}");
        }
    }
}

#[test]
fn two_step_walk_distribution_matches_exact_convolution() {
    // Monte Carlo two-step outcome frequencies at n = 3 against the exact
    // convolution Σ_σ p(σ) p(id, σ^{-1}τ), built here from first principles
    use card_cyclic::exact::exact_prob;
    use card_cyclic::paths::{all_permutations, rank_of_permutation};
    use card_cyclic::perm::{apply_plan, InsertionPlan, Permutation};
    use card_cyclic::rng::StreamRng;

    let n = 3usize;
    let perms = all_permutations(n);
    let base: Vec<f64> = perms.iter().map(|p| exact_prob(p).as_f64()).collect();
    let mut two_step = vec![0.0f64; perms.len()];
    for (s, sigma) in perms.iter().enumerate() {
        let s_inv = sigma.inverse();
        for (t, tau) in perms.iter().enumerate() {
            two_step[t] += base[s] * base[rank_of_permutation(&s_inv.compose(tau))];
        }
    }
    assert!((two_step.iter().sum::<f64>() - 1.0).abs() < 1e-12);

    let reps = 100_000u64;
    let mut counts = vec![0u64; perms.len()];
    for rep in 0..reps {
        let mut rng = StreamRng::new(7777, rep);
        let mut deck = Permutation::identity(n).unwrap();
        let mut positions = Vec::new();
        for _ in 0..2 {
            rng.draw_positions(n, &mut positions);
            let plan = InsertionPlan::new(deck.clone(), positions.clone()).unwrap();
            deck = apply_plan(&deck, &plan).unwrap();
        }
        counts[rank_of_permutation(&deck)] += 1;
    }
    for (t, &expect) in two_step.iter().enumerate() {
        let got = counts[t] as f64 / reps as f64;
        let se = (expect * (1.0 - expect) / reps as f64).sqrt();
        assert!(
            (got - expect).abs() <= 4.0 * se,
            "τ={}: {got} vs {expect}",
            perms[t]
        );
    }
}

#[test]
fn uniform_event_closed_form_agrees_with_log_route() {
    // exact big-binomial ratio vs a log-space product at acceptance scale
    use card_cyclic::exact::{uniform_event_prob, EventSpec};

    for (n, m, l) in [
        (100_000usize, 2.0, 48usize),
        (10_000, 1.0, 12),
        (2_000, 0.7, 5),
    ] {
        let spec = EventSpec::new(m, l).unwrap();
        let exact = uniform_event_prob(n, &spec).unwrap().as_f64();
        let c = spec.card_cutoff(n);
        let log_avoid: f64 = (0..l)
            .map(|i| ((n - c - i) as f64).ln() - ((n - i) as f64).ln())
            .sum();
        let float_route = 1.0 - log_avoid.exp();
        assert!(
            (exact - float_route).abs() < 1e-12,
            "n={n}: {exact} vs {float_route}"
        );
    }
}

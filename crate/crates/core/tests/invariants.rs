use hyperlab::counts::{self, CountConfig, KeyMode, RichMode};
use hyperlab::moebius::ProjectiveValue;
use hyperlab::prelude::*;
use hyperlab::sets::{random_scalars, random_translates};
use proptest::prelude::*;

fn field(p: u64) -> PrimeModulus {
    check_prime(p as i128).unwrap()
}

fn cfg() -> CountConfig {
    CountConfig::default()
}

fn all_points(p: PrimeModulus) -> Vec<ProjectiveValue> {
    (0..p.get())
        .map(ProjectiveValue::Finite)
        .chain([ProjectiveValue::Infinity])
        .collect()
}

#[test]
fn embedding_has_unit_determinant_for_small_fields() {
    for n in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
        let p = field(n);
        for a in 0..n {
            for b in 0..n {
                let m = MoebiusMap::embed(p, Translate::new(a, b));
                assert_eq!(m.det().value(), 1);
            }
        }
    }
}

#[test]
fn action_is_a_homomorphism_on_small_fields() {
    for n in [3u64, 5, 7, 11] {
        let p = field(n);
        let maps: Vec<MoebiusMap> = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .map(|(a, b)| MoebiusMap::embed(p, Translate::new(a, b)))
            .collect();
        let points = all_points(p);
        for f in &maps {
            for g in &maps {
                let fg = f.compose(g).unwrap();
                for &x in &points {
                    assert_eq!(fg.evaluate(x), f.evaluate(g.evaluate(x)));
                }
            }
        }
    }
}

#[test]
fn rotated_incidences_equal_minkowski_count() {
    for seed in 0..30u64 {
        let p = field([101, 499][seed as usize % 2]);
        let a = random_scalars(p, 1 + seed as usize % 10, seed).unwrap();
        let lam = Lambda::new(p, 1 + seed as i128 % 50).unwrap();
        let m = minkowski_realisations(&a, &lam);
        assert_eq!(counts::minkowski_rotated_incidences(&a, &lam), m);
        assert!(counts::minkowski_rectangle_incidences(&a, &lam) >= m);
    }
}

#[test]
fn cartesian_energy_identity() {
    // E(B×B) = |B|²(2E₊(B) - |B|²).
    for seed in 0..30u64 {
        let p = field([61, 101][seed as usize % 2]);
        let b = random_scalars(p, 1 + seed as usize % 8, seed).unwrap();
        let h = TranslateSet::cartesian(&b, &b).unwrap();
        let n = b.len() as u128;
        assert_eq!(energy(&h), n * n * (2 * additive_energy(&b) - n * n));
    }
}

#[test]
fn coordinate_rotation_round_trips() {
    let p = field(101);
    for seed in 0..10 {
        let h = random_translates(p, 30, seed).unwrap();
        assert_eq!(h.rotate_coordinates().unrotate_coordinates(), h);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn t3_lemma_and_borel_bounds(seed in any::<u64>(), nh in 1usize..20, big in any::<bool>()) {
        let p = field(if big { 499 } else { 101 });
        let h = random_translates(p, nh, seed).unwrap();
        let n = nh as u128;
        let t3 = t_k(&h, 3, &cfg()).unwrap();
        prop_assert!(t3 <= 2 * n * q_rect(&h) + 2 * n.pow(4));
        let mass = borel_coset_mass(&h);
        prop_assert!(mass.max_non_borel <= n * n);
        prop_assert_eq!(mass.total(), energy(&h));
        let split = counts::t3_split(&h, &cfg()).unwrap();
        prop_assert!(split.borel <= n.pow(4));
        prop_assert_eq!(split.total, t3);
    }

    #[test]
    fn t4_chain(seed in any::<u64>(), nh in 1usize..14) {
        let h = random_translates(field(61), nh, seed).unwrap();
        let n = nh as u128;
        prop_assert!(t_k(&h, 4, &cfg()).unwrap() <= n * n * t_k(&h, 3, &cfg()).unwrap());
    }

    #[test]
    fn energy_ladder(seed in any::<u64>(), nh in 1usize..30) {
        let h = random_translates(field(31), nh, seed).unwrap();
        let n = nh as u128;
        let e = energy(&h);
        prop_assert!(e >= n * n && e <= n.pow(3));
        let t3 = t_k(&h, 3, &cfg()).unwrap();
        prop_assert!(t3 >= n.pow(3) && t3 <= n * n * e);
        prop_assert!(t_k_with(&h, 2, KeyMode::Projective, &cfg()).unwrap() >= e);
        let s = energy_systems(&h);
        prop_assert_eq!(s.reassembled(), e);
    }

    #[test]
    fn character_sum_bound(seed in any::<u64>(), na in 1usize..100, nh in 1usize..60) {
        let p = field(101);
        let a = random_scalars(p, na, seed).unwrap();
        let h = random_translates(p, nh, seed ^ 9).unwrap();
        let s = sigma(&a, &h, &Lambda::standard(p)) as f64;
        prop_assert!(s <= hyperlab::bounds::eval_charsum(na as u64, nh as u64, 101));
    }

    #[test]
    fn sigma_is_bounded_and_symmetric(seed in any::<u64>(), na in 0usize..20, nh in 0usize..40) {
        let p = field(61);
        let a = random_scalars(p, na, seed).unwrap();
        let h = random_translates(p, nh, seed ^ 3).unwrap();
        let lam = Lambda::standard(p);
        let s = sigma(&a, &h, &lam);
        prop_assert!(s as usize <= na * nh);
        // Reflecting every curve across y = x swaps the roles of a and b.
        let swapped = TranslateSet::from_translates(p, h.elements().iter().map(|t| Translate::new(t.b, t.a)));
        prop_assert_eq!(sigma(&a, &swapped, &lam), s);
    }

    #[test]
    fn rich_counts_are_monotone_and_mode_independent(seed in any::<u64>(), na in 2usize..7) {
        let p = field(31);
        let a = random_scalars(p, na, seed).unwrap();
        let lam = Lambda::standard(p);
        let pairs = counts::richness_profile(&a, &lam, RichMode::Pairs, None, &cfg()).unwrap();
        let dense = counts::richness_profile(&a, &lam, RichMode::Exhaustive, None, &cfg()).unwrap();
        prop_assert_eq!(&pairs, &dense);
        for k in 2..=na {
            prop_assert!(pairs.m_k(k + 1) <= pairs.m_k(k));
        }
        prop_assert_eq!(pairs.m_k(na + 1), 0);
    }

    #[test]
    fn restricted_profile_matches_sigma(seed in any::<u64>(), na in 2usize..8, nh in 1usize..40) {
        let p = field(61);
        let a = random_scalars(p, na, seed).unwrap();
        let h = random_translates(p, nh, seed ^ 5).unwrap();
        let lam = Lambda::standard(p);
        let profile = counts::richness_profile(&a, &lam, RichMode::Pairs, Some(&h), &cfg()).unwrap();
        let rich_incidences: u64 = profile.rich.iter().map(|(_, r)| *r as u64).sum();
        let singles = h
            .elements()
            .iter()
            .filter(|&&t| counts::richness(&a, t, &lam) == 1)
            .count() as u64;
        prop_assert_eq!(rich_incidences + singles, sigma(&a, &h, &lam));
    }
}

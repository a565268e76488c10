use hyperlab::counts::{self, CountConfig, RichMode, SumProductVariant};
use hyperlab::moebius::Lambda;
use hyperlab::oracle;
use hyperlab::prelude::*;
use hyperlab::sets::{random_scalars, random_translates};
use proptest::prelude::*;

fn field(p: u64) -> PrimeModulus {
    check_prime(p as i128).unwrap()
}

fn cfg() -> CountConfig {
    CountConfig::default()
}

// Values below were produced by a separate brute-force script and are frozen here.
#[test]
fn frozen_values_p101() {
    let p = field(101);
    let h = TranslateSet::new(p, (0..8).map(|i| (i, (i * i + 3) % 101)));
    assert_eq!(t_k(&h, 2, &cfg()).unwrap(), 120);
    assert_eq!(t_k(&h, 3, &cfg()).unwrap(), 2192);
    assert_eq!(t_k(&h, 4, &cfg()).unwrap(), 44250);
    assert_eq!(q_rect(&h), 200);
    assert_eq!(borel_t3_mass(&h, &cfg()).unwrap(), 4);
    let a = ScalarSet::new(p, 1..13);
    assert_eq!(sigma(&a, &h, &Lambda::standard(p)), 11);
    let a = ScalarSet::new(p, [0, 1, 3, 7, 12, 20]);
    assert_eq!(minkowski_realisations(&a, &Lambda::new(p, 5).unwrap()), 12);
}

#[test]
fn frozen_rich_counts_p61() {
    let p = field(61);
    let a = ScalarSet::new(p, [1, 2, 3, 5, 8, 13]);
    let lam = Lambda::standard(p);
    for mode in [RichMode::Pairs, RichMode::Exhaustive] {
        let profile = counts::richness_profile(&a, &lam, mode, None, &cfg()).unwrap();
        assert_eq!(profile.m_k(2), 427);
        assert_eq!(profile.m_k(3), 39);
    }
}

#[test]
fn kernels_match_oracles_on_seeded_corpus() {
    for seed in 0..40u64 {
        let p = field([61, 101][seed as usize % 2]);
        let a = random_scalars(p, 1 + seed as usize % 12, seed).unwrap();
        let h = random_translates(p, 1 + seed as usize % 32, seed).unwrap();
        let lam = Lambda::new(p, [-1, 1, 2][seed as usize % 3]).unwrap();
        assert_eq!(sigma(&a, &h, &lam), oracle::sigma_naive(&a, &h, &lam), "seed {seed}");
        assert_eq!(energy(&h), oracle::energy_naive(&h).unwrap(), "seed {seed}");
        assert_eq!(q_rect(&h), oracle::q_naive(&h).unwrap(), "seed {seed}");
        let small = random_translates(p, 1 + seed as usize % 10, seed).unwrap();
        assert_eq!(t_k(&small, 3, &cfg()).unwrap(), oracle::t3_naive(&small).unwrap());
        assert_eq!(
            borel_t3_mass(&small, &cfg()).unwrap(),
            oracle::borel_t3_naive(&small).unwrap()
        );
    }
}

#[test]
fn rich_curves_match_exhaustive_scans() {
    for seed in 0..12u64 {
        let p = field([31, 61][seed as usize % 2]);
        let a = random_scalars(p, 2 + seed as usize % 7, seed).unwrap();
        let lam = Lambda::new(p, 1 + seed as i128).unwrap();
        let pairs = counts::richness_profile(&a, &lam, RichMode::Pairs, None, &cfg()).unwrap();
        for k in 1..=a.len() + 1 {
            let want = oracle::mk_exhaustive(&a, k, &lam).unwrap();
            if k >= 2 {
                assert_eq!(pairs.m_k(k), want, "seed {seed} k {k}");
            }
        }
        let c = random_scalars(p, 1 + seed as usize % 5, seed + 100).unwrap();
        for k in 2..=4 {
            for axis in [true, false] {
                assert_eq!(
                    rich_lines(&a, &c, k, axis).unwrap().count,
                    oracle::lk_exhaustive(&a, &c, k, axis).unwrap(),
                    "seed {seed} k {k} axis {axis}"
                );
            }
        }
    }
}

#[test]
fn scalar_energies_match_oracles() {
    for seed in 0..20u64 {
        let p = field([5, 11, 61, 101][seed as usize % 4]);
        let b = random_scalars(p, 1 + seed as usize % 5, seed).unwrap();
        assert_eq!(additive_energy(&b), oracle::additive_energy_naive(&b).unwrap());
        assert_eq!(product_rep_energy(&b), oracle::product_rep_energy_naive(&b).unwrap());
        let a = random_scalars(p, 1 + seed as usize % 4, seed + 7).unwrap();
        for (i, v) in SumProductVariant::ALL.into_iter().enumerate() {
            assert_eq!(sumprod_quadruples(&a, v), oracle::sumprod_naive(&a, i + 1).unwrap());
        }
        let lam = Lambda::new(p, 1 + seed as i128 % 3).unwrap();
        assert_eq!(
            minkowski_realisations(&a, &lam),
            oracle::minkowski_naive(&a, &lam).unwrap()
        );
    }
}

#[test]
fn oracles_refuse_large_inputs() {
    let p = field(101);
    let h = random_translates(p, 33, 0).unwrap();
    assert!(matches!(oracle::energy_naive(&h), Err(Error::ResourceLimit { .. })));
    assert!(matches!(oracle::q_naive(&h), Err(Error::ResourceLimit { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sigma_matches_naive(seed in any::<u64>(), na in 0usize..12, nh in 0usize..20, lam in 1i128..61) {
        let p = field(61);
        let a = random_scalars(p, na, seed).unwrap();
        let h = random_translates(p, nh, seed ^ 1).unwrap();
        let lam = Lambda::new(p, lam).unwrap();
        prop_assert_eq!(sigma(&a, &h, &lam), oracle::sigma_naive(&a, &h, &lam));
    }

    #[test]
    fn energy_matches_naive(seed in any::<u64>(), nh in 1usize..24) {
        let h = random_translates(field(101), nh, seed).unwrap();
        prop_assert_eq!(t_k(&h, 2, &cfg()).unwrap(), oracle::energy_naive(&h).unwrap());
    }

    #[test]
    fn t3_matches_naive(seed in any::<u64>(), nh in 1usize..8) {
        let h = random_translates(field(61), nh, seed).unwrap();
        prop_assert_eq!(t_k(&h, 3, &cfg()).unwrap(), oracle::t3_naive(&h).unwrap());
    }
}

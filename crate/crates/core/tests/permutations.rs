use mallows_core::mallows::sample_permutation;
use mallows_core::perm::{contains_naive, enumerate, LehmerWord};
use mallows_core::{Pattern, Permutation, SamplerState};
use proptest::prelude::*;

/// Independent triple loop over index triples.
fn contains_triple_loop(w: &[u32], t: &[u32]) -> bool {
    let n = w.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (a, b, c) = (w[i], w[j], w[k]);
                let ok = (a < b) == (t[0] < t[1])
                    && (a < c) == (t[0] < t[2])
                    && (b < c) == (t[1] < t[2]);
                if ok {
                    return true;
                }
            }
        }
    }
    false
}

fn all_up_to(n_max: usize) -> impl Iterator<Item = Permutation> {
    (0..=n_max).flat_map(|n| enumerate(n).unwrap())
}

#[test]
fn inversions_invariant_under_inverse() {
    for p in all_up_to(6) {
        assert_eq!(p.inversions(), p.inverse().inversions(), "{p}");
        assert_eq!(p.inverse().inverse(), p);
        assert_eq!(p.reverse().reverse(), p);
    }
}

#[test]
fn containment_symmetries() {
    for p in all_up_to(6) {
        for t in &Pattern::S3 {
            let c = p.contains(t);
            assert_eq!(c, p.reverse().contains(&t.reversed()), "{p} {t} reverse");
            assert_eq!(c, p.inverse().contains(&t.inverted()), "{p} {t} inverse");
            assert_eq!(
                c,
                contains_triple_loop(p.as_slice(), t.as_permutation().as_slice())
            );
        }
    }
}

#[test]
fn lehmer_bijection_exhaustive() {
    for n in 0..=6 {
        let words: Vec<LehmerWord> = LehmerWord::all(n).collect();
        let perms: Vec<Permutation> = enumerate(n).unwrap().collect();
        assert_eq!(words.len(), perms.len());
        for x in &words {
            let p = x.decode();
            assert_eq!(&p.lehmer(), x);
            assert_eq!(x.sum(), p.inversions());
            assert_eq!(x.as_slice().first().copied().unwrap_or(0), 0);
        }
        for p in &perms {
            assert_eq!(&p.lehmer().decode(), p);
            assert_eq!(p.lehmer().sum(), p.inversions());
        }
    }
}

#[test]
fn s3_counts_are_catalan() {
    let catalan = [1usize, 1, 2, 5, 14, 42, 132, 429];
    for (n, &c) in catalan.iter().enumerate() {
        for t in &Pattern::S3 {
            let k = enumerate(n).unwrap().filter(|p| p.avoids(t)).count();
            assert_eq!(k, c, "n = {n}, {t}");
        }
    }
}

fn uniform_perm(max_len: usize) -> impl Strategy<Value = Permutation> {
    (1..=max_len)
        .prop_flat_map(|n| Just((1..=n as u32).collect::<Vec<_>>()).prop_shuffle())
        .prop_map(|w| Permutation::new(w).unwrap())
}

fn mallows_perm(max_len: usize) -> impl Strategy<Value = Permutation> {
    (1..=max_len, 0.01f64..0.6, any::<u64>(), any::<bool>()).prop_map(|(n, q, seed, flip)| {
        let p = sample_permutation(n, q, &mut SamplerState::new(seed)).unwrap();
        if flip {
            p.reverse()
        } else {
            p
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn fast_containment_matches_triple_loop(p in uniform_perm(200)) {
        for t in &Pattern::S3 {
            let tw = t.as_permutation();
            prop_assert_eq!(p.contains(t), contains_triple_loop(p.as_slice(), tw.as_slice()), "{}", t);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    // Near-identity and near-reversal words avoid some patterns often.
    #[test]
    fn fast_containment_matches_naive_on_structured(p in mallows_perm(60)) {
        for t in &Pattern::S3 {
            let tw = t.as_permutation();
            prop_assert_eq!(p.contains(t), contains_naive(p.as_slice(), tw.as_slice()), "{}", t);
        }
    }

    #[test]
    fn display_parse_roundtrip(p in uniform_perm(30)) {
        prop_assert_eq!(p.to_string().parse::<Permutation>().unwrap(), p);
    }

    #[test]
    fn lehmer_roundtrip_large(p in uniform_perm(300)) {
        let x = p.lehmer();
        prop_assert_eq!(x.sum(), p.inversions());
        prop_assert_eq!(x.decode(), p);
    }
}

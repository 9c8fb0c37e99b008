use kleinian::{builtin_group, check_word_run, Word};

/// Every word of length `len` over digits `1..=m`.
fn words(m: u8, len: usize) -> impl Iterator<Item = Vec<u8>> {
    let total = (m as u64).pow(len as u32);
    (0..total).map(move |mut n| {
        let mut w = vec![0u8; len];
        for slot in w.iter_mut() {
            *slot = (n % m as u64) as u8 + 1;
            n /= m as u64;
        }
        w
    })
}

/// Free-group reducer on the torus letters a=1, b=2, A=3, B=4 (inverse = digit ± 2).
/// Returns true when no cancellation ever happens while reading right to left.
fn freely_reduced(word: &[u8]) -> bool {
    let inverse = |d: u8| if d <= 2 { d + 2 } else { d - 2 };
    let mut stack: Vec<u8> = Vec::new();
    for &d in word.iter().rev() {
        if stack.last() == Some(&inverse(d)) {
            return false;
        }
        stack.push(d);
    }
    true
}

/// The Klein four-group as bit vectors: a = 01, b = 10, ab = 11, product = xor.
fn klein_prefixes_nontrivial(word: &[u8]) -> bool {
    let mut acc = 0u8;
    for &d in word.iter().rev() {
        acc ^= d;
        if acc == 0 {
            return false;
        }
    }
    true
}

#[test]
fn torus_acceptance_matches_free_reduction() {
    let torus = builtin_group("once_punctured_torus").unwrap();
    let mut checked = 0u64;
    for len in 1..=8 {
        for w in words(4, len) {
            let run = check_word_run(&Word::from(w.clone()), torus.table()).unwrap();
            assert_eq!(run.accepted, freely_reduced(&w), "{w:?}");
            if run.accepted {
                // final state is the leftmost (last applied) letter
                assert_eq!(run.final_state, w[0]);
            }
            checked += 1;
        }
    }
    assert_eq!(checked, (1..=8).map(|k| 4u64.pow(k)).sum::<u64>());
}

#[test]
fn klein_acceptance_matches_group_oracle() {
    let klein = builtin_group("klein_four").unwrap();
    for len in 1..=6 {
        for w in words(3, len) {
            let run = check_word_run(&Word::from(w.clone()), klein.table()).unwrap();
            assert_eq!(run.accepted, klein_prefixes_nontrivial(&w), "{w:?}");
        }
    }
}

#[test]
fn rejection_is_prefix_monotone() {
    for name in ["once_punctured_torus", "klein_four"] {
        let group = builtin_group(name).unwrap();
        let m = group.m();
        for len in 1..6 {
            for w in words(m, len) {
                if check_word_run(&Word::from(w.clone()), group.table())
                    .unwrap()
                    .accepted
                {
                    continue;
                }
                for g in 1..=m {
                    let mut longer = vec![g];
                    longer.extend_from_slice(&w);
                    let run = check_word_run(&Word::from(longer), group.table()).unwrap();
                    assert!(!run.accepted, "{name}: {w:?} extended by {g}");
                }
            }
        }
    }
}

#[test]
fn word_runs_are_pure() {
    let torus = builtin_group("once_punctured_torus").unwrap();
    let table = torus.table().clone();
    let reference: Vec<_> = words(4, 5)
        .map(|w| check_word_run(&Word::from(w), &table).unwrap())
        .collect();
    std::thread::scope(|s| {
        for _ in 0..4 {
            s.spawn(|| {
                let again: Vec<_> = words(4, 5)
                    .map(|w| check_word_run(&Word::from(w), &table).unwrap())
                    .collect();
                assert_eq!(again, reference);
            });
        }
    });
}

use locality_lab::search::{enumerate_valid, sample_valid};
use locality_lab::speedup::{base_check, iterate_speedup, speedup, SubsetEncoding};
use locality_lab::tuple::IncreasingTuples;
use locality_lab::{ColouringFunction, Limits};
use proptest::prelude::*;

fn check_speedup(a: &ColouringFunction) {
    let b = speedup(a).unwrap();
    assert_eq!(b.arity(), a.arity() - 1);
    assert_eq!(b.colour_count(), 1 << a.colour_count());
    assert_eq!(b.n(), a.n());
    let report = b.verify();
    assert!(
        report.is_valid,
        "speedup of valid {:?} broke at {:?}",
        a.table(),
        report.violations
    );
    // the empty set only shows up for tuples ending at n
    for (t, colour) in b.entries() {
        assert_eq!(colour == 1, *t.last().unwrap() == a.n(), "tuple {t:?}");
    }
}

#[test]
fn preserves_validity_on_every_enumerated_table() {
    let mut checked = 0;
    for n in 1..=5u32 {
        for k in 2..=3usize {
            for c in 1..=3u32 {
                for a in enumerate_valid(n, k, c).unwrap() {
                    check_speedup(&a);
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 1000, "only {checked} tables");
}

#[test]
fn preserves_validity_on_sampled_tables() {
    for (n, k, c, seed) in [
        (6, 2, 3, 1),
        (7, 2, 3, 2),
        (6, 3, 2, 3),
        (7, 3, 3, 4),
        (7, 4, 2, 5),
    ] {
        let samples = sample_valid(n, k, c, seed, 40).unwrap();
        assert_eq!(samples.len(), 40);
        for a in &samples {
            check_speedup(a);
        }
    }
}

#[test]
fn invalid_input_is_transformed_anyway() {
    let a = ColouringFunction::new(4, 2, 1, vec![1; 6]).unwrap();
    assert!(!a.verify().is_valid);
    let b = speedup(&a).unwrap();
    assert_eq!(b.table(), &[2, 2, 2, 1]);
    assert!(!b.verify().is_valid);
}

#[test]
fn three_colour_input_gives_eight_colours() {
    for a in enumerate_valid(5, 2, 3).unwrap().take(50) {
        assert_eq!(speedup(&a).unwrap().colour_count(), 8);
    }
}

#[test]
fn traces_are_consistent_and_certify_the_bound() {
    for n in 2..=6u32 {
        for k in 1..=3usize {
            for a in enumerate_valid(n, k, 3).unwrap().step_by(17).take(30) {
                let t = iterate_speedup(&a).unwrap();
                assert!(t.is_consistent());
                assert!(t.base_verdict.valid);
                assert!(t.conclusion.exact_bound_holds);
                assert!(t.conclusion.tower_bound_holds);
                assert!(t.conclusion.log_star_inequality.holds);
                for s in &t.steps {
                    assert!(s.valid);
                    assert!(s.colour_count >= s.required_colour_count);
                }
                assert_eq!(base_check(&t.final_table).unwrap(), t.base_verdict);
            }
        }
    }
}

proptest! {
    #[test]
    fn encoding_round_trips(c in 1u32..=16, mask in any::<u64>()) {
        let e = SubsetEncoding::new(c).unwrap();
        let set: Vec<u32> = (1..=c).filter(|i| mask & (1 << (i - 1)) != 0).collect();
        let code = e.encode(set.iter().copied());
        prop_assert!(code >= 1 && code <= e.code_count());
        prop_assert_eq!(e.decode(code).unwrap(), set);
    }

    #[test]
    fn speedup_matches_set_definition(
        n in 2u32..=7,
        k in 2usize..=4,
        c in 1u32..=4,
        seed in any::<u64>(),
    ) {
        prop_assume!(k as u32 <= n);
        let a = ColouringFunction::from_fn(n, k, c, &Limits::default(), |t| {
            let h = t.iter().fold(seed, |h, &x| h.wrapping_mul(6364136223846793005).wrapping_add(x as u64));
            (h >> 33) as u32 % c + 1
        }).unwrap();
        let b = speedup(&a).unwrap();
        let enc = SubsetEncoding::new(c).unwrap();
        for (t, code) in b.entries() {
            let set: Vec<u32> = IncreasingTuples::new(n, k)
                .filter(|x| x[..k - 1] == t[..])
                .map(|x| a.get(&x).unwrap())
                .collect();
            prop_assert_eq!(code as u64, enc.encode(set));
        }
    }
}

use proptest::prelude::*;
use selfsim::{Alphabet, PostCriticalWord, Ray};

fn alphabet() -> Alphabet {
    Alphabet::new(["0", "1", "2"]).unwrap()
}

fn word(max: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..3, 0..max)
}

fn nonempty(max: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..3, 1..max)
}

/// Letters of `pre · per^∞` read naively.
fn naive_ray(pre: &[usize], per: &[usize], n: usize) -> Vec<usize> {
    pre.iter().chain(per.iter().cycle()).take(n).copied().collect()
}

/// Last `n` letters of `^∞per · suf`, in order.
fn naive_left(per: &[usize], suf: &[usize], n: usize) -> Vec<usize> {
    let mut rev: Vec<usize> = suf.iter().rev().chain(per.iter().rev().cycle()).take(n).copied().collect();
    rev.reverse();
    rev
}

proptest! {
    #[test]
    fn ray_is_canonical(pre in word(5), per in nonempty(4), reps in 1usize..4, rot in 0usize..4) {
        let r = Ray::new(pre.clone(), per.clone()).unwrap();
        // Same infinite word, different presentations.
        let mut pre2 = pre.clone();
        pre2.extend(per.iter().take(rot % per.len()));
        let mut per2 = per.clone();
        per2.rotate_left(rot % per.len());
        let per2: Vec<usize> = per2.iter().cycle().take(per.len() * reps).copied().collect();
        let r2 = Ray::new(pre2, per2).unwrap();
        prop_assert_eq!(&r, &r2);
        prop_assert_eq!(r.prefix(40), naive_ray(&pre, &per, 40));
        // No shorter presentation exists.
        prop_assert!(r.preperiod().last() != r.period().last() || r.preperiod().is_empty());
        let p = r.period();
        prop_assert!((1..p.len()).all(|d| p.len() % d != 0 || (0..p.len()).any(|i| p[i] != p[i % d])));
    }

    #[test]
    fn ray_round_trips(pre in word(5), per in nonempty(4)) {
        let a = alphabet();
        let r = Ray::new(pre, per).unwrap();
        prop_assert_eq!(Ray::parse(&a, &r.render(&a)).unwrap(), r.clone());
        prop_assert_eq!(Ray::from_json(&a, &r.to_json(&a)).unwrap(), r);
    }

    #[test]
    fn ray_shift_drops_letters(pre in word(5), per in nonempty(4), k in 0usize..12) {
        let r = Ray::new(pre.clone(), per.clone()).unwrap();
        prop_assert_eq!(r.shift(k).prefix(30), naive_ray(&pre, &per, k + 30)[k..].to_vec());
    }

    #[test]
    fn left_words_are_canonical(suf in word(5), per in nonempty(4), reps in 1usize..3, extra in 0usize..4) {
        let w = PostCriticalWord::new(per.clone(), suf.clone()).unwrap();
        prop_assert_eq!(w.tail(30), naive_left(&per, &suf, 30));
        // Absorbing copies of the period into the suffix changes nothing.
        let longer: Vec<usize> = per.iter().cycle().skip(per.len() * 4 - extra % per.len()).take(extra % per.len()).copied().collect();
        let mut suf2 = longer;
        suf2.extend(&suf);
        let per2: Vec<usize> = per.iter().cycle().take(per.len() * reps).copied().collect();
        let per2 = {
            let mut p = per2;
            let shift = extra % per.len();
            p.rotate_right(shift);
            p
        };
        let w2 = PostCriticalWord::new(per2, suf2).unwrap();
        prop_assert_eq!(w.tail(30), w2.tail(30));
        prop_assert_eq!(&w, &w2);
        prop_assert!(w.suffix().first() != w.period().first() || w.suffix().is_empty());
    }

    #[test]
    fn left_words_push_pop(suf in word(5), per in nonempty(4), s in 0usize..3) {
        let a = alphabet();
        let w = PostCriticalWord::new(per, suf).unwrap();
        let pushed = w.push(s);
        prop_assert_eq!(pushed.pop(), (w.clone(), s));
        prop_assert_eq!(PostCriticalWord::parse(&a, &w.render(&a)).unwrap(), w);
    }
}

#[test]
fn ray_rendering() {
    let a = alphabet();
    let r = Ray::new(vec![1, 0, 1, 0], vec![1, 0, 1, 0]).unwrap();
    assert_eq!(r.render(&a), "(10)");
    let r = Ray::new(vec![2, 0], vec![1, 0]).unwrap();
    assert_eq!(r.render(&a), "2(01)");
    assert!(Ray::new(vec![0], vec![]).is_err());
    assert!(Ray::parse(&a, "01").is_err());
}

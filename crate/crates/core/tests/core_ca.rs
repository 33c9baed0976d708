mod common;

use common::*;
use proptest::prelude::*;
use rcalab::format::{parse_rule_file, write_rule_file};
use rcalab::mult::{config_of, make_mult_ca, real_of};
use rcalab::{Alphabet, CellularAutomaton, Configuration, Error, GlobalMap, SpaceTimeDiagram};

use num_bigint::BigInt;
use num_rational::BigRational;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn sigma_table() -> CellularAutomaton {
    CellularAutomaton::from_fn(Alphabet::numeric(3).unwrap(), 0, 1, |w| w[1]).unwrap()
}

#[test]
fn alphabet_rejects_duplicates_and_reserved_names() {
    assert!(Alphabet::new(&["a", "b", "a"]).is_err());
    assert!(Alphabet::new::<&str>(&[]).is_err());
    assert!(Alphabet::new(&["a b"]).is_err());
    assert!(Alphabet::new(&["a|b"]).is_err());
    let a = Alphabet::new(&["x", "yy", "z"]).unwrap();
    for s in a.symbols() {
        assert_eq!(a.lookup(a.name(s)), Some(s));
    }
}

#[test]
fn product_alphabet_names_pairs() {
    let a = Alphabet::new(&["a", "b"]).unwrap();
    let b = Alphabet::numeric(3).unwrap();
    let p = a.product(&b).unwrap();
    assert_eq!(p.len(), 6);
    assert_eq!(p.name(1 * 3 + 2), "(b,2)");
}

#[test]
fn parse_word_forms() {
    let a = Alphabet::numeric(4).unwrap();
    assert_eq!(a.parse_word("0123").unwrap(), vec![0, 1, 2, 3]);
    assert_eq!(a.parse_word("3 2").unwrap(), vec![3, 2]);
    assert!(a.parse_word("9").is_err());
    let multi = Alphabet::new(&["ab", "c"]).unwrap();
    assert!(multi.parse_word("abc").is_err());
    assert_eq!(multi.parse_word("ab c ab").unwrap(), vec![0, 1, 0]);
}

#[test]
fn normalization_trims_center() {
    let c = Configuration::new(vec![0, 0], vec![0, 1, 0, 0], vec![0]).unwrap();
    assert_eq!(c.left(), &[0]);
    assert_eq!(c.center(), &[1]);
    assert_eq!(c.start(), 1);
    assert_eq!(c.right(), &[0]);
}

#[test]
fn periodic_recenters() {
    let a = Configuration::periodic(vec![0, 1]).unwrap();
    assert_eq!(a, a.shift(2));
    assert_eq!(a.shift(2).start(), 0);
    assert_ne!(a, a.shift(1));
}

#[test]
fn reflect_is_involution() {
    let c = Configuration::with_start(vec![1, 2], vec![0, 2, 1], vec![2, 2, 0], -3).unwrap();
    assert_eq!(c.reflect().reflect(), c);
    for i in -10..10 {
        assert_eq!(c.reflect().get(i), c.get(-i));
    }
}

#[test]
fn config_text_round_trip() {
    let a = Alphabet::numeric(3).unwrap();
    let c = Configuration::parse(&a, "01|2201|2@-2").unwrap();
    assert_eq!(Configuration::parse(&a, &c.format(&a)).unwrap(), c);
    assert_eq!(c.get(-2), 2);
    assert_eq!(c.get(-3), 1);
    assert_eq!(c.get(2), 2);
    assert!(Configuration::parse(&a, "0|1").is_err());
    assert!(Configuration::parse(&a, "|1|0").is_err());
}

#[test]
fn apply_word_examples() {
    let mul = make_mult_ca(3, 6).unwrap();
    assert_eq!(mul.apply_word(&[0, 3]).unwrap(), vec![1]);
    let id = CellularAutomaton::identity(Alphabet::numeric(3).unwrap());
    assert_eq!(id.apply_word(&[0, 1, 2]).unwrap(), vec![0, 1, 2]);
    assert_eq!(sigma_table().apply_word(&[1, 2, 0]).unwrap(), vec![2, 0]);
    assert!(matches!(mul.apply_word(&[1]), Err(Error::WindowTooShort { need: 2, got: 1 })));
}

#[test]
fn shift_moves_left() {
    let s = shift(2);
    let x = Configuration::new(vec![0], vec![1], vec![0]).unwrap();
    let y = s.step(&x).unwrap();
    assert_eq!(y.get(-1), 1);
    assert_eq!(y.get(0), 0);
    assert!(sigma_table().same_map(&CellularAutomaton::shift_map(Alphabet::numeric(3).unwrap(), 1)).unwrap());
}

#[test]
fn mult_step_on_one_half() {
    let mul = make_mult_ca(3, 6).unwrap();
    let x = config_of(&rat(1, 2), 6).unwrap();
    let y = mul.step(&x).unwrap();
    assert_eq!(y, config_of(&rat(3, 2), 6).unwrap());
    assert_eq!((y.get(0), y.get(1)), (1, 3));
}

#[test]
fn uniform_background_stays_uniform() {
    let mut r = rng(1);
    for _ in 0..20 {
        let f = random_ca(&mut r, 3, -1, 1);
        for b in 0..3 {
            let y = f.step(&Configuration::uniform(b)).unwrap();
            assert_eq!(y, Configuration::uniform(f.local(&[b, b, b]).unwrap()));
        }
    }
}

#[test]
fn step_rejects_foreign_symbols() {
    let x = Configuration::new(vec![0], vec![5], vec![0]).unwrap();
    assert!(matches!(shift(2).step(&x), Err(Error::AlphabetMismatch(_))));
}

#[test]
fn compose_examples() {
    let s = shift(3);
    let ss = s.compose(&s).unwrap();
    assert!(ss.same_map(&CellularAutomaton::shift_map(Alphabet::numeric(3).unwrap(), 2)).unwrap());
    let m3 = make_mult_ca(3, 6).unwrap();
    let m2 = make_mult_ca(2, 6).unwrap();
    let c = m3.compose(&m2).unwrap();
    assert!(c.same_map(&shift(6)).unwrap());
    assert!(agree_on_random(&c, &shift(6), 50, 7));
    let id = CellularAutomaton::identity(Alphabet::numeric(6).unwrap());
    assert!(id.compose(&m3).unwrap().same_map(&m3).unwrap());
    assert_eq!((c.memory(), c.anticipation()), (0, 2));
}

#[test]
fn compose_checks_alphabets() {
    assert!(matches!(shift(2).compose(&shift(3)), Err(Error::AlphabetMismatch(_))));
}

#[test]
fn lazy_composition_matches_table() {
    // 6^13 entries exceed the table cap, so this stays lazy.
    let m2 = make_mult_ca(2, 6).unwrap();
    let p = m2.power(12).unwrap();
    assert!(p.is_lazy());
    let mut r = rng(3);
    for _ in 0..20 {
        let x = random_config(&mut r, 6, 3, 10);
        assert_eq!(p.step(&x).unwrap(), m2.iterate(&x, 12).unwrap());
    }
}

#[test]
fn product_examples() {
    let a = Alphabet::numeric(2).unwrap();
    let b = Alphabet::numeric(3).unwrap();
    let ida = CellularAutomaton::identity(a.clone());
    let idb = CellularAutomaton::identity(b.clone());
    let ab = a.product(&b).unwrap();
    assert!(ida.product(&idb).unwrap().same_map(&CellularAutomaton::identity(ab.clone())).unwrap());
    let sa = CellularAutomaton::shift_map(a, 1);
    let sb = CellularAutomaton::shift_map(b, 1);
    assert!(sa.product(&sb).unwrap().same_map(&CellularAutomaton::shift_map(ab, 1)).unwrap());
}

#[test]
fn product_acts_componentwise() {
    let mut r = rng(5);
    let f = random_ca(&mut r, 2, 0, 1);
    let g = random_ca(&mut r, 3, -1, 0);
    let fg = f.product(&g).unwrap();
    for _ in 0..30 {
        let x1 = random_config(&mut r, 2, 3, 8);
        let x2 = random_config(&mut r, 3, 3, 8);
        let joint = x1.zip(&x2, |a, b| a * 3 + b);
        let img = fg.step(&joint).unwrap();
        assert_eq!(img.map_symbols(|s| s / 3), f.step(&x1).unwrap());
        assert_eq!(img.map_symbols(|s| s % 3), g.step(&x2).unwrap());
    }
}

#[test]
fn iterate_examples() {
    let s = shift(2);
    let x = Configuration::new(vec![0], vec![1], vec![0]).unwrap();
    let d = SpaceTimeDiagram::compute(&s, &x, 0).unwrap();
    assert_eq!(d.rows, vec![x.clone()]);
    let d = SpaceTimeDiagram::compute(&s, &x, 3).unwrap();
    for t in 0..=3usize {
        assert_eq!(d.at(t, -(t as i64)), 1);
    }
    let m2 = make_mult_ca(2, 6).unwrap();
    let d = SpaceTimeDiagram::compute(&m2, &config_of(&rat(1, 1), 6).unwrap(), 3).unwrap();
    let values: Vec<BigRational> = d.rows.iter().map(|r| real_of(r, 6).unwrap()).collect();
    assert_eq!(values, [1, 2, 4, 8].map(|v| rat(v, 1)));
}

#[test]
fn diagram_rows_follow_the_map() {
    let mut r = rng(11);
    let f = random_ca(&mut r, 3, -1, 1);
    let x = random_config(&mut r, 3, 3, 6);
    let d = SpaceTimeDiagram::compute(&f, &x, 8).unwrap();
    assert_eq!(d.steps(), 8);
    for t in 0..8 {
        assert_eq!(d.rows[t + 1], f.step(&d.rows[t]).unwrap());
    }
}

#[test]
fn diagram_render() {
    let s = shift(2);
    let x = Configuration::new(vec![0], vec![1], vec![0]).unwrap();
    let text = SpaceTimeDiagram::compute(&s, &x, 2).unwrap().render(s.alphabet(), -2, 1);
    assert_eq!(text, "   0 0010\n   1 0100\n   2 1000\n");
    let wide = Alphabet::new(&["aa", "b"]).unwrap();
    let id = CellularAutomaton::identity(wide.clone());
    let text = SpaceTimeDiagram::compute(&id, &x, 0).unwrap().render(&wide, 0, 0);
    assert!(text.contains("legend: 0=aa 1=b"));
}

#[test]
fn rule_file_round_trip() {
    let mut r = rng(9);
    for ca in [make_mult_ca(3, 6).unwrap(), random_ca(&mut r, 3, -1, 1), shift(4)] {
        let text = write_rule_file(&ca).unwrap();
        let back = parse_rule_file(&text).unwrap();
        assert_eq!(back.table(), ca.table());
        assert_eq!((back.memory(), back.anticipation()), (ca.memory(), ca.anticipation()));
    }
}

#[test]
fn rule_file_defaults_and_errors() {
    let text = "ca v1\n# xor\nalphabet 0 1\nmemory 0\nanticipation 1\n0 1 -> 1\n1 0 -> 1\ndefault 0\n";
    let ca = parse_rule_file(text).unwrap();
    assert_eq!(ca.apply_word(&[0, 1, 1, 0, 0]).unwrap(), vec![1, 0, 1, 0]);
    let id = "ca v1\nalphabet a b\nmemory -1\nanticipation 1\na b a -> b\ndefault identity\n";
    let ca = parse_rule_file(id).unwrap();
    assert_eq!(ca.apply_word(&[0, 1, 0, 0, 0]).unwrap(), vec![1, 0, 0]);
    let gaps = "ca v1\nalphabet 0 1\nmemory 0\nanticipation 0\n0 -> 1\n";
    assert!(matches!(parse_rule_file(gaps), Err(Error::Parse { .. })));
    let bad = "ca v1\nalphabet 0 1\nmemory 0\nanticipation 0\n0 -> 7\ndefault 0\n";
    assert!(matches!(parse_rule_file(bad), Err(Error::Parse { line: 5, .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn apply_word_length_contract(f in ca_strategy(3), w in prop::collection::vec(0u16..3, 3..20)) {
        let out = f.apply_word(&w).unwrap();
        prop_assert_eq!(out.len(), w.len() - f.shrink());
    }

    #[test]
    fn step_reads_like_apply_word(f in ca_strategy(3), x in config_strategy(3), i in -12i64..12, len in 1i64..10) {
        let y = f.step(&x).unwrap();
        let j = i + len;
        let src = x.window(i + f.memory(), j + f.anticipation());
        prop_assert_eq!(y.window(i, j), f.apply_word(&src).unwrap());
    }

    #[test]
    fn compose_is_associative(h in ca_strategy(2), g in ca_strategy(2), f in ca_strategy(2), x in config_strategy(2)) {
        let left = h.compose(&g).unwrap().compose(&f).unwrap();
        let right = h.compose(&g.compose(&f).unwrap()).unwrap();
        prop_assert_eq!(left.step(&x).unwrap(), right.step(&x).unwrap());
        prop_assert_eq!(left.step(&x).unwrap(), h.step(&g.step(&f.step(&x).unwrap()).unwrap()).unwrap());
    }

    #[test]
    fn step_commutes_with_shift(f in ca_strategy(3), x in config_strategy(3), k in -7i64..7) {
        prop_assert_eq!(f.step(&x.shift(k)).unwrap(), f.step(&x).unwrap().shift(k));
    }

    #[test]
    fn equality_is_pointwise(x in config_strategy(2), y in config_strategy(2)) {
        let lo = x.start().min(y.start()) - 12;
        let hi = x.end().max(y.end()) + 12;
        prop_assert_eq!(x == y, x.window(lo, hi) == y.window(lo, hi));
    }
}

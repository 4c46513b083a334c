mod common;

use common::{all_diagrams, biquandle, braid_diagram, brute_force_colorings as brute_force, diagram, rank_mod_p, BIQUANDLES};
use proptest::prelude::*;
use tracebracket::biquandle::Biquandle;
use tracebracket::coloring::{counting_invariant, enumerate_colorings, monochromatic_riii_check, validate_coloring, ColoringError};
use tracebracket::diagram::{Diagram, Sign};

/// Colorings by an Alexander biquandle over a prime field form a vector
/// space; its dimension is the nullity of the crossing equations.
fn alexander_count(d: &Diagram, p: u64, t: i64, s: i64) -> usize {
    let m = d.arc_count();
    let mut rows = Vec::new();
    for cr in d.crossings() {
        let (a, b, d1, d2) = match cr.sign {
            Sign::Pos => (cr.u_in, cr.o_out, cr.u_out, cr.o_in),
            Sign::Neg => (cr.u_out, cr.o_in, cr.u_in, cr.o_out),
        };
        let mut r1 = vec![0i64; m];
        r1[a] += t;
        r1[b] += s - t;
        r1[d1] -= 1;
        let mut r2 = vec![0i64; m];
        r2[b] += s;
        r2[d2] -= 1;
        rows.push(r1);
        rows.push(r2);
    }
    let nullity = m - rank_mod_p(rows, p as i64);
    (p as usize).pow((nullity + d.free_loops()) as u32)
}

#[test]
fn trefoil_has_nine_alexander_colorings() {
    let d = diagram("trefoil_pos.dgm");
    let x = biquandle("alexander_3_1_2.txt");
    assert_eq!(enumerate_colorings(&d, &x).len(), 9);
    assert_eq!(counting_invariant(&d, &x), 9);
    assert_eq!(alexander_count(&d, 3, 1, 2), 9);
}

#[test]
fn fixtures_match_brute_force() {
    for (name, d) in all_diagrams() {
        if d.color_slots() > 8 {
            continue;
        }
        for q in BIQUANDLES {
            let x = biquandle(q);
            assert_eq!(enumerate_colorings(&d, &x), brute_force(&d, &x), "{name} {q}");
        }
    }
}

#[test]
fn fixtures_match_alexander_nullity() {
    for (p, t, s) in [(3, 1, 2), (5, 2, 3), (5, 1, 4), (7, 3, 5), (2, 1, 1)] {
        let x = Biquandle::alexander(p, t, s).unwrap();
        for (name, d) in all_diagrams() {
            assert_eq!(
                counting_invariant(&d, &x),
                alexander_count(&d, p, t as i64, s as i64),
                "{name} alexander({p},{t},{s})"
            );
        }
    }
}

#[test]
fn enumerated_colorings_validate() {
    for (name, d) in all_diagrams() {
        for q in BIQUANDLES {
            let x = biquandle(q);
            let cs = enumerate_colorings(&d, &x);
            assert!(cs.windows(2).all(|w| w[0] < w[1]), "{name} {q}");
            for c in cs {
                assert_eq!(validate_coloring(&d, &x, &c), Ok(true));
            }
        }
    }
}

#[test]
fn validate_rejects_bad_input() {
    let d = diagram("hopf_pos.dgm");
    let x = biquandle("bq2.txt");
    assert_eq!(
        validate_coloring(&d, &x, &[0, 0]),
        Err(ColoringError::WrongLength { expected: 4, found: 2 })
    );
    assert_eq!(
        validate_coloring(&d, &x, &[0, 0, 5, 0]),
        Err(ColoringError::OutOfRange { color: 5, size: 2 })
    );
    let all: Vec<Vec<usize>> = (0..16).map(|k| (0..4).map(|i| k >> i & 1).collect()).collect();
    let valid = all.iter().filter(|c| validate_coloring(&d, &x, c).unwrap()).count();
    assert_eq!(valid, enumerate_colorings(&d, &x).len());
}

#[test]
fn counts_agree_across_reidemeister_pairs() {
    let pairs = [
        ("unknot0.dgm", "unknot_kink_pos.dgm"),
        ("unknot0.dgm", "unknot_kink_neg.dgm"),
        ("trefoil_pos.dgm", "trefoil_rii.dgm"),
        ("riii_a.dgm", "riii_b.dgm"),
        ("riii_mixed_a.dgm", "riii_mixed_b.dgm"),
    ];
    let unlink = Diagram::new(Vec::new(), 2);
    let mut shipped: Vec<Biquandle> = BIQUANDLES.iter().map(|q| biquandle(q)).collect();
    shipped.push(Biquandle::alexander(5, 2, 3).unwrap());
    shipped.push(Biquandle::trivial(3));
    for x in &shipped {
        for (a, b) in pairs {
            assert_eq!(counting_invariant(&diagram(a), x), counting_invariant(&diagram(b), x), "{a} {b}\n{x}");
        }
        assert_eq!(counting_invariant(&diagram("unlink_rii.dgm"), x), counting_invariant(&unlink, x));
    }
}

#[test]
fn monochromatic_riii_holds_for_shipped_biquandles() {
    for q in BIQUANDLES {
        let x = biquandle(q);
        let report = monochromatic_riii_check(&x);
        assert!(report.passed(), "{q}: {:?}", report.failures);
        assert_eq!(report.checked, 8 * x.size());
    }
}

#[test]
fn monochromatic_riii_fails_when_kink_map_is_not_an_involution() {
    let x = Biquandle::alexander(5, 1, 2).unwrap();
    assert!(x.is_valid());
    assert_ne!(x.kink(x.kink(1)), 1);
    assert!(!monochromatic_riii_check(&x).passed());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_diagrams_match_brute_force(d in braid_diagram(4), q in 0usize..4) {
        let x = biquandle(BIQUANDLES[q]);
        prop_assert_eq!(enumerate_colorings(&d, &x), brute_force(&d, &x));
    }

    #[test]
    fn random_diagrams_match_alexander_nullity(d in braid_diagram(8)) {
        let x = Biquandle::alexander(5, 2, 3).unwrap();
        prop_assert_eq!(counting_invariant(&d, &x), alexander_count(&d, 5, 2, 3));
    }
}

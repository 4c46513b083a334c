mod common;

use common::{all_brackets, all_diagrams, bracket, braid_diagram, read};
use proptest::prelude::*;
use tracebracket::algebra::Elem;
use tracebracket::bracket::{classify_adequacy, state_sum, Bracket};
use tracebracket::coloring::enumerate_colorings;
use tracebracket::diagram::{Sign, Smoothing};
use tracebracket::search::{search_brackets, SearchSpec};
use tracebracket::trace::{all_moves, trace_move_fixture_check, MoveFamily, NodeKind, Parity, TraceDiagram, TraceError, TraceFile};

/// Walks the trace-deleted diagram forward from the over-exit of `index`,
/// returning the parity found and the nodes met on the way.
fn walk_parity(t: &TraceDiagram, index: usize) -> (Parity, Vec<usize>) {
    #[derive(Clone, Copy, PartialEq)]
    enum S {
        UIn,
        OIn,
        OOut,
        UOut,
    }
    let slot = |n: usize, s: S| {
        let r = t.nodes()[n].rec;
        match s {
            S::UIn => r.u_in,
            S::OIn => r.o_in,
            S::OOut => r.o_out,
            S::UOut => r.u_out,
        }
    };
    let partner = |n: usize, s: S| match (t.nodes()[n].kind, s) {
        (NodeKind::Crossing, S::UIn) => S::UOut,
        (NodeKind::Crossing, S::UOut) => S::UIn,
        (NodeKind::Crossing, S::OIn) => S::OOut,
        (NodeKind::Crossing, S::OOut) => S::OIn,
        (NodeKind::TraceA, S::UIn) => S::OOut,
        (NodeKind::TraceA, S::OOut) => S::UIn,
        (NodeKind::TraceA, S::OIn) => S::UOut,
        (NodeKind::TraceA, S::UOut) => S::OIn,
        (NodeKind::TraceB, S::UIn) => S::OIn,
        (NodeKind::TraceB, S::OIn) => S::UIn,
        (NodeKind::TraceB, S::OOut) => S::UOut,
        (NodeKind::TraceB, S::UOut) => S::OOut,
    };
    let find = |edge: usize, heads: bool| {
        (0..t.nodes().len())
            .flat_map(|n| {
                let ss = if heads { [S::UIn, S::OIn] } else { [S::OOut, S::UOut] };
                ss.into_iter().map(move |s| (n, s))
            })
            .find(|&(n, s)| slot(n, s) == edge)
            .unwrap()
    };
    let (mut edge, mut forward) = (slot(index, S::OOut), true);
    let mut reversals = 0;
    let mut met = Vec::new();
    loop {
        let (n, s) = find(edge, forward);
        if n == index {
            let p = match s {
                S::OIn => Parity::MultiComponent,
                _ if reversals % 2 == 1 => Parity::Odd,
                _ => Parity::Even,
            };
            return (p, met);
        }
        met.push(n);
        if t.nodes()[n].kind == NodeKind::TraceB {
            reversals += 1;
        }
        let out = partner(n, s);
        forward = matches!(out, S::OOut | S::UOut);
        edge = slot(n, out);
    }
}

fn trace_file(name: &str) -> TraceFile {
    TraceFile::parse(&read(name)).unwrap()
}

/// `A + δB` at a positive node's key colors.
fn phi(t: &TraceDiagram, i: usize, c: &[usize], beta: &Bracket) -> Elem {
    let rec = t.nodes()[i].rec;
    assert_eq!(rec.sign, Sign::Pos);
    let (k1, k2) = rec.key_slots();
    beta.a(c[k1], c[k2]) + beta.delta() * beta.b(c[k1], c[k2])
}

/// Smooths the crossings selected by `mask`, each into the kind chosen by
/// `kinds`, keeping the coloring.
fn partially_smoothed(t: &TraceDiagram, c: &[usize], beta: &Bracket, mask: u32, kinds: u32) -> TraceDiagram {
    let mut out = t.clone();
    for i in t.crossing_indices() {
        if mask >> i & 1 == 1 {
            let kind = if kinds >> i & 1 == 1 { Smoothing::B } else { Smoothing::A };
            out = out.smooth_crossing(i, kind, c, beta).unwrap().1;
        }
    }
    out
}

#[test]
fn recursive_matches_state_sum_everywhere() {
    for (bname, br) in all_brackets() {
        for (dname, d) in all_diagrams() {
            let t = TraceDiagram::from_diagram(&d);
            for c in enumerate_colorings(&d, br.biquandle()) {
                let expected = state_sum(&d, &c, &br).unwrap();
                assert_eq!(t.evaluate_recursive(&c, &br).unwrap(), expected, "{bname} {dname} {c:?}");
                assert_eq!(t.evaluate_state_sum(&c, &br).unwrap(), expected, "{bname} {dname} {c:?}");
                assert_eq!(t.evaluate_hybrid(&c, &br).unwrap(), expected, "{bname} {dname} {c:?}");
            }
        }
    }
}

#[test]
fn smoothing_expands_linearly() {
    for (bname, br) in all_brackets() {
        for (dname, d) in all_diagrams() {
            let t = TraceDiagram::from_diagram(&d);
            let Some(&i) = t.crossing_indices().first() else { continue };
            for c in enumerate_colorings(&d, br.biquandle()) {
                let (ca, ta) = t.smooth_crossing(i, Smoothing::A, &c, &br).unwrap();
                let (cb, tb) = t.smooth_crossing(i, Smoothing::B, &c, &br).unwrap();
                assert_eq!(ta.nodes()[i].kind, NodeKind::TraceA);
                assert_eq!(tb.nodes()[i].kind, NodeKind::TraceB);
                let sum = ca * ta.evaluate_recursive(&c, &br).unwrap() + cb * tb.evaluate_recursive(&c, &br).unwrap();
                assert_eq!(sum, t.evaluate_recursive(&c, &br).unwrap(), "{bname} {dname}");
            }
        }
    }
}

#[test]
fn trefoil_three_ways() {
    let br = bracket("bq1.txt", "br_generic.txt");
    let d = common::diagram("trefoil_pos.dgm");
    let t = TraceDiagram::from_diagram(&d);
    let c = vec![0; 6];
    let expected = "-A^-1*B - A^-3*B^3 - A^-5*B^5 + A^-9*B^9";
    assert_eq!(state_sum(&d, &c, &br).unwrap().to_string(), expected);
    assert_eq!(t.evaluate_hybrid(&c, &br).unwrap().to_string(), expected);
    assert_eq!(tracebracket::bracket::skein_reduce(&d, &br, 0).unwrap().to_string(), expected);
}

#[test]
fn parity_example() {
    let f = trace_file("parity_example.trd");
    let t = &f.diagram;
    assert_eq!(t.magnetic_parity(0), Ok(Parity::Odd));
    assert_eq!(t.magnetic_parity(1), Ok(Parity::Odd));
    assert_eq!(t.is_ri_reducible(), Ok(true));
    assert_eq!(t.magnetic_parity(2), Err(TraceError::NotACrossing(2)));
    for (name, br) in all_brackets() {
        let colorings = f.colorings(br.biquandle()).unwrap();
        for c in &colorings {
            let by_parity = t.evaluate_by_parity(c, &br).unwrap();
            let expected = phi(t, 0, c, &br) * phi(t, 1, c, &br) * br.delta() * br.w().powi(-3).unwrap();
            assert_eq!(by_parity, expected, "{name}");
            assert_eq!(t.evaluate_recursive(c, &br).unwrap(), expected, "{name}");
            assert_eq!(t.evaluate_state_sum(c, &br).unwrap(), expected, "{name}");
        }
    }
    let br = bracket("bq1.txt", "br_generic.txt");
    let c = &f.colorings(br.biquandle()).unwrap()[0];
    assert_eq!(t.evaluate_by_parity(c, &br).unwrap().to_string(), "A^-7*B^6 + A^-9*B^8");
}

#[test]
fn hopf_with_trace_has_no_single_component_crossing() {
    let t = trace_file("hopf_btrace.trd").diagram;
    for i in t.crossing_indices() {
        assert_eq!(t.magnetic_parity(i), Ok(Parity::MultiComponent));
    }
    let br = bracket("bq1.txt", "br_generic.txt");
    let c = vec![0; t.color_slots()];
    assert!(t.evaluate_by_parity(&c, &br).is_err());
    assert_eq!(t.evaluate_hybrid(&c, &br).unwrap(), t.evaluate_recursive(&c, &br).unwrap());
}

#[test]
fn crossingless_values() {
    let t = TraceFile::parse("traceA + pass(1,1) pass(2,3)\ntraceB - sink(3,4) source(4,2)\n").unwrap().diagram;
    for (name, br) in all_brackets() {
        assert_eq!(t.evaluate_crossingless(&br).unwrap(), br.delta_pow(2), "{name}");
    }
    let t = TraceFile::parse("traceA + pass(1,2) pass(2,1)\n").unwrap().diagram;
    let br = bracket("bq2.txt", "br_z7.txt");
    assert_eq!(t.evaluate_crossingless(&br).unwrap(), br.delta_pow(1) * br.w_pow(-1));
    let t = TraceDiagram::from_diagram(&common::diagram("hopf_pos.dgm"));
    assert_eq!(t.evaluate_crossingless(&br), Err(TraceError::CrossingsPresent));
}

#[test]
fn trace_files_round_trip() {
    for name in ["parity_example.trd", "hopf_btrace.trd"] {
        let f = trace_file(name);
        assert!(f.diagram.is_closed());
        assert_eq!(TraceFile::parse(&f.diagram.to_string()).unwrap().diagram, f.diagram);
    }
    assert!(TraceFile::parse("traceB + sink(1,2) pass(3,4)\n").is_err());
    assert!(TraceFile::parse("traceA * pass(1,2) pass(2,1)\n").is_err());
    assert!(TraceFile::parse("traceA + pass(1,2) pass(2,1)\ncolors 1\n").is_err());
}

#[test]
fn colors_line_selects_one_coloring() {
    let br = bracket("bq2.txt", "br_z7.txt");
    let plain = trace_file("parity_example.trd");
    let all = plain.colorings(br.biquandle()).unwrap();
    assert!(!all.is_empty());
    let line: Vec<String> = all[0].iter().map(|v| (v + 1).to_string()).collect();
    let text = format!("{}colors {}\n", read("parity_example.trd"), line.join(" "));
    let f = TraceFile::parse(&text).unwrap();
    assert_eq!(f.colorings(br.biquandle()).unwrap(), vec![all[0].clone()]);
}

#[test]
fn move_checks_agree_with_classification() {
    let moves = all_moves();
    assert_eq!(moves.len(), 24);
    for (name, br) in all_brackets() {
        let class = classify_adequacy(&br);
        let holds = |family| {
            moves
                .iter()
                .filter(|m| m.family == family)
                .all(|m| trace_move_fixture_check(&br, m))
        };
        assert_eq!(holds(MoveFamily::Over), class.over, "{name}");
        assert_eq!(holds(MoveFamily::Under), class.under, "{name}");
        assert_eq!(holds(MoveFamily::PassThrough), class.passthrough, "{name}");
    }
}

#[test]
fn pass_through_moves_agree_on_searched_brackets() {
    let moves: Vec<_> = all_moves().into_iter().filter(|m| m.family == MoveFamily::PassThrough).collect();
    let mut seen = (0, 0);
    for (q, n) in [("bq2.txt", 5), ("bq1.txt", 13)] {
        for (br, class) in search_brackets(&SearchSpec::new(common::biquandle(q), n)).unwrap() {
            let holds = moves.iter().all(|m| trace_move_fixture_check(&br, m));
            assert_eq!(holds, class.passthrough, "{q} mod {n}\n{br}");
            if holds {
                seen.0 += 1;
            } else {
                seen.1 += 1;
            }
        }
    }
    assert!(seen.0 > 0 && seen.1 > 0, "{seen:?}");
}

#[test]
fn move_names_are_distinct() {
    let mut names: Vec<String> = all_moves().iter().map(|m| m.name()).collect();
    names.sort();
    names.dedup();
    assert_eq!(names.len(), 24);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn expansion_order_does_not_matter(d in braid_diagram(6), seed in any::<u64>(), b in 0usize..7) {
        let (_, br) = all_brackets().swap_remove(b);
        let t = TraceDiagram::from_diagram(&d);
        let mut order = t.crossing_indices();
        let mut s = seed;
        for i in (1..order.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (s >> 33) as usize % (i + 1));
        }
        for c in enumerate_colorings(&d, br.biquandle()) {
            prop_assert_eq!(
                t.evaluate_recursive_with_order(&c, &br, &order).unwrap(),
                t.evaluate_recursive(&c, &br).unwrap()
            );
        }
    }

    #[test]
    fn shortcuts_match_recursion_on_partial_smoothings(d in braid_diagram(6), mask in any::<u32>(), kinds in any::<u32>(), b in 0usize..7) {
        let (_, br) = all_brackets().swap_remove(b);
        let t = TraceDiagram::from_diagram(&d);
        for c in enumerate_colorings(&d, br.biquandle()) {
            let p = partially_smoothed(&t, &c, &br, mask, kinds);
            let rec = p.evaluate_recursive(&c, &br).unwrap();
            prop_assert_eq!(p.evaluate_state_sum(&c, &br).unwrap(), rec.clone());
            prop_assert_eq!(p.evaluate_hybrid(&c, &br).unwrap(), rec.clone());
            if let Ok(v) = p.evaluate_by_parity(&c, &br) {
                prop_assert_eq!(v, rec);
            }
        }
    }

    #[test]
    fn parity_matches_walk_oracle(d in braid_diagram(6), mask in any::<u32>(), kinds in any::<u32>()) {
        let br = bracket("bq1.txt", "br_generic.txt");
        let t = TraceDiagram::from_diagram(&d);
        let c = vec![0; t.color_slots()];
        let p = partially_smoothed(&t, &c, &br, mask, kinds);
        for i in p.crossing_indices() {
            prop_assert_eq!(p.magnetic_parity(i).unwrap(), walk_parity(&p, i).0);
        }
    }

    #[test]
    fn parity_ignores_smoothings_off_the_walk(d in braid_diagram(6), kinds in any::<u32>()) {
        let br = bracket("bq1.txt", "br_generic.txt");
        let t = TraceDiagram::from_diagram(&d);
        let c = vec![0; t.color_slots()];
        for i in t.crossing_indices() {
            let (parity, met) = walk_parity(&t, i);
            for j in t.crossing_indices() {
                if j == i || met.contains(&j) {
                    continue;
                }
                let kind = if kinds >> j & 1 == 1 { Smoothing::B } else { Smoothing::A };
                let (_, s) = t.smooth_crossing(j, kind, &c, &br).unwrap();
                prop_assert_eq!(s.magnetic_parity(i).unwrap(), parity);
            }
        }
    }

    #[test]
    fn parity_is_defined_on_single_component_crossings(d in braid_diagram(6), mask in any::<u32>()) {
        let br = bracket("bq1.txt", "br_generic.txt");
        let t = TraceDiagram::from_diagram(&d);
        let c = vec![0; t.color_slots()];
        let p = partially_smoothed(&t, &c, &br, mask, mask.rotate_left(7));
        for i in p.crossing_indices() {
            let parity = p.magnetic_parity(i).unwrap();
            if p.crossing_indices().len() == 1 && p.is_ri_reducible().unwrap() {
                prop_assert!(parity != Parity::MultiComponent);
            }
        }
    }
}

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use proptest::prelude::*;
use tracebracket::algebra::{Elem, Laurent};
use tracebracket::biquandle::Biquandle;
use tracebracket::bracket::{verify_bracket, Bracket, BracketTables};
use tracebracket::diagram::{Diagram, Sign, Smoothing};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn read(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn biquandle(name: &str) -> Biquandle {
    Biquandle::parse(&read(name)).unwrap()
}

pub fn diagram(name: &str) -> Diagram {
    Diagram::parse(&read(name)).unwrap()
}

pub fn bracket(bq: &str, br: &str) -> Bracket {
    verify_bracket(&biquandle(bq), &BracketTables::parse(&read(br)).unwrap()).unwrap()
}

pub const BIQUANDLES: [&str; 4] = ["bq1.txt", "bq2.txt", "bq3.txt", "alexander_3_1_2.txt"];

pub const DIAGRAMS: [&str; 11] = [
    "unknot0.dgm",
    "unknot_kink_pos.dgm",
    "unknot_kink_neg.dgm",
    "hopf_pos.dgm",
    "trefoil_pos.dgm",
    "trefoil_rii.dgm",
    "unlink_rii.dgm",
    "figure_eight.dgm",
    "riii_a.dgm",
    "riii_b.dgm",
    "riii_mixed_a.dgm",
];

pub const EXTRA_DIAGRAMS: [&str; 1] = ["riii_mixed_b.dgm"];

pub fn all_diagrams() -> Vec<(&'static str, Diagram)> {
    DIAGRAMS.iter().chain(&EXTRA_DIAGRAMS).map(|&n| (n, diagram(n))).collect()
}

/// Every shipped (biquandle, bracket) pair.
pub const PAIRS: [(&str, &str); 7] = [
    ("bq2.txt", "br_z7.txt"),
    ("bq3.txt", "br_z5_1.txt"),
    ("bq3.txt", "br_z5_2.txt"),
    ("bq3.txt", "br_z5_3.txt"),
    ("bq3.txt", "br_z5_4.txt"),
    ("bq1.txt", "br_generic.txt"),
    ("bq1.txt", "br_kauffman.txt"),
];

pub fn all_brackets() -> Vec<(String, Bracket)> {
    PAIRS
        .iter()
        .map(|(q, b)| (format!("{q}/{b}"), bracket(q, b)))
        .collect()
}

/// Circles of a smoothing state found by walking edge to edge.
pub fn cycle_walk_loops(d: &Diagram, state: &[Smoothing]) -> usize {
    let m = d.arc_count();
    // For each semiarc end, the semiarc end it is glued to by the smoothing.
    // End 2a is the tail of arc a, end 2a+1 its head.
    let mut glue = vec![usize::MAX; 2 * m];
    for (c, &s) in d.crossings().iter().zip(state) {
        let ends: Vec<(usize, usize)> = match s {
            Smoothing::A => vec![(2 * c.u_in + 1, 2 * c.o_out), (2 * c.o_in + 1, 2 * c.u_out)],
            Smoothing::B => vec![(2 * c.u_in + 1, 2 * c.o_in + 1), (2 * c.u_out, 2 * c.o_out)],
        };
        for (p, q) in ends {
            glue[p] = q;
            glue[q] = p;
        }
    }
    let mut seen = vec![false; m];
    let mut circles = 0;
    for start in 0..m {
        if seen[start] {
            continue;
        }
        circles += 1;
        let mut end = 2 * start;
        loop {
            seen[end / 2] = true;
            end = glue[end ^ 1];
            if end / 2 == start {
                break;
            }
        }
    }
    circles + d.free_loops()
}

type Poly = BTreeMap<(i32, i32), i64>;

fn poly_mul(p: &Poly, q: &Poly) -> Poly {
    let mut out = Poly::new();
    for (&(a, b), &c) in p {
        for (&(d, e), &f) in q {
            *out.entry((a + d, b + e)).or_insert(0) += c * f;
        }
    }
    out.retain(|_, v| *v != 0);
    out
}

fn poly_add(p: &mut Poly, q: &Poly) {
    for (&k, &v) in q {
        *p.entry(k).or_insert(0) += v;
    }
    p.retain(|_, v| *v != 0);
}

fn mono(c: i64, i: i32, j: i32) -> Poly {
    Poly::from([((i, j), c)])
}

/// Writhe-normalized Kauffman-style state sum with constant coefficients
/// `A = A^ai B^aj`, `B = A^bi B^bj`, in its own polynomial arithmetic.
pub fn kauffman_oracle(d: &Diagram, a: (i32, i32), b: (i32, i32)) -> Elem {
    let delta = {
        let mut p = mono(-1, b.0 - a.0, b.1 - a.1);
        poly_add(&mut p, &mono(-1, a.0 - b.0, a.1 - b.1));
        p
    };
    let k = d.crossings().len();
    let mut total = Poly::new();
    for mask in 0..1u32 << k {
        let state: Vec<Smoothing> = (0..k)
            .map(|i| if mask >> i & 1 == 1 { Smoothing::B } else { Smoothing::A })
            .collect();
        let mut term = mono(1, 0, 0);
        for (c, s) in d.crossings().iter().zip(&state) {
            let (i, j) = if *s == Smoothing::A { a } else { b };
            let e = if c.sign == Sign::Pos { 1 } else { -1 };
            term = poly_mul(&term, &mono(1, e * i, e * j));
        }
        for _ in 0..cycle_walk_loops(d, &state) {
            term = poly_mul(&term, &delta);
        }
        poly_add(&mut total, &term);
    }
    let (p, n) = d.writhe_counts();
    let wexp = n as i32 - p as i32;
    // w = -A^2 B^-1 in terms of the coefficient monomials
    let w_sign = if wexp % 2 == 0 { 1 } else { -1 };
    let w = mono(w_sign, wexp * (2 * a.0 - b.0), wexp * (2 * a.1 - b.1));
    let result = poly_mul(&total, &w);
    let mut out = Elem::Laurent(Laurent::zero());
    for ((i, j), c) in result {
        out = out + Elem::Laurent(Laurent::monomial(c, i, j));
    }
    out
}

/// Random valid diagrams as braid closures with at most `max_len` crossings.
pub fn braid_diagram(max_len: usize) -> impl Strategy<Value = Diagram> {
    (1usize..=4).prop_flat_map(move |strands| {
        let gens: Vec<i32> = (1..strands as i32).flat_map(|g| [g, -g]).collect();
        let word = if gens.is_empty() {
            Just(Vec::new()).boxed()
        } else {
            proptest::collection::vec(proptest::sample::select(gens), 0..=max_len).boxed()
        };
        word.prop_map(move |w| Diagram::braid_closure(strands, &w))
    })
}

/// Rank of a matrix over `Z/p`, `p` prime.
pub fn rank_mod_p(mut rows: Vec<Vec<i64>>, p: i64) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col].rem_euclid(p) != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = (1..p).find(|v| rows[rank][col].rem_euclid(p) * v % p == 1).unwrap();
        for v in rows[rank].iter_mut() {
            *v = (*v * inv).rem_euclid(p);
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][col].rem_euclid(p) != 0 {
                let f = rows[r][col];
                let pivot_row = rows[rank].clone();
                for (v, pv) in rows[r].iter_mut().zip(&pivot_row) {
                    *v = (*v - f * pv).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Every assignment of colors to semiarcs, filtered by the crossing rule
/// written out per sign.
pub fn brute_force_colorings(d: &Diagram, x: &Biquandle) -> Vec<Vec<usize>> {
    let m = d.color_slots();
    let n = x.size();
    let mut out = Vec::new();
    for code in 0..n.pow(m as u32) {
        let c: Vec<usize> = (0..m).map(|i| code / n.pow((m - 1 - i) as u32) % n).collect();
        let ok = d.crossings().iter().all(|cr| match cr.sign {
            Sign::Pos => {
                c[cr.u_out] == x.under(c[cr.u_in], c[cr.o_out]) && c[cr.o_in] == x.over(c[cr.o_out], c[cr.u_in])
            }
            Sign::Neg => {
                c[cr.u_in] == x.under(c[cr.u_out], c[cr.o_in]) && c[cr.o_out] == x.over(c[cr.o_in], c[cr.u_out])
            }
        });
        if ok {
            out.push(c);
        }
    }
    out
}

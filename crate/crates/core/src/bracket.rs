//! Biquandle brackets: verification, state sums, the multiset invariant,
//! adequacy classification and the skein relation at monochromatic crossings.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{AlgebraError, Elem, Laurent, Ring};
use crate::biquandle::Biquandle;
use crate::coloring::{enumerate_colorings, validate_coloring, ColoringError};
use crate::diagram::{Crossing, Diagram, DiagramError, Sign, Smoothing};
use crate::parallel;
use crate::text::{content_lines, ParseError};

/// Unverified coefficient tables as read from a file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BracketTables {
    pub ring: Ring,
    pub a: Vec<Vec<Elem>>,
    pub b: Vec<Vec<Elem>>,
}

impl BracketTables {
    /// `ring mod n` or `ring laurent`, then rows of the block matrix `[A | B]`.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let lines = content_lines(text);
        let Some(head) = lines.first() else {
            return Err(ParseError::new(1, 1, "empty bracket file"));
        };
        let toks = head.tokens();
        let ring = match toks.iter().map(|t| t.text).collect::<Vec<_>>().as_slice() {
            ["ring", "laurent"] => Ring::Laurent,
            ["ring", "mod", n] => {
                let n: u64 = n
                    .parse()
                    .map_err(|_| head.error(toks[2].column, "modulus must be an integer"))?;
                Ring::modular(n).map_err(|e| head.error(toks[2].column, e.to_string()))?
            }
            _ => return Err(head.error(1, "expected `ring mod <n>` or `ring laurent`")),
        };
        let rows = &lines[1..];
        let n = rows.len();
        if n == 0 {
            return Err(head.error(1, "no coefficient rows"));
        }
        let mut a = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        for line in rows {
            let toks = line.tokens();
            if toks.len() != 2 * n {
                return Err(line.error(1, format!("expected {} entries, found {}", 2 * n, toks.len())));
            }
            let mut row = Vec::with_capacity(2 * n);
            for t in &toks {
                row.push(parse_entry(ring, t.text).map_err(|m| line.error(t.column, m))?);
            }
            b.push(row.split_off(n));
            a.push(row);
        }
        Ok(Self { ring, a, b })
    }
}

fn parse_entry(ring: Ring, text: &str) -> Result<Elem, String> {
    match ring {
        Ring::Mod(_) => text
            .parse::<i64>()
            .map(|v| ring.int(v))
            .map_err(|_| format!("expected an integer, found {text:?}")),
        Ring::Laurent => text
            .parse::<Laurent>()
            .map(Elem::Laurent)
            .map_err(|e| e.to_string()),
    }
}

/// One failed instance of a bracket condition. Elements are 0-indexed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BracketViolation {
    Delta { x: usize, y: usize, value: Elem, expected: Elem },
    W { x: usize, value: Elem, expected: Elem },
    Exchange { equation: usize, x: usize, y: usize, z: usize, lhs: Elem, rhs: Elem },
}

impl fmt::Display for BracketViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BracketViolation::Delta { x, y, value, expected } => {
                write!(f, "delta at ({},{}) is {value}, expected {expected}", x + 1, y + 1)
            }
            BracketViolation::W { x, value, expected } => {
                write!(f, "w at {} is {value}, expected {expected}", x + 1)
            }
            BracketViolation::Exchange { equation, x, y, z, lhs, rhs } => write!(
                f,
                "equation {equation} fails at ({},{},{}): {lhs} != {rhs}",
                x + 1,
                y + 1,
                z + 1
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BracketError {
    #[error("bracket tables must be {expected}x{expected} to match the biquandle")]
    Shape { expected: usize },
    #[error("entry {table}[{x},{y}] = {value} is not a unit")]
    NotAUnit { table: char, x: usize, y: usize, value: Elem },
    #[error("entry {table}[{x},{y}] lies in {found}, expected {expected}")]
    WrongRing { table: char, x: usize, y: usize, found: Ring, expected: Ring },
    #[error("{} bracket condition(s) fail", .0.len())]
    Violations(Vec<BracketViolation>),
}

/// A verified biquandle bracket with cached inverses, `δ` and `w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bracket {
    x: Biquandle,
    ring: Ring,
    a: Vec<Elem>,
    b: Vec<Elem>,
    a_inv: Vec<Elem>,
    b_inv: Vec<Elem>,
    delta: Elem,
    w: Elem,
}

fn delta_of(a: &Elem, b: &Elem) -> Result<Elem, AlgebraError> {
    Ok(-(a.inverse()? * b) - a * &b.inverse()?)
}

fn w_of(a: &Elem, b: &Elem) -> Result<Elem, AlgebraError> {
    Ok(-(a * a * b.inverse()?))
}

pub fn verify_bracket(x: &Biquandle, tables: &BracketTables) -> Result<Bracket, BracketError> {
    let n = x.size();
    let shape_ok = |t: &Vec<Vec<Elem>>| t.len() == n && t.iter().all(|r| r.len() == n);
    if !shape_ok(&tables.a) || !shape_ok(&tables.b) {
        return Err(BracketError::Shape { expected: n });
    }
    for (name, t) in [('A', &tables.a), ('B', &tables.b)] {
        for (i, row) in t.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if e.ring() != tables.ring {
                    return Err(BracketError::WrongRing {
                        table: name,
                        x: i,
                        y: j,
                        found: e.ring(),
                        expected: tables.ring,
                    });
                }
                if !e.is_unit() {
                    return Err(BracketError::NotAUnit {
                        table: name,
                        x: i,
                        y: j,
                        value: e.clone(),
                    });
                }
            }
        }
    }
    let a = tables.a.concat();
    let b = tables.b.concat();
    let inv = |v: &[Elem]| v.iter().map(|e| e.inverse().expect("checked unit")).collect::<Vec<_>>();
    let delta = delta_of(&a[0], &b[0]).expect("units");
    let w = w_of(&a[0], &b[0]).expect("units");
    let candidate = Bracket {
        x: x.clone(),
        ring: tables.ring,
        a_inv: inv(&a),
        b_inv: inv(&b),
        a,
        b,
        delta,
        w,
    };
    let violations = candidate.violations();
    if violations.is_empty() {
        Ok(candidate)
    } else {
        Err(BracketError::Violations(violations))
    }
}

/// Index pairs used by the exchange-type conditions, with `x^y = x ▷̲ y` and
/// `x_y = x ▷̄ y`.
struct Triple {
    /// `(x,y)`, `(y,z)`, `(x^y, z_y)`
    p: [(usize, usize); 3],
    /// `(x,z)`, `(y_x, z_x)`, `(x^z, y^z)`
    q: [(usize, usize); 3],
}

impl Triple {
    fn new(bq: &Biquandle, x: usize, y: usize, z: usize) -> Self {
        Self {
            p: [(x, y), (y, z), (bq.under(x, y), bq.over(z, y))],
            q: [(x, z), (bq.over(y, x), bq.over(z, x)), (bq.under(x, z), bq.under(y, z))],
        }
    }
}

impl Bracket {
    fn idx(&self, x: usize, y: usize) -> usize {
        x * self.x.size() + y
    }

    pub fn biquandle(&self) -> &Biquandle {
        &self.x
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn a(&self, x: usize, y: usize) -> &Elem {
        &self.a[self.idx(x, y)]
    }

    pub fn b(&self, x: usize, y: usize) -> &Elem {
        &self.b[self.idx(x, y)]
    }

    pub fn delta(&self) -> &Elem {
        &self.delta
    }

    pub fn w(&self) -> &Elem {
        &self.w
    }

    /// The smoothing coefficient at a crossing whose key colors are `(x, y)`.
    pub fn coefficient(&self, sign: Sign, s: Smoothing, x: usize, y: usize) -> &Elem {
        let i = self.idx(x, y);
        match (sign, s) {
            (Sign::Pos, Smoothing::A) => &self.a[i],
            (Sign::Pos, Smoothing::B) => &self.b[i],
            (Sign::Neg, Smoothing::A) => &self.a_inv[i],
            (Sign::Neg, Smoothing::B) => &self.b_inv[i],
        }
    }

    pub fn tables(&self) -> BracketTables {
        let n = self.x.size();
        BracketTables {
            ring: self.ring,
            a: self.a.chunks(n).map(<[Elem]>::to_vec).collect(),
            b: self.b.chunks(n).map(<[Elem]>::to_vec).collect(),
        }
    }

    /// `δ^k`.
    pub fn delta_pow(&self, k: u32) -> Elem {
        self.delta.pow(k)
    }

    /// `w^k`; `w` is always a unit.
    pub fn w_pow(&self, k: i64) -> Elem {
        self.w.powi(k).expect("w is a unit")
    }

    fn violations(&self) -> Vec<BracketViolation> {
        let n = self.x.size();
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                let d = delta_of(self.a(x, y), self.b(x, y)).expect("units");
                if d != self.delta {
                    out.push(BracketViolation::Delta {
                        x,
                        y,
                        value: d,
                        expected: self.delta.clone(),
                    });
                }
            }
            let w = w_of(self.a(x, x), self.b(x, x)).expect("units");
            if w != self.w {
                out.push(BracketViolation::W {
                    x,
                    value: w,
                    expected: self.w.clone(),
                });
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    for (equation, lhs, rhs) in self.exchange_sides(x, y, z) {
                        if lhs != rhs {
                            out.push(BracketViolation::Exchange { equation, x, y, z, lhs, rhs });
                        }
                    }
                }
            }
        }
        out
    }

    fn exchange_sides(&self, x: usize, y: usize, z: usize) -> Vec<(usize, Elem, Elem)> {
        let t = Triple::new(&self.x, x, y, z);
        let a = |(i, j): (usize, usize)| self.a(i, j);
        let b = |(i, j): (usize, usize)| self.b(i, j);
        let [p1, p2, p3] = t.p;
        let [q1, q2, q3] = t.q;
        let d = &self.delta;
        vec![
            (1, a(p1) * a(p2) * a(p3), a(q1) * a(q2) * a(q3)),
            (2, a(p1) * b(p2) * b(p3), b(q1) * b(q2) * a(q3)),
            (3, b(p1) * a(p2) * b(p3), b(q1) * a(q2) * b(q3)),
            (
                4,
                a(p1) * a(p2) * b(p3),
                a(q1) * b(q2) * a(q3) + a(q1) * a(q2) * b(q3) + d * a(q1) * b(q2) * b(q3) + b(q1) * b(q2) * b(q3),
            ),
            (
                5,
                b(p1) * a(p2) * a(p3) + a(p1) * b(p2) * a(p3) + d * b(p1) * b(p2) * a(p3) + b(p1) * b(p2) * b(p3),
                b(q1) * a(q2) * a(q3),
            ),
        ]
    }
}

impl fmt::Display for Bracket {
    /// The bracket file format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ring {}", self.ring)?;
        let n = self.x.size();
        for (ra, rb) in self.a.chunks(n).zip(self.b.chunks(n)) {
            let row: Vec<String> = ra.iter().chain(rb).map(Elem::to_string).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateSumError {
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error("the coloring does not satisfy the crossing rule")]
    InvalidColoring,
    #[error("too many crossings for a state sum ({0})")]
    TooManyCrossings(usize),
}

/// Key colors of each crossing under `c`.
fn key_colors(d: &Diagram, c: &[usize]) -> Vec<(usize, usize)> {
    d.crossings()
        .iter()
        .map(|cr| {
            let (k1, k2) = cr.key_slots();
            (c[k1], c[k2])
        })
        .collect()
}

/// `w^{n-p} Σ_states ∏ coefficients · δ^loops`.
pub fn state_sum(d: &Diagram, c: &[usize], beta: &Bracket) -> Result<Elem, StateSumError> {
    if !validate_coloring(d, beta.biquandle(), c)? {
        return Err(StateSumError::InvalidColoring);
    }
    let k = d.crossings().len();
    if k >= 32 {
        return Err(StateSumError::TooManyCrossings(k));
    }
    let keys = key_colors(d, c);
    let max_loops = d.arc_count() + d.free_loops();
    let deltas: Vec<Elem> = (0..=max_loops as u32).map(|i| beta.delta_pow(i)).collect();
    let mut total = beta.ring().zero();
    for mask in 0..1u64 << k {
        let mut term = deltas[d.loops_for_mask(mask)].clone();
        for (i, (cr, &(x, y))) in d.crossings().iter().zip(&keys).enumerate() {
            let s = if mask >> i & 1 == 1 { Smoothing::B } else { Smoothing::A };
            term = term * beta.coefficient(cr.sign, s, x, y);
        }
        total = total + term;
    }
    let (p, n) = d.writhe_counts();
    Ok(total * beta.w_pow(n as i64 - p as i64))
}

/// A multiset of ring values.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InvariantResult {
    pub multiset: BTreeMap<Elem, usize>,
}

impl InvariantResult {
    pub fn from_values<'a>(values: impl IntoIterator<Item = &'a Elem>) -> Self {
        let mut multiset = BTreeMap::new();
        for v in values {
            *multiset.entry(v.clone()).or_insert(0) += 1;
        }
        Self { multiset }
    }

    pub fn total(&self) -> usize {
        self.multiset.values().sum()
    }

    /// `Σ multiplicity · u^value`, e.g. `2u + 2u^3`.
    pub fn polynomial(&self) -> String {
        let terms: Vec<String> = self
            .multiset
            .iter()
            .map(|(v, &m)| {
                let coeff = if m == 1 { String::new() } else { m.to_string() };
                match v {
                    Elem::Mod { residue: 0, .. } => m.to_string(),
                    Elem::Mod { residue: 1, .. } => format!("{coeff}u"),
                    Elem::Mod { residue, .. } => format!("{coeff}u^{residue}"),
                    Elem::Laurent(p) => format!("{coeff}u^({p})"),
                }
            })
            .collect();
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        }
    }
}

impl fmt::Display for InvariantResult {
    /// Multiset notation `{value:multiplicity, ...}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.multiset.iter().map(|(v, m)| format!("{v}:{m}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// State sums of every coloring, in coloring order.
pub fn state_sums(d: &Diagram, beta: &Bracket) -> Result<Vec<(Vec<usize>, Elem)>, StateSumError> {
    let colorings = enumerate_colorings(d, beta.biquandle());
    parallel::install(|| {
        colorings
            .into_par_iter()
            .map(|c| state_sum(d, &c, beta).map(|v| (c, v)))
            .collect()
    })
}

pub fn bracket_invariant(d: &Diagram, beta: &Bracket) -> Result<InvariantResult, StateSumError> {
    let sums = state_sums(d, beta)?;
    Ok(InvariantResult::from_values(sums.iter().map(|(_, v)| v)))
}

/// First failing triple for an adequacy condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Witness {
    pub x: usize,
    pub y: usize,
    pub z: usize,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.x + 1, self.y + 1, self.z + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Adequacy {
    pub over: bool,
    pub under: bool,
    pub passthrough: bool,
    pub over_witness: Option<Witness>,
    pub under_witness: Option<Witness>,
    /// The element `x` at which the pass-through condition fails.
    pub passthrough_witness: Option<usize>,
}

impl Adequacy {
    pub fn adequate(&self) -> bool {
        self.over && self.under
    }

    pub fn label(&self) -> &'static str {
        match (self.over, self.under) {
            (true, true) => "adequate",
            (true, false) => "over",
            (false, true) => "under",
            (false, false) => "neither",
        }
    }
}

fn all_equal(v: &[Elem]) -> bool {
    v.windows(2).all(|w| w[0] == w[1])
}

pub fn classify_adequacy(beta: &Bracket) -> Adequacy {
    let bq = beta.biquandle();
    let n = bq.size();
    let a = |x: usize, y: usize| beta.a(x, y);
    let b = |x: usize, y: usize| beta.b(x, y);
    let (u, o) = (|p: usize, q: usize| bq.under(p, q), |p: usize, q: usize| bq.over(p, q));
    let mut over_witness = None;
    let mut under_witness = None;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let (xy, zy) = (u(x, y), o(z, y));
                if over_witness.is_none() {
                    let ok = a(y, z) == a(u(y, x), u(z, x))
                        && all_equal(&[
                            a(y, z) * b(xy, zy),
                            b(x, z) * a(o(y, x), o(z, x)),
                            a(x, z) * b(o(y, x), o(z, x)),
                            b(y, z) * a(xy, zy),
                        ]);
                    if !ok {
                        over_witness = Some(Witness { x, y, z });
                    }
                }
                if under_witness.is_none() {
                    let ok = a(y, z) == a(o(y, x), o(z, x))
                        && all_equal(&[
                            a(x, y) * b(xy, zy),
                            b(x, z) * a(u(x, z), u(y, z)),
                            a(x, z) * b(u(x, z), u(y, z)),
                            b(x, y) * a(xy, zy),
                        ]);
                    if !ok {
                        under_witness = Some(Witness { x, y, z });
                    }
                }
            }
        }
    }
    let passthrough_witness = (0..n).find(|&x| {
        let y = bq.kink(x);
        let one = beta.ring().one();
        let sq = |e: &Elem| e * e;
        sq(a(x, x)) * sq(b(y, y)) != one || sq(a(y, y)) * sq(b(x, x)) != one
    });
    Adequacy {
        over: over_witness.is_none(),
        under: under_witness.is_none(),
        passthrough: passthrough_witness.is_none(),
        over_witness,
        under_witness,
        passthrough_witness,
    }
}

/// `(c_switch, c_smooth)` with `[L+] = c_switch [L-] + c_smooth [L0]` at a
/// crossing colored `x` throughout.
pub fn homflypt_coefficients(beta: &Bracket, x: usize) -> (Elem, Elem) {
    let a_inv = beta.coefficient(Sign::Neg, Smoothing::A, x, x);
    let b = beta.b(x, x);
    let c_switch = a_inv.pow(4) * b.pow(4);
    let c_smooth = a_inv.pow(3) * b.pow(3) - a_inv * b;
    (c_switch, c_smooth)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SkeinError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    StateSum(#[from] StateSumError),
    #[error("crossing {index} is not monochromatic (input colors {x} and {y})")]
    NotMonochromatic { index: usize, x: usize, y: usize },
    #[error("color {x} is not a fixed point of the kink map ({x} maps to {image})")]
    NotFixedPoint { x: usize, image: usize },
}

/// The diagram obtained from `d` by oriented smoothing at `index`, with the
/// coloring carried over; new free loops get `fill`.
fn smoothed_coloring(d: &Diagram, c: &[usize], index: usize, fill: usize) -> Result<(Diagram, Vec<usize>), DiagramError> {
    let (d0, map) = d.oriented_smoothing_map(index)?;
    let mut c0 = vec![fill; d0.color_slots()];
    for (old, new) in map.iter().enumerate() {
        if let Some(new) = new {
            c0[*new] = c[old];
        }
    }
    for (k, &color) in c[d.arc_count()..].iter().enumerate() {
        c0[d0.arc_count() + k] = color;
    }
    Ok((d0, c0))
}

/// Checks `[L+] = c_switch [L-] + c_smooth [L0]` at crossing `index`, whose
/// input colors must agree and be a fixed point of the kink map.
pub fn skein_identity_check(d: &Diagram, c: &[usize], beta: &Bracket, index: usize) -> Result<bool, SkeinError> {
    let cr = *d.crossings().get(index).ok_or(DiagramError::IndexOutOfRange {
        index,
        count: d.crossings().len(),
    })?;
    if !validate_coloring(d, beta.biquandle(), c).map_err(StateSumError::from)? {
        return Err(StateSumError::InvalidColoring.into());
    }
    let (x, y) = (c[cr.u_in], c[cr.o_in]);
    if x != y {
        return Err(SkeinError::NotMonochromatic { index, x, y });
    }
    let image = beta.biquandle().kink(x);
    if image != x {
        return Err(SkeinError::NotFixedPoint { x, image });
    }
    let switched = d.switch_crossing(index)?;
    let (plus, minus) = match cr.sign {
        Sign::Pos => (d, &switched),
        Sign::Neg => (&switched, d),
    };
    let (d0, c0) = smoothed_coloring(d, c, index, x)?;
    let (c_switch, c_smooth) = homflypt_coefficients(beta, x);
    let lhs = state_sum(plus, c, beta)?;
    let rhs = c_switch * state_sum(minus, c, beta)? + c_smooth * state_sum(&d0, &c0, beta)?;
    Ok(lhs == rhs)
}

/// The first crossing met as an undercrossing before being met as an
/// overcrossing, walking components in order of their smallest semiarc.
fn first_ascending(d: &Diagram) -> Option<usize> {
    let m = d.arc_count();
    let mut next_from_in: Vec<Option<(usize, bool)>> = vec![None; m];
    for (i, c) in d.crossings().iter().enumerate() {
        next_from_in[c.u_in] = Some((i, false));
        next_from_in[c.o_in] = Some((i, true));
    }
    let out_of = |c: &Crossing, over: bool| if over { c.o_out } else { c.u_out };
    let mut seen_arc = vec![false; m];
    let mut met = vec![false; d.crossings().len()];
    for start in 0..m {
        if seen_arc[start] {
            continue;
        }
        let mut arc = start;
        while !seen_arc[arc] {
            seen_arc[arc] = true;
            let (i, over) = next_from_in[arc].expect("closed diagram");
            if !met[i] {
                if !over {
                    return Some(i);
                }
                met[i] = true;
            }
            arc = out_of(&d.crossings()[i], over);
        }
    }
    None
}

fn strand_components(d: &Diagram) -> usize {
    let mut uf = petgraph::unionfind::UnionFind::new(d.arc_count());
    for c in d.crossings() {
        uf.union(c.u_in, c.u_out);
        uf.union(c.o_in, c.o_out);
    }
    (0..d.arc_count()).filter(|&a| uf.find(a) == a).count() + d.free_loops()
}

/// The bracket of `d` colored `x` everywhere, by repeated skein reduction to
/// descending diagrams. `x` must be a fixed point of the kink map.
pub fn skein_reduce(d: &Diagram, beta: &Bracket, x: usize) -> Result<Elem, SkeinError> {
    let image = beta.biquandle().kink(x);
    if image != x {
        return Err(SkeinError::NotFixedPoint { x, image });
    }
    let (c_switch, c_smooth) = homflypt_coefficients(beta, x);
    let c_switch_inv = c_switch.inverse().expect("product of units");
    Ok(reduce(d, beta, &c_switch, &c_switch_inv, &c_smooth))
}

fn reduce(d: &Diagram, beta: &Bracket, c_switch: &Elem, c_switch_inv: &Elem, c_smooth: &Elem) -> Elem {
    let Some(i) = first_ascending(d) else {
        return beta.delta_pow(strand_components(d) as u32);
    };
    let switched = d.switch_crossing(i).expect("index in range");
    let smoothed = d.oriented_smoothing(i).expect("index in range");
    let v_switched = reduce(&switched, beta, c_switch, c_switch_inv, c_smooth);
    let v_smoothed = reduce(&smoothed, beta, c_switch, c_switch_inv, c_smooth);
    match d.crossings()[i].sign {
        Sign::Pos => c_switch * v_switched + c_smooth * v_smoothed,
        Sign::Neg => c_switch_inv * (v_switched - c_smooth * v_smoothed),
    }
}

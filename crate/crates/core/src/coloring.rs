//! Biquandle colorings of diagrams and the counting invariant.
//!
//! At every crossing the colors `(x, y)` on its [key slots] determine the
//! other two: the first derived slot gets `x ▷̲ y`, the second `y ▷̄ x`.
//!
//! [key slots]: crate::diagram::Crossing::key_slots

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::biquandle::Biquandle;
use crate::diagram::{Crossing, Diagram, Sign};
use crate::parallel;

/// Colors indexed by semiarc, followed by one color per free loop.
pub type Coloring = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColoringError {
    #[error("coloring has {found} entries, diagram needs {expected}")]
    WrongLength { expected: usize, found: usize },
    #[error("color {color} is not an element of a biquandle of size {size}")]
    OutOfRange { color: usize, size: usize },
}

/// Whether the colors around one node obey the crossing rule.
pub fn node_respects(x: &Biquandle, c: &Crossing, colors: &[usize]) -> bool {
    let (k1, k2) = c.key_slots();
    let (d1, d2) = c.derived_slots();
    let (a, b) = (colors[k1], colors[k2]);
    colors[d1] == x.under(a, b) && colors[d2] == x.over(b, a)
}

pub fn validate_coloring(d: &Diagram, x: &Biquandle, c: &[usize]) -> Result<bool, ColoringError> {
    if c.len() != d.color_slots() {
        return Err(ColoringError::WrongLength {
            expected: d.color_slots(),
            found: c.len(),
        });
    }
    if let Some(&color) = c.iter().find(|&&v| v >= x.size()) {
        return Err(ColoringError::OutOfRange { color, size: x.size() });
    }
    Ok(d.crossings().iter().all(|cr| node_respects(x, cr, c)))
}

/// All colorings in lexicographic order.
pub fn enumerate_colorings(d: &Diagram, x: &Biquandle) -> Vec<Coloring> {
    let base = solve(x, d.crossings(), d.arc_count(), &vec![None; d.arc_count()]);
    let n = x.size();
    let mut out = Vec::with_capacity(base.len() * n.pow(d.free_loops() as u32));
    for b in base {
        let mut tail = vec![0; d.free_loops()];
        loop {
            let mut c = b.clone();
            c.extend_from_slice(&tail);
            out.push(c);
            if !advance(&mut tail, n) {
                break;
            }
        }
    }
    out
}

pub fn counting_invariant(d: &Diagram, x: &Biquandle) -> usize {
    let base = solve(x, d.crossings(), d.arc_count(), &vec![None; d.arc_count()]).len();
    base * x.size().pow(d.free_loops() as u32)
}

fn advance(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// Every assignment of colors to `edges` slots that extends `fixed` and
/// satisfies the rule at every node, sorted.
pub(crate) fn solve(x: &Biquandle, nodes: &[Crossing], edges: usize, fixed: &[Option<usize>]) -> Vec<Vec<usize>> {
    assert_eq!(fixed.len(), edges);
    let solver = Solver::new(x, nodes, edges);
    let mut root = State {
        colors: fixed.to_vec(),
        trail: Vec::new(),
    };
    if !solver.propagate(&mut root, (0..nodes.len()).collect()) {
        return Vec::new();
    }
    let Some(first) = root.colors.iter().position(Option::is_none) else {
        return vec![root.colors.iter().map(|c| c.unwrap()).collect()];
    };
    let mut out: Vec<Vec<usize>> = parallel::install(|| {
        (0..x.size())
            .into_par_iter()
            .flat_map_iter(|color| {
                let mut state = State {
                    colors: root.colors.clone(),
                    trail: Vec::new(),
                };
                let mut found = Vec::new();
                if solver.assign(&mut state, first, color) {
                    solver.search(&mut state, &mut found);
                }
                found
            })
            .collect()
    });
    out.sort_unstable();
    out
}

struct State {
    colors: Vec<Option<usize>>,
    trail: Vec<usize>,
}

impl State {
    fn undo(&mut self, mark: usize) {
        for e in self.trail.drain(mark..) {
            self.colors[e] = None;
        }
    }
}

enum Fit {
    Conflict,
    Forced([usize; 4]),
    Open,
}

struct Solver<'a> {
    x: &'a Biquandle,
    nodes: &'a [Crossing],
    incident: Vec<Vec<usize>>,
    /// `(x ▷̲ y, y ▷̄ x) -> (x, y)`, when the switch map is invertible there.
    inverse: Vec<Option<(usize, usize)>>,
}

impl<'a> Solver<'a> {
    fn new(x: &'a Biquandle, nodes: &'a [Crossing], edges: usize) -> Self {
        let n = x.size();
        let mut incident = vec![Vec::new(); edges];
        for (i, c) in nodes.iter().enumerate() {
            for e in c.slots() {
                if !incident[e].contains(&i) {
                    incident[e].push(i);
                }
            }
        }
        let mut inverse = vec![None; n * n];
        let mut hits = vec![0u8; n * n];
        for a in 0..n {
            for b in 0..n {
                let k = x.under(a, b) * n + x.over(b, a);
                hits[k] += 1;
                inverse[k] = Some((a, b));
            }
        }
        for (slot, h) in inverse.iter_mut().zip(hits) {
            if h != 1 {
                *slot = None;
            }
        }
        Self {
            x,
            nodes,
            incident,
            inverse,
        }
    }

    /// Slot edges in the order key, key, derived, derived.
    fn ordered(c: &Crossing) -> [usize; 4] {
        let (k1, k2) = c.key_slots();
        let (d1, d2) = c.derived_slots();
        [k1, k2, d1, d2]
    }

    fn values(&self, a: usize, b: usize) -> [usize; 4] {
        [a, b, self.x.under(a, b), self.x.over(b, a)]
    }

    fn consistent(edges: &[usize; 4], vals: &[usize; 4], colors: &[Option<usize>]) -> bool {
        (0..4).all(|i| {
            colors[edges[i]].map_or(true, |c| c == vals[i]) && (0..i).all(|j| edges[j] != edges[i] || vals[j] == vals[i])
        })
    }

    fn fit(&self, node: usize, colors: &[Option<usize>]) -> Fit {
        let edges = Self::ordered(&self.nodes[node]);
        let known = edges.map(|e| colors[e]);
        let pair = match known {
            [Some(a), Some(b), _, _] => Some((a, b)),
            [_, _, Some(l), Some(r)] => self.inverse[l * self.x.size() + r],
            _ => None,
        };
        if let Some((a, b)) = pair {
            let vals = self.values(a, b);
            return if Self::consistent(&edges, &vals, colors) {
                Fit::Forced(vals)
            } else {
                Fit::Conflict
            };
        }
        let n = self.x.size();
        let mut found = None;
        for a in 0..n {
            for b in 0..n {
                let vals = self.values(a, b);
                if Self::consistent(&edges, &vals, colors) {
                    if found.is_some() {
                        return Fit::Open;
                    }
                    found = Some(vals);
                }
            }
        }
        found.map_or(Fit::Conflict, Fit::Forced)
    }

    fn assign(&self, state: &mut State, edge: usize, color: usize) -> bool {
        state.colors[edge] = Some(color);
        state.trail.push(edge);
        self.propagate(state, self.incident[edge].clone())
    }

    fn propagate(&self, state: &mut State, mut queue: Vec<usize>) -> bool {
        while let Some(node) = queue.pop() {
            match self.fit(node, &state.colors) {
                Fit::Conflict => return false,
                Fit::Open => {}
                Fit::Forced(vals) => {
                    let edges = Self::ordered(&self.nodes[node]);
                    for (e, v) in edges.into_iter().zip(vals) {
                        if state.colors[e].is_none() {
                            state.colors[e] = Some(v);
                            state.trail.push(e);
                            queue.extend(self.incident[e].iter().filter(|&&m| m != node));
                        }
                    }
                }
            }
        }
        true
    }

    fn search(&self, state: &mut State, out: &mut Vec<Vec<usize>>) {
        let Some(edge) = state.colors.iter().position(Option::is_none) else {
            out.push(state.colors.iter().map(|c| c.unwrap()).collect());
            return;
        };
        for color in 0..self.x.size() {
            let mark = state.trail.len();
            if self.assign(state, edge, color) {
                self.search(state, out);
            }
            state.undo(mark);
        }
    }
}

/// One failed sign pattern of [`monochromatic_riii_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RiiiFailure {
    pub x: usize,
    pub signs: [Sign; 3],
    pub reason: String,
}

impl fmt::Display for RiiiFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.signs.iter().map(|s| s.symbol()).collect();
        write!(f, "x={} signs {}: {}", self.x + 1, s, self.reason)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RiiiReport {
    pub checked: usize,
    pub failures: Vec<RiiiFailure>,
}

impl RiiiReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Open three-strand tangle `σ1^e1 σ2^e2 σ1^e3` with the middle strand
/// running downward. Returns the nodes, the bottom edges, the internal edges
/// and the top edges.
fn riii_tangle(signs: [Sign; 3]) -> (Vec<Crossing>, Vec<usize>, Vec<usize>, Vec<usize>) {
    const REVERSED: usize = 1;
    let mut at: Vec<usize> = vec![0, 1, 2];
    let mut edge = vec![0, 1, 2];
    let mut next = 3;
    let mut nodes = Vec::new();
    for (&i, &sign) in [0usize, 1, 0].iter().zip(&signs) {
        let (l, r) = (edge[i], edge[i + 1]);
        let (nl, nr) = (next, next + 1);
        next += 2;
        let mut c = match sign {
            Sign::Pos => Crossing::new(Sign::Pos, r, l, nr, nl),
            Sign::Neg => Crossing::new(Sign::Neg, l, r, nl, nr),
        };
        if at[i] == REVERSED || at[i + 1] == REVERSED {
            let left_is_under = sign == Sign::Neg;
            let rev_is_left = at[i] == REVERSED;
            if rev_is_left == left_is_under {
                std::mem::swap(&mut c.u_in, &mut c.u_out);
            } else {
                std::mem::swap(&mut c.o_in, &mut c.o_out);
            }
            c.sign = c.sign.flip();
        }
        nodes.push(c);
        at.swap(i, i + 1);
        edge[i] = nl;
        edge[i + 1] = nr;
    }
    let bottom = vec![0, 1, 2];
    let top = edge;
    let internal = (3..next).filter(|e| !top.contains(e)).collect();
    (nodes, bottom, internal, top)
}

/// For each `x`, colors the bottom of the RIII tangle `x, x, x` under all 8
/// sign patterns and checks that the coloring is unique, the three internal
/// semiarcs are `y = x ▷̲ x` and the top is `z = y ▷̲ y`.
pub fn monochromatic_riii_check(x: &Biquandle) -> RiiiReport {
    let mut report = RiiiReport::default();
    let patterns: Vec<[Sign; 3]> = (0..8u8)
        .map(|m| [0, 1, 2].map(|i| if m >> i & 1 == 0 { Sign::Pos } else { Sign::Neg }))
        .collect();
    for c in 0..x.size() {
        let y = x.kink(c);
        let z = x.kink(y);
        for &signs in &patterns {
            report.checked += 1;
            let (nodes, bottom, internal, top) = riii_tangle(signs);
            let mut fixed = vec![None; 9];
            for &e in &bottom {
                fixed[e] = Some(c);
            }
            let sols = solve(x, &nodes, 9, &fixed);
            let reason = match sols.as_slice() {
                [] => Some("no coloring extends the bottom colors".to_string()),
                [s] => {
                    let mid: Vec<usize> = internal.iter().map(|&e| s[e]).collect();
                    let up: Vec<usize> = top.iter().map(|&e| s[e]).collect();
                    if mid.iter().any(|&v| v != y) {
                        Some(format!("middle colors {:?}, expected {}", plus_one(&mid), y + 1))
                    } else if up.iter().any(|&v| v != z) {
                        Some(format!("top colors {:?}, expected {}", plus_one(&up), z + 1))
                    } else {
                        None
                    }
                }
                many => Some(format!("{} colorings extend the bottom colors", many.len())),
            };
            if let Some(reason) = reason {
                report.failures.push(RiiiFailure { x: c, signs, reason });
            }
        }
    }
    report
}

fn plus_one(v: &[usize]) -> Vec<usize> {
    v.iter().map(|c| c + 1).collect()
}

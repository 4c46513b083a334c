//! Colored trace diagrams and their recursive evaluation.
//!
//! Every node, crossing or trace, carries the same slot record as a
//! [`Crossing`]: a sign and the edges `(u_in, o_in, o_out, u_out)`. A type A
//! trace passes `u_in -> o_out` and `o_in -> u_out`; a type B trace has the
//! sink `(u_in, o_in)` and the source `(o_out, u_out)`. Smoothing a crossing
//! only changes its kind, so node indices are stable under expansion and the
//! coloring rule is the same at every node.

use std::collections::BTreeMap;
use std::fmt;

use petgraph::unionfind::UnionFind;
use thiserror::Error;

use crate::algebra::Elem;
use crate::biquandle::Biquandle;
use crate::bracket::Bracket;
use crate::coloring::{node_respects, solve};
use crate::diagram::{parse_crossing, Crossing, Diagram, Sign, Smoothing};
use crate::text::{content_lines, Line, ParseError, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Crossing,
    TraceA,
    TraceB,
}

impl NodeKind {
    fn of(s: Smoothing) -> NodeKind {
        match s {
            Smoothing::A => NodeKind::TraceA,
            Smoothing::B => NodeKind::TraceB,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Node {
    pub kind: NodeKind,
    pub rec: Crossing,
}

impl Node {
    /// Slot pairs joined once traces are deleted; crossings pass straight through.
    fn strands(&self) -> [(usize, usize); 2] {
        let c = &self.rec;
        match self.kind {
            NodeKind::Crossing => [(c.u_in, c.u_out), (c.o_in, c.o_out)],
            NodeKind::TraceA => c.pairs(Smoothing::A),
            NodeKind::TraceB => c.pairs(Smoothing::B),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("node {0} does not exist")]
    IndexOutOfRange(usize),
    #[error("node {0} is not a crossing")]
    NotACrossing(usize),
    #[error("the diagram still has crossings")]
    CrossingsPresent,
    #[error("the coloring does not satisfy the rule at node {0}")]
    InvalidColoring(usize),
    #[error("coloring has {found} entries, diagram needs {expected}")]
    WrongColoringLength { expected: usize, found: usize },
    #[error("the diagram has open ends")]
    Open,
    #[error("the trace-deleted diagram does not reduce to zero crossings by Reidemeister I moves")]
    NotRIReducible,
    #[error("crossing {0} joins two components")]
    MultiComponentCrossing(usize),
    #[error("too many crossings to expand ({0})")]
    TooManyCrossings(usize),
}

/// One end of an edge that is not attached to any node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum End {
    Head(usize),
    Tail(usize),
}

/// Boundary connectivity: sorted pairs of loose ends.
pub type Matching = Vec<(End, End)>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TraceDiagram {
    nodes: Vec<Node>,
    edges: usize,
    free_loops: usize,
}

impl TraceDiagram {
    pub fn new(nodes: Vec<Node>, edges: usize, free_loops: usize) -> Self {
        assert!(nodes.iter().flat_map(|n| n.rec.slots()).all(|e| e < edges));
        Self { nodes, edges, free_loops }
    }

    pub fn from_diagram(d: &Diagram) -> Self {
        let nodes = d
            .crossings()
            .iter()
            .map(|&rec| Node {
                kind: NodeKind::Crossing,
                rec,
            })
            .collect();
        Self::new(nodes, d.arc_count(), d.free_loops())
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn free_loops(&self) -> usize {
        self.free_loops
    }

    pub fn color_slots(&self) -> usize {
        self.edges + self.free_loops
    }

    pub fn crossing_indices(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&i| self.nodes[i].kind == NodeKind::Crossing)
            .collect()
    }

    /// `(positive, negative)` counts over traces only.
    pub fn trace_signs(&self) -> (usize, usize) {
        self.sign_counts(|k| k != NodeKind::Crossing)
    }

    fn sign_counts(&self, include: impl Fn(NodeKind) -> bool) -> (usize, usize) {
        let mut p = 0;
        let mut n = 0;
        for node in self.nodes.iter().filter(|n| include(n.kind)) {
            match node.rec.sign {
                Sign::Pos => p += 1,
                Sign::Neg => n += 1,
            }
        }
        (p, n)
    }

    /// `(head, tail)` attachment of every edge: the node slot it enters and
    /// the node slot it leaves.
    fn ends(&self) -> (Vec<Option<(usize, Slot)>>, Vec<Option<(usize, Slot)>>) {
        let mut head = vec![None; self.edges];
        let mut tail = vec![None; self.edges];
        for (i, n) in self.nodes.iter().enumerate() {
            let c = &n.rec;
            head[c.u_in] = Some((i, Slot::UIn));
            head[c.o_in] = Some((i, Slot::OIn));
            tail[c.o_out] = Some((i, Slot::OOut));
            tail[c.u_out] = Some((i, Slot::UOut));
        }
        (head, tail)
    }

    pub fn is_closed(&self) -> bool {
        let (head, tail) = self.ends();
        head.iter().chain(&tail).all(Option::is_some)
    }

    pub fn check_coloring(&self, x: &Biquandle, colors: &[usize]) -> Result<(), TraceError> {
        if colors.len() != self.color_slots() {
            return Err(TraceError::WrongColoringLength {
                expected: self.color_slots(),
                found: colors.len(),
            });
        }
        match self.nodes.iter().position(|n| !node_respects(x, &n.rec, colors)) {
            Some(i) => Err(TraceError::InvalidColoring(i)),
            None => Ok(()),
        }
    }

    /// All colorings extending `fixed` (one entry per edge), free loops
    /// colored every possible way.
    pub fn colorings(&self, x: &Biquandle, fixed: &[Option<usize>]) -> Vec<Vec<usize>> {
        let records: Vec<Crossing> = self.nodes.iter().map(|n| n.rec).collect();
        let base = solve(x, &records, self.edges, fixed);
        let mut out = Vec::new();
        for b in base {
            let mut tail = vec![0; self.free_loops];
            loop {
                let mut c = b.clone();
                c.extend_from_slice(&tail);
                out.push(c);
                if !bump(&mut tail, x.size()) {
                    break;
                }
            }
        }
        out
    }

    /// Replaces crossing `index` by a trace of the given kind and returns the
    /// smoothing coefficient.
    pub fn smooth_crossing(&self, index: usize, kind: Smoothing, colors: &[usize], beta: &Bracket) -> Result<(Elem, TraceDiagram), TraceError> {
        let node = self.nodes.get(index).ok_or(TraceError::IndexOutOfRange(index))?;
        if node.kind != NodeKind::Crossing {
            return Err(TraceError::NotACrossing(index));
        }
        let (k1, k2) = node.rec.key_slots();
        let coef = beta.coefficient(node.rec.sign, kind, colors[k1], colors[k2]).clone();
        let mut out = self.clone();
        out.nodes[index].kind = NodeKind::of(kind);
        Ok((coef, out))
    }

    /// Components after deleting traces (crossings passed straight through),
    /// as a union-find over edges.
    fn strand_classes(&self, smoothed_only: bool) -> UnionFind<usize> {
        let mut uf = UnionFind::new(self.edges);
        for n in &self.nodes {
            let pairs = if smoothed_only && n.kind == NodeKind::Crossing {
                continue;
            } else {
                n.strands()
            };
            for (a, b) in pairs {
                uf.union(a, b);
            }
        }
        uf
    }

    /// Closed circles and boundary matching of a diagram with no crossings.
    fn crossingless_shape(&self) -> (usize, Matching) {
        let uf = self.strand_classes(false);
        let (head, tail) = self.ends();
        let mut loose: BTreeMap<usize, Vec<End>> = BTreeMap::new();
        for e in 0..self.edges {
            if tail[e].is_none() {
                loose.entry(uf.find(e)).or_default().push(End::Tail(e));
            }
            if head[e].is_none() {
                loose.entry(uf.find(e)).or_default().push(End::Head(e));
            }
        }
        let roots = (0..self.edges).filter(|&e| uf.find(e) == e);
        let closed = roots.filter(|r| !loose.contains_key(r)).count();
        let mut matching: Matching = loose
            .into_values()
            .map(|mut v| {
                v.sort();
                assert_eq!(v.len(), 2, "an open arc has two ends");
                (v[0], v[1])
            })
            .collect();
        matching.sort();
        (closed + self.free_loops, matching)
    }

    /// `w^{n-p} δ^k` for a diagram without crossings: `n`, `p` count
    /// negative and positive traces and `k` is the number of circles.
    pub fn evaluate_crossingless(&self, beta: &Bracket) -> Result<Elem, TraceError> {
        if !self.crossing_indices().is_empty() {
            return Err(TraceError::CrossingsPresent);
        }
        Ok(self.leaf(beta).1)
    }

    fn leaf(&self, beta: &Bracket) -> (Matching, Elem) {
        let (k, matching) = self.crossingless_shape();
        let (p, n) = self.trace_signs();
        (matching, beta.delta_pow(k as u32) * beta.w_pow(n as i64 - p as i64))
    }

    fn expand(&self, colors: &[usize], beta: &Bracket, order: &[usize], coef: Elem, out: &mut BTreeMap<Matching, Elem>) {
        let next = order.iter().copied().find(|&i| self.nodes[i].kind == NodeKind::Crossing);
        match next {
            None => {
                let (m, v) = self.leaf(beta);
                let slot = out.entry(m).or_insert_with(|| beta.ring().zero());
                *slot = &*slot + coef * v;
            }
            Some(i) => {
                for s in [Smoothing::A, Smoothing::B] {
                    let (c, child) = self.smooth_crossing(i, s, colors, beta).expect("crossing index");
                    child.expand(colors, beta, order, &coef * c, out);
                }
            }
        }
    }

    /// Value of every boundary connectivity, expanding crossings in `order`
    /// (crossings missing from `order` are expanded afterwards by index).
    pub fn evaluate_tangle_with_order(&self, colors: &[usize], beta: &Bracket, order: &[usize]) -> Result<BTreeMap<Matching, Elem>, TraceError> {
        self.check_coloring(beta.biquandle(), colors)?;
        let crossings = self.crossing_indices();
        if crossings.len() > 30 {
            return Err(TraceError::TooManyCrossings(crossings.len()));
        }
        if let Some(&bad) = order.iter().find(|&&i| i >= self.nodes.len()) {
            return Err(TraceError::IndexOutOfRange(bad));
        }
        let mut full: Vec<usize> = order.to_vec();
        full.extend(crossings.iter().filter(|i| !order.contains(i)));
        let mut out = BTreeMap::new();
        self.expand(colors, beta, &full, beta.ring().one(), &mut out);
        Ok(out)
    }

    pub fn evaluate_tangle(&self, colors: &[usize], beta: &Bracket) -> Result<BTreeMap<Matching, Elem>, TraceError> {
        self.evaluate_tangle_with_order(colors, beta, &[])
    }

    /// Depth-first expansion of a closed diagram, crossings in index order.
    pub fn evaluate_recursive(&self, colors: &[usize], beta: &Bracket) -> Result<Elem, TraceError> {
        self.evaluate_recursive_with_order(colors, beta, &[])
    }

    pub fn evaluate_recursive_with_order(&self, colors: &[usize], beta: &Bracket, order: &[usize]) -> Result<Elem, TraceError> {
        if !self.is_closed() {
            return Err(TraceError::Open);
        }
        let map = self.evaluate_tangle_with_order(colors, beta, order)?;
        Ok(map.into_values().next().unwrap_or_else(|| beta.ring().zero()))
    }

    /// Sum over all `2^k` smoothing states without recursion.
    pub fn evaluate_state_sum(&self, colors: &[usize], beta: &Bracket) -> Result<Elem, TraceError> {
        if !self.is_closed() {
            return Err(TraceError::Open);
        }
        self.check_coloring(beta.biquandle(), colors)?;
        let crossings = self.crossing_indices();
        if crossings.len() > 30 {
            return Err(TraceError::TooManyCrossings(crossings.len()));
        }
        let mut total = beta.ring().zero();
        for mask in 0..1u64 << crossings.len() {
            let mut td = self.clone();
            let mut coef = beta.ring().one();
            for (bit, &i) in crossings.iter().enumerate() {
                let s = if mask >> bit & 1 == 1 { Smoothing::B } else { Smoothing::A };
                let (c, next) = td.smooth_crossing(i, s, colors, beta)?;
                coef = coef * c;
                td = next;
            }
            total = total + coef * td.leaf(beta).1;
        }
        Ok(total)
    }

    /// Parity of the number of orientation-reversing vertices met between
    /// the over- and under-passes of crossing `index`.
    pub fn magnetic_parity(&self, index: usize) -> Result<Parity, TraceError> {
        let node = self.nodes.get(index).ok_or(TraceError::IndexOutOfRange(index))?;
        if node.kind != NodeKind::Crossing {
            return Err(TraceError::NotACrossing(index));
        }
        if !self.is_closed() {
            return Err(TraceError::Open);
        }
        let (head, tail) = self.ends();
        let mut edge = node.rec.o_out;
        let mut forward = true;
        let mut reversals = 0usize;
        loop {
            let (i, slot) = if forward { head[edge] } else { tail[edge] }.expect("closed diagram");
            if i == index {
                return Ok(match slot {
                    Slot::UIn | Slot::UOut => {
                        if reversals % 2 == 0 {
                            Parity::Even
                        } else {
                            Parity::Odd
                        }
                    }
                    _ => Parity::MultiComponent,
                });
            }
            let n = &self.nodes[i];
            if n.kind == NodeKind::TraceB {
                reversals += 1;
            }
            let out = n.partner(slot);
            edge = n.rec.slot(out);
            forward = out.is_output();
        }
    }

    /// Repeatedly removes crossings two of whose slots are joined by a
    /// crossing-free arc of the trace-deleted diagram.
    pub fn is_ri_reducible(&self) -> Result<bool, TraceError> {
        if !self.is_closed() {
            return Err(TraceError::Open);
        }
        let crossings = self.crossing_indices();
        let (head, tail) = self.ends();
        let slot_id = |c: usize, s: Slot| c * 4 + s as usize;
        let mut partner: BTreeMap<usize, usize> = BTreeMap::new();
        for &c in &crossings {
            let rec = &self.nodes[c].rec;
            for s in Slot::ALL {
                let mut edge = rec.slot(s);
                let mut forward = s.is_output();
                loop {
                    let (i, slot) = if forward { head[edge] } else { tail[edge] }.expect("closed diagram");
                    if self.nodes[i].kind == NodeKind::Crossing {
                        partner.insert(slot_id(c, s), slot_id(i, slot));
                        break;
                    }
                    let n = &self.nodes[i];
                    let out = n.partner(slot);
                    edge = n.rec.slot(out);
                    forward = out.is_output();
                }
            }
        }
        let mut alive: Vec<usize> = crossings;
        loop {
            let Some(pos) = alive.iter().position(|&c| {
                Slot::ALL
                    .iter()
                    .any(|&s| partner[&slot_id(c, s)] / 4 == c && partner[&slot_id(c, s)] != slot_id(c, s))
            }) else {
                break;
            };
            let c = alive.remove(pos);
            let ids: Vec<usize> = Slot::ALL.iter().map(|&s| slot_id(c, s)).collect();
            let outside: Vec<usize> = ids.iter().filter(|&&s| partner[&s] / 4 != c).copied().collect();
            if let [a, b] = outside.as_slice() {
                let (pa, pb) = (partner[a], partner[b]);
                partner.insert(pa, pb);
                partner.insert(pb, pa);
            }
            for s in ids {
                partner.remove(&s);
            }
        }
        Ok(alive.is_empty())
    }

    /// `δ^k w^{n-p} ∏ φ(c)` for diagrams whose trace deletion is an unknot
    /// diagram reducible by Reidemeister I moves.
    pub fn evaluate_by_parity(&self, colors: &[usize], beta: &Bracket) -> Result<Elem, TraceError> {
        self.check_coloring(beta.biquandle(), colors)?;
        if !self.is_ri_reducible()? {
            return Err(TraceError::NotRIReducible);
        }
        let mut product = beta.ring().one();
        for i in self.crossing_indices() {
            let rec = self.nodes[i].rec;
            let (k1, k2) = rec.key_slots();
            let (x, y) = (colors[k1], colors[k2]);
            let a = beta.coefficient(rec.sign, Smoothing::A, x, y);
            let b = beta.coefficient(rec.sign, Smoothing::B, x, y);
            let d = beta.delta();
            let phi = match self.magnetic_parity(i)? {
                Parity::Odd => a + d * b,
                Parity::Even => d * a + b,
                Parity::MultiComponent => return Err(TraceError::MultiComponentCrossing(i)),
            };
            product = product * phi;
        }
        let uf = self.strand_classes(false);
        let k = (0..self.edges).filter(|&e| uf.find(e) == e).count() + self.free_loops;
        let (p, n) = self.sign_counts(|_| true);
        Ok(beta.delta_pow(k as u32) * beta.w_pow(n as i64 - p as i64) * product)
    }

    /// Recursive expansion that switches to [`TraceDiagram::evaluate_by_parity`]
    /// wherever its preconditions hold.
    pub fn evaluate_hybrid(&self, colors: &[usize], beta: &Bracket) -> Result<Elem, TraceError> {
        if !self.is_closed() {
            return Err(TraceError::Open);
        }
        self.check_coloring(beta.biquandle(), colors)?;
        Ok(self.hybrid(colors, beta))
    }

    fn hybrid(&self, colors: &[usize], beta: &Bracket) -> Elem {
        if let Ok(v) = self.evaluate_by_parity(colors, beta) {
            return v;
        }
        let i = self.crossing_indices()[0];
        let mut total = beta.ring().zero();
        for s in [Smoothing::A, Smoothing::B] {
            let (c, child) = self.smooth_crossing(i, s, colors, beta).expect("crossing index");
            total = total + c * child.hybrid(colors, beta);
        }
        total
    }
}

fn bump(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    UIn = 0,
    OIn = 1,
    OOut = 2,
    UOut = 3,
}

impl Slot {
    const ALL: [Slot; 4] = [Slot::UIn, Slot::OIn, Slot::OOut, Slot::UOut];

    fn is_output(self) -> bool {
        matches!(self, Slot::OOut | Slot::UOut)
    }
}

trait SlotAccess {
    fn slot(&self, s: Slot) -> usize;
}

impl SlotAccess for Crossing {
    fn slot(&self, s: Slot) -> usize {
        match s {
            Slot::UIn => self.u_in,
            Slot::OIn => self.o_in,
            Slot::OOut => self.o_out,
            Slot::UOut => self.u_out,
        }
    }
}

impl Node {
    /// The slot a walk leaves by after entering at `s`, traces deleted.
    fn partner(&self, s: Slot) -> Slot {
        use Slot::*;
        match (self.kind, s) {
            (NodeKind::Crossing, UIn) => UOut,
            (NodeKind::Crossing, UOut) => UIn,
            (NodeKind::Crossing, OIn) => OOut,
            (NodeKind::Crossing, OOut) => OIn,
            (NodeKind::TraceA, UIn) => OOut,
            (NodeKind::TraceA, OOut) => UIn,
            (NodeKind::TraceA, OIn) => UOut,
            (NodeKind::TraceA, UOut) => OIn,
            (NodeKind::TraceB, UIn) => OIn,
            (NodeKind::TraceB, OIn) => UIn,
            (NodeKind::TraceB, OOut) => UOut,
            (NodeKind::TraceB, UOut) => OOut,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
    MultiComponent,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Odd => "odd",
            Parity::Even => "even",
            Parity::MultiComponent => "multi-component",
        })
    }
}

/// A parsed trace file: the diagram, an optional full coloring and the
/// color pair recorded on each trace line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceFile {
    pub diagram: TraceDiagram,
    pub colors: Option<Vec<usize>>,
    pub recorded: Vec<Option<(usize, usize)>>,
}

impl TraceFile {
    /// Crossing lines as in diagram files, plus
    /// `traceA ± pass(i,o) pass(i,o) [x y]`,
    /// `traceB ± sink(i,i) source(o,o) [x y]`, `loops k` and `colors c1 … cm`.
    pub fn parse(text: &str) -> Result<TraceFile, ParseError> {
        let mut nodes = Vec::new();
        let mut recorded = Vec::new();
        let mut loops = 0;
        let mut colors = None;
        for line in content_lines(text) {
            let toks = line.tokens();
            match toks[0].text {
                "loops" => {
                    loops = single_number(&line, &toks)?;
                }
                "colors" => {
                    let mut cs = Vec::new();
                    for t in &toks[1..] {
                        cs.push(positive(&line, *t)? - 1);
                    }
                    colors = Some((cs, line.number));
                }
                "traceA" | "traceB" => {
                    let (node, pair) = parse_trace(&line, &toks)?;
                    nodes.push(node);
                    recorded.push(pair);
                }
                _ => {
                    nodes.push(Node {
                        kind: NodeKind::Crossing,
                        rec: parse_crossing(&line, &toks)?,
                    });
                    recorded.push(None);
                }
            }
        }
        let edges = nodes.iter().flat_map(|n| n.rec.slots()).max().map_or(0, |m| m + 1);
        let diagram = TraceDiagram::new(nodes, edges, loops);
        let colors = match colors {
            Some((cs, number)) if cs.len() != diagram.color_slots() => {
                return Err(ParseError::new(
                    number,
                    1,
                    format!("expected {} colors, found {}", diagram.color_slots(), cs.len()),
                ))
            }
            other => other.map(|(cs, _)| cs),
        };
        Ok(TraceFile {
            diagram,
            colors,
            recorded,
        })
    }

    /// The colorings this file describes: its `colors` line if present,
    /// otherwise every coloring agreeing with the recorded trace pairs.
    pub fn colorings(&self, x: &Biquandle) -> Result<Vec<Vec<usize>>, TraceError> {
        let d = &self.diagram;
        if let Some(c) = &self.colors {
            if c.iter().any(|&v| v >= x.size()) {
                return Ok(Vec::new());
            }
            d.check_coloring(x, c)?;
            let agrees = d.nodes.iter().zip(&self.recorded).all(|(n, r)| {
                r.map_or(true, |(a, b)| {
                    let (k1, k2) = n.rec.key_slots();
                    c[k1] == a && c[k2] == b
                })
            });
            return Ok(if agrees { vec![c.clone()] } else { Vec::new() });
        }
        let mut fixed = vec![None; d.edges];
        for (n, r) in d.nodes.iter().zip(&self.recorded) {
            if let Some((a, b)) = *r {
                if a >= x.size() || b >= x.size() {
                    return Ok(Vec::new());
                }
                let (k1, k2) = n.rec.key_slots();
                for (e, v) in [(k1, a), (k2, b)] {
                    match fixed[e] {
                        Some(old) if old != v => return Ok(Vec::new()),
                        _ => fixed[e] = Some(v),
                    }
                }
            }
        }
        Ok(d.colorings(x, &fixed))
    }
}

fn single_number(line: &Line<'_>, toks: &[Token<'_>]) -> Result<usize, ParseError> {
    if toks.len() != 2 {
        return Err(line.error(toks[0].column, "expected a single number"));
    }
    toks[1]
        .text
        .parse()
        .map_err(|_| line.error(toks[1].column, "expected a nonnegative integer"))
}

fn positive(line: &Line<'_>, tok: Token<'_>) -> Result<usize, ParseError> {
    tok.text
        .parse::<usize>()
        .ok()
        .filter(|&v| v > 0)
        .ok_or_else(|| line.error(tok.column, format!("expected a positive integer, found {:?}", tok.text)))
}

fn parse_group(line: &Line<'_>, tok: Token<'_>, name: &str) -> Result<(usize, usize), ParseError> {
    let bad = || line.error(tok.column, format!("expected {name}(a,b), found {:?}", tok.text));
    let inner = tok
        .text
        .strip_prefix(name)
        .and_then(|r| r.strip_prefix('('))
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(bad)?;
    let (a, b) = inner.split_once(',').ok_or_else(bad)?;
    let num = |s: &str| s.trim().parse::<usize>().ok().filter(|&v| v > 0).ok_or_else(bad);
    Ok((num(a)? - 1, num(b)? - 1))
}

fn parse_trace(line: &Line<'_>, toks: &[Token<'_>]) -> Result<(Node, Option<(usize, usize)>), ParseError> {
    if toks.len() != 4 && toks.len() != 6 {
        return Err(line.error(toks[0].column, "a trace needs a sign, two attachments and an optional color pair"));
    }
    let sign = Sign::parse(toks[1].text).ok_or_else(|| line.error(toks[1].column, "expected `+` or `-`"))?;
    let (kind, rec) = if toks[0].text == "traceA" {
        let (ui, oo) = parse_group(line, toks[2], "pass")?;
        let (oi, uo) = parse_group(line, toks[3], "pass")?;
        (NodeKind::TraceA, Crossing::new(sign, ui, oi, oo, uo))
    } else {
        let (ui, oi) = parse_group(line, toks[2], "sink")?;
        let (oo, uo) = parse_group(line, toks[3], "source")?;
        (NodeKind::TraceB, Crossing::new(sign, ui, oi, oo, uo))
    };
    let pair = if toks.len() == 6 {
        Some((positive(line, toks[4])? - 1, positive(line, toks[5])? - 1))
    } else {
        None
    };
    Ok((Node { kind, rec }, pair))
}

impl fmt::Display for TraceDiagram {
    /// The trace file format, without a colors line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.free_loops > 0 {
            writeln!(f, "loops {}", self.free_loops)?;
        }
        for n in &self.nodes {
            let c = &n.rec;
            let s = c.sign.symbol();
            match n.kind {
                NodeKind::Crossing => writeln!(f, "{c}")?,
                NodeKind::TraceA => writeln!(
                    f,
                    "traceA {s} pass({},{}) pass({},{})",
                    c.u_in + 1,
                    c.o_out + 1,
                    c.o_in + 1,
                    c.u_out + 1
                )?,
                NodeKind::TraceB => writeln!(
                    f,
                    "traceB {s} sink({},{}) source({},{})",
                    c.u_in + 1,
                    c.o_in + 1,
                    c.o_out + 1,
                    c.u_out + 1
                )?,
            }
        }
        Ok(())
    }
}

/// A step of a braid-like tangle read bottom to top.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Event {
    /// Crossing of positions `i`, `i + 1`; positive puts the left strand over.
    Cross(usize, Sign),
    /// Trace between positions `i`, `i + 1`; strands keep their positions.
    Trace(usize, Smoothing, Sign),
}

/// Where a loose end sits on the tangle boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Bottom(usize),
    Top(usize),
}

/// A tangle built from events, with its loose ends labeled by position.
#[derive(Debug, Clone)]
pub struct Tangle {
    pub diagram: TraceDiagram,
    pub labels: BTreeMap<End, Side>,
    pub bottom: Vec<usize>,
    pub top: Vec<usize>,
}

impl Tangle {
    /// Strands start at positions `0..strands`; those listed in `reversed`
    /// run downward. Traces may not touch reversed strands.
    pub fn build(strands: usize, events: &[Event], reversed: &[usize]) -> Tangle {
        let mut at: Vec<usize> = (0..strands).collect();
        let mut edge: Vec<usize> = (0..strands).collect();
        let mut next = strands;
        let mut nodes = Vec::new();
        for &ev in events {
            let i = match ev {
                Event::Cross(i, _) | Event::Trace(i, _, _) => i,
            };
            assert!(i + 1 < strands, "position out of range");
            let (l, r) = (edge[i], edge[i + 1]);
            let (nl, nr) = (next, next + 1);
            next += 2;
            let node = match ev {
                Event::Cross(_, sign) => {
                    let mut c = match sign {
                        Sign::Pos => Crossing::new(Sign::Pos, r, l, nr, nl),
                        Sign::Neg => Crossing::new(Sign::Neg, l, r, nl, nr),
                    };
                    let (lrev, rrev) = (reversed.contains(&at[i]), reversed.contains(&at[i + 1]));
                    let left_under = sign == Sign::Neg;
                    for (rev, is_left) in [(lrev, true), (rrev, false)] {
                        if rev {
                            if is_left == left_under {
                                std::mem::swap(&mut c.u_in, &mut c.u_out);
                            } else {
                                std::mem::swap(&mut c.o_in, &mut c.o_out);
                            }
                            c.sign = c.sign.flip();
                        }
                    }
                    at.swap(i, i + 1);
                    Node {
                        kind: NodeKind::Crossing,
                        rec: c,
                    }
                }
                Event::Trace(_, kind, sign) => {
                    assert!(
                        !reversed.contains(&at[i]) && !reversed.contains(&at[i + 1]),
                        "traces on reversed strands are not supported"
                    );
                    let rec = match sign {
                        Sign::Pos => Crossing::new(Sign::Pos, r, l, nr, nl),
                        Sign::Neg => Crossing::new(Sign::Neg, l, r, nl, nr),
                    };
                    Node {
                        kind: NodeKind::of(kind),
                        rec,
                    }
                }
            };
            nodes.push(node);
            edge[i] = nl;
            edge[i + 1] = nr;
        }
        let diagram = TraceDiagram::new(nodes, next, 0);
        let mut labels = BTreeMap::new();
        let bottom: Vec<usize> = (0..strands).collect();
        for (pos, &e) in bottom.iter().enumerate() {
            let end = if reversed.contains(&pos) { End::Head(e) } else { End::Tail(e) };
            labels.insert(end, Side::Bottom(pos));
        }
        for (pos, &e) in edge.iter().enumerate() {
            let end = if reversed.contains(&at[pos]) { End::Tail(e) } else { End::Head(e) };
            labels.insert(end, Side::Top(pos));
        }
        Tangle {
            diagram,
            labels,
            bottom,
            top: edge,
        }
    }

    /// Evaluation with loose ends replaced by boundary labels, optionally
    /// without the crossings' share of `w^{n-p}`.
    fn labeled_values(&self, colors: &[usize], beta: &Bracket, unnormalized: bool) -> Result<BTreeMap<Vec<(Side, Side)>, Elem>, TraceError> {
        let raw = self.diagram.evaluate_tangle(colors, beta)?;
        let (p, n) = self.diagram.sign_counts(|k| k == NodeKind::Crossing);
        let scale = if unnormalized { beta.w_pow(p as i64 - n as i64) } else { beta.ring().one() };
        let mut out = BTreeMap::new();
        for (m, v) in raw {
            let mut pairs: Vec<(Side, Side)> = m
                .iter()
                .map(|(a, b)| {
                    let (x, y) = (self.labels[a], self.labels[b]);
                    (x.min(y), x.max(y))
                })
                .collect();
            pairs.sort();
            if !v.is_zero() {
                out.insert(pairs, v * &scale);
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoveFamily {
    /// A strand passes over a trace.
    Over,
    /// A strand passes under a trace.
    Under,
    /// A strand crossing both arms of a type B trace on one side, at
    /// monochromatic colors, moves through the trace to the other side with
    /// its crossings switched.
    PassThrough,
}

/// One of the trace move schemas checked by [`trace_move_fixture_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TraceMove {
    pub family: MoveFamily,
    pub kind: Smoothing,
    /// The moving strand starts on the left (otherwise on the right).
    pub from_left: bool,
    /// The moving strand runs downward.
    pub reversed: bool,
    pub trace_sign: Sign,
    /// Sign of both crossings before the move (pass-through moves only).
    pub first: Sign,
}

impl TraceMove {
    pub fn name(&self) -> String {
        let rev = if self.reversed { "-rev" } else { "" };
        match self.family {
            MoveFamily::Over | MoveFamily::Under => format!(
                "{}-{:?}-{}{}",
                if self.family == MoveFamily::Over { "over" } else { "under" },
                self.kind,
                if self.from_left { "lr" } else { "rl" },
                rev
            ),
            MoveFamily::PassThrough => format!(
                "pass-trace{}-first{}{}",
                self.trace_sign.symbol(),
                self.first.symbol(),
                rev
            ),
        }
    }

    /// The tangles before and after the move.
    pub fn tangles(&self) -> (Tangle, Tangle) {
        use Event::{Cross, Trace};
        let ts = self.trace_sign;
        let (before, after, mover) = match self.family {
            MoveFamily::Over | MoveFamily::Under => {
                let sg = if self.family == MoveFamily::Over { Sign::Pos } else { Sign::Neg };
                if self.from_left {
                    (
                        vec![Trace(1, self.kind, ts), Cross(0, sg), Cross(1, sg)],
                        vec![Cross(0, sg), Cross(1, sg), Trace(0, self.kind, ts)],
                        0,
                    )
                } else {
                    let sg = sg.flip();
                    (
                        vec![Trace(0, self.kind, ts), Cross(1, sg), Cross(0, sg)],
                        vec![Cross(1, sg), Cross(0, sg), Trace(1, self.kind, ts)],
                        2,
                    )
                }
            }
            MoveFamily::PassThrough => {
                let f = self.first;
                (
                    vec![Trace(1, Smoothing::B, ts), Cross(0, f), Cross(1, f)],
                    vec![Cross(0, f.flip()), Cross(1, f.flip()), Trace(0, Smoothing::B, ts)],
                    0,
                )
            }
        };
        let rev: Vec<usize> = if self.reversed { vec![mover] } else { Vec::new() };
        (Tangle::build(3, &before, &rev), Tangle::build(3, &after, &rev))
    }
}

/// The 16 over/under schemas followed by the 8 pass-through schemas.
pub fn all_moves() -> Vec<TraceMove> {
    let mut out = Vec::new();
    for family in [MoveFamily::Over, MoveFamily::Under] {
        for kind in [Smoothing::A, Smoothing::B] {
            for from_left in [true, false] {
                for reversed in [false, true] {
                    out.push(TraceMove {
                        family,
                        kind,
                        from_left,
                        reversed,
                        trace_sign: Sign::Pos,
                        first: Sign::Pos,
                    });
                }
            }
        }
    }
    for trace_sign in [Sign::Pos, Sign::Neg] {
        for first in [Sign::Pos, Sign::Neg] {
            for reversed in [false, true] {
                out.push(TraceMove {
                    family: MoveFamily::PassThrough,
                    kind: Smoothing::B,
                    from_left: true,
                    reversed,
                    trace_sign,
                    first,
                });
            }
        }
    }
    out
}

/// Whether the move leaves the bracket unchanged: for every coloring of the
/// tangle before the move, the tangle after it (with the same boundary
/// colors) has the same value for every boundary connectivity.
/// Pass-through moves only consider colorings with monochromatic nodes.
pub fn trace_move_fixture_check(beta: &Bracket, mv: &TraceMove) -> bool {
    let (before, after) = mv.tangles();
    tangle_move_check(beta, &before, &after, mv.family == MoveFamily::PassThrough)
}

/// Whether two tangles with matching boundaries have equal values for every
/// coloring of `before`. With `monochromatic`, only colorings whose nodes
/// all have equal key colors count, `after` must keep that property, and
/// values are compared without the `w` factor of the crossings.
pub fn tangle_move_check(beta: &Bracket, before: &Tangle, after: &Tangle, monochromatic: bool) -> bool {
    let x = beta.biquandle();
    let boundary: Vec<usize> = before.bottom.iter().chain(&before.top).copied().collect();
    let boundary_after: Vec<usize> = after.bottom.iter().chain(&after.top).copied().collect();
    let mono = |t: &Tangle, c: &[usize]| {
        t.diagram.nodes().iter().all(|n| {
            let (k1, k2) = n.rec.key_slots();
            c[k1] == c[k2]
        })
    };
    for c in before.diagram.colorings(x, &vec![None; before.diagram.edge_count()]) {
        if monochromatic && !mono(before, &c) {
            continue;
        }
        let mut fixed = vec![None; after.diagram.edge_count()];
        for (&e, &f) in boundary.iter().zip(&boundary_after) {
            fixed[f] = Some(c[e]);
        }
        let matches = after.diagram.colorings(x, &fixed);
        let [c2] = matches.as_slice() else {
            return false;
        };
        if monochromatic && !mono(after, c2) {
            return false;
        }
        let lhs = before.labeled_values(&c, beta, monochromatic);
        let rhs = after.labeled_values(c2, beta, monochromatic);
        match (lhs, rhs) {
            (Ok(l), Ok(r)) if l == r => {}
            _ => return false,
        }
    }
    true
}

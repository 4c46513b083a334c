//! Oriented link diagrams as signed crossing records over numbered semiarcs.
//!
//! A crossing is stored as `(u_in, o_in, o_out, u_out)`: the under strand runs
//! `u_in -> u_out`, the over strand `o_in -> o_out`. Semiarc ids are `0..m`
//! internally and `1..=m` in files.

use std::fmt;

use petgraph::unionfind::UnionFind;
use thiserror::Error;

use crate::text::{content_lines, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Pos => '+',
            Sign::Neg => '-',
        }
    }

    pub fn parse(s: &str) -> Option<Sign> {
        match s {
            "+" | "+1" => Some(Sign::Pos),
            "-" | "-1" => Some(Sign::Neg),
            _ => None,
        }
    }
}

/// Which of the two resolutions to apply at a crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Smoothing {
    /// Oriented: `u_in–o_out`, `o_in–u_out`.
    A,
    /// Disoriented: `u_in–o_in`, `u_out–o_out`.
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Crossing {
    pub sign: Sign,
    pub u_in: usize,
    pub o_in: usize,
    pub o_out: usize,
    pub u_out: usize,
}

impl Crossing {
    pub fn new(sign: Sign, u_in: usize, o_in: usize, o_out: usize, u_out: usize) -> Self {
        Self {
            sign,
            u_in,
            o_in,
            o_out,
            u_out,
        }
    }

    pub fn slots(&self) -> [usize; 4] {
        [self.u_in, self.o_in, self.o_out, self.u_out]
    }

    /// The semiarcs whose colors `(x, y)` index this crossing's coefficients
    /// and determine the other two colors: `(u_in, o_out)` when positive,
    /// `(u_out, o_in)` when negative.
    pub fn key_slots(&self) -> (usize, usize) {
        match self.sign {
            Sign::Pos => (self.u_in, self.o_out),
            Sign::Neg => (self.u_out, self.o_in),
        }
    }

    /// The semiarcs colored `x ▷̲ y` and `y ▷̄ x` respectively.
    pub fn derived_slots(&self) -> (usize, usize) {
        match self.sign {
            Sign::Pos => (self.u_out, self.o_in),
            Sign::Neg => (self.u_in, self.o_out),
        }
    }

    pub fn pairs(&self, s: Smoothing) -> [(usize, usize); 2] {
        match s {
            Smoothing::A => [(self.u_in, self.o_out), (self.o_in, self.u_out)],
            Smoothing::B => [(self.u_in, self.o_in), (self.u_out, self.o_out)],
        }
    }

    /// Same site with the other strand on top.
    pub fn switched(&self) -> Self {
        Self::new(self.sign.flip(), self.o_in, self.u_in, self.u_out, self.o_out)
    }

    fn map(&self, f: impl Fn(usize) -> usize) -> Self {
        Self::new(self.sign, f(self.u_in), f(self.o_in), f(self.o_out), f(self.u_out))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("crossing index {index} out of range (diagram has {count})")]
    IndexOutOfRange { index: usize, count: usize },
}

/// A problem found by [`Diagram::validate`]. Ids are 0-indexed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiagramIssue {
    DuplicateInput(usize),
    DuplicateOutput(usize),
    MissingInput(usize),
    MissingOutput(usize),
}

impl fmt::Display for DiagramIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagramIssue::DuplicateInput(a) => write!(f, "semiarc {} enters more than one crossing", a + 1),
            DiagramIssue::DuplicateOutput(a) => write!(f, "semiarc {} leaves more than one crossing", a + 1),
            DiagramIssue::MissingInput(a) => write!(f, "semiarc {} never enters a crossing", a + 1),
            DiagramIssue::MissingOutput(a) => write!(f, "semiarc {} never leaves a crossing", a + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Diagram {
    crossings: Vec<Crossing>,
    arcs: usize,
    free_loops: usize,
}

impl Diagram {
    /// The semiarc count is one more than the largest id used.
    pub fn new(crossings: Vec<Crossing>, free_loops: usize) -> Self {
        let arcs = crossings
            .iter()
            .flat_map(|c| c.slots())
            .max()
            .map_or(0, |m| m + 1);
        Self {
            crossings,
            arcs,
            free_loops,
        }
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn arc_count(&self) -> usize {
        self.arcs
    }

    pub fn free_loops(&self) -> usize {
        self.free_loops
    }

    /// Semiarcs plus free circles: the length of a coloring vector.
    pub fn color_slots(&self) -> usize {
        self.arcs + self.free_loops
    }

    pub fn validate(&self) -> Vec<DiagramIssue> {
        let mut ins = vec![0usize; self.arcs];
        let mut outs = vec![0usize; self.arcs];
        for c in &self.crossings {
            ins[c.u_in] += 1;
            ins[c.o_in] += 1;
            outs[c.o_out] += 1;
            outs[c.u_out] += 1;
        }
        let mut issues = Vec::new();
        for a in 0..self.arcs {
            match ins[a] {
                0 => issues.push(DiagramIssue::MissingInput(a)),
                1 => {}
                _ => issues.push(DiagramIssue::DuplicateInput(a)),
            }
            match outs[a] {
                0 => issues.push(DiagramIssue::MissingOutput(a)),
                1 => {}
                _ => issues.push(DiagramIssue::DuplicateOutput(a)),
            }
        }
        issues
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// `(p, n)`: positive and negative crossing counts.
    pub fn writhe_counts(&self) -> (usize, usize) {
        let p = self.crossings.iter().filter(|c| c.sign == Sign::Pos).count();
        (p, self.crossings.len() - p)
    }

    /// Circles after smoothing every crossing as `state` says, plus free loops.
    pub fn count_state_loops(&self, state: &[Smoothing]) -> usize {
        assert_eq!(state.len(), self.crossings.len(), "state length must match crossing count");
        let mut uf = UnionFind::new(self.arcs);
        for (c, &s) in self.crossings.iter().zip(state) {
            for (a, b) in c.pairs(s) {
                uf.union(a, b);
            }
        }
        let roots = (0..self.arcs).filter(|&a| uf.find(a) == a).count();
        roots + self.free_loops
    }

    /// As [`Diagram::count_state_loops`], with bit `i` of `mask` set for a
    /// B-smoothing at crossing `i`.
    pub fn loops_for_mask(&self, mask: u64) -> usize {
        let state: Vec<Smoothing> = (0..self.crossings.len())
            .map(|i| if mask >> i & 1 == 1 { Smoothing::B } else { Smoothing::A })
            .collect();
        self.count_state_loops(&state)
    }

    fn check_index(&self, index: usize) -> Result<(), DiagramError> {
        if index < self.crossings.len() {
            Ok(())
        } else {
            Err(DiagramError::IndexOutOfRange {
                index,
                count: self.crossings.len(),
            })
        }
    }

    pub fn switch_crossing(&self, index: usize) -> Result<Diagram, DiagramError> {
        self.check_index(index)?;
        let mut out = self.clone();
        out.crossings[index] = out.crossings[index].switched();
        Ok(out)
    }

    /// Removes a crossing by its oriented smoothing and renumbers semiarcs.
    pub fn oriented_smoothing(&self, index: usize) -> Result<Diagram, DiagramError> {
        self.oriented_smoothing_map(index).map(|(d, _)| d)
    }

    /// As [`Diagram::oriented_smoothing`], also returning where each old
    /// semiarc went (`None` if it now lies on a free circle).
    pub fn oriented_smoothing_map(&self, index: usize) -> Result<(Diagram, Vec<Option<usize>>), DiagramError> {
        self.check_index(index)?;
        let c = self.crossings[index];
        let mut uf = UnionFind::new(self.arcs);
        for (a, b) in c.pairs(Smoothing::A) {
            uf.union(a, b);
        }
        let rest: Vec<Crossing> = self
            .crossings
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != index)
            .map(|(_, c)| *c)
            .collect();
        let mut used = vec![false; self.arcs];
        for x in &rest {
            for a in x.slots() {
                used[uf.find(a)] = true;
            }
        }
        let mut new_id = vec![None; self.arcs];
        let mut next = 0;
        let mut closed = 0;
        for a in 0..self.arcs {
            let root = uf.find(a);
            if root != a {
                continue;
            }
            if used[root] {
                new_id[root] = Some(next);
                next += 1;
            } else {
                closed += 1;
            }
        }
        let map: Vec<Option<usize>> = (0..self.arcs).map(|a| new_id[uf.find(a)]).collect();
        let crossings = rest
            .iter()
            .map(|x| x.map(|a| map[a].expect("semiarc of a surviving crossing")))
            .collect();
        let mut out = Diagram::new(crossings, self.free_loops + closed);
        out.arcs = next;
        Ok((out, map))
    }

    /// Closure of a braid word on `strands` strands. Generator `i` (1-based)
    /// crosses positions `i` and `i + 1`; a positive letter puts the left
    /// strand over.
    pub fn braid_closure(strands: usize, word: &[i32]) -> Diagram {
        assert!(strands >= 1);
        let mut next = strands;
        let mut current: Vec<usize> = (0..strands).collect();
        let mut crossings = Vec::new();
        for &g in word {
            let i = g.unsigned_abs() as usize - 1;
            assert!(i + 1 < strands, "generator {g} out of range");
            let (l, r) = (current[i], current[i + 1]);
            let (nl, nr) = (next, next + 1);
            next += 2;
            crossings.push(if g > 0 {
                Crossing::new(Sign::Pos, r, l, nr, nl)
            } else {
                Crossing::new(Sign::Neg, l, r, nl, nr)
            });
            current[i] = nl;
            current[i + 1] = nr;
        }
        let mut target: Vec<usize> = (0..next).collect();
        for (s, &end) in current.iter().enumerate() {
            target[end] = s;
        }
        let resolve = |a: usize| target[a];
        let mut crossings: Vec<Crossing> = crossings.iter().map(|c| c.map(resolve)).collect();
        let mut used: Vec<usize> = crossings.iter().flat_map(|c| c.slots()).collect();
        used.sort_unstable();
        used.dedup();
        let free = (0..strands).filter(|s| !used.contains(s)).count();
        for c in &mut crossings {
            *c = c.map(|a| used.binary_search(&a).expect("used semiarc"));
        }
        Diagram::new(crossings, free)
    }

    /// Parses `± u_in o_in o_out u_out` lines and an optional `loops k` line.
    pub fn parse(text: &str) -> Result<Diagram, ParseError> {
        let mut crossings = Vec::new();
        let mut loops = None;
        for line in content_lines(text) {
            let toks = line.tokens();
            if toks[0].text == "loops" {
                if loops.is_some() || toks.len() != 2 {
                    return Err(line.error(toks[0].column, "expected a single `loops k` line"));
                }
                let k = toks[1]
                    .text
                    .parse()
                    .map_err(|_| line.error(toks[1].column, "loop count must be a nonnegative integer"))?;
                loops = Some(k);
                continue;
            }
            crossings.push(parse_crossing(&line, &toks)?);
        }
        Ok(Diagram::new(crossings, loops.unwrap_or(0)))
    }
}

pub(crate) fn parse_crossing(line: &crate::text::Line<'_>, toks: &[crate::text::Token<'_>]) -> Result<Crossing, ParseError> {
    let sign = Sign::parse(toks[0].text)
        .ok_or_else(|| line.error(toks[0].column, format!("expected `+` or `-`, found {:?}", toks[0].text)))?;
    if toks.len() != 5 {
        return Err(line.error(toks[0].column, "a crossing needs a sign and four semiarc ids"));
    }
    let mut ids = [0usize; 4];
    for (slot, tok) in ids.iter_mut().zip(&toks[1..]) {
        let v: usize = tok
            .text
            .parse()
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| line.error(tok.column, format!("semiarc ids are positive integers, found {:?}", tok.text)))?;
        *slot = v - 1;
    }
    Ok(Crossing::new(sign, ids[0], ids[1], ids[2], ids[3]))
}

impl fmt::Display for Crossing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {} {}",
            self.sign.symbol(),
            self.u_in + 1,
            self.o_in + 1,
            self.o_out + 1,
            self.u_out + 1
        )
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.free_loops > 0 {
            writeln!(f, "loops {}", self.free_loops)?;
        }
        for c in &self.crossings {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

//! Finite biquandles given by their two operation tables.
//!
//! Elements are `0..n` internally and `1..=n` in files and printed output.
//! `under(x, y)` is `x ▷̲ y` (written `x^y`) and `over(x, y)` is `x ▷̄ y`
//! (written `x_y`).

use std::fmt;

use num_integer::Integer;
use thiserror::Error;

use crate::text::{content_lines, parse_label, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BiquandleError {
    #[error("operation tables must be non-empty and square of equal size")]
    Shape,
    #[error("table entry {value} at ({x}, {y}) is out of range")]
    Entry { x: usize, y: usize, value: usize },
    #[error("{param} = {value} is not a unit mod {modulus}")]
    NotInvertible {
        param: char,
        value: u64,
        modulus: u64,
    },
}

/// One failed instance of the biquandle axioms. Elements are 0-indexed; the
/// `Display` impl prints them 1-indexed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomViolation {
    /// `x ▷̲ x ≠ x ▷̄ x`.
    Diagonal { x: usize, under: usize, over: usize },
    /// `y ↦ y ▷̲ x` (`under == true`) or `y ↦ y ▷̄ x` is not a bijection.
    ColumnNotBijective { under: bool, x: usize },
    /// `S(x, y) = (y ▷̄ x, x ▷̲ y)` is not injective: two pairs share an image.
    SwitchNotBijective { first: (usize, usize), second: (usize, usize) },
    /// Exchange law 1, 2 or 3 fails at `(x, y, z)`.
    Exchange {
        law: u8,
        x: usize,
        y: usize,
        z: usize,
        lhs: usize,
        rhs: usize,
    },
}

impl AxiomViolation {
    pub fn axiom(&self) -> &'static str {
        match self {
            AxiomViolation::Diagonal { .. } => "i",
            AxiomViolation::ColumnNotBijective { .. } | AxiomViolation::SwitchNotBijective { .. } => "ii",
            AxiomViolation::Exchange { .. } => "iii",
        }
    }
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            AxiomViolation::Diagonal { x, under, over } => write!(
                f,
                "axiom (i) at x={}: x^x = {} but x_x = {}",
                x + 1,
                under + 1,
                over + 1
            ),
            AxiomViolation::ColumnNotBijective { under, x } => write!(
                f,
                "axiom (ii): y -> y{}{} is not a bijection",
                if under { "^" } else { "_" },
                x + 1
            ),
            AxiomViolation::SwitchNotBijective { first, second } => write!(
                f,
                "axiom (ii): S({},{}) = S({},{})",
                first.0 + 1,
                first.1 + 1,
                second.0 + 1,
                second.1 + 1
            ),
            AxiomViolation::Exchange { law, x, y, z, lhs, rhs } => write!(
                f,
                "axiom (iii) law {law} at (x,y,z)=({},{},{}): lhs {} rhs {}",
                x + 1,
                y + 1,
                z + 1,
                lhs + 1,
                rhs + 1
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Biquandle {
    n: usize,
    under: Vec<usize>,
    over: Vec<usize>,
}

impl Biquandle {
    /// Builds a biquandle from row-major tables. Only the shape is checked here;
    /// call [`Biquandle::verify`] for the axioms.
    pub fn from_tables(under: Vec<Vec<usize>>, over: Vec<Vec<usize>>) -> Result<Self, BiquandleError> {
        let n = under.len();
        if n == 0 || over.len() != n || under.iter().chain(&over).any(|row| row.len() != n) {
            return Err(BiquandleError::Shape);
        }
        for table in [&under, &over] {
            for (x, row) in table.iter().enumerate() {
                if let Some((y, &value)) = row.iter().enumerate().find(|(_, &v)| v >= n) {
                    return Err(BiquandleError::Entry { x, y, value });
                }
            }
        }
        Ok(Self {
            n,
            under: under.concat(),
            over: over.concat(),
        })
    }

    /// The biquandle where both operations return the left operand.
    pub fn trivial(n: usize) -> Self {
        let row = |x: usize| vec![x; n];
        let table: Vec<Vec<usize>> = (0..n).map(row).collect();
        Self::from_tables(table.clone(), table).expect("trivial tables are well formed")
    }

    /// Alexander biquandle on `Z/n`: `x^y = t x + (s - t) y`, `x_y = s x`.
    pub fn alexander(n: u64, t: u64, s: u64) -> Result<Self, BiquandleError> {
        for (param, value) in [('t', t), ('s', s)] {
            if value.gcd(&n) != 1 {
                return Err(BiquandleError::NotInvertible {
                    param,
                    value,
                    modulus: n,
                });
            }
        }
        let (t, s, m) = (t % n, s % n, n);
        let diff = (s + m - t) % m;
        let under = (0..m)
            .map(|x| (0..m).map(|y| ((t * x + diff * y) % m) as usize).collect())
            .collect();
        let over = (0..m)
            .map(|x| (0..m).map(|_| ((s * x) % m) as usize).collect())
            .collect();
        Self::from_tables(under, over)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// `x ▷̲ y`.
    #[inline]
    pub fn under(&self, x: usize, y: usize) -> usize {
        self.under[x * self.n + y]
    }

    /// `x ▷̄ y`.
    #[inline]
    pub fn over(&self, x: usize, y: usize) -> usize {
        self.over[x * self.n + y]
    }

    /// The kink map `x ↦ x ▷̲ x`.
    pub fn kink(&self, x: usize) -> usize {
        self.under(x, x)
    }

    pub fn under_rows(&self) -> impl Iterator<Item = &[usize]> {
        self.under.chunks(self.n)
    }

    pub fn over_rows(&self) -> impl Iterator<Item = &[usize]> {
        self.over.chunks(self.n)
    }

    /// All violated axiom instances, in axiom order. Empty means valid.
    pub fn verify(&self) -> Vec<AxiomViolation> {
        let n = self.n;
        let mut out = Vec::new();
        for x in 0..n {
            if self.under(x, x) != self.over(x, x) {
                out.push(AxiomViolation::Diagonal {
                    x,
                    under: self.under(x, x),
                    over: self.over(x, x),
                });
            }
        }
        for x in 0..n {
            for under in [true, false] {
                let mut seen = vec![false; n];
                for y in 0..n {
                    let v = if under { self.under(y, x) } else { self.over(y, x) };
                    seen[v] = true;
                }
                if seen.contains(&false) {
                    out.push(AxiomViolation::ColumnNotBijective { under, x });
                }
            }
        }
        let mut preimage = vec![None; n * n];
        'pairs: for x in 0..n {
            for y in 0..n {
                let image = self.over(y, x) * n + self.under(x, y);
                match preimage[image] {
                    Some(first) => {
                        out.push(AxiomViolation::SwitchNotBijective { first, second: (x, y) });
                        break 'pairs;
                    }
                    None => preimage[image] = Some((x, y)),
                }
            }
        }
        let (u, o) = (|a, b| self.under(a, b), |a, b| self.over(a, b));
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let laws = [
                        (u(u(x, y), u(z, y)), u(u(x, z), o(y, z))),
                        (o(u(x, y), u(z, y)), u(o(x, z), o(y, z))),
                        (o(o(x, y), o(z, y)), o(o(x, z), u(y, z))),
                    ];
                    for (k, (lhs, rhs)) in laws.into_iter().enumerate() {
                        if lhs != rhs {
                            out.push(AxiomViolation::Exchange {
                                law: k as u8 + 1,
                                x,
                                y,
                                z,
                                lhs,
                                rhs,
                            });
                        }
                    }
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.verify().is_empty()
    }

    /// Whether the permutation `p` (as a lookup table) preserves both operations.
    pub fn is_automorphism(&self, p: &[usize]) -> bool {
        (0..self.n).all(|x| {
            (0..self.n).all(|y| {
                p[self.under(x, y)] == self.under(p[x], p[y]) && p[self.over(x, y)] == self.over(p[x], p[y])
            })
        })
    }

    /// Parses the block-matrix format: `n`, then `n` rows of `2n` 1-indexed
    /// entries `[▷̲ | ▷̄]`. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let lines = content_lines(text);
        let header = lines.first().ok_or_else(|| ParseError::new(1, 1, "empty biquandle file"))?;
        let head = header.tokens();
        if head.len() != 1 {
            return Err(header.error(1, "first line must hold only the size n"));
        }
        let n: usize = head[0]
            .text
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| header.error(head[0].column, "size must be a positive integer"))?;
        let rows = &lines[1..];
        if rows.len() != n {
            let (line, col) = rows.get(n).map_or((header.number, 1), |l| (l.number, 1));
            return Err(ParseError::new(line, col, format!("expected {n} table rows, found {}", rows.len())));
        }
        let (mut under, mut over) = (Vec::new(), Vec::new());
        for line in rows {
            let toks = line.tokens();
            if toks.len() != 2 * n {
                let col = toks.get(2 * n).map_or(line.text.len() + 1, |t| t.column);
                return Err(line.error(col, format!("expected {} entries, found {}", 2 * n, toks.len())));
            }
            let values = toks
                .iter()
                .map(|&t| parse_label(line, t, n))
                .collect::<Result<Vec<_>, _>>()?;
            under.push(values[..n].to_vec());
            over.push(values[n..].to_vec());
        }
        Ok(Self::from_tables(under, over).expect("shape checked while parsing"))
    }
}

impl fmt::Display for Biquandle {
    /// Serializes in the same block-matrix format that [`Biquandle::parse`] reads.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.n)?;
        for (u, o) in self.under_rows().zip(self.over_rows()) {
            let row: Vec<String> = u.iter().chain(o).map(|v| (v + 1).to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// All permutations of `0..n` that are automorphisms of `x`.
pub fn automorphisms(x: &Biquandle) -> Vec<Vec<usize>> {
    fn extend(x: &Biquandle, prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == x.size() {
            if x.is_automorphism(prefix) {
                out.push(prefix.clone());
            }
            return;
        }
        for v in 0..x.size() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                extend(x, prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(x, &mut Vec::new(), &mut vec![false; x.size()], &mut out);
    out
}

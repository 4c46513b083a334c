//! Exhaustive search for biquandle brackets over `Z/nZ`.

use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{Elem, Ring};
use crate::biquandle::Biquandle;
use crate::bracket::{classify_adequacy, verify_bracket, Adequacy, Bracket, BracketTables};
use crate::parallel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassFilter {
    Any,
    Adequate,
    Over,
    Under,
    Neither,
}

impl ClassFilter {
    pub fn accepts(self, a: &Adequacy) -> bool {
        match self {
            ClassFilter::Any => true,
            ClassFilter::Adequate => a.label() == "adequate",
            ClassFilter::Over => a.label() == "over",
            ClassFilter::Under => a.label() == "under",
            ClassFilter::Neither => a.label() == "neither",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchSpec {
    pub biquandle: Biquandle,
    pub modulus: u64,
    pub limit: Option<usize>,
    pub class: ClassFilter,
    /// Only search this value of `δ`.
    pub delta: Option<u64>,
}

impl SearchSpec {
    pub fn new(biquandle: Biquandle, modulus: u64) -> Self {
        Self {
            biquandle,
            modulus,
            limit: None,
            class: ClassFilter::Any,
            delta: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(u64),
    #[error("brute force needs {needed} candidates, cap is {cap}")]
    CapExceeded { needed: u128, cap: u128 },
}

fn units(n: u64) -> Vec<u64> {
    (1..n).filter(|&u| num_integer::gcd(u, n) == 1).collect()
}

fn inverse(u: u64, n: u64) -> u64 {
    (1..n).find(|&v| u * v % n == 1).expect("unit")
}

/// Emission order: `δ`, then the flattened `A` table, then `B`.
fn sort_key(b: &Bracket) -> (u64, Vec<u64>, Vec<u64>) {
    let t = b.tables();
    let flat = |m: &Vec<Vec<Elem>>| m.iter().flatten().map(|e| e.residue().unwrap_or(0)).collect();
    (b.delta().residue().unwrap_or(0), flat(&t.a), flat(&t.b))
}

fn to_bracket(x: &Biquandle, n: u64, a: &[u64], b: &[u64]) -> Option<Bracket> {
    let ring = Ring::Mod(n);
    let size = x.size();
    let table = |v: &[u64]| -> Vec<Vec<Elem>> {
        v.chunks(size)
            .map(|r| r.iter().map(|&e| ring.int(e as i64)).collect())
            .collect()
    };
    verify_bracket(
        x,
        &BracketTables {
            ring,
            a: table(a),
            b: table(b),
        },
    )
    .ok()
}

struct Searcher<'a> {
    x: &'a Biquandle,
    n: u64,
    delta: u64,
    /// Pairs `(x, y)` in assignment order, diagonal first.
    order: Vec<usize>,
    /// `(A, B)` choices for each value of `A`.
    options: Vec<(u64, u64)>,
    /// Triples whose six pairs are all assigned once position `i` is.
    buckets: Vec<Vec<[usize; 6]>>,
    inv: Vec<u64>,
}

impl<'a> Searcher<'a> {
    fn new(x: &'a Biquandle, n: u64, delta: u64) -> Self {
        let size = x.size();
        let mut order: Vec<usize> = (0..size).map(|i| i * size + i).collect();
        order.extend((0..size * size).filter(|p| p / size != p % size));
        let mut position = vec![0; size * size];
        for (i, &p) in order.iter().enumerate() {
            position[p] = i;
        }
        let mut buckets = vec![Vec::new(); order.len()];
        for a in 0..size {
            for b in 0..size {
                for c in 0..size {
                    let pair = |i: usize, j: usize| i * size + j;
                    let six = [
                        pair(a, b),
                        pair(b, c),
                        pair(x.under(a, b), x.over(c, b)),
                        pair(a, c),
                        pair(x.over(b, a), x.over(c, a)),
                        pair(x.under(a, c), x.under(b, c)),
                    ];
                    let last = six.iter().map(|&p| position[p]).max().expect("six pairs");
                    buckets[last].push(six);
                }
            }
        }
        let mut options = Vec::new();
        for &a in &units(n) {
            for &b in &units(n) {
                if (b * b + delta * a % n * b + a * a) % n == 0 {
                    options.push((a, b));
                }
            }
        }
        let mut inv = vec![0; n as usize];
        for u in units(n) {
            inv[u as usize] = inverse(u, n);
        }
        Self {
            x,
            n,
            delta,
            order,
            options,
            buckets,
            inv,
        }
    }

    fn w(&self, a: u64, b: u64) -> u64 {
        (self.n - a * a % self.n * self.inv[b as usize] % self.n) % self.n
    }

    fn triple_holds(&self, t: &[usize; 6], a: &[u64], b: &[u64]) -> bool {
        let n = self.n;
        let d = self.delta;
        let m3 = |x: u64, y: u64, z: u64| x * y % n * z % n;
        let [p1, p2, p3, q1, q2, q3] = *t;
        let (ap1, ap2, ap3, aq1, aq2, aq3) = (a[p1], a[p2], a[p3], a[q1], a[q2], a[q3]);
        let (bp1, bp2, bp3, bq1, bq2, bq3) = (b[p1], b[p2], b[p3], b[q1], b[q2], b[q3]);
        m3(ap1, ap2, ap3) == m3(aq1, aq2, aq3)
            && m3(ap1, bp2, bp3) == m3(bq1, bq2, aq3)
            && m3(bp1, ap2, bp3) == m3(bq1, aq2, bq3)
            && m3(ap1, ap2, bp3)
                == (m3(aq1, bq2, aq3) + m3(aq1, aq2, bq3) + d * m3(aq1, bq2, bq3) % n + m3(bq1, bq2, bq3)) % n
            && (m3(bp1, ap2, ap3) + m3(ap1, bp2, ap3) + d * m3(bp1, bp2, ap3) % n + m3(bp1, bp2, bp3)) % n
                == m3(bq1, aq2, aq3)
    }

    fn run(&self) -> Vec<(Vec<u64>, Vec<u64>)> {
        let cells = self.order.len();
        let mut a = vec![0; cells];
        let mut b = vec![0; cells];
        let mut out = Vec::new();
        self.step(0, None, &mut a, &mut b, &mut out);
        out
    }

    fn step(&self, pos: usize, w: Option<u64>, a: &mut Vec<u64>, b: &mut Vec<u64>, out: &mut Vec<(Vec<u64>, Vec<u64>)>) {
        if pos == self.order.len() {
            out.push((a.clone(), b.clone()));
            return;
        }
        let size = self.x.size();
        let p = self.order[pos];
        let diagonal = p / size == p % size;
        for &(av, bv) in &self.options {
            let mut w_here = w;
            if diagonal {
                let wv = self.w(av, bv);
                match w {
                    Some(old) if old != wv => continue,
                    _ => w_here = Some(wv),
                }
            }
            a[p] = av;
            b[p] = bv;
            if self.buckets[pos].iter().all(|t| self.triple_holds(t, a, b)) {
                self.step(pos + 1, w_here, a, b, out);
            }
        }
    }
}

/// Every bracket over `Z/nZ` on the requested biquandle, classified, in
/// emission order.
pub fn search_brackets(spec: &SearchSpec) -> Result<Vec<(Bracket, Adequacy)>, SearchError> {
    let n = spec.modulus;
    if n < 2 {
        return Err(SearchError::BadModulus(n));
    }
    let x = &spec.biquandle;
    let deltas: Vec<u64> = match spec.delta {
        Some(d) => vec![d % n],
        None => (0..n).collect(),
    };
    let mut found: Vec<(Bracket, Adequacy)> = parallel::install(|| {
        deltas
            .par_iter()
            .flat_map_iter(|&d| {
                Searcher::new(x, n, d)
                    .run()
                    .into_iter()
                    .filter_map(|(a, b)| to_bracket(x, n, &a, &b))
            })
            .map(|br| {
                let class = classify_adequacy(&br);
                (br, class)
            })
            .filter(|(_, c)| spec.class.accepts(c))
            .collect()
    });
    found.sort_by_cached_key(|(b, _)| sort_key(b));
    if let Some(limit) = spec.limit {
        found.truncate(limit);
    }
    Ok(found)
}

/// Literal enumeration of all unit tables, kept as a test oracle.
pub fn brute_force_brackets(x: &Biquandle, n: u64, cap: u128) -> Result<Vec<Bracket>, SearchError> {
    if n < 2 {
        return Err(SearchError::BadModulus(n));
    }
    let us = units(n);
    let cells = x.size() * x.size();
    let needed = (us.len() as u128).checked_pow(2 * cells as u32).unwrap_or(u128::MAX);
    if needed > cap {
        return Err(SearchError::CapExceeded { needed, cap });
    }
    let mut digits = vec![0usize; 2 * cells];
    let mut out = Vec::new();
    loop {
        let vals: Vec<u64> = digits.iter().map(|&d| us[d]).collect();
        if let Some(b) = to_bracket(x, n, &vals[..cells], &vals[cells..]) {
            out.push(b);
        }
        let mut i = digits.len();
        loop {
            if i == 0 {
                out.sort_by_cached_key(sort_key);
                return Ok(out);
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < us.len() {
                break;
            }
            digits[i] = 0;
        }
    }
}

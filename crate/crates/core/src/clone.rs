//! Operation tables, polymorphisms and the diagonal-cautious decision.
//!
//! A clone `C` on `B` (with `|B| = n`) is diagonal-cautious when some map
//! `G: Bⁿ → ℘(B)` bounds the image of every `f ∈ C` by
//! `G(f̂(0), .., f̂(n−1))` and is a proper subset of `B` on every tuple that
//! does not list all of `B`.
//!
//! For `Pol(B)` the pointwise least candidate is
//! `G_can(d) = ⋃ { image(f) : f n-ary polymorphism with diagonal d }`.
//! Restricting to arity `n` loses nothing: on any input a `k`-ary `f` sees at
//! most `n` distinct values, so every value `f` attains is attained by an
//! `n`-ary minor `g(x₁..xₙ) = f(x_σ(1)..x_σ(k))`, which is again a
//! polymorphism with the same diagonal. Hence `Pol(B)` is diagonal-cautious
//! iff `G_can` satisfies the second condition, and `G_can` is decided by
//! finitely many pinned polymorphism-existence queries.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::search::{Limits, Problem};
use crate::structure::{
    all_tuples, checked_pow, fmt_tuple, power_structure, rank, unrank, Element, Structure, Tuple,
};

/// A total operation `B^k → B`, values indexed by lexicographic input rank.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OperationTable {
    n: usize,
    arity: usize,
    values: Vec<Element>,
}

impl OperationTable {
    pub fn new(n: usize, arity: usize, values: Vec<Element>) -> Result<Self> {
        if arity == 0 {
            return Err(Error::Contract("operation arity must be positive".into()));
        }
        let len = checked_pow(n, arity).ok_or_else(|| Error::SizeCap {
            what: format!("{n}^{arity}"),
            size: usize::MAX,
            cap: usize::MAX,
        })?;
        if values.len() != len {
            return Err(Error::Contract(format!(
                "operation table of arity {arity} over {n} elements needs {len} values, got {}",
                values.len()
            )));
        }
        if let Some(&e) = values.iter().find(|&&e| e >= n) {
            return Err(Error::ElementOutOfRange {
                element: e,
                size: n,
            });
        }
        Ok(OperationTable { n, arity, values })
    }

    pub fn from_fn(n: usize, arity: usize, f: impl Fn(&[Element]) -> Element) -> Self {
        let values = all_tuples(n, arity).map(|t| f(&t)).collect();
        OperationTable::new(n, arity, values).expect("closure returned an out-of-range value")
    }

    pub fn projection(n: usize, arity: usize, coordinate: usize) -> Self {
        OperationTable::from_fn(n, arity, |t| t[coordinate])
    }

    pub fn identity(n: usize) -> Self {
        OperationTable::projection(n, 1, 0)
    }

    pub fn universe_size(&self) -> usize {
        self.n
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn values(&self) -> &[Element] {
        &self.values
    }

    pub fn apply(&self, args: &[Element]) -> Element {
        debug_assert_eq!(args.len(), self.arity);
        self.values[rank(args, self.n)]
    }

    /// `f̂(b) = f(b, .., b)`.
    pub fn diagonal(&self) -> OperationTable {
        OperationTable::from_fn(self.n, 1, |b| self.apply(&vec![b[0]; self.arity]))
    }

    /// Diagonal values `(f̂(0), .., f̂(n−1))`.
    pub fn diagonal_tuple(&self) -> Tuple {
        self.diagonal().values
    }

    pub fn image(&self) -> BTreeSet<Element> {
        self.values.iter().copied().collect()
    }

    /// The 0-based coordinate `i` with `f(b₁..b_k) = f̂(bᵢ)` everywhere, if any.
    pub fn essentially_unary_coordinate(&self) -> Option<usize> {
        let diag = self.diagonal();
        (0..self.arity).find(|&i| {
            all_tuples(self.n, self.arity)
                .zip(&self.values)
                .all(|(t, &v)| diag.values[t[i]] == v)
        })
    }

    pub fn is_essentially_unary(&self) -> bool {
        self.essentially_unary_coordinate().is_some()
    }

    /// `self ∘ other` for unary tables: `b ↦ self(other(b))`.
    pub fn compose_unary(&self, other: &OperationTable) -> OperationTable {
        assert!(self.arity == 1 && other.arity == 1 && self.n == other.n);
        OperationTable::from_fn(self.n, 1, |b| self.values[other.values[b[0]]])
    }

    /// Inverse of a bijective unary table.
    pub fn inverse(&self) -> Option<OperationTable> {
        if self.arity != 1 || self.image().len() != self.n {
            return None;
        }
        let mut inv = vec![0; self.n];
        for (b, &v) in self.values.iter().enumerate() {
            inv[v] = b;
        }
        Some(OperationTable {
            n: self.n,
            arity: 1,
            values: inv,
        })
    }
}

impl fmt::Display for OperationTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "op {}", self.arity)?;
        let vals: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        writeln!(f, "{}", vals.join(" "))?;
        writeln!(f, "end")
    }
}

/// A relation tuple combination that an operation maps outside the relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub symbol: String,
    pub inputs: Vec<Tuple>,
    pub result: Tuple,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inputs: Vec<String> = self.inputs.iter().map(|t| fmt_tuple(t)).collect();
        write!(
            f,
            "{}: {} -> {} not in {}",
            self.symbol,
            inputs.join(" "),
            fmt_tuple(&self.result),
            self.symbol
        )
    }
}

/// Checks every choice of `k` tuples from every relation.
/// Returns the first violation in relation order, then lexicographic choice order.
pub fn find_violation(s: &Structure, f: &OperationTable) -> Option<Violation> {
    assert_eq!(s.size(), f.n, "operation and structure universes differ");
    let k = f.arity;
    for (sym, rel) in s.iter() {
        let tuples = rel.tuples();
        if tuples.is_empty() {
            continue;
        }
        let mut choice = vec![0usize; k];
        let mut args = vec![0; k];
        loop {
            let result: Tuple = (0..sym.arity)
                .map(|j| {
                    for (slot, &ti) in args.iter_mut().zip(&choice) {
                        *slot = tuples[ti][j];
                    }
                    f.apply(&args)
                })
                .collect();
            if !rel.contains(&result) {
                return Some(Violation {
                    symbol: sym.name.clone(),
                    inputs: choice.iter().map(|&ti| tuples[ti].clone()).collect(),
                    result,
                });
            }
            let mut pos = k;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                choice[pos] += 1;
                if choice[pos] < tuples.len() {
                    break;
                }
                choice[pos] = 0;
            }
            if choice.iter().all(|&c| c == 0) {
                break;
            }
        }
    }
    None
}

pub fn is_polymorphism(s: &Structure, f: &OperationTable) -> bool {
    find_violation(s, f).is_none()
}

/// Finds a `k`-ary polymorphism extending `pins`, or `None` if there is none.
///
/// The search runs over the canonical query of `B^k`: one variable per input
/// tuple (by rank), one constraint per lifted relation tuple. Cells are
/// assigned in rank order and values ascending, so the result is the
/// lexicographically least extension.
pub fn exists_polymorphism(
    s: &Structure,
    k: usize,
    pins: &BTreeMap<Tuple, Element>,
    cap: usize,
) -> Result<Option<OperationTable>> {
    let n = s.size();
    let power = power_structure(s, k, cap)?;
    let mut problem = Problem::new(n, power.size())?;
    for (input, &value) in pins {
        if input.len() != k {
            return Err(Error::Contract(format!(
                "pin {} has length {}, expected {k}",
                fmt_tuple(input),
                input.len()
            )));
        }
        if let Some(&e) = input.iter().chain([&value]).find(|&&e| e >= n) {
            return Err(Error::ElementOutOfRange {
                element: e,
                size: n,
            });
        }
        problem.pin(rank(input, n), value);
    }
    for (base, lifted) in s.relations().iter().zip(power.relations()) {
        for t in lifted.tuples() {
            problem.add_constraint(base.tuples(), t.clone());
        }
    }
    let result = problem.solve(Limits {
        budget: None,
        max_solutions: 1,
        surjective: false,
    });
    Ok(result
        .solutions
        .into_iter()
        .next()
        .map(|values| OperationTable {
            n,
            arity: k,
            values,
        }))
}

/// The unary polymorphisms of a structure, sorted by table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnaryMonoid {
    members: Vec<OperationTable>,
}

impl UnaryMonoid {
    pub fn members(&self) -> &[OperationTable] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, u: &OperationTable) -> bool {
        self.members.binary_search(u).is_ok()
    }

    /// Some member maps `(0, .., n−1)` to `values`.
    pub fn realizes(&self, values: &[Element]) -> bool {
        self.members.iter().any(|u| u.values == values)
    }

    pub fn is_closed_under_composition(&self) -> bool {
        self.members.iter().all(|a| {
            self.members
                .iter()
                .all(|b| self.contains(&a.compose_unary(b)))
        })
    }

    pub fn contains_inverses(&self) -> bool {
        self.members
            .iter()
            .filter_map(OperationTable::inverse)
            .all(|inv| self.contains(&inv))
    }
}

/// All unary polymorphisms, found by enumerating every solution of the
/// canonical query of `B¹`, which is `B` itself.
pub fn unary_polymorphisms(s: &Structure) -> Result<UnaryMonoid> {
    let n = s.size();
    let mut problem = Problem::new(n, n)?;
    for rel in s.relations() {
        for t in rel.tuples() {
            problem.add_constraint(rel.tuples(), t.clone());
        }
    }
    let result = problem.solve(Limits {
        budget: None,
        max_solutions: usize::MAX,
        surjective: false,
    });
    let mut members: Vec<OperationTable> = result
        .solutions
        .into_iter()
        .map(|values| OperationTable {
            n,
            arity: 1,
            values,
        })
        .collect();
    members.sort();
    Ok(UnaryMonoid { members })
}

/// `G_can`, one subset of `B` per tuple of `Bⁿ` in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GMap {
    n: usize,
    fingerprint: String,
    entries: Vec<BTreeSet<Element>>,
}

impl GMap {
    pub fn from_entries(s: &Structure, entries: Vec<BTreeSet<Element>>) -> Result<Self> {
        let n = s.size();
        if Some(entries.len()) != checked_pow(n, n) {
            return Err(Error::Contract(format!(
                "G map over {n} elements needs {n}^{n} entries"
            )));
        }
        Ok(GMap {
            n,
            fingerprint: s.fingerprint(),
            entries,
        })
    }

    pub fn universe_size(&self) -> usize {
        self.n
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn get(&self, d: &[Element]) -> &BTreeSet<Element> {
        &self.entries[rank(d, self.n)]
    }

    pub fn iter(&self) -> impl Iterator<Item = (Tuple, &BTreeSet<Element>)> {
        let n = self.n;
        self.entries
            .iter()
            .enumerate()
            .map(move |(r, e)| (unrank(r, n, n), e))
    }
}

impl fmt::Display for GMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (d, set) in self.iter() {
            let vals: Vec<String> = set.iter().map(|v| v.to_string()).collect();
            writeln!(f, "{}: {{{}}}", fmt_tuple(&d), vals.join(","))?;
        }
        Ok(())
    }
}

fn diagonal_pins(d: &[Element]) -> BTreeMap<Tuple, Element> {
    let n = d.len();
    (0..n).map(|b| (vec![b; n], d[b])).collect()
}

/// Computes `G_can` by pinned polymorphism-existence queries.
///
/// For each diagonal `d`, a first query decides whether any `n`-ary
/// polymorphism has diagonal `d`; its image seeds the entry. Each value `c`
/// still missing is then tested by pinning one further column to `c`, and
/// the image of every witness found is added as well.
pub fn canonical_g(s: &Structure, cap: usize) -> Result<GMap> {
    let n = s.size();
    let cells = checked_pow(n, n).unwrap_or(usize::MAX);
    if cells > cap {
        return Err(Error::SizeCap {
            what: format!("{n}^{n}"),
            size: cells,
            cap,
        });
    }
    let mut entries = Vec::with_capacity(cells);
    for d in all_tuples(n, n) {
        let base = diagonal_pins(&d);
        let mut set = BTreeSet::new();
        if let Some(f) = exists_polymorphism(s, n, &base, cap)? {
            set.extend(f.image());
            for c in 0..n {
                if set.contains(&c) {
                    continue;
                }
                for column in all_tuples(n, n) {
                    if base.contains_key(&column) {
                        continue;
                    }
                    let mut pins = base.clone();
                    pins.insert(column, c);
                    if let Some(g) = exists_polymorphism(s, n, &pins, cap)? {
                        set.extend(g.image());
                        break;
                    }
                }
            }
        }
        entries.push(set);
    }
    GMap::from_entries(s, entries)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CautionVerdict {
    pub is_diagonal_cautious: bool,
    /// Least `d` listing a proper subset of `B` with `G_can(d) = B`.
    pub witness: Option<Tuple>,
    pub gmap: GMap,
}

/// Decides diagonal-cautiousness from a computed `G_can`.
pub fn caution_from_gmap(gmap: GMap) -> CautionVerdict {
    let n = gmap.universe_size();
    let witness = gmap
        .iter()
        .find(|(d, set)| d.iter().collect::<BTreeSet<_>>().len() != n && set.len() == n)
        .map(|(d, _)| d);
    CautionVerdict {
        is_diagonal_cautious: witness.is_none(),
        witness,
        gmap,
    }
}

pub fn is_diagonal_cautious(s: &Structure, cap: usize) -> Result<CautionVerdict> {
    Ok(caution_from_gmap(canonical_g(s, cap)?))
}

//! Finite relational structures over the universe `0..n`.
//!
//! A [`Structure`] is always well formed: every tuple has its symbol's arity,
//! every entry lies in the universe, and each relation is stored as a sorted,
//! duplicate-free tuple list. Unchecked input lives in a [`StructureDef`],
//! which [`validate_structure`] inspects and [`Structure::from_def`] converts.

use std::collections::HashSet;
use std::fmt;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub type Element = usize;
pub type Tuple = Vec<Element>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

impl Symbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Symbol {
            name: name.into(),
            arity,
        }
    }
}

/// Ordered list of relation symbols.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Signature {
    symbols: Vec<Symbol>,
}

impl Signature {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        let mut seen = HashSet::new();
        for sym in &symbols {
            if sym.arity == 0 {
                return Err(Error::InvalidStructure(format!(
                    "symbol `{}` has arity 0",
                    sym.name
                )));
            }
            if !seen.insert(sym.name.as_str()) {
                return Err(Error::NameCollision(sym.name.clone()));
            }
        }
        Ok(Signature { symbols })
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn arity_of(&self, name: &str) -> Option<usize> {
        self.index_of(name).map(|i| self.symbols[i].arity)
    }
}

/// A relation as a sorted, duplicate-free list of tuples.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    arity: usize,
    tuples: Vec<Tuple>,
}

impl Relation {
    /// Sorts and deduplicates. Callers must have checked arity and range.
    fn from_checked(arity: usize, mut tuples: Vec<Tuple>) -> Self {
        tuples.sort();
        tuples.dedup();
        Relation { arity, tuples }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn tuples(&self) -> &[Tuple] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, tuple: &[Element]) -> bool {
        self.tuples
            .binary_search_by(|t| t.as_slice().cmp(tuple))
            .is_ok()
    }
}

/// Unchecked structure description, as read from a file or built by hand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureDef {
    pub size: usize,
    pub relations: Vec<(String, usize, Vec<Tuple>)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    EmptyUniverse,
    ZeroArity {
        symbol: String,
    },
    DuplicateSymbol {
        symbol: String,
    },
    ArityMismatch {
        symbol: String,
        tuple: Tuple,
        expected: usize,
    },
    OutOfRange {
        symbol: String,
        tuple: Tuple,
        element: Element,
    },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::EmptyUniverse => write!(f, "universe size must be positive"),
            Diagnostic::ZeroArity { symbol } => write!(f, "symbol {symbol} has arity 0"),
            Diagnostic::DuplicateSymbol { symbol } => write!(f, "duplicate symbol {symbol}"),
            Diagnostic::ArityMismatch {
                symbol,
                tuple,
                expected,
            } => write!(
                f,
                "arity mismatch in {symbol}: tuple {} has length {}, expected {expected}",
                fmt_tuple(tuple),
                tuple.len()
            ),
            Diagnostic::OutOfRange {
                symbol,
                tuple,
                element,
            } => write!(
                f,
                "out-of-range entry in {symbol}: {element} in tuple {}",
                fmt_tuple(tuple)
            ),
        }
    }
}

/// Every invariant violation of `def`; empty means valid.
pub fn validate_structure(def: &StructureDef) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if def.size == 0 {
        out.push(Diagnostic::EmptyUniverse);
    }
    let mut seen = HashSet::new();
    for (name, arity, tuples) in &def.relations {
        if !seen.insert(name.as_str()) {
            out.push(Diagnostic::DuplicateSymbol {
                symbol: name.clone(),
            });
        }
        if *arity == 0 {
            out.push(Diagnostic::ZeroArity {
                symbol: name.clone(),
            });
        }
        for t in tuples {
            if t.len() != *arity {
                out.push(Diagnostic::ArityMismatch {
                    symbol: name.clone(),
                    tuple: t.clone(),
                    expected: *arity,
                });
            }
            if let Some(&e) = t.iter().find(|&&e| e >= def.size) {
                out.push(Diagnostic::OutOfRange {
                    symbol: name.clone(),
                    tuple: t.clone(),
                    element: e,
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Structure {
    signature: Signature,
    size: usize,
    relations: Vec<Relation>,
}

impl Structure {
    pub fn from_def(def: StructureDef) -> Result<Self> {
        if let Some(d) = validate_structure(&def).into_iter().next() {
            return Err(Error::InvalidStructure(d.to_string()));
        }
        let mut symbols = Vec::with_capacity(def.relations.len());
        let mut relations = Vec::with_capacity(def.relations.len());
        for (name, arity, tuples) in def.relations {
            symbols.push(Symbol::new(name, arity));
            relations.push(Relation::from_checked(arity, tuples));
        }
        Ok(Structure {
            signature: Signature::new(symbols)?,
            size: def.size,
            relations,
        })
    }

    /// Convenience constructor for literal structures.
    pub fn new(size: usize, relations: Vec<(&str, usize, Vec<Tuple>)>) -> Result<Self> {
        Structure::from_def(StructureDef {
            size,
            relations: relations
                .into_iter()
                .map(|(n, a, t)| (n.to_string(), a, t))
                .collect(),
        })
    }

    pub fn to_def(&self) -> StructureDef {
        StructureDef {
            size: self.size,
            relations: self
                .signature
                .symbols()
                .iter()
                .zip(&self.relations)
                .map(|(s, r)| (s.name.clone(), s.arity, r.tuples.clone()))
                .collect(),
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    /// Universe size `n`; elements are `0..n`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.signature.index_of(name).map(|i| &self.relations[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &Relation)> {
        self.signature.symbols().iter().zip(&self.relations)
    }

    /// Applies a permutation of the universe to every relation tuple.
    pub fn relabel(&self, perm: &[Element]) -> Result<Self> {
        if perm.len() != self.size {
            return Err(Error::Contract(format!(
                "permutation has length {}, universe has size {}",
                perm.len(),
                self.size
            )));
        }
        let mut def = self.to_def();
        for (_, _, tuples) in &mut def.relations {
            for t in tuples.iter_mut() {
                for e in t.iter_mut() {
                    *e = perm[*e];
                }
            }
        }
        Structure::from_def(def)
    }

    /// Short hex digest of the canonical text serialization.
    pub fn fingerprint(&self) -> String {
        short_digest(&self.to_string())
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "domain {}", self.size)?;
        for (sym, rel) in self.iter() {
            writeln!(f, "relation {} {}", sym.name, sym.arity)?;
            for t in rel.tuples() {
                let line: Vec<String> = t.iter().map(|e| e.to_string()).collect();
                writeln!(f, "{}", line.join(" "))?;
            }
            writeln!(f, "end")?;
        }
        Ok(())
    }
}

pub(crate) fn short_digest(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .take(8)
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn fmt_tuple(t: &[Element]) -> String {
    let parts: Vec<String> = t.iter().map(|e| e.to_string()).collect();
    format!("({})", parts.join(","))
}

/// Name of the constant symbol for element `b` in the expansion by constants.
pub fn constant_symbol(b: Element) -> String {
    format!("C_{b}")
}

/// Parses `C_<b>` back into `b`.
pub fn parse_constant_symbol(name: &str) -> Option<Element> {
    let digits = name.strip_prefix("C_")?;
    if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// `B⁺`: adds a singleton unary relation `C_b = {(b)}` for every element.
pub fn expand_with_constants(s: &Structure) -> Result<Structure> {
    let mut def = s.to_def();
    for b in 0..s.size {
        let name = constant_symbol(b);
        if s.signature.index_of(&name).is_some() {
            return Err(Error::NameCollision(name));
        }
        def.relations.push((name, 1, vec![vec![b]]));
    }
    Structure::from_def(def)
}

pub(crate) fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Lexicographic rank of a tuple over `0..n`, first coordinate most significant.
pub fn rank(tuple: &[Element], n: usize) -> usize {
    tuple.iter().fold(0, |acc, &e| acc * n + e)
}

/// Inverse of [`rank`] for tuples of length `k`.
pub fn unrank(mut r: usize, n: usize, k: usize) -> Tuple {
    let mut t = vec![0; k];
    for slot in t.iter_mut().rev() {
        *slot = r % n;
        r /= n;
    }
    t
}

/// All tuples of `0..n` of length `k` in lexicographic order.
pub fn all_tuples(n: usize, k: usize) -> impl Iterator<Item = Tuple> {
    let total = checked_pow(n, k).expect("tuple space overflows usize");
    (0..total).map(move |r| unrank(r, n, k))
}

/// Lifted tuples of one relation in the `k`-th power, as rank-encoded
/// elements of `B^k`. Entry `j` of a lifted tuple built from source tuples
/// `t¹..tᵏ` is the rank of `(t¹_j, .., tᵏ_j)`.
pub(crate) fn lifted_tuples(rel: &Relation, n: usize, k: usize) -> Vec<Tuple> {
    let source = rel.tuples();
    let r = rel.arity();
    let count = checked_pow(source.len(), k).expect("lifted relation overflows usize");
    let mut out = Vec::with_capacity(count);
    let mut choice = vec![0usize; k];
    if source.is_empty() {
        return out;
    }
    loop {
        let lifted: Tuple = (0..r)
            .map(|j| choice.iter().fold(0, |acc, &ti| acc * n + source[ti][j]))
            .collect();
        out.push(lifted);
        // odometer over choices, last coordinate fastest
        let mut pos = k;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] < source.len() {
                break;
            }
            choice[pos] = 0;
        }
    }
}

/// The `k`-th power `B^k`. Elements are `k`-tuples indexed by lexicographic
/// rank; a lifted tuple belongs to `R` iff every coordinate slice is in `R^B`.
pub fn power_structure(s: &Structure, k: usize, cap: usize) -> Result<Structure> {
    if k == 0 {
        return Err(Error::Contract("power exponent must be positive".into()));
    }
    let size = match checked_pow(s.size, k) {
        Some(v) if v <= cap => v,
        other => {
            return Err(Error::SizeCap {
                what: format!("{}^{}", s.size, k),
                size: other.unwrap_or(usize::MAX),
                cap,
            })
        }
    };
    let relations = s
        .iter()
        .map(|(sym, rel)| Relation::from_checked(sym.arity, lifted_tuples(rel, s.size, k)))
        .collect();
    Ok(Structure {
        signature: s.signature.clone(),
        size,
        relations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn def(size: usize, rels: Vec<(&str, usize, Vec<Tuple>)>) -> StructureDef {
        StructureDef {
            size,
            relations: rels
                .into_iter()
                .map(|(n, a, t)| (n.to_string(), a, t))
                .collect(),
        }
    }

    #[test]
    fn validate_examples() {
        assert!(validate_structure(&def(2, vec![("R", 2, vec![vec![0, 1]])])).is_empty());
        let d = validate_structure(&def(2, vec![("R", 2, vec![vec![0, 2]])]));
        assert!(matches!(
            d.as_slice(),
            [Diagnostic::OutOfRange { element: 2, .. }]
        ));
        let d = validate_structure(&def(2, vec![("R", 2, vec![vec![0, 1, 1]])]));
        assert!(matches!(
            d.as_slice(),
            [Diagnostic::ArityMismatch { expected: 2, .. }]
        ));
    }

    #[test]
    fn validate_reports_every_violation() {
        let d = validate_structure(&def(0, vec![("R", 1, vec![vec![0]]), ("R", 0, vec![])]));
        assert!(d.contains(&Diagnostic::EmptyUniverse));
        assert!(d.contains(&Diagnostic::DuplicateSymbol { symbol: "R".into() }));
        assert!(d.contains(&Diagnostic::ZeroArity { symbol: "R".into() }));
        assert_eq!(d.len(), 4);
    }

    #[test]
    fn relations_are_canonical() {
        let s =
            Structure::new(2, vec![("R", 2, vec![vec![1, 0], vec![0, 1], vec![1, 0]])]).unwrap();
        assert_eq!(s.relations()[0].tuples(), &[vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn expansion_examples() {
        let s = Structure::new(2, vec![("R", 2, vec![vec![0, 1]])]).unwrap();
        let p = expand_with_constants(&s).unwrap();
        let names: Vec<_> = p
            .signature()
            .symbols()
            .iter()
            .map(|s| s.name.as_str())
            .collect();
        assert_eq!(names, ["R", "C_0", "C_1"]);
        assert_eq!(p.relation("C_0").unwrap().tuples(), &[vec![0]]);
        assert_eq!(p.relation("C_1").unwrap().tuples(), &[vec![1]]);
        assert_eq!(p.relation("R"), s.relation("R"));

        let one = Structure::new(1, vec![]).unwrap();
        let p = expand_with_constants(&one).unwrap();
        assert_eq!(p.signature().len(), 1);
        assert_eq!(p.relation("C_0").unwrap().tuples(), &[vec![0]]);

        let e = Structure::new(3, vec![("E", 2, vec![vec![0, 1]])]).unwrap();
        let p = expand_with_constants(&e).unwrap();
        for b in 0..3 {
            assert_eq!(
                p.relation(&constant_symbol(b)).unwrap().tuples(),
                &[vec![b]]
            );
        }
    }

    #[test]
    fn expansion_collision_names_symbol() {
        let s = Structure::new(2, vec![("C_1", 1, vec![vec![0]])]).unwrap();
        assert_eq!(
            expand_with_constants(&s),
            Err(Error::NameCollision("C_1".into()))
        );
    }

    #[test]
    fn constant_symbol_round_trip() {
        assert_eq!(parse_constant_symbol(&constant_symbol(12)), Some(12));
        assert_eq!(parse_constant_symbol("C_"), None);
        assert_eq!(parse_constant_symbol("C_x"), None);
        assert_eq!(parse_constant_symbol("R"), None);
    }

    #[test]
    fn power_of_single_pair() {
        let s = Structure::new(2, vec![("R", 2, vec![vec![0, 1]])]).unwrap();
        let p = power_structure(&s, 2, 1 << 20).unwrap();
        assert_eq!(p.size(), 4);
        // (0,0) has rank 0 and (1,1) has rank 3
        assert_eq!(p.relations()[0].tuples(), &[vec![0, 3]]);
    }

    #[test]
    fn power_by_enumeration() {
        // oracle: test every pair of pairs against the coordinatewise definition
        let s =
            Structure::new(2, vec![("R", 2, vec![vec![0, 1], vec![1, 0], vec![1, 1]])]).unwrap();
        let p = power_structure(&s, 2, 16).unwrap();
        let rel = s.relation("R").unwrap();
        let mut expected = Vec::new();
        for a in all_tuples(2, 2) {
            for b in all_tuples(2, 2) {
                if (0..2).all(|i| rel.contains(&[a[i], b[i]])) {
                    expected.push(vec![rank(&a, 2), rank(&b, 2)]);
                }
            }
        }
        expected.sort();
        assert_eq!(p.relations()[0].tuples(), expected.as_slice());
        assert_eq!(p.relations()[0].len(), 9);
    }

    #[test]
    fn power_of_empty_relation() {
        let s = Structure::new(2, vec![("R", 2, vec![])]).unwrap();
        let p = power_structure(&s, 3, 1 << 20).unwrap();
        assert_eq!(p.size(), 8);
        assert!(p.relations()[0].is_empty());
    }

    #[test]
    fn power_cap_reports_size() {
        let s = Structure::new(3, vec![]).unwrap();
        match power_structure(&s, 3, 10) {
            Err(Error::SizeCap { size, cap, .. }) => {
                assert_eq!(size, 27);
                assert_eq!(cap, 10);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rank_unrank() {
        for r in 0..27 {
            assert_eq!(rank(&unrank(r, 3, 3), 3), r);
        }
        assert_eq!(unrank(5, 2, 3), vec![1, 0, 1]);
    }

    #[test]
    fn relabel_applies_permutation() {
        let s = Structure::new(2, vec![("R", 2, vec![vec![0, 1]])]).unwrap();
        let t = s.relabel(&[1, 0]).unwrap();
        assert_eq!(t.relations()[0].tuples(), &[vec![1, 0]]);
    }
}

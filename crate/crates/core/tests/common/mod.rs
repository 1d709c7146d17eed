//! Brute-force oracles shared by the integration tests. Nothing here goes
//! through the search engine: every map from the variables is enumerated.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use scsp_core::structure::all_tuples;
use scsp_core::{Atom, Element, OperationTable, Structure, VarEquality, Variable};

/// Is there a (surjective, if asked) map satisfying every atom and equality?
pub fn brute_force(
    s: &Structure,
    vars: &BTreeSet<Variable>,
    atoms: &[Atom],
    eqs: &[VarEquality],
    surjective: bool,
) -> bool {
    count_solutions(s, vars, atoms, eqs, surjective, 1) > 0
}

pub fn count_solutions(
    s: &Structure,
    vars: &BTreeSet<Variable>,
    atoms: &[Atom],
    eqs: &[VarEquality],
    surjective: bool,
    stop_at: usize,
) -> usize {
    let n = s.size();
    let names: Vec<&Variable> = vars.iter().collect();
    let mut found = 0;
    for values in all_tuples(n, names.len()) {
        let h: BTreeMap<&Variable, Element> =
            names.iter().copied().zip(values.iter().copied()).collect();
        if surjective && values.iter().collect::<BTreeSet<_>>().len() != n {
            continue;
        }
        if eqs.iter().any(|e| h[&e.left] != h[&e.right]) {
            continue;
        }
        let ok = atoms.iter().all(|a| {
            let rel = s.relation(&a.symbol).expect("symbol in structure");
            let t: Vec<Element> = a.args.iter().map(|v| h[v]).collect();
            rel.contains(&t)
        });
        if ok {
            found += 1;
            if found >= stop_at {
                return found;
            }
        }
    }
    found
}

/// Every `k`-ary table over `0..n`.
pub fn all_tables(n: usize, k: usize) -> impl Iterator<Item = OperationTable> {
    let cells = n.pow(k as u32);
    all_tuples(n, cells).map(move |values| OperationTable::new(n, k, values).unwrap())
}

/// Direct polymorphism check, written independently of the library.
pub fn preserves(s: &Structure, f: &OperationTable) -> bool {
    let k = f.arity();
    s.iter().all(|(sym, rel)| {
        let tuples = rel.tuples();
        all_tuples(tuples.len().max(1), k)
            .filter(|_| !tuples.is_empty())
            .all(|choice| {
                let out: Vec<Element> = (0..sym.arity)
                    .map(|j| {
                        let args: Vec<Element> = choice.iter().map(|&c| tuples[c][j]).collect();
                        f.apply(&args)
                    })
                    .collect();
                rel.contains(&out)
            })
    })
}

/// `G` built from every polymorphism of arity `k`, by exhaustive enumeration.
pub fn exhaustive_g(s: &Structure, k: usize) -> BTreeMap<Vec<Element>, BTreeSet<Element>> {
    let n = s.size();
    let mut g: BTreeMap<Vec<Element>, BTreeSet<Element>> =
        all_tuples(n, n).map(|d| (d, BTreeSet::new())).collect();
    for f in all_tables(n, k) {
        if preserves(s, &f) {
            g.get_mut(&f.diagonal_tuple()).unwrap().extend(f.image());
        }
    }
    g
}

//! Variables, atoms, quantifier-free pp-formulas and CSP/SCSP instances.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::structure::{Element, Signature, Structure};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable(String);

impl Variable {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return Err(Error::Contract(format!("invalid variable name `{name}`")));
        }
        Ok(Variable(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Variable {
    /// Panics on names that [`Variable::new`] rejects; meant for literals.
    fn from(s: &str) -> Self {
        Variable::new(s).expect("invalid variable literal")
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub symbol: String,
    pub args: Vec<Variable>,
}

impl Atom {
    pub fn new(symbol: impl Into<String>, args: Vec<Variable>) -> Self {
        Atom {
            symbol: symbol.into(),
            args,
        }
    }

    /// Shorthand: `Atom::of("R", &["u", "w"])`.
    pub fn of(symbol: &str, args: &[&str]) -> Self {
        Atom::new(symbol, args.iter().map(|&a| Variable::from(a)).collect())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<&str> = self.args.iter().map(Variable::name).collect();
        write!(f, "{}({})", self.symbol, args.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarEquality {
    pub left: Variable,
    pub right: Variable,
}

impl VarEquality {
    pub fn new(left: impl Into<Variable>, right: impl Into<Variable>) -> Self {
        VarEquality {
            left: left.into(),
            right: right.into(),
        }
    }
}

/// Conjunction of atoms and variable equalities over an explicit variable
/// set. Variables that occur in no conjunct are still part of the formula.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QfppFormula {
    pub vars: BTreeSet<Variable>,
    pub atoms: Vec<Atom>,
    pub equalities: Vec<VarEquality>,
}

/// A CSP instance; over `σ⁺` it may use constant symbols `C_b`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CspInstance {
    pub vars: BTreeSet<Variable>,
    pub atoms: Vec<Atom>,
}

/// An SCSP instance `(U, φ)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScspInstance {
    pub vars: BTreeSet<Variable>,
    pub atoms: Vec<Atom>,
}

fn occurring<'a>(atoms: &'a [Atom], eqs: &'a [VarEquality]) -> impl Iterator<Item = &'a Variable> {
    atoms
        .iter()
        .flat_map(|a| a.args.iter())
        .chain(eqs.iter().flat_map(|e| [&e.left, &e.right]))
}

fn check_vars(vars: &BTreeSet<Variable>, atoms: &[Atom], eqs: &[VarEquality]) -> Result<()> {
    match occurring(atoms, eqs).find(|v| !vars.contains(*v)) {
        Some(v) => Err(Error::UndeclaredVariable(v.name().to_string())),
        None => Ok(()),
    }
}

pub(crate) fn check_atoms(signature: &Signature, atoms: &[Atom]) -> Result<()> {
    for atom in atoms {
        let arity = signature
            .arity_of(&atom.symbol)
            .ok_or_else(|| Error::UnknownSymbol(atom.symbol.clone()))?;
        if arity != atom.args.len() {
            return Err(Error::ArityMismatch {
                symbol: atom.symbol.clone(),
                expected: arity,
                got: atom.args.len(),
            });
        }
    }
    Ok(())
}

impl QfppFormula {
    /// Builds a formula whose variable set is exactly the occurring variables
    /// plus `extra`.
    pub fn new(atoms: Vec<Atom>, equalities: Vec<VarEquality>) -> Self {
        let vars = occurring(&atoms, &equalities).cloned().collect();
        QfppFormula {
            vars,
            atoms,
            equalities,
        }
    }

    pub fn with_vars(mut self, extra: impl IntoIterator<Item = Variable>) -> Self {
        self.vars.extend(extra);
        self
    }

    pub fn check(&self) -> Result<()> {
        check_vars(&self.vars, &self.atoms, &self.equalities)
    }
}

impl CspInstance {
    pub fn new(vars: BTreeSet<Variable>, atoms: Vec<Atom>) -> Result<Self> {
        check_vars(&vars, &atoms, &[])?;
        Ok(CspInstance { vars, atoms })
    }
}

impl ScspInstance {
    pub fn new(vars: BTreeSet<Variable>, atoms: Vec<Atom>) -> Result<Self> {
        check_vars(&vars, &atoms, &[])?;
        Ok(ScspInstance { vars, atoms })
    }
}

impl From<CspInstance> for QfppFormula {
    fn from(i: CspInstance) -> Self {
        QfppFormula {
            vars: i.vars,
            atoms: i.atoms,
            equalities: Vec::new(),
        }
    }
}

impl From<ScspInstance> for QfppFormula {
    fn from(i: ScspInstance) -> Self {
        QfppFormula {
            vars: i.vars,
            atoms: i.atoms,
            equalities: Vec::new(),
        }
    }
}

/// Total map from a variable set into the universe.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Assignment(BTreeMap<Variable, Element>);

impl Assignment {
    pub fn new() -> Self {
        Assignment(BTreeMap::new())
    }

    pub fn insert(&mut self, var: Variable, value: Element) {
        self.0.insert(var, value);
    }

    pub fn get(&self, var: &Variable) -> Option<Element> {
        self.0.get(var).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Variable, Element)> {
        self.0.iter().map(|(v, &e)| (v, e))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Distinct values attained.
    pub fn image(&self) -> BTreeSet<Element> {
        self.0.values().copied().collect()
    }

    pub fn is_surjective_onto(&self, n: usize) -> bool {
        self.image().len() == n
    }
}

impl FromIterator<(Variable, Element)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (Variable, Element)>>(iter: I) -> Self {
        Assignment(iter.into_iter().collect())
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(v, e)| format!("{v}={e}")).collect();
        f.write_str(&parts.join(" "))
    }
}

/// `B, a ⊨ φ`.
pub fn evaluate(s: &Structure, phi: &QfppFormula, a: &Assignment) -> Result<bool> {
    check_atoms(s.signature(), &phi.atoms)?;
    let value = |v: &Variable| {
        if !phi.vars.contains(v) {
            return Err(Error::UndeclaredVariable(v.name().to_string()));
        }
        a.get(v)
            .ok_or_else(|| Error::MissingVariable(v.name().to_string()))
    };
    for v in &phi.vars {
        value(v)?;
    }
    for eq in &phi.equalities {
        if value(&eq.left)? != value(&eq.right)? {
            return Ok(false);
        }
    }
    for atom in &phi.atoms {
        let rel = s.relation(&atom.symbol).expect("checked above");
        let tuple = atom.args.iter().map(value).collect::<Result<Vec<_>>>()?;
        if !rel.contains(&tuple) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Removes all variable equalities while preserving the existence of a
/// surjective satisfying assignment. Each class of equated variables
/// collapses onto its lexicographically least name.
pub fn eliminate_equalities(
    w: &BTreeSet<Variable>,
    phi: &QfppFormula,
) -> Result<(BTreeSet<Variable>, Vec<Atom>)> {
    check_vars(w, &phi.atoms, &phi.equalities)?;
    let names: Vec<&Variable> = w.iter().collect();
    let index = |v: &Variable| names.binary_search(&v).expect("checked above");
    let mut parent: Vec<usize> = (0..names.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for eq in &phi.equalities {
        let a = find(&mut parent, index(&eq.left));
        let b = find(&mut parent, index(&eq.right));
        // names are sorted, so the smaller index is the least name
        if a < b {
            parent[b] = a;
        } else if b < a {
            parent[a] = b;
        }
    }
    let rep: Vec<usize> = (0..names.len()).map(|i| find(&mut parent, i)).collect();
    let kept: BTreeSet<Variable> = names
        .iter()
        .enumerate()
        .filter(|&(i, _)| rep[i] == i)
        .map(|(_, v)| (*v).clone())
        .collect();
    let atoms = phi
        .atoms
        .iter()
        .map(|a| Atom {
            symbol: a.symbol.clone(),
            args: a
                .args
                .iter()
                .map(|v| names[rep[index(v)]].clone())
                .collect(),
        })
        .collect();
    Ok((kept, atoms))
}

//! The quantifier-free gadget and the reduction from `CSP(B⁺)` to `SCSP(B)`.
//!
//! The gadget `ψ(v₁..vₙ, x, y₁..y_m)` has one variable per tuple of `Bⁿ`
//! (a "column") and is the canonical query of the power `Bⁿ`: its satisfying
//! maps into `B` are exactly the `n`-ary polymorphisms, read as tables. The
//! first `n` columns are the constant tuples, so the `v` block carries the
//! diagonal; column `n + 1` is the identity tuple, so under the `i`-th row
//! assignment (the `i`-th projection) `x` takes value `i`.

use std::collections::BTreeSet;
use std::fmt;

use crate::clone::{canonical_g, unary_polymorphisms, OperationTable};
use crate::error::{Error, Result};
use crate::formula::{
    eliminate_equalities, evaluate, Assignment, Atom, CspInstance, QfppFormula, ScspInstance,
    VarEquality, Variable,
};
use crate::oracles::enumerate_solutions;
use crate::structure::{
    all_tuples, checked_pow, fmt_tuple, parse_constant_symbol, power_structure, rank, Element,
    Structure, Tuple,
};

pub const RESERVED_PREFIX: &str = "__g_";

/// Order of the columns of `Bⁿ`: constant tuples, then the identity tuple,
/// then every remaining tuple lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnIndexing {
    n: usize,
    columns: Vec<Tuple>,
    // rank of a tuple -> its position
    position: Vec<usize>,
}

impl ColumnIndexing {
    pub fn new(n: usize) -> Self {
        let identity: Tuple = (0..n).collect();
        let mut columns: Vec<Tuple> = (0..n).map(|b| vec![b; n]).collect();
        columns.push(identity.clone());
        columns.extend(all_tuples(n, n).filter(|t| t != &identity && t.iter().any(|&e| e != t[0])));
        let mut position = vec![0; columns.len()];
        for (p, c) in columns.iter().enumerate() {
            position[rank(c, n)] = p;
        }
        ColumnIndexing {
            n,
            columns,
            position,
        }
    }

    pub fn columns(&self) -> &[Tuple] {
        &self.columns
    }

    pub fn position_of(&self, column: &[Element]) -> usize {
        self.position[rank(column, self.n)]
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gadget {
    pub fingerprint: String,
    pub n: usize,
    pub m: usize,
    pub v_vars: Vec<Variable>,
    pub x_var: Variable,
    pub y_vars: Vec<Variable>,
    pub columns: ColumnIndexing,
    pub formula: QfppFormula,
}

impl Gadget {
    /// Variables in column order: `v₁..vₙ, x, y₁..y_m`.
    pub fn variables(&self) -> impl Iterator<Item = &Variable> {
        self.v_vars
            .iter()
            .chain(std::iter::once(&self.x_var))
            .chain(&self.y_vars)
    }

    pub fn variable_at(&self, position: usize) -> &Variable {
        match position {
            p if p < self.n => &self.v_vars[p],
            p if p == self.n => &self.x_var,
            p => &self.y_vars[p - self.n - 1],
        }
    }

    /// Row `i`: each column variable takes its column's `i`-th coordinate.
    pub fn row_assignment(&self, row: usize) -> Assignment {
        self.columns
            .columns()
            .iter()
            .enumerate()
            .map(|(p, c)| (self.variable_at(p).clone(), c[row]))
            .collect()
    }

    /// Reads a satisfying assignment as an `n`-ary operation table.
    pub fn table_of(&self, h: &Assignment) -> Result<OperationTable> {
        let n = self.n;
        let mut values = vec![0; self.columns.len()];
        for (p, c) in self.columns.columns().iter().enumerate() {
            let var = self.variable_at(p);
            values[rank(c, n)] = h
                .get(var)
                .ok_or_else(|| Error::MissingVariable(var.name().to_string()))?;
        }
        OperationTable::new(n, n, values)
    }

    pub fn diagonal_of(&self, h: &Assignment) -> Tuple {
        self.v_vars
            .iter()
            .map(|v| h.get(v).expect("v var"))
            .collect()
    }
}

fn check_universe(s: &Structure, cap: usize) -> Result<usize> {
    let n = s.size();
    if n < 2 {
        return Err(Error::SingletonUniverse);
    }
    let cells = checked_pow(n, n).unwrap_or(usize::MAX);
    if cells > cap {
        return Err(Error::SizeCap {
            what: format!("{n}^{n}"),
            size: cells,
            cap,
        });
    }
    Ok(n)
}

/// Builds `ψ` as the canonical query of `Bⁿ` over the column variables.
pub fn build_gadget(s: &Structure, cap: usize) -> Result<Gadget> {
    let n = check_universe(s, cap)?;
    let columns = ColumnIndexing::new(n);
    let m = columns.len() - n - 1;
    let v_vars: Vec<Variable> = (1..=n)
        .map(|i| Variable::from(format!("v{i}").as_str()))
        .collect();
    let x_var = Variable::from("x");
    let y_vars: Vec<Variable> = (1..=m)
        .map(|j| Variable::from(format!("y{j}").as_str()))
        .collect();
    let mut gadget = Gadget {
        fingerprint: s.fingerprint(),
        n,
        m,
        v_vars,
        x_var,
        y_vars,
        columns,
        formula: QfppFormula::default(),
    };
    let power = power_structure(s, n, cap)?;
    let mut atoms = Vec::new();
    for (sym, lifted) in power.iter() {
        for t in lifted.tuples() {
            // lifted entries are ranks of columns
            let args = t
                .iter()
                .map(|&r| gadget.variable_at(gadget.columns.position[r]).clone())
                .collect();
            atoms.push(Atom::new(sym.name.clone(), args));
        }
    }
    gadget.formula = QfppFormula {
        vars: gadget.variables().cloned().collect(),
        atoms,
        equalities: Vec::new(),
    };
    Ok(gadget)
}

/// Outcome of one gadget condition, with the first counterexample found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionCheck {
    pub passed: bool,
    pub witness: Option<Assignment>,
}

impl ConditionCheck {
    fn pass() -> Self {
        ConditionCheck {
            passed: true,
            witness: None,
        }
    }

    fn fail_with(&mut self, h: &Assignment) {
        if self.passed {
            self.passed = false;
            self.witness = Some(h.clone());
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetReport {
    /// Every solution's values lie in `G_can` of its `v` values, and in a
    /// proper subset of `B` when those `v` values are not all of `B`.
    pub image_bound: ConditionCheck,
    /// Each row assignment satisfies `ψ` with `v` on the identity and `x ↦ c`.
    pub rows: ConditionCheck,
    /// Every solution's `v` values are realized by a unary polymorphism.
    pub unary_diagonal: ConditionCheck,
    pub solutions_seen: usize,
    /// False when the solution cap was hit; conditions (1) and (3) were
    /// then only checked on the solutions seen.
    pub complete: bool,
}

impl GadgetReport {
    pub fn all_passed(&self) -> bool {
        self.image_bound.passed && self.rows.passed && self.unary_diagonal.passed
    }

    /// Exact number of solutions, when the enumeration finished.
    pub fn solution_count(&self) -> Option<usize> {
        self.complete.then_some(self.solutions_seen)
    }
}

impl fmt::Display for GadgetReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let line = |f: &mut fmt::Formatter<'_>, name: &str, c: &ConditionCheck| {
            let status = if c.passed { "pass" } else { "fail" };
            match &c.witness {
                Some(w) => writeln!(f, "{name} {status} witness {w}"),
                None => writeln!(f, "{name} {status}"),
            }
        };
        line(f, "condition-1", &self.image_bound)?;
        line(f, "condition-2", &self.rows)?;
        line(f, "condition-3", &self.unary_diagonal)?;
        match self.solution_count() {
            Some(c) => writeln!(f, "solutions {c}"),
            None => writeln!(f, "solutions >={} incomplete", self.solutions_seen),
        }
    }
}

/// Row-assignment check alone; holds for every structure since projections
/// are polymorphisms.
pub fn check_rows(s: &Structure, g: &Gadget) -> Result<ConditionCheck> {
    let mut check = ConditionCheck::pass();
    for c in 0..g.n {
        let h = g.row_assignment(c);
        let v_ok = g.diagonal_of(&h) == (0..g.n).collect::<Tuple>();
        let x_ok = h.get(&g.x_var) == Some(c);
        if !(v_ok && x_ok && evaluate(s, &g.formula, &h)?) {
            check.fail_with(&h);
        }
    }
    Ok(check)
}

/// Checks the three gadget conditions, enumerating at most `solution_cap`
/// solutions for conditions (1) and (3).
pub fn verify_gadget(
    s: &Structure,
    g: &Gadget,
    solution_cap: usize,
    cap: usize,
) -> Result<GadgetReport> {
    if g.fingerprint != s.fingerprint() {
        return Err(Error::Contract(
            "gadget was built from a different structure".into(),
        ));
    }
    let rows = check_rows(s, g)?;
    let gmap = canonical_g(s, cap)?;
    let unary = unary_polymorphisms(s)?;
    let enumeration = enumerate_solutions(s, &g.formula, solution_cap)?;
    let mut image_bound = ConditionCheck::pass();
    let mut unary_diagonal = ConditionCheck::pass();
    for h in &enumeration.solutions {
        let diag = g.diagonal_of(h);
        let allowed = gmap.get(&diag);
        let values = h.image();
        // a valid G must be proper on non-surjective diagonals, and G_can is
        // the least candidate, so the values must avoid covering B there
        let proper_needed = diag.iter().collect::<BTreeSet<_>>().len() != g.n;
        if !values.is_subset(allowed) || (proper_needed && values.len() == g.n) {
            image_bound.fail_with(h);
        }
        if !unary.realizes(&diag) {
            unary_diagonal.fail_with(h);
        }
    }
    Ok(GadgetReport {
        image_bound,
        rows,
        unary_diagonal,
        solutions_seen: enumeration.solutions.len(),
        complete: enumeration.complete,
    })
}

/// Whether the diagonal-cautious premise behind a reduction was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Premise {
    Verified,
    Failed,
    Unchecked,
}

impl fmt::Display for Premise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Premise::Verified => "diagonal-cautious",
            Premise::Failed => "unverified premise: not diagonal-cautious",
            Premise::Unchecked => "unverified premise: unchecked",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub instance: ScspInstance,
    /// `|U| + n + |U|·m`, before equality elimination.
    pub vars_before_elimination: usize,
    pub original_atoms: usize,
    pub gadget_atoms: usize,
    pub premise: Premise,
}

pub fn y_var(u: &Variable, j: usize) -> Variable {
    Variable::from(format!("{RESERVED_PREFIX}y_{u}_{j}").as_str())
}

pub fn v_var(i: usize) -> Variable {
    Variable::from(format!("{RESERVED_PREFIX}v{i}").as_str())
}

type Split = (Vec<Atom>, Vec<(Element, Variable)>);

/// Splits `σ⁺` atoms into `σ` atoms and constant atoms `(b, u)`.
fn split_constants(s: &Structure, phi: &CspInstance) -> Result<Split> {
    let mut plain = Vec::new();
    let mut constants = Vec::new();
    for atom in &phi.atoms {
        if let Some(arity) = s.signature().arity_of(&atom.symbol) {
            if arity != atom.args.len() {
                return Err(Error::ArityMismatch {
                    symbol: atom.symbol.clone(),
                    expected: arity,
                    got: atom.args.len(),
                });
            }
            plain.push(atom.clone());
        } else if let Some(b) = parse_constant_symbol(&atom.symbol) {
            if b >= s.size() {
                return Err(Error::ElementOutOfRange {
                    element: b,
                    size: s.size(),
                });
            }
            if atom.args.len() != 1 {
                return Err(Error::ArityMismatch {
                    symbol: atom.symbol.clone(),
                    expected: 1,
                    got: atom.args.len(),
                });
            }
            constants.push((b, atom.args[0].clone()));
        } else {
            return Err(Error::UnknownSymbol(atom.symbol.clone()));
        }
    }
    Ok((plain, constants))
}

/// Reduces a `CSP(B⁺)` instance to an `SCSP(B)` instance using a prebuilt
/// gadget. The output is equivalent when `B` is diagonal-cautious.
pub fn reduce_with_gadget(
    s: &Structure,
    phi: &CspInstance,
    g: &Gadget,
    premise: Premise,
) -> Result<Reduction> {
    if s.size() < 2 {
        return Err(Error::SingletonUniverse);
    }
    if g.fingerprint != s.fingerprint() {
        return Err(Error::Contract(
            "gadget was built from a different structure".into(),
        ));
    }
    if let Some(v) = phi
        .vars
        .iter()
        .find(|v| v.name().starts_with(RESERVED_PREFIX))
    {
        return Err(Error::ReservedName(v.name().to_string()));
    }
    let (plain, constants) = split_constants(s, phi)?;
    let n = g.n;
    let v_block: Vec<Variable> = (1..=n).map(v_var).collect();

    let mut vars: BTreeSet<Variable> = phi.vars.clone();
    vars.extend(v_block.iter().cloned());
    let mut atoms = plain;
    let original_atoms = atoms.len();
    let equalities: Vec<VarEquality> = constants
        .into_iter()
        .map(|(b, u)| VarEquality {
            left: u,
            right: v_block[b].clone(),
        })
        .collect();

    for u in &phi.vars {
        let ys: Vec<Variable> = (1..=g.m).map(|j| y_var(u, j)).collect();
        vars.extend(ys.iter().cloned());
        let rename = |var: &Variable| -> Variable {
            if let Some(i) = g.v_vars.iter().position(|v| v == var) {
                v_block[i].clone()
            } else if var == &g.x_var {
                u.clone()
            } else {
                let j = g
                    .y_vars
                    .iter()
                    .position(|y| y == var)
                    .expect("gadget variable");
                ys[j].clone()
            }
        };
        atoms.extend(g.formula.atoms.iter().map(|a| Atom {
            symbol: a.symbol.clone(),
            args: a.args.iter().map(rename).collect(),
        }));
    }
    let gadget_atoms = atoms.len() - original_atoms;
    let vars_before_elimination = vars.len();
    debug_assert_eq!(vars_before_elimination, phi.vars.len() * (1 + g.m) + n);

    let formula = QfppFormula {
        vars,
        atoms,
        equalities,
    };
    let (vars, atoms) = eliminate_equalities(&formula.vars, &formula)?;
    Ok(Reduction {
        instance: ScspInstance::new(vars, atoms)?,
        vars_before_elimination,
        original_atoms,
        gadget_atoms,
        premise,
    })
}

/// Builds the gadget and reduces; the premise is reported as unchecked.
pub fn reduce(s: &Structure, phi: &CspInstance, cap: usize) -> Result<Reduction> {
    let g = build_gadget(s, cap)?;
    reduce_with_gadget(s, phi, &g, Premise::Unchecked)
}

/// Direct decision of a `CSP(B⁺)` instance over a one-element universe:
/// satisfiable iff every relation it mentions is nonempty.
pub fn decide_singleton(s: &Structure, phi: &CspInstance) -> Result<bool> {
    if s.size() != 1 {
        return Err(Error::Contract("expected a one-element universe".into()));
    }
    let (plain, _) = split_constants(s, phi)?;
    Ok(plain
        .iter()
        .all(|a| !s.relation(&a.symbol).expect("checked").is_empty()))
}

/// Short human-readable description of the column order.
pub fn describe_columns(c: &ColumnIndexing) -> String {
    let cols: Vec<String> = c.columns().iter().map(|t| fmt_tuple(t)).collect();
    cols.join(" ")
}

//! Exact CSP and SCSP decision procedures and solution enumeration.
//!
//! Variables are searched in lexicographic name order and values ascending,
//! so verdicts, witnesses and enumeration order are reproducible.

use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

use crate::error::Result;
use crate::formula::{
    check_atoms, Assignment, Atom, CspInstance, QfppFormula, ScspInstance, Variable,
};
use crate::search::{Limits, Outcome, Problem};
use crate::structure::{Structure, Tuple};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Yes,
    No,
    BudgetExceeded,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::BudgetExceeded => "budget-exceeded",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Stats {
    pub nodes: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub verdict: Verdict,
    pub witness: Option<Assignment>,
    pub stats: Stats,
}

/// Compiles a conjunction into the search engine. Equalities become binary
/// constraints over the diagonal relation.
fn compile<'a>(
    s: &'a Structure,
    vars: &'a BTreeSet<Variable>,
    atoms: &'a [Atom],
    equality: &'a [Tuple],
    equalities: &[(usize, usize)],
) -> Result<Problem<'a>> {
    check_atoms(s.signature(), atoms)?;
    let index: Vec<&Variable> = vars.iter().collect();
    let position = |v: &Variable| {
        index
            .binary_search(&v)
            .map_err(|_| crate::Error::UndeclaredVariable(v.name().to_string()))
    };
    let mut problem = Problem::new(s.size(), vars.len())?;
    for atom in atoms {
        let rel = s.relation(&atom.symbol).expect("checked above");
        let scope = atom.args.iter().map(position).collect::<Result<Vec<_>>>()?;
        problem.add_constraint(rel.tuples(), scope);
    }
    for &(a, b) in equalities {
        problem.add_constraint(equality, vec![a, b]);
    }
    Ok(problem)
}

fn to_assignment(vars: &BTreeSet<Variable>, values: Vec<usize>) -> Assignment {
    vars.iter().cloned().zip(values).collect()
}

fn decide(
    s: &Structure,
    vars: &BTreeSet<Variable>,
    atoms: &[Atom],
    budget: Option<u64>,
    surjective: bool,
) -> Result<SolveResult> {
    let start = Instant::now();
    let problem = compile(s, vars, atoms, &[], &[])?;
    let result = problem.solve(Limits {
        budget,
        max_solutions: 1,
        surjective,
    });
    let stats = Stats {
        nodes: result.nodes,
        elapsed: start.elapsed(),
    };
    let witness = result
        .solutions
        .into_iter()
        .next()
        .map(|values| to_assignment(vars, values));
    let verdict = match (&witness, result.outcome) {
        (Some(_), _) => Verdict::Yes,
        (None, Outcome::BudgetExceeded) => Verdict::BudgetExceeded,
        (None, _) => Verdict::No,
    };
    Ok(SolveResult {
        verdict,
        witness,
        stats,
    })
}

/// Is there any map from the variables into `B` satisfying every atom?
pub fn solve_csp(s: &Structure, phi: &CspInstance, budget: Option<u64>) -> Result<SolveResult> {
    decide(s, &phi.vars, &phi.atoms, budget, false)
}

/// Is there a satisfying map from `U` onto `B`?
pub fn solve_scsp(s: &Structure, inst: &ScspInstance, budget: Option<u64>) -> Result<SolveResult> {
    decide(s, &inst.vars, &inst.atoms, budget, true)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub solutions: Vec<Assignment>,
    /// False when the search stopped at the cap with solutions possibly left.
    pub complete: bool,
}

/// All satisfying assignments of `phi`, in lexicographic order of their
/// value vectors (variables in name order), at most `cap` of them.
pub fn enumerate_solutions(s: &Structure, phi: &QfppFormula, cap: usize) -> Result<Enumeration> {
    phi.check()?;
    let equality: Vec<Tuple> = (0..s.size()).map(|b| vec![b, b]).collect();
    let index: Vec<&Variable> = phi.vars.iter().collect();
    let eqs: Vec<(usize, usize)> = phi
        .equalities
        .iter()
        .map(|e| {
            (
                index.binary_search(&&e.left).expect("checked"),
                index.binary_search(&&e.right).expect("checked"),
            )
        })
        .collect();
    let problem = compile(s, &phi.vars, &phi.atoms, &equality, &eqs)?;
    let result = problem.solve(Limits {
        budget: None,
        max_solutions: cap.saturating_add(1),
        surjective: false,
    });
    let complete = result.solutions.len() <= cap;
    let solutions = result
        .solutions
        .into_iter()
        .take(cap)
        .map(|values| to_assignment(&phi.vars, values))
        .collect();
    Ok(Enumeration {
        solutions,
        complete,
    })
}

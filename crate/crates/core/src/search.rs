//! Backtracking search over bitset domains with forward checking.
//!
//! Variables are dense indices searched in a caller-supplied order; values
//! are tried in ascending order. After every assignment each constraint
//! watching the assigned variable is revised once: values of its other
//! variables lacking a supporting tuple are removed. Surjective search
//! additionally prunes nodes where the unassigned variables can no longer
//! cover the missing values.

use crate::error::{Error, Result};
use crate::structure::{Element, Tuple};

pub(crate) const MAX_UNIVERSE: usize = 64;

struct Constraint<'a> {
    tuples: &'a [Tuple],
    scope: Vec<usize>,
    // positions sharing a variable: tuples must agree there
    repeats: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Limits {
    pub budget: Option<u64>,
    pub max_solutions: usize,
    pub surjective: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Outcome {
    /// The search space was exhausted.
    Complete,
    /// `max_solutions` solutions were collected before exhausting the space.
    Truncated,
    BudgetExceeded,
}

#[derive(Debug, Clone)]
pub(crate) struct SearchResult {
    /// Each solution is indexed by variable.
    pub solutions: Vec<Vec<Element>>,
    pub nodes: u64,
    pub outcome: Outcome,
}

pub(crate) struct Problem<'a> {
    n: usize,
    domains: Vec<u64>,
    constraints: Vec<Constraint<'a>>,
    watch: Vec<Vec<usize>>,
    order: Vec<usize>,
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl<'a> Problem<'a> {
    /// `num_vars` variables over `0..n`, searched in index order.
    pub fn new(n: usize, num_vars: usize) -> Result<Self> {
        if n > MAX_UNIVERSE {
            return Err(Error::UniverseTooLarge(n));
        }
        Ok(Problem {
            n,
            domains: vec![full_mask(n); num_vars],
            constraints: Vec::new(),
            watch: vec![Vec::new(); num_vars],
            order: (0..num_vars).collect(),
        })
    }

    /// Restricts a variable to one value; conflicting pins empty the domain.
    pub fn pin(&mut self, var: usize, value: Element) {
        self.domains[var] &= 1u64.checked_shl(value as u32).unwrap_or(0);
    }

    pub fn add_constraint(&mut self, tuples: &'a [Tuple], scope: Vec<usize>) {
        let mut repeats = Vec::new();
        for j in 0..scope.len() {
            if let Some(i) = scope[..j].iter().position(|&v| v == scope[j]) {
                repeats.push((i, j));
            }
        }
        let id = self.constraints.len();
        let mut seen: Vec<usize> = Vec::with_capacity(scope.len());
        for &v in &scope {
            if !seen.contains(&v) {
                self.watch[v].push(id);
                seen.push(v);
            }
        }
        self.constraints.push(Constraint {
            tuples,
            scope,
            repeats,
        });
    }

    /// Removes unsupported values from the scope of constraint `c`.
    /// Returns false on a wipe-out.
    fn revise(&self, c: usize, domains: &mut [u64]) -> bool {
        let con = &self.constraints[c];
        let mut support = vec![0u64; con.scope.len()];
        let mut any = false;
        'tuples: for t in con.tuples {
            for (p, &v) in con.scope.iter().enumerate() {
                if domains[v] & (1u64 << t[p]) == 0 {
                    continue 'tuples;
                }
            }
            for &(i, j) in &con.repeats {
                if t[i] != t[j] {
                    continue 'tuples;
                }
            }
            any = true;
            for (p, s) in support.iter_mut().enumerate() {
                *s |= 1u64 << t[p];
            }
        }
        if !any {
            return false;
        }
        for (p, &v) in con.scope.iter().enumerate() {
            domains[v] &= support[p];
        }
        true
    }

    pub fn solve(&self, limits: Limits) -> SearchResult {
        let mut state = State {
            problem: self,
            limits,
            solutions: Vec::new(),
            nodes: 0,
            stop: None,
        };
        let mut domains = self.domains.clone();
        let consistent = domains.iter().all(|&d| d != 0)
            && (0..self.constraints.len()).all(|c| self.revise(c, &mut domains));
        if consistent {
            state.descend(0, domains);
        }
        let outcome = state.stop.unwrap_or(Outcome::Complete);
        SearchResult {
            solutions: state.solutions,
            nodes: state.nodes,
            outcome,
        }
    }
}

struct State<'p, 'a> {
    problem: &'p Problem<'a>,
    limits: Limits,
    solutions: Vec<Vec<Element>>,
    nodes: u64,
    stop: Option<Outcome>,
}

impl State<'_, '_> {
    fn coverable(&self, depth: usize, domains: &[u64]) -> bool {
        let p = self.problem;
        let full = full_mask(p.n);
        let mut used = 0u64;
        let mut reach = 0u64;
        for &v in &p.order[..depth] {
            used |= domains[v];
        }
        for &v in &p.order[depth..] {
            reach |= domains[v];
        }
        let remaining = p.order.len() - depth;
        used.count_ones() as usize + remaining >= p.n && (used | reach) == full
    }

    fn descend(&mut self, depth: usize, domains: Vec<u64>) {
        if self.limits.surjective && !self.coverable(depth, &domains) {
            return;
        }
        let p = self.problem;
        if depth == p.order.len() {
            self.solutions.push(
                domains
                    .iter()
                    .map(|d| d.trailing_zeros() as Element)
                    .collect(),
            );
            if self.solutions.len() >= self.limits.max_solutions {
                self.stop = Some(Outcome::Truncated);
            }
            return;
        }
        let var = p.order[depth];
        let mut values = domains[var];
        while values != 0 {
            let value = values.trailing_zeros();
            values &= values - 1;
            self.nodes += 1;
            if let Some(budget) = self.limits.budget {
                if self.nodes > budget {
                    self.stop = Some(Outcome::BudgetExceeded);
                    break;
                }
            }
            let mut next = domains.clone();
            next[var] = 1u64 << value;
            if p.watch[var].iter().all(|&c| p.revise(c, &mut next)) {
                self.descend(depth + 1, next);
            }
            if self.stop.is_some() {
                break;
            }
        }
    }
}

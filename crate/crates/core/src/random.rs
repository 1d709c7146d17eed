//! Seeded generators for structures and instances.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formula::{Atom, CspInstance, Variable};
use crate::structure::{all_tuples, constant_symbol, Structure, StructureDef};

/// Probability that an atom of a `σ⁺` instance is a constant atom.
pub const CONSTANT_ATOM_PROBABILITY: f64 = 0.3;

/// Each tuple of each relation is included independently with probability 1/2.
pub fn random_structure(seed: u64, n: usize, shape: &[(&str, usize)]) -> Structure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let relations = shape
        .iter()
        .map(|&(name, arity)| {
            let tuples = all_tuples(n, arity).filter(|_| rng.gen_bool(0.5)).collect();
            (name.to_string(), arity, tuples)
        })
        .collect();
    Structure::from_def(StructureDef { size: n, relations }).expect("generated structure is valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceBounds {
    pub max_vars: usize,
    pub max_atoms: usize,
    /// Draw constant atoms `C_b(u)`, making this a `σ⁺` instance.
    pub constants: bool,
}

/// Variables `u1..uk` with `k` uniform in `1..=max_vars`; atom count uniform
/// in `0..=max_atoms`; each atom picks a symbol and argument tuple uniformly.
pub fn random_instance(seed: u64, s: &Structure, bounds: InstanceBounds) -> CspInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let num_vars = rng.gen_range(1..=bounds.max_vars.max(1));
    let vars: Vec<Variable> = (1..=num_vars)
        .map(|i| Variable::from(format!("u{i}").as_str()))
        .collect();
    let num_atoms = rng.gen_range(0..=bounds.max_atoms);
    let symbols = s.signature().symbols();
    let mut atoms = Vec::with_capacity(num_atoms);
    for _ in 0..num_atoms {
        let constant = bounds.constants && rng.gen_bool(CONSTANT_ATOM_PROBABILITY);
        if constant || symbols.is_empty() {
            if !bounds.constants {
                break;
            }
            let b = rng.gen_range(0..s.size());
            let u = vars[rng.gen_range(0..vars.len())].clone();
            atoms.push(Atom::new(constant_symbol(b), vec![u]));
        } else {
            let sym = &symbols[rng.gen_range(0..symbols.len())];
            let args = (0..sym.arity)
                .map(|_| vars[rng.gen_range(0..vars.len())].clone())
                .collect();
            atoms.push(Atom::new(sym.name.clone(), args));
        }
    }
    let vars: BTreeSet<Variable> = vars.into_iter().collect();
    CspInstance::new(vars, atoms).expect("generated atoms use declared variables")
}

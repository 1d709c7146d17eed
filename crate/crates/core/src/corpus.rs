//! Named structures and the two-element corpus.

use crate::structure::{all_tuples, Structure, Tuple};

/// `R = {(0,1), (1,0), (1,1)}` on `{0,1}`: binary OR.
pub fn or_structure() -> Structure {
    Structure::new(2, vec![("R", 2, vec![vec![0, 1], vec![1, 0], vec![1, 1]])])
        .expect("static structure")
}

/// One-in-three: `R = {(0,0,1), (0,1,0), (1,0,0)}` on `{0,1}`.
pub fn one_in_three() -> Structure {
    Structure::new(
        2,
        vec![("R", 3, vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]])],
    )
    .expect("static structure")
}

/// Disequality on three elements (the triangle `K₃`).
pub fn neq3() -> Structure {
    let e = all_tuples(3, 2).filter(|t| t[0] != t[1]).collect();
    Structure::new(3, vec![("E", 2, e)]).expect("static structure")
}

/// Every structure on `{0,1}` with a single relation `R` of arity 1, 2 or 3,
/// ordered by arity and then by the bitmask of included tuples.
pub fn boolean_corpus() -> Vec<Structure> {
    let mut out = Vec::new();
    for arity in 1..=3 {
        let space: Vec<Tuple> = all_tuples(2, arity).collect();
        for mask in 0u32..(1 << space.len()) {
            let tuples = space
                .iter()
                .enumerate()
                .filter(|&(i, _)| mask & (1 << i) != 0)
                .map(|(_, t)| t.clone())
                .collect();
            out.push(Structure::new(2, vec![("R", arity, tuples)]).expect("corpus structure"));
        }
    }
    out
}

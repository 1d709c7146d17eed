//! Line-oriented text formats for structures, instances and operation tables.
//!
//! All formats are UTF-8, one directive per line, with `#` starting a
//! comment. Unknown directives are rejected with the offending line number.

use std::collections::BTreeSet;

use crate::clone::OperationTable;
use crate::error::{Error, Result};
use crate::formula::{Atom, CspInstance, QfppFormula, ScspInstance, VarEquality, Variable};
use crate::structure::{constant_symbol, Element, StructureDef, Tuple};

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Non-empty lines with comments stripped, numbered from 1.
fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let content = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = content.split_whitespace().collect();
        (!words.is_empty()).then_some((i + 1, words))
    })
}

fn number(line: usize, word: &str) -> Result<usize> {
    word.parse().map_err(|_| {
        err(
            line,
            format!("expected a non-negative integer, found `{word}`"),
        )
    })
}

fn variable(line: usize, word: &str) -> Result<Variable> {
    Variable::new(word).map_err(|e| err(line, e.to_string()))
}

/// ```text
/// domain 2
/// relation R 2
/// 0 1
/// end
/// ```
pub fn parse_structure(text: &str) -> Result<StructureDef> {
    let mut size = None;
    let mut relations = Vec::new();
    let mut open: Option<(usize, String, usize, Vec<Tuple>)> = None;
    for (line, words) in lines(text) {
        if let Some((_, _, _, tuples)) = open.as_mut() {
            if words == ["end"] {
                let (_, name, arity, tuples) = open.take().expect("open block");
                relations.push((name, arity, tuples));
            } else {
                let tuple = words
                    .iter()
                    .map(|w| number(line, w))
                    .collect::<Result<Tuple>>()?;
                tuples.push(tuple);
            }
            continue;
        }
        match words[0] {
            "domain" => {
                if size.is_some() {
                    return Err(err(line, "duplicate `domain` directive"));
                }
                if words.len() != 2 {
                    return Err(err(line, "usage: domain <n>"));
                }
                size = Some(number(line, words[1])?);
            }
            "relation" => {
                if size.is_none() {
                    return Err(err(line, "`domain` must come first"));
                }
                if words.len() != 3 {
                    return Err(err(line, "usage: relation <name> <arity>"));
                }
                open = Some((
                    line,
                    words[1].to_string(),
                    number(line, words[2])?,
                    Vec::new(),
                ));
            }
            other => {
                if size.is_none() {
                    return Err(err(line, "`domain` must come first"));
                }
                return Err(err(line, format!("unknown directive `{other}`")));
            }
        }
    }
    if let Some((line, name, _, _)) = open {
        return Err(err(line, format!("relation `{name}` is missing `end`")));
    }
    let size = size.ok_or_else(|| err(0, "missing `domain` directive"))?;
    Ok(StructureDef { size, relations })
}

/// A parsed instance file: `vars`, `atom`, `eq` and `const` directives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceFile {
    pub formula: QfppFormula,
    /// Line of the first `eq` directive, if any.
    pub first_eq_line: Option<usize>,
    /// Line of the first `const` directive, if any.
    pub first_const_line: Option<usize>,
}

pub fn parse_instance(text: &str) -> Result<InstanceFile> {
    let mut vars = BTreeSet::new();
    let mut atoms = Vec::new();
    let mut equalities = Vec::new();
    let mut uses: Vec<(usize, Variable)> = Vec::new();
    let mut first_eq_line = None;
    let mut first_const_line = None;
    for (line, words) in lines(text) {
        match words[0] {
            "vars" => {
                for w in &words[1..] {
                    vars.insert(variable(line, w)?);
                }
            }
            "atom" => {
                if words.len() < 3 {
                    return Err(err(line, "usage: atom <relname> <var> ..."));
                }
                let args = words[2..]
                    .iter()
                    .map(|w| variable(line, w))
                    .collect::<Result<Vec<_>>>()?;
                uses.extend(args.iter().map(|v| (line, v.clone())));
                atoms.push(Atom::new(words[1], args));
            }
            "eq" => {
                if words.len() != 3 {
                    return Err(err(line, "usage: eq <var> <var>"));
                }
                let (l, r) = (variable(line, words[1])?, variable(line, words[2])?);
                uses.push((line, l.clone()));
                uses.push((line, r.clone()));
                equalities.push(VarEquality { left: l, right: r });
                first_eq_line.get_or_insert(line);
            }
            "const" => {
                if words.len() != 3 {
                    return Err(err(line, "usage: const <element> <var>"));
                }
                let b: Element = number(line, words[1])?;
                let v = variable(line, words[2])?;
                uses.push((line, v.clone()));
                atoms.push(Atom::new(constant_symbol(b), vec![v]));
                first_const_line.get_or_insert(line);
            }
            other => return Err(err(line, format!("unknown directive `{other}`"))),
        }
    }
    if let Some((line, v)) = uses.iter().find(|(_, v)| !vars.contains(v)) {
        return Err(err(
            *line,
            format!("variable `{v}` is not declared by `vars`"),
        ));
    }
    Ok(InstanceFile {
        formula: QfppFormula {
            vars,
            atoms,
            equalities,
        },
        first_eq_line,
        first_const_line,
    })
}

/// A `CSP(B)` or `CSP(B⁺)` instance; `eq` lines are rejected.
pub fn parse_csp_instance(text: &str) -> Result<CspInstance> {
    let file = parse_instance(text)?;
    if let Some(line) = file.first_eq_line {
        return Err(err(line, "`eq` is not allowed in a CSP instance"));
    }
    CspInstance::new(file.formula.vars, file.formula.atoms)
}

/// An `SCSP(B)` instance; `const` and `eq` lines are rejected.
pub fn parse_scsp_instance(text: &str) -> Result<ScspInstance> {
    let file = parse_instance(text)?;
    if let Some(line) = file.first_const_line {
        return Err(err(line, "`const` is only allowed in CSP(B+) instances"));
    }
    if let Some(line) = file.first_eq_line {
        return Err(err(line, "`eq` is not allowed in an SCSP instance"));
    }
    ScspInstance::new(file.formula.vars, file.formula.atoms)
}

/// Writes `vars` and `atom` lines only.
pub fn write_instance(vars: &BTreeSet<Variable>, atoms: &[Atom]) -> String {
    let mut out = String::from("vars");
    for v in vars {
        out.push(' ');
        out.push_str(v.name());
    }
    out.push('\n');
    for a in atoms {
        out.push_str("atom ");
        out.push_str(&a.symbol);
        for v in &a.args {
            out.push(' ');
            out.push_str(v.name());
        }
        out.push('\n');
    }
    out
}

/// `op <arity>`, then `n^arity` values in lexicographic input order, then `end`.
pub fn parse_operation(text: &str, n: usize) -> Result<OperationTable> {
    let mut arity = None;
    let mut values = Vec::new();
    let mut header_line = 0;
    let mut closed = false;
    for (line, words) in lines(text) {
        if closed {
            return Err(err(line, "content after `end`"));
        }
        match (arity, words[0]) {
            (None, "op") => {
                if words.len() != 2 {
                    return Err(err(line, "usage: op <arity>"));
                }
                arity = Some(number(line, words[1])?);
                header_line = line;
            }
            (None, other) => return Err(err(line, format!("unknown directive `{other}`"))),
            (Some(_), "end") if words.len() == 1 => closed = true,
            (Some(_), _) => {
                for w in &words {
                    values.push(number(line, w)?);
                }
            }
        }
    }
    let arity = arity.ok_or_else(|| err(0, "missing `op` header"))?;
    if !closed {
        return Err(err(header_line, "operation table is missing `end`"));
    }
    OperationTable::new(n, arity, values).map_err(|e| err(header_line, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{validate_structure, Structure};

    #[test]
    fn structure_round_trip() {
        let text = "# OR\ndomain 2\nrelation R 2\n0 1\n1 0 # comment\n1 1\nend\n";
        let def = parse_structure(text).unwrap();
        let s = Structure::from_def(def).unwrap();
        assert_eq!(
            s.to_string(),
            "domain 2\nrelation R 2\n0 1\n1 0\n1 1\nend\n"
        );
        assert_eq!(
            Structure::from_def(parse_structure(&s.to_string()).unwrap()).unwrap(),
            s
        );
    }

    #[test]
    fn structure_parse_keeps_bad_tuples_for_validation() {
        let def = parse_structure("domain 2\nrelation R 2\n0 2\n0 1 1\nend\n").unwrap();
        assert_eq!(validate_structure(&def).len(), 2);
    }

    #[test]
    fn structure_parse_errors_have_lines() {
        assert_eq!(
            parse_structure("domain 2\nfoo bar\n"),
            Err(Error::Parse {
                line: 2,
                message: "unknown directive `foo`".into()
            })
        );
        assert!(matches!(
            parse_structure("domain 2\nrelation R 1\n0\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_structure("domain 2\nrelation R 1\nx\nend\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_structure("relation R 1\nend\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn instance_directives() {
        let text = "vars u w\nvars z\natom R u w\neq u z\nconst 1 w\n";
        let f = parse_instance(text).unwrap();
        assert_eq!(f.formula.vars.len(), 3);
        assert_eq!(f.formula.atoms.len(), 2);
        assert_eq!(f.formula.atoms[1], Atom::of("C_1", &["w"]));
        assert_eq!(f.formula.equalities, vec![VarEquality::new("u", "z")]);
        assert_eq!(f.first_eq_line, Some(4));
        assert_eq!(f.first_const_line, Some(5));
    }

    #[test]
    fn instance_errors() {
        assert!(matches!(
            parse_instance("vars u\nfrob u\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_instance("vars u\natom R u q\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_csp_instance("vars u w\neq u w\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_scsp_instance("vars u\nconst 0 u\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn instance_round_trip() {
        let text = "vars a b c\natom R a b\natom R c c\n";
        let i = parse_scsp_instance(text).unwrap();
        assert_eq!(write_instance(&i.vars, &i.atoms), text);
    }

    #[test]
    fn operation_parse() {
        let f = parse_operation("op 2\n0 1\n1 1\nend\n", 2).unwrap();
        assert_eq!(f.values(), &[0, 1, 1, 1]);
        assert_eq!(parse_operation(&f.to_string(), 2).unwrap(), f);
        assert!(parse_operation("op 2\n0 1 1\nend\n", 2).is_err());
        assert!(parse_operation("op 2\n0 1 1 1\n", 2).is_err());
        assert!(parse_operation("op 1\n0 2\nend\n", 2).is_err());
    }
}

//! End-to-end check of the reduction against the independent oracles.

use std::fmt;

use crate::clone::is_diagonal_cautious;
use crate::error::Result;
use crate::formula::evaluate;
use crate::gadget::{build_gadget, reduce_with_gadget, Premise};
use crate::oracles::{solve_csp, solve_scsp, Verdict};
use crate::random::{random_instance, InstanceBounds};
use crate::structure::{expand_with_constants, short_digest, Structure};
use crate::text::write_instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    pub trials: usize,
    pub seed: u64,
    pub bounds: InstanceBounds,
    pub budget: Option<u64>,
    /// Universe cap for `G_can` and the gadget, as `n^n` cells.
    pub cap: usize,
    /// Skip draws whose `CSP(B⁺)` verdict is not `yes`.
    pub satisfiable_only: bool,
    /// Upper bound on seeds tried per accepted trial in satisfiable-only mode.
    pub max_draws: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            trials: 50,
            seed: 0,
            bounds: InstanceBounds {
                max_vars: 4,
                max_atoms: 5,
                constants: true,
            },
            budget: Some(crate::oracles::DEFAULT_BUDGET),
            cap: 256,
            satisfiable_only: false,
            max_draws: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trial {
    pub seed: u64,
    pub digest: String,
    pub csp: Verdict,
    pub scsp: Verdict,
    /// `None` when either side ran out of budget.
    pub agree: Option<bool>,
    /// The SCSP witness (if any) satisfies the reduced instance and is surjective.
    pub witness_valid: bool,
    pub reduced_vars: usize,
    pub reduced_atoms: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub fingerprint: String,
    pub premise: Premise,
    pub trials: Vec<Trial>,
}

impl VerificationReport {
    pub fn agreements(&self) -> usize {
        self.trials.iter().filter(|t| t.agree == Some(true)).count()
    }

    pub fn disagreements(&self) -> usize {
        self.trials
            .iter()
            .filter(|t| t.agree == Some(false))
            .count()
    }

    pub fn budget_exhausted(&self) -> usize {
        self.trials.iter().filter(|t| t.agree.is_none()).count()
    }

    pub fn invalid_witnesses(&self) -> usize {
        self.trials.iter().filter(|t| !t.witness_valid).count()
    }

    /// Every trial finished and agreed, with valid witnesses.
    pub fn all_agree(&self) -> bool {
        self.agreements() == self.trials.len() && self.invalid_witnesses() == 0
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "structure {}", self.fingerprint)?;
        writeln!(f, "premise {}", self.premise)?;
        for (i, t) in self.trials.iter().enumerate() {
            let agree = match t.agree {
                Some(true) => "agree",
                Some(false) => "DISAGREE",
                None => "budget-exceeded",
            };
            writeln!(
                f,
                "trial {i} seed {} digest {} csp {} scsp {} vars {} atoms {} {agree}",
                t.seed, t.digest, t.csp, t.scsp, t.reduced_vars, t.reduced_atoms
            )?;
        }
        let seeds: Vec<String> = self.trials.iter().map(|t| t.seed.to_string()).collect();
        let digests: Vec<&str> = self.trials.iter().map(|t| t.digest.as_str()).collect();
        writeln!(f, "summary")?;
        writeln!(f, "trials {}", self.trials.len())?;
        writeln!(f, "agree {}", self.agreements())?;
        writeln!(f, "disagree {}", self.disagreements())?;
        writeln!(f, "budget-exceeded {}", self.budget_exhausted())?;
        writeln!(f, "invalid-witnesses {}", self.invalid_witnesses())?;
        writeln!(f, "seeds {}", seeds.join(" "))?;
        writeln!(f, "digests {}", digests.join(" "))?;
        writeln!(f, "end")
    }
}

/// Runs random `σ⁺` instances through both `solve_csp` on `B⁺` and
/// `reduce` + `solve_scsp` on `B`, recording agreement per trial.
///
/// Trial seeds are consecutive from `config.seed`; in satisfiable-only mode
/// seeds whose instance is not satisfiable are skipped.
pub fn verify_reduction(s: &Structure, config: &VerifyConfig) -> Result<VerificationReport> {
    let verdict = is_diagonal_cautious(s, config.cap)?;
    let premise = if verdict.is_diagonal_cautious {
        Premise::Verified
    } else {
        Premise::Failed
    };
    let gadget = build_gadget(s, config.cap)?;
    let plus = expand_with_constants(s)?;
    let mut trials = Vec::with_capacity(config.trials);
    let mut seed = config.seed;
    while trials.len() < config.trials {
        let mut draws = 0;
        let (phi, csp) = loop {
            let phi = random_instance(seed, s, config.bounds);
            let csp = solve_csp(&plus, &phi, config.budget)?;
            draws += 1;
            if !config.satisfiable_only || csp.verdict == Verdict::Yes || draws >= config.max_draws
            {
                break (phi, csp);
            }
            seed = seed.wrapping_add(1);
        };
        let reduction = reduce_with_gadget(s, &phi, &gadget, premise)?;
        let scsp = solve_scsp(s, &reduction.instance, config.budget)?;
        let witness_valid = match &scsp.witness {
            Some(w) => {
                evaluate(s, &reduction.instance.clone().into(), w)?
                    && w.is_surjective_onto(s.size())
            }
            None => true,
        };
        let agree = match (csp.verdict, scsp.verdict) {
            (Verdict::BudgetExceeded, _) | (_, Verdict::BudgetExceeded) => None,
            (a, b) => Some(a == b),
        };
        trials.push(Trial {
            seed,
            digest: short_digest(&write_instance(&phi.vars, &phi.atoms)),
            csp: csp.verdict,
            scsp: scsp.verdict,
            agree,
            witness_valid,
            reduced_vars: reduction.instance.vars.len(),
            reduced_atoms: reduction.instance.atoms.len(),
        });
        seed = seed.wrapping_add(1);
    }
    Ok(VerificationReport {
        fingerprint: s.fingerprint(),
        premise,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn one_in_three_small_run() {
        let config = VerifyConfig {
            trials: 10,
            seed: 3,
            ..VerifyConfig::default()
        };
        let r = verify_reduction(&corpus::one_in_three(), &config).unwrap();
        assert_eq!(r.premise, Premise::Verified);
        assert_eq!(r.trials.len(), 10);
        assert!(r.all_agree(), "{r}");
        assert_eq!(r.trials[0].seed, 3);
    }

    #[test]
    fn report_summary_matches_trials() {
        let config = VerifyConfig {
            trials: 4,
            ..VerifyConfig::default()
        };
        let r = verify_reduction(&corpus::or_structure(), &config).unwrap();
        assert_eq!(r.premise, Premise::Failed);
        let text = r.to_string();
        assert!(text.contains("summary\ntrials 4\n"));
        assert_eq!(
            r.agreements() + r.disagreements() + r.budget_exhausted(),
            r.trials.len()
        );
    }
}

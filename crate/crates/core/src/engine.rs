//! Runs the plan attached to a classification, or a forced solver.

use std::fmt;

use num_traits::{One, Zero};

use crate::classify::{classify, Plan, Problem, SolverKind};
use crate::error::SolveError;
use crate::exact::{
    bnb_mpd, exact_prob, mpd_in_scope, oracle_enumerate_with_cap, prob_in_scope, search_scope, ExactOptions,
    DEFAULT_WORLD_CAP,
};
use crate::fd::FdSet;
use crate::model::Cir;
use crate::poly::{
    combine_solutions, prob_left_certain, solve_left_certain, solve_matching, solve_unary_tractable,
    ComponentSolution, Mpd,
};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Solver {
    /// The classifier's plan: polynomial parts where proven, search elsewhere.
    #[default]
    Auto,
    /// The classifier's plan, refusing any exponential part.
    Poly,
    /// Branch and bound over the whole FD set.
    Exact,
    /// Full enumeration.
    Oracle,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Auto => "auto",
            Solver::Poly => "poly",
            Solver::Exact => "exact",
            Solver::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    pub solver: Solver,
    /// Largest world count an exponential part may face.
    pub world_budget: u128,
    pub node_budget: Option<u64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { solver: Solver::Auto, world_budget: DEFAULT_WORLD_CAP, node_budget: None }
    }
}

impl SolveOptions {
    pub fn with_solver(solver: Solver) -> Self {
        SolveOptions { solver, ..Default::default() }
    }
}

/// A result and the algorithms that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solved<T> {
    pub value: T,
    /// One entry per executed part, e.g. `Matching(room time <-> specialist? time)`.
    pub steps: Vec<String>,
}

fn gate(cir: &Cir, fds: &FdSet, budget: u128) -> Result<(), SolveError> {
    let worlds = cir.world_count(search_scope(cir, fds));
    if worlds > budget {
        return Err(SolveError::WorldBudget { worlds, cap: budget });
    }
    Ok(())
}

fn plan_for(fds: &FdSet, problem: Problem, options: &SolveOptions) -> Result<Plan, SolveError> {
    let classification = classify(fds);
    let verdict = classification.verdict(problem);
    if options.solver == Solver::Poly && !verdict.plan.is_poly() {
        return Err(SolveError::NoPolyPlan(format!(
            "{} is {} for {}",
            problem.name(),
            verdict.complexity,
            classification.fds
        )));
    }
    Ok(verdict.plan.clone())
}

fn run_mpd_plan(cir: &Cir, plan: &Plan, options: &SolveOptions) -> Result<Solved<Option<Mpd>>, SolveError> {
    let schema = cir.schema();
    let mut parts = Vec::with_capacity(plan.steps.len());
    let mut steps = Vec::with_capacity(plan.steps.len());
    for step in &plan.steps {
        let part = match step.solver {
            SolverKind::LeftCertain => solve_left_certain(cir, &step.fds)?,
            SolverKind::Matching { x, y } => solve_matching(cir, x, y)?,
            SolverKind::UnaryTractable => solve_unary_tractable(cir, &step.fds)?,
            SolverKind::Exact => exact_part(cir, &step.fds, options)?,
        };
        steps.push(format!("{} on {{{}}}", step.solver.describe(schema), step.fds.to_dsl()));
        let feasible = part.is_feasible();
        parts.push(part);
        if !feasible {
            break;
        }
    }
    Ok(Solved { value: combine_solutions(cir, &parts, plan.free)?, steps })
}

fn exact_part(cir: &Cir, fds: &FdSet, options: &SolveOptions) -> Result<ComponentSolution, SolveError> {
    gate(cir, fds, options.world_budget)?;
    mpd_in_scope(cir, fds, search_scope(cir, fds), options.node_budget).map_err(|_| SolveError::NodeBudget {
        budget: options.node_budget.unwrap_or(0),
        incumbent: None,
    })
}

fn run_prob_plan(cir: &Cir, plan: &Plan, options: &SolveOptions) -> Result<Solved<Rational>, SolveError> {
    let schema = cir.schema();
    let mut total = Rational::one();
    let mut steps = Vec::with_capacity(plan.steps.len());
    for step in &plan.steps {
        let p = match step.solver {
            SolverKind::LeftCertain => prob_left_certain(cir, &step.fds)?,
            _ => {
                gate(cir, &step.fds, options.world_budget)?;
                prob_in_scope(cir, &step.fds, search_scope(cir, &step.fds), options.node_budget)?
            }
        };
        let kind = if step.solver == SolverKind::LeftCertain { step.solver } else { SolverKind::Exact };
        steps.push(format!("{} on {{{}}}", kind.describe(schema), step.fds.to_dsl()));
        total *= p;
        if total.is_zero() {
            break;
        }
    }
    Ok(Solved { value: total, steps })
}

/// A most probable consistent sample, `None` if there is none.
pub fn most_probable(cir: &Cir, fds: &FdSet, options: &SolveOptions) -> Result<Solved<Option<Mpd>>, SolveError> {
    solve_mpd(cir, fds, Problem::Mpd, options)
}

/// Whether some sample satisfies the FDs; the witness comes along.
pub fn possibly_consistent(
    cir: &Cir,
    fds: &FdSet,
    options: &SolveOptions,
) -> Result<Solved<Option<Mpd>>, SolveError> {
    solve_mpd(cir, fds, Problem::Possibility, options)
}

fn solve_mpd(
    cir: &Cir,
    fds: &FdSet,
    problem: Problem,
    options: &SolveOptions,
) -> Result<Solved<Option<Mpd>>, SolveError> {
    let exact = ExactOptions { world_cap: options.world_budget, node_budget: options.node_budget };
    match options.solver {
        Solver::Auto | Solver::Poly => run_mpd_plan(cir, &plan_for(fds, problem, options)?, options),
        Solver::Exact => {
            gate(cir, fds, options.world_budget)?;
            Ok(Solved { value: bnb_mpd(cir, fds, &exact)?, steps: vec!["Exact".to_string()] })
        }
        Solver::Oracle => {
            let report = oracle_enumerate_with_cap(cir, fds, options.world_budget)?;
            Ok(Solved { value: report.max, steps: vec!["Oracle".to_string()] })
        }
    }
}

/// The probability that a random sample satisfies the FDs.
pub fn probability(cir: &Cir, fds: &FdSet, options: &SolveOptions) -> Result<Solved<Rational>, SolveError> {
    let exact = ExactOptions { world_cap: options.world_budget, node_budget: options.node_budget };
    match options.solver {
        Solver::Auto | Solver::Poly => run_prob_plan(cir, &plan_for(fds, Problem::Probability, options)?, options),
        Solver::Exact => {
            gate(cir, fds, options.world_budget)?;
            Ok(Solved { value: exact_prob(cir, fds, &exact)?, steps: vec!["Exact".to_string()] })
        }
        Solver::Oracle => {
            let report = oracle_enumerate_with_cap(cir, fds, options.world_budget)?;
            Ok(Solved { value: report.total, steps: vec!["Oracle".to_string()] })
        }
    }
}

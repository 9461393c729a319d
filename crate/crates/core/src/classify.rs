//! Complexity classification of FD sets and the solver plans derived from it.
//!
//! Rules that only hold for a whole FD set are tried on the whole set first.
//! Only when none applies is the set decomposed into parts sharing certain
//! attributes, and each part classified on its own: tractable parts combine
//! into a tractable whole, but a hard part says nothing about the whole (for
//! `?A -> B, B -> C, C -> ?A` the MPD is tractable although the part
//! `?A -> B, C -> ?A` alone is hard).

use std::fmt;

use crate::fd::FdSet;
use crate::model::{AttrSet, Schema};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Complexity {
    PolyTime,
    NpHard,
    SharpPHard,
    Unknown,
}

impl fmt::Display for Complexity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Complexity::PolyTime => "PolyTime",
            Complexity::NpHard => "NPHard",
            Complexity::SharpPHard => "SharpPHard",
            Complexity::Unknown => "Unknown",
        })
    }
}

/// The result a verdict rests on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Theorem {
    BinaryTable,
    SingletonDichotomy,
    MatchingDichotomy,
    AllUncertain,
    UnaryTrichotomy,
    LhsCertain,
    Decomposition,
}

impl Theorem {
    pub fn name(self) -> &'static str {
        match self {
            Theorem::BinaryTable => "BinaryTable",
            Theorem::SingletonDichotomy => "SingletonDichotomy",
            Theorem::MatchingDichotomy => "MatchingDichotomy",
            Theorem::AllUncertain => "AllUncertain",
            Theorem::UnaryTrichotomy => "UnaryTrichotomy",
            Theorem::LhsCertain => "LhsCertain",
            Theorem::Decomposition => "Decomposition",
        }
    }

    pub fn citation(self) -> &'static str {
        match self {
            Theorem::BinaryTable => {
                "binary schema: A->?B is tractable; A<->?B has tractable MPD and #P-hard \
                 probability; ?A->B and ?A<->?B are NP-hard"
            }
            Theorem::SingletonDichotomy => {
                "single FD X->Y: tractable iff X is all certain, otherwise NP-complete \
                 possibility and #P-complete probability"
            }
            Theorem::MatchingDichotomy => {
                "matching X<->Y: MPD tractable iff one side is all certain, otherwise \
                 NP-hard possibility; probability always #P-complete"
            }
            Theorem::AllUncertain => {
                "every attribute uncertain and no consensus FD: possibility NP-complete"
            }
            Theorem::UnaryTrichotomy => {
                "unary FDs: MPD tractable iff every uncertain attribute is a sink or \
                 equivalent to a certain one; probability tractable iff all are sinks"
            }
            Theorem::LhsCertain => {
                "left sides only certain: all three problems tractable by grouping tuples"
            }
            Theorem::Decomposition => {
                "parts sharing only certain attributes are independent; tractable parts \
                 give a tractable whole"
            }
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Problem {
    Possibility,
    Mpd,
    Probability,
}

impl Problem {
    pub const ALL: [Problem; 3] = [Problem::Possibility, Problem::Mpd, Problem::Probability];

    pub fn name(self) -> &'static str {
        match self {
            Problem::Possibility => "possibility",
            Problem::Mpd => "mpd",
            Problem::Probability => "probability",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Algorithm assigned to one part of a plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    LeftCertain,
    /// `x <-> y` with `x` all certain.
    Matching { x: AttrSet, y: AttrSet },
    UnaryTractable,
    /// Exponential search.
    Exact,
}

impl SolverKind {
    pub fn is_poly(&self) -> bool {
        !matches!(self, SolverKind::Exact)
    }

    pub fn describe(&self, schema: &Schema) -> String {
        match self {
            SolverKind::LeftCertain => "LeftCertain".to_string(),
            SolverKind::Matching { x, y } => {
                format!("Matching({} <-> {})", schema.display_set(*x), schema.display_set(*y))
            }
            SolverKind::UnaryTractable => "UnaryTractable".to_string(),
            SolverKind::Exact => "Exact".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanStep {
    pub fds: FdSet,
    pub solver: SolverKind,
}

/// Steps own disjoint sets of uncertain attributes; uncertain attributes in
/// `free` are touched by no FD.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    pub steps: Vec<PlanStep>,
    pub free: AttrSet,
}

impl Plan {
    pub fn is_poly(&self) -> bool {
        self.steps.iter().all(|s| s.solver.is_poly())
    }

    pub fn describe(&self, schema: &Schema) -> Vec<String> {
        let mut lines: Vec<String> = self
            .steps
            .iter()
            .map(|s| format!("{} on {{{}}}", s.solver.describe(schema), s.fds.to_dsl()))
            .collect();
        let free = self.free.intersection(schema.uncertain());
        if !free.is_empty() {
            lines.push(format!("FreeCells {}", schema.display_set(free)));
        }
        lines
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub complexity: Complexity,
    pub theorem: Option<Theorem>,
    pub plan: Plan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    /// The normalized input.
    pub fds: FdSet,
    pub possibility: Verdict,
    pub mpd: Verdict,
    pub probability: Verdict,
    pub equivalence_classes: Vec<AttrSet>,
}

impl Classification {
    pub fn verdict(&self, problem: Problem) -> &Verdict {
        match problem {
            Problem::Possibility => &self.possibility,
            Problem::Mpd => &self.mpd,
            Problem::Probability => &self.probability,
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let schema = self.fds.schema();
        writeln!(f, "fds: {}", self.fds)?;
        for p in Problem::ALL {
            let v = self.verdict(p);
            let tag = v.theorem.map(|t| format!(" [{t}]")).unwrap_or_default();
            writeln!(f, "{}: {}{}", p.name(), v.complexity, tag)?;
            for line in v.plan.describe(schema) {
                writeln!(f, "  {line}")?;
            }
        }
        Ok(())
    }
}

/// Outcome of the set-level rules.
struct Rule {
    complexity: [Complexity; 3],
    theorem: Option<Theorem>,
    solver: [Option<SolverKind>; 3],
}

impl Rule {
    fn uniform_poly(theorem: Option<Theorem>, solver: SolverKind) -> Self {
        Rule {
            complexity: [Complexity::PolyTime; 3],
            theorem,
            solver: [Some(solver); 3],
        }
    }

    fn mpd_poly(theorem: Theorem, solver: SolverKind) -> Self {
        use Complexity::*;
        Rule {
            complexity: [PolyTime, PolyTime, SharpPHard],
            theorem: Some(theorem),
            solver: [Some(solver), Some(solver), None],
        }
    }

    fn hard(theorem: Theorem) -> Self {
        use Complexity::*;
        Rule { complexity: [NpHard, NpHard, SharpPHard], theorem: Some(theorem), solver: [None; 3] }
    }
}

/// Rules that decide a normalized FD set as a whole.
fn set_rule(f: &FdSet) -> Option<Rule> {
    let schema = f.schema();
    let uncertain = schema.uncertain();
    let certain = schema.certain();
    if f.is_empty() {
        return Some(Rule::uniform_poly(None, SolverKind::LeftCertain));
    }
    if f.is_lhs_certain() {
        return Some(Rule::uniform_poly(Some(Theorem::LhsCertain), SolverKind::LeftCertain));
    }
    if f.is_unary() {
        let tractable = uncertain.intersection(f.attrs()).iter().all(|a| {
            f.is_sink(a) || certain.iter().any(|b| f.equivalent(a, b))
        });
        return Some(if tractable {
            Rule::mpd_poly(Theorem::UnaryTrichotomy, SolverKind::UnaryTractable)
        } else {
            Rule::hard(Theorem::UnaryTrichotomy)
        });
    }
    let mut lhs: Vec<AttrSet> = f.fds().iter().map(|fd| fd.lhs).collect();
    lhs.dedup();
    let rhs_of = |l: AttrSet| {
        f.fds().iter().filter(|fd| fd.lhs == l).fold(AttrSet::EMPTY, |acc, fd| acc.union(fd.rhs))
    };
    if lhs.len() == 1 {
        // A single FD `X -> Y`; X holds an uncertain attribute or the set
        // would be left-certain.
        return Some(Rule::hard(Theorem::SingletonDichotomy));
    }
    if lhs.len() == 2 {
        let (l1, l2) = (lhs[0], lhs[1]);
        if rhs_of(l1) == l2.difference(l1) && rhs_of(l2) == l1.difference(l2) {
            let side = [(l1, l2), (l2, l1)].into_iter().find(|(x, _)| x.is_subset(certain));
            return Some(match side {
                Some((x, y)) => {
                    Rule::mpd_poly(Theorem::MatchingDichotomy, SolverKind::Matching { x, y })
                }
                None => Rule::hard(Theorem::MatchingDichotomy),
            });
        }
    }
    let consensus = f.fds().iter().any(|fd| fd.is_consensus());
    if f.attrs().is_subset(uncertain) && !consensus {
        use Complexity::*;
        return Some(Rule {
            complexity: [NpHard, NpHard, NpHard],
            theorem: Some(Theorem::AllUncertain),
            solver: [None; 3],
        });
    }
    None
}

fn local_solver(rule: &Option<Rule>, problem: Problem) -> SolverKind {
    rule.as_ref().and_then(|r| r.solver[problem.index()]).unwrap_or(SolverKind::Exact)
}

/// Classifies the three problems for `fds` and attaches an executable plan
/// to each verdict.
pub fn classify(fds: &FdSet) -> Classification {
    let f = fds.normalize();
    let schema = f.schema().clone();
    let free = schema.all().difference(f.attrs());
    let decomposition = f.decompose();
    let parts: Vec<(FdSet, Option<Rule>)> = decomposition
        .components
        .into_iter()
        .map(|c| {
            let rule = set_rule(&c);
            (c, rule)
        })
        .collect();
    let decomposed_plan = |problem: Problem| Plan {
        steps: parts
            .iter()
            .map(|(c, rule)| PlanStep { fds: c.clone(), solver: local_solver(rule, problem) })
            .collect(),
        free,
    };
    let whole = set_rule(&f);
    let binary = schema.len() == 2;

    let verdict = |problem: Problem| -> Verdict {
        let i = problem.index();
        if let Some(rule) = &whole {
            let complexity = rule.complexity[i];
            let theorem = if binary && rule.theorem.is_some() {
                Some(Theorem::BinaryTable)
            } else {
                rule.theorem
            };
            let plan = match rule.solver[i] {
                Some(_) if f.is_empty() => Plan { steps: Vec::new(), free },
                Some(solver) => Plan { steps: vec![PlanStep { fds: f.clone(), solver }], free },
                None => decomposed_plan(problem),
            };
            return Verdict { complexity, theorem, plan };
        }
        let plan = decomposed_plan(problem);
        if plan.is_poly() {
            Verdict { complexity: Complexity::PolyTime, theorem: Some(Theorem::Decomposition), plan }
        } else {
            Verdict { complexity: Complexity::Unknown, theorem: None, plan }
        }
    };

    Classification {
        possibility: verdict(Problem::Possibility),
        mpd: verdict(Problem::Mpd),
        probability: verdict(Problem::Probability),
        equivalence_classes: f.equivalence_classes(),
        fds: f,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use std::sync::Arc;
    use Complexity::*;

    fn classify_text(names: &[&str], text: &str) -> Classification {
        let schema = Arc::new(Schema::parse_names(names).unwrap());
        classify(&FdSet::parse(schema, text).unwrap())
    }

    fn triple(c: &Classification) -> [Complexity; 3] {
        [c.possibility.complexity, c.mpd.complexity, c.probability.complexity]
    }

    #[test]
    fn binary_table() {
        let rows = [
            (["A", "B?"], "A -> B?", [PolyTime, PolyTime, PolyTime]),
            (["A?", "B"], "A? -> B", [NpHard, NpHard, SharpPHard]),
            (["A", "B?"], "A <-> B?", [PolyTime, PolyTime, SharpPHard]),
            (["A?", "B?"], "A? <-> B?", [NpHard, NpHard, SharpPHard]),
        ];
        for (names, text, expected) in rows {
            let c = classify_text(&names, text);
            assert_eq!(triple(&c), expected, "{text}");
            assert_eq!(c.mpd.theorem, Some(Theorem::BinaryTable));
        }
    }

    #[test]
    fn running_example_sets() {
        let c1 = classify(&fixtures::u1_f1());
        assert_eq!(triple(&c1), [NpHard, NpHard, SharpPHard]);
        assert_eq!(c1.possibility.theorem, Some(Theorem::SingletonDichotomy));
        assert!(!c1.mpd.plan.is_poly());

        let c2 = classify(&fixtures::u1_f2());
        assert_eq!(triple(&c2), [PolyTime, PolyTime, SharpPHard]);
        assert_eq!(c2.mpd.theorem, Some(Theorem::MatchingDichotomy));
        let schema = c2.fds.schema();
        let x: AttrSet = ["room", "time"].iter().map(|n| schema.attr(n).unwrap()).collect();
        let y: AttrSet = ["specialist", "time"].iter().map(|n| schema.attr(n).unwrap()).collect();
        assert_eq!(c2.mpd.plan.steps[0].solver, SolverKind::Matching { x, y });
    }

    #[test]
    fn unary_trichotomy_examples() {
        let f1 = classify_text(&["A", "B", "C?"], "A -> B -> C?");
        assert_eq!(triple(&f1), [PolyTime; 3]);
        let f2 = classify_text(&["A", "B?", "C"], "A -> B? -> C");
        assert_eq!(triple(&f2), [NpHard, NpHard, SharpPHard]);
        let f3 = classify_text(&["A", "B?", "C?"], "A <-> B? -> C?");
        assert_eq!(triple(&f3), [PolyTime, PolyTime, SharpPHard]);
        assert_eq!(f3.mpd.plan.steps[0].solver, SolverKind::UnaryTractable);

        let names = ["business", "spokesperson?", "location?"];
        let b1 = classify_text(&names, "business -> spokesperson? location?");
        assert_eq!(triple(&b1), [PolyTime; 3]);
        let b2 = classify_text(&names, "spokesperson? -> location?");
        assert_eq!(triple(&b2), [NpHard, NpHard, SharpPHard]);
        let b3 = classify_text(&names, "business <-> spokesperson? -> location?");
        assert_eq!(triple(&b3), [PolyTime, PolyTime, SharpPHard]);
    }

    #[test]
    fn whole_set_before_parts() {
        let c = classify_text(&["A?", "B", "C"], "A? -> B; B -> C; C -> A?");
        assert_eq!(c.mpd.complexity, PolyTime);
        // The probability plan still solves the certain FD on its own.
        assert_eq!(c.probability.plan.steps.len(), 2);
        let part = classify_text(&["A?", "B", "C"], "A? -> B; C -> A?");
        assert_eq!(part.possibility.complexity, NpHard);
    }

    #[test]
    fn decomposition_and_unknown() {
        // Non-unary, two independent tractable parts.
        let c = classify_text(&["A", "B", "C?", "D?"], "A B -> C?; D? -> A; A -> D?");
        assert_eq!(c.mpd.complexity, PolyTime);
        assert_eq!(c.mpd.theorem, Some(Theorem::Decomposition));
        assert_eq!(c.probability.complexity, Unknown);
        assert!(!c.probability.plan.is_poly());

        let all = classify_text(&["A?", "B?", "C?"], "A? B? -> C?; C? -> A?");
        assert_eq!(triple(&all), [NpHard, NpHard, NpHard]);
        assert_eq!(all.mpd.theorem, Some(Theorem::AllUncertain));

        let consensus = classify_text(&["A?", "B"], "{} -> A?");
        assert_eq!(triple(&consensus), [PolyTime; 3]);

        let empty = classify_text(&["A?", "B"], "");
        assert_eq!(triple(&empty), [PolyTime; 3]);
        assert!(empty.mpd.plan.steps.is_empty());
    }

    #[test]
    fn every_verdict_has_a_plan() {
        let c = classify_text(&["A?", "B", "C?"], "A? B -> C?; C? -> B");
        for p in Problem::ALL {
            let v = c.verdict(p);
            assert_eq!(v.plan.steps.iter().map(|s| s.fds.len()).sum::<usize>(), c.fds.len());
            if v.complexity == PolyTime {
                assert!(v.plan.is_poly());
            }
        }
    }
}

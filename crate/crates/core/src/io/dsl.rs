//! Text syntax for FD sets.
//!
//! ```text
//! specialist? time -> room; room time -> specialist?
//! A <-> B? -> C?          # chains expand pairwise
//! {} -> A?                # consensus FD
//! ```
//!
//! Rules are separated by `;` or newlines. Attribute names are separated by
//! whitespace or commas, and a trailing `?` marks an uncertain attribute; the
//! marking has to agree with the schema. `<->` expands to two FDs and `<-`
//! points right to left. `#` starts a comment.

use std::sync::Arc;

use thiserror::Error;

use crate::fd::{Fd, FdSet};
use crate::model::{AttrSet, Schema};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("rule {rule}: unknown attribute `{name}`")]
    UnknownAttribute { rule: usize, name: String },
    #[error("rule {rule}: `{name}` is {actual} in the schema but written as {written}")]
    MarkingMismatch { rule: usize, name: String, actual: &'static str, written: &'static str },
    #[error("rule {rule}: {message}")]
    Syntax { rule: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Arrow {
    Right,
    Left,
    Both,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Name(String),
    Empty,
    Arrow(Arrow),
}

fn tokenize(rule: usize, text: &str) -> Result<Vec<Token>, DslError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        if c.is_whitespace() || c == ',' {
            i += 1;
        } else if rest.starts_with("<->") {
            out.push(Token::Arrow(Arrow::Both));
            i += 3;
        } else if rest.starts_with("->") {
            out.push(Token::Arrow(Arrow::Right));
            i += 2;
        } else if rest.starts_with("<-") {
            out.push(Token::Arrow(Arrow::Left));
            i += 2;
        } else if rest.starts_with("{}") {
            out.push(Token::Empty);
            i += 2;
        } else if c == '{' || c == '}' || c == '<' || c == '>' {
            return Err(DslError::Syntax { rule, message: format!("unexpected `{c}`") });
        } else {
            let start = i;
            while i < chars.len() {
                let c = chars[i];
                let arrow_ahead = c == '-' && chars.get(i + 1) == Some(&'>');
                if c.is_whitespace() || c == ',' || c == '<' || c == '{' || arrow_ahead {
                    break;
                }
                i += 1;
            }
            out.push(Token::Name(chars[start..i].iter().collect()));
        }
    }
    Ok(out)
}

fn resolve(rule: usize, schema: &Schema, token: &str) -> Result<usize, DslError> {
    let (name, marked) = match token.strip_suffix('?') {
        Some(base) => (base, true),
        None => (token, false),
    };
    let attr = schema
        .lookup(name)
        .ok_or_else(|| DslError::UnknownAttribute { rule, name: name.to_string() })?;
    let uncertain = schema.is_uncertain(attr);
    if uncertain != marked {
        let label = |u: bool| if u { "uncertain" } else { "certain" };
        return Err(DslError::MarkingMismatch {
            rule,
            name: name.to_string(),
            actual: label(uncertain),
            written: label(marked),
        });
    }
    Ok(attr)
}

/// Parses DSL text into a normalized [`FdSet`] over `schema`.
pub fn parse_fds(text: &str, schema: Arc<Schema>) -> Result<FdSet, DslError> {
    let mut fds = Vec::new();
    let rules = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split(';'))
        .map(str::trim)
        .filter(|r| !r.is_empty());
    for (idx, rule_text) in rules.enumerate() {
        let rule = idx + 1;
        let tokens = tokenize(rule, rule_text)?;
        let mut groups: Vec<AttrSet> = vec![AttrSet::EMPTY];
        let mut group_seen = vec![false];
        let mut arrows: Vec<Arrow> = Vec::new();
        for tok in tokens {
            let last = groups.len() - 1;
            match tok {
                Token::Name(n) => {
                    let a = resolve(rule, &schema, &n)?;
                    groups[last].insert(a);
                    group_seen[last] = true;
                }
                Token::Empty => {
                    if group_seen[last] {
                        return Err(DslError::Syntax {
                            rule,
                            message: "`{}` must stand alone".to_string(),
                        });
                    }
                    group_seen[last] = true;
                }
                Token::Arrow(a) => {
                    arrows.push(a);
                    groups.push(AttrSet::EMPTY);
                    group_seen.push(false);
                }
            }
        }
        if arrows.is_empty() {
            return Err(DslError::Syntax { rule, message: "missing arrow".to_string() });
        }
        if let Some(pos) = group_seen.iter().position(|s| !s) {
            let message = if pos == 0 {
                "empty left side (write `{}` for a consensus FD)".to_string()
            } else {
                "dangling arrow".to_string()
            };
            return Err(DslError::Syntax { rule, message });
        }
        for (i, arrow) in arrows.iter().enumerate() {
            let (left, right) = (groups[i], groups[i + 1]);
            match arrow {
                Arrow::Right => fds.push(Fd::new(left, right)),
                Arrow::Left => fds.push(Fd::new(right, left)),
                Arrow::Both => {
                    fds.push(Fd::new(left, right));
                    fds.push(Fd::new(right, left));
                }
            }
        }
    }
    Ok(FdSet::new(schema, fds).normalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn schema(names: &[&str]) -> Arc<Schema> {
        Arc::new(Schema::parse_names(names).unwrap())
    }

    #[test]
    fn running_example_sets() {
        let u1 = fixtures::u1();
        let f1 = parse_fds("specialist? time -> room", u1.schema().clone()).unwrap();
        assert_eq!(f1.len(), 1);
        assert_eq!(f1.to_dsl(), "specialist? time -> room");
        let f2 =
            parse_fds("specialist? time -> room; room time -> specialist?", u1.schema().clone())
                .unwrap();
        assert_eq!(f2.len(), 2);
    }

    #[test]
    fn biarrow_and_chains() {
        let s = schema(&["A", "B"]);
        assert_eq!(parse_fds("A <-> B", s.clone()).unwrap().to_dsl(), "A -> B; B -> A");
        let s3 = schema(&["A", "B?", "C?"]);
        let f = parse_fds("A <-> B? -> C?", s3.clone()).unwrap();
        assert_eq!(f.len(), 3);
        let g = parse_fds("B? <- A\nB? -> A, C?", s3).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn consensus() {
        let s = schema(&["A?", "B"]);
        let f = parse_fds("{} -> A?", s).unwrap();
        assert_eq!(f.len(), 1);
        assert!(f.fds()[0].is_consensus());
    }

    #[test]
    fn errors() {
        let s = schema(&["A", "B?"]);
        assert!(matches!(
            parse_fds("A -> C", s.clone()),
            Err(DslError::UnknownAttribute { rule: 1, .. })
        ));
        assert!(matches!(
            parse_fds("A? -> B?", s.clone()),
            Err(DslError::MarkingMismatch { .. })
        ));
        assert!(matches!(parse_fds("A -> B", s.clone()), Err(DslError::MarkingMismatch { .. })));
        assert!(matches!(parse_fds("A B?", s.clone()), Err(DslError::Syntax { .. })));
        assert!(matches!(parse_fds("-> B?", s.clone()), Err(DslError::Syntax { .. })));
        assert!(matches!(parse_fds("A ->", s.clone()), Err(DslError::Syntax { .. })));
        assert!(matches!(parse_fds("A -> B?; A ->", s), Err(DslError::Syntax { rule: 2, .. })));
    }

    #[test]
    fn comments_and_blank_rules() {
        let s = schema(&["A", "B?"]);
        let f = parse_fds("# header\nA -> B?; ;\n", s).unwrap();
        assert_eq!(f.len(), 1);
    }
}

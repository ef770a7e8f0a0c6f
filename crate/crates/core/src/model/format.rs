//! The canonical line-oriented model file format.
//!
//! ```text
//! agents: 2
//! states: q0 q1
//! actions: a b c
//! label q1: p
//! avail 1 q0: a b
//! trans q0 (a,c) -> q0
//! indist 1: {q0 q1}
//! ```
//!
//! `props:` optionally declares propositions up front; otherwise they are
//! declared by first use in a `label` line. Declarations may appear in any
//! order. `#` starts a comment.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::{Model, ModelParts};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok<'a> {
    Word(&'a str),
    Punct(&'static str),
}

struct Line<'a> {
    no: usize,
    toks: Vec<(usize, Tok<'a>)>,
    end_col: usize,
}

fn tokenize(no: usize, text: &str) -> Result<Line<'_>> {
    let body = match text.find('#') {
        Some(i) => &text[..i],
        None => text,
    };
    let mut toks = Vec::new();
    let bytes = body.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
            let start = i;
            while i < bytes.len() {
                let d = bytes[i] as char;
                if d.is_ascii_alphanumeric() || d == '_' || d == '\'' {
                    i += 1;
                } else {
                    break;
                }
            }
            toks.push((start + 1, Tok::Word(&body[start..i])));
        } else if body[i..].starts_with("->") {
            toks.push((i + 1, Tok::Punct("->")));
            i += 2;
        } else {
            let p = match c {
                ':' => ":",
                '(' => "(",
                ')' => ")",
                ',' => ",",
                '{' => "{",
                '}' => "}",
                _ => {
                    return Err(Error::Syntax {
                        line: no,
                        column: i + 1,
                        message: format!("unexpected character `{c}`"),
                    })
                }
            };
            toks.push((i + 1, Tok::Punct(p)));
            i += 1;
        }
    }
    Ok(Line {
        no,
        toks,
        end_col: body.len() + 1,
    })
}

struct Cursor<'l, 'a> {
    line: &'l Line<'a>,
    pos: usize,
}

impl<'l, 'a> Cursor<'l, 'a> {
    fn err(&self, message: impl Into<String>) -> Error {
        let column = self
            .line
            .toks
            .get(self.pos)
            .map(|t| t.0)
            .unwrap_or(self.line.end_col);
        Error::Syntax {
            line: self.line.no,
            column,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<&Tok<'a>> {
        self.line.toks.get(self.pos).map(|t| &t.1)
    }

    fn word(&mut self, what: &str) -> Result<&'a str> {
        match self.peek() {
            Some(Tok::Word(w)) => {
                let w = *w;
                self.pos += 1;
                Ok(w)
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn punct(&mut self, p: &'static str) -> Result<()> {
        match self.peek() {
            Some(Tok::Punct(q)) if *q == p => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err(format!("expected `{p}`"))),
        }
    }

    fn eat(&mut self, p: &'static str) -> bool {
        if matches!(self.peek(), Some(Tok::Punct(q)) if *q == p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.line.toks.len()
    }

    fn end(&self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.err("unexpected trailing input"))
        }
    }

    fn rest_words(&mut self, what: &str) -> Result<Vec<&'a str>> {
        let mut out = Vec::new();
        while !self.at_end() {
            out.push(self.word(what)?);
        }
        Ok(out)
    }
}

fn declare(names: &mut Vec<String>, name: &str, line: usize, kind: &'static str) -> Result<()> {
    if names.iter().any(|n| n == name) {
        return Err(Error::Duplicate {
            line,
            kind,
            name: name.to_string(),
        });
    }
    names.push(name.to_string());
    Ok(())
}

fn lookup(names: &[String], name: &str, line: usize, kind: &'static str) -> Result<usize> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| Error::UnknownIdentifier {
            line,
            kind,
            name: name.to_string(),
        })
}

/// Parses the canonical model format. Only reference well-formedness is checked;
/// structural constraints are left to [`super::validate_model`].
pub fn parse_model(text: &str) -> Result<Model> {
    let lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| tokenize(i + 1, l))
        .collect::<Result<Vec<_>>>()?;

    let mut num_agents = None;
    let mut states = Vec::new();
    let mut actions = Vec::new();
    let mut props = Vec::new();

    // Declarations first so that the remaining sections may appear in any order.
    for line in lines.iter().filter(|l| !l.toks.is_empty()) {
        let mut c = Cursor { line, pos: 0 };
        let head = c.word("a section keyword")?;
        if !matches!(head, "agents" | "states" | "actions" | "props") {
            continue;
        }
        c.punct(":")?;
        match head {
            "agents" => {
                if num_agents.is_some() {
                    return Err(Error::Duplicate {
                        line: line.no,
                        kind: "declaration",
                        name: "agents".into(),
                    });
                }
                let w = c.word("agent count")?;
                let k: usize = w.parse().map_err(|_| c.err("agent count must be a number"))?;
                if k == 0 {
                    return Err(c.err("at least one agent is required"));
                }
                c.end()?;
                num_agents = Some(k);
            }
            "states" => {
                for w in c.rest_words("state name")? {
                    declare(&mut states, w, line.no, "state")?;
                }
            }
            "actions" => {
                for w in c.rest_words("action name")? {
                    declare(&mut actions, w, line.no, "action")?;
                }
            }
            _ => {
                for w in c.rest_words("proposition name")? {
                    declare(&mut props, w, line.no, "proposition")?;
                }
            }
        }
    }
    let num_agents = num_agents.ok_or(Error::Syntax {
        line: 1,
        column: 1,
        message: "missing `agents:` declaration".into(),
    })?;
    if states.is_empty() {
        return Err(Error::Syntax {
            line: 1,
            column: 1,
            message: "missing `states:` declaration".into(),
        });
    }

    let n = states.len();
    let mut labels: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut labelled = BTreeSet::new();
    let mut avail: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); n]; num_agents];
    let mut avail_seen = BTreeSet::new();
    let mut trans = BTreeMap::new();
    let mut indist: Vec<Vec<Vec<usize>>> = vec![Vec::new(); num_agents];
    let mut indist_seen = BTreeSet::new();

    let agent_of = |c: &mut Cursor| -> Result<usize> {
        let w = c.word("agent number")?;
        match w.parse::<usize>() {
            Ok(i) if (1..=num_agents).contains(&i) => Ok(i - 1),
            _ => Err(Error::UnknownIdentifier {
                line: c.line.no,
                kind: "agent",
                name: w.to_string(),
            }),
        }
    };

    for line in lines.iter().filter(|l| !l.toks.is_empty()) {
        let mut c = Cursor { line, pos: 0 };
        let head = c.word("a section keyword")?;
        match head {
            "agents" | "states" | "actions" | "props" => {}
            "label" => {
                let q = lookup(&states, c.word("state name")?, line.no, "state")?;
                c.punct(":")?;
                if !labelled.insert(q) {
                    return Err(Error::Duplicate {
                        line: line.no,
                        kind: "label line for state",
                        name: states[q].clone(),
                    });
                }
                for w in c.rest_words("proposition name")? {
                    if !props.iter().any(|p| p == w) {
                        props.push(w.to_string());
                    }
                    labels[q].push(lookup(&props, w, line.no, "proposition")?);
                }
            }
            "avail" => {
                let i = agent_of(&mut c)?;
                let q = lookup(&states, c.word("state name")?, line.no, "state")?;
                c.punct(":")?;
                if !avail_seen.insert((i, q)) {
                    return Err(Error::Duplicate {
                        line: line.no,
                        kind: "avail line",
                        name: format!("{} {}", i + 1, states[q]),
                    });
                }
                for w in c.rest_words("action name")? {
                    avail[i][q].push(lookup(&actions, w, line.no, "action")?);
                }
            }
            "trans" => {
                let q = lookup(&states, c.word("state name")?, line.no, "state")?;
                c.punct("(")?;
                let mut prof = Vec::new();
                loop {
                    prof.push(lookup(&actions, c.word("action name")?, line.no, "action")?);
                    if !c.eat(",") {
                        break;
                    }
                }
                c.punct(")")?;
                if prof.len() != num_agents {
                    return Err(c.err(format!(
                        "action profile has {} entries, expected {num_agents}",
                        prof.len()
                    )));
                }
                c.punct("->")?;
                let t = lookup(&states, c.word("state name")?, line.no, "state")?;
                c.end()?;
                if trans.insert((q, prof), t).is_some() {
                    return Err(Error::Duplicate {
                        line: line.no,
                        kind: "transition",
                        name: format!("from {}", states[q]),
                    });
                }
            }
            "indist" => {
                let i = agent_of(&mut c)?;
                c.punct(":")?;
                if !indist_seen.insert(i) {
                    return Err(Error::Duplicate {
                        line: line.no,
                        kind: "indist line for agent",
                        name: (i + 1).to_string(),
                    });
                }
                while !c.at_end() {
                    c.punct("{")?;
                    let mut block = Vec::new();
                    while !c.eat("}") {
                        c.eat(",");
                        if c.eat("}") {
                            break;
                        }
                        block.push(lookup(&states, c.word("state name")?, line.no, "state")?);
                    }
                    indist[i].push(block);
                }
            }
            other => {
                return Err(Error::Syntax {
                    line: line.no,
                    column: line.toks[0].0,
                    message: format!("unknown section `{other}`"),
                })
            }
        }
    }

    Model::from_parts(ModelParts {
        num_agents,
        states,
        actions,
        props,
        labels,
        avail,
        trans,
        indist,
    })
}

/// Writes a model in canonical form; `parse_model(write_model(m)) == m`.
pub fn write_model(m: &Model) -> String {
    let p = m.parts();
    let mut out = String::new();
    let _ = writeln!(out, "agents: {}", p.num_agents);
    let _ = writeln!(out, "states: {}", p.states.join(" "));
    let _ = writeln!(out, "actions: {}", p.actions.join(" "));
    if !p.props.is_empty() {
        let _ = writeln!(out, "props: {}", p.props.join(" "));
    }
    for (q, ls) in p.labels.iter().enumerate() {
        if !ls.is_empty() {
            let names: Vec<_> = ls.iter().map(|&l| p.props[l].as_str()).collect();
            let _ = writeln!(out, "label {}: {}", p.states[q], names.join(" "));
        }
    }
    for (i, per_state) in p.avail.iter().enumerate() {
        for (q, acts) in per_state.iter().enumerate() {
            let names: Vec<_> = acts.iter().map(|&a| p.actions[a].as_str()).collect();
            let sep = if names.is_empty() { "" } else { " " };
            let _ = writeln!(out, "avail {} {}:{sep}{}", i + 1, p.states[q], names.join(" "));
        }
    }
    for ((q, prof), t) in &p.trans {
        let _ = writeln!(out, "trans {} {} -> {}", p.states[*q], m.format_profile(prof), p.states[*t]);
    }
    for (i, blocks) in p.indist.iter().enumerate() {
        if blocks.is_empty() {
            continue;
        }
        let bs: Vec<String> = blocks
            .iter()
            .map(|b| {
                let names: Vec<_> = b.iter().map(|&q| p.states[q].as_str()).collect();
                format!("{{{}}}", names.join(" "))
            })
            .collect();
        let _ = writeln!(out, "indist {}: {}", i + 1, bs.join(" "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn parses_fixture_m1() {
        let m = parse_model(fixtures::M1_TEXT).unwrap();
        assert_eq!(m.num_states(), 2);
        assert_eq!(m.num_agents(), 1);
        assert_eq!(m.num_actions(), 2);
        assert!(m.holds(1, m.prop_id("p").unwrap()));
    }

    #[test]
    fn parses_fixture_m2_partition() {
        let m = parse_model(fixtures::M2_TEXT).unwrap();
        assert_eq!(m.block(0, 0), crate::bitset::StateSet::full(2));
        assert_eq!(m.block(1, 0), crate::bitset::StateSet::singleton(0));
    }

    #[test]
    fn unknown_state_in_trans() {
        let text = fixtures::M1_TEXT.replace("trans q1 (a) -> q1", "trans q1 (a) -> q9");
        let err = parse_model(&text).unwrap_err();
        assert!(
            matches!(&err, Error::UnknownIdentifier { kind: "state", name, .. } if name == "q9"),
            "{err}"
        );
        assert!(err.to_string().contains("unknown state"));
    }

    #[test]
    fn syntax_error_reports_position() {
        let err = parse_model("agents: 1\nstates: q0\nactions: a\ntrans q0 a -> q0\n").unwrap_err();
        assert_eq!(
            err,
            Error::Syntax {
                line: 4,
                column: 10,
                message: "expected `(`".into()
            }
        );
    }

    #[test]
    fn duplicate_declarations_rejected() {
        let err = parse_model("agents: 1\nstates: q0 q0\nactions: a\n").unwrap_err();
        assert!(matches!(err, Error::Duplicate { kind: "state", .. }));
    }

    #[test]
    fn canonical_round_trip_on_fixtures() {
        for text in [fixtures::M1_TEXT, fixtures::M2_TEXT] {
            let m = parse_model(text).unwrap();
            let again = parse_model(&write_model(&m)).unwrap();
            assert_eq!(m, again);
        }
    }
}

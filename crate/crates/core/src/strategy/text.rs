use super::PositionalStrategy;
use crate::error::{Error, Result};
use crate::model::{Coalition, Model};

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column: 1,
        message: message.into(),
    }
}

fn parse_coalition(line: usize, text: &str) -> Result<Coalition> {
    let inner = text
        .trim()
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| syntax(line, "expected `{agents}`"))?;
    let agents = inner
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| match s.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n - 1),
            _ => Err(syntax(line, format!("bad agent number `{s}`"))),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Coalition::new(agents))
}

/// Parses `positional for {1,2}: q0 -> a,c; q1 -> a,c` (entries separated by `;` or newlines).
pub fn parse_positional(m: &Model, text: &str) -> Result<PositionalStrategy> {
    let mut coalition: Option<Coalition> = None;
    let mut table: Vec<Option<Vec<usize>>> = vec![None; m.num_states()];
    for (no, raw) in text.lines().enumerate() {
        let line_no = no + 1;
        let mut line = raw.split('#').next().unwrap_or("");
        if coalition.is_none() {
            if line.trim().is_empty() {
                continue;
            }
            let rest = line
                .trim_start()
                .strip_prefix("positional")
                .and_then(|r| r.trim_start().strip_prefix("for"))
                .ok_or_else(|| syntax(line_no, "expected `positional for {agents}:`"))?;
            let colon = rest.find(':').ok_or_else(|| syntax(line_no, "expected `:`"))?;
            let c = parse_coalition(line_no, &rest[..colon])?;
            if let Some(&i) = c.members().iter().find(|&&i| i >= m.num_agents()) {
                return Err(Error::UnknownIdentifier {
                    line: line_no,
                    kind: "agent",
                    name: (i + 1).to_string(),
                });
            }
            coalition = Some(c);
            line = &rest[colon + 1..];
        }
        let c = coalition.as_ref().unwrap();
        for entry in line.split(';').map(str::trim).filter(|e| !e.is_empty()) {
            let (state, acts) = entry
                .split_once("->")
                .ok_or_else(|| syntax(line_no, format!("expected `state -> actions` in `{entry}`")))?;
            let state = state.trim();
            let q = m.state_id(state).ok_or_else(|| Error::UnknownIdentifier {
                line: line_no,
                kind: "state",
                name: state.to_string(),
            })?;
            let acts = acts
                .split(|ch: char| ch == ',' || ch.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|a| {
                    m.action_id(a).ok_or_else(|| Error::UnknownIdentifier {
                        line: line_no,
                        kind: "action",
                        name: a.to_string(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            if acts.len() != c.len() {
                return Err(syntax(
                    line_no,
                    format!("expected {} actions for {state}, got {}", c.len(), acts.len()),
                ));
            }
            if table[q].replace(acts).is_some() {
                return Err(Error::Duplicate {
                    line: line_no,
                    kind: "state",
                    name: state.to_string(),
                });
            }
        }
    }
    let coalition = coalition.ok_or_else(|| syntax(1, "expected `positional for {agents}:`"))?;
    let table = table
        .into_iter()
        .enumerate()
        .map(|(q, row)| {
            row.ok_or_else(|| Error::Invalid(format!("no entry for state {}", m.state_name(q))))
        })
        .collect::<Result<Vec<_>>>()?;
    PositionalStrategy::new(m, coalition, table)
}

pub fn write_positional(m: &Model, s: &PositionalStrategy) -> String {
    let entries: Vec<String> = (0..m.num_states())
        .map(|q| {
            let acts: Vec<_> = s.at(q).iter().map(|&a| m.action_name(a)).collect();
            format!("{} -> {}", m.state_name(q), acts.join(","))
        })
        .collect();
    format!("positional for {}: {}\n", s.coalition, entries.join("; "))
}

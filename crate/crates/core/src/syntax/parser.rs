use std::collections::BTreeMap;

use super::{ActionAtom, Formula, RuleStrategy};
use crate::error::{Error, Result};
use crate::model::{AgentId, Coalition};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(usize),
    Sym(&'static str),
    End,
}

struct Lexer {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    line: usize,
    col_offset: usize,
}

const SYMBOLS: [&str; 15] = [
    "<->", "->", "=>", "~", "&", "|", "(", ")", "{", "}", "[", "]", ":", ",", ";",
];

impl Lexer {
    fn new(text: &str, line: usize, col_offset: usize) -> Result<Lexer> {
        let mut toks = Vec::new();
        let mut i = 0;
        let chars: Vec<char> = text.chars().collect();
        'outer: while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let n = s.parse().map_err(|_| Error::Syntax {
                    line,
                    column: col_offset + start + 1,
                    message: "number too large".into(),
                })?;
                toks.push((start, Tok::Nat(n)));
                continue;
            }
            if c.is_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                    i += 1;
                }
                toks.push((start, Tok::Ident(chars[start..i].iter().collect())));
                continue;
            }
            for sym in SYMBOLS {
                let len = sym.chars().count();
                if i + len <= chars.len() && chars[i..i + len].iter().copied().eq(sym.chars()) {
                    toks.push((i, Tok::Sym(sym)));
                    i += len;
                    continue 'outer;
                }
            }
            return Err(Error::Syntax {
                line,
                column: col_offset + i + 1,
                message: format!("unexpected character `{c}`"),
            });
        }
        toks.push((chars.len(), Tok::End));
        Ok(Lexer {
            toks,
            pos: 0,
            line,
            col_offset,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            line: self.line,
            column: self.col_offset + self.toks[self.pos].0 + 1,
            message: message.into(),
        }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{s}`")))
        }
    }

    fn is_ident(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(t) if t == s)
    }

    fn agent(&mut self) -> Result<AgentId> {
        match self.peek().clone() {
            Tok::Nat(0) => Err(self.err("agents are numbered from 1")),
            Tok::Nat(n) => {
                self.bump();
                Ok(n - 1)
            }
            _ => Err(self.err("expected agent number")),
        }
    }

    fn coalition(&mut self) -> Result<Coalition> {
        self.expect("{")?;
        let mut agents = Vec::new();
        while !self.eat("}") {
            if !agents.is_empty() {
                self.eat(",");
            }
            agents.push(self.agent()?);
        }
        Ok(Coalition::new(agents))
    }

    fn iff(&mut self) -> Result<Formula> {
        let mut lhs = self.implication()?;
        while self.eat("<->") {
            let rhs = self.implication()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if self.eat("->") {
            let rhs = self.implication()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut lhs = self.conjunction()?;
        while self.eat("|") {
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut lhs = self.unary()?;
        while self.eat("&") {
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.eat("~") {
            return Ok(Formula::not(self.unary()?));
        }
        if self.eat("[") {
            if !self.is_ident("sstit") {
                return Err(self.err("expected `sstit`"));
            }
            self.bump();
            let c = self.coalition()?;
            self.expect("]")?;
            return Ok(Formula::sstit(c, self.unary()?));
        }
        if let Tok::Ident(word) = self.peek().clone() {
            let ctor: Option<fn(Formula) -> Formula> = match word.as_str() {
                "X" => Some(Formula::next),
                "G" => Some(Formula::globally),
                "F" => Some(Formula::eventually),
                "box" => Some(Formula::nec),
                "dia" => Some(Formula::pos),
                _ => None,
            };
            if let Some(ctor) = ctor {
                self.bump();
                return Ok(ctor(self.unary()?));
            }
            if word == "K" {
                self.bump();
                self.expect("{")?;
                let i = self.agent()?;
                self.expect("}")?;
                return Ok(Formula::knows(i, self.unary()?));
            }
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::Sym("(") => {
                self.bump();
                let f = self.iff()?;
                self.expect(")")?;
                Ok(f)
            }
            Tok::Ident(w) if w == "true" => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::Ident(w) if w == "false" => {
                self.bump();
                Ok(Formula::bottom())
            }
            Tok::Ident(w) if w == "act" => {
                self.bump();
                self.expect("{")?;
                let mut bindings = BTreeMap::new();
                loop {
                    let i = self.agent()?;
                    self.expect(":")?;
                    let a = match self.bump() {
                        Tok::Ident(a) => a,
                        _ => return Err(self.err("expected action name")),
                    };
                    if bindings.insert(i, a).is_some() {
                        return Err(self.err(format!("agent {} bound twice", i + 1)));
                    }
                    if !self.eat(",") {
                        break;
                    }
                }
                self.expect("}")?;
                Ok(Formula::Act(ActionAtom(bindings)))
            }
            Tok::Ident(w) if is_reserved(&w) => Err(self.err(format!("`{w}` is a reserved word"))),
            Tok::Ident(w) => {
                self.bump();
                Ok(Formula::Prop(w))
            }
            Tok::End => Err(self.err("unexpected end of input")),
            _ => Err(self.err("expected a formula")),
        }
    }
}

pub(crate) fn is_reserved(w: &str) -> bool {
    matches!(
        w,
        "X" | "G" | "F" | "K" | "box" | "dia" | "act" | "true" | "false" | "sstit"
    )
}

fn parse_formula_at(text: &str, line: usize, col_offset: usize) -> Result<Formula> {
    let mut lx = Lexer::new(text, line, col_offset)?;
    let f = lx.iff()?;
    if *lx.peek() != Tok::End {
        return Err(lx.err("unexpected trailing input"));
    }
    Ok(f)
}

/// Parses a formula; derived connectives (`|`, `->`, `<->`, `F`, `dia`, `false`) are desugared.
pub fn parse_formula(text: &str) -> Result<Formula> {
    parse_formula_at(text, 1, 0)
}

/// Parses `strategy for {C}: cond => effect; ...` (rules separated by `;` or newlines).
pub fn parse_rules(text: &str) -> Result<RuleStrategy> {
    let mut rest_line = 0;
    let mut coalition = None;
    let mut rules = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let mut body = line;
        let mut offset = 0;
        if coalition.is_none() {
            if line.trim().is_empty() {
                continue;
            }
            let colon = line.find(':').ok_or(Error::Syntax {
                line: no + 1,
                column: 1,
                message: "expected `strategy for {agents}:`".into(),
            })?;
            let mut lx = Lexer::new(&line[..colon], no + 1, 0)?;
            if !lx.is_ident("strategy") {
                return Err(lx.err("expected `strategy`"));
            }
            lx.bump();
            if !lx.is_ident("for") {
                return Err(lx.err("expected `for`"));
            }
            lx.bump();
            coalition = Some(lx.coalition()?);
            if *lx.peek() != Tok::End {
                return Err(lx.err("expected `:`"));
            }
            body = &line[colon + 1..];
            offset = colon + 1;
            rest_line = no + 1;
        }
        let mut chunk_start = offset;
        for chunk in body.split(';') {
            if !chunk.trim().is_empty() {
                let arrow = chunk.find("=>").ok_or(Error::Syntax {
                    line: no + 1,
                    column: chunk_start + 1,
                    message: "expected `condition => effect`".into(),
                })?;
                let condition = parse_formula_at(&chunk[..arrow], no + 1, chunk_start)?;
                let effect = parse_formula_at(&chunk[arrow + 2..], no + 1, chunk_start + arrow + 2)?;
                rules.push((condition, effect));
            }
            chunk_start += chunk.len() + 1;
        }
    }
    let coalition = coalition.ok_or(Error::Syntax {
        line: rest_line.max(1),
        column: 1,
        message: "expected `strategy for {agents}:`".into(),
    })?;
    if rules.is_empty() {
        return Err(Error::EmptyRuleList);
    }
    Ok(RuleStrategy::new(coalition, rules))
}

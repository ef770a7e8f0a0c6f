use std::fmt;

use super::{ActionAtom, Formula, RuleStrategy};

// Binding strength, loosest first.
const IFF: u8 = 0;
const IMP: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;

enum View<'a> {
    Implies(&'a Formula, &'a Formula),
    Or(&'a Formula, &'a Formula),
    Eventually(&'a Formula),
    Dia(&'a Formula),
    False,
    Plain,
}

fn neg(f: &Formula) -> Option<&Formula> {
    match f {
        Formula::Not(a) => Some(a),
        _ => None,
    }
}

fn view(f: &Formula) -> View<'_> {
    let Formula::Not(inner) = f else {
        return View::Plain;
    };
    match inner.as_ref() {
        Formula::Top => View::False,
        Formula::Globally(a) => neg(a).map_or(View::Plain, View::Eventually),
        Formula::Nec(a) => neg(a).map_or(View::Plain, View::Dia),
        Formula::And(a, b) => match (neg(a), neg(b)) {
            (Some(x), Some(y)) => View::Or(x, y),
            (_, Some(y)) => View::Implies(a, y),
            _ => View::Plain,
        },
        _ => View::Plain,
    }
}

fn level(f: &Formula) -> u8 {
    match view(f) {
        View::Implies(..) => IMP,
        View::Or(..) => OR,
        _ => match f {
            Formula::And(..) => AND,
            _ => UNARY,
        },
    }
}

fn write_at(out: &mut fmt::Formatter<'_>, f: &Formula, min: u8) -> fmt::Result {
    if level(f) < min {
        write!(out, "(")?;
        write_formula(out, f)?;
        write!(out, ")")
    } else {
        write_formula(out, f)
    }
}

fn write_formula(out: &mut fmt::Formatter<'_>, f: &Formula) -> fmt::Result {
    match view(f) {
        View::Implies(a, b) => {
            write_at(out, a, IMP + 1)?;
            write!(out, " -> ")?;
            return write_at(out, b, IMP);
        }
        View::Or(a, b) => {
            write_at(out, a, OR)?;
            write!(out, " | ")?;
            return write_at(out, b, OR + 1);
        }
        View::Eventually(a) => {
            write!(out, "F ")?;
            return write_at(out, a, UNARY);
        }
        View::Dia(a) => {
            write!(out, "dia ")?;
            return write_at(out, a, UNARY);
        }
        View::False => return write!(out, "false"),
        View::Plain => {}
    }
    match f {
        Formula::Top => write!(out, "true"),
        Formula::Prop(p) => write!(out, "{p}"),
        Formula::Act(a) => write!(out, "{a}"),
        Formula::And(a, b) => {
            write_at(out, a, AND)?;
            write!(out, " & ")?;
            write_at(out, b, AND + 1)
        }
        Formula::Not(a) => {
            write!(out, "~")?;
            write_at(out, a, UNARY)
        }
        Formula::Next(a) => {
            write!(out, "X ")?;
            write_at(out, a, UNARY)
        }
        Formula::Globally(a) => {
            write!(out, "G ")?;
            write_at(out, a, UNARY)
        }
        Formula::Nec(a) => {
            write!(out, "box ")?;
            write_at(out, a, UNARY)
        }
        Formula::Sstit(c, a) => {
            write!(out, "[sstit {c}] ")?;
            write_at(out, a, UNARY)
        }
        Formula::Knows(i, a) => {
            write!(out, "K{{{}}} ", i + 1)?;
            write_at(out, a, UNARY)
        }
    }
}

impl fmt::Display for ActionAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "act{{")?;
        for (k, (i, a)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}:{a}", i + 1)?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_at(f, self, IFF)
    }
}

impl fmt::Display for RuleStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "strategy for {}:", self.coalition)?;
        for r in &self.rules {
            writeln!(f, "  {} => {}", r.condition, r.effect)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use crate::syntax::{parse_formula, parse_rules};

    fn canon(s: &str) -> String {
        parse_formula(s).unwrap().to_string()
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(canon("box   G p"), "box G p");
        assert_eq!(canon("K{1}~p"), "K{1} ~p");
        assert_eq!(canon("act{2:b, 1:a}"), "act{1:a,2:b}");
        assert_eq!(canon("[sstit {2 1}] p"), "[sstit {1,2}] p");
        assert_eq!(canon("p -> q -> r"), "p -> q -> r");
        // Same tree as `(p -> q) -> r`; the disjunction reading wins.
        assert_eq!(canon("(p -> q) -> r"), "p & ~q | r");
        assert_eq!(canon("(p -> q) & r"), "(p -> q) & r");
        assert_eq!(canon("p | (q | r)"), "p | (q | r)");
        assert_eq!(canon("p | q | r"), "p | q | r");
        assert_eq!(canon("~(p & q)"), "~(p & q)");
        assert_eq!(canon("F dia false"), "F dia false");
        assert_eq!(canon("K{1} (p | ~p)"), "K{1} (p | ~p)");
    }

    #[test]
    fn rules_round_trip() {
        let text = "strategy for {1}: ~p => act{1:b}; p => act{1:a}";
        let rs = parse_rules(text).unwrap();
        assert_eq!(parse_rules(&rs.to_string()).unwrap(), rs);
    }
}

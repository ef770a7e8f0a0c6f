//! The two reference models and the rule sets used throughout the tests and docs.

use crate::model::{parse_model, Model};
use crate::syntax::{parse_rules, RuleStrategy};

pub const M1_TEXT: &str = include_str!("../fixtures/m1.cegm");
pub const M2_TEXT: &str = include_str!("../fixtures/m2.cegm");

pub const RS1_TEXT: &str = include_str!("../fixtures/rs1.rules");
pub const RS2_TEXT: &str = include_str!("../fixtures/rs2.rules");
pub const RS3_TEXT: &str = include_str!("../fixtures/rs3.rules");
pub const RS4_TEXT: &str = include_str!("../fixtures/rs4.rules");

pub fn m1() -> Model {
    parse_model(M1_TEXT).expect("fixture M1 parses")
}

pub fn m2() -> Model {
    parse_model(M2_TEXT).expect("fixture M2 parses")
}

/// RS1..RS4 over M1, by number.
pub fn rs(n: usize) -> RuleStrategy {
    let text = match n {
        1 => RS1_TEXT,
        2 => RS2_TEXT,
        3 => RS3_TEXT,
        4 => RS4_TEXT,
        _ => panic!("no fixture rule set RS{n}"),
    };
    parse_rules(text).expect("fixture rules parse")
}

pub const NEG_POSITIONAL_TEXT: &str = include_str!("../fixtures/neg_positional.cegm");
pub const NEG_POSITIONAL_STRATEGY: &str = include_str!("../fixtures/neg_positional.pos");
pub const NEG_UNIFORM_TEXT: &str = include_str!("../fixtures/neg_uniform.cegm");
pub const NEG_UNIFORM_STRATEGY: &str = include_str!("../fixtures/neg_uniform.pos");

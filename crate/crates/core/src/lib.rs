//! Model checking and rule-strategy compilation for strategic STIT logic with knowledge
//! over concurrent epistemic game models.

pub mod bitset;
pub mod epistemic;
pub mod error;
pub mod eval;
pub mod fixtures;
pub mod model;
pub mod oracle;
pub mod repr;
pub mod strategy;
pub mod syntax;

pub use bitset::StateSet;
pub use error::{Error, Result};
pub use eval::{
    eval_acc, eval_bounded, eval_exact, eval_perf, EvalPoint, ExactEvaluator, RuleEvaluator,
    Verdict,
};
pub use model::{
    parse_model, validate_model, write_model, ActionId, AgentId, Coalition, Diagnostic, History,
    Lasso, Model, ModelParts, PropId, StateId,
};
pub use syntax::{
    classify_condition_fragment, is_moment_determinate_syntactic, parse_formula, parse_rules,
    ActionAtom, FragmentTag, Formula, Rule, RuleStrategy,
};
pub use oracle::{enumerate_models, enumerate_strategies, oracle_eval, EnumBounds};
pub use strategy::{
    PartialStrategy, PositionalStrategy, Profile, Status, Strategy, TreeStrategy,
};

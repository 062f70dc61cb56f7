//! JSON form of derivation trees.
//!
//! ```json
//! {"rule": "/L", "positions": [0, 1], "conclusion": "p/q, q -> p",
//!  "premises": [ ... ]}
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Derivation, RuleTag};
use crate::syntax::{parse_sequent_internal, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationNode {
    pub rule: String,
    #[serde(default)]
    pub positions: Vec<usize>,
    pub conclusion: String,
    #[serde(default)]
    pub premises: Vec<DerivationNode>,
}

#[derive(Debug, Error)]
pub enum SerialError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("rule `{rule}` takes {expected} position(s), got {got}")]
    Positions {
        rule: String,
        expected: usize,
        got: usize,
    },
    #[error("conclusion `{text}`: {source}")]
    Sequent { text: String, source: ParseError },
}

fn positions(tag: &RuleTag) -> Vec<usize> {
    match *tag {
        RuleTag::OverLeft {
            principal,
            gamma_len,
        }
        | RuleTag::UnderLeft {
            principal,
            gamma_len,
        } => vec![principal, gamma_len],
        RuleTag::BangLeft { index } | RuleTag::Contr { index } => vec![index],
        RuleTag::Perm1 { from, to } | RuleTag::Perm2 { from, to } => vec![from, to],
        RuleTag::B1 { rule, split } => vec![rule, split],
        RuleTag::B2 { rule } => vec![rule],
        RuleTag::Cut { window } => vec![window],
        RuleTag::Axiom | RuleTag::OverRight | RuleTag::UnderRight | RuleTag::BangRight => vec![],
    }
}

fn tag_from(rule: &str, pos: &[usize]) -> Result<RuleTag, SerialError> {
    let expected = match rule {
        "axiom" | "/R" | "\\R" | "!R" => 0,
        "!L" | "contr" | "B2" | "cut" => 1,
        "/L" | "\\L" | "perm1" | "perm2" | "B1" => 2,
        other => return Err(SerialError::UnknownRule(other.to_string())),
    };
    if pos.len() != expected {
        return Err(SerialError::Positions {
            rule: rule.to_string(),
            expected,
            got: pos.len(),
        });
    }
    Ok(match rule {
        "axiom" => RuleTag::Axiom,
        "/R" => RuleTag::OverRight,
        "\\R" => RuleTag::UnderRight,
        "!R" => RuleTag::BangRight,
        "!L" => RuleTag::BangLeft { index: pos[0] },
        "contr" => RuleTag::Contr { index: pos[0] },
        "B2" => RuleTag::B2 { rule: pos[0] },
        "cut" => RuleTag::Cut { window: pos[0] },
        "/L" => RuleTag::OverLeft {
            principal: pos[0],
            gamma_len: pos[1],
        },
        "\\L" => RuleTag::UnderLeft {
            principal: pos[0],
            gamma_len: pos[1],
        },
        "perm1" => RuleTag::Perm1 {
            from: pos[0],
            to: pos[1],
        },
        "perm2" => RuleTag::Perm2 {
            from: pos[0],
            to: pos[1],
        },
        _ => RuleTag::B1 {
            rule: pos[0],
            split: pos[1],
        },
    })
}

impl DerivationNode {
    pub fn from_derivation(d: &Derivation) -> DerivationNode {
        DerivationNode {
            rule: d.rule.name().to_string(),
            positions: positions(&d.rule),
            conclusion: d.conclusion.to_string(),
            premises: d
                .premises
                .iter()
                .map(DerivationNode::from_derivation)
                .collect(),
        }
    }

    /// Rebuilds the tree. Rule applications are not checked here.
    pub fn to_derivation(&self) -> Result<Derivation, SerialError> {
        let rule = tag_from(&self.rule, &self.positions)?;
        let conclusion =
            parse_sequent_internal(&self.conclusion).map_err(|source| SerialError::Sequent {
                text: self.conclusion.clone(),
                source,
            })?;
        let premises = self
            .premises
            .iter()
            .map(DerivationNode::to_derivation)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Derivation::new(rule, conclusion, premises))
    }
}

impl Derivation {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&DerivationNode::from_derivation(self))
            .expect("derivation nodes always serialize")
    }

    pub fn from_json(text: &str) -> Result<Derivation, SerialError> {
        let node: DerivationNode = serde_json::from_str(text)?;
        node.to_derivation()
    }
}

//! The constraint pattern a referring expression imposes on its domain.

use std::fmt;

use serde::Serialize;

use crate::domain::{Criterion, Properties};
use crate::kb::KnowledgeBase;
use crate::lexicon::{DetClass, Features, Number};
use crate::parser::{Head, RefExpr};

/// Which partitions may satisfy an `Existing` requirement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriterionPattern {
    Any,
    Type,
    Property(String),
    Predicate,
}

impl CriterionPattern {
    pub fn matches(&self, criterion: &Criterion) -> bool {
        match (self, criterion) {
            (CriterionPattern::Any, _) => true,
            (CriterionPattern::Type, Criterion::ByType) => true,
            (CriterionPattern::Property(p), Criterion::ByProperty(q)) => p == q,
            (CriterionPattern::Predicate, Criterion::ByPredicate { .. }) => true,
            _ => false,
        }
    }
}

impl fmt::Display for CriterionPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CriterionPattern::Any => f.write_str("any"),
            CriterionPattern::Type => f.write_str("type"),
            CriterionPattern::Property(p) => write!(f, "property:{p}"),
            CriterionPattern::Predicate => f.write_str("predicate"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionRequirement {
    None,
    /// A partition will be created; none is needed.
    Virtual,
    Existing(CriterionPattern),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TypeConstraint {
    #[serde(rename = "type")]
    pub ty: String,
    pub properties: Properties,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnderspecifiedDomain {
    pub det: DetClass,
    pub type_constraint: Option<TypeConstraint>,
    /// Properties an extracted member must carry. Equal to the type
    /// constraint's properties, except for one-anaphora which has
    /// properties but no type.
    pub description: Properties,
    pub number: Number,
    pub cardinality: Option<u32>,
    pub partition: PartitionRequirement,
    pub focus_required: bool,
    pub exclude_profiled: bool,
    pub reclassify_as: Option<String>,
    pub features: Features,
}

impl UnderspecifiedDomain {
    /// The empty pattern every noun phrase elaborates.
    fn schema(det: DetClass) -> Self {
        UnderspecifiedDomain {
            det,
            type_constraint: None,
            description: Properties::new(),
            number: Number::Singular,
            cardinality: None,
            partition: PartitionRequirement::None,
            focus_required: false,
            exclude_profiled: false,
            reclassify_as: None,
            features: Features::default(),
        }
    }
}

impl fmt::Display for UnderspecifiedDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(tc) = &self.type_constraint {
            parts.push(format!("type={}{}", tc.ty, props(&tc.properties)));
        } else if !self.description.is_empty() {
            parts.push(format!("props={}", props(&self.description)));
        }
        if let Some(n) = self.cardinality {
            parts.push(format!("card>={n}"));
        }
        match &self.partition {
            PartitionRequirement::None => {}
            PartitionRequirement::Virtual => parts.push("partition=virtual".into()),
            PartitionRequirement::Existing(p) => parts.push(format!("partition=existing({p})")),
        }
        if self.focus_required {
            parts.push("focus".into());
        }
        if self.exclude_profiled {
            parts.push("exclude-profiled".into());
        }
        if let Some(t) = &self.reclassify_as {
            parts.push(format!("reclassify={t}"));
        }
        f.write_str(&parts.join(" "))
    }
}

fn props(p: &Properties) -> String {
    if p.is_empty() {
        return String::new();
    }
    let inner: Vec<String> = p.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("{{{}}}", inner.join(","))
}

/// Compiles a referring expression into its underspecified domain.
pub fn build_underspecified(expr: &RefExpr, kb: &KnowledgeBase) -> UnderspecifiedDomain {
    let mut usd = UnderspecifiedDomain::schema(expr.det);
    usd.number = expr.number;
    usd.features = expr.features.clone();
    let typed = |ty: &str| TypeConstraint {
        ty: ty.to_string(),
        properties: expr.modifiers.clone(),
    };
    match expr.det {
        DetClass::Indefinite | DetClass::Numeral(_) | DetClass::IndefiniteAnother => {
            usd.type_constraint = expr.head_type().map(typed);
            usd.description = expr.modifiers.clone();
            usd.cardinality = expr.quantity();
            if expr.det == DetClass::IndefiniteAnother {
                usd.partition = PartitionRequirement::Existing(CriterionPattern::Predicate);
                usd.exclude_profiled = true;
            } else {
                usd.partition = PartitionRequirement::Virtual;
            }
        }
        DetClass::Definite | DetClass::DefiniteOther => {
            usd.type_constraint = expr.head_type().map(typed);
            usd.description = expr.modifiers.clone();
            usd.cardinality = expr.count;
            let first_modifier = expr
                .modifiers
                .keys()
                .min_by_key(|p| (kb.lexicon.property_rank(p), p.as_str()));
            let pattern = match (first_modifier, &expr.head) {
                (Some(p), _) => CriterionPattern::Property(p.clone()),
                (None, Head::Noun(_)) => CriterionPattern::Type,
                (None, _) => CriterionPattern::Any,
            };
            usd.partition = PartitionRequirement::Existing(pattern);
            usd.exclude_profiled = expr.det == DetClass::DefiniteOther;
        }
        DetClass::Pronoun => {
            usd.partition = PartitionRequirement::Existing(CriterionPattern::Any);
            usd.focus_required = true;
        }
        DetClass::Demonstrative => {
            usd.partition = PartitionRequirement::Existing(CriterionPattern::Any);
            usd.focus_required = true;
            usd.reclassify_as = expr.head_type().map(String::from);
        }
    }
    usd
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::testing::{expr, kb};

    #[test]
    fn indefinite_is_virtual() {
        let kb = kb();
        let u = build_underspecified(&expr(&kb, "take a big circle"), &kb);
        assert_eq!(u.type_constraint.as_ref().unwrap().ty, "CIRCLE");
        assert_eq!(u.partition, PartitionRequirement::Virtual);
        assert_eq!(u.to_string(), "type=CIRCLE{size=big} partition=virtual");
    }

    #[test]
    fn definite_prefers_the_first_modifier_in_lexicon_order() {
        let kb = kb();
        let u = build_underspecified(&expr(&kb, "take the big red block"), &kb);
        assert_eq!(
            u.partition,
            PartitionRequirement::Existing(CriterionPattern::Property("color".into()))
        );
        let u = build_underspecified(&expr(&kb, "take the block"), &kb);
        assert_eq!(u.partition, PartitionRequirement::Existing(CriterionPattern::Type));
    }

    #[test]
    fn one_anaphora_has_no_type() {
        let kb = kb();
        let u = build_underspecified(&expr(&kb, "take the red one"), &kb);
        assert!(u.type_constraint.is_none());
        assert_eq!(u.description.get("color").map(String::as_str), Some("red"));
    }

    #[test]
    fn pronoun_and_demonstrative_need_focus() {
        let kb = kb();
        let it = build_underspecified(&expr(&kb, "take it"), &kb);
        assert!(it.focus_required && it.type_constraint.is_none() && it.reclassify_as.is_none());
        let this = build_underspecified(&expr(&kb, "take this figure"), &kb);
        assert!(this.focus_required);
        assert_eq!(this.reclassify_as.as_deref(), Some("FIGURE"));
    }

    #[test]
    fn another_excludes_the_profiled_member() {
        let kb = kb();
        let u = build_underspecified(&expr(&kb, "take another line"), &kb);
        assert!(u.exclude_profiled);
        assert_eq!(u.partition, PartitionRequirement::Existing(CriterionPattern::Predicate));
    }

    #[test]
    fn numeral_sets_a_cardinality() {
        let kb = kb();
        let u = build_underspecified(&expr(&kb, "take two figures"), &kb);
        assert_eq!(u.cardinality, Some(2));
    }
}

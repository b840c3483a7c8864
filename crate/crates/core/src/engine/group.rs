//! Discursive grouping: building a complex domain out of the referents of
//! one construction.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::domain::{Cardinality, ContextModel, Criterion, DomainId, DomainSpec, IdHint, Properties, Source};
use crate::error::Result;
use crate::kb::KnowledgeBase;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "trigger", rename_all = "kebab-case")]
pub enum Trigger {
    /// Members are `[trajector, landmark]`; the trajector is profiled.
    Preposition { relation: String },
    Coordination,
    SamePredicate,
}

/// Groups distinct referents into a new domain. Returns `None` when fewer
/// than two distinct members remain.
pub fn group(
    ctx: &mut ContextModel,
    kb: &KnowledgeBase,
    trigger: &Trigger,
    members: &[DomainId],
) -> Result<Option<DomainId>> {
    let mut seen = BTreeSet::new();
    let members: Vec<DomainId> = members.iter().filter(|m| seen.insert(*m)).cloned().collect();
    if members.len() < 2 {
        return Ok(None);
    }
    let domains = members
        .iter()
        .map(|m| ctx.domain(m).cloned())
        .collect::<Result<Vec<_>>>()?;

    let distinct = |values: &[Option<&String>]| {
        let mut s = BTreeSet::new();
        values.iter().all(|v| v.is_some_and(|v| s.insert(v)))
    };
    let types: Vec<Option<&String>> = domains.iter().map(|d| Some(&d.ty)).collect();
    let criterion = if distinct(&types) {
        Criterion::ByType
    } else {
        let names: BTreeSet<&String> = domains.iter().flat_map(|d| d.properties.keys()).collect();
        names
            .into_iter()
            .find(|name| {
                let values: Vec<Option<&String>> = domains.iter().map(|d| d.properties.get(*name)).collect();
                distinct(&values)
            })
            .map(|name| Criterion::ByProperty(name.clone()))
            .unwrap_or(Criterion::ByGroupRole)
    };
    let cells: Vec<(String, DomainId)> = domains
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let value = match &criterion {
                Criterion::ByType => d.ty.clone(),
                Criterion::ByProperty(p) => d.properties[p].clone(),
                _ => role(trigger, i),
            };
            (value, d.id.clone())
        })
        .collect();

    let ty = kb.hierarchy.common_supertype(domains.iter().map(|d| d.ty.as_str()));
    let mut shared: Properties = domains[0].properties.clone();
    shared.retain(|k, v| domains.iter().all(|d| d.properties.get(k) == Some(v)));
    let cardinality = domains
        .iter()
        .fold(Cardinality::Finite(0), |acc, d| acc.saturating_add(d.cardinality));
    let initial: String = ty.chars().take(1).collect::<String>().to_uppercase();
    let id = ctx.new_domain(
        &kb.hierarchy,
        DomainSpec::new(&ty, cardinality, Source::Discourse)
            .properties(shared)
            .hint(IdHint::Set(format!("{initial}G"))),
    )?;
    let by_kind = ctx.add_partition(&id, criterion, cells)?;
    if let Trigger::Preposition { relation } = trigger {
        let position = ctx.add_partition(
            &id,
            Criterion::ByPosition(relation.clone()),
            vec![
                ("trajector".to_string(), members[0].clone()),
                ("landmark".to_string(), members[1].clone()),
            ],
        )?;
        ctx.profile(&id, by_kind, 0)?;
        ctx.profile(&id, position, 0)?;
    }
    Ok(Some(id))
}

fn role(trigger: &Trigger, i: usize) -> String {
    match trigger {
        Trigger::Preposition { .. } => ["trajector", "landmark"].get(i).unwrap_or(&"member").to_string(),
        Trigger::Coordination => format!("conjunct-{}", i + 1),
        Trigger::SamePredicate => format!("arg-{}", i + 1),
    }
}

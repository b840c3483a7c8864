//! Compatibility between an underspecified domain and a contextual one, and
//! unification: the binding that says which partition and cell satisfy it.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::domain::{ContextModel, DomainId, Partition, ReferenceDomain};
use crate::kb::KnowledgeBase;
use crate::lexicon::{DetClass, Number};

use super::underspecified::{CriterionPattern, PartitionRequirement, UnderspecifiedDomain};

/// First violated compatibility criterion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailReason {
    Type,
    Cardinality,
    Partition,
    Focus,
    Agreement,
    /// Nothing to examine at all.
    NoDomain,
}

impl fmt::Display for FailReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailReason::Type => "type",
            FailReason::Cardinality => "cardinality",
            FailReason::Partition => "partition",
            FailReason::Focus => "focus",
            FailReason::Agreement => "agreement",
            FailReason::NoDomain => "no-domain",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Compatibility {
    Pass,
    Fail(FailReason),
}

impl fmt::Display for Compatibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Compatibility::Pass => f.write_str("pass"),
            Compatibility::Fail(r) => r.fmt(f),
        }
    }
}

impl Serialize for Compatibility {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// What a requirement was satisfied by.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Binding {
    /// The referent will live in a new partition.
    Virtual,
    /// The unique cell isolating a description.
    Cell { partition: usize, cell: usize },
    /// The profiled cell of the focused partition.
    Focus { partition: usize, cell: usize },
    /// A predicate partition to extend with another member.
    Predicate { partition: usize },
    /// The domain itself, for plural definites naming a whole group.
    Whole,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnifiedDomain {
    pub domain: DomainId,
    pub binding: Binding,
}

/// Compatibility knobs that are not part of the expression.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MatchOptions {
    pub agreement: bool,
}

pub fn compatible(
    usd: &UnderspecifiedDomain,
    domain: &DomainId,
    ctx: &ContextModel,
    kb: &KnowledgeBase,
    opts: MatchOptions,
) -> Compatibility {
    match bind(usd, domain, ctx, kb, opts) {
        Ok(_) => Compatibility::Pass,
        Err(r) => Compatibility::Fail(r),
    }
}

/// Binds each requirement of a compatible domain. `None` when the domain is
/// not compatible.
pub fn unify(
    usd: &UnderspecifiedDomain,
    domain: &DomainId,
    ctx: &ContextModel,
    kb: &KnowledgeBase,
    opts: MatchOptions,
) -> Option<UnifiedDomain> {
    bind(usd, domain, ctx, kb, opts).ok().map(|binding| UnifiedDomain {
        domain: domain.clone(),
        binding,
    })
}

/// Does a member domain fit the description (type, properties, number)?
fn satisfies(usd: &UnderspecifiedDomain, member: &ReferenceDomain, kb: &KnowledgeBase) -> bool {
    if let Some(tc) = &usd.type_constraint {
        if !kb.hierarchy.subsumes(&tc.ty, &member.ty) {
            return false;
        }
    }
    if !usd.description.iter().all(|(k, v)| member.properties.get(k) == Some(v)) {
        return false;
    }
    match (usd.cardinality, usd.number) {
        (Some(n), _) => member.cardinality.at_least(n),
        (None, Number::Plural) => member.cardinality.is_plural(),
        (None, Number::Singular) => member.cardinality.is_singular(),
    }
}

fn satisfying_cells(usd: &UnderspecifiedDomain, p: &Partition, ctx: &ContextModel, kb: &KnowledgeBase) -> Vec<usize> {
    p.cells
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.residue)
        .filter(|(_, c)| ctx.get(&c.member).is_some_and(|m| satisfies(usd, m, kb)))
        .map(|(i, _)| i)
        .collect()
}

fn any_member_satisfies(usd: &UnderspecifiedDomain, d: &ReferenceDomain, ctx: &ContextModel, kb: &KnowledgeBase) -> bool {
    d.partitions
        .iter()
        .any(|p| !satisfying_cells(usd, p, ctx, kb).is_empty())
}

fn bind(
    usd: &UnderspecifiedDomain,
    id: &DomainId,
    ctx: &ContextModel,
    kb: &KnowledgeBase,
    opts: MatchOptions,
) -> Result<Binding, FailReason> {
    let d = ctx.get(id).ok_or(FailReason::NoDomain)?;
    match usd.det {
        DetClass::Indefinite | DetClass::Numeral(_) | DetClass::IndefiniteAnother => {
            if let Some(tc) = &usd.type_constraint {
                let own = kb.hierarchy.subsumes(&tc.ty, &d.ty)
                    && tc.properties.iter().all(|(k, v)| d.properties.get(k) == Some(v));
                if !own && !any_member_satisfies(usd, d, ctx, kb) {
                    return Err(FailReason::Type);
                }
            }
            // Extraction needs a set to pick from.
            let need = usd.cardinality.unwrap_or(1).max(2);
            if !d.cardinality.at_least(need) {
                return Err(FailReason::Cardinality);
            }
            if usd.det != DetClass::IndefiniteAnother {
                return Ok(Binding::Virtual);
            }
            let predicates: Vec<usize> = (0..d.partitions.len())
                .filter(|&i| CriterionPattern::Predicate.matches(&d.partitions[i].criterion))
                .collect();
            if predicates.is_empty() {
                return Err(FailReason::Partition);
            }
            let partition = predicates
                .into_iter()
                .filter(|&i| d.partitions[i].profiled.is_some())
                .max_by_key(|&i| d.partitions[i].stamp)
                .ok_or(FailReason::Focus)?;
            let cells = d.partitions[partition].cells.len() as u32;
            if !d.cardinality.at_least(cells + 1) {
                return Err(FailReason::Cardinality);
            }
            Ok(Binding::Predicate { partition })
        }
        DetClass::Definite | DetClass::DefiniteOther => {
            let whole_ok = usd.number == Number::Plural
                && d.cardinality.is_plural()
                && usd
                    .type_constraint
                    .as_ref()
                    .is_some_and(|tc| kb.hierarchy.subsumes(&tc.ty, &d.ty));
            if let Some(tc) = &usd.type_constraint {
                if !kb.hierarchy.strictly_subsumes(&d.ty, &tc.ty)
                    && !any_member_satisfies(usd, d, ctx, kb)
                    && !whole_ok
                {
                    return Err(FailReason::Type);
                }
            }
            if let Some(n) = usd.cardinality {
                if !d.cardinality.at_least(n) {
                    return Err(FailReason::Cardinality);
                }
            }
            if d.partitions.is_empty() {
                return Err(FailReason::Partition);
            }
            let pattern = match &usd.partition {
                PartitionRequirement::Existing(p) => p.clone(),
                _ => CriterionPattern::Any,
            };
            let (preferred, rest): (Vec<usize>, Vec<usize>) =
                (0..d.partitions.len()).partition(|&i| pattern.matches(&d.partitions[i].criterion));
            for partition in preferred.into_iter().chain(rest) {
                let p = &d.partitions[partition];
                let mut cells = satisfying_cells(usd, p, ctx, kb);
                if usd.exclude_profiled {
                    cells.retain(|&c| Some(c) != p.profiled);
                }
                if let [cell] = cells[..] {
                    return Ok(Binding::Cell { partition, cell });
                }
            }
            if whole_ok {
                return Ok(Binding::Whole);
            }
            Err(FailReason::Partition)
        }
        DetClass::Pronoun | DetClass::Demonstrative => {
            if d.partitions.is_empty() {
                return Err(FailReason::Partition);
            }
            let partition = d.focused_partition().ok_or(FailReason::Focus)?;
            let cell = d.partitions[partition].profiled.expect("focused partition");
            let member = ctx
                .get(&d.partitions[partition].cells[cell].member)
                .ok_or(FailReason::NoDomain)?;
            if let Some(t) = &usd.reclassify_as {
                if !kb.hierarchy.subsumes(t, &member.ty) && !kb.hierarchy.subsumes(&member.ty, t) {
                    return Err(FailReason::Type);
                }
            }
            if opts.agreement {
                let gender_clash = matches!(
                    (&usd.features.gender, &member.gender),
                    (Some(a), Some(b)) if a != b
                );
                let number_clash = match usd.features.number {
                    Some(Number::Plural) => !member.cardinality.is_plural(),
                    Some(Number::Singular) => member.cardinality.is_plural(),
                    None => false,
                };
                if gender_clash || number_clash {
                    return Err(FailReason::Agreement);
                }
            }
            Ok(Binding::Focus { partition, cell })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Cardinality, Criterion, DomainSpec, IdHint, Source};
    use crate::engine::build_underspecified;
    use crate::engine::testing::{expr, instance, kb};

    fn figures(ctx: &mut ContextModel, kb: &KnowledgeBase) -> (DomainId, DomainId, DomainId) {
        let c = instance(ctx, kb, "CIRCLE", &[]);
        let t = instance(ctx, kb, "TRIANGLE", &[]);
        let spec = DomainSpec::new("FIGURE", Cardinality::Finite(2), Source::Discourse).hint(IdHint::Set("F".into()));
        let f = ctx.new_domain(&kb.hierarchy, spec).unwrap();
        (f, c, t)
    }

    fn check(kb: &KnowledgeBase, ctx: &ContextModel, text: &str, d: &DomainId) -> Compatibility {
        compatible(&build_underspecified(&expr(kb, text), kb), d, ctx, kb, MatchOptions::default())
    }

    #[test]
    fn definite_needs_a_partition() {
        let kb = kb();
        let mut ctx = ContextModel::new();
        let (f, c, t) = figures(&mut ctx, &kb);
        assert_eq!(check(&kb, &ctx, "take the circle", &f), Compatibility::Fail(FailReason::Partition));
        let p = ctx
            .add_partition(&f, Criterion::ByType, vec![("CIRCLE".into(), c.clone()), ("TRIANGLE".into(), t)])
            .unwrap();
        assert_eq!(check(&kb, &ctx, "take the circle", &f), Compatibility::Pass);
        let usd = build_underspecified(&expr(&kb, "take the circle"), &kb);
        let u = unify(&usd, &f, &ctx, &kb, MatchOptions::default()).unwrap();
        assert_eq!(u.binding, Binding::Cell { partition: p, cell: 0 });
    }

    #[test]
    fn pronoun_needs_focus() {
        let kb = kb();
        let mut ctx = ContextModel::new();
        let (f, c, t) = figures(&mut ctx, &kb);
        let p = ctx
            .add_partition(&f, Criterion::ByType, vec![("CIRCLE".into(), c), ("TRIANGLE".into(), t)])
            .unwrap();
        assert_eq!(check(&kb, &ctx, "take it", &f), Compatibility::Fail(FailReason::Focus));
        ctx.profile(&f, p, 1).unwrap();
        assert_eq!(check(&kb, &ctx, "take it", &f), Compatibility::Pass);
    }

    #[test]
    fn type_mismatch_is_reported() {
        let kb = kb();
        let mut ctx = ContextModel::new();
        let b = instance(&mut ctx, &kb, "BLOCK", &[]);
        assert_eq!(check(&kb, &ctx, "take the circle", &b), Compatibility::Fail(FailReason::Type));
    }

    #[test]
    fn indefinite_needs_room_for_more_than_one() {
        let kb = kb();
        let mut ctx = ContextModel::new();
        let (f, _, _) = figures(&mut ctx, &kb);
        assert_eq!(check(&kb, &ctx, "take a figure", &f), Compatibility::Pass);
        assert_eq!(
            check(&kb, &ctx, "take three figures", &f),
            Compatibility::Fail(FailReason::Cardinality)
        );
    }
}

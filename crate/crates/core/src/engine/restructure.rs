//! Extracting and profiling the referent inside the selected domain.

use crate::domain::{
    naming_prefix, predicate_value, Cardinality, Cell, ContextModel, Criterion, DomainId,
    DomainSpec, IdHint, Polarity, Source,
};
use crate::error::Result;
use crate::kb::KnowledgeBase;

use super::select::{Binding, UnifiedDomain};
use super::underspecified::UnderspecifiedDomain;
use super::Verdict;

/// Verb lemma used for predicate partitions when a clause has no verb.
pub const DEFAULT_PREDICATE: &str = "mention";

/// The predicate an expression is an argument of.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Predicate {
    pub verb: Option<String>,
    pub polarity: Polarity,
}

impl Predicate {
    pub fn new(verb: &str, polarity: Polarity) -> Self {
        Predicate {
            verb: Some(verb.to_string()),
            polarity,
        }
    }

    fn lemma(&self) -> &str {
        self.verb.as_deref().unwrap_or(DEFAULT_PREDICATE)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Restructured {
    pub referent: DomainId,
    /// The selected domain, or the new domain a demonstrative created.
    pub domain: DomainId,
    pub verdict: Verdict,
    pub fresh: bool,
    pub description: String,
}

/// Applies the determiner's restructuring to a unified domain and moves the
/// domain that now holds the focus to the head of the activation list.
pub fn restructure(
    ctx: &mut ContextModel,
    kb: &KnowledgeBase,
    usd: &UnderspecifiedDomain,
    unified: &UnifiedDomain,
    predicate: &Predicate,
) -> Result<Restructured> {
    let selected = unified.domain.clone();
    match unified.binding {
        Binding::Virtual => {
            let (ty, props) = match &usd.type_constraint {
                Some(tc) => (tc.ty.clone(), tc.properties.clone()),
                None => {
                    let d = ctx.domain(&selected)?;
                    (d.ty.clone(), d.properties.clone())
                }
            };
            let n = usd.cardinality.unwrap_or(1);
            let referent = ctx.mint(&IdHint::Instance(naming_prefix(&ty, &props)))?;
            let remaining = ctx.domain(&selected)?.cardinality.saturating_sub(n);
            let lemma = predicate.lemma();
            let mut cells = vec![Cell::new(predicate_value(lemma, predicate.polarity), referent.clone())];
            if !remaining.is_empty() {
                let residue = ctx.new_domain(
                    &kb.hierarchy,
                    DomainSpec::new(&ty, remaining, Source::Discourse)
                        .properties(props.clone())
                        .hint(IdHint::Exact(format!("not-{}", referent.tag()))),
                )?;
                cells.push(Cell::residue(
                    predicate_value(lemma, predicate.polarity.negated()),
                    residue,
                ));
            }
            ctx.new_domain(
                &kb.hierarchy,
                DomainSpec::new(&ty, Cardinality::Finite(n), Source::Discourse)
                    .properties(props)
                    .gender(usd.features.gender.clone())
                    .hint(IdHint::Exact(referent.tag().to_string())),
            )?;
            let criterion = Criterion::ByPredicate {
                verb: lemma.to_string(),
                polarity: predicate.polarity,
            };
            let p = ctx.add_partition_cells(&selected, criterion.clone(), cells)?;
            ctx.profile(&selected, p, 0)?;
            ctx.touch(&selected)?;
            Ok(Restructured {
                description: format!("new partition {criterion} in {selected}, {referent} profiled"),
                referent,
                domain: selected,
                verdict: Verdict::Ok,
                fresh: true,
            })
        }
        Binding::Predicate { partition } => {
            let tc = usd.type_constraint.as_ref();
            let (ty, props) = match tc {
                Some(tc) => (tc.ty.clone(), tc.properties.clone()),
                None => {
                    let d = ctx.domain(&selected)?;
                    (d.ty.clone(), d.properties.clone())
                }
            };
            let referent = ctx.new_domain(
                &kb.hierarchy,
                DomainSpec::new(&ty, Cardinality::Finite(usd.cardinality.unwrap_or(1)), Source::Discourse)
                    .properties(props.clone())
                    .gender(usd.features.gender.clone())
                    .hint(IdHint::Instance(naming_prefix(&ty, &props))),
            )?;
            let base = predicate_value(predicate.lemma(), predicate.polarity);
            let p = &ctx.domain(&selected)?.partitions[partition];
            let criterion = p.criterion.clone();
            let mut value = base.clone();
            let mut k = 2;
            while p.cells.iter().any(|c| c.value == value) {
                value = format!("{base}#{k}");
                k += 1;
            }
            let cell = ctx.insert_cell(&selected, partition, Cell::new(value, referent.clone()))?;
            ctx.profile(&selected, partition, cell)?;
            ctx.touch(&selected)?;
            Ok(Restructured {
                description: format!("new cell for {referent} in partition {criterion} of {selected}"),
                referent,
                domain: selected,
                verdict: Verdict::Ok,
                fresh: true,
            })
        }
        Binding::Cell { partition, cell } => {
            let p = &ctx.domain(&selected)?.partitions[partition];
            let referent = p.cells[cell].member.clone();
            let criterion = p.criterion.clone();
            let already = p.profiled == Some(cell);
            ctx.profile(&selected, partition, cell)?;
            ctx.touch(&selected)?;
            Ok(Restructured {
                description: if already {
                    format!("{referent} already profiled in partition {criterion} of {selected}")
                } else {
                    format!("profiled {referent} in partition {criterion} of {selected}")
                },
                referent,
                domain: selected,
                verdict: if already { Verdict::Suboptimal } else { Verdict::Ok },
                fresh: false,
            })
        }
        Binding::Whole => {
            ctx.touch(&selected)?;
            Ok(Restructured {
                description: format!("whole group {selected}"),
                referent: selected.clone(),
                domain: selected,
                verdict: Verdict::Ok,
                fresh: false,
            })
        }
        Binding::Focus { partition, cell } => {
            let referent = ctx.domain(&selected)?.partitions[partition].cells[cell]
                .member
                .clone();
            ctx.touch(&selected)?;
            let Some(ty) = &usd.reclassify_as else {
                return Ok(Restructured {
                    description: format!("unchanged, focus {referent} of {selected}"),
                    referent,
                    domain: selected,
                    verdict: Verdict::Ok,
                    fresh: false,
                });
            };
            let member = ctx.domain(&referent)?;
            let (member_ty, cardinality) = (member.ty.clone(), member.cardinality);
            let initial: String = ty.chars().take(1).collect::<String>().to_uppercase();
            let created = ctx.new_domain(
                &kb.hierarchy,
                DomainSpec::new(ty, cardinality, Source::Discourse).hint(IdHint::Set(initial)),
            )?;
            let p = ctx.add_partition(&created, Criterion::ByType, vec![(member_ty, referent.clone())])?;
            ctx.profile(&created, p, 0)?;
            Ok(Restructured {
                description: format!("{referent} reclassified into new {ty} domain {created}"),
                referent,
                domain: created,
                verdict: Verdict::Ok,
                fresh: false,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Cardinality, Criterion, DomainSpec, IdHint, Source};
    use crate::engine::testing::{expr, instance, kb};
    use crate::engine::{build_underspecified, unify, MatchOptions};

    fn setup() -> (KnowledgeBase, ContextModel, DomainId, DomainId, DomainId) {
        let kb = kb();
        let mut ctx = ContextModel::new();
        let c = instance(&mut ctx, &kb, "CIRCLE", &[]);
        let t = instance(&mut ctx, &kb, "TRIANGLE", &[]);
        let spec = DomainSpec::new("FIGURE", Cardinality::Finite(2), Source::Discourse).hint(IdHint::Set("F".into()));
        let f = ctx.new_domain(&kb.hierarchy, spec).unwrap();
        ctx.add_partition(&f, Criterion::ByType, vec![("CIRCLE".into(), c.clone()), ("TRIANGLE".into(), t.clone())])
            .unwrap();
        (kb, ctx, f, c, t)
    }

    fn run(kb: &KnowledgeBase, ctx: &mut ContextModel, text: &str, d: &DomainId) -> Restructured {
        let usd = build_underspecified(&expr(kb, text), kb);
        let u = unify(&usd, d, ctx, kb, MatchOptions::default()).unwrap();
        restructure(ctx, kb, &usd, &u, &Predicate::new("take", Polarity::Positive)).unwrap()
    }

    #[test]
    fn definite_profiles_then_is_suboptimal() {
        let (kb, mut ctx, f, c, _) = setup();
        let r = run(&kb, &mut ctx, "take the circle", &f);
        assert_eq!((r.referent.clone(), r.verdict), (c.clone(), Verdict::Ok));
        assert_eq!(ctx.focused_element(&f), Some(&c));
        let r = run(&kb, &mut ctx, "take the circle", &f);
        assert_eq!(r.verdict, Verdict::Suboptimal);
    }

    #[test]
    fn pronoun_leaves_the_domain_alone() {
        let (kb, mut ctx, f, _, t) = setup();
        run(&kb, &mut ctx, "take the triangle", &f);
        let before = ctx.domain(&f).unwrap().clone();
        let r = run(&kb, &mut ctx, "take it", &f);
        assert_eq!(r.referent, t);
        assert_eq!(ctx.domain(&f).unwrap(), &before);
    }

    #[test]
    fn demonstrative_builds_a_new_domain() {
        let (kb, mut ctx, f, _, t) = setup();
        run(&kb, &mut ctx, "take the triangle", &f);
        let before = ctx.domain(&f).unwrap().clone();
        let r = run(&kb, &mut ctx, "take this figure", &f);
        assert_eq!(r.referent, t);
        assert_ne!(r.domain, f);
        let d = ctx.domain(&r.domain).unwrap();
        assert_eq!(d.ty, "FIGURE");
        assert_eq!(d.focused_element(), Some(&t));
        assert_eq!(ctx.domain(&f).unwrap(), &before);
        assert_eq!(ctx.activation()[0], r.domain);
    }

    #[test]
    fn indefinite_opens_a_predicate_partition() {
        let kb = kb();
        let mut ctx = ContextModel::new();
        let spec = DomainSpec::new("LINE", Cardinality::Unbounded, Source::Conceptual).hint(IdHint::Set("L".into()));
        let l = ctx.new_domain(&kb.hierarchy, spec).unwrap();
        let r = run(&kb, &mut ctx, "take a line", &l);
        assert!(r.fresh);
        let d = ctx.domain(&l).unwrap();
        assert_eq!(d.partitions.len(), 1);
        assert!(d.partitions[0].criterion.is_predicate());
        assert_eq!(d.focused_element(), Some(&r.referent));
        let again = run(&kb, &mut ctx, "take another line", &l);
        assert_ne!(again.referent, r.referent);
        assert_eq!(ctx.domain(&l).unwrap().partitions.len(), 1);
    }
}

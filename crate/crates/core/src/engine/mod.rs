//! Resolution of referring expressions against the context.
//!
//! Each expression is compiled into an underspecified domain, matched
//! against contextual domains by activation, unified with the first
//! compatible one and restructured. When no contextual domain fits, the
//! engine falls back on perception, then on part-whole knowledge, then on
//! the generic domain of the expression's type.

mod group;
mod restructure;
mod select;
mod underspecified;

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::{ContextModel, DomainId, DomainSpec, IdHint, Source};
use crate::error::{Error, Result};
use crate::kb::KnowledgeBase;
use crate::lexicon::DetClass;
use crate::parser::{parse_text, RefExpr, UnknownPolicy, Utterance};
use crate::scene::{self, GroupingParams, PerceivedScene, SceneEntity};

pub use group::{group, Trigger};
pub use restructure::{restructure, Predicate, Restructured, DEFAULT_PREDICATE};
pub use select::{compatible, unify, Binding, Compatibility, FailReason, MatchOptions, UnifiedDomain};
pub use underspecified::{
    build_underspecified, CriterionPattern, PartitionRequirement, TypeConstraint, UnderspecifiedDomain,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    #[default]
    #[serde(rename = "OK")]
    Ok,
    #[serde(rename = "SUBOPTIMAL")]
    Suboptimal,
    #[serde(rename = "FAIL")]
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Ok => "OK",
            Verdict::Suboptimal => "SUBOPTIMAL",
            Verdict::Fail => "FAIL",
        })
    }
}

/// Where a candidate domain came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Contextual,
    Perceptual,
    Bridging,
    Generic,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Contextual => "contextual",
            Stage::Perceptual => "perceptual",
            Stage::Bridging => "bridging",
            Stage::Generic => "generic",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Candidate {
    pub domain: DomainId,
    pub stage: Stage,
    pub outcome: Compatibility,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Ambiguity {
    /// Resolve with the first compatible domain.
    #[default]
    First,
    /// Also collect every other compatible contextual domain.
    Report,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EngineOptions {
    pub ambiguity: Ambiguity,
    /// Check gender and number of pronouns against their referent.
    pub agreement: bool,
    pub grouping: GroupingParams,
    pub unknown: UnknownPolicy,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            ambiguity: Ambiguity::First,
            agreement: false,
            grouping: GroupingParams::default(),
            unknown: UnknownPolicy::Fail,
        }
    }
}

/// Outcome for one referring expression.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Resolution {
    pub expr: RefExpr,
    pub underspecified: UnderspecifiedDomain,
    pub candidates: Vec<Candidate>,
    pub stage: Option<Stage>,
    /// Selected domain, or the domain a demonstrative created.
    pub domain: Option<DomainId>,
    pub referent: Option<DomainId>,
    pub verdict: Verdict,
    pub fail_reason: Option<FailReason>,
    pub restructure: String,
    /// Other compatible domains, in ambiguity-report mode.
    pub alternatives: Vec<DomainId>,
    /// The referent was minted by this resolution.
    pub fresh: bool,
}

/// A discursive group created after an utterance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupRecord {
    #[serde(flatten)]
    pub trigger: Trigger,
    pub domain: DomainId,
    pub members: Vec<DomainId>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct UtteranceResult {
    pub resolutions: Vec<Resolution>,
    pub groups: Vec<GroupRecord>,
}

struct Selection {
    candidates: Vec<Candidate>,
    chosen: Option<(UnifiedDomain, Stage)>,
    alternatives: Vec<DomainId>,
}

/// One dialogue: a context, an optional scene and the shared knowledge base.
#[derive(Clone, Debug)]
pub struct Session {
    kb: Arc<KnowledgeBase>,
    ctx: ContextModel,
    scene: Option<PerceivedScene>,
    options: EngineOptions,
}

impl Session {
    pub fn new(kb: Arc<KnowledgeBase>, options: EngineOptions) -> Result<Self> {
        options.grouping.validate()?;
        Ok(Session {
            kb,
            ctx: ContextModel::new(),
            scene: None,
            options,
        })
    }

    pub fn kb(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn context(&self) -> &ContextModel {
        &self.ctx
    }

    /// Mutable access, for building synthetic contexts.
    pub fn context_mut(&mut self) -> &mut ContextModel {
        &mut self.ctx
    }

    pub fn scene(&self) -> Option<&PerceivedScene> {
        self.scene.as_ref()
    }

    pub fn options(&self) -> &EngineOptions {
        &self.options
    }

    pub fn load_scene(&mut self, path: impl AsRef<Path>) -> Result<()> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| Error::io(path.as_ref(), e))?;
        self.load_scene_str(&text).map_err(|e| match e {
            Error::Json { source, .. } => Error::json(path.as_ref().display().to_string(), source),
            other => other,
        })
    }

    pub fn load_scene_str(&mut self, text: &str) -> Result<()> {
        let mut ctx = self.ctx.clone();
        let scene = scene::load_scene_str(text, &self.kb, &mut ctx)?;
        self.install_scene(ctx, scene)
    }

    /// Seeds perception domains and groups them right away.
    pub fn add_scene(&mut self, entities: Vec<SceneEntity>) -> Result<()> {
        let mut ctx = self.ctx.clone();
        let scene = scene::perceive(entities, &self.kb, &mut ctx)?;
        self.install_scene(ctx, scene)
    }

    fn install_scene(&mut self, mut ctx: ContextModel, mut scene: PerceivedScene) -> Result<()> {
        if self.scene.is_some() {
            return Err(Error::InvalidParams("a scene is already loaded".into()));
        }
        scene::perceptual_group(&mut ctx, &self.kb, &mut scene, &self.options.grouping)?;
        check(&ctx)?;
        self.ctx = ctx;
        self.scene = Some(scene);
        Ok(())
    }

    pub fn process_text(&mut self, text: &str) -> Result<UtteranceResult> {
        let utt = parse_text(text, &self.kb.lexicon, self.options.unknown)?;
        self.process_utterance(&utt)
    }

    /// Resolves every referring expression in order, then groups: one group
    /// per relational complement, one per coordination and one for the
    /// arguments of each predicate.
    pub fn process_utterance(&mut self, utt: &Utterance) -> Result<UtteranceResult> {
        let verbs = utt.effective_verbs();
        let mentions = utt.mentions();
        let mut resolutions = Vec::with_capacity(mentions.len());
        for m in &mentions {
            let predicate = Predicate {
                verb: verbs[m.clause].clone(),
                polarity: utt.clauses[m.clause].polarity,
            };
            resolutions.push(self.resolve(m.expr, &predicate)?);
        }
        let referent = |i: usize| resolutions[i].referent.clone();
        let mut groups = Vec::new();

        for (i, m) in mentions.iter().enumerate() {
            let Some(h) = m.host else { continue };
            let complement = mentions[h].expr.complement.as_ref().expect("host has a complement");
            let (Some(host), Some(object)) = (referent(h), referent(i)) else {
                continue;
            };
            let members = match complement.prominent {
                crate::lexicon::Prominent::Head => vec![host, object],
                crate::lexicon::Prominent::Complement => vec![object, host],
            };
            let trigger = Trigger::Preposition {
                relation: complement.relation.clone(),
            };
            self.record_group(&mut groups, trigger, members)?;
        }

        for (ci, clause) in utt.clauses.iter().enumerate() {
            let top = |arg: usize| {
                mentions
                    .iter()
                    .position(|m| m.clause == ci && m.arg == arg && m.host.is_none())
                    .and_then(referent)
            };
            let mut made: Vec<Vec<DomainId>> = Vec::new();
            for coord in &clause.coordinations {
                let members: Vec<DomainId> = coord.iter().filter_map(|&a| top(a)).collect();
                if self.record_group(&mut groups, Trigger::Coordination, members.clone())? {
                    made.push(sorted_unique(members));
                }
            }
            if verbs[ci].is_some() {
                let members: Vec<DomainId> = (0..clause.args.len()).filter_map(top).collect();
                if !made.contains(&sorted_unique(members.clone())) {
                    self.record_group(&mut groups, Trigger::SamePredicate, members)?;
                }
            }
        }
        Ok(UtteranceResult { resolutions, groups })
    }

    fn record_group(&mut self, out: &mut Vec<GroupRecord>, trigger: Trigger, members: Vec<DomainId>) -> Result<bool> {
        let Some(domain) = group(&mut self.ctx, &self.kb, &trigger, &members)? else {
            return Ok(false);
        };
        check(&self.ctx)?;
        out.push(GroupRecord {
            trigger,
            domain,
            members: sorted_unique(members),
        });
        Ok(true)
    }

    /// Builds, selects, unifies and restructures for one expression.
    pub fn resolve(&mut self, expr: &RefExpr, predicate: &Predicate) -> Result<Resolution> {
        let usd = build_underspecified(expr, &self.kb);
        let selection = self.select(&usd)?;
        let Selection {
            candidates,
            chosen,
            alternatives,
        } = selection;
        let Some((unified, stage)) = chosen else {
            let fail_reason = candidates
                .iter()
                .find_map(|c| match c.outcome {
                    Compatibility::Fail(r) => Some(r),
                    Compatibility::Pass => None,
                })
                .unwrap_or(FailReason::NoDomain);
            return Ok(Resolution {
                expr: expr.clone(),
                underspecified: usd,
                candidates,
                stage: None,
                domain: None,
                referent: None,
                verdict: Verdict::Fail,
                fail_reason: Some(fail_reason),
                restructure: "none".into(),
                alternatives,
                fresh: false,
            });
        };
        let done = restructure(&mut self.ctx, &self.kb, &usd, &unified, predicate)?;
        check(&self.ctx)?;
        Ok(Resolution {
            expr: expr.clone(),
            underspecified: usd,
            candidates,
            stage: Some(stage),
            domain: Some(done.domain),
            referent: Some(done.referent),
            verdict: done.verdict,
            fail_reason: None,
            restructure: done.description,
            alternatives,
            fresh: done.fresh,
        })
    }

    fn match_options(&self) -> MatchOptions {
        MatchOptions {
            agreement: self.options.agreement,
        }
    }

    /// Walks domains in activation order. Expressions that need a focus
    /// stop at the first partitioned domain: an unfocused structure there
    /// hides older foci.
    fn traverse(
        &self,
        usd: &UnderspecifiedDomain,
        ctx: &ContextModel,
        stage: Stage,
        candidates: &mut Vec<Candidate>,
    ) -> Vec<UnifiedDomain> {
        let mut passing = Vec::new();
        for id in ctx.activation() {
            let outcome = compatible(usd, id, ctx, &self.kb, self.match_options());
            candidates.push(Candidate {
                domain: id.clone(),
                stage,
                outcome,
            });
            match outcome {
                Compatibility::Pass => {
                    passing.push(unify(usd, id, ctx, &self.kb, self.match_options()).expect("compatible"));
                    if self.options.ambiguity == Ambiguity::First {
                        break;
                    }
                }
                Compatibility::Fail(_) => {
                    let partitioned = ctx.get(id).is_some_and(|d| !d.partitions.is_empty());
                    if usd.focus_required && partitioned && passing.is_empty() {
                        break;
                    }
                }
            }
        }
        passing
    }

    fn select(&mut self, usd: &UnderspecifiedDomain) -> Result<Selection> {
        let mut candidates = Vec::new();
        let mut passing = self.traverse(usd, &self.ctx, Stage::Contextual, &mut candidates);
        if !passing.is_empty() {
            let chosen = passing.remove(0);
            return Ok(Selection {
                candidates,
                chosen: Some((chosen, Stage::Contextual)),
                alternatives: passing.into_iter().map(|u| u.domain).collect(),
            });
        }
        let definite = matches!(usd.det, DetClass::Definite | DetClass::DefiniteOther);

        if definite {
            if let Some(scene) = &self.scene {
                let mut ctx = self.ctx.clone();
                let mut scene = scene.clone();
                let created = scene::perceptual_group(&mut ctx, &self.kb, &mut scene, &self.options.grouping)?;
                if !created.is_empty() {
                    let mut passing = self.traverse(usd, &ctx, Stage::Perceptual, &mut candidates);
                    if !passing.is_empty() {
                        self.ctx = ctx;
                        self.scene = Some(scene);
                        let chosen = passing.remove(0);
                        return Ok(Selection {
                            candidates,
                            chosen: Some((chosen, Stage::Perceptual)),
                            alternatives: Vec::new(),
                        });
                    }
                }
            }
        }

        if definite && usd.type_constraint.is_some() {
            for id in self.ctx.activation().to_vec() {
                let mut ctx = self.ctx.clone();
                if self.kb.part_partition(&mut ctx, &id)?.is_none() || ctx.len() == self.ctx.len() {
                    continue;
                }
                let outcome = compatible(usd, &id, &ctx, &self.kb, self.match_options());
                candidates.push(Candidate {
                    domain: id.clone(),
                    stage: Stage::Bridging,
                    outcome,
                });
                if outcome == Compatibility::Pass {
                    let unified = unify(usd, &id, &ctx, &self.kb, self.match_options()).expect("compatible");
                    self.ctx = ctx;
                    return Ok(Selection {
                        candidates,
                        chosen: Some((unified, Stage::Bridging)),
                        alternatives: Vec::new(),
                    });
                }
            }
        }

        if matches!(usd.det, DetClass::Indefinite | DetClass::Numeral(_)) {
            if let Some(tc) = &usd.type_constraint {
                let generic = self.kb.generic_domain(&mut self.ctx, &tc.ty, &tc.properties)?;
                let prefix = generic.tag().trim_end_matches('*').to_string();
                let clone = self.ctx.new_domain(
                    &self.kb.hierarchy,
                    DomainSpec::new(&tc.ty, crate::domain::Cardinality::Unbounded, Source::Conceptual)
                        .properties(tc.properties.clone())
                        .hint(IdHint::Set(prefix)),
                )?;
                candidates.push(Candidate {
                    domain: clone.clone(),
                    stage: Stage::Generic,
                    outcome: Compatibility::Pass,
                });
                return Ok(Selection {
                    candidates,
                    chosen: Some((
                        UnifiedDomain {
                            domain: clone,
                            binding: Binding::Virtual,
                        },
                        Stage::Generic,
                    )),
                    alternatives: Vec::new(),
                });
            }
        }
        Ok(Selection {
            candidates,
            chosen: None,
            alternatives: Vec::new(),
        })
    }
}

fn sorted_unique(mut ids: Vec<DomainId>) -> Vec<DomainId> {
    ids.sort();
    ids.dedup();
    ids
}

fn check(ctx: &ContextModel) -> Result<()> {
    ctx.check_invariants().map_err(Error::Invariant)
}

/// Utterance lines of a dialogue file: blank lines and `#` comments are
/// dropped, and a leading speaker tag such as `A1:` is removed.
pub fn dialogue_lines(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| match l.split_once(':') {
            Some((tag, rest))
                if !tag.is_empty()
                    && tag.chars().next().is_some_and(char::is_alphabetic)
                    && tag.chars().all(|c| c.is_alphanumeric() || c == '\'' || c == '’') =>
            {
                rest.trim().to_string()
            }
            _ => l.to_string(),
        })
        .collect()
}

#[cfg(test)]
pub(crate) mod testing {
    use super::*;
    use crate::domain::Cardinality;

    pub fn kb() -> KnowledgeBase {
        crate::kb::load_kb(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/kb_en.json")).unwrap()
    }

    pub fn expr(kb: &KnowledgeBase, text: &str) -> RefExpr {
        let utt = parse_text(text, &kb.lexicon, UnknownPolicy::Fail).unwrap();
        utt.mentions()[0].expr.clone()
    }

    pub fn instance(ctx: &mut ContextModel, kb: &KnowledgeBase, ty: &str, props: &[(&str, &str)]) -> DomainId {
        let mut spec = DomainSpec::new(ty, Cardinality::Finite(1), Source::Discourse).hint(IdHint::Instance(ty[..1].to_lowercase()));
        for (k, v) in props {
            spec = spec.property(k, v);
        }
        ctx.new_domain(&kb.hierarchy, spec).unwrap()
    }
}

//! Generic conceptual knowledge: a single-inheritance type forest with
//! part-whole declarations, plus the lexicon.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::domain::{
    Cardinality, Cell, ContextModel, Criterion, DomainId, DomainSpec, IdHint, Properties, Source,
};
use crate::error::{Error, Result};
use crate::lexicon::Lexicon;

/// Implicit top of every type tree. Groups whose members share no declared
/// ancestor are typed with it.
pub const TOP_TYPE: &str = "ENTITY";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartSpec {
    pub role: String,
    #[serde(rename = "type")]
    pub ty: String,
    #[serde(default = "one")]
    pub count: Cardinality,
}

fn one() -> Cardinality {
    Cardinality::Finite(1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeNode {
    pub name: String,
    #[serde(default)]
    pub parent: Option<String>,
    #[serde(default)]
    pub parts: Vec<PartSpec>,
}

impl TypeNode {
    pub fn new(name: &str, parent: Option<&str>) -> Self {
        TypeNode {
            name: name.to_string(),
            parent: parent.map(str::to_string),
            parts: Vec::new(),
        }
    }

    pub fn with_part(mut self, role: &str, ty: &str, count: Cardinality) -> Self {
        self.parts.push(PartSpec {
            role: role.to_string(),
            ty: ty.to_string(),
            count,
        });
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeHierarchy {
    nodes: BTreeMap<String, TypeNode>,
}

impl TypeHierarchy {
    pub fn from_nodes(nodes: Vec<TypeNode>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for node in nodes {
            if map.contains_key(&node.name) {
                return Err(Error::DuplicateType(node.name));
            }
            map.insert(node.name.clone(), node);
        }
        for node in map.values() {
            if let Some(parent) = &node.parent {
                if parent == &node.name {
                    return Err(Error::Cycle(node.name.clone()));
                }
                if !map.contains_key(parent) && parent != TOP_TYPE {
                    return Err(Error::UnknownParent {
                        child: node.name.clone(),
                        parent: parent.clone(),
                    });
                }
            }
        }
        for start in map.keys() {
            let mut seen = BTreeSet::new();
            let mut cur = Some(start);
            while let Some(name) = cur {
                if !seen.insert(name) {
                    return Err(Error::Cycle(start.clone()));
                }
                cur = map.get(name).and_then(|n| n.parent.as_ref());
            }
        }
        for node in map.values() {
            for part in &node.parts {
                if !map.contains_key(&part.ty) {
                    return Err(Error::DanglingPart {
                        whole: node.name.clone(),
                        role: part.role.clone(),
                        part: part.ty.clone(),
                    });
                }
            }
        }
        Ok(TypeHierarchy { nodes: map })
    }

    pub fn contains(&self, ty: &str) -> bool {
        ty == TOP_TYPE || self.nodes.contains_key(ty)
    }

    pub fn node(&self, ty: &str) -> Option<&TypeNode> {
        self.nodes.get(ty)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.nodes.keys().map(String::as_str)
    }

    fn check(&self, ty: &str) -> Result<()> {
        if self.contains(ty) {
            Ok(())
        } else {
            Err(Error::UnknownType(ty.to_string()))
        }
    }

    /// The type itself followed by its ancestors, nearest first. `TOP_TYPE`
    /// closes every chain.
    pub fn ancestors<'a>(&'a self, ty: &'a str) -> Vec<&'a str> {
        let mut chain = Vec::new();
        let mut cur = Some(ty);
        while let Some(name) = cur {
            if name == TOP_TYPE {
                break;
            }
            chain.push(name);
            cur = self.nodes.get(name).and_then(|n| n.parent.as_deref());
        }
        chain.push(TOP_TYPE);
        chain
    }

    /// True iff `a` equals `b` or `b` is reachable from `a` via parents.
    pub fn is_subtype(&self, a: &str, b: &str) -> Result<bool> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.subsumes(b, a))
    }

    /// Unchecked form of `is_subtype(sub, sup)`; unknown symbols only match
    /// themselves.
    pub fn subsumes(&self, sup: &str, sub: &str) -> bool {
        sup == TOP_TYPE || self.ancestors(sub).contains(&sup)
    }

    pub fn strictly_subsumes(&self, sup: &str, sub: &str) -> bool {
        sup != sub && self.subsumes(sup, sub)
    }

    /// Nearest type subsuming every given type.
    pub fn common_supertype<'a, I>(&'a self, types: I) -> String
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut iter = types.into_iter();
        let Some(first) = iter.next() else {
            return TOP_TYPE.to_string();
        };
        let mut candidates = self.ancestors(first);
        for ty in iter {
            candidates.retain(|c| self.subsumes(c, ty));
        }
        candidates.first().copied().unwrap_or(TOP_TYPE).to_string()
    }

    /// Declared parts of a type, inherited ones included. A role declared
    /// lower in the hierarchy hides the same role further up.
    pub fn parts(&self, ty: &str) -> Vec<&PartSpec> {
        let mut roles = BTreeSet::new();
        let mut out = Vec::new();
        for name in self.ancestors(ty) {
            if let Some(node) = self.nodes.get(name) {
                for part in &node.parts {
                    if roles.insert(part.role.as_str()) {
                        out.push(part);
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnowledgeBase {
    pub hierarchy: TypeHierarchy,
    pub lexicon: Lexicon,
}

#[derive(Deserialize)]
struct KbFile {
    types: Vec<TypeNode>,
    #[serde(default)]
    lexicon: Lexicon,
}

/// Reads and validates a knowledge-base file.
pub fn load_kb(path: impl AsRef<Path>) -> Result<KnowledgeBase> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    KnowledgeBase::from_json(&text).map_err(|e| match e {
        Error::Json { source, .. } => Error::json(path.display().to_string(), source),
        other => other,
    })
}

impl KnowledgeBase {
    pub fn new(hierarchy: TypeHierarchy, mut lexicon: Lexicon) -> Result<Self> {
        lexicon.normalize();
        let kb = KnowledgeBase { hierarchy, lexicon };
        kb.validate_lexicon()?;
        Ok(kb)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: KbFile = serde_json::from_str(text).map_err(|e| Error::json("knowledge base", e))?;
        KnowledgeBase::new(TypeHierarchy::from_nodes(file.types)?, file.lexicon)
    }

    fn validate_lexicon(&self) -> Result<()> {
        for (surface, noun) in &self.lexicon.nouns {
            if !self.hierarchy.contains(&noun.ty) {
                return Err(Error::Lexicon {
                    surface: surface.clone(),
                    message: format!("unknown type `{}`", noun.ty),
                });
            }
        }
        for (surface, expansion) in &self.lexicon.contractions {
            if expansion.split_whitespace().count() < 2 {
                return Err(Error::Lexicon {
                    surface: surface.clone(),
                    message: "a contraction must expand to several words".into(),
                });
            }
        }
        Ok(())
    }

    pub fn is_subtype(&self, a: &str, b: &str) -> Result<bool> {
        self.hierarchy.is_subtype(a, b)
    }

    /// The generic domain of a type under a property set, created on first
    /// request and shared afterwards.
    pub fn generic_domain(
        &self,
        ctx: &mut ContextModel,
        ty: &str,
        properties: &Properties,
    ) -> Result<DomainId> {
        if !self.hierarchy.contains(ty) {
            return Err(Error::UnknownType(ty.to_string()));
        }
        if let Some(id) = ctx.generic_for(ty, properties) {
            return Ok(id.clone());
        }
        ctx.new_domain(
            &self.hierarchy,
            DomainSpec::new(ty, Cardinality::Unbounded, Source::Conceptual)
                .properties(properties.clone())
                .generic(),
        )
    }

    /// Materializes the declared parts of a whole as a role partition.
    /// Returns `None` when the whole's type declares no parts.
    pub fn part_partition(&self, ctx: &mut ContextModel, whole: &DomainId) -> Result<Option<usize>> {
        let domain = ctx.domain(whole)?;
        if domain.generic {
            return Ok(None);
        }
        let parts: Vec<PartSpec> = self
            .hierarchy
            .parts(&domain.ty)
            .into_iter()
            .cloned()
            .collect();
        if parts.is_empty() {
            return Ok(None);
        }
        let existing = domain.partitions.iter().position(|p| {
            p.criterion == Criterion::ByGroupRole
                && p.cells.len() == parts.len()
                && p.cells.iter().zip(&parts).all(|(c, s)| c.value == s.role)
        });
        if existing.is_some() {
            return Ok(existing);
        }
        let mut cells = Vec::with_capacity(parts.len());
        for part in &parts {
            let prefix = crate::domain::naming_prefix(&part.ty, &Properties::new());
            let member = ctx.new_domain(
                &self.hierarchy,
                DomainSpec::new(&part.ty, part.count, Source::Conceptual)
                    .hint(IdHint::Instance(prefix)),
            )?;
            cells.push(Cell::new(part.role.clone(), member));
        }
        ctx.add_partition_cells(whole, Criterion::ByGroupRole, cells)
            .map(Some)
    }
}

//! Reference domains, partitions and the activation-ordered context store.
//!
//! A [`ReferenceDomain`] is an attribute-value record for an entity or a set
//! of entities. Its [`Partition`]s decompose it into members that are told
//! apart by a [`Criterion`]; at most one cell of a partition is profiled.
//! The [`ContextModel`] owns every domain of a dialogue session and keeps the
//! non-generic ones in activation order, most activated first.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::kb::TypeHierarchy;

pub type TypeSymbol = String;

/// Property name to value. Ordered so that every rendering is canonical.
pub type Properties = BTreeMap<String, String>;

/// Identifier of a domain, canonically written `@tag`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct DomainId(String);

impl<'de> Deserialize<'de> for DomainId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(DomainId::new(&s))
    }
}

impl DomainId {
    pub fn new(tag: &str) -> Self {
        DomainId(format!("@{}", tag.trim_start_matches('@')))
    }

    pub fn tag(&self) -> &str {
        &self.0[1..]
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for DomainId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for DomainId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    #[default]
    Positive,
    Negative,
}

impl Polarity {
    pub fn negated(self) -> Self {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }
}

/// The point of view whose values tell the members of a partition apart.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Criterion {
    ByType,
    ByProperty(String),
    ByPredicate { verb: String, polarity: Polarity },
    ByPosition(String),
    ByGroupRole,
}

impl Criterion {
    pub fn is_predicate(&self) -> bool {
        matches!(self, Criterion::ByPredicate { .. })
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Criterion::ByType => f.write_str("type"),
            Criterion::ByProperty(p) => write!(f, "property:{p}"),
            Criterion::ByPredicate { verb, polarity } => {
                write!(f, "predicate:{}", predicate_value(verb, *polarity))
            }
            Criterion::ByPosition(axis) => write!(f, "position:{axis}"),
            Criterion::ByGroupRole => f.write_str("group-role"),
        }
    }
}

impl Serialize for Criterion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Cell value of a predicate partition: the lemma, negated with `¬`.
pub fn predicate_value(verb: &str, polarity: Polarity) -> String {
    match polarity {
        Polarity::Positive => verb.to_string(),
        Polarity::Negative => format!("¬{verb}"),
    }
}

/// Number of entities a domain stands for. `Unbounded` compares above every
/// finite count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cardinality {
    Finite(u32),
    Unbounded,
}

impl Cardinality {
    pub fn at_least(self, n: u32) -> bool {
        self >= Cardinality::Finite(n)
    }

    pub fn is_singular(self) -> bool {
        self == Cardinality::Finite(1)
    }

    pub fn is_plural(self) -> bool {
        self >= Cardinality::Finite(2)
    }

    pub fn saturating_sub(self, n: u32) -> Cardinality {
        match self {
            Cardinality::Finite(k) => Cardinality::Finite(k.saturating_sub(n)),
            Cardinality::Unbounded => Cardinality::Unbounded,
        }
    }

    pub fn saturating_add(self, other: Cardinality) -> Cardinality {
        match (self, other) {
            (Cardinality::Finite(a), Cardinality::Finite(b)) => Cardinality::Finite(a.saturating_add(b)),
            _ => Cardinality::Unbounded,
        }
    }

    pub fn is_empty(self) -> bool {
        self == Cardinality::Finite(0)
    }
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cardinality::Finite(n) => write!(f, "{n}"),
            Cardinality::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl Serialize for Cardinality {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cardinality::Finite(n) => s.serialize_u32(*n),
            Cardinality::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

impl<'de> Deserialize<'de> for Cardinality {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Count(u32),
            Word(String),
        }
        match Raw::deserialize(d)? {
            Raw::Count(n) => Ok(Cardinality::Finite(n)),
            Raw::Word(w) if matches!(w.as_str(), "n" | "unbounded" | "*") => Ok(Cardinality::Unbounded),
            Raw::Word(w) => Err(serde::de::Error::custom(format!(
                "expected a count or \"n\", found \"{w}\""
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Discourse,
    Perception,
    Conceptual,
}

/// One member of a partition. A residue cell stands for "the other ones" of
/// the domain: it is never named by a description and never profiled.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub value: String,
    pub member: DomainId,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub residue: bool,
}

impl Cell {
    pub fn new(value: impl Into<String>, member: DomainId) -> Self {
        Cell {
            value: value.into(),
            member,
            residue: false,
        }
    }

    pub fn residue(value: impl Into<String>, member: DomainId) -> Self {
        Cell {
            value: value.into(),
            member,
            residue: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Partition {
    pub criterion: Criterion,
    pub cells: Vec<Cell>,
    pub profiled: Option<usize>,
    /// Logical time of the last change; the newest profiled partition
    /// carries the focus of its domain.
    #[serde(skip)]
    pub stamp: u64,
}

impl Partition {
    pub fn profiled_cell(&self) -> Option<&Cell> {
        self.profiled.map(|i| &self.cells[i])
    }

    pub fn profiled_member(&self) -> Option<&DomainId> {
        self.profiled_cell().map(|c| &c.member)
    }

    pub fn members(&self) -> impl Iterator<Item = &DomainId> {
        self.cells.iter().map(|c| &c.member)
    }

    pub fn position_of(&self, member: &DomainId) -> Option<usize> {
        self.cells.iter().position(|c| &c.member == member)
    }
}

/// The three context structures a referring expression can meet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Structure {
    Unpartitioned,
    Unfocused,
    Focused,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReferenceDomain {
    pub id: DomainId,
    #[serde(rename = "type")]
    pub ty: TypeSymbol,
    pub cardinality: Cardinality,
    pub properties: Properties,
    pub partitions: Vec<Partition>,
    pub source: Source,
    pub generic: bool,
    /// Grammatical gender of the noun that introduced the domain, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gender: Option<String>,
}

impl ReferenceDomain {
    /// Index of the most recently updated partition holding a profiled cell.
    pub fn focused_partition(&self) -> Option<usize> {
        self.partitions
            .iter()
            .enumerate()
            .filter(|(_, p)| p.profiled.is_some())
            .max_by_key(|(i, p)| (p.stamp, *i))
            .map(|(i, _)| i)
    }

    pub fn focused_element(&self) -> Option<&DomainId> {
        self.focused_partition()
            .and_then(|i| self.partitions[i].profiled_member())
    }

    pub fn structure(&self) -> Structure {
        if self.partitions.is_empty() {
            Structure::Unpartitioned
        } else if self.focused_partition().is_some() {
            Structure::Focused
        } else {
            Structure::Unfocused
        }
    }

    pub fn partition_with(&self, criterion: &Criterion) -> Option<usize> {
        self.partitions.iter().position(|p| &p.criterion == criterion)
    }
}

/// How a fresh identifier is chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IdHint {
    /// `@{prefix}{n}` with the smallest free `n ≥ 1`.
    Instance(String),
    /// `@{prefix}`, or `@{prefix}{n}` with `n ≥ 2` when taken.
    Set(String),
    /// Exactly `@{tag}`; fails if taken.
    Exact(String),
}

/// Everything needed to create a domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainSpec {
    pub ty: TypeSymbol,
    pub cardinality: Cardinality,
    pub properties: Properties,
    pub source: Source,
    pub generic: bool,
    pub gender: Option<String>,
    pub hint: Option<IdHint>,
}

impl DomainSpec {
    pub fn new(ty: impl Into<String>, cardinality: Cardinality, source: Source) -> Self {
        DomainSpec {
            ty: ty.into(),
            cardinality,
            properties: Properties::new(),
            source,
            generic: false,
            gender: None,
            hint: None,
        }
    }

    pub fn properties(mut self, properties: Properties) -> Self {
        self.properties = properties;
        self
    }

    pub fn property(mut self, name: &str, value: &str) -> Self {
        self.properties.insert(name.to_string(), value.to_string());
        self
    }

    pub fn generic(mut self) -> Self {
        self.generic = true;
        self.cardinality = Cardinality::Unbounded;
        self
    }

    pub fn gender(mut self, gender: Option<String>) -> Self {
        self.gender = gender;
        self
    }

    pub fn hint(mut self, hint: IdHint) -> Self {
        self.hint = Some(hint);
        self
    }

    fn default_hint(&self) -> IdHint {
        let prefix = naming_prefix(&self.ty, &self.properties);
        if self.generic {
            IdHint::Set(format!("{}*", prefix.to_uppercase()))
        } else if self.cardinality.is_singular() {
            IdHint::Instance(prefix)
        } else {
            IdHint::Set(prefix.to_uppercase())
        }
    }
}

/// Initials of the property values (alphabetical) followed by the type
/// initial: a big circle gives `bc`, a small line `sl`.
pub fn naming_prefix(ty: &str, properties: &Properties) -> String {
    let mut values: Vec<&str> = properties.values().map(String::as_str).collect();
    values.sort_unstable();
    let mut prefix: String = values
        .iter()
        .filter_map(|v| v.chars().find(|c| c.is_alphanumeric()))
        .collect();
    prefix.extend(ty.chars().find(|c| c.is_alphanumeric()));
    if prefix.is_empty() {
        prefix.push('d');
    }
    prefix.to_lowercase()
}

/// Activation-ordered store of every domain of a session.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ContextModel {
    store: BTreeMap<DomainId, ReferenceDomain>,
    activation: Vec<DomainId>,
    #[serde(skip)]
    counters: BTreeMap<String, u32>,
    #[serde(skip)]
    clock: u64,
    #[serde(skip)]
    generics: BTreeMap<(TypeSymbol, Properties), DomainId>,
}

impl ContextModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.store.len()
    }

    pub fn is_empty(&self) -> bool {
        self.store.is_empty()
    }

    pub fn get(&self, id: &DomainId) -> Option<&ReferenceDomain> {
        self.store.get(id)
    }

    pub fn domain(&self, id: &DomainId) -> Result<&ReferenceDomain> {
        self.store
            .get(id)
            .ok_or_else(|| Error::UnknownDomain(id.clone()))
    }

    fn domain_mut(&mut self, id: &DomainId) -> Result<&mut ReferenceDomain> {
        let d = self
            .store
            .get_mut(id)
            .ok_or_else(|| Error::UnknownDomain(id.clone()))?;
        if d.generic {
            return Err(Error::GenericDomain(id.clone()));
        }
        Ok(d)
    }

    pub fn contains(&self, id: &DomainId) -> bool {
        self.store.contains_key(id)
    }

    /// Non-generic domain ids, most activated first.
    pub fn activation(&self) -> &[DomainId] {
        &self.activation
    }

    pub fn domains(&self) -> impl Iterator<Item = &ReferenceDomain> {
        self.store.values()
    }

    pub(crate) fn generic_for(&self, ty: &str, properties: &Properties) -> Option<&DomainId> {
        self.generics.get(&(ty.to_string(), properties.clone()))
    }

    fn tick(&mut self) -> u64 {
        self.clock += 1;
        self.clock
    }

    /// Picks a fresh identifier without reserving it.
    pub fn mint(&mut self, hint: &IdHint) -> Result<DomainId> {
        match hint {
            IdHint::Exact(tag) => {
                let id = DomainId::new(tag);
                if self.store.contains_key(&id) {
                    return Err(Error::DuplicateId(id));
                }
                Ok(id)
            }
            IdHint::Set(prefix) => {
                let id = DomainId::new(prefix);
                if !self.store.contains_key(&id) {
                    return Ok(id);
                }
                Ok(self.next_numbered(prefix, 2))
            }
            IdHint::Instance(prefix) => Ok(self.next_numbered(prefix, 1)),
        }
    }

    fn next_numbered(&mut self, prefix: &str, start: u32) -> DomainId {
        let counter = self.counters.entry(prefix.to_string()).or_insert(start - 1);
        loop {
            *counter += 1;
            let id = DomainId::new(&format!("{prefix}{counter}"));
            if !self.store.contains_key(&id) {
                return id;
            }
        }
    }

    /// Stores a new unpartitioned domain. Non-generic domains go to the head
    /// of the activation list.
    pub fn new_domain(&mut self, types: &TypeHierarchy, spec: DomainSpec) -> Result<DomainId> {
        if !types.contains(&spec.ty) {
            return Err(Error::UnknownType(spec.ty));
        }
        let hint = spec.hint.clone().unwrap_or_else(|| spec.default_hint());
        let id = self.mint(&hint)?;
        let generic = spec.generic;
        let domain = ReferenceDomain {
            id: id.clone(),
            cardinality: if generic { Cardinality::Unbounded } else { spec.cardinality },
            ty: spec.ty,
            properties: spec.properties,
            partitions: Vec::new(),
            source: spec.source,
            generic,
            gender: spec.gender,
        };
        if generic {
            self.generics
                .insert((domain.ty.clone(), domain.properties.clone()), id.clone());
        } else {
            self.activation.insert(0, id.clone());
        }
        self.store.insert(id.clone(), domain);
        Ok(id)
    }

    /// Appends a partition with no profiled cell and returns its index.
    pub fn add_partition(
        &mut self,
        domain: &DomainId,
        criterion: Criterion,
        cells: Vec<(String, DomainId)>,
    ) -> Result<usize> {
        let cells = cells.into_iter().map(|(v, m)| Cell::new(v, m)).collect();
        self.add_partition_cells(domain, criterion, cells)
    }

    pub fn add_partition_cells(
        &mut self,
        domain: &DomainId,
        criterion: Criterion,
        cells: Vec<Cell>,
    ) -> Result<usize> {
        let mut seen = BTreeSet::new();
        for cell in &cells {
            if !seen.insert(cell.value.as_str()) {
                return Err(Error::DuplicateValue {
                    domain: domain.clone(),
                    value: cell.value.clone(),
                });
            }
            if !self.store.contains_key(&cell.member) {
                return Err(Error::DanglingMember {
                    domain: domain.clone(),
                    member: cell.member.clone(),
                });
            }
        }
        let stamp = self.tick();
        let d = self.domain_mut(domain)?;
        check_capacity(d, &criterion, cells.len())?;
        d.partitions.push(Partition {
            criterion,
            cells,
            profiled: None,
            stamp,
        });
        Ok(d.partitions.len() - 1)
    }

    /// Adds one cell to an existing partition and returns its index.
    pub fn insert_cell(&mut self, domain: &DomainId, partition: usize, cell: Cell) -> Result<usize> {
        if !self.store.contains_key(&cell.member) {
            return Err(Error::DanglingMember {
                domain: domain.clone(),
                member: cell.member.clone(),
            });
        }
        let stamp = self.tick();
        let d = self.domain_mut(domain)?;
        let criterion = d
            .partitions
            .get(partition)
            .ok_or_else(|| Error::PartitionOutOfRange {
                domain: domain.clone(),
                index: partition,
            })?
            .criterion
            .clone();
        let cells = d.partitions[partition].cells.len() + 1;
        check_capacity(d, &criterion, cells)?;
        let p = &mut d.partitions[partition];
        if p.cells.iter().any(|c| c.value == cell.value) {
            return Err(Error::DuplicateValue {
                domain: domain.clone(),
                value: cell.value,
            });
        }
        p.cells.push(cell);
        p.stamp = stamp;
        Ok(p.cells.len() - 1)
    }

    /// Profiles one cell, clearing any other profiled cell of that partition.
    pub fn profile(&mut self, domain: &DomainId, partition: usize, cell: usize) -> Result<()> {
        let stamp = self.tick();
        let d = self.domain_mut(domain)?;
        if d.partitions.is_empty() {
            return Err(Error::PartitionOutOfRange {
                domain: domain.clone(),
                index: partition,
            });
        }
        let p = d
            .partitions
            .get_mut(partition)
            .ok_or_else(|| Error::PartitionOutOfRange {
                domain: domain.clone(),
                index: partition,
            })?;
        if cell >= p.cells.len() {
            return Err(Error::CellOutOfRange {
                domain: domain.clone(),
                partition,
                index: cell,
            });
        }
        p.profiled = Some(cell);
        p.stamp = stamp;
        Ok(())
    }

    pub fn focused_element(&self, domain: &DomainId) -> Option<&DomainId> {
        self.store.get(domain).and_then(ReferenceDomain::focused_element)
    }

    /// Moves a domain to the head of the activation list, keeping the order
    /// of the others.
    pub fn touch(&mut self, domain: &DomainId) -> Result<()> {
        let d = self.domain(domain)?;
        if d.generic {
            return Err(Error::NotActivatable(domain.clone()));
        }
        let pos = self
            .activation
            .iter()
            .position(|x| x == domain)
            .expect("non-generic domains are always activated");
        let id = self.activation.remove(pos);
        self.activation.insert(0, id);
        Ok(())
    }

    /// Checks every structural invariant of the store. Returns the first
    /// violation found.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        for (id, d) in &self.store {
            if &d.id != id {
                return Err(format!("{id} stored under a different key"));
            }
            if d.generic && d.cardinality != Cardinality::Unbounded {
                return Err(format!("generic {id} has finite cardinality"));
            }
            for (pi, p) in d.partitions.iter().enumerate() {
                let mut values = BTreeSet::new();
                for c in &p.cells {
                    if !values.insert(&c.value) {
                        return Err(format!("{id} partition {pi}: duplicate value {}", c.value));
                    }
                    if !self.store.contains_key(&c.member) {
                        return Err(format!("{id} partition {pi}: dangling {}", c.member));
                    }
                }
                if let Some(i) = p.profiled {
                    if i >= p.cells.len() {
                        return Err(format!("{id} partition {pi}: profiled index out of range"));
                    }
                }
                if p.criterion != Criterion::ByGroupRole
                    && d.cardinality < Cardinality::Finite(p.cells.len() as u32)
                {
                    return Err(format!(
                        "{id} partition {pi}: {} cells exceed cardinality {}",
                        p.cells.len(),
                        d.cardinality
                    ));
                }
            }
        }
        let active: BTreeSet<&DomainId> = self.activation.iter().collect();
        if active.len() != self.activation.len() {
            return Err("activation list repeats an id".into());
        }
        let expected: BTreeSet<&DomainId> =
            self.store.values().filter(|d| !d.generic).map(|d| &d.id).collect();
        if active != expected {
            return Err("activation list is not a permutation of the non-generic domains".into());
        }
        Ok(())
    }
}

/// Part-whole partitions relate one whole to its parts, so they are exempt
/// from the cell-count bound.
fn check_capacity(d: &ReferenceDomain, criterion: &Criterion, cells: usize) -> Result<()> {
    if *criterion != Criterion::ByGroupRole && d.cardinality < Cardinality::Finite(cells as u32) {
        return Err(Error::CardinalityExceeded {
            domain: d.id.clone(),
            cells,
            cardinality: d.cardinality.to_string(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::{TypeHierarchy, TypeNode};

    fn types() -> TypeHierarchy {
        TypeHierarchy::from_nodes(vec![
            TypeNode::new("MARBLE", None),
            TypeNode::new("FIGURE", None),
            TypeNode::new("CIRCLE", Some("FIGURE")),
            TypeNode::new("LINE", Some("FIGURE")),
        ])
        .unwrap()
    }

    fn marbles(ctx: &mut ContextModel) -> (DomainId, DomainId, DomainId) {
        let t = types();
        let group = ctx
            .new_domain(&t, DomainSpec::new("MARBLE", Cardinality::Finite(2), Source::Discourse))
            .unwrap();
        let blue = ctx
            .new_domain(
                &t,
                DomainSpec::new("MARBLE", Cardinality::Finite(1), Source::Discourse)
                    .property("color", "blue")
                    .hint(IdHint::Instance("m".into())),
            )
            .unwrap();
        let red = ctx
            .new_domain(
                &t,
                DomainSpec::new("MARBLE", Cardinality::Finite(1), Source::Discourse)
                    .property("color", "red")
                    .hint(IdHint::Instance("m".into())),
            )
            .unwrap();
        (group, blue, red)
    }

    #[test]
    fn new_domain_ids_follow_marble_figure() {
        let mut ctx = ContextModel::new();
        let (group, blue, red) = marbles(&mut ctx);
        assert_eq!(group.as_str(), "@M");
        assert_eq!(blue.as_str(), "@m1");
        assert_eq!(red.as_str(), "@m2");
        assert_eq!(ctx.activation(), &[red.clone(), blue.clone(), group.clone()]);
        assert!(ctx.domain(&group).unwrap().partitions.is_empty());
    }

    #[test]
    fn generic_domain_is_not_activated() {
        let mut ctx = ContextModel::new();
        let id = ctx
            .new_domain(
                &types(),
                DomainSpec::new("CIRCLE", Cardinality::Finite(3), Source::Conceptual)
                    .property("size", "big")
                    .generic(),
            )
            .unwrap();
        assert_eq!(id.as_str(), "@BC*");
        let d = ctx.domain(&id).unwrap();
        assert!(d.generic);
        assert_eq!(d.cardinality, Cardinality::Unbounded);
        assert!(ctx.activation().is_empty());
        assert!(ctx.touch(&id).is_err());
    }

    #[test]
    fn unknown_type_is_rejected() {
        let mut ctx = ContextModel::new();
        let err = ctx
            .new_domain(&types(), DomainSpec::new("ZORP", Cardinality::Finite(1), Source::Discourse))
            .unwrap_err();
        assert!(matches!(err, Error::UnknownType(t) if t == "ZORP"));
    }

    #[test]
    fn partitions_on_the_marble_group() {
        let mut ctx = ContextModel::new();
        let (group, blue, red) = marbles(&mut ctx);
        let by_color = ctx
            .add_partition(
                &group,
                Criterion::ByProperty("color".into()),
                vec![("red".into(), red.clone()), ("blue".into(), blue.clone())],
            )
            .unwrap();
        assert_eq!(by_color, 0);
        let by_position = ctx
            .add_partition(
                &group,
                Criterion::ByPosition("horizontal".into()),
                vec![("left".into(), blue.clone()), ("right".into(), red.clone())],
            )
            .unwrap();
        assert_eq!(by_position, 1);
        let err = ctx
            .add_partition(
                &group,
                Criterion::ByProperty("color".into()),
                vec![("red".into(), red.clone()), ("red".into(), blue.clone())],
            )
            .unwrap_err();
        assert!(matches!(err, Error::DuplicateValue { .. }));
        let err = ctx
            .add_partition(
                &group,
                Criterion::ByType,
                vec![("MARBLE".into(), DomainId::new("nope"))],
            )
            .unwrap_err();
        assert!(matches!(err, Error::DanglingMember { .. }));
        ctx.check_invariants().unwrap();
    }

    #[test]
    fn profiling_keeps_a_single_cell() {
        let mut ctx = ContextModel::new();
        let (group, blue, red) = marbles(&mut ctx);
        ctx.add_partition(
            &group,
            Criterion::ByProperty("color".into()),
            vec![("red".into(), red.clone()), ("blue".into(), blue.clone())],
        )
        .unwrap();
        assert_eq!(ctx.focused_element(&group), None);
        ctx.profile(&group, 0, 1).unwrap();
        assert_eq!(ctx.focused_element(&group), Some(&blue));
        ctx.profile(&group, 0, 0).unwrap();
        assert_eq!(ctx.domain(&group).unwrap().partitions[0].profiled, Some(0));
        assert_eq!(ctx.focused_element(&group), Some(&red));
        assert!(ctx.profile(&group, 0, 2).is_err());
        assert!(ctx.profile(&group, 1, 0).is_err());
        assert!(ctx.profile(&blue, 0, 0).is_err());
        assert_eq!(ctx.focused_element(&blue), None);
    }

    #[test]
    fn latest_profiled_partition_carries_focus() {
        let mut ctx = ContextModel::new();
        let (group, blue, red) = marbles(&mut ctx);
        ctx.add_partition(
            &group,
            Criterion::ByProperty("color".into()),
            vec![("red".into(), red.clone()), ("blue".into(), blue.clone())],
        )
        .unwrap();
        ctx.add_partition(
            &group,
            Criterion::ByPosition("horizontal".into()),
            vec![("left".into(), blue.clone()), ("right".into(), red.clone())],
        )
        .unwrap();
        ctx.profile(&group, 1, 1).unwrap();
        ctx.profile(&group, 0, 1).unwrap();
        assert_eq!(ctx.focused_element(&group), Some(&blue));
        ctx.profile(&group, 1, 1).unwrap();
        assert_eq!(ctx.focused_element(&group), Some(&red));
    }

    #[test]
    fn partition_cannot_outgrow_cardinality() {
        let mut ctx = ContextModel::new();
        let (_, blue, red) = marbles(&mut ctx);
        let err = ctx
            .add_partition(
                &blue,
                Criterion::ByType,
                vec![("a".into(), red.clone()), ("b".into(), blue.clone())],
            )
            .unwrap_err();
        assert!(matches!(err, Error::CardinalityExceeded { .. }));
    }

    #[test]
    fn touch_is_move_to_front() {
        let mut ctx = ContextModel::new();
        let t = types();
        let a = ctx
            .new_domain(&t, DomainSpec::new("LINE", Cardinality::Finite(1), Source::Discourse))
            .unwrap();
        let b = ctx
            .new_domain(&t, DomainSpec::new("LINE", Cardinality::Finite(1), Source::Discourse))
            .unwrap();
        assert_eq!(ctx.activation(), &[b.clone(), a.clone()]);
        ctx.touch(&a).unwrap();
        assert_eq!(ctx.activation(), &[a.clone(), b.clone()]);
        ctx.touch(&a).unwrap();
        assert_eq!(ctx.activation(), &[a.clone(), b.clone()]);
        assert!(matches!(
            ctx.touch(&DomainId::new("ghost")),
            Err(Error::UnknownDomain(_))
        ));
    }

    #[test]
    fn naming_prefix_uses_value_initials() {
        let mut props = Properties::new();
        props.insert("size".into(), "big".into());
        assert_eq!(naming_prefix("CIRCLE", &props), "bc");
        props.insert("orientation".into(), "horizontal".into());
        assert_eq!(naming_prefix("LINE", &props), "bhl");
        assert_eq!(naming_prefix("FIGURE", &Properties::new()), "f");
    }
}

//! Visual scene ingestion and perceptual grouping.
//!
//! Every scene entity becomes a perception-sourced domain. Grouping then
//! builds complex domains out of entities that look alike (same value for a
//! similarity key) or lie close together (single-link clusters under a
//! distance threshold).

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::domain::{
    Cardinality, ContextModel, Criterion, DomainId, DomainSpec, IdHint, Properties, Source,
};
use crate::error::{Error, Result};
use crate::kb::KnowledgeBase;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneEntity {
    pub id: String,
    #[serde(rename = "type")]
    pub ty: String,
    #[serde(default)]
    pub properties: Properties,
    pub position: [f64; 2],
}

#[derive(Deserialize)]
struct SceneFile {
    #[serde(default)]
    entities: Vec<SceneEntity>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupingParams {
    /// Maximum distance, in scene units, for two entities to be linked.
    pub proximity_threshold: f64,
    /// Property names tried after the type, in order.
    pub similarity_keys: Vec<String>,
}

impl Default for GroupingParams {
    fn default() -> Self {
        GroupingParams {
            proximity_threshold: 2.0,
            similarity_keys: ["color", "size", "shape", "state"]
                .into_iter()
                .map(String::from)
                .collect(),
        }
    }
}

impl GroupingParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.proximity_threshold.is_finite() && self.proximity_threshold > 0.0) {
            return Err(Error::InvalidParams(format!(
                "proximity threshold must be a positive number, got {}",
                self.proximity_threshold
            )));
        }
        Ok(())
    }
}

/// A scene loaded into a context, with the groups perceived so far.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PerceivedScene {
    entities: Vec<(DomainId, SceneEntity)>,
    groups: BTreeMap<Vec<DomainId>, DomainId>,
}

impl PerceivedScene {
    pub fn entities(&self) -> impl Iterator<Item = (&DomainId, &SceneEntity)> {
        self.entities.iter().map(|(id, e)| (id, e))
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    /// Group domains created so far, keyed by their sorted member ids.
    pub fn groups(&self) -> &BTreeMap<Vec<DomainId>, DomainId> {
        &self.groups
    }
}

pub fn load_scene(
    path: impl AsRef<Path>,
    kb: &KnowledgeBase,
    ctx: &mut ContextModel,
) -> Result<PerceivedScene> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    load_scene_str(&text, kb, ctx).map_err(|e| match e {
        Error::Json { source, .. } => Error::json(path.display().to_string(), source),
        other => other,
    })
}

pub fn load_scene_str(text: &str, kb: &KnowledgeBase, ctx: &mut ContextModel) -> Result<PerceivedScene> {
    let file: SceneFile = serde_json::from_str(text).map_err(|e| Error::json("scene", e))?;
    perceive(file.entities, kb, ctx)
}

/// Adds one perception domain per entity. The first entity ends up least
/// activated. Nothing is added if any entity is invalid.
pub fn perceive(
    entities: Vec<SceneEntity>,
    kb: &KnowledgeBase,
    ctx: &mut ContextModel,
) -> Result<PerceivedScene> {
    let mut seen = BTreeSet::new();
    for e in &entities {
        if !seen.insert(e.id.as_str()) {
            return Err(Error::DuplicateEntity(e.id.clone()));
        }
        if !kb.hierarchy.contains(&e.ty) {
            return Err(Error::UnknownType(e.ty.clone()));
        }
        if ctx.contains(&DomainId::new(&e.id)) {
            return Err(Error::DuplicateId(DomainId::new(&e.id)));
        }
    }
    let mut scene = PerceivedScene::default();
    for e in entities {
        let id = ctx.new_domain(
            &kb.hierarchy,
            DomainSpec::new(&e.ty, Cardinality::Finite(1), Source::Perception)
                .properties(e.properties.clone())
                .hint(IdHint::Exact(e.id.clone())),
        )?;
        scene.entities.push((id, e));
    }
    Ok(scene)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Key<'a> {
    Type,
    Property(&'a str),
}

fn key_value<'e>(e: &'e SceneEntity, key: Key<'_>) -> Option<&'e str> {
    match key {
        Key::Type => Some(e.ty.as_str()),
        Key::Property(p) => e.properties.get(p).map(String::as_str),
    }
}

/// Groups entities by similarity, then by proximity. Running it again on an
/// unchanged scene creates nothing. Returns the groups created or extended.
pub fn perceptual_group(
    ctx: &mut ContextModel,
    kb: &KnowledgeBase,
    scene: &mut PerceivedScene,
    params: &GroupingParams,
) -> Result<Vec<DomainId>> {
    params.validate()?;
    let mut keys = vec![Key::Type];
    keys.extend(params.similarity_keys.iter().map(|k| Key::Property(k.as_str())));
    let mut touched = Vec::new();

    for &key in &keys {
        let mut buckets: IndexMap<&str, Vec<usize>> = IndexMap::new();
        for (i, (_, e)) in scene.entities.iter().enumerate() {
            if let Some(v) = key_value(e, key) {
                buckets.entry(v).or_default().push(i);
            }
        }
        let buckets: Vec<Vec<usize>> = buckets.into_values().filter(|m| m.len() >= 2).collect();
        for members in buckets {
            if scene.groups.contains_key(&member_key(scene, &members)) {
                continue;
            }
            let Some(criterion) = distinguishing(scene, &members, &keys) else {
                continue;
            };
            let partitions = vec![value_partition(scene, &members, criterion)];
            touched.push(create_group(ctx, kb, scene, &members, partitions)?);
        }
    }

    let positions: Vec<[f64; 2]> = scene.entities.iter().map(|(_, e)| e.position).collect();
    for members in proximity_clusters(&positions, params.proximity_threshold) {
        let position = position_partition(scene, &members);
        if let Some(group) = scene.groups.get(&member_key(scene, &members)).cloned() {
            let has_position = ctx
                .domain(&group)?
                .partitions
                .iter()
                .any(|p| matches!(p.criterion, Criterion::ByPosition(_)));
            if !has_position {
                let (criterion, cells) = position;
                ctx.add_partition(&group, criterion, cells)?;
                touched.push(group);
            }
            continue;
        }
        let mut partitions = Vec::new();
        if let Some(criterion) = distinguishing(scene, &members, &keys) {
            partitions.push(value_partition(scene, &members, criterion));
        }
        partitions.push(position);
        touched.push(create_group(ctx, kb, scene, &members, partitions)?);
    }
    Ok(touched)
}

fn member_key(scene: &PerceivedScene, members: &[usize]) -> Vec<DomainId> {
    let mut ids: Vec<DomainId> = members.iter().map(|&i| scene.entities[i].0.clone()).collect();
    ids.sort();
    ids
}

/// First key whose values are present on every member and pairwise
/// distinct. Keys outside the similarity list are tried last, by name.
fn distinguishing(scene: &PerceivedScene, members: &[usize], keys: &[Key<'_>]) -> Option<Criterion> {
    let extra: BTreeSet<&str> = members
        .iter()
        .flat_map(|&i| scene.entities[i].1.properties.keys().map(String::as_str))
        .filter(|name| !keys.contains(&Key::Property(name)))
        .collect();
    let all = keys.iter().copied().chain(extra.into_iter().map(Key::Property));
    for key in all {
        let mut values = BTreeSet::new();
        let distinct = members.iter().all(|&i| match key_value(&scene.entities[i].1, key) {
            Some(v) => values.insert(v),
            None => false,
        });
        if distinct {
            return Some(match key {
                Key::Type => Criterion::ByType,
                Key::Property(p) => Criterion::ByProperty(p.to_string()),
            });
        }
    }
    None
}

fn value_partition(
    scene: &PerceivedScene,
    members: &[usize],
    criterion: Criterion,
) -> (Criterion, Vec<(String, DomainId)>) {
    let cells = members
        .iter()
        .map(|&i| {
            let (id, e) = &scene.entities[i];
            let value = match &criterion {
                Criterion::ByProperty(p) => e.properties[p].clone(),
                _ => e.ty.clone(),
            };
            (value, id.clone())
        })
        .collect();
    (criterion, cells)
}

/// Orders the members along the axis with the larger spread and labels them
/// from one end to the other.
fn position_partition(scene: &PerceivedScene, members: &[usize]) -> (Criterion, Vec<(String, DomainId)>) {
    let spread = |axis: usize| {
        let vals = members.iter().map(|&i| scene.entities[i].1.position[axis]);
        let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
        hi - lo
    };
    let (axis, low, high, name) = if spread(0) >= spread(1) {
        (0, "left", "right", "horizontal")
    } else {
        (1, "bottom", "top", "vertical")
    };
    let mut order: Vec<usize> = members.to_vec();
    order.sort_by(|&a, &b| {
        let pa = scene.entities[a].1.position[axis];
        let pb = scene.entities[b].1.position[axis];
        pa.total_cmp(&pb).then(a.cmp(&b))
    });
    let n = order.len();
    let cells = order
        .into_iter()
        .enumerate()
        .map(|(rank, i)| {
            let label = if rank == 0 {
                low.to_string()
            } else if rank == n - 1 {
                high.to_string()
            } else {
                format!("middle-{rank}")
            };
            (label, scene.entities[i].0.clone())
        })
        .collect();
    (Criterion::ByPosition(name.to_string()), cells)
}

fn create_group(
    ctx: &mut ContextModel,
    kb: &KnowledgeBase,
    scene: &mut PerceivedScene,
    members: &[usize],
    partitions: Vec<(Criterion, Vec<(String, DomainId)>)>,
) -> Result<DomainId> {
    let entities: Vec<&SceneEntity> = members.iter().map(|&i| &scene.entities[i].1).collect();
    let ty = kb.hierarchy.common_supertype(entities.iter().map(|e| e.ty.as_str()));
    let mut shared = entities[0].properties.clone();
    shared.retain(|k, v| entities.iter().all(|e| e.properties.get(k) == Some(v)));
    let prefix = crate::domain::naming_prefix(&ty, &Properties::new()).to_uppercase();
    let group = ctx.new_domain(
        &kb.hierarchy,
        DomainSpec::new(&ty, Cardinality::Finite(members.len() as u32), Source::Perception)
            .properties(shared)
            .hint(IdHint::Set(format!("{prefix}G"))),
    )?;
    for (criterion, cells) in partitions {
        ctx.add_partition(&group, criterion, cells)?;
    }
    scene.groups.insert(member_key(scene, members), group.clone());
    Ok(group)
}

/// Connected components of the "distance ≤ threshold" graph with at least
/// two members, each sorted, ordered by their first member.
pub fn proximity_clusters(positions: &[[f64; 2]], threshold: f64) -> Vec<Vec<usize>> {
    let n = positions.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = positions[i][0] - positions[j][0];
            let dy = positions[i][1] - positions[j][1];
            if dx.hypot(dy) <= threshold {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut clusters: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        clusters.entry(root).or_default().push(i);
    }
    let mut out: Vec<Vec<usize>> = clusters.into_values().filter(|c| c.len() >= 2).collect();
    out.sort_by_key(|c| c[0]);
    out
}

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{FeatureExpr, FeatureModelError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GroupKind {
    Mandatory,
    Optional,
    Or,
    Xor,
}

/// Children of one parent decomposed under a single group kind.
/// Mandatory and optional children each form a singleton group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    pub parent: String,
    pub kind: GroupKind,
    pub members: Vec<String>,
}

/// A feature tree with group decompositions and cross-tree constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureDiagram {
    root: String,
    /// Root first, then document order.
    features: Vec<String>,
    parents: BTreeMap<String, String>,
    groups: Vec<Group>,
    constraints: Vec<FeatureExpr>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct DiagramDoc {
    root: String,
    #[serde(default)]
    features: Vec<FeatureDoc>,
    #[serde(default)]
    constraints: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct FeatureDoc {
    name: String,
    parent: String,
    group: GroupKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    group_id: Option<i64>,
}

fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c == '_' || c.is_ascii_alphabetic())
        && chars.all(|c| c == '_' || c.is_ascii_alphanumeric())
        && name != "TRUE"
        && name != "FALSE"
}

impl FeatureDiagram {
    pub fn builder(root: impl Into<String>) -> DiagramBuilder {
        DiagramBuilder { root: root.into(), features: Vec::new(), constraints: Vec::new(), next_group: 0 }
    }

    /// Parses the JSON interchange form.
    pub fn from_json(text: &str) -> Result<Self, FeatureModelError> {
        let doc: DiagramDoc =
            serde_json::from_str(text).map_err(|e| FeatureModelError::Syntax(e.to_string()))?;
        let constraints = doc
            .constraints
            .iter()
            .map(|c| c.parse::<FeatureExpr>())
            .collect::<Result<Vec<_>, _>>()?;
        Self::assemble(doc.root, doc.features, constraints)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut features = Vec::new();
        for (gid, group) in self.groups.iter().enumerate() {
            for m in &group.members {
                features.push(FeatureDoc {
                    name: m.clone(),
                    parent: group.parent.clone(),
                    group: group.kind,
                    group_id: matches!(group.kind, GroupKind::Or | GroupKind::Xor).then_some(gid as i64),
                });
            }
        }
        // keep document order of features
        let order: BTreeMap<&str, usize> =
            self.features.iter().enumerate().map(|(i, f)| (f.as_str(), i)).collect();
        features.sort_by_key(|f| order[f.name.as_str()]);
        serde_json::to_value(DiagramDoc {
            root: self.root.clone(),
            features,
            constraints: self.constraints.iter().map(ToString::to_string).collect(),
        })
        .expect("diagram serializes")
    }

    fn assemble(
        root: String,
        docs: Vec<FeatureDoc>,
        constraints: Vec<FeatureExpr>,
    ) -> Result<Self, FeatureModelError> {
        if !is_identifier(&root) {
            return Err(FeatureModelError::Syntax(format!("invalid feature name `{root}`")));
        }
        let mut features = vec![root.clone()];
        let mut parents: BTreeMap<String, String> = BTreeMap::new();
        for doc in &docs {
            if !is_identifier(&doc.name) {
                return Err(FeatureModelError::Syntax(format!("invalid feature name `{}`", doc.name)));
            }
            if doc.name == root {
                return Err(FeatureModelError::NotATree(format!("root `{root}` cannot have a parent")));
            }
            if let Some(existing) = parents.get(&doc.name) {
                return Err(if *existing == doc.parent {
                    FeatureModelError::DuplicateFeature(doc.name.clone())
                } else {
                    FeatureModelError::NotATree(format!(
                        "`{}` has two parents: `{existing}` and `{}`",
                        doc.name, doc.parent
                    ))
                });
            }
            parents.insert(doc.name.clone(), doc.parent.clone());
            features.push(doc.name.clone());
        }
        if let Some(parent) = parents.values().find(|p| **p != root && !parents.contains_key(*p)) {
            return Err(FeatureModelError::UnknownFeature(parent.clone()));
        }
        for child in parents.keys() {
            // every ancestor chain must reach the root
            let mut cur = child;
            let mut steps = 0;
            while *cur != root {
                cur = &parents[cur];
                steps += 1;
                if steps > parents.len() {
                    return Err(FeatureModelError::NotATree(format!("cycle through `{child}`")));
                }
            }
        }

        let mut groups: Vec<Group> = Vec::new();
        let mut keyed: BTreeMap<i64, usize> = BTreeMap::new();
        for doc in docs {
            match doc.group {
                GroupKind::Mandatory | GroupKind::Optional => groups.push(Group {
                    parent: doc.parent,
                    kind: doc.group,
                    members: vec![doc.name],
                }),
                GroupKind::Or | GroupKind::Xor => {
                    let id = doc.group_id.ok_or_else(|| {
                        FeatureModelError::Syntax(format!("`{}` is in an OR/XOR group without groupId", doc.name))
                    })?;
                    match keyed.get(&id) {
                        Some(&gi) => {
                            let g = &mut groups[gi];
                            if g.parent != doc.parent || g.kind != doc.group {
                                return Err(FeatureModelError::Syntax(format!(
                                    "groupId {id} mixes parents or group kinds"
                                )));
                            }
                            g.members.push(doc.name);
                        }
                        None => {
                            keyed.insert(id, groups.len());
                            groups.push(Group { parent: doc.parent, kind: doc.group, members: vec![doc.name] });
                        }
                    }
                }
            }
        }

        let known: BTreeSet<&str> = features.iter().map(String::as_str).collect();
        for c in &constraints {
            if let Some(unknown) = c.variables().into_iter().find(|v| !known.contains(v)) {
                return Err(FeatureModelError::UnknownFeature(unknown.to_string()));
            }
        }
        Ok(FeatureDiagram { root, features, parents, groups, constraints })
    }

    pub fn root(&self) -> &str {
        &self.root
    }

    /// All feature names, root first.
    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn contains(&self, feature: &str) -> bool {
        feature == self.root || self.parents.contains_key(feature)
    }

    pub fn parent(&self, feature: &str) -> Option<&str> {
        self.parents.get(feature).map(String::as_str)
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn constraints(&self) -> &[FeatureExpr] {
        &self.constraints
    }

    /// First variable of `e` that is not a feature of this diagram.
    pub fn unknown_variable<'e>(&self, e: &'e FeatureExpr) -> Option<&'e str> {
        e.variables().into_iter().find(|v| !self.contains(v))
    }
}

/// Programmatic construction, validated like the JSON form.
#[derive(Debug)]
pub struct DiagramBuilder {
    root: String,
    features: Vec<FeatureDoc>,
    constraints: Vec<FeatureExpr>,
    next_group: i64,
}

impl DiagramBuilder {
    fn child(mut self, parent: &str, name: &str, group: GroupKind, group_id: Option<i64>) -> Self {
        self.features.push(FeatureDoc { name: name.into(), parent: parent.into(), group, group_id });
        self
    }

    pub fn mandatory(self, parent: &str, name: &str) -> Self {
        self.child(parent, name, GroupKind::Mandatory, None)
    }

    pub fn optional(self, parent: &str, name: &str) -> Self {
        self.child(parent, name, GroupKind::Optional, None)
    }

    pub fn or_group(self, parent: &str, members: &[&str]) -> Self {
        self.group(parent, GroupKind::Or, members)
    }

    pub fn xor_group(self, parent: &str, members: &[&str]) -> Self {
        self.group(parent, GroupKind::Xor, members)
    }

    fn group(mut self, parent: &str, kind: GroupKind, members: &[&str]) -> Self {
        let id = self.next_group;
        self.next_group += 1;
        for m in members {
            self = self.child(parent, m, kind, Some(id));
        }
        self
    }

    pub fn constraint(mut self, e: FeatureExpr) -> Self {
        self.constraints.push(e);
        self
    }

    pub fn build(self) -> Result<FeatureDiagram, FeatureModelError> {
        FeatureDiagram::assemble(self.root, self.features, self.constraints)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_feature_document() {
        let d = FeatureDiagram::from_json(r#"{"root":"r"}"#).unwrap();
        assert_eq!(d.features(), ["r"]);
        assert!(d.groups().is_empty());
    }

    #[test]
    fn two_parents_is_not_a_tree() {
        let doc = r#"{"root":"r","features":[
            {"name":"a","parent":"r","group":"OPTIONAL"},
            {"name":"b","parent":"r","group":"OPTIONAL"},
            {"name":"x","parent":"a","group":"OPTIONAL"},
            {"name":"x","parent":"b","group":"MANDATORY"}]}"#;
        assert!(matches!(FeatureDiagram::from_json(doc), Err(FeatureModelError::NotATree(_))));
    }

    #[test]
    fn rejects_malformed_documents() {
        let cases = [
            (r#"{"root":"r""#, "syntax"),
            (r#"{"root":"r","features":[{"name":"a","parent":"r","group":"OPTIONAL"},{"name":"a","parent":"r","group":"OPTIONAL"}]}"#, "dup"),
            (r#"{"root":"r","features":[{"name":"a","parent":"zz","group":"OPTIONAL"}]}"#, "unknown"),
            (r#"{"root":"r","constraints":["r && q"]}"#, "unknown"),
            (r#"{"root":"r","features":[{"name":"a","parent":"b","group":"OPTIONAL"},{"name":"b","parent":"a","group":"OPTIONAL"}]}"#, "tree"),
            (r#"{"root":"r","features":[{"name":"r","parent":"r","group":"OPTIONAL"}]}"#, "tree"),
            (r#"{"root":"r","features":[{"name":"a","parent":"r","group":"XOR"}]}"#, "syntax"),
            (r#"{"root":"r","features":[{"name":"9a","parent":"r","group":"OPTIONAL"}]}"#, "syntax"),
            (r#"{"root":"r","features":[{"name":"a","parent":"r","group":"SOMETIMES"}]}"#, "syntax"),
        ];
        for (doc, kind) in cases {
            let err = FeatureDiagram::from_json(doc).unwrap_err();
            let ok = match kind {
                "syntax" => matches!(err, FeatureModelError::Syntax(_)),
                "dup" => matches!(err, FeatureModelError::DuplicateFeature(_)),
                "unknown" => matches!(err, FeatureModelError::UnknownFeature(_)),
                "tree" => matches!(err, FeatureModelError::NotATree(_)),
                _ => unreachable!(),
            };
            assert!(ok, "{doc}: {err:?}");
        }
    }

    #[test]
    fn json_round_trip() {
        let d = FeatureDiagram::builder("r")
            .mandatory("r", "a")
            .xor_group("a", &["x", "y"])
            .optional("r", "o")
            .or_group("r", &["p", "q"])
            .constraint("o && !x || y".parse().unwrap())
            .build()
            .unwrap();
        let back = FeatureDiagram::from_json(&d.to_json().to_string()).unwrap();
        assert_eq!(d.features(), back.features());
        assert_eq!(d.constraints(), back.constraints());
        assert_eq!(d.groups().len(), back.groups().len());
    }
}

//! Feature lineage DAG: ancestor/descendant closures and related-feature
//! queries for the investigation view.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schema::FeatureSchema;

/// Edges point from parent to child ("child was computed from parent").
#[derive(Debug, Clone, PartialEq)]
pub struct LineageGraph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Related {
    pub ancestors: Vec<String>,
    pub descendants: Vec<String>,
}

impl LineageGraph {
    /// Builds and validates the graph over `nodes`. Duplicate edges collapse.
    pub fn new(nodes: impl IntoIterator<Item = String>, edges: &[(String, String)]) -> Result<Self> {
        let names: Vec<String> = nodes.into_iter().collect();
        let index: HashMap<String, usize> = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let mut parents = vec![Vec::new(); names.len()];
        let mut children = vec![Vec::new(); names.len()];
        let lookup = |n: &String| {
            index
                .get(n)
                .copied()
                .ok_or_else(|| Error::UnknownLineageNode(n.clone()))
        };
        for (p, c) in edges {
            let (p, c) = (lookup(p)?, lookup(c)?);
            if !children[p].contains(&c) {
                children[p].push(c);
                parents[c].push(p);
            }
        }
        let graph = Self {
            names,
            index,
            parents,
            children,
        };
        if let Some(cycle) = graph.find_cycle() {
            return Err(Error::LineageCycle(cycle));
        }
        Ok(graph)
    }

    pub fn from_schema(schema: &FeatureSchema) -> Result<Self> {
        Self::new(schema.names().map(str::to_string), &schema.lineage)
    }

    pub fn nodes(&self) -> &[String] {
        &self.names
    }

    pub fn edges(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (p, kids) in self.children.iter().enumerate() {
            for &c in kids {
                out.push((self.names[p].clone(), self.names[c].clone()));
            }
        }
        out
    }

    fn id(&self, feature: &str) -> Result<usize> {
        self.index
            .get(feature)
            .copied()
            .ok_or_else(|| Error::UnknownFeature(feature.to_string()))
    }

    /// Iterative three-color DFS; returns the node names along one cycle,
    /// closed by repeating its first node.
    fn find_cycle(&self) -> Option<Vec<String>> {
        const WHITE: u8 = 0;
        const GRAY: u8 = 1;
        const BLACK: u8 = 2;
        let n = self.names.len();
        let mut color = vec![WHITE; n];
        for root in 0..n {
            if color[root] != WHITE {
                continue;
            }
            let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
            color[root] = GRAY;
            while let Some(&mut (node, ref mut next)) = stack.last_mut() {
                if let Some(&child) = self.children[node].get(*next) {
                    *next += 1;
                    match color[child] {
                        WHITE => {
                            color[child] = GRAY;
                            stack.push((child, 0));
                        }
                        GRAY => {
                            let from = stack.iter().position(|&(v, _)| v == child).unwrap();
                            let mut cycle: Vec<String> =
                                stack[from..].iter().map(|&(v, _)| self.names[v].clone()).collect();
                            cycle.push(self.names[child].clone());
                            return Some(cycle);
                        }
                        _ => {}
                    }
                } else {
                    color[node] = BLACK;
                    stack.pop();
                }
            }
        }
        None
    }

    fn closure(&self, start: usize, adjacency: &[Vec<usize>]) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        let mut frontier = vec![start];
        while let Some(v) = frontier.pop() {
            for &w in &adjacency[v] {
                if seen.insert(w) {
                    frontier.push(w);
                }
            }
        }
        seen.remove(&start);
        seen
    }

    fn to_names(&self, ids: impl IntoIterator<Item = usize>) -> Vec<String> {
        ids.into_iter().map(|i| self.names[i].clone()).collect()
    }

    /// Every feature `feature` was transitively computed from, in node order.
    pub fn ancestors(&self, feature: &str) -> Result<Vec<String>> {
        Ok(self.to_names(self.closure(self.id(feature)?, &self.parents)))
    }

    /// Every feature transitively computed from `feature`, in node order.
    pub fn descendants(&self, feature: &str) -> Result<Vec<String>> {
        Ok(self.to_names(self.closure(self.id(feature)?, &self.children)))
    }

    /// Union (or, with `common_only`, intersection) of the per-feature
    /// ancestor and descendant sets, excluding the investigated features.
    pub fn related<S: AsRef<str>>(&self, features: &[S], common_only: bool) -> Result<Related> {
        if features.is_empty() {
            return Err(Error::InvalidArgument("related() needs at least one feature".into()));
        }
        let ids: Vec<usize> = features.iter().map(|f| self.id(f.as_ref())).collect::<Result<_>>()?;
        let combine = |adjacency: &[Vec<usize>]| {
            let mut sets = ids.iter().map(|&i| self.closure(i, adjacency));
            let first = sets.next().unwrap_or_default();
            let mut acc = sets.fold(first, |acc, s| {
                if common_only {
                    acc.intersection(&s).copied().collect()
                } else {
                    acc.union(&s).copied().collect()
                }
            });
            for i in &ids {
                acc.remove(i);
            }
            self.to_names(acc)
        };
        Ok(Related {
            ancestors: combine(&self.parents),
            descendants: combine(&self.children),
        })
    }
}

/// Checks acyclicity and endpoint membership of the schema's lineage.
pub fn validate(schema: &FeatureSchema) -> Result<()> {
    LineageGraph::from_schema(schema).map(|_| ())
}

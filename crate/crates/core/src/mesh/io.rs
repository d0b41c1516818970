//! JSON mesh input.
//!
//! ```json
//! { "vertices": [[0,0],[1,0],[0,1]], "cells": [[0,1,2]],
//!   "boundary_tags": { "wall": [0, [1,2]] } }
//! ```
//!
//! Tag entries are either indices into the edge list (edges sorted by their
//! ascending vertex pair) or explicit vertex pairs.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{BuildOptions, Convention, SimplicialComplex};
use crate::{Error, Result, Vec2};

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum TagEdge {
    Index(usize),
    Pair([usize; 2]),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeshFile {
    pub vertices: Vec<[f64; 2]>,
    pub cells: Vec<[usize; 3]>,
    #[serde(default)]
    pub boundary_tags: BTreeMap<String, Vec<TagEdge>>,
    /// Orientation convention per tag; tags default to fluid-outward.
    #[serde(default)]
    pub conventions: BTreeMap<String, Convention>,
    #[serde(default)]
    pub period: Option<[f64; 2]>,
}

impl MeshFile {
    pub fn build(&self) -> Result<SimplicialComplex> {
        let vertices: Vec<Vec2> = self.vertices.iter().map(|v| Vec2::new(v[0], v[1])).collect();
        let period = self.period.map(|p| Vec2::new(p[0], p[1]));
        let bare = SimplicialComplex::build(
            vertices.clone(),
            &self.cells,
            BuildOptions { period, ..Default::default() },
        )?;
        let mut tags = BTreeMap::new();
        for (name, list) in &self.boundary_tags {
            let mut edges = Vec::with_capacity(list.len());
            for t in list {
                let e = match *t {
                    TagEdge::Index(e) => e,
                    TagEdge::Pair([a, b]) => {
                        let key = [a.min(b), a.max(b)];
                        bare.edges().binary_search(&key).map_err(|_| {
                            Error::InvalidMesh(format!("tag '{name}': ({a},{b}) is not an edge"))
                        })?
                    }
                };
                edges.push(e);
            }
            let conv = self.conventions.get(name).copied().unwrap_or(Convention::FluidOutward);
            tags.insert(name.clone(), (edges, conv));
        }
        for name in self.conventions.keys() {
            if !self.boundary_tags.contains_key(name) {
                return Err(Error::UnknownComponent(name.clone()));
            }
        }
        SimplicialComplex::build(vertices, &self.cells, BuildOptions { period, tags, ..Default::default() })
    }

    pub fn from_complex(c: &SimplicialComplex) -> Self {
        MeshFile {
            vertices: c.vertices().iter().map(|v| [v.x, v.y]).collect(),
            cells: c.triangles().to_vec(),
            boundary_tags: c
                .components()
                .filter(|comp| comp.name != "boundary")
                .map(|comp| (comp.name.clone(), comp.edges.iter().map(|&e| TagEdge::Index(e)).collect()))
                .collect(),
            conventions: c
                .components()
                .filter(|comp| comp.name != "boundary")
                .map(|comp| (comp.name.clone(), comp.convention))
                .collect(),
            period: c.period().map(|p| [p.x, p.y]),
        }
    }
}

pub fn load_mesh_json(path: &Path) -> Result<SimplicialComplex> {
    let text = std::fs::read_to_string(path)?;
    let file: MeshFile = serde_json::from_str(&text)?;
    file.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_by_index_or_pair() {
        let json = r#"{
            "vertices": [[0,0],[1,0],[0.5,0.8],[0.5,-0.8]],
            "cells": [[0,1,2],[1,0,3]],
            "boundary_tags": {"upper": [[1,2],[2,0]], "lower": [2]}
        }"#;
        let f: MeshFile = serde_json::from_str(json).unwrap();
        let c = f.build().unwrap();
        // sorted edges: (0,1) (0,2) (0,3) (1,2) (1,3)
        assert_eq!(c.component("upper").unwrap().edges, vec![1, 3]);
        assert_eq!(c.component("lower").unwrap().edges, vec![2]);
        assert_eq!(c.component("boundary").unwrap().edges, vec![4]);
    }

    #[test]
    fn round_trip() {
        let c = super::super::unit_square(3).unwrap();
        let f = MeshFile::from_complex(&c);
        let text = serde_json::to_string(&f).unwrap();
        let back: MeshFile = serde_json::from_str(&text).unwrap();
        let d = back.build().unwrap();
        assert_eq!(d.edges(), c.edges());
        assert_eq!(d.component("top").unwrap().edges, c.component("top").unwrap().edges);
    }

    #[test]
    fn interior_edge_tag_rejected() {
        let json = r#"{"vertices": [[0,0],[1,0],[0.5,0.8],[0.5,-0.8]],
            "cells": [[0,1,2],[1,0,3]], "boundary_tags": {"bad": [[0,1]]}}"#;
        let f: MeshFile = serde_json::from_str(json).unwrap();
        assert!(matches!(f.build(), Err(Error::InvalidMesh(_))));
    }
}

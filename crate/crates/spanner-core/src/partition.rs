//! Heavy/dense/sparse vertex classification and the induced edge split.
//!
//! * heavy: deg(v)^2 >= n (exact integer comparison);
//! * dense: heavy, adjacent to a heavy vertex, or with more than
//!   n^(1/2 - 1/k) light vertices within floor(k/2) - 1 hops of it in
//!   G_light (the strict threshold reading, epsilon-guarded);
//! * sparse: everything else.
//!
//! Edges split accordingly: an edge with at least one sparse endpoint is
//! sparse, the rest (both endpoints dense) are dense.

use crate::graph::{EdgeSet, Graph};
use crate::nn::NnResult;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct Partition {
    /// deg(v)^2 >= n.
    pub heavy: Vec<bool>,
    /// Includes every heavy vertex.
    pub dense: Vec<bool>,
    /// Edges with at least one sparse endpoint.
    pub e_sparse: EdgeSet,
    /// Edges with both endpoints dense.
    pub e_dense: EdgeSet,
}

impl Partition {
    pub fn is_sparse(&self, v: u32) -> bool {
        !self.dense[v as usize]
    }

    pub fn sparse_vertices(&self) -> impl Iterator<Item = u32> + '_ {
        self.dense
            .iter()
            .enumerate()
            .filter(|(_, &d)| !d)
            .map(|(v, _)| v as u32)
    }

    pub fn dense_vertices(&self) -> impl Iterator<Item = u32> + '_ {
        self.dense
            .iter()
            .enumerate()
            .filter(|(_, &d)| d)
            .map(|(v, _)| v as u32)
    }
}

/// Classifies every vertex using the neighborhood sizes collected by the
/// nearest-neighbors protocol, and splits the edge set.
pub fn classify(g: &Graph, k: u32, nn: &NnResult) -> Result<Partition> {
    if nn.n() != g.n() {
        return Err(Error::InvalidInput(format!(
            "neighborhood data is for {} vertices, graph has {}",
            nn.n(),
            g.n()
        )));
    }
    if nn.k != k {
        return Err(Error::InvalidInput(format!(
            "neighborhood data was computed for k = {}, requested k = {k}",
            nn.k
        )));
    }
    let n = g.n();
    let heavy: Vec<bool> = g
        .vertices()
        .map(|v| {
            let d = g.degree(v) as u64;
            d * d >= n as u64
        })
        .collect();
    if heavy != nn.heavy {
        return Err(Error::InvalidInput(
            "neighborhood data disagrees on heavy vertices; wrong graph?".into(),
        ));
    }

    let dense: Vec<bool> = g
        .vertices()
        .map(|v| {
            heavy[v as usize]
                || g.neighbors(v).iter().any(|&w| heavy[w as usize])
                || nn.radius_dense[v as usize]
        })
        .collect();

    let mut e_sparse = EdgeSet::new(n);
    let mut e_dense = EdgeSet::new(n);
    for (u, v) in g.edges() {
        if dense[u as usize] && dense[v as usize] {
            e_dense.insert(u, v);
        } else {
            e_sparse.insert(u, v);
        }
    }
    Ok(Partition {
        heavy,
        dense,
        e_sparse,
        e_dense,
    })
}

use serde::{Deserialize, Serialize};

use crate::sim::NodeId;

use super::ScenarioError;

/// Side of one basic component square, and the gap between squares.
pub const BC_SIDE_M: f64 = 10.0;
pub const BC_GAP_M: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodePos {
    pub id: NodeId,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Topology {
    pub nodes: Vec<NodePos>,
}

impl Topology {
    pub fn new(nodes: Vec<NodePos>) -> Result<Self, ScenarioError> {
        let t = Self { nodes };
        t.validate()?;
        Ok(t)
    }

    /// Ids must be exactly `0..len` in order and positions finite.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        for (i, n) in self.nodes.iter().enumerate() {
            if n.id as usize != i {
                return Err(ScenarioError::invalid(
                    "nodes",
                    format!("node at index {i} has id {}; ids must be 0..n in order", n.id),
                ));
            }
            if !(n.x.is_finite() && n.y.is_finite()) {
                return Err(ScenarioError::invalid(
                    "nodes",
                    format!("node {} has a non-finite position", n.id),
                ));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn distance(&self, a: NodeId, b: NodeId) -> f64 {
        let (p, q) = (&self.nodes[a as usize], &self.nodes[b as usize]);
        (p.x - q.x).hypot(p.y - q.y)
    }

    pub fn max_distance(&self) -> f64 {
        let mut best = 0.0f64;
        for (i, p) in self.nodes.iter().enumerate() {
            for q in &self.nodes[i + 1..] {
                best = best.max((p.x - q.x).hypot(p.y - q.y));
            }
        }
        best
    }
}

/// `bc_count` 10 m squares tiled row-major on a near-square grid, 10 m apart.
///
/// Square `s` sits in column `s % cols`, row `s / cols` with
/// `cols = ceil(sqrt(bc_count))`; its corners are numbered
/// (x, y), (x+10, y), (x, y+10), (x+10, y+10).
pub fn build_mesh(bc_count: u32) -> Result<Topology, ScenarioError> {
    if bc_count < 1 {
        return Err(ScenarioError::invalid("bc_count", "must be at least 1".into()));
    }
    let cols = (f64::from(bc_count).sqrt().ceil() as u32).max(1);
    let pitch = BC_SIDE_M + BC_GAP_M;
    let mut nodes = Vec::with_capacity(4 * bc_count as usize);
    for s in 0..bc_count {
        let ox = f64::from(s % cols) * pitch;
        let oy = f64::from(s / cols) * pitch;
        for (dx, dy) in [(0.0, 0.0), (BC_SIDE_M, 0.0), (0.0, BC_SIDE_M), (BC_SIDE_M, BC_SIDE_M)] {
            let id = nodes.len() as NodeId;
            nodes.push(NodePos {
                id,
                x: ox + dx,
                y: oy + dy,
            });
        }
    }
    Ok(Topology { nodes })
}

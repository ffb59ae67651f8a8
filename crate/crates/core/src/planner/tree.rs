use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Cell, GridGeometry};

use super::{cell_distance, PlannerConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct NodeId(pub(crate) usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// One search node. `g` is the accumulated travel time in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanNode {
    pub cell: Cell,
    pub frame: u32,
    pub g: f64,
    pub f: f64,
    pub heading: f64,
    pub parent: Option<NodeId>,
}

/// Arena of every node created during one search.
#[derive(Debug, Clone)]
pub struct SearchTree {
    nodes: Vec<PlanNode>,
    resolution: f64,
    frame_period: f64,
    speed: f64,
}

impl SearchTree {
    pub fn new(g: &GridGeometry, cfg: &PlannerConfig) -> Self {
        SearchTree {
            nodes: Vec::new(),
            resolution: g.resolution(),
            frame_period: g.frame_period(),
            speed: cfg.speed,
        }
    }

    pub fn push(&mut self, node: PlanNode) -> NodeId {
        self.nodes.push(node);
        NodeId(self.nodes.len() - 1)
    }

    pub fn get(&self, id: NodeId) -> &PlanNode {
        &self.nodes[id.0]
    }

    #[cfg(test)]
    pub(crate) fn get_mut(&mut self, id: NodeId) -> &mut PlanNode {
        &mut self.nodes[id.0]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len()).map(NodeId)
    }

    fn step_time(&self, from: Cell, to: Cell) -> f64 {
        if from == to {
            self.frame_period
        } else {
            cell_distance(from, to) * self.resolution / self.speed
        }
    }

    /// Node ids from `start` to `node` following parent links.
    pub fn chain(&self, node: NodeId, start: NodeId) -> Result<Vec<NodeId>> {
        let mut chain = vec![node];
        let mut cur = node;
        while cur != start {
            if chain.len() > self.nodes.len() {
                return Err(Error::Invariant(format!(
                    "parent chain from node {} loops",
                    node.0
                )));
            }
            cur = self.nodes[cur.0].parent.ok_or_else(|| {
                Error::Invariant(format!(
                    "node {} is not connected to start node {}",
                    node.0, start.0
                ))
            })?;
            chain.push(cur);
        }
        chain.reverse();
        Ok(chain)
    }

    /// Travel time `T_c` from `start` to `node`, summed edge by edge along
    /// the parent chain.
    pub fn find_parent(&self, node: NodeId, start: NodeId) -> Result<f64> {
        let chain = self.chain(node, start)?;
        // Summed start-first so the result reproduces `g` bit for bit.
        Ok(chain
            .windows(2)
            .map(|w| self.step_time(self.get(w[0]).cell, self.get(w[1]).cell))
            .fold(0.0, |acc, dt| acc + dt))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(cell: (usize, usize), g: f64, parent: Option<NodeId>) -> PlanNode {
        PlanNode {
            cell: cell.into(),
            frame: 0,
            g,
            f: g,
            heading: 0.0,
            parent,
        }
    }

    fn tree() -> SearchTree {
        let cfg = PlannerConfig {
            speed: 1.0,
            ..PlannerConfig::default()
        };
        SearchTree::new(&GridGeometry::unit(10, 10), &cfg)
    }

    #[test]
    fn start_has_zero_time() {
        let mut t = tree();
        let s = t.push(node((0, 0), 0.0, None));
        assert_eq!(t.find_parent(s, s).unwrap(), 0.0);
    }

    #[test]
    fn straight_chain() {
        let mut t = tree();
        let s = t.push(node((0, 0), 0.0, None));
        let a = t.push(node((0, 1), 1.0, Some(s)));
        let b = t.push(node((0, 2), 2.0, Some(a)));
        let c = t.push(node((0, 3), 3.0, Some(b)));
        assert_eq!(t.find_parent(c, s).unwrap(), 3.0);
    }

    #[test]
    fn chain_with_diagonal() {
        let mut t = tree();
        let s = t.push(node((0, 0), 0.0, None));
        let a = t.push(node((0, 1), 1.0, Some(s)));
        let b = t.push(node((1, 2), 0.0, Some(a)));
        let c = t.push(node((1, 3), 0.0, Some(b)));
        let got = t.find_parent(c, s).unwrap();
        assert!((got - (2.0 + 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn broken_chains_are_invariant_errors() {
        let mut t = tree();
        let s = t.push(node((0, 0), 0.0, None));
        let lone = t.push(node((3, 3), 0.0, None));
        assert!(matches!(t.find_parent(lone, s), Err(Error::Invariant(_))));

        let a = t.push(node((0, 1), 0.0, None));
        let b = t.push(node((0, 2), 0.0, Some(a)));
        t.get_mut(a).parent = Some(b);
        assert!(matches!(t.find_parent(b, s), Err(Error::Invariant(_))));
    }
}

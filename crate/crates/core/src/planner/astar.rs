use std::collections::BinaryHeap;

use crate::error::Result;
use crate::geometry::{Cell, GridGeometry};
use crate::raster::PixelMask;

use super::{
    check_endpoints, move_heading, step, NodeId, OpenEntry, PlanNode, PlannerConfig,
    SearchOutcome, SearchTree,
};

/// A path over grid cells with its total travel time.
#[derive(Debug, Clone, PartialEq)]
pub struct CellPath {
    pub cells: Vec<Cell>,
    pub cost: f64,
    /// Node ids in the search tree, start first.
    pub nodes: Vec<NodeId>,
}

impl CellPath {
    /// Cumulative travel time at each cell.
    pub fn times(&self, tree: &SearchTree) -> Vec<f64> {
        self.nodes.iter().map(|&id| tree.get(id).g).collect()
    }
}

/// A* over static obstacles with the Euclidean heuristic.
///
/// Ties are broken by smaller heuristic, then row-major cell order.
pub fn classical_astar(
    g: &GridGeometry,
    obstacles: &PixelMask,
    start: Cell,
    goal: Cell,
    cfg: &PlannerConfig,
) -> Result<SearchOutcome<CellPath>> {
    cfg.validate()?;
    check_endpoints(g, obstacles, start, goal)?;

    let mut tree = SearchTree::new(g, cfg);
    let mut best_g = vec![f64::INFINITY; g.len()];
    let mut best_node: Vec<Option<NodeId>> = vec![None; g.len()];
    let mut closed = vec![false; g.len()];
    let mut open = BinaryHeap::new();

    let h0 = cfg.heuristic(g, start, goal);
    let root = tree.push(PlanNode {
        cell: start,
        frame: 0,
        g: 0.0,
        f: h0,
        heading: cfg.initial_heading,
        parent: None,
    });
    best_g[g.index(start)] = 0.0;
    best_node[g.index(start)] = Some(root);
    open.push(OpenEntry {
        f: h0,
        h: h0,
        cell_index: g.index(start),
        frame: 0,
        node: root,
    });

    let mut expansions = 0;
    while let Some(entry) = open.pop() {
        if best_node[entry.cell_index] != Some(entry.node) {
            continue; // superseded by a cheaper arrival
        }
        if closed[entry.cell_index] {
            continue;
        }
        if expansions >= cfg.max_expansions {
            return Ok(SearchOutcome {
                path: None,
                expansions,
                budget_exhausted: true,
                collision_unavoidable: false,
                tree,
            });
        }
        closed[entry.cell_index] = true;
        expansions += 1;
        let (cell, cost) = {
            let n = tree.get(entry.node);
            (n.cell, n.g)
        };
        if cell == goal {
            let nodes = tree.chain(entry.node, root)?;
            let cells = nodes.iter().map(|&id| tree.get(id).cell).collect();
            return Ok(SearchOutcome {
                path: Some(CellPath { cells, cost, nodes }),
                expansions,
                budget_exhausted: false,
                collision_unavoidable: false,
                tree,
            });
        }
        for &off in cfg.connectivity.offsets() {
            let Some(next) = step(g, cell, off) else { continue };
            let idx = g.index(next);
            if obstacles.get_cell(next) {
                continue;
            }
            let ng = cost + cfg.edge_time(g, cell, next);
            if ng < best_g[idx] {
                // Improvements re-open closed cells; with a consistent
                // heuristic this does not happen, but the bookkeeping allows it.
                closed[idx] = false;
                best_g[idx] = ng;
                let h = cfg.heuristic(g, next, goal);
                let id = tree.push(PlanNode {
                    cell: next,
                    frame: 0,
                    g: ng,
                    f: ng + h,
                    heading: move_heading(cell, next),
                    parent: Some(entry.node),
                });
                best_node[idx] = Some(id);
                open.push(OpenEntry {
                    f: ng + h,
                    h,
                    cell_index: idx,
                    frame: 0,
                    node: id,
                });
            }
        }
    }
    Ok(SearchOutcome {
        path: None,
        expansions,
        budget_exhausted: false,
        collision_unavoidable: false,
        tree,
    })
}

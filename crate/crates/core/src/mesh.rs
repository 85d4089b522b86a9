//! Binary refinement tree over a 1D interval.
//!
//! Active leaves are the computational cells. Refinement bisects a leaf into
//! two children; coarsening deletes a sibling pair and reactivates the parent.
//! Node slots are pooled with free-list reuse so cell ids stay stable across
//! a refinement cycle.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Refinement depth at which interval widths approach the f64 resolution of
/// the domain; refining past it is an error rather than a silent underflow.
pub const MAX_LEVEL: u32 = 50;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MeshError {
    #[error("cell {0:?} is not an active leaf")]
    NotActive(CellId),
    #[error("refinement level limit ({MAX_LEVEL}) exceeded")]
    DepthLimit,
    #[error("snapshot does not describe a bisection refinement of its root partition")]
    BadSnapshot,
}

/// Stable handle into the mesh node pool.
/// Generation-tagged handle: pool slots are reused after coarsening, so a
/// bare index would let a stale id (say, from a pre-cycle snapshot) silently
/// address whichever cell later occupies the slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellId {
    slot: usize,
    generation: u32,
}

#[derive(Debug, Clone)]
pub struct MeshNode {
    pub interval: (f64, f64),
    pub level: u32,
    pub parent: Option<CellId>,
    pub children: Option<(CellId, CellId)>,
    pub active: bool,
    /// False once the slot has been returned to the free list.
    alive: bool,
    generation: u32,
}

/// Result of a coarsen request.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoarsenOutcome {
    Coarsened(CellId),
    /// Root-level cell, or the sibling is itself refined; mesh unchanged.
    Infeasible,
}

/// Resource usage snapshot: fraction of the cell budget in use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceGauge {
    pub active_count: usize,
    pub max_cells: usize,
}

impl ResourceGauge {
    pub fn fraction(&self) -> f64 {
        self.active_count as f64 / self.max_cells as f64
    }
}

/// An active cell together with its resolved 1D adjacency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActiveCell {
    pub id: CellId,
    pub interval: (f64, f64),
    pub level: u32,
    pub left: Option<CellId>,
    pub right: Option<CellId>,
}

/// JSON-serializable mesh state: the active-cell partition plus enough
/// context (root count, budget) to rebuild the tree.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MeshSnapshot {
    pub domain: (f64, f64),
    pub max_cells: usize,
    pub n_roots: usize,
    pub cells: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct TreeMesh1D {
    domain: (f64, f64),
    nodes: Vec<MeshNode>,
    free: Vec<usize>,
    roots: Vec<CellId>,
    max_cells: usize,
    active_count: usize,
}

impl TreeMesh1D {
    /// Initial coarse partition: `n_roots` equal cells on `[x_lo, x_hi]`.
    pub fn new(domain: (f64, f64), n_roots: usize, max_cells: usize) -> Self {
        assert!(n_roots >= 1, "mesh needs at least one root cell");
        assert!(max_cells >= 1, "cell budget must be positive");
        assert!(domain.1 > domain.0, "domain must have positive width");
        let bounds: Vec<f64> = (0..=n_roots)
            .map(|i| domain.0 + (domain.1 - domain.0) * i as f64 / n_roots as f64)
            .collect();
        let nodes: Vec<MeshNode> = bounds
            .windows(2)
            .map(|w| MeshNode {
                interval: (w[0], w[1]),
                level: 0,
                parent: None,
                children: None,
                active: true,
                alive: true,
                generation: 0,
            })
            .collect();
        let roots = (0..n_roots).map(|slot| CellId { slot, generation: 0 }).collect();
        Self {
            domain,
            nodes,
            free: Vec::new(),
            roots,
            max_cells,
            active_count: n_roots,
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn max_cells(&self) -> usize {
        self.max_cells
    }

    pub fn active_count(&self) -> usize {
        self.active_count
    }

    pub fn n_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn gauge(&self) -> ResourceGauge {
        ResourceGauge { active_count: self.active_count, max_cells: self.max_cells }
    }

    /// active_count / max_cells; may exceed 1 when the budget is overrun.
    pub fn resource_fraction(&self) -> f64 {
        self.gauge().fraction()
    }

    pub fn node(&self, id: CellId) -> Option<&MeshNode> {
        self.nodes
            .get(id.slot)
            .filter(|n| n.alive && n.generation == id.generation)
    }

    pub fn is_active(&self, id: CellId) -> bool {
        self.node(id).map(|n| n.active).unwrap_or(false)
    }

    fn alloc(&mut self, mut node: MeshNode) -> CellId {
        if let Some(slot) = self.free.pop() {
            // Reused slots advance their generation so stale ids cannot
            // resolve to the new occupant.
            node.generation = self.nodes[slot].generation.wrapping_add(1);
            self.nodes[slot] = node;
            CellId { slot, generation: self.nodes[slot].generation }
        } else {
            node.generation = 0;
            self.nodes.push(node);
            CellId { slot: self.nodes.len() - 1, generation: 0 }
        }
    }

    /// Bisect an active leaf. Returns the two child ids (left, right).
    pub fn refine(&mut self, id: CellId) -> Result<(CellId, CellId), MeshError> {
        let node = self.node(id).ok_or(MeshError::NotActive(id))?;
        if !node.active {
            return Err(MeshError::NotActive(id));
        }
        if node.level >= MAX_LEVEL {
            return Err(MeshError::DepthLimit);
        }
        let (a, b) = node.interval;
        let level = node.level;
        let mid = 0.5 * (a + b);
        let left = self.alloc(MeshNode {
            interval: (a, mid),
            level: level + 1,
            parent: Some(id),
            children: None,
            active: true,
            alive: true,
            generation: 0,
        });
        let right = self.alloc(MeshNode {
            interval: (mid, b),
            level: level + 1,
            parent: Some(id),
            children: None,
            active: true,
            alive: true,
            generation: 0,
        });
        let node = &mut self.nodes[id.slot];
        node.active = false;
        node.children = Some((left, right));
        self.active_count += 1;
        Ok((left, right))
    }

    /// Remove a sibling pair and reactivate the parent, when topology allows.
    pub fn coarsen(&mut self, id: CellId) -> Result<CoarsenOutcome, MeshError> {
        let node = self.node(id).ok_or(MeshError::NotActive(id))?;
        if !node.active {
            return Err(MeshError::NotActive(id));
        }
        let parent_id = match node.parent {
            Some(p) => p,
            None => return Ok(CoarsenOutcome::Infeasible),
        };
        let (left, right) = self.nodes[parent_id.slot]
            .children
            .expect("parent of an active node must have children");
        let sibling = if left == id { right } else { left };
        if !self.is_active(sibling) {
            return Ok(CoarsenOutcome::Infeasible);
        }
        for child in [left, right] {
            let n = &mut self.nodes[child.slot];
            n.alive = false;
            n.active = false;
            self.free.push(child.slot);
        }
        let parent = &mut self.nodes[parent_id.slot];
        parent.children = None;
        parent.active = true;
        self.active_count -= 1;
        Ok(CoarsenOutcome::Coarsened(parent_id))
    }

    /// Active cells sorted by left endpoint, with 1D neighbor links resolved.
    ///
    /// Depth-first traversal of the root list yields the spatial order
    /// directly, so no floating-point sort is involved.
    pub fn active_cells(&self) -> Vec<ActiveCell> {
        let mut order: Vec<CellId> = Vec::with_capacity(self.active_count);
        let mut stack: Vec<CellId> = self.roots.iter().rev().copied().collect();
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id.slot];
            match node.children {
                None => order.push(id),
                Some((l, r)) => {
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
        debug_assert_eq!(order.len(), self.active_count);
        order
            .iter()
            .enumerate()
            .map(|(i, &id)| {
                let node = &self.nodes[id.slot];
                ActiveCell {
                    id,
                    interval: node.interval,
                    level: node.level,
                    left: (i > 0).then(|| order[i - 1]),
                    right: (i + 1 < order.len()).then(|| order[i + 1]),
                }
            })
            .collect()
    }

    /// Interval list of the active cells in spatial order.
    pub fn active_intervals(&self) -> Vec<(f64, f64)> {
        self.active_cells().iter().map(|c| c.interval).collect()
    }

    /// Smallest active cell width.
    pub fn min_width(&self) -> f64 {
        self.active_cells()
            .iter()
            .map(|c| c.interval.1 - c.interval.0)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn snapshot(&self) -> MeshSnapshot {
        MeshSnapshot {
            domain: self.domain,
            max_cells: self.max_cells,
            n_roots: self.roots.len(),
            cells: self.active_intervals(),
        }
    }

    /// Rebuild a tree whose leaves are exactly the snapshot's cells.
    pub fn from_snapshot(snap: &MeshSnapshot) -> Result<Self, MeshError> {
        let mut mesh = Self::new(snap.domain, snap.n_roots, snap.max_cells);
        // Split any leaf that is wider than the snapshot cell starting at the
        // same left endpoint, until the partitions agree.
        let target = &snap.cells;
        let mut changed = true;
        while changed {
            changed = false;
            let active = mesh.active_cells();
            if active.len() > target.len() {
                return Err(MeshError::BadSnapshot);
            }
            let mut ti = 0;
            for cell in &active {
                if ti >= target.len() {
                    return Err(MeshError::BadSnapshot);
                }
                if cell.interval == target[ti] {
                    ti += 1;
                    continue;
                }
                let (a, b) = cell.interval;
                let (ta, tb) = target[ti];
                if (ta - a).abs() > 0.0 || tb >= b {
                    return Err(MeshError::BadSnapshot);
                }
                mesh.refine(cell.id)?;
                changed = true;
                break;
            }
            if !changed && mesh.active_intervals() != *target {
                return Err(MeshError::BadSnapshot);
            }
        }
        Ok(mesh)
    }
}

//! Exact max-flow / min-cut on the 4-connected pixel grid.
//!
//! Augmenting-path solver in the Boykov-Kolmogorov style: a source tree and
//! a sink tree grow toward each other, augment when they touch, and orphaned
//! subtrees are re-adopted. Arcs are implicit in the grid, so memory stays
//! linear in the pixel count.

const FREE: u8 = 0;
const SOURCE: u8 = 1;
const SINK: u8 = 2;

/// `parent` values 0..=3 name the direction toward the parent node.
const PARENT_TERMINAL: u8 = 4;
const PARENT_NONE: u8 = 5;

/// Directions: 0 = +x, 1 = -x, 2 = +y, 3 = -y; `dir ^ 1` reverses.
#[inline]
fn rev(dir: usize) -> usize {
    dir ^ 1
}

pub struct GridMaxFlow {
    width: usize,
    height: usize,
    /// Residual terminal capacity: positive from the source, negative to the
    /// sink.
    tr_cap: Vec<f64>,
    /// Residual capacities of the four outgoing arcs per node.
    arc_cap: Vec<[f64; 4]>,
    tree: Vec<u8>,
    parent: Vec<u8>,
    active: std::collections::VecDeque<usize>,
    orphans: std::collections::VecDeque<usize>,
    flow: f64,
}

impl GridMaxFlow {
    pub fn new(width: usize, height: usize) -> Self {
        let n = width * height;
        GridMaxFlow {
            width,
            height,
            tr_cap: vec![0.0; n],
            arc_cap: vec![[0.0; 4]; n],
            tree: vec![FREE; n],
            parent: vec![PARENT_NONE; n],
            active: std::collections::VecDeque::new(),
            orphans: std::collections::VecDeque::new(),
            flow: 0.0,
        }
    }

    #[inline]
    fn neighbor(&self, idx: usize, dir: usize) -> Option<usize> {
        let x = idx % self.width;
        let y = idx / self.width;
        match dir {
            0 if x + 1 < self.width => Some(idx + 1),
            1 if x > 0 => Some(idx - 1),
            2 if y + 1 < self.height => Some(idx + self.width),
            3 if y > 0 => Some(idx - self.width),
            _ => None,
        }
    }

    /// Adds source and sink capacities for a node. Opposing capacities
    /// cancel into pre-pushed flow.
    pub fn add_terminal(&mut self, idx: usize, cap_source: f64, cap_sink: f64) {
        debug_assert!(cap_source >= 0.0 && cap_sink >= 0.0);
        self.flow += cap_source.min(cap_sink);
        self.tr_cap[idx] += cap_source - cap_sink;
    }

    /// Adds a symmetric pairwise capacity between a node and its neighbor in
    /// direction `dir` (both arc directions).
    pub fn add_pairwise(&mut self, idx: usize, dir: usize, cap: f64) {
        debug_assert!(cap >= 0.0);
        let q = self
            .neighbor(idx, dir)
            .expect("pairwise arc must stay on the grid");
        self.arc_cap[idx][dir] += cap;
        self.arc_cap[q][rev(dir)] += cap;
    }

    /// Runs the solver and returns the max-flow value.
    pub fn max_flow(&mut self) -> f64 {
        for i in 0..self.tr_cap.len() {
            if self.tr_cap[i] > 0.0 {
                self.tree[i] = SOURCE;
                self.parent[i] = PARENT_TERMINAL;
                self.active.push_back(i);
            } else if self.tr_cap[i] < 0.0 {
                self.tree[i] = SINK;
                self.parent[i] = PARENT_TERMINAL;
                self.active.push_back(i);
            }
        }
        while let Some((s_node, t_node, dir)) = self.grow() {
            self.augment(s_node, t_node, dir);
            self.adopt();
        }
        self.flow
    }

    /// True if the node ended on the source side of the minimum cut.
    #[inline]
    pub fn is_source_side(&self, idx: usize) -> bool {
        self.tree[idx] == SOURCE
    }

    /// Grows both trees until they touch; returns the connecting arc as
    /// (source-side node, sink-side node, direction of the arc between them).
    fn grow(&mut self) -> Option<(usize, usize, usize)> {
        while let Some(p) = self.active.pop_front() {
            let t = self.tree[p];
            if t == FREE {
                continue;
            }
            for dir in 0..4 {
                let Some(q) = self.neighbor(p, dir) else {
                    continue;
                };
                // The arc that would carry flow: p->q for the source tree,
                // q->p for the sink tree.
                let residual = if t == SOURCE {
                    self.arc_cap[p][dir]
                } else {
                    self.arc_cap[q][rev(dir)]
                };
                if residual <= 0.0 {
                    continue;
                }
                let qt = self.tree[q];
                if qt == FREE {
                    self.tree[q] = t;
                    self.parent[q] = rev(dir) as u8;
                    self.active.push_back(q);
                } else if qt != t {
                    // Trees touched; p may still have growth left.
                    self.active.push_front(p);
                    return if t == SOURCE {
                        Some((p, q, dir))
                    } else {
                        Some((q, p, rev(dir)))
                    };
                }
            }
        }
        None
    }

    fn augment(&mut self, s_node: usize, t_node: usize, dir: usize) {
        // Bottleneck over terminal caps, both tree paths, and the
        // connecting arc.
        let mut bottleneck = self.arc_cap[s_node][dir];
        let mut n = s_node;
        loop {
            let pd = self.parent[n];
            if pd == PARENT_TERMINAL {
                bottleneck = bottleneck.min(self.tr_cap[n]);
                break;
            }
            let parent = self.neighbor(n, pd as usize).expect("parent in grid");
            bottleneck = bottleneck.min(self.arc_cap[parent][rev(pd as usize)]);
            n = parent;
        }
        let mut n = t_node;
        loop {
            let pd = self.parent[n];
            if pd == PARENT_TERMINAL {
                bottleneck = bottleneck.min(-self.tr_cap[n]);
                break;
            }
            let parent = self.neighbor(n, pd as usize).expect("parent in grid");
            bottleneck = bottleneck.min(self.arc_cap[n][pd as usize]);
            n = parent;
        }
        debug_assert!(bottleneck > 0.0);

        self.flow += bottleneck;
        self.arc_cap[s_node][dir] -= bottleneck;
        self.arc_cap[t_node][rev(dir)] += bottleneck;

        // Saturated tree arcs orphan the child end.
        let mut n = s_node;
        loop {
            let pd = self.parent[n];
            if pd == PARENT_TERMINAL {
                self.tr_cap[n] -= bottleneck;
                if self.tr_cap[n] <= 0.0 {
                    self.make_orphan(n);
                }
                break;
            }
            let parent = self.neighbor(n, pd as usize).expect("parent in grid");
            self.arc_cap[parent][rev(pd as usize)] -= bottleneck;
            self.arc_cap[n][pd as usize] += bottleneck;
            if self.arc_cap[parent][rev(pd as usize)] <= 0.0 {
                self.make_orphan(n);
            }
            n = parent;
        }
        let mut n = t_node;
        loop {
            let pd = self.parent[n];
            if pd == PARENT_TERMINAL {
                self.tr_cap[n] += bottleneck;
                if self.tr_cap[n] >= 0.0 {
                    self.make_orphan(n);
                }
                break;
            }
            let parent = self.neighbor(n, pd as usize).expect("parent in grid");
            self.arc_cap[n][pd as usize] -= bottleneck;
            self.arc_cap[parent][rev(pd as usize)] += bottleneck;
            if self.arc_cap[n][pd as usize] <= 0.0 {
                self.make_orphan(n);
            }
            n = parent;
        }
    }

    fn make_orphan(&mut self, n: usize) {
        if self.parent[n] != PARENT_NONE {
            self.parent[n] = PARENT_NONE;
            self.orphans.push_back(n);
        }
    }

    /// True if the parent chain of `n` reaches a terminal (is not cut off by
    /// a pending orphan).
    fn rooted(&self, mut n: usize) -> bool {
        loop {
            match self.parent[n] {
                PARENT_TERMINAL => return true,
                PARENT_NONE => return false,
                pd => n = self.neighbor(n, pd as usize).expect("parent in grid"),
            }
        }
    }

    fn adopt(&mut self) {
        while let Some(o) = self.orphans.pop_front() {
            let t = self.tree[o];
            debug_assert_ne!(t, FREE);
            let mut adopted = false;
            for dir in 0..4 {
                let Some(q) = self.neighbor(o, dir) else {
                    continue;
                };
                if self.tree[q] != t {
                    continue;
                }
                let residual = if t == SOURCE {
                    self.arc_cap[q][rev(dir)]
                } else {
                    self.arc_cap[o][dir]
                };
                if residual > 0.0 && self.rooted(q) {
                    self.parent[o] = dir as u8;
                    adopted = true;
                    break;
                }
            }
            if adopted {
                continue;
            }
            // No parent found: the orphan leaves its tree. Neighbors that
            // might reconnect become active and its children become orphans.
            for dir in 0..4 {
                let Some(q) = self.neighbor(o, dir) else {
                    continue;
                };
                if self.tree[q] != t {
                    continue;
                }
                let residual = if t == SOURCE {
                    self.arc_cap[q][rev(dir)]
                } else {
                    self.arc_cap[o][dir]
                };
                if residual > 0.0 {
                    self.active.push_back(q);
                }
                if self.parent[q] == rev(dir) as u8 {
                    self.make_orphan(q);
                }
            }
            self.tree[o] = FREE;
        }
    }
}

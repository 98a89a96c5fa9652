use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use smallvec::SmallVec;

use super::descent::Descent;
use super::{EncodedPoints, LeafCounts, DEFAULT_K_MAX};
use crate::affine::Variant;
use crate::curve::Curve;
use crate::digits::Prime;
use crate::error::{Error, Result};
use crate::exec::Exec;

pub type NodeId = u32;

type Children = SmallVec<[(u8, NodeId); 4]>;

#[derive(Clone, Debug)]
enum Kind {
    /// Point slots.
    Leaf(Vec<u32>),
    /// Occupied children sorted by digit.
    Internal(Children),
}

#[derive(Clone, Debug)]
struct Node {
    depth: u32,
    count: usize,
    parent: NodeId,
    kind: Kind,
}

const NO_PARENT: NodeId = NodeId::MAX;

/// (edge digit, depth, count, sorted leaf ids) for one node.
pub type CanonicalNode = (Option<u8>, usize, usize, Option<Vec<u64>>);

/// A read-only view of one node.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NodeInfo {
    pub id: NodeId,
    pub depth: usize,
    pub count: usize,
    pub is_leaf: bool,
    /// Edge digits from the root, in curve order.
    pub digits: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeStats {
    pub points: usize,
    pub leaves: usize,
    pub overfilled: usize,
    pub internal: usize,
    pub max_depth: usize,
    /// Leaf depth -> number of leaves.
    pub depth_histogram: BTreeMap<usize, usize>,
}

/// The dynamic p-ary Gray-Hilbert tree with buckets of capacity s.
///
/// A node is internal exactly when it holds more than s points and lies
/// above the depth limit L = k_max·n. Only occupied children exist. The
/// shape is therefore a function of the point set alone, and any insertion
/// order, bulk build, or insert/remove history that ends at the same set
/// gives the same tree.
#[derive(Clone, Debug)]
pub struct ScaledTree {
    curve: Curve,
    s: usize,
    k_max: usize,
    width: usize,
    nodes: Vec<Node>,
    free_nodes: Vec<NodeId>,
    root: NodeId,
    ids: Vec<u64>,
    paths: Vec<u8>,
    free_slots: Vec<u32>,
    slot_of: HashMap<u64, u32>,
}

impl ScaledTree {
    pub fn new(p: Prime, n: usize, s: usize, variant: Variant) -> Result<ScaledTree> {
        ScaledTree::with_k_max(p, n, s, variant, DEFAULT_K_MAX)
    }

    pub fn with_k_max(p: Prime, n: usize, s: usize, variant: Variant, k_max: usize) -> Result<ScaledTree> {
        if s == 0 {
            return Err(Error::range("s", 0, ">= 1"));
        }
        if k_max == 0 {
            return Err(Error::range("k_max", 0, ">= 1"));
        }
        let curve = Curve::new(p, n, variant)?;
        Ok(ScaledTree {
            curve,
            s,
            k_max,
            width: k_max * n,
            nodes: vec![Node {
                depth: 0,
                count: 0,
                parent: NO_PARENT,
                kind: Kind::Leaf(Vec::new()),
            }],
            free_nodes: Vec::new(),
            root: 0,
            ids: Vec::new(),
            paths: Vec::new(),
            free_slots: Vec::new(),
            slot_of: HashMap::new(),
        })
    }

    /// Build from pre-encoded paths in one pass over their sorted order.
    /// `points` must come from the same curve and k_max.
    pub fn build(
        p: Prime,
        n: usize,
        s: usize,
        variant: Variant,
        k_max: usize,
        points: &EncodedPoints,
        exec: Exec,
    ) -> Result<ScaledTree> {
        let mut t = ScaledTree::with_k_max(p, n, s, variant, k_max)?;
        if points.width() != t.width {
            return Err(Error::contract(format!(
                "paths have {} digits, tree expects {}",
                points.width(),
                t.width
            )));
        }
        let sorted = points.sorted(exec);
        for &i in &sorted.order {
            let id = points.ids[i as usize];
            t.alloc_slot(id, points.path(i as usize))?;
        }
        let slots: Vec<u32> = sorted
            .order
            .iter()
            .map(|&i| t.slot_of[&points.ids[i as usize]])
            .collect();
        t.nodes[0].count = slots.len();
        t.nodes[0].kind = Kind::Leaf(slots);
        t.split_from(0);
        Ok(t)
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Depth limit L = k_max·n.
    pub fn max_levels(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.slot_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slot_of.is_empty()
    }

    pub fn contains(&self, id: u64) -> bool {
        self.slot_of.contains_key(&id)
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    fn path_of(&self, slot: u32) -> &[u8] {
        let w = self.width;
        &self.paths[slot as usize * w..(slot as usize + 1) * w]
    }

    fn alloc_slot(&mut self, id: u64, path: &[u8]) -> Result<u32> {
        if self.slot_of.contains_key(&id) {
            return Err(Error::contract(format!("point id {id} is already in the index")));
        }
        let w = self.width;
        let slot = match self.free_slots.pop() {
            Some(s) => {
                self.ids[s as usize] = id;
                self.paths[s as usize * w..(s as usize + 1) * w].copy_from_slice(path);
                s
            }
            None => {
                self.ids.push(id);
                self.paths.extend_from_slice(path);
                (self.ids.len() - 1) as u32
            }
        };
        self.slot_of.insert(id, slot);
        Ok(slot)
    }

    fn alloc_node(&mut self, node: Node) -> NodeId {
        match self.free_nodes.pop() {
            Some(i) => {
                self.nodes[i as usize] = node;
                i
            }
            None => {
                self.nodes.push(node);
                (self.nodes.len() - 1) as NodeId
            }
        }
    }

    fn wants_split(&self, node: NodeId) -> bool {
        let nd = &self.nodes[node as usize];
        matches!(nd.kind, Kind::Leaf(_)) && nd.count > self.s && (nd.depth as usize) < self.width
    }

    /// Split an overfull leaf, and its overfull children in turn.
    fn split_from(&mut self, start: NodeId) {
        let mut stack = vec![start];
        while let Some(node) = stack.pop() {
            if !self.wants_split(node) {
                continue;
            }
            let depth = self.nodes[node as usize].depth as usize;
            let Kind::Leaf(slots) =
                std::mem::replace(&mut self.nodes[node as usize].kind, Kind::Internal(Children::new()))
            else {
                unreachable!()
            };
            let mut groups: BTreeMap<u8, Vec<u32>> = BTreeMap::new();
            for slot in slots {
                groups.entry(self.path_of(slot)[depth]).or_default().push(slot);
            }
            let mut children = Children::new();
            for (digit, slots) in groups {
                let child = self.alloc_node(Node {
                    depth: depth as u32 + 1,
                    count: slots.len(),
                    parent: node,
                    kind: Kind::Leaf(slots),
                });
                children.push((digit, child));
                stack.push(child);
            }
            self.nodes[node as usize].kind = Kind::Internal(children);
        }
    }

    fn child(&self, node: NodeId, digit: u8) -> Option<NodeId> {
        match &self.nodes[node as usize].kind {
            Kind::Internal(ch) => ch.iter().find(|(d, _)| *d == digit).map(|&(_, c)| c),
            Kind::Leaf(_) => None,
        }
    }

    /// Insert a point given in written order in [0,1]^n.
    pub fn insert(&mut self, id: u64, x: &[f64]) -> Result<()> {
        if self.slot_of.contains_key(&id) {
            return Err(Error::contract(format!("point id {id} is already in the index")));
        }
        let path: Vec<u8> = Descent::new(&self.curve, x, self.k_max)?.collect();
        self.insert_path(id, &path)
    }

    /// Insert a point by its pre-computed path.
    pub fn insert_path(&mut self, id: u64, path: &[u8]) -> Result<()> {
        if path.len() != self.width {
            return Err(Error::DimensionMismatch {
                left: self.width,
                right: path.len(),
            });
        }
        let slot = self.alloc_slot(id, path)?;
        let mut node = self.root;
        loop {
            self.nodes[node as usize].count += 1;
            let depth = self.nodes[node as usize].depth as usize;
            match &mut self.nodes[node as usize].kind {
                Kind::Leaf(slots) => {
                    slots.push(slot);
                    self.split_from(node);
                    return Ok(());
                }
                Kind::Internal(_) => {
                    let digit = path[depth];
                    match self.child(node, digit) {
                        Some(c) => node = c,
                        None => {
                            let leaf = self.alloc_node(Node {
                                depth: depth as u32 + 1,
                                count: 1,
                                parent: node,
                                kind: Kind::Leaf(vec![slot]),
                            });
                            let Kind::Internal(ch) = &mut self.nodes[node as usize].kind else {
                                unreachable!()
                            };
                            let pos = ch.iter().position(|(d, _)| *d > digit).unwrap_or(ch.len());
                            ch.insert(pos, (digit, leaf));
                            return Ok(());
                        }
                    }
                }
            }
        }
    }

    /// Remove a point. Any node left holding at most s points collapses
    /// into a leaf, and empty leaves are pruned.
    pub fn remove(&mut self, id: u64) -> Result<()> {
        let slot = self.slot_of.remove(&id).ok_or(Error::NotFound(id))?;
        let path = self.path_of(slot).to_vec();
        let mut node = self.root;
        let mut collapse: Option<NodeId> = None;
        loop {
            let nd = &mut self.nodes[node as usize];
            nd.count -= 1;
            let depth = nd.depth as usize;
            match &mut nd.kind {
                Kind::Leaf(slots) => {
                    let pos = slots.iter().position(|&s| s == slot).expect("slot in its leaf");
                    slots.swap_remove(pos);
                    break;
                }
                Kind::Internal(_) => {
                    if collapse.is_none() && nd.count <= self.s {
                        collapse = Some(node);
                    }
                    node = self.child(node, path[depth]).expect("path leads to its leaf");
                }
            }
        }
        self.free_slots.push(slot);
        if let Some(top) = collapse {
            self.collapse(top);
        } else if self.nodes[node as usize].count == 0 && node != self.root {
            let parent = self.nodes[node as usize].parent;
            let Kind::Internal(ch) = &mut self.nodes[parent as usize].kind else {
                unreachable!()
            };
            ch.retain(|(_, c)| *c != node);
            self.free_nodes.push(node);
        }
        if self.slot_of.is_empty() {
            self.ids.clear();
            self.paths.clear();
            self.free_slots.clear();
        }
        Ok(())
    }

    /// Turn `top` into a leaf holding every point below it.
    fn collapse(&mut self, top: NodeId) {
        let mut slots = Vec::new();
        let mut stack = vec![top];
        while let Some(node) = stack.pop() {
            let kind = std::mem::replace(&mut self.nodes[node as usize].kind, Kind::Leaf(Vec::new()));
            match kind {
                Kind::Leaf(s) => slots.extend(s),
                Kind::Internal(ch) => stack.extend(ch.iter().rev().map(|&(_, c)| c)),
            }
            if node != top {
                self.free_nodes.push(node);
            }
        }
        self.nodes[top as usize].kind = Kind::Leaf(slots);
    }

    /// The node reached by descending towards `x`: the leaf whose cell
    /// contains it, or the internal node whose matching child is absent.
    pub fn find_node(&self, x: &[f64]) -> Result<NodeInfo> {
        let mut descent = Descent::new(&self.curve, x, self.k_max)?;
        let mut node = self.root;
        let mut digits = Vec::new();
        while let Kind::Internal(_) = self.nodes[node as usize].kind {
            let d = descent.next().expect("internal nodes sit above the depth limit");
            match self.child(node, d) {
                Some(c) => {
                    digits.push(d);
                    node = c;
                }
                None => break,
            }
        }
        Ok(self.info(node, digits))
    }

    fn info(&self, node: NodeId, digits: Vec<u8>) -> NodeInfo {
        let nd = &self.nodes[node as usize];
        NodeInfo {
            id: node,
            depth: nd.depth as usize,
            count: nd.count,
            is_leaf: matches!(nd.kind, Kind::Leaf(_)),
            digits,
        }
    }

    /// Ids of the points closest to `x` in the p-adic sense: those sharing
    /// the longest path prefix with it.
    pub fn nearest(&self, x: &[f64]) -> Result<Vec<u64>> {
        if self.is_empty() {
            return Ok(Vec::new());
        }
        let found = self.find_node(x)?;
        let mut ids = self.ids_under(found.id);
        ids.sort_unstable();
        Ok(ids)
    }

    /// Ids of the points in the leaf with this point, sorted.
    pub fn leaf_of(&self, id: u64) -> Result<Vec<u64>> {
        let slot = *self.slot_of.get(&id).ok_or(Error::NotFound(id))?;
        let path = self.path_of(slot);
        let mut node = self.root;
        while let Kind::Internal(_) = self.nodes[node as usize].kind {
            let depth = self.nodes[node as usize].depth as usize;
            node = self.child(node, path[depth]).expect("path leads to its leaf");
        }
        let mut ids = self.ids_under(node);
        ids.sort_unstable();
        Ok(ids)
    }

    fn ids_under(&self, top: NodeId) -> Vec<u64> {
        let mut out = Vec::new();
        let mut stack = vec![top];
        while let Some(node) = stack.pop() {
            match &self.nodes[node as usize].kind {
                Kind::Leaf(s) => out.extend(s.iter().map(|&s| self.ids[s as usize])),
                Kind::Internal(ch) => stack.extend(ch.iter().rev().map(|&(_, c)| c)),
            }
        }
        out
    }

    /// Point ids in curve order (leaf buckets sorted by path, then id).
    pub fn ordered_ids(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.len());
        self.visit(|_, nd| {
            if let Kind::Leaf(s) = &nd.kind {
                let mut s = s.clone();
                s.sort_by(|&a, &b| {
                    self.path_of(a)
                        .cmp(self.path_of(b))
                        .then(self.ids[a as usize].cmp(&self.ids[b as usize]))
                });
                out.extend(s.iter().map(|&s| self.ids[s as usize]));
            }
        });
        out
    }

    /// Pre-order traversal, children in digit order.
    fn visit<F: FnMut(Option<u8>, &Node)>(&self, mut f: F) {
        let mut stack = vec![(None, self.root)];
        while let Some((digit, node)) = stack.pop() {
            let nd = &self.nodes[node as usize];
            f(digit, nd);
            if let Kind::Internal(ch) = &nd.kind {
                stack.extend(ch.iter().rev().map(|&(d, c)| (Some(d), c)));
            }
        }
    }

    pub fn leaf_counts(&self) -> LeafCounts {
        let mut out = LeafCounts::default();
        self.visit(|_, nd| {
            if matches!(nd.kind, Kind::Leaf(_)) && nd.count > 0 {
                out.leaves += 1;
                if nd.count > self.s {
                    out.overfilled += 1;
                }
            }
        });
        out
    }

    pub fn stats(&self) -> TreeStats {
        let mut stats = TreeStats {
            points: self.len(),
            leaves: 0,
            overfilled: 0,
            internal: 0,
            max_depth: 0,
            depth_histogram: BTreeMap::new(),
        };
        self.visit(|_, nd| {
            let depth = nd.depth as usize;
            stats.max_depth = stats.max_depth.max(depth);
            match nd.kind {
                Kind::Internal(_) => stats.internal += 1,
                Kind::Leaf(_) if nd.count > 0 => {
                    stats.leaves += 1;
                    stats.overfilled += (nd.count > self.s) as usize;
                    *stats.depth_histogram.entry(depth).or_default() += 1;
                }
                Kind::Leaf(_) => {}
            }
        });
        stats
    }

    /// A canonical pre-order listing of the tree: (edge digit, depth, count,
    /// sorted leaf ids). Equal listings mean equal trees.
    pub fn canonical(&self) -> Vec<CanonicalNode> {
        let mut out = Vec::new();
        self.visit(|digit, nd| {
            let ids = match &nd.kind {
                Kind::Leaf(s) => {
                    let mut ids: Vec<u64> = s.iter().map(|&s| self.ids[s as usize]).collect();
                    ids.sort_unstable();
                    Some(ids)
                }
                Kind::Internal(_) => None,
            };
            out.push((digit, nd.depth as usize, nd.count, ids));
        });
        out
    }

    pub fn structurally_eq(&self, other: &ScaledTree) -> bool {
        self.s == other.s
            && self.width == other.width
            && self.curve.p() == other.curve.p()
            && self.canonical() == other.canonical()
    }

    /// Check the structural invariants, returning the first violation.
    pub fn check_invariants(&self) -> Result<()> {
        let mut seen = 0usize;
        let mut err = None;
        let mut stack = vec![self.root];
        while let Some(node) = stack.pop() {
            let nd = &self.nodes[node as usize];
            let depth = nd.depth as usize;
            match &nd.kind {
                Kind::Leaf(s) => {
                    seen += s.len();
                    if s.len() != nd.count {
                        err.get_or_insert(format!("leaf {node} count {} != bucket {}", nd.count, s.len()));
                    }
                    if nd.count > self.s && depth < self.width {
                        err.get_or_insert(format!("leaf {node} at depth {depth} holds {} > s", nd.count));
                    }
                    if nd.count == 0 && node != self.root {
                        err.get_or_insert(format!("empty non-root leaf {node}"));
                    }
                }
                Kind::Internal(ch) => {
                    if ch.is_empty() {
                        err.get_or_insert(format!("internal node {node} has no children"));
                    }
                    if nd.count <= self.s {
                        err.get_or_insert(format!("internal node {node} holds only {}", nd.count));
                    }
                    let sum: usize = ch.iter().map(|&(_, c)| self.nodes[c as usize].count).sum();
                    if sum != nd.count {
                        err.get_or_insert(format!("node {node} count {} != children {sum}", nd.count));
                    }
                    for &(d, c) in ch {
                        let cn = &self.nodes[c as usize];
                        if cn.parent != node || cn.depth as usize != depth + 1 {
                            err.get_or_insert(format!("bad link {node} -> {c}"));
                        }
                        if let Kind::Leaf(s) = &cn.kind {
                            if s.iter().any(|&s| self.path_of(s)[depth] != d) {
                                err.get_or_insert(format!("leaf {c} holds a point off digit {d}"));
                            }
                        }
                    }
                    stack.extend(ch.iter().map(|&(_, c)| c));
                }
            }
        }
        if seen != self.len() {
            err.get_or_insert(format!("{seen} points in leaves, {} indexed", self.len()));
        }
        match err {
            Some(e) => Err(Error::contract(e)),
            None => Ok(()),
        }
    }
}

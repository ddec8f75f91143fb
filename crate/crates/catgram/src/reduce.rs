//! The reduction calculus: one-step reduction, an exact decision procedure
//! for reducibility, enumeration of derivable categories and reduction
//! trees, and a brute-force oracle used to validate the decision procedure.
//!
//! Reducibility is decided by a CYK-style dynamic program. Every category a
//! multi-item string can reduce to is a numerator of one of its members
//! (applied inductively), so the closure of the input items under
//! numerators is a finite, sound universe; table cells are sets of universe
//! ids.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::category::{Category, CategoryString};

/// Default cap on the number of strings the brute-force search may visit.
pub const DEFAULT_VISITED_CAP: usize = 10_000_000;

/// Errors from reduction queries.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    /// The input string is longer than the caller-declared bound for the
    /// brute-force search.
    #[error("input has {len} categories, above the brute-force bound of {max_len}")]
    InputTooLong { len: usize, max_len: usize },
    /// The brute-force search visited more strings than allowed. This is an
    /// error, never a truncated answer.
    #[error("brute-force search exceeded the cap of {cap} visited strings")]
    BudgetExceeded { cap: usize },
}

/// A binary derivation witnessing that a category string reduces to the
/// root category. `ApplyRight` joins `A/B; B` into `A`, `ApplyLeft` joins
/// `B; B\A` into `A`; the leaf frontier, read left to right, is the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReductionTree {
    Leaf(Category),
    ApplyRight {
        root: Category,
        left: Box<ReductionTree>,
        right: Box<ReductionTree>,
    },
    ApplyLeft {
        root: Category,
        left: Box<ReductionTree>,
        right: Box<ReductionTree>,
    },
}

impl ReductionTree {
    pub fn root(&self) -> &Category {
        match self {
            ReductionTree::Leaf(c) => c,
            ReductionTree::ApplyRight { root, .. } | ReductionTree::ApplyLeft { root, .. } => root,
        }
    }

    /// The leaves, left to right.
    pub fn frontier(&self) -> CategoryString {
        let mut items = Vec::new();
        self.collect_frontier(&mut items);
        CategoryString::new(items).expect("a tree has at least one leaf")
    }

    fn collect_frontier(&self, out: &mut Vec<Category>) {
        match self {
            ReductionTree::Leaf(c) => out.push(c.clone()),
            ReductionTree::ApplyRight { left, right, .. }
            | ReductionTree::ApplyLeft { left, right, .. } => {
                left.collect_frontier(out);
                right.collect_frontier(out);
            }
        }
    }

    /// Replays the two reduction rules leaf-to-root and checks that every
    /// internal node is a legal application.
    pub fn is_well_formed(&self) -> bool {
        match self {
            ReductionTree::Leaf(_) => true,
            ReductionTree::ApplyRight { root, left, right } => {
                left.is_well_formed()
                    && right.is_well_formed()
                    && *left.root()
                        == Category::rdiv(root.clone(), right.root().clone())
            }
            ReductionTree::ApplyLeft { root, left, right } => {
                left.is_well_formed()
                    && right.is_well_formed()
                    && *right.root()
                        == Category::ldiv(left.root().clone(), root.clone())
            }
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            ReductionTree::Leaf(_) => 1,
            ReductionTree::ApplyRight { left, right, .. }
            | ReductionTree::ApplyLeft { left, right, .. } => {
                left.leaf_count() + right.leaf_count()
            }
        }
    }
}

impl fmt::Display for ReductionTree {
    /// One-line form, mainly for debugging: `[A/B B -> A]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReductionTree::Leaf(c) => write!(f, "{c}"),
            ReductionTree::ApplyRight { root, left, right }
            | ReductionTree::ApplyLeft { root, left, right } => {
                write!(f, "[{left} {right} -> {root}]")
            }
        }
    }
}

type NodeId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    Prim(u32),
    Right(NodeId, NodeId), // (numerator, denominator)
    Left(NodeId, NodeId),  // (denominator, numerator)
}

/// Hash-consed category storage: structural equality becomes id equality.
#[derive(Debug, Default)]
struct Interner {
    prims: Vec<crate::category::Prim>,
    prim_ids: HashMap<crate::category::Prim, u32>,
    nodes: Vec<Node>,
    node_ids: HashMap<Node, NodeId>,
}

impl Interner {
    fn intern_node(&mut self, node: Node) -> NodeId {
        if let Some(&id) = self.node_ids.get(&node) {
            return id;
        }
        let id = self.nodes.len() as NodeId;
        self.nodes.push(node);
        self.node_ids.insert(node, id);
        id
    }

    fn intern(&mut self, c: &Category) -> NodeId {
        let node = match c {
            Category::Prim(p) => {
                let pid = if let Some(&pid) = self.prim_ids.get(p) {
                    pid
                } else {
                    let pid = self.prims.len() as u32;
                    self.prims.push(p.clone());
                    self.prim_ids.insert(p.clone(), pid);
                    pid
                };
                Node::Prim(pid)
            }
            Category::Right(num, den) => {
                let n = self.intern(num);
                let d = self.intern(den);
                Node::Right(n, d)
            }
            Category::Left(den, num) => {
                let d = self.intern(den);
                let n = self.intern(num);
                Node::Left(d, n)
            }
        };
        self.intern_node(node)
    }

    /// Id of an already-interned category, without mutating the table.
    fn lookup(&self, c: &Category) -> Option<NodeId> {
        let node = match c {
            Category::Prim(p) => Node::Prim(*self.prim_ids.get(p)?),
            Category::Right(num, den) => Node::Right(self.lookup(num)?, self.lookup(den)?),
            Category::Left(den, num) => Node::Left(self.lookup(den)?, self.lookup(num)?),
        };
        self.node_ids.get(&node).copied()
    }

    fn to_category(&self, id: NodeId) -> Category {
        match self.nodes[id as usize] {
            Node::Prim(p) => Category::Prim(self.prims[p as usize].clone()),
            Node::Right(num, den) => {
                Category::rdiv(self.to_category(num), self.to_category(den))
            }
            Node::Left(den, num) => Category::ldiv(self.to_category(den), self.to_category(num)),
        }
    }
}

type MemberId = u32;

/// The finite search space for a reducibility query: the input items closed
/// under numerators. Every category appearing in any CYK cell is a member.
pub struct ReductionUniverse {
    interner: Interner,
    members: Vec<NodeId>,
    member_of: HashMap<NodeId, MemberId>,
    /// For member `A/B` with `B` also a member: `(member(B), member(A))`.
    right_rule: Vec<Option<(MemberId, MemberId)>>,
    /// For member `B\A` with `B` also a member: `(member(B), member(A))`.
    left_rule: Vec<Option<(MemberId, MemberId)>>,
    /// Member ids of the input items, in input order.
    item_members: Vec<MemberId>,
}

impl ReductionUniverse {
    /// Builds the universe for a string: its items plus, transitively, the
    /// numerators of every member.
    pub fn build(s: &CategoryString) -> ReductionUniverse {
        let mut interner = Interner::default();
        let mut members = Vec::new();
        let mut member_of: HashMap<NodeId, MemberId> = HashMap::new();
        let add = |id: NodeId, members: &mut Vec<NodeId>, member_of: &mut HashMap<NodeId, MemberId>| {
            if let Some(&m) = member_of.get(&id) {
                return m;
            }
            let m = members.len() as MemberId;
            members.push(id);
            member_of.insert(id, m);
            m
        };

        let mut item_members = Vec::with_capacity(s.len());
        for item in s.iter() {
            let id = interner.intern(item);
            item_members.push(add(id, &mut members, &mut member_of));
        }
        // Close under numerators by walking the numerator spine of every
        // member; spines of spines are covered because each numerator
        // becomes a member itself.
        let mut next = 0;
        while next < members.len() {
            let id = members[next];
            next += 1;
            if let Node::Right(num, _) | Node::Left(_, num) = interner.nodes[id as usize] {
                add(num, &mut members, &mut member_of);
            }
        }

        let mut right_rule = vec![None; members.len()];
        let mut left_rule = vec![None; members.len()];
        for (m, &id) in members.iter().enumerate() {
            match interner.nodes[id as usize] {
                Node::Right(num, den) => {
                    if let Some(&dm) = member_of.get(&den) {
                        right_rule[m] = Some((dm, member_of[&num]));
                    }
                }
                Node::Left(den, num) => {
                    if let Some(&dm) = member_of.get(&den) {
                        left_rule[m] = Some((dm, member_of[&num]));
                    }
                }
                Node::Prim(_) => {}
            }
        }

        ReductionUniverse {
            interner,
            members,
            member_of,
            right_rule,
            left_rule,
            item_members,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, c: &Category) -> bool {
        self.member_id(c).is_some()
    }

    pub fn categories(&self) -> impl Iterator<Item = Category> + '_ {
        self.members.iter().map(|&id| self.interner.to_category(id))
    }

    fn member_id(&self, c: &Category) -> Option<MemberId> {
        let id = self.interner.lookup(c)?;
        self.member_of.get(&id).copied()
    }

    fn member_category(&self, m: MemberId) -> Category {
        self.interner.to_category(self.members[m as usize])
    }
}

struct Cell {
    bits: Box<[u64]>,
    list: Vec<MemberId>,
}

impl Cell {
    fn contains(&self, m: MemberId) -> bool {
        self.bits[(m / 64) as usize] & (1 << (m % 64)) != 0
    }
}

/// The filled dynamic-programming table: `cell(i, j)` holds exactly the
/// categories the item range `[i, j)` is reducible to.
struct CykTable {
    n: usize,
    /// Flat triangular storage, indexed through [`CykTable::idx`].
    cells: Vec<Option<Cell>>,
    offsets: Vec<usize>,
    /// `starts[i]` lists the `j` with a non-empty `cell(i, j)`, ascending.
    starts: Vec<Vec<u32>>,
}

impl CykTable {
    fn idx(&self, i: usize, j: usize) -> usize {
        self.offsets[j - i] + i
    }

    fn cell(&self, i: usize, j: usize) -> Option<&Cell> {
        self.cells[self.idx(i, j)].as_ref()
    }

    fn fill(uni: &ReductionUniverse) -> CykTable {
        let n = uni.item_members.len();
        let words = uni.members.len().div_ceil(64);
        // offsets[len] = first slot for spans of that length; spans of
        // length len have i in 0..=n-len.
        let mut offsets = vec![0usize; n + 1];
        let mut acc = 0;
        for (len, slot) in offsets.iter_mut().enumerate().skip(1) {
            *slot = acc;
            acc += n - len + 1;
        }
        let mut table = CykTable {
            n,
            cells: Vec::new(),
            offsets,
            starts: vec![Vec::new(); n],
        };
        table.cells.resize_with(acc, || None);

        for (i, &m) in uni.item_members.iter().enumerate() {
            let mut bits = vec![0u64; words].into_boxed_slice();
            bits[(m / 64) as usize] |= 1 << (m % 64);
            let idx = table.idx(i, i + 1);
            table.cells[idx] = Some(Cell { bits, list: vec![m] });
            table.starts[i].push((i + 1) as u32);
        }

        let mut scratch_bits = vec![0u64; words];
        let mut scratch_list: Vec<MemberId> = Vec::new();
        for len in 2..=n {
            for i in 0..=n - len {
                let j = i + len;
                scratch_list.clear();
                for si in 0..table.starts[i].len() {
                    let k = table.starts[i][si] as usize;
                    if k >= j {
                        break;
                    }
                    let Some(right) = table.cell(k, j) else {
                        continue;
                    };
                    let left = table.cell(i, k).expect("starts lists non-empty cells");
                    for &m in &left.list {
                        if let Some((den, num)) = uni.right_rule[m as usize] {
                            if right.contains(den)
                                && scratch_bits[(num / 64) as usize] & (1 << (num % 64)) == 0
                            {
                                scratch_bits[(num / 64) as usize] |= 1 << (num % 64);
                                scratch_list.push(num);
                            }
                        }
                    }
                    for &m in &right.list {
                        if let Some((den, num)) = uni.left_rule[m as usize] {
                            if left.contains(den)
                                && scratch_bits[(num / 64) as usize] & (1 << (num % 64)) == 0
                            {
                                scratch_bits[(num / 64) as usize] |= 1 << (num % 64);
                                scratch_list.push(num);
                            }
                        }
                    }
                }
                if !scratch_list.is_empty() {
                    let mut bits = vec![0u64; words].into_boxed_slice();
                    for &m in &scratch_list {
                        bits[(m / 64) as usize] |= 1 << (m % 64);
                        scratch_bits[(m / 64) as usize] &= !(1 << (m % 64));
                    }
                    let idx = table.idx(i, j);
                    table.cells[idx] = Some(Cell {
                        bits,
                        list: std::mem::take(&mut scratch_list),
                    });
                    table.starts[i].push(j as u32);
                }
            }
        }
        table
    }

    fn top(&self) -> Option<&Cell> {
        self.cell(0, self.n)
    }
}

/// All strings obtained from `s` by one application of a reduction rule to
/// an adjacent pair, in pair order, without duplicates.
pub fn one_step(s: &CategoryString) -> Vec<CategoryString> {
    let items = s.items();
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for i in 0..items.len().saturating_sub(1) {
        let reduced = reduce_pair(&items[i], &items[i + 1]);
        if let Some(a) = reduced {
            let mut next = Vec::with_capacity(items.len() - 1);
            next.extend_from_slice(&items[..i]);
            next.push(a);
            next.extend_from_slice(&items[i + 2..]);
            let next = CategoryString::new(next).expect("one_step shrinks by one");
            if seen.insert(next.clone()) {
                out.push(next);
            }
        }
    }
    out
}

/// `A/B; B -> A` or `B; B\A -> A`, when one of them applies. At most one
/// rule can apply to a given pair: both at once would need each category to
/// contain the other.
fn reduce_pair(left: &Category, right: &Category) -> Option<Category> {
    if let Category::Right(num, den) = left {
        if **den == *right {
            return Some((**num).clone());
        }
    }
    if let Category::Left(den, num) = right {
        if **den == *left {
            return Some((**num).clone());
        }
    }
    None
}

/// True iff `s` reduces to the single category `target` by zero or more
/// rule applications. Exact.
pub fn reducible_to(s: &CategoryString, target: &Category) -> bool {
    // Counts are invariant under reduction, so a mismatch settles it
    // without building the table.
    if s.counts() != target.counts() {
        return false;
    }
    let uni = ReductionUniverse::build(s);
    let Some(t) = uni.member_id(target) else {
        return false;
    };
    CykTable::fill(&uni).top().is_some_and(|cell| cell.contains(t))
}

/// Exactly the categories `s` is reducible to; finite because every result
/// is contained in the universe of `s`.
pub fn derivable_singletons(s: &CategoryString) -> BTreeSet<Category> {
    let uni = ReductionUniverse::build(s);
    let table = CykTable::fill(&uni);
    match table.top() {
        Some(cell) => cell.list.iter().map(|&m| uni.member_category(m)).collect(),
        None => BTreeSet::new(),
    }
}

/// Up to `limit` structurally distinct reduction trees with the given root
/// and `s` as frontier, enumerated deterministically: split point
/// ascending, right-application candidates before left-application
/// candidates, left subtrees before right subtrees. Empty iff `s` is not
/// reducible to `target`.
pub fn reduction_trees(
    s: &CategoryString,
    target: &Category,
    limit: usize,
) -> Vec<ReductionTree> {
    if limit == 0 || s.counts() != target.counts() {
        return Vec::new();
    }
    let uni = ReductionUniverse::build(s);
    let Some(t) = uni.member_id(target) else {
        return Vec::new();
    };
    let table = CykTable::fill(&uni);
    if !table.top().is_some_and(|cell| cell.contains(t)) {
        return Vec::new();
    }
    collect_trees(&uni, &table, 0, table.n, t, limit)
}

fn collect_trees(
    uni: &ReductionUniverse,
    table: &CykTable,
    i: usize,
    j: usize,
    root: MemberId,
    limit: usize,
) -> Vec<ReductionTree> {
    let mut out = Vec::new();
    if j - i == 1 {
        if uni.item_members[i] == root {
            out.push(ReductionTree::Leaf(uni.member_category(root)));
        }
        return out;
    }
    'splits: for si in 0..table.starts[i].len() {
        let k = table.starts[i][si] as usize;
        if k >= j {
            break;
        }
        let Some(right) = table.cell(k, j) else {
            continue;
        };
        let left = table.cell(i, k).expect("starts lists non-empty cells");

        // A/B in the left part, B in the right part.
        for &m in &left.list {
            if let Some((den, num)) = uni.right_rule[m as usize] {
                if num == root && right.contains(den) {
                    let remaining = limit - out.len();
                    let lefts = collect_trees(uni, table, i, k, m, remaining);
                    let rights = collect_trees(uni, table, k, j, den, remaining);
                    let root_cat = uni.member_category(root);
                    for lt in &lefts {
                        for rt in &rights {
                            out.push(ReductionTree::ApplyRight {
                                root: root_cat.clone(),
                                left: Box::new(lt.clone()),
                                right: Box::new(rt.clone()),
                            });
                            if out.len() == limit {
                                break 'splits;
                            }
                        }
                    }
                }
            }
        }
        // B in the left part, B\A in the right part.
        for &m in &right.list {
            if let Some((den, num)) = uni.left_rule[m as usize] {
                if num == root && left.contains(den) {
                    let remaining = limit - out.len();
                    let lefts = collect_trees(uni, table, i, k, den, remaining);
                    let rights = collect_trees(uni, table, k, j, m, remaining);
                    let root_cat = uni.member_category(root);
                    for lt in &lefts {
                        for rt in &rights {
                            out.push(ReductionTree::ApplyLeft {
                                root: root_cat.clone(),
                                left: Box::new(lt.clone()),
                                right: Box::new(rt.clone()),
                            });
                            if out.len() == limit {
                                break 'splits;
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Exhaustive search over all one-step reduction sequences, memoized on
/// visited strings. Agrees with [`derivable_singletons`] on its whole
/// domain; exists to validate it.
pub fn brute_force_derivable(
    s: &CategoryString,
    max_len: usize,
) -> Result<BTreeSet<Category>, ReduceError> {
    brute_force_derivable_capped(s, max_len, DEFAULT_VISITED_CAP)
}

/// [`brute_force_derivable`] with an explicit cap on the visited set.
pub fn brute_force_derivable_capped(
    s: &CategoryString,
    max_len: usize,
    cap: usize,
) -> Result<BTreeSet<Category>, ReduceError> {
    if s.len() > max_len {
        return Err(ReduceError::InputTooLong {
            len: s.len(),
            max_len,
        });
    }
    let mut interner = Interner::default();
    let start: Vec<NodeId> = s.iter().map(|c| interner.intern(c)).collect();

    let mut singles: BTreeSet<NodeId> = BTreeSet::new();
    let mut visited: HashSet<Vec<NodeId>> = HashSet::new();
    let mut queue: VecDeque<Vec<NodeId>> = VecDeque::new();
    visited.insert(start.clone());
    queue.push_back(start);
    while let Some(cur) = queue.pop_front() {
        if cur.len() == 1 {
            singles.insert(cur[0]);
        }
        for i in 0..cur.len().saturating_sub(1) {
            let reduced = match interner.nodes[cur[i] as usize] {
                Node::Right(num, den) if den == cur[i + 1] => Some(num),
                _ => match interner.nodes[cur[i + 1] as usize] {
                    Node::Left(den, num) if den == cur[i] => Some(num),
                    _ => None,
                },
            };
            if let Some(a) = reduced {
                let mut next = Vec::with_capacity(cur.len() - 1);
                next.extend_from_slice(&cur[..i]);
                next.push(a);
                next.extend_from_slice(&cur[i + 2..]);
                if !visited.contains(&next) {
                    if visited.len() >= cap {
                        return Err(ReduceError::BudgetExceeded { cap });
                    }
                    visited.insert(next.clone());
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(singles.iter().map(|&id| interner.to_category(id)).collect())
}

/// True iff every primitive occurring in either string has the same count
/// in both: a necessary condition for one to reduce to the other.
pub fn count_preserved_check(s1: &CategoryString, s2: &CategoryString) -> bool {
    s1.counts() == s2.counts()
}

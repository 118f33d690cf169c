//! Arena-backed mergeable min-heap (pairing heap).
//!
//! All heaps built from one [`PairingArena`] share its node storage, so
//! melding two heaps is O(1) and no node is ever copied.

/// Handle of a heap living in a [`PairingArena`]. `None` is the empty heap.
pub type HeapRef = Option<usize>;

const NIL: u32 = u32::MAX;

// links are u32 to keep nodes small; arenas hold fewer than 2^32 - 1 items
#[derive(Debug, Clone)]
struct Node<K, V> {
    key: K,
    value: V,
    child: u32,
    sibling: u32,
}

#[derive(Debug, Clone)]
pub struct PairingArena<K, V> {
    nodes: Vec<Node<K, V>>,
    free: Vec<u32>,
    // scratch for the two-pass merge
    pairs: Vec<u32>,
}

impl<K: Ord + Clone, V> Default for PairingArena<K, V> {
    fn default() -> Self {
        Self::new()
    }
}

fn link_of(h: HeapRef) -> u32 {
    h.map_or(NIL, |i| i as u32)
}

fn heap_of(i: u32) -> HeapRef {
    (i != NIL).then_some(i as usize)
}

impl<K: Ord + Clone, V> PairingArena<K, V> {
    pub fn new() -> Self {
        Self {
            nodes: Vec::new(),
            free: Vec::new(),
            pairs: Vec::new(),
        }
    }

    pub fn with_capacity(n: usize) -> Self {
        Self {
            nodes: Vec::with_capacity(n),
            free: Vec::new(),
            pairs: Vec::new(),
        }
    }

    /// Number of live items across all heaps.
    pub fn len(&self) -> usize {
        self.nodes.len() - self.free.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn singleton(&mut self, key: K, value: V) -> HeapRef {
        let node = Node {
            key,
            value,
            child: NIL,
            sibling: NIL,
        };
        Some(match self.free.pop() {
            Some(i) => {
                self.nodes[i as usize] = node;
                i as usize
            }
            None => {
                assert!(self.nodes.len() < NIL as usize, "pairing arena is full");
                self.nodes.push(node);
                self.nodes.len() - 1
            }
        })
    }

    pub fn push(&mut self, heap: HeapRef, key: K, value: V) -> HeapRef {
        let one = self.singleton(key, value);
        self.meld(heap, one)
    }

    pub fn meld(&mut self, a: HeapRef, b: HeapRef) -> HeapRef {
        match (a, b) {
            (None, h) | (h, None) => h,
            (Some(a), Some(b)) => Some(self.link(a as u32, b as u32) as usize),
        }
    }

    fn link(&mut self, a: u32, b: u32) -> u32 {
        let (parent, child) = if self.nodes[b as usize].key < self.nodes[a as usize].key {
            (b, a)
        } else {
            (a, b)
        };
        self.nodes[child as usize].sibling = self.nodes[parent as usize].child;
        self.nodes[parent as usize].child = child;
        parent
    }

    pub fn peek(&self, heap: HeapRef) -> Option<(&K, &V)> {
        heap.map(|i| (&self.nodes[i].key, &self.nodes[i].value))
    }

    pub fn peek_mut(&mut self, heap: HeapRef) -> Option<&mut V> {
        heap.map(move |i| &mut self.nodes[i].value)
    }

    /// Removes the minimum; returns the remaining heap and the removed item.
    pub fn pop(&mut self, heap: HeapRef) -> (HeapRef, Option<(K, V)>)
    where
        V: Default,
    {
        let Some(root) = heap else {
            return (None, None);
        };
        let rest = self.merge_pairs(self.nodes[root].child);
        let node = &mut self.nodes[root];
        let item = (node.key.clone(), std::mem::take(&mut node.value));
        node.child = NIL;
        node.sibling = NIL;
        self.free.push(root as u32);
        (rest, Some(item))
    }

    fn merge_pairs(&mut self, first: u32) -> HeapRef {
        debug_assert!(self.pairs.is_empty());
        let mut cur = first;
        while cur != NIL {
            let a = cur;
            let b = self.nodes[a as usize].sibling;
            self.nodes[a as usize].sibling = NIL;
            if b == NIL {
                self.pairs.push(a);
                break;
            }
            cur = self.nodes[b as usize].sibling;
            self.nodes[b as usize].sibling = NIL;
            let m = self.link(a, b);
            self.pairs.push(m);
        }
        let mut acc = self.pairs.pop()?;
        while let Some(next) = self.pairs.pop() {
            acc = self.link(next, acc);
        }
        heap_of(acc)
    }

    /// Pops every item whose key satisfies `pred` onto `out`, in increasing
    /// key order.
    pub fn pop_while(
        &mut self,
        mut heap: HeapRef,
        mut pred: impl FnMut(&K) -> bool,
        out: &mut Vec<(K, V)>,
    ) -> HeapRef
    where
        V: Default,
    {
        while let Some((k, _)) = self.peek(heap) {
            if !pred(k) {
                break;
            }
            let (rest, item) = self.pop(heap);
            heap = rest;
            out.push(item.unwrap());
        }
        heap
    }

    /// Removes all items of `heap` in arbitrary order.
    pub fn drain(&mut self, heap: HeapRef) -> Vec<(K, V)>
    where
        V: Default,
    {
        let mut out = Vec::new();
        let mut stack = vec![link_of(heap)];
        while let Some(i) = stack.pop() {
            if i == NIL {
                continue;
            }
            let node = &mut self.nodes[i as usize];
            stack.push(std::mem::replace(&mut node.child, NIL));
            stack.push(std::mem::replace(&mut node.sibling, NIL));
            out.push((node.key.clone(), std::mem::take(&mut node.value)));
            self.free.push(i);
        }
        out
    }
}

//! Exact nearest-neighbor search over points on S³.
//!
//! Small codebooks are scanned linearly. Large ones use a 4D k-d tree whose
//! pruning never discards a cell that could hold an equally near point, so
//! both paths return the same `(distance_sq, index)` minimum bit for bit.

use crate::group::Su2;
use crate::scalar::Real;

/// Codebooks at or above this size get a k-d tree.
pub const INDEX_THRESHOLD: usize = 1000;

const LEAF_SIZE: usize = 8;

#[derive(Debug, Clone)]
enum Node<T> {
    Leaf(Vec<u32>),
    Split {
        axis: usize,
        value: T,
        left: Box<Node<T>>,
        right: Box<Node<T>>,
    },
}

/// Static k-d tree over codebook indices.
#[derive(Debug, Clone)]
pub struct KdTree<T> {
    root: Node<T>,
}

#[inline]
fn comp<T: Real>(g: &Su2<T>, axis: usize) -> T {
    match axis {
        0 => g.a,
        1 => g.b,
        2 => g.c,
        _ => g.d,
    }
}

/// `(distance, index)` lexicographic improvement test.
#[inline]
fn better<T: Real>(d: T, i: usize, best: (T, usize)) -> bool {
    d < best.0 || (d == best.0 && i < best.1)
}

impl<T: Real> KdTree<T> {
    pub fn build(points: &[Su2<T>]) -> Self {
        let idx: Vec<u32> = (0..points.len() as u32).collect();
        KdTree {
            root: Self::build_node(points, idx, 0),
        }
    }

    fn build_node(points: &[Su2<T>], mut idx: Vec<u32>, depth: usize) -> Node<T> {
        if idx.len() <= LEAF_SIZE {
            return Node::Leaf(idx);
        }
        // split on the axis with the widest spread
        let mut axis = depth % 4;
        let mut widest = T::neg_infinity();
        for ax in 0..4 {
            let (lo, hi) = idx.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &i| {
                let x = comp(&points[i as usize], ax);
                (lo.min(x), hi.max(x))
            });
            if hi - lo > widest {
                widest = hi - lo;
                axis = ax;
            }
        }
        idx.sort_by(|&i, &j| {
            comp(&points[i as usize], axis)
                .partial_cmp(&comp(&points[j as usize], axis))
                .unwrap()
                .then(i.cmp(&j))
        });
        let mid = idx.len() / 2;
        let value = comp(&points[idx[mid] as usize], axis);
        let right = idx.split_off(mid);
        Node::Split {
            axis,
            value,
            left: Box::new(Self::build_node(points, idx, depth + 1)),
            right: Box::new(Self::build_node(points, right, depth + 1)),
        }
    }

    /// Index of the nearest point, lowest index on ties.
    pub fn nearest(&self, points: &[Su2<T>], q: Su2<T>) -> usize {
        let mut best = (T::infinity(), usize::MAX);
        Self::search(&self.root, points, q, &mut best);
        best.1
    }

    fn search(node: &Node<T>, points: &[Su2<T>], q: Su2<T>, best: &mut (T, usize)) {
        match node {
            Node::Leaf(idx) => {
                for &i in idx {
                    let i = i as usize;
                    let d = q.distance_sq(points[i]);
                    if better(d, i, *best) {
                        *best = (d, i);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = comp(&q, *axis) - *value;
                let (near, far) = if diff < T::zero() { (left, right) } else { (right, left) };
                Self::search(near, points, q, best);
                // a tie on the far side can still win on index, so only
                // strictly farther cells are skipped
                if diff * diff <= best.0 {
                    Self::search(far, points, q, best);
                }
            }
        }
    }
}

/// Linear scan; lowest index on ties.
pub fn brute_force_nearest<T: Real>(points: &[Su2<T>], q: Su2<T>) -> usize {
    let mut best = (T::infinity(), usize::MAX);
    for (i, p) in points.iter().enumerate() {
        let d = q.distance_sq(*p);
        if better(d, i, best) {
            best = (d, i);
        }
    }
    best.1
}

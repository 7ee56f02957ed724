use std::cell::{Cell, RefCell};

use crate::error::{AdError, Result};
use crate::kernels;
use crate::real::Real;
use crate::LOG_CLAMP;

pub type NodeId = usize;

/// Provenance record for backward traversal.
#[derive(Debug, Clone)]
enum Op {
    Leaf,
    /// a[m,k] * b[k,n]; rank-1 operands are treated as [1,k] / [k,1].
    MatMul {
        a: NodeId,
        b: NodeId,
        m: usize,
        k: usize,
        n: usize,
    },
    /// Elementwise add; one operand may be a scalar (numel 1).
    Add { a: NodeId, b: NodeId },
    /// Elementwise mul; one operand may be a scalar (numel 1).
    Mul { a: NodeId, b: NodeId },
    /// v[r] added to every column of m[r,c].
    AddColBroadcast {
        mat: NodeId,
        vec: NodeId,
        rows: usize,
        cols: usize,
    },
    /// v[c] added to every row of m[r,c].
    AddRowBroadcast {
        mat: NodeId,
        vec: NodeId,
        rows: usize,
        cols: usize,
    },
    Concat { parts: Vec<NodeId> },
    Slice {
        x: NodeId,
        offset: usize,
        len: usize,
    },
    Tanh { x: NodeId },
    Sigmoid { x: NodeId },
    Softmax { x: NodeId },
    /// ln(max(x, 1e-12)) elementwise.
    Log { x: NodeId },
    /// -ln(max(sum_{i in indices} x[i], 1e-12)); scalar output.
    NllGather { x: NodeId, indices: Vec<usize> },
}

#[derive(Debug)]
struct Node<T> {
    data: Vec<T>,
    shape: Vec<usize>,
    op: Op,
}

/// Records a computation graph; owns node data and, after [`Tape::backward`],
/// per-node gradients. A tape and its variables are confined to one worker.
pub struct Tape<T: Real> {
    nodes: RefCell<Vec<Node<T>>>,
    grads: RefCell<Vec<Option<Vec<T>>>>,
    backward_done: Cell<bool>,
}

/// Lightweight handle to a node on a [`Tape`].
pub struct Var<'t, T: Real> {
    tape: &'t Tape<T>,
    id: NodeId,
}

impl<T: Real> Clone for Var<'_, T> {
    fn clone(&self) -> Self {
        *self
    }
}
impl<T: Real> Copy for Var<'_, T> {}

impl<T: Real> Default for Tape<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> Tape<T> {
    pub fn new() -> Self {
        Tape {
            nodes: RefCell::new(Vec::new()),
            grads: RefCell::new(Vec::new()),
            backward_done: Cell::new(false),
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.borrow().len()
    }

    fn push(&self, data: Vec<T>, shape: Vec<usize>, op: Op) -> Var<'_, T> {
        debug_assert_eq!(data.len(), shape.iter().product::<usize>());
        let mut nodes = self.nodes.borrow_mut();
        let id = nodes.len();
        nodes.push(Node { data, shape, op });
        Var { tape: self, id }
    }

    /// Register a leaf vector (input, parameter or constant).
    pub fn vector(&self, data: Vec<T>) -> Var<'_, T> {
        let n = data.len();
        self.push(data, vec![n], Op::Leaf)
    }

    /// Register a leaf matrix with `rows * cols` row-major entries.
    pub fn matrix(&self, data: Vec<T>, rows: usize, cols: usize) -> Result<Var<'_, T>> {
        if data.len() != rows * cols {
            return Err(AdError::ShapeMismatch {
                op: "matrix",
                detail: format!("{} entries for shape [{rows}, {cols}]", data.len()),
            });
        }
        Ok(self.push(data, vec![rows, cols], Op::Leaf))
    }

    pub fn scalar(&self, v: T) -> Var<'_, T> {
        self.push(vec![v], vec![1], Op::Leaf)
    }

    pub fn zeros(&self, n: usize) -> Var<'_, T> {
        self.push(vec![T::zero(); n], vec![n], Op::Leaf)
    }

    /// Flat concatenation of non-empty parts into a vector.
    pub fn concat<'t>(&'t self, parts: &[Var<'t, T>]) -> Result<Var<'t, T>> {
        if parts.is_empty() {
            return Err(AdError::EmptyInput { op: "concat" });
        }
        for p in parts {
            self.check_owned(*p)?;
        }
        let nodes = self.nodes.borrow();
        let total: usize = parts.iter().map(|p| nodes[p.id].data.len()).sum();
        let mut data = Vec::with_capacity(total);
        for p in parts {
            data.extend_from_slice(&nodes[p.id].data);
        }
        drop(nodes);
        Ok(self.push(
            data,
            vec![total],
            Op::Concat {
                parts: parts.iter().map(|p| p.id).collect(),
            },
        ))
    }

    /// Stack equal-length vectors as the rows of a new matrix.
    pub fn concat_rows<'t>(&'t self, rows: &[Var<'t, T>], cols: usize) -> Result<Var<'t, T>> {
        if rows.is_empty() {
            return Err(AdError::EmptyInput { op: "concat_rows" });
        }
        for r in rows {
            self.check_owned(*r)?;
            if r.numel() != cols {
                return Err(AdError::ShapeMismatch {
                    op: "concat_rows",
                    detail: format!("row has {} entries, expected {cols}", r.numel()),
                });
            }
        }
        let v = self.concat(rows)?;
        let mut nodes = self.nodes.borrow_mut();
        nodes[v.id].shape = vec![rows.len(), cols];
        drop(nodes);
        Ok(v)
    }

    fn check_owned(&self, v: Var<'_, T>) -> Result<()> {
        if std::ptr::eq(self, v.tape) {
            Ok(())
        } else {
            Err(AdError::ForeignVar)
        }
    }

    /// Reverse pass from a scalar loss. Each node is visited exactly once in
    /// reverse creation order (a topological order by construction). Calling
    /// this a second time without [`Tape::reset_grads`] is an error.
    pub fn backward(&self, loss: Var<'_, T>) -> Result<()> {
        self.check_owned(loss)?;
        if self.backward_done.get() {
            return Err(AdError::BackwardWithoutReset);
        }
        let nodes = self.nodes.borrow();
        if nodes[loss.id].data.len() != 1 {
            return Err(AdError::NonScalarLoss {
                numel: nodes[loss.id].data.len(),
            });
        }
        let mut grads = self.grads.borrow_mut();
        grads.clear();
        grads.resize(nodes.len(), None);
        grads[loss.id] = Some(vec![T::one()]);

        let clamp = T::from_f64(LOG_CLAMP);
        for id in (0..=loss.id).rev() {
            let (before, after) = grads.split_at_mut(id);
            let Some(gout) = after[0].as_deref() else {
                continue;
            };
            let node = &nodes[id];
            match &node.op {
                Op::Leaf => {}
                Op::MatMul { a, b, m, k, n } => {
                    let (m, k, n) = (*m, *k, *n);
                    let a_data = &nodes[*a].data;
                    let b_data = &nodes[*b].data;
                    accum(&mut before[*a], m * k, |da| {
                        kernels::matmul_nt_acc(gout, b_data, da, m, n, k);
                    });
                    accum(&mut before[*b], k * n, |db| {
                        kernels::matmul_tn_acc(a_data, gout, db, m, k, n);
                    });
                }
                Op::Add { a, b } => {
                    let na = nodes[*a].data.len();
                    let nb = nodes[*b].data.len();
                    accum(&mut before[*a], na, |da| {
                        if na == gout.len() {
                            for (d, g) in da.iter_mut().zip(gout) {
                                *d = *d + *g;
                            }
                        } else {
                            // scalar operand
                            for g in gout {
                                da[0] = da[0] + *g;
                            }
                        }
                    });
                    accum(&mut before[*b], nb, |db| {
                        if nb == gout.len() {
                            for (d, g) in db.iter_mut().zip(gout) {
                                *d = *d + *g;
                            }
                        } else {
                            for g in gout {
                                db[0] = db[0] + *g;
                            }
                        }
                    });
                }
                Op::Mul { a, b } => {
                    let a_data = &nodes[*a].data;
                    let b_data = &nodes[*b].data;
                    let na = a_data.len();
                    let nb = b_data.len();
                    accum(&mut before[*a], na, |da| {
                        if na == gout.len() {
                            for i in 0..na {
                                let bv = if nb == 1 { b_data[0] } else { b_data[i] };
                                da[i] = da[i] + gout[i] * bv;
                            }
                        } else {
                            for i in 0..gout.len() {
                                da[0] = da[0] + gout[i] * b_data[i];
                            }
                        }
                    });
                    accum(&mut before[*b], nb, |db| {
                        if nb == gout.len() {
                            for i in 0..nb {
                                let av = if na == 1 { a_data[0] } else { a_data[i] };
                                db[i] = db[i] + gout[i] * av;
                            }
                        } else {
                            for i in 0..gout.len() {
                                db[0] = db[0] + gout[i] * a_data[i];
                            }
                        }
                    });
                }
                Op::AddColBroadcast {
                    mat,
                    vec,
                    rows,
                    cols,
                } => {
                    let (rows, cols) = (*rows, *cols);
                    accum(&mut before[*mat], rows * cols, |dm| {
                        for (d, g) in dm.iter_mut().zip(gout) {
                            *d = *d + *g;
                        }
                    });
                    accum(&mut before[*vec], rows, |dv| {
                        for i in 0..rows {
                            let mut acc = T::zero();
                            for j in 0..cols {
                                acc = acc + gout[i * cols + j];
                            }
                            dv[i] = dv[i] + acc;
                        }
                    });
                }
                Op::AddRowBroadcast {
                    mat,
                    vec,
                    rows,
                    cols,
                } => {
                    let (rows, cols) = (*rows, *cols);
                    accum(&mut before[*mat], rows * cols, |dm| {
                        for (d, g) in dm.iter_mut().zip(gout) {
                            *d = *d + *g;
                        }
                    });
                    accum(&mut before[*vec], cols, |dv| {
                        for i in 0..rows {
                            for j in 0..cols {
                                dv[j] = dv[j] + gout[i * cols + j];
                            }
                        }
                    });
                }
                Op::Concat { parts } => {
                    let mut offset = 0;
                    for p in parts {
                        let len = nodes[*p].data.len();
                        accum(&mut before[*p], len, |dp| {
                            for (d, g) in dp.iter_mut().zip(&gout[offset..offset + len]) {
                                *d = *d + *g;
                            }
                        });
                        offset += len;
                    }
                }
                Op::Slice { x, offset, len } => {
                    let total = nodes[*x].data.len();
                    let (offset, len) = (*offset, *len);
                    accum(&mut before[*x], total, |dx| {
                        for (d, g) in dx[offset..offset + len].iter_mut().zip(gout) {
                            *d = *d + *g;
                        }
                    });
                }
                Op::Tanh { x } => {
                    let y = &node.data;
                    accum(&mut before[*x], y.len(), |dx| {
                        for i in 0..y.len() {
                            dx[i] = dx[i] + gout[i] * (T::one() - y[i] * y[i]);
                        }
                    });
                }
                Op::Sigmoid { x } => {
                    let y = &node.data;
                    accum(&mut before[*x], y.len(), |dx| {
                        for i in 0..y.len() {
                            dx[i] = dx[i] + gout[i] * y[i] * (T::one() - y[i]);
                        }
                    });
                }
                Op::Softmax { x } => {
                    let y = &node.data;
                    let mut dot = T::zero();
                    for i in 0..y.len() {
                        dot = dot + gout[i] * y[i];
                    }
                    accum(&mut before[*x], y.len(), |dx| {
                        for i in 0..y.len() {
                            dx[i] = dx[i] + y[i] * (gout[i] - dot);
                        }
                    });
                }
                Op::Log { x } => {
                    let x_data = &nodes[*x].data;
                    accum(&mut before[*x], x_data.len(), |dx| {
                        for i in 0..x_data.len() {
                            if x_data[i] > clamp {
                                dx[i] = dx[i] + gout[i] / x_data[i];
                            }
                        }
                    });
                }
                Op::NllGather { x, indices } => {
                    let x_data = &nodes[*x].data;
                    let mut p = T::zero();
                    for &i in indices {
                        p = p + x_data[i];
                    }
                    if p > clamp {
                        let g = -gout[0] / p;
                        accum(&mut before[*x], x_data.len(), |dx| {
                            for &i in indices {
                                dx[i] = dx[i] + g;
                            }
                        });
                    }
                }
            }
        }
        self.backward_done.set(true);
        Ok(())
    }

    /// Clear all gradients so the same graph can run backward again.
    pub fn reset_grads(&self) {
        self.grads.borrow_mut().clear();
        self.backward_done.set(false);
    }
}

fn accum<T: Real>(slot: &mut Option<Vec<T>>, numel: usize, write: impl FnOnce(&mut [T])) {
    let buf = slot.get_or_insert_with(|| vec![T::zero(); numel]);
    write(buf);
}

impl<'t, T: Real> Var<'t, T> {
    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn shape(&self) -> Vec<usize> {
        self.tape.nodes.borrow()[self.id].shape.clone()
    }

    pub fn numel(&self) -> usize {
        self.tape.nodes.borrow()[self.id].data.len()
    }

    /// Copy of this node's value.
    pub fn data(&self) -> Vec<T> {
        self.tape.nodes.borrow()[self.id].data.clone()
    }

    /// Value of a single-element node.
    pub fn value(&self) -> T {
        self.tape.nodes.borrow()[self.id].data[0]
    }

    /// Gradient accumulated by the latest backward pass; zeros for nodes the
    /// loss does not reach.
    pub fn grad(&self) -> Vec<T> {
        let grads = self.tape.grads.borrow();
        grads
            .get(self.id)
            .and_then(|g| g.clone())
            .unwrap_or_else(|| vec![T::zero(); self.numel()])
    }

    fn binary_shape_check(
        self,
        rhs: Var<'t, T>,
        op: &'static str,
    ) -> Result<(usize, usize)> {
        self.tape.check_owned(rhs)?;
        let na = self.numel();
        let nb = rhs.numel();
        if na == nb || na == 1 || nb == 1 {
            Ok((na, nb))
        } else {
            Err(AdError::ShapeMismatch {
                op,
                detail: format!("numel {na} vs {nb}"),
            })
        }
    }

    /// Elementwise addition; either side may be a scalar.
    pub fn add(self, rhs: Var<'t, T>) -> Result<Var<'t, T>> {
        let (na, nb) = self.binary_shape_check(rhs, "add")?;
        let nodes = self.tape.nodes.borrow();
        let a = &nodes[self.id].data;
        let b = &nodes[rhs.id].data;
        let n = na.max(nb);
        let mut data = Vec::with_capacity(n);
        for i in 0..n {
            let av = if na == 1 { a[0] } else { a[i] };
            let bv = if nb == 1 { b[0] } else { b[i] };
            data.push(av + bv);
        }
        let shape = if na >= nb {
            nodes[self.id].shape.clone()
        } else {
            nodes[rhs.id].shape.clone()
        };
        drop(nodes);
        Ok(self.tape.push(data, shape, Op::Add { a: self.id, b: rhs.id }))
    }

    /// Elementwise multiplication; either side may be a scalar.
    pub fn mul(self, rhs: Var<'t, T>) -> Result<Var<'t, T>> {
        let (na, nb) = self.binary_shape_check(rhs, "mul")?;
        let nodes = self.tape.nodes.borrow();
        let a = &nodes[self.id].data;
        let b = &nodes[rhs.id].data;
        let n = na.max(nb);
        let mut data = Vec::with_capacity(n);
        for i in 0..n {
            let av = if na == 1 { a[0] } else { a[i] };
            let bv = if nb == 1 { b[0] } else { b[i] };
            data.push(av * bv);
        }
        let shape = if na >= nb {
            nodes[self.id].shape.clone()
        } else {
            nodes[rhs.id].shape.clone()
        };
        drop(nodes);
        Ok(self.tape.push(data, shape, Op::Mul { a: self.id, b: rhs.id }))
    }

    /// Matrix product; rank-1 operands are read as [1,k] on the left and
    /// [k,1] on the right.
    pub fn matmul(self, rhs: Var<'t, T>) -> Result<Var<'t, T>> {
        self.tape.check_owned(rhs)?;
        let nodes = self.tape.nodes.borrow();
        let sa = &nodes[self.id].shape;
        let sb = &nodes[rhs.id].shape;
        let (m, k1, a_rank1) = match sa.len() {
            1 => (1, sa[0], true),
            2 => (sa[0], sa[1], false),
            _ => {
                return Err(AdError::ShapeMismatch {
                    op: "matmul",
                    detail: format!("lhs rank {}", sa.len()),
                })
            }
        };
        let (k2, n, b_rank1) = match sb.len() {
            1 => (sb[0], 1, true),
            2 => (sb[0], sb[1], false),
            _ => {
                return Err(AdError::ShapeMismatch {
                    op: "matmul",
                    detail: format!("rhs rank {}", sb.len()),
                })
            }
        };
        if k1 != k2 {
            return Err(AdError::ShapeMismatch {
                op: "matmul",
                detail: format!("inner dims {k1} vs {k2}"),
            });
        }
        let mut data = vec![T::zero(); m * n];
        kernels::matmul_acc(&nodes[self.id].data, &nodes[rhs.id].data, &mut data, m, k1, n);
        let shape = match (a_rank1, b_rank1) {
            (true, true) => vec![1],
            (true, false) => vec![n],
            (false, true) => vec![m],
            (false, false) => vec![m, n],
        };
        drop(nodes);
        Ok(self.tape.push(
            data,
            shape,
            Op::MatMul {
                a: self.id,
                b: rhs.id,
                m,
                k: k1,
                n,
            },
        ))
    }

    /// Add a vector to every column of this matrix.
    pub fn add_col_broadcast(self, v: Var<'t, T>) -> Result<Var<'t, T>> {
        self.tape.check_owned(v)?;
        let nodes = self.tape.nodes.borrow();
        let shape = nodes[self.id].shape.clone();
        if shape.len() != 2 {
            return Err(AdError::ShapeMismatch {
                op: "add_col_broadcast",
                detail: format!("matrix rank {}", shape.len()),
            });
        }
        let (rows, cols) = (shape[0], shape[1]);
        if nodes[v.id].data.len() != rows {
            return Err(AdError::ShapeMismatch {
                op: "add_col_broadcast",
                detail: format!("vector numel {} vs {rows} rows", nodes[v.id].data.len()),
            });
        }
        let m = &nodes[self.id].data;
        let vd = &nodes[v.id].data;
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(m[i * cols + j] + vd[i]);
            }
        }
        drop(nodes);
        Ok(self.tape.push(
            data,
            shape,
            Op::AddColBroadcast {
                mat: self.id,
                vec: v.id,
                rows,
                cols,
            },
        ))
    }

    /// Add a vector to every row of this matrix.
    pub fn add_row_broadcast(self, v: Var<'t, T>) -> Result<Var<'t, T>> {
        self.tape.check_owned(v)?;
        let nodes = self.tape.nodes.borrow();
        let shape = nodes[self.id].shape.clone();
        if shape.len() != 2 {
            return Err(AdError::ShapeMismatch {
                op: "add_row_broadcast",
                detail: format!("matrix rank {}", shape.len()),
            });
        }
        let (rows, cols) = (shape[0], shape[1]);
        if nodes[v.id].data.len() != cols {
            return Err(AdError::ShapeMismatch {
                op: "add_row_broadcast",
                detail: format!("vector numel {} vs {cols} cols", nodes[v.id].data.len()),
            });
        }
        let m = &nodes[self.id].data;
        let vd = &nodes[v.id].data;
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(m[i * cols + j] + vd[j]);
            }
        }
        drop(nodes);
        Ok(self.tape.push(
            data,
            shape,
            Op::AddRowBroadcast {
                mat: self.id,
                vec: v.id,
                rows,
                cols,
            },
        ))
    }

    /// Same data viewed under a new shape (recorded as an identity slice).
    pub fn reshaped(self, rows: usize, cols: usize) -> Result<Var<'t, T>> {
        let n = self.numel();
        if rows * cols != n {
            return Err(AdError::ShapeMismatch {
                op: "reshaped",
                detail: format!("{n} entries for shape [{rows}, {cols}]"),
            });
        }
        let nodes = self.tape.nodes.borrow();
        let data = nodes[self.id].data.clone();
        drop(nodes);
        Ok(self.tape.push(
            data,
            vec![rows, cols],
            Op::Slice {
                x: self.id,
                offset: 0,
                len: n,
            },
        ))
    }

    /// Contiguous sub-vector of the flat data.
    pub fn slice(self, offset: usize, len: usize) -> Result<Var<'t, T>> {
        if len == 0 {
            return Err(AdError::EmptyInput { op: "slice" });
        }
        let total = self.numel();
        if offset + len > total {
            return Err(AdError::IndexOutOfBounds {
                op: "slice",
                index: offset + len,
                len: total,
            });
        }
        let nodes = self.tape.nodes.borrow();
        let data = nodes[self.id].data[offset..offset + len].to_vec();
        drop(nodes);
        Ok(self.tape.push(
            data,
            vec![len],
            Op::Slice {
                x: self.id,
                offset,
                len,
            },
        ))
    }

    /// Row `i` of a rank-2 node.
    pub fn row(self, i: usize) -> Result<Var<'t, T>> {
        let shape = self.shape();
        if shape.len() != 2 {
            return Err(AdError::ShapeMismatch {
                op: "row",
                detail: format!("rank {}", shape.len()),
            });
        }
        if i >= shape[0] {
            return Err(AdError::IndexOutOfBounds {
                op: "row",
                index: i,
                len: shape[0],
            });
        }
        self.slice(i * shape[1], shape[1])
    }

    pub fn tanh(self) -> Var<'t, T> {
        let data: Vec<T> = self
            .tape
            .nodes
            .borrow()[self.id]
            .data
            .iter()
            .map(|&v| v.tanh())
            .collect();
        let shape = self.shape();
        self.tape.push(data, shape, Op::Tanh { x: self.id })
    }

    pub fn sigmoid(self) -> Var<'t, T> {
        let data: Vec<T> = self
            .tape
            .nodes
            .borrow()[self.id]
            .data
            .iter()
            .map(|&v| stable_sigmoid(v))
            .collect();
        let shape = self.shape();
        self.tape.push(data, shape, Op::Sigmoid { x: self.id })
    }

    /// Numerically stabilized softmax over a non-empty rank-1 node.
    pub fn softmax(self) -> Result<Var<'t, T>> {
        let shape = self.shape();
        if shape.len() != 1 {
            return Err(AdError::ShapeMismatch {
                op: "softmax",
                detail: format!("rank {}", shape.len()),
            });
        }
        let nodes = self.tape.nodes.borrow();
        let x = &nodes[self.id].data;
        if x.is_empty() {
            return Err(AdError::EmptyInput { op: "softmax" });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(AdError::NonFinite { op: "softmax" });
        }
        let data = kernels::softmax(x);
        drop(nodes);
        Ok(self.tape.push(data, shape, Op::Softmax { x: self.id }))
    }

    /// Elementwise `ln(max(x, 1e-12))`.
    pub fn log_clamped(self) -> Var<'t, T> {
        let clamp = T::from_f64(LOG_CLAMP);
        let data: Vec<T> = self
            .tape
            .nodes
            .borrow()[self.id]
            .data
            .iter()
            .map(|&v| if v > clamp { v.ln() } else { clamp.ln() })
            .collect();
        let shape = self.shape();
        self.tape.push(data, shape, Op::Log { x: self.id })
    }

    /// Negative log likelihood of the probability mass gathered at the given
    /// (distinct) indices: `-ln(max(sum x[i], 1e-12))`.
    pub fn nll_gather(self, indices: &[usize]) -> Result<Var<'t, T>> {
        let n = self.numel();
        for &i in indices {
            if i >= n {
                return Err(AdError::IndexOutOfBounds {
                    op: "nll_gather",
                    index: i,
                    len: n,
                });
            }
        }
        let nodes = self.tape.nodes.borrow();
        let x = &nodes[self.id].data;
        let mut p = T::zero();
        for &i in indices {
            p = p + x[i];
        }
        let clamp = T::from_f64(LOG_CLAMP);
        let value = -(if p > clamp { p } else { clamp }).ln();
        drop(nodes);
        Ok(self.tape.push(
            vec![value],
            vec![1],
            Op::NllGather {
                x: self.id,
                indices: indices.to_vec(),
            },
        ))
    }

    /// `1 - self` for a scalar node, composed from the primitive set.
    pub fn one_minus(self) -> Result<Var<'t, T>> {
        let one = self.tape.scalar(T::one());
        let neg_one = self.tape.scalar(-T::one());
        one.add(self.mul(neg_one)?)
    }
}

fn stable_sigmoid<T: Real>(x: T) -> T {
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

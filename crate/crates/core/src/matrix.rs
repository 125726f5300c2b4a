//! Dense matrices over `W(F_{p^m}) / p^N` and over the residue field.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};
use std::sync::Arc;

use crate::witt::{Residue, WittContext, WittElement};

#[derive(Clone, PartialEq, Eq)]
pub struct WittMatrix {
    rows: usize,
    cols: usize,
    data: Vec<WittElement>,
    ctx: Arc<WittContext>,
}

impl fmt::Debug for WittMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "WittMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl WittMatrix {
    pub fn zeros(ctx: &Arc<WittContext>, rows: usize, cols: usize) -> Self {
        WittMatrix {
            rows,
            cols,
            data: vec![WittElement::zero(ctx); rows * cols],
            ctx: ctx.clone(),
        }
    }

    pub fn identity(ctx: &Arc<WittContext>, n: usize) -> Self {
        let mut m = Self::zeros(ctx, n, n);
        for i in 0..n {
            m[(i, i)] = WittElement::one(ctx);
        }
        m
    }

    pub fn from_rows(ctx: &Arc<WittContext>, rows: Vec<Vec<WittElement>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        WittMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
            ctx: ctx.clone(),
        }
    }

    /// Integer matrix embedded in the prime subring.
    pub fn from_ints(ctx: &Arc<WittContext>, rows: &[Vec<i64>]) -> Self {
        Self::from_rows(
            ctx,
            rows.iter()
                .map(|row| row.iter().map(|&v| WittElement::from_int(ctx, v)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn ctx(&self) -> &Arc<WittContext> {
        &self.ctx
    }

    pub fn column(&self, j: usize) -> Vec<WittElement> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[WittElement]) {
        for (i, x) in v.iter().enumerate() {
            self[(i, j)] = x.clone();
        }
    }

    pub fn map(&self, f: impl Fn(&WittElement) -> WittElement) -> Self {
        WittMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
            ctx: self.ctx.clone(),
        }
    }

    /// Entrywise σ.
    pub fn frobenius(&self) -> Self {
        self.map(WittElement::frobenius)
    }

    pub fn inverse_frobenius(&self) -> Self {
        self.map(WittElement::inverse_frobenius)
    }

    pub fn frobenius_pow(&self, k: i64) -> Self {
        self.map(|x| x.frobenius_pow(k))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.ctx, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn scale(&self, s: &WittElement) -> Self {
        self.map(|x| x * s)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(WittElement::is_zero)
    }

    pub fn truncate(&self, k: u32) -> Self {
        self.map(|x| x.truncate(k))
    }

    pub fn eq_mod_p_pow(&self, other: &Self, k: u32) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.eq_mod_p_pow(b, k))
    }

    pub fn mul_vec(&self, v: &[WittElement]) -> Vec<WittElement> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = WittElement::zero(&self.ctx);
                for (j, x) in v.iter().enumerate() {
                    let a = &self[(i, j)];
                    if !a.is_zero() && !x.is_zero() {
                        acc = &acc + &(a * x);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn reduce(&self) -> ResidueMatrix {
        ResidueMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(WittElement::reduce).collect(),
        }
    }

    /// Re-expresses every entry through `f` into another context.
    pub fn map_into(&self, ctx: &Arc<WittContext>, f: impl Fn(&WittElement) -> WittElement) -> Self {
        WittMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
            ctx: ctx.clone(),
        }
    }

    /// Inverse of a matrix that is invertible modulo `p` (Gauss–Jordan with
    /// unit pivots). Returns `None` otherwise.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(&self.ctx, n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| a[(r, col)].is_unit())?;
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let pinv = a[(col, col)].inverse().expect("unit pivot");
            a.scale_row(col, &pinv);
            inv.scale_row(col, &pinv);
            for r in 0..n {
                if r != col && !a[(r, col)].is_zero() {
                    let factor = a[(r, col)].clone();
                    a.sub_row_multiple(r, col, &factor);
                    inv.sub_row_multiple(r, col, &factor);
                }
            }
        }
        Some(inv)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn scale_row(&mut self, i: usize, s: &WittElement) {
        for c in 0..self.cols {
            let v = &self[(i, c)] * s;
            self[(i, c)] = v;
        }
    }

    /// row_i -= factor · row_j
    fn sub_row_multiple(&mut self, i: usize, j: usize, factor: &WittElement) {
        for c in 0..self.cols {
            if self[(j, c)].is_zero() {
                continue;
            }
            let v = &self[(i, c)] - &(factor * &self[(j, c)]);
            self[(i, c)] = v;
        }
    }

    /// Characteristic polynomial `det(X·I - A)` by Berkowitz's division-free
    /// recursion, returned as `[c_0, …, c_n]` with `det(X·I - A) = Σ c_k X^{n-k}`
    /// (so `c_0 = 1`). Exact modulo `p^N`.
    pub fn charpoly(&self) -> Vec<WittElement> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let ctx = &self.ctx;
        if n == 0 {
            return vec![WittElement::one(ctx)];
        }
        let mut v = vec![WittElement::one(ctx), -&self[(0, 0)]];
        for r in 1..n {
            // Leading r×r block A_r, row R = A[r][0..r], column C = A[0..r][r].
            let mut t = Vec::with_capacity(r + 2);
            t.push(WittElement::one(ctx));
            t.push(-&self[(r, r)]);
            let mut w: Vec<WittElement> = (0..r).map(|i| self[(i, r)].clone()).collect();
            for k in 0..r {
                let mut dot = WittElement::zero(ctx);
                for (j, wj) in w.iter().enumerate() {
                    if !wj.is_zero() && !self[(r, j)].is_zero() {
                        dot = &dot + &(&self[(r, j)] * wj);
                    }
                }
                t.push(-dot);
                if k + 1 < r {
                    w = (0..r)
                        .map(|i| {
                            let mut acc = WittElement::zero(ctx);
                            for (j, wj) in w.iter().enumerate() {
                                if !wj.is_zero() && !self[(i, j)].is_zero() {
                                    acc = &acc + &(&self[(i, j)] * wj);
                                }
                            }
                            acc
                        })
                        .collect();
                }
            }
            let mut next = Vec::with_capacity(r + 2);
            for i in 0..r + 2 {
                let mut acc = WittElement::zero(ctx);
                for (j, vj) in v.iter().enumerate().take(i.min(r) + 1) {
                    let tk = &t[i - j];
                    if !tk.is_zero() && !vj.is_zero() {
                        acc = &acc + &(tk * vj);
                    }
                }
                next.push(acc);
            }
            v = next;
        }
        v
    }
}

impl Index<(usize, usize)> for WittMatrix {
    type Output = WittElement;
    fn index(&self, (i, j): (usize, usize)) -> &WittElement {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for WittMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut WittElement {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &WittMatrix {
    type Output = WittMatrix;
    fn mul(self, rhs: &WittMatrix) -> WittMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = WittMatrix::zeros(&self.ctx, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        let v = &out[(i, j)] + &(a * b);
                        out[(i, j)] = v;
                    }
                }
            }
        }
        out
    }
}

impl Add for &WittMatrix {
    type Output = WittMatrix;
    fn add(self, rhs: &WittMatrix) -> WittMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        WittMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
            ctx: self.ctx.clone(),
        }
    }
}

impl Sub for &WittMatrix {
    type Output = WittMatrix;
    fn sub(self, rhs: &WittMatrix) -> WittMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        WittMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
            ctx: self.ctx.clone(),
        }
    }
}

impl Neg for &WittMatrix {
    type Output = WittMatrix;
    fn neg(self) -> WittMatrix {
        self.map(|x| -x)
    }
}

/// Matrix over the residue field `F_{p^m}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Residue>,
}

impl ResidueMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Residue {
        &self.data[i * self.cols + j]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Residue::is_zero)
    }

    /// Sub-matrix on the given row indices (all columns).
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &i in rows {
            data.extend_from_slice(&self.data[i * self.cols..(i + 1) * self.cols]);
        }
        ResidueMatrix {
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(&self.data[i * self.cols..(i + 1) * self.cols]);
            data.extend_from_slice(&other.data[i * other.cols..(i + 1) * other.cols]);
        }
        ResidueMatrix {
            rows: self.rows,
            cols,
            data,
        }
    }

    /// Rank by Gaussian elimination over `F_{p^m}`.
    pub fn rank(&self) -> usize {
        let mut a: Vec<Vec<Residue>> = (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(pivot) = (rank..self.rows).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(pivot, rank);
            let inv = a[rank][col].inverse().expect("nonzero pivot");
            for r in 0..self.rows {
                if r != rank && !a[r][col].is_zero() {
                    let factor = a[r][col].mul(&inv);
                    for c in col..self.cols {
                        let v = a[r][c].sub(&factor.mul(&a[rank][c]));
                        a[r][c] = v;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Solves `self · x = b` for square invertible `self`.
    pub fn solve(&self, b: &[Residue]) -> Option<Vec<Residue>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a: Vec<Vec<Residue>> = (0..n)
            .map(|i| {
                let mut row = self.data[i * n..(i + 1) * n].to_vec();
                row.push(b[i].clone());
                row
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
            a.swap(pivot, col);
            let inv = a[col][col].inverse().expect("nonzero pivot");
            for c in col..=n {
                a[col][c] = a[col][c].mul(&inv);
            }
            for r in 0..n {
                if r != col && !a[r][col].is_zero() {
                    let factor = a[r][col].clone();
                    for c in col..=n {
                        let v = a[r][c].sub(&factor.mul(&a[col][c]));
                        a[r][c] = v;
                    }
                }
            }
        }
        Some(a.into_iter().map(|row| row[n].clone()).collect())
    }
}

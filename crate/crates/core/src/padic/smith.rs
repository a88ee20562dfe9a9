use alloc::vec::Vec;

use super::ModMatrix;

/// Smith normal form over `Z/p^N`: `left * M * right = diagonal` with
/// `diagonal[t][t] = p^{exponents[t]}` and `exponents` non-decreasing.
///
/// An exponent equal to `N` marks an entry that is zero at this precision.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub exponents: Vec<u32>,
    pub left: ModMatrix,
    pub right: ModMatrix,
    pub right_inverse: ModMatrix,
    pub diagonal: ModMatrix,
}

impl SmithForm {
    /// `log_p` of the order of `(Z/p^N)^cols / rowspace(M)`.
    pub fn cokernel_log_order(&self) -> u64 {
        let n = self.diagonal.params().precision() as u64;
        let missing = self.diagonal.cols() - self.exponents.len();
        self.exponents.iter().map(|&e| e as u64).sum::<u64>() + missing as u64 * n
    }

    /// `log_p` of the order of the row space of `M` inside `(Z/p^N)^cols`.
    pub fn rowspace_log_order(&self) -> u64 {
        let n = self.diagonal.params().precision() as u64;
        self.diagonal.cols() as u64 * n - self.cokernel_log_order()
    }

    /// `log_p |det|` for square input, `None` if the determinant is zero at this precision.
    pub fn det_valuation(&self) -> Option<u64> {
        let n = self.diagonal.params().precision();
        if self.exponents.iter().any(|&e| e >= n) {
            None
        } else {
            Some(self.exponents.iter().map(|&e| e as u64).sum())
        }
    }
}

impl ModMatrix {
    /// Diagonalizes by unimodular row and column operations.
    ///
    /// The pivot is an entry of minimal valuation in the remaining block, ties
    /// broken by lowest `(row, col)`.
    pub fn smith_form(&self) -> SmithForm {
        let pr = self.params();
        let cap = pr.precision();
        let (rows, cols) = (self.rows(), self.cols());
        let mut d = self.clone();
        let mut left = ModMatrix::identity(pr, rows);
        let mut right = ModMatrix::identity(pr, cols);
        let mut right_inv = ModMatrix::identity(pr, cols);
        let steps = rows.min(cols);
        let mut exponents = Vec::with_capacity(steps);

        for t in 0..steps {
            let mut best: Option<(u32, usize, usize)> = None;
            'search: for i in t..rows {
                for j in t..cols {
                    let v = pr.valuation_of(d.raw(i, j));
                    if best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, i, j));
                        if v == 0 {
                            break 'search;
                        }
                    }
                }
            }
            let Some((v, pi, pj)) = best.filter(|&(v, _, _)| v < cap) else {
                exponents.extend(core::iter::repeat_n(cap, steps - t));
                break;
            };

            d.swap_rows(t, pi);
            left.swap_rows(t, pi);
            d.swap_cols(t, pj);
            right.swap_cols(t, pj);
            right_inv.swap_rows(t, pj);

            let pv = pr.p().pow(v);
            let unit = d.raw(t, t) / pv;
            let unit_inv = pr.inverse_of(unit).expect("pivot cofactor is a unit");
            d.scale_row(t, unit_inv);
            left.scale_row(t, unit_inv);

            for i in 0..rows {
                if i != t && d.raw(i, t) != 0 {
                    let c = pr.neg(d.raw(i, t) / pv);
                    d.add_row_multiple(i, t, c);
                    left.add_row_multiple(i, t, c);
                }
            }
            for j in 0..cols {
                if j != t && d.raw(t, j) != 0 {
                    let c = d.raw(t, j) / pv;
                    // col_j -= c col_t  on M and V;  row_t += c row_j  on V^{-1}
                    d.add_col_multiple(j, t, pr.neg(c));
                    right.add_col_multiple(j, t, pr.neg(c));
                    right_inv.add_row_multiple(t, j, c);
                }
            }
            exponents.push(v);
        }

        SmithForm { exponents, left, right, right_inverse: right_inv, diagonal: d }
    }
}

/// `log_p` of the order of the subgroup of `(Z/p^N)^cols` spanned by `rows`.
pub fn lattice_log_order(m: &ModMatrix) -> u64 {
    m.smith_form().rowspace_log_order()
}

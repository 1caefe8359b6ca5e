//! Smith and Hermite normal forms over the integers for the small coboundary
//! matrices arising from finite groups.

pub type IMat = Vec<Vec<i128>>;

/// `u · a · v = d` with `u`, `v` unimodular and `d` diagonal (divisibility chain).
#[derive(Debug, Clone)]
pub struct Smith {
    pub u: IMat,
    pub v: IMat,
    pub diag: Vec<i128>,
}

fn identity(n: usize) -> IMat {
    (0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect()
}

pub fn smith_normal_form(a: &IMat, rows: usize, cols: usize) -> Smith {
    let mut m = a.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);
    let mut t = 0;
    while t < rows.min(cols) {
        // Pivot: smallest nonzero magnitude in the remaining block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if m[i][j] != 0 && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        m.swap(t, pi);
        u.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        for row in v.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            let p = m[t][t];
            for i in t + 1..rows {
                let q = m[i][t].div_euclid(p);
                if q != 0 {
                    for j in 0..cols {
                        m[i][j] -= q * m[t][j];
                    }
                    for j in 0..rows {
                        u[i][j] -= q * u[t][j];
                    }
                }
                if m[i][t] != 0 {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                let q = m[t][j].div_euclid(p);
                if q != 0 {
                    for i in 0..rows {
                        m[i][j] -= q * m[i][t];
                    }
                    for i in 0..cols {
                        v[i][j] -= q * v[i][t];
                    }
                }
                if m[t][j] != 0 {
                    dirty = true;
                }
            }
            if !dirty {
                // Enforce divisibility of the remaining block by the pivot.
                let mut fix = None;
                'scan: for i in t + 1..rows {
                    for j in t + 1..cols {
                        if m[i][j] % p != 0 {
                            fix = Some(i);
                            break 'scan;
                        }
                    }
                }
                match fix {
                    Some(i) => {
                        for j in 0..cols {
                            m[t][j] += m[i][j];
                        }
                        for j in 0..rows {
                            u[t][j] += u[i][j];
                        }
                        continue;
                    }
                    None => break,
                }
            }
            // Move the smallest entry of row/column t to the pivot.
            let mut best = (t, t);
            for i in t..rows {
                if m[i][t] != 0 && m[i][t].abs() < m[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t..cols {
                if m[t][j] != 0 && m[t][j].abs() < m[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            if best.0 != t {
                m.swap(t, best.0);
                u.swap(t, best.0);
            }
            if best.1 != t {
                for row in m.iter_mut() {
                    row.swap(t, best.1);
                }
                for row in v.iter_mut() {
                    row.swap(t, best.1);
                }
            }
        }
        if m[t][t] < 0 {
            for j in 0..cols {
                m[t][j] = -m[t][j];
            }
            for j in 0..rows {
                u[t][j] = -u[t][j];
            }
        }
        t += 1;
    }
    let diag = (0..rows.min(cols)).map(|i| m[i][i]).collect();
    Smith { u, v, diag }
}

/// Row-style Hermite normal form of the lattice spanned by `gens` (each of length n),
/// assumed to have full rank n.  Row k has its pivot in column k, entries above each
/// pivot are reduced into [0, pivot).
pub fn hermite_full_rank(gens: &[Vec<i128>], n: usize) -> IMat {
    let mut rows: Vec<Vec<i128>> = gens.iter().filter(|r| r.iter().any(|&x| x != 0)).cloned().collect();
    let mut basis: IMat = Vec::new();
    for col in 0..n {
        // Euclid on column `col` among the remaining rows.
        loop {
            let nz: Vec<usize> = (0..rows.len()).filter(|&i| rows[i][col] != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| rows[i][col].abs()).unwrap();
            let pv = rows[p][col];
            for &i in &nz {
                if i != p {
                    let q = rows[i][col].div_euclid(pv);
                    for j in 0..n {
                        rows[i][j] -= q * rows[p][j];
                    }
                }
            }
        }
        let idx = (0..rows.len()).find(|&i| rows[i][col] != 0).expect("lattice must have full rank");
        let mut r = rows.swap_remove(idx);
        if r[col] < 0 {
            for x in r.iter_mut() {
                *x = -*x;
            }
        }
        rows.retain(|r| r.iter().any(|&x| x != 0));
        basis.push(r);
    }
    for k in 0..n {
        for i in 0..k {
            let q = basis[i][k].div_euclid(basis[k][k]);
            if q != 0 {
                for j in 0..n {
                    basis[i][j] -= q * basis[k][j];
                }
            }
        }
    }
    basis
}

/// Reduce `x` to its unique representative modulo the lattice with Hermite basis `h`.
pub fn reduce_mod_lattice(x: &[i128], h: &IMat) -> Vec<i128> {
    let mut r = x.to_vec();
    for (k, row) in h.iter().enumerate() {
        let q = r[k].div_euclid(row[k]);
        if q != 0 {
            for j in 0..r.len() {
                r[j] -= q * row[j];
            }
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matmul(a: &IMat, b: &IMat) -> IMat {
        let (n, k, m) = (a.len(), b.len(), b[0].len());
        (0..n).map(|i| (0..m).map(|j| (0..k).map(|t| a[i][t] * b[t][j]).sum()).collect()).collect()
    }

    #[test]
    fn smith_of_small_matrix() {
        let a: IMat = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        let s = smith_normal_form(&a, 3, 3);
        assert_eq!(s.diag, vec![2, 6, 12]);
        let d = matmul(&matmul(&s.u, &a), &s.v);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(d[i][j], if i == j { s.diag[i] } else { 0 });
            }
        }
    }

    #[test]
    fn hermite_reduction_is_canonical() {
        let gens = vec![vec![2, 1], vec![0, 3], vec![4, 0]];
        let h = hermite_full_rank(&gens, 2);
        // x and x + lattice vector reduce identically.
        let x = vec![5, 7];
        let y = vec![5 + 2 * 3, 7 + 3 + 3 * 3];
        assert_eq!(reduce_mod_lattice(&x, &h), reduce_mod_lattice(&y, &h));
    }
}

//! Small dense integer matrices over `i128`.

/// Smith normal form of a square nonsingular matrix `m`.
///
/// Returns the diagonal `d` and a unimodular `v` with `u * m * v = diag(d)` for
/// some unimodular `u`. Consequently `x -> x * v` induces an isomorphism from
/// `Z^n / rowspace(m)` onto `sum Z/d_i`.
pub fn smith_with_right_transform(m: &[Vec<i128>]) -> (Vec<i128>, Vec<Vec<i128>>) {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m.to_vec();
    let mut v: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect();

    for t in 0..n {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if a[i][j] != 0
                        && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            a.swap(t, pi);
            swap_cols(&mut a, t, pj);
            swap_cols(&mut v, t, pj);

            let mut clean = true;
            for i in t + 1..n {
                let q = a[i][t].div_euclid(a[t][t]);
                if q != 0 {
                    for j in t..n {
                        a[i][j] -= q * a[t][j];
                    }
                }
                if a[i][t] != 0 {
                    clean = false;
                }
            }
            for j in t + 1..n {
                let q = a[t][j].div_euclid(a[t][t]);
                if q != 0 {
                    for i in t..n {
                        a[i][j] -= q * a[i][t];
                    }
                    for row in v.iter_mut() {
                        row[j] -= q * row[t];
                    }
                }
                if a[t][j] != 0 {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // pivot must divide the rest of the block
            let piv = a[t][t];
            let offender = (t + 1..n).find(|&i| (t + 1..n).any(|j| a[i][j] % piv != 0));
            match offender {
                Some(i) => {
                    for j in t..n {
                        a[t][j] += a[i][j];
                    }
                }
                None => break,
            }
        }
        if a[t][t] < 0 {
            for i in t..n {
                a[i][t] = -a[i][t];
            }
            for row in v.iter_mut() {
                row[t] = -row[t];
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

fn swap_cols(a: &mut [Vec<i128>], x: usize, y: usize) {
    if x != y {
        for row in a.iter_mut() {
            row.swap(x, y);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mul(a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<Vec<i128>> {
        let n = a.len();
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
            .collect()
    }

    #[test]
    fn diagonal_divisibility_and_determinant() {
        let m = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        let (d, v) = smith_with_right_transform(&m);
        assert_eq!(d, vec![2, 6, 12]);
        // m * v has the same row lattice as diag(d)
        let mv = mul(&m, &v);
        for row in &mv {
            for (j, x) in row.iter().enumerate() {
                assert_eq!(x % d[j], 0);
            }
        }
    }
}

//! Dense coefficient-vector kernels shared by the series types.

use crate::ring::Ring;

const KARATSUBA_CUTOFF: usize = 40;

fn lowest_nonzero<R: Ring>(ring: &R, a: &[R::Elem]) -> Option<usize> {
    a.iter().position(|c| !ring.is_zero(c))
}

fn highest_nonzero<R: Ring>(ring: &R, a: &[R::Elem]) -> Option<usize> {
    a.iter().rposition(|c| !ring.is_zero(c))
}

/// The first `len` coefficients of `a * b`.
pub(crate) fn mul_trunc<R: Ring>(ring: &R, a: &[R::Elem], b: &[R::Elem], len: usize) -> Vec<R::Elem> {
    let mut out = vec![ring.zero(); len];
    let (Some(la), Some(lb)) = (lowest_nonzero(ring, a), lowest_nonzero(ring, b)) else {
        return out;
    };
    if la + lb >= len {
        return out;
    }
    let room = len - la - lb;
    let ha = highest_nonzero(ring, a).unwrap().min(la + room - 1);
    let hb = highest_nonzero(ring, b).unwrap().min(lb + room - 1);
    let a = &a[la..=ha];
    let b = &b[lb..=hb];
    if a.len().min(b.len()) < KARATSUBA_CUTOFF {
        mul_naive_into(ring, a, b, &mut out[la + lb..]);
    } else if let Some((s, d)) = sparse_first(ring, a, b) {
        mul_naive_into(ring, s, d, &mut out[la + lb..]);
    } else {
        let prod = karatsuba(ring, a, b);
        for (o, c) in out[la + lb..].iter_mut().zip(prod) {
            *o = c;
        }
    }
    out
}

/// Orders the operands sparse-first when a skipping schoolbook product is
/// cheaper than Karatsuba.
fn sparse_first<'a, R: Ring>(ring: &R, a: &'a [R::Elem], b: &'a [R::Elem]) -> Option<(&'a [R::Elem], &'a [R::Elem])> {
    let nnz = |v: &[R::Elem]| v.iter().filter(|c| !ring.is_zero(c)).count();
    let (na, nb) = (nnz(a), nnz(b));
    let (s, d, ns) = if na * b.len() <= nb * a.len() { (a, b, na) } else { (b, a, nb) };
    let n = a.len().max(b.len()) as f64;
    let karatsuba_cost = 3.0 * n.powf(1.585);
    ((ns * d.len()) as f64 <= karatsuba_cost).then_some((s, d))
}

/// `out[k] += sum_{i+j=k} a_i b_j` for `k < out.len()`.
pub(crate) fn mul_naive_into<R: Ring>(ring: &R, a: &[R::Elem], b: &[R::Elem], out: &mut [R::Elem]) {
    let len = out.len();
    for (i, ai) in a.iter().enumerate() {
        if i >= len {
            break;
        }
        if ring.is_zero(ai) {
            continue;
        }
        for (bj, o) in b.iter().zip(out[i..].iter_mut()) {
            ring.mul_add_assign(o, ai, bj);
        }
    }
}

/// Full product `a * b` of length `a.len() + b.len() - 1`.
pub(crate) fn karatsuba<R: Ring>(ring: &R, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let out_len = a.len() + b.len() - 1;
    if a.len().min(b.len()) < KARATSUBA_CUTOFF {
        let mut out = vec![ring.zero(); out_len];
        mul_naive_into(ring, a, b, &mut out);
        return out;
    }
    // unbalanced operands: slice the longer one into chunks of the shorter length
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    if long.len() > 2 * short.len() {
        let mut out = vec![ring.zero(); out_len];
        for (k, chunk) in long.chunks(short.len()).enumerate() {
            let part = karatsuba(ring, chunk, short);
            let off = k * short.len();
            for (o, c) in out[off..].iter_mut().zip(part.iter()) {
                ring.add_assign(o, c);
            }
        }
        return out;
    }
    let m = long.len().div_ceil(2);
    let (a0, a1) = a.split_at(m.min(a.len()));
    let (b0, b1) = b.split_at(m.min(b.len()));
    let z0 = karatsuba(ring, a0, b0);
    let z2 = karatsuba(ring, a1, b1);
    let sa = add_vecs(ring, a0, a1);
    let sb = add_vecs(ring, b0, b1);
    let mut z1 = karatsuba(ring, &sa, &sb);
    for (i, c) in z0.iter().enumerate() {
        z1[i] = ring.sub(&z1[i], c);
    }
    for (i, c) in z2.iter().enumerate() {
        z1[i] = ring.sub(&z1[i], c);
    }
    let mut out = vec![ring.zero(); out_len];
    for (i, c) in z0.into_iter().enumerate() {
        out[i] = c;
    }
    for (i, c) in z1.iter().enumerate() {
        if m + i < out_len {
            ring.add_assign(&mut out[m + i], c);
        }
    }
    for (i, c) in z2.iter().enumerate() {
        ring.add_assign(&mut out[2 * m + i], c);
    }
    out
}

fn add_vecs<R: Ring>(ring: &R, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => ring.add(x, y),
            (Some(x), None) | (None, Some(x)) => x.clone(),
            (None, None) => unreachable!(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::ZmodPk;

    #[test]
    fn karatsuba_matches_schoolbook() {
        let r = ZmodPk::new(3, 5);
        let a: Vec<u64> = (0..173).map(|i| (i * i * 7 + 3) % 243).collect();
        let b: Vec<u64> = (0..61).map(|i| (i * 31 + 11) % 243).collect();
        let mut naive = vec![0; a.len() + b.len() - 1];
        mul_naive_into(&r, &a, &b, &mut naive);
        assert_eq!(karatsuba(&r, &a, &b), naive);
        assert_eq!(karatsuba(&r, &b, &a), naive);
        let sq = karatsuba(&r, &a, &a);
        let mut naive_sq = vec![0; 2 * a.len() - 1];
        mul_naive_into(&r, &a, &a, &mut naive_sq);
        assert_eq!(sq, naive_sq);
    }

    #[test]
    fn truncated_product_skips_valuation() {
        let r = ZmodPk::new(2, 8);
        let mut a = vec![0u64; 100];
        let mut b = vec![0u64; 100];
        for i in 10..100 {
            a[i] = (i as u64 * 5) % 256;
            b[i] = (i as u64 * 3 + 1) % 256;
        }
        let got = mul_trunc(&r, &a, &b, 100);
        let mut want = vec![0; 199];
        mul_naive_into(&r, &a, &b, &mut want);
        assert_eq!(got[..], want[..100]);
    }
}

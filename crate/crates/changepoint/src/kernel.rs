use crate::CpmError;

/// Longest sequence the integer bridge kernel supports: the walk values are
/// bounded by `t^2`, which must stay inside `i32`.
pub(crate) const MAX_T: usize = 40_000;

/// Two-sample Kolmogorov-Smirnov distance `D = sup_x |F_a(x) - F_b(x)|`.
///
/// Computed exactly over the pooled sorted sample; tied values share a single
/// ECDF step, so the supremum is only evaluated after a run of equal values
/// has been fully counted.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64, CpmError> {
    if a.is_empty() || b.is_empty() {
        return Err(CpmError::EmptySample);
    }
    let mut sa: Vec<f64> = a.to_vec();
    let mut sb: Vec<f64> = b.to_vec();
    sa.sort_by(|x, y| x.partial_cmp(y).unwrap());
    sb.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (na, nb) = (sa.len() as f64, sb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < sa.len() || j < sb.len() {
        // Next distinct pooled value.
        let v = match (sa.get(i), sb.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => break,
        };
        while i < sa.len() && sa[i] == v {
            i += 1;
        }
        while j < sb.len() && sb[j] == v {
            j += 1;
        }
        let diff = (i as f64 / na - j as f64 / nb).abs();
        if diff > d {
            d = diff;
        }
    }
    Ok(d)
}

/// Scratch buffers for [`d_max`]; reuse across calls to avoid allocation.
#[derive(Default)]
pub(crate) struct KernelScratch {
    a: Vec<i32>,
    mx: Vec<i32>,
    mn: Vec<i32>,
    pub(crate) arr: Vec<u32>,
    pub(crate) groups: Vec<u32>,
}

/// Maximum standardized split statistic from rank data.
///
/// `arr[j]` is the arrival time (1-based, in `1..=t`) of the `j`-th smallest
/// observation; `groups` holds the exclusive end indices of runs of tied
/// values (for all-distinct data this is `1, 2, ..., t`). For every split
/// `k` in `2..=t-1` the walk
/// `A(k, j) = t * C(k, j) - j * k`, with `C(k, j)` the number of the `j`
/// smallest pooled values that arrived at times `<= k`, satisfies
/// `|F_a - F_b|(j) = |A(k, j)| / (k (t - k))`; the standardized statistic is
/// therefore `max_j |A| / sqrt(t k (t - k))`.
///
/// Returns `(D_t, k_hat)` where `k_hat` attains the maximum (first maximum on
/// ties); `(0.0, 0)` when `t < 3`.
pub(crate) fn d_max(arr: &[u32], groups: &[u32], scratch: &mut KernelScratch) -> (f64, usize) {
    let t = arr.len();
    if t < 3 {
        return (0.0, 0);
    }
    assert!(t <= MAX_T, "kernel limit exceeded: t = {t}");
    let ti = t as i32;
    scratch.a.clear();
    scratch.a.resize(t, 0);
    scratch.mx.clear();
    scratch.mx.resize(t, 0);
    scratch.mn.clear();
    scratch.mn.resize(t, 0);
    let a = &mut scratch.a[..t];
    let mx = &mut scratch.mx[..t];
    let mn = &mut scratch.mn[..t];

    let mut gi = 0usize;
    for (j, &s) in arr.iter().enumerate() {
        let s = s as usize;
        // Walk step: A(k, .) += t - k for k >= s, else -= k.
        for (k, ak) in a.iter_mut().enumerate().take(s.min(t)).skip(1) {
            *ak -= k as i32;
        }
        for (k, ak) in a.iter_mut().enumerate().take(t).skip(s) {
            *ak += ti - k as i32;
        }
        // The ECDF difference is only defined once a run of ties is complete.
        if gi < groups.len() && (j + 1) as u32 == groups[gi] {
            gi += 1;
            for k in 1..t {
                mx[k] = mx[k].max(a[k]);
                mn[k] = mn[k].min(a[k]);
            }
        }
    }

    let tf = t as f64;
    let mut best = f64::NEG_INFINITY;
    let mut khat = 0usize;
    for k in 2..t {
        let amp = mx[k].max(-mn[k]) as f64;
        let stat = amp / (tf * k as f64 * (t - k) as f64).sqrt();
        if stat > best {
            best = stat;
            khat = k;
        }
    }
    (best, khat)
}

/// Fill `arr`/`groups` in `scratch` from values in arrival order, handling
/// ties (equal values form one ECDF group).
pub(crate) fn ranks_from_values(vals: &[f64], scratch: &mut KernelScratch) {
    let t = vals.len();
    let mut idx: Vec<usize> = (0..t).collect();
    idx.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap().then(i.cmp(&j)));
    scratch.arr.clear();
    scratch.groups.clear();
    for (j, &i) in idx.iter().enumerate() {
        scratch.arr.push((i + 1) as u32);
        let last_of_group = j + 1 == t || vals[idx[j + 1]] != vals[i];
        if last_of_group {
            scratch.groups.push((j + 1) as u32);
        }
    }
}

/// Maximum standardized split statistic of a sequence in observation order:
/// `D_t = max_{k in 2..=t-1} sqrt(k (t - k) / t) * KS(x[..k], x[k..])`.
///
/// Returns `(D_t, k_hat)`; errors when `t < 3`.
pub fn max_split_stat(vals: &[f64]) -> Result<(f64, usize), CpmError> {
    if vals.len() < 3 {
        return Err(CpmError::TooShort(vals.len(), 3));
    }
    if vals.len() > MAX_T {
        return Err(CpmError::TooLong(vals.len(), MAX_T));
    }
    let mut scratch = KernelScratch::default();
    ranks_from_values(vals, &mut scratch);
    let arr = std::mem::take(&mut scratch.arr);
    let groups = std::mem::take(&mut scratch.groups);
    let out = d_max(&arr, &groups, &mut scratch);
    Ok(out)
}

//! Independent reference computations shared by the integration tests.
//! Nothing here calls the simplex solver or the scheme builders.

#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn seeded(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn log2_1p(x: f64) -> f64 {
    (1.0 + x).log2()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Oracle {
    Optimal(f64),
    Infeasible,
    Unbounded,
}

/// Solves `n x n` by Gaussian elimination with partial pivoting.
fn solve_square(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = m[r][col] / m[col][col];
                if f != 0.0 {
                    let pivot_row = m[col].clone();
                    for (v, p) in m[r][col..n].iter_mut().zip(&pivot_row[col..n]) {
                        *v -= f * p;
                    }
                    b[r] -= f * b[col];
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / m[i][i]).collect())
}

fn combinations(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return;
    }
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn best_vertex(obj: &[f64], rows: &[Vec<f64>], rhs: &[f64], bound: f64) -> Option<(f64, Vec<f64>)> {
    let n = obj.len();
    let mut all_rows: Vec<Vec<f64>> = rows.to_vec();
    let mut all_rhs: Vec<f64> = rhs.to_vec();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = -1.0;
        all_rows.push(e.clone());
        all_rhs.push(0.0);
        e[j] = 1.0;
        all_rows.push(e);
        all_rhs.push(bound);
    }
    let tol = |b: f64| 1e-9 * (1.0 + b.abs());
    let mut best: Option<(f64, Vec<f64>)> = None;
    combinations(all_rows.len(), n, |pick| {
        let m: Vec<Vec<f64>> = pick.iter().map(|&i| all_rows[i].clone()).collect();
        let b: Vec<f64> = pick.iter().map(|&i| all_rhs[i]).collect();
        let Some(x) = solve_square(m, b) else { return };
        let feasible = all_rows
            .iter()
            .zip(&all_rhs)
            .all(|(r, &b)| r.iter().zip(&x).map(|(a, v)| a * v).sum::<f64>() <= b + tol(b));
        if feasible {
            let v: f64 = obj.iter().zip(&x).map(|(c, v)| c * v).sum();
            if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
                best = Some((v, x));
            }
        }
    });
    best
}

/// Maximizes `obj·x` over `{x >= 0 : rows x <= rhs}` by enumerating basic
/// solutions inside a large box. The optimum is unbounded when enlarging
/// the box moves it.
pub fn enumerate_lp(obj: &[f64], rows: &[Vec<f64>], rhs: &[f64]) -> Oracle {
    const BOX: f64 = 1e4;
    let Some((v, x)) = best_vertex(obj, rows, rhs, BOX) else {
        return Oracle::Infeasible;
    };
    if x.iter().any(|&xi| xi > BOX * 0.5) {
        if let Some((v2, _)) = best_vertex(obj, rows, rhs, 2.0 * BOX) {
            if v2 > v + 1e-6 * (1.0 + v.abs()) {
                return Oracle::Unbounded;
            }
        }
    }
    Oracle::Optimal(v)
}

/// Vertices of `{p >= 0 : a·p <= b for each (a0, a2, b)}` in the plane.
pub fn polygon_vertices(halfplanes: &[(f64, f64, f64)]) -> Vec<[f64; 2]> {
    let mut lines: Vec<(f64, f64, f64)> = halfplanes.to_vec();
    lines.push((-1.0, 0.0, 0.0));
    lines.push((0.0, -1.0, 0.0));
    let mut out = Vec::new();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let (a, b, e) = lines[i];
            let (c, d, f) = lines[j];
            let det = a * d - b * c;
            if det.abs() < 1e-14 {
                continue;
            }
            let p = [(e * d - b * f) / det, (a * f - e * c) / det];
            if lines.iter().all(|&(u, v, w)| u * p[0] + v * p[1] <= w + 1e-12) {
                out.push(p);
            }
        }
    }
    out
}

/// Capacities of a channel, computed directly from the SNR triple.
#[derive(Debug, Clone, Copy)]
pub struct Caps {
    pub c01: f64,
    pub c10: f64,
    pub c12: f64,
    pub c21: f64,
    pub cm: f64,
}

impl Caps {
    pub fn reciprocal(g01: f64, g12: f64) -> Self {
        Self { c01: log2_1p(g01), c10: log2_1p(g01), c12: log2_1p(g12), c21: log2_1p(g12), cm: log2_1p(g01 + g12) }
    }
}

/// Two-step XOR region for fixed time shares `(l1, l2, l3)`, assuming
/// `γ10 >= γ12`: the relay decodes both packets in step one, broadcasts
/// their XOR in step two and the surplus of source 2 in step three.
pub fn two_step_xor_polygon(c: &Caps, l1: f64, l2: f64, l3: f64) -> Vec<[f64; 2]> {
    polygon_vertices(&[
        (1.0, 0.0, (l1 * c.c01).min(l2 * c.c12)),
        (0.0, 1.0, l1 * c.c21),
        (1.0, 1.0, l1 * c.cm),
        (-1.0, 1.0, l3 * c.c10),
    ])
}

/// Support values of the two-step XOR region in each direction, by a dense
/// grid over the time-share simplex with step `1 / n`.
pub fn two_step_xor_support_grid(c: &Caps, dirs: &[[f64; 2]], n: usize) -> Vec<f64> {
    let mut best = vec![0.0f64; dirs.len()];
    let step = 1.0 / n as f64;
    for i in 0..=n {
        for j in 0..=(n - i) {
            let (l1, l2) = (i as f64 * step, j as f64 * step);
            let l3 = (1.0 - l1 - l2).max(0.0);
            let verts = two_step_xor_polygon(c, l1, l2, l3);
            for (k, w) in dirs.iter().enumerate() {
                for p in &verts {
                    best[k] = best[k].max(w[0] * p[0] + w[1] * p[1]);
                }
            }
        }
    }
    best
}

/// Largest `t` with `(t, t)` in the two-step XOR region, by the same grid.
pub fn two_step_xor_equal_rate_grid(c: &Caps, n: usize) -> f64 {
    let mut best = 0.0f64;
    let step = 1.0 / n as f64;
    for i in 0..=n {
        for j in 0..=(n - i) {
            let (l1, l2) = (i as f64 * step, j as f64 * step);
            // On the diagonal the R2 - R0 row is slack for any l3 >= 0.
            let t = (l1 * c.c01).min(l2 * c.c12).min(l1 * c.c21).min(0.5 * l1 * c.cm);
            best = best.max(t);
        }
    }
    best
}

/// `θ'` from its defining equation, the non-zero root of
/// `C12(θ) + C10(1 - θ) - C10`, which is concave in θ and zero at θ = 0.
pub fn theta_prime_bisect(g10: f64, g12: f64) -> f64 {
    let f = |t: f64| log2_1p(g12 * t) + log2_1p(g10 * (1.0 - t)) - log2_1p(g10);
    let (mut a, mut b) = (0.0, 1.0);
    for _ in 0..200 {
        let (m1, m2) = (a + (b - a) / 3.0, b - (b - a) / 3.0);
        if f(m1) < f(m2) {
            a = m1;
        } else {
            b = m2;
        }
    }
    let peak = 0.5 * (a + b);
    if f(peak) <= 0.0 {
        return 0.0;
    }
    if f(1.0) >= 0.0 {
        return 1.0;
    }
    let (mut lo, mut hi) = (peak, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Gap area between the broadcast arc and the capacity corner, as
/// `∫ (C10 - y(x)) dx` along the arc, by the trapezoid rule in θ.
pub fn gap_trapezoid(g10: f64, g12: f64, intervals: usize) -> f64 {
    let tp = (1.0 + 1.0 / g10 - 1.0 / g12).max(0.0);
    if tp >= 1.0 {
        return 0.0;
    }
    let c10 = log2_1p(g10);
    // Along the arc x = C12(θ), so dx = γ12 / ((1 + θ γ12) ln 2) dθ.
    let f = |t: f64| {
        let y = log2_1p(g12 * t) + log2_1p(g10 * (1.0 - t));
        (c10 - y) * g12 / ((1.0 + t * g12) * std::f64::consts::LN_2)
    };
    let h = (1.0 - tp) / intervals as f64;
    let mut sum = 0.5 * (f(tp) + f(1.0));
    for i in 1..intervals {
        sum += f(tp + h * i as f64);
    }
    sum * h
}

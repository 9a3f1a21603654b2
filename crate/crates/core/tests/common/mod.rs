//! Independent oracles shared by the graded tests and the acceptance suite.
//! Nothing here calls the library's elimination or cohomology routines.
#![allow(dead_code)]

use std::collections::HashSet;

use les_core::gf2::BitMatrix;
use les_core::graded::{DifferentialSpace, ExactTriple, GradedSpace, OrderInterval, OrderMap};
use les_core::local_model::{model_twist, CotangentPoint, TwistProfile};
use les_core::torus::{
    build_floer_scenario, generic_offsets, primitive_directions, ScenarioParams, SlopeCurve,
    TwistConvention,
};
use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Dense = Vec<Vec<bool>>;

pub fn dense(m: &BitMatrix) -> Dense {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m.get(i, j)).collect())
        .collect()
}

/// Row reduction on plain boolean rows.
pub fn dense_rank(mut rows: Dense) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i][col]) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && row[col] {
                for (a, b) in row.iter_mut().zip(&pivot) {
                    *a ^= *b;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn transpose(m: &Dense, nrows: usize, ncols: usize) -> Dense {
    (0..ncols)
        .map(|j| (0..nrows).map(|i| m[i][j]).collect())
        .collect()
}

fn mat_vec(m: &Dense, v: &[bool]) -> Vec<bool> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(false, |acc, (a, b)| acc ^ (*a & *b)))
        .collect()
}

/// Basis of the kernel of `m` (`nrows x ncols`), by elimination on columns.
pub fn dense_kernel(m: &Dense, ncols: usize) -> Vec<Vec<bool>> {
    let nrows = m.len();
    // Reduce [m^T | I]; rows whose m^T part vanishes span the kernel.
    let mut aug: Dense = (0..ncols)
        .map(|j| {
            let mut r: Vec<bool> = (0..nrows).map(|i| m[i][j]).collect();
            r.extend((0..ncols).map(|k| k == j));
            r
        })
        .collect();
    let mut rank = 0;
    for col in 0..nrows {
        let Some(p) = (rank..aug.len()).find(|&i| aug[i][col]) else {
            continue;
        };
        aug.swap(rank, p);
        let pivot = aug[rank].clone();
        for (i, row) in aug.iter_mut().enumerate() {
            if i != rank && row[col] {
                for (a, b) in row.iter_mut().zip(&pivot) {
                    *a ^= *b;
                }
            }
        }
        rank += 1;
    }
    aug[rank..].iter().map(|r| r[nrows..].to_vec()).collect()
}

/// `dim H` of a square differential by enumerating all `2^n` vectors.
pub fn brute_cohomology(d: &BitMatrix) -> usize {
    let n = d.ncols();
    assert!(n <= 20);
    let cols: Vec<u32> = (0..n)
        .map(|j| (0..n).fold(0u32, |m, i| m | (u32::from(d.get(i, j)) << i)))
        .collect();
    let mut kernel = 0usize;
    let mut image = HashSet::new();
    for v in 0u32..(1u32 << n) {
        let mut w = 0u32;
        for (j, c) in cols.iter().enumerate() {
            if v >> j & 1 == 1 {
                w ^= c;
            }
        }
        if w == 0 {
            kernel += 1;
        }
        image.insert(w);
    }
    (kernel.trailing_zeros() - image.len().trailing_zeros()) as usize
}

fn q(n: i64) -> Rational64 {
    Rational64::new(n, 8)
}

/// A random complex with `n` generators whose cohomology has dimension
/// `n - 2k`: `k` disjoint pairs `e_i -> e_j` (`i < j`) conjugated by a
/// random lower unitriangular change of basis. Grades are non-decreasing in
/// the index, so every entry has a nonnegative shift.
pub fn random_complex(rng: &mut ChaCha8Rng, n: usize) -> (DifferentialSpace<Rational64>, usize) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let k = rng.gen_range(0..=n / 2);
    let mut s = BitMatrix::zeros(n, n);
    for p in 0..k {
        let (a, b) = (idx[2 * p], idx[2 * p + 1]);
        s.set(a.max(b), a.min(b), true);
    }
    let mut p = BitMatrix::identity(n);
    for i in 0..n {
        for j in 0..i {
            p.set(i, j, rng.gen_bool(0.4));
        }
    }
    let pinv = p.inverse().expect("unitriangular");
    let d = p.mul(&s).mul(&pinv);
    let mut g: Vec<i64> = (0..n).map(|_| rng.gen_range(-16..16)).collect();
    g.sort();
    let space = GradedSpace::new((0..n).map(|i| (format!("e{i}"), q(g[i])))).unwrap();
    let map = OrderMap::from_matrix(
        space.clone(),
        space.clone(),
        &d,
        OrderInterval::at_least(Rational64::from(0)),
    )
    .unwrap();
    (DifferentialSpace::new(space, map).unwrap(), n - 2 * k)
}

/// `dim H` by dense elimination: `n - 2 rank d`.
pub fn oracle_h<G: les_core::Grade>(c: &DifferentialSpace<G>) -> usize {
    c.dim() - 2 * dense_rank(dense(&c.d().matrix()))
}

/// Rank of the map induced on cohomology by `f: A -> B`.
pub fn oracle_induced<G: les_core::Grade>(
    f: &OrderMap<G>,
    a: &DifferentialSpace<G>,
    b: &DifferentialSpace<G>,
) -> usize {
    let da = dense(&a.d().matrix());
    let db = dense(&b.d().matrix());
    let fm = dense(&f.matrix());
    let (na, nb) = (a.dim(), b.dim());
    let boundaries = transpose(&db, nb, nb);
    let mut rows = boundaries.clone();
    for z in dense_kernel(&da, na) {
        rows.push(mat_vec(&fm, &z));
    }
    dense_rank(rows) - dense_rank(boundaries)
}

/// Triples from the torus scenario builder over random slopes, offsets,
/// seeds and flags.
pub fn generated_triples(
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<(String, ExactTriple<Rational64>)> {
    let dirs = primitive_directions(3);
    let delta = 0.004;
    let profile = TwistProfile::shrink_until_wobbly(0.02, 1.0, delta).unwrap();
    let mut out = Vec::new();
    while out.len() < count {
        let pick = |rng: &mut ChaCha8Rng| dirs[rng.gen_range(0..dirs.len())];
        let (dl, d0, d1) = (pick(rng), pick(rng), pick(rng));
        let par = |a: (i64, i64), b: (i64, i64)| a.0 * b.1 == a.1 * b.0;
        if par(dl, d0) || par(dl, d1) || par(d0, d1) {
            continue;
        }
        let l = SlopeCurve::new(dl.0, dl.1, Rational64::from(0)).unwrap();
        let Ok((a, b)) = generic_offsets(&l, d0, d1, rng.gen(), 24) else {
            continue;
        };
        let mut params = ScenarioParams::new(0.0625, profile);
        params.delta = delta;
        params.seed = rng.gen();
        params.higher_terms = rng.gen_bool(0.7);
        params.cancel_pairs = rng.gen_bool(0.7);
        params.convention = if rng.gen_bool(0.5) {
            TwistConvention::Positive
        } else {
            TwistConvention::Negative
        };
        let Ok(s) = build_floer_scenario(&l, &a, &b, &params) else {
            continue;
        };
        out.push((format!("{l} {a} {b} seed {}", params.seed), s.triple));
    }
    out
}

// Finite differences on the cotangent model.

pub const H: f64 = 1e-5;

pub fn random_point(rng: &mut ChaCha8Rng, n: usize, mu_range: (f64, f64)) -> CotangentPoint<f64> {
    let v: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let u: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let y = CotangentPoint::retract(&u, &v);
    let scale = rng.gen_range(mu_range.0..mu_range.1) / y.mu();
    CotangentPoint::new(y.u().iter().map(|x| x * scale).collect(), y.v().to_vec()).unwrap()
}

/// Tangent frame of `T` at `y`: `(e_k, 0)` and `(-<u, e_k> v, e_k)` for an
/// orthonormal basis `e_k` of `v^⊥`.
pub fn tangent_frame(y: &CotangentPoint<f64>) -> Vec<Vec<f64>> {
    let basis = les_core::local_model::orthonormal_complement(y.v());
    let m = y.v().len();
    let mut frame = Vec::new();
    for e in &basis {
        let mut a = e.clone();
        a.extend(std::iter::repeat_n(0.0, m));
        frame.push(a);
    }
    for e in &basis {
        let c: f64 = y.u().iter().zip(e).map(|(a, b)| a * b).sum();
        let mut a: Vec<f64> = y.v().iter().map(|x| -c * x).collect();
        a.extend(e.iter().copied());
        frame.push(a);
    }
    frame
}

pub fn moved(y: &CotangentPoint<f64>, xi: &[f64], s: f64) -> CotangentPoint<f64> {
    let m = y.v().len();
    let u: Vec<f64> = y.u().iter().zip(&xi[..m]).map(|(a, b)| a + s * b).collect();
    let v: Vec<f64> = y.v().iter().zip(&xi[m..]).map(|(a, b)| a + s * b).collect();
    CotangentPoint::retract(&u, &v)
}

pub fn push_forward(p: &TwistProfile<f64>, y: &CotangentPoint<f64>, xi: &[f64]) -> Vec<f64> {
    let a = model_twist(p, &moved(y, xi, H)).to_flat();
    let b = model_twist(p, &moved(y, xi, -H)).to_flat();
    a.iter().zip(&b).map(|(x, z)| (x - z) / (2.0 * H)).collect()
}

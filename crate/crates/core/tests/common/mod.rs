//! Seeded random ensembles shared by the integration suites.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use green_bounds::cli::MatrixFile;
use green_bounds::ComplexMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Minimum distance of every eigenvalue from the imaginary axis.
pub const MIN_GAP: f64 = 0.2;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_normal(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Upper triangular with complex Gaussian entries; each diagonal real part
/// is pushed away from the axis by `MIN_GAP`.
pub fn random_triangular(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Greater => Complex64::new(0.0, 0.0),
        std::cmp::Ordering::Less => complex_normal(rng),
        std::cmp::Ordering::Equal => {
            let z = complex_normal(rng);
            Complex64::new(z.re.signum() * (z.re.abs() + MIN_GAP), z.im)
        }
    })
}

/// As `random_triangular`, with every eigenvalue in the left half-plane.
pub fn random_stable_triangular(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let mut b = random_triangular(rng, n);
    for i in 0..n {
        b[(i, i)].re = -b[(i, i)].re.abs();
    }
    b
}

/// `count` triangular matrices with `n` cycling through `lo..=hi`.
pub fn triangular_ensemble(seed: u64, count: usize, lo: usize, hi: usize) -> Vec<ComplexMatrix> {
    let mut r = rng(seed);
    (0..count)
        .map(|i| random_triangular(&mut r, lo + i % (hi - lo + 1)))
        .collect()
}

/// Haar-like unitary from Gram–Schmidt on a complex Gaussian matrix.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<Complex64> = (0..n).map(|_| complex_normal(rng)).collect();
        for _ in 0..2 {
            for q in &cols {
                let proj: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    ComplexMatrix::from_fn(n, |i, j| cols[j][i])
}

/// `Q B Qᴴ`.
pub fn conjugate(q: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    &(q * b) * &q.conj_transpose()
}

pub fn random_dense(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, |_, _| complex_normal(rng))
}

/// `count` points from `lo` to `hi`, geometrically spaced.
pub fn logspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// 40 times: `±logspace(1e-2, 10, 20)`.
pub fn time_grid() -> Vec<f64> {
    let pos = logspace(1e-2, 10.0, 20);
    let mut grid: Vec<f64> = pos.iter().rev().map(|t| -t).collect();
    grid.extend(pos);
    grid
}

pub fn write_matrix(dir: &Path, name: &str, a: &ComplexMatrix) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, MatrixFile::from_matrix(a).to_json()).unwrap();
    path
}

/// Column `name` of a CSV document; empty cells map to `None`.
pub fn csv_column(text: &str, name: &str) -> Vec<Option<f64>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let idx = reader
        .headers()
        .unwrap()
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"));
    reader
        .records()
        .map(|r| {
            let cell = r.unwrap()[idx].to_string();
            (!cell.is_empty()).then(|| cell.parse().unwrap())
        })
        .collect()
}

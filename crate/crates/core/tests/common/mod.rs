#![allow(dead_code)]

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn deg(x: f64) -> f64 {
    x.to_radians()
}

/// Uniform on the sphere by rejection from the cube.
pub fn random_unit(rng: &mut StdRng) -> [f64; 3] {
    loop {
        let v = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let n2: f64 = v.iter().map(|c| c * c).sum();
        if n2 > 1e-4 && n2 <= 1.0 {
            let n = n2.sqrt();
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

pub type Dense = Vec<Vec<Complex64>>;

pub fn dense_identity(n: usize) -> Dense {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect()
        })
        .collect()
}

pub fn kron(a: &Dense, b: &Dense) -> Dense {
    let (n, m) = (a.len(), b.len());
    let mut out = vec![vec![Complex64::new(0.0, 0.0); n * m]; n * m];
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                for l in 0..m {
                    out[i * m + k][j * m + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn matvec(a: &Dense, v: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

/// `H^{⊗nb}` built by explicit Kronecker products.
pub fn hadamard_power(nb: usize) -> Dense {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h1: Dense = vec![
        vec![Complex64::new(s, 0.0), Complex64::new(s, 0.0)],
        vec![Complex64::new(s, 0.0), Complex64::new(-s, 0.0)],
    ];
    (0..nb).fold(dense_identity(1), |acc, _| kron(&acc, &h1))
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Decimal digits of `x` printed as `%.4e`, as an integer mantissa and exponent.
pub fn sci_parts(text: &str) -> (i64, i32) {
    let (m, e) = text.split_once('e').expect("scientific notation");
    let mant: f64 = m.parse().unwrap();
    ((mant * 1e4).round() as i64, e.parse().unwrap())
}

/// True when two `%.4e` strings differ by at most one unit in the last digit.
/// Values below `1e-12` in magnitude all count as zero.
pub fn within_last_digit(a: &str, b: &str) -> bool {
    let (va, vb): (f64, f64) = (a.parse().unwrap(), b.parse().unwrap());
    if va.abs() < 1e-12 && vb.abs() < 1e-12 {
        return true;
    }
    let (ma, ea) = sci_parts(a);
    let (mb, eb) = sci_parts(b);
    if ea == eb {
        return (ma - mb).abs() <= 1;
    }
    // 9.9999e-01 against 1.0000e+00
    let ulp = 10f64.powi(ea.max(eb) - 4);
    (va - vb).abs() <= ulp * 1.000001
}

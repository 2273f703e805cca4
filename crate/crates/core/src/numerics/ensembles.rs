//! Random-matrix ensembles: complex Ginibre matrices, Haar-distributed
//! unitaries and isometries.

use super::linalg::{C64, CMatrix};
use rand::Rng;
use rand_distr::StandardNormal;

/// n×m complex Ginibre matrix: i.i.d. entries with density (1/π) e^{−|v|²},
/// i.e. real and imaginary parts each N(0, 1/2) so that E|v|² = 1.
pub fn sample_ginibre<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> CMatrix {
    assert!(n >= 1 && m >= 1, "sample_ginibre: dimensions must be >= 1");
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(n, m, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * s, im * s)
    })
}

/// Haar-distributed n×n unitary.
///
/// QR of a Ginibre matrix with the R-diagonal phase correction: dividing
/// each column of Q by the phase of the matching diagonal entry of R. The
/// unadjusted Q of a QR decomposition is not Haar-distributed.
pub fn sample_haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    sample_haar_isometry(n, n, rng)
}

/// n×m (n >= m) isometry distributed as the first m columns of a Haar
/// unitary on U(n).
pub fn sample_haar_isometry<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> CMatrix {
    assert!(n >= m && m >= 1, "sample_haar_isometry: need n >= m >= 1");
    let g = sample_ginibre(n, m, rng);
    let qr = g.qr();
    let r_diag: Vec<C64> = (0..m).map(|i| qr.r()[(i, i)]).collect();
    let mut q = qr.q();
    for (j, d) in r_diag.iter().enumerate() {
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        // divide column by the phase of R_jj
        let corr = phase.conj();
        for i in 0..n {
            q[(i, j)] *= corr;
        }
    }
    q
}

/// `rows` distinct rows of a Haar unitary on U(n), as a rows.len()×n matrix.
///
/// By invariance of the Haar measure under column permutations, any fixed
/// set of k rows of U is distributed as the adjoint of an n×k Haar isometry.
/// Sampling only the needed rows turns an O(n³) layer into O(n k²).
pub fn sample_haar_unitary_rows<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> CMatrix {
    assert!(k <= n, "sample_haar_unitary_rows: need k <= n");
    sample_haar_isometry(n, k, rng).adjoint()
}

/// k×m corner block of a Haar unitary on U(n) ("truncated unitary").
///
/// Fixed row and column subsets of a Haar unitary are distributed as the
/// leading block, so the block can be sampled from an isometry of the
/// smaller side: O(n·min(k,m)²) instead of O(n³).
pub fn sample_haar_corner<R: Rng + ?Sized>(n: usize, k: usize, m: usize, rng: &mut R) -> CMatrix {
    assert!(k <= n && m <= n, "sample_haar_corner: block must fit in U(n)");
    if m <= k {
        sample_haar_isometry(n, m, rng).rows(0, k).into_owned()
    } else {
        sample_haar_isometry(n, k, rng).rows(0, m).into_owned().adjoint()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::linalg::unitarity_error;
    use crate::numerics::rng::RngStream;

    #[test]
    fn ginibre_second_moment_scalar() {
        // E|v|^2 = 1, checked over 1e5 draws within 3 standard errors.
        let mut rng = RngStream::new(11, 0);
        let n = 100_000;
        let mut sum = 0.0;
        let mut sum2 = 0.0;
        for _ in 0..n {
            let v = sample_ginibre(1, 1, &mut rng)[(0, 0)].norm_sqr();
            sum += v;
            sum2 += v * v;
        }
        let mean = sum / n as f64;
        let var = sum2 / n as f64 - mean * mean;
        let se = (var / n as f64).sqrt();
        assert!((mean - 1.0).abs() < 3.0 * se, "mean {mean}, se {se}");
    }

    #[test]
    fn ginibre_second_moment_matrix() {
        let mut rng = RngStream::new(12, 0);
        let a = sample_ginibre(64, 64, &mut rng);
        let n = (64 * 64) as f64;
        let mean = a.iter().map(|v| v.norm_sqr()).sum::<f64>() / n;
        // Var(|v|^2) = 1 for unit-mean exponential
        let se = (1.0 / n).sqrt();
        assert!((mean - 1.0).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn ginibre_fourth_moment() {
        // E|v|^4 = 2 for the complex Gaussian (|v|^2 is Exp(1)); Monte-Carlo
        // oracle over many draws of small matrices.
        let mut rng = RngStream::new(13, 0);
        let mut vals = Vec::with_capacity(40_000);
        for _ in 0..10_000 {
            let a = sample_ginibre(2, 2, &mut rng);
            vals.extend(a.iter().map(|v| v.norm_sqr().powi(2)));
        }
        let n = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / n;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let se = (var / n).sqrt();
        assert!((mean - 2.0).abs() < 3.0 * se, "mean {mean}, se {se}");
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = RngStream::new(14, 0);
        let u = sample_haar_unitary(8, &mut rng);
        assert!(unitarity_error(&u) <= 1e-12);
    }

    #[test]
    fn haar_phase_uniform_on_u1() {
        // n=1: the entry is a uniform phase; KS test of arg/2pi against U(0,1)
        let mut rng = RngStream::new(15, 0);
        let n = 10_000;
        let mut args: Vec<f64> = (0..n)
            .map(|_| {
                let u = sample_haar_unitary(1, &mut rng)[(0, 0)];
                (u.arg() + std::f64::consts::PI) / (2.0 * std::f64::consts::PI)
            })
            .collect();
        args.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let d = args
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let lo = (x - i as f64 / n as f64).abs();
                let hi = ((i + 1) as f64 / n as f64 - x).abs();
                lo.max(hi)
            })
            .fold(0.0f64, f64::max);
        let p = crate::numerics::special::kolmogorov_sf((n as f64).sqrt() * d);
        assert!(p > 0.01, "KS p = {p}");
    }

    #[test]
    fn haar_entry_second_moment() {
        // E|U_11|^2 = 1/N for N=4, 1e4 draws
        let mut rng = RngStream::new(16, 0);
        let n = 10_000;
        let vals: Vec<f64> =
            (0..n).map(|_| sample_haar_unitary(4, &mut rng)[(0, 0)].norm_sqr()).collect();
        let mean = vals.iter().sum::<f64>() / n as f64;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        let se = (var / n as f64).sqrt();
        assert!((mean - 0.25).abs() < 3.0 * se, "mean {mean}, se {se}");
    }

    #[test]
    fn haar_left_invariance_moments() {
        // for fixed V, first and second moments of VU match those of U
        let mut rng = RngStream::new(17, 0);
        let dim = 3;
        let v = sample_haar_unitary(dim, &mut rng);
        let n = 4000;
        let mut m1 = C64::new(0.0, 0.0);
        let mut m1v = C64::new(0.0, 0.0);
        let mut m2 = 0.0;
        let mut m2v = 0.0;
        for _ in 0..n {
            let u = sample_haar_unitary(dim, &mut rng);
            let vu = &v * &u;
            m1 += u[(0, 0)];
            m1v += vu[(0, 0)];
            m2 += u[(0, 0)].norm_sqr();
            m2v += vu[(0, 0)].norm_sqr();
        }
        let nf = n as f64;
        // first moments vanish; second moments equal 1/dim. SE of the mean of
        // |u|^2 ~ (1/dim)/sqrt(n) up to O(1) factors.
        let se2 = (1.0 / dim as f64) / nf.sqrt() * 2.0;
        assert!((m1 / nf).norm() < 4.0 / nf.sqrt());
        assert!((m1v / nf).norm() < 4.0 / nf.sqrt());
        assert!((m2 / nf - 1.0 / dim as f64).abs() < 3.0 * se2);
        assert!((m2v / nf - 1.0 / dim as f64).abs() < 3.0 * se2);
    }

    #[test]
    fn unitary_rows_match_full_distribution_moments() {
        // rows sampler: E|row entry|^2 = 1/n and orthonormal rows
        let mut rng = RngStream::new(18, 0);
        let rows = sample_haar_unitary_rows(16, 4, &mut rng);
        assert_eq!(rows.nrows(), 4);
        assert_eq!(rows.ncols(), 16);
        assert!(unitarity_error(&rows.adjoint()) <= 1e-12);
    }

    #[test]
    fn reproducibility_bit_identical() {
        let mut a = RngStream::new(77, 3);
        let mut b = RngStream::new(77, 3);
        let ua = sample_haar_unitary(6, &mut a);
        let ub = sample_haar_unitary(6, &mut b);
        assert_eq!(ua, ub);
    }
}

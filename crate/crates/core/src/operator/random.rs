//! Seeded generators for states, measurements, and channels.
//!
//! All generators are deterministic functions of their seed (ChaCha8), so
//! property sweeps reproduce bit-for-bit across platforms.

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::operator::func::psd_power;
use crate::operator::matrix::ComplexMatrix;
use crate::operator::space::HilbertSpace;
use crate::operator::types::{CptpChannel, DensityOperator, HermitianObservable, Povm};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ginibre(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            m[(i, j)] = C64::new(re, im);
        }
    }
    m
}

/// Random Hermitian with Gaussian entries, scaled by `scale`.
pub fn random_hermitian(space: &HilbertSpace, scale: f64, seed: u64) -> HermitianObservable {
    let mut rng = rng_from_seed(seed);
    random_hermitian_with(&mut rng, space, scale)
}

pub fn random_hermitian_with(
    rng: &mut ChaCha8Rng,
    space: &HilbertSpace,
    scale: f64,
) -> HermitianObservable {
    let g = ginibre(rng, space.total_dim(), space.total_dim());
    HermitianObservable::from_symmetrized(space.clone(), g.symmetrize().scale_re(scale))
}

/// Ginibre-induced random density operator of the requested rank.
pub fn random_density(space: &HilbertSpace, rank: usize, seed: u64) -> Result<DensityOperator> {
    let mut rng = rng_from_seed(seed);
    random_density_with(&mut rng, space, rank)
}

pub fn random_density_with(
    rng: &mut ChaCha8Rng,
    space: &HilbertSpace,
    rank: usize,
) -> Result<DensityOperator> {
    let d = space.total_dim();
    if rank == 0 || rank > d {
        return Err(Error::config(format!(
            "rank {} out of range for dimension {}",
            rank, d
        )));
    }
    let g = ginibre(rng, d, rank);
    let gram = g.mul(&g.dagger());
    let tr = gram.trace().re;
    Ok(DensityOperator::from_trusted(
        HermitianObservable::from_symmetrized(space.clone(), gram.scale_re(1.0 / tr)),
    ))
}

/// Haar-distributed random unitary via QR of a Ginibre matrix with the
/// phase convention fixed on the diagonal of R.
pub fn random_unitary_with(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    let g = ginibre(rng, dim, dim);
    // Modified Gram-Schmidt.
    let mut q = ComplexMatrix::zeros(dim, dim);
    let mut cols: Vec<Vec<C64>> = (0..dim)
        .map(|j| (0..dim).map(|i| g[(i, j)]).collect())
        .collect();
    for j in 0..dim {
        for k in 0..j {
            let mut proj = C64::new(0.0, 0.0);
            for i in 0..dim {
                proj += q[(i, k)].conj() * cols[j][i];
            }
            for i in 0..dim {
                let sub = proj * q[(i, k)];
                cols[j][i] -= sub;
            }
        }
        let norm: f64 = cols[j].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        for i in 0..dim {
            q[(i, j)] = cols[j][i] / norm;
        }
    }
    q
}

/// Random POVM with `k` outcomes labeled "0".."k-1": normalized Ginibre
/// Gram matrices sandwiched by the inverse square root of their sum.
pub fn random_povm(space: &HilbertSpace, k: usize, seed: u64) -> Result<Povm> {
    let mut rng = rng_from_seed(seed);
    random_povm_with(&mut rng, space, k)
}

pub fn random_povm_with(rng: &mut ChaCha8Rng, space: &HilbertSpace, k: usize) -> Result<Povm> {
    if k == 0 {
        return Err(Error::config("POVM needs at least one outcome"));
    }
    let d = space.total_dim();
    let parts: Vec<ComplexMatrix> = (0..k)
        .map(|_| {
            let g = ginibre(rng, d, d);
            g.mul(&g.dagger())
        })
        .collect();
    let mut sum = ComplexMatrix::zeros(d, d);
    for p in &parts {
        sum = sum.add(p);
    }
    let sum_obs = HermitianObservable::from_symmetrized(space.clone(), sum);
    let inv_sqrt = psd_power(&sum_obs, -0.5)?;
    let elements = parts
        .into_iter()
        .enumerate()
        .map(|(i, p)| {
            let e = inv_sqrt.matrix().mul(&p).mul(inv_sqrt.matrix());
            (
                i.to_string(),
                HermitianObservable::from_symmetrized(space.clone(), e),
            )
        })
        .collect();
    Povm::new(space.clone(), elements)
}

/// Random CPTP channel with the requested number of Kraus operators.
pub fn random_cptp(
    input: &HilbertSpace,
    output: &HilbertSpace,
    kraus_count: usize,
    seed: u64,
) -> Result<CptpChannel> {
    let mut rng = rng_from_seed(seed);
    random_cptp_with(&mut rng, input, output, kraus_count)
}

pub fn random_cptp_with(
    rng: &mut ChaCha8Rng,
    input: &HilbertSpace,
    output: &HilbertSpace,
    kraus_count: usize,
) -> Result<CptpChannel> {
    if kraus_count == 0 {
        return Err(Error::config("channel needs at least one Kraus operator"));
    }
    let din = input.total_dim();
    let dout = output.total_dim();
    let raw: Vec<ComplexMatrix> = (0..kraus_count).map(|_| ginibre(rng, dout, din)).collect();
    let mut gram = ComplexMatrix::zeros(din, din);
    for k in &raw {
        gram = gram.add(&k.dagger().mul(k));
    }
    let gram_obs = HermitianObservable::from_symmetrized(input.clone(), gram);
    let inv_sqrt = psd_power(&gram_obs, -0.5)?;
    let kraus = raw.into_iter().map(|k| k.mul(inv_sqrt.matrix())).collect();
    CptpChannel::new(input.clone(), output.clone(), kraus)
}

/// Pair of commuting states: a shared random eigenbasis with independent
/// random spectra. Useful for diagonal-reduction oracles.
pub fn random_commuting_pair(
    space: &HilbertSpace,
    seed: u64,
) -> Result<(DensityOperator, DensityOperator)> {
    let mut rng = rng_from_seed(seed);
    let d = space.total_dim();
    let u = random_unitary_with(&mut rng, d);
    let mut spectrum = || {
        let mut p: Vec<f64> = (0..d).map(|_| rng.gen_range(0.05..1.0)).collect();
        let s: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= s);
        p
    };
    let pa = spectrum();
    let pb = spectrum();
    let build = |p: &[f64]| {
        let m = u.mul(&ComplexMatrix::diag(p)).mul(&u.dagger());
        DensityOperator::from_trusted(HermitianObservable::from_symmetrized(space.clone(), m))
    };
    Ok((build(&pa), build(&pb)))
}

/// Spectra of the commuting pair produced by [`random_commuting_pair`] in
/// the shared eigenbasis order (independent oracle for reduction tests).
pub fn random_commuting_pair_spectra(space: &HilbertSpace, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = rng_from_seed(seed);
    let d = space.total_dim();
    let _u = random_unitary_with(&mut rng, d);
    let mut spectrum = || {
        let mut p: Vec<f64> = (0..d).map(|_| rng.gen_range(0.05..1.0)).collect();
        let s: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= s);
        p
    };
    let pa = spectrum();
    let pb = spectrum();
    (pa, pb)
}

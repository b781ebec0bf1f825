//! Seeded random instances. All generators take the caller's RNG so runs are
//! reproducible under a fixed seed.

use rand::Rng;

use crate::{FiniteBlaschke, MoebiusMap, C64};

/// Uniform point in the disk `|z| < radius`.
pub fn random_disk_point<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> C64 {
    let r = radius * rng.random::<f64>().sqrt();
    C64::from_polar(r, std::f64::consts::TAU * rng.random::<f64>())
}

pub fn random_unimodular<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::from_polar(1.0, std::f64::consts::TAU * rng.random::<f64>())
}

/// Degree-`degree` product with zeros uniform in `|z| < radius` and a random
/// unimodular constant.
pub fn random_finite<R: Rng + ?Sized>(rng: &mut R, degree: usize, radius: f64) -> FiniteBlaschke {
    let eta = random_unimodular(rng);
    let zeros = (0..degree).map(|_| random_disk_point(rng, radius)).collect();
    FiniteBlaschke::new(eta, zeros).expect("sampled zeros are interior")
}

pub fn random_moebius<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> MoebiusMap {
    let a = random_disk_point(rng, radius);
    MoebiusMap::new(a, random_unimodular(rng)).expect("sampled parameters are valid")
}

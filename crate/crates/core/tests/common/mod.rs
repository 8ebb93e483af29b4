//! Shared helpers for the integration tests: seeded random fields and
//! discretely divergence-free velocity samples.

use dfib::grid::{curl_h, GridGeometry, StaggeredField, Subgrid};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_field(
    geom: GridGeometry,
    subgrid: Subgrid,
    rng: &mut ChaCha8Rng,
) -> StaggeredField {
    StaggeredField::from_fn(geom, subgrid, |_, _| rng.gen_range(-1.0..1.0))
}

/// A discretely divergence-free face velocity: the curl of a random
/// potential plus a random uniform flow.
pub fn random_div_free(geom: GridGeometry, rng: &mut ChaCha8Rng) -> StaggeredField {
    let potential = if geom.dim == 2 {
        random_field(geom, Subgrid::Node, rng)
    } else {
        random_field(geom, Subgrid::Edge, rng)
    };
    let mut u = curl_h(&potential).unwrap();
    for comp in 0..geom.dim {
        u.add_constant(comp, rng.gen_range(-1.0..1.0));
    }
    u
}

/// Random marker positions inside the domain (away from nothing in
/// particular; periodic wrapping handles everything).
pub fn random_points(geom: GridGeometry, m: usize, rng: &mut ChaCha8Rng) -> Vec<[f64; 3]> {
    (0..m)
        .map(|_| {
            let mut p = [0.0; 3];
            for axis in 0..geom.dim {
                p[axis] = rng.gen_range(0.0..geom.box_length);
            }
            p
        })
        .collect()
}

pub fn random_forces(dim: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<[f64; 3]> {
    (0..m)
        .map(|_| {
            let mut f = [0.0; 3];
            for axis in 0..dim {
                f[axis] = rng.gen_range(-1.0..1.0);
            }
            f
        })
        .collect()
}

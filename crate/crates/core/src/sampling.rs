//! Deterministic sampling helpers shared by the checks and the CLI.

use crate::ec::ECValue;
use crate::linalg::Vec3;
use crate::poisson::{Quadratic, State};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 42;

/// Stream cipher RNG: cheap, seedable, identical across platforms.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn vec3_in_box<R: Rng>(rng: &mut R, half_width: f64) -> Vec3 {
    Vec3::new(
        rng.gen_range(-half_width..=half_width),
        rng.gen_range(-half_width..=half_width),
        rng.gen_range(-half_width..=half_width),
    )
}

pub fn state_in_box<R: Rng>(rng: &mut R, half_width: f64) -> State {
    let v = vec3_in_box(rng, half_width);
    State::new(v.x, v.y, v.z).expect("finite by construction")
}

pub fn ec_in_box<R: Rng>(rng: &mut R, half_width: f64) -> ECValue {
    ECValue::new(
        rng.gen_range(-half_width..=half_width),
        rng.gen_range(-half_width..=half_width),
    )
    .expect("finite by construction")
}

/// A quadratic with all ten coefficients drawn from [-bound, bound].
pub fn quadratic_in_box<R: Rng>(rng: &mut R, bound: f64) -> Quadratic {
    let mut draw = || rng.gen_range(-bound..=bound);
    Quadratic {
        cxx: draw(),
        cyy: draw(),
        czz: draw(),
        cxy: draw(),
        cxz: draw(),
        cyz: draw(),
        cx: draw(),
        cy: draw(),
        cz: draw(),
        c0: draw(),
        label: String::from("sampled"),
    }
}

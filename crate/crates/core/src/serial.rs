//! Serialization helpers: complex numbers as `{"re": .., "im": ..}`.

use serde::{Serialize, Serializer};

use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReIm {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for ReIm {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

pub fn complex<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
    ReIm::from(*z).serialize(s)
}

pub fn complex_vec<S: Serializer>(zs: &[C64], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(zs.iter().map(|&z| ReIm::from(z)))
}

pub fn complex_opt<S: Serializer>(z: &Option<C64>, s: S) -> Result<S::Ok, S::Error> {
    z.map(ReIm::from).serialize(s)
}

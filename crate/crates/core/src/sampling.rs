//! Seeded samplers shared by the axiom checks, KL checks and trap certificates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::objectives::DomainBox;
use crate::point::Point;

/// Uniform sampler over an axis-aligned box.
#[derive(Debug, Clone)]
pub struct UniformBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
    rng: ChaCha8Rng,
}

impl UniformBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, seed: u64) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::invalid("sampler bounds must have equal, nonzero length"));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l <= u) || !l.is_finite() || !u.is_finite()) {
            return Err(Error::invalid("sampler bounds must be finite with lower <= upper"));
        }
        Ok(UniformBox {
            lower,
            upper,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn from_domain(domain: &DomainBox, seed: u64) -> Self {
        UniformBox::new(domain.lower().to_vec(), domain.upper().to_vec(), seed)
            .expect("a domain box is always a valid sampling box")
    }

    /// Cube `[-half_width, half_width]^dim`.
    pub fn cube(dim: usize, half_width: f64, seed: u64) -> Result<Self> {
        UniformBox::new(vec![-half_width; dim], vec![half_width; dim], seed)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn sample(&mut self) -> Point {
        let coords = self
            .lower
            .iter()
            .zip(&self.upper)
            .map(|(&l, &u)| if l == u { l } else { self.rng.random_range(l..u) })
            .collect::<Vec<_>>();
        Point::from(coords)
    }

    pub fn triple(&mut self) -> (Point, Point, Point) {
        (self.sample(), self.sample(), self.sample())
    }
}

/// Draws a point at exact Euclidean distance `radius` from `center`.
pub fn shell_point<R: Rng + ?Sized>(rng: &mut R, center: &[f64], radius: f64) -> Point {
    loop {
        let dir: Vec<f64> = (0..center.len()).map(|_| rng.sample(StandardNormal)).collect();
        let norm = crate::point::norm2(&dir);
        if norm > 1e-12 {
            let coords: Vec<f64> = center
                .iter()
                .zip(&dir)
                .map(|(c, d)| c + radius * d / norm)
                .collect();
            return Point::from(coords);
        }
    }
}

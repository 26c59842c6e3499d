use hashbrown::HashMap;
use rand::Rng;

use crate::config::Configuration;
use crate::degrees::HalfEdge;

/// Read access to a pairing of half-edges, possibly revealed on demand.
pub trait PairingSource {
    fn partner_of(&mut self, h: HalfEdge) -> HalfEdge;
}

impl PairingSource for &Configuration {
    #[inline]
    fn partner_of(&mut self, h: HalfEdge) -> HalfEdge {
        self.partner(h)
    }
}

/// A uniform configuration whose pairs are drawn only when asked for.
///
/// Asking for the partner of an unpaired `h` pairs it with a uniform unpaired
/// half-edge other than itself, so whatever order the queries come in, the
/// revealed pairs have the law of the same pairs in a uniform configuration.
#[derive(Debug)]
pub struct RevealedConfiguration<'r, R: ?Sized> {
    ell: u32,
    pairs: HashMap<HalfEdge, HalfEdge>,
    rng: &'r mut R,
}

impl<'r, R: Rng + ?Sized> RevealedConfiguration<'r, R> {
    pub fn new(ell: usize, rng: &'r mut R) -> Self {
        Self {
            ell: ell as u32,
            pairs: HashMap::new(),
            rng,
        }
    }

    /// Number of revealed edges.
    pub fn revealed(&self) -> usize {
        self.pairs.len() / 2
    }
}

impl<R: Rng + ?Sized> PairingSource for RevealedConfiguration<'_, R> {
    fn partner_of(&mut self, h: HalfEdge) -> HalfEdge {
        if let Some(&z) = self.pairs.get(&h) {
            return z;
        }
        assert!(
            (self.pairs.len() as u32) + 2 <= self.ell,
            "every other half-edge is already paired"
        );
        let z = loop {
            let z = self.rng.random_range(0..self.ell);
            if z != h && !self.pairs.contains_key(&z) {
                break z;
            }
        };
        self.pairs.insert(h, z);
        self.pairs.insert(z, h);
        z
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn revealing_everything_gives_a_matching() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut c = RevealedConfiguration::new(10, &mut rng);
        for h in (0..10).rev() {
            let z = c.partner_of(h);
            assert_ne!(z, h);
            assert_eq!(c.partner_of(z), h);
        }
        assert_eq!(c.revealed(), 5);
    }
}

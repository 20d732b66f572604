//! Additive groups Z_p^r on dense indices.
//!
//! The additive group of GF(p^m)^t is Z_p^(m·t). With the index encoding of
//! [`crate::field`], a tuple `(c_1, …, c_t)` of field symbols packed as
//! `Σ c_i q^(t-1-i)` has base-`p` digits that are the concatenated digits of
//! its entries, so group addition is digit-wise addition mod `p`.

/// Z_p^r with elements `0..p^r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdditiveGroup {
    p: u32,
    digits: u32,
    order: usize,
}

impl AdditiveGroup {
    pub fn new(p: u32, digits: u32) -> Self {
        let order = (p as usize).pow(digits);
        Self { p, digits, order }
    }

    /// The additive group of GF(q)^t, where `q` is a prime power.
    pub fn of_field_power(q: usize, t: usize) -> Option<Self> {
        let (p, m) = prime_power(q)?;
        Some(Self::new(p, m * t as u32))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn add(&self, mut a: usize, mut b: usize) -> usize {
        let p = self.p as usize;
        if p == 2 {
            return a ^ b;
        }
        let (mut out, mut scale) = (0, 1);
        for _ in 0..self.digits {
            out += ((a % p + b % p) % p) * scale;
            a /= p;
            b /= p;
            scale *= p;
        }
        out
    }

    pub fn neg(&self, mut a: usize) -> usize {
        let p = self.p as usize;
        if p == 2 {
            return a;
        }
        let (mut out, mut scale) = (0, 1);
        for _ in 0..self.digits {
            out += ((p - a % p) % p) * scale;
            a /= p;
            scale *= p;
        }
        out
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    /// Whether `gens` generate the whole group, by additive closure from 0.
    pub fn generates(&self, gens: &[usize]) -> bool {
        let mut reached = vec![false; self.order];
        reached[0] = true;
        let mut frontier = vec![0usize];
        let mut count = 1;
        while let Some(v) = frontier.pop() {
            for &s in gens {
                let w = self.add(v, s);
                if !reached[w] {
                    reached[w] = true;
                    count += 1;
                    frontier.push(w);
                }
            }
        }
        count == self.order
    }
}

/// Packs a tuple of symbols into a base-`q` index, first entry most significant.
pub fn pack(symbols: impl IntoIterator<Item = usize>, q: usize) -> usize {
    symbols.into_iter().fold(0, |acc, s| acc * q + s)
}

/// Inverse of [`pack`] for tuples of length `len`.
pub fn unpack(mut index: usize, q: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = index % q;
        index /= q;
    }
    out
}

/// `(p, m)` with `q = p^m`, or `None` if `q` is not a prime power.
pub fn prime_power(q: usize) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let (mut rest, mut m) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        m += 1;
    }
    (rest == 1).then_some((p as u32, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::gf_new;

    #[test]
    fn matches_field_addition() {
        for (p, m) in [(2, 2), (3, 2), (5, 1), (2, 3)] {
            let f = gf_new(p, m).unwrap();
            let g = AdditiveGroup::of_field_power(f.order(), 1).unwrap();
            for a in 0..f.order() {
                assert_eq!(g.neg(a), f.neg(a as u8) as usize);
                for b in 0..f.order() {
                    assert_eq!(g.add(a, b), f.add(a as u8, b as u8) as usize);
                }
            }
        }
    }

    #[test]
    fn tuple_addition_is_componentwise() {
        let f = gf_new(3, 2).unwrap();
        let q = f.order();
        let g = AdditiveGroup::of_field_power(q, 2).unwrap();
        for a in 0..q * q {
            for b in (0..q * q).step_by(7) {
                let (ua, ub) = (unpack(a, q, 2), unpack(b, q, 2));
                let sum = pack(ua.iter().zip(&ub).map(|(&x, &y)| f.add(x as u8, y as u8) as usize), q);
                assert_eq!(g.add(a, b), sum);
            }
        }
    }

    #[test]
    fn generation() {
        let g = AdditiveGroup::new(2, 2);
        assert!(g.generates(&[1, 2]));
        assert!(!g.generates(&[0, 3]));
        assert!(AdditiveGroup::new(3, 1).generates(&[2]));
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(4), Some((2, 2)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(6), None);
        assert_eq!(prime_power(1), None);
    }
}

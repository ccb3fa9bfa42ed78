//! Arithmetic in the binary extension fields GF(2^gamma), gamma <= 16.
//!
//! Addition is XOR; multiplication goes through discrete-log tables built
//! once per field, so polynomial evaluation in the hashing hot loops is a
//! couple of lookups per term.

use crate::{Error, Result};

/// Largest supported field exponent.
pub const MAX_GAMMA: u32 = 16;

/// Irreducible modulus per degree, with the leading x^gamma bit included.
/// Index 0 is unused.
const MODULI: [u32; 17] = [
    0,
    0b11,                // x + 1
    0b111,               // x^2 + x + 1
    0b1011,              // x^3 + x + 1
    0b10011,             // x^4 + x + 1
    0b100101,            // x^5 + x^2 + 1
    0b1000011,           // x^6 + x + 1
    0b10000011,          // x^7 + x + 1
    0b100011011,         // x^8 + x^4 + x^3 + x + 1
    0b1000010001,        // x^9 + x^4 + 1
    0b10000001001,       // x^10 + x^3 + 1
    0b100000000101,      // x^11 + x^2 + 1
    0b1000001010011,     // x^12 + x^6 + x^4 + x + 1
    0b10000000011011,    // x^13 + x^4 + x^3 + x + 1
    0b100010001000011,   // x^14 + x^10 + x^6 + x + 1
    0b1000000000000011,  // x^15 + x + 1
    0b10001000000001011, // x^16 + x^12 + x^3 + x + 1
];

/// Carry-less multiply-and-reduce; used only to build the tables.
fn mul_slow(mut a: u32, mut b: u32, gamma: u32) -> u32 {
    let modulus = MODULI[gamma as usize];
    let mut r = 0;
    while b != 0 {
        if b & 1 != 0 {
            r ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & (1 << gamma) != 0 {
            a ^= modulus;
        }
    }
    r
}

/// GF(2^gamma) with log/antilog tables.
#[derive(Debug, Clone)]
pub struct Gf2 {
    gamma: u32,
    /// exp[i] = g^i for a generator g, doubled so `exp[log a + log b]`
    /// needs no modular reduction.
    exp: Vec<u16>,
    /// log[a] for a != 0.
    log: Vec<u16>,
}

impl Gf2 {
    pub fn new(gamma: u32) -> Result<Self> {
        if gamma == 0 || gamma > MAX_GAMMA {
            return Err(Error::InvalidInput(format!(
                "field exponent must be in 1..={MAX_GAMMA}, got {gamma}"
            )));
        }
        let order = (1u32 << gamma) - 1; // multiplicative group size
        let mut log = vec![0u16; 1 << gamma];
        let mut exp = vec![0u16; 2 * order as usize];

        // Find a generator by walking its powers; a primitive element
        // cycles through every nonzero value.
        let mut found = false;
        for candidate in 1..(1u32 << gamma) {
            if order > 1 && candidate < 2 {
                continue;
            }
            let mut value = 1u32;
            let mut ok = true;
            for i in 0..order {
                exp[i as usize] = value as u16;
                log[value as usize] = i as u16;
                value = mul_slow(value, candidate, gamma);
                if value == 1 && i + 1 < order {
                    ok = false;
                    break;
                }
            }
            if ok && value == 1 {
                found = true;
                break;
            }
        }
        assert!(found, "no generator found for GF(2^{gamma})");
        for i in 0..order as usize {
            exp[order as usize + i] = exp[i];
        }
        Ok(Gf2 { gamma, exp, log })
    }

    pub fn gamma(&self) -> u32 {
        self.gamma
    }

    /// Number of field elements, 2^gamma.
    pub fn size(&self) -> u32 {
        1 << self.gamma
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        a ^ b
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize] as u32
    }

    pub fn inv(&self, a: u32) -> u32 {
        assert_ne!(a, 0, "zero has no inverse");
        let order = self.size() - 1;
        if order == 1 {
            return 1;
        }
        self.exp[(order - self.log[a as usize] as u32) as usize % order as usize] as u32
    }

    /// Evaluates sum of coeffs[j] * x^j (Horner's rule).
    pub fn eval_poly(&self, coeffs: &[u32], x: u32) -> u32 {
        let mut acc = 0;
        for &c in coeffs.iter().rev() {
            acc = self.mul(acc, x) ^ c;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Degree of a GF(2) polynomial in bit representation.
    fn deg(p: u32) -> i32 {
        31 - p.leading_zeros() as i32
    }

    /// Polynomial remainder over GF(2).
    fn poly_rem(mut a: u32, b: u32) -> u32 {
        while deg(a) >= deg(b) {
            a ^= b << (deg(a) - deg(b));
        }
        a
    }

    #[test]
    fn moduli_are_irreducible() {
        // Trial division by every polynomial of degree 1..=gamma/2.
        for gamma in 1..=MAX_GAMMA {
            let p = MODULI[gamma as usize];
            assert_eq!(deg(p), gamma as i32, "degree of modulus for gamma={gamma}");
            for q in 2u32..(1 << (gamma / 2 + 1)) {
                if deg(q) < 1 || deg(q) > gamma as i32 / 2 {
                    continue;
                }
                assert_ne!(poly_rem(p, q), 0, "gamma={gamma}: divisor {q:#b}");
            }
        }
    }

    #[test]
    fn field_axioms() {
        for gamma in [1u32, 2, 3, 4, 8, 11, 12] {
            let f = Gf2::new(gamma).unwrap();
            let size = f.size();
            let sample: Vec<u32> = (0..size).step_by((size as usize / 97).max(1)).collect();
            for &a in &sample {
                // Every nonzero element has a working inverse.
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1, "gamma={gamma}, a={a}");
                }
                // Fermat: a^(2^gamma) = a.
                let mut pow = a;
                for _ in 0..gamma {
                    pow = f.mul(pow, pow);
                }
                assert_eq!(pow, a, "gamma={gamma}, a={a}");
                for &b in &sample {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for &c in sample.iter().take(8) {
                        assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
                        assert_eq!(f.mul(a, b ^ c), f.mul(a, b) ^ f.mul(a, c));
                    }
                }
            }
        }
    }

    #[test]
    fn tables_match_schoolbook() {
        for gamma in [1u32, 2, 5, 8, 12] {
            let f = Gf2::new(gamma).unwrap();
            let size = f.size();
            let step = (size as usize / 61).max(1);
            for a in (0..size).step_by(step) {
                for b in (0..size).step_by(step) {
                    assert_eq!(f.mul(a, b), mul_slow(a, b, gamma), "gamma={gamma}");
                }
            }
        }
    }

    #[test]
    fn tiny_field() {
        let f = Gf2::new(1).unwrap();
        assert_eq!(f.mul(1, 1), 1);
        assert_eq!(f.mul(0, 1), 0);
        assert_eq!(f.add(1, 1), 0);
        assert_eq!(f.inv(1), 1);
    }

    #[test]
    fn poly_evaluation() {
        let f = Gf2::new(4).unwrap();
        // p(x) = 3 + 5x + x^2 at x=2: 3 ^ mul(5,2) ^ mul(2,2)
        let want = 3 ^ f.mul(5, 2) ^ f.mul(2, 2);
        assert_eq!(f.eval_poly(&[3, 5, 1], 2), want);
        assert_eq!(f.eval_poly(&[], 7), 0);
        assert_eq!(f.eval_poly(&[9], 7), 9); // constant
    }
}

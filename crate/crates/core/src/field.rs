//! GF(2^b) arithmetic with log/antilog tables.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("field degree {0} outside the supported range 2..=16")]
    Degree(u32),
    #[error("polynomial {poly:#x} is not primitive of degree {b}")]
    NotPrimitive { b: u32, poly: u32 },
}

/// Primitive polynomials used by default (bit i is the coefficient of x^i).
pub fn default_primitive_polynomial(b: u32) -> Option<u32> {
    Some(match b {
        2 => 0x7,
        3 => 0xB,
        4 => 0x13,
        5 => 0x25,
        6 => 0x43,
        7 => 0x89,
        8 => 0x11D,
        9 => 0x211,
        10 => 0x409,
        11 => 0x805,
        12 => 0x1053,
        13 => 0x201B,
        14 => 0x4443,
        15 => 0x8003,
        16 => 0x1100B,
        _ => return None,
    })
}

/// GF(2^b) with elements represented as bit vectors over the polynomial basis.
#[derive(Debug, Clone)]
pub struct FieldContext {
    b: u32,
    poly: u32,
    exp: Vec<u16>,
    log: Vec<u32>,
}

impl FieldContext {
    pub fn new(b: u32) -> Result<Self, FieldError> {
        let poly = default_primitive_polynomial(b).ok_or(FieldError::Degree(b))?;
        Self::with_polynomial(b, poly)
    }

    pub fn with_polynomial(b: u32, poly: u32) -> Result<Self, FieldError> {
        if !(2..=16).contains(&b) {
            return Err(FieldError::Degree(b));
        }
        if poly >> b != 1 {
            return Err(FieldError::NotPrimitive { b, poly });
        }
        let order = (1usize << b) - 1;
        // exp is doubled so products of logs index without a reduction.
        let mut exp = vec![0u16; 2 * order];
        let mut log = vec![u32::MAX; order + 1];
        let mut x: u32 = 1;
        for i in 0..order {
            if log[x as usize] != u32::MAX {
                return Err(FieldError::NotPrimitive { b, poly });
            }
            exp[i] = x as u16;
            log[x as usize] = i as u32;
            x <<= 1;
            if x >> b != 0 {
                x ^= poly;
            }
        }
        if x != 1 {
            return Err(FieldError::NotPrimitive { b, poly });
        }
        for i in order..2 * order {
            exp[i] = exp[i - order];
        }
        Ok(FieldContext { b, poly, exp, log })
    }

    pub fn degree(&self) -> u32 {
        self.b
    }

    pub fn primitive_polynomial(&self) -> u32 {
        self.poly
    }

    /// Multiplicative order 2^b - 1.
    pub fn order(&self) -> usize {
        (1usize << self.b) - 1
    }

    /// alpha^i for any integer i.
    pub fn alpha_pow(&self, i: i64) -> u16 {
        let n = self.order() as i64;
        self.exp[i.rem_euclid(n) as usize]
    }

    pub fn log(&self, x: u16) -> Option<u32> {
        if x == 0 {
            None
        } else {
            Some(self.log[x as usize])
        }
    }

    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    pub fn inv(&self, a: u16) -> u16 {
        assert!(a != 0, "inverse of zero");
        let n = self.order() as u32;
        self.exp[((n - self.log[a as usize]) % n) as usize]
    }

    pub fn div(&self, a: u16, b: u16) -> u16 {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: u16, e: i64) -> u16 {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let n = self.order() as i64;
        let l = (self.log[a as usize] as i64 * e).rem_euclid(n);
        self.exp[l as usize]
    }

    /// Cyclotomic coset of i modulo 2^b - 1.
    pub fn cyclotomic_coset(&self, i: usize) -> Vec<usize> {
        let n = self.order();
        let mut coset = vec![i % n];
        let mut j = (2 * i) % n;
        while j != i % n {
            coset.push(j);
            j = (2 * j) % n;
        }
        coset
    }

    /// Minimal polynomial of alpha^i over GF(2), as a bitmask.
    pub fn minimal_polynomial(&self, i: usize) -> u64 {
        // Coefficients live in GF(2^b) during the product and collapse to GF(2).
        let mut poly: Vec<u16> = vec![1];
        for j in self.cyclotomic_coset(i) {
            let root = self.alpha_pow(j as i64);
            let mut next = vec![0u16; poly.len() + 1];
            for (d, &c) in poly.iter().enumerate() {
                next[d + 1] ^= c;
                next[d] ^= self.mul(c, root);
            }
            poly = next;
        }
        poly.iter().enumerate().fold(0u64, |acc, (d, &c)| {
            debug_assert!(c <= 1);
            acc | ((c as u64) << d)
        })
    }
}

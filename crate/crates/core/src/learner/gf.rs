//! Arithmetic in GF(2^m) through log/antilog tables.

use crate::{Error, Result};

/// Primitive polynomials by degree, bit `i` holding the coefficient of `x^i`.
pub const PRIMITIVE_POLYS: [(usize, u32); 14] = [
    (3, 0xB),
    (4, 0x13),
    (5, 0x25),
    (6, 0x43),
    (7, 0x89),
    (8, 0x11D),
    (9, 0x211),
    (10, 0x409),
    (11, 0x805),
    (12, 0x1053),
    (13, 0x201B),
    (14, 0x4443),
    (15, 0x8003),
    (16, 0x1100B),
];

pub const MIN_DEGREE: usize = 3;
pub const MAX_DEGREE: usize = 16;

pub fn primitive_poly(m: usize) -> Result<u32> {
    PRIMITIVE_POLYS
        .iter()
        .find(|&&(d, _)| d == m)
        .map(|&(_, p)| p)
        .ok_or_else(|| {
            Error::param(format!(
                "field degree must be in {MIN_DEGREE}..={MAX_DEGREE}, got {m}"
            ))
        })
}

#[derive(Clone)]
pub struct FieldTables {
    m: usize,
    primitive_poly: u32,
    /// `antilog[i] = α^i` for `i < 2^m - 1`.
    antilog: Vec<u32>,
    /// `log[α^i] = i`; `log[0]` is unused.
    log: Vec<u32>,
}

impl std::fmt::Debug for FieldTables {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GF(2^{}) poly={:#x}", self.m, self.primitive_poly)
    }
}

pub fn build_field(m: usize) -> Result<FieldTables> {
    let poly = primitive_poly(m)?;
    let order = (1usize << m) - 1;
    let mut antilog = vec![0u32; order];
    let mut log = vec![0u32; order + 1];
    let mut x = 1u32;
    for (i, slot) in antilog.iter_mut().enumerate() {
        if i > 0 && x == 1 {
            return Err(Error::Precondition(format!(
                "polynomial {poly:#x} is not primitive"
            )));
        }
        *slot = x;
        log[x as usize] = i as u32;
        x <<= 1;
        if x & (1 << m) != 0 {
            x ^= poly;
        }
    }
    if x != 1 {
        return Err(Error::Precondition(format!(
            "polynomial {poly:#x} is not primitive"
        )));
    }
    Ok(FieldTables {
        m,
        primitive_poly: poly,
        antilog,
        log,
    })
}

impl FieldTables {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn primitive_poly(&self) -> u32 {
        self.primitive_poly
    }

    pub fn size(&self) -> usize {
        1 << self.m
    }

    /// Multiplicative order `2^m - 1`.
    pub fn order(&self) -> usize {
        self.antilog.len()
    }

    /// `α^e` for any integer exponent.
    pub fn alpha_pow(&self, e: i64) -> u32 {
        self.antilog[e.rem_euclid(self.order() as i64) as usize]
    }

    pub fn log(&self, x: u32) -> Option<u32> {
        (x != 0).then(|| self.log[x as usize])
    }

    pub fn antilog(&self) -> &[u32] {
        &self.antilog
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let s = self.log[a as usize] as usize + self.log[b as usize] as usize;
        self.antilog[s % self.order()]
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        let l = self.log(a)? as usize;
        Some(self.antilog[(self.order() - l) % self.order()])
    }

    pub fn div(&self, a: u32, b: u32) -> Option<u32> {
        Some(self.mul(a, self.inv(b)?))
    }

    pub fn square(&self, a: u32) -> u32 {
        self.mul(a, a)
    }
}

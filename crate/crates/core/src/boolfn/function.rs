use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::Path;
use std::sync::{Arc, Mutex};

use rand::Rng;

use super::{BitVector, ParitySupport};
use crate::{Error, Result};

/// A fixed Boolean function on `{0,1}^n`.
///
/// Implementations must be pure: the same point always gives the same bit.
pub trait BooleanFunction: Send + Sync + fmt::Debug {
    fn n(&self) -> usize;
    fn eval(&self, x: &BitVector) -> bool;
}

pub type SharedFunction = Arc<dyn BooleanFunction>;

impl BooleanFunction for ParitySupport {
    fn n(&self) -> usize {
        ParitySupport::n(self)
    }

    #[inline]
    fn eval(&self, x: &BitVector) -> bool {
        ParitySupport::eval(self, x)
    }
}

#[derive(Debug, Clone)]
pub struct Constant {
    pub n: usize,
    pub value: bool,
}

impl BooleanFunction for Constant {
    fn n(&self) -> usize {
        self.n
    }

    fn eval(&self, _x: &BitVector) -> bool {
        self.value
    }
}

/// Full truth table indexed by [`BitVector::low_bits`]; `n <= 24`.
#[derive(Clone)]
pub struct TruthTable {
    n: usize,
    table: Vec<bool>,
}

pub const MAX_TABLE_DIM: usize = 24;

impl TruthTable {
    pub fn new(n: usize, table: Vec<bool>) -> Result<Self> {
        if n > MAX_TABLE_DIM {
            return Err(Error::TooLarge(format!(
                "truth table over n = {n} > {MAX_TABLE_DIM}"
            )));
        }
        if table.len() != 1usize << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                found: table.len(),
            });
        }
        Ok(TruthTable { n, table })
    }

    pub fn from_function(f: &dyn BooleanFunction) -> Result<Self> {
        let n = f.n();
        if n > MAX_TABLE_DIM {
            return Err(Error::TooLarge(format!(
                "truth table over n = {n} > {MAX_TABLE_DIM}"
            )));
        }
        let table = (0..1u64 << n)
            .map(|x| f.eval(&BitVector::from_low_bits(n, x)))
            .collect();
        Ok(TruthTable { n, table })
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n > MAX_TABLE_DIM {
            return Err(Error::TooLarge(format!(
                "truth table over n = {n} > {MAX_TABLE_DIM}"
            )));
        }
        let table = (0..1usize << n).map(|_| rng.gen::<bool>()).collect();
        Ok(TruthTable { n, table })
    }

    pub fn values(&self) -> &[bool] {
        &self.table
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ones = self.table.iter().filter(|&&b| b).count();
        write!(f, "TruthTable(n={}, ones={ones})", self.n)
    }
}

impl BooleanFunction for TruthTable {
    fn n(&self) -> usize {
        self.n
    }

    fn eval(&self, x: &BitVector) -> bool {
        self.table[x.low_bits() as usize]
    }
}

/// Function given by an explicit list of points; unlisted points map to 0.
///
/// Text form: one `<bitstring> <0|1>` pair per line, `#` comments allowed.
#[derive(Debug, Clone)]
pub struct PointTable {
    n: usize,
    ones: HashSet<BitVector>,
}

impl PointTable {
    pub fn parse(text: &str) -> Result<Self> {
        let mut n = None;
        let mut values: HashMap<BitVector, bool> = HashMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(point), Some(bit), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::parse(format!(
                    "line {}: expected `<bits> <0|1>`",
                    lineno + 1
                )));
            };
            let point: BitVector = point.parse()?;
            match n {
                None => n = Some(point.len()),
                Some(m) if m != point.len() => {
                    return Err(Error::DimensionMismatch {
                        expected: m,
                        found: point.len(),
                    })
                }
                _ => {}
            }
            let bit = match bit {
                "0" => false,
                "1" => true,
                other => {
                    return Err(Error::parse(format!(
                        "line {}: bad value {other:?}",
                        lineno + 1
                    )))
                }
            };
            if values.insert(point, bit).is_some() {
                return Err(Error::parse(format!(
                    "line {}: point listed twice",
                    lineno + 1
                )));
            }
        }
        let n = n.ok_or_else(|| Error::parse("function table is empty"))?;
        let ones = values
            .into_iter()
            .filter_map(|(p, b)| b.then_some(p))
            .collect();
        Ok(PointTable { n, ones })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

impl BooleanFunction for PointTable {
    fn n(&self) -> usize {
        self.n
    }

    fn eval(&self, x: &BitVector) -> bool {
        self.ones.contains(x)
    }
}

/// Majority of coordinates 1, 2 and 3, ignoring the rest.
#[derive(Debug, Clone)]
pub struct Majority3 {
    n: usize,
}

impl Majority3 {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::param("majority-of-3 needs n >= 3"));
        }
        Ok(Majority3 { n })
    }
}

impl BooleanFunction for Majority3 {
    fn n(&self) -> usize {
        self.n
    }

    fn eval(&self, x: &BitVector) -> bool {
        let votes = x.get(1) as u8 + x.get(2) as u8 + x.get(3) as u8;
        votes >= 2
    }
}

/// `base` with its value flipped on a finite set of points.
#[derive(Debug, Clone)]
pub struct Corrupted {
    base: SharedFunction,
    flips: HashSet<BitVector>,
}

impl Corrupted {
    pub fn new(base: SharedFunction, flips: impl IntoIterator<Item = BitVector>) -> Result<Self> {
        let flips: HashSet<BitVector> = flips.into_iter().collect();
        if let Some(p) = flips.iter().find(|p| p.len() != base.n()) {
            return Err(Error::DimensionMismatch {
                expected: base.n(),
                found: p.len(),
            });
        }
        Ok(Corrupted { base, flips })
    }

    pub fn flips(&self) -> &HashSet<BitVector> {
        &self.flips
    }
}

impl BooleanFunction for Corrupted {
    fn n(&self) -> usize {
        self.base.n()
    }

    fn eval(&self, x: &BitVector) -> bool {
        self.base.eval(x) ^ self.flips.contains(x)
    }
}

/// Parity whose value is flipped on a fixed pseudo-random subset of the cube
/// of density `rate`. The subset is a hash of the point, so the function is
/// still deterministic.
#[derive(Debug, Clone)]
pub struct NoisyParity {
    parity: ParitySupport,
    threshold: u64,
    salt: u64,
}

impl NoisyParity {
    pub fn new(parity: ParitySupport, rate: f64, salt: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rate) {
            return Err(Error::param(format!("noise rate {rate} outside [0, 1]")));
        }
        let threshold = if rate >= 1.0 {
            u64::MAX
        } else {
            (rate * 2f64.powi(64)) as u64
        };
        Ok(NoisyParity {
            parity,
            threshold,
            salt,
        })
    }

    fn flipped(&self, x: &BitVector) -> bool {
        let mut h = self.salt ^ 0x9e37_79b9_7f4a_7c15;
        for &w in x.words() {
            h = splitmix(h ^ w);
        }
        h < self.threshold
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl BooleanFunction for NoisyParity {
    fn n(&self) -> usize {
        self.parity.n()
    }

    fn eval(&self, x: &BitVector) -> bool {
        self.parity.eval(x) ^ self.flipped(x)
    }
}

/// `1 - f`.
#[derive(Debug, Clone)]
pub struct Complement(pub SharedFunction);

impl BooleanFunction for Complement {
    fn n(&self) -> usize {
        self.0.n()
    }

    fn eval(&self, x: &BitVector) -> bool {
        !self.0.eval(x)
    }
}

/// Passes evaluations through to `inner` and logs every point, in order.
#[derive(Debug)]
pub struct Recording {
    inner: SharedFunction,
    log: Mutex<Vec<BitVector>>,
}

impl Recording {
    pub fn new(inner: SharedFunction) -> Self {
        Recording {
            inner,
            log: Mutex::new(Vec::new()),
        }
    }

    pub fn take_log(&self) -> Vec<BitVector> {
        std::mem::take(&mut *self.log.lock().expect("recording log poisoned"))
    }
}

impl BooleanFunction for Recording {
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn eval(&self, x: &BitVector) -> bool {
        self.log
            .lock()
            .expect("recording log poisoned")
            .push(x.clone());
        self.inner.eval(x)
    }
}

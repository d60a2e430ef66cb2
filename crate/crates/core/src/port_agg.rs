//! Injective sum-form aggregation of port-numbered messages, in exact
//! rational arithmetic.
//!
//! Messages come from a countable alphabet indexed by Z; with N a strict
//! bound on the multiset size and k the smallest power of ten at least N,
//! each message encodes as f(x) = k^-Z(x) and each port weighs it by
//! g(p) = 10^-kN(p-1). The weighted sum places every (message, port) pair
//! in its own block of decimal digits, so the aggregate is injective over
//! valid sequences and exactly decodable. The digit blocks live at scales
//! like 10^-100, which no hardware float can represent; everything here is
//! big-integer rational arithmetic, which is the point of the module.

use crate::error::{Error, Result};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::Pow;
use num::{One, Zero};
use std::collections::BTreeMap;

/// Smallest power of ten >= n (equals 10^ceil(log10 n); 1 for n <= 1).
pub fn block_base(n: usize) -> u64 {
    let mut k: u64 = 1;
    while (k as usize) < n {
        k *= 10;
    }
    k
}

fn pow10(exp: u64) -> BigInt {
    Pow::pow(BigInt::from(10u32), exp)
}

/// f(x) = k^-z with k = block_base(alphabet_bound). Exact.
pub fn encode_message(z: u64, alphabet_bound: usize) -> BigRational {
    let k = BigInt::from(block_base(alphabet_bound));
    BigRational::new(BigInt::one(), Pow::pow(k, z))
}

/// g(p) = 10^-kN(p-1) with k = block_base(N), N = alphabet_bound. Exact.
pub fn port_weight(port: usize, alphabet_bound: usize) -> BigRational {
    let k = block_base(alphabet_bound);
    let exp = k * (alphabet_bound as u64) * (port as u64 - 1);
    BigRational::new(BigInt::one(), pow10(exp))
}

/// A port-numbered message sequence: distinct ports, fewer than
/// `alphabet_bound` entries, message indices in 1..alphabet_bound so each
/// pair lands strictly inside its digit block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortMessageSeq {
    pub alphabet_bound: usize,
    /// (message index Z(x), port).
    pub items: Vec<(u64, usize)>,
}

impl PortMessageSeq {
    pub fn new(alphabet_bound: usize, items: Vec<(u64, usize)>) -> Result<Self> {
        if alphabet_bound < 2 {
            return Err(Error::InvalidSequence("alphabet bound must be at least 2".into()));
        }
        if items.len() >= alphabet_bound {
            return Err(Error::InvalidSequence(format!(
                "{} items but alphabet bound {} requires strictly fewer",
                items.len(),
                alphabet_bound
            )));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &(z, p) in &items {
            if p == 0 {
                return Err(Error::InvalidSequence("ports start at 1".into()));
            }
            if !seen.insert(p) {
                return Err(Error::DuplicatePort(p));
            }
            if z == 0 || z as usize >= alphabet_bound {
                return Err(Error::InvalidSequence(format!(
                    "message index {z} outside 1..{alphabet_bound}"
                )));
            }
        }
        Ok(Self { alphabet_bound, items })
    }

    /// k = block_base(N).
    pub fn block_base(&self) -> u64 {
        block_base(self.alphabet_bound)
    }
}

/// h(seq) = sum over pairs of g(p) * f(x). Exact, order-independent, and
/// injective over valid sequences.
pub fn aggregate(seq: &PortMessageSeq) -> BigRational {
    let mut acc = BigRational::zero();
    for &(z, p) in &seq.items {
        acc += port_weight(p, seq.alphabet_bound) * encode_message(z, seq.alphabet_bound);
    }
    acc
}

/// Inverts [`aggregate`]: recovers the port -> message-index map from the
/// digit blocks. `max_port` bounds the search.
pub fn decode(
    value: &BigRational,
    alphabet_bound: usize,
    max_port: usize,
) -> Result<BTreeMap<usize, u64>> {
    let k = block_base(alphabet_bound);
    let block = k * alphabet_bound as u64;
    let block_modulus = pow10(block);
    let mut out = BTreeMap::new();
    for port in 1..=max_port {
        // shift block p to the integer part and cut everything above it
        let shifted = value * BigRational::from_integer(pow10(block * port as u64));
        let digits = shifted.floor().to_integer() % &block_modulus;
        if digits.is_zero() {
            continue;
        }
        // a present port contributes exactly 10^(kN - c z), a power of ten
        let (mut d, mut exp10) = (digits.clone(), 0u64);
        let ten = BigInt::from(10u32);
        while (&d % &ten).is_zero() {
            d /= &ten;
            exp10 += 1;
        }
        if !d.is_one() {
            return Err(Error::InvalidSequence(format!(
                "block for port {port} is not a power of ten: {digits}"
            )));
        }
        let c = {
            let mut c = 0u64;
            let mut t = 1u64;
            while t < k {
                t *= 10;
                c += 1;
            }
            c.max(1)
        };
        let z = (block - exp10) / c;
        if (block - exp10) % c != 0 {
            return Err(Error::InvalidSequence(format!(
                "block for port {port} does not align with the message base"
            )));
        }
        out.insert(port, z);
    }
    Ok(out)
}

/// Exhaustive injectivity check: every sequence over `alphabet` message
/// indices and distinct ports from 1..=`ports` (length <= `ports`) must
/// aggregate to a distinct rational, and decode must invert each one.
/// Returns the number of distinct codes.
pub fn injectivity_selftest(alphabet: usize, ports: usize) -> Result<usize> {
    let bound = (alphabet + 1).max(ports + 1).max(10);
    let mut sequences: Vec<Vec<(u64, usize)>> = vec![Vec::new()];
    for p in 1..=ports {
        let mut extended = Vec::new();
        for seq in &sequences {
            for z in 1..=alphabet as u64 {
                let mut s = seq.clone();
                s.push((z, p));
                extended.push(s);
            }
        }
        sequences.extend(extended);
    }
    let mut codes = BTreeMap::new();
    for items in &sequences {
        let seq = PortMessageSeq::new(bound, items.clone())?;
        let value = aggregate(&seq);
        if let Some(previous) = codes.insert(value.clone(), items.clone()) {
            return Err(Error::InvalidSequence(format!(
                "collision between {previous:?} and {items:?}"
            )));
        }
        let decoded = decode(&value, bound, ports)?;
        let expected: BTreeMap<usize, u64> = items.iter().map(|&(z, p)| (p, z)).collect();
        if decoded != expected {
            return Err(Error::InvalidSequence(format!(
                "decode mismatch for {items:?}: got {decoded:?}"
            )));
        }
    }
    Ok(codes.len())
}

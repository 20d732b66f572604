//! Table-driven arithmetic in GF(p^m).
//!
//! Elements are dense indices `0..q`. The base-`p` digits of an index are the
//! polynomial coefficients of the element in ascending order, so index `p` is
//! the generator `x` of the extension and addition is digit-wise mod `p`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest field order supported by [`gf_new`]; symbols must fit in a `u8`.
pub const FIELD_ORDER_CAP: u32 = 256;

/// Index of a field element, `0..q`.
pub type Symbol = u8;

/// Characteristic, degree and monic modulus of an extension field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub m: u32,
    /// Coefficients of the monic degree-`m` modulus, ascending.
    pub modulus: Vec<u32>,
}

impl FieldSpec {
    /// Validates primality of `p` and irreducibility of `modulus`.
    pub fn new(p: u32, m: u32, modulus: Vec<u32>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m == 0 {
            return Err(Error::InvalidParameter("extension degree must be >= 1".into()));
        }
        if modulus.len() != m as usize + 1 || modulus[m as usize] != 1 {
            return Err(Error::InvalidModulus(format!(
                "expected a monic polynomial of degree {m}, got {modulus:?}"
            )));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidModulus(format!("coefficient >= {p} in {modulus:?}")));
        }
        if !is_irreducible(&modulus, p) {
            return Err(Error::InvalidModulus(format!("{modulus:?} is reducible over GF({p})")));
        }
        Ok(Self { p, m, modulus })
    }

    pub fn order(&self) -> u32 {
        self.p.pow(self.m)
    }
}

/// Arithmetic operation selector for [`FieldTable::apply`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    Neg,
    Inv,
}

/// Complete add/mul/neg/inv tables of GF(p^m). Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldTable {
    spec: FieldSpec,
    q: usize,
    add: Vec<Symbol>,
    mul: Vec<Symbol>,
    neg: Vec<Symbol>,
    inv: Vec<Symbol>,
}

/// Builds GF(p^m) with the built-in modulus for that order.
///
/// GF(4) uses x²+x+1 and GF(9) uses x²+1; every other field takes the first
/// irreducible monic polynomial when the lower coefficients are read as a
/// base-`p` number in ascending order. Both fixed choices coincide with that
/// search.
pub fn gf_new(p: u32, m: u32) -> Result<FieldTable> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("extension degree must be >= 1".into()));
    }
    let order = (p as u64).checked_pow(m).unwrap_or(u64::MAX);
    if order > FIELD_ORDER_CAP as u64 {
        return Err(Error::FieldTooLarge { p, m, cap: FIELD_ORDER_CAP });
    }
    let modulus = match (p, m) {
        (2, 2) => vec![1, 1, 1],
        (3, 2) => vec![1, 0, 1],
        _ => default_modulus(p, m),
    };
    FieldTable::from_spec(FieldSpec::new(p, m, modulus)?)
}

fn default_modulus(p: u32, m: u32) -> Vec<u32> {
    let lower = p.pow(m);
    (0..lower)
        .map(|idx| {
            let mut coeffs = to_digits(idx, p, m as usize);
            coeffs.push(1);
            coeffs
        })
        .find(|poly| is_irreducible(poly, p))
        .expect("an irreducible polynomial exists for every degree")
}

impl FieldTable {
    pub fn from_spec(spec: FieldSpec) -> Result<Self> {
        let q = spec.order();
        if q > FIELD_ORDER_CAP {
            return Err(Error::FieldTooLarge { p: spec.p, m: spec.m, cap: FIELD_ORDER_CAP });
        }
        let q = q as usize;
        let (p, m) = (spec.p, spec.m as usize);
        let polys: Vec<Vec<u32>> = (0..q as u32).map(|i| to_digits(i, p, m)).collect();

        let mut add = vec![0; q * q];
        let mut mul = vec![0; q * q];
        for a in 0..q {
            for b in 0..q {
                let sum: Vec<u32> = polys[a].iter().zip(&polys[b]).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = from_digits(&sum, p) as Symbol;
                let prod = poly_mul_mod(&polys[a], &polys[b], &spec.modulus, p);
                mul[a * q + b] = from_digits(&prod, p) as Symbol;
            }
        }
        let neg = (0..q)
            .map(|a| (0..q).find(|&b| add[a * q + b] == 0).unwrap() as Symbol)
            .collect();
        let inv = (0..q)
            .map(|a| if a == 0 { 0 } else { (1..q).find(|&b| mul[a * q + b] == 1).unwrap() as Symbol })
            .collect();

        Ok(Self { spec, q, add, mul, neg, inv })
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.spec.p
    }

    pub fn degree(&self) -> u32 {
        self.spec.m
    }

    /// Checks that `a` names an element of this field.
    pub fn element(&self, a: u32) -> Result<Symbol> {
        if (a as usize) < self.q {
            Ok(a as Symbol)
        } else {
            Err(Error::SymbolOutOfRange { symbol: a, q: self.q as u32 })
        }
    }

    #[inline]
    pub fn add(&self, a: Symbol, b: Symbol) -> Symbol {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: Symbol, b: Symbol) -> Symbol {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Symbol, b: Symbol) -> Symbol {
        self.mul[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: Symbol) -> Symbol {
        self.neg[a as usize]
    }

    pub fn inv(&self, a: Symbol) -> Result<Symbol> {
        if a == 0 {
            Err(Error::InverseOfZero)
        } else {
            Ok(self.inv[a as usize])
        }
    }

    /// Table lookup for the selected operation. `b` is ignored by unary ops
    /// and required by binary ones.
    pub fn apply(&self, op: ArithOp, a: Symbol, b: Option<Symbol>) -> Result<Symbol> {
        for s in std::iter::once(a).chain(b) {
            self.element(s as u32)?;
        }
        let rhs = || b.ok_or_else(|| Error::InvalidParameter(format!("{op:?} needs two operands")));
        match op {
            ArithOp::Add => Ok(self.add(a, rhs()?)),
            ArithOp::Mul => Ok(self.mul(a, rhs()?)),
            ArithOp::Neg => Ok(self.neg(a)),
            ArithOp::Inv => self.inv(a),
        }
    }

    /// Σ xᵢ yᵢ over the field.
    pub fn dot(&self, x: &[Symbol], y: &[Symbol]) -> Symbol {
        x.iter().zip(y).fold(0, |acc, (&a, &b)| self.add(acc, self.mul(a, b)))
    }

    /// Local dimension `d` when this field is GF(d²) with prime `d`.
    pub fn qudit_dim(&self) -> Result<u32> {
        if self.spec.m == 2 {
            Ok(self.spec.p)
        } else {
            Err(Error::NotPrimeSquare(self.q as u32))
        }
    }

    /// Coordinates of `elem` in the basis {1, ξ}, ξ the element of index `p`.
    ///
    /// This is an isomorphism of the additive group of GF(d²) onto Z_d × Z_d.
    /// Only prime `d` is supported; GF(d²) for prime-power `d` has additive
    /// group Z_p^(2m') instead.
    pub fn coords(&self, elem: Symbol) -> Result<(u32, u32)> {
        let d = self.qudit_dim()?;
        self.element(elem as u32)?;
        let e = elem as u32;
        Ok((e % d, e / d))
    }
}

pub(crate) fn is_prime(n: u32) -> bool {
    n >= 2 && (2..).take_while(|i| i * i <= n).all(|i| !n.is_multiple_of(i))
}

/// Base-`p` digits of `value`, least significant first, padded to `len`.
fn to_digits(mut value: u32, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(value % p);
        value /= p;
    }
    out
}

fn from_digits(digits: &[u32], p: u32) -> u32 {
    digits.iter().rev().fold(0, |acc, &d| acc * p + d)
}

fn trim(mut poly: Vec<u32>) -> Vec<u32> {
    while poly.len() > 1 && *poly.last().unwrap() == 0 {
        poly.pop();
    }
    poly
}

fn inv_mod_prime(a: u32, p: u32) -> u32 {
    (1..p).find(|&b| (a * b) % p == 1).expect("nonzero element of a prime field")
}

/// Remainder of `num` divided by `den` over GF(p). `den` must be nonzero.
fn poly_rem(num: &[u32], den: &[u32], p: u32) -> Vec<u32> {
    let den = trim(den.to_vec());
    let mut rem = trim(num.to_vec());
    let lead_inv = inv_mod_prime(*den.last().unwrap(), p);
    while rem.len() >= den.len() && !(rem.len() == 1 && rem[0] == 0) {
        let shift = rem.len() - den.len();
        let factor = rem.last().unwrap() * lead_inv % p;
        for (i, &c) in den.iter().enumerate() {
            rem[shift + i] = (rem[shift + i] + p * p - factor * c % p) % p;
        }
        rem = trim(rem);
        if rem.len() < den.len() {
            break;
        }
    }
    rem
}

fn poly_mul_mod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let mut prod = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    let m = modulus.len() - 1;
    let mut rem = poly_rem(&prod, modulus, p);
    rem.resize(m, 0);
    rem
}

/// Irreducibility by trial division by every monic polynomial of lower degree.
fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let m = poly.len() - 1;
    if m == 1 {
        return true;
    }
    for deg in 1..m {
        for idx in 0..p.pow(deg as u32) {
            let mut divisor = to_digits(idx, p, deg);
            divisor.push(1);
            let rem = poly_rem(poly, &divisor, p);
            if rem.iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

//! Prime fields and their explicit extensions `GF(p^N)`.
//!
//! A [`GaloisField`] is a cheap shared handle on the field data (modulus and the
//! precomputed Frobenius matrix). Every [`FieldElement`] carries its field, so the
//! arithmetic operators work without threading the field around.
//!
//! Elements are stored in the power basis `1, t, ..., t^{N-1}` where `t` is the
//! class of `x` modulo the defining polynomial. The total order on elements is
//! lexicographic on the coefficient vector, constant term first.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly;

/// `{p, N, modulus}`: the data that determines a field up to equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub p: u64,
    #[serde(rename = "N")]
    pub degree: usize,
    pub modulus: Vec<u64>,
}

struct FieldInner {
    desc: FieldDescriptor,
    // frob[j] = (t^j)^p in the power basis
    frob: Vec<Vec<u64>>,
    order: BigUint,
}

#[derive(Clone)]
pub struct GaloisField(Arc<FieldInner>);

const MAX_CHARACTERISTIC: u64 = 1 << 31;

fn cache() -> &'static Mutex<HashMap<(u64, usize), GaloisField>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), GaloisField>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn check_characteristic(p: u64) -> Result<()> {
    if p == 2 {
        return Err(Error::EvenCharacteristic);
    }
    if !poly::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p >= MAX_CHARACTERISTIC {
        return Err(Error::Unsupported(format!("characteristic {p} too large")));
    }
    Ok(())
}

/// Lexicographically smallest monic irreducible polynomial of degree `n` over `F_p`,
/// comparing coefficient lists constant term first.
fn smallest_irreducible(p: u64, n: usize) -> Vec<u64> {
    if n == 1 {
        return vec![0, 1];
    }
    // digits[0] is the constant term and the most significant digit
    let mut digits = vec![0u64; n];
    digits[0] = 1;
    loop {
        let mut f = digits.clone();
        f.push(1);
        if poly::is_irreducible(&f, p) {
            return f;
        }
        let mut i = n - 1;
        loop {
            digits[i] += 1;
            if digits[i] < p {
                break;
            }
            digits[i] = 0;
            // a monic irreducible of every degree exists, so the counter cannot overflow
            i -= 1;
        }
    }
}

/// The field `GF(p^n)` with the canonical (lexicographically smallest) modulus.
pub fn make_extension(p: u64, n: usize) -> Result<GaloisField> {
    check_characteristic(p)?;
    if n == 0 {
        return Err(Error::InvalidInput("extension degree must be at least 1".into()));
    }
    if let Some(f) = cache().lock().unwrap().get(&(p, n)) {
        return Ok(f.clone());
    }
    let modulus = smallest_irreducible(p, n);
    let field = GaloisField::build(p, modulus);
    cache().lock().unwrap().insert((p, n), field.clone());
    Ok(field)
}

impl GaloisField {
    /// A field with an explicitly chosen modulus (monic, irreducible, constant term first).
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Self> {
        check_characteristic(p)?;
        if modulus.len() < 2 || modulus.last() != Some(&1) || modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidInput("modulus must be monic with reduced coefficients".into()));
        }
        if !poly::is_irreducible(&modulus, p) {
            return Err(Error::InvalidInput("modulus is reducible".into()));
        }
        Ok(Self::build(p, modulus))
    }

    pub fn from_descriptor(desc: &FieldDescriptor) -> Result<Self> {
        let canonical = make_extension(desc.p, desc.degree)?;
        if canonical.0.desc.modulus == desc.modulus {
            Ok(canonical)
        } else {
            Self::with_modulus(desc.p, desc.modulus.clone())
        }
    }

    fn build(p: u64, modulus: Vec<u64>) -> Self {
        let n = modulus.len() - 1;
        let tp = poly::powmod(&[0, 1], p, &modulus, p);
        let mut frob = Vec::with_capacity(n);
        let mut acc = vec![1u64];
        for _ in 0..n {
            let mut padded = acc.clone();
            padded.resize(n, 0);
            frob.push(padded);
            acc = poly::mulmod(&acc, &tp, &modulus, p);
        }
        let order = BigUint::from(p).pow(n as u32);
        GaloisField(Arc::new(FieldInner {
            desc: FieldDescriptor { p, degree: n, modulus },
            frob,
            order,
        }))
    }

    pub fn p(&self) -> u64 {
        self.0.desc.p
    }

    pub fn degree(&self) -> usize {
        self.0.desc.degree
    }

    pub fn modulus(&self) -> &[u64] {
        &self.0.desc.modulus
    }

    pub fn descriptor(&self) -> &FieldDescriptor {
        &self.0.desc
    }

    /// `p^N`.
    pub fn order(&self) -> &BigUint {
        &self.0.order
    }

    /// `p^N` when it fits in a `u64`.
    pub fn size(&self) -> Option<u64> {
        self.0.order.to_u64()
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { field: self.clone(), coeffs: vec![0; self.degree()] }
    }

    pub fn one(&self) -> FieldElement {
        self.from_u64(1)
    }

    pub fn from_u64(&self, v: u64) -> FieldElement {
        let mut coeffs = vec![0; self.degree()];
        coeffs[0] = v % self.p();
        FieldElement { field: self.clone(), coeffs }
    }

    pub fn from_i64(&self, v: i64) -> FieldElement {
        self.from_u64(v.rem_euclid(self.p() as i64) as u64)
    }

    /// The power-basis generator `t` (zero in the prime field, whose modulus is `x`).
    pub fn gen(&self) -> FieldElement {
        let mut coeffs = vec![0; self.degree()];
        if self.degree() > 1 {
            coeffs[1] = 1;
        }
        FieldElement { field: self.clone(), coeffs }
    }

    /// Element from power-basis coefficients; shorter lists are zero padded, entries reduced mod p.
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FieldElement> {
        if coeffs.len() > self.degree() {
            return Err(Error::InvalidInput(format!(
                "{} coefficients given for a degree {} field",
                coeffs.len(),
                self.degree()
            )));
        }
        let mut c: Vec<u64> = coeffs.iter().map(|x| x % self.p()).collect();
        c.resize(self.degree(), 0);
        Ok(FieldElement { field: self.clone(), coeffs: c })
    }

    /// The element at position `index` in the canonical order.
    pub fn element_at(&self, mut index: u64) -> FieldElement {
        let p = self.p();
        let n = self.degree();
        let mut coeffs = vec![0; n];
        for i in (0..n).rev() {
            coeffs[i] = index % p;
            index /= p;
        }
        FieldElement { field: self.clone(), coeffs }
    }

    /// All elements in canonical order; `None` if the field is too large to list.
    pub fn elements(&self) -> Option<Vec<FieldElement>> {
        let q = self.size()?;
        if q > 1 << 24 {
            return None;
        }
        Some((0..q).map(|i| self.element_at(i)).collect())
    }

    /// An element of exact multiplicative order `d`: the first `x` in canonical
    /// order for which `x^((q-1)/d)` has order `d`.
    pub fn primitive_root_of_unity(&self, d: u64) -> Result<FieldElement> {
        let q1 = self.order() - 1u32;
        let too_small = || Error::RootFieldTooSmall { p: self.p(), degree: self.degree(), order: d };
        if d == 0 || !(&q1 % d).is_zero() {
            return Err(too_small());
        }
        let cofactor = &q1 / d;
        let primes = poly::prime_factors(d);
        let one = self.one();
        for i in 1u64.. {
            let x = self.element_at(i);
            let y = x.pow_big(&cofactor);
            if primes.iter().all(|&r| y.pow(d / r) != one) {
                return Ok(y);
            }
        }
        unreachable!("the multiplicative group is cyclic")
    }

    /// Multiplicative order of `x`, given that `x^d = 1`.
    pub fn order_dividing(&self, x: &FieldElement, d: u64) -> u64 {
        let one = self.one();
        let mut ord = d;
        for r in poly::prime_factors(d) {
            while ord.is_multiple_of(r) && x.pow(ord / r) == one {
                ord /= r;
            }
        }
        ord
    }

    /// All solutions of `x^e = target`, sorted in canonical order.
    pub fn nth_roots(&self, target: &FieldElement, e: &BigUint) -> Vec<FieldElement> {
        if target.is_zero() {
            return if e.is_zero() { Vec::new() } else { vec![self.zero()] };
        }
        if e.is_zero() {
            return if target.is_one() { self.elements().unwrap_or_default() } else { Vec::new() };
        }
        let q1 = self.order() - 1u32;
        let d = e.gcd(&q1);
        if !target.pow_big(&(&q1 / &d)).is_one() {
            return Vec::new();
        }
        let d64 = d.to_u64().expect("root count fits in u64");
        let mut y = target.clone();
        let mut rest = d64;
        for r in poly::prime_factors(d64) {
            while rest.is_multiple_of(r) {
                y = self.prime_root(&y, r);
                rest /= r;
            }
        }
        // y^d = target; lift to an e-th root with u*e = d (mod q-1)
        let m = &q1 / &d;
        let u = mod_inverse(&(e / &d), &m).expect("e/d is coprime to (q-1)/d");
        let c0 = y.pow_big(&u);
        let omega = self.primitive_root_of_unity(d64).expect("d divides q-1");
        let mut roots = Vec::with_capacity(d64 as usize);
        let mut z = c0;
        for _ in 0..d64 {
            roots.push(z.clone());
            z = &z * &omega;
        }
        roots.sort();
        roots
    }

    /// An `r`-th root of `a` for a prime `r`, assuming one exists.
    fn prime_root(&self, a: &FieldElement, r: u64) -> FieldElement {
        let q1 = self.order() - 1u32;
        let rb = BigUint::from(r);
        let mut s = 0u32;
        let mut t = q1.clone();
        while (&t % r).is_zero() {
            t /= r;
            s += 1;
        }
        if s == 0 {
            // x -> x^r is bijective
            let k = mod_inverse(&rb, &q1).expect("coprime");
            return a.pow_big(&k);
        }
        let k = if t.is_one() { BigUint::zero() } else { mod_inverse(&rb, &t).expect("coprime") };
        let x0 = a.pow_big(&k);
        // x0^r = a * eps with eps in the r-Sylow subgroup
        let eps_inv = a * &x0.pow(r).inv().expect("nonzero");
        let nonresidue = (1u64..)
            .map(|i| self.element_at(i))
            .find(|x| !x.pow_big(&(&q1 / r)).is_one())
            .expect("r divides q-1");
        let g = nonresidue.pow_big(&t);
        let log = sylow_log(&g, &eps_inv, r, s);
        debug_assert!((&log % r).is_zero(), "target is not an r-th power");
        &x0 * &g.pow_big(&(log / r))
    }
}

/// Discrete log of `h` to base `g`, where `g` has order `r^s` and `h` lies in `<g>`.
fn sylow_log(g: &FieldElement, h: &FieldElement, r: u64, s: u32) -> BigUint {
    let rb = BigUint::from(r);
    let gamma = g.pow_big(&rb.pow(s - 1));
    let g_inv = g.inv().expect("nonzero");
    let mut log = BigUint::zero();
    for i in 0..s {
        let hk = (&g_inv.pow_big(&log) * h).pow_big(&rb.pow(s - 1 - i));
        let mut acc = g.field.one();
        let mut digit = None;
        for dgt in 0..r {
            if acc == hk {
                digit = Some(dgt);
                break;
            }
            acc = &acc * &gamma;
        }
        let dgt = digit.expect("element lies in the Sylow subgroup");
        log += BigUint::from(dgt) * rb.pow(i);
    }
    log
}

pub(crate) fn mod_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    if m.is_one() {
        return Some(BigUint::zero());
    }
    let a = BigInt::from(a % m);
    let m = BigInt::from(m.clone());
    let ext = a.extended_gcd(&m);
    if !ext.gcd.is_one() {
        return None;
    }
    let mut x = ext.x % &m;
    if x.is_negative() {
        x += &m;
    }
    x.to_biguint()
}

impl PartialEq for GaloisField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.desc == other.0.desc
    }
}

impl Eq for GaloisField {}

impl fmt::Debug for GaloisField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.p(), self.degree())
    }
}

#[derive(Clone)]
pub struct FieldElement {
    field: GaloisField,
    coeffs: Vec<u64>,
}

impl FieldElement {
    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// The residue if this element lies in the prime field.
    pub fn as_prime(&self) -> Option<u64> {
        self.coeffs[1..].iter().all(|&c| c == 0).then_some(self.coeffs[0])
    }

    pub fn inv(&self) -> Option<FieldElement> {
        if self.is_zero() {
            return None;
        }
        let p = self.field.p();
        let mut a = self.coeffs.clone();
        poly::trim(&mut a);
        let inv = poly::inv_mod(&a, self.field.modulus(), p)?;
        Some(self.with_poly(inv))
    }

    pub fn pow(&self, mut exp: u64) -> FieldElement {
        let mut acc = self.field.one();
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            exp >>= 1;
        }
        acc
    }

    pub fn pow_big(&self, exp: &BigUint) -> FieldElement {
        let mut acc = self.field.one();
        for i in (0..exp.bits()).rev() {
            acc = &acc * &acc;
            if exp.bit(i) {
                acc = &acc * self;
            }
        }
        acc
    }

    /// `x^p`.
    pub fn frobenius(&self) -> FieldElement {
        let p = self.field.p();
        let n = self.field.degree();
        let mut out = vec![0u64; n];
        for (j, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (o, &f) in out.iter_mut().zip(&self.field.0.frob[j]) {
                *o = (*o + c * f) % p;
            }
        }
        FieldElement { field: self.field.clone(), coeffs: out }
    }

    /// `x^(p^k)`; negative `k` applies the inverse Frobenius.
    pub fn frobenius_pow(&self, k: i64) -> FieldElement {
        let n = self.field.degree() as i64;
        let k = k.rem_euclid(n);
        let mut x = self.clone();
        for _ in 0..k {
            x = x.frobenius();
        }
        x
    }

    fn with_poly(&self, mut c: Vec<u64>) -> FieldElement {
        c.resize(self.field.degree(), 0);
        FieldElement { field: self.field.clone(), coeffs: c }
    }

    fn check_same(&self, other: &FieldElement) {
        assert!(self.field == other.field, "arithmetic between elements of different fields");
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && self.field == other.field
    }
}

impl Eq for FieldElement {}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs.cmp(&other.coeffs)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coeffs)
    }
}

impl Serialize for FieldElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs.serialize(s)
    }
}

impl<'a> Add<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        self.check_same(rhs);
        let p = self.field.p();
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| (a + b) % p).collect();
        FieldElement { field: self.field.clone(), coeffs }
    }
}

impl<'a> Sub<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        self.check_same(rhs);
        let p = self.field.p();
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| (a + p - b) % p).collect();
        FieldElement { field: self.field.clone(), coeffs }
    }
}

impl<'a> Mul<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        self.check_same(rhs);
        let p = self.field.p();
        let n = self.field.degree();
        if n == 1 {
            return self.field.from_u64(self.coeffs[0] * rhs.coeffs[0]);
        }
        let mut prod = vec![0u64; 2 * n - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + a * b) % p;
            }
        }
        let m = self.field.modulus();
        for k in (n..2 * n - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            for j in 0..n {
                let idx = k - n + j;
                prod[idx] = (prod[idx] + (p - c) * m[j]) % p;
            }
        }
        prod.truncate(n);
        FieldElement { field: self.field.clone(), coeffs: prod }
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        let p = self.field.p();
        let coeffs = self.coeffs.iter().map(|&a| (p - a) % p).collect();
        FieldElement { field: self.field.clone(), coeffs }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident, $assign_tr:ident, $assign:ident) => {
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                (&self).$method(rhs)
            }
        }
        impl<'a> $assign_tr<&'a FieldElement> for FieldElement {
            fn $assign(&mut self, rhs: &FieldElement) {
                *self = (&*self).$method(rhs);
            }
        }
    };
}

forward_owned!(Add, add, AddAssign, add_assign);
forward_owned!(Sub, sub, SubAssign, sub_assign);
forward_owned!(Mul, mul, MulAssign, mul_assign);

/// Polynomials over `GF(q)` (constant term first), only what root finding needs.
mod gfpoly {
    use super::{FieldElement, GaloisField};
    use num_bigint::BigUint;

    pub fn trim(a: &mut Vec<FieldElement>) {
        while a.last().is_some_and(|c| c.is_zero()) {
            a.pop();
        }
    }

    pub fn rem(a: &[FieldElement], m: &[FieldElement]) -> Vec<FieldElement> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let lead_inv = m[dm].inv().expect("nonzero leading coefficient");
        while r.len() > dm {
            let k = r.len() - 1 - dm;
            let c = &r[r.len() - 1] * &lead_inv;
            for (j, mj) in m.iter().enumerate() {
                r[k + j] = &r[k + j] - &(&c * mj);
            }
            r.pop();
            trim(&mut r);
        }
        r
    }

    pub fn mulmod(a: &[FieldElement], b: &[FieldElement], m: &[FieldElement], field: &GaloisField) -> Vec<FieldElement> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![field.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = &out[i + j] + &(x * y);
            }
        }
        rem(&out, m)
    }

    pub fn powmod(base: &[FieldElement], exp: &BigUint, m: &[FieldElement], field: &GaloisField) -> Vec<FieldElement> {
        let mut acc = rem(&[field.one()], m);
        for i in (0..exp.bits()).rev() {
            acc = mulmod(&acc, &acc, m, field);
            if exp.bit(i) {
                acc = mulmod(&acc, base, m, field);
            }
        }
        acc
    }

    pub fn gcd(a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(&mut x);
        trim(&mut y);
        while !y.is_empty() {
            let r = rem(&x, &y);
            x = y;
            y = r;
        }
        if let Some(lead) = x.last().cloned() {
            let inv = lead.inv().expect("nonzero");
            for c in x.iter_mut() {
                *c = &*c * &inv;
            }
        }
        x
    }

    pub fn divide_exact(a: &[FieldElement], m: &[FieldElement], field: &GaloisField) -> Vec<FieldElement> {
        let mut r = a.to_vec();
        let dm = m.len() - 1;
        let lead_inv = m[dm].inv().expect("nonzero");
        let mut q = vec![field.zero(); r.len() - dm];
        while r.len() > dm {
            let k = r.len() - 1 - dm;
            let c = &r[r.len() - 1] * &lead_inv;
            for (j, mj) in m.iter().enumerate() {
                r[k + j] = &r[k + j] - &(&c * mj);
            }
            q[k] = c;
            r.pop();
        }
        q
    }

    /// One root of a polynomial that splits into distinct linear factors over `field`
    /// (equal-degree splitting, with shifts scanned in canonical order).
    pub fn split_root(f: &[FieldElement], field: &GaloisField) -> FieldElement {
        if f.len() == 2 {
            return -(&f[0] * &f[1].inv().expect("monic"));
        }
        let exp = (field.order() - 1u32) / 2u32;
        for i in 0u64.. {
            let delta = field.element_at(i);
            let h = powmod(&[delta, field.one()], &exp, f, field);
            let mut h1 = h.clone();
            if h1.is_empty() {
                h1.push(field.zero());
            }
            h1[0] = &h1[0] - &field.one();
            let g = gcd(f, &h1);
            let dg = g.len().saturating_sub(1);
            if dg > 0 && dg < f.len() - 1 {
                let other = divide_exact(f, &g, field);
                let smaller = if g.len() <= other.len() { g } else { other };
                return split_root(&smaller, field);
            }
        }
        unreachable!()
    }
}

/// The embedding `GF(p^n) -> GF(p^N)` for `n | N`, sending the generator of the
/// source to the smallest root of its modulus in the target.
#[derive(Clone, Debug)]
pub struct Embedding {
    source: GaloisField,
    target: GaloisField,
    powers: Vec<FieldElement>,
}

impl Embedding {
    pub fn new(source: &GaloisField, target: &GaloisField) -> Result<Self> {
        if source.p() != target.p() || !target.degree().is_multiple_of(source.degree()) {
            return Err(Error::FieldMismatch);
        }
        let n = source.degree();
        let image = if source == target {
            source.gen()
        } else if n == 1 {
            target.zero()
        } else {
            let f: Vec<FieldElement> = source.modulus().iter().map(|&c| target.from_u64(c)).collect();
            let root = gfpoly::split_root(&f, target);
            (0..n as i64).map(|k| root.frobenius_pow(k)).min().expect("n >= 1")
        };
        let mut powers = Vec::with_capacity(n);
        let mut acc = target.one();
        for _ in 0..n {
            powers.push(acc.clone());
            acc = &acc * &image;
        }
        Ok(Embedding { source: source.clone(), target: target.clone(), powers })
    }

    pub fn source(&self) -> &GaloisField {
        &self.source
    }

    pub fn target(&self) -> &GaloisField {
        &self.target
    }

    pub fn apply(&self, x: &FieldElement) -> FieldElement {
        assert!(x.field == self.source, "element outside the embedding source");
        let mut out = self.target.zero();
        for (c, pw) in x.coeffs.iter().zip(&self.powers) {
            if *c != 0 {
                out = &out + &(&self.target.from_u64(*c) * pw);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf9() -> GaloisField {
        make_extension(3, 2).unwrap()
    }

    #[test]
    fn canonical_moduli() {
        assert_eq!(make_extension(3, 1).unwrap().modulus(), &[0, 1]);
        assert_eq!(make_extension(3, 2).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(make_extension(2, 1).unwrap_err(), Error::EvenCharacteristic);
        assert_eq!(make_extension(9, 1).unwrap_err(), Error::NotPrime(9));
    }

    #[test]
    fn modulus_is_deterministic() {
        for n in 1..8 {
            let a = make_extension(5, n).unwrap();
            let b = GaloisField::build(5, smallest_irreducible(5, n));
            assert_eq!(a.modulus(), b.modulus());
        }
    }

    #[test]
    fn frobenius_examples() {
        let f3 = make_extension(3, 1).unwrap();
        assert_eq!(f3.from_u64(2).frobenius(), f3.from_u64(2));
        let f = gf9();
        let t = f.gen();
        assert_eq!(t.frobenius(), -&t);
        assert_eq!(f.zero().frobenius(), f.zero());
        assert_eq!(t.frobenius(), t.pow(3));
    }

    #[test]
    fn exhaustive_field_axioms_gf9() {
        let f = gf9();
        let els = f.elements().unwrap();
        for x in &els {
            assert_eq!(x.frobenius().frobenius(), *x);
            if !x.is_zero() {
                assert!((x * &x.inv().unwrap()).is_one());
            }
            for y in &els {
                assert_eq!(x * y, y * x);
                assert_eq!((x + y).frobenius(), &x.frobenius() + &y.frobenius());
                assert_eq!((x * y).frobenius(), &x.frobenius() * &y.frobenius());
            }
        }
    }

    #[test]
    fn element_order_matches_enumeration() {
        let f = make_extension(3, 3).unwrap();
        let els = f.elements().unwrap();
        assert_eq!(els.len(), 27);
        assert!(els.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn fourth_roots_of_two_in_gf9() {
        let f = gf9();
        let roots = f.nth_roots(&f.from_u64(2), &BigUint::from(4u32));
        let brute: Vec<FieldElement> = f.elements().unwrap().into_iter().filter(|x| x.pow(4) == f.from_u64(2)).collect();
        assert_eq!(roots, brute);
        assert_eq!(roots.len(), 4);
    }

    #[test]
    fn nth_roots_against_brute_force() {
        let f = make_extension(3, 4).unwrap();
        let els = f.elements().unwrap();
        for e in [2u32, 4, 5, 10, 16, 28, 80] {
            for target in els.iter().step_by(7) {
                let roots = f.nth_roots(target, &BigUint::from(e));
                let brute: Vec<FieldElement> = els.iter().filter(|x| x.pow(e as u64) == *target).cloned().collect();
                assert_eq!(roots, brute, "e = {e}, target = {target:?}");
            }
        }
    }

    #[test]
    fn roots_of_unity() {
        let f = make_extension(3, 6).unwrap();
        let z = f.primitive_root_of_unity(28).unwrap();
        assert_eq!(f.order_dividing(&z, 28), 28);
        assert!(matches!(f.primitive_root_of_unity(5), Err(Error::RootFieldTooSmall { .. })));
    }

    #[test]
    fn embedding_is_a_ring_homomorphism() {
        let small = gf9();
        for big_n in [2, 4, 6] {
            let big = make_extension(3, big_n).unwrap();
            let emb = Embedding::new(&small, &big).unwrap();
            let els = small.elements().unwrap();
            for x in &els {
                for y in &els {
                    assert_eq!(emb.apply(&(x * y)), &emb.apply(x) * &emb.apply(y));
                    assert_eq!(emb.apply(&(x + y)), &emb.apply(x) + &emb.apply(y));
                }
                assert_eq!(emb.apply(&x.frobenius()), emb.apply(x).frobenius());
            }
        }
        assert!(Embedding::new(&make_extension(3, 2).unwrap(), &make_extension(3, 3).unwrap()).is_err());
    }
}

//! Sparse multivariate polynomials over arbitrary-precision rationals.
//!
//! Variables are labeled by element sets (flats, or ray labels of a fan).
//! Terms live in a `BTreeMap` keyed by [`Monomial`], so iteration is always
//! in canonical graded-lex order and equal polynomials have equal layouts.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::set::ElementSet;

pub type Rational = BigRational;

/// Shorthand for the rational `num / den`.
pub fn q(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn factorial(n: usize) -> Rational {
    (1..=n).fold(Rational::one(), |acc, k| acc * int(k as i64))
}

/// A polynomial variable, identified by its flat (or ray) label.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub ElementSet);

impl VarId {
    pub fn of(labels: &[u32]) -> Self {
        VarId(ElementSet::of(labels))
    }

    pub fn set(self) -> ElementSet {
        self.0
    }
}

impl From<ElementSet> for VarId {
    fn from(s: ElementSet) -> Self {
        VarId(s)
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{{{}}}", self.0)
    }
}

/// A monomial: sorted `(variable, exponent)` pairs with positive exponents.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(SmallVec<[(VarId, u32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(v: VarId) -> Self {
        Monomial(smallvec::smallvec![(v, 1)])
    }

    /// Builds a monomial from possibly repeated or zero-exponent pairs.
    pub fn from_pairs<I: IntoIterator<Item = (VarId, u32)>>(pairs: I) -> Self {
        let mut map: BTreeMap<VarId, u32> = BTreeMap::new();
        for (v, e) in pairs {
            *map.entry(v).or_default() += e;
        }
        Monomial(map.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    /// Square-free product of the given variables.
    pub fn product<I: IntoIterator<Item = VarId>>(vars: I) -> Self {
        Self::from_pairs(vars.into_iter().map(|v| (v, 1)))
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&(_, e)| e as usize).sum()
    }

    pub fn exponent(&self, v: VarId) -> u32 {
        self.0
            .binary_search_by(|(w, _)| w.cmp(&v))
            .map(|k| self.0[k].1)
            .unwrap_or(0)
    }

    pub fn pairs(&self) -> &[(VarId, u32)] {
        &self.0
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.0.iter().map(|&(v, _)| v)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = SmallVec::with_capacity(self.0.len() + other.0.len());
        let (mut a, mut b) = (self.0.iter().peekable(), other.0.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&(va, ea)), Some(&&(vb, eb))) => match va.cmp(&vb) {
                    Ordering::Less => {
                        out.push((va, ea));
                        a.next();
                    }
                    Ordering::Greater => {
                        out.push((vb, eb));
                        b.next();
                    }
                    Ordering::Equal => {
                        out.push((va, ea + eb));
                        a.next();
                        b.next();
                    }
                },
                (Some(&&p), None) => {
                    out.push(p);
                    a.next();
                }
                (None, Some(&&p)) => {
                    out.push(p);
                    b.next();
                }
                (None, None) => break,
            }
        }
        Monomial(out)
    }

    /// `self` with the exponent of `v` changed by `delta`; `None` if it would
    /// go negative.
    fn shift(&self, v: VarId, delta: i64) -> Option<Monomial> {
        let mut out = self.0.clone();
        match out.binary_search_by(|(w, _)| w.cmp(&v)) {
            Ok(k) => {
                let e = out[k].1 as i64 + delta;
                match e.cmp(&0) {
                    Ordering::Less => return None,
                    Ordering::Equal => {
                        out.remove(k);
                    }
                    Ordering::Greater => out[k].1 = e as u32,
                }
            }
            Err(k) => {
                if delta < 0 {
                    return None;
                }
                if delta > 0 {
                    out.insert(k, (v, delta as u32));
                }
            }
        }
        Some(Monomial(out))
    }

    /// `∏ a_k!` over the exponents; the value of `∂^a` applied to `x^a`.
    pub fn factorial_weight(&self) -> Rational {
        self.0
            .iter()
            .fold(Rational::one(), |acc, &(_, e)| acc * factorial(e as usize))
    }
}

/// Graded lex: higher total degree is greater; ties broken by comparing
/// exponents variable by variable in ascending variable order.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            for (&(va, ea), &(vb, eb)) in self.0.iter().zip(other.0.iter()) {
                match va.cmp(&vb) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(&eb);
                        }
                    }
                }
            }
            self.0.len().cmp(&other.0.len())
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for &(v, e) in &self.0 {
            write!(f, "x{{{v}}}")?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A constant-coefficient differential operator `∏ ∂_v^{a_v}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DerivativeMonomial(pub Monomial);

impl DerivativeMonomial {
    pub fn of<I: IntoIterator<Item = (VarId, u32)>>(pairs: I) -> Self {
        DerivativeMonomial(Monomial::from_pairs(pairs))
    }

    /// `∂_{v_1} ∂_{v_2} ...` for distinct or repeated variables.
    pub fn product<I: IntoIterator<Item = VarId>>(vars: I) -> Self {
        DerivativeMonomial(Monomial::product(vars))
    }

    pub fn degree(&self) -> usize {
        self.0.degree()
    }
}

/// A linear form `Σ c_v x_v`, stored sparsely.
pub type LinearForm = Vec<(VarId, Rational)>;

/// Sparse polynomial with nonzero rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RationalPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl RationalPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn var(v: VarId) -> Self {
        Self::monomial(Monomial::var(v), Rational::one())
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn linear(form: &[(VarId, Rational)]) -> Self {
        let mut p = Self::zero();
        for (v, c) in form {
            p.add_term(Monomial::var(*v), c.clone());
        }
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending canonical order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, Rational> {
        self.terms
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Largest total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// True when every term has total degree `d` (vacuously for zero).
    pub fn is_homogeneous(&self, d: usize) -> bool {
        self.terms.keys().all(|m| m.degree() == d)
    }

    pub fn variables(&self) -> BTreeSet<VarId> {
        self.terms.keys().flat_map(|m| m.vars()).collect()
    }

    pub fn scale(&self, c: &Rational) -> RationalPoly {
        if c.is_zero() {
            return Self::zero();
        }
        RationalPoly {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> RationalPoly {
        // Linear forms go through the multinomial expansion.
        if self.is_homogeneous(1) && !self.is_zero() {
            let form: LinearForm = self
                .terms
                .iter()
                .map(|(m, c)| (m.pairs()[0].0, c.clone()))
                .collect();
            return linear_power(&form, k);
        }
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `∂/∂v`.
    pub fn derivative(&self, v: VarId) -> RationalPoly {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e > 0 {
                let m2 = m.shift(v, -1).expect("exponent positive");
                out.add_term(m2, c * int(e as i64));
            }
        }
        out
    }

    /// Iterated partial differentiation by a derivative monomial.
    pub fn partial_derivative(&self, d: &DerivativeMonomial) -> RationalPoly {
        let pairs = d.0.pairs();
        let mut out = Self::zero();
        'terms: for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut mono = m.clone();
            for &(v, a) in pairs {
                let e = mono.exponent(v);
                if e < a {
                    continue 'terms;
                }
                // e (e-1) ... (e-a+1)
                for k in 0..a {
                    coeff *= int((e - k) as i64);
                }
                mono = mono.shift(v, -(a as i64)).expect("checked");
            }
            out.add_term(mono, coeff);
        }
        out
    }

    /// Applies a polynomial in the `∂_v` (given with variables standing for
    /// derivatives) to `self`.
    pub fn apply_operator(&self, op: &RationalPoly) -> RationalPoly {
        let mut out = Self::zero();
        for (m, c) in &op.terms {
            let part = self.partial_derivative(&DerivativeMonomial(m.clone()));
            out += part.scale(c);
        }
        out
    }

    /// Applies a homogeneous degree-`d` derivative monomial to a degree-`d`
    /// polynomial: the result is the constant `coeff(x^a) ∏ a_k!`.
    pub fn pair_with(&self, d: &DerivativeMonomial) -> Rational {
        self.coefficient(&d.0) * d.0.factorial_weight()
    }

    /// Substitutes a polynomial for each variable. Every variable of `self`
    /// must be mapped.
    pub fn substitute(&self, map: &BTreeMap<VarId, RationalPoly>) -> Result<RationalPoly> {
        let mut cache: HashMap<(VarId, u32), RationalPoly> = HashMap::new();
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut term = Self::constant(c.clone());
            for &(v, e) in m.pairs() {
                let img = map.get(&v).ok_or(Error::UnmappedVariable(v))?;
                let pw = cache.entry((v, e)).or_insert_with(|| img.pow(e));
                term = &term * &*pw;
            }
            out += term;
        }
        Ok(out)
    }

    /// Linear change of variables; each image must be a linear form.
    pub fn linear_substitute(&self, map: &BTreeMap<VarId, LinearForm>) -> Result<RationalPoly> {
        let polys: BTreeMap<VarId, RationalPoly> = map
            .iter()
            .map(|(v, form)| (*v, RationalPoly::linear(form)))
            .collect();
        self.substitute(&polys)
    }

    /// Renames variables; unmapped variables are left alone.
    pub fn rename(&self, map: &BTreeMap<VarId, VarId>) -> RationalPoly {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let m2 = Monomial::from_pairs(
                m.pairs().iter().map(|&(v, e)| (*map.get(&v).unwrap_or(&v), e)),
            );
            out.add_term(m2, c.clone());
        }
        out
    }

    /// Antiderivative in `v` with no added `v`-free term.
    pub fn antiderivative(&self, v: VarId) -> RationalPoly {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            out.add_term(m.shift(v, 1).expect("raise"), c / int(e as i64 + 1));
        }
        out
    }

    /// `self` with `v = 0`.
    pub fn set_zero(&self, v: VarId) -> RationalPoly {
        RationalPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.exponent(v) == 0)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Terms whose combined exponent in `vars` is exactly `k`.
    pub fn part_of_degree_in(&self, vars: &[VarId], k: u32) -> RationalPoly {
        RationalPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| vars.iter().map(|&v| m.exponent(v)).sum::<u32>() == k)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Evaluates at a point; every variable of `self` needs a value.
    pub fn evaluate(&self, point: &BTreeMap<VarId, Rational>) -> Result<Rational> {
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m.pairs() {
                let x = point.get(&v).ok_or(Error::UnmappedVariable(v))?;
                t *= num_traits::pow(x.clone(), e as usize);
            }
            total += t;
        }
        Ok(total)
    }

    /// The constant term.
    pub fn constant_term(&self) -> Rational {
        self.coefficient(&Monomial::one())
    }

    /// Human-readable form such as `-1/2·x{4}^2 + 1·x{4}x{1,4}`, highest
    /// terms first.
    pub fn pretty(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                s.push_str(if c.is_negative() { " - " } else { " + " });
            } else if c.is_negative() {
                s.push('-');
            }
            let a = c.abs();
            if m.is_one() {
                s.push_str(&a.to_string());
            } else {
                s.push_str(&format!("{a}·{m}"));
            }
        }
        s
    }
}

/// `(Σ c_v x_v)^k` by direct multinomial expansion.
pub fn linear_power(form: &[(VarId, Rational)], k: u32) -> RationalPoly {
    let form: Vec<(VarId, Rational)> = {
        let mut merged: BTreeMap<VarId, Rational> = BTreeMap::new();
        for (v, c) in form {
            *merged.entry(*v).or_insert_with(Rational::zero) += c;
        }
        merged.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    };
    let mut out = RationalPoly::zero();
    if form.is_empty() {
        if k == 0 {
            out.add_term(Monomial::one(), Rational::one());
        }
        return out;
    }
    // powers[t][a] = c_t^a / a!
    let powers: Vec<Vec<Rational>> = form
        .iter()
        .map(|(_, c)| {
            let mut row = Vec::with_capacity(k as usize + 1);
            let mut p = Rational::one();
            row.push(p.clone());
            for a in 1..=k {
                p = p * c / int(a as i64);
                row.push(p.clone());
            }
            row
        })
        .collect();
    let kfact = factorial(k as usize);
    let mut exps = vec![0u32; form.len()];
    expand(&form, &powers, 0, k, &mut exps, &kfact, &mut out);
    out
}

fn expand(
    form: &[(VarId, Rational)],
    powers: &[Vec<Rational>],
    t: usize,
    left: u32,
    exps: &mut Vec<u32>,
    scale: &Rational,
    out: &mut RationalPoly,
) {
    if t + 1 == form.len() {
        exps[t] = left;
        let mut c = scale.clone();
        for (s, &a) in exps.iter().enumerate() {
            c *= &powers[s][a as usize];
        }
        let m = Monomial(
            form.iter()
                .zip(exps.iter())
                .filter(|(_, &a)| a > 0)
                .map(|((v, _), &a)| (*v, a))
                .collect(),
        );
        out.add_term(m, c);
        return;
    }
    for a in 0..=left {
        exps[t] = a;
        expand(form, powers, t + 1, left - a, exps, scale, out);
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty())
    }
}

impl fmt::Debug for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty())
    }
}

impl AddAssign<&RationalPoly> for RationalPoly {
    fn add_assign(&mut self, rhs: &RationalPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl AddAssign<RationalPoly> for RationalPoly {
    fn add_assign(&mut self, rhs: RationalPoly) {
        if self.terms.len() < rhs.terms.len() {
            let lhs = std::mem::replace(self, rhs);
            for (m, c) in lhs.terms {
                self.add_term(m, c);
            }
        } else {
            for (m, c) in rhs.terms {
                self.add_term(m, c);
            }
        }
    }
}

impl SubAssign<&RationalPoly> for RationalPoly {
    fn sub_assign(&mut self, rhs: &RationalPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;

    fn neg(self) -> RationalPoly {
        RationalPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Neg for RationalPoly {
    type Output = RationalPoly;

    fn neg(self) -> RationalPoly {
        -&self
    }
}

impl Add for &RationalPoly {
    type Output = RationalPoly;

    fn add(self, rhs: &RationalPoly) -> RationalPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &RationalPoly {
    type Output = RationalPoly;

    fn sub(self, rhs: &RationalPoly) -> RationalPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul for &RationalPoly {
    type Output = RationalPoly;

    fn mul(self, rhs: &RationalPoly) -> RationalPoly {
        let mut out = RationalPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<RationalPoly> for RationalPoly {
            type Output = RationalPoly;
            fn $method(self, rhs: RationalPoly) -> RationalPoly {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&RationalPoly> for RationalPoly {
            type Output = RationalPoly;
            fn $method(self, rhs: &RationalPoly) -> RationalPoly {
                (&self).$method(rhs)
            }
        }
        impl $tr<RationalPoly> for &RationalPoly {
            type Output = RationalPoly;
            fn $method(self, rhs: RationalPoly) -> RationalPoly {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl std::iter::Sum for RationalPoly {
    fn sum<I: Iterator<Item = RationalPoly>>(iter: I) -> Self {
        iter.fold(RationalPoly::zero(), |mut acc, p| {
            acc += p;
            acc
        })
    }
}

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Integer polynomial, coefficients from the constant term up.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigInt::zero());
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn lead(&self) -> &BigInt {
        self.coeffs.last().expect("nonempty")
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer(c.clone()))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Exact quotient by a divisor, if the division leaves no remainder in ℤ[x].
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() || d.degree() > self.degree() {
            return if self.is_zero() { Some(self.clone()) } else { None };
        }
        let mut rem = self.coeffs.clone();
        let dl = d.lead();
        let mut q = vec![BigInt::zero(); self.degree() - d.degree() + 1];
        for k in (0..q.len()).rev() {
            let top = &rem[k + d.degree()];
            let (qk, r) = top.div_rem(dl);
            if !r.is_zero() {
                return None;
            }
            for (i, dc) in d.coeffs.iter().enumerate() {
                rem[k + i] -= &qk * dc;
            }
            q[k] = qk;
        }
        rem.iter().all(Zero::is_zero).then(|| Self::new(q))
    }

    /// Gcd of the coefficients, made positive.
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive(&self) -> Self {
        let mut g = self.content();
        if g.is_zero() {
            return self.clone();
        }
        if self.lead().is_negative() {
            g = -g;
        }
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// Multiplicity of the root 0, and the polynomial with it removed.
    pub fn strip_x(&self) -> (usize, Self) {
        if self.is_zero() {
            return (0, self.clone());
        }
        let k = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        (k, Self::new(self.coeffs[k..].to_vec()))
    }

    /// Rational roots with multiplicity, by the rational root theorem.
    /// Returns the roots and the remaining cofactor (primitive).
    pub fn rational_roots(&self) -> (Vec<(BigRational, usize)>, Self) {
        let (zeros, mut rest) = self.strip_x();
        let mut roots = Vec::new();
        if zeros > 0 {
            roots.push((BigRational::zero(), zeros));
        }
        rest = rest.primitive();
        if rest.degree() == 0 {
            return (roots, rest);
        }
        let (Some(ps), Some(qs)) = (divisors(&rest.coeffs[0]), divisors(rest.lead())) else {
            return (roots, rest);
        };
        let mut candidates: Vec<BigRational> = Vec::new();
        for p in &ps {
            for q in &qs {
                for s in [p.clone(), -p.clone()] {
                    let r = BigRational::new(s, q.clone());
                    if !candidates.contains(&r) {
                        candidates.push(r);
                    }
                }
            }
        }
        candidates.sort();
        for r in candidates {
            let linear = Self::new(vec![-r.numer().clone(), r.denom().clone()]);
            let mut mult = 0;
            while rest.degree() > 0 {
                match rest.div_exact(&linear) {
                    Some(q) => {
                        rest = q;
                        mult += 1;
                    }
                    None => break,
                }
            }
            if mult > 0 {
                roots.push((r, mult));
            }
        }
        (roots, rest.primitive())
    }

    /// Square-free factorization (Yun): factors paired with multiplicities.
    pub fn squarefree_factors(&self) -> Vec<(Self, usize)> {
        if self.degree() == 0 {
            return Vec::new();
        }
        let f = RatPoly::from_int(self);
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div(&a0);
        let mut d = df.div(&a0).sub(&b.derivative());
        let mut out = Vec::new();
        let mut i = 1;
        while b.degree() > 0 {
            let a = b.gcd(&d);
            b = b.div(&a);
            d = d.div(&a).sub(&b.derivative());
            if a.degree() > 0 {
                out.push((a.to_int(), i));
            }
            i += 1;
        }
        out
    }

    /// The `k`-th cyclotomic polynomial.
    pub fn cyclotomic(k: u32) -> Self {
        let mut p = {
            let mut c = vec![BigInt::zero(); k as usize + 1];
            c[0] = -BigInt::one();
            c[k as usize] = BigInt::one();
            Self::new(c)
        };
        for d in 1..k {
            if k.is_multiple_of(d) {
                p = p.div_exact(&Self::cyclotomic(d)).expect("cyclotomic divisibility");
            }
        }
        p
    }

    /// Splits off every cyclotomic factor `Φ_k` with `φ(k) ≤ degree`; returns
    /// the cyclotomic part and the remainder. Roots of the cyclotomic part lie
    /// exactly on the unit circle.
    pub fn split_cyclotomic(&self) -> (Self, Self) {
        let mut rest = self.primitive();
        let mut cyc = Self::from_i64(&[1]);
        // φ(k) ≥ sqrt(k/2), so k ≤ 2·deg² covers every candidate.
        let bound = (2 * self.degree() * self.degree()).max(2) as u32;
        for k in 1..=bound {
            let phi = Self::cyclotomic(k);
            if phi.degree() > rest.degree() {
                continue;
            }
            while rest.degree() > 0 {
                match rest.div_exact(&phi) {
                    Some(q) => {
                        rest = q;
                        cyc = cyc.mul(&phi);
                    }
                    None => break,
                }
            }
        }
        (cyc, rest)
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

/// Positive divisors of `n`, if `|n|` is small enough to factor by trial division.
fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs().to_u64()?;
    if n == 0 || n > 1 << 40 {
        return None;
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(BigInt::from(d));
            if d * d != n {
                large.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Some(small)
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            match (first, c.is_negative()) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            first = false;
            if i == 0 || !mag.is_one() {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Dense polynomial over ℚ, used for gcds.
#[derive(Clone, Debug)]
struct RatPoly(Vec<BigRational>);

impl RatPoly {
    fn from_int(p: &IntPoly) -> Self {
        Self(p.coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect()).trim()
    }

    fn trim(mut self) -> Self {
        while self.0.len() > 1 && self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        if self.0.is_empty() {
            self.0.push(BigRational::zero());
        }
        self
    }

    fn degree(&self) -> usize {
        self.0.len() - 1
    }

    fn is_zero(&self) -> bool {
        self.0.len() == 1 && self.0[0].is_zero()
    }

    fn derivative(&self) -> Self {
        Self(self.0.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect()).trim()
    }

    fn sub(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        Self(
            (0..n)
                .map(|i| {
                    let a = self.0.get(i).cloned().unwrap_or_else(BigRational::zero);
                    let b = other.0.get(i).cloned().unwrap_or_else(BigRational::zero);
                    a - b
                })
                .collect(),
        )
        .trim()
    }

    fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero());
        let mut rem = self.0.clone();
        if self.degree() < d.degree() || self.is_zero() {
            return (Self(vec![BigRational::zero()]), self.clone());
        }
        let dl = d.0.last().expect("nonempty");
        let mut q = vec![BigRational::zero(); self.degree() - d.degree() + 1];
        for k in (0..q.len()).rev() {
            let qk = &rem[k + d.degree()] / dl;
            for (i, dc) in d.0.iter().enumerate() {
                rem[k + i] -= &qk * dc;
            }
            q[k] = qk;
        }
        rem.truncate(d.degree().max(1));
        (Self(q).trim(), Self(rem).trim())
    }

    fn div(&self, d: &Self) -> Self {
        self.div_rem(d).0
    }

    fn monic(self) -> Self {
        let l = self.0.last().cloned().expect("nonempty");
        if l.is_zero() {
            return self;
        }
        Self(self.0.into_iter().map(|c| c / &l).collect())
    }

    fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    fn to_int(&self) -> IntPoly {
        let l = self.0.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        IntPoly::new(self.0.iter().map(|c| (c * &l).to_integer()).collect()).primitive()
    }
}

//! Exact integer polynomials and the closed-form counting results:
//! weighted-tree and forest counts, Poincare and characteristic
//! polynomials, region counts and Stirling numbers of the first kind.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::nbc::EdgeCountProfile;

/// A polynomial in one variable `q` with exact integer coefficients,
/// ascending powers, no trailing zero (the zero polynomial is empty).
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    /// The monomial `c * q^k`.
    pub fn monomial(c: BigInt, k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// `q`
    pub fn variable() -> Self {
        Self::monomial(BigInt::one(), 1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![BigInt::zero(); len];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        Self::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Horner evaluation at an integer point.
    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match k {
                0 => write!(f, "{}", mag)?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{}*", mag)?;
                    }
                    if k == 1 {
                        write!(f, "q")?;
                    } else {
                        write!(f, "q^{}", k)?;
                    }
                }
            }
        }
        Ok(())
    }
}

// JSON form: array of decimal coefficient strings, ascending powers.
impl Serialize for IntPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let strings: Vec<String> = self.coeffs.iter().map(BigInt::to_string).collect();
        strings.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let strings = Vec::<String>::deserialize(d)?;
        let coeffs = strings
            .iter()
            .map(|s| s.parse::<BigInt>().map_err(D::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(IntPolynomial::new(coeffs))
    }
}

/// Unsigned Stirling number of the first kind `|s(n,k)|`, by the
/// recurrence `|s(n,k)| = |s(n-1,k-1)| + (n-1)|s(n-1,k)|`.
pub fn stirling1_unsigned(n: usize, k: usize) -> Result<BigUint> {
    if k > n {
        return Err(Error::Internal(format!("stirling1: k={} > n={}", k, n)));
    }
    let mut row = vec![BigUint::one()]; // |s(0,0)|
    for m in 1..=n {
        let mut next = vec![BigUint::zero(); m + 1];
        for (j, item) in next.iter_mut().enumerate() {
            let mut v = BigUint::zero();
            if j >= 1 {
                v += &row[j - 1];
            }
            if j < row.len() {
                v += BigUint::from(m - 1) * &row[j];
            }
            *item = v;
        }
        row = next;
    }
    Ok(row[k].clone())
}

/// Number of rooted labelled trees on `[n]` with weights in `[1,alpha]`
/// on parent<child edges and `[1,beta]` on parent>child edges:
/// the product of `n*beta + (alpha-beta)*i` for `i = 1..n-1`.
pub fn ab_tree_count(n: usize, alpha: u64, beta: u64) -> Result<BigUint> {
    if n < 1 {
        return Err(Error::BadVertexCount(n));
    }
    let mut acc = BigInt::one();
    for i in 1..n {
        acc *= BigInt::from(n as u64 * beta) + (BigInt::from(alpha) - BigInt::from(beta)) * i;
    }
    acc.try_into()
        .map_err(|_| Error::Internal("negative tree count".into()))
}

/// The forest generating polynomial
/// `F(q) = (-1)^(n-1) * prod_{i=1}^{n-1} (n*beta - q + (alpha-beta)*i)`,
/// whose coefficient form is `sum_j (-1)^(n-j) f_{n,j} q^(j-1)` with
/// `f_{n,j}` the number of weighted rooted forests with `j` trees.
pub fn ab_forest_polynomial(n: usize, alpha: u64, beta: u64) -> Result<IntPolynomial> {
    if n < 1 {
        return Err(Error::BadVertexCount(n));
    }
    let mut acc = IntPolynomial::one();
    for i in 1..n {
        let c = BigInt::from(n as u64 * beta) + (BigInt::from(alpha) - BigInt::from(beta)) * i;
        let factor = IntPolynomial::new(vec![c, BigInt::from(-1)]);
        acc = acc.mul(&factor);
    }
    if (n - 1) % 2 == 1 {
        acc = acc.neg();
    }
    Ok(acc)
}

/// The Poincare polynomial of the profile: `sum_j counts[j] q^j`,
/// including the `j = 0` term for the empty forest. Its value at 1 is the
/// region count.
pub fn poincare(profile: &EdgeCountProfile) -> IntPolynomial {
    let mut coeffs = vec![BigInt::zero(); profile.n];
    for (&j, c) in &profile.counts {
        if j >= coeffs.len() {
            coeffs.resize(j + 1, BigInt::zero());
        }
        coeffs[j] = BigInt::from(c.clone());
    }
    IntPolynomial::new(coeffs)
}

/// The characteristic polynomial obtained from a Poincare polynomial:
/// `chi(q) = q^n * Poin(-1/q) = sum_j P_j (-1)^j q^(n-j)`.
pub fn charpoly_from_poincare(p: &IntPolynomial, n: usize) -> Result<IntPolynomial> {
    if let Some(d) = p.degree() {
        if d > n {
            return Err(Error::DegreeTooLarge { degree: d, bound: n });
        }
    }
    let mut coeffs = vec![BigInt::zero(); n + 1];
    for (j, c) in p.coeffs().iter().enumerate() {
        let mut v = c.clone();
        if j % 2 == 1 {
            v = -v;
        }
        coeffs[n - j] = v;
    }
    Ok(IntPolynomial::new(coeffs))
}

fn check_gain_sum(a: i64, b: i64) -> Result<(u64, u64)> {
    if a > b {
        return Err(Error::EmptyGainInterval { a, b });
    }
    if a + b != 0 && a + b != 1 {
        return Err(Error::UnsupportedGainSum { a, b });
    }
    // a+b in {0,1} with a <= b forces a <= 0 < 1 - a and b >= 0
    Ok(((1 - a) as u64, b as u64))
}

/// The full characteristic polynomial `q * F_{n,1-a,b}(q)` of the
/// arrangement of `K_n^{ab}`, for `a+b` in `{0,1}`.
pub fn charpoly_closed_form(n: usize, a: i64, b: i64) -> Result<IntPolynomial> {
    Ok(IntPolynomial::variable().mul(&charpoly_closed_form_reduced(n, a, b)?))
}

/// The reduced variant without the leading factor `q`, i.e.
/// `F_{n,1-a,b}(q)` itself.
pub fn charpoly_closed_form_reduced(n: usize, a: i64, b: i64) -> Result<IntPolynomial> {
    let (alpha, beta) = check_gain_sum(a, b)?;
    ab_forest_polynomial(n, alpha, beta)
}

/// Region count of the arrangement of `K_n^{ab}` for `a+b` in `{0,1}`:
/// `(bn+2)(bn+3)...(bn+n)` when `a+b = 0` and `(bn+1)^(n-1)` when
/// `a+b = 1`.
pub fn region_count(n: usize, a: i64, b: i64) -> Result<BigUint> {
    check_gain_sum(a, b)?;
    let bn = BigUint::from((b as u64) * n as u64);
    if a + b == 0 {
        let mut acc = BigUint::one();
        for k in 2..=n as u64 {
            acc *= &bn + BigUint::from(k);
        }
        Ok(acc)
    } else {
        Ok((&bn + BigUint::one()).pow(n as u32 - 1))
    }
}

/// Number of decreasing forests on `n` vertices with `k` edges and `span`
/// label choices per edge: `|s(n, n-k)| * span^k`.
pub fn decreasing_forest_count(n: usize, k: usize, span: u64) -> Result<BigUint> {
    if n == 0 || k >= n {
        return Err(Error::Internal(format!(
            "decreasing_forest_count: need 0 <= k < n, got n={}, k={}",
            n, k
        )));
    }
    Ok(stirling1_unsigned(n, n - k)? * BigUint::from(span).pow(k as u32))
}

/// The two-group tree count: split edges into those weighted above `beta`
/// (a decreasing forest with `alpha - beta` choices per edge) and those
/// weighted in `[1,beta]`, giving
/// `sum_k |s(n,n-k)| (alpha-beta)^k (n*beta)^(n-1-k)`.
/// Requires `alpha >= beta`; must agree with [`ab_tree_count`].
pub fn ab_tree_count_by_split(n: usize, alpha: u64, beta: u64) -> Result<BigUint> {
    if n < 1 {
        return Err(Error::BadVertexCount(n));
    }
    if alpha < beta {
        return Err(Error::Internal("split argument needs alpha >= beta".into()));
    }
    let span = alpha - beta;
    let nb = BigUint::from(n as u64 * beta);
    let mut acc = BigUint::zero();
    for k in 0..n {
        let second = if n - 1 - k == 0 {
            BigUint::one()
        } else {
            nb.pow((n - 1 - k) as u32)
        };
        acc += decreasing_forest_count(n, k, span)? * second;
    }
    Ok(acc)
}

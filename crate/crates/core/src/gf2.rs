//! Multilinear polynomials over GF(2) and their truth tables.
//!
//! Both views store `2^n` bits in 64-bit words. In a [`Gf2Poly`] bit `S`
//! (a subset mask) is the coefficient of `prod_{s in S} x_s`; in a
//! [`TruthTable`] bit `b = sum x_i 2^(i-1)` is the value at that input. The
//! two are exchanged by the subset-lattice Moebius transform, which over GF(2)
//! is its own inverse.

use std::fmt;
use std::ops::{Add, BitAnd, BitXor, Mul, Not};

use crate::error::{Error, Result};
use crate::tree::Triple;

/// Largest supported variable count (2^24 bits per table).
pub const MAX_GF2_VARS: usize = 24;

const LOW_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Bits {
    n: usize,
    words: Vec<u64>,
}

fn word_count(n: usize) -> usize {
    if n <= 6 {
        1
    } else {
        1 << (n - 6)
    }
}

fn used_mask(n: usize) -> u64 {
    if n >= 6 {
        u64::MAX
    } else {
        (1u64 << (1 << n)) - 1
    }
}

impl Bits {
    fn zero(n: usize) -> Self {
        assert!(
            n <= MAX_GF2_VARS,
            "at most {MAX_GF2_VARS} variables are supported"
        );
        Bits {
            n,
            words: vec![0; word_count(n)],
        }
    }

    fn get(&self, idx: usize) -> bool {
        self.words[idx >> 6] >> (idx & 63) & 1 == 1
    }

    fn set(&mut self, idx: usize, value: bool) {
        let bit = 1u64 << (idx & 63);
        if value {
            self.words[idx >> 6] |= bit;
        } else {
            self.words[idx >> 6] &= !bit;
        }
    }

    fn map(&self, f: impl Fn(u64) -> u64) -> Self {
        let mask = used_mask(self.n);
        Bits {
            n: self.n,
            words: self.words.iter().map(|&w| f(w) & mask).collect(),
        }
    }

    fn zip(&self, other: &Bits, f: impl Fn(u64, u64) -> u64) -> Self {
        let (a, b) = align(self, other);
        Bits {
            n: a.n,
            words: a
                .words
                .iter()
                .zip(&b.words)
                .map(|(&x, &y)| f(x, y))
                .collect(),
        }
    }

    /// Embeds into `m >= n` variables, keeping indices.
    fn extend(&self, m: usize) -> Bits {
        assert!(m >= self.n);
        let mut out = Bits::zero(m);
        out.words[..self.words.len()].copy_from_slice(&self.words);
        out
    }

    /// Moebius (equivalently zeta) transform over the subset lattice.
    fn mobius(&mut self) {
        for i in 0..self.n {
            if i < 6 {
                let (s, m) = (1u32 << i, LOW_MASKS[i]);
                for w in &mut self.words {
                    *w ^= (*w & m) << s;
                }
            } else {
                let stride = 1usize << (i - 6);
                for k in 0..self.words.len() {
                    if k & stride == 0 {
                        let lo = self.words[k];
                        self.words[k + stride] ^= lo;
                    }
                }
            }
        }
    }

    /// `out[S] = self[S ∪ {i}]` for `i ∉ S`, zero otherwise.
    fn shift_down(&self, i: usize) -> Bits {
        if i < 6 {
            let (s, m) = (1u32 << i, LOW_MASKS[i]);
            self.map(|w| (w >> s) & m)
        } else {
            let stride = 1usize << (i - 6);
            let mut out = Bits::zero(self.n);
            for k in 0..self.words.len() {
                if k & stride == 0 {
                    out.words[k] = self.words[k + stride];
                }
            }
            out
        }
    }

    /// `out[x] = self[x with bit i forced to value]`.
    fn fix(&self, i: usize, value: bool) -> Bits {
        if i < 6 {
            let (s, m) = (1u32 << i, LOW_MASKS[i]);
            if value {
                self.map(|w| {
                    let hi = w & !m;
                    hi | (hi >> s)
                })
            } else {
                self.map(|w| {
                    let lo = w & m;
                    lo | (lo << s)
                })
            }
        } else {
            let stride = 1usize << (i - 6);
            let mut out = Bits::zero(self.n);
            for k in 0..self.words.len() {
                let src = if value { k | stride } else { k & !stride };
                out.words[k] = self.words[src];
            }
            out
        }
    }

    /// `out[x] = self[x ^ e_i]`.
    fn flip(&self, i: usize) -> Bits {
        if i < 6 {
            let (s, m) = (1u32 << i, LOW_MASKS[i]);
            self.map(|w| ((w >> s) & m) | ((w & m) << s))
        } else {
            let stride = 1usize << (i - 6);
            let mut out = Bits::zero(self.n);
            for k in 0..self.words.len() {
                out.words[k] = self.words[k ^ stride];
            }
            out
        }
    }

    fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn to_hex(&self) -> String {
        let digits = ((1usize << self.n) / 4).max(1);
        let mut s = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let nibble = (self.words[d / 16] >> ((d % 16) * 4)) & 0xF;
            s.push(char::from_digit(nibble as u32, 16).expect("nibble"));
        }
        s
    }

    fn from_hex(n: usize, text: &str) -> Result<Bits> {
        let text = text.trim();
        let text = text.strip_prefix("0x").unwrap_or(text);
        let digits = ((1usize << n) / 4).max(1);
        let bad = |msg: String| Error::Syntax { pos: 0, msg };
        if text.is_empty() || text.len() > digits {
            return Err(bad(format!(
                "expected at most {digits} hex digits for {n} variables"
            )));
        }
        let mut out = Bits::zero(n);
        for (d, c) in text.chars().rev().enumerate() {
            let nibble =
                c.to_digit(16)
                    .ok_or_else(|| bad(format!("invalid hex digit '{c}'")))? as u64;
            out.words[d / 16] |= nibble << ((d % 16) * 4);
        }
        if out.words[0] & !used_mask(n) != 0 {
            return Err(bad(format!("value too wide for {n} variables")));
        }
        Ok(out)
    }
}

fn align(a: &Bits, b: &Bits) -> (Bits, Bits) {
    let m = a.n.max(b.n);
    (
        if a.n == m { a.clone() } else { a.extend(m) },
        if b.n == m { b.clone() } else { b.extend(m) },
    )
}

/// Values of a function `{0,1}^n -> {0,1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruthTable(Bits);

/// A polynomial in `Z_2[x_1..x_n]/(x_i^2 - x_i)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gf2Poly(Bits);

impl TruthTable {
    pub fn zero(n: usize) -> Self {
        TruthTable(Bits::zero(n))
    }

    pub fn one(n: usize) -> Self {
        !TruthTable::zero(n)
    }

    /// The projection `x_{i+1}` (variable index `i` counted from zero).
    pub fn var(n: usize, i: usize) -> Self {
        assert!(i < n, "variable {i} out of range");
        TruthTable::from_fn(n, |x| x >> i & 1 == 1)
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> bool) -> Self {
        let mut bits = Bits::zero(n);
        for x in 0..1usize << n {
            if f(x) {
                bits.set(x, true);
            }
        }
        TruthTable(bits)
    }

    /// Builds a table from its value list, index = input.
    pub fn from_bits(values: &[u8]) -> Result<Self> {
        let n = values.len().trailing_zeros() as usize;
        if values.len() != 1 << n {
            return Err(Error::ArityMismatch {
                expected: 1 << n,
                found: values.len(),
            });
        }
        Ok(TruthTable::from_fn(n, |x| values[x] != 0))
    }

    /// Tables with `n <= 6` packed into the low `2^n` bits of a word.
    pub fn from_word(n: usize, word: u64) -> Self {
        assert!(n <= 6);
        let mut bits = Bits::zero(n);
        bits.words[0] = word & used_mask(n);
        TruthTable(bits)
    }

    pub fn as_word(&self) -> Option<u64> {
        (self.0.n <= 6).then(|| self.0.words[0])
    }

    pub fn arity(&self) -> usize {
        self.0.n
    }

    pub fn get(&self, input: usize) -> bool {
        self.0.get(input)
    }

    pub fn values(&self) -> Vec<u8> {
        (0..1usize << self.0.n).map(|x| self.get(x) as u8).collect()
    }

    pub fn is_constant(&self) -> bool {
        self.0.is_zero() || (!self.clone()).0.is_zero()
    }

    pub fn count_ones(&self) -> usize {
        self.0.count_ones()
    }

    /// The same function viewed on `n >= arity` inputs (ignoring the new ones).
    pub fn extend(&self, n: usize) -> Self {
        let mut bits = self.0.extend(n);
        for i in self.0.n..n {
            bits.n = i + 1;
            bits = bits.fix(i, false);
        }
        bits.n = n;
        TruthTable(bits)
    }

    fn aligned(&self, other: &TruthTable) -> (TruthTable, TruthTable) {
        let m = self.arity().max(other.arity());
        (self.extend(m), other.extend(m))
    }

    /// Restriction with variable `i` fixed to `value` (still an `n`-ary table).
    pub fn fix(&self, i: usize, value: bool) -> Self {
        TruthTable(self.0.fix(i, value))
    }

    /// `P(x + e_i)`.
    pub fn flip(&self, i: usize) -> Self {
        TruthTable(self.0.flip(i))
    }

    /// Pointwise discrete derivative `P(x + e_i) + P(x)`.
    pub fn difference(&self, i: usize) -> Self {
        TruthTable(self.0.flip(i).zip(&self.0, |a, b| a ^ b))
    }

    pub fn depends_on(&self, i: usize) -> bool {
        !self.difference(i).0.is_zero()
    }

    pub fn to_hex(&self) -> String {
        self.0.to_hex()
    }

    pub fn from_hex(n: usize, text: &str) -> Result<Self> {
        Ok(TruthTable(Bits::from_hex(n, text)?))
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable({}, 0x{})", self.0.n, self.to_hex())
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Not for TruthTable {
    type Output = TruthTable;
    fn not(self) -> TruthTable {
        TruthTable(self.0.map(|w| !w))
    }
}

impl BitAnd for &TruthTable {
    type Output = TruthTable;
    fn bitand(self, rhs: &TruthTable) -> TruthTable {
        let (a, b) = self.aligned(rhs);
        TruthTable(a.0.zip(&b.0, |x, y| x & y))
    }
}

impl BitXor for &TruthTable {
    type Output = TruthTable;
    fn bitxor(self, rhs: &TruthTable) -> TruthTable {
        let (a, b) = self.aligned(rhs);
        TruthTable(a.0.zip(&b.0, |x, y| x ^ y))
    }
}

/// Unique multilinear polynomial agreeing with `tt` on `{0,1}^n`.
pub fn anf_from_truth_table(tt: &TruthTable) -> Gf2Poly {
    let mut bits = tt.0.clone();
    bits.mobius();
    Gf2Poly(bits)
}

/// Pointwise evaluation of `p` on `{0,1}^n`.
pub fn truth_table_from_anf(p: &Gf2Poly) -> TruthTable {
    let mut bits = p.0.clone();
    bits.mobius();
    TruthTable(bits)
}

impl Gf2Poly {
    pub fn zero(n: usize) -> Self {
        Gf2Poly(Bits::zero(n))
    }

    pub fn one(n: usize) -> Self {
        Gf2Poly::monomial(n, 0)
    }

    /// `x_{i+1}`.
    pub fn var(n: usize, i: usize) -> Self {
        assert!(i < n, "variable {i} out of range");
        Gf2Poly::monomial(n, 1 << i)
    }

    /// The monomial over the variable subset `mask`.
    pub fn monomial(n: usize, mask: usize) -> Self {
        let mut bits = Bits::zero(n);
        assert!(mask < 1 << n, "monomial mask out of range");
        bits.set(mask, true);
        Gf2Poly(bits)
    }

    pub fn arity(&self) -> usize {
        self.0.n
    }

    pub fn coefficient(&self, mask: usize) -> bool {
        self.0.get(mask)
    }

    /// Subset masks of the monomials present, ascending.
    pub fn monomials(&self) -> Vec<usize> {
        (0..1usize << self.0.n).filter(|&m| self.0.get(m)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn degree(&self) -> Option<u32> {
        self.monomials().into_iter().map(|m| m.count_ones()).max()
    }

    pub fn extend(&self, n: usize) -> Self {
        Gf2Poly(self.0.extend(n))
    }

    pub fn truth_table(&self) -> TruthTable {
        truth_table_from_anf(self)
    }

    /// Value at the input whose bit `i` is `x_{i+1}`.
    pub fn eval(&self, input: usize) -> bool {
        self.monomials()
            .into_iter()
            .filter(|&m| m & input == m)
            .count()
            % 2
            == 1
    }

    /// Formal partial derivative in variable index `i`; equals `P(x + e_i) + P(x)`.
    pub fn derivative(&self, i: usize) -> Gf2Poly {
        assert!(i < self.0.n, "variable {i} out of range");
        Gf2Poly(self.0.shift_down(i))
    }

    /// Parses the ANF text format: `"+"`-separated monomials, each `1` or
    /// `x<i>*x<j>*...`. `0` denotes the zero polynomial.
    pub fn parse(text: &str, n: usize) -> Result<Gf2Poly> {
        Gf2Poly::parse_with(text, n, |name| crate::tree::x_index(name).map(|k| k - 1))
    }

    /// As [`Gf2Poly::parse`] with a custom variable-name resolver.
    pub fn parse_with(
        text: &str,
        n: usize,
        resolve: impl Fn(&str) -> Option<usize>,
    ) -> Result<Gf2Poly> {
        let mut out = Gf2Poly::zero(n);
        let mut offset = 0;
        for term in text.split('+') {
            let pos = offset + term.len() - term.trim_start().len();
            offset += term.len() + 1;
            let term = term.trim();
            if term.is_empty() {
                return Err(Error::Syntax {
                    pos,
                    msg: "empty monomial".into(),
                });
            }
            if term == "0" {
                continue;
            }
            let mut mask = 0usize;
            for factor in term.split('*').map(str::trim) {
                if factor == "1" {
                    continue;
                }
                let i = resolve(factor).ok_or_else(|| Error::Syntax {
                    pos,
                    msg: format!("unknown variable '{factor}'"),
                })?;
                if i >= n {
                    return Err(Error::VariableOutOfRange { index: i + 1, n });
                }
                mask |= 1 << i;
            }
            out.0.set(mask, !out.0.get(mask));
        }
        Ok(out)
    }

    /// Renders with custom variable names.
    pub fn display_with(&self, names: &[String]) -> String {
        let mut monos = self.monomials();
        if monos.is_empty() {
            return "0".into();
        }
        monos.sort_by_key(|&m| (std::cmp::Reverse(m.count_ones()), bit_order_key(m)));
        monos
            .into_iter()
            .map(|m| {
                if m == 0 {
                    "1".to_string()
                } else {
                    (0..self.0.n)
                        .filter(|i| m >> i & 1 == 1)
                        .map(|i| names[i].as_str())
                        .collect::<Vec<_>>()
                        .join("*")
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Lexicographic order on the sorted index lists of two masks.
fn bit_order_key(mask: usize) -> Vec<u32> {
    (0..usize::BITS).filter(|i| mask >> i & 1 == 1).collect()
}

impl fmt::Display for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&crate::tree::standard_vars(self.0.n)))
    }
}

impl fmt::Debug for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Poly({}; {})", self.0.n, self)
    }
}

/// Ring addition; arities are unified by embedding into the larger one.
pub fn gf2_add(p: &Gf2Poly, q: &Gf2Poly) -> Gf2Poly {
    Gf2Poly(p.0.zip(&q.0, |a, b| a ^ b))
}

/// Ring multiplication with `x_i^2` reduced to `x_i`.
///
/// Multiplication in the quotient ring is pointwise multiplication of the
/// associated functions, so the product is formed on truth tables.
pub fn gf2_mul(p: &Gf2Poly, q: &Gf2Poly) -> Gf2Poly {
    let m = p.arity().max(q.arity());
    anf_from_truth_table(&(&p.extend(m).truth_table() & &q.extend(m).truth_table()))
}

pub fn gf2_derivative(p: &Gf2Poly, i: usize) -> Gf2Poly {
    p.derivative(i)
}

impl Add for &Gf2Poly {
    type Output = Gf2Poly;
    fn add(self, rhs: &Gf2Poly) -> Gf2Poly {
        gf2_add(self, rhs)
    }
}

impl Mul for &Gf2Poly {
    type Output = Gf2Poly;
    fn mul(self, rhs: &Gf2Poly) -> Gf2Poly {
        gf2_mul(self, rhs)
    }
}

fn check_triple(n: usize, t: &Triple) -> Result<()> {
    for v in [t.i, t.j, t.l] {
        if v >= n {
            return Err(Error::VariableOutOfRange { index: v, n });
        }
    }
    if t.i == t.j || t.i == t.l || t.j == t.l {
        return Err(Error::InvalidTriple("indices must be distinct".into()));
    }
    Ok(())
}

/// `d2P/dx_i dx_l * dP/dx_j == d2P/dx_j dx_l * dP/dx_i` in the quotient ring.
pub fn discrete_constraint(p: &Gf2Poly, t: &Triple) -> Result<bool> {
    check_triple(p.arity(), t)?;
    let (di, dj) = (p.derivative(t.i), p.derivative(t.j));
    let lhs = &di.derivative(t.l) * &dj;
    let rhs = &dj.derivative(t.l) * &di;
    Ok(lhs == rhs)
}

/// The same constraint written with shifted evaluations of the function.
pub fn discrete_constraint_pointwise(tt: &TruthTable, t: &Triple) -> Result<bool> {
    check_triple(tt.arity(), t)?;
    let (di, dj) = (tt.difference(t.i), tt.difference(t.j));
    let lhs = &di.difference(t.l) & &dj;
    let rhs = &dj.difference(t.l) & &di;
    Ok(lhs == rhs)
}

//! Noncommutative polynomials over ℚ(√q) in the generator letters.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::exact::QSqrt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    R,
    L,
    S,
    K,
    KInv,
    /// Projection onto grade i.
    F(usize),
    /// A caller-supplied matrix, indexed into the evaluation alphabet.
    Ext(usize),
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::R => write!(f, "R"),
            Letter::L => write!(f, "L"),
            Letter::S => write!(f, "S"),
            Letter::K => write!(f, "K"),
            Letter::KInv => write!(f, "K^-1"),
            Letter::F(i) => write!(f, "F{i}"),
            Letter::Ext(k) => write!(f, "X{k}"),
        }
    }
}

/// A letter, possibly replaced by the literal transpose of its matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Factor {
    pub letter: Letter,
    pub transposed: bool,
}

impl Factor {
    pub fn plain(letter: Letter) -> Self {
        Factor {
            letter,
            transposed: false,
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.transposed {
            write!(f, "({})^t", self.letter)
        } else {
            write!(f, "{}", self.letter)
        }
    }
}

/// Words are products read left to right, so the rightmost factor acts first.
pub type Word = Vec<Factor>;

/// A finite ℚ(√q)-combination of words; the empty word is the identity.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Expr {
    terms: BTreeMap<Word, QSqrt>,
}

impl Expr {
    pub fn zero() -> Self {
        Expr::default()
    }

    pub fn one() -> Self {
        Expr::scalar(QSqrt::one())
    }

    pub fn scalar(c: QSqrt) -> Self {
        let mut e = Expr::zero();
        e.push(Vec::new(), c);
        e
    }

    pub fn int(n: i64) -> Self {
        Expr::scalar(QSqrt::int(n))
    }

    pub fn letter(l: Letter) -> Self {
        Expr::word(&[l])
    }

    pub fn word(letters: &[Letter]) -> Self {
        let mut e = Expr::zero();
        e.push(
            letters.iter().map(|&l| Factor::plain(l)).collect(),
            QSqrt::one(),
        );
        e
    }

    /// The literal transpose of one letter's matrix.
    pub fn transposed_letter(l: Letter) -> Self {
        let mut e = Expr::zero();
        e.push(
            vec![Factor {
                letter: l,
                transposed: true,
            }],
            QSqrt::one(),
        );
        e
    }

    fn push(&mut self, word: Word, c: QSqrt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(word) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &QSqrt)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn scale(&self, c: &QSqrt) -> Self {
        let mut e = Expr::zero();
        for (w, v) in &self.terms {
            e.push(w.clone(), v * c);
        }
        e
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Expr::one(), |acc, _| &acc * self)
    }

    /// The transpose computed letter by letter: the word is reversed and every
    /// factor is flipped to its literal transpose.
    pub fn transpose(&self) -> Self {
        let mut e = Expr::zero();
        for (w, v) in &self.terms {
            let tw: Word = w
                .iter()
                .rev()
                .map(|f| Factor {
                    letter: f.letter,
                    transposed: !f.transposed,
                })
                .collect();
            e.push(tw, v.clone());
        }
        e
    }

    /// Commutator [self, other].
    pub fn commutator(&self, other: &Expr) -> Self {
        &(self * other) - &(other * self)
    }

    /// Largest word length.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (w, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            if w.is_empty() {
                write!(f, "I")?;
            }
            for x in w {
                write!(f, "{x}")?;
            }
        }
        Ok(())
    }
}

impl Add<&Expr> for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        let mut e = self.clone();
        for (w, v) in &rhs.terms {
            e.push(w.clone(), v.clone());
        }
        e
    }
}

impl Sub<&Expr> for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        let mut e = self.clone();
        for (w, v) in &rhs.terms {
            e.push(w.clone(), -v);
        }
        e
    }
}

impl Mul<&Expr> for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        let mut e = Expr::zero();
        for (w1, v1) in &self.terms {
            for (w2, v2) in &rhs.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                e.push(w, v1 * v2);
            }
        }
        e
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.scale(&-QSqrt::one())
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                (&self).$m(rhs)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                self.$m(&rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn like_terms_merge_and_cancel() {
        let r = Expr::letter(Letter::R);
        let l = Expr::letter(Letter::L);
        let e = &(&r * &l) + &(&r * &l);
        assert_eq!(e.len(), 1);
        assert!((&e - &(&r * &l).scale(&QSqrt::int(2))).is_zero());
        assert!(r.commutator(&r).is_zero());
    }

    #[test]
    fn product_concatenates_words() {
        let e = Expr::word(&[Letter::R, Letter::L]) * Expr::letter(Letter::K);
        let (w, _) = e.terms().next().unwrap();
        let letters: Vec<Letter> = w.iter().map(|f| f.letter).collect();
        assert_eq!(letters, vec![Letter::R, Letter::L, Letter::K]);
    }

    #[test]
    fn transpose_reverses_and_flips() {
        let e = Expr::word(&[Letter::R, Letter::R, Letter::L]);
        let t = e.transpose();
        let (w, _) = t.terms().next().unwrap();
        assert_eq!(
            w.iter().map(|f| f.letter).collect::<Vec<_>>(),
            vec![Letter::L, Letter::R, Letter::R]
        );
        assert!(w.iter().all(|f| f.transposed));
        assert_eq!(t.transpose(), e);
    }

    #[test]
    fn powers_and_identity() {
        let r = Expr::letter(Letter::R);
        assert_eq!(r.pow(0), Expr::one());
        assert_eq!(r.pow(3), Expr::word(&[Letter::R; 3]));
        assert_eq!(r.pow(3).degree(), 3);
    }
}

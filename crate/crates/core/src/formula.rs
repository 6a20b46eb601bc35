//! Formulas and sequents of affine intuitionistic MALL with priced modalities.

use serde::{Deserialize, Serialize};

use crate::semiring::CostValue;

/// Permanent modalities can be derelicted any number of times, single-use
/// ones are consumed by their dereliction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModalKind {
    Permanent,
    SingleUse,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String),
    Zero,
    One,
    Tensor(Box<Formula>, Box<Formula>),
    With(Box<Formula>, Box<Formula>),
    Plus(Box<Formula>, Box<Formula>),
    Lolli(Box<Formula>, Box<Formula>),
    Modal { kind: ModalKind, price: CostValue, body: Box<Formula> },
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        let name = name.into();
        assert!(!name.is_empty(), "atom names are nonempty");
        Formula::Atom(name)
    }

    pub fn tensor(a: Formula, b: Formula) -> Formula {
        Formula::Tensor(Box::new(a), Box::new(b))
    }

    pub fn with(a: Formula, b: Formula) -> Formula {
        Formula::With(Box::new(a), Box::new(b))
    }

    pub fn plus(a: Formula, b: Formula) -> Formula {
        Formula::Plus(Box::new(a), Box::new(b))
    }

    pub fn lolli(a: Formula, b: Formula) -> Formula {
        Formula::Lolli(Box::new(a), Box::new(b))
    }

    pub fn permanent(price: CostValue, body: Formula) -> Formula {
        Formula::Modal { kind: ModalKind::Permanent, price, body: Box::new(body) }
    }

    pub fn single_use(price: CostValue, body: Formula) -> Formula {
        Formula::Modal { kind: ModalKind::SingleUse, price, body: Box::new(body) }
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Formula::Atom(_))
    }

    /// Top-level permanent modality `!p[a]A`.
    pub fn is_permanent(&self) -> bool {
        matches!(self, Formula::Modal { kind: ModalKind::Permanent, .. })
    }

    /// Number of connectives, counting modalities but not units or atoms.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Zero | Formula::One => 0,
            Formula::Tensor(a, b) | Formula::With(a, b) | Formula::Plus(a, b) | Formula::Lolli(a, b) => {
                1 + a.size() + b.size()
            }
            Formula::Modal { body, .. } => 1 + body.size(),
        }
    }

    pub fn has_modality(&self) -> bool {
        match self {
            Formula::Atom(_) | Formula::Zero | Formula::One => false,
            Formula::Tensor(a, b) | Formula::With(a, b) | Formula::Plus(a, b) | Formula::Lolli(a, b) => {
                a.has_modality() || b.has_modality()
            }
            Formula::Modal { .. } => true,
        }
    }

    /// Prices of all modal subformulas, in left-to-right order.
    pub fn prices(&self) -> Vec<CostValue> {
        let mut out = Vec::new();
        self.collect_prices(&mut out);
        out
    }

    fn collect_prices(&self, out: &mut Vec<CostValue>) {
        match self {
            Formula::Atom(_) | Formula::Zero | Formula::One => {}
            Formula::Tensor(a, b) | Formula::With(a, b) | Formula::Plus(a, b) | Formula::Lolli(a, b) => {
                a.collect_prices(out);
                b.collect_prices(out);
            }
            Formula::Modal { price, body, .. } => {
                out.push(price.clone());
                body.collect_prices(out);
            }
        }
    }

    /// First modal subformula that sits in positive position when the formula
    /// itself has polarity `negative`.
    fn positive_modal(&self, negative: bool) -> Option<&Formula> {
        match self {
            Formula::Atom(_) | Formula::Zero | Formula::One => None,
            Formula::Tensor(a, b) | Formula::With(a, b) | Formula::Plus(a, b) => {
                a.positive_modal(negative).or_else(|| b.positive_modal(negative))
            }
            // The antecedent of an implication flips polarity.
            Formula::Lolli(a, b) => a.positive_modal(!negative).or_else(|| b.positive_modal(negative)),
            Formula::Modal { body, .. } => {
                if negative {
                    body.positive_modal(negative)
                } else {
                    Some(self)
                }
            }
        }
    }

    pub fn atoms(&self, out: &mut Vec<String>) {
        match self {
            Formula::Atom(p) => {
                if !out.contains(p) {
                    out.push(p.clone())
                }
            }
            Formula::Zero | Formula::One => {}
            Formula::Tensor(a, b) | Formula::With(a, b) | Formula::Plus(a, b) | Formula::Lolli(a, b) => {
                a.atoms(out);
                b.atoms(out);
            }
            Formula::Modal { body, .. } => body.atoms(out),
        }
    }
}

/// `A1, ..., An |- C`. The antecedent is a multiset; positions are stable
/// occurrence indices used by proofs and game moves.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sequent {
    pub antecedent: Vec<Formula>,
    pub consequent: Formula,
}

impl Sequent {
    pub fn new(antecedent: Vec<Formula>, consequent: Formula) -> Sequent {
        Sequent { antecedent, consequent }
    }

    /// Antecedent sorted into the canonical occurrence order.
    pub fn canonical(&self) -> Sequent {
        let mut antecedent = self.antecedent.clone();
        antecedent.sort();
        Sequent { antecedent, consequent: self.consequent.clone() }
    }

    /// Equality up to the order of the antecedent.
    pub fn same_multiset(&self, other: &Sequent) -> bool {
        self.consequent == other.consequent && multiset_eq(&self.antecedent, &other.antecedent)
    }

    pub fn has_modality(&self) -> bool {
        self.consequent.has_modality() || self.antecedent.iter().any(Formula::has_modality)
    }

    /// The modal occurrence violating the extended-sequent condition, if any.
    pub fn positive_modal(&self) -> Option<&Formula> {
        self.antecedent
            .iter()
            .find_map(|f| f.positive_modal(true))
            .or_else(|| self.consequent.positive_modal(false))
    }

    pub fn size(&self) -> usize {
        self.consequent.size() + self.antecedent.iter().map(Formula::size).sum::<usize>()
    }

    pub fn prices(&self) -> Vec<CostValue> {
        let mut out: Vec<CostValue> = self.antecedent.iter().flat_map(Formula::prices).collect();
        out.extend(self.consequent.prices());
        out
    }
}

/// True iff every modal subformula of `s` occurs in negative polarity:
/// in the antecedent under an even number of implication antecedents, in the
/// consequent under an odd number.
pub fn check_extended(s: &Sequent) -> bool {
    s.positive_modal().is_none()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LabelledSequent {
    pub sequent: Sequent,
    pub label: CostValue,
}

impl LabelledSequent {
    pub fn new(sequent: Sequent, label: CostValue) -> LabelledSequent {
        LabelledSequent { sequent, label }
    }
}

pub(crate) fn multiset_eq<T: Ord + Clone>(a: &[T], b: &[T]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort();
    b.sort();
    a == b
}

/// A bijection `perm` with `to[perm[i]] == from[i]`, if the two agree as
/// multisets.
pub(crate) fn matching<T: PartialEq>(from: &[T], to: &[T]) -> Option<Vec<usize>> {
    if from.len() != to.len() {
        return None;
    }
    let mut used = vec![false; to.len()];
    let mut perm = Vec::with_capacity(from.len());
    for x in from {
        let j = (0..to.len()).find(|&j| !used[j] && to[j] == *x)?;
        used[j] = true;
        perm.push(j);
    }
    Some(perm)
}

/// `a - b` as multisets; `None` unless `b` is contained in `a`.
pub(crate) fn multiset_minus<T: Ord + Clone>(a: &[T], b: &[T]) -> Option<Vec<T>> {
    let mut rest = a.to_vec();
    for x in b {
        let i = rest.iter().position(|y| y == x)?;
        rest.remove(i);
    }
    Some(rest)
}

/// True when the sequent is not even a classical tautology once modalities
/// are dropped and the connectives read classically; such a sequent has no
/// proof. Sequents with more than six atoms are never reported.
pub(crate) fn classically_invalid<'a>(ante: impl IntoIterator<Item = &'a Formula> + Clone, cons: &'a Formula) -> bool {
    const COLUMNS: [u64; 6] = [
        0xAAAA_AAAA_AAAA_AAAA,
        0xCCCC_CCCC_CCCC_CCCC,
        0xF0F0_F0F0_F0F0_F0F0,
        0xFF00_FF00_FF00_FF00,
        0xFFFF_0000_FFFF_0000,
        0xFFFF_FFFF_0000_0000,
    ];
    fn atoms<'f>(f: &'f Formula, out: &mut Vec<&'f str>) -> bool {
        match f {
            Formula::Atom(a) => {
                if !out.contains(&a.as_str()) {
                    out.push(a);
                }
                out.len() <= COLUMNS.len()
            }
            Formula::Zero | Formula::One => true,
            Formula::Tensor(a, b) | Formula::With(a, b) | Formula::Plus(a, b) | Formula::Lolli(a, b) => atoms(a, out) && atoms(b, out),
            Formula::Modal { body, .. } => atoms(body, out),
        }
    }
    fn table(f: &Formula, names: &[&str]) -> u64 {
        match f {
            Formula::Atom(a) => COLUMNS[names.iter().position(|n| n == a).expect("collected atom")],
            Formula::Zero => 0,
            Formula::One => !0,
            Formula::Tensor(a, b) | Formula::With(a, b) => table(a, names) & table(b, names),
            Formula::Plus(a, b) => table(a, names) | table(b, names),
            Formula::Lolli(a, b) => !table(a, names) | table(b, names),
            Formula::Modal { body, .. } => table(body, names),
        }
    }
    let mut names = Vec::new();
    if !ante.clone().into_iter().chain([cons]).all(|f| atoms(f, &mut names)) {
        return false;
    }
    let rows = if names.len() == COLUMNS.len() { !0 } else { (1u64 << (1 << names.len())) - 1 };
    let premises = ante.into_iter().fold(!0, |acc, f| acc & table(f, &names));
    premises & !table(cons, &names) & rows != 0
}

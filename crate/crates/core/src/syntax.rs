//! Concrete syntax for formulas and sequents.
//!
//! ```text
//! formula  := plus ( "-o" formula )?            right associative, loosest
//! plus     := with ( "+" with )*
//! with     := tensor ( "&" tensor )*
//! tensor   := unary ( "*" unary )*              tightest binary
//! unary    := "!p[" L "]" unary | "!s[" L "]" unary
//!           | atom | "0" | "1" | "(" formula ")"
//! sequent  := ( formula ( "," formula )* )? "|-" ( "[" L "]" )? formula
//! ```
//!
//! Atoms are identifiers starting with a lowercase letter. `L` is a label
//! literal of the active semiring: a decimal, a fraction `n/d`, `inf`, `pub`
//! or `conf`.

use std::fmt;

use thiserror::Error;

use crate::formula::{check_extended, Formula, LabelledSequent, ModalKind, Sequent};
use crate::semiring::{Semiring, SemiringError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{line}:{column}: {source}")]
    Label { line: usize, column: usize, source: SemiringError },
    #[error("not an extended sequent: `{formula}` occurs in positive polarity")]
    PositiveModality { formula: String },
    #[error("expected an unlabelled sequent")]
    UnexpectedLabel,
    #[error("expected a labelled sequent `... |-[L] ...`")]
    MissingLabel,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Atom(String),
    Zero,
    One,
    Tensor,
    With,
    Plus,
    Lolli,
    LParen,
    RParen,
    Comma,
    Turnstile,
    Bang(ModalKind),
    Label(String),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Atom(a) => write!(f, "atom `{a}`"),
            Tok::Zero => f.write_str("`0`"),
            Tok::One => f.write_str("`1`"),
            Tok::Tensor => f.write_str("`*`"),
            Tok::With => f.write_str("`&`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Lolli => f.write_str("`-o`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Turnstile => f.write_str("`|-`"),
            Tok::Bang(ModalKind::Permanent) => f.write_str("`!p`"),
            Tok::Bang(ModalKind::SingleUse) => f.write_str("`!s`"),
            Tok::Label(l) => write!(f, "label `[{l}]`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    column: usize,
}

fn syntax(pos: Pos, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { line: pos.line, column: pos.column, message: message.into() }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let advance = |i: &mut usize, col: &mut usize, n: usize| {
        *i += n;
        *col += n;
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => advance(&mut i, &mut col, 1),
            '*' => {
                out.push((Tok::Tensor, pos));
                advance(&mut i, &mut col, 1);
            }
            '&' => {
                out.push((Tok::With, pos));
                advance(&mut i, &mut col, 1);
            }
            '+' => {
                out.push((Tok::Plus, pos));
                advance(&mut i, &mut col, 1);
            }
            '(' => {
                out.push((Tok::LParen, pos));
                advance(&mut i, &mut col, 1);
            }
            ')' => {
                out.push((Tok::RParen, pos));
                advance(&mut i, &mut col, 1);
            }
            ',' => {
                out.push((Tok::Comma, pos));
                advance(&mut i, &mut col, 1);
            }
            '-' if chars.get(i + 1) == Some(&'o') => {
                out.push((Tok::Lolli, pos));
                advance(&mut i, &mut col, 2);
            }
            '|' if chars.get(i + 1) == Some(&'-') => {
                out.push((Tok::Turnstile, pos));
                advance(&mut i, &mut col, 2);
            }
            '!' => {
                let kind = match chars.get(i + 1) {
                    Some('p') => ModalKind::Permanent,
                    Some('s') => ModalKind::SingleUse,
                    _ => return Err(syntax(pos, "expected `!p[` or `!s[`")),
                };
                if chars.get(i + 2) != Some(&'[') {
                    return Err(syntax(pos, "expected `[` after the modality"));
                }
                out.push((Tok::Bang(kind), pos));
                advance(&mut i, &mut col, 2);
            }
            '[' => {
                let start = i + 1;
                let end = chars[start..]
                    .iter()
                    .position(|&c| c == ']' || c == '\n')
                    .map(|n| start + n)
                    .filter(|&e| chars[e] == ']')
                    .ok_or_else(|| syntax(pos, "unterminated label"))?;
                let text: String = chars[start..end].iter().collect();
                out.push((Tok::Label(text.trim().to_string()), pos));
                let width = end + 1 - i;
                advance(&mut i, &mut col, width);
            }
            '0' | '1' => {
                if chars.get(i + 1).is_some_and(|c| c.is_ascii_alphanumeric() || *c == '.') {
                    return Err(syntax(pos, "numbers other than the units 0 and 1 only appear inside labels"));
                }
                out.push((if c == '0' { Tok::Zero } else { Tok::One }, pos));
                advance(&mut i, &mut col, 1);
            }
            c if c.is_ascii_lowercase() => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                    i += 1;
                }
                col += i - start;
                out.push((Tok::Atom(chars[start..i].iter().collect()), pos));
            }
            other => return Err(syntax(pos, format!("unexpected character `{other}`"))),
        }
    }
    out.push((Tok::End, Pos { line, column: col }));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    k: &'a dyn Semiring,
}

impl<'a> Parser<'a> {
    fn new(text: &str, k: &'a dyn Semiring) -> Result<Parser<'a>, ParseError> {
        Ok(Parser { toks: tokenize(text)?, at: 0, k })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(syntax(self.pos(), format!("expected {want}, found {}", self.peek())))
        }
    }

    fn label(&mut self) -> Result<crate::semiring::CostValue, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Label(text) => self
                .k
                .parse_literal(&text)
                .map_err(|source| ParseError::Label { line: pos.line, column: pos.column, source }),
            other => Err(syntax(pos, format!("expected a label, found {other}"))),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.plus()?;
        if *self.peek() == Tok::Lolli {
            self.bump();
            let rhs = self.formula()?;
            Ok(Formula::lolli(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn plus(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.with()?;
        while *self.peek() == Tok::Plus {
            self.bump();
            acc = Formula::plus(acc, self.with()?);
        }
        Ok(acc)
    }

    fn with(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.tensor()?;
        while *self.peek() == Tok::With {
            self.bump();
            acc = Formula::with(acc, self.tensor()?);
        }
        Ok(acc)
    }

    fn tensor(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::Tensor {
            self.bump();
            acc = Formula::tensor(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Atom(a) => Ok(Formula::Atom(a)),
            Tok::Zero => Ok(Formula::Zero),
            Tok::One => Ok(Formula::One),
            Tok::LParen => {
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Bang(kind) => {
                let price = self.label()?;
                let body = self.unary()?;
                Ok(Formula::Modal { kind, price, body: Box::new(body) })
            }
            other => Err(syntax(pos, format!("expected a formula, found {other}"))),
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(syntax(self.pos(), format!("unexpected {}", self.peek())))
        }
    }

    fn sequent(&mut self) -> Result<ParsedSequent, ParseError> {
        let mut antecedent = Vec::new();
        if *self.peek() != Tok::Turnstile {
            antecedent.push(self.formula()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                antecedent.push(self.formula()?);
            }
        }
        self.expect(Tok::Turnstile)?;
        let label = if matches!(self.peek(), Tok::Label(_)) { Some(self.label()?) } else { None };
        let consequent = self.formula()?;
        self.finish()?;
        let sequent = Sequent::new(antecedent, consequent);
        if let Some(bad) = sequent.positive_modal() {
            return Err(ParseError::PositiveModality { formula: bad.to_string() });
        }
        debug_assert!(check_extended(&sequent));
        Ok(match label {
            Some(label) => ParsedSequent::Labelled(LabelledSequent::new(sequent, label)),
            None => ParsedSequent::Plain(sequent),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParsedSequent {
    Plain(Sequent),
    Labelled(LabelledSequent),
}

impl ParsedSequent {
    pub fn sequent(&self) -> &Sequent {
        match self {
            ParsedSequent::Plain(s) => s,
            ParsedSequent::Labelled(ls) => &ls.sequent,
        }
    }
}

pub fn parse_formula(text: &str, k: &dyn Semiring) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text, k)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

/// Parses `A1, ..., An |- C` or `A1, ..., An |-[L] C`, rejecting sequents
/// with a modality in positive polarity.
pub fn parse_sequent(text: &str, k: &dyn Semiring) -> Result<ParsedSequent, ParseError> {
    Parser::new(text, k)?.sequent()
}

pub fn parse_sequent_plain(text: &str, k: &dyn Semiring) -> Result<Sequent, ParseError> {
    match parse_sequent(text, k)? {
        ParsedSequent::Plain(s) => Ok(s),
        ParsedSequent::Labelled(_) => Err(ParseError::UnexpectedLabel),
    }
}

pub fn parse_labelled_sequent(text: &str, k: &dyn Semiring) -> Result<LabelledSequent, ParseError> {
    match parse_sequent(text, k)? {
        ParsedSequent::Labelled(ls) => Ok(ls),
        ParsedSequent::Plain(_) => Err(ParseError::MissingLabel),
    }
}

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Lolli(..) => 1,
        Formula::Plus(..) => 2,
        Formula::With(..) => 3,
        Formula::Tensor(..) => 4,
        _ => 5,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, formula: &Formula, min: u8) -> fmt::Result {
    if precedence(formula) < min {
        write!(f, "({formula})")
    } else {
        write!(f, "{formula}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let infix = |f: &mut fmt::Formatter<'_>, a: &Formula, op: &str, b: &Formula, lhs: u8, rhs: u8| {
            write_at(f, a, lhs)?;
            write!(f, " {op} ")?;
            write_at(f, b, rhs)
        };
        match self {
            Formula::Atom(a) => f.write_str(a),
            Formula::Zero => f.write_str("0"),
            Formula::One => f.write_str("1"),
            Formula::Tensor(a, b) => infix(f, a, "*", b, 4, 5),
            Formula::With(a, b) => infix(f, a, "&", b, 3, 4),
            Formula::Plus(a, b) => infix(f, a, "+", b, 2, 3),
            Formula::Lolli(a, b) => infix(f, a, "-o", b, 2, 1),
            Formula::Modal { kind, price, body } => {
                let tag = match kind {
                    ModalKind::Permanent => 'p',
                    ModalKind::SingleUse => 's',
                };
                write!(f, "!{tag}[{price}]")?;
                write_at(f, body, 5)
            }
        }
    }
}

fn write_antecedent(f: &mut fmt::Formatter<'_>, ante: &[Formula]) -> fmt::Result {
    for (i, a) in ante.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    if !ante.is_empty() {
        f.write_str(" ")?;
    }
    Ok(())
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_antecedent(f, &self.antecedent)?;
        write!(f, "|- {}", self.consequent)
    }
}

impl fmt::Display for LabelledSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_antecedent(f, &self.sequent.antecedent)?;
        write!(f, "|-[{}] {}", self.label, self.sequent.consequent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::{Builtin, CostValue};

    fn pf(s: &str) -> Formula {
        parse_formula(s, &Builtin::Cost).unwrap()
    }

    fn atom(s: &str) -> Formula {
        Formula::atom(s)
    }

    #[test]
    fn riddle_resource() {
        assert_eq!(pf("!p[1](w + b)"), Formula::permanent(CostValue::int(1), Formula::plus(atom("w"), atom("b"))));
    }

    #[test]
    fn lolli_is_right_associative() {
        assert_eq!(pf("p -o q -o r"), Formula::lolli(atom("p"), Formula::lolli(atom("q"), atom("r"))));
    }

    #[test]
    fn modality_binds_tightest() {
        assert_eq!(
            pf("!s[0.8]p * p"),
            Formula::tensor(Formula::single_use(CostValue::ratio(4, 5), atom("p")), atom("p"))
        );
    }

    #[test]
    fn precedence_and_left_associativity() {
        assert_eq!(pf("a + b & c * d"), Formula::plus(atom("a"), Formula::with(atom("b"), Formula::tensor(atom("c"), atom("d")))));
        assert_eq!(pf("a * b * c"), Formula::tensor(Formula::tensor(atom("a"), atom("b")), atom("c")));
        assert_eq!(pf("a + b -o c"), Formula::lolli(Formula::plus(atom("a"), atom("b")), atom("c")));
    }

    #[test]
    fn sequent_forms() {
        let k = Builtin::Cost;
        let s = parse_sequent_plain("!p[1]p, !s[3]q |- p * q", &k).unwrap();
        assert_eq!(s.antecedent.len(), 2);
        let empty = parse_sequent_plain("|- 1", &k).unwrap();
        assert!(empty.antecedent.is_empty());
        assert_eq!(empty.consequent, Formula::One);
        let ls = parse_labelled_sequent("p |-[2.5] p", &k).unwrap();
        assert_eq!(ls.label, CostValue::ratio(5, 2));
        assert_eq!(ls.to_string(), "p |-[2.5] p");
    }

    #[test]
    fn positive_modality_is_reported() {
        let err = parse_sequent("p |- !p[1]p", &Builtin::Cost).unwrap_err();
        assert_eq!(err, ParseError::PositiveModality { formula: "!p[1]p".into() });
    }

    #[test]
    fn errors_carry_positions() {
        match parse_formula("p *\n  ) q", &Builtin::Cost) {
            Err(ParseError::Syntax { line: 2, column: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_formula("p q", &Builtin::Cost), Err(ParseError::Syntax { line: 1, column: 3, .. })));
        assert!(matches!(parse_formula("P", &Builtin::Cost), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_formula("!p[1", &Builtin::Cost), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn labels_must_lie_in_the_carrier() {
        assert!(matches!(parse_formula("!p[1.5]p", &Builtin::Probabilistic), Err(ParseError::Label { .. })));
        assert!(matches!(parse_formula("!p[pub]p", &Builtin::Cost), Err(ParseError::Label { .. })));
        assert!(parse_formula("!p[conf]p", &Builtin::Security).is_ok());
        assert!(parse_formula("!p[inf]p", &Builtin::Max).is_ok());
    }

    #[test]
    fn rendering_round_trips() {
        for s in ["p * (q & r)", "(p -o q) -o r", "!p[1](w + b)", "!s[0.8]p * p", "(a + b) * c", "a & (b & c)", "!p[2]!s[1/3]x"] {
            let f = pf(s);
            assert_eq!(pf(&f.to_string()), f, "{s}");
        }
        assert_eq!(pf("p * (q & r)").to_string(), "p * (q & r)");
    }
}

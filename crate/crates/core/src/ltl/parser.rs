//! Concrete syntax for LTL formulas.
//!
//! ```text
//! phi ::= "1" | "0" | ident | "!" phi | "X" phi | "F" phi | "G" phi
//!       | phi "U" phi | phi "R" phi | phi "&" phi | phi "|" phi | "(" phi ")"
//! ```
//!
//! Precedence, tightest first: the unary operators, then `U`/`R` (right
//! associative), then `&`, then `|` (both left associative).

use super::alphabet::Alphabet;
use super::formula::Formula;
use crate::error::LtlError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    True,
    False,
    Ident(String),
    Not,
    Next,
    Eventually,
    Always,
    Until,
    Release,
    And,
    Or,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, LtlError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'!' => Tok::Not,
            b'&' => Tok::And,
            b'|' => Tok::Or,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'1' => Tok::True,
            b'0' => Tok::False,
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                out.push((
                    start,
                    match word {
                        "X" => Tok::Next,
                        "F" => Tok::Eventually,
                        "G" => Tok::Always,
                        "U" => Tok::Until,
                        "R" => Tok::Release,
                        _ => Tok::Ident(word.to_string()),
                    },
                ));
                continue;
            }
            _ => {
                return Err(LtlError::Syntax {
                    pos: start,
                    msg: format!("unexpected character `{}`", text[start..].chars().next().unwrap_or('?')),
                })
            }
        };
        i += 1;
        out.push((start, tok));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    resolve: &'a mut dyn FnMut(&str) -> Result<Formula, LtlError>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, LtlError> {
        Err(LtlError::Syntax {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn or(&mut self) -> Result<Formula, LtlError> {
        let mut lhs = self.and()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, LtlError> {
        let mut lhs = self.binary_temporal()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            lhs = Formula::and(lhs, self.binary_temporal()?);
        }
        Ok(lhs)
    }

    fn binary_temporal(&mut self) -> Result<Formula, LtlError> {
        let lhs = self.unary()?;
        match self.peek() {
            Some(Tok::Until) => {
                self.pos += 1;
                Ok(Formula::until(lhs, self.binary_temporal()?))
            }
            Some(Tok::Release) => {
                self.pos += 1;
                Ok(Formula::release(lhs, self.binary_temporal()?))
            }
            _ => Ok(lhs),
        }
    }

    fn unary(&mut self) -> Result<Formula, LtlError> {
        let Some(tok) = self.peek().cloned() else {
            return self.err("unexpected end of input");
        };
        self.pos += 1;
        match tok {
            Tok::Not => Ok(Formula::not(self.unary()?)),
            Tok::Next => Ok(Formula::next(self.unary()?)),
            Tok::Eventually => Ok(Formula::eventually(self.unary()?)),
            Tok::Always => Ok(Formula::always(self.unary()?)),
            Tok::True => Ok(Formula::True),
            Tok::False => Ok(Formula::False),
            Tok::Ident(name) => (self.resolve)(&name),
            Tok::LParen => {
                let inner = self.or()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                Ok(inner)
            }
            other => {
                self.pos -= 1;
                self.err(format!("unexpected token {other:?}"))
            }
        }
    }
}

fn parse_with(
    text: &str,
    resolve: &mut dyn FnMut(&str) -> Result<Formula, LtlError>,
) -> Result<Formula, LtlError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        resolve,
    };
    let f = p.or()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(f)
}

/// Parses `text`, resolving identifiers against a fixed alphabet.
pub fn parse_formula(text: &str, alphabet: &Alphabet) -> Result<Formula, LtlError> {
    parse_with(text, &mut |name| {
        alphabet
            .id(name)
            .map(Formula::Atom)
            .ok_or_else(|| LtlError::UnknownAtom(name.to_string()))
    })
}

/// Parses `text`, adding unseen identifiers to `alphabet` in order of
/// appearance.
pub fn parse_formula_extending(text: &str, alphabet: &mut Alphabet) -> Result<Formula, LtlError> {
    parse_with(text, &mut |name| alphabet.insert(name.to_string()).map(Formula::Atom))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::AtomId;

    fn alpha() -> Alphabet {
        Alphabet::new(["a", "b", "c"]).unwrap()
    }

    fn at(i: usize) -> Formula {
        Formula::atom(AtomId::new(i))
    }

    #[test]
    fn parses_nested_eventually() {
        let f = parse_formula("F (a & F (b & F a))", &alpha()).unwrap();
        let want = Formula::eventually(Formula::and(
            at(0),
            Formula::eventually(Formula::and(at(1), Formula::eventually(at(0)))),
        ));
        assert_eq!(f, want);
    }

    #[test]
    fn parses_bare_atom() {
        assert_eq!(parse_formula("a", &alpha()).unwrap(), at(0));
    }

    #[test]
    fn or_is_left_associative_below_unary() {
        let f = parse_formula("G F (a | b | c)", &alpha()).unwrap();
        let want = Formula::always(Formula::eventually(Formula::or(
            Formula::or(at(0), at(1)),
            at(2),
        )));
        assert_eq!(f, want);
    }

    #[test]
    fn until_is_right_associative_and_binds_tighter_than_and() {
        let f = parse_formula("a U b U c & a", &alpha()).unwrap();
        let want = Formula::and(Formula::until(at(0), Formula::until(at(1), at(2))), at(0));
        assert_eq!(f, want);
        let g = parse_formula("!a R X b", &alpha()).unwrap();
        assert_eq!(
            g,
            Formula::release(Formula::not(at(0)), Formula::next(at(1)))
        );
    }

    #[test]
    fn constants_and_parentheses() {
        let f = parse_formula("(1 | 0) & !(a)", &alpha()).unwrap();
        assert_eq!(
            f,
            Formula::and(Formula::or(Formula::True, Formula::False), Formula::not(at(0)))
        );
    }

    #[test]
    fn reports_position_of_syntax_errors() {
        match parse_formula("a & (b | ", &alpha()) {
            Err(LtlError::Syntax { pos, .. }) => assert_eq!(pos, 9),
            other => panic!("unexpected {other:?}"),
        }
        match parse_formula("a b", &alpha()) {
            Err(LtlError::Syntax { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_formula("a $ b", &alpha()),
            Err(LtlError::Syntax { pos: 2, .. })
        ));
    }

    #[test]
    fn rejects_unknown_atoms() {
        assert_eq!(
            parse_formula("F zz", &alpha()),
            Err(LtlError::UnknownAtom("zz".into()))
        );
    }

    #[test]
    fn extending_parser_grows_alphabet() {
        let mut alpha = Alphabet::default();
        let f = parse_formula_extending("s2 U s1 & s2", &mut alpha).unwrap();
        assert_eq!(alpha.len(), 2);
        assert_eq!(alpha.id("s1"), Some(AtomId::new(1)));
        assert_eq!(f.atoms(), 0b11);
    }

    #[test]
    fn identifiers_may_start_with_operator_letters() {
        let mut alpha = Alphabet::default();
        let f = parse_formula_extending("F Fa & Xb_1", &mut alpha).unwrap();
        assert_eq!(alpha.len(), 2);
        assert!(matches!(f, Formula::And(..)));
    }
}

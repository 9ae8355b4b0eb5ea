//! Lexer and unique-reading parser for the word form of terms.
//!
//! Variables are `x` followed by decimal digits without a leading zero.
//! Functional symbols are matched greedily against the signature (longest
//! spelling first). Whitespace between tokens is ignored.

use thiserror::Error;

use super::{Signature, Symbol, Term, Var};
use crate::prelude::*;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    LParen,
    RParen,
    Comma,
    Var(Var),
    Sym(Symbol),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    /// `offset` is a character offset into the input.
    #[error("unknown symbol at offset {offset}: {found:?}")]
    UnknownSymbol { offset: usize, found: String },
    #[error("not a term: {reason} at offset {offset}")]
    NotATerm { offset: usize, reason: &'static str },
}

/// Splits a word into letters of the term alphabet.
pub fn tokenize(word: &str, sig: &Signature) -> Result<Vec<Token>, ParseError> {
    Ok(lex(word, sig)?.into_iter().map(|(_, t)| t).collect())
}

/// Reads the unique term whose word form is `word`.
pub fn parse(word: &str, sig: &Signature) -> Result<Term, ParseError> {
    let tokens = lex(word, sig)?;
    let end = word.chars().count();
    let mut p = Parser { tokens: &tokens, at: 0, sig, end };
    let term = p.term()?;
    if p.at < tokens.len() {
        return Err(ParseError::NotATerm {
            offset: tokens[p.at].0,
            reason: "trailing input after a complete term",
        });
    }
    Ok(term)
}

fn lex(word: &str, sig: &Signature) -> Result<Vec<(usize, Token)>, ParseError> {
    let chars: Vec<char> = word.chars().collect();
    let spellings: Vec<(Vec<char>, Symbol)> = sig
        .spellings()
        .into_iter()
        .map(|(s, sym)| (s.chars().collect(), sym))
        .collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '(' => {
                i += 1;
                Token::LParen
            }
            ')' => {
                i += 1;
                Token::RParen
            }
            ',' => {
                i += 1;
                Token::Comma
            }
            'x' if chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) => {
                let mut j = i + 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let digits: String = chars[i + 1..j].iter().collect();
                let index = (!digits.starts_with('0'))
                    .then(|| digits.parse::<u32>().ok())
                    .flatten()
                    .and_then(Var::new)
                    .ok_or_else(|| ParseError::UnknownSymbol {
                        offset: start,
                        found: chars[i..j].iter().collect(),
                    })?;
                i = j;
                Token::Var(index)
            }
            'c' if sig.constant_literals() && chars.get(i + 1) == Some(&'{') => {
                let close = chars[i..].iter().position(|&c| c == '}').map(|k| i + k);
                let Some(close) = close else {
                    return Err(ParseError::NotATerm {
                        offset: start,
                        reason: "unterminated constant literal",
                    });
                };
                let body: String = chars[i + 2..close].iter().filter(|c| !c.is_whitespace()).collect();
                if body.is_empty() || body.contains('{') {
                    return Err(ParseError::UnknownSymbol {
                        offset: start,
                        found: chars[i..=close].iter().collect(),
                    });
                }
                i = close + 1;
                Token::Sym(Symbol::new(&format!("c{{{body}}}")))
            }
            _ => {
                let hit = spellings
                    .iter()
                    .find(|(sp, _)| chars[i..].starts_with(sp));
                let Some((sp, sym)) = hit else {
                    return Err(ParseError::UnknownSymbol {
                        offset: start,
                        found: c.to_string(),
                    });
                };
                i += sp.len();
                Token::Sym(sym.clone())
            }
        };
        out.push((start, tok));
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [(usize, Token)],
    at: usize,
    sig: &'a Signature,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.at).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.at).map_or(self.end, |(o, _)| *o)
    }

    fn fail<T>(&self, reason: &'static str) -> Result<T, ParseError> {
        Err(ParseError::NotATerm { offset: self.offset(), reason })
    }

    fn expect(&mut self, tok: Token, reason: &'static str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.at += 1;
            Ok(())
        } else {
            self.fail(reason)
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek().cloned() {
            None => self.fail("expected a term"),
            Some(Token::Var(v)) => {
                self.at += 1;
                Ok(Term::Var(v))
            }
            Some(Token::LParen) => {
                self.at += 1;
                let left = self.term()?;
                let op = match self.peek() {
                    Some(Token::Sym(s)) if self.sig.arity(s) == Some(2) => s.clone(),
                    _ => return self.fail("expected a binary symbol"),
                };
                self.at += 1;
                let right = self.term()?;
                self.expect(Token::RParen, "expected `)` closing a binary term")?;
                Ok(Term::Binary(op, Box::new(left), Box::new(right)))
            }
            Some(Token::Sym(s)) => {
                let arity = match self.sig.arity(&s) {
                    Some(a) => a,
                    None => {
                        return Err(ParseError::UnknownSymbol {
                            offset: self.offset(),
                            found: s.as_str().into(),
                        })
                    }
                };
                self.at += 1;
                match arity {
                    0 => Ok(Term::Const(s)),
                    1 => {
                        self.expect(Token::LParen, "expected `(` after a unary symbol")?;
                        let arg = self.term()?;
                        self.expect(Token::RParen, "expected `)` closing a unary term")?;
                        Ok(Term::Unary(s, Box::new(arg)))
                    }
                    2 => {
                        self.at -= 1;
                        self.fail("binary symbol outside infix position")
                    }
                    k => {
                        self.expect(Token::LParen, "expected `(` after a k-ary symbol")?;
                        let mut args = Vec::with_capacity(k);
                        args.push(self.term()?);
                        for i in 2..=k {
                            if i < k {
                                self.expect(Token::Comma, "expected `,` between arguments")?;
                            } else if self.peek() == Some(&Token::Comma) {
                                // the comma before the last argument is optional
                                self.at += 1;
                            }
                            args.push(self.term()?);
                        }
                        self.expect(Token::RParen, "expected `)` closing a k-ary term")?;
                        Ok(Term::Nary(s, args))
                    }
                }
            }
            Some(Token::RParen) | Some(Token::Comma) => self.fail("unexpected punctuation"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_words() {
        let sig = Signature::ring();
        assert_eq!(
            parse("(x1+x2)", &sig).unwrap(),
            Term::binary("+", Term::var(1), Term::var(2))
        );
        assert_eq!(parse("x1", &sig).unwrap(), Term::var(1));
        assert!(matches!(parse("(x1+", &sig), Err(ParseError::NotATerm { .. })));
        assert_eq!(parse(" ( x3 * c{2} ) ", &sig).unwrap().serialize(), "(x3·c{2})");
    }

    #[test]
    fn rejections() {
        let sig = Signature::ring();
        assert!(matches!(parse("(x1?x2)", &sig), Err(ParseError::UnknownSymbol { offset: 3, .. })));
        assert!(matches!(parse("x0", &sig), Err(ParseError::UnknownSymbol { .. })));
        assert!(matches!(parse("x01", &sig), Err(ParseError::UnknownSymbol { .. })));
        assert!(matches!(parse("x1 x2", &sig), Err(ParseError::NotATerm { offset: 3, .. })));
        assert!(matches!(parse("+", &sig), Err(ParseError::NotATerm { .. })));
        assert!(matches!(parse("(x1+x2+x3)", &sig), Err(ParseError::NotATerm { .. })));
        assert!(matches!(parse("", &sig), Err(ParseError::NotATerm { offset: 0, .. })));
        assert!(matches!(parse("c{2", &sig), Err(ParseError::NotATerm { .. })));
    }

    #[test]
    fn boolean_aliases() {
        let sig = Signature::boolean();
        let t = parse("!(((0|x4)&!(x5)))", &sig).unwrap();
        assert_eq!(t.serialize(), "¬(((0∨x4)∧¬(x5)))");
        assert_eq!(parse(&t.serialize(), &sig).unwrap(), t);
    }

    #[test]
    fn nary_commas() {
        let sig = Signature::new()
            .with_symbol("f", 3)
            .unwrap()
            .with_symbol("g", 4)
            .unwrap()
            .with_symbol("a", 0)
            .unwrap();
        let full = parse("f(x1,a,x2)", &sig).unwrap();
        let short = parse("f(x1,ax2)", &sig).unwrap();
        assert_eq!(full, short);
        assert_eq!(full.serialize(), "f(x1,a,x2)");
        assert_eq!(full.word_len(), 8);
        let g = parse("g(a,a,f(a,a,a)a)", &sig).unwrap();
        assert_eq!(g.serialize(), "g(a,a,f(a,a,a),a)");
        assert!(parse("g(a,aa,a)", &sig).is_err());
    }

    #[test]
    fn greedy_multichar() {
        let sig = Signature::new()
            .with_symbol("ab", 0)
            .unwrap()
            .with_symbol("a", 0)
            .unwrap()
            .with_symbol("op", 2)
            .unwrap();
        assert_eq!(parse("(abopa)", &sig).unwrap().serialize(), "(abopa)");
        assert_eq!(tokenize("(abopa)", &sig).unwrap().len(), 5);
    }
}

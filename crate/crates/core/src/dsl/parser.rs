use super::ast::{Measure, Num, Primitive, Scalar, ScalarForm, Sign, SignedTerm, Term};
use super::lexer::{tokenize, Token, TokenKind};
use super::{Diagnostic, DiagnosticKind, Span};
use crate::error::Error;
use crate::measure::MeasurePrimitive;

/// Deepest allowed nesting of parenthesised sub-measures.
pub const MAX_NESTING: usize = 64;

const PRIMITIVE_START: [&str; 5] = ["'dirac'", "'lebesgue'", "'poly'", "'jacobi'", "'('"];

/// Parses a measure description. Syntax errors stop at the first problem;
/// domain violations are collected so that all of them are reported.
pub fn parse(text: &str) -> Result<Measure, Vec<Diagnostic>> {
    let tokens = tokenize(text).map_err(|d| vec![d])?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        depth: 0,
        domain: Vec::new(),
    };
    let measure = parser.measure(&[]).map_err(|d| vec![d])?;
    let end = parser.peek();
    if end.kind != TokenKind::Eof {
        return Err(vec![parser.unexpected(&["'+'", "'-'", "end of input"])]);
    }
    if parser.domain.is_empty() {
        Ok(measure)
    } else {
        Err(parser.domain)
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    depth: usize,
    domain: Vec<Diagnostic>,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn peek_at(&self, ahead: usize) -> &TokenKind {
        &self.tokens[(self.pos + ahead).min(self.tokens.len() - 1)].kind
    }

    fn bump(&mut self) -> Token {
        let tok = self.peek().clone();
        if tok.kind != TokenKind::Eof {
            self.pos += 1;
        }
        tok
    }

    fn unexpected(&self, expected: &[&str]) -> Diagnostic {
        let tok = self.peek();
        Diagnostic {
            kind: DiagnosticKind::UnexpectedToken,
            message: format!("unexpected {}", tok.kind.describe()),
            span: tok.span,
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect(&mut self, kind: TokenKind, label: &str) -> PResult<Span> {
        if self.peek().kind == kind {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&[label]))
        }
    }

    fn is_ident(&self, ahead: usize, name: &str) -> bool {
        matches!(self.peek_at(ahead), TokenKind::Ident(s) if s == name)
    }

    fn measure(&mut self, closers: &[&str]) -> PResult<Measure> {
        let start = self.peek().span;
        let mut terms = Vec::new();
        // A leading '-' negates the first term unless it is the sign of a number.
        let first_sign = if self.peek().kind == TokenKind::Minus
            && !matches!(self.peek_at(1), TokenKind::Number(_))
        {
            self.bump();
            Sign::Minus
        } else {
            Sign::Plus
        };
        terms.push(SignedTerm {
            sign: first_sign,
            term: self.term()?,
        });
        loop {
            let sign = match self.peek().kind {
                TokenKind::Plus => Sign::Plus,
                TokenKind::Minus => Sign::Minus,
                _ => break,
            };
            self.bump();
            terms.push(SignedTerm {
                sign,
                term: self.term()?,
            });
        }
        if !closers.is_empty() && !closers.iter().any(|c| self.peek().kind.describe() == *c) {
            let mut expected = vec!["'+'", "'-'"];
            expected.extend_from_slice(closers);
            return Err(self.unexpected(&expected));
        }
        let last = self.tokens[self.pos.saturating_sub(1)].span;
        Ok(Measure {
            terms,
            span: start.to(last),
        })
    }

    fn starts_real(&self) -> bool {
        match self.peek_at(0) {
            TokenKind::Number(_) => true,
            TokenKind::Minus => matches!(self.peek_at(1), TokenKind::Number(_)),
            _ => false,
        }
    }

    fn term(&mut self) -> PResult<Term> {
        if !self.starts_real() {
            return self.primitive().map(Term::Plain);
        }
        let scalar = self.scalar()?;
        if self.peek().kind == TokenKind::Star {
            self.bump();
            let primitive = self.primitive()?;
            Ok(Term::Scaled { scalar, primitive })
        } else {
            Ok(Term::Constant(scalar))
        }
    }

    /// An optionally signed real literal.
    fn real(&mut self) -> PResult<Num> {
        let negative = self.peek().kind == TokenKind::Minus;
        let start = self.peek().span;
        if negative {
            self.bump();
        }
        match self.peek().kind {
            TokenKind::Number(v) => {
                let tok = self.bump();
                let value = if negative { -v } else { v };
                Ok(Num {
                    value,
                    span: start.to(tok.span),
                })
            }
            _ => Err(self.unexpected(&["number"])),
        }
    }

    /// `real`, `real i`, or `real ± real i`; the complex form is taken greedily.
    fn scalar(&mut self) -> PResult<Scalar> {
        let first = self.real()?;
        if self.is_ident(0, "i") {
            let end = self.bump().span;
            return Ok(Scalar {
                re: 0.0,
                im: first.value,
                form: ScalarForm::Imaginary,
                span: first.span.to(end),
            });
        }
        let signed = matches!(self.peek_at(0), TokenKind::Plus | TokenKind::Minus);
        if signed && matches!(self.peek_at(1), TokenKind::Number(_)) && self.is_ident(2, "i") {
            let negative = self.bump().kind == TokenKind::Minus;
            let magnitude = match self.bump().kind {
                TokenKind::Number(v) => v,
                _ => unreachable!("lookahead checked a number"),
            };
            let end = self.bump().span;
            let im = if negative { -magnitude } else { magnitude };
            return Ok(Scalar {
                re: first.value,
                im,
                form: ScalarForm::Complex,
                span: first.span.to(end),
            });
        }
        Ok(Scalar {
            re: first.value,
            im: 0.0,
            form: ScalarForm::Real,
            span: first.span,
        })
    }

    fn primitive(&mut self) -> PResult<Primitive> {
        let start = self.peek().span;
        match self.peek().kind.clone() {
            TokenKind::Ident(name) => match name.as_str() {
                "lebesgue" => {
                    self.bump();
                    Ok(Primitive::Lebesgue { span: start })
                }
                "dirac" => {
                    self.bump();
                    self.expect(TokenKind::LParen, "'('")?;
                    let x = self.real()?;
                    let end = self.expect(TokenKind::RParen, "')'")?;
                    self.check(MeasurePrimitive::dirac(x.value), x.span);
                    Ok(Primitive::Dirac {
                        x,
                        span: start.to(end),
                    })
                }
                "jacobi" => {
                    self.bump();
                    self.expect(TokenKind::LParen, "'('")?;
                    let p = self.real()?;
                    self.expect(TokenKind::Comma, "','")?;
                    let q = self.real()?;
                    let end = self.expect(TokenKind::RParen, "')'")?;
                    let span = if p.value.is_finite() && p.value > -1.0 {
                        q.span
                    } else {
                        p.span
                    };
                    self.check(MeasurePrimitive::jacobi(p.value, q.value), span);
                    Ok(Primitive::Jacobi {
                        p,
                        q,
                        span: start.to(end),
                    })
                }
                "poly" => self.poly(start),
                _ => Err(self.unexpected(&PRIMITIVE_START)),
            },
            TokenKind::LParen => {
                if self.depth >= MAX_NESTING {
                    return Err(Diagnostic {
                        kind: DiagnosticKind::TooDeep,
                        message: format!("sub-measures nested deeper than {MAX_NESTING} levels"),
                        span: start,
                        expected: Vec::new(),
                    });
                }
                self.bump();
                self.depth += 1;
                let inner = self.measure(&["')'"])?;
                self.depth -= 1;
                let end = self.expect(TokenKind::RParen, "')'")?;
                Ok(Primitive::Group {
                    inner: Box::new(inner),
                    span: start.to(end),
                })
            }
            _ => {
                let mut expected = vec!["number"];
                expected.extend_from_slice(&PRIMITIVE_START);
                Err(self.unexpected(&expected))
            }
        }
    }

    fn poly(&mut self, start: Span) -> PResult<Primitive> {
        self.bump();
        self.expect(TokenKind::LParen, "'('")?;
        self.expect(TokenKind::LBracket, "'['")?;
        let mut coeffs = vec![self.real()?];
        while self.peek().kind == TokenKind::Comma {
            self.bump();
            coeffs.push(self.real()?);
        }
        self.expect(TokenKind::RBracket, "']'")?;
        let support = if self.peek().kind == TokenKind::Comma {
            self.bump();
            let a = self.real()?;
            self.expect(TokenKind::Comma, "','")?;
            let b = self.real()?;
            Some((a, b))
        } else {
            None
        };
        let end = match self.peek().kind {
            TokenKind::RParen => self.bump().span,
            _ if support.is_none() => return Err(self.unexpected(&["','", "')'"])),
            _ => return Err(self.unexpected(&["')'"])),
        };
        let span = start.to(end);
        let (a, b, support_span) = match support {
            Some((a, b)) => (a.value, b.value, a.span.to(b.span)),
            None => (0.0, 1.0, span),
        };
        self.check(
            MeasurePrimitive::poly(coeffs.iter().map(|c| c.value).collect(), a, b),
            support_span,
        );
        Ok(Primitive::Poly {
            coeffs,
            support,
            span,
        })
    }

    fn check(&mut self, result: crate::error::Result<MeasurePrimitive>, span: Span) {
        if let Err(err) = result {
            let message = match err {
                Error::Domain(msg) => msg,
                other => other.to_string(),
            };
            self.domain.push(Diagnostic {
                kind: DiagnosticKind::Domain,
                message,
                span,
                expected: Vec::new(),
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn first_error(src: &str) -> Diagnostic {
        parse(src).unwrap_err().remove(0)
    }

    #[test]
    fn accepts_documented_forms() {
        for src in [
            "lebesgue",
            "2*dirac(0.5) - 0.5i*poly([0,1])",
            "poly([1, 0, 3], 0.2, 0.7)",
            "jacobi(-0.5, 0)",
            "-dirac(0.5) + 3",
            "1+2i*jacobi(0.5,1)",
            "2*(dirac(0.1) - lebesgue)",
            "-2*dirac(0.25) + -1e-3i*lebesgue",
        ] {
            parse(src).unwrap_or_else(|e| panic!("{src}: {e:?}"));
        }
    }

    #[test]
    fn complex_scalar_is_greedy() {
        let m = parse("1 - 2i*lebesgue").unwrap();
        assert_eq!(m.terms.len(), 1);
        match &m.terms[0].term {
            Term::Scaled { scalar, .. } => {
                assert_eq!(
                    (scalar.re, scalar.im, scalar.form),
                    (1.0, -2.0, ScalarForm::Complex)
                );
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dirac_at_one_points_at_the_location() {
        let d = first_error("dirac(1.0)");
        assert_eq!(d.kind, DiagnosticKind::Domain);
        assert_eq!((d.span.offset, d.span.len, d.span.column), (6, 3, 7));
    }

    #[test]
    fn domain_errors_accumulate() {
        let errs = parse("dirac(2) + jacobi(-1, 0) + jacobi(0, -1)").unwrap_err();
        assert_eq!(errs.len(), 3);
        assert_eq!(errs[1].span.offset, 18);
        assert_eq!(errs[2].span.offset, 37);
    }

    #[test]
    fn poly_support_violation() {
        let d = first_error("poly([1], 0.7, 0.2)");
        assert_eq!(d.kind, DiagnosticKind::Domain);
        assert_eq!(
            &"poly([1], 0.7, 0.2)"[d.span.offset..d.span.offset + d.span.len],
            "0.7, 0.2"
        );
    }

    #[test]
    fn syntax_errors_report_expected_tokens() {
        let d = first_error("dirac(0.5) lebesgue");
        assert_eq!(d.kind, DiagnosticKind::UnexpectedToken);
        assert!(d.expected.contains(&"end of input".to_string()));
        let d = first_error("2*");
        assert_eq!(d.span.offset, 2);
        assert!(d.expected.contains(&"'dirac'".to_string()));
        let d = first_error("dirac(0.5) + -lebesgue");
        assert_eq!(d.span.offset, 13);
        let d = first_error("(dirac(0.5)");
        assert!(d.expected.contains(&"')'".to_string()));
        assert_eq!(first_error("").kind, DiagnosticKind::UnexpectedToken);
    }

    #[test]
    fn nesting_is_bounded() {
        let ok = format!(
            "{}lebesgue{}",
            "(".repeat(MAX_NESTING),
            ")".repeat(MAX_NESTING)
        );
        assert!(parse(&ok).is_ok());
        let deep = "(".repeat(100_000);
        assert_eq!(first_error(&deep).kind, DiagnosticKind::TooDeep);
    }
}

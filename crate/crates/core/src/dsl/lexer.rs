use super::{Diagnostic, DiagnosticKind, Span};

#[derive(Debug, Clone, PartialEq)]
pub(super) enum TokenKind {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Eof,
}

impl TokenKind {
    pub(super) fn describe(&self) -> String {
        match self {
            TokenKind::Number(_) => "number".into(),
            TokenKind::Ident(s) => format!("'{s}'"),
            TokenKind::Plus => "'+'".into(),
            TokenKind::Minus => "'-'".into(),
            TokenKind::Star => "'*'".into(),
            TokenKind::LParen => "'('".into(),
            TokenKind::RParen => "')'".into(),
            TokenKind::LBracket => "'['".into(),
            TokenKind::RBracket => "']'".into(),
            TokenKind::Comma => "','".into(),
            TokenKind::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(super) struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

pub(super) fn tokenize(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut tokens = Vec::new();
    let mut line = 1;
    let mut column = 1;
    let mut chars = src.char_indices().peekable();
    let bytes = src.as_bytes();
    while let Some(&(start, c)) = chars.peek() {
        let span_at = |len: usize| Span {
            offset: start,
            line,
            column,
            len,
        };
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            column += 1;
            continue;
        }
        let single = match c {
            '+' => Some(TokenKind::Plus),
            '-' => Some(TokenKind::Minus),
            '*' => Some(TokenKind::Star),
            '(' => Some(TokenKind::LParen),
            ')' => Some(TokenKind::RParen),
            '[' => Some(TokenKind::LBracket),
            ']' => Some(TokenKind::RBracket),
            ',' => Some(TokenKind::Comma),
            _ => None,
        };
        if let Some(kind) = single {
            tokens.push(Token {
                kind,
                span: span_at(1),
            });
            chars.next();
            column += 1;
            continue;
        }
        let starts_number = c.is_ascii_digit()
            || (c == '.' && bytes.get(start + 1).is_some_and(|b| b.is_ascii_digit()));
        if starts_number {
            let mut end = start;
            while end < bytes.len() && bytes[end].is_ascii_digit() {
                end += 1;
            }
            if end < bytes.len() && bytes[end] == b'.' {
                end += 1;
                while end < bytes.len() && bytes[end].is_ascii_digit() {
                    end += 1;
                }
            }
            if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
                let mut exp = end + 1;
                if exp < bytes.len() && (bytes[exp] == b'+' || bytes[exp] == b'-') {
                    exp += 1;
                }
                if exp < bytes.len() && bytes[exp].is_ascii_digit() {
                    while exp < bytes.len() && bytes[exp].is_ascii_digit() {
                        exp += 1;
                    }
                    end = exp;
                }
            }
            let text = &src[start..end];
            let span = span_at(end - start);
            let value = text
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Diagnostic {
                    kind: DiagnosticKind::Lexical,
                    message: format!("number '{text}' is not representable as a finite double"),
                    span,
                    expected: vec!["number".into()],
                })?;
            tokens.push(Token {
                kind: TokenKind::Number(value),
                span,
            });
            column += end - start;
            while chars.peek().is_some_and(|&(i, _)| i < end) {
                chars.next();
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut end = start;
            while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_') {
                end += 1;
            }
            tokens.push(Token {
                kind: TokenKind::Ident(src[start..end].to_string()),
                span: span_at(end - start),
            });
            column += end - start;
            while chars.peek().is_some_and(|&(i, _)| i < end) {
                chars.next();
            }
            continue;
        }
        return Err(Diagnostic {
            kind: DiagnosticKind::Lexical,
            message: format!("unexpected character {c:?}"),
            span: span_at(c.len_utf8()),
            expected: vec!["number".into(), "identifier".into(), "operator".into()],
        });
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        span: Span {
            offset: src.len(),
            line,
            column,
            len: 0,
        },
    });
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn numbers_and_imaginary_suffix() {
        assert_eq!(
            kinds("0.5i 1e-3 .25 2"),
            vec![
                TokenKind::Number(0.5),
                TokenKind::Ident("i".into()),
                TokenKind::Number(1e-3),
                TokenKind::Number(0.25),
                TokenKind::Number(2.0),
                TokenKind::Eof
            ]
        );
    }

    #[test]
    fn spans_track_lines_and_columns() {
        let toks = tokenize("lebesgue\n  + dirac(0.5)").unwrap();
        assert_eq!(
            toks[1].span,
            Span {
                offset: 11,
                line: 2,
                column: 3,
                len: 1
            }
        );
        assert_eq!(
            toks[4].span,
            Span {
                offset: 19,
                line: 2,
                column: 11,
                len: 3
            }
        );
    }

    #[test]
    fn stray_character() {
        let err = tokenize("dirac(0.5) $").unwrap_err();
        assert_eq!(err.kind, DiagnosticKind::Lexical);
        assert_eq!(err.span.offset, 11);
        let err = tokenize("é").unwrap_err();
        assert_eq!(err.span.len, 2);
        let err = tokenize("1e999").unwrap_err();
        assert_eq!(err.span.len, 5);
    }
}

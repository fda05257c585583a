//! Lexer for `.hts` model sources.
//!
//! Lexing never aborts: unknown characters become single-character
//! `Punct` tokens with an accompanying `P001` diagnostic, and an
//! unterminated string becomes a `Str` token ending at the line break
//! with a `P002`. Token spans tile the source exactly, so concatenating
//! token texts with the original inter-token gaps reproduces the input.

use crate::diag::{codes, Diagnostic, SourceSpan};

/// Lexical category of a token.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Keyword,
    Ident,
    Str,
    Punct,
    Arrow,
    Comment,
    Eof,
}

/// One token: kind, the exact source slice, and its span.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'a> {
    pub kind: TokenKind,
    pub text: &'a str,
    pub span: SourceSpan,
}

/// Words with a syntactic role in the grammar.
pub const KEYWORDS: &[&str] = &[
    "accident",
    "actuator",
    "all",
    "any",
    "between",
    "category",
    "causes",
    "constraint",
    "control",
    "controller",
    "controls",
    "domain",
    "enforces",
    "event",
    "for",
    "hazard",
    "incident",
    "interaction",
    "kind",
    "level",
    "loop",
    "macro",
    "major_accident",
    "meso",
    "micro",
    "near_miss",
    "on",
    "part_of",
    "recommend",
    "risk",
    "sensor",
    "social",
    "subsystem",
    "system",
    "target",
    "technical",
    "violates",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.binary_search(&word).is_ok()
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    /// Advance one byte, tracking line/column. Multi-byte UTF-8
    /// continuation bytes do not bump the column.
    fn bump(&mut self) {
        let b = self.src.as_bytes()[self.pos];
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
        } else if b & 0xC0 != 0x80 {
            self.col += 1;
        }
    }

    fn mark(&self) -> (usize, u32, u32) {
        (self.pos, self.line, self.col)
    }

    fn span_from(&self, mark: (usize, u32, u32)) -> SourceSpan {
        SourceSpan::new(mark.0, self.pos, mark.1, mark.2)
    }
}

/// Tokenize a source text. Always returns the complete token stream
/// (ending in `Eof`) together with any lexical diagnostics.
pub fn tokenize(source: &str) -> (Vec<Token<'_>>, Vec<Diagnostic>) {
    let mut cur = Cursor { src: source, pos: 0, line: 1, col: 1 };
    let mut tokens = Vec::new();
    let mut diags = Vec::new();

    // A UTF-8 byte order mark is rejected outright; golden files must be
    // byte-stable and BOM-prefixed sources would not round-trip.
    if source.as_bytes().starts_with(&[0xEF, 0xBB, 0xBF]) {
        diags.push(Diagnostic::error(
            codes::P004,
            "byte order mark is not allowed; encode sources as plain UTF-8",
            SourceSpan::new(0, 3, 1, 1),
        ));
        cur.pos = 3;
    }

    while let Some(b) = cur.peek() {
        if b.is_ascii_whitespace() {
            cur.bump();
            continue;
        }
        let mark = cur.mark();
        match b {
            b'#' => {
                while let Some(c) = cur.peek() {
                    if c == b'\n' {
                        break;
                    }
                    cur.bump();
                }
                tokens.push(Token {
                    kind: TokenKind::Comment,
                    text: &source[mark.0..cur.pos],
                    span: cur.span_from(mark),
                });
            }
            b'"' => {
                cur.bump();
                let mut terminated = false;
                while let Some(c) = cur.peek() {
                    match c {
                        b'"' => {
                            cur.bump();
                            terminated = true;
                            break;
                        }
                        b'\n' => break,
                        b'\\' => {
                            cur.bump();
                            if matches!(cur.peek(), Some(c) if c != b'\n') {
                                cur.bump();
                            }
                        }
                        _ => cur.bump(),
                    }
                }
                let span = cur.span_from(mark);
                if !terminated {
                    diags.push(Diagnostic::error(
                        codes::P002,
                        format!("unterminated string {}", &source[mark.0..cur.pos]),
                        span,
                    ));
                }
                tokens.push(Token {
                    kind: TokenKind::Str,
                    text: &source[mark.0..cur.pos],
                    span,
                });
            }
            b'<' if source.as_bytes().get(cur.pos + 1) == Some(&b'-') => {
                cur.bump();
                cur.bump();
                tokens.push(Token {
                    kind: TokenKind::Arrow,
                    text: &source[mark.0..cur.pos],
                    span: cur.span_from(mark),
                });
            }
            b'{' | b'}' | b'(' | b')' | b',' | b';' => {
                cur.bump();
                tokens.push(Token {
                    kind: TokenKind::Punct,
                    text: &source[mark.0..cur.pos],
                    span: cur.span_from(mark),
                });
            }
            c if c.is_ascii_alphabetic() => {
                while let Some(c) = cur.peek() {
                    if c.is_ascii_alphanumeric() || c == b'_' {
                        cur.bump();
                    } else if c == b'.' {
                        // A dot continues the identifier only when
                        // followed by an identifier character.
                        match source.as_bytes().get(cur.pos + 1) {
                            Some(n) if n.is_ascii_alphanumeric() || *n == b'_' => {
                                cur.bump();
                            }
                            _ => break,
                        }
                    } else {
                        break;
                    }
                }
                let text = &source[mark.0..cur.pos];
                let kind = if is_keyword(text) { TokenKind::Keyword } else { TokenKind::Ident };
                tokens.push(Token { kind, text, span: cur.span_from(mark) });
            }
            _ => {
                // Consume one full UTF-8 scalar so spans stay on char
                // boundaries.
                let ch_len = source[cur.pos..].chars().next().map_or(1, |c| c.len_utf8());
                for _ in 0..ch_len {
                    cur.bump();
                }
                let span = cur.span_from(mark);
                diags.push(Diagnostic::error(
                    codes::P001,
                    format!("unexpected character {:?}", &source[mark.0..cur.pos]),
                    span,
                ));
                tokens.push(Token {
                    kind: TokenKind::Punct,
                    text: &source[mark.0..cur.pos],
                    span,
                });
            }
        }
    }

    tokens.push(Token {
        kind: TokenKind::Eof,
        text: "",
        span: SourceSpan::new(cur.pos, cur.pos, cur.line, cur.col),
    });
    (tokens, diags)
}

/// Decode the value of a string token (strip quotes, apply escapes).
/// `\"`, `\\`, `\n`, and `\t` are recognized; any other escaped
/// character stands for itself.
pub fn string_value(token_text: &str) -> String {
    let inner = token_text
        .strip_prefix('"')
        .unwrap_or(token_text)
        .strip_suffix('"')
        .unwrap_or_else(|| token_text.strip_prefix('"').unwrap_or(token_text));
    let mut out = String::with_capacity(inner.len());
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next() {
                Some('n') => out.push('\n'),
                Some('t') => out.push('\t'),
                Some(other) => out.push(other),
                None => out.push('\\'),
            }
        } else {
            out.push(c);
        }
    }
    out
}

/// Escape a string value for inclusion in `.hts` source.
pub fn string_literal(value: &str) -> String {
    let mut out = String::with_capacity(value.len() + 2);
    out.push('"');
    for c in value.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src).0.into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn minimal_program() {
        assert_eq!(
            kinds("system s {}"),
            vec![
                TokenKind::Keyword,
                TokenKind::Ident,
                TokenKind::Punct,
                TokenKind::Punct,
                TokenKind::Eof
            ]
        );
    }

    #[test]
    fn arrow_and_dotted_ident() {
        let (tokens, diags) = tokenize("causes R1 <- all(E1.1, E1.4)");
        assert!(diags.is_empty());
        assert!(tokens.iter().any(|t| t.kind == TokenKind::Arrow && t.text == "<-"));
        assert!(tokens.iter().any(|t| t.kind == TokenKind::Ident && t.text == "E1.1"));
    }

    #[test]
    fn comment_only_source() {
        assert_eq!(kinds("# comment\n"), vec![TokenKind::Comment, TokenKind::Eof]);
    }

    #[test]
    fn keywords_sorted_for_binary_search() {
        let mut sorted = KEYWORDS.to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, KEYWORDS);
    }

    #[test]
    fn unterminated_string_reports_p002() {
        let (tokens, diags) = tokenize("hazard H \"oops\n}");
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, "P002");
        assert!(tokens.iter().any(|t| t.kind == TokenKind::Str));
    }

    #[test]
    fn unknown_character_reports_p001_and_keeps_tiling() {
        let src = "hazard H @ x";
        let (tokens, diags) = tokenize(src);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, "P001");
        // Spans tile the source: rebuild it from tokens and gaps.
        let mut rebuilt = String::new();
        let mut pos = 0;
        for t in &tokens {
            rebuilt.push_str(&src[pos..t.span.start]);
            rebuilt.push_str(t.text);
            pos = t.span.end;
        }
        rebuilt.push_str(&src[pos..]);
        assert_eq!(rebuilt, src);
    }

    #[test]
    fn bom_rejected_with_p004() {
        let (_, diags) = tokenize("\u{FEFF}system s {}");
        assert_eq!(diags[0].code, "P004");
    }

    #[test]
    fn string_escapes_round_trip() {
        let value = "a \"quoted\" \\ line\nwith\ttab";
        assert_eq!(string_value(&string_literal(value)), value);
    }
}

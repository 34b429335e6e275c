//! Line tokenizer. Identifiers are lowercase and may contain `-` between
//! alphanumerics (mode names like `best-effort`); variables start uppercase.

use super::Diagnostic;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokKind {
    Ident(String),
    Var(String),
    Num(u32),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Dot,
    Colon,
    Eq,
    Neq,
    Minus,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tok {
    pub kind: TokKind,
    pub line: usize,
    pub col: usize,
}

impl Tok {
    pub fn describe(&self) -> String {
        match &self.kind {
            TokKind::Ident(s) => format!("`{s}`"),
            TokKind::Var(s) => format!("variable `{s}`"),
            TokKind::Num(n) => format!("`{n}`"),
            TokKind::LParen => "`(`".into(),
            TokKind::RParen => "`)`".into(),
            TokKind::LBrace => "`{`".into(),
            TokKind::RBrace => "`}`".into(),
            TokKind::Comma => "`,`".into(),
            TokKind::Dot => "`.`".into(),
            TokKind::Colon => "`:`".into(),
            TokKind::Eq => "`=`".into(),
            TokKind::Neq => "`!=`".into(),
            TokKind::Minus => "`-`".into(),
        }
    }
}

/// Tokenizes one source line, with `%` starting a comment.
pub fn lex_line(text: &str, line_no: usize) -> Result<Vec<Tok>, Diagnostic> {
    let mut toks = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            '%' => break,
            c if c.is_whitespace() => {
                i += 1;
            }
            '(' => {
                toks.push(Tok { kind: TokKind::LParen, line: line_no, col });
                i += 1;
            }
            ')' => {
                toks.push(Tok { kind: TokKind::RParen, line: line_no, col });
                i += 1;
            }
            '{' => {
                toks.push(Tok { kind: TokKind::LBrace, line: line_no, col });
                i += 1;
            }
            '}' => {
                toks.push(Tok { kind: TokKind::RBrace, line: line_no, col });
                i += 1;
            }
            ',' => {
                toks.push(Tok { kind: TokKind::Comma, line: line_no, col });
                i += 1;
            }
            '.' => {
                toks.push(Tok { kind: TokKind::Dot, line: line_no, col });
                i += 1;
            }
            ':' => {
                toks.push(Tok { kind: TokKind::Colon, line: line_no, col });
                i += 1;
            }
            '=' => {
                toks.push(Tok { kind: TokKind::Eq, line: line_no, col });
                i += 1;
            }
            '!' => {
                if chars.get(i + 1) == Some(&'=') {
                    toks.push(Tok { kind: TokKind::Neq, line: line_no, col });
                    i += 2;
                } else {
                    return Err(Diagnostic::new(line_no, col, "stray `!` (expected `!=`)"));
                }
            }
            '-' => {
                toks.push(Tok { kind: TokKind::Minus, line: line_no, col });
                i += 1;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                // an identifier may not start with a digit
                if i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    return Err(Diagnostic::new(line_no, col, format!("bad token starting `{text}`")));
                }
                let n: u32 = text
                    .parse()
                    .map_err(|_| Diagnostic::new(line_no, col, format!("number `{text}` out of range")))?;
                toks.push(Tok { kind: TokKind::Num(n), line: line_no, col });
            }
            c if c.is_ascii_lowercase() => {
                let start = i;
                while i < chars.len() {
                    let c = chars[i];
                    if c.is_ascii_alphanumeric() || c == '_' {
                        i += 1;
                    } else if c == '-'
                        && chars.get(i + 1).is_some_and(|n| n.is_ascii_alphanumeric())
                    {
                        i += 1;
                    } else {
                        break;
                    }
                }
                let name: String = chars[start..i].iter().collect();
                toks.push(Tok { kind: TokKind::Ident(name), line: line_no, col });
            }
            c if c.is_ascii_uppercase() => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let name: String = chars[start..i].iter().collect();
                toks.push(Tok { kind: TokKind::Var(name), line: line_no, col });
            }
            other => {
                return Err(Diagnostic::new(
                    line_no,
                    col,
                    format!("unexpected character `{other}`"),
                ));
            }
        }
    }
    Ok(toks)
}

/// Splits a file into statement token lists, one per non-empty line,
/// collecting lexer diagnostics.
pub fn lex_statements(text: &str, diags: &mut Vec<Diagnostic>) -> Vec<Vec<Tok>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        match lex_line(raw, idx + 1) {
            Ok(toks) if toks.is_empty() => {}
            Ok(toks) => {
                // one statement per line, terminated by `.`
                let last = toks.last().unwrap();
                if last.kind != TokKind::Dot {
                    diags.push(Diagnostic::new(
                        last.line,
                        last.col,
                        "statement must end with `.`",
                    ));
                    continue;
                }
                if toks.iter().filter(|t| t.kind == TokKind::Dot).count() > 1 {
                    diags.push(Diagnostic::new(
                        toks[0].line,
                        toks[0].col,
                        "one statement per line",
                    ));
                    continue;
                }
                out.push(toks);
            }
            Err(d) => diags.push(d),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_mixed_tokens() {
        let toks = lex_line("m2(A, D): normally -permitted(move_through(A, D)) if R1 != R2. % c", 3).unwrap();
        assert!(matches!(toks[0].kind, TokKind::Ident(ref s) if s == "m2"));
        assert!(matches!(toks[2].kind, TokKind::Var(ref s) if s == "A"));
        assert!(toks.iter().any(|t| t.kind == TokKind::Neq));
        assert_eq!(toks.last().unwrap().kind, TokKind::Dot);
    }

    #[test]
    fn kebab_idents_and_negation() {
        let toks = lex_line("mode best-effort permit-omissions.", 1).unwrap();
        assert!(matches!(toks[1].kind, TokKind::Ident(ref s) if s == "best-effort"));
        let toks = lex_line("-busy_working(bob)", 1).unwrap();
        assert_eq!(toks[0].kind, TokKind::Minus);
    }

    #[test]
    fn rejects_garbage() {
        assert!(lex_line("fluent ?bad.", 1).is_err());
        assert!(lex_line("1abc.", 1).is_err());
    }
}

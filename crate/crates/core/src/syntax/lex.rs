//! Tokenizer shared by the term, pattern, type and file-format parsers.

use super::SyntaxError;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Tok {
    Ident(String, Option<u32>),
    Sym(String, Option<u32>),
    Num(u64),
    Backslash,
    TyLam,
    Dot,
    Comma,
    Colon,
    Semi,
    Slash,
    Arrow,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s, None) | Tok::Sym(s, None) => format!("`{s}`"),
            Tok::Ident(s, Some(n)) | Tok::Sym(s, Some(n)) => format!("`{s}#{n}`"),
            Tok::Num(n) => format!("`{n}`"),
            Tok::Backslash => "`\\`".into(),
            Tok::TyLam => "`/\\`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub offset: usize,
    /// No whitespace between this token and the previous one.
    pub glued: bool,
}

pub const SYMBOL_CHARS: &str = "<>+*@=!&|?^~%";

pub fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// 1-based line and column of a byte offset.
pub fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

pub fn parse_error(src: &str, offset: usize, message: impl Into<String>) -> SyntaxError {
    let (line, col) = line_col(src, offset);
    SyntaxError::Parse {
        line,
        col,
        message: message.into(),
    }
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, SyntaxError> {
    let bytes: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut glued = true;
    while i < bytes.len() {
        let (off, c) = bytes[i];
        if c.is_whitespace() {
            glued = false;
            i += 1;
            continue;
        }
        if c == '-' && bytes.get(i + 1).map(|b| b.1) == Some('-') {
            while i < bytes.len() && bytes[i].1 != '\n' {
                i += 1;
            }
            glued = false;
            continue;
        }
        let (tok, next) = if is_ident_start(c) {
            let mut j = i;
            while j < bytes.len() && is_ident_continue(bytes[j].1) {
                j += 1;
            }
            let text = slice(src, &bytes, i, j);
            let (level, j) = level_suffix(src, &bytes, j)?;
            (Tok::Ident(text, level), j)
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < bytes.len() && bytes[j].1.is_ascii_digit() {
                j += 1;
            }
            let text = slice(src, &bytes, i, j);
            let n = text
                .parse::<u64>()
                .map_err(|_| parse_error(src, off, format!("numeral `{text}` is too large")))?;
            (Tok::Num(n), j)
        } else if SYMBOL_CHARS.contains(c) {
            let mut j = i;
            while j < bytes.len() && SYMBOL_CHARS.contains(bytes[j].1) {
                j += 1;
            }
            let text = slice(src, &bytes, i, j);
            let (level, j) = level_suffix(src, &bytes, j)?;
            (Tok::Sym(text, level), j)
        } else {
            let two = bytes.get(i + 1).map(|b| b.1);
            match (c, two) {
                ('-', Some('>')) => (Tok::Arrow, i + 2),
                ('/', Some('\\')) => (Tok::TyLam, i + 2),
                ('\\', _) => (Tok::Backslash, i + 1),
                ('.', _) => (Tok::Dot, i + 1),
                (',', _) => (Tok::Comma, i + 1),
                (':', _) => (Tok::Colon, i + 1),
                (';', _) => (Tok::Semi, i + 1),
                ('/', _) => (Tok::Slash, i + 1),
                ('(', _) => (Tok::LParen, i + 1),
                (')', _) => (Tok::RParen, i + 1),
                ('[', _) => (Tok::LBracket, i + 1),
                (']', _) => (Tok::RBracket, i + 1),
                ('{', _) => (Tok::LBrace, i + 1),
                ('}', _) => (Tok::RBrace, i + 1),
                _ => return Err(parse_error(src, off, format!("unexpected character `{c}`"))),
            }
        };
        out.push(Token {
            tok,
            offset: off,
            glued,
        });
        glued = true;
        i = next;
    }
    out.push(Token {
        tok: Tok::Eof,
        offset: src.len(),
        glued: false,
    });
    Ok(out)
}

fn slice(src: &str, bytes: &[(usize, char)], i: usize, j: usize) -> String {
    let start = bytes[i].0;
    let end = bytes.get(j).map_or(src.len(), |b| b.0);
    src[start..end].to_string()
}

fn level_suffix(src: &str, bytes: &[(usize, char)], j: usize) -> Result<(Option<u32>, usize), SyntaxError> {
    if bytes.get(j).map(|b| b.1) != Some('#') {
        return Ok((None, j));
    }
    let mut k = j + 1;
    while k < bytes.len() && bytes[k].1.is_ascii_digit() {
        k += 1;
    }
    if k == j + 1 {
        return Err(parse_error(src, bytes[j].0, "expected a level after `#`"));
    }
    let text = slice(src, bytes, j + 1, k);
    let level = text
        .parse::<u32>()
        .map_err(|_| parse_error(src, bytes[j].0, format!("level `{text}` is too large")))?;
    Ok((Some(level), k))
}

/// Cursor over a token stream.
pub struct Cursor<'a> {
    pub src: &'a str,
    pub toks: Vec<Token>,
    pub pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Result<Self, SyntaxError> {
        Ok(Cursor {
            src,
            toks: tokenize(src)?,
            pos: 0,
        })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn token(&self) -> &Token {
        &self.toks[self.pos]
    }

    pub fn next_glued(&self) -> bool {
        self.toks.get(self.pos + 1).is_some_and(|t| t.glued)
    }

    pub fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: &Tok) -> Result<(), SyntaxError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.error(format!("expected {}, found {}", tok.describe(), self.peek().describe())))
        }
    }

    pub fn error(&self, message: impl Into<String>) -> SyntaxError {
        parse_error(self.src, self.token().offset, message)
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }
}

//! Written form of domain elements.
//!
//! ```text
//! value := "#" n            m-atom with label n (1-based)
//!        | tag              classical element
//!        | "{" [item ("," item)*] "}"
//! item  := value | "(" value ("," value)+ ")"
//! tag   := [A-Za-z_][A-Za-z0-9_]*
//! ```

use std::fmt;
use std::str::FromStr;

use super::ModelError;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    /// 0-based atom label, written 1-based.
    Atom(usize),
    Tag(String),
    Set(Vec<Value>),
    Tuple(Vec<Value>),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, items: &[Value], open: char, close: char| {
            write!(f, "{open}")?;
            for (i, v) in items.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, "{close}")
        };
        match self {
            Value::Atom(k) => write!(f, "#{}", k + 1),
            Value::Tag(t) => f.write_str(t),
            Value::Set(items) => list(f, items, '{', '}'),
            Value::Tuple(items) => list(f, items, '(', ')'),
        }
    }
}

impl FromStr for Value {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, ModelError> {
        let mut p = ValueParser { src: s, pos: 0 };
        let v = p.value()?;
        p.skip_ws();
        if p.pos != s.len() {
            return Err(p.error("trailing input"));
        }
        Ok(v)
    }
}

struct ValueParser<'a> {
    src: &'a str,
    pos: usize,
}

impl ValueParser<'_> {
    fn error(&self, msg: &str) -> ModelError {
        ModelError::BadValue(format!("`{}` at offset {}: {msg}", self.src, self.pos))
    }

    fn skip_ws(&mut self) {
        self.pos += self.src[self.pos..].len() - self.src[self.pos..].trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &str {
        let rest = &self.src[self.pos..];
        let end = rest.find(|c| !pred(c)).unwrap_or(rest.len());
        self.pos += end;
        &rest[..end]
    }

    fn list(&mut self, close: char) -> Result<Vec<Value>, ModelError> {
        let mut items = Vec::new();
        if self.eat(close) {
            return Ok(items);
        }
        loop {
            items.push(self.value()?);
            if self.eat(close) {
                return Ok(items);
            }
            if !self.eat(',') {
                return Err(self.error(&format!("expected `,` or `{close}`")));
            }
        }
    }

    fn value(&mut self) -> Result<Value, ModelError> {
        match self.peek() {
            Some('#') => {
                self.pos += 1;
                let digits = self.take_while(|c| c.is_ascii_digit());
                match digits.parse::<usize>() {
                    Ok(k) if k >= 1 => Ok(Value::Atom(k - 1)),
                    _ => Err(self.error("expected an atom label #1, #2, ...")),
                }
            }
            Some('{') => {
                self.pos += 1;
                Ok(Value::Set(self.list('}')?))
            }
            Some('(') => {
                self.pos += 1;
                let items = self.list(')')?;
                if items.len() < 2 {
                    return Err(self.error("tuples have at least two components"));
                }
                Ok(Value::Tuple(items))
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let tag = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
                Ok(Value::Tag(tag.to_string()))
            }
            _ => Err(self.error("expected a value")),
        }
    }
}

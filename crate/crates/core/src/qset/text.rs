//! Text form of quasi-sets.
//!
//! ```text
//! qset    := "qset" "{" "pure" ":" "{" [ entry ("," entry)* ] "}" ","
//!                       "classical" ":" "[" [ member ("," member)* ] "]" "}"
//! entry   := species ":" count
//! member  := string | qset
//! species := [A-Za-z_][A-Za-z0-9_]*
//! count   := [0-9]+
//! string  := '"' ( [^"\\] | '\"' | '\\' )* '"'
//! ```
//!
//! Whitespace is free between tokens. Zero counts are accepted and dropped.
//! The canonical printer lists species and members in sorted order:
//! `qset{ pure: {s1: 3, s2: 1}, classical: ["a", "b"] }`.

use std::collections::BTreeMap;

use super::{ClassicalElem, QSet, QSetError, Species};

pub fn print_qset(q: &QSet) -> String {
    let pure: Vec<String> = q.pure.iter().map(|(s, n)| format!("{s}: {n}")).collect();
    let classical: Vec<String> = q.classical.iter().map(print_elem).collect();
    format!(
        "qset{{ pure: {{{}}}, classical: [{}] }}",
        pure.join(", "),
        classical.join(", ")
    )
}

pub(super) fn print_elem(e: &ClassicalElem) -> String {
    match e {
        ClassicalElem::MAtom(tag) => {
            let mut out = String::from("\"");
            for ch in tag.chars() {
                if ch == '"' || ch == '\\' {
                    out.push('\\');
                }
                out.push(ch);
            }
            out.push('"');
            out
        }
        ClassicalElem::Set(q) => print_qset(q),
    }
}

pub fn parse_qset(input: &str) -> Result<QSet, QSetError> {
    let mut p = Parser {
        chars: input.chars().collect(),
        pos: 0,
    };
    let q = p.qset()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error("trailing input after quasi-set"));
    }
    Ok(q)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn error(&self, msg: &str) -> QSetError {
        let consumed = &self.chars[..self.pos.min(self.chars.len())];
        let line = consumed.iter().filter(|c| **c == '\n').count() + 1;
        let col = consumed.iter().rev().take_while(|c| **c != '\n').count() + 1;
        QSetError::Syntax {
            line,
            col,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<(), QSetError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{c}`")))
        }
    }

    fn ident(&mut self) -> Result<String, QSetError> {
        self.skip_ws();
        let start = self.pos;
        while let Some(&c) = self.chars.get(self.pos) {
            let ok = c == '_' || c.is_ascii_alphabetic() || (self.pos > start && c.is_ascii_digit());
            if !ok {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected identifier"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn keyword(&mut self, kw: &str) -> Result<(), QSetError> {
        let at = self.pos;
        match self.ident() {
            Ok(word) if word == kw => Ok(()),
            _ => {
                self.pos = at;
                Err(self.error(&format!("expected `{kw}`")))
            }
        }
    }

    fn count(&mut self) -> Result<u64, QSetError> {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        digits.parse().map_err(|_| {
            self.pos = start;
            self.error("expected a multiplicity")
        })
    }

    fn string(&mut self) -> Result<String, QSetError> {
        self.expect('"')?;
        let mut out = String::new();
        loop {
            match self.chars.get(self.pos).copied() {
                None => return Err(self.error("unterminated string")),
                Some('"') => {
                    self.pos += 1;
                    return Ok(out);
                }
                Some('\\') => {
                    match self.chars.get(self.pos + 1).copied() {
                        Some(c @ ('"' | '\\')) => out.push(c),
                        _ => return Err(self.error("bad escape")),
                    }
                    self.pos += 2;
                }
                Some(c) => {
                    out.push(c);
                    self.pos += 1;
                }
            }
        }
    }

    fn qset(&mut self) -> Result<QSet, QSetError> {
        self.keyword("qset")?;
        self.expect('{')?;
        self.keyword("pure")?;
        self.expect(':')?;
        self.expect('{')?;
        let mut pure = BTreeMap::new();
        if self.peek() != Some('}') {
            loop {
                let at = self.pos;
                let name = self.ident()?;
                self.expect(':')?;
                let n = self.count()?;
                if pure.insert(Species::new(&name), n).is_some() {
                    self.pos = at;
                    return Err(self.error(&format!("species `{name}` listed twice")));
                }
                if self.peek() == Some(',') {
                    self.pos += 1;
                } else {
                    break;
                }
            }
        }
        self.expect('}')?;
        self.expect(',')?;
        self.keyword("classical")?;
        self.expect(':')?;
        self.expect('[')?;
        let mut q = QSet::default();
        for (s, n) in pure {
            q.add_atoms(s, n);
        }
        if self.peek() != Some(']') {
            loop {
                let at = self.pos;
                let member = if self.peek() == Some('"') {
                    ClassicalElem::MAtom(self.string()?)
                } else {
                    ClassicalElem::Set(self.qset()?)
                };
                if let Err(e) = q.insert_classical(member) {
                    self.pos = at;
                    return Err(self.error(&e.to_string()));
                }
                if self.peek() == Some(',') {
                    self.pos += 1;
                } else {
                    break;
                }
            }
        }
        self.expect(']')?;
        self.expect('}')?;
        Ok(q)
    }
}

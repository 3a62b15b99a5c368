//! Sectioned `key = value` documents.
//!
//! Values are numbers, double-quoted strings, bare identifiers, or bracketed
//! comma-separated arrays (which may span lines). `#` comments run to the
//! end of the line.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Str(String),
    Ident(String),
    Array(Vec<Value>),
}

impl Value {
    pub fn describe(&self) -> &'static str {
        match self {
            Value::Num(_) => "number",
            Value::Str(_) => "string",
            Value::Ident(_) => "identifier",
            Value::Array(_) => "array",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: Value,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: String,
    pub line: usize,
    pub entries: Vec<Entry>,
}

pub fn parse_document(text: &str) -> Result<Vec<Section>> {
    let mut r = Reader { src: text.as_bytes(), pos: 0, line: 1 };
    let mut sections: Vec<Section> = Vec::new();
    loop {
        r.skip_blank(true);
        let Some(c) = r.peek() else { break };
        let line = r.line;
        if c == b'[' {
            r.pos += 1;
            r.skip_blank(false);
            let name = r.ident().ok_or_else(|| r.err("expected a section name"))?;
            r.skip_blank(false);
            if !r.eat(b']') {
                return Err(r.err("expected `]` after section name"));
            }
            if sections.iter().any(|s| s.name == name) {
                return Err(Error::Parse { line, message: format!("duplicate section [{name}]") });
            }
            sections.push(Section { name, line, entries: Vec::new() });
        } else {
            let key = r.ident().ok_or_else(|| r.err("expected a key or a [section]"))?;
            r.skip_blank(false);
            if !r.eat(b'=') {
                return Err(r.err(&format!("expected `=` after `{key}`")));
            }
            r.skip_blank(false);
            let value = r.value()?;
            let Some(section) = sections.last_mut() else {
                return Err(Error::Parse { line, message: format!("key `{key}` appears before any [section]") });
            };
            if section.entries.iter().any(|e| e.key == key) {
                return Err(Error::Parse { line, message: format!("duplicate key `{key}` in [{}]", section.name) });
            }
            section.entries.push(Entry { key, value, line });
        }
        r.skip_blank(false);
        match r.peek() {
            None => break,
            Some(b'\n') => {}
            Some(_) => return Err(r.err("expected end of line")),
        }
    }
    Ok(sections)
}

struct Reader<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
}

impl Reader<'_> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err(&self, message: &str) -> Error {
        Error::Parse { line: self.line, message: message.to_string() }
    }

    /// Skips spaces and comments; newlines too when `newlines` is set.
    fn skip_blank(&mut self, newlines: bool) {
        while let Some(c) = self.peek() {
            match c {
                b' ' | b'\t' | b'\r' => self.pos += 1,
                b'\n' if newlines => {
                    self.pos += 1;
                    self.line += 1;
                }
                b'#' => {
                    while self.peek().is_some_and(|c| c != b'\n') {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
    }

    fn ident(&mut self) -> Option<String> {
        let start = self.pos;
        if !self.peek().is_some_and(|c| c.is_ascii_alphabetic() || c == b'_') {
            return None;
        }
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_') {
            self.pos += 1;
        }
        Some(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn value(&mut self) -> Result<Value> {
        match self.peek() {
            Some(b'[') => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    self.skip_blank(true);
                    if self.eat(b']') {
                        return Ok(Value::Array(items));
                    }
                    items.push(self.value()?);
                    self.skip_blank(true);
                    if self.eat(b']') {
                        return Ok(Value::Array(items));
                    }
                    if !self.eat(b',') {
                        return Err(self.err("expected `,` or `]` in array"));
                    }
                }
            }
            Some(b'"') => {
                self.pos += 1;
                let mut bytes = Vec::new();
                loop {
                    match self.peek() {
                        None | Some(b'\n') => return Err(self.err("unterminated string")),
                        Some(b'"') => {
                            self.pos += 1;
                            break;
                        }
                        Some(b'\\') => {
                            let escaped = match self.src.get(self.pos + 1) {
                                Some(b'"') => b'"',
                                Some(b'\\') => b'\\',
                                Some(b'n') => b'\n',
                                Some(b't') => b'\t',
                                _ => return Err(self.err("unknown escape in string")),
                            };
                            bytes.push(escaped);
                            self.pos += 2;
                        }
                        Some(c) => {
                            bytes.push(c);
                            self.pos += 1;
                        }
                    }
                }
                String::from_utf8(bytes).map(Value::Str).map_err(|_| self.err("string is not valid UTF-8"))
            }
            Some(c) if c.is_ascii_digit() || matches!(c, b'+' | b'-' | b'.') => {
                let start = self.pos;
                while self
                    .peek()
                    .is_some_and(|c| c.is_ascii_alphanumeric() || matches!(c, b'+' | b'-' | b'.' | b'_'))
                {
                    self.pos += 1;
                }
                let text = String::from_utf8_lossy(&self.src[start..self.pos]).replace('_', "");
                match text.parse::<f64>() {
                    Ok(x) if x.is_finite() => Ok(Value::Num(x)),
                    _ => Err(self.err(&format!("invalid number `{text}`"))),
                }
            }
            _ => match self.ident() {
                Some(name) => Ok(Value::Ident(name)),
                None => Err(self.err("expected a value")),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_sections_values_and_comments() {
        let doc = "# header\n[frame]\ndim = 2   # trailing\nlabel = \"m \\\"x\\\"\"\nfield = real\n\n[measure]\nrows = [[1, -2.5e-1],\n  [3, 4], # comment inside\n]\n";
        let s = parse_document(doc).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].entries[0].value, Value::Num(2.0));
        assert_eq!(s[0].entries[1].value, Value::Str("m \"x\"".into()));
        assert_eq!(s[0].entries[2].value, Value::Ident("real".into()));
        let rows = &s[1].entries[0];
        assert_eq!(rows.line, 8);
        assert_eq!(
            rows.value,
            Value::Array(vec![
                Value::Array(vec![Value::Num(1.0), Value::Num(-0.25)]),
                Value::Array(vec![Value::Num(3.0), Value::Num(4.0)]),
            ])
        );
    }

    #[test]
    fn errors_report_lines() {
        let line = |doc: &str| match parse_document(doc) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("{other:?}"),
        };
        assert_eq!(line("dim = 2\n"), 1);
        assert_eq!(line("[frame]\ndim 2\n"), 2);
        assert_eq!(line("[frame]\ndim = 2\ndim = 3\n"), 3);
        assert_eq!(line("[frame]\n[frame]\n"), 2);
        assert_eq!(line("[frame]\nx = [1,\n2\n"), 4);
        assert_eq!(line("[frame]\nx = 1 2\n"), 2);
        assert_eq!(line("[frame]\nx = 1..2\n"), 2);
        assert_eq!(line("[frame]\nx = \"open\n"), 2);
    }
}

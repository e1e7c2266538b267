//! Finding the source line of a value inside a JSON document.
//!
//! serde_json reports positions only for syntax and type errors. Semantic
//! problems (an edge naming an unknown vertex, a negative density value) are
//! found after deserialization, so we walk the already-validated text a
//! second time to recover the line of the offending value.

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Segment {
    Key(String),
    Index(usize),
}

impl From<&str> for Segment {
    fn from(s: &str) -> Self {
        Segment::Key(s.to_string())
    }
}

impl From<usize> for Segment {
    fn from(i: usize) -> Self {
        Segment::Index(i)
    }
}

/// Builds a path from a mix of keys and indices: `path!["edges", 3, "u"]`.
#[macro_export]
macro_rules! path {
    ($($seg:expr),* $(,)?) => {
        [$($crate::locate::Segment::from($seg)),*]
    };
}

/// 1-based line of the value at `path`, or of the deepest prefix that exists.
/// `text` must be valid JSON.
pub fn line_of(text: &str, path: &[Segment]) -> usize {
    let mut s = Scanner {
        bytes: text.as_bytes(),
        pos: 0,
    };
    s.skip_ws();
    let mut best = s.line();
    for seg in path {
        let found = match (seg, s.peek()) {
            (Segment::Key(k), Some(b'{')) => s.find_key(k),
            (Segment::Index(i), Some(b'[')) => s.find_index(*i),
            _ => false,
        };
        if !found {
            break;
        }
        best = s.line();
    }
    best
}

struct Scanner<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Scanner<'_> {
    fn line(&self) -> usize {
        1 + self.bytes[..self.pos]
            .iter()
            .filter(|&&b| b == b'\n')
            .count()
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.pos += 1;
        }
    }

    /// Consumes a string literal and returns its decoded contents.
    fn string(&mut self) -> String {
        let start = self.pos;
        self.pos += 1;
        while let Some(b) = self.peek() {
            self.pos += 1;
            match b {
                b'\\' => self.pos += 1,
                b'"' => break,
                _ => {}
            }
        }
        let raw = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap_or("\"\"");
        serde_json::from_str(raw).unwrap_or_default()
    }

    fn skip_value(&mut self) {
        match self.peek() {
            Some(b'"') => {
                self.string();
            }
            Some(b'{' | b'[') => {
                let mut depth = 0usize;
                while let Some(b) = self.peek() {
                    match b {
                        b'"' => {
                            self.string();
                            continue;
                        }
                        b'{' | b'[' => depth += 1,
                        b'}' | b']' => {
                            depth -= 1;
                            if depth == 0 {
                                self.pos += 1;
                                return;
                            }
                        }
                        _ => {}
                    }
                    self.pos += 1;
                }
            }
            _ => {
                while !matches!(
                    self.peek(),
                    None | Some(b',' | b'}' | b']' | b' ' | b'\t' | b'\n' | b'\r')
                ) {
                    self.pos += 1;
                }
            }
        }
    }

    /// Positions the cursor on the value of `key` in the object at the cursor.
    fn find_key(&mut self, key: &str) -> bool {
        let start = self.pos;
        self.pos += 1;
        loop {
            self.skip_ws();
            if self.peek() != Some(b'"') {
                self.pos = start;
                return false;
            }
            let k = self.string();
            self.skip_ws();
            self.pos += 1; // ':'
            self.skip_ws();
            if k == key {
                return true;
            }
            self.skip_value();
            self.skip_ws();
            if self.peek() == Some(b',') {
                self.pos += 1;
            }
        }
    }

    fn find_index(&mut self, index: usize) -> bool {
        let start = self.pos;
        self.pos += 1;
        for i in 0.. {
            self.skip_ws();
            if matches!(self.peek(), None | Some(b']')) {
                self.pos = start;
                return false;
            }
            if i == index {
                return true;
            }
            self.skip_value();
            self.skip_ws();
            if self.peek() == Some(b',') {
                self.pos += 1;
            }
        }
        unreachable!()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = r#"{
  "vertices": ["a", "b",
    "c"],
  "edges": [
    {"u": "a", "w": "b", "length": "1"},
    {"u": "b",
     "w": "zz", "length": "1"}
  ],
  "density": {"a": "1", "b": "{[\"", "c": "2"}
}"#;

    #[test]
    fn finds_nested_values() {
        assert_eq!(line_of(DOC, &path!["vertices", 2]), 3);
        assert_eq!(line_of(DOC, &path!["edges", 1, "u"]), 6);
        assert_eq!(line_of(DOC, &path!["edges", 1, "w"]), 7);
        assert_eq!(line_of(DOC, &path!["density", "c"]), 9);
    }

    #[test]
    fn falls_back_to_the_deepest_prefix() {
        assert_eq!(line_of(DOC, &path!["edges", 7, "u"]), 4);
        assert_eq!(line_of(DOC, &path!["nowhere"]), 1);
        assert_eq!(line_of(DOC, &path!["vertices", "key"]), 2);
    }
}

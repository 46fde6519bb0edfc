//! Line-oriented text files: a header line naming the format and version,
//! then `key=value` lines. Keys may repeat (one line per vector); vectors are
//! comma-separated base-10 integers.

use std::fmt::{self, Display};
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TextFile {
    header: String,
    entries: Vec<(String, String)>,
}

impl TextFile {
    pub fn new(header: &str) -> Self {
        Self {
            header: header.to_string(),
            entries: Vec::new(),
        }
    }

    pub fn header(&self) -> &str {
        &self.header
    }

    pub fn push(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push_csv<T: Display>(&mut self, key: &str, values: &[T]) -> &mut Self {
        self.push(key, to_csv(values))
    }

    pub fn get(&self, key: &str) -> Result<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| Error::Parse(format!("missing field `{key}`")))
    }

    pub fn get_all(&self, key: &str) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .collect()
    }

    pub fn field<T: FromStr>(&self, key: &str) -> Result<T> {
        let v = self.get(key)?;
        v.parse()
            .map_err(|_| Error::Parse(format!("field `{key}`: cannot parse `{v}`")))
    }

    pub fn csv<T: FromStr>(&self, key: &str) -> Result<Vec<T>> {
        parse_csv(self.get(key)?)
    }

    pub fn csv_all<T: FromStr>(&self, key: &str) -> Result<Vec<Vec<T>>> {
        self.get_all(key).into_iter().map(parse_csv).collect()
    }

    /// Parses `text`, requiring its first line to be `header`.
    pub fn parse(text: &str, header: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        match lines.next() {
            Some(h) if h == header => {}
            Some(h) => return Err(Error::Parse(format!("expected header `{header}`, found `{h}`"))),
            None => return Err(Error::Parse("empty file".into())),
        }
        let mut file = TextFile::new(header);
        for line in lines {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, found `{line}`")))?;
            file.push(k.trim(), v.trim());
        }
        Ok(file)
    }
}

impl Display for TextFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.header)?;
        for (k, v) in &self.entries {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

pub fn to_csv<T: Display>(values: &[T]) -> String {
    values.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

pub fn parse_csv<T: FromStr>(s: &str) -> Result<Vec<T>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse()
                .map_err(|_| Error::Parse(format!("bad number `{t}`")))
        })
        .collect()
}

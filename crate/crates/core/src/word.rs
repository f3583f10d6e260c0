//! Data words: finite sequences over `Σ × 𝔇^m`.
//!
//! Positions are 1-based throughout the public API. Data values are plain
//! `u64` tokens; every built-in interpretation only looks at their equality
//! and at positional order.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// A data value. The reference domain is the natural numbers.
pub type Value = u64;

/// Index of a label inside its [`Alphabet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(pub u16);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WordError {
    #[error("alphabet must contain at least one label")]
    EmptyAlphabet,
    #[error("duplicate label `{0}` in alphabet")]
    DuplicateLabel(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("position {pos}: expected {expected} data values, found {found}")]
    Arity {
        pos: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("position {0} out of range")]
    OutOfRange(usize),
}

/// Γ-extension bookkeeping: label `(a, g)` of an extended alphabet has index
/// `a * |Γ| + g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projection {
    pub base: Arc<Alphabet>,
    pub gamma: Vec<String>,
}

/// Finite label set plus data arity `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    labels: Vec<String>,
    m: usize,
    projection: Option<Projection>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(
        labels: impl IntoIterator<Item = S>,
        m: usize,
    ) -> Result<Self, WordError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(WordError::EmptyAlphabet);
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(WordError::DuplicateLabel(l.clone()));
            }
        }
        Ok(Alphabet {
            labels,
            m,
            projection: None,
        })
    }

    /// `Σ × Γ` where `gamma` names the annotation components.
    pub fn extend(base: &Arc<Alphabet>, gamma: Vec<String>) -> Result<Self, WordError> {
        if gamma.is_empty() {
            return Err(WordError::EmptyAlphabet);
        }
        let labels = base
            .labels
            .iter()
            .flat_map(|a| gamma.iter().map(move |g| format!("{a}:{g}")))
            .collect::<Vec<_>>();
        let mut ext = Alphabet::new(labels, base.m)?;
        ext.projection = Some(Projection {
            base: base.clone(),
            gamma,
        });
        Ok(ext)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Data arity.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn projection(&self) -> Option<&Projection> {
        self.projection.as_ref()
    }

    pub fn label(&self, name: &str) -> Option<Label> {
        self.labels
            .iter()
            .position(|l| l == name)
            .map(|i| Label(i as u16))
    }

    pub fn name(&self, label: Label) -> &str {
        &self.labels[label.0 as usize]
    }

    pub fn all_labels(&self) -> impl Iterator<Item = Label> {
        (0..self.labels.len() as u16).map(Label)
    }

    /// Splits an extended label into its base label and Γ index.
    pub fn split_label(&self, label: Label) -> Option<(Label, usize)> {
        let p = self.projection.as_ref()?;
        let g = p.gamma.len();
        let idx = label.0 as usize;
        Some((Label((idx / g) as u16), idx % g))
    }

    pub fn join_label(&self, base: Label, gamma: usize) -> Option<Label> {
        let p = self.projection.as_ref()?;
        Some(Label((base.0 as usize * p.gamma.len() + gamma) as u16))
    }
}

/// One position of a data word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub label: Label,
    pub data: Vec<Value>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DataWord {
    alphabet: Arc<Alphabet>,
    letters: Vec<Letter>,
}

impl DataWord {
    pub fn new(alphabet: Arc<Alphabet>, letters: Vec<Letter>) -> Result<Self, WordError> {
        for (i, l) in letters.iter().enumerate() {
            if l.label.0 as usize >= alphabet.len() {
                return Err(WordError::UnknownLabel(format!("#{}", l.label.0)));
            }
            if l.data.len() != alphabet.m() {
                return Err(WordError::Arity {
                    pos: i + 1,
                    expected: alphabet.m(),
                    found: l.data.len(),
                });
            }
        }
        Ok(DataWord { alphabet, letters })
    }

    pub fn empty(alphabet: Arc<Alphabet>) -> Self {
        DataWord {
            alphabet,
            letters: Vec::new(),
        }
    }

    /// Builds a word from `(label name, data)` pairs.
    pub fn from_named<'a>(
        alphabet: Arc<Alphabet>,
        letters: impl IntoIterator<Item = (&'a str, Vec<Value>)>,
    ) -> Result<Self, WordError> {
        let letters = letters
            .into_iter()
            .map(|(name, data)| {
                let label = alphabet
                    .label(name)
                    .ok_or_else(|| WordError::UnknownLabel(name.to_string()))?;
                Ok(Letter { label, data })
            })
            .collect::<Result<Vec<_>, WordError>>()?;
        DataWord::new(alphabet, letters)
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn m(&self) -> usize {
        self.alphabet.m()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Letter at 1-based position `i`.
    pub fn letter(&self, i: usize) -> &Letter {
        &self.letters[i - 1]
    }

    /// `ℓ(i)`.
    pub fn label(&self, i: usize) -> Label {
        self.letters[i - 1].label
    }

    pub fn label_name(&self, i: usize) -> &str {
        self.alphabet.name(self.label(i))
    }

    /// `dᵏ(i)` with 1-based `k`.
    pub fn datum(&self, i: usize, k: usize) -> Value {
        self.letters[i - 1].data[k - 1]
    }

    /// `ν(i)`: the partition of `{1..m}` by value equality at `i`.
    pub fn partition(&self, i: usize) -> Partition {
        Partition::of_tuple(&self.letters[i - 1].data)
    }

    /// Drops position `i`.
    pub fn remove(&self, i: usize) -> Result<DataWord, WordError> {
        if i == 0 || i > self.len() {
            return Err(WordError::OutOfRange(i));
        }
        let mut letters = self.letters.clone();
        letters.remove(i - 1);
        Ok(DataWord {
            alphabet: self.alphabet.clone(),
            letters,
        })
    }

    /// Applies `f` to every data value.
    pub fn map_values(&self, mut f: impl FnMut(Value) -> Value) -> DataWord {
        DataWord {
            alphabet: self.alphabet.clone(),
            letters: self
                .letters
                .iter()
                .map(|l| Letter {
                    label: l.label,
                    data: l.data.iter().map(|&v| f(v)).collect(),
                })
                .collect(),
        }
    }

    /// `proj_Σ`: drops the Γ component of an extended word. Words over a
    /// plain alphabet are returned unchanged.
    pub fn project(&self) -> DataWord {
        match self.alphabet.projection() {
            None => self.clone(),
            Some(p) => DataWord {
                alphabet: p.base.clone(),
                letters: self
                    .letters
                    .iter()
                    .map(|l| Letter {
                        label: self.alphabet.split_label(l.label).unwrap().0,
                        data: l.data.clone(),
                    })
                    .collect(),
            },
        }
    }

    /// Annotates each position with a Γ index, producing a word over `ext`.
    pub fn annotate(&self, ext: &Arc<Alphabet>, gammas: &[usize]) -> DataWord {
        assert_eq!(gammas.len(), self.len());
        DataWord {
            alphabet: ext.clone(),
            letters: self
                .letters
                .iter()
                .zip(gammas)
                .map(|(l, &g)| Letter {
                    label: ext.join_label(l.label, g).expect("extended alphabet"),
                    data: l.data.clone(),
                })
                .collect(),
        }
    }

    /// Renames data values to `1, 2, …` in order of first occurrence,
    /// scanning positions left to right and coordinates `1..m` within a
    /// position. One renaming is shared by all coordinates.
    pub fn normalized(&self) -> DataWord {
        let mut seen: HashMap<Value, Value> = HashMap::new();
        self.map_values(|v| {
            let next = seen.len() as Value + 1;
            *seen.entry(v).or_insert(next)
        })
    }

    /// Distinct data values, ascending.
    pub fn values(&self) -> Vec<Value> {
        let mut vs: Vec<Value> = self
            .letters
            .iter()
            .flat_map(|l| l.data.iter().copied())
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// Parses the text format: `#alphabet` and `#m` headers followed by one
    /// `label v1 … vm` line per position. Other `#` lines are comments.
    pub fn parse(text: &str) -> Result<DataWord, WordError> {
        let mut labels: Option<Vec<String>> = None;
        let mut m: Option<usize> = None;
        let mut rows: Vec<(usize, String, Vec<Value>)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix('#') {
                let rest = rest.trim_start();
                if let Some(ls) = rest.strip_prefix("alphabet") {
                    labels = Some(ls.split_whitespace().map(str::to_string).collect());
                } else if let Some(ms) = rest
                    .strip_prefix("m ")
                    .or_else(|| rest.strip_prefix('m').filter(|s| s.is_empty()))
                {
                    m = Some(ms.trim().parse().map_err(|_| WordError::Format {
                        line,
                        msg: format!("bad arity `{}`", ms.trim()),
                    })?);
                }
                continue;
            }
            let content = match trimmed.find('#') {
                Some(c) => trimmed[..c].trim(),
                None => trimmed,
            };
            let mut parts = content.split_whitespace();
            let label = parts.next().unwrap().to_string();
            let data = parts
                .map(|p| {
                    p.parse::<Value>().map_err(|_| WordError::Format {
                        line,
                        msg: format!("bad data value `{p}`"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push((line, label, data));
        }
        let labels = labels.ok_or(WordError::Format {
            line: 0,
            msg: "missing `#alphabet` header".into(),
        })?;
        let m = m.unwrap_or_else(|| rows.first().map(|r| r.2.len()).unwrap_or(0));
        let alphabet = Arc::new(Alphabet::new(labels, m)?);
        let mut letters = Vec::with_capacity(rows.len());
        for (line, name, data) in rows {
            let label = alphabet.label(&name).ok_or_else(|| WordError::Format {
                line,
                msg: format!("unknown label `{name}`"),
            })?;
            if data.len() != m {
                return Err(WordError::Format {
                    line,
                    msg: format!("expected {m} data values, found {}", data.len()),
                });
            }
            letters.push(Letter { label, data });
        }
        DataWord::new(alphabet, letters)
    }

    /// Inline notation `(r,8)(a,5)` or `(n,2,2)(f,2,3)`.
    pub fn compact(&self) -> String {
        let mut s = String::new();
        for l in &self.letters {
            s.push('(');
            s.push_str(self.alphabet.name(l.label));
            for v in &l.data {
                s.push(',');
                s.push_str(&v.to_string());
            }
            s.push(')');
        }
        if s.is_empty() {
            s.push('ε');
        }
        s
    }

    /// Parses the inline notation produced by [`DataWord::compact`].
    pub fn parse_compact(alphabet: Arc<Alphabet>, text: &str) -> Result<DataWord, WordError> {
        let text = text.trim();
        if text.is_empty() || text == "ε" || text == "()" {
            return Ok(DataWord::empty(alphabet));
        }
        let mut letters = Vec::new();
        let mut rest = text;
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('(')
                .and_then(|r| r.find(')').map(|e| (&r[..e], &r[e + 1..])));
            let Some((inner, tail)) = body else {
                return Err(WordError::Format {
                    line: 1,
                    msg: format!("expected `(label,v…)` at `{rest}`"),
                });
            };
            // Extended labels may contain commas; the last `m` fields are data.
            let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
            let split = parts.len().saturating_sub(alphabet.m()).max(1);
            let name = parts[..split].join(",");
            let label = alphabet
                .label(&name)
                .ok_or_else(|| WordError::UnknownLabel(name.clone()))?;
            let data = parts[split..]
                .iter()
                .map(|p| {
                    p.parse::<Value>().map_err(|_| WordError::Format {
                        line: 1,
                        msg: format!("bad data value `{p}`"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            letters.push(Letter { label, data });
            rest = tail.trim_start();
        }
        DataWord::new(alphabet, letters)
    }
}

impl fmt::Display for DataWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "#alphabet {}", self.alphabet.labels().join(" "))?;
        writeln!(f, "#m {}", self.m())?;
        for l in &self.letters {
            write!(f, "{}", self.alphabet.name(l.label))?;
            for v in &l.data {
                write!(f, " {v}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// A partition of `{1..m}`, stored as a restricted growth string: entry
/// `k-1` is the block index of `k`, blocks numbered by first occurrence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition(Vec<u8>);

impl Partition {
    pub fn of_tuple(data: &[Value]) -> Self {
        let mut firsts: Vec<Value> = Vec::new();
        let rgs = data
            .iter()
            .map(|v| match firsts.iter().position(|f| f == v) {
                Some(b) => b as u8,
                None => {
                    firsts.push(*v);
                    (firsts.len() - 1) as u8
                }
            })
            .collect();
        Partition(rgs)
    }

    pub fn from_rgs(rgs: Vec<u8>) -> Self {
        Partition(rgs)
    }

    pub fn rgs(&self) -> &[u8] {
        &self.0
    }

    pub fn m(&self) -> usize {
        self.0.len()
    }

    /// Whether `k` and `l` (1-based) share a block.
    pub fn same_block(&self, k: usize, l: usize) -> bool {
        self.0[k - 1] == self.0[l - 1]
    }

    /// Blocks as sorted lists of 1-based indices, ordered by least element.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let count = self.0.iter().map(|&b| b as usize + 1).max().unwrap_or(0);
        let mut blocks = vec![Vec::new(); count];
        for (k, &b) in self.0.iter().enumerate() {
            blocks[b as usize].push(k + 1);
        }
        blocks
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks = self
            .blocks()
            .into_iter()
            .map(|b| {
                let inner = b.iter().map(|k| k.to_string()).collect::<Vec<_>>();
                format!("{{{}}}", inner.join(","))
            })
            .collect::<Vec<_>>();
        write!(f, "{{{}}}", blocks.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ra() -> Arc<Alphabet> {
        Arc::new(Alphabet::new(["r", "a"], 1).unwrap())
    }

    #[test]
    fn normalize_numbers_by_first_occurrence() {
        let w = DataWord::parse_compact(ra(), "(r,8)(r,5)(a,8)").unwrap();
        assert_eq!(w.normalized().compact(), "(r,1)(r,2)(a,1)");
        let n = w.normalized();
        assert_eq!(n.normalized(), n);
    }

    #[test]
    fn normalize_shares_renaming_across_coordinates() {
        let ab = Arc::new(Alphabet::new(["n"], 2).unwrap());
        let w = DataWord::parse_compact(ab, "(n,7,9)(n,9,7)").unwrap();
        assert_eq!(w.normalized().compact(), "(n,1,2)(n,2,1)");
    }

    #[test]
    fn partition_of_equal_pair() {
        let p = Partition::of_tuple(&[2, 2]);
        assert_eq!(p.blocks(), vec![vec![1, 2]]);
        assert_eq!(p.to_string(), "{{1,2}}");
        let q = Partition::of_tuple(&[3, 1, 3]);
        assert_eq!(q.blocks(), vec![vec![1, 3], vec![2]]);
        assert!(q.same_block(1, 3));
        assert!(!q.same_block(1, 2));
        assert_eq!(Partition::of_tuple(&[]).blocks(), Vec::<Vec<usize>>::new());
    }

    #[test]
    fn text_format_roundtrip() {
        let text = "#alphabet r a\n#m 1\n# a comment\nr 8\nr 5 # trailing\na 8\n";
        let w = DataWord::parse(text).unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(w.datum(2, 1), 5);
        assert_eq!(DataWord::parse(&w.to_string()).unwrap(), w);
    }

    #[test]
    fn text_format_errors() {
        assert!(matches!(
            DataWord::parse("#alphabet r\n#m 1\nx 1\n"),
            Err(WordError::Format { line: 3, .. })
        ));
        assert!(matches!(
            DataWord::parse("#alphabet r\n#m 2\nr 1\n"),
            Err(WordError::Format { line: 3, .. })
        ));
        assert!(DataWord::parse("r 1\n").is_err());
        assert_eq!(
            Alphabet::new(Vec::<String>::new(), 0),
            Err(WordError::EmptyAlphabet)
        );
    }

    #[test]
    fn empty_word_is_valid() {
        let w = DataWord::parse("#alphabet r a\n#m 1\n").unwrap();
        assert!(w.is_empty());
        assert_eq!(w.compact(), "ε");
        assert_eq!(DataWord::parse_compact(ra(), "ε").unwrap(), w);
    }

    #[test]
    fn extension_and_projection() {
        let base = ra();
        let ext = Arc::new(Alphabet::extend(&base, vec!["{}".into(), "{1}".into()]).unwrap());
        assert_eq!(ext.len(), 4);
        assert_eq!(ext.name(Label(3)), "a:{1}");
        let w = DataWord::parse_compact(base.clone(), "(r,1)(a,1)").unwrap();
        let annotated = w.annotate(&ext, &[1, 0]);
        assert_eq!(annotated.compact(), "(r:{1},1)(a:{},1)");
        assert_eq!(annotated.project(), w);
    }
}

use std::fmt;
use std::path::Path;
use std::sync::Arc;

/// A region of a source file. Offsets are byte indices into the
/// LF-normalized text; line and column are 1-based, columns count chars.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub file: Arc<Path>,
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

impl Default for SourceSpan {
    fn default() -> Self {
        Self::synthetic(Arc::from(Path::new("")))
    }
}

impl SourceSpan {
    /// A zero-length span at the start of `file`, used for nodes that did
    /// not come from source text.
    pub fn synthetic(file: Arc<Path>) -> Self {
        Self {
            file,
            start: 0,
            end: 0,
            line: 1,
            column: 1,
        }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    /// Smallest span covering both `self` and `other`. Line and column are
    /// taken from whichever starts first.
    pub fn to(&self, other: &SourceSpan) -> SourceSpan {
        let (first, _) = if self.start <= other.start {
            (self, other)
        } else {
            (other, self)
        };
        SourceSpan {
            file: self.file.clone(),
            start: self.start.min(other.start),
            end: self.end.max(other.end),
            line: first.line,
            column: first.column,
        }
    }

    pub fn contains(&self, other: &SourceSpan) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file.display(), self.line, self.column)
    }
}

/// Maps byte offsets to line/column positions.
#[derive(Debug, Clone)]
pub struct LineIndex<'a> {
    text: &'a str,
    line_starts: Vec<usize>,
}

impl<'a> LineIndex<'a> {
    pub fn new(text: &'a str) -> Self {
        let mut line_starts = vec![0];
        line_starts.extend(text.match_indices('\n').map(|(i, _)| i + 1));
        Self { text, line_starts }
    }

    /// 1-based (line, column) of `offset`. Offsets past the end clamp to
    /// the end of the text.
    pub fn position(&self, offset: usize) -> (usize, usize) {
        let offset = offset.min(self.text.len());
        let line = match self.line_starts.binary_search(&offset) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let start = self.line_starts[line];
        let column = self.text[start..offset].chars().count() + 1;
        (line + 1, column)
    }

    /// Text of the 1-based `line`, without its terminator.
    pub fn line_text(&self, line: usize) -> Option<&'a str> {
        let start = *self.line_starts.get(line.checked_sub(1)?)?;
        let end = self
            .line_starts
            .get(line)
            .map(|next| next - 1)
            .unwrap_or(self.text.len());
        Some(&self.text[start..end])
    }

    pub fn span(&self, file: &Arc<Path>, start: usize, end: usize) -> SourceSpan {
        let (line, column) = self.position(start);
        SourceSpan {
            file: file.clone(),
            start,
            end,
            line,
            column,
        }
    }
}

/// Normalizes CRLF line endings to LF.
pub fn normalize_newlines(source: &str) -> std::borrow::Cow<'_, str> {
    if source.contains("\r\n") {
        std::borrow::Cow::Owned(source.replace("\r\n", "\n"))
    } else {
        std::borrow::Cow::Borrowed(source)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_are_one_based() {
        let idx = LineIndex::new("ab\ncd\n");
        assert_eq!(idx.position(0), (1, 1));
        assert_eq!(idx.position(1), (1, 2));
        assert_eq!(idx.position(3), (2, 1));
        assert_eq!(idx.position(6), (3, 1));
        assert_eq!(idx.line_text(2), Some("cd"));
        assert_eq!(idx.line_text(3), Some(""));
        assert_eq!(idx.line_text(4), None);
    }

    #[test]
    fn end_of_file_without_newline() {
        let idx = LineIndex::new("abc");
        assert_eq!(idx.position(3), (1, 4));
        assert_eq!(idx.position(99), (1, 4));
    }

    #[test]
    fn columns_count_chars() {
        let idx = LineIndex::new("\"é\" x");
        assert_eq!(idx.position(5), (1, 5));
    }
}

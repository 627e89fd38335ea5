use std::fmt;

/// Location of a parsed construct: 1-based line, 1-based column range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub file: String,
    pub line: usize,
    pub col: usize,
    pub end_col: usize,
}

impl SourceSpan {
    pub fn new(file: &str, line: usize, col: usize, end_col: usize) -> SourceSpan {
        SourceSpan { file: file.to_string(), line, col, end_col }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.col)
    }
}

#[derive(Clone, Debug)]
pub struct Diagnostic {
    pub span: SourceSpan,
    pub message: String,
}

impl Diagnostic {
    pub fn new(span: SourceSpan, message: impl Into<String>) -> Diagnostic {
        Diagnostic { span, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)
    }
}

//! Tolerant LaTeX scanner. No macro expansion: commands are recognized by
//! name, braces are matched, and anything unknown keeps its argument text.

use std::fmt;

use super::segment::Segmenter;
use super::{classify_position, normalize_title, Section, Sentence};
use crate::error::{Error, Result};
use crate::lexical::MATH_TOKEN;

const MATH_ENVS: &[&str] = &[
    "equation",
    "align",
    "alignat",
    "eqnarray",
    "gather",
    "multline",
    "flalign",
    "displaymath",
    "math",
];

const DROPPED_ENVS: &[&str] = &[
    "figure",
    "table",
    "tabular",
    "tabularx",
    "longtable",
    "thebibliography",
    "verbatim",
    "lstlisting",
    "minted",
    "tikzpicture",
    "picture",
    "pspicture",
    "comment",
    "algorithm",
    "algorithmic",
    "wrapfigure",
    "subfigure",
    "keywords",
];

/// Commands whose first `n` mandatory arguments are discarded. Anything
/// after those arguments is scanned as ordinary text.
const DROPPED_ARGS: &[(&str, usize)] = &[
    ("label", 1),
    ("ref", 1),
    ("eqref", 1),
    ("pageref", 1),
    ("autoref", 1),
    ("cref", 1),
    ("Cref", 1),
    ("cite", 1),
    ("citep", 1),
    ("citet", 1),
    ("citealp", 1),
    ("citealt", 1),
    ("citeauthor", 1),
    ("citeyear", 1),
    ("nocite", 1),
    ("newcite", 1),
    ("includegraphics", 1),
    ("bibliography", 1),
    ("bibliographystyle", 1),
    ("usepackage", 1),
    ("RequirePackage", 1),
    ("documentclass", 1),
    ("footnote", 1),
    ("footnotetext", 1),
    ("url", 1),
    ("href", 1),
    ("thanks", 1),
    ("vspace", 1),
    ("hspace", 1),
    ("vskip", 0),
    ("input", 1),
    ("include", 1),
    ("title", 1),
    ("author", 1),
    ("affiliation", 1),
    ("address", 1),
    ("email", 1),
    ("date", 1),
    ("caption", 1),
    ("pacs", 1),
    ("keywords", 1),
    ("bibitem", 1),
    ("hypersetup", 1),
    ("graphicspath", 1),
    ("linespread", 1),
    ("pagestyle", 1),
    ("thispagestyle", 1),
    ("markright", 1),
    ("color", 1),
    ("textcolor", 1),
    ("colorbox", 1),
    ("setlength", 2),
    ("addtolength", 2),
    ("setcounter", 2),
    ("addtocounter", 2),
    ("markboth", 2),
    ("newcommand", 2),
    ("renewcommand", 2),
    ("providecommand", 2),
    ("DeclareMathOperator", 2),
    ("newtheorem", 2),
    ("newenvironment", 3),
    ("renewenvironment", 3),
];

const SECTIONING: &[&str] = &["section", "chapter"];
const DROPPED_HEADINGS: &[&str] = &["subsection", "subsubsection", "paragraph", "subparagraph"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Warning {
    /// A math region with no closing delimiter. The rest of its paragraph is
    /// dropped.
    UnbalancedMath { offset: usize, opener: String },
    /// An environment or argument that never closes.
    Unterminated { offset: usize, what: String },
    /// A section whose body produced no sentences.
    EmptySection { title: String },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::UnbalancedMath { offset, opener } => {
                write!(
                    f,
                    "unbalanced math `{opener}` at byte {offset}, region dropped"
                )
            }
            Warning::Unterminated { offset, what } => {
                write!(f, "unterminated {what} at byte {offset}")
            }
            Warning::EmptySection { title } => write!(f, "section `{title}` has no text, skipped"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Extraction {
    pub sections: Vec<Section>,
    pub warnings: Vec<Warning>,
    /// Math regions replaced by the placeholder in section bodies.
    pub math_regions: usize,
}

impl Extraction {
    pub fn into_document(self, paper_id: &str, version_label: &str) -> super::Document {
        super::Document {
            paper_id: paper_id.to_string(),
            version_label: version_label.to_string(),
            sections: self.sections,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Extractor {
    segmenter: Segmenter,
}

impl Extractor {
    pub fn new(segmenter: Segmenter) -> Self {
        Extractor { segmenter }
    }

    /// Extracts every source in the given order. Sources holding a
    /// `\begin{document}` contribute only their body.
    pub fn extract<S: AsRef<str>>(&self, sources: &[S]) -> Result<Extraction> {
        let mut scanner = Scanner::default();
        for src in sources {
            let stripped = strip_comments(src.as_ref());
            scanner.run(document_body(&stripped));
            scanner.push_text("\n\n");
        }
        let math_regions = scanner.math;
        let mut warnings = scanner.warnings;

        let mut kept: Vec<(String, Vec<Sentence>)> = Vec::new();
        for raw in scanner.sections {
            let sentences: Vec<Sentence> = self
                .segmenter
                .segment(&raw.body)
                .iter()
                .filter_map(|s| Sentence::new(0, s))
                .enumerate()
                .map(|(i, mut s)| {
                    s.index = i;
                    s
                })
                .collect();
            if sentences.is_empty() {
                if raw.explicit {
                    warnings.push(Warning::EmptySection { title: raw.title });
                }
                continue;
            }
            kept.push((raw.title, sentences));
        }

        let has_text = kept
            .iter()
            .flat_map(|(_, s)| s)
            .flat_map(|s| &s.tokens)
            .any(|t| t != MATH_TOKEN && t.chars().any(char::is_alphanumeric));
        if !has_text {
            return Err(Error::NoTextExtracted);
        }

        let total = kept.len();
        let sections = kept
            .into_iter()
            .enumerate()
            .map(|(ordinal, (raw_title, sentences))| {
                let norm_title = normalize_title(&raw_title);
                let position = classify_position(&norm_title, ordinal, total);
                Section {
                    raw_title,
                    norm_title,
                    position,
                    sentences,
                }
            })
            .collect();
        Ok(Extraction {
            sections,
            warnings,
            math_regions,
        })
    }
}

/// [`Extractor::extract`] with the default abbreviation list.
pub fn extract_text<S: AsRef<str>>(sources: &[S]) -> Result<Extraction> {
    Extractor::default().extract(sources)
}

/// Removes `%` comments. As in TeX, the comment swallows its newline and
/// the leading whitespace of the next line.
fn strip_comments(src: &str) -> String {
    let mut out = String::with_capacity(src.len());
    let mut eat_indent = false;
    for line in src.split_inclusive('\n') {
        let line = if eat_indent {
            line.trim_start_matches([' ', '\t'])
        } else {
            line
        };
        eat_indent = false;
        match find_comment(line) {
            Some(at) => {
                out.push_str(&line[..at]);
                eat_indent = true;
            }
            None => out.push_str(line),
        }
    }
    out
}

fn find_comment(line: &str) -> Option<usize> {
    let bytes = line.as_bytes();
    let mut backslashes = 0;
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'\\' => backslashes += 1,
            b'%' if backslashes % 2 == 0 => return Some(i),
            _ => backslashes = 0,
        }
    }
    None
}

fn document_body(src: &str) -> &str {
    const BEGIN: &str = "\\begin{document}";
    match src.find(BEGIN) {
        Some(at) => {
            let body = &src[at + BEGIN.len()..];
            match body.find("\\end{document}") {
                Some(end) => &body[..end],
                None => body,
            }
        }
        None => src,
    }
}

#[derive(Debug)]
struct RawSection {
    title: String,
    body: String,
    /// Came from a sectioning command or the abstract, not implicit text.
    explicit: bool,
}

#[derive(Debug)]
struct Scanner {
    sections: Vec<RawSection>,
    warnings: Vec<Warning>,
    math: usize,
}

impl Default for Scanner {
    fn default() -> Self {
        Scanner {
            sections: vec![RawSection {
                title: String::new(),
                body: String::new(),
                explicit: false,
            }],
            warnings: Vec::new(),
            math: 0,
        }
    }
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn skip_spaces(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    /// Command name after a backslash: a run of letters, or one other char.
    fn command_name(&mut self) -> &'a str {
        let start = self.pos;
        let letters = self
            .rest()
            .find(|c: char| !c.is_ascii_alphabetic())
            .unwrap_or(self.rest().len());
        if letters > 0 {
            self.pos += letters;
        } else {
            self.bump();
        }
        &self.src[start..self.pos]
    }

    /// Balanced group starting at the current `open`; returns the inner text.
    fn group(&mut self, open: char, close: char) -> Option<&'a str> {
        if self.peek() != Some(open) {
            return None;
        }
        let start = self.pos + open.len_utf8();
        let mut depth = 0usize;
        let mut escaped = false;
        for (i, c) in self.rest().char_indices() {
            if escaped {
                escaped = false;
                continue;
            }
            if c == '\\' {
                escaped = true;
            } else if c == open {
                depth += 1;
            } else if c == close {
                depth -= 1;
                if depth == 0 {
                    let inner = &self.src[start..self.pos + i];
                    self.pos += i + close.len_utf8();
                    return Some(inner);
                }
            }
        }
        None
    }

    fn skip_optional_args(&mut self) {
        while self.peek() == Some('[') {
            let save = self.pos;
            if self.group('[', ']').is_none() {
                self.pos = save;
                return;
            }
        }
    }

    /// Byte offset of the end of the current paragraph (next blank line).
    fn paragraph_end(&self) -> usize {
        let rest = self.rest();
        let mut offset = 0;
        for line in rest.split_inclusive('\n') {
            if offset > 0 && line.trim().is_empty() {
                return self.pos + offset;
            }
            offset += line.len();
        }
        self.src.len()
    }
}

fn find_unescaped(hay: &str, needle: char) -> Option<usize> {
    let mut escaped = false;
    for (i, c) in hay.char_indices() {
        if escaped {
            escaped = false;
        } else if c == '\\' {
            escaped = true;
        } else if c == needle {
            return Some(i);
        }
    }
    None
}

fn env_end(hay: &str, name: &str) -> Option<(usize, usize)> {
    let open = format!("\\begin{{{name}}}");
    let close = format!("\\end{{{name}}}");
    let mut depth = 1usize;
    let mut at = 0;
    loop {
        let next_close = hay[at..].find(&close)? + at;
        let next_open = hay[at..].find(&open).map(|i| i + at);
        match next_open {
            Some(o) if o < next_close => {
                depth += 1;
                at = o + open.len();
            }
            _ => {
                depth -= 1;
                at = next_close + close.len();
                if depth == 0 {
                    return Some((next_close, at));
                }
            }
        }
    }
}

fn is_math_env(name: &str) -> bool {
    MATH_ENVS.contains(&name.trim_end_matches('*'))
}

fn is_dropped_env(name: &str) -> bool {
    DROPPED_ENVS.contains(&name.trim_end_matches('*'))
}

impl Scanner {
    fn push_text(&mut self, s: &str) {
        self.sections
            .last_mut()
            .expect("scanner always has a section")
            .body
            .push_str(s);
    }

    fn push_char(&mut self, c: char) {
        self.sections
            .last_mut()
            .expect("scanner always has a section")
            .body
            .push(c);
    }

    fn open_section(&mut self, title: String, explicit: bool) {
        self.sections.push(RawSection {
            title,
            body: String::new(),
            explicit,
        });
    }

    fn math_region(&mut self) {
        self.math += 1;
        self.push_text(" ");
        self.push_text(MATH_TOKEN);
        self.push_text(" ");
    }

    fn unbalanced(&mut self, cur: &mut Cursor<'_>, offset: usize, opener: &str) {
        self.warnings.push(Warning::UnbalancedMath {
            offset,
            opener: opener.to_string(),
        });
        cur.pos = cur.paragraph_end();
        self.push_text("\n\n");
    }

    fn run(&mut self, src: &str) {
        let mut cur = Cursor { src, pos: 0 };
        while let Some(c) = cur.peek() {
            let offset = cur.pos;
            match c {
                '\\' => {
                    cur.bump();
                    self.command(&mut cur, offset);
                }
                '$' => {
                    if cur.eat("$$") {
                        match cur.rest().find("$$") {
                            Some(end) => {
                                cur.pos += end + 2;
                                self.math_region();
                            }
                            None => self.unbalanced(&mut cur, offset, "$$"),
                        }
                    } else {
                        cur.bump();
                        let limit = cur.paragraph_end() - cur.pos;
                        match find_unescaped(&cur.rest()[..limit], '$') {
                            Some(end) => {
                                cur.pos += end + 1;
                                self.math_region();
                            }
                            None => self.unbalanced(&mut cur, offset, "$"),
                        }
                    }
                }
                '{' | '}' => {
                    cur.bump();
                }
                '~' => {
                    cur.bump();
                    self.push_char(' ');
                }
                '`' => {
                    if cur.eat("``") {
                        self.push_char('"');
                    } else {
                        cur.bump();
                        self.push_char('\'');
                    }
                }
                '\'' => {
                    if cur.eat("''") {
                        self.push_char('"');
                    } else {
                        cur.bump();
                        self.push_char('\'');
                    }
                }
                _ => {
                    cur.bump();
                    self.push_char(c);
                }
            }
        }
    }

    fn command(&mut self, cur: &mut Cursor<'_>, offset: usize) {
        let name = cur.command_name();
        match name {
            "" => {}
            "(" => self.delimited_math(cur, offset, "\\(", "\\)"),
            "[" => self.delimited_math(cur, offset, "\\[", "\\]"),
            "\\" => {
                cur.eat("*");
                cur.skip_optional_args();
                self.push_char(' ');
            }
            "%" | "$" | "&" | "#" | "_" | "{" | "}" => self.push_text(name),
            "," | ";" | ":" | "!" | " " | "\n" | "/" | "@" => self.push_char(' '),
            "'" | "`" | "^" | "\"" | "~" | "=" | "." | "u" | "v" | "H" | "c" | "d" | "b" | "r"
            | "k" => {
                // Accents: keep the base letter.
                if cur.group('{', '}').map(|g| self.push_text(g)).is_none() {
                    if let Some(ch) = cur.peek().filter(|c| c.is_alphabetic()) {
                        cur.bump();
                        self.push_char(ch);
                    }
                }
            }
            "begin" => self.begin_env(cur, offset),
            "end" => {
                if let Some(env) = cur.group('{', '}') {
                    if env.trim() == "abstract" {
                        self.open_section(String::new(), false);
                    } else {
                        self.push_char(' ');
                    }
                }
            }
            "ensuremath" => {
                if cur.group('{', '}').is_some() {
                    self.math_region();
                }
            }
            "def" | "gdef" | "edef" | "xdef" => {
                cur.skip_spaces();
                if cur.eat("\\") {
                    cur.command_name();
                }
                match cur.rest().find('{') {
                    Some(i) => {
                        cur.pos += i;
                        if cur.group('{', '}').is_none() {
                            self.unterminated(cur, offset, "definition");
                        }
                    }
                    None => cur.pos = cur.src.len(),
                }
            }
            "item" => {
                cur.skip_optional_args();
                self.push_char(' ');
            }
            "ldots" | "dots" | "cdots" => self.push_text("..."),
            "LaTeX" | "TeX" => self.push_text(name),
            _ if SECTIONING.contains(&name) => {
                cur.eat("*");
                cur.skip_spaces();
                cur.skip_optional_args();
                cur.skip_spaces();
                match cur.group('{', '}') {
                    Some(title) => {
                        let title = render_inline(title);
                        self.open_section(title, true);
                    }
                    None => self.warnings.push(Warning::Unterminated {
                        offset,
                        what: format!("\\{name} title"),
                    }),
                }
            }
            _ if DROPPED_HEADINGS.contains(&name) => {
                cur.eat("*");
                cur.skip_spaces();
                cur.skip_optional_args();
                cur.skip_spaces();
                if cur.group('{', '}').is_none() {
                    self.warnings.push(Warning::Unterminated {
                        offset,
                        what: format!("\\{name} title"),
                    });
                }
                self.push_text("\n\n");
            }
            _ => {
                if let Some(&(_, n)) = DROPPED_ARGS.iter().find(|(c, _)| *c == name) {
                    self.drop_args(cur, offset, name, n);
                } else {
                    // Unknown command: drop the name, keep argument text.
                    cur.eat("*");
                    cur.skip_optional_args();
                }
            }
        }
    }

    fn unterminated(&mut self, cur: &mut Cursor<'_>, offset: usize, what: &str) {
        self.warnings.push(Warning::Unterminated {
            offset,
            what: what.to_string(),
        });
        cur.pos = cur.paragraph_end();
    }

    fn drop_args(&mut self, cur: &mut Cursor<'_>, offset: usize, name: &str, n: usize) {
        cur.eat("*");
        let mut taken = 0;
        while taken < n {
            let save = cur.pos;
            cur.skip_spaces();
            match cur.peek() {
                Some('[') => {
                    if cur.group('[', ']').is_none() {
                        cur.pos = save;
                        return;
                    }
                }
                Some('{') => {
                    if cur.group('{', '}').is_none() {
                        self.unterminated(cur, offset, &format!("\\{name} argument"));
                        return;
                    }
                    taken += 1;
                }
                Some('\\') if taken == 0 => {
                    cur.bump();
                    cur.command_name();
                    taken += 1;
                }
                _ => {
                    cur.pos = save;
                    return;
                }
            }
        }
        // Trailing optional argument, as in \newtheorem{thm}{Theorem}[section].
        if cur.peek() == Some('[') {
            cur.skip_optional_args();
        }
    }

    fn delimited_math(&mut self, cur: &mut Cursor<'_>, offset: usize, open: &str, close: &str) {
        match cur.rest().find(close) {
            Some(end) => {
                cur.pos += end + close.len();
                self.math_region();
            }
            None => self.unbalanced(cur, offset, open),
        }
    }

    fn begin_env(&mut self, cur: &mut Cursor<'_>, offset: usize) {
        let Some(env) = cur.group('{', '}') else {
            return;
        };
        let env = env.trim();
        if env == "abstract" {
            self.open_section("Abstract".to_string(), true);
        } else if is_math_env(env) {
            match env_end(cur.rest(), env) {
                Some((_, after)) => {
                    cur.pos += after;
                    self.math_region();
                }
                None => self.unbalanced(cur, offset, &format!("\\begin{{{env}}}")),
            }
        } else if is_dropped_env(env) {
            match env_end(cur.rest(), env) {
                Some((_, after)) => cur.pos += after,
                None => {
                    self.warnings.push(Warning::Unterminated {
                        offset,
                        what: format!("environment `{env}`"),
                    });
                    cur.pos = cur.src.len();
                }
            }
            self.push_char(' ');
        } else {
            cur.skip_optional_args();
            self.push_char(' ');
        }
    }
}

/// Plain text of an inline fragment such as a section title.
fn render_inline(src: &str) -> String {
    let mut scanner = Scanner::default();
    scanner.run(src);
    let text: String = scanner
        .sections
        .into_iter()
        .map(|s| s.body)
        .collect::<Vec<_>>()
        .join(" ");
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

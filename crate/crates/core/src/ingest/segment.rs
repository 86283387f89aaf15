/// Tokens after which a period does not end a sentence. Compared
/// case-insensitively against the word that carries the period.
pub const DEFAULT_ABBREVIATIONS: &[&str] = &[
    "et al.", "i.e.", "e.g.", "cf.", "vs.", "resp.", "approx.", "Fig.", "Figs.", "Eq.", "Eqs.",
    "Eqn.", "Sec.", "Secs.", "Ref.", "Refs.", "Tab.", "Thm.", "Prop.", "Lem.", "Def.", "Cor.",
    "Ch.", "No.", "pp.", "Dr.", "Mr.", "Ms.", "Prof.",
];

const CLOSERS: &[char] = &['"', '\'', ')', ']', '}'];

#[derive(Debug, Clone)]
pub struct Segmenter {
    abbreviations: Vec<String>,
}

impl Default for Segmenter {
    fn default() -> Self {
        Segmenter {
            abbreviations: DEFAULT_ABBREVIATIONS
                .iter()
                .map(|a| a.to_lowercase())
                .collect(),
        }
    }
}

impl Segmenter {
    /// Default list plus `extra`.
    pub fn with_abbreviations<I, S>(extra: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut seg = Segmenter::default();
        for a in extra {
            let a = a.as_ref().trim().to_lowercase();
            if !a.is_empty() && !seg.abbreviations.contains(&a) {
                seg.abbreviations.push(a);
            }
        }
        seg
    }

    pub fn abbreviations(&self) -> &[String] {
        &self.abbreviations
    }

    /// Splits after `.`, `!` or `?` (plus any closing quotes or brackets)
    /// when followed by whitespace and a capital letter, or by the end of
    /// the text. Whitespace inside sentences is collapsed.
    pub fn segment(&self, text: &str) -> Vec<String> {
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let mut out = Vec::new();
        let mut start = 0usize;
        let mut k = 0usize;
        while k < chars.len() {
            let (at, c) = chars[k];
            if !matches!(c, '.' | '!' | '?') {
                k += 1;
                continue;
            }
            let mut q = k + 1;
            while q < chars.len()
                && (matches!(chars[q].1, '.' | '!' | '?') || CLOSERS.contains(&chars[q].1))
            {
                q += 1;
            }
            let end_byte = chars.get(q).map_or(text.len(), |&(b, _)| b);
            let mut r = q;
            while r < chars.len() && chars[r].1.is_whitespace() {
                r += 1;
            }
            let boundary = if r == chars.len() {
                true
            } else {
                r > q && chars[r].1.is_uppercase()
            };
            if boundary && !(c == '.' && self.is_abbreviation(&text[start..at])) {
                push_normalized(&mut out, &text[start..end_byte]);
                start = chars.get(r).map_or(text.len(), |&(b, _)| b);
            }
            k = q.max(k + 1);
        }
        if start < text.len() {
            push_normalized(&mut out, &text[start..]);
        }
        out
    }

    // `before` is the text preceding the period. A space between the word
    // and its period ("e.g ." from rendered text) is tolerated.
    fn is_abbreviation(&self, before: &str) -> bool {
        let word = format!("{}.", before.trim_end()).to_lowercase();
        self.abbreviations.iter().any(|abbr| {
            word.ends_with(abbr.as_str()) && {
                let head = &word[..word.len() - abbr.len()];
                head.is_empty() || head.ends_with(|c: char| c.is_whitespace() || c == '(')
            }
        })
    }
}

fn push_normalized(out: &mut Vec<String>, piece: &str) {
    let s = piece.split_whitespace().collect::<Vec<_>>().join(" ");
    if !s.is_empty() {
        out.push(s);
    }
}

/// Sentence split with the default abbreviation guard.
pub fn segment_sentences(text: &str) -> Vec<String> {
    Segmenter::default().segment(text)
}

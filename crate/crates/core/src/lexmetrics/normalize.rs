use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Language tag carried by records and normalization profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lang {
    En,
    De,
}

impl Lang {
    pub fn as_str(self) -> &'static str {
        match self {
            Lang::En => "en",
            Lang::De => "de",
        }
    }
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Lang {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "en" => Ok(Lang::En),
            "de" => Ok(Lang::De),
            other => Err(format!("unknown language tag `{other}`")),
        }
    }
}

/// How a text is turned into tokens before any lexical comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizationProfile {
    pub lowercase: bool,
    pub strip_punct: bool,
    pub remove_articles: bool,
    pub language: Lang,
}

const ENGLISH_ARTICLES: [&str; 3] = ["a", "an", "the"];

// Non-ASCII punctuation that shows up in the German and NQ answer sets.
const EXTRA_PUNCT: &[char] = &[
    '„', '“', '”', '‘', '’', '‚', '«', '»', '‹', '›', '–', '—', '…', '¿', '¡', '·', '′', '″',
];

impl NormalizationProfile {
    /// SQuAD-convention English profile: lowercase, drop punctuation, drop articles.
    pub const fn english() -> Self {
        Self {
            lowercase: true,
            strip_punct: true,
            remove_articles: true,
            language: Lang::En,
        }
    }

    /// German profile: as English but articles are kept.
    pub const fn german() -> Self {
        Self {
            lowercase: true,
            strip_punct: true,
            remove_articles: false,
            language: Lang::De,
        }
    }

    pub const fn for_lang(lang: Lang) -> Self {
        match lang {
            Lang::En => Self::english(),
            Lang::De => Self::german(),
        }
    }

    /// Whitespace tokenization only; case and punctuation preserved.
    pub const fn raw(language: Lang) -> Self {
        Self {
            lowercase: false,
            strip_punct: false,
            remove_articles: false,
            language,
        }
    }

    pub fn with_articles_removed(mut self, on: bool) -> Self {
        self.remove_articles = on;
        self
    }

    pub fn tokens(&self, text: &str) -> Vec<String> {
        let mut s = if self.lowercase {
            text.to_lowercase()
        } else {
            text.to_owned()
        };
        if self.strip_punct {
            s.retain(|c| !is_punct(c));
        }
        s.split_whitespace()
            .filter(|t| {
                !(self.remove_articles && ENGLISH_ARTICLES.iter().any(|a| a.eq_ignore_ascii_case(t)))
            })
            .map(str::to_owned)
            .collect()
    }

    /// Normalized form as a single space-joined string.
    pub fn normalize(&self, text: &str) -> String {
        self.tokens(text).join(" ")
    }
}

impl Default for NormalizationProfile {
    fn default() -> Self {
        Self::english()
    }
}

fn is_punct(c: char) -> bool {
    c.is_ascii_punctuation() || EXTRA_PUNCT.contains(&c)
}

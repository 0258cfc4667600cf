//! Tweet tokenizer.
//!
//! Rules, applied in order:
//!
//! 1. Every match of `(?i)(https?://|www\.)\S+` is replaced by the token `URL`.
//! 2. The text is split on whitespace into chunks.
//! 3. A chunk that is exactly `URL` is kept verbatim; a chunk that is an
//!    emoticon (`:)`, `;-P`, `<3`, `xD`, ...) is kept whole and lowercased.
//! 4. Otherwise the chunk is cut around emoji: every codepoint with the
//!    Unicode `Emoji` property (ASCII excluded, so digits, `#` and `*` stay
//!    text) becomes its own token. Zero-width joiners, variation selectors
//!    and tag characters are dropped.
//! 5. Each remaining text piece has its leading and trailing punctuation
//!    detached (each run becomes one token). `#` and `@` are not stripped
//!    from the front, so `#hashtag` and `@mention` stay whole.
//! 6. A piece starting with `@` becomes `@username`. Everything else is
//!    lowercased. `@` never survives inside a punctuation token.

use std::sync::LazyLock;

use regex::Regex;
use unicode_properties::{GeneralCategoryGroup, UnicodeEmoji, UnicodeGeneralCategory};

pub const URL_TOKEN: &str = "URL";
pub const USER_TOKEN: &str = "@username";

static URL_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)(https?://|www\.)\S+").expect("url regex"));

static EMOTICON_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(concat!(
        r"^(?:",
        r"[<>]?[:;=8][\-o\*']?[\)\]\(\[dDpP/\\:\}\{@\|]+",
        r"|[\)\]\(\[dDpP/\\:\}\{\|]+[\-o\*']?[:;=8][<>]?",
        r"|</?3+",
        r"|\^_*\^",
        r"|[xX][dD]+",
        r")$"
    ))
    .expect("emoticon regex")
});

/// Tokenizes raw tweet text. Total on any input; empty text yields no tokens.
pub fn tokenize(raw: &str) -> Vec<String> {
    let replaced = URL_RE.replace_all(raw, " URL ");
    let mut tokens = Vec::new();
    for chunk in replaced.split_whitespace() {
        if chunk == URL_TOKEN {
            tokens.push(URL_TOKEN.to_string());
        } else if EMOTICON_RE.is_match(chunk) {
            tokens.push(chunk.to_lowercase());
        } else {
            split_emoji(chunk, &mut tokens);
        }
    }
    tokens
}

pub(crate) fn is_emoji(c: char) -> bool {
    !c.is_ascii() && c.is_emoji_char()
}

fn is_joiner(c: char) -> bool {
    matches!(c, '\u{200D}' | '\u{FE0E}' | '\u{FE0F}' | '\u{E0020}'..='\u{E007F}')
}

fn is_punct(c: char) -> bool {
    !c.is_alphanumeric()
        && !c.is_whitespace()
        && c.general_category_group() != GeneralCategoryGroup::Mark
}

fn split_emoji(chunk: &str, out: &mut Vec<String>) {
    let mut piece = String::new();
    for c in chunk.chars() {
        if is_emoji(c) || is_joiner(c) {
            if !piece.is_empty() {
                push_word(&piece, out);
                piece.clear();
            }
            if !is_joiner(c) {
                out.push(c.to_string());
            }
        } else {
            piece.push(c);
        }
    }
    if !piece.is_empty() {
        push_word(&piece, out);
    }
}

fn push_punct(run: &str, out: &mut Vec<String>) {
    let run: String = run.chars().filter(|&c| c != '@').collect();
    if !run.is_empty() {
        out.push(run.to_lowercase());
    }
}

fn push_word(piece: &str, out: &mut Vec<String>) {
    if piece.chars().all(is_punct) {
        push_punct(piece, out);
        return;
    }
    let lead_end = piece
        .char_indices()
        .find(|&(_, c)| !is_punct(c) || c == '#' || c == '@')
        .map(|(i, _)| i)
        .unwrap_or(piece.len());
    let trail_start = piece
        .char_indices()
        .rev()
        .take_while(|&(_, c)| is_punct(c))
        .last()
        .map(|(i, _)| i)
        .unwrap_or(piece.len());
    // The piece has at least one word character, so lead_end < trail_start.
    let (lead, rest) = piece.split_at(lead_end);
    let (core, trail) = rest.split_at(trail_start - lead_end);

    push_punct(lead, out);
    if core.starts_with('@') {
        out.push(USER_TOKEN.to_string());
    } else {
        out.push(core.to_lowercase());
    }
    push_punct(trail, out);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn url_and_case() {
        assert_eq!(
            tokenize("Visita https://t.co/abc YA"),
            vec!["visita", "URL", "ya"]
        );
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("   \t ").is_empty());
    }

    #[test]
    fn mention_and_emoji_run() {
        assert_eq!(
            tokenize("hola @maria 😀😀"),
            vec!["hola", "@username", "😀", "😀"]
        );
    }

    #[test]
    fn punctuation_detached() {
        assert_eq!(
            tokenize("¡Qué día!!! (#feliz)"),
            vec!["¡", "qué", "día", "!!!", "(", "#feliz", ")"]
        );
    }

    #[test]
    fn emoticons_kept_whole() {
        assert_eq!(tokenize("jaja :) xD <3 :-("), vec!["jaja", ":)", "xd", "<3", ":-("]);
    }

    #[test]
    fn bare_at_sign_never_leaks() {
        assert_eq!(tokenize("hola @ amigo@"), vec!["hola", "amigo"]);
    }

    #[test]
    fn digits_are_not_emoji() {
        assert_eq!(tokenize("2018 #1"), vec!["2018", "#1"]);
    }
}

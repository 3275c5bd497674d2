//! Whitespace/punctuation tokenizer.
//!
//! Tokens are maximal runs of alphanumeric characters, so punctuation acts
//! as a boundary and punctuation-only fragments disappear. Case is
//! preserved; OCR noise is kept as-is for the subword embedder to absorb.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};

pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            current.push(ch);
        } else if !current.is_empty() {
            tokens.push(core::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// Tokenizes raw bytes, reporting the byte offset of any invalid UTF-8.
pub fn tokenize_bytes(bytes: &[u8]) -> Result<Vec<String>> {
    match core::str::from_utf8(bytes) {
        Ok(s) => Ok(tokenize(s)),
        Err(e) => Err(Error::data(format!(
            "invalid UTF-8 at byte offset {}",
            e.valid_up_to()
        ))),
    }
}

/// Joins tokens with single spaces (used by the idempotence property).
pub fn join_tokens(tokens: &[String]) -> String {
    tokens.join(" ").to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn strips_trailing_punctuation() {
        assert_eq!(tokenize("Dear Sir,"), vec!["Dear", "Sir"]);
    }

    #[test]
    fn empty_input_gives_no_tokens() {
        assert_eq!(tokenize(""), Vec::<String>::new());
        assert_eq!(tokenize("  ,.;!  "), Vec::<String>::new());
    }

    #[test]
    fn ocr_memo_header_keeps_correspondence() {
        let text = "PHILIP MORRIS U.S.A. koe\nINTER - OFFICE\nCORRESPONDENCE\n100 Park Avenua, New York,\nN.Y. 10017";
        let tokens = tokenize(text);
        assert!(tokens.iter().any(|t| t == "CORRESPONDENCE"));
        assert!(tokens.iter().any(|t| t == "INTER"));
        assert!(!tokens.iter().any(|t| t.contains('-')));
    }

    #[test]
    fn case_is_preserved() {
        assert_eq!(tokenize("MiXeD case"), vec!["MiXeD", "case"]);
    }

    #[test]
    fn invalid_utf8_reports_offset() {
        let bytes = b"good \xff bad";
        let err = tokenize_bytes(bytes).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("offset 5"), "{msg}");
    }

    #[test]
    fn tokenize_is_idempotent_under_whitespace_join() {
        let s = "It's 2:1, e.g. INTER - OFFICE mail!";
        let once = tokenize(s);
        let twice = tokenize(&join_tokens(&once));
        assert_eq!(once, twice);
    }

    proptest::proptest! {
        #[test]
        fn idempotence_holds_for_arbitrary_text(s in "\\PC{0,64}") {
            let once = tokenize(&s);
            let twice = tokenize(&join_tokens(&once));
            proptest::prop_assert_eq!(once, twice);
        }
    }
}

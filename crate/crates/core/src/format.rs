//! Term-stream serialization shared by every subcommand.

use std::fmt::Display;

use serde::Serialize;

/// OEIS b-file text: one `index value` line per term.
pub fn bfile<T: Display>(terms: &[T], first_index: i64) -> String {
    let mut out = String::new();
    for (i, t) in terms.iter().enumerate() {
        out.push_str(&format!("{} {}\n", first_index + i as i64, t));
    }
    out
}

/// Terms separated by single spaces, newline-terminated.
pub fn plain<T: Display>(terms: &[T]) -> String {
    let mut out = terms
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ");
    out.push('\n');
    out
}

#[derive(Serialize)]
struct TermsDoc<'a> {
    k: usize,
    terms: &'a [String],
}

/// `{"k": k, "terms": ["...", ...]}` with terms as decimal strings.
pub fn json_terms<T: Display>(k: usize, terms: &[T]) -> String {
    let terms: Vec<String> = terms.iter().map(ToString::to_string).collect();
    let mut out = serde_json::to_string(&TermsDoc { k, terms: &terms }).expect("plain data");
    out.push('\n');
    out
}

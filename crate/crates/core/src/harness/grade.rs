//! Deciding which options an answer text asserts.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::qlcgen::Qlc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Correct,
    Incorrect,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grading {
    pub extracted_letters: BTreeSet<char>,
    pub verdict: Verdict,
    /// Set when options were recognised only by their label text.
    pub needs_review: bool,
}

/// Words within this distance before an option that cancel it.
const NEGATION_WINDOW: usize = 6;
const NEGATIONS_BEFORE: &[&str] = &["not", "isn't", "rather than", "instead of"];
const NEGATIONS_AFTER: &[&str] = &[
    "is not", "are not", "isn't", "aren't", "is incorrect", "are incorrect", "is wrong", "are wrong",
];
const INTRODUCERS: &[&str] = &["option", "options", "answer is", "answer:", "choice", "answer would be"];

struct Mention {
    letter: char,
    start: usize,
    /// First position after the token and any label that follows it.
    end: usize,
    /// The token's own period also ends the sentence ("not b. The answer is c").
    ends_sentence: bool,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn ends_with_word(text: &[char], at: usize, word: &str) -> bool {
    let w: Vec<char> = word.chars().collect();
    if at < w.len() {
        return false;
    }
    let s = at - w.len();
    text[s..at] == w[..] && (s == 0 || !is_word_char(text[s - 1]))
}

fn starts_with_at(text: &[char], at: usize, s: &str) -> bool {
    let w: Vec<char> = s.chars().collect();
    at + w.len() <= text.len() && text[at..at + w.len()] == w[..]
}

/// Letter tokens such as `b.`, `b)`, `(b)`, `option b`, `answer is b`, a
/// standalone capital `B`, or `**b**`.
fn letter_mentions(raw: &[char], lower: &[char], qlc: &Qlc) -> Vec<Mention> {
    let letters: BTreeSet<char> = qlc.letters().collect();
    let mut out = Vec::new();
    for i in 0..raw.len() {
        let c = lower[i];
        if !letters.contains(&c) {
            continue;
        }
        let prev = if i > 0 { Some(raw[i - 1]) } else { None };
        let next = raw.get(i + 1).copied();
        let after = raw.get(i + 2).copied();
        if prev.is_some_and(is_word_char) || next.is_some_and(is_word_char) {
            continue;
        }
        let mut before = i;
        while before > 0 && raw[before - 1] == ' ' {
            before -= 1;
        }
        let introduced = INTRODUCERS.iter().any(|w| ends_with_word(lower, before, w));
        let dotted = matches!(next, Some('.' | ')')) && !after.is_some_and(char::is_alphanumeric) && prev != Some('(');
        let parenthesized = prev == Some('(') && next == Some(')');
        let bold = prev == Some('*') && next == Some('*');
        let capital = raw[i].is_ascii_uppercase() && c != 'a' && next != Some('\'');
        if !(introduced || dotted || parenthesized || bold || capital) {
            continue;
        }
        let mut end = i + 1;
        if matches!(next, Some('.' | ')')) {
            end += 1;
        }
        if let Some(label) = qlc.label(c) {
            let mut j = end;
            while j < raw.len() && raw[j] == ' ' {
                j += 1;
            }
            let label_lower = label.to_lowercase();
            if starts_with_at(lower, j, &label_lower) && !lower.get(j + label_lower.chars().count()).is_some_and(|c| is_word_char(*c)) {
                end = j + label_lower.chars().count();
            }
        }
        let ends_sentence = next == Some('.') && end == i + 2 && {
            let rest = raw[end..].iter().find(|c| !c.is_whitespace());
            rest.is_none_or(|c| c.is_uppercase())
        };
        out.push(Mention { letter: c, start: i, end, ends_sentence });
    }
    out
}

/// Positions of characters that end a clause, ignoring the punctuation of
/// the mentions themselves.
fn clause_breaks(lower: &[char], mentions: &[Mention], commas: bool) -> Vec<bool> {
    let mut breaks: Vec<bool> = lower
        .iter()
        .map(|c| matches!(c, '.' | ';' | ':' | '!' | '?' | '\n') || commas && *c == ',')
        .collect();
    for m in mentions {
        for b in breaks.iter_mut().take(m.end.min(lower.len())).skip(m.start) {
            *b = false;
        }
        if m.ends_sentence {
            breaks[m.start + 1] = true;
        }
    }
    // a decimal point is not a sentence end
    for i in 1..lower.len().saturating_sub(1) {
        if lower[i] == '.' && lower[i - 1].is_ascii_digit() && lower[i + 1].is_ascii_digit() {
            breaks[i] = false;
        }
    }
    breaks
}

fn words(s: &[char]) -> Vec<String> {
    s.iter()
        .collect::<String>()
        .split(|c: char| !is_word_char(c))
        .filter(|w| !w.is_empty())
        .map(str::to_string)
        .collect()
}

fn contains_phrase(words: &[String], phrase: &str) -> bool {
    let p: Vec<&str> = phrase.split(' ').collect();
    words.windows(p.len()).any(|w| w.iter().zip(&p).all(|(a, b)| a == b))
}

fn negated_before(lower: &[char], breaks: &[bool], start: usize) -> bool {
    let mut s = start;
    while s > 0 && !breaks[s - 1] {
        s -= 1;
    }
    let mut w = words(&lower[s..start]);
    if let Some(pos) = w.iter().rposition(|x| x == "but") {
        w.drain(..=pos);
    }
    let tail = &w[w.len().saturating_sub(NEGATION_WINDOW)..];
    NEGATIONS_BEFORE.iter().any(|n| contains_phrase(tail, n))
}

fn negated_after(lower: &[char], breaks: &[bool], from: usize) -> bool {
    let mut e = from;
    while e < lower.len() && !breaks[e] {
        e += 1;
    }
    let mut w = words(&lower[from.min(e)..e]);
    if let Some(pos) = w.iter().position(|x| x == "which" || x == "but") {
        w.truncate(pos);
    }
    w.truncate(3);
    NEGATIONS_AFTER.iter().any(|n| contains_phrase(&w, n))
}

/// Where the text following a mention starts: after the closing parenthesis
/// when the mention sits inside a parenthesized list.
fn continuation(lower: &[char], m: &Mention) -> usize {
    let mut depth = 0i32;
    let mut open = false;
    for i in (0..m.start).rev() {
        match lower[i] {
            ')' => depth += 1,
            '(' if depth == 0 => {
                open = i + 1 != m.start;
                break;
            }
            '(' => depth -= 1,
            '\n' => break,
            _ => {}
        }
    }
    if !open {
        return m.end;
    }
    let mut depth = 0i32;
    for (i, c) in lower.iter().enumerate().skip(m.end) {
        match c {
            '(' => depth += 1,
            ')' if depth == 0 => return i + 1,
            ')' => depth -= 1,
            '\n' => break,
            _ => {}
        }
    }
    m.end
}

fn label_mentions(lower: &[char], qlc: &Qlc) -> Vec<Mention> {
    let mut out = Vec::new();
    for o in &qlc.options {
        let label: Vec<char> = o.label.to_lowercase().chars().collect();
        if label.is_empty() || label.len() > lower.len() {
            continue;
        }
        for i in 0..=lower.len() - label.len() {
            let bounded = (i == 0 || !is_word_char(lower[i - 1]))
                && !lower.get(i + label.len()).is_some_and(|c| is_word_char(*c));
            if bounded && lower[i..i + label.len()] == label[..] {
                out.push(Mention {
                    letter: o.letter,
                    start: i,
                    end: i + label.len(),
                    ends_sentence: false,
                });
            }
        }
    }
    out
}

/// Whether only separators such as commas and "and" lie between two mentions.
fn joined(lower: &[char], a: &Mention, b: &Mention) -> bool {
    if b.start < a.end {
        return false;
    }
    let gap: String = lower[a.end..b.start].iter().collect();
    gap.split(|c: char| c.is_whitespace() || matches!(c, ',' | '&' | '(' | ')'))
        .all(|w| w.is_empty() || w == "and" || w == "or")
}

fn asserted(lower: &[char], mentions: &[Mention]) -> BTreeSet<char> {
    let before = clause_breaks(lower, mentions, true);
    let after = clause_breaks(lower, mentions, false);
    let mut order: Vec<&Mention> = mentions.iter().collect();
    order.sort_by_key(|m| m.start);
    let mut yes = BTreeSet::new();
    for (i, m) in order.iter().enumerate() {
        // a negation after a list ("b and c are not ...") covers the whole list
        let mut last = i;
        while last + 1 < order.len() && joined(lower, order[last], order[last + 1]) {
            last += 1;
        }
        let from = continuation(lower, order[last]);
        let negated = negated_before(lower, &before, m.start) || negated_after(lower, &after, from);
        if !negated {
            yes.insert(m.letter);
        }
    }
    yes
}

/// Options the answer asserts, and the verdict against the question's key.
///
/// Letter tokens are preferred. Only when none occur are option labels
/// searched for, and such gradings are flagged for review. Mentions inside a
/// negation ("not b", "(a. bar, b. def) are not ...") do not count.
pub fn grade(raw_text: &str, qlc: &Qlc) -> Grading {
    let raw: Vec<char> = raw_text.chars().collect();
    let lower: Vec<char> = raw.iter().map(|c| c.to_lowercase().next().unwrap_or(*c)).collect();
    let mut mentions = letter_mentions(&raw, &lower, qlc);
    let mut needs_review = false;
    if mentions.is_empty() {
        mentions = label_mentions(&lower, qlc);
        needs_review = !mentions.is_empty();
    }
    let extracted_letters = asserted(&lower, &mentions);
    let verdict = if extracted_letters.is_empty() {
        Verdict::Indeterminate
    } else if extracted_letters == qlc.correct_letters {
        Verdict::Correct
    } else {
        Verdict::Incorrect
    };
    Grading {
        extracted_letters,
        verdict,
        needs_review,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlcgen::{QlcOption, QlcType, SelectMode, Target};

    fn qlc(labels: &[&str], correct: &str) -> Qlc {
        let t = QlcType::LoopEnd;
        Qlc {
            schema_version: 1,
            id: "q".into(),
            program_id: "p".into(),
            qlc_type: t,
            block_model: t.block_model(),
            select_mode: SelectMode::Single,
            stem: "?".into(),
            options: labels
                .iter()
                .zip('a'..)
                .map(|(l, letter)| QlcOption {
                    letter,
                    label: l.to_string(),
                })
                .collect(),
            correct_letters: correct.chars().collect(),
            target: Target::default(),
            seed: 0,
            prng: "chacha8-v1".into(),
        }
    }

    fn letters(text: &str, q: &Qlc) -> String {
        grade(text, q).extracted_letters.into_iter().collect()
    }

    #[test]
    fn variable_names_answer_asserts_d_and_e() {
        let q = qlc(&["bar", "def", "if", "positive_numbers", "sum"], "d");
        let g = grade(include_str!("../../tests/fixtures/variable_names_answer.txt"), &q);
        assert_eq!(g.extracted_letters, BTreeSet::from(['d', 'e']));
        assert_eq!(g.verdict, Verdict::Incorrect);
        assert!(!g.needs_review);
    }

    #[test]
    fn loop_end_answer_asserts_b() {
        let q = qlc(&["3", "6", "7", "8"], "c");
        let g = grade(include_str!("../../tests/fixtures/loop_end_answer.txt"), &q);
        assert_eq!(g.extracted_letters, BTreeSet::from(['b']));
        assert_eq!(g.verdict, Verdict::Incorrect);
    }

    #[test]
    fn plain_correct_answer() {
        let q = qlc(&["3", "6", "7", "8"], "c");
        assert_eq!(grade("The correct answer is c. 7", &q).verdict, Verdict::Correct);
        assert_eq!(grade("The answer is c", &q).verdict, Verdict::Correct);
        assert_eq!(grade("(c)", &q).verdict, Verdict::Correct);
        assert_eq!(grade("Option C is right.", &q).verdict, Verdict::Correct);
        assert_eq!(grade("**c** because line 7 is indented.", &q).verdict, Verdict::Correct);
        assert_eq!(grade("C) 7", &q).verdict, Verdict::Correct);
    }

    #[test]
    fn negations_cancel_mentions() {
        let q = qlc(&["3", "6", "7", "8"], "c");
        assert_eq!(letters("It is c. 7, not b. 6.", &q), "c");
        assert_eq!(letters("Choose c. 7 rather than b. 6", &q), "c");
        assert_eq!(letters("B and C are not right, d. 8 is.", &q), "d");
        assert_eq!(letters("b. 6 is not right, the answer is c. 7", &q), "c");
        assert_eq!(letters("Not a, but c.", &q), "c");
        assert_eq!(letters("(a) and (b) are incorrect. The last line is d. 8", &q), "d");
        assert_eq!(letters("It is not b. The answer is c.", &q), "c");
    }

    #[test]
    fn ordinary_words_are_not_options() {
        let q = qlc(&["3", "6", "7", "8"], "c");
        assert_eq!(letters("I'd say, e.g., that a loop is a loop. Line 7 is d. 8", &q), "d");
        assert_eq!(letters("The value 2.5 is a float: c. 7", &q), "c");
    }

    #[test]
    fn nothing_asserted_is_indeterminate() {
        let q = qlc(&["3", "6", "7", "8"], "c");
        let g = grade("I am not sure about this one.", &q);
        assert_eq!(g.verdict, Verdict::Indeterminate);
        assert!(g.extracted_letters.is_empty());
    }

    #[test]
    fn label_fallback_sets_review_flag() {
        let q = qlc(&["0, 1", "0, 1, 4", "1, 4", "4"], "b");
        let g = grade("The values are 0, 1, 4 in that order.", &q);
        assert!(g.needs_review);
        assert!(g.extracted_letters.contains(&'b'));
        let q = qlc(
            &["Accepts new data", "Guards against division by zero", "Is a condition for ending program", "Tells even and odd numbers apart"],
            "b",
        );
        let g = grade("It guards against division by zero when the list is empty.", &q);
        assert_eq!(g.verdict, Verdict::Correct);
        assert!(g.needs_review);
    }

    #[test]
    fn multi_select_needs_exact_set() {
        let q = qlc(&["bar", "count", "def", "sum_positive", "tmp"], "bd");
        assert_eq!(grade("b. count and d. sum_positive", &q).verdict, Verdict::Correct);
        assert_eq!(grade("b. count", &q).verdict, Verdict::Incorrect);
    }
}

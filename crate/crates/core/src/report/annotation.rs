use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::qlcgen::SCHEMA_VERSION;

/// Category of the first flaw that makes an incorrect answer incorrect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ErrorCode {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b")]
    B,
    #[serde(rename = "c")]
    C,
    #[serde(rename = "d")]
    D,
    #[serde(rename = "e")]
    E,
    #[serde(rename = "f")]
    F,
    #[serde(rename = "g")]
    G,
    #[serde(rename = "h")]
    H,
    #[serde(rename = "i")]
    I,
    #[serde(rename = "j")]
    J,
}

impl ErrorCode {
    pub const ALL: [ErrorCode; 10] = [
        ErrorCode::A,
        ErrorCode::B,
        ErrorCode::C,
        ErrorCode::D,
        ErrorCode::E,
        ErrorCode::F,
        ErrorCode::G,
        ErrorCode::H,
        ErrorCode::I,
        ErrorCode::J,
    ];

    pub fn key(self) -> char {
        (b'a' + self as u8) as char
    }

    pub fn from_key(key: char) -> Option<ErrorCode> {
        ErrorCode::ALL.into_iter().find(|c| c.key() == key)
    }

    pub fn title(self) -> &'static str {
        match self {
            ErrorCode::A => "Illogical execution step(s) described",
            ErrorCode::B => "Line number counted incorrectly",
            ErrorCode::C => "Interpreted question differently",
            ErrorCode::D => "Incorrect answer after valid explanation",
            ErrorCode::E => "Insufficient level of analysis",
            ErrorCode::F => "Valid explanation after incorrect answer",
            ErrorCode::G => "No explanation available",
            ErrorCode::H => "Misconception about code element",
            ErrorCode::I => "The answer is not among the options",
            ErrorCode::J => "Hallucinates to justify incorrect answer",
        }
    }
}

/// One rater's code for one incorrect answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub answer_id: String,
    pub rater_id: String,
    pub error_code: ErrorCode,
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

impl Annotation {
    pub fn new(answer_id: impl Into<String>, rater_id: impl Into<String>, error_code: ErrorCode) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            answer_id: answer_id.into(),
            rater_id: rater_id.into(),
            error_code,
        }
    }
}

/// One annotation per answer: the named rater's, or else the one from the
/// alphabetically first rater who coded that answer.
pub fn primary_annotations(annotations: &[Annotation], rater: Option<&str>) -> Vec<Annotation> {
    let mut best: BTreeMap<&str, &Annotation> = BTreeMap::new();
    for a in annotations {
        if rater.is_some_and(|r| r != a.rater_id) {
            continue;
        }
        best.entry(&a.answer_id)
            .and_modify(|cur| {
                if a.rater_id < cur.rater_id {
                    *cur = a;
                }
            })
            .or_insert(a);
    }
    best.into_values().cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_round_trip() {
        for c in ErrorCode::ALL {
            assert_eq!(ErrorCode::from_key(c.key()), Some(c));
        }
        assert_eq!(ErrorCode::from_key('k'), None);
        assert_eq!(ErrorCode::J.key(), 'j');
    }

    #[test]
    fn serializes_as_letter() {
        let a = Annotation::new("m/q", "r1", ErrorCode::C);
        let s = serde_json::to_string(&a).unwrap();
        assert!(s.contains(r#""error_code":"c""#), "{s}");
        assert_eq!(serde_json::from_str::<Annotation>(&s).unwrap(), a);
    }

    #[test]
    fn primary_prefers_named_then_first_rater() {
        let anns = vec![
            Annotation::new("x", "zoe", ErrorCode::A),
            Annotation::new("x", "amy", ErrorCode::B),
            Annotation::new("y", "zoe", ErrorCode::C),
        ];
        let p = primary_annotations(&anns, None);
        assert_eq!(p.len(), 2);
        assert_eq!(p[0].error_code, ErrorCode::B);
        let z = primary_annotations(&anns, Some("zoe"));
        assert_eq!(z.iter().map(|a| a.error_code).collect::<Vec<_>>(), [ErrorCode::A, ErrorCode::C]);
    }
}

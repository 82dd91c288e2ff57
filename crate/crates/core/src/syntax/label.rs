//! Step labels: `3`, `2-6` (range anchor), `2a` (block), `2a1` (block step),
//! `2a1b2` (nested).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabelPart {
    pub letter: char,
    pub number: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StepLabel {
    pub start: u32,
    /// Upper end of a range anchor such as `2-6`.
    pub end: Option<u32>,
    pub suffix: Vec<LabelPart>,
}

impl StepLabel {
    pub fn main(n: u32) -> Self {
        Self {
            start: n,
            end: None,
            suffix: Vec::new(),
        }
    }

    /// Labels of extension blocks end in a letter with no trailing number.
    pub fn is_block_label(&self) -> bool {
        matches!(self.suffix.last(), Some(LabelPart { number: None, .. }))
    }

    pub fn is_range(&self) -> bool {
        self.end.is_some()
    }

    /// The trailing integer, i.e. the position within its sequence.
    pub fn final_number(&self) -> Option<u32> {
        match self.suffix.last() {
            None if self.end.is_none() => Some(self.start),
            None => None,
            Some(part) => part.number,
        }
    }

    /// For a block label, the label of the step (or step range) it extends.
    pub fn anchor(&self) -> Option<StepLabel> {
        if !self.is_block_label() {
            return None;
        }
        let mut anchor = self.clone();
        anchor.suffix.pop();
        Some(anchor)
    }

    /// For a block label, the label of its `n`th step.
    pub fn block_step(&self, n: u32) -> Option<StepLabel> {
        if !self.is_block_label() {
            return None;
        }
        let mut label = self.clone();
        label.suffix.last_mut().unwrap().number = Some(n);
        Some(label)
    }

    /// Expands a range anchor into the labels it covers. A plain label
    /// expands to itself.
    pub fn expand_range(&self) -> Vec<StepLabel> {
        match self.end {
            Some(end) if self.suffix.is_empty() => {
                (self.start..=end).map(StepLabel::main).collect()
            }
            _ => vec![self.clone()],
        }
    }
}

impl fmt::Display for StepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.start)?;
        if let Some(end) = self.end {
            write!(f, "-{end}")?;
        }
        for part in &self.suffix {
            write!(f, "{}", part.letter)?;
            if let Some(n) = part.number {
                write!(f, "{n}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid step label `{0}`")]
pub struct LabelError(pub String);

impl FromStr for StepLabel {
    type Err = LabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || LabelError(s.to_string());
        let bytes = s.as_bytes();
        let mut i = 0;
        let number = |i: &mut usize| -> Option<u32> {
            let begin = *i;
            while *i < bytes.len() && bytes[*i].is_ascii_digit() {
                *i += 1;
            }
            if *i == begin {
                None
            } else {
                s[begin..*i].parse().ok()
            }
        };
        let start = number(&mut i).ok_or_else(err)?;
        let mut end = None;
        if i < bytes.len() && bytes[i] == b'-' {
            i += 1;
            end = Some(number(&mut i).ok_or_else(err)?);
        }
        let mut suffix = Vec::new();
        while i < bytes.len() {
            let letter = bytes[i] as char;
            if !letter.is_ascii_lowercase() {
                return Err(err());
            }
            i += 1;
            let n = if i < bytes.len() && bytes[i].is_ascii_digit() {
                Some(number(&mut i).ok_or_else(err)?)
            } else {
                None
            };
            suffix.push(LabelPart { letter, number: n });
        }
        Ok(StepLabel { start, end, suffix })
    }
}

impl Serialize for StepLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StepLabel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn l(s: &str) -> StepLabel {
        s.parse().unwrap()
    }

    #[test]
    fn parses_shapes() {
        assert_eq!(l("4"), StepLabel::main(4));
        let r = l("2-6a");
        assert_eq!((r.start, r.end), (2, Some(6)));
        assert!(r.is_block_label());
        assert_eq!(r.anchor().unwrap().to_string(), "2-6");
        assert_eq!(l("2a1").final_number(), Some(1));
        assert_eq!(l("2a").final_number(), None);
        assert_eq!(l("2a1b").anchor(), Some(l("2a1")));
        assert_eq!(l("2a1b").block_step(3), Some(l("2a1b3")));
        assert_eq!(l("2-4").expand_range(), vec![l("2"), l("3"), l("4")]);
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "a", "2A", "2-", "-2", "2.1", "2a-3"] {
            assert!(bad.parse::<StepLabel>().is_err(), "{bad}");
        }
    }

    fn label_strategy() -> impl Strategy<Value = StepLabel> {
        (
            1u32..50,
            proptest::option::of(1u32..50),
            proptest::collection::vec(
                (
                    proptest::char::range('a', 'z'),
                    proptest::option::of(1u32..20),
                ),
                0..4,
            ),
        )
            .prop_map(|(start, end, parts)| StepLabel {
                start,
                end,
                suffix: parts
                    .into_iter()
                    .map(|(letter, number)| LabelPart { letter, number })
                    .collect(),
            })
    }

    proptest! {
        #[test]
        fn display_parse_roundtrip(label in label_strategy()) {
            let text = label.to_string();
            prop_assert_eq!(text.parse::<StepLabel>().unwrap(), label);
        }
    }
}

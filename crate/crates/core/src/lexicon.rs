//! Surface vocabulary consumed by the tokenizer.
//!
//! Tables keep their file order: the position of an adjective in the table
//! ranks its property when a description has several modifiers.

use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Number {
    #[default]
    Singular,
    Plural,
}

/// Agreement features carried by nouns and pronouns.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Features {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gender: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub number: Option<Number>,
}

/// Determiner classes. `Pronoun` never appears in the determiner table; it
/// classifies bare pronouns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DetClass {
    Indefinite,
    IndefiniteAnother,
    Definite,
    DefiniteOther,
    Demonstrative,
    Pronoun,
    Numeral(u32),
}

impl DetClass {
    pub fn is_definite(self) -> bool {
        matches!(self, DetClass::Definite | DetClass::DefiniteOther)
    }

    pub fn is_indefinite(self) -> bool {
        matches!(
            self,
            DetClass::Indefinite | DetClass::IndefiniteAnother | DetClass::Numeral(_)
        )
    }
}

impl fmt::Display for DetClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DetClass::Indefinite => f.write_str("indefinite"),
            DetClass::IndefiniteAnother => f.write_str("indefinite-another"),
            DetClass::Definite => f.write_str("definite"),
            DetClass::DefiniteOther => f.write_str("definite-other"),
            DetClass::Demonstrative => f.write_str("demonstrative"),
            DetClass::Pronoun => f.write_str("pronoun"),
            DetClass::Numeral(n) => write!(f, "numeral:{n}"),
        }
    }
}

impl FromStr for DetClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_lowercase().replace('_', "-");
        Ok(match s.as_str() {
            "indefinite" => DetClass::Indefinite,
            "indefinite-another" | "another" => DetClass::IndefiniteAnother,
            "definite" => DetClass::Definite,
            "definite-other" | "other" => DetClass::DefiniteOther,
            "demonstrative" => DetClass::Demonstrative,
            "pronoun" => DetClass::Pronoun,
            other => {
                let n = other.strip_prefix("numeral:").unwrap_or(other);
                match n.parse::<u32>() {
                    Ok(n) if n > 0 => DetClass::Numeral(n),
                    _ => return Err(format!("unknown determiner class `{s}`")),
                }
            }
        })
    }
}

impl Serialize for DetClass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DetClass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Count(u32),
            Name(String),
        }
        match Raw::deserialize(d)? {
            Raw::Count(n) if n > 0 => Ok(DetClass::Numeral(n)),
            Raw::Count(_) => Err(serde::de::Error::custom("numerals start at 1")),
            Raw::Name(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NounEntry {
    #[serde(rename = "type")]
    pub ty: String,
    pub number: Number,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gender: Option<String>,
}

impl<'de> Deserialize<'de> for NounEntry {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Full {
            #[serde(rename = "type")]
            ty: String,
            #[serde(default)]
            number: Number,
            #[serde(default)]
            gender: Option<String>,
        }
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Type(String),
            Full(Full),
        }
        Ok(match Raw::deserialize(d)? {
            Raw::Type(ty) => NounEntry {
                ty,
                number: Number::Singular,
                gender: None,
            },
            Raw::Full(f) => NounEntry {
                ty: f.ty,
                number: f.number,
                gender: f.gender,
            },
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjectiveEntry {
    pub property: String,
    pub value: String,
}

/// Which participant of a relational preposition is prominent.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Prominent {
    #[default]
    Head,
    Complement,
}

/// Where a prepositional phrase attaches: to the preceding noun phrase or to
/// the verb.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Attach {
    Noun,
    #[default]
    Verb,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrepEntry {
    pub relation: String,
    #[serde(default)]
    pub prominent: Prominent,
    #[serde(default)]
    pub attach: Attach,
}

fn default_conjunctions() -> Vec<String> {
    vec!["and".to_string()]
}

fn default_separators() -> Vec<String> {
    vec!["but".to_string()]
}

fn default_anaphoric_heads() -> Vec<String> {
    vec!["one".to_string()]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lexicon {
    #[serde(default)]
    pub nouns: IndexMap<String, NounEntry>,
    #[serde(default)]
    pub adjectives: IndexMap<String, AdjectiveEntry>,
    #[serde(default)]
    pub determiners: IndexMap<String, DetClass>,
    #[serde(default)]
    pub pronouns: IndexMap<String, Features>,
    #[serde(default)]
    pub prepositions: IndexMap<String, PrepEntry>,
    #[serde(default)]
    pub verbs: IndexMap<String, String>,
    #[serde(default)]
    pub negations: Vec<String>,
    #[serde(default = "default_conjunctions")]
    pub conjunctions: Vec<String>,
    #[serde(default)]
    pub fillers: Vec<String>,
    /// Words that start a new clause within one utterance, e.g. `but`.
    #[serde(default = "default_separators")]
    pub separators: Vec<String>,
    /// Single words that expand to several, e.g. `au` to `à le`.
    #[serde(default)]
    pub contractions: IndexMap<String, String>,
    /// Semantically empty nominal heads such as `one`.
    #[serde(default = "default_anaphoric_heads")]
    pub anaphoric_heads: Vec<String>,
}

impl Default for Lexicon {
    fn default() -> Self {
        Lexicon {
            nouns: IndexMap::new(),
            adjectives: IndexMap::new(),
            determiners: IndexMap::new(),
            pronouns: IndexMap::new(),
            prepositions: IndexMap::new(),
            verbs: IndexMap::new(),
            negations: Vec::new(),
            conjunctions: default_conjunctions(),
            fillers: Vec::new(),
            separators: default_separators(),
            contractions: IndexMap::new(),
            anaphoric_heads: default_anaphoric_heads(),
        }
    }
}

impl Lexicon {
    /// Rank of a property for choosing a definite's differentiation
    /// criterion: position of its first adjective in the table.
    pub fn property_rank(&self, property: &str) -> usize {
        self.adjectives
            .values()
            .position(|a| a.property == property)
            .unwrap_or(usize::MAX)
    }

    /// Longest entry, in words, over every table.
    pub fn max_phrase_words(&self) -> usize {
        let keys = self
            .nouns
            .keys()
            .chain(self.adjectives.keys())
            .chain(self.determiners.keys())
            .chain(self.pronouns.keys())
            .chain(self.prepositions.keys())
            .chain(self.verbs.keys())
            .chain(self.negations.iter())
            .chain(self.conjunctions.iter())
            .chain(self.fillers.iter())
            .chain(self.separators.iter())
            .chain(self.anaphoric_heads.iter());
        keys.map(|k| k.split_whitespace().count()).max().unwrap_or(1).max(1)
    }

    /// Lowercases every surface form so lookups match tokenizer output.
    pub(crate) fn normalize(&mut self) {
        fn keys<V>(map: &mut IndexMap<String, V>) {
            let old = std::mem::take(map);
            *map = old
                .into_iter()
                .map(|(k, v)| (normalize_phrase(&k), v))
                .collect();
        }
        keys(&mut self.nouns);
        keys(&mut self.adjectives);
        keys(&mut self.determiners);
        keys(&mut self.pronouns);
        keys(&mut self.prepositions);
        keys(&mut self.verbs);
        keys(&mut self.contractions);
        for list in [
            &mut self.negations,
            &mut self.conjunctions,
            &mut self.fillers,
            &mut self.separators,
            &mut self.anaphoric_heads,
        ] {
            for w in list.iter_mut() {
                *w = normalize_phrase(w);
            }
        }
    }
}

/// Lowercase, strip apostrophes, turn other punctuation into spaces and
/// collapse whitespace.
pub fn normalize_phrase(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        if ch == '\'' || ch == '’' {
            continue;
        }
        if ch.is_alphanumeric() || ch == '-' {
            out.extend(ch.to_lowercase());
        } else {
            out.push(' ');
        }
    }
    out.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determiner_classes_parse() {
        assert_eq!("indefinite".parse(), Ok(DetClass::Indefinite));
        assert_eq!("another".parse(), Ok(DetClass::IndefiniteAnother));
        assert_eq!("definite_other".parse(), Ok(DetClass::DefiniteOther));
        assert_eq!("numeral:2".parse(), Ok(DetClass::Numeral(2)));
        assert_eq!("3".parse(), Ok(DetClass::Numeral(3)));
        assert!("numeral:0".parse::<DetClass>().is_err());
        assert!("some".parse::<DetClass>().is_err());
    }

    #[test]
    fn noun_entries_accept_both_forms() {
        let lex: Lexicon = serde_json::from_str(
            r#"{"nouns": {"circle": "CIRCLE", "barre": {"type": "LINE", "gender": "f"},
                 "triangles": {"type": "TRIANGLE", "number": "plural"}}}"#,
        )
        .unwrap();
        assert_eq!(lex.nouns["circle"].ty, "CIRCLE");
        assert_eq!(lex.nouns["barre"].gender.as_deref(), Some("f"));
        assert_eq!(lex.nouns["triangles"].number, Number::Plural);
        assert_eq!(lex.conjunctions, vec!["and"]);
    }

    #[test]
    fn phrases_are_normalized() {
        assert_eq!(normalize_phrase("Don't  stick it!"), "dont stick it");
        assert_eq!(normalize_phrase("À gauche de"), "à gauche de");
    }

    #[test]
    fn property_rank_follows_table_order() {
        let lex: Lexicon = serde_json::from_str(
            r#"{"adjectives": {"red": {"property": "color", "value": "red"},
                               "big": {"property": "size", "value": "big"}}}"#,
        )
        .unwrap();
        assert!(lex.property_rank("color") < lex.property_rank("size"));
        assert_eq!(lex.property_rank("shape"), usize::MAX);
    }
}

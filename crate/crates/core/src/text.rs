//! Tokenizing and statute-mention scanning shared by retrieval and claim
//! construction.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use regex::Regex;

use crate::graph::{LegalGraph, NodeLabel};
use crate::ingest::{normalize_citation, section_key, Citation};

const STOPWORDS: &[&str] = &[
    "a", "about", "after", "again", "against", "all", "an", "and", "any", "are", "as", "at", "be",
    "been", "before", "being", "but", "by", "can", "could", "did", "do", "does", "for", "from",
    "had", "has", "have", "how", "i", "if", "in", "into", "is", "it", "its", "may", "me", "my",
    "no", "not", "of", "on", "or", "our", "over", "shall", "should", "so", "such", "than", "that",
    "the", "their", "them", "then", "there", "these", "they", "this", "those", "to", "under",
    "up", "upon", "was", "we", "were", "what", "when", "where", "whether", "which", "who", "whom",
    "why", "will", "with", "would", "you", "your",
    // too common in judgment text to discriminate
    "case", "cases", "court", "courts", "v", "vs", "versus", "state", "union", "india", "act",
    "section", "sections", "held", "law", "legal",
];

pub fn is_stopword(token: &str) -> bool {
    STOPWORDS.contains(&token)
}

/// Lowercased alphanumeric tokens.
pub fn tokens(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Tokens minus stopwords and single characters.
pub fn content_tokens(text: &str) -> BTreeSet<String> {
    tokens(text)
        .into_iter()
        .filter(|t| t.chars().count() > 1 && !is_stopword(t))
        .collect()
}

/// Known act abbreviations and the phrases that refer to them. Longer
/// abbreviations come first so `BNSS` is tried before `BNS`.
const ACT_ALIASES: &[(&str, &[&str])] = &[
    ("CrPC", &["crpc", "cr.p.c", "cr. p. c", "code of criminal procedure"]),
    ("BNSS", &["bnss", "bharatiya nagarik suraksha sanhita"]),
    ("BNS", &["bns", "bharatiya nyaya sanhita"]),
    ("IPC", &["ipc", "i.p.c", "indian penal code"]),
    ("CPC", &["cpc", "c.p.c", "code of civil procedure"]),
    ("NDPS", &["ndps"]),
    ("PMLA", &["pmla", "prevention of money laundering act"]),
    ("ID Act", &["industrial disputes act"]),
    ("Evidence Act", &["evidence act"]),
];

fn alnum_lower(s: &str) -> String {
    s.chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect()
}

/// True when a statute name such as `CrPC-1973` or `Code of Criminal
/// Procedure, 1973` refers to `act`.
fn statute_matches_act(statute_name: &str, act: &str) -> bool {
    let name = alnum_lower(statute_name);
    let abbrev = alnum_lower(act);
    if name
        .strip_prefix(&abbrev)
        .is_some_and(|rest| !rest.starts_with(|c: char| c.is_alphabetic()))
    {
        return true;
    }
    ACT_ALIASES
        .iter()
        .filter(|(a, _)| *a == act)
        .flat_map(|(_, phrases)| phrases.iter())
        .filter(|p| p.contains(' '))
        .any(|p| phrase_in(statute_name, p))
}

/// Case-insensitive match of `phrase` on word boundaries. `phrase` must be lowercase.
pub fn phrase_in(window: &str, phrase: &str) -> bool {
    let window = window.to_lowercase();
    let mut from = 0;
    while let Some(pos) = window[from..].find(phrase) {
        let start = from + pos;
        let end = start + phrase.len();
        let before_ok = window[..start]
            .chars()
            .next_back()
            .is_none_or(|c| !c.is_alphanumeric());
        let after_ok = window[end..].chars().next().is_none_or(|c| !c.is_alphanumeric());
        if before_ok && after_ok {
            return true;
        }
        from = start + 1;
    }
    false
}

/// A `Section N <Act>` reference found in free text.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SectionMention {
    pub number: String,
    pub act: String,
}

fn section_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)\b(?:section|sec\.|s\.)\s*(\d+[a-z]?)\b").unwrap())
}

/// Finds section references that name a recognised act within a few words
/// after the number.
pub fn section_mentions(text: &str) -> Vec<SectionMention> {
    let mut out = Vec::new();
    for caps in section_regex().captures_iter(text) {
        let whole = caps.get(0).unwrap();
        let tail: String = text[whole.end()..].chars().take(48).collect();
        let window: String = tail.split(['.', ';', '\n']).next().unwrap_or("").to_owned();
        let window = if window.trim().is_empty() { tail } else { window };
        if let Some((act, _)) = ACT_ALIASES
            .iter()
            .find(|(_, phrases)| phrases.iter().any(|p| phrase_in(&window, p)))
        {
            let m = SectionMention {
                number: caps[1].to_uppercase(),
                act: (*act).to_owned(),
            };
            if !out.contains(&m) {
                out.push(m);
            }
        }
    }
    out
}

/// Resolves a mention to a Section key in the graph, falling back to
/// `<Act>/<number>` when the graph has no such section.
pub fn resolve_section(graph: &LegalGraph, mention: &SectionMention) -> String {
    graph
        .nodes_with_label(NodeLabel::Section)
        .filter(|n| n.text("number").is_some_and(|num| num.eq_ignore_ascii_case(&mention.number)))
        .filter(|n| {
            n.text("statute_name")
                .is_some_and(|s| statute_matches_act(s, &mention.act))
        })
        .map(|n| n.key.clone())
        .min()
        .unwrap_or_else(|| section_key(&mention.act, &mention.number))
}

pub fn resolve_sections(graph: &LegalGraph, text: &str) -> Vec<String> {
    let mut keys = Vec::new();
    for m in section_mentions(text) {
        let k = resolve_section(graph, &m);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys
}

fn citation_regexes() -> &'static [Regex] {
    static RE: OnceLock<Vec<Regex>> = OnceLock::new();
    RE.get_or_init(|| {
        vec![
            Regex::new(r"\(\d{4}\)\s+\d+\s+SCC(?:\s+\(\w+\))?\s+\d+").unwrap(),
            Regex::new(r"\b\d{4}\s+Supp\s+\(\d+\)\s+SCC\s+\d+").unwrap(),
            Regex::new(r"\b\d{4}\s+Supp\s+SCC\s+\d+").unwrap(),
            Regex::new(r"\bAIR\s+\d{4}\s+SC\s+\d+").unwrap(),
            Regex::new(r"\[\d{4}\]\s+\d+\s+S\.?C\.?R\.?\s+\d+").unwrap(),
        ]
    })
}

/// Citation-like strings in free text, in order of appearance.
pub fn scan_citations(text: &str) -> Vec<Citation> {
    let mut hits: Vec<(usize, Citation)> = citation_regexes()
        .iter()
        .flat_map(|re| re.find_iter(text))
        .filter_map(|m| normalize_citation(m.as_str()).ok().map(|c| (m.start(), c)))
        .collect();
    hits.sort_by_key(|(pos, _)| *pos);
    let mut out: Vec<Citation> = Vec::new();
    for (_, c) in hits {
        if !out.iter().any(|o| o.matches(&c)) {
            out.push(c);
        }
    }
    out
}

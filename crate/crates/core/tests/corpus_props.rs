use std::num::NonZeroUsize;

use proptest::prelude::*;
use topicgraph::corpus::{tokenize, Document, StopWordSet};

fn word() -> impl Strategy<Value = String> {
    prop_oneof![
        "[a-z]{1,8}",
        "[A-Z][a-z]{0,6}",
        "[A-Za-z]{1,4}-[A-Za-z0-9]{1,3}",
        "[0-9]{1,4}(\\.[0-9])?",
        "[a-zé]{2,5}",
        "[%&()/,;:\"']",
    ]
}

fn abstract_text() -> impl Strategy<Value = String> {
    let sentence = (
        prop::collection::vec(word(), 0..12),
        prop::sample::select(vec![".", "!", "?", ""]),
    );
    prop::collection::vec(sentence, 0..6).prop_map(|ss| {
        ss.into_iter()
            .map(|(ws, end)| format!("{}{}", ws.join(" "), end))
            .collect::<Vec<_>>()
            .join(" ")
    })
}

fn stop_list() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec("[a-z]{1,3}", 0..40)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn tokens_are_lowercase_ascii_and_not_stopped(text in abstract_text(), stops in stop_list()) {
        let stops = StopWordSet::from_words(&stops);
        let t = tokenize(&Document::new("d", "", text), &stops);
        for s in &t.sentences {
            prop_assert!(!s.is_empty());
            for tok in s {
                prop_assert!(!tok.is_empty() && tok.bytes().all(|b| b.is_ascii_lowercase()), "{tok:?}");
                prop_assert!(!stops.contains(tok));
            }
        }
        let per_sentence: usize = t.sentences.iter().map(Vec::len).sum();
        prop_assert_eq!(per_sentence, t.token_count());
    }

    #[test]
    fn larger_stop_set_never_adds_tokens(text in abstract_text(), base in stop_list(), extra in stop_list()) {
        let doc = Document::new("d", "", text);
        let small = StopWordSet::from_words(&base);
        let big = StopWordSet::from_words(base.iter().chain(&extra));
        prop_assert!(tokenize(&doc, &big).token_count() <= tokenize(&doc, &small).token_count());
    }

    #[test]
    fn retokenizing_rendered_output_is_stable(text in abstract_text(), stops in stop_list()) {
        let stops = StopWordSet::from_words(&stops);
        let once = tokenize(&Document::new("d", "", text), &stops);
        let twice = tokenize(&Document::new("d", "", once.to_text()), &stops);
        prop_assert_eq!(once, twice);
    }
}

#[test]
fn candidates_come_from_unfiltered_tokens() {
    let doc = Document::new("d", "", "The virus and the cell. The virus spreads.");
    let raw = tokenize(&doc, &StopWordSet::empty());
    let c = topicgraph::corpus::generate_stopword_candidates([&raw], NonZeroUsize::new(2).unwrap());
    assert_eq!(c, vec![("the".to_string(), 3), ("virus".to_string(), 2)]);
}

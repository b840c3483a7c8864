mod common;

use common::*;
use proptest::prelude::*;
use refdom::engine::Compatibility;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn context_invariants_hold_after_every_utterance(case in dialogue_case()) {
        prop_invariants(&case)?;
    }

    #[test]
    fn resolution_guarantees_per_determiner(case in dialogue_case()) {
        prop_resolution(&case)?;
    }

    #[test]
    fn traces_are_deterministic(case in dialogue_case()) {
        prop_determinism(&case)?;
    }

    #[test]
    fn subsumption_is_a_partial_order(h in forest()) {
        prop_partial_order(&h)?;
    }

    #[test]
    fn proximity_matches_single_link_oracle((points, t) in positions()) {
        prop_clustering(&points, t)?;
    }

    #[test]
    fn compatibility_matrix(f in matrix_fixture()) {
        for det in DETS {
            for shape in SHAPES {
                let got = matrix_outcome(&f, det, shape);
                prop_assert_eq!(got == Compatibility::Pass, expected(det, shape), "{:?} on {:?}: {:?}", det, shape, got);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn rendering_reparses_to_the_same_tree(s in sentence()) {
        use refdom::parser::{parse_text, render_utterance, UnknownPolicy};
        let kb = kb("en");
        let utt = parse_text(&s, &kb.lexicon, UnknownPolicy::Fail).unwrap();
        let rendered = render_utterance(&utt, &kb.lexicon);
        let again = parse_text(&rendered, &kb.lexicon, UnknownPolicy::Fail).unwrap();
        prop_assert_eq!(render_utterance(&again, &kb.lexicon), rendered.clone());
        prop_assert_eq!(again, utt, "{:?} rendered as {:?}", s, rendered);
    }
}

#[test]
fn french_sentences_round_trip() {
    use refdom::parser::{parse_text, render_utterance, UnknownPolicy};
    let kb = kb("fr");
    for s in [
        "alors tu vas prendre un gros rond",
        "voilà et à gauche de ce rond tu vas prendre une petite barre",
        "tu ne la colles pas au rond hein",
    ] {
        let utt = parse_text(s, &kb.lexicon, UnknownPolicy::Fail).unwrap();
        let rendered = render_utterance(&utt, &kb.lexicon);
        assert_eq!(parse_text(&rendered, &kb.lexicon, UnknownPolicy::Fail).unwrap(), utt, "{rendered}");
    }
}

//! Property tests: lexer span tiling, canonical-form round-tripping over
//! generated models, and validation monotonicity under added
//! declarations.

use proptest::prelude::*;

use hts_core::diag::Severity;
use hts_core::dsl::{format_canonical, parse, tokenize};
use hts_core::ident::Ident;
use hts_core::model::{
    AdverseEvent, CauseDecl, ConstraintKind, ControlLoop, Controller, ControllerDomain, Entity,
    Gate, Interaction, Model, ModelParts, Recommendation, RecommendationCategory, Risk,
    SafetyConstraint, Severity as RiskSeverity, SystemRole, Tier,
};

// ---- lexer ----

proptest! {
    /// Token spans tile the source: the non-token gaps are whitespace
    /// and concatenating them back reproduces the input byte-for-byte.
    #[test]
    fn token_spans_tile_the_source(src in "\\PC{0,200}") {
        let (tokens, _) = tokenize(&src);
        let mut rebuilt = String::new();
        let mut pos = 0;
        for t in &tokens {
            prop_assert!(t.span.start >= pos, "overlapping spans");
            rebuilt.push_str(&src[pos..t.span.start]);
            rebuilt.push_str(t.text);
            pos = t.span.end;
        }
        rebuilt.push_str(&src[pos..]);
        prop_assert_eq!(rebuilt, src);
    }

    /// Lexing and parsing are deterministic.
    #[test]
    fn tokenize_is_deterministic(src in "\\PC{0,200}") {
        let (t1, d1) = tokenize(&src);
        let (t2, d2) = tokenize(&src);
        prop_assert_eq!(t1, t2);
        prop_assert_eq!(d1, d2);
    }

    /// The parser terminates without panicking on any input, and a model
    /// comes back only when no error was diagnosed.
    #[test]
    fn parse_never_panics(src in "\\PC{0,300}") {
        let (model, diags) = parse(&src);
        let has_error = diags.iter().any(|d| d.severity == Severity::Error);
        prop_assert_eq!(model.is_some(), !has_error);
    }

    /// Keyword soup exercises the recovery paths harder than random
    /// unicode does.
    #[test]
    fn parse_never_panics_on_keyword_soup(
        words in proptest::collection::vec(
            prop_oneof![
                Just("system"), Just("hazard"), Just("causes"), Just("loop"),
                Just("{"), Just("}"), Just("("), Just(")"), Just(","), Just(";"),
                Just("<-"), Just("all"), Just("x"), Just("E1.1"), Just("\"s\""),
                Just("violates"), Just("enforces"), Just("part_of"), Just("#c\n")
            ],
            0..40
        )
    ) {
        let src = words.join(" ");
        let (model, diags) = parse(&src);
        let has_error = diags.iter().any(|d| d.severity == Severity::Error);
        prop_assert_eq!(model.is_some(), !has_error);
    }
}

// ---- canonical form round-trip over generated models ----

fn label_strategy() -> impl Strategy<Value = String> {
    // Printable text plus the escapables; newlines and tabs exercise the
    // string escaping.
    proptest::string::string_regex("[ -~\\n\\t\u{e9}\u{4e2d}]{0,12}").unwrap()
}

prop_compose! {
    fn entity_strategy(i: usize)(
        role in prop_oneof![Just(SystemRole::Hazard), Just(SystemRole::Target)],
        label in label_strategy(),
        parent in proptest::option::of(0..6usize),
    ) -> Entity {
        Entity {
            id: Ident::new(format!("N{i}")),
            role,
            label,
            parent: parent.map(|p| Ident::new(format!("N{p}"))),
        }
    }
}

fn tier_strategy() -> impl Strategy<Value = Tier> {
    prop_oneof![Just(Tier::Micro), Just(Tier::Meso), Just(Tier::Macro)]
}

prop_compose! {
    fn constraint_strategy(i: usize)(
        kind in prop_oneof![
            Just(ConstraintKind::Subsystem),
            Just(ConstraintKind::Interaction),
            Just(ConstraintKind::Control)
        ],
        tier in tier_strategy(),
        subject in 0..6usize,
        text in label_strategy(),
    ) -> SafetyConstraint {
        SafetyConstraint {
            id: Ident::new(format!("SC{i}")),
            kind,
            tier,
            subject: Ident::new(format!("N{subject}")),
            text,
        }
    }
}

prop_compose! {
    fn model_strategy()(
        n_entities in 1..6usize,
        n_constraints in 0..5usize,
        n_events in 0..5usize,
        n_risks in 0..3usize,
    )(
        entities in (0..n_entities).prop_map(|n| n).prop_flat_map(move |n| {
            proptest::collection::vec(any::<u8>(), n..=n).prop_flat_map(move |_| {
                let strategies: Vec<_> = (0..n).map(entity_strategy).collect();
                strategies
            })
        }),
        constraints in {
            let strategies: Vec<_> = (0..n_constraints).map(constraint_strategy).collect();
            strategies
        },
        events in proptest::collection::vec(
            (0..8usize, label_strategy()),
            n_events..=n_events
        ),
        risks in proptest::collection::vec(
            (
                prop_oneof![
                    Just(RiskSeverity::NearMiss),
                    Just(RiskSeverity::Incident),
                    Just(RiskSeverity::Accident),
                    Just(RiskSeverity::MajorAccident)
                ],
                0..6usize,
                label_strategy()
            ),
            n_risks..=n_risks
        ),
        gate in prop_oneof![Just(Gate::All), Just(Gate::Any)],
        with_interaction in any::<bool>(),
        with_loop in any::<bool>(),
        with_rec in any::<bool>(),
    ) -> Model {
        let events: Vec<AdverseEvent> = events
            .into_iter()
            .enumerate()
            .map(|(i, (sc, text))| AdverseEvent {
                id: Ident::new(format!("E{i}")),
                violates: Ident::new(format!("SC{sc}")),
                text,
            })
            .collect();
        let risks: Vec<Risk> = risks
            .into_iter()
            .enumerate()
            .map(|(i, (severity, subject, text))| Risk {
                id: Ident::new(format!("R{i}")),
                severity,
                subject: Ident::new(format!("N{subject}")),
                text,
            })
            .collect();
        let causes = if events.len() >= 2 {
            vec![CauseDecl {
                target: events[0].id.clone(),
                gate,
                sources: events[1..].iter().map(|e| e.id.clone()).collect(),
            }]
        } else {
            Vec::new()
        };
        let interactions = if with_interaction && !entities.is_empty() {
            vec![Interaction {
                id: Ident::new("IX0"),
                participants: vec![Ident::new("N0"), Ident::new("N1")],
                label: String::new(),
            }]
        } else {
            Vec::new()
        };
        let controllers = vec![Controller {
            id: Ident::new("ctrl0"),
            tier: Tier::Meso,
            domain: ControllerDomain::Social,
            label: "controller".into(),
        }];
        let loops = if with_loop && !constraints.is_empty() {
            vec![ControlLoop {
                id: Ident::new("L0"),
                controller: Ident::new("ctrl0"),
                controls: Ident::new("N0"),
                actuator: Some("act".into()),
                sensor: None,
                enforces: vec![constraints[0].id.clone()],
            }]
        } else {
            Vec::new()
        };
        let recommendations = if with_rec {
            vec![Recommendation {
                for_controller: Ident::new("ctrl0"),
                category: RecommendationCategory::Government,
                text: "inspect on site".into(),
            }]
        } else {
            Vec::new()
        };
        Model::new(ModelParts {
            name: Ident::new("generated"),
            entities,
            interactions,
            constraints,
            events,
            risks,
            causes,
            controllers,
            loops,
            recommendations,
            ..Default::default()
        })
        .expect("generated ids are unique")
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// format -> parse -> format is the identity on the IR and on bytes.
    #[test]
    fn canonical_form_round_trips(model in model_strategy()) {
        let once = format_canonical(&model);
        let (reparsed, diags) = parse(&once);
        prop_assert!(
            diags.iter().all(|d| d.severity != Severity::Error),
            "canonical output must reparse: {diags:?}\n{once}"
        );
        let reparsed = reparsed.expect("no errors");
        prop_assert_eq!(&model, &reparsed, "round-trip changed the model:\n{}", once);
        let twice = format_canonical(&reparsed);
        prop_assert_eq!(once, twice);
    }
}

// ---- span accuracy ----

/// Every diagnostic produced on the fixture corpus points at real
/// source text: either the message repeats the quoted span text, or a
/// token the message names in backticks lies inside the quoted span.
#[test]
fn fixture_diagnostics_have_accurate_spans() {
    let dir = format!("{}/../../fixtures", env!("CARGO_MANIFEST_DIR"));
    let mut checked = 0;
    for entry in std::fs::read_dir(&dir).expect("fixtures directory") {
        let path = entry.unwrap().path();
        if path.extension().map(|e| e != "hts").unwrap_or(true) {
            continue;
        }
        let source = std::fs::read_to_string(&path).unwrap();
        let (model, mut diags) = parse(&source);
        if let Some(model) = &model {
            diags.extend(hts_core::validate::validate(model).diagnostics);
        }
        for d in &diags {
            assert!(d.span.end <= source.len(), "{path:?}: span out of bounds");
            let quoted = &source[d.span.start..d.span.end];
            assert!(!quoted.is_empty(), "{path:?}: empty span for {d}");
            let named: Vec<&str> = d
                .message
                .split('`')
                .skip(1)
                .step_by(2)
                .collect();
            let ok = d.message.contains(quoted)
                || named.iter().any(|n| quoted.contains(n));
            assert!(ok, "{path:?}: span {quoted:?} unrelated to message {:?}", d.message);
            checked += 1;
        }
    }
    assert!(checked >= 12, "expected at least one finding per fixture, saw {checked}");
}

// ---- validation monotonicity ----

/// Adding a declaration never removes an error finding, except that a
/// V101 disappears when the added declaration resolves the dangling
/// reference.
#[test]
fn adding_declarations_preserves_error_findings() {
    let seeds = [
        // dangling violates (V101)
        "system s {\n  event E1 violates SC1\n}",
        // duplicate events on one constraint (V110)
        "system s {\n  hazard H\n  constraint SC1 kind control level micro on H \"c\"\n  event E1 violates SC1\n  event E2 violates SC1\n}",
        // upward edge (V120)
        "system s {\n  hazard H\n  constraint A1 kind control level micro on H \"a\"\n  constraint A2 kind control level meso on H \"b\"\n  event E1 violates A1\n  event E2 violates A2\n  causes E2 <- any(E1)\n}",
        // cycle (V130)
        "system s {\n  hazard H\n  constraint A1 kind control level micro on H \"a\"\n  constraint A2 kind control level micro on H \"b\"\n  event E1 violates A1\n  event E2 violates A2\n  causes E1 <- any(E2)\n  causes E2 <- any(E1)\n}",
    ];
    let additions = [
        "hazard ZZNEW \"added\"",
        "target ZZT \"added\"",
        "constraint SC1 kind control level micro on ZZNEW \"resolves the dangling violates\"",
        "controller zznew_ctrl level macro domain technical",
        "risk ZZR kind near_miss on ZZNEW",
    ];

    for seed in seeds {
        let (before_model, _) = parse(seed);
        let before_model = before_model.expect("seeds parse");
        let before = hts_core::validate::validate(&before_model);

        for addition in additions {
            let grown = seed.replace("\n}", &format!("\n  {addition}\n}}"));
            let (after_model, _) = parse(&grown);
            let Some(after_model) = after_model else {
                // The added declaration collides with an id the seed
                // already declares; not a growth of the model.
                continue;
            };
            let after = hts_core::validate::validate(&after_model);

            let count = |report: &hts_core::validate::ValidationReport, code: &str| {
                report
                    .diagnostics
                    .iter()
                    .filter(|d| d.code == code && d.severity == Severity::Error)
                    .count()
            };
            for code in ["V102", "V110", "V120", "V130"] {
                assert!(
                    count(&after, code) >= count(&before, code),
                    "adding `{addition}` removed a {code} finding from:\n{seed}"
                );
            }
            // V101 may only decrease when the addition resolves it.
            if count(&after, "V101") < count(&before, "V101") {
                assert!(
                    addition.contains("SC1"),
                    "V101 vanished without resolving the reference"
                );
            }
        }
    }
}

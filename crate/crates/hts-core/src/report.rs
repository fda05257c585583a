//! Deterministic emitters: DOT diagrams for the event-flow graph and the
//! control structure, a lossless JSON export, and a markdown accident
//! report. Every emitter is a pure function; identical inputs produce
//! byte-identical output (golden-file testable).

use std::collections::BTreeSet;
use std::fmt::Write;

use serde::Serialize;

use crate::diag::Diagnostic;
use crate::flowgraph::{FlowGraph, SystemState};
use crate::ident::Ident;
use crate::model::{Element, Model, SystemRole, Tier};

/// Diagram options: which tiers to include, nodes to highlight, and the
/// layout direction.
#[derive(Debug, Clone)]
pub struct EmitOptions {
    tiers: BTreeSet<Tier>,
    pub highlight: BTreeSet<Ident>,
    pub rankdir: RankDir,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankDir {
    TopToBottom,
    LeftToRight,
}

impl Default for EmitOptions {
    fn default() -> Self {
        EmitOptions {
            tiers: BTreeSet::from([Tier::Macro, Tier::Meso, Tier::Micro, Tier::Risk]),
            highlight: BTreeSet::new(),
            rankdir: RankDir::TopToBottom,
        }
    }
}

impl EmitOptions {
    /// Restrict the diagram to the given tiers. An empty selection is
    /// ignored: the tier set must stay nonempty.
    pub fn with_tiers(mut self, tiers: impl IntoIterator<Item = Tier>) -> Self {
        let set: BTreeSet<Tier> = tiers.into_iter().collect();
        if !set.is_empty() {
            self.tiers = set;
        }
        self
    }

    pub fn with_highlight(mut self, nodes: impl IntoIterator<Item = Ident>) -> Self {
        self.highlight = nodes.into_iter().collect();
        self
    }

    pub fn with_rankdir(mut self, rankdir: RankDir) -> Self {
        self.rankdir = rankdir;
        self
    }

    pub fn tiers(&self) -> &BTreeSet<Tier> {
        &self.tiers
    }
}

/// DOT node identifiers may not contain dots; `E1.1` becomes `E1_1`.
/// Labels keep the original id, so the mangling is reversible by eye.
fn mangle(id: &str) -> String {
    id.replace('.', "_")
}

fn escape_label(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', "\\n")
}

fn node_label(id: &str, text: &str) -> String {
    if text.is_empty() {
        escape_label(id)
    } else {
        format!("{}: {}", escape_label(id), escape_label(text))
    }
}

fn rankdir_value(rankdir: RankDir) -> &'static str {
    match rankdir {
        RankDir::TopToBottom => "TB",
        RankDir::LeftToRight => "LR",
    }
}

/// Tiers in presentation order, top of the causal ladder first.
const TIER_ORDER: [Tier; 4] = [Tier::Macro, Tier::Meso, Tier::Micro, Tier::Risk];

fn tier_title(tier: Tier) -> &'static str {
    match tier {
        Tier::Macro => "Macro",
        Tier::Meso => "Meso",
        Tier::Micro => "Micro",
        Tier::Risk => "Risk",
    }
}

/// Render the event-flow graph as a DOT digraph, clustered by tier.
/// Edges whose endpoints are not both within the selected tiers are
/// dropped, never contracted.
pub fn emit_dot_flow(graph: &FlowGraph, options: &EmitOptions) -> String {
    let mut out = String::new();
    out.push_str("digraph flow {\n");
    let _ = writeln!(out, "  rankdir={};", rankdir_value(options.rankdir));
    out.push_str("  node [shape=box];\n");

    let included = |id: &Ident| {
        graph
            .tier_of(id.as_str())
            .map(|t| options.tiers.contains(&t))
            .unwrap_or(false)
    };

    for tier in TIER_ORDER {
        if !options.tiers.contains(&tier) {
            continue;
        }
        let _ = writeln!(out, "  subgraph cluster_{} {{", tier.name());
        let _ = writeln!(out, "    label=\"{}\";", tier_title(tier));
        for (id, node) in graph.nodes().filter(|(_, n)| n.tier == tier) {
            let mut attrs = format!("label=\"{}\"", node_label(id.as_str(), &node.label));
            if options.highlight.contains(id) {
                attrs.push_str(", style=filled, fillcolor=gold");
            }
            let _ = writeln!(out, "    {} [{}];", mangle(id.as_str()), attrs);
        }
        out.push_str("  }\n");
    }

    for (source, target) in graph.edges() {
        if included(source) && included(target) {
            let _ = writeln!(out, "  {} -> {};", mangle(source.as_str()), mangle(target.as_str()));
        }
    }

    out.push_str("}\n");
    out
}

/// Render the safety control structure as a DOT digraph: controllers
/// clustered by tier and split by domain (social before technical),
/// controlled subjects in their own cluster, and one labeled edge per
/// control loop.
pub fn emit_dot_control(model: &Model) -> String {
    let mut out = String::new();
    out.push_str("digraph control {\n");
    out.push_str("  rankdir=TB;\n");
    out.push_str("  node [shape=box];\n");

    for tier in [Tier::Macro, Tier::Meso, Tier::Micro] {
        let at_tier: Vec<_> = model.controllers().iter().filter(|c| c.tier == tier).collect();
        if at_tier.is_empty() {
            continue;
        }
        let _ = writeln!(out, "  subgraph cluster_{} {{", tier.name());
        let _ = writeln!(out, "    label=\"{}\";", tier_title(tier));
        for domain in [crate::model::ControllerDomain::Social, crate::model::ControllerDomain::Technical] {
            let members: Vec<_> = at_tier.iter().filter(|c| c.domain == domain).collect();
            if members.is_empty() {
                continue;
            }
            let _ = writeln!(out, "    subgraph cluster_{}_{} {{", tier.name(), domain.name());
            let _ = writeln!(
                out,
                "      label=\"{}\";",
                match domain {
                    crate::model::ControllerDomain::Social => "Social",
                    crate::model::ControllerDomain::Technical => "Technical",
                }
            );
            for c in members {
                let _ = writeln!(
                    out,
                    "      {} [label=\"{}\"];",
                    mangle(c.id.as_str()),
                    node_label(c.id.as_str(), &c.label)
                );
            }
            out.push_str("    }\n");
        }
        out.push_str("  }\n");
    }

    // Controlled subjects: every target of a loop, with its own label.
    let controlled: BTreeSet<&Ident> = model.loops().iter().map(|l| &l.controls).collect();
    if !controlled.is_empty() {
        out.push_str("  subgraph cluster_controlled {\n");
        out.push_str("    label=\"Controlled systems\";\n");
        for id in &controlled {
            let text = match model.resolve(id.as_str()) {
                Some(Element::Entity(e)) => e.label.clone(),
                Some(Element::Interaction(x)) => x.label.clone(),
                _ => String::new(),
            };
            let _ = writeln!(out, "    {} [label=\"{}\"];", mangle(id.as_str()), node_label(id.as_str(), &text));
        }
        out.push_str("  }\n");
    }

    for l in model.loops() {
        let _ = writeln!(
            out,
            "  {} -> {} [label=\"{}\"];",
            mangle(l.controller.as_str()),
            mangle(l.controls.as_str()),
            escape_label(l.id.as_str())
        );
    }

    out.push_str("}\n");
    out
}

/// Analysis results optionally attached to the JSON export.
#[derive(Debug, Clone, Default, Serialize)]
pub struct AnalysisResults {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<SystemState>,
}

#[derive(Serialize)]
struct JsonEntity<'a> {
    id: &'a Ident,
    role: SystemRole,
    label: &'a str,
    parent: Option<&'a Ident>,
}

#[derive(Serialize)]
struct JsonInteraction<'a> {
    id: &'a Ident,
    participants: &'a [Ident],
    label: &'a str,
}

#[derive(Serialize)]
struct JsonRisk<'a> {
    id: &'a Ident,
    severity: &'static str,
    subject: &'a Ident,
    text: &'a str,
}

#[derive(Serialize)]
struct JsonConstraint<'a> {
    id: &'a Ident,
    kind: &'static str,
    tier: &'static str,
    subject: &'a Ident,
    text: &'a str,
}

#[derive(Serialize)]
struct JsonEvent<'a> {
    id: &'a Ident,
    violates: &'a Ident,
    text: &'a str,
}

#[derive(Serialize)]
struct JsonCause<'a> {
    target: &'a Ident,
    gate: &'static str,
    sources: &'a [Ident],
}

#[derive(Serialize)]
struct JsonController<'a> {
    id: &'a Ident,
    tier: &'static str,
    domain: &'static str,
    label: &'a str,
}

#[derive(Serialize)]
struct JsonLoop<'a> {
    id: &'a Ident,
    controller: &'a Ident,
    controls: &'a Ident,
    actuator: Option<&'a str>,
    sensor: Option<&'a str>,
    enforces: &'a [Ident],
}

#[derive(Serialize)]
struct JsonRecommendation<'a> {
    controller: &'a Ident,
    category: &'static str,
    text: &'a str,
}

#[derive(Serialize)]
struct JsonModel<'a> {
    name: &'a Ident,
    entities: Vec<JsonEntity<'a>>,
    interactions: Vec<JsonInteraction<'a>>,
    risks: Vec<JsonRisk<'a>>,
    constraints: Vec<JsonConstraint<'a>>,
    events: Vec<JsonEvent<'a>>,
    causes: Vec<JsonCause<'a>>,
    controllers: Vec<JsonController<'a>>,
    loops: Vec<JsonLoop<'a>>,
    recommendations: Vec<JsonRecommendation<'a>>,
    diagnostics: &'a [Diagnostic],
    analyses: &'a AnalysisResults,
}

/// Serialize a model (plus diagnostics and optional analysis results) to
/// a single JSON document with a fixed key order, arrays in id order,
/// two-space indentation, LF endings, and a trailing newline.
pub fn emit_json(model: &Model, diagnostics: &[Diagnostic], analyses: &AnalysisResults) -> String {
    let doc = JsonModel {
        name: model.name(),
        entities: model
            .entities()
            .iter()
            .map(|e| JsonEntity { id: &e.id, role: e.role, label: &e.label, parent: e.parent.as_ref() })
            .collect(),
        interactions: model
            .interactions()
            .iter()
            .map(|x| JsonInteraction { id: &x.id, participants: &x.participants, label: &x.label })
            .collect(),
        risks: model
            .risks()
            .iter()
            .map(|r| JsonRisk {
                id: &r.id,
                severity: r.severity.keyword(),
                subject: &r.subject,
                text: &r.text,
            })
            .collect(),
        constraints: model
            .constraints()
            .iter()
            .map(|c| JsonConstraint {
                id: &c.id,
                kind: c.kind.name(),
                tier: c.tier.name(),
                subject: &c.subject,
                text: &c.text,
            })
            .collect(),
        events: model
            .events()
            .iter()
            .map(|e| JsonEvent { id: &e.id, violates: &e.violates, text: &e.text })
            .collect(),
        causes: model
            .causes()
            .iter()
            .map(|c| JsonCause { target: &c.target, gate: c.gate.name(), sources: &c.sources })
            .collect(),
        controllers: model
            .controllers()
            .iter()
            .map(|c| JsonController {
                id: &c.id,
                tier: c.tier.name(),
                domain: c.domain.name(),
                label: &c.label,
            })
            .collect(),
        loops: model
            .loops()
            .iter()
            .map(|l| JsonLoop {
                id: &l.id,
                controller: &l.controller,
                controls: &l.controls,
                actuator: l.actuator.as_deref(),
                sensor: l.sensor.as_deref(),
                enforces: &l.enforces,
            })
            .collect(),
        recommendations: model
            .recommendations()
            .iter()
            .map(|r| JsonRecommendation {
                controller: &r.for_controller,
                category: r.category.keyword(),
                text: &r.text,
            })
            .collect(),
        diagnostics,
        analyses,
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("model serialization cannot fail");
    out.push('\n');
    out
}

/// Serialize a bare diagnostic list (the `check --json` payload); same
/// object shape as the `diagnostics` array of [`emit_json`].
pub fn diagnostics_json(diagnostics: &[Diagnostic]) -> String {
    serde_json::to_string_pretty(diagnostics).expect("diagnostic serialization cannot fail")
}

/// Render the accident report: summary, per-risk event flow, cross-level
/// table, and recommendations grouped by the six categories.
pub fn emit_report_markdown(model: &Model, graph: &FlowGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Accident analysis report: {}\n", model.name());

    out.push_str("## Summary\n\n");
    if model.risks().is_empty() {
        out.push_str("none recorded\n");
    } else {
        for r in model.risks() {
            let _ = write!(out, "- **{}** ({})", r.id, r.severity);
            if !r.text.is_empty() {
                let _ = write!(out, ": {}", r.text);
            }
            out.push('\n');
        }
    }
    out.push('\n');

    out.push_str("## Event flow\n\n");
    if model.risks().is_empty() {
        out.push_str("none recorded\n");
    } else {
        for r in model.risks() {
            let _ = write!(out, "- **{}**", r.id);
            if !r.text.is_empty() {
                let _ = write!(out, " ({})", r.text);
            }
            match graph.direct_causes(r.id.as_str()) {
                Ok(causes) if !causes.is_empty() => {
                    let gate = graph.gate_of(r.id.as_str()).map(|g| g.name()).unwrap_or("any");
                    let _ = write!(out, " — caused by {} of: ", gate);
                    let parts: Vec<String> = causes
                        .iter()
                        .map(|c| match graph.nodes().find(|(id, _)| *id == c) {
                            Some((_, node)) if !node.label.is_empty() => {
                                format!("{} ({})", c, node.label)
                            }
                            _ => c.to_string(),
                        })
                        .collect();
                    out.push_str(&parts.join("; "));
                }
                _ => out.push_str(" — no recorded causes"),
            }
            out.push('\n');
        }
    }
    out.push('\n');

    out.push_str("## Cross-level table\n\n");
    let macro_events: Vec<&Ident> = graph
        .nodes()
        .filter(|(_, n)| n.tier == Tier::Macro)
        .map(|(id, _)| id)
        .collect();
    if macro_events.is_empty() {
        out.push_str("none recorded\n");
    } else {
        out.push_str("| Macro event | Meso events | Micro events |\n");
        out.push_str("| --- | --- | --- |\n");
        for id in macro_events {
            let map = graph
                .cross_level_map(id.as_str())
                .expect("macro-tier node accepts cross_level_map");
            let join = |set: &BTreeSet<Ident>| -> String {
                if set.is_empty() {
                    "—".to_string()
                } else {
                    set.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(", ")
                }
            };
            let _ = writeln!(out, "| {} | {} | {} |", id, join(&map.meso), join(&map.micro));
        }
    }
    out.push('\n');

    out.push_str("## Recommendations\n");
    for category in crate::model::RecommendationCategory::ALL {
        let _ = write!(out, "\n### {}\n\n", category.heading());
        let items: Vec<_> = model
            .recommendations()
            .iter()
            .filter(|r| r.category == category)
            .collect();
        if items.is_empty() {
            out.push_str("none recorded\n");
            continue;
        }
        for item in items {
            let attribution = match model.resolve(item.for_controller.as_str()) {
                Some(Element::Controller(c)) if !c.label.is_empty() => c.label.clone(),
                _ => item.for_controller.to_string(),
            };
            let _ = writeln!(out, "- {} *({})*", item.text, attribution);
        }
    }

    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;
    use crate::flowgraph::build_flow_graph;

    fn model_of(src: &str) -> Model {
        parse(src).0.unwrap()
    }

    #[test]
    fn empty_graph_has_header_clusters_and_brace() {
        let m = model_of("system s {}");
        let g = build_flow_graph(&m).unwrap();
        let dot = emit_dot_flow(&g, &EmitOptions::default());
        assert!(dot.starts_with("digraph flow {\n"));
        for cluster in ["cluster_macro", "cluster_meso", "cluster_micro", "cluster_risk"] {
            assert!(dot.contains(cluster), "missing {cluster}");
        }
        assert!(dot.ends_with("}\n"));
    }

    #[test]
    fn flow_edges_and_mangling() {
        let m = model_of(
            r#"system s {
  hazard H
  constraint SC1.1 kind subsystem level micro on H "a"
  event E1.1 violates SC1.1 "a"
  risk R1 kind near_miss on H
  causes R1 <- all(E1.1)
  controller w level micro domain social
  loop L1 { controller w; controls H; enforces SC1.1; }
}"#,
        );
        let g = build_flow_graph(&m).unwrap();
        let dot = emit_dot_flow(&g, &EmitOptions::default());
        assert!(dot.contains("E1_1 -> R1;"));
        assert!(dot.contains("label=\"E1.1: a\""));
    }

    #[test]
    fn tier_filter_drops_nodes_and_crossing_edges() {
        let m = model_of(
            r#"system s {
  hazard H
  constraint SC1 kind control level micro on H "micro"
  constraint SC2 kind control level meso on H "meso"
  event E1 violates SC1
  event E2 violates SC2
  causes E1 <- any(E2)
}"#,
        );
        let g = build_flow_graph(&m).unwrap();
        let dot = emit_dot_flow(
            &g,
            &EmitOptions::default().with_tiers([Tier::Micro, Tier::Risk]),
        );
        assert!(!dot.contains("E2"));
        assert!(!dot.contains("->"));
    }

    #[test]
    fn control_diagram_single_loop() {
        let m = model_of(
            r#"system s {
  hazard HS1
  controller w level micro domain social "worker"
  constraint SC1 kind subsystem level micro on HS1 "sealed"
  event E1 violates SC1
  loop L1 { controller w; controls HS1; enforces SC1; }
}"#,
        );
        let dot = emit_dot_control(&m);
        assert!(dot.contains("w -> HS1 [label=\"L1\"];"));
        let again = emit_dot_control(&m);
        assert_eq!(dot, again);
    }

    #[test]
    fn json_is_valid_and_lossless_on_relations() {
        let m = model_of(
            r#"system s {
  hazard H
  constraint SC1 kind subsystem level micro on H "a"
  event E1.12 violates SC1
  risk R1 kind near_miss on H
  causes R1 <- all(E1.12)
  controller w level micro domain social
  loop L1 { controller w; controls H; enforces SC1; }
}"#,
        );
        let text = emit_json(&m, &[], &AnalysisResults::default());
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["events"][0]["id"], "E1.12");
        assert_eq!(value["events"][0]["violates"], "SC1");
        assert_eq!(value["causes"][0]["target"], "R1");
        assert_eq!(value["causes"][0]["sources"][0], "E1.12");
        assert_eq!(value["name"], "s");
    }

    #[test]
    fn json_empty_model_has_name_and_empty_arrays() {
        let m = model_of("system empty {}");
        let text = emit_json(&m, &[], &AnalysisResults::default());
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["name"], "empty");
        for key in [
            "entities", "interactions", "risks", "constraints", "events", "causes",
            "controllers", "loops", "recommendations", "diagnostics",
        ] {
            assert_eq!(value[key].as_array().map(|a| a.len()), Some(0), "{key}");
        }
        assert!(value["analyses"].is_object());
    }

    #[test]
    fn json_state_echoes_severity_name() {
        let m = model_of(
            r#"system s {
  hazard H
  constraint SC1 kind subsystem level micro on H "a"
  event E1 violates SC1
  controller w level micro domain social
  loop L1 { controller w; controls H; enforces SC1; }
}"#,
        );
        let state = crate::flowgraph::classify_state(&m, ["SC1"]).unwrap();
        let text = emit_json(&m, &[], &AnalysisResults { state: Some(state) });
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["analyses"]["state"]["overall"], "Incident");
    }

    #[test]
    fn markdown_zero_recommendations_says_none_recorded() {
        let m = model_of("system s {}");
        let g = build_flow_graph(&m).unwrap();
        let md = emit_report_markdown(&m, &g);
        assert!(md.contains("## Recommendations"));
        assert!(md.contains("none recorded"));
        for heading in [
            "National laws, policies, regulations and standards",
            "Government and regulation bodies",
            "Companies",
            "Intermediary agencies",
            "Social organizations and media",
            "Technical aspects",
        ] {
            assert!(md.contains(heading), "missing {heading}");
        }
    }
}

//! Semantic validation passes over a parsed model.
//!
//! Each pass is a pure function from model to findings; [`validate`]
//! runs them all and orders the result by (pass, span). A model with
//! zero `Error` findings is "validated" and admissible to the flow
//! graph. Passes are independent: they tolerate defects that other
//! passes report (a dangling cause source is V101 here and simply
//! skipped by the tier and cycle passes).

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::diag::{codes, Diagnostic, Severity};
use crate::ident::Ident;
use crate::model::{ConstraintKind, Element, Model, Tier};

/// Outcome of running every pass: the ordered findings plus a per-pass
/// finding count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub diagnostics: Vec<Diagnostic>,
    pub pass_results: BTreeMap<&'static str, usize>,
}

impl ValidationReport {
    pub fn error_count(&self) -> usize {
        self.diagnostics.iter().filter(|d| d.severity == Severity::Error).count()
    }

    pub fn warning_count(&self) -> usize {
        self.diagnostics.iter().filter(|d| d.severity == Severity::Warning).count()
    }

    /// True when the model is admissible to analysis.
    pub fn is_validated(&self) -> bool {
        self.error_count() == 0
    }
}

/// The passes in report order.
pub const PASS_NAMES: [&str; 5] = [
    "references",
    "event_constraint_bijection",
    "tier_monotonicity",
    "acyclicity",
    "enforcement_coverage",
];

type Pass = fn(&Model) -> Vec<Diagnostic>;

/// Run every pass and order the findings by (pass, span, code).
pub fn validate(model: &Model) -> ValidationReport {
    let passes: [(&'static str, Pass); 5] = [
        (PASS_NAMES[0], check_references),
        (PASS_NAMES[1], check_event_constraint_bijection),
        (PASS_NAMES[2], check_tier_monotonicity),
        (PASS_NAMES[3], check_acyclicity),
        (PASS_NAMES[4], check_enforcement_coverage),
    ];
    let mut diagnostics = Vec::new();
    let mut pass_results = BTreeMap::new();
    for (name, pass) in passes {
        let mut found = pass(model);
        found.sort_by_key(|d| (d.span.start, d.span.end, d.code));
        pass_results.insert(name, found.len());
        diagnostics.extend(found);
    }
    ValidationReport { diagnostics, pass_results }
}

/// Findings point at the referenced id token itself when the model was
/// parsed, falling back to the owning declaration.
fn dangling(model: &Model, id: &Ident, owner: &str, role: &str) -> Diagnostic {
    Diagnostic::error(
        codes::V101,
        format!("{owner}: {role} `{id}` does not resolve"),
        model.ref_span(owner, id.as_str()),
    )
}

/// V101 for every dangling reference and V102 for every reference that
/// resolves to the wrong kind of element (wrong category, wrong role,
/// cyclic `part_of` chain, subject out of a loop's scope, out-of-range
/// tier or severity).
pub fn check_references(model: &Model) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mismatch = |owner: &str, msg: String| {
        Diagnostic::error(codes::V102, msg, model.span_of(owner))
    };

    for e in model.entities() {
        if let Some(parent) = &e.parent {
            match model.resolve(parent.as_str()) {
                None => out.push(dangling(model, parent, e.id.as_str(), "parent")),
                Some(Element::Entity(p)) => {
                    if p.role != e.role {
                        out.push(Diagnostic::error(
                            codes::V102,
                            format!("{}: parent `{parent}` has a different role", e.id),
                            model.ref_span(e.id.as_str(), parent.as_str()),
                        ));
                    }
                }
                Some(other) => out.push(Diagnostic::error(
                    codes::V102,
                    format!("{}: parent `{parent}` is {} not an entity", e.id, other.category()),
                    model.ref_span(e.id.as_str(), parent.as_str()),
                )),
            }
        }
    }
    // Cyclic part_of chains: every entity lying on a cycle sees itself
    // again within n parent steps and is reported.
    for e in model.entities() {
        let mut cur = e.id.as_str();
        let mut cyclic = false;
        for _ in 0..model.entities().len() {
            let Some(Element::Entity(ent)) = model.resolve(cur) else { break };
            let Some(parent) = &ent.parent else { break };
            if parent.as_str() == e.id.as_str() {
                cyclic = true;
                break;
            }
            cur = parent.as_str();
        }
        if cyclic {
            out.push(mismatch(e.id.as_str(), format!("{}: part_of chain is cyclic", e.id)));
        }
    }

    for x in model.interactions() {
        let mut distinct = HashSet::new();
        for p in &x.participants {
            match model.resolve(p.as_str()) {
                None => out.push(dangling(model, p, x.id.as_str(), "participant")),
                Some(Element::Entity(_)) => {}
                Some(other) => out.push(Diagnostic::error(
                    codes::V102,
                    format!("{}: participant `{p}` is {} not an entity", x.id, other.category()),
                    model.ref_span(x.id.as_str(), p.as_str()),
                )),
            }
            if !distinct.insert(p.as_str()) {
                out.push(Diagnostic::error(
                    codes::V102,
                    format!("{}: participant `{p}` listed more than once", x.id),
                    model.ref_span(x.id.as_str(), p.as_str()),
                ));
            }
        }
    }

    for c in model.constraints() {
        if c.tier == Tier::Risk {
            out.push(mismatch(c.id.as_str(), format!("{}: constraint tier cannot be risk", c.id)));
        }
        match model.resolve(c.subject.as_str()) {
            None => out.push(dangling(model, &c.subject, c.id.as_str(), "subject")),
            Some(Element::Entity(_)) => {
                if c.kind == ConstraintKind::Interaction {
                    out.push(mismatch(
                        c.id.as_str(),
                        format!("{}: interaction constraint needs an interaction subject", c.id),
                    ));
                }
            }
            Some(Element::Interaction(_)) => {
                if c.kind == ConstraintKind::Subsystem {
                    out.push(mismatch(
                        c.id.as_str(),
                        format!("{}: subsystem constraint needs an entity subject", c.id),
                    ));
                }
            }
            Some(other) => out.push(mismatch(
                c.id.as_str(),
                format!("{}: subject `{}` is {} not an entity or interaction", c.id, c.subject, other.category()),
            )),
        }
    }

    for e in model.events() {
        match model.resolve(e.violates.as_str()) {
            None => out.push(dangling(model, &e.violates, e.id.as_str(), "violated constraint")),
            Some(Element::Constraint(_)) => {}
            Some(other) => out.push(Diagnostic::error(
                codes::V102,
                format!("{}: violates `{}` which is {} not a constraint", e.id, e.violates, other.category()),
                model.ref_span(e.id.as_str(), e.violates.as_str()),
            )),
        }
    }

    for r in model.risks() {
        if r.severity == crate::model::Severity::Safe {
            out.push(mismatch(r.id.as_str(), format!("{}: a risk cannot be Safe", r.id)));
        }
        match model.resolve(r.subject.as_str()) {
            None => out.push(dangling(model, &r.subject, r.id.as_str(), "subject")),
            Some(Element::Entity(_)) | Some(Element::Interaction(_)) => {}
            Some(other) => out.push(mismatch(
                r.id.as_str(),
                format!("{}: subject `{}` is {} not an entity or interaction", r.id, r.subject, other.category()),
            )),
        }
    }

    for c in model.causes() {
        let check_node = |id: &Ident, role: &str, span, out: &mut Vec<Diagnostic>| {
            match model.resolve(id.as_str()) {
                None => out.push(Diagnostic::error(
                    codes::V101,
                    format!("causes {}: {role} `{id}` does not resolve", c.target),
                    span,
                )),
                Some(Element::Event(_)) | Some(Element::Risk(_)) => {}
                Some(other) => out.push(Diagnostic::error(
                    codes::V102,
                    format!(
                        "causes {}: {role} `{id}` is {} not an event or risk",
                        c.target,
                        other.category()
                    ),
                    span,
                )),
            }
        };
        check_node(&c.target, "target", model.cause_span_of(c.target.as_str()), &mut out);
        let mut distinct = HashSet::new();
        for s in &c.sources {
            let span = model.ref_span(c.target.as_str(), s.as_str());
            check_node(s, "source", span, &mut out);
            if !distinct.insert(s.as_str()) {
                out.push(Diagnostic::error(
                    codes::V102,
                    format!("causes {}: source `{s}` listed more than once", c.target),
                    span,
                ));
            }
        }
    }

    for c in model.controllers() {
        if c.tier == Tier::Risk {
            out.push(mismatch(c.id.as_str(), format!("{}: controller tier cannot be risk", c.id)));
        }
    }

    for l in model.loops() {
        match model.resolve(l.controller.as_str()) {
            None => out.push(dangling(model, &l.controller, l.id.as_str(), "controller")),
            Some(Element::Controller(_)) => {}
            Some(other) => out.push(Diagnostic::error(
                codes::V102,
                format!("{}: controller `{}` is {} not a controller", l.id, l.controller, other.category()),
                model.ref_span(l.id.as_str(), l.controller.as_str()),
            )),
        }
        let controls_ok = match model.resolve(l.controls.as_str()) {
            None => {
                out.push(dangling(model, &l.controls, l.id.as_str(), "controlled subject"));
                false
            }
            Some(Element::Entity(_)) | Some(Element::Interaction(_)) => true,
            Some(other) => {
                out.push(Diagnostic::error(
                    codes::V102,
                    format!("{}: controls `{}` which is {} not an entity or interaction", l.id, l.controls, other.category()),
                    model.ref_span(l.id.as_str(), l.controls.as_str()),
                ));
                false
            }
        };
        for sc in &l.enforces {
            match model.resolve(sc.as_str()) {
                None => out.push(dangling(model, sc, l.id.as_str(), "enforced constraint")),
                Some(Element::Constraint(c)) => {
                    if controls_ok && !model.subject_within(c.subject.as_str(), l.controls.as_str()) {
                        out.push(Diagnostic::error(
                            codes::V102,
                            format!(
                                "{}: subject mismatch: enforced constraint `{}` is on `{}` which is outside the controlled subject `{}`",
                                l.id, sc, c.subject, l.controls
                            ),
                            model.ref_span(l.id.as_str(), sc.as_str()),
                        ));
                    }
                }
                Some(other) => out.push(Diagnostic::error(
                    codes::V102,
                    format!("{}: enforces `{sc}` which is {} not a constraint", l.id, other.category()),
                    model.ref_span(l.id.as_str(), sc.as_str()),
                )),
            }
        }
    }

    for (i, r) in model.recommendations().iter().enumerate() {
        match model.resolve(r.for_controller.as_str()) {
            None => out.push(Diagnostic::error(
                codes::V101,
                format!("recommendation: controller `{}` does not resolve", r.for_controller),
                model.recommendation_span(i),
            )),
            Some(Element::Controller(_)) => {}
            Some(other) => out.push(Diagnostic::error(
                codes::V102,
                format!(
                    "recommendation: `{}` is {} not a controller",
                    r.for_controller,
                    other.category()
                ),
                model.recommendation_span(i),
            )),
        }
    }

    out
}

/// V110 when two events violate the same constraint; V111 (warning) for
/// a constraint no event violates — a satisfied constraint is the normal
/// safe case, but it is surfaced.
pub fn check_event_constraint_bijection(model: &Model) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut by_constraint: HashMap<&str, Vec<&Ident>> = HashMap::new();
    for e in model.events() {
        by_constraint.entry(e.violates.as_str()).or_default().push(&e.id);
    }
    for e in model.events() {
        let owners = &by_constraint[e.violates.as_str()];
        if owners.len() > 1 && owners[0] != &e.id {
            out.push(Diagnostic::error(
                codes::V110,
                format!(
                    "event `{}` violates `{}` which is already violated by `{}`",
                    e.id, e.violates, owners[0]
                ),
                model.ref_span(e.id.as_str(), e.violates.as_str()),
            ));
        }
    }
    for c in model.constraints() {
        if !by_constraint.contains_key(c.id.as_str()) {
            out.push(Diagnostic::warning(
                codes::V111,
                format!("constraint `{}` has no corresponding adverse event", c.id),
                model.span_of(c.id.as_str()),
            ));
        }
    }
    out
}

/// V120 for every cause edge that flows upward (tier(source) <
/// tier(target)). Edges with unresolvable endpoints are left to the
/// reference pass.
pub fn check_tier_monotonicity(model: &Model) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for c in model.causes() {
        let Ok(target_tier) = model.node_tier(c.target.as_str()) else { continue };
        for s in &c.sources {
            let Ok(source_tier) = model.node_tier(s.as_str()) else { continue };
            if source_tier < target_tier {
                out.push(Diagnostic::error(
                    codes::V120,
                    format!(
                        "upward cause edge: `{s}` ({source_tier}) cannot cause `{}` ({target_tier})",
                        c.target
                    ),
                    model.ref_span(c.target.as_str(), s.as_str()),
                ));
            }
        }
    }
    out
}

/// V130 with one representative cycle when the cause relation is not a
/// DAG. Nodes are explored in id order, so the reported cycle is
/// deterministic.
pub fn check_acyclicity(model: &Model) -> Vec<Diagnostic> {
    // Adjacency source -> targets, restricted to resolvable nodes.
    let mut adj: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for c in model.causes() {
        if model.node_tier(c.target.as_str()).is_err() {
            continue;
        }
        for s in &c.sources {
            if model.node_tier(s.as_str()).is_ok() {
                adj.entry(s.as_str()).or_default().insert(c.target.as_str());
            }
        }
    }

    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        White,
        Gray,
        Black,
    }
    let mut marks: HashMap<&str, Mark> = adj.keys().map(|&k| (k, Mark::White)).collect();
    for targets in adj.values() {
        for &t in targets {
            marks.entry(t).or_insert(Mark::White);
        }
    }

    // Iterative DFS carrying the current path for cycle reconstruction.
    let roots: Vec<&str> = {
        let mut ks: Vec<&str> = marks.keys().copied().collect();
        ks.sort_by(|a, b| crate::ident::natural_cmp(a, b));
        ks
    };
    for root in roots {
        if marks[root] != Mark::White {
            continue;
        }
        let mut path: Vec<&str> = Vec::new();
        let mut stack: Vec<(&str, bool)> = vec![(root, false)];
        while let Some((node, leaving)) = stack.pop() {
            if leaving {
                marks.insert(node, Mark::Black);
                path.pop();
                continue;
            }
            if marks[node] == Mark::Black {
                continue;
            }
            if marks[node] == Mark::Gray {
                continue;
            }
            marks.insert(node, Mark::Gray);
            path.push(node);
            stack.push((node, true));
            if let Some(next) = adj.get(node) {
                for &t in next.iter().rev() {
                    match marks.get(&t).copied().unwrap_or(Mark::White) {
                        Mark::Gray => {
                            // Back edge: the cycle is the path suffix from t.
                            let start = path.iter().position(|&p| p == t).unwrap_or(0);
                            let mut cycle: Vec<&str> = path[start..].to_vec();
                            cycle.push(t);
                            return vec![Diagnostic::error(
                                codes::V130,
                                format!("the cause relation has a cycle: {}", cycle.join(" -> ")),
                                model.cause_span_of(t),
                            )];
                        }
                        Mark::White => stack.push((t, false)),
                        Mark::Black => {}
                    }
                }
            }
        }
    }
    Vec::new()
}

/// V140 (warning) for every subsystem or interaction constraint no loop
/// enforces, and V141 (warning) for every risk with no cause
/// declaration.
pub fn check_enforcement_coverage(model: &Model) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let enforced: HashSet<&str> = model
        .loops()
        .iter()
        .flat_map(|l| l.enforces.iter().map(|s| s.as_str()))
        .collect();
    for c in model.constraints() {
        if matches!(c.kind, ConstraintKind::Subsystem | ConstraintKind::Interaction)
            && !enforced.contains(c.id.as_str())
        {
            out.push(Diagnostic::warning(
                codes::V140,
                format!("{} constraint `{}` is enforced by no control loop", c.kind.name(), c.id),
                model.span_of(c.id.as_str()),
            ));
        }
    }
    for r in model.risks() {
        if model.cause_of(r.id.as_str()).is_none() {
            out.push(Diagnostic::warning(
                codes::V141,
                format!("risk `{}` has no cause declaration", r.id),
                model.span_of(r.id.as_str()),
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    fn model_of(src: &str) -> Model {
        let (model, diags) = parse(src);
        assert!(diags.iter().all(|d| d.severity != Severity::Error), "{diags:?}");
        model.unwrap()
    }

    fn codes_of(diags: &[Diagnostic]) -> Vec<&'static str> {
        diags.iter().map(|d| d.code).collect()
    }

    #[test]
    fn dangling_violates_is_v101() {
        let m = model_of("system s { event E9.9 violates SC_MISSING }");
        let diags = check_references(&m);
        assert_eq!(codes_of(&diags), vec!["V101"]);
    }

    #[test]
    fn loop_subject_mismatch_is_v102() {
        let m = model_of(
            r#"system s {
  hazard HS1
  target TS1
  controller w level micro domain social
  constraint SC1.5 kind control level micro on HS1 "cooling"
  event E1.5 violates SC1.5
  loop L1 { controller w; controls TS1; enforces SC1.5; }
}"#,
        );
        let diags = check_references(&m);
        assert_eq!(codes_of(&diags), vec!["V102"]);
    }

    #[test]
    fn loop_may_enforce_descendant_subject() {
        let m = model_of(
            r#"system s {
  hazard HS
  hazard HS1 part_of HS
  controller w level micro domain social
  constraint SC1 kind subsystem level micro on HS1 "sealed"
  event E1 violates SC1
  loop L1 { controller w; controls HS; enforces SC1; }
}"#,
        );
        assert!(check_references(&m).is_empty());
    }

    #[test]
    fn interaction_constraint_scope_covers_participants() {
        let m = model_of(
            r#"system s {
  hazard HS
  hazard HS1 part_of HS
  hazard HS2 part_of HS
  interaction IX between HS1, HS2
  controller w level micro domain social
  constraint SC9 kind interaction level micro on IX "distance"
  event E9 violates SC9
  loop L1 { controller w; controls HS; enforces SC9; }
}"#,
        );
        assert!(check_references(&m).is_empty());
    }

    #[test]
    fn two_events_on_one_constraint_is_v110() {
        let m = model_of(
            r#"system s {
  hazard H
  constraint SC1 kind control level micro on H "c"
  event E1 violates SC1
  event E2 violates SC1
}"#,
        );
        let diags = check_event_constraint_bijection(&m);
        assert_eq!(codes_of(&diags), vec!["V110"]);
    }

    #[test]
    fn satisfied_constraint_is_v111_warning() {
        let m = model_of(
            r#"system s {
  hazard H
  constraint SC1 kind control level micro on H "c"
}"#,
        );
        let diags = check_event_constraint_bijection(&m);
        assert_eq!(codes_of(&diags), vec!["V111"]);
        assert_eq!(diags[0].severity, Severity::Warning);
    }

    #[test]
    fn upward_edge_is_v120_and_downward_is_not() {
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
        assert!(check_tier_monotonicity(&m).is_empty());

        let m = model_of(
            r#"system s {
  hazard H
  constraint SC1 kind control level micro on H "micro"
  constraint SC2 kind control level meso on H "meso"
  event E1 violates SC1
  event E2 violates SC2
  causes E2 <- any(E1)
}"#,
        );
        let diags = check_tier_monotonicity(&m);
        assert_eq!(codes_of(&diags), vec!["V120"]);
    }

    #[test]
    fn risk_chain_edges_are_legal() {
        let m = model_of(
            r#"system s {
  hazard H
  risk R1 kind near_miss on H
  risk R2 kind incident on H
  causes R2 <- any(R1)
}"#,
        );
        assert!(check_tier_monotonicity(&m).is_empty());
    }

    #[test]
    fn two_cycle_and_self_cycle_are_v130() {
        let m = model_of(
            r#"system s {
  hazard H
  constraint SCA kind control level micro on H "a"
  constraint SCB kind control level micro on H "b"
  event A violates SCA
  event B violates SCB
  causes A <- any(B)
  causes B <- any(A)
}"#,
        );
        let diags = check_acyclicity(&m);
        assert_eq!(codes_of(&diags), vec!["V130"]);
        assert!(diags[0].message.contains("A -> B -> A") || diags[0].message.contains("B -> A -> B"));

        let m = model_of(
            r#"system s {
  hazard H
  constraint SCA kind control level micro on H "a"
  event A violates SCA
  causes A <- any(A)
}"#,
        );
        assert_eq!(codes_of(&check_acyclicity(&m)), vec!["V130"]);
    }

    #[test]
    fn unenforced_subsystem_constraint_is_v140() {
        let m = model_of(
            r#"system s {
  hazard H
  constraint SC1 kind subsystem level micro on H "sealed"
  event E1 violates SC1
}"#,
        );
        let diags = check_enforcement_coverage(&m);
        assert_eq!(codes_of(&diags), vec!["V140"]);
    }

    #[test]
    fn riskless_cause_is_v141() {
        let m = model_of(
            r#"system s {
  hazard H
  risk R1 kind near_miss on H
}"#,
        );
        let diags = check_enforcement_coverage(&m);
        assert_eq!(codes_of(&diags), vec!["V141"]);
    }

    #[test]
    fn empty_system_is_clean() {
        let m = model_of("system s {}");
        let report = validate(&m);
        assert_eq!(report.error_count(), 0);
        assert_eq!(report.warning_count(), 0);
    }

    #[test]
    fn pass_order_does_not_change_the_multiset() {
        let m = model_of(
            r#"system s {
  hazard H
  constraint SC1 kind subsystem level micro on H "a"
  event E1 violates SC1
  event E2 violates SC1
  risk R1 kind near_miss on H
}"#,
        );
        let mut forward: Vec<Diagnostic> = Vec::new();
        forward.extend(check_references(&m));
        forward.extend(check_event_constraint_bijection(&m));
        forward.extend(check_tier_monotonicity(&m));
        forward.extend(check_acyclicity(&m));
        forward.extend(check_enforcement_coverage(&m));
        let mut backward: Vec<Diagnostic> = Vec::new();
        backward.extend(check_enforcement_coverage(&m));
        backward.extend(check_acyclicity(&m));
        backward.extend(check_tier_monotonicity(&m));
        backward.extend(check_event_constraint_bijection(&m));
        backward.extend(check_references(&m));
        let key = |d: &Diagnostic| (d.code, d.span, d.message.clone());
        let mut a: Vec<_> = forward.iter().map(key).collect();
        let mut b: Vec<_> = backward.iter().map(key).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }
}

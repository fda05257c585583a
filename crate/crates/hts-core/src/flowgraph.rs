//! The event-flow graph and the analytical queries over it: direct and
//! transitive causes, root causes, simple-path enumeration, gated
//! propagation, cross-level maps, risk-state classification, and
//! event-to-control-structure tracing.
//!
//! A [`FlowGraph`] is built only from a validated model, so its cause
//! relation is a DAG and every edge runs from a tier greater than or
//! equal to its target's. The graph is immutable and all queries are
//! pure; results are canonically ordered.

use std::collections::{BTreeMap, BTreeSet};

use crate::ident::Ident;
use crate::model::{
    ConstraintKind, ControlLoop, Controller, Element, Gate, Model, SafetyConstraint, Severity,
    SystemRole, Tier,
};
use crate::validate::validate;

/// Default ceiling for simple-path enumeration.
pub const DEFAULT_PATH_CAP: usize = 10_000;

/// Analysis errors, with stable code prefixes suitable for CI logs.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FlowError {
    #[error("NOT_VALIDATED: the model has {0} validation error(s)")]
    NotValidated(usize),
    #[error("UNKNOWN_ID: no event-flow node named {0}")]
    UnknownId(String),
    #[error("NOT_MACRO: {0} is not a macro-tier event")]
    NotMacro(String),
    #[error("PATH_LIMIT: more than {0} simple paths; raise the cap to enumerate them")]
    PathLimit(usize),
    #[error("NOT_A_CONSTRAINT: {0} does not name a safety constraint")]
    NotAConstraint(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowNode {
    pub tier: Tier,
    pub label: String,
}

/// Level-stratified cause DAG over adverse events and risks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowGraph {
    nodes: BTreeMap<Ident, FlowNode>,
    gates: BTreeMap<Ident, Gate>,
    preds: BTreeMap<Ident, BTreeSet<Ident>>,
    succs: BTreeMap<Ident, BTreeSet<Ident>>,
}

/// Build the event-flow graph of a validated model. Refuses models with
/// validation errors.
pub fn build_flow_graph(model: &Model) -> Result<FlowGraph, FlowError> {
    let report = validate(model);
    if !report.is_validated() {
        return Err(FlowError::NotValidated(report.error_count()));
    }

    let mut nodes = BTreeMap::new();
    for e in model.events() {
        let tier = model.node_tier(e.id.as_str()).expect("validated event has a tier");
        nodes.insert(e.id.clone(), FlowNode { tier, label: e.text.clone() });
    }
    for r in model.risks() {
        nodes.insert(r.id.clone(), FlowNode { tier: Tier::Risk, label: r.text.clone() });
    }

    let mut gates = BTreeMap::new();
    let mut preds: BTreeMap<Ident, BTreeSet<Ident>> = BTreeMap::new();
    let mut succs: BTreeMap<Ident, BTreeSet<Ident>> = BTreeMap::new();
    for decl in model.causes() {
        gates.insert(decl.target.clone(), decl.gate);
        for s in &decl.sources {
            preds.entry(decl.target.clone()).or_default().insert(s.clone());
            succs.entry(s.clone()).or_default().insert(decl.target.clone());
        }
    }

    Ok(FlowGraph { nodes, gates, preds, succs })
}

impl FlowGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.preds.values().map(|s| s.len()).sum()
    }

    /// All nodes with their tiers and labels, in id order.
    pub fn nodes(&self) -> impl Iterator<Item = (&Ident, &FlowNode)> {
        self.nodes.iter()
    }

    /// All edges as (source, target), in (source, target) order.
    pub fn edges(&self) -> Vec<(&Ident, &Ident)> {
        let mut out: Vec<(&Ident, &Ident)> = Vec::new();
        for (source, targets) in &self.succs {
            for target in targets {
                out.push((source, target));
            }
        }
        out
    }

    pub fn contains(&self, id: &str) -> bool {
        self.nodes.contains_key(&Ident::new(id))
    }

    pub fn tier_of(&self, id: &str) -> Option<Tier> {
        self.nodes.get(&Ident::new(id)).map(|n| n.tier)
    }

    pub fn label_of(&self, id: &str) -> Option<&str> {
        self.nodes.get(&Ident::new(id)).map(|n| n.label.as_str())
    }

    pub fn gate_of(&self, id: &str) -> Option<Gate> {
        self.gates.get(&Ident::new(id)).copied()
    }

    fn require(&self, id: &str) -> Result<&Ident, FlowError> {
        self.nodes
            .get_key_value(&Ident::new(id))
            .map(|(k, _)| k)
            .ok_or_else(|| FlowError::UnknownId(id.to_string()))
    }

    /// The sources of the node's cause declaration; empty for source
    /// nodes.
    pub fn direct_causes(&self, id: &str) -> Result<BTreeSet<Ident>, FlowError> {
        let id = self.require(id)?;
        Ok(self.preds.get(id).cloned().unwrap_or_default())
    }

    /// Direct successors: the nodes this one contributes to.
    pub fn direct_effects(&self, id: &str) -> Result<BTreeSet<Ident>, FlowError> {
        let id = self.require(id)?;
        Ok(self.succs.get(id).cloned().unwrap_or_default())
    }

    /// Every node with a directed path to `id`, excluding `id` itself.
    pub fn contributors(&self, id: &str) -> Result<BTreeSet<Ident>, FlowError> {
        let start = self.require(id)?;
        let mut seen: BTreeSet<Ident> = BTreeSet::new();
        let mut stack: Vec<&Ident> = vec![start];
        while let Some(node) = stack.pop() {
            if let Some(preds) = self.preds.get(node) {
                for p in preds {
                    if seen.insert(p.clone()) {
                        stack.push(p);
                    }
                }
            }
        }
        seen.remove(start);
        Ok(seen)
    }

    /// Contributors with no causes of their own.
    pub fn root_causes(&self, id: &str) -> Result<BTreeSet<Ident>, FlowError> {
        let mut out = self.contributors(id)?;
        out.retain(|n| self.preds.get(n).is_none_or(|p| p.is_empty()));
        Ok(out)
    }

    /// All simple directed paths from `from` to `to`, in lexicographic
    /// order of their id sequences, capped at [`DEFAULT_PATH_CAP`].
    pub fn enumerate_paths(&self, from: &str, to: &str) -> Result<Vec<Vec<Ident>>, FlowError> {
        self.enumerate_paths_capped(from, to, DEFAULT_PATH_CAP)
    }

    /// As [`enumerate_paths`](Self::enumerate_paths) with an explicit cap.
    pub fn enumerate_paths_capped(
        &self,
        from: &str,
        to: &str,
        cap: usize,
    ) -> Result<Vec<Vec<Ident>>, FlowError> {
        let from = self.require(from)?.clone();
        let to = self.require(to)?.clone();
        let mut paths: Vec<Vec<Ident>> = Vec::new();
        let mut current: Vec<Ident> = vec![from.clone()];
        let mut on_path: BTreeSet<Ident> = BTreeSet::new();
        on_path.insert(from.clone());
        self.path_dfs(&from, &to, &mut current, &mut on_path, &mut paths, cap)?;
        Ok(paths)
    }

    fn path_dfs(
        &self,
        node: &Ident,
        to: &Ident,
        current: &mut Vec<Ident>,
        on_path: &mut BTreeSet<Ident>,
        paths: &mut Vec<Vec<Ident>>,
        cap: usize,
    ) -> Result<(), FlowError> {
        if node == to {
            if paths.len() >= cap {
                return Err(FlowError::PathLimit(cap));
            }
            paths.push(current.clone());
            // The graph is acyclic, so the zero-length path is the only
            // case where the target can still be extended; stop here.
            return Ok(());
        }
        if let Some(next) = self.succs.get(node) {
            for n in next {
                if on_path.contains(n) {
                    continue;
                }
                current.push(n.clone());
                on_path.insert(n.clone());
                self.path_dfs(n, to, current, on_path, paths, cap)?;
                current.pop();
                on_path.remove(n);
            }
        }
        Ok(())
    }

    /// Least fixed point of gated activation: a node is active when it
    /// is seeded, or when its gate fires over its direct causes (`all`
    /// needs every cause active, `any` at least one). Nodes without a
    /// cause declaration activate only by seeding.
    pub fn propagate<'a, I>(&self, seed: I) -> Result<BTreeSet<Ident>, FlowError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut active: BTreeSet<Ident> = BTreeSet::new();
        for id in seed {
            active.insert(self.require(id)?.clone());
        }
        loop {
            let mut changed = false;
            for (target, sources) in &self.preds {
                if active.contains(target) {
                    continue;
                }
                let fire = match self.gates.get(target).copied().unwrap_or(Gate::Any) {
                    Gate::All => sources.iter().all(|s| active.contains(s)),
                    Gate::Any => sources.iter().any(|s| active.contains(s)),
                };
                if fire {
                    active.insert(target.clone());
                    changed = true;
                }
            }
            if !changed {
                return Ok(active);
            }
        }
    }

    /// Source nodes: nodes with no cause declaration (or an empty one).
    pub fn source_nodes(&self) -> BTreeSet<Ident> {
        self.nodes
            .keys()
            .filter(|id| self.preds.get(*id).is_none_or(|p| p.is_empty()))
            .cloned()
            .collect()
    }

    /// Partition the direct successors of a macro-tier event by tier.
    pub fn cross_level_map(&self, macro_event: &str) -> Result<CrossLevelMap, FlowError> {
        let id = self.require(macro_event)?;
        if self.nodes[id].tier != Tier::Macro {
            return Err(FlowError::NotMacro(macro_event.to_string()));
        }
        let mut map = CrossLevelMap {
            macro_event: id.clone(),
            meso: BTreeSet::new(),
            micro: BTreeSet::new(),
        };
        if let Some(next) = self.succs.get(id) {
            for n in next {
                match self.nodes[n].tier {
                    Tier::Meso => {
                        map.meso.insert(n.clone());
                    }
                    Tier::Micro => {
                        map.micro.insert(n.clone());
                    }
                    // Same-tier and risk successors have no bucket in the
                    // two-level correspondence table.
                    Tier::Macro | Tier::Risk => {}
                }
            }
        }
        Ok(map)
    }

    /// Kahn-style topological order over the cause DAG, used by tests to
    /// cross-check the DFS-based acyclicity pass.
    pub fn topo_order(&self) -> Option<Vec<Ident>> {
        let mut indegree: BTreeMap<&Ident, usize> =
            self.nodes.keys().map(|k| (k, 0)).collect();
        for (target, sources) in &self.preds {
            *indegree.get_mut(target).expect("edge endpoints are nodes") += sources.len();
        }
        let mut ready: BTreeSet<&Ident> = indegree
            .iter()
            .filter(|(_, &d)| d == 0)
            .map(|(&k, _)| k)
            .collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(&node) = ready.iter().next() {
            ready.remove(node);
            order.push(node.clone());
            if let Some(next) = self.succs.get(node) {
                for n in next {
                    let d = indegree.get_mut(n).expect("edge endpoints are nodes");
                    *d -= 1;
                    if *d == 0 {
                        ready.insert(n);
                    }
                }
            }
        }
        (order.len() == self.nodes.len()).then_some(order)
    }
}

/// Macro event with its meso- and micro-level correspondents.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct CrossLevelMap {
    pub macro_event: Ident,
    pub meso: BTreeSet<Ident>,
    pub micro: BTreeSet<Ident>,
}

/// Risk state of the whole system and of each hazard entity for a given
/// set of violated constraints.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct SystemState {
    pub overall: Severity,
    pub per_hazard: BTreeMap<Ident, Severity>,
    pub violated: BTreeSet<Ident>,
}

/// Classify the risk state induced by a set of violated constraint ids.
///
/// Per hazard entity: `Safe` when none of its subsystem constraints are
/// violated, `NearMiss` when a proper nonempty subset is, `Incident`
/// when all are. An incident escalates to `Accident` when additionally
/// an interaction constraint is violated whose interaction couples the
/// hazard (or an enclosing hazard system) with a target entity, and to
/// `MajorAccident` when such a target lies outside the hazard's
/// `part_of` tree. The overall state is the maximum over hazards.
pub fn classify_state<'a, I>(model: &Model, violated: I) -> Result<SystemState, FlowError>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut violated_set: BTreeSet<Ident> = BTreeSet::new();
    for id in violated {
        match model.resolve(id) {
            None => return Err(FlowError::UnknownId(id.to_string())),
            Some(Element::Constraint(c)) => {
                violated_set.insert(c.id.clone());
            }
            Some(_) => return Err(FlowError::NotAConstraint(id.to_string())),
        }
    }

    let violated_interactions: Vec<&SafetyConstraint> = model
        .constraints()
        .iter()
        .filter(|c| c.kind == ConstraintKind::Interaction && violated_set.contains(&c.id))
        .collect();

    let mut per_hazard: BTreeMap<Ident, Severity> = BTreeMap::new();
    for h in model.entities().iter().filter(|e| e.role == SystemRole::Hazard) {
        let subsystem: BTreeSet<&Ident> = model
            .constraints()
            .iter()
            .filter(|c| c.kind == ConstraintKind::Subsystem && c.subject == h.id)
            .map(|c| &c.id)
            .collect();
        let broken: BTreeSet<&Ident> =
            subsystem.iter().copied().filter(|id| violated_set.contains(*id)).collect();

        let mut severity = if broken.is_empty() {
            Severity::Safe
        } else if broken.len() == subsystem.len() {
            Severity::Incident
        } else {
            Severity::NearMiss
        };

        if severity == Severity::Incident {
            for c in &violated_interactions {
                let Some(Element::Interaction(x)) = model.resolve(c.subject.as_str()) else {
                    continue;
                };
                let couples_hazard = x
                    .participants
                    .iter()
                    .any(|p| model.is_same_or_descendant(h.id.as_str(), p.as_str()));
                if !couples_hazard {
                    continue;
                }
                let targets: Vec<&Ident> = x
                    .participants
                    .iter()
                    .filter(|p| {
                        matches!(model.resolve(p.as_str()),
                                 Some(Element::Entity(e)) if e.role == SystemRole::Target)
                    })
                    .collect();
                if targets.is_empty() {
                    continue;
                }
                severity = severity.max(Severity::Accident);
                let hazard_root = part_of_root(model, h.id.as_str());
                if targets.iter().any(|t| part_of_root(model, t.as_str()) != hazard_root) {
                    severity = Severity::MajorAccident;
                }
            }
        }

        per_hazard.insert(h.id.clone(), severity);
    }

    let overall = per_hazard.values().copied().max().unwrap_or(Severity::Safe);
    Ok(SystemState { overall, per_hazard, violated: violated_set })
}

fn part_of_root<'m>(model: &'m Model, id: &'m str) -> &'m str {
    model.ancestors(id).last().map_or(id, |a| a.as_str())
}

/// One enforcing loop with its controller (absent when the controller
/// reference does not resolve).
#[derive(Debug, Clone, PartialEq)]
pub struct LoopTrace<'a> {
    pub control_loop: &'a ControlLoop,
    pub controller: Option<&'a Controller>,
}

/// The control-structure context of one adverse event.
#[derive(Debug, Clone, PartialEq)]
pub struct EventTrace<'a> {
    pub event_id: Ident,
    pub constraint: &'a SafetyConstraint,
    pub loops: Vec<LoopTrace<'a>>,
}

/// Trace an adverse event back to its violated constraint, every loop
/// enforcing that constraint, and each loop's controller.
pub fn trace_event<'a>(model: &'a Model, event_id: &str) -> Result<EventTrace<'a>, FlowError> {
    let Some(Element::Event(event)) = model.resolve(event_id) else {
        return Err(FlowError::UnknownId(event_id.to_string()));
    };
    let Some(Element::Constraint(constraint)) = model.resolve(event.violates.as_str()) else {
        return Err(FlowError::UnknownId(event.violates.to_string()));
    };
    let loops = model
        .loops()
        .iter()
        .filter(|l| l.enforces.contains(&constraint.id))
        .map(|l| LoopTrace {
            control_loop: l,
            controller: match model.resolve(l.controller.as_str()) {
                Some(Element::Controller(c)) => Some(c),
                _ => None,
            },
        })
        .collect();
    Ok(EventTrace { event_id: event.id.clone(), constraint, loops })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    fn model_of(src: &str) -> Model {
        let (model, diags) = parse(src);
        assert!(
            diags.iter().all(|d| d.severity != crate::diag::Severity::Error),
            "{diags:?}"
        );
        model.unwrap()
    }

    fn diamond() -> Model {
        model_of(
            r#"system s {
  hazard H
  constraint SCA kind control level micro on H "a"
  constraint SCB kind control level micro on H "b"
  constraint SCC kind control level micro on H "c"
  constraint SCD kind control level micro on H "d"
  event A violates SCA
  event B violates SCB
  event C violates SCC
  event D violates SCD
  causes B <- any(A)
  causes C <- any(A)
  causes D <- all(B, C)
}"#,
        )
    }

    #[test]
    fn unvalidated_model_is_refused() {
        let m = model_of("system s { event E violates NOPE }");
        assert_eq!(build_flow_graph(&m), Err(FlowError::NotValidated(1)));
    }

    #[test]
    fn model_without_cause_decls_has_all_nodes_and_no_edges() {
        let m = model_of(
            r#"system s {
  hazard H
  constraint SC1 kind control level micro on H "a"
  event E1 violates SC1
  risk R1 kind near_miss on H
  causes R1 <- any(E1)
}"#,
        );
        let g = build_flow_graph(&m).unwrap();
        assert_eq!(g.node_count(), 2);

        let m2 = model_of(
            r#"system s {
  hazard H
  constraint SC1 kind control level micro on H "a"
  event E1 violates SC1
}"#,
        );
        let g2 = build_flow_graph(&m2).unwrap();
        assert_eq!(g2.node_count(), 1);
        assert_eq!(g2.edge_count(), 0);
    }

    #[test]
    fn graph_shape_and_counts() {
        let g = build_flow_graph(&diamond()).unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.edge_count(), 4);
        assert_eq!(
            g.direct_causes("D").unwrap(),
            BTreeSet::from([Ident::new("B"), Ident::new("C")])
        );
        assert!(g.direct_causes("A").unwrap().is_empty());
        assert_eq!(g.direct_causes("X"), Err(FlowError::UnknownId("X".into())));
    }

    #[test]
    fn contributors_and_roots() {
        let g = build_flow_graph(&diamond()).unwrap();
        assert_eq!(
            g.contributors("D").unwrap(),
            BTreeSet::from([Ident::new("A"), Ident::new("B"), Ident::new("C")])
        );
        assert!(g.contributors("A").unwrap().is_empty());
        assert_eq!(g.root_causes("D").unwrap(), BTreeSet::from([Ident::new("A")]));
        assert!(g.root_causes("A").unwrap().is_empty());
    }

    #[test]
    fn paths_are_lexicographic_and_identity_path_exists() {
        let g = build_flow_graph(&diamond()).unwrap();
        let paths = g.enumerate_paths("A", "D").unwrap();
        assert_eq!(
            paths,
            vec![
                vec![Ident::new("A"), Ident::new("B"), Ident::new("D")],
                vec![Ident::new("A"), Ident::new("C"), Ident::new("D")],
            ]
        );
        assert_eq!(g.enumerate_paths("A", "A").unwrap(), vec![vec![Ident::new("A")]]);
        assert!(g.enumerate_paths("D", "A").unwrap().is_empty());
    }

    #[test]
    fn path_cap_is_enforced() {
        let g = build_flow_graph(&diamond()).unwrap();
        assert_eq!(g.enumerate_paths_capped("A", "D", 1), Err(FlowError::PathLimit(1)));
    }

    #[test]
    fn propagation_respects_gates() {
        let g = build_flow_graph(&diamond()).unwrap();
        assert!(g.propagate(std::iter::empty()).unwrap().is_empty());
        // Seeding B alone cannot fire the all-gate on D.
        let from_b = g.propagate(["B"]).unwrap();
        assert_eq!(from_b, BTreeSet::from([Ident::new("B")]));
        // Seeding A activates B and C by any-gates, then D by its all-gate.
        let from_a = g.propagate(["A"]).unwrap();
        assert_eq!(from_a.len(), 4);
    }

    #[test]
    fn classification_ladder() {
        let m = model_of(
            r#"system s {
  hazard HS
  hazard HS1 part_of HS
  target TS
  target TS1 part_of TS
  interaction IX between HS, TS1
  constraint SC1 kind subsystem level micro on HS1 "a"
  constraint SC2 kind subsystem level micro on HS1 "b"
  constraint SC3 kind interaction level micro on IX "distance"
  event E1 violates SC1
  event E2 violates SC2
  event E3 violates SC3
}"#,
        );
        assert_eq!(classify_state(&m, []).unwrap().overall, Severity::Safe);
        let near = classify_state(&m, ["SC1"]).unwrap();
        assert_eq!(near.per_hazard[&Ident::new("HS1")], Severity::NearMiss);
        assert_eq!(near.overall, Severity::NearMiss);
        let incident = classify_state(&m, ["SC1", "SC2"]).unwrap();
        assert_eq!(incident.per_hazard[&Ident::new("HS1")], Severity::Incident);
        // The interaction couples HS (ancestor of HS1) with target TS1,
        // which lies outside the hazard tree.
        let major = classify_state(&m, ["SC1", "SC2", "SC3"]).unwrap();
        assert_eq!(major.per_hazard[&Ident::new("HS1")], Severity::MajorAccident);
        assert_eq!(major.overall, Severity::MajorAccident);
        // An interaction violation without full subsystem violation does
        // not escalate.
        let still_near = classify_state(&m, ["SC1", "SC3"]).unwrap();
        assert_eq!(still_near.per_hazard[&Ident::new("HS1")], Severity::NearMiss);
    }

    #[test]
    fn classify_rejects_bad_ids() {
        let m = diamond();
        assert_eq!(classify_state(&m, ["NOPE"]), Err(FlowError::UnknownId("NOPE".into())));
        assert_eq!(classify_state(&m, ["A"]), Err(FlowError::NotAConstraint("A".into())));
    }

    #[test]
    fn single_subsystem_constraint_jumps_to_incident() {
        let m = model_of(
            r#"system s {
  hazard H
  constraint SC1 kind subsystem level micro on H "only one"
  event E1 violates SC1
}"#,
        );
        assert_eq!(
            classify_state(&m, ["SC1"]).unwrap().per_hazard[&Ident::new("H")],
            Severity::Incident
        );
    }

    #[test]
    fn trace_event_returns_constraint_loops_and_controllers() {
        let m = model_of(
            r#"system s {
  hazard H
  controller w level micro domain social "workers"
  constraint SC1 kind subsystem level micro on H "sealed"
  event E1 violates SC1
  loop L1 { controller w; controls H; enforces SC1; }
}"#,
        );
        let trace = trace_event(&m, "E1").unwrap();
        assert_eq!(trace.constraint.id, Ident::new("SC1"));
        assert_eq!(trace.loops.len(), 1);
        let ctrl = trace.loops[0].controller.unwrap();
        assert_eq!(ctrl.tier, Tier::Micro);
        // An event whose constraint no loop enforces still traces.
        let m2 = model_of(
            r#"system s {
  hazard H
  constraint SC1 kind control level micro on H "sealed"
  event E1 violates SC1
}"#,
        );
        let trace2 = trace_event(&m2, "E1").unwrap();
        assert!(trace2.loops.is_empty());
    }

    #[test]
    fn topo_order_exists_for_dag() {
        let g = build_flow_graph(&diamond()).unwrap();
        let order = g.topo_order().unwrap();
        assert_eq!(order.len(), 4);
        let pos: BTreeMap<&Ident, usize> = order.iter().enumerate().map(|(i, n)| (n, i)).collect();
        for (s, t) in g.edges() {
            assert!(pos[s] < pos[t]);
        }
    }
}

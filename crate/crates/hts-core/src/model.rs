//! The immutable typed representation of a hazard-target system model:
//! entities, interactions, safety constraints, adverse events, risks,
//! cause declarations, controllers, control loops, and recommendations.
//!
//! A `Model` is constructed once (by the parser or programmatically via
//! [`ModelParts`]) and never mutated; every id is globally unique across
//! the id-bearing collections, and all collections are stored in the
//! canonical natural id order.

use std::collections::HashMap;
use std::fmt;

use crate::diag::SourceSpan;
use crate::ident::Ident;

/// Hierarchical level of constraints, events, and controllers. Risks sit
/// below all event tiers so one "non-increasing tier along a cause edge"
/// rule covers event-to-event, event-to-risk, and risk-to-risk edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Risk = 0,
    Micro = 1,
    Meso = 2,
    Macro = 3,
}

impl Tier {
    pub fn name(self) -> &'static str {
        match self {
            Tier::Risk => "risk",
            Tier::Micro => "micro",
            Tier::Meso => "meso",
            Tier::Macro => "macro",
        }
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Whether an entity is a source of potential harm or a thing to protect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemRole {
    Hazard,
    Target,
}

/// A hazard or target (sub)system. `parent` nests same-role entities
/// (`HS1 part_of HS`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entity {
    pub id: Ident,
    pub role: SystemRole,
    pub label: String,
    pub parent: Option<Ident>,
}

/// A named interaction among two or more entities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interaction {
    pub id: Ident,
    pub participants: Vec<Ident>,
    pub label: String,
}

/// Constraint taxonomy: subsystem and interaction constraints bound the
/// system itself; control constraints keep the control loops effective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintKind {
    Subsystem,
    Interaction,
    Control,
}

impl ConstraintKind {
    pub fn name(self) -> &'static str {
        match self {
            ConstraintKind::Subsystem => "subsystem",
            ConstraintKind::Interaction => "interaction",
            ConstraintKind::Control => "control",
        }
    }
}

/// A safety constraint on an entity or interaction at one tier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SafetyConstraint {
    pub id: Ident,
    pub kind: ConstraintKind,
    pub tier: Tier,
    pub subject: Ident,
    pub text: String,
}

/// The realized consequence of exactly one violated constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdverseEvent {
    pub id: Ident,
    pub violates: Ident,
    pub text: String,
}

/// The risk-state ladder, ordered from benign to catastrophic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub enum Severity {
    Safe = 0,
    NearMiss = 1,
    Incident = 2,
    Accident = 3,
    MajorAccident = 4,
}

impl Severity {
    /// Canonical display name, also used in analysis output.
    pub fn name(self) -> &'static str {
        match self {
            Severity::Safe => "Safe",
            Severity::NearMiss => "NearMiss",
            Severity::Incident => "Incident",
            Severity::Accident => "Accident",
            Severity::MajorAccident => "MajorAccident",
        }
    }

    /// The keyword spelling used in model source (`near_miss` etc.).
    /// `Safe` has no keyword: risks are never declared safe.
    pub fn keyword(self) -> &'static str {
        match self {
            Severity::Safe => "safe",
            Severity::NearMiss => "near_miss",
            Severity::Incident => "incident",
            Severity::Accident => "accident",
            Severity::MajorAccident => "major_accident",
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A risk (near miss, incident, accident, major accident) on an entity
/// or interaction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Risk {
    pub id: Ident,
    pub severity: Severity,
    pub subject: Ident,
    pub text: String,
}

/// Gate mode of a cause declaration: `All` fires when every source is
/// active, `Any` when at least one is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Gate {
    All,
    Any,
}

impl Gate {
    pub fn name(self) -> &'static str {
        match self {
            Gate::All => "all",
            Gate::Any => "any",
        }
    }
}

/// `causes TARGET <- gate(SOURCES)`: the target event/risk is caused by
/// the listed source events/risks. At most one declaration per target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CauseDecl {
    pub target: Ident,
    pub gate: Gate,
    pub sources: Vec<Ident>,
}

/// Social or technical side of the control structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ControllerDomain {
    Social,
    Technical,
}

impl ControllerDomain {
    pub fn name(self) -> &'static str {
        match self {
            ControllerDomain::Social => "social",
            ControllerDomain::Technical => "technical",
        }
    }
}

/// A controller at one tier of the safety control structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Controller {
    pub id: Ident,
    pub tier: Tier,
    pub domain: ControllerDomain,
    pub label: String,
}

/// A safety control loop: a controller enforcing constraints on a
/// controlled entity or interaction. Actuator and sensor are free-text
/// labels; analyses usually abstract them away.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControlLoop {
    pub id: Ident,
    pub controller: Ident,
    pub controls: Ident,
    pub actuator: Option<String>,
    pub sensor: Option<String>,
    pub enforces: Vec<Ident>,
}

/// The six recommendation categories, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub enum RecommendationCategory {
    Legislative,
    Government,
    Corporate,
    Intermediary,
    SocialMedia,
    Technical,
}

impl RecommendationCategory {
    pub const ALL: [RecommendationCategory; 6] = [
        RecommendationCategory::Legislative,
        RecommendationCategory::Government,
        RecommendationCategory::Corporate,
        RecommendationCategory::Intermediary,
        RecommendationCategory::SocialMedia,
        RecommendationCategory::Technical,
    ];

    /// The keyword spelling used in model source.
    pub fn keyword(self) -> &'static str {
        match self {
            RecommendationCategory::Legislative => "legislative",
            RecommendationCategory::Government => "government",
            RecommendationCategory::Corporate => "corporate",
            RecommendationCategory::Intermediary => "intermediary",
            RecommendationCategory::SocialMedia => "social_media",
            RecommendationCategory::Technical => "technical",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|c| c.keyword() == word)
    }

    /// Report heading for the category.
    pub fn heading(self) -> &'static str {
        match self {
            RecommendationCategory::Legislative => "National laws, policies, regulations and standards",
            RecommendationCategory::Government => "Government and regulation bodies",
            RecommendationCategory::Corporate => "Companies",
            RecommendationCategory::Intermediary => "Intermediary agencies",
            RecommendationCategory::SocialMedia => "Social organizations and media",
            RecommendationCategory::Technical => "Technical aspects",
        }
    }
}

/// An improvement recommendation addressed to one controller.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recommendation {
    pub for_controller: Ident,
    pub category: RecommendationCategory,
    pub text: String,
}

/// A reference to the element owning an id, tagged with its category.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Element<'a> {
    Entity(&'a Entity),
    Interaction(&'a Interaction),
    Constraint(&'a SafetyConstraint),
    Event(&'a AdverseEvent),
    Risk(&'a Risk),
    Controller(&'a Controller),
    Loop(&'a ControlLoop),
}

impl Element<'_> {
    pub fn category(&self) -> &'static str {
        match self {
            Element::Entity(_) => "entity",
            Element::Interaction(_) => "interaction",
            Element::Constraint(_) => "constraint",
            Element::Event(_) => "event",
            Element::Risk(_) => "risk",
            Element::Controller(_) => "controller",
            Element::Loop(_) => "loop",
        }
    }

    pub fn id(&self) -> &Ident {
        match self {
            Element::Entity(e) => &e.id,
            Element::Interaction(i) => &i.id,
            Element::Constraint(c) => &c.id,
            Element::Event(e) => &e.id,
            Element::Risk(r) => &r.id,
            Element::Controller(c) => &c.id,
            Element::Loop(l) => &l.id,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Slot {
    Entity(usize),
    Interaction(usize),
    Constraint(usize),
    Event(usize),
    Risk(usize),
    Controller(usize),
    Loop(usize),
}

/// Errors raised by [`node_tier`](Model::node_tier).
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TierError {
    #[error("UNKNOWN_ID: no element named {0}")]
    UnknownId(String),
    #[error("NOT_A_NODE: {0} is neither an adverse event nor a risk")]
    NotANode(String),
}

/// Errors raised when assembling a `Model` from parts.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error("duplicate id {0}")]
    DuplicateId(String),
    #[error("duplicate cause declaration for {0}")]
    DuplicateCauseTarget(String),
    #[error("cause declaration for {0} has no sources")]
    EmptyCauseSources(String),
    #[error("interaction {0} has fewer than two participants")]
    TooFewParticipants(String),
}

/// Side table of source spans, keyed by element id (and cause target).
/// Programmatic models leave it empty; lookups fall back to a synthetic
/// span. Spans never participate in model equality.
#[derive(Debug, Clone, Default)]
pub struct SpanTable {
    pub elements: HashMap<String, SourceSpan>,
    pub causes: HashMap<String, SourceSpan>,
    /// Span of a referenced id inside its owning declaration, keyed by
    /// (owner id, referenced id).
    pub refs: HashMap<(String, String), SourceSpan>,
    pub recommendations: Vec<(usize, SourceSpan)>,
}

/// Loose bag of declarations from which a [`Model`] is assembled.
#[derive(Debug, Clone, Default)]
pub struct ModelParts {
    pub name: Ident,
    pub entities: Vec<Entity>,
    pub interactions: Vec<Interaction>,
    pub constraints: Vec<SafetyConstraint>,
    pub events: Vec<AdverseEvent>,
    pub risks: Vec<Risk>,
    pub causes: Vec<CauseDecl>,
    pub controllers: Vec<Controller>,
    pub loops: Vec<ControlLoop>,
    pub recommendations: Vec<Recommendation>,
    pub spans: SpanTable,
}

/// One complete hazard-target system model. Immutable after construction;
/// safe to share across threads for concurrent reads.
#[derive(Debug, Clone)]
pub struct Model {
    name: Ident,
    entities: Vec<Entity>,
    interactions: Vec<Interaction>,
    constraints: Vec<SafetyConstraint>,
    events: Vec<AdverseEvent>,
    risks: Vec<Risk>,
    causes: Vec<CauseDecl>,
    controllers: Vec<Controller>,
    loops: Vec<ControlLoop>,
    recommendations: Vec<Recommendation>,
    index: HashMap<String, Slot>,
    cause_index: HashMap<String, usize>,
    spans: SpanTable,
}

impl PartialEq for Model {
    /// Structural equality over the declared content; source spans are
    /// layout metadata and do not participate.
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.entities == other.entities
            && self.interactions == other.interactions
            && self.constraints == other.constraints
            && self.events == other.events
            && self.risks == other.risks
            && self.causes == other.causes
            && self.controllers == other.controllers
            && self.loops == other.loops
            && self.recommendations == other.recommendations
    }
}

impl Eq for Model {}

impl Model {
    /// Assemble a model, sorting every collection into canonical id order
    /// and checking global id uniqueness plus the structural minimums
    /// (nonempty cause sources, two or more interaction participants).
    /// Reference resolution is deliberately not checked here; that is the
    /// validator's job.
    pub fn new(mut parts: ModelParts) -> Result<Model, BuildError> {
        parts.entities.sort_by(|a, b| a.id.cmp(&b.id));
        parts.interactions.sort_by(|a, b| a.id.cmp(&b.id));
        parts.constraints.sort_by(|a, b| a.id.cmp(&b.id));
        parts.events.sort_by(|a, b| a.id.cmp(&b.id));
        parts.risks.sort_by(|a, b| a.id.cmp(&b.id));
        parts.causes.sort_by(|a, b| a.target.cmp(&b.target));
        parts.controllers.sort_by(|a, b| a.id.cmp(&b.id));
        parts.loops.sort_by(|a, b| a.id.cmp(&b.id));

        // Recommendations carry no id; canonical order is (category,
        // controller, text). Attached spans travel with their items.
        let mut recs: Vec<(Recommendation, Option<SourceSpan>)> = {
            let spans: HashMap<usize, SourceSpan> =
                parts.spans.recommendations.iter().copied().collect();
            parts
                .recommendations
                .into_iter()
                .enumerate()
                .map(|(i, r)| (r, spans.get(&i).copied()))
                .collect()
        };
        recs.sort_by(|(a, _), (b, _)| {
            (a.category, &a.for_controller, &a.text).cmp(&(b.category, &b.for_controller, &b.text))
        });
        let recommendations: Vec<Recommendation> = recs.iter().map(|(r, _)| r.clone()).collect();
        let rec_spans: Vec<(usize, SourceSpan)> = recs
            .iter()
            .enumerate()
            .filter_map(|(i, (_, s))| s.map(|s| (i, s)))
            .collect();

        let mut index = HashMap::new();
        let mut insert = |id: &Ident, slot: Slot| -> Result<(), BuildError> {
            if index.insert(id.to_string(), slot).is_some() {
                return Err(BuildError::DuplicateId(id.to_string()));
            }
            Ok(())
        };
        for (i, e) in parts.entities.iter().enumerate() {
            insert(&e.id, Slot::Entity(i))?;
        }
        for (i, x) in parts.interactions.iter().enumerate() {
            insert(&x.id, Slot::Interaction(i))?;
        }
        for (i, c) in parts.constraints.iter().enumerate() {
            insert(&c.id, Slot::Constraint(i))?;
        }
        for (i, e) in parts.events.iter().enumerate() {
            insert(&e.id, Slot::Event(i))?;
        }
        for (i, r) in parts.risks.iter().enumerate() {
            insert(&r.id, Slot::Risk(i))?;
        }
        for (i, c) in parts.controllers.iter().enumerate() {
            insert(&c.id, Slot::Controller(i))?;
        }
        for (i, l) in parts.loops.iter().enumerate() {
            insert(&l.id, Slot::Loop(i))?;
        }

        let mut cause_index = HashMap::new();
        for (i, c) in parts.causes.iter().enumerate() {
            if c.sources.is_empty() {
                return Err(BuildError::EmptyCauseSources(c.target.to_string()));
            }
            if cause_index.insert(c.target.to_string(), i).is_some() {
                return Err(BuildError::DuplicateCauseTarget(c.target.to_string()));
            }
        }
        for x in &parts.interactions {
            if x.participants.len() < 2 {
                return Err(BuildError::TooFewParticipants(x.id.to_string()));
            }
        }

        Ok(Model {
            name: parts.name,
            entities: parts.entities,
            interactions: parts.interactions,
            constraints: parts.constraints,
            events: parts.events,
            risks: parts.risks,
            causes: parts.causes,
            controllers: parts.controllers,
            loops: parts.loops,
            recommendations,
            index,
            cause_index,
            spans: SpanTable {
                elements: parts.spans.elements,
                causes: parts.spans.causes,
                refs: parts.spans.refs,
                recommendations: rec_spans,
            },
        })
    }

    pub fn name(&self) -> &Ident {
        &self.name
    }

    pub fn entities(&self) -> &[Entity] {
        &self.entities
    }

    pub fn interactions(&self) -> &[Interaction] {
        &self.interactions
    }

    pub fn constraints(&self) -> &[SafetyConstraint] {
        &self.constraints
    }

    pub fn events(&self) -> &[AdverseEvent] {
        &self.events
    }

    pub fn risks(&self) -> &[Risk] {
        &self.risks
    }

    pub fn causes(&self) -> &[CauseDecl] {
        &self.causes
    }

    pub fn controllers(&self) -> &[Controller] {
        &self.controllers
    }

    pub fn loops(&self) -> &[ControlLoop] {
        &self.loops
    }

    pub fn recommendations(&self) -> &[Recommendation] {
        &self.recommendations
    }

    /// Look up the unique element bearing `id`. Absence is a value, not
    /// an error.
    pub fn resolve(&self, id: &str) -> Option<Element<'_>> {
        self.index.get(id).map(|slot| match *slot {
            Slot::Entity(i) => Element::Entity(&self.entities[i]),
            Slot::Interaction(i) => Element::Interaction(&self.interactions[i]),
            Slot::Constraint(i) => Element::Constraint(&self.constraints[i]),
            Slot::Event(i) => Element::Event(&self.events[i]),
            Slot::Risk(i) => Element::Risk(&self.risks[i]),
            Slot::Controller(i) => Element::Controller(&self.controllers[i]),
            Slot::Loop(i) => Element::Loop(&self.loops[i]),
        })
    }

    /// The cause declaration whose target is `id`, if any.
    pub fn cause_of(&self, id: &str) -> Option<&CauseDecl> {
        self.cause_index.get(id).map(|&i| &self.causes[i])
    }

    /// Tier of an event-flow node: risks sit at [`Tier::Risk`]; an event
    /// inherits the tier of its violated constraint.
    pub fn node_tier(&self, id: &str) -> Result<Tier, TierError> {
        match self.resolve(id) {
            None => Err(TierError::UnknownId(id.to_string())),
            Some(Element::Risk(_)) => Ok(Tier::Risk),
            Some(Element::Event(e)) => match self.resolve(e.violates.as_str()) {
                Some(Element::Constraint(c)) => Ok(c.tier),
                Some(_) => Err(TierError::NotANode(e.violates.to_string())),
                None => Err(TierError::UnknownId(e.violates.to_string())),
            },
            Some(_) => Err(TierError::NotANode(id.to_string())),
        }
    }

    /// Walk the `part_of` chain upward from `id`, excluding `id` itself.
    /// Stops on a dangling or cyclic chain.
    pub fn ancestors(&self, id: &str) -> Vec<&Ident> {
        let mut out: Vec<&Ident> = Vec::new();
        let mut seen: Vec<&str> = vec![id];
        let mut cur = id;
        while let Some(Element::Entity(e)) = self.resolve(cur) {
            let Some(parent) = &e.parent else { break };
            if seen.contains(&parent.as_str()) {
                break;
            }
            out.push(parent);
            seen.push(parent.as_str());
            cur = parent.as_str();
        }
        out
    }

    /// True when entity `a` equals `b` or lies below it in the `part_of`
    /// hierarchy.
    pub fn is_same_or_descendant(&self, a: &str, b: &str) -> bool {
        a == b || self.ancestors(a).iter().any(|anc| anc.as_str() == b)
    }

    /// Scope check used by loop validation and classification: a subject
    /// (entity or interaction) `sub` is within the scope of a controlled
    /// subject `scope` when it is the same element, a descendant entity,
    /// or an interaction whose participants all lie within the scope.
    pub fn subject_within(&self, sub: &str, scope: &str) -> bool {
        if sub == scope {
            return true;
        }
        match self.resolve(sub) {
            Some(Element::Entity(_)) => self.is_same_or_descendant(sub, scope),
            Some(Element::Interaction(x)) => x
                .participants
                .iter()
                .all(|p| self.is_same_or_descendant(p.as_str(), scope)),
            _ => false,
        }
    }

    /// Source span of the element bearing `id`, when the model was parsed.
    pub fn span_of(&self, id: &str) -> SourceSpan {
        self.spans
            .elements
            .get(id)
            .copied()
            .unwrap_or_else(SourceSpan::synthetic)
    }

    /// Span of the `referenced` id token inside the declaration of
    /// `owner`; falls back to the owner's own span, then synthetic.
    pub fn ref_span(&self, owner: &str, referenced: &str) -> SourceSpan {
        self.spans
            .refs
            .get(&(owner.to_string(), referenced.to_string()))
            .copied()
            .or_else(|| self.spans.elements.get(owner).copied())
            .or_else(|| self.spans.causes.get(owner).copied())
            .unwrap_or_else(SourceSpan::synthetic)
    }

    /// Source span of the cause declaration targeting `id`.
    pub fn cause_span_of(&self, id: &str) -> SourceSpan {
        self.spans
            .causes
            .get(id)
            .copied()
            .unwrap_or_else(SourceSpan::synthetic)
    }

    /// Source span of the `i`-th recommendation (canonical order).
    pub fn recommendation_span(&self, i: usize) -> SourceSpan {
        self.spans
            .recommendations
            .iter()
            .find(|(j, _)| *j == i)
            .map(|(_, s)| *s)
            .unwrap_or_else(SourceSpan::synthetic)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Model {
        Model::new(ModelParts {
            name: Ident::new("tiny"),
            entities: vec![
                Entity {
                    id: "HS".into(),
                    role: SystemRole::Hazard,
                    label: "yard".into(),
                    parent: None,
                },
                Entity {
                    id: "HS1".into(),
                    role: SystemRole::Hazard,
                    label: "nitrocellulose containers".into(),
                    parent: Some("HS".into()),
                },
            ],
            constraints: vec![SafetyConstraint {
                id: "SC1.1".into(),
                kind: ConstraintKind::Subsystem,
                tier: Tier::Micro,
                subject: "HS1".into(),
                text: "damped with wetting agents".into(),
            }],
            events: vec![AdverseEvent {
                id: "E1.1".into(),
                violates: "SC1.1".into(),
                text: "loss of wetting agent".into(),
            }],
            risks: vec![Risk {
                id: "R1".into(),
                severity: Severity::NearMiss,
                subject: "HS1".into(),
                text: "spontaneous combustion".into(),
            }],
            ..Default::default()
        })
        .unwrap()
    }

    #[test]
    fn resolve_finds_each_category_and_absence_is_none() {
        let m = tiny();
        assert!(matches!(m.resolve("HS1"), Some(Element::Entity(e)) if e.role == SystemRole::Hazard));
        assert!(matches!(m.resolve("SC1.1"), Some(Element::Constraint(_))));
        assert!(m.resolve("ZZZ").is_none());
    }

    #[test]
    fn node_tier_risk_event_and_errors() {
        let m = tiny();
        assert_eq!(m.node_tier("R1"), Ok(Tier::Risk));
        assert_eq!(m.node_tier("E1.1"), Ok(Tier::Micro));
        assert_eq!(m.node_tier("nope"), Err(TierError::UnknownId("nope".into())));
        assert_eq!(m.node_tier("HS1"), Err(TierError::NotANode("HS1".into())));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let err = Model::new(ModelParts {
            entities: vec![
                Entity { id: "X".into(), role: SystemRole::Hazard, label: String::new(), parent: None },
                Entity { id: "X".into(), role: SystemRole::Target, label: String::new(), parent: None },
            ],
            ..Default::default()
        })
        .unwrap_err();
        assert_eq!(err, BuildError::DuplicateId("X".into()));
    }

    #[test]
    fn tier_order_matches_hierarchy() {
        assert!(Tier::Macro > Tier::Meso);
        assert!(Tier::Meso > Tier::Micro);
        assert!(Tier::Micro > Tier::Risk);
    }

    #[test]
    fn models_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<Model>();
        assert_send_sync::<crate::flowgraph::FlowGraph>();
    }

    #[test]
    fn ancestors_stop_on_cycles() {
        let m = Model::new(ModelParts {
            entities: vec![
                Entity { id: "A".into(), role: SystemRole::Hazard, label: String::new(), parent: Some("B".into()) },
                Entity { id: "B".into(), role: SystemRole::Hazard, label: String::new(), parent: Some("A".into()) },
            ],
            ..Default::default()
        })
        .unwrap();
        assert_eq!(m.ancestors("A"), vec![&Ident::new("B")]);
    }
}

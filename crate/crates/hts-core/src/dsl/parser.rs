//! Recursive-descent parser for `.hts` sources.
//!
//! The parser never aborts on the first problem: errors are reported as
//! coded diagnostics and parsing resumes at the next declaration
//! boundary, so one pass surfaces every independent mistake. A model is
//! produced only when no `Error`-severity diagnostic was emitted.

use std::collections::HashMap;

use crate::diag::{codes, Diagnostic, Severity as DiagSeverity, SourceSpan};
use crate::ident::Ident;
use crate::model::{
    AdverseEvent, CauseDecl, ConstraintKind, ControlLoop, Controller, ControllerDomain, Entity,
    Gate, Interaction, Model, ModelParts, Recommendation, RecommendationCategory, Risk, Severity,
    SystemRole, SafetyConstraint, Tier,
};

use super::lexer::{string_value, tokenize, Token, TokenKind};

/// Keywords that can open an item inside a `system` block; used as
/// recovery synchronization points.
const ITEM_KEYWORDS: &[&str] = &[
    "hazard", "target", "interaction", "risk", "constraint", "event", "causes", "controller",
    "loop", "recommend",
];

/// Parse a source text into a model.
///
/// Returns the model (present only when no error was diagnosed) and all
/// diagnostics in source order.
pub fn parse(source: &str) -> (Option<Model>, Vec<Diagnostic>) {
    let (tokens, lex_diags) = tokenize(source);
    let significant: Vec<Token<'_>> =
        tokens.into_iter().filter(|t| t.kind != TokenKind::Comment).collect();
    let mut parser = Parser {
        tokens: significant,
        pos: 0,
        diags: lex_diags,
        parts: ModelParts::default(),
        declared: HashMap::new(),
    };
    parser.parse_system();

    let mut diags = parser.diags;
    diags.sort_by_key(|d| (d.span.start, d.span.end, d.code));
    diags.dedup_by(|a, b| a.code == b.code && a.span == b.span);

    let has_error = diags.iter().any(|d| d.severity == DiagSeverity::Error);
    if has_error {
        return (None, diags);
    }
    match Model::new(parser.parts) {
        Ok(model) => (Some(model), diags),
        Err(err) => {
            // Unreachable for parsed input (duplicates are caught as
            // P003 and the grammar enforces the arity minimums), but a
            // build refusal must never panic the caller.
            diags.push(Diagnostic::error(codes::P003, err.to_string(), SourceSpan::synthetic()));
            (None, diags)
        }
    }
}

struct Parser<'a> {
    tokens: Vec<Token<'a>>,
    pos: usize,
    diags: Vec<Diagnostic>,
    parts: ModelParts,
    declared: HashMap<String, SourceSpan>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Token<'a> {
        self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn bump(&mut self) -> Token<'a> {
        let t = self.peek();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn at_eof(&self) -> bool {
        self.peek().kind == TokenKind::Eof
    }

    fn error(&mut self, code: &'static str, message: impl Into<String>, span: SourceSpan) {
        self.diags.push(Diagnostic::error(code, message, span));
    }

    fn unexpected(&mut self, expected: &str) {
        let t = self.peek();
        let found = match t.kind {
            TokenKind::Eof => "end of input".to_string(),
            _ => format!("`{}`", t.text),
        };
        self.error(codes::P001, format!("expected {expected}, found {found}"), t.span);
    }

    fn expect_keyword(&mut self, word: &str) -> Result<Token<'a>, ()> {
        let t = self.peek();
        if t.kind == TokenKind::Keyword && t.text == word {
            Ok(self.bump())
        } else {
            self.unexpected(&format!("`{word}`"));
            Err(())
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(Ident, SourceSpan), ()> {
        let t = self.peek();
        if t.kind == TokenKind::Ident {
            self.bump();
            Ok((Ident::new(t.text), t.span))
        } else {
            self.unexpected(what);
            Err(())
        }
    }

    fn expect_punct(&mut self, ch: &str) -> Result<Token<'a>, ()> {
        let t = self.peek();
        if t.kind == TokenKind::Punct && t.text == ch {
            Ok(self.bump())
        } else {
            self.unexpected(&format!("`{ch}`"));
            Err(())
        }
    }

    fn expect_string(&mut self, what: &str) -> Result<String, ()> {
        let t = self.peek();
        if t.kind == TokenKind::Str {
            self.bump();
            Ok(string_value(t.text))
        } else {
            self.unexpected(what);
            Err(())
        }
    }

    fn eat_string(&mut self) -> Option<String> {
        let t = self.peek();
        if t.kind == TokenKind::Str {
            self.bump();
            Some(string_value(t.text))
        } else {
            None
        }
    }

    fn eat_punct(&mut self, ch: &str) -> bool {
        let t = self.peek();
        if t.kind == TokenKind::Punct && t.text == ch {
            self.bump();
            true
        } else {
            false
        }
    }

    /// A word from a closed value set (`kind`, `level`, `domain`, gate).
    /// The word may lex as a keyword or a plain identifier. An unknown
    /// plain word is consumed and reported as P004; a grammar keyword in
    /// the wrong slot is left in place (it likely opens the next
    /// declaration) and reported as P001.
    fn expect_word(&mut self, allowed: &[&str], what: &str) -> Result<(&'a str, SourceSpan), ()> {
        let t = self.peek();
        match t.kind {
            TokenKind::Keyword | TokenKind::Ident if allowed.contains(&t.text) => {
                self.bump();
                Ok((t.text, t.span))
            }
            TokenKind::Ident => {
                let span = t.span;
                let text = t.text.to_string();
                self.bump();
                self.error(
                    codes::P004,
                    format!("unknown {what} `{text}`; expected one of {}", allowed.join(", ")),
                    span,
                );
                Err(())
            }
            _ => {
                self.unexpected(what);
                Err(())
            }
        }
    }

    /// Register a declared id, diagnosing re-declarations as P003.
    /// Returns false when the id was already taken.
    fn declare(&mut self, id: &Ident, span: SourceSpan) -> bool {
        if self.declared.contains_key(id.as_str()) {
            self.error(codes::P003, format!("duplicate declaration of `{id}`"), span);
            false
        } else {
            self.declared.insert(id.to_string(), span);
            self.parts.spans.elements.insert(id.to_string(), span);
            true
        }
    }

    /// Remember where a referenced id sits inside its declaration so
    /// validation findings can point at the reference itself.
    fn record_ref(&mut self, owner: &Ident, referenced: &Ident, span: SourceSpan) {
        self.parts
            .spans
            .refs
            .insert((owner.to_string(), referenced.to_string()), span);
    }

    /// Skip tokens until the next plausible declaration start. A `}` is
    /// left in place so the caller can close the enclosing block.
    fn synchronize(&mut self) {
        loop {
            let t = self.peek();
            match t.kind {
                TokenKind::Eof => return,
                TokenKind::Keyword if ITEM_KEYWORDS.contains(&t.text) => return,
                TokenKind::Punct if t.text == "}" => return,
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn parse_system(&mut self) {
        let t = self.peek();
        if !(t.kind == TokenKind::Keyword && t.text == "system") {
            if t.kind == TokenKind::Ident {
                self.error(codes::P004, format!("unknown keyword `{}`", t.text), t.span);
            } else {
                self.unexpected("`system`");
            }
            return;
        }
        self.bump();
        let Ok((name, _)) = self.expect_ident("a model name") else { return };
        self.parts.name = name;
        if self.expect_punct("{").is_err() {
            return;
        }

        loop {
            let t = self.peek();
            match t.kind {
                TokenKind::Punct if t.text == "}" => {
                    self.bump();
                    break;
                }
                TokenKind::Eof => {
                    self.unexpected("a declaration or `}`");
                    break;
                }
                TokenKind::Keyword if ITEM_KEYWORDS.contains(&t.text) => {
                    if self.parse_item(t.text).is_err() {
                        self.synchronize();
                    }
                }
                TokenKind::Ident => {
                    let span = t.span;
                    let text = t.text.to_string();
                    self.bump();
                    self.error(codes::P004, format!("unknown keyword `{text}`"), span);
                    self.synchronize();
                }
                _ => {
                    self.unexpected("a declaration or `}`");
                    self.bump();
                    self.synchronize();
                }
            }
        }

        if !self.at_eof() {
            self.unexpected("end of input");
        }
    }

    fn parse_item(&mut self, keyword: &str) -> Result<(), ()> {
        match keyword {
            "hazard" | "target" => self.parse_entity(),
            "interaction" => self.parse_interaction(),
            "risk" => self.parse_risk(),
            "constraint" => self.parse_constraint(),
            "event" => self.parse_event(),
            "causes" => self.parse_cause(),
            "controller" => self.parse_controller(),
            "loop" => self.parse_loop(),
            "recommend" => self.parse_recommend(),
            _ => unreachable!("dispatch covers ITEM_KEYWORDS"),
        }
    }

    fn parse_entity(&mut self) -> Result<(), ()> {
        let role = if self.peek().text == "hazard" { SystemRole::Hazard } else { SystemRole::Target };
        self.bump();
        let (id, span) = self.expect_ident("an entity id")?;
        let label = self.eat_string().unwrap_or_default();
        let parent = if self.peek().kind == TokenKind::Keyword && self.peek().text == "part_of" {
            self.bump();
            let (parent, parent_span) = self.expect_ident("a parent entity id")?;
            self.record_ref(&id, &parent, parent_span);
            Some(parent)
        } else {
            None
        };
        if self.declare(&id, span) {
            self.parts.entities.push(Entity { id, role, label, parent });
        }
        Ok(())
    }

    fn parse_interaction(&mut self) -> Result<(), ()> {
        self.bump();
        let (id, span) = self.expect_ident("an interaction id")?;
        self.expect_keyword("between")?;
        let mut participants = Vec::new();
        loop {
            let (p, p_span) = self.expect_ident("a participant id")?;
            self.record_ref(&id, &p, p_span);
            participants.push(p);
            if participants.len() < 2 {
                self.expect_punct(",")?;
            } else if !self.eat_punct(",") {
                break;
            }
        }
        let label = self.eat_string().unwrap_or_default();
        if self.declare(&id, span) {
            self.parts.interactions.push(Interaction { id, participants, label });
        }
        Ok(())
    }

    fn parse_risk(&mut self) -> Result<(), ()> {
        self.bump();
        let (id, span) = self.expect_ident("a risk id")?;
        self.expect_keyword("kind")?;
        let (word, _) = self.expect_word(
            &["near_miss", "incident", "accident", "major_accident"],
            "risk kind",
        )?;
        let severity = match word {
            "near_miss" => Severity::NearMiss,
            "incident" => Severity::Incident,
            "accident" => Severity::Accident,
            _ => Severity::MajorAccident,
        };
        self.expect_keyword("on")?;
        let (subject, subject_span) = self.expect_ident("a subject id")?;
        self.record_ref(&id, &subject, subject_span);
        let text = self.eat_string().unwrap_or_default();
        if self.declare(&id, span) {
            self.parts.risks.push(Risk { id, severity, subject, text });
        }
        Ok(())
    }

    fn parse_constraint(&mut self) -> Result<(), ()> {
        self.bump();
        let (id, span) = self.expect_ident("a constraint id")?;
        self.expect_keyword("kind")?;
        let (kind_word, _) =
            self.expect_word(&["subsystem", "interaction", "control"], "constraint kind")?;
        let kind = match kind_word {
            "subsystem" => ConstraintKind::Subsystem,
            "interaction" => ConstraintKind::Interaction,
            _ => ConstraintKind::Control,
        };
        self.expect_keyword("level")?;
        let (tier_word, _) = self.expect_word(&["micro", "meso", "macro"], "constraint level")?;
        let tier = match tier_word {
            "micro" => Tier::Micro,
            "meso" => Tier::Meso,
            _ => Tier::Macro,
        };
        self.expect_keyword("on")?;
        let (subject, subject_span) = self.expect_ident("a subject id")?;
        self.record_ref(&id, &subject, subject_span);
        let text = self.expect_string("the constraint text")?;
        if self.declare(&id, span) {
            self.parts.constraints.push(SafetyConstraint { id, kind, tier, subject, text });
        }
        Ok(())
    }

    fn parse_event(&mut self) -> Result<(), ()> {
        self.bump();
        let (id, span) = self.expect_ident("an event id")?;
        self.expect_keyword("violates")?;
        let (violates, violates_span) = self.expect_ident("a constraint id")?;
        self.record_ref(&id, &violates, violates_span);
        let text = self.eat_string().unwrap_or_default();
        if self.declare(&id, span) {
            self.parts.events.push(AdverseEvent { id, violates, text });
        }
        Ok(())
    }

    fn parse_cause(&mut self) -> Result<(), ()> {
        self.bump();
        let (target, span) = self.expect_ident("a target id")?;
        let t = self.peek();
        if t.kind != TokenKind::Arrow {
            self.unexpected("`<-`");
            return Err(());
        }
        self.bump();
        let (gate_word, _) = self.expect_word(&["all", "any"], "gate")?;
        let gate = if gate_word == "all" { Gate::All } else { Gate::Any };
        self.expect_punct("(")?;
        let mut sources = Vec::new();
        loop {
            let (s, s_span) = self.expect_ident("a source id")?;
            self.record_ref(&target, &s, s_span);
            sources.push(s);
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct(")")?;
        if self.parts.spans.causes.contains_key(target.as_str()) {
            self.error(
                codes::P003,
                format!("duplicate cause declaration for `{target}`"),
                span,
            );
        } else {
            self.parts.spans.causes.insert(target.to_string(), span);
            self.parts.causes.push(CauseDecl { target, gate, sources });
        }
        Ok(())
    }

    fn parse_controller(&mut self) -> Result<(), ()> {
        self.bump();
        let (id, span) = self.expect_ident("a controller id")?;
        self.expect_keyword("level")?;
        let (tier_word, _) = self.expect_word(&["micro", "meso", "macro"], "controller level")?;
        let tier = match tier_word {
            "micro" => Tier::Micro,
            "meso" => Tier::Meso,
            _ => Tier::Macro,
        };
        self.expect_keyword("domain")?;
        let (domain_word, _) = self.expect_word(&["social", "technical"], "controller domain")?;
        let domain = if domain_word == "social" {
            ControllerDomain::Social
        } else {
            ControllerDomain::Technical
        };
        let label = self.eat_string().unwrap_or_default();
        if self.declare(&id, span) {
            self.parts.controllers.push(Controller { id, tier, domain, label });
        }
        Ok(())
    }

    fn parse_loop(&mut self) -> Result<(), ()> {
        self.bump();
        let (id, span) = self.expect_ident("a loop id")?;
        self.expect_punct("{")?;
        self.expect_keyword("controller")?;
        let (controller, controller_span) = self.expect_ident("a controller id")?;
        self.record_ref(&id, &controller, controller_span);
        self.expect_punct(";")?;
        self.expect_keyword("controls")?;
        let (controls, controls_span) = self.expect_ident("a controlled subject id")?;
        self.record_ref(&id, &controls, controls_span);
        self.expect_punct(";")?;
        let mut actuator = None;
        if self.peek().kind == TokenKind::Keyword && self.peek().text == "actuator" {
            self.bump();
            actuator = Some(self.expect_string("the actuator label")?);
            self.expect_punct(";")?;
        }
        let mut sensor = None;
        if self.peek().kind == TokenKind::Keyword && self.peek().text == "sensor" {
            self.bump();
            sensor = Some(self.expect_string("the sensor label")?);
            self.expect_punct(";")?;
        }
        self.expect_keyword("enforces")?;
        let mut enforces = Vec::new();
        loop {
            let (sc, sc_span) = self.expect_ident("a constraint id")?;
            self.record_ref(&id, &sc, sc_span);
            enforces.push(sc);
            if !self.eat_punct(",") {
                break;
            }
        }
        self.eat_punct(";");
        self.expect_punct("}")?;
        if self.declare(&id, span) {
            self.parts.loops.push(ControlLoop { id, controller, controls, actuator, sensor, enforces });
        }
        Ok(())
    }

    fn parse_recommend(&mut self) -> Result<(), ()> {
        self.bump();
        self.expect_keyword("for")?;
        let (for_controller, span) = self.expect_ident("a controller id")?;
        self.expect_keyword("category")?;
        let categories: Vec<&str> =
            RecommendationCategory::ALL.iter().map(|c| c.keyword()).collect();
        let (word, _) = self.expect_word(&categories, "category")?;
        let category = RecommendationCategory::from_keyword(word).expect("word came from ALL");
        let text = self.expect_string("the recommendation text")?;
        let idx = self.parts.recommendations.len();
        self.parts.spans.recommendations.push((idx, span));
        self.parts.recommendations.push(Recommendation { for_controller, category, text });
        Ok(())
    }
}

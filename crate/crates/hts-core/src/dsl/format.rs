//! Canonical formatter for models.
//!
//! The canonical form is the normal form of the language: two-space
//! indent, one declaration per line, LF endings, trailing newline,
//! declaration groups in a fixed order (entities, interactions, risks,
//! constraints, events, causes, controllers, loops, recommendations),
//! each group sorted by id. Formatting a parsed model and re-parsing it
//! yields a structurally equal model, and formatting is byte-idempotent.

use std::fmt::Write;

use crate::model::{Model, Recommendation};

use super::lexer::string_literal;

/// Render a model in canonical `.hts` form.
pub fn format_canonical(model: &Model) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "system {} {{", model.name());

    for e in model.entities() {
        let role = match e.role {
            crate::model::SystemRole::Hazard => "hazard",
            crate::model::SystemRole::Target => "target",
        };
        let _ = write!(out, "  {role} {}", e.id);
        if !e.label.is_empty() {
            let _ = write!(out, " {}", string_literal(&e.label));
        }
        if let Some(parent) = &e.parent {
            let _ = write!(out, " part_of {parent}");
        }
        out.push('\n');
    }

    for x in model.interactions() {
        let _ = write!(out, "  interaction {} between ", x.id);
        for (i, p) in x.participants.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "{p}");
        }
        if !x.label.is_empty() {
            let _ = write!(out, " {}", string_literal(&x.label));
        }
        out.push('\n');
    }

    for r in model.risks() {
        let _ = write!(out, "  risk {} kind {} on {}", r.id, r.severity.keyword(), r.subject);
        if !r.text.is_empty() {
            let _ = write!(out, " {}", string_literal(&r.text));
        }
        out.push('\n');
    }

    for c in model.constraints() {
        let _ = writeln!(
            out,
            "  constraint {} kind {} level {} on {} {}",
            c.id,
            c.kind.name(),
            c.tier.name(),
            c.subject,
            string_literal(&c.text)
        );
    }

    for e in model.events() {
        let _ = write!(out, "  event {} violates {}", e.id, e.violates);
        if !e.text.is_empty() {
            let _ = write!(out, " {}", string_literal(&e.text));
        }
        out.push('\n');
    }

    for c in model.causes() {
        let _ = write!(out, "  causes {} <- {}(", c.target, c.gate.name());
        for (i, s) in c.sources.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "{s}");
        }
        out.push_str(")\n");
    }

    for c in model.controllers() {
        let _ = write!(
            out,
            "  controller {} level {} domain {}",
            c.id,
            c.tier.name(),
            c.domain.name()
        );
        if !c.label.is_empty() {
            let _ = write!(out, " {}", string_literal(&c.label));
        }
        out.push('\n');
    }

    for l in model.loops() {
        let _ = write!(out, "  loop {} {{ controller {}; controls {};", l.id, l.controller, l.controls);
        if let Some(a) = &l.actuator {
            let _ = write!(out, " actuator {};", string_literal(a));
        }
        if let Some(s) = &l.sensor {
            let _ = write!(out, " sensor {};", string_literal(s));
        }
        out.push_str(" enforces ");
        for (i, c) in l.enforces.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "{c}");
        }
        out.push_str("; }\n");
    }

    for r in model.recommendations() {
        let Recommendation { for_controller, category, text } = r;
        let _ = writeln!(
            out,
            "  recommend for {} category {} {}",
            for_controller,
            category.keyword(),
            string_literal(text)
        );
    }

    out.push_str("}\n");
    out
}

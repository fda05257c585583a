//! The `.hts` modeling language: lexer, parser, and canonical formatter.

pub mod format;
pub mod lexer;
pub mod parser;

pub use format::format_canonical;
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::parse;

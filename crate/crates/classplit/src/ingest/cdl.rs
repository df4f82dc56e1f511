//! The class description language.
//!
//! ```text
//! # comments run to end of line
//! class Account {
//!     field balance;
//!     method deposit uses balance calls log;
//!     method log;
//! }
//! ```
//!
//! `class`, `field`, `method`, `uses` and `calls` are reserved and cannot be
//! member names.

use std::fmt::Write;

use classplit_core::{ClassGraph, ClassGraphBuilder, MemberKind};

use super::IngestError;

const KEYWORDS: [&str; 5] = ["class", "field", "method", "uses", "calls"];

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Punct(char),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn tokenize(src: &str) -> Result<Vec<Token>, IngestError> {
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (start_line, start_col) = (line, col);
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            chars.next();
            col += 1;
        } else if c == '#' {
            while chars.peek().is_some_and(|&c| c != '\n') {
                chars.next();
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut ident = String::new();
            while let Some(&c) = chars
                .peek()
                .filter(|c| c.is_ascii_alphanumeric() || **c == '_')
            {
                ident.push(c);
                chars.next();
                col += 1;
            }
            out.push(Token {
                tok: Tok::Ident(ident),
                line: start_line,
                col: start_col,
            });
        } else if matches!(c, '{' | '}' | ';' | ',') {
            chars.next();
            col += 1;
            out.push(Token {
                tok: Tok::Punct(c),
                line: start_line,
                col: start_col,
            });
        } else {
            return Err(IngestError::Syntax {
                line,
                col,
                expected: format!("identifier or punctuation, found `{c}`"),
            });
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn error(&self, expected: &str) -> IngestError {
        let t = self.peek();
        let found = match &t.tok {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Punct(c) => format!("`{c}`"),
            Tok::Eof => "end of input".into(),
        };
        IngestError::Syntax {
            line: t.line,
            col: t.col,
            expected: format!("{expected}, found {found}"),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn keyword(&mut self, kw: &str) -> Result<(), IngestError> {
        if self.at_keyword(kw) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("`{kw}`")))
        }
    }

    fn at_punct(&self, p: char) -> bool {
        self.peek().tok == Tok::Punct(p)
    }

    fn punct(&mut self, p: char) -> Result<(), IngestError> {
        if self.at_punct(p) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("`{p}`")))
        }
    }

    fn ident(&mut self) -> Result<String, IngestError> {
        match &self.peek().tok {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error("identifier")),
        }
    }

    fn ident_list(&mut self) -> Result<Vec<String>, IngestError> {
        let mut names = vec![self.ident()?];
        while self.at_punct(',') {
            self.pos += 1;
            names.push(self.ident()?);
        }
        Ok(names)
    }

    fn document(&mut self) -> Result<ClassGraphBuilder, IngestError> {
        self.keyword("class")?;
        let mut builder = ClassGraphBuilder::new(self.ident()?);
        self.punct('{')?;
        loop {
            if self.at_keyword("field") {
                self.pos += 1;
                builder.add_member(self.ident()?, MemberKind::Field);
                self.punct(';')?;
            } else if self.at_keyword("method") {
                self.pos += 1;
                let name = self.ident()?;
                builder.add_member(name.clone(), MemberKind::Method);
                if self.at_keyword("uses") {
                    self.pos += 1;
                    for field in self.ident_list()? {
                        builder.add_use(name.clone(), field);
                    }
                }
                if self.at_keyword("calls") {
                    self.pos += 1;
                    for callee in self.ident_list()? {
                        builder.add_call(name.clone(), callee);
                    }
                }
                self.punct(';')?;
            } else if self.at_punct('}') {
                self.pos += 1;
                break;
            } else {
                return Err(self.error("`field`, `method` or `}`"));
            }
        }
        if self.peek().tok != Tok::Eof {
            return Err(self.error("end of input"));
        }
        Ok(builder)
    }
}

pub fn parse_cdl(source: &str) -> Result<ClassGraph, IngestError> {
    let tokens = tokenize(source)?;
    let builder = Parser { tokens, pos: 0 }.document()?;
    Ok(builder.build()?)
}

/// Writes `graph` back as CDL, one member per line in declaration order.
pub fn write_cdl(graph: &ClassGraph) -> String {
    let join = |ids: &std::collections::BTreeSet<classplit_core::MemberId>| {
        ids.iter()
            .map(|&i| graph.name(i))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let mut out = format!("class {} {{\n", graph.class_name());
    for member in graph.members() {
        match member.kind {
            MemberKind::Field => {
                let _ = writeln!(out, "    field {};", member.name);
            }
            MemberKind::Method => {
                let _ = write!(out, "    method {}", member.name);
                let uses = graph.field_refs(member.id);
                if !uses.is_empty() {
                    let _ = write!(out, " uses {}", join(uses));
                }
                let calls = graph.calls(member.id);
                if !calls.is_empty() {
                    let _ = write!(out, " calls {}", join(calls));
                }
                out.push_str(";\n");
            }
        }
    }
    out.push_str("}\n");
    out
}

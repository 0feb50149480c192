use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write};
use std::sync::Arc;

use super::sexpr::{read_all, Pos, Sexpr, SyntaxError};
use crate::engine::EngineError;
use crate::kb::Terminology;
use crate::syntax::{close_hierarchy, negate, nnf, Concept, Role, RoleBox};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RoleDecl {
    Transitive(Arc<str>),
    Inclusion(Role, Role),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Query {
    Sat(Concept),
    /// Is the first concept subsumed by the second?
    Subsumes(Concept, Concept),
}

/// A parsed knowledge base. Definitions are macros: a defined name is
/// replaced by its body wherever it is used afterwards, so every concept
/// stored here is already expanded.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KbDocument {
    pub role_decls: Vec<RoleDecl>,
    pub definitions: Vec<(String, Concept)>,
    pub gcis: Vec<(Concept, Concept)>,
    pub queries: Vec<Query>,
    /// Where each number restriction first appears in the source.
    pub restriction_sites: Vec<(Concept, Pos)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KbError {
    Syntax(SyntaxError),
    /// A well-formed expression in the wrong place.
    Form { pos: Pos, message: String },
    Duplicate { pos: Pos, name: String },
    Reserved { pos: Pos, name: String },
    DefinedAfterUse { pos: Pos, name: String },
    UnknownName(String),
}

impl fmt::Display for KbError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KbError::Syntax(e) => write!(f, "{e}"),
            KbError::Form { pos, message } => write!(f, "{pos}: {message}"),
            KbError::Duplicate { pos, name } => write!(f, "{pos}: {name} is already defined"),
            KbError::Reserved { pos, name } => write!(f, "{pos}: {name} uses the reserved '$' prefix"),
            KbError::DefinedAfterUse { pos, name } => {
                write!(f, "{pos}: {name} is defined after being used as an atomic concept")
            }
            KbError::UnknownName(name) => write!(f, "no definition named {name}"),
        }
    }
}

impl std::error::Error for KbError {}

impl From<SyntaxError> for KbError {
    fn from(e: SyntaxError) -> Self {
        KbError::Syntax(e)
    }
}

fn form(pos: Pos, message: impl Into<String>) -> KbError {
    KbError::Form {
        pos,
        message: message.into(),
    }
}

const KEYWORDS: [&str; 10] = ["top", "bottom", "not", "and", "or", "some", "all", "at-least", "at-most", "inv"];

struct Parser<'a> {
    defs: &'a BTreeMap<String, Concept>,
    /// Witness files may name the internal universal role.
    allow_reserved: bool,
    atoms_seen: BTreeSet<String>,
    sites: Vec<(Concept, Pos)>,
}

impl Parser<'_> {
    fn name(&self, e: &Sexpr, what: &str) -> Result<String, KbError> {
        let Some(s) = e.as_atom() else {
            return Err(form(e.pos(), format!("expected {what} name, found a list")));
        };
        if s.starts_with('$') && !self.allow_reserved {
            return Err(KbError::Reserved {
                pos: e.pos(),
                name: s.to_string(),
            });
        }
        if KEYWORDS.contains(&s) {
            return Err(form(e.pos(), format!("expected {what} name, found keyword {s}")));
        }
        if s.parse::<u64>().is_ok() {
            return Err(form(e.pos(), format!("expected {what} name, found number {s}")));
        }
        Ok(s.to_string())
    }

    fn role(&self, e: &Sexpr) -> Result<Role, KbError> {
        match e {
            Sexpr::List(items, pos) => match items.as_slice() {
                [head, inner] if head.as_atom() == Some("inv") => Ok(self.role(inner)?.inverse()),
                _ => Err(form(*pos, "expected a role name or (inv ROLE)")),
            },
            Sexpr::Atom(..) => Ok(Role::named(self.name(e, "role")?)),
        }
    }

    fn count(&self, e: &Sexpr) -> Result<u32, KbError> {
        e.as_atom()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| form(e.pos(), "expected a non-negative number"))
    }

    fn concept(&mut self, e: &Sexpr) -> Result<Concept, KbError> {
        let items = match e {
            Sexpr::Atom(s, _) => {
                return Ok(match s.as_str() {
                    "top" => Concept::Top,
                    "bottom" => Concept::Bottom,
                    _ => {
                        let name = self.name(e, "concept")?;
                        match self.defs.get(&name) {
                            Some(c) => c.clone(),
                            None => {
                                self.atoms_seen.insert(name.clone());
                                Concept::atom(name)
                            }
                        }
                    }
                })
            }
            Sexpr::List(items, _) => items,
        };
        let pos = e.pos();
        let Some((head, args)) = items.split_first() else {
            return Err(form(pos, "empty concept expression"));
        };
        let keyword = head.as_atom().unwrap_or("");
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(form(pos, format!("{keyword} takes {n} arguments, found {}", args.len())))
            }
        };
        match keyword {
            "not" => {
                arity(1)?;
                Ok(Concept::not(self.concept(&args[0])?))
            }
            "and" | "or" => {
                if args.is_empty() {
                    return Err(form(pos, format!("{keyword} needs at least one argument")));
                }
                let parts = args.iter().map(|a| self.concept(a)).collect::<Result<Vec<_>, _>>()?;
                Ok(if keyword == "and" {
                    Concept::and_all(parts)
                } else {
                    Concept::or_all(parts)
                })
            }
            "some" | "all" => {
                arity(2)?;
                let r = self.role(&args[0])?;
                let c = self.concept(&args[1])?;
                Ok(if keyword == "some" {
                    Concept::exists(r, c)
                } else {
                    Concept::forall(r, c)
                })
            }
            "at-least" | "at-most" => {
                if !(2..=3).contains(&args.len()) {
                    return Err(form(pos, format!("{keyword} takes a number, a role and an optional concept")));
                }
                let n = self.count(&args[0])?;
                let r = self.role(&args[1])?;
                let c = match args.get(2) {
                    Some(a) => self.concept(a)?,
                    None => Concept::Top,
                };
                let out = if keyword == "at-least" {
                    Concept::at_least(n, r, c)
                } else {
                    Concept::at_most(n, r, c)
                };
                if !self.sites.iter().any(|(c, _)| *c == out) {
                    self.sites.push((out.clone(), pos));
                }
                Ok(out)
            }
            _ => Err(form(head.pos(), "expected one of not, and, or, some, all, at-least, at-most")),
        }
    }
}

/// Parses a knowledge base. Forms: `(transitive R ...)`,
/// `(implies-role R S)`, `(define NAME C)`, `(implies C D)`,
/// `(equivalent C D)`, `(sat C)` and `(subsumes C D)`.
pub fn parse_kb(text: &str) -> Result<KbDocument, KbError> {
    let mut doc = KbDocument::default();
    let mut defs = BTreeMap::new();
    let mut atoms_seen = BTreeSet::new();
    for item in read_all(text)? {
        let Sexpr::List(items, pos) = &item else {
            return Err(form(item.pos(), "expected a top-level form in parentheses"));
        };
        let Some((head, args)) = items.split_first() else {
            return Err(form(*pos, "empty form"));
        };
        let mut p = Parser {
            defs: &defs,
            allow_reserved: false,
            atoms_seen: std::mem::take(&mut atoms_seen),
            sites: std::mem::take(&mut doc.restriction_sites),
        };
        let keyword = head.as_atom().unwrap_or("");
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(form(*pos, format!("{keyword} takes {n} arguments, found {}", args.len())))
            }
        };
        let mut new_def = None;
        match keyword {
            "transitive" => {
                if args.is_empty() {
                    return Err(form(*pos, "transitive needs at least one role name"));
                }
                for a in args {
                    doc.role_decls.push(RoleDecl::Transitive(p.name(a, "role")?.into()));
                }
            }
            "implies-role" => {
                arity(2)?;
                doc.role_decls.push(RoleDecl::Inclusion(p.role(&args[0])?, p.role(&args[1])?));
            }
            "define" => {
                arity(2)?;
                let name = p.name(&args[0], "concept")?;
                if defs.contains_key(&name) {
                    return Err(KbError::Duplicate { pos: args[0].pos(), name });
                }
                if p.atoms_seen.contains(&name) {
                    return Err(KbError::DefinedAfterUse { pos: args[0].pos(), name });
                }
                let body = p.concept(&args[1])?;
                if p.atoms_seen.contains(&name) {
                    return Err(form(args[1].pos(), format!("{name} is defined in terms of itself")));
                }
                new_def = Some((name, body));
            }
            "implies" | "equivalent" | "subsumes" => {
                arity(2)?;
                let c = p.concept(&args[0])?;
                let d = p.concept(&args[1])?;
                match keyword {
                    "implies" => doc.gcis.push((c, d)),
                    "equivalent" => {
                        doc.gcis.push((c.clone(), d.clone()));
                        doc.gcis.push((d, c));
                    }
                    _ => doc.queries.push(Query::Subsumes(c, d)),
                }
            }
            "sat" => {
                arity(1)?;
                doc.queries.push(Query::Sat(p.concept(&args[0])?));
            }
            _ => {
                return Err(form(
                    head.pos(),
                    "expected one of transitive, implies-role, define, implies, equivalent, sat, subsumes",
                ))
            }
        }
        atoms_seen = p.atoms_seen;
        doc.restriction_sites = p.sites;
        if let Some((name, body)) = new_def {
            defs.insert(name.clone(), body.clone());
            doc.definitions.push((name, body));
        }
    }
    Ok(doc)
}

/// Parses one concept, expanding the given definitions.
pub fn parse_concept(text: &str, definitions: &[(String, Concept)]) -> Result<Concept, KbError> {
    parse_concept_as(text, definitions, false)
}

pub(crate) fn parse_concept_as(
    text: &str,
    definitions: &[(String, Concept)],
    allow_reserved: bool,
) -> Result<Concept, KbError> {
    let items = read_all(text)?;
    let [e] = items.as_slice() else {
        return Err(form(
            items.get(1).map(Sexpr::pos).unwrap_or(Pos { line: 1, column: 1 }),
            "expected exactly one concept",
        ));
    };
    let defs: BTreeMap<String, Concept> = definitions.iter().cloned().collect();
    Parser {
        defs: &defs,
        allow_reserved,
        atoms_seen: BTreeSet::new(),
        sites: Vec::new(),
    }
    .concept(e)
}

/// Parses a role name or `(inv NAME)`.
pub fn parse_role(text: &str) -> Result<Role, KbError> {
    parse_role_as(text, false)
}

pub(crate) fn parse_role_as(text: &str, allow_reserved: bool) -> Result<Role, KbError> {
    let items = read_all(text)?;
    let [e] = items.as_slice() else {
        return Err(form(Pos { line: 1, column: 1 }, "expected exactly one role"));
    };
    let defs = BTreeMap::new();
    Parser {
        defs: &defs,
        allow_reserved,
        atoms_seen: BTreeSet::new(),
        sites: Vec::new(),
    }
    .role(e)
}

impl KbDocument {
    pub fn rbox(&self) -> RoleBox {
        let transitive = self.role_decls.iter().filter_map(|d| match d {
            RoleDecl::Transitive(n) => Some(n.clone()),
            RoleDecl::Inclusion(..) => None,
        });
        let inclusions = self.role_decls.iter().filter_map(|d| match d {
            RoleDecl::Inclusion(r, s) => Some((r.clone(), s.clone())),
            RoleDecl::Transitive(_) => None,
        });
        close_hierarchy(transitive, inclusions)
    }

    pub fn terminology(&self) -> Terminology {
        Terminology::new(self.gcis.clone(), self.rbox())
    }

    pub fn definition(&self, name: &str) -> Option<&Concept> {
        self.definitions.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }

    /// A defined name, or else an inline concept expression.
    pub fn resolve(&self, name_or_inline: &str) -> Result<Concept, KbError> {
        match self.definition(name_or_inline.trim()) {
            Some(c) => Ok(c.clone()),
            None => parse_concept(name_or_inline, &self.definitions),
        }
    }

    /// The source position of the number restriction an engine error
    /// complains about, when it came from this document.
    pub fn locate(&self, e: &EngineError) -> Option<Pos> {
        let EngineError::NonSimpleRoleInNumberRestriction { role, concept } = e else {
            return None;
        };
        let exact = self
            .restriction_sites
            .iter()
            .find(|(c, _)| c == concept || nnf(c) == *concept || negate(c) == *concept);
        exact
            .or_else(|| self.restriction_sites.iter().find(|(c, _)| c.role().is_some_and(|r| r == role)))
            .map(|(_, p)| *p)
    }
}

impl fmt::Display for KbDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for d in &self.role_decls {
            match d {
                RoleDecl::Transitive(n) => writeln!(out, "(transitive {n})")?,
                RoleDecl::Inclusion(r, s) => writeln!(out, "(implies-role {r} {s})")?,
            }
        }
        for (n, c) in &self.definitions {
            writeln!(out, "(define {n} {c})")?;
        }
        for (c, d) in &self.gcis {
            writeln!(out, "(implies {c} {d})")?;
        }
        for q in &self.queries {
            match q {
                Query::Sat(c) => writeln!(out, "(sat {c})")?,
                Query::Subsumes(c, d) => writeln!(out, "(subsumes {c} {d})")?,
            }
        }
        f.write_str(&out)
    }
}

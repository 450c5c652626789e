//! Class tables and the parsers for declaration files and type expressions.
//!
//! Declaration grammar:
//!
//! ```text
//! program := decl*
//! decl    := "class" IDENT ("<" IDENT ">")? "extends" IDENT "{" "}"
//! ```
//!
//! Type grammar:
//!
//! ```text
//! T   := IDENT | IDENT "<" ARG ">"
//! ARG := "?" | "?" ("extends" | "<:") T | "?" ("super" | ":>") T | T
//! ```
//!
//! `O` and `N` abbreviate `Object` and `Null`. Whitespace is insignificant
//! and `//` starts a comment that runs to the end of the line.

use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

use crate::types::{canonicalize, ClassName, GroundType, TypeError, VarianceArg};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Arity {
    /// A plain class, usable as a type on its own.
    Plain,
    /// A class with exactly one type parameter.
    Generic,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Declaration {
    pub arity: Arity,
    /// `None` stands for `Object`.
    pub superclass: Option<ClassName>,
    /// Name of the type parameter as written; bounds are not modelled so
    /// the name is only kept for display.
    pub type_param: Option<String>,
}

/// Declared classes in declaration order. `Object` and `Null` are implicit.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ClassTable {
    classes: IndexMap<ClassName, Declaration>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeclError {
    #[error("class `{0}` is already declared")]
    Duplicate(ClassName),
    #[error("`{0}` is builtin and cannot be declared")]
    Reserved(String),
    #[error("class `{class}` extends unknown class `{superclass}`")]
    UnknownSuperclass {
        class: ClassName,
        superclass: ClassName,
    },
    #[error("class `{class}` cannot extend generic class `{superclass}`")]
    GenericSuperclass {
        class: ClassName,
        superclass: ClassName,
    },
    #[error("generic class `{class}` must extend Object, not `{superclass}`")]
    GenericMustExtendObject {
        class: ClassName,
        superclass: ClassName,
    },
}

const RESERVED: [&str; 4] = ["Object", "Null", "O", "N"];

fn is_object(name: &str) -> bool {
    name == "Object" || name == "O"
}

impl ClassTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses and validates a declaration file.
    pub fn parse(source: &str) -> Result<Self, ParseError> {
        parse_program(source)
    }

    /// Adds a class. `superclass` may name `Object` (or `O`).
    pub fn declare(
        &mut self,
        name: &str,
        type_param: Option<&str>,
        superclass: &str,
    ) -> Result<(), DeclError> {
        if RESERVED.contains(&name) {
            return Err(DeclError::Reserved(name.to_string()));
        }
        let class = ClassName::new(name);
        if self.classes.contains_key(&class) {
            return Err(DeclError::Duplicate(class));
        }
        let arity = if type_param.is_some() {
            Arity::Generic
        } else {
            Arity::Plain
        };
        let superclass = if is_object(superclass) {
            None
        } else {
            let sup = ClassName::new(superclass);
            match self.classes.get(&sup) {
                None => {
                    return Err(DeclError::UnknownSuperclass {
                        class,
                        superclass: sup,
                    })
                }
                Some(d) if d.arity == Arity::Generic => {
                    return Err(DeclError::GenericSuperclass {
                        class,
                        superclass: sup,
                    })
                }
                Some(_) if arity == Arity::Generic => {
                    return Err(DeclError::GenericMustExtendObject {
                        class,
                        superclass: sup,
                    })
                }
                Some(_) => Some(sup),
            }
        };
        self.classes.insert(
            class,
            Declaration {
                arity,
                superclass,
                type_param: type_param.map(str::to_string),
            },
        );
        Ok(())
    }

    pub fn arity(&self, name: &ClassName) -> Option<Arity> {
        self.classes.get(name).map(|d| d.arity)
    }

    pub fn get(&self, name: &ClassName) -> Option<&Declaration> {
        self.classes.get(name)
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn declarations(&self) -> impl Iterator<Item = (&ClassName, &Declaration)> {
        self.classes.iter()
    }

    pub fn generic_classes(&self) -> impl Iterator<Item = &ClassName> {
        self.classes
            .iter()
            .filter(|(_, d)| d.arity == Arity::Generic)
            .map(|(n, _)| n)
    }

    pub fn plain_classes(&self) -> impl Iterator<Item = &ClassName> {
        self.classes
            .iter()
            .filter(|(_, d)| d.arity == Arity::Plain)
            .map(|(n, _)| n)
    }

    /// Reflexive subclass test between declared classes.
    pub fn is_subclass(&self, sub: &ClassName, sup: &ClassName) -> bool {
        let mut cur = Some(sub);
        while let Some(c) = cur {
            if c == sup {
                return true;
            }
            cur = self.classes.get(c).and_then(|d| d.superclass.as_ref());
        }
        false
    }

    /// Parses a type expression over this table and canonicalizes it.
    pub fn parse_type(&self, source: &str) -> Result<GroundType, ParseError> {
        parse_type(source, self)
    }
}

/// 1-based source position.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{pos}: syntax error: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("{pos}: {source}")]
    Declaration { pos: Pos, source: DeclError },
    #[error("{0}")]
    Type(#[from] TypeError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Lt,
    Gt,
    LBrace,
    RBrace,
    Question,
    /// `<:`
    SubOf,
    /// `:>`
    SuperOf,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Lt => f.write_str("`<`"),
            Tok::Gt => f.write_str("`>`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Question => f.write_str("`?`"),
            Tok::SubOf => f.write_str("`<:`"),
            Tok::SuperOf => f.write_str("`:>`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(source: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = source.chars().peekable();
    let (mut line, mut column) = (1, 1);
    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else if c.is_some() {
                column += 1;
            }
            c
        }};
    }
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, column };
        if c.is_whitespace() {
            bump!();
            continue;
        }
        let tok = match c {
            '/' => {
                bump!();
                if chars.peek() != Some(&'/') {
                    return Err(ParseError::Syntax {
                        pos,
                        message: "unexpected `/`".into(),
                    });
                }
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump!();
                }
                continue;
            }
            '<' => {
                bump!();
                if chars.peek() == Some(&':') {
                    bump!();
                    Tok::SubOf
                } else {
                    Tok::Lt
                }
            }
            ':' => {
                bump!();
                if chars.peek() != Some(&'>') {
                    return Err(ParseError::Syntax {
                        pos,
                        message: "expected `:>`".into(),
                    });
                }
                bump!();
                Tok::SuperOf
            }
            '>' => {
                bump!();
                Tok::Gt
            }
            '{' => {
                bump!();
                Tok::LBrace
            }
            '}' => {
                bump!();
                Tok::RBrace
            }
            '?' => {
                bump!();
                Tok::Question
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                Tok::Ident(s)
            }
            other => {
                return Err(ParseError::Syntax {
                    pos,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push((tok, pos));
    }
    out.push((Tok::Eof, Pos { line, column }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn new(source: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(source)?,
            at: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if t != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.pos(),
            message: format!("expected {expected}, found {}", self.peek()),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.next();
            Ok(())
        } else {
            self.error(&tok.to_string())
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Tok::Ident(_) => match self.next() {
                Tok::Ident(s) => Ok(s),
                _ => unreachable!(),
            },
            _ => self.error("identifier"),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.next();
                Ok(())
            }
            _ => self.error(&format!("`{kw}`")),
        }
    }

    fn program(&mut self) -> Result<ClassTable, ParseError> {
        let mut table = ClassTable::new();
        while *self.peek() != Tok::Eof {
            let pos = self.pos();
            self.keyword("class")?;
            let name = self.ident()?;
            let param = if *self.peek() == Tok::Lt {
                self.next();
                let p = self.ident()?;
                self.expect(Tok::Gt)?;
                Some(p)
            } else {
                None
            };
            self.keyword("extends")?;
            let sup = self.ident()?;
            self.expect(Tok::LBrace)?;
            self.expect(Tok::RBrace)?;
            table
                .declare(&name, param.as_deref(), &sup)
                .map_err(|source| ParseError::Declaration { pos, source })?;
        }
        Ok(table)
    }

    /// Raw, uncanonicalized type term.
    fn ty(&mut self) -> Result<GroundType, ParseError> {
        let name = self.ident()?;
        if *self.peek() != Tok::Lt {
            return Ok(match name.as_str() {
                "O" | "Object" => GroundType::Object,
                "N" | "Null" => GroundType::Null,
                _ => GroundType::named(&name),
            });
        }
        self.next();
        let arg = if *self.peek() == Tok::Question {
            self.next();
            match self.peek().clone() {
                Tok::SubOf => {
                    self.next();
                    VarianceArg::Extends(self.ty()?)
                }
                Tok::SuperOf => {
                    self.next();
                    VarianceArg::Super(self.ty()?)
                }
                Tok::Ident(kw) if kw == "extends" => {
                    self.next();
                    VarianceArg::Extends(self.ty()?)
                }
                Tok::Ident(kw) if kw == "super" => {
                    self.next();
                    VarianceArg::Super(self.ty()?)
                }
                _ => VarianceArg::Unbounded,
            }
        } else {
            VarianceArg::Invariant(self.ty()?)
        };
        self.expect(Tok::Gt)?;
        Ok(GroundType::Generic(ClassName::new(&name), Box::new(arg)))
    }
}

/// Parses a declaration file into a validated [`ClassTable`].
pub fn parse_program(source: &str) -> Result<ClassTable, ParseError> {
    Parser::new(source)?.program()
}

/// Parses a type expression without validating it against any table.
pub fn parse_raw_type(source: &str) -> Result<GroundType, ParseError> {
    let mut p = Parser::new(source)?;
    let t = p.ty()?;
    if *p.peek() != Tok::Eof {
        return p.error("end of input");
    }
    Ok(t)
}

/// Parses a type expression and returns its canonical form over `table`.
pub fn parse_type(source: &str, table: &ClassTable) -> Result<GroundType, ParseError> {
    let raw = parse_raw_type(source)?;
    Ok(canonicalize(table, &raw)?)
}

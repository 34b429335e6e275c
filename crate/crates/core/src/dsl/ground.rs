//! Raw (possibly variable-carrying) atoms, a token cursor, and the
//! instantiation of statements over declared sorts.

use std::collections::BTreeMap;

use super::lex::{Tok, TokKind};
use super::Diagnostic;
use crate::domain::{CondLit, Domain, FluentLit, GroundAtom};
use crate::ids::{ActionId, FluentId, ObjectId, StaticId};

#[derive(Clone, Debug)]
pub(super) enum RawTerm {
    Var(String, usize, usize),
    Obj(String, usize, usize),
    Num(u32, usize, usize),
}

#[derive(Clone, Debug)]
pub(super) struct RawAtom {
    pub name: String,
    pub args: Vec<RawTerm>,
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug)]
pub(super) enum RawCond {
    Lit { atom: RawAtom, positive: bool },
    Neq(RawTerm, RawTerm),
}

// ---------------------------------------------------------------------------
// Token cursor
// ---------------------------------------------------------------------------

pub(super) struct Cursor<'a> {
    toks: &'a [Tok],
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(toks: &'a [Tok]) -> Self {
        Cursor { toks, pos: 0 }
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    pub fn peek_kind(&self) -> Option<&TokKind> {
        self.peek().map(|t| &t.kind)
    }

    pub fn peek2_kind(&self) -> Option<&TokKind> {
        self.toks.get(self.pos + 1).map(|t| &t.kind)
    }

    pub fn here(&self) -> (usize, usize) {
        match self.peek() {
            Some(t) => (t.line, t.col),
            None => self
                .toks
                .last()
                .map(|t| (t.line, t.col + 1))
                .unwrap_or((0, 0)),
        }
    }

    pub fn error(&self, msg: impl Into<String>) -> Diagnostic {
        let (line, col) = self.here();
        Diagnostic::new(line, col, msg)
    }

    pub fn eat(&mut self, kind: &TokKind) -> bool {
        if self.peek_kind() == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, kind: TokKind, what: &str) -> Result<(), Diagnostic> {
        if self.eat(&kind) {
            Ok(())
        } else {
            let found = self
                .peek()
                .map(|t| t.describe())
                .unwrap_or_else(|| "end of statement".into());
            Err(self.error(format!("expected {what}, found {found}")))
        }
    }

    pub fn eat_ident(&mut self, name: &str) -> bool {
        if matches!(self.peek_kind(), Some(TokKind::Ident(s)) if s == name) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn take_ident(&mut self, what: &str) -> Result<(String, usize, usize), Diagnostic> {
        match self.peek() {
            Some(Tok { kind: TokKind::Ident(s), line, col }) => {
                let out = (s.clone(), *line, *col);
                self.pos += 1;
                Ok(out)
            }
            other => {
                let found = other
                    .map(|t| t.describe())
                    .unwrap_or_else(|| "end of statement".into());
                Err(self.error(format!("expected {what}, found {found}")))
            }
        }
    }

    pub fn take_num(&mut self, what: &str) -> Result<u32, Diagnostic> {
        match self.peek() {
            Some(Tok { kind: TokKind::Num(n), .. }) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            other => {
                let found = other
                    .map(|t| t.describe())
                    .unwrap_or_else(|| "end of statement".into());
                Err(self.error(format!("expected {what}, found {found}")))
            }
        }
    }

    pub fn expect_dot_end(&mut self) -> Result<(), Diagnostic> {
        self.expect(TokKind::Dot, "`.`")?;
        if let Some(t) = self.peek() {
            return Err(Diagnostic::new(t.line, t.col, "trailing tokens after `.`"));
        }
        Ok(())
    }

    pub fn parse_term(&mut self) -> Result<RawTerm, Diagnostic> {
        match self.peek().cloned() {
            Some(Tok { kind: TokKind::Ident(s), line, col }) => {
                self.pos += 1;
                Ok(RawTerm::Obj(s, line, col))
            }
            Some(Tok { kind: TokKind::Var(s), line, col }) => {
                self.pos += 1;
                Ok(RawTerm::Var(s, line, col))
            }
            Some(Tok { kind: TokKind::Num(n), line, col }) => {
                self.pos += 1;
                Ok(RawTerm::Num(n, line, col))
            }
            _ => Err(self.error("expected a term")),
        }
    }

    /// `name` or `name(term, ...)`.
    pub fn parse_atom(&mut self) -> Result<RawAtom, Diagnostic> {
        let (name, line, col) = self.take_ident("a name")?;
        let mut args = Vec::new();
        if self.eat(&TokKind::LParen) {
            loop {
                args.push(self.parse_term()?);
                if self.eat(&TokKind::RParen) {
                    break;
                }
                self.expect(TokKind::Comma, "`,` or `)`")?;
            }
        }
        Ok(RawAtom { name, args, line, col })
    }

    /// A literal: `atom` or `-atom`.
    pub fn parse_lit(&mut self) -> Result<(RawAtom, bool), Diagnostic> {
        let positive = !self.eat(&TokKind::Minus);
        Ok((self.parse_atom()?, positive))
    }

    /// An `if`-condition list with `!=` constraints, up to the final `.`.
    pub fn parse_cond_list(&mut self) -> Result<Vec<RawCond>, Diagnostic> {
        let mut out = Vec::new();
        loop {
            // term != term, or a literal
            let is_neq = matches!(
                self.peek_kind(),
                Some(TokKind::Var(_) | TokKind::Ident(_) | TokKind::Num(_))
            ) && self.peek2_kind() == Some(&TokKind::Neq);
            if is_neq {
                let left = self.parse_term()?;
                self.expect(TokKind::Neq, "`!=`")?;
                let right = self.parse_term()?;
                out.push(RawCond::Neq(left, right));
            } else {
                let (atom, positive) = self.parse_lit()?;
                out.push(RawCond::Lit { atom, positive });
            }
            if !self.eat(&TokKind::Comma) {
                break;
            }
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Name resolution and grounding
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(super) enum AtomKind {
    Fluent,
    Static,
    Action,
}

#[derive(Clone, Debug)]
pub(super) enum ResolvedTerm {
    Var(String),
    Obj(ObjectId),
}

#[derive(Clone, Debug)]
pub(super) struct ResolvedAtom {
    pub kind: AtomKind,
    pub decl: u32,
    pub args: Vec<ResolvedTerm>,
}

/// Candidate values per variable; the intersection of the sorts of every
/// position the variable occupies.
#[derive(Default, Debug)]
pub(super) struct VarRanges {
    ranges: BTreeMap<String, Vec<ObjectId>>,
}

impl VarRanges {
    fn constrain(&mut self, var: &str, members: &[ObjectId]) {
        match self.ranges.get_mut(var) {
            None => {
                self.ranges.insert(var.to_string(), members.to_vec());
            }
            Some(range) => range.retain(|o| members.contains(o)),
        }
    }

    pub fn check_nonempty(&self, cur: &Cursor, diags: &mut Vec<Diagnostic>) -> bool {
        let mut ok = true;
        for (var, range) in &self.ranges {
            if range.is_empty() {
                diags.push(cur.error(format!(
                    "variable `{var}` has no possible values (sort constraints are disjoint)"
                )));
                ok = false;
            }
        }
        ok
    }

    pub fn contains(&self, var: &str) -> bool {
        self.ranges.contains_key(var)
    }

    /// Calls `f` with every assignment, in declaration order of the members
    /// and alphabetical order of the variables.
    pub fn for_each_assignment(&self, mut f: impl FnMut(&BTreeMap<&str, ObjectId>)) {
        let vars: Vec<(&str, &Vec<ObjectId>)> =
            self.ranges.iter().map(|(k, v)| (k.as_str(), v)).collect();
        let mut asg: BTreeMap<&str, ObjectId> = BTreeMap::new();
        fn recurse<'v>(
            vars: &[(&'v str, &'v Vec<ObjectId>)],
            asg: &mut BTreeMap<&'v str, ObjectId>,
            f: &mut impl FnMut(&BTreeMap<&'v str, ObjectId>),
        ) {
            match vars.split_first() {
                None => f(asg),
                Some(((name, range), rest)) => {
                    for &obj in range.iter() {
                        asg.insert(name, obj);
                        recurse(rest, asg, f);
                    }
                    asg.remove(name);
                }
            }
        }
        recurse(&vars, &mut asg, &mut f);
    }
}

pub(super) struct Resolver<'d> {
    pub domain: &'d Domain,
}

impl<'d> Resolver<'d> {
    pub fn new(domain: &'d Domain) -> Self {
        Resolver { domain }
    }

    pub fn lookup_object(&self, name: &str) -> Option<ObjectId> {
        self.domain
            .objects
            .iter()
            .position(|o| o == name)
            .map(|i| ObjectId(i as u32))
    }

    fn classify(&self, name: &str) -> Option<(AtomKind, u32, &[crate::ids::SortId])> {
        if let Some(i) = self.domain.fluent_decls.iter().position(|d| d.name == name) {
            return Some((AtomKind::Fluent, i as u32, &self.domain.fluent_decls[i].args));
        }
        if let Some(i) = self.domain.static_decls.iter().position(|d| d.name == name) {
            return Some((AtomKind::Static, i as u32, &self.domain.static_decls[i].args));
        }
        if let Some(i) = self.domain.action_decls.iter().position(|d| d.name == name) {
            return Some((AtomKind::Action, i as u32, &self.domain.action_decls[i].args));
        }
        None
    }

    /// Resolves an atom against the declarations, recording variable sort
    /// constraints. `what` names the context for the unknown-name message.
    pub fn resolve_atom(
        &self,
        atom: &RawAtom,
        vars: &mut VarRanges,
        what: &str,
    ) -> Result<ResolvedAtom, Diagnostic> {
        let Some((kind, decl, arg_sorts)) = self.classify(&atom.name) else {
            return Err(Diagnostic::new(
                atom.line,
                atom.col,
                format!("{what} `{}` is not declared", atom.name),
            ));
        };
        if atom.args.len() != arg_sorts.len() {
            return Err(Diagnostic::new(
                atom.line,
                atom.col,
                format!(
                    "`{}` takes {} argument(s), found {}",
                    atom.name,
                    arg_sorts.len(),
                    atom.args.len()
                ),
            ));
        }
        let mut args = Vec::with_capacity(atom.args.len());
        for (term, &sort) in atom.args.iter().zip(arg_sorts) {
            let members = &self.domain.sorts[sort.index()].members;
            match term {
                RawTerm::Var(v, _, _) => {
                    vars.constrain(v, members);
                    args.push(ResolvedTerm::Var(v.clone()));
                }
                RawTerm::Obj(name, line, col) => {
                    let Some(obj) = self.lookup_object(name) else {
                        return Err(Diagnostic::new(*line, *col, format!("unknown object `{name}`")));
                    };
                    if !members.contains(&obj) {
                        return Err(Diagnostic::new(
                            *line,
                            *col,
                            format!(
                                "object `{name}` is not of sort `{}`",
                                self.domain.sorts[sort.index()].name
                            ),
                        ));
                    }
                    args.push(ResolvedTerm::Obj(obj));
                }
                RawTerm::Num(n, line, col) => {
                    return Err(Diagnostic::new(
                        *line,
                        *col,
                        format!("unexpected number `{n}` as an argument of `{}`", atom.name),
                    ));
                }
            }
        }
        Ok(ResolvedAtom { kind, decl, args })
    }

    fn ground_args(&self, atom: &ResolvedAtom, asg: &BTreeMap<&str, ObjectId>) -> Vec<ObjectId> {
        atom.args
            .iter()
            .map(|t| match t {
                ResolvedTerm::Obj(o) => *o,
                ResolvedTerm::Var(v) => asg[v.as_str()],
            })
            .collect()
    }

    pub fn ground_fluent(&self, atom: &ResolvedAtom, asg: &BTreeMap<&str, ObjectId>) -> FluentId {
        let ga = GroundAtom { decl: atom.decl, args: self.ground_args(atom, asg) };
        self.domain.lookup_fluent(&ga).expect("ground fluent exists")
    }

    pub fn ground_action(&self, atom: &ResolvedAtom, asg: &BTreeMap<&str, ObjectId>) -> ActionId {
        let ga = GroundAtom { decl: atom.decl, args: self.ground_args(atom, asg) };
        self.domain.lookup_action(&ga).expect("ground action exists")
    }

    pub fn ground_static(&self, atom: &ResolvedAtom, asg: &BTreeMap<&str, ObjectId>) -> StaticId {
        let ga = GroundAtom { decl: atom.decl, args: self.ground_args(atom, asg) };
        self.domain.lookup_static(&ga).expect("ground static exists")
    }

    fn term_value(
        &self,
        term: &RawTerm,
        asg: &BTreeMap<&str, ObjectId>,
    ) -> Result<ObjectId, Diagnostic> {
        match term {
            RawTerm::Var(v, line, col) => asg.get(v.as_str()).copied().ok_or_else(|| {
                Diagnostic::new(
                    *line,
                    *col,
                    format!("variable `{v}` occurs only in `!=` (sort cannot be inferred)"),
                )
            }),
            RawTerm::Obj(name, line, col) => self
                .lookup_object(name)
                .ok_or_else(|| Diagnostic::new(*line, *col, format!("unknown object `{name}`"))),
            RawTerm::Num(n, line, col) => Err(Diagnostic::new(
                *line,
                *col,
                format!("number `{n}` cannot appear in `!=`"),
            )),
        }
    }

    /// Resolves a condition list (fluent, static, and action literals plus
    /// `!=` constraints).
    pub fn resolve_cond(
        &self,
        conds: &[RawCond],
        vars: &mut VarRanges,
    ) -> Result<Vec<ResolvedCond>, Diagnostic> {
        conds
            .iter()
            .map(|c| match c {
                RawCond::Lit { atom, positive } => {
                    let resolved = self.resolve_atom(atom, vars, "condition atom")?;
                    Ok(ResolvedCond::Lit {
                        atom: resolved,
                        positive: *positive,
                    })
                }
                RawCond::Neq(a, b) => Ok(ResolvedCond::Neq(a.clone(), b.clone())),
            })
            .collect()
    }

    /// Instantiates a resolved condition under an assignment. Static literals
    /// are evaluated now: a satisfied one is dropped, a falsified one kills
    /// the whole instance (returns None). `!=` filters instances the same way.
    pub fn ground_cond(
        &self,
        conds: &[ResolvedCond],
        asg: &BTreeMap<&str, ObjectId>,
    ) -> Result<Option<Vec<CondLit>>, Diagnostic> {
        let mut out = Vec::with_capacity(conds.len());
        for cond in conds {
            match cond {
                ResolvedCond::Neq(a, b) => {
                    if self.term_value(a, asg)? == self.term_value(b, asg)? {
                        return Ok(None);
                    }
                }
                ResolvedCond::Lit { atom, positive } => match atom.kind {
                    AtomKind::Fluent => out.push(CondLit::Fluent(FluentLit {
                        fluent: self.ground_fluent(atom, asg),
                        value: *positive,
                    })),
                    AtomKind::Action => out.push(CondLit::Occurs {
                        action: self.ground_action(atom, asg),
                        value: *positive,
                    }),
                    AtomKind::Static => {
                        let truth = self.domain.static_true(self.ground_static(atom, asg));
                        if truth != *positive {
                            return Ok(None);
                        }
                    }
                },
            }
        }
        Ok(Some(out))
    }
}

#[derive(Clone, Debug)]
pub(super) enum ResolvedCond {
    Lit { atom: ResolvedAtom, positive: bool },
    Neq(RawTerm, RawTerm),
}

// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use lissom_logic::Sort;

/// Line and column, both 1-based.
///
/// Positions are metadata: they never take part in AST comparisons, so
/// a reparsed program equals the original regardless of layout.
#[derive(Clone, Copy, Debug, Default, Eq)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl PartialEq for Pos {
    fn eq(&self, _: &Pos) -> bool {
        true
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Int,
    Bool,
    Set,
    Vec,
}

impl Type {
    pub fn sort(self) -> Sort {
        match self {
            Type::Int => Sort::Int,
            Type::Bool => Sort::Bool,
            Type::Set => Sort::Set,
            Type::Vec => Sort::Vec,
        }
    }

    pub fn from_sort(s: Sort) -> Type {
        match s {
            Sort::Int => Type::Int,
            Sort::Bool => Type::Bool,
            Sort::Set => Type::Set,
            Sort::Vec => Type::Vec,
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.sort().fmt(f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Eq,
    Lt,
    Le,
    And,
    Or,
    In,
    Union,
    Inter,
    Diff,
    /// Annotation only.
    Subset,
    /// Annotation only.
    Implies,
    /// Annotation only.
    Iff,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        use BinOp::*;
        match self {
            Add => "+",
            Sub => "-",
            Mul => "*",
            Div => "div",
            Mod => "mod",
            Eq => "=",
            Lt => "<",
            Le => "<=",
            And => "and",
            Or => "or",
            In => "in",
            Union => "union",
            Inter => "inter",
            Diff => "diff",
            Subset => "subset",
            Implies => "==>",
            Iff => "<==>",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        use BinOp::*;
        match self {
            Iff => 1,
            Implies => 2,
            Or => 3,
            And => 4,
            Eq | Lt | Le | In | Subset => 6,
            Add | Sub | Union | Diff => 7,
            Mul | Div | Mod | Inter => 8,
        }
    }

    pub fn annotation_only(self) -> bool {
        matches!(self, BinOp::Subset | BinOp::Implies | BinOp::Iff)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Int(i64),
    Bool(bool),
    Var(String),
    Not(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// `{e1, ..., ek}`; `{}` is the empty set.
    SetLit(Vec<Expr>),
    Index(Box<Expr>, Box<Expr>),
    Len(Box<Expr>),
    Card(Box<Expr>),
    NewVec(Box<Expr>),
    Read,
    Call(String, Vec<Expr>),
    /// `\result`; annotation only.
    Result,
    /// `\old(x)`; annotation only.
    Old(String),
    /// `forall i :: body` over integers; annotation only.
    Forall(String, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
    /// Filled in by the type checker.
    pub ty: Option<Type>,
}

impl Expr {
    pub fn new(kind: ExprKind, pos: Pos) -> Expr {
        Expr {
            kind,
            pos,
            ty: None,
        }
    }

    pub fn ty(&self) -> Type {
        self.ty.expect("expression has been type checked")
    }

    pub fn children(&self) -> Vec<&Expr> {
        use ExprKind::*;
        match &self.kind {
            Int(_) | Bool(_) | Var(_) | Read | Result | Old(_) => vec![],
            Not(a) | Len(a) | Card(a) | NewVec(a) | Forall(_, a) => vec![a],
            Binary(_, a, b) | Index(a, b) => vec![a, b],
            SetLit(es) | Call(_, es) => es.iter().collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StmtKind {
    VarDecl(String, Type, Expr),
    Assign(String, Expr),
    /// `v[i] := e`
    VecStore(String, Expr, Expr),
    If(Expr, Vec<Stmt>, Vec<Stmt>),
    /// Condition, invariant, body.
    While(Expr, Expr, Vec<Stmt>),
    Assert(Expr),
    Return(Option<Expr>),
    Print(Expr),
    /// A call to a function without a result.
    Call(String, Vec<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub ty: Type,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionDecl {
    pub name: String,
    pub params: Vec<Param>,
    pub ret: Option<Type>,
    /// Several `requires` clauses are conjoined; `None` means `true`.
    pub requires: Option<Expr>,
    pub ensures: Option<Expr>,
    pub body: Vec<Stmt>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SourceProgram {
    pub functions: Vec<FunctionDecl>,
}

impl SourceProgram {
    pub fn function(&self, name: &str) -> Option<&FunctionDecl> {
        self.functions.iter().find(|f| f.name == name)
    }
}

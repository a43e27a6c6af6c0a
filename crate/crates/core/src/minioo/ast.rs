use indexmap::IndexMap;

use crate::text::SourceSpan;

/// Name of the implicit root class.
pub const ROOT_CLASS: &str = "Object";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    /// `<=`
    Leq,
    /// `-`
    Sub,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Leq => "<=",
            BinOp::Sub => "-",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Var(String),
    Int(i64),
    Bool(bool),
    Null,
    This,
    New {
        class: String,
        args: Vec<Expr>,
    },
    FieldAcc {
        target: Box<Expr>,
        field: String,
    },
    Invoke {
        target: Box<Expr>,
        method: String,
        args: Vec<Expr>,
    },
    If {
        cond: Box<Expr>,
        then: Box<Expr>,
        els: Box<Expr>,
    },
    BinOp {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
}

/// An expression node. Equality ignores spans.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: SourceSpan,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for Expr {}

impl Expr {
    pub fn new(kind: ExprKind) -> Self {
        Expr {
            kind,
            span: SourceSpan::default(),
        }
    }

    pub fn var(name: &str) -> Self {
        Expr::new(ExprKind::Var(name.to_string()))
    }

    pub fn int(i: i64) -> Self {
        Expr::new(ExprKind::Int(i))
    }

    pub fn new_object(class: &str, args: Vec<Expr>) -> Self {
        Expr::new(ExprKind::New {
            class: class.to_string(),
            args,
        })
    }

    pub fn field(target: Expr, field: &str) -> Self {
        Expr::new(ExprKind::FieldAcc {
            target: Box::new(target),
            field: field.to_string(),
        })
    }

    pub fn invoke(target: Expr, method: &str, args: Vec<Expr>) -> Self {
        Expr::new(ExprKind::Invoke {
            target: Box::new(target),
            method: method.to_string(),
            args,
        })
    }

    /// Source variables in order of first occurrence; `this` excluded.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match &self.kind {
            ExprKind::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            ExprKind::Int(_) | ExprKind::Bool(_) | ExprKind::Null | ExprKind::This => {}
            ExprKind::New { args, .. } => args.iter().for_each(|a| a.collect_vars(out)),
            ExprKind::FieldAcc { target, .. } => target.collect_vars(out),
            ExprKind::Invoke { target, args, .. } => {
                target.collect_vars(out);
                args.iter().for_each(|a| a.collect_vars(out));
            }
            ExprKind::If { cond, then, els } => {
                cond.collect_vars(out);
                then.collect_vars(out);
                els.collect_vars(out);
            }
            ExprKind::BinOp { lhs, rhs, .. } => {
                lhs.collect_vars(out);
                rhs.collect_vars(out);
            }
        }
    }

    /// Number of `If` nodes.
    pub fn if_count(&self) -> usize {
        let own = usize::from(matches!(self.kind, ExprKind::If { .. }));
        own + self.children().iter().map(|c| c.if_count()).sum::<usize>()
    }

    pub fn children(&self) -> Vec<&Expr> {
        match &self.kind {
            ExprKind::Var(_) | ExprKind::Int(_) | ExprKind::Bool(_) | ExprKind::Null | ExprKind::This => vec![],
            ExprKind::New { args, .. } => args.iter().collect(),
            ExprKind::FieldAcc { target, .. } => vec![target],
            ExprKind::Invoke { target, args, .. } => std::iter::once(&**target).chain(args).collect(),
            ExprKind::If { cond, then, els } => vec![cond, then, els],
            ExprKind::BinOp { lhs, rhs, .. } => vec![lhs, rhs],
        }
    }
}

#[derive(Debug, Clone)]
pub struct Constructor {
    pub params: Vec<String>,
    pub super_args: Vec<Expr>,
    /// `this.field = expr;` in source order.
    pub assignments: Vec<(String, Expr)>,
    pub span: SourceSpan,
}

impl PartialEq for Constructor {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params && self.super_args == other.super_args && self.assignments == other.assignments
    }
}

impl Eq for Constructor {}

#[derive(Debug, Clone)]
pub struct MethodDecl {
    pub name: String,
    /// Declared parameters; the receiver is implicit.
    pub params: Vec<String>,
    pub body: Expr,
    pub span: SourceSpan,
}

impl PartialEq for MethodDecl {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.params == other.params && self.body == other.body
    }
}

impl Eq for MethodDecl {}

#[derive(Debug, Clone)]
pub struct ClassDecl {
    pub name: String,
    pub parent: String,
    pub fields: Vec<String>,
    pub constructor: Constructor,
    pub methods: IndexMap<String, MethodDecl>,
    pub span: SourceSpan,
}

impl PartialEq for ClassDecl {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.parent == other.parent
            && self.fields == other.fields
            && self.constructor == other.constructor
            && self.methods == other.methods
    }
}

impl Eq for ClassDecl {}

/// Classes in declaration order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClassTable {
    pub classes: IndexMap<String, ClassDecl>,
}

impl ClassTable {
    pub fn get(&self, name: &str) -> Option<&ClassDecl> {
        self.classes.get(name)
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ClassDecl> {
        self.classes.values()
    }

    pub fn method_count(&self) -> usize {
        self.iter().map(|c| c.methods.len()).sum()
    }

    /// Fields of `class` including inherited ones, root first.
    pub fn all_fields(&self, class: &str) -> Vec<String> {
        let mut chain = Vec::new();
        let mut cur = self.get(class);
        while let Some(c) = cur {
            if chain.iter().any(|d: &&ClassDecl| d.name == c.name) {
                break;
            }
            chain.push(c);
            cur = self.get(&c.parent);
        }
        chain.iter().rev().flat_map(|c| c.fields.iter().cloned()).collect()
    }
}

use serde::Serialize;

use crate::logic::{ArithOp, CmpOp};

/// `object` is the implicit root of every type hierarchy.
pub const OBJECT: &str = "object";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum TypeExpr {
    Name(String),
    Either(Vec<String>),
}

impl TypeExpr {
    pub fn object() -> Self {
        TypeExpr::Name(OBJECT.into())
    }

    /// Primitive type names mentioned by the expression.
    pub fn names(&self) -> &[String] {
        match self {
            TypeExpr::Name(n) => std::slice::from_ref(n),
            TypeExpr::Either(ns) => ns,
        }
    }

    /// True when every object satisfies the expression.
    pub fn is_trivial(&self) -> bool {
        self.names().iter().any(|n| n == OBJECT)
    }
}

/// A name (variable without its `?`, object, or type) with its type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Typed {
    pub name: String,
    pub ty: TypeExpr,
}

/// Predicate or function signature.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decl {
    pub name: String,
    pub params: Vec<Typed>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Arg {
    Var(String),
    Name(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FHead {
    pub name: String,
    pub args: Vec<Arg>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum NumExpr {
    Number(f64),
    Func(FHead),
    Neg(Box<NumExpr>),
    Bin(ArithOp, Box<NumExpr>, Box<NumExpr>),
}

/// Goal description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Gd {
    Atom { pred: String, args: Vec<Arg> },
    /// Equality between two object terms.
    Equal(Arg, Arg),
    Cmp(CmpOp, NumExpr, NumExpr),
    Not(Box<Gd>),
    And(Vec<Gd>),
    Or(Vec<Gd>),
    Imply(Box<Gd>, Box<Gd>),
    Exists(Vec<Typed>, Box<Gd>),
    Forall(Vec<Typed>, Box<Gd>),
}

impl Gd {
    pub fn truth() -> Gd {
        Gd::And(Vec::new())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AssignOp {
    Assign,
    Increase,
    Decrease,
    ScaleUp,
    ScaleDown,
}

impl AssignOp {
    pub fn keyword(self) -> &'static str {
        match self {
            AssignOp::Assign => "assign",
            AssignOp::Increase => "increase",
            AssignOp::Decrease => "decrease",
            AssignOp::ScaleUp => "scale-up",
            AssignOp::ScaleDown => "scale-down",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Some(match s {
            "assign" => AssignOp::Assign,
            "increase" => AssignOp::Increase,
            "decrease" => AssignOp::Decrease,
            "scale-up" => AssignOp::ScaleUp,
            "scale-down" => AssignOp::ScaleDown,
            _ => return None,
        })
    }

    /// Arithmetic combining the old value with the operand; `None` for `assign`.
    pub fn arith(self) -> Option<ArithOp> {
        match self {
            AssignOp::Assign => None,
            AssignOp::Increase => Some(ArithOp::Add),
            AssignOp::Decrease => Some(ArithOp::Sub),
            AssignOp::ScaleUp => Some(ArithOp::Mul),
            AssignOp::ScaleDown => Some(ArithOp::Div),
        }
    }
}

/// Instantaneous effect of an action or event.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Effect {
    And(Vec<Effect>),
    Add { pred: String, args: Vec<Arg> },
    Del { pred: String, args: Vec<Arg> },
    Num { op: AssignOp, head: FHead, value: NumExpr },
    Forall(Vec<Typed>, Box<Effect>),
    When(Gd, Box<Effect>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum SchemaKind {
    Action,
    Event,
    Process,
}

impl SchemaKind {
    pub fn keyword(self) -> &'static str {
        match self {
            SchemaKind::Action => ":action",
            SchemaKind::Event => ":event",
            SchemaKind::Process => ":process",
        }
    }
}

/// `(increase head (* #t rate))` inside a process effect.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProcessRate {
    pub head: FHead,
    pub rate: NumExpr,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Schema {
    pub kind: SchemaKind,
    pub name: String,
    pub params: Vec<Typed>,
    pub precondition: Gd,
    /// Effect of an action or event; empty for processes.
    pub effect: Effect,
    /// Continuous effects of a process; empty for actions and events.
    pub rates: Vec<ProcessRate>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Domain {
    pub name: String,
    pub requirements: Vec<String>,
    /// `(T, TE)` pairs in declaration order.
    pub types: Vec<Typed>,
    pub constants: Vec<Typed>,
    pub predicates: Vec<Decl>,
    pub functions: Vec<Decl>,
    pub actions: Vec<Schema>,
    pub events: Vec<Schema>,
    pub processes: Vec<Schema>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum InitFact {
    Atom { pred: String, args: Vec<String> },
    Value { func: String, args: Vec<String>, value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Til {
    pub time: f64,
    pub positive: bool,
    pub pred: String,
    pub args: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Problem {
    pub name: String,
    pub domain: String,
    pub requirements: Vec<String>,
    pub objects: Vec<Typed>,
    pub init: Vec<InitFact>,
    pub tils: Vec<Til>,
    pub goal: Gd,
}

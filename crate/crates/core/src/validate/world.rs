use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::classify::{FnClass, PredClass, SymbolTable};
use crate::pddl::{InitFact, PlanningInstance, TypeExpr};

/// A predicate, fluent or function symbol (SC spelling) applied to
/// objects.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct GroundAtom {
    pub symbol: String,
    pub args: Vec<String>,
}

impl GroundAtom {
    pub fn new(symbol: impl Into<String>, args: Vec<String>) -> Self {
        GroundAtom { symbol: symbol.into(), args }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            write!(f, "{}", self.symbol)
        } else {
            write!(f, "({} {})", self.symbol, self.args.join(" "))
        }
    }
}

/// The rigid part of an instance: objects and their types, static facts
/// and values, and the ground instances of the changing functions.
#[derive(Debug, Clone)]
pub struct World {
    pub objects: Vec<String>,
    /// SC type predicate to its members.
    members: BTreeMap<String, BTreeSet<String>>,
    statics: BTreeSet<GroundAtom>,
    static_values: BTreeMap<GroundAtom, f64>,
    /// Ground temporal fluents; positions index evolution components.
    pub temporal: Vec<GroundAtom>,
    temporal_index: BTreeMap<GroundAtom, usize>,
    /// Ground functional fluents.
    pub dynamic: Vec<GroundAtom>,
}

/// Object tuples satisfying the parameter types, in declaration order.
pub fn tuples(inst: &PlanningInstance, types: &[TypeExpr]) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    for ty in types {
        let members = inst.members(ty);
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<String>| {
                members.iter().map(move |m| {
                    let mut t = prefix.clone();
                    t.push(m.clone());
                    t
                })
            })
            .collect();
    }
    out
}

impl World {
    pub fn new(inst: &PlanningInstance, table: &SymbolTable) -> Self {
        let objects: Vec<String> = inst.objects.keys().cloned().collect();
        let mut members: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for o in &objects {
            for ty in inst.object_types(o) {
                members.entry(table.sc(&ty).to_string()).or_default().insert(o.clone());
            }
        }
        let mut statics = BTreeSet::new();
        let mut static_values = BTreeMap::new();
        for f in &inst.problem.init {
            match f {
                InitFact::Atom { pred, args } if table.pred_class(pred) == Some(PredClass::Static) => {
                    statics.insert(GroundAtom::new(table.sc(pred), args.clone()));
                }
                InitFact::Value { func, args, value } if table.fn_class(func) == Some(FnClass::Static) => {
                    static_values.entry(GroundAtom::new(table.sc(func), args.clone())).or_insert(*value);
                }
                _ => {}
            }
        }
        let ground = |class: FnClass| -> Vec<GroundAtom> {
            inst.domain
                .functions
                .iter()
                .filter(|d| table.fn_class(&d.name) == Some(class))
                .flat_map(|d| {
                    let types: Vec<TypeExpr> = d.params.iter().map(|p| p.ty.clone()).collect();
                    tuples(inst, &types).into_iter().map(|t| GroundAtom::new(table.sc(&d.name), t)).collect::<Vec<_>>()
                })
                .collect()
        };
        let temporal = ground(FnClass::Temporal);
        let temporal_index = temporal.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        World { objects, members, statics, static_values, temporal, temporal_index, dynamic: ground(FnClass::Dynamic) }
    }

    pub fn has_type(&self, ty: &str, obj: &str) -> bool {
        self.members.get(ty).is_some_and(|m| m.contains(obj))
    }

    pub fn static_holds(&self, atom: &GroundAtom) -> bool {
        self.statics.contains(atom)
    }

    pub fn static_value(&self, atom: &GroundAtom) -> Option<f64> {
        self.static_values.get(atom).copied()
    }

    pub fn temporal_index(&self, atom: &GroundAtom) -> Option<usize> {
        self.temporal_index.get(atom).copied()
    }
}

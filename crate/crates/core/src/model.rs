//! Problem instances and the flat integer constraint systems they compile to.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = "min")]
    Minimize,
    #[serde(rename = "max")]
    Maximize,
}

impl Sense {
    pub fn as_str(self) -> &'static str {
        match self {
            Sense::Minimize => "min",
            Sense::Maximize => "max",
        }
    }

    /// `a` is at least as good as `b`.
    pub fn at_least_as_good(self, a: i64, b: i64) -> bool {
        match self {
            Sense::Minimize => a <= b,
            Sense::Maximize => a >= b,
        }
    }

    pub fn strictly_better(self, a: i64, b: i64) -> bool {
        a != b && self.at_least_as_good(a, b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemClass {
    BinPacking,
    Jobshop,
    Knapsack,
}

impl ProblemClass {
    pub const ALL: [ProblemClass; 3] = [ProblemClass::BinPacking, ProblemClass::Jobshop, ProblemClass::Knapsack];

    pub fn name(self) -> &'static str {
        match self {
            ProblemClass::BinPacking => "bin-packing",
            ProblemClass::Jobshop => "jobshop",
            ProblemClass::Knapsack => "knapsack",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    pub fn sense(self) -> Sense {
        match self {
            ProblemClass::BinPacking | ProblemClass::Jobshop => Sense::Minimize,
            ProblemClass::Knapsack => Sense::Maximize,
        }
    }
}

impl fmt::Display for ProblemClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An instance parameter: a scalar, a list or a list of lists of integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Int(i64),
    List(Vec<i64>),
    Nested(Vec<Vec<i64>>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub id: String,
    pub class: ProblemClass,
    pub params: BTreeMap<String, ParamValue>,
    pub objective_lb: i64,
    pub objective_ub: i64,
    pub known_optimum: Option<i64>,
}

impl Instance {
    pub fn sense(&self) -> Sense {
        self.class.sense()
    }

    /// Checks the domain invariants and the class-specific parameter set.
    pub fn validate(&self) -> Result<()> {
        if self.objective_lb > self.objective_ub {
            return Err(Error::validation(
                "objective_lb",
                format!("objective_lb {} exceeds objective_ub {}", self.objective_lb, self.objective_ub),
            ));
        }
        if let Some(z) = self.known_optimum {
            if z < self.objective_lb || z > self.objective_ub {
                return Err(Error::validation(
                    "known_optimum",
                    format!("{z} outside {}..{}", self.objective_lb, self.objective_ub),
                ));
            }
        }
        crate::compile::check_params(self)
    }

    pub fn param(&self, name: &str) -> Result<&ParamValue> {
        self.params.get(name).ok_or_else(|| Error::validation(name, "missing"))
    }

    pub fn int_param(&self, name: &str) -> Result<i64> {
        match self.param(name)? {
            ParamValue::Int(v) => Ok(*v),
            _ => Err(Error::validation(name, "expected an integer")),
        }
    }

    pub fn list_param(&self, name: &str) -> Result<&[i64]> {
        match self.param(name)? {
            ParamValue::List(v) => Ok(v),
            // serde picks `List` for `[]`, but accept an empty nested list too
            ParamValue::Nested(v) if v.is_empty() => Ok(&[]),
            _ => Err(Error::validation(name, "expected a list of integers")),
        }
    }

    pub fn nested_param(&self, name: &str) -> Result<&[Vec<i64>]> {
        match self.param(name)? {
            ParamValue::Nested(v) => Ok(v),
            ParamValue::List(v) if v.is_empty() => Ok(&[]),
            _ => Err(Error::validation(name, "expected a list of integer lists")),
        }
    }

    /// Scaled position of the known optimum inside the original domain.
    pub fn scaled_optimum(&self) -> Option<f64> {
        self.known_optimum.map(|z| crate::loss::Scaler::new(self.objective_lb, self.objective_ub).scale(z))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarId(pub usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Closed integer interval `lb..=ub`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Domain {
    pub lb: i64,
    pub ub: i64,
}

impl Domain {
    pub fn new(lb: i64, ub: i64) -> Self {
        Domain { lb, ub }
    }

    pub fn is_empty(&self) -> bool {
        self.lb > self.ub
    }

    pub fn is_fixed(&self) -> bool {
        self.lb == self.ub
    }

    /// Number of values; 0 when empty.
    pub fn size(&self) -> u64 {
        if self.is_empty() {
            0
        } else {
            (self.ub - self.lb) as u64 + 1
        }
    }

    pub fn contains(&self, v: i64) -> bool {
        self.lb <= v && v <= self.ub
    }

    pub fn intersect(&self, other: Domain) -> Domain {
        Domain::new(self.lb.max(other.lb), self.ub.min(other.ub))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub domain: Domain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

/// `sum(coeff * var) relation rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Linear {
    pub terms: Vec<(i64, VarId)>,
    pub relation: Relation,
    pub rhs: i64,
}

impl Linear {
    pub fn new(terms: Vec<(i64, VarId)>, relation: Relation, rhs: i64) -> Self {
        Linear { terms, relation, rhs }
    }

    pub fn le(terms: Vec<(i64, VarId)>, rhs: i64) -> Self {
        Self::new(terms, Relation::Le, rhs)
    }

    pub fn eq(terms: Vec<(i64, VarId)>, rhs: i64) -> Self {
        Self::new(terms, Relation::Eq, rhs)
    }

    pub fn ge(terms: Vec<(i64, VarId)>, rhs: i64) -> Self {
        Self::new(terms, Relation::Ge, rhs)
    }

    pub fn evaluate(&self, assignment: &[i64]) -> i128 {
        self.terms.iter().map(|&(c, v)| i128::from(c) * i128::from(assignment[v.0])).sum()
    }

    pub fn holds(&self, assignment: &[i64]) -> bool {
        let lhs = self.evaluate(assignment);
        let rhs = i128::from(self.rhs);
        match self.relation {
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Constraint {
    Linear(Linear),
    /// At least one of the two sides holds.
    Disjunction(Linear, Linear),
}

impl Constraint {
    pub fn holds(&self, assignment: &[i64]) -> bool {
        match self {
            Constraint::Linear(l) => l.holds(assignment),
            Constraint::Disjunction(a, b) => a.holds(assignment) || b.holds(assignment),
        }
    }

    pub fn linears(&self) -> impl Iterator<Item = &Linear> {
        let (a, b) = match self {
            Constraint::Linear(l) => (l, None),
            Constraint::Disjunction(l, r) => (l, Some(r)),
        };
        core::iter::once(a).chain(b)
    }

    /// Distinct variables mentioned by the constraint.
    pub fn arity(&self) -> usize {
        let mut vars: Vec<VarId> = self.linears().flat_map(|l| l.terms.iter().map(|t| t.1)).collect();
        vars.sort_unstable();
        vars.dedup();
        vars.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatModel {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub objective: VarId,
    pub sense: Sense,
}

impl FlatModel {
    pub fn domains(&self) -> Vec<Domain> {
        self.variables.iter().map(|v| v.domain).collect()
    }

    pub fn objective_domain(&self) -> Domain {
        self.variables[self.objective.0].domain
    }

    pub fn validate(&self) -> Result<()> {
        for v in &self.variables {
            if v.domain.is_empty() {
                return Err(Error::validation(v.name.clone(), "empty domain"));
            }
        }
        if self.objective.0 >= self.variables.len() {
            return Err(Error::validation("objective", "undeclared objective variable"));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            for l in c.linears() {
                if l.terms.is_empty() {
                    return Err(Error::validation(format!("constraint {i}"), "no terms"));
                }
                for &(coeff, var) in &l.terms {
                    if coeff == 0 {
                        return Err(Error::validation(format!("constraint {i}"), "zero coefficient"));
                    }
                    if var.0 >= self.variables.len() {
                        return Err(Error::validation(format!("constraint {i}"), "undeclared variable"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Full assignment check: domains and all constraints.
    pub fn is_solution(&self, assignment: &[i64]) -> bool {
        assignment.len() == self.variables.len()
            && self.variables.iter().zip(assignment).all(|(v, &x)| v.domain.contains(x))
            && self.constraints.iter().all(|c| c.holds(assignment))
    }
}

/// Incremental construction of a [`FlatModel`].
#[derive(Debug, Default)]
pub struct ModelBuilder {
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
}

impl ModelBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn var(&mut self, name: impl ToString, lb: i64, ub: i64) -> VarId {
        self.variables.push(Variable { name: name.to_string(), domain: Domain::new(lb, ub) });
        VarId(self.variables.len() - 1)
    }

    pub fn post(&mut self, c: Linear) {
        self.constraints.push(Constraint::Linear(c));
    }

    pub fn post_either(&mut self, a: Linear, b: Linear) {
        self.constraints.push(Constraint::Disjunction(a, b));
    }

    pub fn build(self, objective: VarId, sense: Sense) -> FlatModel {
        FlatModel { variables: self.variables, constraints: self.constraints, objective, sense }
    }
}

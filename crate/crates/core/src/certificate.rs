//! Named bound values with their parameters and, when computed, the
//! oracle value they must dominate.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::matrix::IndexSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FormulaId {
    SddPairwise,
    Sdd1Epsilon,
    Sdd1Schur,
    SSdd1Schur,
    DetHuang,
    DetNew,
    LcpB1,
}

impl FormulaId {
    pub fn name(self) -> &'static str {
        match self {
            FormulaId::SddPairwise => "SDD_PAIRWISE",
            FormulaId::Sdd1Epsilon => "SDD1_EPSILON",
            FormulaId::Sdd1Schur => "SDD1_SCHUR",
            FormulaId::SSdd1Schur => "S_SDD1_SCHUR",
            FormulaId::DetHuang => "DET_HUANG",
            FormulaId::DetNew => "DET_NEW",
            FormulaId::LcpB1 => "LCP_B1",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Param {
    Real(f64),
    Integer(u64),
    Flag(bool),
    Set(IndexSet),
    /// 1-based permutation.
    Ordering(Vec<usize>),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCertificate {
    pub formula: FormulaId,
    pub value: f64,
    pub params: BTreeMap<String, Param>,
    pub exact_value: Option<f64>,
    /// `value - exact_value`.
    pub slack: Option<f64>,
}

impl BoundCertificate {
    pub fn new(formula: FormulaId, value: f64) -> Self {
        Self {
            formula,
            value,
            params: BTreeMap::new(),
            exact_value: None,
            slack: None,
        }
    }

    pub fn with_param(mut self, name: &str, value: Param) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn real(&self, name: &str) -> Option<f64> {
        match self.params.get(name) {
            Some(Param::Real(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn attach_exact(&mut self, exact: f64) {
        self.exact_value = Some(exact);
        self.slack = Some(self.value - exact);
    }

    pub fn with_exact(mut self, exact: f64) -> Self {
        self.attach_exact(exact);
        self
    }

    /// True when no oracle value is attached or `value >= exact - tol`.
    pub fn is_sound(&self, tol: f64) -> bool {
        self.slack.is_none_or(|s| s >= -tol)
    }
}

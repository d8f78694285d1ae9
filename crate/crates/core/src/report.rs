//! Exact residual reports.

use serde::Serialize;

use crate::linalg::Mat;
use crate::ore::OreOp;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub identity: String,
    pub residual: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    pub all_pass: bool,
}

impl VerificationReport {
    pub fn new() -> Self {
        VerificationReport {
            checks: Vec::new(),
            all_pass: true,
        }
    }

    pub fn push(&mut self, name: &str, identity: &str, residual: String, pass: bool) {
        self.all_pass &= pass;
        self.checks.push(Check {
            name: name.to_string(),
            identity: identity.to_string(),
            residual,
            pass,
        });
    }

    pub fn push_mat(&mut self, name: &str, identity: &str, residual: &Mat) {
        self.push(name, identity, residual.to_string(), residual.is_zero());
    }

    pub fn push_op(&mut self, name: &str, identity: &str, residual: &OreOp) {
        self.push(name, identity, residual.to_string(), residual.is_zero());
    }

    pub fn extend(&mut self, other: VerificationReport) {
        for c in other.checks {
            self.all_pass &= c.pass;
            self.checks.push(c);
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

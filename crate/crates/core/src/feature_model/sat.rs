//! A small DPLL solver with Tseitin encoding, used as the satisfiability
//! oracle over feature diagrams.

use std::collections::{BTreeMap, BTreeSet};

use super::{boolean_form, FeatureDiagram, FeatureExpr, FeatureModelError, Product};

/// Literal: `+v` or `-v` for variable `v >= 1`.
type Lit = i32;

#[derive(Debug, Clone, Default)]
struct Cnf {
    num_vars: usize,
    clauses: Vec<Vec<Lit>>,
}

impl Cnf {
    fn fresh(&mut self) -> Lit {
        self.num_vars += 1;
        self.num_vars as Lit
    }
}

struct Solver<'a> {
    clauses: &'a [Vec<Lit>],
    values: Vec<Option<bool>>,
    trail: Vec<usize>,
}

impl<'a> Solver<'a> {
    fn new(cnf: &'a Cnf) -> Self {
        Solver { clauses: &cnf.clauses, values: vec![None; cnf.num_vars + 1], trail: Vec::new() }
    }

    fn value(&self, lit: Lit) -> Option<bool> {
        self.values[lit.unsigned_abs() as usize].map(|v| v == (lit > 0))
    }

    fn assign(&mut self, lit: Lit) {
        let var = lit.unsigned_abs() as usize;
        self.values[var] = Some(lit > 0);
        self.trail.push(var);
    }

    fn undo(&mut self, mark: usize) {
        for var in self.trail.drain(mark..) {
            self.values[var] = None;
        }
    }

    /// Unit propagation to fixpoint; false on conflict.
    fn propagate(&mut self) -> bool {
        loop {
            let mut changed = false;
            for clause in self.clauses {
                let mut unassigned = None;
                let mut open = 0;
                let mut satisfied = false;
                for &lit in clause {
                    match self.value(lit) {
                        Some(true) => {
                            satisfied = true;
                            break;
                        }
                        Some(false) => {}
                        None => {
                            open += 1;
                            unassigned = Some(lit);
                        }
                    }
                }
                if satisfied {
                    continue;
                }
                match open {
                    0 => return false,
                    1 => {
                        self.assign(unassigned.unwrap());
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn search(&mut self) -> bool {
        let mark = self.trail.len();
        if !self.propagate() {
            self.undo(mark);
            return false;
        }
        let Some(var) = (1..self.values.len()).find(|&v| self.values[v].is_none()) else {
            return true;
        };
        for lit in [-(var as Lit), var as Lit] {
            let decision = self.trail.len();
            self.assign(lit);
            if self.search() {
                return true;
            }
            self.undo(decision);
        }
        self.undo(mark);
        false
    }

    fn solve(mut self) -> Option<Vec<bool>> {
        if self.search() {
            Some(self.values.iter().map(|v| v.unwrap_or(false)).collect())
        } else {
            None
        }
    }
}

/// Tseitin encoder over a fixed block of named variables.
#[derive(Debug, Clone)]
struct Encoder {
    cnf: Cnf,
    vars: BTreeMap<String, Lit>,
    constant_true: Option<Lit>,
}

impl Encoder {
    fn new<'n>(names: impl IntoIterator<Item = &'n str>) -> Self {
        let mut cnf = Cnf::default();
        let mut vars = BTreeMap::new();
        for name in names {
            let v = cnf.fresh();
            vars.insert(name.to_string(), v);
        }
        Encoder { cnf, vars, constant_true: None }
    }

    fn truth(&mut self) -> Lit {
        if let Some(t) = self.constant_true {
            return t;
        }
        let t = self.cnf.fresh();
        self.cnf.clauses.push(vec![t]);
        self.constant_true = Some(t);
        t
    }

    fn literal(&mut self, e: &FeatureExpr) -> Result<Lit, FeatureModelError> {
        Ok(match e {
            FeatureExpr::True => self.truth(),
            FeatureExpr::False => -self.truth(),
            FeatureExpr::Var(name) => *self
                .vars
                .get(name)
                .ok_or_else(|| FeatureModelError::UnknownFeature(name.clone()))?,
            FeatureExpr::Not(inner) => -self.literal(inner)?,
            FeatureExpr::And(parts) | FeatureExpr::Or(parts) => {
                let conjunction = matches!(e, FeatureExpr::And(_));
                let lits = parts.iter().map(|p| self.literal(p)).collect::<Result<Vec<_>, _>>()?;
                let gate = self.cnf.fresh();
                // And: gate -> each, all -> gate. Or is the dual.
                let sign = if conjunction { 1 } else { -1 };
                let mut closing = vec![sign * gate];
                for &l in &lits {
                    self.cnf.clauses.push(vec![-sign * gate, sign * l]);
                    closing.push(-sign * l);
                }
                self.cnf.clauses.push(closing);
                gate
            }
        })
    }

    fn assert(&mut self, e: &FeatureExpr) -> Result<(), FeatureModelError> {
        match e {
            FeatureExpr::And(parts) => parts.iter().try_for_each(|p| self.assert(p)),
            FeatureExpr::Or(parts) => {
                let clause = parts.iter().map(|p| self.literal(p)).collect::<Result<Vec<_>, _>>()?;
                self.cnf.clauses.push(clause);
                Ok(())
            }
            other => {
                let l = self.literal(other)?;
                self.cnf.clauses.push(vec![l]);
                Ok(())
            }
        }
    }
}

/// Satisfiability oracle for `boolean_form(d) && e` queries on one diagram.
///
/// The diagram is encoded once; each query extends a copy of that encoding.
#[derive(Debug, Clone)]
pub struct SatOracle {
    features: Vec<String>,
    base: Encoder,
}

impl SatOracle {
    pub fn new(diagram: &FeatureDiagram) -> Self {
        let mut base = Encoder::new(diagram.features().iter().map(String::as_str));
        base.assert(&boolean_form(diagram).simplify())
            .expect("boolean form only names diagram features");
        SatOracle { features: diagram.features().to_vec(), base }
    }

    fn encode(&self, e: &FeatureExpr) -> Result<Encoder, FeatureModelError> {
        let mut enc = self.base.clone();
        enc.assert(&e.simplify())?;
        Ok(enc)
    }

    pub fn is_satisfiable(&self, e: &FeatureExpr) -> Result<bool, FeatureModelError> {
        let enc = self.encode(e)?;
        Ok(Solver::new(&enc.cnf).solve().is_some())
    }

    /// All products of the diagram satisfying `e`, enumerated by repeated
    /// solving with blocking clauses over the feature variables only.
    pub fn products(&self, e: &FeatureExpr) -> Result<BTreeSet<Product>, FeatureModelError> {
        let mut enc = self.encode(e)?;
        let mut out = BTreeSet::new();
        while let Some(model) = Solver::new(&enc.cnf).solve() {
            let product: Product = self
                .features
                .iter()
                .filter(|f| model[enc.vars[f.as_str()] as usize])
                .cloned()
                .collect();
            let blocking = self
                .features
                .iter()
                .map(|f| {
                    let v = enc.vars[f.as_str()];
                    if model[v as usize] { -v } else { v }
                })
                .collect();
            enc.cnf.clauses.push(blocking);
            out.insert(product);
        }
        Ok(out)
    }
}

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScalarId(pub usize);

/// A single decision variable: a free scalar or an upper-triangle entry of a PSD block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Scalar(usize),
    Entry { block: usize, row: usize, col: usize },
}

impl Var {
    /// Entry `(i, j)` of a symmetric block, stored as its upper-triangle twin.
    pub fn entry(block: BlockId, i: usize, j: usize) -> Var {
        let (row, col) = if i <= j { (i, j) } else { (j, i) };
        Var::Entry {
            block: block.0,
            row,
            col,
        }
    }

    pub fn scalar(id: ScalarId) -> Var {
        Var::Scalar(id.0)
    }
}

/// Affine functional `constant + Σ coeff · var`. A coefficient on an off-diagonal
/// entry multiplies the matrix element itself (which appears twice in the matrix).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinExpr {
    terms: BTreeMap<Var, f64>,
    pub constant: f64,
}

impl LinExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self {
            terms: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn var(v: Var) -> Self {
        let mut e = Self::new();
        e.add(v, 1.0);
        e
    }

    pub fn add(&mut self, v: Var, c: f64) {
        if c == 0.0 {
            return;
        }
        let slot = self.terms.entry(v).or_insert(0.0);
        *slot += c;
        if *slot == 0.0 {
            self.terms.remove(&v);
        }
    }

    /// `self += s · other`.
    pub fn add_scaled(&mut self, other: &LinExpr, s: f64) {
        if s == 0.0 {
            return;
        }
        for (&v, &c) in &other.terms {
            self.add(v, s * c);
        }
        self.constant += s * other.constant;
    }

    pub fn scaled(&self, s: f64) -> LinExpr {
        let mut out = LinExpr::new();
        out.add_scaled(self, s);
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (Var, f64)> + '_ {
        self.terms.iter().map(|(&v, &c)| (v, c))
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    /// Value at a given assignment.
    pub fn eval(&self, blocks: &[nalgebra::DMatrix<f64>], scalars: &[f64]) -> f64 {
        self.constant
            + self
                .terms
                .iter()
                .map(|(v, c)| {
                    c * match *v {
                        Var::Scalar(i) => scalars[i],
                        Var::Entry { block, row, col } => blocks[block][(row, col)],
                    }
                })
                .sum::<f64>()
    }
}

/// `minimize objective` subject to linear equalities, with PSD matrix blocks
/// and free scalars as variables.
#[derive(Clone, Debug, Default)]
pub struct ConicProblem {
    blocks: Vec<(String, usize)>,
    scalars: Vec<String>,
    objective: LinExpr,
    equalities: Vec<(LinExpr, f64)>,
}

impl ConicProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_psd_block(&mut self, name: impl Into<String>, size: usize) -> BlockId {
        self.blocks.push((name.into(), size));
        BlockId(self.blocks.len() - 1)
    }

    pub fn add_scalar(&mut self, name: impl Into<String>) -> ScalarId {
        self.scalars.push(name.into());
        ScalarId(self.scalars.len() - 1)
    }

    pub fn set_objective(&mut self, e: LinExpr) {
        self.objective = e;
    }

    /// Adds `e = rhs`; any constant inside `e` is moved to the right-hand side.
    pub fn add_equality(&mut self, mut e: LinExpr, rhs: f64) {
        let rhs = rhs - e.constant;
        e.constant = 0.0;
        self.equalities.push((e, rhs));
    }

    /// `Tr(block)` as a functional.
    pub fn trace_expr(&self, b: BlockId) -> LinExpr {
        let mut e = LinExpr::new();
        for i in 0..self.blocks[b.0].1 {
            e.add(Var::entry(b, i, i), 1.0);
        }
        e
    }

    pub fn blocks(&self) -> &[(String, usize)] {
        &self.blocks
    }

    pub fn block_size(&self, b: BlockId) -> usize {
        self.blocks[b.0].1
    }

    pub fn scalars(&self) -> &[String] {
        &self.scalars
    }

    pub fn objective(&self) -> &LinExpr {
        &self.objective
    }

    pub fn equalities(&self) -> &[(LinExpr, f64)] {
        &self.equalities
    }

    /// Number of scalar decision variables (free scalars plus upper triangles).
    pub fn num_variables(&self) -> usize {
        self.scalars.len() + self.blocks.iter().map(|(_, n)| n * (n + 1) / 2).sum::<usize>()
    }

    /// Checks that every functional references declared variables only.
    pub fn validate(&self) -> Result<()> {
        let check = |e: &LinExpr| -> Result<()> {
            for (v, c) in e.terms() {
                if !c.is_finite() {
                    return Err(Error::InvalidArgument(format!("non-finite coefficient on {v:?}")));
                }
                match v {
                    Var::Scalar(i) if i >= self.scalars.len() => {
                        return Err(Error::InvalidArgument(format!("undeclared scalar {i}")))
                    }
                    Var::Entry { block, row, col } => {
                        let size = self
                            .blocks
                            .get(block)
                            .ok_or_else(|| Error::InvalidArgument(format!("undeclared block {block}")))?
                            .1;
                        if row > col || col >= size {
                            return Err(Error::InvalidArgument(format!(
                                "entry ({row},{col}) invalid for block {block} of size {size}"
                            )));
                        }
                    }
                    _ => {}
                }
            }
            Ok(())
        };
        check(&self.objective)?;
        for (e, rhs) in &self.equalities {
            check(e)?;
            if !rhs.is_finite() {
                return Err(Error::InvalidArgument("non-finite right-hand side".into()));
            }
        }
        Ok(())
    }

    /// Sparse triplet listing for cross-checking with external SDP tools.
    pub fn to_json(&self) -> ProblemJson {
        ProblemJson {
            blocks: self
                .blocks
                .iter()
                .map(|(name, size)| BlockJson {
                    name: name.clone(),
                    size: *size,
                })
                .collect(),
            scalars: self.scalars.clone(),
            objective: FunctionalJson::from_expr(&self.objective, None),
            equalities: self
                .equalities
                .iter()
                .map(|(e, rhs)| FunctionalJson::from_expr(e, Some(*rhs)))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProblemJson {
    pub blocks: Vec<BlockJson>,
    pub scalars: Vec<String>,
    pub objective: FunctionalJson,
    pub equalities: Vec<FunctionalJson>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockJson {
    pub name: String,
    pub size: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FunctionalJson {
    pub constant: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<f64>,
    pub terms: Vec<TripletJson>,
}

/// One `(block, row, col, coeff)` triplet; free scalars use `scalar` instead.
#[derive(Clone, Debug, Serialize)]
pub struct TripletJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub row: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub col: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scalar: Option<usize>,
    pub coeff: f64,
}

impl FunctionalJson {
    fn from_expr(e: &LinExpr, rhs: Option<f64>) -> Self {
        let terms = e
            .terms()
            .map(|(v, coeff)| match v {
                Var::Scalar(i) => TripletJson {
                    block: None,
                    row: None,
                    col: None,
                    scalar: Some(i),
                    coeff,
                },
                Var::Entry { block, row, col } => TripletJson {
                    block: Some(block),
                    row: Some(row),
                    col: Some(col),
                    scalar: None,
                    coeff,
                },
            })
            .collect();
        Self {
            constant: e.constant,
            rhs,
            terms,
        }
    }
}

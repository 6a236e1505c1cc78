//! Round-off machines: straight-line programs run with a strict relative
//! error below `δ` on every input and every operation, together with the
//! closed-form `δ(x, ε)` bounds, condition numbers and cost model.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream, Domain};

/// Sign patterns are enumerated exhaustively up to this many perturbation sites.
pub const CORNER_SITES_MAX: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

impl Op {
    fn name(self) -> &'static str {
        match self {
            Op::Add => "add",
            Op::Sub => "sub",
            Op::Mul => "mul",
            Op::Div => "div",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ref {
    Input(usize),
    Node(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub op: Op,
    pub left: Ref,
    pub right: Ref,
}

/// Straight-line program; the last node is the output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slp {
    pub arity: usize,
    pub nodes: Vec<Node>,
}

impl Slp {
    pub fn new(arity: usize, nodes: Vec<Node>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Parse("program has no computation nodes".into()));
        }
        for (i, n) in nodes.iter().enumerate() {
            for r in [n.left, n.right] {
                match r {
                    Ref::Input(j) if j >= arity => return Err(Error::Parse(format!("node {i} reads x{j} beyond arity {arity}"))),
                    Ref::Node(j) if j >= i => return Err(Error::Parse(format!("node {i} reads node {j} before it is computed"))),
                    _ => {}
                }
            }
        }
        Ok(Slp { arity, nodes })
    }

    /// `x0 · x1 · … · x_{n−1}`, multiplied left to right.
    pub fn product_chain(n: usize) -> Result<Self> {
        Self::chain(n, Op::Mul)
    }

    /// `x0 + x1 + … + x_{n−1}`, added left to right.
    pub fn sum_chain(n: usize) -> Result<Self> {
        Self::chain(n, Op::Add)
    }

    fn chain(n: usize, op: Op) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput("a chain needs at least two inputs".into()));
        }
        let mut nodes = vec![Node {
            op,
            left: Ref::Input(0),
            right: Ref::Input(1),
        }];
        for i in 2..n {
            nodes.push(Node {
                op,
                left: Ref::Node(nodes.len() - 1),
                right: Ref::Input(i),
            });
        }
        Slp::new(n, nodes)
    }

    /// Sum of the nonnegative inputs `a`, sum of the negative inputs `b`,
    /// then `a + b`; the split follows the signs of `x`.
    pub fn split_sum(x: &[f64]) -> Result<Self> {
        if x.len() < 2 {
            return Err(Error::InvalidInput("a sum needs at least two inputs".into()));
        }
        let pos: Vec<usize> = (0..x.len()).filter(|&i| x[i] >= 0.0).collect();
        let neg: Vec<usize> = (0..x.len()).filter(|&i| x[i] < 0.0).collect();
        let mut nodes = Vec::new();
        let partial = |idx: &[usize], nodes: &mut Vec<Node>| -> Option<Ref> {
            let mut acc = Ref::Input(*idx.first()?);
            for &i in &idx[1..] {
                nodes.push(Node {
                    op: Op::Add,
                    left: acc,
                    right: Ref::Input(i),
                });
                acc = Ref::Node(nodes.len() - 1);
            }
            Some(acc)
        };
        let a = partial(&pos, &mut nodes);
        let b = partial(&neg, &mut nodes);
        // with one-signed input the chain already ends in the total
        if let (Some(a), Some(b)) = (a, b) {
            nodes.push(Node {
                op: Op::Add,
                left: a,
                right: b,
            });
        }
        Slp::new(x.len(), nodes)
    }

    /// Number of perturbation sites: every input and every node.
    pub fn sites(&self) -> usize {
        self.arity + self.nodes.len()
    }

    /// Evaluate with relative perturbations `e` (length `sites()`): inputs
    /// first, then nodes in order.
    fn eval_with(&self, x: &[f64], e: Option<&[f64]>) -> Result<(Vec<f64>, Vec<f64>)> {
        let pert = |k: usize, v: f64| match e {
            Some(e) if e[k] != 0.0 => v * (1.0 + e[k]),
            _ => v,
        };
        let inputs: Vec<f64> = x.iter().enumerate().map(|(k, &v)| pert(k, v)).collect();
        let mut vals: Vec<f64> = Vec::with_capacity(self.nodes.len());
        for (i, n) in self.nodes.iter().enumerate() {
            let get = |r: Ref| match r {
                Ref::Input(j) => inputs[j],
                Ref::Node(j) => vals[j],
            };
            let (a, b) = (get(n.left), get(n.right));
            let v = match n.op {
                Op::Add => a + b,
                Op::Sub => a - b,
                Op::Mul => a * b,
                Op::Div => {
                    if b == 0.0 {
                        return Err(Error::IllPosed(format!("division by zero at node {i}")));
                    }
                    a / b
                }
            };
            vals.push(pert(self.arity + i, v));
        }
        Ok((inputs, vals))
    }

    /// Unperturbed value.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_arity(x)?;
        let (_, vals) = self.eval_with(x, None)?;
        Ok(*vals.last().expect("nonempty program"))
    }

    fn check_arity(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.arity {
            return Err(Error::Shape(format!("program takes {} inputs, got {}", self.arity, x.len())));
        }
        Ok(())
    }
}

impl fmt::Display for Slp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "inputs {}", self.arity)?;
        let name = |r: Ref| match r {
            Ref::Input(j) => format!("x{j}"),
            Ref::Node(j) => format!("n{j}"),
        };
        for (i, n) in self.nodes.iter().enumerate() {
            writeln!(f, "n{i} = {} {} {}", n.op.name(), name(n.left), name(n.right))?;
        }
        Ok(())
    }
}

/// Text format: one node per line, `n3 = mul n1 n2`; inputs are `x0, x1, …`;
/// an optional `inputs N` line fixes the arity (otherwise the largest input
/// index read, plus one). `#` starts a comment. The last node is the output.
impl FromStr for Slp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut names: HashMap<String, usize> = HashMap::new();
        let mut nodes = Vec::new();
        let mut declared: Option<usize> = None;
        let mut max_input: Option<usize> = None;
        for (ln, raw) in s.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: &str| Error::Parse(format!("line {}: {m}", ln + 1));
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks[0] == "inputs" {
                let n = toks.get(1).and_then(|t| t.parse().ok()).ok_or_else(|| err("expected `inputs N`"))?;
                declared = Some(n);
                continue;
            }
            if toks.len() != 5 || toks[1] != "=" {
                return Err(err("expected `name = op left right`"));
            }
            let op = match toks[2] {
                "add" | "+" => Op::Add,
                "sub" | "-" => Op::Sub,
                "mul" | "*" => Op::Mul,
                "div" | "/" => Op::Div,
                o => return Err(err(&format!("unknown operation `{o}`"))),
            };
            let mut operand = |t: &str| -> Result<Ref> {
                if let Some(j) = t.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
                    max_input = Some(max_input.map_or(j, |m| m.max(j)));
                    return Ok(Ref::Input(j));
                }
                names.get(t).map(|&j| Ref::Node(j)).ok_or_else(|| err(&format!("`{t}` is used before it is defined")))
            };
            let left = operand(toks[3])?;
            let right = operand(toks[4])?;
            let name = toks[0].to_string();
            if name.starts_with('x') && name[1..].parse::<usize>().is_ok() {
                return Err(err("node names may not shadow inputs"));
            }
            if names.insert(name, nodes.len()).is_some() {
                return Err(err("node defined twice"));
            }
            nodes.push(Node { op, left, right });
        }
        let inferred = max_input.map_or(0, |m| m + 1);
        let arity = declared.unwrap_or(inferred);
        if arity < inferred {
            return Err(Error::Parse(format!("declared {arity} inputs but x{} is read", inferred - 1)));
        }
        Slp::new(arity, nodes)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum PerturbationMode {
    /// Each relative error uniform in `(−δ, δ)`.
    RandomUniform,
    /// Each relative error `±δ⁻` (the largest double below `δ`) with a
    /// random sign.
    RandomSign,
    /// Worst relative output error over `trials` runs: every sign corner
    /// first when there are at most `CORNER_SITES_MAX` sites, then
    /// alternating random-sign corners and uniform draws.
    AdversarialSearch { trials: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationModel {
    pub delta: f64,
    #[serde(flatten)]
    pub mode: PerturbationMode,
}

impl PerturbationModel {
    pub fn new(delta: f64, mode: PerturbationMode) -> Result<Self> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::InvalidInput(format!("δ = {delta} is outside [0, 1]")));
        }
        Ok(PerturbationModel { delta, mode })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunTrace {
    pub output: f64,
    pub exact: f64,
    /// `|output − exact| / |exact|` (`0` when both vanish).
    pub rel_error: f64,
    /// Inputs after perturbation.
    pub inputs: Vec<f64>,
    pub node_values: Vec<f64>,
    /// Number of computation steps.
    pub t: usize,
    pub delta: f64,
    /// `T · (max_i ht(y⁽ⁱ⁾) + |ln δ|)`, with `y⁽ⁱ⁾` the register vector
    /// (inputs and the first `i` node values) after step `i`.
    pub cost: f64,
    /// Runs performed (above one for adversarial search).
    pub trials: usize,
}

/// Largest double strictly below `delta` (zero stays zero).
fn strictly_below(delta: f64) -> f64 {
    if delta > 0.0 {
        f64::from_bits(delta.to_bits() - 1)
    } else {
        0.0
    }
}

/// `T · (max_i ht(y⁽ⁱ⁾) + |ln δ|)` recomputed from the trace.
pub fn trace_cost(inputs: &[f64], node_values: &[f64], delta: f64) -> f64 {
    let t = node_values.len();
    let mut maxc = inputs.iter().map(|&v| ht(v)).fold(0.0, f64::max);
    let mut best = inputs.len() as f64 * maxc;
    for (i, &v) in node_values.iter().enumerate() {
        maxc = maxc.max(ht(v));
        best = best.max((inputs.len() + i + 1) as f64 * maxc);
    }
    t as f64 * (best + delta.ln().abs())
}

fn rel_error(out: f64, exact: f64) -> f64 {
    if exact == 0.0 {
        if out == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (out - exact).abs() / exact.abs()
    }
}

/// Run `slp` on `x` as a round-off machine with parameter `model`.
pub fn run_perturbed(slp: &Slp, x: &[f64], model: &PerturbationModel, seed: u64) -> Result<RunTrace> {
    slp.check_arity(x)?;
    let exact = slp.eval(x)?;
    let m = slp.sites();
    let d = strictly_below(model.delta);
    let one = |e: &[f64]| -> Result<RunTrace> {
        let (inputs, vals) = slp.eval_with(x, Some(e))?;
        let output = *vals.last().expect("nonempty program");
        Ok(RunTrace {
            output,
            exact,
            rel_error: rel_error(output, exact),
            cost: trace_cost(&inputs, &vals, model.delta),
            inputs,
            node_values: vals,
            t: slp.nodes.len(),
            delta: model.delta,
            trials: 1,
        })
    };
    let uniform = |r: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
        (0..m)
            .map(|_| if d > 0.0 { r.random_range(-d..=d) } else { 0.0 })
            .collect()
    };
    let signs = |r: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> { (0..m).map(|_| if r.random::<bool>() { d } else { -d }).collect() };
    match model.mode {
        PerturbationMode::RandomUniform => one(&uniform(&mut stream(seed, Domain::Roundoff, 0))),
        PerturbationMode::RandomSign => one(&signs(&mut stream(seed, Domain::Roundoff, 0))),
        PerturbationMode::AdversarialSearch { trials } => {
            if trials == 0 {
                return Err(Error::InvalidInput("adversarial search needs trials > 0".into()));
            }
            let corners = if m <= CORNER_SITES_MAX { (1usize << m).min(trials) } else { 0 };
            let mut worst: Option<RunTrace> = None;
            for k in 0..trials {
                let e: Vec<f64> = if k < corners {
                    (0..m).map(|s| if (k >> s) & 1 == 1 { d } else { -d }).collect()
                } else {
                    let mut r = stream(seed, Domain::Roundoff, k as u64);
                    if k % 2 == 0 {
                        signs(&mut r)
                    } else {
                        uniform(&mut r)
                    }
                };
                let tr = one(&e)?;
                if worst.as_ref().map_or(true, |w| tr.rel_error > w.rel_error) {
                    worst = Some(tr);
                }
            }
            let mut w = worst.expect("trials > 0");
            w.trials = trials;
            Ok(w)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    ProductN,
    SumPair,
    SumNNonneg,
    SumN,
}

impl FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "product-n" => Ok(BoundKind::ProductN),
            "sum-pair" => Ok(BoundKind::SumPair),
            "sum-n-nonneg" => Ok(BoundKind::SumNNonneg),
            "sum-n" => Ok(BoundKind::SumN),
            _ => Err(Error::Parse(format!("unknown bound kind `{s}`"))),
        }
    }
}

impl BoundKind {
    /// The program whose round-off behaviour the bound describes.
    pub fn program(self, x: &[f64]) -> Result<Slp> {
        match self {
            BoundKind::ProductN => Slp::product_chain(x.len()),
            BoundKind::SumPair => Slp::sum_chain(2),
            BoundKind::SumNNonneg => Slp::sum_chain(x.len()),
            BoundKind::SumN => Slp::split_sum(x),
        }
    }

    fn is_sum(self) -> bool {
        !matches!(self, BoundKind::ProductN)
    }
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `δ(x, ε)` guaranteeing relative output error below `ε`:
/// `ε/(4n − 2)` for products, `|x + y| ε / (3√2 √(x² + y²))` for a pair sum,
/// `ε/(2n)` for nonnegative sums and `|Σx| ε / (6√2 n^{3/2} ‖x‖)` in general.
pub fn delta_bound(kind: BoundKind, x: &[f64], epsilon: f64) -> Result<f64> {
    let n = x.len();
    if n == 0 {
        return Err(Error::InvalidInput("empty input".into()));
    }
    let s: f64 = x.iter().sum();
    if kind.is_sum() && s == 0.0 {
        return Err(Error::IllPosed("Σx = 0 lies on the ill-posed set of the sum".into()));
    }
    let nf = n as f64;
    match kind {
        BoundKind::ProductN => Ok(epsilon / (4.0 * nf - 2.0)),
        BoundKind::SumPair => {
            if n != 2 {
                return Err(Error::Shape("sum-pair takes two inputs".into()));
            }
            Ok(s.abs() / (3.0 * 2f64.sqrt() * norm2(x)) * epsilon)
        }
        BoundKind::SumNNonneg => {
            if x.iter().any(|&v| v < 0.0) {
                return Err(Error::InvalidInput("sum-n-nonneg needs nonnegative inputs".into()));
            }
            Ok(epsilon / (2.0 * nf))
        }
        BoundKind::SumN => Ok(s.abs() / (6.0 * 2f64.sqrt() * nf.powf(1.5) * norm2(x)) * epsilon),
    }
}

/// Componentwise condition number `κ_f(x)` of the product or the sum.
pub fn kappa(kind: BoundKind, x: &[f64]) -> f64 {
    if kind.is_sum() {
        let s: f64 = x.iter().sum();
        if s == 0.0 {
            return f64::INFINITY;
        }
        (x.len() as f64).sqrt() * norm2(x) / s.abs()
    } else {
        if x.contains(&0.0) {
            return f64::INFINITY;
        }
        norm2(x) * x.iter().map(|v| 1.0 / (v * v)).sum::<f64>().sqrt()
    }
}

/// Posedness `π_f(x) = d(x, Σ_f)/‖x‖`.
pub fn posedness(kind: BoundKind, x: &[f64]) -> f64 {
    let nx = norm2(x);
    if nx == 0.0 {
        return 0.0;
    }
    if kind.is_sum() {
        let s: f64 = x.iter().sum();
        s.abs() / ((x.len() as f64).sqrt() * nx)
    } else {
        x.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min) / nx
    }
}

/// `K_f(x) = max(κ_f(x), π_f(x)^{-1})`.
pub fn k_value(kind: BoundKind, x: &[f64]) -> f64 {
    kappa(kind, x).max(1.0 / posedness(kind, x))
}

/// `1` at zero, `1 + ln(1 + |ln|x||)` otherwise.
pub fn ht(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        1.0 + (1.0 + x.abs().ln().abs()).ln()
    }
}

/// `n · max_j ht(x_j)`.
pub fn ht_vec(x: &[f64]) -> f64 {
    x.len() as f64 * x.iter().map(|&v| ht(v)).fold(0.0, f64::max)
}

/// `ht(x) + |ln ε| + ln(K + 1)`.
pub fn input_size(x: &[f64], epsilon: f64, k: f64) -> f64 {
    ht_vec(x) + epsilon.ln().abs() + (k + 1.0).ln()
}

/// `|(1 + u/n)^n − 1| ≤ 2|u|` for `|u| ≤ 1`.
pub fn sandwich_check(u: f64, n: u32) -> bool {
    ((1.0 + u / n as f64).powi(n as i32) - 1.0).abs() <= 2.0 * u.abs()
}

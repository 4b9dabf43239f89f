use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::Result;
use crate::scalar::tape::Tape;
use crate::scalar::Point;

/// A chart variable: base coordinate `x^{axis+1}` or the fibre coordinate `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Base(usize),
    Fibre,
}

/// Unary functions understood by [`ScalarExpr`]. `LnAbs` is `ln|u|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    LnAbs,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::LnAbs => "ln",
            Func::Sqrt => "sqrt",
        }
    }
}

/// Expression nodes. Negation is stored as a `-1` coefficient in a product
/// and a quotient `a / b` as `a * b^-1`, so like terms merge uniformly.
#[derive(Debug)]
pub enum Node {
    Const(f64),
    Coord(usize),
    Fibre,
    Sum(Vec<ScalarExpr>),
    Product(Vec<ScalarExpr>),
    Pow(ScalarExpr, i32),
    Apply(Func, ScalarExpr),
}

#[derive(Debug)]
struct Inner {
    node: Node,
    hash: u64,
    // bit i: x^{i+1} occurs (axes past 62 share bit 62); bit 63: t occurs
    vars: u64,
}

const FIBRE_BIT: u64 = 1 << 63;

fn axis_bit(i: usize) -> u64 {
    1 << i.min(62)
}

/// Immutable, cheaply clonable closed-form scalar field on a chart.
///
/// Constructors simplify eagerly: constants fold, `0`/`1` identities apply,
/// sums merge like terms and products merge integer powers of equal bases.
/// Children of sums and products are kept in a canonical order, so two
/// expressions that differ only by reordering compare equal structurally.
#[derive(Clone)]
pub struct ScalarExpr(Arc<Inner>);

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn mix(h: u64, v: u64) -> u64 {
    let mut h = h;
    for b in v.to_le_bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

fn rank(node: &Node) -> u8 {
    match node {
        Node::Const(_) => 0,
        Node::Coord(_) => 1,
        Node::Fibre => 2,
        Node::Pow(..) => 3,
        Node::Apply(..) => 4,
        Node::Product(_) => 5,
        Node::Sum(_) => 6,
    }
}

fn canonical_key(e: &ScalarExpr) -> (u8, usize, u64) {
    let secondary = match e.node() {
        Node::Coord(i) => *i,
        Node::Pow(b, _) => match b.node() {
            Node::Coord(i) => *i,
            Node::Fibre => usize::MAX,
            _ => 0,
        },
        _ => 0,
    };
    (rank(e.node()), secondary, e.0.hash)
}

impl ScalarExpr {
    fn from_node(node: Node) -> Self {
        let hash = match &node {
            Node::Const(c) => mix(mix(FNV_OFFSET, 1), c.to_bits()),
            Node::Coord(i) => mix(mix(FNV_OFFSET, 2), *i as u64),
            Node::Fibre => mix(FNV_OFFSET, 3),
            Node::Sum(ts) => ts.iter().fold(mix(FNV_OFFSET, 4), |h, t| mix(h, t.0.hash)),
            Node::Product(fs) => fs.iter().fold(mix(FNV_OFFSET, 5), |h, f| mix(h, f.0.hash)),
            Node::Pow(b, n) => mix(mix(mix(FNV_OFFSET, 6), b.0.hash), *n as i64 as u64),
            Node::Apply(f, a) => mix(mix(mix(FNV_OFFSET, 7), *f as u64), a.0.hash),
        };
        let vars = match &node {
            Node::Const(_) => 0,
            Node::Coord(i) => axis_bit(*i),
            Node::Fibre => FIBRE_BIT,
            Node::Sum(xs) | Node::Product(xs) => xs.iter().fold(0, |m, x| m | x.0.vars),
            Node::Pow(b, _) => b.0.vars,
            Node::Apply(_, a) => a.0.vars,
        };
        ScalarExpr(Arc::new(Inner { node, hash, vars }))
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    pub fn structural_hash(&self) -> u64 {
        self.0.hash
    }

    pub fn constant(c: f64) -> Self {
        // normalise -0.0 so that hashing and equality agree
        let c = if c == 0.0 { 0.0 } else { c };
        Self::from_node(Node::Const(c))
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    /// Base coordinate `x^{axis+1}` (axes are zero-based).
    pub fn coord(axis: usize) -> Self {
        Self::from_node(Node::Coord(axis))
    }

    /// Fibre coordinate `t`.
    pub fn fibre() -> Self {
        Self::from_node(Node::Fibre)
    }

    pub fn var(v: Var) -> Self {
        match v {
            Var::Base(a) => Self::coord(a),
            Var::Fibre => Self::fibre(),
        }
    }

    pub fn as_const(&self) -> Option<f64> {
        match self.node() {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    pub fn is_one(&self) -> bool {
        self.as_const() == Some(1.0)
    }

    pub fn sum<I: IntoIterator<Item = ScalarExpr>>(terms: I) -> Self {
        let mut constant = 0.0;
        let mut keys: Vec<(ScalarExpr, f64)> = Vec::new();
        let mut index: HashMap<u64, Vec<usize>> = HashMap::new();
        let mut stack: Vec<ScalarExpr> = terms.into_iter().collect();
        stack.reverse();
        while let Some(t) = stack.pop() {
            match t.node() {
                Node::Const(c) => constant += c,
                Node::Sum(inner) => stack.extend(inner.iter().rev().cloned()),
                _ => {
                    let (coef, key) = t.split_coefficient();
                    let slot = index.entry(key.0.hash).or_default();
                    match slot.iter().find(|&&i| keys[i].0 == key) {
                        Some(&i) => keys[i].1 += coef,
                        None => {
                            slot.push(keys.len());
                            keys.push((key, coef));
                        }
                    }
                }
            }
        }
        let mut out: Vec<ScalarExpr> = keys
            .into_iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|(k, c)| k.scaled(c))
            .collect();
        if constant != 0.0 {
            out.push(Self::constant(constant));
        }
        match out.len() {
            0 => Self::zero(),
            1 => out.pop().unwrap(),
            _ => {
                out.sort_by_key(canonical_key);
                Self::from_node(Node::Sum(out))
            }
        }
    }

    pub fn product<I: IntoIterator<Item = ScalarExpr>>(factors: I) -> Self {
        let mut coef = 1.0;
        let mut bases: Vec<(ScalarExpr, i32)> = Vec::new();
        let mut index: HashMap<u64, Vec<usize>> = HashMap::new();
        let mut stack: Vec<ScalarExpr> = factors.into_iter().collect();
        stack.reverse();
        while let Some(f) = stack.pop() {
            match f.node() {
                Node::Const(c) => coef *= c,
                Node::Product(inner) => stack.extend(inner.iter().rev().cloned()),
                _ => {
                    let (base, exp) = match f.node() {
                        Node::Pow(b, n) => (b.clone(), *n),
                        _ => (f.clone(), 1),
                    };
                    let slot = index.entry(base.0.hash).or_default();
                    match slot.iter().find(|&&i| bases[i].0 == base) {
                        Some(&i) => bases[i].1 += exp,
                        None => {
                            slot.push(bases.len());
                            bases.push((base, exp));
                        }
                    }
                }
            }
        }
        if coef == 0.0 {
            return Self::zero();
        }
        let mut out: Vec<ScalarExpr> = bases
            .into_iter()
            .filter(|(_, e)| *e != 0)
            .map(|(b, e)| Self::pow_raw(b, e))
            .collect();
        out.sort_by_key(canonical_key);
        if out.is_empty() {
            return Self::constant(coef);
        }
        if coef == 1.0 && out.len() == 1 {
            return out.pop().unwrap();
        }
        if coef != 1.0 {
            out.insert(0, Self::constant(coef));
        }
        Self::from_node(Node::Product(out))
    }

    fn pow_raw(base: ScalarExpr, n: i32) -> Self {
        if n == 1 {
            base
        } else {
            Self::from_node(Node::Pow(base, n))
        }
    }

    /// Integer power with the usual simplifications.
    pub fn powi(&self, n: i32) -> Self {
        if n == 0 {
            return Self::one();
        }
        if n == 1 {
            return self.clone();
        }
        match self.node() {
            Node::Const(c) if *c != 0.0 || n > 0 => Self::constant(c.powi(n)),
            Node::Pow(b, m) => match m.checked_mul(n) {
                Some(mn) => Self::product([Self::pow_raw(b.clone(), mn)]),
                None => Self::pow_raw(self.clone(), n),
            },
            Node::Product(fs) => Self::product(fs.iter().map(|f| f.powi(n))),
            _ => Self::pow_raw(self.clone(), n),
        }
    }

    pub fn apply(func: Func, arg: ScalarExpr) -> Self {
        if let Some(c) = arg.as_const() {
            let folded = match func {
                Func::Sin => Some(c.sin()),
                Func::Cos => Some(c.cos()),
                Func::Exp => Some(c.exp()),
                Func::LnAbs if c != 0.0 => Some(c.abs().ln()),
                Func::Sqrt if c >= 0.0 => Some(c.sqrt()),
                _ => None,
            };
            if let Some(v) = folded {
                return Self::constant(v);
            }
        }
        Self::from_node(Node::Apply(func, arg))
    }

    pub fn sin(&self) -> Self {
        Self::apply(Func::Sin, self.clone())
    }
    pub fn cos(&self) -> Self {
        Self::apply(Func::Cos, self.clone())
    }
    pub fn exp(&self) -> Self {
        Self::apply(Func::Exp, self.clone())
    }
    /// `ln|self|`.
    pub fn ln_abs(&self) -> Self {
        Self::apply(Func::LnAbs, self.clone())
    }
    pub fn sqrt(&self) -> Self {
        Self::apply(Func::Sqrt, self.clone())
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::product([Self::constant(c), self.clone()])
    }

    pub fn recip(&self) -> Self {
        self.powi(-1)
    }

    /// Splits `c * rest` into `(c, rest)`.
    fn split_coefficient(&self) -> (f64, ScalarExpr) {
        if let Node::Product(fs) = self.node() {
            if let Some(c) = fs[0].as_const() {
                let rest = if fs.len() == 2 {
                    fs[1].clone()
                } else {
                    Self::from_node(Node::Product(fs[1..].to_vec()))
                };
                return (c, rest);
            }
        }
        (1.0, self.clone())
    }

    /// Re-runs the rewrite rules bottom-up. Constructors already simplify, so
    /// this is mostly useful after building nodes by hand.
    pub fn simplify(&self) -> Self {
        match self.node() {
            Node::Const(_) | Node::Coord(_) | Node::Fibre => self.clone(),
            Node::Sum(ts) => Self::sum(ts.iter().map(|t| t.simplify())),
            Node::Product(fs) => Self::product(fs.iter().map(|f| f.simplify())),
            Node::Pow(b, n) => b.simplify().powi(*n),
            Node::Apply(f, a) => Self::apply(*f, a.simplify()),
        }
    }

    /// Value at `p`. Shared subexpressions are evaluated once.
    pub fn eval(&self, p: &Point) -> Result<f64> {
        let tape = Tape::compile(std::slice::from_ref(self));
        Ok(tape.eval(p)?[0])
    }

    /// Display form cut off after about `max` characters.
    pub fn brief(&self, max: usize) -> String {
        struct Capped {
            out: String,
            max: usize,
        }
        impl fmt::Write for Capped {
            fn write_str(&mut self, s: &str) -> fmt::Result {
                self.out.push_str(s);
                if self.out.len() > self.max {
                    Err(fmt::Error)
                } else {
                    Ok(())
                }
            }
        }
        let mut w = Capped { out: String::new(), max };
        if fmt::write(&mut w, format_args!("{self}")).is_err() {
            let mut cut = max.saturating_sub(3);
            while !w.out.is_char_boundary(cut) {
                cut -= 1;
            }
            w.out.truncate(cut);
            w.out.push_str("...");
        }
        w.out
    }

    /// Exact partial derivative along `var`.
    pub fn partial(&self, var: Var) -> Self {
        let mut memo = HashMap::new();
        self.partial_memo(var, &mut memo)
    }

    fn partial_memo(&self, var: Var, memo: &mut HashMap<*const Inner, ScalarExpr>) -> Self {
        let key = Arc::as_ptr(&self.0);
        if let Some(d) = memo.get(&key) {
            return d.clone();
        }
        let d = match self.node() {
            Node::Const(_) => Self::zero(),
            Node::Coord(i) => Self::constant(if var == Var::Base(*i) { 1.0 } else { 0.0 }),
            Node::Fibre => Self::constant(if var == Var::Fibre { 1.0 } else { 0.0 }),
            Node::Sum(ts) => Self::sum(ts.iter().map(|t| t.partial_memo(var, memo))),
            Node::Product(fs) => {
                let mut terms = Vec::with_capacity(fs.len());
                for (i, f) in fs.iter().enumerate() {
                    let df = f.partial_memo(var, memo);
                    if df.is_zero() {
                        continue;
                    }
                    let others = fs
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, g)| g.clone());
                    terms.push(Self::product(std::iter::once(df).chain(others)));
                }
                Self::sum(terms)
            }
            Node::Pow(b, n) => {
                let db = b.partial_memo(var, memo);
                if db.is_zero() {
                    Self::zero()
                } else {
                    Self::product([Self::constant(*n as f64), b.powi(n - 1), db])
                }
            }
            Node::Apply(f, a) => {
                let da = a.partial_memo(var, memo);
                if da.is_zero() {
                    Self::zero()
                } else {
                    let outer = match f {
                        Func::Sin => a.cos(),
                        Func::Cos => -a.sin(),
                        Func::Exp => self.clone(),
                        Func::LnAbs => a.recip(),
                        Func::Sqrt => self.recip().scaled(0.5),
                    };
                    Self::product([outer, da])
                }
            }
        };
        memo.insert(key, d.clone());
        d
    }

    /// Action of the Euler vector field `t d/dt`.
    pub fn euler_derivative(&self) -> Self {
        Self::product([Self::fibre(), self.partial(Var::Fibre)])
    }

    pub fn depends_on(&self, var: Var) -> bool {
        match var {
            Var::Fibre => self.0.vars & FIBRE_BIT != 0,
            Var::Base(i) if i >= 62 => self.max_axis().is_some_and(|m| m >= i),
            Var::Base(i) => self.0.vars & axis_bit(i) != 0,
        }
    }

    /// Largest base axis referenced, if any (saturating at 62).
    pub fn max_axis(&self) -> Option<usize> {
        let base = self.0.vars & !FIBRE_BIT;
        (base != 0).then(|| 63 - base.leading_zeros() as usize)
    }

    /// Replaces every occurrence of `var` with `with`.
    pub fn substitute(&self, var: Var, with: &ScalarExpr) -> Self {
        let mut memo = HashMap::new();
        self.substitute_memo(var, with, &mut memo)
    }

    fn substitute_memo(
        &self,
        var: Var,
        with: &ScalarExpr,
        memo: &mut HashMap<*const Inner, ScalarExpr>,
    ) -> Self {
        let key = Arc::as_ptr(&self.0);
        if let Some(s) = memo.get(&key) {
            return s.clone();
        }
        let s = match self.node() {
            Node::Const(_) => self.clone(),
            Node::Coord(i) if var == Var::Base(*i) => with.clone(),
            Node::Fibre if var == Var::Fibre => with.clone(),
            Node::Coord(_) | Node::Fibre => self.clone(),
            Node::Sum(ts) => Self::sum(ts.iter().map(|t| t.substitute_memo(var, with, memo))),
            Node::Product(fs) => Self::product(fs.iter().map(|f| f.substitute_memo(var, with, memo))),
            Node::Pow(b, n) => b.substitute_memo(var, with, memo).powi(*n),
            Node::Apply(f, a) => Self::apply(*f, a.substitute_memo(var, with, memo)),
        };
        memo.insert(key, s.clone());
        s
    }

    /// Expansion `sum_p t^p h_p(x)` with t-independent `h_p`, when the
    /// expression is a Laurent polynomial in `t`. Zero maps to an empty map.
    pub fn t_laurent(&self) -> Option<BTreeMap<i32, ScalarExpr>> {
        self.t_laurent_memo(&mut HashMap::new())
    }

    fn t_laurent_memo(&self, memo: &mut HashMap<*const Inner, Option<Laurent>>) -> Option<Laurent> {
        let key = Arc::as_ptr(&self.0);
        if let Some(l) = memo.get(&key) {
            return l.clone();
        }
        let l = self.t_laurent_node(memo);
        memo.insert(key, l.clone());
        l
    }

    fn t_laurent_node(&self, memo: &mut HashMap<*const Inner, Option<Laurent>>) -> Option<Laurent> {
        if !self.depends_on(Var::Fibre) {
            let mut m = BTreeMap::new();
            if !self.is_zero() {
                m.insert(0, self.clone());
            }
            return Some(m);
        }
        match self.node() {
            Node::Fibre => Some(BTreeMap::from([(1, Self::one())])),
            Node::Sum(ts) => {
                let mut acc: BTreeMap<i32, Vec<ScalarExpr>> = BTreeMap::new();
                for t in ts {
                    for (p, h) in t.t_laurent_memo(memo)? {
                        acc.entry(p).or_default().push(h);
                    }
                }
                Some(prune(acc.into_iter().map(|(p, hs)| (p, Self::sum(hs)))))
            }
            Node::Product(fs) => {
                let mut acc = BTreeMap::from([(0, Self::one())]);
                for f in fs {
                    acc = convolve(&acc, &f.t_laurent_memo(memo)?);
                }
                Some(acc)
            }
            Node::Pow(b, n) => {
                let base = b.t_laurent_memo(memo)?;
                if *n < 0 {
                    if base.len() != 1 {
                        return None;
                    }
                    let (p, h) = base.into_iter().next().unwrap();
                    Some(BTreeMap::from([(p * n, h.powi(*n))]))
                } else if *n <= 32 {
                    let mut acc = BTreeMap::from([(0, Self::one())]);
                    for _ in 0..*n {
                        acc = convolve(&acc, &base);
                    }
                    Some(acc)
                } else {
                    None
                }
            }
            // t-dependent transcendental argument
            _ => None,
        }
    }

    /// `(lambda, h)` with `self = t^lambda h(x)`, if the expression is a
    /// single t-monomial. Zero yields `None`.
    pub fn t_monomial(&self) -> Option<(i32, ScalarExpr)> {
        let m = self.t_laurent()?;
        if m.len() == 1 {
            m.into_iter().next()
        } else {
            None
        }
    }
}

type Laurent = BTreeMap<i32, ScalarExpr>;

fn prune<I: IntoIterator<Item = (i32, ScalarExpr)>>(it: I) -> BTreeMap<i32, ScalarExpr> {
    it.into_iter().filter(|(_, h)| !h.is_zero()).collect()
}

fn convolve(a: &BTreeMap<i32, ScalarExpr>, b: &BTreeMap<i32, ScalarExpr>) -> BTreeMap<i32, ScalarExpr> {
    let mut acc: BTreeMap<i32, Vec<ScalarExpr>> = BTreeMap::new();
    for (pa, ha) in a {
        for (pb, hb) in b {
            acc.entry(pa + pb).or_default().push(ha * hb);
        }
    }
    prune(acc.into_iter().map(|(p, hs)| (p, ScalarExpr::sum(hs))))
}

impl PartialEq for ScalarExpr {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        if self.0.hash != other.0.hash {
            return false;
        }
        match (self.node(), other.node()) {
            (Node::Const(a), Node::Const(b)) => a.to_bits() == b.to_bits(),
            (Node::Coord(a), Node::Coord(b)) => a == b,
            (Node::Fibre, Node::Fibre) => true,
            (Node::Sum(a), Node::Sum(b)) | (Node::Product(a), Node::Product(b)) => a == b,
            (Node::Pow(a, n), Node::Pow(b, m)) => n == m && a == b,
            (Node::Apply(f, a), Node::Apply(g, b)) => f == g && a == b,
            _ => false,
        }
    }
}

impl Eq for ScalarExpr {}

impl std::hash::Hash for ScalarExpr {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl From<f64> for ScalarExpr {
    fn from(c: f64) -> Self {
        ScalarExpr::constant(c)
    }
}

impl Default for ScalarExpr {
    fn default() -> Self {
        ScalarExpr::zero()
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<ScalarExpr> for ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, rhs: ScalarExpr) -> ScalarExpr {
                let f: fn(ScalarExpr, ScalarExpr) -> ScalarExpr = $body;
                f(self, rhs)
            }
        }
        impl $tr<&ScalarExpr> for &ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, rhs: &ScalarExpr) -> ScalarExpr {
                let f: fn(ScalarExpr, ScalarExpr) -> ScalarExpr = $body;
                f(self.clone(), rhs.clone())
            }
        }
        impl $tr<&ScalarExpr> for ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, rhs: &ScalarExpr) -> ScalarExpr {
                let f: fn(ScalarExpr, ScalarExpr) -> ScalarExpr = $body;
                f(self, rhs.clone())
            }
        }
        impl $tr<ScalarExpr> for &ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, rhs: ScalarExpr) -> ScalarExpr {
                let f: fn(ScalarExpr, ScalarExpr) -> ScalarExpr = $body;
                f(self.clone(), rhs)
            }
        }
        impl $tr<f64> for ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, rhs: f64) -> ScalarExpr {
                let f: fn(ScalarExpr, ScalarExpr) -> ScalarExpr = $body;
                f(self, ScalarExpr::constant(rhs))
            }
        }
        impl $tr<f64> for &ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, rhs: f64) -> ScalarExpr {
                let f: fn(ScalarExpr, ScalarExpr) -> ScalarExpr = $body;
                f(self.clone(), ScalarExpr::constant(rhs))
            }
        }
        impl $tr<ScalarExpr> for f64 {
            type Output = ScalarExpr;
            fn $m(self, rhs: ScalarExpr) -> ScalarExpr {
                let f: fn(ScalarExpr, ScalarExpr) -> ScalarExpr = $body;
                f(ScalarExpr::constant(self), rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| ScalarExpr::sum([a, b]));
binop!(Sub, sub, |a, b| ScalarExpr::sum([a, -b]));
binop!(Mul, mul, |a, b| ScalarExpr::product([a, b]));
binop!(Div, div, |a, b| ScalarExpr::product([a, b.recip()]));

impl Neg for ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        self.scaled(-1.0)
    }
}

impl Neg for &ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        self.scaled(-1.0)
    }
}

// Display precedence levels.
const PREC_SUM: u8 = 1;
const PREC_PRODUCT: u8 = 2;
const PREC_UNARY: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

fn fmt_const(c: f64) -> String {
    if c.fract() == 0.0 && c.abs() < 1e15 {
        format!("{}", c as i64)
    } else {
        format!("{c}")
    }
}

impl ScalarExpr {
    fn precedence(&self) -> u8 {
        match self.node() {
            Node::Const(c) if *c < 0.0 => PREC_UNARY,
            Node::Const(_) | Node::Coord(_) | Node::Fibre | Node::Apply(..) => PREC_ATOM,
            Node::Sum(_) => PREC_SUM,
            Node::Product(fs) => {
                if fs[0].as_const().is_some_and(|c| c < 0.0) {
                    PREC_UNARY
                } else {
                    PREC_PRODUCT
                }
            }
            Node::Pow(_, n) if *n < 0 => PREC_PRODUCT,
            Node::Pow(..) => PREC_POW,
        }
    }

    fn write_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "(")?;
            self.write_bare(f)?;
            write!(f, ")")
        } else {
            self.write_bare(f)
        }
    }

    fn write_bare(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(c) => write!(f, "{}", fmt_const(*c)),
            Node::Coord(i) => write!(f, "x{}", i + 1),
            Node::Fibre => write!(f, "t"),
            Node::Sum(ts) => {
                for (i, t) in ts.iter().enumerate() {
                    let (c, rest) = t.split_coefficient();
                    let negative = c < 0.0 || t.as_const().is_some_and(|v| v < 0.0);
                    if i == 0 {
                        t.write_prec(f, PREC_SUM)?;
                        continue;
                    }
                    if negative {
                        write!(f, " - ")?;
                        let pos = if let Some(v) = t.as_const() {
                            ScalarExpr::constant(-v)
                        } else {
                            rest.scaled(-c)
                        };
                        pos.write_prec(f, PREC_PRODUCT)?;
                    } else {
                        write!(f, " + ")?;
                        t.write_prec(f, PREC_PRODUCT)?;
                    }
                }
                Ok(())
            }
            Node::Product(_) | Node::Pow(_, _) => self.write_product(f),
            Node::Apply(func, a) => {
                write!(f, "{}(", func.name())?;
                a.write_bare(f)?;
                write!(f, ")")
            }
        }
    }

    fn write_product(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let factors: Vec<ScalarExpr> = match self.node() {
            Node::Product(fs) => fs.clone(),
            _ => vec![self.clone()],
        };
        let mut coef = 1.0;
        let mut num = Vec::new();
        let mut den = Vec::new();
        for x in factors {
            match x.node() {
                Node::Const(c) => coef *= c,
                Node::Pow(b, n) if *n < 0 => den.push(b.powi(-n)),
                _ => num.push(x),
            }
        }
        if coef < 0.0 {
            write!(f, "-")?;
            coef = -coef;
        }
        let mut first = true;
        if coef != 1.0 || num.is_empty() {
            write!(f, "{}", fmt_const(coef))?;
            first = false;
        }
        for x in &num {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            match x.node() {
                Node::Pow(b, n) => {
                    b.write_prec(f, PREC_ATOM)?;
                    write!(f, "^{n}")?;
                }
                _ => x.write_prec(f, PREC_POW)?,
            }
        }
        if !den.is_empty() {
            write!(f, "/")?;
            let d = ScalarExpr::product(den);
            let needs = !matches!(d.node(), Node::Coord(_) | Node::Fibre | Node::Apply(..) | Node::Pow(..));
            if needs {
                write!(f, "(")?;
            }
            match d.node() {
                Node::Pow(b, n) => {
                    b.write_prec(f, PREC_ATOM)?;
                    write!(f, "^{n}")?;
                }
                _ => d.write_bare(f)?,
            }
            if needs {
                write!(f, ")")?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.precedence() == PREC_UNARY {
            // a top-level negative product prints without parentheses
            return self.write_bare(f);
        }
        self.write_prec(f, PREC_SUM)
    }
}

impl fmt::Debug for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarExpr({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::{Error, EvalFault};

    fn x(i: usize) -> ScalarExpr {
        ScalarExpr::coord(i)
    }
    fn t() -> ScalarExpr {
        ScalarExpr::fibre()
    }
    fn pt(x: &[f64], t: f64) -> Point {
        Point::new(x.to_vec(), t).unwrap()
    }

    #[test]
    fn eval_basic() {
        assert_eq!(ScalarExpr::one().eval(&pt(&[0.3], 1.0)).unwrap(), 1.0);
        assert_eq!(x(0).eval(&pt(&[2.0], 3.0)).unwrap(), 2.0);
        assert_eq!((t() * x(0)).eval(&pt(&[2.0], -1.0)).unwrap(), -2.0);
    }

    #[test]
    fn eval_reports_offending_node() {
        let e = ScalarExpr::one() / (x(0) - 1.0);
        match e.eval(&pt(&[1.0], 1.0)) {
            Err(Error::Eval { fault: EvalFault::DivisionByZero, node }) => {
                assert!(node.contains("x1"), "{node}")
            }
            other => panic!("unexpected {other:?}"),
        }
        let l = x(0).ln_abs();
        assert!(matches!(
            l.eval(&pt(&[0.0], 1.0)),
            Err(Error::Eval { fault: EvalFault::LnOfZero, .. })
        ));
        assert!(matches!(
            x(3).eval(&pt(&[0.0], 1.0)),
            Err(Error::Eval { fault: EvalFault::CoordinateOutOfRange, .. })
        ));
    }

    #[test]
    fn power_rule_is_structural() {
        let d = t().powi(2).partial(Var::Fibre);
        assert_eq!(d, t() * 2.0);
    }

    #[test]
    fn sin_derivative() {
        assert_eq!(x(0).sin().partial(Var::Base(0)), x(0).cos());
        assert!(x(0).sin().partial(Var::Base(1)).is_zero());
    }

    #[test]
    fn euler_examples() {
        assert_eq!(t().powi(3).euler_derivative(), t().powi(3) * 3.0);
        assert!(x(0).euler_derivative().is_zero());
        assert!(t().ln_abs().euler_derivative().is_one());
    }

    #[test]
    fn like_terms_merge() {
        let e = &x(0) * &t() + &t() * &x(0) * 2.0 - &x(0) * &t() * 3.0;
        assert!(e.is_zero());
        let q = (&x(0) * &x(1)) / &x(0);
        assert_eq!(q, x(1));
        assert_eq!(x(0) + x(1), x(1) + x(0));
    }

    #[test]
    fn pow_distributes_over_products() {
        let e = (x(0) * 2.0).powi(2);
        assert_eq!(e, x(0).powi(2) * 4.0);
        assert_eq!(x(0).powi(2).powi(-1), x(0).powi(-2));
    }

    #[test]
    fn laurent_expansion() {
        let e = (t() + t().powi(2) * x(0)) * t().recip();
        let m = e.t_laurent().unwrap();
        assert_eq!(m.keys().copied().collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(m[&1], x(0));
        assert!(t().sin().t_laurent().is_none());
        assert_eq!(t().powi(3).t_monomial().unwrap().0, 3);
        assert!((t() + t().powi(2)).t_monomial().is_none());
        assert!(ScalarExpr::zero().t_laurent().unwrap().is_empty());
    }

    #[test]
    fn substitution() {
        let e = x(0).sin() * t();
        let s = e.substitute(Var::Fibre, &(t() * 2.0));
        let p = pt(&[0.4], 0.7);
        assert!((s.eval(&p).unwrap() - 2.0 * e.eval(&p).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn display_shapes() {
        assert_eq!((x(0) - x(1)).to_string(), "x1 - x2");
        assert_eq!((t().powi(2) * 3.0).to_string(), "3*t^2");
        assert_eq!((x(0) / t()).to_string(), "x1/t");
        assert_eq!((-x(0)).to_string(), "-x1");
        assert_eq!(x(0).ln_abs().to_string(), "ln(x1)");
    }
}

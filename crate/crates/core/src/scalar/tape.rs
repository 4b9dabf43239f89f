//! Straight-line evaluation of expression DAGs.
//!
//! Symbolic derivatives share subtrees heavily; walking them as trees costs
//! exponentially in the nesting depth. A [`Tape`] lists every distinct node
//! once in dependency order, so one evaluation is linear in the DAG size.

use std::collections::HashMap;

use crate::error::{Error, EvalFault, Result};
use crate::scalar::{Func, Node, Point, ScalarExpr};

#[derive(Clone, Copy, Debug)]
enum Op {
    Const(f64),
    Coord(usize),
    Fibre,
    Sum(u32, u32),
    Product(u32, u32),
    Pow(u32, i32),
    Apply(Func, u32),
}

/// Compiled evaluator for a batch of expressions.
#[derive(Clone, Debug)]
pub struct Tape {
    ops: Vec<Op>,
    args: Vec<u32>,
    nodes: Vec<ScalarExpr>,
    outputs: Vec<u32>,
}

impl Tape {
    pub fn compile(exprs: &[ScalarExpr]) -> Tape {
        let mut tape = Tape { ops: Vec::new(), args: Vec::new(), nodes: Vec::new(), outputs: Vec::new() };
        let mut seen = HashMap::new();
        for e in exprs {
            let slot = tape.push(e, &mut seen);
            tape.outputs.push(slot);
        }
        tape
    }

    fn push(&mut self, e: &ScalarExpr, seen: &mut HashMap<*const Node, u32>) -> u32 {
        let key = e.node() as *const Node;
        if let Some(&i) = seen.get(&key) {
            return i;
        }
        let op = match e.node() {
            Node::Const(c) => Op::Const(*c),
            Node::Coord(i) => Op::Coord(*i),
            Node::Fibre => Op::Fibre,
            Node::Sum(xs) | Node::Product(xs) => {
                let kids: Vec<u32> = xs.iter().map(|x| self.push(x, seen)).collect();
                let start = self.args.len() as u32;
                self.args.extend(kids);
                let end = self.args.len() as u32;
                if matches!(e.node(), Node::Sum(_)) {
                    Op::Sum(start, end)
                } else {
                    Op::Product(start, end)
                }
            }
            Node::Pow(b, n) => Op::Pow(self.push(b, seen), *n),
            Node::Apply(f, a) => Op::Apply(*f, self.push(a, seen)),
        };
        let i = self.ops.len() as u32;
        self.ops.push(op);
        self.nodes.push(e.clone());
        seen.insert(key, i);
        i
    }

    /// Number of distinct nodes.
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    fn fault(&self, fault: EvalFault, i: usize) -> Error {
        Error::Eval { fault, node: self.nodes[i].brief(96) }
    }

    /// Values of all outputs at `p`.
    pub fn eval(&self, p: &Point) -> Result<Vec<f64>> {
        let mut buf = Vec::with_capacity(self.ops.len());
        self.eval_into(p, &mut buf)?;
        Ok(self.outputs(&buf).collect())
    }

    /// Output values from a buffer filled by [`Tape::eval_into`].
    pub fn outputs<'a>(&'a self, buf: &'a [f64]) -> impl Iterator<Item = f64> + 'a {
        self.outputs.iter().map(move |&o| buf[o as usize])
    }

    /// Evaluates every node at `p` into a reusable scratch buffer.
    pub fn eval_into(&self, p: &Point, buf: &mut Vec<f64>) -> Result<()> {
        buf.clear();
        for (i, op) in self.ops.iter().enumerate() {
            let v = match *op {
                Op::Const(c) => c,
                Op::Coord(a) => *p.x.get(a).ok_or_else(|| self.fault(EvalFault::CoordinateOutOfRange, i))?,
                Op::Fibre => p.t,
                Op::Sum(s, e) => self.args[s as usize..e as usize].iter().map(|&j| buf[j as usize]).sum(),
                Op::Product(s, e) => self.args[s as usize..e as usize].iter().map(|&j| buf[j as usize]).product(),
                Op::Pow(b, n) => {
                    let bv = buf[b as usize];
                    if bv == 0.0 && n < 0 {
                        return Err(self.fault(EvalFault::DivisionByZero, i));
                    }
                    bv.powi(n)
                }
                Op::Apply(f, a) => {
                    let av = buf[a as usize];
                    match f {
                        Func::Sin => av.sin(),
                        Func::Cos => av.cos(),
                        Func::Exp => av.exp(),
                        Func::LnAbs => {
                            if av == 0.0 {
                                return Err(self.fault(EvalFault::LnOfZero, i));
                            }
                            av.abs().ln()
                        }
                        Func::Sqrt => {
                            if av < 0.0 {
                                return Err(self.fault(EvalFault::SqrtOfNegative, i));
                            }
                            av.sqrt()
                        }
                    }
                }
            };
            if !v.is_finite() {
                return Err(self.fault(EvalFault::NonFinite, i));
            }
            buf.push(v);
        }
        Ok(())
    }
}

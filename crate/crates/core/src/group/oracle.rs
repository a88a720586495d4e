//! Word-problem deciders for the built-in group families.
//!
//! Every built-in evaluates a word to a normal-form key (a `Vec<i64>`), so the
//! word problem reduces to comparing keys. Subprocess oracles only answer
//! yes/no for "is this word the identity".

use std::collections::BTreeSet;
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::Mutex;

use super::intmat::{self, Mat};
use super::{GroupSpec, Letter, Oracle};
use crate::error::{Error, Result};

pub(crate) type Key = Vec<i64>;

pub(crate) enum Evaluator {
    FreeAbelian(usize),
    Cyclic(u64),
    Product {
        split: usize,
        left: Box<Evaluator>,
        right: Box<Evaluator>,
    },
    Semidirect {
        d: usize,
        step: Mat,
        step_inv: Mat,
    },
    Lamplighter,
    Subgroup {
        parent: Box<Evaluator>,
        images: Vec<Vec<Letter>>,
    },
    Subprocess(Box<SubprocessOracle>),
}

#[inline]
fn base(l: Letter) -> usize {
    (l >> 1) as usize
}

#[inline]
fn sign(l: Letter) -> i64 {
    if l & 1 == 0 {
        1
    } else {
        -1
    }
}

impl Evaluator {
    pub(crate) fn build(spec: &GroupSpec, letter_names: &[String]) -> Result<Self> {
        Ok(match &spec.oracle {
            Oracle::FreeAbelian { rank } => Evaluator::FreeAbelian(*rank),
            Oracle::FiniteCyclic { order } => {
                if *order == 0 {
                    return Err(Error::invalid("finite-cyclic order must be positive"));
                }
                Evaluator::Cyclic(*order)
            }
            Oracle::DirectProduct { left, right } => {
                let lnames = super::letter_names(&left.base_generators()?);
                let rnames = super::letter_names(&right.base_generators()?);
                Evaluator::Product {
                    split: left.base_generators()?.len(),
                    left: Box::new(Evaluator::build(left, &lnames)?),
                    right: Box::new(Evaluator::build(right, &rnames)?),
                }
            }
            Oracle::Semidirect { matrix } => {
                let d = matrix.len();
                if matrix.iter().any(|r| r.len() != d) {
                    return Err(Error::invalid("semidirect matrix must be square"));
                }
                // Row i of `matrix` is the exponent vector of t a_i t^-1, so
                // conjugation by t acts on column vectors through the transpose.
                let step = intmat::transpose(matrix);
                let step_inv = intmat::unimodular_inverse(&step).ok_or_else(|| {
                    Error::invalid("semidirect matrix must be invertible over the integers")
                })?;
                Evaluator::Semidirect { d, step, step_inv }
            }
            Oracle::Lamplighter => Evaluator::Lamplighter,
            Oracle::Subgroup { parent, images } => {
                let parent_group = super::Group::new((**parent).clone())?;
                let images = images
                    .iter()
                    .map(|w| parent_group.parse_word(w))
                    .collect::<Result<Vec<_>>>()?;
                let pnames = super::letter_names(&parent.base_generators()?);
                Evaluator::Subgroup {
                    parent: Box::new(Evaluator::build(parent, &pnames)?),
                    images,
                }
            }
            Oracle::Subprocess { command } => {
                Evaluator::Subprocess(Box::new(SubprocessOracle::spawn(command, letter_names)?))
            }
        })
    }

    /// Normal-form key, or `None` for oracles that only decide identity.
    pub(crate) fn key(&self, w: &[Letter]) -> Result<Option<Key>> {
        Ok(Some(match self {
            Evaluator::FreeAbelian(d) => {
                let mut v = vec![0i64; *d];
                for &l in w {
                    v[base(l)] += sign(l);
                }
                v
            }
            Evaluator::Cyclic(m) => {
                let m = *m as i64;
                let s: i64 = w.iter().map(|&l| sign(l)).sum();
                vec![s.rem_euclid(m)]
            }
            Evaluator::Product { split, left, right } => {
                let cut = (2 * split) as Letter;
                let lw: Vec<Letter> = w.iter().copied().filter(|&l| l < cut).collect();
                let rw: Vec<Letter> = w.iter().filter(|&&l| l >= cut).map(|&l| l - cut).collect();
                let (Some(lk), Some(rk)) = (left.key(&lw)?, right.key(&rw)?) else {
                    return Ok(None);
                };
                let mut k = Vec::with_capacity(lk.len() + rk.len() + 1);
                k.push(lk.len() as i64);
                k.extend(lk);
                k.extend(rk);
                k
            }
            Evaluator::Semidirect { d, step, step_inv } => {
                let d = *d;
                let mut v = vec![0i64; d];
                let mut power = 0i64;
                let mut acting = intmat::identity(d);
                for &l in w {
                    let b = base(l);
                    if b < d {
                        let s = sign(l);
                        for (vi, row) in v.iter_mut().zip(&acting) {
                            *vi += s * row[b];
                        }
                    } else if sign(l) > 0 {
                        power += 1;
                        acting = intmat::mul(&acting, step);
                    } else {
                        power -= 1;
                        acting = intmat::mul(&acting, step_inv);
                    }
                }
                v.push(power);
                v
            }
            Evaluator::Lamplighter => {
                let mut pos = 0i64;
                let mut lit = BTreeSet::new();
                for &l in w {
                    if base(l) == 0 {
                        pos += sign(l);
                    } else if !lit.remove(&pos) {
                        lit.insert(pos);
                    }
                }
                let mut k = vec![pos];
                k.extend(lit);
                k
            }
            Evaluator::Subgroup { parent, images } => {
                return parent.key(&substitute(w, images));
            }
            Evaluator::Subprocess(_) => return Ok(None),
        }))
    }

    pub(crate) fn is_identity(&self, w: &[Letter]) -> Result<bool> {
        match self {
            Evaluator::Subprocess(p) => p.ask(w),
            Evaluator::Subgroup { parent, images } => parent.is_identity(&substitute(w, images)),
            _ => {
                let k = self.key(w)?.expect("built-in oracles produce keys");
                let e = self.key(&[])?.expect("built-in oracles produce keys");
                Ok(k == e)
            }
        }
    }

    pub(crate) fn is_free_abelian(&self) -> Option<usize> {
        match self {
            Evaluator::FreeAbelian(d) => Some(*d),
            _ => None,
        }
    }

    /// True when the group is certainly infinite cyclic with its single generator.
    pub(crate) fn is_infinite_cyclic(&self, generators: usize) -> bool {
        if generators != 1 {
            return false;
        }
        match self {
            Evaluator::FreeAbelian(1) => true,
            Evaluator::Subgroup { parent, images } if images.len() == 1 => {
                parent.is_free_abelian().is_some()
                    && parent
                        .key(&images[0])
                        .ok()
                        .flatten()
                        .is_some_and(|k| k.iter().any(|&x| x != 0))
            }
            _ => false,
        }
    }
}

/// Replaces each letter by the image word of its base generator (inverted for
/// inverse letters).
pub(crate) fn substitute(w: &[Letter], images: &[Vec<Letter>]) -> Vec<Letter> {
    let mut out = Vec::new();
    for &l in w {
        let img = &images[base(l)];
        if l & 1 == 0 {
            out.extend_from_slice(img);
        } else {
            out.extend(img.iter().rev().map(|&x| x ^ 1));
        }
    }
    out
}

/// External decider speaking the line protocol: one space-separated word per
/// line on stdin, `1` or `0` per line on stdout.
pub(crate) struct SubprocessOracle {
    names: Vec<String>,
    io: Mutex<(Child, ChildStdin, BufReader<ChildStdout>)>,
}

impl SubprocessOracle {
    fn spawn(command: &[String], names: &[String]) -> Result<Self> {
        let (prog, args) = command
            .split_first()
            .ok_or_else(|| Error::invalid("subprocess oracle needs a command"))?;
        let mut child = Command::new(prog)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| Error::Oracle(format!("cannot start `{prog}`: {e}")))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        Ok(SubprocessOracle {
            names: names.to_vec(),
            io: Mutex::new((child, stdin, stdout)),
        })
    }

    fn ask(&self, w: &[Letter]) -> Result<bool> {
        let line: Vec<&str> = w.iter().map(|&l| self.names[l as usize].as_str()).collect();
        let mut guard = self.io.lock().expect("oracle mutex poisoned");
        let (_, stdin, stdout) = &mut *guard;
        writeln!(stdin, "{}", line.join(" "))?;
        stdin.flush()?;
        let mut answer = String::new();
        if stdout.read_line(&mut answer)? == 0 {
            return Err(Error::Oracle("oracle closed its output".into()));
        }
        match answer.trim() {
            "1" => Ok(true),
            "0" => Ok(false),
            other => Err(Error::Oracle(format!("unexpected oracle answer `{other}`"))),
        }
    }
}

impl Drop for SubprocessOracle {
    fn drop(&mut self) {
        if let Ok(guard) = self.io.get_mut() {
            let _ = guard.0.kill();
            let _ = guard.0.wait();
        }
    }
}

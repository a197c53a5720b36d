//! Probability-vector versions of every measure.
//!
//! On diagonal inputs the quantum measures collapse to these closed forms;
//! the verification suite uses them as a cross-check.

use crate::error::{Error, Result};
use crate::linalg::{c, CMat};
use crate::objects::Channel;

/// Joint distribution `p(a, b, c)` stored with `c` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Joint {
    pub p: Vec<f64>,
    pub dims: [usize; 3],
}

pub struct Marginals {
    pub ac: Vec<f64>,
    pub bc: Vec<f64>,
    pub c: Vec<f64>,
}

impl Joint {
    pub fn new(p: Vec<f64>, dims: [usize; 3]) -> Result<Self> {
        if p.len() != dims.iter().product::<usize>() {
            return Err(Error::DimensionMismatch(format!(
                "{} probabilities for dims {dims:?}",
                p.len()
            )));
        }
        Ok(Self { p, dims })
    }

    fn split(&self, i: usize) -> (usize, usize, usize) {
        let [_, db, dc] = self.dims;
        (i / (db * dc), (i / dc) % db, i % dc)
    }

    pub fn marginals(&self) -> Marginals {
        let [da, db, dc] = self.dims;
        let mut m = Marginals {
            ac: vec![0.0; da * dc],
            bc: vec![0.0; db * dc],
            c: vec![0.0; dc],
        };
        for (i, &x) in self.p.iter().enumerate() {
            let (a, b, cc) = self.split(i);
            m.ac[a * dc + cc] += x;
            m.bc[b * dc + cc] += x;
            m.c[cc] += x;
        }
        m
    }

    /// `(p, p_ac, p_bc, p_c)` over the support of `p`.
    fn terms(&self) -> Vec<(f64, f64, f64, f64)> {
        let dc = self.dims[2];
        let m = self.marginals();
        self.p
            .iter()
            .enumerate()
            .filter(|(_, &x)| x > 0.0)
            .map(|(i, &x)| {
                let (a, b, cc) = self.split(i);
                (x, m.ac[a * dc + cc], m.bc[b * dc + cc], m.c[cc])
            })
            .collect()
    }
}

pub fn shannon(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|x| -x * x.log2()).sum()
}

pub fn cmi(j: &Joint) -> f64 {
    let m = j.marginals();
    shannon(&m.ac) + shannon(&m.bc) - shannon(&m.c) - shannon(&j.p)
}

/// Shared closed form of the Petz and sandwiched Rényi CMI on distributions.
pub fn renyi_cmi(j: &Joint, alpha: f64) -> f64 {
    let s: f64 = j
        .terms()
        .iter()
        .map(|&(p, ac, bc, cc)| p.powf(alpha) * ac.powf(1.0 - alpha) * cc.powf(alpha - 1.0) * bc.powf(1.0 - alpha))
        .sum();
    s.log2() / (alpha - 1.0)
}

pub fn i_max(j: &Joint) -> f64 {
    j.terms()
        .iter()
        .map(|&(p, ac, bc, cc)| (p * cc / (ac * bc)).log2())
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn i_min(j: &Joint) -> f64 {
    let s: f64 = j.terms().iter().map(|&(p, ac, bc, cc)| (p * ac * bc / cc).sqrt()).sum();
    -2.0 * s.log2()
}

pub fn kl(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(&x, _)| x > 0.0)
        .map(|(&x, &y)| x * (x / y).log2())
        .sum()
}

pub fn renyi(p: &[f64], q: &[f64], alpha: f64) -> f64 {
    let s: f64 = p
        .iter()
        .zip(q)
        .filter(|(&x, _)| x > 0.0)
        .map(|(&x, &y)| x.powf(alpha) * y.powf(1.0 - alpha))
        .sum();
    s.log2() / (alpha - 1.0)
}

pub fn d_min(p: &[f64], q: &[f64]) -> f64 {
    -2.0 * p.iter().zip(q).map(|(x, y)| (x * y).sqrt()).sum::<f64>().log2()
}

pub fn d_max(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(&x, _)| x > 0.0)
        .map(|(&x, &y)| (x / y).log2())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `(p, q, T)` with `T[y][x]` a column-stochastic matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Triple {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub t: Vec<Vec<f64>>,
}

impl Triple {
    pub fn push(&self, v: &[f64]) -> Vec<f64> {
        self.t
            .iter()
            .map(|row| row.iter().zip(v).map(|(w, x)| w * x).sum())
            .collect()
    }

    /// `x ↦ q_x^{a} Σ_y T[y][x] (Tq)_y^{b} (Tp)_y^{d}`.
    fn kernel(&self, a: f64, b: f64, d: f64) -> Vec<f64> {
        let (tp, tq) = (self.push(&self.p), self.push(&self.q));
        (0..self.p.len())
            .map(|x| {
                let s: f64 = (0..self.t.len())
                    .map(|y| self.t[y][x] * tq[y].powf(b) * tp[y].powf(d))
                    .sum();
                self.q[x].powf(a) * s
            })
            .collect()
    }

    pub fn rel_ent_diff(&self) -> f64 {
        kl(&self.p, &self.q) - kl(&self.push(&self.p), &self.push(&self.q))
    }

    pub fn delta_alpha(&self, alpha: f64) -> f64 {
        let k = self.kernel(1.0 - alpha, alpha - 1.0, 1.0 - alpha);
        let s: f64 = self.p.iter().zip(&k).map(|(p, k)| p.powf(alpha) * k).sum();
        s.log2() / (alpha - 1.0)
    }

    pub fn delta_tilde_alpha(&self, alpha: f64) -> f64 {
        let h = (1.0 - alpha) / alpha;
        let k = self.kernel(h, -h, h);
        let s: f64 = self.p.iter().zip(&k).map(|(p, k)| (p * k).powf(alpha)).sum();
        s.log2() / (alpha - 1.0)
    }

    /// Petz-recovered distribution `x ↦ q_x Σ_y T[y][x] (Tp)_y / (Tq)_y`.
    pub fn recovered(&self) -> Vec<f64> {
        self.kernel(1.0, -1.0, 1.0)
    }

    pub fn delta_min(&self) -> f64 {
        d_min(&self.p, &self.recovered())
    }

    pub fn delta_max(&self) -> f64 {
        d_max(&self.p, &self.recovered())
    }

    /// Kraus operators `√T[y][x] |y⟩⟨x|`.
    pub fn channel(&self) -> Result<Channel> {
        let (dout, din) = (self.t.len(), self.p.len());
        let mut kraus = Vec::new();
        for (y, row) in self.t.iter().enumerate() {
            for (x, &w) in row.iter().enumerate() {
                if w > 0.0 {
                    let mut k = CMat::zeros(dout, din);
                    k[(y, x)] = c(w.sqrt(), 0.0);
                    kraus.push(k);
                }
            }
        }
        Channel::new(kraus)
    }
}

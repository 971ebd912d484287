use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::dd::cone_generators;
use super::hpoly::HPolyhedron;
use crate::error::{check_dim, Error, Result};
use crate::ratlp::{rank, solve_unchecked, LpProblem};
use crate::rat::{dot, identity, neg, primitive, serde_rat, zeros, Matrix, Rat, Vector};

/// `conv(points) + cone(rays)`; empty when there are no points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VPolyhedron {
    dim: usize,
    points: Vec<Vector>,
    rays: Vec<Vector>,
}

impl VPolyhedron {
    pub fn new(dim: usize, points: Vec<Vector>, rays: Vec<Vector>) -> Result<Self> {
        for v in points.iter().chain(&rays) {
            check_dim(dim, v.len())?;
        }
        if dim > crate::ratlp::MAX_DIM {
            return Err(Error::DeskScaleLimit(format!("ambient dimension {dim}")));
        }
        Ok(Self::raw(dim, points, rays))
    }

    pub(crate) fn raw(dim: usize, points: Vec<Vector>, rays: Vec<Vector>) -> Self {
        let rays = if points.is_empty() { Vec::new() } else { rays };
        VPolyhedron { dim, points, rays }
    }

    pub fn empty(dim: usize) -> Self {
        VPolyhedron { dim, points: vec![], rays: vec![] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn rays(&self) -> &[Vector] {
        &self.rays
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_bounded(&self) -> bool {
        self.rays.iter().all(|r| r.iter().all(Zero::is_zero))
    }

    /// Membership by one feasibility LP over the convex/conic multipliers.
    pub fn contains(&self, x: &[Rat]) -> bool {
        if x.len() != self.dim || self.points.is_empty() {
            return false;
        }
        let np = self.points.len();
        let k = np + self.rays.len();
        let mut e: Matrix = (0..self.dim)
            .map(|i| self.points.iter().chain(&self.rays).map(|g| g[i].clone()).collect())
            .collect();
        let mut d = x.to_vec();
        let mut sum_row = zeros(k);
        for s in sum_row.iter_mut().take(np) {
            *s = Rat::one();
        }
        e.push(sum_row);
        d.push(Rat::one());
        let a: Matrix = identity(k).iter().map(|r| neg(r)).collect();
        let p = LpProblem::feasibility(k, a, zeros(k), e, d);
        !solve_unchecked(&p).is_infeasible()
    }

    /// Facet description through the polar of the homogenized generator cone.
    pub fn to_h(&self) -> HPolyhedron {
        let n = self.dim;
        if self.points.is_empty() {
            return HPolyhedron::empty(n);
        }
        let mut rows = Vec::with_capacity(self.points.len() + self.rays.len());
        for p in &self.points {
            let mut h = p.clone();
            h.push(Rat::one());
            rows.push(h);
        }
        for r in &self.rays {
            let mut h = r.clone();
            h.push(Rat::zero());
            rows.push(h);
        }
        // (a, c) with a·v + c ≤ 0 for points and a·r ≤ 0 for rays: a·x ≤ −c
        let polar = cone_generators(n + 1, &rows, &[]);
        let mut a = Vec::new();
        let mut b = Vec::new();
        for g in &polar.rays {
            if g[..n].iter().all(Zero::is_zero) {
                continue;
            }
            a.push(g[..n].to_vec());
            b.push(-g[n].clone());
        }
        let mut e = Vec::new();
        let mut d = Vec::new();
        for l in &polar.lineality {
            if l[..n].iter().all(Zero::is_zero) {
                continue;
            }
            e.push(l[..n].to_vec());
            d.push(-l[n].clone());
        }
        let h = HPolyhedron::raw(n, a, b, e, d);
        let mut normals = polar.rays.clone();
        normals.extend(polar.lineality.iter().cloned());
        if rank(&normals, n + 1) == n + 1 {
            h.set_vrep(self.extreme_generators(&rows, &normals));
        }
        h
    }

    /// The vertices and extreme rays among the generators of a pointed set,
    /// given the homogenized generators and the facet normals of their cone:
    /// a generator is extreme iff the normals vanishing on it have rank `n`.
    fn extreme_generators(&self, homogenized: &[Vector], normals: &[Vector]) -> VPolyhedron {
        let n = self.dim;
        let mut points: Vec<Vector> = Vec::new();
        let mut rays: Vec<Vector> = Vec::new();
        for g in homogenized {
            if g.iter().all(Zero::is_zero) {
                continue;
            }
            let tight: Matrix = normals.iter().filter(|h| dot(h, g).is_zero()).cloned().collect();
            if rank(&tight, n + 1) != n {
                continue;
            }
            if g[n].is_zero() {
                let r = primitive(&g[..n]);
                if !rays.contains(&r) {
                    rays.push(r);
                }
            } else if !points.contains(&g[..n].to_vec()) {
                points.push(g[..n].to_vec());
            }
        }
        VPolyhedron::raw(n, points, rays)
    }

    pub fn to_json(&self) -> VPolyhedronJson {
        VPolyhedronJson { dim: Some(self.dim), points: self.points.clone(), rays: self.rays.clone() }
    }
}

/// Wire form: `{"points": [...], "rays": [...]}` with optional `"dim"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VPolyhedronJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(with = "serde_rat::mat")]
    pub points: Matrix,
    #[serde(with = "serde_rat::mat", default)]
    pub rays: Matrix,
}

impl TryFrom<VPolyhedronJson> for VPolyhedron {
    type Error = Error;

    fn try_from(j: VPolyhedronJson) -> Result<Self> {
        let dim = j
            .dim
            .or_else(|| j.points.first().or(j.rays.first()).map(Vec::len))
            .ok_or_else(|| Error::Parse("cannot infer dimension of an empty V-polyhedron".into()))?;
        VPolyhedron::new(dim, j.points, j.rays)
    }
}

impl Serialize for VPolyhedron {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for VPolyhedron {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = VPolyhedronJson::deserialize(d)?;
        VPolyhedron::try_from(j).map_err(serde::de::Error::custom)
    }
}

//! Finite k-linear categories, k-linear functors and natural transformations.
//!
//! A category is given by ordered hom-space bases and composition structure
//! constants; functors by object maps and per-hom-pair matrices; natural
//! transformations by per-object component vectors.  Everything is validated
//! against the axioms on basis elements, which suffices by multilinearity.
//!
//! Composition is written diagrammatically throughout: for a: X -> Y and
//! b: Y -> Z the composite `ab` goes X -> Z.  Hom bases are ordered and fixed
//! at construction; all cochain indexing downstream relies on these orders.

use crate::matrix::ExactMatrix;
use crate::scalar::{Field, Scalar};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CatError {
    #[error("arrows are not composable: target object {0} vs source object {1}")]
    NonComposable(String, String),
    #[error("{0}")]
    Malformed(String),
}

/// A vector in a single hom space Hom(src, tgt), coefficients over the
/// ordered basis of that hom space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrowVec {
    pub src: usize,
    pub tgt: usize,
    pub coeffs: Vec<Scalar>,
}

impl ArrowVec {
    pub fn zero(src: usize, tgt: usize, dim: usize, field: Field) -> ArrowVec {
        ArrowVec {
            src,
            tgt,
            coeffs: vec![Scalar::zero(field); dim],
        }
    }

    pub fn basis(src: usize, tgt: usize, dim: usize, idx: usize, field: Field) -> ArrowVec {
        let mut v = ArrowVec::zero(src, tgt, dim, field);
        v.coeffs[idx] = Scalar::one(field);
        v
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &ArrowVec) -> ArrowVec {
        assert_eq!((self.src, self.tgt), (other.src, other.tgt), "hom mismatch");
        ArrowVec {
            src: self.src,
            tgt: self.tgt,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &ArrowVec) -> ArrowVec {
        self.add(&other.scale_int(-1))
    }

    pub fn scale(&self, c: &Scalar) -> ArrowVec {
        ArrowVec {
            src: self.src,
            tgt: self.tgt,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn scale_int(&self, n: i64) -> ArrowVec {
        if self.coeffs.is_empty() {
            return self.clone();
        }
        let f = self.coeffs[0].field();
        self.scale(&Scalar::from_int(f, n))
    }
}

/// A finite k-linear category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinLinCat {
    pub name: String,
    pub field: Field,
    pub objects: Vec<String>,
    /// ordered basis-arrow labels per ordered object pair; absent pair means
    /// a zero hom space
    pub hom_basis: BTreeMap<(usize, usize), Vec<String>>,
    /// structure constants: ((x,y,z), a_idx, b_idx) -> coefficients of a*b
    /// over the basis of Hom(x,z)
    pub compose: BTreeMap<(usize, usize, usize), Vec<Vec<Vec<Scalar>>>>,
    /// identity vector per object, over the basis of Hom(x,x)
    pub identity: Vec<Vec<Scalar>>,
}

impl FinLinCat {
    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn hom_dim(&self, x: usize, y: usize) -> usize {
        self.hom_basis.get(&(x, y)).map_or(0, |b| b.len())
    }

    pub fn arrow_label(&self, x: usize, y: usize, idx: usize) -> &str {
        &self.hom_basis[&(x, y)][idx]
    }

    pub fn identity_vec(&self, x: usize) -> ArrowVec {
        ArrowVec {
            src: x,
            tgt: x,
            coeffs: self.identity[x].clone(),
        }
    }

    /// Composite of two basis arrows as a vector in Hom(x,z).
    pub fn compose_basis(&self, x: usize, y: usize, z: usize, a: usize, b: usize) -> ArrowVec {
        let coeffs = self
            .compose
            .get(&(x, y, z))
            .map(|t| t[a][b].clone())
            .unwrap_or_else(|| vec![Scalar::zero(self.field); self.hom_dim(x, z)]);
        ArrowVec {
            src: x,
            tgt: z,
            coeffs,
        }
    }

    /// Bilinear extension of the structure constants.
    pub fn compose_arrows(&self, u: &ArrowVec, v: &ArrowVec) -> Result<ArrowVec, CatError> {
        if u.tgt != v.src {
            return Err(CatError::NonComposable(
                self.objects[u.tgt].clone(),
                self.objects[v.src].clone(),
            ));
        }
        let mut out = ArrowVec::zero(u.src, v.tgt, self.hom_dim(u.src, v.tgt), self.field);
        for (a, ca) in u.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (b, cb) in v.coeffs.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                let ab = self.compose_basis(u.src, u.tgt, v.tgt, a, b);
                out = out.add(&ab.scale(&(ca * cb)));
            }
        }
        Ok(out)
    }

    /// All composable basis n-tuples starting anywhere; a tuple is a list of
    /// (src, tgt, arrow index) with matching endpoints.
    pub fn composable_tuples(&self, n: usize) -> Vec<Vec<(usize, usize, usize)>> {
        assert!(n >= 1);
        let mut tuples: Vec<Vec<(usize, usize, usize)>> = Vec::new();
        for (&(x, y), basis) in &self.hom_basis {
            for a in 0..basis.len() {
                tuples.push(vec![(x, y, a)]);
            }
        }
        for _ in 1..n {
            let mut next = Vec::new();
            for t in &tuples {
                let (_, last_tgt, _) = *t.last().unwrap();
                for (&(x, y), basis) in &self.hom_basis {
                    if x != last_tgt {
                        continue;
                    }
                    for a in 0..basis.len() {
                        let mut t2 = t.clone();
                        t2.push((x, y, a));
                        next.push(t2);
                    }
                }
            }
            tuples = next;
        }
        tuples
    }
}

/// Structured validation findings; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub entries: Vec<String>,
}

impl Report {
    pub fn is_valid(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn push(&mut self, msg: String) {
        self.entries.push(msg);
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            write!(f, "valid")
        } else {
            for e in &self.entries {
                writeln!(f, "{e}")?;
            }
            Ok(())
        }
    }
}

/// Check associativity on all basis triples and the identity laws on all
/// basis arrows.  Every violated instance is reported.
pub fn validate_category(c: &FinLinCat) -> Report {
    let mut report = Report::default();
    if c.identity.len() != c.objects.len() {
        report.push(format!(
            "category {}: {} identity vectors for {} objects",
            c.name,
            c.identity.len(),
            c.objects.len()
        ));
        return report;
    }
    for (x, idv) in c.identity.iter().enumerate() {
        if idv.len() != c.hom_dim(x, x) {
            report.push(format!(
                "category {}: identity vector at {} has wrong length",
                c.name, c.objects[x]
            ));
            return report;
        }
    }
    // associativity (ab)c = a(bc) on basis triples
    for t in c.composable_tuples(3) {
        let [(x, y, a), (_, z, b), (_, w, cc)] = t[..] else {
            unreachable!()
        };
        let av = ArrowVec::basis(x, y, c.hom_dim(x, y), a, c.field);
        let bv = ArrowVec::basis(y, z, c.hom_dim(y, z), b, c.field);
        let cv = ArrowVec::basis(z, w, c.hom_dim(z, w), cc, c.field);
        let left = c
            .compose_arrows(&c.compose_arrows(&av, &bv).unwrap(), &cv)
            .unwrap();
        let right = c
            .compose_arrows(&av, &c.compose_arrows(&bv, &cv).unwrap())
            .unwrap();
        if left != right {
            report.push(format!(
                "category {}: associativity fails at triple ({}, {}, {})",
                c.name,
                c.arrow_label(x, y, a),
                c.arrow_label(y, z, b),
                c.arrow_label(z, w, cc)
            ));
        }
    }
    // identity laws
    for (&(x, y), basis) in &c.hom_basis {
        for a in 0..basis.len() {
            let av = ArrowVec::basis(x, y, basis.len(), a, c.field);
            let l = c.compose_arrows(&c.identity_vec(x), &av).unwrap();
            let r = c.compose_arrows(&av, &c.identity_vec(y)).unwrap();
            if l != av {
                report.push(format!(
                    "category {}: left identity law fails at {}",
                    c.name,
                    c.arrow_label(x, y, a)
                ));
            }
            if r != av {
                report.push(format!(
                    "category {}: right identity law fails at {}",
                    c.name,
                    c.arrow_label(x, y, a)
                ));
            }
        }
    }
    report
}

/// A k-linear functor between finite k-linear categories.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinFunctor {
    pub name: String,
    pub source: Arc<FinLinCat>,
    pub target: Arc<FinLinCat>,
    pub object_map: Vec<usize>,
    /// per source hom pair, the matrix Hom_src(x,y) -> Hom_tgt(Fx,Fy)
    pub arrow_map: BTreeMap<(usize, usize), ExactMatrix>,
}

impl LinFunctor {
    pub fn identity(cat: &Arc<FinLinCat>) -> LinFunctor {
        let mut arrow_map = BTreeMap::new();
        for (&(x, y), basis) in &cat.hom_basis {
            arrow_map.insert((x, y), ExactMatrix::identity(basis.len(), cat.field));
        }
        LinFunctor {
            name: format!("Id_{}", cat.name),
            source: cat.clone(),
            target: cat.clone(),
            object_map: (0..cat.objects.len()).collect(),
            arrow_map,
        }
    }

    pub fn apply_obj(&self, x: usize) -> usize {
        self.object_map[x]
    }

    pub fn apply(&self, v: &ArrowVec) -> ArrowVec {
        let (fx, fy) = (self.apply_obj(v.src), self.apply_obj(v.tgt));
        let dim = self.target.hom_dim(fx, fy);
        let coeffs = match self.arrow_map.get(&(v.src, v.tgt)) {
            Some(m) => m.apply(&v.coeffs),
            None => vec![Scalar::zero(self.source.field); dim],
        };
        ArrowVec {
            src: fx,
            tgt: fy,
            coeffs,
        }
    }

    /// Diagrammatic composition: (self.then(g))(x) = g(self(x)).
    pub fn then(&self, g: &LinFunctor) -> LinFunctor {
        assert_eq!(
            self.target, g.source,
            "functor composition endpoint mismatch"
        );
        let object_map: Vec<usize> = self.object_map.iter().map(|&x| g.apply_obj(x)).collect();
        let mut arrow_map = BTreeMap::new();
        for (&(x, y), m) in &self.arrow_map {
            let (fx, fy) = (self.apply_obj(x), self.apply_obj(y));
            match g.arrow_map.get(&(fx, fy)) {
                Some(gm) => {
                    arrow_map.insert((x, y), gm.mul(m));
                }
                None => {
                    let rows = g
                        .target
                        .hom_dim(g.apply_obj(fx), g.apply_obj(fy));
                    arrow_map.insert((x, y), ExactMatrix::zero(rows, m.cols(), m.field()));
                }
            }
        }
        LinFunctor {
            name: format!("{}({})", g.name, self.name),
            source: self.source.clone(),
            target: g.target.clone(),
            object_map,
            arrow_map,
        }
    }

    /// Structural equality ignoring the display name.
    pub fn same_functor(&self, other: &LinFunctor) -> bool {
        self.source == other.source
            && self.target == other.target
            && self.object_map == other.object_map
            && self.arrow_map == other.arrow_map
    }
}

/// Check F(id) = id and F(ab) = F(a)F(b) on all basis instances.
pub fn validate_functor(f: &LinFunctor) -> Report {
    let mut report = Report::default();
    if f.object_map.len() != f.source.objects.len() {
        report.push(format!("functor {}: object map has wrong length", f.name));
        return report;
    }
    for (x, obj) in f.source.objects.iter().enumerate() {
        let fid = f.apply(&f.source.identity_vec(x));
        let id = f.target.identity_vec(f.apply_obj(x));
        if fid != id {
            report.push(format!(
                "functor {}: F(id_{}) differs from id_{}",
                f.name,
                obj,
                f.target.objects[f.apply_obj(x)]
            ));
        }
    }
    for t in f.source.composable_tuples(2) {
        let [(x, y, a), (_, z, b)] = t[..] else {
            unreachable!()
        };
        let av = ArrowVec::basis(x, y, f.source.hom_dim(x, y), a, f.source.field);
        let bv = ArrowVec::basis(y, z, f.source.hom_dim(y, z), b, f.source.field);
        let lhs = f.apply(&f.source.compose_arrows(&av, &bv).unwrap());
        let rhs = f
            .target
            .compose_arrows(&f.apply(&av), &f.apply(&bv))
            .unwrap();
        if lhs != rhs {
            report.push(format!(
                "functor {}: F(ab) != F(a)F(b) at pair ({}, {})",
                f.name,
                f.source.arrow_label(x, y, a),
                f.source.arrow_label(y, z, b)
            ));
        }
    }
    report
}

/// A natural transformation between parallel k-linear functors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NatTrans {
    pub name: String,
    pub source: Arc<LinFunctor>,
    pub target: Arc<LinFunctor>,
    /// component at each source object X, a vector in Hom(FX, GX)
    pub components: Vec<ArrowVec>,
}

impl NatTrans {
    pub fn identity(f: &Arc<LinFunctor>) -> NatTrans {
        let components = (0..f.source.objects.len())
            .map(|x| f.target.identity_vec(f.apply_obj(x)))
            .collect();
        NatTrans {
            name: format!("id_{}", f.name),
            source: f.clone(),
            target: f.clone(),
            components,
        }
    }

    pub fn component(&self, x: usize) -> &ArrowVec {
        &self.components[x]
    }

    /// Vertical composite: self then other, (s.t)_X = s_X t_X diagrammatically.
    pub fn vcompose(&self, other: &NatTrans) -> NatTrans {
        assert!(
            self.target.same_functor(&other.source),
            "vertical composition endpoint mismatch"
        );
        let cat = &self.source.target;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| cat.compose_arrows(a, b).unwrap())
            .collect();
        NatTrans {
            name: format!("{}{}", self.name, other.name),
            source: self.source.clone(),
            target: other.target.clone(),
            components,
        }
    }

    /// Whisker on the left by e: precompose, (sigma_e)_X = sigma_{e(X)}.
    pub fn whisker_pre(&self, e: &Arc<LinFunctor>) -> NatTrans {
        assert_eq!(e.target, self.source.source, "whisker endpoint mismatch");
        let src = Arc::new(e.then(&self.source));
        let tgt = Arc::new(e.then(&self.target));
        let components = (0..e.source.objects.len())
            .map(|x| self.components[e.apply_obj(x)].clone())
            .collect();
        NatTrans {
            name: format!("{}_{}", self.name, e.name),
            source: src,
            target: tgt,
            components,
        }
    }

    /// Whisker on the right by h: postcompose, (h sigma)_X = h(sigma_X).
    pub fn whisker_post(&self, h: &Arc<LinFunctor>) -> NatTrans {
        assert_eq!(self.source.target, h.source, "whisker endpoint mismatch");
        let src = Arc::new(self.source.then(h));
        let tgt = Arc::new(self.target.then(h));
        let components = self.components.iter().map(|c| h.apply(c)).collect();
        NatTrans {
            name: format!("{}({})", h.name, self.name),
            source: src,
            target: tgt,
            components,
        }
    }
}

/// Check the naturality squares F(a) sigma_Y = sigma_X G(a) on basis arrows.
pub fn validate_nat(n: &NatTrans) -> Report {
    let mut report = Report::default();
    let f = &n.source;
    let g = &n.target;
    if !(f.source == g.source && f.target == g.target) {
        report.push(format!(
            "natural transformation {}: functors are not parallel",
            n.name
        ));
        return report;
    }
    let cat = &f.target;
    for (x, comp) in n.components.iter().enumerate() {
        let (fx, gx) = (f.apply_obj(x), g.apply_obj(x));
        if (comp.src, comp.tgt) != (fx, gx) || comp.coeffs.len() != cat.hom_dim(fx, gx) {
            report.push(format!(
                "natural transformation {}: component at {} lies in the wrong hom space",
                n.name, f.source.objects[x]
            ));
            return report;
        }
    }
    for (&(x, y), basis) in &f.source.hom_basis {
        for a in 0..basis.len() {
            let av = ArrowVec::basis(x, y, basis.len(), a, f.source.field);
            let lhs = cat
                .compose_arrows(&f.apply(&av), n.component(y))
                .unwrap();
            let rhs = cat
                .compose_arrows(n.component(x), &g.apply(&av))
                .unwrap();
            if lhs != rhs {
                report.push(format!(
                    "natural transformation {}: naturality fails at basis arrow {}",
                    n.name,
                    f.source.arrow_label(x, y, a)
                ));
            }
        }
    }
    report
}

//! Hochschild cochain spaces C^n(A), C^n(F) and C^n(F,G), their
//! differentials, and the operator algebra used to assemble deformation
//! complexes: pushforward and pullback along functors, pre- and
//! post-composition by natural transformations, and the brace insertions.
//!
//! Sign conventions live in [`conv`] and are pinned by tests: the
//! differential must reproduce the degree-2 category formula
//! `d(phi)(a,b,c) = phi(a,b)c - a phi(b,c) + phi(ab,c) - phi(a,bc)`,
//! the two-cell rows of assembled complexes must square to zero, and the
//! pasting-composition block matrices must be chain maps.  If any of those
//! tests ever disagrees with a change, this table is the only place to edit.

use crate::fincat::{ArrowVec, FinLinCat, LinFunctor, NatTrans};
use crate::matrix::ExactMatrix;
use crate::scalar::{Field, Scalar};
use std::sync::Arc;
use thiserror::Error;

/// Sign convention table.
pub mod conv {
    /// Sign of the i-th term of the differential: (-1)^(i+1).  Term 0 is
    /// F(f1) phi(f2,..), term i (1 <= i <= n) merges f_i f_{i+1}, term n+1
    /// is phi(f1,..,fn) G(f_{n+1}).
    pub fn diff_sign(i: usize) -> i64 {
        if i % 2 == 0 {
            -1
        } else {
            1
        }
    }

    /// Per-insertion sign of the brace: inserting a component after p
    /// arguments contributes (-1)^p.
    pub fn brace_insertion_sign(p: usize) -> i64 {
        if p % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Global sign of the r-fold brace: +1, -1, -1 for r = 1, 2, 3.
    pub fn brace_global_sign(r: usize) -> i64 {
        match r {
            1 => 1,
            2 => -1,
            3 => -1,
            _ => panic!("brace arity {r} unsupported"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HochschildError {
    #[error("composition mismatch: {0}")]
    CompositionMismatch(String),
    #[error("natural transformation chain mismatch: {0}")]
    ChainMismatch(String),
}

/// What a cochain space is over: a category, or a bimodule pair of parallel
/// functors (with C^n(F) := C^n(F,F)).
#[derive(Debug, Clone)]
pub enum SpaceKind {
    Category(Arc<FinLinCat>),
    Bimodule {
        f: Arc<LinFunctor>,
        g: Arc<LinFunctor>,
    },
}

impl SpaceKind {
    pub fn functor(f: &Arc<LinFunctor>) -> SpaceKind {
        SpaceKind::Bimodule {
            f: f.clone(),
            g: f.clone(),
        }
    }

    /// The category whose arrows index the tuples.
    pub fn source_cat(&self) -> &Arc<FinLinCat> {
        match self {
            SpaceKind::Category(c) => c,
            SpaceKind::Bimodule { f, .. } => &f.source,
        }
    }

    /// The category the values live in.
    pub fn value_cat(&self) -> &Arc<FinLinCat> {
        match self {
            SpaceKind::Category(c) => c,
            SpaceKind::Bimodule { f, .. } => &f.target,
        }
    }

    /// Value hom pair for a tuple from x0 to xn.
    fn value_hom(&self, x0: usize, xn: usize) -> (usize, usize) {
        match self {
            SpaceKind::Category(_) => (x0, xn),
            SpaceKind::Bimodule { f, g } => (f.apply_obj(x0), g.apply_obj(xn)),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            SpaceKind::Category(c) => format!("C({})", c.name),
            SpaceKind::Bimodule { f, g } => {
                if f.same_functor(g) {
                    format!("C({})", f.name)
                } else {
                    format!("C({},{})", f.name, g.name)
                }
            }
        }
    }
}

/// Index of a basis tuple: degree 0 uses an object, degree n >= 1 a
/// composable chain of basis arrows.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum TupleIdx {
    Object(usize),
    Arrows(Vec<(usize, usize, usize)>),
}

impl TupleIdx {
    pub fn endpoints(&self) -> (usize, usize) {
        match self {
            TupleIdx::Object(x) => (*x, *x),
            TupleIdx::Arrows(chain) => (chain[0].0, chain.last().unwrap().1),
        }
    }
}

/// Basis of one cochain space: the deterministic enumeration of composable
/// basis tuples, with a flat offset per tuple into coordinate vectors.
#[derive(Debug, Clone)]
pub struct CochainSpace {
    pub kind: SpaceKind,
    pub degree: usize,
    pub tuples: Vec<TupleIdx>,
    pub offsets: Vec<usize>,
    pub dim: usize,
    pub field: Field,
}

impl CochainSpace {
    /// Lexicographic enumeration of the (tuple, target-arrow) basis.
    pub fn new(kind: SpaceKind, degree: usize) -> Arc<CochainSpace> {
        let src = kind.source_cat().clone();
        let field = src.field;
        let tuples: Vec<TupleIdx> = if degree == 0 {
            (0..src.objects.len()).map(TupleIdx::Object).collect()
        } else {
            src.composable_tuples(degree)
                .into_iter()
                .map(TupleIdx::Arrows)
                .collect()
        };
        let mut offsets = Vec::with_capacity(tuples.len());
        let mut dim = 0usize;
        let val = kind.value_cat().clone();
        for t in &tuples {
            offsets.push(dim);
            let (x0, xn) = t.endpoints();
            let (a, b) = kind.value_hom(x0, xn);
            dim += val.hom_dim(a, b);
        }
        Arc::new(CochainSpace {
            kind,
            degree,
            tuples,
            offsets,
            dim,
            field,
        })
    }

    /// Hom pair of the value at tuple index k.
    pub fn value_hom_at(&self, k: usize) -> (usize, usize) {
        let (x0, xn) = self.tuples[k].endpoints();
        self.kind.value_hom(x0, xn)
    }

    pub fn value_dim_at(&self, k: usize) -> usize {
        let (a, b) = self.value_hom_at(k);
        self.kind.value_cat().hom_dim(a, b)
    }

    pub fn tuple_count(&self) -> usize {
        self.tuples.len()
    }

    /// Position of a tuple in the enumeration.
    pub fn tuple_position(&self, t: &TupleIdx) -> Option<usize> {
        self.tuples.binary_search(t).ok()
    }
}

/// An element of a cochain space: one value vector per basis tuple.
#[derive(Debug, Clone)]
pub struct Cochain {
    pub space: Arc<CochainSpace>,
    pub values: Vec<ArrowVec>,
}

impl Cochain {
    pub fn zero(space: &Arc<CochainSpace>) -> Cochain {
        let values = (0..space.tuple_count())
            .map(|k| {
                let (a, b) = space.value_hom_at(k);
                ArrowVec::zero(a, b, space.value_dim_at(k), space.field)
            })
            .collect();
        Cochain {
            space: space.clone(),
            values,
        }
    }

    /// Basis cochain: 1 on coordinate `flat`, 0 elsewhere.
    pub fn basis(space: &Arc<CochainSpace>, flat: usize) -> Cochain {
        let mut c = Cochain::zero(space);
        let k = match space.offsets.binary_search(&flat) {
            Ok(k) => k,
            Err(k) => k - 1,
        };
        c.values[k].coeffs[flat - space.offsets[k]] = Scalar::one(space.field);
        c
    }

    pub fn from_flat(space: &Arc<CochainSpace>, flat: &[Scalar]) -> Cochain {
        assert_eq!(flat.len(), space.dim, "flat vector length mismatch");
        let mut c = Cochain::zero(space);
        for (k, v) in c.values.iter_mut().enumerate() {
            let off = space.offsets[k];
            for (i, coeff) in v.coeffs.iter_mut().enumerate() {
                *coeff = flat[off + i].clone();
            }
        }
        c
    }

    pub fn to_flat(&self) -> Vec<Scalar> {
        let mut out = Vec::with_capacity(self.space.dim);
        for v in &self.values {
            out.extend(v.coeffs.iter().cloned());
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    pub fn add(&self, other: &Cochain) -> Cochain {
        assert_eq!(self.space.dim, other.space.dim, "space mismatch");
        Cochain {
            space: self.space.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Cochain) -> Cochain {
        self.add(&other.scale_int(-1))
    }

    pub fn scale(&self, c: &Scalar) -> Cochain {
        Cochain {
            space: self.space.clone(),
            values: self.values.iter().map(|v| v.scale(c)).collect(),
        }
    }

    pub fn scale_int(&self, n: i64) -> Cochain {
        self.scale(&Scalar::from_int(self.space.field, n))
    }

    /// Value at a composable basis tuple, by lookup.
    pub fn value_at(&self, t: &TupleIdx) -> &ArrowVec {
        let k = self
            .space
            .tuple_position(t)
            .expect("tuple not in space enumeration");
        &self.values[k]
    }

    /// Multilinear evaluation on a tuple of arrow vectors.
    pub fn eval(&self, args: &[ArrowVec]) -> ArrowVec {
        assert_eq!(args.len(), self.space.degree, "evaluation arity mismatch");
        if args.is_empty() {
            unreachable!("degree-0 cochains are evaluated per object");
        }
        let src = self.space.kind.source_cat();
        let field = self.space.field;
        let (x0, xn) = (args[0].src, args.last().unwrap().tgt);
        let (va, vb) = self.space.kind.value_hom(x0, xn);
        let mut out = ArrowVec::zero(va, vb, self.space.kind.value_cat().hom_dim(va, vb), field);
        // expand the tensor of basis contributions
        let mut stack: Vec<(usize, Vec<(usize, usize, usize)>, Scalar)> =
            vec![(0, Vec::new(), Scalar::one(field))];
        while let Some((pos, chain, coeff)) = stack.pop() {
            if coeff.is_zero() {
                continue;
            }
            if pos == args.len() {
                let t = TupleIdx::Arrows(chain);
                if let Some(k) = self.space.tuple_position(&t) {
                    out = out.add(&self.values[k].scale(&coeff));
                }
                continue;
            }
            let a = &args[pos];
            assert_eq!(
                a.coeffs.len(),
                src.hom_dim(a.src, a.tgt),
                "argument not in the source category's hom basis"
            );
            if pos > 0 {
                assert_eq!(args[pos - 1].tgt, a.src, "arguments are not composable");
            }
            for (i, c) in a.coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let mut chain2 = chain.clone();
                chain2.push((a.src, a.tgt, i));
                stack.push((pos + 1, chain2, &coeff * c));
            }
        }
        out
    }

    /// Degree-0 value at an object.
    pub fn value_at_object(&self, x: usize) -> &ArrowVec {
        assert_eq!(self.space.degree, 0);
        self.value_at(&TupleIdx::Object(x))
    }
}

fn tuple_arrow(cat: &FinLinCat, (x, y, i): (usize, usize, usize)) -> ArrowVec {
    ArrowVec::basis(x, y, cat.hom_dim(x, y), i, cat.field)
}

/// Hochschild differential; output has degree n+1.  The sign convention is
/// the alternating extension of the displayed degree-2 category formula.
pub fn differential(phi: &Cochain) -> Cochain {
    let space = &phi.space;
    let n = space.degree;
    let out_space = CochainSpace::new(space.kind.clone(), n + 1);
    let mut out = Cochain::zero(&out_space);
    let src = space.kind.source_cat().clone();
    let val = space.kind.value_cat().clone();
    let field = space.field;
    let (fmap, gmap): (Option<&LinFunctor>, Option<&LinFunctor>) = match &space.kind {
        SpaceKind::Category(_) => (None, None),
        SpaceKind::Bimodule { f, g } => (Some(f), Some(g)),
    };
    for (k, t) in out_space.tuples.iter().enumerate() {
        let TupleIdx::Arrows(chain) = t else {
            unreachable!()
        };
        let args: Vec<ArrowVec> = chain.iter().map(|&a| tuple_arrow(&src, a)).collect();
        let mut acc = ArrowVec::zero(
            out_space.value_hom_at(k).0,
            out_space.value_hom_at(k).1,
            out_space.value_dim_at(k),
            field,
        );
        // term 0: F(f1) . phi(f2..f_{n+1})
        {
            let head = match fmap {
                Some(f) => f.apply(&args[0]),
                None => args[0].clone(),
            };
            let tail_val = if n == 0 {
                phi.value_at_object(args[0].tgt).clone()
            } else {
                phi.eval(&args[1..])
            };
            let term = val.compose_arrows(&head, &tail_val).unwrap();
            acc = acc.add(&term.scale_int(conv::diff_sign(0)));
        }
        // inner terms: merge f_i f_{i+1}
        for i in 1..=n {
            let merged = src.compose_arrows(&args[i - 1], &args[i]).unwrap();
            let mut inner: Vec<ArrowVec> = Vec::with_capacity(n);
            inner.extend_from_slice(&args[..i - 1]);
            inner.push(merged);
            inner.extend_from_slice(&args[i + 1..]);
            let term = phi.eval(&inner);
            acc = acc.add(&term.scale_int(conv::diff_sign(i)));
        }
        // last term: phi(f1..fn) . G(f_{n+1})
        {
            let tail = match gmap {
                Some(g) => g.apply(&args[n]),
                None => args[n].clone(),
            };
            let head_val = if n == 0 {
                phi.value_at_object(args[0].src).clone()
            } else {
                phi.eval(&args[..n])
            };
            let term = val.compose_arrows(&head_val, &tail).unwrap();
            acc = acc.add(&term.scale_int(conv::diff_sign(n + 1)));
        }
        out.values[k] = acc;
    }
    out
}

/// Pushforward H_*: C(F,G) -> C(H(F),H(G)), applying H to every value.
pub fn pushforward(h: &Arc<LinFunctor>, phi: &Cochain) -> Result<Cochain, HochschildError> {
    let SpaceKind::Bimodule { f, g } = &phi.space.kind else {
        return Err(HochschildError::CompositionMismatch(
            "pushforward needs a bimodule cochain".into(),
        ));
    };
    if f.target != h.source {
        return Err(HochschildError::CompositionMismatch(format!(
            "{} does not follow {}",
            h.name, f.name
        )));
    }
    let kind = SpaceKind::Bimodule {
        f: Arc::new(f.then(h)),
        g: Arc::new(g.then(h)),
    };
    let out_space = CochainSpace::new(kind, phi.space.degree);
    let mut out = Cochain::zero(&out_space);
    for (k, v) in phi.values.iter().enumerate() {
        debug_assert_eq!(out_space.tuples[k], phi.space.tuples[k]);
        out.values[k] = h.apply(v);
    }
    Ok(out)
}

/// Pullback F^*: C(G,H) -> C(G(F),H(F)), precomposing tuples with F.
pub fn pullback(f: &Arc<LinFunctor>, phi: &Cochain) -> Result<Cochain, HochschildError> {
    let SpaceKind::Bimodule { f: g, g: h } = &phi.space.kind else {
        return Err(HochschildError::CompositionMismatch(
            "pullback needs a bimodule cochain".into(),
        ));
    };
    if f.target != g.source {
        return Err(HochschildError::CompositionMismatch(format!(
            "{} does not precede {}",
            f.name, g.name
        )));
    }
    let kind = SpaceKind::Bimodule {
        f: Arc::new(f.then(g)),
        g: Arc::new(f.then(h)),
    };
    let out_space = CochainSpace::new(kind, phi.space.degree);
    let mut out = Cochain::zero(&out_space);
    for (k, t) in out_space.tuples.iter().enumerate() {
        match t {
            TupleIdx::Object(x) => {
                out.values[k] = phi.value_at_object(f.apply_obj(*x)).clone();
            }
            TupleIdx::Arrows(chain) => {
                let args: Vec<ArrowVec> = chain
                    .iter()
                    .map(|&a| f.apply(&tuple_arrow(&f.source, a)))
                    .collect();
                out.values[k] = phi.eval(&args);
            }
        }
    }
    Ok(out)
}

/// Pushforward F_*: C(A) -> C(F) on category cochains, F: A -> B, applying
/// F to every value.
pub fn cat_pushforward(f: &Arc<LinFunctor>, phi: &Cochain) -> Result<Cochain, HochschildError> {
    let SpaceKind::Category(a) = &phi.space.kind else {
        return Err(HochschildError::CompositionMismatch(
            "cat_pushforward needs a category cochain".into(),
        ));
    };
    if a != &f.source {
        return Err(HochschildError::CompositionMismatch(format!(
            "{} is not defined on C({})",
            f.name, a.name
        )));
    }
    let out_space = CochainSpace::new(SpaceKind::functor(f), phi.space.degree);
    let mut out = Cochain::zero(&out_space);
    for (k, v) in phi.values.iter().enumerate() {
        out.values[k] = f.apply(v);
    }
    Ok(out)
}

/// Pullback F^*: C(B) -> C(F) on category cochains, F: A -> B, evaluating on
/// F-images of tuples.
pub fn cat_pullback(f: &Arc<LinFunctor>, phi: &Cochain) -> Result<Cochain, HochschildError> {
    let SpaceKind::Category(b) = &phi.space.kind else {
        return Err(HochschildError::CompositionMismatch(
            "cat_pullback needs a category cochain".into(),
        ));
    };
    if b != &f.target {
        return Err(HochschildError::CompositionMismatch(format!(
            "{} does not land in C({})",
            f.name, b.name
        )));
    }
    let out_space = CochainSpace::new(SpaceKind::functor(f), phi.space.degree);
    let mut out = Cochain::zero(&out_space);
    for (k, t) in out_space.tuples.iter().enumerate() {
        match t {
            TupleIdx::Object(x) => {
                out.values[k] = phi.value_at_object(f.apply_obj(*x)).clone();
            }
            TupleIdx::Arrows(chain) => {
                let args: Vec<ArrowVec> = chain
                    .iter()
                    .map(|&a| f.apply(&tuple_arrow(&f.source, a)))
                    .collect();
                out.values[k] = phi.eval(&args);
            }
        }
    }
    Ok(out)
}

/// Pre-composition tau^*: C(F2,G) -> C(F1,G) for tau: F1 => F2.
pub fn nat_pre(tau: &NatTrans, phi: &Cochain) -> Result<Cochain, HochschildError> {
    let SpaceKind::Bimodule { f, g } = &phi.space.kind else {
        return Err(HochschildError::CompositionMismatch(
            "nat_pre needs a bimodule cochain".into(),
        ));
    };
    if !tau.target.same_functor(f) {
        return Err(HochschildError::CompositionMismatch(format!(
            "tau: {} => {} cannot precompose into C({},{})",
            tau.source.name, tau.target.name, f.name, g.name
        )));
    }
    let kind = SpaceKind::Bimodule {
        f: tau.source.clone(),
        g: g.clone(),
    };
    let out_space = CochainSpace::new(kind, phi.space.degree);
    let val = phi.space.kind.value_cat().clone();
    let mut out = Cochain::zero(&out_space);
    for (k, t) in out_space.tuples.iter().enumerate() {
        let (x0, _) = t.endpoints();
        out.values[k] = val
            .compose_arrows(tau.component(x0), &phi.values[k])
            .unwrap();
    }
    Ok(out)
}

/// Post-composition tau_*: C(G,F1) -> C(G,F2) for tau: F1 => F2.
pub fn nat_post(tau: &NatTrans, phi: &Cochain) -> Result<Cochain, HochschildError> {
    let SpaceKind::Bimodule { f, g } = &phi.space.kind else {
        return Err(HochschildError::CompositionMismatch(
            "nat_post needs a bimodule cochain".into(),
        ));
    };
    if !tau.source.same_functor(g) {
        return Err(HochschildError::CompositionMismatch(format!(
            "tau: {} => {} cannot postcompose into C({},{})",
            tau.source.name, tau.target.name, f.name, g.name
        )));
    }
    let kind = SpaceKind::Bimodule {
        f: f.clone(),
        g: tau.target.clone(),
    };
    let out_space = CochainSpace::new(kind, phi.space.degree);
    let val = phi.space.kind.value_cat().clone();
    let mut out = Cochain::zero(&out_space);
    for (k, t) in out_space.tuples.iter().enumerate() {
        let (_, xn) = t.endpoints();
        out.values[k] = val
            .compose_arrows(&phi.values[k], tau.component(xn))
            .unwrap();
    }
    Ok(out)
}

/// Brace insertion phi{sigma_1, .., sigma_r}: C^{n+r}(B) -> C^n(F0, Fr) for a
/// composable chain F0 => F1 => .. => Fr of natural transformations between
/// functors A -> B.  The value at (f1..fn) is the signed sum over insertion
/// positions 0 <= p1 <= .. <= pr <= n of phi applied to the n+r arrows
/// F0 f1, .., F0 f_{p1}, (sigma_1), F1 f_{p1+1}, .., (sigma_r), .., Fr f_n.
///
/// phi may also be a bimodule cochain over C(H1,H2) with H1, H2: B -> C; the
/// result then lands in C(F0 H1, Fr H2).
pub fn brace(phi: &Cochain, sigmas: &[&NatTrans]) -> Result<Cochain, HochschildError> {
    let r = sigmas.len();
    assert!((1..=3).contains(&r), "brace arity must be 1..=3");
    let bcat = phi.space.kind.source_cat().clone();
    for w in sigmas.windows(2) {
        if !w[0].target.same_functor(&w[1].source) {
            return Err(HochschildError::ChainMismatch(format!(
                "{} and {} are not a composable chain",
                w[0].name, w[1].name
            )));
        }
    }
    let f0 = sigmas[0].source.clone();
    let fr = sigmas[r - 1].target.clone();
    if f0.target != bcat {
        return Err(HochschildError::ChainMismatch(
            "chain functors do not land in the cochain's category".into(),
        ));
    }
    if phi.space.degree < r {
        return Err(HochschildError::ChainMismatch(format!(
            "brace needs degree >= {r}"
        )));
    }
    let n = phi.space.degree - r;
    let kind = match &phi.space.kind {
        SpaceKind::Category(_) => SpaceKind::Bimodule {
            f: f0.clone(),
            g: fr.clone(),
        },
        SpaceKind::Bimodule { f: h1, g: h2 } => SpaceKind::Bimodule {
            f: Arc::new(f0.then(h1)),
            g: Arc::new(fr.then(h2)),
        },
    };
    let out_space = CochainSpace::new(kind, n);
    let mut out = Cochain::zero(&out_space);
    let field = phi.space.field;
    let functors: Vec<&Arc<LinFunctor>> = {
        let mut v = vec![&sigmas[0].source];
        for s in sigmas {
            v.push(&s.target);
        }
        v
    };
    let global = conv::brace_global_sign(r);
    for (k, t) in out_space.tuples.iter().enumerate() {
        let base_args: Vec<ArrowVec> = match t {
            TupleIdx::Object(_) => Vec::new(),
            TupleIdx::Arrows(chain) => chain
                .iter()
                .map(|&a| tuple_arrow(&f0.source, a))
                .collect(),
        };
        // objects visited along the tuple: x_0 .. x_n
        let objects: Vec<usize> = match t {
            TupleIdx::Object(x) => vec![*x],
            TupleIdx::Arrows(chain) => {
                let mut v = vec![chain[0].0];
                for &(_, y, _) in chain {
                    v.push(y);
                }
                v
            }
        };
        let mut acc = ArrowVec::zero(
            out_space.value_hom_at(k).0,
            out_space.value_hom_at(k).1,
            out_space.value_dim_at(k),
            field,
        );
        // enumerate 0 <= p1 <= .. <= pr <= n
        let mut positions = vec![0usize; r];
        loop {
            let mut args: Vec<ArrowVec> = Vec::with_capacity(n + r);
            let mut seg = 0usize;
            let mut sign = 1i64;
            for (i, a) in base_args.iter().enumerate() {
                while seg < r && positions[seg] == i {
                    args.push(sigmas[seg].component(objects[i]).clone());
                    sign *= conv::brace_insertion_sign(i);
                    seg += 1;
                }
                args.push(functors[seg].apply(a));
            }
            while seg < r {
                args.push(sigmas[seg].component(objects[n]).clone());
                sign *= conv::brace_insertion_sign(n);
                seg += 1;
            }
            let term = phi.eval(&args);
            acc = acc.add(&term.scale_int(sign * global));
            // next nondecreasing tuple
            let mut i = r;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if positions[i] < n {
                    positions[i] += 1;
                    for j in i + 1..r {
                        positions[j] = positions[i];
                    }
                    break;
                }
                if i == 0 {
                    positions.clear();
                    break;
                }
            }
            if positions.is_empty() || positions[0] > n {
                break;
            }
            if positions.iter().all(|&p| p == 0) {
                break; // wrapped around
            }
        }
        out.values[k] = acc;
    }
    Ok(out)
}

/// Materialize a cochain operator as a matrix over the given source space.
pub fn operator_matrix(
    src_space: &Arc<CochainSpace>,
    tgt_dim: usize,
    op: impl Fn(&Cochain) -> Cochain,
) -> ExactMatrix {
    let field = src_space.field;
    let mut m = ExactMatrix::zero(tgt_dim, src_space.dim, field);
    for j in 0..src_space.dim {
        let b = Cochain::basis(src_space, j);
        let img = op(&b).to_flat();
        assert_eq!(img.len(), tgt_dim, "operator image dimension mismatch");
        for (i, v) in img.into_iter().enumerate() {
            if !v.is_zero() {
                m.set(i, j, v);
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const Q: Field = Field::Rational;

    fn random_cochain(space: &Arc<CochainSpace>, rng: &mut ChaCha8Rng) -> Cochain {
        let flat: Vec<Scalar> = (0..space.dim)
            .map(|_| Scalar::from_int(space.field, rng.gen_range(-5..=5)))
            .collect();
        Cochain::from_flat(space, &flat)
    }

    #[test]
    fn space_dimensions() {
        let pt = Arc::new(samples::point(Q));
        let s = CochainSpace::new(SpaceKind::Category(pt.clone()), 2);
        assert_eq!(s.dim, 1);

        let d = Arc::new(samples::dual_numbers(Q));
        let s = CochainSpace::new(SpaceKind::Category(d.clone()), 1);
        assert_eq!(s.dim, 4);

        // degree 0 bimodule: sum over objects of dim Hom(FX, GX)
        let idf = Arc::new(crate::fincat::LinFunctor::identity(&d));
        let s = CochainSpace::new(
            SpaceKind::Bimodule {
                f: idf.clone(),
                g: idf.clone(),
            },
            0,
        );
        assert_eq!(s.dim, 2);
    }

    /// The differential must reproduce the displayed degree-2 category
    /// formula: d(phi)(a,b,c) = phi(a,b)c - a phi(b,c) + phi(ab,c) - phi(a,bc).
    #[test]
    fn degree_two_differential_matches_display() {
        let d = Arc::new(samples::dual_numbers(Q));
        let space = CochainSpace::new(SpaceKind::Category(d.clone()), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let phi = random_cochain(&space, &mut rng);
        let dphi = differential(&phi);
        for t in d.composable_tuples(3) {
            let args: Vec<ArrowVec> = t
                .iter()
                .map(|&(x, y, i)| ArrowVec::basis(x, y, d.hom_dim(x, y), i, Q))
                .collect();
            let (a, b, c) = (&args[0], &args[1], &args[2]);
            let expect = d
                .compose_arrows(&phi.eval(&[a.clone(), b.clone()]), c)
                .unwrap()
                .sub(&d.compose_arrows(a, &phi.eval(&[b.clone(), c.clone()])).unwrap())
                .add(&phi.eval(&[d.compose_arrows(a, b).unwrap(), c.clone()]))
                .sub(&phi.eval(&[a.clone(), d.compose_arrows(b, c).unwrap()]));
            assert_eq!(dphi.eval(&args), expect);
        }
    }

    #[test]
    fn point_differential_in_low_degrees() {
        // On the one-object, one-arrow category: d of the C^1 basis cochain is
        // +- the C^2 basis cochain, and d of the C^2 basis cochain is 0.
        let pt = Arc::new(samples::point(Q));
        let s1 = CochainSpace::new(SpaceKind::Category(pt.clone()), 1);
        let s2 = CochainSpace::new(SpaceKind::Category(pt.clone()), 2);
        let b1 = Cochain::basis(&s1, 0);
        let db1 = differential(&b1);
        let flat = db1.to_flat();
        assert_eq!(flat.len(), 1);
        // alternating sum over identity tuples: -1 + 1 ... = +-1 or 0; in
        // degree 1 -> 2 the three terms give -phi + phi - phi = -phi
        assert!(!flat[0].is_zero());
        let b2 = Cochain::basis(&s2, 0);
        assert!(differential(&b2).is_zero());
    }

    #[test]
    fn d_squared_is_zero_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let cats = [
            Arc::new(samples::dual_numbers(Q)),
            Arc::new(samples::path_two(Q)),
            Arc::new(samples::group_z2(Field::default_prime())),
        ];
        for cat in &cats {
            let idf = Arc::new(crate::fincat::LinFunctor::identity(cat));
            let kinds = [
                SpaceKind::Category(cat.clone()),
                SpaceKind::Bimodule {
                    f: idf.clone(),
                    g: idf.clone(),
                },
            ];
            for kind in &kinds {
                for degree in 0..=3 {
                    let space = CochainSpace::new(kind.clone(), degree);
                    for _ in 0..17 {
                        let phi = random_cochain(&space, &mut rng);
                        assert!(
                            differential(&differential(&phi)).is_zero(),
                            "d^2 != 0 on {} degree {}",
                            kind.describe(),
                            degree
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn d_squared_nonidentity_bimodule() {
        // F,G distinct endofunctors of the dual numbers
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let d = Arc::new(samples::dual_numbers(Q));
        let f = Arc::new(samples::dual_scaling(&d, Scalar::from_int(Q, 2)));
        let g = Arc::new(samples::dual_scaling(&d, Scalar::from_int(Q, 3)));
        for degree in 0..=3 {
            let space = CochainSpace::new(
                SpaceKind::Bimodule {
                    f: f.clone(),
                    g: g.clone(),
                },
                degree,
            );
            for _ in 0..17 {
                let phi = random_cochain(&space, &mut rng);
                assert!(differential(&differential(&phi)).is_zero());
            }
        }
    }

    #[test]
    fn pushforward_pullback_basics() {
        let d = Arc::new(samples::dual_numbers(Q));
        let idf = Arc::new(crate::fincat::LinFunctor::identity(&d));
        let kill = Arc::new(samples::dual_scaling(&d, Scalar::zero(Q)));
        let space = CochainSpace::new(SpaceKind::functor(&idf), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let phi = random_cochain(&space, &mut rng);

        // identity functor leaves cochains unchanged
        let p = pushforward(&idf, &phi).unwrap();
        assert_eq!(p.to_flat(), phi.to_flat());
        let p = pullback(&idf, &phi).unwrap();
        assert_eq!(p.to_flat(), phi.to_flat());

        // a functor killing x sends span(x)-valued cochains to zero
        let mut xval = Cochain::zero(&space);
        for v in xval.values.iter_mut() {
            v.coeffs[1] = Scalar::one(Q);
        }
        assert!(pushforward(&kill, &xval).unwrap().is_zero());

        // chain map property: d H_* = H_* d and d F^* = F^* d
        for op in [true, false] {
            let lhs = if op {
                differential(&pushforward(&kill, &phi).unwrap())
            } else {
                differential(&pullback(&kill, &phi).unwrap())
            };
            let rhs = if op {
                pushforward(&kill, &differential(&phi)).unwrap()
            } else {
                pullback(&kill, &differential(&phi)).unwrap()
            };
            assert_eq!(lhs.to_flat(), rhs.to_flat());
        }
    }

    #[test]
    fn nat_pre_post_commute_and_are_linear() {
        let d = Arc::new(samples::dual_numbers(Q));
        let f1 = Arc::new(samples::dual_scaling(&d, Scalar::from_int(Q, 2)));
        let f2 = Arc::new(samples::dual_scaling(&d, Scalar::from_int(Q, 3)));
        let g1 = Arc::new(samples::dual_scaling(&d, Scalar::from_int(Q, 5)));
        let g2 = Arc::new(samples::dual_scaling(&d, Scalar::from_int(Q, 7)));
        let tau = samples::dual_nat(&f1, &f2, Scalar::zero(Q), Scalar::one(Q));
        let ups = samples::dual_nat(&g1, &g2, Scalar::zero(Q), Scalar::from_int(Q, 2));
        assert!(crate::fincat::validate_nat(&tau).is_valid());
        assert!(crate::fincat::validate_nat(&ups).is_valid());

        let space = CochainSpace::new(
            SpaceKind::Bimodule {
                f: f2.clone(),
                g: g1.clone(),
            },
            2,
        );
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let phi = random_cochain(&space, &mut rng);
        let a = nat_post(&ups, &nat_pre(&tau, &phi).unwrap()).unwrap();
        let b = nat_pre(&tau, &nat_post(&ups, &phi).unwrap()).unwrap();
        assert_eq!(a.to_flat(), b.to_flat());

        // linearity in the cochain argument
        let psi = random_cochain(&space, &mut rng);
        let lhs = nat_pre(&tau, &phi.add(&psi)).unwrap();
        let rhs = nat_pre(&tau, &phi).unwrap().add(&nat_pre(&tau, &psi).unwrap());
        assert_eq!(lhs.to_flat(), rhs.to_flat());
    }

    #[test]
    fn brace_low_degree_cases() {
        let pt = Arc::new(samples::point(Q));
        let idf = Arc::new(crate::fincat::LinFunctor::identity(&pt));
        let sigma = NatTrans::identity(&idf);

        // r=1, n=0: brace(phi, sigma) at X = phi(sigma_X)
        let s1 = CochainSpace::new(SpaceKind::Category(pt.clone()), 1);
        let phi = Cochain::basis(&s1, 0);
        let b = brace(&phi, &[&sigma]).unwrap();
        let v = b.value_at_object(0);
        assert!(v.coeffs[0].is_one());

        // brace(0, sigma) = 0
        let z = Cochain::zero(&s1);
        assert!(brace(&z, &[&sigma]).unwrap().is_zero());

        // r=2 over the point with identity functors: a C^2 cochain braces to
        // the product of the component coefficients (up to the global sign)
        let s2 = CochainSpace::new(SpaceKind::Category(pt.clone()), 2);
        let phi2 = Cochain::basis(&s2, 0).scale_int(4);
        let tau = NatTrans::identity(&idf);
        let b2 = brace(&phi2, &[&sigma, &tau]).unwrap();
        assert_eq!(b2.space.degree, 0);
        let got = &b2.value_at_object(0).coeffs[0];
        let expect = Scalar::from_int(Q, 4 * conv::brace_global_sign(2));
        assert_eq!(got, &expect);
    }

    #[test]
    fn brace_is_linear() {
        let d = Arc::new(samples::dual_numbers(Q));
        let f = Arc::new(samples::dual_scaling(&d, Scalar::from_int(Q, 2)));
        let g = Arc::new(samples::dual_scaling(&d, Scalar::from_int(Q, 3)));
        let sigma = samples::dual_nat(&f, &g, Scalar::zero(Q), Scalar::one(Q));
        let s = CochainSpace::new(SpaceKind::Category(d.clone()), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let phi = random_cochain(&s, &mut rng);
        let psi = random_cochain(&s, &mut rng);
        let lhs = brace(&phi.add(&psi), &[&sigma]).unwrap();
        let rhs = brace(&phi, &[&sigma])
            .unwrap()
            .add(&brace(&psi, &[&sigma]).unwrap());
        assert_eq!(lhs.to_flat(), rhs.to_flat());
    }
}

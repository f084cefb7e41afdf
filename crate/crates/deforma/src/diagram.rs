//! Pasting diagrams: labeled computads with categories at 0-cells, functors
//! at 1-cells, natural transformations at 2-cells and equations between
//! pasting composites at 3-cells.
//!
//! A 2-cell's domain and codomain are directed edge paths; its label is a
//! natural transformation between the path composites.  A 3-cell carries a
//! composition tree for each side; both sides must have equal composites in
//! the diagram itself.

use crate::fincat::{self, FinLinCat, LinFunctor, NatTrans, Report};
use crate::scalar::Field;
use std::collections::BTreeSet;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiagramError {
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),
    #[error("tree boundary mismatch: {0}")]
    TreeBoundaryMismatch(String),
    #[error("overlap mismatch: {0}")]
    OverlapMismatch(String),
}

/// A 0-cell: a category with a positional display name.
#[derive(Debug, Clone)]
pub struct Cat0 {
    pub name: String,
    pub cat: Arc<FinLinCat>,
}

/// A 1-cell: a functor between two categories of the diagram.
#[derive(Debug, Clone)]
pub struct Edge {
    pub name: String,
    pub src: usize,
    pub tgt: usize,
    pub functor: Arc<LinFunctor>,
}

/// A 2-cell: a natural transformation from the composite of `dom_path` to
/// the composite of `cod_path` (paths of edge indices, head to tail).
#[derive(Debug, Clone)]
pub struct Cell2 {
    pub name: String,
    pub dom_path: Vec<usize>,
    pub cod_path: Vec<usize>,
    pub nat: Arc<NatTrans>,
    /// constrained to be deformed trivially
    pub trivial: bool,
}

impl Cell2 {
    pub fn is_bigon(&self) -> bool {
        self.dom_path.len() == 1 && self.cod_path.len() == 1
    }
}

/// How the 2-cells of one side of a 3-cell paste together.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PastingTree {
    /// a single 2-cell
    Cell(usize),
    /// vertical composition, left then right
    Comp2(Box<PastingTree>, Box<PastingTree>),
    /// whisker on the left by an edge (precompose the functors)
    WhiskPre(usize, Box<PastingTree>),
    /// whisker on the right by an edge (postcompose the functors)
    WhiskPost(Box<PastingTree>, usize),
}

impl PastingTree {
    pub fn cell(i: usize) -> PastingTree {
        PastingTree::Cell(i)
    }

    pub fn comp2(l: PastingTree, r: PastingTree) -> PastingTree {
        PastingTree::Comp2(Box::new(l), Box::new(r))
    }

    pub fn leaves(&self, out: &mut Vec<usize>) {
        match self {
            PastingTree::Cell(i) => out.push(*i),
            PastingTree::Comp2(l, r) => {
                l.leaves(out);
                r.leaves(out);
            }
            PastingTree::WhiskPre(_, t) | PastingTree::WhiskPost(t, _) => t.leaves(out),
        }
    }
}

/// A 3-cell: an equation between two pasting composites.
#[derive(Debug, Clone)]
pub struct Cell3 {
    pub name: String,
    pub dom: PastingTree,
    pub cod: PastingTree,
}

#[derive(Debug, Clone)]
pub struct PastingDiagram {
    pub name: String,
    pub field: Field,
    pub cats: Vec<Cat0>,
    pub edges: Vec<Edge>,
    pub cells2: Vec<Cell2>,
    pub cells3: Vec<Cell3>,
}

impl PastingDiagram {
    pub fn new(name: &str, field: Field) -> PastingDiagram {
        PastingDiagram {
            name: name.into(),
            field,
            cats: Vec::new(),
            edges: Vec::new(),
            cells2: Vec::new(),
            cells3: Vec::new(),
        }
    }

    pub fn add_cat(&mut self, name: &str, c: Arc<FinLinCat>) -> usize {
        self.cats.push(Cat0 {
            name: name.into(),
            cat: c,
        });
        self.cats.len() - 1
    }

    pub fn add_edge(&mut self, name: &str, src: usize, tgt: usize, f: Arc<LinFunctor>) -> usize {
        assert_eq!(f.source, self.cats[src].cat, "edge source category mismatch");
        assert_eq!(f.target, self.cats[tgt].cat, "edge target category mismatch");
        self.edges.push(Edge {
            name: name.into(),
            src,
            tgt,
            functor: f,
        });
        self.edges.len() - 1
    }

    pub fn add_cell2(
        &mut self,
        name: &str,
        dom_path: Vec<usize>,
        cod_path: Vec<usize>,
        nat: Arc<NatTrans>,
    ) -> usize {
        self.cells2.push(Cell2 {
            name: name.into(),
            dom_path,
            cod_path,
            nat,
            trivial: false,
        });
        self.cells2.len() - 1
    }

    pub fn add_cell3(&mut self, name: &str, dom: PastingTree, cod: PastingTree) -> usize {
        self.cells3.push(Cell3 {
            name: name.into(),
            dom,
            cod,
        });
        self.cells3.len() - 1
    }

    /// Composite functor along an edge path (nonempty, head to tail).
    pub fn path_functor(&self, path: &[usize]) -> Arc<LinFunctor> {
        assert!(!path.is_empty(), "empty path has no composite");
        let mut f = self.edges[path[0]].functor.as_ref().clone();
        for &e in &path[1..] {
            f = f.then(&self.edges[e].functor);
        }
        Arc::new(f)
    }

    pub fn path_endpoints(&self, path: &[usize]) -> Option<(usize, usize)> {
        if path.is_empty() {
            return None;
        }
        for w in path.windows(2) {
            if self.edges[w[0]].tgt != self.edges[w[1]].src {
                return None;
            }
        }
        Some((self.edges[path[0]].src, self.edges[*path.last().unwrap()].tgt))
    }

    /// The natural transformation named by a pasting tree, computed in the
    /// tautologous model.
    pub fn tree_composite(&self, tree: &PastingTree) -> Result<NatTrans, DiagramError> {
        match tree {
            PastingTree::Cell(i) => {
                let c = self
                    .cells2
                    .get(*i)
                    .ok_or_else(|| DiagramError::TreeBoundaryMismatch(format!("no 2-cell #{i}")))?;
                Ok(c.nat.as_ref().clone())
            }
            PastingTree::Comp2(l, r) => {
                let a = self.tree_composite(l)?;
                let b = self.tree_composite(r)?;
                if !a.target.same_functor(&b.source) {
                    return Err(DiagramError::TreeBoundaryMismatch(
                        "vertical composition endpoints differ".into(),
                    ));
                }
                Ok(a.vcompose(&b))
            }
            PastingTree::WhiskPre(e, t) => {
                let a = self.tree_composite(t)?;
                let f = &self.edges[*e].functor;
                if f.target != a.source.source {
                    return Err(DiagramError::TreeBoundaryMismatch(
                        "left whisker endpoint mismatch".into(),
                    ));
                }
                Ok(a.whisker_pre(f))
            }
            PastingTree::WhiskPost(t, e) => {
                let a = self.tree_composite(t)?;
                let h = &self.edges[*e].functor;
                if a.source.target != h.source {
                    return Err(DiagramError::TreeBoundaryMismatch(
                        "right whisker endpoint mismatch".into(),
                    ));
                }
                Ok(a.whisker_post(h))
            }
        }
    }

    /// Boundary compatibility at every dimension, label validity, and the
    /// 3-cell composite equations.
    pub fn validate(&self) -> Report {
        let mut report = Report::default();
        for c in &self.cats {
            let r = fincat::validate_category(&c.cat);
            report.entries.extend(r.entries);
            if c.cat.field != self.field {
                report.push(format!("category {} uses a different field", c.name));
            }
        }
        for e in &self.edges {
            let r = fincat::validate_functor(&e.functor);
            report.entries.extend(r.entries);
        }
        for c in &self.cells2 {
            let Some((d0, d1)) = self.path_endpoints(&c.dom_path) else {
                report.push(format!("2-cell {}: domain path is not composable", c.name));
                continue;
            };
            let Some((c0, c1)) = self.path_endpoints(&c.cod_path) else {
                report.push(format!("2-cell {}: codomain path is not composable", c.name));
                continue;
            };
            if (d0, d1) != (c0, c1) {
                report.push(format!(
                    "2-cell {}: domain and codomain paths have different endpoints",
                    c.name
                ));
                continue;
            }
            let fd = self.path_functor(&c.dom_path);
            let fc = self.path_functor(&c.cod_path);
            if !c.nat.source.same_functor(&fd) || !c.nat.target.same_functor(&fc) {
                report.push(format!(
                    "2-cell {}: label does not go from the domain composite to the codomain composite",
                    c.name
                ));
                continue;
            }
            let r = fincat::validate_nat(&c.nat);
            report.entries.extend(r.entries);
        }
        for c in &self.cells3 {
            match (self.tree_composite(&c.dom), self.tree_composite(&c.cod)) {
                (Ok(a), Ok(b)) => {
                    if !a.source.same_functor(&b.source) || !a.target.same_functor(&b.target) {
                        report.push(format!("3-cell {}: sides are not parallel", c.name));
                    } else if a.components != b.components {
                        report.push(format!(
                            "3-cell {}: the two pasting composites differ",
                            c.name
                        ));
                    }
                }
                (Err(e), _) | (_, Err(e)) => {
                    report.push(format!("3-cell {}: {}", c.name, e));
                }
            }
        }
        report
    }

    /// Cell names, used for union gluing.
    pub fn cell_names(&self) -> BTreeSet<String> {
        let mut s = BTreeSet::new();
        for c in &self.cats {
            s.insert(format!("cat:{}", c.name));
        }
        for e in &self.edges {
            s.insert(format!("edge:{}", e.name));
        }
        for c in &self.cells2 {
            s.insert(format!("cell2:{}", c.name));
        }
        for c in &self.cells3 {
            s.insert(format!("cell3:{}", c.name));
        }
        s
    }
}

/// Union of two diagrams, gluing cells with equal names.  Cells that share a
/// name must agree structurally.
pub fn union_diagrams(
    d1: &PastingDiagram,
    d2: &PastingDiagram,
) -> Result<PastingDiagram, DiagramError> {
    if d1.field != d2.field {
        return Err(DiagramError::OverlapMismatch("fields differ".into()));
    }
    let mut out = PastingDiagram::new(&format!("{}+{}", d1.name, d2.name), d1.field);
    out.cats = d1.cats.clone();
    out.edges = d1.edges.clone();
    out.cells2 = d1.cells2.clone();
    out.cells3 = d1.cells3.clone();

    // map d2 cat index -> out cat index
    let mut cat_map = Vec::new();
    for c in &d2.cats {
        match out.cats.iter().position(|x| x.name == c.name) {
            Some(i) => {
                if out.cats[i].cat != c.cat {
                    return Err(DiagramError::OverlapMismatch(format!(
                        "category {} differs between the two diagrams",
                        c.name
                    )));
                }
                cat_map.push(i);
            }
            None => {
                out.cats.push(c.clone());
                cat_map.push(out.cats.len() - 1);
            }
        }
    }
    let mut edge_map = Vec::new();
    for e in &d2.edges {
        match out.edges.iter().position(|x| x.name == e.name) {
            Some(i) => {
                if !out.edges[i].functor.same_functor(&e.functor)
                    || out.edges[i].src != cat_map[e.src]
                    || out.edges[i].tgt != cat_map[e.tgt]
                {
                    return Err(DiagramError::OverlapMismatch(format!(
                        "edge {} differs between the two diagrams",
                        e.name
                    )));
                }
                edge_map.push(i);
            }
            None => {
                out.edges.push(Edge {
                    name: e.name.clone(),
                    src: cat_map[e.src],
                    tgt: cat_map[e.tgt],
                    functor: e.functor.clone(),
                });
                edge_map.push(out.edges.len() - 1);
            }
        }
    }
    let mut cell2_map = Vec::new();
    for c in &d2.cells2 {
        let dom: Vec<usize> = c.dom_path.iter().map(|&e| edge_map[e]).collect();
        let cod: Vec<usize> = c.cod_path.iter().map(|&e| edge_map[e]).collect();
        match out.cells2.iter().position(|x| x.name == c.name) {
            Some(i) => {
                let x = &out.cells2[i];
                if x.dom_path != dom || x.cod_path != cod || x.nat.components != c.nat.components {
                    return Err(DiagramError::OverlapMismatch(format!(
                        "2-cell {} differs between the two diagrams",
                        c.name
                    )));
                }
                cell2_map.push(i);
            }
            None => {
                out.cells2.push(Cell2 {
                    name: c.name.clone(),
                    dom_path: dom,
                    cod_path: cod,
                    nat: c.nat.clone(),
                    trivial: c.trivial,
                });
                cell2_map.push(out.cells2.len() - 1);
            }
        }
    }
    fn remap_tree(t: &PastingTree, edge_map: &[usize], cell2_map: &[usize]) -> PastingTree {
        match t {
            PastingTree::Cell(i) => PastingTree::Cell(cell2_map[*i]),
            PastingTree::Comp2(l, r) => PastingTree::Comp2(
                Box::new(remap_tree(l, edge_map, cell2_map)),
                Box::new(remap_tree(r, edge_map, cell2_map)),
            ),
            PastingTree::WhiskPre(e, t) => {
                PastingTree::WhiskPre(edge_map[*e], Box::new(remap_tree(t, edge_map, cell2_map)))
            }
            PastingTree::WhiskPost(t, e) => {
                PastingTree::WhiskPost(Box::new(remap_tree(t, edge_map, cell2_map)), edge_map[*e])
            }
        }
    }
    for c in &d2.cells3 {
        let dom = remap_tree(&c.dom, &edge_map, &cell2_map);
        let cod = remap_tree(&c.cod, &edge_map, &cell2_map);
        match out.cells3.iter().position(|x| x.name == c.name) {
            Some(i) => {
                if out.cells3[i].dom != dom || out.cells3[i].cod != cod {
                    return Err(DiagramError::OverlapMismatch(format!(
                        "3-cell {} differs between the two diagrams",
                        c.name
                    )));
                }
            }
            None => {
                out.cells3.push(Cell3 {
                    name: c.name.clone(),
                    dom,
                    cod,
                });
            }
        }
    }
    Ok(out)
}

//! Small stock categories and functors used by tests, the fixture suite and
//! the randomized generators: the one-object point category, dual numbers,
//! group algebra of Z/2, a split pair of idempotents, and path categories.

use crate::fincat::{ArrowVec, FinLinCat, LinFunctor, NatTrans};
use crate::matrix::ExactMatrix;
use crate::scalar::{Field, Scalar};
use std::collections::BTreeMap;
use std::sync::Arc;

/// One object, one-dimensional hom spanned by the identity.
pub fn point(field: Field) -> FinLinCat {
    let mut hom_basis = BTreeMap::new();
    hom_basis.insert((0, 0), vec!["id".to_string()]);
    let mut compose = BTreeMap::new();
    compose.insert((0, 0, 0), vec![vec![vec![Scalar::one(field)]]]);
    FinLinCat {
        name: "1".into(),
        field,
        objects: vec!["*".into()],
        hom_basis,
        compose,
        identity: vec![vec![Scalar::one(field)]],
    }
}

/// Dual numbers k[x]/(x^2) as a one-object category with hom basis {1, x}.
pub fn dual_numbers(field: Field) -> FinLinCat {
    let one = Scalar::one(field);
    let zero = Scalar::zero(field);
    let mut hom_basis = BTreeMap::new();
    hom_basis.insert((0, 0), vec!["1".to_string(), "x".to_string()]);
    // rows: a index, cols: b index, value: coeffs of a*b over {1, x}
    let table = vec![
        vec![
            vec![one.clone(), zero.clone()], // 1*1 = 1
            vec![zero.clone(), one.clone()], // 1*x = x
        ],
        vec![
            vec![zero.clone(), one.clone()],  // x*1 = x
            vec![zero.clone(), zero.clone()], // x*x = 0
        ],
    ];
    let mut compose = BTreeMap::new();
    compose.insert((0, 0, 0), table);
    FinLinCat {
        name: "D".into(),
        field,
        objects: vec!["*".into()],
        hom_basis,
        compose,
        identity: vec![vec![one, zero]],
    }
}

/// Group algebra k[Z/2]: one object, hom basis {1, g}, g*g = 1.
pub fn group_z2(field: Field) -> FinLinCat {
    let one = Scalar::one(field);
    let zero = Scalar::zero(field);
    let table = vec![
        vec![
            vec![one.clone(), zero.clone()],
            vec![zero.clone(), one.clone()],
        ],
        vec![
            vec![zero.clone(), one.clone()],
            vec![one.clone(), zero.clone()],
        ],
    ];
    let mut hom_basis = BTreeMap::new();
    hom_basis.insert((0, 0), vec!["1".to_string(), "g".to_string()]);
    let mut compose = BTreeMap::new();
    compose.insert((0, 0, 0), table);
    FinLinCat {
        name: "kZ2".into(),
        field,
        objects: vec!["*".into()],
        hom_basis,
        compose,
        identity: vec![vec![one, zero]],
    }
}

/// k x k: one object, two orthogonal idempotents e1, e2; identity e1 + e2.
pub fn split_pair(field: Field) -> FinLinCat {
    let one = Scalar::one(field);
    let zero = Scalar::zero(field);
    let table = vec![
        vec![
            vec![one.clone(), zero.clone()],
            vec![zero.clone(), zero.clone()],
        ],
        vec![
            vec![zero.clone(), zero.clone()],
            vec![zero.clone(), one.clone()],
        ],
    ];
    let mut hom_basis = BTreeMap::new();
    hom_basis.insert((0, 0), vec!["e1".to_string(), "e2".to_string()]);
    let mut compose = BTreeMap::new();
    compose.insert((0, 0, 0), table);
    FinLinCat {
        name: "kxk".into(),
        field,
        objects: vec!["*".into()],
        hom_basis,
        compose,
        identity: vec![vec![one.clone(), one]],
    }
}

/// Path category of X -> Y: objects X, Y; arrows id_X, id_Y and one arrow x.
pub fn path_two(field: Field) -> FinLinCat {
    let one = Scalar::one(field);
    let mut hom_basis = BTreeMap::new();
    hom_basis.insert((0, 0), vec!["idX".to_string()]);
    hom_basis.insert((1, 1), vec!["idY".to_string()]);
    hom_basis.insert((0, 1), vec!["x".to_string()]);
    let mut compose = BTreeMap::new();
    compose.insert((0, 0, 0), vec![vec![vec![one.clone()]]]);
    compose.insert((1, 1, 1), vec![vec![vec![one.clone()]]]);
    compose.insert((0, 0, 1), vec![vec![vec![one.clone()]]]); // idX * x = x
    compose.insert((0, 1, 1), vec![vec![vec![one.clone()]]]); // x * idY = x
    FinLinCat {
        name: "P2".into(),
        field,
        objects: vec!["X".into(), "Y".into()],
        hom_basis,
        compose,
        identity: vec![vec![one.clone()], vec![one]],
    }
}

/// Kronecker-style category: X -> Y with a two-dimensional hom {x1, x2}.
pub fn kronecker(field: Field) -> FinLinCat {
    let one = Scalar::one(field);
    let zero = Scalar::zero(field);
    let mut hom_basis = BTreeMap::new();
    hom_basis.insert((0, 0), vec!["idX".to_string()]);
    hom_basis.insert((1, 1), vec!["idY".to_string()]);
    hom_basis.insert((0, 1), vec!["x1".to_string(), "x2".to_string()]);
    let mut compose = BTreeMap::new();
    compose.insert((0, 0, 0), vec![vec![vec![one.clone()]]]);
    compose.insert((1, 1, 1), vec![vec![vec![one.clone()]]]);
    compose.insert(
        (0, 0, 1),
        vec![vec![
            vec![one.clone(), zero.clone()],
            vec![zero.clone(), one.clone()],
        ]],
    );
    compose.insert(
        (0, 1, 1),
        vec![
            vec![vec![one.clone(), zero.clone()]],
            vec![vec![zero.clone(), one.clone()]],
        ],
    );
    FinLinCat {
        name: "K2".into(),
        field,
        objects: vec!["X".into(), "Y".into()],
        hom_basis,
        compose,
        identity: vec![vec![one.clone()], vec![one]],
    }
}

/// Endofunctor of the dual numbers sending x to alpha * x.
pub fn dual_scaling(d: &Arc<FinLinCat>, alpha: Scalar) -> LinFunctor {
    let field = d.field;
    let mut m = ExactMatrix::identity(2, field);
    m.set(1, 1, alpha.clone());
    let mut arrow_map = BTreeMap::new();
    arrow_map.insert((0, 0), m);
    LinFunctor {
        name: format!("S[{alpha}]"),
        source: d.clone(),
        target: d.clone(),
        object_map: vec![0],
        arrow_map,
    }
}

/// Natural transformation t*x : S[alpha] => S[beta] on the dual numbers.
/// Natural for any alpha, beta, t; when alpha = beta, s*1 + t*x also works.
pub fn dual_nat(
    f: &Arc<LinFunctor>,
    g: &Arc<LinFunctor>,
    s: Scalar,
    t: Scalar,
) -> NatTrans {
    let component = ArrowVec {
        src: 0,
        tgt: 0,
        coeffs: vec![s, t],
    };
    NatTrans {
        name: "nu".into(),
        source: f.clone(),
        target: g.clone(),
        components: vec![component],
    }
}

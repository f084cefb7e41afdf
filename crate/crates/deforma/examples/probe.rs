use deforma::complex::{assemble, AssembleOptions};
use deforma::scalar::Field;
use deforma::shapes;

fn main() {
    let q = Field::Rational;
    let mut d = shapes::triple_pillow(q, [1, 2, 3, 4], [1, 1, 2], false);
    d.cells3.clear();
    d.cells2.remove(3);
    let opts = AssembleOptions { n_max: 2, force_dtop: None };
    let h = deforma::complex::association_homotopy(&d, 0, 1, 2, opts).unwrap();
    let n = 1i64;
    let src = &h.source;
    let dm = h.psi_left.matrix(src, &h.target, n).sub(&h.psi_right.matrix(src, &h.target, n));
    let dh = h.target.diff_matrix(n - 1).mul(&h.homotopy[&n]);
    let hd = h.homotopy[&(n + 1)].mul(&src.diff_matrix(n));
    // restrict to the B column block
    let bcol = 1usize;
    let off = src.flat_offset(bcol, n);
    let bdim = src.summand_dims(n)[bcol];
    println!("B column offset {off} dim {bdim}, target dim {}", h.target.total_dim(n));
    let show = |name: &str, m: &deforma::matrix::ExactMatrix| {
        print!("{name}: ");
        for i in 0..m.rows() {
            for j in off..(off + bdim) {
                print!("{} ", m.get(i, j));
            }
            print!("| ");
        }
        println!();
    };
    show("dm", &dm);
    show("dh", &dh);
    show("hd", &hd);
    // check non-B columns of dm vanish
    let mut nonb = true;
    for i in 0..dm.rows() {
        for j in 0..dm.cols() {
            if (j < off || j >= off + bdim) && !dm.get(i, j).is_zero() {
                nonb = false;
            }
        }
    }
    println!("dm supported on B column only: {nonb}");
    for (s1, s2) in [(1i64, 1i64), (1, -1), (-1, 1), (-1, -1), (2, 2), (-2, -2)] {
        let t1 = dh.scale(&deforma::scalar::Scalar::from_int(q, s1));
        let t2 = hd.scale(&deforma::scalar::Scalar::from_int(q, s2));
        let r = dm.sub(&t1).sub(&t2);
        println!("s1={s1} s2={s2} zero={}", r.is_zero());
    }
}

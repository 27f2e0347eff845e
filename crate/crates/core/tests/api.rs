use gpart::{kaffpa, Mode};

#[test]
fn path_bisection_through_raw_arrays() {
    let xadj = [0, 1, 3, 5, 6];
    let adjncy = [1, 0, 2, 1, 3, 2];
    let out = kaffpa(4, None, &xadj, None, &adjncy, 2, 0.03, true, 0, Mode::Eco).unwrap();
    assert_eq!(out.edgecut, 1);
    assert_eq!(out.part.len(), 4);
}

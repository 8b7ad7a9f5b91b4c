use gsheaf_core::logic::{count_formulas, parse_signature};

#[test]
fn sizes() {
    for text in [
        "rel R/1",
        "rel R/2",
        "rel R/2 rel S/2",
        "rel R/2 rel S/2 fun f/1",
        "rel R/2 rel S/2 fun f/1 const c",
        "rel R/1 fun f/1 const c",
    ] {
        let sig = parse_signature(text).unwrap();
        println!(
            "{text:35} d2fv1={:>12} d2fv2={:>14} d1fv2={:>8}",
            count_formulas(&sig, 2, 1),
            count_formulas(&sig, 2, 2),
            count_formulas(&sig, 1, 2),
        );
    }
}

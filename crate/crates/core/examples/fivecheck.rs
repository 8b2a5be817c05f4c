use deltasieve::subgraph::*;
fn main() {
    for k in 1..=12u32 {
        let (p, pd) = builtin_decomposition(BuiltinPattern::Path(k)).unwrap();
        match five_partition(&p, &pd) {
            Ok(fp) => println!("path:{k} ok L={:?} S={:?} M={:?} T={:?} R={:?}", fp.l.members(), fp.s.members(), fp.m.members(), fp.t.members(), fp.r.members()),
            Err(e) => println!("path:{k} FAIL {e}"),
        }
    }
    for m in 1..=6u32 {
        let (p, pd) = builtin_decomposition(BuiltinPattern::Matching(m)).unwrap();
        match five_partition(&p, &pd) {
            Ok(fp) => println!("matching:{m} ok L={:?} S={:?} M={:?} T={:?} R={:?}", fp.l.members(), fp.s.members(), fp.m.members(), fp.t.members(), fp.r.members()),
            Err(e) => println!("matching:{m} FAIL {e}"),
        }
    }
    for k in 3..=12u32 {
        let (p, pd) = builtin_decomposition(BuiltinPattern::Cycle(k)).unwrap();
        match five_partition(&p, &pd) {
            Ok(fp) => println!("cycle:{k} ok L={:?} S={:?} M={:?} T={:?} R={:?}", fp.l.members(), fp.s.members(), fp.m.members(), fp.t.members(), fp.r.members()),
            Err(e) => println!("cycle:{k} FAIL {e}"),
        }
    }
}

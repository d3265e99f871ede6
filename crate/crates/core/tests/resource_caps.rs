//! The dimension cap is process-wide, so everything that lowers it lives in
//! this one test and runs sequentially.

use catlab::catalysis::min_k_copy;
use catlab::convex_split::mix_channel;
use catlab::experiments::{estimate_psucc, SamplerKind, SweepConfig};
use catlab::simplex::set_dimension_cap;
use catlab::{Error, ProbVec, ThermalContext};

fn with_cap<T>(cap: usize, f: impl FnOnce() -> T) -> T {
    let prev = set_dimension_cap(cap);
    let out = f();
    set_dimension_cap(prev);
    out
}

fn pv(x: &[f64]) -> ProbVec {
    ProbVec::new(x.to_vec()).unwrap()
}

#[test]
fn cap_breaches_surface_everywhere() {
    let (p, q) = (pv(&[0.65, 0.2, 0.15]), pv(&[0.5, 0.4, 0.1]));

    // This pair first succeeds at k = 3, whose 4^3 = 64 entries exceed a cap of 50.
    let (a, b) = (pv(&[0.45, 0.25, 0.25, 0.05]), pv(&[0.4, 0.35, 0.15, 0.1]));
    let u4 = ThermalContext::degenerate(4);
    match with_cap(50, || min_k_copy(&a, &b, &u4, 8)) {
        Err(Error::ResourceLimit { what, .. }) => assert!(what.contains("k = 3"), "{what}"),
        other => panic!("expected a cap breach, got {other:?}"),
    }
    assert_eq!(min_k_copy(&a, &b, &u4, 8).unwrap(), Some(3));

    let r = with_cap(1000, || {
        mix_channel(&ProbVec::uniform(3), &ProbVec::uniform(3), 9)
    });
    assert!(r.unwrap_err().is_resource_limit());

    let cfg = SweepConfig {
        n_c: 10,
        ..SweepConfig::default()
    }
    .condition(64, SamplerKind::Exponential)
    .unwrap();
    let e = with_cap(100, || estimate_psucc(&p, &q, &cfg)).unwrap();
    assert_eq!((e.cap_breaches, e.trials), (10, 0));
    assert!(e.p_succ.is_nan());

    // Restored cap: the same estimate completes.
    let e = estimate_psucc(&p, &q, &cfg).unwrap();
    assert_eq!((e.cap_breaches, e.trials), (0, 10));
}

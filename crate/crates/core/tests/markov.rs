//! Chain construction, steady states, transient PMFs, indices and
//! timer-free aggregation.

mod common;

use num_traits::{One, Zero};

use dtsd_core::expr::{parse_static, parse_static_with};
use dtsd_core::lts::{Lts, Tag};
use dtsd_core::markov::{
    closed_classes, decompose, dtmc, edtmc, evaluate, rdtmc, smc_pmf, smc_pmf_via_dtmc, smc_pmf_via_rdtmc, sojourn,
    steady_state, timer_free_aggregate, transient, ChainKind, PhiRoutes, Query, QueryFile, Time,
};
use dtsd_core::opsem::build_ts;
use dtsd_core::rational::{q, qi};
use dtsd_core::{Error, Q};

fn ts(src: &str) -> Lts {
    build_ts(&parse_static(src).unwrap()).unwrap().lts
}

/// Travel system with states in the reference numbering s1..s5.
fn travel(params: &std::collections::HashMap<String, Q>) -> (Lts, Vec<usize>) {
    let t = build_ts(&parse_static_with(common::TRAVEL, params).unwrap()).unwrap();
    let f = common::FIXTURES.last().unwrap();
    let order = f
        .states
        .iter()
        .map(|(sig, _)| (0..t.states.len()).find(|&i| common::signature(&t.states[i]) == *sig).unwrap())
        .collect();
    (t.lts, order)
}

fn sname(i: usize) -> String {
    format!("s{}", i + 1)
}

#[test]
fn travel_sojourn_vectors() {
    let (lts, o) = travel(&common::travel_params());
    let soj = sojourn(&lts);
    let fin = |v: &[Time]| -> Vec<Q> { o.iter().map(|&i| v[i].finite().unwrap().clone()).collect() };
    assert_eq!(fin(&soj.sj), [qi(2), qi(1), qi(0), qi(2), qi(3)]);
    // ((1−ρ)/ρ², 0, 0, (1−θ)/θ², (1−φ)/φ²) at ρ=θ=1/2, φ=1/3
    assert_eq!(fin(&soj.var), [qi(2), qi(0), qi(0), qi(2), qi(6)]);
    for s in 0..lts.len() {
        if lts.states[s].tag.is_tangible() {
            assert_eq!(soj.sj[s], Time::Finite(soj.sl[s].clone()));
        }
    }
}

#[test]
fn travel_dtmc_and_edtmc_rows() {
    let (lts, o) = travel(&common::travel_params());
    let p = dtmc(&lts);
    p.validate().unwrap();
    let row = |m: &Vec<Vec<Q>>, i: usize| -> Vec<Q> { o.iter().map(|&j| m[o[i]][j].clone()).collect() };
    assert_eq!(row(&p.tpm, 0), [q(1, 2), q(1, 2), qi(0), qi(0), qi(0)]);
    let (e, _) = edtmc(&lts);
    e.validate().unwrap();
    assert_eq!(e.kind, ChainKind::Edtmc);
    assert_eq!(row(&e.tpm, 2), [qi(0), qi(0), qi(0), q(1, 3), q(2, 3)]);
    assert_eq!(row(&e.tpm, 0), [qi(0), qi(1), qi(0), qi(0), qi(0)]);
    // s3 has no self-loop, so its P* row equals its P row
    assert_eq!(row(&e.tpm, 2), row(&p.tpm, 2));
    assert!((0..e.len()).all(|i| e.tpm[i][i].is_zero()));
}

#[test]
fn travel_edtmc_is_periodic() {
    let (lts, _) = travel(&common::travel_params());
    let st = steady_state(&edtmc(&lts).0).unwrap();
    assert_eq!(st.period, 3);
    assert_eq!(steady_state(&dtmc(&lts)).unwrap().period, 1);
}

#[test]
fn travel_reduced_chain() {
    let (lts, _) = travel(&common::travel_params());
    let dec = decompose(&lts).unwrap();
    assert_eq!(dec.vanishing.len(), 1);
    assert!(dec.c[0][0].is_zero());
    assert!(dec.nilpotent);
    assert_eq!(dec.g, vec![vec![qi(1)]]);
    let r = rdtmc(&lts).unwrap();
    r.validate().unwrap();
    assert_eq!(r.len(), 4);
}

#[test]
fn symbolic_phi_formula() {
    // φ = (0, θφ(l+m), 0, φl, θm) / (θφ(l+m) + φl + θm) for a second parameter point
    let ps = common::params(&[("rho", "1/3"), ("k", "2"), ("l", "2"), ("m", "3"), ("theta", "1/4"), ("phi", "2/5")]);
    let (lts, o) = travel(&ps);
    let (l, m, th, ph) = (qi(2), qi(3), q(1, 4), q(2, 5));
    let den = &th * &ph * (&l + &m) + &ph * &l + &th * &m;
    let want = [qi(0), &th * &ph * (&l + &m) / &den, qi(0), &ph * &l / &den, &th * &m / &den];
    let phi = PhiRoutes::compute(&lts).agreed().unwrap();
    let got: Vec<Q> = o.iter().map(|&i| phi.values[i].clone()).collect();
    assert_eq!(got, want);
}

#[test]
fn trprob_chains() {
    let lts = ts("({a},1/2)[]({a},1/3)");
    let s1 = lts.initial;
    let s2 = 1 - s1;
    let p = dtmc(&lts);
    assert_eq!((p.tpm[s1][s1].clone(), p.tpm[s1][s2].clone()), (q(2, 5), q(3, 5)));
    let (e, _) = edtmc(&lts);
    assert_eq!(e.tpm[s1][s2], qi(1));
    // the final state is absorbing: zero EDTMC row, infinite sojourn time
    assert!(e.tpm[s2].iter().all(Q::is_zero));
    assert_eq!(sojourn(&lts).sj[s2], Time::Infinite);
    assert!(matches!(smc_pmf(&lts), Err(Error::Chain(m)) if m.contains("degenerate")));
    let via_dtmc = smc_pmf_via_dtmc(&lts).unwrap();
    assert_eq!(via_dtmc, smc_pmf_via_rdtmc(&lts).unwrap());
    assert_eq!(via_dtmc.values[s2], qi(1));
}

#[test]
fn single_absorbing_state_chain() {
    let lts = ts("({a},1/2)");
    let fin = 1 - lts.initial;
    let st = steady_state(&dtmc(&lts)).unwrap();
    assert_eq!(st.closed_class, vec![fin]);
    assert_eq!(st.pmf.values[fin], qi(1));
    assert_eq!(dtmc(&lts).tpm[fin][fin], qi(1));
}

#[test]
fn all_tangible_chain_routes_coincide() {
    let lts = ts("[({a},1/2)*(({b},1/3);({c},1/4))*stop]");
    assert!(lts.with_tag(Tag::V).is_empty());
    let r = rdtmc(&lts).unwrap();
    assert_eq!(r.tpm, dtmc(&lts).tpm);
    let psi = steady_state(&dtmc(&lts)).unwrap().pmf;
    let routes = PhiRoutes::compute(&lts);
    assert_eq!(routes.via_dtmc.unwrap().values, psi.values);
    assert_eq!(routes.via_rdtmc.unwrap().values, psi.values);
    let (c, soj) = edtmc(&lts);
    let psi_star = steady_state(&c).unwrap().pmf.values;
    let weights: Vec<Q> = psi_star.iter().zip(&soj.sj).map(|(p, s)| p * s.finite().unwrap()).collect();
    let total: Q = weights.iter().sum();
    let want: Vec<Q> = weights.iter().map(|w| w / &total).collect();
    assert_eq!(routes.via_edtmc.unwrap().values, want);
}

#[test]
fn multiple_closed_classes_rejected() {
    let lts = ts("(({a},1/2);[({c},1/2)*({d},1/2)*stop])[](({b},1/2);[({e},1/2)*({f},1/2)*stop])");
    assert_eq!(closed_classes(&dtmc(&lts)).len(), 2);
    match steady_state(&dtmc(&lts)) {
        Err(Error::Chain(m)) => assert!(m.contains("2 closed"), "{m}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn vanishing_initial_state_rejected_by_rdtmc() {
    let lts = ts("[({a},#0:1)*(({b},1/2);({c},1/3))*stop]");
    assert_eq!(lts.states[lts.initial].tag, Tag::V);
    assert!(matches!(rdtmc(&lts), Err(Error::Chain(m)) if m.contains("vanishing")));
    // the other routes still work
    assert_eq!(smc_pmf(&lts).unwrap(), smc_pmf_via_dtmc(&lts).unwrap());
}

#[test]
fn vanishing_loops_are_rejected() {
    let lts = ts("({c},1/2);[({a},#0:1)*({b},#0:1)*stop]");
    match rdtmc(&lts) {
        Err(Error::Chain(m)) => assert!(m.contains("absorbing loops"), "{m}"),
        other => panic!("{other:?}"),
    }
    assert!(smc_pmf_via_dtmc(&lts).is_err());
}

#[test]
fn vanishing_chain_uses_neumann_sum() {
    // two consecutive vanishing states: C is nilpotent of index 2
    let lts = ts("[({a},1/2)*(({b},#0:1);({c},#0:1);({d},1/2))*stop]");
    let dec = decompose(&lts).unwrap();
    assert_eq!(dec.vanishing.len(), 2);
    assert!(dec.nilpotent);
    let r = rdtmc(&lts).unwrap();
    r.validate().unwrap();
    PhiRoutes::compute(&lts).agreed().unwrap();
}

#[test]
fn transient_steps() {
    let (lts, _) = travel(&common::travel_params());
    let r = rdtmc(&lts).unwrap();
    let t0 = transient(&r, 0);
    assert_eq!(t0.values[r.initial], qi(1));
    assert_eq!(t0.values.iter().filter(|x| !x.is_zero()).count(), 1);
    assert_eq!(transient(&r, 1).values, r.tpm[r.initial]);
    let exact = steady_state(&r).unwrap().pmf.values;
    let k = transient(&r, 64).values;
    for (a, b) in k.iter().zip(&exact) {
        assert!((dtsd_core::rational::to_f64(a) - dtsd_core::rational::to_f64(b)).abs() < 1e-6);
    }
    assert!(k.iter().sum::<Q>().is_one());
}

#[test]
fn travel_indices() {
    let (lts, o) = travel(&common::travel_params());
    let soj = sojourn(&lts);
    let phi = smc_pmf(&lts).unwrap();
    let ev = |qy: Query| evaluate(&lts, &phi, &soj, &qy).unwrap();
    assert_eq!(ev(Query::TimeFract { states: vec![sname(o[3]), sname(o[4])] }), q(8, 11));
    // ReturnTime(s2) = 1 + (φl+θm)/(θφ(l+m)) at l=1, m=2, θ=1/2, φ=1/3
    assert_eq!(ev(Query::ReturnTime { state: sname(o[1]) }), qi(1) + q(4, 3) / q(1, 2));
    assert_eq!(ev(Query::ActsProb { activities: vec![] }), qi(1));
    // b fires only from s2, where it is the sole step
    assert_eq!(ev(Query::ExecFreq { activity: "2".into() }), q(3, 11));
    // d: φ(s4)/SJ(s4)·PT({d},s4) = (2/11)/2·1/2
    assert_eq!(ev(Query::ExecFreq { activity: "4".into() }), q(1, 22));
    assert_eq!(ev(Query::ActsProb { activities: vec!["({d},1/2)_4".into()] }), q(2, 11) * q(1, 2));
    let rewards = [(sname(o[1]), "1".to_string()), (sname(o[4]), "1/2".to_string())].into_iter().collect();
    assert_eq!(ev(Query::Reward { rewards }), q(3, 11) + q(3, 11));

    let (lts, o) = travel(&common::travel_params_sym());
    let soj = sojourn(&lts);
    let phi = smc_pmf(&lts).unwrap();
    let r = evaluate(
        &lts,
        &phi,
        &soj,
        &Query::RltTimeFract { states: vec![sname(o[1])], relative_to: vec![sname(o[3]), sname(o[4])] },
    )
    .unwrap();
    assert_eq!(r, q(1, 2));
}

#[test]
fn index_errors() {
    let (lts, o) = travel(&common::travel_params());
    let soj = sojourn(&lts);
    let phi = smc_pmf(&lts).unwrap();
    let ev = |qy: Query| evaluate(&lts, &phi, &soj, &qy);
    assert!(matches!(ev(Query::ReturnTime { state: "s9".into() }), Err(Error::Invalid(_))));
    assert!(matches!(ev(Query::ExecFreq { activity: "({z},1/2)_9".into() }), Err(Error::Invalid(_))));
    assert!(matches!(ev(Query::ExitFreq { state: sname(o[2]) }), Err(Error::Invalid(_))));
    let bad = [(sname(o[1]), "3/2".to_string())].into_iter().collect();
    assert!(matches!(ev(Query::Reward { rewards: bad }), Err(Error::Invalid(_))));
    assert!(matches!(ev(Query::ReturnTime { state: sname(o[0]) }), Err(Error::Invalid(_))));
}

#[test]
fn query_file_format() {
    let text = r#"
        [[index]]
        kind = "return_time"
        state = "s2"

        [[index]]
        kind = "rlt_time_fract"
        states = ["s2"]
        relative_to = ["s4", "s5"]

        [[index]]
        kind = "reward"
        rewards = { s2 = "1", s4 = "1/2" }
    "#;
    let qf: QueryFile = toml::from_str(text).unwrap();
    assert_eq!(qf.index.len(), 3);
    assert_eq!(qf.index[0], Query::ReturnTime { state: "s2".into() });
    assert!(toml::from_str::<QueryFile>("[[index]]\nkind = \"bogus\"\n").is_err());
}

#[test]
fn timer_free_aggregation() {
    // the loop keeps the chain ergodic; s and ⟲s differ only in a timer
    let lts = ts("[({x},1/2)*(({a},#3:1)[]({b},1/3))*stop]");
    let soj = sojourn(&lts);
    let phi = PhiRoutes::compute(&lts).agreed().unwrap();
    let rows = timer_free_aggregate(&lts, &phi, &soj);
    assert!(rows.len() < lts.len());
    assert!(rows.iter().any(|r| r.members.len() > 1));
    for r in &rows {
        let sum: Q = r.members.iter().map(|&s| phi.values[s].clone()).sum();
        assert_eq!(r.phi, sum);
        assert_eq!(r.sj, Time::sum(r.members.iter().map(|&s| &soj.sj[s])));
    }
    assert!(rows.iter().map(|r| r.phi.clone()).sum::<Q>().is_one());

    let lts = ts("[({a},1/2)*({b},1/3)*stop]");
    let soj = sojourn(&lts);
    let phi = PhiRoutes::compute(&lts).agreed().unwrap();
    let rows = timer_free_aggregate(&lts, &phi, &soj);
    assert_eq!(rows.len(), lts.len());
}

#[test]
fn exports() {
    let (lts, _) = travel(&common::travel_params());
    let r = rdtmc(&lts).unwrap();
    let j = r.to_json();
    assert_eq!(j["kind"], "RDTMC");
    assert!(j["tpm"][0][0].as_str().unwrap().contains('/'));
    let csv = r.to_csv();
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.starts_with("state,"));
    let phi = smc_pmf(&lts).unwrap();
    assert_eq!(phi.to_json()["values"].as_array().unwrap().len(), 5);
    assert!(phi.to_csv().contains("3/11"));
}

#[test]
fn psi_psi_star_relation_on_fixtures() {
    for f in common::FIXTURES {
        let lts = build_ts(&common::parse_fixture(f)).unwrap().lts;
        let (c, soj) = edtmc(&lts);
        let psi_star = steady_state(&c).unwrap().pmf.values;
        let psi = steady_state(&dtmc(&lts)).unwrap().pmf.values;
        let norm: Q = psi_star.iter().zip(&soj.sl).map(|(p, s)| p * s).sum();
        for s in 0..lts.len() {
            assert_eq!(&psi[s] * &norm, &psi_star[s] * &soj.sl[s], "{} s{}", f.name, s + 1);
        }
        common::check_phi_agreement(&lts).unwrap();
    }
}

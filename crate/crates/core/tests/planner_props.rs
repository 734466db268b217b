use hybrid_mas::ltl::{nfa_accepts, translate_cosafe_to_nfa, Letter, DEFAULT_STATE_CAP};
use hybrid_mas::planner::{
    build_region_graph, plan_word, synthesize_plan, validate_plan, AgentMission, PlanWord,
    RegionSpec,
};
use hybrid_mas::Point;
use proptest::prelude::*;

const FORMULAS: &[&str] = &[
    "F a",
    "F (a & F b)",
    "F (b & F (a & F b))",
    "F a & F b",
    "!a U b",
    "F (a & X F b)",
    "G F a",
    "G F a & G F b",
    "G F (a | b)",
    "F G a",
    "G (!a | F b) & G F a",
];

fn regions(labels: &[u8]) -> Vec<RegionSpec> {
    labels
        .iter()
        .enumerate()
        .map(|(k, &mask)| RegionSpec {
            id: format!("q{k}"),
            center: Point::new(6.0 * k as f64, 0.0),
            radius: 2.0,
            labels: ["a", "b"]
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, s)| s.to_string())
                .collect(),
        })
        .collect()
}

fn mission(labels: &[u8], formula: &str) -> AgentMission {
    AgentMission::new(1, Point::zero(), &regions(labels), formula).unwrap()
}

// Every word of length `len` a plan over these regions could produce.
fn words(m: &AgentMission, len: usize) -> Vec<Vec<Letter>> {
    let options: Vec<Letter> = m.regions.iter().flat_map(|r| r.labels.subsets()).collect();
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                options.iter().map(move |l| {
                    let mut w = w.clone();
                    w.push(*l);
                    w
                })
            })
            .collect();
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn plans_satisfy_their_tasks(labels in prop::collection::vec(0u8..4, 1..4), k in 0..FORMULAS.len()) {
        let m = mission(&labels, FORMULAS[k]);
        let g = build_region_graph(&m, 40.0, 2.0).unwrap();
        let Ok(plan) = synthesize_plan(&m, &g) else {
            return Ok(());
        };
        prop_assert!(validate_plan(&plan, &m.formula));
        for s in &plan.steps {
            prop_assert!(s.services.is_subset(m.regions[s.region].labels));
        }
        prop_assert_eq!(plan.is_finite(), m.is_cosafe());
        prop_assert_eq!(synthesize_plan(&m, &g).unwrap(), plan);
    }

    #[test]
    fn cosafe_plans_are_shortest(labels in prop::collection::vec(0u8..4, 1..4), k in 0..6usize) {
        let m = mission(&labels, FORMULAS[k]);
        let g = build_region_graph(&m, 40.0, 2.0).unwrap();
        let Ok(plan) = synthesize_plan(&m, &g) else {
            return Ok(());
        };
        let nfa = translate_cosafe_to_nfa(&m.formula, DEFAULT_STATE_CAP).unwrap();
        let PlanWord::Finite(w) = plan_word(&plan) else {
            panic!("co-safe plan with a suffix");
        };
        prop_assert!(nfa_accepts(&nfa, &w));
        for len in 0..w.len() {
            for shorter in words(&m, len) {
                prop_assert!(!nfa_accepts(&nfa, &shorter), "{:?} beats {:?}", shorter, w);
            }
        }
    }
}

#[test]
fn unrealizable_task_is_reported() {
    let m = mission(&[1, 2], "F (a & !a)");
    let g = build_region_graph(&m, 40.0, 2.0).unwrap();
    assert!(synthesize_plan(&m, &g).is_err());
}

#[test]
fn missing_label_is_unrealizable() {
    let m = mission(&[1], "G F b");
    let g = build_region_graph(&m, 40.0, 2.0).unwrap();
    assert!(synthesize_plan(&m, &g).is_err());
}

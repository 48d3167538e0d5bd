use bion_core::features::{apply_schema, fit_schema, raw_features, DEFAULT_VARIANCE_THRESHOLD};
use bion_core::generate::{generate_instance, size_range};
use bion_core::ProblemClass;
use proptest::prelude::*;

fn varied(class: ProblemClass, n: u64) -> Vec<bion_core::Instance> {
    let r = size_range(class);
    let span = (r.end() - r.start() + 1) as u64;
    (0..n).map(|s| generate_instance(class, r.start() + (s * 7 % span) as usize, s).unwrap()).collect()
}

#[test]
fn vector_length_is_fixed_per_schema() {
    for class in ProblemClass::ALL {
        let instances = varied(class, 100);
        let raws: Vec<_> = instances.iter().map(|i| raw_features(i).unwrap()).collect();
        let schema = fit_schema(&raws, DEFAULT_VARIANCE_THRESHOLD).unwrap();
        for raw in &raws {
            let v = apply_schema(&schema, raw).unwrap();
            assert_eq!(v.values.len(), schema.kept());
            assert!(v.values.iter().all(|x| x.is_finite()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unseen_instances_project_to_finite_values(class in prop::sample::select(ProblemClass::ALL.to_vec()), seed in any::<u64>(), pick in any::<usize>()) {
        let raws: Vec<_> = varied(class, 30).iter().map(|i| raw_features(i).unwrap()).collect();
        let schema = fit_schema(&raws, DEFAULT_VARIANCE_THRESHOLD).unwrap();
        let r = size_range(class);
        let size = r.start() + pick % (r.end() - r.start() + 1);
        let v = apply_schema(&schema, &raw_features(&generate_instance(class, size, seed).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(v.values.len(), schema.kept());
        prop_assert!(v.values.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn generated_instances_are_feasible_at_the_root(class in prop::sample::select(ProblemClass::ALL.to_vec()), seed in any::<u64>(), pick in any::<usize>()) {
        let r = size_range(class);
        let size = r.start() + pick % (r.end() - r.start() + 1);
        let i = generate_instance(class, size, seed).unwrap();
        let m = bion_core::compile::compile(&i).unwrap();
        prop_assert_eq!(m.objective_domain(), bion_core::Domain::new(i.objective_lb, i.objective_ub));
        prop_assert!(bion_core::solver::propagate(&m, &m.domains()).is_some());
    }
}

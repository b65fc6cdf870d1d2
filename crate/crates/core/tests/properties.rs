mod support;

use foldsynth::eval::{eval, Env, EvalError, Fuel};
use foldsynth::expr::{typecheck, Expr, Name};
use foldsynth::prims::{builtin_set, registry as prim_registry, Semantics};
use foldsynth::schemes::{run_accu, run_cata, Accumulator, Algebra, StateVars};
use foldsynth::synth::{universe_for, Generator, Space};
use foldsynth::template::{candidate_schemes, SlotGrammar};
use foldsynth::types::{SemType, Signature, Subst, TypeUniverse};
use foldsynth::{assemble, build_template, evolve, find, parse_genome, GPConfig, Limits, SchemeKind, TemplateKind, Value};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn scalars() -> Vec<SemType> {
    vec![SemType::Int, SemType::Float, SemType::Bool, SemType::Char]
}

fn universe_types() -> Vec<SemType> {
    let mut ts = scalars();
    ts.extend([
        SemType::list(SemType::Int),
        SemType::string(),
        SemType::list(SemType::Float),
        SemType::tuple(SemType::Int, SemType::Char),
        SemType::list(SemType::string()),
    ]);
    ts
}

fn random_value(ty: &SemType, rng: &mut ChaCha8Rng) -> Value {
    match ty {
        SemType::Int => Value::Int(rng.gen_range(-50..=50)),
        SemType::Float => Value::Float(f64::from(rng.gen_range(-400..=400)) / 4.0),
        SemType::Bool => Value::Bool(rng.gen()),
        SemType::Char => Value::Char(*b"ab zAZ!\n9".choose(rng).expect("nonempty") as char),
        SemType::List(elem) => {
            let n = rng.gen_range(0..=6);
            Value::list((0..n).map(|_| random_value(elem, rng)).collect())
        }
        SemType::Tuple(a, b) => Value::tuple(random_value(a, rng), random_value(b, rng)),
        other => panic!("no values of {other}"),
    }
}

fn vars(pairs: &[(&str, &SemType)]) -> Vec<(Name, SemType)> {
    pairs.iter().map(|(n, t)| (Name::from(*n), (*t).clone())).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn primitives_respect_their_signatures(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let universe = universe_types();
        for p in prim_registry().all() {
            if let Semantics::Constant(v) = &p.semantics {
                prop_assert!(v.has_type(&p.sig.ret), "{}", p.name);
                continue;
            }
            if p.sig.params.iter().any(SemType::contains_fn) {
                continue;
            }
            let mut sub = Subst::new();
            for v in p.sig.vars() {
                let options: Vec<&SemType> = universe
                    .iter()
                    .filter(|t| p.sig.bound_of(&v).is_none_or(|b| b.admits(t)))
                    .collect();
                sub.insert(&v, (*options.choose(&mut rng).expect("admissible type")).clone());
            }
            let args: Vec<Expr> = p
                .sig
                .params
                .iter()
                .map(|t| {
                    let t = sub.apply(t);
                    Expr::from_value(&random_value(&t, &mut rng), &t).expect("literal")
                })
                .collect();
            let e = Expr::Prim(p.id, args);
            let ret = sub.apply(&p.sig.ret);
            prop_assert_eq!(typecheck(&e, &[]).map_err(|e| TestCaseError::fail(e.to_string()))?, ret.clone(), "{}", p.name);
            match eval(&e, &Env::new(), &mut Fuel::new(100_000)) {
                Ok(v) => prop_assert!(v.has_type(&ret), "{} gave {} for {}", p.name, v, ret),
                Err(err) => prop_assert!(err.is_signal(), "{}: {}", p.name, err),
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn eval_preserves_types_and_is_pure(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let types = universe_types();
        let g = Generator::new(builtin_set(), TypeUniverse::from_types(&types));
        let env_types: Vec<SemType> = (0..3).map(|_| types.choose(&mut rng).expect("nonempty").clone()).collect();
        let mut env = Env::new();
        for (i, t) in env_types.iter().enumerate() {
            env = env.bind(format!("v{i}").as_str(), t.clone(), random_value(t, &mut rng));
        }
        let target = types.choose(&mut rng).expect("nonempty").clone();
        let e = g.random_expr(&target, 5, &env.var_types(), SlotGrammar::Full, &mut rng).expect("constructible");
        prop_assert_eq!(typecheck(&e, &env.var_types()).map_err(|e| TestCaseError::fail(e.to_string()))?, target.clone());
        let first = eval(&e, &env, &mut Fuel::new(20_000));
        match &first {
            Ok(v) => prop_assert!(v.has_type(&target), "{} gave {}", e, v),
            Err(err) => prop_assert!(err.is_signal(), "{}: {}", e, err),
        }
        prop_assert_eq!(first, eval(&e, &env, &mut Fuel::new(20_000)));
    }
}

fn int_lists() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-1000i64..=1000, 0..50)
}

fn elem_lists() -> impl Strategy<Value = (SemType, Vec<Value>)> {
    prop_oneof![
        int_lists().prop_map(|xs| (SemType::Int, xs.into_iter().map(Value::Int).collect())),
        "[a-z !]{0,30}".prop_map(|s| (SemType::Char, s.chars().map(Value::Char).collect())),
        prop::collection::vec(any::<bool>(), 0..20).prop_map(|bs| (SemType::Bool, bs.into_iter().map(Value::Bool).collect())),
    ]
}

proptest! {
    #[test]
    fn cata_with_list_constructors_is_identity((elem, xs) in elem_lists()) {
        let res = SemType::list(elem.clone());
        let nil = Expr::List(vec![], elem.clone());
        let cons = Expr::prim("cons", vec![Expr::var("x"), Expr::var("xs")]);
        let alg = Algebra { nil: &nil, cons: &cons, elem_ty: &elem, result_ty: &res };
        prop_assert_eq!(run_cata(&alg, &Env::new(), &xs, &mut Fuel::new(1_000_000)), Ok(Value::list(xs.clone())));
    }

    #[test]
    fn cata_counting_is_length((elem, xs) in elem_lists()) {
        let nil = Expr::Int(0);
        let cons = Expr::prim("+", vec![Expr::Int(1), Expr::var("xs")]);
        let alg = Algebra { nil: &nil, cons: &cons, elem_ty: &elem, result_ty: &SemType::Int };
        prop_assert_eq!(run_cata(&alg, &Env::new(), &xs, &mut Fuel::new(1_000_000)), Ok(Value::Int(xs.len() as i64)));
    }

    #[test]
    fn accu_with_fixed_state_is_cata(seed in any::<u64>(), xs in int_lists()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let res = [SemType::Int, SemType::list(SemType::Int), SemType::Bool].choose(&mut rng).expect("nonempty").clone();
        let g = Generator::new(builtin_set(), TypeUniverse::from_types([&SemType::Int, &res]));
        let nil = g.random_expr(&res, 3, &[], SlotGrammar::Full, &mut rng).expect("constructible");
        let cons = g
            .random_expr(&res, 3, &vars(&[("x", &SemType::Int), ("xs", &res)]), SlotGrammar::Full, &mut rng)
            .expect("constructible");
        let init = Expr::Int(rng.gen_range(-5..=5));
        let step = Expr::var("s");
        let xs: Vec<Value> = xs.into_iter().map(Value::Int).collect();
        let alg = Algebra { nil: &nil, cons: &cons, elem_ty: &SemType::Int, result_ty: &res };
        let acc = Accumulator { init: &init, step: &step, state_ty: &SemType::Int, vars: StateVars::Single };
        let cata = run_cata(&alg, &Env::new(), &xs, &mut Fuel::new(1_000_000));
        let accu = run_accu(&acc, &alg, &Env::new(), &xs, &mut Fuel::new(1_000_000));
        if !matches!(cata, Err(EvalError::FuelExhausted)) && !matches!(accu, Err(EvalError::FuelExhausted)) {
            prop_assert_eq!(accu, cata);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn every_template_yields_its_return_type(seed in any::<u64>()) {
        let stats = support::fuzz::soundness(2, seed).map_err(TestCaseError::fail)?;
        prop_assert_eq!(stats.len(), TemplateKind::ALL.len());
    }

    #[test]
    fn routing_depends_on_shape_only(a in 0usize..4, b in 0usize..4, n in 1usize..4) {
        let (a, b) = (scalars()[a].clone(), scalars()[b].clone());
        let params = |first: SemType| {
            let mut ps = vec![first];
            ps.extend(std::iter::repeat_n(SemType::Int, n - 1));
            ps
        };
        let fold = Signature::new(params(SemType::list(a.clone())), b.clone());
        prop_assert_eq!(candidate_schemes(&fold), vec![SchemeKind::Cata, SchemeKind::Accu]);
        let unfold = Signature::new(params(a.clone()), SemType::list(b.clone()));
        prop_assert_eq!(candidate_schemes(&unfold), vec![SchemeKind::Ana]);
        let plain = Signature::new(params(a), b);
        prop_assert_eq!(candidate_schemes(&plain), vec![SchemeKind::Hylo]);
    }

    #[test]
    fn tuple_components_are_independent(seed in any::<u64>(), s in "[a-z \n]{0,20}") {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = foldsynth::problems::fixtures::fixture("replace-space-with-newline").expect("fixture");
        let (t, fixed) = parse_genome(f.genome).expect("parses");
        let generator = Generator::new(builtin_set(), universe_for(&t));
        let input = [Value::string(&s)];
        let base = assemble(&t, &fixed).expect("assembles").run(&input, Limits::default()).expect("runs");
        let (base0, base1) = base.as_tuple().expect("pair");
        for component in ["0", "1"] {
            let mut g = fixed.clone();
            for (i, slot) in t.slots.iter().enumerate() {
                if slot.name.ends_with(component) {
                    g.slots[i] = generator.random_expr(&slot.ret, 3, &slot.vars, slot.grammar, &mut rng).expect("constructible");
                }
            }
            if let Ok(out) = assemble(&t, &g).expect("assembles").run(&input, Limits::default()) {
                let (o0, o1) = out.as_tuple().expect("pair");
                if component == "0" {
                    prop_assert_eq!(o1, base1);
                } else {
                    prop_assert_eq!(o0, base0);
                }
            }
        }
    }

    #[test]
    fn variation_keeps_genomes_closed(seed in any::<u64>(), k in 0usize..8, depth in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kind = TemplateKind::ALL[k];
        let p = foldsynth::registry().into_iter().find(|p| p.template == Some(kind)).expect("a problem per kind");
        let t = build_template(kind, &p.signature).expect("fits");
        let generator = Generator::new(p.prims().expect("known"), universe_for(&t));
        let space = Space::new(&t, &generator, depth, rng.gen());
        let mut pop: Vec<_> = (0..6).map(|_| space.random_genome(&mut rng).expect("constructible")).collect();
        for _ in 0..30 {
            let (i, j) = (rng.gen_range(0..pop.len()), rng.gen_range(0..pop.len()));
            let child = if rng.gen() { space.mutate(&pop[i], &mut rng) } else { space.crossover(&pop[i], &pop[j], &mut rng) };
            prop_assert!(assemble(&t, &child).is_ok(), "{:?}", child);
            prop_assert!(child.depth() <= depth, "depth {} > {}", child.depth(), depth);
            pop[i] = child;
        }
    }
}

fn small_config(seed: u64, nil_default_policy: bool) -> GPConfig {
    GPConfig {
        population_size: 40,
        max_generations: 6,
        train_cases: 12,
        validation_cases: 12,
        nil_default_policy,
        seed,
        ..GPConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn evolution_is_deterministic_and_elitist(seed in any::<u64>(), which in 0usize..3, policy in any::<bool>()) {
        let name = ["count-odds", "double-letters", "last-index-of-zero"][which];
        let p = find(name).expect("registered");
        let t = build_template(p.template.expect("template"), &p.signature).expect("fits");
        let prims = p.prims().expect("known");
        let train = p.training_cases(12, seed);
        let validation = p.validation_cases(12, seed);
        let task = foldsynth::synth::Task { template: &t, prims: &prims, train: &train, validation: &validation, rounding: p.rounding };
        let config = small_config(seed, policy);
        let a = evolve(&task, &config).expect("runs");
        let b = evolve(&task, &config).expect("runs");
        prop_assert_eq!(&a.best, &b.best);
        prop_assert_eq!(&a.history, &b.history);
        prop_assert!(a.history.windows(2).all(|w| w[1] <= w[0]), "{:?}", a.history);
        if policy {
            for (slot, e) in t.slots.iter().zip(&a.best.slots) {
                if let Some(fixed) = &slot.nil_default {
                    prop_assert_eq!(e, fixed);
                }
            }
        }
    }
}

use proptest::prelude::*;
use proptest::strategy::Strategy;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use pricelog_core::generate::{random_formula, random_sequent, random_transition_system, Grammar};
use pricelog_core::rules::dereliction_price;
use pricelog_core::*;

const COST: Builtin = Builtin::Cost;

fn limits() -> SearchLimits {
    SearchLimits { max_nodes: 200_000, ..SearchLimits::default() }
}

fn grammar() -> Grammar {
    Grammar::new(&["p", "q"], &["0", "1", "2"])
}

fn seeded(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

fn arb_price() -> impl Strategy<Value = CostValue> {
    prop_oneof![
        8 => (0i64..40, prop::sample::select(vec![1i64, 2, 3, 4, 5, 10])).prop_map(|(n, d)| CostValue::ratio(n, d)),
        1 => Just(CostValue::Infinite),
    ]
}

fn arb_formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["p", "q", "r", "x1", "goal_2", "a'"]).prop_map(Formula::atom),
        Just(Formula::One),
        Just(Formula::Zero),
    ];
    leaf.prop_recursive(6, 64, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::tensor(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::with(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::plus(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::lolli(a, b)),
            (arb_price(), inner.clone()).prop_map(|(c, a)| Formula::permanent(c, a)),
            (arb_price(), inner).prop_map(|(c, a)| Formula::single_use(c, a)),
        ]
    })
}

fn depth(f: &Formula) -> usize {
    match f {
        Formula::Atom(_) | Formula::Zero | Formula::One => 0,
        Formula::Tensor(a, b) | Formula::With(a, b) | Formula::Plus(a, b) | Formula::Lolli(a, b) => 1 + depth(a).max(depth(b)),
        Formula::Modal { body, .. } => 1 + depth(body),
    }
}

fn uses<L>(pf: &ProofTree<L>, pred: &dyn Fn(RuleName) -> bool) -> bool {
    pred(pf.rule) || pf.premises.iter().any(|p| uses(p, pred))
}

fn num(v: &CostValue) -> f64 {
    v.to_string().parse::<f64>().unwrap_or(f64::INFINITY)
}

fn exact_cost(s: &Sequent) -> Option<MinCost> {
    match min_cost(s, &COST, limits()) {
        Ok(Outcome::Proved(mc)) if mc.status == CostStatus::Exact => Some(mc),
        _ => None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn rendered_formulas_parse_back(f in arb_formula()) {
        prop_assume!(depth(&f) <= 6);
        let text = f.to_string();
        prop_assert_eq!(parse_formula(&text, &COST).unwrap(), f, "{}", text);
    }

    #[test]
    fn extended_sequents_stay_extended_under_every_rule(seed in any::<u64>()) {
        let s = random_sequent(&mut seeded(seed), &grammar(), 6, 3);
        prop_assert!(check_extended(&s));
        for inst in rule_instances(&s, Calculus::Priced) {
            for p in apply_rule(&s, &inst, Calculus::Priced).unwrap() {
                prop_assert!(check_extended(&p.sequent), "{} via {:?} gives {}", s, inst, p.sequent);
            }
        }
    }

    #[test]
    fn extended_sequents_parse_back(seed in any::<u64>()) {
        let s = random_sequent(&mut seeded(seed), &grammar(), 6, 3);
        prop_assert_eq!(parse_sequent_plain(&s.to_string(), &COST).unwrap(), s);
    }

    #[test]
    fn axiom_leaves_check(seed in any::<u64>()) {
        let s = random_sequent(&mut seeded(seed), &grammar(), 3, 3);
        if classify_initial(&s) == Some(RuleName::Ax) {
            prop_assert!(check_proof(&Proof::leaf(s, RuleName::Ax), Calculus::Priced).is_ok());
        }
    }

    #[test]
    fn returned_proofs_check(seed in any::<u64>(), b in 0i64..5) {
        let s = random_sequent(&mut seeded(seed), &grammar(), 5, 3);
        if let Ok(Outcome::Proved(pf)) = prove(&s, Calculus::Priced, limits()) {
            prop_assert_eq!(&pf.conclusion, &s);
            prop_assert!(check_proof(&pf, Calculus::Priced).is_ok());
        }
        if let Ok(Outcome::Proved(mc)) = min_cost(&s, &COST, limits()) {
            prop_assert!(check_proof(&mc.proof, Calculus::Priced).is_ok());
            prop_assert_eq!(cost_of(&mc.proof, &COST), mc.cost);
        }
        let ls = LabelledSequent::new(s.clone(), CostValue::int(b));
        if let Ok(Outcome::Proved(lpf)) = prove_labelled(&ls, &COST, limits()) {
            prop_assert_eq!(&lpf.conclusion, &s);
            prop_assert_eq!(&lpf.label, &ls.label);
            prop_assert!(check_labelled_proof(&lpf, &COST).is_ok());
            // The skeleton never costs less than the label claims.
            prop_assert!(COST.leq(&ls.label, &cost_of(&skeleton(&lpf), &COST)));
        }
    }

    #[test]
    fn modality_free_sequents_agree_with_the_game(seed in any::<u64>()) {
        let g = Grammar::new(&["p", "q"], &[]).plain();
        let s = random_sequent(&mut seeded(seed), &g, 6, 3);
        let proved = prove(&s, Calculus::Plain, limits()).unwrap();
        prop_assert!(!matches!(proved, Outcome::Unknown));
        let won = game_search(&GameState::single(s.clone(), None), &COST, limits()).unwrap();
        prop_assert_eq!(proved.is_proved(), won, "{}", s);
    }

    #[test]
    fn min_cost_is_the_spectrum_minimum(seed in any::<u64>()) {
        let s = random_sequent(&mut seeded(seed), &grammar(), 4, 3);
        if let Some(mc) = exact_cost(&s) {
            prop_assume!(mc.cost != CostValue::Infinite);
            let spec = spectrum(&s, &mc.cost, &COST, limits()).unwrap();
            prop_assert_eq!(spec.min(), Some(&mc.cost), "{}", s);
        }
    }

    #[test]
    fn spectra_lie_inside_omega(seed in any::<u64>(), bound in 0i64..5) {
        let s = random_sequent(&mut seeded(seed), &grammar(), 4, 3);
        let bound = CostValue::int(bound);
        let spec = spectrum(&s, &bound, &COST, limits()).unwrap();
        let om = omega(&s.prices(), &bound, &COST, 10_000).unwrap();
        for v in &spec.values {
            prop_assert!(om.contains(v), "{} not in omega for {}", v, s);
        }
    }

    #[test]
    fn proof_costs_belong_to_the_spectrum(seed in any::<u64>()) {
        let s = random_sequent(&mut seeded(seed), &grammar(), 4, 3);
        if let Ok(Outcome::Proved(pf)) = prove(&s, Calculus::Priced, limits()) {
            let c = cost_of(&pf, &COST);
            prop_assume!(c != CostValue::Infinite);
            let spec = spectrum(&s, &c, &COST, limits()).unwrap();
            prop_assert!(spec.values.contains(&c), "{} missing from spectrum of {}", c, s);
        }
    }

    #[test]
    fn weakening_never_raises_the_cost(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let s = random_sequent(&mut rng, &grammar(), 4, 2);
        let size = rng.gen_range(0..=2);
        let extra = random_formula(&mut rng, &grammar(), size, true);
        if let Some(before) = exact_cost(&s) {
            let mut ante = s.antecedent.clone();
            ante.push(extra);
            let weakened = Sequent::new(ante, s.consequent.clone());
            if let Some(after) = exact_cost(&weakened) {
                prop_assert!(COST.leq(&before.cost, &after.cost), "{} costs {} but {} costs {}", s, before.cost, weakened, after.cost);
            }
        }
    }

    #[test]
    fn generalised_axioms_are_free(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let plain = grammar().plain();
        let size = rng.gen_range(0..=4);
        let a = random_formula(&mut rng, &plain, size, false);
        let mut ante: Vec<Formula> = (0..rng.gen_range(0..=2)).map(|_| random_formula(&mut rng, &grammar(), 1, true)).collect();
        ante.push(a.clone());
        ante.shuffle(&mut rng);
        let s = Sequent::new(ante, a);
        let mc = exact_cost(&s).expect("identity sequents are provable");
        prop_assert_eq!(mc.cost, COST.top(), "{}", s);
    }

    #[test]
    fn skeleton_inverts_decorate(seed in any::<u64>()) {
        let s = random_sequent(&mut seeded(seed), &grammar(), 5, 3);
        if let Ok(Outcome::Proved(pf)) = prove(&s, Calculus::Priced, limits()) {
            let d = decorate(&pf, &COST);
            prop_assert!(check_labelled_proof(&d, &COST).is_ok());
            prop_assert_eq!(d.label.clone(), cost_of(&pf, &COST));
            prop_assert_eq!(skeleton(&d), pf);
        }
    }

    #[test]
    fn proofs_survive_serialisation(seed in any::<u64>()) {
        let s = random_sequent(&mut seeded(seed), &grammar(), 5, 3);
        if let Ok(Outcome::Proved(pf)) = prove(&s, Calculus::Priced, limits()) {
            let d = decorate(&pf, &COST);
            match read_proof(&write_labelled_proof(&d, "cost")).unwrap() {
                ProofFile::Labelled { proof, .. } => {
                    prop_assert!(check_labelled_proof(&proof, &COST).is_ok());
                    prop_assert_eq!(proof.label, d.label);
                    prop_assert_eq!(proof.conclusion, d.conclusion);
                }
                ProofFile::Plain { .. } => prop_assert!(false, "labels lost"),
            }
        }
    }

    #[test]
    fn budgets_only_change_on_derelictions(seed in any::<u64>(), budget in 0i64..6) {
        let mut rng = seeded(seed);
        let s = random_sequent(&mut rng, &grammar(), 5, 3);
        let mut st = GameState::single(s, Some(CostValue::int(budget)));
        for _ in 0..40 {
            let moves = legal_moves(&st, &COST);
            let Some(mv) = moves.choose(&mut rng) else { break };
            let before = st.budget.clone().unwrap();
            let price = dereliction_price(&st.subgames[mv.subgame], &mv.instance()).cloned();
            let next = match apply_move(&st, mv, &COST).unwrap() {
                MoveOutcome::Next(n) => n,
                MoveOutcome::Choice(l, r) => if rng.gen() { l } else { r },
            };
            let after = next.budget.clone().unwrap();
            match price {
                Some(a) => prop_assert_eq!(&after, &COST.div(&before, &a).unwrap()),
                None => prop_assert_eq!(&after, &before),
            }
            prop_assert!(num(&after) <= num(&before));
            st = next;
        }
    }

    #[test]
    fn budget_free_subgames_are_independent(s1 in any::<u64>(), s2 in any::<u64>()) {
        let a = random_sequent(&mut seeded(s1), &grammar(), 4, 2);
        let b = random_sequent(&mut seeded(s2), &grammar(), 4, 2);
        let both = game_search(&GameState::new(vec![a.clone(), b.clone()], None), &COST, limits()).unwrap();
        let each = game_search(&GameState::single(a, None), &COST, limits()).unwrap()
            && game_search(&GameState::single(b, None), &COST, limits()).unwrap();
        prop_assert_eq!(both, each);
    }

    #[test]
    fn some_budget_wins_iff_provable(seed in any::<u64>()) {
        let s = random_sequent(&mut seeded(seed), &grammar(), 5, 3);
        let proved = prove(&s, Calculus::Priced, limits()).unwrap();
        let won = game_search(&GameState::single(s.clone(), Some(COST.bottom())), &COST, limits()).unwrap();
        prop_assert_eq!(proved.is_proved(), won, "{}", s);
    }

    #[test]
    fn decorated_proofs_win_at_their_cost(seed in any::<u64>()) {
        let s = random_sequent(&mut seeded(seed), &grammar(), 4, 3);
        if let Ok(Outcome::Proved(pf)) = prove(&s, Calculus::Priced, limits()) {
            let d = decorate(&pf, &COST);
            let sigma = strategy_from_proof(&d, &COST);
            let st = GameState::single(s.clone(), Some(d.label.clone()));
            let (mut adv, value) = best_adversary(&sigma, &st, &COST).unwrap();
            prop_assert_eq!(&value.outcome, &PlayOutcome::Won);
            let trace = play(&st, &mut &sigma, &mut adv, &COST).unwrap();
            prop_assert_eq!(trace.outcome, PlayOutcome::Won);
            let additive_free = !uses(&pf, &|r: RuleName| r.is_additive_branching());
            if additive_free {
                prop_assert_eq!(value.spend, d.label);
            }
        }
    }

    #[test]
    fn encoded_transition_systems_are_extended(seed in any::<u64>()) {
        let ts = random_transition_system(&mut seeded(seed), 6, 10, 4);
        prop_assert!(check_extended(&encode_ts(&ts)));
    }

    #[test]
    fn products_are_below_both_factors(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        for k in [Builtin::Cost, Builtin::Security, Builtin::Max, Builtin::Probabilistic] {
            let (a, b) = (k.sample(&mut rng), k.sample(&mut rng));
            let ab = k.times(&a, &b);
            prop_assert!(k.leq(&ab, &a) && k.leq(&ab, &b));
            prop_assert!(k.leq(&ab, &k.glb(&a, &b)));
            if k.leq(&b, &a) {
                prop_assert_eq!(k.times(&a, &k.div(&b, &a).unwrap()), b.clone(), "{} / {} in {}", b, a, k.name());
            }
            if k.idempotent() {
                prop_assert_eq!(k.glb(&a, &b), ab);
            }
        }
    }

    #[test]
    fn cost_instance_is_shortest_path_arithmetic(a in 0i64..100, b in 0i64..100, d in 1i64..8) {
        let (x, y) = (CostValue::ratio(a, d), CostValue::ratio(b, d));
        prop_assert_eq!(COST.times(&x, &y), CostValue::ratio(a + b, d));
        prop_assert_eq!(COST.glb(&x, &y), CostValue::ratio(a.max(b), d));
        prop_assert_eq!(COST.plus(&x, &y), CostValue::ratio(a.min(b), d));
        prop_assert_eq!(COST.leq(&x, &y), b <= a);
        prop_assert_eq!(COST.top(), CostValue::int(0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cut_elimination_preserves_conclusion_and_label(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let Some((left, right)) = pricelog_core::generate::random_cut_instance(&mut rng, limits()) else { return Ok(()) };
        let result = cut(&left, &right, &COST).unwrap();
        prop_assert!(check_labelled_proof(&result, &COST).is_ok());
        prop_assert_eq!(&result.label, &COST.times(&left.label, &right.label));
        prop_assert!(num(&cost_of(&skeleton(&result), &COST)) <= num(&left.label) + num(&right.label));
        // Conclusion: the right antecedent minus the cut formula, then the
        // left antecedent minus the permanents the right one already has.
        let a = &left.conclusion.consequent;
        let mut expected = right.conclusion.antecedent.clone();
        let j = expected.iter().position(|f| f == a).unwrap();
        expected.remove(j);
        let mut shared = expected.clone();
        for f in &left.conclusion.antecedent {
            match shared.iter().position(|g| g == f && f.is_permanent()) {
                Some(i) => { shared.remove(i); }
                None => expected.push(f.clone()),
            }
        }
        let got = Sequent::new(expected, right.conclusion.consequent.clone());
        prop_assert!(result.conclusion.same_multiset(&got), "{} vs {}", result.conclusion, got);
    }
}

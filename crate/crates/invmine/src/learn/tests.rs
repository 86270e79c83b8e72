use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::exec::state::ProgramState;
use crate::formula::tests::peterson_state;
use crate::formula::{
    instantiate_atoms, signature_direct, Atom, AtomTemplate, CmpOp, Connective, ExampleSets,
    Formula, Signature,
};
use crate::lang::model::SlotId;
use crate::lang::parse_model;

use super::*;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// First-round Peterson data: the positives are the states of the
/// worked single-process trace, the negatives are the two speculated
/// states; the learner should find flag[1] == 0.
fn peterson_round_one() -> (crate::lang::ProgramModel, ExampleSets) {
    let m = parse_model(crate::exec::tests::PETERSON, "p.mpl").unwrap();
    let positives = vec![
        peterson_state(&m, 0, 0, 0, 0, 0, 0),
        peterson_state(&m, 1, 0, 1, 0, 0, 0),
        peterson_state(&m, 2, 0, 1, 0, 0, 0),
        peterson_state(&m, 4, 0, 1, 0, 0, 1),
        peterson_state(&m, 6, 0, 1, 0, 0, 0),
    ];
    let negatives = vec![
        peterson_state(&m, 0, 1, 0, 1, 0, 0),
        peterson_state(&m, 0, 2, 0, 1, 1, 0),
    ];
    (m, ExampleSets::new(positives, negatives))
}

#[test]
fn peterson_round_one_learns_flag1_zero() {
    let (m, ex) = peterson_round_one();
    let layout = m.layout();
    let alphabet: Vec<SlotId> = layout.data_slot_ids().collect();
    let atoms =
        instantiate_atoms(layout, ex.positives(), &AtomTemplate::all(), &alphabet).unwrap();
    let cfg = LearnerConfig::default();
    let res = inv_learn(&ex, &cfg, &atoms, &mut rng(1)).unwrap();

    let flag1 = layout.lookup("flag[1]").unwrap();
    let target = Formula::atom(Atom::Cmp { slot: flag1, op: CmpOp::Eq, value: 0 });
    assert_eq!(signature_direct(&res.formula, &ex), signature_direct(&target, &ex));
    assert_eq!(res.formula.len(), 1);

    // The decision tree delegates whole sets this small to inv_learn.
    let tree = decision_tree_learn(&ex, &cfg, &atoms, &mut rng(1)).unwrap();
    assert_eq!(tree.formula, res.formula);
}

#[test]
fn empty_negatives_return_a_length_one_formula_immediately() {
    let (m, ex) = peterson_round_one();
    let layout = m.layout();
    let ex = ExampleSets::new(ex.positives().to_vec(), vec![]);
    let alphabet: Vec<SlotId> = layout.data_slot_ids().collect();
    let atoms =
        instantiate_atoms(layout, ex.positives(), &AtomTemplate::all(), &alphabet).unwrap();
    let res = inv_learn(&ex, &cfg_default(), &atoms, &mut rng(3)).unwrap();
    assert_eq!(res.formula.len(), 1);
    assert!(ex.positives().iter().all(|s| res.formula.eval(s)));
}

fn cfg_default() -> LearnerConfig {
    LearnerConfig::default()
}

fn bool_pair_state(a: i64, b: i64) -> ProgramState {
    ProgramState { pcs: vec![0], vals: vec![a, b] }
}

/// Two bools, positives where a == b, negatives where a != b, and
/// constant-shape atoms only: no single atom or negation separates, so
/// the minimal formula has length 3.
fn xor_dataset() -> (Vec<Atom>, ExampleSets) {
    let m = parse_model("bool a;\nbool b;\nproc p { a = a; }", "xor.mpl").unwrap();
    let layout = m.layout();
    let ex = ExampleSets::new(
        vec![bool_pair_state(0, 0), bool_pair_state(1, 1)],
        vec![bool_pair_state(0, 1), bool_pair_state(1, 0)],
    );
    let alphabet: Vec<SlotId> = layout.data_slot_ids().collect();
    let const_templates = [
        AtomTemplate::LeqConst,
        AtomTemplate::GeqConst,
        AtomTemplate::EqConst,
        AtomTemplate::NeqConst,
    ];
    let atoms = instantiate_atoms(layout, ex.positives(), &const_templates, &alphabet).unwrap();
    (atoms, ex)
}

/// Brute-force enumeration of every formula by length, no pruning.
/// Independent of the learner's enumerator.
fn brute_force_by_length(atoms: &[Atom], max_len: usize) -> Vec<Vec<Formula>> {
    let mut by_len: Vec<Vec<Formula>> = vec![Vec::new(); max_len + 1];
    by_len[1] = atoms.iter().map(|a| Formula::atom(*a)).collect();
    for len in 2..=max_len {
        let mut level = Vec::new();
        for f in &by_len[len - 1] {
            level.push(Formula::not(f.clone()));
        }
        for l1 in 1..len.saturating_sub(1) {
            let l2 = len - 1 - l1;
            for f1 in &by_len[l1] {
                for f2 in &by_len[l2] {
                    for op in Connective::ALL {
                        level.push(Formula::bin(op, f1.clone(), f2.clone()));
                    }
                }
            }
        }
        by_len[len] = level;
    }
    by_len
}

fn separates(f: &Formula, ex: &ExampleSets) -> bool {
    ex.positives().iter().all(|s| f.eval(s)) && ex.negatives().iter().all(|s| !f.eval(s))
}

#[test]
fn xor_toy_needs_length_three_and_the_learner_finds_it() {
    let (atoms, ex) = xor_dataset();
    // Oracle: the smallest length at which any formula separates.
    let by_len = brute_force_by_length(&atoms, 4);
    let oracle_min = (1..=4)
        .find(|&l| by_len[l].iter().any(|f| separates(f, &ex)))
        .expect("some formula up to length 4 must separate");
    assert_eq!(oracle_min, 3);

    let res = inv_learn(&ex, &cfg_default(), &atoms, &mut rng(5)).unwrap();
    assert!(separates(&res.formula, &ex), "learned formula must separate");
    assert_eq!(res.formula.len(), oracle_min);
}

#[test]
fn enumeration_covers_every_signature_up_to_length_four() {
    use std::collections::HashSet;
    // 3 atoms over 6 examples; enumeration with signature dedup must
    // cover the signature of every brute-force formula of len <= 4.
    let ex = ExampleSets::new(
        vec![
            ProgramState { pcs: vec![0], vals: vec![0, 0] },
            ProgramState { pcs: vec![0], vals: vec![1, 1] },
            ProgramState { pcs: vec![0], vals: vec![1, 0] },
        ],
        vec![
            ProgramState { pcs: vec![0], vals: vec![0, 1] },
            ProgramState { pcs: vec![1], vals: vec![0, 0] },
            ProgramState { pcs: vec![1], vals: vec![1, 1] },
        ],
    );
    let a = |slot, v| Atom::Cmp { slot: SlotId(slot), op: CmpOp::Eq, value: v };
    let atoms = vec![a(1, 0), a(2, 1), a(0, 1)];
    let banked = enumerate_formulas(&atoms, &ex, 4);
    let seen: HashSet<Signature> =
        banked.iter().map(|(_, sig)| sig.clone()).collect();
    let by_len = brute_force_by_length(&atoms, 4);
    for level in &by_len[1..] {
        for f in level {
            let sig = signature_direct(f, &ex);
            assert!(seen.contains(&sig), "missing signature for {f:?}");
        }
    }
}

#[test]
fn dedup_keeps_first_representative() {
    let ex = ExampleSets::new(
        vec![bool_pair_state(0, 0), bool_pair_state(1, 1)],
        vec![bool_pair_state(0, 1)],
    );
    let f = Formula::atom(Atom::Cmp { slot: SlotId(1), op: CmpOp::Eq, value: 0 });
    let nn = Formula::not(Formula::not(f.clone()));
    let sig_f = signature_direct(&f, &ex);
    let sig_nn = signature_direct(&nn, &ex);
    let kept: Vec<(Formula, Signature)> =
        dedup_by_signature(vec![(f.clone(), sig_f.clone()), (nn, sig_nn)]).collect();
    assert_eq!(kept.len(), 1);
    assert_eq!(kept[0].0, f);
}

#[test]
fn dedup_drops_observationally_equal_thresholds() {
    // x <= 2 and x <= 3 agree on every example when no example has x == 3.
    let st = |v| ProgramState { pcs: vec![], vals: vec![v] };
    let ex = ExampleSets::new(vec![st(0), st(2)], vec![st(5), st(7)]);
    let le = |c| {
        let f = Formula::atom(Atom::Cmp { slot: SlotId(0), op: CmpOp::Le, value: c });
        let sig = signature_direct(&f, &ex);
        (f, sig)
    };
    let kept: Vec<_> = dedup_by_signature(vec![le(2), le(3)]).collect();
    assert_eq!(kept.len(), 1);
    assert_eq!(kept[0].0.len(), 1);

    // Distinct signatures all survive.
    let kept: Vec<_> = dedup_by_signature(vec![le(1), le(4), le(6)]).collect();
    assert_eq!(kept.len(), 3);
}

#[test]
fn perfect_root_atom_reduces_to_itself() {
    let st = |v| ProgramState { pcs: vec![], vals: vec![v] };
    let ex = ExampleSets::new(
        vec![st(0), st(1), st(2)],
        vec![st(5), st(6), st(7), st(8)],
    );
    let perfect = Atom::Cmp { slot: SlotId(0), op: CmpOp::Le, value: 2 };
    let mut cfg = cfg_default();
    cfg.leaf_bound = 2; // force splitting
    let res = decision_tree_learn(&ex, &cfg, &[perfect], &mut rng(9)).unwrap();
    let target = Formula::atom(perfect);
    assert_eq!(signature_direct(&res.formula, &ex), signature_direct(&target, &ex));
    // The false side has no positives, so the disjunction reduced and
    // the guard appears positively.
    assert!(matches!(res.formula, Formula::Bin(Connective::And, _, _)));
}

#[test]
fn forced_splits_on_large_separable_sets_keep_the_contract() {
    use rand::Rng;
    let mut r = rng(1234);
    // Positives live in a band, negatives outside it; plenty of both.
    let st = |a: i64, b: i64| ProgramState { pcs: vec![0], vals: vec![a, b] };
    // The positive band x <= 4 && y >= 3 holds 5 * 17 = 85 states.
    let mut positives = Vec::new();
    let mut negatives = Vec::new();
    while positives.len() < 60 {
        let s = st(r.random_range(0..5), r.random_range(3..20));
        if !positives.contains(&s) {
            positives.push(s);
        }
    }
    while negatives.len() < 80 {
        let s = st(r.random_range(0..20), r.random_range(0..20));
        if (s.vals[0] > 4 || s.vals[1] < 3) && !negatives.contains(&s) {
            negatives.push(s);
        }
    }
    let m = parse_model("int[0..19] x;\nint[0..19] y;\nproc p { x = x; }", "band.mpl").unwrap();
    let layout = m.layout();
    let alphabet: Vec<SlotId> = layout.data_slot_ids().collect();
    let atoms = instantiate_atoms(layout, &positives, &AtomTemplate::all(), &alphabet).unwrap();
    let ex = ExampleSets::new(positives, negatives);
    let mut cfg = cfg_default();
    cfg.leaf_bound = 8;
    cfg.subsample_size = 6;
    let res = decision_tree_learn(&ex, &cfg, &atoms, &mut rng(77)).unwrap();
    // Full-set recall and precision, checked by direct evaluation.
    assert!(ex.positives().iter().all(|s| res.formula.eval(s)));
    let fp = ex.negatives().iter().filter(|s| res.formula.eval(s)).count() as u64;
    let tp = ex.positives().len() as u64;
    assert!(Ratio::new(tp, tp + fp) > cfg.delta, "precision too low: {fp} leaks");
    assert!(res.stats.tree_nodes > 1, "leaf bound 8 must force splits");

    // Determinism: the same seed reproduces the same formula.
    let res2 = decision_tree_learn(&ex, &cfg, &atoms, &mut rng(77)).unwrap();
    assert_eq!(res.formula, res2.formula);
}

#[test]
fn empty_positive_set_is_rejected() {
    let ex = ExampleSets::new(vec![], vec![bool_pair_state(0, 1)]);
    let atoms = [Atom::Cmp { slot: SlotId(1), op: CmpOp::Eq, value: 0 }];
    assert!(matches!(
        inv_learn(&ex, &cfg_default(), &atoms, &mut rng(0)),
        Err(LearnError::EmptyPositives)
    ));
    assert!(matches!(
        decision_tree_learn(&ex, &cfg_default(), &atoms, &mut rng(0)),
        Err(LearnError::EmptyPositives)
    ));
}

#[test]
fn inseparable_examples_fail_with_best_candidate() {
    // Positives and negatives identical on the only atom's slot.
    let p = ProgramState { pcs: vec![0], vals: vec![1, 0] };
    let n = ProgramState { pcs: vec![1], vals: vec![1, 1] };
    let ex = ExampleSets::new(vec![p], vec![n]);
    let atoms = [Atom::Cmp { slot: SlotId(1), op: CmpOp::Eq, value: 1 }];
    let err = inv_learn(&ex, &cfg_default(), &atoms, &mut rng(2)).unwrap_err();
    match &err {
        LearnError::Exhausted { best, stats, .. } => {
            assert!(best.is_some());
            assert!(stats.formulas_enumerated > 0);
        }
        other => panic!("unexpected error {other:?}"),
    }
}

#[test]
fn ratio_parsing_is_exact() {
    assert_eq!(parse_ratio("0.95"), Some(Ratio::new(19, 20)));
    assert_eq!(parse_ratio("19/20"), Some(Ratio::new(19, 20)));
    assert_eq!(parse_ratio("1"), Some(Ratio::new(1, 1)));
    assert_eq!(parse_ratio(".5"), Some(Ratio::new(1, 2)));
    assert_eq!(parse_ratio("0.875"), Some(Ratio::new(7, 8)));
    assert_eq!(parse_ratio("x"), None);
    assert_eq!(parse_ratio("1/0"), None);
}

#[test]
fn default_config_validates() {
    LearnerConfig::default().validate().unwrap();
    let mut bad = LearnerConfig::default();
    bad.delta = Ratio::new(3, 2);
    assert!(bad.validate().is_err());
}

mod common;

use budgeted_efx::efx_three::{favorite_goods, preprocess, round_robin_self_split};
use budgeted_efx::{
    certify, efx_3a, failures, is_budget_feasible, is_efx, max_nsw_allocation, AlphaParams, SearchBudget,
};
use common::{instance, single_agent};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn every_run_certifies(inst in instance(3, 4..=7, 10)) {
        let out = efx_3a(&inst, &AlphaParams::default(), &SearchBudget::default()).unwrap();
        let checks = certify(&inst, &out);
        prop_assert!(failures(&checks).is_empty(), "{:?}", failures(&checks));
        prop_assert!(is_efx(&inst, &out.allocation) && is_budget_feasible(&inst, &out.allocation));
        prop_assert_eq!(efx_3a(&inst, &AlphaParams::default(), &SearchBudget::default()).unwrap(), out);
    }
}

proptest! {
    #[test]
    fn reserved_goods_beat_every_remaining_affordable_good(inst in instance(3, 3..=8, 10)) {
        let opt = max_nsw_allocation(&inst, &[0, 1, 2], &inst.all_goods(), &SearchBudget::default()).unwrap();
        let (pool, setaside) = preprocess(&inst, &opt).unwrap();
        prop_assert!(setaside.as_bundle().iter().all(|g| !pool.contains(g)));
        prop_assert_eq!(pool.len() + setaside.as_bundle().len(), inst.num_goods());
        for i in 0..3 {
            for g in pool.iter().filter(|&g| inst.cost(g) <= inst.budget(i)) {
                prop_assert!(setaside.value(i) >= inst.value(i, g), "agent {} good {}", i, g);
            }
        }
    }

    #[test]
    fn reserves_honor_favorites_inside_the_optimum(inst in instance(3, 3..=8, 10)) {
        let opt = max_nsw_allocation(&inst, &[0, 1, 2], &inst.all_goods(), &SearchBudget::default()).unwrap();
        let (_, setaside) = preprocess(&inst, &opt).unwrap();
        for i in 0..3 {
            let floor = favorite_goods(&inst, i).into_iter().filter(|&g| opt.bundle(i).contains(g)).map(|g| inst.value(i, g).clone()).max();
            if let Some(floor) = floor {
                prop_assert!(*setaside.value(i) >= floor);
            }
        }
    }

    #[test]
    fn round_robin_parts_are_ef1(inst in single_agent(10)) {
        let pool = inst.all_goods();
        let split = round_robin_self_split(&inst, 0, &pool);
        prop_assert_eq!(split.first.union(&split.second), pool);
        prop_assert!(split.first.iter().all(|g| !split.second.contains(g)));
        let (first, second) = (inst.value_of(0, &split.first), inst.value_of(0, &split.second));
        prop_assert!(first >= second);
        if let Some(top) = split.first.iter().map(|g| inst.value(0, g)).max() {
            prop_assert!(second >= &first - top);
        }
    }
}

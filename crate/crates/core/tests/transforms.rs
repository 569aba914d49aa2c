mod common;

use std::collections::BTreeSet;
use std::fmt::Write as _;

use common::{choices, random_adaptive_module, relabeled_diff, Choices};
use proptest::prelude::*;
use qir_toolkit::frontend::{parse_module, print_module, validate_profile, Profile};
use qir_toolkit::runtime::{interpret, run_shot, QubitKey, RuntimeOptions};
use qir_toolkit::transforms::{
    allocate_static_addresses_with_map, lower_to_base, lower_to_base_with_cap, unroll_and_fold, TransformError,
};

fn key_map(dynamic: bool) -> impl Fn(QubitKey) -> QubitKey {
    // A single allocated array gets runtime handles 1..=n for elements 0..n.
    move |k| match (dynamic, k) {
        (true, QubitKey::Dynamic(h)) => QubitKey::Static(h - 1),
        _ => k,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lowering_yields_base(mut ch in choices()) {
        let p = random_adaptive_module(&mut ch);
        let m = parse_module(&p.text).unwrap();
        let lowered = lower_to_base(&m).unwrap();
        prop_assert_eq!(validate_profile(&lowered).profile, Profile::Base);
        let reparsed = parse_module(&print_module(&lowered)).unwrap();
        prop_assert_eq!(validate_profile(&reparsed).profile, Profile::Base);
    }

    #[test]
    fn lowering_is_idempotent(mut ch in choices()) {
        let p = random_adaptive_module(&mut ch);
        let once = lower_to_base(&parse_module(&p.text).unwrap()).unwrap();
        let twice = lower_to_base(&once).unwrap();
        prop_assert_eq!(print_module(&once), print_module(&twice));
    }

    #[test]
    fn lowering_preserves_the_state(mut ch in choices()) {
        let p = random_adaptive_module(&mut ch);
        let m = parse_module(&p.text).unwrap();
        let lowered = lower_to_base(&m).unwrap();
        let opts = RuntimeOptions::default();
        let a = run_shot(&m, 5, 0, &opts).unwrap();
        let b = run_shot(&lowered, 5, 0, &opts).unwrap();
        let d = relabeled_diff(&a.pre_measurement, &a.pre_measurement_order, &b.pre_measurement, &b.pre_measurement_order, key_map(p.dynamic));
        prop_assert!(d <= 1e-12, "max amplitude difference {d}\n{}", p.text);
    }

    #[test]
    fn lowering_preserves_outcomes(mut ch in choices(), seed in any::<u64>()) {
        let p = random_adaptive_module(&mut ch);
        let m = parse_module(&p.text).unwrap();
        let lowered = lower_to_base(&m).unwrap();
        let opts = RuntimeOptions::default();
        prop_assert_eq!(interpret(&m, 16, seed, &opts).unwrap(), interpret(&lowered, 16, seed, &opts).unwrap());
    }

    #[test]
    fn unrolling_is_a_fixpoint(mut ch in choices()) {
        let p = random_adaptive_module(&mut ch);
        let once = unroll_and_fold(&parse_module(&p.text).unwrap(), 1 << 16).unwrap();
        prop_assert_eq!(once.entry.blocks.len(), 1);
        let twice = unroll_and_fold(&once, 1 << 16).unwrap();
        prop_assert_eq!(print_module(&once), print_module(&twice));
    }

    #[test]
    fn allocation_respects_liveness(mut ch in choices()) {
        let (text, events) = lifetimes(&mut ch);
        let m = parse_module(&text).unwrap();
        let (out, map) = allocate_static_addresses_with_map(&m).unwrap();
        prop_assert!(!print_module(&out).contains("call ptr @__quantum__rt__qubit_allocate"));

        // Independent first-fit over the recorded lifetimes.
        let mut reserved = BTreeSet::new();
        for e in &events {
            if let Event::Static(i) = e {
                reserved.insert(*i);
            }
        }
        let mut live: Vec<(usize, u64)> = Vec::new();
        let mut expected = Vec::new();
        for e in &events {
            match e {
                Event::Alloc(h) => {
                    let idx = (0u64..).find(|i| !reserved.contains(i) && live.iter().all(|(_, j)| j != i)).unwrap();
                    live.push((*h, idx));
                    expected.push((format!("h{h}"), idx));
                }
                Event::Release(h) => live.retain(|(g, _)| g != h),
                Event::Static(_) => {}
            }
        }
        prop_assert_eq!(&map.assignments, &expected);
        let hw = expected.iter().map(|(_, i)| i + 1).chain(reserved.iter().map(|i| i + 1)).max().unwrap_or(0);
        prop_assert_eq!(map.high_water_mark, hw);
    }
}

enum Event {
    Alloc(usize),
    Release(usize),
    Static(u64),
}

/// Random sequence of single-qubit allocations, uses and releases.
fn lifetimes(ch: &mut Choices) -> (String, Vec<Event>) {
    let mut body = String::new();
    let mut events = Vec::new();
    let mut live: Vec<usize> = Vec::new();
    let mut next = 0;
    for _ in 0..ch.range(1, 24) {
        match ch.below(5) {
            0 | 1 => {
                writeln!(body, "  %h{next} = call ptr @__quantum__rt__qubit_allocate()").unwrap();
                events.push(Event::Alloc(next));
                live.push(next);
                next += 1;
            }
            2 if !live.is_empty() => {
                let h = live.remove(ch.below(live.len() as u32) as usize);
                writeln!(body, "  call void @__quantum__rt__qubit_release(ptr %h{h})").unwrap();
                events.push(Event::Release(h));
            }
            3 if ch.below(4) == 0 => {
                let i = ch.below(4) as u64;
                writeln!(body, "  call void @__quantum__qis__x__body(ptr inttoptr (i64 {i} to ptr))").unwrap();
                events.push(Event::Static(i));
            }
            _ if !live.is_empty() => {
                let h = live[ch.below(live.len() as u32) as usize];
                writeln!(body, "  call void @__quantum__qis__h__body(ptr %h{h})").unwrap();
            }
            _ => {}
        }
    }
    let text = format!(
        "define void @main() #0 {{\nentry:\n{body}  ret void\n}}\n\n\
         declare ptr @__quantum__rt__qubit_allocate()\n\
         declare void @__quantum__rt__qubit_release(ptr)\n\
         declare void @__quantum__qis__h__body(ptr)\n\
         declare void @__quantum__qis__x__body(ptr)\n\n\
         attributes #0 = {{ \"entry_point\" }}\n"
    );
    (text, events)
}

#[test]
fn cap_counts_block_entries() {
    let m = parse_module(qir_toolkit::corpus::FOR_LOOP).unwrap();
    assert!(lower_to_base_with_cap(&m, 10).is_ok());
    let err = lower_to_base_with_cap(&m, 9).unwrap_err();
    assert!(matches!(err, TransformError::CapExceeded { cap: 9, .. }), "{err}");
}

#[test]
fn feedback_is_rejected() {
    let m = parse_module(qir_toolkit::corpus::FEEDBACK).unwrap();
    let err = lower_to_base(&m).unwrap_err();
    assert_eq!(err.kind(), "FeedbackRequired");
}

#[test]
fn gate_after_measurement_is_not_sinkable() {
    let text = "define void @main() #0 {\nentry:\n\
        call void @__quantum__qis__mz__body(ptr null, ptr writeonly null)\n\
        call void @__quantum__qis__h__body(ptr null)\n  ret void\n}\n\n\
        declare void @__quantum__qis__mz__body(ptr, ptr writeonly)\n\
        declare void @__quantum__qis__h__body(ptr)\n\nattributes #0 = { \"entry_point\" }\n";
    let err = lower_to_base(&parse_module(text).unwrap()).unwrap_err();
    assert_eq!(err.kind(), "MeasurementNotSinkable");
}

#[test]
fn corpus_lowers_to_base() {
    for (name, text) in qir_toolkit::corpus::QIR_FILES {
        let m = parse_module(text).unwrap();
        match lower_to_base(&m) {
            Ok(b) => assert_eq!(validate_profile(&b).profile, Profile::Base, "{name}"),
            Err(e) => assert_eq!(name, "feedback.ll", "{name}: {e}"),
        }
    }
}

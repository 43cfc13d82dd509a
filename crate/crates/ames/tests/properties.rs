use ames::election::Election;
use ames::pabulib::{parse_pabulib, serialize_pabulib};
use ames::rational::{display, int, parse_decimal};
use ames::solution::{lex_compare, LexOrdering};
use ames::testkit::{random_election, random_solution, rng};
use proptest::prelude::*;

fn small_election()
-> impl Strategy<Value = (Vec<i64>, Vec<Vec<usize>>, i64)> {
    // costs, ballots as project index sets, budget
    (1usize..=5, 1usize..=5).prop_flat_map(|(m, n)| {
        (
            prop::collection::vec(1i64..=12, m),
            prop::collection::vec(prop::collection::btree_set(0..m, 1..=m), n),
            1i64..=60,
        )
            .prop_map(|(costs, ballots, budget)| {
                (
                    costs,
                    ballots.into_iter().map(|b| b.into_iter().collect()).collect(),
                    budget,
                )
            })
    })
}

fn build(costs: &[i64], ballots: &[Vec<usize>], budget: i64) -> Option<Election> {
    let projects: Vec<(String, _)> = costs
        .iter()
        .enumerate()
        .map(|(j, &c)| (format!("p{j}"), int(c)))
        .collect();
    let named: Vec<Vec<String>> = ballots
        .iter()
        .map(|b| b.iter().map(|&j| format!("p{j}")).collect())
        .collect();
    Election::new(projects, named, int(budget)).ok()
}

proptest! {
    #[test]
    fn epsilon_ignores_the_budget((costs, ballots, budget) in small_election(), other in 1i64..=500) {
        if let Some(e) = build(&costs, &ballots, budget) {
            let moved = e.with_budget(int(other)).unwrap();
            prop_assert_eq!(e.epsilon(), moved.epsilon());
        }
    }

    #[test]
    fn decimal_display_round_trips(int_part in 0i64..1_000_000, frac in 0u32..100) {
        let text = format!("{int_part}.{frac:02}");
        let value = parse_decimal(&text).unwrap();
        let back = parse_decimal(&display(&value)).unwrap();
        prop_assert_eq!(value, back);
    }

    #[test]
    fn pabulib_round_trip((costs, ballots, budget) in small_election()) {
        if let Some(e) = build(&costs, &ballots, budget) {
            let file = ames::pabulib::PabulibFile {
                election: e,
                metadata: Default::default(),
                project_extras: Default::default(),
                voter_ids: (0..ballots.len()).map(|i| format!("v{i}")).collect(),
            };
            let text = serialize_pabulib(&file);
            let parsed = parse_pabulib(&text).unwrap().election;
            prop_assert_eq!(file.election.budget(), parsed.budget());
            prop_assert_eq!(file.election.epsilon(), parsed.epsilon());
            for p in file.election.projects() {
                let q = parsed.index_of(&p.id).unwrap();
                prop_assert_eq!(&p.cost, parsed.cost(q));
                prop_assert_eq!(p.priority, parsed.priority(q));
            }
            for i in 0..file.election.num_voters() {
                prop_assert_eq!(file.election.ballot(i), parsed.ballot(i));
            }
        }
    }
}

#[test]
fn lex_compare_is_a_total_preorder() {
    let mut r = rng(131);
    for _ in 0..40 {
        let e = random_election(&mut r);
        let a = random_solution(&e, &mut r);
        let b = random_solution(&e, &mut r);
        let c = random_solution(&e, &mut r);
        let ab = lex_compare(&a, &b, &e);
        let ba = lex_compare(&b, &a, &e);
        match ab {
            LexOrdering::Better => assert_eq!(ba, LexOrdering::Worse),
            LexOrdering::Worse => assert_eq!(ba, LexOrdering::Better),
            LexOrdering::Equal => assert_eq!(ba, LexOrdering::Equal),
        }
        assert_eq!(lex_compare(&a, &a, &e), LexOrdering::Equal);
        // transitivity of "not worse"
        if lex_compare(&a, &b, &e) != LexOrdering::Worse
            && lex_compare(&b, &c, &e) != LexOrdering::Worse
        {
            assert_ne!(lex_compare(&a, &c, &e), LexOrdering::Worse);
        }
    }
}

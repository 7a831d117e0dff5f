//! Property-based invariants over randomly shaped inputs. Each property is
//! something every later stage silently relies on, so a shrunken
//! counterexample here is worth more than a large end-to-end failure.

use num::BigRational;
use proptest::collection::vec;
use proptest::prelude::*;

use piqp::greedy::{greedy_budget_certificate, greedy_solve, GreedyConfig};
use piqp::instance::{read_instance_str, write_instance_string, PiqpInstance};
use piqp::mkp::{round_p_plus_1, solve_lp_vertex, MkpProblem};
use piqp::rounding::repair_infeasible;
use piqp::BinarySolution;

/// A small random instance: symmetric benefits with zero diagonal,
/// nonnegative weights, positive budgets.
fn arb_instance() -> impl Strategy<Value = PiqpInstance> {
    (2usize..8, 1usize..3).prop_flat_map(|(n, p)| {
        let benefits = vec(vec(0u64..10, n), n);
        let linear = vec(0u64..5, n);
        let weights = vec(vec(0u64..10, n), p);
        let budgets = vec(1u64..40, p);
        (benefits, linear, weights, budgets).prop_map(move |(mut b, c, a, w)| {
            for i in 0..n {
                b[i][i] = 0;
                for j in 0..i {
                    b[i][j] = b[j][i];
                }
            }
            PiqpInstance::from_dense(b, c, a, w).expect("shapes are consistent by construction")
        })
    })
}

proptest! {
    /// Scaled feasibility is the stronger condition: any assignment that
    /// fits the uniform scaled budget also fits every original budget.
    #[test]
    fn scaled_feasible_implies_original_feasible(inst in arb_instance(), bits in vec(0u8..2, 16)) {
        let s = inst.scale();
        let x: Vec<u8> = (0..inst.n).map(|j| bits[j % bits.len()]).collect();
        let scaled = BinarySolution::evaluate_scaled(&s, &x);
        let original = BinarySolution::evaluate(&inst, &x);
        prop_assert_eq!(scaled.objective, original.objective, "objectives agree on 0-1 points");
        if scaled.feasible {
            prop_assert!(original.feasible, "scaled-feasible point violates an original budget");
        }
    }

    /// The greedy never returns an infeasible assignment, and on the light
    /// split part its output is either all-ones or half-saturating.
    #[test]
    fn greedy_output_feasible_and_certified(inst in arb_instance(), t in 1usize..4) {
        let pruned = inst.scale().prune_infeasible_pairs();
        let sol = greedy_solve(&pruned, &GreedyConfig { t });
        prop_assert!(sol.feasible, "greedy output must satisfy scaled budgets");

        let (light, _) = pruned.split_piqps_piqpr();
        let light_sol = greedy_solve(&light, &GreedyConfig { t });
        prop_assert!(light_sol.feasible);
        prop_assert!(
            greedy_budget_certificate(&light_sol, &light),
            "light-part output is neither all-ones nor half-saturating"
        );
    }

    /// Repair turns any 0-1 vector into a feasible one and leaves feasible
    /// vectors untouched.
    #[test]
    fn repair_always_feasible_and_idempotent_on_feasible(
        inst in arb_instance(),
        bits in vec(0u8..2, 16),
    ) {
        let s = inst.scale().prune_infeasible_pairs();
        let x: Vec<u8> = (0..inst.n).map(|j| bits[j % bits.len()]).collect();
        let repaired = repair_infeasible(&s, &x);
        prop_assert!(repaired.feasible, "repair must end feasible");
        for j in 0..inst.n {
            prop_assert!(
                repaired.x[j] <= u8::from(x[j] != 0 && !s.fixed_zero[j]),
                "repair may only drop vertices, never add them"
            );
        }
        let already = BinarySolution::evaluate_scaled(&s, &repaired.x);
        let again = repair_infeasible(&s, &already.x);
        prop_assert_eq!(&again.x, &repaired.x, "repairing a feasible vector is the identity");
    }

    /// The knapsack LP vertex has at most p fractional coordinates, and the
    /// rounded value is within a (p+1) factor of the exact LP optimum —
    /// checked in exact rational arithmetic.
    #[test]
    fn mkp_vertex_and_rounding_guarantee(
        n in 1usize..9,
        p in 1usize..4,
        raw_benefits in vec(0u64..30, 8),
        raw_weights in vec(vec(0u64..15, 8), 3),
        raw_budgets in vec(1u64..25, 3),
    ) {
        let benefits: Vec<u64> = raw_benefits[..n].to_vec();
        let budgets: Vec<u64> = raw_budgets[..p].to_vec();
        let weights: Vec<Vec<u64>> = (0..p)
            .map(|i| (0..n).map(|j| raw_weights[i][j].min(budgets[i])).collect())
            .collect();
        let prob = MkpProblem::new(benefits, weights, budgets).expect("weights clamped to budgets");
        let lp = solve_lp_vertex(&prob);
        prop_assert!(
            lp.fractional.len() <= p,
            "vertex has {} fractional coordinates, p = {p}",
            lp.fractional.len()
        );
        let rounded = round_p_plus_1(&prob);
        let scaled = BigRational::from_integer(((p as u64 + 1) * rounded.value).into());
        prop_assert!(
            scaled >= lp.value,
            "(p+1) * rounded = {scaled} below exact LP value {}",
            lp.value
        );
        // The rounded solution is genuinely feasible.
        for (i, row) in prob.weights.iter().enumerate() {
            let load: u64 = (0..n).filter(|&j| rounded.x[j] == 1).map(|j| row[j]).sum();
            prop_assert!(load <= prob.budgets[i]);
        }
    }

    /// Instance JSON survives a write/read round trip bit for bit.
    #[test]
    fn instance_json_roundtrip(inst in arb_instance()) {
        let text = write_instance_string(&inst);
        let back = read_instance_str(&text).expect("own output must parse");
        prop_assert_eq!(back, inst);
    }

    /// Pruning never invents benefit: the pruned optimum evaluated by the
    /// original objective matches the pruned objective (dropped pairs are
    /// exactly the never-coexisting ones).
    #[test]
    fn pruned_objective_agrees_on_feasible_points(inst in arb_instance(), bits in vec(0u8..2, 16)) {
        let s = inst.scale();
        let pruned = s.prune_infeasible_pairs();
        let x: Vec<u8> = (0..inst.n)
            .map(|j| u8::from(bits[j % bits.len()] != 0 && !pruned.fixed_zero[j]))
            .collect();
        let on_pruned = BinarySolution::evaluate_scaled(&pruned, &x);
        if on_pruned.feasible {
            let on_original = BinarySolution::evaluate(&inst, &x);
            prop_assert_eq!(
                on_pruned.objective, on_original.objective,
                "a pruned pair slipped into a feasible assignment"
            );
        }
    }
}

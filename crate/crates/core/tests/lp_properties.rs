use cellplan_core::lp::{solve_lp, LpProblem, LpStatus, Relation, Sense};
use proptest::prelude::*;

/// Constraint `a·x (relation) b` used by the vertex enumerator; bounds are
/// included as single-variable rows.
struct Half {
    a: Vec<f64>,
    relation: Relation,
    b: f64,
}

fn halves(p: &LpProblem) -> Vec<Half> {
    let n = p.num_vars;
    let mut out: Vec<Half> = p
        .rows
        .iter()
        .map(|r| {
            let mut a = vec![0.0; n];
            for &(j, v) in &r.terms {
                a[j] += v;
            }
            Half {
                a,
                relation: r.relation,
                b: r.rhs,
            }
        })
        .collect();
    for (j, &(lo, hi)) in p.var_bounds.iter().enumerate() {
        let mut a = vec![0.0; n];
        a[j] = 1.0;
        out.push(Half {
            a: a.clone(),
            relation: Relation::Ge,
            b: lo,
        });
        out.push(Half {
            a,
            relation: Relation::Le,
            b: hi,
        });
    }
    out
}

/// Solves the square system by Gaussian elimination with partial pivoting.
fn solve_square(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col].abs() < 1e-9 {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = m[r][col] / m[col][col];
                if f != 0.0 {
                    for c in col..n {
                        m[r][c] -= f * m[col][c];
                    }
                    rhs[r] -= f * rhs[col];
                }
            }
        }
    }
    Some((0..n).map(|i| rhs[i] / m[i][i]).collect())
}

fn combinations(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn go(start: usize, n: usize, k: usize, acc: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if acc.len() == k {
            f(acc);
            return;
        }
        for i in start..n {
            if n - i < k - acc.len() {
                break;
            }
            acc.push(i);
            go(i + 1, n, k, acc, f);
            acc.pop();
        }
    }
    go(0, n, k, &mut Vec::new(), f);
}

/// Best objective over all basic feasible points of a bounded problem.
fn vertex_optimum(p: &LpProblem) -> Option<f64> {
    let hs = halves(p);
    let n = p.num_vars;
    let mut best: Option<f64> = None;
    combinations(hs.len(), n, &mut |pick| {
        let m = pick.iter().map(|&i| hs[i].a.clone()).collect();
        let rhs = pick.iter().map(|&i| hs[i].b).collect();
        let Some(x) = solve_square(m, rhs) else { return };
        let feasible = hs.iter().all(|h| {
            let lhs: f64 = h.a.iter().zip(&x).map(|(a, x)| a * x).sum();
            h.relation.holds(lhs, h.b, 1e-7)
        });
        if feasible {
            let v: f64 = p.objective.iter().zip(&x).map(|(c, x)| c * x).sum();
            best = Some(match (best, p.sense) {
                (None, _) => v,
                (Some(b), Sense::Maximize) => b.max(v),
                (Some(b), Sense::Minimize) => b.min(v),
            });
        }
    });
    best
}

/// Box-bounded problems where the origin is feasible: `≤` rows have
/// nonnegative right-hand sides and `≥` rows nonpositive ones.
fn bounded_lp() -> impl Strategy<Value = LpProblem> {
    (1usize..=8, 1usize..=8).prop_flat_map(|(n, m)| {
        (
            prop::collection::vec(-9i32..=9, n),
            prop::collection::vec(1i32..=9, n),
            prop::collection::vec((prop::collection::vec(-9i32..=9, n), any::<bool>(), 0i32..=9), m),
            any::<bool>(),
        )
            .prop_map(move |(c, ub, rows, maximize)| {
                let sense = if maximize { Sense::Maximize } else { Sense::Minimize };
                let mut p = LpProblem::new(n, sense);
                p.objective = c.iter().map(|&v| v as f64).collect();
                p.var_bounds = ub.iter().map(|&u| (0.0, u as f64)).collect();
                for (a, le, b) in rows {
                    let terms = a.iter().enumerate().filter(|(_, &v)| v != 0).map(|(j, &v)| (j, v as f64)).collect();
                    if le {
                        p.add_row(terms, Relation::Le, b as f64);
                    } else {
                        p.add_row(terms, Relation::Ge, -(b as f64));
                    }
                }
                p
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn simplex_matches_vertex_enumeration(p in bounded_lp()) {
        let out = solve_lp(&p).unwrap();
        prop_assert_eq!(out.status, LpStatus::Optimal);
        let got = out.objective.unwrap();
        let want = vertex_optimum(&p).expect("origin is feasible");
        prop_assert!((got - want).abs() <= 1e-6 * want.abs().max(1.0), "simplex {} vs vertices {}", got, want);
        let x = out.values.unwrap();
        for row in &p.rows {
            prop_assert!(row.relation.holds(row.activity(&x), row.rhs, 1e-6));
        }
        for (v, &(lo, hi)) in x.iter().zip(&p.var_bounds) {
            prop_assert!(*v >= lo - 1e-9 && *v <= hi + 1e-9);
        }
    }
}

#[test]
fn equality_rows_against_enumeration() {
    // x + y + z = 4, x − y ≥ −1, bounds [0, 3]; maximize 2x + 3y − z.
    let mut p = LpProblem::new(3, Sense::Maximize);
    p.objective = vec![2.0, 3.0, -1.0];
    p.var_bounds = vec![(0.0, 3.0); 3];
    p.add_row(vec![(0, 1.0), (1, 1.0), (2, 1.0)], Relation::Eq, 4.0);
    p.add_row(vec![(0, 1.0), (1, -1.0)], Relation::Ge, -1.0);
    let out = solve_lp(&p).unwrap();
    assert!((out.objective.unwrap() - vertex_optimum(&p).unwrap()).abs() < 1e-9);
    assert!((out.objective.unwrap() - 10.5).abs() < 1e-9);
}

use criterion::{criterion_group, criterion_main, Criterion};
use jemo::exec::Exec;
use jemo::haagerup::{cb_norm_oracle, op_norm_estimate, Budget};
use jemo::jordan::{jordan_op, verify_lower_bounds_with};
use jemo::linalg::Ensemble;

fn oracles(c: &mut Criterion) {
    let (a, b) = Ensemble::Ginibre.pair(2, 1);
    let t = jordan_op(&a, &b).unwrap();
    let mut g = c.benchmark_group("oracle");
    g.sample_size(10);
    for (name, exec) in [
        ("sequential", Exec::Sequential),
        ("parallel", Exec::Parallel),
    ] {
        let budget = Budget::default().exec(exec);
        g.bench_function(format!("op/{name}"), |bch| {
            bch.iter(|| op_norm_estimate(&t, &budget))
        });
        g.bench_function(format!("cb/{name}"), |bch| {
            bch.iter(|| cb_norm_oracle(&t, &budget))
        });
    }
    g.finish();
}

// parallelism over seeds rather than over starts
fn trials(c: &mut Criterion) {
    let mut g = c.benchmark_group("trials");
    g.sample_size(10);
    for (name, exec) in [
        ("sequential", Exec::Sequential),
        ("parallel", Exec::Parallel),
    ] {
        g.bench_function(format!("lower-bounds-16/{name}"), |bch| {
            bch.iter(|| {
                exec.map(16, |i| {
                    let (a, b) = Ensemble::Ginibre.pair(2, i as u64);
                    let budget = Budget::with_starts(16)
                        .seed(i as u64)
                        .exec(Exec::Sequential);
                    verify_lower_bounds_with(&a, &b, &budget, false)
                        .unwrap()
                        .lower
                })
            })
        });
    }
    g.finish();
}

criterion_group!(benches, oracles, trials);
criterion_main!(benches);

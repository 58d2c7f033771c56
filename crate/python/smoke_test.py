"""Smoke test for the fairsub_py extension module.

Build and install it first, e.g. `maturin develop -m crates/py/Cargo.toml`,
then run `python python/smoke_test.py`.
"""

import fairsub_py as fs


def main():
    universe, oracle = fs.generate_twitch_like(400, groups=3, skew=0.6, degree=6.0, seed=3)
    assert len(universe) == len(oracle) == 400
    full = oracle.evaluate(list(range(400)))
    assert full <= 400
    print(f"twitch-like: sizes={[len(universe.group(c)) for c in range(3)]}, f(U)={full}")

    fractions = fs.Fractions.uniform(3, 0.2, 0.5)
    tau = 0.8 * full

    greedy = fs.greedy_bi(oracle, universe, tau, 0.1)
    assert greedy.value >= 0.9 * tau
    print(f"greedy-bi: |S|={len(greedy.solution)}, diff={fs.fairness_difference(universe.counts(greedy.solution)):.3f}")

    for algorithm in ("greedy-fairness-bi", "threshold-fairness-bi"):
        out = fs.convert_fair(oracle, universe, fractions, tau, algorithm=algorithm, epsilon=0.1, alpha=0.2)
        assert out.relaxed_fair, algorithm
        assert out.counts == universe.counts(out.solution)
        assert all(fractions.relaxed_fairness(out.counts, out.beta))
        print(f"{algorithm}: |S|={len(out.solution)}, f={out.value}, kappa={out.kappa_final}, "
              f"diff={fs.fairness_difference(out.counts):.3f}")

    m = fs.Matroid.from_fractions(universe, 10, fractions)
    r = fs.greedy_fairness_bi(oracle, m, 0.5, lazy=True)
    assert m.beta_extension(r.beta).is_member(r.solution)
    assert r.value == oracle.evaluate(r.solution)

    small = fs.Universe([0, 0, 1, 1, 1, 0])
    tags = fs.Oracle.tags([[0], [1], [1, 2], [3], [0, 4], [5]])
    sm = fs.Matroid(small, 2, [1, 1], [1, 1])
    frac = fs.continuous_threshold_greedy(tags, sm, 0.1, seed=1, scale=100.0)
    assert all(0.0 <= v <= 1.0 for v in frac.x)
    ext = sm.beta_extension(frac.beta)
    rounded = fs.swap_round(frac.bases, ext, seed=2)
    assert ext.is_member(rounded)
    print(f"ctg: beta={frac.beta}, rounded={rounded}")

    seq = fs.build_exchange_sequence(sm, 2, [0, 2, 1, 3], [5, 4])
    assert fs.verify_exchange(sm, 2, [0, 2, 1, 3], seq, [5, 4])

    try:
        oracle.evaluate([10_000])
    except ValueError:
        pass
    else:
        raise AssertionError("out-of-range element accepted")

    print("ok")


if __name__ == "__main__":
    main()

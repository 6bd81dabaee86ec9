"""Smoke test for the censored_gof extension module.

Build first:
    cargo build --release -p censored-gof-py --features extension-module
then run from the repository root:
    python3 python/smoke_test.py
An installed module (e.g. via maturin) is used when present.
"""

import os
import shutil
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def load():
    try:
        import censored_gof
        return censored_gof
    except ImportError:
        pass
    for name in ("libcensored_gof_py.so", "libcensored_gof_py.dylib", "censored_gof_py.dll"):
        built = os.path.join(ROOT, "target", "release", name)
        if os.path.exists(built):
            ext = ".pyd" if name.endswith(".dll") else ".so"
            tmp = tempfile.mkdtemp()
            shutil.copy(built, os.path.join(tmp, "censored_gof" + ext))
            sys.path.insert(0, tmp)
            import censored_gof
            return censored_gof
    sys.exit("censored_gof not found; build it with "
             "`cargo build --release -p censored-gof-py --features extension-module`")


def main():
    cg = load()

    x = cg.sample_model("exp(2)", 100, seed=7)
    s = cg.CensoredSample.censor(x, 50)
    assert (s.r, s.n) == (50, 100)
    family, params = cg.estimate(s, "exp")
    print(f"estimate: {family} {[round(p, 4) for p in params]}")

    z = cg.scores(s, "exp", "lhb")
    assert len(z) == 50 and abs(sum(z)) < 1e-9

    u = [0.1, 0.2, 0.35, 0.5]
    assert all(abs(a - b) < 1e-12 for a, b in zip(cg.transform_uniforms(u, 4, "os"), u))

    table = cg.CriticalValueTable.simulate(50, replications=5000, seed=1)
    results = cg.gof(s, "exp", table=table)
    assert len(results) == 15
    for r in results:
        print(f"{r.transform:4} {r.statistic}  value {r.value:.4f}  reject@5% {r.reject(0.05)}")

    ds = cg.CriticalValueTable.simulate(20, statistics="DS_A2", levels=[0.05],
                                        replications=100_000, seed=2, null="exp", n=40)
    cv = ds.critical_value("DS_A2", 20, 0.05, null="exp", n=40)
    print(f"DS_A2 exp n=40 r=20 5% critical value: {cv:.3f}")
    assert abs(cv - 0.609) < 0.02

    try:
        cg.CensoredSample([1.0, 2.0, 3.0], 2)
    except ValueError as e:
        print(f"rejected r > n: {e}")
    else:
        raise AssertionError("r > n accepted")

    csv = cg.process_curves(20, 200, seed=3)
    assert csv.count("\n") > 6 * 199
    print("smoke test passed")


if __name__ == "__main__":
    main()

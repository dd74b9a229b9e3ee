"""Compare the compiled busy-period kernel against the pure-Python twin.

Run:  python3 benchmarks/bench_kernels.py [repeats]

Times the full holistic analysis over a batch of generated task sets under
each backend (IMPRESCHED_PURE selects at import, so each run happens in a
subprocess), then checks a sample of kernel calls for bit-identical results.
"""

from __future__ import annotations

import os
import random
import subprocess
import sys
import time

_WORKER = """
import os, time
import impresched as im

n = int(os.environ["BENCH_SETS"])
t0 = time.perf_counter()
acc = 0.0
for seed in range(1, n + 1):
    cfg = im.GeneratorConfig(seed=seed, n_tasks=8, n_processors=4,
                             max_chain_length=3,
                             per_processor_target_utilization=0.9,
                             deadline_factor_range=(1.0, 2.0))
    ts = im.generate(cfg)
    ordering = im.assign_priorities(ts)
    res = im.analyze(ts, ordering)
    for v in res.per_task_e2e.values():
        if v < float("inf"):
            acc += v
print(f"{im.backend_name()} {time.perf_counter() - t0:.3f} {acc!r}")
"""


def run_backend(pure: bool, n_sets: int) -> tuple[str, float, str]:
    env = dict(os.environ, BENCH_SETS=str(n_sets))
    if pure:
        env["IMPRESCHED_PURE"] = "1"
    else:
        env.pop("IMPRESCHED_PURE", None)
    out = subprocess.run(
        [sys.executable, "-c", _WORKER], env=env, capture_output=True, text=True, check=True
    )
    name, secs, acc = out.stdout.split(maxsplit=2)
    return name, float(secs), acc.strip()


def check_equivalence(n_cases: int = 2000) -> None:
    os.environ.pop("IMPRESCHED_PURE", None)
    from impresched._kernels import pure

    try:
        from impresched._kernels import _speedups
    except ImportError:
        print("compiled backend unavailable; equivalence check skipped")
        return
    rng = random.Random(7)
    for _ in range(n_cases):
        n_hp = rng.randint(0, 5)
        hp_c = [rng.uniform(0.1, 5.0) for _ in range(n_hp)]
        hp_p = [rng.uniform(5.0, 50.0) for _ in range(n_hp)]
        hp_j = [rng.uniform(0.0, 10.0) for _ in range(n_hp)]
        c = rng.uniform(0.0, 8.0)
        p = rng.uniform(5.0, 60.0)
        j = rng.uniform(0.0, 10.0)
        a = pure.busy_period_response(c, p, j, hp_c, hp_p, hp_j, 1e9, 10**6)
        b = _speedups.busy_period_response(c, p, j, hp_c, hp_p, hp_j, 1e9, 10**6)
        assert a == b, (a, b, c, p, j, hp_c, hp_p, hp_j)
    print(f"equivalence: {n_cases} random kernel calls bit-identical")


def main() -> None:
    n_sets = int(sys.argv[1]) if len(sys.argv) > 1 else 150
    results = {}
    for pure_flag in (True, False):
        name, secs, acc = run_backend(pure_flag, n_sets)
        results[name] = (secs, acc)
        print(f"{name:>8}: {secs:.3f}s for {n_sets} task sets")
    if {"pure", "compiled"} <= results.keys():
        assert results["pure"][1] == results["compiled"][1], "backends disagree"
        speedup = results["pure"][0] / results["compiled"][0]
        print(f"speedup: {speedup:.2f}x, identical response-time sums")
    check_equivalence()


if __name__ == "__main__":
    main()

"""Benchmark exhaustive game analysis on the reference networks."""
from __future__ import annotations

import os
import time
from typing import Any, Dict, List, Mapping, Tuple

import numpy as np
import psutil

from clearing.solver import mcp_clear
from fixtures.registry import make_fixture
from game.analysis import analyze, format_ratio
from game.utility import UtilityMode
from network.model import FinancialNetwork, validate_network
from network.strategy import proportional_profile


def memory_rss_mb() -> float:
    return psutil.Process(os.getpid()).memory_info().rss / (1024 * 1024)


def run_case(name: str, params: Mapping[str, Any], mode: UtilityMode, jobs: int) -> Dict[str, Any]:
    fixture = make_fixture(name, params)
    t_start = time.perf_counter()
    report = analyze(fixture.network, mode, jobs=jobs)
    total = time.perf_counter() - t_start
    return {
        "label": f"{name} {' '.join(f'{k}={v}' for k, v in params.items())}".strip(),
        "profiles": report.profiles_examined,
        "total": total,
        "per_profile_ms": 1000 * total / max(1, report.profiles_examined),
        "poa": format_ratio(report.poa) or "-",
        "mem_mb": memory_rss_mb(),
    }


def random_network(rng: np.random.Generator, n: int, density: float) -> FinancialNetwork:
    amounts = rng.integers(1, 10, size=(n, n)) * (rng.random((n, n)) < density)
    np.fill_diagonal(amounts, 0)
    return validate_network({
        "firms": [{"id": f"v{i}", "external": int(e)} for i, e in enumerate(rng.integers(0, 5, size=n), 1)],
        "debts": [
            {"from": f"v{i + 1}", "to": f"v{j + 1}", "amount": int(amounts[i, j])}
            for i in range(n) for j in range(n) if amounts[i, j]
        ],
    })


def run_batch(n: int, count: int, seed: int = 7) -> Dict[str, Any]:
    rng = np.random.default_rng(seed)
    nets = [random_network(rng, n, 0.3) for _ in range(count)]
    t_start = time.perf_counter()
    for net in nets:
        mcp_clear(net, proportional_profile(net))
    total = time.perf_counter() - t_start
    return {"n": n, "count": count, "total": total, "per_net_ms": 1000 * total / count, "mem_mb": memory_rss_mb()}


def main() -> None:
    assets, equity = UtilityMode.TOTAL_ASSETS, UtilityMode.EQUITY
    cases: List[Tuple[str, Dict[str, Any], UtilityMode]] = [
        ("five-firm-cds", {}, assets),
        ("no-nash", {"M": 600}, assets),
        ("proportional-path", {"n": 12, "M": 100}, assets),
        ("anarchy-assets", {"M": 1000}, assets),
        ("stability-negative", {"M": 100}, assets),
        ("super-strong", {"eps": "1/10"}, equity),
    ]
    jobs = int(os.getenv("FENNEC_JOBS", "1"))

    print(f"== Game analysis benchmark (jobs={jobs}) ==")
    for name, params, mode in cases:
        metrics = run_case(name, params, mode, jobs)
        print(
            f"{metrics['label']:>28} | {metrics['profiles']:>3} profiles | total {metrics['total']:.3f}s | "
            f"{metrics['per_profile_ms']:.1f} ms/profile | PoA {metrics['poa']} | mem {metrics['mem_mb']:.1f} MB"
        )

    print("== Random proportional clearing ==")
    for n in (5, 10, 20):
        batch = run_batch(n, 50)
        print(
            f"{batch['n']:>3} firms x {batch['count']} | total {batch['total']:.3f}s | "
            f"{batch['per_net_ms']:.1f} ms/network | mem {batch['mem_mb']:.1f} MB"
        )


if __name__ == "__main__":
    main()

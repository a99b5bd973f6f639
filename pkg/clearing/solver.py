"""Exact clearing payments under priority-proportional strategies.

The outer loop grows the default set round by round starting from full
repayment. Each round finds the largest payment vector below the current one
that satisfies the default equations

    x_i = min(L_i, max(0, alpha * e_i + beta * inflow_i(x)))   for i in D
    x_i = L_i                                                  otherwise

Inside a regime (every defaulting firm's paying class fixed, every firm's
clamp side fixed) that map is affine with rational coefficients, so the
fixed point is found by exact elimination over the strongly connected
components of the dependency graph. When the solution leaves the regime a
single map step is taken and the regime re-derived; paying classes only
move one way, which bounds the number of regimes.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from clearing.proper import proper_filter
from clearing.result import ClearingResult, Direction, PaymentMatrix
from clearing.split import Tier, affine_split, build_tiers, frontier_down, frontier_up, split_row
from network.errors import CdsNotSupported, InputError, NonFiniteRegime
from network.model import FinancialNetwork, LiabilityMatrix, resolve_liabilities
from network.money import ONE, ZERO, parse_money
from network.strategy import StrategyProfile

log = logging.getLogger(__name__)

# map steps allowed inside one regime before giving up
MAX_STEPS_PER_REGIME = 100_000


class Clamp(str, Enum):
    ZERO = "zero"
    LINEAR = "linear"
    CAP = "cap"


@dataclass(frozen=True)
class _Regime:
    frontiers: Tuple[Tuple[int, Optional[int]], ...]
    clamps: Tuple[Tuple[int, Clamp], ...]


class ClearingEngine:
    """Network, liabilities and profile resolved to index form."""

    def __init__(self, net: FinancialNetwork, liabilities: LiabilityMatrix, profile: StrategyProfile):
        self.net = net
        self.n = net.n
        self.e = list(net.externals)
        self.alpha = net.alpha
        self.beta = net.beta
        self.l = liabilities.l
        self.L = list(liabilities.totals)
        self.liabilities = liabilities
        self.profile = profile
        index = {fid: i for i, fid in enumerate(net.ids)}
        self.tiers: List[Tuple[Tier, ...]] = [
            build_tiers(profile[fid], index, list(self.l[i])) for i, fid in enumerate(net.ids)
        ]

    # ─── Map ───

    def split(self, i: int, x: Fraction) -> List[Fraction]:
        return split_row(x, self.tiers[i], self.n)

    def inflows(self, x: Sequence[Fraction]) -> List[Fraction]:
        acc = [ZERO] * self.n
        for i in range(self.n):
            if x[i] <= 0:
                continue
            for j, v in enumerate(self.split(i, x[i])):
                if v:
                    acc[j] += v
        return acc

    def target(self, i: int, inflow: Fraction) -> Fraction:
        return self.alpha * self.e[i] + self.beta * inflow

    def defaulting_payment(self, i: int, inflow: Fraction) -> Fraction:
        return min(self.L[i], max(ZERO, self.target(i, inflow)))

    def apply(self, x: Sequence[Fraction], defaults: FrozenSet[int]) -> List[Fraction]:
        inflow = self.inflows(x)
        return [self.defaulting_payment(i, inflow[i]) if i in defaults else self.L[i] for i in range(self.n)]

    def in_default(self, x: Sequence[Fraction]) -> FrozenSet[int]:
        inflow = self.inflows(x)
        return frozenset(i for i in range(self.n) if self.e[i] + inflow[i] < self.L[i])

    def payment_matrix(self, x: Sequence[Fraction]) -> PaymentMatrix:
        rows = [self.split(i, x[i]) for i in range(self.n)]
        return PaymentMatrix(self.net.ids, np.array(rows, dtype=object).reshape(self.n, self.n))

    # ─── Regimes ───

    def regime(self, u: Sequence[Fraction], defaults: FrozenSet[int], down: bool) -> _Regime:
        frontier = frontier_down if down else frontier_up
        inflow = self.inflows(u)
        fronts = []
        clamps = []
        for i in sorted(defaults):
            fronts.append((i, frontier(u[i], self.tiers[i])))
            t = self.target(i, inflow[i])
            if t <= 0:
                clamps.append((i, Clamp.ZERO))
            elif t >= self.L[i]:
                clamps.append((i, Clamp.CAP))
            else:
                clamps.append((i, Clamp.LINEAR))
        return _Regime(tuple(fronts), tuple(clamps))

    def solve_regime(self, regime: _Regime, u: Sequence[Fraction], defaults: FrozenSet[int], down: bool):
        """Fixed point of the regime's affine map, or None if it has none there."""
        clamps = dict(regime.clamps)
        z: List[Optional[Fraction]] = [None if i in defaults else self.L[i] for i in range(self.n)]
        for i, c in clamps.items():
            if c is Clamp.ZERO:
                z[i] = ZERO
            elif c is Clamp.CAP:
                z[i] = self.L[i]
        linear = [i for i, c in clamps.items() if c is Clamp.LINEAR]
        if not linear:
            return z

        # x_i = c_i + sum_j a_ij x_j over defaulting j
        const = {i: self.alpha * self.e[i] for i in linear}
        coef: Dict[int, Dict[int, Fraction]] = {i: {} for i in linear}
        for j in range(self.n):
            if j not in defaults:
                for i in linear:
                    const[i] += self.beta * self.l[j, i]
        for j, front in regime.frontiers:
            for i, (c0, slope) in affine_split(self.tiers[j], front).items():
                if i not in const:
                    continue
                const[i] += self.beta * c0
                if slope:
                    coef[i][j] = coef[i].get(j, ZERO) + self.beta * slope

        graph = nx.DiGraph()
        graph.add_nodes_from(linear)
        for i in linear:
            for j, a in coef[i].items():
                if j in const:
                    graph.add_edge(j, i)
        condensed = nx.condensation(graph)
        for comp in nx.topological_sort(condensed):
            members = sorted(condensed.nodes[comp]["members"])
            rhs = []
            for i in members:
                total = const[i]
                for j, a in coef[i].items():
                    if j not in members:
                        total += a * z[j]
                rhs.append(total)
            matrix = [[(ONE if i == k else ZERO) - coef[i].get(k, ZERO) for k in members] for i in members]
            solution = _solve_exact(matrix, rhs)
            if solution is None:
                # closed cycle at beta = 1: stationary when no net outside flow
                if sum(rhs, ZERO) != 0:
                    return None
                solution = [u[i] for i in members]
            for i, v in zip(members, solution):
                z[i] = v
        return z

    def consistent(self, z, regime: _Regime, u: Sequence[Fraction], down: bool) -> bool:
        for i, front in regime.frontiers:
            if front is None:
                continue
            tier = self.tiers[i][front]
            if down and (z[i] < tier.start or z[i] > u[i]):
                return False
            if not down and (z[i] > tier.end or z[i] < u[i]):
                return False
        inflow = self.inflows(z)
        for i, c in regime.clamps:
            t = self.target(i, inflow[i])
            if down:
                if c is Clamp.LINEAR and t < 0:
                    return False
                if c is Clamp.CAP and t < self.L[i]:
                    return False
            else:
                if c is Clamp.LINEAR and t > self.L[i]:
                    return False
                if c is Clamp.ZERO and t > 0:
                    return False
        return True

    def fixed_point(self, defaults: FrozenSet[int], start: Sequence[Fraction], down: bool = True) -> List[Fraction]:
        u = [v if i in defaults else self.L[i] for i, v in enumerate(start)]
        bound = sum(len(self.tiers[i]) for i in defaults) + 2 * len(defaults) + 1
        changes = 0
        steps = 0
        last: Optional[_Regime] = None
        while True:
            y = self.apply(u, defaults)
            if y == u:
                return u
            if down and any(a > b for a, b in zip(y, u)):
                raise InputError("Start vector is not an upper bound for the default equations")
            if not down and any(a < b for a, b in zip(y, u)):
                raise InputError("Start vector is not a lower bound for the default equations")
            regime = self.regime(u, defaults, down)
            if regime != last:
                changes += 1
                steps = 0
                last = regime
                if changes > bound:
                    raise NonFiniteRegime(f"{changes} regimes visited, bound is {bound}")
            z = self.solve_regime(regime, u, defaults, down)
            if z is not None and self.consistent(z, regime, u, down):
                if self.apply(z, defaults) == z:
                    log.debug("regime solved after %d change(s)", changes)
                    return z
                log.debug("regime candidate is not a fixed point, stepping")
            u = y
            steps += 1
            if steps > MAX_STEPS_PER_REGIME:
                raise NonFiniteRegime(f"no regime exit after {steps} steps")


def _solve_exact(matrix: List[List[Fraction]], rhs: List[Fraction]) -> Optional[List[Fraction]]:
    """Gauss-Jordan elimination over the rationals; None when singular."""
    size = len(rhs)
    a = [row[:] + [b] for row, b in zip(matrix, rhs)]
    for col in range(size):
        pivot = next((r for r in range(col, size) if a[r][col] != 0), None)
        if pivot is None:
            return None
        a[col], a[pivot] = a[pivot], a[col]
        p = a[col][col]
        a[col] = [v / p for v in a[col]]
        for r in range(size):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return [a[r][size] for r in range(size)]


# ─── Public operations ───


def _index_set(net: FinancialNetwork, ids: Iterable) -> FrozenSet[int]:
    return frozenset(i if isinstance(i, int) else net.index(i) for i in ids)


def inner_fixed_point(
    net: FinancialNetwork,
    liabilities: LiabilityMatrix,
    profile: StrategyProfile,
    defaults: Iterable,
    start: Sequence,
    direction: Direction = Direction.MAXIMAL,
) -> Tuple[Fraction, ...]:
    """Largest fixed point of the default equations below ``start``.

    With ``direction=minimal`` the smallest one above ``start`` instead.
    """
    engine = ClearingEngine(net, liabilities, profile)
    down = Direction(direction) is Direction.MAXIMAL
    x = engine.fixed_point(_index_set(net, defaults), [parse_money(v) for v in start], down=down)
    return tuple(x)


def _recovery(engine: ClearingEngine, totals: Sequence[Fraction], defaults: FrozenSet[int]) -> Tuple[Fraction, ...]:
    return tuple(
        totals[k] / engine.L[k] if k in defaults and engine.L[k] > 0 else ONE for k in range(engine.n)
    )


def _maximal(engine: ClearingEngine) -> Tuple[List[Fraction], int]:
    p = list(engine.L)
    defaults: FrozenSet[int] = frozenset()
    rounds = 0
    while True:
        rounds += 1
        current = engine.in_default(p)
        assert current >= defaults, "default set shrank between rounds"
        log.debug("round %d: %d firm(s) in default", rounds, len(current))
        if current == defaults:
            return p, rounds
        nxt = engine.fixed_point(current, p, down=True)
        assert all(a <= b for a, b in zip(nxt, p)), "payments increased between rounds"
        p, defaults = nxt, current


def _minimal(engine: ClearingEngine) -> Tuple[List[Fraction], int]:
    p = [ZERO] * engine.n
    everyone = frozenset(range(engine.n))
    solvent: Optional[FrozenSet[int]] = None
    rounds = 0
    while True:
        rounds += 1
        current = everyone - engine.in_default(p)
        assert solvent is None or current >= solvent, "solvent set shrank between rounds"
        if current == solvent:
            return p, rounds
        start = [engine.L[i] if i in current else v for i, v in enumerate(p)]
        nxt = engine.fixed_point(everyone - current, start, down=False)
        assert all(a >= b for a, b in zip(nxt, p)), "payments decreased between rounds"
        p, solvent = nxt, current


def clear_with_liabilities(
    net: FinancialNetwork,
    profile: StrategyProfile,
    liabilities: LiabilityMatrix,
    direction: Direction = Direction.MAXIMAL,
) -> ClearingResult:
    engine = ClearingEngine(net, liabilities, profile)
    direction = Direction(direction)
    if direction is Direction.MAXIMAL:
        p, rounds = _maximal(engine)
        raw = engine.payment_matrix(p)
        payments = proper_filter(raw, net)
    else:
        p, rounds = _minimal(engine)
        raw = None
        payments = engine.payment_matrix(p)
    inflow = payments.inflows
    totals = payments.totals
    defaults = frozenset(i for i in range(engine.n) if engine.e[i] + inflow[i] < engine.L[i])
    return ClearingResult(
        network=net,
        profile=profile,
        liabilities=liabilities,
        payments=payments,
        defaults=frozenset(net.ids[i] for i in defaults),
        recovery=_recovery(engine, totals, defaults),
        proper=direction is Direction.MAXIMAL,
        converged=True,
        rounds=rounds,
        direction=direction,
        raw_payments=raw,
    )


def mcp_clear(
    net: FinancialNetwork,
    profile: StrategyProfile,
    direction: Direction = Direction.MAXIMAL,
) -> ClearingResult:
    """Maximal proper (or minimal) clearing payments of a network without CDS."""
    if net.has_cds:
        raise CdsNotSupported("Network has CDS contracts; use cds_clear")
    return clear_with_liabilities(net, profile, resolve_liabilities(net), direction)

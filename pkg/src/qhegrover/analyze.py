"""T/T† resource accounting for Grover circuits: exact counts and closed forms."""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import circuit as C
from .circuit import CircuitIR
from .grover import GroverSpec, build_grover, default_iterations, lower_to_clifford_t


def count_t_gates(circuit: CircuitIR) -> int:
    if circuit.level != C.LOWERED:
        raise ValueError("T-count is defined on lowered circuits")
    return C.count_kinds(circuit.gates, C.T_KINDS)


def _log2_exact(N: int) -> int:
    if N < 1 or N & (N - 1):
        raise ValueError(f"N = {N} is not a power of 2")
    return N.bit_length() - 1


def closed_form_t(N: int, m: int = 1) -> float:
    """28 (log N - 2) sqrt(N) for one marked item.

    For m > 1 this extrapolates with m oracle MCX gates per iteration and
    sqrt(N/m) iterations: 7 (2m + 2)(log N - 2) sqrt(N/m).
    """
    n = _log2_exact(N)
    if N < 8:
        raise ValueError(f"closed form needs N >= 8, got {N}")
    if not 1 <= m < N:
        raise ValueError(f"need 1 <= m < N, got m={m}")
    if m == 1:
        return 28 * (n - 2) * math.sqrt(N)
    return 7 * (2 * m + 2) * (n - 2) * math.sqrt(N / m)


def log_star(N: float) -> int:
    if N < 1:
        raise ValueError("log* is defined for N >= 1")
    r, x = 0, float(N)
    while x > 1:
        x = math.log2(x)
        r += 1
    return r


def adw_gate_estimate(N: int) -> float:
    """sqrt(N) log2(max(log* N, 2)); asymptotic comparison curve, constant factor 1."""
    return math.sqrt(N) * math.log2(max(log_star(N), 2))


@dataclass(frozen=True)
class ResourceEstimate:
    N: int
    m: int
    toffolis_per_iteration: int
    t_per_iteration: int
    iterations: int
    total_t_exact: int
    total_t_closed_form: float
    extrapolated: bool = False
    adw_estimate: float | None = None

    def as_dict(self) -> dict:
        d = {
            "N": self.N,
            "m": self.m,
            "toffolis_per_iteration": self.toffolis_per_iteration,
            "t_per_iteration": self.t_per_iteration,
            "iterations": self.iterations,
            "total_t_exact": self.total_t_exact,
            "total_t_closed_form": round(self.total_t_closed_form, 6),
            "closed_form_extrapolated": self.extrapolated,
        }
        if self.adw_estimate is not None:
            d["adw_gate_estimate"] = round(self.adw_estimate, 6)
        return d


def default_marked(n: int, m: int) -> tuple[str, ...]:
    """m distinct marked strings; exact T counts do not depend on which ones."""
    return tuple(format((2 ** n - 1) - k, f"0{n}b") for k in range(m))


def estimate(N: int, m: int = 1, iterations: int | None = None, adw: bool = False) -> ResourceEstimate:
    n = _log2_exact(N)
    R = default_iterations(N, m) if iterations is None else iterations
    marked = default_marked(n, m)
    one_round = GroverSpec(n, marked, iterations=1, prep_gates=False)
    lowered, report = lower_to_clifford_t(build_grover(one_round))
    full, _ = lower_to_clifford_t(build_grover(GroverSpec(n, marked, iterations=R)))
    return ResourceEstimate(
        N=N,
        m=m,
        toffolis_per_iteration=report.toffoli_count,
        t_per_iteration=count_t_gates(lowered),
        iterations=R,
        total_t_exact=count_t_gates(full),
        total_t_closed_form=closed_form_t(N, m),
        extrapolated=m > 1,
        adw_estimate=adw_gate_estimate(N) if adw else None,
    )


def resource_table(Ns, m: int = 1, adw: bool = False) -> list[ResourceEstimate]:
    return [estimate(N, m, adw=adw) for N in Ns]


def format_table(rows: list[ResourceEstimate]) -> str:
    adw = any(r.adw_estimate is not None for r in rows)
    head = f"{'N':>8} {'m':>3} {'Tof/iter':>9} {'T/iter':>7} {'R':>5} {'T exact':>9} {'T closed':>12}"
    if adw:
        head += f" {'ADW est.':>10}"
    lines = [head]
    for r in rows:
        mark = "*" if r.extrapolated else " "
        line = (
            f"{r.N:>8} {r.m:>3} {r.toffolis_per_iteration:>9} {r.t_per_iteration:>7} "
            f"{r.iterations:>5} {r.total_t_exact:>9} {r.total_t_closed_form:>11.3f}{mark}"
        )
        if adw:
            line += f" {r.adw_estimate:>10.3f}"
        lines.append(line)
    if any(r.extrapolated for r in rows):
        lines.append("* closed form extrapolated to m > 1")
    return "\n".join(lines)

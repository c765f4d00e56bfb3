"""Weighted growth series and the factoriality verdict.

For weights ``u_s > 0`` the growth series is ``W(u) = sum_w prod_s u_s^{l_s(w)}``.
Two independent routes decide whether it converges:

* the alternating clique sum ``D(t) = sum_T (-1)^|T| prod_{s in T} t u_s / (1 + t u_s)``
  over cliques ``T`` of the commuting graph, which equals ``1 / W(t u)`` as a
  rational function; the series converges iff ``D > 0`` on ``[0, 1]``;
* weighted sphere sums ``c_n`` computed by a transfer recursion over Foata
  steps (cliques), followed by a ratio estimate of the growth rate.

The first route decides; the second is recorded as evidence.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import optimize

from .coxeter import CoxeterSystem
from .errors import CapacityError, HypothesisError, InputError

CLIQUE_CAP = 25
DELTA_POS = 1e-9
DEFAULT_MAX_LEN = 12
RATIO_WINDOW = 3
RATIO_MARGIN = 0.05
GRID_POINTS = 1001


@dataclass(frozen=True)
class ParameterVector:
    q: tuple

    @property
    def normalized(self) -> bool:
        return all(0 < x <= 1 for x in self.q)

    def __post_init__(self):
        if any(not x > 0 for x in self.q):
            raise InputError(f"deformation parameters must be positive, got {self.q}")

    def __len__(self):
        return len(self.q)

    def __getitem__(self, s):
        return self.q[s]


def as_parameters(q) -> ParameterVector:
    if isinstance(q, ParameterVector):
        return q
    return ParameterVector(tuple(q))


def sign_vectors(n: int) -> list:
    """All of ``{-1, 1}^n``, ordered by decreasing number of +1 entries."""
    out = list(itertools.product((1, -1), repeat=n))
    out.sort(key=lambda e: -sum(e))
    return out


def reduce_parameters(q) -> tuple:
    """Map ``q`` into ``(0, 1]^S`` by inverting every entry above 1.

    Returns the reduced parameters and the flips: ``-1`` exactly where an
    entry was inverted.
    """
    q = tuple(q)
    if any(not (x > 0) for x in q):
        raise InputError(f"deformation parameters must be positive, got {q}")
    flips = tuple(-1 if x > 1 else 1 for x in q)
    reduced = tuple((1 / x if isinstance(x, Fraction) else 1.0 / x) if f < 0 else x for x, f in zip(q, flips))
    return ParameterVector(reduced), flips


def effective_weights(q, eps: Sequence[int], exponent: float) -> tuple:
    """``u_s = q_s^(eps_s * exponent)``, the absolute value of one letter's term."""
    q = as_parameters(q)
    return tuple(float(x) ** (e * exponent) for x, e in zip(q.q, eps))


def clique_alternating_denominator(system: CoxeterSystem, u: Sequence[float], cap: int = CLIQUE_CAP):
    """Return ``D(t)`` as a numpy-vectorised callable on ``[0, 1]``."""
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0):
        raise InputError("weights must be positive")
    cliques = system.commuting_cliques(cap=cap)
    signs = np.array([(-1) ** len(c) for c in cliques], dtype=float)
    members = np.zeros((len(cliques), system.rank), dtype=bool)
    for k, c in enumerate(cliques):
        members[k, list(c)] = True

    def D(t):
        t = np.asarray(t, dtype=float)
        x = np.multiply.outer(t, u)
        x = x / (1.0 + x)  # (..., rank)
        # prod over clique members; log-free since 0 < x < 1
        factors = np.where(members, x[..., None, :], 1.0)
        return np.prod(factors, axis=-1) @ signs

    D.cliques = cliques
    return D


def foata_transfer(system: CoxeterSystem, cap: int = CLIQUE_CAP):
    """Cliques and the admissible-successor matrix for Foata steps.

    A step ``F'`` may follow ``F`` iff they are disjoint and every letter of
    ``F'`` fails to commute with some letter of ``F``.
    """
    steps = [c for c in system.commuting_cliques(cap=cap) if c]
    n = len(steps)
    allowed = np.zeros((n, n), dtype=bool)
    for i, f in enumerate(steps):
        fs = set(f)
        for j, g in enumerate(steps):
            if fs.isdisjoint(g) and all(any(not system.commutes(x, y) for y in f) for x in g):
                allowed[i, j] = True
    return steps, allowed


def weighted_sphere_sums(system: CoxeterSystem, u: Sequence[float], max_len: int, cap: int = CLIQUE_CAP) -> list:
    """``c_n = sum_{|w| = n} prod_s u_s^{l_s(w)}`` for ``n = 0..max_len``.

    Every element has a unique Foata factorisation into clique steps, so the
    sums follow from a layered recursion on the last step.  With unit weights
    this counts sphere sizes.
    """
    steps, allowed = foata_transfer(system, cap=cap)
    u = np.asarray(u, dtype=float)
    size = np.array([len(f) for f in steps])
    wt = np.array([np.prod(u[list(f)]) for f in steps])
    layers = [np.zeros(len(steps)) for _ in range(max_len + 1)]
    by_size = {k: np.flatnonzero(size == k) for k in set(size.tolist())}
    for n in range(1, max_len + 1):
        # a step of size k ending an element of length n follows one of length n - k
        incoming = np.zeros(len(steps))
        for k, sel in by_size.items():
            if k < n:
                incoming[sel] = layers[n - k] @ allowed[:, sel]
            elif k == n:
                incoming[sel] = 1.0
        layers[n] = incoming * wt
    return [1.0] + [float(layer.sum()) for layer in layers[1:]]


def ratio_estimate(sums: Sequence[float], window: int = RATIO_WINDOW) -> float:
    """``(c_N / c_{N-k})^(1/k)`` on pairwise-smoothed sums ``c_n + c_{n-1}``.

    Weighted sphere sums of right-angled groups often alternate in size with
    the parity of ``n`` (a heavy letter must be followed by a light one), so
    the raw ratio over an odd window can point the wrong way; adding
    neighbouring terms removes that period-two oscillation.
    """
    n = len(sums) - 1
    if n < window + 1:
        raise InputError(f"need at least {window + 2} sphere sums for the ratio estimate")
    top, bottom = sums[n] + sums[n - 1], sums[n - window] + sums[n - window - 1]
    if bottom == 0 or top == 0:
        return 0.0
    return (top / bottom) ** (1.0 / window)


@dataclass
class ConvergenceVerdict:
    converges: bool
    status: str  # "converges" | "diverges" | "inconclusive-boundary"
    t_star: float
    d_min: float
    d_at_one: float
    sphere_sums: list | None = None
    rho_est: float | None = None
    bfs_converges: bool | None = None
    notes: list = field(default_factory=list)

    @property
    def boundary(self) -> bool:
        return self.status == "inconclusive-boundary"

    def to_json(self) -> dict:
        return {
            "converges": self.converges,
            "status": self.status,
            "denominator": {"t_star": self.t_star, "D_min": self.d_min, "D_at_1": self.d_at_one},
            "bfs": None if self.sphere_sums is None else {
                "sphere_sums": self.sphere_sums, "rho_est": self.rho_est, "converges": self.bfs_converges},
            "notes": list(self.notes),
        }


def _denominator_minimum(D, grid: int, delta: float):
    ts = np.linspace(0.0, 1.0, grid)
    vals = D(ts)
    k = int(np.argmin(vals))
    neg = np.flatnonzero(vals < -delta)
    if neg.size:
        # first sign change: bisect for the root, the radius of convergence
        j = int(neg[0])
        t_root = float(ts[j])
        if j > 0 and float(D(ts[j - 1])) > 0 > float(D(ts[j])):
            t_root = optimize.brentq(lambda t: float(D(t)), ts[j - 1], ts[j], xtol=1e-14)
        return t_root, float(vals[k]), True
    lo, hi = ts[max(k - 1, 0)], ts[min(k + 1, grid - 1)]
    if hi > lo:
        res = optimize.minimize_scalar(lambda t: float(D(t)), bounds=(lo, hi), method="bounded",
                                       options={"xatol": 1e-12})
        if res.fun < vals[k]:
            return float(res.x), float(res.fun), res.fun < -delta
    return float(ts[k]), float(vals[k]), False


def decide_convergence(system: CoxeterSystem, q, eps: Sequence[int], exponent: float,
                       max_len: int = DEFAULT_MAX_LEN, *, delta: float = DELTA_POS,
                       window: int = RATIO_WINDOW, margin: float = RATIO_MARGIN,
                       grid: int = GRID_POINTS, bfs: bool = True) -> ConvergenceVerdict:
    """Decide absolute convergence of ``sum_w |q_{w,eps}|^exponent``."""
    q = as_parameters(q)
    if not q.normalized:
        raise InputError("decide_convergence expects parameters in (0, 1]; reduce them first")
    u = effective_weights(q, eps, exponent)
    D = clique_alternating_denominator(system, u)
    t_star, d_min, crossed = _denominator_minimum(D, grid, delta)
    d_one = float(D(1.0))
    notes = []
    if crossed or d_min < -delta:
        status = "diverges"
    elif d_min > delta:
        status = "converges"
    else:
        status = "inconclusive-boundary"
        notes.append(f"denominator minimum {d_min:.3e} within {delta:g} of zero; treated as divergent")

    verdict = ConvergenceVerdict(status == "converges", status, t_star, d_min, d_one, notes=notes)
    if not bfs or max_len < window + 1:
        return verdict
    try:
        sums = weighted_sphere_sums(system, u, max_len)
    except CapacityError as exc:
        notes.append(f"sphere sums omitted: {exc}")
        return verdict
    rho = ratio_estimate(sums, window)
    verdict.sphere_sums, verdict.rho_est = sums, rho
    if abs(rho - 1.0) > margin:
        verdict.bfs_converges = rho < 1.0
        if status != "inconclusive-boundary" and verdict.bfs_converges != verdict.converges:
            verdict.status = "inconclusive-boundary"
            notes.append(f"ratio estimate {rho:.4f} disagrees with the denominator verdict ({status})")
    return verdict


def conjugate_exponent(r: float) -> float:
    return r / (r - 1.0)


def r_tilde(r: float) -> float:
    if not 1 < r < math.inf:
        raise InputError(f"r must lie in (1, inf), got {r}")
    return min(r, conjugate_exponent(r))


def _sweep(system, q, exponent, max_len, **kw) -> dict:
    """Verdicts for all sign vectors, skipping those forced divergent.

    If ``eps`` diverges then so does every ``eps'`` obtained by switching a
    +1 to -1 (weights only grow), so vectors are visited from all-ones down.
    """
    out, ok = {}, {}
    n = system.rank
    for e in sign_vectors(n):
        ups = [e[:i] + (1,) + e[i + 1:] for i in range(n) if e[i] == -1]
        if not all(ok[up] for up in ups):
            out[e], ok[e] = None, False
            continue
        out[e] = decide_convergence(system, q, e, exponent, max_len, **kw)
        ok[e] = out[e].converges
    return out


def _convergent(verdicts: dict) -> list:
    return [e for e, v in verdicts.items() if v is not None and v.converges]


def c_sets(system: CoxeterSystem, q, r: float, max_len: int = DEFAULT_MAX_LEN, **kw) -> tuple:
    """``(C, C_tilde)``: sign vectors convergent at exponent r/2 and r~/2."""
    C, Ct, _, _ = c_sets_with_verdicts(system, q, r, max_len, **kw)
    return C, Ct


def c_sets_with_verdicts(system, q, r, max_len, **kw):
    q = as_parameters(q)
    rt = r_tilde(r)
    v_r = _sweep(system, q, r / 2.0, max_len, **kw)
    v_rt = v_r if rt == r else _sweep(system, q, rt / 2.0, max_len, **kw)
    return _convergent(v_r), _convergent(v_rt), v_r, v_rt


def eigen_weight(q, eps) -> tuple:
    """``eps_s q_s^(eps_s / 2)``, the eigenvalue of ``T_s`` on ``eta_eps``."""
    return tuple(e * float(x) ** (e / 2.0) for x, e in zip(as_parameters(q).q, eps))


@dataclass
class FactorialityReport:
    r: float
    r_tilde: float
    C: list
    C_tilde: list
    is_factor: bool
    summands: list
    warnings: list
    names: tuple

    def _label(self, eps) -> dict:
        return {n: int(e) for n, e in zip(self.names, eps)}

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "r_tilde": self.r_tilde,
            "C": [self._label(e) for e in self.C],
            "C_tilde": [self._label(e) for e in self.C_tilde],
            "is_factor": self.is_factor,
            "summands": [{"eps": self._label(s["eps"]),
                          "weight": dict(zip(self.names, s["weight"]))} for s in self.summands],
            "warnings": list(self.warnings),
        }


def check_factoriality_hypotheses(system: CoxeterSystem) -> None:
    if system.rank < 3:
        raise HypothesisError(f"needs at least three generators, got {system.rank}")
    if not system.is_irreducible():
        raise HypothesisError("system is reducible: its Coxeter graph (non-commuting pairs) is disconnected")


def factoriality_report(system: CoxeterSystem, q, r: float = 2.0,
                        max_len: int = DEFAULT_MAX_LEN, **kw) -> FactorialityReport:
    check_factoriality_hypotheses(system)
    q = as_parameters(q)
    if not q.normalized:
        raise InputError("factoriality_report expects parameters in (0, 1]; use reduce_parameters")
    C, Ct, v_r, v_rt = c_sets_with_verdicts(system, q, r, max_len, **kw)
    warnings = []
    for label, verdicts in (("C", v_r), ("C_tilde", v_rt)):
        for e, v in verdicts.items():
            if v is not None and v.boundary:
                warnings.append(f"{label}: eps={dict(zip(system.names, e))} inconclusive-boundary; "
                                + "; ".join(v.notes))
        if v_rt is v_r:
            break
    ones = (1,) * system.rank
    summands = [{"eps": e, "weight": eigen_weight(q, e)} for e in Ct]
    return FactorialityReport(r, r_tilde(r), C, Ct, ones not in Ct, summands, warnings, system.names)

"""First-server advantage, its diagonal zeros and extrema, and comparison rows.

Every advantage is the difference of two exact win probabilities.  The
side-out advantages are of order 1e-9 while the probabilities themselves
are near 1/2, so a floating-point difference would be noise.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence, Union

from .exceptions import DomainError
from .rational import as_fraction
from .solver import solve, solve_float
from .states import ScoringSystem, System, Team, index_of, initial_state
from .transitions import RallyParams, build_model

__all__ = [
    "AdvantageResult",
    "RootInterval",
    "ZeroSet",
    "SearchRegion",
    "Extremum",
    "ComparisonRow",
    "resolve_system",
    "win_probability",
    "first_server_advantage",
    "advantage_value",
    "diagonal_advantage",
    "find_diagonal_zeros",
    "find_extremum",
    "comparison_row",
    "cross_section_table",
    "sqrt_decimal",
    "DEFAULT_SCAN_STEP",
    "DEFAULT_ZERO_TOL",
    "DEFAULT_GRID_STEP",
]

DEFAULT_SCAN_STEP = Fraction(1, 1024)
DEFAULT_ZERO_TOL = Fraction(1, 10**7)
DEFAULT_GRID_STEP = Fraction(1, 64)
DEFAULT_POINT_TOL = Fraction(1, 10**7)
FAIR_COIN = "coin"


def resolve_system(system, n: Optional[int] = None) -> ScoringSystem:
    if isinstance(system, ScoringSystem):
        if n is not None and n != system.n:
            raise DomainError(f"conflicting targets {system.n} and {n}")
        return system
    if n is None:
        raise DomainError("target score n is required")
    return ScoringSystem(System.parse(system), n)


def _params(params) -> RallyParams:
    if isinstance(params, RallyParams):
        return params
    p_A, p_B = params
    return RallyParams(p_A, p_B)


def _sign(value) -> int:
    return (value > 0) - (value < 0)


def _conditional_solve(system: ScoringSystem, params: RallyParams, quantities):
    """Solve from both openings; returns ``{team: {quantity: value}}``."""
    model = build_model(system, params)
    starts = {team: initial_state(system, team) for team in Team}
    out = solve(model, list(starts.values()), quantities)
    return {
        team: {q: out[q][index_of(system, state)] for q in out}
        for team, state in starts.items()
    }


def win_probability(system, n, params, first_server: Union[Team, str] = Team.A) -> Fraction:
    """Exact probability that Team A wins.

    ``first_server`` is ``Team.A``, ``Team.B`` or ``"coin"`` for the
    average over a fair toss.
    """
    system = resolve_system(system, n)
    params = _params(params)
    cond = _conditional_solve(system, params, ("A",))
    if first_server == FAIR_COIN:
        return (cond[Team.A]["A"] + cond[Team.B]["A"]) / 2
    return cond[Team(first_server)]["A"]


@dataclass(frozen=True)
class AdvantageResult:
    system: ScoringSystem
    point: tuple[Fraction, Fraction]
    value: Fraction
    win_if_A_first: Fraction
    win_if_B_first: Fraction

    @property
    def sign(self) -> int:
        return _sign(self.value)


def first_server_advantage(system, n, params) -> AdvantageResult:
    """``P(A wins | A serves first) - P(A wins | B serves first)``, exactly."""
    system = resolve_system(system, n)
    params = _params(params)
    cond = _conditional_solve(system, params, ("A",))
    a, b = cond[Team.A]["A"], cond[Team.B]["A"]
    return AdvantageResult(system, (params.p_A, params.p_B), a - b, a, b)


def advantage_value(system: ScoringSystem, x, y) -> Fraction:
    return first_server_advantage(system, None, (x, y)).value


def diagonal_advantage(system, n, x) -> Fraction:
    """Advantage for evenly matched teams, ``p_A = p_B = x``."""
    system = resolve_system(system, n)
    x = as_fraction(x)
    if not 0 < x <= 1:
        raise DomainError(f"diagonal point must lie in (0, 1], got {x}")
    return advantage_value(system, x, x)


# -- diagonal zeros -----------------------------------------------------------


@dataclass(frozen=True)
class RootInterval:
    """Bracket ``[lo, hi]`` around one sign change of ``x -> f(x, x)``.

    ``sign_left``/``sign_right`` are the exact signs of ``f`` just left and
    right of the root.  ``lo == hi`` means ``f(lo) == 0`` exactly.
    """

    lo: Fraction
    hi: Fraction
    sign_left: int
    sign_right: int

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo


@dataclass(frozen=True)
class ZeroSet:
    system: ScoringSystem
    roots: tuple[RootInterval, ...]
    tolerance: Fraction
    scan_step: Fraction
    evaluations: int = 0

    @property
    def n(self) -> int:
        return self.system.n

    def midpoints(self) -> list[Fraction]:
        return [r.midpoint for r in self.roots]

    def __len__(self) -> int:
        return len(self.roots)


def _map(func: Callable, items: Sequence, workers: int) -> list:
    if workers <= 1 or len(items) < 2 * workers:
        return [func(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items, chunksize=max(1, len(items) // (4 * workers))))


class _DiagonalSign:
    """Picklable ``x -> sign(f(x, x))`` for process pools."""

    def __init__(self, system: ScoringSystem):
        self.system = system

    def __call__(self, x: Fraction) -> int:
        return _sign(advantage_value(self.system, x, x))


def _scan(signs: dict, sign_of, xs: list, workers: int) -> list[int]:
    todo = [x for x in xs if x not in signs]
    for x, s in zip(todo, _map(sign_of, todo, workers)):
        signs[x] = s
    return [signs[x] for x in xs]


def _brackets(xs: list, signs: list) -> list[tuple]:
    """Sign changes along a grid, with exact zeros reported as points."""
    out = []
    last_x, last_s = None, 0
    for x, s in zip(xs, signs):
        if s == 0:
            out.append(("zero", x))
            last_x, last_s = x, 0
            continue
        if last_s and s != last_s:
            out.append(("bracket", last_x, x, last_s, s))
        last_x, last_s = x, s
    return out


def find_diagonal_zeros(
    system,
    n: Optional[int] = None,
    tolerance=DEFAULT_ZERO_TOL,
    scan_step=DEFAULT_SCAN_STEP,
    *,
    confirm: bool = True,
    max_halvings: int = 4,
    workers: int = 1,
) -> ZeroSet:
    """Isolate every sign change of ``x -> f(x, x)`` on ``(0, 1)``.

    The grid ``scan_step, 2 scan_step, ...`` is scanned with exact signs and
    each sign change is bisected until its bracket is no wider than
    ``tolerance``.  With ``confirm`` the scan is repeated at half the step;
    if the number of sign changes moves (two roots hiding in one cell), the
    step keeps halving until consecutive scans agree.
    """
    system = resolve_system(system, n)
    tolerance = as_fraction(tolerance)
    step = as_fraction(scan_step)
    if tolerance <= 0 or not 0 < step < 1:
        raise DomainError("need tolerance > 0 and 0 < scan_step < 1")
    sign_of = _DiagonalSign(system)
    signs: dict[Fraction, int] = {}

    def grid(h):
        count = math.ceil(1 / h)
        return [k * h for k in range(1, count) if k * h < 1]

    xs = grid(step)
    found = _brackets(xs, _scan(signs, sign_of, xs, workers))
    for _ in range(max_halvings if confirm else 0):
        finer = grid(step / 2)
        finer_found = _brackets(finer, _scan(signs, sign_of, finer, workers))
        step /= 2
        if len(finer_found) == len(found):
            found = finer_found
            break
        found = finer_found

    roots = []
    for item in found:
        if item[0] == "zero":
            x = item[1]
            left = [s for g, s in sorted(signs.items()) if g < x and s]
            right = [s for g, s in sorted(signs.items()) if g > x and s]
            roots.append(RootInterval(x, x, left[-1] if left else 0, right[0] if right else 0))
            continue
        _, lo, hi, s_lo, s_hi = item
        while hi - lo > tolerance:
            mid = (lo + hi) / 2
            s = sign_of(mid)
            signs[mid] = s
            if s == 0:
                lo = hi = mid
                break
            if s == s_lo:
                lo = mid
            else:
                hi = mid
        roots.append(RootInterval(lo, hi, s_lo, s_hi))
    return ZeroSet(system, tuple(roots), tolerance, step, evaluations=len(signs))


# -- extrema ------------------------------------------------------------------


@dataclass(frozen=True)
class SearchRegion:
    """``x_lo <= x <= x_hi``, ``y_lo <= y <= y_hi``, ``s_lo <= x + y <= s_hi``."""

    x_lo: Fraction
    x_hi: Fraction
    y_lo: Fraction
    y_hi: Fraction
    s_lo: Fraction = Fraction(0)
    s_hi: Fraction = Fraction(2)

    def __post_init__(self):
        for name in ("x_lo", "x_hi", "y_lo", "y_hi", "s_lo", "s_hi"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if not (0 <= self.x_lo <= self.x_hi <= 1 and 0 <= self.y_lo <= self.y_hi <= 1):
            raise DomainError(f"box bounds must satisfy 0 <= lo <= hi <= 1: {self}")
        if self.s_lo > self.s_hi or self.s_lo > self.x_hi + self.y_hi or self.s_hi < self.x_lo + self.y_lo:
            raise DomainError(f"region is empty: {self}")

    @classmethod
    def parse(cls, text: str) -> "SearchRegion":
        from .rational import parse_rational

        parts = [p for p in text.split(",")]
        if len(parts) != 6:
            raise DomainError("region needs six comma-separated bounds xlo,xhi,ylo,yhi,slo,shi")
        return cls(*(parse_rational(p) for p in parts))

    def contains(self, x, y) -> bool:
        return (
            self.x_lo <= x <= self.x_hi
            and self.y_lo <= y <= self.y_hi
            and self.s_lo <= x + y <= self.s_hi
            and x + y > 0
        )

    @property
    def symmetric(self) -> bool:
        return self.x_lo == self.y_lo and self.x_hi == self.y_hi


@dataclass(frozen=True)
class Extremum:
    system: ScoringSystem
    mode: str
    point: tuple[Fraction, Fraction]
    value: Fraction
    evaluations: int


def _axis(lo: Fraction, hi: Fraction, step: Fraction) -> list[Fraction]:
    k0 = math.ceil(lo / step)
    k1 = math.floor(hi / step)
    return sorted({lo, hi} | {k * step for k in range(k0, k1 + 1)})


_DIRECTIONS = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1), (1, -1), (-1, 1))


def find_extremum(
    system,
    n: Optional[int],
    region: SearchRegion,
    mode: str = "min",
    value_tol=None,
    point_tol=DEFAULT_POINT_TOL,
    *,
    grid_step=DEFAULT_GRID_STEP,
    workers: int = 1,
) -> Extremum:
    """Minimize or maximize the advantage over ``region``.

    A grid scan at ``grid_step`` picks a starting point; a compass search
    along the axes and both diagonals then halves its step until it drops
    below ``point_tol``.  All comparisons are between exact values.  If
    ``value_tol`` is given the search also stops once an accepted move
    improves the value by less than it.
    """
    system = resolve_system(system, n)
    if mode not in ("min", "max"):
        raise DomainError(f"mode must be 'min' or 'max', got {mode!r}")
    point_tol = as_fraction(point_tol)
    value_tol = None if value_tol is None else as_fraction(value_tol)
    better = (lambda a, b: a < b) if mode == "min" else (lambda a, b: a > b)

    cache: dict[tuple[Fraction, Fraction], Fraction] = {}

    def f(x, y):
        key = (x, y) if not region.symmetric or x <= y else (y, x)
        if key not in cache:
            cache[key] = advantage_value(system, *key)
        return cache[key]

    grid_step = as_fraction(grid_step)
    xs = _axis(region.x_lo, region.x_hi, grid_step)
    ys = _axis(region.y_lo, region.y_hi, grid_step)
    points = [(x, y) for x in xs for y in ys if region.contains(x, y)]
    if not points:
        raise DomainError(f"no admissible point with p_A + p_B > 0 in {region}")
    # f is symmetric, so a symmetric region only needs the half x <= y.
    keys = sorted({(x, y) if not region.symmetric or x <= y else (y, x) for x, y in points})
    for key, value in zip(keys, _map(_AdvantageAt(system), keys, workers)):
        cache[key] = value
    best = points[0]
    for p in points[1:]:
        if better(f(*p), f(*best)):
            best = p
    best_value = f(*best)

    step = grid_step
    while step >= point_tol:
        moved = False
        for dx, dy in _DIRECTIONS:
            cand = (best[0] + dx * step, best[1] + dy * step)
            if not region.contains(*cand):
                continue
            value = f(*cand)
            if better(value, best_value):
                gain = abs(value - best_value)
                best, best_value, moved = cand, value, True
                if value_tol is not None and gain < value_tol:
                    return Extremum(system, mode, best, best_value, len(cache))
        if not moved:
            step /= 2
    return Extremum(system, mode, best, best_value, len(cache))


class _AdvantageAt:
    def __init__(self, system: ScoringSystem):
        self.system = system

    def __call__(self, point):
        return advantage_value(self.system, *point)


# -- comparison statistics ---------------------------------------------------


def sqrt_decimal(value: Fraction, digits: int) -> str:
    """Square root of a nonnegative rational, correctly rounded to ``digits``."""
    value = as_fraction(value)
    if value < 0:
        raise DomainError(f"negative variance {value}")
    scaled = value * 10 ** (2 * digits)
    # floor(2 sqrt(X)) = isqrt(floor(4 X)); rounding half up from there.
    twice = math.isqrt((4 * scaled.numerator) // scaled.denominator)
    q = (twice + 1) // 2
    whole, frac = divmod(q, 10**digits)
    return f"{whole}.{frac:0{digits}d}" if digits else str(whole)


@dataclass(frozen=True)
class ComparisonRow:
    """Fair-coin statistics of one system at one parameter point.

    Exact rows carry Fractions; rows from the float fast path carry floats.
    """

    system: ScoringSystem
    p_A: Fraction
    p_B: Fraction
    win_prob_A: Union[Fraction, float]
    mean_duration: Union[Fraction, float]
    duration_variance: Union[Fraction, float]
    sd_duration: str
    sd_digits: int
    exact: bool = True


def comparison_row(system, n, params, *, sd_digits: int = 12, exact: bool = True) -> ComparisonRow:
    """Win probability and duration mean/sd with the first server chosen by a fair coin.

    Probabilities and the first and second moments are averaged over the two
    openings; the variance is the averaged second moment minus the squared
    averaged mean.
    """
    system = resolve_system(system, n)
    params = _params(params)
    if exact:
        cond = _conditional_solve(system, params, ("A", "t", "u"))
    else:
        params.require_live()
        model = build_model(system, params)
        starts = {team: initial_state(system, team) for team in Team}
        raw = solve_float(model, list(starts.values()))
        cond = {
            team: {q: raw[q][index_of(system, st)] for q in raw}
            for team, st in starts.items()
        }
    half = Fraction(1, 2) if exact else 0.5
    win = (cond[Team.A]["A"] + cond[Team.B]["A"]) * half
    mean = (cond[Team.A]["t"] + cond[Team.B]["t"]) * half
    # E[T^2] = 2 u - t for each opening
    second = sum(2 * cond[t]["u"] - cond[t]["t"] for t in Team) * half
    variance = second - mean * mean
    if exact:
        sd = sqrt_decimal(variance, sd_digits)
    else:
        sd = f"{math.sqrt(max(variance, 0.0)):.{sd_digits}f}"
    return ComparisonRow(system, params.p_A, params.p_B, win, mean, variance, sd, sd_digits, exact)


class _RowAt:
    def __init__(self, exact: bool, sd_digits: int):
        self.exact = exact
        self.sd_digits = sd_digits

    def __call__(self, job):
        system, p_A, p_B = job
        try:
            return comparison_row(system, None, (p_A, p_B), sd_digits=self.sd_digits, exact=self.exact)
        except DomainError as exc:
            raise DomainError(f"{system} at p_A={p_A}, p_B={p_B}: {exc}") from exc


def cross_section_table(
    systems: Iterable,
    n_values: Optional[Iterable[int]],
    p_B_values: Iterable,
    p_A_grid: Iterable,
    *,
    exact: bool = True,
    sd_digits: int = 12,
    workers: int = 1,
) -> list[ComparisonRow]:
    """Rows for every ``(system, p_B, p_A)``, in exactly that order.

    ``systems`` may be ScoringSystem instances (``n_values`` ignored) or
    system kinds paired positionally with ``n_values``.
    """
    systems = list(systems)
    if n_values is not None:
        systems = [resolve_system(s, n) for s, n in zip(systems, n_values, strict=True)]
    else:
        systems = [resolve_system(s) for s in systems]
    p_B_values = [as_fraction(v) for v in p_B_values]
    p_A_grid = [as_fraction(v) for v in p_A_grid]
    if not systems or not p_B_values or not p_A_grid:
        raise DomainError("cross-section grids must be nonempty")
    jobs = [(s, a, b) for s in systems for b in p_B_values for a in p_A_grid]
    return _map(_RowAt(exact, sd_digits), jobs, workers)

"""
Precoder design for one transmission.

All solvers work on the normalized problem (unit power budget, unit noise)
and scale the precoders back by sqrt(P_T) at the end. Rates are in bits per
channel use (log2).

The weighted max-min design maximizes R subject to c_k R <= R_k, R_k inside
the MAC region of receiver k, and the SINR auxiliaries gamma bounded by the
true SINRs. The SINR bound is non-convex; each SCA step replaces its
right-hand side by the first-order lower bound

    L(v, h, gamma) = [ sum_{V in I_k + U} (2 Re(vbar_V^H h h^H v_V) - |h^H vbar_V|^2)
                       - (sum_{V in I_k + U} |h^H vbar_V|^2 + noise) / (1 + gbar) * (gamma - gbar)
                       + noise ] / (1 + gbar)

and solves the resulting convex program by bisection on R.
"""
import logging
from dataclasses import dataclass
from itertools import combinations
from typing import List, Optional, Sequence

import cvxpy as cp
import numpy as np

from ..errors import SolverError
from ..models.beams import BeamformerSolution, BeamformingOptions, BeamProblem
from ..models.environment import ChannelRealization
from ..models.plan import Transmission
from .resilience import SOLVED, RetryExhaustedError, get_solver

logger = logging.getLogger(__name__)

_RANK_TOL = 1e-10
_POWER_SLACK = 1e-9


# ============================================================================
# Rates and SINRs
# ============================================================================

def mac_rate(gammas: Sequence[float]) -> float:
    """Symmetric rate of D messages decoded jointly: min over subsets Q of log2(1 + sum_Q gamma) / |Q|."""
    values = np.sort(np.maximum(np.asarray(gammas, dtype=float), 0.0))
    if values.size == 0:
        return 0.0
    # for each subset size the weakest subset holds the smallest gammas
    sizes = np.arange(1, values.size + 1)
    return float(np.min(np.log2(1.0 + np.cumsum(values)) / sizes))


def sinr_matrix(problem: BeamProblem, precoders: np.ndarray, normalized: bool = True) -> np.ndarray:
    """SINR of every (receiver, codeword) pair; interference counts only codewords the receiver cannot cancel."""
    channels = problem.normalized_channels if normalized else problem.channels
    noise = 1.0 if normalized else problem.noise
    gains = np.abs(channels.conj() @ precoders) ** 2
    interference = np.array([
        gains[i, list(problem.interfering[i])].sum() if problem.interfering[i] else 0.0
        for i in range(len(problem.receivers))
    ])
    return gains / (interference[:, None] + noise)


def _achievable(problem: BeamProblem, sinr: np.ndarray) -> np.ndarray:
    return np.array([mac_rate(sinr[i, list(wanted)]) for i, wanted in enumerate(problem.desired)])


def evaluate_precoders(problem: BeamProblem, precoders: np.ndarray, normalized: bool = True) -> float:
    """Common weighted rate min_k R_k / c_k reached by the given precoders."""
    sinr = sinr_matrix(problem, precoders, normalized)
    return float(np.min(_achievable(problem, sinr) / problem.weights))


def _rate_upper_bound(problem: BeamProblem) -> float:
    # interference-free, full-power bound on every receiver's MAC rate
    energy = np.sum(np.abs(problem.normalized_channels) ** 2, axis=1)
    sizes = np.array([len(wanted) for wanted in problem.desired])
    return float(np.min(np.log2(1.0 + energy) / (sizes * problem.weights)))


def _mac_rows(problem: BeamProblem, pairs: List[tuple]):
    """0/1 rows selecting the gammas of every nonempty subset of each receiver's desired set."""
    index = {pair: p for p, pair in enumerate(pairs)}
    rows, sizes, owners = [], [], []
    for i, wanted in enumerate(problem.desired):
        for size in range(1, len(wanted) + 1):
            for subset in combinations(wanted, size):
                row = np.zeros(len(pairs))
                row[[index[(i, j)] for j in subset]] = 1.0
                rows.append(row)
                sizes.append(size)
                owners.append(i)
    return np.array(rows), np.array(sizes), np.array(owners)


def _thresholds(problem: BeamProblem, sizes, owners, rate: float) -> np.ndarray:
    return np.exp2(sizes * problem.weights[owners] * rate) - 1.0


def _solution(
    problem: BeamProblem,
    precoders: np.ndarray,
    method: str,
    trace=(),
    power_trace=(),
    best_effort: bool = False,
    **metadata,
) -> BeamformerSolution:
    sinr = sinr_matrix(problem, precoders)
    achievable = _achievable(problem, sinr)
    common = float(np.min(achievable / problem.weights)) if len(problem.receivers) else 0.0
    return BeamformerSolution(
        receivers=problem.receivers,
        precoders=precoders * np.sqrt(problem.power),
        sinr=sinr,
        rates=problem.weights * common,
        achievable_rates=achievable,
        common_rate=common,
        method=method,
        trace=tuple(trace) or (common,),
        power_trace=tuple(power_trace) or (float(np.sum(np.abs(precoders) ** 2)),),
        best_effort=best_effort,
        metadata=metadata,
    )


def _is_silent(problem: BeamProblem) -> bool:
    return problem.codeword_count == 0 or not np.any(np.abs(problem.channels) > 0)


def _zero_solution(problem: BeamProblem, method: str) -> BeamformerSolution:
    logger.debug("All channels vanish; returning the zero-rate solution")
    return _solution(problem, np.zeros((problem.antenna_count, problem.codeword_count), dtype=complex), method)


# ============================================================================
# Problem construction
# ============================================================================

def build_beam_problem(
    transmission: Transmission,
    channels,
    power: float,
    noise: float,
) -> BeamProblem:
    """Receivers, codewords and weights of a planned transmission; ``channels`` holds one row per user."""
    if isinstance(channels, ChannelRealization):
        channels = channels.channels
    codewords = [cw for cw in transmission.codewords if cw.receivers]
    receivers = transmission.receivers
    payloads = transmission.payloads()
    desired = tuple(tuple(j for j, cw in enumerate(codewords) if k in cw.receivers) for k in receivers)
    interfering = tuple(tuple(j for j, cw in enumerate(codewords) if k not in cw.targets) for k in receivers)
    return BeamProblem(
        receivers=receivers,
        channels=np.asarray(channels)[list(receivers)],
        codewords=tuple(cw.targets for cw in codewords),
        desired=desired,
        interfering=interfering,
        weights=np.array([float(payloads[k]) for k in receivers]),
        power=power,
        noise=noise,
    )


# ============================================================================
# Baselines
# ============================================================================

def _mrt_directions(problem: BeamProblem) -> np.ndarray:
    channels = problem.normalized_channels
    directions = np.zeros((problem.antenna_count, problem.codeword_count), dtype=complex)
    for j in range(problem.codeword_count):
        target = np.zeros(problem.antenna_count, dtype=complex)
        for i, wanted in enumerate(problem.desired):
            norm = np.linalg.norm(channels[i])
            if j in wanted and norm > 0:
                target += channels[i] / norm
        norm = np.linalg.norm(target)
        if norm > 0:
            directions[:, j] = target / norm
    return directions


def solve_mrt(problem: BeamProblem) -> BeamformerSolution:
    """Matched filter towards each codeword's receivers, power split uniformly."""
    if _is_silent(problem):
        return _zero_solution(problem, "mrt")
    precoders = _mrt_directions(problem) / np.sqrt(problem.codeword_count)
    return _solution(problem, precoders, "mrt")


def _zf_directions(problem: BeamProblem):
    channels = problem.normalized_channels
    length = problem.antenna_count
    directions = np.zeros((length, problem.codeword_count), dtype=complex)
    best_effort = False
    for j in range(problem.codeword_count):
        nulled = [i for i, blocked in enumerate(problem.interfering) if j in blocked]
        if nulled:
            _, singular, vh = np.linalg.svd(channels[nulled].conj(), full_matrices=True)
            rank = int(np.sum(singular > _RANK_TOL * max(singular.max(initial=0.0), 1e-300)))
            basis = vh[rank:].conj().T
            if basis.shape[1] == 0:
                basis = vh[-1:].conj().T
                best_effort = True
        else:
            basis = np.eye(length, dtype=complex)
        target = np.zeros(length, dtype=complex)
        for i, wanted in enumerate(problem.desired):
            norm = np.linalg.norm(channels[i])
            if j in wanted and norm > 0:
                target += channels[i] / norm
        direction = basis @ (basis.conj().T @ target)
        if np.linalg.norm(direction) < 1e-12:
            direction = basis[:, 0]
        directions[:, j] = direction / np.linalg.norm(direction)
    return directions, best_effort


def _zf_power_split(problem: BeamProblem, directions: np.ndarray, inner_tol: float) -> Optional[np.ndarray]:
    """Powers maximizing min R_k / c_k for fixed interference-free directions, by bisection on R."""
    gains = np.abs(problem.normalized_channels.conj() @ directions) ** 2
    pairs = problem.pairs()
    rows, sizes, owners = _mac_rows(problem, pairs)
    # per-row codeword gains: sum over the subset of g[i, j] p_j
    coefficients = np.zeros((rows.shape[0], problem.codeword_count))
    for p, (i, j) in enumerate(pairs):
        coefficients[:, j] += rows[:, p] * gains[i, j]

    powers = cp.Variable(problem.codeword_count, nonneg=True)
    thresholds = cp.Parameter(rows.shape[0], nonneg=True)
    lp = cp.Problem(cp.Minimize(cp.sum(powers)), [coefficients @ powers >= thresholds])
    solver = get_solver()

    lo, hi, best = 0.0, _rate_upper_bound(problem), None
    while hi - lo > inner_tol * max(hi, 1e-12):
        mid = 0.5 * (lo + hi)
        thresholds.value = _thresholds(problem, sizes, owners, mid)
        status, _ = solver.call(lp)
        if status in SOLVED and powers.value is not None and powers.value.sum() <= 1.0 + _POWER_SLACK:
            lo, best = mid, np.maximum(powers.value, 0.0)
        else:
            hi = mid
    return best


def solve_zero_forcing(problem: BeamProblem, options: Optional[BeamformingOptions] = None) -> BeamformerSolution:
    """
    Null every codeword at the receivers it would interfere with, then split power.

    When the antennas cannot null all of them the direction is projected onto
    the weakest singular direction instead and ``best_effort`` is set.
    """
    options = options or BeamformingOptions()
    if _is_silent(problem):
        return _zero_solution(problem, "zero_forcing")
    directions, best_effort = _zf_directions(problem)
    if best_effort:
        logger.debug("Zero-forcing is best effort: %d antennas for %d codewords",
                     problem.antenna_count, problem.codeword_count)
    try:
        powers = _zf_power_split(problem, directions, options.inner_tol)
    except RetryExhaustedError as err:
        raise SolverError("zero-forcing power split failed",
                          iterate={"directions": directions.tolist()}) from err
    if powers is None or powers.sum() <= 0:
        powers = np.full(problem.codeword_count, 1.0 / problem.codeword_count)
    else:
        powers = powers / powers.sum()
    precoders = directions * np.sqrt(powers)[None, :]
    return _solution(problem, precoders, "zero_forcing", best_effort=best_effort)


# ============================================================================
# Successive convex approximation
# ============================================================================

@dataclass(frozen=True, eq=False)
class LinearizationPoint:
    precoders: np.ndarray  # normalized, shape (L, codewords)
    gammas: np.ndarray  # one per desired pair, at most the true SINR
    rate: float


@dataclass(frozen=True, eq=False)
class SubproblemResult:
    rate: float
    precoders: Optional[np.ndarray]
    gammas: Optional[np.ndarray]


def _energy(expression):
    return cp.sum_squares(cp.real(expression)) + cp.sum_squares(cp.imag(expression))


class SurrogateProgram:
    """
    Parametrized convex surrogate of one transmission.

    Compiled once; linearize() refreshes the Taylor coefficients and
    feasible() re-solves for a target rate.
    """

    def __init__(self, problem: BeamProblem):
        self.problem = problem
        self.pairs = problem.pairs()
        channels = problem.normalized_channels
        length, count = problem.antenna_count, problem.codeword_count

        self.precoders = cp.Variable((length, count), complex=True)
        self.gammas = cp.Variable(len(self.pairs), nonneg=True)
        self.coef_re = [cp.Parameter((length, count)) for _ in self.pairs]
        self.coef_im = [cp.Parameter((length, count)) for _ in self.pairs]
        self.offset = cp.Parameter(len(self.pairs))
        self.slope = cp.Parameter(len(self.pairs), nonneg=True)

        real_part, imag_part = cp.real(self.precoders), cp.imag(self.precoders)
        constraints = []
        for p, (i, _) in enumerate(self.pairs):
            blocked = list(problem.interfering[i])
            interference = _energy(channels[i].conj() @ self.precoders[:, blocked]) if blocked else 0.0
            bound = (
                2 * (cp.sum(cp.multiply(self.coef_re[p], real_part)) + cp.sum(cp.multiply(self.coef_im[p], imag_part)))
                + self.offset[p]
                - cp.multiply(self.slope[p], self.gammas[p])
            )
            constraints.append(interference + 1.0 <= bound)

        rows, self.sizes, self.owners = _mac_rows(problem, self.pairs)
        self.thresholds = cp.Parameter(rows.shape[0], nonneg=True)
        constraints.append(rows @ self.gammas >= self.thresholds)
        total_power = _energy(self.precoders)
        constraints.append(total_power <= 1.0)
        self.program = cp.Problem(cp.Minimize(total_power), constraints)

    def linearize(self, point: LinearizationPoint) -> None:
        channels = self.problem.normalized_channels
        length, count = self.problem.antenna_count, self.problem.codeword_count
        offsets, slopes = np.empty(len(self.pairs)), np.empty(len(self.pairs))
        for p, (i, j) in enumerate(self.pairs):
            involved = list(self.problem.interfering[i]) + [j]
            h = channels[i]
            projections = h.conj() @ point.precoders
            weight = 1.0 / (1.0 + point.gammas[p])
            coefficients = np.zeros((length, count), dtype=complex)
            coefficients[:, involved] = weight * np.outer(h, projections[involved])
            self.coef_re[p].value = coefficients.real
            self.coef_im[p].value = coefficients.imag
            energy = float(np.sum(np.abs(projections[involved]) ** 2))
            slopes[p] = weight * weight * (energy + 1.0)
            offsets[p] = weight * (1.0 - energy) + slopes[p] * point.gammas[p]
        self.offset.value = offsets
        self.slope.value = slopes

    def feasible(self, rate: float):
        self.thresholds.value = _thresholds(self.problem, self.sizes, self.owners, rate)
        status, _ = get_solver().call(self.program, warm_start=True)
        if status in SOLVED and self.precoders.value is not None:
            return True, np.asarray(self.precoders.value), np.maximum(np.asarray(self.gammas.value), 0.0)
        return False, None, None


def solve_convex_subproblem(
    point: LinearizationPoint,
    problem: BeamProblem,
    inner_tol: float = 1e-6,
    program: Optional[SurrogateProgram] = None,
) -> SubproblemResult:
    """
    Largest common weighted rate feasible for the surrogate around ``point``.

    The point itself is feasible at its own rate, so bisection starts there;
    when nothing above it is feasible the result carries no precoders.
    """
    program = program or SurrogateProgram(problem)
    program.linearize(point)
    lo = max(point.rate, 0.0)
    hi = max(_rate_upper_bound(problem), lo)
    best, best_gammas = None, None
    if lo == 0.0:
        ok, precoders, gammas = program.feasible(0.0)
        if ok:
            best, best_gammas = precoders, gammas
    while hi - lo > inner_tol * max(hi, 1e-12):
        mid = 0.5 * (lo + hi)
        ok, precoders, gammas = program.feasible(mid)
        if ok:
            lo, best, best_gammas = mid, precoders, gammas
        else:
            hi = mid
    return SubproblemResult(rate=lo, precoders=best, gammas=best_gammas)


def _point(problem: BeamProblem, precoders: np.ndarray) -> LinearizationPoint:
    sinr = sinr_matrix(problem, precoders)
    gammas = np.array([sinr[i, j] for i, j in problem.pairs()])
    return LinearizationPoint(precoders=precoders, gammas=gammas, rate=evaluate_precoders(problem, precoders))


def solve_wmm_sca(
    problem: BeamProblem,
    options: Optional[BeamformingOptions] = None,
    initial: Optional[BeamformerSolution] = None,
) -> BeamformerSolution:
    """
    Weighted max-min precoders by successive convex approximation.

    Starts from zero-forcing when the antennas allow nulling, else from MRT,
    and only accepts iterates that raise the objective, so the trace never
    decreases.

    Raises:
        SolverError: the inner solver failed on every solver of the chain.
    """
    options = options or BeamformingOptions()
    if _is_silent(problem):
        return _zero_solution(problem, "wmm_sca")
    if initial is None:
        initial = solve_zero_forcing(problem, options)
        if initial.best_effort:
            initial = solve_mrt(problem)
    precoders = initial.precoders / np.sqrt(problem.power)
    point = _point(problem, precoders)
    trace = [point.rate]
    power_trace = [float(np.sum(np.abs(precoders) ** 2))]
    program = SurrogateProgram(problem)

    for iteration in range(options.max_iters):
        try:
            result = solve_convex_subproblem(point, problem, options.inner_tol, program)
        except RetryExhaustedError as err:
            raise SolverError(
                f"SCA subproblem failed at iteration {iteration}",
                iterate={"iteration": iteration, "rate": point.rate,
                         "precoders": point.precoders.tolist(), "gammas": point.gammas.tolist()},
            ) from err
        if result.precoders is None:
            break
        candidate = result.precoders
        power = float(np.sum(np.abs(candidate) ** 2))
        if power > 1.0:
            candidate = candidate / np.sqrt(power)
        new_point = _point(problem, candidate)
        if new_point.rate <= point.rate:
            break
        change = (new_point.rate - point.rate) / max(point.rate, 1e-12)
        point = new_point
        trace.append(point.rate)
        power_trace.append(float(np.sum(np.abs(candidate) ** 2)))
        logger.debug("SCA iteration %d: R=%.6g (change %.2e)", iteration + 1, point.rate, change)
        if change < options.tol:
            break

    return _solution(problem, point.precoders, "wmm_sca", trace=trace, power_trace=power_trace,
                     initial_method=initial.method)


def solve_beams(problem: BeamProblem, options: Optional[BeamformingOptions] = None) -> BeamformerSolution:
    options = options or BeamformingOptions()
    if options.method == "zero_forcing":
        return solve_zero_forcing(problem, options)
    if options.method == "mrt":
        return solve_mrt(problem)
    return solve_wmm_sca(problem, options)

"""Algebra norms for matrices with off-diagonal decay, plus the l2 operator
norm, Hermitian eigen-extremes and the spectral radius used by the inversion
engine.

Norm families (all with polynomial weight u_alpha(i, j) = (1 + |i-j|)^alpha):

* schur:    max over rows/columns of weighted p-norms,
* bgs:      p-norm over diagonal offsets of weighted per-diagonal sups,
* beurling: p-norm over offsets k of the weighted sup over |i-j| >= |k|,
* jaffard:  global weighted sup (the p = infinity case of all three),
* op:       the l2 -> l2 operator norm.

Norms are computed exactly for the finite matrix as given; nothing is
extrapolated to the infinite extension.  Callers choose windows wide enough
that boundary effects vanish for the entries they care about.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, ParameterError, StructuralError
from .matrices import FiniteMatrix, adjoint, matvec

FAMILIES = ("schur", "bgs", "beurling", "jaffard", "op")

_MAX_POWER_ITERATIONS = 10_000
_DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class AlgebraSpec:
    """Selector for a norm family with parameters p in [1, inf], alpha >= 0.

    p is ignored for jaffard (always the sup norm) and op; alpha is ignored
    for op.
    """

    family: str
    p: float = math.inf
    alpha: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ParameterError(f"unknown norm family {self.family!r}")
        if not (self.p >= 1):
            raise ParameterError(f"p must satisfy p >= 1 or p = inf, got {self.p}")
        if self.alpha < 0:
            raise ParameterError(f"alpha must be >= 0, got {self.alpha}")
        if self.family == "jaffard":
            object.__setattr__(self, "p", math.inf)
        if self.family == "op":
            object.__setattr__(self, "p", 2.0)
            object.__setattr__(self, "alpha", 0.0)

    @property
    def algebra_valid(self) -> bool:
        """True when the norm defines a Banach algebra: alpha > 1 - 1/p for
        the decay families (p = inf for jaffard), always for op."""
        if self.family == "op":
            return True
        return self.alpha > 1.0 - 1.0 / self.p

    def describe(self) -> dict:
        p = "inf" if math.isinf(self.p) else self.p
        return {"family": self.family, "p": p, "alpha": self.alpha}


def _check_params(p: float, alpha: float) -> None:
    if not (p >= 1):
        raise ParameterError(f"p must satisfy p >= 1 or p = inf, got {p}")
    if alpha < 0:
        raise ParameterError(f"alpha must be >= 0, got {alpha}")


def poly_weight(offsets: np.ndarray, alpha: float) -> np.ndarray:
    """u_alpha on an array of index offsets."""
    return (1.0 + np.abs(offsets)) ** alpha


def _vector_pnorm(values: np.ndarray, p: float, axis=None) -> np.ndarray | float:
    if math.isinf(p):
        return values.max(axis=axis) if values.size else 0.0
    return (values**p).sum(axis=axis) ** (1.0 / p)


def _weighted_abs(a: FiniteMatrix, alpha: float) -> np.ndarray:
    return np.abs(a.entries) * poly_weight(a.offsets(), alpha)


def schur_norm(a: FiniteMatrix, p: float, alpha: float) -> float:
    """max(sup_i ||row_i||_p, sup_j ||col_j||_p) of the weighted entries."""
    _check_params(p, alpha)
    w = _weighted_abs(a, alpha)
    rows = _vector_pnorm(w, p, axis=1)
    cols = _vector_pnorm(w, p, axis=0)
    return float(max(rows.max(), cols.max()))


def _diagonal_sups(a: FiniteMatrix, alpha: float) -> np.ndarray:
    """Weighted sup per diagonal offset k = i - j, for k = -(n-1)..(n-1).

    Returned array d has d[k + n - 1] = sup_{i-j=k} |a(i,j)| u_alpha(i,j).
    """
    n = a.n
    w = _weighted_abs(a, alpha)
    d = np.empty(2 * n - 1)
    for k in range(-(n - 1), n):
        d[k + n - 1] = np.diagonal(w, offset=-k).max()
    return d


def bgs_norm(a: FiniteMatrix, p: float, alpha: float) -> float:
    """p-norm over offsets k of sup_{i-j=k} |a(i,j)| u_alpha(i,j)."""
    _check_params(p, alpha)
    return float(_vector_pnorm(_diagonal_sups(a, alpha), p))


def beurling_norm(a: FiniteMatrix, p: float, alpha: float) -> float:
    """p-norm over offsets k of sup_{|i-j| >= |k|} |a(i,j)| u_alpha(i,j).

    Offsets with |k| > n-1 see an empty region (sup 0) and drop out, matching
    the bi-infinite definition applied to the zero-extended matrix.
    """
    _check_params(p, alpha)
    n = a.n
    d = _diagonal_sups(a, alpha)
    folded = np.maximum(d[n - 1 :], d[n - 1 :: -1])  # folded[j] over |i-j| = j
    suffix = np.flip(np.maximum.accumulate(np.flip(folded)))
    if math.isinf(p):
        return float(suffix[0])
    return float((suffix[0] ** p + 2.0 * (suffix[1:] ** p).sum()) ** (1.0 / p))


def jaffard_norm(a: FiniteMatrix, alpha: float) -> float:
    """sup_{i,j} |a(i,j)| u_alpha(i, j)."""
    if alpha < 0:
        raise ParameterError(f"alpha must be >= 0, got {alpha}")
    return float(_weighted_abs(a, alpha).max())


# ---------------------------------------------------------------------------
# Power iteration.  Deterministic all-ones start; convergence is declared
# only when the stall-aware error estimate delta * r / (1 - r) drops below
# tol * lambda, which guards against premature stops when the dominant
# eigenvalue gap is small.  Structured matrices can trap the all-ones vector
# exactly (kernel hit, or an exact interior eigenvector that is a bitwise
# fixed point); both trigger a deterministic restart with a fixed ramp
# perturbation, and the magnitude-largest candidate wins.
# ---------------------------------------------------------------------------

_MAX_RESTARTS = 3


def _start_vector(n: int, restart: int) -> np.ndarray:
    v = np.ones(n, dtype=np.complex128)
    if restart:
        ramp = np.arange(1, n + 1, dtype=np.float64)
        v = v + ((-1.0) ** ramp) * ramp / (n * restart)
    return v / np.linalg.norm(v)


def _dominant_hermitian(h: np.ndarray, tol: float, max_iter: int) -> float:
    """Rayleigh value of the eigenvalue of largest magnitude of Hermitian h.

    Returns a signed value.  Raises ConvergenceError on oscillation.
    """
    n = h.shape[0]
    candidates: list[float] = []
    restart = 0
    v = _start_vector(n, 0)
    lam_prev = None
    delta_prev = None
    since_start = 0
    budget = max_iter
    while budget > 0:
        budget -= 1
        since_start += 1
        w = np.einsum("ij,j->i", h, v)
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            # current vector sits in the kernel; try the next start
            candidates.append(0.0)
            restart += 1
            if restart > _MAX_RESTARTS:
                return max(candidates, key=abs)
            v = _start_vector(n, restart)
            lam_prev = delta_prev = None
            since_start = 0
            continue
        lam = float(np.real(np.vdot(v, w)))
        v = w / nw
        if lam_prev is not None:
            delta = abs(lam - lam_prev)
            scale = max(abs(lam), 1e-300)
            if delta == 0.0:
                if since_start > 6:
                    # bitwise stationarity after genuine dynamics: converged
                    candidates.append(lam)
                    return max(candidates, key=abs)
                # instant fixed point: possibly an exact non-dominant
                # eigenvector; challenge with a perturbed start
                candidates.append(lam)
                restart += 1
                if restart > _MAX_RESTARTS:
                    return max(candidates, key=abs)
                v = _start_vector(n, restart)
                lam_prev = delta_prev = None
                since_start = 0
                continue
            if delta_prev is not None and delta <= delta_prev and delta <= tol * scale:
                r = min(delta / delta_prev, 0.999)
                if delta * r / (1.0 - r) <= tol * scale:
                    candidates.append(lam)
                    return max(candidates, key=abs)
            delta_prev = delta
        lam_prev = lam
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} iterations",
        iterations=max_iter,
    )


def _pow2_rescale(entries: np.ndarray) -> tuple[np.ndarray, float]:
    """Divide by a power of two bringing the max magnitude to O(1); exact in
    floating point, keeps extreme inputs away from overflow/denormal range."""
    top = float(np.abs(entries).max())
    if top == 0.0 or not math.isfinite(top):
        return entries, 1.0
    scale = 2.0 ** math.ceil(math.log2(top))
    return entries / scale, scale


def operator_norm_l2(
    a: FiniteMatrix, tol: float = _DEFAULT_TOL, max_iter: int = _MAX_POWER_ITERATIONS
) -> float:
    """Largest singular value, sqrt(lambda_max(A* A)), by power iteration."""
    if tol <= 0:
        raise ParameterError("tol must be positive")
    entries, scale = _pow2_rescale(a.entries)
    h = np.einsum("ki,kj->ij", entries.conj(), entries)
    lam = _dominant_hermitian(h, tol, max_iter)
    return math.sqrt(max(lam, 0.0)) * scale


def eigen_extremes_hermitian(
    h: FiniteMatrix, tol: float = _DEFAULT_TOL, max_iter: int = _MAX_POWER_ITERATIONS
) -> tuple[float, float]:
    """(lambda_min, lambda_max) of a Hermitian matrix.

    The magnitude-dominant eigenvalue comes from power iteration; the other
    extreme from power iteration on the spectrally shifted matrix, which
    avoids a linear solve.
    """
    if tol <= 0:
        raise ParameterError("tol must be positive")
    herm_defect = float(np.abs(h.entries - h.entries.conj().T).max())
    if herm_defect > 1e-12 * max(1.0, float(np.abs(h.entries).max())):
        raise StructuralError(
            f"matrix is not Hermitian within tolerance (defect {herm_defect:.3e})"
        )
    m, scale = _pow2_rescale(h.entries)
    lam1 = _dominant_hermitian(m, tol, max_iter)
    eye = np.eye(h.n)
    if lam1 >= 0:
        lam_max = lam1
        shifted = lam_max * eye - m
        lam_min = lam_max - _dominant_hermitian(shifted, tol, max_iter)
    else:
        lam_min = lam1
        shifted = m - lam_min * eye
        lam_max = lam_min + _dominant_hermitian(shifted, tol, max_iter)
    return lam_min * scale, lam_max * scale


def spectral_radius(
    a: FiniteMatrix, tol: float = _DEFAULT_TOL, max_iter: int = _MAX_POWER_ITERATIONS
) -> float:
    """Magnitude of the dominant eigenvalue by power iteration.

    Uses a deterministic restart schedule: on stagnation the start vector is
    re-mixed with a fixed per-restart perturbation.  Tied dominant
    eigenvalues of equal magnitude (e.g. complex pairs) do not converge and
    raise ConvergenceError.
    """
    if tol <= 0:
        raise ParameterError("tol must be positive")
    n = a.n
    restarts = 4
    budget = max_iter // restarts
    total_iters = 0
    zero_hits = 0
    for restart in range(restarts):
        v = _start_vector(n, restart)
        lam_prev = None
        stable = 0
        dead = False
        for _ in range(budget):
            total_iters += 1
            w = matvec(a, v)
            nw = float(np.linalg.norm(w))
            if nw <= 1e-300:
                # Krylov direction died (nilpotent action on this start)
                zero_hits += 1
                dead = True
                break
            lam_c = complex(np.vdot(v, w))
            lam = abs(lam_c)
            # an eigenvalue estimate counts only once the iterate is close to
            # an actual eigenvector; a rotating pair keeps the residual large
            residual = float(np.linalg.norm(w - lam_c * v))
            v = w / nw
            if (
                lam_prev is not None
                and abs(lam - lam_prev) <= tol * max(lam, 1e-300)
                and residual <= max(100.0 * tol, 1e-9) * nw
            ):
                stable += 1
                if stable >= 3:
                    return float(lam)
            else:
                stable = 0
            lam_prev = lam
        if dead:
            continue
    if zero_hits == restarts:
        return 0.0
    raise ConvergenceError(
        f"spectral radius iteration did not converge in {total_iters} iterations "
        "(tied dominant eigenvalues?)",
        iterations=total_iters,
    )


# ---------------------------------------------------------------------------
# Certified submultiplicativity constants.
#
# Multiplying a family norm by K makes it submultiplicative.  For the schur,
# bgs and jaffard families the alpha-splitting
#     u_alpha(i,j) <= 2^alpha (u_alpha(i,k) + u_alpha(k,j))
# combined with the Hoelder/amalgam estimate
#     sum_k (1+|k|)^(-alpha p') <= (alpha p' + 1)/(alpha p' - 1) =: C^(p')
# gives ||AB|| <= 2^(alpha+1) C ||A|| ||B||, where p' = p/(p-1) and C = 1 in
# the limit p = 1 (p' = inf).  For the beurling family a coarser split over
# |i-k| >= ceil(|k|/2) or |k-j| >= ceil(|k|/2), together with the
# monotonicity bound b(k) <= ||b||_p (2k+1)^(-1/p) for the nonincreasing
# per-offset sups, yields the looser constant
#     K = 2^(alpha+1) 5^(1/p) (C~ + 2^(1/p) C),  C~ = (alpha+1/p+1)/(alpha+1/p-1).
# These constants are intentionally loose; tests verify submultiplicativity,
# not tightness.
# ---------------------------------------------------------------------------


def amalgam_constant(p: float, alpha: float) -> float:
    """C with ||A||_{schur,1,0} <= C ||A||_{schur,p,alpha}; requires
    alpha > 1 - 1/p.  C = 1 for p = 1."""
    _check_params(p, alpha)
    if alpha <= 1.0 - 1.0 / p:
        raise ParameterError(
            f"(p={p}, alpha={alpha}) is not a Banach algebra: need alpha > 1 - 1/p"
        )
    if p == 1:
        return 1.0
    pprime = p / (p - 1.0) if not math.isinf(p) else 1.0
    return ((alpha * pprime + 1.0) / (alpha * pprime - 1.0)) ** (1.0 / pprime)


def normalization_constant(spec: AlgebraSpec) -> float:
    """Certified K >= 1 making K * ||.|| submultiplicative for the family."""
    if spec.family == "op":
        return 1.0
    if not spec.algebra_valid:
        raise ParameterError(
            f"(family={spec.family}, p={spec.p}, alpha={spec.alpha}) is not a "
            "Banach algebra: need alpha > 1 - 1/p"
        )
    p, alpha = spec.p, spec.alpha
    c = amalgam_constant(p, alpha)
    if spec.family in ("schur", "bgs", "jaffard"):
        return 2.0 ** (alpha + 1.0) * c
    # beurling
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    beta = alpha + inv_p
    c_tilde = (beta + 1.0) / (beta - 1.0)
    return 2.0 ** (alpha + 1.0) * 5.0**inv_p * (c_tilde + 2.0**inv_p * c)


def family_norm(a: FiniteMatrix, spec: AlgebraSpec, tol: float = _DEFAULT_TOL) -> float:
    """Dispatch to the family's norm."""
    if spec.family == "schur":
        return schur_norm(a, spec.p, spec.alpha)
    if spec.family == "bgs":
        return bgs_norm(a, spec.p, spec.alpha)
    if spec.family == "beurling":
        return beurling_norm(a, spec.p, spec.alpha)
    if spec.family == "jaffard":
        return jaffard_norm(a, spec.alpha)
    return operator_norm_l2(a, tol)


def inclusion_constant(fine: AlgebraSpec, middle: AlgebraSpec) -> float:
    """Certified C with ||A||_middle <= C ||A||_fine for the supported
    nesting pairs.  Used to validate triplet hypotheses."""
    if fine == middle:
        return 1.0
    if middle.family == "op":
        if fine.family == "op":
            return 1.0
        # Schur test plus weight monotonicity: op <= schur(1,0) <= C * fine
        if fine.family == "schur" and fine.p == 1:
            return 1.0
        return amalgam_constant(fine.p, fine.alpha)
    if (
        fine.family == "schur"
        and middle.family == "schur"
        and middle.p == 1
        and middle.alpha == 0
    ):
        return amalgam_constant(fine.p, fine.alpha)
    raise ParameterError(
        f"no certified inclusion constant for {fine.describe()} -> {middle.describe()}"
    )

"""Differential-subalgebra inequalities: the order formula, the certified
splitting bound for the unweighted Schur norm, sampled Leibniz-type ratios,
triplet composition checks, and the power (Brandenburg-type) condition that
feeds the inversion certificate.

Empirical constants reported here are running maxima over deterministic
seeded samples, i.e. lower bounds on the true constants.  Certified
constants, where derivable, come from explicit formulas instead.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, StructuralError
from .generators import gen_decay, sub_seed
from .matrices import FiniteMatrix, multiply
from .norms import (
    AlgebraSpec,
    amalgam_constant,
    family_norm,
    inclusion_constant,
    normalization_constant,
    operator_norm_l2,
    schur_norm,
)


def differential_order(p: float, alpha: float) -> float:
    """The order (alpha + 1/p - 1)/(alpha + 1/p - 1/2) in (0, 1) at which the
    weighted families are differential subalgebras of the l2 operator
    algebra.  Requires alpha > 1 - 1/p."""
    if not (p >= 1):
        raise ParameterError(f"p must satisfy p >= 1 or p = inf, got {p}")
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    if alpha <= 1.0 - inv_p:
        raise ParameterError(
            f"(p={p}, alpha={alpha}) needs alpha > 1 - 1/p for a differential order"
        )
    return (alpha + inv_p - 1.0) / (alpha + inv_p - 0.5)


def split_radius(a: FiniteMatrix, p: float, alpha: float) -> int:
    """Integer splitting radius for the near/far-diagonal decomposition:
    floor((C * ||A||_{p,alpha} / ||A||_op)^(1/(alpha + 1/2 - 1/p'))), with
    C the amalgam constant.

    The p = 1 case is handled by the limit convention p' = inf (C = 1, all
    (.)^(1/p') factors equal to 1).
    """
    inv_pprime = 0.0 if p == 1 else (1.0 - 1.0 / p if not math.isinf(p) else 1.0)
    c = amalgam_constant(p, alpha)  # validates alpha > 1 - 1/p
    na = schur_norm(a, p, alpha)
    if na == 0.0:
        raise ParameterError("split radius is undefined for the zero matrix")
    nop = operator_norm_l2(a)
    exponent = 1.0 / (alpha + 0.5 - inv_pprime)
    return int(math.floor((c * na / nop) ** exponent))


def certified_amalgam_bound(a: FiniteMatrix, p: float, alpha: float) -> float:
    """Explicit two-term upper bound on the unweighted Schur norm
    ||A||_{schur,1,0}:

        ||A||_op (2 tau + 1)^(1/2)
          + 2^(1/p') (alpha p' - 1)^(-1/p') ||A||_{p,alpha} (tau+1)^(1/p'-alpha)

    with tau the split radius.  The near part is Cauchy-Schwarz against the
    row l2 norm (bounded by the operator norm); the far part is Hoelder with
    an integral tail estimate on the weights.
    """
    tau = split_radius(a, p, alpha)
    inv_pprime = 0.0 if p == 1 else (1.0 - 1.0 / p if not math.isinf(p) else 1.0)
    nop = operator_norm_l2(a)
    na = schur_norm(a, p, alpha)
    near = nop * math.sqrt(2.0 * tau + 1.0)
    if p == 1:
        tail_const = 1.0
    else:
        pprime = 1.0 / inv_pprime
        tail_const = 2.0**inv_pprime * (alpha * pprime - 1.0) ** (-inv_pprime)
    far = tail_const * na * (tau + 1.0) ** (inv_pprime - alpha)
    return near + far


def leibniz_ratio(
    a: FiniteMatrix, b: FiniteMatrix, spec: AlgebraSpec, theta: float
) -> float | None:
    """Ratio ||AB||_A / (||A||_A ||B||_A ((||A||_op/||A||_A)^theta
    + (||B||_op/||B||_A)^theta)) in raw family norms.

    Returns None for a degenerate (zero) operand.  The ratio is exactly
    invariant under positive scalings of either operand.
    """
    na = family_norm(a, spec)
    nb = family_norm(b, spec)
    if na == 0.0 or nb == 0.0:
        return None
    oa = operator_norm_l2(a)
    ob = operator_norm_l2(b)
    nab = family_norm(multiply(a, b), spec)
    return nab / (na * nb * ((oa / na) ** theta + (ob / nb) ** theta))


@dataclass(frozen=True)
class DiffReport:
    """Sampled differential-inequality ratios for one family/order."""

    spec: AlgebraSpec
    theta: float
    sample_count: int
    skipped: int
    max_ratio: float
    argmax_sample: int
    certified_d0: float | None = None
    violations: int = 0

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.describe(),
            "theta": self.theta,
            "sample_count": self.sample_count,
            "skipped": self.skipped,
            "max_ratio": self.max_ratio,
            "argmax_sample": self.argmax_sample,
            "certified_d0": self.certified_d0,
            "violations": self.violations,
        }


def diff_inequality_sample(
    spec: AlgebraSpec,
    theta: float,
    n_samples: int,
    seed: int,
    n: int = 64,
    certified_d0: float | None = None,
    threads: int = 1,
) -> DiffReport:
    """Empirical Leibniz constant: max ratio over seeded sample pairs drawn
    from the decay generator at the spec's alpha.

    Each sample derives its sub-seed from (seed, index), so any thread
    schedule yields an identical report.
    """
    if not spec.algebra_valid:
        raise ParameterError(
            f"spec {spec.describe()} is not a Banach algebra (alpha <= 1 - 1/p)"
        )
    if not (0.0 < theta <= 1.0):
        raise ParameterError(f"theta must lie in (0, 1], got {theta}")
    if n_samples < 1:
        raise ParameterError("n_samples must be >= 1")

    def one(i: int) -> float | None:
        a = gen_decay(n, spec.alpha, sub_seed(seed, 2 * i))
        b = gen_decay(n, spec.alpha, sub_seed(seed, 2 * i + 1))
        return leibniz_ratio(a, b, spec, theta)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            ratios = list(pool.map(one, range(n_samples)))
    else:
        ratios = [one(i) for i in range(n_samples)]

    max_ratio = -math.inf
    argmax = -1
    skipped = 0
    violations = 0
    for i, r in enumerate(ratios):
        if r is None:
            skipped += 1
            continue
        if r > max_ratio:
            max_ratio, argmax = r, i
        if certified_d0 is not None and r > certified_d0:
            violations += 1
    if argmax < 0:
        raise ParameterError("all samples were degenerate")
    return DiffReport(
        spec=spec,
        theta=theta,
        sample_count=n_samples - skipped,
        skipped=skipped,
        max_ratio=max_ratio,
        argmax_sample=argmax,
        certified_d0=certified_d0,
        violations=violations,
    )


@dataclass(frozen=True)
class TripletReport:
    """Empirical constants for the two triplet hypotheses and the composed
    conclusion, plus violations of the implication chain."""

    theta0: float
    theta1: float
    pair_count: int
    d0_empirical: float
    d1_empirical: float
    conclusion_constant: float
    implication_violations: int

    def to_dict(self) -> dict:
        return {
            "theta0": self.theta0,
            "theta1": self.theta1,
            "pair_count": self.pair_count,
            "d0_empirical": self.d0_empirical,
            "d1_empirical": self.d1_empirical,
            "conclusion_constant": self.conclusion_constant,
            "implication_violations": self.implication_violations,
        }


def triplet_check(
    matrices: list[FiniteMatrix],
    fine: AlgebraSpec,
    middle: AlgebraSpec,
    coarse: AlgebraSpec,
    theta0: float,
    theta1: float,
    tol: float = 1e-9,
) -> TripletReport:
    """Evaluate the nested-algebra composition on consecutive sample pairs.

    Hypothesis 1: Leibniz-type inequality of order theta0 between fine and
    middle norms; hypothesis 2: interpolation of the middle norm between fine
    and coarse with exponent theta1.  The conclusion is the Leibniz-type
    inequality of order theta0*theta1 between fine and coarse; its measured
    constant must not exceed D0 * D1^theta0.

    Norm nesting is validated per sample against the certified inclusion
    constants; a violation raises StructuralError.
    """
    if len(matrices) < 2:
        raise ParameterError("need at least one pair of matrices")
    c_fm = inclusion_constant(fine, middle)
    c_mc = inclusion_constant(middle, coarse)

    norms = []
    for idx, x in enumerate(matrices):
        nf = family_norm(x, fine)
        nm = family_norm(x, middle)
        nc = family_norm(x, coarse)
        if nf == 0.0:
            raise ParameterError(f"sample {idx} is the zero matrix")
        if nm > c_fm * nf * (1.0 + tol):
            raise StructuralError(
                f"norm nesting violated at sample {idx}: middle {nm:.6e} > "
                f"{c_fm:.3f} * fine {nf:.6e}"
            )
        if nc > c_mc * nm * (1.0 + tol):
            raise StructuralError(
                f"norm nesting violated at sample {idx}: coarse {nc:.6e} > "
                f"{c_mc:.3f} * middle {nm:.6e}"
            )
        norms.append((nf, nm, nc))

    d1 = max(nm / (nf ** (1.0 - theta1) * nc**theta1) for nf, nm, nc in norms)

    d0 = -math.inf
    dc = -math.inf
    violations = 0
    pair_count = 0
    for k in range(0, len(matrices) - 1, 2):
        a, b = matrices[k], matrices[k + 1]
        (naf, nam, _nac), (nbf, nbm, _nbc) = norms[k], norms[k + 1]
        nab = family_norm(multiply(a, b), fine)
        r0 = nab / (naf * nbf * ((nam / naf) ** theta0 + (nbm / nbf) ** theta0))
        rc = nab / (
            naf
            * nbf
            * (
                (norms[k][2] / naf) ** (theta0 * theta1)
                + (norms[k + 1][2] / nbf) ** (theta0 * theta1)
            )
        )
        d0 = max(d0, r0)
        dc = max(dc, rc)
        # per-sample implication: conclusion ratio <= hyp1 ratio * max(d1 of
        # the two operands)^theta0 <= D0 * D1^theta0
        d1_pair = max(
            norms[k][1] / (naf ** (1.0 - theta1) * norms[k][2] ** theta1),
            norms[k + 1][1] / (nbf ** (1.0 - theta1) * norms[k + 1][2] ** theta1),
        )
        if rc > r0 * d1_pair**theta0 * (1.0 + tol):
            violations += 1
        pair_count += 1

    return TripletReport(
        theta0=theta0,
        theta1=theta1,
        pair_count=pair_count,
        d0_empirical=d0,
        d1_empirical=d1,
        conclusion_constant=dc,
        implication_violations=violations,
    )


# ---------------------------------------------------------------------------
# Power traces and the power condition.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PowerTrace:
    """Log-domain norms of successive powers X^1 .. X^n_max.

    log_family[k] and log_op[k] hold ln ||X^(k+1)|| in the raw family norm
    and the l2 operator norm.  Powers are built by sequential multiplication
    of a power-of-two rescaling of X (exact in floating point), so entries
    never overflow; logs are shifted back.  underflow_at marks the first
    power whose norm underflowed to zero (trace truncated there).
    """

    n_max: int
    log_family: np.ndarray = field(repr=False)
    log_op: np.ndarray = field(repr=False)
    underflow_at: int | None = None

    @property
    def available(self) -> int:
        return len(self.log_family)


def power_trace(
    x: FiniteMatrix,
    spec: AlgebraSpec,
    n_max: int,
    op_upto: int | None = None,
    tol: float = 1e-12,
) -> PowerTrace:
    if n_max < 1:
        raise ParameterError("n_max must be >= 1")
    if op_upto is None:
        op_upto = n_max
    nop = operator_norm_l2(x, tol)
    # exact power-of-two rescale keeping the iterated matrix non-expanding;
    # contractions (nop <= 1) are iterated as-is
    shift = max(0, math.ceil(math.log2(nop))) if nop > 0 else 0
    scale = 2.0**shift
    y = FiniteMatrix(x.window, x.entries / scale)
    log_scale = shift * math.log(2.0)

    log_family = []
    log_op = []
    underflow_at = None
    power = y
    for k in range(1, n_max + 1):
        if k > 1:
            power = multiply(power, y)
        nf = family_norm(power, spec)
        if nf == 0.0:
            underflow_at = k
            break
        log_family.append(math.log(nf) + k * log_scale)
        if k <= op_upto:
            no = operator_norm_l2(power, tol)
            if no == 0.0:
                underflow_at = k
                log_family.pop()
                break
            log_op.append(math.log(no) + k * log_scale)
    return PowerTrace(
        n_max=n_max,
        log_family=np.asarray(log_family),
        log_op=np.asarray(log_op),
        underflow_at=underflow_at,
    )


def power_condition_max(
    trace: PowerTrace,
    m: int,
    theta: float,
    ladder: str = "cofactor",
    log_k: float = 0.0,
) -> tuple[float, list[int]]:
    """max over ladder powers j of the log-ratio

        ln ||X^(mj)|| - (m - theta) ln ||X^j|| - theta ln ||X^j||_op,

    family norms shifted by log_k (= ln K for renormalized norms).  Returns
    (log max ratio, ladder used).  Ratios are formed entirely in the log
    domain, so high powers cannot overflow.
    """
    avail_f = trace.available
    avail_o = len(trace.log_op)
    if ladder == "cofactor":
        js = [j for j in range(1, avail_f // m + 1) if j <= avail_o]
    elif ladder == "geometric":
        js, j = [], 1
        while j * m <= avail_f and j <= avail_o:
            js.append(j)
            j *= m
    else:
        raise ParameterError(f"unknown ladder {ladder!r}")
    if not js:
        return 0.0, []
    best = -math.inf
    for j in js:
        lf_mj = trace.log_family[m * j - 1] + log_k
        lf_j = trace.log_family[j - 1] + log_k
        lo_j = trace.log_op[j - 1]
        best = max(best, lf_mj - (m - theta) * lf_j - theta * lo_j)
    return best, js


@dataclass(frozen=True)
class PowerRow:
    n: int
    log_norm_family: float
    log_norm_op: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "norm_family": math.exp(self.log_norm_family)
            if self.log_norm_family < 700
            else math.inf,
            "log_norm_family": self.log_norm_family,
            "norm_op": math.exp(self.log_norm_op) if self.log_norm_op < 700 else math.inf,
            "log_norm_op": self.log_norm_op,
        }


@dataclass(frozen=True)
class PowerReport:
    """Empirical power-condition constant and the per-power norm table."""

    m: int
    theta: float
    d_empirical: float
    ladder: str
    ladder_powers: list[int]
    renormalized: bool
    rows: list[PowerRow]
    underflow_at: int | None

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "theta": self.theta,
            "d_empirical": self.d_empirical,
            "ladder": self.ladder,
            "ladder_powers": self.ladder_powers,
            "renormalized": self.renormalized,
            "underflow_at": self.underflow_at,
            "rows": [r.to_dict() for r in self.rows],
        }


def brandenburg_estimate(
    a: FiniteMatrix,
    spec: AlgebraSpec,
    m: int,
    theta: float,
    n_max: int,
    ladder: str = "cofactor",
    renormalize: bool = False,
    tol: float = 1e-12,
) -> PowerReport:
    """Empirical constant for the m-th power condition
    ||X^m|| <= D ||X||^(m-theta) ||X||_op^theta, maximized over a power
    ladder of A.

    ladder="cofactor" scans every power j <= n_max/m (the set the digit
    recursion consumes, making downstream digit bounds self-consistent);
    ladder="geometric" scans only j in {1, m, m^2, ...}.  With
    renormalize=True the family norms carry the certified submultiplicativity
    factor K, matching the normalized setting of the inversion engine.
    """
    if m < 2:
        raise ParameterError(f"m must be >= 2, got {m}")
    if not (0.0 < theta <= m - 1.0):
        raise ParameterError(f"theta must lie in (0, m-1], got {theta}")
    if n_max < m:
        raise ParameterError(f"n_max must be >= m, got {n_max}")
    log_k = math.log(normalization_constant(spec)) if renormalize else 0.0
    trace = power_trace(a, spec, n_max, tol=tol)
    log_d, js = power_condition_max(trace, m, theta, ladder, log_k)
    rows = [
        PowerRow(
            n=k + 1,
            log_norm_family=float(trace.log_family[k] + log_k),
            log_norm_op=float(trace.log_op[k]),
        )
        for k in range(len(trace.log_op))
    ]
    return PowerReport(
        m=m,
        theta=theta,
        d_empirical=math.exp(log_d),
        ladder=ladder,
        ladder_powers=js,
        renormalized=renormalize,
        rows=rows,
        underflow_at=trace.underflow_at,
    )

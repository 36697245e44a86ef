"""Exact walk evolution in the (2k+1)-dimensional invariant subspace.

The uniform superpositions over the overlap classes span a subspace that
is closed under both tessellation reflections and under the marked-class
phase flip.  Everything the search algorithm does to the full state can
therefore be reproduced with (2k+1)x(2k+1) real matrices, which makes the
success probability computable exactly for arbitrarily large n.

The module also evaluates the closed-form spectrum of the reduced walk
operator u = u_beta @ u_alpha (eigenphases, overlaps of its eigenvectors
with the marked class vector), the principal phase of u^t2 * R, and the
optimal step counts the spectrum predicts.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .combinatorics import ProblemParams, class_basis, class_fraction

MODE_CLOSED = "closed"
MODE_EXACT = "exact"


def nearest_int(x: float) -> int:
    """Round to nearest, halves away from zero (positive arguments)."""
    if x < 0:
        raise ValueError(f"expected nonnegative, got {x}")
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class ReducedWalk:
    """Reflection matrices on the overlap-class basis and their product.

    u_alpha and u_beta are real symmetric involutions; r_matrix flips the
    sign of the marked class (k, 0), which sits at the last basis
    position.  u = u_beta @ u_alpha is one full walk step.
    """

    u_alpha: np.ndarray
    u_beta: np.ndarray
    r_matrix: np.ndarray
    u: np.ndarray


def build_reduced_walk(params: ProblemParams) -> ReducedWalk:
    """Populate the reduced reflection matrices from their entry formulas.

    Within each subset-overlap level ell, u_alpha mixes j=0 with j=1 using
    the weight (k-ell)/(n-r); u_beta couples (ell, 0) with (ell-1, 1)
    using the weight (ell+j)/(r+1) of the shared polygon level.
    """
    n, k, r = params.n, params.k, params.r
    basis = class_basis(k)
    pos = {c: i for i, c in enumerate(basis)}
    dim = 2 * k + 1

    ua = np.zeros((dim, dim))
    for ell, j in basis:
        c = (k - ell) / (n - r)
        ua[pos[ell, j], pos[ell, j]] = (-1) ** j * (1 - 2 * c)
        partner = (ell, j ^ 1)
        if partner in pos:
            ua[pos[partner], pos[ell, j]] = 2 * math.sqrt(c * (1 - c))

    ub = np.zeros((dim, dim))
    for ell, j in basis:
        d = (ell + j) / (r + 1)
        ub[pos[ell, j], pos[ell, j]] = (-1) ** j * (1 - 2 * d)
        partner = (ell + 1, 0) if j == 1 else (ell - 1, 1)
        if partner in pos:
            ub[pos[partner], pos[ell, j]] = 2 * math.sqrt(d * (1 - d))

    rmat = np.eye(dim)
    rmat[-1, -1] = -1.0
    return ReducedWalk(u_alpha=ua, u_beta=ub, r_matrix=rmat, u=ub @ ua)


def initial_reduced_state(params: ProblemParams) -> np.ndarray:
    """Uniform full-space state expressed on the class basis.

    Amplitude at (ell, j) is sqrt(class_size / vertex_count); unit norm by
    the partition identity.
    """
    fracs = [class_fraction(params, c) for c in class_basis(params.k)]
    return np.array([math.sqrt(float(f)) for f in fracs], dtype=complex)


def evolve_reduced(
    walk: ReducedWalk, state: np.ndarray, t1: int, t2: int
) -> np.ndarray:
    """Apply (u^t2 R) t1 times: phase flip first, then t2 walk steps."""
    if t1 < 0 or t2 < 0:
        raise ValueError("step counts must be nonnegative")
    u_t2 = np.linalg.matrix_power(walk.u, t2)
    v = np.asarray(state, dtype=complex).copy()
    for _ in range(t1):
        v = u_t2 @ (walk.r_matrix @ v)
    return v


def success_probability(params: ProblemParams, t1: int, t2: int) -> float:
    """Probability of measuring a marked vertex after the full evolution."""
    walk = build_reduced_walk(params)
    final = evolve_reduced(walk, initial_reduced_state(params), t1, t2)
    return float(abs(final[-1]) ** 2)


def probability_series(params: ProblemParams, t2: int, t_max: int) -> np.ndarray:
    """Marked-class probability after t = 1..t_max main-block iterations."""
    walk = build_reduced_walk(params)
    step = np.linalg.matrix_power(walk.u, t2) @ walk.r_matrix
    v = initial_reduced_state(params)
    out = np.empty(t_max)
    for t in range(t_max):
        v = step @ v
        out[t] = abs(v[-1]) ** 2
    return out


def eigenphases(params: ProblemParams) -> np.ndarray:
    """Positive eigenphases phi_1 < ... < phi_k of the walk operator u.

    cos(phi_m) = 1 - 2m(n - m + 1) / ((r+1)(n-r)) for m = 1..k; the full
    spectrum of u is {1} plus the k conjugate pairs exp(+-i phi_m).
    """
    n, k, r = params.n, params.k, params.r
    cos_vals = [1 - 2 * m * (n - m + 1) / ((r + 1) * (n - r)) for m in range(1, k + 1)]
    if any(c < -1 - 1e-12 or c > 1 + 1e-12 for c in cos_vals):
        raise ValueError(f"eigenphase cosine outside [-1, 1]: {cos_vals}")
    return np.arccos(np.clip(cos_vals, -1.0, 1.0))


def marked_class_overlaps(params: ProblemParams) -> np.ndarray:
    """Overlaps of the eigenvectors of u with the marked class vector.

    Entry n is the (positive, by phase convention) overlap for the
    eigenvector with eigenphase phi_n; entry 0 belongs to the stationary
    eigenvector, which coincides with the uniform initial state.
    """
    n, k, r = params.n, params.k, params.r
    out = np.empty(k + 1)

    f0 = Fraction(1)
    for i in range(k):
        f0 *= Fraction(r - i, n - i)
    out[0] = math.sqrt(float(f0))

    for m in range(1, k):
        num = Fraction(math.comb(k, m))
        for i in range(m):
            num *= n - r - i
        for i in range(m, k):
            num *= r - i
        den = Fraction(1)
        for i in range(m - 1, 2 * m - 1):
            den *= n - i
        for i in range(2 * m, k + m):
            den *= n - i
        out[m] = math.sqrt(0.5 * float(num / den))

    num = Fraction(1)
    for i in range(k):
        num *= n - r - i
    den = Fraction(1)
    for i in range(k - 1, 2 * k - 1):
        den *= n - i
    out[k] = math.sqrt(0.5 * float(Fraction(num, den)))
    return out


def completeness_sum(params: ProblemParams) -> float:
    """overlap_0^2 + 2 sum_n overlap_n^2; equals 1 by eigenbasis completeness."""
    ov = marked_class_overlaps(params)
    return float(ov[0] ** 2 + 2 * np.sum(ov[1:] ** 2))


def principal_phase(params: ProblemParams, t2: int) -> tuple[float, float]:
    """Closed-form principal phase lam of u^t2 R and the spectral sum b.

    b = sum_n overlap_n^2 / (1 - cos(t2 phi_n)); lam = overlap_0 / sqrt(b).
    Raises when some denominator 1 - cos(t2 phi_n) degenerates.
    """
    phis = eigenphases(params)
    ov = marked_class_overlaps(params)
    dens = 1.0 - np.cos(t2 * phis)
    if np.any(dens < 1e-14):
        raise ValueError(f"degenerate denominator 1 - cos(t2*phi) at t2={t2}")
    b = float(np.sum(ov[1:] ** 2 / dens))
    lam = float(ov[0] / math.sqrt(b))
    return lam, b


def principal_phase_numeric(params: ProblemParams, t2: int) -> float:
    """Smallest positive eigenphase of u^t2 R from dense diagonalization."""
    walk = build_reduced_walk(params)
    mat = np.linalg.matrix_power(walk.u, t2) @ walk.r_matrix
    angles = np.angle(np.linalg.eigvals(mat))
    return float(np.min(np.abs(angles)))


def principal_eigenvector_overlaps(params: ProblemParams, t2: int) -> tuple[float, float]:
    """|<marked|lam>| and |<initial|lam>| from the numeric eigenvector.

    Validation-only quantities: asymptotically 1/(2 sqrt(2 b)) and
    1/sqrt(2) respectively.
    """
    walk = build_reduced_walk(params)
    mat = np.linalg.matrix_power(walk.u, t2) @ walk.r_matrix
    w, vecs = np.linalg.eig(mat)
    angles = np.angle(w)
    pick = np.argmin(np.where(angles > 1e-12, angles, np.inf))
    v = vecs[:, pick]
    psi0 = initial_reduced_state(params)
    return float(abs(v[-1])), float(abs(np.vdot(psi0, v)))


def step_parameters(params: ProblemParams, mode: str = MODE_CLOSED) -> tuple[int, int]:
    """Main-block repetitions t1 and walk steps per block t2.

    closed: t1 = round(pi sqrt(r) / 4), t2 = round(pi sqrt(r) / (2 sqrt(k))).
    exact:  t2 = round(pi / phi_k), then t1 = round(pi / (2 lam)) with lam
    the closed-form principal phase at that t2.
    """
    r, k = params.r, params.k
    if mode == MODE_CLOSED:
        return (
            nearest_int(math.pi * math.sqrt(r) / 4),
            nearest_int(math.pi * math.sqrt(r) / (2 * math.sqrt(k))),
        )
    if mode == MODE_EXACT:
        phis = eigenphases(params)
        t2 = nearest_int(math.pi / phis[-1])
        lam, _ = principal_phase(params, t2)
        t1 = nearest_int(math.pi / (2 * lam))
        return t1, t2
    raise ValueError(f"unknown mode {mode!r}")


def gap_constant(k: int) -> float:
    """Coefficient of the leading 1/r^(1/k) deficit in the success probability."""
    x = (math.pi / 2) * math.sqrt((k - 1) / k)
    return k / math.tan(x) ** 2


def asymptotic_success(params: ProblemParams) -> float:
    """Two-term large-r success probability, clamped to [0, 1]."""
    p = 1.0 - gap_constant(params.k) / params.r ** (1.0 / params.k)
    return min(1.0, max(0.0, p))


@dataclass(frozen=True)
class SpectralData:
    """Everything the spectrum predicts for one parameter set.

    lam and b are evaluated at t2_exact; p_succ_predicted is the peak
    1/(4b) of the sinusoidal probability profile, clamped to 1 (small
    frames push the raw peak above 1, where the profile is only a guide);
    lambda_ratio records the small-phase assumption lam << t2 * phi_1
    behind the closed forms.
    """

    phis: np.ndarray
    overlaps: np.ndarray
    t1_closed: int
    t2_closed: int
    t1_exact: int
    t2_exact: int
    lam: float
    lam_exact: float
    b: float
    p_succ_predicted: float
    lambda_ratio: float


def compute_spectral_data(params: ProblemParams) -> SpectralData:
    phis = eigenphases(params)
    overlaps = marked_class_overlaps(params)
    t1_c, t2_c = step_parameters(params, MODE_CLOSED)
    t1_e, t2_e = step_parameters(params, MODE_EXACT)
    lam, b = principal_phase(params, t2_e)
    lam_exact = principal_phase_numeric(params, t2_e)
    return SpectralData(
        phis=phis,
        overlaps=overlaps,
        t1_closed=t1_c,
        t2_closed=t2_c,
        t1_exact=t1_e,
        t2_exact=t2_e,
        lam=lam,
        lam_exact=lam_exact,
        b=b,
        p_succ_predicted=min(1.0, 1.0 / (4.0 * b)),
        lambda_ratio=float(lam / (t2_e * phis[0])),
    )


def numeric_eigenphase_multiset(params: ProblemParams) -> np.ndarray:
    """Sorted phases of the numerically diagonalized walk operator u."""
    walk = build_reduced_walk(params)
    return np.sort(np.angle(np.linalg.eigvals(walk.u)))


def predicted_eigenphase_multiset(params: ProblemParams) -> np.ndarray:
    """Sorted {0} + {+-phi_n} multiset implied by the closed forms."""
    phis = eigenphases(params)
    return np.sort(np.concatenate([[0.0], phis, -phis]))


def numeric_marked_overlaps(params: ProblemParams) -> np.ndarray:
    """|<marked|psi_n>| for n = 0..k via dense eigendecomposition of u.

    Matches each predicted eigenphase to the numerically nearest
    eigenvalue on the unit circle; requires a nondegenerate spectrum.
    """
    walk = build_reduced_walk(params)
    w, vecs = np.linalg.eig(walk.u)
    phis = eigenphases(params)
    out = np.empty(params.k + 1)
    for m in range(params.k + 1):
        target = cmath.exp(1j * (phis[m - 1] if m > 0 else 0.0))
        pick = int(np.argmin(np.abs(w - target)))
        out[m] = abs(vecs[-1, pick])
    return out

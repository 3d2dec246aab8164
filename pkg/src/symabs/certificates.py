"""Certificate checks and the constants they yield.

Everything a verified abstraction rests on lives here: the matrix
inequalities for the two system families, class-K-infinity comparison
functions, incremental quadratic-constraint spot checks, the stability
constants derived from a certificate, and the admissible lattice radius
for a requested output precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .dynamics import IqcSystem
from .errors import (
    BadRange,
    DimensionMismatch,
    Infeasible,
    NegativeInput,
    NotPositiveDefinite,
)
from .numerics import DEFAULT_TOL, NsdVerdict, as_matrix, eig_extremes, nsd_check, spectral_norm


# ---------------------------------------------------------------------------
# class-K-infinity comparison functions


@dataclass(frozen=True)
class MonomialKInf:
    """x -> coeff * x**power on [0, inf); power >= 1 keeps the inverse
    subadditive, which the feasibility conditions rely on."""

    coeff: float
    power: float

    def __post_init__(self):
        if not (math.isfinite(self.coeff) and self.coeff > 0.0):
            raise BadRange(f"coeff must be finite and positive, got {self.coeff}")
        if not (math.isfinite(self.power) and self.power >= 1.0):
            raise BadRange(f"power must be >= 1, got {self.power}")

    def forward(self, x: float) -> float:
        if x < 0.0:
            raise NegativeInput(f"argument must be nonnegative, got {x}")
        return self.coeff * x**self.power

    def inverse(self, y: float) -> float:
        if y < 0.0:
            raise NegativeInput(f"argument must be nonnegative, got {y}")
        return (y / self.coeff) ** (1.0 / self.power)


def kinf_eval(f: MonomialKInf, x: float, direction: str = "forward") -> float:
    if direction == "forward":
        return f.forward(x)
    if direction == "inverse":
        return f.inverse(x)
    raise BadRange(f"direction must be 'forward' or 'inverse', got {direction!r}")


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class PrecisionSpec:
    epsilon: float
    rho: float

    def __post_init__(self):
        if not (math.isfinite(self.epsilon) and self.epsilon > 0.0):
            raise BadRange(f"epsilon must be finite and positive, got {self.epsilon}")
        if not (math.isfinite(self.rho) and self.rho > 0.0):
            raise BadRange(f"rho must be finite and positive, got {self.rho}")


def _positive_definite(P, tol: float, name: str) -> np.ndarray:
    P = as_matrix(P, name)
    ext = eig_extremes(P, tol)
    if ext.lambda_min <= tol:
        raise NotPositiveDefinite(f"{name}: lambda_min = {ext.lambda_min:.3e} is not > tol")
    return P


@dataclass(frozen=True)
class SineCertificate:
    P: np.ndarray
    R: np.ndarray
    alpha: float
    m_gain: float

    def __post_init__(self):
        P = _positive_definite(self.P, DEFAULT_TOL, "P")
        R = as_matrix(self.R, "R")
        if R.shape != P.shape:
            raise DimensionMismatch(f"R must match P, got {R.shape} vs {P.shape}")
        if not (math.isfinite(self.alpha) and self.alpha > 0.0):
            raise BadRange(f"alpha must be finite and positive, got {self.alpha}")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "m_gain", float(self.m_gain))


@dataclass(frozen=True)
class IqcCertificate:
    P: np.ndarray
    L: np.ndarray
    alpha: float
    M: np.ndarray

    def __post_init__(self):
        P = _positive_definite(self.P, DEFAULT_TOL, "P")
        L = as_matrix(self.L, "L")
        M = as_matrix(self.M, "M")
        if L.shape[1] != P.shape[0]:
            raise DimensionMismatch(f"L must have {P.shape[0]} columns, got {L.shape}")
        if M.shape[0] != M.shape[1]:
            raise DimensionMismatch(f"M must be square, got {M.shape}")
        if float(np.max(np.abs(M - M.T))) > DEFAULT_TOL:
            raise DimensionMismatch("M must be symmetric")
        if not (math.isfinite(self.alpha) and self.alpha > 0.0):
            raise BadRange(f"alpha must be finite and positive, got {self.alpha}")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "alpha", float(self.alpha))


# ---------------------------------------------------------------------------
# matrix inequalities


def _assemble_sine(P: np.ndarray, R: np.ndarray, alpha: float, m_gain: float, A: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    eye = np.eye(n)
    tl = A.T @ P + P @ A + 2.0 * R + 2.0 * alpha * P + m_gain**2 * eye
    return np.block([[tl, P], [P, -eye]])


def assemble_lmi_sine(cert: SineCertificate, A) -> np.ndarray:
    A = as_matrix(A, "A")
    if A.shape != cert.P.shape:
        raise DimensionMismatch(f"A must match P, got {A.shape} vs {cert.P.shape}")
    return _assemble_sine(cert.P, cert.R, cert.alpha, cert.m_gain, A)


def check_lmi_sine(cert: SineCertificate, A, tol: float = DEFAULT_TOL) -> NsdVerdict:
    """Negative-semidefiniteness of the sine-feedback certificate block."""
    return nsd_check(assemble_lmi_sine(cert, A), tol)


def _assemble_iqc(
    P: np.ndarray,
    L: np.ndarray,
    alpha: float,
    M: np.ndarray,
    sys: IqcSystem,
) -> np.ndarray:
    n, l_e, l_p = sys.n, sys.l_e, sys.l_p
    a_cl = sys.A + sys.B @ L
    top = np.block(
        [
            [P @ a_cl + a_cl.T @ P + 2.0 * alpha * P, P @ sys.E],
            [sys.E.T @ P, np.zeros((l_e, l_e))],
        ]
    )
    stack = np.block([[sys.C_q, sys.D_q], [np.zeros((l_e, n)), np.eye(l_e)]])
    return top + stack.T @ M @ stack


def assemble_lmi_iqc(cert: IqcCertificate, sys: IqcSystem) -> np.ndarray:
    if cert.P.shape[0] != sys.n:
        raise DimensionMismatch(f"P must be {sys.n}x{sys.n}, got {cert.P.shape}")
    if cert.L.shape != (sys.input_dim, sys.n):
        raise DimensionMismatch(
            f"L must be {sys.input_dim}x{sys.n}, got {cert.L.shape}"
        )
    if cert.M.shape[0] != sys.l_p + sys.l_e:
        raise DimensionMismatch(
            f"M must have size {sys.l_p + sys.l_e}, got {cert.M.shape}"
        )
    return _assemble_iqc(cert.P, cert.L, cert.alpha, cert.M, sys)


def check_lmi_iqc(cert: IqcCertificate, sys: IqcSystem, tol: float = DEFAULT_TOL) -> NsdVerdict:
    """Negative-semidefiniteness of the interconnection certificate block."""
    return nsd_check(assemble_lmi_iqc(cert, sys), tol)


def _alpha_boundary(
    assemble: Callable[[float], np.ndarray],
    tol: float,
    bisect_tol: float,
    alpha_cap: float,
) -> float:
    def holds(alpha: float) -> bool:
        return nsd_check(assemble(alpha), tol).holds

    lo = bisect_tol
    if not holds(lo):
        raise Infeasible("inequality infeasible for every positive alpha")
    hi = max(1.0, 4.0 * lo)
    while holds(hi):
        hi *= 2.0
        if hi > alpha_cap:
            raise BadRange(f"feasibility did not break below alpha = {alpha_cap:g}")
    while hi - lo > bisect_tol:
        mid = 0.5 * (lo + hi)
        if holds(mid):
            lo = mid
        else:
            hi = mid
    return lo


def max_feasible_alpha_sine(
    P,
    R,
    A,
    m_gain: float,
    tol: float = DEFAULT_TOL,
    bisect_tol: float = 1e-9,
    alpha_cap: float = 1e6,
) -> float:
    """Largest decay rate for which the sine-feedback inequality holds,
    holding P and R fixed. Raises Infeasible if none exists."""
    P = _positive_definite(P, tol, "P")
    R = as_matrix(R, "R")
    A = as_matrix(A, "A")
    return _alpha_boundary(
        lambda alpha: _assemble_sine(P, R, alpha, m_gain, A), tol, bisect_tol, alpha_cap
    )


def max_feasible_alpha_iqc(
    P,
    L,
    M,
    sys: IqcSystem,
    tol: float = DEFAULT_TOL,
    bisect_tol: float = 1e-9,
    alpha_cap: float = 1e6,
) -> float:
    """Largest decay rate for the interconnection inequality with P, L, M fixed."""
    P = _positive_definite(P, tol, "P")
    L = as_matrix(L, "L")
    M = as_matrix(M, "M")
    return _alpha_boundary(
        lambda alpha: _assemble_iqc(P, L, alpha, M, sys), tol, bisect_tol, alpha_cap
    )


# ---------------------------------------------------------------------------
# incremental quadratic constraints


def lipschitz_delta_mm(ell: float, l_p: int, l_e: int) -> np.ndarray:
    """Multiplier encoding ||p(q2) - p(q1)|| <= ell * ||q2 - q1||."""
    if not (math.isfinite(ell) and ell > 0.0):
        raise BadRange(f"Lipschitz constant must be finite and positive, got {ell}")
    if l_p < 1 or l_e < 1:
        raise DimensionMismatch("multiplier block sizes must be positive")
    top = np.hstack([ell**2 * np.eye(l_p), np.zeros((l_p, l_e))])
    bottom = np.hstack([np.zeros((l_e, l_p)), -np.eye(l_e)])
    return np.vstack([top, bottom])


@dataclass(frozen=True)
class DeltaQcReport:
    holds: bool
    pairs_checked: int
    witness_q1: np.ndarray | None = None
    witness_q2: np.ndarray | None = None
    form_value: float | None = None


def delta_qc_sample_check(
    p: Callable[[np.ndarray], np.ndarray],
    M,
    pairs: Sequence[tuple],
    tol: float = DEFAULT_TOL,
) -> DeltaQcReport:
    """Spot-check the incremental constraint on the given sample pairs.

    For each pair the stacked increment z = (q2 - q1, p(q2) - p(q1)) must
    satisfy z' M z >= -tol; the first violation is returned as a witness.
    A clean pass is evidence, not proof.
    """
    M = as_matrix(M, "M")
    if M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"M must be square, got {M.shape}")
    size = M.shape[0]
    count = 0
    for q1, q2 in pairs:
        q1 = np.atleast_1d(np.asarray(q1, dtype=float))
        q2 = np.atleast_1d(np.asarray(q2, dtype=float))
        dq = q2 - q1
        dp = np.atleast_1d(np.asarray(p(q2), dtype=float)) - np.atleast_1d(
            np.asarray(p(q1), dtype=float)
        )
        z = np.concatenate([dq, dp])
        if z.shape[0] != size:
            raise DimensionMismatch(
                f"stacked increment has length {z.shape[0]}, multiplier expects {size}"
            )
        form = float(z @ M @ z)
        count += 1
        if form < -tol:
            return DeltaQcReport(
                holds=False,
                pairs_checked=count,
                witness_q1=q1,
                witness_q2=q2,
                form_value=form,
            )
    return DeltaQcReport(holds=True, pairs_checked=count)


# ---------------------------------------------------------------------------
# derived stability constants


@dataclass(frozen=True)
class GpsConstants:
    """Constants derived from a certificate (P, L, alpha) and a Young
    parameter ``a`` in (0, 2*alpha).

    Along certified runs the squared weighted error V = e' P e obeys
    dV/dt <= -k V + lhat_norm * eta^2 / a, which yields the trajectory
    bound  d(t) <= beta_coeff * exp(-beta_rate * t) * d(0) +
    practical_offset  on the distance to the diagonal.
    """

    a: float
    k: float
    lhat_norm: float
    K1: float
    beta_coeff: float
    beta_rate: float
    practical_offset: float
    gamma: float
    sigma_bound: float
    omega_bound: float
    eta: float


def _young_rate(alpha: float, a: float) -> float:
    if not (math.isfinite(alpha) and alpha > 0.0):
        raise BadRange(f"alpha must be finite and positive, got {alpha}")
    if not (math.isfinite(a) and 0.0 < a < 2.0 * alpha):
        raise BadRange(f"a must lie in (0, {2.0 * alpha}), got {a}")
    k = 2.0 * alpha - a
    if k < 1e-9:
        raise BadRange(f"residual rate k = {k:g} is numerically zero")
    return k


def gps_constants(P, B, L, alpha: float, a: float, eta: float) -> GpsConstants:
    """Derive the trajectory-bound constants for gain ``L`` fed through ``B``."""
    k = _young_rate(alpha, a)
    if not (math.isfinite(eta) and eta > 0.0):
        raise BadRange(f"eta must be finite and positive, got {eta}")
    P = _positive_definite(P, DEFAULT_TOL, "P")
    B = as_matrix(B, "B")
    L = as_matrix(L, "L")
    if B.shape[0] != P.shape[0] or L.shape != (B.shape[1], P.shape[0]):
        raise DimensionMismatch(
            f"inconsistent shapes: P {P.shape}, B {B.shape}, L {L.shape}"
        )
    ext = eig_extremes(P)
    lhat = spectral_norm(L.T @ B.T @ P @ B @ L)
    ratio = ext.lambda_max / ext.lambda_min
    drift = lhat / (a * k * ext.lambda_min)
    return GpsConstants(
        a=a,
        k=k,
        lhat_norm=lhat,
        K1=math.sqrt(ratio + drift),
        beta_coeff=math.sqrt(ratio),
        beta_rate=alpha - 0.5 * a,
        practical_offset=(math.sqrt(drift) + 1.0) * eta,
        gamma=k,
        sigma_bound=lhat * eta**2 / a,
        omega_bound=eta,
        eta=eta,
    )


def eta_bound_closed_form(P, B, L, C_out, alpha: float, a: float, epsilon: float) -> float:
    """Largest lattice radius guaranteeing output error ``epsilon``.

    Closed form: with k = 2*alpha - a, s = a*k and lhat = ||L'B'PBL||,

        eta <= (epsilon / ||C_out||) * sqrt(s * lmin(P))
               / (sqrt(s * lmin(P)) + sqrt(s * lmax(P) + lhat)).
    """
    k = _young_rate(alpha, a)
    if not (math.isfinite(epsilon) and epsilon > 0.0):
        raise BadRange(f"epsilon must be finite and positive, got {epsilon}")
    P = _positive_definite(P, DEFAULT_TOL, "P")
    ext = eig_extremes(P)
    lhat = spectral_norm(as_matrix(L, "L").T @ as_matrix(B, "B").T @ P @ B @ L)
    rho = spectral_norm(C_out)
    if rho <= 0.0:
        raise BadRange("output matrix must be nonzero")
    s = a * k
    lo = math.sqrt(s * ext.lambda_min)
    hi = math.sqrt(s * ext.lambda_max + lhat)
    return (epsilon / rho) * lo / (lo + hi)


def eta_feasible(
    prec: PrecisionSpec,
    alpha_lo: MonomialKInf,
    alpha_hi: MonomialKInf,
    gamma: float | None = None,
    sigma: MonomialKInf | None = None,
    tol: float = 1e-9,
) -> float:
    """Largest lattice radius satisfying the comparison-function condition.

    Without a disturbance model the requirement is

        alpha_lo^{-1}(alpha_hi(eta)) + eta < epsilon / rho,

    and with one (``gamma`` and ``sigma`` given, disturbance magnitude
    equal to eta) the right side loses alpha_lo^{-1}(sigma(eta) / gamma)
    and sigma(eta) < gamma * alpha_lo(epsilon / rho) must hold as well.
    Both sides are monotone in eta, so bisection to ``tol`` is exact.
    """
    if (gamma is None) != (sigma is None):
        raise BadRange("gamma and sigma must be supplied together")
    if gamma is not None and not (math.isfinite(gamma) and gamma > 0.0):
        raise BadRange(f"gamma must be finite and positive, got {gamma}")
    target = prec.epsilon / prec.rho

    def admissible(eta: float) -> bool:
        lhs = alpha_lo.inverse(alpha_hi.forward(eta)) + eta
        if gamma is not None:
            lhs += alpha_lo.inverse(sigma.forward(eta) / gamma)
            if sigma.forward(eta) >= gamma * alpha_lo.forward(target):
                return False
        return lhs < target

    if not (math.isfinite(tol) and tol > 0.0):
        raise BadRange(f"tol must be finite and positive, got {tol}")
    lo = tol
    if not admissible(lo):
        raise Infeasible("no lattice radius above tol satisfies the condition")
    hi = max(1.0, 4.0 * lo)
    while admissible(hi):
        hi *= 2.0
        if hi > 1e30:
            raise BadRange("feasibility did not break; condition appears unbounded")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if admissible(mid):
            lo = mid
        else:
            hi = mid
    return lo

"""Closed-form metric families for the complexified Bose-Hubbard matrices.

All expressions assume c = 0, v = 1.  They are kept in unsimplified algebraic
form (products of square roots included); the recurrence in
:mod:`cbhmetric.dieudonne` is the independent check on every entry.

Families
--------
zero_param
    Every free first-row real part set to zero; Theta -> I as gamma -> 0.
chessboard
    Im Theta_ij = 0 for i+j even, Re Theta_ij = 0 for i+j odd.  Free real
    parameters sit in first-row columns 3, 5, ... (``y``, ``w`` at N = 5, 6).
delta_rule
    N = 3: beta = 0, delta = -gamma.  N = 4: beta = kappa = 0 and
    delta = -sqrt(3) (gamma + nu gamma^3) / (nu + 1).
linearized
    I - 2 gamma Ly.
general
    Arbitrary first-row real parts (closed form up to N = 5).
"""

from __future__ import annotations

import warnings

import numpy as np

from .dieudonne import (
    MetricCandidate,
    MetricParams,
    first_row_solution,
    linearized_metric,
    make_candidate,
    _warn_near_ep,
)
from .errors import InvalidParams, OutOfValidityRange, UnknownFamily
from .hamiltonian import cbh

NAMED_FAMILIES = ("general", "zero_param", "chessboard", "delta_rule", "linearized")

S2 = np.sqrt(2.0)
S3 = np.sqrt(3.0)
S5 = np.sqrt(5.0)
S6 = np.sqrt(6.0)

# Upper ends of the positivity interval for the parameter-free members.
GAMMA_MAX = {
    ("zero_param", 2): 1.0,
    ("zero_param", 3): 1 / np.sqrt(2.0),
    ("zero_param", 4): 1 / np.sqrt(2.0),
    ("zero_param", 5): 0.5 * np.sqrt(np.sqrt(5.0) - 1),
    ("zero_param", 6): 0.5,
    ("delta_rule", 3): 1.0,
    ("delta_rule", 4): 1.0,
}


def _hermitian_from_upper(U):
    U = np.array(U, dtype=complex)
    return np.triu(U) + np.triu(U, 1).conj().T


def theta2(gamma, beta=0.0):
    return np.array([[1, beta + 1j * gamma], [beta - 1j * gamma, 1]], dtype=complex)


def theta3(gamma, beta=0.0, delta=0.0):
    G = S2 * gamma
    return np.array(
        [
            [1, beta + 1j * G, delta + 1j * G * beta],
            [beta - 1j * G, 1 + delta + G**2, beta + 1j * G],
            [delta - 1j * G * beta, beta - 1j * G, 1],
        ],
        dtype=complex,
    )


def theta4(gamma, beta=0.0, delta=0.0, kappa=0.0):
    g = gamma
    rho = 1 / 3 * (4 * g**2 * S3 + S3 + 2 * delta) * S3
    x = S3 * g
    z = 2 * g * beta
    u = 2 * g**3 + 2 * g + g * delta / S3
    y = g * (2 * g**2 + S3 * delta)
    tau = (4 * g**2 * beta + 2 * beta + S3 * kappa) / S3
    a12, a13, a14 = beta + 1j * x, delta + 1j * z, kappa + 1j * y
    return _hermitian_from_upper(
        [
            [1, a12, a13, a14],
            [0, rho, tau + 1j * u, a13],
            [0, 0, rho, a12],
            [0, 0, 0, 1],
        ]
    )


def theta5(gamma, X=0.0, Y=0.0, Z=0.0, W=0.0):
    g = gamma
    x = 2 * g
    y = S6 * g * X
    z = 1 / 3 * g * (3 * Y + 2 * g**2 * S6) * S6
    v = 4 * g**3 * X + 3 * X * g + g * Z
    w = v + g * Z - 3 * X * g
    u = 1 / 6 * g * (6 + 12 * g**2 + S6 * Y) * S6
    U = 2 * g**2 * S6 * X + 1 / 2 * S6 * X + 1 / 2 * S6 * Z
    V = W + g**2 * S6 * Y + 4 * g**4 + 1 / 2 * S6 * Y
    R = 1 + 1 / 2 * S6 * Y + 6 * g**2
    T = 1 / 6 * (4 * Y + 8 * g**2 * S6 + 8 * g**4 * S6 + 8 * g**2 * Y + S6 + S6 * W) * S6
    a12, a13, a14, a15 = X + 1j * x, Y + 1j * y, Z + 1j * z, W + 1j * w
    return _hermitian_from_upper(
        [
            [1, a12, a13, a14, a15],
            [0, R, U + 1j * u, V + 1j * v, a14],
            [0, 0, T, U + 1j * u, a13],
            [0, 0, 0, R, a12],
            [0, 0, 0, 0, 1],
        ]
    )


def chessboard5(gamma, y=0.0, w=0.0):
    g = gamma
    x = 2 * g
    z = S6 * y * g + 4 * g**3
    u = y * g + g * S6 + 2 * S6 * g**3
    v = S6 * y * g**2 + 4 * g**4 + 1 / 2 * y * S6 + w
    rho = 6 * g**2 + 1 + 1 / 2 * y * S6
    tau = 1 + w + (4 * y + 8 * y * g**2) / S6 + 8 * g**2 + 8 * g**4
    return _hermitian_from_upper(
        [
            [1, 1j * x, y, 1j * z, w],
            [0, rho, 1j * u, v, 1j * z],
            [0, 0, tau, 1j * u, y],
            [0, 0, 0, rho, 1j * x],
            [0, 0, 0, 0, 1],
        ]
    )


def chessboard6(gamma, y=0.0, w=0.0):
    g = gamma
    x = S5 * g
    z = 2 * S5 * g**3 * S2 + 3 * y * g
    mu = 16 * g**5 + 2 * g**3 * S2 * S5 * y + S5 * w * g
    u = 2 * g * S2 - 6 / 5 * S5 * y * g + 3 / 5 * (2 * S5 * g**3 * S2 + 3 * y * g) * S5
    zeta = (
        2 / 5 * S2 * (2 * S5 * g**3 * S2 + 3 * y * g) * S5
        + 3 / 5 * S5 * w * g
        + 16 * g**5
        + 2 * g**3 * S2 * S5 * y
    )
    sigma = (
        3 * g
        - 6 / 5 * S2 * S5 * y * g
        + 3 / 5 * S2 * (2 * S5 * g**3 * S2 + 3 * y * g) * S5
        - 2 / 5 * g**2 * S2 * (2 * S5 * g**3 * S2 + 3 * y * g) * S5
        + 1 / 5 * S5 * w * g
        + 16 * g**5
        + 2 * g**3 * S2 * S5 * y
    )
    rho = 8 * g**2 + 1 + 2 / 5 * S5 * y * S2
    tau = (
        3 / 5 * S5 * y * S2
        + 12 * g**2
        - 6 / 5 * S2 * S5 * y * g**2
        + 6 / 5 * S2 * g * (2 * S5 * g**3 * S2 + 3 * y * g) * S5
        + 1
        + 3 / 5 * w * S5
    )
    v = 4 / 5 * g * (2 * S5 * g**3 * S2 + 3 * y * g) * S5 + 3 / 5 * y * S5 + 2 / 5 * S5 * w * S2
    return _hermitian_from_upper(
        [
            [1, 1j * x, y, 1j * z, w, 1j * mu],
            [0, rho, 1j * u, v, 1j * zeta, w],
            [0, 0, tau, 1j * sigma, v, 1j * z],
            [0, 0, 0, tau, 1j * u, y],
            [0, 0, 0, 0, rho, 1j * x],
            [0, 0, 0, 0, 0, 1],
        ]
    )


def delta_of_gamma(gamma, nu=1):
    """delta(gamma) = -sqrt(3) (gamma + nu gamma^3) / (nu + 1) for the N = 4 rule."""
    return -S3 * (gamma + nu * gamma**3) / (nu + 1)


def closed_form_general(N: int, gamma: float, first_row_real) -> np.ndarray:
    """Closed-form general solution for N <= 5 (first_row_real[0] must be 1)."""
    row = np.asarray(first_row_real, dtype=float)
    if len(row) != N or row[0] != 1.0:
        raise InvalidParams("first row must have length N and start with 1")
    if N == 2:
        return theta2(gamma, row[1])
    if N == 3:
        return theta3(gamma, row[1], row[2])
    if N == 4:
        return theta4(gamma, row[1], row[2], row[3])
    if N == 5:
        return theta5(gamma, *row[1:])
    raise InvalidParams(f"no closed-form general metric for N={N}")


def chessboard_row(N: int, free=()) -> np.ndarray:
    """First-row real parts of the chessboard family; ``free`` fills columns 3, 5, ..."""
    slots = list(range(2, N, 2))
    free = list(free)
    if len(free) > len(slots):
        raise InvalidParams(f"chessboard at N={N} has {len(slots)} free parameters")
    row = np.zeros(N)
    row[0] = 1.0
    for k, val in zip(slots, free):
        row[k] = val
    return row


def _check_range(family, N, gamma):
    upper = GAMMA_MAX.get((family, N), 1.0)
    if not 0 <= abs(gamma) < upper:
        warnings.warn(
            f"gamma = {gamma} outside the positivity interval of {family} (N={N}, < {upper:.6g})",
            OutOfValidityRange,
            stacklevel=3,
        )


def named_family(N: int, family: str, gamma: float, **options) -> MetricCandidate:
    """Metric candidate of a named family at strength ``gamma``.

    Options
    -------
    nu : int
        delta_rule at N = 4 (default 1).
    y, w : float
        chessboard free parameters at N = 5, 6; at N = 3, 4 ``y`` is delta.
    params : MetricParams or sequence
        required for ``general``.

    Closed forms cover 2 <= N <= 6 (``general`` up to 5); larger N falls back
    to the recurrence for zero_param, chessboard and general.
    """
    if family not in NAMED_FAMILIES:
        raise UnknownFamily(f"unknown family {family!r}; choose from {NAMED_FAMILIES}")
    if N < 2:
        raise InvalidParams("N must be at least 2")
    _warn_near_ep(gamma)
    H = cbh(N, gamma)

    if family == "linearized":
        return linearized_metric(N, gamma)

    if family == "general":
        if "params" not in options:
            raise InvalidParams("family 'general' needs params=")
        p = options["params"]
        p = p if isinstance(p, MetricParams) else MetricParams(tuple(p))
        if p.N != N:
            raise InvalidParams("parameter vector length differs from N")
        theta = closed_form_general(N, gamma, p.first_row_real) if N <= 5 else \
            first_row_solution(H, p.as_array())
        return make_candidate(H, theta, "general", p, gamma, {"params": list(p.first_row_real)})

    if family == "zero_param":
        _check_range(family, N, gamma)
        if N == 2:
            theta = theta2(gamma)
        elif N == 3:
            theta = theta3(gamma)
        elif N == 4:
            theta = theta4(gamma)
        elif N == 5:
            theta = chessboard5(gamma)
        elif N == 6:
            theta = chessboard6(gamma)
        else:
            theta = first_row_solution(H, MetricParams.zero(N).as_array())
        return make_candidate(H, theta, "zero_param", MetricParams.zero(N), gamma)

    if family == "chessboard":
        y = float(options.get("y", 0.0))
        w = float(options.get("w", 0.0))
        free = [y, w]
        row = chessboard_row(N, free[: len(range(2, N, 2))])
        if y == 0.0 and w == 0.0:
            _check_range("zero_param", N, gamma)
        if N == 2:
            theta = theta2(gamma)
        elif N == 3:
            theta = theta3(gamma, 0.0, y)
        elif N == 4:
            theta = theta4(gamma, 0.0, y, 0.0)
        elif N == 5:
            theta = chessboard5(gamma, y, w)
        elif N == 6:
            theta = chessboard6(gamma, y, w)
        else:
            theta = first_row_solution(H, row)
        return make_candidate(H, theta, "chessboard", MetricParams(tuple(row)), gamma,
                              {"y": y, "w": w})

    # delta_rule
    _check_range(family, N, gamma)
    if N == 3:
        theta = theta3(gamma, 0.0, -gamma)
        opts = {}
        row = (1.0, 0.0, -gamma)
    elif N == 4:
        nu = options.get("nu", 1)
        delta = delta_of_gamma(gamma, nu)
        theta = theta4(gamma, 0.0, delta, 0.0)
        opts = {"nu": nu}
        row = (1.0, 0.0, delta, 0.0)
    else:
        raise UnknownFamily(f"delta_rule is defined for N = 3 and N = 4, not N={N}")
    return make_candidate(H, theta, "delta_rule", MetricParams(row), gamma, opts)


def family_matrix(family: str, N: int, gamma: float, options=None) -> np.ndarray:
    """Matrix of a named family with range warnings silenced (for sweeps)."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return named_family(N, family, gamma, **(options or {})).matrix

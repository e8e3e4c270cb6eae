"""Smooth reverse-engineered controls from a polynomial displacement ansatz.

Instead of kicks, the displacement is prescribed as a degree-N polynomial
in ``t/T`` whose first two derivatives vanish at both ends (so the control
starts and ends at zero) and whose integral matches the pulse-area
identity.  Those seven conditions leave ``N - 6`` free coefficients, over
which the loss cost - a quadratic form with the Hilbert-type matrix
``Q[n, m] = 1/(n + m + 1)`` - is minimized.

Everything up to and including the KKT solve runs in exact rational
arithmetic: coefficients are stored as rationals in units of ``pi/T`` and
the cost as a rational in units of ``pi^2 gamma / T``.  The Hilbert block
reaches condition numbers around 1e16 at N = 12, so floats are trusted
only for evaluating the resulting control, never for solving for it.  A
float re-solve of the same KKT system is kept available as a
cross-check (:func:`solve_polynomial_float`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import ControlSignal, DegreeRangeError, SmoothPiece

MIN_DEGREE = 7   # seven constraints leave no freedom below this
MAX_DEGREE = 12

_NUM_CONSTRAINTS = 7
_NUM_DEPENDENT = 4  # coefficients a3..a6 tied to the free ones


def _check_degree(degree: int) -> None:
    if not MIN_DEGREE <= degree <= MAX_DEGREE:
        raise DegreeRangeError(
            f"degree must lie in [{MIN_DEGREE}, {MAX_DEGREE}], got {degree}"
        )


def _raw_constraints(degree: int):
    """Constraint rows over a0..aN with coefficients in units of pi/T.

    Rows: a0 = a1 = a2 = 0; value, slope and curvature zero at the final
    time; displacement integral equal to -1 (units pi/T times T).
    """
    n_cols = degree + 1
    rows = [[Fraction(0)] * n_cols for _ in range(_NUM_CONSTRAINTS)]
    rhs = [Fraction(0)] * _NUM_CONSTRAINTS
    for j in range(3):
        rows[j][j] = Fraction(1)
    for n in range(n_cols):
        rows[3][n] = Fraction(1)
        rows[4][n] = Fraction(n)
        rows[5][n] = Fraction(n * (n - 1))
        rows[6][n] = Fraction(1, n + 1)
    rhs[6] = Fraction(-1)
    return rows, rhs


def _solve_linear_rational(matrix, rhs):
    """Gauss-Jordan elimination over Fractions."""
    n = len(matrix)
    aug = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular rational system")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [aug[i][n] for i in range(n)]


@dataclass(frozen=True)
class ConstraintSystem:
    """Equality constraints in reduced form.

    ``matrix`` (7 x (N+1)) and ``rhs`` express the constraints as
    ``matrix @ a = rhs`` with the coefficients measured in units of
    ``pi/T``: an identity block pins a0..a2 to zero and a second identity
    block expresses a3..a6 through the free coefficients via
    ``a_dep = dependent_map @ a_free + dependent_rhs``.
    """

    degree: int
    duration: float
    matrix: tuple[tuple[Fraction, ...], ...]
    rhs: tuple[Fraction, ...]
    dependent_map: tuple[tuple[Fraction, ...], ...]
    dependent_rhs: tuple[Fraction, ...]

    @property
    def rank(self) -> int:
        return _NUM_CONSTRAINTS

    def rhs_values(self) -> np.ndarray:
        """Numeric right-hand side, with the pi/T unit applied."""
        unit = math.pi / self.duration
        return np.array([float(x) * unit for x in self.rhs])

    def dependent_rhs_values(self) -> np.ndarray:
        unit = math.pi / self.duration
        return np.array([float(x) * unit for x in self.dependent_rhs])


def build_equality_constraints(degree: int, duration: float) -> ConstraintSystem:
    """Boundary and area conditions on the displacement coefficients.

    The four relations tying a3..a6 to the free coefficients are obtained
    by exact elimination of the raw conditions; their rank is seven for
    every admissible degree.
    """
    _check_degree(degree)
    if duration <= 0:
        raise ValueError(f"duration must be positive, got {duration}")
    rows, rhs = _raw_constraints(degree)
    # Eliminate the dependent block: M4 a_dep = -N4 a_free + d
    dep_cols = range(3, 3 + _NUM_DEPENDENT)
    free_cols = range(3 + _NUM_DEPENDENT, degree + 1)
    m4 = [[rows[r][c] for c in dep_cols] for r in range(3, _NUM_CONSTRAINTS)]
    n4 = [[rows[r][c] for c in free_cols] for r in range(3, _NUM_CONSTRAINTS)]
    d4 = [rhs[r] for r in range(3, _NUM_CONSTRAINTS)]
    n_free = len(list(free_cols))
    dep_map = []
    for j in range(n_free):
        col = _solve_linear_rational(m4, [-n4[r][j] for r in range(_NUM_DEPENDENT)])
        dep_map.append(col)
    dep_rhs = _solve_linear_rational(m4, d4)
    dependent_map = tuple(
        tuple(dep_map[j][i] for j in range(n_free)) for i in range(_NUM_DEPENDENT)
    )
    # Reduced matrix: [I3 0 0; 0 I4 -dependent_map], rhs (0, 0, 0, dep_rhs)
    reduced = [[Fraction(0)] * (degree + 1) for _ in range(_NUM_CONSTRAINTS)]
    red_rhs = [Fraction(0)] * _NUM_CONSTRAINTS
    for j in range(3):
        reduced[j][j] = Fraction(1)
    for i in range(_NUM_DEPENDENT):
        reduced[3 + i][3 + i] = Fraction(1)
        for j in range(n_free):
            reduced[3 + i][3 + _NUM_DEPENDENT + j] = -dependent_map[i][j]
        red_rhs[3 + i] = dep_rhs[i]
    return ConstraintSystem(
        degree=degree,
        duration=duration,
        matrix=tuple(tuple(row) for row in reduced),
        rhs=tuple(red_rhs),
        dependent_map=dependent_map,
        dependent_rhs=tuple(dep_rhs),
    )


@dataclass(frozen=True)
class PolynomialControl:
    """Displacement polynomial with minimal loss cost.

    ``coefficients[n]`` is the exact rational value of the n-th
    displacement coefficient in units of ``pi/T``; ``cost`` is the exact
    minimal quadratic-form value in units of ``pi^2 gamma / T``.  The
    rationals are duration-independent; ``duration`` is kept for
    evaluation.
    """

    degree: int
    duration: float
    coefficients: tuple[Fraction, ...]
    cost: Fraction

    def shape_coefficients(self) -> np.ndarray:
        """Float displacement coefficients (units of pi/T applied)."""
        unit = math.pi / self.duration
        return np.array([float(c) * unit for c in self.coefficients])

    def displacement(self, t):
        s = np.asarray(t, float) / self.duration
        reduced = [float(x) for x in _exact_polydiv(list(self.coefficients), _TRIPLE_BUMP)]
        bump = s**3 * (1.0 - s) ** 3
        return (
            math.pi / self.duration
            * bump
            * np.polynomial.polynomial.polyval(s, np.asarray(reduced))
        )

    def closed_form_cost(self, gamma: float) -> float:
        return float(self.cost) * math.pi**2 * gamma / self.duration

    def control_coefficients(self, gamma: float) -> np.ndarray:
        """Coefficients of the control polynomial in powers of ``t/T``.

        The control recovers the prescribed displacement through
        ``u = -y/2 - gamma*y' - 2*y''``; with vanishing end conditions its
        area is ``pi/2`` for every decay rate (the damping term integrates
        to zero).
        """
        a = self.shape_coefficients()
        T = self.duration
        n = len(a)
        out = np.zeros(n)
        for m in range(n):
            val = -0.5 * a[m]
            if m + 1 < n:
                val -= gamma * (m + 1) * a[m + 1] / T
            if m + 2 < n:
                val -= 2.0 * (m + 2) * (m + 1) * a[m + 2] / T**2
            out[m] = val
        return out

    def to_json_dict(self) -> dict:
        return {
            "degree": self.degree,
            "duration": self.duration,
            "coefficients": [
                {"num": c.numerator, "den": c.denominator} for c in self.coefficients
            ],
            "cost": {"num": self.cost.numerator, "den": self.cost.denominator},
        }


def _kkt_system(degree: int):
    rows, rhs = _raw_constraints(degree)
    m = degree + 1
    size = m + _NUM_CONSTRAINTS
    kkt = [[Fraction(0)] * size for _ in range(size)]
    kkt_rhs = [Fraction(0)] * size
    for i in range(m):
        for j in range(m):
            kkt[i][j] = Fraction(2, i + j + 1)
        for r in range(_NUM_CONSTRAINTS):
            kkt[i][m + r] = rows[r][i]
            kkt[m + r][i] = rows[r][i]
    for r in range(_NUM_CONSTRAINTS):
        kkt_rhs[m + r] = rhs[r]
    return kkt, kkt_rhs


def solve_polynomial(degree: int, duration: float) -> PolynomialControl:
    """Minimize the loss quadratic form under the equality constraints.

    The KKT system of the constrained minimization is solved exactly over
    the rationals; the returned coefficients and cost are exact.
    """
    _check_degree(degree)
    if duration <= 0:
        raise ValueError(f"duration must be positive, got {duration}")
    kkt, rhs = _kkt_system(degree)
    sol = _solve_linear_rational(kkt, rhs)
    coeffs = tuple(sol[: degree + 1])
    cost = sum(
        coeffs[i] * coeffs[j] * Fraction(1, i + j + 1)
        for i in range(degree + 1)
        for j in range(degree + 1)
    )
    return PolynomialControl(
        degree=degree, duration=duration, coefficients=coeffs, cost=cost
    )


def _exact_polydiv(numerator, denominator):
    """Exact rational polynomial division (ascending powers, zero remainder)."""
    num = list(numerator)
    dd = len(denominator) - 1
    out = [Fraction(0)] * (len(num) - dd)
    for i in range(len(num) - 1 - dd, -1, -1):
        c = num[i + dd] / denominator[dd]
        out[i] = c
        for j in range(dd + 1):
            num[i + j] -= c * denominator[j]
    if any(x != 0 for x in num):
        raise ValueError("polynomial division left a remainder")
    return out

# s^3 (1-s)^3 and (1-s)^4, ascending powers
_TRIPLE_BUMP = [Fraction(0)] * 3 + [Fraction(1), Fraction(-3), Fraction(3), Fraction(-1)]
_ONE_MINUS_S4 = [Fraction(1), Fraction(-4), Fraction(6), Fraction(-4), Fraction(1)]


@dataclass(frozen=True)
class FactoredControlForm:
    """Numerically stable evaluation of a polynomial-derived control.

    The boundary conditions force the displacement to factor as
    ``amp * s^3 (1-s)^3 p(s)`` with ``s = t/duration``; evaluating through
    that factorization (instead of the raw monomial coefficients, whose
    huge alternating values cancel to ~1e-9 noise) keeps pointwise errors
    near machine precision and makes the endpoint zeros exact.  The
    running control integral likewise splits as ``s^4 q(s)`` near the
    start and ``1 - (1-s)^4 r(s)`` near the end, so the accumulated
    mixing angle hits exactly ``pi/2`` at the final time.
    """

    duration: float
    gamma: float
    p: tuple[float, ...]
    q: tuple[float, ...]
    r: tuple[float, ...]

    def _displacement_parts(self, s):
        """(y, y') at scaled time s, in absolute units."""
        pv = np.polynomial.polynomial.polyval
        amp = math.pi / self.duration
        one = 1.0 - s
        w = s**3 * one**3
        dw = 3.0 * s**2 * one**2 * (1.0 - 2.0 * s)
        p = pv(s, np.asarray(self.p))
        dp = pv(s, np.polynomial.polynomial.polyder(np.asarray(self.p)))
        y = amp * w * p
        yd = amp / self.duration * (dw * p + w * dp)
        return y, yd, (w, dw, p, dp, one)

    def value(self, t):
        scalar = np.isscalar(t)
        s = np.atleast_1d(np.asarray(t, float)) / self.duration
        y, yd, (w, dw, p, dp, one) = self._displacement_parts(s)
        pv = np.polynomial.polynomial.polyval
        ddw = 6.0 * s * one * (1.0 - 5.0 * s + 5.0 * s**2)
        ddp = pv(s, np.polynomial.polynomial.polyder(np.asarray(self.p), 2))
        amp = math.pi / self.duration
        ydd = amp / self.duration**2 * (ddw * p + 2.0 * dw * dp + w * ddp)
        u = -0.5 * y - self.gamma * yd - 2.0 * ydd
        return float(u[0]) if scalar else u.reshape(np.shape(t))

    def _running_integral(self, t):
        """Control integral from time 0 (exactly pi/2 at the duration)."""
        s = np.atleast_1d(np.asarray(t, float)) / self.duration
        pv = np.polynomial.polynomial.polyval
        lower = s <= 0.5
        cumulative = np.where(
            lower,
            s**4 * pv(s, np.asarray(self.q)),
            1.0 - (1.0 - s) ** 4 * pv(s, np.asarray(self.r)),
        )
        y, yd, _ = self._displacement_parts(s)
        return math.pi / 2.0 * cumulative - self.gamma * y - 2.0 * yd

    def integral(self, t0, t):
        scalar = np.isscalar(t)
        out = self._running_integral(t) - self._running_integral(t0)
        return float(out[0]) if scalar else out.reshape(np.shape(t))

    def to_json_dict(self) -> dict:
        return {
            "duration": self.duration,
            "gamma": self.gamma,
            "p": list(self.p),
            "q": list(self.q),
            "r": list(self.r),
        }


def factored_form(poly: PolynomialControl, gamma: float) -> FactoredControlForm:
    """Build the stable factored evaluator for a solved displacement."""
    coeffs = list(poly.coefficients)
    p = _exact_polydiv(coeffs, _TRIPLE_BUMP)
    running = [Fraction(0)] + [c / (i + 1) for i, c in enumerate(coeffs)]
    if sum(running) != -1:
        raise ValueError("displacement integral does not match the area identity")
    normalized = [-x for x in running]  # cumulative, ends at 1
    if any(x != 0 for x in normalized[:4]):
        raise ValueError("cumulative integral lacks its quadruple root at 0")
    q = normalized[4:]  # strip the s^4 factor
    complement = [Fraction(1) - normalized[0]] + [-x for x in normalized[1:]]
    r = _exact_polydiv(complement, _ONE_MINUS_S4)
    return FactoredControlForm(
        duration=poly.duration,
        gamma=gamma,
        p=tuple(float(x) for x in p),
        q=tuple(float(x) for x in q),
        r=tuple(float(x) for x in r),
    )


def solve_polynomial_float(degree: int, duration: float) -> np.ndarray:
    """Float re-solve of the same KKT system (conditioning cross-check).

    Returns the displacement coefficients in units of ``pi/T``.  Kept as a
    separate route from :func:`solve_polynomial` on purpose: comparing the
    two quantifies how much accuracy the Hilbert-type block costs in
    floating point.
    """
    _check_degree(degree)
    kkt, rhs = _kkt_system(degree)
    a = np.array([[float(x) for x in row] for row in kkt])
    b = np.array([float(x) for x in rhs])
    sol = np.linalg.solve(a, b)
    return sol[: degree + 1]


def polynomial_control_signal(
    poly: PolynomialControl, gamma: float
) -> ControlSignal:
    """Impulse-free control signal realizing the polynomial displacement."""
    piece = SmoothPiece(0.0, poly.duration, form=factored_form(poly, gamma))
    return ControlSignal(duration=poly.duration, impulses=(), pieces=(piece,))

"""Special functions of circle-pattern theory and single-kite geometry.

The central object is the half-angle function ``f_theta``: for two circles
with radii r0, r1 meeting at exterior intersection angle theta, the kite
spanned by the two centers and the two intersection points has half-angle
f_theta(log r1 - log r0) at the center of circle 0.  Everything else here
is its derivative, inverse, antiderivative (a dilogarithm), its complex
extension to circles crossing the unit-disc boundary, and the hyperbolic
angle functions built from it.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .dilog import im_dilog_exp
from .errors import BranchCut, DomainError

_BRANCH_TOL = 1e-12


def _check_theta(theta):
    if not (0.0 < theta < math.pi):
        raise DomainError(f"intersection angle {theta!r} not in (0, pi)")


def f_theta(theta, x):
    """Kite half-angle at log-radius difference x; strictly increasing in x.

    Computed branch-safely as atan2(e^x sin(theta), 1 - e^x cos(theta)),
    with values in (0, pi - theta).  For x beyond the exp overflow range the
    functional equation f(x) + f(-x) = pi - theta supplies the value.
    """
    _check_theta(theta)
    if x > 700.0:
        return math.pi - theta - f_theta(theta, -x)
    e = math.exp(x)
    return math.atan2(e * math.sin(theta), 1.0 - e * math.cos(theta))


def f_theta_prime(theta, x):
    """Derivative sin(theta) / (2 (cosh x - cos(theta))) > 0."""
    _check_theta(theta)
    return math.sin(theta) / (2.0 * (math.cosh(x) - math.cos(theta)))


def f_theta_inv(theta, y):
    """Inverse of f_theta: log(sin y / sin(y + theta)) for y in (0, pi-theta)."""
    _check_theta(theta)
    if not (0.0 < y < math.pi - theta):
        raise DomainError(f"half-angle {y!r} not in (0, pi - theta)")
    return math.log(math.sin(y) / math.sin(y + theta))


def big_F_theta(theta, x):
    """Antiderivative of f_theta vanishing at -infinity: Im Li2(e^(x+i theta))."""
    _check_theta(theta)
    return im_dilog_exp(x, theta)


# vectorized forms used by the solvers --------------------------------------

def f_theta_vec(theta, x):
    theta = np.asarray(theta, dtype=float)
    x = np.asarray(x, dtype=float)
    xs = np.minimum(x, 700.0)
    e = np.exp(xs)
    val = np.arctan2(e * np.sin(theta), 1.0 - e * np.cos(theta))
    big = x > 700.0
    if np.any(big):
        eneg = np.exp(-x[big])
        tb = np.broadcast_to(theta, x.shape)[big]
        val = np.array(val)
        val[big] = np.pi - tb - np.arctan2(eneg * np.sin(tb), 1.0 - eneg * np.cos(tb))
    return val


def f_theta_prime_vec(theta, x):
    theta = np.asarray(theta, dtype=float)
    x = np.asarray(x, dtype=float)
    return np.sin(theta) / (2.0 * (np.cosh(x) - np.cos(theta)))


# complex extension ----------------------------------------------------------

def _f_complex_left(theta, z):
    # Valid for Re z <= 0: both log arguments stay in the right half plane,
    # so the principal logs give the analytic continuation.
    a = cmath.log(1.0 - cmath.exp(z - 1j * theta))
    b = cmath.log(1.0 - cmath.exp(z + 1j * theta))
    return (a - b) / 2j


def f_theta_complex(theta, x, beta):
    """Analytic continuation of f_theta to x + i*beta, beta in [0, pi).

    The continuation is cut along {x = 0, beta >= theta}; evaluation there
    raises BranchCut.  On the right half-strip the functional equation
    f(z) + f(-z) = pi - theta defines the value.
    """
    _check_theta(theta)
    if not (0.0 <= beta < math.pi):
        raise DomainError(f"boundary angle {beta!r} not in [0, pi)")
    if abs(x) <= _BRANCH_TOL and beta >= theta - _BRANCH_TOL:
        raise BranchCut(f"evaluation point ({x}, {beta}) lies on the cut of f_theta")
    if x <= 0.0:
        return _f_complex_left(theta, complex(x, beta))
    return (math.pi - theta) - _f_complex_left(theta, complex(-x, -beta))


def phi_hyp(theta, rho0, rho1):
    """Angle at center 0 of the hyperbolic triangle (center0, center1, crossing).

    Arguments are log-tanh-half hyperbolic radii, both negative.
    """
    _check_theta(theta)
    if rho0 >= 0.0 or rho1 >= 0.0:
        raise DomainError("hyperbolic variables must be negative")
    return f_theta(theta, rho1 - rho0) - f_theta(theta, rho1 + rho0)


def phi_hyp_d1(theta, rho0, rho1):
    """Partial derivative of phi_hyp in rho1; positive for rho0 < 0."""
    _check_theta(theta)
    return f_theta_prime(theta, rho1 - rho0) - f_theta_prime(theta, rho1 + rho0)


def phi_gen(theta, rho, beta):
    """Angle at a hyperbolic circle against a circle crossing the disc boundary.

    Equal to f_theta(i*beta - rho) - f_theta(i*beta + rho); evaluated through
    the real closed form atan2(-sinh(rho) sin(theta),
    cos(beta) - cosh(rho) cos(theta)), whose branch lands in (0, pi).
    """
    _check_theta(theta)
    if rho >= 0.0:
        raise DomainError("hyperbolic variable must be negative")
    if not (0.0 <= beta < math.pi):
        raise DomainError(f"boundary angle {beta!r} not in [0, pi)")
    return math.atan2(-math.sinh(rho) * math.sin(theta),
                      math.cos(beta) - math.cosh(rho) * math.cos(theta))


def phi_gen_drho(theta, rho, beta):
    """Partial derivative of phi_gen in rho (negative of half the F'' form)."""
    _check_theta(theta)
    num = math.cosh(rho) * math.cos(beta) - math.cos(theta)
    den = num * num + (math.sinh(rho) * math.sin(beta)) ** 2
    return -math.sin(theta) * num / den


def big_F_beta_theta(beta, theta, x):
    """Boundary potential for an edge into a circle crossing the disc boundary.

    Even in x; its x-derivative is -2 phi_gen(theta, x, beta).  Evaluated by
    the eight-term dilogarithm combination; for beta >= theta the principal
    dilogarithm sits on or across its cut and the value needs a linear
    correction (-2*pi*x above the cut, -pi*x exactly on it), checked against
    quadrature of the defining integral.
    """
    _check_theta(theta)
    if not (0.0 <= beta < math.pi):
        raise DomainError(f"boundary angle {beta!r} not in [0, pi)")
    x = -abs(x)
    s = 0.0
    for sb in (1.0, -1.0):
        s += im_dilog_exp(x, sb * beta + theta)
        s -= im_dilog_exp(x, sb * beta - theta)
        s -= im_dilog_exp(-x, sb * beta - theta)
        s += im_dilog_exp(-x, sb * beta + theta)
    val = 0.5 * s
    if beta > theta:
        val -= 2.0 * math.pi * x
    elif beta == theta:
        val -= math.pi * x
    return val


def big_F_beta_theta_dxx(beta, theta, x):
    """Second x-derivative of the boundary potential (closed form).

    Positive exactly where cosh(x) cos(beta) > cos(theta); its sign at x = 0
    is the convexity certificate cos(theta) < cos(beta).
    """
    _check_theta(theta)
    num = math.cosh(x) * math.cos(beta) - math.cos(theta)
    den = num * num + (math.sinh(x) * math.sin(beta)) ** 2
    return 2.0 * math.sin(theta) * num / den


# kite geometry --------------------------------------------------------------

@dataclass(frozen=True)
class KiteGeometry:
    """Metric data of the kite spanned by two intersecting circles.

    L is the center distance (white diagonal), H the distance between the
    two intersection points (black diagonal).  H/L equals twice the
    derivative of the half-angle function, which is also the conductance
    attached to the edge.
    """

    theta: float
    r0: float
    r1: float
    L: float
    H: float
    half_angle0: float
    half_angle1: float
    convex: bool


def kite(theta, r0, r1):
    """Build the kite for radii r0, r1 and exterior intersection angle theta."""
    _check_theta(theta)
    if r0 <= 0.0 or r1 <= 0.0:
        raise DomainError("kite radii must be positive")
    c = math.cos(theta)
    L = math.sqrt(r0 * r0 + r1 * r1 - 2.0 * r0 * r1 * c)
    H = 2.0 * r0 * r1 * math.sin(theta) / L
    x = math.log(r1) - math.log(r0)
    h0 = f_theta(theta, x)
    h1 = f_theta(theta, -x)
    convex = (r1 / r0 >= c) and (r0 / r1 >= c)
    return KiteGeometry(theta, r0, r1, L, H, h0, h1, convex)


def kite_L_vec(theta, r0, r1):
    c = np.cos(theta)
    return np.sqrt(r0 * r0 + r1 * r1 - 2.0 * r0 * r1 * c)

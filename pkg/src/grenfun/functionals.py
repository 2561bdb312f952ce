"""Plug-in functionals of a step density.

Integrals of h(f(x)) and g(f(x), x) against Lebesgue measure reduce to
finite sums over the density pieces; only the x-dependent case needs
quadrature.  The identity between the carrier-measure average and the
empirical average of h(f(X_i)) is a structural property of the Grenander
fit and is asserted as a test invariant, not enforced here.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InputError, NumericError
from .grenander import StepDensity, evaluate
from .samples import Sample, default_stream

_VALIDATION_SEED = 0x5EED5
_REL_TOL_DERIV = 1e-4
_QUAD_REL_TOL = 1e-10
_MAX_REFINE = 10


def _apply(fn, arr):
    """Evaluate a scalar-or-vectorized callable on an array."""
    try:
        out = np.asarray(fn(arr), dtype=float)
        if out.shape == arr.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([float(fn(float(z))) for z in arr])


def _central_diff(fn, z, step):
    return (float(fn(z + step)) - float(fn(z - step))) / (2.0 * step)


def _check_derivative(fn, claimed, points, what, second_arg=None):
    """Compare a claimed derivative against central differences."""
    for z in points:
        step = 6e-6 * max(1.0, abs(z))
        if second_arg is None:
            est = _central_diff(fn, z, step)
            given = float(claimed(z))
        else:
            est = _central_diff(lambda t: fn(t, second_arg), z, step)
            given = float(claimed(z, second_arg))
        if abs(est - given) > _REL_TOL_DERIV * max(1.0, abs(est), abs(given)):
            raise InputError(
                f"{what} disagrees with finite differences at z={z!r}: "
                f"claimed {given!r}, estimated {est!r}"
            )


@dataclass(frozen=True)
class ScalarFunctional:
    """A smooth map h with its derivatives, for functionals of f alone.

    h must be twice continuously differentiable on [0, z_max]; third and
    fourth derivatives are only needed by the uniform-density CLT.
    Derivatives are checked against central finite differences at 32
    deterministic probe points on construction.
    """

    h: callable
    hprime: callable
    hdoubleprime: callable
    h3: callable = None
    h4: callable = None
    z_max: float = 8.0
    name: str = None

    def __post_init__(self):
        rng = default_stream(_VALIDATION_SEED)
        hi = min(self.z_max, 8.0)
        zs = 1e-3 + (hi - 1e-3) * rng.random(32)
        _check_derivative(self.h, self.hprime, zs, "hprime")
        _check_derivative(self.hprime, self.hdoubleprime, zs, "hdoubleprime")
        if self.h3 is not None:
            _check_derivative(self.hdoubleprime, self.h3, zs, "h3")
        if self.h4 is not None and self.h3 is not None:
            _check_derivative(self.h3, self.h4, zs, "h4")

    def as_smooth(self) -> "SmoothFunctional":
        """View h(z) as the x-free integrand g(z, x) = h(z)."""
        h, hp, hpp = self.h, self.hprime, self.hdoubleprime
        return SmoothFunctional(
            g=lambda z, x: h(z) + 0.0 * np.asarray(x, dtype=float),
            gdot=lambda z, x: hp(z) + 0.0 * np.asarray(x, dtype=float),
            gddot=lambda z, x: hpp(z) + 0.0 * np.asarray(x, dtype=float),
            z_max=self.z_max,
            x_free=True,
            vanishes_at_zero=(float(h(0.0)) == 0.0),
            name=self.name,
        )


@dataclass(frozen=True)
class SmoothFunctional:
    """A smooth integrand g(z, x) with its z-derivatives.

    ``x_free`` declares that g ignores x entirely (integrals then reduce
    to exact sums).  ``vanishes_at_zero`` declares g(0, x) = 0 for all x,
    which makes the tail beyond the density's support drop out; without
    it, integrals over an unbounded domain are rejected.
    """

    g: callable
    gdot: callable
    gddot: callable
    z_max: float = 8.0
    x_free: bool = False
    vanishes_at_zero: bool = False
    x_probe_max: float = 10.0
    name: str = None

    def __post_init__(self):
        rng = default_stream(_VALIDATION_SEED)
        hi = min(self.z_max, 8.0)
        zs = 1e-3 + (hi - 1e-3) * rng.random(32)
        xs = self.x_probe_max * rng.random(32)
        for z, x in zip(zs, xs):
            step = 6e-6 * max(1.0, abs(z))
            est = (float(self.g(z + step, x)) - float(self.g(z - step, x))) / (2 * step)
            given = float(self.gdot(z, x))
            if abs(est - given) > _REL_TOL_DERIV * max(1.0, abs(est), abs(given)):
                raise InputError(
                    f"gdot disagrees with finite differences at (z={z!r}, x={x!r}): "
                    f"claimed {given!r}, estimated {est!r}"
                )
            est2 = (float(self.gdot(z + step, x)) - float(self.gdot(z - step, x))) / (2 * step)
            given2 = float(self.gddot(z, x))
            if abs(est2 - given2) > _REL_TOL_DERIV * max(1.0, abs(est2), abs(given2)):
                raise InputError(
                    f"gddot disagrees with finite differences at (z={z!r}, x={x!r}): "
                    f"claimed {given2!r}, estimated {est2!r}"
                )
        if self.vanishes_at_zero:
            for x in xs[:4]:
                if float(self.g(0.0, x)) != 0.0:
                    raise InputError(f"vanishes_at_zero declared but g(0, {x!r}) != 0")


def _step_sum(hfun, d: StepDensity, domain) -> float:
    """Exact integral of hfun(f(x)) dx over [0, T] or [0, inf)."""
    tail = 0.0
    if domain is None:
        if float(hfun(0.0)) != 0.0:
            raise NumericError(
                "divergent tail: the integrand does not vanish at density 0 "
                "on an unbounded domain; declare a compact domain [0, T]"
            )
    else:
        t_end = float(domain[1])
        if t_end < d.support_end:
            raise InputError("declared domain ends inside the density's support")
        tail = float(hfun(0.0)) * (t_end - d.support_end)
    hv = _apply(hfun, d.levels)
    return float(np.dot(hv, d.piece_widths)) + tail


def mu_plugin(h: ScalarFunctional, d: StepDensity, domain=None) -> float:
    """Integral of h(f(x)) dx for a step density f: an exact finite sum.

    Without a compact ``domain`` [0, T], h(0) = 0 is required (otherwise
    the tail beyond the support diverges); with one, the tail contributes
    h(0) * (T - t_k).
    """
    return _step_sum(h.h, d, domain)


def nu_plugin(h: ScalarFunctional, d: StepDensity) -> float:
    """Integral of h(f(x)) f(x) dx: the plug-in carrier-measure average."""
    hv = _apply(h.h, d.levels)
    return float(np.dot(hv * d.levels, d.piece_widths))


def empirical_average(h: ScalarFunctional, s: Sample, d: StepDensity) -> float:
    """(1/n) sum of h(f(X_i)) with f the fitted density of the sample."""
    return float(np.mean(_apply(h.h, evaluate(d, s.values))))


def one_step_correction(h: ScalarFunctional, s: Sample, d: StepDensity) -> float:
    """Explicit first-order bias-correction term for the carrier average.

    Empirical mean of w(f(X_i)) minus the plug-in integral of w(f) f dx,
    with w(z) = h(z) + z h'(z).  For the Grenander fit this is identically
    zero, so the one-step estimator collapses onto the plug-in.
    """

    def w(z):
        z = np.asarray(z, dtype=float)
        return _apply(h.h, z) + z * _apply(h.hprime, z)

    fitted = evaluate(d, s.values)
    plug = float(np.dot(w(d.levels) * d.levels, d.piece_widths))
    return float(np.mean(w(fitted))) - plug


@lru_cache(maxsize=32)
def _gl_nodes(order: int):
    return np.polynomial.legendre.leggauss(order)


def _gl_integrate(fn, a, b, order):
    nodes, weights = _gl_nodes(order)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return half * float(np.dot(weights, _apply(fn, mid + half * nodes)))


def _integrate_piece(fn, a, b, order, depth=0):
    """Adaptive Gauss-Legendre: accept when two successive orders agree
    to 1e-10 relative, else bisect, at most 10 levels deep."""
    coarse = _gl_integrate(fn, a, b, order)
    fine = _gl_integrate(fn, a, b, 2 * order)
    if abs(fine - coarse) <= _QUAD_REL_TOL * max(1.0, abs(fine)) or depth >= _MAX_REFINE:
        return fine
    mid = 0.5 * (a + b)
    return (_integrate_piece(fn, a, mid, order, depth + 1)
            + _integrate_piece(fn, mid, b, order, depth + 1))


def tau_plugin(G: SmoothFunctional, d: StepDensity, domain=None, order: int = 16) -> float:
    """Integral of g(f(x), x) dx for a step density f.

    Per-piece Gauss-Legendre quadrature (the integrand is smooth in x on
    each piece); exact sum when g is x-free.  Tail handling mirrors
    :func:`mu_plugin`, using g(0, .).
    """
    if G.x_free:
        return _step_sum(lambda z: G.g(z, 0.0), d, domain)
    if domain is None and not G.vanishes_at_zero:
        raise NumericError(
            "divergent tail: g(0, .) not declared zero on an unbounded domain; "
            "declare a compact domain [0, T]"
        )
    edges = np.concatenate(([0.0], d.breakpoints))
    total = 0.0
    for i, v in enumerate(d.levels):
        total += _integrate_piece(lambda x, v=v: G.g(v, x), edges[i], edges[i + 1], order)
    if domain is not None:
        t_end = float(domain[1])
        if t_end < d.support_end:
            raise InputError("declared domain ends inside the density's support")
        if t_end > d.support_end and not G.vanishes_at_zero:
            total += _integrate_piece(lambda x: G.g(0.0, x), d.support_end, t_end, order)
    return float(total)


# -- built-in named functionals ------------------------------------------

def _power(p: int) -> ScalarFunctional:
    def deriv(k):
        coeff = 1.0
        for j in range(k):
            coeff *= (p - j)
        expo = p - k
        if expo < 0 or coeff == 0.0:
            return lambda z: 0.0 * np.asarray(z, dtype=float)
        return lambda z: coeff * np.asarray(z, dtype=float) ** expo

    return ScalarFunctional(
        h=deriv(0), hprime=deriv(1), hdoubleprime=deriv(2),
        h3=deriv(3), h4=deriv(4), z_max=1e9, name=f"power:{p}",
    )


def _xz2() -> SmoothFunctional:
    return SmoothFunctional(
        g=lambda z, x: np.asarray(x, dtype=float) * z * z,
        gdot=lambda z, x: 2.0 * np.asarray(x, dtype=float) * z,
        gddot=lambda z, x: 2.0 * np.asarray(x, dtype=float),
        z_max=1e9,
        vanishes_at_zero=True,
        name="xz2",
    )


_BUILTIN_NAMES = ("power:p (integer p >= 1)", "xz2", "identity")


@lru_cache(maxsize=None)
def by_name(name: str):
    """Look up a built-in functional: ``power:p``, ``xz2``, ``identity``."""
    if name == "identity":
        return _power(1)
    if name == "xz2":
        return _xz2()
    if name.startswith("power:"):
        try:
            p = int(name.split(":", 1)[1])
        except ValueError:
            p = 0
        if p >= 1:
            return _power(p)
    raise InputError(
        f"unknown functional {name!r}; valid names: " + ", ".join(_BUILTIN_NAMES)
    )

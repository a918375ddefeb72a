"""Radial ODE solver for -Delta u = |x|^alpha |u|^(p-1) u in log-radius.

The whole-plane radial solution normalized to u(0) = 1 is integrated in
t = ln r, where the equation becomes ``u_tt + e^((2+alpha) t) |u|^(p-1) u = 0``.
This removes both the coefficient singularity at r = 0 and the
astronomically large zero radii (for m nodal regions the m-th zero grows
like ``M^((p-1)/2)``); radii are kept as log-radii throughout and only
exponentiated in reported ratios.

Dirichlet, Neumann and Henon solutions in the unit disc are exact
rescalings of the same whole-plane trajectory, so one integration serves
every boundary condition at fixed (p, alpha).

Energies and the flux integral are carried as augmented quadrature
states; zeros and critical points are located by event detection on the
integrator's dense output.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad, solve_ivp

from .constants import m0_product_formula

__all__ = [
    "SolverError",
    "WholePlaneSolution",
    "RadialSolution",
    "RescaledProfile",
    "default_tolerance",
    "solve_whole_plane",
    "prefetch_solutions",
    "dirichlet_solution",
    "neumann_solution",
    "henon_crosscheck",
    "energies",
    "pohozaev_residual",
    "flux_identity_residual",
    "rescaled_profile",
]

#: start the integration where the equation coefficient is this small
_START_COEFF = 1e-12

#: on-trajectory combined exponents stay below ~30; clamp trial steps here
_EXP_CAP = 100.0


class SolverError(RuntimeError):
    """Integration failed: step controller stalled or events missing."""


def default_tolerance() -> float:
    """Default solver tolerance; NODAL_TOL in the environment overrides."""
    env = os.environ.get("NODAL_TOL")
    if env:
        try:
            tol = float(env)
        except ValueError as exc:
            raise ValueError(f"NODAL_TOL is not a float: {env!r}") from exc
        if not 0.0 < tol < 1.0:
            raise ValueError(f"NODAL_TOL out of range (0, 1): {tol!r}")
        return tol
    return 1e-10


@dataclass(frozen=True)
class WholePlaneSolution:
    """Normalized radial solution on the whole plane, sampled in log-radius.

    State components are ``(u, u_t, Eg, Ep)`` where ``Eg/Ep`` are the
    cumulative gradient/potential energy integrals from t = -inf.

    ``log_zeros[j]`` is ln(rho_(j+1)) for the first ``m_max`` zeros;
    ``log_crit[j]`` is ln(delta_(j+1)) for the critical points strictly
    between consecutive zeros (the critical point at the origin,
    delta_0 = 0 with u = 1, is implicit).
    """

    p: float
    alpha: float
    m_max: int
    tol: float
    t: np.ndarray
    u: np.ndarray
    ut: np.ndarray
    log_zeros: np.ndarray
    zero_states: np.ndarray
    log_crit: np.ndarray
    crit_states: np.ndarray
    _dense: object = field(repr=False, compare=False)

    def __post_init__(self) -> None:
        for arr in (self.t, self.u, self.ut, self.log_zeros, self.zero_states,
                    self.log_crit, self.crit_states):
            arr.setflags(write=False)

    @property
    def crit_values(self) -> np.ndarray:
        """Signed u at the detected critical points delta_1, delta_2, ..."""
        return self.crit_states[:, 0]

    @property
    def t_start(self) -> float:
        return float(self.t[0])

    @property
    def t_end(self) -> float:
        return float(self.t[-1])

    def eval_state(self, t) -> np.ndarray:
        """Dense-output state at log-radius t (series continuation below
        the start point); accepts scalars or arrays, returns shape (4, ...)."""
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr > self.t_end + 1e-9):
            raise ValueError("eval_state: log-radius beyond the integrated range")
        scalar = t_arr.ndim == 0
        t_arr = np.atleast_1d(t_arr)
        out = np.empty((4, t_arr.size))
        early = t_arr < self.t_start
        if np.any(~early):
            out[:, ~early] = self._dense(t_arr[~early])
        if np.any(early):
            out[:, early] = _series_state(self.p, self.alpha, t_arr[early])
        return out[:, 0] if scalar else out

    def eval_u(self, t):
        return self.eval_state(t)[0]

    def eval_ut(self, t):
        return self.eval_state(t)[1]

    def to_dict(self, samples: int = 0) -> dict:
        out = {
            "p": self.p,
            "alpha": self.alpha,
            "bc": "plane",
            "m": self.m_max,
            "log_zeros": self.log_zeros.tolist(),
            "log_crit": self.log_crit.tolist(),
            "crit_values": self.crit_values.tolist(),
        }
        if samples > 0:
            idx = np.unique(np.linspace(0, len(self.t) - 1, samples).astype(int))
            out["samples"] = {
                "t": self.t[idx].tolist(),
                "u": self.u[idx].tolist(),
                "ut": self.ut[idx].tolist(),
            }
        return out


def _series_state(p: float, alpha: float, t: np.ndarray) -> np.ndarray:
    """Two-term small-radius expansion of the state (valid where e^(qt) is tiny)."""
    q = 2.0 + alpha
    e = np.exp(q * t)
    u = 1.0 - e / q**2 + p * e * e / (4.0 * q**4)
    ut = -e / q + p * e * e / (2.0 * q**3)
    eg = e * e / (2.0 * q**3) - p * e**3 / (3.0 * q**5)
    ep = e / q - (p + 1.0) * e * e / (2.0 * q**3)
    return np.stack([u, ut, eg, ep])


def _make_rhs(p: float, q: float):
    log = math.log
    exp = math.exp
    copysign = math.copysign

    def rhs(t: float, y) -> tuple:
        u = y[0]
        v = y[1]
        au = abs(u)
        if au < 1e-300:
            return (v, 0.0, v * v, 0.0)
        lu = log(au)
        ex = q * t + p * lu
        f = copysign(exp(min(ex, _EXP_CAP)), u) if ex > -700.0 else 0.0
        exg = ex + lu
        g = exp(min(exg, _EXP_CAP)) if exg > -700.0 else 0.0
        return (v, -f, v * v, g)

    return rhs


def _resolve_tol(tol: float | None) -> float:
    if tol is None:
        return default_tolerance()
    if not 0.0 < tol < 1.0:
        raise ValueError(f"tol out of range (0, 1): {tol!r}")
    return float(tol)


_CACHE: dict[tuple, WholePlaneSolution] = {}
_CACHE_MAX = 64


def _cache_put(key: tuple, sol: WholePlaneSolution) -> None:
    if len(_CACHE) >= _CACHE_MAX:
        _CACHE.pop(next(iter(_CACHE)))
    _CACHE[key] = sol


def solve_whole_plane(
    p: float, alpha: float, m_max: int, tol: float | None = None
) -> WholePlaneSolution:
    """Integrate the normalized whole-plane solution up to its m_max-th zero.

    Event detection collects the first ``m_max`` sign changes and the
    critical points strictly between them; event locations come from root
    finding on the dense output (machine-accurate in t).  Results are
    immutable and memoized on (p, alpha, m_max, tol).

    Raises
    ------
    SolverError
        If the step controller fails, fewer than ``m_max`` zeros are found
        before the t cap, or the zero/critical interlacing is violated.
    """
    if not p > 1.0:
        raise ValueError("solve_whole_plane: p must be > 1")
    if alpha < 0.0:
        raise ValueError("solve_whole_plane: alpha must be >= 0")
    if m_max < 1:
        raise ValueError("solve_whole_plane: m_max must be >= 1")
    tol = _resolve_tol(tol)
    key = (float(p), float(alpha), int(m_max), tol)
    hit = _CACHE.get(key)
    if hit is not None:
        return hit
    sol = _solve_impl(*key)
    _cache_put(key, sol)
    return sol


def _solve_impl(p: float, alpha: float, m_max: int, tol: float) -> WholePlaneSolution:
    q = 2.0 + alpha
    # predicted location of the last zero, with 20% margin plus slack for small p
    ln_m0 = math.log(m0_product_formula(m_max - 1))
    t_cap = 1.2 * (p - 1.0) / q * ln_m0 + 25.0
    t0 = math.log(_START_COEFF) / q
    y0 = _series_state(p, alpha, np.array([t0]))[:, 0]

    ev_zero = lambda t, y: y[0]  # noqa: E731
    ev_zero.terminal = m_max
    ev_crit = lambda t, y: y[1]  # noqa: E731

    res = solve_ivp(
        _make_rhs(p, q),
        (t0, t_cap),
        y0,
        method="DOP853",
        rtol=max(tol * 1e-2, 1e-13),
        atol=tol * 1e-4,
        dense_output=True,
        events=[ev_zero, ev_crit],
    )
    if res.status < 0:
        raise SolverError(f"step controller failed: {res.message}")
    lam = res.t_events[0]
    if len(lam) < m_max:
        raise SolverError(
            f"found {len(lam)} of {m_max} zeros before t cap {t_cap:.1f} "
            f"(p={p}, alpha={alpha}); the solution decayed or the cap is too tight"
        )
    zero_states = res.y_events[0]

    # critical points must interlace the zeros: exactly one per gap; events
    # before the first zero are roundoff artifacts of the flat start
    tau_all = res.t_events[1]
    tau_states_all = res.y_events[1]
    log_crit = np.empty(m_max - 1)
    crit_states = np.empty((m_max - 1, 4))
    for j in range(m_max - 1):
        mask = (tau_all > lam[j]) & (tau_all < lam[j + 1])
        if int(mask.sum()) != 1:
            raise SolverError(
                f"expected exactly one critical point between zeros {j + 1} and "
                f"{j + 2}, found {int(mask.sum())} (p={p}, alpha={alpha})"
            )
        k = int(np.flatnonzero(mask)[0])
        log_crit[j] = tau_all[k]
        crit_states[j] = tau_states_all[k]

    vals = np.abs(crit_states[:, 0])
    if np.any(vals >= 1.0) or np.any(np.diff(vals) >= 0.0):
        raise SolverError(
            f"critical values fail to decay strictly from u(0)=1 "
            f"(p={p}, alpha={alpha}): {vals}"
        )

    return WholePlaneSolution(
        p=float(p),
        alpha=float(alpha),
        m_max=int(m_max),
        tol=tol,
        t=res.t,
        u=res.y[0].copy(),
        ut=res.y[1].copy(),
        log_zeros=lam.copy(),
        zero_states=zero_states.copy(),
        log_crit=log_crit,
        crit_states=crit_states,
        _dense=res.sol,
    )


def _solve_job(key: tuple) -> tuple[tuple, WholePlaneSolution]:
    return key, _solve_impl(*key)


def prefetch_solutions(
    params: list[tuple[float, float, int]],
    tol: float | None = None,
    workers: int | None = None,
) -> None:
    """Solve a batch of (p, alpha, m_max) jobs, concurrently when possible.

    Results land in the memo cache used by :func:`solve_whole_plane`, in a
    deterministic order keyed by the inputs; if a process pool cannot be
    created the batch falls back to sequential solving.
    """
    tol = _resolve_tol(tol)
    keys = []
    for p, alpha, m_max in params:
        key = (float(p), float(alpha), int(m_max), tol)
        if key not in _CACHE:
            keys.append(key)
    keys = sorted(set(keys))
    if not keys:
        return
    if workers is None:
        workers = min(len(keys), os.cpu_count() or 1)
    if workers > 1:
        try:
            from concurrent.futures import ProcessPoolExecutor

            with ProcessPoolExecutor(max_workers=workers) as pool:
                for key, sol in pool.map(_solve_job, keys):
                    _cache_put(key, sol)
            return
        except Exception:
            pass  # no usable pool in this environment; fall through
    for key in keys:
        _cache_put(key, _solve_impl(*key))


@dataclass(frozen=True)
class RadialSolution:
    """Dirichlet or Neumann radial solution on the unit disc.

    Radii are stored as logs of the ratios to the rescaling radius
    (``log_scale`` in whole-plane coordinates), so they remain meaningful
    when the plain ratios underflow.  ``log_zeros`` covers r_1..r_m for
    Dirichlet (r_m = 1) and the interior zeros r_1..r_(m-1) for Neumann;
    ``log_crit`` covers the critical points s_1..s_(m-1), with the
    Neumann boundary critical point s_(m-1) = 1 included as 0.0 and the
    universal s_0 = 0 implicit.  ``crit_values[i]`` is the signed value
    u(s_i) for i = 0..m-1.
    """

    bc: str
    m: int
    p: float
    alpha: float
    log_scale: float
    log_zeros: np.ndarray
    log_crit: np.ndarray
    crit_values: np.ndarray
    deriv_at_zeros: np.ndarray
    boundary_derivative: float
    energy_grad: float
    energy_pot: float
    plane: WholePlaneSolution = field(repr=False, compare=False)

    def __post_init__(self) -> None:
        for arr in (self.log_zeros, self.log_crit, self.crit_values,
                    self.deriv_at_zeros):
            arr.setflags(write=False)

    @property
    def zeros(self) -> np.ndarray:
        """Zero radii in (0, 1]; may underflow to 0 for extreme p."""
        return np.exp(self.log_zeros)

    @property
    def crit(self) -> np.ndarray:
        """Critical radii, s_0 = 0 included; aligned with crit_values."""
        return np.concatenate([[0.0], np.exp(self.log_crit)])

    @property
    def amplitude_scale(self) -> float:
        """exp(kappa * log_scale): the factor mapping w-values to u-values."""
        kappa = (self.alpha + 2.0) / (self.p - 1.0)
        return math.exp(kappa * self.log_scale)

    def eval_u(self, r):
        """u(r) for r in [0, 1], via the whole-plane dense output."""
        r_arr = np.asarray(r, dtype=float)
        if np.any(r_arr < 0.0) or np.any(r_arr > 1.0 + 1e-12):
            raise ValueError("eval_u: radii must lie in [0, 1]")
        scalar = r_arr.ndim == 0
        r_arr = np.atleast_1d(r_arr)
        out = np.empty_like(r_arr)
        at0 = r_arr == 0.0
        out[at0] = self.crit_values[0]
        if np.any(~at0):
            t = self.log_scale + np.log(r_arr[~at0])
            out[~at0] = self.amplitude_scale * self.plane.eval_u(t)
        return float(out[0]) if scalar else out

    def to_dict(self, samples: int = 0) -> dict:
        out = {
            "p": self.p,
            "alpha": self.alpha,
            "bc": self.bc,
            "m": self.m,
            "log_zeros": self.log_zeros.tolist(),
            "log_crit": self.log_crit.tolist(),
            "crit_values": self.crit_values.tolist(),
            "boundary_derivative": self.boundary_derivative,
            "energy_grad": self.energy_grad,
            "energy_pot": self.energy_pot,
        }
        if samples > 0:
            mask = self.plane.t <= self.log_scale
            ts = self.plane.t[mask]
            us = self.plane.u[mask]
            idx = np.unique(np.linspace(0, len(ts) - 1, samples).astype(int))
            r = np.exp(ts[idx] - self.log_scale)
            out["samples"] = {
                "r": r.tolist(),
                "u": (self.amplitude_scale * us[idx]).tolist(),
            }
        return out


def dirichlet_solution(w: WholePlaneSolution, m: int) -> RadialSolution:
    """Dirichlet solution with m nodal regions: w rescaled at its m-th zero."""
    if not 1 <= m <= w.m_max:
        raise ValueError(f"dirichlet_solution: m={m} out of range 1..{w.m_max}")
    L = float(w.log_zeros[m - 1])
    kappa = (w.alpha + 2.0) / (w.p - 1.0)
    amp = math.exp(kappa * L)
    crit_values = np.concatenate([[amp], amp * w.crit_states[: m - 1, 0]])
    deriv = w.p * amp * np.abs(w.zero_states[:m, 1])
    eg, ep = w.zero_states[m - 1, 2], w.zero_states[m - 1, 3]
    pref = w.p * math.exp(2.0 * kappa * L)
    return RadialSolution(
        bc="dirichlet",
        m=m,
        p=w.p,
        alpha=w.alpha,
        log_scale=L,
        log_zeros=w.log_zeros[:m] - L,
        log_crit=w.log_crit[: m - 1] - L,
        crit_values=crit_values,
        deriv_at_zeros=deriv,
        boundary_derivative=float(amp * w.zero_states[m - 1, 1]),
        energy_grad=float(pref * eg),
        energy_pot=float(pref * ep),
        plane=w,
    )


def neumann_solution(w: WholePlaneSolution, m: int) -> RadialSolution:
    """Neumann solution with m nodal regions: w rescaled at delta_(m-1).

    Nontrivial Neumann solutions are necessarily sign-changing, so m = 1 is
    rejected.
    """
    if m < 2:
        raise ValueError("neumann_solution: m must be >= 2 (solutions are nodal)")
    if m > w.m_max:
        raise ValueError(f"neumann_solution: m={m} out of range 2..{w.m_max}")
    L = float(w.log_crit[m - 2])
    kappa = (w.alpha + 2.0) / (w.p - 1.0)
    amp = math.exp(kappa * L)
    crit_values = np.concatenate([[amp], amp * w.crit_states[: m - 1, 0]])
    deriv = w.p * amp * np.abs(w.zero_states[: m - 1, 1])
    eg, ep = w.crit_states[m - 2, 2], w.crit_states[m - 2, 3]
    pref = w.p * math.exp(2.0 * kappa * L)
    return RadialSolution(
        bc="neumann",
        m=m,
        p=w.p,
        alpha=w.alpha,
        log_scale=L,
        log_zeros=w.log_zeros[: m - 1] - L,
        log_crit=np.concatenate([w.log_crit[: m - 2] - L, [0.0]]),
        crit_values=crit_values,
        deriv_at_zeros=deriv,
        boundary_derivative=float(amp * w.crit_states[m - 2, 1]),
        energy_grad=float(pref * eg),
        energy_pot=float(pref * ep),
        plane=w,
    )


def energies(sol: RadialSolution) -> tuple[float, float]:
    """(gradient, potential) energies ``p * int |u'|^2 r dr`` and
    ``p * int |u|^(p+1) r^(1+alpha) dr``, accumulated as augmented states."""
    return sol.energy_grad, sol.energy_pot


def pohozaev_residual(sol: RadialSolution) -> float:
    """Relative defect of the exact boundary-flux/energy identity.

    For the Dirichlet solution at any finite p,
    ``p * int_0^1 |u|^(p+1) r^(1+alpha) dr
    = (1 + 1/p) * [p u'(1)]^2 / (2 (2 + alpha))``
    (the classical 1/4 factor at alpha = 0).  Being exact at every p, the
    residual gauges pure solver accuracy.
    """
    if sol.bc != "dirichlet":
        raise ValueError("pohozaev_residual: defined for Dirichlet solutions")
    pu1 = sol.p * abs(sol.boundary_derivative)
    rhs = (1.0 + 1.0 / sol.p) * pu1 * pu1 / (2.0 * (2.0 + sol.alpha))
    return abs(sol.energy_pot - rhs) / sol.energy_pot


def flux_identity_residual(sol: RadialSolution, s: float, t: float) -> float:
    """Defect of ``u'(s)s - u'(t)t = int_s^t |u|^(p-1) u r^(1+alpha) dr``.

    The right side is evaluated by independent adaptive quadrature on the
    dense trajectory (in log-radius), so the residual measures how well
    the computed trajectory satisfies the equation in integral form.
    Reported relative to the derivative scale max(|u'(s)s|, |u'(t)t|).
    """
    if not 0.0 < s < t <= 1.0:
        raise ValueError("flux_identity_residual: need 0 < s < t <= 1")
    p, q = sol.p, sol.alpha + 2.0
    plane = sol.plane
    ta = sol.log_scale + math.log(s)
    tb = sol.log_scale + math.log(t)

    def integrand(tt: float) -> float:
        u = float(plane.eval_u(tt))
        au = abs(u)
        if au < 1e-300:
            return 0.0
        ex = q * tt + p * math.log(au)
        return math.copysign(math.exp(ex), u) if ex > -700.0 else 0.0

    breaks = [x for x in np.concatenate([plane.log_zeros, plane.log_crit])
              if ta < x < tb]
    integral, _ = quad(
        integrand, ta, tb, epsabs=1e-14, epsrel=1e-11, limit=800,
        points=sorted(breaks) if breaks else None,
    )
    wt_a = float(plane.eval_ut(ta))
    wt_b = float(plane.eval_ut(tb))
    scale = max(abs(wt_a), abs(wt_b), 1e-300)
    return abs(wt_a - wt_b - integral) / scale


def henon_crosscheck(
    w0: WholePlaneSolution, alpha: float, tol: float | None = None
) -> float:
    """Max log-radius discrepancy between two routes to the weighted problem.

    Route one maps the alpha = 0 solution through r -> r^((alpha+2)/2) and
    renormalizes the center value to 1 (the amplitude correction shifts
    every log-zero by ln((alpha+2)/2) before scaling by 2/(alpha+2));
    route two solves at alpha directly.  Zero and critical sets are
    compared in log-radius.
    """
    if w0.alpha != 0.0:
        raise ValueError("henon_crosscheck: base solution must have alpha = 0")
    if alpha < 0.0:
        raise ValueError("henon_crosscheck: alpha must be >= 0")
    wa = solve_whole_plane(w0.p, alpha, w0.m_max, tol if tol is not None else w0.tol)
    shift = math.log((alpha + 2.0) / 2.0)
    scale = 2.0 / (alpha + 2.0)
    mapped_zeros = scale * (w0.log_zeros + shift)
    mapped_crit = scale * (w0.log_crit + shift)
    res = float(np.max(np.abs(mapped_zeros - wa.log_zeros)))
    if len(mapped_crit):
        res = max(res, float(np.max(np.abs(mapped_crit - wa.log_crit))))
    return res


@dataclass(frozen=True)
class RescaledProfile:
    """Blow-up rescaling of one nodal region against the radial variable.

    ``log_eps`` is the log of the concentration scale; ``samples`` has
    columns (r, xi) with xi vanishing at the image of the critical point
    and xi <= 0 throughout the region.
    """

    i: int
    log_eps: float
    samples: np.ndarray

    def __post_init__(self) -> None:
        self.samples.setflags(write=False)

    @property
    def eps(self) -> float:
        """May underflow to 0 for extreme p; use log_eps then."""
        return math.exp(self.log_eps)


def rescaled_profile(sol: RadialSolution, i: int, r_grid: np.ndarray) -> RescaledProfile:
    """Rescale the i-th nodal region of ``sol`` onto its concentration scale.

    The scale is ``eps_i = ((alpha+2)/2)^(2/(alpha+2))
    * [p |u(s_i)|^(p-1)]^(-1/(2+alpha))``, formed in log space, and
    ``xi(r) = p ((-1)^i u(eps_i r) - |u(s_i)|) / |u(s_i)|``.  The grid
    must lie inside the image of the i-th nodal annulus.
    """
    if not 0 <= i <= sol.m - 1:
        raise ValueError(f"rescaled_profile: i={i} out of range 0..{sol.m - 1}")
    p, q = sol.p, sol.alpha + 2.0
    kappa = q / (sol.p - 1.0)
    ln_u_crit = math.log(abs(sol.crit_values[i]))
    log_eps = (2.0 / q) * math.log(q / 2.0) - (math.log(p) + (p - 1.0) * ln_u_crit) / q

    lo_rel = -math.inf if i == 0 else float(sol.log_zeros[i - 1])
    hi_rel = float(sol.log_zeros[i]) if i < len(sol.log_zeros) else 0.0

    r = np.asarray(r_grid, dtype=float)
    if np.any(r < 0.0) or (i >= 1 and np.any(r == 0.0)):
        raise ValueError("rescaled_profile: radii must be positive")
    with np.errstate(divide="ignore"):
        log_r_rel = log_eps + np.log(r)
    slack = 1e-9
    if np.any(log_r_rel < lo_rel - slack) or np.any(log_r_rel > hi_rel + slack):
        raise ValueError(
            f"rescaled_profile: grid leaves the nodal annulus of region {i} "
            f"(allowed r in [{math.exp(max(lo_rel - log_eps, -700)):.4g}, "
            f"{math.exp(min(hi_rel - log_eps, 700)):.4g}])"
        )

    w_crit = abs(sol.crit_values[i]) / sol.amplitude_scale
    sign = 1.0 if i % 2 == 0 else -1.0
    t_abs = sol.log_scale + log_r_rel
    w_vals = np.ones_like(r)  # r = 0 only occurs for i = 0, where w(0) = 1
    pos = r > 0.0
    if np.any(pos):
        w_vals[pos] = sol.plane.eval_u(t_abs[pos])
    xi = p * (sign * w_vals - w_crit) / w_crit
    return RescaledProfile(
        i=i, log_eps=float(log_eps), samples=np.column_stack([r, xi])
    )

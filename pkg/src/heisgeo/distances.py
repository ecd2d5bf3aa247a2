"""Distance functions: the Cygan gauge metric and Riemannian shooting.

The Cygan distance is the gauge quantity

    rho_c(p, q) = ( |w - w'|^4 + (z - z' + Im<w, w'>)^2 )^(1/4)

with the same Hermitian convention Im<w, w'> = x*y' - y*x' as the group
law, which makes rho_c(p, q) = rho_c(0, p^-1 * q) and hence exactly
left-invariant.  It is homogeneous of degree one under the anisotropic
dilation (x, y, z) -> (lam*x, lam*y, lam^2*z): balls grow linearly in the
horizontal directions and quadratically in the vertical one.

The Riemannian distance has no closed form; it is computed by inverting
the exponential map.  Rotational symmetry about the z-axis reduces the
boundary-value problem to two unknowns: for a unit-speed geodesic from the
origin the planar distance and height depend only on (gamma, s),

    planar(gamma, s) = r * s * |sinc(gamma*s)|,   r = sqrt(1 - gamma^2)
    height(gamma, s) = z(gamma, s),

and the initial planar direction phi is recovered afterwards from the
chord direction of the target.  Newton's method with a numerically
differenced Jacobian runs from a deterministic lattice of starting values;
solving in the angle theta with gamma = sin(theta) avoids the square-root
singularity of r at |gamma| = 1.  Multiple starts matter because targets
beyond the conjugate locus are reached by several geodesics; the distance
is the smallest arc length among the converged candidates.

brute_force_distance is an independent validation oracle: a dense lattice
over (gamma, phi, s) followed by a derivative-free shrinking-lattice
refinement.  It shares only the forward closed form with the solver, not
the inversion strategy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ORIGIN, HeisPoint, group_inv, group_mul
from .geodesics import TWO_PI, GeodesicSpec, _sinc, _sin_defect, origin_coordinates

__all__ = [
    "ShootingSolution",
    "ShootingConvergenceError",
    "TargetUnreachableError",
    "cygan_distance",
    "cygan_scaling_check",
    "dilate",
    "shoot_candidates",
    "riemannian_distance",
    "brute_force_distance",
]


class ShootingConvergenceError(RuntimeError):
    """Raised when the multistart budget yields no residual below tolerance."""


class TargetUnreachableError(RuntimeError):
    """Raised by the grid oracle when no geodesic of length <= s_max fits."""


def cygan_distance(p: HeisPoint, q: HeisPoint) -> float:
    """Cygan gauge distance; zero iff p = q, symmetric, left-invariant."""
    dx = p.x - q.x
    dy = p.y - q.y
    planar_sq = dx * dx + dy * dy
    cross = p.z - q.z + p.x * q.y - p.y * q.x
    # sqrt of sqrt keeps exact values (e.g. fourth roots of perfect fourth
    # powers) exact to rounding, unlike a pow(0.25) call.
    return math.sqrt(math.sqrt(planar_sq * planar_sq + cross * cross))


def dilate(p: HeisPoint, lam: float) -> HeisPoint:
    """Anisotropic dilation (x, y, z) -> (lam*x, lam*y, lam^2*z)."""
    return HeisPoint(lam * p.x, lam * p.y, lam * lam * p.z)


def cygan_scaling_check(p: HeisPoint, q: HeisPoint, lam: float) -> tuple[float, float]:
    """Return (rho_c(dilated pair), lam * rho_c(pair)); equal identically."""
    if not lam > 0.0:
        raise ValueError(f"dilation factor must be positive, got {lam}")
    return cygan_distance(dilate(p, lam), dilate(q, lam)), lam * cygan_distance(p, q)


@dataclass(frozen=True)
class ShootingSolution:
    """A geodesic from the origin reaching the target within tolerance.

    axis_family marks targets on the z-axis, where the planar direction is
    arbitrary by rotational symmetry and one representative (phi = 0) of a
    whole circle of solutions is reported.
    """

    spec: GeodesicSpec
    s: float
    residual: float
    axis_family: bool = False


def _height(gamma, s):
    w = gamma * s
    return 0.5 * gamma * s + 0.25 * np.sin(2.0 * w) + 2.0 * gamma * s**3 * _sin_defect(2.0 * w)


def _shoot_residuals(theta, s, rho_t, z_t, sign):
    """Smooth 2-vector residual in the (theta, s) chart, vectorized."""
    gamma = np.sin(theta)
    w = gamma * s
    q = np.cos(theta) * s * _sinc(w)
    return q - sign * rho_t, _height(gamma, s) - z_t


_SEED_GAMMAS = 32
_SEED_LENGTHS = 128
_NEWTON_ITERATIONS = 50
_NEWTON_TOL = 1e-10
_DEDUP_TOL = 1e-6
_AXIS_TOL = 1e-12


def _seed_lattice() -> tuple[np.ndarray, np.ndarray]:
    """Deterministic multistart lattice over (theta, s).

    gamma runs uniformly over [-1, 1]; each row gets arc lengths up to
    4*pi / max(|gamma|, 0.05) capped at 100, enough for several windings of
    the planar circle at that pitch.
    """
    gammas = np.linspace(-1.0, 1.0, _SEED_GAMMAS)
    s_caps = np.minimum(4.0 * np.pi / np.maximum(np.abs(gammas), 0.05), 100.0)
    fractions = np.arange(1, _SEED_LENGTHS + 1) / _SEED_LENGTHS
    theta = np.repeat(np.arcsin(gammas), _SEED_LENGTHS)
    s = (s_caps[:, None] * fractions[None, :]).ravel()
    return theta, s


def _newton_shoot(rho_t: float, z_t: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Run damped Newton from every seed; return converged (theta, s, res)."""
    theta0, s0 = _seed_lattice()
    if rho_t < _AXIS_TOL:
        signs = np.ones_like(theta0)
    else:
        # Chord radius can carry either sign of sinc; both sheets of the
        # residual map are explored.
        theta0 = np.concatenate([theta0, theta0])
        s0 = np.concatenate([s0, s0])
        signs = np.concatenate([np.ones(theta0.size // 2), -np.ones(theta0.size // 2)])

    theta, s, sign = theta0.copy(), s0.copy(), signs
    done_theta, done_s, done_res = [], [], []

    for _ in range(_NEWTON_ITERATIONS):
        f1, f2 = _shoot_residuals(theta, s, rho_t, z_t, sign)
        res = np.hypot(f1, f2)
        conv = res < _NEWTON_TOL
        if conv.any():
            done_theta.append(theta[conv])
            done_s.append(s[conv])
            done_res.append(res[conv])
        keep = ~conv
        theta, s, sign, f1, f2, res = (
            a[keep] for a in (theta, s, sign, f1, f2, res)
        )
        if theta.size == 0:
            break

        h_t = 1e-7
        h_s = 1e-7 * np.maximum(1.0, np.abs(s))
        p1, p2 = _shoot_residuals(theta + h_t, s, rho_t, z_t, sign)
        m1, m2 = _shoot_residuals(theta - h_t, s, rho_t, z_t, sign)
        j11 = (p1 - m1) / (2.0 * h_t)
        j21 = (p2 - m2) / (2.0 * h_t)
        p1, p2 = _shoot_residuals(theta, s + h_s, rho_t, z_t, sign)
        m1, m2 = _shoot_residuals(theta, s - h_s, rho_t, z_t, sign)
        j12 = (p1 - m1) / (2.0 * h_s)
        j22 = (p2 - m2) / (2.0 * h_s)

        det = j11 * j22 - j12 * j21
        singular = np.abs(det) < 1e-14
        det = np.where(singular, 1.0, det)
        d_theta = np.clip(-(j22 * f1 - j12 * f2) / det, -0.5, 0.5)
        d_s = np.clip(-(-j21 * f1 + j11 * f2) / det, -2.0, 2.0)
        theta = theta + d_theta
        s = np.maximum(s + d_s, 1e-9)

        alive = ~singular & (np.abs(theta) <= 3.2) & (s <= 150.0) & np.isfinite(res)
        theta, s, sign = theta[alive], s[alive], sign[alive]

    if theta.size:
        # Survivors of the iteration cap may still be acceptable at the
        # caller's (looser) tolerance, e.g. near conjugate points where the
        # Jacobian degenerates and convergence slows.
        f1, f2 = _shoot_residuals(theta, s, rho_t, z_t, sign)
        done_theta.append(theta)
        done_s.append(s)
        done_res.append(np.hypot(f1, f2))

    if not done_theta:
        return np.empty(0), np.empty(0), np.empty(0)
    return np.concatenate(done_theta), np.concatenate(done_s), np.concatenate(done_res)


def shoot_candidates(target: HeisPoint, tol: float = 1e-8) -> list[ShootingSolution]:
    """All geodesics from the origin reaching target within tol.

    Deduplicated (two solutions are the same when |d gamma| + |d phi| +
    |d s| < 1e-6, phi compared circularly) and sorted by ascending arc
    length.  Raises ShootingConvergenceError if the multistart budget is
    exhausted with no residual below tol.
    """
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    if target == ORIGIN:
        raise ValueError("target must differ from the origin")

    rho_t = math.hypot(target.x, target.y)
    chord_angle = math.atan2(target.y, target.x)
    axis = rho_t < _AXIS_TOL

    theta, s, _ = _newton_shoot(rho_t, target.z)

    raw = []
    for th, arc in zip(theta, s):
        gamma = float(np.clip(math.sin(th), -1.0, 1.0))
        r = math.sqrt(max(0.0, 1.0 - gamma * gamma))
        w = gamma * arc
        q = r * arc * float(_sinc(w))
        if axis:
            phi = 0.0
        elif q >= 0.0:
            phi = (chord_angle - w) % TWO_PI
        else:
            phi = (chord_angle + math.pi - w) % TWO_PI
        residual = math.hypot(abs(q) - rho_t, float(_height(gamma, arc)) - target.z)
        if residual < tol and arc > 0.0:
            raw.append((gamma, phi, float(arc), residual))

    if axis and abs(target.z) > 0.0:
        # The vertical geodesic reaches every axis point directly.
        raw.append((math.copysign(1.0, target.z), 0.0, abs(target.z), rho_t))

    if not raw:
        raise ShootingConvergenceError(
            f"no geodesic found within tolerance {tol} for target "
            f"({target.x}, {target.y}, {target.z})"
        )

    # Keep the best-converged representative of each duplicate cluster.
    raw.sort(key=lambda c: c[3])
    kept: list[tuple[float, float, float, float]] = []
    for cand in raw:
        for other in kept:
            d_phi = abs(cand[1] - other[1])
            d_phi = min(d_phi, TWO_PI - d_phi)
            if abs(cand[0] - other[0]) + d_phi + abs(cand[2] - other[2]) < _DEDUP_TOL:
                break
        else:
            kept.append(cand)
    kept.sort(key=lambda c: c[2])

    return [
        ShootingSolution(
            spec=GeodesicSpec(
                base=ORIGIN,
                r=math.sqrt(max(0.0, 1.0 - gamma * gamma)),
                phi=phi,
                gamma=gamma,
            ),
            s=arc,
            residual=residual,
            axis_family=axis,
        )
        for gamma, phi, arc, residual in kept
    ]


def riemannian_distance(p: HeisPoint, q: HeisPoint, tol: float = 1e-8) -> float:
    """Length of the shortest found geodesic between p and q.

    Left-invariant by construction: the problem is translated to
    distance(0, p^-1 * q) before solving.  Among converged shooting
    candidates the minimal arc length is reported; global minimality is
    backed by the brute-force oracle rather than guaranteed a priori.
    """
    if p == q:
        return 0.0
    delta = group_mul(group_inv(p), q)
    if delta == ORIGIN:
        return 0.0
    return shoot_candidates(delta, tol=tol)[0].s


def _endpoint_grid(gammas, phis, lengths):
    g = gammas[:, None, None]
    f = phis[None, :, None]
    s = lengths[None, None, :]
    r = np.sqrt(np.clip(1.0 - g * g, 0.0, None))
    return origin_coordinates(r, f, g, s)


def _refine_lattice(center, halfwidth, target, s_cap):
    """Derivative-free shrinking-lattice descent of the endpoint miss."""
    offsets = np.linspace(-1.0, 1.0, 9)
    og, of, os_ = np.meshgrid(offsets, offsets, offsets, indexing="ij")
    center = np.array(center, dtype=float)
    halfwidth = np.array(halfwidth, dtype=float)
    tx, ty, tz = target
    best = (np.inf, center)
    for _ in range(80):
        g = np.clip(center[0] + og * halfwidth[0], -1.0, 1.0)
        f = center[1] + of * halfwidth[1]
        s = np.clip(center[2] + os_ * halfwidth[2], 1e-9, s_cap)
        r = np.sqrt(np.clip(1.0 - g * g, 0.0, None))
        x, y, z = origin_coordinates(r, f, g, s)
        miss = (x - tx) ** 2 + (y - ty) ** 2 + (z - tz) ** 2
        idx = np.unravel_index(np.argmin(miss), miss.shape)
        value = miss[idx]
        new_center = np.array([g[idx], f[idx], s[idx]])
        if value < best[0]:
            best = (value, new_center)
        on_edge = any(i in (0, 8) for i in idx)
        center = new_center
        if not on_edge:
            halfwidth = halfwidth * 0.5
        if halfwidth.max() < 1e-10:
            break
    return math.sqrt(best[0]), best[1]


def brute_force_distance(
    target: HeisPoint,
    grid: tuple[int, int, int] = (64, 64, 512),
    s_max: float = 10.0,
) -> float:
    """Grid-search upper bound for the distance from the origin to target.

    A dense lattice over gamma in [-1, 1], phi in [0, 2pi), s in (0, s_max]
    is scanned for endpoints within a ball whose radius is derived from the
    lattice spacing (a first-order sensitivity bound per point).  The
    smallest-s qualifying cells seed one local refinement pass each; the
    minimum refined arc length over the verified branches is returned.
    Raises TargetUnreachableError when nothing qualifies, which signals
    that s_max is too small for the target.
    """
    n_gamma, n_phi, n_s = grid
    if min(grid) < 16:
        raise ValueError("grid dimensions must each be at least 16")
    if target == ORIGIN:
        return 0.0

    gammas = np.linspace(-1.0, 1.0, n_gamma)
    phis = np.linspace(0.0, TWO_PI, n_phi, endpoint=False)
    lengths = s_max * np.arange(1, n_s + 1) / n_s
    d_gamma = gammas[1] - gammas[0]
    d_phi = phis[1] - phis[0]
    d_s = lengths[1] - lengths[0]

    x, y, z = _endpoint_grid(gammas, phis, lengths)
    miss = np.sqrt(
        (x - target.x) ** 2 + (y - target.y) ** 2 + (z - target.z) ** 2
    )

    # Per-point acceptance radius: displacement of the endpoint across half
    # a cell, from exact radial/angular/arc-length sensitivities plus a
    # finite-difference gamma sensitivity of the profile.
    g2 = gammas[:, None]
    s2 = lengths[None, :]
    r2 = np.sqrt(np.clip(1.0 - g2 * g2, 0.0, None))
    w2 = g2 * s2
    q2 = r2 * s2 * _sinc(w2)
    z2 = _height(g2, s2)
    dq_dg = np.gradient(q2, gammas, axis=0)
    dz_dg = np.gradient(z2, gammas, axis=0)
    zdot = g2 + r2 * r2 * s2 * _sinc(w2) * np.sin(w2)
    sens_gamma = np.sqrt(dq_dg**2 + (q2 * s2) ** 2 + dz_dg**2)
    sens_s = np.sqrt(r2 * r2 + zdot * zdot)
    sens_phi = np.abs(q2)
    radius = 0.75 * (d_gamma * sens_gamma + d_phi * sens_phi + d_s * sens_s)
    radius = radius[:, None, :]

    qualifying = miss <= radius
    candidates: list[tuple[int, int, int]] = []
    if qualifying.any():
        qi, qj, qk = np.nonzero(qualifying)
        order = np.argsort(lengths[qk], kind="stable")
        for i, j, k in zip(qi[order], qj[order], qk[order]):
            near = False
            for ci, cj, ck in candidates:
                dj = abs(int(j) - cj)
                dj = min(dj, n_phi - dj)
                if abs(int(i) - ci) <= 3 and dj <= 3 and abs(int(k) - ck) <= 3:
                    near = True
                    break
            if not near:
                candidates.append((int(i), int(j), int(k)))
            if len(candidates) >= 12:
                break
    else:
        flat = int(np.argmin(miss))
        i, j, k = np.unravel_index(flat, miss.shape)
        if miss[i, j, k] > 4.0 * radius[i, 0, k]:
            raise TargetUnreachableError(
                f"no lattice endpoint near target within s_max = {s_max}"
            )
        candidates.append((int(i), int(j), int(k)))

    hit_tol = 1e-6 * max(1.0, math.sqrt(target.x**2 + target.y**2 + target.z**2))
    verified: list[float] = []
    tgt = (target.x, target.y, target.z)
    for i, j, k in candidates:
        gap, refined = _refine_lattice(
            (gammas[i], phis[j], lengths[k]),
            (d_gamma, d_phi, d_s),
            tgt,
            1.25 * s_max,
        )
        if gap <= hit_tol:
            verified.append(float(refined[2]))
    if not verified:
        raise TargetUnreachableError(
            "no lattice candidate could be refined to a connecting geodesic; "
            "increase the grid resolution or s_max"
        )
    return min(verified)

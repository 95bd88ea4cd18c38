"""System definitions: flux maps, eigenstructure, and admissibility checks.

Every model fixes a family count n, the number p of negative-speed families,
and a working box in state space.  Characteristic speeds must keep their sign
pattern (families 1..p negative, p+1..n positive) on the admissible domain.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, HyperbolicityError

FD_JAC_STEP = 1e-6     # relative step for fallback flux Jacobians
FD_WEDGE_STEP = 1e-5   # central-difference step for hypothesis sweeps


def wedge(x, y):
    """Planar wedge product x ^ y = x0 y1 - x1 y0."""
    return float(x[0] * y[1] - x[1] * y[0])


@dataclass(frozen=True)
class EigenStructure:
    """Sorted eigenvalues with biorthonormal eigenvector bases.

    ``right[:, i-1]`` is r_i, ``left[i-1]`` is l_i, and left @ right = I.
    """

    lams: np.ndarray
    right: np.ndarray
    left: np.ndarray

    def r(self, family):
        return self.right[:, family - 1]

    def l(self, family):
        return self.left[family - 1]

    def lam(self, family):
        return float(self.lams[family - 1])


@dataclass(frozen=True)
class Box:
    """Axis-aligned box of admissible states."""

    lows: np.ndarray
    highs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lows", np.asarray(self.lows, dtype=float))
        object.__setattr__(self, "highs", np.asarray(self.highs, dtype=float))
        if np.any(self.lows >= self.highs):
            raise ValueError("box must have lows < highs")

    def contains(self, u, slack=0.0):
        u = np.asarray(u, dtype=float)
        return bool(np.all(u >= self.lows - slack) and np.all(u <= self.highs + slack))

    def grid(self, samples_per_axis):
        axes = [np.linspace(lo, hi, samples_per_axis)
                for lo, hi in zip(self.lows, self.highs)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def shrunk(self, margin):
        span = self.highs - self.lows
        return Box(self.lows + margin * span, self.highs - margin * span)


@dataclass
class HypothesisReport:
    """Outcome of the structural-hypothesis sweep over a sampling grid.

    ``margins`` stores the worst-case value of each inequality (positive
    means satisfied with that much room).
    """

    checks: dict
    margins: dict
    violations: list
    n_samples: int
    min_abs_speed: float
    max_abs_speed: float

    @property
    def admitted(self):
        return all(self.checks.values())

    def summary(self):
        lines = []
        for name in sorted(self.checks):
            status = "pass" if self.checks[name] else "FAIL"
            lines.append(f"{name:18s} {status}  margin={self.margins[name]: .3e}")
        return "\n".join(lines)


class FluxModel:
    """Base class for a strictly hyperbolic system u_t + f(u)_x = 0."""

    kind = "custom"
    has_chart = False

    def __init__(self, n, p, box, ref_state=None, predicate=None,
                 min_speed=0.0, curve_radius=0.5):
        self.n = int(n)
        self.p = int(p)
        self.box = box
        self.predicate = predicate
        self.min_speed = float(min_speed)
        self.curve_radius = float(curve_radius)
        if ref_state is None:
            ref_state = 0.5 * (box.lows + box.highs)
        self.ref_state = np.asarray(ref_state, dtype=float)

    # -- flux ------------------------------------------------------------

    def flux(self, u):
        raise NotImplementedError

    def jacobian(self, u):
        u = np.asarray(u, dtype=float)
        h = FD_JAC_STEP * max(1.0, float(np.max(np.abs(u))))
        cols = []
        for k in range(self.n):
            e = np.zeros(self.n)
            e[k] = h
            cols.append((self.flux(u + e) - self.flux(u - e)) / (2 * h))
        return np.stack(cols, axis=1)

    # -- eigenstructure ----------------------------------------------------

    def lambdas(self, u):
        return self.eigen(u).lams

    def eigen(self, u):
        return self._numeric_eigen(np.asarray(u, dtype=float))

    def _numeric_eigen(self, u):
        vals, vecs = np.linalg.eig(self.jacobian(u))
        if np.max(np.abs(vals.imag)) > 1e-9 * max(1.0, np.max(np.abs(vals.real))):
            raise HyperbolicityError(f"complex characteristic speeds at {u}")
        vals = vals.real
        order = np.argsort(vals)
        vals = vals[order]
        gaps = np.diff(vals)
        if len(gaps) and np.min(gaps) < 1e-10 * max(1.0, np.max(np.abs(vals))):
            raise HyperbolicityError(f"coincident characteristic speeds at {u}")
        right = np.real(vecs[:, order])
        right = right / np.linalg.norm(right, axis=0, keepdims=True)
        right = self._orient(u, vals, right)
        left = np.linalg.inv(right)
        return EigenStructure(vals, right, left)

    def _orient(self, u, lams, right):
        """Fix eigenvector signs: genuinely nonlinear direction if visible,
        first-nonzero-positive otherwise."""
        h = 1e-6
        out = right.copy()
        for i in range(self.n):
            r = out[:, i]
            try:
                lp = self._lambda_i(u + h * r, i)
                lm = self._lambda_i(u - h * r, i)
                g = (lp - lm) / (2 * h)
            except Exception:
                g = 0.0
            if abs(g) > 1e-7:
                if g < 0:
                    out[:, i] = -r
            else:
                nz = np.nonzero(np.abs(r) > 1e-12)[0]
                if len(nz) and r[nz[0]] < 0:
                    out[:, i] = -r
        return out

    def _lambda_i(self, u, i):
        vals = np.linalg.eigvals(self.jacobian(u))
        return float(np.sort(vals.real)[i])

    # -- Riemann coordinates ------------------------------------------------

    def to_riemann(self, u):
        raise NotImplementedError(f"{self.kind} model has no Riemann chart")

    def from_riemann(self, w):
        raise NotImplementedError(f"{self.kind} model has no Riemann chart")

    def chart_gradient(self, u, family):
        """Gradient of w_family at u, when a chart exists."""
        raise NotImplementedError

    # -- domain ------------------------------------------------------------

    def structurally_valid(self, u):
        """Positivity-type constraints that make the flux evaluable."""
        return bool(np.all(np.isfinite(u)))

    def in_domain(self, u, slack=1e-9):
        u = np.asarray(u, dtype=float)
        if not self.structurally_valid(u):
            return False
        if not self.box.contains(u, slack=slack):
            return False
        if self.predicate is not None and not self.predicate(u):
            return False
        return True

    def check_domain(self, u):
        if not self.in_domain(u):
            raise DomainError(f"state {np.asarray(u)} outside admissible domain")

    def admitted_grid(self, samples_per_axis=32):
        pts = self.box.grid(samples_per_axis)
        return np.array([u for u in pts if self.in_domain(u)])


class LinearModel(FluxModel):
    """Constant-coefficient system u_t + A u_x = 0."""

    kind = "linear"
    has_chart = True

    def __init__(self, A, box=None, ref_state=None, **kw):
        A = np.asarray(A, dtype=float)
        n = A.shape[0]
        if A.shape != (n, n):
            raise ValueError("A must be square")
        vals, vecs = np.linalg.eig(A)
        if np.max(np.abs(vals.imag)) > 1e-12 * max(1.0, np.max(np.abs(vals))):
            raise HyperbolicityError("A has complex eigenvalues")
        vals = vals.real
        order = np.argsort(vals)
        lams = vals[order]
        if n > 1 and np.min(np.diff(lams)) <= 0:
            raise HyperbolicityError("A has repeated eigenvalues")
        right = np.real(vecs[:, order])
        right = right / np.linalg.norm(right, axis=0, keepdims=True)
        for i in range(n):
            nz = np.nonzero(np.abs(right[:, i]) > 1e-12)[0]
            if len(nz) and right[nz[0], i] < 0:
                right[:, i] = -right[:, i]
        p = int(np.sum(lams < 0))
        if box is None:
            box = Box(-10 * np.ones(n), 10 * np.ones(n))
        if ref_state is None:
            ref_state = np.zeros(n)
        kw.setdefault("curve_radius", 1e9)   # linear curves are globally exact
        super().__init__(n, p, box, ref_state=ref_state, **kw)
        self.A = A
        self._eig = EigenStructure(lams, right, np.linalg.inv(right))

    def flux(self, u):
        return self.A @ np.asarray(u, dtype=float)

    def jacobian(self, u):
        return self.A

    def lambdas(self, u):
        return self._eig.lams

    def eigen(self, u):
        return self._eig

    def to_riemann(self, u):
        return self._eig.left @ (np.asarray(u, dtype=float) - self.ref_state)

    def from_riemann(self, w):
        return self.ref_state + self._eig.right @ np.asarray(w, dtype=float)

    def chart_gradient(self, u, family):
        return self._eig.left[family - 1]


class GasModel(FluxModel):
    """Isentropic gas in (density, velocity) variables.

    Flux (rho u, u^2/2 + K^2 rho^(gamma-1)/(gamma-1)) with 1 < gamma < 3.
    Characteristic speeds u -/+ c with sound speed c = K rho^((gamma-1)/2);
    the admissible domain is the subsonic band |u| < c where family 1 moves
    left and family 2 moves right.
    """

    kind = "gas"
    has_chart = True

    def __init__(self, K=1.0, gamma=2.0, box=None, ref_state=None,
                 min_speed=0.0, **kw):
        if not (1.0 < gamma < 3.0):
            raise ValueError("gas model requires 1 < gamma < 3")
        if K <= 0:
            raise ValueError("gas model requires K > 0")
        self.K = float(K)
        self.gamma = float(gamma)
        self.theta = 0.5 * (gamma - 1.0)
        if box is None:
            box = Box([0.5, -0.2], [1.5, 0.2])
        if ref_state is None:
            ref_state = np.array([1.0, 0.0])
        super().__init__(2, 1, box, ref_state=ref_state, min_speed=min_speed, **kw)
        self._w_ref = self._w_raw(self.ref_state)

    def sound_speed(self, rho):
        return self.K * rho ** self.theta

    def flux(self, u):
        rho, v = u
        return np.array([rho * v,
                         0.5 * v * v + self.K ** 2 * rho ** (self.gamma - 1.0)
                         / (self.gamma - 1.0)])

    def jacobian(self, u):
        rho, v = u
        return np.array([[v, rho],
                         [self.K ** 2 * rho ** (self.gamma - 2.0), v]])

    def lambdas(self, u):
        rho, v = u
        c = self.sound_speed(rho)
        return np.array([v - c, v + c])

    def eigen(self, u):
        rho, v = u
        c = self.sound_speed(rho)
        # r_i = du/dw_i in the Riemann chart; this keeps d(lambda_i)/dw_i
        # constant and positive, equal to (gamma + 1)/4.
        d = rho ** (1.0 - self.theta) / (2.0 * self.K)
        right = np.array([[-d, d], [0.5, 0.5]])
        e = self.K * rho ** (self.theta - 1.0)
        left = np.array([[-e, 1.0], [e, 1.0]])
        return EigenStructure(np.array([v - c, v + c]), right, left)

    def _w_raw(self, u):
        rho, v = u
        s = (self.K / self.theta) * rho ** self.theta
        return np.array([v - s, v + s])

    def to_riemann(self, u):
        return self._w_raw(np.asarray(u, dtype=float)) - self._w_ref

    def from_riemann(self, w):
        raw = np.asarray(w, dtype=float) + self._w_ref
        spread = 0.5 * (raw[1] - raw[0])
        if spread <= 0.0:
            raise DomainError("Riemann coordinates hit vacuum (w2 <= w1)")
        rho = (self.theta * spread / self.K) ** (1.0 / self.theta)
        v = 0.5 * (raw[0] + raw[1])
        return np.array([rho, v])

    def chart_gradient(self, u, family):
        rho = u[0]
        e = self.K * rho ** (self.theta - 1.0)
        return np.array([-e, 1.0]) if family == 1 else np.array([e, 1.0])

    def structurally_valid(self, u):
        if not np.all(np.isfinite(u)):
            return False
        rho, v = u
        if rho <= 0.0:
            return False
        # keep the declared sign pattern lambda_1 < 0 < lambda_2
        c = self.sound_speed(rho)
        return abs(v) < c - self.min_speed


class TableModel(FluxModel):
    """Flux given per component as a table of monomial terms.

    ``terms[k]`` is a list of (coefficient, exponents) pairs; exponents is a
    length-n integer tuple.  Jacobians come from term-wise differentiation,
    the eigenstructure from the numeric fallback.
    """

    kind = "custom-table"

    def __init__(self, terms, p, box, **kw):
        n = len(terms)
        self.terms = [[(float(c), tuple(int(e) for e in ex)) for c, ex in comp]
                      for comp in terms]
        for comp in self.terms:
            for _, ex in comp:
                if len(ex) != n:
                    raise ValueError("exponent tuple length must equal n")
        super().__init__(n, p, box, **kw)

    def flux(self, u):
        u = np.asarray(u, dtype=float)
        out = np.zeros(self.n)
        for k, comp in enumerate(self.terms):
            for c, ex in comp:
                out[k] += c * np.prod(u ** np.asarray(ex))
        return out

    def jacobian(self, u):
        u = np.asarray(u, dtype=float)
        J = np.zeros((self.n, self.n))
        for k, comp in enumerate(self.terms):
            for c, ex in comp:
                for j in range(self.n):
                    if ex[j] == 0:
                        continue
                    dex = list(ex)
                    dex[j] -= 1
                    J[k, j] += c * ex[j] * np.prod(u ** np.asarray(dex))
        return J


# -- module-level operations ------------------------------------------------


def eval_flux(model, u):
    """Flux f(u); raises DomainError outside the admissible domain."""
    u = np.asarray(u, dtype=float)
    model.check_domain(u)
    return model.flux(u)


def eigen_structure(model, u):
    """Sorted, biorthonormal eigenstructure of Df(u)."""
    u = np.asarray(u, dtype=float)
    model.check_domain(u)
    return model.eigen(u)


def riemann_coordinates(model, u):
    """Chart value w(u), anchored so the model's reference state maps to 0."""
    u = np.asarray(u, dtype=float)
    model.check_domain(u)
    return model.to_riemann(u)


def from_riemann_coordinates(model, w):
    """Inverse chart; raises DomainError when w leaves the chart range."""
    u = model.from_riemann(w)
    model.check_domain(u)
    return u


def _directional(fn, u, direction, h):
    return (fn(u + h * direction) - fn(u - h * direction)) / (2 * h)


def verify_hypotheses(model, samples_per_axis=32, fd_step=FD_WEDGE_STEP,
                      speed_floor=1e-6, respect_predicate=False):
    """Sweep the working box and measure the structural hypotheses.

    Checks the speed sign pattern, the uniform speed floor, genuine
    nonlinearity of every family, and (for 2x2 systems) the clockwise-turning
    wedge inequalities of the eigenvector fields.  Violations are collected,
    never raised.

    By default the sweep probes the whole box (so a box straying past a
    sonic line shows up as a sign violation); with ``respect_predicate`` it
    audits only the model's declared admissible domain, which is the
    admission check run before control experiments.
    """
    pts = model.box.grid(samples_per_axis)
    if respect_predicate:
        pts = np.array([u for u in pts if model.in_domain(u)])
    else:
        pts = np.array([u for u in pts
                        if model.structurally_valid(u) or _loose_valid(model, u)])
    checks, margins, violations = {}, {}, []

    sign_margin = np.inf
    floor_margin = np.inf
    gnl_margin = [np.inf] * model.n
    wedge_rr = -np.inf
    wedge_bend = [-np.inf, -np.inf]
    max_speed = 0.0
    n_used = 0

    for u in pts:
        try:
            eig = model.eigen(u)
        except HyperbolicityError:
            violations.append(("hyperbolicity", u))
            continue
        n_used += 1
        lams = eig.lams
        max_speed = max(max_speed, float(np.max(np.abs(lams))))

        m_sign = min(float(np.min(-lams[:model.p])) if model.p else np.inf,
                     float(np.min(lams[model.p:])) if model.p < model.n else np.inf)
        if m_sign < sign_margin:
            sign_margin = m_sign
        if m_sign <= 0:
            violations.append(("speed_signs", u))

        m_floor = float(np.min(np.abs(lams)))
        floor_margin = min(floor_margin, m_floor)
        if m_floor < speed_floor:
            violations.append(("speed_floor", u))

        for i in range(1, model.n + 1):
            r = eig.r(i)
            g = _directional(lambda v, i=i: model.lambdas(v)[i - 1], u, r, fd_step)
            gnl_margin[i - 1] = min(gnl_margin[i - 1], float(g))
            if g <= 0:
                violations.append((f"gnl_{i}", u))

        if model.n == 2:
            r1, r2 = eig.r(1), eig.r(2)
            w12 = wedge(r1, r2)
            wedge_rr = max(wedge_rr, w12)
            if w12 >= 0:
                violations.append(("wedge_r1_r2", u))
            for i, r in ((1, r1), (2, r2)):
                drr = _directional(lambda v, i=i: model.eigen(v).r(i), u, r, fd_step)
                wb = wedge(r, drr)
                wedge_bend[i - 1] = max(wedge_bend[i - 1], wb)
                if wb >= 0:
                    violations.append((f"wedge_bend_{i}", u))

    checks["speed_signs"] = sign_margin > 0
    margins["speed_signs"] = sign_margin
    checks["speed_floor"] = floor_margin >= speed_floor
    margins["speed_floor"] = floor_margin
    checks["speed_band"] = np.isfinite(max_speed)
    margins["speed_band"] = max_speed
    for i in range(1, model.n + 1):
        checks[f"gnl_{i}"] = gnl_margin[i - 1] > 0
        margins[f"gnl_{i}"] = gnl_margin[i - 1]
    if model.n == 2:
        checks["wedge_r1_r2"] = wedge_rr < 0
        margins["wedge_r1_r2"] = -wedge_rr
        for i in (1, 2):
            checks[f"wedge_bend_{i}"] = wedge_bend[i - 1] < 0
            margins[f"wedge_bend_{i}"] = -wedge_bend[i - 1]

    return HypothesisReport(checks, margins, violations, n_used,
                            floor_margin, max_speed)


def _loose_valid(model, u):
    """Accept states the sweep should still probe (e.g. supersonic gas
    states inside the box, which must show up as sign violations)."""
    if not np.all(np.isfinite(u)):
        return False
    if isinstance(model, GasModel):
        return u[0] > 0
    return True


def crossing_time(model, interval, samples_per_axis=33, speed_floor=1e-6):
    """Max time for a wave of any family to cross the interval.

    Computed as (b - a) / min |lambda_i| over the admitted box grid; raises
    DomainError when the sampled speeds dip below the floor.
    """
    a, b = interval
    grid = model.admitted_grid(samples_per_axis)
    if len(grid) == 0:
        raise DomainError("no admissible states in the working box")
    min_speed = min(float(np.min(np.abs(model.lambdas(u)))) for u in grid)
    if min_speed < speed_floor:
        raise DomainError(
            f"characteristic speed {min_speed:.3e} below floor {speed_floor:.1e}")
    return (b - a) / min_speed

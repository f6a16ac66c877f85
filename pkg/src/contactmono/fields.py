"""Field backends: exact invariant sector and the Heisenberg nilmanifold grid.

The invariant backend stores one coefficient per field component; frame
derivatives vanish identically, so it is exact and finite dimensional.
The grid backend discretizes the nilmanifold obtained from [0,1)^3 with
identifications (x,y,z) ~ (x+1,y,z) ~ (x,y+1,z+2x) ~ (x,y,z+1), on which
T = d/dz, e1 = d/dx + 2y d/dz, e2 = d/dy realize [e1,e2] = -2T globally.
Second-order central differences; every boundary wrap is an index
permutation, so the discrete frame operators are exactly skew-adjoint.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from .algebra import ModelStructure
from .errors import BackendMismatch, TorsionError, WrongModel
from .pseudohermitian import PhInvariants

DIR_T = "0"
DIR_Z1 = "1"
DIR_Z1BAR = "1bar"


class InvariantBackend:
    """Constant-coefficient fields; all frame derivatives are zero."""

    kind = "invariant"

    def __init__(self, model: ModelStructure):
        self.model = model
        self.volume = 2.0  # contact volume of the unit fundamental domain

    def zero(self):
        return 0j

    def integrate(self, values):
        return values * self.volume

    def sup(self, values):
        return abs(values)

    def __repr__(self):
        return f"InvariantBackend({self.model.name})"


class HeisGridBackend:
    """N^3 grid on the Heisenberg nilmanifold with the twisted y-wrap."""

    kind = "heis-grid"

    def __init__(self, model: ModelStructure, n: int):
        if model.c_float(1, 0, 2) != 0.0 or model.c_float(2, 0, 1) != 0.0:
            raise WrongModel("grid backend supports the Heisenberg model only")
        if n % 2 != 0 or n <= 0:
            raise ValueError("grid size N must be even and positive")
        self.model = model
        self.n = n
        self.h = 1.0 / n
        self.volume = 2.0
        self.y = (np.arange(n) * self.h)[None, :, None]  # broadcast over (i,j,k)
        self._build_wraps(n)

    def _build_wraps(self, n: int):
        i, j, k = np.meshgrid(
            np.arange(n), np.arange(n), np.arange(n), indexing="ij"
        )

        def flat(ii, jj, kk):
            return (ii * n + jj) * n + kk

        self.xp = flat((i + 1) % n, j, k).ravel()
        self.xm = flat((i - 1) % n, j, k).ravel()
        self.zp = flat(i, j, (k + 1) % n).ravel()
        self.zm = flat(i, j, (k - 1) % n).ravel()
        # y-wrap twists z by 2x: f(x,1,z) = f(x,0,z-2x), so crossing y = 1
        # upward reads index k - 2i (and downward k + 2i)
        up_k = np.where(j == n - 1, (k - 2 * i) % n, k)
        dn_k = np.where(j == 0, (k + 2 * i) % n, k)
        self.yp = flat(i, (j + 1) % n, up_k).ravel()
        self.ym = flat(i, (j - 1) % n, dn_k).ravel()

    def _shift(self, arr, idx):
        return arr.ravel()[idx].reshape(arr.shape)

    def d_T(self, arr):
        return (self._shift(arr, self.zp) - self._shift(arr, self.zm)) / (2 * self.h)

    def d_e1(self, arr):
        dx = (self._shift(arr, self.xp) - self._shift(arr, self.xm)) / (2 * self.h)
        return dx + 2 * self.y * self.d_T(arr)

    def d_e2(self, arr):
        return (self._shift(arr, self.yp) - self._shift(arr, self.ym)) / (2 * self.h)

    def zero(self):
        return np.zeros((self.n, self.n, self.n), dtype=complex)

    def integrate(self, values):
        return complex(np.sum(values)) * (self.volume / self.n**3)

    def sup(self, values):
        return float(np.max(np.abs(values)))

    def coords(self):
        n = self.n
        x = (np.arange(n) * self.h)[:, None, None]
        y = (np.arange(n) * self.h)[None, :, None]
        z = (np.arange(n) * self.h)[None, None, :]
        return x, y, z

    def __repr__(self):
        return f"HeisGridBackend(N={self.n})"


Backend = Union[InvariantBackend, HeisGridBackend]


def _check_same_backend(*objs):
    backends = {id(o.backend) for o in objs}
    if len(backends) > 1:
        raise BackendMismatch("fields live on different backends")


def _conj(x):
    return x.conjugate()


@dataclass
class SpinorField:
    """Section of the canonical bundle: (alpha, beta1bar / sqrt2-slot)."""

    alpha: object
    beta1bar: object
    backend: Backend

    def __add__(self, other):
        _check_same_backend(self, other)
        return SpinorField(
            self.alpha + other.alpha, self.beta1bar + other.beta1bar, self.backend
        )

    def __sub__(self, other):
        _check_same_backend(self, other)
        return SpinorField(
            self.alpha - other.alpha, self.beta1bar - other.beta1bar, self.backend
        )

    def __mul__(self, scalar):
        return SpinorField(self.alpha * scalar, self.beta1bar * scalar, self.backend)

    __rmul__ = __mul__

    def pointwise_sq(self):
        return self.alpha * _conj(self.alpha) + self.beta1bar * _conj(self.beta1bar)


@dataclass
class GaugeField:
    """Real 1-form a = a0 e0 + a1re e1 + a2re e2 on a backend."""

    a0: object
    a1re: object
    a2re: object
    backend: Backend

    def aT(self):
        return self.a0

    def aZ1(self):
        return (self.a1re - 1j * self.a2re) * 0.5

    def aZ1bar(self):
        return (self.a1re + 1j * self.a2re) * 0.5


def invariant_spinor(backend: InvariantBackend, alpha, beta1bar) -> SpinorField:
    return SpinorField(alpha, beta1bar, backend)


def invariant_gauge(backend: InvariantBackend, a0, a1re, a2re) -> GaugeField:
    return GaugeField(a0, a1re, a2re, backend)


def zero_gauge(backend: Backend) -> GaugeField:
    if backend.kind == "invariant":
        return GaugeField(0.0, 0.0, 0.0, backend)
    z = np.zeros((backend.n,) * 3)
    return GaugeField(z, z.copy(), z.copy(), backend)


def zero_spinor(backend: Backend) -> SpinorField:
    if backend.kind == "invariant":
        return SpinorField(0j, 0j, backend)
    return SpinorField(backend.zero(), backend.zero(), backend)


def _omega_weights(ph: PhInvariants):
    """i*omega evaluated on (T, Z1, Z1bar): connection weight of the beta slot."""
    w0, w1, w2 = ph.omega_float()
    return (
        1j * w0,
        1j * (w1 - 1j * w2) * 0.5,
        1j * (w1 + 1j * w2) * 0.5,
    )


def _frame_derivative(backend: Backend, direction: str, arr):
    if backend.kind == "invariant":
        return 0j
    if direction == DIR_T:
        return backend.d_T(arr)
    if direction == DIR_Z1:
        return (backend.d_e1(arr) - 1j * backend.d_e2(arr)) * 0.5
    if direction == DIR_Z1BAR:
        return (backend.d_e1(arr) + 1j * backend.d_e2(arr)) * 0.5
    raise ValueError(f"unknown direction {direction!r}")


def cov_deriv(
    f: SpinorField, direction: str, a: Optional[GaugeField], ph: PhInvariants
) -> SpinorField:
    """Gauge-twisted pseudohermitian covariant derivative, component-wise.

    alpha carries no connection weight; the beta slot carries i*omega(dir);
    both carry +i a(dir).
    """
    if a is not None:
        _check_same_backend(f, a)
    wT, wZ1, wZ1b = _omega_weights(ph)
    weight = {DIR_T: wT, DIR_Z1: wZ1, DIR_Z1BAR: wZ1b}[direction]
    if a is None:
        twist = 0j
    else:
        twist = {
            DIR_T: 1j * a.aT(),
            DIR_Z1: 1j * a.aZ1(),
            DIR_Z1BAR: 1j * a.aZ1bar(),
        }[direction]
    alpha = _frame_derivative(f.backend, direction, f.alpha) + twist * f.alpha
    beta = (
        _frame_derivative(f.backend, direction, f.beta1bar)
        + (weight + twist) * f.beta1bar
    )
    return SpinorField(alpha, beta, f.backend)


def dirac_xi(f: SpinorField, a: Optional[GaugeField], ph: PhInvariants) -> SpinorField:
    """Contact Dirac operator: components (-2 beta^a_{1b,1}, 2 alpha^a_{,1b})."""
    d_beta = cov_deriv(f, DIR_Z1, a, ph).beta1bar
    d_alpha = cov_deriv(f, DIR_Z1BAR, a, ph).alpha
    return SpinorField(-2 * d_beta, 2 * d_alpha, f.backend)


def dirac_eps(
    f: SpinorField, a: Optional[GaugeField], ph: PhInvariants, eps
) -> SpinorField:
    """eps-family Dirac operator, valid only for vanishing torsion.

    components: (2 beta^a_{1b,1} - i/eps alpha^a_{,0} + eps alpha,
                 i/eps beta^a_{1b,0} - 2 alpha^a_{,1b})
    """
    if not ph.torsion.is_zero():
        raise TorsionError("eps-family Dirac operator requires zero torsion")
    e = float(eps)
    d_beta_1 = cov_deriv(f, DIR_Z1, a, ph).beta1bar
    d_beta_0 = cov_deriv(f, DIR_T, a, ph).beta1bar
    d_alpha_0 = cov_deriv(f, DIR_T, a, ph).alpha
    d_alpha_1b = cov_deriv(f, DIR_Z1BAR, a, ph).alpha
    comp0 = 2 * d_beta_1 - (1j / e) * d_alpha_0 + e * f.alpha
    comp1 = (1j / e) * d_beta_0 - 2 * d_alpha_1b
    return SpinorField(comp0, comp1, f.backend)


def l2_inner(f: SpinorField, g: SpinorField) -> complex:
    """Hermitian L^2 pairing with volume density 2 on the fundamental domain."""
    _check_same_backend(f, g)
    integrand = f.alpha * _conj(g.alpha) + f.beta1bar * _conj(g.beta1bar)
    return f.backend.integrate(integrand)


def l2_norm_sq(f: SpinorField) -> float:
    val = l2_inner(f, f)
    return float(val.real if isinstance(val, complex) else val)


def scalar_l2_norm_sq(backend: Backend, values) -> float:
    out = backend.integrate(values * _conj(values))
    return float(out.real if isinstance(out, complex) else out)


def sup_phi_sq(f: SpinorField) -> float:
    return float(f.backend.sup(f.pointwise_sq()))


def divergence_check(v_idx: int, backend: Backend) -> float:
    """|integral of div(e_v)| for the invariant frame fields.

    Invariant backend: identically zero.  Grid backend: the discrete
    coordinate divergence plus the integrated frame derivative of test
    functions, both of which cancel exactly up to roundoff.
    """
    if backend.kind == "invariant":
        return 0.0
    n = backend.n
    x, y, z = backend.coords()
    ones = np.ones((n, n, n), dtype=complex)
    # discrete coordinate divergence of the frame field
    if v_idx == 1:
        # e1 = d/dx + 2y d/dz: div = Dx(1) + Dz(2y)
        div = (
            backend._shift(ones, backend.xp) - backend._shift(ones, backend.xm)
        ) / (2 * backend.h) + backend.d_T(2 * y * ones)
    elif v_idx == 2:
        div = (
            backend._shift(ones, backend.yp) - backend._shift(ones, backend.ym)
        ) / (2 * backend.h)
    else:
        div = backend.d_T(ones)
    total = abs(backend.integrate(div))
    # summation by parts: the integrated frame derivative of any state vanishes
    test = np.cos(2 * np.pi * x) * np.sin(2 * np.pi * y) + np.sin(2 * np.pi * z) * (
        1 + np.cos(2 * np.pi * x)
    )
    deriv = {0: backend.d_T, 1: backend.d_e1, 2: backend.d_e2}[v_idx](test + 0j)
    total = max(total, abs(backend.integrate(deriv)))
    return float(total)


@dataclass(frozen=True)
class AdjointReport:
    lhs: complex
    rhs: complex

    @property
    def gap(self) -> float:
        return abs(self.lhs - self.rhs)


def adjoint_check(
    f: SpinorField,
    g: SpinorField,
    direction: str,
    a: Optional[GaugeField],
    ph: PhInvariants,
) -> AdjointReport:
    """<nabla_v f, g> against <f, -nabla_vbar g>; div(v) = 0 on these backends.

    The formal adjoint of nabla_v is -nabla_{conj(v)}: T is real while
    Z1* = -Z1bar.
    """
    _check_same_backend(f, g)
    conj_dir = {DIR_T: DIR_T, DIR_Z1: DIR_Z1BAR, DIR_Z1BAR: DIR_Z1}[direction]
    lhs = l2_inner(cov_deriv(f, direction, a, ph), g)
    rhs = -l2_inner(f, cov_deriv(g, conj_dir, a, ph))
    return AdjointReport(lhs=lhs, rhs=rhs)


def gauge_curvature_components(a: GaugeField, m: ModelStructure):
    """(da_01, da_02, da_12) of the gauge 1-form in the frame coframe.

    da_jk = e_j(a_k) - e_k(a_j) + sum_i a_i c^i_{jk}; frame derivatives
    vanish on the invariant backend.
    """
    b = a.backend
    comps = (a.a0, a.a1re, a.a2re)
    if b.kind == "invariant":
        d = {0: 0.0, 1: 0.0, 2: 0.0}
        deriv = lambda j, k: 0.0  # noqa: E731
    else:
        ops = {0: b.d_T, 1: b.d_e1, 2: b.d_e2}
        deriv = lambda j, k: ops[j](comps[k] + 0j).real  # noqa: E731
    out = []
    for (j, k) in ((0, 1), (0, 2), (1, 2)):
        struct = sum(comps[i] * m.c_float(i, j, k) for i in range(3))
        out.append(deriv(j, k) - deriv(k, j) + struct)
    return tuple(out)


def b_curvature_components(a: GaugeField, ph: PhInvariants, m: ModelStructure, eps):
    """(F12, F01, F02) of F_b = (i/2) d(omega + eps theta) + i da.

    Components follow the layout F_b = i(F12 e1^e2 + F01 e0^e1 + F02 e0^e2).
    """
    from .algebra import exterior_d, theta as theta_form

    e = float(eps)
    domega = exterior_d(ph.omega, m)
    dtheta = exterior_d(theta_form(), m)

    def background(j, k):
        return 0.5 * (
            domega.coeff(j, k).to_complex().real
            + e * dtheta.coeff(j, k).to_complex().real
        )

    da01, da02, da12 = gauge_curvature_components(a, m)
    return (
        background(1, 2) + da12,
        background(0, 1) + da01,
        background(0, 2) + da02,
    )


def anticommutator_pair(
    f: SpinorField, a: GaugeField, ph: PhInvariants, m: ModelStructure, eps
):
    """{nabla_T-block, nabla_Xi-block} applied to f, twice.

    Returns (direct, closed): direct composes covariant derivatives; closed
    evaluates the displayed endomorphism built from the torsion and the
    half-trace curvature component F0 = F01 + i F02.  The two agree for
    vanishing torsion (exactly modulo discretization).
    """

    def nabla_T(s: SpinorField) -> SpinorField:
        d = cov_deriv(s, DIR_T, a, ph)
        return SpinorField(-1j * d.alpha, 1j * d.beta1bar, s.backend)

    def nabla_Xi(s: SpinorField) -> SpinorField:
        dz1 = cov_deriv(s, DIR_Z1, a, ph)
        dz1b = cov_deriv(s, DIR_Z1BAR, a, ph)
        return SpinorField(2 * dz1.beta1bar, -2 * dz1b.alpha, s.backend)

    direct_f = nabla_T(nabla_Xi(f)) + nabla_Xi(nabla_T(f))

    f12, f01, f02 = b_curvature_components(a, ph, m, eps)
    f0 = f01 + 1j * f02
    a11 = ph.a11.to_complex()
    a1b1b = ph.torsion.to_complex()
    # the covariant derivative of the constant torsion vanishes on these
    # homogeneous models, so only the displayed terms below survive
    d_beta_1b = cov_deriv(f, DIR_Z1BAR, a, ph).beta1bar
    d_alpha_1 = cov_deriv(f, DIR_Z1, a, ph).alpha
    row0 = (
        2j * a11 * d_beta_1b
        + np.conj(f0) * f.beta1bar
        - 2 * a11 * a.aZ1bar() * f.beta1bar
    )
    row1 = 2j * a1b1b * d_alpha_1 + f0 * f.alpha - 2 * a1b1b * a.aZ1() * f.alpha
    closed_f = SpinorField(row0, row1, f.backend)
    return direct_f, closed_f


def gauge_transform(a: GaugeField, f: SpinorField, chi) -> Tuple[GaugeField, SpinorField]:
    """Phi -> exp(i chi) Phi, a -> a - d(chi).

    With the +i a(X) twist in the covariant derivative this pairing is the
    residual-preserving gauge action (exactly for constant chi, O(h^2) on
    the grid for smooth chi).
    """
    b = a.backend
    if b.kind == "invariant":
        # constant chi: a unchanged
        phase = np.exp(1j * chi)
        return a, SpinorField(f.alpha * phase, f.beta1bar * phase, b)
    d0 = b.d_T(chi + 0j).real
    d1 = b.d_e1(chi + 0j).real
    d2 = b.d_e2(chi + 0j).real
    a_new = GaugeField(a.a0 - d0, a.a1re - d1, a.a2re - d2, b)
    phase = np.exp(1j * chi)
    f_new = SpinorField(f.alpha * phase, f.beta1bar * phase, b)
    return a_new, f_new


# --- deterministic test states -------------------------------------------------


def trig_spinor(backend: HeisGridBackend, rng: np.random.Generator, kmax: int = 2) -> SpinorField:
    """Random trigonometric-polynomial spinor in the z-independent sector.

    Pure plane waves exp(2 pi i (k x + l y)) are the honest trigonometric
    functions on the nilmanifold; z-carrying modes are theta-like and are
    generated separately by theta_state.
    """
    x, y, _ = backend.coords()
    shape = (backend.n,) * 3

    def field():
        out = np.zeros(shape, dtype=complex)
        for k in range(-kmax, kmax + 1):
            for l in range(-kmax, kmax + 1):
                c = rng.normal(scale=1.0 / (1 + k * k + l * l)) + 1j * rng.normal(
                    scale=1.0 / (1 + k * k + l * l)
                )
                out = out + c * np.exp(2j * np.pi * (k * x + l * y))
        return out

    return SpinorField(field(), field(), backend)


def constant_gauge(backend: HeisGridBackend, rng: np.random.Generator) -> GaugeField:
    shape = (backend.n,) * 3
    vals = rng.normal(scale=0.5, size=3)
    return GaugeField(
        np.full(shape, vals[0]), np.full(shape, vals[1]), np.full(shape, vals[2]), backend
    )


def save_grid_fields(prefix: str, backend: HeisGridBackend, named_fields):
    """Checkpoint grid fields: '<prefix>.bin' plus a '<prefix>.json' sidecar.

    Binary layout: for each field (in the sidecar's order) the N^3 complex
    values in row-major (x, y, z) order as little-endian float64 (re, im)
    pairs.  Real fields are stored the same way with zero imaginary parts.
    """
    import json as _json

    names = sorted(named_fields)
    flat = []
    for name in names:
        arr = np.ascontiguousarray(named_fields[name], dtype=complex)
        if arr.shape != (backend.n,) * 3:
            raise ValueError(f"field {name!r} has wrong shape {arr.shape}")
        pairs = np.empty((arr.size, 2), dtype="<f8")
        pairs[:, 0] = arr.real.ravel()
        pairs[:, 1] = arr.imag.ravel()
        flat.append(pairs.ravel())
    np.concatenate(flat).tofile(prefix + ".bin")
    sidecar = {
        "N": backend.n,
        "model": backend.model.name,
        "field-names": names,
    }
    with open(prefix + ".json", "w") as fh:
        _json.dump(sidecar, fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_grid_fields(prefix: str, model: ModelStructure):
    """Load a checkpoint written by save_grid_fields."""
    import json as _json

    with open(prefix + ".json") as fh:
        sidecar = _json.load(fh)
    if sidecar["model"] != model.name:
        raise WrongModel(
            f"checkpoint is for model {sidecar['model']!r}, not {model.name!r}"
        )
    backend = HeisGridBackend(model, int(sidecar["N"]))
    n3 = backend.n**3
    raw = np.fromfile(prefix + ".bin", dtype="<f8")
    names = sidecar["field-names"]
    if raw.size != 2 * n3 * len(names):
        raise ValueError("checkpoint size does not match its sidecar")
    out = {}
    for i, name in enumerate(names):
        chunk = raw[2 * n3 * i : 2 * n3 * (i + 1)].reshape(n3, 2)
        out[name] = (chunk[:, 0] + 1j * chunk[:, 1]).reshape((backend.n,) * 3)
    return backend, out


def theta_state(backend: HeisGridBackend, m: int = 1, sigma: float = 0.2, kmax: int = 5):
    """Deck-invariant smooth function with z-frequency m.

    f = exp(2 pi i m z) sum_n phi(y - n) exp(-4 pi i m n x) with a Gaussian
    bump phi; invariant under (x,y+1,z+2x) by the index shift n -> n+1.
    """
    x, y, z = backend.coords()
    out = np.zeros((backend.n,) * 3, dtype=complex)
    for n in range(-kmax, kmax + 1):
        out = out + np.exp(-((y - n - 0.5) ** 2) / (2 * sigma**2)) * np.exp(
            -4j * np.pi * m * n * x
        )
    return out * np.exp(2j * np.pi * m * z)

"""Monopole residuals, energy identities, Gauss-Newton solver, and the sweep.

Two coupled systems are handled over a chosen backend:

  contact system (eps is None):
      -2 beta^a_{1b,1} = 0,   2 alpha^a_{,1b} = 0,
      da(e1,e2) - W = |alpha|^2 - |beta|^2

  eps family (eps set, torsion-free models only):
      2 beta^a_{1b,1} - (i/eps) alpha^a_{,0} + eps alpha = 0,
      (i/eps) beta^a_{1b,0} - 2 alpha^a_{,1b} = 0,
      F12 = (|alpha|^2 - |beta|^2)/2,   (1/eps)(F01 + i F02) = conj(alpha) beta

with F the curvature of the half-trace form b = (i/2)(omega + eps theta) + i a.
Gauss-Newton on the stacked weighted residual; the optional Reeb constraint
(alpha^a_{,0} = beta^a_{1b,0} = 0) joins the residual when requested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .algebra import ModelStructure
from .errors import NotASolution, PreconditionError, TorsionError, WrongModel
from .fields import (
    DIR_T,
    DIR_Z1,
    DIR_Z1BAR,
    GaugeField,
    HeisGridBackend,
    InvariantBackend,
    SpinorField,
    b_curvature_components,
    cov_deriv,
    dirac_eps,
    dirac_xi,
    gauge_curvature_components,
    l2_norm_sq,
    scalar_l2_norm_sq,
    sup_phi_sq,
)
from .pseudohermitian import PhInvariants, derive_ph_invariants


@dataclass
class MonopoleState:
    a: GaugeField
    phi: SpinorField
    model: ModelStructure
    eps: Optional[float] = None

    @property
    def backend(self):
        return self.phi.backend


@dataclass(frozen=True)
class ResidualReport:
    r_dirac: float
    r_curv: float
    r_constraint: float
    total: float

    def as_dict(self):
        return {
            "r_dirac": self.r_dirac,
            "r_curv": self.r_curv,
            "r_constraint": self.r_constraint,
            "total": self.total,
        }


def _reeb_constraint_norm_sq(s: MonopoleState, ph: PhInvariants) -> float:
    da = cov_deriv(s.phi, DIR_T, s.a, ph)
    return scalar_l2_norm_sq(s.backend, da.alpha) + scalar_l2_norm_sq(
        s.backend, da.beta1bar
    )


def residual_contact(s: MonopoleState, ph: PhInvariants) -> ResidualReport:
    """Residual of the contact monopole system (eps-free)."""
    if s.eps is not None:
        raise ValueError("state carries eps; use residual_sw")
    d = dirac_xi(s.phi, s.a, ph)
    r_dirac_sq = l2_norm_sq(d)
    _, _, da12 = gauge_curvature_components(s.a, s.model)
    w = ph.webster_float()
    curv = da12 - w - s.phi.alpha * np.conj(s.phi.alpha) + s.phi.beta1bar * np.conj(
        s.phi.beta1bar
    )
    r_curv_sq = scalar_l2_norm_sq(s.backend, curv)
    r_con_sq = _reeb_constraint_norm_sq(s, ph)
    return ResidualReport(
        r_dirac=math.sqrt(max(r_dirac_sq, 0.0)),
        r_curv=math.sqrt(max(r_curv_sq, 0.0)),
        r_constraint=math.sqrt(max(r_con_sq, 0.0)),
        total=math.sqrt(max(r_dirac_sq + r_curv_sq, 0.0)),
    )


def residual_sw(s: MonopoleState, ph: PhInvariants) -> ResidualReport:
    """Residual of the eps-family system (both curvature lines included)."""
    if s.eps is None:
        raise ValueError("state carries no eps; use residual_contact")
    d = dirac_eps(s.phi, s.a, ph, s.eps)
    r_dirac_sq = l2_norm_sq(d)
    f12, f01, f02 = b_curvature_components(s.a, ph, s.model, s.eps)
    alpha, beta = s.phi.alpha, s.phi.beta1bar
    line1 = f12 - 0.5 * (alpha * np.conj(alpha) - beta * np.conj(beta))
    line2 = (f01 + 1j * f02) / float(s.eps) - np.conj(alpha) * beta
    r_curv_sq = scalar_l2_norm_sq(s.backend, line1) + scalar_l2_norm_sq(
        s.backend, line2
    )
    r_con_sq = _reeb_constraint_norm_sq(s, ph)
    return ResidualReport(
        r_dirac=math.sqrt(max(r_dirac_sq, 0.0)),
        r_curv=math.sqrt(max(r_curv_sq, 0.0)),
        r_constraint=math.sqrt(max(r_con_sq, 0.0)),
        total=math.sqrt(max(r_dirac_sq + r_curv_sq, 0.0)),
    )


@dataclass(frozen=True)
class WeitzenbockReport:
    grad_sq: float  # sum_j ||nabla_{e_j} Phi||^2
    webster_term: float  # 2 int W |beta|^2
    gauge_term: float  # int da(e1,e2) (|alpha|^2 - |beta|^2)
    reeb_term: float  # 2i int (alpha^a_{,0} conj(alpha) - beta^a_{1b,0} beta_1)
    dirac_sq: float  # ||D_xi Phi||^2, computed independently

    @property
    def rhs(self):
        return self.grad_sq + self.webster_term + self.gauge_term + self.reeb_term

    @property
    def gap(self):
        return abs(self.dirac_sq - self.rhs)

    def as_dict(self):
        return {
            "grad_sq": self.grad_sq,
            "webster_term": self.webster_term,
            "gauge_term": self.gauge_term,
            "reeb_term": self.reeb_term,
            "dirac_sq": self.dirac_sq,
        }


def weitzenbock_energy(s: MonopoleState, ph: PhInvariants) -> WeitzenbockReport:
    """The four energy summands against an independent Dirac norm."""
    a, phi, b = s.a, s.phi, s.backend
    d_z1 = cov_deriv(phi, DIR_Z1, a, ph)
    d_z1b = cov_deriv(phi, DIR_Z1BAR, a, ph)
    # real frame directions: e1 = Z1 + Z1bar, e2 = i(Z1 - Z1bar)
    grad_sq = 0.0
    for comp in ("alpha", "beta1bar"):
        u, v = getattr(d_z1, comp), getattr(d_z1b, comp)
        grad_sq += scalar_l2_norm_sq(b, u + v)
        grad_sq += scalar_l2_norm_sq(b, 1j * (u - v))
    w = ph.webster_float()
    abs_b_sq = phi.beta1bar * np.conj(phi.beta1bar)
    webster_term = 2 * w * float(np.real(b.integrate(abs_b_sq)))
    _, _, da12 = gauge_curvature_components(a, s.model)
    dens = phi.alpha * np.conj(phi.alpha) - abs_b_sq
    gauge_term = float(np.real(b.integrate(da12 * dens)))
    d_t = cov_deriv(phi, DIR_T, a, ph)
    reeb_integrand = d_t.alpha * np.conj(phi.alpha) - d_t.beta1bar * np.conj(
        phi.beta1bar
    )
    reeb_term = float(np.real(2j * b.integrate(reeb_integrand)))
    dirac_sq = l2_norm_sq(dirac_xi(phi, a, ph))
    return WeitzenbockReport(
        grad_sq=grad_sq,
        webster_term=webster_term,
        gauge_term=gauge_term,
        reeb_term=reeb_term,
        dirac_sq=dirac_sq,
    )


def energy_identity(s: MonopoleState, ph: PhInvariants, tol: float = 1e-9) -> float:
    """grad energy + int W |Phi|^2 + int (|alpha|^2-|beta|^2)^2 for solutions.

    Preconditions: the contact residual and the Reeb constraint both pass tol.
    For positive Webster curvature a genuine solution forces this to vanish,
    which in turn forces Phi = 0.
    """
    rr = residual_contact(s, ph)
    if rr.total > tol or rr.r_constraint > tol:
        raise NotASolution(
            f"state is not a constrained solution: total={rr.total:.3e}, "
            f"constraint={rr.r_constraint:.3e}"
        )
    rep = weitzenbock_energy(s, ph)
    b = s.backend
    phi_sq = s.phi.pointwise_sq()
    w = ph.webster_float()
    term_w = w * float(np.real(b.integrate(phi_sq)))
    dens = s.phi.alpha * np.conj(s.phi.alpha) - s.phi.beta1bar * np.conj(
        s.phi.beta1bar
    )
    term_q = float(np.real(b.integrate(dens * np.conj(dens))))
    return rep.grad_sq + term_w + term_q


# --- Heisenberg closed-form family ---------------------------------------------


@dataclass(frozen=True)
class FamilyMembership:
    member: bool
    curvature_gap: float
    dirac_gap: float

    def as_dict(self):
        return {
            "member": self.member,
            "curvature_gap": self.curvature_gap,
            "dirac_gap": self.dirac_gap,
        }


class HeisenbergFamily:
    """Exact invariant solution family of the contact system on gen(0,0).

    2 a0 = |alpha|^2 - |beta|^2, and a(Z1) must annihilate the spinor:
    a1 beta = 0 and conj(a1) alpha = 0 (a1 is free only on reducibles).
    """

    def __init__(self, model: ModelStructure):
        if any(
            model.c_float(i, j, k) != 0.0
            for i in (1, 2)
            for (j, k) in ((0, 1), (0, 2), (1, 2))
        ):
            raise WrongModel("closed form is specific to the Heisenberg model")
        self.model = model

    @staticmethod
    def a0_for(alpha: complex, beta1bar: complex) -> float:
        return (abs(alpha) ** 2 - abs(beta1bar) ** 2) / 2.0

    def membership(self, s: MonopoleState, tol: float = 1e-10) -> FamilyMembership:
        if s.backend.kind != "invariant":
            raise WrongModel("closed form describes the invariant sector")
        alpha, beta = complex(s.phi.alpha), complex(s.phi.beta1bar)
        a0 = float(np.real(s.a.a0))
        a1 = complex(s.a.aZ1())
        curvature_gap = abs(2 * a0 - abs(alpha) ** 2 + abs(beta) ** 2)
        dirac_gap = 2 * math.hypot(abs(a1 * beta), abs(a1 * alpha))
        return FamilyMembership(
            member=(curvature_gap <= tol and dirac_gap <= tol),
            curvature_gap=curvature_gap,
            dirac_gap=dirac_gap,
        )


def heisenberg_family(model: ModelStructure) -> HeisenbergFamily:
    return HeisenbergFamily(model)


# --- packing / residual vectors -------------------------------------------------


def _pack_invariant(s: MonopoleState) -> np.ndarray:
    return np.array(
        [
            s.phi.alpha.real,
            s.phi.alpha.imag,
            s.phi.beta1bar.real,
            s.phi.beta1bar.imag,
            float(np.real(s.a.a0)),
            float(np.real(s.a.a1re)),
            float(np.real(s.a.a2re)),
        ]
    )


def _unpack_invariant(x: np.ndarray, model, backend, eps) -> MonopoleState:
    phi = SpinorField(x[0] + 1j * x[1], x[2] + 1j * x[3], backend)
    a = GaugeField(x[4], x[5], x[6], backend)
    return MonopoleState(a=a, phi=phi, model=model, eps=eps)


def _pack_grid(s: MonopoleState) -> np.ndarray:
    return np.concatenate(
        [
            s.phi.alpha.real.ravel(),
            s.phi.alpha.imag.ravel(),
            s.phi.beta1bar.real.ravel(),
            s.phi.beta1bar.imag.ravel(),
            s.a.a0.ravel(),
            s.a.a1re.ravel(),
            s.a.a2re.ravel(),
        ]
    )


def _unpack_grid(x: np.ndarray, model, backend, eps) -> MonopoleState:
    n3 = backend.n**3
    shape = (backend.n,) * 3
    parts = [x[i * n3 : (i + 1) * n3].reshape(shape) for i in range(7)]
    phi = SpinorField(parts[0] + 1j * parts[1], parts[2] + 1j * parts[3], backend)
    a = GaugeField(parts[4], parts[5], parts[6], backend)
    return MonopoleState(a=a, phi=phi, model=model, eps=eps)


def _residual_fields(s: MonopoleState, ph: PhInvariants, constraint: bool):
    """List of (complex_or_real, values) equation fields defining the target."""
    alpha, beta = s.phi.alpha, s.phi.beta1bar
    out = []
    if s.eps is None:
        d = dirac_xi(s.phi, s.a, ph)
        out.append(("c", d.alpha))
        out.append(("c", d.beta1bar))
        _, _, da12 = gauge_curvature_components(s.a, s.model)
        w = ph.webster_float()
        out.append(
            ("r", da12 - w - np.real(alpha * np.conj(alpha) - beta * np.conj(beta)))
        )
    else:
        d = dirac_eps(s.phi, s.a, ph, s.eps)
        out.append(("c", d.alpha))
        out.append(("c", d.beta1bar))
        f12, f01, f02 = b_curvature_components(s.a, ph, s.model, s.eps)
        out.append(
            ("r", f12 - 0.5 * np.real(alpha * np.conj(alpha) - beta * np.conj(beta)))
        )
        out.append(("c", (f01 + 1j * f02) / float(s.eps) - np.conj(alpha) * beta))
    if constraint:
        d_t = cov_deriv(s.phi, DIR_T, s.a, ph)
        out.append(("c", d_t.alpha))
        out.append(("c", d_t.beta1bar))
    return out


def _stack_residual(s: MonopoleState, ph: PhInvariants, constraint: bool) -> np.ndarray:
    b = s.backend
    if b.kind == "invariant":
        weight = math.sqrt(2.0)
    else:
        weight = math.sqrt(2.0 / b.n**3)
    rows = []
    for kind, vals in _residual_fields(s, ph, constraint):
        arr = np.asarray(vals)
        if kind == "c":
            rows.append(arr.real.ravel() * weight)
            rows.append(arr.imag.ravel() * weight)
        else:
            rows.append(np.real(arr).ravel() * weight)
    return np.concatenate([np.atleast_1d(r) for r in rows])


# --- sparse Jacobian (grid backend) ----------------------------------------------


def _grid_operator_mats(b: HeisGridBackend):
    n3 = b.n**3
    eye_rows = np.arange(n3)

    def perm(idx):
        return sp.csr_matrix(
            (np.ones(n3), (eye_rows, idx)), shape=(n3, n3)
        )

    inv2h = 1.0 / (2 * b.h)
    dz = (perm(b.zp) - perm(b.zm)) * inv2h
    dx = (perm(b.xp) - perm(b.xm)) * inv2h
    dy = (perm(b.yp) - perm(b.ym)) * inv2h
    ydiag = sp.diags(np.broadcast_to(b.y, (b.n,) * 3).ravel())
    de1 = dx + 2 * (ydiag @ dz)
    de2 = dy
    z1 = 0.5 * (de1 - 1j * de2)
    z1b = 0.5 * (de1 + 1j * de2)
    return dz, de1, de2, z1, z1b


def _grid_jacobian(
    s: MonopoleState, ph: PhInvariants, constraint: bool
) -> sp.csr_matrix:
    """Analytic Jacobian of the stacked real residual on the grid backend."""
    b = s.backend
    n3 = b.n**3
    dz, de1, de2, z1, z1b = _grid_operator_mats(b)
    alpha = s.phi.alpha.ravel()
    beta = s.phi.beta1bar.ravel()
    a0 = s.a.a0.ravel()
    a_z1 = np.asarray(s.a.aZ1()).ravel()
    a_z1b = np.conj(a_z1)
    weight = math.sqrt(2.0 / n3)
    zero = sp.csr_matrix((n3, n3))

    def dia(v):
        return sp.diags(v)

    # columns: [alpha (complex), beta (complex), a0, a1re, a2re]
    # each block entry is (linear_in_u, linear_in_conj_u) for complex unknowns
    blocks = []  # list of rows: (lin_alpha, bar_alpha, lin_beta, bar_beta, d_a0, d_a1, d_a2, kind)

    if s.eps is None:
        # E1 = -2 (Z1 + i aZ1) beta
        blocks.append(
            (
                zero,
                zero,
                -2 * (z1 + 1j * dia(a_z1)),
                zero,
                zero,
                dia(-1j * beta),
                dia(-beta),
                "c",
            )
        )
        # E2 = 2 (Z1b + i aZ1b) alpha
        blocks.append(
            (
                2 * (z1b + 1j * dia(a_z1b)),
                zero,
                zero,
                zero,
                zero,
                dia(1j * alpha),
                dia(-alpha),
                "c",
            )
        )
        # E3 = de1 a2 - de2 a1 + 2 a0 - W - |alpha|^2 + |beta|^2
        blocks.append(
            (
                dia(-np.conj(alpha)),
                dia(-alpha),
                dia(np.conj(beta)),
                dia(beta),
                2 * sp.identity(n3),
                -de2,
                de1,
                "r",
            )
        )
    else:
        e = float(s.eps)
        # E1 = 2 (Z1 + i aZ1) beta - (i/e)(dz + i a0) alpha + e alpha
        blocks.append(
            (
                -(1j / e) * (dz + 1j * dia(a0)) + e * sp.identity(n3),
                zero,
                2 * (z1 + 1j * dia(a_z1)),
                zero,
                dia((1 / e) * alpha),
                dia(1j * beta),
                dia(beta),
                "c",
            )
        )
        # E2 = (i/e)(dz + i a0) beta - 2 (Z1b + i aZ1b) alpha
        blocks.append(
            (
                -2 * (z1b + 1j * dia(a_z1b)),
                zero,
                (1j / e) * (dz + 1j * dia(a0)),
                zero,
                dia(-(1 / e) * beta),
                dia(-1j * alpha),
                dia(alpha),
                "c",
            )
        )
        # E3 = eps + de1 a2 - de2 a1 + 2 a0 - (|alpha|^2 - |beta|^2)/2
        blocks.append(
            (
                dia(-0.5 * np.conj(alpha)),
                dia(-0.5 * alpha),
                dia(0.5 * np.conj(beta)),
                dia(0.5 * beta),
                2 * sp.identity(n3),
                -de2,
                de1,
                "r",
            )
        )
        # E4 = (1/e)[(dz a1 - de1 a0) + i(dz a2 - de2 a0)] - conj(alpha) beta
        blocks.append(
            (
                zero,
                dia(-beta),
                dia(-np.conj(alpha)),
                zero,
                -(1 / e) * (de1 + 1j * de2),
                (1 / e) * dz,
                (1j / e) * dz,
                "c",
            )
        )
    if constraint:
        blocks.append(
            (
                dz + 1j * dia(a0),
                zero,
                zero,
                zero,
                dia(1j * alpha),
                zero,
                zero,
                "c",
            )
        )
        blocks.append(
            (
                zero,
                zero,
                dz + 1j * dia(a0),
                zero,
                dia(1j * beta),
                zero,
                zero,
                "c",
            )
        )

    def realify(lin, bar):
        """[[Re,-Im],[Im,Re]] for linear plus [[Re,Im],[Im,-Re]] for antilinear."""
        l_re, l_im = lin.real, lin.imag
        b_re, b_im = bar.real, bar.imag
        top = sp.hstack([l_re + b_re, -l_im + b_im])
        bot = sp.hstack([l_im + b_im, l_re - b_re])
        return sp.vstack([top, bot])

    def realify_realcol(mat):
        return sp.vstack([mat.real, mat.imag])

    rows = []
    for (la, ba, lb, bb, d0, d1, d2, kind) in blocks:
        if kind == "c":
            block_alpha = realify(la, ba)
            block_beta = realify(lb, bb)
            block_a = sp.hstack(
                [realify_realcol(d0), realify_realcol(d1), realify_realcol(d2)]
            )
            rows.append(sp.hstack([block_alpha, block_beta, block_a]))
        else:
            # real equation: derivative wrt complex u: lin*du + bar*conj(du)
            # real part only: [Re(lin+bar), -Im(lin-bar)]
            ra = sp.hstack([(la + ba).real, (ba - la).imag])
            rb = sp.hstack([(lb + bb).real, (bb - lb).imag])
            rreal = sp.hstack([d0.real, d1.real, d2.real])
            rows.append(sp.hstack([ra, rb, rreal]))
    jac = sp.vstack(rows).tocsr()
    return jac * weight


def _invariant_jacobian(
    s: MonopoleState, ph: PhInvariants, constraint: bool
) -> np.ndarray:
    """Exact Jacobian by central differences (residual is quadratic)."""
    x0 = _pack_invariant(s)
    backend = s.backend
    h = 1.0 / 64.0  # dyadic step keeps the arithmetic exact for quadratics
    cols = []
    for i in range(7):
        xp = x0.copy()
        xm = x0.copy()
        xp[i] += h
        xm[i] -= h
        rp = _stack_residual(
            _unpack_invariant(xp, s.model, backend, s.eps), ph, constraint
        )
        rm = _stack_residual(
            _unpack_invariant(xm, s.model, backend, s.eps), ph, constraint
        )
        cols.append((rp - rm) / (2 * h))
    return np.stack(cols, axis=1)


# --- gauge fixing ---------------------------------------------------------------


def _phase_fix_invariant(x: np.ndarray) -> np.ndarray:
    alpha = x[0] + 1j * x[1]
    beta = x[2] + 1j * x[3]
    ref = alpha if abs(alpha) >= abs(beta) else beta
    if abs(ref) < 1e-300:
        return x
    phase = ref / abs(ref)
    alpha, beta = alpha / phase, beta / phase
    out = x.copy()
    out[0], out[1], out[2], out[3] = alpha.real, alpha.imag, beta.real, beta.imag
    return out


def _coulomb_project_grid(s: MonopoleState) -> MonopoleState:
    """Project a to the discrete Coulomb slice and fix the base-point phase.

    Solves the frame Laplacian Delta chi = div(a) by conjugate gradients and
    applies a -> a - d chi, Phi -> exp(-i chi) Phi.
    """
    b = s.backend
    n3 = b.n**3

    def div(a: GaugeField):
        return (
            b.d_T(a.a0 + 0j) + b.d_e1(a.a1re + 0j) + b.d_e2(a.a2re + 0j)
        ).real

    rhs = div(s.a).ravel()
    rhs = rhs - rhs.mean()

    shape = (b.n,) * 3

    def lap(v):
        arr = v.reshape(shape) + 0j
        out = b.d_T(b.d_T(arr)) + b.d_e1(b.d_e1(arr)) + b.d_e2(b.d_e2(arr))
        return out.real.ravel()

    op = spla.LinearOperator((n3, n3), matvec=lap, dtype=float)
    chi, _ = spla.cg(op, rhs, rtol=1e-12, atol=1e-14, maxiter=300)
    chi = chi - chi.mean()
    chi = chi.reshape(shape)
    d0 = b.d_T(chi + 0j).real
    d1 = b.d_e1(chi + 0j).real
    d2 = b.d_e2(chi + 0j).real
    a_new = GaugeField(s.a.a0 - d0, s.a.a1re - d1, s.a.a2re - d2, b)
    phase = np.exp(1j * chi)  # pairs with a - d(chi) under the +ia twist
    phi_new = SpinorField(s.phi.alpha * phase, s.phi.beta1bar * phase, b)
    # base-point phase fix
    ref = phi_new.alpha.ravel()[0]
    if abs(ref) > 1e-12:
        rot = np.conj(ref) / abs(ref)
        phi_new = SpinorField(phi_new.alpha * rot, phi_new.beta1bar * rot, b)
    return MonopoleState(a=a_new, phi=phi_new, model=s.model, eps=s.eps)


# --- Gauss-Newton ---------------------------------------------------------------


@dataclass
class SolveOpts:
    max_iter: int = 80
    tol: float = 1e-12
    converged_tol: Optional[float] = None  # default: 1e-10 invariant, 1e-6 grid
    constraint: bool = False
    damping: float = 1e-12
    seed: int = 0
    init_scale: float = 0.6
    gauge_fix: bool = True


@dataclass
class SolveInfo:
    converged: bool
    iterations: int
    report: ResidualReport
    seed: int


def random_monopole_state(
    model: ModelStructure, backend, seed: int, eps=None, scale: float = 0.6
) -> MonopoleState:
    rng = np.random.default_rng(seed)
    if backend.kind == "invariant":
        vals = rng.normal(scale=scale, size=7)
        phi = SpinorField(vals[0] + 1j * vals[1], vals[2] + 1j * vals[3], backend)
        a = GaugeField(vals[4], vals[5], vals[6], backend)
    else:
        shape = (backend.n,) * 3
        x, y, _ = backend.coords()

        def smooth():
            out = np.zeros(shape, dtype=complex)
            for k in range(-1, 2):
                for l in range(-1, 2):
                    c = rng.normal(scale=scale / (1 + k * k + l * l)) + 1j * rng.normal(
                        scale=scale / (1 + k * k + l * l)
                    )
                    out += c * np.exp(2j * np.pi * (k * x + l * y))
            return out

        phi = SpinorField(smooth(), smooth(), backend)
        a = GaugeField(smooth().real, smooth().real, smooth().real, backend)
    return MonopoleState(a=a, phi=phi, model=model, eps=eps)


def solve(
    model: ModelStructure,
    eps,
    init: MonopoleState,
    opts: SolveOpts = SolveOpts(),
    ph: Optional[PhInvariants] = None,
) -> Tuple[MonopoleState, SolveInfo]:
    """Damped Gauss-Newton on the stacked residual, with gauge fixing."""
    ph = ph or derive_ph_invariants(model)
    if eps is not None and not ph.torsion.is_zero():
        raise TorsionError("eps-family system requires zero torsion")
    backend = init.backend
    state = MonopoleState(a=init.a, phi=init.phi, model=model, eps=eps)
    grid = backend.kind == "heis-grid"
    pack = _pack_grid if grid else _pack_invariant
    unpack = _unpack_grid if grid else _unpack_invariant

    def to_state(x):
        return unpack(x, model, backend, eps)

    def res(x):
        return _stack_residual(to_state(x), ph, opts.constraint)

    def gauge(x):
        if not opts.gauge_fix:
            return x
        if grid:
            return pack(_coulomb_project_grid(to_state(x)))
        return _phase_fix_invariant(x)

    x = gauge(pack(state))
    r = res(x)
    cost = float(r @ r)
    iterations = 0
    loop_tol = opts.tol if not grid else max(opts.tol, 1e-8)
    for iterations in range(1, opts.max_iter + 1):
        if math.sqrt(cost) <= loop_tol:
            break
        if grid:
            jac = _grid_jacobian(to_state(x), ph, opts.constraint)
            result = spla.lsqr(
                jac, -r, damp=opts.damping, atol=1e-14, btol=1e-14, iter_lim=3000
            )
            p = result[0]
        else:
            jac = _invariant_jacobian(to_state(x), ph, opts.constraint)
            p, *_ = np.linalg.lstsq(jac, -r, rcond=None)
        step = 1.0
        accepted = False
        while step >= 2.0**-30:
            # trial steps are compared before re-gauging; the projection is
            # applied to accepted iterates only (it is not exactly residual
            # neutral on the grid and would otherwise defeat the line search)
            x_try = x + step * p
            r_try = res(x_try)
            cost_try = float(r_try @ r_try)
            if cost_try < cost:
                x = gauge(x_try)
                r = res(x)
                cost = float(r @ r)
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
    final = to_state(x)
    rep = (
        residual_contact(final, ph) if eps is None else residual_sw(final, ph)
    )
    threshold = opts.converged_tol
    if threshold is None:
        threshold = 1e-6 if grid else 1e-10
    converged = math.sqrt(cost) <= max(opts.tol, threshold)
    return final, SolveInfo(
        converged=converged, iterations=iterations, report=rep, seed=opts.seed
    )


# --- certificates and sweeps ------------------------------------------------------


@dataclass(frozen=True)
class CertificateVerdict:
    verdict: str  # consistent-with-vanishing | counterexample-candidate | not-a-solution
    sup_phi: float
    energy: Optional[float]
    report: ResidualReport

    def as_dict(self):
        return {
            "verdict": self.verdict,
            "sup_phi": self.sup_phi,
            "energy": self.energy,
            "residuals": self.report.as_dict(),
        }


def vanishing_certificate(
    model: ModelStructure,
    s: MonopoleState,
    ph: Optional[PhInvariants] = None,
    tol_residual: float = 1e-8,
    tol_phi: float = 1e-8,
) -> CertificateVerdict:
    """Check the positive-curvature vanishing mechanism on a candidate state."""
    ph = ph or derive_ph_invariants(model)
    if not (ph.tw_curv.is_real() and ph.tw_curv.real_sign() > 0):
        raise PreconditionError("certificate requires positive Webster curvature")
    rr = residual_contact(s, ph)
    if rr.total > tol_residual or rr.r_constraint > tol_residual:
        return CertificateVerdict(
            verdict="not-a-solution",
            sup_phi=math.sqrt(sup_phi_sq(s.phi)),
            energy=None,
            report=rr,
        )
    energy = energy_identity(s, ph, tol=max(tol_residual, 1e-9))
    sup_phi = math.sqrt(sup_phi_sq(s.phi))
    verdict = (
        "consistent-with-vanishing" if sup_phi <= tol_phi else "counterexample-candidate"
    )
    return CertificateVerdict(
        verdict=verdict, sup_phi=sup_phi, energy=energy, report=rr
    )


@dataclass
class SweepRecord:
    eps: float
    sup_phi_sq: float
    norm_T_deriv_sq: float
    norm_Xi_deriv_sq: float
    norm_alpha_beta_cross: float
    identity_gap: float
    iterations: int
    converged: bool
    residual_limit: Optional[float] = None
    constraint_limit: Optional[float] = None

    def as_dict(self):
        return {
            "eps": self.eps,
            "sup_phi_sq": self.sup_phi_sq,
            "norm_T_deriv_sq": self.norm_T_deriv_sq,
            "norm_Xi_deriv_sq": self.norm_Xi_deriv_sq,
            "norm_alpha_beta_cross": self.norm_alpha_beta_cross,
            "identity_gap": self.identity_gap,
            "iterations": self.iterations,
            "converged": self.converged,
            "residual_limit": self.residual_limit,
            "constraint_limit": self.constraint_limit,
        }


@dataclass
class SweepOpts:
    seed: int = 0
    reseed_phi: bool = True
    phi_floor: float = 1e-6
    phi_scale: float = 0.5
    solve: SolveOpts = field(default_factory=SolveOpts)


def sweep_diagnostics(s: MonopoleState, ph: PhInvariants) -> dict:
    """Adiabatic diagnostics of a state for one eps."""
    b = s.backend
    e = float(s.eps)
    d_t = cov_deriv(s.phi, DIR_T, s.a, ph)
    t_sq = scalar_l2_norm_sq(b, d_t.alpha) + scalar_l2_norm_sq(b, d_t.beta1bar)
    d_z1 = cov_deriv(s.phi, DIR_Z1, s.a, ph)
    d_z1b = cov_deriv(s.phi, DIR_Z1BAR, s.a, ph)
    xi_sq = 4 * (
        scalar_l2_norm_sq(b, d_z1.beta1bar) + scalar_l2_norm_sq(b, d_z1b.alpha)
    )
    cross = float(
        np.real(
            b.integrate(
                s.phi.alpha
                * np.conj(s.phi.alpha)
                * s.phi.beta1bar
                * np.conj(s.phi.beta1bar)
            )
        )
    )
    alpha_sq = scalar_l2_norm_sq(b, s.phi.alpha)
    identity_gap = abs(e**2 * alpha_sq - (t_sq / e**2 + xi_sq + 2 * cross))
    return {
        "sup_phi_sq": sup_phi_sq(s.phi),
        "norm_T_deriv_sq": t_sq,
        "norm_Xi_deriv_sq": xi_sq,
        "norm_alpha_beta_cross": cross,
        "identity_gap": identity_gap,
    }


def sweep(
    model: ModelStructure,
    eps_list: Sequence[float],
    opts: SweepOpts = SweepOpts(),
    backend=None,
    ph: Optional[PhInvariants] = None,
) -> List[SweepRecord]:
    """Solve the eps-family along a decreasing eps list, warm-starting each step."""
    eps_values = [float(e) for e in eps_list]
    if any(b >= a for a, b in zip(eps_values, eps_values[1:])):
        raise ValueError("eps_list must be strictly decreasing")
    ph = ph or derive_ph_invariants(model)
    backend = backend or InvariantBackend(model)
    rng = np.random.default_rng(opts.seed)
    state = random_monopole_state(
        model, backend, seed=opts.seed, eps=eps_values[0], scale=opts.phi_scale
    )
    records: List[SweepRecord] = []
    for e in eps_values:
        state = MonopoleState(a=state.a, phi=state.phi, model=model, eps=e)
        if opts.reseed_phi and sup_phi_sq(state.phi) < opts.phi_floor:
            fresh = random_monopole_state(
                model,
                backend,
                seed=int(rng.integers(0, 2**31)),
                eps=e,
                scale=opts.phi_scale,
            )
            state = MonopoleState(a=state.a, phi=fresh.phi, model=model, eps=e)
        state, info = solve(model, e, state, opts.solve, ph=ph)
        diag = sweep_diagnostics(state, ph)
        records.append(
            SweepRecord(
                eps=e,
                iterations=info.iterations,
                converged=info.converged,
                **diag,
            )
        )
    # limit candidate: Phi/sqrt2 with the final gauge field
    limit = MonopoleState(
        a=state.a,
        phi=SpinorField(
            state.phi.alpha / math.sqrt(2.0),
            state.phi.beta1bar / math.sqrt(2.0),
            state.backend,
        ),
        model=model,
        eps=None,
    )
    rr = residual_contact(limit, ph)
    records[-1].residual_limit = rr.total
    records[-1].constraint_limit = rr.r_constraint
    return records


def loglog_slope(
    xs: Sequence[float], ys: Sequence[float], floor: float = 1e-250
) -> Optional[float]:
    """Least-squares slope of log(y) against log(x); None if degenerate.

    Values at or below the floor are treated as numerical zeros and dropped
    (diagnostics of reducible states are roundoff noise, not data).
    """
    pts = [(x, y) for x, y in zip(xs, ys) if x > 0 and y > floor]
    if len(pts) < 2:
        return None
    lx = np.log([p[0] for p in pts])
    ly = np.log([p[1] for p in pts])
    lx = lx - lx.mean()
    denom = float(lx @ lx)
    if denom == 0:
        return None
    return float((lx @ (ly - ly.mean())) / denom)

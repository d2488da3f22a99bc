"""Connection, structural tensors, Nijenhuis tensors and the curvature bundle.

Index layouts (all arrays are plain ndarrays over one chart dimension):

* ``gamma[k, i, j] = Gamma^k_ij`` (upper index first), symmetric in ``i, j``.
* ``dgamma[m, k, i, j] = d_m Gamma^k_ij``.
* ``nablaJ[a, k, i, j] = (nabla_k J_a)^i_j``.
* ``F[a, x, y, z]`` is the (0,3) structural tensor of structure ``a``:
  ``F_a(X, Y, Z) = g((nabla_X J_a) Y, Z)``.
* ``theta[a, l]`` is the Lee covector: ``theta_a(Z) = g^{kj} F_a(e_k, e_j, Z)``.
* ``N[a, i, j, k]`` is the Nijenhuis tensor with the upper slot last.
* ``R[i, j, k, l]`` is the (0,4) curvature; ``ricci[j, k] = g^{il} R[i, j, k, l]``;
  the scalar is its metric trace.  With these conventions a unit-curvature
  model satisfies ``R = pi1`` and sectional curvature is
  ``R(x, y, y, x) / (g(x,x) g(y,y) - g(x,y)^2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .manifolds import PointEval
from .tensors import DenseTensor, rel_residual

__all__ = [
    "ConnectionData",
    "StructuralSet",
    "CurvatureBundle",
    "DegeneratePlaneError",
    "christoffel",
    "structural_tensors",
    "curvature_bundle",
    "sectional_curvature",
    "curvature_like",
    "psi1_components",
    "pi1_components",
    "pi3_components",
    "structural_identity_residuals",
    "curvature_identity_residuals",
    "connection_residuals",
]


class DegeneratePlaneError(ValueError):
    """The plane spanned by the two vectors is metrically degenerate."""


@dataclass(frozen=True)
class ConnectionData:
    gamma: np.ndarray  # (d, d, d)
    dgamma: np.ndarray  # (d, d, d, d)


@dataclass(frozen=True)
class StructuralSet:
    nablaJ: np.ndarray  # (3, d, d, d)
    F: np.ndarray  # (3, d, d, d)
    theta: np.ndarray  # (3, d)
    N: np.ndarray  # (3, d, d, d)


@dataclass(frozen=True)
class CurvatureBundle:
    R: np.ndarray  # (d, d, d, d), all slots covariant
    ricci: np.ndarray  # (d, d)
    tau: float
    weyl: np.ndarray  # (d, d, d, d)


def christoffel(p: PointEval) -> ConnectionData:
    """Levi-Civita connection coefficients and their exact first derivatives.

    ``Gamma^k_ij = (1/2) g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)``; the
    derivative uses ``d(g^{-1}) = -g^{-1} (dg) g^{-1}`` plus the exact second
    metric derivatives carried by the point evaluation.
    """
    g, ginv, dg, d2g = p.g, p.ginv, p.dg, p.d2g
    # T[i, j, l] = d_i g_jl + d_j g_il - d_l g_ij  (symmetric in i, j)
    T = dg + dg.transpose(1, 0, 2) - dg.transpose(1, 2, 0)
    gamma = 0.5 * np.einsum("kl,ijl->kij", ginv, T)
    dginv = -np.einsum("ka,mab,bl->mkl", ginv, dg, ginv)
    dT = d2g + d2g.transpose(0, 2, 1, 3) - d2g.transpose(0, 2, 3, 1)
    dgamma = 0.5 * (
        np.einsum("mkl,ijl->mkij", dginv, T) + np.einsum("kl,mijl->mkij", ginv, dT)
    )
    return ConnectionData(gamma=gamma, dgamma=dgamma)


def structural_tensors(p: PointEval, c: ConnectionData) -> StructuralSet:
    """Covariant structure derivatives, structural tensors, Lee forms, Nijenhuis.

    ``(nabla_k J)^i_j = d_k J^i_j + Gamma^i_km J^m_j - Gamma^m_kj J^i_m``;
    the Nijenhuis tensor uses the coordinate-field form (brackets of
    coordinate fields vanish).
    """
    J, dJ, g, ginv = p.J, p.dJ, p.g, p.ginv
    nablaJ = (
        dJ
        + np.einsum("ikm,amj->akij", c.gamma, J)
        - np.einsum("mkj,aim->akij", c.gamma, J)
    )
    F = np.einsum("il,akij->akjl", g, nablaJ)
    theta = np.einsum("kj,akjl->al", ginv, F)
    t1 = np.einsum("ami,amkj->aijk", J, dJ)
    t3 = np.einsum("akm,aimj->aijk", J, dJ)
    N = t1 - t1.transpose(0, 2, 1, 3) - t3 + t3.transpose(0, 2, 1, 3)
    return StructuralSet(nablaJ=nablaJ, F=F, theta=theta, N=N)


def curvature_bundle(p: PointEval, c: ConnectionData) -> CurvatureBundle:
    """Riemann (0,4), Ricci, scalar curvature, and the conformal Weyl tensor.

    ``R^l_ijk = d_i Gamma^l_jk - d_j Gamma^l_ik + Gamma^l_im Gamma^m_jk
    - Gamma^l_jm Gamma^m_ik``, lowered on the last slot.  The Weyl tensor is
    ``W = R - (1/(2(2n-1))) { psi1(ricci) - (tau/(4n-1)) pi1 }`` with
    ``d = 4n``.
    """
    g, ginv = p.g, p.ginv
    t1 = c.dgamma.transpose(0, 2, 3, 1)  # t1[i, j, k, l] = d_i Gamma^l_jk
    t3 = np.einsum("lim,mjk->ijkl", c.gamma, c.gamma)
    r_up = t1 - t1.transpose(1, 0, 2, 3) + t3 - t3.transpose(1, 0, 2, 3)
    R = np.einsum("ijkm,ml->ijkl", r_up, g)
    ricci = np.einsum("il,ijkl->jk", ginv, R)
    tau = float(np.einsum("jk,jk->", ginv, ricci))
    n = p.n
    weyl = R - (1.0 / (2.0 * (2 * n - 1))) * (
        psi1_components(g, ricci) - (tau / (4 * n - 1)) * pi1_components(g)
    )
    return CurvatureBundle(R=R, ricci=ricci, tau=tau, weyl=weyl)


def sectional_curvature(
    p: PointEval, b: CurvatureBundle, x: np.ndarray, y: np.ndarray
) -> float:
    """Sectional curvature of the plane spanned by x and y."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    gxx = float(x @ p.g @ x)
    gyy = float(y @ p.g @ y)
    gxy = float(x @ p.g @ y)
    denom = gxx * gyy - gxy * gxy
    scale = max(1.0, abs(gxx * gyy), gxy * gxy)
    if abs(denom) <= 1e-8 * scale:
        raise DegeneratePlaneError(
            f"plane is metrically degenerate: g(x,x)g(y,y) - g(x,y)^2 = {denom!r}"
        )
    numer = float(np.einsum("ijkl,i,j,k,l->", b.R, x, y, y, x))
    return numer / denom


# -- curvature-like constructors ---------------------------------------------


def psi1_components(g: np.ndarray, S: np.ndarray) -> np.ndarray:
    """psi1(S)_ijkl = g_jk S_il - g_ik S_jl + g_il S_jk - g_jl S_ik."""
    return (
        np.einsum("jk,il->ijkl", g, S)
        - np.einsum("ik,jl->ijkl", g, S)
        + np.einsum("il,jk->ijkl", g, S)
        - np.einsum("jl,ik->ijkl", g, S)
    )


def pi1_components(g: np.ndarray) -> np.ndarray:
    """pi1 = (1/2) psi1(g); explicitly pi1_ijkl = g_jk g_il - g_ik g_jl."""
    return np.einsum("jk,il->ijkl", g, g) - np.einsum("ik,jl->ijkl", g, g)


def pi3_components(g: np.ndarray, J: np.ndarray) -> np.ndarray:
    """pi3(X,Y,Z,U) = -pi1(X,Y,JZ,U) - pi1(X,Y,Z,JU) for one structure J."""
    pi1 = pi1_components(g)
    return -np.einsum("ijml,mk->ijkl", pi1, J) - np.einsum("ijkm,ml->ijkl", pi1, J)


def curvature_like(
    kind: str,
    p: PointEval,
    S: np.ndarray | None = None,
    alpha: int | None = None,
) -> DenseTensor:
    """Build one of the curvature-like (0,4) tensors at a point.

    ``kind`` is ``'psi1'`` (requires a symmetric ``S``), ``'pi1'``, or
    ``'pi3'`` (requires ``alpha`` in {2, 3} naming the structure used).
    """
    valence = ("d", "d", "d", "d")
    if kind == "psi1":
        if S is None:
            raise ValueError("psi1 requires a symmetric (0,2) tensor S")
        S = np.asarray(S, dtype=float)
        if S.shape != (p.dim, p.dim):
            raise ValueError(f"S must have shape ({p.dim}, {p.dim})")
        if float(np.max(np.abs(S - S.T))) > 1e-12 * max(1.0, float(np.max(np.abs(S)))):
            raise ValueError("S must be symmetric")
        return DenseTensor(psi1_components(p.g, S), valence)
    if kind == "pi1":
        return DenseTensor(pi1_components(p.g), valence)
    if kind == "pi3":
        if alpha not in (2, 3):
            raise ValueError("pi3 requires alpha in {2, 3}")
        return DenseTensor(pi3_components(p.g, p.J[alpha - 1]), valence)
    raise ValueError(f"unknown curvature-like kind {kind!r}")


# -- identity suites ----------------------------------------------------------


def connection_residuals(p: PointEval, c: ConnectionData) -> dict[str, float]:
    """Torsion-free symmetry and metricity of the connection."""
    sym = rel_residual(c.gamma, c.gamma.transpose(0, 2, 1))
    nabla_g = (
        p.dg
        - np.einsum("mki,mj->kij", c.gamma, p.g)
        - np.einsum("mkj,im->kij", c.gamma, p.g)
    )
    return {
        "Gamma symmetry": sym,
        "metricity nabla(g)": rel_residual(nabla_g, np.zeros_like(nabla_g)),
    }


def structural_identity_residuals(p: PointEval, s: StructuralSet) -> dict[str, float]:
    """Interchange identities linking the three structural tensors, plus their
    symmetry/twist relations.

    Interchange suite:
        F1(x,y,z) = F2(x,J3 y,z) + F3(x,y,J2 z)
        F2(x,y,z) = F3(x,J1 y,z) + F1(x,y,J3 z)
        F3(x,y,z) = F1(x,J2 y,z) - F2(x,y,J1 z)

    Symmetry/twist suite:
        F1 antisymmetric in (y,z) and F1(x,J1 y,J1 z) = -F1(x,y,z);
        F2, F3 symmetric in (y,z) with F_a(x,J_a y,J_a z) = +F_a(x,y,z).
    """
    F1, F2, F3 = s.F[0], s.F[1], s.F[2]
    J1, J2, J3 = p.J[0], p.J[1], p.J[2]

    def twist_y(F, J):  # F(x, J y, z)
        return np.einsum("kml,mj->kjl", F, J)

    def twist_z(F, J):  # F(x, y, J z)
        return np.einsum("kjm,ml->kjl", F, J)

    def twist_yz(F, J):  # F(x, J y, J z)
        return np.einsum("kab,aj,bl->kjl", F, J, J)

    res = {
        "F1 = F2(.,J3.,.) + F3(.,.,J2.)": rel_residual(F1, twist_y(F2, J3) + twist_z(F3, J2)),
        "F2 = F3(.,J1.,.) + F1(.,.,J3.)": rel_residual(F2, twist_y(F3, J1) + twist_z(F1, J3)),
        "F3 = F1(.,J2.,.) - F2(.,.,J1.)": rel_residual(F3, twist_y(F1, J2) - twist_z(F2, J1)),
        "F1 antisymmetric in last two": rel_residual(F1, -F1.transpose(0, 2, 1)),
        "F1(.,J1.,J1.) = -F1": rel_residual(twist_yz(F1, J1), -F1),
        "F2 symmetric in last two": rel_residual(F2, F2.transpose(0, 2, 1)),
        "F2(.,J2.,J2.) = F2": rel_residual(twist_yz(F2, J2), F2),
        "F3 symmetric in last two": rel_residual(F3, F3.transpose(0, 2, 1)),
        "F3(.,J3.,J3.) = F3": rel_residual(twist_yz(F3, J3), F3),
    }
    return res


def curvature_identity_residuals(p: PointEval, b: CurvatureBundle) -> dict[str, float]:
    """Riemann symmetry suite: antisymmetries, pair symmetry, first Bianchi."""
    R = b.R
    bianchi = DenseTensor(R, ("d", "d", "d", "d"))
    from .tensors import cyclic_sum  # local import to keep module init light

    cyc = cyclic_sum(bianchi, (0, 1, 2)).comp
    return {
        "R antisymmetric in (1,2)": rel_residual(R, -R.transpose(1, 0, 2, 3)),
        "R antisymmetric in (3,4)": rel_residual(R, -R.transpose(0, 1, 3, 2)),
        "R pair symmetric": rel_residual(R, R.transpose(2, 3, 0, 1)),
        "R first Bianchi": rel_residual(cyc, np.zeros_like(cyc)),
    }

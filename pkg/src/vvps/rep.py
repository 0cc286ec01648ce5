"""Finite-dimensional unitary representations of the supported groups.

Recipes: the trivial representation, a Dirichlet character acting on
Gamma0(N) through the lower-right entry, a representation of SL2(Z) given
by unitary images of the generators S and T, and the block-permutation
representation induced from a finite-index subgroup.  The cusp monodromy
e^{2 pi i kappa M} rho(T^M) of a normal representation is diagonalised into
a unitary U and exponents m_j in ]0, 1].
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .modgroup import (GroupSpec, I2, IntMatrix2, contains, cusp_width,
                       st_syllables, t_power)
from .multiplier import MultiplierSystem

__all__ = [
    "RepSpec", "SpectralSplit", "NormalityResult",
    "trivial_rep", "dirichlet_rep", "st_rep",
    "evaluate_rho", "permutation_ell", "induce", "check_normal", "spectral_split",
]

_UNITARY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class RepSpec:
    """A unitary representation given by one of the supported recipes."""

    recipe: str
    p: int
    group: GroupSpec
    chi: Optional[tuple] = None          # dirichlet: values indexed mod N
    s_img: Optional[np.ndarray] = None   # st_generated
    t_img: Optional[np.ndarray] = None
    inner: Optional["RepSpec"] = None    # induced
    cosets: Optional[tuple] = None

    def to_json(self) -> dict:
        out = {"recipe": self.recipe, "p": self.p, "group": self.group.to_json()}
        if self.recipe == "dirichlet":
            out["values"] = [[z.real, z.imag] for z in self.chi]
        elif self.recipe == "st_generated":
            out["matrices"] = {"S": _mat_to_json(self.s_img), "T": _mat_to_json(self.t_img)}
        elif self.recipe == "induced":
            out["inner"] = self.inner.to_json()
            out["cosets"] = [list(g.entries()) for g in self.cosets]
        return out

    @classmethod
    def from_json(cls, data: dict) -> "RepSpec":
        recipe = data["recipe"]
        group = GroupSpec.from_json(data["group"])
        if recipe == "trivial":
            return trivial_rep(int(data["p"]), group)
        if recipe == "dirichlet":
            vals = [complex(re, im) for re, im in data["values"]]
            return dirichlet_rep(group.n, vals)
        if recipe == "st_generated":
            return st_rep(_mat_from_json(data["matrices"]["S"]),
                          _mat_from_json(data["matrices"]["T"]))
        if recipe == "induced":
            inner = cls.from_json(data["inner"])
            cosets = [IntMatrix2(*r) for r in data["cosets"]]
            return induce(inner, cosets)
        raise ValueError(f"unknown recipe {recipe!r}")


def _mat_to_json(m: np.ndarray):
    return [[[z.real, z.imag] for z in row] for row in np.asarray(m, dtype=complex)]


def _mat_from_json(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows])


def _check_unitary(m: np.ndarray, what: str):
    p = m.shape[0]
    if np.linalg.norm(m @ m.conj().T - np.eye(p)) > _UNITARY_TOL:
        raise ValueError(f"{what} is not unitary")


def trivial_rep(p: int, group: GroupSpec = GroupSpec.sl2z()) -> RepSpec:
    if p < 1:
        raise ValueError("dimension must be positive")
    return RepSpec("trivial", p, group)


def dirichlet_rep(n: int, values) -> RepSpec:
    """One-dimensional representation chi(d) I on Gamma0(n).

    values[r] is chi(r) for residues r coprime to n (other slots are
    ignored); complete multiplicativity and unitarity are verified.
    """
    vals = [complex(v) for v in values]
    if len(vals) != n:
        raise ValueError(f"need {n} values, got {len(vals)}")
    units = [r for r in range(n) if math.gcd(r, n) == 1]
    for r in units:
        if abs(abs(vals[r]) - 1.0) > 1e-12:
            raise ValueError(f"chi({r}) is not on the unit circle")
    for r in units:
        for s in units:
            if abs(vals[(r * s) % n] - vals[r] * vals[s]) > 1e-10:
                raise ValueError("character table is not multiplicative")
    return RepSpec("dirichlet", 1, GroupSpec.gamma0(n), chi=tuple(vals))


def st_rep(s_img, t_img) -> RepSpec:
    """Representation of SL2(Z) from unitary images of S and T.

    The defining relations are verified at construction: S^4 = I,
    (ST)^6 = I, S^2 = (ST)^3 (hence S^2 is central), which is exactly what
    makes word evaluation well defined.
    """
    s = np.asarray(s_img, dtype=complex)
    t = np.asarray(t_img, dtype=complex)
    if s.shape != t.shape or s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ValueError("generator images must be square matrices of equal size")
    p = s.shape[0]
    _check_unitary(s, "rho(S)")
    _check_unitary(t, "rho(T)")
    eye = np.eye(p)
    st = s @ t
    st3 = st @ st @ st
    s2 = s @ s
    if np.linalg.norm(s2 @ s2 - eye) > _UNITARY_TOL:
        raise ValueError("rho(S)^4 != I")
    if np.linalg.norm(st3 @ st3 - eye) > _UNITARY_TOL:
        raise ValueError("(rho(S) rho(T))^6 != I")
    if np.linalg.norm(s2 - st3) > _UNITARY_TOL:
        raise ValueError("rho(S)^2 != (rho(S) rho(T))^3")
    if np.linalg.norm(s2 @ t - t @ s2) > _UNITARY_TOL:
        raise ValueError("rho(S)^2 does not commute with rho(T)")
    return RepSpec("st_generated", p, GroupSpec.sl2z(), s_img=s, t_img=t)


def _unitary_power(m: np.ndarray, q: int) -> np.ndarray:
    if q >= 0:
        return np.linalg.matrix_power(m, q)
    return np.linalg.matrix_power(m.conj().T, -q)


def evaluate_rho(rep: RepSpec, g: IntMatrix2) -> np.ndarray:
    """The matrix rho(g)."""
    if rep.recipe == "trivial":
        if not contains(rep.group, g):
            raise ValueError(f"{g} is not in {rep.group}")
        return np.eye(rep.p, dtype=complex)
    if rep.recipe == "dirichlet":
        if not contains(rep.group, g):
            raise ValueError(f"{g} is not in {rep.group}")
        return np.array([[rep.chi[g.d % rep.group.n]]], dtype=complex)
    if rep.recipe == "st_generated":
        syll, sign = st_syllables(g)
        out = np.eye(rep.p, dtype=complex)
        for kind, e in syll:
            out = out @ (_unitary_power(rep.t_img, e) if kind == "T" else rep.s_img)
        if sign < 0:
            out = (rep.s_img @ rep.s_img) @ out
        return out
    if rep.recipe == "induced":
        return _evaluate_induced(rep, g)
    raise ValueError(rep.recipe)


def permutation_ell(g: IntMatrix2, cosets, group: GroupSpec):
    """The permutation l with group * cosets[j] * g^{-1} = group * cosets[l(j)].

    Zero-indexed.  Raises if the coset list does not behave like a full
    right-coset system.
    """
    ginv = g.inv()
    d = len(cosets)
    ell = []
    for j in range(d):
        moved = cosets[j] * ginv
        hits = [l for l in range(d) if contains(group, moved * cosets[l].inv())]
        if len(hits) != 1:
            raise ValueError("invalid coset system: "
                             f"coset {j} maps to {len(hits)} representatives")
        ell.append(hits[0])
    if sorted(ell) != list(range(d)):
        raise ValueError("invalid coset system: map is not a permutation")
    return tuple(ell)


def _evaluate_induced(rep: RepSpec, g: IntMatrix2) -> np.ndarray:
    inner = rep.inner
    cosets = rep.cosets
    d = len(cosets)
    p = inner.p
    ell = permutation_ell(g, cosets, inner.group)
    out = np.zeros((p * d, p * d), dtype=complex)
    for s_idx in range(d):
        l = ell[s_idx]
        blk = evaluate_rho(inner, cosets[l] * g * cosets[s_idx].inv())
        out[l * p:(l + 1) * p, s_idx * p:(s_idx + 1) * p] = blk
    return out


def induce(rep: RepSpec, cosets) -> RepSpec:
    """The representation of SL2(Z) induced from rep through the given
    right-coset representatives (cosets[0] must be the identity)."""
    cosets = tuple(cosets)
    if not cosets or cosets[0] != I2:
        raise ValueError("coset list must start with the identity")
    for i in range(len(cosets)):
        for j in range(i + 1, len(cosets)):
            if contains(rep.group, cosets[i] * cosets[j].inv()):
                raise ValueError(f"cosets {i} and {j} coincide")
    return RepSpec("induced", rep.p * len(cosets), GroupSpec.sl2z(),
                   inner=rep, cosets=cosets)


class NormalityResult(NamedTuple):
    ok: bool
    order: Optional[int]


def check_normal(rep: RepSpec, ms: MultiplierSystem, gamma: GroupSpec,
                 sigma: IntMatrix2 = I2, max_n: int = 360) -> NormalityResult:
    """Check rho(-I) = I and finite order of the cusp monodromy.

    The monodromy e^{2 pi i kappa M} rho(sigma T^M sigma^{-1}) passes when
    every eigenvalue lies within 1e-8 of a root of unity of order <= max_n;
    the returned witness is the lcm of the minimal orders.
    """
    p = rep.p
    if np.linalg.norm(evaluate_rho(rep, -I2) - np.eye(p)) > _UNITARY_TOL:
        return NormalityResult(False, None)
    m_width = cusp_width(gamma, sigma)
    mono = (cmath.exp(2j * math.pi * ms.kappa * m_width)
            * evaluate_rho(rep, sigma * t_power(m_width) * sigma.inv()))
    orders = []
    for lam in np.linalg.eigvals(mono):
        theta = math.atan2(lam.imag, lam.real) / (2.0 * math.pi)
        found = None
        for n in range(1, max_n + 1):
            root = cmath.exp(2j * math.pi * round(theta * n) / n)
            if abs(lam - root) <= 1e-8:
                found = n
                break
        if found is None:
            return NormalityResult(False, None)
        orders.append(found)
    return NormalityResult(True, math.lcm(*orders))


@dataclass(frozen=True, eq=False)
class SpectralSplit:
    """Unitary diagonalisation of the cusp monodromy at infinity:
    rho(T^M) = e^{-2 pi i kappa M} U^{-1} diag(e^{2 pi i m_j}) U with
    m_j in ]0, 1] (eigenvalue 1 maps to m = 1)."""

    U: np.ndarray
    m: tuple

    @property
    def p(self) -> int:
        return len(self.m)

    def to_json(self) -> dict:
        return {"U": _mat_to_json(self.U), "m": list(self.m)}

    @classmethod
    def from_json(cls, data: dict) -> "SpectralSplit":
        return cls(_mat_from_json(data["U"]), tuple(float(x) for x in data["m"]))


def _phase_fix(vec: np.ndarray) -> np.ndarray:
    big = np.abs(vec)
    idx = int(np.argmax(big > 1e-8 * (big.max() + 1e-300))) if big.max() > 0 else 0
    piv = vec[idx]
    if abs(piv) == 0:
        return vec
    return vec * (piv.conjugate() / abs(piv))


def spectral_split(rep: RepSpec, ms: MultiplierSystem, m_width: int) -> SpectralSplit:
    """Spectral data of e^{2 pi i kappa M} rho(T^M) with a deterministic
    ordering: m_1 <= ... <= m_p, ties broken lexicographically on the
    phase-normalised eigenvector entries."""
    if not contains(rep.group, t_power(m_width)):
        raise ValueError(f"T^{m_width} is not in {rep.group}")
    res = check_normal(rep, ms, rep.group if rep.group.finite_index else GroupSpec.sl2z())
    if not res.ok:
        raise ValueError("representation is not normal")
    p = rep.p
    mono = (cmath.exp(2j * math.pi * ms.kappa * m_width)
            * evaluate_rho(rep, t_power(m_width)))
    eigvals, eigvecs = np.linalg.eig(mono)
    # orthonormalise within eigenvalue clusters; distinct eigenspaces of a
    # unitary matrix are already orthogonal
    order = np.argsort(np.angle(eigvals))
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]
    i = 0
    while i < p:
        j = i + 1
        while j < p and abs(eigvals[j] - eigvals[i]) < 1e-8:
            j += 1
        q, _ = np.linalg.qr(eigvecs[:, i:j])
        eigvecs[:, i:j] = q
        i = j
    eigvecs /= np.linalg.norm(eigvecs, axis=0, keepdims=True)

    ms_list = []
    for lam in eigvals:
        theta = math.atan2(lam.imag, lam.real)
        if abs(theta) < 1e-10:
            ms_list.append(1.0)
        elif theta > 0:
            ms_list.append(theta / (2.0 * math.pi))
        else:
            ms_list.append(theta / (2.0 * math.pi) + 1.0)

    rows = [_phase_fix(eigvecs[:, i].conj()) for i in range(p)]
    keys = sorted(range(p), key=lambda i: (ms_list[i],
                                           tuple((z.real, z.imag) for z in rows[i])))
    u = np.array([rows[i] for i in keys])
    m = tuple(ms_list[i] for i in keys)

    diag = np.diag([cmath.exp(2j * math.pi * mj) for mj in m])
    resid = np.linalg.norm(mono - u.conj().T @ diag @ u)
    if resid > _UNITARY_TOL:
        raise ValueError(f"spectral split reconstruction residual {resid:.2e}")
    return SpectralSplit(u, m)

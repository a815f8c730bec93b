"""Explicit two-atom product space for 171Yb(1S0) + 171Yb(1S0 or 3P1).

States are products of atomic internal states and a partial wave |R m_R>:

* excited internal: (w, m_j, m_i1, m_i2) where atom ``w`` (1 or 2) carries the
  3P1 excitation with electronic projection m_j, and m_ik is the nuclear-spin
  projection of atom k;
* ground internal: (m_i1, m_i2);
* rotation: (R, m_R) for R <= r_cap.

Projections are stored doubled. An operator on the full space is the Kronecker
product of an internal matrix and a rotational matrix (internal index slow).
Physical states are antisymmetric under exchange of the two 171Yb atoms
(composite fermions); exchange swaps atom labels and multiplies by (-1)^R.

The transition dipole is taken in units of the per-component atomic moment d,
<1 m| d_q |0 0> = delta_{mq}, so the resonant dipole-dipole operator below has
body-frame eigenvalues -2 (Omega=0) and +1 (|Omega|=1) for the exchange-symmetric
excitation.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .wigner import clebsch_gordan, wigner3j

SPHERICAL = (-1, 0, 1)


def _phase(n: int) -> int:
    return -1 if n % 2 else 1


@lru_cache(maxsize=None)
def excited_internal() -> tuple[tuple[int, int, int, int], ...]:
    return tuple(
        (w, tmj, tmi1, tmi2)
        for w in (1, 2)
        for tmj in (-2, 0, 2)
        for tmi1 in (-1, 1)
        for tmi2 in (-1, 1)
    )


@lru_cache(maxsize=None)
def ground_internal() -> tuple[tuple[int, int], ...]:
    return tuple((tmi1, tmi2) for tmi1 in (-1, 1) for tmi2 in (-1, 1))


@lru_cache(maxsize=None)
def rotational(r_cap: int) -> tuple[tuple[int, int], ...]:
    return tuple((R, tm) for R in range(r_cap + 1) for tm in range(-2 * R, 2 * R + 1, 2))


def _index(keys) -> dict:
    return {k: i for i, k in enumerate(keys)}


@lru_cache(maxsize=None)
def lowering(atom: int, q: int) -> np.ndarray:
    """d_q of one atom taking its 3P1 state to 1S0: <0 0|d_q|1 m> = (-1)^q delta_{m,-q}."""
    gi = _index(ground_internal())
    out = np.zeros((len(gi), len(excited_internal())))
    for col, (w, tmj, tmi1, tmi2) in enumerate(excited_internal()):
        if w == atom and tmj == -2 * q:
            out[gi[(tmi1, tmi2)], col] = _phase(q)
    return out


@lru_cache(maxsize=None)
def raising(atom: int, q: int) -> np.ndarray:
    """d_q of one atom taking its 1S0 state to 3P1: <1 m|d_q|0 0> = delta_{m,q}."""
    ei = _index(excited_internal())
    out = np.zeros((len(ei), len(ground_internal())))
    for col, (tmi1, tmi2) in enumerate(ground_internal()):
        out[ei[(atom, 2 * q, tmi1, tmi2)], col] = 1.0
    return out


@lru_cache(maxsize=None)
def exchange_dipole(q1: int, q2: int) -> np.ndarray:
    """d1_{q1} d2_{q2} restricted to the single-excitation manifold."""
    return raising(2, q2) @ lowering(1, q1) + raising(1, q1) @ lowering(2, q2)


def _spin_ops(twice_j: int) -> dict[int, np.ndarray]:
    """Spherical components J_q on |j m>, m ascending."""
    ms = list(range(-twice_j, twice_j + 1, 2))
    j = twice_j / 2
    n = len(ms)
    jz = np.diag([m / 2 for m in ms])
    jp = np.zeros((n, n))
    for k, tm in enumerate(ms[:-1]):
        m = tm / 2
        jp[k + 1, k] = math.sqrt(j * (j + 1) - m * (m + 1))
    return {1: -jp / math.sqrt(2), 0: jz, -1: jp.T / math.sqrt(2)}


@lru_cache(maxsize=None)
def electronic_j(q: int) -> np.ndarray:
    """Spherical component of the electronic angular momentum of the excited atom."""
    ops = _spin_ops(2)
    ei = _index(excited_internal())
    out = np.zeros((len(ei), len(ei)))
    for col, (w, tmj, tmi1, tmi2) in enumerate(excited_internal()):
        c = (tmj + 2) // 2
        for r_new in range(3):
            val = ops[q][r_new, c]
            if val:
                out[ei[(w, 2 * r_new - 2, tmi1, tmi2)], col] += val
    return out


@lru_cache(maxsize=None)
def nuclear_i(q: int, manifold: str = "excited") -> np.ndarray:
    """Spherical component of I = i1 + i2."""
    ops = _spin_ops(1)
    keys = excited_internal() if manifold == "excited" else ground_internal()
    idx = _index(keys)
    out = np.zeros((len(keys), len(keys)))
    for col, key in enumerate(keys):
        *head, tmi1, tmi2 = key
        for atom in (1, 2):
            c = ((tmi1 if atom == 1 else tmi2) + 1) // 2
            for r_new in range(2):
                val = ops[q][r_new, c]
                if not val:
                    continue
                tm_new = 2 * r_new - 1
                new = (*head, tm_new, tmi2) if atom == 1 else (*head, tmi1, tm_new)
                out[idx[new], col] += val
    return out


@lru_cache(maxsize=None)
def unit_vector(q: int, r_cap: int) -> np.ndarray:
    """C^1_q(r_hat) on |R m_R>, R <= r_cap."""
    keys = rotational(r_cap)
    out = np.zeros((len(keys), len(keys)))
    for i, (R, tm) in enumerate(keys):
        for k, (Rp, tmp) in enumerate(keys):
            if abs(R - Rp) != 1 or tm != tmp + 2 * q:
                continue
            out[i, k] = (
                _phase(tm // 2)
                * math.sqrt((2 * R + 1) * (2 * Rp + 1))
                * wigner3j(R, 1, Rp, -tm / 2, q, tmp / 2)
                * wigner3j(R, 1, Rp, 0, 0, 0)
            )
    return out


def exchange_permutation(manifold: str, r_cap: int) -> np.ndarray:
    """Atom-exchange operator P12 on the full product space."""
    keys = excited_internal() if manifold == "excited" else ground_internal()
    idx = _index(keys)
    p_int = np.zeros((len(keys), len(keys)))
    for col, key in enumerate(keys):
        if manifold == "excited":
            w, tmj, tmi1, tmi2 = key
            new = (3 - w, tmj, tmi2, tmi1)
        else:
            tmi1, tmi2 = key
            new = (tmi2, tmi1)
        p_int[idx[new], col] = 1.0
    p_rot = np.diag([float(_phase(R)) for R, _ in rotational(r_cap)])
    return np.kron(p_int, p_rot)


class KronOperator:
    """Sum of Kronecker products ``sum_k A_k (internal) x B_k (rotation)``."""

    def __init__(self, terms):
        self.terms = [(np.asarray(a, dtype=complex if np.iscomplexobj(a) else float), np.asarray(b)) for a, b in terms]

    def apply(self, vecs: np.ndarray) -> np.ndarray:
        """Apply to columns of ``vecs`` (n_int*n_rot, k)."""
        a0, b0 = self.terms[0]
        n_int_in, n_rot = a0.shape[1], b0.shape[1]
        k = vecs.shape[1]
        v = vecs.reshape(n_int_in, n_rot, k)
        out = None
        for a, b in self.terms:
            term = np.einsum("ij,jrk,sr->isk", a, v, b)
            out = term if out is None else out + term
        return out.reshape(out.shape[0] * out.shape[1], k)

    def project(self, left: np.ndarray, right: np.ndarray | None = None) -> np.ndarray:
        right = left if right is None else right
        return left.conj().T @ self.apply(right)


def _rot_identity(r_cap: int) -> np.ndarray:
    return np.eye(len(rotational(r_cap)))


def dipole_dipole_operator(r_cap: int) -> KronOperator:
    """d1.d2 - 3 (d1.r)(d2.r) in units of d^2 (multiply by d^2/r^3 for energy)."""
    eye = _rot_identity(r_cap)
    terms = []
    for q in SPHERICAL:
        terms.append((_phase(q) * exchange_dipole(q, -q), eye))
    rq = {q: unit_vector(q, r_cap) for q in SPHERICAL}
    for q1 in SPHERICAL:
        for q2 in SPHERICAL:
            terms.append((-3 * _phase(q1 + q2) * exchange_dipole(q1, q2), rq[-q1] @ rq[-q2]))
    return KronOperator(terms)


def excitation_exchange_operator(r_cap: int) -> KronOperator:
    """Isotropic d1.d2 / d^2: +1 on exchange-symmetric (superradiant) excitation, -1 antisymmetric."""
    eye = _rot_identity(r_cap)
    return KronOperator([(sum(_phase(q) * exchange_dipole(q, -q) for q in SPHERICAL), eye)])


def decay_operator(r_cap: int) -> KronOperator:
    """sum_q D_q^dag D_q with D = d1 + d2 lowering; in units of Gamma_A (small-kr limit)."""
    eye = _rot_identity(r_cap)
    internal = sum(
        (lowering(1, q) + lowering(2, q)).T @ (lowering(1, q) + lowering(2, q)) for q in SPHERICAL
    )
    return KronOperator([(internal, eye)])


def axis_projection_squared(which: str, r_cap: int) -> KronOperator:
    """(A . r_hat)^2 for A = electronic J, nuclear I, or their sum F."""
    rq = {q: unit_vector(q, r_cap) for q in SPHERICAL}
    comps = {
        "J": {q: electronic_j(q) for q in SPHERICAL},
        "I": {q: nuclear_i(q) for q in SPHERICAL},
    }
    comps["F"] = {q: comps["J"][q] + comps["I"][q] for q in SPHERICAL}
    ops = comps[which]
    terms = []
    for q1 in SPHERICAL:
        for q2 in SPHERICAL:
            terms.append((_phase(q1 + q2) * ops[q1] @ ops[q2], rq[-q1] @ rq[-q2]))
    return KronOperator(terms)


def nuclear_spin_squared(r_cap: int, manifold: str = "excited") -> KronOperator:
    internal = sum(_phase(q) * nuclear_i(q, manifold) @ nuclear_i(-q, manifold) for q in SPHERICAL)
    return KronOperator([(internal, _rot_identity(r_cap))])


def laser_dipole_operator(polarization, r_cap: int) -> KronOperator:
    """(d1 + d2).eps taking ground product states to excited ones, units of d.

    ``polarization`` is a Cartesian complex 3-vector (x, y, z).
    """
    ex, ey, ez = (complex(c) for c in polarization)
    eps = {0: ez, 1: -(ex + 1j * ey) / math.sqrt(2), -1: (ex - 1j * ey) / math.sqrt(2)}
    internal = sum(_phase(q) * eps[-q] * (raising(1, q) + raising(2, q)) for q in SPHERICAL)
    return KronOperator([(internal, _rot_identity(r_cap))])


def _vector(entries: dict, keys, r_cap: int) -> np.ndarray:
    idx = _index(keys)
    rot = _index(rotational(r_cap))
    n_rot = len(rot)
    v = np.zeros(len(keys) * n_rot)
    for (internal, R, tmR), c in entries.items():
        v[idx[internal] * n_rot + rot[(R, tmR)]] += c
    return v


def _antisymmetrize(v: np.ndarray, manifold: str, r_cap: int) -> np.ndarray | None:
    w = v - exchange_permutation(manifold, r_cap) @ v
    norm = np.linalg.norm(w)
    if norm < 1e-12:
        return None
    return w / norm


def excited_channel_vector(twice_f2: int, twice_F: int, R: int, T: int, r_cap: int, twice_MT: int = 0):
    """Antisymmetrized case-(e) state |f1=1/2 f2 F R (T M_T)> in the product space.

    Atom 1 carries the 1S0 coupling f1 = i1, atom 2 the 3P1 excitation with
    f2 = (j=1) + i2; the exchanged term covers the other assignment.
    """
    entries: dict = {}
    f2, F = twice_f2 / 2, twice_F / 2
    for tmR in range(-2 * R, 2 * R + 1, 2):
        tMF = twice_MT - tmR
        if abs(tMF) > twice_F:
            continue
        c_t = clebsch_gordan(F, tMF / 2, R, tmR / 2, T, twice_MT / 2)
        if not c_t:
            continue
        for tm1 in (-1, 1):
            tm2 = tMF - tm1
            if abs(tm2) > twice_f2:
                continue
            c_f = clebsch_gordan(0.5, tm1 / 2, f2, tm2 / 2, F, tMF / 2)
            if not c_f:
                continue
            for tmj in (-2, 0, 2):
                tmi = tm2 - tmj
                if abs(tmi) != 1:
                    continue
                c_a = clebsch_gordan(1, tmj / 2, 0.5, tmi / 2, f2, tm2 / 2)
                key = ((2, tmj, tm1, tmi), R, tmR)
                entries[key] = entries.get(key, 0.0) + c_t * c_f * c_a
    v = _vector(entries, excited_internal(), r_cap)
    return _antisymmetrize(v, "excited", r_cap)


def ground_channel_vector(I: int, R: int, T: int, r_cap: int, twice_MT: int = 0):
    """Antisymmetrized |(i1 i2) I, R; T M_T> of two 1S0 atoms, or None if exchange forbids it."""
    entries: dict = {}
    for tmR in range(-2 * R, 2 * R + 1, 2):
        tMI = twice_MT - tmR
        if abs(tMI) > 2 * I:
            continue
        c_t = clebsch_gordan(I, tMI / 2, R, tmR / 2, T, twice_MT / 2)
        if not c_t:
            continue
        for tm1 in (-1, 1):
            tm2 = tMI - tm1
            if abs(tm2) != 1:
                continue
            c_i = clebsch_gordan(0.5, tm1 / 2, 0.5, tm2 / 2, I, tMI / 2)
            key = ((tm1, tm2), R, tmR)
            entries[key] = entries.get(key, 0.0) + c_t * c_i
    v = _vector(entries, ground_internal(), r_cap)
    if not np.any(v):
        return None
    return _antisymmetrize(v, "ground", r_cap)

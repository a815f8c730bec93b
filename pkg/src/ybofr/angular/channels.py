"""Channel bases for one (T, parity) block.

Three bases describe the same block:

* case (e): |f1 f2 F R (T M_T p)>, diagonal in rotation and hyperfine terms;
* case (c): |J Omega I iota Phi (T M_T p)> with an exchange label sigma,
  diagonal in the Born-Oppenheimer potentials;
* product: |f1 m1, f2 m2, R m_R> with m1 + m2 + m_R = M_T.

Case (e) channels are enumerated from the coupling rules and realized as
antisymmetrized vectors in the explicit product space of :mod:`.pair`. Case (c)
channels are the joint eigenvectors of operators built in that product space
(dipole-dipole coupling, (J.r)^2, (I.r)^2, (F.r)^2, I^2), so their (Omega, sigma)
content per block comes out of the construction.

Ordering of case (e) channels is lexicographic on (f2, F, R). All blocks use
M_T = 0; nothing here depends on M_T without external fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from . import pair
from .halfint import HalfInt

EXCITED = "excited"
GROUND = "ground"
BASES = ("e", "c", "product")


def parse_parity(p) -> int:
    """Accept +1/-1, 'even'/'odd', '+'/'-', 'e'/'o'."""
    if isinstance(p, str):
        key = p.strip().lower()
        if key in ("even", "+", "e", "+1", "1"):
            return 1
        if key in ("odd", "-", "o", "-1"):
            return -1
        raise ValueError(f"unknown parity {p!r}")
    if p in (1, -1):
        return int(p)
    raise ValueError(f"unknown parity {p!r}")


def parity_name(p: int) -> str:
    return "even" if p == 1 else "odd"


@dataclass(frozen=True)
class CaseEChannel:
    f1: HalfInt
    f2: HalfInt
    F: HalfInt
    R: HalfInt
    T: HalfInt
    parity: int

    def label(self) -> str:
        return f"f2={self.f2},F={self.F},R={self.R}"


@dataclass(frozen=True)
class CaseCChannel:
    """Hund's case (c) channel. ``Omega >= 0`` and ``Phi = Omega + iota >= 0``
    label the parity-adapted pair (+/-Omega, +/-iota); ``sigma`` is the sign
    multiplying -C3^Omega / r^3 in the Born-Oppenheimer potential."""

    J: HalfInt
    Omega: HalfInt
    I: HalfInt
    iota: HalfInt
    Phi: HalfInt
    sigma: int
    T: HalfInt
    parity: int

    def label(self) -> str:
        s = "+" if self.sigma > 0 else "-"
        return f"Omega={self.Omega},sigma={s},I={self.I},iota={self.iota},Phi={self.Phi}"


@dataclass(frozen=True)
class ProductChannel:
    f1: HalfInt
    m1: HalfInt
    f2: HalfInt
    m2: HalfInt
    R: HalfInt
    m_R: HalfInt
    parity: int

    def label(self) -> str:
        return f"f1={self.f1},m1={self.m1},f2={self.f2},m2={self.m2},R={self.R},mR={self.m_R}"


def _excited_labels(T: int, parity: int) -> list[tuple[int, int, int]]:
    out = []
    for tf2 in (1, 3):
        for tF in range(abs(1 - tf2), 1 + tf2 + 1, 2):
            F = tF // 2
            for R in range(abs(F - T), F + T + 1):
                # 1S0 is even, 3P1 odd: total parity (-1)^(R+1)
                if (-1) ** (R + 1) == parity:
                    out.append((tf2, tF, R))
    return sorted(out)


def _ground_labels(T: int, parity: int) -> list[tuple[int, int, int]]:
    out = []
    for I in (0, 1):
        for R in range(abs(I - T), I + T + 1):
            if (-1) ** R == parity:
                out.append((1, 2 * I, R))
    return sorted(out)


@dataclass
class ChannelBlock:
    """All channels of one (T, parity) block of a manifold."""

    T: int
    parity: int
    manifold: str
    channels: list[CaseEChannel]
    r_cap: int
    vectors: np.ndarray = field(repr=False)  # columns: case-(e) states in the product space

    def __len__(self) -> int:
        return len(self.channels)

    @property
    def key(self) -> tuple[int, int]:
        return (self.T, self.parity)

    def _project(self, op: pair.KronOperator) -> np.ndarray:
        m = op.project(self.vectors)
        m = np.real_if_close(m)
        return 0.5 * (m + m.T)

    @cached_property
    def dipole_dipole(self) -> np.ndarray:
        """Angular part of the resonant dipole-dipole coupling, units of d^2."""
        self._require_excited()
        return self._project(pair.dipole_dipole_operator(self.r_cap))

    @cached_property
    def exchange(self) -> np.ndarray:
        """Isotropic d1.d2/d^2: +1 superradiant, -1 subradiant excitation."""
        self._require_excited()
        return self._project(pair.excitation_exchange_operator(self.r_cap))

    @cached_property
    def decay(self) -> np.ndarray:
        """Pair decay operator in units of the atomic rate, small-kr limit."""
        self._require_excited()
        return self._project(pair.decay_operator(self.r_cap))

    @cached_property
    def _case_c(self) -> tuple[list[CaseCChannel], np.ndarray]:
        self._require_excited()
        return _build_case_c(self)

    @property
    def case_c_channels(self) -> list[CaseCChannel]:
        return self._case_c[0]

    @property
    def u_ec(self) -> np.ndarray:
        """Columns are the case-(c) channels expressed in the case-(e) basis."""
        return self._case_c[1]

    @cached_property
    def product_channels(self) -> list[ProductChannel]:
        return [ch for ch, _ in _product_states(self)]

    @cached_property
    def u_ep(self) -> np.ndarray:
        """Columns are the case-(e) channels expressed in the product basis (isometry)."""
        prods = np.array([v for _, v in _product_states(self)]).T
        return prods.T @ self.vectors

    def _require_excited(self):
        if self.manifold != EXCITED:
            raise ValueError("operator only defined on the 1S0+3P1 manifold")

    @property
    def f2_values(self) -> np.ndarray:
        return np.array([float(ch.f2) for ch in self.channels])

    @property
    def R_values(self) -> np.ndarray:
        return np.array([int(ch.R) for ch in self.channels])


@lru_cache(maxsize=64)
def _enumerate_cached(T: int, parity: int, manifold: str) -> ChannelBlock:
    labels = _excited_labels(T, parity) if manifold == EXCITED else _ground_labels(T, parity)
    r_cap = max([R for *_, R in labels], default=0) + 2
    channels, vecs = [], []
    for tf2, tF, R in labels:
        if manifold == EXCITED:
            v = pair.excited_channel_vector(tf2, tF, R, T, r_cap)
        else:
            v = pair.ground_channel_vector(tF // 2, R, T, r_cap)
        if v is None:
            continue
        channels.append(
            CaseEChannel(HalfInt(1), HalfInt(tf2), HalfInt(tF), HalfInt.of(R), HalfInt.of(T), parity)
        )
        vecs.append(v)
    n_prim = (len(pair.excited_internal()) if manifold == EXCITED else len(pair.ground_internal())) * len(
        pair.rotational(r_cap)
    )
    vectors = np.array(vecs).T if vecs else np.zeros((n_prim, 0))
    return ChannelBlock(T, parity, manifold, channels, r_cap, vectors)


def enumerate_channels(T: int, parity, manifold: str = EXCITED) -> ChannelBlock:
    """Complete, deduplicated case-(e) channel list for a (T, parity) block.

    Ground channels are labeled by the nuclear spin I (stored as F) and R;
    exchange symmetry of the two fermionic atoms removes (I=0, odd R) and
    (I=1, even R).
    """
    if T < 0:
        raise ValueError("T must be non-negative")
    if manifold not in (EXCITED, GROUND):
        raise ValueError(f"manifold must be {EXCITED!r} or {GROUND!r}")
    return _enumerate_cached(int(T), parse_parity(parity), manifold)


def ground_initial_states(partial_wave: str) -> list[tuple[int, int]]:
    """(T, parity) blocks of the colliding ground pair for a partial wave."""
    if partial_wave == "s":
        return [(0, 1)]
    if partial_wave == "p":
        return [(0, -1), (1, -1), (2, -1)]
    raise ValueError("partial wave must be 's' or 'p'")


def allowed_excited_blocks(ground_partial_wave: str) -> list[tuple[int, int]]:
    """Excited blocks reachable by an E1 photon: parity flips, Delta T = 0, +/-1, no 0 -> 0."""
    out = set()
    for T, p in ground_initial_states(ground_partial_wave):
        for Tp in (T - 1, T, T + 1):
            if Tp < 0 or (T == 0 and Tp == 0):
                continue
            out.add((Tp, -p))
    return sorted(out)


def _build_case_c(block: ChannelBlock) -> tuple[list[CaseCChannel], np.ndarray]:
    rc = block.r_cap
    ops = {
        "vdd": block.dipole_dipole,
        "omega2": block._project(pair.axis_projection_squared("J", rc)),
        "iota2": block._project(pair.axis_projection_squared("I", rc)),
        "phi2": block._project(pair.axis_projection_squared("F", rc)),
        "i2": block._project(pair.nuclear_spin_squared(rc)),
    }
    n = len(block)
    # generic weights: the operators commute, so one diagonalization labels all of them
    weights = {"vdd": 1.0, "omega2": math.pi, "iota2": math.e, "phi2": math.sqrt(2.0), "i2": 0.1 * math.sqrt(3.0)}
    combo = sum(w * ops[k] for k, w in weights.items())
    _, vecs = np.linalg.eigh(combo)
    labelled = []
    for k in range(n):
        v = vecs[:, k]
        val = {name: float(v @ m @ v) for name, m in ops.items()}
        omega = int(round(math.sqrt(max(val["omega2"], 0.0))))
        iota_abs = int(round(math.sqrt(max(val["iota2"], 0.0))))
        phi = int(round(math.sqrt(max(val["phi2"], 0.0))))
        I = int(round((-1 + math.sqrt(1 + 4 * max(val["i2"], 0.0))) / 2))
        # V = -sigma C3^Omega with C3^1 = d^2, C3^0 = -2 d^2
        c3 = 1.0 if omega == 1 else -2.0
        sigma = -int(round(val["vdd"] / c3))
        if omega == 0:
            iota = iota_abs
        else:
            iota = phi - omega
        if abs(iota) != iota_abs:
            raise RuntimeError(f"inconsistent case (c) labels {val}")
        imax = int(np.argmax(np.abs(v)))
        if v[imax] < 0:
            v = -v
        ch = CaseCChannel(
            J=HalfInt.of(1),
            Omega=HalfInt.of(omega),
            I=HalfInt.of(I),
            iota=HalfInt.of(iota),
            Phi=HalfInt.of(phi),
            sigma=sigma,
            T=HalfInt.of(block.T),
            parity=block.parity,
        )
        labelled.append((ch, v))
    labelled.sort(key=lambda cv: (int(cv[0].Omega), cv[0].sigma, int(cv[0].I), int(cv[0].iota), int(cv[0].Phi)))
    keys = [(int(c.Omega), c.sigma, int(c.I), int(c.iota), int(c.Phi)) for c, _ in labelled]
    if len(set(keys)) != len(keys):
        raise RuntimeError(f"case (c) labels are not unique in block T={block.T}: {keys}")
    return [c for c, _ in labelled], np.array([v for _, v in labelled]).T


def _product_states(block: ChannelBlock) -> list[tuple[ProductChannel, np.ndarray]]:
    """Antisymmetrized |f1 m1, f2 m2, R m_R> states spanning the block's case-(e) vectors."""
    from .wigner import clebsch_gordan

    rc = block.r_cap
    Rs = sorted({int(ch.R) for ch in block.channels})
    out = []
    if block.manifold == EXCITED:
        keys = pair.excited_internal()
        for tf2 in (1, 3):
            for tm1 in (-1, 1):
                for tm2 in range(-tf2, tf2 + 1, 2):
                    for R in Rs:
                        tmR = -(tm1 + tm2)
                        if abs(tmR) > 2 * R:
                            continue
                        entries = {}
                        for tmj in (-2, 0, 2):
                            tmi = tm2 - tmj
                            if abs(tmi) != 1:
                                continue
                            c = clebsch_gordan(1, tmj / 2, 0.5, tmi / 2, tf2 / 2, tm2 / 2)
                            if c:
                                entries[((2, tmj, tm1, tmi), R, tmR)] = c
                        v = pair._antisymmetrize(pair._vector(entries, keys, rc), EXCITED, rc)
                        if v is None:
                            continue
                        ch = ProductChannel(
                            HalfInt(1), HalfInt(tm1), HalfInt(tf2), HalfInt(tm2), HalfInt.of(R), HalfInt(tmR), block.parity
                        )
                        out.append((ch, v))
    else:
        keys = pair.ground_internal()
        seen = []
        for tm1 in (-1, 1):
            for tm2 in (-1, 1):
                for R in Rs:
                    tmR = -(tm1 + tm2)
                    if abs(tmR) > 2 * R:
                        continue
                    v = pair._antisymmetrize(pair._vector({((tm1, tm2), R, tmR): 1.0}, keys, rc), GROUND, rc)
                    if v is None or any(abs(v @ s) > 1 - 1e-12 for s in seen):
                        continue
                    seen.append(v)
                    ch = ProductChannel(HalfInt(1), HalfInt(tm1), HalfInt(1), HalfInt(tm2), HalfInt.of(R), HalfInt(tmR), block.parity)
                    out.append((ch, v))
    return out


def frame_transform(block: ChannelBlock, from_basis: str, to_basis: str) -> np.ndarray:
    """Matrix taking coefficient vectors in ``from_basis`` to ``to_basis``.

    Between case (e) and case (c) the matrix is square and orthogonal. The
    product basis of a block spans all T at fixed M_T, so transforms into it
    are isometries (orthonormal columns) and transforms out of it are their
    transposes.
    """
    for b in (from_basis, to_basis):
        if b not in BASES:
            raise ValueError(f"unknown basis {b!r}; expected one of {BASES}")
    if from_basis == to_basis:
        n = len(block.product_channels) if from_basis == "product" else len(block)
        return np.eye(n)
    to_e = {"e": np.eye(len(block))}
    if block.manifold == EXCITED:
        to_e["c"] = block.u_ec
    elif "c" in (from_basis, to_basis):
        raise ValueError("case (c) basis is only defined for the excited manifold")
    if from_basis == "product":
        m = block.u_ep.T
        return m if to_basis == "e" else to_e[to_basis].T @ m
    if to_basis == "product":
        return block.u_ep @ to_e[from_basis]
    # from -> e -> to
    return to_e[to_basis].T @ to_e[from_basis]

"""Spin-1/2 Hamiltonians on arbitrary bond graphs.

The energy is

    H = - sum_bonds sum_a J_ij^a S_i^a S_j^a - sum_sites sum_a h_i^a S_i^a

with spin operators S^a = sigma^a / 2 (eigenvalues +-1/2) and a in {x, y, z}.
Basis states are indexed by bit patterns: bit i of the index carries site i,
and a set bit means spin up (S^z = +1/2).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

DENSE_CAP = 12


class Bond(NamedTuple):
    i: int
    j: int
    jx: float
    jy: float
    jz: float

    def coupling(self, axis):
        return (self.jx, self.jy, self.jz)["xyz".index(axis)]


@dataclass(frozen=True)
class LatticeSpec:
    """Triangular patch parameters: number of rows and the common coupling."""

    rows: int
    coupling: float = -1.0


class SpinHamiltonian:
    """Bond list plus per-site fields for a fixed number of spins.

    Instances are immutable after construction and safe to share between
    worker threads.
    """

    def __init__(self, num_spins, bonds, fields=None):
        if num_spins < 1:
            raise ValueError(f"need at least one spin, got {num_spins}")
        norm_bonds = []
        for b in bonds:
            i, j, jx, jy, jz = b
            if i == j:
                raise ValueError(f"bond ({i}, {j}) couples a site to itself")
            if not (0 <= i < num_spins and 0 <= j < num_spins):
                raise ValueError(f"bond ({i}, {j}) out of range for {num_spins} spins")
            if i > j:
                i, j = j, i
            norm_bonds.append(Bond(i, j, float(jx), float(jy), float(jz)))
        seen = set()
        for b in norm_bonds:
            if (b.i, b.j) in seen:
                raise ValueError(f"duplicate bond ({b.i}, {b.j})")
            seen.add((b.i, b.j))
        self.num_spins = int(num_spins)
        self.bonds = tuple(norm_bonds)
        if fields is None:
            f = np.zeros((num_spins, 3))
        else:
            f = np.asarray(fields, dtype=float)
            if f.shape != (num_spins, 3):
                raise ValueError(f"fields must have shape ({num_spins}, 3), got {f.shape}")
            f = f.copy()
        f.flags.writeable = False
        self.fields = f

    @property
    def dim(self):
        return 1 << self.num_spins

    @property
    def num_bonds(self):
        return len(self.bonds)

    def axis_terms(self, axis):
        """Nonzero couplings along one axis: (site_i, site_j, J) arrays and (site, h) arrays."""
        a = "xyz".index(axis)
        bi, bj, bc = [], [], []
        for b in self.bonds:
            c = b[2 + a]
            if c != 0.0:
                bi.append(b.i)
                bj.append(b.j)
                bc.append(c)
        si, sc = [], []
        for s in range(self.num_spins):
            h = self.fields[s, a]
            if h != 0.0:
                si.append(s)
                sc.append(h)
        return (
            np.array(bi, dtype=np.int64),
            np.array(bj, dtype=np.int64),
            np.array(bc, dtype=float),
            np.array(si, dtype=np.int64),
            np.array(sc, dtype=float),
        )

    def has_real_matrix(self):
        """True when the dense matrix is real, which fails only for y fields."""
        return not np.any(self.fields[:, 1])

    def to_dict(self):
        return {
            "L": self.num_spins,
            "bonds": [[b.i, b.j, b.jx, b.jy, b.jz] for b in self.bonds],
            "fields": [list(map(float, row)) for row in self.fields],
        }

    @classmethod
    def from_dict(cls, data):
        if "triangular" in data:
            tri = data["triangular"]
            return build_triangular(LatticeSpec(rows=int(tri["rows"]), coupling=float(tri.get("J", -1.0))))
        try:
            num = int(data["L"])
            bonds = data["bonds"]
        except KeyError as exc:
            raise ValueError(f"hamiltonian dict missing key {exc}") from exc
        return cls(num, bonds, data.get("fields"))

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def content_hash(self):
        """Stable hex digest of the physical content, used to key fixtures and outputs."""
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def triangle_coordinates(rows):
    """(row, col) pairs for a triangular patch, row-major from the single-site top row."""
    if rows < 1:
        raise ValueError("rows must be positive")
    return [(r, c) for r in range(rows) for c in range(r + 1)]


def build_triangular(spec):
    """Triangular patch with free boundaries and isotropic coupling on every bond.

    Sites are numbered row-major starting from the top row. Each site couples
    to its in-row successor and to the two sites below it in the next row,
    which enumerates every nearest-neighbor pair exactly once.
    """
    coords = triangle_coordinates(spec.rows)
    index = {rc: k for k, rc in enumerate(coords)}
    J = spec.coupling
    bonds = []
    for (r, c), i in index.items():
        for dr, dc in ((0, 1), (1, 0), (1, 1)):
            j = index.get((r + dr, c + dc))
            if j is not None:
                bonds.append((i, j, J, J, J))
    return SpinHamiltonian(len(coords), bonds)


def energy_bound(h):
    """Upper bound on the spectral radius from term-wise triangle inequality.

    Every bond term is bounded by |J|/4 and every field term by |h|/2.
    """
    bound = 0.25 * sum(abs(b.jx) + abs(b.jy) + abs(b.jz) for b in h.bonds)
    bound += 0.5 * float(np.abs(h.fields).sum())
    return bound


def coupling_scale(h):
    """Largest single coupling or field magnitude, the natural step-size scale."""
    scale = 0.0
    for b in h.bonds:
        scale = max(scale, abs(b.jx), abs(b.jy), abs(b.jz))
    if h.fields.size:
        scale = max(scale, float(np.abs(h.fields).max()))
    return scale


_SX = np.array([[0.0, 0.5], [0.5, 0.0]], dtype=complex)
_SY = np.array([[0.0, 0.5j], [-0.5j, 0.0]], dtype=complex)
_SZ = np.array([[-0.5, 0.0], [0.0, 0.5]], dtype=complex)
SITE_OPERATORS = {"x": _SX, "y": _SY, "z": _SZ}


def _site_operator(op, site, num_spins):
    out = np.array([[1.0 + 0.0j]])
    for s in reversed(range(num_spins)):
        out = np.kron(out, op if s == site else np.eye(2, dtype=complex))
    return out


def dense_matrix(h, max_spins=DENSE_CAP):
    """Dense matrix of H in the bit-indexed basis.

    Refuses to build matrices beyond ``max_spins`` sites since the cost grows
    as 4^L. Raise the cap explicitly if you know what you are doing.
    """
    if h.num_spins > max_spins:
        raise ValueError(
            f"dense matrix for {h.num_spins} spins exceeds the cap of {max_spins}; "
            "use the state-vector path for larger systems"
        )
    L = h.num_spins
    H = np.zeros((h.dim, h.dim), dtype=complex)
    for b in h.bonds:
        for axis, J in zip("xyz", (b.jx, b.jy, b.jz)):
            if J != 0.0:
                op = SITE_OPERATORS[axis]
                H -= J * (_site_operator(op, b.i, L) @ _site_operator(op, b.j, L))
    for s in range(L):
        for axis, hv in zip("xyz", h.fields[s]):
            if hv != 0.0:
                H -= hv * _site_operator(SITE_OPERATORS[axis], s, L)
    return H

"""State vectors over L spins: 2^L complex amplitudes indexed by bit patterns."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import Enum

import numpy as np

_MAGIC = b"SVEC"
_DUMP_VERSION = 1


class RandomStateKind(Enum):
    RANDOM_SIGN = "random_sign"
    GAUSSIAN_COMPLEX = "gaussian_complex"

    @classmethod
    def parse(cls, name):
        for kind in cls:
            if kind.value == name:
                return kind
        raise ValueError(f"unknown ensemble {name!r}; choose from "
                         f"{[k.value for k in cls]}")


@dataclass
class StateVector:
    num_spins: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (1 << self.num_spins,):
            raise ValueError(
                f"expected {1 << self.num_spins} amplitudes for {self.num_spins} spins, "
                f"got shape {amps.shape}"
            )
        self.amplitudes = amps

    @property
    def dim(self):
        return 1 << self.num_spins

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def copy(self):
        return StateVector(self.num_spins, self.amplitudes.copy())

    def is_real(self, tol=0.0):
        return float(np.abs(self.amplitudes.imag).max()) <= tol


def basis_state(num_spins, index):
    """Computational basis state |index> with bit i of index giving site i."""
    dim = 1 << num_spins
    if not 0 <= index < dim:
        raise ValueError(f"basis index {index} out of range for {num_spins} spins")
    amps = np.zeros(dim, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(num_spins, amps)


def sample_rng(seed, stream=0):
    """Counter-based generator for one sample stream.

    Philox (4x64) keyed with (seed, stream), so every sample index gets an
    independent reproducible stream regardless of scheduling order.
    """
    key = np.array([seed, stream], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def random_state(num_spins, kind, seed, stream=0):
    """Unit-norm random state from one of the trace-sampling ensembles.

    RANDOM_SIGN draws amplitudes +-1/sqrt(D) (real), GAUSSIAN_COMPLEX draws a
    complex normal vector and normalizes it. Either way D * E[a_n^* a_m]
    equals the identity, which is what makes D <phi|A|phi> an unbiased trace
    estimate.
    """
    rng = sample_rng(seed, stream)
    dim = 1 << num_spins
    if kind == RandomStateKind.RANDOM_SIGN:
        signs = rng.integers(0, 2, size=dim) * 2 - 1
        amps = signs.astype(np.complex128) / np.sqrt(dim)
    elif kind == RandomStateKind.GAUSSIAN_COMPLEX:
        amps = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        amps /= np.linalg.norm(amps)
    else:
        raise ValueError(f"unknown random state kind {kind!r}")
    return StateVector(num_spins, amps)


def inner_product(a, b):
    """<a|b> with the conjugate on the first argument."""
    if a.num_spins != b.num_spins:
        raise ValueError(f"dimension mismatch: {a.num_spins} vs {b.num_spins} spins")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def save_amplitudes(state, path):
    """Binary dump: 16-byte header (magic, version, L, reserved), then
    little-endian interleaved re/im float64 pairs."""
    header = _MAGIC + struct.pack("<III", _DUMP_VERSION, state.num_spins, 0)
    data = state.amplitudes.astype("<c16").tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(data)


def load_amplitudes(path):
    with open(path, "rb") as fh:
        header = fh.read(16)
        if len(header) < 16 or header[:4] != _MAGIC:
            raise ValueError(f"{path}: not an amplitude dump (bad magic)")
        version, num_spins, _ = struct.unpack("<III", header[4:])
        if version != _DUMP_VERSION:
            raise ValueError(f"{path}: unsupported dump version {version}")
        data = fh.read()
    dim = 1 << num_spins
    amps = np.frombuffer(data, dtype="<c16")
    if amps.size != dim:
        raise ValueError(f"{path}: expected {dim} amplitudes, found {amps.size}")
    return StateVector(num_spins, amps.astype(np.complex128))

"""Target-matrix generation: Heisenberg Hamiltonians, random matrices by
class, random samples from an operator span, and zero padding.

All randomness flows through a counter-based Philox generator so that every
target is reproducible from its seed alone.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from vbe.pauli import PauliSum, to_dense


def make_rng(seed: int | np.random.Generator) -> np.random.Generator:
    """Philox-backed generator (counter based, cheap to split deterministically)."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


@dataclass(frozen=True)
class HeisenbergParams:
    n: int
    jx: float = 1.0
    jy: float = 1.0
    jz: float = 1.0
    h: float = 1.0
    periodic: bool = False

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("Heisenberg model needs at least 2 sites")


def _letters(n: int, assignments: dict[int, str]) -> str:
    return "".join(assignments.get(j, "I") for j in range(n))


def heisenberg_graph_terms(
    n: int,
    bonds: list[tuple[int, int]],
    jx: float,
    jy: float,
    jz: float,
    h: float,
) -> PauliSum:
    """Pauli decomposition of a Heisenberg model on an arbitrary bond graph,
    with a transverse X field on every site."""
    terms: dict[str, complex] = {}
    for i, j in bonds:
        if not (0 <= i < n and 0 <= j < n and i != j):
            raise ValueError(f"invalid bond ({i}, {j}) for n={n}")
        for coupling, letter in ((jx, "X"), (jy, "Y"), (jz, "Z")):
            if coupling != 0.0:
                key = _letters(n, {i: letter, j: letter})
                terms[key] = terms.get(key, 0.0) + coupling
    if h != 0.0:
        for i in range(n):
            key = _letters(n, {i: "X"})
            terms[key] = terms.get(key, 0.0) + h
    if not terms:
        return PauliSum.zero(n)
    return PauliSum.from_terms(terms)


def chain_bonds(n: int, periodic: bool = False) -> list[tuple[int, int]]:
    bonds = [(i, i + 1) for i in range(n - 1)]
    if periodic and n > 2:
        bonds.append((n - 1, 0))
    elif periodic and n == 2:
        pass  # the ring on two sites is the single existing bond
    return bonds


def complete_bonds(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n - 1) for j in range(i + 1, n)]


def heisenberg_terms(p: HeisenbergParams) -> PauliSum:
    return heisenberg_graph_terms(p.n, chain_bonds(p.n, p.periodic), p.jx, p.jy, p.jz, p.h)


def heisenberg(p: HeisenbergParams) -> np.ndarray:
    """Dense hermitian 2^n matrix of the (transverse-field) Heisenberg chain."""
    return to_dense(heisenberg_terms(p))


def random_matrix(
    n: int,
    field: str = "complex",
    structure: str = "arbitrary",
    seed: int | np.random.Generator = 0,
) -> np.ndarray:
    """Random 2^n x 2^n matrix with i.i.d. uniform entries on [-1, 1].

    ``field`` is "complex" or "real"; ``structure`` is "arbitrary" or
    "hermitian" (hermitian applies (M + M†)/2).  Deterministic per seed.
    """
    if field not in ("complex", "real"):
        raise ValueError(f"unknown field {field!r}")
    if structure not in ("arbitrary", "hermitian"):
        raise ValueError(f"unknown structure {structure!r}")
    rng = make_rng(seed)
    dim = 1 << n
    m = rng.uniform(-1.0, 1.0, size=(dim, dim)).astype(np.complex128)
    if field == "complex":
        m = m + 1j * rng.uniform(-1.0, 1.0, size=(dim, dim))
    if structure == "hermitian":
        m = (m + m.conj().T) / 2.0
    return m


def random_span_sample(
    b: list[PauliSum],
    hermitian: bool,
    seed: int | np.random.Generator = 0,
) -> np.ndarray:
    """Random complex combination of the given operators, optionally hermitized."""
    if not b:
        raise ValueError("need at least one basis operator")
    rng = make_rng(seed)
    coeffs = rng.uniform(-1.0, 1.0, size=len(b)) + 1j * rng.uniform(-1.0, 1.0, size=len(b))
    m = sum(c * to_dense(op) for c, op in zip(coeffs, b))
    if hermitian:
        m = (m + m.conj().T) / 2.0
    return m


def zero_pad(a: np.ndarray) -> np.ndarray:
    """Embed into the smallest power-of-two square matrix, original top-left."""
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError("zero_pad expects a 2-D matrix")
    side = max(a.shape) if a.size else 1
    dim = 1 << max(0, (side - 1).bit_length())
    if a.shape == (dim, dim):
        return a
    out = np.zeros((dim, dim), dtype=np.complex128)
    out[: a.shape[0], : a.shape[1]] = a
    return out


# ---- matrix file formats -------------------------------------------------
def save_matrix_csv(m: np.ndarray, path: str) -> None:
    """Row-major CSV; each entry written as an adjacent re,im pair."""
    m = np.asarray(m, dtype=np.complex128)
    with open(path, "w", encoding="ascii") as fh:
        for row in m:
            cells: list[str] = []
            for v in row:
                cells.append(f"{v.real:.17g}")
                cells.append(f"{v.imag:.17g}")
            fh.write(",".join(cells) + "\n")


def load_matrix_csv(path: str) -> np.ndarray:
    rows: list[list[complex]] = []
    with open(path, "r", encoding="ascii") as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            vals = [float(v) for v in line.split(",")]
            if len(vals) % 2 != 0:
                raise ValueError("CSV rows must hold an even number of fields (re,im pairs)")
            rows.append([complex(vals[k], vals[k + 1]) for k in range(0, len(vals), 2)])
    if not rows:
        raise ValueError("empty matrix file")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValueError("ragged matrix file")
    return np.array(rows, dtype=np.complex128)


_BIN_HEADER = struct.Struct("<Q")


def save_matrix_bin(m: np.ndarray, path: str) -> None:
    """Little-endian float64 binary with an 8-byte dimension header (square only)."""
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("binary format stores square matrices only")
    with open(path, "wb") as fh:
        fh.write(_BIN_HEADER.pack(m.shape[0]))
        fh.write(np.ascontiguousarray(m).astype("<c16").tobytes())


def load_matrix_bin(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        (dim,) = _BIN_HEADER.unpack(fh.read(_BIN_HEADER.size))
        data = np.frombuffer(fh.read(), dtype="<c16")
    if data.size != dim * dim:
        raise ValueError(f"expected {dim * dim} entries, found {data.size}")
    return data.reshape(dim, dim).astype(np.complex128)


def load_matrix(path: str) -> np.ndarray:
    if path.endswith(".bin"):
        return load_matrix_bin(path)
    return load_matrix_csv(path)

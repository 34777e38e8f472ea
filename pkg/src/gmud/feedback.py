"""Bit-exact limited-feedback messages under a common 12N-bit budget.

Each receiver reports its channel through one of three message layouts,
all costing exactly 12*N bits:

======================  =================================================
scheme                  fields, in wire order
======================  =================================================
``reg-inv-sel``         8 unit-row components (N bits each),
                        2 row norms (2N bits each)
``reg-inv``             4 unit-row components (2N bits each),
                        1 row norm (4N bits)
``gmud``                4 principal-vector components (2N bits each),
                        lambda1, lambda2 (2N bits each)
======================  =================================================

Complex vectors are sent componentwise as (Re, Im) pairs in row order,
quantized by a uniform midrise quantizer on [-1, 1]; norms and singular
values use [0, 4].  Indices are packed most-significant-bit first in the
field order above; the bitstring is a ``str`` of '0'/'1' so its length
is the exact bit count.  Decoding renormalizes unit vectors and sorts
singular values, but keeps the raw reconstruction levels so re-encoding
a decoded message reproduces its bits exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FormatError
from .linalg import SvdFactorization

__all__ = [
    "SCHEMES",
    "VECTOR_RANGE",
    "MAGNITUDE_RANGE",
    "FeedbackBudget",
    "RegInvSelectionFeedback",
    "RegInvFixedFeedback",
    "GmudFeedback",
    "quantize_scalar",
    "scheme_layout",
    "encode",
    "decode",
]

SCHEMES = ("reg-inv", "reg-inv-sel", "gmud")

VECTOR_RANGE = (-1.0, 1.0)
MAGNITUDE_RANGE = (0.0, 4.0)


@dataclass(frozen=True)
class FeedbackBudget:
    """Per-user bit budget parameter N; every scheme totals 12*N bits."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("budget parameter N must be >= 1")

    @property
    def total_bits(self) -> int:
        return 12 * self.n


def scheme_layout(scheme: str, n) -> list[tuple[str, int, float, float]]:
    """Ordered (name, bits, lo, hi) wire fields for a scheme at budget N.

    ``n`` may be the integer parameter or a :class:`FeedbackBudget`.
    """
    if isinstance(n, FeedbackBudget):
        n = n.n
    if n < 1:
        raise ValueError("budget parameter N must be >= 1")
    vlo, vhi = VECTOR_RANGE
    mlo, mhi = MAGNITUDE_RANGE
    if scheme == "reg-inv-sel":
        fields = [
            (f"row{i}_{part}{j}", n, vlo, vhi)
            for i in range(2)
            for j in range(2)
            for part in ("re", "im")
        ]
        fields += [(f"norm{i}", 2 * n, mlo, mhi) for i in range(2)]
    elif scheme == "reg-inv":
        fields = [
            (f"row_{part}{j}", 2 * n, vlo, vhi)
            for j in range(2)
            for part in ("re", "im")
        ]
        fields += [("norm", 4 * n, mlo, mhi)]
    elif scheme == "gmud":
        fields = [
            (f"v1_{part}{j}", 2 * n, vlo, vhi)
            for j in range(2)
            for part in ("re", "im")
        ]
        fields += [("lambda1", 2 * n, mlo, mhi), ("lambda2", 2 * n, mlo, mhi)]
    else:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    assert sum(bits for _, bits, _, _ in fields) == 12 * n
    return fields


def quantize_scalar(v: float, lo: float, hi: float, bits: int) -> tuple[int, float]:
    """Uniform midrise quantizer on [lo, hi) with 2**bits levels.

    Out-of-range inputs clamp to the edge cells.  Returns the cell index
    and the reconstruction level lo + (index + 0.5) * step; in-range
    values err by at most half a step, and reconstruction levels map
    back to their own index.
    """
    if bits < 1:
        raise ValueError("bits must be >= 1")
    if not lo < hi:
        raise ValueError("lo must be < hi")
    levels = 1 << bits
    step = (hi - lo) / levels
    index = int(np.floor((v - lo) / step))
    index = min(max(index, 0), levels - 1)
    return index, lo + (index + 0.5) * step


def _reconstruct(index: int, lo: float, hi: float, bits: int) -> float:
    step = (hi - lo) / (1 << bits)
    return lo + (index + 0.5) * step


def _pack(indices, layout) -> str:
    return "".join(
        format(idx, f"0{bits}b") for idx, (_, bits, _, _) in zip(indices, layout)
    )


def _unpack(bits: str, layout) -> list[int]:
    out = []
    pos = 0
    for _, width, _, _ in layout:
        out.append(int(bits[pos : pos + width], 2))
        pos += width
    return out


def _split_complex(vec: np.ndarray) -> list[float]:
    out = []
    for z in vec:
        out.append(float(z.real))
        out.append(float(z.imag))
    return out


def _join_complex(scalars) -> np.ndarray:
    it = iter(scalars)
    return np.array([complex(re, im) for re, im in zip(it, it)], dtype=np.complex128)


def _unit_row(row: np.ndarray) -> tuple[np.ndarray, float]:
    nrm = float(np.linalg.norm(row))
    if nrm == 0.0:
        return np.array([1.0 + 0.0j, 0.0j]), 0.0
    return row / nrm, nrm


@dataclass(eq=False)
class RegInvSelectionFeedback:
    """Decoded full-channel report: two renormalized unit rows plus row norms."""

    raw: np.ndarray  # the 10 reconstruction levels, wire order
    unit_rows: np.ndarray  # 2x2 complex, each row unit norm
    row_norms: np.ndarray  # (2,)

    @property
    def channel(self) -> np.ndarray:
        """Channel estimate: rows scaled back by their norms."""
        return self.unit_rows * self.row_norms[:, None]


@dataclass(eq=False)
class RegInvFixedFeedback:
    """Decoded single-row report (the no-selection baseline)."""

    raw: np.ndarray  # 5 reconstruction levels
    unit_row: np.ndarray  # (2,) complex, unit norm
    row_norm: float

    @property
    def row(self) -> np.ndarray:
        return self.unit_row * self.row_norm


@dataclass(eq=False)
class GmudFeedback:
    """Decoded spectral report: principal vector plus both singular values."""

    raw: np.ndarray  # 6 reconstruction levels
    v1: np.ndarray  # (2,) complex, unit norm
    lambda1: float
    lambda2: float


def _source_scalars(source, scheme: str, row: int) -> list[float]:
    """Flatten scheme-appropriate source data into wire-order scalars."""
    if scheme == "reg-inv-sel":
        if isinstance(source, RegInvSelectionFeedback):
            return [float(v) for v in source.raw]
        h = np.asarray(source, dtype=np.complex128)
        units, norms = zip(*(_unit_row(h[i]) for i in range(2)))
        return [s for u in units for s in _split_complex(u)] + list(norms)
    if scheme == "reg-inv":
        if isinstance(source, RegInvFixedFeedback):
            return [float(v) for v in source.raw]
        h = np.asarray(source, dtype=np.complex128)
        if h.ndim == 2:
            if row == -1:  # best-norm row instead of the fixed first row
                row = int(np.argmax((h.real**2 + h.imag**2).sum(axis=1)))
            h = h[row]
        unit, nrm = _unit_row(h)
        return _split_complex(unit) + [nrm]
    if scheme == "gmud":
        if isinstance(source, GmudFeedback):
            return [float(v) for v in source.raw]
        if isinstance(source, SvdFactorization):
            lam1, lam2, v1 = source.lambda1, source.lambda2, source.v[:, 0]
        else:
            lam1, lam2, v1 = source
        return _split_complex(np.asarray(v1, dtype=np.complex128)) + [
            float(lam1),
            float(lam2),
        ]
    raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")


def encode(source, scheme: str, n: int, row: int = 0) -> str:
    """Encode channel/decomposition data (or a decoded message) to 12*N bits.

    ``source`` is a 2x2 channel matrix for the inverse-precoding schemes
    (``row`` picks the reported row for ``reg-inv``; -1 means best norm),
    a ``(lambda1, lambda2, v1)`` triple or :class:`SvdFactorization` for
    ``gmud``, or a previously decoded message of the matching type, whose
    stored reconstruction levels re-encode to identical bits.
    """
    layout = scheme_layout(scheme, n)
    scalars = _source_scalars(source, scheme, row)
    indices = [
        quantize_scalar(v, lo, hi, bits)[0]
        for v, (_, bits, lo, hi) in zip(scalars, layout)
    ]
    return _pack(indices, layout)


def decode(bits: str, scheme: str, n: int):
    """Decode a 12*N-bit message into the scheme's feedback dataclass.

    Scalars become their midrise reconstruction levels; unit vectors are
    renormalized and singular values sorted descending.  Raises
    :class:`FormatError` on wrong length or alphabet.
    """
    if isinstance(n, FeedbackBudget):
        n = n.n
    layout = scheme_layout(scheme, n)
    if len(bits) != 12 * n:
        raise FormatError(f"expected {12 * n} bits, got {len(bits)}")
    if set(bits) - {"0", "1"}:
        raise FormatError("bitstring must contain only '0' and '1'")
    values = np.array(
        [
            _reconstruct(idx, lo, hi, width)
            for idx, (_, width, lo, hi) in zip(_unpack(bits, layout), layout)
        ]
    )
    if scheme == "reg-inv-sel":
        rows = np.stack([_join_complex(values[0:4]), _join_complex(values[4:8])])
        units = np.stack([r / np.linalg.norm(r) for r in rows])
        return RegInvSelectionFeedback(values, units, values[8:10].copy())
    if scheme == "reg-inv":
        vec = _join_complex(values[0:4])
        return RegInvFixedFeedback(values, vec / np.linalg.norm(vec), float(values[4]))
    lam = sorted((float(values[4]), float(values[5])), reverse=True)
    vec = _join_complex(values[0:4])
    return GmudFeedback(values, vec / np.linalg.norm(vec), lam[0], lam[1])

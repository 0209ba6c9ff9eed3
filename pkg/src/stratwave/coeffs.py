"""Group-agnostic coefficient algebra on sparse wavelet index maps.

A CoefficientField carries a normalization tag.  "L1" entries are sampled
convolution values c = (u * psi_j^*)(2^{-j} . gamma); "Lp" entries are the
synthesis coefficients against L^p-normalized atoms, d = 2^{-jQ/p} c.  The
factor is pinned by the requirement that the discrete Besov norm at the
critical (s, 2, 2) parameters coincide exactly with the plain l2 norm of
the L^p-tagged moduli.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

import numpy as np

from .groups import GroupSpec
from .sampling import AtomIndex, SamplingSet

__all__ = [
    "Normalization",
    "L1_ATOMS",
    "lp_atoms",
    "CoefficientField",
    "NormParams",
    "ConversionRequired",
    "convert",
    "discrete_besov_norm",
    "sobolev_seq_norm",
    "reorder",
    "q_m",
    "mterm_error_curve",
    "unconditionality_ratio",
    "field_add",
    "field_sub",
    "field_scale",
]

SPARSE_FLOOR = 1e-14


class ConversionRequired(ValueError):
    """Operation needs a different normalization tag."""


@dataclass(frozen=True)
class Normalization:
    kind: str  # "L1" or "Lp"
    p: Optional[float] = None

    def __post_init__(self):
        if self.kind == "Lp" and (self.p is None or self.p <= 0):
            raise ValueError("Lp normalization needs a positive exponent")

    def label(self) -> str:
        return "L1" if self.kind == "L1" else f"Lp({self.p:g})"


L1_ATOMS = Normalization("L1")


def lp_atoms(p: float) -> Normalization:
    return Normalization("Lp", float(p))


@dataclass(frozen=True)
class CoefficientField:
    group: GroupSpec
    sampling: SamplingSet
    entries: dict  # AtomIndex -> complex
    normalization: Normalization

    @classmethod
    def build(cls, group, sampling, items: Iterable, normalization, floor=SPARSE_FLOOR):
        """Assemble from (index, value) pairs, accumulating duplicates and
        dropping entries below floor * max modulus."""
        acc: dict = {}
        for idx, val in items:
            idx = AtomIndex(int(idx[0]), tuple(int(k) for k in idx[1]))
            val = complex(val)
            if not np.isfinite(val.real) or not np.isfinite(val.imag):
                raise ValueError(f"non-finite coefficient at {idx}")
            acc[idx] = acc.get(idx, 0j) + val
        if acc and floor is not None:
            cut = floor * max(abs(v) for v in acc.values())
            acc = {k: v for k, v in acc.items() if abs(v) > cut}
        return cls(group=group, sampling=sampling, entries=acc, normalization=normalization)

    def __len__(self):
        return len(self.entries)

    def moduli(self) -> np.ndarray:
        return np.abs(np.fromiter(self.entries.values(), dtype=complex, count=len(self.entries)))

    def l2(self) -> float:
        return float(np.sqrt(np.sum(self.moduli() ** 2))) if self.entries else 0.0


@dataclass(frozen=True)
class NormParams:
    s: float
    p: float
    q: float

    def __post_init__(self):
        if self.p < 1 or self.q < 1:
            raise ValueError("p and q must be >= 1")
        if not (np.isfinite(self.p) and np.isfinite(self.q)):
            raise ValueError("endpoint p or q = infinity is out of scope")

    def is_critical(self, Q: float, tol: float = 1e-12) -> bool:
        return abs(self.s / Q + 1.0 / self.p - 0.5) <= tol


def _conversion_exponent(frm: Normalization, to: Normalization) -> float:
    """Per-unit-j exponent e such that d_to = 2^{j e} d_frm, factored via L1."""
    e = 0.0
    if frm.kind == "Lp":
        e += 1.0 / frm.p  # Lp -> L1
    if to.kind == "Lp":
        e -= 1.0 / to.p  # L1 -> Lp
    return e


def convert(c: CoefficientField, to: Normalization) -> CoefficientField:
    if c.normalization == to:
        return c
    e = _conversion_exponent(c.normalization, to) * c.group.Q
    entries = {idx: val * 2.0 ** (idx.j * e) for idx, val in c.entries.items()}
    return replace(c, entries=entries, normalization=to)


def discrete_besov_norm(c: CoefficientField, np_: NormParams) -> float:
    """(sum_j (sum_gamma (2^{j(s - Q/p)} |c_jg|)^p)^{q/p})^{1/q} on L1-tagged entries."""
    c = convert(c, L1_ATOMS)
    if not c.entries:
        return 0.0
    Q = c.group.Q
    per_j: dict = {}
    for idx, val in c.entries.items():
        per_j.setdefault(idx.j, []).append(abs(val))
    s, p, q = np_.s, np_.p, np_.q
    acc = 0.0
    for j, vals in per_j.items():
        w = 2.0 ** (j * (s - Q / p))
        inner = np.sum((w * np.asarray(vals)) ** p) ** (1.0 / p)
        acc += inner**q
    return float(acc ** (1.0 / q))


def sobolev_seq_norm(c: CoefficientField) -> float:
    """Plain l2 norm of the moduli; requires L^p-atom normalization."""
    if c.normalization.kind != "Lp":
        raise ConversionRequired(
            "sobolev_seq_norm needs Lp-atom normalization; convert() first"
        )
    return c.l2()


def _rank_key(item):
    idx, val = item
    return (-abs(val), idx.j, idx.gamma)


def reorder(c: CoefficientField) -> list[tuple[int, AtomIndex, complex]]:
    """Entries by decreasing modulus; ties broken by (j asc, gamma lex)."""
    ordered = sorted(c.entries.items(), key=_rank_key)
    return [(m + 1, idx, val) for m, (idx, val) in enumerate(ordered)]


def q_m(c: CoefficientField, M: int) -> tuple[CoefficientField, list[AtomIndex]]:
    """Nonlinear projector: keep the M largest-modulus entries."""
    if M < 1:
        raise ValueError("M must be >= 1")
    ranked = reorder(c)[:M]
    kept = {idx: val for _, idx, val in ranked}
    e_m = [idx for _, idx, _ in ranked]
    return replace(c, entries=kept), e_m


def mterm_error_curve(c: CoefficientField, np_: NormParams, m_list) -> list[tuple[int, float]]:
    """(M, norm of c - Q_M c) with the tail measured by the (0, p, p) proxy."""
    ranked = reorder(c)
    proxy = NormParams(0.0, np_.p, np_.p)
    out = []
    for M in m_list:
        tail = {idx: val for _, idx, val in ranked[M:]}
        tail_field = replace(c, entries=tail)
        out.append((int(M), discrete_besov_norm(tail_field, proxy)))
    return out


def unconditionality_ratio(
    c_small: CoefficientField, c_big: CoefficientField, np_: NormParams
) -> float:
    """Sequence-space ratio ||c_small|| / ||c_big|| under coefficient domination."""
    if set(c_small.entries) - set(c_big.entries):
        raise ValueError("c_small must be supported on c_big's index set")
    for idx, val in c_small.entries.items():
        if abs(val) > abs(c_big.entries[idx]) + 1e-12 * abs(c_big.entries[idx]):
            raise ValueError(f"domination violated at {idx}")
    big = discrete_besov_norm(c_big, np_)
    if big == 0.0:
        return 0.0
    return discrete_besov_norm(c_small, np_) / big


def _check_compatible(a: CoefficientField, b: CoefficientField):
    if a.normalization != b.normalization:
        raise ConversionRequired("fields have different normalization tags")


def field_add(a: CoefficientField, b: CoefficientField) -> CoefficientField:
    _check_compatible(a, b)
    out = dict(a.entries)
    for idx, val in b.entries.items():
        out[idx] = out.get(idx, 0j) + val
    out = {k: v for k, v in out.items() if v != 0}
    return replace(a, entries=out)


def field_scale(a: CoefficientField, alpha: complex) -> CoefficientField:
    return replace(a, entries={k: alpha * v for k, v in a.entries.items()})


def field_sub(a: CoefficientField, b: CoefficientField) -> CoefficientField:
    return field_add(a, field_scale(b, -1.0))

"""Exact arithmetic on stratified Lie groups in exponential coordinates.

A group element is a flat real vector whose coordinates are grouped by
stratum.  Step-1 (abelian) and step-2 groups are supported; step-2 group
laws are given by an antisymmetric bracket tensor mapping the first
stratum into the second.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "GroupSpec",
    "LayoutError",
    "DomainError",
    "abelian",
    "heisenberg",
    "multiply",
    "inverse",
    "identity",
    "dilate",
    "hom_norm",
    "hom_dimension",
    "critical_exponent",
    "dilation_weights",
    "validate_law",
    "group_to_json",
    "group_from_json",
]


class LayoutError(ValueError):
    """Point coordinates do not match the group's strata layout."""


class DomainError(ValueError):
    """Argument outside the operation's domain."""


@dataclass(frozen=True)
class GroupSpec:
    """A stratified group: strata dimensions, group law, homogeneous norm.

    kind is "abelian", "heisenberg" or "custom".  For step-2 groups the
    law is x.y = x + y + [x, y]/2 with the bracket stored as a tensor of
    shape (dim V2, dim V1, dim V1), antisymmetric in its last two axes.
    """

    strata_dims: tuple[int, ...]
    kind: str
    norm_kind: str = "default"
    bracket: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        if not self.strata_dims or any(d <= 0 for d in self.strata_dims):
            raise ValueError("strata_dims must be positive integers")
        if len(self.strata_dims) > 2:
            raise NotImplementedError("only step-1 and step-2 groups are supported")
        if len(self.strata_dims) == 2:
            d1, d2 = self.strata_dims
            b = self.bracket
            if b is None or b.shape != (d2, d1, d1):
                raise ValueError("step-2 group needs a bracket of shape (dim V2, dim V1, dim V1)")
            if not np.allclose(b, -b.transpose(0, 2, 1)):
                raise ValueError("bracket must be antisymmetric")

    @property
    def dim(self) -> int:
        return sum(self.strata_dims)

    @property
    def step(self) -> int:
        return len(self.strata_dims)

    @property
    def Q(self) -> int:
        return sum((k + 1) * d for k, d in enumerate(self.strata_dims))


def abelian(d: int) -> GroupSpec:
    return GroupSpec(strata_dims=(d,), kind="abelian")


def heisenberg(d: int) -> GroupSpec:
    """Heisenberg group H^d: strata (2d, 1), [e_i, e_{d+i}] = e_t."""
    b = np.zeros((1, 2 * d, 2 * d))
    for i in range(d):
        b[0, i, d + i] = 1.0
        b[0, d + i, i] = -1.0
    return GroupSpec(strata_dims=(2 * d, 1), kind="heisenberg", bracket=b)


def _as_point(g: GroupSpec, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (g.dim,):
        raise LayoutError(f"expected {g.dim} coordinates, got shape {x.shape}")
    return x


def identity(g: GroupSpec) -> np.ndarray:
    return np.zeros(g.dim)


def multiply(g: GroupSpec, x, y) -> np.ndarray:
    x, y = _as_point(g, x), _as_point(g, y)
    if g.step == 1:
        return x + y
    d1 = g.strata_dims[0]
    out = x + y
    out[d1:] += 0.5 * np.einsum("kij,i,j->k", g.bracket, x[:d1], y[:d1])
    return out


def inverse(g: GroupSpec, x) -> np.ndarray:
    # exponential coordinates of the first kind: inversion is negation
    # (asserted by test_groups for both presets, not assumed silently)
    return -_as_point(g, x)


def dilation_weights(g: GroupSpec) -> np.ndarray:
    return np.concatenate([np.full(d, k + 1.0) for k, d in enumerate(g.strata_dims)])


def dilate(g: GroupSpec, alpha: float, x) -> np.ndarray:
    if alpha <= 0:
        raise DomainError("dilation parameter must be positive")
    x = _as_point(g, x)
    return x * alpha ** dilation_weights(g)


def hom_norm(g: GroupSpec, x) -> float:
    """Homogeneous norm: Euclidean for abelian, Koranyi-type for step 2.

    Step 2: (|v1|^4 + 16 |v2|^2)^(1/4); on H^1 this is the classical
    ((x^2+y^2)^2 + 16 t^2)^(1/4).
    """
    x = _as_point(g, x)
    if g.norm_kind not in ("default", "koranyi", "euclidean"):
        raise ValueError(f"unknown norm_kind {g.norm_kind!r}")
    if g.step == 1:
        return float(np.linalg.norm(x))
    d1 = g.strata_dims[0]
    v1 = float(np.dot(x[:d1], x[:d1]))
    v2 = float(np.dot(x[d1:], x[d1:]))
    return (v1 * v1 + 16.0 * v2) ** 0.25


def hom_dimension(g: GroupSpec) -> int:
    return g.Q


def critical_exponent(g: GroupSpec, s: float) -> float:
    """Lebesgue exponent p paired with smoothness s by s/Q + 1/p = 1/2."""
    Q = g.Q
    if not 0 < s < Q / 2:
        raise DomainError(f"s must lie in (0, Q/2) = (0, {Q / 2}), got {s}")
    return 1.0 / (0.5 - s / Q)


def validate_law(g: GroupSpec, n_triples: int = 200, tol: float = 1e-12, seed: int = 0) -> float:
    """Fuzz the group law: associativity, identity, inverses on random triples.

    Returns the worst absolute defect found; raises if it exceeds tol.
    """
    rng = np.random.default_rng(seed)
    e = identity(g)
    worst = 0.0
    for _ in range(n_triples):
        x, y, z = rng.normal(size=(3, g.dim))
        a = multiply(g, multiply(g, x, y), z)
        b = multiply(g, x, multiply(g, y, z))
        worst = max(worst, float(np.max(np.abs(a - b))))
        worst = max(worst, float(np.max(np.abs(multiply(g, x, e) - x))))
        worst = max(worst, float(np.max(np.abs(multiply(g, x, inverse(g, x)) - e))))
    if worst > tol:
        raise ValueError(f"group law validation failed: defect {worst:.3e} > {tol:.1e}")
    return worst


def group_to_json(g: GroupSpec) -> dict:
    if g.kind == "abelian":
        return {"kind": "abelian", "d": g.strata_dims[0]}
    if g.kind == "heisenberg":
        return {"kind": "heisenberg", "d": g.strata_dims[0] // 2}
    return {
        "kind": "custom",
        "strata_dims": list(g.strata_dims),
        "law": "custom",
        "coefficients": g.bracket.tolist(),
    }


def group_from_json(obj: dict) -> GroupSpec:
    kind = obj.get("kind")
    if kind == "abelian":
        return abelian(int(obj["d"]))
    if kind == "heisenberg":
        return heisenberg(int(obj["d"]))
    if kind == "custom":
        g = GroupSpec(
            strata_dims=tuple(obj["strata_dims"]),
            kind="custom",
            bracket=np.asarray(obj["coefficients"], dtype=float),
        )
        validate_law(g)
        return g
    raise ValueError(f"unknown group kind {kind!r}")

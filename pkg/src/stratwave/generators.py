"""Synthetic bounded sequences with prescribed escape mechanisms.

Each track places a fixed coefficient bundle along an affine scale/core law
(j(n), gamma(n)); reindexing preserves the coefficient multiset, so the
sequence norm is constant by construction.  Mixtures are checked after
generation: the component tracks must actually satisfy the orthogonality
they declare, unless overlap is explicitly allowed (adversarial inputs).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from typing import Optional

import numpy as np

from . import groups
from .groups import GroupSpec
from .sampling import AtomIndex, SamplingSet, preset_sampling_set
from .coeffs import CoefficientField, lp_atoms, sobolev_seq_norm
from .profiles import ScaleCorePair, SequenceSnapshots, classify_pair

__all__ = [
    "BundleAtom",
    "TrackSpec",
    "GeneratorSpec",
    "GeneratorError",
    "generate",
    "spec_to_json",
    "spec_from_json",
]

KNOWN_KINDS = ("translating", "concentrating", "spreading", "mixture", "compact")


class GeneratorError(ValueError):
    """Generated snapshots violate a declared invariant."""


@dataclass(frozen=True)
class BundleAtom:
    dj: int                      # scale offset from the core, >= 0
    dgamma: tuple[int, ...]      # lattice offset from the core
    d: complex

    def __post_init__(self):
        if self.dj < 0:
            raise ValueError("bundle scale offsets must be >= 0")


@dataclass(frozen=True)
class TrackSpec:
    j0: int
    j_slope: int
    gamma0: tuple[int, ...]
    gamma_slope: tuple[int, ...]
    bundle: tuple[BundleAtom, ...]

    def core_at(self, n: int) -> tuple[int, tuple[int, ...]]:
        j = self.j0 + self.j_slope * n
        gamma = tuple(g0 + gs * n for g0, gs in zip(self.gamma0, self.gamma_slope))
        return j, gamma


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    tracks: tuple[TrackSpec, ...]
    horizon: int
    p: float = 2.0
    noise_amplitude: float = 0.0
    noise_count: int = 0
    noise_seed: int = 0
    allow_overlap: bool = False
    check_tail: Optional[int] = None
    check_T_div: float = 5.0
    check_eps_stable: float = 1e-9

    def __post_init__(self):
        if self.kind not in KNOWN_KINDS:
            raise ValueError(f"kind must be one of {KNOWN_KINDS}")
        if self.horizon < 2:
            raise ValueError("horizon must be at least 2")
        if not self.tracks:
            raise ValueError("at least one track required")
        if self.kind != "mixture" and len(self.tracks) != 1:
            raise ValueError(f"kind {self.kind!r} takes exactly one track")
        t = self.tracks[0]
        if self.kind == "translating" and (t.j_slope != 0 or not any(t.gamma_slope)):
            raise ValueError("translating needs constant scale and a moving core")
        if self.kind == "concentrating" and t.j_slope <= 0:
            raise ValueError("concentrating needs a positive scale slope")
        if self.kind == "spreading" and t.j_slope >= 0:
            raise ValueError("spreading needs a negative scale slope")
        if self.kind == "compact" and (t.j_slope != 0 or any(t.gamma_slope)):
            raise ValueError("compact needs a constant track")


def _noise_entries(spec: GeneratorSpec, gs: SamplingSet) -> list:
    if spec.noise_count == 0 or spec.noise_amplitude == 0.0:
        return []
    rng = np.random.default_rng(spec.noise_seed)
    dim = gs.group.dim
    out = []
    for k in range(spec.noise_count):
        gamma = tuple(int(v) for v in rng.integers(-10**6, -10**6 + 1000, size=dim))
        val = spec.noise_amplitude * complex(*rng.normal(size=2)) / np.sqrt(2.0)
        out.append((AtomIndex(0, gamma), val))
    return out


def _track_pair(spec: GeneratorSpec, gs: SamplingSet, t: TrackSpec) -> ScaleCorePair:
    cores = [t.core_at(n) for n in range(spec.horizon)]
    return ScaleCorePair(sampling=gs,
                         js=tuple(j for j, _ in cores),
                         gammas=tuple(g for _, g in cores))


def generate(spec: GeneratorSpec, g: GroupSpec, gs: SamplingSet) -> SequenceSnapshots:
    """Realize the generator law as a sequence of coefficient fields."""
    noise = _noise_entries(spec, gs)
    fields = []
    for n in range(spec.horizon):
        entries: dict = {}
        for t in spec.tracks:
            j_core, gamma_core = t.core_at(n)
            for atom in t.bundle:
                j_abs = j_core + atom.dj
                gamma_abs = gs.lat_mul(gs.lat_dilate(gamma_core, atom.dj),
                                       tuple(atom.dgamma))
                idx = AtomIndex(j_abs, gamma_abs)
                if idx in entries and not spec.allow_overlap:
                    raise GeneratorError(
                        f"track collision at n={n}, index {idx}; declared "
                        "orthogonality is violated")
                entries[idx] = entries.get(idx, 0j) + complex(atom.d)
        for idx, val in noise:
            if idx in entries and not spec.allow_overlap:
                raise GeneratorError(f"noise collides with a track at n={n}")
            entries[idx] = entries.get(idx, 0j) + val
        fields.append(CoefficientField(group=g, sampling=gs, entries=entries,
                                       normalization=lp_atoms(spec.p)))

    snaps = SequenceSnapshots(group=g, sampling=gs,
                              n_values=tuple(range(spec.horizon)),
                              fields=tuple(fields))

    norms = np.array([sobolev_seq_norm(f) for f in snaps.fields])
    if not spec.allow_overlap and np.max(np.abs(norms - norms[0])) > 1e-12 * max(norms[0], 1.0):
        raise GeneratorError("sequence norm drifts although no overlap was declared")

    if len(spec.tracks) > 1 and not spec.allow_overlap:
        tail = spec.check_tail or max(2, spec.horizon // 2)
        pairs = [_track_pair(spec, gs, t) for t in spec.tracks]
        for a in range(len(pairs)):
            for b in range(a + 1, len(pairs)):
                v = classify_pair(pairs[a], pairs[b], tail,
                                  spec.check_T_div, spec.check_eps_stable)
                if not v.orthogonal:
                    raise GeneratorError(
                        f"mixture tracks {a} and {b} are not orthogonal over "
                        f"the horizon: {v.kind} ({v.detail})")
    return snaps


# -- JSON plumbing -----------------------------------------------------------

def spec_to_json(spec: GeneratorSpec) -> dict:
    return {
        "kind": spec.kind,
        "horizon": spec.horizon,
        "p": spec.p,
        "noise_amplitude": spec.noise_amplitude,
        "noise_count": spec.noise_count,
        "noise_seed": spec.noise_seed,
        "allow_overlap": spec.allow_overlap,
        "check_tail": spec.check_tail,
        "check_T_div": spec.check_T_div,
        "check_eps_stable": spec.check_eps_stable,
        "tracks": [
            {
                "j0": t.j0,
                "j_slope": t.j_slope,
                "gamma0": list(t.gamma0),
                "gamma_slope": list(t.gamma_slope),
                "bundle": [
                    {"dj": a.dj, "dgamma": list(a.dgamma),
                     "re": a.d.real, "im": a.d.imag}
                    for a in t.bundle
                ],
            }
            for t in spec.tracks
        ],
    }


def spec_from_json(obj: dict) -> GeneratorSpec:
    tracks = tuple(
        TrackSpec(
            j0=int(t["j0"]),
            j_slope=int(t["j_slope"]),
            gamma0=tuple(int(x) for x in t["gamma0"]),
            gamma_slope=tuple(int(x) for x in t["gamma_slope"]),
            bundle=tuple(
                BundleAtom(dj=int(a["dj"]),
                           dgamma=tuple(int(x) for x in a["dgamma"]),
                           d=complex(a["re"], a.get("im", 0.0)))
                for a in t["bundle"]
            ),
        )
        for t in obj["tracks"]
    )
    return GeneratorSpec(
        kind=obj["kind"],
        tracks=tracks,
        horizon=int(obj["horizon"]),
        p=float(obj.get("p", 2.0)),
        noise_amplitude=float(obj.get("noise_amplitude", 0.0)),
        noise_count=int(obj.get("noise_count", 0)),
        noise_seed=int(obj.get("noise_seed", 0)),
        allow_overlap=bool(obj.get("allow_overlap", False)),
        check_tail=obj.get("check_tail"),
        check_T_div=float(obj.get("check_T_div", 5.0)),
        check_eps_stable=float(obj.get("check_eps_stable", 1e-9)),
    )

"""Analytic data records for the L-functions an expression can reference.

Built-in kinds are the Riemann zeta function and Dirichlet L-functions of
primitive characters (the GL(1) instantiation).  A "series" kind is the
extension point for user-supplied coefficient data; such descriptors are
only valid in their strip of absolute convergence and the zero engine
refuses them elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import characters as chars
from .errors import NotPrimitive, OracleRange


@dataclass(frozen=True)
class LFunctionDescriptor:
    """One L(s, pi): rank, conductor, spectral parameters, coefficient oracle."""

    id: str
    rank: int
    conductor: int
    spectral_params: tuple  # rank complex numbers mu_r
    pole_order: int  # 1 iff Riemann zeta, else 0
    root_number: complex
    self_dual: bool
    contragredient_id: str
    ramanujan_bound: float  # theta in [0, 1/2)
    kind: str = "zeta"  # zeta | dirichlet | series
    character: object = None
    series_coeffs: tuple = None  # kind == "series" only
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def log_conductor(self):
        return math.log(self.conductor)

    def coefficient(self, n: int) -> complex:
        """n-th Dirichlet coefficient lambda(n)."""
        if n < 1:
            raise OracleRange("coefficient index must be >= 1")
        if self.kind == "zeta":
            return 1.0 + 0j
        if self.kind == "dirichlet":
            return self.character(n)
        if self.series_coeffs is None or n > len(self.series_coeffs):
            raise OracleRange(
                f"series descriptor {self.id!r} has no coefficient at n={n}"
            )
        return self.series_coeffs[n - 1]

    @property
    def series_only(self):
        return self.kind == "series"

    def validate(self):
        assert abs(abs(self.root_number) - 1.0) <= 1e-12
        assert abs(self.coefficient(1) - 1.0) <= 1e-12
        assert self.pole_order in (0, 1)
        assert self.rank >= 1
        assert 0.0 <= self.ramanujan_bound < 0.5
        return self


def zeta_descriptor() -> LFunctionDescriptor:
    return LFunctionDescriptor(
        id="zeta",
        rank=1,
        conductor=1,
        spectral_params=(0j,),
        pole_order=1,
        root_number=1.0 + 0j,
        self_dual=True,
        contragredient_id="zeta",
        ramanujan_bound=0.0,
        kind="zeta",
    )


def dirichlet_descriptor(chi: chars.Character, id: str = None) -> LFunctionDescriptor:
    """Descriptor for L(s, chi), chi primitive.

    Spectral parameter mu = parity (0 for even chi, 1 for odd), the standard
    completion.  Root number from the normalized Gauss sum.
    """
    if not chi.is_primitive:
        raise NotPrimitive(
            f"need a primitive character; chi index {chi.index} mod {chi.modulus} "
            f"has conductor {chi.conductor}"
        )
    if chi.modulus == 1:
        return zeta_descriptor()
    did = id or f"chi_{chi.modulus}_{chi.index}"
    conj = chi.conjugate()
    return LFunctionDescriptor(
        id=did,
        rank=1,
        conductor=chi.modulus,
        spectral_params=(complex(chi.parity),),
        pole_order=0,
        root_number=chars.root_number(chi),
        self_dual=(conj.index == chi.index),
        contragredient_id=f"chi_{chi.modulus}_{conj.index}",
        ramanujan_bound=0.0,
        kind="dirichlet",
        character=chi,
    )


def series_descriptor(
    id, coeffs, rank=1, conductor=1, spectral_params=(0j,), theta=0.0
) -> LFunctionDescriptor:
    """Extension point: user-supplied coefficients, valid only for Re s > 1 + theta."""
    coeffs = tuple(complex(c) for c in coeffs)
    return LFunctionDescriptor(
        id=id,
        rank=rank,
        conductor=conductor,
        spectral_params=tuple(complex(m) for m in spectral_params),
        pole_order=0,
        root_number=1.0 + 0j,
        self_dual=True,
        contragredient_id=id,
        ramanujan_bound=theta,
        kind="series",
        series_coeffs=coeffs,
    )


def contragredient(desc: LFunctionDescriptor) -> LFunctionDescriptor:
    """The dual descriptor: conjugated data, same conductor."""
    if desc.kind == "zeta" or desc.contragredient_id == desc.id:
        return desc
    if desc.kind == "dirichlet":
        return dirichlet_descriptor(desc.character.conjugate())
    raise NotPrimitive(f"no contragredient for descriptor {desc.id!r}")

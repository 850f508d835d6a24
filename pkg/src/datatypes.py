from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, Optional

import mpmath
from dataclasses_json import config, dataclass_json
from marshmallow import fields

import constants
from exact_linalg import format_rat, parse_rat
from formal_dzv import Certificate, FormalVector
from period_spaces import EichlerShimuraReport, Sign, Which
from relation_gen import Relation
from sl2_structure import FLAVORS, Coset, Flavor

Command = Literal["cosets", "period-basis", "relations", "verify", "dims", "dsh-check", "euler-check"]
OutputFormat = Literal["json", "latex", "table"]
COMMANDS = ("cosets", "period-basis", "relations", "verify", "dims", "dsh-check", "euler-check")


class ConfigError(ValueError):
    pass


def rat_field():
    return field(metadata=config(encoder=format_rat, decoder=parse_rat, mm_field=fields.String()))


def optional_rat_field():
    return field(
        default=None,
        metadata=config(
            encoder=lambda x: None if x is None else format_rat(x),
            decoder=lambda x: None if x is None else parse_rat(x),
            mm_field=fields.String(allow_none=True),
        ),
    )


def mp_str(x, digits: int = 15) -> str:
    return mpmath.nstr(x, digits)


@dataclass_json
@dataclass(frozen=True)
class CosetsReport:
    schema_version: int
    N: int
    cosets: list[Coset]


@dataclass_json
@dataclass(frozen=True)
class PeriodBasisRecord:
    schema_version: int
    N: int
    w: int
    flavor: str
    which: str
    sign: str
    dim: int
    # one map coset "c,d" -> coefficients of X^r Y^(w-r) per basis vector
    basis: list[dict[str, list[str]]]


@dataclass_json
@dataclass(frozen=True)
class FormalVectorRecord:
    N: int
    k: int
    # {"kind": "Z2", "r", "s", "a", "b", "coeff"}, or {"kind": "Z1", "k", "c", "coeff"}
    terms: list[dict]
    latex: str

    @classmethod
    def of(cls, v: FormalVector) -> "FormalVectorRecord":
        terms = [{**symbol.to_json(), "coeff": format_rat(c)} for symbol, c in v.terms]
        return cls(v.N, v.k, terms, v.latex())


@dataclass_json
@dataclass(frozen=True)
class CertificateEntry:
    family: Literal["dsh", "pev"]
    index: int
    coefficient: Fraction = rat_field()


def certificate_entries(certificate: Optional[Certificate]) -> list[CertificateEntry]:
    if certificate is None:
        return []
    return [CertificateEntry(family, i, c) for family, i, c in certificate.labelled()]


@dataclass_json
@dataclass(frozen=True)
class QRecord:
    r: int
    s: int
    a: int
    b: int
    q: Fraction = rat_field()
    q_od: Fraction = rat_field()
    q_ev: Fraction = rat_field()


@dataclass_json
@dataclass(frozen=True)
class RelationRecord:
    source_index: int
    vector: FormalVectorRecord
    odd_part: FormalVectorRecord
    even_part: FormalVectorRecord
    single_part: FormalVectorRecord
    q: list[QRecord]
    certificate: list[CertificateEntry]
    odd_certificate: list[CertificateEntry]
    scale: Fraction = rat_field()
    # Φ(odd_part)/(2πi)^k as predicted by odd_certificate
    odd_quotient: Optional[Fraction] = optional_rat_field()

    @classmethod
    def of(cls, relation: Relation, odd_quotient: Optional[Fraction]) -> "RelationRecord":
        qc = relation.coefficients
        q = [QRecord(*key, value, qc.q_od[key], qc.q_ev[key]) for key, value in sorted(qc.q.items())]
        return cls(
            source_index=relation.source_index,
            vector=FormalVectorRecord.of(relation.vector),
            odd_part=FormalVectorRecord.of(relation.odd_part),
            even_part=FormalVectorRecord.of(relation.even_part),
            single_part=FormalVectorRecord.of(relation.single_part),
            q=q,
            certificate=certificate_entries(relation.certificate),
            odd_certificate=certificate_entries(relation.odd_certificate),
            scale=relation.scale,
            odd_quotient=odd_quotient,
        )


@dataclass_json
@dataclass(frozen=True)
class RelationsReport:
    schema_version: int
    N: int
    k: int
    dim_W_plus: int
    q_symmetry: bool
    relations: list[RelationRecord]
    converse_check: Optional[bool] = None


@dataclass_json
@dataclass(frozen=True)
class VerificationRecord:
    source_index: int
    t_residual: str
    relation_residual: str
    quotient: str
    residual: Optional[str]
    passed: bool
    rational: Optional[Fraction] = optional_rat_field()
    predicted: Optional[Fraction] = optional_rat_field()


@dataclass_json
@dataclass(frozen=True)
class VerifyReport:
    schema_version: int
    N: int
    k: int
    prec_bits: int
    max_den: int
    dsh_max_residual: str
    relations: list[VerificationRecord]
    passed: bool


@dataclass_json
@dataclass(frozen=True)
class DimsReport:
    schema_version: int
    eichler_shimura: EichlerShimuraReport
    relaxed_equals_W: bool
    barred_sign_identity: bool
    delta_star_kernel_equals_W: bool
    iota_injective: bool


@dataclass_json
@dataclass(frozen=True)
class DshCheckRecord:
    schema_version: int
    r: int
    s: int
    a: int
    b: int
    N: int
    prec_bits: int
    product: str
    shuffle: str
    stuffle: str
    shuffle_residual: str
    stuffle_residual: str
    passed: bool


@dataclass_json
@dataclass(frozen=True)
class EulerCheckRecord:
    schema_version: int
    k: int
    N: int
    a: int
    prec_bits: int
    residual: str
    passed: bool
    factor: Fraction = rat_field()


@dataclass(frozen=True)
class RunConfig:
    command: Command
    N: int
    k: Optional[int] = None
    w: Optional[int] = None
    flavor: Flavor = "standard"
    which: Which = "W"
    sign: Sign = "both"
    prec_bits: int = constants.DEFAULT_PREC_BITS
    max_den: int = constants.DEFAULT_MAX_DEN
    output_format: OutputFormat = "json"
    out: Optional[str] = None
    workers: int = 0
    check_converse: bool = False
    r: Optional[int] = None
    s: Optional[int] = None
    a: int = 0
    b: int = 0

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"Unknown command {self.command!r}")
        if self.N < 1:
            raise ConfigError(f"N must be positive, got {self.N}")
        k, w = self.k, self.w
        if k is not None and w is not None and k != w + 2:
            raise ConfigError(f"Inconsistent weights: k={k} but w={w}")
        if k is None and w is not None:
            object.__setattr__(self, "k", w + 2)
        if w is None and k is not None:
            object.__setattr__(self, "w", k - 2)
        if self.command in ("period-basis", "relations", "verify", "dims", "euler-check") and self.k is None:
            raise ConfigError(f"{self.command} needs --k or --w")
        if self.command != "euler-check" and self.w is not None and self.w < 0:
            raise ConfigError(f"w must be >= 0, got {self.w}")
        if self.command in ("relations", "verify") and (self.k, self.N) == (2, 1):
            raise ConfigError("(k, N) = (2, 1) is excluded")
        if self.command == "euler-check" and self.k < 1:
            raise ConfigError(f"k must be positive, got {self.k}")
        if self.command == "dsh-check" and (self.r is None or self.s is None or self.r < 1 or self.s < 1):
            raise ConfigError("dsh-check needs --r and --s, both >= 1")
        if self.flavor not in FLAVORS:
            raise ConfigError(f"Unknown flavor {self.flavor!r}")
        if self.prec_bits < 16:
            raise ConfigError(f"Precision must be at least 16 bits, got {self.prec_bits}")
        if self.max_den < 1:
            raise ConfigError(f"max_den must be >= 1, got {self.max_den}")
        if self.workers < 0:
            raise ConfigError(f"workers must be >= 0, got {self.workers}")
        if self.output_format == "latex" and self.command != "relations":
            raise ConfigError("LaTeX output is available for relations only")

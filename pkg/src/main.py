import argparse
import asyncio
import logging
import sys
from dataclasses import dataclass
from typing import Optional

import pandas as pd
from dotenv import load_dotenv

import constants
from datatypes import (
    ConfigError,
    CosetsReport,
    DimsReport,
    DshCheckRecord,
    EulerCheckRecord,
    PeriodBasisRecord,
    RelationRecord,
    RelationsReport,
    RunConfig,
    VerificationRecord,
    VerifyReport,
    mp_str,
)
from formal_dzv import ExcludedWeightLevelError, InvalidSymbolError, symbol_index
from numeric_eval import (
    DivergentValueError,
    RegValue,
    dsh_max_residual,
    dsh_numeric_check,
    euler_factor,
    evaluate_symbols,
    predicted_rational,
    residual_threshold,
    verify_euler,
    verify_relation,
)
from period_spaces import (
    SpaceRequest,
    barred_sign_identity,
    delta_star_kernel,
    eichler_shimura_report,
    iota_rank,
    space_W,
    space_W_relaxed,
    to_vectors,
)
from relation_gen import converse_rank_check, generate_relations, q_symmetry_check
from sl2_structure import FLAVORS, enumerate_cosets

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CommandOutput:
    record: object
    frame: pd.DataFrame
    passed: bool = True
    latex: Optional[str] = None


def format_reg(value: RegValue) -> str:
    return f"{mp_str(value.c0.value)} + ({mp_str(value.c1.value)})·T"


async def cmd_cosets(cfg: RunConfig) -> CommandOutput:
    cosets = list(enumerate_cosets(cfg.N))
    frame = pd.DataFrame.from_records([(C.c, C.d) for C in cosets], columns=["c", "d"])
    return CommandOutput(CosetsReport(constants.SCHEMA_VERSION, cfg.N, cosets), frame)


async def cmd_period_basis(cfg: RunConfig) -> CommandOutput:
    try:
        request = SpaceRequest(cfg.N, cfg.w, cfg.flavor, cfg.which, cfg.sign)
    except ValueError as e:
        raise ConfigError(str(e)) from e
    basis = to_vectors(request.compute(), cfg.N, cfg.w, cfg.flavor)
    rows = [
        (i, key, " ".join(coefficients))
        for i, P in enumerate(basis)
        for key, coefficients in P.to_json().items()
        if any(c != "0/1" for c in coefficients)
    ]
    record = PeriodBasisRecord(
        schema_version=constants.SCHEMA_VERSION,
        N=cfg.N,
        w=cfg.w,
        flavor=cfg.flavor,
        which=cfg.which,
        sign=cfg.sign,
        dim=len(basis),
        basis=[P.to_json() for P in basis],
    )
    return CommandOutput(record, pd.DataFrame.from_records(rows, columns=["vector", "coset", "coefficients"]))


def relations_latex(N: int, k: int, records: list[RelationRecord]) -> str:
    lines = [f"% N = {N}, k = {k}: relations in P^ev_{{{k},{N}}}"]
    for record in records:
        lines.append(f"% basis vector {record.source_index}")
        lines.append(f"\\[ {record.vector.latex} \\in \\mathcal{{P}}^{{\\mathrm{{ev}}}}_{{{k},{N}}} \\]")
        lines.append(f"\\[ {record.odd_part.latex} \\in \\mathbb{{Q}}\\cdot(2\\pi i)^{{{k}}} \\]")
    return "\n".join(lines) + "\n"


async def cmd_relations(cfg: RunConfig) -> CommandOutput:
    relations = generate_relations(cfg.N, cfg.k)
    q_symmetry = all(q_symmetry_check(relation.coefficients) for relation in relations)
    converse = converse_rank_check(cfg.N, cfg.k) if cfg.check_converse else None
    records = [
        RelationRecord.of(relation, predicted_rational(relation.odd_certificate) if relation.odd_certificate else None)
        for relation in relations
    ]
    report = RelationsReport(
        schema_version=constants.SCHEMA_VERSION,
        N=cfg.N,
        k=cfg.k,
        dim_W_plus=len(relations),
        q_symmetry=q_symmetry,
        relations=records,
        converse_check=converse,
    )
    frame = pd.DataFrame.from_records(
        [(r.source_index, len(r.vector.terms), str(r.scale), str(r.odd_quotient)) for r in records],
        columns=["relation", "terms", "scale", "odd_quotient"],
    )
    passed = q_symmetry and converse is not False
    return CommandOutput(report, frame, passed, relations_latex(cfg.N, cfg.k, records))


async def cmd_verify(cfg: RunConfig) -> CommandOutput:
    relations = generate_relations(cfg.N, cfg.k)
    await evaluate_symbols(symbol_index(cfg.k, cfg.N), cfg.N, cfg.prec_bits, cfg.workers)
    dsh_residual = dsh_max_residual(cfg.k, cfg.N, cfg.prec_bits)
    results = [verify_relation(relation, cfg.prec_bits, cfg.max_den) for relation in relations]
    records = [
        VerificationRecord(
            source_index=result.source_index,
            t_residual=mp_str(result.t_residual, 5),
            relation_residual=mp_str(result.relation_residual, 5),
            quotient=mp_str(result.quotient, 30),
            residual=None if result.residual is None else mp_str(result.residual, 5),
            passed=result.passed,
            rational=result.rational,
            predicted=result.predicted,
        )
        for result in results
    ]
    passed = dsh_residual < residual_threshold(cfg.prec_bits) and all(result.passed for result in results)
    report = VerifyReport(
        schema_version=constants.SCHEMA_VERSION,
        N=cfg.N,
        k=cfg.k,
        prec_bits=cfg.prec_bits,
        max_den=cfg.max_den,
        dsh_max_residual=mp_str(dsh_residual, 5),
        relations=records,
        passed=passed,
    )
    frame = pd.DataFrame.from_records(
        [(r.source_index, r.t_residual, r.relation_residual, str(r.rational), r.residual, r.passed) for r in records],
        columns=["relation", "t_residual", "relation_residual", "rational", "residual", "passed"],
    )
    return CommandOutput(report, frame, passed)


async def cmd_dims(cfg: RunConfig) -> CommandOutput:
    N, w = cfg.N, cfg.w
    es = eichler_shimura_report(N, w)
    report = DimsReport(
        schema_version=constants.SCHEMA_VERSION,
        eichler_shimura=es,
        relaxed_equals_W=all(
            space_W(N, w, flavor, sign) == space_W_relaxed(N, w, flavor, sign) for flavor in FLAVORS for sign in ("+", "-")
        ),
        barred_sign_identity=barred_sign_identity(N, w),
        delta_star_kernel_equals_W=delta_star_kernel(N, w) == space_W(N, w, "standard", "+"),
        iota_injective=all(iota_rank(N, w, flavor) == space_W(N, w, flavor, "+").dim for flavor in FLAVORS),
    )
    frame = pd.DataFrame.from_records(
        [
            ("dim W+", es.dim_W_plus),
            ("dim W-", es.dim_W_minus),
            ("dim C+", es.dim_C_plus),
            ("dim C-", es.dim_C_minus),
            (f"dim S_{es.k}", es.cusp_dim),
            ("known", es.known_cusp_dim),
        ],
        columns=["quantity", "value"],
    )
    passed = (
        report.relaxed_equals_W
        and report.barred_sign_identity
        and report.delta_star_kernel_equals_W
        and report.iota_injective
    )
    return CommandOutput(report, frame, passed)


async def cmd_dsh_check(cfg: RunConfig) -> CommandOutput:
    check = dsh_numeric_check(cfg.r, cfg.s, cfg.a, cfg.b, cfg.N, cfg.prec_bits)
    record = DshCheckRecord(
        schema_version=constants.SCHEMA_VERSION,
        r=cfg.r,
        s=cfg.s,
        a=cfg.a % cfg.N,
        b=cfg.b % cfg.N,
        N=cfg.N,
        prec_bits=cfg.prec_bits,
        product=format_reg(check.product),
        shuffle=format_reg(check.shuffle),
        stuffle=format_reg(check.stuffle),
        shuffle_residual=mp_str(check.shuffle_residual, 5),
        stuffle_residual=mp_str(check.stuffle_residual, 5),
        passed=check.passed,
    )
    frame = pd.DataFrame.from_records(
        [
            ("product", record.product),
            ("shuffle", record.shuffle),
            ("stuffle", record.stuffle),
            ("shuffle residual", record.shuffle_residual),
            ("stuffle residual", record.stuffle_residual),
        ],
        columns=["member", "value"],
    )
    return CommandOutput(record, frame, check.passed)


async def cmd_euler_check(cfg: RunConfig) -> CommandOutput:
    residual = verify_euler(cfg.k, cfg.N, cfg.a, cfg.prec_bits)
    passed = residual < residual_threshold(cfg.prec_bits)
    record = EulerCheckRecord(
        schema_version=constants.SCHEMA_VERSION,
        k=cfg.k,
        N=cfg.N,
        a=cfg.a % cfg.N,
        prec_bits=cfg.prec_bits,
        residual=mp_str(residual, 5),
        passed=passed,
        factor=euler_factor(cfg.k, cfg.N, cfg.a),
    )
    frame = pd.DataFrame.from_records([(str(record.factor), record.residual, passed)], columns=["factor", "residual", "passed"])
    return CommandOutput(record, frame, passed)


COMMAND_HANDLERS = {
    "cosets": cmd_cosets,
    "period-basis": cmd_period_basis,
    "relations": cmd_relations,
    "verify": cmd_verify,
    "dims": cmd_dims,
    "dsh-check": cmd_dsh_check,
    "euler-check": cmd_euler_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--N", type=int, required=True)
    common.add_argument("--format", dest="output_format", choices=["json", "latex", "table"], default="json")
    common.add_argument("--out", help="write the artifact to this path instead of stdout")
    common.add_argument("--json", dest="json_out", metavar="PATH", help="shorthand for --format json --out PATH")
    common.add_argument("--workers", type=int, default=None, help=f"process pool size, default ${constants.WORKERS_VAR}")

    weight = argparse.ArgumentParser(add_help=False)
    weight.add_argument("--k", type=int)
    weight.add_argument("--w", type=int)

    numeric = argparse.ArgumentParser(add_help=False)
    numeric.add_argument("--prec-bits", type=int, default=constants.DEFAULT_PREC_BITS)

    parser = argparse.ArgumentParser(
        prog="periodzeta",
        description="Period polynomials of Γ₁(N) and relations among colored double zeta values",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("cosets", parents=[common], help="enumerate Γ₁(N)\\SL(2,Z)")

    basis = commands.add_parser("period-basis", parents=[common, weight], help="canonical basis of a period space")
    basis.add_argument("--flavor", choices=FLAVORS, default="standard")
    basis.add_argument("--which", choices=["V", "W", "W_relaxed", "C"], default="W")
    basis.add_argument("--sign", choices=["+", "-", "both"], default="both")

    relations = commands.add_parser("relations", parents=[common, weight], help="certified relations from W̄^+")
    relations.add_argument("--latex", action="store_true", help="shorthand for --format latex")
    relations.add_argument("--check-converse", action="store_true")

    verify = commands.add_parser("verify", parents=[common, weight, numeric], help="numeric verification")
    verify.add_argument("--max-den", type=int, default=constants.DEFAULT_MAX_DEN)

    commands.add_parser("dims", parents=[common, weight], help="Eichler–Shimura dimension check")

    dsh = commands.add_parser("dsh-check", parents=[common, numeric], help="numeric double shuffle identity")
    for name in ("r", "s"):
        dsh.add_argument(f"--{name}", type=int, required=True)
    for name in ("a", "b"):
        dsh.add_argument(f"--{name}", type=int, default=0)

    euler = commands.add_parser("euler-check", parents=[common, weight, numeric], help="Bernoulli identity check")
    euler.add_argument("--a", type=int, default=0)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    output_format, out = args.output_format, args.out
    if args.json_out:
        output_format, out = "json", args.json_out
    if getattr(args, "latex", False):
        output_format = "latex"
    return RunConfig(
        command=args.command,
        N=args.N,
        k=getattr(args, "k", None),
        w=getattr(args, "w", None),
        flavor=getattr(args, "flavor", "standard"),
        which=getattr(args, "which", "W"),
        sign=getattr(args, "sign", "both"),
        prec_bits=getattr(args, "prec_bits", constants.DEFAULT_PREC_BITS),
        max_den=getattr(args, "max_den", constants.DEFAULT_MAX_DEN),
        output_format=output_format,
        out=out,
        workers=constants.default_workers() if args.workers is None else args.workers,
        check_converse=getattr(args, "check_converse", False),
        r=getattr(args, "r", None),
        s=getattr(args, "s", None),
        a=getattr(args, "a", 0),
        b=getattr(args, "b", 0),
    )


def render(cfg: RunConfig, output: CommandOutput) -> str:
    if cfg.output_format == "latex":
        return output.latex
    if cfg.output_format == "table":
        return output.frame.to_string(index=False) + "\n"
    return output.record.to_json(indent=2, sort_keys=True, ensure_ascii=False) + "\n"


async def main(argv: Optional[list[str]] = None) -> int:
    load_dotenv(verbose=True)
    logging.basicConfig(level=constants.log_level(), format="%(levelname)s %(name)s: %(message)s")

    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        output = await COMMAND_HANDLERS[cfg.command](cfg)
    except (ConfigError, ExcludedWeightLevelError, InvalidSymbolError, DivergentValueError) as e:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {e}", file=sys.stderr)
        return 2

    text = render(cfg, output)
    if cfg.out:
        with open(file=cfg.out, mode="w", encoding="utf-8") as f:
            f.write(text)
        logger.info("Wrote %s", cfg.out)
    else:
        sys.stdout.write(text)
    return 0 if output.passed else 1


if __name__ == "__main__":
    sys.exit(asyncio.run(main()))

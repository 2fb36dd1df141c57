"""Interface en ligne de commande : analyse des arguments et exécution des sous-commandes.

Codes de sortie : 0 succès, 1 vérification en échec ou chaîne cassée, 2 usage,
3 erreur du domaine (diagnostic JSON sur stderr).
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence, TextIO, Union

import pandas as pd

from superloc import constants
from superloc.config import ConfigError, QuadratureError, RunConfig, SuperlocError
from superloc.exact import ExactValue, as_gaussian, parse_complex, rational
from superloc.homspace import (
    Flag,
    HomSpaceSpec,
    Isotropic,
    Periplectic,
    RootData,
    fixed_isotropic,
    fixed_isotropic_bruteforce,
    fixed_periplectic,
    gl_root_data,
    osp_root_data,
    splitting_chain_report,
    volume,
    weyl_ratio_flag,
)
from superloc.io_reports import dump_json, load_json, render_table, report_frame, save_output
from superloc.locverify import build_model, calibrate_kappa, make_equivariant_form, verify_random_suite
from superloc.qrep import CSRep
from superloc.quadrature import DEFAULT_EPS, SigmaReport, cauchy_pompeiu_check, sigma_pairing_check
from superloc.superalg import SuperFunction

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_ERROR = 3


@dataclass(kw_only=True)
class _Command:
    json: bool = False
    export: Path | None = None
    seed: int | None = None
    config: RunConfig = field(default_factory=RunConfig)


@dataclass(kw_only=True)
class VerifyLinear(_Command):
    rep: CSRep | None
    max_degree: int
    count: int
    max_blocks: int


@dataclass(kw_only=True)
class Volume(_Command):
    spec: HomSpaceSpec


@dataclass(kw_only=True)
class FixedPointsCmd(_Command):
    spec: HomSpaceSpec
    oracle: bool = False


@dataclass(kw_only=True)
class DistCheck(_Command):
    identity: str
    eps: tuple[float, ...]
    lam: Any
    profile: tuple[Any, ...]


@dataclass(kw_only=True)
class Calibrate(_Command):
    lam: Any


@dataclass(kw_only=True)
class Chain(_Command):
    family: str
    params: dict[str, Any]


Command = Union[VerifyLinear, Volume, FixedPointsCmd, DistCheck, Calibrate, Chain]


# -- types d'arguments ---------------------------------------------------------------


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"entier attendu: {text!r}") from e
    if value < 1:
        raise argparse.ArgumentTypeError(f"entier >= 1 attendu: {text!r}")
    return value


def _non_negative(text: str) -> int:
    try:
        value = int(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"entier attendu: {text!r}") from e
    if value < 0:
        raise argparse.ArgumentTypeError(f"entier >= 0 attendu: {text!r}")
    return value


def _complex_list(text: str) -> list[Any]:
    try:
        return [parse_complex(part) for part in text.split(",") if part.strip()]
    except ConfigError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def _complex(text: str) -> Any:
    try:
        return parse_complex(text)
    except ConfigError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"liste de réels invalide: {text!r}") from e


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"liste d'entiers invalide: {text!r}") from e


def _rational_list(text: str) -> tuple[Any, ...]:
    try:
        return tuple(rational(part) for part in text.split(",") if part.strip())
    except ConfigError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


# -- analyse -------------------------------------------------------------------------


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", action="store_true", help="rapport JSON sur stdout")
    p.add_argument("--export", type=Path, help="export tableur (.csv, .xlsx, .ods)")


def _add_family_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("family", choices=["isotropic", "periplectic", "flag"])
    p.add_argument("--n", type=_positive, help="Isotropic(n)")
    p.add_argument("--r", type=_positive, help="Periplectic(r, s)")
    p.add_argument("--s", type=_positive, help="Periplectic(r, s)")
    p.add_argument("--root-file", type=Path, help="données de racines JSON (flag)")
    p.add_argument("--gl", type=_positive, nargs=2, metavar=("M", "N"), help="racines de gl(M|N) (flag)")
    p.add_argument("--osp", type=_positive, nargs=2, metavar=("M", "N"), help="racines de osp(2M|2N) (flag)")
    p.add_argument("--d", type=_non_negative, help="nombre de racines isotropes α_i (flag)")
    p.add_argument("--workers", type=_positive, default=1, help="processus d'énumération")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="superloc",
        description="Localisation CS sur modèles linéaires et volumes d'espaces homogènes.",
    )
    parser.add_argument("--version", action="version", version=f"superloc {constants.TOOL_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-linear", help="formes équivariantes aléatoires : ∫ω contre Loc_W")
    p.add_argument("--lambdas", type=_complex_list, help="λ_1,…,λ_m (ex. 3i,1+2i)")
    p.add_argument("--rep-file", type=Path, help="représentation CS au format JSON")
    p.add_argument("--profiles", type=_non_negative, default=4, help="degré maximal des profils P_i")
    p.add_argument("--count", type=_positive, default=20)
    p.add_argument("--max-blocks", type=_positive, default=3)
    p.add_argument("--seed", type=int, default=0)
    _add_output(p)

    for name, help_text in (
        ("volume", "volume CS de G/K et verdict de scindage"),
        ("fixed-points", "points fixes de Q par classes de Weyl"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_family_params(p)
        if name == "fixed-points":
            p.add_argument("--oracle", action="store_true", help="compare à l'énumération exhaustive")
        _add_output(p)

    p = sub.add_parser("dist-check", help="identités distributionnelles régularisées")
    p.add_argument("identity", choices=["polediff", "sigma"])
    p.add_argument("--eps", type=_float_list, default=DEFAULT_EPS, help="ε décroissants (ex. 0.2,0.1,0.05,0.025)")
    p.add_argument("--lambda", dest="lam", type=_complex, default=parse_complex("3i"))
    p.add_argument("--profile", type=_rational_list, default=(rational(1),), help="coefficients de P")
    _add_output(p)

    p = sub.add_parser("calibrate", help="recalcule κ sur le témoin e^{-u}")
    p.add_argument("--lambda", dest="lam", type=_complex, default=parse_complex("1"))
    _add_output(p)

    p = sub.add_parser("chain", help="chaîne de sous-groupes scindés")
    p.add_argument("family", choices=["periplectic", "flag"])
    p.add_argument("--n", type=_positive)
    p.add_argument("--parts", type=_int_list)
    p.add_argument("--root-file", type=Path)
    p.add_argument("--gl", type=_positive, nargs=2, metavar=("M", "N"))
    p.add_argument("--osp", type=_positive, nargs=2, metavar=("M", "N"))
    p.add_argument("--d", type=_non_negative)
    p.add_argument("--workers", type=_positive, default=1)
    _add_output(p)
    return parser


def _root_data(parser: argparse.ArgumentParser, args: argparse.Namespace) -> RootData:
    sources = [x for x in (args.root_file, args.gl, args.osp) if x is not None]
    if len(sources) != 1:
        parser.error("flag : exactement une source parmi --root-file, --gl, --osp")
    if args.root_file is not None:
        return RootData.from_dict(load_json(args.root_file))
    if args.gl is not None:
        return gl_root_data(args.gl[0], args.gl[1], args.d)
    return osp_root_data(args.osp[0], args.osp[1], args.d)


def _family_spec(parser: argparse.ArgumentParser, args: argparse.Namespace) -> HomSpaceSpec:
    if args.family == "isotropic":
        if args.n is None:
            parser.error("isotropic : --n requis")
        return Isotropic(args.n)
    if args.family == "periplectic":
        if args.r is None or args.s is None:
            parser.error("periplectic : --r et --s requis")
        return Periplectic(args.r, args.s)
    return Flag(_root_data(parser, args))


def parse(argv: Sequence[str] | None = None, config: RunConfig | None = None) -> Command:
    """Analyse déterministe ; une erreur d'usage lève SystemExit(2) après le texte d'usage."""
    parser = build_parser()
    args = parser.parse_args(argv)
    config = config or RunConfig.from_env()
    common: dict[str, Any] = {"json": args.json, "export": args.export}
    if getattr(args, "workers", None):
        config = RunConfig(config.max_enum, config.max_group_order, args.workers, config.log_path)
    common["config"] = config
    if args.export is not None and args.export.suffix.lower() not in (".csv", ".xlsx", ".ods"):
        parser.error(f"--export : extension {args.export.suffix!r} non supportée")

    if args.command == "verify-linear":
        if args.lambdas is not None and args.rep_file is not None:
            parser.error("verify-linear : --lambdas et --rep-file sont exclusifs")
        rep = None
        if args.lambdas is not None:
            if not args.lambdas:
                parser.error("verify-linear : --lambdas vide")
            rep = CSRep.from_lambdas(args.lambdas)
        elif args.rep_file is not None:
            rep = CSRep.from_dict(load_json(args.rep_file))
        return VerifyLinear(
            rep=rep, max_degree=args.profiles, count=args.count, max_blocks=args.max_blocks,
            seed=args.seed, **common,
        )
    if args.command == "volume":
        return Volume(spec=_family_spec(parser, args), **common)
    if args.command == "fixed-points":
        if args.family == "flag" and args.oracle:
            parser.error("--oracle n'est défini que pour isotropic")
        return FixedPointsCmd(spec=_family_spec(parser, args), oracle=args.oracle, **common)
    if args.command == "dist-check":
        return DistCheck(identity=args.identity, eps=tuple(args.eps), lam=args.lam, profile=tuple(args.profile), **common)
    if args.command == "calibrate":
        return Calibrate(lam=args.lam, **common)
    if args.family == "periplectic":
        if args.n is None:
            parser.error("chain periplectic : --n requis")
        return Chain(family="periplectic", params={"n": args.n, "parts": args.parts}, **common)
    return Chain(family="flag", params={"root_data": _root_data(parser, args)}, **common)


# -- exécution -----------------------------------------------------------------------


@dataclass
class Outcome:
    exit_code: int
    result: dict[str, Any]
    rows: list[dict[str, Any]]


def _run_verify_linear(cmd: VerifyLinear) -> Outcome:
    suite = verify_random_suite(cmd.seed or 0, cmd.count, cmd.max_blocks, cmd.max_degree, rep=cmd.rep)
    result = {"count": suite.count, "failures": suite.failures, "forms": suite.rows}
    return Outcome(EXIT_OK if suite.ok else EXIT_FAILED, result, suite.rows)


def _run_volume(cmd: Volume) -> Outcome:
    v = volume(cmd.spec, cmd.config)
    d = v.to_dict()
    return Outcome(EXIT_OK, d, [{k: x for k, x in d.items() if k != "exact"}])


def _run_fixed_points(cmd: FixedPointsCmd) -> Outcome:
    spec = cmd.spec
    if isinstance(spec, Isotropic):
        fp = fixed_isotropic(spec.n)
        rows = [{"index": k, "signs": str(list(w.signs))} for k, w in enumerate(fp.representatives)]
        result: dict[str, Any] = {"family": spec.label, "count": fp.count}
        if cmd.oracle:
            brute = fixed_isotropic_bruteforce(spec.n)
            result["oracle_count"] = brute
            result["oracle_agrees"] = brute == fp.count
            if brute != fp.count:
                return Outcome(EXIT_FAILED, result, rows)
        return Outcome(EXIT_OK, result, rows)
    if isinstance(spec, Periplectic):
        fp = fixed_periplectic(spec.r, spec.s, cmd.config)
        rows = [{"index": k, "w({1..r})": str(list(a))} for k, a in enumerate(fp.representatives)]
        return Outcome(EXIT_OK, {"family": spec.label, "count": fp.count}, rows)
    ratio = weyl_ratio_flag(spec.root_data, cmd.config)
    result = {
        "family": spec.label,
        "order_w": ratio.order_w,
        "order_wd": ratio.order_wd,
        "order_wc": ratio.order_wc,
        "count": ratio.ratio,
    }
    return Outcome(EXIT_OK, result, [result])


def _profile_function(profile: Sequence[Any]) -> SuperFunction:
    """g = P(z z̄) e^{-z z̄}."""
    total = SuperFunction.zero(1, [1])
    for k, c in enumerate(profile):
        total = total + SuperFunction(1, [(as_gaussian(c), [k, k], 0)], [1])
    return total


def _run_dist_check(cmd: DistCheck) -> Outcome:
    if cmd.identity == "polediff":
        report = cauchy_pompeiu_check(_profile_function(cmd.profile), cmd.eps)
    else:
        model = build_model(CSRep.from_lambdas([cmd.lam]))
        f = make_equivariant_form(model, [list(cmd.profile)], [1])
        report = sigma_pairing_check(model, f, cmd.eps)
    parts = report.parts() if isinstance(report, SigmaReport) else [(cmd.identity, report)]
    rows = [
        {"part": name, "eps": t["eps"], "re": t["value"][0], "im": t["value"][1], "abserr": t["abserr"]}
        for name, part in parts
        for t in part.eps_trace
    ]
    return Outcome(EXIT_OK if report.ok else EXIT_FAILED, report.to_dict(), rows)


def _run_calibrate(cmd: Calibrate) -> Outcome:
    kappa = calibrate_kappa(cmd.lam)
    frozen = ExactValue(constants.KAPPA)
    ok = kappa == frozen
    if not ok:
        logger.error("κ recalculé %s différent de la constante figée %s", kappa, frozen)
    result = {"kappa": kappa.to_dict(), "frozen": frozen.to_dict(), "matches": ok}
    return Outcome(EXIT_OK if ok else EXIT_FAILED, result, [{"kappa": str(kappa), "frozen": str(frozen), "matches": ok}])


def _run_chain(cmd: Chain) -> Outcome:
    report = splitting_chain_report(cmd.family, cmd.params, cmd.config)
    rows = [
        {"subgroup": s.subgroup, "group": s.group, "holds": s.holds,
         "evidence": s.evidence.get("value", "defect-zero centralizer" if s.holds else "defect > 0")}
        for s in report.steps
    ]
    return Outcome(EXIT_FAILED if report.broken else EXIT_OK, report.to_dict(), rows)


_RUNNERS = {
    VerifyLinear: _run_verify_linear,
    Volume: _run_volume,
    FixedPointsCmd: _run_fixed_points,
    DistCheck: _run_dist_check,
    Calibrate: _run_calibrate,
    Chain: _run_chain,
}


def _command_name(cmd: Command) -> str:
    return {
        VerifyLinear: "verify-linear",
        Volume: "volume",
        FixedPointsCmd: "fixed-points",
        DistCheck: "dist-check",
        Calibrate: "calibrate",
        Chain: "chain",
    }[type(cmd)]


def execute(cmd: Command, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        outcome = _RUNNERS[type(cmd)](cmd)
        if cmd.export is not None:
            save_output(cmd.export, {_command_name(cmd): report_frame(outcome.rows)})
    except SuperlocError as e:
        logger.error("%s: %s", type(e).__name__, e)
        diagnostic: dict[str, Any] = {"error": type(e).__name__, "message": str(e)}
        if isinstance(e, QuadratureError):
            diagnostic["diagnostics"] = e.diagnostics
        stderr.write(dump_json(diagnostic) + "\n")
        return EXIT_ERROR
    payload = {
        "tool_version": constants.TOOL_VERSION,
        "seed": cmd.seed,
        "convention": constants.convention(),
        "command": _command_name(cmd),
        "result": outcome.result,
    }
    if cmd.json:
        stdout.write(dump_json(payload) + "\n")
    else:
        stdout.write(_render_text(cmd, outcome) + "\n")
    return outcome.exit_code


def _render_text(cmd: Command, outcome: Outcome) -> str:
    header = f"superloc {constants.TOOL_VERSION} : {_command_name(cmd)}"
    if cmd.seed is not None:
        header += f" (seed={cmd.seed})"
    lines = [header, render_table(outcome.rows)]
    summary = {k: v for k, v in outcome.result.items() if not isinstance(v, (list, dict))}
    if summary:
        lines.append(pd.Series(summary, dtype=object).to_string())
    return "\n".join(lines)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cmd = parse(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    except SuperlocError as e:
        sys.stderr.write(dump_json({"error": type(e).__name__, "message": str(e)}) + "\n")
        return EXIT_ERROR
    return execute(cmd)

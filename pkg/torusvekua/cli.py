# -*- coding: utf-8 -*-
"""
Command line front end.

    torusvekua analyze --spec op.json --weights gevrey:2
    torusvekua solve --spec op.json [--data f.json|f.csv] --seed 7
    torusvekua lemma-check --weights gevrey:1.5
    torusvekua classify --spec wave.json
    torusvekua dc-equiv --spec dc.json

Exit codes: 0 pass, 2 fail-witness / degenerate / incompatible data /
small divisor / residual over tolerance, 1 input error.
"""
import argparse
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from . import constcoef, varcoef
from .margincurves import MarginCurves, PASS
from .spectral import (
    analyze,
    classify_decay,
    GridFunction,
    random_spectrum,
    Spectrum,
    synthesize,
)
from .util import (
    ConditionError,
    DomainError,
    dump_json,
    IncompatibleDataError,
    load_config,
    LOG_DATE_FORMAT,
    LOG_FORMAT,
    parse_complex,
    reset_timings,
    ScanLimitError,
    SmallDivisorError,
    SpecFormatError,
    timings_summary,
)
from .weightseq import lemma_suite, parse_weights

EXIT_PASS = 0
EXIT_INPUT = 1
EXIT_FAIL = 2

REPORT_FILE = "report.json"
MARGINS_FILE = "margins.csv"
U_JSON_FILE = "u.json"
U_CSV_FILE = "u.csv"
RESIDUAL_FILE = "residual.json"
LEMMA_FILE = "lemma_check.json"
TIMINGS_FILE = "timings.json"

INPUT_ERRORS = (
    SpecFormatError,
    DomainError,
    ScanLimitError,
    FileNotFoundError,
    json.JSONDecodeError,
)


@dataclass
class RunConfig:
    """Merged run parameters: config file, then command line flags."""

    command: str
    spec: Optional[str] = None
    data: Optional[str] = None
    weights: str = "gevrey:2"
    xi_max: float = 50.0
    eps_list: List[float] = field(default_factory=lambda: [0.1, 1.0, 10.0])
    gamma_floor: float = 1.0
    tau_max: int = 20
    drop_tol: float = 6.9
    slope_tol: float = 0.0
    N: int = 64
    Nt: int = 256
    quadrature: str = "gauss"
    primitive: str = "spectral"
    K: int = 8
    seed: int = 7
    tolerances: Dict[str, float] = field(default_factory=dict)
    out: str = "torusvekua_out"

    def __post_init__(self):
        if self.xi_max < 1:
            raise DomainError(f"--xi-max must be >= 1, got {self.xi_max}")
        if not self.eps_list:
            raise DomainError("--eps needs at least one value")
        if any(eps <= 0 for eps in self.eps_list):
            raise DomainError(f"eps values must be > 0: {self.eps_list}")
        bad = {k: v for k, v in self.tolerances.items() if not v > 0}
        if bad:
            raise DomainError(f"tolerances must be > 0: {bad}")

    def tol(self, name: str) -> float:
        return float(self.tolerances[name])

    @property
    def out_dir(self) -> Path:
        path = Path(self.out)
        path.mkdir(parents=True, exist_ok=True)
        return path

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        """Run config named by --config, overridden by explicit flags."""
        conf = load_config(args.config)
        scan, grid, data = conf["scan"], conf["grid"], conf["data"]
        tolerances = dict(conf["tolerances"])
        if args.tol is not None:
            tolerances["residual"] = args.tol
            tolerances["residual_varcoef"] = args.tol

        def _pick(value, default):
            return default if value is None else value

        return cls(
            command=args.command,
            spec=args.spec,
            data=args.data,
            weights=_pick(args.weights, conf["weights"]),
            xi_max=float(_pick(args.xi_max, scan["xi_max"])),
            eps_list=[float(e) for e in _pick(args.eps, scan["eps_list"])],
            gamma_floor=float(scan["gamma_floor"]),
            tau_max=int(scan["tau_max"]),
            drop_tol=float(scan["drop_tol"]),
            slope_tol=float(scan["slope_tol"]),
            N=int(_pick(args.grid, grid["N"])),
            Nt=int(_pick(args.tgrid, grid["Nt"])),
            quadrature=grid["quadrature"],
            primitive=grid["primitive"],
            K=int(data["K"]),
            seed=int(_pick(args.seed, data["seed"])),
            tolerances=tolerances,
            out=_pick(args.out, conf["output"]["dir"]),
        )


def _eps_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad eps list {text!r}")


def _read_json(path: Optional[str], what: str = "spec") -> Dict:
    if path is None:
        raise SpecFormatError(what, f"--{what} PATH is required")
    with open(path, encoding="utf-8") as f:
        data = json.load(f)
    if not isinstance(data, dict):
        raise SpecFormatError(what, f"{path} must hold a JSON object")
    return data


def _is_varcoef(data: Dict) -> bool:
    return "q" in data


def _write_margins(curves: MarginCurves, out_dir: Path) -> None:
    with open(out_dir / MARGINS_FILE, "w", encoding="utf-8") as f:
        f.write(curves.to_csv())


def _exit_code(verdict: str) -> int:
    return EXIT_PASS if verdict == PASS else EXIT_FAIL


def _load_spectrum_data(cfg: RunConfig, n: int) -> Spectrum:
    """f from --data (spectrum JSON or grid CSV) or seeded random data."""
    if cfg.data is None:
        return random_spectrum(n, cfg.K, cfg.seed)
    if cfg.data.endswith(".csv"):
        return analyze(GridFunction.from_csv(cfg.data))
    return Spectrum.from_dict(_read_json(cfg.data, "data"))


def _load_grid_data(cfg: RunConfig, n: int, Nt: int) -> GridFunction:
    """f on the (Nt, N, ..., N) grid of a variable-coefficient problem."""
    shape = (Nt,) + (cfg.N,) * n
    if cfg.data is None:
        return synthesize(random_spectrum(n + 1, cfg.K, cfg.seed), shape)
    if cfg.data.endswith(".csv"):
        f = GridFunction.from_csv(cfg.data)
    else:
        f = synthesize(Spectrum.from_dict(_read_json(cfg.data, "data")), shape)
    if f.shape[0] != Nt:
        raise DomainError(f"Data t axis has {f.shape[0]} points, spec {Nt}")
    return f


def _var_spec(data: Dict, cfg: RunConfig) -> varcoef.VarOperatorSpec:
    if "Nt" not in data and not any(
        isinstance(data.get(k), list) for k in ("q", "s")
    ):
        data = dict(data, Nt=cfg.Nt)
    return varcoef.VarOperatorSpec.from_dict(data)


def cmd_analyze(cfg: RunConfig) -> int:
    """Condition scans for a constant or variable coefficient operator."""
    data = _read_json(cfg.spec)
    ws = parse_weights(cfg.weights)
    if _is_varcoef(data):
        spec = _var_spec(data, cfg)
        args = (ws, cfg.eps_list, cfg.xi_max, cfg.tau_max, cfg.gamma_floor)
        kwargs = dict(drop_tol=cfg.drop_tol, tol_lattice=cfg.tol("lattice"))
        if not spec.lam.any():
            report = varcoef.check_thm2(spec, *args, **kwargs)
            verdict = PASS if report.case is not None else report.verdict
        else:
            report = varcoef.check_conditions(spec, *args, **kwargs)
            verdict = report.verdict
        result = report.to_dict()
    else:
        spec = constcoef.ConstOperatorSpec.from_dict(data)
        report = constcoef.check_dc_m(
            spec,
            ws,
            cfg.eps_list,
            cfg.xi_max,
            cfg.gamma_floor,
            tol_zero=cfg.tol("tol_zero"),
            drop_tol=cfg.drop_tol,
        )
        verdict = report.verdict
        result = report.to_dict()
        result["elliptic"] = constcoef.is_elliptic(spec)
        if cfg.data is not None:
            decay = classify_decay(
                _load_spectrum_data(cfg, spec.n),
                ws,
                cfg.eps_list,
                cfg.slope_tol,
            )
            result["data_decay"] = decay.to_dict()

    out_dir = cfg.out_dir
    result["verdict"] = verdict
    result["weights"] = ws.to_dict()
    dump_json(result, out_dir / REPORT_FILE)
    _write_margins(report.curves, out_dir)
    logging.info(f"analyze: {verdict}, report in {out_dir}")
    return _exit_code(verdict)


def _solve_const(cfg: RunConfig, data: Dict) -> Tuple[int, Dict]:
    spec = constcoef.ConstOperatorSpec.from_dict(data)
    F = _load_spectrum_data(cfg, spec.n)
    out_dir = cfg.out_dir
    try:
        U, diagnostics = constcoef.solve(
            spec,
            F,
            tol_zero=cfg.tol("tol_zero"),
            tol_residual=cfg.tol("residual"),
        )
    except IncompatibleDataError as exc:
        dump_json(
            {"status": "incompatible", "certificates": exc.certificates},
            out_dir / REPORT_FILE,
        )
        return EXIT_FAIL, {}
    dump_json(U, out_dir / U_JSON_FILE)
    N = max(cfg.N, 2 * U.max_radius() + 2)
    synthesize(U, N).to_csv(out_dir / U_CSV_FILE)
    return EXIT_PASS, dict(diagnostics, tolerance=cfg.tol("residual"))


def _solve_var(cfg: RunConfig, data: Dict) -> Tuple[int, Dict]:
    spec = _var_spec(data, cfg)
    f = _load_grid_data(cfg, spec.n, spec.Nt)
    out_dir = cfg.out_dir
    tolerance = cfg.tol("residual_varcoef")
    try:
        u, diagnostics = varcoef.solve(
            spec,
            f,
            ws=parse_weights(cfg.weights),
            eps_list=cfg.eps_list,
            xi_max=cfg.xi_max,
            tau_max=cfg.tau_max,
            quadrature=cfg.quadrature,
            primitive=cfg.primitive,
            tol_small=cfg.tol("small_divisor"),
            tol_residual=tolerance,
        )
    except ConditionError as exc:
        dump_json(
            {"status": "conditions", "message": str(exc), **exc.report},
            out_dir / REPORT_FILE,
        )
        return EXIT_FAIL, {}
    except SmallDivisorError as exc:
        dump_json(
            {
                "status": "small-divisor",
                "xi": list(exc.xi),
                "divisor": exc.divisor,
            },
            out_dir / REPORT_FILE,
        )
        return EXIT_FAIL, {}
    dump_json(analyze(u).prune(cfg.tol("tol_zero")), out_dir / U_JSON_FILE)
    u.to_csv(out_dir / U_CSV_FILE)
    return EXIT_PASS, dict(diagnostics, tolerance=tolerance)


def cmd_solve(cfg: RunConfig) -> int:
    """Solve Pu = f and write u with its relative residual."""
    data = _read_json(cfg.spec)
    solver = _solve_var if _is_varcoef(data) else _solve_const
    code, diagnostics = solver(cfg, data)
    if code != EXIT_PASS:
        return code
    residual = diagnostics["rel_residual"]
    dump_json({"rel_residual": residual}, cfg.out_dir / RESIDUAL_FILE)
    dump_json(diagnostics, cfg.out_dir / REPORT_FILE)
    if residual > diagnostics["tolerance"]:
        logging.warning(
            f"solve: residual {residual:.3e} over {diagnostics['tolerance']}"
        )
        return EXIT_FAIL
    return EXIT_PASS


def cmd_lemma_check(cfg: RunConfig) -> int:
    """Weight-sequence identities and inequalities."""
    report = lemma_suite(parse_weights(cfg.weights))
    dump_json(report, cfg.out_dir / LEMMA_FILE)
    return EXIT_PASS if report["passed"] else EXIT_FAIL


def cmd_classify(cfg: RunConfig) -> int:
    """Wave or vector-field family: which sufficient condition applies."""
    data = _read_json(cfg.spec)
    family = data.get("family")
    ws = parse_weights(cfg.weights)
    A = parse_complex(data.get("A", 0.0), "A")
    B = parse_complex(data.get("B", 0.0), "B")
    common = dict(
        ws=ws,
        xi_max=cfg.xi_max,
        eps_list=cfg.eps_list,
        gamma_floor=cfg.gamma_floor,
        tol_zero=cfg.tol("tol_zero_classify"),
        drop_tol=cfg.drop_tol,
    )
    if family == "wave":
        if "eta" not in data:
            raise SpecFormatError("eta")
        report = constcoef.classify_wave(A, B, data["eta"], **common)
    elif family == "vector_field":
        if "C" not in data:
            raise SpecFormatError("C")
        C = [parse_complex(c, "C") for c in data["C"]]
        report = constcoef.classify_vector_field(C, A, B, **common)
    else:
        raise SpecFormatError("family", "family must be wave|vector_field")
    out_dir = cfg.out_dir
    dump_json(report, out_dir / REPORT_FILE)
    if report.scan is not None:
        _write_margins(report.scan.curves, out_dir)
    return EXIT_PASS if report.matched is not None else EXIT_FAIL


def cmd_dc_equiv(cfg: RunConfig) -> int:
    """Compare the distance and exponential forms of the small divisor."""
    data = _read_json(cfg.spec)
    for key in ("p0", "q0", "delta", "alpha"):
        if key not in data:
            raise SpecFormatError(key)
    report = varcoef.dc_equivalence_check(
        data["p0"],
        float(data["q0"]),
        float(data["delta"]),
        parse_complex(data["alpha"], "alpha"),
        parse_weights(cfg.weights),
        cfg.eps_list,
        cfg.xi_max,
        cfg.gamma_floor,
        cfg.drop_tol,
    )
    out_dir = cfg.out_dir
    dump_json(report, out_dir / REPORT_FILE)
    _write_margins(report.curves, out_dir)
    return EXIT_PASS if report.agree else EXIT_FAIL


COMMANDS = {
    "analyze": cmd_analyze,
    "solve": cmd_solve,
    "lemma-check": cmd_lemma_check,
    "classify": cmd_classify,
    "dc-equiv": cmd_dc_equiv,
}


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", help="Operator spec JSON.")
    common.add_argument("--data", help="f as spectrum JSON or grid CSV.")
    common.add_argument("--weights", help="gevrey:S or a JSON file.")
    common.add_argument("--xi-max", type=float, help="Scan radius.")
    common.add_argument("--eps", type=_eps_list, help="eps list, 0.1,1,10")
    common.add_argument("--grid", type=int, help="Points per x axis.")
    common.add_argument("--tgrid", type=int, help="Points on the t axis.")
    common.add_argument("--tol", type=float, help="Residual tolerance.")
    common.add_argument("--out", help="Output directory.")
    common.add_argument("--seed", type=int, help="Seed for random data.")
    common.add_argument(
        "--config", help="Run config name (default|quick|thorough) or JSON."
    )
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="torusvekua", description=__doc__.splitlines()[1]
    )
    commands = parser.add_subparsers(dest="command", required=True)
    for name, func in COMMANDS.items():
        commands.add_parser(name, parents=[common], help=func.__doc__)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format=LOG_FORMAT,
        datefmt=LOG_DATE_FORMAT,
    )
    try:
        cfg = RunConfig.from_args(args)
        reset_timings()
        code = COMMANDS[cfg.command](cfg)
        dump_json(timings_summary(), cfg.out_dir / TIMINGS_FILE)
        return code
    except ConditionError as exc:
        logging.error(f"{args.command}: {exc}")
        return EXIT_FAIL
    except INPUT_ERRORS as exc:
        field_name = getattr(exc, "field", None)
        prefix = f"[{field_name}] " if field_name else ""
        logging.error(f"{args.command}: {prefix}{exc}")
        return EXIT_INPUT


def run() -> None:
    """Console script entry point."""
    raise SystemExit(main())


if __name__ == "__main__":  # pragma: no cover
    run()

"""Command-line front end.

Subcommands: code-info, check, simulate, estimate, verify.  Experiments are
described by a JSON config (validated strictly); flags override fields.
Reports are canonical JSON carrying the library version, a config hash and
the seed.  Exit codes: 0 ok / identifiable, 1 not identifiable, 2 estimation
infeasible, 3 input error.
"""

from __future__ import annotations

import argparse
import copy
import hashlib
import json
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__, codes, estimate, identify, noise, verify
from .codes import Code, CodeError, SearchCapError
from .gf2 import SpanTooLargeError, indices_from_mask
from .pauli import PhaseSpaceVector

EXIT_OK = 0
EXIT_NOT_IDENTIFIABLE = 1
EXIT_INFEASIBLE = 2
EXIT_INPUT = 3

CERTIFICATE_MAX_COLUMNS = 400

_SUBSETS = {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 0}}}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["code"],
    "properties": {
        "code": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "name": {"type": "string"},
                "params": {"type": "object", "additionalProperties": {"type": "integer"}},
                "file": {"type": "string"},
                "data_syndrome": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["A"],
                    "properties": {"A": _SUBSETS},
                },
            },
            "oneOf": [{"required": ["name"]}, {"required": ["file"]}],
        },
        "noise": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "uniform_pauli": {"type": "array", "items": {"type": "number"}, "minItems": 4, "maxItems": 4},
                "uniform_flip": {"type": "number", "minimum": 0, "maximum": 1},
                "channels": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "additionalProperties": False,
                        "properties": {
                            "support": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                            "dist": {"type": "array", "items": {"type": "number"}},
                            "qubit": {"type": "integer", "minimum": 0},
                            "pauli": {"type": "array", "items": {"type": "number"}, "minItems": 4, "maxItems": 4},
                            "bit": {"type": "integer", "minimum": 0},
                            "flip": {"type": "number", "minimum": 0, "maximum": 1},
                        },
                        "oneOf": [
                            {"required": ["support", "dist"]},
                            {"required": ["qubit", "pauli"]},
                            {"required": ["bit", "flip"]},
                        ],
                    },
                },
            },
        },
        "supports": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "t": {"type": "integer", "minimum": 1},
                "metric": {"enum": ["pauli", "hamming"]},
                "sets": _SUBSETS,
                "from_noise": {"type": "boolean"},
            },
        },
        "mode": {"enum": ["exact", "sample"]},
        "shots": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "threads": {"type": "integer", "minimum": 1},
        "estimation": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "clamp": {"type": "boolean"},
                "weighting": {"enum": ["none", "variance"]},
                "override": {"type": "boolean"},
                "row_seed": {"type": "integer", "minimum": 0},
            },
        },
        "outputs": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"report": {"type": "string"}, "csv": {"type": "string"}},
        },
    },
}


class InputError(ValueError):
    pass


# --- config handling ------------------------------------------------------


def validate_config(config: dict) -> None:
    try:
        jsonschema.validate(config, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InputError(f"config error at {where}: {exc.message}") from None


def _set_path(config: dict, dotted: str, value) -> None:
    keys = dotted.split(".")
    node = config
    for k in keys[:-1]:
        node = node.setdefault(k, {})
        if not isinstance(node, dict):
            raise InputError(f"cannot set {dotted}: {k} is not an object")
    node[keys[-1]] = value


def apply_overrides(config: dict, args: argparse.Namespace) -> dict:
    cfg = copy.deepcopy(config)
    if getattr(args, "code", None):
        cfg["code"] = {"name": args.code}
    if getattr(args, "code_file", None):
        cfg["code"] = {"file": args.code_file}
    params = {k: getattr(args, k) for k in ("L", "n") if getattr(args, k, None) is not None}
    if params:
        cfg.setdefault("code", {}).setdefault("params", {}).update(params)
    if getattr(args, "t", None) is not None:
        cfg["supports"] = {"t": args.t}
    for field in ("mode", "shots", "seed", "threads"):
        v = getattr(args, field, None)
        if v is not None:
            cfg[field] = v
    for field in ("clamp", "override"):
        if getattr(args, field, False):
            cfg.setdefault("estimation", {})[field] = True
    if getattr(args, "weighting", None):
        cfg.setdefault("estimation", {})["weighting"] = args.weighting
    if getattr(args, "out", None):
        cfg.setdefault("outputs", {})["report"] = args.out
    if getattr(args, "csv", None):
        cfg.setdefault("outputs", {})["csv"] = args.csv
    for item in getattr(args, "set", None) or []:
        key, sep, raw = item.partition("=")
        if not sep:
            raise InputError(f"--set expects key=value, got {item!r}")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        _set_path(cfg, key, value)
    return cfg


def load_config(args: argparse.Namespace) -> dict:
    base: dict = {}
    if getattr(args, "config", None):
        try:
            base = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise InputError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise InputError(f"config is not valid JSON: {exc}") from None
    cfg = apply_overrides(base, args)
    validate_config(cfg)
    return cfg


# fields that do not change results are left out of the provenance hash
_HASH_EXCLUDED = ("threads", "outputs")


def config_hash(config: dict) -> str:
    relevant = {k: v for k, v in config.items() if k not in _HASH_EXCLUDED}
    return hashlib.sha256(canonical_json(relevant).encode()).hexdigest()


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


# --- building objects from config -----------------------------------------


def build_code(entry: dict) -> Code:
    if "file" in entry:
        path = Path(entry["file"])
        try:
            code = codes.parse_code_text(path.read_text(), name=path.stem)
        except OSError as exc:
            raise InputError(f"cannot read code file: {exc}") from None
    else:
        code = codes.catalog(entry["name"], **entry.get("params", {}))
    if "data_syndrome" in entry:
        code = codes.build_data_syndrome(code, entry["data_syndrome"]["A"])
    return code


def build_model(cfg: dict, code: Code) -> noise.SupportModel | None:
    if "noise" not in cfg:
        return None
    return noise.model_from_config(cfg["noise"], code)


def build_supports(cfg: dict, code: Code, model: noise.SupportModel | None) -> list[int]:
    entry = cfg.get("supports")
    if entry is None:
        entry = {"from_noise": True} if model is not None else {"t": 1}
    if "sets" in entry:
        out = [sum(1 << i for i in s) for s in entry["sets"]]
        if any(not 0 < g < 1 << code.N for g in out):
            raise InputError(f"support sets must be nonempty subsets of [0, {code.N})")
        return out
    if entry.get("from_noise"):
        if model is None:
            raise InputError("supports.from_noise needs a noise section")
        return model.supports
    t = entry.get("t", 1)
    metric = entry.get("metric", "hamming" if code.kind == "classical" else "pauli")
    if metric == "hamming":
        return noise.make_weight_t_supports(code.N, t, "hamming")
    return noise.make_weight_t_supports(code.N, t, "pauli", code.n, code.m)


def format_error(code: Code, e: int) -> str:
    if code.kind == "classical":
        return "".join(str(e >> j & 1) for j in range(code.n))
    return str(PhaseSpaceVector(e, code.n, code.m))


# --- reports --------------------------------------------------------------


def provenance(cfg: dict | None, seed: int | None) -> dict:
    return {
        "version": __version__,
        "config_hash": config_hash(cfg) if cfg is not None else None,
        "seed": seed,
    }


def _to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def emit(report: dict, path: str | None) -> None:
    text = json.dumps(_to_jsonable(report), sort_keys=True, indent=2) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _write_csv(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text)


# --- commands -------------------------------------------------------------


def cmd_code_info(args: argparse.Namespace) -> int:
    if args.file:
        entry = {"file": args.file}
    else:
        params = {k: getattr(args, k) for k in ("L", "n") if getattr(args, k) is not None}
        entry = {"name": args.name, "params": params}
    code = build_code(entry)
    report = {
        "code": code.describe(),
        "kind": code.kind,
        "n": code.n,
        "m": code.m,
        "N": code.N,
        "checks": code.num_checks,
        "generators": code.num_generators,
        "group_size": code.group_size,
        "search_max_weight": args.max_weight,
    }
    for key, fn in (("distance", codes.distance), ("pure_distance", codes.pure_distance)):
        try:
            report[key] = fn(code, max_weight=args.max_weight)
        except SearchCapError as exc:
            report[key] = None
            report.setdefault("notes", []).append(f"{key}: {exc}")
    report.update(provenance(entry, None))
    emit(report, args.out)
    return EXIT_OK


def _certificate(code: Code, supports: list[int]) -> dict:
    cols = identify.barred_closure(code, supports)
    if len(cols) > CERTIFICATE_MAX_COLUMNS:
        return {"skipped": f"{len(cols)} columns exceed the certificate cap {CERTIFICATE_MAX_COLUMNS}"}
    try:
        ms = identify.build_coefficient_matrix(code, cols)
    except SpanTooLargeError:
        try:
            rows = estimate.select_rows(code, cols)
        except identify.IdentifiabilityError as exc:
            return {"skipped": str(exc)}
        ms = identify.build_coefficient_matrix(code, cols, rows)
    cert = identify.certify_full_rank(ms)
    return {
        "full_rank": cert.full_rank,
        "rank": cert.rank,
        "columns": cert.ncols,
        "rows": ms.D.shape[0],
        "partial": cert.partial,
        "positive_definite_certificate": cert.positive_definite_certificate,
        "detail": cert.detail,
    }


def _witness_record(code: Code, w: identify.Witness) -> dict:
    return {
        "gamma1": indices_from_mask(w.gamma1),
        "gamma2": indices_from_mask(w.gamma2),
        "error": format_error(code, w.error),
        "error_weight": code.weight(w.error),
        "is_stabilizer": code.is_stabilizer_error(w.error),
    }


def cmd_check(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    code = build_code(cfg["code"])
    model = build_model(cfg, code)
    supports = build_supports(cfg, code, model)
    verdict = identify.check_identifiability(code, supports)
    closure = identify.check_equivalent_condition(code, supports)
    report = {
        "code": code.describe(),
        "supports": len(supports),
        "identifiable": verdict.identifiable,
        "closure_condition": closure.holds,
        "certificate": _certificate(code, supports),
    }
    if verdict.witness is not None:
        report["witness"] = _witness_record(code, verdict.witness)
        stab = identify.stabilizer_witness(code, supports)
        if stab is not None:
            report["stabilizer_witness"] = _witness_record(code, stab)
    report.update(provenance(cfg, cfg.get("seed")))
    emit(report, cfg.get("outputs", {}).get("report"))
    return EXIT_OK if verdict.identifiable else EXIT_NOT_IDENTIFIABLE


def _require_model(cfg: dict, code: Code) -> noise.SupportModel:
    model = build_model(cfg, code)
    if model is None:
        raise InputError("this command needs a noise section")
    return model


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    code = build_code(cfg["code"])
    model = _require_model(cfg, code)
    seed = cfg.get("seed", 0)
    shots = cfg.get("shots", 10_000)
    batch = noise.sample(model, code, shots, seed, cfg.get("threads"))
    hist = batch.histogram()
    width = code.num_checks
    report = {
        "code": code.describe(),
        "shots": shots,
        "histogram": {format(s, f"0{width}b")[::-1]: c for s, c in sorted(hist.items())},
    }
    report.update(provenance(cfg, seed))
    emit(report, cfg.get("outputs", {}).get("report"))
    lines = ["syndrome,count"] + [f"{format(s, f'0{width}b')[::-1]},{c}" for s, c in sorted(hist.items())]
    _write_csv(cfg.get("outputs", {}).get("csv"), "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_estimate(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    code = build_code(cfg["code"])
    model = _require_model(cfg, code)
    supports = build_supports(cfg, code, model)
    est = cfg.get("estimation", {})
    mode = cfg.get("mode", "exact")
    seed = cfg.get("seed", 0)
    kwargs = dict(clamp=est.get("clamp", False), weighting=est.get("weighting", "none"),
                  override=est.get("override", False), row_seed=est.get("row_seed", 0))
    if mode == "exact":
        rep = estimate.run_estimation(code, supports, model=model, **kwargs)
    else:
        batch = noise.sample(model, code, cfg.get("shots", 10_000), seed, cfg.get("threads"))
        rep = estimate.run_estimation(code, supports, batch=batch, **kwargs)
    report = {"code": code.describe(), "mode": mode, **rep.to_dict()}
    report.update(provenance(cfg, seed if mode == "sample" else None))
    emit(report, cfg.get("outputs", {}).get("report"))
    _write_csv(cfg.get("outputs", {}).get("csv"), rep.rates_csv())
    for w in rep.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


def _verify_code(args: argparse.Namespace) -> Code:
    if args.code == "toric":
        return codes.toric(args.L or 3)
    if args.code == "repetition":
        return codes.repetition(args.n or 3)
    return codes.catalog(args.code)


def cmd_verify(args: argparse.Namespace) -> int:
    suite = args.suite
    if suite == "orthogonal-array":
        checks = verify.suite_orthogonal_array(_verify_code(args), args.max_size)
    elif suite == "intersection-matrix":
        checks = verify.suite_intersection_matrix(args.n or 5, args.t or 2)
    elif suite == "schur-chain":
        checks = verify.suite_schur_chain(args.n or 6, args.t or 3, seed=args.seed)
    elif suite == "theorem2-bruteforce":
        checks = verify.suite_theorem2_bruteforce(args.trials, args.n or 8, args.seed)
        checks += verify.suite_equivalent_condition(args.trials, args.n or 8, args.seed)
    else:
        checks = verify.suite_symmetries(_verify_code(args), args.t or 1)
    report = {"suite": suite, **verify.summarize(checks), "version": __version__, "seed": args.seed}
    emit(report, args.out)
    return EXIT_OK if verify.all_passed(checks) else EXIT_NOT_IDENTIFIABLE


# --- parser ---------------------------------------------------------------


def _add_experiment_flags(p: argparse.ArgumentParser, sampling: bool = False) -> None:
    p.add_argument("--config", help="JSON experiment config")
    p.add_argument("--code", help="catalog code name (overrides config)")
    p.add_argument("--code-file", help="code text file (overrides config)")
    p.add_argument("--L", type=int, help="lattice size for toric")
    p.add_argument("--n", type=int, help="length for repetition")
    p.add_argument("--t", type=int, help="weight-t supports")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="report path (default stdout)")
    p.add_argument("--set", action="append", metavar="KEY=JSON",
                   help="override any config field by dotted path")
    if sampling:
        p.add_argument("--shots", type=int)
        p.add_argument("--threads", type=int,
                       help=f"worker threads (default ${noise.THREADS_ENV} or 1)")
        p.add_argument("--csv", help="CSV output path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="syndromeid", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("code-info", help="code parameters, distance and pure distance")
    p.add_argument("name", nargs="?", default="five_qubit", choices=sorted(codes.CATALOG))
    p.add_argument("--file", help="read the code from a text file instead")
    p.add_argument("--L", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--max-weight", type=int, default=codes.DEFAULT_MAX_WEIGHT)
    p.add_argument("--out")
    p.set_defaults(func=cmd_code_info)

    p = sub.add_parser("check", help="identifiability verdict for a support family")
    _add_experiment_flags(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("simulate", help="sample syndromes and write a histogram")
    _add_experiment_flags(p, sampling=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="estimate the noise from exact or sampled moments")
    _add_experiment_flags(p, sampling=True)
    p.add_argument("--mode", choices=["exact", "sample"])
    p.add_argument("--clamp", action="store_true", help="clamp non-positive moments to 10/K")
    p.add_argument("--weighting", choices=["none", "variance"])
    p.add_argument("--override", action="store_true", help="estimate despite non-identifiability")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("verify", help="run a property-verification suite")
    p.add_argument("suite", choices=sorted(verify.SUITES))
    p.add_argument("--code", default="five_qubit", choices=sorted(codes.CATALOG))
    p.add_argument("--L", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--max-size", type=int, default=4)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except estimate.NonPositiveMomentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except identify.IdentifiabilityError as exc:
        print(f"error: not identifiable: {exc}", file=sys.stderr)
        return EXIT_NOT_IDENTIFIABLE
    except (InputError, CodeError, noise.ModelError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

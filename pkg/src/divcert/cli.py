"""Batch front-end.

Subcommands: check-symbol, build-schedule, certify, sobolev, trace-term.
Experiments are described by a JSON config (versionable, strict schema);
command-line flags override individual scalars. All file outputs are
written atomically with sorted keys, so re-running a command on the same
inputs is byte-identical.

Exit codes: 0 success; 1 certify found growth ratios below the floor;
2 check-symbol did not earn the requested verdict; 3 construction or
evaluation failed (stage named on stderr); 64 bad config or usage.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from .errors import ConfigError, DivcertError, InputError
from .evaluator import (blowup_certificate, certificates_c0, partial_sum,
                        write_blowup_csv, write_certificates_json)
from .ioutil import atomic_write_text
from .oscint import trace_term
from .schedule import (build_annulus_schedule, build_spatial_schedule,
                       build_theorem2_schedule, load_schedule,
                       profile_from_description, save_schedule,
                       validate_schedule)
from .sobolev import sobolev_report
from .symbol import symbol_from_description, verify_growth_conditions

log = logging.getLogger("divcert")

EXIT_OK = 0
EXIT_BELOW_FLOOR = 1
EXIT_NO_VERDICT = 2
EXIT_STAGE_FAILED = 3
EXIT_CONFIG = 64

_DEFAULTS = {
    "symbol": {"kind": "homogeneous", "a": 2.0},
    "gamma": {"kind": "identity"},
    "n": 1,
    "K": 5,
    "N": 81,
    "variant": "theorem1",
    "beta": None,
    "center": None,
    "tol": 1e-8,
    "c_min": 0.0,
    "r_max": 1e6,
    "ks": None,
    "s": None,
    "j_max": None,
}

_VARIANTS = ("theorem1", "theorem2-strong", "theorem2-weak")


class _StageFailure(Exception):
    def __init__(self, stage, cause):
        super().__init__(f"{stage} failed: {cause}")
        self.stage = stage
        self.cause = cause


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except DivcertError as exc:
        raise _StageFailure(name, exc) from exc


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - set(_DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    return doc


def _merge_config(doc, args):
    cfg = dict(_DEFAULTS)
    cfg.update(doc)
    for name in ("n", "K", "N", "variant", "beta", "tol", "c_min", "r_max"):
        flag = getattr(args, name, None)
        if flag is not None:
            cfg[name] = flag

    if cfg["n"] not in (1, 2, 3):
        raise ConfigError(f"n must be 1, 2 or 3, got {cfg['n']!r}")
    if not (isinstance(cfg["K"], int) and cfg["K"] >= 1):
        raise ConfigError(f"K must be a positive integer, got {cfg['K']!r}")
    if not (isinstance(cfg["N"], int) and cfg["N"] >= 2):
        raise ConfigError(f"N must be an integer >= 2, got {cfg['N']!r}")
    if cfg["variant"] not in _VARIANTS:
        raise ConfigError(f"variant must be one of {_VARIANTS}, got {cfg['variant']!r}")
    if not (isinstance(cfg["tol"], (int, float)) and cfg["tol"] > 0.0):
        raise ConfigError(f"tol must be a positive real, got {cfg['tol']!r}")
    if not isinstance(cfg["c_min"], (int, float)):
        raise ConfigError(f"c_min must be a real, got {cfg['c_min']!r}")
    if not (isinstance(cfg["r_max"], (int, float)) and cfg["r_max"] > 0.0):
        raise ConfigError(f"r_max must be positive, got {cfg['r_max']!r}")
    if cfg["beta"] is not None and not (isinstance(cfg["beta"], (int, float))
                                        and cfg["beta"] > 0.0):
        raise ConfigError(f"beta must be positive, got {cfg['beta']!r}")
    if cfg["ks"] is not None:
        if not (isinstance(cfg["ks"], list)
                and all(isinstance(k, int) and k >= 1 for k in cfg["ks"])):
            raise ConfigError(f"ks must be a list of positive integers, got {cfg['ks']!r}")
    if cfg["s"] is not None and not (isinstance(cfg["s"], (int, float))
                                     and cfg["s"] >= 0.0):
        raise ConfigError(f"s must be nonnegative, got {cfg['s']!r}")
    if cfg["j_max"] is not None and not (isinstance(cfg["j_max"], int)
                                         and cfg["j_max"] >= 1):
        raise ConfigError(f"j_max must be a positive integer, got {cfg['j_max']!r}")

    if cfg["center"] is None:
        cfg["center"] = [0.0] * cfg["n"]
    if not (isinstance(cfg["center"], list) and len(cfg["center"]) == cfg["n"]
            and all(isinstance(c, (int, float)) for c in cfg["center"])):
        raise ConfigError(f"center must list {cfg['n']} reals, got {cfg['center']!r}")

    try:
        desc = dict(cfg["symbol"])
        desc.setdefault("n", cfg["n"])
        cfg["_symbol"] = symbol_from_description(desc)
        cfg["_gamma"] = profile_from_description(cfg["gamma"])
    except (InputError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad symbol or gamma description: {exc}") from exc
    if cfg["_symbol"].n != cfg["n"]:
        raise ConfigError(f"symbol dimension {cfg['_symbol'].n} != n = {cfg['n']}")
    return cfg


def _emit(doc, out_path):
    text = json.dumps(doc, indent=1, sort_keys=True) + "\n"
    if out_path:
        atomic_write_text(out_path, text)
        log.info("wrote %s", out_path)
    else:
        sys.stdout.write(text)


def _obtain_schedule(cfg, args):
    if getattr(args, "schedule_in", None):
        sched = _stage("construction", load_schedule, args.schedule_in)
        log.info("loaded schedule from %s", args.schedule_in)
    else:
        sched = _stage("construction", _build_schedule, cfg)
    if getattr(args, "schedule_out", None):
        _stage("construction", save_schedule, sched, args.schedule_out)
        log.info("wrote schedule to %s", args.schedule_out)
    return sched


def _build_schedule(cfg):
    sym = cfg["_symbol"]
    gamma = cfg["_gamma"]
    if cfg["variant"] == "theorem1":
        partial = build_spatial_schedule(gamma, cfg["n"], cfg["K"])
        sched = build_annulus_schedule(sym, partial, N=cfg["N"])
    else:
        sched = build_theorem2_schedule(
            sym, cfg["center"], gamma, cfg["n"], cfg["K"], N=cfg["N"],
            variant=cfg["variant"], beta=cfg["beta"], r_max=cfg["r_max"])
    validate_schedule(sched)
    log.info("built %s schedule: %d points, %d annuli",
             sched.variant, sched.point_count, sched.annulus_count)
    return sched


def cmd_check_symbol(cfg, args):
    report = _stage("evaluation", verify_growth_conditions, cfg["_symbol"],
                    r_max=cfg["r_max"], beta=cfg["beta"])
    _emit(report.to_dict(), args.out)
    if report.supports(cfg["variant"]):
        return EXIT_OK
    log.info("verdict for %s absent", cfg["variant"])
    return EXIT_NO_VERDICT


def cmd_build_schedule(cfg, args):
    sched = _stage("construction", _build_schedule, cfg)
    path = args.schedule_out or args.out
    if not path:
        raise ConfigError("build-schedule needs --schedule-out or --out")
    _stage("construction", save_schedule, sched, path)
    log.info("wrote schedule to %s", path)
    return EXIT_OK


def _certify_rows(sched, cfg, jobs):
    J = sched.annulus_count
    ks = cfg["ks"] or list(range(1, J + 1))
    bad = [k for k in ks if k > J]
    if bad:
        raise InputError(f"requested targets {bad} beyond {J} annuli")
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            certs = list(pool.map(lambda k: blowup_certificate(sched, k), ks))
    else:
        certs = [blowup_certificate(sched, k) for k in ks]

    from .evaluator import _value_computable

    rows = []
    for cert in certs:
        abs_S = abs_err = None
        if _value_computable(sched, cert.k):
            ps = partial_sum(sched, J, cert.k, tol=cfg["tol"])
            abs_S = abs(ps.value)
            abs_err = ps.abs_error
        rows.append({
            "k": cert.k, "t_k": cert.t_k, "log_Rp_k": cert.log_Rp_k,
            "L_k": cert.lower_bound, "growth_ratio": cert.growth_ratio,
            "abs_S": abs_S, "abs_err": abs_err,
        })
    return rows, certs


def cmd_certify(cfg, args):
    sched = _obtain_schedule(cfg, args)
    rows, certs = _stage("evaluation", _certify_rows, sched, cfg,
                         max(1, args.jobs))
    csv_path = args.out or "blowup.csv"
    json_path = os.path.splitext(csv_path)[0] + ".json"
    write_blowup_csv(csv_path, rows)
    write_certificates_json(json_path, sched, certs)
    log.info("wrote %s and %s", csv_path, json_path)

    c0 = certificates_c0(certs)
    if c0 is not None and c0 < cfg["c_min"]:
        log.info("growth floor %r below configured minimum %r", c0, cfg["c_min"])
        return EXIT_BELOW_FLOOR
    return EXIT_OK


def cmd_sobolev(cfg, args):
    sched = _obtain_schedule(cfg, args)
    report = _stage("evaluation", sobolev_report, sched, s=cfg["s"],
                    j_max=cfg["j_max"])
    _emit(report.to_dict(), args.out)
    return EXIT_OK


def cmd_trace_term(cfg, args):
    try:
        j_str, k_str = args.trace_term.split(",")
        j, k = int(j_str), int(k_str)
    except (AttributeError, ValueError):
        raise ConfigError(f"--trace-term expects J,K integers, got {args.trace_term!r}")
    sched = _obtain_schedule(cfg, args)
    doc = _stage("evaluation", trace_term, sched, j, k, tol=cfg["tol"])
    _emit(doc, args.out)
    return EXIT_OK


def _parser():
    p = argparse.ArgumentParser(
        prog="divcert",
        description="Certified divergence schedules for generalized "
                    "Schrodinger evolutions: condition checks, schedule "
                    "construction, blow-up certification, Sobolev reports.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON experiment config")
        sp.add_argument("--out", help="output path (default: stdout for JSON)")
        sp.add_argument("--jobs", type=int, default=1,
                        help="parallel certificate evaluation")
        sp.add_argument("--n", type=int)
        sp.add_argument("--K", type=int)
        sp.add_argument("--N", type=int)
        sp.add_argument("--variant", choices=_VARIANTS)
        sp.add_argument("--beta", type=float)
        sp.add_argument("--tol", type=float)
        sp.add_argument("--c-min", dest="c_min", type=float)
        sp.add_argument("--r-max", dest="r_max", type=float)
        sp.add_argument("--schedule-in", help="load schedule JSON instead of building")
        sp.add_argument("--schedule-out", help="save the schedule JSON")

    sp = sub.add_parser("check-symbol", help="growth-condition verdicts")
    common(sp)
    sp.set_defaults(func=cmd_check_symbol)

    sp = sub.add_parser("build-schedule", help="construct and save a schedule")
    common(sp)
    sp.set_defaults(func=cmd_build_schedule)

    sp = sub.add_parser("certify", help="blow-up table and certificates")
    common(sp)
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("sobolev", help="membership report")
    common(sp)
    sp.set_defaults(func=cmd_sobolev)

    sp = sub.add_parser("trace-term", help="dump one term evaluation")
    common(sp)
    sp.add_argument("--trace-term", required=True, metavar="J,K",
                    help="annulus and target indices")
    sp.set_defaults(func=cmd_trace_term)
    return p


def _setup_logging():
    level = os.environ.get("DIVCERT_LOG", "error").lower()
    chosen = {"error": logging.ERROR, "info": logging.INFO,
              "debug": logging.DEBUG}.get(level, logging.ERROR)
    logging.basicConfig(level=chosen, stream=sys.stderr,
                        format="divcert %(levelname)s %(message)s")


def main(argv=None):
    _setup_logging()
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; fold into the config code
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK

    try:
        cfg = _merge_config(_load_config(args.config), args)
    except ConfigError as exc:
        print(f"divcert: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        return args.func(cfg, args)
    except ConfigError as exc:
        print(f"divcert: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _StageFailure as exc:
        print(f"divcert: {exc.stage} failed: {exc.cause}", file=sys.stderr)
        return EXIT_STAGE_FAILED
    except DivcertError as exc:
        print(f"divcert: evaluation failed: {exc}", file=sys.stderr)
        return EXIT_STAGE_FAILED


if __name__ == "__main__":
    sys.exit(main())

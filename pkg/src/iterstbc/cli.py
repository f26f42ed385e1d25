"""Command-line front end: tower, algebra-check, certify, codebook, mindet, decodability, simulate."""

from __future__ import annotations

import argparse
import csv
import json
import os
import random
import sys
import time
from fractions import Fraction
from typing import Any

from . import __version__
from .certificates import certify
from .channel import ChannelConfig, decoder_agreement, layer_codebook, simulate, snr_grid, write_csv
from .codebook import CODE_PRESETS, CodeSpec, Constellation, code_preset, diversity_evidence, encode, exact_det, min_det_survey, normalization_identity_coefficients, random_symbols
from .cyclic_algebra import CyclicAlgebra, is_division_quaternion_definite
from .decodability import basis_matrices, complexity_exponent, find_partition, mgk
from .iterated import IteratedAlgebra, IterVariant, NotFound, ZeroDivisorWitness, associator, big_lambda, zero_divisor_search
from .linalg import det
from .serialize import complex_matrix_to_json, digest, element_from_json, matrix_to_json, rational_str, to_jsonable
from .tower import TOWER_PRESETS, TowerSpec, tower_preset

EXIT_OK, EXIT_INVALID, EXIT_INCONSISTENT = 0, 1, 2


class UsageError(Exception):
    """Bad input; reported with exit code 1."""


# -- configuration ------------------------------------------------------------------------

DEFAULTS: dict[str, dict[str, Any]] = {
    "tower": {"preset": "6x3"},
    "algebra-check": {"preset": "6x3-right", "d": None, "variant": None, "samples": 100, "box": 1, "seed": 0},
    "certify": {"preset": "6x3-right", "d": None, "variant": None, "box": 1, "norm_box": 2, "soundness": True},
    "codebook": {"preset": "6x3-right", "constellation": None, "sample": 10, "seed": 0, "layers": None},
    "mindet": {"preset": "6x3-right", "constellation": None, "sample": 1000, "seed": 0, "layers": None, "exhaustive": False, "diversity": 0},
    "decodability": {"preset": "6x3-right", "subcode": "diagonal", "values": False},
    "simulate": {"preset": "6x3-right", "layers": 1, "constellation": None, "snr_db": "0:5:20", "trials": 1000, "seed": 0, "n_r": None, "decoder": "sphere"},
}


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="iterstbc", description="Iterated algebras and their space-time block codes.")
    p.add_argument("--version", action="version", version=f"iterstbc {__version__}")
    sub = p.add_subparsers(dest="command")

    def common(sp: argparse.ArgumentParser, preset_help: str) -> None:
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--preset", help=preset_help)
        g.add_argument("--config", help="JSON config file (as echoed in a previous output)")
        sp.add_argument("--out", help="write output here instead of stdout")

    sp = sub.add_parser("tower", help="describe a preset tower of cyclotomic subfields")
    common(sp, f"one of {sorted(TOWER_PRESETS)}")

    sp = sub.add_parser("algebra-check", help="structural checks and a bounded zero-divisor search")
    common(sp, f"code preset ({sorted(CODE_PRESETS)}) or algebra config")
    sp.add_argument("--samples", type=int)
    sp.add_argument("--box", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--d", help="override d: generator name or JSON element")
    sp.add_argument("--variant", choices=[v.value for v in IterVariant])

    sp = sub.add_parser("certify", help="run the division certificates")
    common(sp, f"code preset ({sorted(CODE_PRESETS)}) or algebra config")
    sp.add_argument("--box", type=int)
    sp.add_argument("--norm-box", type=int, dest="norm_box")
    sp.add_argument("--no-soundness", action="store_false", dest="soundness", default=None)
    sp.add_argument("--d", help="override d: generator name or JSON element")
    sp.add_argument("--variant", choices=[v.value for v in IterVariant])

    sp = sub.add_parser("codebook", help="emit sample codewords with exact matrices and determinants")
    common(sp, f"one of {sorted(CODE_PRESETS)}")
    sp.add_argument("--constellation")
    sp.add_argument("--sample", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--layers", type=int)
    sp.add_argument("--emit", dest="out_alias", help="alias of --out")

    sp = sub.add_parser("mindet", help="minimum determinant survey")
    common(sp, f"one of {sorted(CODE_PRESETS)}")
    sp.add_argument("--constellation")
    sp.add_argument("--sample", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--layers", type=int)
    sp.add_argument("--exhaustive", action="store_true", default=None)
    sp.add_argument("--diversity", type=int, help="also sample this many codeword differences")
    sp.add_argument("--csv", help="CSV summary path")

    sp = sub.add_parser("decodability", help="basis matrices, group partition and complexity exponent")
    common(sp, f"one of {sorted(CODE_PRESETS)}")
    sp.add_argument("--subcode", choices=["all", "diagonal"])
    sp.add_argument("--values", action="store_true", default=None, help="include float magnitudes of nonzero M entries")

    sp = sub.add_parser("simulate", help="seeded Monte-Carlo codeword error rates")
    common(sp, f"one of {sorted(CODE_PRESETS)}")
    sp.add_argument("--layers", type=int)
    sp.add_argument("--constellation")
    sp.add_argument("--snr-db", dest="snr_db")
    sp.add_argument("--trials", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--n-r", type=int, dest="n_r")
    sp.add_argument("--decoder", choices=["sphere", "ml"])
    return p


def _resolve_config(cmd: str, args: argparse.Namespace) -> dict[str, Any]:
    cfg = dict(DEFAULTS[cmd])
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise UsageError("config must be a JSON object")
        if "sigma_exp" in loaded or "tower" in loaded.get("result", {}):
            # a bare tower description (or the output of the tower subcommand)
            if cmd not in ("algebra-check", "certify"):
                raise UsageError("a tower file only configures algebra-check and certify")
            loaded = {"algebra": {"tower": loaded if "sigma_exp" in loaded else loaded["result"]["tower"]}}
        loaded = loaded.get("config", loaded)
        if loaded.get("command", cmd) != cmd:
            raise UsageError(f"config is for {loaded['command']!r}, not {cmd!r}")
        unknown = set(loaded) - set(cfg) - {"command", "algebra"}
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update({k: v for k, v in loaded.items() if k != "command"})
    skip = {"command", "config", "out", "out_alias", "csv"}
    for key, value in vars(args).items():
        if key not in skip and value is not None:
            cfg[key] = value
    cfg["command"] = cmd
    return cfg


# -- algebra construction ------------------------------------------------------------------------


def _element(tower: TowerSpec, spec: Any):
    fld = tower.field
    if isinstance(spec, dict):
        try:
            return element_from_json(spec)
        except (KeyError, ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"malformed element {spec!r}") from exc
    if isinstance(spec, (int, float)):
        spec = str(spec)
    if isinstance(spec, str):
        s = spec.strip()
        if s.startswith("{"):
            return _element(tower, json.loads(s))
        if s.startswith("["):
            try:
                return fld.from_coeffs([Fraction(c) for c in json.loads(s)])
            except (ValueError, TypeError) as exc:
                raise UsageError(f"malformed coefficient list {s!r}: {exc}") from exc
        gens = tower.all_generators()
        if s in gens:
            return gens[s]
        try:
            return fld(Fraction(s))
        except ValueError:
            pass
    raise UsageError(f"cannot interpret {spec!r} as an element (generators: {sorted(tower.all_generators())})")


def _algebra_from_cfg(cfg: dict[str, Any]) -> tuple[IteratedAlgebra, dict]:
    """Preset algebra, optionally with d/variant overridden, or an explicit {"algebra": {...}} block."""
    desc: dict[str, Any]
    if "algebra" in cfg and cfg["algebra"]:
        a = cfg["algebra"]
        tower_name = a.get("tower", "6x3")
        try:
            tower = tower_preset(tower_name) if isinstance(tower_name, str) else TowerSpec.from_json(tower_name)
        except (KeyError, ValueError) as exc:
            raise UsageError(str(exc)) from exc
        try:
            D = CyclicAlgebra(tower, _element(tower, a.get("c", "-1")))
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        d_text = cfg["d"] if cfg.get("d") is not None else a.get("d", "1")
        d = _element(tower, d_text)
        variant = a.get("variant", "right")
        desc = {"tower": tower.name, "c": a.get("c", "-1"), "d": d_text, "variant": variant}
    else:
        spec = _code_spec(cfg["preset"])
        D = spec.algebra.D
        tower = D.tower
        d = spec.algebra.d
        variant = spec.algebra.variant.value
        desc = {"preset": spec.name, "tower": tower.name, "c": "-1", "variant": variant}
        if cfg.get("d") is not None:
            d = _element(tower, cfg["d"])
            desc["d"] = cfg["d"]
    if cfg.get("variant"):
        variant = cfg["variant"]
        desc["variant"] = variant
    try:
        A = IteratedAlgebra(D, d, IterVariant.parse(variant))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return A, desc


def _code_spec(name: str, constellation: str | None = None) -> CodeSpec:
    try:
        spec = code_preset(name)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if constellation:
        try:
            spec = spec.with_constellation(Constellation.parse(constellation))
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    return spec


# -- subcommands --------------------------------------------------------------------------


def _cmd_tower(cfg: dict) -> tuple[dict, int]:
    try:
        t = tower_preset(cfg["preset"])
    except (KeyError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    return {
        "tower": t.to_json(),
        "degrees": {"K": len(t.k_basis), "F": len(t.f_basis), "L": len(t.l_basis), "F0": len(t.f0_basis)},
        "m": t.m,
        "n": t.n,
        "sigma": t.sigma.exponent,
        "tau": t.tau.exponent,
        "norm_K_L_of_generators": {k: to_jsonable(t.norm_K_L(v)) for k, v in t.all_generators().items()},
        "f0_has_primitive_nth_root": t.f0_has_primitive_root(t.n),
    }, EXIT_OK


def _placement(A: IteratedAlgebra) -> dict:
    t = A.D.tower
    if not A.d.in_K():
        return {"in_K": False}
    k = A.d.coords[0]
    return {"in_K": True, "in_L": t.in_L(k), "in_F": t.in_F(k), "in_F0": t.in_F0(k)}


def _cmd_algebra_check(cfg: dict) -> tuple[dict, int]:
    A, desc = _algebra_from_cfg(cfg)
    rng = random.Random(cfg["seed"])
    samples = int(cfg["samples"])
    if samples < 0:
        raise UsageError("samples must be nonnegative")
    t = A.D.tower
    det_ok = 0
    nonassoc = 0
    checkable = A.variant is not IterVariant.RIGHT or A.d_in_L()
    for _ in range(samples):
        x = A.random(rng, 2)
        if checkable:
            v = det(big_lambda(x))
            ok = (t.in_K(v) and A.tau(v) == v) if A.variant is IterVariant.RIGHT else t.in_F(v)
            det_ok += ok
        if not associator(x, A.random(rng, 1), A.random(rng, 1)).is_zero():
            nonassoc += 1
    out: dict[str, Any] = {
        "algebra": desc,
        "d_placement": _placement(A),
        "D_is_definite_quaternion_division": is_division_quaternion_definite(A.D),
        "det_membership": {"checked": samples if checkable else 0, "ok": det_ok, "field": "L" if A.variant is IterVariant.RIGHT else "F"},
        "nonassociative_triples": nonassoc,
        "samples": samples,
    }
    code = EXIT_OK if det_ok == (samples if checkable else 0) else EXIT_INVALID
    box = int(cfg["box"])
    if box > 0:
        t0 = time.perf_counter()
        try:
            res = zero_divisor_search(A, box)
        except ValueError as exc:
            out["zero_divisor_search"] = {"ran": False, "reason": str(exc)}
        else:
            if isinstance(res, ZeroDivisorWitness):
                out["zero_divisor_search"] = {"result": "witness", "x": to_jsonable(res.x), "y": to_jsonable(res.y), "box": box}
            else:
                out["zero_divisor_search"] = {"result": "not-found", "box": box, "checked": res.checked, "exact_checks": res.exact_checks}
            out["zero_divisor_search"]["seconds"] = round(time.perf_counter() - t0, 3)
    return out, code


def _cmd_certify(cfg: dict) -> tuple[dict, int]:
    A, desc = _algebra_from_cfg(cfg)
    report = certify(A, int(cfg["box"]), int(cfg["norm_box"]), bool(cfg["soundness"]))
    out = {"algebra": desc, "report": report.to_json()}
    return out, EXIT_OK if report.consistent else EXIT_INCONSISTENT


def _codeword_json(w, value, field_conductor: int) -> dict:
    return {
        "symbols": [list(s) for s in w.symbols],
        "exact_matrix": matrix_to_json(w.exact_matrix),
        "complex_matrix": complex_matrix_to_json(w.complex_matrix),
        "det": to_jsonable(value),
        "conductor": field_conductor,
    }


def _cmd_codebook(cfg: dict) -> tuple[dict, int]:
    spec = _code_spec(cfg["preset"], cfg.get("constellation"))
    sample = int(cfg["sample"])
    if sample <= 0:
        raise UsageError("sample must be positive")
    import numpy as np

    vecs = random_symbols(np.random.default_rng(cfg["seed"]), spec, sample, cfg.get("layers"))
    words = []
    for v in vecs:
        w = encode(v, spec)
        words.append(_codeword_json(w, exact_det(w, spec), spec.tower.field.conductor))
    return {
        "code": spec.name,
        "constellation": spec.constellation.name,
        "energy": rational_str(spec.constellation.average_energy),
        "theta": to_jsonable(spec.theta),
        "codewords": words,
    }, EXIT_OK


def _cmd_mindet(cfg: dict, csv_path: str | None) -> tuple[dict, int]:
    spec = _code_spec(cfg["preset"], cfg.get("constellation"))
    try:
        res = min_det_survey(spec, int(cfg["sample"]), int(cfg["seed"]), cfg.get("layers"), bool(cfg["exhaustive"]))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out: dict[str, Any] = {
        "code": spec.name,
        "constellation": spec.constellation.name,
        "energy": rational_str(res.energy),
        "count": res.count,
        "min_abs2": to_jsonable(res.min_abs2),
        "min_abs2_float": res.min_abs2_float,
        "argmin": [list(s) for s in res.argmin],
        "zero_determinants": res.zero_dets,
        "normalized_min_abs2": to_jsonable(res.normalized),
        "normalization_factor": None if spec.normalization is None else f"1/sqrt({spec.normalization}E)",
    }
    if spec.normalization == 28:
        lhs, rhs = normalization_identity_coefficients()
        out["normalization_identity"] = {"lhs_coefficient": rational_str(lhs), "rhs_coefficient": rational_str(rhs), "holds": lhs == rhs}
    code = EXIT_INVALID if res.zero_dets else EXIT_OK
    if int(cfg.get("diversity") or 0) > 0:
        rep = diversity_evidence(spec, int(cfg["diversity"]), int(cfg["seed"]))
        out["diversity"] = {
            "random_checked": rep.random_checked,
            "sweep_checked": rep.sweep_checked,
            "exact_checks": rep.exact_checks,
            "violations": [[list(s) for s in v] for v in rep.violations],
        }
        if rep.violations:
            code = EXIT_INVALID
    if csv_path:
        with open(csv_path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["code", "constellation", "seed", "count", "min_abs2", "min_abs2_float", "normalized", "zero_determinants"])
            norm = res.normalized
            w.writerow([spec.name, spec.constellation.name, cfg["seed"], res.count,
                        to_jsonable(res.min_abs2) if isinstance(res.min_abs2, Fraction) else f"{res.min_abs2_float:.17g}",
                        f"{res.min_abs2_float:.17g}",
                        "" if norm is None else (rational_str(norm) if isinstance(norm, Fraction) else f"{norm:.17g}"),
                        res.zero_dets])
    return out, code


def _cmd_decodability(cfg: dict) -> tuple[dict, int]:
    spec = _code_spec(cfg["preset"])
    mats = basis_matrices(spec, cfg["subcode"])
    part = find_partition(mats)
    out: dict[str, Any] = {
        "code": spec.name,
        "subcode": cfg["subcode"],
        "real_symbols": len(mats),
        "groups": part.groups,
        "group_count": part.count,
        "nonzero_pairs": [list(e) for e in part.edges],
    }
    if cfg["subcode"] == "diagonal":
        out["complexity_exponent"] = rational_str(complexity_exponent(spec, part, mats))
    if cfg.get("values"):
        out["nonzero_values"] = [[i, j, float(mgk(mats[i], mats[j]).to_complex().real)] for i, j in part.edges]
    return out, EXIT_OK


def _cmd_simulate(cfg: dict, out_path: str | None) -> tuple[dict, int]:
    spec = _code_spec(cfg["preset"], cfg.get("constellation"))
    try:
        grid = snr_grid(str(cfg["snr_db"]))
        cb = layer_codebook(spec, int(cfg["layers"]))
        rows = []
        for snr_db in grid:
            c = ChannelConfig(spec, 10 ** (snr_db / 10), int(cfg["trials"]), int(cfg["seed"]), cfg.get("n_r"), int(cfg["layers"]), decoder=cfg["decoder"])
            rows.append((snr_db, simulate(c, cb)))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if out_path:
        write_csv(out_path, rows)
    return {
        "code": spec.name,
        "layers": cb.layers,
        "constellation": spec.constellation.name,
        "decoder": cfg["decoder"],
        "rows": [{"snr_db": s, "trials": r.trials, "errors": r.errors, "rate": r.rate, "seconds": round(r.seconds, 3)} for s, r in rows],
    }, EXIT_OK


# -- entry points ---------------------------------------------------------------------------


def run(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv:
        parser.print_usage(sys.stderr)
        return EXIT_INVALID
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_INVALID
    cmd = args.command
    out_path = args.out or getattr(args, "out_alias", None)
    try:
        cfg = _resolve_config(cmd, args)
        if cmd == "tower":
            result, code = _cmd_tower(cfg)
        elif cmd == "algebra-check":
            result, code = _cmd_algebra_check(cfg)
        elif cmd == "certify":
            result, code = _cmd_certify(cfg)
        elif cmd == "codebook":
            result, code = _cmd_codebook(cfg)
        elif cmd == "mindet":
            result, code = _cmd_mindet(cfg, getattr(args, "csv", None))
        elif cmd == "decodability":
            result, code = _cmd_decodability(cfg)
        else:
            csv_out = out_path if out_path and out_path.endswith(".csv") else None
            result, code = _cmd_simulate(cfg, csv_out)
            out_path = None if csv_out else out_path
    except UsageError as exc:
        print(f"iterstbc {cmd}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except AssertionError as exc:
        print(f"iterstbc {cmd}: internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    doc = {
        "tool": "iterstbc",
        "version": __version__,
        "config": cfg,
        "input_digest": digest(cfg),
        "threads": os.environ.get("ITERSTBC_THREADS", "1"),
        "result": result,
        "exit_code": code,
    }
    text = json.dumps(to_jsonable(doc), indent=2, sort_keys=True)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if code == EXIT_INCONSISTENT:
        print(f"iterstbc {cmd}: internal inconsistency (proof and counterexample coexist)", file=sys.stderr)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

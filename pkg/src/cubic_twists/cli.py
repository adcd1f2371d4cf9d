"""Batch front end.

Every subcommand writes ``<out>/<command>.csv`` (first line ``# manifest <hash>``)
and ``<out>/<command>.manifest.json``.  Options may come from a JSON document
given with ``--config``; flags on the command line take precedence.  Exit codes:
0 success, 2 validation error, 3 numerical error.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .errors import NumericalError, ValidationError

log = logging.getLogger("cubic_twists")


@dataclass
class RunManifest:
    command: str
    config_path: str
    seed: int
    tool_version: str
    options: dict
    started: str = ""
    finished: str = ""
    outputs: list = field(default_factory=list)

    @property
    def hash(self) -> str:
        """Digest of the inputs only, so identical runs share it."""
        blob = json.dumps({"command": self.command, "seed": self.seed, "tool_version": self.tool_version,
                           "options": self.options}, sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def to_json(self) -> str:
        return json.dumps({**asdict(self), "hash": self.hash}, indent=2, sort_keys=True, default=str)


def _stamp() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%S%z")


def parse_complex(text) -> complex:
    if isinstance(text, (int, float, complex)):
        return complex(text)
    if isinstance(text, (list, tuple)):
        return complex(*text)
    try:
        return complex(str(text).replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise ValidationError(f"cannot parse complex number {text!r}") from exc


def _int_list(text) -> list[int]:
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    return [int(v) for v in str(text).split(",") if v.strip()]


# ---------------------------------------------------------------------------
# subcommands; each returns (header, rows)


def cmd_enumerate_characters(o):
    from .characters import enumerate_family

    rows = []
    for chi in enumerate_family(int(o["max_conductor"])):
        g = chi.source.generator
        rows.append([chi.modulus, g.a, g.b])
    return ["conductor", "generator_a", "generator_b"], rows


def cmd_gauss_sums(o):
    from .characters import enumerate_family, gauss_sum

    rows = []
    for chi in enumerate_family(int(o["max_conductor"])):
        g = gauss_sum(chi)
        v = complex(g.value)
        rows.append([chi.modulus, str(chi.label), repr(v.real), repr(v.imag), repr(abs(v) ** 2 - chi.modulus)])
    return ["conductor", "label", "tau_re", "tau_im", "abs2_minus_q"], rows


def _character(o):
    from . import eisenstein as eis
    from .characters import enumerate_family, from_eisenstein, principal

    if o.get("generator"):
        a, b = _int_list(o["generator"])
        return from_eisenstein(eis.EisensteinInt(a, b))
    q = int(o.get("conductor", 1))
    if q == 1:
        return principal(1)
    fam = [c for c in enumerate_family(q) if c.modulus == q]
    if not fam:
        raise ValidationError(f"no primitive cubic character of conductor {q}")
    idx = int(o.get("index", 0))
    if not 0 <= idx < len(fam):
        raise ValidationError(f"index must be in [0, {len(fam)})")
    return fam[idx]


def cmd_lvalue(o):
    from .lfunctions import get_provider, hecke_L, partial_LS

    s = parse_complex(o["s"])
    method = o.get("method", "afe")
    if o.get("hecke") is not None:
        v = hecke_L(s, int(o["hecke"]), "auto" if method == "afe" else method)
        label, provider = f"psi_{int(o['hecke'])}", "hecke"
    else:
        chi = _character(o)
        provider = o.get("provider", "zeta")
        v = partial_LS(s, get_provider(provider), chi, _int_list(o.get("S", [])), method)
        label = str(chi.label)
    return (["provider", "character", "s_re", "s_im", "value_re", "value_im", "abs_error_estimate", "terms_used",
             "method"],
            [[provider, label, repr(s.real), repr(s.imag), repr(v.value.real), repr(v.value.imag),
              repr(v.abs_error_estimate), v.terms_used, v.method]])


def cmd_sieve_test(o):
    from .sieve_lab import SIEVE_CSV_COLUMNS, SieveExperiment, dual_large_sieve_ratio, large_sieve_ratio

    rows = []
    for M in _int_list(o.get("M", "16,32,64,128,256")):
        for Q in _int_list(o.get("Q", "16,32,64,128,256")):
            exp = SieveExperiment(M, Q, int(o.get("trials", 100)), int(o["seed"]), o.get("sampler", "pm_one"))
            fn = dual_large_sieve_ratio if o.get("dual") else large_sieve_ratio
            rep = fn(exp)
            log.info("sieve M=%d Q=%d max_ratio=%.4g", M, Q, rep.max_ratio)
            rows.append([rep.row()[c] for c in SIEVE_CSV_COLUMNS])
    return list(SIEVE_CSV_COLUMNS), rows


def cmd_second_moment(o):
    from .sieve_lab import second_moment_scan

    t = float(o.get("t", 0.0))
    tab = second_moment_scan(_int_list(o.get("M", "32,64,128")), t)
    rows = [[r.M, repr(tab.t), repr(r.total), repr(r.principal_total), r.count, repr(r.max_error), repr(tab.slope)]
            for r in tab.rows]
    return ["M", "t", "sum_nonprincipal", "sum_principal", "count", "max_error", "slope"], rows


_MOMENT_KEYS = ("s", "provider_id", "r1", "r2", "Q", "S", "Y", "mode", "lvalue_method")


def cmd_first_moment(o):
    from .moments import LADDER_CSV_COLUMNS, MomentConfig, residual_ladder

    d = {k: o[k] for k in _MOMENT_KEYS if o.get(k) is not None}
    if "s" in d:
        d["s"] = parse_complex(d["s"])
    if "S" in d:
        d["S"] = _int_list(d["S"])
    cfg = MomentConfig.from_dict(d)
    Q_list = _int_list(o.get("Q_list", [cfg.Q]))
    ladder = residual_ladder(cfg, Q_list, int(o.get("prime_cutoff", 100_000)))
    rows = [[r.Q, repr(r.direct.real), repr(r.direct.imag), repr(r.main_term.real), repr(r.main_term.imag),
             repr(abs(r.residual)), r.census_total, r.census_nonvanishing, repr(ladder.slope)] for r in ladder]
    return list(LADDER_CSV_COLUMNS), rows


def cmd_census(o):
    from .lfunctions import get_provider
    from .moments import census, choose_S

    s = parse_complex(o.get("s", 0.9))
    pi = get_provider(o.get("provider", "sym2_delta"))
    S = _int_list(o["S"]) if o.get("S") else choose_S(pi, s)
    thr = o.get("threshold")
    res = census(s, pi, int(o.get("Q", 500)), None if thr is None else float(thr), S)
    rows = [["summary", "", res.total, res.nonvanishing, repr(res.threshold), repr(res.max_error)]]
    rows += [["witness", lab, cond, "", repr(val), repr(err)] for cond, lab, val, err in res.witnesses]
    return ["kind", "label", "total_or_conductor", "nonvanishing", "abs_value_or_threshold", "error"], rows


def cmd_cache(o):
    from .lfunctions import providers as prov

    action = o.get("action", "inspect")
    d = prov.active_cache_dir()
    if d is None:
        raise ValidationError(f"no cache directory: pass --cache or set {prov.CACHE_ENV}")
    d = Path(d)
    if action == "clear":
        removed = []
        for f in sorted(d.glob("*.csv")) if d.exists() else []:
            f.unlink()
            removed.append(f.name)
        return ["action", "file"], [["removed", f] for f in removed]
    if action == "build":
        prov.build_cache(int(o.get("p_max", 10_000)))
    rows = []
    for f in sorted(d.glob("*.csv")) if d.exists() else []:
        with open(f) as fh:
            header = fh.readline().strip()
            n = sum(1 for _ in fh) - 1
        rows.append([f.name, header.lstrip("# "), n])
    return ["file", "version", "rows"], rows


COMMANDS = {
    "enumerate-characters": cmd_enumerate_characters,
    "gauss-sums": cmd_gauss_sums,
    "lvalue": cmd_lvalue,
    "sieve-test": cmd_sieve_test,
    "second-moment": cmd_second_moment,
    "first-moment": cmd_first_moment,
    "census": cmd_census,
    "cache": cmd_cache,
}


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON document with options for the subcommand")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--threads", type=int, default=None, help="cap on worker threads")
    common.add_argument("--out", default=None, help="output directory (default: current directory)")
    common.add_argument("--cache", default=None, help="coefficient cache directory")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="cubic-twists", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("enumerate-characters", parents=[common], help="primitive cubic characters to CSV")
    q.add_argument("--max-conductor", type=int)
    q = sub.add_parser("gauss-sums", parents=[common], help="Gauss sums of the family")
    q.add_argument("--max-conductor", type=int)

    q = sub.add_parser("lvalue", parents=[common], help="a single L-value")
    q.add_argument("--s")
    q.add_argument("--provider", choices=["zeta", "gl2_delta", "sym2_delta"])
    q.add_argument("--conductor", type=int)
    q.add_argument("--index", type=int)
    q.add_argument("--generator", help="a,b for the primary generator a + b w")
    q.add_argument("--hecke", type=int, help="evaluate L(s, psi_m) for this m instead")
    q.add_argument("--S", help="comma-separated primes removed from the Euler product")
    q.add_argument("--method", choices=["afe", "afe_S", "oracle", "smoothed_sum"])

    q = sub.add_parser("sieve-test", parents=[common], help="large sieve ratios on a grid")
    q.add_argument("--M")
    q.add_argument("--Q")
    q.add_argument("--trials", type=int)
    q.add_argument("--sampler", choices=["pm_one", "complex_unit", "gaussian"])
    q.add_argument("--dual", action="store_true", default=None)

    q = sub.add_parser("second-moment", parents=[common], help="second moment of Hecke L-values")
    q.add_argument("--M")
    q.add_argument("--t", type=float)

    q = sub.add_parser("first-moment", parents=[common], help="first-moment residual ladder")
    q.add_argument("--s")
    q.add_argument("--provider-id", dest="provider_id")
    q.add_argument("--mode", choices=["plain_gln", "factorized_n3"])
    q.add_argument("--r1", type=float)
    q.add_argument("--r2", type=float)
    q.add_argument("--Q", type=int)
    q.add_argument("--Q-list", dest="Q_list")
    q.add_argument("--S")
    q.add_argument("--Y", type=float)
    q.add_argument("--prime-cutoff", dest="prime_cutoff", type=int)

    q = sub.add_parser("census", parents=[common], help="non-vanishing census over the family")
    q.add_argument("--s")
    q.add_argument("--provider", choices=["zeta", "gl2_delta", "sym2_delta"])
    q.add_argument("--Q", type=int)
    q.add_argument("--threshold", type=float)
    q.add_argument("--S")

    q = sub.add_parser("cache", parents=[common], help="build, inspect or clear the coefficient cache")
    q.add_argument("action", nargs="?", choices=["build", "inspect", "clear"])
    q.add_argument("--p-max", dest="p_max", type=int)
    return p


_GLOBAL = ("command", "config", "threads", "out", "cache", "verbose")


def _options(args) -> dict:
    opts = {}
    if args.config:
        try:
            with open(args.config) as fh:
                opts = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(opts, dict):
            raise ValidationError("config must be a JSON object")
    for k, v in vars(args).items():
        if k not in _GLOBAL and v is not None:
            opts[k] = v
    opts.setdefault("seed", 0)
    if args.command in ("enumerate-characters", "gauss-sums") and opts.get("max_conductor") is None:
        raise ValidationError("--max-conductor is required")
    if args.command == "lvalue" and opts.get("s") is None:
        raise ValidationError("--s is required")
    return opts


def _set_threads(n: int | None) -> None:
    if n is None:
        return
    if n < 1:
        raise ValidationError("--threads must be >= 1")
    import numba

    numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


def _write_csv(path: Path, manifest_hash: str, header, rows) -> None:
    buf = io.StringIO()
    buf.write(f"# manifest {manifest_hash}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(buf.getvalue())
    os.replace(tmp, path)


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.cache:
            from .lfunctions import set_cache_dir

            set_cache_dir(args.cache)
        _set_threads(args.threads)
        opts = _options(args)
        manifest = RunManifest(args.command, args.config or "", int(opts["seed"]), __version__,
                               {k: v for k, v in opts.items() if k != "seed"}, started=_stamp())
        header, rows = COMMANDS[args.command](opts)
        out = Path(args.out or ".")
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"{args.command}.csv"
        _write_csv(path, manifest.hash, header, rows)
        manifest.finished = _stamp()
        manifest.outputs = [str(path)]
        (out / f"{args.command}.manifest.json").write_text(manifest.to_json() + "\n")
        print(f"{args.command}: {len(rows)} rows -> {path} (manifest {manifest.hash})", file=sys.stderr)
        return 0
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

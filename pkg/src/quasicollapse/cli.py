"""quasicollapse command line.

    quasicollapse <command> [--config PATH] [--key value ...] [--out PATH] [--format csv|json]

Exit codes: 0 success, 1 configuration error, 2 verification failure,
3 convergence cap reached where convergence was required.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from . import experiments as ex

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_VERIFY = 2
EXIT_CAP = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ex.ConfigError(message)


def build_parser():
    p = _Parser(prog="quasicollapse", description="Driven JC quasienergy experiments.")
    p.add_argument("command", choices=ex.COMMANDS)
    p.add_argument("--config", default=None, help="key = value configuration file")
    for key, (attr, _) in ex.KEYS.items():
        flag = f"--{key}"
        if key in ex.BOOL_KEYS:
            # bare flag means true; an explicit value is also accepted
            p.add_argument(flag, dest=f"opt_{key}", nargs="?", const="true", default=None)
        else:
            p.add_argument(flag, dest=f"opt_{key}", default=None)
    return p


def fmt(value):
    """Shortest round-trip text for floats, lowercase booleans."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        return _json_safe(obj.item())
    return obj


def render_csv(table):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def render_json(obj):
    return json.dumps(_json_safe(obj), indent=2) + "\n"


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def run(argv):
    args = build_parser().parse_args(argv)
    overrides = {k: getattr(args, f"opt_{k}") for k in ex.KEYS
                 if getattr(args, f"opt_{k}") is not None}
    cfg = ex.load_config(args.command, args.config, overrides)
    code = EXIT_OK
    if cfg.command == "verify":
        report = ex.cmd_verify(cfg)
        code = report["exit_code"]
        if cfg.format == "json":
            text = render_json(report)
        else:
            table = ex.Table(("name", "residual", "tolerance", "pass"),
                             [(c["name"], c["residual"], c["tolerance"], c["pass"])
                              for c in report["checks"]])
            text = render_csv(table)
    elif cfg.command == "collapse-fit":
        report = ex.cmd_collapse_fit(cfg)
        text = render_json(report.as_dict()) if cfg.format == "json" else render_csv(report.table())
    else:
        fn = {"spectrum": ex.cmd_spectrum, "polarization": ex.cmd_polarization,
              "dirac": ex.cmd_dirac}[cfg.command]
        table = fn(cfg)
        text = render_json(table.as_dict()) if cfg.format == "json" else render_csv(table)
        if cfg.require_converged and not table.converged:
            code = EXIT_CAP
    _emit(text, cfg.out)
    return code


def main(argv=None):
    try:
        return run(sys.argv[1:] if argv is None else argv)
    except ex.ConfigError as exc:
        print(f"quasicollapse: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ex.ConvergenceCapError as exc:
        print(f"quasicollapse: {exc}", file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())

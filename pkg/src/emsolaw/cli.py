"""Command-line interface: ``emsolaw <command> [options]``.

Exit codes: 0 success, 2 guard violation (the request is well-formed but too
large for the chosen procedure), 3 input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Iterable, Sequence

from . import general_p, moments, rng
from .equivalence import equivalence_scan
from .family import FamilyParams, find_family_witness
from .graph import GraphFormatError, read_graph, sample_gnp, write_graph
from .logic import BUILTINS, FormulaError, builtin, evaluate, parse_formula
from .logic.builtins import strip_comments
from .montecarlo import GUARD_ERRORS, CheckerSpec, builtin_spec, cmd_exact, cmd_mc
from .witness import check_phi

EXIT_OK = 0
EXIT_GUARD = 2
EXIT_INPUT = 3
SIG_DIGITS = 12

INPUT_ERRORS = (ValueError, FormulaError, GraphFormatError, OSError, KeyError, ArithmeticError)


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def fmt(value) -> str:
    """Cell formatting: exact integers, 12 significant digits for reals."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, f".{SIG_DIGITS}g")
    return str(value)


def _config(args: argparse.Namespace) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k != "func"}
    cfg["rng"] = rng.ALGORITHM
    return cfg


def _sidecar(out: Path) -> Path:
    return out.with_name(out.name + ".config.json")


def write_table(args, header: Sequence[str], rows: Iterable[Sequence], out: str | None = None) -> None:
    """CSV with a JSON config echo as its first line, plus a ``.config.json`` sidecar."""
    cfg = _config(args)
    buf = io.StringIO()
    buf.write(json.dumps(cfg, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    out = out if out is not None else args.out
    if out:
        path = Path(out)
        path.write_text(buf.getvalue())
        _sidecar(path).write_text(json.dumps(cfg, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(buf.getvalue())


def write_result(args, result: dict) -> None:
    """Single results: JSON object whose first key is the config echo (or a CSV row)."""
    if getattr(args, "format", "json") == "csv":
        write_table(args, list(result), [list(result.values())])
        return
    text = json.dumps({"config": _config(args), "result": result}, indent=2, default=str) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def read_csv_table(path: str | Path) -> tuple[dict, list[dict]]:
    """Inverse of :func:`write_table`: (config, rows as dicts of strings)."""
    lines = Path(path).read_text().splitlines()
    cfg = json.loads(lines[0])
    return cfg, list(csv.DictReader(lines[1:]))


def _checker(args) -> CheckerSpec:
    name = args.checker
    if name == "formula" or args.formula_file:
        if not args.formula_file:
            raise InputError("--checker formula needs --formula-file")
        text = Path(args.formula_file).read_text()
        parse_formula(strip_comments(text))
        return CheckerSpec("formula", formula_text=text, label=f"formula:{args.formula_file}")
    if name == "phi":
        return CheckerSpec("phi")
    if name == "phi_h":
        return CheckerSpec("phi_h", args.u, args.v, args.h, args.reading)
    if name in BUILTINS:
        return builtin_spec(name)
    raise InputError(f"unknown checker {name!r}")


def _read_graph_arg(path: str):
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return read_graph(text)


def cmd_sample(args) -> int:
    g = sample_gnp(args.n, args.p, args.seed, args.stream)
    text = write_graph(g)
    if args.out:
        path = Path(args.out)
        path.write_text(text)  # the edge-list format admits no header, so the echo goes beside it
        _sidecar(path).write_text(json.dumps(_config(args), indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_check(args) -> int:
    g = _read_graph_arg(args.graph)
    result: dict = {"n": g.n, "m": g.m, "checker": args.checker}
    if args.formula_file or args.checker == "formula":
        spec = _checker(args)
        spec.guard(g.n)
        result["satisfies"] = evaluate(g, spec.formula())
    elif args.checker == "phi":
        w = check_phi(g)
        result["satisfies"] = w is not None
        result["witness"] = json.loads(w.to_json()) if w else None
    elif args.checker == "phi_h":
        params = FamilyParams(args.u, args.v, args.h)
        fw = find_family_witness(g, params, args.reading)
        result["reading"] = args.reading
        result["satisfies"] = fw is not None
        if fw is not None:
            result["witness"] = {"cliques": [q.sorted() for q in fw.cliques], "x": fw.x,
                                 "complete_to": [i + 1 for i in fw.complete_to]}
    else:
        spec = _checker(args)
        spec.guard(g.n)
        result["satisfies"] = evaluate(g, spec.formula())
    write_result(args, result)
    return EXIT_OK


def cmd_mc_main(args) -> int:
    res = cmd_mc(args.n, args.p, args.trials, args.seed, _checker(args), workers=args.workers)
    write_result(args, res.to_dict())
    return EXIT_OK


def cmd_exact_main(args) -> int:
    res = cmd_exact(args.n, _checker(args))
    write_result(args, res.to_dict())
    return EXIT_OK


def parse_n_spec(text: str) -> int:
    """``N`` (a decimal integer) or ``integer:K`` / ``half:K`` for the subsequence values."""
    if ":" in text:
        which, k = text.split(":", 1)
        return moments.subsequence_n(int(k), which)
    n = int(text)
    if n < 3:
        raise ValueError("n must be at least 3")
    return n


def cmd_moments_main(args) -> int:
    n = parse_n_spec(args.n)
    l_from = args.l_from if args.l_from is not None else args.k_from
    l_to = args.l_to if args.l_to is not None else args.k_to
    header = ["n", "k", "l", "ln_E_exact", "f", "df_dk", "df_dl", "h_kk", "h_kl", "h_ll"]
    rows = []
    for k in range(args.k_from, args.k_to + 1):
        for l in range(l_from, l_to + 1):
            pt = moments.moment_point(n, k, l)
            (hkk, hkl), (_, hll) = pt.hessian
            exact = "" if pt.ln_E_exact is None else pt.ln_E_exact
            rows.append([n, k, l, exact, pt.f_value, *pt.grad, hkk, hkl, hll])
    write_table(args, header, rows)
    return EXIT_OK


def cmd_secondmoment_main(args) -> int:
    header = ["k", "n", "j", "C_j", "ln_B_j", "ln_F_j", "ln_A_j", "ratio_cum", "pz_bound"]
    rows = []
    for k in range(args.k_from, args.k_to + 1):
        rep = moments.second_moment_report(k)
        cum = 0.0
        for t in rep.terms:
            cum += t.ratio_j
            rows.append([k, rep.n, t.j, t.C_j, t.ln_B_j, t.ln_F_j, t.ln_A_j, cum, rep.pz_bound])
    write_table(args, header, rows)
    return EXIT_OK


def cmd_sweep_main(args) -> int:
    header = ["k", "n", "kstar", "kstar_asymptotic", "ln_E_kk", "half_E_kk", "ln_union_bound_sum"]
    rows = []
    for k in range(args.k_from, args.k_to + 1):
        n = moments.subsequence_n(k, args.sequence)
        ln_e = moments.ln_expectation_exact(n, k, k)
        rows.append([k, n, moments.solve_kstar(n), moments.kstar_asymptotic(n), ln_e,
                     math.exp(ln_e) / 2, moments.ln_union_bound_sum(n)])
    write_table(args, header, rows)
    return EXIT_OK


def cmd_gammap_main(args) -> int:
    header = ["u", "v", "h", "a", "t", "gamma", "p", "leading_coefficient"]
    rows = []
    for h in range(args.h_from, args.h_to + 1):
        gp = general_p.derive_params(args.u, args.v, h)
        rows.append([gp.u, gp.v, h, gp.a, gp.t, float(gp.gamma), gp.p, general_p.leading_coefficient(gp)])
    write_table(args, header, rows)
    if args.k_to is not None:
        seq_rows = []
        for h in range(args.h_from, args.h_to + 1):
            gp = general_p.derive_params(args.u, args.v, h)
            for k in range(args.k_from, args.k_to + 1):
                n1 = general_p.subsequences_general(k, gp, "half")
                n2 = general_p.subsequences_general(k, gp, "integer")
                ks = general_p.kstar_general(n2.value, gp) if n2.value >= 100 else ""
                seq_rows.append([gp.u, gp.v, h, k, n1.value, n2.value, ks, n1.ambiguous, n2.ambiguous])
        out = None
        if args.out:
            p = Path(args.out)
            out = str(p.with_name(p.stem + "_sequences" + p.suffix))
        write_table(args, ["u", "v", "h", "k", "n1", "n2", "kstar_general", "n1_ambiguous", "n2_ambiguous"],
                    seq_rows, out=out)
    return EXIT_OK


def _load_decider(item: str):
    if item in BUILTINS:
        return builtin(item)
    if item == "phi:search":
        return lambda g: check_phi(g) is not None
    return parse_formula(strip_comments(Path(item).read_text()))


def cmd_equiv_main(args) -> int:
    deciders = [_load_decider(x) for x in args.formulas]
    rep = equivalence_scan(deciders, args.n_max, args.mode, args.trials, args.seed, args.n_min)
    write_result(args, rep.to_dict())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="emsolaw", description="Two-clique EMSO property on G(n, p): checks, estimates, moments.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common_out(p, formats=("json", "csv")):
        p.add_argument("--out", help="output file (default: stdout)")
        if formats:
            p.add_argument("--format", choices=formats, default=formats[0])

    def checker_args(p):
        p.add_argument("--checker", default="phi", help=f"phi, phi_h, formula, or a built-in sentence {BUILTINS}")
        p.add_argument("--formula-file", help="sentence in the text syntax (implies --checker formula)")
        p.add_argument("--u", type=int, default=3)
        p.add_argument("--v", type=int, default=2)
        p.add_argument("--h", type=int, default=1)
        p.add_argument("--reading", choices=("literal", "per_vertex"), default="literal")

    p = sub.add_parser("sample", help="draw a graph from G(n, p) in edge-list format")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stream", type=int, default=0)
    common_out(p, formats=())
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("check", help="decide the property on one graph file ('-' for stdin)")
    p.add_argument("graph")
    checker_args(p)
    common_out(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("mc", help="Monte Carlo estimate with a 99%% Wilson interval")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    checker_args(p)
    common_out(p)
    p.set_defaults(func=cmd_mc_main)

    p = sub.add_parser("exact", help="exact probability at p = 1/2 by enumerating all graphs")
    p.add_argument("--n", type=int, required=True)
    checker_args(p)
    common_out(p)
    p.set_defaults(func=cmd_exact_main)

    p = sub.add_parser("moments", help="table of ln E X(k, l), f and its derivatives")
    p.add_argument("--n", required=True, help="integer, or integer:K / half:K for the subsequences")
    p.add_argument("--k-from", type=int, default=1)
    p.add_argument("--k-to", type=int, required=True)
    p.add_argument("--l-from", type=int)
    p.add_argument("--l-to", type=int)
    common_out(p, formats=())
    p.set_defaults(func=cmd_moments_main)

    p = sub.add_parser("secondmoment", help="per-overlap second-moment terms at n = k 2^k")
    p.add_argument("--k-from", type=int, required=True)
    p.add_argument("--k-to", type=int, required=True)
    common_out(p, formats=())
    p.set_defaults(func=cmd_secondmoment_main)

    p = sub.add_parser("sweep", help="first-moment quantities along one of the two subsequences")
    p.add_argument("--sequence", choices=("half", "integer"), required=True)
    p.add_argument("--k-from", type=int, required=True)
    p.add_argument("--k-to", type=int, required=True)
    common_out(p, formats=())
    p.set_defaults(func=cmd_sweep_main)

    p = sub.add_parser("gammap", help="family parameters, root p and leading coefficient over h")
    p.add_argument("--u", type=int, required=True)
    p.add_argument("--v", type=int, required=True)
    p.add_argument("--h-from", type=int, default=1)
    p.add_argument("--h-to", type=int, required=True)
    p.add_argument("--k-from", type=int, default=1)
    p.add_argument("--k-to", type=int, help="also tabulate the two subsequences for k up to this value")
    common_out(p, formats=())
    p.set_defaults(func=cmd_gammap_main)

    p = sub.add_parser("equiv", help="compare sentences model by model")
    p.add_argument("formulas", nargs="+", help=f"built-in names {BUILTINS}, 'phi:search', or .fml files")
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--n-min", type=int)
    p.add_argument("--mode", choices=("exhaustive", "random"), default="exhaustive")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    common_out(p)
    p.set_defaults(func=cmd_equiv_main)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GUARD_ERRORS + (moments.TailCheckError,) as e:
        print(f"emsolaw: guard: {e}", file=sys.stderr)
        return EXIT_GUARD
    except (InputError, moments.ConvergenceError) + INPUT_ERRORS as e:
        print(f"emsolaw: error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface.

Exit codes: 0 success / check passed, 1 check failed or hypothesis not met,
2 malformed input or usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .algebra import (
    Algebra,
    algebra_from_tensor,
    find_unit,
    is_invertibility_locus,
    is_nilpotent,
    local_decomposition,
)
from .errors import DegenerateForm, OdecoError
from .gorenstein import counterexample_pipeline, hilbert_function, ideal_extraction, is_gorenstein
from .io import (
    FormatError,
    algebra_to_json,
    dumps,
    read_any,
    tensor_to_json,
)
from .odeco import (
    dim2_limit_family,
    dimension_table,
    is_two_step_nilpotent,
    random_isotropic_subspace,
    random_cubic_coeffs,
    random_odeco,
    weak_odeco_from_isotropic,
)
from .scalars import DEFAULT_CLUSTER_TOL, DEFAULT_TOL, format_scalar, gq
from .tangent import tangent_dim
from .tensor import BilinearForm, SymTensor3, check_invariance, robeva_residuals, slices_commute
from .unital import cw_tensor, deunitalize, unitalize


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# plumbing


def _read_input(args) -> str:
    if args.input in (None, "-"):
        return sys.stdin.read()
    with open(args.input, encoding="utf-8") as fh:
        return fh.read()


def _write(args, text: str, path: str | None = None):
    path = args.out if path is None else path
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _float_mode(args) -> bool:
    return args.mode == "float"


def _tol(args):
    return args.tol if _float_mode(args) else None


def _load(args):
    """Input as ``("tensor", (t, f))`` or ``("algebra", a)``, converted to the requested mode."""
    obj = read_any(_read_input(args))
    if isinstance(obj, tuple):
        t, f = obj
        if _float_mode(args):
            t, f = t.to_float(), f.to_float()
        elif not t.exact:
            raise UsageError("input has float scalars; pass --mode float")
        return "tensor", (t, f)
    a = obj
    if _float_mode(args):
        a = Algebra(a.to_float().mul, a.form.to_float(), validate=False, tol=args.tol)
    elif not a.exact:
        raise UsageError("input has float scalars; pass --mode float")
    return "algebra", a


def _load_algebra(args) -> Algebra:
    kind, obj = _load(args)
    if kind == "algebra":
        return obj
    t, f = obj
    a = algebra_from_tensor(t, f)
    if not a.exact:
        a = Algebra(a.mul, a.form, validate=False, tol=args.tol)
    return a


def _scalar_out(x):
    if isinstance(x, complex | float | np.complexfloating | np.floating):
        return format_scalar(complex(x))
    return format_scalar(gq(x))


def _vector_out(v) -> list:
    return [_scalar_out(x) for x in v]


def _report(args, data: dict):
    data = {"seed": args.seed, "mode": args.mode, **data}
    if args.json:
        _write(args, json.dumps(data, indent=1) + "\n")
        return
    lines = []
    for k, v in data.items():
        if isinstance(v, list | dict):
            v = json.dumps(v)
        lines.append(f"{k}: {v}")
    _write(args, "\n".join(lines) + "\n")


def _emit_tensor(args, t: SymTensor3, f: BilinearForm | None = None, path=None):
    if _float_mode(args):
        t = t.to_float()
        f = None if f is None else f.to_float()
    _write(args, dumps(tensor_to_json(t, f)), path)


def _emit_algebra(args, a: Algebra):
    if _float_mode(args):
        a = a.to_float()
    _write(args, dumps(algebra_to_json(a)))


# --------------------------------------------------------------------------
# commands


def cmd_check(args) -> int:
    kind, obj = _load(args)
    if kind != "tensor":
        raise UsageError("check expects a symtensor3-v1 file")
    t, f = obj
    tol = _tol(args)
    res = robeva_residuals(t, f, tol)
    a = algebra_from_tensor(t, f)
    two_step = is_two_step_nilpotent(t, f, tol)
    unit = find_unit(a if a.exact else Algebra(a.mul, a.form, validate=False, tol=tol))
    in_x = res.is_zero
    verdict = {"X": in_x, "Z": two_step}[args.variety]
    _report(args, {
        "dim": t.dim,
        "form": "identity" if f.is_identity else "gram",
        "residual_max_abs": res.max_abs,
        "residual_nonzero": res.num_nonzero,
        "residual_witness": None if res.witness is None else [i + 1 for i in res.witness],
        "in_X": in_x,
        "in_Z": two_step,
        "unit": None if unit is None else _vector_out(unit),
        "slices_commute": slices_commute(t, tol),
        "form_invariant": check_invariance(t, f, tol),
        "variety": args.variety,
        "verdict": "pass" if verdict else "fail",
    })
    return 0 if verdict else 1


def _parse_exact_param(s: str):
    try:
        return gq(Fraction(s))
    except (ValueError, ZeroDivisionError):
        pass
    try:
        return gq(s)
    except ValueError:
        raise UsageError(f"cannot parse parameter {s!r}") from None


def cmd_gen(args) -> int:
    exact = not _float_mode(args)
    if args.family == "odeco":
        k = args.n if args.k is None else args.k
        if not 0 <= k <= args.n:
            raise UsageError("need 0 <= k <= n")
        _emit_tensor(args, random_odeco(args.n, k, args.seed))
    elif args.family == "isotropic":
        b = random_isotropic_subspace(args.n, args.seed)
        t = weak_odeco_from_isotropic(b, random_cubic_coeffs(args.n // 2, args.seed + 1))
        _emit_tensor(args, t)
    elif args.family == "cw":
        t = cw_tensor(args.n)
        g = unitalize(Algebra.zero(args.n)).total.form
        _emit_tensor(args, t, g)
    elif args.family == "limit":
        param = _parse_exact_param(args.t) if exact else complex(args.t.replace("i", "j"))
        _emit_tensor(args, dim2_limit_family(param), BilinearForm.hyperbolic())
    return 0


def cmd_dims(args) -> int:
    if args.n < 1:
        raise UsageError("--n must be positive")
    rows = ["n,dim_Y,dim_Z,dim_Z_minus_dim_Y"]
    for n, y, z in dimension_table(args.n):
        rows.append(f"{n},{y},{z},{z - y}")
    _write(args, "\n".join(rows) + "\n")
    return 0


def cmd_algebra(args) -> int:
    a = _load_algebra(args)
    if args.action == "unit":
        u = find_unit(a)
        _report(args, {
            "dim": a.dim,
            "unit": None if u is None else _vector_out(u),
            "invertible_multiplication": is_invertibility_locus(a, seed=args.seed),
        })
        return 0 if u is not None else 1
    if args.action == "nilpotent":
        nil = is_nilpotent(a)
        _report(args, {"dim": a.dim, "nilpotent": nil})
        return 0 if nil else 1
    dec = local_decomposition(a, args.seed, _tol(args), args.cluster_tol)
    blocks = [
        {
            "kind": b.kind,
            "dim": b.dim,
            "unit": _vector_out(b.unit),
            "basis": [_vector_out(col) for col in b.basis.T],
        }
        for b in dec.blocks
    ]
    nil = {"kind": "nilpotent", "dim": dec.nilpotent.shape[1],
           "basis": [_vector_out(col) for col in dec.nilpotent.T]}
    problems = dec.verify(a)
    _report(args, {"dim": a.dim, "blocks": blocks, "nilpotent": nil, "problems": problems})
    return 0 if not problems else 1


def cmd_unitalize(args) -> int:
    kind, obj = _load(args)
    if kind == "tensor":
        t, f = obj
        a = algebra_from_tensor(t, f)
        ua = unitalize(a)
        _emit_tensor(args, ua.total.to_tensor(), ua.total.form)
    else:
        _emit_algebra(args, unitalize(obj).total)
    return 0


def cmd_deunitalize(args) -> int:
    kind, obj = _load(args)
    a = obj if kind == "algebra" else algebra_from_tensor(*obj)
    d = deunitalize(a)
    if kind == "tensor" and d.algebra.dim and d.algebra.form.nondegenerate:
        _emit_tensor(args, d.algebra.to_tensor(), d.algebra.form)
    else:
        _emit_algebra(args, d.algebra)
    return 0


def cmd_tangent(args) -> int:
    kind, obj = _load(args)
    if kind != "tensor":
        raise UsageError("tangent-dim expects a symtensor3-v1 file")
    t, f = obj
    rep = tangent_dim(t, f, _tol(args))
    _report(args, {
        "base_dim": rep.base_dim,
        "ambient_dim": rep.ambient_dim,
        "tangent_dim": rep.tangent_dim,
        "expected_Y_dim": rep.expected_Y_dim,
        "excess": rep.excess,
        "in_X": rep.in_X,
        "label": rep.label,
    })
    return 0


def cmd_hilbert(args) -> int:
    a = _load_algebra(args)
    if args.action == "ideal":
        ib = ideal_extraction(a, args.degree)
        _report(args, {
            "dim": a.dim,
            "max_degree": ib.basis.max_degree,
            "quotient_dim": ib.codim,
            "generators": ib.as_strings(),
        })
        return 0
    if args.action == "hf":
        _report(args, {"dim": a.dim, "hilbert_function": hilbert_function(a)})
        return 0
    cert = is_gorenstein(a)
    _report(args, {"dim": a.dim, **cert.to_dict()})
    return 0 if cert.gorenstein else 1


def cmd_demo(args) -> int:
    tensor, form, report = counterexample_pipeline()
    if args.out not in (None, "-"):
        _emit_tensor(args, tensor, None if form.is_identity else form, path=args.out)
    data = {"tensor_dim": tensor.dim, **report.to_dict()}
    if args.out not in (None, "-"):
        data["tensor_file"] = args.out
    args_out, args.out = args.out, None
    try:
        _report(args, data)
    finally:
        args.out = args_out
    return 0 if report.ok else 1


# --------------------------------------------------------------------------
# parser


def _common_flags(suppress: bool) -> argparse.ArgumentParser:
    """Global flags; subcommands get them with suppressed defaults so values
    given before the subcommand survive."""
    common = argparse.ArgumentParser(add_help=False)

    def d(value):
        return argparse.SUPPRESS if suppress else value

    common.add_argument("--tol", type=float, default=d(DEFAULT_TOL), help="float-mode zero threshold")
    common.add_argument("--cluster-tol", type=float, default=d(DEFAULT_CLUSTER_TOL),
                        help="eigenvalue clustering threshold")
    common.add_argument("--seed", type=int, default=d(0), help="seed for every random choice")
    common.add_argument("--mode", choices=("exact", "float"), default=d("exact"))
    common.add_argument("--in", dest="input", default=d(None), help="input file (default stdin)")
    common.add_argument("--out", default=d(None), help="output file (default stdout)")
    common.add_argument("--json", action="store_true", default=d(False), help="machine-readable report")
    return common


def build_parser() -> argparse.ArgumentParser:
    top = _common_flags(False)
    common = _common_flags(True)

    parser = argparse.ArgumentParser(
        prog="odecoquad",
        description="Odeco tensors, Robeva's equations and their algebras.",
        parents=[top],
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="residuals and membership verdicts")
    p.add_argument("--variety", choices=("X", "Z"), default="X")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("gen", parents=[common], help="generate a tensor")
    gen = p.add_subparsers(dest="family", required=True)
    g = gen.add_parser("odeco", parents=[common])
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--k", type=int, default=None)
    g = gen.add_parser("isotropic", parents=[common])
    g.add_argument("--n", type=int, required=True)
    g = gen.add_parser("cw", parents=[common])
    g.add_argument("--n", type=int, required=True)
    g = gen.add_parser("limit", parents=[common])
    g.add_argument("--t", required=True, help="nonzero parameter, e.g. 1/2")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("dims", parents=[common], help="CSV table of dim Y and dim Z")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_dims)

    p = sub.add_parser("algebra", parents=[common], help="unit, nilpotency, decomposition")
    p.add_argument("action", choices=("unit", "nilpotent", "decompose"))
    p.set_defaults(func=cmd_algebra)

    p = sub.add_parser("unitalize", parents=[common], help="adjoin a unit and a socle vector")
    p.set_defaults(func=cmd_unitalize)

    p = sub.add_parser("deunitalize", parents=[common], help="invert the unitalisation")
    p.set_defaults(func=cmd_deunitalize)

    p = sub.add_parser("tangent-dim", parents=[common], help="Zariski tangent space dimension")
    p.set_defaults(func=cmd_tangent)

    p = sub.add_parser("hilbert", parents=[common], help="presentation, Hilbert function, Gorenstein test")
    p.add_argument("action", choices=("ideal", "hf", "gorenstein"))
    p.add_argument("--degree", type=int, default=None)
    p.set_defaults(func=cmd_hilbert)

    p = sub.add_parser("demo", parents=[common], help="worked constructions")
    p.add_argument("name", choices=("counterexample",))
    p.set_defaults(func=cmd_demo)
    return parser


_INPUT_ERRORS = (FormatError, UsageError, DegenerateForm, OSError, json.JSONDecodeError)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) if exc.code in (0, None) else 2
    try:
        return args.func(args)
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OdecoError as exc:
        print(f"failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

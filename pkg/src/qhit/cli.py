"""Command-line front end: channel-spec files in, deterministic reports out.

Subcommands
-----------
validate   parse a spec file and print channel diagnostics
hitting    mean hitting time to the goal subspace, by one or all routes
ginverse   group inverse or Hunter-family g-inverse of I - Phi, with residuals
sweep      tau over a grid of mixing probabilities, with the p -> 0 limit

Spec files are JSON.  Complex entries are written as [re, im] pairs; plain
numbers are taken as reals.  Exit codes: 0 success, 2 validation failure,
3 no applicable method, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import ginverse as ginv
from .channel import (GoalSubspace, KrausChannel, assumption_one_holds,
                      diagnose, is_density, pure_density, randomize,
                      represent, unitary_superop)
from .errors import (NoGroupInverseError, NumericalError, QhitError,
                     SpectralObstructionError, ValidationError)
from .ksmh import kernel_limit_study, tau_channel
from .matrep import SuperOp
from .qmc import induce

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NO_METHOD = 3
EXIT_NUMERICAL = 4

# CLI method names -> internal route names
METHOD_ALIASES = {
    "series": "series",
    "analytic": "analytic-K",
    "ksmh-g": "ksmh-ginverse",
    "ksmh-group": "ksmh-group",
}


class SpecError(ValidationError):
    """Spec-file problem, annotated with the JSON path of the offending node."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


# ----------------------------------------------------------------- parsing

def _entry(x, path: str) -> complex:
    if isinstance(x, (int, float)):
        return complex(x)
    if (isinstance(x, list) and len(x) == 2
            and all(isinstance(v, (int, float)) for v in x)):
        return complex(x[0], x[1])
    raise SpecError(path, "expected a number or an [re, im] pair")


def parse_matrix(node, path: str) -> np.ndarray:
    if not isinstance(node, list) or not node or not isinstance(node[0], list):
        raise SpecError(path, "expected a matrix (list of rows)")
    rows = []
    for i, row in enumerate(node):
        if not isinstance(row, list):
            raise SpecError(f"{path}[{i}]", "expected a row (list)")
        rows.append([_entry(x, f"{path}[{i}][{j}]") for j, x in enumerate(row)])
    if len({len(r) for r in rows}) != 1:
        raise SpecError(path, "rows have unequal lengths")
    return np.array(rows, dtype=np.complex128)


def parse_vector(node, path: str) -> np.ndarray:
    if not isinstance(node, list):
        raise SpecError(path, "expected a vector (list)")
    return np.array([_entry(x, f"{path}[{i}]") for i, x in enumerate(node)],
                    dtype=np.complex128)


def parse_channel(node, path: str = "$") -> SuperOp:
    if not isinstance(node, dict):
        raise SpecError(path, "expected an object")
    kind = node.get("kind")
    if kind == "kraus":
        ops = node.get("kraus")
        if not isinstance(ops, list) or not ops:
            raise SpecError(f"{path}.kraus", "expected a nonempty list of matrices")
        mats = [parse_matrix(m, f"{path}.kraus[{i}]") for i, m in enumerate(ops)]
        dim = int(node.get("dim", mats[0].shape[0]))
        return represent(KrausChannel(dim, tuple(mats)))
    if kind == "unitary":
        if "unitary" not in node:
            raise SpecError(f"{path}.unitary", "missing")
        return unitary_superop(parse_matrix(node["unitary"], f"{path}.unitary"))
    if kind == "superop":
        if "superop" not in node:
            raise SpecError(f"{path}.superop", "missing")
        M = parse_matrix(node["superop"], f"{path}.superop")
        n = round(M.shape[0] ** 0.5)
        if n * n != M.shape[0] or M.shape[0] != M.shape[1]:
            raise SpecError(f"{path}.superop", "must be square of order n^2")
        return SuperOp(n, M)
    if kind == "randomization":
        mix = node.get("mix")
        if not isinstance(mix, dict):
            raise SpecError(f"{path}.mix", "expected an object {p, left, right}")
        for key in ("p", "left", "right"):
            if key not in mix:
                raise SpecError(f"{path}.mix.{key}", "missing")
        left = parse_channel(mix["left"], f"{path}.mix.left")
        right = parse_channel(mix["right"], f"{path}.mix.right")
        return randomize(left, right, float(mix["p"]))
    raise SpecError(f"{path}.kind",
                    "expected one of kraus | unitary | superop | randomization")


def parse_subspace(node, dim: int, path: str = "$.subspace") -> GoalSubspace:
    if not isinstance(node, list) or not node:
        raise SpecError(path, "expected a nonempty list of basis vectors")
    vecs = [parse_vector(v, f"{path}[{i}]") for i, v in enumerate(node)]
    return GoalSubspace.from_vectors(vecs, ambient_dim=dim)


def parse_state(node, dim: int, path: str = "$.initial_state") -> np.ndarray:
    if isinstance(node, list) and node and isinstance(node[0], list):
        rho = parse_matrix(node, path)
    else:
        rho = pure_density(parse_vector(node, path))
    if rho.shape != (dim, dim):
        raise SpecError(path, f"state must act on dimension {dim}")
    if not is_density(rho, tol=1e-8):
        raise SpecError(path, "not a density matrix")
    return rho


def load_spec(filename: str) -> dict:
    try:
        with open(filename, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise SpecError("$", f"cannot read spec file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecError("$", f"invalid JSON: {exc}") from exc


# --------------------------------------------------------------- formatting

def _fmt(x: float) -> float:
    """Round-trip through 12 significant digits for stable output."""
    return float(f"{float(x):.12g}")


def _jreal(x) -> float:
    return _fmt(np.real(x))


def _jcomplex(z) -> list:
    z = complex(z)
    return [_fmt(z.real), _fmt(z.imag)]


def _jmatrix(M) -> list:
    M = np.asarray(M, dtype=np.complex128)
    return [[_jcomplex(z) for z in row] for row in M]


def emit(report: dict, as_json: bool) -> None:
    if as_json:
        sys.stdout.write(json.dumps(report, indent=2) + "\n")
        return
    _emit_text(report, indent="")


def _emit_text(node, indent: str, key: str | None = None) -> None:
    label = f"{indent}{key}: " if key is not None else indent
    if isinstance(node, dict):
        if key is not None:
            sys.stdout.write(f"{indent}{key}:\n")
        for k, v in node.items():
            _emit_text(v, indent + ("  " if key is not None else ""), k)
    elif (isinstance(node, list) and node and isinstance(node[0], list)
          and node[0] and isinstance(node[0][0], list)):
        # matrix of [re, im] pairs
        sys.stdout.write(f"{indent}{key}:\n")
        for row in node:
            cells = []
            for re, im in row:
                cells.append(f"{re:.12g}" if im == 0 else f"{re:.12g}{im:+.12g}j")
            sys.stdout.write(indent + "  " + "  ".join(f"{c:>16s}" for c in cells) + "\n")
    elif isinstance(node, list) and node and isinstance(node[0], dict):
        sys.stdout.write(f"{indent}{key}:\n")
        for item in node:
            cells = (f"{k}={v:.12g}" if isinstance(v, float) else f"{k}={v}"
                     for k, v in item.items())
            sys.stdout.write(indent + "  - " + "  ".join(cells) + "\n")
    elif isinstance(node, float):
        sys.stdout.write(f"{label}{node:.12g}\n")
    else:
        sys.stdout.write(f"{label}{node}\n")


# -------------------------------------------------------------- subcommands

def _diagnostics_dict(S: SuperOp, V: GoalSubspace | None) -> dict:
    d = diagnose(S)
    out = {
        "is_trace_preserving": d.is_trace_preserving,
        "tp_defect": _fmt(d.tp_defect),
        "is_unital": d.is_unital,
        "fixed_space_dim": d.fixed_space_dim,
        "is_irreducible": d.is_irreducible,
        "jordan_trivial_at_1": d.jordan_trivial_at_1,
        "peripheral_eigenvalues": [_jcomplex(z) for z in d.peripheral_eigenvalues],
        "fixed_density_min_eig": _fmt(d.fixed_density_min_eig),
    }
    if V is not None:
        holds, eigs = assumption_one_holds(S, V)
        out["assumption_one"] = {
            "holds": bool(holds),
            "offending_eigenvalues": [_jcomplex(z) for z in eigs
                                      if abs(z - 1.0) < 1e-9],
        }
    return out


def cmd_validate(args) -> int:
    spec = load_spec(args.spec)
    try:
        S = parse_channel(spec)
        V = parse_subspace(spec["subspace"], S.dim) if "subspace" in spec else None
    except QhitError as exc:
        emit({"command": "validate", "input": args.spec, "valid": False,
              "error": str(exc)}, args.json)
        return EXIT_VALIDATION
    report = {"command": "validate", "input": args.spec, "valid": True,
              "dim": S.dim, "diagnostics": _diagnostics_dict(S, V)}
    emit(report, args.json)
    return EXIT_OK


def cmd_hitting(args) -> int:
    spec = load_spec(args.spec)
    S = parse_channel(spec)
    if "subspace" not in spec:
        raise SpecError("$.subspace", "missing (required by hitting)")
    if "initial_state" not in spec:
        raise SpecError("$.initial_state", "missing (required by hitting)")
    V = parse_subspace(spec["subspace"], S.dim)
    rho = parse_state(spec["initial_state"], S.dim)

    names = list(METHOD_ALIASES) if args.method == "all" else [args.method]
    results = {}
    taus = {}
    for name in names:
        try:
            rep = tau_channel(S, V, rho, METHOD_ALIASES[name],
                              keep_artifacts=args.dump_intermediates)
        except (SpectralObstructionError, NoGroupInverseError, NumericalError) as exc:
            results[name] = {"ok": False, "tau": None, "detail": str(exc)}
            continue
        entry = {
            "ok": bool(rep.ok),
            "tau": (None if rep.tau is None
                    else ("inf" if np.isinf(rep.tau) else _fmt(rep.tau))),
            "preconditions": {k: (bool(v) if isinstance(v, (bool, np.bool_))
                                  else _fmt(v))
                              for k, v in rep.preconditions.items()},
        }
        if rep.detail:
            entry["detail"] = rep.detail
        if args.dump_intermediates:
            mats = {k: _jmatrix(v) for k, v in rep.artifacts.items()
                    if isinstance(v, np.ndarray)}
            if mats:
                entry["intermediates"] = mats
        results[name] = entry
        if rep.ok and rep.tau is not None and np.isfinite(rep.tau):
            taus[name] = rep.tau

    report = {"command": "hitting", "input": args.spec, "methods": results}
    if len(taus) >= 2:
        vals = list(taus.values())
        spread = max(vals) - min(vals)
        report["agreement"] = {
            "methods_succeeded": sorted(taus),
            "max_delta": _fmt(spread),
        }
    emit(report, args.json)
    return EXIT_OK if taus else EXIT_NO_METHOD


def _parse_cli_vector(text: str, name: str) -> np.ndarray:
    try:
        node = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"--{name}", f"invalid JSON: {exc}") from exc
    return parse_vector(node, f"--{name}")


def cmd_ginverse(args) -> int:
    spec = load_spec(args.spec)
    S = parse_channel(spec)
    if "subspace" in spec:
        V = parse_subspace(spec["subspace"], S.dim)
        q = induce(S, V)
        A = np.eye(q.dim) - q.rep
        scope = "induced-qmc"
    else:
        q = None
        A = np.eye(S.dim**2) - S.mat
        scope = "channel"

    report = {"command": "ginverse", "input": args.spec, "scope": scope,
              "kind": args.kind}
    if args.kind == "group":
        gs = ginv.group_inverse(A)
        G = gs.Asharp
        report["index"] = gs.index
        report["residuals"] = {
            "AGA-A": _fmt(np.max(np.abs(A @ G @ A - A))),
            "GAG-G": _fmt(np.max(np.abs(G @ A @ G - G))),
            "AG-GA": _fmt(np.max(np.abs(A @ G - G @ A))),
        }
        report["Asharp"] = _jmatrix(G)
    else:  # hunter
        if q is None:
            raise SpecError("$.subspace",
                            "missing (the Hunter family acts on the induced QMC)")
        kw = {}
        for name in ("t", "u", "f", "g"):
            val = getattr(args, name)
            if val is not None:
                kw[name] = _parse_cli_vector(val, name)
        if "t" in kw or "g" in kw:
            gi = ginv.hunter_ginverse(q, **kw)
        else:
            gi = ginv.hunter_special(q, u=kw.get("u"), f=kw.get("f"))
        G = gi.G
        report["residuals"] = {"AGA-A": _fmt(np.max(np.abs(A @ G @ A - A)))}
        report["G"] = _jmatrix(G)
    emit(report, args.json)
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec = load_spec(args.spec)
    if spec.get("kind") != "randomization":
        raise SpecError("$.kind", "sweep requires a randomization spec")
    if args.param != "p":
        raise SpecError("--param", "only the mixing probability p is sweepable")
    mix = spec.get("mix")
    if not isinstance(mix, dict):
        raise SpecError("$.mix", "expected an object {p, left, right}")
    left = parse_channel(mix["left"], "$.mix.left")
    right = parse_channel(mix["right"], "$.mix.right")
    if "subspace" not in spec:
        raise SpecError("$.subspace", "missing (required by sweep)")
    V = parse_subspace(spec["subspace"], left.dim)
    rho = (parse_state(spec["initial_state"], left.dim)
           if "initial_state" in spec else None)
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError as exc:
        raise SpecError("--values", f"expected comma-separated floats: {exc}") from exc
    if not values:
        raise SpecError("--values", "empty")

    study = kernel_limit_study(left, right, V, values, rho=rho)
    rows = [{"p": _fmt(pt.p), "tau": _fmt(pt.tau), "g_norm": _fmt(pt.g_norm)}
            for pt in study.points]
    n2 = V.ambient_dim**2
    rho_eff = rho if rho is not None else _default_rho(V)
    tau_ext = np.vdot(np.eye(V.ambient_dim).reshape(-1),
                      study.H0_extrapolated[:n2, n2:] @ rho_eff.reshape(-1)).real
    report = {
        "command": "sweep", "input": args.spec, "param": "p",
        "table": rows,
        "extrapolated_p0": {"tau": _fmt(tau_ext)},
        "direct_p0": {"tau": _fmt(study.tau_direct)},
        "g_norms_diverge": bool(study.g_norms_diverge),
        "kernel_limit_defect": _fmt(study.extrapolation_defect),
    }
    emit(report, args.json)
    return EXIT_OK


def _default_rho(V: GoalSubspace) -> np.ndarray:
    rho = V.Q @ (np.eye(V.ambient_dim) / V.ambient_dim) @ V.Q
    return rho / np.trace(rho).real


# -------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qhit",
                                description="Hitting times of quantum channels")
    p.add_argument("--tol", type=float, default=None,
                   help="override the default comparison tolerance (advisory)")
    sub = p.add_subparsers(dest="cmd", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("spec", help="JSON channel spec file")
    common.add_argument("--json", action="store_true",
                        help="machine-readable JSON output")

    sp = sub.add_parser("validate", parents=[common],
                        help="validate a spec and print diagnostics")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("hitting", parents=[common],
                        help="mean hitting time to the goal subspace")
    sp.add_argument("--method", default="all",
                    choices=["all", *METHOD_ALIASES])
    sp.add_argument("--dump-intermediates", action="store_true")
    sp.set_defaults(func=cmd_hitting)

    sp = sub.add_parser("ginverse", parents=[common],
                        help="generalized inverse of I - Phi")
    sp.add_argument("--kind", default="group", choices=["group", "hunter"])
    for name in ("t", "u", "f", "g"):
        sp.add_argument(f"--{name}", default=None,
                        help=f"JSON vector for Hunter parameter {name}")
    sp.set_defaults(func=cmd_ginverse)

    sp = sub.add_parser("sweep", parents=[common],
                        help="tau over a grid of mixing probabilities")
    sp.add_argument("--param", default="p")
    sp.add_argument("--values", required=True,
                    help="comma-separated values, e.g. 1,0.5,0.1")
    sp.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SpecError, ValidationError) as exc:
        sys.stderr.write(f"validation error: {exc}\n")
        return EXIT_VALIDATION
    except (SpectralObstructionError, NoGroupInverseError) as exc:
        sys.stderr.write(f"no applicable method: {exc}\n")
        return EXIT_NO_METHOD
    except (NumericalError, QhitError, np.linalg.LinAlgError) as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())

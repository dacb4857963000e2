"""Command line: ``dgendo [flags] <command> key=value ...``.

Exit status: 0 when every verdict passes (or the command is informational),
1 when a verdict fails, 2 for usage and parse errors, 3 for invariant
violations in the inputs."""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .algebra import AlgebraError, find_isomorphism, resolve, syzygy
from .complexes import (
    ComplexError,
    chain_map_ranks,
    cone,
    cone_exactness,
    hom_complex,
    homology_dims,
    homotopy_hom,
    resolution_complex,
)
from .dg import DGError, WindowTooSmall, canonical_bimodule_maps, cohomology_ring, end_dg_algebra, lemma35_map, validate
from .equivalence import (
    NotProjectiveTerm,
    auslander_yoneda,
    left_approximation,
    standard_equiv_tensor_map,
    theorem41_pipeline,
    tilting_selforthogonality,
    verify_approximation,
)
from .examples import ExampleError, example_dugas, example_nakayama
from .linalg import FieldError, FieldSpec
from .report import Report, emit, emit_structured
from .workspace import InvariantError, ParseError, Workspace, load_workspace, save_workspace

COMMANDS = ("homology", "hom-complex", "k-hom", "cone", "approximate", "verify-approx", "end-dg", "hstar",
            "quasi-iso", "canonical-maps", "lemma35", "thm41", "tilting-check", "yoneda", "tensor-map",
            "example", "resolve", "syzygy")
EXAMPLES = ("dugas", "nakayama")


class UnknownCommand(ValueError):
    pass


class UsageError(ValueError):
    pass


def parse_window(text: str) -> tuple[int, int]:
    """``a..b`` (inclusive) or a single integer."""
    text = str(text).strip()
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(text)
    except ValueError:
        raise UsageError(f"bad window {text!r}; expected a..b") from None
    if lo > hi:
        raise UsageError(f"empty window {text!r}")
    return lo, hi


def parse_bool(text) -> bool:
    t = str(text).lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"bad boolean {text!r}")


class Args:
    """key=value arguments with typed accessors and workspace lookups."""

    def __init__(self, pairs: dict, ws: Workspace, defaults: dict):
        self.pairs = dict(pairs)
        self.ws = ws
        self.defaults = defaults
        self.used = set()

    def raw(self, key, default=None, required=True):
        if key in self.pairs:
            self.used.add(key)
            return self.pairs[key]
        if default is not None or not required:
            return default
        raise UsageError(f"missing argument {key}=...")

    def int(self, key, default=None):
        v = self.raw(key, default)
        try:
            return int(v)
        except (TypeError, ValueError):
            raise UsageError(f"{key} must be an integer") from None

    def bool(self, key, default=False):
        return parse_bool(self.raw(key, default))

    def window(self, key="window", fallback=None):
        v = self.raw(key, required=False)
        if v is not None:
            return parse_window(v)
        if self.defaults.get("window") is not None:
            return self.defaults["window"]
        if fallback is not None:
            return fallback
        raise UsageError(f"missing {key}=a..b (or --window)")

    def length(self, key="L", fallback=None):
        v = self.raw(key, required=False)
        if v is not None:
            return self.int(key)
        if self.defaults.get("length") is not None:
            return self.defaults["length"]
        if fallback is not None:
            return fallback
        raise UsageError(f"missing {key}=<int> (or --length)")

    def obj(self, key, kind):
        name = self.raw(key)
        try:
            return self.ws.get(str(name), kind)
        except KeyError as e:
            raise UsageError(f"{key}: {e.args[0]}") from None

    def unused(self):
        return sorted(set(self.pairs) - self.used)


# ---------------------------------------------------------------- handlers


def _all(checks) -> bool:
    return all(bool(v) for v in checks.values())


def cmd_homology(a: Args) -> Report:
    C = a.obj("C", "complex")
    if "n" in a.pairs:
        degs = [a.int("n")]
    else:
        degs = range(*_incl(a.window(fallback=(C.lo, C.hi))))
    return Report(data={"homology_dims": homology_dims(C.space(), degs)})


def _incl(w):
    return w[0], w[1] + 1


def cmd_hom_complex(a: Args) -> Report:
    X, Y = a.obj("X", "complex"), a.obj("Y", "complex")
    H = hom_complex(X, Y)
    degs = range(*_incl(a.window(fallback=(H.lo, H.hi))))
    return Report(data={"term_dims": {n: H.dim(n) for n in degs}, "homology_dims": homology_dims(H, degs)})


def cmd_k_hom(a: Args) -> Report:
    X, Y = a.obj("X", "complex"), a.obj("Y", "complex")
    H = hom_complex(X, Y)
    if "n" in a.pairs:
        degs = [a.int("n")]
    else:
        degs = range(*_incl(a.window(fallback=(H.lo, H.hi))))
    return Report(data={"khom_dims": {n: homotopy_hom(X, Y, n, H).dim for n in degs}})


def cmd_cone(a: Args) -> Report:
    f = a.obj("f", "map")
    cn = cone(f)
    checks = {"g_chain_map": cn.g.is_chain_map(), "h_chain_map": cn.h.is_chain_map(),
              "g_after_f_null_homotopic": cn.r.verify()}
    les = cone_exactness(f, cn)
    checks["long_exact_sequence"] = all(all(v.values()) for v in les.values())
    C = cn.complex
    return Report(verdict=_all(checks), data={
        "cone_dims": {n: C.dim(n) for n in C.degrees()}, "checks": checks,
        "exactness": {n: v for n, v in les.items()}})


def cmd_approximate(a: Args) -> Report:
    X, M = a.obj("X", "complex"), a.obj("M", "complex")
    W = a.window()
    res = left_approximation(X, M, W, prune=a.bool("prune", True))
    return Report(verdict=res.check.passed, data={
        "shifts": res.shifts, "multiplicities": res.multiplicities,
        "candidate_shifts": res.candidate_shifts, "target_dims": {n: res.target.dim(n) for n in res.target.degrees()},
        "check": res.check})


def cmd_verify_approx(a: Args) -> Report:
    f, M = a.obj("f", "map"), a.obj("M", "complex")
    side = a.raw("side", "left")
    if side not in ("left", "right"):
        raise UsageError("side must be left or right")
    chk = verify_approximation(f, M, a.window(), side)
    return Report(verdict=chk.passed, data={"check": chk})


def cmd_end_dg(a: Args) -> Report:
    X = a.obj("X", "complex")
    L = end_dg_algebra(X)
    reps = validate(L)
    return Report(verdict=all(r.passed for r in reps), data={
        "lo": L.lo, "dims": {n: L.dim(n) for n in L.degrees()},
        "checks": {r.name: r.passed for r in reps}})


def cmd_hstar(a: Args) -> Report:
    X = a.obj("X", "complex")
    L = end_dg_algebra(X)
    W = a.window(fallback=(L.lo, L.hi))
    degs = list(range(*_incl(W)))
    ring = cohomology_ring(L, degs)
    H = L.extra["hom"]
    khom = {n: homotopy_hom(X, X, n, H).dim for n in degs}
    hdims = {n: ring.dim(n) for n in degs}
    assoc = ring.check()
    agree = hdims == khom
    return Report(verdict=agree and _ok(assoc), data={
        "hstar_dims": hdims, "khom_dims": khom, "dims_agree": agree, "associative": _ok(assoc)})


def _ok(check) -> bool:
    if isinstance(check, bool):
        return check
    if hasattr(check, "passed"):
        return bool(check.passed)
    if isinstance(check, (list, tuple)):
        return all(_ok(c) for c in check)
    return check is None


def cmd_quasi_iso(a: Args) -> Report:
    f = a.obj("f", "map")
    if f.degree != 0 or not f.is_chain_map():
        return Report(verdict=False, data={"chain_map": False})
    window = a.window(fallback=None) if ("window" in a.pairs or a.defaults.get("window")) else None
    ranks = chain_map_ranks(f, window)
    ok = all(r["source"] == r["target"] == r["rank"] for r in ranks.values())
    return Report(verdict=ok, data={"chain_map": True, "ranks": ranks})


def cmd_canonical_maps(a: Args) -> Report:
    Y = a.obj("Y", "bimodule_complex")
    c = canonical_bimodule_maps(Y)
    left = {r.name: r.passed for r in c.left_checks}
    right = {r.name: r.passed for r in c.right_checks}
    ok = _all(left) and _all(right) and c.left_verdict.passed and c.right_verdict.passed
    return Report(verdict=ok, data={"left": {"dg_algebra_map": left, "verdict": c.left_verdict},
                                    "right": {"dg_algebra_map": right, "verdict": c.right_verdict}})


def cmd_lemma35(a: Args) -> Report:
    X, Y, Z = (a.obj(k, "complex") for k in ("X", "Y", "Z"))
    r = lemma35_map(X, Y, Z)
    return Report(verdict=r.chain_map and r.verdict.passed, data={"chain_map": r.chain_map, "verdict": r.verdict})


def cmd_thm41(a: Args) -> Report:
    X, M = a.obj("X", "complex"), a.obj("M", "complex")
    rep = theorem41_pipeline(X, M, a.window())
    return Report(verdict=rep.passed, data=rep.as_dict())


def cmd_tilting(a: Args) -> Report:
    T = a.obj("T", "complex")
    rep = tilting_selforthogonality(T, a.window(), assume_projective=a.bool("assume_projective", False))
    return Report(verdict=rep.passed, data=rep.as_dict())


def cmd_yoneda(a: Args) -> Report:
    N = a.obj("N", "module")
    if "A" in a.pairs:
        A = a.obj("A", "algebra")
        if N.algebra is not A:
            raise UsageError("N is not a module over A")
    phi = a.window("phi")
    Y = auslander_yoneda(N, phi, a.length(), minimal=a.bool("minimal", True))
    return Report(verdict=bool(Y.ideal_ok), data=Y.as_dict())


def cmd_tensor_map(a: Args) -> Report:
    Y = a.obj("Y", "bimodule_complex")
    P = a.obj("P", "complex")
    res = standard_equiv_tensor_map(Y, P)
    return Report(verdict=res.passed, data=res.as_dict())


def cmd_resolve(a: Args) -> Report:
    M = a.obj("M", "module")
    L = a.length()
    R = resolve(M, L, minimal=a.bool("minimal", True))
    P = resolution_complex(R)
    H = homology_dims(P.space())
    top = P.hi
    # exact below the top, cokernel of the last map is M
    ok = all(d == 0 for n, d in H.items() if P.lo < n < top) and H.get(top, 0) == M.dim
    return Report(verdict=ok, data={"term_dims": {-k: m.dim for k, m in enumerate(R.modules)},
                                    "homology_dims": H, "augmented_exact": ok})


def cmd_syzygy(a: Args) -> Report:
    M = a.obj("M", "module")
    Om = syzygy(M)
    data = {"dim": Om.dim}
    verdict = None
    if "compare" in a.pairs:
        N = a.obj("compare", "module")
        iso = find_isomorphism(Om, N) is not None
        data["isomorphic_to"] = {"module": a.pairs["compare"], "isomorphic": iso}
        verdict = iso
    return Report(verdict=verdict, data=data)


def cmd_example(a: Args, which: str) -> Report:
    field = a.defaults.get("field")
    kw = {"field": field} if field is not None else {}
    if which == "dugas":
        ex = example_dugas(a.int("n", 2), a.int("s", 2), window=a.window(fallback=(-3, 3)), **kw)
        checks, objs = ex.checks, ex.objects()
        data = {"algebra_dim": ex.A.dim, "checks": checks, "left_check": ex.left_check, "right_check": ex.right_check}
    elif which == "nakayama":
        ex = example_nakayama(a.int("n", 3), a.int("r", 1), a.length(fallback=4), **kw)
        checks, objs = ex.checks, ex.objects()
        data = {"algebra_dim": ex.A.dim, "checks": checks,
                "resolution_dims": {name: [m.dim for m in R.modules]
                                    for name, R in ((f"X{ex.r}", ex.resolution_r), (f"X{ex.n - ex.r}", ex.resolution_s))}}
    else:
        raise UnknownCommand(f"unknown example {which!r}; choose from {', '.join(EXAMPLES)}")
    save = a.raw("save", required=False)
    if save:
        ws = Workspace(ex.A.field)
        for name, obj in objs.items():
            ws.add(name, obj)
        save_workspace(ws, save)
        data["saved"] = {"path": save, "objects": list(objs)}
    return Report(verdict=_all(checks), data=data)


HANDLERS = {
    "homology": cmd_homology, "hom-complex": cmd_hom_complex, "k-hom": cmd_k_hom, "cone": cmd_cone,
    "approximate": cmd_approximate, "verify-approx": cmd_verify_approx, "end-dg": cmd_end_dg, "hstar": cmd_hstar,
    "quasi-iso": cmd_quasi_iso, "canonical-maps": cmd_canonical_maps, "lemma35": cmd_lemma35, "thm41": cmd_thm41,
    "tilting-check": cmd_tilting, "yoneda": cmd_yoneda, "tensor-map": cmd_tensor_map, "resolve": cmd_resolve,
    "syzygy": cmd_syzygy,
}


def split_pairs(tokens) -> dict:
    out = {}
    for t in tokens:
        if "=" not in t:
            raise UsageError(f"expected key=value, got {t!r}")
        k, v = t.split("=", 1)
        if not k:
            raise UsageError(f"empty key in {t!r}")
        if k in out:
            raise UsageError(f"argument {k} given twice")
        out[k] = v
    return out


def run_command(ws: Workspace, command: str, args, defaults: dict | None = None) -> Report:
    """Dispatch one command; ``args`` is a dict or a list of key=value tokens."""
    defaults = defaults or {}
    tokens = list(args) if not isinstance(args, dict) else None
    sub = None
    if command == "example":
        if not tokens and not isinstance(args, dict):
            raise UsageError("example needs a name: dugas or nakayama")
        if tokens is not None:
            sub, tokens = tokens[0], tokens[1:]
        else:
            args = dict(args)
            sub = args.pop("name", None)
    pairs = split_pairs(tokens) if tokens is not None else {str(k): str(v) for k, v in args.items()}
    a = Args(pairs, ws, defaults)
    if command == "example":
        rep = cmd_example(a, sub)
        command = f"example {sub}"
    elif command in HANDLERS:
        rep = HANDLERS[command](a)
    else:
        raise UnknownCommand(f"unknown command {command!r}")
    extra = a.unused()
    if extra:
        raise UsageError(f"unused arguments: {', '.join(extra)}")
    rep.command = command
    rep.inputs = dict(sorted(pairs.items()))
    return rep


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dgendo", description="Exact checks for complexes and dg endomorphism algebras.")
    p.add_argument("--workspace", help="workspace file with named objects")
    p.add_argument("--out", help="also write the structured report to this file")
    p.add_argument("--format", choices=("text", "structured"), default="text")
    p.add_argument("--window", help="default shift or degree window a..b")
    p.add_argument("--length", type=int, help="default resolution length")
    p.add_argument("--field", help="Q or Fp:<p> for generated examples")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("command", help=", ".join(c if c != "example" else "example dugas|nakayama" for c in COMMANDS))
    p.add_argument("args", nargs="*", help="key=value arguments")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0) and 2
    try:
        defaults = {"window": parse_window(ns.window) if ns.window else None, "length": ns.length,
                    "field": FieldSpec.parse(ns.field) if ns.field else None}
        ws = load_workspace(ns.workspace) if ns.workspace else Workspace()
        rep = run_command(ws, ns.command, ns.args, defaults)
    except (UsageError, UnknownCommand, ParseError, WindowTooSmall, FieldError, ExampleError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (InvariantError, NotProjectiveTerm, AlgebraError, ComplexError, DGError) as e:
        print(f"invariant violation: {e}", file=sys.stderr)
        return 3
    sys.stdout.write(emit(rep, ns.format))
    if ns.out:
        with open(ns.out, "w", encoding="utf-8") as fh:
            fh.write(emit_structured(rep))
    return 1 if rep.verdict is False else 0


if __name__ == "__main__":
    sys.exit(main())

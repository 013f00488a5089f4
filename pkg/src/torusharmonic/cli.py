"""Command-line front end.

    torusharmonic validate GRAPH.json
    torusharmonic solve GRAPH.json [--tau RE,IM ...] [--oracle] [--svg OUT] [--json OUT]
    torusharmonic oracle GRAPH.json [--seed N] [--json OUT]

Exit codes: 0 ok, 1 internal inconsistency, 2 invalid complex, 3 parse
error, 4 degenerate weights, 5 oracle failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .embedding import (
    conjugate_defect,
    conjugate_embedding,
    delaunay_report,
    dirichlet_energy,
    harmonic_embedding,
)
from .errors import (
    BoundaryEscapeError,
    ConsistencyError,
    DegenerateWeightsError,
    ParseError,
    ResponseMatrixError,
    TorusError,
)
from .moduli import Modulus, energy_at, extract_modulus, response_matrix
from .oracle import minimize_energy
from .solver import build_operators, check_nondegenerate, det_ratio_routes
from .topology import complex_from_dict

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INVALID = 2
EXIT_PARSE = 3
EXIT_DEGENERATE = 4
EXIT_ORACLE = 5

SCHEMA = 1


# ---------------------------------------------------------------------------
# deterministic JSON
# ---------------------------------------------------------------------------


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    if not any(ch in s for ch in ".eEn"):
        s += ".0"
    return s


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float printed to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in seq) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _cpair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------


def parse_tau(text: str) -> Modulus:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected RE,IM but got {text!r}")
    try:
        re_, im_ = float(parts[0]), float(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"non-numeric modulus {text!r}") from None
    if not im_ > 0:
        raise argparse.ArgumentTypeError(f"imaginary part must be positive in {text!r}")
    return Modulus(complex(re_, im_))


class _Failure(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


def _load(path: str):
    raw = Path(path).read_bytes() if Path(path).is_file() else None
    if raw is None:
        raise _Failure(EXIT_PARSE, f"error: cannot read {path}")
    try:
        data = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise _Failure(EXIT_PARSE, f"error: malformed JSON in {path}: {exc}") from None
    try:
        cx, weights = complex_from_dict(data)
    except ParseError as exc:
        raise _Failure(EXIT_PARSE, f"error: {exc}") from None
    return cx, weights, hashlib.sha256(raw).hexdigest()


def _validated(path: str):
    cx, weights, digest = _load(path)
    rep = cx.report
    if not rep.valid:
        raise _Failure(EXIT_INVALID, "invalid toroidal complex:\n" + rep.summary())
    return cx, weights, digest, rep


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------


class _Clock:
    def __init__(self):
        self.marks: dict[str, float] = {}

    def run(self, name, fn, *args, **kw):
        t0 = time.perf_counter()
        out = fn(*args, **kw)
        self.marks[name] = time.perf_counter() - t0
        return out


def _core(cx, weights, digest, rep, taus, clock):
    bundle = build_operators(cx, weights)
    chk = clock.run("nondegeneracy", check_nondegenerate, bundle)
    if not chk:
        raise _Failure(
            EXIT_DEGENERATE,
            f"error: degenerate weights: Gram pivot {chk.failing_index} = {chk.failing_pivot!r} "
            f"(threshold relative to max diagonal {chk.scale!r})",
        )
    try:
        L = clock.run("response", response_matrix, bundle)
        opt = extract_modulus(L)
    except (DegenerateWeightsError, ResponseMatrixError) as exc:
        raise _Failure(EXIT_DEGENERATE, f"error: {exc}") from None
    dets = clock.run("det0", det_ratio_routes, bundle)
    emb = clock.run("embedding", harmonic_embedding, bundle, opt.modulus)
    direct = dirichlet_energy(emb, weights)
    dual = clock.run("conjugate", conjugate_embedding, emb, weights, opt.k)
    delaunay = clock.run("delaunay", delaunay_report, emb, dual, weights, opt.k)
    defect, k_fit = conjugate_defect(dual, opt.modulus)

    energies = []
    for m in taus:
        e_formula = energy_at(opt, m)
        e_direct = dirichlet_energy(harmonic_embedding(bundle, m), weights)
        energies.append(
            {
                "tau": _cpair(m.tau),
                "formula": e_formula,
                "direct": e_direct,
                "relative_difference": abs(e_formula - e_direct) / abs(e_direct) if e_direct else 0.0,
            }
        )

    report = {
        "schema": SCHEMA,
        "input": {
            "sha256": digest,
            "num_vertices": cx.num_vertices,
            "num_edges": cx.num_edges,
            "num_faces": cx.num_faces,
        },
        "validation": rep.to_dict(),
        "nondegenerate": {"ok": True, "min_gram_pivot": chk.min_pivot, "route": "gram_ldl"},
        "response_matrix": {"route": "response", "matrix": L.matrix.tolist()},
        "tau_c": {"response": _cpair(opt.tau)},
        "k_c": {
            "response": opt.k,
            "det_L": float(np.sqrt(L.det)) if L.det > 0 else None,
            "det0": {"eigen": dets.eigen, "reduced": dets.reduced},
            "direct": direct,
        },
        "energies": energies,
        "conjugate": {
            "route": "direct",
            "deck_translations": [_cpair(p) for p in dual.deck],
            "proportionality_defect": defect,
            "fitted_scale": k_fit,
        },
        "delaunay": delaunay.to_dict(),
    }
    return report, bundle, opt, emb, dual


def _oracle_section(cx, weights, opt, seed, tau0, clock):
    try:
        res = clock.run("oracle", minimize_energy, cx, weights, tau0, seed)
    except (BoundaryEscapeError, ConsistencyError) as exc:
        raise _Failure(EXIT_ORACLE, f"error: oracle failed: {exc}") from None
    return {
        "seed": seed,
        "tau_start": _cpair(tau0),
        "tau_star": _cpair(res.tau),
        "energy_star": res.energy,
        "iterations": res.iterations,
        "gradient_norm": res.grad_norm,
        "stop_reasons": [r.stop_reason for r in res.runs],
        "delta_tau": [abs(res.tau.real - opt.tau.real), abs(res.tau.imag - opt.tau.imag)],
        "delta_k_relative": abs(res.energy - opt.k) / opt.k,
    }


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------


def _wrap_segments(starts: np.ndarray, vecs: np.ndarray, t1: complex, t2: complex) -> list[tuple[complex, complex]]:
    """Translate each segment by a lattice vector so its midpoint falls in the fundamental domain."""
    basis = np.array([[t1.real, t2.real], [t1.imag, t2.imag]])
    mids = starts + vecs / 2
    uv = np.linalg.solve(basis, np.vstack([mids.real, mids.imag]))
    shift = np.floor(uv + 1e-12)
    offs = shift[0] * t1 + shift[1] * t2
    a = starts - offs
    return list(zip(a, a + vecs))


def render_svg(emb, dual, size: float = 480.0) -> str:
    m = emb.modulus
    t1, t2 = complex(m.t1), complex(m.t2)
    corners = np.array([0, t1, t1 + t2, t2])
    cx = emb.complex
    primal = _wrap_segments(emb.positions[cx.tails], emb.displacements, t1, t2)
    hd = dual.aligned_to(emb)
    k = hd.k or 1.0
    dcx = hd.complex
    dual_segs = _wrap_segments(hd.positions[dcx.tails] / k, hd.displacements / k, t1, t2)

    pts = np.concatenate([corners] + [np.array(s) for s in primal + dual_segs if s])
    lo_x, hi_x = pts.real.min(), pts.real.max()
    lo_y, hi_y = pts.imag.min(), pts.imag.max()
    span = max(hi_x - lo_x, hi_y - lo_y) or 1.0
    margin = 0.05 * span
    scale = size / (span + 2 * margin)
    width = (hi_x - lo_x + 2 * margin) * scale
    height = (hi_y - lo_y + 2 * margin) * scale

    def xy(z):
        return (z.real - lo_x + margin) * scale, (hi_y - z.imag + margin) * scale

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.2f}" height="{height:.2f}" '
        f'viewBox="0 0 {width:.2f} {height:.2f}">',
        f"<title>{escape(f'tau = {m.re:.6f} + {m.im:.6f}i')}</title>",
    ]
    poly = " ".join("{:.3f},{:.3f}".format(*xy(z)) for z in corners)
    out.append(f'<polygon class="domain" points="{poly}" fill="none" stroke="#888" stroke-width="1"/>')
    for cls, segs, style in (
        ("primal", primal, 'stroke="#1f4e99" stroke-width="1.5"'),
        ("dual", dual_segs, 'stroke="#c0392b" stroke-width="1" stroke-dasharray="4 3"'),
    ):
        out.append(f'<g class="{cls}-edges">')
        for e, (a, b) in enumerate(segs):
            (x1, y1), (x2, y2) = xy(a), xy(b)
            out.append(
                f'<line class="{cls}" data-edge="{e}" x1="{x1:.3f}" y1="{y1:.3f}" '
                f'x2="{x2:.3f}" y2="{y2:.3f}" {style}/>'
            )
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _emit(report: dict, json_path: str | None) -> None:
    text = dumps(report) + "\n"
    if json_path:
        Path(json_path).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_validate(args) -> int:
    cx, _, _ = _load(args.path)
    rep = cx.report
    if rep.valid:
        print(
            f"valid: V={cx.num_vertices} E={cx.num_edges} F={cx.num_faces} "
            f"chi={rep.euler_characteristic} marking degree={rep.marking_degree}"
        )
        return EXIT_OK
    print("invalid toroidal complex:", file=sys.stderr)
    print(rep.summary(), file=sys.stderr)
    return EXIT_INVALID


def cmd_solve(args) -> int:
    clock = _Clock()
    cx, weights, digest, rep = _validated(args.path)
    report, bundle, opt, emb, dual = _core(cx, weights, digest, rep, args.tau or [], clock)
    if args.oracle:
        report["oracle"] = _oracle_section(cx, weights, opt, args.seed, complex(args.tau0.tau), clock)
    if args.svg:
        Path(args.svg).write_text(render_svg(emb, dual))
    if args.timing:
        report["timing_seconds"] = clock.marks
    _emit(report, args.json)
    return EXIT_OK


def cmd_oracle(args) -> int:
    clock = _Clock()
    cx, weights, digest, rep = _validated(args.path)
    report, _, opt, _, _ = _core(cx, weights, digest, rep, [], clock)
    report["oracle"] = _oracle_section(cx, weights, opt, args.seed, complex(args.tau0.tau), clock)
    if args.timing:
        report["timing_seconds"] = clock.marks
    _emit(report, args.json)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="torusharmonic",
        description="Optimal flat torus, harmonic embedding and reciprocal diagram of a weighted toroidal graph.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check that a graph file describes a marked torus")
    v.add_argument("path")
    v.set_defaults(func=cmd_validate)

    def common(sp):
        sp.add_argument("path")
        sp.add_argument("--json", metavar="OUT", help="write the report here instead of stdout")
        sp.add_argument("--seed", type=int, default=0, help="oracle multi-start seed")
        sp.add_argument("--tau0", type=parse_tau, default=Modulus(1j), metavar="RE,IM",
                        help="oracle starting modulus (default 0,1)")
        sp.add_argument("--timing", action="store_true", help="add wall-clock timings (breaks byte-identical output)")

    s = sub.add_parser("solve", help="compute tau_c, k_c, energies and the Delaunay certificate")
    common(s)
    s.add_argument("--tau", type=parse_tau, action="append", metavar="RE,IM",
                   help="evaluate the energy at this modulus; repeatable (use --tau=-0.5,1 for negatives)")
    s.add_argument("--oracle", action="store_true", help="also run the brute-force minimizer")
    s.add_argument("--svg", metavar="OUT", help="draw primal and dual embeddings at tau_c")
    s.set_defaults(func=cmd_solve)

    o = sub.add_parser("oracle", help="brute-force minimization compared with the closed form")
    common(o)
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Failure as exc:
        print(str(exc), file=sys.stderr)
        return exc.code
    except TorusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

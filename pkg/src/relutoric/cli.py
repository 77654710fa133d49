"""Command line interface.

One JSON document per job, rationals as integers or "p/q" strings, reports
with stable key order.  Results go to stdout or --output; diagnostics to
stderr.  Exit codes: 0 success, 2 validation or parse error, 3 criterion
failure under `realize --expect-realizable`.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .errors import DocumentError, RelutoricError
from .exact_math import ratvec
from .divisor import (
    classify_convexity,
    divisor_coefficients,
    ehrhart_volume_estimate,
    intersection_number,
    line_bundle_volume,
    mixed_volume,
    newton_polytope,
    polytope_of_divisor,
    scale_divisor,
    support_of_network,
    wall_curve,
)
from .errors import NotConvexFunction, NotLatticePolytope
from .fan import build_relu_fan, validate_fan, wall_groups
from .jsonio import (
    decode_function,
    decode_network,
    decode_rational,
    decode_vector,
    encode_fan,
    encode_network,
    encode_polytope,
    encode_rational,
    encode_vector,
)
from .network import NeuronId, affine_shift, evaluate, neuron_value, reduce_shallow
from .realizability import criterion_check, synthesize_shallow, verify_up_to_linear
from .svg import render_fan_svg

COMMANDS = ("eval", "fan", "divisor", "intersect", "classify", "polytope",
            "newton", "volume", "reduce", "shift", "realize", "render")


@dataclass
class JobSpec:
    command: str
    document: dict
    output: str | None = None
    svg: str | None = None
    fmt: str = "json"
    m_max: int = 8
    negate: bool = False
    expect_realizable: bool = False


@dataclass
class JobResult:
    payload: dict | None = None
    svg: str | None = None
    exit_code: int = 0


# ---------------------------------------------------------------------------
# input handling
# ---------------------------------------------------------------------------

def _load_inputs(document: dict):
    """Returns (network or None, support function or None)."""
    if not isinstance(document, dict):
        raise DocumentError("input document must be a JSON object")
    if "network" in document:
        return decode_network(document["network"]), None
    if "function" in document:
        return None, decode_function(document["function"])
    if "layers" in document:
        return decode_network(document), None
    if "expr" in document or "fan" in document:
        return None, decode_function(document)
    raise DocumentError("document contains neither a network nor a function")


def _support_of(document: dict):
    net, support = _load_inputs(document)
    if support is None:
        support = support_of_network(net)
    return net, support


def _require_network(document: dict):
    net, _ = _load_inputs(document)
    if net is None:
        raise DocumentError("this command needs a network document")
    return net


# ---------------------------------------------------------------------------
# command handlers
# ---------------------------------------------------------------------------

def _cmd_eval(job: JobSpec) -> JobResult:
    net = _require_network(job.document)
    points = job.document.get("points")
    if not points:
        raise DocumentError("eval needs a nonempty 'points' list")
    neuron = job.document.get("neuron")
    values = []
    for p in points:
        x = decode_vector(p)
        if neuron is not None:
            values.append(neuron_value(net, NeuronId(int(neuron[0]), int(neuron[1])), x))
        else:
            values.append(evaluate(net, x))
    return JobResult({"values": [encode_rational(v) for v in values]})


def _fan_of(document: dict):
    net, support = _load_inputs(document)
    if support is not None:
        return support.fan, support
    return build_relu_fan(net), None


def _cmd_fan(job: JobSpec) -> JobResult:
    fan, _ = _fan_of(job.document)
    report = validate_fan(fan)
    payload = encode_fan(fan)
    payload["complete"] = report.complete
    payload["valid"] = report.valid
    svg = render_fan_svg(fan) if job.svg else None
    return JobResult(payload, svg)


def _cmd_divisor(job: JobSpec) -> JobResult:
    _, support = _support_of(job.document)
    D = divisor_coefficients(support)
    return JobResult({
        "rays": [list(r) for r in support.fan.rays],
        "slopes": [encode_vector(m) for m in support.slopes],
        "ray_coefficients": [encode_rational(a) for a in D.coefficients],
    })


def _cmd_intersect(job: JobSpec) -> JobResult:
    _, support = _support_of(job.document)
    fan = support.fan
    walls = []
    numbers = []
    for wall in fan.walls:
        curve = wall_curve(fan, wall)
        number = intersection_number(support, wall, curve)
        numbers.append(number)
        walls.append({
            "generators": [list(g) for g in wall.generators],
            "cones": list(wall.cones),
            "hyperplane": list(wall.normal),
            "provenance": wall.kind,
            "lift": list(curve.lift),
            "number": encode_rational(number),
        })
    groups = []
    for normal, indices in wall_groups(fan):
        groups.append({
            "hyperplane": list(normal),
            "numbers": [encode_rational(numbers[i]) for i in indices],
            "equal": len({numbers[i] for i in indices}) <= 1,
        })
    return JobResult({"walls": walls, "groups": groups})


def _cmd_classify(job: JobSpec) -> JobResult:
    _, support = _support_of(job.document)
    report = classify_convexity(support)
    return JobResult({
        "convex": report.convex,
        "strictly_convex": report.strictly_convex,
        "concave": report.concave,
        "strictly_concave": report.strictly_concave,
        "basepoint_free": report.convex,
        "ample": report.strictly_convex,
    })


def _cmd_polytope(job: JobSpec) -> JobResult:
    _, support = _support_of(job.document)
    D = divisor_coefficients(support)
    if job.negate or job.document.get("negate"):
        D = scale_divisor(D, -1)
    return JobResult(encode_polytope(polytope_of_divisor(D)))


def _cmd_newton(job: JobSpec) -> JobResult:
    _, support = _support_of(job.document)
    return JobResult(encode_polytope(newton_polytope(support)))


def _cmd_volume(job: JobSpec) -> JobResult:
    _, support = _support_of(job.document)
    D = divisor_coefficients(support)
    neg = scale_divisor(D, -1)
    P = polytope_of_divisor(neg)
    payload = {
        "polytope": encode_polytope(P),
        "line_bundle_volume": encode_rational(line_bundle_volume(neg)),
        "m_max": job.m_max,
    }
    try:
        payload["newton_volume"] = encode_rational(mixed_volume(newton_polytope(support)))
    except NotConvexFunction:
        payload["newton_volume"] = None
    try:
        payload["ehrhart"] = [encode_rational(v)
                              for v in ehrhart_volume_estimate(P, job.m_max)]
    except NotLatticePolytope:
        payload["ehrhart"] = None
    return JobResult(payload)


def _cmd_reduce(job: JobSpec) -> JobResult:
    net = _require_network(job.document)
    return JobResult(encode_network(reduce_shallow(net)))


def _cmd_shift(job: JobSpec) -> JobResult:
    net = _require_network(job.document)
    g = job.document.get("g")
    if not isinstance(g, dict) or "slope" not in g:
        raise DocumentError("shift needs 'g': {'slope': [...], 'constant': r}")
    slope = decode_vector(g["slope"])
    constant = decode_rational(g.get("constant", 0))
    return JobResult(encode_network(affine_shift(net, slope, constant)))


def _cmd_realize(job: JobSpec) -> JobResult:
    _, support = _support_of(job.document)
    report = criterion_check(support)
    payload = {"realizable": report.realizable}
    payload["groups"] = [
        {
            "hyperplane": list(g.normal),
            "walls": [[list(v) for v in w] for w in g.walls],
            "numbers": [encode_rational(n) for n in g.numbers],
            "equal": g.passes,
        }
        for g in report.groups
    ]
    if report.witness is not None:
        payload["witness"] = {
            "hyperplane": list(report.witness.normal),
            "numbers": [encode_rational(n) for n in report.witness.numbers],
        }
    else:
        payload["witness"] = None
    if report.realizable:
        net = synthesize_shallow(support, report)
        ok, correction = verify_up_to_linear(support, net)
        payload["synthesis"] = {
            "network": encode_network(net),
            "linear_correction": {
                "slope": encode_vector(correction),
                "constant": 0,
            },
            "verified": ok,
        }
    else:
        payload["synthesis"] = None
    code = 3 if (job.expect_realizable and not report.realizable) else 0
    return JobResult(payload, exit_code=code)


def _cmd_render(job: JobSpec) -> JobResult:
    net, support = _load_inputs(job.document)
    if support is None:
        support = support_of_network(net)
    svg = render_fan_svg(support.fan, support)
    return JobResult(None, svg)


_HANDLERS = {
    "eval": _cmd_eval,
    "fan": _cmd_fan,
    "divisor": _cmd_divisor,
    "intersect": _cmd_intersect,
    "classify": _cmd_classify,
    "polytope": _cmd_polytope,
    "newton": _cmd_newton,
    "volume": _cmd_volume,
    "reduce": _cmd_reduce,
    "shift": _cmd_shift,
    "realize": _cmd_realize,
    "render": _cmd_render,
}


def run_job(job: JobSpec) -> JobResult:
    handler = _HANDLERS.get(job.command)
    if handler is None:
        raise DocumentError(f"unknown command {job.command!r}")
    return handler(job)


# ---------------------------------------------------------------------------
# formatting and dispatch
# ---------------------------------------------------------------------------

def to_text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        for key, value in obj.items():
            if isinstance(value, (dict, list)) and value and not _scalar_list(value):
                lines.append(f"{pad}{key}:")
                lines.append(to_text(value, indent + 1))
            else:
                lines.append(f"{pad}{key}: {_inline(value)}")
        return "\n".join(lines)
    if isinstance(obj, list):
        lines = []
        for item in obj:
            if isinstance(item, (dict, list)) and item and not _scalar_list(item):
                lines.append(f"{pad}-")
                lines.append(to_text(item, indent + 1))
            else:
                lines.append(f"{pad}- {_inline(item)}")
        return "\n".join(lines)
    return f"{pad}{_inline(obj)}"


def _scalar_list(value) -> bool:
    return isinstance(value, list) and all(
        not isinstance(v, (dict, list)) for v in value)


def _inline(value) -> str:
    if isinstance(value, list):
        return "[" + ", ".join(_inline(v) for v in value) + "]"
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def _emit(job: JobSpec, result: JobResult) -> None:
    if result.svg is not None and job.svg:
        Path(job.svg).write_text(result.svg)
    if result.payload is not None:
        text = (json.dumps(result.payload, indent=2) + "\n"
                if job.fmt == "json" else to_text(result.payload) + "\n")
        if job.output:
            Path(job.output).write_text(text)
        else:
            sys.stdout.write(text)
    elif result.svg is not None and not job.svg:
        if job.output:
            Path(job.output).write_text(result.svg)
        else:
            sys.stdout.write(result.svg)


def _run_batch(directory: str, fmt: str) -> int:
    base = Path(directory)
    files = sorted(base.glob("*.json"))
    files = [f for f in files if not f.name.endswith(".out.json")]
    if not files:
        print(f"no job documents in {directory}", file=sys.stderr)
        return 2

    def process(path: Path) -> tuple[Path, str | None]:
        try:
            doc = json.loads(path.read_text())
            flags = doc.get("flags", {})
            job = JobSpec(
                command=doc.get("command", ""),
                document=doc.get("input", {}),
                fmt=fmt,
                m_max=int(flags.get("m_max", 8)),
                negate=bool(flags.get("negate", False)),
                expect_realizable=bool(flags.get("expect_realizable", False)),
                svg=str(path.with_suffix(".svg")) if doc.get("command") == "render" else None,
            )
            result = run_job(job)
            if result.svg is not None:
                path.with_suffix(".svg").write_text(result.svg)
            if result.payload is not None:
                out = path.with_name(path.stem + ".out.json")
                out.write_text(json.dumps(result.payload, indent=2) + "\n")
            return path, None
        except (RelutoricError, json.JSONDecodeError) as exc:
            return path, str(exc)

    failures = 0
    with concurrent.futures.ThreadPoolExecutor() as pool:
        for path, error in pool.map(process, files):
            if error is not None:
                failures += 1
                print(f"{path.name}: {error}", file=sys.stderr)
    return 2 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relutoric",
        description="Exact toric invariants of unbiased ReLU networks.")
    parser.add_argument("--batch", metavar="DIR",
                        help="process every job document in DIR concurrently")
    sub = parser.add_subparsers(dest="command")
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--input", metavar="PATH",
                       help="input document (default: stdin)")
        p.add_argument("--output", metavar="PATH",
                       help="write the report here instead of stdout")
        p.add_argument("--format", choices=("json", "text"), default="json")
        if name in ("fan", "render"):
            p.add_argument("--svg", metavar="PATH",
                           help="also write an SVG rendering (dimension 2)")
        if name == "volume":
            p.add_argument("--m-max", type=int, default=8, dest="m_max")
        if name == "polytope":
            p.add_argument("--negate", action="store_true",
                           help="use -D instead of D")
        if name == "realize":
            p.add_argument("--expect-realizable", action="store_true",
                           dest="expect_realizable",
                           help="exit 3 when the criterion fails")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.batch:
        return _run_batch(args.batch, "json")
    if not args.command:
        parser.print_usage(sys.stderr)
        return 2
    try:
        if args.input:
            document = json.loads(Path(args.input).read_text())
        else:
            document = json.load(sys.stdin)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cannot read input: {exc}", file=sys.stderr)
        return 2
    job = JobSpec(
        command=args.command,
        document=document,
        output=args.output,
        svg=getattr(args, "svg", None),
        fmt=args.format,
        m_max=getattr(args, "m_max", 8),
        negate=getattr(args, "negate", False),
        expect_realizable=getattr(args, "expect_realizable", False),
    )
    try:
        result = run_job(job)
    except RelutoricError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _emit(job, result)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())

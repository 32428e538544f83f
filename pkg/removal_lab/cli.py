"""
Command-line entry point: ``python -m removal_lab.cli <command> ...``.

Reports go to stdout (or --out) as JSON Lines; logs go to stderr.
Exit status: 0 success, 1 verification failure, 2 usage or input error.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from pydantic import TypeAdapter, ValidationError

from removal_lab.certificates import Certificate, CheckLine, odd_girth, verify_certificates
from removal_lab.config import Budgets, RunConfig, load_run_config, log_level
from removal_lab.construct import (
    HardInstance,
    Theorem5Family,
    behrend_set,
    odd_cycle_blowup_instance,
    rs_graph,
    theorem13_instance,
    theorem4_instance,
)
from removal_lab.count import count_copies, greedy_pair_disjoint_packing
from removal_lab.errors import FormatError, ParameterError, RemovalLabError
from removal_lab.formats import (
    dumps_line,
    graph_fingerprint,
    loads_report,
    read_graph,
    report_lines,
    write_graph,
    write_report,
)
from removal_lab.graph import NAMED_GRAPHS, Graph, as_rational, named_graph
from removal_lab.homomorphism import core, core_poset
from removal_lab.obstruction import blowup_quality_witness, search_bipartite_obstruction
from removal_lab.partition import find_homogeneous_partition
from removal_lab.recognize import (
    GraphFamily,
    check_family_conditions,
    is_bipartite,
    is_cobipartite,
    is_split,
    vc_dimension,
)
from removal_lab.tester import CurveInstance, detection_probability, family_label, tester_curve

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2

CERTIFICATES = TypeAdapter(list[Certificate])


class _Parser(argparse.ArgumentParser):
    """Raises instead of exiting so dispatch() owns the exit status."""

    def error(self, message):
        raise argparse.ArgumentError(None, message)


# --- Input files ---

def load_graph_arg(value: str) -> Graph:
    """A named graph (K3, C5, M, ...) or a .g6 / .json graph file."""
    if value in NAMED_GRAPHS:
        return named_graph(value)
    return read_graph(value)


def load_family(path: str | Path) -> GraphFamily | Theorem5Family:
    """graph6 lines, {"members": [...]}, or a theorem5 descriptor."""
    text = Path(path).read_text(encoding="utf-8")
    body = text.strip()
    if body.startswith("{"):
        try:
            data = json.loads(body)
        except json.JSONDecodeError as e:
            raise FormatError(f"family file is not JSON: {e}")
        try:
            if data.get("kind") == "theorem5":
                return Theorem5Family.model_validate(data)
            return GraphFamily.model_validate(data)
        except ValidationError as e:
            raise FormatError(f"bad family file: {e.errors()[0]['msg']}")
    members = [ln.strip() for ln in body.splitlines() if ln.strip() and not ln.startswith("#")]
    resolved = [named_graph(m) if m in NAMED_GRAPHS else m for m in members]
    return GraphFamily(members=tuple(resolved), name=Path(path).stem)


def sidecar_path(graph_path: Path) -> Path:
    return graph_path.with_name(graph_path.name + ".cert.jsonl")


def write_sidecar(g: Graph, graph_path: Path, header: dict, certificates: list) -> Path:
    path = sidecar_path(graph_path)
    lines = report_lines("certificates", {"fingerprint": graph_fingerprint(g), "n": g.n, **header}, certificates)
    write_report(lines, path)
    return path


def read_sidecar(path: str | Path) -> tuple[dict, list]:
    header, rows = loads_report(Path(path).read_text(encoding="utf-8"))
    try:
        return header, CERTIFICATES.validate_python(rows)
    except ValidationError as e:
        raise FormatError(f"bad certificate in {path}: {e.errors()[0]['msg']}")


# --- Commands ---

def _emit(config: RunConfig, kind: str, header: dict, records: list) -> None:
    text = write_report(report_lines(kind, {"seed": config.seed, **header}, records))
    if config.out is not None:
        config.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _require_out(config: RunConfig) -> Path:
    if config.out is None:
        raise ParameterError("this command writes a graph file", suggestion="pass --out <path>")
    return config.out


def _save_instance(config: RunConfig, kind: str, g: Graph, header: dict, certificates: list) -> int:
    out = _require_out(config)
    write_graph(g, out, config.fmt)
    cert_path = write_sidecar(g, out, header, certificates)
    sys.stdout.write(write_report(report_lines(kind, {
        "seed": config.seed,
        "graph": str(out),
        "certificates": str(cert_path),
        "fingerprint": graph_fingerprint(g),
        **header,
    }, [])))
    return EXIT_OK


def cmd_gen(args, config: RunConfig) -> int:
    if args.what == "behrend":
        s = behrend_set(args.m, args.k, config.budgets, config.seed)
        _emit(config, "behrend", {"m": args.m, "k": args.k, "density": str(s.density)}, [s])
        return EXIT_OK
    if args.what == "rs":
        r = rs_graph(args.h, as_rational(args.delta), args.m, config.budgets)
        header = {"h": r.h, "m": r.m, "r": r.r, "delta": str(r.delta), "cliques": len(r.cliques)}
        return _save_instance(config, "rs", r.graph, header, [r.certificate()])
    if args.kind is None:
        raise ParameterError("gen hard needs --kind thm4|thm13|oddcycle")
    if args.kind != "oddcycle" and args.eps is None:
        raise ParameterError(f"{args.kind} needs --eps")
    if args.kind == "thm4":
        instance = theorem4_instance(args.n, as_rational(args.eps), config.budgets)
    elif args.kind == "thm13":
        if args.forbidden is None:
            raise ParameterError("thm13 needs --forbidden <graph>")
        instance = theorem13_instance(load_graph_arg(args.forbidden), as_rational(args.eps), args.n, config.budgets)
    else:
        instance = odd_cycle_blowup_instance(args.k or 5, args.n, config.budgets)
    header = {"construction": instance.kind, **instance.model_dump(mode="json", exclude={"graph", "certificates", "kind"})}
    return _save_instance(config, "hard", instance.graph, header, instance.certificates)


def cmd_classify(args, config: RunConfig) -> int:
    if args.family is not None:
        family = load_family(args.family)
        if not isinstance(family, GraphFamily):
            raise ParameterError("classify needs a finite family file")
        _emit(config, "classify", {"family": args.family}, [check_family_conditions(family)])
        return EXIT_OK
    g = load_graph_arg(args.graph)
    record = {
        "n": g.n,
        "edges": g.edge_count,
        "bipartite": is_bipartite(g) is not None,
        "cobipartite": is_cobipartite(g) is not None,
        "split": is_split(g) is not None,
        "odd_girth": odd_girth(g),
        "vc_dimension": vc_dimension(g, config.budgets) if g.n <= config.budgets.vc_vertices else None,
    }
    _emit(config, "classify", {"graph": args.graph}, [record])
    return EXIT_OK


def cmd_count(args, config: RunConfig) -> int:
    g, h = load_graph_arg(args.graph), load_graph_arg(args.pattern)
    copies = count_copies(g, h, args.mode, config.budgets)
    _emit(config, "count", {"graph": args.graph, "pattern": args.pattern, "mode": args.mode}, [{"copies": str(copies)}])
    return EXIT_OK


def cmd_pack(args, config: RunConfig) -> int:
    g, h = load_graph_arg(args.graph), load_graph_arg(args.pattern)
    packing = greedy_pair_disjoint_packing(g, h, args.mode, config.budgets)
    header = {"graph": args.graph, "pattern": args.pattern, "mode": args.mode, "size": len(packing)}
    _emit(config, "pack", header, packing.copies)
    return EXIT_OK


def cmd_obstruct(args, config: RunConfig) -> int:
    family = load_family(args.family)
    if not isinstance(family, GraphFamily):
        raise ParameterError("obstruct needs a finite family file")
    if args.candidate is not None:
        witness = blowup_quality_witness(family, load_graph_arg(args.candidate), args.s_max, config.budgets)
        header = {"family": args.family, "candidate": args.candidate, "found": witness is not None}
        _emit(config, "blowup-quality", header, [] if witness is None else [witness])
        return EXIT_OK
    pattern = search_bipartite_obstruction(family, args.side, args.attempts, config.seed, config.budgets)
    header = {"family": args.family, "side": args.side, "found": pattern is not None}
    _emit(config, "obstruction", header, [] if pattern is None else [pattern])
    return EXIT_OK


def cmd_core(args, config: RunConfig) -> int:
    result = core(load_graph_arg(args.graph), config.budgets)
    _emit(config, "core", {"graph": args.graph}, [result])
    return EXIT_OK


def cmd_kf(args, config: RunConfig) -> int:
    family = load_family(args.family)
    if not isinstance(family, GraphFamily):
        raise ParameterError("kf needs a finite family file")
    _emit(config, "kf", {"family": args.family}, [core_poset(family, config.budgets)])
    return EXIT_OK


def cmd_partition(args, config: RunConfig) -> int:
    g = load_graph_arg(args.graph)
    found = find_homogeneous_partition(g, as_rational(args.delta), args.max_parts, config.budgets)
    header = {"graph": args.graph, "delta": args.delta, "found": found is not None}
    _emit(config, "partition", header, [] if found is None else list(found))
    return EXIT_OK


def cmd_test(args, config: RunConfig) -> int:
    g = load_graph_arg(args.graph)
    family = load_family(args.family)
    report = detection_probability(g, family, args.q, args.trials, config.seed, config.threads, args.graph, config.budgets)
    _emit(config, "test", {"graph": args.graph, "family": family_label(family)}, [report])
    return EXIT_OK


def _curve_instances(directory: Path) -> list[CurveInstance]:
    instances = []
    for path in sorted(directory.iterdir()):
        if path.suffix not in (".g6", ".json"):
            continue
        epsilon = None
        if sidecar_path(path).exists():
            header, _ = read_sidecar(sidecar_path(path))
            epsilon = header.get("epsilon")
        instances.append(CurveInstance(name=path.name, graph=read_graph(path), epsilon=epsilon))
    if not instances:
        raise ParameterError(f"no .g6 or .json graphs in {directory}")
    return instances


def _frame_records(frame) -> list[dict]:
    # to_json maps NaN and pd.NA to null and numpy scalars to JSON numbers
    return json.loads(frame.to_json(orient="records"))


def cmd_curve(args, config: RunConfig) -> int:
    try:
        grid = [int(q) for q in args.q_grid.split(",") if q.strip()]
    except ValueError:
        raise ParameterError(f"--q-grid must be comma-separated integers, got {args.q_grid!r}")
    family = load_family(args.family)
    summary, frequencies = tester_curve(
        _curve_instances(Path(args.instances)), family, grid, args.trials, config.seed, config.threads, config.budgets
    )
    records = [{"table": "summary", **row} for row in _frame_records(summary)]
    records += [{"table": "frequency", **row} for row in _frame_records(frequencies)]
    _emit(config, "curve", {"family": family_label(family), "trials": args.trials}, records)
    return EXIT_OK


def cmd_verify(args, config: RunConfig) -> int:
    g = read_graph(args.graph)
    header, certificates = read_sidecar(args.cert)
    lines: list[CheckLine] = []
    fingerprint = graph_fingerprint(g)
    if header.get("fingerprint") not in (None, fingerprint):
        lines.append(CheckLine(
            kind="fingerprint",
            passed=False,
            detail=f"certificates were issued for graph {header['fingerprint'][:12]}, not {fingerprint[:12]}",
        ))
    lines.extend(verify_certificates(g, certificates))
    _emit(config, "verify", {"graph": args.graph, "certificates": args.cert}, lines)
    return EXIT_OK if all(line.passed for line in lines) else EXIT_FAILED


COMMANDS = {
    "gen": cmd_gen,
    "classify": cmd_classify,
    "count": cmd_count,
    "pack": cmd_pack,
    "core": cmd_core,
    "obstruct": cmd_obstruct,
    "kf": cmd_kf,
    "partition": cmd_partition,
    "test": cmd_test,
    "curve": cmd_curve,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="removal_lab", description="Hard instances and sampling testers for induced-freeness.")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--threads", type=int, default=None)
    parser.add_argument("--format", dest="fmt", choices=["graph6", "edges"], default=None)
    parser.add_argument("--out", type=Path, default=None)
    parser.add_argument("--log-level", default=None)
    for name in Budgets.model_fields:
        parser.add_argument(f"--budget-{name.replace('_', '-')}", dest=f"budget_{name}", type=int, default=None)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen")
    gen.add_argument("what", choices=["behrend", "rs", "hard"])
    gen.add_argument("--m", type=int)
    gen.add_argument("--k", type=int)
    gen.add_argument("--h", type=int)
    gen.add_argument("--delta")
    gen.add_argument("--kind", choices=["thm4", "thm13", "oddcycle"])
    gen.add_argument("--n", type=int)
    gen.add_argument("--eps")
    gen.add_argument("--forbidden")

    classify = sub.add_parser("classify")
    target = classify.add_mutually_exclusive_group(required=True)
    target.add_argument("--graph")
    target.add_argument("--family")

    core_cmd = sub.add_parser("core")
    core_cmd.add_argument("--graph", required=True)

    for name in ("count", "pack"):
        cmd = sub.add_parser(name)
        cmd.add_argument("--graph", required=True)
        cmd.add_argument("--pattern", required=True)
        cmd.add_argument("--mode", choices=["induced", "subgraph"], default="induced")

    obstruct = sub.add_parser("obstruct")
    obstruct.add_argument("--family", required=True)
    obstruct.add_argument("--side", type=int, default=2)
    obstruct.add_argument("--attempts", type=int, default=100)
    obstruct.add_argument("--candidate")
    obstruct.add_argument("--s-max", type=int, default=3)

    kf = sub.add_parser("kf")
    kf.add_argument("--family", required=True)

    partition = sub.add_parser("partition")
    partition.add_argument("--graph", required=True)
    partition.add_argument("--delta", required=True)
    partition.add_argument("--max-parts", type=int, default=None)

    test = sub.add_parser("test")
    test.add_argument("--graph", required=True)
    test.add_argument("--family", required=True)
    test.add_argument("--q", type=int, required=True)
    test.add_argument("--trials", type=int, default=100)

    curve = sub.add_parser("curve")
    curve.add_argument("--instances", required=True)
    curve.add_argument("--family", required=True)
    curve.add_argument("--q-grid", required=True)
    curve.add_argument("--trials", type=int, default=100)

    verify = sub.add_parser("verify")
    verify.add_argument("--graph", required=True)
    verify.add_argument("--cert", required=True)
    return parser


def _required(args) -> None:
    needs = {
        ("gen", "behrend"): ("m", "k"),
        ("gen", "rs"): ("h", "delta"),
        ("gen", "hard"): ("kind", "n"),
    }
    for name in needs.get((args.command, getattr(args, "what", None)), ()):
        if getattr(args, name) is None:
            raise ParameterError(f"gen {args.what} needs --{name}")


def dispatch(argv: Sequence[str] | None = None) -> int:
    """Parse argv, run one command and return its exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except argparse.ArgumentError as e:
        sys.stderr.write(f"{parser.format_usage()}error: {e}\n")
        return EXIT_USAGE
    except SystemExit as e:
        # --help
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    try:
        logging.basicConfig(
            level=log_level(args.log_level),
            stream=sys.stderr,
            format="%(levelname)s %(name)s: %(message)s",
            force=True,
        )
        _required(args)
        budgets = {
            name: getattr(args, f"budget_{name}")
            for name in Budgets.model_fields
            if getattr(args, f"budget_{name}") is not None
        }
        config = load_run_config(args.seed, args.threads, budgets, args.out, args.fmt)
        return COMMANDS[args.command](args, config)
    except FileNotFoundError as e:
        sys.stderr.write(f"error: no such file: {e.filename}\n")
        return EXIT_USAGE
    except RemovalLabError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_USAGE


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()

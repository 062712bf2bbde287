"""Command-line front end.

Exit status: 0 on success, 1 if a requested verification failed, 2 on usage
or input errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

from . import bench
from .auction import solve
from .dynamic import DynamicMatcher
from .graph import (DeleteU, FormatError, gen_ops_script, gen_random, parse_graph,
                    parse_ops_script, write_graph, write_ops_script)
from .oracle import HUNGARIAN_CAP, hungarian_exact
from .verify import approx_ratio, rounded_graph, verify_state

log = logging.getLogger("multauction")


@dataclass
class RunSummary:
    n_u: int
    n_v: int
    m: int
    eps_prime: float
    weight: float
    pops: int
    k_min: int
    k_max: int
    oracle_weight: float | None = None
    ratio: float | None = None
    verify: dict[str, bool] | None = None
    seconds: float = 0.0
    op: int | None = None
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.verify is None or all(self.verify.values())

    def to_json(self) -> str:
        d = asdict(self)
        d.update(d.pop("extra"))
        return json.dumps(d, sort_keys=True)

    def line(self) -> str:
        parts = [f"n_u={self.n_u}", f"n_v={self.n_v}", f"m={self.m}",
                 f"eps'={self.eps_prime:g}", f"weight={self.weight:.10g}",
                 f"pops={self.pops}"]
        if self.ratio is not None:
            parts.append(f"oracle={self.oracle_weight:.10g} ratio={self.ratio:.6f}")
        if self.verify is not None:
            parts.append("verify=" + ("ok" if self.ok else "FAILED"))
        return " ".join(parts)


def _eps(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 < x < 1:
        raise argparse.ArgumentTypeError(f"eps' must lie in (0, 1), got {x}")
    return x


def _read(path: str) -> str:
    return sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")


def _verify(state, with_paths: bool):
    m_star = None
    if with_paths:
        rg = rounded_graph(state)
        if rg.n <= HUNGARIAN_CAP:
            m_star = hungarian_exact(rg).matching
        else:
            log.warning("skipping path check: instance above oracle cap")
    return verify_state(state, m_star)


def cmd_solve(args) -> int:
    g = parse_graph(_read(args.graph))
    t0 = time.perf_counter()
    matching, state = solve(g, args.eps, eps=args.eps_internal)
    seconds = time.perf_counter() - t0
    s = RunSummary(g.n_u, g.n_v, g.m, args.eps, matching.total_weight, state.pops,
                   state.cfg.k_min, state.cfg.k_max, seconds=seconds)
    report = None
    if args.oracle:
        opt = hungarian_exact(g).matching
        s.oracle_weight = opt.total_weight
        s.ratio = approx_ratio(matching, opt)
    if args.verify:
        report = _verify(state, with_paths=True)
        s.verify = report.to_dict()
    if args.json:
        if args.emit_matching:
            s.extra["matching"] = sorted(matching.pairs)
        print(s.to_json())
    else:
        print(s.line())
        if report is not None:
            print(report.render())
        if args.emit_matching:
            for u, v in sorted(matching.pairs):
                print(f"m {u} {v} {g.weight(u, v):.17g}")
    return 0 if s.ok else 1


def _script_w_cap(g, script) -> float:
    ws = [float(g.ew.max())] if g.m else []
    ws += [w for op in script if not isinstance(op, DeleteU) for _, w in op.edges]
    return max(ws, default=1.0)


def cmd_dynamic(args) -> int:
    g = parse_graph(_read(args.graph))
    script = parse_ops_script(_read(args.ops), n_u=g.n_u)
    w_cap = args.w_cap if args.w_cap is not None else _script_w_cap(g, script)
    dm = DynamicMatcher(g, args.eps, w_cap, n_cap=args.n_cap, eps=args.eps_internal)
    ok = True

    def summary(op_index: int | None, delta=None) -> RunSummary:
        nonlocal ok
        st = dm.state
        cur = dm.current_matching()
        s = RunSummary(st.n_u, st.n_v, dm.initial_edge_count + dm.inserted_edge_count,
                       args.eps, cur.total_weight, st.pops, st.cfg.k_min,
                       st.cfg.k_max, op=op_index)
        s.extra["pop_bound"] = dm.pop_bound()
        if delta is not None:
            s.extra["removed"] = sorted(delta.removed)
            s.extra["added"] = sorted(delta.added)
        if args.oracle_each:
            opt = hungarian_exact(dm.alive_graph()).matching
            s.oracle_weight = opt.total_weight
            s.ratio = approx_ratio(cur, opt)
        if args.verify_each:
            s.verify = _verify(st, with_paths=args.oracle_each).to_dict()
        ok = ok and s.ok and st.pops <= dm.pop_bound()
        return s

    def emit(s: RunSummary, label: str) -> None:
        if args.json:
            print(s.to_json())
            return
        text = f"{label}: {s.line()}"
        if "removed" in s.extra:
            text += " delta=" + " ".join(
                [f"-{p}" for p in s.extra["removed"]] + [f"+{p}" for p in s.extra["added"]])
        print(text)

    emit(summary(None), "init")
    labels = {}
    for i, op in enumerate(script, 1):
        try:
            if isinstance(op, DeleteU):
                delta = dm.delete_u(op.u)
                desc = f"del {op.u}"
            else:
                v, delta = dm.insert_v(op.edges)
                labels[op.label] = v
                desc = f"add {op.label}->v{v}"
        except (ValueError, IndexError) as exc:
            raise FormatError(str(exc), op.lineno or None) from None
        emit(summary(i, delta), f"op {i} ({desc})")
    return 0 if ok else 1


def cmd_gen(args) -> int:
    g = gen_random(args.n_u, args.n_v, args.m, args.w_max, args.seed, integer=args.integer)
    text = write_graph(g)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text, encoding="utf-8")
    return 0


def cmd_gen_ops(args) -> int:
    g = parse_graph(_read(args.graph))
    script = gen_ops_script(g, args.n_ops, args.seed, args.w_max,
                            p_delete=args.p_delete, integer=args.integer)
    text = write_ops_script(script)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text, encoding="utf-8")
    return 0


def cmd_bench(args) -> int:
    cells, seed, integer = bench.load_config(_read(args.config))
    if args.seed is not None:
        seed = args.seed
    algos = ["multiplicative", "additive"] if args.algo == "both" else [args.algo]
    rows = bench.run_grid(cells, algos, seed, integer, oracle=not args.no_oracle)
    print(bench.format_csv(rows) if args.csv else bench.format_table(rows), end="" if args.csv else "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="multauction",
        description="Approximate maximum weight bipartite matching by multiplicative auction.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def eps_args(sp):
        sp.add_argument("--eps", type=_eps, default=0.1, help="target slack eps' in (0, 1)")
        sp.add_argument("--eps-internal", type=float, default=None,
                        help="override the internal eps (default eps'/4)")

    sp = sub.add_parser("solve", help="solve a graph file")
    sp.add_argument("graph")
    eps_args(sp)
    sp.add_argument("--verify", action="store_true", help="run the full checker suite")
    sp.add_argument("--oracle", action="store_true", help="compare with an exact solve")
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--emit-matching", action="store_true")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("dynamic", help="replay an ops script")
    sp.add_argument("graph")
    sp.add_argument("ops")
    eps_args(sp)
    sp.add_argument("--w-cap", type=float, default=None,
                    help="weight ceiling (default: largest weight in graph and script)")
    sp.add_argument("--n-cap", type=int, default=None, help="vertex budget (default 4n)")
    sp.add_argument("--verify-each", action="store_true")
    sp.add_argument("--oracle-each", action="store_true")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_dynamic)

    sp = sub.add_parser("gen", help="write a random graph")
    sp.add_argument("n_u", type=int)
    sp.add_argument("n_v", type=int)
    sp.add_argument("m", type=int)
    sp.add_argument("w_max", type=float)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--integer", action="store_true", help="integer weights in [1, w_max]")
    sp.add_argument("-o", "--out", default=None)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("gen-ops", help="write a random ops script for a graph")
    sp.add_argument("graph")
    sp.add_argument("n_ops", type=int)
    sp.add_argument("--w-max", type=float, default=1000.0)
    sp.add_argument("--p-delete", type=float, default=0.3)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--integer", action="store_true")
    sp.add_argument("-o", "--out", default=None)
    sp.set_defaults(func=cmd_gen_ops)

    sp = sub.add_parser("bench", help="run a benchmark grid from a JSON config")
    sp.add_argument("config")
    sp.add_argument("--algo", choices=["multiplicative", "additive", "both"], default="both")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--no-oracle", action="store_true")
    sp.add_argument("--csv", action="store_true")
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"{parser.prog}: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

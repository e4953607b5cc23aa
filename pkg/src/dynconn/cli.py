"""Command-line front end: run traces, generate workloads, print parameters, scaling report."""

from __future__ import annotations

import argparse
import io
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, TextIO

from .core import (
    BaseGraph,
    ConfigError,
    Counters,
    DynConnError,
    GeomObject,
    StaleHandleError,
    StateError,
    Trace,
    TraceError,
    counters_header,
    counters_snapshot,
    icbrt_ceil,
    parse_trace,
)
from .geom_conn import GeomState, exponents_for_b, inner_delta, phase_length
from .offline import (
    DEFAULT_ALPHA,
    geom_offline_params,
    offline_exponents,
    run_offline_geom,
    run_offline_subgraph,
    subgraph_offline_config,
)
from .oracle import oracle_components_geom, oracle_connected_subgraph
from .range_provider import BOXES, PROVIDERS
from .subgraph_conn import Policy, SubgraphConfig, SubgraphConn, balanced_exponents

MODES = ("subgraph", "geom", "subgraph-offline", "geom-offline")
EXIT_OK, EXIT_PARSE, EXIT_MISMATCH, EXIT_CONFIG = 0, 1, 2, 3


@dataclass
class RunConfig:
    mode: str | None = None  # None: take it from the trace header
    policy: str | None = None
    delta: int | None = None
    b: Fraction | None = None
    provider: str = BOXES
    seed: int = 0
    check_oracle: bool = False
    counters_out: str | None = None
    counters_every: int = 0

    def validate(self, trace_kind: str | None = None) -> str:
        mode = self.mode
        if mode is None:
            if trace_kind is None:
                raise ConfigError("mode unknown")
            mode = trace_kind
        if mode not in MODES:
            raise ConfigError(f"unknown mode {mode!r}")
        sub = mode.startswith("subgraph")
        if self.policy is not None and not sub:
            raise ConfigError("--policy only applies to subgraph modes")
        if self.b is not None and sub:
            raise ConfigError("--b only applies to geom modes")
        if self.delta is not None and (not sub or self.delta < 1):
            raise ConfigError("--delta must be a positive integer in subgraph modes")
        if self.policy is not None and self.policy not in (p.value for p in Policy):
            raise ConfigError(f"unknown policy {self.policy!r}")
        if self.provider not in PROVIDERS:
            raise ConfigError(f"unknown provider {self.provider!r}")
        if self.counters_every < 0:
            raise ConfigError("--counters-every must be non-negative")
        if trace_kind is not None and not mode.startswith(trace_kind):
            raise TraceError(f"mode {mode!r} needs a {mode.split('-')[0]} trace, got a {trace_kind} trace", 1)
        return mode


@dataclass
class Mismatch:
    op_index: int
    query_index: int
    query: str
    expected: bool
    got: bool

    def __str__(self) -> str:
        return f"op {self.op_index} query {self.query_index} ({self.query}): expected {_tf(self.expected)}, got {_tf(self.got)}"


@dataclass
class RunResult:
    answers: list[bool]
    counter_rows: list[str] = field(default_factory=list)
    mismatches: list[Mismatch] = field(default_factory=list)

    def output_lines(self) -> list[str]:
        return [f"{i} {_tf(a)}" for i, a in enumerate(self.answers)]


def _tf(x: bool) -> str:
    return "true" if x else "false"


# ---------------------------------------------------------------------------
# Reference answers
# ---------------------------------------------------------------------------


def oracle_answers(trace: Trace, counters: Counters | None = None) -> list[bool]:
    """Answers recomputed from scratch by brute force at every query."""
    out = []
    if trace.kind == "subgraph":
        active: set[int] = set()
        dyn: dict[int, tuple[int, int]] = {}
        for ev in trace.events:
            k, a = ev.kind, ev.args
            if k == "on":
                active.add(a[0])
            elif k == "off":
                active.discard(a[0])
            elif k == "adde":
                dyn[a[2]] = (a[0], a[1])
            elif k == "dele":
                dyn.pop(a[0], None)
            else:
                out.append(oracle_connected_subgraph(trace.graph, active, a[0], a[1], dyn.values(), counters))
    else:
        live: dict[int, GeomObject] = {}
        for ev in trace.events:
            if ev.kind == "insert":
                live[ev.obj.id] = ev.obj
            elif ev.kind == "delete":
                live.pop(ev.args[0], None)
            else:
                if counters is not None:
                    counters.oracle_calls += 1
                a, b = ev.args
                out.append(any(a in p and b in p for p in oracle_components_geom(live.values())))
    return out


# ---------------------------------------------------------------------------
# Running traces
# ---------------------------------------------------------------------------


def _event_error(ev, exc: Exception) -> TraceError:
    msg = exc.args[0] if exc.args else type(exc).__name__
    return TraceError(f"{ev.kind}: {msg}", ev.lineno)


def _run_online_subgraph(trace: Trace, cfg: RunConfig, counters: Counters, rows: list[str]) -> list[bool]:
    g = trace.graph
    policy = Policy(cfg.policy or Policy.CLASSIC.value)
    s = SubgraphConn(g, policy, SubgraphConfig.auto(g.m, cfg.delta), (), counters)
    handles: dict[int, int] = {}
    answers = []
    for k, ev in enumerate(trace.events):
        a = ev.args
        try:
            if ev.kind == "on":
                s.turn_on(a[0])
            elif ev.kind == "off":
                s.turn_off(a[0])
            elif ev.kind == "adde":
                if a[2] in handles:
                    raise StateError(f"edge handle {a[2]} already live")
                handles[a[2]] = s.add_dyn_edge(a[0], a[1])
            elif ev.kind == "dele":
                if a[0] not in handles:
                    raise StaleHandleError(f"dynamic edge handle {a[0]} is not live")
                s.remove_dyn_edge(handles.pop(a[0]))
            else:
                answers.append(s.connected(a[0], a[1]))
        except (StateError, KeyError) as exc:
            raise _event_error(ev, exc) from None
        if cfg.counters_every and (k + 1) % cfg.counters_every == 0:
            rows.append(counters_snapshot(counters, k + 1))
    return answers


def _run_online_geom(trace: Trace, cfg: RunConfig, counters: Counters, rows: list[str]) -> list[bool]:
    gs = GeomState(cfg.provider, cfg.b, counters)
    answers = []
    for k, ev in enumerate(trace.events):
        try:
            if ev.kind == "insert":
                gs.insert(ev.obj)
            elif ev.kind == "delete":
                gs.delete(ev.args[0])
            else:
                answers.append(gs.connected(*ev.args))
        except (StateError, KeyError, ValueError) as exc:
            raise _event_error(ev, exc) from None
        if cfg.counters_every and (k + 1) % cfg.counters_every == 0:
            rows.append(counters_snapshot(counters, k + 1))
    return answers


def run_trace(cfg: RunConfig, text: str | bytes) -> RunResult:
    """Parse and run one trace; raises TraceError / ConfigError on bad input."""
    trace = parse_trace(text)
    mode = cfg.validate(trace.kind)
    counters = Counters()
    rows = [counters_header()]
    if mode == "subgraph":
        answers = _run_online_subgraph(trace, cfg, counters, rows)
    elif mode == "geom":
        answers = _run_online_geom(trace, cfg, counters, rows)
    else:
        try:
            if mode == "subgraph-offline":
                ocfg = subgraph_offline_config(max(trace.graph.m, 1), cfg.delta) if cfg.delta else None
                answers = run_offline_subgraph(trace.graph, trace.events, ocfg, counters=counters)
            else:
                answers = run_offline_geom(trace.events, cfg.provider, cfg.b, counters=counters)
        except (StateError, KeyError) as exc:
            raise TraceError(str(exc.args[0] if exc.args else exc)) from None
    result = RunResult(answers, rows)
    if cfg.check_oracle:
        expected = oracle_answers(trace, counters)
        qi = 0
        for k, ev in enumerate(trace.events):
            if ev.kind != "conn":
                continue
            if expected[qi] != answers[qi]:
                result.mismatches.append(Mismatch(k, qi, ev.to_text(), expected[qi], answers[qi]))
            qi += 1
    rows.append(counters_snapshot(counters, len(trace.events)))
    return result


# ---------------------------------------------------------------------------
# Workload generation
# ---------------------------------------------------------------------------

MASK64 = (1 << 64) - 1


class SplitMix64:
    """splitmix64 generator; fully determined by its 64-bit seed."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection."""
        if n <= 0:
            raise ValueError("empty range")
        limit = (1 << 64) - (1 << 64) % n
        while True:
            x = self.next()
            if x < limit:
                return x % n

    def random(self) -> float:
        return (self.next() >> 11) / float(1 << 53)

    def choice(self, seq: Sequence):
        return seq[self.below(len(seq))]


DEFAULT_MIX = {
    "subgraph": {"on": 0.3, "off": 0.2, "conn": 0.3, "adde": 0.1, "dele": 0.1},
    "geom": {"insert": 0.4, "delete": 0.2, "conn": 0.4},
}


def _pick(rng: SplitMix64, mix: dict[str, float]) -> str:
    r = rng.random()
    acc = 0.0
    kinds = list(mix)
    for k in kinds:
        acc += mix[k]
        if r < acc:
            return k
    return kinds[-1]


def random_box(rng: SplitMix64, oid: int, d: int, n: int) -> GeomObject:
    """Box in [0, 4n]^d with sides up to 2 * 4n / n^(1/d) (about a constant expected degree)."""
    L = 4 * max(n, 1)
    side = max(1, int(2 * L / max(n, 1) ** (1.0 / d)))
    lo = [rng.below(L + 1) for _ in range(d)]
    hi = [min(L, a + rng.below(side + 1)) for a in lo]
    return GeomObject(oid, tuple(lo), tuple(hi))


def gen_trace(
    mode: str,
    n: int,
    ops: int,
    seed: int,
    mix: dict[str, float] | None = None,
    d: int = 2,
    m: int | None = None,
) -> str:
    """Reproducible random trace.

    Subgraph: ``n`` vertices, ``m`` (default 2.5n) random non-loop edges.
    Geom: at most ``n`` live objects in dimension ``d``.  Events that cannot
    apply to the current state are replaced by a feasible update.
    """
    kind = "geom" if mode.startswith("geom") else "subgraph"
    mix = dict(DEFAULT_MIX[kind] if mix is None else mix)
    bad = set(mix) - set(DEFAULT_MIX[kind])
    if bad:
        raise ConfigError(f"mix has kinds {sorted(bad)} not valid for {kind}")
    if any(v < 0 for v in mix.values()) or not math.isclose(sum(mix.values()), 1.0, abs_tol=1e-9):
        raise ConfigError("mix ratios must be non-negative and sum to 1")
    if n < 1 or ops < 0:
        raise ConfigError("need n >= 1 and ops >= 0")
    rng = SplitMix64(seed)
    out = io.StringIO()
    out.write(f"# seed={seed} mode={kind} n={n} ops={ops}\n")
    if kind == "subgraph":
        if m is None:
            m = (5 * n) // 2
        out.write(f"graph {n}\n")
        for _ in range(m):
            u = rng.below(n)
            v = rng.below(n - 1) if n > 1 else 0
            if n > 1 and v >= u:
                v += 1
            out.write(f"edge {u} {v}\n")
        active: list[int] = []
        pos: dict[int, int] = {}
        live: list[int] = []
        next_handle = 0

        def add(v):
            pos[v] = len(active)
            active.append(v)

        def remove(v):
            i = pos.pop(v)
            last = active.pop()
            if last != v:
                active[i] = last
                pos[last] = i

        for _ in range(ops):
            k = _pick(rng, mix)
            if k == "off" and not active:
                k = "on"
            if k in ("conn", "adde") and len(active) < 2:
                k = "on" if len(active) < n else "off"
            if k == "dele" and not live:
                k = "on" if len(active) < n else "off"
            if k == "on" and len(active) == n:
                k = "off"
            if k == "on":
                while True:
                    v = rng.below(n)
                    if v not in pos:
                        break
                add(v)
                out.write(f"on {v}\n")
            elif k == "off":
                v = rng.choice(active)
                remove(v)
                out.write(f"off {v}\n")
            elif k == "conn":
                u = rng.choice(active)
                v = rng.choice(active)
                out.write(f"conn {u} {v}\n")
            elif k == "adde":
                u = rng.choice(active)
                v = rng.choice(active)
                out.write(f"adde {u} {v} {next_handle}\n")
                live.append(next_handle)
                next_handle += 1
            else:
                h = live.pop(rng.below(len(live)))
                out.write(f"dele {h}\n")
    else:
        out.write(f"geom {d}\n")
        ids: list[int] = []
        next_id = 0
        for _ in range(ops):
            k = _pick(rng, mix)
            if k == "delete" and not ids:
                k = "insert"
            if k == "conn" and not ids:
                k = "insert"
            if k == "insert" and len(ids) >= n:
                k = "delete"
            if k == "insert":
                o = random_box(rng, next_id, d, n)
                next_id += 1
                ids.append(o.id)
                out.write(f"insert {o.id} {o.to_tokens()}\n")
            elif k == "delete":
                i = rng.below(len(ids))
                ids[i], ids[-1] = ids[-1], ids[i]
                out.write(f"delete {ids.pop()}\n")
            else:
                out.write(f"conn {rng.choice(ids)} {rng.choice(ids)}\n")
    return out.getvalue()


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------


def params(mode: str, size: int, b=None, alpha=DEFAULT_ALPHA) -> dict[str, object]:
    """Phase length, thresholds and predicted exponents for a problem size.

    ``size`` is m for subgraph modes and n for geom modes.
    """
    if size < 1:
        raise ConfigError("size must be positive")
    if mode == "subgraph":
        cfg = SubgraphConfig.auto(size)
        e = balanced_exponents()
        return {"m": size, "delta": cfg.delta, "q": cfg.q, "update_exp": e["update"], "query_exp": e["query"]}
    if mode == "subgraph-offline":
        cfg = subgraph_offline_config(size)
        return {"m": size, "delta": cfg.delta, "q": cfg.q, "t": cfg.t}
    b = Fraction(1 if b is None else b)
    if mode == "geom":
        up, qu = exponents_for_b(b)
        return {"n": size, "b": b, "y": phase_length(size, b), "delta": inner_delta(size, b), "update_exp": up, "query_exp": qu}
    if mode == "geom-offline":
        cfg = geom_offline_params(size, b, alpha)
        up, qu = offline_exponents(b, alpha)
        return {"n": size, "b": b, "alpha": Fraction(alpha), "q": cfg.q, "delta": cfg.delta, "t": cfg.t, "update_exp": up, "query_exp": qu}
    raise ConfigError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# Scaling report
# ---------------------------------------------------------------------------

SCALING_COLUMNS = ("m", "n", "delta", "q", "vertex_updates", "gstar_edge_updates", "c_updates", "amortized")


def scaling_point(m: int, seed: int, phases: int = 2, policy: str = "classic") -> dict[str, int | float]:
    """Charged work per vertex update on a random graph with m edges and delta = ceil(m^(1/3)).

    The graph has m/2.5 vertices, each initially active with probability 1/2.
    Updates toggle random vertices (on or off with equal odds) for ``phases``
    full phases, so the rebuild at the end of each phase is included.
    """
    n = max(2, (2 * m) // 5)
    rng = SplitMix64(seed ^ m)
    edges = []
    for _ in range(m):
        u = rng.below(n)
        v = rng.below(n - 1)
        if v >= u:
            v += 1
        edges.append((u, v))
    g = BaseGraph(n, edges)
    delta = max(1, icbrt_ceil(m))
    cfg = SubgraphConfig.auto(m, delta)
    on = [v for v in range(n) if rng.below(2)]
    active = set(on)
    off = [v for v in range(n) if v not in active]
    s = SubgraphConn(g, policy, cfg, on)
    s.counters = c = Counters()  # construction is the first rebuild; charge only what follows
    updates = phases * cfg.q
    for _ in range(updates):
        src, dst = (off, on) if (rng.below(2) and off) or not on else (on, off)
        i = rng.below(len(src))
        v = src[i]
        src[i] = src[-1]
        src.pop()
        dst.append(v)
        if src is off:
            s.turn_on(v)
        else:
            s.turn_off(v)
    work = c.gstar_edge_updates + c.c_updates
    return {
        "m": m,
        "n": n,
        "delta": delta,
        "q": cfg.q,
        "vertex_updates": updates,
        "gstar_edge_updates": c.gstar_edge_updates,
        "c_updates": c.c_updates,
        "amortized": work / updates,
    }


def fit_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log(y) against log(x)."""
    lx = [math.log(x) for x in xs]
    ly = [math.log(y) for y in ys]
    mx, my = sum(lx) / len(lx), sum(ly) / len(ly)
    num = sum((a - mx) * (b - my) for a, b in zip(lx, ly))
    den = sum((a - mx) ** 2 for a in lx)
    return num / den


def scaling_report(exponents: Sequence[int] = range(12, 18), seed: int = 1, phases: int = 2) -> tuple[list[dict], float]:
    rows = [scaling_point(1 << e, seed, phases) for e in exponents]
    return rows, fit_slope([r["m"] for r in rows], [r["amortized"] for r in rows])


def scaling_csv(rows: list[dict], slope: float) -> str:
    out = [",".join(SCALING_COLUMNS)]
    for r in rows:
        out.append(",".join(f"{r[c]:.3f}" if isinstance(r[c], float) else str(r[c]) for c in SCALING_COLUMNS))
    out.append(f"# loglog_slope={slope:.4f}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# argparse plumbing
# ---------------------------------------------------------------------------


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _mix(text: str) -> dict[str, float]:
    out = {}
    for part in text.split(","):
        k, _, v = part.partition("=")
        try:
            out[k.strip()] = float(v)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad mix entry {part!r}, want kind=ratio") from None
    return out


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dynconn", description="Dynamic subgraph and geometric connectivity.")
    sub = p.add_subparsers(dest="cmd", required=True)

    r = sub.add_parser("run", help="run a trace and print one line per query")
    r.add_argument("trace", help="trace file, or - for stdin")
    r.add_argument("--mode", choices=MODES)
    r.add_argument("--policy", choices=[x.value for x in Policy])
    r.add_argument("--delta", type=int)
    r.add_argument("--b", type=_fraction)
    r.add_argument("--provider", choices=PROVIDERS, default=BOXES)
    r.add_argument("--check-oracle", action="store_true")
    r.add_argument("--counters-out")
    r.add_argument("--counters-every", type=int, default=0)

    gsub = sub.add_parser("gen", help="generate a random trace")
    gsub.add_argument("--mode", choices=MODES, default="subgraph")
    gsub.add_argument("--n", type=int, required=True)
    gsub.add_argument("--ops", type=int, required=True)
    gsub.add_argument("--seed", type=int, default=0)
    gsub.add_argument("--d", type=int, default=2)
    gsub.add_argument("--m", type=int)
    gsub.add_argument("--mix", type=_mix)
    gsub.add_argument("-o", "--output")

    pp = sub.add_parser("params", help="print phase lengths, thresholds and exponents")
    pp.add_argument("--mode", choices=MODES, default="subgraph")
    pp.add_argument("--size", type=int, required=True, help="m for subgraph modes, n for geom modes")
    pp.add_argument("--b", type=_fraction)
    pp.add_argument("--alpha", type=_fraction, default=DEFAULT_ALPHA)

    s = sub.add_parser("scaling", help="CSV of charged work per vertex update against m")
    s.add_argument("--min-exp", type=int, default=12)
    s.add_argument("--max-exp", type=int, default=17)
    s.add_argument("--seed", type=int, default=1)
    s.add_argument("--phases", type=int, default=2)
    s.add_argument("-o", "--output")
    return p


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path: str | None, text: str, stdout: TextIO) -> None:
    if path is None:
        stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def main(argv: Sequence[str] | None = None, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = _parser().parse_args(argv)
    try:
        if args.cmd == "run":
            cfg = RunConfig(
                mode=args.mode,
                policy=args.policy,
                delta=args.delta,
                b=args.b,
                provider=args.provider,
                check_oracle=args.check_oracle,
                counters_out=args.counters_out,
                counters_every=args.counters_every,
            )
            try:
                text = _read(args.trace)
            except OSError as exc:
                stderr.write(f"error: {exc}\n")
                return EXIT_PARSE
            res = run_trace(cfg, text)
            for line in res.output_lines():
                stdout.write(line + "\n")
            if cfg.counters_out:
                _write(cfg.counters_out, "\n".join(res.counter_rows) + "\n", stdout)
            if res.mismatches:
                stderr.write(f"oracle mismatch on {len(res.mismatches)} queries\n")
                for mm in res.mismatches:
                    stderr.write(f"  {mm}\n")
                return EXIT_MISMATCH
            return EXIT_OK
        if args.cmd == "gen":
            text = gen_trace(args.mode, args.n, args.ops, args.seed, args.mix, args.d, args.m)
            _write(args.output, text, stdout)
            return EXIT_OK
        if args.cmd == "params":
            table = params(args.mode, args.size, args.b, args.alpha)
            for k, v in table.items():
                stdout.write(f"{k}\t{v}\n")
            return EXIT_OK
        if args.cmd == "scaling":
            rows, slope = scaling_report(range(args.min_exp, args.max_exp + 1), args.seed, args.phases)
            _write(args.output, scaling_csv(rows, slope), stdout)
            return EXIT_OK
    except TraceError as exc:
        stderr.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except ConfigError as exc:
        stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    except DynConnError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_PARSE
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())

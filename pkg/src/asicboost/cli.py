"""Command-line front end.

Five commands tie the library together: verify-header checks one candidate
offline, collide builds a colliding work set, mine runs any of the loop
organizations over a work set, gain compares predicted vs counter-measured
savings, and bench adds a wall-clock ratio.

JSON is the machine interface; --format text renders the same structure for
humans.  With a fixed seed and fixed inputs every command's JSON is
byte-stable except values under the "timing" key, which is the one place
wall-clock numbers are allowed to live.  Hashes are wire-order by default;
byte-reversed ones are always labeled display.

Exit codes: 0 success, 1 header does not meet target (verify-header only),
2 bad input, 3 collision budget exhausted, 4 mismatched gain workloads.
"""

from __future__ import annotations

import json
import random
import struct
import sys
import time
from fractions import Fraction

import click

from . import backend as backend_mod
from . import gain as gain_mod
from .header import (
    BadHex,
    BadLength,
    UnsupportedEncoding,
    decode_compact,
    display_hex,
    double_sha,
    meets_target,
    parse_header_hex,
)
from .loops import (
    IndivisibleGrouping,
    MessageMismatch,
    NonceRange,
    OpCounters,
    asicboost_scan,
    classic_scan,
    lowtoggle_schedule,
    multicore_schedule,
    reconstruct_header,
)
from .workbuilder import (
    BudgetExhausted,
    CollisionConfig,
    FixedHeaderFields,
    MerkleLeafSet,
    find_colliding_set,
    free_bits_set,
    load_work_set,
    save_work_set,
)

EXIT_NOT_MET = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3
EXIT_WORKLOAD = 4

INPUT_ERRORS = (
    BadHex,
    BadLength,
    UnsupportedEncoding,
    MessageMismatch,
    IndivisibleGrouping,
    ValueError,
    OSError,
    json.JSONDecodeError,
    gain_mod.InsufficientSamples,
)


def _emit(data: dict, fmt: str, output: str | None) -> None:
    if fmt == "json":
        text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    else:
        text = "".join(_render_text(data))
    if output:
        with open(output, "w", encoding="utf-8") as fp:
            fp.write(text)
    else:
        click.echo(text, nl=False)


def _render_text(data, indent: int = 0):
    pad = "  " * indent
    if isinstance(data, dict):
        for key in sorted(data):
            value = data[key]
            if isinstance(value, (dict, list)):
                yield f"{pad}{key}:\n"
                yield from _render_text(value, indent + 1)
            else:
                yield f"{pad}{key}: {value}\n"
    elif isinstance(data, list):
        for value in data:
            if isinstance(value, (dict, list)):
                yield from _render_text(value, indent)
                yield "\n" if indent == 0 else ""
            else:
                yield f"{pad}- {value}\n"
    else:
        yield f"{pad}{data}\n"


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _parse_bits(text: str) -> int:
    try:
        return int(text, 16)
    except ValueError:
        raise UnsupportedEncoding(f"target bits must be hex, got {text!r}") from None


format_option = click.option(
    "--format", "fmt", type=click.Choice(["json", "text"]), default="json", show_default=True
)
output_option = click.option("--output", type=click.Path(dir_okay=False), default=None,
                             help="Write the report here instead of stdout.")
seed_option = click.option("--seed", type=int, default=0, show_default=True)
workers_option = click.option("--workers", type=int, default=1, show_default=True,
                              help="Nonce-range scan partitions.")
backend_option = click.option(
    "--backend", type=click.Choice(["auto", *backend_mod.available_backends()]),
    default="auto", show_default=True,
)


@click.group()
def main():
    """Midstate-sharing double-SHA mining loops, instrumented."""


@main.command("verify-header")
@click.argument("hex80")
@format_option
@output_option
def cmd_verify_header(hex80: str, fmt: str, output: str | None):
    """Hash one 80-byte header (160 hex chars) and check it against its own
    bits field.  Exits 0 only when the header meets its target."""
    try:
        header = parse_header_hex(hex80)
        digest = double_sha(header)
        target = decode_compact(header.bits)
    except INPUT_ERRORS as exc:
        _fail(EXIT_INPUT, str(exc))
    met = meets_target(digest, target)
    _emit(
        {
            "header_hex": header.serialize().hex(),
            "digest_hex": digest.hex(),
            "digest_display_hex": display_hex(digest),
            "target_bits": f"{target.compact:08x}",
            "target_display_hex": f"{target.value:064x}",
            "meets_target": met,
        },
        fmt,
        output,
    )
    sys.exit(0 if met else EXIT_NOT_MET)


def _synthetic_source(seed: int, txids: int, extranonce_width: int) -> MerkleLeafSet:
    """Deterministic stand-in block template derived from the seed."""
    rng = random.Random(seed ^ 0x1EAF5E7)
    template = bytearray(rng.randbytes(96))
    offset = 42
    template[offset : offset + extranonce_width] = b"\x00" * extranonce_width
    return MerkleLeafSet(
        coinbase_template=bytes(template),
        extranonce_offset=offset,
        extranonce_width=extranonce_width,
        txids=tuple(rng.randbytes(32) for _ in range(txids)),
    )


def _synthetic_fixed(seed: int, zero_prev_bits: int = 0) -> FixedHeaderFields:
    rng = random.Random(seed ^ 0xF1E1D5)
    prev = bytearray(rng.randbytes(32))
    if zero_prev_bits:
        whole, rem = divmod(zero_prev_bits, 8)
        for i in range(whole):
            prev[i] = 0
        if rem:
            prev[whole] &= (1 << (8 - rem)) - 1
    return FixedHeaderFields(
        version=struct.pack("<I", 0x20000000),
        prev_hash=bytes(prev),
        timestamp=struct.pack("<I", 0x66000000 | rng.getrandbits(24)),
        bits=bytes.fromhex("ffff001d"),
    )


@main.command("collide")
@seed_option
@click.option("--tail-bits", type=click.IntRange(1, 32), default=16, show_default=True,
              help="Merkle-root tail bits that must agree.")
@click.option("--set-size", type=click.IntRange(min=1), default=2, show_default=True)
@click.option("--mode", type=click.Choice(["extranonce", "permutation", "free_bits"]),
              default="extranonce", show_default=True)
@click.option("--budget", type=click.IntRange(min=1), default=1_000_000, show_default=True,
              help="Candidate roots to try before giving up.")
@click.option("--txids", type=click.IntRange(min=0), default=7, show_default=True,
              help="Non-coinbase transactions in the synthetic template.")
@click.option("--extranonce-width", type=click.IntRange(1, 8), default=4, show_default=True)
@click.option("--free-bits", "free_bits", type=click.IntRange(1, 32), default=8,
              show_default=True, help="Previous-hash bits to enumerate in free_bits mode.")
@click.option("--workset", type=click.Path(dir_okay=False), required=True,
              help="Where to write the work-set JSON.")
@format_option
@output_option
def cmd_collide(seed, tail_bits, set_size, mode, budget, txids, extranonce_width,
                free_bits, workset, fmt, output):
    """Build a colliding work set from a synthetic seeded block template and
    write it to --workset.  Exits 3 when the candidate budget runs out."""
    stats: dict = {}
    t0 = time.perf_counter()
    try:
        cfg = CollisionConfig(
            tail_bits=tail_bits,
            set_size=set_size,
            max_candidates=budget,
            mode=mode,
            free_bits_count=free_bits if mode == "free_bits" else 0,
        )
        if mode == "free_bits":
            fixed = _synthetic_fixed(seed, zero_prev_bits=free_bits)
            template = fixed.header_for_root(random.Random(seed ^ 0x0071).randbytes(32))
            cset = free_bits_set(template, cfg)
            stats.update(candidates_tried=cset.n, buckets=1, best_bucket=cset.n)
        else:
            source = _synthetic_source(seed, txids, extranonce_width)
            fixed = _synthetic_fixed(seed)
            cset = find_colliding_set(source, fixed, cfg, seed=seed, stats=stats)
    except BudgetExhausted as exc:
        elapsed = time.perf_counter() - t0
        _emit(
            {
                "status": "budget-exhausted",
                "candidates_tried": exc.tried,
                "best_bucket": exc.best_bucket,
                "needed": exc.needed,
                "buckets": stats.get("buckets", 0),
                "timing": {"elapsed_seconds": elapsed},
            },
            fmt,
            output,
        )
        sys.exit(EXIT_BUDGET)
    except INPUT_ERRORS as exc:
        _fail(EXIT_INPUT, str(exc))
    elapsed = time.perf_counter() - t0
    save_work_set(cset, workset)
    _emit(
        {
            "status": "ok",
            "workset": workset,
            "mode": cset.mode,
            "tail_bits": cset.tail_bits,
            "set_size": cset.n,
            "simulation_only": cset.simulation_only,
            "message_hex": cset.message.hex(),
            **stats,
            "timing": {"elapsed_seconds": elapsed},
        },
        fmt,
        output,
    )


_SCANS = {
    "classic": classic_scan,
    "asicboost": asicboost_scan,
    "multicore": multicore_schedule,
    "lowtoggle": lowtoggle_schedule,
}


@main.command("mine")
@click.argument("workset", type=click.Path(exists=True, dir_okay=False))
@click.option("--mode", type=click.Choice(sorted(_SCANS)), default="asicboost", show_default=True)
@click.option("--nonce-start", type=int, default=0, show_default=True)
@click.option("--nonce-end", type=int, default=1 << 16, show_default=True)
@click.option("--target-bits", default="1d00ffff", show_default=True,
              help="Compact target, hex.")
@click.option("--cores-per-expander", type=click.IntRange(min=1), default=2, show_default=True,
              help="Group size for multicore mode.")
@workers_option
@backend_option
@format_option
@output_option
def cmd_mine(workset, mode, nonce_start, nonce_end, target_bits, cores_per_expander,
             workers, backend, fmt, output):
    """Scan a work-set file with the chosen loop organization and report
    solutions plus stage counters.  Zero solutions is still exit 0."""
    try:
        cset = load_work_set(workset)
        rng = NonceRange(nonce_start, nonce_end)
        target = decode_compact(_parse_bits(target_bits))
        counters = OpCounters()
        scan = _SCANS[mode]
        kwargs = {"workers": workers, "backend": None if backend == "auto" else backend}
        if mode == "multicore":
            solutions = scan(cset, rng, target, cores_per_expander, counters, **kwargs)
        else:
            solutions = scan(cset, rng, target, counters, **kwargs)
        # canonical order regardless of loop organization
        solutions = sorted(solutions, key=lambda s: (s.nonce, s.item_index))
        for sol in solutions:
            reconstruct_header(cset, sol)
    except INPUT_ERRORS as exc:
        _fail(EXIT_INPUT, str(exc))
    _emit(
        {
            "workset": workset,
            "mode": mode,
            "backend": backend_mod.get_backend(None if backend == "auto" else backend).NAME,
            "nonce_start": rng.start,
            "nonce_end": rng.end,
            "target_bits": f"{target.compact:08x}",
            "simulation_only": cset.simulation_only,
            "solution_count": len(solutions),
            "solutions": [
                {**sol.to_dict(), "digest_display_hex": display_hex(sol.digest)}
                for sol in solutions
            ],
            "counters": counters.as_dict(),
        },
        fmt,
        output,
    )


def _load_counters(path: str) -> OpCounters:
    with open(path, encoding="utf-8") as fp:
        data = json.load(fp)
    if "counters" in data:
        data = data["counters"]
    return OpCounters.from_dict(data)


@main.command("gain")
@click.option("--set-size", "-n", "set_size", type=click.IntRange(min=1), default=4,
              show_default=True)
@click.option("--x", "x_text", default="1/4", show_default=True,
              help="Expander-1 share of stage work, as a fraction.")
@click.option("--classic-counters", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Counters JSON from a classic mine run.")
@click.option("--boosted-counters", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Counters JSON from an asicboost mine run.")
@click.option("--nonces", type=click.IntRange(min=1), default=4096, show_default=True,
              help="Range size for the self-run when no counter files are given.")
@seed_option
@backend_option
@format_option
@output_option
def cmd_gain(set_size, x_text, classic_counters, boosted_counters, nonces, seed,
             backend, fmt, output):
    """Predicted gain x(n-1)/n next to the counter-measured gain.  Counters
    come from --classic-counters/--boosted-counters files, or from an
    instrumented run pair over a synthetic set.  Exits 4 when the two
    counter sets cover different workloads."""
    try:
        x = Fraction(x_text)
        backend_name = None if backend == "auto" else backend
        if (classic_counters is None) != (boosted_counters is None):
            raise ValueError("provide both counter files or neither")
        if classic_counters:
            classic = _load_counters(classic_counters)
            boosted = _load_counters(boosted_counters)
            params = gain_mod.GainParams(set_size, x)
            report = gain_mod.GainReport(
                params=params,
                predicted=gain_mod.predicted_gain(params),
                measured_counter=gain_mod.counter_gain(classic, boosted, x),
            )
        else:
            report = gain_mod.measure_gain(
                set_size, nonce_count=nonces, x=x, seed=seed, backend=backend_name
            )
    except gain_mod.MismatchedWorkload as exc:
        _fail(EXIT_WORKLOAD, str(exc))
    except INPUT_ERRORS as exc:
        _fail(EXIT_INPUT, str(exc))
    _emit(report.to_dict(), fmt, output)


@main.command("bench")
@click.option("--set-size", "-n", "set_size", type=click.IntRange(min=1), default=4,
              show_default=True)
@click.option("--nonces", type=click.IntRange(min=1), default=1 << 16, show_default=True)
@click.option("--reps", type=click.IntRange(min=1), default=5, show_default=True)
@seed_option
@backend_option
@format_option
@output_option
def cmd_bench(set_size, nonces, reps, seed, backend, fmt, output):
    """Wall-clock comparison of the two loop organizations on this machine.
    The ratio is environment-dependent, so it lives under the "timing" key;
    the counter-based gain alongside it is exact."""
    try:
        backend_name = None if backend == "auto" else backend
        report = gain_mod.measure_gain(
            set_size, nonce_count=min(nonces, 4096), seed=seed, backend=backend_name
        )
        setup = gain_mod.BenchSetup(
            set_size=set_size, nonce_count=nonces, seed=seed, backend=backend_name
        )
        result = gain_mod.bench_wallclock(setup, reps)
    except INPUT_ERRORS as exc:
        _fail(EXIT_INPUT, str(exc))
    data = report.to_dict()
    data["timing"] = {
        "wallclock_ratio": result.median_ratio,
        "ratio_min": result.min_ratio,
        "ratio_max": result.max_ratio,
        "repetitions": reps,
        "nonces_per_rep": nonces,
        "backend": result.backend,
        "classic_seconds": list(result.classic_seconds),
        "boosted_seconds": list(result.boosted_seconds),
    }
    _emit(data, fmt, output)


if __name__ == "__main__":
    main()

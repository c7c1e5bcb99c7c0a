"""Command-line surface: gen, features, infer, cost, bench.

Exit codes: 0 success, 2 usage error, 3 input parse error, 4 model/input
mismatch. All randomness flows from --seed; identical invocations produce
byte-identical outputs. ``--config FILE`` supplies defaults for any value
flag (JSON object keyed by flag name); explicit flags win.
"""

import argparse
import dataclasses
import hashlib
import io
import json
import sys
import time
from collections import deque

import numpy as np

from . import costs, csvio, modelio, synth
from .errors import (
    DimensionError,
    EvaluationError,
    IspukitError,
    MissingCalibrationError,
    ModelFormatError,
    ModelValidationError,
    StreamParseError,
)
from .features import FeatureExtractor, SETS_PER_VECTOR, WINDOW_SIZE
from .pipeline import Pipeline, majority_label

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_MISMATCH = 4


def _open_in(path):
    if path in (None, "-"):
        return sys.stdin, False
    return open(path, "r", encoding="utf-8", newline=""), True


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _load_calibration(args) -> costs.CalibrationTable:
    cal = costs.load_calibration(getattr(args, "calibration", None))
    overrides = {}
    if getattr(args, "clock", None) is not None:
        overrides["clock_mhz"] = float(args.clock)
    if getattr(args, "power", None) is not None:
        overrides["power_mw"] = float(args.power)
    return dataclasses.replace(cal, **overrides) if overrides else cal


def _fmt_bytes(n: int) -> str:
    return f"{n / 1024:.1f} KiB"


def _emit_summary(args, doc: dict, prose: str) -> None:
    """Run summary: JSON or prose, to stdout when the data went to a file,
    otherwise to stderr so piped CSV output stays byte-clean."""
    stream = sys.stdout if args.out not in (None, "-") else sys.stderr
    if args.format == "json":
        print(json.dumps(doc, indent=2, sort_keys=True), file=stream)
    else:
        print(prose, file=stream)


def _report_lines(report: costs.CostReport, budget: int) -> list[str]:
    lines = [
        f"architecture:     {report.name} ({report.kind}, hidden {list(report.hidden)})",
        f"canonical MACs:   {report.canonical_macs}",
        f"reported MACs:       {report.reported_macs}",
    ]
    if report.cycles_per_mac is not None:
        lines += [
            f"cycles/MAC:       {report.cycles_per_mac}",
            f"NN cycles:        {report.nn_cycles:.1f}",
            f"NN latency:       {report.nn_latency_ms:.3f} ms at {report.clock_mhz:g} MHz",
            f"feature latency:  {report.feature_latency_ms:.3f} ms",
            f"total latency:    {report.total_latency_ms:.3f} ms",
            f"energy:           {report.energy_uj:.1f} uJ",
        ]
    else:
        lines.append("latency/energy:   (no cycles/MAC calibration for this architecture)")
    lines += [
        f"memory footprint: {report.memory_bytes} B ({_fmt_bytes(report.memory_bytes)})",
        f"deployable:       {'yes' if report.deployable else 'no'} "
        f"(budget {_fmt_bytes(budget)})",
    ]
    if report.extrapolated_fit:
        lines.append(
            "note: MAC accounting extrapolates the table fit beyond the published rows"
        )
    return lines


def cmd_gen(args) -> int:
    try:
        if args.script_file:
            with open(args.script_file, "r", encoding="utf-8") as fh:
                script_text = ",".join(
                    line.strip() for line in fh if line.strip() and not line.startswith("#")
                )
        else:
            script_text = args.script or ""
        segments = synth.parse_script(script_text)
        script = synth.ActivityScript(segments, seed=args.seed, noise_floor=args.noise)
    except (ValueError, OSError) as exc:
        print(f"gen: invalid script: {exc}", file=sys.stderr)
        return EXIT_USAGE

    out, close = _open_out(args.out)
    try:
        count = csvio.write_stream_csv(
            synth.generate(script), out, with_labels=not args.no_label
        )
    finally:
        if close:
            out.close()
    _emit_summary(
        args,
        {"command": "gen", "segments": len(script.segments),
         "acquisitions": count, "seed": args.seed, "noise_floor": args.noise,
         "labeled": not args.no_label},
        f"gen: {len(script.segments)} segments, {count} acquisitions, seed {args.seed}",
    )
    return EXIT_OK


def _feature_rows(stream):
    """Run the extractor over (acquisition, label) rows; yields feature rows
    with the majority ground-truth label when the stream is labeled."""
    extractor = FeatureExtractor()
    recent = deque(maxlen=WINDOW_SIZE * SETS_PER_VECTOR)
    for acq, label in stream:
        recent.append(label)
        vector = extractor.push(acq)
        if vector is None:
            continue
        truth = None
        if len(recent) == recent.maxlen and all(lab is not None for lab in recent):
            truth = majority_label(recent)
        yield vector.window_index, vector.values, truth


def cmd_features(args) -> int:
    src, close_in = _open_in(args.input)
    out, close_out = _open_out(args.out)
    try:
        rows = list(_feature_rows(csvio.read_stream_csv(src)))
        labeled = bool(rows) and all(r[2] is not None for r in rows)
        csvio.write_features_csv(
            ((w, v, lab) for w, v, lab in rows), out, with_labels=labeled
        )
    finally:
        if close_in:
            src.close()
        if close_out:
            out.close()
    _emit_summary(
        args,
        {"command": "features", "windows": len(rows), "labeled": labeled},
        f"features: {len(rows)} windows",
    )
    return EXIT_OK


def _classify_source(src, model):
    """Sniff the input header and yield classification events.

    Accepts either a raw acquisition stream (runs the full pipeline) or an
    already extracted feature dump (runs the model per row).
    """
    first = src.readline()
    if not first:
        raise StreamParseError("empty input, expected a header", 1)
    body = io.StringIO(first + src.read())
    if csvio.is_feature_header(first):
        for window_index, values, label in csvio.read_features_csv(body):
            probs, predicted = model.infer(np.asarray(values))
            yield window_index, predicted, probs, label
    else:
        pipe = Pipeline(model)
        for event in pipe.run(csvio.read_stream_csv(body)):
            yield event.window_index, event.label, event.probabilities, event.true_label


def _cost_summary_for_model(model, args):
    cal = _load_calibration(args)
    arch = costs.ModelArchitecture(model.kind, tuple(model.hidden_widths))
    return costs.build_cost_report(arch, cal), cal


def cmd_infer(args) -> int:
    model = modelio.load_model(args.model)
    report, cal = _cost_summary_for_model(model, args)

    src, close_in = _open_in(args.input)
    try:
        events = list(_classify_source(src, model))
    finally:
        if close_in:
            src.close()

    with_truth = bool(events) and all(e[3] is not None for e in events)
    correct = sum(1 for e in events if with_truth and e[1] == e[3])

    if args.format == "json":
        doc = {
            "command": "infer",
            "model": args.model,
            "inferences": len(events),
            "accuracy": (correct / len(events)) if with_truth and events else None,
            "cost": report.to_dict(),
            "classifications": [
                {
                    "window_index": w,
                    "label": int(lab),
                    "probabilities": [float(p) for p in probs],
                    "true_label": (int(truth) if truth is not None else None),
                }
                for w, lab, probs, truth in events
            ],
        }
        print(json.dumps(doc, indent=2, sort_keys=True))
        if args.out not in (None, "-"):
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                csvio.write_classification_log(events, fh, with_truth)
        return EXIT_OK

    out, close_out = _open_out(args.out)
    try:
        csvio.write_classification_log(events, out, with_truth)
    finally:
        if close_out:
            out.close()

    summary = [f"infer: {len(events)} inferences"]
    if with_truth and events:
        summary.append(f"accuracy: {correct / len(events):.4f}")
    if report.cycles_per_mac is None:
        summary.append(
            "warning: architecture not in the calibration catalog; latency/energy omitted"
        )
        summary.append(f"reported MACs: {report.reported_macs}")
    else:
        summary += [
            f"reported MACs: {report.reported_macs}",
            f"NN latency: {report.nn_latency_ms:.3f} ms at {report.clock_mhz:g} MHz",
            f"total latency: {report.total_latency_ms:.3f} ms",
            f"energy: {report.energy_uj:.1f} uJ",
        ]
    summary.append(
        f"memory: {report.memory_bytes} B, deployable: {'yes' if report.deployable else 'no'}"
    )
    print("\n".join(summary),
          file=sys.stdout if args.out not in (None, "-") else sys.stderr)
    return EXIT_OK


def cmd_cost(args) -> int:
    cal = _load_calibration(args)
    if args.all:
        archs = list(costs.CATALOG)
    elif args.hidden is not None:
        kind = args.kind or "float"
        hidden = tuple(int(w) for w in args.hidden.split(",")) if args.hidden else ()
        archs = [costs.ModelArchitecture(kind, hidden)]
    elif args.arch:
        try:
            archs = [costs.parse_architecture(args.arch)]
        except (ValueError, IspukitError):
            names = ", ".join(a.name for a in costs.CATALOG)
            print(
                f"cost: unknown architecture {args.arch!r}; catalog names: {names}",
                file=sys.stderr,
            )
            return EXIT_USAGE
    else:
        print("cost: provide --arch NAME, --hidden WIDTHS, or --all", file=sys.stderr)
        return EXIT_USAGE

    reports = [costs.build_cost_report(a, cal) for a in archs]
    if args.format == "json":
        doc = {
            "command": "cost",
            "clock_mhz": cal.clock_mhz if args.clock is None else float(args.clock),
            "power_mw": cal.effective_power_mw(),
            "ram_budget_bytes": cal.ram_budget_bytes,
            "reports": [r.to_dict() for r in reports],
        }
        print(json.dumps(doc, indent=2, sort_keys=True))
        return EXIT_OK

    if args.all:
        print(
            f"{'model':<14}{'MACs':>8}{'canon':>8}{'cyc/MAC':>9}{'NN ms':>9}"
            f"{'total ms':>10}{'uJ':>8}{'mem KiB':>9}  deploy"
        )
        for r in reports:
            nn = f"{r.nn_latency_ms:.3f}" if r.nn_latency_ms is not None else "-"
            tot = f"{r.total_latency_ms:.3f}" if r.total_latency_ms is not None else "-"
            uj = f"{r.energy_uj:.1f}" if r.energy_uj is not None else "-"
            cpm = f"{r.cycles_per_mac}" if r.cycles_per_mac is not None else "-"
            print(
                f"{r.name:<14}{r.reported_macs:>8}{r.canonical_macs:>8}{cpm:>9}"
                f"{nn:>9}{tot:>10}{uj:>8}{r.memory_bytes / 1024:>9.1f}  "
                f"{'yes' if r.deployable else 'no'}"
            )
    else:
        for r in reports:
            print("\n".join(_report_lines(r, cal.ram_budget_bytes)))
    return EXIT_OK


def cmd_bench(args) -> int:
    model = modelio.load_model(args.model)
    src, close_in = _open_in(args.input)
    try:
        stream = list(csvio.read_stream_csv(src))
    finally:
        if close_in:
            src.close()

    digests = []
    feature_s = infer_s = 0.0
    events = []
    for _ in range(args.repeat):
        extractor = FeatureExtractor()
        vectors = []
        t0 = time.perf_counter()
        for acq, _label in stream:
            vec = extractor.push(acq)
            if vec is not None:
                vectors.append(vec)
        t1 = time.perf_counter()
        events = [(v.window_index, *model.infer(v.values)) for v in vectors]
        t2 = time.perf_counter()
        feature_s += t1 - t0
        infer_s += t2 - t1
        log = io.StringIO()
        csvio.write_classification_log(
            ((w, lab, probs, None) for w, probs, lab in events), log, with_truth=False
        )
        digests.append(hashlib.sha256(log.getvalue().encode()).hexdigest())

    per_inference = infer_s / max(1, len(events) * args.repeat)
    doc = {
        "command": "bench",
        "note": "host measurement on this machine, not sensor timing",
        "acquisitions": len(stream),
        "inferences": len(events),
        "repeats": args.repeat,
        "feature_stage_s": feature_s,
        "inference_stage_s": infer_s,
        "inferences_per_second": (1.0 / per_inference) if per_inference > 0 else None,
        "classification_digest": digests[0] if digests else None,
        "digests_identical": len(set(digests)) <= 1,
    }
    if args.format == "json":
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print("bench (host measurement on this machine, not sensor timing)")
        print(f"acquisitions:        {doc['acquisitions']} x{args.repeat}")
        print(f"inferences:          {doc['inferences']} x{args.repeat}")
        print(f"feature stage:       {feature_s:.4f} s")
        print(f"inference stage:     {infer_s:.4f} s")
        if doc["inferences_per_second"]:
            print(f"inferences/second:   {doc['inferences_per_second']:.1f}")
        print(f"classification sha256: {doc['classification_digest']}")
    return EXIT_OK


def _add_common(p):
    p.add_argument("--config", help="JSON file with default values for any flag")
    p.add_argument("--format", choices=("table", "json"), default=None,
                   help="human table or one machine-readable JSON document")


def _add_cost_flags(p):
    p.add_argument("--clock", type=float, choices=(5.0, 10.0), default=None,
                   help="core clock in MHz")
    p.add_argument("--power", type=float, default=None,
                   help="effective core power in mW (overrides the calibrated default)")
    p.add_argument("--calibration", default=None,
                   help="calibration JSON overriding the shipped table")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ispukit",
        description="In-sensor activity recognition: synthetic streams, "
                    "feature extraction, float/binary inference, cost model.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a labeled synthetic stream CSV")
    p.add_argument("--seed", type=int, default=None, help="stream seed (default 0)")
    p.add_argument("--script", default=None,
                   help="segments as label:duration[:intensity],... ")
    p.add_argument("--script-file", default=None,
                   help="file with one segment per line (same syntax)")
    p.add_argument("--noise", type=float, default=None,
                   help=f"Gaussian noise floor in ADC counts (default {synth.DEFAULT_NOISE_FLOOR:g})")
    p.add_argument("--no-label", action="store_true",
                   help="omit the label column")
    p.add_argument("--out", default=None, help="output CSV (default stdout)")
    _add_common(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("features", help="extract 30-value feature vectors from a stream")
    p.add_argument("--in", dest="input", default=None, help="stream CSV (default stdin)")
    p.add_argument("--out", default=None, help="feature CSV (default stdout)")
    _add_common(p)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("infer", help="classify a stream (or feature dump) with a model")
    p.add_argument("--model", required=True, help=f"model file ({modelio.FILE_EXTENSION})")
    p.add_argument("--in", dest="input", default=None,
                   help="stream or feature CSV (default stdin)")
    p.add_argument("--out", default=None, help="classification log CSV (default stdout)")
    _add_cost_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("cost", help="MACs, latency, energy, and memory feasibility")
    p.add_argument("--arch", default=None, help="architecture name, e.g. Binary_4,256")
    p.add_argument("--kind", choices=("float", "binary"), default=None)
    p.add_argument("--hidden", default=None,
                   help="explicit hidden widths, e.g. 64,64 (with --kind)")
    p.add_argument("--all", action="store_true", help="print the full catalog table")
    _add_cost_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_cost)

    p = sub.add_parser("bench", help="host-side throughput microbenchmark")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="input", required=True, help="stream CSV")
    p.add_argument("--repeat", type=int, default=None, help="bench repetitions (default 1)")
    _add_common(p)
    p.set_defaults(func=cmd_bench)

    return parser


_HARD_DEFAULTS = {"seed": 0, "noise": synth.DEFAULT_NOISE_FLOOR, "repeat": 1,
                  "format": "table"}


def _apply_config(args) -> None:
    """Fill unset value flags from --config, then from the hard defaults."""
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            config = json.load(fh)
        for key, value in config.items():
            key = key.replace("-", "_")
            if hasattr(args, key) and getattr(args, key) is None:
                setattr(args, key, value)
    for key, value in _HARD_DEFAULTS.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, value)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        return args.func(args)
    except StreamParseError as exc:
        print(f"{args.command}: input parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ModelFormatError, ModelValidationError) as exc:
        print(f"{args.command}: model file error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (DimensionError, EvaluationError, MissingCalibrationError) as exc:
        print(f"{args.command}: model/input mismatch: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except IspukitError as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except BrokenPipeError:
        return EXIT_OK
    except OSError as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())

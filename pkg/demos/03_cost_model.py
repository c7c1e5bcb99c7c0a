#!/usr/bin/env python3
"""Cost-model tour: the published 13-row accounting table, latency and
energy at both supported clocks, the float-to-binary speedups, and the
40 KiB memory wall."""

from ispukit import (
    build_cost_report,
    load_calibration,
    memory_footprint,
    parse_architecture,
    speedup,
)
from ispukit.costs import CATALOG, ModelArchitecture

cal = load_calibration()

print(f"{'model':<14}{'reported MACs':>14}{'cyc/MAC':>9}{'NN ms':>9}{'uJ':>8}"
      f"{'mem KiB':>9}  deployable")
for arch in CATALOG:
    r = build_cost_report(arch, cal)
    nn = f"{r.nn_latency_ms:.3f}" if r.nn_latency_ms is not None else "-"
    uj = f"{r.energy_uj:.1f}" if r.energy_uj is not None else "-"
    print(f"{r.name:<14}{r.reported_macs:>14}{r.cycles_per_mac:>9}{nn:>9}{uj:>8}"
          f"{r.memory_bytes / 1024:>9.1f}  {'yes' if r.deployable else 'no'}")

f264 = parse_architecture("Float_2,64")
b264 = parse_architecture("Binary_2,64")
b4256 = parse_architecture("Binary_4,256")

print("\nreference configuration (Float_2,64 at 5 MHz):")
r5 = build_cost_report(f264, cal)
r10 = build_cost_report(f264, cal, clock_mhz=10.0)
print(f"  5 MHz: {r5.total_latency_ms:.3f} ms total, {r5.energy_uj:.1f} uJ")
print(f" 10 MHz: {r10.total_latency_ms:.3f} ms total "
      "(feature extraction scales with the clock too)")

reduction = 1.0 - 1.0 / speedup(f264, b264, cal)
ratio = cal.lookup(f264) / cal.lookup(b4256)
print(f"\nbinarizing Float_2,64 cuts network time by {reduction:.1%}")
print(f"cycles/MAC ratio Float_2,64 vs Binary_4,256: {ratio:.2f}x")

wall = ModelArchitecture("float", (256, 256, 256, 256))
print(f"\nmemory wall: a float 4x256 model needs "
      f"{memory_footprint(wall) / 1024:.0f} KiB (> 40 KiB budget) while the "
      f"binary twin fits in {memory_footprint(b4256) / 1024:.1f} KiB")

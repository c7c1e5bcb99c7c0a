"""MAC accounting, latency/energy estimation, and memory feasibility for the
in-sensor target (5/10 MHz core, 40 KiB of RAM for program and data).

Two MAC counts are reported per architecture. ``canonical_macs`` is the plain
sum of in*out over the dense layers. ``reported_macs`` adds per-layer and fixed
overhead terms fitted so that every row of the published 13-architecture
benchmark table is reproduced exactly; the fit has no claimed semantics
beyond that table, so reports flag architectures outside the catalog as
extrapolated.

Latency follows cycles = reported_macs * cycles_per_MAC with the measured
per-architecture cycles/MAC calibration, plus the model-independent feature
extraction time (6.57 ms at 5 MHz, scaled inversely with clock). Energy is
effective core power * total time, with the default power calibrated so the
reference configuration (Float_2,64 at 5 MHz end to end) costs exactly the
measured 90 uJ.
"""

import json
import math
from dataclasses import dataclass, field
from importlib import resources

from .errors import MissingCalibrationError, WidthError

FLOAT_INPUT_SIZE = 30
BINARY_INPUT_SIZE = 32
OUTPUT_SIZE = 5
WORD_BITS = 32

RAM_BUDGET_BYTES = 40 * 1024
ALLOWED_CLOCKS_MHZ = (5.0, 10.0)

# resident pipeline state: 3 axis buffers of 32 int16 samples plus the
# double-buffered 30-value feature vector in 4-byte floats
BUFFER_BYTES = 3 * 32 * 2 + 30 * 2 * 4

_FLOAT_FIXED_OVERHEAD = 140
_BINARY_FIXED_OVERHEAD = 80
_BINARY_SHAPE_OVERHEAD = 64


@dataclass(frozen=True)
class ModelArchitecture:
    """Layer-width description of one MLP variant."""

    kind: str                 # "float" | "binary"
    hidden: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))
        if self.kind not in ("float", "binary"):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if any(h <= 0 for h in self.hidden):
            raise ValueError("hidden widths must be positive")
        if self.kind == "binary":
            for h in self.hidden:
                if h % WORD_BITS != 0:
                    raise WidthError(
                        f"binary hidden width {h} is not a multiple of {WORD_BITS}"
                    )

    @property
    def input_size(self) -> int:
        return FLOAT_INPUT_SIZE if self.kind == "float" else BINARY_INPUT_SIZE

    @property
    def output_size(self) -> int:
        return OUTPUT_SIZE

    @property
    def name(self) -> str:
        """Canonical name: Float, Float_2,64, or Float_64x32 for ragged widths."""
        base = self.kind.capitalize()
        if not self.hidden:
            return base
        if len(set(self.hidden)) == 1:
            return f"{base}_{len(self.hidden)},{self.hidden[0]}"
        return base + "_" + "x".join(str(h) for h in self.hidden)

    @property
    def display_name(self) -> str:
        base = self.kind.capitalize()
        if not self.hidden:
            return base
        if len(set(self.hidden)) == 1:
            return f"{base}_{{{len(self.hidden)},{self.hidden[0]}}}"
        return self.name

    def layer_shapes(self) -> list[tuple[int, int]]:
        sizes = [self.input_size, *self.hidden, self.output_size]
        return list(zip(sizes[:-1], sizes[1:]))


def parse_architecture(name: str) -> ModelArchitecture:
    """Parse names like Float, Binary_4,256, Float_{2,64}, or Float_64x32."""
    text = name.strip().replace("{", "").replace("}", "")
    kind, _, rest = text.partition("_")
    kind = kind.lower()
    if kind not in ("float", "binary"):
        raise ValueError(f"unknown architecture name {name!r}")
    if not rest:
        return ModelArchitecture(kind)
    try:
        if "," in rest:
            layers_s, width_s = rest.split(",")
            hidden = (int(width_s),) * int(layers_s)
        else:
            hidden = tuple(int(w) for w in rest.split("x"))
    except ValueError as exc:
        raise ValueError(f"unknown architecture name {name!r}") from exc
    return ModelArchitecture(kind, hidden)


# the 13 published benchmark architectures, in table order
CATALOG = (
    ModelArchitecture("float"),
    ModelArchitecture("float", (32,)),
    ModelArchitecture("float", (64,)),
    ModelArchitecture("float", (32, 32)),
    ModelArchitecture("float", (64, 64)),
    ModelArchitecture("float", (32, 32, 32)),
    ModelArchitecture("binary"),
    ModelArchitecture("binary", (32,)),
    ModelArchitecture("binary", (64,)),
    ModelArchitecture("binary", (32, 32)),
    ModelArchitecture("binary", (64, 64)),
    ModelArchitecture("binary", (32, 32, 32)),
    ModelArchitecture("binary", (256, 256, 256, 256)),
)

CATALOG_BY_NAME = {arch.name: arch for arch in CATALOG}


def in_catalog(arch: ModelArchitecture) -> bool:
    return arch.name in CATALOG_BY_NAME


def canonical_macs(arch: ModelArchitecture) -> int:
    """Plain sum of in*out over the dense layers."""
    return sum(i * o for i, o in arch.layer_shapes())


def reported_macs(arch: ModelArchitecture) -> int:
    """MAC count under the published accounting (exact fit to all 13 rows)."""
    base = canonical_macs(arch) + 2 * sum(arch.hidden)
    if arch.kind == "float":
        return base + _FLOAT_FIXED_OVERHEAD
    shape_term = _BINARY_SHAPE_OVERHEAD if (not arch.hidden or arch.hidden[-1] != 32) else 0
    return base + _BINARY_FIXED_OVERHEAD + shape_term


def memory_footprint(arch: ModelArchitecture) -> int:
    """Model parameters + resident pipeline buffers, in bytes.

    Float models store weights, biases and the 4 input-norm parameters per
    feature as 4-byte values. Binary models store 1 bit per weight (rows
    padded to whole 32-bit words), 4 bytes per hidden threshold, per output
    affine parameter, and per input-norm entry.
    """
    shapes = arch.layer_shapes()
    if arch.kind == "float":
        weights = sum(i * o for i, o in shapes)
        biases = sum(o for _, o in shapes)
        norm = 4 * arch.input_size
        return 4 * (weights + biases + norm) + BUFFER_BYTES
    weight_bytes = sum(o * math.ceil(i / WORD_BITS) * 4 for i, o in shapes)
    thresholds = 4 * sum(arch.hidden)
    affine = 4 * 2 * arch.output_size
    norm = 4 * 4 * arch.input_size
    return weight_bytes + thresholds + affine + norm + BUFFER_BYTES


def is_deployable(arch: ModelArchitecture, ram_budget: int = RAM_BUDGET_BYTES) -> bool:
    return memory_footprint(arch) <= ram_budget


@dataclass(frozen=True)
class CalibrationTable:
    """Measured cycles/MAC per catalog architecture plus the fixed target
    constants the estimators need."""

    version: str = "1"
    clock_mhz: float = 5.0
    reference_clock_mhz: float = 5.0
    ram_budget_bytes: int = RAM_BUDGET_BYTES
    feature_extraction_ms: float = 6.57     # at the reference clock
    energy_anchor_uj: float = 90.0
    energy_anchor_arch: str = "Float_2,64"
    power_mw: float | None = None           # None -> derived from the anchor
    cycles_per_mac: dict = field(default_factory=dict)
    cycles_per_mac_m4: dict = field(default_factory=dict)  # comparison column only

    def __post_init__(self):
        if self.clock_mhz not in ALLOWED_CLOCKS_MHZ:
            raise ValueError(f"core clock must be one of {ALLOWED_CLOCKS_MHZ} MHz")
        for table in (self.cycles_per_mac, self.cycles_per_mac_m4):
            for name, value in table.items():
                if value <= 0:
                    raise ValueError(f"cycles/MAC for {name} must be positive")
        if self.feature_extraction_ms <= 0:
            raise ValueError("feature extraction duration must be positive")

    def lookup(self, arch: ModelArchitecture) -> float:
        try:
            return self.cycles_per_mac[arch.name]
        except KeyError:
            raise MissingCalibrationError(
                f"no cycles/MAC calibration for {arch.name}"
            ) from None

    def feature_ms(self, clock_mhz: float | None = None) -> float:
        clock = self.clock_mhz if clock_mhz is None else clock_mhz
        return self.feature_extraction_ms * self.reference_clock_mhz / clock

    def effective_power_mw(self) -> float:
        """Configured power, or the value that makes the anchor configuration
        cost exactly the anchor energy at the reference clock."""
        if self.power_mw is not None:
            return self.power_mw
        anchor = parse_architecture(self.energy_anchor_arch)
        cycles = reported_macs(anchor) * self.cycles_per_mac[anchor.name]
        total_ms = cycles / (self.reference_clock_mhz * 1e3) + self.feature_extraction_ms
        return self.energy_anchor_uj / total_ms


def load_calibration(path=None) -> CalibrationTable:
    """Load the shipped calibration data file, or an override file."""
    if path is None:
        text = resources.files("ispukit.data").joinpath("calibration-v1.json").read_text()
    else:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    doc = json.loads(text)
    return CalibrationTable(
        version=str(doc.get("version", "1")),
        clock_mhz=float(doc.get("clock_mhz", 5.0)),
        reference_clock_mhz=float(doc.get("reference_clock_mhz", 5.0)),
        ram_budget_bytes=int(doc.get("ram_budget_bytes", RAM_BUDGET_BYTES)),
        feature_extraction_ms=float(doc.get("feature_extraction_ms", 6.57)),
        energy_anchor_uj=float(doc.get("energy_anchor_uj", 90.0)),
        energy_anchor_arch=str(doc.get("energy_anchor_arch", "Float_2,64")),
        power_mw=doc.get("power_mw"),
        cycles_per_mac={k: float(v) for k, v in doc.get("cycles_per_mac", {}).items()},
        cycles_per_mac_m4={k: float(v) for k, v in doc.get("cycles_per_mac_m4", {}).items()},
    )


def estimate_latency(arch: ModelArchitecture, cal: CalibrationTable,
                     clock_mhz: float | None = None,
                     cycles_per_mac: float | None = None) -> tuple[float, float]:
    """(network latency ms, total latency ms) at the configured clock."""
    cpm = cal.lookup(arch) if cycles_per_mac is None else cycles_per_mac
    clock = cal.clock_mhz if clock_mhz is None else clock_mhz
    nn_ms = reported_macs(arch) * cpm / (clock * 1e3)
    return nn_ms, nn_ms + cal.feature_ms(clock)


def estimate_energy(total_ms: float, cal: CalibrationTable) -> float:
    """Energy in microjoules for one inference of the given total duration."""
    if total_ms < 0:
        raise ValueError("duration must be nonnegative")
    return cal.effective_power_mw() * total_ms


def speedup(a: ModelArchitecture, b: ModelArchitecture, cal: CalibrationTable,
            clock_mhz: float | None = None) -> float:
    """Network-latency ratio time(a) / time(b); > 1 means b is faster."""
    nn_a, _ = estimate_latency(a, cal, clock_mhz)
    nn_b, _ = estimate_latency(b, cal, clock_mhz)
    return nn_a / nn_b


@dataclass(frozen=True)
class CostReport:
    """Everything the cost surfaces print for one architecture."""

    name: str
    kind: str
    hidden: tuple
    canonical_macs: int
    reported_macs: int
    clock_mhz: float
    cycles_per_mac: float | None
    nn_cycles: float | None
    nn_latency_ms: float | None
    feature_latency_ms: float
    total_latency_ms: float | None
    energy_uj: float | None
    memory_bytes: int
    deployable: bool
    extrapolated_fit: bool

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "hidden": list(self.hidden),
            "canonical_macs": self.canonical_macs,
            "reported_macs": self.reported_macs,
            "clock_mhz": self.clock_mhz,
            "cycles_per_mac": self.cycles_per_mac,
            "nn_cycles": self.nn_cycles,
            "nn_latency_ms": self.nn_latency_ms,
            "feature_latency_ms": self.feature_latency_ms,
            "total_latency_ms": self.total_latency_ms,
            "energy_uj": self.energy_uj,
            "memory_bytes": self.memory_bytes,
            "deployable": self.deployable,
            "extrapolated_fit": self.extrapolated_fit,
        }


def build_cost_report(arch: ModelArchitecture, cal: CalibrationTable,
                      clock_mhz: float | None = None,
                      cycles_per_mac: float | None = None) -> CostReport:
    """Assemble the full report; latency/energy fields are None when the
    architecture has no calibration entry and no override was given."""
    clock = cal.clock_mhz if clock_mhz is None else clock_mhz
    macs = reported_macs(arch)
    footprint = memory_footprint(arch)
    cpm = cycles_per_mac
    if cpm is None:
        try:
            cpm = cal.lookup(arch)
        except MissingCalibrationError:
            cpm = None
    if cpm is not None:
        nn_ms, total_ms = estimate_latency(arch, cal, clock, cpm)
        nn_cycles = macs * cpm
        energy = estimate_energy(total_ms, cal)
    else:
        nn_ms = total_ms = nn_cycles = energy = None
    return CostReport(
        name=arch.name,
        kind=arch.kind,
        hidden=arch.hidden,
        canonical_macs=canonical_macs(arch),
        reported_macs=macs,
        clock_mhz=clock,
        cycles_per_mac=cpm,
        nn_cycles=nn_cycles,
        nn_latency_ms=nn_ms,
        feature_latency_ms=cal.feature_ms(clock),
        total_latency_ms=total_ms,
        energy_uj=energy,
        memory_bytes=footprint,
        deployable=footprint <= cal.ram_budget_bytes,
        extrapolated_fit=not in_catalog(arch),
    )

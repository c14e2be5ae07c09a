"""Spec-file ingestion.

Spec files use a line-oriented ``[section]`` + ``key = value`` format (a
TOML-compatible subset: strings quoted, arrays bracketed, reals in decimal or
scientific notation).  Sections:

``[structure]``
    ``variant`` (natural | paracontact | normal | darboux), ``mode``
    (lie_group | chart; darboux files are always chart), optional ``epsilon``.

``[constants]``
    name = real bindings available to every expression.

``[functions]``
    the structure functions as expression strings or numbers.  Required names
    per variant: paracontact a1..a5; natural a1..a5, b1, b2; normal b1, b2,
    a3, a4, a5; darboux a, b, c -- or the example shortcut, which instead
    takes constants alpha (nonzero), beta, gamma and a function f of x.

``[frame]``
    optional realization: ``xi``, ``e``, ``phie`` as arrays of three
    expression strings (required in chart mode for frame variants).

``[sampling]``
    ``box`` (three [lo, hi] pairs, default [-1, 1]^3), ``points`` (default
    64), ``seed`` (default 7), optional ``fixed_points`` (explicit [x, y, z]
    list) and ``exclude`` (singular loci as [axis, center] pairs, guarded by
    a 0.1-radius band during sampling).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import expr
from .errors import SchemaError
from .frame import (FrameRealization, NaturalFrameSpec, ParacontactFrameSpec,
                    as_field)
from .jets import ChartPoint
from .normal import NormalFrameSpec
from .darboux import DarbouxStructure, ExampleStructure, example_structure
from .sampling import sample_points

VARIANTS = ("natural", "paracontact", "normal", "darboux")

REQUIRED_FUNCTIONS = {
    "natural": ("a1", "a2", "a3", "a4", "a5", "b1", "b2"),
    "paracontact": ("a1", "a2", "a3", "a4", "a5"),
    "normal": ("b1", "b2", "a3", "a4", "a5"),
}

DEFAULT_BOX = ((-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0))
DEFAULT_POINTS = 64
DEFAULT_SEED = 7


@dataclass(frozen=True)
class Sampling:
    box: tuple = DEFAULT_BOX
    points: int = DEFAULT_POINTS
    seed: int = DEFAULT_SEED
    fixed_points: Optional[tuple] = None
    exclude: tuple = ()

    def generate(self, points_override: Optional[int] = None,
                 seed_override: Optional[int] = None) -> list[ChartPoint]:
        if self.fixed_points is not None:
            return [ChartPoint(*xyz) for xyz in self.fixed_points]
        return sample_points(self.box,
                             points_override or self.points,
                             seed_override if seed_override is not None
                             else self.seed,
                             self.exclude)


@dataclass(frozen=True)
class SpecFile:
    variant: str
    mode: str
    epsilon: Optional[int]
    constants: dict
    functions: dict          # name -> float | ExprAst
    frame: Optional[FrameRealization]
    sampling: Sampling
    name: str
    digest: str
    shortcut: bool = False   # darboux example shortcut
    f_expr: object = None    # shortcut free function f(x)


def _require_number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"{where} must be a number, got {value!r}")
    return float(value)


def _parse_function(value, where: str):
    if isinstance(value, str):
        return expr.parse(value)
    return _require_number(value, where)


def _parse_vector(value, where: str):
    if not isinstance(value, list) or len(value) != 3:
        raise SchemaError(f"{where} must be an array of 3 expressions")
    return tuple(_parse_function(v, where) for v in value)


def load_spec(path) -> SpecFile:
    """Parse and validate a spec file; raises SchemaError (or an expression
    SyntaxError carrying its offset) on malformed input."""
    raw = Path(path).read_bytes()
    digest = hashlib.sha256(raw).hexdigest()
    try:
        data = tomllib.loads(raw.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise SchemaError(f"unparseable spec file: {exc}") from None

    structure = data.get("structure")
    if not isinstance(structure, dict):
        raise SchemaError("missing [structure] section")
    variant = structure.get("variant")
    if variant not in VARIANTS:
        raise SchemaError(f"structure.variant must be one of {VARIANTS}, "
                          f"got {variant!r}")
    if variant == "darboux":
        mode = "chart"
    else:
        mode = structure.get("mode")
        if mode not in ("lie_group", "chart"):
            raise SchemaError("structure.mode must be lie_group or chart")
    epsilon = structure.get("epsilon")
    if epsilon is not None:
        if _require_number(epsilon, "structure.epsilon") not in (1.0, -1.0):
            raise SchemaError(f"structure.epsilon must be +1 or -1, got {epsilon}")
        epsilon = int(epsilon)

    constants = {}
    for name, value in data.get("constants", {}).items():
        constants[name] = _require_number(value, f"constants.{name}")

    raw_functions = data.get("functions", {})
    if not isinstance(raw_functions, dict):
        raise SchemaError("[functions] must be a table")
    functions = {name: _parse_function(value, f"functions.{name}")
                 for name, value in raw_functions.items()}

    shortcut = False
    f_expr = None
    if variant == "darboux":
        if all(k in functions for k in ("a", "b", "c")):
            pass
        elif "alpha" in constants:
            shortcut = True
            constants.setdefault("beta", 0.0)
            constants.setdefault("gamma", 0.0)
            f_expr = functions.get("f", 0.0)
        else:
            raise SchemaError("darboux spec needs functions a, b, c or the "
                              "example shortcut constant alpha")
    else:
        for name in REQUIRED_FUNCTIONS[variant]:
            if name not in functions:
                raise SchemaError(f"missing function {name!r} for variant "
                                  f"{variant!r}")
        if mode == "lie_group":
            for name in REQUIRED_FUNCTIONS[variant]:
                if not isinstance(functions[name], float):
                    raise SchemaError(f"functions.{name} must be a constant "
                                      f"in lie_group mode")

    frame = None
    frame_data = data.get("frame")
    if frame_data is not None:
        if not isinstance(frame_data, dict):
            raise SchemaError("[frame] must be a table")
        for key in ("xi", "e", "phie"):
            if key not in frame_data:
                raise SchemaError(f"missing frame vector {key!r}")
        frame = FrameRealization(
            xi=_parse_vector(frame_data["xi"], "frame.xi"),
            e=_parse_vector(frame_data["e"], "frame.e"),
            phie=_parse_vector(frame_data["phie"], "frame.phie"))
    if variant != "darboux" and mode == "chart" and frame is None:
        raise SchemaError("chart mode requires a [frame] realization")

    samp = data.get("sampling", {})
    if not isinstance(samp, dict):
        raise SchemaError("[sampling] must be a table")
    box_raw = samp.get("box")
    if box_raw is None:
        box = DEFAULT_BOX
    else:
        if (not isinstance(box_raw, list) or len(box_raw) != 3
                or any(not isinstance(pair, list) or len(pair) != 2
                       for pair in box_raw)):
            raise SchemaError("sampling.box must be three [lo, hi] pairs")
        box = tuple((float(lo), float(hi)) for lo, hi in box_raw)
        if any(hi <= lo for lo, hi in box):
            raise SchemaError("sampling.box intervals must be nonempty")
    n_points = int(samp.get("points", DEFAULT_POINTS))
    if n_points < 1:
        raise SchemaError("sampling.points must be >= 1")
    seed = int(samp.get("seed", DEFAULT_SEED))
    fixed = samp.get("fixed_points")
    if fixed is not None:
        fixed = tuple(tuple(float(c) for c in xyz) for xyz in fixed)
        if any(len(xyz) != 3 for xyz in fixed):
            raise SchemaError("sampling.fixed_points entries must be [x, y, z]")
    exclude = tuple((str(axis), float(center))
                    for axis, center in samp.get("exclude", ()))
    for axis, _ in exclude:
        if axis not in ("x", "y", "z"):
            raise SchemaError(f"sampling.exclude axis must be x, y or z, "
                              f"got {axis!r}")

    return SpecFile(variant=variant, mode=mode, epsilon=epsilon,
                    constants=constants, functions=functions, frame=frame,
                    sampling=Sampling(box, n_points, seed, fixed, exclude),
                    name=Path(path).name, digest=digest,
                    shortcut=shortcut, f_expr=f_expr)


# Engine-object construction ---------------------------------------------------


def build_frame_spec(sf: SpecFile):
    fn = sf.functions
    if sf.variant == "paracontact":
        return ParacontactFrameSpec(
            a1=fn["a1"], a2=fn["a2"], a3=fn["a3"], a4=fn["a4"], a5=fn["a5"],
            mode=sf.mode, bindings=sf.constants, realization=sf.frame,
            epsilon=sf.epsilon)
    if sf.variant == "natural":
        return NaturalFrameSpec(
            a1=fn["a1"], a2=fn["a2"], a3=fn["a3"], a4=fn["a4"], a5=fn["a5"],
            b1=fn["b1"], b2=fn["b2"], mode=sf.mode, bindings=sf.constants,
            realization=sf.frame, epsilon=sf.epsilon)
    if sf.variant == "normal":
        return NormalFrameSpec(
            b1=fn["b1"], b2=fn["b2"], a3=fn["a3"], a4=fn["a4"], a5=fn["a5"],
            mode=sf.mode, bindings=sf.constants, realization=sf.frame,
            epsilon=sf.epsilon)
    raise SchemaError(f"no frame spec for variant {sf.variant!r}")


def build_darboux_structure(sf: SpecFile):
    """DarbouxStructure for a darboux spec; the shortcut also yields the
    realized example (returned second, else None)."""
    if sf.shortcut:
        ex: ExampleStructure = example_structure(
            sf.constants["alpha"], sf.constants["beta"], sf.constants["gamma"],
            sf.f_expr, extra_bindings=sf.constants)
        return ex.darboux, ex
    fn = sf.functions
    return DarbouxStructure(as_field(fn["a"]), as_field(fn["b"]),
                            as_field(fn["c"]), dict(sf.constants)), None

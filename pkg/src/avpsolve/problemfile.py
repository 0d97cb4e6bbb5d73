"""Loading problem definitions from JSON (schema in ``problem.schema.json``)."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from .core import AvpProblem, BoundaryCondition, Interval, OdeSystem, Segment
from .errors import AvpError, ExpressionError, ProblemFileError
from .expr import compile_function, compile_system
from .reduction import DelaySpec, HighOrderPolyOde, reduce_to_first_order, shift_delay


@lru_cache(maxsize=1)
def problem_schema() -> dict:
    return json.loads(resources.files("avpsolve").joinpath("problem.schema.json").read_text())


def read_problem_file(path: str | Path) -> AvpProblem:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ProblemFileError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ProblemFileError(f"{path}: invalid JSON: {exc}") from exc
    return build_problem(doc)


def _high_order(spec: dict, dimension: int) -> OdeSystem:
    order = spec["order"]
    if order != dimension:
        raise ProblemFileError(f"high_order.order={order} must equal dimension={dimension}")
    if len(spec["coefficients"]) != order:
        raise ProblemFileError(f"high_order needs {order} coefficients, got {len(spec['coefficients'])}")
    coefs = []
    for i, text in enumerate(spec["coefficients"]):
        try:
            coefs.append(compile_function(text, order))
        except ExpressionError as exc:
            raise ProblemFileError(f"high_order.coefficients[{i}]: {exc}") from exc
    try:
        forcing_fn = compile_function(spec.get("forcing", "0"), 0)
    except ExpressionError as exc:
        raise ProblemFileError(f"high_order.forcing: {exc}") from exc
    high = HighOrderPolyOde(
        order=order,
        coefficients=tuple(coefs),
        forcing=lambda x: forcing_fn(x, ()),
        leading=float(spec.get("leading", 1.0)),
    )
    return reduce_to_first_order(high)


def build_problem(doc: dict[str, Any]) -> AvpProblem:
    """Validate a decoded problem document and build the :class:`AvpProblem`."""
    try:
        jsonschema.validate(doc, problem_schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ProblemFileError(f"schema violation at {where}: {exc.message}") from exc

    n = doc["dimension"]
    try:
        if "rhs" in doc:
            if len(doc["rhs"]) != n:
                raise ProblemFileError(f"rhs has {len(doc['rhs'])} expressions, dimension is {n}")
            system = compile_system(doc["rhs"], n)
        elif "segments" in doc:
            segs = []
            for i, seg in enumerate(doc["segments"]):
                if len(seg["rhs"]) != n:
                    raise ProblemFileError(f"segments[{i}].rhs has {len(seg['rhs'])} expressions, dimension is {n}")
                piece = compile_system(seg["rhs"], n)
                segs.append(Segment(Interval(seg["from"], seg["to"]), piece.segments[0].rhs))
            system = OdeSystem(n, tuple(segs))
        else:
            system = _high_order(doc["high_order"], n)
        if "delay" in doc:
            system = shift_delay(system, DelaySpec(doc["delay"]["T"]))
        cond = doc["condition"]
        if len(cond["y"]) != n:
            raise ProblemFileError(f"condition.y has {len(cond['y'])} values, dimension is {n}")
        return AvpProblem(
            system,
            Interval(doc["interval"]["a"], doc["interval"]["c"]),
            BoundaryCondition(cond["x"], cond["y"]),
        )
    except ProblemFileError:
        raise
    except AvpError as exc:
        raise ProblemFileError(str(exc)) from exc

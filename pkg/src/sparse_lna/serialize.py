"""JSON containers for problem instances and candidate points.

Instance layout::

    {"family": "cs" | "mvsk", "n": int, "m": int, "s": int, "seed": int | null,
     "x_true": [...] | null, ...family-specific arrays as nested lists...}

CS instances add ``kind``, ``A``, ``b``, ``C``, ``d`` and ``setup``; MVSK
instances add ``mu``, ``sigma``, ``phi``, ``psi`` and ``lambdas``.  Python's
float repr is round-trip exact, so arrays reload bit-for-bit.
"""
import json
from dataclasses import asdict

import numpy as np

from .problem import Iterate
from .problems.cs import CsInstance, SensingSetup
from .problems.portfolio import MvskInstance


class InstanceFormatError(ValueError):
    pass


def instance_to_dict(problem, seed=None, meta=None):
    out = {"family": problem.family, "n": problem.n, "m": problem.m, "s": problem.s, "seed": seed}
    if isinstance(problem, CsInstance):
        setup = problem.setup
        if seed is None and setup is not None:
            out["seed"] = setup.seed
        out.update(
            kind=problem.kind,
            setup=None if setup is None else asdict(setup),
            A=problem.A.tolist(),
            b=problem.b.tolist(),
            C=problem.C.tolist(),
            d=problem.d.tolist(),
            x_true=None if problem.x_true is None else problem.x_true.tolist(),
        )
    elif isinstance(problem, MvskInstance):
        out.update(
            lambdas=list(problem.lambdas),
            mu=problem.mu.tolist(),
            sigma=problem.sigma.tolist(),
            phi=problem.phi.tolist(),
            psi=problem.psi.tolist(),
            x_true=None,
        )
    else:
        raise InstanceFormatError(f"no JSON container for {type(problem).__name__}")
    if meta:
        out["meta"] = meta
    return out


def instance_from_dict(data):
    try:
        family = data["family"]
        s = int(data["s"])
        if family == "cs":
            n = int(data["n"])
            setup = data.get("setup")
            C = np.asarray(data["C"], dtype=np.float64).reshape(-1, n)
            inst = CsInstance(
                data["A"], data["b"], C, data["d"], s,
                x_true=data.get("x_true"),
                kind=data.get("kind", "custom"),
                setup=None if setup is None else SensingSetup(**setup),
            )
        elif family == "mvsk":
            inst = MvskInstance(data["mu"], data["sigma"], data["phi"], data["psi"], data["lambdas"], s)
        else:
            raise InstanceFormatError(f"unknown family {family!r}")
    except KeyError as exc:
        raise InstanceFormatError(f"instance is missing field {exc.args[0]!r}") from exc
    for key in ("n", "m"):
        if key in data and int(data[key]) != getattr(inst, key):
            raise InstanceFormatError(f"declared {key}={data[key]} disagrees with the arrays")
    return inst


def save_instance(problem, path, seed=None, meta=None):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance_to_dict(problem, seed, meta), fh)
        fh.write("\n")


def load_instance(path):
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InstanceFormatError(f"{path}: not valid JSON ({exc})") from exc
    return instance_from_dict(data)


def save_point(z, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"x": z.x.tolist(), "y": z.y.tolist()}, fh)
        fh.write("\n")


def load_point(path, problem=None):
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if isinstance(data, list):
        data = {"x": data}
    x = np.asarray(data["x"], dtype=np.float64)
    m = problem.m if problem is not None else len(data.get("y", []))
    y = np.asarray(data.get("y", np.zeros(m)), dtype=np.float64)
    z = Iterate(x, y)
    if problem is not None:
        z.check(problem)
    return z

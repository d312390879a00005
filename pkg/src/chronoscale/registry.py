"""Named builtins for the command line: scalar coefficients, forcings,
systems, and nonlinearity models, each parsed from ``name:arg,arg`` strings
or small JSON objects."""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import SchemaError
from .linsys import Forcing, MatrixFunction
from .solver import (AffineBoundedNonlinearity, DecayNonlinearity,
                     NonlinearComponent, NonlinearityModel, rate_coefficient)
from .timescale import TimeScale, scale_catalog

_COEFF_DOCS = {
    "<float>": "constant coefficient p(t) = c",
    "sin": "sin:a,w -> a*sin(w*t)",
    "cos": "cos:a,w -> a*cos(w*t)",
    "expdecay": "expdecay:c,r -> c*exp(-r*t)",
}

_FORCING_DOCS = {
    "zero": "f(t) = 0",
    "const": "const:c[,c2,...] -> constant vector",
    "expdecay": "expdecay:c,r -> c*exp(-r*t) (scalar)",
    "sin": "sin:a,w -> a*sin(w*t) (scalar)",
}

_NONLIN_DOCS = {
    "zero": "a(t,x) = 0; h = 0, c = 0",
    "sin-plus-const": "sin-plus-const:a,c -> a*sin(x) + c (scalar); h = |c|+... declared per parse",
    "cos-sin": "cos-sin:a,c1,c2 -> (a*cos(x2)+c1, a*sin(x1)+c2) (2d)",
    "quadratic-decay": "JSON {c1, c2, h, alpha, beta, gamma} envelope model "
                       "with a(t,x) = c1*x*|x|^alpha + h*exp(-gamma*t)",
}


def parse_coefficient(text: str):
    """A scalar coefficient: a float constant or a named builtin."""
    text = text.strip()
    try:
        return float(text)
    except ValueError:
        pass
    name, _, argstr = text.partition(":")
    args = [float(a) for a in argstr.split(",") if a] if argstr else []
    if name == "sin":
        a, w = (args + [1.0, 1.0])[:2]
        return lambda t: a * math.sin(w * t)
    if name == "cos":
        a, w = (args + [1.0, 1.0])[:2]
        return lambda t: a * math.cos(w * t)
    if name == "expdecay":
        c, r = (args + [1.0, 1.0])[:2]
        return lambda t: c * math.exp(-r * t)
    raise SchemaError(f"unknown coefficient '{text}'")


def parse_forcing(text: str, n: int = 1) -> Forcing:
    text = text.strip()
    name, _, argstr = text.partition(":")
    args = [float(a) for a in argstr.split(",") if a] if argstr else []
    if name == "zero":
        return Forcing.zero(n)
    if name == "const":
        vec = np.array(args) if args else np.ones(n)
        if len(vec) != n:
            raise SchemaError(f"const forcing has {len(vec)} entries, system needs {n}")
        return Forcing.constant(vec)
    if name == "expdecay":
        c, r = (args + [1.0, 1.0])[:2]
        return Forcing(n=1, fn=lambda t: np.array([c * math.exp(-r * t)]))
    if name == "sin":
        a, w = (args + [1.0, 1.0])[:2]
        return Forcing(n=1, fn=lambda t: np.array([a * math.sin(w * t)]))
    raise SchemaError(f"unknown forcing '{text}'")


def parse_system(text: str | dict, scale: TimeScale) -> MatrixFunction:
    """{"A": [[...]]} constant matrix, or {"rates": [...]} for the diagonal
    coefficient matched to exponential rates."""
    if isinstance(text, str):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"bad system JSON: {exc}") from exc
    else:
        obj = text
    if not isinstance(obj, dict):
        raise SchemaError("system descriptor must be a JSON object")
    if "A" in obj:
        return MatrixFunction.constant(np.array(obj["A"], dtype=float))
    if "rates" in obj:
        return rate_coefficient(np.array(obj["rates"], dtype=float), scale)
    raise SchemaError("system descriptor needs 'A' or 'rates'")


def parse_nonlinearity(text: str | dict) -> NonlinearityModel | AffineBoundedNonlinearity | DecayNonlinearity:
    if isinstance(text, str) and text.strip().startswith("{"):
        try:
            text = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"bad nonlinearity JSON: {exc}") from exc
    if isinstance(text, dict):
        kind = text.get("kind", "quadratic-decay")
        if kind == "quadratic-decay":
            c1 = float(text.get("c1", 0.0))
            h = float(text.get("h", 0.0))
            gamma = float(text["gamma"])
            alpha = float(text.get("alpha", 1.0))

            def fn(t, x):
                x = np.atleast_1d(x)
                return c1 * x * np.abs(x) ** alpha + h * math.exp(-gamma * t) * np.ones_like(x)

            return DecayNonlinearity(fn=fn, c1=c1, c2=float(text.get("c2", 0.0)), h=h,
                                     alpha=alpha, beta=float(text.get("beta", gamma)),
                                     gamma=gamma)
        raise SchemaError(f"unknown nonlinearity kind '{kind}'")
    name, _, argstr = text.strip().partition(":")
    args = [float(a) for a in argstr.split(",") if a] if argstr else []
    if name == "zero":
        return NonlinearityModel((NonlinearComponent(
            fn=lambda t, x: np.zeros_like(np.atleast_1d(x)), h=0.0, c=0.0),))
    if name == "sin-plus-const":
        a, c = (args + [0.1, 0.5])[:2]
        return NonlinearityModel((NonlinearComponent(
            fn=lambda t, x: a * np.sin(np.atleast_1d(x)) + c,
            h=abs(c), c=abs(a)),))
    if name == "cos-sin":
        a, c1, c2 = (args + [0.05, 0.2, 0.2])[:3]

        def fn(t, x):
            x = np.atleast_1d(x)
            return np.array([a * math.cos(x[1]) + c1, a * math.sin(x[0]) + c2])

        h = math.hypot(abs(a) + abs(c1), abs(c2))
        return NonlinearityModel((NonlinearComponent(fn=fn, h=h, c=abs(a)),))
    raise SchemaError(f"unknown nonlinearity '{text}'")


def catalog() -> dict:
    return {
        "scales": scale_catalog(),
        "coefficients": dict(_COEFF_DOCS),
        "forcings": dict(_FORCING_DOCS),
        "nonlinearities": dict(_NONLIN_DOCS),
    }

"""Canonical serialization and digests for equations."""

import hashlib
import json

from .core import NeuronEquation


def equation_to_dict(eq):
    return {
        "memory_k": eq.memory_k,
        "threshold2": eq.threshold2,
        "coeffs2": list(eq.coeffs2),
    }


def equation_from_dict(d):
    return NeuronEquation(int(d["memory_k"]), tuple(d["coeffs2"]), int(d["threshold2"]))


def canonical_json(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def equation_digest(eq):
    return hashlib.sha256(canonical_json(equation_to_dict(eq)).encode()).hexdigest()

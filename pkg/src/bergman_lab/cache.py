"""
Portable JSON persistence for :class:`~bergman_lab.model.BergmanModel`.

The file stores the weight, degree cap, basis order, Gram entries (row-major
``[re, im]`` pairs written with ``repr`` precision) and rule parameters.  Two
hashes guard it: ``content_hash`` over everything stored, and ``spec_hash``
over what determines the model (weight, dimension, degree cap, rule).  The
Cholesky factor is recomputed on load, so kernels agree bit for bit.
"""

import hashlib
import json
import logging
import os

import numpy as np

from . import model as md
from . import quadrature as qd
from . import weights as wt
from .config import canonical_json
from .errors import CacheMismatchError

log = logging.getLogger(__name__)

FORMAT = "blab-model"
SCHEMA_VERSION = 1


def spec_hash(spec, n, N, rule):
    key = {"weight": wt.weight_to_json(spec), "n": n, "degree_cap": N, "rule": rule.to_json()}
    return hashlib.sha256(canonical_json(key).encode()).hexdigest()


def _content_hash(payload):
    body = {k: v for k, v in payload.items() if k != "content_hash"}
    return hashlib.sha256(canonical_json(body).encode()).hexdigest()


def model_to_json(model):
    payload = {
        "format": FORMAT,
        "schema_version": SCHEMA_VERSION,
        "weight": wt.weight_to_json(model.spec),
        "n": model.n,
        "degree_cap": model.degree_cap,
        "basis": model.basis.tolist(),
        "gram": [[float(v.real), float(v.imag)] for v in model.gram.reshape(-1)],
        "rule": model.rule.to_json(),
        "spec_hash": spec_hash(model.spec, model.n, model.degree_cap, model.rule),
    }
    payload["content_hash"] = _content_hash(payload)
    return payload


def store(model, path):
    """Write ``model`` to ``path`` (atomically, via a temporary file)."""
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        json.dump(model_to_json(model), fh)
    os.replace(tmp, path)


def model_from_json(payload):
    if payload.get("format") != FORMAT:
        raise CacheMismatchError("not a model cache file")
    if payload.get("content_hash") != _content_hash(payload):
        raise CacheMismatchError("model cache content hash mismatch (file modified or corrupt)")
    n = int(payload["n"])
    spec = wt.weight_from_json(payload["weight"], n)
    rule = qd.rule_from_json(payload["rule"], n)
    N = int(payload["degree_cap"])
    if payload["spec_hash"] != spec_hash(spec, n, N, rule):
        raise CacheMismatchError("stored spec hash does not match the stored weight and rule")
    basis = np.array(payload["basis"], dtype=int).reshape(-1, n)
    B = len(basis)
    gram = np.array([complex(re, im) for re, im in payload["gram"]]).reshape(B, B)
    return md.model_from_gram(spec, N, basis, gram, rule)


def load(path, spec=None, N=None, rule=None):
    """
    Read a model.  When ``spec``, ``N`` and ``rule`` are given the stored
    spec hash must match them, otherwise :class:`CacheMismatchError`.
    """
    with open(path) as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CacheMismatchError(f"model cache {path} is not valid JSON: {exc}") from exc
    if spec is not None:
        want = spec_hash(spec, payload.get("n"), N, rule)
        if payload.get("spec_hash") != want:
            raise CacheMismatchError(f"model cache {path} was built for a different spec")
    return model_from_json(payload)


def load_or_build(path, spec, N, rule):
    """Reuse the cache at ``path`` when it matches, else build and store."""
    if path and os.path.exists(path):
        model = load(path, spec, N, rule)
        log.info("model cache hit: %s", path)
        return model
    model = md.build_model(spec, N, rule)
    if path:
        store(model, path)
        log.info("model cache stored: %s", path)
    return model

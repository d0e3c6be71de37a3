"""JSON conventions shared by the service, the CLI and the file dumps.

Complex scalars travel as two-element arrays [re, im]. Arrays of complex
numbers are lists of such pairs. Field dumps are raw little-endian float64
with a JSON sidecar describing shape and extent; see `write_field_dump`.
"""

import hashlib
import json

import numpy as np


def c2pair(z):
    """Complex scalar -> [re, im] with plain floats."""
    z = complex(z)
    return [float(z.real), float(z.imag)]


def pair2c(p):
    """[re, im] -> complex. Accepts bare reals for convenience."""
    if isinstance(p, (int, float)):
        return complex(p, 0.0)
    if isinstance(p, complex):
        return p
    if len(p) != 2:
        raise ValueError("complex pair must have exactly two entries")
    return complex(float(p[0]), float(p[1]))


def carray2pairs(a):
    return [c2pair(z) for z in np.asarray(a).ravel()]


def pairs2carray(pairs):
    return np.array([pair2c(p) for p in pairs], dtype=complex)


def sig15(x):
    """Round a float through 15 significant digits (reporting convention for
    singular values and similar spectra)."""
    return float("%.15g" % float(x))


def canonical_dumps(obj):
    """Deterministic JSON serialization: sorted keys, no whitespace, repr
    floats (shortest round-trip)."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def sha256_of(obj):
    return hashlib.sha256(canonical_dumps(obj).encode("utf-8")).hexdigest()


def write_field_dump(path_base, field, meta):
    """Write `field` (real 2-D array) as little-endian float64 plus a JSON
    sidecar. `path_base` gets suffixes .f64 and .json.

    meta must describe the geometry (shape is added automatically).
    """
    arr = np.ascontiguousarray(np.asarray(field, dtype=np.float64))
    bin_path = str(path_base) + ".f64"
    side_path = str(path_base) + ".json"
    with open(bin_path, "wb") as fh:
        fh.write(arr.astype("<f8").tobytes(order="C"))
    sidecar = dict(meta)
    sidecar["shape"] = list(arr.shape)
    sidecar["dtype"] = "<f8"
    sidecar["order"] = "C"
    with open(side_path, "w") as fh:
        json.dump(sidecar, fh, sort_keys=True, indent=1)
    return bin_path, side_path


def read_field_dump(path_base):
    """Inverse of write_field_dump. Returns (array, sidecar_dict)."""
    side_path = str(path_base) + ".json"
    bin_path = str(path_base) + ".f64"
    with open(side_path) as fh:
        sidecar = json.load(fh)
    raw = np.fromfile(bin_path, dtype="<f8")
    arr = raw.reshape(sidecar["shape"])
    return arr, sidecar

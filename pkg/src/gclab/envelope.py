"""Result envelopes.

Every service verb returns the same two-layer document:

    {"envelope": {...}, "meta": {"wall_time_s": ..., "envelope_sha256": ...}}

The inner `envelope` is canonical (sorted keys, repr floats, no timing, no
hostnames) so that two runs with identical configs produce bit-identical
bytes; the volatile pieces live in `meta` only. Checks inside the envelope
are uniform {name, value, expected, tolerance, pass, provenance} records.
"""

import importlib.metadata
import platform
import subprocess
import time

from .jsonio import canonical_dumps, sha256_of


def _version_string():
    try:
        base = importlib.metadata.version("gclab")
    except importlib.metadata.PackageNotFoundError:
        base = "0.0.0"
    try:
        head = subprocess.run(
            ["git", "rev-parse", "--short=8", "HEAD"],
            capture_output=True, text=True, timeout=5, check=True,
            cwd=__file__.rsplit("/", 3)[0],
        ).stdout.strip()
        if head:
            return "v%s-g%s" % (base, head)
    except Exception:
        pass
    return "v%s" % base


_VERSION = None


def version_string():
    global _VERSION
    if _VERSION is None:
        _VERSION = _version_string()
    return _VERSION


def check(name, value, expected=None, tolerance=None, passed=None, provenance=""):
    """One uniform check record. `value`/`expected` must already be JSON-safe
    (floats, [re,im] pairs, bools, strings)."""
    rec = {
        "name": str(name),
        "value": value,
        "expected": expected,
        "tolerance": tolerance,
        "pass": bool(passed) if passed is not None else None,
        "provenance": provenance,
    }
    return rec


class EnvelopeBuilder:
    """Accumulates checks + data for one verb invocation."""

    def __init__(self, verb, config_echo):
        self.verb = verb
        self.config_echo = config_echo
        self.checks = []
        self.data = {}
        self._t0 = time.monotonic()

    def add_check(self, name, value, expected=None, tolerance=None,
                  passed=None, provenance=""):
        self.checks.append(check(name, value, expected, tolerance, passed,
                                 provenance))

    def all_passed(self):
        return all(c["pass"] is not False for c in self.checks)

    def finish(self):
        envelope = {
            "verb": self.verb,
            "version": version_string(),
            "platform": {
                "python": platform.python_version(),
                "machine": platform.machine(),
            },
            "config": self.config_echo,
            "checks": self.checks,
            "data": self.data,
            "all_passed": self.all_passed(),
        }
        canonical_dumps(envelope)  # raises early if anything non-JSON leaked
        meta = {
            "wall_time_s": time.monotonic() - self._t0,
            "envelope_sha256": sha256_of(envelope),
        }
        return {"envelope": envelope, "meta": meta}


def canonical_envelope_bytes(doc):
    """Bytes of the canonical inner envelope of a full result document."""
    return canonical_dumps(doc["envelope"]).encode("utf-8")

"""HTTP front end.

One POST endpoint per verb, mounted under /api with the dotted verb name
turned into a path (curve.q-dim -> /api/curve/q-dim). Request bodies are
the pydantic models from `models`; responses carry the full result
document plus the exit code the CLI should propagate:

    {"envelope": {...}, "meta": {...}, "exit_code": 0 | 1}

Config rejections (schema or semantic) surface as HTTP 422.
"""

from fastapi import FastAPI, HTTPException

from ..envelope import version_string
from ..errors import ConfigInvalid
from .models import REQUEST_MODELS
from .runner import execute_validated

app = FastAPI(title="gclab", version=version_string(),
              description="Constant-curvature surface functionals, "
                          "singular Liouville diagnostics, and "
                          "hyperelliptic divisor algebra.")


@app.get("/api/health")
def health():
    return {"status": "ok", "version": version_string(),
            "verbs": sorted(REQUEST_MODELS)}


def _make_endpoint(verb, model_cls):
    def endpoint(body: model_cls):
        try:
            doc, code = execute_validated(verb, body)
        except ConfigInvalid as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        doc["exit_code"] = code
        return doc

    endpoint.__name__ = "run_" + verb.replace(".", "_").replace("-", "_")
    endpoint.__doc__ = "Run the %s verb." % verb
    return endpoint


for _verb, _cls in sorted(REQUEST_MODELS.items()):
    app.post("/api/" + _verb.replace(".", "/"))(_make_endpoint(_verb, _cls))

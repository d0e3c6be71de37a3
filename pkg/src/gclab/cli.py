"""Command-line front end.

Thin client over the HTTP service: every subcommand builds one JSON
request, posts it to the verb's endpoint, prints the check table, writes
the result envelope, and exits with the service's exit code. By default
the service runs in-process (ASGI transport, no socket); `--server URL`
switches to a remote instance, and `gclab serve` starts one.

Exit codes: 0 all checks passed; 1 a check failed or a numerical module
aborted (partial envelope still written); 2 the config was rejected
(schema violation, unknown key, malformed JSON) with no output files.
"""

import asyncio
import json
import os
import sys

import click
import httpx

from .jsonio import canonical_dumps


def _fail_config(msg):
    click.echo("config error: %s" % msg, err=True)
    sys.exit(2)


def _cpair(text):
    """'re,im' or 're' -> [re, im]."""
    parts = str(text).split(",")
    try:
        if len(parts) == 1:
            return [float(parts[0]), 0.0]
        if len(parts) == 2:
            return [float(parts[0]), float(parts[1])]
    except ValueError:
        pass
    _fail_config("expected a complex 're,im' pair, got %r" % text)


def _floats(text):
    try:
        return [float(p) for p in str(text).split(",") if p.strip()]
    except ValueError:
        _fail_config("expected comma-separated floats, got %r" % text)


def _json_arg(text, what):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        _fail_config("%s is not valid JSON: %s" % (what, exc))


def _json_file(path, what):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        _fail_config("cannot read %s: %s" % (what, exc))
    except json.JSONDecodeError as exc:
        _fail_config("%s is not valid JSON: %s" % (what, exc))


def _base_payload(config):
    if config:
        payload = _json_file(config, "--config file")
        if not isinstance(payload, dict):
            _fail_config("--config must hold a JSON object")
        return payload
    return {}


def _apply_common(payload, seed, out_dir, dump_fields, label):
    if seed is not None:
        payload["seed"] = seed
    out = payload.setdefault("output", {})
    if out_dir is not None:
        out["out_dir"] = out_dir
    if dump_fields:
        out["dump_fields"] = True
    if label:
        out["label"] = label
    return payload


def _post(ctx, verb, payload):
    path = "/api/" + verb.replace(".", "/")
    server = ctx.obj.get("server")
    try:
        if server:
            with httpx.Client(base_url=server.rstrip("/"),
                              timeout=None) as client:
                resp = client.post(path, json=payload)
        else:
            from .service import app

            async def go():
                transport = httpx.ASGITransport(app=app)
                async with httpx.AsyncClient(
                        transport=transport, timeout=None,
                        base_url="http://gclab.internal") as client:
                    return await client.post(path, json=payload)

            resp = asyncio.run(go())
    except httpx.HTTPError as exc:
        click.echo("transport error: %s" % exc, err=True)
        sys.exit(1)
    if resp.status_code == 422:
        detail = resp.json().get("detail", resp.text)
        _fail_config(detail)
    if resp.status_code != 200:
        click.echo("service error %d: %s" % (resp.status_code, resp.text),
                   err=True)
        sys.exit(1)
    return resp.json()


def _emit_and_exit(verb, doc):
    code = int(doc.pop("exit_code", 0))
    env = doc["envelope"]
    for c in env["checks"]:
        if c["pass"] is None:
            mark = "  --"
        else:
            mark = "PASS" if c["pass"] else "FAIL"
        line = "%s  %s = %s" % (mark, c["name"], _short(c["value"]))
        if c["expected"] is not None:
            line += "  (expected %s" % _short(c["expected"])
            if c["tolerance"]:
                line += " +- %.3g" % float(c["tolerance"])
            line += ")"
        click.echo(line)
    out_dir = (env["config"].get("output") or {}).get("out_dir") or "."
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, verb.replace(".", "-") + "-envelope.json")
    with open(path, "w") as fh:
        fh.write(json.dumps(doc, sort_keys=True, indent=1))
        fh.write("\n")
    click.echo("envelope: %s  (sha256 %s)"
               % (path, doc["meta"]["envelope_sha256"][:16]))
    sys.exit(code)


def _short(value):
    if isinstance(value, float):
        return "%.10g" % value
    if isinstance(value, list) and len(value) == 2 and \
            all(isinstance(v, (int, float)) for v in value):
        return "%.10g%+.10gi" % (value[0], value[1])
    s = canonical_dumps(value) if not isinstance(value, str) else value
    return s if len(s) <= 48 else s[:45] + "..."


def _common_options(fn):
    for deco in (
        click.option("--config", type=click.Path(), default=None,
                     help="JSON file with the full request body; explicit "
                          "flags override its keys."),
        click.option("--seed", type=int, default=None,
                     help="Seed for randomized samples and searches."),
        click.option("--out-dir", type=click.Path(), default=None,
                     help="Directory for the envelope and any field dumps."),
        click.option("--dump-fields", is_flag=True, default=False,
                     help="Write solution fields as .f64 + JSON sidecar."),
        click.option("--label", default="", help="Prefix for dump files."),
    ):
        fn = deco(fn)
    return fn


def _run(ctx, verb, payload, seed, out_dir, dump_fields, label):
    _apply_common(payload, seed, out_dir, dump_fields, label)
    _emit_and_exit(verb, _post(ctx, verb, payload))


@click.group()
@click.option("--server", default=None, envvar="GCLAB_SERVER",
              help="Base URL of a running service; default is in-process.")
@click.pass_context
def main(ctx, server):
    """Surface functionals, Liouville diagnostics, curve algebra."""
    ctx.ensure_object(dict)
    ctx.obj["server"] = server


@main.command("serve")
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8008)
def serve(host, port):
    """Start the HTTP service."""
    import uvicorn

    from .service import app
    uvicorn.run(app, host=host, port=port)


@main.command("verify-appendix1")
@click.option("--A", "a_val", default=None, help="Complex pair re,im.")
@click.option("--B", "b_val", default=None, help="Complex pair re,im.")
@click.option("--tol", type=float, default=None,
              help="Relative tolerance for the two integral checks.")
@click.option("--samples", type=int, default=None,
              help="Random (A,B,z) triples for the symmetry check.")
@_common_options
@click.pass_context
def verify_appendix1(ctx, a_val, b_val, tol, samples, config, seed, out_dir,
                     dump_fields, label):
    """Closed-form integral identities of the planar solution family."""
    payload = _base_payload(config)
    if a_val is not None:
        payload["A"] = _cpair(a_val)
    if b_val is not None:
        payload["B"] = _cpair(b_val)
    if tol is not None:
        payload["tol"] = tol
    if samples is not None:
        payload["n_symmetry_samples"] = samples
    _run(ctx, "verify-appendix1", payload, seed, out_dir, dump_fields, label)


# -- curve group ---------------------------------------------------------------


@main.group()
def curve():
    """Quadratic differentials on hyperelliptic curves y^2 = f(x)."""


def _curve_payload(payload, genus, f_coeffs):
    if genus is not None or f_coeffs is not None:
        spec = payload.setdefault("curve", {})
        if genus is not None:
            spec["genus"] = genus
        if f_coeffs is not None:
            spec["f_coeffs"] = _json_arg(f_coeffs, "--f-coeffs")
    return payload


def _curve_options(fn):
    for deco in (
        click.option("--genus", type=int, default=None),
        click.option("--f-coeffs", default=None,
                     help="JSON list of coefficients (ascending), entries "
                          "as numbers or [re,im] pairs."),
    ):
        fn = deco(fn)
    return fn


@curve.command("basis")
@_curve_options
@_common_options
@click.pass_context
def curve_basis(ctx, genus, f_coeffs, config, seed, out_dir, dump_fields,
                label):
    """Monomial basis bookkeeping and dimension checks."""
    payload = _curve_payload(_base_payload(config), genus, f_coeffs)
    _run(ctx, "curve.basis", payload, seed, out_dir, dump_fields, label)


@curve.command("q-dim")
@_curve_options
@click.option("--divisor", default=None,
              help='JSON list of points: [{"x":[re,im],"sheet":1,"mult":1},'
                   ' {"at_infinity":true}, ...].')
@click.option("--expected-dim", type=int, default=None)
@_common_options
@click.pass_context
def curve_qdim(ctx, genus, f_coeffs, divisor, expected_dim, config, seed,
               out_dir, dump_fields, label):
    """Dimension of the constraint subspace Q(D)."""
    payload = _curve_payload(_base_payload(config), genus, f_coeffs)
    if divisor is not None:
        payload["divisor"] = _json_arg(divisor, "--divisor")
    if expected_dim is not None:
        payload["expected_dim"] = expected_dim
    _run(ctx, "curve.q-dim", payload, seed, out_dir, dump_fields, label)


@curve.command("kodaira")
@_curve_options
@click.option("--points", default=None, help="JSON list of points.")
@_common_options
@click.pass_context
def curve_kodaira(ctx, genus, f_coeffs, points, config, seed, out_dir,
                  dump_fields, label):
    """Projective jet map values and involution behavior."""
    payload = _curve_payload(_base_payload(config), genus, f_coeffs)
    if points is not None:
        payload["points"] = _json_arg(points, "--points")
    _run(ctx, "curve.kodaira", payload, seed, out_dir, dump_fields, label)


@curve.command("weierstrass")
@_curve_options
@click.option("--points", default=None,
              help="JSON list of points; default is the ramification locus.")
@_common_options
@click.pass_context
def curve_weierstrass(ctx, genus, f_coeffs, points, config, seed, out_dir,
                      dump_fields, label):
    """Maximal vanishing orders of the quadratic-differential system."""
    payload = _curve_payload(_base_payload(config), genus, f_coeffs)
    if points is not None:
        payload["points"] = _json_arg(points, "--points")
    _run(ctx, "curve.weierstrass", payload, seed, out_dir, dump_fields, label)


@curve.command("secant-test")
@_curve_options
@click.option("--covector", default=None,
              help="JSON list of covector coefficients.")
@click.option("--nu", type=click.IntRange(1, 2), default=None)
@click.option("--member-tol", type=float, default=None)
@_common_options
@click.pass_context
def curve_secant(ctx, genus, f_coeffs, covector, nu, member_tol, config,
                 seed, out_dir, dump_fields, label):
    """Secant-variety membership search with certificate."""
    payload = _curve_payload(_base_payload(config), genus, f_coeffs)
    if covector is not None:
        payload["covector"] = _json_arg(covector, "--covector")
    if nu is not None:
        payload["nu"] = nu
    if member_tol is not None:
        payload["member_tol"] = member_tol
    _run(ctx, "curve.secant-test", payload, seed, out_dir, dump_fields, label)


@curve.command("decompose")
@_curve_options
@click.option("--divisor", default=None, help="JSON list of points.")
@click.option("--alpha", default=None,
              help="JSON list of coefficient pairs for the covector.")
@_common_options
@click.pass_context
def curve_decompose(ctx, genus, f_coeffs, divisor, alpha, config, seed,
                    out_dir, dump_fields, label):
    """Dual decomposition of a covector against a divisor."""
    payload = _curve_payload(_base_payload(config), genus, f_coeffs)
    if divisor is not None:
        payload["divisor"] = _json_arg(divisor, "--divisor")
    if alpha is not None:
        payload["alpha"] = _json_arg(alpha, "--alpha")
    _run(ctx, "curve.decompose", payload, seed, out_dir, dump_fields, label)


# -- liouville group -------------------------------------------------------------


@main.group()
def liouville():
    """Singular Liouville disk problems and blow-up diagnostics."""


def _liouville_solve_flags(fn):
    for deco in (
        click.option("--profile", type=click.Choice(["bubble", "collapse"]),
                     default=None),
        click.option("--delta", type=float, default=None),
        click.option("--n", type=int, default=None),
        click.option("--lam", type=float, default=None,
                     help="Bubble concentration parameter."),
        click.option("--t", type=float, default=None,
                     help="Zero-collapse parameter."),
        click.option("--tol", type=float, default=None),
    ):
        fn = deco(fn)
    return fn


def _liouville_payload(payload, profile, delta, n, lam, t, tol):
    for key, val in (("profile", profile), ("delta", delta), ("n", n),
                     ("lam", lam), ("t", t), ("tol", tol)):
        if val is not None:
            payload[key] = val
    return payload


@liouville.command("solve")
@_liouville_solve_flags
@_common_options
@click.pass_context
def liouville_solve(ctx, profile, delta, n, lam, t, tol, config, seed,
                    out_dir, dump_fields, label):
    """Solve one disk problem against a closed-form trace."""
    payload = _liouville_payload(_base_payload(config), profile, delta, n,
                                 lam, t, tol)
    _run(ctx, "liouville.solve", payload, seed, out_dir, dump_fields, label)


@liouville.command("family")
@click.option("--schedule", default=None,
              help="Comma-separated parameter values, steepening order.")
@click.option("--profile", type=click.Choice(["bubble", "collapse"]),
              default=None)
@click.option("--delta", type=float, default=None)
@click.option("--n", type=int, default=None)
@click.option("--tol", type=float, default=None)
@_common_options
@click.pass_context
def liouville_family(ctx, schedule, profile, delta, n, tol, config, seed,
                     out_dir, dump_fields, label):
    """Warm-started continuation along a steepening schedule."""
    payload = _base_payload(config)
    if schedule is not None:
        payload["schedule"] = _floats(schedule)
    for key, val in (("profile", profile), ("delta", delta), ("n", n),
                     ("tol", tol)):
        if val is not None:
            payload[key] = val
    _run(ctx, "liouville.family", payload, seed, out_dir, dump_fields, label)


@liouville.command("mass")
@_liouville_solve_flags
@click.option("--center", default=None, help="Complex pair re,im.")
@click.option("--r-max", type=float, default=None)
@click.option("--levels", type=int, default=None)
@click.option("--flat-tol", type=float, default=None)
@_common_options
@click.pass_context
def liouville_mass(ctx, profile, delta, n, lam, t, tol, center, r_max,
                   levels, flat_tol, config, seed, out_dir, dump_fields,
                   label):
    """Local mass over dyadic radii with plateau detection."""
    payload = _base_payload(config)
    solve_part = payload.setdefault("solve", {})
    _liouville_payload(solve_part, profile, delta, n, lam, t, tol)
    if center is not None:
        payload["center"] = _cpair(center)
    for key, val in (("r_max", r_max), ("levels", levels),
                     ("flat_tol", flat_tol)):
        if val is not None:
            payload[key] = val
    _run(ctx, "liouville.mass", payload, seed, out_dir, dump_fields, label)


@liouville.command("rescale")
@_liouville_solve_flags
@click.option("--tau", type=float, required=True)
@click.option("--n-exponent", type=int, default=None,
              help="Zero order n in the 2(n+1) ln tau shift.")
@click.option("--target-delta", type=float, default=None)
@_common_options
@click.pass_context
def liouville_rescale(ctx, profile, delta, n, lam, t, tol, tau, n_exponent,
                      target_delta, config, seed, out_dir, dump_fields,
                      label):
    """Zoom transform with the mass-preservation check."""
    payload = _base_payload(config)
    solve_part = payload.setdefault("solve", {})
    _liouville_payload(solve_part, profile, delta, n, lam, t, tol)
    payload["tau"] = tau
    if n_exponent is not None:
        payload["n_exponent"] = n_exponent
    if target_delta is not None:
        payload["target_delta"] = target_delta
    _run(ctx, "liouville.rescale", payload, seed, out_dir, dump_fields, label)


# -- donaldson group --------------------------------------------------------------


@main.group()
def donaldson():
    """Constant-curvature surface functional on the symmetric octagon."""


def _donaldson_flags(fn):
    for deco in (
        click.option("--n", type=int, default=None, help="Grid resolution."),
        click.option("--beta", type=click.Path(), default=None,
                     help="JSON file with polynomial seed coefficients."),
        click.option("--tol", type=float, default=None),
        click.option("--tol-hol", type=float, default=None,
                     help="Escalate when the holomorphy residual exceeds "
                          "this (reported only by default)."),
    ):
        fn = deco(fn)
    return fn


def _donaldson_payload(payload, n, beta, tol, tol_hol):
    opts = payload.setdefault("options", {})
    if n is not None:
        opts["n"] = n
    if beta is not None:
        opts["beta_seed"] = _json_file(beta, "--beta seed file")
    if tol is not None:
        opts["tol"] = tol
    if tol_hol is not None:
        opts["tol_hol"] = tol_hol
    return payload


@donaldson.command("minimize")
@click.option("--t", "t_val", type=float, default=None,
              help="Curvature parameter, must be positive.")
@_donaldson_flags
@_common_options
@click.pass_context
def donaldson_minimize(ctx, t_val, n, beta, tol, tol_hol, config, seed,
                       out_dir, dump_fields, label):
    """Alternating minimization at fixed t."""
    payload = _donaldson_payload(_base_payload(config), n, beta, tol, tol_hol)
    if t_val is not None:
        payload["t"] = t_val
    _run(ctx, "donaldson.minimize", payload, seed, out_dir, dump_fields,
         label)


@donaldson.command("sweep-t")
@click.option("--schedule", default=None,
              help="Comma-separated decreasing t values.")
@_donaldson_flags
@_common_options
@click.pass_context
def donaldson_sweep(ctx, schedule, n, beta, tol, tol_hol, config, seed,
                    out_dir, dump_fields, label):
    """Warm-started sweep with defect-measure monotonicity flags."""
    payload = _donaldson_payload(_base_payload(config), n, beta, tol, tol_hol)
    if schedule is not None:
        payload["schedule"] = _floats(schedule)
    _run(ctx, "donaldson.sweep-t", payload, seed, out_dir, dump_fields, label)


@donaldson.command("involution-check")
@click.option("--t", "t_val", type=float, default=None)
@_donaldson_flags
@_common_options
@click.pass_context
def donaldson_involution(ctx, t_val, n, beta, tol, tol_hol, config, seed,
                         out_dir, dump_fields, label):
    """Functional and data gaps under the hyperelliptic involution."""
    payload = _donaldson_payload(_base_payload(config), n, beta, tol, tol_hol)
    if t_val is not None:
        payload["t"] = t_val
    _run(ctx, "donaldson.involution-check", payload, seed, out_dir,
         dump_fields, label)


@donaldson.command("pairing")
@click.option("--beta", type=click.Path(), default=None,
              help="JSON seed file for the dual class.")
@click.option("--alpha", type=click.Path(), default=None,
              help="JSON seed file for the probe differential.")
@click.option("--eta-coeffs", default=None,
              help="JSON list of gauge coefficients for the exactness "
                   "perturbation check.")
@click.option("--gauss-order", type=int, default=None)
@_common_options
@click.pass_context
def donaldson_pairing(ctx, beta, alpha, eta_coeffs, gauss_order, config,
                      seed, out_dir, dump_fields, label):
    """Duality pairing on the spectral wedge quadrature."""
    payload = _base_payload(config)
    if beta is not None:
        payload["beta_seed"] = _json_file(beta, "--beta seed file")
    if alpha is not None:
        payload["alpha_seed"] = _json_file(alpha, "--alpha seed file")
    if eta_coeffs is not None:
        payload["eta_coeffs"] = _json_arg(eta_coeffs, "--eta-coeffs")
    if gauss_order is not None:
        payload["gauss_order"] = gauss_order
    _run(ctx, "donaldson.pairing", payload, seed, out_dir, dump_fields, label)


if __name__ == "__main__":
    main()

"""Command-line front end: ``cylspec <command> [--config F] [--out D] [--seed N] [--format F]``."""
import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import cylinder, essential, io, pipeline, profiles
from .config import FORMATS, load_config
from .errors import (BracketFailure, ConfigError, ConvergenceFailure, CylSpecError,
                     GridTooShort, GridTooSmall, InvalidParameter, InvalidWindow,
                     NoPeriodicOrbit, NotHyperbolic, NotRightOfEssential,
                     SingularFactorization, Unsupported, WeightOverflow)

EXIT_OK, EXIT_CONFIG, EXIT_CONVERGENCE, EXIT_HYPOTHESIS = 0, 2, 3, 4
DISPERSION_TOL = 1e-8


def exit_code_for(err):
    if isinstance(err, (ConvergenceFailure, BracketFailure, SingularFactorization)):
        return EXIT_CONVERGENCE
    if isinstance(err, (NotRightOfEssential, NotHyperbolic)):
        return EXIT_HYPOTHESIS
    if isinstance(err, (ConfigError, InvalidParameter, NoPeriodicOrbit, GridTooSmall,
                        GridTooShort, WeightOverflow, Unsupported, InvalidWindow)):
        return EXIT_CONFIG
    return EXIT_CONFIG if isinstance(err, CylSpecError) else 1


class Outputs:
    """Collects artifacts during a command and writes them in one pass at the end."""

    def __init__(self, formats):
        self.formats = set(formats)
        self.items = []

    def add(self, name, fmt, writer):
        """``fmt=None`` marks an artifact written regardless of --format."""
        self.items.append((name, fmt, writer))

    def write(self, out_dir):
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        written = []
        for name, fmt, writer in self.items:
            if fmt is None or fmt in self.formats:
                writer(out_dir / name)
                written.append(name)
        return written


def _shift(cfg, default):
    sh = cfg["solver"]["shift"]
    if sh is None:
        return default
    if isinstance(sh, list):
        return complex(sh[0], sh[1])
    return complex(sh)


class Context:
    """Lazily built objects shared by the commands of one run."""

    def __init__(self, cfg):
        self.cfg = cfg
        self._cache = {}

    def _get(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    @property
    def f(self):
        return profiles.make_cubic(self.cfg["nonlinearity"]["a"])

    @property
    def c(self):
        if self.cfg.kind == "allen-cahn":
            return self.front.c
        return float(self.cfg["problem"]["c"])

    @property
    def front(self):
        return self._get("front", lambda: profiles.exact_front(self.cfg["nonlinearity"]["a"]))

    @property
    def wave(self):
        w = self.cfg["wave"]
        return self._get("wave", lambda: profiles.periodic_wave(self.f, w["L"], w["tol"]))

    @property
    def Z(self):
        return float(self.cfg["grid"]["Z"])

    def _build_potential(self):
        cfg = self.cfg
        p, g = cfg["potential"], cfg["grid"]
        if p["source"] == "file":
            V = io.read_potential(p["path"])
        elif cfg.kind == "allen-cahn":
            V = profiles.front_potential(self.front, pipeline.front_grid(self.Z, g["h"]))
        else:
            x = profiles.interior_grid(cfg["wave"]["L"], g["n_x"], g["bc_x"])
            z = profiles.axial_grid(self.Z, g["n_z"], "dirichlet")
            V = profiles.synth_example_potential(self.f, self.wave, p["alpha"], x, z, g["bc_x"])
        if p["bump_height"] and cfg.kind == "cylinder" and p["source"] == "synthetic":
            V = profiles.add_bump(V, p["bump_height"], p["bump_width"])
        return V

    @property
    def V(self):
        return self._get("V", self._build_potential)

    @property
    def default_shift(self):
        return 0.05 if self.cfg.kind == "allen-cahn" else self.sup_re_ess + 1.0

    @property
    def sup_re_ess(self):
        return self.limits[0]

    @property
    def limits(self):
        return self._get("limits", lambda: pipeline.sup_re_ess(self.V))

    @property
    def study(self):
        s = self.cfg["solver"]
        return self._get("study", lambda: pipeline.cylinder_study(
            self.V, self.c, k=s["k"], shift=_shift(self.cfg, self.default_shift),
            seed=self.cfg.seed, tol=s["tol"]))


# ------------------------------------------------------------------ commands

def cmd_wave(ctx, out):
    if ctx.cfg.kind == "allen-cahn":
        fr = ctx.front
        z = pipeline.front_grid(ctx.Z, ctx.cfg["grid"]["h"])
        u = fr.profile(z)
        summary = {"kind": "front", "a": fr.f.a, "c": fr.c, "limits": list(fr.limits),
                   "residual": fr.residual(z), "u_at_0": float(fr.profile(0.0))}
        out.add("front.csv", "csv", lambda p: io.write_profile(p, z, u))
        out.add("front.json", "json", lambda p: io.write_json(p, summary))
        return summary, EXIT_OK
    w = ctx.wave
    summary = {"kind": "standing-wave", "a": w.f.a, "L": w.L, "L_min": profiles.min_period(w.f),
               "E": w.E, "turning_points": list(w.turning_points), "residual": w.residual(),
               "periodicity_gap": abs(float(w.w[0] - w.w[-1]))}
    out.add("wave.csv", "csv", lambda p: io.write_profile(p, w.x, w.w, label="x"))
    out.add("wave.json", "json", lambda p: io.write_json(p, summary))
    return summary, EXIT_OK


def cmd_hypotheses(ctx, out):
    hy = ctx.cfg["hypotheses"]
    rep = profiles.check_hypotheses(ctx.V, hy["tol_sup"], hy["window"])
    summary = rep.summary()
    summary["pass"] = rep.passed
    V = ctx.V
    out.add("potential.json", "json", lambda p: io.write_potential(p, V))
    out.add("hypotheses.json", "json", lambda p: io.write_json(p, summary))
    out.add("g_plus.csv", "csv", lambda p: io.write_profile(p, rep.z_plus, rep.g_plus))
    out.add("g_minus.csv", "csv", lambda p: io.write_profile(p, -rep.z_minus, rep.g_minus))
    return summary, EXIT_OK if rep.passed else EXIT_HYPOTHESIS


def cmd_essential(ctx, out):
    e = ctx.cfg["essential"]
    _, sp, sm = ctx.limits
    desc = essential.dispersion_curves(sp, sm, ctx.c, e["s_max"], e["n_samples"])
    summary = desc.summary()
    summary.update({"sup_plus": desc.sup_plus, "sup_minus": desc.sup_minus})
    out.add("curves.csv", "csv", lambda p: io.write_curves(p, desc))
    out.add("essential.json", "json", lambda p: io.write_json(p, summary))
    out.add("sturm_plus.json", "json", lambda p: io.write_json(p, sp.to_dict()))
    out.add("sturm_minus.json", "json", lambda p: io.write_json(p, sm.to_dict()))
    if not ctx.V.zero_dim:
        x = ctx.V.x_grid
        out.add("sturm_plus_vectors.csv", "csv", lambda p: io.write_eigenvectors(p, x, sp.eigenvectors))
        out.add("sturm_minus_vectors.csv", "csv", lambda p: io.write_eigenvectors(p, x, sm.eigenvectors))
    out.add("essential.svg", "svg", lambda p: io.write_dispersion_svg(p, desc))
    return summary, EXIT_OK


def cmd_eigs(ctx, out):
    st = ctx.study
    eig = st.eig.to_dict()
    real = st.realness.to_dict()
    real["all_max_imag"] = float(np.max(np.abs(st.eig.eigenvalues.imag)))
    out.add("eigen.json", "json", lambda p: io.write_json(p, eig))
    out.add("realness.json", "json", lambda p: io.write_json(p, real))
    V = ctx.V
    out.add("eigenvector.csv", "csv",
            lambda p: io.write_grid_vector(p, st.op, V.x_grid, V.z_grid, st.eig.vectors[:, 0]))
    if ctx.cfg["output"]["matrix_market"]:
        out.add("operator.mtx", None, lambda p: st.op.write_matrix_market(p))
    summary = {"eigen": eig, "realness": real}
    return summary, EXIT_OK


def cmd_decay(ctx, out):
    st = ctx.study
    try:
        d = pipeline.cylinder_decay(st, ctx.Z)
    except NotRightOfEssential as err:
        flagged = {"pass": False, "skipped": str(err)}
        out.add("decay.json", "json", lambda p: io.write_json(p, flagged))
        out.add("gronwall.json", "json", lambda p: io.write_json(p, flagged))
        return {"decay": flagged, "gronwall": flagged}, EXIT_HYPOTHESIS
    c = ctx.c
    fit_ok = abs(c) / 2.0 < d.decay.delta_hat <= 1.1 * d.bound
    decay = {"delta_hat": d.decay.delta_hat, "M_hat": d.decay.M_hat,
             "fit_quality": d.decay.fit_quality, "pass": bool(fit_ok),
             "window": list(d.decay.window), "lambda0": d.lam0, "alpha_star": d.alpha_star,
             "sqrt_alpha_star": d.bound, "half_speed": abs(c) / 2.0,
             "delta_plus": d.decay_plus.delta_hat, "delta_minus": d.decay_minus.delta_hat}
    gr = d.gronwall
    gronwall = {"delta_hat": gr.delta_hat, "M_hat": gr.N_hat, "fit_quality": None,
                "pass": gr.passed, "nu": d.nu, "M": d.M, "max_violation": gr.max_violation,
                "tolerance": gr.tolerance}
    out.add("decay.json", "json", lambda p: io.write_json(p, decay))
    out.add("gronwall.json", "json", lambda p: io.write_json(p, gronwall))
    ok = fit_ok and gr.passed
    return {"decay": decay, "gronwall": gronwall}, EXIT_OK if ok else EXIT_HYPOTHESIS


def dispersion_potential(ctx):
    """The - limit profile, constant in z on a periodic grid of period P."""
    dsp = ctx.cfg["dispersion"]
    n_z, P = dsp["n_z"], dsp["P"]
    z = profiles.axial_grid(P / 2.0, n_z, "periodic")
    V = ctx.V
    vals = np.repeat(V.v_minus[:, None], n_z, axis=1)
    return profiles.CylinderPotential(V.x_grid, z, vals, V.v_minus, V.v_minus, V.bc_x)


def cmd_dispersion_check(ctx, out):
    dsp = ctx.cfg["dispersion"]
    Vp = dispersion_potential(ctx)
    match, res = cylinder.dispersion_check(Vp, dsp["c"], k=dsp["k"], seed=ctx.cfg.seed, details=True)
    summary = {"distance": match.distance, "tol": DISPERSION_TOL,
               "pass": bool(match.distance <= DISPERSION_TOL), "c": dsp["c"],
               "n_z": dsp["n_z"], "P": dsp["P"],
               "eigenvalues": [{"re": float(l.real), "im": float(l.imag)} for l in res.eigenvalues],
               "continuum_gap": match.continuum_gap.tolist()}
    out.add("dispersion.json", "json", lambda p: io.write_json(p, summary))
    return summary, EXIT_OK if summary["pass"] else EXIT_HYPOTHESIS


def cmd_report(ctx, out):
    timings = {}
    sections = {}
    code = EXIT_OK
    sub = Outputs(())  # sub-command artifacts are folded into the report
    for name, fn in (("hypotheses", cmd_hypotheses), ("essential", cmd_essential),
                     ("dispersion_check", cmd_dispersion_check), ("eigs", cmd_eigs),
                     ("decay", cmd_decay)):
        t0 = time.perf_counter()
        sections[name], rc = fn(ctx, sub)
        timings[name] = time.perf_counter() - t0
        code = max(code, rc)
    _, sp, sm = ctx.limits
    report = {
        "config": ctx.cfg.data,
        "hypotheses": sections["hypotheses"],
        "sturm_sup": {"plus": sp.sup, "minus": sm.sup},
        "sup_re_ess": ctx.sup_re_ess,
        "dispersion_check": {k: sections["dispersion_check"][k] for k in ("distance", "pass", "tol")},
        "essential": sections["essential"],
        "eigen": sections["eigs"]["eigen"],
        "realness": sections["eigs"]["realness"],
        "decay": sections["decay"]["decay"],
        "gronwall": sections["decay"]["gronwall"],
    }
    e = ctx.cfg["essential"]
    desc = essential.dispersion_curves(sp, sm, ctx.c, e["s_max"], e["n_samples"])
    eigs = ctx.study.eig.eigenvalues
    out.add("report.json", "json", lambda p: io.write_json(p, report))
    out.add("timings.json", "json", lambda p: io.write_json(p, timings))
    out.add("report.svg", "svg", lambda p: io.write_dispersion_svg(p, desc, eigs))
    return report, code


COMMANDS = {
    "wave": cmd_wave,
    "essential": cmd_essential,
    "eigs": cmd_eigs,
    "decay": cmd_decay,
    "dispersion-check": cmd_dispersion_check,
    "hypotheses": cmd_hypotheses,
    "report": cmd_report,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="cylspec", description=__doc__)
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", type=Path, help="TOML run configuration")
    parser.add_argument("--out", type=Path, help="output directory (overrides output.dir)")
    parser.add_argument("--seed", type=int, help="unsigned 64-bit seed (overrides seed)")
    parser.add_argument("--format", choices=FORMATS, action="append", dest="formats",
                        help="restrict artifacts to this format (repeatable)")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.formats:
        overrides["output.formats"] = sorted(set(args.formats))
    try:
        cfg = load_config(args.config, overrides)
        out_dir = args.out if args.out is not None else Path(cfg["output"]["dir"])
        ctx = Context(cfg)
        outputs = Outputs(cfg.formats())
        summary, code = COMMANDS[args.command](ctx, outputs)
        written = outputs.write(out_dir)
    except CylSpecError as err:
        print(f"cylspec: {err.code}: {err}", file=sys.stderr)
        return exit_code_for(err)
    status = "ok" if code == EXIT_OK else "verification failed"
    print(f"cylspec {args.command}: {status}; wrote {len(written)} file(s) to {out_dir}")
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

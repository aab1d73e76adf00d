"""Readers and writers for the on-disk formats (JSON, CSV, Matrix Market, SVG)."""
import csv
import json
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .profiles import CylinderPotential


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if np.isfinite(x) else None
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _clean(obj.real), "im": _clean(obj.imag)}
    return obj


def dumps(obj):
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def write_json(path, obj):
    Path(path).write_text(dumps(obj))


def read_json(path):
    return json.loads(Path(path).read_text())


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


# ---------------------------------------------------------------- potentials

def potential_to_dict(V):
    return {
        "x_grid": None if V.zero_dim else V.x_grid.tolist(),
        "z_grid": V.z_grid.tolist(),
        "bc_x": V.bc_x,
        "values": V.values.tolist(),
        "v_plus": V.v_plus.tolist(),
        "v_minus": V.v_minus.tolist(),
    }


def potential_from_dict(d):
    missing = {"x_grid", "z_grid", "bc_x", "values", "v_plus", "v_minus"} - set(d)
    if missing:
        raise ConfigError(f"potential document lacks {sorted(missing)}")
    x = None if d["x_grid"] is None else np.asarray(d["x_grid"], dtype=float)
    return CylinderPotential(x, np.asarray(d["z_grid"], dtype=float),
                             np.asarray(d["values"], dtype=float),
                             np.asarray(d["v_plus"], dtype=float),
                             np.asarray(d["v_minus"], dtype=float), d["bc_x"])


def write_potential(path, V):
    write_json(path, potential_to_dict(V))


def read_potential(path):
    try:
        return potential_from_dict(read_json(path))
    except (OSError, ValueError) as err:
        raise ConfigError(f"cannot read potential {path}: {err}") from err


def write_profile(path, z, values, label="z"):
    write_csv(path, [label, "value"], zip(z, values))


# ---------------------------------------------------------------- spectra

def write_eigenvectors(path, x, vectors):
    header = ["x"] + [f"phi{j}" for j in range(vectors.shape[1])]
    write_csv(path, header, (np.concatenate([[xi], row]) for xi, row in zip(x, vectors)))


def write_curves(path, descriptor):
    write_csv(path, ["branch", "s", "re", "im"], descriptor.rows())


def write_grid_vector(path, op, x_grid, z_grid, u):
    """Eigenvector samples as (x, z, value) rows, x outermost."""
    grid = op.to_grid(u)
    xs = np.zeros(1) if x_grid is None else x_grid
    part = np.real if np.allclose(np.imag(grid), 0) else np.abs

    def rows():
        vals = part(grid)
        for i, x in enumerate(xs):
            for j, z in enumerate(z_grid):
                yield float(x), float(z), float(vals[i, j])

    write_csv(path, ["x", "z", "value"], rows())


# ---------------------------------------------------------------- SVG

def _scale(lo, hi, a, b):
    span = hi - lo if hi > lo else 1.0
    return lambda v: a + (v - lo) * (b - a) / span


def svg_plot(curves, points=(), width=640, height=480, title="", xlabel="Re", ylabel="Im"):
    """Minimal SVG: one <path> per curve, circles for points, axes as lines."""
    allv = np.concatenate([np.asarray(c, dtype=complex).ravel() for c in curves]
                          + [np.asarray(points, dtype=complex).ravel()])
    if allv.size == 0:
        allv = np.array([0.0, 1.0 + 1.0j])
    xs, ys = allv.real, allv.imag
    pad = 50
    sx = _scale(xs.min(), xs.max(), pad, width - pad)
    sy = _scale(ys.min(), ys.max(), height - pad, pad)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
           f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14">{title}</text>',
           f'<line class="axis" x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
           f'<line class="axis" x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
           f'<text x="{width / 2:.1f}" y="{height - 10}" text-anchor="middle" font-size="12">{xlabel}</text>',
           f'<text x="15" y="{height / 2:.1f}" font-size="12">{ylabel}</text>']
    for k, c in enumerate(curves):
        c = np.asarray(c)
        d = " ".join(f"{'M' if i == 0 else 'L'}{sx(p.real):.2f},{sy(p.imag):.2f}" for i, p in enumerate(c))
        out.append(f'<path class="branch" data-branch="{k}" d="{d}" fill="none" stroke="steelblue" stroke-width="1"/>')
    for p in np.atleast_1d(points):
        out.append(f'<circle cx="{sx(p.real):.2f}" cy="{sy(p.imag):.2f}" r="3" fill="crimson"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_dispersion_svg(path, descriptor, eigenvalues=()):
    curves = [b.lam for b in descriptor.branches]
    Path(path).write_text(svg_plot(curves, np.asarray(eigenvalues, dtype=complex),
                                   title=f"dispersion curves, c = {descriptor.c:g}"))

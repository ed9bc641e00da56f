"""Command-line front end: kernel evaluation, transforms, coefficient and
Wigner-map emission, qubit reports, and the identity-check runner.

All file outputs are deterministic CSV with a JSON sidecar recording units,
convention, truncation parameters, the seed and the tool version.

Exit codes: 0 success, 1 check failure, 2 usage error, 3 numerical
convergence failure.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .conventions import Convention, chi, lambda_of, mu_of
from .numerics import ConvergenceError
from .operators import commutator_residuals, window_operators
from .qubits import assemble_rho, entanglement_verdict, pauli_expectations
from .states import (DiscreteBasisState, Gaussian, LineState, Sampled,
                     superposition)
from .units import DEFAULT_UNITS, UnitsConfig
from .verify import ALL_SUITES, DEFAULT_SEED, run_all
from .wigner import map_contours, wigner_map
from .zakmap import coeffs_extract, zak_forward

EXIT_OK = 0
EXIT_CHECK_FAILURE = 1
EXIT_USAGE = 2
EXIT_CONVERGENCE = 3


class StateSpecError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    """Flat, sectioned key = value configuration."""
    units: UnitsConfig = DEFAULT_UNITS
    convention: Convention = Convention.C
    grid_alpha: int = 64
    grid_beta: int = 64
    window_l: int = 8
    window_m: int = 8
    seed: int = DEFAULT_SEED
    output_dir: str = "."
    tolerances: dict = field(default_factory=dict)

    def to_file(self, path: str) -> None:
        cp = configparser.ConfigParser()
        cp["units"] = {"hbar": repr(self.units.hbar), "x0": repr(self.units.x0)}
        cp["run"] = {
            "convention": self.convention.value,
            "grid_alpha": str(self.grid_alpha),
            "grid_beta": str(self.grid_beta),
            "window_l": str(self.window_l),
            "window_m": str(self.window_m),
            "seed": str(self.seed),
            "output_dir": self.output_dir,
        }
        if self.tolerances:
            cp["tolerances"] = {k: repr(v) for k, v in self.tolerances.items()}
        with open(path, "w") as fh:
            cp.write(fh)

    @classmethod
    def from_file(cls, path: str) -> "RunConfig":
        cp = configparser.ConfigParser()
        if not cp.read(path):
            raise FileNotFoundError(path)
        units = DEFAULT_UNITS
        if cp.has_section("units"):
            units = UnitsConfig.from_x0(cp.getfloat("units", "x0"),
                                        hbar=cp.getfloat("units", "hbar", fallback=1.0))
        run = cp["run"] if cp.has_section("run") else {}
        tol = ({k: float(v) for k, v in cp["tolerances"].items()}
               if cp.has_section("tolerances") else {})
        cfg = cls(
            units=units,
            convention=Convention.parse(run.get("convention", "c")),
            grid_alpha=int(run.get("grid_alpha", 64)),
            grid_beta=int(run.get("grid_beta", 64)),
            window_l=int(run.get("window_l", 8)),
            window_m=int(run.get("window_m", 8)),
            seed=int(run.get("seed", DEFAULT_SEED)),
            output_dir=run.get("output_dir", "."),
            tolerances=tol,
        )
        if cfg.grid_alpha < 2 or cfg.grid_beta < 2:
            raise ValueError("grids must be at least 2")
        if any(t <= 0 for t in cfg.tolerances.values()):
            raise ValueError("tolerances must be positive")
        return cfg


def parse_state_spec(text: str, convention: Convention,
                     units: UnitsConfig = DEFAULT_UNITS) -> LineState:
    """Build a line state from the spec mini-language.

    gaussian:center=F,width=F[,boost=F]   (center/width in x0, boost in p0)
    basis:l=N,m=N[,convention=a|b|c]
    super:W*SPEC+W*SPEC+...               (weights are complex literals)
    file:PATH                             (CSV columns x,re,im; normalized)
    """
    text = text.strip()
    if ":" not in text:
        raise StateSpecError("unknown-form", f"state spec {text!r} has no form tag")
    form, _, body = text.partition(":")
    form = form.lower()
    if form == "super":
        parts = body.split("+")
        # rejoin pieces that were split inside a complex weight like 1+2j
        terms: list[tuple[complex, LineState]] = []
        buf = ""
        for piece in parts:
            buf = f"{buf}+{piece}" if buf else piece
            if "*" not in buf:
                continue
            wtext, _, sub = buf.partition("*")
            try:
                weight = complex(wtext)
            except ValueError:
                continue  # the '+' belonged to the complex weight; keep buffering
            terms.append((weight, parse_state_spec(sub, convention, units)))
            buf = ""
        if buf or not terms:
            raise StateSpecError("malformed-parameter",
                                 f"could not parse superposition {body!r}")
        try:
            return superposition(terms, units)
        except ValueError as exc:
            raise StateSpecError("non-normalizable", str(exc)) from exc
    if form == "file":
        try:
            data = np.loadtxt(body, delimiter=",", skiprows=1)
        except OSError as exc:
            raise StateSpecError("file-missing", f"cannot read {body!r}: {exc}") from exc
        if data.ndim != 2 or data.shape[1] < 3:
            raise StateSpecError("malformed-parameter",
                                 "state file needs columns x,re,im")
        x = data[:, 0]
        dx = float(np.mean(np.diff(x)))
        if np.max(np.abs(np.diff(x) - dx)) > 1e-9 * abs(dx):
            raise StateSpecError("malformed-parameter", "state file grid is not uniform")
        state = Sampled(float(x[0]), dx, data[:, 1] + 1j * data[:, 2])
        nrm = state.norm_squared()
        if nrm < 1e-12:
            raise StateSpecError("non-normalizable", "state file has numerically zero norm")
        return state.normalized()
    params = {}
    if body:
        for chunk in body.split(","):
            if "=" not in chunk:
                raise StateSpecError("malformed-parameter", f"bad parameter {chunk!r}")
            key, _, val = chunk.partition("=")
            params[key.strip().lower()] = val.strip()
    try:
        if form == "gaussian":
            center = float(params.pop("center", "0")) * units.x0
            width = float(params.pop("width", "1")) * units.x0
            boost = float(params.pop("boost", "0")) * units.p0
            if params:
                raise StateSpecError("malformed-parameter",
                                     f"unknown gaussian parameters {sorted(params)}")
            if width <= 0:
                raise StateSpecError("non-normalizable", "gaussian width must be positive")
            return Gaussian(center, width, boost)
        if form == "basis":
            conv = Convention.parse(params.pop("convention", convention.value))
            l = int(params.pop("l"))
            m = int(params.pop("m"))
            if params:
                raise StateSpecError("malformed-parameter",
                                     f"unknown basis parameters {sorted(params)}")
            return DiscreteBasisState(l, m, conv)
    except StateSpecError:
        raise
    except (KeyError, ValueError) as exc:
        raise StateSpecError("malformed-parameter", f"bad {form} spec: {exc}") from exc
    raise StateSpecError("unknown-form", f"unknown state form {form!r}")


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def _sidecar(path: str, units: UnitsConfig, seed: int, **extra) -> None:
    doc = {
        "tool": "zaktorus",
        "version": __version__,
        "seed": seed,
        "units": {"hbar": units.hbar, "x0": units.x0, "p0": units.p0},
    }
    doc.update(extra)
    with open(path + ".json", "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _units_from_args(args) -> UnitsConfig:
    if args.units:
        key, _, val = args.units.partition("=")
        if key.strip() != "x0":
            raise StateSpecError("malformed-parameter",
                                 "--units accepts x0=VALUE (p0 is derived)")
        return UnitsConfig.from_x0(float(val))
    if args.config:
        return RunConfig.from_file(args.config).units
    return DEFAULT_UNITS


def _cmd_chi(args) -> int:
    units = _units_from_args(args)
    del units  # chi is a pure phase-variable function
    val = chi(Convention.parse(args.convention), args.alpha, args.beta)
    print(f"{_fmt(val.real)},{_fmt(val.imag)}")
    return EXIT_OK


def _cmd_kernel(args) -> int:
    conv = Convention.parse(args.convention)
    gammas = np.linspace(args.gamma_min, args.gamma_max, args.samples)
    lam = np.atleast_1d(lambda_of(conv, gammas))
    mu = np.atleast_1d(mu_of(conv, gammas))
    lines = ["gamma,lambda,mu"]
    lines += [f"{_fmt(g)},{_fmt(lv)},{_fmt(mv)}" for g, lv, mv in zip(gammas, lam, mu)]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        _sidecar(args.out, _units_from_args(args), args.seed,
                 convention=conv.value, samples=args.samples,
                 gamma_min=args.gamma_min, gamma_max=args.gamma_max)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_transform(args) -> int:
    units = _units_from_args(args)
    conv = Convention.parse(args.convention)
    state = parse_state_spec(args.state, conv, units)
    n_alpha, _, n_beta = args.grid.partition("x")
    field_ = zak_forward(state, conv, (int(n_alpha), int(n_beta)), units)
    lines = ["alpha,beta,re,im"]
    for i, a in enumerate(field_.alphas):
        for j, b in enumerate(field_.betas):
            v = field_.values[i, j]
            lines.append(f"{_fmt(a)},{_fmt(b)},{_fmt(v.real)},{_fmt(v.imag)}")
    with open(args.out, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    _sidecar(args.out, units, args.seed, convention=conv.value,
             grid=[field_.n_alpha, field_.n_beta], state=args.state,
             truncation_error=field_.truncation_error,
             norm_squared=field_.norm_squared())
    return EXIT_OK


def _cmd_coeffs(args) -> int:
    units = _units_from_args(args)
    conv = Convention.parse(args.convention)
    state = parse_state_spec(args.state, conv, units)
    wl, _, wm = args.window.partition(",")
    wl, wm = int(wl), int(wm)
    co = coeffs_extract(state, conv, (-wl, wl), (-wm, wm), units)
    lines = ["l,m,re,im"]
    for i, l in enumerate(co.l_values):
        for j, m in enumerate(co.m_values):
            v = co.c[i, j]
            lines.append(f"{l},{m},{_fmt(v.real)},{_fmt(v.imag)}")
    with open(args.out, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    _sidecar(args.out, units, args.seed, convention=conv.value,
             window=[wl, wm], state=args.state, sum_sq=co.sum_sq(),
             leakage=co.leakage())
    return EXIT_OK


def _cmd_wigner(args) -> int:
    units = _units_from_args(args)
    conv = Convention.parse(args.convention)
    win = [float(t) for t in args.window.split(",")]
    if len(win) != 4:
        raise StateSpecError("malformed-parameter", "--window needs X0,X1,P0,P1")
    nx, _, npnts = args.res.partition("x")
    wmap = wigner_map(conv, args.l, args.m, tuple(win), (int(nx), int(npnts)), units)
    lines = ["x_over_x0,p_over_p0,w"]
    for i, x in enumerate(wmap.x_over_x0):
        for j, p in enumerate(wmap.p_over_p0):
            lines.append(f"{_fmt(x)},{_fmt(p)},{_fmt(wmap.values[i, j])}")
    with open(args.out, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    _sidecar(args.out, units, args.seed, convention=conv.value,
             l=args.l, m=args.m, window=win, resolution=[int(nx), int(npnts)],
             contour_levels=list(wmap.contour_levels))
    if args.contours:
        base = args.out[:-4] if args.out.endswith(".csv") else args.out
        with open(base + ".contours.json", "w") as fh:
            json.dump(map_contours(wmap), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_OK


def _cmd_qubits(args) -> int:
    units = _units_from_args(args)
    conv = Convention.parse(args.convention)
    state = parse_state_spec(args.state, conv, units)
    wl, _, wm = args.window.partition(",")
    co = coeffs_extract(state, conv, (-int(wl), int(wl)), (-int(wm), int(wm)), units)
    e = pauli_expectations(co)
    two = assemble_rho(e)
    verdict, min_pt = entanglement_verdict(two)
    report = {
        "a_vec": e.a_vec.tolist(),
        "b_vec": e.b_vec.tolist(),
        "T": e.t_dyadic.tolist(),
        "rho_re": two.rho.real.tolist(),
        "rho_im": two.rho.imag.tolist(),
        "min_pt_eigenvalue": min_pt,
        "verdict": verdict,
        "leakage": e.leakage,
        "error_bound": e.error_bound,
        "convention": conv.value,
        "state": args.state,
        "window": [int(wl), int(wm)],
    }
    with open(args.out, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _sidecar(args.out, units, args.seed, convention=conv.value, state=args.state)
    return EXIT_OK


def _print_rows(rows) -> bool:
    wide = max(len(f"{r.suite}: {r.name}") for r in rows)
    ok = True
    for r in rows:
        status = "PASS" if r.passed else "FAIL"
        ok &= r.passed
        print(f"{r.suite + ': ' + r.name:<{wide}}  {r.residual:12.3e}  "
              f"<= {r.tolerance:8.1e}  {status}")
    return ok


def _cmd_verify_operators(args) -> int:
    units = _units_from_args(args)
    n = args.window
    win = window_operators((-n, n - 1), (-n, n - 1))
    rows = commutator_residuals(win)
    from .qubits import pauli_algebra_check
    rows.update(pauli_algebra_check((-n, n - 1), (-n, n - 1)))
    wide = max(len(k) for k in rows)
    ok = True
    for name in sorted(rows):
        passed = rows[name] <= 0.0
        ok &= passed
        print(f"{name:<{wide}}  {rows[name]:12.3e}  <=  0.0e+00  "
              f"{'PASS' if passed else 'FAIL'}")
    return EXIT_OK if ok else EXIT_CHECK_FAILURE


def _cmd_verify(args) -> int:
    units = _units_from_args(args)
    suites = args.suites.split(",") if args.suites else None
    rows = run_all(units=units, seed=args.seed, suites=suites)
    ok = _print_rows(rows)
    print(f"seed = {args.seed}; {sum(r.passed for r in rows)}/{len(rows)} checks passed")
    return EXIT_OK if ok else EXIT_CHECK_FAILURE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zak",
        description="Periodic and discrete Zak bases: kernels, transforms, "
                    "Wigner maps, torus operators and toroidal qubits.")
    parser.add_argument("--config", help="INI config file (see RunConfig)")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED,
                        help="seed recorded in reports and used by check suites")
    parser.add_argument("--units", help="x0=VALUE (p0 = 2 pi hbar / x0 derived)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("chi", help="evaluate the phase kernel, prints re,im")
    p.add_argument("--convention", required=True, choices=["a", "b", "c"])
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.set_defaults(func=_cmd_chi)

    p = sub.add_parser("kernel", help="emit CSV gamma,lambda,mu samples")
    p.add_argument("--convention", required=True, choices=["a", "b", "c"])
    p.add_argument("--gamma-min", type=float, required=True)
    p.add_argument("--gamma-max", type=float, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_kernel)

    p = sub.add_parser("transform", help="forward Zak transform to a field CSV")
    p.add_argument("--convention", required=True, choices=["a", "b", "c"])
    p.add_argument("--state", required=True)
    p.add_argument("--grid", default="64x64")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_transform)

    p = sub.add_parser("coeffs", help="discrete-basis coefficients CSV")
    p.add_argument("--convention", required=True, choices=["a", "b", "c"])
    p.add_argument("--state", required=True)
    p.add_argument("--window", default="8,8", help="L,M half-widths")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_coeffs)

    p = sub.add_parser("wigner", help="sampled Wigner map CSV")
    p.add_argument("--convention", required=True, choices=["a", "b", "c"])
    p.add_argument("--l", type=int, default=0)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--window", required=True, help="X0,X1,P0,P1 in x0/p0 units")
    p.add_argument("--res", default="41x41")
    p.add_argument("--contours", action="store_true",
                   help="also write marching-squares contours JSON")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_wigner)

    p = sub.add_parser("qubits", help="two-qubit extraction report JSON")
    p.add_argument("--convention", required=True, choices=["a", "b", "c"])
    p.add_argument("--state", required=True)
    p.add_argument("--window", default="4,4")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_qubits)

    p = sub.add_parser("verify-operators",
                       help="windowed operator-algebra residual table")
    p.add_argument("--convention", choices=["a", "b", "c"], default="c")
    p.add_argument("--window", type=int, default=32)
    p.set_defaults(func=_cmd_verify_operators)

    p = sub.add_parser("verify", help="run identity-check suites")
    p.add_argument("--suites", help="comma-separated subset of: "
                   + ",".join(ALL_SUITES))
    p.set_defaults(func=_cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except StateSpecError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""
``k3fm`` command line.

Exit codes: 0 every check passed, 1 a mathematical check failed, 2 input
error, 3 internal invariant violation (e.g. closed form and GRR disagree).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from .config import ConfigError, SurfaceConfig, load_config, parse_vector
from .kunneth import ch_kernel_Q, expected_gamma22, grr_inverse_transform, grr_transform, hhat_from_kernel
from .lattice import DivisorClass, LatticeError, MukaiVector, euler_char, intersect, mukai_pair
from .reflexive import (
    ReflexiveSurface,
    assumption_A3,
    certify_non_effective,
    check_A1,
    check_A2,
    is_reflexive,
    moduli_dim,
    nodal_classes,
    nodal_classes_box_scan,
)
from .transform import Direction, FmContext, fm_vector, wit_sheaf_vector

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3

# brute-force cross-check of nodal enumeration only below this many boxes
BOX_SCAN_LIMIT = 10**6

REPORT_SCHEMA = {
    "type": "object",
    "required": ["command", "inputs", "outputs", "checks", "exit_status"],
    "additionalProperties": False,
    "properties": {
        "command": {"type": "array", "items": {"type": "string"}},
        "inputs": {"type": "object"},
        "outputs": {"type": "object"},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "passed"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string"},
                    "passed": {"type": "boolean"},
                    "detail": {"type": "string"},
                },
            },
        },
        "exit_status": {"type": "integer", "enum": [0, 1, 2, 3]},
    },
}


@dataclass
class Report:
    command: list[str]
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    checks: list[dict] = field(default_factory=list)
    exit_status: int = EXIT_OK

    def check(self, name: str, passed: bool, detail: str = "", internal: bool = False):
        entry = {"name": name, "passed": bool(passed)}
        if detail:
            entry["detail"] = detail
        self.checks.append(entry)
        if not passed:
            code = EXIT_INTERNAL if internal else EXIT_FAILED
            self.exit_status = max(self.exit_status, code)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "checks": self.checks,
            "exit_status": self.exit_status,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> Report:
        return cls(list(data["command"]), dict(data["inputs"]), dict(data["outputs"]), list(data["checks"]), data["exit_status"])

    def render(self) -> str:
        lines = [" ".join(["k3fm", *self.command])]
        for title, section in (("inputs", self.inputs), ("outputs", self.outputs)):
            if section:
                lines.append(f"{title}:")
                lines.extend(_render_items(section, 1))
        if self.checks:
            lines.append("checks:")
            for c in self.checks:
                mark = "PASS" if c["passed"] else "FAIL"
                extra = f"  ({c['detail']})" if c.get("detail") else ""
                lines.append(f"  [{mark}] {c['name']}{extra}")
        lines.append(f"exit status: {self.exit_status}")
        return "\n".join(lines)


def _render_items(d: dict, depth: int) -> list[str]:
    pad = "  " * depth
    out = []
    for k, v in d.items():
        if isinstance(v, dict) and not {"r", "c1", "s"} <= set(v):
            out.append(f"{pad}{k}:")
            out.extend(_render_items(v, depth + 1))
        else:
            out.append(f"{pad}{k}: {_fmt(v)}")
    return out


def _fmt(v) -> str:
    if isinstance(v, dict) and {"r", "c1", "s"} <= set(v):
        c1 = v.get("c1_text") or str(v["c1"])
        return f"({v['r']}, {c1}, {v['s']})"
    if isinstance(v, list) and v and isinstance(v[0], dict):
        return "; ".join(_fmt(x) for x in v)
    return str(v)


def class_text(d: DivisorClass) -> str:
    labels = d.lattice.labels or tuple(f"e{i}" for i in range(d.lattice.rank))
    terms = []
    for c, name in zip(d.coords, labels):
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = "" if abs(c) == 1 else f"{abs(c)}*"
        terms.append(f"{sign} {mag}{name}")
    if not terms:
        return "0"
    text = " ".join(terms)
    return text[2:] if text.startswith("+ ") else "-" + text[2:]


def vec_json(u: MukaiVector) -> dict:
    return {"r": u.r, "c1": list(u.c1.coords), "c1_text": class_text(u.c1), "s": u.s}


def cls_json(d: DivisorClass) -> dict:
    return {"coords": list(d.coords), "text": class_text(d)}


def in_dual_basis(c: DivisorClass, surface: ReflexiveSurface) -> dict | None:
    """Write ``c = a Hhat + b ellhat`` when possible (``Hhat, ellhat`` are orthogonal).

    Keys refer to the target surface, whose ``(H, ell)`` are ``(Hhat, ellhat)``.
    """
    a2, b12 = intersect(c, surface.Hhat), intersect(c, surface.ellhat)
    if a2 % 2 or b12 % 12:
        return None
    a, b = a2 // 2, -b12 // 12
    if a * surface.Hhat + b * surface.ellhat != c:
        return None
    return {"H": a, "ell": b}


def _surface(cfg: SurfaceConfig) -> tuple[ReflexiveSurface | None, list[str]]:
    if cfg.ell is None:
        return None, ["config has no 'ell'"]
    check = is_reflexive(cfg.lattice, cfg.H, cfg.ell)
    if not check:
        return None, list(check.failures)
    return ReflexiveSurface(cfg.lattice, cfg.H, cfg.ell), []


def _config_inputs(cfg: SurfaceConfig) -> dict:
    d = {"config": cfg.source, "gram": [list(r) for r in cfg.lattice.gram], "H": list(cfg.H.coords)}
    if cfg.ell is not None:
        d["ell"] = list(cfg.ell.coords)
    if cfg.labels:
        d["labels"] = list(cfg.labels)
    return d


def cmd_check(cfg: SurfaceConfig, report: Report, args) -> None:
    report.inputs = _config_inputs(cfg)
    out = report.outputs
    if cfg.ell is None:
        report.check("reflexive", False, "config has no 'ell'")
        return
    rc = is_reflexive(cfg.lattice, cfg.H, cfg.ell)
    report.check("reflexive (H^2=2, H.ell=0, ell^2=-12)", rc.ok, "; ".join(rc.failures))
    v = MukaiVector(2, cfg.ell, -3)
    out["v"] = vec_json(v)
    out["v_squared"] = mukai_pair(v, v)
    report.check("A1: v primitive, isotropic, gcd(r, deg, s) = 1", check_A1(v, cfg.H))
    report.check("A2: deg v = 0 and rank > 1", check_A2(v, cfg.H))
    dim = moduli_dim(v)
    out["moduli_dim"] = dim
    report.check("moduli space of v has dimension 2", dim == 2, f"dim = {dim}")
    nodal = nodal_classes(cfg.H, 3)
    out["nodal_classes"] = [dict(cls_json(D), degree=intersect(D, cfg.H)) for D in nodal.classes]
    low = [D for D in nodal.classes if intersect(D, cfg.H) <= 2]
    report.check("no nodal classes of degree 1 or 2", not low, f"{len(low)} found" if low else "")
    if not rc.ok:
        report.check("ell + 2H not effective", False, "skipped: surface is not reflexive")
        report.check("A3: moduli space nonempty, all points mu-stable", False, "skipped: surface is not reflexive")
        return
    surface = ReflexiveSurface(cfg.lattice, cfg.H, cfg.ell)
    Hh, lh = surface.Hhat, surface.ellhat
    out["Hhat"], out["ellhat"] = cls_json(Hh), cls_json(lh)
    dual_ok = Hh.square() == 2 and intersect(Hh, lh) == 0 and lh.square() == -12
    report.check("dual surface reflexive (Hhat^2=2, Hhat.ellhat=0, ellhat^2=-12)", dual_ok, internal=True)
    cert = certify_non_effective(surface, nodal)
    out["E"] = dict(cls_json(cert.E), square=cert.E_squared, chi=cert.chi_E)
    detail = "" if cert.holds else f"{cert.reason}: {class_text(cert.blocking)}"
    report.check("ell + 2H not effective", cert.holds, detail)
    a3 = assumption_A3(surface, cert)
    report.check(
        "A3: moduli space nonempty, all points mu-stable",
        a3 == "granted",
        "granted by the nonemptiness theorem, not computed" if a3 == "granted" else a3,
    )


def cmd_transform(cfg: SurfaceConfig, report: Report, args) -> None:
    report.inputs = _config_inputs(cfg)
    surface, why = _surface(cfg)
    if surface is None:
        report.check("reflexive", False, "; ".join(why))
        return
    u = parse_vector(args.vector, cfg.lattice)
    direction = Direction.BACKWARD if args.inverse else Direction.FORWARD
    ctx = FmContext(surface, direction)
    src, tgt = ctx.source, ctx.target
    u_hat = fm_vector(ctx, u)
    report.inputs.update(vector=vec_json(u), direction=direction.value)
    if args.wit is not None:
        report.inputs["wit"] = args.wit
    out = report.outputs
    out["u_hat"] = vec_json(u_hat)
    basis = in_dual_basis(u_hat.c1, src)
    if basis is not None:
        out["c1_hat_in_target_basis"] = basis
    out["chi"], out["chi_hat"] = euler_char(u), euler_char(u_hat)
    out["deg"], out["deg_hat"] = intersect(u.c1, src.H), intersect(u_hat.c1, tgt.H)
    out["u_squared"], out["u_hat_squared"] = mukai_pair(u, u), mukai_pair(u_hat, u_hat)
    report.check("u_hat^2 = u^2", out["u_hat_squared"] == out["u_squared"], internal=True)
    report.check("chi(u_hat) = -chi(u)", out["chi_hat"] == -out["chi"], internal=True)
    report.check("deg(u_hat) = -deg(u)", out["deg_hat"] == -out["deg"], internal=True)
    back = fm_vector(ctx.reversed(), u_hat)
    report.check("inverse transform recovers u", back == u, internal=True)
    if args.wit is not None:
        w, idx = wit_sheaf_vector(u_hat, args.wit)
        out["wit_sheaf_vector"] = vec_json(w)
        out["transform_wit_index"] = int(idx)
    if args.oracle:
        oracle = grr_inverse_transform if args.inverse else grr_transform
        g = oracle(surface, u)
        out["oracle_u_hat"] = vec_json(g)
        report.check("closed form agrees with GRR oracle", g == u_hat, internal=True)


def cmd_kernel(cfg: SurfaceConfig, report: Report, args) -> None:
    report.inputs = _config_inputs(cfg)
    surface, why = _surface(cfg)
    if surface is None:
        report.check("reflexive", False, "; ".join(why))
        return
    gamma = ch_kernel_Q(surface).gamma
    blocks = {}
    for (p, q), val in gamma.blocks().items():
        key = f"{p},{q}"
        if (p, q) == (2, 2):
            blocks[key] = {"matrix": [list(r) for r in val[0]], "iota": val[1]}
        elif isinstance(val, tuple):
            blocks[key] = list(val)
        else:
            blocks[key] = val
    out = report.outputs
    out["blocks"] = blocks
    out["Hhat"], out["ellhat"] = cls_json(surface.Hhat), cls_json(surface.ellhat)
    L = cfg.lattice
    report.check("gamma^{0,0} = 2", gamma.b00 == 2, internal=True)
    report.check("gamma^{2,0} = ell", DivisorClass(gamma.b20, L) == surface.ell, internal=True)
    report.check("gamma^{0,2} = -ellhat", DivisorClass(gamma.b02, L) == -surface.ellhat, internal=True)
    report.check(
        "gamma^{2,2} = (ell+2H) x Hhat + H x ellhat - iota",
        (gamma.b22, gamma.iota) == expected_gamma22(surface),
        internal=True,
    )
    report.check("Hhat = -pushforward(gamma^{2,2} . H)", hhat_from_kernel(surface) == surface.Hhat, internal=True)


def cmd_nodal(cfg: SurfaceConfig, report: Report, args) -> None:
    report.inputs = _config_inputs(cfg)
    report.inputs["max_degree"] = args.max_degree
    nodal = nodal_classes(cfg.H, args.max_degree)
    out = report.outputs
    out["classes"] = [dict(cls_json(D), degree=intersect(D, cfg.H)) for D in nodal.classes]
    out["count"] = len(nodal.classes)
    out["search_bound"] = {
        "form": "2 (x.H)^2 - H^2 x^2",
        "norm_bound": nodal.norm_bound,
        "coordinate_box": list(nodal.box),
    }
    volume = 1
    for b in nodal.box:
        volume *= 2 * b + 1
    if volume <= BOX_SCAN_LIMIT:
        scan = nodal_classes_box_scan(cfg.H, args.max_degree, nodal.box)
        report.check("brute-force box scan agrees", list(nodal.classes) == scan, internal=True)


COMMANDS = {"check": cmd_check, "transform": cmd_transform, "kernel": cmd_kernel, "nodal": cmd_nodal}


def _wit(text: str) -> int:
    i = int(text)
    if i not in (0, 1, 2):
        raise argparse.ArgumentTypeError("WIT index must be 0, 1 or 2")
    return i


def _positive(text: str) -> int:
    k = int(text)
    if k < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return k


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="surface description (TOML); default: bundled generic surface")
    common.add_argument("--json", action="store_true", help="emit a single JSON document")
    common.add_argument("--require-reflexive", action="store_true", help="fail unless (H, ell) is reflexive")

    parser = argparse.ArgumentParser(prog="k3fm", description="Mukai vectors and the Fourier-Mukai transform on reflexive K3 surfaces.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common], help="check the reflexive-surface hypotheses")
    t = sub.add_parser("transform", parents=[common], help="transform a Mukai vector")
    t.add_argument("vector", help="'r;c1,c2,...;s' (put '--' before a vector with a leading minus)")
    t.add_argument("--wit", type=_wit, metavar="i", help="also give the sheaf vector of a WIT_i sheaf")
    t.add_argument("--inverse", action="store_true", help="apply the backward transform")
    t.add_argument("--oracle", action="store_true", help="cross-check against the GRR computation")
    sub.add_parser("kernel", parents=[common], help="Kunneth blocks of ch(Q)")
    n = sub.add_parser("nodal", parents=[common], help="list nodal classes of bounded degree")
    n.add_argument("--max-degree", type=_positive, default=3, metavar="k")
    return parser


def run(argv: list[str] | None = None) -> tuple[int, str, str]:
    """Run a command; return ``(exit status, stdout text, stderr text)``."""
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)
    report = Report(command=argv)
    err = ""
    try:
        cfg = load_config(args.config)
        if args.require_reflexive:
            if cfg.ell is None:
                raise ConfigError(f"{cfg.source}: --require-reflexive needs 'ell'")
            rc = is_reflexive(cfg.lattice, cfg.H, cfg.ell)
            if not rc:
                report.inputs = _config_inputs(cfg)
                report.check("reflexive", False, "; ".join(rc.failures))
                err = "not reflexive: " + "; ".join(rc.failures)
                return _emit(report, args, err)
        COMMANDS[args.command](cfg, report, args)
    except (ConfigError, LatticeError) as exc:
        report.exit_status = EXIT_INPUT
        err = f"input error: {exc}"
    failed = [c["name"] for c in report.checks if not c["passed"]]
    if failed and not err:
        err = "failed: " + ", ".join(failed)
    return _emit(report, args, err)


def _emit(report: Report, args, err: str) -> tuple[int, str, str]:
    text = report.to_json() if args.json else report.render()
    return report.exit_status, text + "\n", (err + "\n") if err else ""


def main(argv: list[str] | None = None) -> int:
    code, out, err = run(argv)
    sys.stdout.write(out)
    if err:
        sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Identity suites: each returns a list of named residual checks plus report files.

Random instances are drawn from ``numpy.random.Generator(PCG64)`` seeded with
the sequence ``[seed, tag, N, instance]``, so any single instance can be
reproduced in isolation and results do not depend on execution order.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, replace

import numpy as np

from . import bogoliubov as bg
from . import helmholtz as hz
from . import qft1d as qf
from . import quasiequiv as qe
from .dilation import (
    abstract_subspace,
    one_particle_unitary,
    orthogonal_dilation,
    random_abstract_subspace,
    random_factorial_subspace,
    symplectic_dilation,
    symplectic_dilation_checks,
)
from .realop import RealifiedSpace, random_symplectic
from .reports import IdentityCheck, residual
from .stdspace import modular_checks, polariser_embedded, projection_checks

SUITES = ("modular-identities", "dilation", "bogoliubov", "quasiequiv", "entropy", "helmholtz")

_TAGS = {name: k + 1 for k, name in enumerate(SUITES + ("shale", "ccr"))}


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    dims: tuple = (2, 4, 8, 16)
    instances: dict = field(default_factory=dict)
    tol: float | None = None
    grid_n: int = 4096
    box: float = 8.0
    helmholtz_cells: int = 400
    helmholtz_box: float = 12.0

    def __post_init__(self):
        if not self.dims:
            raise ValueError("dims must not be empty")
        if any(int(n) < 2 or int(n) % 2 for n in self.dims):
            raise ValueError(f"dims must be even and >= 2 (factorial subspaces need even N), got {list(self.dims)}")
        if self.tol is not None and self.tol <= 0:
            raise ValueError(f"tolerance must be > 0, got {self.tol}")

    def count(self, suite: str, default: int) -> int:
        return int(self.instances.get(suite, default))

    def tolerance(self, default: float) -> float:
        return default if self.tol is None else self.tol

    def rng(self, tag: str, *keys: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, _TAGS[tag], *keys])

    def with_overrides(self, **kw) -> "RunConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


@dataclass
class SuiteResult:
    suite: str
    checks: list
    files: dict = field(default_factory=dict)

    @property
    def n_pass(self) -> int:
        return sum(c.passed for c in self.checks)

    @property
    def ok(self) -> bool:
        return self.n_pass == len(self.checks)

    def failing(self) -> list:
        return [c for c in self.checks if not c.passed]

    def worst_ratio(self) -> float:
        """Largest residual / tolerance (a zero residual against a zero tolerance counts as 0)."""
        return max((_ratio(c) for c in self.checks), default=0.0)

    def worst_residual(self) -> float:
        return max((c.residual for c in self.checks), default=0.0)


def _ratio(c: IdentityCheck) -> float:
    if c.tolerance > 0:
        return c.residual / c.tolerance
    return 0.0 if c.residual == 0 else np.inf


def _retag(checks, prefix: str, tol: float | None = None) -> list[IdentityCheck]:
    return [IdentityCheck(f"{prefix}{c.identity_name}", c.residual, c.tolerance if tol is None else tol) for c in checks]


# ------------------------------------------------------------ modular


def modular_identity_checks(cfg: RunConfig) -> list[IdentityCheck]:
    tol = cfg.tolerance(1e-8)
    out = []
    for n in cfg.dims:
        for k in range(cfg.count("modular-identities", 100)):
            h = random_factorial_subspace(int(n), cfg.rng("modular-identities", n, k), sigma_range=(0.05, 0.95))
            _, pol = polariser_embedded(h, tol)
            group = pol + modular_checks(h, tol) + projection_checks(h, tol)
            out += _retag(group, f"N={n} #{k}: ", tol)
    return out


# ------------------------------------------------------------ dilation


def worked_example_checks(tol: float = 1e-10) -> list[IdentityCheck]:
    """b = 1/2 on R^2: spec(Delta) = {3, 1/3}, E_H E_H'|_H = 3/4."""
    ab = abstract_subspace(np.eye(2), np.array([[0.0, 0.5], [-0.5, 0.0]]))
    out = []
    for dil in (orthogonal_dilation(ab), symplectic_dilation(ab)):
        h = dil.subspace
        md = h.modular
        spec = np.sort(md.delta_spectrum)
        e_hp = md.J @ h.E @ md.J
        out += [
            IdentityCheck(f"{dil.kind}: spec(Delta) = {{1/3, 1/3, 3, 3}}", residual(spec, [1 / 3, 1 / 3, 3, 3]), tol),
            IdentityCheck(f"{dil.kind}: E_H E_H'|_H = 0.75", residual(h.restrict(h.E @ e_hp), 0.75 * np.eye(2)), tol),
        ]
    return out


def dilation_checks(cfg: RunConfig) -> list[IdentityCheck]:
    out = []
    count = cfg.count("dilation", 50)
    dims = cfg.dims
    for k in range(count):
        n = dims[k % len(dims)]
        rng = cfg.rng("dilation", n, k)
        ab = random_abstract_subspace(n, rng, sigma_range=(0.05, 0.95))
        o, s = orthogonal_dilation(ab), symplectic_dilation(ab)
        u = one_particle_unitary(o, s)
        d1, d2 = o.subspace.modular.Delta, s.subspace.modular.Delta
        i_o, i_s = o.space.i_op, s.space.i_op
        group = [
            IdentityCheck("U Delta1 U* = Delta2", residual(u @ d1 @ u.T, d2), cfg.tolerance(1e-8)),
            IdentityCheck("U unitary", residual(u.T @ u, np.eye(u.shape[0])), cfg.tolerance(1e-8)),
            IdentityCheck("U i1 = i2 U", residual(u @ i_o, i_s @ u), cfg.tolerance(1e-8)),
        ]
        for dil in (o, s):
            group += _retag(dil.checks(cfg.tolerance(1e-10)), f"{dil.kind}: ")
        group += _retag(symplectic_dilation_checks(ab, 1e-9), "symplectic form: ")
        out += _retag(group, f"N={n} #{k}: ")
    out += _retag(worked_example_checks(cfg.tolerance(1e-10)), "b=1/2 ")
    return out


# ------------------------------------------------------------ bogoliubov


def block_formula_suite(cfg: RunConfig) -> list[IdentityCheck]:
    from .stdspace import block_formula_checks

    tol = cfg.tolerance(1e-8)
    out = []
    count = cfg.count("bogoliubov", 50)
    dims = cfg.dims
    for k in range(count):
        n = dims[k % len(dims)]
        rng = cfg.rng("bogoliubov", n, k)
        h = random_factorial_subspace(n, rng)
        t = bg.random_symplectic_of(h, rng, scale=0.3 + 0.7 * rng.random())
        group = bg.bogoliubov_checks(h, t, tol)
        group += block_formula_checks(h, tol)
        flow = h.restrict(h.modular.delta_it(0.7))
        rep = bg.tilde_commutator_blocks(flow, h, tol)
        tol_flow = cfg.tolerance(1e-9)
        group += [IdentityCheck(f"modular flow: {name}", float(np.linalg.norm(rep.direct[name])), tol_flow) for name in bg.BLOCK_NAMES]
        out += _retag(group, f"N={n} #{k}: ")
    return out


def shale_suite(cfg: RunConfig) -> list[IdentityCheck]:
    tol = cfg.tolerance(1e-10)
    out = []
    count = cfg.count("shale", 100)
    for k in range(count):
        n = cfg.dims[k % len(cfg.dims)]
        rng = cfg.rng("shale", n, k)
        space = RealifiedSpace.standard(int(n))
        t = random_symplectic(space.i_op, rng, scale=0.2 + 0.8 * rng.random())
        sd = bg.shale_defect(t, space.i_op)
        out.append(IdentityCheck(f"N={n} #{k}: [T,i] = T i (1 - T*T)", sd.identity_residual, tol))
    return out


# ------------------------------------------------------------ quasi-equivalence


def chain_suite(cfg: RunConfig) -> list[IdentityCheck]:
    out = []
    count = cfg.count("quasiequiv", 50)
    dims = cfg.dims
    for k in range(count):
        n = dims[k % len(dims)]
        rng = cfg.rng("quasiequiv", n, k)
        s1, s2 = qe.random_state_pair(n, rng, spread=0.2 + rng.random())
        chain = qe.qe_corollary_chain(s1, s2)
        group = chain.checks(cfg.tolerance(1e-9))
        t = qe.theorem_operators(s1, s2)
        tb = qe.theorem_operators_bruteforce(s1, s2)
        a1, a2 = s1.abstract, s2.abstract
        for name, x, y in (("t1", t[0], tb[0]), ("t2", t[1], tb[1])):
            nx = float(np.linalg.norm(a2.A_sqrt @ x @ a1.A_isqrt))
            ny = float(np.linalg.norm(a2.A_sqrt @ y @ a1.A_isqrt))
            group.append(IdentityCheck(f"{name} norm: calculus = brute force", abs(nx - ny), cfg.tolerance(1e-10) * max(1.0, ny)))
        fam = rng.standard_normal((8, n))
        lam = float(np.linalg.eigvalsh(qe.kernel_gram(s1, fam)).min())
        group.append(IdentityCheck("kernel Gram matrix PSD", max(0.0, -lam), 1e-10))
        flow = qe.modular_flow_on_h(a1, 0.9)
        hvec = rng.standard_normal(n)
        group.append(IdentityCheck("phi(V(Delta^is h)) = phi(V(h))", abs(qe.gaussian_kernel(s1, flow @ hvec) - qe.gaussian_kernel(s1, hvec)), 1e-10))
        out += _retag(group, f"N={n} #{k}: ")
    return out


def ccr_suite(cfg: RunConfig, cutoff: int = 40, pairs: int = 5) -> list[IdentityCheck]:
    fock = qe.TruncatedFock(2, cutoff)
    out = []
    for k in range(pairs):
        rng = cfg.rng("ccr", 2, k)
        h = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        kk = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        h *= rng.uniform(0.2, 1.0) / np.linalg.norm(h)
        kk *= rng.uniform(0.2, 1.0) / np.linalg.norm(kk)
        out += [
            IdentityCheck(f"#{k}: <e0, V(h) e0> = exp(-|h|^2/2)", qe.vacuum_kernel_residual(fock, h), 1e-10),
            IdentityCheck(f"#{k}: V(h+k) = e^(i beta) V(h) V(k) on <=5 particles", qe.weyl_relation_residual(fock, h, kk, 5), 1e-8),
        ]
    return out


# ------------------------------------------------------------ entropy


def entropy_checks(cfg: RunConfig) -> tuple[list[IdentityCheck], dict]:
    grid = qf.SpectralGrid(cfg.grid_n, cfg.box)
    ref = qf.reference_packet(grid)
    report = qf.entropy_report(ref)
    closed = report["closed_form"]
    out = [IdentityCheck("reference packet: closed form vs 256 pi/9009 (relative)", abs(closed / qf.REFERENCE_ENTROPY - 1), 1e-3)]
    corpus = []
    for k, phi in enumerate(qf.packet_corpus(grid)):
        r = qf.entropy_report(phi)
        corpus.append(r)
        out.append(IdentityCheck(f"packet {k}: modular route vs closed form (relative)", r["relative_gap"], 0.01))
        s1 = qf.entropy_closed_form(phi)
        s2 = qf.entropy_closed_form(phi.scale(2.0))
        out.append(IdentityCheck(f"packet {k}: S[2 Phi] = 4 S[Phi] (relative)", abs(s2 - 4 * s1) / max(abs(s1), 1e-300), 1e-12))
    files = {"entropy.json": json.dumps({"reference": report, "corpus": corpus}, indent=2, sort_keys=True)}
    return out, files


# ------------------------------------------------------------ helmholtz


def helmholtz_checks(cfg: RunConfig) -> tuple[list[IdentityCheck], dict]:
    op = hz.LineOperator(cfg.helmholtz_cells, cfg.helmholtz_box)
    a_min, a_max = hz.reference_extensions(op)
    a_1 = hz.extension_Am(op, 1.0)
    lam1 = hz.lowest_eigenvalues(a_1)[0]
    robin = hz.robin_root(1.0) ** 2
    lam_d = hz.lowest_eigenvalues(a_max)[0]
    lam_k = hz.lowest_eigenvalues(a_min, 2)
    out = [
        IdentityCheck("lambda1(A_1) vs k^2, k tan k = 1 (relative)", abs(lam1 / robin - 1), 0.01),
        IdentityCheck("lambda1(Dirichlet) vs pi^2/4 (relative)", abs(lam_d / (np.pi**2 / 4) - 1), 0.005),
        IdentityCheck("Krein: two zero eigenvalues (affine kernel)", float(np.max(np.abs(lam_k))), 1e-6),
    ]
    rep = hz.form_order_check(op, a_min, a_1, a_max, hz.trial_corpus(op, 20, seed=3))
    for r in rep.results:
        scale = max(1.0, abs(r.q_m))
        out.append(IdentityCheck(f"form order {r.name}: q_min <= q_m", max(0.0, r.q_min - r.q_m) / scale, 1e-9))
        if r.vanishes_on_boundary:
            out.append(IdentityCheck(f"form order {r.name}: q_m <= q_max", max(0.0, r.q_m - r.q_max) / scale, 1e-9))
    masses = (0.5, 1.0, 2.0, 5.0)
    lams = [hz.lowest_eigenvalues(hz.extension_Am(op, m))[0] for m in masses]
    out.append(IdentityCheck("lambda1(A_m) increasing in m", max(0.0, -float(np.min(np.diff(lams)))), 0.0))
    out.append(IdentityCheck("lambda1(A_5) < lambda1(Dirichlet)", max(0.0, lams[-1] - lam_d), 0.0))
    out.append(IdentityCheck("Robin condition f'(1) + f(1) = 0 (O(h))", hz.robin_residual(op, a_1, 1.0), 5 * op.h))
    x = op.x_interval
    xi = np.where(np.abs(x) < 0.9, np.cos(np.pi * x / 1.8) ** 2, 0.0)
    out.append(IdentityCheck("T (A_0 + m^2) xi = xi", hz.ba_identity_residual(op, 1.0, xi), 1e-6))
    files = {"spectrum.csv": hz.spectrum_csv(hz.spectrum_rows(op, masses, 3))}
    return out, files


# ------------------------------------------------------------ dispatcher

SQUEEZE_VALUES = (0.0, 0.25, 0.5, 1.0, 2.0)


def _cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    return str(v)


def rows_to_csv(header, rows) -> str:
    """CSV text with ``repr`` floats, so identical inputs give identical bytes."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def checks_csv(result: "SuiteResult") -> str:
    rows = [(result.suite, c.identity_name, c.residual, c.tolerance, c.passed) for c in result.checks]
    return rows_to_csv(["suite", "check", "residual", "tolerance", "pass"], rows)



def run(name: str, cfg: RunConfig) -> SuiteResult:
    if name == "modular-identities":
        return SuiteResult(name, modular_identity_checks(cfg))
    if name == "dilation":
        return SuiteResult(name, dilation_checks(cfg))
    if name == "bogoliubov":
        checks = _retag(block_formula_suite(cfg), "blocks ") + _retag(shale_suite(cfg), "shale ")
        rows = bg.scan_rows(cfg.dims, [cfg.seed], SQUEEZE_VALUES)
        header = ["N", "seed", "s", "cond_a", "cond_b", "block_norm_1", "block_norm_2", "block_norm_3", "block_norm_4"]
        return SuiteResult(name, checks, {"squeeze_scan.csv": rows_to_csv(header, rows)})
    if name == "quasiequiv":
        return SuiteResult(name, _retag(chain_suite(cfg), "chain ") + _retag(ccr_suite(cfg), "ccr "))
    if name == "entropy":
        checks, files = entropy_checks(cfg)
        return SuiteResult(name, checks, files)
    if name == "helmholtz":
        checks, files = helmholtz_checks(cfg)
        return SuiteResult(name, checks, files)
    raise KeyError(f"unknown suite {name!r}; available: {', '.join(SUITES)}")


# ------------------------------------------------------------ scans


def _scan_t(cfg: RunConfig, which: int, values) -> list[tuple]:
    rows = []
    for n in values:
        n = int(n)
        s1, s2 = qe.random_state_pair(n, cfg.rng("quasiequiv", n, 0))
        rows.append((n, qe.qe_theorem_norms(s1, s2)[which]))
    return rows


def _scan_cond(cfg: RunConfig, which: int, values) -> list[tuple]:
    n = int(cfg.dims[0])
    h = random_factorial_subspace(n, cfg.rng("bogoliubov", n, 0))
    flow = bg.squeeze_flow(h, cfg.seed)
    rows = []
    for s in values:
        rep = bg.tilde_commutator_blocks(flow(float(s)), h)
        rows.append((float(s), (rep.cond_a, rep.cond_b)[which]))
    return rows


def _scan_lambda(cfg: RunConfig, values) -> list[tuple]:
    op = hz.LineOperator(cfg.helmholtz_cells, cfg.helmholtz_box)
    return [(float(m), float(hz.lowest_eigenvalues(hz.extension_Am(op, float(m)))[0])) for m in values]


SCANS = {
    "t1_norm": ("dims", lambda cfg, v: _scan_t(cfg, 0, v)),
    "t2_norm": ("dims", lambda cfg, v: _scan_t(cfg, 1, v)),
    "cond_a": ("squeeze", lambda cfg, v: _scan_cond(cfg, 0, v)),
    "cond_b": ("squeeze", lambda cfg, v: _scan_cond(cfg, 1, v)),
    "lambda1_Am": ("mass", _scan_lambda),
}


def scan(quantity: str, over: str, values, cfg: RunConfig) -> list[tuple]:
    """Rows ``(parameter, value)``.

    Raises:
        KeyError: quantity not registered (message lists the names).
        ValueError: wrong axis for the quantity, or no values.
    """
    if quantity not in SCANS:
        raise KeyError(f"unknown scan quantity {quantity!r}; available: {', '.join(sorted(SCANS))}")
    axis, fn = SCANS[quantity]
    if over != axis:
        raise ValueError(f"{quantity} scans over {axis!r}, not {over!r}")
    values = list(values)
    if not values:
        raise ValueError("scan needs at least one parameter value")
    return fn(cfg, values)

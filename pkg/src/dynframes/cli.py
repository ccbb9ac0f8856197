"""Batch front end: ``dynframes --config request.json``.

Runs every task listed in the request against one operator and writes a
JSON report.  Exit status is 0 when all tasks succeed, 2 when a task hit an
input or precondition error, 3 when a numerical certificate failed.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import __version__, hardy, instances, numkit
from .defect import defect as defect_data, model_space_of, parseval_generators, parseval_index
from .errors import CertificateFailed, DynFramesError, TailNotCertified, ValidationError, VerdictMismatch
from .frames import FrameSystem, frame_bounds, frame_index_oracle, synthesis_kernel
from .inner import BlaschkeProduct, MatrixInner, similarity_test_matrix, similarity_test_scalar
from .operators import OperatorSpec, admissibility, dense, diagonal, op_norm, spectral_radius
from .tighten import canonical_tighten, index_certificate

TASKS = (
    "admissibility", "frame-bounds", "parseval-generators", "tighten", "index-certificate",
    "model-space", "adjoint-frame", "optimal-frames", "inner-similarity", "synthesis-kernel",
)

ANCHORS = {
    "admissibility": "Parseval frame of iterations exists iff ||T|| <= 1 and (T^*)^n -> 0 strongly",
    "frame-bounds": "S - T S T^* = S_G",
    "parseval-generators": "gamma_p(T) = dim closure((I - T T^*) H)",
    "tighten": "Q = S^{-1/2} T S^{1/2}",
    "index-certificate": "gamma(T) = gamma_p(Q) = dim (I - Q Q^*) H",
    "model-space": "A_N f = P_N S f",
    "adjoint-frame": "{(S^*)^n S^* E_i} is a Parseval frame of N",
    "optimal-frames": "gamma_p(T) = gamma_p(A_N) = gamma_p(S^*|_N) = gamma_p(T^*)",
    "inner-similarity": "alpha q(n) is real for all n",
    "synthesis-kernel": "ker C = rho(Q) H^2",
}

EXIT_OK, EXIT_INPUT, EXIT_CERT = 0, 2, 3


class TaskError(ValidationError):
    """A task's preconditions are not met by the request."""


# --------------------------------------------------------------------------
# JSON <-> numbers


def parse_complex(x):
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(isinstance(v, (int, float)) for v in x):
        return complex(x[0], x[1])
    raise ValidationError(f"cannot read {x!r} as a complex number; use [re, im]")


def parse_vector(v):
    return np.array([parse_complex(x) for x in v], dtype=complex)


def parse_matrix(rows):
    return np.array([[parse_complex(x) for x in row] for row in rows], dtype=complex)


def enc(x):
    """Encode numbers and arrays for JSON with complex values as ``[re, im]``."""
    if isinstance(x, dict):
        return {str(k): enc(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [enc(v) for v in x]
    if isinstance(x, np.ndarray):
        return enc(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (float, np.floating)):
        return float(x)
    return x


# --------------------------------------------------------------------------
# request parsing


def parse_blaschke(spec):
    zeros = [parse_complex(z) for z in spec.get("zeros", [])]
    alpha = parse_complex(spec.get("alpha", 1.0))
    return BlaschkeProduct.from_zeros(zeros, alpha=alpha, power=int(spec.get("power", 0)))


def parse_inner(spec):
    if "zeros" in spec and "factors" not in spec:
        return MatrixInner.scalar(parse_blaschke(spec))
    factors = [parse_blaschke(f) for f in spec["factors"]]
    d = len(factors)
    left = parse_matrix(spec["left"]) if "left" in spec else np.eye(d)
    right = parse_matrix(spec["right"]) if "right" in spec else np.eye(d)
    if "left" in spec or "right" in spec:
        return MatrixInner.product(left, factors, right)
    return MatrixInner.diag(factors)


class Request:
    def __init__(self, cfg, seed=None, tol=None):
        if not isinstance(cfg, dict):
            raise ValidationError("request must be a JSON object")
        self.cfg = cfg
        self.seed = int(cfg.get("seed", 0) if seed is None else seed)
        trunc = cfg.get("truncation", {})
        self.m = int(trunc.get("m", 40))
        self.tol = float(trunc.get("tol", 1e-8) if tol is None else tol)
        tasks = cfg.get("tasks", [])
        bad = [t for t in tasks if t not in TASKS]
        if bad:
            raise ValidationError(f"unknown tasks {bad}; valid: {list(TASKS)}")
        self.tasks = list(tasks)
        self.inner = None
        self.model = None
        op = cfg.get("operator")
        if "inner" in cfg:
            self.inner = parse_inner(cfg["inner"])
        self.operator = self._operator(op) if op is not None else None
        gens = cfg.get("generators")
        self.generators = None if gens is None else np.stack([parse_vector(g) for g in gens], axis=1)

    def _operator(self, op):
        kind = op.get("kind")
        if kind == "dense":
            return dense(parse_matrix(op["matrix"]))
        if kind == "diagonal":
            return diagonal(parse_vector(op["entries"]))
        if kind == "preset":
            return instances.preset(op["name"], d=op.get("d"), N=int(op.get("N", 3)),
                                    radius=float(op.get("radius", 0.95)))
        if kind == "blaschke-model":
            Q = parse_inner(op)
            if self.inner is None:
                self.inner = Q
            self.model = hardy.model_space(Q, hardy.TruncHardy(Q.d, self.m))
            return hardy.compression(self.model)
        raise ValidationError(f"unknown operator kind {kind!r}")

    def need_operator(self):
        if self.operator is None:
            raise TaskError("task needs an operator")
        return self.operator

    def need_system(self):
        T = self.need_operator()
        if self.generators is None:
            raise TaskError("task needs generators")
        return FrameSystem(T, self.generators)

    def need_inner(self):
        if self.inner is None:
            raise TaskError("task needs an inner function (operator kind blaschke-model or `inner`)")
        return self.inner


# --------------------------------------------------------------------------
# tasks


def _frame_summary(sys):
    rep = frame_bounds(sys)
    out = rep.summary()
    out["generator_count"] = sys.count
    return out, rep


def task_admissibility(req, mats):
    T = req.need_operator()
    rep = admissibility(T, req.tol)
    out = rep.as_dict()
    out["parseval_index"] = parseval_index(T)
    if rep.admits_frame:
        out["gamma"] = frame_index_oracle(T, seed=req.seed)[0]
    return out


def task_frame_bounds(req, mats):
    sys = req.need_system()
    out, rep = _frame_summary(sys)
    mats["frame_operator"] = rep.frame_operator
    return out


def task_parseval_generators(req, mats):
    T = req.need_operator()
    sys = parseval_generators(T)
    out, _ = _frame_summary(sys)
    out["parseval_index"] = defect_data(T).index
    out["generators"] = sys.generators
    mats["generators"] = sys.generators
    return out


def task_tighten(req, mats):
    sys = req.need_system()
    Q, tight = canonical_tighten(sys)
    out, _ = _frame_summary(tight)
    out["Q"] = Q.matrix
    out["Q_norm"] = op_norm(Q)
    out["Q_minus_T"] = float(np.linalg.norm(Q.matrix - sys.operator.matrix, 2))
    out["tightened_generators"] = tight.generators
    mats["Q"] = Q.matrix
    mats["tightened_generators"] = tight.generators
    return out


def task_index_certificate(req, mats):
    cert = index_certificate(req.need_operator(), seed=req.seed)
    mats["Q"] = cert.Q.matrix
    return {"gamma": cert.gamma, "rank_I_minus_QQstar": cert.rank, "check": cert.check,
            "residuals": cert.residuals}


def task_model_space(req, mats):
    if req.model is not None:
        N = req.model
        A = hardy.compression(N).matrix
        ev = np.linalg.eigvals(A)
        ev = ev[np.lexsort((ev.imag, ev.real))]
        mats["model_basis"] = N.B
        return {"dim": N.dim, "cutoff": N.space.m, "multiplicity": N.space.d,
                "tail_tol": N.tail_tol, "compression_eigenvalues": ev,
                "diagnostics": N.diagnostics}
    T = req.need_operator()
    N = model_space_of(T, req.m)
    mats["model_basis"] = N.B
    return {"dim": N.dim, "cutoff": N.space.m, "multiplicity": N.space.d,
            "tail_tol": N.tail_tol, "diagnostics": N.diagnostics}


def task_adjoint_frame(req, mats):
    Q = req.need_inner()
    H = hardy.TruncHardy(Q.d, req.m)
    N = req.model if req.model is not None else hardy.model_space(Q, H)
    basic, _ = _frame_summary(hardy.basic_frame(N))
    adj, _ = _frame_summary(hardy.adjoint_frame(Q, H, N))
    full, min_rank = hardy.full_range_check(Q)
    return {"basic_frame": basic, "adjoint_frame": adj, "tail_tol": N.tail_tol,
            "full_range": full, "min_rank": min_rank,
            "compression_spectral_radius": spectral_radius(hardy.compression(N))}


def task_optimal_frames(req, mats):
    T = req.need_operator()
    if req.model is not None:
        T = dense(T.matrix)
    res = hardy.optimal_frames(T, req.m)
    a, _ = _frame_summary(res.for_T)
    b, _ = _frame_summary(res.for_T_adjoint)
    mats["generators_T"] = res.for_T.generators
    mats["generators_T_adjoint"] = res.for_T_adjoint.generators
    return {"for_T": a, "for_T_adjoint": b, "parseval_index": parseval_index(T),
            "cutoff": res.model.space.m, "invariance_defect": res.invariance_defect,
            "rank_T": numkit.numerical_rank(res.for_T.generators),
            "rank_T_adjoint": numkit.numerical_rank(res.for_T_adjoint.generators)}


def task_inner_similarity(req, mats):
    Q = req.need_inner()
    if Q.d == 1 and Q.kind != "product":
        B = Q.factors[0]
        similar, alpha = similarity_test_scalar(B, max(2 * B.degree, req.m))
        return {"similar": similar, "alpha": alpha, "degree": B.degree,
                "zeros": B.zero_list(), "rho_zeros": B.rho().zero_list()}
    A = req.cfg.get("witness")
    A = None if A is None else parse_matrix(A)
    similar, ok = similarity_test_matrix(Q, max(2 * Q.degree, req.m), A)
    return {"similar": similar, "witness_ok": ok, "degree": Q.degree}


def task_synthesis_kernel(req, mats):
    if req.inner is not None and req.generators is None:
        Q = req.inner
        H = hardy.TruncHardy(Q.d, req.m)
        N = req.model if req.model is not None else hardy.model_space(Q, H)
        sys = hardy.adjoint_frame(Q, H, N)
        K = synthesis_kernel(sys, req.m)
        out = {"kernel_dim": K.dim, "coefficient_dim": sys.count * (req.m + 1),
               "generator_count": sys.count}
        if sys.count == Q.d:
            Hk = hardy.TruncHardy(Q.d, req.m)
            out["angle_to_rho_range"] = numkit.max_angle(K, hardy.invariant_subspace(Q.rho(), Hk))
            out["angle_to_range"] = numkit.max_angle(K, hardy.invariant_subspace(Q, Hk))
        return out
    sys = req.need_system()
    K = synthesis_kernel(sys, req.m)
    mats["kernel_basis"] = K.basis
    return {"kernel_dim": K.dim, "coefficient_dim": sys.count * (req.m + 1)}


HANDLERS = {
    "admissibility": task_admissibility,
    "frame-bounds": task_frame_bounds,
    "parseval-generators": task_parseval_generators,
    "tighten": task_tighten,
    "index-certificate": task_index_certificate,
    "model-space": task_model_space,
    "adjoint-frame": task_adjoint_frame,
    "optimal-frames": task_optimal_frames,
    "inner-similarity": task_inner_similarity,
    "synthesis-kernel": task_synthesis_kernel,
}

NUMERICAL_FAILURES = (CertificateFailed, VerdictMismatch, TailNotCertified)


def run_request(req):
    """Execute all tasks; returns ``(report, exit_code, matrices)``."""
    entries, code, all_mats = [], EXIT_OK, []
    for idx, name in enumerate(req.tasks):
        mats = {}
        entry = {"index": idx, "task": name, "anchor": ANCHORS[name]}
        try:
            entry["result"] = HANDLERS[name](req, mats)
            entry["status"] = "ok"
        except NUMERICAL_FAILURES as exc:
            entry["status"] = "certificate-failed"
            entry["error"] = {"type": type(exc).__name__, "message": str(exc)}
            code = max(code, EXIT_CERT)
        except DynFramesError as exc:
            entry["status"] = "invalid"
            entry["error"] = {"type": type(exc).__name__, "message": str(exc)}
            code = max(code, EXIT_INPUT)
        entries.append(entry)
        all_mats.append((idx, name, mats))
    report = {
        "version": __version__,
        "seed": req.seed,
        "tolerance": req.tol,
        "truncation": {"m": req.m},
        "request": req.cfg,
        "tasks": entries,
    }
    return enc(report), code, all_mats


def write_csv(directory, all_mats):
    os.makedirs(directory, exist_ok=True)
    for idx, name, mats in all_mats:
        for key, M in sorted(mats.items()):
            M = np.atleast_2d(np.asarray(M, dtype=complex))
            path = os.path.join(directory, f"{idx:02d}_{name}_{key}.csv")
            with open(path, "w", newline="") as fh:
                w = csv.writer(fh)
                for row in M:
                    w.writerow([f"{v:.17g}" for z in row for v in (z.real, z.imag)])


def build_parser():
    p = argparse.ArgumentParser(prog="dynframes", description=__doc__.splitlines()[0])
    p.add_argument("--config", required=True, help="JSON request file")
    p.add_argument("--csv", metavar="DIR", help="also write matrices as CSV (re,im pairs) into DIR")
    p.add_argument("--seed", type=int, help="override the request seed")
    p.add_argument("--tol", type=float, help="override the admissibility tolerance")
    p.add_argument("--out", help="report path (default: standard output)")
    return p


def run(config_path, seed=None, tol=None, csv_dir=None, out=None):
    """Run a request file and return the exit code."""
    try:
        with open(config_path) as fh:
            cfg = json.load(fh)
        req = Request(cfg, seed=seed, tol=tol)
    except (OSError, json.JSONDecodeError, DynFramesError, KeyError, TypeError) as exc:
        print(f"dynframes: invalid request: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report, code, mats = run_request(req)
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if csv_dir:
        write_csv(csv_dir, mats)
    for e in report["tasks"]:
        if e["status"] != "ok":
            print(f"dynframes: task {e['task']}: {e['error']['type']}: {e['error']['message']}",
                  file=sys.stderr)
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    return run(args.config, seed=args.seed, tol=args.tol, csv_dir=args.csv, out=args.out)


if __name__ == "__main__":
    sys.exit(main())

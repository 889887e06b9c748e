"""Command-line entry point for the insulation experiments.

Subcommands: eig (one eigenvalue run), sweep-mass (lambda vs m curve),
shape2d (planar shape optimization from the unit disk), axisym (ball,
ellipsoid sweep, assembled half-ellipsoid optimization). Parameters follow
the precedence CLI flags > config file > mesh-size defaults (eps = h/10,
tau = 1, eps_stop = h/10).
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import axisym as axisym_mod
from . import lineig, shape2d
from .assembly import assemble
from .errors import InsulfemError
from .flow import SolveParams, default_params, solve_assembled
from .mesh import make_disk, make_half_profile, make_square, measures, save_mesh
from .vtkio import write_vtk


def _fmt(x):
    return f"{x:.12g}"


def write_csv(path, header, rows):
    with open(path, "w") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(_fmt(v) if isinstance(v, float) else str(v)
                             for v in row) + "\n")


def read_config(path):
    values = {}
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            if not _:
                raise ValueError(f"config line without '=': {line!r}")
            values[key.strip()] = value.strip()
    return values


def build_mesh(domain, refinements, a=None, b=None):
    if domain == "disk":
        return make_disk(refinements)
    if domain == "square":
        return make_square(refinements)
    if domain == "ball":
        return make_half_profile("ball", refinements)
    if domain == "ellipsoid":
        return make_half_profile("ellipsoid", refinements, a=a or 1.0)
    if domain == "half-ellipsoids":
        return make_half_profile("half_ellipsoids", refinements,
                                 a=a or 1.0, b=b or 1.0)
    raise ValueError(f"unknown domain {domain!r}")


def resolve_params(args, mesh, config):
    """Flags > config file > mesh-size defaults."""

    def pick(name, cast):
        flag = getattr(args, name, None)
        if flag is not None:
            return cast(flag)
        if name in config:
            return cast(config[name])
        return None

    overrides = {}
    for name, cast in (("eps", float), ("tau", float), ("eps_stop", float),
                       ("seed", int), ("metric", str),
                       ("max_steps", int), ("cg_tol", float)):
        value = pick(name, cast)
        if value is not None:
            overrides[name] = value
    m = pick("m", float)
    if m is None:
        raise ValueError("mass m is required (flag --m or config)")
    return default_params(mesh, m, **overrides)


def boundary_thickness_rows(mesh, thickness):
    chain, closed = shape2d.boundary_chain(mesh)
    pts = mesh.nodes[chain]
    steps = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    arc = np.concatenate([[0.0], np.cumsum(steps)])
    return [(float(arc[i]), float(pts[i, 0]), float(pts[i, 1]),
             float(thickness[chain[i]])) for i in range(len(chain))]


def write_eig_outputs(out, mesh, result, state, formats, prefix=""):
    h = mesh.mesh_size()
    if "csv" in formats:
        write_csv(os.path.join(out, prefix + "lambda_table.csv"),
                  ["h", "nodes", "triangles", "iterations", "lambda"],
                  [(h, mesh.num_nodes, mesh.num_triangles,
                    result.iterations, result.lam)])
        trace = [(k, state.energy_history[k + 1], state.dtu_history[k],
                  state.norm_sq_history[k + 1])
                 for k in range(len(state.dtu_history))]
        write_csv(os.path.join(out, prefix + "flow_trace.csv"),
                  ["step", "energy", "dtu_norm", "norm_sq"], trace)
        write_csv(os.path.join(out, prefix + "thickness.csv"),
                  ["arclength", "x", "y", "thickness"],
                  boundary_thickness_rows(mesh, result.thickness))
    if "vtk" in formats:
        write_vtk(os.path.join(out, prefix + "solution.vtk"), mesh,
                  {"u": result.u, "thickness": result.thickness})


def cmd_eig(args, config):
    mesh = build_mesh(args.domain, args.ref, a=args.a, b=args.b)
    p = resolve_params(args, mesh, config)
    ops = assemble(mesh)
    result, state = solve_assembled(ops, p)
    formats = args.format.split(",")
    os.makedirs(args.out, exist_ok=True)
    write_eig_outputs(args.out, mesh, result, state, formats)
    print(f"domain={args.domain} h={mesh.mesh_size():.5g} "
          f"nodes={mesh.num_nodes} triangles={mesh.num_triangles} "
          f"K={result.iterations} lambda={result.lam:.6f}")
    if not result.converged:
        print("error: flow did not reach the stopping criterion "
              f"within {p.max_steps} steps", file=sys.stderr)
        return 1
    return 0


def cmd_sweep_mass(args, config):
    mesh = build_mesh(args.domain, args.ref, a=args.a, b=args.b)
    ops = assemble(mesh)
    lam_d, _ = lineig.linear_eig(lineig.LinearEigProblem("dirichlet", ops))
    lam_n, _ = lineig.linear_eig(lineig.LinearEigProblem("neumann", ops))
    masses = [float(v) for v in args.m_list.split(",")]
    rows = []
    for m in masses:
        args.m = m
        p = resolve_params(args, mesh, config)
        result, _ = solve_assembled(ops, p)
        rows.append((m, result.lam_plain, lam_d, lam_n))
        print(f"m={m}: lambda={result.lam_plain:.6f}")
    os.makedirs(args.out, exist_ok=True)
    write_csv(os.path.join(args.out, "mass_sweep.csv"),
              ["m", "lambda", "lambda_D", "lambda_N"], rows)
    return 0


def cmd_shape2d(args, config):
    mesh = build_mesh("disk", args.ref)
    p = resolve_params(args, mesh, config)
    os.makedirs(args.out, exist_ok=True)
    formats = args.format.split(",")

    ops = assemble(mesh)
    lam_robin, _ = lineig.linear_eig(
        lineig.LinearEigProblem("robin", ops, m=p.m))

    def snapshot(step, state):
        if "vtk" in formats:
            write_vtk(os.path.join(args.out, f"shape_step_{step:03d}.vtk"),
                      state.mesh, {"u": state.eigen.u,
                                   "thickness": state.eigen.thickness})
        save_mesh(os.path.join(args.out, f"shape_step_{step:03d}.txt"),
                  state.mesh)

    state = shape2d.shape_descent(
        mesh, p, tau_max=args.tau_max, theta=args.theta,
        eps_stop_shape=args.eps_stop_shape, max_outer=args.max_outer,
        on_accept=snapshot if args.snapshots else None)

    write_csv(os.path.join(args.out, "shape_descent.csv"),
              ["step", "tau", "lambda"],
              [(s, t, l) for s, t, l in state.log])
    lam_disk = state.log[0][2]
    lam_opt = state.lambda_history[-1]
    write_csv(os.path.join(args.out, "shape_compare.csv"),
              ["m", "lambda_robin_uniform", "lambda_domain", "lambda_optimized"],
              [(p.m, lam_robin, lam_disk, lam_opt)])
    save_mesh(os.path.join(args.out, "shape_final.txt"), state.mesh)
    if "vtk" in formats:
        write_vtk(os.path.join(args.out, "shape_final.vtk"), state.mesh,
                  {"u": state.eigen.u, "thickness": state.eigen.thickness})
    print(f"m={p.m}: lambda_R_uni={lam_robin:.6f} lambda_start={lam_disk:.6f} "
          f"lambda_opt={lam_opt:.6f} accepted_steps={len(state.log) - 1}")
    return 0


def cmd_axisym(args, config):
    os.makedirs(args.out, exist_ok=True)
    formats = args.format.split(",")
    if args.task == "ball":
        mesh = make_half_profile("ball", args.ref)
        p = resolve_params(args, mesh, config)
        ops = assemble(mesh)
        result, state = solve_assembled(ops, p)
        lam_robin, _ = lineig.linear_eig(
            lineig.LinearEigProblem("robin", ops, m=p.m))
        write_eig_outputs(args.out, mesh, result, state, formats, prefix="ball_")
        gain = (lam_robin - result.lam_plain) / lam_robin
        write_csv(os.path.join(args.out, "ball_compare.csv"),
                  ["m", "lambda_robin_uniform", "lambda", "gain_percent"],
                  [(p.m, lam_robin, result.lam_plain, 100.0 * gain)])
        print(f"ball m={p.m}: lambda_R={lam_robin:.6f} "
              f"lambda={result.lam_plain:.6f} gain={100 * gain:.2f}%")
        return 0

    if args.task == "sweep":
        grid = [float(v) for v in args.a_grid.split(",")]
        mesh0 = make_half_profile("ellipsoid", args.ref, a=grid[0])
        p = resolve_params(args, mesh0, config)
        points, a_star = axisym_mod.ellipsoid_sweep(grid, p.m, p, args.ref)
        write_csv(os.path.join(args.out, "ellipsoid_sweep.csv"),
                  ["a", "lambda"], points)
        print(f"argmin a* = {a_star}")
        return 0

    if args.task == "optab":
        mesh0 = make_half_profile("half_ellipsoids", args.ref,
                                  a=args.a0, b=args.b0)
        p = resolve_params(args, mesh0, config)
        log = []
        a, b, lam = axisym_mod.half_ellipsoid_opt(
            p.m, p, a0=args.a0, b0=args.b0, refinements=args.ref, log=log)
        write_csv(os.path.join(args.out, "half_ellipsoid_opt.csv"),
                  ["a", "b", "lambda"], log)
        write_csv(os.path.join(args.out, "half_ellipsoid_result.csv"),
                  ["a", "b", "lambda"], [(a, b, lam)])
        print(f"optimum: a={a:.4f} b={b:.4f} lambda={lam:.6f}")
        return 0

    raise ValueError(f"unknown axisym task {args.task!r}")


def _add_solver_flags(sub):
    sub.add_argument("--m", type=float, default=None, help="film mass")
    sub.add_argument("--ref", type=int, default=5, help="refinement level")
    sub.add_argument("--eps", type=float, default=None,
                     help="regularization (default h/10)")
    sub.add_argument("--tau", type=float, default=None,
                     help="flow step size (default 1)")
    sub.add_argument("--eps-stop", dest="eps_stop", type=float, default=None,
                     help="stopping threshold (default h/10)")
    sub.add_argument("--seed", type=int, default=None,
                     help="random-init seed (default 0)")
    sub.add_argument("--metric", choices=("lumped", "h1"), default=None,
                     help="evolution metric")
    sub.add_argument("--max-steps", dest="max_steps", type=int, default=None)
    sub.add_argument("--cg-tol", dest="cg_tol", type=float, default=None)
    sub.add_argument("--out", default="out", help="output directory")
    sub.add_argument("--format", default="csv,vtk",
                     help="comma list of output formats")
    sub.add_argument("--config", default=None,
                     help="key=value parameter file")


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="insulfem",
        description="Optimal-insulation eigenvalue problems and shape "
                    "optimization on P1 finite elements.")
    subs = parser.add_subparsers(dest="command", required=True)

    eig = subs.add_parser("eig", help="one nonlinear eigenvalue run")
    eig.add_argument("domain", choices=("disk", "square", "ball",
                                        "ellipsoid", "half-ellipsoids"))
    eig.add_argument("--a", type=float, default=None, help="axial semi-axis")
    eig.add_argument("--b", type=float, default=None,
                     help="right semi-axis (half-ellipsoids)")
    _add_solver_flags(eig)

    sweep = subs.add_parser("sweep-mass", help="lambda versus mass curve")
    sweep.add_argument("domain", choices=("disk", "square", "ball",
                                          "ellipsoid", "half-ellipsoids"))
    sweep.add_argument("--m-list", dest="m_list", required=True,
                       help="comma list of masses")
    sweep.add_argument("--a", type=float, default=None)
    sweep.add_argument("--b", type=float, default=None)
    _add_solver_flags(sweep)

    shape = subs.add_parser("shape2d", help="planar shape descent from the disk")
    shape.add_argument("--tau-max", dest="tau_max", type=float, default=0.5)
    shape.add_argument("--theta", type=float, default=0.5)
    shape.add_argument("--eps-stop-shape", dest="eps_stop_shape", type=float,
                       default=1e-4)
    shape.add_argument("--max-outer", dest="max_outer", type=int, default=30)
    shape.add_argument("--snapshots", action="store_true",
                       help="write mesh and field files per accepted step")
    _add_solver_flags(shape)

    axi = subs.add_parser("axisym", help="rotational-body experiments")
    axi.add_argument("task", choices=("ball", "sweep", "optab"))
    axi.add_argument("--a-grid", dest="a_grid",
                     default=",".join(f"{1.0 + 0.05 * k:.2f}" for k in range(11)))
    axi.add_argument("--a0", type=float, default=1.2)
    axi.add_argument("--b0", type=float, default=1.2)
    _add_solver_flags(axi)

    args = parser.parse_args(argv)
    config = read_config(args.config) if args.config else {}
    try:
        if args.command == "eig":
            return cmd_eig(args, config)
        if args.command == "sweep-mass":
            return cmd_sweep_mass(args, config)
        if args.command == "shape2d":
            return cmd_shape2d(args, config)
        if args.command == "axisym":
            return cmd_axisym(args, config)
    except InsulfemError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())

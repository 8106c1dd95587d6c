"""Command line front end.

Subcommands: ``run`` executes one benchmark configuration and writes its
report files, ``validate-mesh`` checks a mesh file for structural problems,
``case-info`` prints a case's parameters and expected outputs.  Exit codes:
0 on success, 1 on usage errors, 2 on runtime failures.
"""

from __future__ import annotations

import argparse
import sys

from . import bench, mdgrid, mesh_io


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad arguments; remap to 1 so that
    runtime failures keep 2 for themselves."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="dfmbench",
                     description="Mixed-dimensional benchmark runner for "
                                 "flow and transport in fractured media.")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    run = sub.add_parser("run", help="run one benchmark configuration")
    run.add_argument("--case", required=True, choices=bench.CASES)
    run.add_argument("--refinement", required=True, type=int,
                     help="mesh refinement level, coarsest is 0")
    run.add_argument("--cond", type=int, choices=(0, 1),
                     help="conductivity variant of the regular case")
    run.add_argument("--mesh", help="MSH file overriding the built-in mesh")
    run.add_argument("--out", default=".", help="output root directory")
    run.add_argument("--institution", default="LOCAL")
    run.add_argument("--scheme", default="TPFA")
    run.add_argument("--dt", type=float,
                     help="time step override; must divide the horizon")
    run.add_argument("--solver-tol", type=float, default=1e-10)
    run.add_argument("--outlet", choices=("full", "band"), default="full",
                     help="outlet extent for the single case: the whole "
                          "face y=0 or only its band z<10")

    val = sub.add_parser("validate-mesh",
                         help="check an MSH file for conformity problems")
    val.add_argument("path")

    info = sub.add_parser("case-info",
                          help="print parameters and outputs of a case")
    info.add_argument("case", choices=bench.CASES)
    return parser


def _run(parser, args):
    if args.case == "regular" and args.cond is None:
        parser.error("--cond is required for the regular case")
    if args.case != "regular" and args.cond is not None:
        parser.error("--cond only applies to the regular case")
    if args.case != "single" and args.outlet != "full":
        parser.error("--outlet only applies to the single case")
    try:
        summary = bench.run_case(
            args.case, args.refinement, cond=args.cond, mesh=args.mesh,
            out=args.out, institution=args.institution, scheme=args.scheme,
            dt=args.dt, solver_tol=args.solver_tol,
            outlet_variant=args.outlet)
    except Exception as exc:
        print(f"dfmbench: error: {exc}", file=sys.stderr)
        return 2
    for path in summary.files:
        print(path)
    print(f"cells by dimension: {summary.cell_counts}, "
          f"dof: {summary.ndof}, nonzeros: {summary.nnz}")
    print(f"steps: {summary.n_steps} x {summary.dt} s, "
          f"flow residual: {summary.flow_residual:.3e}, "
          f"mass balance: {summary.conservation:.3e}, "
          f"tracer budget: {summary.budget_max:.3e}")
    return 0


def _validate_mesh(path):
    try:
        with open(path) as handle:
            text = handle.read()
        doc = mesh_io.parse_msh(text)
        grid = mesh_io.build_mixed_grid(doc)
    except OSError as exc:
        print(f"dfmbench: error: {exc}", file=sys.stderr)
        return 2
    except (mesh_io.MeshFormatError, mesh_io.NonConformingMeshError,
            mesh_io.TagError, ValueError) as exc:
        print(f"invalid mesh: {exc}", file=sys.stderr)
        return 2
    violations = [v for v in mdgrid.validate(grid) if not v.informational]
    if violations:
        for v in violations:
            print(f"{v.kind} (dim {v.dim}, index {v.index}): {v.message}",
                  file=sys.stderr)
        print(f"{len(violations)} violation(s) found", file=sys.stderr)
        return 2
    print(f"ok: cells by dimension {grid.cell_counts()}")
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "run":
        return _run(parser, args)
    if args.command == "validate-mesh":
        return _validate_mesh(args.path)
    print(bench.case_info(args.case), end="")
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface.

Exit codes: 0 success, 1 verification failed, 2 usage or format error,
3 budget exhausted or inconclusive.  Results go to stdout (or --out),
diagnostics to stderr as one line each.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
import warnings
from fractions import Fraction

from . import christol, gps, semilinear, structure
from . import dfao as dfa
from .digits import SabcParams, format_exponent, parse_exponent, sabc_contains
from .errors import (AlphabetError, AmbiguityError, BoundsExceeded, BudgetExceeded, DomainError,
                     FormatError, HahnautoError, IncompatibleError, InconclusiveError,
                     UnderdeterminedError)
from .field import parse_field_spec
from .poly import TruncSeries, format_bipoly, format_poly, parse_bipoly, series_root

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class VerificationFailed(Exception):
    """Raised by a command whose data-level check did not pass."""


# -- I/O helpers ------------------------------------------------------------------------------

def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _emit(args, text: str):
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _machine(path: str) -> dfa.Dfao:
    return dfa.from_text(_read(path))


def _gps(path: str) -> gps.GpsAutomaton:
    return gps.GpsAutomaton.from_dfao(_machine(path))


def _emit_machine(args, A: dfa.Dfao):
    if args.format == "dot":
        _emit(args, dfa.dot_export(A))
    else:
        _emit(args, dfa.to_text(A))


def _field(args, default=None):
    if args.field:
        F = parse_field_spec(args.field)
        if default is not None:
            F.check(default)
        return F
    if default is None:
        raise FormatError("this command needs --field")
    return default


def _exponent(text: str, p: int) -> Fraction:
    e = parse_exponent(text, p)
    if e < 0:
        raise DomainError(f"negative exponent {text}")
    return e


# -- field ---------------------------------------------------------------------------------

def cmd_field_info(args):
    F = _field(args)
    lines = [F.header(), f"q {F.q}", f"characteristic {F.p}", f"degree {F.e}",
             f"modulus [{','.join(map(str, F.modulus))}]",
             f"generator {F.format(F.generator)}"]
    _emit(args, "\n".join(lines) + "\n")


# -- autom -----------------------------------------------------------------------------------

def cmd_autom_run(args):
    A = _machine(args.machine)
    _emit(args, A.field.format(A.run(args.word)) + "\n")


def cmd_autom_minimize(args):
    _emit_machine(args, dfa.minimize(_machine(args.machine)))


def cmd_autom_product(args):
    A, B = _machine(args.left), _machine(args.right)
    _emit_machine(args, dfa.minimize(dfa.product(A, B, args.op)))


def cmd_autom_reverse(args):
    A = _machine(args.machine)
    _emit_machine(args, dfa.reverse(A, budget=args.budget or 100_000))


def cmd_autom_normalize(args):
    A = _machine(args.machine)
    _emit_machine(args, dfa.minimize(dfa.zero_normalize(A, args.mode)))


def cmd_autom_recode(args):
    A = _machine(args.machine)
    _emit_machine(args, dfa.minimize(dfa.block_recode(A, args.p)))


def cmd_autom_dot(args):
    _emit(args, dfa.dot_export(_machine(args.machine)))


# -- christol ---------------------------------------------------------------------------------

def _bipoly(args):
    F = _field(args)
    return F, parse_bipoly(F, _read(args.poly))


def cmd_christol_from_poly(args):
    F, P = _bipoly(args)
    prefix = christol.leading_prefix(P, args.prefix, F)
    A = christol.kernel_automaton(P, prefix, budget=args.budget or 10_000)
    _emit_machine(args, A)


def cmd_christol_to_poly(args):
    A = _machine(args.machine)
    D = args.precision or 512
    res = christol.automaton_to_polynomial(A, args.dx, args.dt, D)
    _emit(args, format_bipoly(res.P) + "\n")


def cmd_christol_series(args):
    F, P = _bipoly(args)
    prefix = christol.leading_prefix(P, args.prefix, F)
    D = args.precision or 32
    x = series_root(P, prefix, D)
    _emit(args, f"{format_poly(x.to_poly())} + O(t^{D})\n")


# -- gps ----------------------------------------------------------------------------------------

def cmd_gps_coeff(args):
    x = _gps(args.machine)
    _emit(args, x.field.format(x.coeff(_exponent(args.exponent, x.p))) + "\n")


def cmd_gps_support(args):
    x = _gps(args.machine)
    bound = _exponent(args.bound, x.p) if args.bound else float("inf")
    res = gps.support_enum(x, bound, args.max_terms, args.budget or 100_000)
    lines = [f"{format_exponent(e, x.p)} {x.field.format(x.coeff(e))}" for e in res.exponents]
    _emit(args, "\n".join(lines) + ("\n" if lines else ""))
    if not res.complete:
        print(f"warning: {res.warning}", file=sys.stderr)
        return EXIT_BUDGET


def cmd_gps_add(args):
    x, y = _gps(args.left), _gps(args.right)
    _emit_machine(args, gps.add(x, y).machine)


def cmd_gps_scale(args):
    x = _gps(args.machine)
    if args.scalar is not None:
        x = gps.scalar_multiple(x, x.field.parse(args.scalar))
    if args.k:
        x = gps.exponent_scale_pk(x, args.k)
    _emit_machine(args, x.machine)


def _ore(path: str):
    return gps.OreForm.from_relation(semilinear.ore_from_text(_read(path)))


def default_ore_samples(p: int, seed: int = 0, count: int = 500, kmax: int = 2, imax: int = 20):
    """{k - p^-i : 1 <= k <= kmax, 1 <= i <= imax} plus seeded random exponents."""
    pts = [Fraction(k) - Fraction(1, p ** i) for k in range(1, kmax + 1) for i in range(1, imax + 1)]
    rng = random.Random(seed)
    pts += [gps.random_exponent(rng, p) for _ in range(count)]
    return pts


def cmd_gps_verify_ore(args):
    x = _gps(args.machine)
    form = _ore(args.relation)
    rep = gps.verify_ore_pointwise(x, form, default_ore_samples(x.p, args.seed, args.samples))
    fails = rep.failures
    lines = [f"checked {len(rep.residues)}", f"failures {len(fails)}"]
    lines += [f"residue {format_exponent(e, x.p)} {x.field.format(r)}" for e, r in fails[:20]]
    _emit(args, "\n".join(lines) + "\n")
    if fails:
        raise VerificationFailed(f"{len(fails)} nonzero residues")


def cmd_gps_decompose(args):
    x = _gps(args.machine)
    pairs = gps.decompose(x)
    if not args.dir:
        raise FormatError("decompose writes one file per component; pass --dir")
    os.makedirs(args.dir, exist_ok=True)
    for j, (c, z) in enumerate(pairs):
        with open(os.path.join(args.dir, f"c{j}.dfao"), "w", encoding="utf-8") as fh:
            fh.write(dfa.to_text(c))
        with open(os.path.join(args.dir, f"z{j}.dfao"), "w", encoding="utf-8") as fh:
            fh.write(dfa.to_text(z.machine))
    _emit(args, f"pairs {len(pairs)}\n")


def cmd_gps_recombine(args):
    files = args.files
    if not files or len(files) % 2:
        raise FormatError("recombine takes pairs: INT_MACHINE FRAC_MACHINE ...")
    pairs = [(_machine(files[i]), _gps(files[i + 1])) for i in range(0, len(files), 2)]
    _emit_machine(args, gps.recombine(pairs).machine)


def _trunc(path: str):
    return gps.from_text(_read(path))


def cmd_gps_trunc_from(args):
    x = _gps(args.machine)
    bound = _exponent(args.bound, x.p)
    _emit(args, gps.to_text(gps.from_automaton(x, bound, args.max_terms, args.budget or 1_000_000)))


def cmd_gps_trunc_add(args):
    _emit(args, gps.to_text(_trunc(args.left) + _trunc(args.right)))


def cmd_gps_trunc_mul(args):
    _emit(args, gps.to_text(_trunc(args.left) * _trunc(args.right)))


def cmd_gps_trunc_pow(args):
    _emit(args, gps.to_text(_trunc(args.series) ** args.n))


def cmd_gps_trunc_ore(args):
    x = _trunc(args.series)
    res = gps.ore_substitute(x, _ore(args.relation))
    _emit(args, gps.to_text(res))
    if not res.is_zero():
        raise VerificationFailed("relation leaves nonzero terms below the frontier")


# -- structure ----------------------------------------------------------------------------------

def cmd_structure_normalize(args):
    A = _machine(args.machine)
    if A.radix:
        A = structure.fractional_machine(gps.GpsAutomaton.from_dfao(A), args.n)
    _emit_machine(args, structure.normalize_for_analysis(A))


def _analysis_machine(A: dfa.Dfao) -> dfa.Dfao:
    return structure.fractional_machine(gps.GpsAutomaton.from_dfao(A), 0) if A.radix else A


def cmd_structure_certify(args):
    A = _machine(args.machine)
    try:
        rep = (structure.certify_gps(gps.GpsAutomaton.from_dfao(A)) if A.radix
               else structure.certify_sabc(A))
    except HahnautoError as exc:
        w = getattr(exc, "witness", None)
        if isinstance(w, structure.ReentryWitness):
            sym = lambda s: "".join(str(d) for d in s)
            _emit(args, f"witness {w.kind} state {w.state} entry {sym(w.entry)} "
                        f"loopA {sym(w.loopA)} loopB {sym(w.loopB or ())} exit {sym(w.exit)}\n")
            raise VerificationFailed("support is not well-ordered") from exc
        raise
    text = rep.to_text()
    if args.check:
        x = gps.GpsAutomaton.from_dfao(A) if A.radix else None
        if x is not None:
            res = gps.support_enum(x, max_terms=args.check, budget=args.budget or 100_000)
            bad = [e for e in res.exponents if not sabc_contains(e, rep.params, x.p)[0]]
            text += f"checked {len(res.exponents)}\noutside {len(bad)}\n"
            if bad:
                _emit(args, text)
                raise VerificationFailed(f"{len(bad)} support elements outside the certified set")
    _emit(args, text)


def cmd_structure_periodicity(args):
    A = _machine(args.machine)
    B = _analysis_machine(A)
    b = structure.structural_periodicity(B)
    text = f"M {b.M}\nN {b.N}\n"
    if args.check_index:
        x = gps.GpsAutomaton.from_dfao(A) if A.radix else None
        if x is None:
            raise FormatError("--check-index needs a radix machine")
        rep = structure.certify_gps(x)
        res = structure.check_index_periodicity(x.coeff, rep.params, b, x.p)
        text += f"families {res.families}\nviolations {len(res.violations)}\n"
        if res.violations:
            _emit(args, text)
            raise VerificationFailed("an index sequence is not eventually periodic")
    _emit(args, text)


def cmd_structure_build_criterion(args):
    x = _gps(args.machine)
    res = structure.build_from_criterion(x.coeff, x.p, x.field, args.c, args.M, args.N,
                                         runcap=args.runcap, budget=args.budget or 200_000)
    for w in res.warnings:
        print(f"warning: {w}", file=sys.stderr)
    _emit_machine(args, res.machine)


def cmd_structure_recurrence(args):
    R = structure.recurrence_from_text(_read(args.system))
    cert = structure.recurrence_periodicity(R)
    ok = structure.verify_certificate(R, cert)
    _emit(args, f"head {cert.head}\nperiod {cert.period}\ndim {cert.dim}\n"
                f"verified {'true' if ok else 'false'}\n")
    if not ok:
        raise VerificationFailed("simulation disagrees with the certificate")


# -- semilinear -------------------------------------------------------------------------------

def cmd_semilinear_solve(args):
    S = semilinear.system_from_text(_read(args.system))
    B = semilinear.solve_semilinear(S, args.precision or 256, args.window)
    lines = [f"status {B.status}", f"dim {B.dim}", f"n {S.n}",
             "dims " + " ".join(f"{D}:{d}" for D, d in B.dims)]
    for v in B.vectors:
        lines.append(semilinear.vector_to_text(S.field, v).rstrip("\n"))
    _emit(args, "\n".join(lines) + "\n")
    if B.status != "stable":
        return EXIT_BUDGET


def cmd_semilinear_verify(args):
    S = semilinear.system_from_text(_read(args.system))
    F, v = semilinear.vector_from_text(_read(args.vector))
    S.field.check(F)
    if len(v) != S.n:
        raise FormatError(f"vector has {len(v)} entries, system has {S.n}")
    D = args.precision or v[0].precision
    ok = semilinear.verify_solution(S, v, D)
    _emit(args, f"verified {'true' if ok else 'false'}\n")
    if not ok:
        raise VerificationFailed("vector does not solve the system")


def cmd_semilinear_build_esystem(args):
    spec = semilinear.espec_from_text(_read(args.spec))
    _emit(args, semilinear.system_to_text(semilinear.build_e_system(spec, literal=args.literal)))


def cmd_semilinear_pipeline(args):
    x = _gps(args.x)
    rel = semilinear.ore_from_text(_read(args.relation))
    basis = [_gps(p) for p in args.basis]
    Q = semilinear.system_from_text(_read(args.qmatrix))
    if Q.n != len(basis):
        raise FormatError("the q-power matrix size differs from the basis size")
    res = semilinear.algebraic_to_automatic_pipeline(
        x, rel, basis, Q.A, D=args.precision or 64, samples=args.samples, seed=args.seed,
        literal=args.literal, budget=args.budget or 10_000)
    lines = [f"basis {len(basis)}", "dims " + " ".join(f"{D}:{d}" for D, d in res.solutions.dims)]
    for i, (P, m) in enumerate(zip(res.c_polys, res.c_machines)):
        rel_text = "zero" if P is None else " ; ".join(format_bipoly(P).splitlines())
        lines.append(f"c{i} states {m.nstates} relation {rel_text}")
    lines.append(f"checked {res.checked}")
    lines.append(f"mismatches {len(res.mismatches)}")
    if args.dir:
        os.makedirs(args.dir, exist_ok=True)
        for i, m in enumerate(res.c_machines):
            with open(os.path.join(args.dir, f"c{i}.dfao"), "w", encoding="utf-8") as fh:
                fh.write(dfa.to_text(m))
        with open(os.path.join(args.dir, "assembled.dfao"), "w", encoding="utf-8") as fh:
            fh.write(dfa.to_text(res.assembled.machine))
    _emit(args, "\n".join(lines) + "\n")
    if not res.ok:
        raise VerificationFailed("assembled machine disagrees with x")


# -- parser ---------------------------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    c = argparse.ArgumentParser(add_help=False)
    S = argparse.SUPPRESS
    c.add_argument("--field", default=S, help="field spec p^e[:modulus], e.g. 2 or 2^2:[1,1,1]")
    c.add_argument("--precision", type=int, default=S, help="series precision D")
    c.add_argument("--budget", type=int, default=S, help="state or step budget K")
    c.add_argument("--out", default=S, help="write the result to PATH instead of stdout")
    c.add_argument("--format", choices=("text", "dot"), default=S, help="machine output format")
    c.add_argument("--seed", type=int, default=S, help="seed for sampled checks")
    return c


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="hahnauto", description=__doc__.splitlines()[0])
    ap.add_argument("--field", default=None)
    ap.add_argument("--precision", type=int, default=None)
    ap.add_argument("--budget", type=int, default=None)
    ap.add_argument("--out", default=None)
    ap.add_argument("--format", choices=("text", "dot"), default="text")
    ap.add_argument("--seed", type=int, default=0)
    groups = ap.add_subparsers(dest="group", required=True)

    def group(name, help_):
        g = groups.add_parser(name, help=help_)
        return g.add_subparsers(dest="verb", required=True)

    def verb(sub, name, fn, help_):
        p = sub.add_parser(name, help=help_, parents=[common])
        p.set_defaults(fn=fn)
        return p

    g = group("field", "finite field information")
    verb(g, "info", cmd_field_info, "print the field configuration")

    g = group("autom", "automaton utilities")
    p = verb(g, "run", cmd_autom_run, "output of a machine on a word")
    p.add_argument("machine")
    p.add_argument("word")
    p = verb(g, "minimize", cmd_autom_minimize, "minimize a machine")
    p.add_argument("machine")
    p = verb(g, "product", cmd_autom_product, "pointwise sum or product of two machines")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--op", choices=("add", "mul"), default="add")
    p = verb(g, "reverse", cmd_autom_reverse, "machine for the reversed reading order")
    p.add_argument("machine")
    p = verb(g, "normalize", cmd_autom_normalize, "zero normalization")
    p.add_argument("machine")
    p.add_argument("--mode", choices=("canonical-zero", "pad-invariant"), default="canonical-zero")
    p = verb(g, "recode", cmd_autom_recode, "base p^k digits to base p digits")
    p.add_argument("machine")
    p.add_argument("--p", type=int, default=None)
    p = verb(g, "dot", cmd_autom_dot, "Graphviz export")
    p.add_argument("machine")

    g = group("christol", "polynomials and automata")
    p = verb(g, "from-poly", cmd_christol_from_poly, "kernel automaton of a polynomial root")
    p.add_argument("poly")
    p.add_argument("--prefix", default=None, help="series prefix pinning the root")
    p = verb(g, "to-poly", cmd_christol_to_poly, "guess a polynomial for a machine's series")
    p.add_argument("machine")
    p.add_argument("--dx", type=int, default=2)
    p.add_argument("--dt", type=int, default=4)
    p = verb(g, "series", cmd_christol_series, "power series root of a polynomial")
    p.add_argument("poly")
    p.add_argument("--prefix", default=None)

    g = group("gps", "generalized power series")
    p = verb(g, "coeff", cmd_gps_coeff, "coefficient at an exponent such as 7/2^3")
    p.add_argument("machine")
    p.add_argument("exponent")
    p = verb(g, "support", cmd_gps_support, "first support elements in increasing order")
    p.add_argument("machine")
    p.add_argument("--bound", default=None)
    p.add_argument("--max-terms", type=int, default=20)
    p = verb(g, "add", cmd_gps_add, "sum of two series")
    p.add_argument("left")
    p.add_argument("right")
    p = verb(g, "scale", cmd_gps_scale, "scalar multiple and/or exponents times p^k")
    p.add_argument("machine")
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--scalar", default=None)
    p = verb(g, "verify-ore", cmd_gps_verify_ore, "pointwise check of an additive relation")
    p.add_argument("machine")
    p.add_argument("relation")
    p.add_argument("--samples", type=int, default=500)
    p = verb(g, "decompose", cmd_gps_decompose, "split into integer-part and fractional machines")
    p.add_argument("machine")
    p.add_argument("--dir", default=None)
    p = verb(g, "recombine", cmd_gps_recombine, "sum of products of component pairs")
    p.add_argument("files", nargs="+")
    p = verb(g, "trunc-from", cmd_gps_trunc_from, "finite truncation of a machine's series")
    p.add_argument("machine")
    p.add_argument("bound")
    p.add_argument("--max-terms", type=int, default=1000)
    p = verb(g, "trunc-add", cmd_gps_trunc_add, "sum of truncated series")
    p.add_argument("left")
    p.add_argument("right")
    p = verb(g, "trunc-mul", cmd_gps_trunc_mul, "product of truncated series")
    p.add_argument("left")
    p.add_argument("right")
    p = verb(g, "trunc-pow", cmd_gps_trunc_pow, "power of a truncated series")
    p.add_argument("series")
    p.add_argument("n", type=int)
    p = verb(g, "trunc-ore", cmd_gps_trunc_ore, "substitute a truncated series into a relation")
    p.add_argument("series")
    p.add_argument("relation")

    g = group("structure", "support structure certificates")
    p = verb(g, "normalize", cmd_structure_normalize, "analysis normal form")
    p.add_argument("machine")
    p.add_argument("--n", type=int, default=0, help="integer part for radix machines")
    p = verb(g, "certify", cmd_structure_certify, "S_{a,b,c} parameters or a reentry witness")
    p.add_argument("machine")
    p.add_argument("--check", type=int, default=0, help="test this many support elements")
    p = verb(g, "periodicity", cmd_structure_periodicity, "structural periodicity bounds")
    p.add_argument("machine")
    p.add_argument("--check-index", action="store_true")
    p = verb(g, "build-criterion", cmd_structure_build_criterion,
             "fractional machine from coefficients and periodicity data")
    p.add_argument("machine", help="radix machine used as the coefficient oracle")
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--runcap", type=int, default=None)
    p = verb(g, "recurrence", cmd_structure_recurrence, "periodicity certificate of a recurrence")
    p.add_argument("system")

    g = group("semilinear", "semilinear Frobenius systems")
    p = verb(g, "solve", cmd_semilinear_solve, "power series solutions of A v^q = v")
    p.add_argument("system")
    p.add_argument("--window", type=int, default=2)
    p = verb(g, "verify", cmd_semilinear_verify, "check a vector against a system")
    p.add_argument("system")
    p.add_argument("vector")
    p = verb(g, "build-esystem", cmd_semilinear_build_esystem, "stacked system from a d table")
    p.add_argument("spec")
    p.add_argument("--literal", action="store_true", help="use the e_{l,N+1-i} index")
    p = verb(g, "pipeline", cmd_semilinear_pipeline, "coefficients of x over a supplied basis")
    p.add_argument("--x", required=True)
    p.add_argument("--relation", required=True)
    p.add_argument("--basis", nargs="+", required=True)
    p.add_argument("--qmatrix", required=True)
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--dir", default=None)
    p.add_argument("--literal", action="store_true")
    return ap


def _code_for(exc: BaseException) -> int:
    if isinstance(exc, VerificationFailed):
        return EXIT_FAIL
    if isinstance(exc, (BudgetExceeded, InconclusiveError, AmbiguityError, BoundsExceeded,
                        UnderdeterminedError)):
        return EXIT_BUDGET
    if isinstance(exc, (FormatError, AlphabetError, DomainError, IncompatibleError,
                        OSError)):
        return EXIT_USAGE
    if isinstance(exc, HahnautoError):
        return EXIT_FAIL
    return EXIT_USAGE


def _warn_line(message, category, filename, lineno, file=None, line=None):
    print(f"warning: {message}", file=sys.stderr)


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = _warn_line
            code = args.fn(args)
    except (HahnautoError, VerificationFailed, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _code_for(exc)
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())

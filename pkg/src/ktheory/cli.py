"""Command-line entry point: ``ktheory <subcommand> [flags] [--json]``.

Exit codes: 0 ok, 2 input error (including bad flags), 3 verification error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import bott, grothendieck, kfinite, kone, kz, kzero
from .abelian import FGAbelianGroup, format_rational, parse_group
from .errors import InputError, KTheoryError, VerificationError
from .fields import ring_from_name

EXIT_OK, EXIT_INPUT, EXIT_VERIFY = 0, 2, 3


@dataclass
class CommandResult:
    status: str  # ok | input-error | verification-error
    payload: object = None
    citations: list[str] = field(default_factory=list)
    diagnostic: object = None
    text: list[str] = field(default_factory=list, repr=False)

    @property
    def exit_code(self) -> int:
        return {"ok": EXIT_OK, "input-error": EXIT_INPUT}.get(self.status, EXIT_VERIFY)

    def to_json(self, command: str) -> dict:
        out = {"status": self.status, "command": command, "payload": self.payload, "citations": self.citations}
        if self.status != "ok":
            out["diagnostic"] = self.diagnostic
        return out


def _ok(payload, text, citations=()) -> CommandResult:
    return CommandResult("ok", payload, list(citations), None, list(text))


def _read(value: str) -> str:
    """Inline text, ``@path`` or ``-`` for standard input."""
    if value == "-":
        return sys.stdin.read()
    if value.startswith("@"):
        try:
            with open(value[1:], encoding="utf-8") as fh:
                return fh.read()
        except OSError as exc:
            raise InputError(f"cannot read {value[1:]}: {exc}") from exc
    return value


def _json_arg(value: str):
    try:
        return json.loads(_read(value))
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from exc


def _g(group: FGAbelianGroup, args) -> str:
    return group.pretty(ascii=getattr(args, "ascii", False))


def _group_payload(group: FGAbelianGroup) -> dict:
    return {"group": group.to_json(), "pretty": str(group)}


# --------------------------------------------------------------------------
# handlers


def cmd_groth(args) -> CommandResult:
    if (args.monoid is None) == (args.table is None):
        raise InputError("give exactly one of --monoid or --table")
    if args.monoid is not None:
        monoid = grothendieck.parse_presentation(_read(args.monoid))
        backend = args.backend or "presented"
        if backend != "presented":
            raise InputError("the finite backend needs an addition table (--table)")
        completions = {"presented": grothendieck.symmetrize_presented(monoid)}
    else:
        finite = grothendieck.FiniteMonoid.from_json(_json_arg(args.table))
        backend = args.backend or "both"
        completions = {}
        if backend in ("finite", "both"):
            completions["finite"] = grothendieck.symmetrize_finite(finite)
        if backend in ("presented", "both"):
            completions["presented"] = grothendieck.symmetrize_presented(grothendieck.table_presentation(finite))
    main = completions.get("finite") or completions["presented"]
    payload = {"backend": backend, **_group_payload(main.group)}
    payload["canonical_map"] = {g: list(v) for g, v in main.canonical_map.items()}
    text = [f"S(M) = {_g(main.group, args)}"]
    text += [f"  {g} -> ({', '.join(map(str, v))})" for g, v in main.canonical_map.items()]
    if len(completions) == 2:
        agree = completions["finite"].group == completions["presented"].group
        if agree:
            grothendieck.completion_isomorphism(completions["finite"], completions["presented"])
        else:
            raise VerificationError(
                "backends disagree",
                {"finite": str(completions["finite"].group), "presented": str(completions["presented"].group)},
            )
        payload["backends_agree"] = True
        text.append("backends agree")
    if args.element:
        images = {}
        for e in args.element:
            key = int(e) if e.isdigit() and main.backend == "finite" else e
            images[e] = list(grothendieck.map_to_completion(main, key))
        payload["elements"] = images
        text += [f"  [{e}] = ({', '.join(map(str, v))})" for e, v in images.items()]
    return _ok(payload, text)


def _descriptor(args) -> kzero.RingDescriptor:
    return kzero.RingDescriptor(args.ring, args.N, args.n, args.p, args.base)


def cmd_k0(args) -> CommandResult:
    if args.unitalize:
        if len(args.unitalize) != 2:
            raise InputError("--unitalize takes two pairs a,l a',l'")
        pairs = []
        for text in args.unitalize:
            parts = text.split(",")
            if len(parts) != 2:
                raise InputError(f"expected a pair a,l, got {text!r}")
            pairs.append(tuple(int(x) for x in parts))
        a, lam = kzero.unitalize().multiply(*pairs)
        return _ok({"product": [a, lam]}, [f"({a}, {lam})"], ["unitalization: (a,l)(a',l') = (aa' + la' + l'a, ll')"])
    if args.ring:
        value = kzero.k0_known(_descriptor(args))
        payload = {"ring": _descriptor(args).to_json(), **value.to_json()}
        text = [f"K_0({_descriptor(args).label()}) = {_g(value.group, args) if value.group else value.symbolic}"]
        if args.reduced:
            if value.group is None:
                raise InputError("no concrete group to reduce; give --base for M_n")
            red = kzero.reduced_k0(value.group, args.unit_rank)
            payload["reduced"] = _group_payload(red)
            text.append(f"reduced = {_g(red, args)}")
        return _ok(payload, text, [value.citation])
    f = ring_from_name(args.field)
    if args.matrix is None:
        k0 = kzero.k0_of_field(f)
        return _ok({"field": f.name, **_group_payload(k0.group)}, [f"K_0({f.name}) = {_g(k0.group, args)}"])
    rows = _json_arg(args.matrix)
    if args.morita is not None:
        mt = kzero.morita_transport(rows, args.morita, f)
        return _ok(mt.to_json(), [f"rank over {f.name}: {mt.base_rank}", f"rank over M_{mt.n}: {mt.matrix_ring_rank}"])
    q = kzero.verify_idempotent(rows, f)
    rank = kzero.rank_class(q)
    cls = kzero.k0_class(q)
    payload = {"field": f.name, "n": q.n, "rank": rank, "class": list(cls)}
    return _ok(payload, [f"idempotent of size {q.n}, rank {rank}", f"class in K_0({f.name}) = Z: {cls[0]}"])


def cmd_k1(args) -> CommandResult:
    if args.ring:
        value = kone.k1_known(_descriptor(args))
        payload = {"ring": _descriptor(args).to_json(), **value.to_json()}
        return _ok(payload, [f"K_1({_descriptor(args).label()}) = {value.symbolic}"], [value.citation])
    if args.cyclotomic is not None:
        g = kone.cyclotomic_k1(args.cyclotomic)
        return _ok({"p": args.cyclotomic, **_group_payload(g)}, [_g(g, args)], ["cyclotomic units: Z^((p-3)/2) ⊕ Z/p"])
    if args.circle:
        rep = kone.circle_ring_example(args.circle, args.samples)
        return _ok(rep.to_json(), [f"winding {rep.winding}: {rep.verdict}"])
    if args.loop:
        rep = kone.loop_ring_check(args.loop, args.times, ring_from_name(args.field or "Z"))
        text = [
            f"{rep.p}: {'in' if rep.p_member else 'not in'} loop ring",
            f"{rep.q}: {'in' if rep.q_member else 'not in'} loop ring",
            f"product {rep.product}: {'in' if rep.product_member else 'not in'} loop ring",
        ]
        if rep.ideal_closed is not None:
            text.append(f"ideal closure on {rep.ideal_checked} samples: {'ok' if rep.ideal_closed else 'FAILED'}")
        return _ok(rep.to_json(), text)
    if not args.field:
        raise InputError("give one of --ring, --field, --cyclotomic, --circle or --loop")
    r = ring_from_name(args.field)
    if args.matrix is None:
        value = kone.k1_of_field(r)
        return _ok({"field": r.name, **value.to_json()}, [f"K_1({r.name}) = {value.symbolic}"], [value.citation])
    cls, cert = kone.reduce_to_diagonal(_json_arg(args.matrix), r)
    payload = {"class": cls.to_json(), "certificate": cert.to_json()}
    text = [f"class: {r.format(cls.unit)}", f"certificate: {len(cert.ops)} elementary operations"]
    text += [f"  row{op.i} += {r.format(op.lam)} * row{op.j}" for op in cert.ops]
    return _ok(payload, text)


def _clutching_input(args) -> bott.ClutchingInput:
    f = args.f.replace(" ", "")
    if f in ("z^k", "power"):
        if args.n != 1:
            raise InputError("f = z^k is a 1x1 map; use --f diag --powers for n > 1")
        return bott.ClutchingInput.power(args.k)
    if f in ("I", "identity", "1"):
        return bott.ClutchingInput.diagonal_powers([0] * args.n)
    if f == "diag":
        if not args.powers:
            raise InputError("--f diag needs --powers a,b,...")
        ks = [int(x) for x in args.powers.split(",")]
        if len(ks) != args.n:
            raise InputError(f"--powers gives {len(ks)} exponents for n = {args.n}")
        return bott.ClutchingInput.diagonal_powers(ks)
    if f == "table":
        if not args.table:
            raise InputError("--f table needs --table @file.csv")
        ci = bott.parse_table_csv(_read(args.table))
        if ci.n != args.n:
            raise InputError(f"sample table has {ci.n}x{ci.n} matrices, not n = {args.n}")
        return ci
    raise InputError(f"unknown clutching map {args.f!r}; expected z^k, identity, diag or table")


def cmd_clutch(args) -> CommandResult:
    ci = _clutching_input(args)
    cf = bott.clutch(ci, args.p, args.grid, args.tol, args.partition, args.workers)
    payload = cf.to_json()
    text = [f"residual {cf.idempotency_residual:.3e}", f"trace_dev {cf.trace_deviation:.3e}"]
    if args.p == 2:
        ch = bott.chern_number(cf, args.workers)
        payload.update({"chern": ch.value, "chern_int": ch.rounded})
        text += [f"chern {ch.value:.6f}", f"chern_int {ch.rounded}"]
    else:
        frame = bott.global_frame(cf)
        payload.update(
            {"trivialized": frame is not None, "frame_min_singular_value": frame.min_singular_value if frame else None}
        )
        text.append("trivialized by a global frame" if frame else "no global frame found")
    return _ok(payload, text)


def cmd_winding(args) -> CommandResult:
    if args.csv:
        zs = []
        for line in _read(args.csv).splitlines():
            cells = [c.strip() for c in line.split(",")]
            try:
                _, re_, im_ = (float(c) for c in cells)
            except ValueError:
                continue
            zs.append(complex(re_, im_))
        loop = zs
        label = "table"
    elif args.f in ("z^k", "power"):
        k = args.k
        loop = bott.sample_loop(lambda z: z**k, args.samples)
        label = f"z^{k}"
    elif args.f in ("conj", "zbar"):
        loop = bott.sample_loop(lambda z: z.conjugate(), args.samples)
        label = "conj(z)"
    else:
        raise InputError(f"unknown loop {args.f!r}; expected z^k, conj or --csv")
    w = bott.winding_number(loop)
    return _ok({"loop": label, "samples": len(loop), "winding": w}, [str(w)])


def cmd_rho(args) -> CommandResult:
    rows = []
    for t in args.t:
        v = bott.vector_field_params(t)
        rows.append({"t": t, "rho": bott.rho(t), "odd_part": v.odd_part, "beta": v.beta, "gamma": v.gamma, "delta": v.delta})
    payload = rows[0] if len(rows) == 1 else rows
    return _ok(payload, [str(r["rho"]) for r in rows], ["rho(t) = 2^gamma + 8 delta - 1; rho(t) = 0 for odd t"])


def cmd_loopchain(args) -> CommandResult:
    if args.space is None:
        chain = list(bott.LOOP_CHAIN)
        return _ok({"chain": chain}, [" -> ".join(chain + [chain[0]])])
    path = [bott.loop_chain_step(args.space) if i == 0 else None for i in range(args.steps)]
    for i in range(1, args.steps):
        path[i] = bott.loop_chain_step(path[i - 1])
    return _ok({"start": args.space, "steps": args.steps, "path": path}, [path[-1] if path else args.space])


def cmd_pigl(args) -> CommandResult:
    ps = range(args.p, args.p + 1) if args.max_p is None else range(0, args.max_p + 1)
    rows = [{"p": p, **_group_payload(bott.pi_gl_c(p))} for p in ps]
    text = [f"pi_{r['p']}(GL(C)) = {r['pretty']}" for r in rows] if len(rows) > 1 else [rows[0]["pretty"]]
    return _ok(rows[0] if len(rows) == 1 else rows, text, ["pi_0 = K_1^top(C) = 0; pi_1 = reduced K(C_C(S^2)) = Z; period 2"])


def cmd_kfq(args) -> CommandResult:
    q = args.q
    if args.units:
        f = kfinite.GF(q)
        g, gen = kfinite.unit_group(f)
        return _ok({"q": q, **_group_payload(g), "generator": f.to_json(gen)}, [f"F_{q}* = {_g(g, args)}, generator {f.format(gen)}"])
    if args.mod_n is not None:
        g = kfinite.k1_mod_n(kfinite.GF(q), args.mod_n)
        return _ok({"q": q, "n": args.mod_n, **_group_payload(g)}, [f"K_1(F_{q}; Z/{args.mod_n}) = {_g(g, args)}"])
    if args.index is not None:
        index = args.index
    elif args.i is not None:
        index = 2 * args.i - 1 if args.parity == "odd" else 2 * args.i
    else:
        raise InputError("give --index, --i with --parity, --units or --mod-n")
    g = kfinite.quillen_k(q, index)
    return _ok({"q": q, "index": index, **_group_payload(g)}, [f"K_{index}(F_{q}) = {_g(g, args)}"],
               ["K_(2i-1)(F_q) = Z/(q^i - 1), K_(2i)(F_q) = 0"])


def cmd_k2_symbols(args) -> CommandResult:
    f = kfinite.GF(args.q)
    sg = kfinite.steinberg_symbol_group(f)
    k2 = kfinite.milnor_k2(f)
    payload = {"q": args.q, "generator": f.to_json(sg.generator), "m": sg.m, **_group_payload(k2)}
    text = [f"K_2(F_{args.q}) = {_g(k2, args)} ({len(sg.steinberg)} Steinberg relations over Z/{sg.m})"]
    if args.show_relations:
        payload["relations"] = [{"x": f.to_json(x), "class": v} for x, v in sg.steinberg]
        text += [f"  {{{f.format(x)}, 1 - {f.format(x)}}} -> {v} mod {sg.m}" for x, v in sg.steinberg]
    return _ok(payload, text, ["Matsumoto: kernel of the symbol map generated by x ⊗ (1 - x)"])


def cmd_kcoeff(args) -> CommandResult:
    if args.suslin_index is not None:
        v = kfinite.suslin_mod_n(args.suslin_index, args.n)
        text = [f"K_{args.suslin_index}(F; Z/{args.n}) = {_g(v.group, args)}" + (f" ({v.twist})" if v.twist else "")]
        return _ok({"index": args.suslin_index, "n": args.n, **v.to_json()}, text, ["Suslin: K_2i(F; Z/n) = mu_n^(x)i, odd = 0"])
    if args.ki is None or args.kim1 is None:
        raise InputError("kcoeff needs --ki and --kim1 (or --suslin-index)")
    b = kfinite.coeff_from_sequence(parse_group(args.ki), parse_group(args.kim1), args.n)
    text = [
        f"quotient part {_g(b.quotient_part, args)}",
        f"kernel part {_g(b.kernel_part, args)}",
        f"order {b.order}" + ("" if b.extension_determined else " (extension not determined)"),
    ]
    return _ok(b.to_json(), text)


def cmd_bernoulli(args) -> CommandResult:
    ks = [args.k] if args.k is not None else list(range(1, args.max_k + 1))
    entries = [kz.bernoulli(k) for k in ks]
    return _ok([e.to_json() for e in entries], [f"B_{e.k} = {format_rational(e.value)}" for e in entries])


def cmd_kz_table(args) -> CommandResult:
    if args.to < args.start:
        raise InputError("--to must be at least --from")
    rows = [kz.kz_conjecture(n) for n in range(args.start, args.to + 1)]
    cells = [("n", "group", "source", "formula")] + [(str(r.n), _g(r.group, args), r.source, r.formula_tag) for r in rows]
    widths = [max(len(c[i]) for c in cells) for i in range(3)]
    text = [" | ".join([c[i].ljust(widths[i]) for i in range(3)] + [c[3]]) for c in cells]
    return _ok([r.to_json() for r in rows], text, ["conjectural K_n(Z) in terms of Bernoulli numbers c_k/d_k"])


def cmd_k2q(args) -> CommandResult:
    t = kz.k2_of_Q_torsion(args.bound)
    text = [" ⊕ ".join(label for label, _ in t.factors) if not args.ascii else " + ".join(label for label, _ in t.factors)]
    text.append(f"= {_g(t.group, args)}")
    return _ok(t.to_json(), text, ["K_2(Q) = Z/2 ⊕ (Z/p)* over odd primes p"])


def cmd_pseudoisotopy(args) -> CommandResult:
    rows = [kz.pseudoisotopy_rational(i) for i in range(0, args.max_i + 1)]
    text = ["i | pi_i(P) ⊗ Q | K_(i+2)(Z) ⊗ Q | agrees"]
    text += [f"{r.i} | {r.value} | {r.cross_check} | {'yes' if r.agrees else 'NO'}" for r in rows]
    return _ok([r.to_json() for r in rows], text, ["displayed period-4 sequence 0, 0, Q, 0, ..."])


def cmd_replay(args) -> CommandResult:
    data = _json_arg(args.certificate if args.certificate == "-" or args.certificate.startswith("@") else "@" + args.certificate)
    if isinstance(data, dict) and "payload" in data:
        data = data["payload"]
    if isinstance(data, dict) and "certificate" in data:
        data = data["certificate"]
    cert = kone.ElementaryCertificate.from_json(data)
    cert.verify()
    return _ok({"verified": True, "ops": len(cert.ops), "ring": cert.ring.name}, [f"certificate verified ({len(cert.ops)} operations)"])


# --------------------------------------------------------------------------
# parser


def _ring_flags(p):
    p.add_argument("--ring", help="table ring tag, e.g. Z, 'Z(sqrt-5)', C[G], C_C(S2), M_n, compact, bounded, cyclotomic")
    p.add_argument("--N", type=int, help="number of irreducible representations for C[G]")
    p.add_argument("--n", type=int, help="matrix size for M_n")
    p.add_argument("--p", type=int, help="odd prime for the cyclotomic ring")
    p.add_argument("--base", help="coefficient ring tag for M_n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="emit one JSON document")
    common.add_argument("--ascii", action="store_true", default=argparse.SUPPRESS, help="write ⊕ as +")

    parser = argparse.ArgumentParser(prog="ktheory", description="Computational K-theory workbench.", parents=[common])
    sub = parser.add_subparsers(dest="command", required=True, metavar="subcommand")

    def add(name, handler: Callable, help_text: str):
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        p.set_defaults(handler=handler)
        return p

    p = add("groth", cmd_groth, "group completion of a commutative monoid")
    p.add_argument("--monoid", help="presentation 'generators: a b; relations: a+a = a' or JSON (@file, -)")
    p.add_argument("--table", help="finite monoid JSON {'table': [[...]], 'zero': 0, 'names': [...]} (@file, -)")
    p.add_argument("--backend", choices=("presented", "finite", "both"))
    p.add_argument("--element", action="append", help="element (formal sum, name or index) to map; repeatable")

    p = add("k0", cmd_k0, "K_0: table rings, idempotents over fields, Morita transport, unitalization")
    _ring_flags(p)
    p.add_argument("--reduced", action="store_true", help="also print the reduced group")
    p.add_argument("--unit-rank", type=int, default=1, help="free rank of the image of K(Z) (default 1)")
    p.add_argument("--field", default="Q", help="Q, F_p or F_q")
    p.add_argument("--matrix", help="idempotent as JSON rows (@file, -)")
    p.add_argument("--morita", type=int, metavar="N", help="read --matrix as blocks over M_N")
    p.add_argument("--unitalize", nargs="+", metavar="A,L", help="multiply two pairs in Z+")

    p = add("k1", cmd_k1, "K_1: Gauss reduction certificates, tables, loop ring, circle ring")
    _ring_flags(p)
    p.add_argument("--field", help="Q, Z, F_p or F_q")
    p.add_argument("--matrix", help="invertible matrix as JSON rows (@file, -)")
    p.add_argument("--cyclotomic", type=int, metavar="P")
    p.add_argument("--circle", nargs="?", const="rotation", choices=("rotation", "inverse", "identity"))
    p.add_argument("--samples", type=int, default=1024)
    p.add_argument("--loop", metavar="P", help="polynomial in x to test for loop-ring membership")
    p.add_argument("--times", default="x^2 - x", metavar="Q", help="second polynomial")

    p = add("clutch", cmd_clutch, "clutching construction on S^1 or S^2")
    p.add_argument("--p", type=int, default=2, choices=(1, 2))
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--f", default="z^k", help="z^k, identity, diag or table")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--powers", help="exponents for --f diag, e.g. 1,2")
    p.add_argument("--table", help="CSV theta,re00,im00,... (@file, -)")
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--tol", type=float, default=bott.DEFAULT_TOL)
    p.add_argument("--partition", choices=("linear", "cosine"), default="linear")
    p.add_argument("--workers", type=int, default=1)

    p = add("winding", cmd_winding, "winding number of a loop in C*")
    p.add_argument("--f", default="z^k", help="z^k or conj")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--samples", type=int, default=256)
    p.add_argument("--csv", help="CSV rows theta,re,im (@file, -)")

    p = add("rho", cmd_rho, "Radon-Hurwitz number rho(t)")
    p.add_argument("t", type=int, nargs="+")

    p = add("loopchain", cmd_loopchain, "loop spaces in the real Bott chain")
    p.add_argument("space", nargs="?")
    p.add_argument("--steps", type=int, default=1)

    p = add("pigl", cmd_pigl, "stable homotopy groups of GL(C)")
    p.add_argument("p", type=int, nargs="?", default=0)
    p.add_argument("--max-p", type=int)

    p = add("kfq", cmd_kfq, "K-groups of finite fields")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--index", type=int)
    p.add_argument("--i", type=int)
    p.add_argument("--parity", choices=("odd", "even"), default="odd")
    p.add_argument("--units", action="store_true", help="unit group with a verified generator")
    p.add_argument("--mod-n", type=int, help="K_1(F_q; Z/n) = F*/(F*)^n")

    p = add("k2-symbols", cmd_k2_symbols, "K_2(F_q) from Steinberg symbols")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--show-relations", action="store_true")

    p = add("kcoeff", cmd_kcoeff, "K-theory with Z/n coefficients")
    p.add_argument("--ki", help="K_i(A) in the group grammar, e.g. 'Z ⊕ Z/2'")
    p.add_argument("--kim1", help="K_(i-1)(A)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--suslin-index", type=int, help="K_index(F; Z/n) for F algebraically closed")

    p = add("bernoulli", cmd_bernoulli, "Bernoulli numbers B_k (positive convention)")
    p.add_argument("--max-k", type=int, default=10)
    p.add_argument("--k", type=int)

    p = add("kz-table", cmd_kz_table, "conjectural K_n(Z)")
    p.add_argument("--from", dest="start", type=int, default=0)
    p.add_argument("--to", type=int, default=30)

    p = add("k2q", cmd_k2q, "K_2(Q) torsion up to a prime bound")
    p.add_argument("--bound", type=int, required=True)

    p = add("pseudoisotopy", cmd_pseudoisotopy, "rational pseudo-isotopy groups")
    p.add_argument("--max-i", type=int, default=12)

    p = add("replay", cmd_replay, "re-verify a stored K_1 certificate")
    p.add_argument("certificate", help="certificate JSON file or - (a k1 --json document also works)")

    return parser


def dispatch(argv: Sequence[str] | None = None) -> tuple[CommandResult, str, argparse.Namespace]:
    args = build_parser().parse_args(argv)
    # the flag actions are shared with every subparser, so defaults are filled in here
    args.json = getattr(args, "json", False)
    args.ascii = getattr(args, "ascii", False)
    try:
        result = args.handler(args)
    except InputError as exc:
        result = CommandResult("input-error", None, [], str(exc))
    except VerificationError as exc:
        result = CommandResult("verification-error", None, [], exc.diagnostic)
        result.text = [str(exc)]
    except KTheoryError as exc:
        result = CommandResult("verification-error", None, [], str(exc))
    return result, args.command, args


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    return str(obj)


def main(argv: Sequence[str] | None = None) -> int:
    if hasattr(sys.stdout, "reconfigure"):
        sys.stdout.reconfigure(encoding="utf-8")
    result, command, args = dispatch(argv)
    if args.json:
        sys.stdout.write(json.dumps(_jsonable(result.to_json(command)), indent=2, ensure_ascii=False) + "\n")
    elif result.status == "ok":
        sys.stdout.write("\n".join(result.text) + "\n")
    else:
        message = result.text[0] if result.text else result.diagnostic
        sys.stderr.write(f"ktheory {command}: {result.status}: {message}\n")
        if result.status == "verification-error" and result.text:
            sys.stderr.write(f"diagnostic: {json.dumps(_jsonable(result.diagnostic), ensure_ascii=False)}\n")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())

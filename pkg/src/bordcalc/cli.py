"""Command line front end: group ingestion, dispatch, reports, caching.

Exit codes: 0 success, 2 input/parse error, 3 resource cap, 4 precondition
violation. Machine output (--json) is a single JSON document with sorted
keys; everything except the "timing" field is byte-reproducible for a
fixed tool version, group and parameters, warm or cold cache.
"""

from __future__ import annotations

import argparse
import fcntl
import hashlib
import json
import os
import sys
import time
from typing import Optional

from . import __version__
from .bogomolov import (
    METHOD_INTEGRAL,
    METHOD_ORDER_MODULAR,
    SurfaceTuple,
    bogomolov,
    bogomolov_auto,
    witness_search,
    witness_verify,
)
from .bordism import (
    FLAVOR_SO,
    FLAVOR_U,
    adjacent_table_dim2,
    adjacent_table_dim3,
    omega2,
    sk2,
    sk_point,
    torsion_omega2,
)
from .errors import (
    BordcalcError,
    InputError,
    PreconditionError,
    ResourceLimitError,
)
from .groups import FiniteGroup, builtin, from_permutations
from .homology import INTEGERS, default_modular_ring, h1, h2
from .lattice import subgroup_classes
from .presentation import parse_word, realize_presentation
from .smith import AbelianGroupDescriptor

CACHE_DIR_DEFAULT = ".bordcalc-cache"
CACHE_SCHEMA = 1


def _descriptor_json(d: Optional[AbelianGroupDescriptor]):
    if d is None:
        return None
    return {
        "free_rank": d.free_rank,
        "invariant_factors": list(d.invariant_factors),
        "pretty": str(d),
    }


class Cache:
    """Versioned JSON records under a directory, with advisory locking."""

    def __init__(self, root: str, enabled: bool = True):
        self.root = root
        self.enabled = enabled

    def _path(self, key: str) -> str:
        return os.path.join(self.root, key[:2], key + ".json")

    def _locked(self):
        os.makedirs(self.root, exist_ok=True)
        return open(os.path.join(self.root, "lock"), "a+")

    @staticmethod
    def key(fingerprint: str, command: str, params: dict) -> str:
        blob = json.dumps(
            {"fp": fingerprint, "cmd": command, "params": params},
            sort_keys=True,
            separators=(",", ":"),
        )
        return hashlib.sha256(blob.encode()).hexdigest()

    def get(self, key: str):
        if not self.enabled:
            return None
        path = self._path(key)
        if not os.path.exists(path):
            return None
        with self._locked() as lk:
            fcntl.flock(lk, fcntl.LOCK_SH)
            try:
                with open(path) as fh:
                    record = json.load(fh)
            finally:
                fcntl.flock(lk, fcntl.LOCK_UN)
        if record.get("schema") != CACHE_SCHEMA or record.get("tool") != __version__:
            return None
        return record.get("payload")

    def put(self, key: str, payload):
        if not self.enabled:
            return
        path = self._path(key)
        with self._locked() as lk:
            fcntl.flock(lk, fcntl.LOCK_EX)
            try:
                os.makedirs(os.path.dirname(path), exist_ok=True)
                tmp = path + ".tmp"
                with open(tmp, "w") as fh:
                    json.dump(
                        {"schema": CACHE_SCHEMA, "tool": __version__, "payload": payload},
                        fh,
                        sort_keys=True,
                    )
                os.replace(tmp, path)
            finally:
                fcntl.flock(lk, fcntl.LOCK_UN)


def resolve_group(source: str, max_cosets: int) -> FiniteGroup:
    """builtin:NAME, file:PATH (JSON), or presentation:PATH-or-inline."""
    if source.startswith("builtin:"):
        return builtin(source[len("builtin:") :])
    if source.startswith("file:"):
        path = source[len("file:") :]
        try:
            with open(path) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise InputError(f"cannot read group file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"group file is not valid JSON: {exc}") from exc
        kind = data.get("type")
        if kind == "permutation":
            return from_permutations(
                int(data["degree"]),
                data["generators"],
                labels=data.get("labels"),
            )
        if kind == "cayley":
            return FiniteGroup(data["table"])
        raise InputError(f"unknown group file type {kind!r}")
    if source.startswith("presentation:"):
        rest = source[len("presentation:") :]
        if os.path.exists(rest):
            with open(rest) as fh:
                text = fh.read()
        else:
            text = rest.strip()
            if text and text[0] in "'\"" and text[-1] == text[0]:
                text = text[1:-1]
        return realize_presentation(text, max_cosets=max_cosets)
    raise InputError(
        "group source must start with builtin:, file:, or presentation:"
    )


def _split_tuple_words(spec: str) -> list[str]:
    """Split a witness tuple on top-level commas (commutators keep theirs)."""
    parts, depth, cur = [], 0, []
    for ch in spec:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


# -- command handlers ------------------------------------------------------------


def _cmd_group(G, args):
    hist = {str(k): v for k, v in G.element_order_histogram()}
    return {
        "order": G.order,
        "abelian": G.is_abelian(),
        "element_order_histogram": hist,
        "generators": list(G.gen_labels),
        "h1": _descriptor_json(h1(G)),
    }


def _cmd_subgroups(G, args):
    lat = subgroup_classes(G)
    from .groups import classify_special, subgroup_as_group

    classes = []
    for c in lat.classes:
        K, _ = subgroup_as_group(G, c.representative)
        classes.append(
            {
                "order": c.order,
                "class_size": c.class_size,
                "normalizer_order": c.normalizer.order,
                "weyl_order": c.weyl.order,
                "shape": str(classify_special(K)),
            }
        )
    return {
        "num_classes": len(lat.classes),
        "total_subgroups": lat.total_subgroups,
        "classes": classes,
    }


def _ring_for(G, method: str):
    if method == METHOD_INTEGRAL:
        return INTEGERS
    return default_modular_ring(G)


def _cmd_h2(G, args):
    pres = h2(G, _ring_for(G, args.method))
    return {
        "method": args.method,
        "ring": str(pres.ring),
        "descriptor": _descriptor_json(pres.descriptor),
        "elementary_divisors": list(pres.integral_factors),
    }


def _cmd_bogomolov(G, args):
    res = bogomolov(G, args.method)
    return {
        "method": res.method,
        "order": res.order,
        "descriptor": _descriptor_json(res.descriptor),
        "exponent_bound": res.exponent_bound,
        "modular_factors": list(res.modular_factors),
        "notes": list(res.notes),
    }


def _cmd_bordism(G, args):
    flavor = FLAVOR_U if args.flavor == "u" else FLAVOR_SO
    rep = omega2(G, flavor)
    breakdown = [
        {
            "subgroup_order": c.subgroup_order,
            "class_size": c.class_size,
            "shape": str(c.shape),
            "weyl_order": c.weyl_order,
            "free": c.u_free if flavor == FLAVOR_U else c.so_free,
            "torsion": _descriptor_json(c.torsion),
            "notes": list(c.notes),
        }
        for c in rep.contributions
    ]
    return {
        "flavor": flavor,
        "descriptor": _descriptor_json(rep.total),
        "torsion": _descriptor_json(rep.torsion),
        "breakdown": breakdown,
    }


def _cmd_sk(G, args):
    if args.point is not None:
        sk, skbar = sk_point(args.point)
        if sk is None:
            return {
                "dimension": args.point,
                "sk": None,
                "sk_reduced": None,
                "note": "not specified in dimensions 0 and 1",
            }
        return {
            "dimension": args.point,
            "sk": _descriptor_json(sk),
            "sk_reduced": _descriptor_json(skbar),
        }
    sk, skbar = sk2(G)
    return {"sk2": _descriptor_json(sk), "sk2_reduced": _descriptor_json(skbar)}


def _cmd_tables(G, args):
    table = adjacent_table_dim2 if args.dim == "dim2" else adjacent_table_dim3
    flavor = FLAVOR_U if args.flavor == "u" else FLAVOR_SO
    return {
        "dim": args.dim,
        "flavor": flavor,
        "descriptor": _descriptor_json(table(G, flavor)),
    }


def _parse_tuple(G, spec: str, genus: Optional[int]) -> SurfaceTuple:
    words = _split_tuple_words(spec)
    elems = tuple(G.evaluate_word(parse_word(w, G.gen_labels)) for w in words)
    t = SurfaceTuple(G, elems)
    if genus is not None and t.genus != genus:
        raise InputError(f"tuple has genus {t.genus}, expected {genus}")
    return t


def _cmd_witness(G, args):
    if args.action == "verify":
        if not args.tuple:
            raise InputError("witness verify needs --tuple")
        t = _parse_tuple(G, args.tuple, args.genus)
        rep = witness_verify(G, t)
        return {
            "action": "verify",
            "tuple": args.tuple,
            "genus": t.genus,
            "relator_ok": rep.relator_ok,
            "class_coordinates": list(rep.class_coordinates)
            if rep.class_coordinates is not None
            else None,
            "nontrivial": rep.nontrivial,
            "generates_group": rep.generates_group,
            "notes": list(rep.notes),
        }
    res = bogomolov(G, METHOD_INTEGRAL)
    found = witness_search(G, args.genus or 2, args.budget, args.seed, result=res)
    return {
        "action": "search",
        "genus": args.genus or 2,
        "budget": args.budget,
        "seed": args.seed,
        "found": None
        if found is None
        else [G.names[x] for x in found.elements],
    }


_HANDLERS = {
    "group": _cmd_group,
    "subgroups": _cmd_subgroups,
    "h2": _cmd_h2,
    "bogomolov": _cmd_bogomolov,
    "bordism": _cmd_bordism,
    "sk": _cmd_sk,
    "tables": _cmd_tables,
    "witness": _cmd_witness,
}

# commands whose results are pure functions of (group, parameters): cacheable
_CACHEABLE = {"subgroups", "h2", "bogomolov", "bordism", "sk", "tables", "group"}


def _human(command: str, payload: dict) -> str:
    lines = [f"bordcalc {command}"]

    def walk(prefix, obj):
        if isinstance(obj, dict):
            if set(obj) >= {"free_rank", "invariant_factors", "pretty"}:
                lines.append(f"{prefix}: {obj['pretty']}")
                return
            for k, v in obj.items():
                walk(f"{prefix}.{k}" if prefix else k, v)
        elif isinstance(obj, list) and obj and isinstance(obj[0], dict):
            for i, v in enumerate(obj):
                walk(f"{prefix}[{i}]", v)
        else:
            lines.append(f"{prefix}: {obj}")

    walk("", payload)
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bordcalc",
        description="Equivariant surface bordism, homology quotients, and "
        "cut-and-paste groups of finite groups.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, group_required=True):
        p.add_argument("-g", "--group", required=group_required, help="builtin:NAME | file:PATH | presentation:TEXT-or-PATH")
        p.add_argument("--max-cosets", type=int, default=100000)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--cache-dir", default=CACHE_DIR_DEFAULT)
        p.add_argument("--no-cache", action="store_true")

    common(sub.add_parser("group", help="order, abelianization, histogram"))
    common(sub.add_parser("subgroups", help="conjugacy classes of subgroups"))
    p = sub.add_parser("h2", help="second homology over a ring")
    common(p)
    p.add_argument("--method", choices=[METHOD_INTEGRAL, METHOD_ORDER_MODULAR], default=METHOD_INTEGRAL)
    p = sub.add_parser("bogomolov", help="toral quotient of H2")
    common(p)
    p.add_argument("--method", choices=[METHOD_INTEGRAL, METHOD_ORDER_MODULAR], default=METHOD_INTEGRAL)
    p = sub.add_parser("bordism", help="equivariant surface bordism report")
    common(p)
    p.add_argument("--flavor", choices=["u", "so"], required=True)
    p = sub.add_parser("sk", help="cut-and-paste groups")
    common(p, group_required=False)
    p.add_argument("--point", type=int, default=None, help="dimension n for the one-point space")
    p = sub.add_parser("tables", help="adjacent-family shape tables")
    common(p)
    p.add_argument("dim", choices=["dim2", "dim3"])
    p.add_argument("--flavor", choices=["u", "so"], required=True)
    p = sub.add_parser("witness", help="surface-group witness tuples")
    common(p)
    p.add_argument("action", choices=["verify", "search"])
    p.add_argument("--tuple", default=None, help="comma-separated generator words")
    p.add_argument("--genus", type=int, default=None)
    p.add_argument("--budget", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.time()
    command = args.command

    if command == "sk" and args.group is None and args.point is None:
        raise InputError("sk needs --group or --point")
    G = None
    if args.group is not None:
        G = resolve_group(args.group, args.max_cosets)

    params = {
        k: v
        for k, v in sorted(vars(args).items())
        if k not in ("command", "json", "cache_dir", "no_cache", "group")
        and v is not None
    }
    fingerprint = G.fingerprint() if G is not None else "-"
    cache = Cache(args.cache_dir, enabled=not args.no_cache)
    key = Cache.key(fingerprint, command, params)
    payload = cache.get(key) if command in _CACHEABLE else None
    cache_hit = payload is not None
    if payload is None:
        payload = _HANDLERS[command](G, args)
        if command in _CACHEABLE:
            cache.put(key, payload)

    envelope = {
        "version": __version__,
        "command": command,
        "group": {"fingerprint": fingerprint, "order": G.order if G else None},
        "parameters": params,
        "result": payload,
        "timing": {"seconds": round(time.time() - t0, 6), "cache_hit": cache_hit},
    }
    if args.json:
        sys.stdout.write(json.dumps(envelope, sort_keys=True, separators=(",", ":")) + "\n")
    else:
        sys.stdout.write(_human(command, payload) + "\n")
    return 0


def main(argv=None) -> int:
    try:
        return run(argv)
    except (InputError,) as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return 2
    except ResourceLimitError as exc:
        sys.stderr.write(f"resource limit: {exc}\n")
        return 3
    except PreconditionError as exc:
        sys.stderr.write(f"precondition violated: {exc}\n")
        return 4
    except BordcalcError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 4


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""Regenerate the golden JSON fixtures shipped in qgrkit/fixtures.

Run from the repository root:  python3 scripts/make_fixtures.py
Review the diff by hand before committing new fixtures.
"""

import json
import os
from importlib import resources

from qgrkit.collection import BUILTINS, builtin_collection, morphism_algebra, verify_collection
from qgrkit.ext import ext_qgr
from qgrkit.expressions import build
from qgrkit.oracles import prop_ext
from qgrkit.rings import make_ring

OUT = str(resources.files("qgrkit").joinpath("fixtures"))


def dump(name, data):
    with open(os.path.join(OUT, name), "w") as fh:
        json.dump(data, fh, indent=1, sort_keys=True)
        fh.write("\n")


def ext_table(n):
    ring = make_ring(n)
    w = 6 * n + 2
    rows = []
    for s in ("A", "chi"):
        for t in ("A", "chi"):
            for d in range(-w, w + 1):
                src, dst = f"{s}(0)", f"{t}({d})"
                r = ext_qgr(build(src, ring), build(dst, ring), 2)
                rows.append({"source": src, "target": dst, "dims": r.as_list(2),
                             "expected": prop_ext(n, (s, 0), (t, d)), "certified_by": r.certified_by})
    return {"n": n, "rows": rows}


def main():
    for n in (2, 3):
        dump(f"ext_table_n{n}.json", ext_table(n))
        for label in BUILTINS:
            rep = verify_collection(builtin_collection(label, n), jobs=os.cpu_count() or 1)
            data = rep.to_json()
            data["expected_pass"] = rep.expected_pass
            dump(f"collection_{label}_n{n}.json", data)
    dump("morphisms_ec_3_n3.json", morphism_algebra(builtin_collection("ec_3", 3), jobs=os.cpu_count() or 1))


if __name__ == "__main__":
    main()

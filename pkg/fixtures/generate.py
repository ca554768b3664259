#!/usr/bin/env python3
"""Regenerate the shipped datum fixtures and golden reports.

Run from the repository root:  python3 fixtures/generate.py
"""

import json
import pathlib
import subprocess
import sys

from pwss.builders import (
    blowup_cone_datum,
    cusp_datum,
    k3_algebra,
    k3_cone_datum,
    qhm_cone_datum,
    segre_datum,
    two_cycle_surface_datum,
    weak_link_datum,
)
from pwss.datum import _algebra_to_json, save_datum

HERE = pathlib.Path(__file__).parent


def build_data():
    save_datum(segre_datum(), HERE / "segre.json")
    save_datum(cusp_datum(), HERE / "cusp.json")
    save_datum(k3_cone_datum(), HERE / "k3_cone.json")
    save_datum(blowup_cone_datum(), HERE / "blowup_cone.json")
    save_datum(qhm_cone_datum(), HERE / "qhm_cone.json")
    save_datum(two_cycle_surface_datum(), HERE / "two_cycle.json")
    save_datum(weak_link_datum(), HERE / "weak_link.json")

    # base surface algebra for cone-build
    hs = k3_algebra()
    from pwss.builders import pairings_from_volume

    pairings_from_volume(hs, 4, (1,))
    with open(HERE / "k3_surface.json", "w") as fh:
        json.dump(_algebra_to_json(hs, 4), fh, indent=1)

    # negative controls: a corrupted Gysin map and a corrupted eta
    broken = segre_datum().to_json()
    broken["maps"]["gamma"][2]["entries"][1][0] = "7"
    with open(HERE / "broken_gysin.json", "w") as fh:
        json.dump(broken, fh, indent=1)
    broken2 = cusp_datum().to_json()
    broken2["maps"]["eta1"]["entries"][0][0] = "5"
    with open(HERE / "broken_eta.json", "w") as fh:
        json.dump(broken2, fh, indent=1)
    with open(HERE / "broken_schema.json", "w") as fh:
        json.dump({"kind": "nonsense", "n": 0}, fh)


def build_golden():
    golden = HERE / "golden"
    golden.mkdir(exist_ok=True)
    jobs = [
        (["ih", "--datum", str(HERE / "segre.json")], "segre_ih.md"),
        (["ih", "--datum", str(HERE / "cusp.json")], "cusp_ih.md"),
        (["ih", "--datum", str(HERE / "k3_cone.json")], "k3_cone_ih.md"),
        (["weights", "--datum", str(HERE / "cusp.json")], "cusp_weights.md"),
        (["weights", "--datum", str(HERE / "segre.json")], "segre_weights.md"),
        (["e1", "--datum", str(HERE / "segre.json"), "--which", "link"],
         "segre_e1_link.md"),
        (["e2", "--datum", str(HERE / "cusp.json")], "cusp_e2.md"),
    ]
    for args, name in jobs:
        out = subprocess.run(
            [sys.executable, "-m", "pwss.cli"] + args,
            capture_output=True, text=True, check=True,
        )
        (golden / name).write_text(out.stdout)


if __name__ == "__main__":
    build_data()
    build_golden()
    print("fixtures regenerated")

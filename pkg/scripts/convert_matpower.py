"""Convert a MATPOWER ``caseN.m`` file into the plain-text case format.

Field mapping (MATPOWER column, 1-based -> text field):

    [bus]     bus_i (1)               -> id
              gen present at the bus  -> type ("gen" or "load")
    [branch]  fbus (1), tbus (2)      -> from, to
              x (4)                   -> x   (series reactance, p.u.)
              status (11)             -> status
    [gen]     bus (1)                 -> bus
              status (8)              -> status

Resistance, charging, taps and all power-flow quantities are dropped; the
swing model only needs the lossless susceptance 1/x.

Usage: python3 scripts/convert_matpower.py case118.m > src/iface/data/case118.txt
"""

import re
import sys


def matrix(text, name):
    m = re.search(rf"mpc\.{name}\s*=\s*\[(.*?)\];", text, re.S)
    if m is None:
        raise SystemExit(f"no mpc.{name} block")
    rows = []
    for line in m.group(1).splitlines():
        line = line.split("%")[0].strip().rstrip(";").strip()
        if line:
            rows.append(line.split())
    return rows


def convert(text, source):
    bus = matrix(text, "bus")
    gen = matrix(text, "gen")
    branch = matrix(text, "branch")
    gen_buses = {int(g[0]) for g in gen if int(float(g[7])) > 0}
    out = [f"# converted from {source}", "", "[bus]", "# id type"]
    for b in bus:
        i = int(b[0])
        out.append(f"{i} {'gen' if i in gen_buses else 'load'}")
    out += ["", "[branch]", "# from to x status"]
    for br in branch:
        out.append(f"{int(br[0])} {int(br[1])} {br[3]} {int(float(br[10]))}")
    out += ["", "[gen]", "# bus status"]
    for g in gen:
        out.append(f"{int(g[0])} {int(float(g[7]))}")
    return "\n".join(out) + "\n"


def main(argv):
    if len(argv) != 2:
        raise SystemExit(__doc__)
    with open(argv[1]) as fh:
        sys.stdout.write(convert(fh.read(), argv[1].rsplit("/", 1)[-1]))


if __name__ == "__main__":
    main(sys.argv)

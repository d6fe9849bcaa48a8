"""Loop repeatedly around z = 0 and report the sheet reached after each turn.

Usage: python3 scripts/monodromy_demo.py [A] [LOOPS]
"""

import sys

from psibranches import Parameter, Tilde, build_atlas, monodromy_probe


def run(text: str = "1/2", loops: int = 6) -> int:
    a = Parameter.parse(text)
    atlas = build_atlas(a)
    print(f"a = {a}: {len(atlas.entries)} atlas entries, sheets linked at 0: "
          + ", ".join(str(s) for s in sorted(atlas.links(0j), key=str)))
    for sheet in monodromy_probe(a, 0j, Tilde(1), loops):
        print(f"  after loop: {sheet}")
    return 0


if __name__ == "__main__":
    sys.exit(run(sys.argv[1] if len(sys.argv) > 1 else "1/2", int(sys.argv[2]) if len(sys.argv) > 2 else 6))

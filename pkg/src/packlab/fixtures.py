"""Fixed groups and pairs used by the tests, demos and bundled JSON files."""
from __future__ import annotations

import cmath
import json
from importlib import resources

from .joinings import PingPongDisks, RepresentationPair, pingpong_for, pair_from_dict
from .moebius import MoebiusMap
from .orbits import GroupPresentation, presentation_from_dict, schottky_group

F1_DISKS = [((-3, 1), (3, 1)), ((-1, 0.3), (1, 0.3))]
F2_DISKS = [((-2, 0.6), (2, 0.6)), ((-2j, 0.6), (2j, 0.6))]
TWIST_ANGLE = 2.5
CONJUGATOR = MoebiusMap(1 + 0.2j, 0.3, 0.05j, 1)


def schottky_f1() -> GroupPresentation:
    """Fuchsian Schottky group, real pairing disks on the real axis."""
    return schottky_group(F1_DISKS, names=["a", "b"])


def schottky_f2() -> GroupPresentation:
    """Schottky group with one real and one imaginary pair, second one twisted."""
    return schottky_group(F2_DISKS, twists=[-1, 1j], names=["a", "b"])


def gamma2() -> GroupPresentation:
    """Principal congruence subgroup of level 2 (limit set: the real line)."""
    return GroupPresentation([MoebiusMap(1, 2, 0, 1), MoebiusMap(1, 0, 2, 1)], ["a", "b"])


def cyclic() -> GroupPresentation:
    """``<z -> 4z>``, limit set ``{0, inf}``."""
    return GroupPresentation([MoebiusMap(2, 0, 0, 0.5)], ["g"])


def f1_pingpong() -> list[PingPongDisks]:
    return [
        PingPongDisks("a", (3 + 0j, 1.0), (-3 + 0j, 1.0)),
        PingPongDisks("b", (1 + 0j, 0.3), (-1 + 0j, 0.3)),
    ]


def pair_same() -> RepresentationPair:
    pp = f1_pingpong()
    return RepresentationPair(schottky_f1(), schottky_f1(), pp, pp)


def pair_conjugate() -> RepresentationPair:
    pp = f1_pingpong()
    return RepresentationPair(
        schottky_f1(), schottky_f1().conjugate(CONJUGATOR), pp, pingpong_for(schottky_f1(), pp, CONJUGATOR)
    )


def pair_twisted() -> RepresentationPair:
    """Same disks, but ``b`` is followed by a rotation about its target disk."""
    pp = f1_pingpong()
    twisted = schottky_group(F1_DISKS, twists=[-1, cmath.exp(1j * TWIST_ANGLE)], names=["a", "b"])
    return RepresentationPair(schottky_f1(), twisted, pp, pp)


BUILDERS = {
    "schottky_f1": schottky_f1,
    "schottky_f2": schottky_f2,
    "gamma2": gamma2,
    "cyclic": cyclic,
    "pair_same": pair_same,
    "pair_conjugate": pair_conjugate,
    "pair_twisted": pair_twisted,
}


def fixture_path(name: str):
    """Path of a bundled JSON fixture (``schottky_f1``, ``pair_twisted``, ...)."""
    return resources.files("packlab") / "data" / f"{name}.json"


def load_fixture(name: str):
    data = json.loads(fixture_path(name).read_text(encoding="utf-8"))
    if name.startswith("pair_"):
        return pair_from_dict(data)
    return presentation_from_dict(data)


def write_fixtures(directory) -> None:
    from pathlib import Path

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name, build in BUILDERS.items():
        with open(directory / f"{name}.json", "w", encoding="utf-8", newline="\n") as fh:
            json.dump(build().to_dict(), fh, indent=2)
            fh.write("\n")

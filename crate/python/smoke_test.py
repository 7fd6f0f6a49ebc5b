"""Quick end-to-end check of the `horn` extension module."""

import cmath
import math

import horn


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol


def main():
    rad, exact = horn.parse_angle("2pi/3")
    assert close(rad, 2 * math.pi / 3) and exact == "2pi/3"

    t = horn.ClassTriple.parse("7pi/4,3pi/4;7pi/4,3pi/4;7pi/4,3pi/4")
    report = t.member()
    assert report["member"] and report["layers"] == ["1"]
    assert report["cell_per_layer"]["1"]["cell"] == "C_{6pi}^{+}"
    assert horn.in_solution_set("pi/4,pi/16;pi/4,pi/16;pi/4,pi/16") is False

    p = horn.AnglePair("3pi/2", "pi/2")
    assert horn.ClassTriple(p, p, p).active_walls() == ["Sigma_6pi"]

    assert len(horn.wall_catalog()) == 27
    cells = horn.cell_table()
    assert len(cells) == 28 and sum(c["full"] for c in cells) == 23

    cls = horn.classify([[1, 0, 0], [0, 1j, 0], [0, 0, 1]])
    assert cls["kind"] == "special_elliptic" and cls["mirror"] == "line"

    w = horn.find_witness("2pi/3,pi/3;2pi/3,pi/3;2pi/3,pi/3")
    assert w["reducibility"] == "irreducible" and w["layer"] == "omega"
    a, b, c = w["a"], w["b"], w["c"]
    prod = [[sum(a[i][k] * b[k][l] * c[l][j] for k in range(3) for l in range(3)) for j in range(3)] for i in range(3)]
    assert all(close(prod[i][j], (1 if i == j else 0), 1e-9) for i in range(3) for j in range(3))

    try:
        horn.find_witness("pi/4,pi/16;pi/4,pi/16;pi/4,pi/16", budget=2000)
    except LookupError:
        pass
    else:
        raise AssertionError("expected LookupError")

    d = horn.decompfamily_witness()
    assert abs(cmath.phase(d["H"][0][1]) - cmath.phase(d["H"][1][0].conjugate())) < 1e-12

    svg = horn.render_slice("5pi/4,pi/2", "11pi/6,pi/2", resolution=64)
    assert svg.lstrip().startswith("<?xml")
    assert horn.slice_components() == {"omega": 5, "1": 3, "omega^2": 5}

    try:
        horn.parse_angle("2pi/x")
    except ValueError as e:
        assert "position 4" in str(e)
    else:
        raise AssertionError("expected ValueError")

    print("smoke test passed")


if __name__ == "__main__":
    main()

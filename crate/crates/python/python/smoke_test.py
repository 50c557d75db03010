"""Quick check that the extension module loads and agrees with known gates."""

import math

import holonomy_lab_py as hl


def close(a, b, tol=1e-9):
    return all(abs(x - y) < tol for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def main():
    x = hl.one_qubit_gate([1.0, 0.0, 0.0])
    assert close(x, [[0, 1], [1, 0]]), x

    z = hl.one_qubit_gate([0.0, 0.0, 1.0])
    assert close(hl.compose_two([1.0, 0.0, 0.0], [0.0, 0.0, 1.0]), [[0, 1], [-1, 0]])

    s = 1 / math.sqrt(2)
    h = [[s, s], [s, -s]]
    n, m = hl.synthesize(h)
    u = hl.compose_two(n, m)
    phase = u[0][0] / h[0][0] if abs(h[0][0]) > 0.1 else u[0][1] / h[0][1]
    assert close(u, [[phase * v for v in row] for row in h]), u

    assert len(hl.two_qubit_gate(0.7, 1.1)) == 4

    hol, gate = hl.holonomy([(math.pi / 2, 0.0)])
    assert close(gate, x, 1e-6), gate
    _, composed = hl.holonomy([(math.pi / 2, 0.0), (0.0, 0.0)])
    expected = [[sum(z[i][k] * x[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
    assert close(composed, expected, 1e-6), composed

    run = hl.nonadiabatic_run(20.0, [1, 1], steps=4000, gap_steps=400)
    assert 0.0 < run.fidelity < 1.0 and run.max_trace_dev < 1e-8
    ad = hl.adiabatic_run(100.0, [1, 1j], decay=False, steps=4000)
    assert ad.fidelity > 0.99, ad.fidelity

    rows = hl.sweep("nonadiabatic-decay", [10.0, 100.0], n_states=50, steps=4000, gap_steps=400)
    assert [r.parameter for r in rows] == [10.0, 100.0]
    assert all(r.min_fidelity <= r.avg_fidelity <= r.max_fidelity for r in rows)
    assert rows[1].avg_fidelity > rows[0].avg_fidelity

    try:
        hl.one_qubit_gate([0.0, 0.0, 0.0])
    except ValueError:
        pass
    else:
        raise AssertionError("zero direction accepted")

    assert abs(abs(hol[0][0]) - 1.0) < 1e-6
    print("smoke test ok")


if __name__ == "__main__":
    main()

"""Smoke test for the swiss_cheese extension module.

Build and run from the repository root:

    cargo build --release -p swiss-cheese-py --features extension-module
    cp target/release/libswiss_cheese.so python/swiss_cheese.so
    python3 python/smoke_test.py
"""

import cmath
import json
import math

import swiss_cheese as sc


def main():
    cheese = sc.SwissCheese.generate(1.0, 4, 3, 7)
    assert len(cheese) == 9, repr(cheese)
    assert cheese.validate() == []
    assert 0 < cheese.certified_bound() <= 0.5
    assert abs(cheese.certified_bound() - 4 * math.pi * cheese.lemma21_sum()) < 1e-15

    again = sc.SwissCheese.from_json(cheese.to_json())
    assert again.to_json() == cheese.to_json()
    assert again.digest() == cheese.digest()
    assert cheese.contains(0j) and not cheese.contains(2 + 0j)
    center, radius = cheese.discs()[4]
    assert not cheese.contains(center)
    assert abs(cheese.distance_to_x(center) - radius) < 1e-15

    for n in range(1, 9):
        d = sc.derivation(sc.RationalFunction.power(n), sc.RationalFunction.inverse_power(n))
        assert abs(d - 2j * math.pi * n) < 1e-10, (n, d)

    f = sc.RationalFunction.power(1)
    g = sc.RationalFunction.pole_power(center, 1)
    assert abs(sc.residue_oracle_t(f, g) - 2j * math.pi) < 1e-12
    value, nodes, err, converged = sc.pairing_t(f, g)
    assert converged and abs(value - 2j * math.pi) < 1e-10
    assert abs(sc.sup_norm_x(g, cheese) - 1 / radius) < 1e-12 / radius
    assert abs(g(0.9 + 0j) - 1 / (0.9 - center)) < 1e-12

    for seed in range(20):
        f = sc.RationalFunction.random(cheese, seed)
        g = sc.RationalFunction.random(cheese, 1000 + seed)
        oracle = sc.residue_oracle_t(f, g)
        assert abs(sc.derivation(f, g) - oracle) <= 1e-9 * (1 + abs(oracle))
        assert abs(sc.derivation(f, g) + sc.derivation(g, f)) <= 1e-9 * (1 + abs(oracle))
        bound = cheese.certified_bound() * sc.sup_norm_x(f, cheese) * sc.sup_norm_x(g, cheese)
        assert abs(oracle) <= bound * (1 + 1e-8)

    rows = sc.l1_unboundedness_demo(8, cheese)
    assert [r[0] for r in rows] == list(range(1, 9))
    assert all(abs(l1 - 2 * math.pi * n) < 1e-9 and abs(sup - 1) < 1e-12 for n, sup, l1 in rows)

    report = json.loads(sc.verify(cheese, json.dumps({"sweep_pairs": 16, "sweep_triples": 8})))
    assert report["pass"], [k for k, v in report["summary"].items() if v["failures"]]
    single = json.loads(sc.pair_test(cheese, sc.RationalFunction.power(2), g))
    assert single["pass"]

    try:
        sc.SwissCheese.generate(1e6, 2, 1, 1)
    except RuntimeError:
        pass
    else:
        raise AssertionError("expected a construction failure")

    svg = cheese.render_svg()
    assert svg.count('class="disc"') == 9
    assert cmath.isclose(sc.RationalFunction.from_json(f.to_json())(0.3j), f(0.3j))
    print("swiss_cheese smoke test: ok")


if __name__ == "__main__":
    main()

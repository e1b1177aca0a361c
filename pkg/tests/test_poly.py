import random
from fractions import Fraction

from cocycle_lab.exact import KNumber, SymbolTable, knum
from cocycle_lab.poly import Poly, binomial_coefficients, is_integer_valued

T = SymbolTable(thetas=("th",), xis=(("xi", 3),))


def rand_poly(rng, nv, deg=3, symbols=False):
    terms = []
    for _ in range(rng.randint(1, 6)):
        exps = tuple(rng.randint(0, deg) for _ in range(nv))
        c = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
        if symbols and rng.random() < 0.5:
            terms.append((exps, knum(T, c, th=rng.randint(-2, 2))))
        else:
            terms.append((exps, KNumber.make(T, c)))
    return Poly.make(nv, T, terms)


def test_arithmetic_matches_pointwise_eval():
    rng = random.Random(7)
    for _ in range(50):
        nv = rng.randint(1, 3)
        p, q = rand_poly(rng, nv), rand_poly(rng, nv)
        pt = tuple(rng.randint(-4, 4) for _ in range(nv))
        assert (p + q).eval(pt) == p.eval(pt) + q.eval(pt)
        assert (p - q).eval(pt) == p.eval(pt) - q.eval(pt)
        assert (-p).eval(pt) == p.eval(pt).scale(-1)
        assert p.scale(Fraction(3, 2)).eval(pt) == p.eval(pt).scale(Fraction(3, 2))


def test_product_eval_rational():
    rng = random.Random(8)
    for _ in range(50):
        nv = rng.randint(1, 3)
        p, q = rand_poly(rng, nv), rand_poly(rng, nv)
        pt = tuple(rng.randint(-4, 4) for _ in range(nv))
        lhs = (p * q).eval(pt)
        rhs = p.eval(pt).scale(q.eval(pt).const)
        assert lhs == rhs


def test_substitute_matches_composition():
    rng = random.Random(9)
    for _ in range(40):
        nv, mv = rng.randint(1, 3), rng.randint(1, 3)
        p = rand_poly(rng, nv, symbols=True)
        mapping = {i: rand_poly(rng, mv) for i in range(nv)}
        pt = tuple(rng.randint(-3, 3) for _ in range(mv))
        inner = tuple(mapping[i].eval(pt).const for i in range(nv))
        assert p.substitute(mapping).eval(pt) == p.eval(inner)


def test_compose_linear_matches_matrix_action():
    rng = random.Random(10)
    for _ in range(40):
        nv, mv = rng.randint(1, 3), rng.randint(1, 3)
        p = rand_poly(rng, nv, symbols=True)
        mat = [[rng.randint(-2, 2) for _ in range(mv)] for _ in range(nv)]
        pt = tuple(rng.randint(-3, 3) for _ in range(mv))
        inner = tuple(sum(mat[i][j] * pt[j] for j in range(mv)) for i in range(nv))
        assert p.compose_linear(mat, mv).eval(pt) == p.eval(inner)


def test_symbol_components_partition_the_polynomial():
    rng = random.Random(11)
    for _ in range(30):
        p = rand_poly(rng, 2, symbols=True)
        pt = (rng.randint(-3, 3), rng.randint(-3, 3))
        v = p.eval(pt)
        rc = sum((c * pt[0] ** e[0] * pt[1] ** e[1] for e, c in p.rational_component().items()),
                 Fraction(0))
        assert v.const == rc
        for name in p.used_symbols():
            sc = sum((c * pt[0] ** e[0] * pt[1] ** e[1]
                      for e, c in p.symbol_component(name).items()), Fraction(0))
            assert v.coeff(name) == sc


def test_integer_valuedness_oracle():
    # binomial-basis verdict must agree with dense grid evaluation
    rng = random.Random(12)
    for _ in range(60):
        nv = rng.randint(1, 2)
        terms = {}
        for _ in range(rng.randint(1, 4)):
            e = tuple(rng.randint(0, 3) for _ in range(nv))
            terms[e] = terms.get(e, Fraction(0)) + Fraction(rng.randint(-4, 4), rng.choice((1, 1, 2, 3)))
        verdict = is_integer_valued(terms, nv)
        pts = range(-8, 9)
        if nv == 1:
            grid = [(x,) for x in pts]
        else:
            grid = [(x, y) for x in pts for y in pts]
        brute = all(
            sum((c * pt[0] ** e[0] * (pt[1] ** e[1] if nv == 2 else 1)
                 for e, c in terms.items()), Fraction(0)).denominator == 1
            for pt in grid)
        assert verdict == brute


def test_known_integer_valued_polynomials():
    # x(x-1)/2 and binomial(x,3) are integer-valued without integer coefficients
    half = {(2,): Fraction(1, 2), (1,): Fraction(-1, 2)}
    assert is_integer_valued(half, 1)
    choose3 = {(3,): Fraction(1, 6), (2,): Fraction(-1, 2), (1,): Fraction(1, 3)}
    assert is_integer_valued(choose3, 1)
    assert not is_integer_valued({(2,): Fraction(1, 2)}, 1)
    assert binomial_coefficients({(1,): Fraction(1)}, 1) == {(1,): Fraction(1)}
